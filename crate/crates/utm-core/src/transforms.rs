//! Forward and inverse transforms used by the solution formula: the x1
//! Fourier transform, the half-plane transform at (possibly complex) k2, the
//! oscillatory time transform, and the half-line Laplace transform.

use ndarray::{Array2, Axis};
use num_complex::Complex64;

use crate::error::{Result, UtmError};
use crate::fft::{fourier_centered_forward, fourier_centered_inverse};
use crate::grid::{AxisTag, Grid, GridField};
use crate::quad::{filon_integral, filon_weights};

type C64 = Complex64;

/// Samples over (k1, k2) with k2 allowed off the real axis (contour nodes).
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub values: Array2<C64>,
    pub k1_nodes: Vec<f64>,
    pub k2_nodes: Vec<C64>,
}

/// Continuous-normalization Fourier transform along the x1 axis of a 1D, 2D
/// or 3D field; the axis tag flips X1 -> K1.
pub fn fourier_x1(field: &GridField) -> Result<GridField> {
    transform_x1_axis(field, true)
}

/// Inverse of `fourier_x1` (1/(2π) normalization), flips K1 -> X1.
pub fn inverse_fourier_x1(field: &GridField) -> Result<GridField> {
    transform_x1_axis(field, false)
}

fn transform_x1_axis(field: &GridField, forward: bool) -> Result<GridField> {
    let want = if forward { AxisTag::X1 } else { AxisTag::K1 };
    let axis = field.axis_index(want).ok_or_else(|| UtmError::AxisMismatch {
        expected: format!("an {want:?} axis"),
        got: format!("{:?}", field.axes),
    })?;
    let n = field.coords[axis].len();
    let (dx, length) = if forward {
        let dx = field.coords[axis][1] - field.coords[axis][0];
        (dx, dx * n as f64)
    } else {
        let dk = field.coords[axis][1] - field.coords[axis][0];
        let l = 2.0 * std::f64::consts::PI / dk;
        (l / n as f64, l)
    };
    let mut out = field.clone();
    for mut lane in out.data.lanes_mut(Axis(axis)) {
        let buf: Vec<C64> = lane.iter().copied().collect();
        let res = if forward {
            fourier_centered_forward(&buf, dx)
        } else {
            fourier_centered_inverse(&buf, length)
        };
        for (v, r) in lane.iter_mut().zip(res) {
            *v = r;
        }
    }
    out.axes[axis] = if forward { AxisTag::K1 } else { AxisTag::X1 };
    let dk = 2.0 * std::f64::consts::PI / length;
    out.coords[axis] = (0..n)
        .map(|m| {
            if forward {
                (m as f64 - (n / 2) as f64) * dk
            } else {
                -0.5 * length + m as f64 * dx
            }
        })
        .collect();
    Ok(out)
}

/// Half-plane transform û(k1, k2) = ∬ e^{-ik1·x1 - ik2·x2} u dx2 dx1 of a
/// field on (x1, x2 >= 0), at the given complex k2 nodes with Im(k2) <= 0.
///
/// Fast transform in x1; the x2 integral uses the Filon rule with frequency
/// -k2, so the oscillatory kernel is integrated exactly and the error is the
/// O(h^4) quadratic-interpolation error of the data, uniformly in k2. A plain
/// Newton-Cotes rule would lose accuracy both at large |k2| (aliasing) and at
/// the x2 = 0 boundary, where the data does not vanish.
pub fn halfplane_fourier(field: &GridField, k2_nodes: &[C64]) -> Result<SpectralField> {
    for &k2 in k2_nodes {
        if k2.im > 1e-14 {
            return Err(UtmError::UpperHalfK2(k2));
        }
    }
    let hat1 = fourier_x1(field)?;
    let view = hat1.as2();
    let n1 = view.nrows();
    let n2 = view.ncols();
    let h2 = hat1.coords[1][1] - hat1.coords[1][0];
    let mut values = Array2::zeros((n1, k2_nodes.len()));
    for (q, &k2) in k2_nodes.iter().enumerate() {
        let w2 = filon_weights(n2, 0.0, h2, -k2)?;
        for m in 0..n1 {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n2 {
                acc += w2[j] * view[[m, j]];
            }
            values[[m, q]] = acc;
        }
    }
    Ok(SpectralField {
        values,
        k1_nodes: hat1.coords[0].clone(),
        k2_nodes: k2_nodes.to_vec(),
    })
}

/// g̃(k1, ω, T) = ∫₀^T e^{iωt} ĝ^{x1}(k1, t) dt at the k1 node nearest the
/// requested value. Vector variants working directly on a spectral row are in
/// `time_transform_row`.
pub fn time_transform(g: &GridField, k1: f64, omega: C64, t_horizon: f64) -> Result<C64> {
    let ghat = fourier_x1(g)?;
    let view = ghat.as2();
    let idx = ghat.coords[0]
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - k1).abs().partial_cmp(&(b.1 - k1).abs()).unwrap())
        .map(|(i, _)| i)
        .ok_or_else(|| UtmError::Grid("empty k1 grid".into()))?;
    let dt = ghat.coords[1][1] - ghat.coords[1][0];
    let nt_used = ((t_horizon / dt).round() as usize + 1).min(ghat.coords[1].len());
    let row: Vec<C64> = (0..nt_used).map(|j| view[[idx, j]]).collect();
    time_transform_row(&row, dt, omega)
}

/// Filon integral of e^{iωt} y(t) over the uniform grid carrying y.
pub fn time_transform_row(y: &[C64], dt: f64, omega: C64) -> Result<C64> {
    filon_integral(y, 0.0, dt, omega)
}

/// (Lφ)(x) = ∫ e^{-kx} φ(k) dk on a (possibly nonuniform) positive k grid,
/// trapezoid rule. The k grid stands in for [0, ∞); φ must have decayed at
/// its last node.
pub fn laplace_halfline(
    phi: &[f64],
    k_nodes: &[f64],
    x_nodes: &[f64],
    decay_floor: f64,
) -> Result<Vec<f64>> {
    let n = phi.len();
    if n != k_nodes.len() || n < 2 {
        return Err(UtmError::AxisMismatch {
            expected: format!("{} k nodes", n),
            got: format!("{}", k_nodes.len()),
        });
    }
    let max = phi.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    if max > 0.0 && phi[n - 1].abs() > decay_floor * max {
        return Err(UtmError::EdgeDecay {
            context: "Laplace input at K_max".into(),
            value: phi[n - 1].abs() / max,
            floor: decay_floor,
        });
    }
    let mut weights = vec![0.0; n];
    for j in 0..n - 1 {
        let h = k_nodes[j + 1] - k_nodes[j];
        weights[j] += 0.5 * h;
        weights[j + 1] += 0.5 * h;
    }
    Ok(x_nodes
        .iter()
        .map(|&x| {
            k_nodes
                .iter()
                .zip(phi.iter().zip(weights.iter()))
                .map(|(&k, (&p, &w))| w * p * (-k * x).exp())
                .sum()
        })
        .collect())
}

/// Whole-plane two-axis forward transform of a field on (x1, x2_whole), both
/// axes centered and periodic; returns values on (k1, k2) dual grids.
pub fn fourier_plane(values: &Array2<C64>, l1: f64, l2_whole: f64) -> Array2<C64> {
    let (n1, n2) = values.dim();
    let dx1 = l1 / n1 as f64;
    let dx2 = l2_whole / n2 as f64;
    let mut out = Array2::zeros((n1, n2));
    for j in 0..n2 {
        let col: Vec<C64> = (0..n1).map(|i| values[[i, j]]).collect();
        let t = fourier_centered_forward(&col, dx1);
        for i in 0..n1 {
            out[[i, j]] = t[i];
        }
    }
    for i in 0..n1 {
        let row: Vec<C64> = (0..n2).map(|j| out[[i, j]]).collect();
        let t = fourier_centered_forward(&row, dx2);
        for j in 0..n2 {
            out[[i, j]] = t[j];
        }
    }
    out
}

/// Inverse of `fourier_plane`.
pub fn inverse_fourier_plane(values: &Array2<C64>, l1: f64, l2_whole: f64) -> Array2<C64> {
    let (n1, n2) = values.dim();
    let mut out = Array2::zeros((n1, n2));
    for j in 0..n2 {
        let col: Vec<C64> = (0..n1).map(|i| values[[i, j]]).collect();
        let t = fourier_centered_inverse(&col, l1);
        for i in 0..n1 {
            out[[i, j]] = t[i];
        }
    }
    for i in 0..n1 {
        let row: Vec<C64> = (0..n2).map(|j| out[[i, j]]).collect();
        let t = fourier_centered_inverse(&row, l2_whole);
        for j in 0..n2 {
            out[[i, j]] = t[j];
        }
    }
    out
}

/// Zero-extension of a half-plane field to the whole-plane x2 grid
/// [-L2, L2); the half-plane samples occupy indices n2-1 .. 2(n2-1)-1 and the
/// top node x2 = L2 wraps to -L2 (its value is below the decay floor).
pub fn zero_extend_x2(field: &GridField, grid: &Grid) -> Array2<C64> {
    let v = field.as2();
    let n1 = grid.n1;
    let m = grid.n2_whole();
    let mut out = Array2::zeros((n1, m));
    for i in 0..n1 {
        for j in 0..grid.n2 - 1 {
            out[[i, grid.n2 - 1 + j]] = v[[i, j]];
        }
    }
    out
}

/// Even reflection about x2 = 0 onto the whole-plane grid.
pub fn even_extend_x2(field: &GridField, grid: &Grid) -> Array2<C64> {
    let v = field.as2();
    let n1 = grid.n1;
    let m = grid.n2_whole();
    let mut out = Array2::zeros((n1, m));
    for i in 0..n1 {
        for j in 0..grid.n2 - 1 {
            out[[i, grid.n2 - 1 + j]] = v[[i, j]];
            if j > 0 {
                out[[i, grid.n2 - 1 - j]] = v[[i, j]];
            }
        }
        // the wrap node -L2 carries the reflected value from x2 = L2
        out[[i, 0]] = v[[i, grid.n2 - 1]];
    }
    out
}
