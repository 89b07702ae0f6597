//! Solution container and boundary trace operators.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Result, UtmError};
use crate::fft::{fft_forward, fft_inverse};
use crate::grid::{AxisTag, Grid, GridField};

type C64 = Complex64;

/// A computed space-time field together with its boundary traces and named
/// diagnostics (residuals, norms, timings).
#[derive(Debug, Clone)]
pub struct SolutionRecord {
    /// u on (x1, x2, t)
    pub u: GridField,
    /// u(x1, 0, t)
    pub dirichlet_trace: GridField,
    /// (∂_{x2} u + γ u)(x1, 0, t)
    pub robin_trace: GridField,
    pub diagnostics: BTreeMap<String, f64>,
}

impl SolutionRecord {
    pub fn from_field(u: GridField, gamma: f64) -> Result<Self> {
        let dirichlet_trace = dirichlet_trace(&u)?;
        let robin_trace = robin_trace_fd(&u, gamma)?;
        Ok(Self {
            u,
            dirichlet_trace,
            robin_trace,
            diagnostics: BTreeMap::new(),
        })
    }
}

pub fn dirichlet_trace(u: &GridField) -> Result<GridField> {
    let v = u.as3();
    let (n1, _, nt) = v.dim();
    let mut out = GridField::zeros(
        vec![AxisTag::X1, AxisTag::T],
        vec![u.coords[0].clone(), u.coords[2].clone()],
    );
    {
        let mut o = out.as2_mut();
        for i in 0..n1 {
            for n in 0..nt {
                o[[i, n]] = v[[i, 0, n]];
            }
        }
    }
    Ok(out)
}

/// (∂_{x2} + γ)u at x2 = 0 by one-sided 4th-order differencing in x2.
pub fn robin_trace_fd(u: &GridField, gamma: f64) -> Result<GridField> {
    let v = u.as3();
    let (n1, n2, nt) = v.dim();
    if n2 < 5 {
        return Err(UtmError::TooFewNodes { need: 5, got: n2 });
    }
    let h = u.coords[1][1] - u.coords[1][0];
    let mut out = GridField::zeros(
        vec![AxisTag::X1, AxisTag::T],
        vec![u.coords[0].clone(), u.coords[2].clone()],
    );
    {
        let mut o = out.as2_mut();
        for i in 0..n1 {
            for n in 0..nt {
                let d = (-25.0 * v[[i, 0, n]] + 48.0 * v[[i, 1, n]] - 36.0 * v[[i, 2, n]]
                    + 16.0 * v[[i, 3, n]]
                    - 3.0 * v[[i, 4, n]])
                    / (12.0 * h);
                o[[i, n]] = d + gamma * v[[i, 0, n]];
            }
        }
    }
    Ok(out)
}

/// (∂_{x2} + γ)u at x2 = 0 for a whole-plane snapshot on the periodic
/// [-L2, L2) grid: the derivative is exact via ik2 multiplication in the x2
/// spectrum. Returns the trace as a function of x1.
pub fn robin_trace_spectral_snapshot(
    values: &Array2<C64>,
    grid: &Grid,
    gamma: f64,
) -> Vec<C64> {
    let (n1, m) = values.dim();
    debug_assert_eq!(m, grid.n2_whole());
    let boundary = grid.n2 - 1;
    let dk = std::f64::consts::PI / grid.l2;
    let mut out = vec![C64::new(0.0, 0.0); n1];
    for i in 0..n1 {
        let mut row: Vec<C64> = (0..m).map(|j| values[[i, j]]).collect();
        fft_forward(&mut row);
        // FFT index f: frequency (2π/2L2)·f for f < m/2, f - m for f >= m/2
        for (f, v) in row.iter_mut().enumerate() {
            let freq = if f < m / 2 {
                f as f64
            } else {
                f as f64 - m as f64
            } * dk;
            *v *= C64::new(0.0, freq);
        }
        fft_inverse(&mut row);
        let deriv = row[boundary] / m as f64;
        out[i] = deriv + gamma * values[[i, boundary]];
    }
    out
}
