//! Grids, fields and the validated problem specification shared by all modules.
//!
//! The half-plane domain is truncated to a periodic box of length `l1` in `x1`
//! and to `[0, l2]` in `x2`; validity of the truncation is enforced through an
//! edge-decay floor on the data rather than assumed.

use ndarray::{ArrayD, ArrayView2, ArrayView3, ArrayViewMut2, ArrayViewMut3, IxDyn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Result, UtmError};

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisTag {
    X1,
    X2,
    T,
    K1,
    K2,
    Tau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    /// Sign of the nonlinear term `±|u|^{α−1}u`.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Focusing => -1.0,
            Sign::Defocusing => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    LinearOnly,
    Nonlinear,
}

/// Problem parameters: Robin coefficient, nonlinearity, regularity and horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub gamma: f64,
    pub alpha: u32,
    pub sign: Sign,
    pub s: f64,
    pub t_horizon: f64,
    /// The constant of the lifespan formula; never quantified by theory, so a tunable.
    pub lifespan_constant: f64,
    /// Relative decay floor the data must reach at the grid edges.
    pub decay_floor: f64,
}

impl ProblemSpec {
    pub fn new(gamma: f64, alpha: u32, sign: Sign, s: f64, t_horizon: f64) -> Self {
        Self {
            gamma,
            alpha,
            sign,
            s,
            t_horizon,
            lifespan_constant: 1.0,
            decay_floor: 1e-8,
        }
    }
}

/// Tensor grid on the truncated half-plane times `[0, T]`.
///
/// `x1` is uniform periodic on `[-l1/2, l1/2)`, `x2` uniform on `[0, l2]`
/// (boundary node exactly at 0), `t` uniform on `[0, t_max]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid {
    pub n1: usize,
    pub n2: usize,
    pub nt: usize,
    pub l1: f64,
    pub l2: f64,
    pub t_max: f64,
}

impl Grid {
    pub fn new(n1: usize, n2: usize, nt: usize, l1: f64, l2: f64, t_max: f64) -> Result<Self> {
        if !n1.is_power_of_two() {
            return Err(UtmError::Grid(format!("n1 = {n1} must be a power of two")));
        }
        if n2 < 5 || n2 % 2 == 0 {
            return Err(UtmError::Grid(format!("n2 = {n2} must be odd and >= 5")));
        }
        if nt < 3 || nt % 2 == 0 {
            return Err(UtmError::Grid(format!("nt = {nt} must be odd and >= 3")));
        }
        if l1 <= 0.0 || l2 <= 0.0 || t_max <= 0.0 {
            return Err(UtmError::Grid("box lengths and horizon must be positive".into()));
        }
        Ok(Self { n1, n2, nt, l1, l2, t_max })
    }

    /// Desk-scale default resolution; full test suite stays in the minutes range.
    pub fn default_desk() -> Self {
        Self { n1: 64, n2: 65, nt: 33, l1: 20.0, l2: 20.0, t_max: 0.5 }
    }

    /// One refinement doubling: all counts double (so the dual bandwidth doubles too).
    pub fn refined(&self) -> Self {
        Self {
            n1: self.n1 * 2,
            n2: self.n2 * 2 - 1,
            nt: self.nt * 2 - 1,
            ..*self
        }
    }

    pub fn dx1(&self) -> f64 {
        self.l1 / self.n1 as f64
    }

    pub fn dx2(&self) -> f64 {
        self.l2 / (self.n2 - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_max / (self.nt - 1) as f64
    }

    pub fn x1_nodes(&self) -> Vec<f64> {
        let h = self.dx1();
        (0..self.n1).map(|j| -0.5 * self.l1 + j as f64 * h).collect()
    }

    pub fn x2_nodes(&self) -> Vec<f64> {
        let h = self.dx2();
        (0..self.n2).map(|j| j as f64 * h).collect()
    }

    /// Whole-plane `x2` grid `[-l2, l2)` used for zero/reflection extensions;
    /// periodic with `2(n2-1)` nodes, `x2 = 0` at index `n2 - 1`.
    pub fn x2_whole_nodes(&self) -> Vec<f64> {
        let h = self.dx2();
        let m = self.n2_whole();
        (0..m).map(|j| -self.l2 + j as f64 * h).collect()
    }

    pub fn n2_whole(&self) -> usize {
        2 * (self.n2 - 1)
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        let h = self.dt();
        (0..self.nt).map(|j| j as f64 * h).collect()
    }

    /// Dual frequency grid of `x1_nodes`: `2π/l1 · {-n1/2, …, n1/2 - 1}`, ascending.
    pub fn k1_nodes(&self) -> Vec<f64> {
        let dk = 2.0 * std::f64::consts::PI / self.l1;
        let n = self.n1 as i64;
        (0..n).map(|m| (m - n / 2) as f64 * dk).collect()
    }

    /// Dual grid of the whole-plane `x2` axis, ascending.
    pub fn k2_whole_nodes(&self) -> Vec<f64> {
        let m = self.n2_whole() as i64;
        let dk = 2.0 * std::f64::consts::PI / (2.0 * self.l2);
        (0..m).map(|j| (j - m / 2) as f64 * dk).collect()
    }

    pub fn k1_max(&self) -> f64 {
        std::f64::consts::PI / self.dx1()
    }

    pub fn nodes_for(&self, tag: AxisTag) -> Vec<f64> {
        match tag {
            AxisTag::X1 => self.x1_nodes(),
            AxisTag::X2 => self.x2_nodes(),
            AxisTag::T => self.t_nodes(),
            AxisTag::K1 => self.k1_nodes(),
            AxisTag::K2 => self.k2_whole_nodes(),
            AxisTag::Tau => {
                let dt = self.dt();
                let m = self.nt as i64;
                let dtau = 2.0 * std::f64::consts::PI / (self.nt as f64 * dt);
                (0..m).map(|j| (j - m / 2) as f64 * dtau).collect()
            }
        }
    }
}

/// Complex samples of a function on a tensor grid, self-describing through
/// per-axis coordinate vectors.
#[derive(Debug, Clone)]
pub struct GridField {
    pub data: ArrayD<C64>,
    pub axes: Vec<AxisTag>,
    pub coords: Vec<Vec<f64>>,
}

/// Sidecar header for the flat binary serialization.
#[derive(Debug, Serialize, Deserialize)]
struct FieldHeader {
    axes: Vec<AxisTag>,
    shape: Vec<usize>,
    spacings: Vec<f64>,
    origins: Vec<f64>,
}

impl GridField {
    pub fn zeros(axes: Vec<AxisTag>, coords: Vec<Vec<f64>>) -> Self {
        let shape: Vec<usize> = coords.iter().map(|c| c.len()).collect();
        Self {
            data: ArrayD::zeros(IxDyn(&shape)),
            axes,
            coords,
        }
    }

    pub fn shape(&self) -> &[usize] {
        self.data.shape()
    }

    pub fn axis_index(&self, tag: AxisTag) -> Option<usize> {
        self.axes.iter().position(|&a| a == tag)
    }

    pub fn as2(&self) -> ArrayView2<'_, C64> {
        self.data.view().into_dimensionality().expect("2d field")
    }

    pub fn as3(&self) -> ArrayView3<'_, C64> {
        self.data.view().into_dimensionality().expect("3d field")
    }

    pub fn as2_mut(&mut self) -> ArrayViewMut2<'_, C64> {
        self.data.view_mut().into_dimensionality().expect("2d field")
    }

    pub fn as3_mut(&mut self) -> ArrayViewMut3<'_, C64> {
        self.data.view_mut().into_dimensionality().expect("3d field")
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete L2 norm with the axis quadrature weights (trapezoid on bounded
    /// axes, full weight on periodic ones).
    pub fn l2_norm(&self) -> f64 {
        let mut sq = 0.0;
        for (idx, v) in self.data.indexed_iter() {
            let mut w = 1.0;
            for (d, &tag) in self.axes.iter().enumerate() {
                let n = self.coords[d].len();
                let h = if n > 1 {
                    self.coords[d][1] - self.coords[d][0]
                } else {
                    1.0
                };
                let j = idx[d];
                let bounded = matches!(tag, AxisTag::X2 | AxisTag::T | AxisTag::Tau);
                let edge = bounded && (j == 0 || j == n - 1);
                w *= if edge { 0.5 * h } else { h };
            }
            sq += w * v.norm_sqr();
        }
        sq.sqrt()
    }

    pub fn check_finite(&self, context: &str) -> Result<()> {
        if self.data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(UtmError::NonFinite(context.to_string()));
        }
        Ok(())
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.data.mapv_inplace(|v| v * factor);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.data += &other.data;
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.data -= &other.data;
        out
    }

    /// Flat binary of little-endian (re, im) f64 pairs plus a JSON sidecar.
    pub fn write_binary<P: AsRef<Path>>(&self, prefix: P) -> Result<()> {
        let prefix = prefix.as_ref();
        let header = FieldHeader {
            axes: self.axes.clone(),
            shape: self.shape().to_vec(),
            spacings: self
                .coords
                .iter()
                .map(|c| if c.len() > 1 { c[1] - c[0] } else { 0.0 })
                .collect(),
            origins: self.coords.iter().map(|c| c[0]).collect(),
        };
        let json = serde_json::to_string_pretty(&header)?;
        std::fs::write(prefix.with_extension("json"), json)?;
        let mut buf = Vec::with_capacity(self.data.len() * 16);
        for v in self.data.iter() {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        let mut f = std::fs::File::create(prefix.with_extension("bin"))?;
        f.write_all(&buf)?;
        Ok(())
    }

    pub fn read_binary<P: AsRef<Path>>(prefix: P) -> Result<Self> {
        let prefix = prefix.as_ref();
        let json = std::fs::read_to_string(prefix.with_extension("json"))?;
        let header: FieldHeader = serde_json::from_str(&json)?;
        let mut buf = Vec::new();
        std::fs::File::open(prefix.with_extension("bin"))?.read_to_end(&mut buf)?;
        let n: usize = header.shape.iter().product();
        if buf.len() != n * 16 {
            return Err(UtmError::Grid(format!(
                "binary payload has {} bytes, header implies {}",
                buf.len(),
                n * 16
            )));
        }
        let mut values = Vec::with_capacity(n);
        for chunk in buf.chunks_exact(16) {
            let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
            values.push(C64::new(re, im));
        }
        let coords = header
            .shape
            .iter()
            .zip(header.spacings.iter().zip(header.origins.iter()))
            .map(|(&n, (&h, &o))| (0..n).map(|j| o + j as f64 * h).collect())
            .collect();
        Ok(Self {
            data: ArrayD::from_shape_vec(IxDyn(&header.shape), values)
                .map_err(|e| UtmError::Grid(e.to_string()))?,
            axes: header.axes,
            coords,
        })
    }

    /// CSV export for 1D/2D slices: coordinate columns then re, im.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        if self.axes.len() > 2 {
            return Err(UtmError::AxisMismatch {
                expected: "1D or 2D field".into(),
                got: format!("{}D", self.axes.len()),
            });
        }
        let mut out = String::new();
        match self.axes.len() {
            1 => {
                out.push_str("coord,re,im\n");
                for (j, v) in self.data.iter().enumerate() {
                    out.push_str(&format!("{},{},{}\n", self.coords[0][j], v.re, v.im));
                }
            }
            _ => {
                out.push_str("coord0,coord1,re,im\n");
                let view = self.as2();
                for i in 0..view.nrows() {
                    for j in 0..view.ncols() {
                        let v = view[[i, j]];
                        out.push_str(&format!(
                            "{},{},{},{}\n",
                            self.coords[0][i], self.coords[1][j], v.re, v.im
                        ));
                    }
                }
            }
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Pointwise evaluation of a coordinate expression on the tensor grid.
pub fn sample<F>(expression: F, grid: &Grid, axes: &[AxisTag]) -> Result<GridField>
where
    F: Fn(&[f64]) -> C64,
{
    let coords: Vec<Vec<f64>> = axes.iter().map(|&t| grid.nodes_for(t)).collect();
    let mut field = GridField::zeros(axes.to_vec(), coords);
    let mut point = vec![0.0; axes.len()];
    for (idx, v) in field.data.indexed_iter_mut() {
        for d in 0..axes.len() {
            point[d] = field.coords[d][idx[d]];
        }
        *v = expression(&point);
    }
    field.check_finite("sample")?;
    Ok(field)
}

/// Initial datum, boundary datum and (optional) forcing on the grid.
#[derive(Debug, Clone)]
pub struct DataTriple {
    /// `u0` on `(x1, x2)`.
    pub u0: GridField,
    /// `g` on `(x1, t)`.
    pub g: GridField,
    /// `f` on `(x1, x2, t)`, absent for the homogeneous problem.
    pub f: Option<GridField>,
}

impl DataTriple {
    pub fn zero(grid: &Grid) -> Self {
        Self {
            u0: GridField::zeros(
                vec![AxisTag::X1, AxisTag::X2],
                vec![grid.x1_nodes(), grid.x2_nodes()],
            ),
            g: GridField::zeros(
                vec![AxisTag::X1, AxisTag::T],
                vec![grid.x1_nodes(), grid.t_nodes()],
            ),
            f: None,
        }
    }

    /// Max magnitude of `u0` on the edge nodes of both axes and of `g` on the
    /// `x1` edges, each relative to the field's own max.
    pub fn edge_levels(&self) -> (f64, f64) {
        let u0 = self.u0.as2();
        let (n1, n2) = (u0.nrows(), u0.ncols());
        let u0_max = self.u0.max_abs().max(f64::MIN_POSITIVE);
        let mut u0_edge: f64 = 0.0;
        for j in 0..n2 {
            u0_edge = u0_edge.max(u0[[0, j]].norm());
        }
        for i in 0..n1 {
            u0_edge = u0_edge.max(u0[[i, 0]].norm().max(u0[[i, n2 - 1]].norm()));
        }
        let g = self.g.as2();
        let g_max = self.g.max_abs();
        let mut g_edge: f64 = 0.0;
        for j in 0..g.ncols() {
            g_edge = g_edge.max(g[[0, j]].norm());
        }
        (
            u0_edge / u0_max,
            if g_max > 0.0 { g_edge / g_max } else { 0.0 },
        )
    }
}

/// Checks the parity of `alpha`, the admissible `s` range for the requested
/// path, the horizon, and the data decay floors.
pub fn validate_spec(
    spec: &ProblemSpec,
    grid: &Grid,
    data: &DataTriple,
    path: SolvePath,
) -> Result<ProblemSpec> {
    if spec.alpha < 3 || spec.alpha % 2 == 0 {
        return Err(UtmError::AlphaParity(spec.alpha));
    }
    match path {
        SolvePath::Nonlinear => {
            if !(spec.s > 1.0 && spec.s < 1.5) {
                return Err(UtmError::RangeS(spec.s, "(1, 3/2) for the nonlinear path"));
            }
            if spec.t_horizon >= 1.0 {
                return Err(UtmError::HorizonTooLarge(spec.t_horizon));
            }
        }
        SolvePath::LinearOnly => {
            if spec.s < 0.0 {
                return Err(UtmError::RangeS(spec.s, "s >= 0"));
            }
        }
    }
    data.u0.check_finite("u0")?;
    data.g.check_finite("g")?;
    if let Some(f) = &data.f {
        f.check_finite("f")?;
    }
    let (u0_edge, g_edge) = data.edge_levels();
    if data.u0.max_abs() > 0.0 && u0_edge > spec.decay_floor {
        return Err(UtmError::EdgeDecay {
            context: "u0 at the x1/x2 grid edges".into(),
            value: u0_edge,
            floor: spec.decay_floor,
        });
    }
    if g_edge > spec.decay_floor {
        return Err(UtmError::EdgeDecay {
            context: "g at the x1 grid edges".into(),
            value: g_edge,
            floor: spec.decay_floor,
        });
    }
    let _ = grid;
    Ok(spec.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_duality() {
        let grid = Grid::new(8, 5, 5, 4.0, 2.0, 1.0).unwrap();
        let k1 = grid.k1_nodes();
        let dk = 2.0 * std::f64::consts::PI / 4.0;
        for (m, &k) in k1.iter().enumerate() {
            let expect = (m as f64 - 4.0) * dk;
            assert!((k - expect).abs() < 1e-14);
        }
        assert_eq!(grid.x2_nodes()[0], 0.0);
    }

    #[test]
    fn sample_matches_direct_evaluation() {
        let grid = Grid::new(4, 5, 3, 8.0, 4.0, 1.0).unwrap();
        let f = sample(
            |p| C64::new((-p[0] * p[0] - p[1] * p[1]).exp(), 0.0),
            &grid,
            &[AxisTag::X1, AxisTag::X2],
        )
        .unwrap();
        let v = f.as2();
        for (i, &x1) in grid.x1_nodes().iter().enumerate() {
            for (j, &x2) in grid.x2_nodes().iter().enumerate() {
                assert_eq!(v[[i, j]].re, (-x1 * x1 - x2 * x2).exp());
            }
        }
        // x2-trace at x2 = 0 equals sampling the restricted expression
        for (i, &x1) in grid.x1_nodes().iter().enumerate() {
            assert_eq!(v[[i, 0]].re, (-x1 * x1).exp());
        }
    }

    #[test]
    fn sample_roundtrip_polynomial_exact() {
        let grid = Grid::new(8, 5, 3, 4.0, 2.0, 1.0).unwrap();
        let f = sample(
            |p| C64::new(3.0 * p[0] * p[0] - p[1], 0.5 * p[0]),
            &grid,
            &[AxisTag::X1, AxisTag::X2],
        )
        .unwrap();
        let v = f.as2();
        for (i, &x1) in grid.x1_nodes().iter().enumerate() {
            for (j, &x2) in grid.x2_nodes().iter().enumerate() {
                assert_eq!(v[[i, j]], C64::new(3.0 * x1 * x1 - x2, 0.5 * x1));
            }
        }
    }

    #[test]
    fn validate_accepts_zero_data() {
        let grid = Grid::default_desk();
        let spec = ProblemSpec::new(-1.0, 3, Sign::Defocusing, 1.2, 0.5);
        let data = DataTriple::zero(&grid);
        assert!(validate_spec(&spec, &grid, &data, SolvePath::Nonlinear).is_ok());
    }

    #[test]
    fn validate_rejects_even_alpha() {
        let grid = Grid::default_desk();
        let spec = ProblemSpec::new(-1.0, 4, Sign::Defocusing, 1.2, 0.5);
        let data = DataTriple::zero(&grid);
        match validate_spec(&spec, &grid, &data, SolvePath::Nonlinear) {
            Err(UtmError::AlphaParity(4)) => {}
            other => panic!("expected AlphaParity, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_wide_gaussian() {
        // Gaussian whose value at the x1 edge is ~1e-3, well above the 1e-8 floor:
        // exp(-(L1/2)^2 / w^2) = 1e-3 at L1 = 20 gives w^2 = 100/ln(1000).
        let grid = Grid::default_desk();
        let spec = ProblemSpec::new(-1.0, 3, Sign::Defocusing, 1.2, 0.5);
        let w2 = 100.0 / 1000f64.ln();
        let mut data = DataTriple::zero(&grid);
        data.u0 = sample(
            |p| C64::new((-(p[0] * p[0]) / w2 - (p[1] - 10.0).powi(2)).exp(), 0.0),
            &grid,
            &[AxisTag::X1, AxisTag::X2],
        )
        .unwrap();
        match validate_spec(&spec, &grid, &data, SolvePath::LinearOnly) {
            Err(UtmError::EdgeDecay { value, .. }) => {
                assert!(value > 1e-4 && value < 1e-2, "edge level {value}");
            }
            other => panic!("expected EdgeDecay, got {other:?}"),
        }
    }

    #[test]
    fn binary_roundtrip() {
        let grid = Grid::new(8, 5, 3, 4.0, 2.0, 1.0).unwrap();
        let f = sample(
            |p| C64::new(p[0].sin(), p[1].cos()),
            &grid,
            &[AxisTag::X1, AxisTag::X2],
        )
        .unwrap();
        let dir = std::env::temp_dir().join("utm_grid_test");
        std::fs::create_dir_all(&dir).unwrap();
        let prefix = dir.join("field");
        f.write_binary(&prefix).unwrap();
        let back = GridField::read_binary(&prefix).unwrap();
        assert_eq!(back.shape(), f.shape());
        for (a, b) in back.data.iter().zip(f.data.iter()) {
            assert_eq!(a, b);
        }
    }
}
