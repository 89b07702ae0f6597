//! Independent ground-truth generators: the closed-form free evolution of a
//! Gaussian pulse, a Crank-Nicolson finite-difference solver with ghost-node
//! Robin boundary handling, and a Strang split-step nonlinear solver. None of
//! them share code with the contour-integral solution path.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, UtmError};
use crate::fft::{fourier_centered_forward, fourier_centered_inverse};
use crate::grid::{AxisTag, DataTriple, Grid, GridField, ProblemSpec};
use crate::record::SolutionRecord;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleScheme {
    GaussianClosedForm,
    CrankNicolson,
    SplitStep,
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    pub scheme: OracleScheme,
    pub refinement: u32,
    /// zero Dirichlet at x2 = L2 (adequate under the edge-decay floor)
    pub theta_weight: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            scheme: OracleScheme::CrankNicolson,
            refinement: 1,
            theta_weight: 0.5,
        }
    }
}

/// A moving, modulated Gaussian and its exact free-Schrödinger evolution.
///
/// One axis factor with spread a, center c and velocity v evolves as
///   w(x,t) = sqrt(a/(a+it)) exp(-(x-c-vt)^2/(4(a+it))) exp(i(vx/2 - v^2 t/4)),
/// which at t = 0 is exp(-(x-c)^2/(4a)) exp(ivx/2); the full pulse is the
/// product of the two axis factors times the amplitude.
#[derive(Debug, Clone)]
pub struct GaussianPulse {
    pub amplitude: C64,
    pub center: [f64; 2],
    pub a: f64,
    pub velocity: [f64; 2],
}

impl GaussianPulse {
    fn axis_factor(&self, axis: usize, x: f64, t: f64) -> C64 {
        let c = self.center[axis];
        let v = self.velocity[axis];
        let az = C64::new(self.a, t);
        let shift = x - c - v * t;
        let root = (C64::new(self.a, 0.0) / az).sqrt();
        root * (-(shift * shift) / (4.0 * az) + C64::new(0.0, 0.5 * v * x - 0.25 * v * v * t))
            .exp()
    }

    fn axis_factor_dx(&self, axis: usize, x: f64, t: f64) -> C64 {
        let c = self.center[axis];
        let v = self.velocity[axis];
        let az = C64::new(self.a, t);
        let shift = x - c - v * t;
        self.axis_factor(axis, x, t) * (-shift / (2.0 * az) + C64::new(0.0, 0.5 * v))
    }

    pub fn value(&self, x1: f64, x2: f64, t: f64) -> C64 {
        self.amplitude * self.axis_factor(0, x1, t) * self.axis_factor(1, x2, t)
    }

    pub fn dx2(&self, x1: f64, x2: f64, t: f64) -> C64 {
        self.amplitude * self.axis_factor(0, x1, t) * self.axis_factor_dx(1, x2, t)
    }

    /// (∂_{x2} + γ)u at x2 = 0, the compatible Robin datum for manufactured
    /// solutions.
    pub fn robin_datum(&self, x1: f64, t: f64, gamma: f64) -> C64 {
        self.dx2(x1, 0.0, t) + gamma * self.value(x1, 0.0, t)
    }

    pub fn initial_field(&self, grid: &Grid) -> GridField {
        let mut f = GridField::zeros(
            vec![AxisTag::X1, AxisTag::X2],
            vec![grid.x1_nodes(), grid.x2_nodes()],
        );
        {
            let mut v = f.as2_mut();
            for (i, &x1) in grid.x1_nodes().iter().enumerate() {
                for (j, &x2) in grid.x2_nodes().iter().enumerate() {
                    v[[i, j]] = self.value(x1, x2, 0.0);
                }
            }
        }
        f
    }

    pub fn robin_datum_field(&self, grid: &Grid, gamma: f64) -> GridField {
        let mut g = GridField::zeros(
            vec![AxisTag::X1, AxisTag::T],
            vec![grid.x1_nodes(), grid.t_nodes()],
        );
        {
            let mut v = g.as2_mut();
            for (i, &x1) in grid.x1_nodes().iter().enumerate() {
                for (n, &t) in grid.t_nodes().iter().enumerate() {
                    v[[i, n]] = self.robin_datum(x1, t, gamma);
                }
            }
        }
        g
    }

    /// Exact evolution restricted to the half-plane grid, on (x1, x2, t).
    pub fn halfplane_history(&self, grid: &Grid) -> GridField {
        let mut f = GridField::zeros(
            vec![AxisTag::X1, AxisTag::X2, AxisTag::T],
            vec![grid.x1_nodes(), grid.x2_nodes(), grid.t_nodes()],
        );
        {
            let mut v = f.as3_mut();
            for (i, &x1) in grid.x1_nodes().iter().enumerate() {
                for (j, &x2) in grid.x2_nodes().iter().enumerate() {
                    for (n, &t) in grid.t_nodes().iter().enumerate() {
                        v[[i, j, n]] = self.value(x1, x2, t);
                    }
                }
            }
        }
        f
    }
}

/// Exact free evolution on the whole-plane grid (x1, doubled x2, t).
pub fn gaussian_free_evolution(pulse: &GaussianPulse, grid: &Grid) -> GridField {
    let mut f = GridField::zeros(
        vec![AxisTag::X1, AxisTag::X2, AxisTag::T],
        vec![grid.x1_nodes(), grid.x2_whole_nodes(), grid.t_nodes()],
    );
    {
        let mut v = f.as3_mut();
        for (i, &x1) in grid.x1_nodes().iter().enumerate() {
            for (j, &x2) in grid.x2_whole_nodes().iter().enumerate() {
                for (n, &t) in grid.t_nodes().iter().enumerate() {
                    v[[i, j, n]] = pulse.value(x1, x2, t);
                }
            }
        }
    }
    f
}

/// Complex tridiagonal solve (Thomas algorithm); overwrites nothing.
fn solve_tridiagonal(
    lower: &[C64],
    diag: &[C64],
    upper: &[C64],
    rhs: &[C64],
) -> Result<Vec<C64>> {
    let n = diag.len();
    let mut c = vec![C64::new(0.0, 0.0); n];
    let mut d = vec![C64::new(0.0, 0.0); n];
    let mut piv = diag[0];
    if piv.norm() == 0.0 {
        return Err(UtmError::LinearSolveFailure("zero pivot".into()));
    }
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for j in 1..n {
        piv = diag[j] - lower[j] * c[j - 1];
        if piv.norm() == 0.0 {
            return Err(UtmError::LinearSolveFailure(format!("zero pivot at row {j}")));
        }
        if j < n - 1 {
            c[j] = upper[j] / piv;
        }
        d[j] = (rhs[j] - lower[j] * d[j - 1]) / piv;
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    x[n - 1] = d[n - 1];
    for j in (0..n - 1).rev() {
        x[j] = d[j] - c[j] * x[j + 1];
    }
    Ok(x)
}

/// One Crank-Nicolson mode: i u_t = (k1^2 - ∂_{x2}^2) u + f̂ with the Robin
/// condition folded in through the ghost node u_{-1} = u_1 + 2h(γu_0 - ĝ)
/// and zero Dirichlet at x2 = L2 (unknowns j = 0 .. n2-2).
struct CnMode {
    lower: Vec<C64>,
    diag: Vec<C64>,
    upper: Vec<C64>,
    h: f64,
    dt: f64,
    theta: f64,
}

impl CnMode {
    fn new(k1: f64, grid: &Grid, gamma: f64, theta: f64) -> Self {
        let n = grid.n2 - 1;
        let h = grid.dx2();
        let ih2 = 1.0 / (h * h);
        let mut lower = vec![C64::new(0.0, 0.0); n];
        let mut diag = vec![C64::new(0.0, 0.0); n];
        let mut upper = vec![C64::new(0.0, 0.0); n];
        // L = ∂_{x2}^2 - k1^2 with the ghost row at j = 0
        diag[0] = C64::new(2.0 * gamma / h - 2.0 * ih2 - k1 * k1, 0.0);
        upper[0] = C64::new(2.0 * ih2, 0.0);
        for j in 1..n {
            lower[j] = C64::new(ih2, 0.0);
            diag[j] = C64::new(-2.0 * ih2 - k1 * k1, 0.0);
            if j < n - 1 {
                upper[j] = C64::new(ih2, 0.0);
            }
        }
        Self {
            lower,
            diag,
            upper,
            h,
            dt: grid.dt(),
            theta,
        }
    }

    /// u_t = iLu - i(2/h)ĝ e_0 - i f̂, advanced by one θ-weighted step with
    /// midpoint boundary/forcing data.
    fn step(&self, u: &mut [C64], g_mid: C64, f_mid: &[C64]) -> Result<()> {
        let n = u.len();
        let i = C64::new(0.0, 1.0);
        let mu_new = i * self.dt * self.theta;
        let mu_old = i * self.dt * (1.0 - self.theta);
        // rhs = (I + mu_old L) u - i dt (2/h) ĝ e0 - i dt f̂
        let mut rhs = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut lu = self.diag[j] * u[j];
            if j > 0 {
                lu += self.lower[j] * u[j - 1];
            }
            if j < n - 1 {
                lu += self.upper[j] * u[j + 1];
            }
            rhs[j] = u[j] + mu_old * lu - i * self.dt * f_mid[j];
        }
        rhs[0] -= i * self.dt * (2.0 / self.h) * g_mid;
        // lhs matrix I - mu_new L
        let lower: Vec<C64> = self.lower.iter().map(|&v| -mu_new * v).collect();
        let diag: Vec<C64> = self.diag.iter().map(|&v| C64::new(1.0, 0.0) - mu_new * v).collect();
        let upper: Vec<C64> = self.upper.iter().map(|&v| -mu_new * v).collect();
        let next = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
        u.copy_from_slice(&next);
        Ok(())
    }
}

fn spectral_data(grid: &Grid, data: &DataTriple) -> (Array2<C64>, Option<Vec<Array2<C64>>>) {
    // ĝ(k1, t) and f̂(k1, x2, t): x1-spectra of the data
    let g = data.g.as2();
    let mut ghat = Array2::zeros((grid.n1, grid.nt));
    for n in 0..grid.nt {
        let col: Vec<C64> = (0..grid.n1).map(|ii| g[[ii, n]]).collect();
        let t = fourier_centered_forward(&col, grid.dx1());
        for m in 0..grid.n1 {
            ghat[[m, n]] = t[m];
        }
    }
    let fhat = data.f.as_ref().map(|f| {
        let v = f.as3();
        (0..grid.nt)
            .map(|n| {
                let mut sheet = Array2::zeros((grid.n1, grid.n2));
                for j in 0..grid.n2 {
                    let col: Vec<C64> = (0..grid.n1).map(|ii| v[[ii, j, n]]).collect();
                    let t = fourier_centered_forward(&col, grid.dx1());
                    for m in 0..grid.n1 {
                        sheet[[m, j]] = t[m];
                    }
                }
                sheet
            })
            .collect()
    });
    (ghat, fhat)
}

/// Linear Crank-Nicolson reference solver: diagonalize x1 by the discrete
/// transform, march each mode with the ghost-node Robin boundary.
pub fn crank_nicolson_halfplane(
    spec: &ProblemSpec,
    grid: &Grid,
    data: &DataTriple,
    config: &OracleConfig,
) -> Result<SolutionRecord> {
    let (ghat, fhat) = spectral_data(grid, data);
    let u0 = data.u0.as2();
    let mut u0hat = Array2::zeros((grid.n1, grid.n2));
    for j in 0..grid.n2 {
        let col: Vec<C64> = (0..grid.n1).map(|ii| u0[[ii, j]]).collect();
        let t = fourier_centered_forward(&col, grid.dx1());
        for m in 0..grid.n1 {
            u0hat[[m, j]] = t[m];
        }
    }
    let k1 = grid.k1_nodes();
    let n_int = grid.n2 - 1;
    let mode_histories: Vec<Result<Vec<Vec<C64>>>> = (0..grid.n1)
        .into_par_iter()
        .map(|m| {
            let cn = CnMode::new(k1[m], grid, spec.gamma, config.theta_weight);
            let mut u: Vec<C64> = (0..n_int).map(|j| u0hat[[m, j]]).collect();
            let mut history = vec![u.clone()];
            for n in 0..grid.nt - 1 {
                let g_mid = 0.5 * (ghat[[m, n]] + ghat[[m, n + 1]]);
                let f_mid: Vec<C64> = match &fhat {
                    Some(sheets) => (0..n_int)
                        .map(|j| 0.5 * (sheets[n][[m, j]] + sheets[n + 1][[m, j]]))
                        .collect(),
                    None => vec![C64::new(0.0, 0.0); n_int],
                };
                cn.step(&mut u, g_mid, &f_mid)?;
                history.push(u.clone());
            }
            Ok(history)
        })
        .collect();
    assemble_record(grid, spec.gamma, mode_histories)
}

fn assemble_record(
    grid: &Grid,
    gamma: f64,
    mode_histories: Vec<Result<Vec<Vec<C64>>>>,
) -> Result<SolutionRecord> {
    let n_int = grid.n2 - 1;
    let mut hat = vec![Array2::<C64>::zeros((grid.n1, grid.n2)); grid.nt];
    for (m, h) in mode_histories.into_iter().enumerate() {
        let h = h?;
        for (n, snapshot) in h.into_iter().enumerate() {
            for j in 0..n_int {
                hat[n][[m, j]] = snapshot[j];
            }
        }
    }
    let mut u = GridField::zeros(
        vec![AxisTag::X1, AxisTag::X2, AxisTag::T],
        vec![grid.x1_nodes(), grid.x2_nodes(), grid.t_nodes()],
    );
    {
        let mut v = u.as3_mut();
        for n in 0..grid.nt {
            for j in 0..grid.n2 {
                let col: Vec<C64> = (0..grid.n1).map(|m| hat[n][[m, j]]).collect();
                let phys = fourier_centered_inverse(&col, grid.l1);
                for i in 0..grid.n1 {
                    v[[i, j, n]] = phys[i];
                }
            }
        }
    }
    u.check_finite("finite-difference oracle output")?;
    SolutionRecord::from_field(u, gamma)
}

/// Strang split-step solver for the nonlinear equation: half-step of the
/// exact nonlinear phase rotation, one Crank-Nicolson linear step, half-step
/// of the phase rotation.
pub fn splitstep_nls(
    spec: &ProblemSpec,
    grid: &Grid,
    data: &DataTriple,
    config: &OracleConfig,
) -> Result<SolutionRecord> {
    if spec.alpha < 3 || spec.alpha % 2 == 0 {
        return Err(UtmError::AlphaParity(spec.alpha));
    }
    let (ghat, fhat) = spectral_data(grid, data);
    let sf = spec.sign.factor();
    let pow = ((spec.alpha - 1) / 2) as i32;
    let n_int = grid.n2 - 1;
    let dt = grid.dt();
    let k1 = grid.k1_nodes();
    let modes: Vec<CnMode> = (0..grid.n1)
        .map(|m| CnMode::new(k1[m], grid, spec.gamma, config.theta_weight))
        .collect();
    // physical-space state on (x1, x2 interior)
    let u0 = data.u0.as2();
    let mut state = Array2::zeros((grid.n1, n_int));
    for i in 0..grid.n1 {
        for j in 0..n_int {
            state[[i, j]] = u0[[i, j]];
        }
    }
    let phase_half = |state: &mut Array2<C64>| {
        for v in state.iter_mut() {
            let intensity = (v.norm_sqr()).powi(pow);
            *v *= C64::new(0.0, -sf * intensity * 0.5 * dt).exp();
        }
    };
    let mut snapshots = vec![state.clone()];
    for n in 0..grid.nt - 1 {
        phase_half(&mut state);
        // linear step in mode space
        let mut hat = Array2::zeros((grid.n1, n_int));
        for j in 0..n_int {
            let col: Vec<C64> = (0..grid.n1).map(|i| state[[i, j]]).collect();
            let t = fourier_centered_forward(&col, grid.dx1());
            for m in 0..grid.n1 {
                hat[[m, j]] = t[m];
            }
        }
        let stepped: Vec<Result<Vec<C64>>> = (0..grid.n1)
            .into_par_iter()
            .map(|m| {
                let mut u: Vec<C64> = (0..n_int).map(|j| hat[[m, j]]).collect();
                let g_mid = 0.5 * (ghat[[m, n]] + ghat[[m, n + 1]]);
                let f_mid: Vec<C64> = match &fhat {
                    Some(sheets) => (0..n_int)
                        .map(|j| 0.5 * (sheets[n][[m, j]] + sheets[n + 1][[m, j]]))
                        .collect(),
                    None => vec![C64::new(0.0, 0.0); n_int],
                };
                modes[m].step(&mut u, g_mid, &f_mid)?;
                Ok(u)
            })
            .collect();
        for (m, res) in stepped.into_iter().enumerate() {
            let res = res?;
            for j in 0..n_int {
                hat[[m, j]] = res[j];
            }
        }
        for j in 0..n_int {
            let col: Vec<C64> = (0..grid.n1).map(|m| hat[[m, j]]).collect();
            let phys = fourier_centered_inverse(&col, grid.l1);
            for i in 0..grid.n1 {
                state[[i, j]] = phys[i];
            }
        }
        phase_half(&mut state);
        snapshots.push(state.clone());
    }
    let mut u = GridField::zeros(
        vec![AxisTag::X1, AxisTag::X2, AxisTag::T],
        vec![grid.x1_nodes(), grid.x2_nodes(), grid.t_nodes()],
    );
    {
        let mut v = u.as3_mut();
        for (n, snap) in snapshots.iter().enumerate() {
            for i in 0..grid.n1 {
                for j in 0..n_int {
                    v[[i, j, n]] = snap[[i, j]];
                }
            }
        }
    }
    u.check_finite("split-step oracle output")?;
    SolutionRecord::from_field(u, spec.gamma)
}
