//! Contraction-mapping solution of the nonlinear problem: power nonlinearity,
//! lifespan formula, Picard iteration of u -> S[u0, g; +-|u|^{alpha-1} u],
//! and Lipschitz data-to-solution probing.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, UtmError};
use crate::grid::{validate_spec, AxisTag, DataTriple, Grid, GridField, ProblemSpec, SolvePath};
use crate::linear_solver::solve_forced_ibvp;
use crate::record::SolutionRecord;
use crate::spaces::{
    bts_norm, sobolev_norm_halfplane, ExtensionMode, HalfplaneExtension,
};

type C64 = Complex64;

/// Norms and contraction ratios of one Picard run.
#[derive(Debug, Clone, Serialize)]
pub struct IterationHistory {
    /// sup-in-t upper-bound H^s norm of each iterate
    pub iterate_norms: Vec<f64>,
    /// ||u_{n+1} - u_n|| / ||u_n - u_{n-1}|| in the same norm
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    pub t_star: f64,
    /// lifespan halvings spent after NoContraction signals
    pub retries: u32,
}

/// Pointwise +-|u|^{alpha-1} u via integer powers of u conj(u); odd integer
/// alpha only, so no branch cuts arise.
pub fn nonlinearity(u: &GridField, alpha: u32, sign: crate::grid::Sign) -> Result<GridField> {
    if alpha < 3 || alpha % 2 == 0 {
        return Err(UtmError::AlphaParity(alpha));
    }
    let pow = (alpha - 1) / 2;
    let mut out = u.clone();
    let sf = sign.factor();
    for v in out.data.iter_mut() {
        let m = *v * v.conj();
        let mut w = C64::new(1.0, 0.0);
        for _ in 0..pow {
            w *= m;
        }
        *v = sf * w * *v;
    }
    Ok(out)
}

/// T* = min{T, c (||u0|| + ||g||)^{-2(alpha-1)}}; zero data gives T.
pub fn lifespan(u0_norm: f64, g_norm: f64, spec: &ProblemSpec) -> f64 {
    let total = u0_norm + g_norm;
    if total == 0.0 {
        return spec.t_horizon;
    }
    let exponent = -2.0 * (spec.alpha as f64 - 1.0);
    spec.t_horizon
        .min(spec.lifespan_constant * total.powf(exponent))
}

/// Largest-over-time upper-bound H^s norm of a space-time field, using the
/// even-reflection extension of each time slice.
pub fn sup_t_hs_norm(u: &GridField, s: f64) -> Result<f64> {
    let v = u.as3();
    let (n1, n2, nt) = v.dim();
    let mut worst: f64 = 0.0;
    for n in 0..nt {
        let mut slice = GridField::zeros(
            vec![AxisTag::X1, AxisTag::X2],
            vec![u.coords[0].clone(), u.coords[1].clone()],
        );
        {
            let mut s2 = slice.as2_mut();
            for i in 0..n1 {
                for j in 0..n2 {
                    s2[[i, j]] = v[[i, j, n]];
                }
            }
        }
        worst = worst.max(crate::spaces::sobolev_norm_halfplane_unchecked(
            &slice,
            s,
            HalfplaneExtension::EvenReflection,
        )?);
    }
    Ok(worst)
}

/// Cubic Lagrange resampling of a boundary datum onto a new uniform time
/// axis contained in the original one.
fn resample_time(g: &GridField, new_nodes: &[f64]) -> GridField {
    let v = g.as2();
    let (n1, nt) = v.dim();
    let t0 = g.coords[1][0];
    let dt = g.coords[1][1] - g.coords[1][0];
    let mut out = GridField::zeros(
        vec![AxisTag::X1, AxisTag::T],
        vec![g.coords[0].clone(), new_nodes.to_vec()],
    );
    {
        let mut o = out.as2_mut();
        for (m, &t) in new_nodes.iter().enumerate() {
            let pos = (t - t0) / dt;
            let base = ((pos.floor() as isize) - 1).clamp(0, nt as isize - 4) as usize;
            let mut w = [0.0f64; 4];
            for a in 0..4 {
                let mut prod = 1.0;
                let xa = base as f64 + a as f64;
                for b in 0..4 {
                    if a != b {
                        let xb = base as f64 + b as f64;
                        prod *= (pos - xb) / (xa - xb);
                    }
                }
                w[a] = prod;
            }
            for i in 0..n1 {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..4 {
                    acc += w[a] * v[[i, base + a]];
                }
                o[[i, m]] = acc;
            }
        }
    }
    out
}

struct Attempt {
    record: SolutionRecord,
    norms: Vec<f64>,
    ratios: Vec<f64>,
    converged: bool,
}

fn picard_attempt(
    spec: &ProblemSpec,
    grid: &Grid,
    data: &DataTriple,
    tol: f64,
    max_iter: usize,
) -> Result<Attempt> {
    let (first, _) = solve_forced_ibvp(spec, grid, data)?;
    let mut current = first;
    let mut norms = vec![sup_t_hs_norm(&current.u, spec.s)?];
    let mut ratios: Vec<f64> = Vec::new();
    let mut diffs: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut bad_streak = 0u32;
    for _ in 0..max_iter {
        let f = nonlinearity(&current.u, spec.alpha, spec.sign)?;
        let forced = DataTriple {
            u0: data.u0.clone(),
            g: data.g.clone(),
            f: Some(f),
        };
        let (next, _) = solve_forced_ibvp(spec, grid, &forced)?;
        let diff = sup_t_hs_norm(&next.u.sub(&current.u), spec.s)?;
        if let Some(&prev) = diffs.last() {
            if prev > 0.0 {
                let ratio = diff / prev;
                ratios.push(ratio);
                if ratio > 1.0 {
                    bad_streak += 1;
                    if bad_streak >= 3 {
                        return Err(UtmError::NoContraction(ratios));
                    }
                } else {
                    bad_streak = 0;
                }
            }
        }
        diffs.push(diff);
        current = next;
        norms.push(sup_t_hs_norm(&current.u, spec.s)?);
        if diff < tol {
            converged = true;
            break;
        }
    }
    Ok(Attempt {
        record: current,
        norms,
        ratios,
        converged,
    })
}

/// Picard iteration of the full solution map on [0, T*], where T* comes from
/// the lifespan formula; if the iteration signals no contraction, T* is
/// halved and the run retried, up to 4 times.
pub fn solve_nls_picard(
    spec: &ProblemSpec,
    grid: &Grid,
    data: &DataTriple,
    tol: f64,
    max_iter: usize,
) -> Result<(SolutionRecord, IterationHistory)> {
    validate_spec(spec, grid, data, SolvePath::Nonlinear)?;
    let u0_norm = sobolev_norm_halfplane(&data.u0, spec.s, HalfplaneExtension::EvenReflection)?;
    let g_norm = bts_norm(&data.g, spec.s, ExtensionMode::ZeroExtension, false)?;
    let mut t_star = lifespan(u0_norm, g_norm, spec);
    let mut retries = 0u32;
    loop {
        let run_grid = Grid::new(grid.n1, grid.n2, grid.nt, grid.l1, grid.l2, t_star)?;
        let run_spec = ProblemSpec {
            t_horizon: t_star,
            ..spec.clone()
        };
        let run_data = DataTriple {
            u0: data.u0.clone(),
            g: resample_time(&data.g, &run_grid.t_nodes()),
            f: None,
        };
        match picard_attempt(&run_spec, &run_grid, &run_data, tol, max_iter) {
            Ok(attempt) => {
                let mut record = attempt.record;
                // boundary-condition residual of the converged iterate
                let rt = record.robin_trace.clone();
                let resid = rt.sub(&run_data.g).max_abs();
                record
                    .diagnostics
                    .insert("boundary_residual_max".into(), resid);
                // independent oracle comparison on the same horizon
                let oracle = crate::oracles::splitstep_nls(
                    &run_spec,
                    &run_grid,
                    &run_data,
                    &crate::oracles::OracleConfig::default(),
                )?;
                let denom = oracle.u.l2_norm().max(f64::MIN_POSITIVE);
                record.diagnostics.insert(
                    "splitstep_rel_l2".into(),
                    record.u.sub(&oracle.u).l2_norm() / denom,
                );
                record.diagnostics.insert("t_star".into(), t_star);
                let history = IterationHistory {
                    iterate_norms: attempt.norms,
                    contraction_ratios: attempt.ratios,
                    converged: attempt.converged,
                    t_star,
                    retries,
                };
                return Ok((record, history));
            }
            Err(UtmError::NoContraction(ratios)) => {
                if retries >= 4 {
                    return Err(UtmError::NoContraction(ratios));
                }
                retries += 1;
                t_star *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Data-to-solution stability quotient: solutions for two nearby data sets
/// on a common lifespan, measured in the upper-bound norms.
pub fn lipschitz_probe(
    spec: &ProblemSpec,
    grid: &Grid,
    data_a: &DataTriple,
    data_b: &DataTriple,
) -> Result<f64> {
    let du0 = data_a.u0.sub(&data_b.u0);
    let dg = data_a.g.sub(&data_b.g);
    let denom = sobolev_norm_halfplane(&du0, spec.s, HalfplaneExtension::EvenReflection)?
        + bts_norm(&dg, spec.s, ExtensionMode::ZeroExtension, false)?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    // common lifespan: the smaller of the two
    let norm_of = |d: &DataTriple| -> Result<f64> {
        Ok(
            sobolev_norm_halfplane(&d.u0, spec.s, HalfplaneExtension::EvenReflection)?
                + bts_norm(&d.g, spec.s, ExtensionMode::ZeroExtension, false)?,
        )
    };
    let worst = norm_of(data_a)?.max(norm_of(data_b)?);
    let t_star = lifespan(worst, 0.0, spec);
    let pinned = ProblemSpec {
        // pin both runs to the common horizon by making the formula's second
        // branch no smaller than t_star for either data set
        lifespan_constant: f64::INFINITY,
        t_horizon: t_star.min(spec.t_horizon),
        ..spec.clone()
    };
    let (sol_a, _) = solve_nls_picard(&pinned, grid, data_a, 1e-10, 40)?;
    let (sol_b, _) = solve_nls_picard(&pinned, grid, data_b, 1e-10, 40)?;
    let num = sup_t_hs_norm(&sol_a.u.sub(&sol_b.u), spec.s)?;
    Ok(num / denom)
}
