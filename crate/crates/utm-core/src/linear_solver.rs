//! Evaluation of the contour-integral solution formulas: the five-term forced
//! problem on the half-plane, the reduced boundary-data-only problem, the
//! whole-plane initial value problem, and the global-relation / superposition
//! residual audits.
//!
//! Real-axis spectral terms go through the doubled-grid FFT; contour terms are
//! assembled per k1 mode as sums over complex k2 quadrature nodes and then
//! inverse-transformed in x1 only. The x2 and t dependence enters through
//! e^{ik2·x2} and e^{-i(k1^2+k2^2)t} evaluated at the nodes.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::contours::{build_quadrature, select_contour, ContourQuadrature};
use crate::error::{Result, UtmError};
use crate::grid::{validate_spec, AxisTag, DataTriple, Grid, GridField, ProblemSpec, SolvePath};
use crate::quad::{filon_cumulative, filon_integral, filon_weights};
use crate::record::{robin_trace_spectral_snapshot, SolutionRecord};
use crate::transforms::{
    fourier_plane, fourier_x1, inverse_fourier_plane, inverse_fourier_x1, zero_extend_x2,
};

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// The five summands of the solution formula; they add up to u exactly
/// because u is assembled as their sum.
#[derive(Debug, Clone)]
pub struct TermBreakdown {
    pub initial: GridField,
    pub reflected_initial: GridField,
    pub forcing: GridField,
    pub reflected_forcing: GridField,
    pub boundary: GridField,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// contour/ray truncation; defaults to the dual-grid bandwidth max |k1|
    pub k_max: Option<f64>,
    /// contour node density per unit |k2|; defaults to an automatic choice
    /// that resolves the e^{ik2·x2 - ik2^2 t} phase on the truncated rays
    pub nodes_per_unit: Option<f64>,
    /// evaluate the reflection and boundary coefficients as the literal
    /// constants 1 and 2 of the Neumann formula instead of the gamma-dependent
    /// expressions (only meaningful for gamma = 0)
    pub literal_neumann: bool,
    /// also assemble the boundary term with the running-horizon transform
    /// g̃(·,·,t) and report its deviation from the g̃(·,·,T) variant
    pub horizon_variant_diagnostic: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            k_max: None,
            nodes_per_unit: None,
            literal_neumann: false,
            horizon_variant_diagnostic: false,
        }
    }
}

/// Phase rate along the rays is at most L2 + 2·K_max·T; with 8-node panels
/// about 6 radians of phase per panel keep the panel error near round-off.
fn auto_density(grid: &Grid, k_max: f64, t_max: f64) -> f64 {
    let rate = grid.l2 + 2.0 * k_max * t_max;
    (rate * 8.0 / 6.0).max(4.0)
}

fn guard_contour_exponent(quad: &ContourQuadrature, t_max: f64) -> Result<()> {
    let worst = quad
        .nodes
        .iter()
        .map(|k| (k * k).im.abs())
        .fold(0.0, f64::max)
        * t_max;
    if worst > 700.0 {
        return Err(UtmError::Overflow(worst));
    }
    Ok(())
}

fn halfplane_field_zeros(grid: &Grid) -> GridField {
    GridField::zeros(
        vec![AxisTag::X1, AxisTag::X2, AxisTag::T],
        vec![grid.x1_nodes(), grid.x2_nodes(), grid.t_nodes()],
    )
}

fn spectral_field_zeros(grid: &Grid) -> GridField {
    GridField::zeros(
        vec![AxisTag::K1, AxisTag::X2, AxisTag::T],
        vec![grid.k1_nodes(), grid.x2_nodes(), grid.t_nodes()],
    )
}

/// Restrict a whole-plane (x1, x2_whole) sheet to the half-plane x2 grid; the
/// top node x2 = L2 reads the periodic wrap at -L2.
fn restrict_sheet(sheet: &Array2<C64>, grid: &Grid) -> Array2<C64> {
    let mut out = Array2::zeros((grid.n1, grid.n2));
    let m = grid.n2_whole();
    for i in 0..grid.n1 {
        for j in 0..grid.n2 {
            out[[i, j]] = sheet[[i, (grid.n2 - 1 + j) % m]];
        }
    }
    out
}

/// Free evolution of the zero-extended initial datum, restricted to the
/// half-plane: the first term of the solution formula.
fn free_evolution_term(u0: &GridField, grid: &Grid) -> Result<GridField> {
    let ext = zero_extend_x2(u0, grid);
    let hat = fourier_plane(&ext, grid.l1, 2.0 * grid.l2);
    let k1 = grid.k1_nodes();
    let k2 = grid.k2_whole_nodes();
    let mut out = halfplane_field_zeros(grid);
    let mut view = out.as3_mut();
    for (n, &t) in grid.t_nodes().iter().enumerate() {
        let mut sheet = hat.clone();
        for (m1, &a) in k1.iter().enumerate() {
            for (m2, &b) in k2.iter().enumerate() {
                sheet[[m1, m2]] *= (-I * (a * a + b * b) * t).exp();
            }
        }
        let phys = inverse_fourier_plane(&sheet, grid.l1, 2.0 * grid.l2);
        let restricted = restrict_sheet(&phys, grid);
        for i in 0..grid.n1 {
            for j in 0..grid.n2 {
                view[[i, j, n]] = restricted[[i, j]];
            }
        }
    }
    drop(view);
    Ok(out)
}

/// Duhamel forcing term over the real spectral axes (zero-extended f),
/// restricted to the half-plane: the third term of the solution formula.
fn duhamel_term(f: &GridField, grid: &Grid) -> Result<GridField> {
    let v = f.as3();
    let dt = grid.dt();
    let k1 = grid.k1_nodes();
    let k2 = grid.k2_whole_nodes();
    let m2n = grid.n2_whole();
    // x-space slices -> spectral sheets per time node
    let mut sheets: Vec<Array2<C64>> = Vec::with_capacity(grid.nt);
    for n in 0..grid.nt {
        let mut slice = GridField::zeros(
            vec![AxisTag::X1, AxisTag::X2],
            vec![grid.x1_nodes(), grid.x2_nodes()],
        );
        {
            let mut s = slice.as2_mut();
            for i in 0..grid.n1 {
                for j in 0..grid.n2 {
                    s[[i, j]] = v[[i, j, n]];
                }
            }
        }
        let ext = zero_extend_x2(&slice, grid);
        sheets.push(fourier_plane(&ext, grid.l1, 2.0 * grid.l2));
    }
    // per-mode cumulative Duhamel integral
    let results: Vec<Result<Vec<C64>>> = (0..grid.n1 * m2n)
        .into_par_iter()
        .map(|flat| {
            let m1 = flat / m2n;
            let m2 = flat % m2n;
            let om = C64::new(k1[m1] * k1[m1] + k2[m2] * k2[m2], 0.0);
            let series: Vec<C64> = (0..grid.nt).map(|n| sheets[n][[m1, m2]]).collect();
            let cum = filon_cumulative(&series, 0.0, dt, om)?;
            Ok((0..grid.nt)
                .map(|n| -I * (-om * I * (n as f64 * dt)).exp() * cum[n])
                .collect())
        })
        .collect();
    let mut spectral: Vec<Array2<C64>> = vec![Array2::zeros((grid.n1, m2n)); grid.nt];
    for (flat, res) in results.into_iter().enumerate() {
        let res = res?;
        let m1 = flat / m2n;
        let m2 = flat % m2n;
        for n in 0..grid.nt {
            spectral[n][[m1, m2]] = res[n];
        }
    }
    let mut out = halfplane_field_zeros(grid);
    let mut view = out.as3_mut();
    for (n, sheet) in spectral.iter().enumerate() {
        let phys = inverse_fourier_plane(sheet, grid.l1, 2.0 * grid.l2);
        let restricted = restrict_sheet(&phys, grid);
        for i in 0..grid.n1 {
            for j in 0..grid.n2 {
                view[[i, j, n]] = restricted[[i, j]];
            }
        }
    }
    drop(view);
    Ok(out)
}

struct ContourIngredients {
    quad: ContourQuadrature,
    /// reflection coefficient (k2+iγ)/(k2-iγ) per node
    refl: Vec<C64>,
    /// boundary coefficient 2k2/(k2-iγ) per node
    bdry: Vec<C64>,
    /// e^{ik2·x2_j} per node and x2 index
    ex2: Vec<Vec<C64>>,
    /// Filon x2 weights giving û(k1,-k2) = Σ_j w_j û^{x1}(k1, x2_j)
    refl_weights: Vec<Vec<C64>>,
}

fn contour_ingredients(
    gamma: f64,
    grid: &Grid,
    t_max: f64,
    opts: &SolverOptions,
) -> Result<ContourIngredients> {
    let k_max = opts.k_max.unwrap_or_else(|| grid.k1_max());
    let density = opts
        .nodes_per_unit
        .unwrap_or_else(|| auto_density(grid, k_max, t_max));
    let quad = build_quadrature(&select_contour(gamma), k_max, density)?;
    guard_contour_exponent(&quad, t_max)?;
    let ig = C64::new(0.0, gamma);
    let refl: Vec<C64> = quad
        .nodes
        .iter()
        .map(|&k| {
            if opts.literal_neumann {
                C64::new(1.0, 0.0)
            } else {
                (k + ig) / (k - ig)
            }
        })
        .collect();
    let bdry: Vec<C64> = quad
        .nodes
        .iter()
        .map(|&k| {
            if opts.literal_neumann {
                C64::new(2.0, 0.0)
            } else {
                2.0 * k / (k - ig)
            }
        })
        .collect();
    let x2 = grid.x2_nodes();
    let ex2: Vec<Vec<C64>> = quad
        .nodes
        .iter()
        .map(|&k| x2.iter().map(|&x| (I * k * x).exp()).collect())
        .collect();
    let h2 = grid.dx2();
    let refl_weights: Vec<Vec<C64>> = quad
        .nodes
        .iter()
        .map(|&k| filon_weights(grid.n2, 0.0, h2, k))
        .collect::<Result<_>>()?;
    Ok(ContourIngredients {
        quad,
        refl,
        bdry,
        ex2,
        refl_weights,
    })
}

struct ModeOutput {
    term2: Array2<C64>,
    term4: Option<Array2<C64>>,
    term5: Array2<C64>,
    horizon_dev: Array2<C64>,
}

/// Solve the forced linear problem with prescribed Robin datum, with solver
/// options exposed.
pub fn solve_forced_ibvp_opt(
    spec: &ProblemSpec,
    grid: &Grid,
    data: &DataTriple,
    opts: &SolverOptions,
) -> Result<(SolutionRecord, TermBreakdown)> {
    validate_spec(spec, grid, data, SolvePath::LinearOnly)?;
    let started = std::time::Instant::now();
    let ing = contour_ingredients(spec.gamma, grid, grid.t_max, opts)?;
    let nq = ing.quad.nodes.len();
    let (n1, n2, nt) = (grid.n1, grid.n2, grid.nt);
    let dt = grid.dt();
    let k1 = grid.k1_nodes();
    let t_nodes = grid.t_nodes();

    // real-axis terms
    let term1 = free_evolution_term(&data.u0, grid)?;
    let term3 = match &data.f {
        Some(f) => Some(duhamel_term(f, grid)?),
        None => None,
    };

    // x1-spectral data for the contour terms
    let u0hat1 = fourier_x1(&data.u0)?;
    let u0hat1 = u0hat1.as2();
    let ghat1 = fourier_x1(&data.g)?;
    let ghat1 = ghat1.as2();
    let fhat1 = match &data.f {
        Some(f) => Some(fourier_x1(f)?),
        None => None,
    };

    let mode_results: Vec<Result<ModeOutput>> = (0..n1)
        .into_par_iter()
        .map(|m| {
            let mut term2 = Array2::<C64>::zeros((n2, nt));
            let mut term4 = fhat1.as_ref().map(|_| Array2::<C64>::zeros((n2, nt)));
            let mut term5 = Array2::<C64>::zeros((n2, nt));
            let mut horizon_dev = Array2::<C64>::zeros((n2, nt));
            let g_row: Vec<C64> = (0..nt).map(|n| ghat1[[m, n]]).collect();
            let fhat_m = fhat1.as_ref().map(|fh| fh.as3());
            for q in 0..nq {
                let k2 = ing.quad.nodes[q];
                let w = ing.quad.weights[q];
                let om = C64::new(k1[m] * k1[m], 0.0) + k2 * k2;
                // û0(k1, -k2) through the shared Filon x2 weights
                let mut u0_refl = C64::new(0.0, 0.0);
                for j in 0..n2 {
                    u0_refl += ing.refl_weights[q][j] * u0hat1[[m, j]];
                }
                let a2 = ing.refl[q] * u0_refl;
                let gt_full = filon_integral(&g_row, 0.0, dt, om)?;
                let b5 = -I * ing.bdry[q] * gt_full;
                let gt_cum = if opts.horizon_variant_diagnostic {
                    Some(filon_cumulative(&g_row, 0.0, dt, om)?)
                } else {
                    None
                };
                let f_cum = match &fhat_m {
                    Some(fm) => {
                        let series: Vec<C64> = (0..nt)
                            .map(|n| {
                                let mut acc = C64::new(0.0, 0.0);
                                for j in 0..n2 {
                                    acc += ing.refl_weights[q][j] * fm[[m, j, n]];
                                }
                                acc
                            })
                            .collect();
                        Some(filon_cumulative(&series, 0.0, dt, om)?)
                    }
                    None => None,
                };
                for (n, &t) in t_nodes.iter().enumerate() {
                    let et = (-I * om * t).exp();
                    let c2 = w * a2 * et;
                    let c5 = w * b5 * et;
                    for j in 0..n2 {
                        term2[[j, n]] += c2 * ing.ex2[q][j];
                        term5[[j, n]] += c5 * ing.ex2[q][j];
                    }
                    if let (Some(t4), Some(cum)) = (term4.as_mut(), f_cum.as_ref()) {
                        let c4 = w * (-I) * ing.refl[q] * cum[n] * et;
                        for j in 0..n2 {
                            t4[[j, n]] += c4 * ing.ex2[q][j];
                        }
                    }
                    if let Some(cum) = gt_cum.as_ref() {
                        let cdev = w * (-I) * ing.bdry[q] * (cum[n] - gt_full) * et;
                        for j in 0..n2 {
                            horizon_dev[[j, n]] += cdev * ing.ex2[q][j];
                        }
                    }
                }
            }
            Ok(ModeOutput {
                term2,
                term4,
                term5,
                horizon_dev,
            })
        })
        .collect();

    let mut hat2 = spectral_field_zeros(grid);
    let mut hat4 = spectral_field_zeros(grid);
    let mut hat5 = spectral_field_zeros(grid);
    let mut hat_dev = spectral_field_zeros(grid);
    {
        let mut v2 = hat2.as3_mut();
        let mut v4 = hat4.as3_mut();
        let mut v5 = hat5.as3_mut();
        let mut vd = hat_dev.as3_mut();
        for (m, res) in mode_results.into_iter().enumerate() {
            let res = res?;
            for j in 0..n2 {
                for n in 0..nt {
                    v2[[m, j, n]] = res.term2[[j, n]];
                    v5[[m, j, n]] = res.term5[[j, n]];
                    vd[[m, j, n]] = res.horizon_dev[[j, n]];
                    if let Some(t4) = &res.term4 {
                        v4[[m, j, n]] = t4[[j, n]];
                    }
                }
            }
        }
    }
    // the contour integral carries its own 1/(2π); the k1 inverse adds the other
    let scale = C64::new(1.0 / TWO_PI, 0.0);
    let term2 = inverse_fourier_x1(&hat2)?.scaled(scale);
    let term4 = inverse_fourier_x1(&hat4)?.scaled(scale);
    let term5 = inverse_fourier_x1(&hat5)?.scaled(scale);
    let dev = inverse_fourier_x1(&hat_dev)?.scaled(scale);

    let term3 = term3.unwrap_or_else(|| halfplane_field_zeros(grid));
    let u = term1.add(&term2).add(&term3).add(&term4).add(&term5);
    u.check_finite("solution formula output")?;
    let mut record = SolutionRecord::from_field(u, spec.gamma)?;
    record
        .diagnostics
        .insert("term_initial_l2".into(), term1.l2_norm());
    record
        .diagnostics
        .insert("term_reflected_initial_l2".into(), term2.l2_norm());
    record
        .diagnostics
        .insert("term_forcing_l2".into(), term3.l2_norm());
    record
        .diagnostics
        .insert("term_reflected_forcing_l2".into(), term4.l2_norm());
    record
        .diagnostics
        .insert("term_boundary_l2".into(), term5.l2_norm());
    record
        .diagnostics
        .insert("contour_nodes".into(), nq as f64);
    if opts.horizon_variant_diagnostic {
        record
            .diagnostics
            .insert("boundary_horizon_variant_dev".into(), dev.max_abs());
    }
    record
        .diagnostics
        .insert("solve_seconds".into(), started.elapsed().as_secs_f64());
    let breakdown = TermBreakdown {
        initial: term1,
        reflected_initial: term2,
        forcing: term3,
        reflected_forcing: term4,
        boundary: term5,
    };
    Ok((record, breakdown))
}

pub fn solve_forced_ibvp(
    spec: &ProblemSpec,
    grid: &Grid,
    data: &DataTriple,
) -> Result<(SolutionRecord, TermBreakdown)> {
    solve_forced_ibvp_opt(spec, grid, data, &SolverOptions::default())
}

/// Reduced problem with zero initial datum and forcing: a single contour term
/// with the full space-time transform of the compactly supported boundary
/// datum. The datum may live on its own uniform time axis (an extension
/// window); it must vanish outside (0, 2) up to the support floor.
pub fn solve_pure_ibvp(
    gamma: f64,
    g: &GridField,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<SolutionRecord> {
    let gv = g.as2();
    let g_t = &g.coords[1];
    let g_max = g.max_abs();
    if g_max > 0.0 {
        let mut outside: f64 = 0.0;
        for (n, &t) in g_t.iter().enumerate() {
            if !(-1e-12..=2.0 + 1e-12).contains(&t) {
                for i in 0..gv.nrows() {
                    outside = outside.max(gv[[i, n]].norm());
                }
            }
        }
        if outside > 1e-8 * g_max {
            return Err(UtmError::SupportViolation(outside / g_max));
        }
    }
    let t_span = g_t[g_t.len() - 1].max(grid.t_max);
    let ing = contour_ingredients(gamma, grid, t_span, opts)?;
    let nq = ing.quad.nodes.len();
    let (n1, n2, nt) = (grid.n1, grid.n2, grid.nt);
    let ghat1 = fourier_x1(g)?;
    let ghat1 = ghat1.as2();
    let g_dt = g_t[1] - g_t[0];
    let g_t0 = g_t[0];
    let k1 = grid.k1_nodes();
    let t_nodes = grid.t_nodes();

    let mode_results: Vec<Result<Array2<C64>>> = (0..n1)
        .into_par_iter()
        .map(|m| {
            let mut acc = Array2::<C64>::zeros((n2, nt));
            let g_row: Vec<C64> = (0..g_t.len()).map(|n| ghat1[[m, n]]).collect();
            for q in 0..nq {
                let k2 = ing.quad.nodes[q];
                let w = ing.quad.weights[q];
                let om = C64::new(k1[m] * k1[m], 0.0) + k2 * k2;
                // ĝ(k1, -k1^2-k2^2) over the datum's own support window
                let ghat_full = filon_integral(&g_row, g_t0, g_dt, om)?;
                let b = -I * ing.bdry[q] * ghat_full;
                for (n, &t) in t_nodes.iter().enumerate() {
                    let c = w * b * (-I * om * t).exp();
                    for j in 0..n2 {
                        acc[[j, n]] += c * ing.ex2[q][j];
                    }
                }
            }
            Ok(acc)
        })
        .collect();

    let mut hat = spectral_field_zeros(grid);
    {
        let mut v = hat.as3_mut();
        for (m, res) in mode_results.into_iter().enumerate() {
            let res = res?;
            for j in 0..n2 {
                for n in 0..nt {
                    v[[m, j, n]] = res[[j, n]];
                }
            }
        }
    }
    let u = inverse_fourier_x1(&hat)?.scaled(C64::new(1.0 / TWO_PI, 0.0));
    u.check_finite("reduced-problem output")?;
    SolutionRecord::from_field(u, gamma)
}

/// Whole-plane initial value problem: two-axis transform, phase evolution,
/// and a cumulative Duhamel pass for the forcing. Fields live on the doubled
/// x2 grid; traces are taken at x2 = 0 with the spectral derivative.
pub fn solve_ivp(
    u0_whole: &Array2<C64>,
    forcing: Option<&Vec<Array2<C64>>>,
    grid: &Grid,
) -> Result<SolutionRecord> {
    let m2n = grid.n2_whole();
    let dt = grid.dt();
    let k1 = grid.k1_nodes();
    let k2 = grid.k2_whole_nodes();
    let u0hat = fourier_plane(u0_whole, grid.l1, 2.0 * grid.l2);
    let fhat: Option<Vec<Array2<C64>>> = forcing.map(|sheets| {
        sheets
            .iter()
            .map(|s| fourier_plane(s, grid.l1, 2.0 * grid.l2))
            .collect()
    });
    let results: Vec<Result<Vec<C64>>> = (0..grid.n1 * m2n)
        .into_par_iter()
        .map(|flat| {
            let m1 = flat / m2n;
            let m2 = flat % m2n;
            let om = C64::new(k1[m1] * k1[m1] + k2[m2] * k2[m2], 0.0);
            let duhamel: Option<Vec<C64>> = match &fhat {
                Some(sheets) => {
                    let series: Vec<C64> = (0..grid.nt).map(|n| sheets[n][[m1, m2]]).collect();
                    Some(filon_cumulative(&series, 0.0, dt, om)?)
                }
                None => None,
            };
            Ok((0..grid.nt)
                .map(|n| {
                    let t = n as f64 * dt;
                    let phase = (-I * om * t).exp();
                    let mut v = phase * u0hat[[m1, m2]];
                    if let Some(cum) = &duhamel {
                        v -= I * phase * cum[n];
                    }
                    v
                })
                .collect())
        })
        .collect();
    let mut spectral: Vec<Array2<C64>> = vec![Array2::zeros((grid.n1, m2n)); grid.nt];
    for (flat, res) in results.into_iter().enumerate() {
        let res = res?;
        let m1 = flat / m2n;
        let m2 = flat % m2n;
        for n in 0..grid.nt {
            spectral[n][[m1, m2]] = res[n];
        }
    }
    let mut u = GridField::zeros(
        vec![AxisTag::X1, AxisTag::X2, AxisTag::T],
        vec![grid.x1_nodes(), grid.x2_whole_nodes(), grid.t_nodes()],
    );
    let boundary = grid.n2 - 1;
    let mut dir = GridField::zeros(
        vec![AxisTag::X1, AxisTag::T],
        vec![grid.x1_nodes(), grid.t_nodes()],
    );
    let mut rob = dir.clone();
    {
        let mut v = u.as3_mut();
        let mut dv = dir.as2_mut();
        let mut rv = rob.as2_mut();
        for (n, sheet) in spectral.iter().enumerate() {
            let phys = inverse_fourier_plane(sheet, grid.l1, 2.0 * grid.l2);
            let robin = robin_trace_spectral_snapshot(&phys, grid, 0.0);
            for i in 0..grid.n1 {
                for j in 0..m2n {
                    v[[i, j, n]] = phys[[i, j]];
                }
                dv[[i, n]] = phys[[i, boundary]];
                rv[[i, n]] = robin[i];
            }
        }
    }
    u.check_finite("whole-plane evolution output")?;
    Ok(SolutionRecord {
        u,
        dirichlet_trace: dir,
        robin_trace: rob,
        diagnostics: BTreeMap::new(),
    })
}

/// Robin trace of a whole-plane record with the gamma weight applied (the
/// record itself stores the gamma = 0 spectral trace).
pub fn whole_plane_robin_trace(sol: &SolutionRecord, gamma: f64) -> GridField {
    let mut out = sol.robin_trace.clone();
    let d = sol.dirichlet_trace.as2();
    let mut o = out.as2_mut();
    for ((i, n), v) in o.indexed_iter_mut() {
        *v += gamma * d[[i, n]];
    }
    drop(o);
    out
}

/// Max modulus over samples and time nodes of the defect of the identity
/// coupling the evolving half-plane transform of the solution to the data
/// transforms, normalized by the largest participating magnitude.
pub fn global_relation_residual(
    sol: &SolutionRecord,
    spec: &ProblemSpec,
    grid: &Grid,
    data: &DataTriple,
    k_samples: &[(f64, C64)],
) -> Result<f64> {
    for &(_, k2) in k_samples {
        if k2.im > 1e-14 {
            return Err(UtmError::UpperHalfK2(k2));
        }
    }
    let dt = grid.dt();
    let uview = sol.u.as3();
    let (n1, n2, nt) = (grid.n1, grid.n2, grid.nt);
    let h2 = grid.dx2();
    // x1-spectral slices of the solution, data, traces
    let u0hat1 = fourier_x1(&data.u0)?;
    let u0hat1 = u0hat1.as2();
    let ghat1 = fourier_x1(&data.g)?;
    let ghat1 = ghat1.as2();
    let g0hat1 = fourier_x1(&sol.dirichlet_trace)?;
    let g0hat1 = g0hat1.as2();
    let fhat1 = match &data.f {
        Some(f) => Some(fourier_x1(f)?),
        None => None,
    };
    let k1_nodes = grid.k1_nodes();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut uhat1 = vec![C64::new(0.0, 0.0); n2 * nt];
    for &(k1, k2) in k_samples {
        let m = k1_nodes
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - k1).abs().partial_cmp(&(b.1 - k1).abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let om = C64::new(k1_nodes[m] * k1_nodes[m], 0.0) + k2 * k2;
        let w2 = filon_weights(n2, 0.0, h2, -k2)?;
        // û(k1, k2, t_n): single-mode x1 transform of the solution slice,
        // then the Filon x2 transform
        let dx1 = grid.dx1();
        let x1 = grid.x1_nodes();
        for j in 0..n2 {
            for n in 0..nt {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..n1 {
                    acc += uview[[i, j, n]] * (-I * k1_nodes[m] * x1[i]).exp() * dx1;
                }
                uhat1[j * nt + n] = acc;
            }
        }
        let u0_refl: C64 = (0..n2).map(|j| w2[j] * u0hat1[[m, j]]).sum();
        let g_row: Vec<C64> = (0..nt).map(|n| ghat1[[m, n]]).collect();
        let g0_row: Vec<C64> = (0..nt).map(|n| g0hat1[[m, n]]).collect();
        let gt = filon_cumulative(&g_row, 0.0, dt, om)?;
        let g0t = filon_cumulative(&g0_row, 0.0, dt, om)?;
        let ft: Option<Vec<C64>> = match &fhat1 {
            Some(fh) => {
                let fv = fh.as3();
                let series: Vec<C64> = (0..nt)
                    .map(|n| (0..n2).map(|j| w2[j] * fv[[m, j, n]]).sum())
                    .collect();
                Some(filon_cumulative(&series, 0.0, dt, om)?)
            }
            None => None,
        };
        for (n, &t) in grid.t_nodes().iter().enumerate() {
            let mut uhat = C64::new(0.0, 0.0);
            for j in 0..n2 {
                uhat += w2[j] * uhat1[j * nt + n];
            }
            let lhs = (I * om * t).exp() * uhat;
            let mut rhs = u0_refl + (k2 + I * spec.gamma) * g0t[n] - I * gt[n];
            if let Some(f) = &ft {
                rhs -= I * f[n];
            }
            worst = worst.max((lhs - rhs).norm());
            scale = scale
                .max(lhs.norm())
                .max(u0_refl.norm())
                .max(((k2 + I * spec.gamma) * g0t[n]).norm())
                .max(gt[n].norm());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Both sides of the linear superposition decomposition: the one-shot solve
/// against (whole-plane initial part) + (whole-plane forced part) + two
/// boundary-datum-only solves with the compensating traces. Returns the max
/// pointwise discrepancy over the grid, normalized by max |u|.
pub fn superposition_residual(
    spec: &ProblemSpec,
    grid: &Grid,
    data: &DataTriple,
) -> Result<f64> {
    use crate::transforms::even_extend_x2;
    let opts = SolverOptions::default();
    let (lhs, _) = solve_forced_ibvp_opt(spec, grid, data, &opts)?;
    // whole-plane initial part with the even extension of u0
    let u0w = even_extend_x2(&data.u0, grid);
    let part_initial = solve_ivp(&u0w, None, grid)?;
    // whole-plane forced part with the per-slice even extension of f
    let part_forced = match &data.f {
        Some(f) => {
            let v = f.as3();
            let sheets: Vec<Array2<C64>> = (0..grid.nt)
                .map(|n| {
                    let mut slice = GridField::zeros(
                        vec![AxisTag::X1, AxisTag::X2],
                        vec![grid.x1_nodes(), grid.x2_nodes()],
                    );
                    {
                        let mut s = slice.as2_mut();
                        for i in 0..grid.n1 {
                            for j in 0..grid.n2 {
                                s[[i, j]] = v[[i, j, n]];
                            }
                        }
                    }
                    even_extend_x2(&slice, grid)
                })
                .collect();
            let zero = Array2::zeros((grid.n1, grid.n2_whole()));
            Some(solve_ivp(&zero, Some(&sheets), grid)?)
        }
        None => None,
    };
    // compensating boundary data
    let tr_initial = whole_plane_robin_trace(&part_initial, spec.gamma);
    let psi1 = data.g.sub(&tr_initial);
    let psi2 = part_forced
        .as_ref()
        .map(|p| whole_plane_robin_trace(p, spec.gamma).scaled(C64::new(-1.0, 0.0)));
    psi1.check_finite("compensating boundary datum")?;
    let sol_psi1 = solve_pure_ibvp(spec.gamma, &psi1, grid, &opts)?;
    let sol_psi2 = match &psi2 {
        Some(p) => Some(solve_pure_ibvp(spec.gamma, p, grid, &opts)?),
        None => None,
    };
    // assemble the right-hand side on the half-plane grid
    let mut rhs = halfplane_field_zeros(grid);
    {
        let mut r = rhs.as3_mut();
        let pi = part_initial.u.as3();
        let pf = part_forced.as_ref().map(|p| p.u.as3());
        let p1 = sol_psi1.u.as3();
        let p2 = sol_psi2.as_ref().map(|p| p.u.as3());
        let m2n = grid.n2_whole();
        for i in 0..grid.n1 {
            for j in 0..grid.n2 {
                let jw = (grid.n2 - 1 + j) % m2n;
                for n in 0..grid.nt {
                    let mut v = pi[[i, jw, n]] + p1[[i, j, n]];
                    if let Some(pf) = &pf {
                        v += pf[[i, jw, n]];
                    }
                    if let Some(p2) = &p2 {
                        v += p2[[i, j, n]];
                    }
                    r[[i, j, n]] = v;
                }
            }
        }
    }
    let diff = lhs.u.sub(&rhs);
    let denom = lhs.u.max_abs().max(f64::MIN_POSITIVE);
    Ok(diff.max_abs() / denom)
}
