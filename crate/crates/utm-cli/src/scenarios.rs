//! The seven run pipelines. Each builds its inputs first (so config errors
//! never leave partial output), solves, writes artifacts through the store,
//! and reports a pass flag plus a numeric summary that lands in the manifest.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use utm_core::grid::{AxisTag, Grid, GridField, ProblemSpec};
use utm_core::linear_solver::{
    global_relation_residual, solve_forced_ibvp, solve_pure_ibvp, superposition_residual,
    SolverOptions,
};
use utm_core::nonlinear::{solve_nls_picard, sup_t_hs_norm};
use utm_core::oracles::{crank_nicolson_halfplane, OracleConfig};
use utm_core::spaces::{
    bourgain_norm, bts_norm, sobolev_norm_halfplane, ExtensionMode, HalfplaneExtension,
    NormReport,
};

use crate::artifacts::{csv_table, ArtifactStore, Manifest};
use crate::config::{RunConfig, Scenario};
use crate::profiles;
use crate::CliError;

fn solver_err(e: utm_core::UtmError) -> CliError {
    CliError::Solver(e.to_string())
}

fn time_slice(u: &GridField, n: usize) -> GridField {
    let v = u.as3();
    let (n1, n2, _) = v.dim();
    let mut slice = GridField::zeros(
        vec![u.axes[0], u.axes[1]],
        vec![u.coords[0].clone(), u.coords[1].clone()],
    );
    let mut sv = slice.as2_mut();
    for i in 0..n1 {
        for j in 0..n2 {
            sv[[i, j]] = v[[i, j, n]];
        }
    }
    slice
}

fn echo_config(store: &mut ArtifactStore, config: &RunConfig) -> Result<(), CliError> {
    // the output location is where the echo lives, not part of the run
    // parameters; pinning it keeps manifests identical across directories
    let mut echo = config.clone();
    echo.output = std::path::PathBuf::from(".");
    let text = toml::to_string_pretty(&echo)
        .map_err(|e| CliError::Solver(format!("echoing config: {e}")))?;
    store.write_string("config.echo.toml", &text)
}

fn plot_script(title: &str, lines: &[(&str, &str)]) -> String {
    let mut out = String::new();
    out.push_str("set datafile separator ','\n");
    out.push_str(&format!("set title '{title}'\n"));
    out.push_str("set key outside\n");
    let plots: Vec<String> = lines
        .iter()
        .map(|(file, spec)| format!("'{file}' {spec}"))
        .collect();
    out.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    out.push_str("pause -1\n");
    out
}

pub fn run_scenario(config: &RunConfig) -> Result<Manifest, CliError> {
    let spec = config.spec()?;
    let grid = config.build_grid()?;
    match config.scenario {
        Scenario::LinearManufactured => linear_manufactured(config, &spec, &grid),
        Scenario::PureIbvp => pure_ibvp(config, &spec, &grid),
        Scenario::NlsPicard => nls_picard(config, &spec, &grid),
        Scenario::EstimateEnsemble => estimate_ensemble(config, &spec, &grid),
        Scenario::GlobalRelationAudit => global_relation_audit(config, &spec, &grid),
        Scenario::SuperpositionAudit => superposition_audit(config, &spec, &grid),
        Scenario::OracleCrosscheck => oracle_crosscheck(config, &spec, &grid),
    }
}

fn data_norm_reports(
    config: &RunConfig,
    spec: &ProblemSpec,
    data: &utm_core::grid::DataTriple,
) -> Vec<NormReport> {
    let mut reports = Vec::new();
    if let Ok(v) = sobolev_norm_halfplane(&data.u0, spec.s, HalfplaneExtension::EvenReflection) {
        reports.push(NormReport {
            kind: "sobolev_halfplane".into(),
            exponents: vec![spec.s],
            value: v,
            policy: "even_reflection".into(),
            excluded_mass: 0.0,
        });
    }
    if config.problem.t_horizon < 1.0 {
        if let Ok(v) = bts_norm(&data.g, spec.s, ExtensionMode::ZeroExtension, false) {
            reports.push(NormReport {
                kind: "bts".into(),
                exponents: vec![spec.s],
                value: v,
                policy: "zero_extension".into(),
                excluded_mass: 0.0,
            });
        }
    }
    reports
}

fn linear_manufactured(
    config: &RunConfig,
    spec: &ProblemSpec,
    grid: &Grid,
) -> Result<Manifest, CliError> {
    let data = profiles::data_triple(&config.data, grid, spec.gamma)?;
    let mut store = ArtifactStore::create(&config.output)?;
    echo_config(&mut store, config)?;
    let (sol, terms) = solve_forced_ibvp(spec, grid, &data).map_err(solver_err)?;
    let exact = if config.data.profile == "gaussian" {
        profiles::pulse(&config.data).halfplane_history(grid)
    } else {
        GridField::zeros(
            vec![AxisTag::X1, AxisTag::X2, AxisTag::T],
            vec![grid.x1_nodes(), grid.x2_nodes(), grid.t_nodes()],
        )
    };
    let exact_l2 = exact.l2_norm();
    let rel_l2 = if exact_l2 > 0.0 {
        sol.u.sub(&exact).l2_norm() / exact_l2
    } else {
        sol.u.l2_norm()
    };
    let exact_max = exact.max_abs();
    let rel_max = if exact_max > 0.0 {
        sol.u.sub(&exact).max_abs() / exact_max
    } else {
        sol.u.max_abs()
    };
    // per-time-node error curve
    let mut rows = Vec::new();
    for (n, &t) in grid.t_nodes().iter().enumerate() {
        let s_num = time_slice(&sol.u, n);
        let s_ex = time_slice(&exact, n);
        let denom = s_ex.l2_norm();
        let abs = s_num.sub(&s_ex).l2_norm();
        let rel = if denom > 0.0 { abs / denom } else { abs };
        rows.push(vec![format!("{t}"), format!("{abs:e}"), format!("{rel:e}")]);
    }
    store.write_string("error_vs_t.csv", &csv_table("t,abs_l2,rel_l2", &rows))?;
    store.write_solution("solution", &sol)?;
    store.write_field_csv("final_slice.csv", &time_slice(&sol.u, grid.nt - 1))?;
    store.write_json("norms.json", &data_norm_reports(config, spec, &data))?;
    store.write_string(
        "plot.gp",
        &plot_script(
            "boundary trace and error history",
            &[
                ("error_vs_t.csv", "using 1:3 with linespoints title 'relative L2 error'"),
            ],
        ),
    )?;
    let mut summary = BTreeMap::new();
    summary.insert("rel_l2".into(), rel_l2);
    summary.insert("rel_max".into(), rel_max);
    summary.insert("term_initial_l2".into(), terms.initial.l2_norm());
    summary.insert(
        "term_reflected_initial_l2".into(),
        terms.reflected_initial.l2_norm(),
    );
    summary.insert("term_boundary_l2".into(), terms.boundary.l2_norm());
    if let Some(&n) = sol.diagnostics.get("contour_nodes") {
        summary.insert("contour_nodes".into(), n);
    }
    store.finish(config.scenario.name(), config.seed, true, summary)
}

fn pure_ibvp(config: &RunConfig, spec: &ProblemSpec, grid: &Grid) -> Result<Manifest, CliError> {
    let g = profiles::boundary_bump(&config.data, grid)?;
    let mut store = ArtifactStore::create(&config.output)?;
    echo_config(&mut store, config)?;
    let sol = solve_pure_ibvp(spec.gamma, &g, grid, &SolverOptions::default()).map_err(solver_err)?;
    store.write_field_csv("boundary_datum.csv", &g)?;
    store.write_solution("solution", &sol)?;
    let mut reports = Vec::new();
    let mut rhs = 0.0;
    for &(sigma, b) in &[(0.0, (2.0 * spec.s - 1.0) / 4.0), (spec.s, -0.25)] {
        for &homogeneous in &[false, true] {
            if let Ok(v) = bourgain_norm(&g, sigma, b, homogeneous) {
                if !homogeneous {
                    rhs += v.value;
                }
                reports.push(NormReport {
                    kind: if homogeneous {
                        "bourgain_homogeneous".into()
                    } else {
                        "bourgain".into()
                    },
                    exponents: vec![sigma, b],
                    value: v.value,
                    policy: "native_axis".into(),
                    excluded_mass: v.excluded_mass,
                });
            }
        }
    }
    store.write_json("norms.json", &reports)?;
    store.write_string(
        "plot.gp",
        &plot_script(
            "dirichlet trace of the boundary-driven solution",
            &[("solution_dirichlet_trace.csv", "using 2:3 with lines title 're u(x1=min,0,t)'")],
        ),
    )?;
    let lhs = sup_t_hs_norm(&sol.u, spec.s).map_err(solver_err)?;
    let mut summary = BTreeMap::new();
    summary.insert("sup_t_hs".into(), lhs);
    summary.insert("datum_norm".into(), rhs);
    if rhs > 0.0 {
        summary.insert("estimate_ratio".into(), lhs / rhs);
    }
    store.finish(config.scenario.name(), config.seed, true, summary)
}

fn nls_picard(config: &RunConfig, spec: &ProblemSpec, grid: &Grid) -> Result<Manifest, CliError> {
    let data = profiles::data_triple(&config.data, grid, spec.gamma)?;
    let mut store = ArtifactStore::create(&config.output)?;
    echo_config(&mut store, config)?;
    let (sol, hist) = solve_nls_picard(spec, grid, &data, 1e-10, 25).map_err(solver_err)?;
    store.write_solution("solution", &sol)?;
    store.write_json("history.json", &hist)?;
    store.write_json("norms.json", &data_norm_reports(config, spec, &data))?;
    store.write_string(
        "plot.gp",
        &plot_script(
            "picard iterate norms",
            &[("history.csv", "using 1:2 with linespoints title 'iterate norm'")],
        ),
    )?;
    let rows: Vec<Vec<String>> = hist
        .iterate_norms
        .iter()
        .enumerate()
        .map(|(i, v)| vec![format!("{i}"), format!("{v:e}")])
        .collect();
    store.write_string("history.csv", &csv_table("iteration,sup_t_hs", &rows))?;
    let mut summary = BTreeMap::new();
    summary.insert("iterations".into(), hist.iterate_norms.len() as f64);
    summary.insert("t_star".into(), hist.t_star);
    summary.insert("converged".into(), if hist.converged { 1.0 } else { 0.0 });
    for key in ["boundary_residual_max", "splitstep_rel_l2"] {
        if let Some(&v) = sol.diagnostics.get(key) {
            summary.insert(key.into(), v);
        }
    }
    store.finish(config.scenario.name(), config.seed, hist.converged, summary)
}

/// Random trigonometric sum in x1 and t under a Gaussian x1 window.
fn random_boundary_field(
    rng: &mut ChaCha8Rng,
    x1: &[f64],
    t_axis: &[f64],
    band: usize,
    omega_step: f64,
    support: Option<(f64, f64)>,
) -> GridField {
    let n = 2 * band + 1;
    let coeff: Vec<C64> = (0..n * n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut g = GridField::zeros(
        vec![AxisTag::X1, AxisTag::T],
        vec![x1.to_vec(), t_axis.to_vec()],
    );
    let mut gv = g.as2_mut();
    for (i, &x) in x1.iter().enumerate() {
        let wx = (-(x * x) / 9.0).exp();
        for (j, &t) in t_axis.iter().enumerate() {
            let wt = match support {
                Some((a, b)) => profiles::support_bump(t, a, b),
                None => 1.0,
            };
            if wx * wt == 0.0 {
                continue;
            }
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..n {
                let km = (m as f64 - band as f64) * 0.314;
                for p in 0..n {
                    let om = (p as f64 - band as f64) * omega_step;
                    acc += coeff[m * n + p] * (C64::new(0.0, km * x + om * t)).exp();
                }
            }
            gv[[i, j]] = acc * wx * wt / (n * n) as f64;
        }
    }
    g
}

/// Random trigonometric sum in x1 and x2 under Gaussian windows on both axes.
fn random_interior_field(rng: &mut ChaCha8Rng, grid: &Grid, band: usize) -> GridField {
    let n = 2 * band + 1;
    let coeff: Vec<C64> = (0..n * n)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let x1 = grid.x1_nodes();
    let x2 = grid.x2_nodes();
    let mut u = GridField::zeros(vec![AxisTag::X1, AxisTag::X2], vec![x1.clone(), x2.clone()]);
    let mut uv = u.as2_mut();
    for (i, &x) in x1.iter().enumerate() {
        let wx = (-(x * x) / 9.0).exp();
        for (j, &y) in x2.iter().enumerate() {
            let wy = (-(y - 10.0) * (y - 10.0) / 9.0).exp();
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..n {
                let km = (m as f64 - band as f64) * 0.314;
                for p in 0..n {
                    let kp = (p as f64 - band as f64) * 0.314;
                    acc += coeff[m * n + p] * (C64::new(0.0, km * x + kp * y)).exp();
                }
            }
            uv[[i, j]] = acc * wx * wy / (n * n) as f64;
        }
    }
    u
}

fn estimate_ensemble(
    config: &RunConfig,
    spec: &ProblemSpec,
    grid: &Grid,
) -> Result<Manifest, CliError> {
    let estimate = config.ensemble.estimate.clone();
    let mut store = ArtifactStore::create(&config.output)?;
    echo_config(&mut store, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    let s = spec.s;
    for &band in &config.ensemble.bandwidths {
        let mut level_max: f64 = 0.0;
        for draw in 0..config.ensemble.draws {
            let ratio = match estimate.as_str() {
                "forced" => {
                    let mut run_spec = spec.clone();
                    run_spec.decay_floor = 1e-3;
                    let u0 = random_interior_field(&mut rng, grid, band);
                    let g = random_boundary_field(
                        &mut rng,
                        &grid.x1_nodes(),
                        &grid.t_nodes(),
                        band,
                        2.0,
                        None,
                    );
                    let fslice = random_interior_field(&mut rng, grid, band);
                    let mut f = GridField::zeros(
                        vec![AxisTag::X1, AxisTag::X2, AxisTag::T],
                        vec![grid.x1_nodes(), grid.x2_nodes(), grid.t_nodes()],
                    );
                    {
                        let fsv = fslice.as2();
                        let mut fv = f.as3_mut();
                        for i in 0..grid.n1 {
                            for j in 0..grid.n2 {
                                for nn in 0..grid.nt {
                                    let t = nn as f64 * grid.dt();
                                    fv[[i, j, nn]] =
                                        fsv[[i, j]] * (1.0 - t) * C64::new(0.0, 2.0 * t).exp();
                                }
                            }
                        }
                    }
                    let data = utm_core::grid::DataTriple {
                        u0: u0.clone(),
                        g: g.clone(),
                        f: Some(f.clone()),
                    };
                    let (sol, _) = solve_forced_ibvp(&run_spec, grid, &data).map_err(solver_err)?;
                    let lhs = sup_t_hs_norm(&sol.u, s).map_err(solver_err)?;
                    let rhs = sobolev_norm_halfplane(&u0, s, HalfplaneExtension::EvenReflection)
                        .map_err(solver_err)?
                        + bts_norm(&g, s, ExtensionMode::ZeroExtension, false).map_err(solver_err)?
                        + grid.t_max.sqrt() * sup_t_hs_norm(&f, s).map_err(solver_err)?;
                    lhs / rhs
                }
                _ => {
                    let (gamma, homogeneous) = if estimate == "neumann" {
                        (0.0, true)
                    } else {
                        (spec.gamma, false)
                    };
                    let n_axis = 129;
                    let t_axis: Vec<f64> = (0..n_axis)
                        .map(|j| -1.0 + 4.0 * j as f64 / (n_axis - 1) as f64)
                        .collect();
                    let g = random_boundary_field(
                        &mut rng,
                        &grid.x1_nodes(),
                        &t_axis,
                        band,
                        1.5,
                        Some((0.0, 2.0)),
                    );
                    let v = solve_pure_ibvp(gamma, &g, grid, &SolverOptions::default())
                        .map_err(solver_err)?;
                    let lhs = sup_t_hs_norm(&v.u, s).map_err(solver_err)?;
                    let rhs = bourgain_norm(&g, 0.0, (2.0 * s - 1.0) / 4.0, homogeneous)
                        .map_err(solver_err)?
                        .value
                        + bourgain_norm(&g, s, -0.25, homogeneous).map_err(solver_err)?.value;
                    lhs / rhs
                }
            };
            level_max = level_max.max(ratio);
            rows.push(vec![
                estimate.clone(),
                format!("{band}"),
                format!("{draw}"),
                format!("{ratio:e}"),
            ]);
        }
        maxima.push(level_max);
    }
    store.write_string("ratios.csv", &csv_table("estimate,bandwidth,draw,ratio", &rows))?;
    let max_rows: Vec<Vec<String>> = config
        .ensemble
        .bandwidths
        .iter()
        .zip(&maxima)
        .map(|(b, m)| vec![format!("{b}"), format!("{m:e}")])
        .collect();
    store.write_string("maxima.csv", &csv_table("bandwidth,ratio_max", &max_rows))?;
    store.write_string(
        "plot.gp",
        &plot_script(
            "estimate ratio maxima vs bandwidth",
            &[("maxima.csv", "using 1:2 with linespoints title 'max ratio'")],
        ),
    )?;
    // monotone growth beyond the limit across the sweep fails the audit
    let monotone = maxima.windows(2).all(|w| w[1] > w[0]);
    let grew = maxima.last().unwrap_or(&0.0) > &(config.ensemble.growth_limit * maxima[0]);
    let pass = maxima.iter().all(|m| m.is_finite()) && !(monotone && grew);
    let mut summary = BTreeMap::new();
    for (i, m) in maxima.iter().enumerate() {
        summary.insert(format!("ratio_max_level_{i}"), *m);
    }
    store.finish(config.scenario.name(), config.seed, pass, summary)
}

fn global_relation_audit(
    config: &RunConfig,
    spec: &ProblemSpec,
    grid: &Grid,
) -> Result<Manifest, CliError> {
    let data = profiles::data_triple(&config.data, grid, spec.gamma)?;
    let mut store = ArtifactStore::create(&config.output)?;
    echo_config(&mut store, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let samples: Vec<(f64, C64)> = (0..config.audit.samples)
        .map(|_| {
            let k1 = rng.gen_range(-3.0..3.0);
            let k2 = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-0.5..0.0));
            (k1, k2)
        })
        .collect();
    let (sol, _) = solve_forced_ibvp(spec, grid, &data).map_err(solver_err)?;
    let res = global_relation_residual(&sol, spec, grid, &data, &samples).map_err(solver_err)?;
    let mut rows = vec![vec![
        format!("{}", grid.n1),
        format!("{}", grid.n2),
        format!("{}", grid.nt),
        format!("{res:e}"),
    ]];
    let mut summary = BTreeMap::new();
    summary.insert("residual".into(), res);
    let mut pass = res <= config.audit.tolerance;
    if config.audit.refine {
        let fine = grid.refined();
        let dataf = profiles::data_triple(&config.data, &fine, spec.gamma)?;
        let (solf, _) = solve_forced_ibvp(spec, &fine, &dataf).map_err(solver_err)?;
        let resf =
            global_relation_residual(&solf, spec, &fine, &dataf, &samples).map_err(solver_err)?;
        rows.push(vec![
            format!("{}", fine.n1),
            format!("{}", fine.n2),
            format!("{}", fine.nt),
            format!("{resf:e}"),
        ]);
        summary.insert("residual_refined".into(), resf);
        pass = pass && resf <= res;
    }
    store.write_string("residual.csv", &csv_table("n1,n2,nt,residual", &rows))?;
    store.write_string(
        "plot.gp",
        &plot_script(
            "global relation residual vs resolution",
            &[("residual.csv", "using 1:4 with linespoints title 'residual'")],
        ),
    )?;
    store.finish(config.scenario.name(), config.seed, pass, summary)
}

fn superposition_audit(
    config: &RunConfig,
    spec: &ProblemSpec,
    grid: &Grid,
) -> Result<Manifest, CliError> {
    let data = profiles::data_triple(&config.data, grid, spec.gamma)?;
    let mut store = ArtifactStore::create(&config.output)?;
    echo_config(&mut store, config)?;
    let res = superposition_residual(spec, grid, &data).map_err(solver_err)?;
    let mut rows = vec![vec![format!("{}", grid.n1), format!("{res:e}")]];
    let mut summary = BTreeMap::new();
    summary.insert("discrepancy".into(), res);
    let mut pass = res <= config.audit.tolerance;
    if config.audit.refine {
        let fine = grid.refined();
        let dataf = profiles::data_triple(&config.data, &fine, spec.gamma)?;
        let resf = superposition_residual(spec, &fine, &dataf).map_err(solver_err)?;
        rows.push(vec![format!("{}", fine.n1), format!("{resf:e}")]);
        summary.insert("discrepancy_refined".into(), resf);
        pass = pass && resf <= res;
    }
    store.write_string("discrepancy.csv", &csv_table("n1,discrepancy", &rows))?;
    store.finish(config.scenario.name(), config.seed, pass, summary)
}

fn oracle_crosscheck(
    config: &RunConfig,
    spec: &ProblemSpec,
    grid: &Grid,
) -> Result<Manifest, CliError> {
    let data = profiles::data_triple(&config.data, grid, spec.gamma)?;
    let mut store = ArtifactStore::create(&config.output)?;
    echo_config(&mut store, config)?;
    let (sol, _) = solve_forced_ibvp(spec, grid, &data).map_err(solver_err)?;
    let cn = crank_nicolson_halfplane(spec, grid, &data, &OracleConfig::default())
        .map_err(solver_err)?;
    let rel = |a: &GridField, b: &GridField| {
        let denom = b.l2_norm();
        if denom > 0.0 {
            a.sub(b).l2_norm() / denom
        } else {
            a.l2_norm()
        }
    };
    let utm_vs_cn = rel(&sol.u, &cn.u);
    let mut summary = BTreeMap::new();
    summary.insert("utm_vs_cn_rel_l2".into(), utm_vs_cn);
    let mut pass = utm_vs_cn <= 1e-2;
    if config.data.profile == "gaussian" {
        let exact = profiles::pulse(&config.data).halfplane_history(grid);
        let utm_err = rel(&sol.u, &exact);
        let cn_err = rel(&cn.u, &exact);
        summary.insert("utm_vs_exact_rel_l2".into(), utm_err);
        summary.insert("cn_vs_exact_rel_l2".into(), cn_err);
        // the finite-difference oracle's own discretization error bounds how
        // closely the two solvers can be expected to agree
        pass = utm_vs_cn <= (3.0 * cn_err).max(1e-2);
    }
    store.write_json("crosscheck.json", &summary)?;
    store.write_solution("solution", &sol)?;
    store.write_field_csv("oracle_final_slice.csv", &time_slice(&cn.u, grid.nt - 1))?;
    store.finish(config.scenario.name(), config.seed, pass, summary)
}
