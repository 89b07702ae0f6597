//! Built-in acceptance sweep at desk scale: every scenario once, with fixed
//! configurations, thresholds applied, and a top-level manifest whose hash
//! certifies the whole sweep.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{
    AuditSection, DataSection, EnsembleSection, GridSection, ProblemSection, RunConfig, Scenario,
};
use crate::scenarios::run_scenario;
use crate::CliError;

fn base_config(scenario: Scenario, out: &Path, seed: u64) -> RunConfig {
    RunConfig {
        scenario,
        output: out.join(scenario.name()),
        seed,
        problem: ProblemSection {
            gamma: -1.0,
            alpha: 3,
            sign: "defocusing".into(),
            s: 1.2,
            t_horizon: 0.5,
        },
        grid: GridSection {
            n1: 64,
            n2: 65,
            nt: 33,
            l1: 20.0,
            l2: 20.0,
            t_max: None,
        },
        data: DataSection {
            profile: "gaussian".into(),
            amplitude: 1.0,
            center: [0.0, 6.5],
            width: 0.5,
            velocity: [0.0, -2.0],
            forcing_amplitude: 0.0,
        },
        audit: AuditSection::default(),
        ensemble: EnsembleSection::default(),
    }
}

fn configs(out: &Path, seed: u64) -> Vec<RunConfig> {
    let mut list = Vec::new();

    list.push(base_config(Scenario::LinearManufactured, out, seed));

    let mut pure = base_config(Scenario::PureIbvp, out, seed);
    pure.problem.t_horizon = 2.0;
    pure.grid = GridSection {
        n1: 32,
        n2: 33,
        nt: 9,
        l1: 20.0,
        l2: 20.0,
        t_max: Some(2.0),
    };
    pure.data.profile = "boundary_bump".into();
    pure.data.width = 3.0;
    list.push(pure);

    let mut nls = base_config(Scenario::NlsPicard, out, seed);
    nls.problem.t_horizon = 0.25;
    nls.grid = GridSection {
        n1: 32,
        n2: 65,
        nt: 9,
        l1: 20.0,
        l2: 20.0,
        t_max: None,
    };
    nls.data.amplitude = 1e-2;
    nls.data.velocity = [0.0, 0.0];
    list.push(nls);

    let mut ens = base_config(Scenario::EstimateEnsemble, out, seed);
    ens.problem.t_horizon = 0.25;
    ens.grid = GridSection {
        n1: 32,
        n2: 33,
        nt: 9,
        l1: 20.0,
        l2: 20.0,
        t_max: None,
    };
    ens.ensemble.draws = 12;
    list.push(ens);

    list.push(base_config(Scenario::GlobalRelationAudit, out, seed));

    let mut sup = base_config(Scenario::SuperpositionAudit, out, seed);
    sup.data.forcing_amplitude = 0.3;
    sup.audit.tolerance = 1e-2;
    list.push(sup);

    list.push(base_config(Scenario::OracleCrosscheck, out, seed));
    list
}

/// Extra thresholds beyond each scenario's own pass flag.
fn meets_thresholds(scenario: Scenario, summary: &BTreeMap<String, f64>) -> bool {
    match scenario {
        Scenario::LinearManufactured => summary.get("rel_l2").is_some_and(|&v| v <= 1e-3),
        Scenario::NlsPicard => {
            summary.get("converged") == Some(&1.0)
                && summary.get("splitstep_rel_l2").is_some_and(|&v| v <= 1e-2)
        }
        _ => true,
    }
}

#[derive(Debug, Serialize)]
struct ScenarioOutcome {
    name: String,
    pass: bool,
    manifest_sha256: String,
}

#[derive(Debug, Serialize)]
struct SelftestManifest {
    seed: u64,
    pass: bool,
    scenarios: Vec<ScenarioOutcome>,
}

pub fn run_selftest(out: &Path, seed: u64) -> Result<bool, CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create output directory: {e}")))?;
    let mut outcomes = Vec::new();
    let mut all_pass = true;
    for config in configs(out, seed) {
        let scenario = config.scenario;
        let manifest = run_scenario(&config)?;
        let pass = manifest.pass && meets_thresholds(scenario, &manifest.summary);
        all_pass &= pass;
        let bytes = std::fs::read(config.output.join("manifest.json"))
            .map_err(|e| CliError::Solver(format!("rereading manifest: {e}")))?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let hash = format!("{:x}", hasher.finalize());
        println!(
            "selftest {:<24} {}  manifest {}",
            scenario.name(),
            if pass { "PASS" } else { "FAIL" },
            &hash[..16]
        );
        outcomes.push(ScenarioOutcome {
            name: scenario.name().to_string(),
            pass,
            manifest_sha256: hash,
        });
    }
    let top = SelftestManifest {
        seed,
        pass: all_pass,
        scenarios: outcomes,
    };
    let mut text = serde_json::to_string_pretty(&top)
        .map_err(|e| CliError::Solver(format!("serializing selftest manifest: {e}")))?;
    text.push('\n');
    std::fs::write(out.join("selftest.json"), &text)
        .map_err(|e| CliError::Solver(format!("writing selftest manifest: {e}")))?;
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    println!(
        "selftest {}  combined manifest sha256 {:x}",
        if all_pass { "PASS" } else { "FAIL" },
        hasher.finalize()
    );
    Ok(all_pass)
}
