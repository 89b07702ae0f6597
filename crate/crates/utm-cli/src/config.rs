//! Run configuration: a flat TOML file with one section per concern. Parsing
//! and validation happen before anything touches the output directory, so a
//! bad config never leaves partial artifacts behind.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use utm_core::grid::{Grid, ProblemSpec, Sign};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    LinearManufactured,
    PureIbvp,
    NlsPicard,
    EstimateEnsemble,
    GlobalRelationAudit,
    SuperpositionAudit,
    OracleCrosscheck,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::LinearManufactured => "linear_manufactured",
            Scenario::PureIbvp => "pure_ibvp",
            Scenario::NlsPicard => "nls_picard",
            Scenario::EstimateEnsemble => "estimate_ensemble",
            Scenario::GlobalRelationAudit => "global_relation_audit",
            Scenario::SuperpositionAudit => "superposition_audit",
            Scenario::OracleCrosscheck => "oracle_crosscheck",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub gamma: f64,
    #[serde(default = "default_alpha")]
    pub alpha: u32,
    #[serde(default = "default_sign")]
    pub sign: String,
    pub s: f64,
    pub t_horizon: f64,
}

fn default_alpha() -> u32 {
    3
}

fn default_sign() -> String {
    "defocusing".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n1: usize,
    pub n2: usize,
    pub nt: usize,
    pub l1: f64,
    pub l2: f64,
    /// defaults to the problem horizon
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    /// gaussian | zero | boundary_bump
    pub profile: String,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_center")]
    pub center: [f64; 2],
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_velocity")]
    pub velocity: [f64; 2],
    /// amplitude of the optional interior forcing bump
    #[serde(default)]
    pub forcing_amplitude: f64,
}

fn default_amplitude() -> f64 {
    1.0
}
fn default_center() -> [f64; 2] {
    [0.0, 6.5]
}
fn default_width() -> f64 {
    0.5
}
fn default_velocity() -> [f64; 2] {
    [0.0, -2.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditSection {
    pub samples: usize,
    pub tolerance: f64,
    pub refine: bool,
}

impl Default for AuditSection {
    fn default() -> Self {
        Self {
            samples: 100,
            tolerance: 1e-3,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSection {
    pub draws: usize,
    pub bandwidths: Vec<usize>,
    /// forced | robin | neumann
    pub estimate: String,
    /// ratio of per-level maxima beyond which monotone growth fails the run
    pub growth_limit: f64,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            draws: 20,
            bandwidths: vec![2, 4, 8],
            estimate: "forced".into(),
            growth_limit: 1.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    pub problem: ProblemSection,
    pub grid: GridSection,
    pub data: DataSection,
    #[serde(default)]
    pub audit: AuditSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn spec(&self) -> Result<ProblemSpec, CliError> {
        let sign = match self.problem.sign.as_str() {
            "defocusing" => Sign::Defocusing,
            "focusing" => Sign::Focusing,
            other => {
                return Err(CliError::Config(format!(
                    "unknown sign '{other}' (expected focusing or defocusing)"
                )))
            }
        };
        Ok(ProblemSpec::new(
            self.problem.gamma,
            self.problem.alpha,
            sign,
            self.problem.s,
            self.problem.t_horizon,
        ))
    }

    pub fn build_grid(&self) -> Result<Grid, CliError> {
        let t_max = self.grid.t_max.unwrap_or(self.problem.t_horizon);
        Grid::new(
            self.grid.n1,
            self.grid.n2,
            self.grid.nt,
            self.grid.l1,
            self.grid.l2,
            t_max,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    fn validate(&self) -> Result<(), CliError> {
        self.spec()?;
        self.build_grid()?;
        let known = match self.scenario {
            Scenario::PureIbvp => ["boundary_bump", "zero"].as_slice(),
            _ => ["gaussian", "zero"].as_slice(),
        };
        if !known.contains(&self.data.profile.as_str()) {
            return Err(CliError::Config(format!(
                "profile '{}' is not defined for scenario {} (known: {})",
                self.data.profile,
                self.scenario.name(),
                known.join(", ")
            )));
        }
        if self.scenario == Scenario::EstimateEnsemble {
            if !["forced", "robin", "neumann"].contains(&self.ensemble.estimate.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown estimate '{}' (expected forced, robin or neumann)",
                    self.ensemble.estimate
                )));
            }
            if self.ensemble.draws == 0 || self.ensemble.bandwidths.is_empty() {
                return Err(CliError::Config(
                    "ensemble needs at least one draw and one bandwidth".into(),
                ));
            }
        }
        if self.audit.samples == 0 {
            return Err(CliError::Config("audit needs at least one sample".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_configs_parse_and_validate() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let mut count = 0;
        for entry in std::fs::read_dir(&dir).expect("configs directory exists") {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "toml") {
                let text = std::fs::read_to_string(&path).unwrap();
                let config = RunConfig::parse(&text)
                    .unwrap_or_else(|e| panic!("{}: {}", path.display(), e.message()));
                assert_eq!(
                    path.file_stem().unwrap().to_str().unwrap(),
                    config.scenario.name(),
                    "file name should match its scenario"
                );
                count += 1;
            }
        }
        assert_eq!(count, 7, "one example config per scenario");
    }

    #[test]
    fn defaults_fill_optional_sections() {
        let config = RunConfig::parse(
            r#"
scenario = "linear_manufactured"
output = "runs/x"
seed = 1

[problem]
gamma = -1.0
s = 1.0
t_horizon = 0.5

[grid]
n1 = 16
n2 = 17
nt = 5
l1 = 20.0
l2 = 20.0

[data]
profile = "gaussian"
"#,
        )
        .unwrap();
        assert_eq!(config.data.amplitude, 1.0);
        assert_eq!(config.audit.samples, 100);
        assert!(config.audit.refine);
    }
}
