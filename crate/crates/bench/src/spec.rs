//! Experiment spec files (TOML).
//!
//! ```toml
//! functions = ["TP1", "F1"]
//! algorithms = ["SGM", "RS", "SA"]
//! trials = 50
//! master_seed = 7
//! outputs = "out"
//! emit_svg = false
//! workers = 4              # optional, default: all cores
//! success_tolerance = 1e-2 # optional, default: 1e-2 (1e-1 for F5)
//! timing = true            # optional; false writes wallclock_ms as 0
//!
//! [overrides.F1]
//! tf = 3
//! mr = 0.5
//! rms = 0.1
//! trm = 20
//! tc = 5
//! budget = 50000           # SGM evaluation budget, RS sample count
//! labeling = "GRADIENT"
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sgm::{default_config, make_objective, Labeling, Objective, SgmConfig};

use crate::error::{BenchError, Result};

/// Samples per random-search trial when no budget override is given.
pub const DEFAULT_RS_BUDGET: u64 = 1000;
pub const DEFAULT_TRIALS: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "SGM")]
    Sgm,
    #[serde(rename = "RS")]
    Rs,
    #[serde(rename = "SA")]
    Sa,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Sgm => "SGM",
            Algorithm::Rs => "RS",
            Algorithm::Sa => "SA",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SGM" => Ok(Algorithm::Sgm),
            "RS" => Ok(Algorithm::Rs),
            "SA" => Ok(Algorithm::Sa),
            _ => Err(BenchError::Spec(format!(
                "unknown algorithm `{s}` (valid: SGM, RS, SA)"
            ))),
        }
    }
}

/// Per-function overrides of the tuned SGM settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub tf: Option<u32>,
    pub mr: Option<f64>,
    pub rms: Option<f64>,
    pub trm: Option<u32>,
    pub tc: Option<u32>,
    pub budget: Option<u64>,
    pub labeling: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub functions: Vec<String>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default)]
    pub master_seed: u64,
    pub outputs: PathBuf,
    #[serde(default)]
    pub emit_svg: bool,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub success_tolerance: Option<f64>,
    #[serde(default = "yes")]
    pub timing: bool,
    #[serde(default)]
    pub overrides: BTreeMap<String, Overrides>,
}

fn default_trials() -> u32 {
    DEFAULT_TRIALS
}

fn yes() -> bool {
    true
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec =
            toml::from_str(text).map_err(|e| BenchError::Spec(e.message().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Resolves every name and override before anything runs.
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(BenchError::Spec("trials must be at least 1".into()));
        }
        if self.functions.is_empty() || self.algorithms.is_empty() {
            return Err(BenchError::Spec(
                "functions and algorithms must be non-empty".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(BenchError::Spec("workers must be at least 1".into()));
        }
        if let Some(t) = self.success_tolerance {
            if !(t > 0.0) {
                return Err(BenchError::Spec(
                    "success_tolerance must be positive".into(),
                ));
            }
        }
        for name in self.overrides.keys() {
            if !self.functions.iter().any(|f| f.eq_ignore_ascii_case(name)) {
                return Err(BenchError::Spec(format!(
                    "override for `{name}`, which is not in `functions`"
                )));
            }
        }
        for f in &self.functions {
            let obj = make_objective(f)?;
            if self.algorithms.contains(&Algorithm::Sgm) {
                sgm::SolverHandle::new(obj.clone(), self.sgm_config(&obj)?)?;
            }
            if self.overrides_for(f).budget == Some(0) {
                return Err(BenchError::Spec(format!(
                    "budget for `{f}` must be at least 1"
                )));
            }
        }
        Ok(())
    }

    pub fn overrides_for(&self, function: &str) -> Overrides {
        self.overrides
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(function))
            .map(|(_, v)| v.clone())
            .unwrap_or_default()
    }

    /// Tuned defaults for `obj` with this spec's overrides applied.
    pub fn sgm_config(&self, obj: &Objective) -> Result<SgmConfig> {
        let o = self.overrides_for(obj.name());
        let mut c = default_config(obj);
        c.seed = self.master_seed;
        if let Some(v) = o.tf {
            c.tf_rounds = v;
        }
        if let Some(v) = o.mr {
            c.mutation_rate = v;
        }
        if let Some(v) = o.rms {
            c.alpha_base = v;
        }
        if let Some(v) = o.trm {
            c.trm_max = v;
        }
        if let Some(v) = o.tc {
            c.tc_max = v;
        }
        if let Some(v) = o.budget {
            c.eval_budget = v;
        }
        if let Some(v) = &o.labeling {
            c.labeling = v.parse::<Labeling>()?;
        }
        Ok(c)
    }

    pub fn rs_budget(&self, function: &str) -> u64 {
        self.overrides_for(function)
            .budget
            .unwrap_or(DEFAULT_RS_BUDGET)
    }

    /// Success radius for `function`: the spec's tolerance, else 1e-2
    /// (1e-1 for F5).
    pub fn tolerance_for(&self, function: &str) -> f64 {
        self.success_tolerance
            .unwrap_or(default_tolerance(function))
    }
}

pub fn default_tolerance(function: &str) -> f64 {
    if function.eq_ignore_ascii_case("F5") {
        1e-1
    } else {
        1e-2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
        functions = ["TP1", "F1"]
        algorithms = ["SGM", "RS"]
        trials = 3
        master_seed = 9
        outputs = "out"

        [overrides.F1]
        tf = 3
        labeling = "gradient"
    "#;

    #[test]
    fn parses_and_applies_overrides() {
        let spec = ExperimentSpec::from_toml(BASIC).unwrap();
        assert_eq!(spec.trials, 3);
        assert!(spec.timing);
        let f1 = make_objective("F1").unwrap();
        let c = spec.sgm_config(&f1).unwrap();
        assert_eq!(
            (c.tf_rounds, c.trm_max, c.labeling, c.seed),
            (3, 15, Labeling::Gradient, 9)
        );
        assert_eq!(spec.rs_budget("TP1"), DEFAULT_RS_BUDGET);
        assert_eq!(spec.tolerance_for("F5"), 1e-1);
    }

    #[test]
    fn rejects_unresolvable_entries() {
        let bad_fn = BASIC
            .replace("\"F1\"]", "\"F9\"]")
            .replace("[overrides.F1]", "[overrides.TP1]");
        assert!(ExperimentSpec::from_toml(&bad_fn).is_err());
        let bad_alg = BASIC.replace("\"RS\"", "\"GA\"");
        assert!(ExperimentSpec::from_toml(&bad_alg).is_err());
        let bad_key = format!("{BASIC}\nbogus = 1\n");
        assert!(ExperimentSpec::from_toml(&bad_key).is_err());
        let zero = BASIC.replace("trials = 3", "trials = 0");
        assert!(ExperimentSpec::from_toml(&zero).is_err());
        let grad_f3 = BASIC
            .replace("\"F1\"]", "\"F3\"]")
            .replace("[overrides.F1]", "[overrides.F3]");
        assert!(ExperimentSpec::from_toml(&grad_f3).is_err());
        let stray = BASIC.replace("[overrides.F1]", "[overrides.F2]");
        assert!(ExperimentSpec::from_toml(&stray).is_err());
    }
}
