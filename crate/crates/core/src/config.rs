//! Solver configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SgmError};
use crate::geometry::BoxDomain;

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Sense {
    #[default]
    Min,
    Max,
}

impl Sense {
    /// Strictly better in this sense. Ties are never better.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }

    /// Key that sorts best first under `f64::total_cmp`.
    pub fn key(self, v: f64) -> f64 {
        match self {
            Sense::Min => v,
            Sense::Max => -v,
        }
    }
}

/// How phase 1 assigns an integer label to a grid vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Labeling {
    /// Sign pattern of the step towards the best Moore neighbour.
    #[default]
    BestNeighbor,
    /// Sign pattern of the gradient.
    Gradient,
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Labeling::BestNeighbor => "BEST_NEIGHBOR",
            Labeling::Gradient => "GRADIENT",
        })
    }
}

impl FromStr for Labeling {
    type Err = SgmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "BEST_NEIGHBOR" | "NEIGHBOR" => Ok(Labeling::BestNeighbor),
            "GRADIENT" => Ok(Labeling::Gradient),
            _ => Err(SgmError::Config(format!(
                "unknown labeling `{s}` (valid: BEST_NEIGHBOR, GRADIENT)"
            ))),
        }
    }
}

pub const DEFAULT_BETAS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 1.0];

/// All tunables of one SGM run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgmConfig {
    pub sense: Sense,
    /// TF: phase-1 subdivision rounds.
    pub tf_rounds: u32,
    /// MR: per-vertex probability of proposing the best neighbour as an
    /// extra population member.
    pub mutation_rate: f64,
    /// RMS: base ray length; the ray sweep uses `alpha_base * m` for m = 1..10.
    pub alpha_base: f64,
    /// TRM: cap on rotational candidates evaluated per run.
    pub trm_max: u32,
    /// TC: cap on crossover applications per run.
    pub tc_max: u32,
    pub beta_sweep: Vec<f64>,
    pub labeling: Labeling,
    pub eval_budget: u64,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SgmConfig {
    fn default() -> Self {
        SgmConfig {
            sense: Sense::Min,
            tf_rounds: 3,
            mutation_rate: 0.5,
            alpha_base: 0.1,
            trm_max: 50,
            tc_max: 20,
            beta_sweep: DEFAULT_BETAS.to_vec(),
            labeling: Labeling::BestNeighbor,
            eval_budget: 100_000,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl SgmConfig {
    /// Checks the configuration on its own and against `domain`.
    pub fn validate(&self, domain: &BoxDomain) -> Result<()> {
        let bad = |msg: String| Err(SgmError::Config(msg));
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad(format!(
                "mutation_rate {} outside [0, 1]",
                self.mutation_rate
            ));
        }
        if !(self.alpha_base > 0.0 && self.alpha_base.is_finite()) {
            return bad(format!("alpha_base {} must be positive", self.alpha_base));
        }
        if self.alpha_base * 10.0 > domain.max_extent() {
            return bad(format!(
                "alpha_base {} too large: 10 * alpha_base exceeds the largest extent {}",
                self.alpha_base,
                domain.max_extent()
            ));
        }
        if self.beta_sweep.is_empty() {
            return bad("beta_sweep is empty".into());
        }
        if self.beta_sweep.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return bad("beta_sweep entries must be positive".into());
        }
        if self.beta_sweep.windows(2).any(|w| w[0] >= w[1]) {
            return bad("beta_sweep must be strictly increasing".into());
        }
        if self.eval_budget == 0 {
            return bad("eval_budget must be at least 1".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad(format!("tolerance {} must be positive", self.tolerance));
        }
        Ok(())
    }
}
