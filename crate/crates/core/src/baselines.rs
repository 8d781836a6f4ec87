//! Comparison solvers and the literature generation counts.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::Sense;
use crate::error::{Result, SgmError};
use crate::objective::{Evaluator, Objective};
use crate::result::{push_trace, sd, RunResult, TracePoint};
use crate::rng::RngStream;

fn finish(
    ev: &Evaluator<'_>,
    generations: u64,
    trace: Vec<TracePoint>,
    started: Instant,
) -> RunResult {
    let obj = ev.objective();
    let (best_point, best_value) = ev.best().cloned().expect("at least one evaluation");
    RunResult {
        sd: obj.known_optimum().map(|(x, _)| sd(&best_point, x)),
        best_point,
        best_value,
        evaluations: ev.count(),
        generations,
        trace,
        wallclock_ms: started.elapsed().as_secs_f64() * 1e3,
    }
}

fn uniform_point(obj: &Objective, rng: &mut RngStream) -> Vec<f64> {
    let d = obj.domain();
    (0..obj.dim())
        .map(|i| rng.uniform_in(d.lo()[i], d.hi()[i]))
        .collect()
}

/// Uniform sampling of the box; exactly `budget` evaluations.
pub fn random_search(obj: &Objective, budget: u64, rng: RngStream) -> Result<RunResult> {
    if budget == 0 {
        return Err(SgmError::Config(
            "random search budget must be at least 1".into(),
        ));
    }
    let started = Instant::now();
    let mut ev = Evaluator::new(obj, Sense::Min, budget, rng);
    let mut trace = Vec::new();
    for i in 0..budget {
        let x = uniform_point(obj, ev.rng());
        let v = ev.eval(&x)?;
        push_trace(&mut trace, Sense::Min, i, v, &x);
    }
    Ok(finish(&ev, budget, trace, started))
}

/// Simulated annealing settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub t0: f64,
    pub cooling: f64,
    pub steps_per_temp: u32,
    /// Proposal standard deviation as a fraction of each axis extent.
    pub scale: f64,
    /// Annealing stops once the temperature drops below this.
    pub t_min: f64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            t0: 10.0,
            cooling: 0.95,
            steps_per_temp: 100,
            scale: 0.1,
            t_min: 1e-3,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0) {
            return Err(SgmError::Config("SA t0 must be positive".into()));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(SgmError::Config("SA cooling must lie in (0, 1)".into()));
        }
        if self.steps_per_temp == 0 || !(self.scale >= 0.0) || !(self.t_min > 0.0) {
            return Err(SgmError::Config(
                "SA steps, scale and t_min must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of temperature stages before `t_min` is reached.
    pub fn stages(&self) -> u64 {
        let mut t = self.t0;
        let mut k = 0;
        while t >= self.t_min {
            k += 1;
            t *= self.cooling;
        }
        k
    }
}

/// Metropolis annealing from a uniform random start with geometric cooling
/// and Gaussian proposals clamped to the box. Minimizes.
pub fn simulated_annealing(obj: &Objective, sa: &SaConfig, rng: RngStream) -> Result<RunResult> {
    sa.validate()?;
    let started = Instant::now();
    let stages = sa.stages();
    let budget = 1 + stages * sa.steps_per_temp as u64;
    let mut ev = Evaluator::new(obj, Sense::Min, budget, rng);
    let domain = obj.domain();
    let sigma: Vec<f64> = domain.extents().iter().map(|e| sa.scale * e).collect();

    let mut x = uniform_point(obj, ev.rng());
    let mut fx = ev.eval(&x)?;
    let mut trace = Vec::new();
    push_trace(&mut trace, Sense::Min, 0, fx, &x);
    let mut t = sa.t0;
    for stage in 1..=stages {
        for _ in 0..sa.steps_per_temp {
            let raw: Vec<f64> = x
                .iter()
                .zip(&sigma)
                .map(|(xi, s)| xi + s * ev.rng().gaussian())
                .collect();
            let y = domain.clamp(&raw)?.into_inner();
            let fy = ev.eval(&y)?;
            let delta = fy - fx;
            let u = ev.rng().uniform();
            if delta <= 0.0 || u < (-delta / t).exp() {
                x = y;
                fx = fy;
            }
        }
        if let Some((p, v)) = ev.best() {
            push_trace(&mut trace, Sense::Min, stage, *v, p);
        }
        t *= sa.cooling;
    }
    Ok(finish(&ev, stages, trace, started))
}

/// Published generation counts of another method on F1 to F5.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub algorithm: String,
    pub gens: [u64; 5],
}

pub const DE_ROW: &str = "DE(F: RandomValues)";
pub const SGM_ROW: &str = "RSLMGA";

/// The literature comparison rows, verbatim.
pub fn reference_table() -> Vec<ReferenceRow> {
    let row = |name: &str, gens: [u64; 5]| ReferenceRow {
        algorithm: name.to_string(),
        gens,
    };
    vec![
        row("PGA(λ = 4)", [1170, 1235, 3481, 3194, 1256]),
        row("PGA(λ = 8)", [1526, 1671, 3634, 5243, 2076]),
        row("Grefensstette", [2210, 14229, 2259, 3070, 4334]),
        row("Eshelman", [1538, 9477, 1740, 4137, 3004]),
        row(DE_ROW, [260, 670, 125, 2300, 1200]),
        row(SGM_ROW, [20, 29, 32, 107, 19]),
    ]
}

/// The published PNG row, kept for cross-checking [`png_ratio`].
pub const PUBLISHED_PNG: [u64; 5] = [13, 24, 4, 22, 64];

pub fn reference_row(name: &str) -> Option<ReferenceRow> {
    reference_table().into_iter().find(|r| r.algorithm == name)
}

/// `ceil(reference / sgm)`.
pub fn png_ratio(reference_gens: u64, sgm_gens: u64) -> Result<u64> {
    if sgm_gens == 0 {
        return Err(SgmError::Usage(
            "png ratio needs a positive generation count".into(),
        ));
    }
    Ok(reference_gens.div_ceil(sgm_gens))
}
