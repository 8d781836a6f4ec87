//! Phase 1 followed by phase 2 under one counter and one random stream.

use std::time::Instant;

use crate::config::{Labeling, SgmConfig};
use crate::error::{Result, SgmError};
use crate::objective::{Evaluator, Objective};
use crate::refinement::{run_phase2_traced, Phase2Event};
use crate::result::{push_trace, RunResult};
use crate::rng::RngStream;
use crate::subdivision::{run_phase1_traced, Phase1Snapshot};

/// Per-function tuned settings (TF, TRM, TC); everything else is the generic
/// default.
fn tuned(name: &str) -> Option<(u32, u32, u32)> {
    Some(match name {
        "F1" => (2, 15, 3),
        "F2" => (2, 16, 11),
        "F3" => (2, 25, 5),
        "F4" => (2, 75, 30),
        "F5" => (8, 9, 2),
        _ => return None,
    })
}

/// Tuned settings for F1 to F5, generic defaults for anything else.
pub fn default_config(obj: &Objective) -> SgmConfig {
    let mut c = SgmConfig::default();
    if let Some((tf, trm, tc)) = tuned(obj.name()) {
        c.tf_rounds = tf;
        c.trm_max = trm;
        c.tc_max = tc;
    }
    c
}

/// An objective paired with a checked configuration.
#[derive(Debug, Clone)]
pub struct SolverHandle {
    objective: Objective,
    config: SgmConfig,
}

impl SolverHandle {
    pub fn new(objective: Objective, config: SgmConfig) -> Result<Self> {
        config.validate(objective.domain())?;
        if config.labeling == Labeling::Gradient && !objective.has_gradient() {
            return Err(SgmError::Config(format!(
                "`{}` has no gradient; use BEST_NEIGHBOR labeling",
                objective.name()
            )));
        }
        Ok(SolverHandle { objective, config })
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn config(&self) -> &SgmConfig {
        &self.config
    }

    /// Runs on stream 0 of the configured seed.
    pub fn solve(&self) -> RunResult {
        self.solve_on(RngStream::new(self.config.seed, 0))
    }

    pub fn solve_on(&self, rng: RngStream) -> RunResult {
        self.solve_traced(rng, &mut |_| {}, &mut |_| {})
    }

    /// Like [`SolverHandle::solve_on`], reporting phase-1 rounds and phase-2
    /// iterations to the sinks.
    pub fn solve_traced(
        &self,
        rng: RngStream,
        phase1_sink: &mut dyn FnMut(&Phase1Snapshot),
        phase2_sink: &mut dyn FnMut(&Phase2Event),
    ) -> RunResult {
        let started = Instant::now();
        let cfg = &self.config;
        let mut ev = Evaluator::new(&self.objective, cfg.sense, cfg.eval_budget, rng);
        let mut trace = Vec::new();
        let outcome = run_phase1_traced(&mut ev, cfg, phase1_sink)
            .expect("configuration was validated when the handle was built");
        let rounds = outcome.rounds_completed as u64;
        if let Some((p, v)) = ev.best() {
            push_trace(&mut trace, cfg.sense, 0, *v, p);
        }
        let p2 = run_phase2_traced(&outcome, &mut ev, cfg, phase2_sink);
        for t in p2.trace {
            push_trace(
                &mut trace,
                cfg.sense,
                rounds + t.generation,
                t.best_value,
                &t.best_point,
            );
        }
        RunResult {
            generations: rounds + p2.generations,
            trace,
            wallclock_ms: started.elapsed().as_secs_f64() * 1e3,
            ..p2
        }
    }
}

/// Builds a handle and solves on stream 0 of `config.seed`.
pub fn solve(obj: &Objective, config: &SgmConfig) -> Result<RunResult> {
    Ok(SolverHandle::new(obj.clone(), config.clone())?.solve())
}
