//! Runs every (function, algorithm, trial) of a spec.

use std::path::Path;

use rayon::prelude::*;
use sgm::baselines::{random_search, simulated_annealing, SaConfig};
use sgm::result::sd_vector;
use sgm::{make_objective, Objective, RngStream, RunResult, SolverHandle};

use crate::error::{BenchError, Result};
use crate::report::{write_report, Report, TrialRow};
use crate::spec::{Algorithm, ExperimentSpec};
use crate::svg::emit_svg_trace;

pub const SVG_DIR: &str = "svg";

struct Job<'a> {
    objective: &'a Objective,
    handle: Option<&'a SolverHandle>,
    algorithm: Algorithm,
    trial: u32,
}

/// A run counts as a success when its point is within the spec tolerance of
/// the known optimum, or when a deterministic function's known optimal value
/// is reached exactly (F3's minimum is a whole plateau).
pub fn is_success(obj: &Objective, best_x: &[f64], best_f: f64, tolerance: f64) -> bool {
    match obj.known_optimum() {
        Some((x, f)) => {
            let near = sd_vector(best_x, x).iter().all(|d| *d <= tolerance);
            near || (!obj.is_stochastic() && best_f <= *f)
        }
        None => false,
    }
}

fn run_job(spec: &ExperimentSpec, job: &Job<'_>) -> Result<TrialRow> {
    let rng = RngStream::new(spec.master_seed, job.trial as u64);
    let obj = job.objective;
    let result: RunResult = match job.algorithm {
        Algorithm::Sgm => {
            let handle = job.handle.expect("handle built for SGM jobs");
            if spec.emit_svg && obj.dim() == 2 {
                let mut snaps = Vec::new();
                let r = handle.solve_traced(rng, &mut |s| snaps.push(s.clone()), &mut |_| {});
                let dir = spec.outputs.join(SVG_DIR);
                let path = dir.join(format!("{}_SGM_{}.svg", obj.name(), job.trial));
                emit_svg_trace(obj.domain(), &snaps, &r.trace, &path)?;
                r
            } else {
                handle.solve_on(rng)
            }
        }
        Algorithm::Rs => random_search(obj, spec.rs_budget(obj.name()), rng)?,
        Algorithm::Sa => simulated_annealing(obj, &SaConfig::default(), rng)?,
    };
    let tol = spec.tolerance_for(obj.name());
    Ok(TrialRow {
        function: obj.name().to_string(),
        algorithm: job.algorithm,
        trial: job.trial,
        seed: spec.master_seed,
        generations: result.generations,
        evaluations: result.evaluations,
        success: is_success(obj, &result.best_point, result.best_value, tol),
        sd_vector: obj
            .known_optimum()
            .map(|(x, _)| sd_vector(&result.best_point, x)),
        best_f: result.best_value,
        best_x: result.best_point.into_inner(),
        sd: result.sd,
        wallclock_ms: if spec.timing {
            result.wallclock_ms
        } else {
            0.0
        },
    })
}

/// Runs every trial without touching the output directory (SVGs aside).
/// Rows come back in spec order whatever the worker count.
pub fn run_trials(spec: &ExperimentSpec) -> Result<Vec<TrialRow>> {
    spec.validate()?;
    let objectives: Vec<Objective> = spec
        .functions
        .iter()
        .map(|f| make_objective(f))
        .collect::<sgm::Result<_>>()?;
    let handles: Vec<Option<SolverHandle>> = objectives
        .iter()
        .map(|o| {
            if spec.algorithms.contains(&Algorithm::Sgm) {
                Ok(Some(SolverHandle::new(o.clone(), spec.sgm_config(o)?)?))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    if spec.emit_svg && spec.algorithms.contains(&Algorithm::Sgm) {
        for o in objectives.iter().filter(|o| o.dim() != 2) {
            eprintln!(
                "note: {} is {}-dimensional, no SVG traces",
                o.name(),
                o.dim()
            );
        }
        let dir = spec.outputs.join(SVG_DIR);
        std::fs::create_dir_all(&dir).map_err(|e| BenchError::io(&dir, e))?;
    }

    let mut jobs = Vec::new();
    for (objective, handle) in objectives.iter().zip(&handles) {
        for &algorithm in &spec.algorithms {
            for trial in 0..spec.trials {
                jobs.push(Job {
                    objective,
                    handle: handle.as_ref(),
                    algorithm,
                    trial,
                });
            }
        }
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = spec.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| BenchError::Spec(format!("cannot start workers: {e}")))?;
    pool.install(|| jobs.par_iter().map(|j| run_job(spec, j)).collect())
}

/// Runs the spec and writes `trials.csv`, `summary.csv` and `report.json`
/// into its output directory.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    let report = Report::from_trials(run_trials(spec)?);
    write_report(&report, &spec.outputs)?;
    Ok(report)
}

/// Loads a spec file and runs it.
pub fn run_spec_file(path: &Path) -> Result<Report> {
    run_experiment(&ExperimentSpec::load(path)?)
}
