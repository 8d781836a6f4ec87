//! Run outcomes.

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

/// One entry of the incumbent trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub generation: u64,
    pub best_value: f64,
    pub best_point: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_point: Point,
    /// BP: best objective value over every evaluation of the run.
    pub best_value: f64,
    pub evaluations: u64,
    pub generations: u64,
    /// Max-norm deviation from the known optimum, when one is recorded.
    pub sd: Option<f64>,
    pub trace: Vec<TracePoint>,
    pub wallclock_ms: f64,
}

impl RunResult {
    /// Same result with wallclock zeroed, for bitwise comparisons.
    pub fn without_timing(mut self) -> Self {
        self.wallclock_ms = 0.0;
        self
    }
}

/// Componentwise absolute deviation `|x - x*|`.
pub fn sd_vector(x: &[f64], optimum: &[f64]) -> Vec<f64> {
    x.iter().zip(optimum).map(|(a, b)| (a - b).abs()).collect()
}

/// Max-norm of [`sd_vector`].
pub fn sd(x: &[f64], optimum: &[f64]) -> f64 {
    sd_vector(x, optimum).into_iter().fold(0.0, f64::max)
}

/// Appends to `trace` only when `value` strictly improves on its last entry,
/// which keeps the trace monotone by construction.
pub(crate) fn push_trace(
    trace: &mut Vec<TracePoint>,
    sense: crate::config::Sense,
    generation: u64,
    value: f64,
    point: &[f64],
) {
    let improves = trace
        .last()
        .is_none_or(|t| sense.better(value, t.best_value));
    if improves {
        trace.push(TracePoint {
            generation,
            best_value: value,
            best_point: Point::from(point),
        });
    }
}
