//! Phase 2: ray mutation, rotational sweep and midpoint crossover around the
//! best vertex of the phase-1 cell.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{Sense, SgmConfig};
use crate::error::{Result, SgmError};
use crate::geometry::{BoxDomain, Point};
use crate::objective::Evaluator;
use crate::result::{push_trace, sd, RunResult, TracePoint};
use crate::subdivision::{GridCell, Phase1Outcome, FULL_ENUMERATION_MAX_DIM};

/// Mutable state of the phase-2 loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineState {
    pub s: Point,
    pub s_value: f64,
    pub cell: GridCell,
    pub rotations_used: u32,
    pub crossovers_used: u32,
    /// Direction and length of the last ray tried.
    pub last_ray: Option<(Vec<f64>, f64)>,
}

impl RefineState {
    pub fn new(s: Point, s_value: f64, cell: GridCell) -> Self {
        RefineState {
            s,
            s_value,
            cell,
            rotations_used: 0,
            crossovers_used: 0,
            last_ray: None,
        }
    }
}

/// One outer iteration as seen by the trace sink.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase2Event {
    pub iteration: u64,
    pub incumbent: Point,
    pub candidate: Point,
    pub accepted: bool,
}

/// Best vertex of the outcome, ties to the smallest lattice coordinates.
pub fn select_best_vertex(outcome: &Phase1Outcome, sense: Sense) -> Option<(Point, f64)> {
    outcome
        .vertices
        .iter()
        .min_by(|a, b| {
            sense
                .key(a.value)
                .total_cmp(&sense.key(b.value))
                .then_with(|| a.rel.cmp(&b.rel))
        })
        .map(|v| (v.point.clone(), v.value))
}

/// All `{+1, -1}^n` sign vectors, lexicographic with `+1` before `-1`.
pub fn diagonal_directions(n: usize) -> Vec<Vec<f64>> {
    assert!(
        (1..=20).contains(&n),
        "diagonal enumeration needs 1 <= n <= 20"
    );
    (0..1u64 << n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    if (k >> (n - 1 - i)) & 1 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Directions used by the sweeps. Up to [`FULL_ENUMERATION_MAX_DIM`] these
/// are all diagonals; above it the all-ones and all-minus-ones vectors plus
/// every vector one sign flip away from either, in the same order.
pub fn search_directions(n: usize) -> Vec<Vec<f64>> {
    if n <= FULL_ENUMERATION_MAX_DIM {
        return diagonal_directions(n);
    }
    let mut v = vec![vec![1.0; n], vec![-1.0; n]];
    for i in 0..n {
        let mut a = vec![1.0; n];
        a[i] = -1.0;
        let mut b = vec![-1.0; n];
        b[i] = 1.0;
        v.push(a);
        v.push(b);
    }
    v.sort_by(|a, b| {
        let key = |d: &Vec<f64>| d.iter().map(|&x| x < 0.0).collect::<Vec<_>>();
        key(a).cmp(&key(b))
    });
    v
}

/// `s + alpha * dir`.
pub fn ray_mutate(s: &[f64], dir: &[f64], alpha: f64) -> Result<Point> {
    if !(alpha > 0.0) {
        return Err(SgmError::Usage(format!(
            "ray length {alpha} must be positive"
        )));
    }
    if s.len() != dir.len() {
        return Err(SgmError::DimensionMismatch {
            expected: s.len(),
            got: dir.len(),
        });
    }
    Ok(Point::from(
        s.iter()
            .zip(dir)
            .map(|(x, d)| x + alpha * d)
            .collect::<Vec<_>>(),
    ))
}

/// Tries rays of length `0.1 * m * alpha_base / 0.1`, m = 1..10, along `dir`
/// and returns the first feasible endpoint strictly better than the
/// incumbent.
pub fn alpha_sweep(
    state: &mut RefineState,
    ev: &mut Evaluator<'_>,
    dir: &[f64],
    config: &SgmConfig,
) -> Result<Option<(Point, f64)>> {
    let scale = config.alpha_base / 0.1;
    for m in 1..=10 {
        let alpha = 0.1 * m as f64 * scale;
        state.last_ray = Some((dir.to_vec(), alpha));
        let p = ray_mutate(&state.s, dir, alpha)?;
        if !ev.domain().contains_unchecked(&p) {
            continue;
        }
        let v = ev.eval(&p)?;
        if ev.sense().better(v, state.s_value) {
            return Ok(Some((p, v)));
        }
    }
    Ok(None)
}

/// For each `beta` in the sweep, tries `s + beta * e` over `directions`
/// (skipping the direction of the last ray) and returns the first feasible
/// point strictly better than the incumbent. Each evaluated candidate uses
/// up one rotation; the sweep stops when `trm_max` is reached.
pub fn rotational_sweep(
    state: &mut RefineState,
    ev: &mut Evaluator<'_>,
    config: &SgmConfig,
    directions: &[Vec<f64>],
) -> Result<Option<(Point, f64)>> {
    let skip = state.last_ray.as_ref().map(|(d, _)| d.clone());
    for &beta in &config.beta_sweep {
        for e in directions {
            if state.rotations_used >= config.trm_max {
                return Ok(None);
            }
            if skip.as_ref() == Some(e) {
                continue;
            }
            let p = ray_mutate(&state.s, e, beta)?;
            if !ev.domain().contains_unchecked(&p) {
                continue;
            }
            state.rotations_used += 1;
            let v = ev.eval(&p)?;
            if ev.sense().better(v, state.s_value) {
                return Ok(Some((p, v)));
            }
        }
    }
    Ok(None)
}

/// Componentwise midpoint of two parents.
pub fn crossover_midpoint(p1: &[f64], p2: &[f64]) -> Result<Point> {
    if p1.len() != p2.len() {
        return Err(SgmError::DimensionMismatch {
            expected: p1.len(),
            got: p2.len(),
        });
    }
    Ok(Point::from(
        p1.iter()
            .zip(p2)
            .map(|(a, b)| 0.5 * a + 0.5 * b)
            .collect::<Vec<_>>(),
    ))
}

/// Midpoints of the `n` cell edges meeting at the corner nearest `ray_end`
/// (per axis, ties to the lower side), ordered by axis.
pub fn crossover_adjacent_sides(
    cell: &GridCell,
    domain: &BoxDomain,
    ray_end: &[f64],
) -> Vec<Point> {
    let top = cell.top(domain);
    let bits = (0..cell.dim())
        .filter(|&i| (top[i] - ray_end[i]).abs() < (ray_end[i] - cell.base[i]).abs())
        .fold(0u64, |b, i| b | 1 << i);
    let v = cell.corner(domain, bits);
    (0..cell.dim())
        .map(|k| {
            let other = cell.corner(domain, bits ^ (1 << k));
            crossover_midpoint(&v, &other).expect("corners share a dimension")
        })
        .collect()
}

fn axis_directions(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[i] = s;
            out.push(d);
        }
    }
    out
}

/// Fallback when both sweeps fail: midpoints between `s` and parents at
/// distance `2 * step` along every search direction and every axis, with
/// `step` halving from `alpha_base / 2` until it drops below the tolerance.
fn stall_refinement(
    state: &RefineState,
    ev: &mut Evaluator<'_>,
    config: &SgmConfig,
    directions: &[Vec<f64>],
    axes: &[Vec<f64>],
) -> Result<Option<(Point, f64)>> {
    let mut step = config.alpha_base;
    loop {
        step *= 0.5;
        if step < config.tolerance {
            return Ok(None);
        }
        for d in directions.iter().chain(axes) {
            let parent = ray_mutate(&state.s, d, 2.0 * step)?;
            let p = crossover_midpoint(&state.s, &parent)?;
            if p == state.s || !ev.domain().contains_unchecked(&p) {
                continue;
            }
            let v = ev.eval(&p)?;
            if ev.sense().better(v, state.s_value) {
                return Ok(Some((p, v)));
            }
        }
    }
}

/// How many consecutive low-gain iterations end the run.
pub const STALL_ITERATIONS: u32 = 3;

/// Runs phase 2 with a no-op trace sink.
pub fn run_phase2(
    outcome: &Phase1Outcome,
    ev: &mut Evaluator<'_>,
    config: &SgmConfig,
) -> RunResult {
    run_phase2_traced(outcome, ev, config, &mut |_| {})
}

/// Refines the best vertex of `outcome`.
///
/// Each outer iteration tries the ray sweep over the search directions, then
/// the rotational sweep, then the stall refinement. A success from either
/// sweep is followed by one crossover on the phase-1 cell (while under
/// `tc_max`) and the best of the improving point and the midpoints becomes
/// the new incumbent. The loop ends when nothing improves, when rotations and
/// crossovers are both used up, when the budget runs out, or after
/// [`STALL_ITERATIONS`] consecutive gains below `tolerance`.
///
/// The returned generations and trace cover phase 2 only; `best_point` and
/// `best_value` are the best over every evaluation made with `ev`.
pub fn run_phase2_traced(
    outcome: &Phase1Outcome,
    ev: &mut Evaluator<'_>,
    config: &SgmConfig,
    sink: &mut dyn FnMut(&Phase2Event),
) -> RunResult {
    let started = Instant::now();
    let sense = ev.sense();
    let mut trace: Vec<TracePoint> = Vec::new();
    let mut generations = 0u64;
    if let Some((s, v)) = select_best_vertex(outcome, sense) {
        let mut state = RefineState::new(s, v, outcome.cell.clone());
        let _ = refine_loop(&mut state, ev, config, &mut generations, &mut trace, sink);
    }
    finish(ev, generations, trace, started)
}

fn refine_loop(
    state: &mut RefineState,
    ev: &mut Evaluator<'_>,
    config: &SgmConfig,
    generations: &mut u64,
    trace: &mut Vec<TracePoint>,
    sink: &mut dyn FnMut(&Phase2Event),
) -> Result<()> {
    let n = state.s.dim();
    let sense = ev.sense();
    let directions = search_directions(n);
    let axes = axis_directions(n);
    let domain = ev.domain();
    if let Some((p, v)) = ev.best() {
        push_trace(trace, sense, 0, *v, p);
    }
    let mut stalled = 0;
    loop {
        if state.rotations_used >= config.trm_max && state.crossovers_used >= config.tc_max {
            return Ok(());
        }
        if ev.exhausted() {
            return Ok(());
        }
        *generations += 1;

        let mut found = None;
        for d in &directions {
            found = alpha_sweep(state, ev, d, config)?;
            if found.is_some() {
                break;
            }
        }
        if found.is_none() && state.rotations_used < config.trm_max {
            found = rotational_sweep(state, ev, config, &directions)?;
        }
        let mut candidates = Vec::new();
        match found {
            Some((p, v)) => {
                let crossover = state.crossovers_used < config.tc_max;
                candidates.push((p.clone(), v));
                if crossover {
                    state.crossovers_used += 1;
                    for m in crossover_adjacent_sides(&state.cell, domain, &p) {
                        let mv = ev.eval(&m)?;
                        candidates.push((m, mv));
                    }
                }
            }
            None => match stall_refinement(state, ev, config, &directions, &axes)? {
                Some(pv) => candidates.push(pv),
                None => {
                    *generations -= 1;
                    return Ok(());
                }
            },
        }

        let (bp, bv) = candidates
            .into_iter()
            .reduce(|a, b| if sense.better(b.1, a.1) { b } else { a })
            .expect("at least one candidate");
        let accepted = sense.better(bv, state.s_value);
        let gain = if accepted {
            (bv - state.s_value).abs()
        } else {
            0.0
        };
        sink(&Phase2Event {
            iteration: *generations,
            incumbent: state.s.clone(),
            candidate: bp.clone(),
            accepted,
        });
        if accepted {
            state.s = bp;
            state.s_value = bv;
        }
        if let Some((p, v)) = ev.best() {
            push_trace(trace, sense, *generations, *v, p);
        }
        stalled = if gain < config.tolerance {
            stalled + 1
        } else {
            0
        };
        if stalled >= STALL_ITERATIONS {
            return Ok(());
        }
    }
}

fn finish(
    ev: &Evaluator<'_>,
    generations: u64,
    trace: Vec<TracePoint>,
    started: Instant,
) -> RunResult {
    let obj = ev.objective();
    let (best_point, best_value) = ev
        .best()
        .cloned()
        .unwrap_or_else(|| (obj.domain().lo().clone(), f64::NAN));
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
