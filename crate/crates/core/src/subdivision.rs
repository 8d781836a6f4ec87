//! Phase 1: grid subdivision with integer labeling.
//!
//! Every vertex lives on a dyadic lattice: at level `L` its coordinates are
//! `lo + k * extent * 2^-L` for integer `k`. Keeping `k` instead of the raw
//! point makes bisection exact and lets labels be cached per vertex.
//!
//! Up to [`FULL_ENUMERATION_MAX_DIM`] dimensions, cells have all `2^n` corners
//! and neighbourhoods are the full `3^n - 1` Moore set. Above that both are
//! sparsified (see [`corner_patterns`] and [`moore_offsets`]) and each round
//! keeps a single child, the one facing the best point seen so far.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::config::{Labeling, SgmConfig};
use crate::error::{Result, SgmError};
use crate::geometry::{BoxDomain, Point};
use crate::objective::Evaluator;

/// Deepest level a cell may reach; the step is then `extent * 2^-40`.
pub const MAX_LEVEL: u32 = 40;

/// Largest dimension handled with full corner and neighbourhood enumeration.
pub const FULL_ENUMERATION_MAX_DIM: usize = 8;

/// Axis-aligned cell `[base, base + step]` on the level-`level` lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub base: Point,
    pub step: Vec<f64>,
    pub level: u32,
    /// Lattice coordinates of `base` at `level`.
    pub rel: Vec<u64>,
}

impl GridCell {
    fn at(domain: &BoxDomain, rel: Vec<u64>, level: u32) -> Self {
        GridCell {
            base: domain.lattice_point(&rel, level),
            step: (0..domain.dim())
                .map(|i| domain.step_at(i, level))
                .collect(),
            level,
            rel,
        }
    }

    pub fn dim(&self) -> usize {
        self.rel.len()
    }

    /// Corner selected by `bits`: bit `i` set means axis `i` takes its upper
    /// value.
    pub fn corner(&self, domain: &BoxDomain, bits: u64) -> Point {
        domain.lattice_point(&self.corner_rel(bits), self.level)
    }

    fn corner_rel(&self, bits: u64) -> Vec<u64> {
        self.rel
            .iter()
            .enumerate()
            .map(|(i, &k)| k + ((bits >> i) & 1))
            .collect()
    }

    /// Upper corner.
    pub fn top(&self, domain: &BoxDomain) -> Point {
        let rel: Vec<u64> = self.rel.iter().map(|k| k + 1).collect();
        domain.lattice_point(&rel, self.level)
    }

    /// Whether lattice point `k` at `level >= self.level` lies in the closed
    /// cell.
    pub fn contains_rel(&self, k: &[u64], level: u32) -> bool {
        debug_assert!(level >= self.level);
        let shift = level - self.level;
        self.rel
            .iter()
            .zip(k)
            .all(|(&r, &x)| r << shift <= x && x <= (r + 1) << shift)
    }
}

/// A cell corner with its label and cached objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledVertex {
    pub point: Point,
    /// Lattice coordinates at the owning cell's level.
    pub rel: Vec<u64>,
    pub label: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase1Outcome {
    pub cell: GridCell,
    pub vertices: Vec<LabeledVertex>,
    pub evaluations: u64,
    pub rounds_completed: u32,
    /// False when the cell was chosen by the fallback rule or the run was cut
    /// short.
    pub complete: bool,
}

/// What the trace sink sees after each labeling pass.
#[derive(Debug, Clone)]
pub struct Phase1Snapshot {
    pub round: u32,
    pub candidates: Vec<(GridCell, Vec<LabeledVertex>)>,
    pub selected: usize,
    pub complete: bool,
}

pub fn initial_cell(domain: &BoxDomain) -> GridCell {
    GridCell::at(domain, vec![0; domain.dim()], 0)
}

/// Corner bit patterns of an `n`-cell in ascending index order. The full
/// `2^n` set up to [`FULL_ENUMERATION_MAX_DIM`]; above it the lower and upper
/// corners plus their `n` axis neighbours each.
pub fn corner_patterns(n: usize) -> Result<Vec<u64>> {
    if n == 0 || n > 63 {
        return Err(SgmError::Usage(format!("unsupported dimension {n}")));
    }
    if n <= FULL_ENUMERATION_MAX_DIM {
        return Ok((0..1u64 << n).collect());
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut v = vec![0, full];
    for i in 0..n {
        v.push(1 << i);
        v.push(full ^ (1 << i));
    }
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// All corners of `cell` in [`corner_patterns`] order.
pub fn corners(cell: &GridCell, domain: &BoxDomain) -> Result<Vec<Point>> {
    Ok(corner_patterns(cell.dim())?
        .into_iter()
        .map(|b| cell.corner(domain, b))
        .collect())
}

/// Neighbourhood offsets `delta` with `delta_i` in `{-1, 0, 1}`, zero
/// excluded, ordered by base-3 index with axis 0 least significant. Above
/// [`FULL_ENUMERATION_MAX_DIM`] only the `2n` axis offsets and the two full
/// diagonals are kept, in the same relative order.
pub fn moore_offsets(n: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = if n <= FULL_ENUMERATION_MAX_DIM {
        let total = 3usize.pow(n as u32);
        (0..total)
            .map(|mut t| {
                (0..n)
                    .map(|_| {
                        let d = (t % 3) as i64 - 1;
                        t /= 3;
                        d
                    })
                    .collect()
            })
            .collect()
    } else {
        let mut v = vec![vec![-1; n], vec![1; n]];
        for i in 0..n {
            for s in [-1, 1] {
                let mut d = vec![0; n];
                d[i] = s;
                v.push(d);
            }
        }
        v.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
        v
    };
    out.retain(|d| d.iter().any(|&x| x != 0));
    out
}

/// Points `p + delta * h` for every offset of [`moore_offsets`], kept when
/// inside `domain`.
pub fn neighborhood(p: &[f64], h: &[f64], domain: &BoxDomain) -> Result<Vec<Point>> {
    if !domain.contains(p)? || h.len() != p.len() {
        return Err(SgmError::Usage(
            "neighbourhood centre outside the box".into(),
        ));
    }
    Ok(moore_offsets(p.len())
        .into_iter()
        .map(|d| {
            Point::from(
                p.iter()
                    .zip(&d)
                    .zip(h)
                    .map(|((x, &di), hi)| x + di as f64 * hi)
                    .collect::<Vec<_>>(),
            )
        })
        .filter(|q| domain.contains_unchecked(q))
        .collect())
}

/// Best point among `p` and its neighbourhood, and the step `d = c - p`
/// towards it. `p` wins ties, then earlier neighbours win.
pub fn best_neighbor(ev: &mut Evaluator<'_>, p: &[f64], h: &[f64]) -> Result<(Point, Point)> {
    let domain = ev.domain();
    let sense = ev.sense();
    let mut best = Point::from(p);
    let mut best_v = ev.eval_cached(p)?;
    for q in neighborhood(p, h, domain)? {
        let v = ev.eval_cached(&q)?;
        if sense.better(v, best_v) {
            best = q;
            best_v = v;
        }
    }
    let d = best.iter().zip(p).map(|(c, x)| c - x).collect::<Vec<_>>();
    Ok((best, Point::from(d)))
}

/// 0 when no component is negative, else the largest 1-based index of a
/// negative component.
pub fn label_by_direction(d: &[f64]) -> usize {
    d.iter().rposition(|&x| x < 0.0).map_or(0, |i| i + 1)
}

/// 0 when no component is negative, else the smallest 1-based index of a
/// negative component.
pub fn label_by_gradient(w: &[f64]) -> usize {
    d_first_negative(w).map_or(0, |i| i + 1)
}

fn d_first_negative(w: &[f64]) -> Option<usize> {
    w.iter().position(|&x| x < 0.0)
}

/// Whether `labels` (one per corner of an `n`-cell) cover `0..=n`.
pub fn is_completely_labeled(labels: &[usize], n: usize) -> Result<bool> {
    if n >= 64 || labels.len() as u128 != 1u128 << n {
        return Err(SgmError::Usage(format!(
            "{} labels supplied for a {n}-dimensional cell",
            labels.len()
        )));
    }
    Ok(covers(labels, n))
}

fn covers(labels: &[usize], n: usize) -> bool {
    distinct(labels, n) == n + 1
}

fn distinct(labels: &[usize], n: usize) -> usize {
    let mut seen = vec![false; n + 1];
    for &l in labels {
        if l <= n {
            seen[l] = true;
        }
    }
    seen.into_iter().filter(|&s| s).count()
}

/// The `2^n` halves of `cell`, ordered by child index (bit `i` set means the
/// upper half on axis `i`).
pub fn subdivide(cell: &GridCell, domain: &BoxDomain) -> Result<Vec<GridCell>> {
    if cell.level >= MAX_LEVEL {
        return Err(SgmError::RefinementLimit { level: cell.level });
    }
    let n = cell.dim();
    if n > 20 {
        return Err(SgmError::Usage(format!(
            "full subdivision of a {n}-dimensional cell is not supported"
        )));
    }
    Ok((0..1u64 << n)
        .map(|bits| child(cell, domain, bits))
        .collect())
}

fn child(cell: &GridCell, domain: &BoxDomain, bits: u64) -> GridCell {
    let rel = cell
        .rel
        .iter()
        .enumerate()
        .map(|(i, &k)| 2 * k + ((bits >> i) & 1))
        .collect();
    GridCell::at(domain, rel, cell.level + 1)
}

/// The half of `cell` facing `target`, ties going to the upper half.
fn child_towards(cell: &GridCell, domain: &BoxDomain, target: &[f64]) -> GridCell {
    let mid_rel: Vec<u64> = cell.rel.iter().map(|k| 2 * k + 1).collect();
    let mid = domain.lattice_point(&mid_rel, cell.level + 1);
    let bits = (0..cell.dim())
        .filter(|&i| target[i] >= mid[i])
        .fold(0u64, |b, i| b | 1 << i);
    child(cell, domain, bits)
}

#[derive(Debug, Clone)]
struct VertexInfo {
    label: usize,
    value: f64,
}

/// Labels lattice vertices, caching by `(level, k)`. Neighbours are taken one
/// level finer than the vertex.
struct Labeler<'c> {
    config: &'c SgmConfig,
    offsets: Vec<Vec<i64>>,
    cache: HashMap<(u32, Vec<u64>), VertexInfo>,
}

impl Labeler<'_> {
    /// Best lattice neighbour at `level + 1` of vertex `k` (at `level`).
    fn best_lattice_neighbor(
        &self,
        ev: &mut Evaluator<'_>,
        k: &[u64],
        level: u32,
    ) -> Result<Option<(Vec<u64>, f64)>> {
        let domain = ev.domain();
        let sense = ev.sense();
        let fine = level + 1;
        let top = 1i64 << fine;
        let centre: Vec<i64> = k.iter().map(|&x| 2 * x as i64).collect();
        let p = domain.lattice_point(k, level);
        let mut best_v = ev.eval_cached(&p)?;
        let mut best: Option<Vec<u64>> = None;
        for d in &self.offsets {
            let q: Vec<i64> = centre.iter().zip(d).map(|(c, di)| c + di).collect();
            if q.iter().any(|&x| x < 0 || x > top) {
                continue;
            }
            let q: Vec<u64> = q.into_iter().map(|x| x as u64).collect();
            let v = ev.eval_cached(&domain.lattice_point(&q, fine))?;
            if sense.better(v, best_v) {
                best_v = v;
                best = Some(q);
            }
        }
        Ok(best.map(|q| (q, best_v)))
    }

    /// Labels vertex `k` at `level`. When the MR draw fires, the vertex's best
    /// neighbour (if it differs from the vertex) is pushed to `offspring`
    /// with its value.
    fn label(
        &mut self,
        ev: &mut Evaluator<'_>,
        k: &[u64],
        level: u32,
        offspring: &mut Vec<(Vec<u64>, f64)>,
    ) -> Result<VertexInfo> {
        let key = (level, k.to_vec());
        if let Some(info) = self.cache.get(&key) {
            return Ok(info.clone());
        }
        let domain = ev.domain();
        let p = domain.lattice_point(k, level);
        let value = ev.eval_cached(&p)?;
        let mut nb = None;
        let label = match self.config.labeling {
            Labeling::BestNeighbor => {
                let best = self.best_lattice_neighbor(ev, k, level)?;
                let label = match &best {
                    None => 0,
                    Some((q, _)) => {
                        let d: Vec<f64> = q
                            .iter()
                            .zip(k)
                            .map(|(&a, &b)| a as f64 - 2.0 * b as f64)
                            .collect();
                        label_by_direction(&d)
                    }
                };
                nb = Some(best);
                label
            }
            Labeling::Gradient => {
                let step: Vec<f64> = (0..k.len()).map(|i| domain.step_at(i, level)).collect();
                let nudged: Vec<f64> = p
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        if x <= domain.lo()[i] {
                            x + 1e-9 * step[i]
                        } else if x >= domain.hi()[i] {
                            x - 1e-9 * step[i]
                        } else {
                            x
                        }
                    })
                    .collect();
                label_by_gradient(&ev.objective().gradient(&nudged)?)
            }
        };
        if ev.rng().bernoulli(self.config.mutation_rate) {
            let best = match nb {
                Some(b) => b,
                None => self.best_lattice_neighbor(ev, k, level)?,
            };
            if let Some(o) = best {
                offspring.push(o);
            }
        }
        let info = VertexInfo { label, value };
        self.cache.insert(key, info.clone());
        Ok(info)
    }
}

/// Runs phase 1 with the default (no-op) trace sink.
pub fn run_phase1(ev: &mut Evaluator<'_>, config: &SgmConfig) -> Result<Phase1Outcome> {
    run_phase1_traced(ev, config, &mut |_| {})
}

/// Runs `config.tf_rounds` rounds of label, select, subdivide.
///
/// A round labels every corner of every candidate cell, selects the first
/// completely labeled candidate (or, failing that, the one with the most
/// distinct labels, ties to the best vertex value) and replaces the
/// candidates with its children plus one cell per MR offspring that lies
/// outside the selection and beats its best vertex. Running out of budget
/// returns the last selected cell with `complete = false`; configuration
/// errors (such as a missing gradient) are returned as errors.
pub fn run_phase1_traced(
    ev: &mut Evaluator<'_>,
    config: &SgmConfig,
    sink: &mut dyn FnMut(&Phase1Snapshot),
) -> Result<Phase1Outcome> {
    let domain = ev.domain();
    let n = domain.dim();
    let patterns = corner_patterns(n)?;
    let full = n <= FULL_ENUMERATION_MAX_DIM;
    let mut labeler = Labeler {
        config,
        offsets: moore_offsets(n),
        cache: HashMap::new(),
    };
    let mut cands = vec![initial_cell(domain)];
    let mut last: Option<Phase1Outcome> = None;
    let mut round = 0u32;

    loop {
        let mut offspring = Vec::new();
        let mut labeled = Vec::with_capacity(cands.len());
        let mut cut_short = None;
        'cells: for cell in &cands {
            let mut verts = Vec::with_capacity(patterns.len());
            for &bits in &patterns {
                let k = cell.corner_rel(bits);
                match labeler.label(ev, &k, cell.level, &mut offspring) {
                    Ok(info) => verts.push(LabeledVertex {
                        point: domain.lattice_point(&k, cell.level),
                        rel: k,
                        label: info.label,
                        value: info.value,
                    }),
                    Err(e) => {
                        cut_short = Some(e);
                        break 'cells;
                    }
                }
            }
            labeled.push((cell.clone(), verts));
        }
        if let Some(e) = cut_short {
            if !e.is_budget() {
                return Err(e);
            }
            return Ok(truncated(last, domain, ev.count()));
        }

        let sense = ev.sense();
        let labels_of = |v: &[LabeledVertex]| v.iter().map(|x| x.label).collect::<Vec<_>>();
        let best_value = |v: &[LabeledVertex]| {
            v.iter()
                .map(|x| x.value)
                .min_by(|a, b| sense.key(*a).total_cmp(&sense.key(*b)))
                .unwrap_or(f64::NAN)
        };
        let (selected, complete) = match labeled.iter().position(|(_, v)| covers(&labels_of(v), n))
        {
            Some(i) => (i, true),
            None => {
                let mut pick = 0;
                for i in 1..labeled.len() {
                    let (di, dp) = (
                        distinct(&labels_of(&labeled[i].1), n),
                        distinct(&labels_of(&labeled[pick].1), n),
                    );
                    let better_value =
                        sense.better(best_value(&labeled[i].1), best_value(&labeled[pick].1));
                    if di > dp || (di == dp && better_value) {
                        pick = i;
                    }
                }
                (pick, false)
            }
        };
        sink(&Phase1Snapshot {
            round,
            candidates: labeled.clone(),
            selected,
            complete,
        });
        let (cell, vertices) = labeled.swap_remove(selected);
        let outcome = Phase1Outcome {
            cell,
            vertices,
            evaluations: ev.count(),
            rounds_completed: round,
            complete,
        };
        if round >= config.tf_rounds || outcome.cell.level >= MAX_LEVEL {
            return Ok(outcome);
        }

        let chosen = &outcome.cell;
        let chosen_best = best_value(&outcome.vertices);
        let children = if full {
            subdivide(chosen, domain)?
        } else {
            let target = ev
                .best()
                .map(|(p, _)| p.clone())
                .unwrap_or_else(|| chosen.base.clone());
            vec![child_towards(chosen, domain, &target)]
        };
        let cap = children.len();
        let fine = chosen.level + 1;
        let top = 1u64 << fine;
        let mut seen: HashSet<Vec<u64>> = children.iter().map(|c| c.rel.clone()).collect();
        let mut extra = Vec::new();
        for (q, v) in offspring {
            if extra.len() >= cap {
                break;
            }
            if !sense.better(v, chosen_best) || chosen.contains_rel(&q, fine) {
                continue;
            }
            let rel: Vec<u64> = q.iter().map(|&x| x.min(top - 1)).collect();
            if seen.insert(rel.clone()) {
                extra.push(GridCell::at(domain, rel, fine));
            }
        }
        cands = children;
        cands.extend(extra);
        last = Some(outcome);
        round += 1;
    }
}

fn truncated(last: Option<Phase1Outcome>, domain: &BoxDomain, evaluations: u64) -> Phase1Outcome {
    match last {
        Some(mut o) => {
            o.complete = false;
            o.evaluations = evaluations;
            o
        }
        None => Phase1Outcome {
            cell: initial_cell(domain),
            vertices: Vec::new(),
            evaluations,
            rounds_completed: 0,
            complete: false,
        },
    }
}
