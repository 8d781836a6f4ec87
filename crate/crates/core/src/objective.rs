//! Objective functions and counted evaluation.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::config::Sense;
use crate::error::{Result, SgmError};
use crate::geometry::{BoxDomain, Point};
use crate::rng::RngStream;

/// Evaluation contract behind an [`Objective`].
pub trait ObjectiveFn: Send + Sync {
    /// Deterministic functions must ignore `rng`.
    fn eval(&self, x: &[f64], rng: &mut RngStream) -> f64;

    /// Analytic (or otherwise trusted) gradient, when one exists.
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

impl<F> ObjectiveFn for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, x: &[f64], _rng: &mut RngStream) -> f64 {
        self(x)
    }
}

/// A named box-constrained function.
#[derive(Clone)]
pub struct Objective {
    name: String,
    domain: BoxDomain,
    known_optimum: Option<(Point, f64)>,
    stochastic: bool,
    func: Arc<dyn ObjectiveFn>,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("domain", &self.domain)
            .field("known_optimum", &self.known_optimum)
            .field("stochastic", &self.stochastic)
            .finish()
    }
}

impl Objective {
    pub fn new(
        name: impl Into<String>,
        domain: BoxDomain,
        func: impl ObjectiveFn + 'static,
    ) -> Self {
        Objective {
            name: name.into(),
            domain,
            known_optimum: None,
            stochastic: false,
            func: Arc::new(func),
        }
    }

    pub fn with_known_optimum(mut self, point: Point, value: f64) -> Self {
        self.known_optimum = Some((point, value));
        self
    }

    pub fn with_stochastic(mut self, stochastic: bool) -> Self {
        self.stochastic = stochastic;
        self
    }

    pub fn with_domain(mut self, domain: BoxDomain) -> Self {
        self.domain = domain;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn known_optimum(&self) -> Option<&(Point, f64)> {
        self.known_optimum.as_ref()
    }

    pub fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    pub fn has_gradient(&self) -> bool {
        let probe: Vec<f64> = (0..self.dim())
            .map(|i| 0.5 * (self.domain.lo()[i] + self.domain.hi()[i]))
            .collect();
        self.func.gradient(&probe).is_some()
    }

    /// Raw, uncounted evaluation.
    pub fn eval(&self, x: &[f64], rng: &mut RngStream) -> f64 {
        self.func.eval(x, rng)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Point> {
        if x.len() != self.dim() {
            return Err(SgmError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        self.func
            .gradient(x)
            .map(Point::from)
            .ok_or_else(|| SgmError::GradientUnavailable(self.name.clone()))
    }
}

/// Counts evaluations against a budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalCounter {
    count: u64,
    budget: u64,
}

impl EvalCounter {
    pub fn new(budget: u64) -> Self {
        EvalCounter { count: 0, budget }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn remaining(&self) -> u64 {
        self.budget.saturating_sub(self.count)
    }

    pub fn exhausted(&self) -> bool {
        self.count >= self.budget
    }
}

/// Evaluates `obj` at `p`, charging exactly one evaluation to `counter`.
/// The stream is only consumed by stochastic objectives.
pub fn counted_eval(
    obj: &Objective,
    p: &[f64],
    counter: &mut EvalCounter,
    rng: &mut RngStream,
) -> Result<f64> {
    if p.len() != obj.dim() {
        return Err(SgmError::DimensionMismatch {
            expected: obj.dim(),
            got: p.len(),
        });
    }
    if !obj.domain.contains_unchecked(p) {
        return Err(SgmError::OutOfDomain {
            objective: obj.name.clone(),
            point: p.to_vec(),
        });
    }
    if counter.exhausted() {
        return Err(SgmError::BudgetExceeded {
            budget: counter.budget,
        });
    }
    counter.count += 1;
    Ok(obj.eval(p, rng))
}

/// Single-run evaluation context: counter, random stream, fitness cache and
/// best-so-far record, all owned by one solver run.
pub struct Evaluator<'a> {
    objective: &'a Objective,
    sense: Sense,
    counter: EvalCounter,
    rng: RngStream,
    cache: HashMap<Vec<u64>, f64>,
    best: Option<(Point, f64)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(objective: &'a Objective, sense: Sense, budget: u64, rng: RngStream) -> Self {
        Evaluator {
            objective,
            sense,
            counter: EvalCounter::new(budget),
            rng,
            cache: HashMap::new(),
            best: None,
        }
    }

    pub fn objective(&self) -> &'a Objective {
        self.objective
    }

    pub fn domain(&self) -> &'a BoxDomain {
        self.objective.domain()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn count(&self) -> u64 {
        self.counter.count()
    }

    pub fn counter(&self) -> &EvalCounter {
        &self.counter
    }

    pub fn exhausted(&self) -> bool {
        self.counter.exhausted()
    }

    pub fn rng(&mut self) -> &mut RngStream {
        &mut self.rng
    }

    /// Best point seen over every evaluation of this run.
    pub fn best(&self) -> Option<&(Point, f64)> {
        self.best.as_ref()
    }

    /// Counted evaluation, bypassing the cache.
    pub fn eval(&mut self, p: &[f64]) -> Result<f64> {
        let v = counted_eval(self.objective, p, &mut self.counter, &mut self.rng)?;
        self.record(p, v);
        Ok(v)
    }

    /// Counted evaluation with a per-run fitness cache keyed on the exact
    /// coordinates; a cache hit costs no evaluation.
    pub fn eval_cached(&mut self, p: &[f64]) -> Result<f64> {
        let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let v = self.eval(p)?;
        self.cache.insert(key, v);
        Ok(v)
    }

    fn record(&mut self, p: &[f64], v: f64) {
        let better = match &self.best {
            None => true,
            Some((_, b)) => self.sense.better(v, *b),
        };
        if better {
            self.best = Some((Point::from(p), v));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> Objective {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        Objective::new("sphere", BoxDomain::cube(2, -1.0, 1.0).unwrap(), f)
    }

    #[test]
    fn counted_eval_increments_once() {
        let obj = sphere();
        let mut c = EvalCounter::new(10);
        let mut rng = RngStream::new(0, 0);
        assert_eq!(
            counted_eval(&obj, &[0.0, 0.0], &mut c, &mut rng).unwrap(),
            0.0
        );
        assert_eq!(c.count(), 1);
        counted_eval(&obj, &[0.5, 0.5], &mut c, &mut rng).unwrap();
        assert_eq!(c.count(), 2);
    }

    #[test]
    fn budget_exhaustion() {
        let obj = sphere();
        let mut c = EvalCounter::new(1);
        let mut rng = RngStream::new(0, 0);
        counted_eval(&obj, &[0.0, 0.0], &mut c, &mut rng).unwrap();
        let err = counted_eval(&obj, &[0.0, 0.0], &mut c, &mut rng).unwrap_err();
        assert!(err.is_budget());
        assert_eq!(c.count(), 1);
    }

    #[test]
    fn out_of_domain_is_rejected_without_charge() {
        let obj = sphere();
        let mut c = EvalCounter::new(5);
        let mut rng = RngStream::new(0, 0);
        assert!(counted_eval(&obj, &[2.0, 0.0], &mut c, &mut rng).is_err());
        assert_eq!(c.count(), 0);
    }

    #[test]
    fn cache_hits_are_free() {
        let obj = sphere();
        let mut ev = Evaluator::new(&obj, Sense::Min, 100, RngStream::new(0, 0));
        ev.eval_cached(&[0.5, 0.5]).unwrap();
        ev.eval_cached(&[0.5, 0.5]).unwrap();
        assert_eq!(ev.count(), 1);
        ev.eval(&[0.5, 0.5]).unwrap();
        assert_eq!(ev.count(), 2);
    }

    #[test]
    fn tracks_best_for_both_senses() {
        let obj = sphere();
        let mut ev = Evaluator::new(&obj, Sense::Min, 100, RngStream::new(0, 0));
        for p in [[0.5, 0.5], [0.1, 0.0], [1.0, 1.0]] {
            ev.eval(&p).unwrap();
        }
        assert_eq!(ev.best().unwrap().0.coords(), &[0.1, 0.0]);

        let mut ev = Evaluator::new(&obj, Sense::Max, 100, RngStream::new(0, 0));
        for p in [[0.5, 0.5], [0.1, 0.0], [1.0, 1.0]] {
            ev.eval(&p).unwrap();
        }
        assert_eq!(ev.best().unwrap().0.coords(), &[1.0, 1.0]);
    }
}
