//! Points and axis-aligned search boxes.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SgmError};

/// A point in the search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    /// Builds a point, rejecting non-finite coordinates.
    pub fn try_new(coords: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(SgmError::Usage(format!("non-finite coordinate {bad}")));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Max-norm distance to `other`.
    pub fn max_dist(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Closed box `lo[i] <= x[i] <= hi[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lo: Point,
    hi: Point,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(SgmError::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(SgmError::Usage("empty box".into()));
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(SgmError::Usage(format!(
                    "axis {i}: bounds [{a}, {b}] do not form a proper interval"
                )));
            }
        }
        Ok(BoxDomain {
            lo: Point(lo),
            hi: Point(hi),
        })
    }

    /// The same interval `[lo, hi]` on every one of `dim` axes.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn lo(&self) -> &Point {
        &self.lo
    }

    pub fn hi(&self) -> &Point {
        &self.hi
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn extents(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.extent(i)).collect()
    }

    pub fn max_extent(&self) -> f64 {
        self.extents().into_iter().fold(0.0, f64::max)
    }

    fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(SgmError::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(())
    }

    /// Closed-box membership.
    pub fn contains(&self, p: &[f64]) -> Result<bool> {
        self.check_dim(p)?;
        Ok(self.contains_unchecked(p))
    }

    pub(crate) fn contains_unchecked(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    /// Projects each coordinate onto its interval.
    pub fn clamp(&self, p: &[f64]) -> Result<Point> {
        self.check_dim(p)?;
        Ok(Point(
            p.iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .map(|(x, (lo, hi))| x.clamp(*lo, *hi))
                .collect(),
        ))
    }

    /// Grid step on `axis` after `level` bisections. Multiplying by a power
    /// of two keeps this exact.
    pub fn step_at(&self, axis: usize, level: u32) -> f64 {
        self.extent(axis) * pow2_neg(level)
    }

    /// Grid point `lo + k * step_at(level)`.
    pub fn lattice_point(&self, rel: &[u64], level: u32) -> Point {
        Point(
            rel.iter()
                .enumerate()
                .map(|(i, &k)| self.lo[i] + k as f64 * self.step_at(i, level))
                .collect(),
        )
    }
}

pub(crate) fn pow2_neg(level: u32) -> f64 {
    // exact for level <= 1022
    f64::powi(0.5, level as i32)
}
