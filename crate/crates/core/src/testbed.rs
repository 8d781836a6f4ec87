//! Benchmark objectives: the trigonometric test problem, Beale, and De Jong's
//! F1 to F5.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Result, SgmError};
use crate::geometry::{BoxDomain, Point};
use crate::objective::{Objective, ObjectiveFn};
use crate::rng::RngStream;

pub const FUNCTION_NAMES: [&str; 7] = ["TP1", "BEALE", "F1", "F2", "F3", "F4", "F5"];

/// Half-width of the default TP1 box. The problem statement gives no bounds;
/// this box holds a few dozen local minima and straddles the origin.
pub const TP1_HALF_WIDTH: f64 = 16.0;

const FOXHOLES_TXT: &str = include_str!("../data/foxholes.txt");
const FOXHOLE_LEVELS: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];

/// The 2x25 Shekel foxholes constants `a[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoxholesMatrix {
    pub a: [[f64; 25]; 2],
}

impl FoxholesMatrix {
    /// Column `j` (0-based) as a point.
    pub fn column(&self, j: usize) -> [f64; 2] {
        [self.a[0][j], self.a[1][j]]
    }

    pub fn validate(&self) -> Result<()> {
        for j in 0..25 {
            let want = [FOXHOLE_LEVELS[j % 5], FOXHOLE_LEVELS[j / 5]];
            if self.column(j) != want {
                return Err(SgmError::Data(format!(
                    "foxholes column {} is {:?}, expected {:?}",
                    j + 1,
                    self.column(j),
                    want
                )));
            }
        }
        if self.a.iter().flatten().any(|v| v.abs() > 65.536) {
            return Err(SgmError::Data(
                "foxholes entry outside [-65.536, 65.536]".into(),
            ));
        }
        Ok(())
    }
}

/// Parses 25 whitespace-separated `a1 a2` rows and checks the invariants.
pub fn parse_foxholes(text: &str) -> Result<FoxholesMatrix> {
    let mut a = [[0.0; 25]; 2];
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if rows.len() != 25 {
        return Err(SgmError::Data(format!(
            "expected 25 foxholes rows, found {}",
            rows.len()
        )));
    }
    for (j, row) in rows.iter().enumerate() {
        let vals: Vec<f64> = row
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| SgmError::Data(format!("foxholes row {}: {e}", j + 1)))
            })
            .collect::<Result<_>>()?;
        if vals.len() != 2 {
            return Err(SgmError::Data(format!(
                "foxholes row {} needs 2 values",
                j + 1
            )));
        }
        a[0][j] = vals[0];
        a[1][j] = vals[1];
    }
    let m = FoxholesMatrix { a };
    m.validate()?;
    Ok(m)
}

/// The embedded constants, parsed and verified once.
pub fn foxholes_matrix() -> &'static FoxholesMatrix {
    static CELL: OnceLock<FoxholesMatrix> = OnceLock::new();
    CELL.get_or_init(|| parse_foxholes(FOXHOLES_TXT).expect("embedded foxholes data is valid"))
}

pub fn eval_tp1(x: &[f64]) -> f64 {
    x[0] * x[0] + x[1] * x[1] - 18.0 * x[0].cos() - 18.0 * x[1].cos()
}

fn grad_tp1(x: &[f64]) -> Vec<f64> {
    vec![
        2.0 * x[0] + 18.0 * x[0].sin(),
        2.0 * x[1] + 18.0 * x[1].sin(),
    ]
}

pub fn eval_beale(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    let t1 = 1.5 - a + a * b;
    let t2 = 2.25 - a + a * b * b;
    let t3 = 2.625 - a + a * b * b * b;
    t1 * t1 + t2 * t2 + t3 * t3
}

fn grad_beale(x: &[f64]) -> Vec<f64> {
    let (a, b) = (x[0], x[1]);
    let t1 = 1.5 - a + a * b;
    let t2 = 2.25 - a + a * b * b;
    let t3 = 2.625 - a + a * b * b * b;
    vec![
        2.0 * t1 * (b - 1.0) + 2.0 * t2 * (b * b - 1.0) + 2.0 * t3 * (b * b * b - 1.0),
        2.0 * t1 * a + 2.0 * t2 * 2.0 * a * b + 2.0 * t3 * 3.0 * a * b * b,
    ]
}

fn f1(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn f2(x: &[f64]) -> f64 {
    let t = x[0] * x[0] - x[1];
    100.0 * t * t + (1.0 - x[0]) * (1.0 - x[0])
}

fn grad_f2(x: &[f64]) -> Vec<f64> {
    let t = x[0] * x[0] - x[1];
    vec![400.0 * t * x[0] - 2.0 * (1.0 - x[0]), -200.0 * t]
}

fn f3(x: &[f64]) -> f64 {
    30.0 + x.iter().map(|v| v.floor()).sum::<f64>()
}

/// Deterministic part of F4: `sum i * x_i^4`.
pub fn f4_deterministic(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v.powi(4))
        .sum()
}

fn f4(x: &[f64], rng: &mut RngStream) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v.powi(4) + rng.gaussian())
        .sum()
}

fn f5(x: &[f64]) -> f64 {
    let m = foxholes_matrix();
    let mut s = 0.002;
    for j in 0..25 {
        let d0 = x[0] - m.a[0][j];
        let d1 = x[1] - m.a[1][j];
        s += 1.0 / ((j + 1) as f64 + d0.powi(6) + d1.powi(6));
    }
    1.0 / s
}

/// Central differences with step `1e-6 * (1 + |x_i|)`.
pub fn central_difference(mut f: impl FnMut(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = 1e-6 * (1.0 + x[i].abs());
            p[i] = x[i] + h;
            let up = f(&p);
            p[i] = x[i] - h;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Largest relative disagreement between `obj`'s gradient and central
/// differences over `samples` uniform points strictly inside the box.
/// Each component is compared as `|a - b| / max(|a|, 1)`.
pub fn gradient_check(obj: &Objective, samples: usize, rng: &mut RngStream) -> Result<f64> {
    let d = obj.domain();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x: Vec<f64> = (0..obj.dim())
            .map(|i| {
                let margin = 1e-3 * d.extent(i);
                rng.uniform_in(d.lo()[i] + margin, d.hi()[i] - margin)
            })
            .collect();
        let analytic = obj.gradient(&x)?;
        let mut scratch = RngStream::new(0, 0);
        let fd = central_difference(|p| obj.eval(p, &mut scratch), &x);
        for (a, b) in analytic.iter().zip(&fd) {
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// De Jong function identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeJong {
    F1,
    F2,
    F3,
    F4,
    F5,
}

impl DeJong {
    pub const ALL: [DeJong; 5] = [DeJong::F1, DeJong::F2, DeJong::F3, DeJong::F4, DeJong::F5];

    pub fn dim(self) -> usize {
        match self {
            DeJong::F1 => 3,
            DeJong::F2 => 2,
            DeJong::F3 => 5,
            DeJong::F4 => 30,
            DeJong::F5 => 2,
        }
    }

    pub fn half_width(self) -> f64 {
        match self {
            DeJong::F1 | DeJong::F3 => 5.12,
            DeJong::F2 => 2.048,
            DeJong::F4 => 1.28,
            DeJong::F5 => 65.536,
        }
    }

    pub fn domain(self) -> BoxDomain {
        let w = self.half_width();
        BoxDomain::cube(self.dim(), -w, w).expect("static bounds are valid")
    }

    pub fn name(self) -> &'static str {
        match self {
            DeJong::F1 => "F1",
            DeJong::F2 => "F2",
            DeJong::F3 => "F3",
            DeJong::F4 => "F4",
            DeJong::F5 => "F5",
        }
    }
}

impl fmt::Display for DeJong {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DeJong {
    type Err = SgmError;

    fn from_str(s: &str) -> Result<Self> {
        DeJong::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| unknown(s))
    }
}

/// Evaluates a De Jong function, rejecting points outside its domain.
/// Only F4 draws from `rng` (one Gaussian per coordinate).
pub fn eval_dejong(id: DeJong, x: &[f64], rng: &mut RngStream) -> Result<f64> {
    let domain = id.domain();
    if !domain.contains(x)? {
        return Err(SgmError::OutOfDomain {
            objective: id.name().into(),
            point: x.to_vec(),
        });
    }
    Ok(match id {
        DeJong::F1 => f1(x),
        DeJong::F2 => f2(x),
        DeJong::F3 => f3(x),
        DeJong::F4 => f4(x, rng),
        DeJong::F5 => f5(x),
    })
}

#[derive(Debug, Clone, Copy)]
enum Builtin {
    Tp1,
    Beale,
    F(DeJong),
}

impl ObjectiveFn for Builtin {
    fn eval(&self, x: &[f64], rng: &mut RngStream) -> f64 {
        match self {
            Builtin::Tp1 => eval_tp1(x),
            Builtin::Beale => eval_beale(x),
            Builtin::F(DeJong::F1) => f1(x),
            Builtin::F(DeJong::F2) => f2(x),
            Builtin::F(DeJong::F3) => f3(x),
            Builtin::F(DeJong::F4) => f4(x, rng),
            Builtin::F(DeJong::F5) => f5(x),
        }
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match self {
            Builtin::Tp1 => Some(grad_tp1(x)),
            Builtin::Beale => Some(grad_beale(x)),
            Builtin::F(DeJong::F1) => Some(x.iter().map(|v| 2.0 * v).collect()),
            Builtin::F(DeJong::F2) => Some(grad_f2(x)),
            Builtin::F(DeJong::F5) => Some(central_difference(f5, x)),
            Builtin::F(DeJong::F3) | Builtin::F(DeJong::F4) => None,
        }
    }
}

fn unknown(name: &str) -> SgmError {
    SgmError::UnknownFunction {
        name: name.into(),
        valid: FUNCTION_NAMES.join(", "),
    }
}

/// Builds a named objective with its default domain and known optimum.
/// Names are case-insensitive.
pub fn make_objective(name: &str) -> Result<Objective> {
    let upper = name.to_ascii_uppercase();
    let obj = match upper.as_str() {
        "TP1" => Objective::new(
            "TP1",
            BoxDomain::cube(2, -TP1_HALF_WIDTH, TP1_HALF_WIDTH)?,
            Builtin::Tp1,
        )
        .with_known_optimum(Point::from([0.0, 0.0]), -36.0),
        "BEALE" => Objective::new("BEALE", BoxDomain::cube(2, -4.5, 4.5)?, Builtin::Beale)
            .with_known_optimum(Point::from([3.0, 0.5]), 0.0),
        _ => {
            let id: DeJong = upper.parse().map_err(|_| unknown(name))?;
            let (opt, value) = match id {
                DeJong::F1 => (Point::zeros(3), 0.0),
                DeJong::F2 => (Point::from([1.0, 1.0]), 0.0),
                DeJong::F3 => (Point::from(vec![-5.12; 5]), 0.0),
                // value of the deterministic part; the returned value is noisy
                DeJong::F4 => (Point::zeros(30), 0.0),
                DeJong::F5 => {
                    let p = Point::from([-32.0, -32.0]);
                    let v = f5(&p);
                    (p, v)
                }
            };
            Objective::new(id.name(), id.domain(), Builtin::F(id))
                .with_known_optimum(opt, value)
                .with_stochastic(id == DeJong::F4)
        }
    };
    Ok(obj)
}
