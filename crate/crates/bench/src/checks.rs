//! Self-checks behind `sgm-bench validate`.

use sgm::baselines::{png_ratio, reference_row, DE_ROW, PUBLISHED_PNG, SGM_ROW};
use sgm::subdivision::{initial_cell, run_phase1, subdivide};
use sgm::testbed::{foxholes_matrix, gradient_check};
use sgm::{make_objective, BoxDomain, Evaluator, RngStream, Sense, SgmConfig};

/// Root labels on TP1 over `[-1,1]^2`, in corner order.
pub const ROOT_LABELS: [([f64; 2], usize); 4] = [
    ([-1.0, -1.0], 0),
    ([1.0, -1.0], 1),
    ([-1.0, 1.0], 2),
    ([1.0, 1.0], 2),
];

pub const GRADIENT_FUNCTIONS: [&str; 4] = ["TP1", "BEALE", "F1", "F2"];
pub const GRADIENT_TOLERANCE: f64 = 1e-4;
pub const GRADIENT_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct LabelingOracle {
    pub labels: Vec<(Vec<f64>, usize)>,
    pub complete: bool,
    /// Whether bisecting the root cell puts a vertex at the origin.
    pub origin_introduced: bool,
}

impl LabelingOracle {
    pub fn matches(&self) -> bool {
        let want: Vec<(Vec<f64>, usize)> =
            ROOT_LABELS.iter().map(|(p, l)| (p.to_vec(), *l)).collect();
        self.labels == want && self.complete && self.origin_introduced
    }
}

/// Labels the root cell of TP1 on `[-1,1]^2` with best-neighbour labeling.
pub fn labeling_oracle() -> sgm::Result<LabelingOracle> {
    let domain = BoxDomain::cube(2, -1.0, 1.0)?;
    let obj = make_objective("TP1")?.with_domain(domain.clone());
    let mut ev = Evaluator::new(&obj, Sense::Min, 1000, RngStream::new(0, 0));
    let cfg = SgmConfig {
        tf_rounds: 0,
        mutation_rate: 0.0,
        ..SgmConfig::default()
    };
    let out = run_phase1(&mut ev, &cfg)?;
    let origin_introduced = subdivide(&initial_cell(&domain), &domain)?
        .iter()
        .any(|c| (0..4).any(|b| c.corner(&domain, b).iter().all(|v| *v == 0.0)));
    Ok(LabelingOracle {
        labels: out
            .vertices
            .iter()
            .map(|v| (v.point.clone().into_inner(), v.label))
            .collect(),
        complete: out.complete,
        origin_introduced,
    })
}

/// Worst relative analytic-vs-numeric gradient error per function.
pub fn gradient_errors(seed: u64) -> sgm::Result<Vec<(&'static str, f64)>> {
    let mut rng = RngStream::new(seed, 0);
    GRADIENT_FUNCTIONS
        .iter()
        .map(|name| {
            Ok((
                *name,
                gradient_check(&make_objective(name)?, GRADIENT_SAMPLES, &mut rng)?,
            ))
        })
        .collect()
}

/// PNG row recomputed from the embedded reference rows.
pub fn png_row() -> sgm::Result<Vec<u64>> {
    let de = reference_row(DE_ROW).expect("DE row is embedded");
    let ours = reference_row(SGM_ROW).expect("SGM row is embedded");
    de.gens
        .iter()
        .zip(ours.gens)
        .map(|(d, s)| png_ratio(*d, s))
        .collect()
}

/// Runs every check, returning one `(name, passed, detail)` line each.
pub fn run_all() -> Vec<(String, bool, String)> {
    let mut out = Vec::new();
    match foxholes_matrix().validate() {
        Ok(()) => out.push((
            "foxholes matrix".into(),
            true,
            "25 columns on the 5x5 lattice".into(),
        )),
        Err(e) => out.push(("foxholes matrix".into(), false, e.to_string())),
    }
    match labeling_oracle() {
        Ok(o) => out.push((
            "root labeling".into(),
            o.matches(),
            format!("{:?}", o.labels),
        )),
        Err(e) => out.push(("root labeling".into(), false, e.to_string())),
    }
    match gradient_errors(0) {
        Ok(errs) => {
            for (name, err) in errs {
                let ok = err <= GRADIENT_TOLERANCE;
                out.push((
                    format!("gradient {name}"),
                    ok,
                    format!("max rel err {err:.2e}"),
                ));
            }
        }
        Err(e) => out.push(("gradients".into(), false, e.to_string())),
    }
    match png_row() {
        Ok(row) => out.push(("png row".into(), row == PUBLISHED_PNG, format!("{row:?}"))),
        Err(e) => out.push(("png row".into(), false, e.to_string())),
    }
    out
}
