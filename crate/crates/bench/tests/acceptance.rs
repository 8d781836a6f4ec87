//! Acceptance suite: one PASS/FAIL line per criterion, detail lines indented
//! below it. Exits non-zero when any criterion fails.
//!
//! Every threshold is pinned here; none is derived from the code under test.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use sgm::baselines::{
    png_ratio, random_search, reference_row, simulated_annealing, SaConfig, DE_ROW, SGM_ROW,
};
use sgm::geometry::BoxDomain;
use sgm::refinement::crossover_midpoint;
use sgm::subdivision::{initial_cell, label_by_direction, label_by_gradient, subdivide, MAX_LEVEL};
use sgm::testbed::f4_deterministic;
use sgm::{default_config, make_objective, RngStream, RunResult, SolverHandle};
use sgm_bench::checks::{gradient_errors, labeling_oracle};
use sgm_bench::report::{summary_csv, trials_csv, Report};
use sgm_bench::{run_trials, ExperimentSpec};

const MASTER_SEED: u64 = 2026;

// Criterion 1
const ORACLE_TIME: Duration = Duration::from_millis(1);
// Criterion 2
const TP1_RADIUS: f64 = 1e-3;
const TP1_MAX_EVALS: u64 = 10_000;
const TP1_TIME: Duration = Duration::from_secs(1);
// Criterion 3
const BEALE_RADIUS: f64 = 1e-2;
const BEALE_MAX_F: f64 = 1e-3;
const BEALE_MAX_EVALS: u64 = 10_000;
// Criterion 4
const SUITE_TRIALS: u64 = 50;
const SUITE_RATE: f64 = 0.9;
const SUITE_TIME: Duration = Duration::from_secs(300);
const F1_MAX_F: f64 = 1e-6;
const F1_RADIUS: f64 = 1e-2;
const F2_RADIUS: f64 = 1e-2;
const F4_MAX_DETERMINISTIC: f64 = 1e-2;
const F5_RADIUS: f64 = 1e-1;
const F5_VALUE: f64 = 0.998004;
const F5_VALUE_TOL: f64 = 1e-3;
// Criterion 5
const DE_GENS: [u64; 5] = [260, 670, 125, 2300, 1200];
const SGM_GENS: [u64; 5] = [20, 29, 32, 107, 19];
const PNG: [u64; 5] = [13, 24, 4, 22, 64];
// Criterion 6
const GENERATION_FACTOR: u64 = 10;
// Criterion 7
const CROSSOVER_PAIRS: usize = 1000;
const GRADIENT_REL_TOL: f64 = 1e-4;
// Criterion 8
const RS_SAMPLES: u64 = 100_000;
const RS_MAX_F: f64 = -34.0;
const RS_RATE: f64 = 0.95;
const BASELINE_TRIALS: u64 = 20;
const SA_RADIUS: f64 = 1e-1;
const SA_RATE: f64 = 0.8;

const SUITE: [&str; 5] = ["F1", "F2", "F3", "F4", "F5"];

struct Line {
    ok: bool,
    title: String,
    details: Vec<String>,
}

fn line(ok: bool, title: &str, details: Vec<String>) -> Line {
    Line {
        ok,
        title: title.to_string(),
        details,
    }
}

fn max_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn rate(hits: usize, n: u64) -> f64 {
    hits as f64 / n as f64
}

fn solve_default(name: &str, stream: u64) -> RunResult {
    let obj = make_objective(name).unwrap();
    let mut cfg = default_config(&obj);
    cfg.seed = MASTER_SEED;
    SolverHandle::new(obj, cfg)
        .unwrap()
        .solve_on(RngStream::new(MASTER_SEED, stream))
}

fn monotone(r: &RunResult) -> bool {
    let steps_ok = r
        .trace
        .windows(2)
        .all(|w| w[1].best_value < w[0].best_value);
    let gens_ok = r
        .trace
        .windows(2)
        .all(|w| w[1].generation >= w[0].generation);
    let ends_at_best = r.trace.last().is_some_and(|t| t.best_value == r.best_value);
    steps_ok && gens_ok && ends_at_best
}

fn labeling_oracle_line() -> Line {
    let started = Instant::now();
    let oracle = labeling_oracle();
    let elapsed = started.elapsed();
    match oracle {
        Ok(o) => line(
            o.matches() && elapsed < ORACLE_TIME,
            "1 root labeling on TP1 over [-1,1]^2",
            vec![
                format!("labels {:?}", o.labels),
                format!(
                    "completely labeled {}, origin after bisection {}",
                    o.complete, o.origin_introduced
                ),
                format!("time {elapsed:?} (limit {ORACLE_TIME:?})"),
            ],
        ),
        Err(e) => line(
            false,
            "1 root labeling on TP1 over [-1,1]^2",
            vec![e.to_string()],
        ),
    }
}

fn tp1_line(runs: &mut Vec<RunResult>) -> Line {
    let obj = make_objective("TP1").unwrap();
    let started = Instant::now();
    let r = sgm::solve(&obj, &default_config(&obj)).unwrap();
    let elapsed = started.elapsed();
    let d = max_dist(&r.best_point, &[0.0, 0.0]);
    let ok = d <= TP1_RADIUS && r.evaluations <= TP1_MAX_EVALS && elapsed < TP1_TIME;
    let l = line(
        ok,
        "2 TP1 convergence with defaults",
        vec![format!(
            "best_x {:?}, best_f {}, distance {d:.3e}, evaluations {}, time {elapsed:?}",
            r.best_point.coords(),
            r.best_value,
            r.evaluations
        )],
    );
    runs.push(r);
    l
}

fn beale_line(runs: &mut Vec<RunResult>) -> Line {
    let obj = make_objective("BEALE").unwrap();
    let r = sgm::solve(&obj, &default_config(&obj)).unwrap();
    let d = max_dist(&r.best_point, &[3.0, 0.5]);
    let ok = d <= BEALE_RADIUS && r.best_value <= BEALE_MAX_F && r.evaluations <= BEALE_MAX_EVALS;
    let l = line(
        ok,
        "3 Beale convergence with defaults",
        vec![format!(
            "best_x {:?}, best_f {:.3e}, distance {d:.3e}, evaluations {}",
            r.best_point.coords(),
            r.best_value,
            r.evaluations
        )],
    );
    runs.push(r);
    l
}

/// Whether one De Jong run meets its per-function target.
fn suite_hit(name: &str, r: &RunResult) -> bool {
    match name {
        "F1" => r.best_value <= F1_MAX_F && max_dist(&r.best_point, &[0.0; 3]) <= F1_RADIUS,
        "F2" => max_dist(&r.best_point, &[1.0, 1.0]) <= F2_RADIUS,
        "F3" => r.best_value == 0.0,
        "F4" => f4_deterministic(&r.best_point) <= F4_MAX_DETERMINISTIC,
        "F5" => {
            max_dist(&r.best_point, &[-32.0, -32.0]) <= F5_RADIUS
                && (r.best_value - F5_VALUE).abs() <= F5_VALUE_TOL
        }
        _ => unreachable!(),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn suite_lines(runs: &mut Vec<RunResult>) -> (Line, Line) {
    let started = Instant::now();
    let results: Vec<(&str, Vec<RunResult>)> = SUITE
        .iter()
        .map(|name| {
            let rs = (0..SUITE_TRIALS)
                .into_par_iter()
                .map(|t| solve_default(name, t))
                .collect();
            (*name, rs)
        })
        .collect();
    let elapsed = started.elapsed();

    let mut ok4 = elapsed < SUITE_TIME;
    let mut d4 = Vec::new();
    let mut ok6 = true;
    let mut d6 = Vec::new();
    for (i, (name, rs)) in results.iter().enumerate() {
        let hits = rs.iter().filter(|r| suite_hit(name, r)).count();
        let mut pass = rate(hits, SUITE_TRIALS) >= SUITE_RATE;
        let med = median(rs.iter().map(|r| r.best_value).collect());
        if *name == "F1" {
            pass &= med <= F1_MAX_F;
        }
        let mut detail = format!(
            "{name}: {hits}/{SUITE_TRIALS} on target, median best_f {med:.6e}{}",
            if pass { "" } else { "  <-- below target" }
        );
        if *name == "F4" {
            let mut det: Vec<f64> = rs.iter().map(|r| f4_deterministic(&r.best_point)).collect();
            det.sort_by(f64::total_cmp);
            detail.push_str(&format!(
                "; deterministic part at returned points min {:.3} median {:.3} max {:.3}",
                det[0],
                median(det.clone()),
                det[det.len() - 1]
            ));
        }
        ok4 &= pass;
        d4.push(detail);

        let mean_gens = rs.iter().map(|r| r.generations as f64).sum::<f64>() / SUITE_TRIALS as f64;
        let mean_evals = rs.iter().map(|r| r.evaluations as f64).sum::<f64>() / SUITE_TRIALS as f64;
        let limit = GENERATION_FACTOR * SGM_GENS[i];
        let max_gens = rs.iter().map(|r| r.generations).max().unwrap();
        ok6 &= mean_gens <= limit as f64;
        d6.push(format!(
            "{name}: mean generations {mean_gens:.2} (max {max_gens}, limit {limit}), mean evaluations {mean_evals:.0}"
        ));
    }
    d4.push(format!("suite time {elapsed:?} (limit {SUITE_TIME:?})"));
    for (_, rs) in results {
        runs.extend(rs);
    }
    (
        line(ok4, "4 De Jong suite, 50 trials each, tuned settings", d4),
        line(ok6, "6 generation counts within 10x the published row", d6),
    )
}

fn png_line() -> Line {
    let de = reference_row(DE_ROW).unwrap().gens;
    let ours = reference_row(SGM_ROW).unwrap().gens;
    let row: Vec<u64> = de
        .iter()
        .zip(ours)
        .map(|(d, s)| png_ratio(*d, s).unwrap())
        .collect();
    line(
        de == DE_GENS && ours == SGM_GENS && row == PNG,
        "5 PNG row from the embedded reference rows",
        vec![format!("DE {de:?}, SGM {ours:?}, PNG {row:?}")],
    )
}

fn crossover_ok() -> (bool, String) {
    let mut rng = RngStream::new(MASTER_SEED, 1);
    for _ in 0..CROSSOVER_PAIRS {
        let n = 1 + (rng.uniform() * 6.0) as usize;
        let a: Vec<f64> = (0..n).map(|_| rng.uniform_in(-100.0, 100.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.uniform_in(-100.0, 100.0)).collect();
        let ab = crossover_midpoint(&a, &b).unwrap();
        let ba = crossover_midpoint(&b, &a).unwrap();
        let symmetric = ab == ba;
        let convex = ab
            .iter()
            .zip(a.iter().zip(&b))
            .all(|(m, (x, y))| x.min(*y) <= *m && *m <= x.max(*y));
        if !(symmetric && convex) {
            return (false, format!("crossover fails on {a:?} / {b:?}"));
        }
    }
    (
        true,
        format!("crossover symmetric and convex on {CROSSOVER_PAIRS} pairs"),
    )
}

fn subdivision_ok() -> (bool, String) {
    let domain = BoxDomain::new(vec![-5.12, 0.0, -65.536], vec![5.12, 3.0, 65.536]).unwrap();
    let mut cell = initial_cell(&domain);
    for level in 0..=MAX_LEVEL {
        for (i, s) in cell.step.iter().enumerate() {
            let want = domain.extent(i) / 2f64.powi(level as i32);
            if *s != want {
                return (false, format!("level {level} axis {i}: step {s} vs {want}"));
            }
        }
        match subdivide(&cell, &domain) {
            Ok(children) if level < MAX_LEVEL => cell = children[children.len() / 2].clone(),
            Err(_) if level == MAX_LEVEL => {}
            other => {
                return (
                    false,
                    format!("level {level}: unexpected {:?}", other.map(|c| c.len())),
                )
            }
        }
    }
    (
        true,
        format!("step = extent/2^L exactly for L = 0..={MAX_LEVEL}"),
    )
}

fn labels_ok() -> (bool, String) {
    let mut rng = RngStream::new(MASTER_SEED, 2);
    for n in 1..=8 {
        if label_by_direction(&vec![0.0; n]) != 0 || label_by_gradient(&vec![0.0; n]) != 0 {
            return (
                false,
                format!("zero vector in dimension {n} is not labeled 0"),
            );
        }
        for _ in 0..200 {
            let v: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            if label_by_direction(&v) > n || label_by_gradient(&v) > n {
                return (false, format!("label out of range for {v:?}"));
            }
        }
    }
    (
        true,
        "labels in 0..=n and zero vector gives 0 for both labelings".into(),
    )
}

fn determinism_ok() -> (bool, String) {
    for name in ["TP1", "BEALE", "F2", "F4", "F5"] {
        let a = solve_default(name, 7).without_timing();
        let b = solve_default(name, 7).without_timing();
        let same = a == b
            && a.best_value.to_bits() == b.best_value.to_bits()
            && a.best_point
                .iter()
                .zip(b.best_point.iter())
                .all(|(x, y)| x.to_bits() == y.to_bits());
        if !same {
            return (false, format!("{name}: two runs with one seed differ"));
        }
    }
    (true, "equal seeds give bit-identical results".into())
}

fn concurrency_ok() -> (bool, String) {
    let dir = std::env::temp_dir();
    let spec = |workers: usize| {
        ExperimentSpec::from_toml(&format!(
            r#"
            functions = ["TP1", "BEALE", "F1", "F4", "F5"]
            algorithms = ["SGM", "RS", "SA"]
            trials = 4
            master_seed = {MASTER_SEED}
            outputs = "{}"
            workers = {workers}
            timing = false
            "#,
            dir.display()
        ))
        .unwrap()
    };
    let seq = Report::from_trials(run_trials(&spec(1)).unwrap());
    let par = Report::from_trials(run_trials(&spec(8)).unwrap());
    let same = trials_csv(&seq) == trials_csv(&par) && summary_csv(&seq) == summary_csv(&par);
    (same, format!("1 vs 8 workers: CSV byte-identical {same}"))
}

fn property_line(runs: &[RunResult]) -> Line {
    let mut ok = true;
    let mut details = Vec::new();
    for (pass, detail) in [crossover_ok(), subdivision_ok(), labels_ok()] {
        ok &= pass;
        details.push(detail);
    }
    match gradient_errors(MASTER_SEED) {
        Ok(errs) => {
            for (name, err) in errs {
                ok &= err <= GRADIENT_REL_TOL;
                details.push(format!(
                    "gradient {name}: max relative error {err:.2e} over 100 points"
                ));
            }
        }
        Err(e) => {
            ok = false;
            details.push(e.to_string());
        }
    }
    let bad = runs.iter().filter(|r| !monotone(r)).count();
    ok &= bad == 0;
    details.push(format!(
        "monotone incumbent trace on {} of {} runs",
        runs.len() - bad,
        runs.len()
    ));
    for (pass, detail) in [determinism_ok(), concurrency_ok()] {
        ok &= pass;
        details.push(detail);
    }
    line(ok, "7 property suites", details)
}

fn baseline_line(runs: &mut Vec<RunResult>) -> Line {
    let tp1 = make_objective("TP1").unwrap();
    let beale = make_objective("BEALE").unwrap();
    let rs: Vec<RunResult> = (0..BASELINE_TRIALS)
        .into_par_iter()
        .map(|t| random_search(&tp1, RS_SAMPLES, RngStream::new(MASTER_SEED, t)).unwrap())
        .collect();
    let rs_hits = rs.iter().filter(|r| r.best_value <= RS_MAX_F).count();
    let sa = |obj: &sgm::Objective| -> Vec<RunResult> {
        (0..BASELINE_TRIALS)
            .into_par_iter()
            .map(|t| {
                simulated_annealing(obj, &SaConfig::default(), RngStream::new(MASTER_SEED, t))
                    .unwrap()
            })
            .collect()
    };
    let sa_tp1 = sa(&tp1);
    let sa_beale = sa(&beale);
    let near = |rs: &[RunResult], x: &[f64]| {
        rs.iter()
            .filter(|r| max_dist(&r.best_point, x) <= SA_RADIUS)
            .count()
    };
    let h1 = near(&sa_tp1, &[0.0, 0.0]);
    let h2 = near(&sa_beale, &[3.0, 0.5]);
    let ok = rate(rs_hits, BASELINE_TRIALS) >= RS_RATE
        && rate(h1, BASELINE_TRIALS) >= SA_RATE
        && rate(h2, BASELINE_TRIALS) >= SA_RATE;
    let l = line(
        ok,
        "8 baseline sanity",
        vec![
            format!("RS {RS_SAMPLES} samples on TP1: {rs_hits}/{BASELINE_TRIALS} reach best_f <= {RS_MAX_F}"),
            format!("SA on TP1: {h1}/{BASELINE_TRIALS} within {SA_RADIUS} of (0,0)"),
            format!("SA on BEALE: {h2}/{BASELINE_TRIALS} within {SA_RADIUS} of (3,0.5)"),
        ],
    );
    runs.extend(rs);
    runs.extend(sa_tp1);
    runs.extend(sa_beale);
    l
}

fn main() -> ExitCode {
    let mut runs = Vec::new();
    let c1 = labeling_oracle_line();
    let c2 = tp1_line(&mut runs);
    let c3 = beale_line(&mut runs);
    let (c4, c6) = suite_lines(&mut runs);
    let c5 = png_line();
    let c8 = baseline_line(&mut runs);
    let c7 = property_line(&runs);

    let lines = [c1, c2, c3, c4, c5, c6, c7, c8];
    for l in &lines {
        println!("{} {}", if l.ok { "PASS" } else { "FAIL" }, l.title);
        for d in &l.details {
            println!("    {d}");
        }
    }
    let failed = lines.iter().filter(|l| !l.ok).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        lines.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
