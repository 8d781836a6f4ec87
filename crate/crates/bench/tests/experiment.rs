use std::fs;
use std::path::Path;

use sgm_bench::experiment::{is_success, run_spec_file, SVG_DIR};
use sgm_bench::report::{read_trials_csv, summarize, Report, JSON_FILE, SUMMARY_FILE, TRIALS_FILE};
use sgm_bench::{run_experiment, Algorithm, ExperimentSpec};

fn spec_text(out: &Path, extra: &str) -> String {
    format!(
        r#"
        functions = ["TP1", "BEALE", "F1"]
        algorithms = ["SGM", "RS", "SA"]
        trials = 3
        master_seed = 11
        outputs = "{}"
        emit_svg = true
        timing = false
        {extra}
        "#,
        out.display()
    )
}

#[test]
fn spec_file_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let spec_path = dir.path().join("exp.toml");
    fs::write(&spec_path, spec_text(&out, "")).unwrap();
    let report = run_spec_file(&spec_path).unwrap();
    assert_eq!(report.trials.len(), 27);
    assert_eq!(report.summary.len(), 9);

    // Trial rows survive the CSV round trip exactly.
    let mut back = read_trials_csv(&out.join(TRIALS_FILE)).unwrap();
    let spec = ExperimentSpec::load(&spec_path).unwrap();
    for (row, orig) in back.iter_mut().zip(&report.trials) {
        let obj = sgm::make_objective(&row.function).unwrap();
        row.success = is_success(
            &obj,
            &row.best_x,
            row.best_f,
            spec.tolerance_for(&row.function),
        );
        row.sd_vector = orig.sd_vector.clone();
    }
    assert_eq!(back, report.trials);

    // Aggregates are recomputable from the rows.
    assert_eq!(summarize(&back), report.summary);
    let json: Report = serde_json::from_slice(&fs::read(out.join(JSON_FILE)).unwrap()).unwrap();
    assert_eq!(json, report);
    let summary = fs::read_to_string(out.join(SUMMARY_FILE)).unwrap();
    assert!(summary.starts_with(
        "function,algorithm,trials,median_best_f,mean_generations,success_rate,png\n"
    ));
    assert!(summary.contains("F1,SGM,3,"));

    // SVGs for the planar SGM runs only.
    let mut svgs: Vec<String> = fs::read_dir(out.join(SVG_DIR))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    svgs.sort();
    assert_eq!(svgs.len(), 6);
    assert!(svgs
        .iter()
        .all(|s| s.starts_with("BEALE_SGM_") || s.starts_with("TP1_SGM_")));
}

#[test]
fn reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a_dir = dir.path().join("a");
    let b_dir = dir.path().join("b");
    let a = run_experiment(&ExperimentSpec::from_toml(&spec_text(&a_dir, "workers = 1")).unwrap())
        .unwrap();
    let b = run_experiment(&ExperimentSpec::from_toml(&spec_text(&b_dir, "workers = 6")).unwrap())
        .unwrap();
    assert_eq!(a, b);
    for f in [TRIALS_FILE, SUMMARY_FILE, JSON_FILE] {
        assert_eq!(
            fs::read(a_dir.join(f)).unwrap(),
            fs::read(b_dir.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn sgm_solves_tp1_in_every_trial() {
    let dir = tempfile::tempdir().unwrap();
    let report =
        run_experiment(&ExperimentSpec::from_toml(&spec_text(dir.path(), "")).unwrap()).unwrap();
    let tp1 = report
        .summary
        .iter()
        .find(|s| s.function == "TP1" && s.algorithm == Algorithm::Sgm)
        .unwrap();
    assert_eq!(tp1.success_rate, 1.0);
    assert_eq!(tp1.median_best_f, -36.0);
}

#[test]
fn bad_spec_fails_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let text = spec_text(&out, "").replace("\"F1\"]", "\"F1\", \"nope\"]");
    assert!(ExperimentSpec::from_toml(&text).is_err());
    assert!(!out.exists());
}
