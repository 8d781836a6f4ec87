//! Trial rows, aggregates and their CSV/JSON files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgm::baselines::{png_ratio, reference_row, reference_table, ReferenceRow, DE_ROW};

use crate::error::{BenchError, Result};
use crate::spec::Algorithm;

pub const TRIALS_HEADER: [&str; 10] = [
    "function",
    "algorithm",
    "trial",
    "seed",
    "generations",
    "evaluations",
    "best_f",
    "best_x",
    "sd",
    "wallclock_ms",
];

pub const SUMMARY_HEADER: [&str; 7] = [
    "function",
    "algorithm",
    "trials",
    "median_best_f",
    "mean_generations",
    "success_rate",
    "png",
];

pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const JSON_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub function: String,
    pub algorithm: Algorithm,
    pub trial: u32,
    pub seed: u64,
    pub generations: u64,
    pub evaluations: u64,
    pub best_f: f64,
    pub best_x: Vec<f64>,
    /// Max-norm deviation from the known optimum.
    pub sd: Option<f64>,
    pub wallclock_ms: f64,
    /// Componentwise deviation; JSON only.
    #[serde(default)]
    pub sd_vector: Option<Vec<f64>>,
    /// Whether `best_x` lies within the success radius; JSON only.
    #[serde(default)]
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub function: String,
    pub algorithm: Algorithm,
    pub trials: u32,
    pub median_best_f: f64,
    pub mean_generations: f64,
    pub success_rate: f64,
    /// `ceil(DE generations / ceil(mean SGM generations))` for SGM on F1..F5.
    pub png: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub trials: Vec<TrialRow>,
    pub summary: Vec<SummaryRow>,
    /// PNG per function for the SGM rows that have one.
    pub png_row: Vec<(String, u64)>,
    pub reference_table: Vec<ReferenceRow>,
}

impl Report {
    /// Builds the report, deriving every aggregate from `trials`.
    pub fn from_trials(trials: Vec<TrialRow>) -> Self {
        let summary = summarize(&trials);
        let png_row = summary
            .iter()
            .filter_map(|s| s.png.map(|p| (s.function.clone(), p)))
            .collect();
        Report {
            trials,
            summary,
            png_row,
            reference_table: reference_table(),
        }
    }
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn dejong_index(function: &str) -> Option<usize> {
    ["F1", "F2", "F3", "F4", "F5"]
        .iter()
        .position(|f| f.eq_ignore_ascii_case(function))
}

/// One row per (function, algorithm) in first-appearance order.
pub fn summarize(trials: &[TrialRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, Algorithm)> = Vec::new();
    for t in trials {
        let k = (t.function.clone(), t.algorithm);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let de = reference_row(DE_ROW).expect("reference table has a DE row");
    keys.into_iter()
        .map(|(function, algorithm)| {
            let rows: Vec<&TrialRow> = trials
                .iter()
                .filter(|t| t.function == function && t.algorithm == algorithm)
                .collect();
            let n = rows.len() as f64;
            let mut fs: Vec<f64> = rows.iter().map(|t| t.best_f).collect();
            let mean_generations = rows.iter().map(|t| t.generations as f64).sum::<f64>() / n;
            let success_rate = rows.iter().filter(|t| t.success).count() as f64 / n;
            let png = match (algorithm, dejong_index(&function)) {
                (Algorithm::Sgm, Some(i)) => {
                    png_ratio(de.gens[i], mean_generations.ceil() as u64).ok()
                }
                _ => None,
            };
            SummaryRow {
                function,
                algorithm,
                trials: rows.len() as u32,
                median_best_f: median(&mut fs),
                mean_generations,
                success_rate,
                png,
            }
        })
        .collect()
}

/// Decimal with 17 significant digits, trailing zeros trimmed but at least
/// one fractional digit (`0.0`, `0.10000000000000001`, `-36.0`). Very large
/// or small magnitudes use exponent form.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant),
    };
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let body = if !(-7..21).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let tail = if tail.is_empty() { "0" } else { tail };
        format!("{head}.{tail}e{exp}")
    } else if exp < 0 {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            format!("{digits}{}.0", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

pub fn parse_float(s: &str) -> std::result::Result<f64, std::num::ParseFloatError> {
    s.parse()
}

fn format_point(x: &[f64]) -> String {
    x.iter()
        .map(|v| format_float(*v))
        .collect::<Vec<_>>()
        .join(";")
}

fn trial_record(t: &TrialRow) -> [String; 10] {
    [
        t.function.clone(),
        t.algorithm.to_string(),
        t.trial.to_string(),
        t.seed.to_string(),
        t.generations.to_string(),
        t.evaluations.to_string(),
        format_float(t.best_f),
        format_point(&t.best_x),
        t.sd.map(format_float).unwrap_or_default(),
        format_float(t.wallclock_ms),
    ]
}

fn summary_record(s: &SummaryRow) -> [String; 7] {
    [
        s.function.clone(),
        s.algorithm.to_string(),
        s.trials.to_string(),
        format_float(s.median_best_f),
        format_float(s.mean_generations),
        format_float(s.success_rate),
        s.png.map(|p| p.to_string()).unwrap_or_default(),
    ]
}

fn csv_bytes<const N: usize>(
    header: [&str; N],
    records: impl Iterator<Item = [String; N]>,
) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in records {
        w.write_record(&r).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

pub fn trials_csv(report: &Report) -> Vec<u8> {
    csv_bytes(TRIALS_HEADER, report.trials.iter().map(trial_record))
}

pub fn summary_csv(report: &Report) -> Vec<u8> {
    csv_bytes(SUMMARY_HEADER, report.summary.iter().map(summary_record))
}

/// Writes `trials.csv`, `summary.csv` and `report.json` into `dir`. All three
/// are staged as temporary files first and renamed into place only once every
/// write has succeeded.
pub fn write_report(report: &Report, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let json = serde_json::to_vec_pretty(report).map_err(|e| BenchError::Format {
        path: dir.join(JSON_FILE),
        message: e.to_string(),
    })?;
    let files: [(&str, Vec<u8>); 3] = [
        (TRIALS_FILE, trials_csv(report)),
        (SUMMARY_FILE, summary_csv(report)),
        (JSON_FILE, json),
    ];
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let cleanup = |staged: &[(PathBuf, PathBuf)]| {
        for (tmp, _) in staged {
            let _ = fs::remove_file(tmp);
        }
    };
    for (name, bytes) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = fs::write(&tmp, bytes) {
            cleanup(&staged);
            let _ = fs::remove_file(&tmp);
            return Err(BenchError::io(tmp, e));
        }
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, dest) in &staged {
        fs::rename(tmp, dest).map_err(|e| {
            cleanup(&staged);
            BenchError::io(dest, e)
        })?;
    }
    Ok(())
}

/// Reads back a `trials.csv`. JSON-only fields come back as their defaults.
pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRow>> {
    let bad = |message: String| BenchError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => BenchError::io(path, io),
        other => bad(format!("{other:?}")),
    })?;
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(TRIALS_HEADER) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let f = |i: usize| rec[i].to_string();
        let num =
            |i: usize| parse_float(&rec[i]).map_err(|e| bad(format!("{}: {e}", TRIALS_HEADER[i])));
        let int = |i: usize| {
            rec[i]
                .parse::<u64>()
                .map_err(|e| bad(format!("{}: {e}", TRIALS_HEADER[i])))
        };
        let best_x = if rec[7].is_empty() {
            Vec::new()
        } else {
            rec[7]
                .split(';')
                .map(|s| parse_float(s).map_err(|e| bad(format!("best_x: {e}"))))
                .collect::<Result<Vec<_>>>()?
        };
        out.push(TrialRow {
            function: f(0),
            algorithm: f(1).parse()?,
            trial: int(2)? as u32,
            seed: int(3)?,
            generations: int(4)?,
            evaluations: int(5)?,
            best_f: num(6)?,
            best_x,
            sd: if rec[8].is_empty() {
                None
            } else {
                Some(num(8)?)
            },
            wallclock_ms: num(9)?,
            sd_vector: None,
            success: false,
        });
    }
    Ok(out)
}
