//! Command line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use sgm::baselines::{reference_table, SGM_ROW};
use sgm::{default_config, make_objective, Labeling, SolverHandle};

use crate::checks;
use crate::error::{BenchError, Result};
use crate::experiment::run_spec_file;
use crate::report::format_float;

#[derive(Debug, Parser)]
#[command(
    name = "sgm-bench",
    version,
    about = "Sub-dividing genetic method benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment spec (TOML) and write its reports.
    Run { spec: PathBuf },
    /// Solve one test function and print the result as JSON.
    Solve {
        function: String,
        #[arg(long)]
        tf: Option<u32>,
        #[arg(long)]
        mr: Option<f64>,
        /// Base ray length.
        #[arg(long)]
        rms: Option<f64>,
        #[arg(long)]
        trm: Option<u32>,
        #[arg(long)]
        tc: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        labeling: Option<Labeling>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Print the reference generation counts and the PNG row.
    Tables,
    /// Run the built-in self-checks.
    Validate,
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| BenchError::io("<stdout>", e))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Run { spec } => {
            let report = run_spec_file(&spec)?;
            let mut text = String::new();
            for s in &report.summary {
                text.push_str(&format!(
                    "{} {}: median best_f {}, mean generations {}, success {}\n",
                    s.function,
                    s.algorithm,
                    format_float(s.median_best_f),
                    format_float(s.mean_generations),
                    format_float(s.success_rate),
                ));
            }
            write_out(out, &text)?;
            Ok(true)
        }
        Command::Solve {
            function,
            tf,
            mr,
            rms,
            trm,
            tc,
            seed,
            labeling,
            budget,
        } => {
            let obj = make_objective(&function)?;
            let mut c = default_config(&obj);
            c.tf_rounds = tf.unwrap_or(c.tf_rounds);
            c.mutation_rate = mr.unwrap_or(c.mutation_rate);
            c.alpha_base = rms.unwrap_or(c.alpha_base);
            c.trm_max = trm.unwrap_or(c.trm_max);
            c.tc_max = tc.unwrap_or(c.tc_max);
            c.seed = seed.unwrap_or(c.seed);
            c.labeling = labeling.unwrap_or(c.labeling);
            c.eval_budget = budget.unwrap_or(c.eval_budget);
            let result = SolverHandle::new(obj, c)?.solve();
            let json = serde_json::to_string_pretty(&result).expect("results serialize");
            write_out(out, &format!("{json}\n"))?;
            Ok(true)
        }
        Command::Tables => {
            let mut text = String::from("algorithm,F1,F2,F3,F4,F5\n");
            for row in reference_table() {
                let gens: Vec<String> = row.gens.iter().map(u64::to_string).collect();
                text.push_str(&format!("{},{}\n", row.algorithm, gens.join(",")));
            }
            let png: Vec<String> = checks::png_row()?.iter().map(u64::to_string).collect();
            text.push_str(&format!("PNG (DE / {SGM_ROW}),{}\n", png.join(",")));
            write_out(out, &text)?;
            Ok(true)
        }
        Command::Validate => {
            let mut all = true;
            let mut text = String::new();
            for (name, ok, detail) in checks::run_all() {
                all &= ok;
                let tag = if ok { "ok  " } else { "FAIL" };
                text.push_str(&format!("{tag} {name}: {detail}\n"));
            }
            write_out(out, &text)?;
            Ok(all)
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 1 for usage and configuration problems
/// or a failed self-check, 2 for I/O failures.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                return 1;
            }
            // --help and --version
            let _ = out.write_all(text.as_bytes());
            return 0;
        }
    };
    match execute(cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
