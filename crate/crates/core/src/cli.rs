//! `evopagator` command line.
//!
//! Exit status: 0 when every asserted check holds and outputs were written,
//! 1 on a check violation or a runtime failure, 2 on usage or configuration
//! errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::output::{csv_line, csv_path, write_outputs};
use crate::experiments::{run_study, StudyKind, StudyOutcome, SuiteConfig};

#[derive(Debug, Parser)]
#[command(name = "evopagator", version, about = "Propagator studies for non-autonomous evolution equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolution-system axioms, quasi-contractivity and graph-norm bounds
    Invariants(CommonArgs),
    /// Product-formula convergence against the ODE oracle
    Converge(CommonArgs),
    /// Dyson series versus product formula, truncation certification
    Dyson(CommonArgs),
    /// Observed order as the time regularity drops below Lipschitz
    Regularity(CommonArgs),
    /// Domain-escape indicators for the kink and Weierstrass examples
    Escape(CommonArgs),
    /// Product formula and Dyson series against e^{A0 t}e^{Bt}
    ClosedForm(CommonArgs),
    /// Every study in turn
    All(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON configuration file (defaults apply to missing keys)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override a config key, e.g. `--set converge.max_level=12`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Omit the timestamp from summary.json
    #[arg(long)]
    no_timestamp: bool,
    /// Override the seed
    #[arg(long)]
    seed: Option<u64>,
}

impl Command {
    fn split(self) -> (Vec<StudyKind>, CommonArgs) {
        match self {
            Command::Invariants(a) => (vec![StudyKind::Invariants], a),
            Command::Converge(a) => (vec![StudyKind::Converge], a),
            Command::Dyson(a) => (vec![StudyKind::DysonCompare], a),
            Command::Regularity(a) => (vec![StudyKind::RegularitySweep], a),
            Command::Escape(a) => (vec![StudyKind::DomainEscape], a),
            Command::ClosedForm(a) => (vec![StudyKind::ClosedForm], a),
            Command::All(a) => (StudyKind::ALL.to_vec(), a),
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        _ => 1,
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (kinds, args) = cli.command.split();

    let mut overrides = args.overrides.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    let cfg = match SuiteConfig::load(args.config.as_deref(), &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("evopagator: {e}");
            return exit_code(&e);
        }
    };
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir));

    // a closed stdout (e.g. piped into `head`) must not abort the run
    let mut stdout = std::io::stdout().lock();
    let mut outcomes: Vec<StudyOutcome> = Vec::new();
    for kind in kinds {
        match run_study(kind, &cfg) {
            Ok(o) => {
                let status = if o.passed() { "ok" } else { "VIOLATION" };
                let _ = writeln!(stdout, "{:<17} {status:<9} {} records", kind.id(), o.records.len());
                outcomes.push(o);
            }
            Err(e) => {
                eprintln!("evopagator: study {} aborted: {e}", kind.id());
                return exit_code(&e);
            }
        }
    }

    let summary = match write_outputs(&out_dir, &cfg, &outcomes, !args.no_timestamp) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("evopagator: cannot write outputs: {e}");
            return 1;
        }
    };
    let _ = writeln!(stdout, "summary: {}", summary.display());

    let mut violated = false;
    for o in &outcomes {
        for c in o.failures() {
            violated = true;
            let location = match c.record {
                Some(i) => format!(" at {}:{}", csv_path(&out_dir, o).display(), csv_line(&o.records, i)),
                None => format!(" in {}", csv_path(&out_dir, o).display()),
            };
            eprintln!("violation: {}: {}: {}{location}", o.kind.id(), c.name, c.detail);
        }
    }
    i32::from(violated)
}

#[cfg(test)]
mod tests {
    use std::path::{Path, PathBuf};

    use super::*;

    fn configs() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
    }

    fn summary(dir: &Path) -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
    }

    fn run_in(dir: &Path, args: &[&str]) -> i32 {
        let mut argv = vec!["evopagator"];
        argv.extend_from_slice(args);
        argv.extend_from_slice(&["--out", dir.to_str().unwrap()]);
        run(argv)
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["evopagator", "bogus"]), 2);
        assert_eq!(run(["evopagator", "converge", "--frobnicate"]), 2);
        assert_eq!(run(["evopagator"]), 2);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(run(["evopagator", "--help"]), 0);
    }

    #[test]
    fn config_errors_exit_2_without_output() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["converge", "--set", "converge.nope=1"]), 2);
        assert_eq!(run_in(dir.path(), &["converge", "--set", "converge.max_level=2"]), 2);
        let bad = dir.path().join("bad.json");
        std::fs::write(&bad, r#"{"converge": {"levles": 3}}"#).unwrap();
        assert_eq!(run_in(dir.path(), &["converge", "--config", bad.to_str().unwrap()]), 2);
        assert!(!dir.path().join("summary.json").exists());
    }

    #[test]
    fn invariants_on_constant_families_pass() {
        let dir = tempfile::tempdir().unwrap();
        let code = run_in(
            dir.path(),
            &["invariants", "--set", "invariants.families=0", "--set", "invariants.fixed_samples=10", "--no-timestamp"],
        );
        assert_eq!(code, 0);
        let s = summary(dir.path());
        assert_eq!(s["passed"], true);
        assert!(s.get("timestamp").is_none());
        let csv = std::fs::read_to_string(dir.path().join("invariants.csv")).unwrap();
        assert!(csv.starts_with("study,level,mesh,metric,value,provenance\n"));
    }

    #[test]
    fn escape_on_example_two_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = configs().join("ex2.json");
        assert_eq!(run_in(dir.path(), &["escape", "--config", cfg.to_str().unwrap()]), 0);
        let s = summary(dir.path());
        let flags = &s["studies"]["domain-escape"]["summary"];
        assert_eq!(flags["derivative-energy-growth"], "detected");
        assert_eq!(flags["x-convergence"], "passing");
        assert!(s["timestamp"].is_u64());
    }

    #[test]
    fn violated_check_exits_1() {
        let dir = tempfile::tempdir().unwrap();
        let code = run_in(
            dir.path(),
            &["converge", "--set", "converge.order_band=[1.5,2.5]", "--set", "converge.max_level=8"],
        );
        assert_eq!(code, 1);
        assert_eq!(summary(dir.path())["passed"], false);
        assert_eq!(summary(dir.path())["studies"]["converge"]["checks"][0]["passed"], false);
    }

    #[test]
    fn unwritable_output_exits_1() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let quick = configs().join("quick.json");
        assert_eq!(run_in(&blocker.join("sub"), &["closed-form", "--config", quick.to_str().unwrap()]), 1);
    }

    #[test]
    fn seed_flag_overrides_config() {
        let dir = tempfile::tempdir().unwrap();
        let quick = configs().join("quick.json");
        assert_eq!(run_in(dir.path(), &["closed-form", "--config", quick.to_str().unwrap(), "--seed", "99"]), 0);
        assert_eq!(summary(dir.path())["seed"], 99);
    }
}
