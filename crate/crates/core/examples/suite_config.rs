//! Prints the default suite configuration, then runs one study from an
//! overridden copy and writes its CSV and summary to a temporary directory.
//!
//! cargo run --release --example suite_config > configs/default.json

use evopagator::experiments::output::write_outputs;
use evopagator::experiments::{run_study, StudyKind, SuiteConfig};

fn main() -> evopagator::Result<()> {
    let defaults = SuiteConfig::default();
    println!("{}", serde_json::to_string_pretty(&defaults).expect("config serialises"));

    let cfg = SuiteConfig::load(None, &["converge.max_level=8".into(), "seed=1".into()])?;
    let outcome = run_study(StudyKind::Converge, &cfg)?;
    let dir = std::env::temp_dir().join("evopagator-example");
    let summary = write_outputs(&dir, &cfg, &[outcome], false)?;
    eprintln!("wrote {}", summary.display());
    Ok(())
}
