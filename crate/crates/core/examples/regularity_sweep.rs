//! Observed order of the product formula when the time dependence is only
//! Hölder: A(t) = i(σ_z + W_α(2πt)σ_x) with a truncated Weierstrass series.

use evopagator::experiments::{run_regularity_sweep, SuiteConfig};

fn main() -> evopagator::Result<()> {
    let cfg = SuiteConfig::load(None, &["regularity.reference_cells=262144".into()])?;
    let outcome = run_regularity_sweep(&cfg)?;
    for r in outcome.records.iter().filter(|r| r.metric == "observed-order") {
        let label = r.provenance.split(';').next().unwrap_or_default();
        println!("{label:<12} order {:.3}", r.value);
    }
    println!("{}", serde_json::to_string_pretty(&outcome.summary).expect("json"));
    Ok(())
}
