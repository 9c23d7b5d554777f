//! Runs the full verification suite over the default catalog and writes the
//! JSON report to stdout.

use milnor_tangent::cli::{verify_all, Suite, VerifyConfig, DEFAULT_CATALOG};
use milnor_tangent::Limits;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = VerifyConfig {
        rings: DEFAULT_CATALOG.iter().map(|s| s.to_string()).collect(),
        n: 1,
        suite: Suite::All,
        seed: 42,
        samples: 100,
        extended: false,
        limits: Limits::default(),
    };
    let results = verify_all(&cfg)?;
    for r in &results {
        let flags = r.red_flags().count();
        eprintln!(
            "{:<22} TK_{} {:<8} Omega^{} {:<8} red flags {}",
            r.ring,
            r.n + 1,
            r.groups.tk.to_string(),
            r.n,
            r.groups.omega.to_string(),
            flags
        );
    }
    println!("{}", serde_json::to_string_pretty(&results)?);
    Ok(())
}
