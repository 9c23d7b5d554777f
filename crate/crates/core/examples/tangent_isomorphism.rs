//! Builds `B: TK_{n+1} → Ω^n` and its inverse `F` for a ring and checks that
//! they are mutually inverse.
//!
//! ```text
//! cargo run --example tangent_isomorphism -- poly:zmod:7:t:t^2 1
//! ```

use milnor_tangent::ring::Ring;
use milnor_tangent::tangent::verify_theorem;
use milnor_tangent::Limits;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let spec = args.next().unwrap_or_else(|| "poly:zmod:7:t:t^2".into());
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let limits = Limits::default();
    let ring = Ring::parse(&spec, limits.carrier_cap)?;
    let v = verify_theorem(ring, n, &limits)?;

    println!("ring {}  n = {}", v.ring, n);
    println!(
        "  1/2 in ring: {}  weak 5-fold: {}",
        v.has_half, v.weak_five_fold
    );
    if let (Some(tk), Some(omega)) = (&v.tk, &v.omega) {
        println!("  TK_{}: {}", n + 1, tk);
        println!("  Omega^{}: {}", n, omega);
    }
    for (name, ok) in v.checks() {
        println!("  {name:<20} {ok}");
    }
    println!(
        "  iso {}  status {:?}  ({} ms)",
        v.iso, v.status, v.timing_ms
    );
    if let Some(d) = &v.detail {
        println!("  note: {d}");
    }
    Ok(())
}
