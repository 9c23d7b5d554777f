//! Presentations of `Ω^n_R`, the units-only comparison and the splitting of
//! `Ω^{n+1}` of the dual numbers.
//!
//! ```text
//! cargo run --example kahler_differentials -- poly:zmod:7:t:t^2 1
//! ```

use milnor_tangent::differentials::{
    compare_policies, tangent_decomposition, GeneratorPolicy, OmegaGroup,
};
use milnor_tangent::ring::Ring;
use milnor_tangent::Limits;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let spec = args.next().unwrap_or_else(|| "poly:zmod:7:t:t^2".into());
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let limits = Limits::default();
    let ring = Ring::parse(&spec, limits.carrier_cap)?;

    for k in 0..=n + 1 {
        let omega = OmegaGroup::new(ring.clone(), k, GeneratorPolicy::AllElements)?;
        println!(
            "Omega^{k} of {spec}: {} ({} generators)",
            omega.group().invariant_factors(),
            omega.generator_count()
        );
    }

    if n > 0 {
        let omega = OmegaGroup::new(ring.clone(), 1, GeneratorPolicy::AllElements)?;
        let t = ring.additive_basis().last().copied().unwrap_or(ring.one());
        let w = omega.form(ring.from_int(2), &[t])?;
        println!(
            "2 d{} has normal form {:?}",
            ring.format(t),
            omega.group().normal_form(&w)?
        );
    }

    match compare_policies(ring.clone(), n) {
        Ok(c) => println!("units-only presentation agrees: {}", c.is_isomorphism()),
        Err(e) => println!("units-only presentation unavailable: {e}"),
    }

    if ring.has_half() {
        let dual = ring.dual_numbers(limits.carrier_cap)?;
        let d = tangent_decomposition(ring.clone(), dual, n, limits.generator_bound)?;
        println!(
            "Omega^{} of R[e] = {}  vs  {} + {} + {}: iso {}",
            n + 1,
            d.dual_omega.group().invariant_factors(),
            d.omega_top.group().invariant_factors(),
            d.omega_top.group().invariant_factors(),
            d.omega_low.group().invariant_factors(),
            d.combined.is_isomorphism()
        );
    }
    Ok(())
}
