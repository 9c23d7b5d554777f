//! Exhaustive and sampled checks of the symbol identities in `K_2` of a ring
//! and of its dual numbers.
//!
//! ```text
//! cargo run --example symbol_identities -- poly:zmod:3:x:x^2+1
//! ```

use milnor_tangent::ring::Ring;
use milnor_tangent::tangent::{
    verify_lemma_cool, verify_lemma_epseps, verify_lemma_morrow, LemmaContext, DEFAULT_SAMPLES,
};
use milnor_tangent::Limits;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "zmod:7".into());
    let limits = Limits::default();
    let ctx = LemmaContext::new(Ring::parse(&spec, limits.carrier_cap)?, &limits)?;

    let mut verdicts = verify_lemma_epseps(&ctx)?;
    for n in 2..=5 {
        verdicts.push(verify_lemma_cool(&ctx, n, 42, DEFAULT_SAMPLES)?);
    }
    verdicts.extend(verify_lemma_morrow(&ctx)?);

    for v in &verdicts {
        println!("{:<22} {:?} {}/{}", v.id, v.status, v.passed, v.cases);
        if let Some(c) = &v.counterexample {
            println!(
                "  first failure {} replays as {:?}",
                c.display,
                ctx.replay(&v.id, &c.inputs)?
            );
        }
    }
    Ok(())
}
