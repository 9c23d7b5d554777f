//! Milnor K-groups, symbols and the tangent group `TK_n`.
//!
//! ```text
//! cargo run --example milnor_k -- poly:zmod:7:t:t^2 2
//! ```

use milnor_tangent::milnor::{KGroup, TangentK};
use milnor_tangent::ring::Ring;
use milnor_tangent::Limits;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let spec = args.next().unwrap_or_else(|| "zmod:7".into());
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let limits = Limits::default();
    let ring = Ring::parse(&spec, limits.carrier_cap)?;

    for k in 0..=n {
        let kg = KGroup::new(ring.clone(), k)?;
        println!("K_{k}({spec}) = {}", kg.group().invariant_factors());
    }

    let k2 = KGroup::new(ring.clone(), 2)?;
    let u = ring.units()[ring.units().len() - 1];
    let w = k2.symbol(&[u, ring.neg(u)])?;
    println!(
        "{{{}, {}}} is zero: {}",
        ring.format(u),
        ring.format(ring.neg(u)),
        k2.group().is_zero(&w)?
    );

    let dual = ring.dual_numbers(limits.carrier_cap)?;
    for k in 1..=n {
        let tk = TangentK::new(ring.clone(), dual.clone(), k, limits.tensor_bound)?;
        println!(
            "TK_{k} = {}  (split holds: {})",
            tk.group().invariant_factors(),
            tk.decomposition_holds()
        );
        if k == 1 {
            let s = ring.from_int(3);
            let v = tk.special_symbol(s, &[])?;
            println!(
                "  {{1 + 3e}} has TK coordinates {:?}",
                tk.group().normal_form(&v)?
            );
        }
    }
    Ok(())
}
