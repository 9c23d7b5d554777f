//! Prints the carrier size, unit group and stability table of a ring.
//!
//! ```text
//! cargo run --example ring_info -- poly:zmod:3:x:x^2+1
//! ```

use milnor_tangent::cli::ring_info;
use milnor_tangent::ring::Ring;
use milnor_tangent::Limits;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "zmod:7".into());
    let ring = Ring::parse(&spec, Limits::default().carrier_cap)?;
    let info = ring_info(&ring);

    println!(
        "{}: {} elements, {} units, characteristic {}",
        info.ring, info.size, info.units, info.characteristic
    );
    println!("unit group {}", info.unit_group);
    println!("1/2 in ring: {}", info.has_half);
    for row in &info.stability {
        println!("  k = {}: weak {:<5} full {}", row.k, row.weak, row.full);
    }

    // a few elements and their inverses
    for x in ring.elements().take(6) {
        match ring.try_invert(x) {
            Some(y) => println!("  ({}) * ({}) = 1", ring.format(x), ring.format(y)),
            None => println!("  {} is not a unit", ring.format(x)),
        }
    }
    Ok(())
}
