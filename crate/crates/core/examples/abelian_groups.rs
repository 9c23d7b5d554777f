//! Smith normal form, presented abelian groups and homomorphisms between them.

use milnor_tangent::abelian::{make_hom, smith_normal_form, FpAbelianGroup, GroupWord, IntMatrix};
use std::sync::Arc;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
    let snf = smith_normal_form(&a);
    println!("diagonal of SNF: {:?}", snf.diagonal());
    assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.s);

    // <x, y | 4x = 0, 6y = 0> is Z/2 + Z/12
    let g = Arc::new(FpAbelianGroup::from_matrix(IntMatrix::from_i64(&[
        &[4, 0],
        &[0, 6],
    ])));
    println!("G = {}", g.invariant_factors());

    let x = GroupWord::from_i64(&[1, 0]);
    let y = GroupWord::from_i64(&[0, 1]);
    println!(
        "normal form of 3x + 5y: {:?}",
        g.normal_form(&x.scaled(&3.into()).plus(&y.scaled(&5.into())))?
    );

    // multiplication by 2 on G
    let double = make_hom(
        g.clone(),
        g.clone(),
        vec![x.scaled(&2.into()), y.scaled(&2.into())],
    )?;
    let (ker, _) = double.kernel();
    println!(
        "ker(2) = {}, coker(2) = {}",
        ker.invariant_factors(),
        double.cokernel().invariant_factors()
    );

    // sending x to a generator of Z/3 does not respect 4x = 0
    let z3 = Arc::new(FpAbelianGroup::cyclic(3));
    match make_hom(
        g.clone(),
        z3,
        vec![GroupWord::from_i64(&[1]), GroupWord::from_i64(&[0])],
    ) {
        Ok(_) => println!("unexpectedly well defined"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
