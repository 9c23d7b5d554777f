//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use milnor_tangent::abelian::FpAbelianGroup;
use milnor_tangent::ring::{Ring, RingElement};
use num_bigint::BigInt;

pub fn ring(spec: &str) -> Arc<Ring> {
    Ring::parse(spec, 4096).unwrap()
}

/// All tuples in `0..radix` of length `len`.
pub fn all_tuples(len: usize, radix: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..radix).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// `Ω^n_R` presented on every tuple `s dr_1 ∧ … ∧ dr_n` with `s, r_i ∈ R`.
///
/// Relations: additivity in `s` and in each slot, the Leibniz rule in each
/// slot, and vanishing when two slots agree. Additivity and Leibniz are only
/// imposed against a generating set of `(R, +)`, which suffices because the
/// remaining instances are sums of these.
pub fn omega_full_tuples(r: &Ring, n: usize) -> FpAbelianGroup {
    let size = r.size();
    let gens = size.pow(n as u32 + 1);
    let basis: Vec<RingElement> = r.additive_basis();
    let index = |s: RingElement, rs: &[RingElement]| -> usize {
        let mut i = 0;
        for x in rs.iter().rev() {
            i = i * size + x.index();
        }
        i * size + s.index()
    };
    let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
    let slots = all_tuples(n, size);
    let el = |i: usize| r.element(i);
    for rs in &slots {
        let rs: Vec<RingElement> = rs.iter().map(|&i| el(i)).collect();
        for s in r.elements() {
            for &b in &basis {
                rows.push(vec![
                    (index(r.add(s, b), &rs), 1),
                    (index(s, &rs), -1),
                    (index(b, &rs), -1),
                ]);
            }
        }
        for &s in &basis {
            for i in 0..n {
                for j in i + 1..n {
                    if rs[i] == rs[j] {
                        rows.push(vec![(index(s, &rs), 1)]);
                    }
                }
                for &b in &basis {
                    let mut sum = rs.clone();
                    sum[i] = r.add(rs[i], b);
                    let mut only_b = rs.clone();
                    only_b[i] = b;
                    rows.push(vec![
                        (index(s, &sum), 1),
                        (index(s, &rs), -1),
                        (index(s, &only_b), -1),
                    ]);
                }
                if basis.contains(&rs[i]) {
                    for &b in &basis {
                        let a = rs[i];
                        let mut prod = rs.clone();
                        prod[i] = r.mul(a, b);
                        let mut with_b = rs.clone();
                        with_b[i] = b;
                        rows.push(vec![
                            (index(s, &prod), 1),
                            (index(r.mul(s, a), &with_b), -1),
                            (index(r.mul(s, b), &rs), -1),
                        ]);
                    }
                }
            }
        }
    }
    FpAbelianGroup::from_sparse_relations(gens, rows, r.characteristic() as u64)
}

/// Invariant factors of a finite abelian group given the order of each of
/// its elements. For a prime `p`, the number of cyclic factors whose
/// `p`-part is at least `p^i` is `log_p(N(p^i) / N(p^{i-1}))`, where `N(d)`
/// counts elements killed by `d`.
pub fn factors_from_orders(orders: &[u64]) -> Vec<u64> {
    let killed = |d: u64| orders.iter().filter(|&&o| d.is_multiple_of(o)).count() as u64;
    let exponent = orders.iter().copied().fold(1, num_integer::lcm);
    let mut factors: Vec<u64> = Vec::new();
    let mut e = exponent;
    let mut p = 2;
    while e > 1 {
        if e % p != 0 {
            p += 1;
            continue;
        }
        let mut pk = 1;
        let mut prev = 1;
        while e % p == 0 {
            e /= p;
            pk *= p;
            let ratio = killed(pk) / prev;
            prev *= ratio;
            let mut count = 0;
            let mut x = ratio;
            while x > 1 {
                x /= p;
                count += 1;
            }
            // factors are indexed from the largest, so the first `count`
            // each pick up another `p`
            while factors.len() < count {
                factors.push(1);
            }
            for f in factors.iter_mut().take(count) {
                *f *= p;
            }
        }
    }
    factors.sort_unstable();
    factors
}

pub fn big(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Size of the residue field of a local ring, found as `|R| / |non-units|`.
pub fn residue_field_size(r: &Ring) -> usize {
    r.size() / (r.size() - r.units().len())
}

/// Weak `k`-fold stability straight from the definition.
pub fn weakly_stable_brute(r: &Ring, k: usize) -> bool {
    all_tuples(k - 1, r.size()).into_iter().all(|t| {
        r.units()
            .iter()
            .any(|&u| t.iter().all(|&i| r.is_unit(r.add(r.element(i), u))))
    })
}
