//! Milnor K-groups `K_n^M(R)` of finite rings and their tangent spaces.
//!
//! `K_n^M(R)` is presented on the tensor basis `g_{i_1}⊗…⊗g_{i_n}` of
//! `(R^*)^{⊗n}`, where `g_1, …, g_t` is an invariant-factor basis of `R^*`.
//! Steinberg relations are expanded through the discrete-log table.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::abelian::{make_hom, FpAbelianGroup, GroupHom, GroupWord};
use crate::differentials::tuples;
use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement, RingMap};

/// Default bound on `t^n`, the number of tensor generators.
pub const DEFAULT_TENSOR_BOUND: usize = 20_000;

/// `R^*` as an abstract abelian group with a discrete-log table.
#[derive(Debug)]
pub struct UnitGroupData {
    ring: Arc<Ring>,
    basis: Vec<RingElement>,
    orders: Vec<u64>,
    /// Exponent vector of each unit, indexed by carrier index.
    table: Vec<Option<Vec<u64>>>,
}

impl UnitGroupData {
    /// Chooses an invariant-factor basis `d_1 | d_2 | …` and tabulates
    /// discrete logs. A cyclic group gets its smallest generator.
    pub fn new(ring: Arc<Ring>) -> UnitGroupData {
        let units = ring.units().to_vec();
        let (basis, orders) = if units.len() == 1 {
            (Vec::new(), Vec::new())
        } else if let Some(&g) = units
            .iter()
            .find(|&&u| ring.unit_order(u) == units.len() as u64)
        {
            (vec![g], vec![units.len() as u64])
        } else {
            invariant_basis(&ring)
        };
        let mut table = vec![None; ring.size()];
        let mut seen = 0usize;
        let mut exps = vec![0u64; orders.len()];
        loop {
            let u = basis
                .iter()
                .zip(&exps)
                .fold(ring.one(), |acc, (&g, &e)| ring.mul(acc, ring.pow(g, e)));
            assert!(table[u.index()].is_none(), "basis is not independent");
            table[u.index()] = Some(exps.clone());
            seen += 1;
            let mut i = 0;
            while i < exps.len() {
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
            if i == exps.len() {
                break;
            }
        }
        assert_eq!(seen, units.len(), "basis does not generate the unit group");
        UnitGroupData {
            ring,
            basis,
            orders,
            table,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn basis(&self) -> &[RingElement] {
        &self.basis
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Exponents `e` with `u = Π g_i^{e_i}`.
    pub fn dlog(&self, u: RingElement) -> Result<&[u64]> {
        self.table[u.index()].as_deref().ok_or(Error::NotAUnit)
    }

    pub fn decode(&self, exps: &[u64]) -> RingElement {
        self.basis
            .iter()
            .zip(exps)
            .fold(self.ring.one(), |acc, (&g, &e)| {
                self.ring.mul(acc, self.ring.pow(g, e))
            })
    }
}

/// Greedy generators in carrier order, then an invariant-factor basis from
/// the Smith form of their relation lattice.
fn invariant_basis(ring: &Ring) -> (Vec<RingElement>, Vec<u64>) {
    let mut gens: Vec<RingElement> = Vec::new();
    let mut members: Vec<(RingElement, Vec<i64>)> = vec![(ring.one(), Vec::new())];
    let mut index: Vec<Option<usize>> = vec![None; ring.size()];
    index[ring.one().index()] = Some(0);
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for &u in ring.units() {
        if index[u.index()].is_some() {
            continue;
        }
        let k = gens.len();
        members.iter_mut().for_each(|(_, v)| v.push(0));
        rows.iter_mut().for_each(|r| r.push(BigInt::from(0)));
        let (mut e, mut x) = (1i64, u);
        while index[x.index()].is_none() {
            x = ring.mul(x, u);
            e += 1;
        }
        let mut row: Vec<BigInt> = members[index[x.index()].unwrap()]
            .1
            .iter()
            .map(|&b| BigInt::from(-b))
            .collect();
        row[k] = BigInt::from(e);
        rows.push(row);
        gens.push(u);
        let old = members.clone();
        let mut power = ring.one();
        for p in 1..e {
            power = ring.mul(power, u);
            for (m, v) in &old {
                let y = ring.mul(*m, power);
                let mut w = v.clone();
                w[k] = p;
                index[y.index()] = Some(members.len());
                members.push((y, w));
            }
        }
    }
    let group = FpAbelianGroup::from_relations(gens.len(), rows);
    let (minimal, words) = group.minimized();
    let orders = minimal.invariant_factors().torsion_u64();
    let gen_orders: Vec<u64> = gens.iter().map(|&g| ring.unit_order(g)).collect();
    let basis = words
        .iter()
        .map(|w| {
            gens.iter()
                .zip(&w.0)
                .zip(&gen_orders)
                .fold(ring.one(), |acc, ((&g, c), &o)| {
                    let e = c.to_i64().unwrap().rem_euclid(o as i64) as u64;
                    ring.mul(acc, ring.pow(g, e))
                })
        })
        .collect();
    (basis, orders)
}

/// `K_n^M(R)` on the tensor basis, with its symbol encoder.
pub struct KGroup {
    units: Arc<UnitGroupData>,
    degree: usize,
    group: Arc<FpAbelianGroup>,
}

impl std::fmt::Debug for KGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KGroup")
            .field("ring", &self.ring().spec().to_string())
            .field("degree", &self.degree)
            .field("group", &self.group)
            .finish()
    }
}

/// Pairs `(r, 1 − r)` of units, as exponent vectors.
fn steinberg_pairs(units: &UnitGroupData) -> Vec<(Vec<u64>, Vec<u64>)> {
    let ring = units.ring();
    ring.units()
        .iter()
        .filter_map(|&r| {
            let s = ring.sub(ring.one(), r);
            Some((units.dlog(r).ok()?.to_vec(), units.dlog(s).ok()?.to_vec()))
        })
        .collect()
}

fn tensor_count(t: usize, n: usize, bound: usize) -> Result<usize> {
    let count = (t as u128).pow(n as u32);
    if count > bound as u128 {
        return Err(Error::TensorTooLarge {
            generators: count,
            bound,
        });
    }
    Ok(count as usize)
}

impl KGroup {
    pub fn new(ring: Arc<Ring>, degree: usize) -> Result<KGroup> {
        Self::with_units(
            Arc::new(UnitGroupData::new(ring)),
            degree,
            DEFAULT_TENSOR_BOUND,
        )
    }

    pub fn with_units(units: Arc<UnitGroupData>, degree: usize, bound: usize) -> Result<KGroup> {
        let t = units.rank();
        let count = tensor_count(t, degree, bound)?;
        let group = if degree == 0 {
            FpAbelianGroup::free(1)
        } else {
            let basis: Vec<Vec<(usize, i64)>> = (0..t).map(|i| vec![(i, 1)]).collect();
            let rows = steinberg_rows(&units, degree, &basis);
            let exponent = units.orders().last().copied().unwrap_or(1);
            FpAbelianGroup::from_sparse_relations(count, rows, exponent)
        };
        Ok(KGroup {
            units,
            degree,
            group: Arc::new(group),
        })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.units.ring()
    }

    pub fn units(&self) -> &Arc<UnitGroupData> {
        &self.units
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn group(&self) -> &Arc<FpAbelianGroup> {
        &self.group
    }

    /// Basis units `(g_{i_1}, …, g_{i_n})` of a tensor generator.
    pub fn generator(&self, index: usize) -> Vec<RingElement> {
        let t = self.units.rank();
        let mut rest = index;
        (0..self.degree)
            .map(|_| {
                let g = self.units.basis()[rest % t];
                rest /= t;
                g
            })
            .collect()
    }

    /// The symbol `{u_1, …, u_n}`.
    pub fn symbol(&self, us: &[RingElement]) -> Result<GroupWord> {
        if us.len() != self.degree {
            return Err(Error::SizeMismatch {
                expected: self.degree,
                got: us.len(),
            });
        }
        let exps: Vec<&[u64]> = us
            .iter()
            .map(|&u| self.units.dlog(u))
            .collect::<Result<_>>()?;
        let t = self.units.rank();
        let mut w = GroupWord::zero(self.group.generators());
        for (idx, tuple) in tuples(self.degree, t).enumerate() {
            let c: u64 = tuple.iter().zip(&exps).map(|(&i, e)| e[i]).product();
            if c != 0 {
                w.add_term(idx, c);
            }
        }
        Ok(w)
    }

    /// The map on `K_n^M` induced by a ring map into `target`'s ring.
    pub fn induced_hom(&self, map: &RingMap, target: &KGroup) -> Result<GroupHom> {
        let images = (0..self.group.generators())
            .map(|i| {
                let us: Vec<RingElement> =
                    self.generator(i).iter().map(|&g| map.apply(g)).collect();
                target.symbol(&us)
            })
            .collect::<Result<Vec<_>>>()?;
        make_hom(self.group.clone(), target.group.clone(), images)
    }
}

/// Order relations plus Steinberg relations for every adjacent slot pair,
/// with the other slots filled by the sparse exponent vectors `fillers`.
fn steinberg_rows(
    units: &UnitGroupData,
    n: usize,
    fillers: &[Vec<(usize, i64)>],
) -> Vec<Vec<(usize, i64)>> {
    let t = units.rank();
    let place = |slots: &[usize]| slots.iter().rev().fold(0, |acc, &i| acc * t + i);
    let mut rows: Vec<Vec<(usize, i64)>> = tuples(n, t)
        .flat_map(|tuple| {
            let idx = place(&tuple);
            tuple
                .iter()
                .map(|&i| vec![(idx, units.orders()[i] as i64)])
                .collect::<Vec<_>>()
        })
        .collect();
    if n < 2 {
        return rows;
    }
    let pairs = steinberg_pairs(units);
    let steinberg: Vec<Vec<(usize, i64)>> = pairs
        .par_iter()
        .flat_map_iter(|(e, f)| {
            let mut out = Vec::new();
            for j in 0..n - 1 {
                for others in tuples(n - 2, fillers.len()) {
                    let mut acc = std::collections::BTreeMap::new();
                    // Expand the other slots, then the pair at (j, j+1).
                    let mut partial: Vec<(Vec<usize>, i64)> = vec![(Vec::new(), 1)];
                    for &o in &others {
                        partial = partial
                            .into_iter()
                            .flat_map(|(v, c)| {
                                fillers[o].iter().map(move |&(i, a)| {
                                    let mut v = v.clone();
                                    v.push(i);
                                    (v, c * a)
                                })
                            })
                            .collect();
                    }
                    for (rest, c) in partial {
                        for (a, &ea) in e.iter().enumerate() {
                            for (b, &fb) in f.iter().enumerate() {
                                let coeff = c * (ea * fb) as i64;
                                if coeff == 0 {
                                    continue;
                                }
                                let mut slots = rest.clone();
                                slots.insert(j, a);
                                slots.insert(j + 1, b);
                                *acc.entry(place(&slots)).or_insert(0) += coeff;
                            }
                        }
                    }
                    out.push(acc.into_iter().filter(|&(_, c)| c != 0).collect());
                }
            }
            out
        })
        .collect();
    let mut seen = HashSet::new();
    rows.extend(
        steinberg
            .into_iter()
            .filter(|r: &Vec<(usize, i64)>| seen.insert(r.clone())),
    );
    rows
}

/// Checks that Steinberg relations with arbitrary units in the untouched
/// slots give the same group as those with basis units only.
pub fn slot_reduction_sound(units: Arc<UnitGroupData>, n: usize, bound: usize) -> Result<bool> {
    let reduced = KGroup::with_units(units.clone(), n, bound)?;
    if n < 3 {
        return Ok(true);
    }
    let all: Vec<Vec<(usize, i64)>> = units
        .ring()
        .units()
        .iter()
        .map(|&u| {
            units
                .dlog(u)
                .unwrap()
                .iter()
                .enumerate()
                .filter(|&(_, &e)| e != 0)
                .map(|(i, &e)| (i, e as i64))
                .collect()
        })
        .collect();
    let rows = steinberg_rows(&units, n, &all);
    let exponent = units.orders().last().copied().unwrap_or(1);
    let full = FpAbelianGroup::from_sparse_relations(reduced.group().generators(), rows, exponent);
    Ok(full.is_isomorphic(reduced.group()))
}

/// `TK^M_{n+1}(R) = ker(K^M_{n+1}(R[ε]) → K^M_{n+1}(R))`.
pub struct TangentK {
    base: Arc<Ring>,
    dual: Arc<Ring>,
    k_dual: KGroup,
    k_base: KGroup,
    augmentation: GroupHom,
    group: Arc<FpAbelianGroup>,
    inclusion: GroupHom,
}

impl std::fmt::Debug for TangentK {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TangentK")
            .field("ring", &self.base.spec().to_string())
            .field("degree", &self.degree())
            .field("group", &self.group)
            .finish()
    }
}

impl TangentK {
    /// `dual` must be the dual numbers over `base`.
    pub fn new(base: Arc<Ring>, dual: Arc<Ring>, degree: usize, bound: usize) -> Result<TangentK> {
        if dual.base().map(|b| b.spec()) != Some(base.spec()) {
            return Err(Error::NotDualRing);
        }
        let k_dual = KGroup::with_units(Arc::new(UnitGroupData::new(dual.clone())), degree, bound)?;
        let k_base = KGroup::with_units(Arc::new(UnitGroupData::new(base.clone())), degree, bound)?;
        let augmentation = k_dual.induced_hom(&dual.augmentation_hom()?, &k_base)?;
        let (group, inclusion) = augmentation.kernel();
        Ok(TangentK {
            base,
            dual,
            k_dual,
            k_base,
            augmentation,
            group,
            inclusion,
        })
    }

    pub fn base(&self) -> &Arc<Ring> {
        &self.base
    }

    pub fn dual(&self) -> &Arc<Ring> {
        &self.dual
    }

    pub fn degree(&self) -> usize {
        self.k_dual.degree()
    }

    pub fn k_dual(&self) -> &KGroup {
        &self.k_dual
    }

    pub fn k_base(&self) -> &KGroup {
        &self.k_base
    }

    pub fn augmentation(&self) -> &GroupHom {
        &self.augmentation
    }

    pub fn group(&self) -> &Arc<FpAbelianGroup> {
        &self.group
    }

    pub fn inclusion(&self) -> &GroupHom {
        &self.inclusion
    }

    /// Whether `K(R[ε]) ≅ K(R) ⊕ TK` by invariant factors.
    pub fn decomposition_holds(&self) -> bool {
        self.k_dual
            .group()
            .is_isomorphic(&self.k_base.group().direct_sum(&self.group))
    }

    /// TK coordinates of a `K(R[ε])` word lying in the kernel.
    pub fn coordinates(&self, w: &GroupWord) -> Result<GroupWord> {
        self.inclusion.preimage(w)?.ok_or(Error::NotInImage)
    }

    /// TK coordinates of the symbol `{u_1, …, u_{n+1}}` of units of `R[ε]`.
    pub fn symbol(&self, us: &[RingElement]) -> Result<GroupWord> {
        self.coordinates(&self.k_dual.symbol(us)?)
    }

    /// The units `1 + s·r_1⋯r_n·ε, r_1, …, r_n` of `R[ε]`.
    pub fn special_units(&self, s: RingElement, rs: &[RingElement]) -> Result<Vec<RingElement>> {
        let b = &self.base;
        let prod = rs.iter().fold(s, |acc, &r| b.mul(acc, r));
        let mut out = vec![self.dual.dual_from_parts(b.one(), prod)?];
        for &r in rs {
            if !b.is_unit(r) {
                return Err(Error::NotAUnit);
            }
            out.push(self.dual.include_base(r)?);
        }
        Ok(out)
    }

    /// TK coordinates of `{1 + s·r_1⋯r_n·ε, r_1, …, r_n}`.
    pub fn special_symbol(&self, s: RingElement, rs: &[RingElement]) -> Result<GroupWord> {
        self.symbol(&self.special_units(s, rs)?)
    }
}

/// The action of `a ∈ R` on TK induced by `ε ↦ aε`.
pub fn scaling_action(tk: &TangentK, a: RingElement) -> Result<GroupHom> {
    let phi = tk
        .k_dual
        .induced_hom(&tk.dual.scaling_endo(a)?, &tk.k_dual)?;
    let images = tk
        .inclusion
        .images()
        .iter()
        .map(|w| tk.coordinates(&phi.apply(w)?))
        .collect::<Result<Vec<_>>>()?;
    make_hom(tk.group.clone(), tk.group.clone(), images)
}

/// Whether the special symbols `{1 + s·r_1⋯r_n·ε, r_1, …, r_n}` (`s ∈ R`,
/// `r_i ∈ R^*`) generate TK. Requires `½ ∈ R` and weak 5-fold stability.
pub fn special_symbol_generation_check(tk: &TangentK) -> Result<bool> {
    if !tk.base.has_half() {
        return Err(Error::NoHalf);
    }
    if !tk.base.check_weak_stability(5).holds {
        return Err(Error::NotStable { k: 5 });
    }
    let n = tk.degree() - 1;
    let units = tk.base.units();
    let mut words = Vec::new();
    for t in tuples(n, units.len()) {
        let rs: Vec<RingElement> = t.iter().map(|&i| units[i]).collect();
        for s in tk.base.elements() {
            words.push(tk.special_symbol(s, &rs)?);
        }
    }
    Ok(tk.group.quotient(&words).is_trivial())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::DEFAULT_CARRIER_CAP;

    fn ring(text: &str) -> Arc<Ring> {
        Ring::parse(text, DEFAULT_CARRIER_CAP).unwrap()
    }

    fn factors(g: &FpAbelianGroup) -> (Vec<u64>, usize) {
        let f = g.invariant_factors();
        (f.torsion_u64(), f.free_rank)
    }

    #[test]
    fn unit_group_examples() {
        let u = UnitGroupData::new(ring("zmod:7"));
        assert_eq!(u.basis(), &[ring("zmod:7").from_int(3)]);
        assert_eq!(u.orders(), &[6]);
        let u = UnitGroupData::new(ring("dual:zmod:7"));
        assert_eq!(u.orders().iter().product::<u64>(), 42);
        let u = UnitGroupData::new(ring("zmod:2"));
        assert!(u.basis().is_empty());
        let u = UnitGroupData::new(ring("zmod:8"));
        assert_eq!(u.orders(), &[2, 2]);
        let u = UnitGroupData::new(ring("poly:zmod:3:t:t^3"));
        assert_eq!(u.orders(), &[3, 6]);
    }

    #[test]
    fn discrete_log_round_trip() {
        for text in ["zmod:15", "dual:poly:zmod:3:x:x^2+1", "poly:zmod:2:t:t^4"] {
            let u = UnitGroupData::new(ring(text));
            for &x in u.ring().units() {
                assert_eq!(u.decode(u.dlog(x).unwrap()), x);
            }
        }
    }

    #[test]
    fn low_degrees() {
        let r = ring("zmod:7");
        assert_eq!(
            factors(KGroup::new(r.clone(), 0).unwrap().group()),
            (vec![], 1)
        );
        assert_eq!(
            factors(KGroup::new(r.clone(), 1).unwrap().group()),
            (vec![6], 0)
        );
        assert_eq!(factors(KGroup::new(r, 2).unwrap().group()), (vec![], 0));
    }

    #[test]
    fn symbol_examples() {
        let r = ring("zmod:7");
        let k = KGroup::new(r.clone(), 2).unwrap();
        let x = r.from_int(3);
        let w = k.symbol(&[x, r.sub(r.one(), x)]).unwrap();
        assert!(k.group().is_zero(&w).unwrap());
        let k1 = KGroup::new(ring("zmod:9"), 2).unwrap();
        let r9 = k1.ring().clone();
        let w = k1.symbol(&[r9.one(), r9.from_int(2)]).unwrap();
        assert!(w.is_formally_zero());
        assert_eq!(k1.symbol(&[r9.from_int(3), r9.one()]), Err(Error::NotAUnit));
    }

    #[test]
    fn tangent_low_degree() {
        let base = ring("zmod:7");
        let dual = base.dual_numbers(DEFAULT_CARRIER_CAP).unwrap();
        let tk = TangentK::new(base.clone(), dual, 1, DEFAULT_TENSOR_BOUND).unwrap();
        assert_eq!(factors(tk.group()), (vec![7], 0));
        assert!(tk.decomposition_holds());
        assert!(special_symbol_generation_check(&tk).unwrap());
        let two = scaling_action(&tk, base.from_int(2)).unwrap();
        for s in base.elements() {
            let v = tk.special_symbol(s, &[]).unwrap();
            let expected = tk
                .special_symbol(base.mul(base.from_int(2), s), &[])
                .unwrap();
            assert!(tk
                .group()
                .words_equal(&two.apply(&v).unwrap(), &expected)
                .unwrap());
        }
        assert!(scaling_action(&tk, base.zero()).unwrap().is_zero_map());
        let id = scaling_action(&tk, base.one()).unwrap();
        assert!(id
            .agrees_with(&GroupHom::identity(tk.group().clone()))
            .unwrap());
    }

    #[test]
    fn slot_reduction_small() {
        for text in ["zmod:8", "zmod:15", "poly:zmod:3:t:t^3"] {
            let u = Arc::new(UnitGroupData::new(ring(text)));
            assert!(
                slot_reduction_sound(u, 3, DEFAULT_TENSOR_BOUND).unwrap(),
                "{text}"
            );
        }
    }

    #[test]
    fn tensor_bound_enforced() {
        let u = Arc::new(UnitGroupData::new(ring("zmod:15")));
        assert!(matches!(
            KGroup::with_units(u, 20, 1000),
            Err(Error::TensorTooLarge { .. })
        ));
    }
}
