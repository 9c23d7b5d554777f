//! Kähler differentials `Ω^n_R` as finitely presented abelian groups.
//!
//! A generator is a form `s·dr_1∧…∧dr_n`. Under [`GeneratorPolicy::AllElements`]
//! `s` and every `r_i` run over the additive basis of `R` and arbitrary forms
//! are expanded multilinearly; additivity then holds up to the order
//! relations, so only Leibniz and alternating relations on basis tuples are
//! needed. Under [`GeneratorPolicy::UnitsOnly`] the `r_i` run over all units
//! and additivity in the `r_i` slots is imposed through zero-sum unit tuples
//! of length 2 and 3.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::abelian::{make_hom, FpAbelianGroup, GroupHom, GroupWord};
use crate::error::{Error, Result};
use crate::ring::{Ring, RingElement};

/// Default bound on the number of generators of a presentation.
pub const DEFAULT_GENERATOR_BOUND: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorPolicy {
    AllElements,
    UnitsOnly,
}

/// `Ω^n_R` with its generator index and form encoder.
pub struct OmegaGroup {
    ring: Arc<Ring>,
    degree: usize,
    policy: GeneratorPolicy,
    basis: Vec<RingElement>,
    /// Position of each element among the slot values (basis or units).
    slot_position: Vec<Option<usize>>,
    slot_values: Vec<RingElement>,
    group: Arc<FpAbelianGroup>,
}

impl std::fmt::Debug for OmegaGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OmegaGroup")
            .field("ring", &self.ring.spec().to_string())
            .field("degree", &self.degree)
            .field("policy", &self.policy)
            .field("group", &self.group)
            .finish()
    }
}

/// Iterates all tuples of the given length over `0..radix`, first entry
/// fastest.
pub(crate) fn tuples(len: usize, radix: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if radix == 0 && len > 0 {
        0
    } else {
        radix.pow(len as u32)
    };
    (0..total).map(move |mut i| {
        let mut t = Vec::with_capacity(len);
        for _ in 0..len {
            t.push(i % radix);
            i /= radix;
        }
        t
    })
}

/// Sparse accumulator for one relation row.
#[derive(Default)]
struct Row(BTreeMap<usize, i64>);

impl Row {
    fn finish(self) -> Vec<(usize, i64)> {
        self.0.into_iter().filter(|&(_, c)| c != 0).collect()
    }
}

impl OmegaGroup {
    pub fn new(ring: Arc<Ring>, degree: usize, policy: GeneratorPolicy) -> Result<OmegaGroup> {
        Self::with_bound(ring, degree, policy, DEFAULT_GENERATOR_BOUND)
    }

    pub fn with_bound(
        ring: Arc<Ring>,
        degree: usize,
        policy: GeneratorPolicy,
        bound: usize,
    ) -> Result<OmegaGroup> {
        let basis = ring.additive_basis();
        let slot_values: Vec<RingElement> = match policy {
            GeneratorPolicy::AllElements => basis.clone(),
            GeneratorPolicy::UnitsOnly => ring.units().to_vec(),
        };
        let generators = basis.len() as u128 * (slot_values.len() as u128).pow(degree as u32);
        if generators > bound as u128 {
            return Err(Error::CarrierTooLarge {
                size: generators,
                cap: bound,
            });
        }
        let mut slot_position = vec![None; ring.size()];
        for (i, v) in slot_values.iter().enumerate() {
            slot_position[v.index()] = Some(i);
        }
        let mut omega = OmegaGroup {
            ring,
            degree,
            policy,
            basis,
            slot_position,
            slot_values,
            group: Arc::new(FpAbelianGroup::trivial()),
        };
        let rows = match policy {
            GeneratorPolicy::AllElements => omega.all_elements_relations(),
            GeneratorPolicy::UnitsOnly => omega.units_only_relations(),
        };
        omega.group = Arc::new(FpAbelianGroup::from_sparse_relations(
            generators as usize,
            rows,
            omega.ring.characteristic() as u64,
        ));
        Ok(omega)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn policy(&self) -> GeneratorPolicy {
        self.policy
    }

    pub fn group(&self) -> &Arc<FpAbelianGroup> {
        &self.group
    }

    pub fn generator_count(&self) -> usize {
        self.group.generators()
    }

    /// The form `(s; r_1, …, r_n)` behind a generator index.
    pub fn generator(&self, index: usize) -> (RingElement, Vec<RingElement>) {
        let d = self.basis.len();
        let s = self.basis[index % d];
        let mut rest = index / d;
        let k = self.slot_values.len();
        let rs = (0..self.degree)
            .map(|_| {
                let v = self.slot_values[rest % k];
                rest /= k;
                v
            })
            .collect();
        (s, rs)
    }

    fn index_of(&self, j: usize, slots: &[usize]) -> usize {
        let (d, k) = (self.basis.len(), self.slot_values.len());
        let mut idx = 0;
        for &p in slots.iter().rev() {
            idx = idx * k + p;
        }
        j + d * idx
    }

    /// Adds `coeff · s·dr_1∧…∧dr_n`, expanded into generators, to `out`.
    fn push_form(
        &self,
        coeff: i64,
        s: RingElement,
        rs: &[RingElement],
        out: &mut BTreeMap<usize, i64>,
    ) -> Result<()> {
        if rs.len() != self.degree {
            return Err(Error::SizeMismatch {
                expected: self.degree,
                got: rs.len(),
            });
        }
        let nonzero = |x: RingElement| -> Vec<(usize, i64)> {
            self.ring
                .coords(x)
                .into_iter()
                .enumerate()
                .filter(|&(_, c)| c != 0)
                .map(|(k, c)| (k, c as i64))
                .collect()
        };
        let s_terms = nonzero(s);
        let slot_terms: Vec<Vec<(usize, i64)>> = match self.policy {
            GeneratorPolicy::AllElements => rs.iter().map(|&r| nonzero(r)).collect(),
            GeneratorPolicy::UnitsOnly => rs
                .iter()
                .map(|r| {
                    self.slot_position[r.index()]
                        .map(|p| vec![(p, 1)])
                        .ok_or(Error::NotAUnit)
                })
                .collect::<Result<_>>()?,
        };
        if s_terms.is_empty() || slot_terms.iter().any(|t| t.is_empty()) {
            return Ok(());
        }
        let mut choice = vec![0usize; self.degree];
        let mut slots = vec![0usize; self.degree];
        'outer: loop {
            let mut c = coeff;
            for (i, &ch) in choice.iter().enumerate() {
                let (p, a) = slot_terms[i][ch];
                slots[i] = p;
                c *= a;
            }
            if c != 0 {
                for &(j, a) in &s_terms {
                    *out.entry(self.index_of(j, &slots)).or_insert(0) += c * a;
                }
            }
            for i in 0..self.degree {
                choice[i] += 1;
                if choice[i] < slot_terms[i].len() {
                    continue 'outer;
                }
                choice[i] = 0;
            }
            break;
        }
        Ok(())
    }

    /// The word of `s·dr_1∧…∧dr_n`.
    pub fn form(&self, s: RingElement, rs: &[RingElement]) -> Result<GroupWord> {
        let mut acc = BTreeMap::new();
        self.push_form(1, s, rs, &mut acc)?;
        let mut w = GroupWord::zero(self.generator_count());
        for (i, c) in acc {
            w.add_term(i, c);
        }
        Ok(w)
    }

    fn relation(&self, terms: &[(i64, RingElement, Vec<RingElement>)]) -> Vec<(usize, i64)> {
        let mut row = Row::default();
        for (c, s, rs) in terms {
            self.push_form(*c, *s, rs, &mut row.0)
                .expect("relation terms are well formed");
        }
        row.finish()
    }

    fn with_slot(rs: &[RingElement], i: usize, x: RingElement) -> Vec<RingElement> {
        let mut v = rs.to_vec();
        v[i] = x;
        v
    }

    fn all_elements_relations(&self) -> Vec<Vec<(usize, i64)>> {
        let r = &self.ring;
        let (n, d) = (self.degree, self.basis.len());
        let b = &self.basis;
        let mut rows = Vec::new();
        for t in tuples(n, d) {
            let rs: Vec<RingElement> = t.iter().map(|&k| b[k]).collect();
            for &s in b {
                for i in (0..n).filter(|&i| t[i] == 0) {
                    for p in 0..d {
                        for q in p..d {
                            rows.push(self.relation(&[
                                (1, s, Self::with_slot(&rs, i, r.mul(b[p], b[q]))),
                                (-1, r.mul(s, b[p]), Self::with_slot(&rs, i, b[q])),
                                (-1, r.mul(s, b[q]), Self::with_slot(&rs, i, b[p])),
                            ]));
                        }
                    }
                }
                for i in 0..n.saturating_sub(1) {
                    if t[i] == t[i + 1] {
                        rows.push(self.relation(&[(1, s, rs.clone())]));
                    } else {
                        let mut swapped = rs.clone();
                        swapped.swap(i, i + 1);
                        rows.push(self.relation(&[(1, s, rs.clone()), (1, s, swapped)]));
                    }
                }
            }
        }
        rows
    }

    fn units_only_relations(&self) -> Vec<Vec<(usize, i64)>> {
        let r = &self.ring;
        let n = self.degree;
        let units = r.units();
        let k = units.len();
        let mut rows = Vec::new();
        for t in tuples(n, k) {
            let rs: Vec<RingElement> = t.iter().map(|&p| units[p]).collect();
            for &s in &self.basis {
                for (i, &ti) in t.iter().enumerate() {
                    // Slot i is overwritten, so visit each filling of the
                    // other slots once.
                    if ti != 0 {
                        continue;
                    }
                    for (pu, &u) in units.iter().enumerate() {
                        for &v in &units[pu..] {
                            rows.push(self.relation(&[
                                (1, s, Self::with_slot(&rs, i, r.mul(u, v))),
                                (-1, r.mul(s, u), Self::with_slot(&rs, i, v)),
                                (-1, r.mul(s, v), Self::with_slot(&rs, i, u)),
                            ]));
                        }
                        rows.push(self.relation(&[
                            (1, s, Self::with_slot(&rs, i, u)),
                            (1, s, Self::with_slot(&rs, i, r.neg(u))),
                        ]));
                        for &v in &units[pu..] {
                            let w = r.neg(r.add(u, v));
                            if r.is_unit(w) {
                                rows.push(self.relation(&[
                                    (1, s, Self::with_slot(&rs, i, u)),
                                    (1, s, Self::with_slot(&rs, i, v)),
                                    (1, s, Self::with_slot(&rs, i, w)),
                                ]));
                            }
                        }
                    }
                }
                for i in 0..n.saturating_sub(1) {
                    if t[i] == t[i + 1] {
                        rows.push(self.relation(&[(1, s, rs.clone())]));
                    } else {
                        let mut swapped = rs.clone();
                        swapped.swap(i, i + 1);
                        rows.push(self.relation(&[(1, s, rs.clone()), (1, s, swapped)]));
                    }
                }
            }
        }
        rows
    }
}

/// `(u_1⋯u_m)^{-1}·du_1∧…∧du_m` in `omega`.
pub fn dlog_word(omega: &OmegaGroup, units: &[RingElement]) -> Result<GroupWord> {
    let ring = omega.ring();
    let mut s = ring.one();
    for &u in units {
        s = ring.mul(s, ring.try_invert(u).ok_or(Error::NotAUnit)?);
    }
    omega.form(s, units)
}

/// The comparison between the units-only and all-elements presentations of
/// `Ω^n_R`, in both directions.
pub struct PolicyComparison {
    pub units_only: Arc<OmegaGroup>,
    pub all_elements: Arc<OmegaGroup>,
    /// Units-only generators written in the all-elements presentation.
    pub forward: GroupHom,
    /// All-elements generators written through unit sums `b = u + v`.
    pub backward: GroupHom,
}

impl PolicyComparison {
    pub fn is_isomorphism(&self) -> bool {
        self.forward.is_isomorphism()
            && self
                .forward
                .then(&self.backward)
                .and_then(|h| h.agrees_with(&GroupHom::identity(self.units_only.group().clone())))
                .unwrap_or(false)
    }
}

/// Writes `b` as a sum of two units, taking the first unit `r` in carrier
/// order with `b + r` a unit.
fn unit_split(ring: &Ring, b: RingElement) -> Option<(RingElement, RingElement)> {
    ring.units().iter().find_map(|&r| {
        let u = ring.add(b, r);
        ring.is_unit(u).then(|| (u, ring.neg(r)))
    })
}

/// Builds both presentations and the comparison maps. Requires weak 2-fold
/// stability so every element is a sum of two units.
pub fn compare_policies(ring: Arc<Ring>, degree: usize) -> Result<PolicyComparison> {
    compare_policies_bounded(ring, degree, DEFAULT_GENERATOR_BOUND)
}

pub fn compare_policies_bounded(
    ring: Arc<Ring>,
    degree: usize,
    bound: usize,
) -> Result<PolicyComparison> {
    if !ring.check_weak_stability(2).holds {
        return Err(Error::NotStable { k: 2 });
    }
    let units_only = Arc::new(OmegaGroup::with_bound(
        ring.clone(),
        degree,
        GeneratorPolicy::UnitsOnly,
        bound,
    )?);
    let all_elements = Arc::new(OmegaGroup::with_bound(
        ring.clone(),
        degree,
        GeneratorPolicy::AllElements,
        bound,
    )?);
    let forward_images = (0..units_only.generator_count())
        .map(|i| {
            let (s, rs) = units_only.generator(i);
            all_elements.form(s, &rs)
        })
        .collect::<Result<Vec<_>>>()?;
    let forward = make_hom(
        units_only.group().clone(),
        all_elements.group().clone(),
        forward_images,
    )?;
    let backward_images = (0..all_elements.generator_count())
        .map(|i| {
            let (s, rs) = all_elements.generator(i);
            let splits: Vec<[RingElement; 2]> = rs
                .iter()
                .map(|&b| {
                    unit_split(&ring, b)
                        .map(|(u, v)| [u, v])
                        .ok_or(Error::NotStable { k: 2 })
                })
                .collect::<Result<_>>()?;
            let mut w = GroupWord::zero(units_only.generator_count());
            for choice in tuples(degree, 2) {
                let us: Vec<RingElement> = choice
                    .iter()
                    .zip(&splits)
                    .map(|(&c, pair)| pair[c])
                    .collect();
                w = w.plus(&units_only.form(s, &us)?);
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?;
    let backward = make_hom(
        all_elements.group().clone(),
        units_only.group().clone(),
        backward_images,
    )?;
    Ok(PolicyComparison {
        units_only,
        all_elements,
        forward,
        backward,
    })
}

/// Which part of the expansion of a form over `R[ε]` a projection keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Component {
    Plain,
    Eps,
    DEps,
}

/// Expands `s·dω_1∧…∧dω_m` over `R[ε]` with `dω = da + ε·db + b·dε` and
/// pushes the requested component into `target` (over `R`).
fn project_form(
    source: &OmegaGroup,
    target: &OmegaGroup,
    component: Component,
    s: RingElement,
    ws: &[RingElement],
    out: &mut BTreeMap<usize, i64>,
) -> Result<()> {
    let dual = source.ring();
    let base = target.ring();
    let (s0, s1) = dual.dual_parts(s)?;
    let parts: Vec<(RingElement, RingElement)> = ws
        .iter()
        .map(|&w| dual.dual_parts(w))
        .collect::<Result<_>>()?;
    let a: Vec<RingElement> = parts.iter().map(|p| p.0).collect();
    match component {
        Component::Plain => target.push_form(1, s0, &a, out),
        Component::Eps => {
            target.push_form(1, s1, &a, out)?;
            for (i, &(_, b)) in parts.iter().enumerate() {
                let mut v = a.clone();
                v[i] = b;
                target.push_form(1, s0, &v, out)?;
            }
            Ok(())
        }
        Component::DEps => {
            for (i, &(_, b)) in parts.iter().enumerate() {
                let mut v = a.clone();
                v.remove(i);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                target.push_form(sign, base.mul(s0, b), &v, out)?;
            }
            Ok(())
        }
    }
}

fn projection(source: &OmegaGroup, target: &OmegaGroup, component: Component) -> Result<GroupHom> {
    let dual = source.ring();
    let base = dual.base().ok_or(Error::NotDualRing)?;
    if !dual.is_dual() {
        return Err(Error::NotDualRing);
    }
    if !base.has_half() {
        return Err(Error::NoHalf);
    }
    let expected = match component {
        Component::DEps => source.degree().checked_sub(1),
        _ => Some(source.degree()),
    };
    if expected != Some(target.degree()) || target.ring().spec() != base.spec() {
        return Err(Error::SizeMismatch {
            expected: expected.unwrap_or(0),
            got: target.degree(),
        });
    }
    let images = (0..source.generator_count())
        .map(|i| {
            let (s, ws) = source.generator(i);
            let mut acc = BTreeMap::new();
            project_form(source, target, component, s, &ws, &mut acc)?;
            let mut w = GroupWord::zero(target.generator_count());
            for (j, c) in acc {
                w.add_term(j, BigInt::from(c));
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?;
    make_hom(source.group().clone(), target.group().clone(), images)
}

/// `Ω^{n+1}_{R[ε]} → Ω^n_R`, the `dε∧Ω^n_R` component with `dε` moved to
/// the front.
pub fn pi_deps(source: &OmegaGroup, target: &OmegaGroup) -> Result<GroupHom> {
    projection(source, target, Component::DEps)
}

/// `Ω^{n+1}_{R[ε]} → Ω^{n+1}_R`, the `εΩ^{n+1}_R` component.
pub fn pi_eps(source: &OmegaGroup, target: &OmegaGroup) -> Result<GroupHom> {
    projection(source, target, Component::Eps)
}

/// `Ω^{n+1}_{R[ε]} → Ω^{n+1}_R`, the component free of `ε` and `dε`.
pub fn pi_plain(source: &OmegaGroup, target: &OmegaGroup) -> Result<GroupHom> {
    projection(source, target, Component::Plain)
}

/// The three projections out of `Ω^{n+1}_{R[ε]}` and their sum into
/// `Ω^{n+1}_R ⊕ Ω^{n+1}_R ⊕ Ω^n_R`.
pub struct TangentDecomposition {
    pub dual_omega: Arc<OmegaGroup>,
    pub omega_top: Arc<OmegaGroup>,
    pub omega_low: Arc<OmegaGroup>,
    pub plain: GroupHom,
    pub eps: GroupHom,
    pub deps: GroupHom,
    pub combined: GroupHom,
}

/// Builds the projections for `Ω^{n+1}` of the dual numbers over `base`.
pub fn tangent_decomposition(
    base: Arc<Ring>,
    dual: Arc<Ring>,
    n: usize,
    bound: usize,
) -> Result<TangentDecomposition> {
    if dual.base().map(|b| b.spec()) != Some(base.spec()) {
        return Err(Error::NotDualRing);
    }
    let all = GeneratorPolicy::AllElements;
    let dual_omega = Arc::new(OmegaGroup::with_bound(dual, n + 1, all, bound)?);
    let omega_top = Arc::new(OmegaGroup::with_bound(base.clone(), n + 1, all, bound)?);
    let omega_low = Arc::new(OmegaGroup::with_bound(base, n, all, bound)?);
    let plain = pi_plain(&dual_omega, &omega_top)?;
    let eps = pi_eps(&dual_omega, &omega_top)?;
    let deps = pi_deps(&dual_omega, &omega_low)?;
    let sum = Arc::new(
        omega_top
            .group()
            .direct_sum(omega_top.group())
            .direct_sum(omega_low.group()),
    );
    let images = (0..dual_omega.generator_count())
        .map(|i| {
            let mut v = plain.images()[i].0.clone();
            v.extend(eps.images()[i].0.iter().cloned());
            v.extend(deps.images()[i].0.iter().cloned());
            GroupWord(v)
        })
        .collect();
    let combined = make_hom(dual_omega.group().clone(), sum, images)?;
    Ok(TangentDecomposition {
        dual_omega,
        omega_top,
        omega_low,
        plain,
        eps,
        deps,
        combined,
    })
}

/// `dlog` of a unit `u = u_0(1 + rε)` of `R[ε]`, kept as the pair `(u_0, r)`.
///
/// `du/u = du_0/u_0 + ε·dr + r·dε − r²·ε·dε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualUnitDlog {
    pub u0: RingElement,
    pub r: RingElement,
}

impl DualUnitDlog {
    pub fn new(dual: &Ring, u: RingElement) -> Result<DualUnitDlog> {
        let base = dual.base().ok_or(Error::NotDualRing)?;
        let (a, b) = dual.dual_parts(u)?;
        let inv = base.try_invert(a).ok_or(Error::NotAUnit)?;
        Ok(DualUnitDlog {
            u0: a,
            r: base.mul(inv, b),
        })
    }

    pub fn reconstruct(&self, dual: &Ring) -> Result<RingElement> {
        let base = dual.base().ok_or(Error::NotDualRing)?;
        dual.dual_from_parts(self.u0, base.mul(self.u0, self.r))
    }

    /// `du_0/u_0` in `Ω^1_R`.
    pub fn plain(&self, omega1: &OmegaGroup) -> Result<GroupWord> {
        dlog_word(omega1, &[self.u0])
    }

    /// The `ε`-coefficient `dr` in `Ω^1_R`.
    pub fn eps(&self, omega1: &OmegaGroup) -> Result<GroupWord> {
        omega1.form(omega1.ring().one(), &[self.r])
    }

    /// The `dε`-coefficient `r` in `Ω^0_R`.
    pub fn deps(&self, omega0: &OmegaGroup) -> Result<GroupWord> {
        omega0.form(self.r, &[])
    }

    /// The `ε·dε`-coefficient `−r²` in `Ω^0_R`.
    pub fn eps_deps(&self, omega0: &OmegaGroup) -> Result<GroupWord> {
        let ring = omega0.ring();
        omega0.form(ring.neg(ring.mul(self.r, self.r)), &[])
    }
}
