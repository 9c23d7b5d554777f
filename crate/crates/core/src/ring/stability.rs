//! Weak and full `k`-fold stability predicates.
//!
//! Both predicates only depend on elements modulo the Jacobson radical `J`:
//! `x` is a unit iff its class in `R/J` is, and `aR + bR = R` iff the classes
//! generate the unit ideal of `R/J`. The search runs over ordered tuples of
//! carrier elements in lexicographic order, with the answer for a partially
//! filled tuple memoised on the set of residue classes still admissible.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Ring, RingElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityKind {
    Weak,
    Full,
}

/// A tuple that admits no valid `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `(r_1, …, r_{k-1})` for the weak predicate.
    Elements(Vec<RingElement>),
    /// `((r_1, s_1), …, (r_k, s_k))` for the full predicate.
    Pairs(Vec<(RingElement, RingElement)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub kind: StabilityKind,
    pub k: usize,
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// Residue classes modulo the Jacobson radical together with the quotient
/// ring's operations.
pub(crate) struct Residues {
    class_of: Vec<u32>,
    count: usize,
    unit_class: Vec<bool>,
    add: Vec<u32>,
    mul: Vec<u32>,
}

type Bits = Vec<u64>;

fn full_bits(n: usize, pred: impl Fn(usize) -> bool) -> Bits {
    let mut b = vec![0u64; n.div_ceil(64)];
    for i in 0..n {
        if pred(i) {
            b[i / 64] |= 1 << (i % 64);
        }
    }
    b
}

fn and(a: &Bits, b: &Bits) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn is_empty(a: &Bits) -> bool {
    a.iter().all(|&w| w == 0)
}

impl Residues {
    fn compute(ring: &Ring) -> Residues {
        let n = ring.size();
        let in_radical: Vec<bool> = ring
            .elements()
            .map(|x| {
                ring.elements()
                    .all(|y| ring.is_unit(ring.add(ring.one(), ring.mul(x, y))))
            })
            .collect();
        let radical: Vec<RingElement> = ring.elements().filter(|x| in_radical[x.index()]).collect();
        let mut class_of = vec![u32::MAX; n];
        let mut reps = Vec::new();
        for x in ring.elements() {
            if class_of[x.index()] != u32::MAX {
                continue;
            }
            let c = reps.len() as u32;
            reps.push(x);
            for &j in &radical {
                class_of[ring.add(x, j).index()] = c;
            }
        }
        let count = reps.len();
        let mut add = vec![0u32; count * count];
        let mut mul = vec![0u32; count * count];
        for (i, &a) in reps.iter().enumerate() {
            for (j, &b) in reps.iter().enumerate() {
                add[i * count + j] = class_of[ring.add(a, b).index()];
                mul[i * count + j] = class_of[ring.mul(a, b).index()];
            }
        }
        let unit_class = reps.iter().map(|&r| ring.is_unit(r)).collect();
        Residues {
            class_of,
            count,
            unit_class,
            add,
            mul,
        }
    }

    fn class(&self, x: RingElement) -> usize {
        self.class_of[x.index()] as usize
    }

    fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.count + b] as usize
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.count + b] as usize
    }

    fn generate_unit_ideal(&self, a: usize, b: usize, ideals: &[Bits]) -> bool {
        // 1 ∈ aR + bR  ⇔  ∃ y ∈ bR with 1 - y ∈ aR.
        let one = self.one();
        let neg_one = (0..self.count)
            .find(|&c| self.add(c, one) == self.zero())
            .unwrap();
        (0..self.count).any(|y| {
            ideals[b][y / 64] >> (y % 64) & 1 == 1 && {
                let z = self.add(one, self.mul(neg_one, y));
                ideals[a][z / 64] >> (z % 64) & 1 == 1
            }
        })
    }

    fn zero(&self) -> usize {
        0
    }

    fn one(&self) -> usize {
        // Class of the element with index 1.
        self.class_of[1] as usize
    }
}

/// Depth-first search for a failing tuple over "slot" sets, each slot value
/// restricting the admissible classes for `r` to a bitset.
struct CoverSearch<'a> {
    slot_sets: &'a [Bits],
    memo: HashMap<(usize, Bits), bool>,
}

impl CoverSearch<'_> {
    /// Can `remaining` further slots make `current` empty?
    fn fails(&mut self, remaining: usize, current: &Bits) -> bool {
        if is_empty(current) {
            return true;
        }
        if remaining == 0 {
            return false;
        }
        if let Some(&v) = self.memo.get(&(remaining, current.clone())) {
            return v;
        }
        let mut result = false;
        for i in 0..self.slot_sets.len() {
            let next = and(current, &self.slot_sets[i]);
            if self.fails(remaining - 1, &next) {
                result = true;
                break;
            }
        }
        self.memo.insert((remaining, current.clone()), result);
        result
    }
}

impl Ring {
    pub(crate) fn residues(&self) -> &Residues {
        self.radical.get_or_init(|| Residues::compute(self))
    }

    /// Number of elements of `R/J`.
    pub fn residue_ring_size(&self) -> usize {
        self.residues().count
    }

    /// Weak `k`-fold stability: every `(r_1, …, r_{k-1})` admits a unit `r` with
    /// all `r_i + r` units. The witness is the lexicographically first failing
    /// tuple.
    pub fn check_weak_stability(&self, k: usize) -> StabilityReport {
        assert!(k >= 2, "weak stability is defined for k >= 2");
        let res = self.residues();
        let q = res.count;
        let units = full_bits(q, |c| res.unit_class[c]);
        // A_c = { unit classes r : c + r is a unit class }.
        let slot_sets: Vec<Bits> = (0..q)
            .map(|c| full_bits(q, |r| res.unit_class[r] && res.unit_class[res.add(c, r)]))
            .collect();
        let mut search = CoverSearch {
            slot_sets: &slot_sets,
            memo: HashMap::new(),
        };
        let slots = k - 1;
        if !search.fails(slots, &units) {
            return StabilityReport {
                kind: StabilityKind::Weak,
                k,
                holds: true,
                witness: None,
            };
        }
        let mut current = units;
        let mut tuple = Vec::with_capacity(slots);
        for depth in 0..slots {
            let x = self
                .elements()
                .find(|&x| {
                    let next = and(&current, &slot_sets[res.class(x)]);
                    search.fails(slots - depth - 1, &next)
                })
                .expect("a failing completion exists");
            current = and(&current, &slot_sets[res.class(x)]);
            tuple.push(x);
        }
        StabilityReport {
            kind: StabilityKind::Weak,
            k,
            holds: false,
            witness: Some(Witness::Elements(tuple)),
        }
    }

    /// Full `k`-fold stability: every `k` pairs `(r_i, s_i)` with
    /// `r_iR + s_iR = R` admit `r ∈ R` with all `r_i + r s_i` units.
    pub fn check_full_stability(&self, k: usize) -> StabilityReport {
        assert!(k >= 1, "full stability is defined for k >= 1");
        let res = self.residues();
        let q = res.count;
        let ideals: Vec<Bits> = (0..q)
            .map(|a| {
                let mut b = vec![0u64; q.div_ceil(64)];
                for y in 0..q {
                    let p = res.mul(a, y);
                    b[p / 64] |= 1 << (p % 64);
                }
                b
            })
            .collect();
        // Class pairs generating the unit ideal, and their admissible r-sets.
        let mut pair_index = vec![usize::MAX; q * q];
        let mut slot_sets = Vec::new();
        for a in 0..q {
            for b in 0..q {
                if res.generate_unit_ideal(a, b, &ideals) {
                    pair_index[a * q + b] = slot_sets.len();
                    slot_sets.push(full_bits(q, |r| res.unit_class[res.add(a, res.mul(r, b))]));
                }
            }
        }
        let all = full_bits(q, |_| true);
        let mut search = CoverSearch {
            slot_sets: &slot_sets,
            memo: HashMap::new(),
        };
        if !search.fails(k, &all) {
            return StabilityReport {
                kind: StabilityKind::Full,
                k,
                holds: true,
                witness: None,
            };
        }
        let mut current = all;
        let mut tuple = Vec::with_capacity(k);
        for depth in 0..k {
            let found = self
                .elements()
                .flat_map(|a| self.elements().map(move |b| (a, b)))
                .find(|&(a, b)| {
                    let idx = pair_index[res.class(a) * q + res.class(b)];
                    idx != usize::MAX && {
                        let next = and(&current, &slot_sets[idx]);
                        search.fails(k - depth - 1, &next)
                    }
                })
                .expect("a failing completion exists");
            let idx = pair_index[res.class(found.0) * q + res.class(found.1)];
            current = and(&current, &slot_sets[idx]);
            tuple.push(found);
        }
        StabilityReport {
            kind: StabilityKind::Full,
            k,
            holds: false,
            witness: Some(Witness::Pairs(tuple)),
        }
    }

    /// Largest `k ≤ max_k` for which the ring is weakly `k`-fold stable, if any.
    pub fn weak_stability_level(&self, max_k: usize) -> Option<usize> {
        (2..=max_k)
            .take_while(|&k| self.check_weak_stability(k).holds)
            .last()
    }
}
