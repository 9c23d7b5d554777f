use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::lattice::{AugmentedSolver, BigLattice, ModLattice};
use super::matrix::{smith_normal_form, IntMatrix};
use crate::error::{Error, Result};

/// A formal `Z`-combination of the generators of a presented group.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupWord(pub Vec<BigInt>);

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl GroupWord {
    pub fn zero(len: usize) -> Self {
        GroupWord(vec![BigInt::zero(); len])
    }

    pub fn generator(len: usize, i: usize) -> Self {
        let mut w = Self::zero(len);
        w.0[i] = BigInt::one();
        w
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        GroupWord(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn add_term(&mut self, i: usize, c: impl Into<BigInt>) {
        self.0[i] += c.into();
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: &BigInt, other: &GroupWord) {
        assert_eq!(self.len(), other.len());
        if c.is_zero() {
            return;
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
    }

    pub fn plus(&self, other: &GroupWord) -> GroupWord {
        let mut w = self.clone();
        w.add_scaled(&BigInt::one(), other);
        w
    }

    pub fn minus(&self, other: &GroupWord) -> GroupWord {
        let mut w = self.clone();
        w.add_scaled(&-BigInt::one(), other);
        w
    }

    pub fn scaled(&self, c: &BigInt) -> GroupWord {
        GroupWord(self.0.iter().map(|x| x * c).collect())
    }

    pub fn is_formally_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }
}

/// Invariant factors `d_1 | d_2 | …` (all `> 1`) and the free rank.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InvariantFactors {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl InvariantFactors {
    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion
            .iter()
            .map(|d| d.to_u64().expect("invariant factor exceeds u64"))
            .collect()
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A finitely presented abelian group `Z^g / ⟨relations⟩` with its Smith form.
///
/// Normal forms are coordinates `w·V` in the cyclic decomposition, reduced
/// modulo the corresponding invariant factor (free coordinates exact).
#[derive(Clone)]
pub struct FpAbelianGroup {
    generators: usize,
    relations: IntMatrix,
    /// Moduli of the nontrivial cyclic factors (`0` for `Z`).
    factors: Vec<BigInt>,
    /// Per factor, the linear form giving that coordinate of a word.
    v_cols: Vec<Vec<BigInt>>,
    /// Per factor, a word generating that cyclic factor.
    v_inv_rows: Vec<Vec<BigInt>>,
}

impl fmt::Debug for FpAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FpAbelianGroup({} generators, {})",
            self.generators,
            self.invariant_factors()
        )
    }
}

/// Row count above which explicit relation lists are first reduced to an
/// echelon basis.
const DIRECT_SNF_ROWS: usize = 64;

impl FpAbelianGroup {
    /// `Z^generators` modulo the given relation rows. Duplicate and zero rows
    /// are dropped.
    pub fn from_relations(generators: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let mut seen = std::collections::HashSet::new();
        let mut kept = Vec::new();
        for r in rows {
            assert_eq!(r.len(), generators, "relation has wrong length");
            if r.iter().all(|x| x.is_zero()) {
                continue;
            }
            if seen.insert(r.clone()) {
                kept.push(r);
            }
        }
        if kept.len() > DIRECT_SNF_ROWS.max(2 * generators) {
            let mut lat = BigLattice::new(generators);
            for r in &kept {
                lat.insert(r);
            }
            kept = lat.basis();
        }
        Self::from_matrix(IntMatrix::from_rows(generators, kept))
    }

    /// `Z^generators` modulo sparse relations and `exponent·Z^generators`.
    ///
    /// The caller guarantees every generator has order dividing `exponent`
    /// in the intended group; the extra relations are then redundant.
    pub fn from_sparse_relations<I>(generators: usize, rows: I, exponent: u64) -> Self
    where
        I: IntoIterator<Item = Vec<(usize, i64)>>,
    {
        let mut lat = ModLattice::new(generators, exponent);
        for r in rows {
            lat.insert_sparse(&r);
        }
        Self::from_lattice(&lat)
    }

    /// The group `Z^g / L` for a lattice containing `E·Z^g`.
    ///
    /// Generators whose pivot is 1 are solved for in terms of later ones, and
    /// the Smith form is only taken of the presentation on what remains.
    pub fn from_lattice(lat: &ModLattice) -> Self {
        let rows = lat.pivot_rows();
        let g = rows.len();
        let m = lat.modulus();
        let relations = IntMatrix::from_rows(g, lat.basis());
        let kept: Vec<usize> = (0..g).filter(|&j| rows[j][j] != 1).collect();
        let mut slot = vec![usize::MAX; g];
        for (i, &j) in kept.iter().enumerate() {
            slot[j] = i;
        }
        let r = kept.len();
        // image of each generator in Z^r, reduced mod E
        let mut image: Vec<Vec<i64>> = vec![Vec::new(); g];
        for j in (0..g).rev() {
            let mut v = vec![0i64; r];
            if slot[j] != usize::MAX {
                v[slot[j]] = 1;
            } else {
                for k in j + 1..g {
                    let c = rows[j][k];
                    if c == 0 {
                        continue;
                    }
                    for (x, &y) in v.iter_mut().zip(&image[k]) {
                        if y != 0 {
                            *x = (*x - c * y).rem_euclid(m);
                        }
                    }
                }
            }
            image[j] = v;
        }
        let mut small = Vec::with_capacity(2 * r);
        for &j in &kept {
            let mut v = vec![0i64; r];
            for k in j..g {
                let c = rows[j][k];
                if c == 0 {
                    continue;
                }
                for (x, &y) in v.iter_mut().zip(&image[k]) {
                    if y != 0 {
                        *x = (*x + c * y).rem_euclid(m);
                    }
                }
            }
            small.push(v.into_iter().map(BigInt::from).collect());
        }
        for i in 0..r {
            let mut v = vec![BigInt::zero(); r];
            v[i] = BigInt::from(m);
            small.push(v);
        }
        let snf = smith_normal_form(&IntMatrix::from_rows(r, small));
        let diag = snf.diagonal();
        let nontrivial: Vec<usize> = (0..r).filter(|&c| !diag[c].is_one()).collect();
        let factors = nontrivial.iter().map(|&c| diag[c].clone()).collect();
        let v_cols = nontrivial
            .iter()
            .map(|&c| {
                let col: Vec<BigInt> = (0..r).map(|i| snf.v[(i, c)].clone()).collect();
                image
                    .iter()
                    .map(|v| {
                        v.iter()
                            .zip(&col)
                            .filter(|(x, _)| **x != 0)
                            .map(|(&x, y)| BigInt::from(x) * y)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let v_inv_rows = nontrivial
            .iter()
            .map(|&c| {
                let mut w = vec![BigInt::zero(); g];
                for (i, &j) in kept.iter().enumerate() {
                    w[j] = snf.v_inv[(c, i)].clone();
                }
                w
            })
            .collect();
        FpAbelianGroup {
            generators: g,
            relations,
            factors,
            v_cols,
            v_inv_rows,
        }
    }

    pub fn from_matrix(relations: IntMatrix) -> Self {
        let snf = smith_normal_form(&relations);
        let generators = relations.ncols();
        let diag = snf.diagonal();
        let nontrivial: Vec<usize> = (0..generators).filter(|&c| !diag[c].is_one()).collect();
        let factors = nontrivial.iter().map(|&c| diag[c].clone()).collect();
        let v_cols = nontrivial
            .iter()
            .map(|&c| (0..generators).map(|r| snf.v[(r, c)].clone()).collect())
            .collect();
        let v_inv_rows = nontrivial
            .iter()
            .map(|&c| snf.v_inv.row(c).to_vec())
            .collect();
        FpAbelianGroup {
            generators,
            relations,
            factors,
            v_cols,
            v_inv_rows,
        }
    }

    /// `Z/d_1 ⊕ … ⊕ Z/d_k` on one generator per entry (`0` gives `Z`).
    pub fn diagonal(orders: &[BigInt]) -> Self {
        let n = orders.len();
        let rows = orders
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| {
                let mut r = vec![BigInt::zero(); n];
                r[i] = d.clone();
                r
            })
            .collect();
        Self::from_matrix(IntMatrix::from_rows(n, rows))
    }

    pub fn cyclic(n: u64) -> Self {
        Self::diagonal(&[BigInt::from(n)])
    }

    pub fn free(rank: usize) -> Self {
        Self::from_matrix(IntMatrix::zeros(0, rank))
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Moduli of the normal-form coordinates (`0` for free coordinates).
    pub fn coordinate_moduli(&self) -> Vec<BigInt> {
        self.factors.clone()
    }

    pub fn invariant_factors(&self) -> InvariantFactors {
        InvariantFactors {
            torsion: self
                .factors
                .iter()
                .filter(|d| !d.is_zero())
                .cloned()
                .collect(),
            free_rank: self.factors.iter().filter(|d| d.is_zero()).count(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(|d| !d.is_zero())
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.factors.iter().product())
    }

    /// Exponent of a finite group (the largest invariant factor).
    pub fn exponent(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.factors.iter().fold(BigInt::one(), |acc, d| acc.lcm(d)))
    }

    fn check_len(&self, w: &GroupWord) -> Result<()> {
        if w.len() != self.generators {
            return Err(Error::SizeMismatch {
                expected: self.generators,
                got: w.len(),
            });
        }
        Ok(())
    }

    /// Canonical coordinates of `w`; zero exactly when `w` is a relation.
    pub fn normal_form(&self, w: &GroupWord) -> Result<Vec<BigInt>> {
        self.check_len(w)?;
        Ok(self
            .factors
            .iter()
            .zip(&self.v_cols)
            .map(|(d, col)| {
                let mut x = BigInt::zero();
                for (a, b) in w.0.iter().zip(col) {
                    if !a.is_zero() && !b.is_zero() {
                        x += a * b;
                    }
                }
                if d.is_zero() {
                    x
                } else {
                    x.mod_floor(d)
                }
            })
            .collect())
    }

    pub fn is_zero(&self, w: &GroupWord) -> Result<bool> {
        Ok(self.normal_form(w)?.iter().all(|x| x.is_zero()))
    }

    pub fn words_equal(&self, a: &GroupWord, b: &GroupWord) -> Result<bool> {
        self.is_zero(&a.minus(b))
    }

    pub fn is_isomorphic(&self, other: &FpAbelianGroup) -> bool {
        self.invariant_factors() == other.invariant_factors()
    }

    /// Block-diagonal presentation of `self ⊕ other`.
    pub fn direct_sum(&self, other: &FpAbelianGroup) -> FpAbelianGroup {
        let (g1, g2) = (self.generators, other.generators);
        let mut rows = Vec::new();
        for r in self.relations.rows() {
            let mut v = r.to_vec();
            v.extend(std::iter::repeat_n(BigInt::zero(), g2));
            rows.push(v);
        }
        for r in other.relations.rows() {
            let mut v = vec![BigInt::zero(); g1];
            v.extend_from_slice(r);
            rows.push(v);
        }
        Self::from_matrix(IntMatrix::from_rows(g1 + g2, rows))
    }

    /// Whether multiplication by `m` is a bijection of the finite group.
    pub fn mult_by_m_is_bijective(&self, m: u64) -> Result<bool> {
        let inv = self.invariant_factors();
        if inv.free_rank > 0 {
            return Err(Error::InfiniteGroup {
                free_rank: inv.free_rank,
            });
        }
        let m = BigInt::from(m);
        Ok(inv.torsion.iter().all(|d| d.gcd(&m).is_one()))
    }

    /// Same generators with the extra words added as relations.
    pub fn quotient(&self, extra: &[GroupWord]) -> FpAbelianGroup {
        let mut rows: Vec<Vec<BigInt>> = self.relations.rows().map(|r| r.to_vec()).collect();
        for w in extra {
            assert_eq!(w.len(), self.generators);
            rows.push(w.0.clone());
        }
        match self
            .exponent()
            .and_then(|e| e.to_u64())
            .filter(|&e| e < 1 << 31)
        {
            Some(e) => {
                let mut lat = ModLattice::new(self.generators, e);
                let m = BigInt::from(e);
                for r in &rows {
                    let r: Vec<i64> = r
                        .iter()
                        .map(|x| x.mod_floor(&m).to_i64().unwrap())
                        .collect();
                    lat.insert(&r);
                }
                Self::from_lattice(&lat)
            }
            None => Self::from_relations(self.generators, rows),
        }
    }

    /// Presentation with one generator per nontrivial cyclic factor, and the
    /// new generators written as words in the old ones.
    pub fn minimized(&self) -> (FpAbelianGroup, Vec<GroupWord>) {
        let orders = self.coordinate_moduli();
        let words = self.v_inv_rows.iter().cloned().map(GroupWord).collect();
        (Self::diagonal(&orders), words)
    }
}

/// Recombines any list of cyclic orders into invariant factors `d_1 | d_2 | …`
/// through the primary decomposition.
pub fn merge_invariant_factors(orders: &[BigInt]) -> Vec<BigInt> {
    let mut prime_powers: std::collections::BTreeMap<BigInt, Vec<BigInt>> = Default::default();
    for d in orders {
        let mut n = d.abs();
        if n.is_zero() {
            continue;
        }
        let mut p = BigInt::from(2);
        while &p * &p <= n {
            if n.is_multiple_of(&p) {
                let mut q = BigInt::one();
                while n.is_multiple_of(&p) {
                    n /= &p;
                    q *= &p;
                }
                prime_powers.entry(p.clone()).or_default().push(q);
            }
            p += 1;
        }
        if n > BigInt::one() {
            prime_powers.entry(n.clone()).or_default().push(n);
        }
    }
    let len = prime_powers.values().map(|v| v.len()).max().unwrap_or(0);
    let mut out = vec![BigInt::one(); len];
    for powers in prime_powers.values_mut() {
        powers.sort();
        // Largest powers go to the last factors.
        for (slot, q) in out.iter_mut().rev().zip(powers.iter().rev()) {
            *slot *= q;
        }
    }
    out
}

/// A homomorphism between presented groups, certified to respect relations.
#[derive(Clone)]
pub struct GroupHom {
    source: Arc<FpAbelianGroup>,
    target: Arc<FpAbelianGroup>,
    images: Vec<GroupWord>,
    solver: OnceLock<Arc<AugmentedSolver>>,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupHom")
            .field("source", &self.source)
            .field("target", &self.target)
            .finish()
    }
}

/// Certifies that `images` (one per source generator) define a homomorphism.
pub fn make_hom(
    source: Arc<FpAbelianGroup>,
    target: Arc<FpAbelianGroup>,
    images: Vec<GroupWord>,
) -> Result<GroupHom> {
    if images.len() != source.generators() {
        return Err(Error::SizeMismatch {
            expected: source.generators(),
            got: images.len(),
        });
    }
    for w in &images {
        target.check_len(w)?;
    }
    let hom = GroupHom {
        source,
        target,
        images,
        solver: OnceLock::new(),
    };
    for (index, rel) in hom.source.relations().rows().enumerate() {
        let w = hom.apply_unchecked(rel);
        if !hom.target.is_zero(&w)? {
            return Err(Error::RelationNotPreserved { index });
        }
    }
    Ok(hom)
}

impl GroupHom {
    pub fn identity(group: Arc<FpAbelianGroup>) -> GroupHom {
        let g = group.generators();
        GroupHom {
            source: group.clone(),
            target: group,
            images: (0..g).map(|i| GroupWord::generator(g, i)).collect(),
            solver: OnceLock::new(),
        }
    }

    pub fn zero(source: Arc<FpAbelianGroup>, target: Arc<FpAbelianGroup>) -> GroupHom {
        let images = vec![GroupWord::zero(target.generators()); source.generators()];
        GroupHom {
            source,
            target,
            images,
            solver: OnceLock::new(),
        }
    }

    pub fn source(&self) -> &Arc<FpAbelianGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FpAbelianGroup> {
        &self.target
    }

    pub fn images(&self) -> &[GroupWord] {
        &self.images
    }

    fn apply_unchecked(&self, coeffs: &[BigInt]) -> GroupWord {
        let mut out = GroupWord::zero(self.target.generators());
        for (c, img) in coeffs.iter().zip(&self.images) {
            out.add_scaled(c, img);
        }
        out
    }

    pub fn apply(&self, w: &GroupWord) -> Result<GroupWord> {
        self.source.check_len(w)?;
        Ok(self.apply_unchecked(&w.0))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom> {
        if self.target.generators() != next.source.generators() {
            return Err(Error::SizeMismatch {
                expected: next.source.generators(),
                got: self.target.generators(),
            });
        }
        let images = self
            .images
            .iter()
            .map(|w| next.apply_unchecked(&w.0))
            .collect();
        Ok(GroupHom {
            source: self.source.clone(),
            target: next.target.clone(),
            images,
            solver: OnceLock::new(),
        })
    }

    /// Whether both maps agree on every source generator.
    pub fn agrees_with(&self, other: &GroupHom) -> Result<bool> {
        for (a, b) in self.images.iter().zip(&other.images) {
            if !self.target.words_equal(a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero_map(&self) -> bool {
        self.images
            .iter()
            .all(|w| self.target.is_zero(w).expect("image sized for target"))
    }

    fn solver(&self) -> &Arc<AugmentedSolver> {
        self.solver.get_or_init(|| {
            let coeffs: Vec<Vec<BigInt>> = self
                .images
                .iter()
                .map(|w| self.target.normal_form(w).expect("image sized for target"))
                .collect();
            Arc::new(AugmentedSolver::new(
                &coeffs,
                &self.target.coordinate_moduli(),
            ))
        })
    }

    /// Some source word mapping to `w`, if `w` lies in the image.
    pub fn preimage(&self, w: &GroupWord) -> Result<Option<GroupWord>> {
        let y = self.target.normal_form(w)?;
        Ok(self.solver().solve(&y).map(GroupWord))
    }

    /// Kernel with a minimal presentation, and its inclusion into the source.
    pub fn kernel(&self) -> (Arc<FpAbelianGroup>, GroupHom) {
        let g = self.source.generators();
        // Lattice of integer vectors mapping into the target relations.
        let lambda = self.solver().kernel_basis();
        let coeffs: Vec<Vec<BigInt>> = lambda
            .iter()
            .map(|v| self.source.normal_form(&GroupWord(v.clone())).unwrap())
            .collect();
        let relations =
            AugmentedSolver::new(&coeffs, &self.source.coordinate_moduli()).kernel_basis();
        let presented = FpAbelianGroup::from_relations(lambda.len(), relations);
        let (kernel, words) = presented.minimized();
        let kernel = Arc::new(kernel);
        let images = words
            .iter()
            .map(|u| {
                let mut out = GroupWord::zero(g);
                for (c, v) in u.0.iter().zip(&lambda) {
                    out.add_scaled(c, &GroupWord(v.clone()));
                }
                out
            })
            .collect();
        let inclusion = make_hom(kernel.clone(), self.source.clone(), images)
            .expect("kernel inclusion respects relations");
        (kernel, inclusion)
    }

    /// The target modulo the image.
    pub fn cokernel(&self) -> FpAbelianGroup {
        self.target.quotient(&self.images)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().0.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}
