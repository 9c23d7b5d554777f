//! Row-echelon bases of integer lattices.
//!
//! [`ModLattice`] handles lattices known to contain `E·Zⁿ` for a modulus `E`:
//! all entries stay reduced modulo `E` and fit in machine words. [`BigLattice`]
//! is the exact fallback for lattices of lower rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Echelon basis of a lattice `L ⊇ E·Zⁿ`, one pivot row per column.
///
/// Row `j` has its first nonzero entry at column `j`; that entry divides `E`.
/// Inserting a vector replaces `L` by `L + Z·v`.
#[derive(Debug, Clone)]
pub struct ModLattice {
    modulus: i64,
    cols: usize,
    pivots: Vec<Vec<i64>>,
}

impl ModLattice {
    pub fn new(cols: usize, modulus: u64) -> Self {
        assert!((1..1 << 31).contains(&modulus), "modulus out of range");
        let m = modulus as i64;
        let pivots = (0..cols)
            .map(|j| {
                let mut r = vec![0i64; cols];
                r[j] = m;
                r
            })
            .collect();
        ModLattice {
            modulus: m,
            cols,
            pivots,
        }
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn insert_sparse(&mut self, entries: &[(usize, i64)]) {
        let mut row = vec![0i64; self.cols];
        for &(j, c) in entries {
            row[j] = (row[j] + c).rem_euclid(self.modulus);
        }
        self.insert_from(row, 0);
    }

    pub fn insert(&mut self, row: &[i64]) {
        let row = row.iter().map(|&c| c.rem_euclid(self.modulus)).collect();
        self.insert_from(row, 0);
    }

    fn insert_from(&mut self, mut row: Vec<i64>, start: usize) {
        let m = self.modulus;
        let mut j = start;
        while j < self.cols {
            let b = row[j];
            if b == 0 {
                j += 1;
                continue;
            }
            let a = self.pivots[j][j];
            if b % a == 0 {
                let q = b / a;
                let p = &self.pivots[j];
                row[j] = 0;
                for k in j + 1..self.cols {
                    if p[k] != 0 {
                        row[k] = (row[k] - q * p[k]).rem_euclid(m);
                    }
                }
            } else {
                let (g, x, y) = egcd(a, b);
                let (ag, bg) = (a / g, b / g);
                let p = std::mem::take(&mut self.pivots[j]);
                let mut np = vec![0i64; self.cols];
                np[j] = g;
                let mut nr = vec![0i64; self.cols];
                for k in j + 1..self.cols {
                    let (pk, rk) = (p[k] as i128, row[k] as i128);
                    np[k] = ((x as i128 * pk + y as i128 * rk).rem_euclid(m as i128)) as i64;
                    nr[k] = ((ag as i128 * rk - bg as i128 * pk).rem_euclid(m as i128)) as i64;
                }
                self.pivots[j] = np;
                row = nr;
            }
            j += 1;
        }
    }

    /// Pivot rows as exact integer vectors (the lattice basis).
    pub fn basis(&self) -> Vec<Vec<BigInt>> {
        self.pivots
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    pub fn pivot_rows(&self) -> &[Vec<i64>] {
        &self.pivots
    }

    /// Subtracts pivot rows from `v` until its first `split` entries vanish;
    /// false if `v` is not in the projected lattice.
    fn reduce_prefix(&self, v: &mut [i64], split: usize) -> bool {
        let m = self.modulus;
        for j in 0..split {
            let b = v[j].rem_euclid(m);
            if b == 0 {
                v[j] = 0;
                continue;
            }
            let a = self.pivots[j][j];
            if b % a != 0 {
                return false;
            }
            let q = b / a;
            let p = &self.pivots[j];
            v[j] = 0;
            for k in j + 1..self.cols {
                if p[k] != 0 {
                    v[k] = (v[k] - q * p[k]).rem_euclid(m);
                }
            }
        }
        true
    }
}

/// Exact echelon basis of an arbitrary sublattice of `Zⁿ`.
#[derive(Debug, Clone)]
pub struct BigLattice {
    cols: usize,
    pivots: Vec<Option<Vec<BigInt>>>,
}

impl BigLattice {
    pub fn new(cols: usize) -> Self {
        BigLattice {
            cols,
            pivots: vec![None; cols],
        }
    }

    pub fn insert(&mut self, row: &[BigInt]) {
        let mut row = row.to_vec();
        let mut j = 0;
        while j < self.cols {
            if row[j].is_zero() {
                j += 1;
                continue;
            }
            match self.pivots[j].take() {
                None => {
                    if row[j].is_negative() {
                        row.iter_mut().for_each(|x| *x = -std::mem::take(x));
                    }
                    self.pivots[j] = Some(row);
                    self.reduce_above(j);
                    return;
                }
                Some(p) => {
                    let a = &p[j];
                    let b = &row[j];
                    let ext = a.extended_gcd(b);
                    let (g, x, y) = (ext.gcd, ext.x, ext.y);
                    let (ag, bg) = (a / &g, b / &g);
                    let np: Vec<BigInt> = p
                        .iter()
                        .zip(&row)
                        .map(|(pk, rk)| &x * pk + &y * rk)
                        .collect();
                    let nr: Vec<BigInt> = p
                        .iter()
                        .zip(&row)
                        .map(|(pk, rk)| &ag * rk - &bg * pk)
                        .collect();
                    self.pivots[j] = Some(np);
                    self.reduce_above(j);
                    row = nr;
                }
            }
            j += 1;
        }
    }

    /// Normalises the sign of pivot row `j` and reduces it against the later
    /// pivots.
    fn reduce_above(&mut self, j: usize) {
        let cols = self.cols;
        let row = self.pivots[j].as_mut().unwrap();
        if row[j].is_negative() {
            row.iter_mut().for_each(|x| *x = -std::mem::take(x));
        }
        let mut row = self.pivots[j].take().unwrap();
        for k in j + 1..cols {
            if let Some(p) = &self.pivots[k] {
                let q = row[k].div_floor(&p[k]);
                if !q.is_zero() {
                    for (r, pk) in row.iter_mut().zip(p.iter()).skip(k) {
                        *r -= &q * pk;
                    }
                }
            }
        }
        self.pivots[j] = Some(row);
    }

    pub fn basis(&self) -> Vec<Vec<BigInt>> {
        self.pivots.iter().flatten().cloned().collect()
    }

    fn reduce_prefix(&self, v: &mut [BigInt], split: usize) -> bool {
        for j in 0..split {
            if v[j].is_zero() {
                continue;
            }
            let Some(p) = &self.pivots[j] else {
                return false;
            };
            let (q, r) = v[j].div_rem(&p[j]);
            if !r.is_zero() {
                return false;
            }
            for (x, pk) in v.iter_mut().zip(p.iter()).skip(j) {
                *x -= &q * pk;
            }
        }
        true
    }
}

/// Solver for `x·C ≡ y (mod D)` where `C` is a `g × k` coefficient matrix and
/// `D = diag(d_1, …, d_k)` (a zero modulus meaning an exact equation).
pub struct AugmentedSolver {
    split: usize,
    aux: usize,
    inner: Inner,
}

enum Inner {
    Mod(ModLattice),
    Big(BigLattice),
}

impl AugmentedSolver {
    /// `coeffs` are the `g` rows of `C`; `moduli` the `k` column moduli.
    pub fn new(coeffs: &[Vec<BigInt>], moduli: &[BigInt]) -> Self {
        let k = moduli.len();
        let g = coeffs.len();
        let finite = moduli.iter().all(|d| !d.is_zero());
        let exponent = moduli.iter().fold(BigInt::one(), |acc, d| acc.lcm(d));
        let small = finite && exponent < BigInt::from(1i64 << 31);
        let mut inner = if small {
            Inner::Mod(ModLattice::new(k + g, exponent.to_u64().unwrap()))
        } else {
            Inner::Big(BigLattice::new(k + g))
        };
        for (j, c) in coeffs.iter().enumerate() {
            assert_eq!(c.len(), k);
            let mut row: Vec<BigInt> = c.clone();
            row.extend((0..g).map(|i| {
                if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }));
            inner.insert(&row);
        }
        for (i, d) in moduli.iter().enumerate() {
            if !d.is_zero() {
                let mut row = vec![BigInt::zero(); k + g];
                row[i] = d.clone();
                inner.insert(&row);
            }
        }
        AugmentedSolver {
            split: k,
            aux: g,
            inner,
        }
    }

    /// Generators of `{x ∈ Z^g : x·C ≡ 0 (mod D)}`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        let k = self.split;
        let rows = match &self.inner {
            Inner::Mod(l) => l.basis(),
            Inner::Big(l) => l.basis(),
        };
        rows.into_iter()
            .filter(|r| r[..k].iter().all(|x| x.is_zero()))
            .map(|r| r[k..].to_vec())
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect()
    }

    /// Some `x` with `x·C ≡ y (mod D)`, if one exists.
    pub fn solve(&self, y: &[BigInt]) -> Option<Vec<BigInt>> {
        let (k, g) = (self.split, self.aux);
        assert_eq!(y.len(), k);
        match &self.inner {
            Inner::Mod(l) => {
                let m = BigInt::from(l.modulus());
                let mut v: Vec<i64> = y
                    .iter()
                    .map(|x| x.mod_floor(&m).to_i64().unwrap())
                    .chain(std::iter::repeat_n(0, g))
                    .collect();
                if !l.reduce_prefix(&mut v, k) {
                    return None;
                }
                Some(
                    v[k..]
                        .iter()
                        .map(|&x| BigInt::from((-x).rem_euclid(l.modulus())))
                        .collect(),
                )
            }
            Inner::Big(l) => {
                let mut v: Vec<BigInt> = y
                    .iter()
                    .cloned()
                    .chain(std::iter::repeat_n(BigInt::zero(), g))
                    .collect();
                if !l.reduce_prefix(&mut v, k) {
                    return None;
                }
                Some(v[k..].iter().map(|x| -x).collect())
            }
        }
    }
}

impl Inner {
    fn insert(&mut self, row: &[BigInt]) {
        match self {
            Inner::Mod(l) => {
                let m = BigInt::from(l.modulus());
                let r: Vec<i64> = row
                    .iter()
                    .map(|x| x.mod_floor(&m).to_i64().unwrap())
                    .collect();
                l.insert(&r);
            }
            Inner::Big(l) => l.insert(row),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn modular_lattice_pivots_divide_modulus() {
        let mut l = ModLattice::new(3, 12);
        l.insert(&[4, 6, 0]);
        l.insert(&[0, 9, 3]);
        for (j, r) in l.pivot_rows().iter().enumerate() {
            assert_eq!(12 % r[j], 0);
            assert!(r[..j].iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn big_lattice_echelon() {
        let mut l = BigLattice::new(2);
        l.insert(&big(&[2, 4]));
        l.insert(&big(&[6, 8]));
        let b = l.basis();
        assert_eq!(b.len(), 2);
        // Lattice index |det| = 8.
        assert_eq!(&b[0][0] * &b[1][1], BigInt::from(8));
    }

    #[test]
    fn solver_kernel_of_reduction_mod_two() {
        // x ↦ x mod 2 on Z/6 coordinates: C = [1], D = [2].
        let s = AugmentedSolver::new(&[big(&[1])], &big(&[2]));
        assert_eq!(s.kernel_basis(), vec![big(&[2])]);
        assert_eq!(s.solve(&big(&[1])), Some(big(&[1])));
    }

    #[test]
    fn solver_exact_equations() {
        // x·[2, 3] = y exactly (free target).
        let s = AugmentedSolver::new(&[big(&[2, 3])], &big(&[0, 0]));
        assert!(s.kernel_basis().is_empty());
        assert_eq!(s.solve(&big(&[4, 6])), Some(big(&[2])));
        assert_eq!(s.solve(&big(&[4, 5])), None);
    }
}
