//! Finite commutative rings built from `Z/m`, monic polynomial quotients and
//! dual numbers.
//!
//! Every ring is a free `Z/m`-module on the monomial basis induced by its
//! constructor tree, so an element is a coefficient vector over `Z/m`. The
//! vector is stored as its mixed-radix index (coordinate 0 least significant),
//! which is also the canonical enumeration order of the carrier.

mod spec;
mod stability;

use std::fmt;
use std::sync::{Arc, OnceLock};

pub use spec::{parse_ring_spec, RingSpec};
pub use stability::{StabilityKind, StabilityReport, Witness};

use crate::error::{Error, Result};

/// Default bound on the number of carrier elements.
pub const DEFAULT_CARRIER_CAP: usize = 4096;

/// An element of a [`Ring`], identified by its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingElement(pub(crate) u32);

impl RingElement {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite commutative unital ring with a cached multiplication table.
pub struct Ring {
    spec: RingSpec,
    characteristic: u32,
    dim: usize,
    size: usize,
    mul: Vec<u16>,
    inverse: Vec<u32>,
    units: Vec<RingElement>,
    base: Option<Arc<Ring>>,
    radical: OnceLock<stability::Residues>,
}

const NO_INVERSE: u32 = u32::MAX;

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ring")
            .field("spec", &self.spec.to_string())
            .field("size", &self.size)
            .finish()
    }
}

impl Ring {
    /// Parses `text` and builds the ring.
    pub fn parse(text: &str, carrier_cap: usize) -> Result<Arc<Ring>> {
        Ring::build(&parse_ring_spec(text, carrier_cap)?, carrier_cap)
    }

    pub fn build(spec: &RingSpec, carrier_cap: usize) -> Result<Arc<Ring>> {
        let size = spec.carrier_size();
        if size > carrier_cap as u128 || size > u16::MAX as u128 + 1 {
            return Err(Error::CarrierTooLarge {
                size,
                cap: carrier_cap,
            });
        }
        Ok(Arc::new(Ring::build_unchecked(spec)))
    }

    fn build_unchecked(spec: &RingSpec) -> Ring {
        match spec {
            RingSpec::ZMod(modulus) => {
                let m = *modulus as usize;
                let mut mul = vec![0u16; m * m];
                for a in 0..m {
                    for b in 0..m {
                        mul[a * m + b] = ((a * b) % m) as u16;
                    }
                }
                Ring::finish(spec.clone(), *modulus, 1, mul, None)
            }
            RingSpec::PolyQuot { base, modulus, .. } => {
                let base = Arc::new(Ring::build_unchecked(base));
                let modulus: Vec<RingElement> =
                    modulus.iter().map(|&c| base.from_int(c as i64)).collect();
                let mul = quotient_table(&base, &modulus);
                let dim = base.dim * (modulus.len() - 1);
                Ring::finish(spec.clone(), base.characteristic, dim, mul, Some(base))
            }
            RingSpec::Dual(inner) => {
                let base = Arc::new(Ring::build_unchecked(inner));
                let modulus = vec![base.zero(), base.zero(), base.one()];
                let mul = quotient_table(&base, &modulus);
                let dim = base.dim * 2;
                Ring::finish(spec.clone(), base.characteristic, dim, mul, Some(base))
            }
        }
    }

    fn finish(
        spec: RingSpec,
        characteristic: u32,
        dim: usize,
        mul: Vec<u16>,
        base: Option<Arc<Ring>>,
    ) -> Ring {
        let size = (characteristic as usize).pow(dim as u32);
        debug_assert_eq!(mul.len(), size * size);
        let mut inverse = vec![NO_INVERSE; size];
        for x in 0..size {
            if inverse[x] != NO_INVERSE {
                continue;
            }
            let row = &mul[x * size..(x + 1) * size];
            if let Some(y) = row.iter().position(|&p| p == 1) {
                inverse[x] = y as u32;
                inverse[y] = x as u32;
            }
        }
        let units = (0..size as u32)
            .filter(|&x| inverse[x as usize] != NO_INVERSE)
            .map(RingElement)
            .collect();
        Ring {
            spec,
            characteristic,
            dim,
            size,
            mul,
            inverse,
            units,
            base,
            radical: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn characteristic(&self) -> u32 {
        self.characteristic
    }

    /// Rank of the ring as a free `Z/characteristic`-module.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn zero(&self) -> RingElement {
        RingElement(0)
    }

    pub fn one(&self) -> RingElement {
        RingElement(1)
    }

    /// Image of an integer under `Z → R`.
    pub fn from_int(&self, n: i64) -> RingElement {
        RingElement(n.rem_euclid(self.characteristic as i64) as u32)
    }

    /// All carrier elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.size as u32).map(RingElement)
    }

    pub fn element(&self, index: usize) -> RingElement {
        assert!(index < self.size, "index {index} outside carrier");
        RingElement(index as u32)
    }

    /// Coordinates over `Z/characteristic`, coordinate 0 first.
    pub fn coords(&self, x: RingElement) -> Vec<u32> {
        let m = self.characteristic;
        let mut v = Vec::with_capacity(self.dim);
        let mut i = x.0;
        for _ in 0..self.dim {
            v.push(i % m);
            i /= m;
        }
        v
    }

    pub fn from_coords(&self, coords: &[u32]) -> RingElement {
        assert_eq!(coords.len(), self.dim);
        let m = self.characteristic;
        let mut idx = 0u32;
        for &c in coords.iter().rev() {
            idx = idx * m + c % m;
        }
        RingElement(idx)
    }

    /// The additive basis: coordinate unit vectors, each of additive order
    /// `characteristic`.
    pub fn additive_basis(&self) -> Vec<RingElement> {
        (0..self.dim)
            .map(|k| RingElement(self.characteristic.pow(k as u32)))
            .collect()
    }

    pub fn add(&self, x: RingElement, y: RingElement) -> RingElement {
        let m = self.characteristic;
        let (mut a, mut b) = (x.0, y.0);
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.dim {
            out += ((a % m + b % m) % m) * place;
            a /= m;
            b /= m;
            place = place.wrapping_mul(m);
        }
        RingElement(out)
    }

    pub fn neg(&self, x: RingElement) -> RingElement {
        let m = self.characteristic;
        let mut a = x.0;
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.dim {
            out += ((m - a % m) % m) * place;
            a /= m;
            place = place.wrapping_mul(m);
        }
        RingElement(out)
    }

    pub fn sub(&self, x: RingElement, y: RingElement) -> RingElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: RingElement, y: RingElement) -> RingElement {
        RingElement(self.mul[x.index() * self.size + y.index()] as u32)
    }

    pub fn product(&self, xs: impl IntoIterator<Item = RingElement>) -> RingElement {
        xs.into_iter().fold(self.one(), |acc, x| self.mul(acc, x))
    }

    pub fn pow(&self, x: RingElement, mut e: u64) -> RingElement {
        let (mut base, mut acc) = (x, self.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `n·x` for an integer `n`.
    pub fn scale_int(&self, n: i64, x: RingElement) -> RingElement {
        self.mul(self.from_int(n), x)
    }

    pub fn try_invert(&self, x: RingElement) -> Option<RingElement> {
        match self.inverse[x.index()] {
            NO_INVERSE => None,
            y => Some(RingElement(y)),
        }
    }

    pub fn is_unit(&self, x: RingElement) -> bool {
        self.inverse[x.index()] != NO_INVERSE
    }

    /// Units in canonical order.
    pub fn units(&self) -> &[RingElement] {
        &self.units
    }

    /// Whether 2 is invertible.
    pub fn has_half(&self) -> bool {
        self.is_unit(self.from_int(2))
    }

    /// Order of a unit in `R^*`.
    pub fn unit_order(&self, u: RingElement) -> u64 {
        assert!(self.is_unit(u));
        let mut x = u;
        let mut k = 1;
        while x != self.one() {
            x = self.mul(x, u);
            k += 1;
        }
        k
    }

    /// `R[ε]`, built under the same carrier cap.
    pub fn dual_numbers(&self, carrier_cap: usize) -> Result<Arc<Ring>> {
        Ring::build(&RingSpec::dual(self.spec.clone()), carrier_cap)
    }

    /// Base ring of a polynomial quotient or dual-number ring.
    pub fn base(&self) -> Option<&Arc<Ring>> {
        self.base.as_ref()
    }

    pub fn is_dual(&self) -> bool {
        self.spec.is_dual()
    }

    /// Renders an element as a polynomial in the ring's variables, with `e`
    /// for the dual-number generator.
    pub fn format(&self, x: RingElement) -> String {
        format_index(&self.spec, x.index())
    }
}

fn format_index(spec: &RingSpec, index: usize) -> String {
    let (base, var, parts) = match spec {
        RingSpec::ZMod(_) => return index.to_string(),
        RingSpec::PolyQuot {
            base,
            variable,
            modulus,
        } => (base, variable.as_str(), modulus.len() - 1),
        RingSpec::Dual(base) => (base, "e", 2),
    };
    let bs = base.carrier_size() as usize;
    let mut terms = Vec::new();
    let mut rest = index;
    for power in 0..parts {
        let c = rest % bs;
        rest /= bs;
        if c == 0 {
            continue;
        }
        let coeff = format_index(base, c);
        let coeff = if coeff.contains('+') {
            format!("({coeff})")
        } else {
            coeff
        };
        terms.push(match (power, coeff.as_str()) {
            (0, _) => coeff,
            (1, "1") => var.to_string(),
            (1, _) => format!("{coeff}{var}"),
            (_, "1") => format!("{var}^{power}"),
            _ => format!("{coeff}{var}^{power}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Multiplication table of `base[x]/(f)` for a monic `f`, indexed by the
/// mixed-radix encoding over base indices.
fn quotient_table(base: &Ring, modulus: &[RingElement]) -> Vec<u16> {
    let deg = modulus.len() - 1;
    let bs = base.size;
    let size = bs.pow(deg as u32);
    let digits = |mut i: usize| {
        let mut d = Vec::with_capacity(deg);
        for _ in 0..deg {
            d.push(RingElement((i % bs) as u32));
            i /= bs;
        }
        d
    };
    let all: Vec<Vec<RingElement>> = (0..size).map(digits).collect();
    let mut table = vec![0u16; size * size];
    let mut prod = vec![base.zero(); 2 * deg - 1];
    for (i, a) in all.iter().enumerate() {
        for (j, b) in all.iter().enumerate().skip(i) {
            prod.iter_mut().for_each(|c| *c = base.zero());
            for (p, &ap) in a.iter().enumerate() {
                if ap.0 == 0 {
                    continue;
                }
                for (q, &bq) in b.iter().enumerate() {
                    prod[p + q] = base.add(prod[p + q], base.mul(ap, bq));
                }
            }
            for d in (deg..2 * deg - 1).rev() {
                let lead = prod[d];
                if lead.0 == 0 {
                    continue;
                }
                for k in 0..deg {
                    let t = base.mul(lead, modulus[k]);
                    prod[d - deg + k] = base.sub(prod[d - deg + k], t);
                }
                prod[d] = base.zero();
            }
            let mut idx = 0usize;
            for c in prod[..deg].iter().rev() {
                idx = idx * bs + c.index();
            }
            table[i * size + j] = idx as u16;
            table[j * size + i] = idx as u16;
        }
    }
    table
}

/// A ring map between carriers, stored as a lookup table.
#[derive(Debug, Clone)]
pub struct RingMap {
    table: Vec<RingElement>,
}

impl RingMap {
    pub fn apply(&self, x: RingElement) -> RingElement {
        self.table[x.index()]
    }
}

/// Dual-number specific structure. Elements of `R[ε]` are `a + bε` with index
/// `index(a) + |R|·index(b)`, so `R` sits inside `R[ε]` with the same indices.
impl Ring {
    fn dual_base(&self) -> Result<&Arc<Ring>> {
        match (&self.spec, &self.base) {
            (RingSpec::Dual(_), Some(b)) => Ok(b),
            _ => Err(Error::NotDualRing),
        }
    }

    /// `a + bε` from base elements.
    pub fn dual_from_parts(&self, a: RingElement, b: RingElement) -> Result<RingElement> {
        let n = self.dual_base()?.size as u32;
        Ok(RingElement(a.0 + n * b.0))
    }

    /// `(a, b)` with `u = a + bε`.
    pub fn dual_parts(&self, u: RingElement) -> Result<(RingElement, RingElement)> {
        let n = self.dual_base()?.size as u32;
        Ok((RingElement(u.0 % n), RingElement(u.0 / n)))
    }

    /// Inclusion of the base ring.
    pub fn include_base(&self, x: RingElement) -> Result<RingElement> {
        self.dual_from_parts(x, RingElement(0))
    }

    pub fn eps(&self) -> Result<RingElement> {
        let base = self.dual_base()?;
        self.dual_from_parts(base.zero(), base.one())
    }

    /// `ε ↦ 0`, as a map `R[ε] → R`.
    pub fn augmentation_hom(&self) -> Result<RingMap> {
        let n = self.dual_base()?.size as u32;
        Ok(RingMap {
            table: self.elements().map(|u| RingElement(u.0 % n)).collect(),
        })
    }

    /// `ε ↦ aε`, identity on the base, as an endomorphism of `R[ε]`.
    pub fn scaling_endo(&self, a: RingElement) -> Result<RingMap> {
        let base = self.dual_base()?;
        let n = base.size as u32;
        Ok(RingMap {
            table: self
                .elements()
                .map(|u| {
                    let (x, y) = (RingElement(u.0 % n), RingElement(u.0 / n));
                    RingElement(x.0 + n * base.mul(a, y).0)
                })
                .collect(),
        })
    }
}
