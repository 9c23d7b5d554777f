//! Textual ring specifications.
//!
//! ```text
//! spec := "zmod:" INT | "poly:" spec ":" NAME ":" POLY | "dual:" spec
//! ```
//!
//! `POLY` is a sum of terms `c*v^e` built from `*`, `^` and `+` only, with
//! non-negative integer coefficients.

use std::fmt;

use crate::error::{Error, Result};

/// Constructor tree of a finite commutative ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingSpec {
    /// `Z/m`.
    ZMod(u32),
    /// `base[variable]/(modulus)`; `modulus` holds integer coefficients, lowest
    /// degree first, and is monic.
    PolyQuot {
        base: Box<RingSpec>,
        variable: String,
        modulus: Vec<u64>,
    },
    /// `base[ε]/(ε²)`.
    Dual(Box<RingSpec>),
}

impl RingSpec {
    /// The ring `Z/m`. Panics if `m < 2`.
    pub fn zmod(m: u32) -> Self {
        assert!(m >= 2, "Z/m needs m >= 2");
        RingSpec::ZMod(m)
    }

    pub fn dual(base: RingSpec) -> Self {
        RingSpec::Dual(Box::new(base))
    }

    /// Characteristic, i.e. the modulus of the innermost `Z/m`.
    pub fn characteristic(&self) -> u32 {
        match self {
            RingSpec::ZMod(m) => *m,
            RingSpec::PolyQuot { base, .. } | RingSpec::Dual(base) => base.characteristic(),
        }
    }

    /// Number of elements, computed without overflow.
    pub fn carrier_size(&self) -> u128 {
        match self {
            RingSpec::ZMod(m) => *m as u128,
            RingSpec::PolyQuot { base, modulus, .. } => base
                .carrier_size()
                .saturating_pow((modulus.len() - 1) as u32),
            RingSpec::Dual(base) => base.carrier_size().saturating_pow(2),
        }
    }

    pub fn is_dual(&self) -> bool {
        matches!(self, RingSpec::Dual(_))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::ZMod(m) => write!(f, "zmod:{m}"),
            RingSpec::Dual(base) => write!(f, "dual:{base}"),
            RingSpec::PolyQuot {
                base,
                variable,
                modulus,
            } => {
                write!(f, "poly:{base}:{variable}:")?;
                let mut first = true;
                for (e, &c) in modulus.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    if !first {
                        write!(f, "+")?;
                    }
                    first = false;
                    match (c, e) {
                        (c, 0) => write!(f, "{c}")?,
                        (1, 1) => write!(f, "{variable}")?,
                        (1, e) => write!(f, "{variable}^{e}")?,
                        (c, 1) => write!(f, "{c}*{variable}")?,
                        (c, e) => write!(f, "{c}*{variable}^{e}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

struct Tokens<'a> {
    parts: Vec<(usize, &'a str)>,
    next: usize,
    end: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut parts = Vec::new();
        let mut start = 0;
        for (i, ch) in text.char_indices() {
            if ch == ':' {
                parts.push((start, &text[start..i]));
                start = i + 1;
            }
        }
        parts.push((start, &text[start..]));
        Tokens {
            parts,
            next: 0,
            end: text.len(),
        }
    }

    fn take(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.parts.get(self.next) {
            Some(&t) => {
                self.next += 1;
                Ok(t)
            }
            None => Err(Error::Parse {
                position: self.end,
                message: format!("expected {what}, found end of input"),
            }),
        }
    }
}

fn parse_error(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

/// Parses a ring specification and enforces the carrier-size cap.
pub fn parse_ring_spec(text: &str, carrier_cap: usize) -> Result<RingSpec> {
    let mut tokens = Tokens::new(text.trim());
    let spec = parse_node(&mut tokens)?;
    if let Some(&(pos, tok)) = tokens.parts.get(tokens.next) {
        return Err(parse_error(
            pos,
            format!("unexpected trailing input `{tok}`"),
        ));
    }
    let size = spec.carrier_size();
    if size > carrier_cap as u128 {
        return Err(Error::CarrierTooLarge {
            size,
            cap: carrier_cap,
        });
    }
    Ok(spec)
}

fn parse_node(tokens: &mut Tokens<'_>) -> Result<RingSpec> {
    let (pos, head) = tokens.take("ring constructor")?;
    match head {
        "zmod" => {
            let (pos, num) = tokens.take("modulus")?;
            let m: u32 = num
                .parse()
                .map_err(|_| parse_error(pos, format!("invalid modulus `{num}`")))?;
            if m < 2 {
                return Err(parse_error(pos, "modulus must be at least 2"));
            }
            Ok(RingSpec::ZMod(m))
        }
        "dual" => Ok(RingSpec::Dual(Box::new(parse_node(tokens)?))),
        "poly" => {
            let base = parse_node(tokens)?;
            let (npos, name) = tokens.take("variable name")?;
            if name.is_empty()
                || !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(parse_error(npos, format!("invalid variable name `{name}`")));
            }
            let (ppos, poly) = tokens.take("polynomial")?;
            let modulus = parse_poly(poly, name, ppos, base.characteristic())?;
            Ok(RingSpec::PolyQuot {
                base: Box::new(base),
                variable: name.to_string(),
                modulus,
            })
        }
        other => Err(parse_error(pos, format!("unknown constructor `{other}`"))),
    }
}

fn parse_poly(text: &str, var: &str, offset: usize, characteristic: u32) -> Result<Vec<u64>> {
    let mut coeffs: Vec<u64> = Vec::new();
    let mut pos = offset;
    for term in text.split('+') {
        let (c, e) = parse_term(term, var, pos)?;
        if coeffs.len() <= e {
            coeffs.resize(e + 1, 0);
        }
        coeffs[e] = (coeffs[e] + c % characteristic as u64) % characteristic as u64;
        pos += term.len() + 1;
    }
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    if coeffs.len() < 2 {
        return Err(parse_error(offset, "modulus must have degree at least 1"));
    }
    if *coeffs.last().unwrap() != 1 {
        return Err(parse_error(offset, "modulus must be monic"));
    }
    Ok(coeffs)
}

fn parse_term(term: &str, var: &str, pos: usize) -> Result<(u64, usize)> {
    let bad = || parse_error(pos, format!("invalid term `{term}`"));
    if term.is_empty() {
        return Err(bad());
    }
    let (coeff, power) = match term.split_once('*') {
        Some((c, p)) => (Some(c), Some(p)),
        None if term.starts_with(var) => (None, Some(term)),
        None => (Some(term), None),
    };
    let c = match coeff {
        Some(c) => c.parse::<u64>().map_err(|_| bad())?,
        None => 1,
    };
    let e = match power {
        None => 0,
        Some(p) => {
            let rest = p.strip_prefix(var).ok_or_else(bad)?;
            if rest.is_empty() {
                1
            } else {
                rest.strip_prefix('^')
                    .ok_or_else(bad)?
                    .parse::<usize>()
                    .map_err(|_| bad())?
            }
        }
    };
    Ok((c, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: usize = 4096;

    #[test]
    fn parses_basic_constructors() {
        assert_eq!(parse_ring_spec("zmod:7", CAP).unwrap(), RingSpec::ZMod(7));
        assert_eq!(
            parse_ring_spec("dual:zmod:7", CAP).unwrap(),
            RingSpec::dual(RingSpec::ZMod(7))
        );
        assert_eq!(
            parse_ring_spec("poly:zmod:7:t:t^2", CAP).unwrap(),
            RingSpec::PolyQuot {
                base: Box::new(RingSpec::ZMod(7)),
                variable: "t".into(),
                modulus: vec![0, 0, 1],
            }
        );
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "zmod:49",
            "poly:zmod:3:x:x^2+1",
            "dual:poly:zmod:7:t:t^2",
            "poly:zmod:5:x:x^3+2*x+4",
        ] {
            let spec = parse_ring_spec(text, CAP).unwrap();
            assert_eq!(spec.to_string(), text);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        for (text, pos) in [
            ("zmod:1", 5),
            ("zmod:x", 5),
            ("ring:3", 0),
            ("poly:zmod:7:t:2*t^2", 14),
            ("poly:zmod:7:t:3", 14),
            ("zmod:7:extra", 7),
        ] {
            match parse_ring_spec(text, CAP) {
                Err(Error::Parse { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_ring_spec("poly:zmod:7", CAP),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn enforces_carrier_cap() {
        assert_eq!(
            parse_ring_spec("dual:zmod:101", CAP),
            Err(Error::CarrierTooLarge {
                size: 10201,
                cap: CAP
            })
        );
        assert!(parse_ring_spec("dual:zmod:101", 20000).is_ok());
    }

    #[test]
    fn leading_coefficient_reduced_mod_characteristic() {
        // 8 = 1 in Z/7, so 8*t^2 is monic there.
        let spec = parse_ring_spec("poly:zmod:7:t:8*t^2+t", CAP).unwrap();
        assert_eq!(spec.to_string(), "poly:zmod:7:t:t^2+t");
    }
}
