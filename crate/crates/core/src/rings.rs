//! Commutative base rings: the integers and the residue rings `Z/n`.
//!
//! A [`Ring`] is a small copyable descriptor; a [`RingElement`] carries the
//! ring it belongs to, so every value knows its context. Residues are always
//! kept in the canonical range `[0, n)`.
//!
//! Arithmetic operators panic when the two operands live in different rings.
//! The fallible `try_*` methods report the same situation as
//! [`RingError::ContextMismatch`], and every higher-level constructor in this
//! crate checks contexts before doing any arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("invalid modulus {0}: residue rings need n >= 2")]
    InvalidModulus(String),
    #[error("elements from different rings: {left} and {right}")]
    ContextMismatch { left: Ring, right: Ring },
    #[error("cannot parse ring descriptor {0:?} (expected \"Z\" or \"zmod:<n>\")")]
    BadDescriptor(String),
    #[error("cannot parse ring element {0:?}")]
    BadElement(String),
    #[error("residue {value} is outside [0, {modulus})")]
    NonCanonical { value: String, modulus: u64 },
    #[error("{0} is not a unit")]
    NotInvertible(RingElement),
}

/// Descriptor of a base ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Integers,
    Zmod(u64),
}

impl Ring {
    pub fn integers() -> Ring {
        Ring::Integers
    }

    /// The residue ring `Z/n`. The zero ring (`n = 1`) and `n = 0` are rejected.
    pub fn zmod(n: u64) -> Result<Ring, RingError> {
        if n < 2 {
            return Err(RingError::InvalidModulus(n.to_string()));
        }
        Ok(Ring::Zmod(n))
    }

    pub fn modulus(&self) -> Option<u64> {
        match *self {
            Ring::Integers => None,
            Ring::Zmod(n) => Some(n),
        }
    }

    /// Number of elements, `None` for the integers.
    pub fn cardinality(&self) -> Option<u64> {
        self.modulus()
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ring::Zmod(_))
    }

    /// True for `Z/p^k`; the integers are not local.
    pub fn is_local(&self) -> bool {
        match *self {
            Ring::Integers => false,
            Ring::Zmod(n) => {
                let p = smallest_prime_factor(n);
                let mut m = n;
                while m % p == 0 {
                    m /= p;
                }
                m == 1
            }
        }
    }

    pub fn zero(&self) -> RingElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> RingElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> RingElement {
        match *self {
            Ring::Integers => RingElement(Repr::Int(BigInt::from(v))),
            Ring::Zmod(n) => {
                let r = (v as i128).rem_euclid(n as i128) as u64;
                RingElement(Repr::Mod { value: r, modulus: n })
            }
        }
    }

    /// Image of an integer under the canonical map `Z -> self`.
    pub fn from_bigint(&self, v: &BigInt) -> RingElement {
        match *self {
            Ring::Integers => RingElement(Repr::Int(v.clone())),
            Ring::Zmod(n) => {
                let r = v.mod_floor(&BigInt::from(n));
                RingElement(Repr::Mod {
                    value: r.to_u64().expect("residue fits in u64"),
                    modulus: n,
                })
            }
        }
    }

    /// All elements in increasing residue order; `None` for the integers.
    pub fn elements(&self) -> Option<Vec<RingElement>> {
        let n = self.modulus()?;
        Some(
            (0..n)
                .map(|value| RingElement(Repr::Mod { value, modulus: n }))
                .collect(),
        )
    }

    /// The unit group, listed in increasing order. Over the integers this is `{1, -1}`.
    pub fn units(&self) -> Vec<RingElement> {
        match self.elements() {
            Some(all) => all.into_iter().filter(RingElement::is_unit).collect(),
            None => vec![self.one(), self.from_i64(-1)],
        }
    }

    /// Whether `xs` generate the unit ideal. Over `Z` this is `gcd = 1`, over
    /// `Z/n` it is `gcd(x_1, ..., x_k, n) = 1`. The empty list generates `(0)`.
    pub fn generates_unit_ideal(&self, xs: &[RingElement]) -> Result<bool, RingError> {
        if xs.is_empty() {
            return Ok(false);
        }
        let mut g = match *self {
            Ring::Integers => BigInt::zero(),
            Ring::Zmod(n) => BigInt::from(n),
        };
        for x in xs {
            check_same(*self, x.ring())?;
            g = g.gcd(&x.lift());
        }
        Ok(g.is_one())
    }

    /// Parse a ring element written as a decimal integer; residues are reduced.
    pub fn parse_element(&self, s: &str) -> Result<RingElement, RingError> {
        let v: BigInt = s
            .trim()
            .parse()
            .map_err(|_| RingError::BadElement(s.to_string()))?;
        Ok(self.from_bigint(&v))
    }
}

/// Build a ring context from its descriptor.
pub fn make_context(descriptor: &str) -> Result<Ring, RingError> {
    descriptor.parse()
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

pub(crate) fn check_same(left: Ring, right: Ring) -> Result<(), RingError> {
    if left == right {
        Ok(())
    } else {
        Err(RingError::ContextMismatch { left, right })
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Zmod(n) => write!(f, "zmod:{n}"),
        }
    }
}

impl FromStr for Ring {
    type Err = RingError;

    /// Accepts `Z`, `zmod:<n>`, `Z/<n>` and `Z/nZ`-style spellings.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "Z" || t.eq_ignore_ascii_case("integers") {
            return Ok(Ring::Integers);
        }
        let rest = t
            .strip_prefix("zmod:")
            .or_else(|| t.strip_prefix("Zmod:"))
            .or_else(|| t.strip_prefix("Z/"))
            .ok_or_else(|| RingError::BadDescriptor(s.to_string()))?;
        let rest = rest.strip_suffix('Z').unwrap_or(rest);
        let n: u64 = rest
            .parse()
            .map_err(|_| RingError::BadDescriptor(s.to_string()))?;
        Ring::zmod(n)
    }
}

impl Serialize for Ring {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            Ring::Integers => serializer.serialize_str("Z"),
            Ring::Zmod(n) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("zmod", &n)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Ring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Name(String),
            Zmod { zmod: u64 },
        }
        match Wire::deserialize(deserializer)? {
            Wire::Name(s) if s == "Z" => Ok(Ring::Integers),
            Wire::Name(s) => Err(de::Error::custom(format!(
                "unknown ring descriptor {s:?}"
            ))),
            Wire::Zmod { zmod } => Ring::zmod(zmod).map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Int(BigInt),
    Mod { value: u64, modulus: u64 },
}

/// An element of a [`Ring`], stored canonically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement(Repr);

impl RingElement {
    pub fn ring(&self) -> Ring {
        match self.0 {
            Repr::Int(_) => Ring::Integers,
            Repr::Mod { modulus, .. } => Ring::Zmod(modulus),
        }
    }

    /// The canonical integer representative (the residue in `[0, n)` for `Z/n`).
    pub fn lift(&self) -> BigInt {
        match &self.0 {
            Repr::Int(v) => v.clone(),
            Repr::Mod { value, .. } => BigInt::from(*value),
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match &self.0 {
            Repr::Int(v) => Some(v),
            Repr::Mod { .. } => None,
        }
    }

    pub fn residue(&self) -> Option<u64> {
        match self.0 {
            Repr::Int(_) => None,
            Repr::Mod { value, .. } => Some(value),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Int(v) => v.to_i64(),
            Repr::Mod { value, .. } => i64::try_from(*value).ok(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Int(v) => v.is_zero(),
            Repr::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Int(v) => v.is_one(),
            Repr::Mod { value, .. } => *value == 1,
        }
    }

    /// True iff some `y` satisfies `x * y = 1`.
    pub fn is_unit(&self) -> bool {
        match &self.0 {
            Repr::Int(v) => v.abs().is_one(),
            Repr::Mod { value, modulus } => value.gcd(modulus) == 1,
        }
    }

    pub fn inverse(&self) -> Option<RingElement> {
        match &self.0 {
            Repr::Int(v) => v.abs().is_one().then(|| self.clone()),
            Repr::Mod { value, modulus } => {
                let eg = (*value as i128).extended_gcd(&(*modulus as i128));
                (eg.gcd == 1).then(|| {
                    let inv = eg.x.rem_euclid(*modulus as i128) as u64;
                    RingElement(Repr::Mod {
                        value: inv,
                        modulus: *modulus,
                    })
                })
            }
        }
    }

    pub fn try_inverse(&self) -> Result<RingElement, RingError> {
        self.inverse()
            .ok_or_else(|| RingError::NotInvertible(self.clone()))
    }

    pub fn try_add(&self, rhs: &RingElement) -> Result<RingElement, RingError> {
        check_same(self.ring(), rhs.ring())?;
        Ok(self.add_unchecked(rhs))
    }

    pub fn try_sub(&self, rhs: &RingElement) -> Result<RingElement, RingError> {
        check_same(self.ring(), rhs.ring())?;
        Ok(self.add_unchecked(&rhs.neg_ref()))
    }

    pub fn try_mul(&self, rhs: &RingElement) -> Result<RingElement, RingError> {
        check_same(self.ring(), rhs.ring())?;
        Ok(self.mul_unchecked(rhs))
    }

    pub fn square(&self) -> RingElement {
        self.mul_unchecked(self)
    }

    /// `self * k` for a machine integer `k`.
    pub fn scale(&self, k: i64) -> RingElement {
        self.mul_unchecked(&self.ring().from_i64(k))
    }

    /// A witness `y` with `x * y = 1`, searched exhaustively; used by tests as
    /// an oracle against [`RingElement::inverse`].
    pub fn brute_force_inverse(&self) -> Option<RingElement> {
        self.ring()
            .elements()?
            .into_iter()
            .find(|y| self.mul_unchecked(y).is_one())
    }

    fn add_unchecked(&self, rhs: &RingElement) -> RingElement {
        match (&self.0, &rhs.0) {
            (Repr::Int(a), Repr::Int(b)) => RingElement(Repr::Int(a + b)),
            (Repr::Mod { value: a, modulus }, Repr::Mod { value: b, .. }) => {
                let s = (*a as u128 + *b as u128) % *modulus as u128;
                RingElement(Repr::Mod {
                    value: s as u64,
                    modulus: *modulus,
                })
            }
            _ => panic!("ring context mismatch: {} vs {}", self.ring(), rhs.ring()),
        }
    }

    fn mul_unchecked(&self, rhs: &RingElement) -> RingElement {
        match (&self.0, &rhs.0) {
            (Repr::Int(a), Repr::Int(b)) => RingElement(Repr::Int(a * b)),
            (Repr::Mod { value: a, modulus }, Repr::Mod { value: b, .. }) => {
                let p = (*a as u128 * *b as u128) % *modulus as u128;
                RingElement(Repr::Mod {
                    value: p as u64,
                    modulus: *modulus,
                })
            }
            _ => panic!("ring context mismatch: {} vs {}", self.ring(), rhs.ring()),
        }
    }

    fn neg_ref(&self) -> RingElement {
        match &self.0 {
            Repr::Int(a) => RingElement(Repr::Int(-a)),
            Repr::Mod { value, modulus } => RingElement(Repr::Mod {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            }),
        }
    }

    fn assert_same(&self, rhs: &RingElement) {
        if self.ring() != rhs.ring() {
            panic!("ring context mismatch: {} vs {}", self.ring(), rhs.ring());
        }
    }
}

impl PartialOrd for RingElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used for canonical representatives: by ring, then by the
/// canonical integer value.
impl Ord for RingElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Int(v) => write!(f, "{v}"),
            Repr::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&RingElement> for &RingElement {
            type Output = RingElement;
            fn $method(self, rhs: &RingElement) -> RingElement {
                self.assert_same(rhs);
                let f: fn(&RingElement, &RingElement) -> RingElement = $body;
                f(self, rhs)
            }
        }
        impl $tr<RingElement> for RingElement {
            type Output = RingElement;
            fn $method(self, rhs: RingElement) -> RingElement {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&RingElement> for RingElement {
            type Output = RingElement;
            fn $method(self, rhs: &RingElement) -> RingElement {
                (&self).$method(rhs)
            }
        }
        impl $tr<RingElement> for &RingElement {
            type Output = RingElement;
            fn $method(self, rhs: RingElement) -> RingElement {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_unchecked(b));
binop!(Sub, sub, |a, b| a.add_unchecked(&b.neg_ref()));
binop!(Mul, mul, |a, b| a.mul_unchecked(b));

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.neg_ref()
    }
}

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        self.neg_ref()
    }
}

/// JSON encoding of a bare element. Integers that fit in an `i64` are written
/// as JSON numbers, larger ones as decimal strings; residues are numbers in
/// `[0, n)`.
pub fn element_to_json(x: &RingElement) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(x.lift().to_string()),
    }
}

/// Inverse of [`element_to_json`]. Residues must already be canonical.
pub fn element_from_json(ring: Ring, v: &serde_json::Value) -> Result<RingElement, RingError> {
    let n: BigInt = match v {
        serde_json::Value::Number(num) => num
            .as_i64()
            .map(BigInt::from)
            .or_else(|| num.as_u64().map(BigInt::from))
            .ok_or_else(|| RingError::BadElement(num.to_string()))?,
        serde_json::Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| RingError::BadElement(s.clone()))?,
        other => return Err(RingError::BadElement(other.to_string())),
    };
    if let Ring::Zmod(m) = ring {
        if n.is_negative() || n >= BigInt::from(m) {
            return Err(RingError::NonCanonical {
                value: n.to_string(),
                modulus: m,
            });
        }
    }
    Ok(ring.from_bigint(&n))
}


#[cfg(test)]
mod axioms {
    use super::*;
    use proptest::prelude::*;

    fn ring_strategy() -> impl Strategy<Value = Ring> {
        prop_oneof![Just(Ring::Integers), (2u64..50).prop_map(Ring::Zmod)]
    }

    proptest! {
        #[test]
        fn ring_axioms(ring in ring_strategy(), a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000) {
            let (x, y, w) = (ring.from_i64(a), ring.from_i64(b), ring.from_i64(c));
            prop_assert_eq!(&(&x + &y) + &w, &x + &(&y + &w));
            prop_assert_eq!(&(&x * &y) * &w, &x * &(&y * &w));
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x * &(&y + &w), &(&x * &y) + &(&x * &w));
            prop_assert_eq!(&x + &ring.zero(), x.clone());
            prop_assert_eq!(&x * &ring.one(), x.clone());
            prop_assert!((&x - &x).is_zero());
        }

        #[test]
        fn unit_ideal_invariant_under_permutation_and_unit_scaling(
            n in 2u64..40, xs in proptest::collection::vec(0u64..40, 1..5), shuffle in any::<u64>(), unit_pick in 0usize..100,
        ) {
            let ring = Ring::Zmod(n);
            let elems: Vec<RingElement> = xs.iter().map(|&v| ring.from_i64(v as i64)).collect();
            let base = ring.generates_unit_ideal(&elems).unwrap();
            let mut permuted = elems.clone();
            permuted.rotate_left((shuffle as usize) % elems.len());
            permuted.reverse();
            prop_assert_eq!(ring.generates_unit_ideal(&permuted).unwrap(), base);
            let units = ring.units();
            let u = &units[unit_pick % units.len()];
            let mut scaled = elems.clone();
            let idx = (shuffle as usize) % scaled.len();
            scaled[idx] = &scaled[idx] * u;
            prop_assert_eq!(ring.generates_unit_ideal(&scaled).unwrap(), base);
        }
    }
}
