//! Binary quadratic forms `a x^2 + b x y + c y^2` in three flavors.
//!
//! * **plain** forms are sections of `Sym^2 V` and are compared under the
//!   substitution action `g . f = f(kx + ly, mx + ny)`;
//! * **twisted** forms live in `Sym^2 V (x) det V^*` and are compared under
//!   `g . f = det(g)^{-1} f(kx + ly, mx + ny)`;
//! * **linear** forms live in `Sym^2 V (x) L` and are compared under the
//!   twisted action together with scaling by units of the base ring.
//!
//! The bases of `V` and `L` are implicit: a form is its coefficient triple.
//! With the substitution convention the `GL_2` actions are right actions,
//! `(gh) . f = h . (g . f)`.

mod equivalence;
mod reduce;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Gl2;
use crate::rings::{check_same, element_from_json, element_to_json, Ring, RingElement, RingError};

pub use equivalence::{
    canonical_definite, equivalent, equivalent_under, EquivalenceGroup, SearchBound, Transform,
};
pub use reduce::{is_reduced, reduce_posdef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("determinant {0} is not a unit")]
    NonUnitDeterminant(RingElement),
    #[error("scalar {0} is not a unit")]
    NonUnitScalar(RingElement),
    #[error("operation needs a {expected} form, got a {found} form")]
    WrongFlavor { expected: Flavor, found: Flavor },
    #[error("forms have different flavors: {0} and {1}")]
    FlavorMismatch(Flavor, Flavor),
    #[error("operation is only defined over Z, not {0}")]
    NotOverIntegers(Ring),
    #[error("discriminant {0} is not negative")]
    NotDefinite(BigInt),
    #[error("leading coefficient {0} is not positive")]
    NotPositive(BigInt),
    #[error("discriminant {0} is not congruent to 0 or 1 mod 4")]
    BadDiscriminant(BigInt),
    #[error("malformed form JSON: {0}")]
    BadJson(String),
}

/// Which equivalence notion a form participates in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Plain,
    Twisted,
    Linear,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Plain, Flavor::Twisted, Flavor::Linear];

    /// The group whose orbits are the isomorphism classes of this flavor.
    pub fn equivalence_group(self) -> EquivalenceGroup {
        match self {
            Flavor::Plain => EquivalenceGroup::Gl2Plain,
            Flavor::Twisted => EquivalenceGroup::Gl2Twisted,
            Flavor::Linear => EquivalenceGroup::Gl2TwistedGl1,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Plain => "plain",
            Flavor::Twisted => "twisted",
            Flavor::Linear => "linear",
        })
    }
}

impl std::str::FromStr for Flavor {
    type Err = FormError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Flavor::Plain),
            "twisted" => Ok(Flavor::Twisted),
            "linear" => Ok(Flavor::Linear),
            other => Err(FormError::BadJson(format!("unknown flavor {other:?}"))),
        }
    }
}

/// How a matrix acts by substitution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gl2Mode {
    Plain,
    Twisted,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BQForm {
    pub a: RingElement,
    pub b: RingElement,
    pub c: RingElement,
    pub flavor: Flavor,
}

impl BQForm {
    pub fn new(
        a: RingElement,
        b: RingElement,
        c: RingElement,
        flavor: Flavor,
    ) -> Result<BQForm, FormError> {
        check_same(a.ring(), b.ring())?;
        check_same(a.ring(), c.ring())?;
        Ok(BQForm { a, b, c, flavor })
    }

    pub fn from_i64(ring: Ring, coeffs: [i64; 3], flavor: Flavor) -> BQForm {
        BQForm {
            a: ring.from_i64(coeffs[0]),
            b: ring.from_i64(coeffs[1]),
            c: ring.from_i64(coeffs[2]),
            flavor,
        }
    }

    /// An integral form of the given flavor.
    pub fn int(coeffs: [i64; 3], flavor: Flavor) -> BQForm {
        BQForm::from_i64(Ring::Integers, coeffs, flavor)
    }

    pub fn ring(&self) -> Ring {
        self.a.ring()
    }

    pub fn coeffs(&self) -> [&RingElement; 3] {
        [&self.a, &self.b, &self.c]
    }

    pub fn with_flavor(&self, flavor: Flavor) -> BQForm {
        BQForm {
            flavor,
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    /// `b^2 - 4ac`.
    pub fn discriminant(&self) -> RingElement {
        self.b.square() - (&self.a * &self.c).scale(4)
    }

    pub fn is_primitive(&self) -> bool {
        self.ring()
            .generates_unit_ideal(&[self.a.clone(), self.b.clone(), self.c.clone()])
            .expect("coefficients share a ring")
    }

    /// Value at `(x, y)`.
    pub fn eval(&self, x: &RingElement, y: &RingElement) -> RingElement {
        &self.a * &x.square() + &self.b * &(x * y) + &self.c * &y.square()
    }

    /// Apply `g` by substitution, dividing by `det g` in twisted mode.
    pub fn apply_gl2(&self, g: &Gl2, mode: Gl2Mode) -> Result<BQForm, FormError> {
        check_same(self.ring(), g.ring())?;
        let det = g.det();
        let inv = det
            .inverse()
            .ok_or_else(|| FormError::NonUnitDeterminant(det.clone()))?;
        let substituted = self.substitute(g);
        Ok(match mode {
            Gl2Mode::Plain => substituted,
            Gl2Mode::Twisted => substituted.scaled(&inv),
        })
    }

    /// `(u a, u b, u c)` for a unit `u`; only linear forms carry this action.
    pub fn apply_gl1(&self, u: &RingElement) -> Result<BQForm, FormError> {
        check_same(self.ring(), u.ring())?;
        if self.flavor != Flavor::Linear {
            return Err(FormError::WrongFlavor {
                expected: Flavor::Linear,
                found: self.flavor,
            });
        }
        if !u.is_unit() {
            return Err(FormError::NonUnitScalar(u.clone()));
        }
        Ok(self.scaled(u))
    }

    /// `f(kx + ly, mx + ny)`.
    pub(crate) fn substitute(&self, g: &Gl2) -> BQForm {
        let m = &g.matrix().m;
        let (k, l, mm, n) = (&m[0][0], &m[0][1], &m[1][0], &m[1][1]);
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let a2 = a * &k.square() + b * &(k * mm) + c * &mm.square();
        let b2 = (a * &(k * l)).scale(2) + b * &(k * n + l * mm) + (c * &(mm * n)).scale(2);
        let c2 = a * &l.square() + b * &(l * n) + c * &n.square();
        BQForm {
            a: a2,
            b: b2,
            c: c2,
            flavor: self.flavor,
        }
    }

    pub(crate) fn scaled(&self, u: &RingElement) -> BQForm {
        BQForm {
            a: u * &self.a,
            b: u * &self.b,
            c: u * &self.c,
            flavor: self.flavor,
        }
    }

    /// Coefficients as integers, when the form is integral.
    pub fn int_coeffs(&self) -> Result<[BigInt; 3], FormError> {
        match (self.a.as_int(), self.b.as_int(), self.c.as_int()) {
            (Some(a), Some(b), Some(c)) => Ok([a.clone(), b.clone(), c.clone()]),
            _ => Err(FormError::NotOverIntegers(self.ring())),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ring": self.ring(),
            "coeffs": [element_to_json(&self.a), element_to_json(&self.b), element_to_json(&self.c)],
            "flavor": self.flavor,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<BQForm, FormError> {
        let ring: Ring = serde_json::from_value(v.get("ring").cloned().unwrap_or_default())
            .map_err(|e| FormError::BadJson(e.to_string()))?;
        let flavor = match v.get("flavor") {
            None => Flavor::Plain,
            Some(f) => serde_json::from_value(f.clone()).map_err(|e| FormError::BadJson(e.to_string()))?,
        };
        let coeffs = v
            .get("coeffs")
            .and_then(|c| c.as_array())
            .filter(|c| c.len() == 3)
            .ok_or_else(|| FormError::BadJson("coeffs must be a 3-element array".into()))?;
        Ok(BQForm {
            a: element_from_json(ring, &coeffs[0])?,
            b: element_from_json(ring, &coeffs[1])?,
            c: element_from_json(ring, &coeffs[2])?,
            flavor,
        })
    }
}

impl fmt::Display for BQForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// The principal form of discriminant `D`: `(1, 0, -D/4)` or `(1, 1, (1 - D)/4)`.
pub fn principal_form(d: &BigInt) -> Result<BQForm, FormError> {
    let four = BigInt::from(4);
    let zz = Ring::Integers;
    match d.mod_floor(&four).to_string().as_str() {
        "0" => Ok(BQForm {
            a: zz.one(),
            b: zz.zero(),
            c: zz.from_bigint(&(-d / &four)),
            flavor: Flavor::Twisted,
        }),
        "1" => Ok(BQForm {
            a: zz.one(),
            b: zz.one(),
            c: zz.from_bigint(&((BigInt::from(1) - d) / &four)),
            flavor: Flavor::Twisted,
        }),
        _ => Err(FormError::BadDiscriminant(d.clone())),
    }
}

/// Validate `D = 0, 1 mod 4` and `D < 0`.
pub(crate) fn check_negative_discriminant(d: &BigInt) -> Result<(), FormError> {
    if !d.is_negative() {
        return Err(FormError::NotDefinite(d.clone()));
    }
    let r = d.mod_floor(&BigInt::from(4));
    if !(r.is_zero() || r == BigInt::from(1)) {
        return Err(FormError::BadDiscriminant(d.clone()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zf(c: [i64; 3]) -> BQForm {
        BQForm::int(c, Flavor::Plain)
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(zf([1, 1, 6]).discriminant(), Ring::Integers.from_i64(-23));
        assert_eq!(zf([0, 0, 0]).discriminant(), Ring::Integers.zero());
        let r5 = Ring::zmod(5).unwrap();
        assert_eq!(
            BQForm::from_i64(r5, [2, 1, 3], Flavor::Plain).discriminant(),
            r5.from_i64(2)
        );
    }

    #[test]
    fn gl2_action_examples() {
        let zz = Ring::Integers;
        let refl = Gl2::reflection(zz);
        let f = zf([5, 7, -2]);
        assert_eq!(
            f.apply_gl2(&refl, Gl2Mode::Twisted).unwrap(),
            zf([-5, 7, 2])
        );
        assert_eq!(
            zf([1, 0, -3]).apply_gl2(&refl, Gl2Mode::Twisted).unwrap(),
            zf([-1, 0, 3])
        );
        let id = Gl2::identity(zz);
        for mode in [Gl2Mode::Plain, Gl2Mode::Twisted] {
            assert_eq!(f.apply_gl2(&id, mode).unwrap(), f);
        }
    }

    #[test]
    fn substitution_matches_direct_evaluation() {
        let zz = Ring::Integers;
        let f = zf([3, -4, 7]);
        let g = Gl2::from_i64(zz, [[2, 3], [1, 2]]).unwrap();
        let h = f.apply_gl2(&g, Gl2Mode::Plain).unwrap();
        for x in -3..=3 {
            for y in -3..=3 {
                let (x, y) = (zz.from_i64(x), zz.from_i64(y));
                let gx = &zz.from_i64(2) * &x + &zz.from_i64(3) * &y;
                let gy = &x + &zz.from_i64(2) * &y;
                assert_eq!(h.eval(&x, &y), f.eval(&gx, &gy));
            }
        }
    }

    #[test]
    fn non_unit_determinant_rejected() {
        // Gl2 cannot hold a non-unit determinant, so the check lives in its constructor.
        let zz = Ring::Integers;
        assert!(Gl2::from_i64(zz, [[2, 0], [0, 1]]).is_err());
        let r4 = Ring::zmod(4).unwrap();
        assert!(Gl2::from_i64(r4, [[2, 1], [0, 1]]).is_err());
    }

    #[test]
    fn gl1_examples() {
        let zz = Ring::Integers;
        let f = BQForm::int([2, 1, 3], Flavor::Linear);
        assert_eq!(
            f.apply_gl1(&zz.from_i64(-1)).unwrap(),
            BQForm::int([-2, -1, -3], Flavor::Linear)
        );
        assert_eq!(f.apply_gl1(&zz.one()).unwrap(), f);
        assert!(matches!(
            f.apply_gl1(&zz.from_i64(2)),
            Err(FormError::NonUnitScalar(_))
        ));
        assert!(matches!(
            zf([2, 1, 3]).apply_gl1(&zz.one()),
            Err(FormError::WrongFlavor { .. })
        ));

        let r5 = Ring::zmod(5).unwrap();
        let g = BQForm::from_i64(r5, [1, 0, 1], Flavor::Linear);
        let scaled = g.apply_gl1(&r5.from_i64(2)).unwrap();
        assert_eq!(scaled, BQForm::from_i64(r5, [2, 0, 2], Flavor::Linear));
        assert_eq!(g.discriminant(), r5.from_i64(-4));
        assert_eq!(scaled.discriminant(), r5.from_i64(-16));
        assert_eq!(scaled.discriminant(), &r5.from_i64(4) * &g.discriminant());
    }

    #[test]
    fn primitivity_examples() {
        assert!(zf([2, 1, 3]).is_primitive());
        assert!(!zf([2, 0, 2]).is_primitive());
        let r3 = Ring::zmod(3).unwrap();
        assert!(!BQForm::from_i64(r3, [0, 0, 0], Flavor::Plain).is_primitive());
        assert!(BQForm::from_i64(r3, [0, 1, 0], Flavor::Plain).is_primitive());
    }

    #[test]
    fn principal_form_examples() {
        assert_eq!(principal_form(&BigInt::from(-23)).unwrap().int_coeffs().unwrap(), [1, 1, 6].map(BigInt::from));
        assert_eq!(principal_form(&BigInt::from(-4)).unwrap().int_coeffs().unwrap(), [1, 0, 1].map(BigInt::from));
        assert_eq!(principal_form(&BigInt::from(12)).unwrap().int_coeffs().unwrap(), [1, 0, -3].map(BigInt::from));
        assert!(matches!(principal_form(&BigInt::from(-5)), Err(FormError::BadDiscriminant(_))));
        assert!(principal_form(&BigInt::from(3)).is_err());
        for d in [-23i64, -4, 12, 5, -47, 0, 1] {
            let f = principal_form(&BigInt::from(d)).unwrap();
            assert_eq!(f.discriminant(), Ring::Integers.from_i64(d));
        }
    }

    #[test]
    fn json_roundtrip() {
        let r5 = Ring::zmod(5).unwrap();
        let f = BQForm::from_i64(r5, [2, 1, 3], Flavor::Linear);
        let j = f.to_json();
        assert_eq!(j["ring"], serde_json::json!({"zmod": 5}));
        assert_eq!(j["coeffs"], serde_json::json!([2, 1, 3]));
        assert_eq!(BQForm::from_json(&j).unwrap(), f);
        let g = zf([-1, 0, 3]);
        assert_eq!(BQForm::from_json(&g.to_json()).unwrap(), g);
        assert!(BQForm::from_json(&serde_json::json!({"ring": "Z", "coeffs": [1, 2]})).is_err());
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn small_gl2_z() -> impl Strategy<Value = Gl2> {
        // Products of elementary matrices keep the determinant at +-1.
        proptest::collection::vec((0u8..3, -4i64..=4), 0..6).prop_map(|steps| {
            let zz = Ring::Integers;
            let mut g = Gl2::identity(zz);
            for (kind, k) in steps {
                let e = match kind {
                    0 => [[1, k], [0, 1]],
                    1 => [[1, 0], [k, 1]],
                    _ => [[1, 0], [0, -1]],
                };
                g = g.mul(&Gl2::from_i64(zz, e).unwrap());
            }
            g
        })
    }

    proptest! {
        #[test]
        fn twisted_action_preserves_discriminant(a in -50i64..50, b in -50i64..50, c in -50i64..50, g in small_gl2_z()) {
            let f = BQForm::int([a, b, c], Flavor::Twisted);
            let h = f.apply_gl2(&g, Gl2Mode::Twisted).unwrap();
            prop_assert_eq!(h.discriminant(), f.discriminant());
            let p = f.apply_gl2(&g, Gl2Mode::Plain).unwrap();
            prop_assert_eq!(p.discriminant(), g.det().square() * f.discriminant());
            prop_assert_eq!(h.is_primitive(), f.is_primitive());
            prop_assert_eq!(p.is_primitive(), f.is_primitive());
        }

        #[test]
        fn right_action_law_over_z(a in -30i64..30, b in -30i64..30, c in -30i64..30, g in small_gl2_z(), h in small_gl2_z()) {
            let f = BQForm::int([a, b, c], Flavor::Plain);
            for mode in [Gl2Mode::Plain, Gl2Mode::Twisted] {
                let lhs = f.apply_gl2(&g.mul(&h), mode).unwrap();
                let rhs = f.apply_gl2(&g, mode).unwrap().apply_gl2(&h, mode).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn action_laws_exhaustive_small_rings() {
        for n in [2u64, 3] {
            let ring = Ring::Zmod(n);
            let group = Gl2::all(ring).unwrap();
            let elems = ring.elements().unwrap();
            for a in &elems {
                for b in &elems {
                    for c in &elems {
                        let f = BQForm::new(a.clone(), b.clone(), c.clone(), Flavor::Linear).unwrap();
                        for g in &group {
                            let t = f.apply_gl2(g, Gl2Mode::Twisted).unwrap();
                            assert_eq!(t.discriminant(), f.discriminant());
                            let p = f.apply_gl2(g, Gl2Mode::Plain).unwrap();
                            assert_eq!(p.discriminant(), g.det().square() * f.discriminant());
                            assert_eq!(t.is_primitive(), f.is_primitive());
                            for u in ring.units() {
                                assert_eq!(f.apply_gl1(&u).unwrap().is_primitive(), f.is_primitive());
                            }
                        }
                        if n == 2 {
                            for g in &group {
                                for h in &group {
                                    for mode in [Gl2Mode::Plain, Gl2Mode::Twisted] {
                                        assert_eq!(
                                            f.apply_gl2(&g.mul(h), mode).unwrap(),
                                            f.apply_gl2(g, mode).unwrap().apply_gl2(h, mode).unwrap()
                                        );
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}
