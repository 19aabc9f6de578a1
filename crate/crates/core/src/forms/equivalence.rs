//! Equivalence of forms under the various `GL_2` (and `GL_1`) actions.
//!
//! * finite rings: exhaustive search over the whole group;
//! * definite integral forms: comparison of reduced representatives;
//! * other integral forms: a bounded search over matrices with entries of
//!   absolute value at most [`SearchBound::max_entry`]. An empty answer there
//!   only means that no witness of that size exists.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{reduce_posdef, BQForm, FormError, Gl2Mode};
use crate::matrix::{Gl2, Mat2};
use crate::rings::{Ring, RingElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivalenceGroup {
    /// Determinant-one matrices acting by substitution.
    Sl2,
    /// `GL_2` acting by substitution.
    Gl2Plain,
    /// `GL_2` acting by substitution divided by the determinant.
    Gl2Twisted,
    /// The twisted action together with unit scalings.
    Gl2TwistedGl1,
}

impl EquivalenceGroup {
    fn mode(self) -> Gl2Mode {
        match self {
            EquivalenceGroup::Sl2 | EquivalenceGroup::Gl2Plain => Gl2Mode::Plain,
            EquivalenceGroup::Gl2Twisted | EquivalenceGroup::Gl2TwistedGl1 => Gl2Mode::Twisted,
        }
    }

    fn admits(self, t: &Transform) -> bool {
        match self {
            EquivalenceGroup::Sl2 => t.g.det().is_one() && t.unit.is_one(),
            EquivalenceGroup::Gl2Plain | EquivalenceGroup::Gl2Twisted => t.unit.is_one(),
            EquivalenceGroup::Gl2TwistedGl1 => true,
        }
    }

    /// Every element of the group over a finite ring, in a fixed order.
    pub fn elements(self, ring: Ring) -> Option<Vec<Transform>> {
        let gl2 = Gl2::all(ring)?;
        let units = match self {
            EquivalenceGroup::Gl2TwistedGl1 => ring.units(),
            _ => vec![ring.one()],
        };
        let mut out = Vec::new();
        for g in gl2 {
            if self == EquivalenceGroup::Sl2 && !g.det().is_one() {
                continue;
            }
            for u in &units {
                out.push(Transform {
                    g: g.clone(),
                    unit: u.clone(),
                });
            }
        }
        Some(out)
    }
}

/// A group element `(g, u)` acting by `f -> u * (g . f)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transform {
    pub g: Gl2,
    pub unit: RingElement,
}

impl Transform {
    pub fn identity(ring: Ring) -> Transform {
        Transform {
            g: Gl2::identity(ring),
            unit: ring.one(),
        }
    }

    pub fn matrix(g: Gl2) -> Transform {
        let unit = g.ring().one();
        Transform { g, unit }
    }

    pub fn act(&self, f: &BQForm, group: EquivalenceGroup) -> BQForm {
        let moved = match group.mode() {
            Gl2Mode::Plain => f.substitute(&self.g),
            Gl2Mode::Twisted => f
                .substitute(&self.g)
                .scaled(&self.g.det().inverse().expect("unit determinant")),
        };
        if self.unit.is_one() {
            moved
        } else {
            moved.scaled(&self.unit)
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Transform) -> Transform {
        Transform {
            g: self.g.mul(&next.g),
            unit: &self.unit * &next.unit,
        }
    }

    pub fn inverse(&self) -> Transform {
        Transform {
            g: self.g.inverse(),
            unit: self.unit.inverse().expect("unit scalar"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBound {
    pub max_entry: i64,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound { max_entry: 50 }
    }
}

/// Equivalence under the group attached to the forms' flavor.
pub fn equivalent(
    f1: &BQForm,
    f2: &BQForm,
    bound: SearchBound,
) -> Result<Option<Transform>, FormError> {
    if f1.flavor != f2.flavor {
        return Err(FormError::FlavorMismatch(f1.flavor, f2.flavor));
    }
    equivalent_under(f1, f2, f1.flavor.equivalence_group(), bound)
}

/// A transform `t` in `group` with `t.act(f1) == f2`, if one is found.
pub fn equivalent_under(
    f1: &BQForm,
    f2: &BQForm,
    group: EquivalenceGroup,
    bound: SearchBound,
) -> Result<Option<Transform>, FormError> {
    crate::rings::check_same(f1.ring(), f2.ring())?;
    if f1.flavor != f2.flavor {
        return Err(FormError::FlavorMismatch(f1.flavor, f2.flavor));
    }
    let ring = f1.ring();
    if f1 == f2 {
        return Ok(Some(Transform::identity(ring)));
    }
    let found = match ring {
        Ring::Zmod(_) => {
            let elements = group.elements(ring).expect("finite ring");
            elements
                .into_par_iter()
                .find_first(|t| &t.act(f1, group) == f2)
        }
        Ring::Integers => {
            // units of Z square to 1, so every group here preserves the discriminant
            let d1 = f1.discriminant();
            if d1 != f2.discriminant() {
                return Ok(None);
            }
            if d1.as_int().expect("integral").is_negative() {
                definite(f1, f2, group)?
            } else {
                bounded_search(f1, f2, group, bound)?
            }
        }
    };
    if let Some(t) = &found {
        debug_assert!(group.admits(t));
        debug_assert_eq!(&t.act(f1, group), f2);
    }
    Ok(found)
}

/// Canonical representative of a definite integral form within its `group`
/// class, with a transform reaching it.
///
/// The representative is the lexicographically smallest reduced positive
/// form in the class, or the negative of one when the class has no positive
/// member (negative forms under `Sl2` or `Gl2Plain`).
pub fn canonical_definite(
    f: &BQForm,
    group: EquivalenceGroup,
) -> Result<(BQForm, Transform), FormError> {
    let ring = Ring::Integers;
    let [a, _, _] = f.int_coeffs()?;
    let d = f.discriminant();
    if !d.as_int().expect("integral").is_negative() {
        return Err(FormError::NotDefinite(d.as_int().cloned().unwrap_or_default()));
    }
    let refl = Gl2::reflection(ring);
    let minus = ring.from_i64(-1);
    let cosets: Vec<Transform> = match group {
        EquivalenceGroup::Sl2 => vec![Transform::identity(ring)],
        EquivalenceGroup::Gl2Plain | EquivalenceGroup::Gl2Twisted => {
            vec![Transform::identity(ring), Transform::matrix(refl)]
        }
        EquivalenceGroup::Gl2TwistedGl1 => vec![
            Transform::identity(ring),
            Transform::matrix(refl.clone()),
            Transform {
                g: Gl2::identity(ring),
                unit: minus.clone(),
            },
            Transform {
                g: refl,
                unit: minus.clone(),
            },
        ],
    };
    let negative = a.is_negative();
    let has_positive_member = !matches!(group, EquivalenceGroup::Sl2 | EquivalenceGroup::Gl2Plain) || !negative;
    let mut best: Option<(BQForm, Transform)> = None;
    for c in cosets {
        let moved = c.act(f, group);
        let start = if has_positive_member { moved } else { moved.scaled(&minus) };
        if start.a.as_int().expect("integral").is_negative() {
            continue;
        }
        let (reduced, w) = reduce_posdef(&start)?;
        let candidate = if has_positive_member { reduced } else { reduced.scaled(&minus) };
        let t = c.then(&Transform::matrix(w));
        if best.as_ref().is_none_or(|(b, _)| candidate < *b) {
            best = Some((candidate, t));
        }
    }
    Ok(best.expect("some coset lands on a positive form"))
}

fn definite(
    f1: &BQForm,
    f2: &BQForm,
    group: EquivalenceGroup,
) -> Result<Option<Transform>, FormError> {
    let (k1, t1) = canonical_definite(f1, group)?;
    let (k2, t2) = canonical_definite(f2, group)?;
    Ok((k1 == k2).then(|| t1.then(&t2.inverse())))
}

fn bounded_search(
    f1: &BQForm,
    f2: &BQForm,
    group: EquivalenceGroup,
    bound: SearchBound,
) -> Result<Option<Transform>, FormError> {
    if f1.is_zero() || f2.is_zero() {
        return Ok(None);
    }
    let ring = Ring::Integers;
    let [a1, b1, c1] = f1.int_coeffs()?;
    let [a2, _, c2] = f2.int_coeffs()?;
    let dets: &[i64] = if group == EquivalenceGroup::Sl2 { &[1] } else { &[1, -1] };
    let units: &[i64] = if group == EquivalenceGroup::Gl2TwistedGl1 { &[1, -1] } else { &[1] };
    let twisted = group.mode() == Gl2Mode::Twisted;
    let eval = |x: &BigInt, y: &BigInt| &a1 * x * x + &b1 * x * y + &c1 * y * y;

    let range: Vec<BigInt> = (-bound.max_entry..=bound.max_entry).map(BigInt::from).collect();
    let solutions = |target: &BigInt| -> Vec<(BigInt, BigInt)> {
        let mut out = Vec::new();
        for x in &range {
            for y in &range {
                if x.is_zero() && y.is_zero() {
                    continue;
                }
                if &eval(x, y) == target {
                    out.push((x.clone(), y.clone()));
                }
            }
        }
        out
    };

    for &det in dets {
        for &unit in units {
            // f2 = unit * det^{-t} * f1(g v), so f1(g v) = lambda * f2
            let lambda = BigInt::from(if twisted { unit * det } else { unit });
            let firsts = solutions(&(&lambda * &a2));
            if firsts.is_empty() {
                continue;
            }
            let seconds = solutions(&(&lambda * &c2));
            let det_big = BigInt::from(det);
            for (k, m) in &firsts {
                for (l, n) in &seconds {
                    if k * n - l * m != det_big {
                        continue;
                    }
                    let g = Gl2::new(Mat2::new(
                        ring.from_bigint(k),
                        ring.from_bigint(l),
                        ring.from_bigint(m),
                        ring.from_bigint(n),
                    )?)?;
                    let t = Transform {
                        g,
                        unit: ring.from_i64(unit),
                    };
                    if &t.act(f1, group) == f2 {
                        return Ok(Some(t));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Flavor;

    fn tf(c: [i64; 3]) -> BQForm {
        BQForm::int(c, Flavor::Twisted)
    }

    #[test]
    fn disc_12_twisted_witness_is_the_reflection() {
        let t = equivalent_under(&tf([1, 0, -3]), &tf([-1, 0, 3]), EquivalenceGroup::Gl2Twisted, SearchBound::default())
            .unwrap()
            .unwrap();
        assert_eq!(t.act(&tf([1, 0, -3]), EquivalenceGroup::Gl2Twisted), tf([-1, 0, 3]));
        assert_eq!(t.g.det(), Ring::Integers.from_i64(-1));
    }

    #[test]
    fn identity_witness_for_equal_forms() {
        let f = tf([2, 1, 3]);
        let t = equivalent(&f, &f, SearchBound::default()).unwrap().unwrap();
        assert_eq!(t, Transform::identity(Ring::Integers));
    }

    #[test]
    fn distinct_reduced_forms_are_sl2_inequivalent() {
        let r = equivalent_under(
            &tf([2, 1, 3]),
            &tf([2, -1, 3]),
            EquivalenceGroup::Sl2,
            SearchBound::default(),
        )
        .unwrap();
        assert!(r.is_none());
        // but they are GL2-equivalent under the plain action via diag(1, -1)
        let p = BQForm::int([2, 1, 3], Flavor::Plain);
        let q = BQForm::int([2, -1, 3], Flavor::Plain);
        assert!(equivalent(&p, &q, SearchBound::default()).unwrap().is_some());
        // and under the linear group
        let p = BQForm::int([2, 1, 3], Flavor::Linear);
        let q = BQForm::int([-2, 1, -3], Flavor::Linear);
        let t = equivalent(&p, &q, SearchBound::default()).unwrap().unwrap();
        assert_eq!(t.act(&p, EquivalenceGroup::Gl2TwistedGl1), q);
    }

    #[test]
    fn definite_twisted_classes_ignore_sign() {
        // (2,1,3) and (2,-1,3) are different twisted classes; -(3,1,2) lies in one of them
        let f = tf([2, 1, 3]);
        let g = tf([-3, 1, -2]);
        let t = equivalent(&f, &g, SearchBound::default()).unwrap();
        let t2 = equivalent(&tf([2, -1, 3]), &g, SearchBound::default()).unwrap();
        assert!(t.is_some() ^ t2.is_some());
        for w in [t, t2].into_iter().flatten() {
            assert_eq!(w.g.det(), Ring::Integers.from_i64(-1));
        }
    }

    #[test]
    fn negative_definite_under_sl2() {
        let f = tf([-1, 1, -6]);
        let g = tf([-6, -1, -1]);
        let t = equivalent_under(&f, &g, EquivalenceGroup::Sl2, SearchBound::default()).unwrap().unwrap();
        assert_eq!(t.act(&f, EquivalenceGroup::Sl2), g);
        assert!(equivalent_under(&f, &tf([1, 1, 6]), EquivalenceGroup::Sl2, SearchBound::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn indefinite_bounded_search_finds_translations() {
        let f = tf([1, 0, -3]);
        let g = BQForm::int([1, 4, 1], Flavor::Twisted); // f(x + 2y, y)
        let t = equivalent_under(&f, &g, EquivalenceGroup::Sl2, SearchBound::default()).unwrap().unwrap();
        assert_eq!(t.act(&f, EquivalenceGroup::Sl2), g);
        assert!(equivalent_under(&f, &tf([-1, 0, 3]), EquivalenceGroup::Sl2, SearchBound { max_entry: 10 })
            .unwrap()
            .is_none());
    }

    #[test]
    fn finite_ring_search() {
        let r3 = Ring::zmod(3).unwrap();
        let f = BQForm::from_i64(r3, [1, 0, 1], Flavor::Plain);
        let g = BQForm::from_i64(r3, [2, 0, 2], Flavor::Plain);
        // x^2 + y^2 represents 2 over F_3, so both are plain-equivalent
        let t = equivalent(&f, &g, SearchBound::default()).unwrap().unwrap();
        assert_eq!(t.act(&f, EquivalenceGroup::Gl2Plain), g);
        let zero = BQForm::from_i64(r3, [0, 0, 0], Flavor::Plain);
        assert!(equivalent(&f, &zero, SearchBound::default()).unwrap().is_none());
    }

    #[test]
    fn mismatches_are_errors() {
        let f = tf([1, 1, 6]);
        let g = BQForm::int([1, 1, 6], Flavor::Plain);
        assert!(matches!(equivalent(&f, &g, SearchBound::default()), Err(FormError::FlavorMismatch(..))));
        let h = BQForm::from_i64(Ring::zmod(5).unwrap(), [1, 1, 6], Flavor::Twisted);
        assert!(matches!(equivalent(&f, &h, SearchBound::default()), Err(FormError::Ring(_))));
    }
}
