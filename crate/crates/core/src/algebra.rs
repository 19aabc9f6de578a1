//! Quadratic algebras `C = R[tau] / (tau^2 + q tau + r)` and traceable
//! `C`-modules.
//!
//! An algebra is always presented with a chosen basis `(1, tau)`. A module is
//! `M = R x + R y` together with the matrix `T` of multiplication by `tau`;
//! the columns of `T` are the coordinates of `tau x` and `tau y`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{equivalent_under, BQForm, EquivalenceGroup, Flavor, FormError, SearchBound};
use crate::matrix::{Gl2, Mat2};
use crate::rings::{check_same, element_from_json, element_to_json, Ring, RingElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("matrix does not define a module: T^2 + qT + r != 0")]
    NotAModule,
    #[error("module is not traceable: trace(T) = {trace}, expected {expected}")]
    NotTraceable { trace: RingElement, expected: RingElement },
    #[error("malformed JSON: {0}")]
    BadJson(String),
}

/// Sign selecting which of `+tau`, `-tau` (mod `R`) is the oriented generator of `C/R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> i64 {
        match self {
            Orientation::Positive => 1,
            Orientation::Negative => -1,
        }
    }

    pub fn from_sign(s: i64) -> Option<Orientation> {
        match s {
            1 => Some(Orientation::Positive),
            -1 => Some(Orientation::Negative),
            _ => None,
        }
    }

    pub fn flipped(self) -> Orientation {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

impl Serialize for Orientation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.sign())
    }
}

impl<'de> Deserialize<'de> for Orientation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = i64::deserialize(d)?;
        Orientation::from_sign(s).ok_or_else(|| serde::de::Error::custom("orientation must be 1 or -1"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticAlgebra {
    pub q: RingElement,
    pub r: RingElement,
    pub orientation: Orientation,
}

/// Scalar part `q^2 - 4r` of the discriminant, the basis of `C/R` being fixed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraDiscriminant {
    pub value: RingElement,
}

/// A generator change `tau' = tau - s`; modules transform by `T -> T - s I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shift {
    pub s: RingElement,
}

impl QuadraticAlgebra {
    pub fn new(
        q: RingElement,
        r: RingElement,
        orientation: Orientation,
    ) -> Result<QuadraticAlgebra, AlgebraError> {
        check_same(q.ring(), r.ring())?;
        Ok(QuadraticAlgebra { q, r, orientation })
    }

    pub fn from_i64(ring: Ring, q: i64, r: i64) -> QuadraticAlgebra {
        QuadraticAlgebra {
            q: ring.from_i64(q),
            r: ring.from_i64(r),
            orientation: Orientation::Positive,
        }
    }

    pub fn ring(&self) -> Ring {
        self.q.ring()
    }

    /// Product of `x0 + x1 tau` and `y0 + y1 tau`, using `tau^2 = -q tau - r`.
    pub fn mul(&self, x: &[RingElement; 2], y: &[RingElement; 2]) -> [RingElement; 2] {
        let t2 = &x[1] * &y[1];
        [
            &x[0] * &y[0] - &self.r * &t2,
            &x[0] * &y[1] + &x[1] * &y[0] - &self.q * &t2,
        ]
    }

    /// Matrix of the trace form `(u, v) -> Tr(uv)` on the basis `(1, tau)`.
    pub fn trace_pairing(&self) -> Mat2 {
        let ring = self.ring();
        let two = ring.from_i64(2);
        let tr_tau = -&self.q;
        let tr_tau2 = self.q.square() - self.r.scale(2);
        Mat2 {
            m: [[two, tr_tau.clone()], [tr_tau, tr_tau2]],
        }
    }

    /// The determinant of the trace pairing, checked against `q^2 - 4r`.
    pub fn discriminant(&self) -> AlgebraDiscriminant {
        let value = self.trace_pairing().det();
        debug_assert_eq!(value, self.q.square() - self.r.scale(4));
        AlgebraDiscriminant { value }
    }

    /// Present the algebra with respect to `tau' = tau - s`:
    /// `q' = q + 2s`, `r' = r + qs + s^2`.
    pub fn shift_generator(&self, s: &RingElement) -> (QuadraticAlgebra, Shift) {
        let q = &self.q + &s.scale(2);
        let r = &self.r + &(&self.q * s) + s.square();
        (
            QuadraticAlgebra {
                q,
                r,
                orientation: self.orientation,
            },
            Shift { s: s.clone() },
        )
    }

    /// Present the algebra with respect to `-tau`: `(q, r) -> (-q, r)` and the
    /// orientation sign negates, so the oriented generator `sign * tau` is the
    /// same element of `C/R`. Modules follow by `T -> -T`.
    pub fn flip_orientation(&self) -> QuadraticAlgebra {
        QuadraticAlgebra {
            q: -&self.q,
            r: self.r.clone(),
            orientation: self.orientation.flipped(),
        }
    }

    /// Matrix of multiplication by `tau` on `C` itself in the basis `(1, tau)`.
    pub fn regular_representation(&self) -> Mat2 {
        let ring = self.ring();
        Mat2 {
            m: [[ring.zero(), -&self.r], [ring.one(), -&self.q]],
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ring": self.ring(),
            "q": element_to_json(&self.q),
            "r": element_to_json(&self.r),
            "orientation": self.orientation,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<QuadraticAlgebra, AlgebraError> {
        let bad = |what: &str| AlgebraError::BadJson(what.to_string());
        let ring: Ring = serde_json::from_value(v.get("ring").cloned().ok_or_else(|| bad("missing ring"))?)
            .map_err(|e| AlgebraError::BadJson(e.to_string()))?;
        let q = element_from_json(ring, v.get("q").ok_or_else(|| bad("missing q"))?)?;
        let r = element_from_json(ring, v.get("r").ok_or_else(|| bad("missing r"))?)?;
        let orientation = match v.get("orientation") {
            None => Orientation::Positive,
            Some(o) => serde_json::from_value(o.clone()).map_err(|e| AlgebraError::BadJson(e.to_string()))?,
        };
        Ok(QuadraticAlgebra { q, r, orientation })
    }
}

impl fmt::Display for QuadraticAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[tau]/(tau^2 + {} tau + {})", self.ring(), self.q, self.r)
    }
}

/// Result of checking a candidate module matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Traceability {
    Traceable,
    NotAModule,
    ModuleNotTraceable { trace: RingElement },
}

impl Traceability {
    pub fn is_traceable(&self) -> bool {
        matches!(self, Traceability::Traceable)
    }
}

/// `T^2 + qT + rI = 0` (module axiom) and `trace T = -q` (same trace map).
pub fn is_traceable(algebra: &QuadraticAlgebra, t: &Mat2) -> Traceability {
    let relation = t
        .mul(t)
        .add(&t.scale(&algebra.q))
        .add(&Mat2::scalar(&algebra.r));
    if relation != Mat2::zero(algebra.ring()) {
        return Traceability::NotAModule;
    }
    let trace = t.trace();
    if trace != -&algebra.q {
        return Traceability::ModuleNotTraceable { trace };
    }
    Traceability::Traceable
}

/// A rank-2 module over a quadratic algebra, given by the action of `tau`.
///
/// [`TraceableModule::new`] enforces traceability; [`TraceableModule::unchecked`]
/// admits arbitrary matrices for negative tests.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceableModule {
    pub algebra: QuadraticAlgebra,
    pub t: Mat2,
}

impl TraceableModule {
    pub fn new(algebra: QuadraticAlgebra, t: Mat2) -> Result<TraceableModule, AlgebraError> {
        check_same(algebra.ring(), t.ring())?;
        match is_traceable(&algebra, &t) {
            Traceability::Traceable => Ok(TraceableModule { algebra, t }),
            Traceability::NotAModule => Err(AlgebraError::NotAModule),
            Traceability::ModuleNotTraceable { trace } => Err(AlgebraError::NotTraceable {
                trace,
                expected: -&algebra.q,
            }),
        }
    }

    pub fn unchecked(algebra: QuadraticAlgebra, t: Mat2) -> TraceableModule {
        TraceableModule { algebra, t }
    }

    /// The module whose algebra is read off from `T`: `q = -trace T`, `r = det T`.
    /// By Cayley-Hamilton every matrix is traceable over this algebra.
    pub fn from_matrix(t: Mat2) -> TraceableModule {
        let algebra = QuadraticAlgebra {
            q: -t.trace(),
            r: t.det(),
            orientation: Orientation::Positive,
        };
        TraceableModule { algebra, t }
    }

    pub fn ring(&self) -> Ring {
        self.algebra.ring()
    }

    pub fn traceability(&self) -> Traceability {
        is_traceable(&self.algebra, &self.t)
    }

    /// Transport along [`QuadraticAlgebra::shift_generator`].
    pub fn shift_generator(&self, s: &RingElement) -> (TraceableModule, Shift) {
        let (algebra, shift) = self.algebra.shift_generator(s);
        let t = self.t.sub(&Mat2::scalar(s));
        (TraceableModule { algebra, t }, shift)
    }

    pub fn flip_orientation(&self) -> TraceableModule {
        TraceableModule {
            algebra: self.algebra.flip_orientation(),
            t: self.t.neg(),
        }
    }

    /// The element `(c0 + c1 tau) * v`.
    pub fn act(&self, c: &[RingElement; 2], v: &[RingElement; 2]) -> [RingElement; 2] {
        let tv = self.t.apply(v);
        [&c[0] * &v[0] + &c[1] * &tv[0], &c[0] * &v[1] + &c[1] * &tv[1]]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "algebra": self.algebra.to_json(),
            "T": self.t.to_json(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<TraceableModule, AlgebraError> {
        let algebra = QuadraticAlgebra::from_json(
            v.get("algebra")
                .ok_or_else(|| AlgebraError::BadJson("missing algebra".into()))?,
        )?;
        let t = Mat2::from_json(
            algebra.ring(),
            v.get("T").ok_or_else(|| AlgebraError::BadJson("missing T".into()))?,
        )?;
        Ok(TraceableModule { algebra, t })
    }
}

/// An isomorphism of based pairs `(C, M)`: change of module basis `P` (new
/// basis vectors are the columns of `P`), and new algebra generator
/// `tau' = u tau + s`. It sends `(q, r, T)` to
/// `(u q - 2s, s^2 - u q s + u^2 r, u P^{-1} T P + s I)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairIsomorphism {
    pub change_of_basis: Gl2,
    pub unit: RingElement,
    pub shift: RingElement,
}

impl PairIsomorphism {
    pub fn apply(&self, m: &TraceableModule) -> TraceableModule {
        let (u, s) = (&self.unit, &self.shift);
        let p = self.change_of_basis.matrix();
        let p_inv = self.change_of_basis.inverse();
        let conj = p_inv.matrix().mul(&m.t).mul(p);
        let t = conj.scale(u).add(&Mat2::scalar(s));
        let q = u * &m.algebra.q - s.scale(2);
        let r = s.square() - &(u * &m.algebra.q) * s + u.square() * &m.algebra.r;
        TraceableModule {
            algebra: QuadraticAlgebra {
                q,
                r,
                orientation: m.algebra.orientation,
            },
            t,
        }
    }
}

/// `(t12, t22 - t11, -t21)`: the twisted form of `T`, invariant under `T -> T + sI`.
pub(crate) fn read_off_form(t: &Mat2) -> BQForm {
    BQForm {
        a: t.m[0][1].clone(),
        b: &t.m[1][1] - &t.m[0][0],
        c: -&t.m[1][0],
        flavor: Flavor::Twisted,
    }
}

/// An isomorphism of modules over one algebra: a matrix `P` in `GL_2(R)` with
/// `T2 = P T1 P^{-1}`.
///
/// Over finite rings the whole of `GL_2` is searched. Over `Z` both modules
/// are converted to twisted forms and compared with
/// [`equivalent_under`], whose witness `g` gives `P = g^T`; for indefinite or
/// degenerate forms that comparison is a bounded search.
pub fn module_isomorphic(
    m1: &TraceableModule,
    m2: &TraceableModule,
    bound: SearchBound,
) -> Result<Option<Gl2>, AlgebraError> {
    if m1.algebra.q != m2.algebra.q || m1.algebra.r != m2.algebra.r {
        return Err(AlgebraError::AlgebraMismatch);
    }
    let intertwines = |p: &Mat2| p.mul(&m1.t) == m2.t.mul(p);
    match m1.ring() {
        Ring::Zmod(_) => {
            use rayon::prelude::*;
            let group = Gl2::all(m1.ring()).expect("finite ring");
            Ok(group.into_par_iter().find_first(|p| intertwines(p.matrix())))
        }
        Ring::Integers => {
            let f1 = read_off_form(&m1.t);
            let f2 = read_off_form(&m2.t);
            let Some(t) = equivalent_under(&f1, &f2, EquivalenceGroup::Gl2Twisted, bound)? else {
                return Ok(None);
            };
            let p = t.g.transpose();
            Ok(intertwines(p.matrix()).then_some(p))
        }
    }
}
