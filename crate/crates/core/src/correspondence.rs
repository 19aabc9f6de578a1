//! Forms to pairs `(C, M)` and back.
//!
//! A form `(a, b, c)` gives the algebra `tau^2 = -b tau - ac` and the module
//! `M = R x + R y` with `tau x = -b x - c y`, `tau y = a x`. Conversely a
//! traceable pair is normalized so that the `(y, y)` entry of `T` vanishes,
//! and the form is read off the remaining entries.

use serde_json::json;
use thiserror::Error;

use crate::algebra::{
    is_traceable, AlgebraError, Orientation, PairIsomorphism, QuadraticAlgebra, Shift,
    Traceability, TraceableModule,
};
use crate::forms::{BQForm, EquivalenceGroup, Flavor, FormError, Gl2Mode, Transform};
use crate::matrix::Mat2;
use crate::rings::{Ring, RingElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrespondenceError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("matrix does not define a module over the algebra")]
    NotAModule,
    #[error("module is not traceable: trace(T) = {trace}, expected {expected}")]
    NotTraceable { trace: RingElement, expected: RingElement },
    #[error("normalized pair is inconsistent: {0}")]
    Inconsistent(String),
    #[error("base change starts from Z, not {0}")]
    NotOverIntegers(Ring),
    #[error("generator search needs a finite ring, not {0}")]
    NotFinite(Ring),
    #[error("primitivity and generator search disagree for {0}")]
    InvertibilityMismatch(String),
}

/// An algebra with a traceable module, tagged with the flavor of the forms it
/// corresponds to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrespondencePair {
    pub module: TraceableModule,
    pub flavor: Flavor,
}

impl CorrespondencePair {
    pub fn new(module: TraceableModule, flavor: Flavor) -> CorrespondencePair {
        CorrespondencePair { module, flavor }
    }

    pub fn algebra(&self) -> &QuadraticAlgebra {
        &self.module.algebra
    }

    pub fn t(&self) -> &Mat2 {
        &self.module.t
    }

    pub fn ring(&self) -> Ring {
        self.module.ring()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.module.to_json();
        v["flavor"] = json!(self.flavor);
        v
    }

    pub fn from_json(v: &serde_json::Value) -> Result<CorrespondencePair, CorrespondenceError> {
        let module = TraceableModule::from_json(v)?;
        let flavor = match v.get("flavor") {
            None => Flavor::Plain,
            Some(f) => serde_json::from_value(f.clone())
                .map_err(|e| AlgebraError::BadJson(e.to_string()))?,
        };
        Ok(CorrespondencePair { module, flavor })
    }
}

/// What [`normalize`] did to a pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    /// The orientation was negative and has been flipped (twisted flavor only).
    pub flipped: bool,
    pub shift: Shift,
}

pub fn form_to_pair(f: &BQForm) -> CorrespondencePair {
    let ring = f.ring();
    let algebra = QuadraticAlgebra {
        q: f.b.clone(),
        r: &f.a * &f.c,
        orientation: Orientation::Positive,
    };
    let t = Mat2 {
        m: [[-&f.b, f.a.clone()], [-&f.c, ring.zero()]],
    };
    CorrespondencePair {
        module: TraceableModule::unchecked(algebra, t),
        flavor: f.flavor,
    }
}

fn check_traceable(pair: &CorrespondencePair) -> Result<(), CorrespondenceError> {
    match is_traceable(pair.algebra(), pair.t()) {
        Traceability::Traceable => Ok(()),
        Traceability::NotAModule => Err(CorrespondenceError::NotAModule),
        Traceability::ModuleNotTraceable { trace } => Err(CorrespondenceError::NotTraceable {
            trace,
            expected: -&pair.algebra().q,
        }),
    }
}

/// Bring a traceable pair to a normalized basis: for twisted pairs first make
/// the orientation positive, then shift `tau` by the `(y, y)` entry of `T`.
pub fn normalize(
    pair: &CorrespondencePair,
) -> Result<(CorrespondencePair, Normalization), CorrespondenceError> {
    check_traceable(pair)?;
    let mut module = pair.module.clone();
    let flipped = pair.flavor == Flavor::Twisted && module.algebra.orientation == Orientation::Negative;
    if flipped {
        module = module.flip_orientation();
    }
    let s = module.t.m[1][1].clone();
    let (module, shift) = module.shift_generator(&s);
    Ok((
        CorrespondencePair {
            module,
            flavor: pair.flavor,
        },
        Normalization { flipped, shift },
    ))
}

/// Inverse of [`form_to_pair`] on normalized pairs; see [`normalize`].
pub fn pair_to_form(pair: &CorrespondencePair) -> Result<BQForm, CorrespondenceError> {
    pair_to_form_normalized(pair).map(|(f, _)| f)
}

/// [`pair_to_form`] together with the normalization it applied.
pub fn pair_to_form_normalized(
    pair: &CorrespondencePair,
) -> Result<(BQForm, Normalization), CorrespondenceError> {
    let (normal, record) = normalize(pair)?;
    let t = normal.t();
    let f = BQForm {
        a: t.m[0][1].clone(),
        b: -&t.m[0][0],
        c: -&t.m[1][0],
        flavor: pair.flavor,
    };
    let algebra = normal.algebra();
    if f.b != algebra.q {
        return Err(CorrespondenceError::Inconsistent(format!(
            "b = {} but q = {}",
            f.b, algebra.q
        )));
    }
    if &f.a * &f.c != algebra.r {
        return Err(CorrespondenceError::Inconsistent(format!(
            "ac = {} but r = {}",
            &f.a * &f.c,
            algebra.r
        )));
    }
    Ok((f, record))
}

/// The form of a pair computed from the map
/// `gamma (x) (m1 ^ m2) -> gamma m1 (x) m2 - gamma m2 (x) m1` with `gamma = tau`,
/// followed by the projection `M (x) M -> Sym^2 M` onto the coefficients of
/// `x^2, xy, y^2`. That projection produces the negative of the form, so the
/// result is negated.
pub fn pair_to_form_global(pair: &CorrespondencePair) -> Result<BQForm, CorrespondenceError> {
    check_traceable(pair)?;
    let mut module = pair.module.clone();
    if pair.flavor == Flavor::Twisted && module.algebra.orientation == Orientation::Negative {
        module = module.flip_orientation();
    }
    let ring = pair.ring();
    let t = &module.t;
    let x = [ring.one(), ring.zero()];
    let y = [ring.zero(), ring.one()];
    let tx = t.apply(&x);
    let ty = t.apply(&y);
    // coefficient matrix c[i][j] of sum c_ij e_i (x) e_j
    let tensor = |u: &[RingElement; 2], v: &[RingElement; 2]| {
        [
            [&u[0] * &v[0], &u[0] * &v[1]],
            [&u[1] * &v[0], &u[1] * &v[1]],
        ]
    };
    let p = tensor(&tx, &y);
    let n = tensor(&ty, &x);
    let c = |i: usize, j: usize| &p[i][j] - &n[i][j];
    let a = -c(0, 0);
    let b = -(c(0, 1) + c(1, 0));
    let cc = -c(1, 1);
    Ok(BQForm {
        a,
        b,
        c: cc,
        flavor: pair.flavor,
    })
}

/// An `m` with `(m, tau m)` a basis of `M`, found by exhaustive search in
/// lexicographic order. Over a finite ring such an `m` exists exactly when
/// `M` is invertible.
pub fn cyclic_generator(
    pair: &CorrespondencePair,
) -> Result<Option<[RingElement; 2]>, CorrespondenceError> {
    let ring = pair.ring();
    let elems = ring
        .elements()
        .ok_or(CorrespondenceError::NotFinite(ring))?;
    let t = pair.t();
    for u in &elems {
        for v in &elems {
            let m = [u.clone(), v.clone()];
            let tm = t.apply(&m);
            if Mat2::from_columns(m.clone(), tm).det().is_unit() {
                return Ok(Some(m));
            }
        }
    }
    Ok(None)
}

/// Whether `M` is locally free of rank one over `C`, decided by primitivity
/// of the corresponding form. Over finite rings the generator search is run
/// as well and must agree.
pub fn is_invertible_module(pair: &CorrespondencePair) -> Result<bool, CorrespondenceError> {
    let primitive = pair_to_form(pair)?.is_primitive();
    if pair.ring().is_finite() {
        let found = cyclic_generator(pair)?.is_some();
        if found != primitive {
            return Err(CorrespondenceError::InvertibilityMismatch(format!(
                "T = {}",
                pair.t()
            )));
        }
    }
    Ok(primitive)
}

/// A quadratic map `q: M -> N` recorded by its values on `m1`, `m2`, `m1 + m2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticMap {
    pub q1: RingElement,
    pub q2: RingElement,
    pub q12: RingElement,
}

impl QuadraticMap {
    pub fn ring(&self) -> Ring {
        self.q1.ring()
    }

    /// `B(m1, m2) = q(m1 + m2) - q(m1) - q(m2)`.
    pub fn polar_coefficient(&self) -> RingElement {
        &self.q12 - &self.q1 - &self.q2
    }

    /// `q(x m1 + y m2)`.
    pub fn eval(&self, x: &RingElement, y: &RingElement) -> RingElement {
        &self.q1 * &x.square() + &self.polar_coefficient() * &(x * y) + &self.q2 * &y.square()
    }

    /// `B(u, v) = q(u + v) - q(u) - q(v)`.
    pub fn polar(&self, u: &[RingElement; 2], v: &[RingElement; 2]) -> RingElement {
        let s0 = &u[0] + &v[0];
        let s1 = &u[1] + &v[1];
        self.eval(&s0, &s1) - self.eval(&u[0], &u[1]) - self.eval(&v[0], &v[1])
    }

    /// Whether the values `q(M)` generate `N`. Over finite rings every value
    /// is computed; over `Z` the values generate the ideal `(q1, q2, q12)`.
    pub fn is_primitive(&self) -> bool {
        let ring = self.ring();
        let values = match ring.elements() {
            Some(elems) => {
                let mut vals = Vec::with_capacity(elems.len() * elems.len());
                for x in &elems {
                    for y in &elems {
                        vals.push(self.eval(x, y));
                    }
                }
                vals
            }
            None => vec![self.q1.clone(), self.q2.clone(), self.q12.clone()],
        };
        ring.generates_unit_ideal(&values).expect("values share a ring")
    }
}

pub fn form_to_quadratic_map(f: &BQForm) -> QuadraticMap {
    QuadraticMap {
        q1: f.a.clone(),
        q2: f.c.clone(),
        q12: &f.a + &f.b + &f.c,
    }
}

pub fn quadratic_map_to_form(qm: &QuadraticMap, flavor: Flavor) -> BQForm {
    BQForm {
        a: qm.q1.clone(),
        b: qm.polar_coefficient(),
        c: qm.q2.clone(),
        flavor,
    }
}

/// Coefficientwise reduction along `Z -> R`.
pub trait BaseChange: Sized {
    fn base_change(&self, target: Ring) -> Result<Self, CorrespondenceError>;
}

fn lift_from_z(x: &RingElement, target: Ring) -> Result<RingElement, CorrespondenceError> {
    let v = x
        .as_int()
        .ok_or(CorrespondenceError::NotOverIntegers(x.ring()))?;
    Ok(target.from_bigint(v))
}

impl BaseChange for BQForm {
    fn base_change(&self, target: Ring) -> Result<BQForm, CorrespondenceError> {
        Ok(BQForm {
            a: lift_from_z(&self.a, target)?,
            b: lift_from_z(&self.b, target)?,
            c: lift_from_z(&self.c, target)?,
            flavor: self.flavor,
        })
    }
}

impl BaseChange for Mat2 {
    fn base_change(&self, target: Ring) -> Result<Mat2, CorrespondenceError> {
        let e = |i: usize, j: usize| lift_from_z(&self.m[i][j], target);
        Ok(Mat2 {
            m: [[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]],
        })
    }
}

impl BaseChange for CorrespondencePair {
    fn base_change(&self, target: Ring) -> Result<CorrespondencePair, CorrespondenceError> {
        let a = self.algebra();
        let algebra = QuadraticAlgebra {
            q: lift_from_z(&a.q, target)?,
            r: lift_from_z(&a.r, target)?,
            orientation: a.orientation,
        };
        Ok(CorrespondencePair {
            module: TraceableModule::unchecked(algebra, self.t().base_change(target)?),
            flavor: self.flavor,
        })
    }
}

/// The pair isomorphism realizing a form transformation: with `P = g^{-T}`,
/// `form_to_pair(t . f) = witness.apply(form_to_pair(f))`.
///
/// The scalar on `tau` is `det g` for the plain action, `1` for the twisted
/// action, times the transform's unit; the shift restores a normalized basis.
pub fn equivariance_witness(
    f: &BQForm,
    t: &Transform,
    group: EquivalenceGroup,
) -> PairIsomorphism {
    let mode = match group {
        EquivalenceGroup::Sl2 | EquivalenceGroup::Gl2Plain => Gl2Mode::Plain,
        EquivalenceGroup::Gl2Twisted | EquivalenceGroup::Gl2TwistedGl1 => Gl2Mode::Twisted,
    };
    let p = t.g.inverse().transpose();
    let unit = match mode {
        Gl2Mode::Plain => &t.unit * &t.g.det(),
        Gl2Mode::Twisted => t.unit.clone(),
    };
    let pair = form_to_pair(f);
    let conj = p.inverse().matrix().mul(pair.t()).mul(p.matrix());
    let shift = -(&unit * &conj.m[1][1]);
    PairIsomorphism {
        change_of_basis: p,
        unit,
        shift,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Gl2;

    fn zz(v: i64) -> RingElement {
        Ring::Integers.from_i64(v)
    }

    fn mat(e: [[i64; 2]; 2]) -> Mat2 {
        Mat2::from_i64(Ring::Integers, e)
    }

    fn all_forms(ring: Ring, flavor: Flavor) -> Vec<BQForm> {
        let elems = ring.elements().unwrap();
        let mut out = Vec::new();
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    out.push(BQForm::new(a.clone(), b.clone(), c.clone(), flavor).unwrap());
                }
            }
        }
        out
    }

    fn z_pair(q: i64, r: i64, t: [[i64; 2]; 2], flavor: Flavor) -> CorrespondencePair {
        CorrespondencePair::new(
            TraceableModule::unchecked(QuadraticAlgebra::from_i64(Ring::Integers, q, r), mat(t)),
            flavor,
        )
    }

    #[test]
    fn form_to_pair_examples() {
        let p = form_to_pair(&BQForm::int([2, 1, 3], Flavor::Plain));
        assert_eq!((p.algebra().q.clone(), p.algebra().r.clone()), (zz(1), zz(6)));
        assert_eq!(p.t(), &mat([[-1, 2], [-3, 0]]));
        assert!(p.module.traceability().is_traceable());

        let zero = form_to_pair(&BQForm::int([0, 0, 0], Flavor::Linear));
        assert_eq!((zero.algebra().q.clone(), zero.algebra().r.clone()), (zz(0), zz(0)));
        assert_eq!(zero.t(), &Mat2::zero(Ring::Integers));
        assert_eq!(zero.flavor, Flavor::Linear);

        let gauss = form_to_pair(&BQForm::int([1, 0, 1], Flavor::Plain));
        assert_eq!((gauss.algebra().q.clone(), gauss.algebra().r.clone()), (zz(0), zz(1)));
        assert_eq!(gauss.t(), &mat([[0, 1], [-1, 0]]));
        assert!(gauss.module.traceability().is_traceable());
    }

    #[test]
    fn pair_to_form_examples() {
        let f = pair_to_form(&z_pair(1, 6, [[-1, 2], [-3, 0]], Flavor::Plain)).unwrap();
        assert_eq!(f, BQForm::int([2, 1, 3], Flavor::Plain));

        let shifted = z_pair(-1, 6, [[0, 2], [-3, 1]], Flavor::Plain);
        assert!(shifted.module.traceability().is_traceable());
        let (f, record) = pair_to_form_normalized(&shifted).unwrap();
        assert_eq!(f, BQForm::int([2, 1, 3], Flavor::Plain));
        assert_eq!(record.shift.s, zz(1));
        assert!(!record.flipped);
        let (normal, _) = normalize(&shifted).unwrap();
        assert_eq!(normal.t(), &mat([[-1, 2], [-3, 0]]));
        assert!(normal.module.traceability().is_traceable());

        let f = pair_to_form(&z_pair(0, 0, [[0, 0], [0, 0]], Flavor::Plain)).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn pair_to_form_rejects_bad_input() {
        assert!(matches!(
            pair_to_form(&z_pair(0, -1, [[1, 0], [0, 1]], Flavor::Plain)),
            Err(CorrespondenceError::NotTraceable { .. })
        ));
        assert!(matches!(
            pair_to_form(&z_pair(1, 6, [[0, 0], [0, 0]], Flavor::Plain)),
            Err(CorrespondenceError::NotAModule)
        ));
        assert!(matches!(
            pair_to_form_global(&z_pair(0, -1, [[1, 0], [0, 1]], Flavor::Plain)),
            Err(CorrespondenceError::NotTraceable { .. })
        ));
    }

    #[test]
    fn negative_orientation_reads_off_negated_twisted_form() {
        let mut pair = form_to_pair(&BQForm::int([2, 1, 3], Flavor::Twisted));
        pair.module = pair.module.flip_orientation();
        let (f, record) = pair_to_form_normalized(&pair).unwrap();
        assert!(record.flipped);
        assert_eq!(f, BQForm::int([2, 1, 3], Flavor::Twisted));
        pair.flavor = Flavor::Plain;
        assert_eq!(pair_to_form(&pair).unwrap(), BQForm::int([-2, -1, -3], Flavor::Plain));
        assert_eq!(pair_to_form_global(&pair).unwrap(), BQForm::int([-2, -1, -3], Flavor::Plain));
    }

    #[test]
    fn global_construction_examples() {
        let p = z_pair(1, 6, [[-1, 2], [-3, 0]], Flavor::Plain);
        assert_eq!(pair_to_form_global(&p).unwrap(), BQForm::int([2, 1, 3], Flavor::Plain));
        assert_eq!(pair_to_form_global(&p).unwrap(), pair_to_form(&p).unwrap());
        let zero = z_pair(0, 0, [[0, 0], [0, 0]], Flavor::Plain);
        assert!(pair_to_form_global(&zero).unwrap().is_zero());
    }

    fn traceable_pairs(ring: Ring, flavor: Flavor) -> Vec<CorrespondencePair> {
        Mat2::all(ring)
            .unwrap()
            .into_iter()
            .map(|t| CorrespondencePair::new(TraceableModule::from_matrix(t), flavor))
            .collect()
    }

    #[test]
    fn global_construction_agrees_exhaustively_mod_3() {
        let ring = Ring::Zmod(3);
        let elems = ring.elements().unwrap();
        let mut count = 0;
        for q in &elems {
            for r in &elems {
                let c = QuadraticAlgebra::new(q.clone(), r.clone(), Orientation::Positive).unwrap();
                for t in Mat2::all(ring).unwrap() {
                    if !is_traceable(&c, &t).is_traceable() {
                        continue;
                    }
                    count += 1;
                    let p = CorrespondencePair::new(TraceableModule::unchecked(c.clone(), t), Flavor::Linear);
                    assert_eq!(pair_to_form_global(&p).unwrap(), pair_to_form(&p).unwrap());
                }
            }
        }
        // every matrix is traceable over exactly one algebra
        assert_eq!(count, 81);
    }

    #[test]
    fn roundtrip_a_exhaustive() {
        for n in [2u64, 3, 4] {
            for flavor in Flavor::ALL {
                for f in all_forms(Ring::Zmod(n), flavor) {
                    let p = form_to_pair(&f);
                    assert!(p.module.traceability().is_traceable());
                    assert_eq!(pair_to_form(&p).unwrap(), f);
                    assert_eq!(p.algebra().discriminant().value, f.discriminant());
                }
            }
        }
    }

    #[test]
    fn roundtrip_b_exhaustive_mod_3() {
        for flavor in Flavor::ALL {
            for p in traceable_pairs(Ring::Zmod(3), flavor) {
                let (f, _) = pair_to_form_normalized(&p).unwrap();
                let (normal, _) = normalize(&p).unwrap();
                assert_eq!(form_to_pair(&f), normal);
            }
        }
    }

    #[test]
    fn equivariance_exhaustive() {
        for n in [2u64, 3] {
            let ring = Ring::Zmod(n);
            for flavor in Flavor::ALL {
                let group = flavor.equivalence_group();
                let elements = group.elements(ring).unwrap();
                for f in all_forms(ring, flavor) {
                    let pair = form_to_pair(&f);
                    for t in &elements {
                        let moved = t.act(&f, group);
                        let witness = equivariance_witness(&f, t, group);
                        assert_eq!(witness.apply(&pair.module), form_to_pair(&moved).module);
                        // the module part alone: T2 = Q T1 Q^{-1} with Q = g^T
                        let q = t.g.transpose();
                        let lhs = q.matrix().mul(pair.t()).mul(q.inverse().matrix());
                        let read = pair_to_form(&CorrespondencePair::new(
                            TraceableModule::from_matrix(lhs.scale(&witness.unit)),
                            flavor,
                        ))
                        .unwrap();
                        assert_eq!(read, moved);
                    }
                }
            }
        }
    }

    #[test]
    fn invertibility_examples() {
        let p = form_to_pair(&BQForm::int([1, 5, 7], Flavor::Plain));
        assert!(is_invertible_module(&p).unwrap());
        // tau y = x, so y generates
        let y = [zz(0), zz(1)];
        let basis = Mat2::from_columns(y.clone(), p.t().apply(&y));
        assert!(basis.det().is_unit());

        assert!(!is_invertible_module(&form_to_pair(&BQForm::int([2, 0, 2], Flavor::Plain))).unwrap());

        let r4 = Ring::Zmod(4);
        let p4 = form_to_pair(&BQForm::from_i64(r4, [2, 1, 2], Flavor::Plain));
        assert!(is_invertible_module(&p4).unwrap());
        let m = cyclic_generator(&p4).unwrap().unwrap();
        assert!(Mat2::from_columns(m.clone(), p4.t().apply(&m)).det().is_unit());
        assert!(matches!(
            cyclic_generator(&p),
            Err(CorrespondenceError::NotFinite(Ring::Integers))
        ));
    }

    #[test]
    fn primitive_iff_invertible_exhaustive() {
        for n in [2u64, 3, 4, 5] {
            for f in all_forms(Ring::Zmod(n), Flavor::Plain) {
                let p = form_to_pair(&f);
                assert_eq!(cyclic_generator(&p).unwrap().is_some(), f.is_primitive(), "{f} mod {n}");
                assert_eq!(is_invertible_module(&p).unwrap(), f.is_primitive());
            }
        }
    }

    #[test]
    fn quadratic_map_examples() {
        let qm = form_to_quadratic_map(&BQForm::int([2, 1, 3], Flavor::Plain));
        assert_eq!((qm.q1.clone(), qm.q2.clone(), qm.q12.clone()), (zz(2), zz(3), zz(6)));
        let zero = form_to_quadratic_map(&BQForm::int([0, 0, 0], Flavor::Plain));
        assert!(zero.q1.is_zero() && zero.q2.is_zero() && zero.q12.is_zero());
        assert!(!zero.is_primitive());
        assert!(qm.is_primitive());
        assert!(!form_to_quadratic_map(&BQForm::int([2, 0, 2], Flavor::Plain)).is_primitive());
    }

    #[test]
    fn quadratic_map_roundtrip_and_primitivity_exhaustive() {
        for n in [2u64, 3, 4, 5] {
            let ring = Ring::Zmod(n);
            for f in all_forms(ring, Flavor::Linear) {
                let qm = form_to_quadratic_map(&f);
                assert_eq!(quadratic_map_to_form(&qm, Flavor::Linear), f);
                assert_eq!(qm.is_primitive(), f.is_primitive(), "{f} mod {n}");
            }
        }
    }

    #[test]
    fn kneser_axioms_mod_5() {
        let ring = Ring::Zmod(5);
        let elems = ring.elements().unwrap();
        for f in all_forms(ring, Flavor::Plain).into_iter().step_by(7) {
            let qm = form_to_quadratic_map(&f);
            for x in &elems {
                for y in &elems {
                    assert_eq!(qm.eval(x, y), f.eval(x, y));
                    for s in &elems {
                        let sm = s * x;
                        let sn = s * y;
                        assert_eq!(qm.eval(&sm, &sn), s.square() * qm.eval(x, y));
                    }
                    let u = [x.clone(), y.clone()];
                    let v = [y.clone(), ring.one()];
                    let w = [ring.from_i64(2), x.clone()];
                    let vw = [&v[0] + &w[0], &v[1] + &w[1]];
                    assert_eq!(qm.polar(&u, &vw), qm.polar(&u, &v) + qm.polar(&u, &w));
                    assert_eq!(qm.polar(&u, &v), qm.polar(&v, &u));
                }
            }
        }
    }

    #[test]
    fn base_change_examples() {
        let r5 = Ring::Zmod(5);
        let f = BQForm::int([2, 1, 3], Flavor::Plain);
        let f5 = f.base_change(r5).unwrap();
        assert_eq!(f5, BQForm::from_i64(r5, [2, 1, 3], Flavor::Plain));
        let p5 = form_to_pair(&f).base_change(r5).unwrap();
        assert_eq!((p5.algebra().q.clone(), p5.algebra().r.clone()), (r5.one(), r5.one()));
        assert_eq!(p5, form_to_pair(&f5));

        let r2 = Ring::Zmod(2);
        assert_eq!(f.base_change(r2).unwrap(), BQForm::from_i64(r2, [0, 1, 1], Flavor::Plain));

        let r3 = Ring::Zmod(3);
        let d = BQForm::int([1, 2, 1], Flavor::Plain);
        let d3 = d.base_change(r3).unwrap();
        assert!(d3.discriminant().is_zero());
        assert_eq!(form_to_pair(&d).base_change(r3).unwrap(), form_to_pair(&d3));
        assert!(matches!(f5.base_change(r2), Err(CorrespondenceError::NotOverIntegers(_))));
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn roundtrip_over_z(a in -10i64.pow(6)..10i64.pow(6), b in -10i64.pow(6)..10i64.pow(6), c in -10i64.pow(6)..10i64.pow(6)) {
            let f = BQForm::int([a, b, c], Flavor::Twisted);
            let p = form_to_pair(&f);
            prop_assert_eq!(pair_to_form(&p).unwrap(), f.clone());
            prop_assert_eq!(pair_to_form_global(&p).unwrap(), f.clone());
            prop_assert_eq!(p.algebra().discriminant().value, f.discriminant());
        }

        #[test]
        fn base_change_commutes(a in -20i64..=20, b in -20i64..=20, c in -20i64..=20, n in 2u64..=12) {
            let target = Ring::Zmod(n);
            let f = BQForm::int([a, b, c], Flavor::Linear);
            let fr = f.base_change(target).unwrap();
            prop_assert_eq!(form_to_pair(&f).base_change(target).unwrap(), form_to_pair(&fr));
            prop_assert_eq!(pair_to_form(&form_to_pair(&f)).unwrap().base_change(target).unwrap(), fr);
        }

        #[test]
        fn equivariance_over_z(a in -30i64..30, b in -30i64..30, c in -30i64..30, k in -3i64..=3, refl in any::<bool>(), neg in any::<bool>()) {
            let f = BQForm::int([a, b, c], Flavor::Linear);
            let mut g = Gl2::from_i64(Ring::Integers, [[1, k], [0, 1]]).unwrap()
                .mul(&Gl2::from_i64(Ring::Integers, [[0, -1], [1, 0]]).unwrap());
            if refl {
                g = g.mul(&Gl2::reflection(Ring::Integers));
            }
            let t = Transform { g, unit: zz(if neg { -1 } else { 1 }) };
            for group in [EquivalenceGroup::Gl2Plain, EquivalenceGroup::Gl2Twisted, EquivalenceGroup::Gl2TwistedGl1] {
                let t = if group == EquivalenceGroup::Gl2TwistedGl1 { t.clone() } else { Transform::matrix(t.g.clone()) };
                let w = equivariance_witness(&f, &t, group);
                prop_assert_eq!(w.apply(&form_to_pair(&f).module), form_to_pair(&t.act(&f, group)).module);
            }
        }
    }
}
