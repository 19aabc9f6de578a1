//! Ideals of quadratic algebras over `Z`, and composition of forms through them.
//!
//! Elements of `C` are coordinate vectors `(u, v)` meaning `u + v tau`. An
//! ideal is stored as `(1/den) * L` where `L` has the Hermite basis
//! `n1, m + n2 tau` with `n1, n2 > 0` and `0 <= m < n1`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::algebra::{module_isomorphic, AlgebraError, QuadraticAlgebra, TraceableModule};
use crate::correspondence::{form_to_pair, pair_to_form, CorrespondenceError, CorrespondencePair};
use crate::forms::{
    canonical_definite, is_reduced, principal_form, BQForm, EquivalenceGroup, Flavor, FormError,
    SearchBound,
};
use crate::matrix::Mat2;
use crate::rings::{element_from_json, element_to_json, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Correspondence(#[from] CorrespondenceError),
    #[error("ideal arithmetic is only defined over Z, not {0}")]
    NotOverIntegers(Ring),
    #[error("generators do not span a rank 2 lattice")]
    NotFull,
    #[error("lattice is not closed under multiplication by tau")]
    NotAnIdeal,
    #[error("ideals live in different algebras")]
    AlgebraMismatch,
    #[error("denominator must be positive, got {0}")]
    BadDenominator(BigInt),
    #[error("the module cannot be realized as an ideal: tau acts as the scalar {0}")]
    NotRealizable(BigInt),
    #[error("form {0} is not primitive")]
    NotPrimitive(BQForm),
    #[error("discriminants differ: {0} and {1}")]
    DiscriminantMismatch(BigInt, BigInt),
    #[error("discriminant is zero")]
    Degenerate,
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("malformed ideal JSON: {0}")]
    BadJson(String),
}

/// An element `u + v tau` of `C`.
pub type Element = [BigInt; 2];

fn int_parts(algebra: &QuadraticAlgebra) -> Result<(BigInt, BigInt), IdealError> {
    match (algebra.q.as_int(), algebra.r.as_int()) {
        (Some(q), Some(r)) => Ok((q.clone(), r.clone())),
        _ => Err(IdealError::NotOverIntegers(algebra.ring())),
    }
}

/// `(x1 + y1 tau)(x2 + y2 tau)` with `tau^2 = -q tau - r`.
fn mul_elements(q: &BigInt, r: &BigInt, x: &Element, y: &Element) -> Element {
    let t2 = &x[1] * &y[1];
    [
        &x[0] * &y[0] - r * &t2,
        &x[0] * &y[1] + &x[1] * &y[0] - q * &t2,
    ]
}

/// `N(u + v tau) = u^2 - q u v + r v^2`.
pub fn element_norm(algebra: &QuadraticAlgebra, x: &Element) -> Result<BigInt, IdealError> {
    let (q, r) = int_parts(algebra)?;
    Ok(&x[0] * &x[0] - &q * &x[0] * &x[1] + &r * &x[1] * &x[1])
}

/// Extended gcd of a list: `(g, coefficients)` with `sum c_i x_i = g >= 0`.
fn gcd_combination(xs: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut coeffs = vec![BigInt::zero(); xs.len()];
    for (i, x) in xs.iter().enumerate() {
        let e = g.extended_gcd(x);
        // e.gcd = e.x * g + e.y * x
        for c in coeffs.iter_mut().take(i) {
            *c *= &e.x;
        }
        coeffs[i] = e.y.clone();
        g = e.gcd;
    }
    if g.is_negative() {
        g = -g;
        for c in coeffs.iter_mut() {
            *c = -&*c;
        }
    }
    (g, coeffs)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IdealLattice {
    algebra: QuadraticAlgebra,
    n1: BigInt,
    m: BigInt,
    n2: BigInt,
    den: BigInt,
}

/// Hermite basis `(n1, m, n2)` of the lattice spanned by `gens`.
fn hermite(gens: &[Element]) -> Result<(BigInt, BigInt, BigInt), IdealError> {
    let vs: Vec<BigInt> = gens.iter().map(|g| g[1].clone()).collect();
    let (n2, coeffs) = gcd_combination(&vs);
    if n2.is_zero() {
        return Err(IdealError::NotFull);
    }
    let mut wu = BigInt::zero();
    for (c, g) in coeffs.iter().zip(gens) {
        wu += c * &g[0];
    }
    // the sublattice with v = 0 is spanned by g_i - (v_i / n2) w
    let us: Vec<BigInt> = gens
        .iter()
        .map(|g| &g[0] - (&g[1] / &n2) * &wu)
        .collect();
    let (n1, _) = gcd_combination(&us);
    if n1.is_zero() {
        return Err(IdealError::NotFull);
    }
    let m = wu.mod_floor(&n1);
    Ok((n1, m, n2))
}

impl IdealLattice {
    /// The lattice `(1/den) * span(gens)`, which must be a full ideal.
    pub fn from_generators(
        algebra: &QuadraticAlgebra,
        gens: &[Element],
        den: &BigInt,
    ) -> Result<IdealLattice, IdealError> {
        int_parts(algebra)?;
        if !den.is_positive() {
            return Err(IdealError::BadDenominator(den.clone()));
        }
        let (n1, m, n2) = hermite(gens)?;
        let g = n1.gcd(&m).gcd(&n2).gcd(den);
        let ideal = IdealLattice {
            algebra: algebra.clone(),
            n1: &n1 / &g,
            m: &m / &g,
            n2: &n2 / &g,
            den: den / &g,
        };
        if !ideal.is_tau_closed() {
            return Err(IdealError::NotAnIdeal);
        }
        Ok(ideal)
    }

    pub fn unit(algebra: &QuadraticAlgebra) -> Result<IdealLattice, IdealError> {
        IdealLattice::from_generators(
            algebra,
            &[[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]],
            &BigInt::one(),
        )
    }

    /// The principal ideal `x C`.
    pub fn principal(algebra: &QuadraticAlgebra, x: &Element) -> Result<IdealLattice, IdealError> {
        let (q, r) = int_parts(algebra)?;
        let tau = [BigInt::zero(), BigInt::one()];
        let gens = [x.clone(), mul_elements(&q, &r, x, &tau)];
        IdealLattice::from_generators(algebra, &gens, &BigInt::one())
    }

    pub fn algebra(&self) -> &QuadraticAlgebra {
        &self.algebra
    }

    /// `[[n1, m], [0, n2]]`; the columns are the basis vectors.
    pub fn hnf(&self) -> [[BigInt; 2]; 2] {
        [
            [self.n1.clone(), self.m.clone()],
            [BigInt::zero(), self.n2.clone()],
        ]
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Numerator basis vectors `n1` and `m + n2 tau`.
    pub fn basis(&self) -> [Element; 2] {
        [
            [self.n1.clone(), BigInt::zero()],
            [self.m.clone(), self.n2.clone()],
        ]
    }

    /// Whether `x / den` lies in the ideal, i.e. `x` lies in the numerator lattice.
    pub fn numerator_contains(&self, x: &Element) -> bool {
        if !(&x[1] % &self.n2).is_zero() {
            return false;
        }
        let k = &x[1] / &self.n2;
        (&x[0] - k * &self.m).is_multiple_of(&self.n1)
    }

    /// Coordinates of a numerator-lattice vector in the Hermite basis.
    fn coordinates(&self, x: &Element) -> Element {
        let k2 = &x[1] / &self.n2;
        let k1 = (&x[0] - &k2 * &self.m) / &self.n1;
        [k1, k2]
    }

    fn is_tau_closed(&self) -> bool {
        let (q, r) = int_parts(&self.algebra).expect("integral algebra");
        let tau = [BigInt::zero(), BigInt::one()];
        self.basis()
            .iter()
            .all(|b| self.numerator_contains(&mul_elements(&q, &r, &tau, b)))
    }

    fn check_same_algebra(&self, other: &IdealLattice) -> Result<(), IdealError> {
        let a = &self.algebra;
        let b = &other.algebra;
        if a.q != b.q || a.r != b.r {
            return Err(IdealError::AlgebraMismatch);
        }
        Ok(())
    }

    /// The lattice spanned by the four products of basis vectors.
    pub fn multiply(&self, other: &IdealLattice) -> Result<IdealLattice, IdealError> {
        self.check_same_algebra(other)?;
        let (q, r) = int_parts(&self.algebra)?;
        let mut gens = Vec::with_capacity(4);
        for x in self.basis().iter() {
            for y in other.basis().iter() {
                gens.push(mul_elements(&q, &r, x, y));
            }
        }
        IdealLattice::from_generators(&self.algebra, &gens, &(&self.den * &other.den))
    }

    /// `x I` for an element `x` of `C`.
    pub fn scale(&self, x: &Element) -> Result<IdealLattice, IdealError> {
        let (q, r) = int_parts(&self.algebra)?;
        let gens: Vec<Element> = self
            .basis()
            .iter()
            .map(|b| mul_elements(&q, &r, x, b))
            .collect();
        IdealLattice::from_generators(&self.algebra, &gens, &self.den)
    }

    /// Image under the involution `tau -> -q - tau`.
    pub fn conjugate(&self) -> Result<IdealLattice, IdealError> {
        let (q, _) = int_parts(&self.algebra)?;
        let gens: Vec<Element> = self
            .basis()
            .iter()
            .map(|b| [&b[0] - &q * &b[1], -&b[1]])
            .collect();
        IdealLattice::from_generators(&self.algebra, &gens, &self.den)
    }

    /// The action of `tau` on the Hermite basis.
    pub fn to_module(&self) -> TraceableModule {
        let (q, r) = int_parts(&self.algebra).expect("integral algebra");
        let tau = [BigInt::zero(), BigInt::one()];
        let [b1, b2] = self.basis();
        let c1 = self.coordinates(&mul_elements(&q, &r, &tau, &b1));
        let c2 = self.coordinates(&mul_elements(&q, &r, &tau, &b2));
        let zz = Ring::Integers;
        let t = Mat2 {
            m: [
                [zz.from_bigint(&c1[0]), zz.from_bigint(&c2[0])],
                [zz.from_bigint(&c1[1]), zz.from_bigint(&c2[1])],
            ],
        };
        TraceableModule::unchecked(self.algebra.clone(), t)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let e = |x: &BigInt| element_to_json(&Ring::Integers.from_bigint(x));
        json!({
            "algebra": self.algebra.to_json(),
            "hnf": [[e(&self.n1), e(&self.m)], [0, e(&self.n2)]],
            "den": e(&self.den),
        })
    }

    /// Parse `{"algebra", "hnf", "den"}`; the columns of `hnf` may be any
    /// generating pair and are brought to Hermite form.
    pub fn from_json(v: &serde_json::Value) -> Result<IdealLattice, IdealError> {
        let bad = |s: &str| IdealError::BadJson(s.to_string());
        let algebra = QuadraticAlgebra::from_json(v.get("algebra").ok_or_else(|| bad("missing algebra"))?)?;
        let zz = Ring::Integers;
        let ring_err = |e: crate::rings::RingError| IdealError::BadJson(e.to_string());
        let h = Mat2::from_json(zz, v.get("hnf").ok_or_else(|| bad("missing hnf"))?).map_err(ring_err)?;
        let den = match v.get("den") {
            None => BigInt::one(),
            Some(d) => element_from_json(zz, d).map_err(ring_err)?.lift(),
        };
        let gens = [
            [h.m[0][0].lift(), h.m[1][0].lift()],
            [h.m[0][1].lift(), h.m[1][1].lift()],
        ];
        IdealLattice::from_generators(&algebra, &gens, &den)
    }
}

impl fmt::Display for IdealLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tau_part = if self.m.is_zero() {
            format!("{} tau", self.n2)
        } else {
            format!("{} + {} tau", self.m, self.n2)
        };
        if self.den.is_one() {
            write!(f, "<{}, {}>", self.n1, tau_part)
        } else {
            write!(f, "(1/{}) <{}, {}>", self.den, self.n1, tau_part)
        }
    }
}

/// An ideal together with a module isomorphism onto it: `P T = T_I P` where
/// `T_I` is the action on the ideal's Hermite basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub ideal: IdealLattice,
    pub iso: Mat2,
}

/// Realize a traceable module over `Z` as an integral ideal.
///
/// A vector `m` with `(m, tau m)` linearly independent is sent to `1`; the
/// resulting fractional ideal is scaled by `det [m | tau m]`. The only modules
/// without such `m` are those on which `tau` acts as a scalar.
pub fn realize_as_ideal(pair: &CorrespondencePair) -> Result<Realization, IdealError> {
    let module = &pair.module;
    if module.ring() != Ring::Integers {
        return Err(IdealError::NotOverIntegers(module.ring()));
    }
    // rejects non-traceable modules
    pair_to_form(pair)?;
    let t = &module.t;
    if t.is_scalar() {
        return Err(IdealError::NotRealizable(t.m[0][0].lift()));
    }
    let zz = Ring::Integers;
    let candidates = [
        [zz.zero(), zz.one()],
        [zz.one(), zz.zero()],
        [zz.one(), zz.one()],
    ];
    let (b, d) = candidates
        .iter()
        .find_map(|m| {
            let b = Mat2::from_columns(m.clone(), t.apply(m));
            let d = b.det();
            (!d.is_zero()).then_some((b, d))
        })
        .expect("a non-scalar matrix has a cyclic vector among y, x, x + y");
    debug_assert!(!d.is_zero());
    // v -> coordinates of v in the basis (m, tau m), times det: adj(B) v
    let adj = b.adjugate();
    let gens = [
        [adj.m[0][0].lift(), adj.m[1][0].lift()],
        [adj.m[0][1].lift(), adj.m[1][1].lift()],
    ];
    let ideal = IdealLattice::from_generators(&module.algebra, &gens, &BigInt::one())?;
    let iso = {
        let c0 = ideal.coordinates(&gens[0]);
        let c1 = ideal.coordinates(&gens[1]);
        Mat2 {
            m: [
                [zz.from_bigint(&c0[0]), zz.from_bigint(&c1[0])],
                [zz.from_bigint(&c0[1]), zz.from_bigint(&c1[1])],
            ],
        }
    };
    let t_ideal = ideal.to_module().t;
    if !iso.det().is_unit() || iso.mul(t) != t_ideal.mul(&iso) {
        return Err(IdealError::Inconsistent(format!(
            "realization map {iso} does not intertwine {t} and {t_ideal}"
        )));
    }
    Ok(Realization { ideal, iso })
}

/// Elements `c`, `c'` of `C`, both of nonzero norm, with `c I = c' J`, when `I`
/// and `J` are isomorphic as modules.
///
/// The module isomorphism `psi: I -> J` is multiplication by `psi(e) / e` for
/// the first basis vector `e` of `I`, so `psi(e) I = e J` after clearing
/// denominators.
pub fn class_witness(
    i: &IdealLattice,
    j: &IdealLattice,
    bound: SearchBound,
) -> Result<Option<(Element, Element)>, IdealError> {
    i.check_same_algebra(j)?;
    let Some(p) = module_isomorphic(&i.to_module(), &j.to_module(), bound)? else {
        return Ok(None);
    };
    // psi(e1) has J-coordinates equal to the first column of P
    let col = p.matrix().column(0);
    let [jb1, jb2] = j.basis();
    let image = [
        col[0].lift() * &jb1[0] + col[1].lift() * &jb2[0],
        col[0].lift() * &jb1[1] + col[1].lift() * &jb2[1],
    ];
    // psi(e)/den_J * I-numerator/den_I = e/den_I * J-numerator/den_J
    let e = i.basis()[0].clone();
    let c = image;
    let c_prime = e;
    for x in [&c, &c_prime] {
        if element_norm(&i.algebra, x)?.is_zero() {
            return Ok(None);
        }
    }
    let common = &i.den * &j.den;
    let lhs = i.scaled_over(&c, &common)?;
    let rhs = j.scaled_over(&c_prime, &common)?;
    if lhs != rhs {
        return Err(IdealError::Inconsistent(format!(
            "witness fails: c I = {lhs}, c' J = {rhs}"
        )));
    }
    Ok(Some((c, c_prime)))
}

impl IdealLattice {
    /// `(1/den) * x * L` for the numerator lattice `L`.
    fn scaled_over(&self, x: &Element, den: &BigInt) -> Result<IdealLattice, IdealError> {
        let (q, r) = int_parts(&self.algebra)?;
        let gens: Vec<Element> = self
            .basis()
            .iter()
            .map(|b| mul_elements(&q, &r, x, b))
            .collect();
        IdealLattice::from_generators(&self.algebra, &gens, den)
    }
}

fn int_form(f: &BQForm) -> Result<[BigInt; 3], IdealError> {
    Ok(f.int_coeffs()?)
}

/// Gauss composition computed as a product of ideals.
///
/// Both forms are turned into ideals of one presentation of the algebra of
/// discriminant `D`, multiplied, and the product is read back as a twisted
/// form. For `D < 0` the result is the reduced positive representative.
pub fn compose_forms(f1: &BQForm, f2: &BQForm) -> Result<BQForm, IdealError> {
    let [_, b1, _] = int_form(f1)?;
    let [_, b2, _] = int_form(f2)?;
    let d1 = f1.discriminant().lift();
    let d2 = f2.discriminant().lift();
    if d1 != d2 {
        return Err(IdealError::DiscriminantMismatch(d1, d2));
    }
    if d1.is_zero() {
        return Err(IdealError::Degenerate);
    }
    for f in [f1, f2] {
        if !f.is_primitive() {
            return Err(IdealError::NotPrimitive(f.clone()));
        }
    }
    let p1 = form_to_pair(&f1.with_flavor(Flavor::Twisted));
    let p2 = form_to_pair(&f2.with_flavor(Flavor::Twisted));
    // equal discriminants force b1 = b2 mod 2
    let s = Ring::Integers.from_bigint(&((&b1 - &b2) / BigInt::from(2)));
    let (m2, _) = p2.module.shift_generator(&s);
    if m2.algebra.q != p1.algebra().q || m2.algebra.r != p1.algebra().r {
        return Err(IdealError::Inconsistent("algebras do not align".into()));
    }
    let p2 = CorrespondencePair::new(m2, Flavor::Twisted);
    let i1 = realize_as_ideal(&p1)?.ideal;
    let i2 = realize_as_ideal(&p2)?.ideal;
    let product = i1.multiply(&i2)?;
    let raw = pair_to_form(&CorrespondencePair::new(product.to_module(), Flavor::Twisted))?;
    if raw.discriminant().lift() != d1 {
        return Err(IdealError::Inconsistent(format!("composite {raw} has the wrong discriminant")));
    }
    if d1.is_negative() {
        Ok(canonical_definite(&raw, EquivalenceGroup::Gl2Twisted)?.0)
    } else {
        Ok(raw)
    }
}

/// The class group of primitive positive definite forms of discriminant `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroupResult {
    pub discriminant: BigInt,
    /// Reduced representatives; the principal form comes first.
    pub forms: Vec<BQForm>,
    /// `table[i][j]` is the index of `forms[i] * forms[j]`.
    pub table: Vec<Vec<usize>>,
    /// `d1 | d2 | ...` with the group isomorphic to the product of `Z/d_i`.
    pub invariant_factors: Vec<u64>,
}

/// Reduced primitive forms of discriminant `D < 0`, in order of `(a, b)`.
pub fn reduced_forms(d: &BigInt) -> Result<Vec<BQForm>, IdealError> {
    crate::forms::check_negative_discriminant(d)?;
    let abs = d.abs();
    let a_max = (&abs / BigInt::from(3)).sqrt();
    let a_max = a_max.to_i64().ok_or_else(|| IdealError::Inconsistent("discriminant too large".into()))?;
    let per_a: Vec<Vec<BQForm>> = (1..=a_max)
        .into_par_iter()
        .map(|a| {
            let a = BigInt::from(a);
            let mut out = Vec::new();
            let mut b = -&a + 1;
            while b <= a {
                let num: BigInt = &b * &b - d;
                let four_a = BigInt::from(4) * &a;
                if num.is_multiple_of(&four_a) {
                    let c = &num / &four_a;
                    let zz = Ring::Integers;
                    let f = BQForm {
                        a: zz.from_bigint(&a),
                        b: zz.from_bigint(&b),
                        c: zz.from_bigint(&c),
                        flavor: Flavor::Twisted,
                    };
                    if is_reduced(&f) && f.is_primitive() {
                        out.push(f);
                    }
                }
                b += 1;
            }
            out
        })
        .collect();
    Ok(per_a.into_iter().flatten().collect())
}

pub fn class_group(d: &BigInt) -> Result<ClassGroupResult, IdealError> {
    let forms = reduced_forms(d)?;
    let principal = principal_form(d)?;
    if forms.first() != Some(&principal) {
        return Err(IdealError::Inconsistent("principal form missing".into()));
    }
    let index_of = |f: &BQForm| forms.iter().position(|g| g == f);
    let table: Vec<Vec<usize>> = forms
        .par_iter()
        .map(|f| {
            forms
                .iter()
                .map(|g| {
                    let h = compose_forms(f, g)?;
                    index_of(&h).ok_or_else(|| {
                        IdealError::Inconsistent(format!("{f} * {g} = {h} is not a listed form"))
                    })
                })
                .collect::<Result<Vec<usize>, IdealError>>()
        })
        .collect::<Result<_, _>>()?;
    let invariant_factors = invariant_factors(&table);
    Ok(ClassGroupResult {
        discriminant: d.clone(),
        forms,
        table,
        invariant_factors,
    })
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Invariant factors of a finite abelian group given by its table with
/// identity at index 0, from the counts of elements killed by `p^k`.
pub fn invariant_factors(table: &[Vec<usize>]) -> Vec<u64> {
    let h = table.len() as u64;
    let power = |x: usize, k: u64| {
        let mut acc = 0usize;
        for _ in 0..k {
            acc = table[acc][x];
        }
        acc
    };
    // cyclic factor orders, as powers of each prime
    let mut factors_by_prime: Vec<Vec<u64>> = Vec::new();
    for p in prime_factors(h) {
        let mut killed = vec![1u64];
        let mut pk = 1u64;
        while *killed.last().expect("nonempty") < h_part(h, p) {
            pk *= p;
            let count = (0..table.len()).filter(|&x| power(x, pk) == 0).count() as u64;
            killed.push(count);
        }
        // number of cyclic factors of order >= p^k is log_p(killed[k] / killed[k-1])
        let mut at_least: Vec<u32> = Vec::new();
        for k in 1..killed.len() {
            let mut ratio = killed[k] / killed[k - 1];
            let mut e = 0;
            while ratio > 1 {
                ratio /= p;
                e += 1;
            }
            at_least.push(e);
        }
        let mut orders = Vec::new();
        for (k, &n) in at_least.iter().enumerate() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(n - next) {
                orders.push(p.pow(k as u32 + 1));
            }
        }
        orders.sort_unstable_by(|a, b| b.cmp(a));
        factors_by_prime.push(orders);
    }
    let rank = factors_by_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; rank];
    for orders in &factors_by_prime {
        for (i, o) in orders.iter().enumerate() {
            out[rank - 1 - i] *= o;
        }
    }
    out
}

fn h_part(mut h: u64, p: u64) -> u64 {
    let mut part = 1;
    while h.is_multiple_of(p) {
        h /= p;
        part *= p;
    }
    part
}

impl ClassGroupResult {
    pub fn class_number(&self) -> usize {
        self.forms.len()
    }

    /// Closure, identity, inverses, commutativity and associativity of the table.
    pub fn check_group_axioms(&self) -> Result<(), String> {
        let n = self.table.len();
        let t = &self.table;
        for i in 0..n {
            if t[0][i] != i || t[i][0] != i {
                return Err(format!("form {} is not the identity on {}", self.forms[0], self.forms[i]));
            }
            if !(0..n).any(|j| t[i][j] == 0) {
                return Err(format!("{} has no inverse", self.forms[i]));
            }
            for j in 0..n {
                if t[i][j] != t[j][i] {
                    return Err(format!("{} and {} do not commute", self.forms[i], self.forms[j]));
                }
                for k in 0..n {
                    if t[t[i][j]][k] != t[i][t[j][k]] {
                        return Err("associativity fails".into());
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let forms: Vec<serde_json::Value> = self
            .forms
            .iter()
            .map(|f| json!(f.coeffs().map(element_to_json)))
            .collect();
        json!({
            "discriminant": element_to_json(&Ring::Integers.from_bigint(&self.discriminant)),
            "class_number": self.class_number(),
            "forms": forms,
            "table": self.table,
            "invariant_factors": self.invariant_factors,
        })
    }

    pub fn to_text(&self) -> String {
        let labels: Vec<String> = self.forms.iter().map(|f| f.to_string()).collect();
        let width = labels.iter().map(String::len).max().unwrap_or(0);
        let group = if self.invariant_factors.is_empty() {
            "trivial".to_string()
        } else {
            self.invariant_factors
                .iter()
                .map(|d| format!("Z/{d}"))
                .collect::<Vec<_>>()
                .join(" x ")
        };
        let mut out = format!(
            "discriminant {}: class number {}, group {}\n",
            self.discriminant,
            self.class_number(),
            group
        );
        out.push_str(&format!("{:>width$} |", "*"));
        for l in &labels {
            out.push_str(&format!(" {l:>width$}"));
        }
        out.push('\n');
        out.push_str(&"-".repeat(width + 1));
        out.push('+');
        out.push_str(&"-".repeat((width + 1) * labels.len()));
        out.push('\n');
        for (i, l) in labels.iter().enumerate() {
            out.push_str(&format!("{l:>width$} |"));
            for &j in &self.table[i] {
                out.push_str(&format!(" {:>width$}", labels[j]));
            }
            out.push('\n');
        }
        out
    }
}
