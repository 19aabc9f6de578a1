//! 2x2 matrices over a [`Ring`], and the invertible ones.

use std::fmt;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::rings::{check_same, element_to_json, Ring, RingElement, RingError};

/// A 2x2 matrix `[[m11, m12], [m21, m22]]`.
///
/// When a matrix describes the action of an endomorphism on a basis `(x, y)`,
/// its columns are the coordinates of the images of `x` and `y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub m: [[RingElement; 2]; 2],
}

impl Mat2 {
    pub fn new(
        m11: RingElement,
        m12: RingElement,
        m21: RingElement,
        m22: RingElement,
    ) -> Result<Mat2, RingError> {
        let ring = m11.ring();
        for e in [&m12, &m21, &m22] {
            check_same(ring, e.ring())?;
        }
        Ok(Mat2 {
            m: [[m11, m12], [m21, m22]],
        })
    }

    pub fn from_i64(ring: Ring, e: [[i64; 2]; 2]) -> Mat2 {
        Mat2 {
            m: [
                [ring.from_i64(e[0][0]), ring.from_i64(e[0][1])],
                [ring.from_i64(e[1][0]), ring.from_i64(e[1][1])],
            ],
        }
    }

    pub fn identity(ring: Ring) -> Mat2 {
        Mat2::scalar(&ring.one())
    }

    pub fn zero(ring: Ring) -> Mat2 {
        Mat2::scalar(&ring.zero())
    }

    pub fn scalar(s: &RingElement) -> Mat2 {
        let z = s.ring().zero();
        Mat2 {
            m: [[s.clone(), z.clone()], [z, s.clone()]],
        }
    }

    pub fn ring(&self) -> Ring {
        self.m[0][0].ring()
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.m[i][j]
    }

    pub fn trace(&self) -> RingElement {
        &self.m[0][0] + &self.m[1][1]
    }

    pub fn det(&self) -> RingElement {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn is_scalar(&self) -> bool {
        self.m[0][1].is_zero() && self.m[1][0].is_zero() && self.m[0][0] == self.m[1][1]
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        Mat2 {
            m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| &self.m[i][j] + &rhs.m[i][j];
        Mat2 {
            m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let e = |i: usize, j: usize| &self.m[i][j] - &rhs.m[i][j];
        Mat2 {
            m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn scale(&self, s: &RingElement) -> Mat2 {
        let e = |i: usize, j: usize| s * &self.m[i][j];
        Mat2 {
            m: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]],
        }
    }

    pub fn neg(&self) -> Mat2 {
        self.scale(&-self.ring().one())
    }

    pub fn transpose(&self) -> Mat2 {
        let m = &self.m;
        Mat2 {
            m: [
                [m[0][0].clone(), m[1][0].clone()],
                [m[0][1].clone(), m[1][1].clone()],
            ],
        }
    }

    /// The adjugate, so that `self * adj = det * I`.
    pub fn adjugate(&self) -> Mat2 {
        let m = &self.m;
        Mat2 {
            m: [
                [m[1][1].clone(), -&m[0][1]],
                [-&m[1][0], m[0][0].clone()],
            ],
        }
    }

    /// Inverse when the determinant is a unit.
    pub fn inverse(&self) -> Option<Mat2> {
        let inv = self.det().inverse()?;
        Some(self.adjugate().scale(&inv))
    }

    pub fn apply(&self, v: &[RingElement; 2]) -> [RingElement; 2] {
        [
            &self.m[0][0] * &v[0] + &self.m[0][1] * &v[1],
            &self.m[1][0] * &v[0] + &self.m[1][1] * &v[1],
        ]
    }

    pub fn column(&self, j: usize) -> [RingElement; 2] {
        [self.m[0][j].clone(), self.m[1][j].clone()]
    }

    pub fn from_columns(c0: [RingElement; 2], c1: [RingElement; 2]) -> Mat2 {
        let [a, c] = c0;
        let [b, d] = c1;
        Mat2 {
            m: [[a, b], [c, d]],
        }
    }

    /// Every 2x2 matrix over a finite ring, in lexicographic order of
    /// `(m11, m12, m21, m22)`.
    pub fn all(ring: Ring) -> Option<Vec<Mat2>> {
        let elems = ring.elements()?;
        let mut out = Vec::with_capacity(elems.len().pow(4));
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    for d in &elems {
                        out.push(Mat2 {
                            m: [[a.clone(), b.clone()], [c.clone(), d.clone()]],
                        });
                    }
                }
            }
        }
        Some(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!([
            [element_to_json(&self.m[0][0]), element_to_json(&self.m[0][1])],
            [element_to_json(&self.m[1][0]), element_to_json(&self.m[1][1])],
        ])
    }

    pub fn from_json(ring: Ring, v: &serde_json::Value) -> Result<Mat2, RingError> {
        let bad = || RingError::BadElement(v.to_string());
        let rows = v.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
        let mut entries = Vec::with_capacity(4);
        for row in rows {
            let row = row.as_array().filter(|r| r.len() == 2).ok_or_else(bad)?;
            for e in row {
                entries.push(crate::rings::element_from_json(ring, e)?);
            }
        }
        let mut it = entries.into_iter();
        let mut next = || it.next().expect("four entries");
        Ok(Mat2 {
            m: [[next(), next()], [next(), next()]],
        })
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows = self.to_json();
        let mut seq = serializer.serialize_seq(Some(2))?;
        for row in rows.as_array().expect("rows") {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

/// An element of `GL_2(R)`: a 2x2 matrix `[[k, l], [m, n]]` with unit determinant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Gl2(Mat2);

impl Gl2 {
    pub fn new(mat: Mat2) -> Result<Gl2, RingError> {
        let det = mat.det();
        if det.is_unit() {
            Ok(Gl2(mat))
        } else {
            Err(RingError::NotInvertible(det))
        }
    }

    pub fn from_i64(ring: Ring, e: [[i64; 2]; 2]) -> Result<Gl2, RingError> {
        Gl2::new(Mat2::from_i64(ring, e))
    }

    pub fn identity(ring: Ring) -> Gl2 {
        Gl2(Mat2::identity(ring))
    }

    /// `diag(1, -1)`.
    pub fn reflection(ring: Ring) -> Gl2 {
        Gl2(Mat2::from_i64(ring, [[1, 0], [0, -1]]))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat2 {
        self.0
    }

    pub fn ring(&self) -> Ring {
        self.0.ring()
    }

    pub fn det(&self) -> RingElement {
        self.0.det()
    }

    pub fn mul(&self, rhs: &Gl2) -> Gl2 {
        Gl2(self.0.mul(&rhs.0))
    }

    pub fn inverse(&self) -> Gl2 {
        Gl2(self.0.inverse().expect("unit determinant"))
    }

    pub fn transpose(&self) -> Gl2 {
        Gl2(self.0.transpose())
    }

    /// All of `GL_2(R)` for a finite ring, filtered from all matrices in
    /// lexicographic order.
    pub fn all(ring: Ring) -> Option<Vec<Gl2>> {
        Some(
            Mat2::all(ring)?
                .into_iter()
                .filter(|m| m.det().is_unit())
                .map(Gl2)
                .collect(),
        )
    }
}

impl fmt::Display for Gl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
