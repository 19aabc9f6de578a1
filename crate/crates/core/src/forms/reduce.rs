use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{BQForm, FormError};
use crate::matrix::{Gl2, Mat2};
use crate::rings::Ring;

/// `|b| <= a <= c`, with `b >= 0` whenever `|b| = a` or `a = c`.
pub fn is_reduced(f: &BQForm) -> bool {
    let Ok([a, b, c]) = f.int_coeffs() else {
        return false;
    };
    if !a.is_positive() || b.abs() > a || a > c {
        return false;
    }
    if (b.abs() == a || a == c) && b.is_negative() {
        return false;
    }
    true
}

/// Reduce a positive definite integral form.
///
/// Returns the reduced form together with an `SL_2(Z)` matrix `W` such that
/// `f(W (x, y)) ` is the reduced form. The flavor of `f` is kept; for
/// determinant-one matrices the plain and twisted actions coincide.
pub fn reduce_posdef(f: &BQForm) -> Result<(BQForm, Gl2), FormError> {
    let [mut a, mut b, mut c] = f.int_coeffs()?;
    let disc = &b * &b - BigInt::from(4) * &a * &c;
    if !disc.is_negative() {
        return Err(FormError::NotDefinite(disc));
    }
    if !a.is_positive() {
        return Err(FormError::NotPositive(a));
    }
    let zz = Ring::Integers;
    let mut w = [
        [BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::one()],
    ];
    loop {
        if !(b > -&a && b <= a) {
            // translate x -> x + k y so that -a < b <= a
            let two_a = BigInt::from(2) * &a;
            let k = (&a - &b).div_floor(&two_a);
            c = &a * &k * &k + &b * &k + &c;
            b += &two_a * &k;
            // w <- w * [[1, k], [0, 1]]
            w[0][1] += &w[0][0] * &k;
            w[1][1] += &w[1][0] * &k;
        }
        if a > c || (a == c && b.is_negative()) {
            // (x, y) -> (-y, x)
            std::mem::swap(&mut a, &mut c);
            b = -b;
            // w <- w * [[0, -1], [1, 0]]
            for row in w.iter_mut() {
                let old0 = row[0].clone();
                row[0] = row[1].clone();
                row[1] = -old0;
            }
            continue;
        }
        break;
    }
    let reduced = BQForm {
        a: zz.from_bigint(&a),
        b: zz.from_bigint(&b),
        c: zz.from_bigint(&c),
        flavor: f.flavor,
    };
    let witness = Gl2::new(Mat2::new(
        zz.from_bigint(&w[0][0]),
        zz.from_bigint(&w[0][1]),
        zz.from_bigint(&w[1][0]),
        zz.from_bigint(&w[1][1]),
    )?)?;
    debug_assert!(witness.det().is_one());
    Ok((reduced, witness))
}
