use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::symcore::Scalar;

use super::SusyError;

/// A point of the upper half plane, kept both exactly and as a float.
#[derive(Clone, Debug, PartialEq)]
pub struct Tau {
    value: Complex64,
    exact: Scalar,
}

impl Tau {
    /// Floats convert exactly to binary rationals, so every Tau is exact.
    pub fn new(z: Complex64) -> Result<Self, SusyError> {
        if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(SusyError::BadTau);
        }
        let exact = Scalar::from_c64(z).ok_or(SusyError::BadTau)?;
        Ok(Tau { value: z, exact })
    }

    pub fn exact_value(s: Scalar) -> Result<Self, SusyError> {
        if !s.im.is_positive() {
            return Err(SusyError::BadTau);
        }
        Ok(Tau {
            value: s.to_c64(),
            exact: s,
        })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn exact(&self) -> &Scalar {
        &self.exact
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.value;
        if z.re == 0.0 {
            write!(f, "{}i", z.im)
        } else {
            write!(f, "{}{:+}i", z.re, z.im)
        }
    }
}

/// [[a, b], [c, d]] acting by τ ↦ (aτ + b)/(cτ + d).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Mobius(pub [[i64; 2]; 2]);

impl Mobius {
    pub const IDENTITY: Mobius = Mobius([[1, 0], [0, 1]]);

    pub fn det(&self) -> i64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    /// self · o, so (self·o)(τ) = self(o(τ)).
    fn then_left(&self, o: &Mobius) -> Result<Mobius, SusyError> {
        let m = |x: i64, y: i64| x.checked_mul(y).ok_or(SusyError::Overflow);
        let s = |x: i64, y: i64| x.checked_add(y).ok_or(SusyError::Overflow);
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = o.0;
        Ok(Mobius([
            [s(m(a, e)?, m(b, g)?)?, s(m(a, f)?, m(b, h)?)?],
            [s(m(c, e)?, m(d, g)?)?, s(m(c, f)?, m(d, h)?)?],
        ]))
    }

    /// ±identity, i.e. trivial in PSL₂(Z).
    pub fn is_trivial(&self) -> bool {
        let [[a, b], [c, d]] = self.0;
        b == 0 && c == 0 && a == d && a.abs() == 1
    }
}

pub fn apply_mobius(g: &Mobius, tau: Complex64) -> Complex64 {
    let [[a, b], [c, d]] = g.0;
    (tau * a as f64 + b as f64) / (tau * c as f64 + d as f64)
}

fn half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}

/// Moves τ into |Re τ| ≤ 1/2, |τ| ≥ 1 by T and S steps, in exact arithmetic.
/// On the boundary: |τ| = 1 keeps Re τ ≤ 0, and Re τ = ±1/2 keeps −1/2.
pub fn reduce_to_fundamental_domain(tau: &Tau) -> Result<(Tau, Mobius), SusyError> {
    let mut t = tau.exact.clone();
    let mut gamma = Mobius::IDENTITY;
    let one = BigRational::one();
    let s_step = |t: &Scalar| -> Scalar { &Scalar::int(-1) / t };
    const S: Mobius = Mobius([[0, -1], [1, 0]]);
    for _ in 0..10_000 {
        // T^{-n} with n = floor(Re τ + 1/2) lands Re τ in [−1/2, 1/2).
        let n = (&t.re + half()).floor().to_integer();
        if !n.is_zero() {
            let k = n.to_i64().ok_or(SusyError::Overflow)?;
            t = &t - &Scalar::real(BigRational::from_integer(n));
            gamma = Mobius([[1, -k], [0, 1]]).then_left(&gamma)?;
        }
        let r2 = t.norm_sqr();
        if r2 < one {
            t = s_step(&t);
            gamma = S.then_left(&gamma)?;
            continue;
        }
        if r2 == one && t.re.is_positive() {
            t = s_step(&t);
            gamma = S.then_left(&gamma)?;
        }
        if gamma.0[1][0] < 0 || (gamma.0[1][0] == 0 && gamma.0[1][1] < 0) {
            let [[a, b], [c, d]] = gamma.0;
            gamma = Mobius([[-a, -b], [-c, -d]]);
        }
        return Ok((Tau::exact_value(t)?, gamma));
    }
    Err(SusyError::Overflow)
}
