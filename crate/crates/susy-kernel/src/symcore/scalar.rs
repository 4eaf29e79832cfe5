//! Exact Gaussian rationals.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element of ℚ(i), stored as real and imaginary rational parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Scalar::new(rat(n, d), BigRational::zero())
    }

    pub fn gauss(re: (i64, i64), im: (i64, i64)) -> Self {
        Scalar::new(rat(re.0, re.1), rat(im.0, im.1))
    }

    pub fn real(re: BigRational) -> Self {
        Scalar::new(re, BigRational::zero())
    }

    /// Exact conversion of a finite float pair; `None` for NaN or infinity.
    pub fn from_c64(z: Complex64) -> Option<Self> {
        Some(Scalar::new(
            BigRational::from_float(z.re)?,
            BigRational::from_float(z.im)?,
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Scalar::new(&self.re / &n, -&self.im / &n))
    }

    pub fn powi(&self, n: i64) -> Option<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Scalar::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Some(acc)
    }

    /// Float shadow of the exact value.
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Integer value when the scalar is a real integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        (self.im.is_zero() && self.re.is_integer()).then(|| self.re.to_integer())
    }

    /// Principal square root when it lies in ℚ(i).
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        // (x + iy)² = a + bi with |z| = √(a² + b²) rational.
        let modulus = rat_sqrt(&self.norm_sqr())?;
        let two = rat(2, 1);
        let x = rat_sqrt(&((&modulus + &self.re) / &two))?;
        let y = if x.is_zero() {
            rat_sqrt(&((&modulus - &self.re) / &two))?
        } else {
            &self.im / (&two * &x)
        };
        let root = Scalar::new(x, y);
        debug_assert!(&(&root * &root) == self);
        Some(root)
    }

    /// Sort key placing "positive-looking" values first; used to fix signs canonically.
    pub fn is_canonically_positive(&self) -> bool {
        if self.re.is_zero() {
            self.im.is_positive()
        } else {
            self.re.is_positive()
        }
    }
}

fn rat_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

fn fmt_rat(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    /// Printed in the grammar accepted by the parser, parenthesised when compound.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = fmt_rat(&self.re);
        let imag = |q: &BigRational| -> String {
            if q.is_one() {
                "i".to_string()
            } else if (-q).is_one() {
                "-i".to_string()
            } else if q.is_integer() {
                format!("{}*i", fmt_rat(q))
            } else {
                format!("{}*i/{}", q.numer(), q.denom())
            }
        };
        if self.im.is_zero() {
            write!(f, "{re}")
        } else if self.re.is_zero() {
            write!(f, "{}", imag(&self.im))
        } else if self.im.is_negative() {
            write!(f, "({re} - {})", imag(&-self.im.clone()))
        } else {
            write!(f, "({re} + {})", imag(&self.im))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as its parseable text form.
impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::inv`] for a checked inverse.
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.inv().expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar { (&self).$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = Scalar::gauss((1, 2), (3, 1));
        let b = Scalar::gauss((-2, 1), (1, 5));
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        assert!(Scalar::zero().inv().is_none());
    }

    #[test]
    fn i_squared() {
        assert_eq!(&Scalar::i() * &Scalar::i(), Scalar::int(-1));
    }

    #[test]
    fn exact_roots() {
        assert_eq!(Scalar::int(-1).sqrt_exact(), Some(Scalar::i()));
        assert_eq!(Scalar::frac(9, 4).sqrt_exact(), Some(Scalar::frac(3, 2)));
        // (1 + 2i)² = −3 + 4i
        assert_eq!(
            Scalar::gauss((-3, 1), (4, 1)).sqrt_exact(),
            Some(Scalar::gauss((1, 1), (2, 1)))
        );
        assert_eq!(Scalar::int(2).sqrt_exact(), None);
    }

    #[test]
    fn shadow_matches() {
        let a = Scalar::gauss((1, 3), (-5, 7));
        let z = a.to_c64();
        assert!((z.re - 1.0 / 3.0).abs() < 1e-15 && (z.im + 5.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn display() {
        assert_eq!(Scalar::int(3).to_string(), "3");
        assert_eq!(Scalar::gauss((1, 2), (-1, 1)).to_string(), "(1/2 - i)");
        assert_eq!(Scalar::gauss((0, 1), (2, 3)).to_string(), "2*i/3");
    }
}
