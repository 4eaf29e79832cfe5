use std::fmt;

use super::{GrassmannElement, GrassmannError, Parity};

/// `a + θα` with θ odd and θ² = −1, over a host Λ_N.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DNumber {
    pub a: GrassmannElement,
    pub alpha: GrassmannElement,
}

impl DNumber {
    pub fn new(a: GrassmannElement, alpha: GrassmannElement) -> Result<Self, GrassmannError> {
        a.check_parity(Parity::Even)?;
        alpha.check_parity(Parity::Odd)?;
        if a.n() != alpha.n() {
            return Err(GrassmannError::Mismatch(a.n(), alpha.n()));
        }
        Ok(DNumber { a, alpha })
    }

    pub fn one(n: u8) -> Self {
        DNumber {
            a: GrassmannElement::one(n),
            alpha: GrassmannElement::zero(n),
        }
    }

    pub fn n(&self) -> u8 {
        self.a.n()
    }

    pub fn is_invertible(&self) -> bool {
        self.a.is_invertible()
    }

    /// The group law (aa′ + αα′, aα′ + αa′).
    pub fn dmul(&self, o: &DNumber) -> Result<DNumber, GrassmannError> {
        let a = self.a.gmul(&o.a)?.try_add(&self.alpha.gmul(&o.alpha)?)?;
        let alpha = self.a.gmul(&o.alpha)?.try_add(&self.alpha.gmul(&o.a)?)?;
        Ok(DNumber { a, alpha })
    }

    /// Two-sided inverse (a⁻¹, −αa⁻²).
    pub fn dinv(&self) -> Result<DNumber, GrassmannError> {
        let b = self.a.ginv()?;
        let alpha = -&self.alpha.gmul(&b.gmul(&b)?)?;
        let inv = DNumber { a: b, alpha };
        debug_assert_eq!(self.dmul(&inv)?, DNumber::one(self.n()));
        Ok(inv)
    }
}

impl fmt::Display for DNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.alpha)
    }
}
