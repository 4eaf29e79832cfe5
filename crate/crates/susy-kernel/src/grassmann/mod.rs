//! Finite Grassmann algebras Λ_N, the super skew field D = C[θ] with θ² = −1,
//! and small graded matrices over Λ_N.

mod dnumber;
mod matrix;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::symcore::{parse_ast, Ast, Scalar, SymError};

pub use dnumber::DNumber;
pub use matrix::{
    d_to_gl11, literal_p, normalize_psi, phi_apply, phi_matrix, psi_matrix, right_theta_action,
    swap_matrix, vec_parity, GVec4, SuperMatrix,
};

/// Largest supported number of odd generators.
pub const MAX_GENERATORS: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_len(k: u32) -> Parity {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn add(self, o: Parity) -> Parity {
        if self == o {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GrassmannError {
    #[error("mismatched algebras: Λ_{0} vs Λ_{1}")]
    Mismatch(u8, u8),
    #[error("Λ_{0} exceeds the supported maximum of {MAX_GENERATORS} generators")]
    TooManyGenerators(u8),
    #[error("element is not invertible (zero body)")]
    NotInvertible,
    #[error("expected a homogeneous element of parity {0:?}")]
    WrongParity(Parity),
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("matrix does not have the required form: {0}")]
    BadForm(String),
    #[error("generator index {0} out of range")]
    BadGenerator(usize),
    #[error(transparent)]
    Parse(#[from] SymError),
}

/// Sign of η_I·η_J after sorting into η_{I∪J}; zero when I ∩ J ≠ ∅.
pub fn monomial_sign(i: u32, j: u32) -> i32 {
    if i & j != 0 {
        return 0;
    }
    let mut swaps = 0;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        swaps += (i >> (b + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// An element of Λ_N: sorted odd monomials (bitmasks) with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    n: u8,
    terms: BTreeMap<u32, Scalar>,
}

impl GrassmannElement {
    pub fn zero(n: u8) -> Self {
        assert!(n <= MAX_GENERATORS, "Λ_{n} exceeds the supported size");
        GrassmannElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn try_zero(n: u8) -> Result<Self, GrassmannError> {
        if n > MAX_GENERATORS {
            return Err(GrassmannError::TooManyGenerators(n));
        }
        Ok(GrassmannElement::zero(n))
    }

    pub fn scalar(n: u8, c: Scalar) -> Self {
        let mut x = GrassmannElement::zero(n);
        x.add_term(0, c);
        x
    }

    pub fn int(n: u8, k: i64) -> Self {
        GrassmannElement::scalar(n, Scalar::int(k))
    }

    pub fn one(n: u8) -> Self {
        GrassmannElement::int(n, 1)
    }

    /// The generator η_k, 1-based.
    pub fn generator(n: u8, k: usize) -> Result<Self, GrassmannError> {
        if k == 0 || k > n as usize {
            return Err(GrassmannError::BadGenerator(k));
        }
        let mut x = GrassmannElement::zero(n);
        x.add_term(1 << (k - 1), Scalar::one());
        Ok(x)
    }

    /// Builds from (mask, coefficient) pairs; masks must fit in N bits.
    pub fn from_terms(n: u8, terms: impl IntoIterator<Item = (u32, Scalar)>) -> Self {
        let mut x = GrassmannElement::zero(n);
        for (m, c) in terms {
            assert!(m < (1u32 << n), "monomial outside Λ_{n}");
            x.add_term(m, c);
        }
        x
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Scalar)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, mask: u32) -> Scalar {
        self.terms.get(&mask).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let s = match self.terms.remove(&m) {
            Some(old) => &old + &c,
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(m, s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn body(&self) -> Scalar {
        self.coeff(0)
    }

    pub fn nilpotent(&self) -> GrassmannElement {
        let mut x = self.clone();
        x.terms.remove(&0);
        x
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|m| m.count_ones() % 2 == 1)
    }

    /// Parity when homogeneous; zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        if self.is_even() {
            Some(Parity::Even)
        } else if self.is_odd() {
            Some(Parity::Odd)
        } else {
            None
        }
    }

    pub fn has_parity(&self, p: Parity) -> bool {
        match p {
            Parity::Even => self.is_even(),
            Parity::Odd => self.is_odd(),
        }
    }

    pub fn check_parity(&self, p: Parity) -> Result<(), GrassmannError> {
        if self.has_parity(p) {
            Ok(())
        } else {
            Err(GrassmannError::WrongParity(p))
        }
    }

    fn same(&self, o: &GrassmannElement) -> Result<(), GrassmannError> {
        if self.n == o.n {
            Ok(())
        } else {
            Err(GrassmannError::Mismatch(self.n, o.n))
        }
    }

    pub fn try_add(&self, o: &GrassmannElement) -> Result<Self, GrassmannError> {
        self.same(o)?;
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        Ok(r)
    }

    pub fn scale(&self, k: &Scalar) -> Self {
        let mut r = GrassmannElement::zero(self.n);
        for (m, c) in &self.terms {
            r.add_term(*m, c * k);
        }
        r
    }

    /// Supercommutative product with the sorting sign.
    pub fn gmul(&self, o: &GrassmannElement) -> Result<Self, GrassmannError> {
        self.same(o)?;
        let mut r = GrassmannElement::zero(self.n);
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                match monomial_sign(*i, *j) {
                    0 => {}
                    s => {
                        let c = a * b;
                        r.add_term(i | j, if s > 0 { c } else { -c });
                    }
                }
            }
        }
        Ok(r)
    }

    /// Inverse via body⁻¹·Σ_k (−nilpotent·body⁻¹)^k.
    pub fn ginv(&self) -> Result<Self, GrassmannError> {
        let b = self.body().inv().ok_or(GrassmannError::NotInvertible)?;
        let x = self.nilpotent().scale(&-&b);
        let mut term = GrassmannElement::one(self.n);
        let mut sum = GrassmannElement::one(self.n);
        for _ in 0..self.n {
            term = &term * &x;
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        Ok(sum.scale(&b))
    }

    pub fn is_invertible(&self) -> bool {
        !self.body().is_zero()
    }

    pub fn powi(&self, k: i64) -> Result<Self, GrassmannError> {
        let base = if k < 0 { self.ginv()? } else { self.clone() };
        let mut acc = GrassmannElement::one(self.n);
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Parses text such as `2 + 3*h1*h2 - i*h3` with generators h1..hN.
    pub fn parse(text: &str, n: u8) -> Result<Self, GrassmannError> {
        if n > MAX_GENERATORS {
            return Err(GrassmannError::TooManyGenerators(n));
        }
        from_ast(&parse_ast(text, false)?, n)
    }

    /// Monomial/coefficient pairs, e.g. `[[[1,2], "3"]]` for 3·η₁η₂.
    pub fn to_pairs(&self) -> Vec<(Vec<usize>, String)> {
        self.terms
            .iter()
            .map(|(m, c)| (mask_indices(*m), c.to_string()))
            .collect()
    }

    pub fn from_pairs(n: u8, pairs: &[(Vec<usize>, String)]) -> Result<Self, GrassmannError> {
        let mut x = GrassmannElement::try_zero(n)?;
        for (idx, c) in pairs {
            let mut mono = GrassmannElement::one(n);
            for &k in idx {
                mono = mono.gmul(&GrassmannElement::generator(n, k)?)?;
            }
            x = x.try_add(&mono.scale(&Scalar::parse(c)?))?;
        }
        Ok(x)
    }
}

pub(crate) fn mask_indices(m: u32) -> Vec<usize> {
    (0..32)
        .filter(|b| m >> b & 1 == 1)
        .map(|b| b as usize + 1)
        .collect()
}

fn from_ast(ast: &Ast, n: u8) -> Result<GrassmannElement, GrassmannError> {
    let go = |a: &Ast| from_ast(a, n);
    Ok(match ast {
        Ast::Num(c) => GrassmannElement::scalar(n, c.clone()),
        Ast::Ident(name, pos) => {
            if name == "i" {
                GrassmannElement::scalar(n, Scalar::i())
            } else if let Some(k) = name.strip_prefix('h').and_then(|d| d.parse::<usize>().ok()) {
                GrassmannElement::generator(n, k)?
            } else {
                return Err(SymError::UnknownIdentifier {
                    name: name.clone(),
                    pos: *pos,
                }
                .into());
            }
        }
        Ast::Add(a, b) => go(a)?.try_add(&go(b)?)?,
        Ast::Sub(a, b) => go(a)?.try_add(&-&go(b)?)?,
        Ast::Mul(a, b) => go(a)?.gmul(&go(b)?)?,
        Ast::Div(a, b) => go(a)?.gmul(&go(b)?.ginv()?)?,
        Ast::Neg(a) => -&go(a)?,
        Ast::Pow(a, k) => go(a)?.powi(*k)?,
        Ast::Call(f, _, pos) | Ast::Partial(f, pos) => {
            return Err(SymError::UnknownIdentifier {
                name: f.clone(),
                pos: *pos,
            }
            .into())
        }
    })
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let gens: Vec<String> = mask_indices(*m).iter().map(|i| format!("h{i}")).collect();
            let negative = c.is_real() && c.re < Default::default();
            let mag = if negative { -c } else { c.clone() };
            if k > 0 {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            } else if negative {
                write!(f, "-")?;
            }
            match (gens.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", gens.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", gens.join("*"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ{}[{self}]", self.n)
    }
}

// Operator forms panic on mismatched algebras; the `try_`/`gmul` forms report it.
impl<'a> Add<&'a GrassmannElement> for &'a GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, o: &GrassmannElement) -> GrassmannElement {
        self.try_add(o).expect("same algebra")
    }
}

impl<'a> Sub<&'a GrassmannElement> for &'a GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, o: &GrassmannElement) -> GrassmannElement {
        self.try_add(&-o).expect("same algebra")
    }
}

impl<'a> Mul<&'a GrassmannElement> for &'a GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, o: &GrassmannElement) -> GrassmannElement {
        self.gmul(o).expect("same algebra")
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(&Scalar::int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: u8, k: usize) -> GrassmannElement {
        GrassmannElement::generator(n, k).unwrap()
    }

    #[test]
    fn anticommutation() {
        let (a, b) = (h(2, 1), h(2, 2));
        let ab = &a * &b;
        assert_eq!(ab, GrassmannElement::from_terms(2, [(0b11, Scalar::one())]));
        assert_eq!(&b * &a, -&ab);
        assert!((&a * &a).is_zero());
    }

    #[test]
    fn nilpotent_cancellation() {
        let x = GrassmannElement::parse("1 + h1*h2", 2).unwrap();
        let y = GrassmannElement::parse("1 - h1*h2", 2).unwrap();
        assert_eq!(&x * &y, GrassmannElement::one(2));
    }

    #[test]
    fn inverses() {
        assert_eq!(
            GrassmannElement::one(3).ginv().unwrap(),
            GrassmannElement::one(3)
        );
        let x = GrassmannElement::parse("2 + h1*h2", 2).unwrap();
        let inv = x.ginv().unwrap();
        assert_eq!(inv, GrassmannElement::parse("1/2 - h1*h2/4", 2).unwrap());
        assert_eq!(&x * &inv, GrassmannElement::one(2));
        assert_eq!(h(2, 1).ginv(), Err(GrassmannError::NotInvertible));
    }

    #[test]
    fn sign_counts_inversions() {
        // η₃·η₁η₂ = η₁η₂η₃ (two transpositions)
        assert_eq!(monomial_sign(0b100, 0b011), 1);
        // η₂η₃·η₁ = η₁η₂η₃ (two transpositions)
        assert_eq!(monomial_sign(0b110, 0b001), 1);
        // η₂·η₁ = −η₁η₂
        assert_eq!(monomial_sign(0b10, 0b01), -1);
        assert_eq!(monomial_sign(0b11, 0b01), 0);
    }

    #[test]
    fn text_round_trip() {
        let x = GrassmannElement::parse("2 + 3*h1*h2 - i*h3", 3).unwrap();
        assert_eq!(GrassmannElement::parse(&x.to_string(), 3).unwrap(), x);
        assert_eq!(GrassmannElement::from_pairs(3, &x.to_pairs()).unwrap(), x);
        assert!(x.parity().is_none());
        assert!(GrassmannElement::parse("h4", 3).is_err());
        assert!(GrassmannElement::try_zero(9).is_err());
    }

    #[test]
    fn mismatched_algebras() {
        assert_eq!(h(2, 1).gmul(&h(3, 1)), Err(GrassmannError::Mismatch(2, 3)));
    }
}
