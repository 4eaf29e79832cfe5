//! Superfunctions Σ_I f_I(z)·ζ^I on an (m|n) chart, vector fields, 1-forms,
//! chart morphisms stored as pullback data, and their calculus.

mod field;
mod form;
mod morphism;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grassmann::{mask_indices, monomial_sign, Parity};
use crate::symcore::{to_ratfunc, Expr, RatFunc, Scalar, SymError};

pub use field::SuperVectorField;
pub use form::{exterior_d, pair, SuperOneForm};
pub use morphism::{compose, pullback_fn, pullback_form, ChartMorphism};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SuperError {
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("input is not homogeneous")]
    NotHomogeneous,
    #[error("expected parity {0:?}")]
    WrongParity(Parity),
    #[error("reduced part is not invertible")]
    NotInvertible,
    #[error("invalid chart: {0}")]
    BadChart(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// Even and odd coordinate names of a chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChartSpec {
    pub even: Vec<String>,
    pub odd: Vec<String>,
}

impl ChartSpec {
    pub fn new<S: Into<String>>(
        even: impl IntoIterator<Item = S>,
        odd: impl IntoIterator<Item = S>,
    ) -> Result<Self, SuperError> {
        let even: Vec<String> = even.into_iter().map(Into::into).collect();
        let odd: Vec<String> = odd.into_iter().map(Into::into).collect();
        let mut seen = std::collections::BTreeSet::new();
        for n in even.iter().chain(&odd) {
            if !seen.insert(n.clone()) {
                return Err(SuperError::BadChart(format!("repeated name '{n}'")));
            }
        }
        if odd.len() > crate::grassmann::MAX_GENERATORS as usize {
            return Err(SuperError::BadChart("too many odd coordinates".into()));
        }
        Ok(ChartSpec { even, odd })
    }

    /// The standard C^{1|1} chart with coordinates (z, zeta).
    pub fn c11() -> Self {
        ChartSpec::new(["z"], ["zeta"]).expect("valid chart")
    }

    pub fn m(&self) -> usize {
        self.even.len()
    }

    pub fn n(&self) -> usize {
        self.odd.len()
    }

    pub fn even_index(&self, name: &str) -> Option<usize> {
        self.even.iter().position(|n| n == name)
    }

    pub fn odd_index(&self, name: &str) -> Option<usize> {
        self.odd.iter().position(|n| n == name)
    }

    fn check(&self, o: &ChartSpec) -> Result<(), SuperError> {
        if self == o {
            Ok(())
        } else {
            Err(SuperError::ChartMismatch(format!("{self} vs {o}")))
        }
    }
}

impl fmt::Display for ChartSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} | {})", self.even.join(", "), self.odd.join(", "))
    }
}

/// Σ_I f_I·ζ^I with canonical rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SuperFunction {
    chart: ChartSpec,
    terms: BTreeMap<u32, RatFunc>,
}

impl SuperFunction {
    pub fn zero(chart: &ChartSpec) -> Self {
        SuperFunction {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_ratfunc(chart: &ChartSpec, f: RatFunc) -> Self {
        SuperFunction::monomial(chart, 0, f)
    }

    pub fn constant(chart: &ChartSpec, c: Scalar) -> Self {
        SuperFunction::from_ratfunc(chart, RatFunc::constant(c))
    }

    pub fn one(chart: &ChartSpec) -> Self {
        SuperFunction::constant(chart, Scalar::one())
    }

    /// An even function of the even coordinates.
    pub fn even_expr(chart: &ChartSpec, e: &Expr) -> Result<Self, SuperError> {
        Ok(SuperFunction::from_ratfunc(chart, to_ratfunc(e)?))
    }

    pub fn monomial(chart: &ChartSpec, mask: u32, f: RatFunc) -> Self {
        let mut s = SuperFunction::zero(chart);
        s.add_term(mask, f);
        s
    }

    /// Coordinate function by name.
    pub fn coord(chart: &ChartSpec, name: &str) -> Result<Self, SuperError> {
        if chart.even_index(name).is_some() {
            SuperFunction::even_expr(chart, &Expr::var(name))
        } else if let Some(j) = chart.odd_index(name) {
            Ok(SuperFunction::monomial(chart, 1 << j, RatFunc::one()))
        } else {
            Err(SuperError::BadChart(format!("no coordinate '{name}'")))
        }
    }

    /// The odd coordinate ζ_j, 0-based.
    pub fn odd_coord(chart: &ChartSpec, j: usize) -> Self {
        SuperFunction::monomial(chart, 1 << j, RatFunc::one())
    }

    pub fn chart(&self) -> &ChartSpec {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &RatFunc)> {
        self.terms.iter().map(|(m, f)| (*m, f))
    }

    pub fn coeff(&self, mask: u32) -> RatFunc {
        self.terms.get(&mask).cloned().unwrap_or_else(RatFunc::zero)
    }

    /// Coefficient of ζ^∅.
    pub fn body(&self) -> RatFunc {
        self.coeff(0)
    }

    fn add_term(&mut self, m: u32, f: RatFunc) {
        if f.is_zero() {
            return;
        }
        let s = match self.terms.remove(&m) {
            Some(old) => old.add(&f),
            None => f,
        };
        if !s.is_zero() {
            self.terms.insert(m, s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut ps = self.terms.keys().map(|m| Parity::of_len(m.count_ones()));
        match ps.next() {
            None => Some(Parity::Even),
            Some(p) => ps.all(|q| q == p).then_some(p),
        }
    }

    pub fn has_parity(&self, p: Parity) -> bool {
        self.is_zero() || self.parity() == Some(p)
    }

    pub fn add(&self, o: &SuperFunction) -> Result<Self, SuperError> {
        self.chart.check(&o.chart)?;
        let mut r = self.clone();
        for (m, f) in &o.terms {
            r.add_term(*m, f.clone());
        }
        Ok(r)
    }

    pub fn neg(&self) -> Self {
        SuperFunction {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, f)| (*m, f.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &SuperFunction) -> Result<Self, SuperError> {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &RatFunc) -> Self {
        let mut r = SuperFunction::zero(&self.chart);
        for (m, f) in &self.terms {
            r.add_term(*m, f.mul(k));
        }
        r
    }

    pub fn mul(&self, o: &SuperFunction) -> Result<Self, SuperError> {
        self.chart.check(&o.chart)?;
        let mut r = SuperFunction::zero(&self.chart);
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                match monomial_sign(*i, *j) {
                    0 => {}
                    s => {
                        let p = a.mul(b);
                        r.add_term(i | j, if s > 0 { p } else { p.neg() });
                    }
                }
            }
        }
        Ok(r)
    }

    pub fn nilpotent(&self) -> Self {
        let mut r = self.clone();
        r.terms.remove(&0);
        r
    }

    /// Inverse through the nilpotent series; needs a nonzero reduced part.
    pub fn inv(&self) -> Result<Self, SuperError> {
        let b = self.body();
        if b.is_zero() {
            return Err(SuperError::NotInvertible);
        }
        let binv = b.inv()?;
        let x = self.nilpotent().scale(&binv.neg());
        let mut term = SuperFunction::one(&self.chart);
        let mut sum = term.clone();
        for _ in 0..self.chart.n() {
            term = term.mul(&x)?;
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        Ok(sum.scale(&binv))
    }

    pub fn powi(&self, k: i64) -> Result<Self, SuperError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = SuperFunction::one(&self.chart);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// ∂/∂z for the even coordinate (or parameter) `v`.
    pub fn diff_even(&self, v: &str) -> Result<Self, SuperError> {
        let mut r = SuperFunction::zero(&self.chart);
        for (m, f) in &self.terms {
            r.add_term(*m, to_ratfunc(&f.to_expr().diff(v))?);
        }
        Ok(r)
    }

    /// Left derivative ∂/∂ζ_j: removes ζ_j with sign (−1)^{#indices before j}.
    pub fn diff_odd(&self, j: usize) -> Self {
        let bit = 1u32 << j;
        let mut r = SuperFunction::zero(&self.chart);
        for (m, f) in &self.terms {
            if m & bit != 0 {
                let before = (m & (bit - 1)).count_ones();
                let g = if before.is_multiple_of(2) {
                    f.clone()
                } else {
                    f.neg()
                };
                r.add_term(m & !bit, g);
            }
        }
        r
    }

    /// Applies an analytic function by Taylor expansion around the reduced part.
    pub fn apply_fn(&self, outer: &dyn Fn(Expr) -> Expr) -> Result<Self, SuperError> {
        const Y: &str = "__taylor_y";
        let b = self.body().to_expr();
        let n = self.nilpotent();
        let mut deriv = outer(Expr::var(Y));
        let mut result = SuperFunction::zero(&self.chart);
        let mut npow = SuperFunction::one(&self.chart);
        let mut fact = Scalar::one();
        for k in 0..=self.chart.n() {
            if k > 0 {
                npow = npow.mul(&n)?;
                if npow.is_zero() {
                    break;
                }
                fact = &fact * &Scalar::int(k as i64);
                deriv = deriv.diff(Y);
            }
            let at_b = to_ratfunc(&deriv.subst(Y, &b))?;
            let c = at_b.mul(&RatFunc::constant(fact.inv().expect("nonzero factorial")));
            result = result.add(&npow.scale(&c))?;
        }
        Ok(result)
    }

    /// Substitutes even variables inside every coefficient (no odd content).
    pub fn map_coeffs(
        &self,
        f: &dyn Fn(&RatFunc) -> Result<RatFunc, SuperError>,
    ) -> Result<Self, SuperError> {
        let mut r = SuperFunction::zero(&self.chart);
        for (m, c) in &self.terms {
            r.add_term(*m, f(c)?);
        }
        Ok(r)
    }

    pub fn with_chart(&self, chart: &ChartSpec) -> Result<Self, SuperError> {
        if chart.n() != self.chart.n() {
            return Err(SuperError::ChartMismatch("odd dimensions differ".into()));
        }
        Ok(SuperFunction {
            chart: chart.clone(),
            terms: self.terms.clone(),
        })
    }

    pub fn parse(text: &str, chart: &ChartSpec) -> Result<Self, SuperError> {
        parse::parse_function(text, chart, &[])
    }

    /// Parses with additional even parameter names (e.g. `a`, `tau`).
    pub fn parse_with(text: &str, chart: &ChartSpec, params: &[&str]) -> Result<Self, SuperError> {
        parse::parse_function(text, chart, params)
    }
}

impl fmt::Display for SuperFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let odd: Vec<&str> = mask_indices(*m)
                    .iter()
                    .map(|i| self.chart.odd[i - 1].as_str())
                    .collect();
                let e = c.to_expr();
                match (odd.is_empty(), e.is_const_one()) {
                    (true, _) => format!("{e}"),
                    (false, true) => odd.join("*"),
                    (false, false) => format!("({e})*{}", odd.join("*")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
