//! SUSY-1 structures on 1|1 charts: the frame condition, canonical
//! coordinates, the form ω = dz − ζdζ, automorphisms of C^{1|1}, the genus-1
//! lattice action, and structures glued over atlases.

mod modular;
mod structure;

use serde::Serialize;

use crate::grassmann::Parity;
use crate::superfn::{
    pullback_form, ChartMorphism, ChartSpec, SuperError, SuperFunction, SuperOneForm,
    SuperVectorField,
};
use crate::symcore::poly::Atom;
use crate::symcore::{antiderivative, to_ratfunc, Expr, RatFunc, Scalar, SymError};

pub use modular::{apply_mobius, reduce_to_fundamental_domain, Mobius, Tau};
pub use structure::{transport_field, OverlapUnit, StructureReport, SusyStructure};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SusyError {
    #[error("expected an odd vector field")]
    NotOdd,
    #[error("expected a 1|1 chart")]
    NotC11,
    #[error("{0} is not a unit")]
    NotUnit(String),
    #[error("no closed-form antiderivative of {0}")]
    NoAntiderivative(String),
    #[error("Im(tau) must be positive and finite")]
    BadTau,
    #[error("integer overflow in the modular matrix")]
    Overflow,
    #[error(transparent)]
    Super(#[from] SuperError),
    #[error(transparent)]
    Atlas(#[from] crate::atlas::AtlasError),
}

impl From<SymError> for SusyError {
    fn from(e: SymError) -> Self {
        SusyError::Super(e.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn scalar(self) -> Scalar {
        match self {
            Sign::Plus => Scalar::one(),
            Sign::Minus => Scalar::int(-1),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

fn c11_check(c: &ChartSpec) -> Result<(), SusyError> {
    if c.m() == 1 && c.n() == 1 {
        Ok(())
    } else {
        Err(SusyError::NotC11)
    }
}

/// `None` when `r` is c·∏vᵏ·exp(E): nowhere zero once the coordinates are
/// invertible. Otherwise the offending factor, for reporting.
pub fn unit_witness(r: &RatFunc) -> Option<String> {
    if r.is_zero() {
        return Some("0".into());
    }
    let bad = |p: &crate::symcore::poly::Poly| {
        p.terms.len() != 1
            || p.terms
                .keys()
                .any(|m| m.powers.keys().any(|a| !matches!(a, Atom::Var(_))))
    };
    if bad(&r.num) {
        Some(r.num.to_expr().to_string())
    } else if bad(&r.den) {
        Some(format!("1/({})", r.den.to_expr()))
    } else {
        None
    }
}

/// Result of the frame test for D = f∂_ζ + gζ∂_z.
#[derive(Clone, Debug)]
pub struct SusyCheck {
    pub is_susy: bool,
    pub f: RatFunc,
    pub g: RatFunc,
    /// D² = [D, D]/2.
    pub d_squared: SuperVectorField,
    /// The failing factor when D, D² is not a frame.
    pub witness: Option<String>,
}

fn split_field(d: &SuperVectorField) -> Result<(RatFunc, RatFunc), SusyError> {
    c11_check(&d.chart)?;
    if d.parity() != Some(Parity::Odd) || d.is_zero() {
        return Err(SusyError::NotOdd);
    }
    Ok((d.dzeta[0].body(), d.dz[0].coeff(1)))
}

/// D, D² frame the tangent sheaf iff f·g is a unit.
pub fn is_susy(d: &SuperVectorField) -> Result<SusyCheck, SusyError> {
    let (f, g) = split_field(d)?;
    let half = SuperFunction::constant(&d.chart, Scalar::frac(1, 2));
    let d_squared = d.bracket(d)?.left_mul(&half)?;
    let witness = unit_witness(&f.mul(&g));
    Ok(SusyCheck {
        is_susy: witness.is_none(),
        f,
        g,
        d_squared,
        witness,
    })
}

/// ω = dz − ζdζ on the given 1|1 chart.
pub fn omega_on(c: &ChartSpec) -> Result<SuperOneForm, SusyError> {
    c11_check(c)?;
    let z = &c.even[0];
    let zeta = &c.odd[0];
    Ok(SuperOneForm::parse(&format!("d{z} - {zeta}*d{zeta}"), c)?)
}

pub fn susy_omega() -> SuperOneForm {
    omega_on(&ChartSpec::c11()).expect("standard chart")
}

/// w as a closed form or, outside the antiderivative class, as ∫ integrand.
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Symbolic(Expr),
    Quadrature { integrand: Expr },
}

#[derive(Clone, Debug)]
pub struct CanonicalCoordinates {
    pub h: Expr,
    pub w: Primitive,
    /// (z, ζ) ↦ (w, η) as pullbacks onto the source chart; symbolic case only.
    pub map: Option<ChartMorphism>,
    /// D(w) − η and D(η) − 1 on the source chart; both zero means D = ∂_η + η∂_w.
    pub residuals: [SuperFunction; 2],
    pub global: bool,
    pub note: Option<String>,
}

impl CanonicalCoordinates {
    pub fn exact(&self) -> bool {
        self.residuals.iter().all(SuperFunction::is_zero)
    }
}

/// Solves fh = 1, gw′ = h, η = hζ, and certifies the transformed field.
pub fn canonical_coordinates(d: &SuperVectorField) -> Result<CanonicalCoordinates, SusyError> {
    let check = is_susy(d)?;
    if let Some(w) = check.witness {
        return Err(SusyError::NotUnit(w));
    }
    let c = &d.chart;
    let z = c.even[0].clone();
    let h = check.f.inv()?;
    let w_prime = h.div(&check.g)?;
    let eta = SuperFunction::monomial(c, 1, h.clone());
    let (w, d_w) = match antiderivative(&w_prime.to_expr(), &z, true) {
        Some(w) => {
            let wf = SuperFunction::even_expr(c, &w)?;
            (Primitive::Symbolic(w), d.apply(&wf)?)
        }
        None => {
            // D(w) = gζ·w′ needs only the integrand.
            let g_zeta = d.dz[0].clone();
            let dw = g_zeta.scale(&w_prime);
            (
                Primitive::Quadrature {
                    integrand: w_prime.to_expr(),
                },
                dw,
            )
        }
    };
    let residuals = [d_w.sub(&eta)?, d.apply(&eta)?.sub(&SuperFunction::one(c))?];
    let global = w_prime.as_constant().is_some_and(|k| !k.is_zero());
    let map = match &w {
        Primitive::Symbolic(w) => {
            let target = ChartSpec::new(["w"], ["eta"])?;
            Some(ChartMorphism::new(
                c,
                &target,
                vec![SuperFunction::even_expr(c, w)?],
                vec![eta],
            )?)
        }
        Primitive::Quadrature { .. } => None,
    };
    let note = (!global).then(|| "local only - not globally injective".to_string());
    Ok(CanonicalCoordinates {
        h: h.to_expr(),
        w,
        map,
        residuals,
        global,
        note,
    })
}

/// (f(z), g(z)ζ) on the standard chart.
pub fn candidate(f: &str, g: &str, params: &[&str]) -> Result<ChartMorphism, SusyError> {
    let c = ChartSpec::c11();
    Ok(ChartMorphism::parse(
        &c,
        &c,
        &[f],
        &[&format!("({g})*zeta")],
        params,
    )?)
}

#[derive(Clone, Debug)]
pub struct AutomorphismCheck {
    /// t with F*(ω) = tω, when it exists.
    pub t: Option<RatFunc>,
    pub f_prime: RatFunc,
    pub g_squared: RatFunc,
    pub pulled_back: SuperOneForm,
}

/// F*(ω) = tω with t = f′ = g².
pub fn is_susy_automorphism(m: &ChartMorphism) -> Result<AutomorphismCheck, SusyError> {
    c11_check(&m.source)?;
    c11_check(&m.target)?;
    let z = &m.source.even[0];
    let f = &m.even[0];
    let g = m.odd[0].coeff(1);
    let f_prime = f.diff_even(z)?.body();
    let g_squared = g.mul(&g);
    let pulled_back = pullback_form(m, &omega_on(&m.target)?)?;
    let t = pulled_back.dz[0].body();
    let proportional = pulled_back
        .sub(&omega_on(&m.source)?.left_mul(&SuperFunction::from_ratfunc(&m.source, t.clone()))?)?
        .is_zero();
    // The form law and the coefficient identity are computed independently.
    debug_assert_eq!(proportional, f_prime == g_squared);
    let ok = proportional && f_prime == g_squared && t == f_prime;
    Ok(AutomorphismCheck {
        t: ok.then_some(t),
        f_prime,
        g_squared,
        pulled_back,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub a: Scalar,
    pub b: Scalar,
    pub sign: Sign,
}

/// Coefficients (c₀, c₁, …) when `r` is a polynomial in `v` with constant coefficients.
pub fn polynomial_coeffs(r: &RatFunc, v: &str) -> Option<Vec<Scalar>> {
    if !r.den.as_constant()?.is_one() {
        return None;
    }
    let mut out: Vec<Scalar> = Vec::new();
    for (m, c) in &r.num.terms {
        if m.exp.is_some() {
            return None;
        }
        let mut k = 0usize;
        for (a, p) in &m.powers {
            match a {
                Atom::Var(x) if x == v => k = *p as usize,
                _ => return None,
            }
        }
        if out.len() <= k {
            out.resize(k + 1, Scalar::zero());
        }
        out[k] = c.clone();
    }
    Some(out)
}

/// (a, b, ±) for F = (az + b, ±√a ζ); `None` when F is not a SUSY
/// automorphism of C^{1|1}. Bijectivity of f on C is required, so only
/// degree-one polynomial f qualify.
pub fn classify_c11_automorphism(m: &ChartMorphism) -> Result<Option<Classification>, SusyError> {
    if is_susy_automorphism(m)?.t.is_none() {
        return Ok(None);
    }
    let z = &m.source.even[0];
    let Some(cf) = polynomial_coeffs(&m.even[0].body(), z) else {
        return Ok(None);
    };
    if cf.len() != 2 || cf[1].is_zero() {
        return Ok(None);
    }
    let (b, a) = (cf[0].clone(), cf[1].clone());
    let g = m.odd[0].coeff(1);
    let root = to_ratfunc(&Expr::constant(a.clone()).sqrt())?;
    let sign = if g == root {
        Sign::Plus
    } else if g == root.neg() {
        Sign::Minus
    } else {
        return Ok(None);
    };
    Ok(Some(Classification { a, b, sign }))
}

/// A = (z + 1, s_A ζ), B = (z + τ, s_B ζ).
pub fn elliptic_action_generators(
    tau: &Tau,
    sa: Sign,
    sb: Sign,
) -> Result<(ChartMorphism, ChartMorphism), SusyError> {
    let c = ChartSpec::c11();
    let shift = |k: Scalar, s: Sign| -> Result<ChartMorphism, SusyError> {
        let f = SuperFunction::even_expr(&c, &(Expr::var("z") + Expr::constant(k)))?;
        let g = SuperFunction::monomial(&c, 1, RatFunc::constant(s.scalar()));
        Ok(ChartMorphism::new(&c, &c, vec![f], vec![g])?)
    };
    Ok((shift(Scalar::one(), sa)?, shift(tau.exact().clone(), sb)?))
}

/// The four sign pairs (s_A, s_B), one per theta characteristic of the curve.
pub fn theta_sign_choices() -> [(Sign, Sign); 4] {
    use Sign::*;
    [(Plus, Plus), (Plus, Minus), (Minus, Plus), (Minus, Minus)]
}
