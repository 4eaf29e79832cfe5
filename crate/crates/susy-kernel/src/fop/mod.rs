//! T-points over Λ_N: standard forms of P^{m|n} and Π-line points, gluing,
//! and span stability under Φ and the right θ-action.

use serde::{Deserialize, Serialize};

use crate::grassmann::{
    mask_indices, phi_apply, DNumber, GVec4, GrassmannElement, GrassmannError, Parity,
};
use crate::superfn::ChartMorphism;
use crate::symcore::Expr;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FopError {
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error("rows are rank-deficient")]
    RankDeficient,
    #[error("rows must have parities (even, odd)")]
    RowParity,
    #[error("cannot evaluate {0} on Grassmann points")]
    Unsupported(String),
    #[error("index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}

type GE = GrassmannElement;

fn inv(x: &GE, what: &str) -> Result<GE, FopError> {
    x.ginv()
        .map_err(|_| FopError::NotInvertible(what.to_string()))
}

/// (t₀, …, t_m | θ₁, …, θ_n) with a distinguished invertible slot `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjPointData {
    pub t: Vec<GE>,
    pub theta: Vec<GE>,
    pub i: usize,
}

impl ProjPointData {
    pub fn new(t: Vec<GE>, theta: Vec<GE>, i: usize) -> Result<Self, FopError> {
        if i >= t.len() {
            return Err(FopError::BadIndex(i));
        }
        for x in &t {
            x.check_parity(Parity::Even)?;
        }
        for x in &theta {
            x.check_parity(Parity::Odd)?;
        }
        Ok(ProjPointData { t, theta, i })
    }

    /// λ·(t | θ) for an even unit λ.
    pub fn rescale(&self, lambda: &GE) -> Result<Self, FopError> {
        let m = |v: &[GE]| {
            v.iter()
                .map(|x| lambda.gmul(x))
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(ProjPointData {
            t: m(&self.t)?,
            theta: m(&self.theta)?,
            i: self.i,
        })
    }
}

/// Affine coordinates on U_i: (t_k/t_i for k ≠ i, θ_l/t_i).
pub type AffineCoords = (Vec<GE>, Vec<GE>);

pub fn proj_standard_form(p: &ProjPointData) -> Result<AffineCoords, FopError> {
    let ti = inv(&p.t[p.i], &format!("t{}", p.i))?;
    let even =
        p.t.iter()
            .enumerate()
            .filter(|(k, _)| *k != p.i)
            .map(|(_, x)| x.gmul(&ti))
            .collect::<Result<_, _>>()?;
    let odd = p
        .theta
        .iter()
        .map(|x| x.gmul(&ti))
        .collect::<Result<_, _>>()?;
    Ok((even, odd))
}

/// Inserts 1 at slot i.
pub fn affine_to_proj(i: usize, c: &AffineCoords) -> Result<ProjPointData, FopError> {
    let (even, odd) = c;
    if i > even.len() {
        return Err(FopError::BadIndex(i));
    }
    let n = even.first().or(odd.first()).map_or(0, GE::n);
    let mut t = even.clone();
    t.insert(i, GE::one(n));
    ProjPointData::new(t, odd.clone(), i)
}

/// Evaluates a rational expression with Grassmann values for its variables.
pub fn eval_grassmann(e: &Expr, n: u8, env: &dyn Fn(&str) -> Option<GE>) -> Result<GE, FopError> {
    let go = |x: &Expr| eval_grassmann(x, n, env);
    Ok(match e {
        Expr::Const(c) => GE::scalar(n, c.clone()),
        Expr::Var(v) => {
            env(v).ok_or_else(|| FopError::Unsupported(format!("free variable {v}")))?
        }
        Expr::Add(xs) => {
            let mut acc = GE::zero(n);
            for x in xs {
                acc = acc.try_add(&go(x)?)?;
            }
            acc
        }
        Expr::Mul(xs) => {
            let mut acc = GE::one(n);
            for x in xs {
                acc = acc.gmul(&go(x)?)?;
            }
            acc
        }
        Expr::Pow(b, k) => go(b)?.powi(*k)?,
        Expr::Div(a, b) => go(a)?.gmul(&inv(&go(b)?, &b.to_string())?)?,
        other => return Err(FopError::Unsupported(other.to_string())),
    })
}

/// Applies a chart morphism to a Λ_N-point given by values of its source coordinates.
pub fn apply_morphism_points(
    m: &ChartMorphism,
    even: &[GE],
    odd: &[GE],
) -> Result<AffineCoords, FopError> {
    let n = even.first().or(odd.first()).map_or(0, GE::n);
    let env = |v: &str| m.source.even_index(v).map(|k| even[k].clone());
    let eval_sf = |f: &crate::superfn::SuperFunction| -> Result<GE, FopError> {
        let mut acc = GE::zero(n);
        for (mask, c) in f.terms() {
            let mut t = eval_grassmann(&c.to_expr(), n, &env)?;
            for j in mask_indices(mask) {
                t = t.gmul(&odd[j - 1])?;
            }
            acc = acc.try_add(&t)?;
        }
        Ok(acc)
    };
    let e = m.even.iter().map(eval_sf).collect::<Result<_, _>>()?;
    let o = m.odd.iter().map(eval_sf).collect::<Result<_, _>>()?;
    Ok((e, o))
}

/// (s₀, σ₀, s₁, σ₁): rows e = (s₀, σ₀, s₁, σ₁) and E = (σ₀, s₀, σ₁, s₁).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiPointData {
    pub s0: GE,
    pub sigma0: GE,
    pub s1: GE,
    pub sigma1: GE,
}

impl PiPointData {
    pub fn new(s0: GE, sigma0: GE, s1: GE, sigma1: GE) -> Result<Self, FopError> {
        s0.check_parity(Parity::Even)?;
        s1.check_parity(Parity::Even)?;
        sigma0.check_parity(Parity::Odd)?;
        sigma1.check_parity(Parity::Odd)?;
        Ok(PiPointData {
            s0,
            sigma0,
            s1,
            sigma1,
        })
    }

    /// Right multiplication of (e, E) by d_to_gl11(x) = [[a, α], [α, a]]:
    /// s ↦ s·a + σ·α and σ ↦ σ·a + s·α.
    pub fn right_mul(&self, x: &DNumber) -> Result<Self, FopError> {
        let even = |s: &GE, sg: &GE| -> Result<GE, GrassmannError> {
            s.gmul(&x.a)?.try_add(&sg.gmul(&x.alpha)?)
        };
        let odd = |s: &GE, sg: &GE| -> Result<GE, GrassmannError> {
            sg.gmul(&x.a)?.try_add(&s.gmul(&x.alpha)?)
        };
        Ok(PiPointData {
            s0: even(&self.s0, &self.sigma0)?,
            sigma0: odd(&self.s0, &self.sigma0)?,
            s1: even(&self.s1, &self.sigma1)?,
            sigma1: odd(&self.s1, &self.sigma1)?,
        })
    }

    /// g₀ = [[s₀⁻¹, −σ₀s₀⁻²], [−σ₀s₀⁻², s₀⁻¹]] as a D-number.
    pub fn g0(&self) -> Result<DNumber, FopError> {
        let si = inv(&self.s0, "s0")?;
        let alpha = -&self.sigma0.gmul(&si.gmul(&si)?)?;
        Ok(DNumber::new(si, alpha)?)
    }

    /// Rows in the (e₀, e₁, E₀, E₁) basis.
    pub fn rows(&self) -> [GVec4; 2] {
        let e = [
            self.s0.clone(),
            self.s1.clone(),
            self.sigma0.clone(),
            self.sigma1.clone(),
        ];
        let big_e = phi_apply(&e);
        [e, big_e]
    }
}

/// Chart 0: v₀ = s₁s₀⁻¹ − σ₁σ₀s₀⁻², ν₀ = σ₁s₀⁻¹ − s₁σ₀s₀⁻²; chart 1 symmetric.
pub fn pi_standard_form(p: &PiPointData, chart: usize) -> Result<(GE, GE), FopError> {
    let (s_a, sg_a, s_b, sg_b) = match chart {
        0 => (&p.s0, &p.sigma0, &p.s1, &p.sigma1),
        1 => (&p.s1, &p.sigma1, &p.s0, &p.sigma0),
        k => return Err(FopError::BadIndex(k)),
    };
    let si = inv(s_a, if chart == 0 { "s0" } else { "s1" })?;
    let si2 = si.gmul(&si)?;
    let v = &s_b.gmul(&si)? - &sg_b.gmul(sg_a)?.gmul(&si2)?;
    let nu = &sg_b.gmul(&si)? - &s_b.gmul(sg_a)?.gmul(&si2)?;
    Ok((v, nu))
}

/// The chart-1 form of (1, 0, v₀, ν₀) against the Π-line transition applied to (v₀, ν₀).
pub fn pi_gluing_check(v0: &GE, nu0: &GE) -> Result<bool, FopError> {
    inv(v0, "v0")?;
    let n = v0.n();
    let p = PiPointData::new(GE::one(n), GE::zero(n), v0.clone(), nu0.clone())?;
    let chart1 = pi_standard_form(&p, 1)?;
    let psi = crate::atlas::build_pi_line_atlas()
        .transition(0, 1)
        .expect("Π-line transition");
    let (e, o) = apply_morphism_points(&psi, std::slice::from_ref(v0), std::slice::from_ref(nu0))?;
    Ok(chart1 == (e[0].clone(), o[0].clone()))
}

/// Row-reduces two rows by unit pivots; returns reduced rows and pivot columns.
fn reduce_rows(rows: &[GVec4; 2]) -> Result<([GVec4; 2], [usize; 2]), FopError> {
    let pivot = |r: &GVec4, skip: Option<usize>| {
        r.iter()
            .enumerate()
            .position(|(k, x)| Some(k) != skip && x.is_invertible())
    };
    let scale = |c: &GE, r: &GVec4| -> Result<GVec4, FopError> {
        let v: Vec<GE> = r.iter().map(|x| c.gmul(x)).collect::<Result<_, _>>()?;
        Ok(v.try_into().expect("four entries"))
    };
    let sub = |a: &GVec4, b: &GVec4| -> GVec4 {
        [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2], &a[3] - &b[3]]
    };
    let p1 = pivot(&rows[0], None).ok_or(FopError::RankDeficient)?;
    let r1 = scale(&inv(&rows[0][p1], "pivot")?, &rows[0])?;
    let r2 = sub(&rows[1], &scale(&rows[1][p1], &r1)?);
    let p2 = pivot(&r2, Some(p1)).ok_or(FopError::RankDeficient)?;
    let r2 = scale(&inv(&r2[p2], "pivot")?, &r2)?;
    let r1 = sub(&r1, &scale(&r1[p2], &r2)?);
    Ok(([r1, r2], [p1, p2]))
}

fn in_span(reduced: &([GVec4; 2], [usize; 2]), w: &GVec4) -> Result<bool, FopError> {
    let ([r1, r2], [p1, p2]) = reduced;
    let (c1, c2) = (&w[*p1], &w[*p2]);
    for k in 0..4 {
        let comb = c1.gmul(&r1[k])?.try_add(&c2.gmul(&r2[k])?)?;
        if comb != w[k] {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_rows(rows: &[GVec4; 2]) -> Result<(), FopError> {
    // Slot-wise, so rows with zero entries still read as (even, odd).
    let fits = |r: &GVec4, p: Parity| {
        r[0].has_parity(p)
            && r[1].has_parity(p)
            && r[2].has_parity(p.flip())
            && r[3].has_parity(p.flip())
    };
    if fits(&rows[0], Parity::Even) && fits(&rows[1], Parity::Odd) {
        Ok(())
    } else {
        Err(FopError::RowParity)
    }
}

/// Φ(row) ∈ span(rows) for both rows.
pub fn phi_invariance_check(rows: &[GVec4; 2]) -> Result<bool, FopError> {
    check_rows(rows)?;
    let red = reduce_rows(rows)?;
    Ok(in_span(&red, &phi_apply(&rows[0]))? && in_span(&red, &phi_apply(&rows[1]))?)
}

/// row·θ ∈ span(rows) for both rows: the span is a right D-submodule.
pub fn right_theta_stable(rows: &[GVec4; 2]) -> Result<bool, FopError> {
    check_rows(rows)?;
    let red = reduce_rows(rows)?;
    // v·θ = (−1)^{|v|}Φ(v), with the parity fixed by the row slot.
    let even = phi_apply(&rows[0]);
    let odd = phi_apply(&rows[1]).map(|x| -&x);
    Ok(in_span(&red, &even)? && in_span(&red, &odd)?)
}

/// Λ_N element as monomial/coefficient pairs, for fixtures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub n: u8,
    pub terms: Vec<(Vec<usize>, String)>,
}

impl ElementDoc {
    pub fn of(x: &GE) -> Self {
        ElementDoc {
            n: x.n(),
            terms: x.to_pairs(),
        }
    }

    pub fn to_element(&self) -> Result<GE, FopError> {
        Ok(GE::from_pairs(self.n, &self.terms)?)
    }
}
