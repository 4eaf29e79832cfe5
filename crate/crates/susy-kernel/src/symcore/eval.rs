//! Floating-point evaluation and numeric zero probing.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::Expr;
use super::poly::{atoms_of, to_ratfunc, Atom};
use super::SymError;

/// Smallest denominator magnitude accepted before a pole is reported.
pub const POLE_EPS: f64 = 1e-300;

/// Numeric implementations for opaque symbols.
pub trait OpaqueHooks: Sync {
    /// `None` when `name` is not hooked.
    fn call(&self, name: &str, arg: Complex64) -> Option<Result<Complex64, SymError>>;
}

pub struct NoHooks;

impl OpaqueHooks for NoHooks {
    fn call(&self, _: &str, _: Complex64) -> Option<Result<Complex64, SymError>> {
        None
    }
}

pub type Env = BTreeMap<String, Complex64>;

pub fn eval(e: &Expr, env: &Env, hooks: &dyn OpaqueHooks) -> Result<Complex64, SymError> {
    let ev = |x: &Expr| eval(x, env, hooks);
    Ok(match e {
        Expr::Const(c) => c.to_c64(),
        Expr::Var(n) => *env
            .get(&**n)
            .ok_or_else(|| SymError::UnboundVariable(n.to_string()))?,
        Expr::Add(xs) => xs.iter().map(ev).sum::<Result<Complex64, _>>()?,
        Expr::Mul(xs) => xs.iter().map(ev).product::<Result<Complex64, _>>()?,
        Expr::Pow(b, n) => {
            let b = ev(b)?;
            if *n < 0 && b.norm() < POLE_EPS {
                return Err(SymError::Pole);
            }
            b.powi(*n as i32)
        }
        Expr::Div(a, b) => {
            let d = ev(b)?;
            if d.norm() < POLE_EPS {
                return Err(SymError::Pole);
            }
            ev(a)? / d
        }
        Expr::Exp(a) => ev(a)?.exp(),
        Expr::Log(a) => {
            let x = ev(a)?;
            if x.norm() < POLE_EPS {
                return Err(SymError::Pole);
            }
            x.ln()
        }
        Expr::Sqrt(a) => ev(a)?.sqrt(),
        Expr::Opaque(n, a) => {
            let x = ev(a)?;
            hooks
                .call(n, x)
                .ok_or_else(|| SymError::UnhookedOpaque(n.to_string()))??
        }
    })
}

/// Outcome of a zero test.
#[derive(Clone, Debug, PartialEq)]
pub enum ZeroTest {
    Yes,
    /// Nonzero; `witness` is a point where the value is visibly nonzero, when one was found.
    No {
        witness: Option<Env>,
    },
    Unknown,
}

impl ZeroTest {
    pub fn is_yes(&self) -> bool {
        matches!(self, ZeroTest::Yes)
    }
}

const PROBES: usize = 16;

/// Sample points: all-ones first, then seeded points in the annulus 1/2 ≤ |x| ≤ 2.
fn probe_points(vars: &[String]) -> Vec<Env> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut pts = vec![vars
        .iter()
        .map(|v| (v.clone(), Complex64::new(1.0, 0.0)))
        .collect()];
    for _ in 1..PROBES {
        pts.push(
            vars.iter()
                .map(|v| {
                    let r = rng.random_range(0.5..2.0);
                    let t = rng.random_range(0.0..std::f64::consts::TAU);
                    (v.clone(), Complex64::from_polar(r, t))
                })
                .collect(),
        );
    }
    pts
}

/// Evaluates the numerator of the normal form with a cancellation-aware threshold.
fn nonzero_at(num_terms: &[Expr], env: &Env, hooks: &dyn OpaqueHooks) -> Option<bool> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for t in num_terms {
        let v = eval(t, env, hooks).ok()?;
        if !v.is_finite() {
            return None;
        }
        total += v;
        scale += v.norm();
    }
    Some(total.norm() > 1e-9 * scale.max(f64::MIN_POSITIVE))
}

/// Tri-state zero test. Exact inside the rational and exponential-rational
/// fragments; elsewhere numeric probing with `hooks` can only refute.
pub fn is_zero_with(e: &Expr, hooks: &dyn OpaqueHooks) -> ZeroTest {
    let r = match to_ratfunc(e) {
        Ok(r) => r,
        Err(_) => return ZeroTest::Unknown,
    };
    if r.is_zero() {
        return ZeroTest::Yes;
    }
    let mut vars = std::collections::BTreeSet::new();
    e.vars(&mut vars);
    let vars: Vec<String> = vars.into_iter().collect();
    let terms: Vec<Expr> = r
        .num_terms()
        .map(|(m, c)| {
            let mut p = super::poly::Poly::zero();
            p.terms.insert(m.clone(), c.clone());
            p.to_expr()
        })
        .collect();
    let witness = probe_points(&vars)
        .into_iter()
        .find(|env| nonzero_at(&terms, env, hooks) == Some(true));
    let exact = r.is_exp_rational() && atoms_of(&r).iter().all(|a| matches!(a, Atom::Var(_)));
    match (exact, witness) {
        (true, w) => ZeroTest::No { witness: w },
        (false, Some(w)) => ZeroTest::No { witness: Some(w) },
        (false, None) => ZeroTest::Unknown,
    }
}

pub fn is_zero(e: &Expr) -> ZeroTest {
    is_zero_with(e, &NoHooks)
}
