//! Antiderivatives for sums of `c·v^n·exp(a·v + b)`.
//!
//! Supported: Laurent polynomials in `v` (with `1/v ↦ log v` only when logs
//! are allowed), and polynomial-times-exponential terms whose exponent is
//! linear in `v`. Coefficients may involve other symbols that do not mention `v`.

use std::collections::BTreeMap;

use super::expr::Expr;
use super::poly::{to_ratfunc, Atom, Monomial, Poly, RatFunc};
use super::scalar::Scalar;

/// Splits `m` into (power of v, remaining monomial without the exp factor).
fn split_power(m: &Monomial, v: &str) -> Option<(i64, Monomial)> {
    let mut rest = m.clone();
    rest.exp = None;
    let k = rest.powers.remove(&Atom::Var(v.to_string())).unwrap_or(0) as i64;
    (!rest.powers.keys().any(|a| mentions_atom(a, v))).then_some((k, rest))
}

fn mentions_atom(a: &Atom, v: &str) -> bool {
    let mut p = Poly::zero();
    p.terms.insert(
        Monomial {
            powers: [(a.clone(), 1)].into_iter().collect(),
            exp: None,
        },
        Scalar::one(),
    );
    p.mentions(v)
}

/// Writes `e = α·v + β` with α, β free of `v`.
fn linear_in(e: &RatFunc, v: &str) -> Option<(Expr, Expr)> {
    let ex = e.to_expr();
    let alpha = to_ratfunc(&ex.diff(v)).ok()?;
    if alpha.mentions(v) {
        return None;
    }
    let beta = e.sub(&alpha.mul(&to_ratfunc(&Expr::var(v)).ok()?));
    if beta.mentions(v) {
        return None;
    }
    Some((alpha.to_expr(), beta.to_expr()))
}

/// ∫ v^n e^{αv} dv for n ≥ 0, as (Σ_j (−1)^j n!/(n−j)! v^{n−j}/α^{j+1})·e^{αv}.
fn poly_exp_integral(n: i64, alpha: &Expr, v: &Expr) -> Expr {
    let mut sum = Expr::zero();
    let mut falling = 1i64;
    for j in 0..=n {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        sum = sum + Expr::int(sign * falling) * v.clone().pow(n - j) / alpha.clone().pow(j + 1);
        falling *= n - j;
    }
    sum
}

/// Returns `F` with `dF/dv = e` when `e` is in the supported class.
pub fn antiderivative(e: &Expr, v: &str, allow_log: bool) -> Option<Expr> {
    let r = to_ratfunc(e).ok()?;
    // Denominator must be v^k times something free of v.
    let (dk, dcoef) = match r.den.terms.len() {
        1 => {
            let (m, c) = r.den.terms.iter().next().unwrap();
            if m.exp.is_some() {
                return None;
            }
            let (k, rest) = split_power(m, v)?;
            let mut p = Poly::zero();
            p.terms.insert(rest, c.clone());
            (k, p.to_expr())
        }
        _ => {
            if r.den.mentions(v) {
                return None;
            }
            (0, r.den.to_expr())
        }
    };
    let var = Expr::var(v);
    // Group numerator terms by exponential factor.
    let mut groups: BTreeMap<Option<RatFunc>, Vec<(i64, Expr)>> = BTreeMap::new();
    for (m, c) in &r.num.terms {
        let (k, rest) = split_power(m, v)?;
        let mut p = Poly::zero();
        p.terms.insert(rest, c.clone());
        groups
            .entry(m.exp.as_deref().cloned())
            .or_default()
            .push((k - dk, p.to_expr()));
    }
    let mut total = Expr::zero();
    for (exp, terms) in groups {
        match exp {
            None => {
                for (n, c) in terms {
                    total = total
                        + if n == -1 {
                            if !allow_log {
                                return None;
                            }
                            c * var.clone().log()
                        } else {
                            c * var.clone().pow(n + 1) / Expr::int(n + 1)
                        };
                }
            }
            Some(ex) => {
                let (alpha, beta) = linear_in(&ex, v)?;
                if alpha.is_const_zero() {
                    return None;
                }
                let mut inner = Expr::zero();
                for (n, c) in terms {
                    if n < 0 {
                        return None;
                    }
                    inner = inner + c * poly_exp_integral(n, &alpha, &var);
                }
                let e_factor = (alpha * var.clone()).exp() * beta.exp();
                total = total + inner * e_factor;
            }
        }
    }
    let result = total / dcoef;
    Some(super::normalize(&result).unwrap_or(result))
}
