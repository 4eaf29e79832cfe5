//! Weierstrass functions for the lattice Z + Zτ, the branch ℘₁ = √(℘ − e₁),
//! the genus-1 embedding and residuals of its ideal equations.
//!
//! ℘ and ℘′ are summed as q-series after moving τ into the fundamental domain,
//! where |q| ≤ e^{−π√3} and a dozen terms reach machine precision. The direct
//! lattice sums in [`oracle`] carry explicit tail bounds and serve as checks.

mod ideal;
pub mod oracle;
mod report;

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::susy::{reduce_to_fundamental_domain, Tau};
use crate::symcore::{Env, OpaqueHooks, Scalar, SymError};

pub use ideal::{
    affine_residuals, fit_alt_cubic, homogeneous_residuals, residual, AltCubicFit, EmbeddingPoint,
    IdealCoefficients,
};
pub use report::{sample_points, verify_suite, Check, EllipticReport, InvariantReport};

type C = Complex64;

/// Evaluation is refused closer than this to a lattice point.
pub const POLE_DISTANCE: f64 = 1e-6;
/// Sample points keep this distance from lattice points and half-periods.
pub const SAMPLE_EXCLUSION: f64 = 0.05;
/// Continuation steps from the base point to the target.
pub const CONTINUATION_STEPS: usize = 64;
/// Relative size of ℘ − e₁ below which ℘₁ is refused.
pub const UNRESOLVED: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EllipticError {
    #[error("tau must be finite with positive imaginary part")]
    BadTau,
    #[error("z = {0} is within {POLE_DISTANCE} of a lattice point")]
    NearPole(C),
    #[error("z = {0} lies outside the sample patch")]
    OutsidePatch(C),
    #[error("branch continuation failed near z = {0}")]
    Continuation(C),
    /// ℘(z) − e₁ cancels below double precision, so its square root is noise.
    #[error("wp(z) - e1 is not resolvable in double precision at z = {0}")]
    Unresolved(C),
}

fn two_pi_i() -> C {
    C::new(0.0, 2.0 * PI)
}

/// Lattice (1, τ) with eagerly computed invariants; immutable and shareable.
#[derive(Clone, Debug)]
pub struct EllipticContext {
    tau: C,
    /// Truncation radius for the oracle lattice sums.
    pub radius: f64,
    /// Target error for verification.
    pub eps: f64,
    reduced: C,
    /// Z + Zτ = μ·(Z + Zτ′) with τ′ reduced.
    mu: C,
    terms: usize,
    e2_reduced: C,
    g2: C,
    g3: C,
    e: [C; 3],
}

impl EllipticContext {
    pub fn new(tau: C) -> Result<Self, EllipticError> {
        Self::with_eps(tau, 1e-8)
    }

    pub fn with_eps(tau: C, eps: f64) -> Result<Self, EllipticError> {
        let exact = Tau::new(tau).map_err(|_| EllipticError::BadTau)?;
        let (red, gamma) =
            reduce_to_fundamental_domain(&exact).map_err(|_| EllipticError::BadTau)?;
        let reduced = red.value();
        let [_, [c, d]] = gamma.0;
        // Exact, since cτ + d cancels badly when Im τ is tiny.
        let mu = (&(&Scalar::int(c) * exact.exact()) + &Scalar::int(d)).to_c64();
        let q = (two_pi_i() * reduced).exp();
        // |q|^{n−1/2} < e^{−42} bounds every dropped term below 1e−18.
        let terms = (42.0 / (2.0 * PI * reduced.im)).ceil() as usize + 2;
        let divisor_sum = |k: i32| -> C {
            let mut acc = C::zero();
            let mut qn = C::one();
            for n in 1..=terms {
                qn *= q;
                acc += qn * (n as f64).powi(k) / (C::one() - qn);
            }
            acc
        };
        let e2_reduced = C::one() - divisor_sum(1) * 24.0;
        let e4 = C::one() + divisor_sum(3) * 240.0;
        let e6 = C::one() - divisor_sum(5) * 504.0;
        let g2 = e4 * (2.0 * PI).powi(4) / 12.0 / mu.powi(4);
        let g3 = e6 * (2.0 * PI).powi(6) / 216.0 / mu.powi(6);
        let mut ctx = EllipticContext {
            tau,
            radius: 64.0,
            eps,
            reduced,
            mu,
            terms,
            e2_reduced,
            g2,
            g3,
            e: [C::zero(); 3],
        };
        let half = ctx.half_periods();
        for (k, w) in half.iter().enumerate() {
            ctx.e[k] = ctx.wp(*w)?;
        }
        Ok(ctx)
    }

    pub fn tau(&self) -> C {
        self.tau
    }

    pub fn g2(&self) -> C {
        self.g2
    }

    pub fn g3(&self) -> C {
        self.g3
    }

    /// (e₁, e₂, e₃) = ℘ at (1/2, τ/2, (1+τ)/2).
    pub fn e(&self) -> [C; 3] {
        self.e
    }

    pub fn half_periods(&self) -> [C; 3] {
        [
            C::new(0.5, 0.0),
            self.tau / 2.0,
            (C::one() + self.tau) / 2.0,
        ]
    }

    pub fn ideal(&self) -> IdealCoefficients {
        IdealCoefficients {
            g2: self.g2,
            g3: self.g3,
            e: self.e,
        }
    }

    /// Values for the symbols `g2`, `g3`, `e1`, `e2`, `e3` in symbolic evaluation.
    pub fn env(&self) -> Env {
        let mut env = Env::new();
        env.insert("g2".into(), self.g2);
        env.insert("g3".into(), self.g3);
        for (k, e) in self.e.iter().enumerate() {
            env.insert(format!("e{}", k + 1), *e);
        }
        env
    }

    /// z/μ reduced into the period parallelogram of τ′ centred at 0.
    fn reduce_arg(&self, z: C) -> Result<C, EllipticError> {
        let t = self.reduced;
        let w = z / self.mu;
        let w = w - t * (w.im / t.im).round();
        let w = w - w.re.round();
        let mut dist = f64::INFINITY;
        for j in -1..=1 {
            for k in -1..=1 {
                dist = dist.min((w - j as f64 - t * k as f64).norm());
            }
        }
        if !(dist * self.mu.norm() >= POLE_DISTANCE) {
            return Err(EllipticError::NearPole(z));
        }
        Ok(w)
    }

    /// Σ_{n∈Z} f(x_n) and Σ ±h(x_n) with x_n = qⁿe^{±2πiw}, f(x) = x/(1 − x)²,
    /// h(x) = x(1 + x)/(1 − x)³. Each term is evaluated on the side |x| ≤ 1
    /// through f(1/x) = f(x) and h(1/x) = −h(x), so nothing overflows when
    /// Im τ is large.
    fn series(&self, w: C) -> (C, C) {
        let f = |x: C| x / (C::one() - x).powi(2);
        let h = |x: C| x * (C::one() + x) / (C::one() - x).powi(3);
        // f and ±h at x = e^{2πia}.
        let term = |a: C| -> (C, C) {
            if a.im >= 0.0 {
                let x = (two_pi_i() * a).exp();
                (f(x), h(x))
            } else {
                let x = (-two_pi_i() * a).exp();
                (f(x), -h(x))
            }
        };
        let (mut s, mut sp) = term(w);
        for n in 1..=self.terms {
            let shift = self.reduced * n as f64;
            let (fa, ha) = term(shift + w);
            let (fb, hb) = term(shift - w);
            s += fa + fb;
            sp += ha - hb;
        }
        (s, sp)
    }

    pub fn wp(&self, z: C) -> Result<C, EllipticError> {
        let w = self.reduce_arg(z)?;
        let (s, _) = self.series(w);
        Ok(two_pi_i().powi(2) * (s + self.e2_reduced / 12.0) / self.mu.powi(2))
    }

    pub fn wp_prime(&self, z: C) -> Result<C, EllipticError> {
        let w = self.reduce_arg(z)?;
        let (_, sp) = self.series(w);
        Ok(two_pi_i().powi(3) * sp / self.mu.powi(3))
    }

    /// z* = (1 + τ)/4, where ℘₁ takes the principal root.
    pub fn base_point(&self) -> C {
        (C::one() + self.tau) * 0.25
    }

    /// Coordinates (s, t) with z = s + tτ.
    pub fn cell_coords(&self, z: C) -> (f64, f64) {
        let t = z.im / self.tau.im;
        (z.re - t * self.tau.re, t)
    }

    /// Inside the open cell and clear of lattice points and half-periods.
    pub fn in_patch(&self, z: C) -> bool {
        let (s, t) = self.cell_coords(z);
        if !(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0) {
            return false;
        }
        let tau = self.tau;
        let mut avoid = Vec::with_capacity(9);
        for j in 0..=2 {
            for k in 0..=2 {
                avoid.push((j as f64 + tau * k as f64) / 2.0);
            }
        }
        avoid.iter().all(|p| (z - p).norm() >= SAMPLE_EXCLUSION)
    }

    /// ℘₁ continued along the segment from the base point in `steps` steps.
    pub fn wp1_with_steps(&self, z: C, steps: usize) -> Result<C, EllipticError> {
        if !self.in_patch(z) {
            return Err(EllipticError::OutsidePatch(z));
        }
        let z0 = self.base_point();
        let mut prev = self.root(z0)?;
        let mut a = z0;
        for k in 1..=steps {
            let b = z0 + (z - z0) * (k as f64 / steps as f64);
            prev = self.continue_root(a, b, prev, 0)?;
            a = b;
        }
        Ok(prev)
    }

    /// Principal root of ℘ − e₁, refused once the difference drowns in rounding.
    fn root(&self, z: C) -> Result<C, EllipticError> {
        let x = self.wp(z)?;
        let d = x - self.e[0];
        if d.norm() <= UNRESOLVED * x.norm().max(self.e[0].norm()) {
            return Err(EllipticError::Unresolved(z));
        }
        Ok(d.sqrt())
    }

    /// Root of ℘ − e₁ at b nearest `prev`, halving the step while the choice is ambiguous.
    fn continue_root(&self, a: C, b: C, prev: C, depth: u32) -> Result<C, EllipticError> {
        let r = self.root(b)?;
        let cand = if (r - prev).norm() <= (r + prev).norm() {
            r
        } else {
            -r
        };
        if (cand - prev).norm() <= 0.25 * (cand.norm() + prev.norm()) {
            return Ok(cand);
        }
        if depth >= 24 {
            return Err(EllipticError::Continuation(b));
        }
        let mid = (a + b) / 2.0;
        let at_mid = self.continue_root(a, mid, prev, depth + 1)?;
        self.continue_root(mid, b, at_mid, depth + 1)
    }

    pub fn wp1(&self, z: C) -> Result<C, EllipticError> {
        self.wp1_with_steps(z, CONTINUATION_STEPS)
    }

    /// ℘₁′ = ℘′/(2℘₁).
    pub fn wp1_prime(&self, z: C) -> Result<C, EllipticError> {
        Ok(self.wp_prime(z)? / (self.wp1(z)? * 2.0))
    }

    /// [℘, ℘′, 1 | ℘₁ζ, ℘₁′ζ, ℘₁℘ζ].
    pub fn embed(&self, z: C) -> Result<EmbeddingPoint, EllipticError> {
        let x = self.wp(z)?;
        let y = self.wp_prime(z)?;
        let w1 = self.wp1(z)?;
        let w1p = y / (w1 * 2.0);
        Ok(EmbeddingPoint {
            even: [x, y, C::one()],
            odd: [w1, w1p, w1 * x],
        })
    }

    pub fn verify_affine_ideal(&self, z: C) -> Result<[f64; 4], EllipticError> {
        Ok(affine_residuals(&self.embed(z)?, &self.ideal()))
    }

    pub fn verify_homogeneous_ideal(&self, p: &EmbeddingPoint) -> [f64; 4] {
        homogeneous_residuals(p, &self.ideal())
    }
}

impl OpaqueHooks for EllipticContext {
    fn call(&self, name: &str, arg: C) -> Option<Result<C, SymError>> {
        use crate::symcore::opaque::{WP, WP1, WP1_PRIME, WP_PRIME};
        let r = match name {
            WP => self.wp(arg),
            WP_PRIME => self.wp_prime(arg),
            WP1 => self.wp1(arg),
            WP1_PRIME => self.wp1_prime(arg),
            _ => return None,
        };
        Some(r.map_err(|_| SymError::Pole))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn square_lattice_has_vanishing_g3() {
        let ctx = EllipticContext::new(c(0.0, 1.0)).unwrap();
        assert!(ctx.g3().norm() < 1e-10);
        // g₂(i) = Γ(1/4)⁸/(16π²).
        let gamma_quarter: f64 = 3.625_609_908_221_908;
        assert!((ctx.g2().re - gamma_quarter.powi(8) / (16.0 * PI * PI)).abs() < 1e-9);
    }

    #[test]
    fn reduction_does_not_change_invariants() {
        let a = EllipticContext::new(c(0.25, 2.0)).unwrap();
        let b = EllipticContext::new(c(3.25, 2.0)).unwrap();
        assert!((a.g2() - b.g2()).norm() < 1e-9);
        assert!((a.g3() - b.g3()).norm() < 1e-9);
        // −1/τ spans the lattice τ⁻¹(Z + Zτ), so g₂ scales by τ⁴.
        let t = c(0.3, 0.4);
        let s = EllipticContext::new(-t.inv()).unwrap();
        let u = EllipticContext::new(t).unwrap();
        assert!((s.g2() - u.g2() * t.powi(4)).norm() < 1e-8 * s.g2().norm());
    }

    #[test]
    fn extreme_lattices_stay_finite() {
        for tau in [c(0.0, 1e6), c(0.0, 1e-3), c(1.0 / 3.0, 1e-4)] {
            let ctx = EllipticContext::new(tau).unwrap();
            assert!(
                ctx.g2().is_finite() && ctx.e().iter().all(|e| e.is_finite()),
                "tau = {tau}"
            );
            let z = ctx.base_point();
            assert!(
                ctx.wp(z).unwrap().is_finite() && ctx.wp_prime(z).unwrap().is_finite(),
                "tau = {tau}"
            );
        }
        // 3τ − 1 is a period shorter than the pole distance: refused, not a panic.
        assert!(matches!(
            EllipticContext::new(c(1.0 / 3.0, 1e-9)),
            Err(EllipticError::NearPole(_))
        ));
        // Tall lattice: ℘(1/2 + τ/2) tends to −π²/3.
        let ctx = EllipticContext::new(c(0.0, 1e6)).unwrap();
        assert!((ctx.e()[2] + PI * PI / 3.0).norm() < 1e-12);
        // Thin lattice: ℘ is flat to double precision away from the real periods.
        let ctx = EllipticContext::new(c(0.0, 1e-3)).unwrap();
        assert!(matches!(
            ctx.wp1(c(0.9, 9e-4)),
            Err(EllipticError::Unresolved(_))
        ));
    }

    #[test]
    fn poles_are_refused() {
        let ctx = EllipticContext::new(c(0.0, 2.0)).unwrap();
        assert!(matches!(
            ctx.wp(c(1.0, 2.0)),
            Err(EllipticError::NearPole(_))
        ));
        assert!(ctx.wp(c(1e-3, 0.0)).is_ok());
        assert!(EllipticContext::new(c(0.0, -1.0)).is_err());
    }

    #[test]
    fn wp1_squares_back_and_is_continuous() {
        let ctx = EllipticContext::new(c(0.0, 2.0)).unwrap();
        let z = c(0.7, 1.1);
        let w = ctx.wp1(z).unwrap();
        assert!((w * w - (ctx.wp(z).unwrap() - ctx.e()[0])).norm() < 1e-10);
        assert!((ctx.wp1_with_steps(z, 2 * CONTINUATION_STEPS).unwrap() - w).norm() < 1e-12);
        assert!(ctx.wp1(c(0.5, 0.0)).is_err());
    }

    #[test]
    fn hooks_answer_registered_names() {
        let ctx = EllipticContext::new(c(0.0, 1.0)).unwrap();
        let z = c(0.3, 0.2);
        assert_eq!(ctx.call("wp", z).unwrap().unwrap(), ctx.wp(z).unwrap());
        assert!(ctx.call("sn", z).is_none());
        assert!(ctx.call("wp", c(0.0, 0.0)).unwrap().is_err());
    }
}
