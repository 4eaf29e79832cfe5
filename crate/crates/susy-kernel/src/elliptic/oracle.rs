//! Independent evaluations: truncated lattice sums with rigorous tail bounds,
//! and the Laurent expansion of ℘ at 0.

use num_complex::Complex64;
use num_traits::Zero;

type C = Complex64;

/// A truncated sum and a bound on what the truncation dropped.
#[derive(Clone, Copy, Debug)]
pub struct Bounded {
    pub value: C,
    pub tail: f64,
}

/// Nonzero m + nτ with |m + nτ| ≤ r.
fn lattice_points(tau: C, r: f64) -> Vec<C> {
    let nmax = (r / tau.im).ceil() as i64;
    let mut out = Vec::new();
    for n in -nmax..=nmax {
        let shift = tau * n as f64;
        let half = (r * r - shift.im * shift.im).max(0.0).sqrt();
        let lo = (-shift.re - half).floor() as i64;
        let hi = (-shift.re + half).ceil() as i64;
        for m in lo..=hi {
            let w = shift + m as f64;
            if (m, n) != (0, 0) && w.norm() <= r {
                out.push(w);
            }
        }
    }
    out
}

/// Bound on Σ_{|ω|>r} |ω|^{−k}, k ≥ 3: each point owns a translate of the
/// period cell (area Im τ, diameter d), all of which lie outside |x| = r − d.
pub fn tail_sum_bound(tau: C, r: f64, k: i32) -> f64 {
    let d = (1.0 + tau).norm().max((1.0 - tau).norm());
    assert!(k >= 3 && r > 2.0 * d);
    let area = tau.im;
    (1.0 + d / r).powi(k) * 2.0 * std::f64::consts::PI
        / (area * (k - 2) as f64 * (r - d).powi(k - 2))
}

/// Σ′ ω^{−k} over |ω| ≤ r.
pub fn eisenstein_sum(tau: C, k: i32, r: f64) -> Bounded {
    let value = lattice_points(tau, r).iter().map(|w| w.powi(-k)).sum();
    Bounded {
        value,
        tail: tail_sum_bound(tau, r, k),
    }
}

/// g₂ = 60Σ′ω⁻⁴ and g₃ = 140Σ′ω⁻⁶.
pub fn invariants_lattice(tau: C, r: f64) -> (Bounded, Bounded) {
    let s4 = eisenstein_sum(tau, 4, r);
    let s6 = eisenstein_sum(tau, 6, r);
    (
        Bounded {
            value: s4.value * 60.0,
            tail: s4.tail * 60.0,
        },
        Bounded {
            value: s6.value * 140.0,
            tail: s6.tail * 140.0,
        },
    )
}

/// 1/z² + Σ′[(z−ω)⁻² − ω⁻²]. Pairing ±ω, each dropped point contributes at
/// most 6|z|²|ω|⁻⁴ once |ω| ≥ 2|z|.
pub fn wp_lattice(tau: C, z: C, r: f64) -> Bounded {
    assert!(r >= 2.0 * z.norm());
    let value = z.powi(-2)
        + lattice_points(tau, r)
            .iter()
            .map(|w| (z - w).powi(-2) - w.powi(-2))
            .sum::<C>();
    Bounded {
        value,
        tail: 6.0 * z.norm_sqr() * tail_sum_bound(tau, r, 4),
    }
}

/// −2Σ (z−ω)⁻³; paired terms are bounded by 16|z||ω|⁻⁴ per point.
pub fn wp_prime_lattice(tau: C, z: C, r: f64) -> Bounded {
    assert!(r >= 2.0 * z.norm());
    let value = -2.0
        * (z.powi(-3)
            + lattice_points(tau, r)
                .iter()
                .map(|w| (z - w).powi(-3))
                .sum::<C>());
    Bounded {
        value,
        tail: 16.0 * z.norm() * tail_sum_bound(tau, r, 4),
    }
}

/// Laurent coefficients c₂, c₃, … of ℘ = z⁻² + Σ c_k z^{2k−2}.
pub fn laurent_coefficients(g2: C, g3: C, kmax: usize) -> Vec<C> {
    let mut c = vec![C::zero(); kmax + 1];
    if kmax >= 2 {
        c[2] = g2 / 20.0;
    }
    if kmax >= 3 {
        c[3] = g3 / 28.0;
    }
    for k in 4..=kmax {
        let s: C = (2..=k - 2).map(|m| c[m] * c[k - m]).sum();
        c[k] = s * 3.0 / ((2 * k + 1) as f64 * (k - 3) as f64);
    }
    c
}

/// The Laurent series truncated after z^{2·kmax−2}.
pub fn wp_laurent(g2: C, g3: C, z: C, kmax: usize) -> C {
    let c = laurent_coefficients(g2, g3, kmax);
    z.powi(-2)
        + (2..=kmax)
            .map(|k| c[k] * z.powi(2 * k as i32 - 2))
            .sum::<C>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_points_are_symmetric() {
        let pts = lattice_points(C::new(0.25, 2.0), 10.0);
        assert!(pts
            .iter()
            .all(|w| pts.iter().any(|v| (*v + w).norm() < 1e-12)));
        // Square lattice, radius 1: the four units.
        assert_eq!(lattice_points(C::new(0.0, 1.0), 1.0).len(), 4);
    }

    #[test]
    fn tail_bound_dominates_a_larger_truncation() {
        let tau = C::new(0.0, 1.0);
        let small = eisenstein_sum(tau, 6, 20.0);
        let big = eisenstein_sum(tau, 6, 80.0);
        assert!((small.value - big.value).norm() <= small.tail);
    }

    #[test]
    fn laurent_recursion_matches_closed_forms() {
        let (g2, g3) = (C::new(3.0, 1.0), C::new(-2.0, 0.5));
        let c = laurent_coefficients(g2, g3, 5);
        assert!((c[4] - g2 * g2 / 1200.0).norm() < 1e-15);
        assert!((c[5] - g2 * g3 * 3.0 / 6160.0).norm() < 1e-15);
    }
}
