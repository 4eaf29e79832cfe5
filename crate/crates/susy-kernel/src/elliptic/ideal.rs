use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

type C = Complex64;

/// Coefficients entering the ideal equations, kept apart from the context so
/// that perturbed values can be tested against genuine embedding points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealCoefficients {
    pub g2: C,
    pub g3: C,
    pub e: [C; 3],
}

/// [x₀, x₁, x₂ | ξ₁ζ, ξ₂ζ, ξ₃ζ]; `odd` stores the ζ-coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmbeddingPoint {
    pub even: [C; 3],
    pub odd: [C; 3],
}

impl EmbeddingPoint {
    pub fn scale(&self, lambda: C) -> Self {
        EmbeddingPoint {
            even: self.even.map(|x| x * lambda),
            odd: self.odd.map(|x| x * lambda),
        }
    }
}

/// |lhs − rhs| / max(1, |lhs|, |rhs|).
pub fn residual(lhs: C, rhs: C) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0)
}

/// y² = 4x³ − g₂x − g₃, 2(x−e₁)ξ₂ = yξ₁, yξ₂ = 2(x−e₂)(x−e₃)ξ₁, ξ₃ = xξ₁.
pub fn affine_residuals(p: &EmbeddingPoint, k: &IdealCoefficients) -> [f64; 4] {
    let [x, y, _] = p.even;
    let [xi1, xi2, xi3] = p.odd;
    let [e1, e2, e3] = k.e;
    [
        residual(y * y, x.powi(3) * 4.0 - k.g2 * x - k.g3),
        residual((x - e1) * xi2 * 2.0, y * xi1),
        residual(y * xi2, (x - e2) * (x - e3) * xi1 * 2.0),
        residual(xi3, x * xi1),
    ]
}

/// The homogeneous forms of the affine equations, each of degree 3 except the
/// last (degree 2). Residuals of λP agree with those of P up to rounding.
pub fn homogeneous_residuals(p: &EmbeddingPoint, k: &IdealCoefficients) -> [f64; 4] {
    let [x0, x1, x2] = p.even;
    let [xi1, xi2, xi3] = p.odd;
    let [e1, e2, e3] = k.e;
    let two = C::new(2.0, 0.0);
    [
        residual(
            x1 * x1 * x2,
            x0.powi(3) * 4.0 - k.g2 * x0 * x2 * x2 - k.g3 * x2.powi(3),
        ),
        residual(two * (x0 * x2 - e1 * x2 * x2) * xi2, x1 * x2 * xi1),
        residual(x1 * x2 * xi2, two * (x0 - e2 * x2) * (x0 - e3 * x2) * xi1),
        residual(xi3 * x2, x0 * xi1),
    ]
}

/// Least-squares a₁, a₂ for y² = 4x³ − a₁x² − a₂ over the given points.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AltCubicFit {
    pub a1: [f64; 2],
    pub a2: [f64; 2],
    /// Root-mean-square of |4x³ − a₁x² − a₂ − y²| at the fit.
    pub rms: f64,
}

pub fn fit_alt_cubic(points: &[EmbeddingPoint]) -> Option<AltCubicFit> {
    // Normal equations for columns (x², 1) and target 4x³ − y².
    let (mut s11, mut s12, s22) = (0.0, C::zero(), points.len() as f64);
    let (mut b1, mut b2) = (C::zero(), C::zero());
    let rows: Vec<(C, C)> = points
        .iter()
        .map(|p| {
            let [x, y, _] = p.even;
            (x * x, x.powi(3) * 4.0 - y * y)
        })
        .collect();
    for (a, t) in &rows {
        s11 += a.norm_sqr();
        s12 += a.conj();
        b1 += a.conj() * t;
        b2 += t;
    }
    let det = C::from(s11 * s22) - s12 * s12.conj();
    if points.len() < 2 || det.norm() < 1e-300 {
        return None;
    }
    let a1 = (b1 * s22 - s12 * b2) / det;
    let a2 = (C::from(s11) * b2 - s12.conj() * b1) / det;
    let sq: f64 = rows.iter().map(|(a, t)| (a1 * a + a2 - t).norm_sqr()).sum();
    Some(AltCubicFit {
        a1: [a1.re, a1.im],
        a2: [a2.re, a2.im],
        rms: (sq / rows.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn residual_scale() {
        assert_eq!(residual(C::one(), C::one()), 0.0);
        assert_eq!(
            residual(C::new(1e6, 0.0), C::new(1e6 + 1.0, 0.0)),
            1.0 / (1e6 + 1.0)
        );
        assert_eq!(residual(C::new(0.5, 0.0), C::zero()), 0.5);
    }

    #[test]
    fn fit_recovers_an_exact_cubic() {
        let (a1, a2) = (C::new(1.5, -0.5), C::new(-2.0, 1.0));
        let pts: Vec<EmbeddingPoint> = [0.3, 1.1, -0.7, 2.2]
            .iter()
            .map(|&r| {
                let x = C::new(r, 0.4 * r + 0.1);
                let y = (x.powi(3) * 4.0 - a1 * x * x - a2).sqrt();
                EmbeddingPoint {
                    even: [x, y, C::one()],
                    odd: [C::zero(); 3],
                }
            })
            .collect();
        let fit = fit_alt_cubic(&pts).unwrap();
        assert!((C::new(fit.a1[0], fit.a1[1]) - a1).norm() < 1e-10);
        assert!((C::new(fit.a2[0], fit.a2[1]) - a2).norm() < 1e-10);
        assert!(fit.rms < 1e-10);
    }
}
