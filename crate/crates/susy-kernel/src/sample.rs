//! Seeded random generators for property runs, benches and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grassmann::{DNumber, GrassmannElement, Parity};
use crate::symcore::{Expr, Scalar};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// a/b with |a| ≤ 4, 1 ≤ b ≤ 3, plus an imaginary part half the time.
pub fn scalar(r: &mut SampleRng) -> Scalar {
    let re = Scalar::frac(r.random_range(-4..=4), r.random_range(1..=3));
    if r.random_bool(0.5) {
        let im = Scalar::frac(r.random_range(-4..=4), r.random_range(1..=3));
        &re + &(&im * &Scalar::i())
    } else {
        re
    }
}

pub fn nonzero_scalar(r: &mut SampleRng) -> Scalar {
    loop {
        let c = scalar(r);
        if !c.is_zero() {
            return c;
        }
    }
}

/// Random element of Λ_n; `parity` restricts the support.
pub fn grassmann(r: &mut SampleRng, n: u8, parity: Option<Parity>) -> GrassmannElement {
    let terms: Vec<(u32, Scalar)> = (0..1u32 << n)
        .filter(|m| parity.is_none_or(|p| Parity::of_len(m.count_ones()) == p))
        .filter_map(|m| r.random_bool(0.6).then(|| (m, scalar(r))))
        .collect();
    GrassmannElement::from_terms(n, terms)
}

pub fn even(r: &mut SampleRng, n: u8) -> GrassmannElement {
    grassmann(r, n, Some(Parity::Even))
}

pub fn odd(r: &mut SampleRng, n: u8) -> GrassmannElement {
    grassmann(r, n, Some(Parity::Odd))
}

/// Even element with nonzero body.
pub fn even_unit(r: &mut SampleRng, n: u8) -> GrassmannElement {
    let x = even(r, n);
    let fix =
        &GrassmannElement::scalar(n, nonzero_scalar(r)) - &GrassmannElement::scalar(n, x.body());
    &x + &fix
}

pub fn d_unit(r: &mut SampleRng, n: u8) -> DNumber {
    DNumber::new(even_unit(r, n), odd(r, n)).expect("parities match")
}

/// c·z^k with k ∈ [−2, 2]: a unit wherever z is invertible.
pub fn laurent_unit(r: &mut SampleRng, z: &str) -> Expr {
    Expr::constant(nonzero_scalar(r)) * Expr::var(z).pow(r.random_range(-2..=2))
}

/// Polynomial of degree ≤ `deg` in `z` with small coefficients.
pub fn polynomial(r: &mut SampleRng, z: &str, deg: usize) -> Expr {
    let mut acc = Expr::zero();
    for k in 0..=deg {
        if r.random_bool(0.6) {
            acc = acc + Expr::constant(scalar(r)) * Expr::var(z).pow(k as i64);
        }
    }
    acc
}

/// A unit from {constants, e^{az}, rational units c·z^k}, or a product of two.
pub fn unit(r: &mut SampleRng, z: &str) -> Expr {
    let one = |r: &mut SampleRng| match r.random_range(0..3) {
        0 => Expr::constant(nonzero_scalar(r)),
        1 => (Expr::constant(Scalar::int(r.random_range(-3..=3))) * Expr::var(z)).exp(),
        _ => laurent_unit(r, z),
    };
    if r.random_bool(0.3) {
        one(r) * one(r)
    } else {
        one(r)
    }
}
