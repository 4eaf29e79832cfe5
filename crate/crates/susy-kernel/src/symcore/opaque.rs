//! Registry of named analytic symbols and their derivative rules.
//!
//! The registry is built once and frozen; every `Expr::Opaque` node must name
//! an entry here.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::expr::Expr;

/// Derivative of the named function, evaluated at `arg` (without the chain-rule factor).
pub type DerivativeRule = fn(&Expr) -> Expr;

pub struct OpaqueRule {
    pub name: &'static str,
    pub derivative: DerivativeRule,
}

pub const WP: &str = "wp";
pub const WP_PRIME: &str = "wp_prime";
pub const WP1: &str = "wp1";
pub const WP1_PRIME: &str = "wp1_prime";

fn d_wp(x: &Expr) -> Expr {
    Expr::opaque_unchecked(WP_PRIME, x.clone())
}

// ℘″ = 6℘² − g₂/2
fn d_wp_prime(x: &Expr) -> Expr {
    let wp = Expr::opaque_unchecked(WP, x.clone());
    Expr::int(6) * wp.pow(2) - Expr::var("g2") / Expr::int(2)
}

fn d_wp1(x: &Expr) -> Expr {
    Expr::opaque_unchecked(WP1_PRIME, x.clone())
}

// ℘₁′ = ℘′/(2℘₁), so ℘₁″ = ℘″/(2℘₁) − ℘′℘₁′/(2℘₁²)
fn d_wp1_prime(x: &Expr) -> Expr {
    let wp1 = Expr::opaque_unchecked(WP1, x.clone());
    let wpp = Expr::opaque_unchecked(WP_PRIME, x.clone());
    let wp1p = Expr::opaque_unchecked(WP1_PRIME, x.clone());
    d_wp_prime(x) / (Expr::int(2) * wp1.clone()) - wpp * wp1p / (Expr::int(2) * wp1.pow(2))
}

pub struct OpaqueRegistry {
    rules: BTreeMap<&'static str, OpaqueRule>,
}

impl OpaqueRegistry {
    fn builtin() -> Self {
        let mut rules = BTreeMap::new();
        for (name, derivative) in [
            (WP, d_wp as DerivativeRule),
            (WP_PRIME, d_wp_prime),
            (WP1, d_wp1),
            (WP1_PRIME, d_wp1_prime),
        ] {
            rules.insert(name, OpaqueRule { name, derivative });
        }
        OpaqueRegistry { rules }
    }

    pub fn global() -> &'static OpaqueRegistry {
        static REG: OnceLock<OpaqueRegistry> = OnceLock::new();
        REG.get_or_init(OpaqueRegistry::builtin)
    }

    pub fn get(&self, name: &str) -> Option<&OpaqueRule> {
        self.rules.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rules.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.rules.keys().copied()
    }
}
