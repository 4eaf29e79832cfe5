use std::collections::BTreeMap;

use serde::Serialize;

use crate::superfn::{ChartMorphism, ChartSpec, SuperFunction};
use crate::symcore::poly::Atom;
use crate::symcore::{is_zero, Expr, RatFunc, Scalar, ZeroTest};

use super::{ratfunc, Atlas, AtlasError};

/// Transition functions g_ij of a line bundle, each written in chart i's
/// coordinate, with the convention g_ik = g_ij·φ_ij*(g_jk).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineBundleCocycle {
    pub base: Atlas,
    pub g: BTreeMap<(usize, usize), RatFunc>,
}

fn same(a: &RatFunc, b: &RatFunc) -> bool {
    a == b || is_zero(&a.sub(b).to_expr()) == ZeroTest::Yes
}

fn pull(m: &ChartMorphism, f: &RatFunc) -> Result<RatFunc, AtlasError> {
    Ok(m.pullback_coeff(f)?.body())
}

impl LineBundleCocycle {
    pub fn get(&self, i: usize, j: usize) -> Option<RatFunc> {
        match self.g.get(&(i, j)) {
            Some(r) => Some(r.clone()),
            None if i == j => Some(RatFunc::one()),
            None => None,
        }
    }

    /// The two-chart cocycle determined by g₀₁ (g₁₀ = 1/φ₁₀*(g₀₁)).
    pub fn two_chart(base: &Atlas, g01: RatFunc) -> Result<Self, AtlasError> {
        let back = base
            .transition(1, 0)
            .filter(|_| base.charts.len() == 2)
            .ok_or_else(|| AtlasError::Unsupported("not a two-chart atlas".into()))?;
        let g10 = pull(&back, &g01)?
            .inv()
            .map_err(|e| AtlasError::Super(e.into()))?;
        let g = BTreeMap::from([((0, 1), g01), ((1, 0), g10)]);
        Ok(LineBundleCocycle {
            base: base.clone(),
            g,
        })
    }

    /// g₀₁ of a two-chart cocycle.
    pub fn g01(&self) -> Result<&RatFunc, AtlasError> {
        self.g
            .get(&(0, 1))
            .filter(|_| self.base.charts.len() == 2)
            .ok_or_else(|| AtlasError::Unsupported("not a two-chart cocycle".into()))
    }

    /// Checks g_ij·φ_ij*(g_ji) = 1 and g_ik = g_ij·φ_ij*(g_jk).
    pub fn verify(&self) -> Result<bool, AtlasError> {
        let k = self.base.charts.len();
        for i in 0..k {
            for j in 0..k {
                let (Some(gij), Some(phi)) = (self.get(i, j), self.base.transition(i, j)) else {
                    continue;
                };
                for l in 0..k {
                    let (Some(gjl), Some(gil)) = (self.get(j, l), self.get(i, l)) else {
                        continue;
                    };
                    if !same(&gij.mul(&pull(&phi, &gjl)?), &gil) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn mul(&self, o: &LineBundleCocycle) -> Result<Self, AtlasError> {
        if self.base != o.base || self.g.keys().ne(o.g.keys()) {
            return Err(AtlasError::Invalid("cocycles on different covers".into()));
        }
        let g = self.g.iter().map(|(k, a)| (*k, a.mul(&o.g[k]))).collect();
        Ok(LineBundleCocycle {
            base: self.base.clone(),
            g,
        })
    }
}

fn single_even(a: &Atlas, what: &str) -> Result<(), AtlasError> {
    if a.charts.iter().all(|(_, c)| c.m() == 1 && c.n() == 0) {
        Ok(())
    } else {
        Err(AtlasError::Invalid(format!("{what} needs 1|0 charts")))
    }
}

/// f′_ij = d(φ_ij*(w))/dz on each overlap.
pub fn canonical_cocycle(a: &Atlas) -> Result<LineBundleCocycle, AtlasError> {
    single_even(a, "canonical cocycle")?;
    let mut g = BTreeMap::new();
    for (&(i, j), t) in &a.transitions {
        let z = &a.chart(i).even[0];
        g.insert((i, j), t.map.even[0].diff_even(z)?.body());
    }
    Ok(LineBundleCocycle { base: a.clone(), g })
}

/// g_ij from φ_ij*(η) = g_ij(z)·ζ on a 1|1 atlas.
pub fn odd_part_cocycle(a: &Atlas) -> Result<LineBundleCocycle, AtlasError> {
    if !a.charts.iter().all(|(_, c)| c.m() == 1 && c.n() == 1) {
        return Err(AtlasError::Invalid("odd part needs 1|1 charts".into()));
    }
    let mut g = BTreeMap::new();
    for (&(i, j), t) in &a.transitions {
        let eta = &t.map.odd[0];
        if eta.terms().any(|(m, _)| m != 1) {
            return Err(AtlasError::Unsupported(format!(
                "odd transition ({i},{j}) is not linear in ζ"
            )));
        }
        g.insert((i, j), eta.coeff(1));
    }
    Ok(LineBundleCocycle {
        base: a.reduced()?,
        g,
    })
}

pub fn cocycle_square(l: &LineBundleCocycle) -> LineBundleCocycle {
    l.mul(l).expect("same cover")
}

/// c·u^d when `r` is a Laurent monomial in `var`.
fn laurent_monomial(r: &RatFunc, var: &str) -> Option<(Scalar, i64)> {
    let single = |p: &crate::symcore::poly::Poly| -> Option<(Scalar, i64)> {
        let mut it = p.terms.iter();
        let (m, c) = it.next()?;
        if it.next().is_some() || m.exp.is_some() {
            return None;
        }
        let mut d = 0i64;
        for (atom, k) in &m.powers {
            match atom {
                Atom::Var(v) if v == var => d = *k as i64,
                _ => return None,
            }
        }
        Some((c.clone(), d))
    };
    let (c, a) = single(&r.num)?;
    let (one, b) = single(&r.den)?;
    one.is_one().then_some((c, a - b))
}

fn monomial_of(l: &LineBundleCocycle) -> Result<(Scalar, i64, String), AtlasError> {
    let g = l.g01()?;
    let var = l.base.chart(0).even.first().cloned().unwrap_or_default();
    let (c, d) = laurent_monomial(g, &var)
        .ok_or_else(|| AtlasError::Unsupported(format!("g01 = {} is not c·u^d", g.to_expr())))?;
    Ok((c, d, var))
}

/// deg(c·u^d) = d, read in the coordinate of U₀.
pub fn degree(l: &LineBundleCocycle) -> Result<i64, AtlasError> {
    Ok(monomial_of(l)?.1)
}

/// Both square roots ±√c·u^{d/2} of a monomial cocycle; `None` for odd d.
pub fn cocycle_sqrt(
    l: &LineBundleCocycle,
) -> Result<Option<(LineBundleCocycle, LineBundleCocycle)>, AtlasError> {
    let (c, d, var) = monomial_of(l)?;
    if d % 2 != 0 {
        return Ok(None);
    }
    let root = Expr::constant(c).sqrt() * Expr::var(&var).pow(d / 2);
    let plus = ratfunc(&root)?;
    Ok(Some((
        LineBundleCocycle::two_chart(&l.base, plus.clone())?,
        LineBundleCocycle::two_chart(&l.base, plus.neg())?,
    )))
}

/// A line bundle L with the identity g_ij² = f′_ij checked on every overlap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaCharacteristic {
    pub cocycle: LineBundleCocycle,
}

impl ThetaCharacteristic {
    pub fn new(l: LineBundleCocycle) -> Result<Self, AtlasError> {
        let k = canonical_cocycle(&l.base)?;
        for (key, f) in &k.g {
            let g = l.g.get(key).ok_or(AtlasError::WitnessFails(*key))?;
            if !same(&g.mul(g), f) {
                return Err(AtlasError::WitnessFails(*key));
            }
        }
        Ok(ThetaCharacteristic { cocycle: l })
    }
}

/// How a two-chart line bundle becomes a theta characteristic: rescaling
/// g₀₁ by λ (and g₁₀ by 1/λ) turns it into the exact square root `theta`.
#[derive(Clone, Debug)]
pub struct ThetaWitness {
    pub theta: ThetaCharacteristic,
    pub rescale: Scalar,
    pub roots: (LineBundleCocycle, LineBundleCocycle),
}

#[derive(Serialize)]
struct WitnessSummary {
    plus: String,
    minus: String,
    rescale: String,
}

impl ThetaWitness {
    pub fn summary_json(&self) -> serde_json::Value {
        let show =
            |l: &LineBundleCocycle| l.g01().map(|g| g.to_expr().to_string()).unwrap_or_default();
        serde_json::to_value(WitnessSummary {
            plus: show(&self.roots.0),
            minus: show(&self.roots.1),
            rescale: self.rescale.to_string(),
        })
        .expect("serializable")
    }
}

/// Finds the iso L ⊗ L ≅ K on the two-chart P¹ cover, if one exists.
pub fn find_theta_witness(l: &LineBundleCocycle) -> Result<Option<ThetaWitness>, AtlasError> {
    let k = canonical_cocycle(&l.base)?;
    let (c, d, _) = monomial_of(l)?;
    let (_, dk, _) = monomial_of(&k)?;
    if 2 * d != dk {
        return Ok(None);
    }
    let Some((plus, minus)) = cocycle_sqrt(&k)? else {
        return Ok(None);
    };
    let (cr, _, _) = monomial_of(&plus)?;
    let rescale = &cr / &c;
    let theta = ThetaCharacteristic::new(plus.clone())?;
    Ok(Some(ThetaWitness {
        theta,
        rescale,
        roots: (plus, minus),
    }))
}

/// The 1|1 atlas with even transitions from the base and η = g_ij(z)·ζ.
pub fn build_supermanifold_from_theta(t: &ThetaCharacteristic) -> Result<Atlas, AtlasError> {
    let base = &t.cocycle.base;
    let lift = |c: &ChartSpec| ChartSpec::new(c.even.clone(), vec!["xi".to_string()]);
    let charts = base
        .charts
        .iter()
        .map(|(n, c)| Ok((n.clone(), lift(c)?)))
        .collect::<Result<Vec<_>, crate::superfn::SuperError>>()?;
    let mut out = Atlas {
        name: base.name.clone(),
        params: base.params.clone(),
        charts,
        transitions: BTreeMap::new(),
    };
    for (&(i, j), tr) in &base.transitions {
        let src = out.chart(i).clone();
        let even = vec![SuperFunction::from_ratfunc(&src, tr.map.even[0].body())];
        let g = t
            .cocycle
            .get(i, j)
            .ok_or(AtlasError::WitnessFails((i, j)))?;
        let odd = vec![SuperFunction::monomial(&src, 1, g)];
        let map = ChartMorphism::new(&src, out.chart(j), even, odd)?;
        out.insert(i, j, tr.overlap.clone(), map)?;
    }
    Ok(out)
}
