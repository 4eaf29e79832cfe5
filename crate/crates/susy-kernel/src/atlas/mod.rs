//! Atlases glued by chart morphisms, cocycle verification, the projective and
//! Π-line atlases, and line-bundle cocycles on them.

mod bundle;
mod doc;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::par::par_map;
use crate::superfn::{compose, ChartMorphism, ChartSpec, SuperError, SuperFunction};
use crate::symcore::{is_zero, to_ratfunc, Expr, ZeroTest};

pub use bundle::{
    build_supermanifold_from_theta, canonical_cocycle, cocycle_sqrt, cocycle_square, degree,
    find_theta_witness, odd_part_cocycle, LineBundleCocycle, ThetaCharacteristic, ThetaWitness,
};
pub use doc::{AtlasDoc, ChartDoc, TransitionDoc};

/// Largest number of charts the builders accept.
pub const MAX_CHARTS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AtlasError {
    #[error("size bound exceeded: {0}")]
    TooLarge(String),
    #[error("invalid atlas: {0}")]
    Invalid(String),
    #[error("unsupported cocycle: {0}")]
    Unsupported(String),
    #[error("theta witness fails on overlap {0:?}")]
    WitnessFails((usize, usize)),
    #[error(transparent)]
    Super(#[from] SuperError),
    #[error("malformed atlas document: {0}")]
    Doc(String),
}

/// One transition φ_ij: U_i ⊃ U_ij → U_j, stored as pullbacks of U_j's
/// coordinates, with the overlap recorded as expressions that must be invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub overlap: Vec<String>,
    pub map: ChartMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atlas {
    pub name: String,
    pub params: Vec<String>,
    pub charts: Vec<(String, ChartSpec)>,
    pub transitions: BTreeMap<(usize, usize), Transition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleFailure {
    /// `[i, j]` for φ_ji∘φ_ij = id, `[i, j, k]` for φ_jk∘φ_ij = φ_ik.
    pub charts: Vec<usize>,
    pub coordinate: String,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleReport {
    pub pass: bool,
    pub checks: usize,
    pub failing: Option<CocycleFailure>,
}

impl Atlas {
    pub fn new(name: &str, charts: Vec<(String, ChartSpec)>) -> Self {
        Atlas {
            name: name.to_string(),
            params: Vec::new(),
            charts,
            transitions: BTreeMap::new(),
        }
    }

    pub fn chart(&self, i: usize) -> &ChartSpec {
        &self.charts[i].1
    }

    pub fn dim(&self) -> (usize, usize) {
        self.charts.first().map_or((0, 0), |(_, c)| (c.m(), c.n()))
    }

    pub fn insert(
        &mut self,
        i: usize,
        j: usize,
        overlap: Vec<String>,
        map: ChartMorphism,
    ) -> Result<(), AtlasError> {
        if map.source != *self.chart(i) || map.target != *self.chart(j) {
            return Err(AtlasError::Invalid(format!(
                "transition ({i},{j}) has wrong charts"
            )));
        }
        self.transitions.insert((i, j), Transition { overlap, map });
        Ok(())
    }

    /// φ_ij, with φ_ii the identity when not stored.
    pub fn transition(&self, i: usize, j: usize) -> Option<ChartMorphism> {
        match self.transitions.get(&(i, j)) {
            Some(t) => Some(t.map.clone()),
            None if i == j => Some(ChartMorphism::identity(self.chart(i))),
            None => None,
        }
    }

    /// Drops the odd coordinates, keeping the reduced transitions.
    pub fn reduced(&self) -> Result<Atlas, AtlasError> {
        let red = |c: &ChartSpec| ChartSpec::new(c.even.clone(), Vec::<String>::new());
        let charts = self
            .charts
            .iter()
            .map(|(n, c)| Ok((n.clone(), red(c)?)))
            .collect::<Result<Vec<_>, SuperError>>()?;
        let mut out = Atlas {
            name: self.name.clone(),
            params: self.params.clone(),
            charts,
            transitions: BTreeMap::new(),
        };
        for (&(i, j), t) in &self.transitions {
            let src = out.chart(i).clone();
            let even = t
                .map
                .even
                .iter()
                .map(|f| SuperFunction::from_ratfunc(&src, f.body()))
                .collect();
            let map = ChartMorphism::new(&src, out.chart(j), even, vec![])?;
            out.insert(i, j, t.overlap.clone(), map)?;
        }
        Ok(out)
    }
}

fn residual(a: &ChartMorphism, b: &ChartMorphism) -> Result<Option<(String, String)>, SuperError> {
    let names = a.target.even.iter().chain(&a.target.odd);
    for ((x, f), g) in names
        .zip(a.even.iter().chain(&a.odd))
        .zip(b.even.iter().chain(&b.odd))
    {
        let d = f.sub(g)?;
        if d.is_zero() {
            continue;
        }
        // Outside the normal-form fragment fall back to the semantic zero test.
        let all_zero = d
            .terms()
            .all(|(_, c)| is_zero(&c.to_expr()) == ZeroTest::Yes);
        if !all_zero {
            return Ok(Some((x.clone(), d.to_string())));
        }
    }
    Ok(None)
}

/// Checks φ_ji∘φ_ij = id and φ_jk∘φ_ij = φ_ik wherever the maps are defined.
pub fn verify_cocycle(a: &Atlas) -> CocycleReport {
    let k = a.charts.len();
    let mut cases = Vec::new();
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                if a.transitions.contains_key(&(i, j)) || i == j {
                    cases.push((i, j, l));
                }
            }
        }
    }
    let results = par_map(&cases, |&(i, j, l)| -> Option<CocycleFailure> {
        let (Some(f), Some(g)) = (a.transition(i, j), a.transition(j, l)) else {
            return None;
        };
        let direct = a.transition(i, l)?;
        let charts = if i == l { vec![i, j] } else { vec![i, j, l] };
        let fail = |coordinate: String, residual: String| {
            Some(CocycleFailure {
                charts: charts.clone(),
                coordinate,
                residual,
            })
        };
        match compose(&g, &f).and_then(|c| residual(&c, &direct)) {
            Ok(None) => None,
            Ok(Some((x, r))) => fail(x, r),
            Err(e) => fail(String::new(), format!("error: {e}")),
        }
    });
    let failing = results.into_iter().flatten().next();
    CocycleReport {
        pass: failing.is_none(),
        checks: cases.len(),
        failing,
    }
}

fn projective_chart(i: usize, m: usize, n: usize) -> Result<ChartSpec, SuperError> {
    let even: Vec<String> = if m == 1 {
        vec!["u".into()]
    } else {
        (0..=m)
            .filter(|&k| k != i)
            .map(|k| format!("u{k}"))
            .collect()
    };
    let odd: Vec<String> = if n == 1 {
        vec!["xi".into()]
    } else {
        (1..=n).map(|a| format!("xi{a}")).collect()
    };
    ChartSpec::new(even, odd)
}

/// Standard affine cover of P^{m|n}: on U_i, u_k = x_k/x_i and ξ_a = θ_a/x_i.
pub fn build_projective_atlas(m: usize, n: usize) -> Result<Atlas, AtlasError> {
    if m == 0 {
        return Err(AtlasError::Invalid("m must be at least 1".into()));
    }
    if m + 1 > MAX_CHARTS || m + n > MAX_CHARTS + 1 {
        return Err(AtlasError::TooLarge(format!("P^{{{m}|{n}}}")));
    }
    let charts = (0..=m)
        .map(|i| Ok((format!("U{i}"), projective_chart(i, m, n)?)))
        .collect::<Result<Vec<_>, SuperError>>()?;
    let mut atlas = Atlas::new(&format!("P^{{{m}|{n}}}"), charts);
    // Name of homogeneous slot k in chart i.
    let slot = |i: usize, k: usize| -> String {
        if m == 1 {
            debug_assert_ne!(i, k);
            "u".into()
        } else {
            format!("u{k}")
        }
    };
    for i in 0..=m {
        for j in 0..=m {
            if i == j {
                continue;
            }
            let src = atlas.chart(i).clone();
            let uj = slot(i, j);
            let even = (0..=m)
                .filter(|&k| k != j)
                .map(|k| {
                    let text = if k == i {
                        format!("1/{uj}")
                    } else {
                        format!("{}/{uj}", slot(i, k))
                    };
                    SuperFunction::parse(&text, &src)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let odd = src
                .odd
                .iter()
                .map(|x| SuperFunction::parse(&format!("{x}/{uj}"), &src))
                .collect::<Result<Vec<_>, _>>()?;
            let map = ChartMorphism::new(&src, atlas.chart(j), even, odd)?;
            atlas.insert(i, j, vec![uj], map)?;
        }
    }
    Ok(atlas)
}

/// Two 1|1 charts glued by (u, ξ) ↦ (1/u, −ξ/u²) in both directions.
pub fn build_pi_line_atlas() -> Atlas {
    let c = ChartSpec::new(["u"], ["xi"]).expect("valid chart");
    let mut atlas = Atlas::new(
        "Pi-line",
        vec![("U0".into(), c.clone()), ("U1".into(), c.clone())],
    );
    let psi = ChartMorphism::parse(&c, &c, &["1/u"], &["-xi/u^2"], &[]).expect("valid map");
    for (i, j) in [(0, 1), (1, 0)] {
        atlas
            .insert(i, j, vec!["u".into()], psi.clone())
            .expect("charts match");
    }
    atlas
}

pub(crate) fn ratfunc(e: &Expr) -> Result<crate::symcore::RatFunc, AtlasError> {
    to_ratfunc(e).map_err(|e| AtlasError::Super(e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_atlases_satisfy_cocycle() {
        for (m, n) in [(1, 0), (1, 1), (2, 3), (3, 2)] {
            let a = build_projective_atlas(m, n).unwrap();
            assert_eq!(a.charts.len(), m + 1);
            let r = verify_cocycle(&a);
            assert!(r.pass, "P^{m}|{n}: {:?}", r.failing);
        }
    }

    #[test]
    fn p11_transition_is_inversion() {
        let a = build_projective_atlas(1, 1).unwrap();
        let t = &a.transitions[&(0, 1)].map;
        assert_eq!(t.even[0].to_string(), "1/u");
        assert_eq!(t.odd[0], SuperFunction::parse("xi/u", a.chart(0)).unwrap());
    }

    #[test]
    fn p23_charts_use_ratios() {
        let a = build_projective_atlas(2, 3).unwrap();
        let t = &a.transitions[&(0, 2)].map;
        let c = a.chart(0);
        assert_eq!(t.even[0], SuperFunction::parse("1/u2", c).unwrap());
        assert_eq!(t.even[1], SuperFunction::parse("u1/u2", c).unwrap());
        assert_eq!(t.odd[2], SuperFunction::parse("xi3/u2", c).unwrap());
    }

    #[test]
    fn pi_line_transition_is_an_involution() {
        let a = build_pi_line_atlas();
        let psi = a.transition(0, 1).unwrap();
        let twice = compose(&psi, &psi).unwrap();
        assert_eq!(twice, ChartMorphism::identity(a.chart(0)));
        assert!(verify_cocycle(&a).pass);
    }

    #[test]
    fn sabotaged_atlas_fails() {
        let mut a = build_projective_atlas(1, 1).unwrap();
        let c = a.chart(0).clone();
        // Changing both directions to ξ/u² would still be consistent; one side breaks it.
        let bad = ChartMorphism::parse(&c, &c, &["1/u"], &["xi/u^2"], &[]).unwrap();
        a.insert(0, 1, vec!["u".into()], bad).unwrap();
        let r = verify_cocycle(&a);
        assert!(!r.pass);
        let f = r.failing.unwrap();
        assert_eq!(f.coordinate, "xi");
        assert!(!f.residual.is_empty() && f.residual != "0");
    }

    #[test]
    fn size_bound() {
        assert!(matches!(
            build_projective_atlas(7, 0),
            Err(AtlasError::TooLarge(_))
        ));
        assert!(build_projective_atlas(0, 1).is_err());
    }
}
