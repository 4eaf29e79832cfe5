use serde::Serialize;

use crate::atlas::Atlas;
use crate::superfn::{ChartMorphism, SuperFunction, SuperVectorField};
use crate::symcore::RatFunc;

use super::{c11_check, is_susy, SusyError};

/// The field X on the source of φ = (f(u), g(u)ξ) with X(φ*y) = φ*(Y(y)) for
/// every target coordinate y.
pub fn transport_field(
    phi: &ChartMorphism,
    y: &SuperVectorField,
) -> Result<SuperVectorField, SusyError> {
    c11_check(&phi.source)?;
    c11_check(&phi.target)?;
    let src = &phi.source;
    let u = &src.even[0];
    let f = &phi.even[0];
    let g_xi = &phi.odd[0];
    let g = SuperFunction::from_ratfunc(src, g_xi.coeff(1));
    let coord = |k: usize| -> Result<SuperFunction, SusyError> {
        let names = [&phi.target.even[0], &phi.target.odd[0]];
        let yc = SuperFunction::coord(&phi.target, names[k])?;
        Ok(crate::superfn::pullback_fn(phi, &y.apply(&yc)?)?)
    };
    // a·f′ = φ*(Y u′);  a·g′ξ + b·g = φ*(Y ξ′).
    let a = coord(0)?.mul(&f.diff_even(u)?.inv()?)?;
    let b = coord(1)?
        .sub(&a.mul(&g_xi.diff_even(u)?)?)?
        .mul(&g.inv()?)?;
    Ok(SuperVectorField::new(src, vec![a], vec![b])?)
}

/// A SUSY-1 structure given by one generator per chart.
#[derive(Clone, Debug)]
pub struct SusyStructure {
    pub atlas: Atlas,
    pub fields: Vec<SuperVectorField>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OverlapUnit {
    pub from: usize,
    pub to: usize,
    /// h with D_i = h·(D_j carried to U_i), when proportional.
    pub unit: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub pass: bool,
    pub charts: Vec<bool>,
    pub overlaps: Vec<OverlapUnit>,
}

impl SusyStructure {
    /// D = ∂_ξ + ξ∂_u on every chart.
    pub fn standard(atlas: &Atlas) -> Result<Self, SusyError> {
        let fields = atlas
            .charts
            .iter()
            .map(|(_, c)| {
                c11_check(c)?;
                let text = format!("d/d{} + {}*d/d{}", c.odd[0], c.odd[0], c.even[0]);
                Ok(SuperVectorField::parse(&text, c)?)
            })
            .collect::<Result<_, SusyError>>()?;
        Ok(SusyStructure {
            atlas: atlas.clone(),
            fields,
        })
    }

    pub fn verify(&self) -> Result<StructureReport, SusyError> {
        let charts = self
            .fields
            .iter()
            .map(|d| is_susy(d).map(|c| c.is_susy))
            .collect::<Result<Vec<_>, _>>()?;
        let mut overlaps = Vec::new();
        for (&(i, j), t) in &self.atlas.transitions {
            let x = transport_field(&t.map, &self.fields[j])?;
            let di = &self.fields[i];
            let unit = proportionality(di, &x)?;
            overlaps.push(OverlapUnit {
                from: i,
                to: j,
                unit: unit.map(|h| h.to_expr().to_string()),
            });
        }
        let pass = charts.iter().all(|&b| b) && overlaps.iter().all(|o| o.unit.is_some());
        Ok(StructureReport {
            pass,
            charts,
            overlaps,
        })
    }
}

/// h with a = h·b exactly, for odd fields whose ∂_ξ coefficients are even functions.
fn proportionality(
    a: &SuperVectorField,
    b: &SuperVectorField,
) -> Result<Option<RatFunc>, SusyError> {
    let bb = b.dzeta[0].body();
    if bb.is_zero() {
        return Ok(None);
    }
    let h = a.dzeta[0].body().div(&bb)?;
    let scaled = b.left_mul(&SuperFunction::from_ratfunc(&b.chart, h.clone()))?;
    Ok((scaled == *a && !h.is_zero()).then_some(h))
}
