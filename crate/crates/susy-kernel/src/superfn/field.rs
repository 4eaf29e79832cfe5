use std::fmt;

use crate::grassmann::Parity;

use super::{ChartSpec, SuperError, SuperFunction};

/// X = Σ a_i ∂/∂z_i + Σ β_j ∂/∂ζ_j with coefficients acting on the left.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuperVectorField {
    pub chart: ChartSpec,
    pub dz: Vec<SuperFunction>,
    pub dzeta: Vec<SuperFunction>,
}

impl SuperVectorField {
    pub fn zero(chart: &ChartSpec) -> Self {
        SuperVectorField {
            chart: chart.clone(),
            dz: vec![SuperFunction::zero(chart); chart.m()],
            dzeta: vec![SuperFunction::zero(chart); chart.n()],
        }
    }

    pub fn new(
        chart: &ChartSpec,
        dz: Vec<SuperFunction>,
        dzeta: Vec<SuperFunction>,
    ) -> Result<Self, SuperError> {
        if dz.len() != chart.m() || dzeta.len() != chart.n() {
            return Err(SuperError::ChartMismatch("coefficient count".into()));
        }
        for f in dz.iter().chain(&dzeta) {
            chart.check(f.chart())?;
        }
        Ok(SuperVectorField {
            chart: chart.clone(),
            dz,
            dzeta,
        })
    }

    /// ∂/∂x for a coordinate name.
    pub fn partial(chart: &ChartSpec, name: &str) -> Result<Self, SuperError> {
        let mut x = SuperVectorField::zero(chart);
        if let Some(i) = chart.even_index(name) {
            x.dz[i] = SuperFunction::one(chart);
        } else if let Some(j) = chart.odd_index(name) {
            x.dzeta[j] = SuperFunction::one(chart);
        } else {
            return Err(SuperError::BadChart(format!("no coordinate '{name}'")));
        }
        Ok(x)
    }

    pub fn is_zero(&self) -> bool {
        self.dz
            .iter()
            .chain(&self.dzeta)
            .all(SuperFunction::is_zero)
    }

    /// |X|: ∂/∂z coefficients carry |X|, ∂/∂ζ coefficients carry |X|+1.
    pub fn parity(&self) -> Option<Parity> {
        let mut found: Option<Parity> = None;
        let mut note = |p: Option<Parity>| -> bool {
            match (p, found) {
                (None, _) => false,
                (Some(p), Some(q)) => p == q,
                (Some(p), None) => {
                    found = Some(p);
                    true
                }
            }
        };
        for f in self.dz.iter().filter(|f| !f.is_zero()) {
            if !note(f.parity()) {
                return None;
            }
        }
        for f in self.dzeta.iter().filter(|f| !f.is_zero()) {
            if !note(f.parity().map(Parity::flip)) {
                return None;
            }
        }
        Some(found.unwrap_or(Parity::Even))
    }

    pub fn add(&self, o: &SuperVectorField) -> Result<Self, SuperError> {
        self.chart.check(&o.chart)?;
        let sum =
            |a: &[SuperFunction], b: &[SuperFunction]| -> Result<Vec<SuperFunction>, SuperError> {
                a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
            };
        Ok(SuperVectorField {
            chart: self.chart.clone(),
            dz: sum(&self.dz, &o.dz)?,
            dzeta: sum(&self.dzeta, &o.dzeta)?,
        })
    }

    pub fn neg(&self) -> Self {
        SuperVectorField {
            chart: self.chart.clone(),
            dz: self.dz.iter().map(SuperFunction::neg).collect(),
            dzeta: self.dzeta.iter().map(SuperFunction::neg).collect(),
        }
    }

    pub fn sub(&self, o: &SuperVectorField) -> Result<Self, SuperError> {
        self.add(&o.neg())
    }

    /// f·X.
    pub fn left_mul(&self, f: &SuperFunction) -> Result<Self, SuperError> {
        let m = |v: &[SuperFunction]| -> Result<Vec<SuperFunction>, SuperError> {
            v.iter().map(|c| f.mul(c)).collect()
        };
        Ok(SuperVectorField {
            chart: self.chart.clone(),
            dz: m(&self.dz)?,
            dzeta: m(&self.dzeta)?,
        })
    }

    /// X(f).
    pub fn apply(&self, f: &SuperFunction) -> Result<SuperFunction, SuperError> {
        self.chart.check(f.chart())?;
        let mut acc = SuperFunction::zero(&self.chart);
        for (a, v) in self.dz.iter().zip(&self.chart.even) {
            if !a.is_zero() {
                acc = acc.add(&a.mul(&f.diff_even(v)?)?)?;
            }
        }
        for (j, b) in self.dzeta.iter().enumerate() {
            if !b.is_zero() {
                acc = acc.add(&b.mul(&f.diff_odd(j))?)?;
            }
        }
        Ok(acc)
    }

    /// [X, Y] = XY − (−1)^{|X||Y|} YX, read off from its action on coordinates.
    pub fn bracket(&self, o: &SuperVectorField) -> Result<Self, SuperError> {
        self.chart.check(&o.chart)?;
        let px = self.parity().ok_or(SuperError::NotHomogeneous)?;
        let py = o.parity().ok_or(SuperError::NotHomogeneous)?;
        let both_odd = px == Parity::Odd && py == Parity::Odd;
        let on = |x: SuperFunction| -> Result<SuperFunction, SuperError> {
            let xy = self.apply(&o.apply(&x)?)?;
            let yx = o.apply(&self.apply(&x)?)?;
            if both_odd {
                xy.add(&yx)
            } else {
                xy.sub(&yx)
            }
        };
        let c = &self.chart;
        let dz = c
            .even
            .iter()
            .map(|v| on(SuperFunction::coord(c, v)?))
            .collect::<Result<_, _>>()?;
        let dzeta = (0..c.n())
            .map(|j| on(SuperFunction::odd_coord(c, j)))
            .collect::<Result<_, _>>()?;
        SuperVectorField::new(c, dz, dzeta)
    }

    pub fn parse(text: &str, chart: &ChartSpec) -> Result<Self, SuperError> {
        super::parse::parse_field(text, chart, &[])
    }

    pub fn parse_with(text: &str, chart: &ChartSpec, params: &[&str]) -> Result<Self, SuperError> {
        super::parse::parse_field(text, chart, params)
    }
}

impl fmt::Display for SuperVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.chart.even.iter().chain(&self.chart.odd);
        let parts: Vec<String> = self
            .dz
            .iter()
            .chain(&self.dzeta)
            .zip(names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, n)| format!("({c})*d/d{n}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vf(s: &str) -> SuperVectorField {
        SuperVectorField::parse(s, &ChartSpec::c11()).unwrap()
    }

    fn sf(s: &str) -> SuperFunction {
        SuperFunction::parse(s, &ChartSpec::c11()).unwrap()
    }

    #[test]
    fn d_squares_to_d_dz() {
        let d = vf("d/dzeta + zeta*d/dz");
        assert_eq!(d.parity(), Some(Parity::Odd));
        let dd = d.bracket(&d).unwrap();
        // [D, D] = 2 D² = 2 ∂/∂z
        assert_eq!(dd, vf("2*d/dz"));
    }

    #[test]
    fn odd_field_acts_with_signs() {
        let d = vf("d/dzeta + zeta*d/dz");
        assert_eq!(d.apply(&sf("z^2 + z*zeta")).unwrap(), sf("z + 2*z*zeta"));
    }

    #[test]
    fn even_bracket_is_commutator() {
        let x = vf("z*d/dz");
        let y = vf("z^2*d/dz");
        assert_eq!(x.bracket(&y).unwrap(), vf("z^2*d/dz"));
        assert!(vf("d/dz + d/dzeta").bracket(&x).is_err());
    }

    #[test]
    fn display_round_trip() {
        let x = vf("exp(z)*zeta*d/dz + (1 + z)*d/dzeta");
        assert_eq!(
            SuperVectorField::parse(&x.to_string(), &ChartSpec::c11()).unwrap(),
            x
        );
    }
}
