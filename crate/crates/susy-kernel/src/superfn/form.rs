use std::fmt;

use super::{ChartSpec, SuperError, SuperFunction, SuperVectorField};

/// ω = Σ f_i dz_i + Σ g_j dζ_j with coefficients on the left.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuperOneForm {
    pub chart: ChartSpec,
    pub dz: Vec<SuperFunction>,
    pub dzeta: Vec<SuperFunction>,
}

impl SuperOneForm {
    pub fn zero(chart: &ChartSpec) -> Self {
        SuperOneForm {
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
        Ok(SuperOneForm {
            chart: chart.clone(),
            dz,
            dzeta,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.dz
            .iter()
            .chain(&self.dzeta)
            .all(SuperFunction::is_zero)
    }

    pub fn add(&self, o: &SuperOneForm) -> Result<Self, SuperError> {
        self.chart.check(&o.chart)?;
        let sum =
            |a: &[SuperFunction], b: &[SuperFunction]| -> Result<Vec<SuperFunction>, SuperError> {
                a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
            };
        Ok(SuperOneForm {
            chart: self.chart.clone(),
            dz: sum(&self.dz, &o.dz)?,
            dzeta: sum(&self.dzeta, &o.dzeta)?,
        })
    }

    pub fn neg(&self) -> Self {
        SuperOneForm {
            chart: self.chart.clone(),
            dz: self.dz.iter().map(SuperFunction::neg).collect(),
            dzeta: self.dzeta.iter().map(SuperFunction::neg).collect(),
        }
    }

    pub fn sub(&self, o: &SuperOneForm) -> Result<Self, SuperError> {
        self.add(&o.neg())
    }

    /// f·ω.
    pub fn left_mul(&self, f: &SuperFunction) -> Result<Self, SuperError> {
        let m = |v: &[SuperFunction]| -> Result<Vec<SuperFunction>, SuperError> {
            v.iter().map(|c| f.mul(c)).collect()
        };
        Ok(SuperOneForm {
            chart: self.chart.clone(),
            dz: m(&self.dz)?,
            dzeta: m(&self.dzeta)?,
        })
    }

    pub fn parse(text: &str, chart: &ChartSpec) -> Result<Self, SuperError> {
        super::parse::parse_form(text, chart, &[])
    }

    pub fn parse_with(text: &str, chart: &ChartSpec, params: &[&str]) -> Result<Self, SuperError> {
        super::parse::parse_form(text, chart, params)
    }
}

/// df = Σ ∂f/∂z dz + Σ ∂f/∂ζ dζ.
pub fn exterior_d(f: &SuperFunction) -> Result<SuperOneForm, SuperError> {
    let c = f.chart();
    let dz = c
        .even
        .iter()
        .map(|v| f.diff_even(v))
        .collect::<Result<_, _>>()?;
    let dzeta = (0..c.n()).map(|j| f.diff_odd(j)).collect();
    SuperOneForm::new(c, dz, dzeta)
}

/// ⟨f dx, g ∂x⟩ = f·g, summed over coordinates.
pub fn pair(w: &SuperOneForm, x: &SuperVectorField) -> Result<SuperFunction, SuperError> {
    w.chart.check(&x.chart)?;
    let mut acc = SuperFunction::zero(&w.chart);
    for (a, b) in w.dz.iter().zip(&x.dz).chain(w.dzeta.iter().zip(&x.dzeta)) {
        acc = acc.add(&a.mul(b)?)?;
    }
    Ok(acc)
}

impl fmt::Display for SuperOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.chart.even.iter().chain(&self.chart.odd);
        let parts: Vec<String> = self
            .dz
            .iter()
            .chain(&self.dzeta)
            .zip(names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, n)| format!("({c})*d{n}"))
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

    fn c() -> ChartSpec {
        ChartSpec::c11()
    }

    #[test]
    fn omega_annihilates_d() {
        let w = SuperOneForm::parse("dz - zeta*dzeta", &c()).unwrap();
        let d = SuperVectorField::parse("d/dzeta + zeta*d/dz", &c()).unwrap();
        assert!(pair(&w, &d).unwrap().is_zero());
        let dz = SuperVectorField::partial(&c(), "z").unwrap();
        assert_eq!(pair(&w, &dz).unwrap(), SuperFunction::one(&c()));
    }

    #[test]
    fn exterior_derivative_of_odd_function() {
        let f = SuperFunction::parse("exp(z)*zeta", &c()).unwrap();
        let expect = SuperOneForm::parse("exp(z)*zeta*dz + exp(z)*dzeta", &c()).unwrap();
        assert_eq!(exterior_d(&f).unwrap(), expect);
    }

    #[test]
    fn display_round_trip() {
        let w = SuperOneForm::parse("z*dz - zeta*dzeta", &c()).unwrap();
        assert_eq!(SuperOneForm::parse(&w.to_string(), &c()).unwrap(), w);
    }
}
