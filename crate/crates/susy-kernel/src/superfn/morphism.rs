use crate::grassmann::{mask_indices, Parity};
use crate::symcore::{to_ratfunc, Expr, RatFunc};

use super::{exterior_d, ChartSpec, SuperError, SuperFunction, SuperOneForm};

/// A map of charts F: source → target, stored as the pullbacks of the
/// target coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChartMorphism {
    pub source: ChartSpec,
    pub target: ChartSpec,
    pub even: Vec<SuperFunction>,
    pub odd: Vec<SuperFunction>,
}

impl ChartMorphism {
    pub fn new(
        source: &ChartSpec,
        target: &ChartSpec,
        even: Vec<SuperFunction>,
        odd: Vec<SuperFunction>,
    ) -> Result<Self, SuperError> {
        if even.len() != target.m() || odd.len() != target.n() {
            return Err(SuperError::ChartMismatch(
                "assignment count differs from target".into(),
            ));
        }
        for (list, p) in [(&even, Parity::Even), (&odd, Parity::Odd)] {
            for f in list {
                source.check(f.chart())?;
                if !f.has_parity(p) {
                    return Err(SuperError::WrongParity(p));
                }
            }
        }
        Ok(ChartMorphism {
            source: source.clone(),
            target: target.clone(),
            even,
            odd,
        })
    }

    pub fn identity(chart: &ChartSpec) -> Self {
        let even = chart
            .even
            .iter()
            .map(|v| SuperFunction::coord(chart, v).expect("coordinate"))
            .collect();
        let odd = (0..chart.n())
            .map(|j| SuperFunction::odd_coord(chart, j))
            .collect();
        ChartMorphism {
            source: chart.clone(),
            target: chart.clone(),
            even,
            odd,
        }
    }

    /// Parses target-coordinate pullbacks written in the source coordinates.
    pub fn parse(
        source: &ChartSpec,
        target: &ChartSpec,
        even: &[&str],
        odd: &[&str],
        params: &[&str],
    ) -> Result<Self, SuperError> {
        let p = |s: &&str| SuperFunction::parse_with(s, source, params);
        let even = even.iter().map(p).collect::<Result<_, _>>()?;
        let odd = odd.iter().map(p).collect::<Result<_, _>>()?;
        ChartMorphism::new(source, target, even, odd)
    }

    /// F*(x) for a target coordinate name.
    pub fn coord_pullback(&self, name: &str) -> Option<&SuperFunction> {
        if let Some(i) = self.target.even_index(name) {
            Some(&self.even[i])
        } else {
            self.target.odd_index(name).map(|j| &self.odd[j])
        }
    }

    fn even_assignment(&self, v: &str) -> Option<&SuperFunction> {
        self.target.even_index(v).map(|i| &self.even[i])
    }

    /// F* of an even coefficient function on the target.
    pub fn pullback_coeff(&self, f: &RatFunc) -> Result<SuperFunction, SuperError> {
        if self.even.iter().all(|g| g.nilpotent().is_zero()) {
            // Reduced substitution suffices when no nilpotent shift appears.
            let e = f
                .to_expr()
                .map_vars(&|v| self.even_assignment(v).map(|g| g.body().to_expr()));
            return Ok(SuperFunction::from_ratfunc(&self.source, to_ratfunc(&e)?));
        }
        self.eval_expr(&f.to_expr())
    }

    fn eval_expr(&self, e: &Expr) -> Result<SuperFunction, SuperError> {
        let src = &self.source;
        let go = |a: &Expr| self.eval_expr(a);
        Ok(match e {
            Expr::Const(c) => SuperFunction::constant(src, c.clone()),
            Expr::Var(v) => match self.even_assignment(v) {
                Some(g) => g.clone(),
                None => SuperFunction::even_expr(src, e)?,
            },
            Expr::Add(xs) => {
                let mut acc = SuperFunction::zero(src);
                for x in xs {
                    acc = acc.add(&go(x)?)?;
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc = SuperFunction::one(src);
                for x in xs {
                    acc = acc.mul(&go(x)?)?;
                }
                acc
            }
            Expr::Pow(b, n) => go(b)?.powi(*n)?,
            Expr::Div(a, b) => go(a)?.mul(&go(b)?.inv()?)?,
            Expr::Exp(a) => go(a)?.apply_fn(&|x| x.exp())?,
            Expr::Log(a) => go(a)?.apply_fn(&|x| x.log())?,
            Expr::Sqrt(a) => go(a)?.apply_fn(&|x| x.sqrt())?,
            Expr::Opaque(name, a) => go(a)?.apply_fn(&|x| Expr::opaque_unchecked(name, x))?,
        })
    }
}

impl ChartMorphism {
    /// Coordinate-map view, e.g. `(u, xi) ↦ (1/u, (1/u)*xi)`.
    pub fn map_view(&self) -> String {
        let src: Vec<&str> = self
            .source
            .even
            .iter()
            .chain(&self.source.odd)
            .map(String::as_str)
            .collect();
        let img: Vec<String> = self
            .even
            .iter()
            .chain(&self.odd)
            .map(ToString::to_string)
            .collect();
        format!("({}) ↦ ({})", src.join(", "), img.join(", "))
    }

    /// Pullback view, one `x* = ...` line per target coordinate.
    pub fn pullback_view(&self) -> String {
        let names = self.target.even.iter().chain(&self.target.odd);
        names
            .zip(self.even.iter().chain(&self.odd))
            .map(|(n, f)| format!("{n}* = {f}"))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// F*(f) = Σ_I F*(f_I)·F*(ζ)^I.
pub fn pullback_fn(m: &ChartMorphism, f: &SuperFunction) -> Result<SuperFunction, SuperError> {
    m.target.check(f.chart())?;
    let mut acc = SuperFunction::zero(&m.source);
    for (mask, c) in f.terms() {
        let mut t = m.pullback_coeff(c)?;
        for j in mask_indices(mask) {
            t = t.mul(&m.odd[j - 1])?;
        }
        acc = acc.add(&t)?;
    }
    Ok(acc)
}

/// F*(Σ ω_a dx_a): the dy_b coefficient is Σ_a ∂_b(F*x_a)·F*(ω_a), the
/// left-derivative chain rule, so that F*(dh) = d(F*h).
pub fn pullback_form(m: &ChartMorphism, w: &SuperOneForm) -> Result<SuperOneForm, SuperError> {
    m.target.check(&w.chart)?;
    let mut acc = SuperOneForm::zero(&m.source);
    let pairs = w.dz.iter().zip(&m.even).chain(w.dzeta.iter().zip(&m.odd));
    for (coef, x) in pairs {
        if coef.is_zero() {
            continue;
        }
        let dx = exterior_d(x)?;
        let c = pullback_fn(m, coef)?;
        let right =
            |v: &[SuperFunction]| v.iter().map(|a| a.mul(&c)).collect::<Result<Vec<_>, _>>();
        acc = acc.add(&SuperOneForm::new(
            &m.source,
            right(&dx.dz)?,
            right(&dx.dzeta)?,
        )?)?;
    }
    Ok(acc)
}

/// The morphism "G, then F" at the level of points, so (F∘G)* = G*∘F*.
pub fn compose(f: &ChartMorphism, g: &ChartMorphism) -> Result<ChartMorphism, SuperError> {
    g.target.check(&f.source)?;
    let even = f
        .even
        .iter()
        .map(|x| pullback_fn(g, x))
        .collect::<Result<_, _>>()?;
    let odd = f
        .odd
        .iter()
        .map(|x| pullback_fn(g, x))
        .collect::<Result<_, _>>()?;
    ChartMorphism::new(&g.source, &f.target, even, odd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c11() -> ChartSpec {
        ChartSpec::c11()
    }

    fn sf(s: &str) -> SuperFunction {
        SuperFunction::parse(s, &c11()).unwrap()
    }

    fn fg(f: &str, g: &str) -> ChartMorphism {
        let c = c11();
        ChartMorphism::parse(&c, &c, &[f], &[&format!("({g})*zeta")], &[]).unwrap()
    }

    #[test]
    fn superconformal_pullback_of_omega() {
        let m = fg("z^2 + 1", "exp(z)");
        let w = SuperOneForm::parse("dz - zeta*dzeta", &c11()).unwrap();
        let expected = SuperOneForm::parse("2*z*dz - exp(2*z)*zeta*dzeta", &c11()).unwrap();
        assert_eq!(pullback_form(&m, &w).unwrap(), expected);
    }

    #[test]
    fn nilpotent_shift_uses_taylor_expansion() {
        let c = ChartSpec::new(["z"], ["a", "b"]).unwrap();
        let m = ChartMorphism::parse(&c, &c, &["z + a*b"], &["a", "b"], &[]).unwrap();
        let f = SuperFunction::parse("exp(z)", &c).unwrap();
        let expect = SuperFunction::parse("exp(z) + exp(z)*a*b", &c).unwrap();
        assert_eq!(pullback_fn(&m, &f).unwrap(), expect);
    }

    #[test]
    fn composition_is_functorial() {
        let f = fg("1/z", "1/z");
        let g = fg("z + 2", "3");
        let h = compose(&f, &g).unwrap();
        let x = sf("z^2 + z*zeta");
        let lhs = pullback_fn(&h, &x).unwrap();
        let rhs = pullback_fn(&g, &pullback_fn(&f, &x).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(h.even[0], sf("1/(z + 2)"));
    }

    #[test]
    fn identity_acts_trivially() {
        let id = ChartMorphism::identity(&c11());
        let x = sf("exp(z) + z*zeta");
        assert_eq!(pullback_fn(&id, &x).unwrap(), x);
    }
}
