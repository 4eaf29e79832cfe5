use crate::symcore::{parse_ast, Ast, Expr, Scalar, SymError};

use super::{ChartSpec, SuperError, SuperFunction, SuperOneForm, SuperVectorField};

/// A superfunction, or a left-linear combination of basis symbols
/// (∂/∂x for fields, dx for forms) listed even coordinates first.
enum Val {
    F(SuperFunction),
    L(Vec<SuperFunction>),
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Function,
    Field,
    Form,
}

struct Ctx<'a> {
    chart: &'a ChartSpec,
    params: &'a [&'a str],
    mode: Mode,
}

fn unsupported(msg: &str) -> SuperError {
    SuperError::Unsupported(msg.to_string())
}

impl Ctx<'_> {
    fn basis(&self, k: usize) -> Val {
        let c = self.chart;
        let mut v = vec![SuperFunction::zero(c); c.m() + c.n()];
        v[k] = SuperFunction::one(c);
        Val::L(v)
    }

    fn coord_slot(&self, name: &str) -> Option<usize> {
        let c = self.chart;
        c.even_index(name)
            .or_else(|| c.odd_index(name).map(|j| c.m() + j))
    }

    fn ident(&self, name: &str, pos: usize) -> Result<Val, SuperError> {
        let c = self.chart;
        if c.even_index(name).is_some() || c.odd_index(name).is_some() {
            return Ok(Val::F(SuperFunction::coord(c, name)?));
        }
        if self.params.contains(&name) {
            return Ok(Val::F(SuperFunction::even_expr(c, &Expr::var(name))?));
        }
        if name == "i" {
            return Ok(Val::F(SuperFunction::constant(c, Scalar::i())));
        }
        if self.mode == Mode::Form {
            if let Some(k) = name.strip_prefix('d').and_then(|x| self.coord_slot(x)) {
                return Ok(self.basis(k));
            }
        }
        Err(SymError::UnknownIdentifier {
            name: name.to_string(),
            pos,
        }
        .into())
    }

    fn eval(&self, ast: &Ast) -> Result<Val, SuperError> {
        let c = self.chart;
        Ok(match ast {
            Ast::Num(x) => Val::F(SuperFunction::constant(c, x.clone())),
            Ast::Ident(n, pos) => self.ident(n, *pos)?,
            Ast::Partial(n, pos) => match (self.mode, self.coord_slot(n)) {
                (Mode::Field, Some(k)) => self.basis(k),
                _ => {
                    return Err(SymError::UnknownIdentifier {
                        name: format!("d/d{n}"),
                        pos: *pos,
                    }
                    .into())
                }
            },
            Ast::Call(name, arg, pos) => {
                let Val::F(a) = self.eval(arg)? else {
                    return Err(unsupported("function of a basis symbol"));
                };
                // Validates the name through the even-expression path.
                let probe = crate::symcore::ast_to_expr(
                    &Ast::Call(name.clone(), Box::new(Ast::Num(Scalar::one())), *pos),
                    &Default::default(),
                )?;
                Val::F(match probe {
                    Expr::Exp(_) => a.apply_fn(&|x| x.exp())?,
                    Expr::Log(_) => a.apply_fn(&|x| x.log())?,
                    Expr::Sqrt(_) => a.apply_fn(&|x| x.sqrt())?,
                    _ => a.apply_fn(&|x| Expr::opaque_unchecked(name, x))?,
                })
            }
            Ast::Add(a, b) => add(self.eval(a)?, self.eval(b)?)?,
            Ast::Sub(a, b) => add(self.eval(a)?, neg(self.eval(b)?))?,
            Ast::Neg(a) => neg(self.eval(a)?),
            Ast::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Val::F(x), Val::F(y)) => Val::F(x.mul(&y)?),
                (Val::F(x), Val::L(v)) => {
                    Val::L(v.iter().map(|y| x.mul(y)).collect::<Result<_, _>>()?)
                }
                _ => {
                    return Err(unsupported(
                        "coefficients must stand to the left of basis symbols",
                    ))
                }
            },
            Ast::Div(a, b) => {
                let Val::F(d) = self.eval(b)? else {
                    return Err(unsupported("division by a basis symbol"));
                };
                let inv = d.inv()?;
                match self.eval(a)? {
                    Val::F(x) => Val::F(x.mul(&inv)?),
                    Val::L(v) if inv.has_parity(crate::grassmann::Parity::Even) => {
                        Val::L(v.iter().map(|y| inv.mul(y)).collect::<Result<_, _>>()?)
                    }
                    Val::L(_) => return Err(unsupported("odd divisor of a basis symbol")),
                }
            }
            Ast::Pow(a, n) => match self.eval(a)? {
                Val::F(x) => Val::F(x.powi(*n)?),
                Val::L(_) => return Err(unsupported("power of a basis symbol")),
            },
        })
    }
}

fn neg(v: Val) -> Val {
    match v {
        Val::F(x) => Val::F(x.neg()),
        Val::L(v) => Val::L(v.iter().map(SuperFunction::neg).collect()),
    }
}

fn add(a: Val, b: Val) -> Result<Val, SuperError> {
    Ok(match (a, b) {
        (Val::F(x), Val::F(y)) => Val::F(x.add(&y)?),
        (Val::L(x), Val::L(y)) => Val::L(
            x.iter()
                .zip(&y)
                .map(|(p, q)| p.add(q))
                .collect::<Result<_, _>>()?,
        ),
        (Val::F(x), l @ Val::L(_)) | (l @ Val::L(_), Val::F(x)) if x.is_zero() => l,
        _ => return Err(unsupported("sum mixes functions and basis symbols")),
    })
}

fn run(text: &str, chart: &ChartSpec, params: &[&str], mode: Mode) -> Result<Val, SuperError> {
    let ast = parse_ast(text, mode == Mode::Field)?;
    Ctx {
        chart,
        params,
        mode,
    }
    .eval(&ast)
}

pub(super) fn parse_function(
    text: &str,
    chart: &ChartSpec,
    params: &[&str],
) -> Result<SuperFunction, SuperError> {
    match run(text, chart, params, Mode::Function)? {
        Val::F(f) => Ok(f),
        Val::L(_) => Err(unsupported("expected a superfunction")),
    }
}

fn split(
    chart: &ChartSpec,
    v: Val,
) -> Result<(Vec<SuperFunction>, Vec<SuperFunction>), SuperError> {
    match v {
        Val::L(mut v) => {
            let odd = v.split_off(chart.m());
            Ok((v, odd))
        }
        Val::F(f) if f.is_zero() => Ok((
            vec![SuperFunction::zero(chart); chart.m()],
            vec![SuperFunction::zero(chart); chart.n()],
        )),
        Val::F(_) => Err(unsupported("expected a combination of basis symbols")),
    }
}

pub(super) fn parse_field(
    text: &str,
    chart: &ChartSpec,
    params: &[&str],
) -> Result<SuperVectorField, SuperError> {
    let (dz, dzeta) = split(chart, run(text, chart, params, Mode::Field)?)?;
    SuperVectorField::new(chart, dz, dzeta)
}

pub(super) fn parse_form(
    text: &str,
    chart: &ChartSpec,
    params: &[&str],
) -> Result<SuperOneForm, SuperError> {
    let (dz, dzeta) = split(chart, run(text, chart, params, Mode::Form)?)?;
    SuperOneForm::new(chart, dz, dzeta)
}
