//! Expression trees and differentiation.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use super::opaque::OpaqueRegistry;
use super::scalar::Scalar;
use super::SymError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Const(Scalar),
    Var(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Div(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sqrt(Box<Expr>),
    Opaque(Arc<str>, Box<Expr>),
}

impl Expr {
    pub fn constant(c: Scalar) -> Self {
        Expr::Const(c)
    }

    pub fn int(n: i64) -> Self {
        Expr::Const(Scalar::int(n))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Self {
        Expr::Var(Arc::from(name))
    }

    pub fn exp(self) -> Self {
        Expr::Exp(Box::new(self))
    }

    pub fn log(self) -> Self {
        Expr::Log(Box::new(self))
    }

    pub fn sqrt(self) -> Self {
        Expr::Sqrt(Box::new(self))
    }

    pub fn pow(self, n: i64) -> Self {
        match n {
            0 => Expr::one(),
            1 => self,
            _ => Expr::Pow(Box::new(self), n),
        }
    }

    pub fn recip(self) -> Self {
        Expr::one() / self
    }

    /// Applies a registered opaque function.
    pub fn opaque(name: &str, arg: Expr) -> Result<Self, SymError> {
        if !OpaqueRegistry::global().contains(name) {
            return Err(SymError::UnknownFunction(name.to_string()));
        }
        Ok(Expr::opaque_unchecked(name, arg))
    }

    pub(crate) fn opaque_unchecked(name: &str, arg: Expr) -> Self {
        Expr::Opaque(Arc::from(name), Box::new(arg))
    }

    pub fn as_const(&self) -> Option<&Scalar> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_const_zero(&self) -> bool {
        self.as_const().is_some_and(Scalar::is_zero)
    }

    pub fn is_const_one(&self) -> bool {
        self.as_const().is_some_and(Scalar::is_one)
    }

    /// True when `v` occurs anywhere in the tree.
    pub fn contains_var(&self, v: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(n) => &**n == v,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().any(|x| x.contains_var(v)),
            Expr::Pow(b, _) => b.contains_var(v),
            Expr::Div(a, b) => a.contains_var(v) || b.contains_var(v),
            Expr::Exp(a) | Expr::Log(a) | Expr::Sqrt(a) | Expr::Opaque(_, a) => a.contains_var(v),
        }
    }

    pub fn vars(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(n) => {
                out.insert(n.to_string());
            }
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.vars(out)),
            Expr::Pow(b, _) => b.vars(out),
            Expr::Div(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Expr::Exp(a) | Expr::Log(a) | Expr::Sqrt(a) | Expr::Opaque(_, a) => a.vars(out),
        }
    }

    /// True when the tree uses only constants, variables and field operations.
    pub fn is_rational(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().all(Expr::is_rational),
            Expr::Pow(b, _) => b.is_rational(),
            Expr::Div(a, b) => a.is_rational() && b.is_rational(),
            _ => false,
        }
    }

    /// Replaces every occurrence of variable `v` by `by`.
    pub fn subst(&self, v: &str, by: &Expr) -> Expr {
        self.map_vars(&|n| (n == v).then(|| by.clone()))
    }

    /// Simultaneous substitution; `f` returns `None` to keep a variable.
    pub fn map_vars(&self, f: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(n) => f(n).unwrap_or_else(|| self.clone()),
            Expr::Add(xs) => Expr::Add(xs.iter().map(|x| x.map_vars(f)).collect()),
            Expr::Mul(xs) => Expr::Mul(xs.iter().map(|x| x.map_vars(f)).collect()),
            Expr::Pow(b, n) => Expr::Pow(Box::new(b.map_vars(f)), *n),
            Expr::Div(a, b) => Expr::Div(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Exp(a) => Expr::Exp(Box::new(a.map_vars(f))),
            Expr::Log(a) => Expr::Log(Box::new(a.map_vars(f))),
            Expr::Sqrt(a) => Expr::Sqrt(Box::new(a.map_vars(f))),
            Expr::Opaque(n, a) => Expr::Opaque(n.clone(), Box::new(a.map_vars(f))),
        }
    }

    /// Symbolic derivative with respect to `v`. The result is not normalized.
    pub fn diff(&self, v: &str) -> Expr {
        if !self.contains_var(v) {
            return Expr::zero();
        }
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(_) => Expr::one(),
            Expr::Add(xs) => xs.iter().fold(Expr::zero(), |acc, x| acc + x.diff(v)),
            Expr::Mul(xs) => {
                let mut total = Expr::zero();
                for (k, xk) in xs.iter().enumerate() {
                    if !xk.contains_var(v) {
                        continue;
                    }
                    let mut term = xk.diff(v);
                    for (j, xj) in xs.iter().enumerate() {
                        if j != k {
                            term = term * xj.clone();
                        }
                    }
                    total = total + term;
                }
                total
            }
            Expr::Pow(b, n) => Expr::int(*n) * (**b).clone().pow(n - 1) * b.diff(v),
            Expr::Div(a, b) => {
                let num = a.diff(v) * (**b).clone() - (**a).clone() * b.diff(v);
                num / (**b).clone().pow(2)
            }
            Expr::Exp(a) => self.clone() * a.diff(v),
            Expr::Log(a) => a.diff(v) / (**a).clone(),
            Expr::Sqrt(a) => a.diff(v) / (Expr::int(2) * self.clone()),
            Expr::Opaque(name, a) => {
                let rule = OpaqueRegistry::global()
                    .get(name)
                    .expect("opaque symbols are registered at construction");
                (rule.derivative)(a) * a.diff(v)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_) => 1,
            Expr::Mul(_) | Expr::Div(..) => 2,
            Expr::Const(c) => {
                if c.is_real() && c.re.is_integer() && c.re >= num_rational::BigRational::default()
                {
                    4
                } else {
                    2
                }
            }
            Expr::Pow(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Add(xs) if xs.is_empty() => write!(f, "0"),
            Expr::Add(xs) => {
                for (k, x) in xs.iter().enumerate() {
                    match (k, negated_term(x)) {
                        (0, _) => x.fmt_prec(f, 1)?,
                        (_, Some(pos)) => {
                            write!(f, " - ")?;
                            pos.fmt_prec(f, 2)?;
                        }
                        (_, None) => {
                            write!(f, " + ")?;
                            x.fmt_prec(f, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Mul(xs) if xs.is_empty() => write!(f, "1"),
            Expr::Mul(xs) => {
                let xs = match xs.split_first() {
                    Some((Expr::Const(c), rest)) if c == &Scalar::int(-1) && !rest.is_empty() => {
                        write!(f, "-")?;
                        rest
                    }
                    _ => &xs[..],
                };
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    x.fmt_prec(f, if k == 0 { 2 } else { 3 })?;
                }
                Ok(())
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)
            }
            Expr::Pow(b, n) => {
                b.fmt_prec(f, 4)?;
                write!(f, "^{n}")
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Opaque(n, a) => write!(f, "{n}({a})"),
        }
    }
}

/// For a term printed after a minus sign: returns the positive counterpart.
fn negated_term(x: &Expr) -> Option<Expr> {
    match x {
        Expr::Const(c) if c.is_real() && c.re < Default::default() => Some(Expr::Const(-c)),
        Expr::Mul(xs) => match xs.first() {
            Some(Expr::Const(c)) if c.is_real() && c.re < Default::default() => {
                let mut rest = xs.clone();
                if c == &Scalar::int(-1) {
                    rest.remove(0);
                } else {
                    rest[0] = Expr::Const(-c);
                }
                Some(match rest.len() {
                    0 => Expr::one(),
                    1 => rest.pop().unwrap(),
                    _ => Expr::Mul(rest),
                })
            }
            _ => None,
        },
        _ => None,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<Scalar> for Expr {
    fn from(c: Scalar) -> Self {
        Expr::Const(c)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        if self.is_const_zero() {
            return o;
        }
        if o.is_const_zero() {
            return self;
        }
        if let (Expr::Const(a), Expr::Const(b)) = (&self, &o) {
            return Expr::Const(a + b);
        }
        let mut xs = match self {
            Expr::Add(xs) => xs,
            x => vec![x],
        };
        match o {
            Expr::Add(ys) => xs.extend(ys),
            y => xs.push(y),
        }
        Expr::Add(xs)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        if self.is_const_zero() || o.is_const_zero() {
            return Expr::zero();
        }
        if self.is_const_one() {
            return o;
        }
        if o.is_const_one() {
            return self;
        }
        if let (Expr::Const(a), Expr::Const(b)) = (&self, &o) {
            return Expr::Const(a * b);
        }
        let mut xs = match self {
            Expr::Mul(xs) => xs,
            x => vec![x],
        };
        match o {
            Expr::Mul(ys) => xs.extend(ys),
            y => xs.push(y),
        }
        Expr::Mul(xs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            x => Expr::int(-1) * x,
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        self + (-o)
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        if o.is_const_one() {
            return self;
        }
        if self.is_const_zero() {
            return Expr::zero();
        }
        if let (Expr::Const(a), Expr::Const(b)) = (&self, &o) {
            if let Some(bi) = b.inv() {
                return Expr::Const(a * &bi);
            }
        }
        Expr::Div(Box::new(self), Box::new(o))
    }
}

macro_rules! ref_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<'a> $tr<&'a Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr { self.clone().$m(o.clone()) }
        }
    )*};
}
ref_ops!(Add add, Sub sub, Mul mul, Div div);
