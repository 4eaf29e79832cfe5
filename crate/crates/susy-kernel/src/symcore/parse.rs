//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' int)?
//! base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' factor
//! ```
//!
//! Numbers are decimal rationals and `i` is the imaginary unit. The same
//! syntax tree is reused for Grassmann elements, superfunctions and vector
//! fields, which add odd identifiers and `d/dx` partial symbols.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::expr::Expr;
use super::opaque::OpaqueRegistry;
use super::scalar::Scalar;
use super::{SymError, VarRegistry};

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(Scalar),
    Ident(String, usize),
    Partial(String, usize),
    Call(String, Box<Ast>, usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, i64),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Scalar),
    Ident(String),
    Partial(String),
    Op(char),
}

fn syntax(pos: usize, msg: impl Into<String>) -> SymError {
    SymError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str, partials: bool) -> Result<Vec<(Tok, usize)>, SymError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit()
            || (c == '.' && chars.get(k + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = k;
            let mut int = String::new();
            let mut frac = String::new();
            while k < chars.len() && chars[k].is_ascii_digit() {
                int.push(chars[k]);
                k += 1;
            }
            if k < chars.len() && chars[k] == '.' {
                k += 1;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    frac.push(chars[k]);
                    k += 1;
                }
            }
            let digits: BigInt = format!("{int}{frac}")
                .parse()
                .map_err(|_| syntax(start, "bad number"))?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            out.push((
                Tok::Num(Scalar::real(BigRational::new(digits, scale))),
                start,
            ));
        } else if is_ident_start(c) {
            let start = k;
            while k < chars.len() && is_ident_char(chars[k]) {
                k += 1;
            }
            let name: String = chars[start..k].iter().collect();
            // "d/dx" is a partial symbol when enabled.
            if partials
                && name == "d"
                && chars.get(k) == Some(&'/')
                && chars.get(k + 1) == Some(&'d')
                && chars.get(k + 2).is_some_and(|&c| is_ident_start(c))
            {
                let s = k + 2;
                k = s;
                while k < chars.len() && is_ident_char(chars[k]) {
                    k += 1;
                }
                out.push((Tok::Partial(chars[s..k].iter().collect()), start));
            } else {
                out.push((Tok::Ident(name), start));
            }
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), k));
            k += 1;
        } else {
            return Err(syntax(k, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), SymError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected '{op}'")))
        }
    }

    fn expr(&mut self) -> Result<Ast, SymError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast, SymError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Ast, SymError> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let paren = self.eat('(');
        let neg = self.eat('-');
        let n = match self.toks.get(self.at) {
            Some((Tok::Num(c), _)) if c.to_integer().is_some() => c.to_integer().unwrap(),
            _ => return Err(syntax(pos, "exponent must be an integer")),
        };
        self.at += 1;
        if paren {
            self.expect(')')?;
        }
        let n: i64 = i64::try_from(n).map_err(|_| syntax(pos, "exponent too large"))?;
        Ok(Ast::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn base(&mut self) -> Result<Ast, SymError> {
        let pos = self.pos();
        let tok = self.toks.get(self.at).map(|(t, _)| t.clone());
        match tok {
            Some(Tok::Num(c)) => {
                self.at += 1;
                Ok(Ast::Num(c))
            }
            Some(Tok::Partial(n)) => {
                self.at += 1;
                Ok(Ast::Partial(n, pos))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if self.eat('(') {
                    let arg = self.expr()?;
                    self.expect(')')?;
                    Ok(Ast::Call(name, Box::new(arg), pos))
                } else {
                    Ok(Ast::Ident(name, pos))
                }
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.at += 1;
                Ok(Ast::Neg(Box::new(self.factor()?)))
            }
            Some(t) => Err(syntax(pos, format!("unexpected token {t:?}"))),
            None => Err(syntax(pos, "unexpected end of input")),
        }
    }
}

/// Largest total degree an input may reach once powers are expanded.
pub const MAX_DEGREE: u64 = 64;

/// Upper bound on the expanded degree, saturating.
fn degree_bound(a: &Ast) -> u64 {
    match a {
        Ast::Num(_) => 0,
        Ast::Ident(..) | Ast::Partial(..) => 1,
        Ast::Call(_, arg, _) => degree_bound(arg).max(1),
        Ast::Add(x, y) | Ast::Sub(x, y) => degree_bound(x).max(degree_bound(y)),
        Ast::Mul(x, y) | Ast::Div(x, y) => degree_bound(x).saturating_add(degree_bound(y)),
        Ast::Neg(x) => degree_bound(x),
        Ast::Pow(x, n) => degree_bound(x).saturating_mul(n.unsigned_abs()),
    }
}

/// Parses `text` into a syntax tree. `partials` enables `d/dx` symbols.
pub fn parse_ast(text: &str, partials: bool) -> Result<Ast, SymError> {
    let toks = tokenize(text, partials)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.chars().count(),
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(syntax(p.pos(), "trailing input"));
    }
    if degree_bound(&e) > MAX_DEGREE {
        return Err(syntax(0, format!("expanded degree exceeds {MAX_DEGREE}")));
    }
    Ok(e)
}

/// Interprets a syntax tree as an even expression over `registry`.
pub fn ast_to_expr(ast: &Ast, registry: &VarRegistry) -> Result<Expr, SymError> {
    let go = |a: &Ast| ast_to_expr(a, registry);
    Ok(match ast {
        Ast::Num(c) => Expr::Const(c.clone()),
        Ast::Ident(n, pos) => {
            if registry.contains(n) {
                Expr::var(n)
            } else if n == "i" {
                Expr::Const(Scalar::i())
            } else {
                return Err(SymError::UnknownIdentifier {
                    name: n.clone(),
                    pos: *pos,
                });
            }
        }
        Ast::Partial(n, pos) => {
            return Err(SymError::UnknownIdentifier {
                name: format!("d/d{n}"),
                pos: *pos,
            })
        }
        Ast::Call(f, arg, pos) => {
            let a = go(arg)?;
            match f.as_str() {
                "exp" => a.exp(),
                "log" => a.log(),
                "sqrt" => a.sqrt(),
                _ if OpaqueRegistry::global().contains(f) => Expr::opaque_unchecked(f, a),
                _ => {
                    return Err(SymError::UnknownIdentifier {
                        name: format!("{f}()"),
                        pos: *pos,
                    })
                }
            }
        }
        Ast::Add(a, b) => go(a)? + go(b)?,
        Ast::Sub(a, b) => go(a)? - go(b)?,
        Ast::Mul(a, b) => go(a)? * go(b)?,
        Ast::Div(a, b) => go(a)? / go(b)?,
        Ast::Neg(a) => -go(a)?,
        Ast::Pow(a, n) => go(a)?.pow(*n),
    })
}

/// Parses an even expression whose free names come from `registry`.
pub fn parse(text: &str, registry: &VarRegistry) -> Result<Expr, SymError> {
    ast_to_expr(&parse_ast(text, false)?, registry)
}

#[cfg(test)]
fn rational(n: i64, d: i64) -> Scalar {
    Scalar::real(BigRational::new(n.into(), d.into()))
}

impl Scalar {
    /// Parses a Gaussian-rational constant such as `1/4 + 2*i`.
    pub fn parse(text: &str) -> Result<Scalar, SymError> {
        let e = parse(text, &VarRegistry::default())?;
        super::poly::to_ratfunc(&e)?
            .as_constant()
            .ok_or_else(|| syntax(0, "not a constant"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> VarRegistry {
        VarRegistry::new(["u", "z", "x", "g2", "g3"])
    }

    #[test]
    fn expanded_degree_is_bounded() {
        assert!(parse("(z+1)^64", &reg()).is_ok());
        assert!(parse("z^65", &reg()).is_err());
        assert!(parse("((z+1)^100)^100", &reg()).is_err());
        assert!(parse("z^999999999", &reg()).is_err());
    }

    #[test]
    fn stated_shapes() {
        assert_eq!(
            parse("1/u", &reg()).unwrap(),
            Expr::Div(Box::new(Expr::one()), Box::new(Expr::var("u")))
        );
        let e = parse("exp(z) + 2*z^3", &reg()).unwrap();
        assert_eq!(
            e,
            Expr::Add(vec![
                Expr::var("z").exp(),
                Expr::Mul(vec![Expr::int(2), Expr::Pow(Box::new(Expr::var("z")), 3)])
            ])
        );
    }

    #[test]
    fn decimals_and_imaginary_unit() {
        assert_eq!(Scalar::parse("1.25").unwrap(), rational(5, 4));
        assert_eq!(
            Scalar::parse("1/4 + 2*i").unwrap(),
            Scalar::gauss((1, 4), (2, 1))
        );
        assert_eq!(Scalar::parse("-i^2").unwrap(), Scalar::one());
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse("-u^2", &reg()).unwrap();
        assert_eq!(e, -Expr::var("u").pow(2));
        let e = parse("u^-2", &reg()).unwrap();
        assert_eq!(e, Expr::var("u").pow(-2));
        let e = parse("2 - u - 1", &reg()).unwrap();
        let r = super::super::poly::to_ratfunc(&e).unwrap();
        assert_eq!(
            r,
            super::super::poly::to_ratfunc(&(Expr::one() - Expr::var("u"))).unwrap()
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse("u + * 2", &reg()) {
            Err(SymError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse("u + w", &reg()) {
            Err(SymError::UnknownIdentifier { name, pos }) => {
                assert_eq!((name.as_str(), pos), ("w", 4))
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("foo(u)", &reg()).is_err());
        assert!(parse("(u", &reg()).is_err());
        assert!(parse("u^1.5", &reg()).is_err());
        assert!(parse("u $", &reg()).is_err());
    }

    #[test]
    fn partial_tokens_only_when_enabled() {
        assert!(matches!(parse_ast("d/dz", true).unwrap(), Ast::Partial(ref n, 0) if n == "z"));
        assert!(matches!(parse_ast("d/dz", false).unwrap(), Ast::Div(..)));
    }
}
