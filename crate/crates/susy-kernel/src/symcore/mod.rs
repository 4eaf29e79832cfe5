//! Exact symbolic scalars: Gaussian rationals, expression trees, parsing,
//! differentiation, canonical normal forms, zero testing, a restricted
//! antiderivative and numeric evaluation.

mod antideriv;
mod eval;
mod expr;
pub mod opaque;
mod parse;
pub mod poly;
mod scalar;

pub use antideriv::antiderivative;
pub use eval::{eval, is_zero, is_zero_with, Env, NoHooks, OpaqueHooks, ZeroTest, POLE_EPS};
pub use expr::Expr;
pub use parse::{ast_to_expr, parse, parse_ast, Ast};
pub use poly::{to_ratfunc, RatFunc};
pub use scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SymError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier '{name}' at {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("variable '{0}' is not in scope")]
    OutOfScope(String),
    #[error("division by an identically zero expression")]
    DivisionByZero,
    #[error("log of zero")]
    LogOfZero,
    #[error("pole encountered during evaluation")]
    Pole,
    #[error("unbound variable '{0}'")]
    UnboundVariable(String),
    #[error("no numeric hook for '{0}'")]
    UnhookedOpaque(String),
}

/// Ordered even-variable names in scope for a chart.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarRegistry {
    names: Vec<String>,
}

impl VarRegistry {
    /// Builds a registry; repeated names keep their first position.
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let n = n.into();
            if !out.contains(&n) {
                out.push(n);
            }
        }
        VarRegistry { names: out }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn with(&self, name: &str) -> Self {
        VarRegistry::new(self.names.iter().cloned().chain([name.to_string()]))
    }
}

/// Derivative with a scope check on `v`.
pub fn diff(e: &Expr, v: &str, registry: &VarRegistry) -> Result<Expr, SymError> {
    if !registry.contains(v) {
        return Err(SymError::OutOfScope(v.to_string()));
    }
    Ok(e.diff(v))
}

/// Canonical form: cancelled rational function over the analytic atoms.
pub fn normalize(e: &Expr) -> Result<Expr, SymError> {
    Ok(to_ratfunc(e)?.to_expr())
}

/// Structural equality of normal forms.
pub fn equivalent(a: &Expr, b: &Expr) -> bool {
    is_zero(&(a.clone() - b.clone())).is_yes()
}
