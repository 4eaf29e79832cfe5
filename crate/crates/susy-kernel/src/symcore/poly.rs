//! Canonical rational-function normal form.
//!
//! An expression is brought to `num/den` where both are polynomials over
//! Gaussian rationals in *atoms* (variables, logs, square roots, opaque
//! applications) times exponential factors `exp(E)`. Exponentials multiply by
//! adding exponents, `sqrt(x)^2` is rewritten to `x`, and numerator and
//! denominator are cancelled by a multivariate gcd whenever no exponential
//! factor survives in the denominator.

use std::collections::{BTreeMap, BTreeSet};

use super::expr::Expr;
use super::scalar::Scalar;
use super::SymError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Atom {
    Var(String),
    Log(Box<RatFunc>),
    Sqrt(Box<RatFunc>),
    Opaque(String, Box<RatFunc>),
}

impl Atom {
    fn to_expr(&self) -> Expr {
        match self {
            Atom::Var(n) => Expr::var(n),
            Atom::Log(a) => a.to_expr().log(),
            Atom::Sqrt(a) => a.to_expr().sqrt(),
            Atom::Opaque(n, a) => Expr::opaque_unchecked(n, a.to_expr()),
        }
    }

    fn mentions(&self, v: &str) -> bool {
        match self {
            Atom::Var(n) => n == v,
            Atom::Log(a) | Atom::Sqrt(a) | Atom::Opaque(_, a) => a.mentions(v),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial {
    pub powers: BTreeMap<Atom, u32>,
    /// Exponent `E` of an `exp(E)` factor; `None` means no such factor.
    pub exp: Option<Box<RatFunc>>,
}

impl Monomial {
    fn one() -> Self {
        Monomial::default()
    }

    fn atom(a: Atom) -> Self {
        let mut powers = BTreeMap::new();
        powers.insert(a, 1);
        Monomial { powers, exp: None }
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let mut powers = self.powers.clone();
        for (a, p) in &o.powers {
            *powers.entry(a.clone()).or_insert(0) += p;
        }
        let exp = match (&self.exp, &o.exp) {
            (None, None) => None,
            (Some(e), None) | (None, Some(e)) => Some(e.clone()),
            (Some(a), Some(b)) => {
                let s = a.add(b);
                (!s.is_zero()).then(|| Box::new(s))
            }
        };
        Monomial { powers, exp }
    }

    fn to_expr(&self) -> Expr {
        let mut factors: Vec<Expr> = self
            .powers
            .iter()
            .map(|(a, p)| a.to_expr().pow(*p as i64))
            .collect();
        if let Some(e) = &self.exp {
            factors.push(e.to_expr().exp());
        }
        match factors.len() {
            0 => Expr::one(),
            1 => factors.pop().unwrap(),
            _ => Expr::Mul(factors),
        }
    }

    fn mentions(&self, v: &str) -> bool {
        self.powers.keys().any(|a| a.mentions(v))
            || self.exp.as_ref().is_some_and(|e| e.mentions(v))
    }

    fn is_pure(&self) -> bool {
        self.exp.is_none() && self.powers.keys().all(|a| matches!(a, Atom::Var(_)))
    }
}

/// Sparse polynomial: monomial → nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m == &Monomial::one()).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }

    fn mul_monomial(&self, m: &Monomial) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            r.add_term(m1.mul(m), c1.clone());
        }
        r
    }

    fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = Vec::new();
        // Descending order reads naturally (highest powers first).
        for (m, c) in self.terms.iter().rev() {
            let me = m.to_expr();
            terms.push(if c.is_one() {
                me
            } else if me.is_const_one() {
                Expr::Const(c.clone())
            } else {
                match me {
                    Expr::Mul(mut xs) => {
                        xs.insert(0, Expr::Const(c.clone()));
                        Expr::Mul(xs)
                    }
                    x => Expr::Mul(vec![Expr::Const(c.clone()), x]),
                }
            });
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::Add(terms),
        }
    }

    pub fn mentions(&self, v: &str) -> bool {
        self.terms.keys().any(|m| m.mentions(v))
    }

    fn is_pure(&self) -> bool {
        self.terms.keys().all(Monomial::is_pure)
    }

    fn has_exp(&self) -> bool {
        self.terms.keys().any(|m| m.exp.is_some())
    }

    fn atoms(&self, out: &mut BTreeSet<Atom>) {
        for m in self.terms.keys() {
            out.extend(m.powers.keys().cloned());
        }
    }

    fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(Scalar::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Canonical quotient `num/den`; `den` is monic in its leading monomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc::constant(Scalar::zero())
    }

    pub fn one() -> Self {
        RatFunc::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        RatFunc {
            num: Poly::constant(c),
            den: Poly::constant(Scalar::one()),
        }
    }

    fn atom(a: Atom) -> Self {
        RatFunc {
            num: Poly::monomial(Monomial::atom(a), Scalar::one()),
            den: Poly::constant(Scalar::one()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(&n / &d)
    }

    /// True when no atom, argument or exponent mentions variable `v`.
    pub fn mentions(&self, v: &str) -> bool {
        self.num.mentions(v) || self.den.mentions(v)
    }

    /// True when only variables occur (no exp, log, sqrt or opaque symbols).
    pub fn is_pure_rational(&self) -> bool {
        self.num.is_pure() && self.den.is_pure()
    }

    /// True when the only transcendental content is exponentials of pure rational exponents.
    pub fn is_exp_rational(&self) -> bool {
        let ok = |p: &Poly| {
            p.terms.keys().all(|m| {
                m.powers.keys().all(|a| matches!(a, Atom::Var(_)))
                    && m.exp.as_ref().is_none_or(|e| e.is_exp_rational())
            })
        };
        ok(&self.num) && ok(&self.den)
    }

    fn build(num: Poly, den: Poly) -> Result<Self, SymError> {
        if den.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(canonicalize(num, den))
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return canonicalize(self.num.add(&o.num), self.den.clone());
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        canonicalize(num, self.den.mul(&o.den))
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        canonicalize(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Result<RatFunc, SymError> {
        RatFunc::build(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc, SymError> {
        if o.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(canonicalize(self.num.mul(&o.den), self.den.mul(&o.num)))
    }

    pub fn powi(&self, n: i64) -> Result<RatFunc, SymError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        Ok(canonicalize(base.num.pow(k), base.den.pow(k)))
    }

    pub fn to_expr(&self) -> Expr {
        let n = self.num.to_expr();
        match self.den.as_constant() {
            Some(d) if d.is_one() => n,
            _ => Expr::Div(Box::new(n), Box::new(self.den.to_expr())),
        }
    }

    pub(crate) fn num_terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.num.terms.iter()
    }
}

/// Builds the canonical quotient; `den` must be nonzero.
fn canonicalize(num: Poly, den: Poly) -> RatFunc {
    let (mut num, mut den) = reduce_sqrt_powers(num, den);
    if num.is_zero() {
        return RatFunc::zero();
    }
    // Clear the exponential factor of the leading denominator term.
    if let Some((m, _)) = den.leading() {
        if let Some(e) = &m.exp {
            let shift = Monomial {
                powers: BTreeMap::new(),
                exp: Some(Box::new(e.neg())),
            };
            num = num.mul_monomial(&shift);
            den = den.mul_monomial(&shift);
        }
    }
    // Remove the common monomial content.
    let mut common: Option<BTreeMap<Atom, u32>> = None;
    for m in num.terms.keys().chain(den.terms.keys()) {
        common = Some(match common {
            None => m.powers.clone(),
            Some(c) => c
                .into_iter()
                .filter_map(|(a, p)| m.powers.get(&a).map(|q| (a, p.min(*q))))
                .collect(),
        });
    }
    if let Some(c) = common.filter(|c| !c.is_empty()) {
        let strip = |p: &Poly| Poly {
            terms: p
                .terms
                .iter()
                .map(|(m, k)| {
                    let mut m = m.clone();
                    for (a, q) in &c {
                        let e = m.powers.get_mut(a).unwrap();
                        *e -= q;
                        if *e == 0 {
                            m.powers.remove(a);
                        }
                    }
                    (m, k.clone())
                })
                .collect(),
        };
        num = strip(&num);
        den = strip(&den);
    }
    if den.as_constant().is_none() && !num.has_exp() && !den.has_exp() {
        let g = gcd::gcd(&num, &den);
        if g.as_constant().is_none() {
            num = gcd::div_exact(&num, &g).expect("gcd divides numerator");
            den = gcd::div_exact(&den, &g).expect("gcd divides denominator");
        }
    }
    let lc = den
        .leading()
        .map(|(_, c)| c.clone())
        .expect("nonzero denominator");
    if !lc.is_one() {
        let k = lc.inv().expect("nonzero leading coefficient");
        num = num.scale(&k);
        den = den.scale(&k);
    }
    RatFunc { num, den }
}

/// Rewrites `sqrt(x)^k` with k ≥ 2 into `x^(k/2)·sqrt(x)^(k mod 2)`.
fn reduce_sqrt_powers(num: Poly, den: Poly) -> (Poly, Poly) {
    let needs = |p: &Poly| {
        p.terms.keys().any(|m| {
            m.powers
                .iter()
                .any(|(a, k)| matches!(a, Atom::Sqrt(_)) && *k >= 2)
        })
    };
    if !needs(&num) && !needs(&den) {
        return (num, den);
    }
    let expand = |p: &Poly| -> RatFunc {
        let mut acc = RatFunc::zero();
        for (m, c) in &p.terms {
            let mut base = m.clone();
            let mut extra = RatFunc::one();
            for (a, k) in &m.powers {
                if let Atom::Sqrt(x) = a {
                    if *k >= 2 {
                        let kept = k % 2;
                        if kept == 0 {
                            base.powers.remove(a);
                        } else {
                            base.powers.insert(a.clone(), kept);
                        }
                        let sq = x.powi((k / 2) as i64).expect("nonnegative power");
                        extra = extra.mul(&sq);
                    }
                }
            }
            let term = RatFunc {
                num: Poly::monomial(base, c.clone()),
                den: Poly::constant(Scalar::one()),
            };
            acc = acc.add(&term.mul(&extra));
        }
        acc
    };
    let n = expand(&num);
    let d = expand(&den);
    (n.num.mul(&d.den), n.den.mul(&d.num))
}

/// Converts an expression to its canonical rational form.
pub fn to_ratfunc(e: &Expr) -> Result<RatFunc, SymError> {
    Ok(match e {
        Expr::Const(c) => RatFunc::constant(c.clone()),
        Expr::Var(n) => RatFunc::atom(Atom::Var(n.to_string())),
        Expr::Add(xs) => {
            let mut acc = RatFunc::zero();
            for x in xs {
                acc = acc.add(&to_ratfunc(x)?);
            }
            acc
        }
        Expr::Mul(xs) => {
            let mut acc = RatFunc::one();
            for x in xs {
                acc = acc.mul(&to_ratfunc(x)?);
            }
            acc
        }
        Expr::Pow(b, n) => to_ratfunc(b)?.powi(*n)?,
        Expr::Div(a, b) => to_ratfunc(a)?.div(&to_ratfunc(b)?)?,
        Expr::Exp(a) => {
            let a = to_ratfunc(a)?;
            if a.is_zero() {
                RatFunc::one()
            } else {
                RatFunc {
                    num: Poly::monomial(
                        Monomial {
                            powers: BTreeMap::new(),
                            exp: Some(Box::new(a)),
                        },
                        Scalar::one(),
                    ),
                    den: Poly::constant(Scalar::one()),
                }
            }
        }
        Expr::Log(a) => {
            let a = to_ratfunc(a)?;
            if a.is_zero() {
                return Err(SymError::LogOfZero);
            }
            if a.as_constant().is_some_and(|c| c.is_one()) {
                RatFunc::zero()
            } else {
                RatFunc::atom(Atom::Log(Box::new(a)))
            }
        }
        Expr::Sqrt(a) => {
            let a = to_ratfunc(a)?;
            match a.as_constant().and_then(|c| c.sqrt_exact()) {
                Some(r) => RatFunc::constant(r),
                None => RatFunc::atom(Atom::Sqrt(Box::new(a))),
            }
        }
        Expr::Opaque(n, a) => RatFunc::atom(Atom::Opaque(n.to_string(), Box::new(to_ratfunc(a)?))),
    })
}

/// Atoms of the normal form, for probing and classification.
pub(crate) fn atoms_of(r: &RatFunc) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    r.num.atoms(&mut out);
    r.den.atoms(&mut out);
    out
}

/// Multivariate gcd over ℚ(i) by recursive primitive remainder sequences.
mod gcd {
    use super::*;

    type Exps = Vec<u32>;

    /// Dense-exponent polynomial over a fixed list of variables; lex order.
    #[derive(Clone, PartialEq, Debug)]
    struct SPoly {
        n: usize,
        terms: BTreeMap<Exps, Scalar>,
    }

    impl SPoly {
        fn zero(n: usize) -> Self {
            SPoly {
                n,
                terms: BTreeMap::new(),
            }
        }

        fn constant(n: usize, c: Scalar) -> Self {
            let mut p = SPoly::zero(n);
            if !c.is_zero() {
                p.terms.insert(vec![0; n], c);
            }
            p
        }

        fn is_zero(&self) -> bool {
            self.terms.is_empty()
        }

        fn is_constant(&self) -> bool {
            self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
        }

        fn add_term(&mut self, e: Exps, c: Scalar) {
            if c.is_zero() {
                return;
            }
            let s = match self.terms.remove(&e) {
                Some(old) => &old + &c,
                None => c,
            };
            if !s.is_zero() {
                self.terms.insert(e, s);
            }
        }

        fn sub(&self, o: &SPoly) -> SPoly {
            let mut r = self.clone();
            for (e, c) in &o.terms {
                r.add_term(e.clone(), -c);
            }
            r
        }

        fn mul(&self, o: &SPoly) -> SPoly {
            let mut r = SPoly::zero(self.n);
            for (e1, c1) in &self.terms {
                for (e2, c2) in &o.terms {
                    let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                    r.add_term(e, c1 * c2);
                }
            }
            r
        }

        fn deg(&self, x: usize) -> u32 {
            self.terms.keys().map(|e| e[x]).max().unwrap_or(0)
        }

        /// Coefficients in variable `x`, keyed by its exponent.
        fn coeffs(&self, x: usize) -> BTreeMap<u32, SPoly> {
            let mut out: BTreeMap<u32, SPoly> = BTreeMap::new();
            for (e, c) in &self.terms {
                let mut e2 = e.clone();
                e2[x] = 0;
                out.entry(e[x])
                    .or_insert_with(|| SPoly::zero(self.n))
                    .add_term(e2, c.clone());
            }
            out
        }

        fn lc(&self, x: usize) -> SPoly {
            self.coeffs(x)
                .into_iter()
                .next_back()
                .map(|(_, c)| c)
                .unwrap_or(SPoly::zero(self.n))
        }

        fn shift(&self, x: usize, k: u32) -> SPoly {
            SPoly {
                n: self.n,
                terms: self
                    .terms
                    .iter()
                    .map(|(e, c)| {
                        let mut e = e.clone();
                        e[x] += k;
                        (e, c.clone())
                    })
                    .collect(),
            }
        }

        fn div_exact(&self, b: &SPoly) -> Option<SPoly> {
            let (be, bc) = b.terms.iter().next_back()?;
            let mut q = SPoly::zero(self.n);
            let mut r = self.clone();
            while let Some((re, rc)) = r.terms.iter().next_back() {
                if re.iter().zip(be).any(|(a, b)| a < b) {
                    return None;
                }
                let te: Exps = re.iter().zip(be).map(|(a, b)| a - b).collect();
                let tc = rc / bc;
                let t = SPoly {
                    n: self.n,
                    terms: [(te.clone(), tc.clone())].into_iter().collect(),
                };
                q.add_term(te, tc);
                r = r.sub(&t.mul(b));
            }
            Some(q)
        }

        fn first_var(&self) -> Option<usize> {
            (0..self.n).find(|&x| self.deg(x) > 0)
        }
    }

    fn content(p: &SPoly, x: usize) -> SPoly {
        let mut g: Option<SPoly> = None;
        for c in p.coeffs(x).into_values() {
            g = Some(match g {
                None => c,
                Some(g) => spoly_gcd(&g, &c),
            });
            if g.as_ref().is_some_and(SPoly::is_constant) {
                break;
            }
        }
        g.unwrap_or(SPoly::zero(p.n))
    }

    fn primitive(p: &SPoly, x: usize) -> SPoly {
        let c = content(p, x);
        p.div_exact(&c).expect("content divides")
    }

    fn prem(a: &SPoly, b: &SPoly, x: usize) -> SPoly {
        let db = b.deg(x);
        let lb = b.lc(x);
        let mut r = a.clone();
        while !r.is_zero() && r.deg(x) >= db {
            let s = r.lc(x).shift(x, r.deg(x) - db);
            r = lb.mul(&r).sub(&s.mul(b));
        }
        r
    }

    fn spoly_gcd(a: &SPoly, b: &SPoly) -> SPoly {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        if a.is_constant() || b.is_constant() {
            return SPoly::constant(a.n, Scalar::one());
        }
        let x = match (a.first_var(), b.first_var()) {
            (Some(p), Some(q)) => p.min(q),
            (Some(p), None) | (None, Some(p)) => p,
            (None, None) => return SPoly::constant(a.n, Scalar::one()),
        };
        let (ca, cb) = (content(a, x), content(b, x));
        let c = spoly_gcd(&ca, &cb);
        let mut p = a.div_exact(&ca).expect("content divides");
        let mut q = b.div_exact(&cb).expect("content divides");
        if p.deg(x) < q.deg(x) {
            std::mem::swap(&mut p, &mut q);
        }
        let g = loop {
            if q.deg(x) == 0 {
                break if q.is_zero() {
                    p
                } else {
                    SPoly::constant(a.n, Scalar::one())
                };
            }
            let r = prem(&p, &q, x);
            if r.is_zero() {
                break q;
            }
            p = q;
            q = primitive(&r, x);
        };
        c.mul(&primitive(&g, x))
    }

    fn to_spoly(p: &Poly, vars: &[Atom]) -> SPoly {
        let mut s = SPoly::zero(vars.len());
        for (m, c) in &p.terms {
            let e = vars
                .iter()
                .map(|a| m.powers.get(a).copied().unwrap_or(0))
                .collect();
            s.add_term(e, c.clone());
        }
        s
    }

    fn from_spoly(s: &SPoly, vars: &[Atom]) -> Poly {
        let mut p = Poly::zero();
        for (e, c) in &s.terms {
            let powers = vars
                .iter()
                .zip(e)
                .filter(|(_, &k)| k > 0)
                .map(|(a, &k)| (a.clone(), k))
                .collect();
            p.add_term(Monomial { powers, exp: None }, c.clone());
        }
        p
    }

    fn vars_of(a: &Poly, b: &Poly) -> Vec<Atom> {
        let mut set = BTreeSet::new();
        a.atoms(&mut set);
        b.atoms(&mut set);
        set.into_iter().collect()
    }

    /// gcd of exp-free polynomials, up to a scalar factor.
    pub(super) fn gcd(a: &Poly, b: &Poly) -> Poly {
        let vars = vars_of(a, b);
        from_spoly(&spoly_gcd(&to_spoly(a, &vars), &to_spoly(b, &vars)), &vars)
    }

    pub(super) fn div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
        let vars = vars_of(a, b);
        to_spoly(a, &vars)
            .div_exact(&to_spoly(b, &vars))
            .map(|q| from_spoly(&q, &vars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> Expr {
        Expr::var("u")
    }

    fn nf(e: &Expr) -> RatFunc {
        to_ratfunc(e).unwrap()
    }

    #[test]
    fn cancels_common_factor() {
        let e = (u().pow(2) - Expr::one()) / (u() - Expr::one());
        assert_eq!(nf(&e), nf(&(u() + Expr::one())));
        assert_eq!(nf(&e).den, Poly::constant(Scalar::one()));
    }

    #[test]
    fn cancels_monomials() {
        let e = (Expr::one() / u()) * u().pow(2);
        assert_eq!(nf(&e), nf(&u()));
    }

    #[test]
    fn exponentials_combine() {
        let z = Expr::var("z");
        let e = z.clone().exp() * (-z.clone()).exp();
        assert_eq!(nf(&e), RatFunc::one());
        let e2 = z.clone().exp() * z.clone().exp();
        assert_eq!(nf(&e2), nf(&(Expr::int(2) * z).exp()));
    }

    #[test]
    fn sqrt_squares_away() {
        let a = Expr::var("a");
        assert_eq!(nf(&a.clone().sqrt().pow(2)), nf(&a));
        assert_eq!(
            nf(&(a.clone().sqrt().pow(3) / a.clone())),
            nf(&a.clone().sqrt())
        );
        assert_eq!(
            nf(&(Expr::one() / a.clone().sqrt() * a.clone().sqrt())),
            RatFunc::one()
        );
        assert_eq!(
            nf(&Expr::int(-4).sqrt()),
            RatFunc::constant(&Scalar::int(2) * &Scalar::i())
        );
    }

    #[test]
    fn multivariate_gcd() {
        let (x, y) = (Expr::var("x"), Expr::var("y"));
        // (x² − y²)/(x + y) = x − y
        let e = (x.clone().pow(2) - y.clone().pow(2)) / (x.clone() + y.clone());
        assert_eq!(nf(&e), nf(&(x.clone() - y.clone())));
        // (x y + x)/(y² + 2y + 1) = x/(y + 1)
        let e = (x.clone() * y.clone() + x.clone())
            / (y.clone().pow(2) + Expr::int(2) * y.clone() + Expr::one());
        assert_eq!(nf(&e), nf(&(x.clone() / (y.clone() + Expr::one()))));
    }

    #[test]
    fn equal_functions_share_normal_form() {
        let (x, y) = (Expr::var("x"), Expr::var("y"));
        let a = Expr::one() / x.clone() + Expr::one() / y.clone();
        let b = (x.clone() + y.clone()) / (x.clone() * y.clone());
        assert_eq!(nf(&a), nf(&b));
        let c = Expr::int(3) / (Expr::int(2) * x.clone() + Expr::int(4));
        let d = (Expr::constant(Scalar::frac(3, 2))) / (x.clone() + Expr::int(2));
        assert_eq!(nf(&c), nf(&d));
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = Expr::one() / (u() - u());
        assert_eq!(to_ratfunc(&e), Err(SymError::DivisionByZero));
        assert_eq!(to_ratfunc(&Expr::zero().log()), Err(SymError::LogOfZero));
    }
}
