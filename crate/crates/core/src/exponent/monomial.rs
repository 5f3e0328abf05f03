use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::Rational;
use crate::error::{Error, Result};

/// Variables the calculator knows, in display order.
pub const VARIABLES: [&str; 9] = ["x", "D", "E", "H", "K", "L", "X", "M", "N"];

fn var_rank(v: &str) -> usize {
    VARIABLES.iter().position(|&u| u == v).unwrap_or(VARIABLES.len())
}

pub fn check_variable(v: &str) -> Result<()> {
    if VARIABLES.contains(&v) {
        Ok(())
    } else {
        Err(Error::UnknownVariable(v.to_string()))
    }
}

/// A product of variables raised to rational powers, with implied constant 1.
///
/// `eps` marks an x^ε factor. It is carried through every operation and
/// ignored by comparisons.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: BTreeMap<String, Rational>,
    pub eps: bool,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(name: &str) -> Self {
        Self::power(name, Rational::ONE)
    }

    pub fn power(name: &str, exp: Rational) -> Self {
        let mut m = Self::one();
        m.set(name, exp);
        m
    }

    /// Builds from `(variable, exponent)` pairs; repeated variables multiply.
    pub fn from_pairs<'a, I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, Rational)>,
    {
        pairs
            .into_iter()
            .fold(Self::one(), |acc, (v, e)| acc.mul(&Self::power(v, e)))
    }

    pub fn with_eps(mut self) -> Self {
        self.eps = true;
        self
    }

    fn set(&mut self, name: &str, exp: Rational) {
        if exp.is_zero() {
            self.exps.remove(name);
        } else {
            self.exps.insert(name.to_string(), exp);
        }
    }

    /// Exponent of `name` (zero when absent).
    pub fn exp(&self, name: &str) -> Rational {
        self.exps.get(name).copied().unwrap_or(Rational::ZERO)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.exps.contains_key(name)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.exps.keys().map(String::as_str)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty() && !self.eps
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (v, &e) in &other.exps {
            let sum = out.exp(v) + e;
            out.set(v, sum);
        }
        out.eps |= other.eps;
        out
    }

    pub fn pow(&self, r: Rational) -> Monomial {
        let mut out = Monomial {
            exps: BTreeMap::new(),
            eps: self.eps && !r.is_zero(),
        };
        for (v, &e) in &self.exps {
            out.set(v, e * r);
        }
        out
    }

    pub fn recip(&self) -> Monomial {
        self.pow(-Rational::ONE)
    }

    /// Replace `var` by `replacement`; a no-op when `var` is absent.
    pub fn substitute(&self, var: &str, replacement: &Monomial) -> Monomial {
        let e = self.exp(var);
        if e.is_zero() {
            return self.clone();
        }
        let mut rest = self.clone();
        rest.exps.remove(var);
        rest.mul(&replacement.pow(e))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut vars: Vec<(&String, &Rational)> = self.exps.iter().collect();
        vars.sort_by(|a, b| var_rank(a.0).cmp(&var_rank(b.0)).then(a.0.cmp(b.0)));
        let mut parts: Vec<String> = vars
            .into_iter()
            .map(|(v, e)| {
                if *e == Rational::ONE {
                    v.clone()
                } else {
                    format!("{v}^{{{e}}}")
                }
            })
            .collect();
        if self.eps {
            parts.push("x^{eps}".to_string());
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        let m = p.product()?;
        p.finish()?;
        Ok(m)
    }
}

/// Maximum of monomials, up to constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundExpr {
    terms: Vec<Monomial>,
}

impl BoundExpr {
    pub fn new(terms: Vec<Monomial>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("a bound expression needs at least one term".into()));
        }
        let mut uniq: Vec<Monomial> = Vec::with_capacity(terms.len());
        for t in terms {
            if !uniq.contains(&t) {
                uniq.push(t);
            }
        }
        Ok(Self { terms: uniq })
    }

    pub fn single(term: Monomial) -> Self {
        Self { terms: vec![term] }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.terms.iter().any(|t| t.contains(var))
    }

    /// Replace `var` everywhere; fails if no term mentions it.
    pub fn substitute(&self, var: &str, replacement: &Monomial) -> Result<BoundExpr> {
        check_variable(var)?;
        if !self.mentions(var) {
            return Err(Error::UnknownVariable(var.to_string()));
        }
        BoundExpr::new(self.terms.iter().map(|t| t.substitute(var, replacement)).collect())
    }

    pub fn push(&mut self, term: Monomial) {
        if !self.terms.contains(&term) {
            self.terms.push(term);
        }
    }
}

impl fmt::Display for BoundExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(Monomial::to_string).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl FromStr for BoundExpr {
    type Err = Error;

    /// Comma- or `+`-separated monomials.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        let mut terms = vec![p.product()?];
        while p.eat(',') || p.eat('+') {
            terms.push(p.product()?);
        }
        p.finish()?;
        BoundExpr::new(terms)
    }
}

/// An exponent pair (κ, λ) with 0 ≤ κ ≤ 1/2 ≤ λ ≤ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentPair {
    pub kappa: Rational,
    pub lambda: Rational,
}

impl ExponentPair {
    pub fn new(kappa: Rational, lambda: Rational) -> Result<Self> {
        let half = Rational::new(1, 2);
        if kappa < Rational::ZERO || kappa > half || lambda < half || lambda > Rational::ONE {
            return Err(Error::Domain(format!(
                "({kappa}, {lambda}) violates 0 <= kappa <= 1/2 <= lambda <= 1"
            )));
        }
        Ok(Self { kappa, lambda })
    }

    pub fn half_half() -> Self {
        let h = Rational::new(1, 2);
        Self { kappa: h, lambda: h }
    }
}

impl FromStr for ExponentPair {
    type Err = Error;

    /// `k,l` or `(k, l)`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (k, l) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("exponent pair `{s}` needs two components")))?;
        Self::new(k.parse()?, l.parse()?)
    }
}

/// Recursive-descent parser for the expression grammar:
///
/// ```text
/// expr    := product ((',' | '+') product)*
/// product := factor ('*'? factor)*
/// factor  := atom ('^' power)?
/// atom    := ident | '1' | '(' product ')'
/// power   := '{' rational '}' | '{eps}' | integer
/// ```
///
/// `x^{eps}` sets the ε flag instead of an exponent.
struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            Err(self.error("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    fn product(&mut self) -> Result<Monomial> {
        let mut m = self.factor()?;
        loop {
            if self.eat('*') || matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '(') {
                m = m.mul(&self.factor()?);
            } else {
                return Ok(m);
            }
        }
    }

    fn factor(&mut self) -> Result<Monomial> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        if self.eat('{') {
            let start = self.pos;
            while let Some(c) = self.peek_raw() {
                if c == '}' {
                    break;
                }
                self.pos += c.len_utf8();
            }
            let body = self.src[start..self.pos].trim().to_string();
            self.expect('}')?;
            if body == "eps" {
                return Ok(base.pow(Rational::ZERO).with_eps());
            }
            return Ok(base.pow(body.parse()?));
        }
        let start = self.pos;
        if self.peek() == Some('-') {
            self.pos += 1;
        }
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text = &self.src[start..self.pos];
        if text.is_empty() || text == "-" {
            return Err(self.error("expected an exponent"));
        }
        Ok(base.pow(text.parse()?))
    }

    fn atom(&mut self) -> Result<Monomial> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let m = self.product()?;
                self.expect(')')?;
                Ok(m)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Monomial::one())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                // variables are single letters, so `xD` reads as x*D
                self.pos += 1;
                let name = &self.src[start..self.pos];
                check_variable(name)?;
                Ok(Monomial::var(name))
            }
            _ => Err(self.error("expected a variable, `1` or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn parse_forms() {
        let m: Monomial = "x^{2/12} * D^{7/12}".parse().unwrap();
        assert_eq!(m.exp("x"), r(1, 6));
        assert_eq!(m.exp("D"), r(7, 12));
        let g: Monomial = "(x^2 D^7)^{1/12}".parse().unwrap();
        assert_eq!(g.exp("x"), r(1, 6));
        assert_eq!(g.exp("D"), r(7, 12));
        let e: Monomial = "x^{1/3}*x^{eps}".parse().unwrap();
        assert!(e.eps);
        assert_eq!(e.exp("x"), r(1, 3));
        assert_eq!("1".parse::<Monomial>().unwrap(), Monomial::one());
        assert!(matches!("y^2".parse::<Monomial>(), Err(Error::UnknownVariable(_))));
        assert!("x^".parse::<Monomial>().is_err());
        assert!("x^{1/2".parse::<Monomial>().is_err());
    }

    #[test]
    fn zero_exponents_dropped() {
        let m: Monomial = "x^{1/2}*x^{-1/2}*D".parse().unwrap();
        assert!(!m.contains("x"));
        assert_eq!(m.to_string(), "D");
    }

    #[test]
    fn display_order() {
        let m = Monomial::from_pairs([("N", r(1, 2)), ("x", r(17, 36)), ("E", Rational::ONE)]);
        assert_eq!(m.to_string(), "x^{17/36}*E*N^{1/2}");
        assert_eq!(Monomial::one().to_string(), "1");
    }

    #[test]
    fn bound_expr_roundtrip() {
        let b: BoundExpr = "E, x^{17/19}*E^{-17/19}, x^{212/285}*E^{-329/570}".parse().unwrap();
        assert_eq!(b.terms().len(), 3);
        let again: BoundExpr = b.to_string().parse().unwrap();
        assert_eq!(again, b);
    }

    #[test]
    fn substitution_requires_variable() {
        let b: BoundExpr = "x^{1/6}*D^{329/570}".parse().unwrap();
        assert!(matches!(b.substitute("E", &Monomial::var("x")), Err(Error::UnknownVariable(_))));
        assert!(matches!(b.substitute("q", &Monomial::var("x")), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn pair_validation() {
        assert!(ExponentPair::new(r(1, 2), r(1, 2)).is_ok());
        assert!(ExponentPair::new(r(3, 5), r(1, 2)).is_err());
        assert!(ExponentPair::new(r(0, 1), r(2, 5)).is_err());
        assert_eq!("(1/6, 2/3)".parse::<ExponentPair>().unwrap().lambda, r(2, 3));
    }
}
