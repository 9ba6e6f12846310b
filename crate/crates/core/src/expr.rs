//! Expression front-end.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := base ('^' nat)?
//! base    := '(' expr ')' | 'conj' '(' expr ')' | '-' base | literal | var
//! literal := int | int '/' int | 'i' | 'sqrt' '(' ('2'|'3') ')'
//! ```
//!
//! Variables must be declared up front in a [`VarSpace`]; `conj(v)` resolves
//! to the conjugate partner. The only radicals accepted are sqrt(2) and
//! sqrt(3) — anything else is rejected with a diagnostic rather than
//! approximated.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::jet::{Jet, VarSpace};
use crate::scalar::{Complex, Rational, Surd};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        message: message.into(),
    })
}

// =============================================================================
// AST
// =============================================================================

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Index of a declared (holomorphic or real) variable.
    Var(usize),
    Rat(Rational),
    ImagUnit,
    Sqrt2,
    Sqrt3,
    Neg(Box<Expr>),
    Conj(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Syntactic upper bound on the total degree of the expanded expression.
pub fn degree_bound(e: &Expr) -> u32 {
    fn rec(e: &Expr) -> u64 {
        match e {
            Expr::Var(_) => 1,
            Expr::Rat(_) | Expr::ImagUnit | Expr::Sqrt2 | Expr::Sqrt3 => 0,
            Expr::Neg(x) | Expr::Conj(x) => rec(x),
            Expr::Add(a, b) | Expr::Sub(a, b) => rec(a).max(rec(b)),
            Expr::Mul(a, b) => rec(a) + rec(b),
            Expr::Pow(a, n) => rec(a) * (*n as u64),
        }
    }
    rec(e).min(u32::MAX as u64) as u32
}

/// Evaluate to an exact jet at the requested order.
pub fn to_jet(e: &Expr, space: &Arc<VarSpace>, order: u32) -> Jet {
    match e {
        Expr::Var(idx) => Jet::variable(space, order, *idx),
        Expr::Rat(r) => Jet::constant(space, order, Complex::from_rational(r.clone())),
        Expr::ImagUnit => Jet::constant(space, order, Complex::i()),
        Expr::Sqrt2 => Jet::constant(space, order, Complex::from_surd(Surd::sqrt2())),
        Expr::Sqrt3 => Jet::constant(space, order, Complex::from_surd(Surd::sqrt3())),
        Expr::Neg(x) => to_jet(x, space, order).neg(),
        Expr::Conj(x) => to_jet(x, space, order).conj_swap(),
        Expr::Add(a, b) => to_jet(a, space, order).add(&to_jet(b, space, order)),
        Expr::Sub(a, b) => to_jet(a, space, order).sub(&to_jet(b, space, order)),
        Expr::Mul(a, b) => to_jet(a, space, order).mul(&to_jet(b, space, order)),
        Expr::Pow(a, n) => to_jet(a, space, order).pow(*n),
    }
}

// =============================================================================
// Lexer
// =============================================================================

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Int(text[start..i].to_string())));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => return err(i, format!("unexpected character `{}`", text[i..].chars().next().unwrap())),
        }
    }
    Ok(out)
}

// =============================================================================
// Parser
// =============================================================================

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    space: &'a VarSpace,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        match self.next() {
            Some((_, t)) if t == tok => Ok(()),
            Some((p, t)) => err(p, format!("expected {what}, found {t:?}")),
            None => err(self.end, format!("expected {what}, found end of input")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.next();
                    let rhs = self.term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.next();
            let rhs = self.factor()?;
            lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.next();
            let pos = self.here();
            match self.next() {
                Some((_, Tok::Int(digits))) => {
                    let n: u32 = digits
                        .parse()
                        .map_err(|_| ParseError {
                            pos,
                            message: format!("exponent `{digits}` does not fit in 32 bits"),
                        })?;
                    Ok(Expr::Pow(Box::new(base), n))
                }
                Some((p, t)) => err(p, format!("expected a nonnegative integer exponent, found {t:?}")),
                None => err(self.end, "expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.next() {
            Some((_, Tok::LParen)) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some((_, Tok::Minus)) => Ok(Expr::Neg(Box::new(self.base()?))),
            Some((_, Tok::Int(digits))) => self.literal_number(pos, digits),
            Some((p, Tok::Ident(name))) => match name.as_str() {
                "i" => Ok(Expr::ImagUnit),
                "conj" => {
                    self.expect(Tok::LParen, "`(` after conj")?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Conj(Box::new(e)))
                }
                "sqrt" => {
                    self.expect(Tok::LParen, "`(` after sqrt")?;
                    let rpos = self.here();
                    let radicand = match self.next() {
                        Some((_, Tok::Int(d))) => d,
                        Some((p, t)) => return err(p, format!("expected 2 or 3 inside sqrt, found {t:?}")),
                        None => return err(self.end, "expected 2 or 3 inside sqrt"),
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    match radicand.as_str() {
                        "2" => Ok(Expr::Sqrt2),
                        "3" => Ok(Expr::Sqrt3),
                        other => err(
                            rpos,
                            format!(
                                "unsupported radical sqrt({other}): only sqrt(2) and sqrt(3) lie in the coefficient field"
                            ),
                        ),
                    }
                }
                _ => match self.space.resolve(&name) {
                    Some(idx) => Ok(Expr::Var(idx)),
                    None => err(p, format!("unknown variable `{name}`")),
                },
            },
            Some((p, t)) => err(p, format!("expected an expression, found {t:?}")),
            None => err(self.end, "expected an expression, found end of input"),
        }
    }

    fn literal_number(&mut self, pos: usize, digits: String) -> Result<Expr, ParseError> {
        let numer: BigInt = digits.parse().map_err(|_| ParseError {
            pos,
            message: format!("bad integer literal `{digits}`"),
        })?;
        if matches!(self.peek(), Some(Tok::Slash)) {
            self.next();
            let dpos = self.here();
            match self.next() {
                Some((_, Tok::Int(den))) => {
                    let denom: BigInt = den.parse().map_err(|_| ParseError {
                        pos: dpos,
                        message: format!("bad integer literal `{den}`"),
                    })?;
                    if denom == BigInt::from(0) {
                        return err(dpos, "rational literal with zero denominator");
                    }
                    Ok(Expr::Rat(Rational::new(numer, denom)))
                }
                Some((p, t)) => err(p, format!("expected denominator, found {t:?}")),
                None => err(self.end, "expected denominator after `/`"),
            }
        } else {
            Ok(Expr::Rat(Rational::from_integer(numer)))
        }
    }
}

/// Parse an expression over the declared variables of `space`.
pub fn parse(text: &str, space: &Arc<VarSpace>) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        space,
        end: text.len(),
    };
    let e = p.expr()?;
    if let Some((pos, t)) = p.toks.get(p.pos) {
        return err(*pos, format!("unexpected trailing input {t:?}"));
    }
    Ok(e)
}

/// Parse and evaluate in one step.
pub fn parse_jet(text: &str, space: &Arc<VarSpace>, order: u32) -> Result<Jet, ParseError> {
    Ok(to_jet(&parse(text, space)?, space, order))
}

// =============================================================================
// Printing
// =============================================================================

/// Render one monomial as a product of (possibly conjugated) variables.
pub fn monomial_to_string(space: &VarSpace, m: &crate::jet::Monomial) -> String {
    let mut factors: Vec<String> = Vec::new();
    for (idx, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = space.display_name(idx);
        if e == 1 {
            factors.push(name);
        } else {
            factors.push(format!("{name}^{e}"));
        }
    }
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}

/// Render a jet as an expression in the input grammar, terms in graded-lex
/// order. Reparsing the output over the same space yields an equal jet.
pub fn jet_to_string(j: &Jet) -> String {
    if j.is_zero() {
        return "0".to_string();
    }
    let space = j.space();
    let mut rendered: Vec<String> = Vec::new();
    for (m, c) in j.terms() {
        let mut monomial_factors: Vec<String> = Vec::new();
        for (idx, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = space.display_name(idx);
            if e == 1 {
                monomial_factors.push(name);
            } else {
                monomial_factors.push(format!("{name}^{e}"));
            }
        }
        let monomial = monomial_factors.join("*");
        let atoms = c.atoms();
        let term = if monomial.is_empty() {
            if atoms.len() == 1 {
                atoms[0].clone()
            } else {
                format!("({c})")
            }
        } else if atoms.len() == 1 {
            // note: `-z^2` would reparse as (-z)^2, so a -1 coefficient is
            // rendered as an explicit -1 factor
            match atoms[0].as_str() {
                "1" => monomial.clone(),
                a => format!("{a}*{monomial}"),
            }
        } else {
            format!("({c})*{monomial}")
        };
        rendered.push(term);
    }
    let mut out = String::new();
    for (k, term) in rendered.iter().enumerate() {
        if k == 0 {
            out.push_str(term);
        } else if let Some(rest) = term.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(term);
        }
    }
    out
}
