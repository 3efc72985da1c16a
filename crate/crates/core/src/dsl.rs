//! A small expression language for defining functions and vector fields.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' INT)?
//! atom   := RATIONAL | 'I' | 'SQRT2' | VAR | 'conj(' expr ')' | 'inv(' expr ')' | '(' expr ')'
//! ```
//!
//! `VAR` is `w`, `v` or `z<k>`. In field mode the markers `Dw`, `Dz1`, .. are atoms too, and
//! every summand must carry exactly one of them. `#` starts a comment running to end of line.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{parse_rational, rational_to_pq, Rational, Scalar};
use crate::fields::HoloVectorField;
use crate::germs::HypersurfaceGerm;
use crate::poly::Poly;
use crate::series::{TruncatedSeries, VarSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Rational),
    I,
    Sqrt2,
    Var(String),
    /// `∂/∂x` marker, holding the coordinate name.
    Marker(String),
    Conj(Box<Expr>),
    Inv(Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let simple = match c {
                '#' => break,
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                '+' => Some(Tok::Plus),
                '-' => Some(Tok::Minus),
                '*' => Some(Tok::Star),
                '^' => Some(Tok::Caret),
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                _ => None,
            };
            if let Some(tok) = simple {
                out.push(Token { tok, line, column });
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                out.push(Token { tok: Tok::Num(chars[start..i].iter().collect()), line, column });
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line, column });
            } else {
                return Err(parse_err(line, column, format!("unexpected character '{c}'")));
            }
        }
    }
    Ok(out)
}

fn is_var_name(s: &str) -> bool {
    s == "w" || s == "v" || (s.len() > 1 && s.starts_with('z') && s[1..].chars().all(|c| c.is_ascii_digit()))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    fields: bool,
    end: (usize, usize),
}

/// A parsed subexpression and the number of derivative markers it carries.
type Parsed = (Expr, usize);

const SCALAR_TERM: &str = "scalar term where field component expected";

impl Parser {
    fn new(text: &str, fields: bool) -> Result<Self> {
        let toks = lex(text)?;
        let lines: Vec<&str> = text.lines().collect();
        let end = (lines.len().max(1), lines.last().map_or(0, |l| l.chars().count()) + 1);
        Ok(Parser { toks, pos: 0, fields, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.column))
    }

    fn err(&self, message: impl Into<String>) -> Error {
        let (l, c) = self.here();
        parse_err(l, c, message)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    /// In field mode, summands are either all fields or all scalars; the latter only
    /// inside parentheses (a coefficient).
    fn expr(&mut self) -> Result<Parsed> {
        let mut summands = Vec::new();
        let at = self.here();
        let (mut e, m) = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let (t, m) = self.term()?;
            (Expr::Neg(Box::new(t)), m)
        } else {
            self.term()?
        };
        summands.push((at, m));
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => Tok::Plus,
                Some(Tok::Minus) => Tok::Minus,
                _ => break,
            };
            self.pos += 1;
            let at = self.here();
            let (t, m) = self.term()?;
            summands.push((at, m));
            e = if op == Tok::Plus { Expr::Add(Box::new(e), Box::new(t)) } else { Expr::Sub(Box::new(e), Box::new(t)) };
        }
        let any_field = summands.iter().any(|(_, m)| *m > 0);
        if any_field {
            if let Some((at, _)) = summands.iter().find(|(_, m)| *m == 0) {
                return Err(parse_err(at.0, at.1, SCALAR_TERM));
            }
        }
        Ok((e, any_field as usize))
    }

    fn term(&mut self) -> Result<Parsed> {
        let (mut e, mut markers) = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let at = self.here();
            let (f, m) = self.factor()?;
            markers += m;
            if markers > 1 {
                return Err(parse_err(at.0, at.1, "more than one derivative marker in a product"));
            }
            e = Expr::Mul(Box::new(e), Box::new(f));
        }
        Ok((e, markers))
    }

    fn factor(&mut self) -> Result<Parsed> {
        let (a, m) = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            if m > 0 {
                return Err(self.err("a derivative marker cannot be raised to a power"));
            }
            let at = self.here();
            let n = match self.peek() {
                Some(Tok::Num(s)) if !s.contains('/') => s.parse::<u32>().map_err(|_| parse_err(at.0, at.1, "exponent too large"))?,
                _ => return Err(self.err("expected a nonnegative integer exponent")),
            };
            self.pos += 1;
            return Ok((Expr::Pow(Box::new(a), n), 0));
        }
        Ok((a, m))
    }

    fn scalar_inside(&mut self, wrap: fn(Box<Expr>) -> Expr, name: &str) -> Result<Parsed> {
        self.expect(Tok::LParen, &format!("'(' after {name}"))?;
        let at = self.here();
        let was_fields = self.fields;
        self.fields = false;
        let inner = self.expr();
        self.fields = was_fields;
        let (e, m) = inner?;
        if m > 0 {
            return Err(parse_err(at.0, at.1, format!("derivative marker inside {name}(...)")));
        }
        self.expect(Tok::RParen, "')'")?;
        Ok((wrap(Box::new(e)), 0))
    }

    fn atom(&mut self) -> Result<Parsed> {
        let (line, column) = self.here();
        let tok = self.toks.get(self.pos).map(|t| t.tok.clone()).ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Tok::Num(s) => Ok((Expr::Num(parse_rational(&s).map_err(|e| parse_err(line, column, e.to_string()))?), 0)),
            Tok::Ident(s) => match s.as_str() {
                "I" => Ok((Expr::I, 0)),
                "SQRT2" => Ok((Expr::Sqrt2, 0)),
                "conj" => self.scalar_inside(Expr::Conj, "conj"),
                "inv" => self.scalar_inside(Expr::Inv, "inv"),
                name if is_var_name(name) => Ok((Expr::Var(s), 0)),
                name if name.len() > 1 && name.starts_with('D') && is_var_name(&name[1..]) && name != "Dv" => {
                    if !self.fields {
                        return Err(parse_err(line, column, "derivative marker in a scalar expression"));
                    }
                    Ok((Expr::Marker(name[1..].to_string()), 1))
                }
                _ => Err(parse_err(line, column, format!("unknown identifier '{s}'"))),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(parse_err(line, column, "expected a number, variable or '('")),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(())
    }
}

/// Parses a scalar expression (no derivative markers).
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text, false)?;
    let (e, _) = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a vector field expression; each summand carries one marker.
pub fn parse_field_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text, true)?;
    let at = p.here();
    let (e, m) = p.expr()?;
    p.finish()?;
    if m == 0 {
        return Err(parse_err(at.0, at.1, SCALAR_TERM));
    }
    Ok(e)
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Neg(..) => 1,
        Expr::Mul(..) => 2,
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

fn paren(e: &Expr, min: u8) -> String {
    if prec(e) < min {
        format!("({e})")
    } else {
        e.to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}", rational_to_pq(r))
                }
            }
            Expr::I => write!(f, "I"),
            Expr::Sqrt2 => write!(f, "SQRT2"),
            Expr::Var(s) => write!(f, "{s}"),
            Expr::Marker(s) => write!(f, "D{s}"),
            Expr::Conj(e) => write!(f, "conj({e})"),
            Expr::Inv(e) => write!(f, "inv({e})"),
            // a leading minus binds to the first term only
            Expr::Neg(e) => write!(f, "-{}", paren(e, 2)),
            Expr::Add(a, b) => write!(f, "{} + {}", a, paren(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", a, paren(b, 2)),
            Expr::Mul(a, b) => write!(f, "{}*{}", paren(a, 2), paren(b, 3)),
            Expr::Pow(a, n) => write!(f, "{}^{n}", paren(a, 4)),
        }
    }
}

impl Expr {
    /// Variable names, in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let Expr::Var(s) | Expr::Marker(s) = e {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        });
        out
    }

    fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Conj(a) | Expr::Inv(a) | Expr::Neg(a) | Expr::Pow(a, _) => a.walk(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            _ => {}
        }
    }

    /// Evaluates to a truncated series over `vars`.
    pub fn to_series(&self, vars: &VarSet, cutoff: u32) -> Result<TruncatedSeries> {
        let konst = |s: Scalar| TruncatedSeries::constant(vars, cutoff, s);
        Ok(match self {
            Expr::Num(r) => konst(Scalar::from_rational(r.clone())),
            Expr::I => konst(Scalar::i()),
            Expr::Sqrt2 => konst(Scalar::sqrt2()),
            Expr::Var(name) => {
                let g = if name == "v" {
                    vars.v()
                } else {
                    vars.holo(vars.coordinate(name).ok_or_else(|| Error::Semantic(format!("unknown variable '{name}'")))?)
                };
                TruncatedSeries::generator(vars, cutoff, g)
            }
            Expr::Marker(_) => return Err(Error::Semantic(format!("derivative marker in scalar expression '{self}'"))),
            Expr::Conj(a) => a.to_series(vars, cutoff)?.conjugate(),
            Expr::Inv(a) => a
                .to_series(vars, cutoff)?
                .inverse()
                .map_err(|e| Error::Semantic(format!("{e} in '{self}'")))?,
            Expr::Neg(a) => a.to_series(vars, cutoff)?.neg(),
            Expr::Add(a, b) => a.to_series(vars, cutoff)?.add(&b.to_series(vars, cutoff)?),
            Expr::Sub(a, b) => a.to_series(vars, cutoff)?.sub(&b.to_series(vars, cutoff)?),
            Expr::Mul(a, b) => a.to_series(vars, cutoff)?.mul(&b.to_series(vars, cutoff)?),
            Expr::Pow(a, n) => a.to_series(vars, cutoff)?.pow(*n),
        })
    }

    /// Evaluates a holomorphic polynomial in the coordinates of `vars`.
    fn to_holo_poly(&self, vars: &VarSet) -> Result<Poly> {
        let n = vars.n();
        Ok(match self {
            Expr::Num(r) => Poly::constant(n, Scalar::from_rational(r.clone())),
            Expr::I => Poly::constant(n, Scalar::i()),
            Expr::Sqrt2 => Poly::constant(n, Scalar::sqrt2()),
            Expr::Var(name) => match vars.coordinate(name) {
                Some(k) => Poly::var(n, k),
                None => return Err(Error::Semantic(format!("'{name}' is not a coordinate of the field"))),
            },
            Expr::Neg(a) => a.to_holo_poly(vars)?.neg(),
            Expr::Add(a, b) => a.to_holo_poly(vars)?.add(&b.to_holo_poly(vars)?),
            Expr::Sub(a, b) => a.to_holo_poly(vars)?.sub(&b.to_holo_poly(vars)?),
            Expr::Mul(a, b) => a.to_holo_poly(vars)?.mul(&b.to_holo_poly(vars)?),
            Expr::Pow(a, k) => a.to_holo_poly(vars)?.pow(*k),
            Expr::Conj(_) | Expr::Inv(_) => {
                return Err(Error::Semantic(format!("field coefficients must be holomorphic polynomials: '{self}'")))
            }
            Expr::Marker(_) => unreachable!("markers are split off before evaluation"),
        })
    }

    /// Splits a field expression into `(coordinate index, coefficient)` summands.
    fn field_components(&self, vars: &VarSet) -> Result<Vec<Poly>> {
        let n = vars.n();
        match self {
            Expr::Marker(name) => {
                let k = vars.coordinate(name).ok_or_else(|| Error::Semantic(format!("unknown coordinate in 'D{name}'")))?;
                let mut out = vec![Poly::zero(n); n];
                out[k] = Poly::one(n);
                Ok(out)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (x, y) = (a.field_components(vars)?, b.field_components(vars)?);
                let sub = matches!(self, Expr::Sub(..));
                Ok(x.iter().zip(&y).map(|(p, q)| if sub { p.sub(q) } else { p.add(q) }).collect())
            }
            Expr::Neg(a) => Ok(a.field_components(vars)?.iter().map(Poly::neg).collect()),
            Expr::Mul(a, b) => {
                let (field, coeff) = if a.has_marker() { (a, b) } else { (b, a) };
                let c = coeff.to_holo_poly(vars)?;
                Ok(field.field_components(vars)?.iter().map(|p| p.mul(&c)).collect())
            }
            _ => Err(Error::Semantic(format!("'{self}' is not a vector field"))),
        }
    }

    fn has_marker(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, Expr::Marker(_)));
        found
    }
}

fn max_z_index(names: &[String]) -> Option<usize> {
    names.iter().filter_map(|s| s.strip_prefix('z')).filter_map(|k| k.parse().ok()).max()
}

/// Coordinates for a field: `z0, ..` if `z0` occurs, else `w, z1, .., z_n` with `n ≥ 2`.
pub fn field_vars_for(expr: &Expr) -> VarSet {
    let names = expr.variables();
    let top = max_z_index(&names).unwrap_or(0);
    if names.iter().any(|s| s == "z0") {
        VarSet::matrix(top + 1)
    } else {
        VarSet::ambient(top.max(2))
    }
}

/// Parses a field over the given coordinates.
pub fn parse_field(text: &str, vars: &VarSet) -> Result<HoloVectorField> {
    let e = parse_field_expr(text)?;
    HoloVectorField::new(vars, e.field_components(vars)?)
}

/// Parses a field, choosing the coordinates with [`field_vars_for`].
pub fn parse_field_auto(text: &str) -> Result<HoloVectorField> {
    let e = parse_field_expr(text)?;
    let vars = field_vars_for(&e);
    HoloVectorField::new(&vars, e.field_components(&vars)?)
}

/// Evaluates a constant expression such as `1/2 + I` or `SQRT2`.
pub fn parse_constant(text: &str) -> Result<Scalar> {
    let e = parse_expr(text)?;
    if let Some(v) = e.variables().first() {
        return Err(Error::Semantic(format!("`{text}` is not a constant: it involves {v}")));
    }
    let vars = VarSet::restricted(1);
    Ok(e.to_series(&vars, 1)?.coeff(&vec![0; vars.len()]))
}

/// A germ `w + w̄ = ρ` from a DSL expression for `ρ` in `z1, .., z_n, v`, re-expandable to any cutoff.
pub fn parse_germ(text: &str, cutoff: u32, normal_form: bool) -> Result<HypersurfaceGerm> {
    let e = parse_expr(text)?;
    let names = e.variables();
    if names.iter().any(|s| s == "w") {
        return Err(Error::Semantic("rho must not involve w".into()));
    }
    if names.iter().any(|s| s == "z0") {
        return Err(Error::Semantic("rho coordinates are z1, z2, ..".into()));
    }
    let nz = max_z_index(&names).unwrap_or(0).max(if normal_form { 2 } else { 1 });
    let vars = VarSet::restricted(nz);
    let label = format!("{e}");
    HypersurfaceGerm::from_builder(&label, cutoff, normal_form, move |c| e.to_series(&vars, c))
}
