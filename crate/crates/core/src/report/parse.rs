//! Model expressions such as `Im w = Re(z1*conj(z2)^3) + |z3|^4`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{parse_weight, Scalar, SparsePoly};
use crate::error::{Error, Result};
use crate::model::WeightVector;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let (pos, c) = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let text: String = chars[start..k].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Num(text.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_alphanumeric() {
                k += 1;
            }
            out.push((pos, Tok::Ident(chars[start..k].iter().map(|&(_, c)| c).collect())));
        } else if "+-*/^()|{}=".contains(c) {
            out.push((pos, Tok::Sym(c)));
            k += 1;
        } else {
            return Err(Error::Syntax { pos, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Ast {
    Num(BigRational),
    I,
    Z(usize),
    W,
    X(usize),
    Y(usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>, usize),
    Neg(Box<Ast>),
    Pow(Box<Ast>, u32),
    Conj(Box<Ast>),
    Re(Box<Ast>),
    Im(Box<Ast>),
    /// `|e|^{2m}`.
    Abs(Box<Ast>, u32),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    k: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.k).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.k).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.k += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = if self.eat('-') {
            Ast::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
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

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('(')))
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.power()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.power()?));
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = self.pos();
                self.k += 1;
                lhs = Ast::Div(Box::new(lhs), Box::new(self.power()?), pos);
            } else if self.starts_factor() {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        let braced = self.eat('{');
        let e = match self.peek() {
            Some(Tok::Num(v)) => {
                let e = u32::try_from(v.clone()).or_else(|_| self.err("exponent too large"))?;
                self.k += 1;
                e
            }
            _ => return self.err("expected a nonnegative integer exponent"),
        };
        if braced {
            self.expect('}')?;
        }
        Ok(e)
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.exponent()?;
            return Ok(Ast::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn var_index(&self, name: &str, prefix: char) -> Option<usize> {
        let rest = name.strip_prefix(prefix)?;
        let k: usize = rest.parse().ok()?;
        (k >= 1).then_some(k - 1)
    }

    fn atom(&mut self) -> Result<Ast> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.k += 1;
                Ok(Ast::Num(BigRational::from_integer(v)))
            }
            Some(Tok::Sym('(')) => {
                self.k += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Sym('|')) => {
                self.k += 1;
                let e = self.expr()?;
                self.expect('|')?;
                if !self.eat('^') {
                    return Err(Error::OddAbsolutePower(pos));
                }
                let p = self.exponent()?;
                if p % 2 == 1 {
                    return Err(Error::OddAbsolutePower(pos));
                }
                Ok(Ast::Abs(Box::new(e), p / 2))
            }
            Some(Tok::Ident(name)) => {
                self.k += 1;
                let call = |p: &mut Parser, f: fn(Box<Ast>) -> Ast| -> Result<Ast> {
                    p.expect('(')?;
                    let e = p.expr()?;
                    p.expect(')')?;
                    Ok(f(Box::new(e)))
                };
                match name.as_str() {
                    "i" => Ok(Ast::I),
                    "w" => Ok(Ast::W),
                    "conj" => call(self, Ast::Conj),
                    "Re" => call(self, Ast::Re),
                    "Im" => call(self, Ast::Im),
                    _ => {
                        if let Some(k) = self.var_index(&name, 'z') {
                            Ok(Ast::Z(k))
                        } else if let Some(k) = self.var_index(&name, 'x') {
                            Ok(Ast::X(k))
                        } else if let Some(k) = self.var_index(&name, 'y') {
                            Ok(Ast::Y(k))
                        } else {
                            Err(Error::Syntax { pos, msg: format!("unknown identifier {name:?}") })
                        }
                    }
                }
            }
            Some(Tok::Sym(c)) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }
}

fn max_var(a: &Ast) -> usize {
    match a {
        Ast::Z(k) | Ast::X(k) | Ast::Y(k) => k + 1,
        Ast::Num(_) | Ast::I | Ast::W => 0,
        Ast::Add(x, y) | Ast::Sub(x, y) | Ast::Mul(x, y) | Ast::Div(x, y, _) => max_var(x).max(max_var(y)),
        Ast::Neg(x) | Ast::Pow(x, _) | Ast::Conj(x) | Ast::Re(x) | Ast::Im(x) | Ast::Abs(x, _) => max_var(x),
    }
}

fn eval(a: &Ast, n: usize) -> Result<SparsePoly> {
    Ok(match a {
        Ast::Num(r) => SparsePoly::constant(n, Scalar::real(r.clone())),
        Ast::I => SparsePoly::constant(n, Scalar::i()),
        Ast::Z(k) => SparsePoly::z(n, *k),
        Ast::W => SparsePoly::w(n),
        Ast::X(k) => SparsePoly::z(n, *k).real_part(),
        Ast::Y(k) => SparsePoly::z(n, *k).imag_part(),
        Ast::Add(x, y) => &eval(x, n)? + &eval(y, n)?,
        Ast::Sub(x, y) => &eval(x, n)? - &eval(y, n)?,
        Ast::Mul(x, y) => &eval(x, n)? * &eval(y, n)?,
        Ast::Div(x, y, pos) => {
            let d = eval(y, n)?;
            let c = constant(&d).ok_or_else(|| Error::NonPolynomial(format!("division by a non-constant at position {pos}")))?;
            if c.is_zero() {
                return Err(Error::NonPolynomial(format!("division by zero at position {pos}")));
            }
            eval(x, n)?.scale(&c.inv())
        }
        Ast::Neg(x) => -eval(x, n)?,
        Ast::Pow(x, e) => eval(x, n)?.pow(*e),
        Ast::Conj(x) => eval(x, n)?.conjugate(),
        Ast::Re(x) => eval(x, n)?.real_part(),
        Ast::Im(x) => eval(x, n)?.imag_part(),
        Ast::Abs(x, m) => {
            let e = eval(x, n)?;
            (&e * &e.conjugate()).pow(*m)
        }
    })
}

fn constant(p: &SparsePoly) -> Option<Scalar> {
    let one = crate::algebra::Monomial::one(p.nvars());
    p.terms().all(|(m, _)| *m == one).then(|| p.coeff(&one))
}

/// Parse an expression into a polynomial in at least `min_vars` variables.
pub fn parse_expr(text: &str, min_vars: usize) -> Result<SparsePoly> {
    let toks = lex(text)?;
    let mut p = Parser { toks, k: 0, end: text.len() };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let ast = p.expr()?;
    if p.k != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    eval(&ast, max_var(&ast).max(min_vars))
}

/// Text of a model: an expression, optionally prefixed by `Im w =`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModelSource {
    pub text: String,
    pub declared_weights: Option<WeightVector>,
}

impl ModelSource {
    pub fn new(text: impl Into<String>) -> Self {
        ModelSource { text: text.into(), declared_weights: None }
    }

    /// Model file: first nonblank line `Im w = <expr>`, optional line `weights: a/b, c/d, …`.
    /// Lines starting with `#` are comments.
    pub fn from_file_contents(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let first = lines.next().ok_or(Error::Syntax { pos: 0, msg: "empty model file".into() })?;
        let mut src = ModelSource::new(first);
        if let Some(line) = lines.next() {
            let rest = line
                .strip_prefix("weights:")
                .ok_or_else(|| Error::Syntax { pos: 0, msg: format!("expected 'weights:' line, found {line:?}") })?;
            src.declared_weights = Some(parse_weight_list(rest)?);
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Syntax { pos: 0, msg: format!("unexpected line {extra:?}") });
        }
        Ok(src)
    }

    /// The right-hand side expression.
    pub fn rhs(&self) -> Result<&str> {
        match self.text.split_once('=') {
            None => Ok(self.text.trim()),
            Some((lhs, rhs)) => {
                let compact: String = lhs.chars().filter(|c| !c.is_whitespace()).collect();
                if compact == "Imw" {
                    Ok(rhs.trim())
                } else {
                    Err(Error::Syntax { pos: 0, msg: format!("left-hand side must be 'Im w', found {:?}", lhs.trim()) })
                }
            }
        }
    }
}

/// `a/b, c/d, …` (commas or whitespace).
pub fn parse_weight_list(s: &str) -> Result<WeightVector> {
    let parts: Vec<&str> = s.split([',', ' ']).map(str::trim).filter(|t| !t.is_empty()).collect();
    if parts.is_empty() {
        return Err(Error::Syntax { pos: 0, msg: "empty weight list".into() });
    }
    let ws = parts
        .iter()
        .map(|t| parse_weight(t).ok_or_else(|| Error::Syntax { pos: 0, msg: format!("bad weight {t:?}") }))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightVector::new(ws))
}

/// Parse the model polynomial and the declared weights.
pub fn parse_model(src: &ModelSource) -> Result<(SparsePoly, Option<WeightVector>)> {
    let min_vars = src.declared_weights.as_ref().map_or(0, WeightVector::len);
    let p = parse_expr(src.rhs()?, min_vars)?;
    Ok((p, src.declared_weights.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn p(s: &str) -> SparsePoly {
        parse_expr(s, 0).unwrap()
    }

    #[test]
    fn basic_forms() {
        let z1 = SparsePoly::z(2, 0);
        let z2 = SparsePoly::z(2, 1);
        let t = &z1 * &z2.conjugate().pow(3);
        assert_eq!(p("Re(z1 * conj(z2)^3)"), (&t + &t.conjugate()).scale(&Scalar::from_frac(1, 2)));
        assert_eq!(p("|z1|^2 + |z2|^2"), &(&z1 * &z1.conjugate()) + &(&z2 * &z2.conjugate()));
        assert_eq!(p("x1^2"), SparsePoly::z(1, 0).real_part().pow(2));
        assert_eq!(p("(1/2-i)*z1"), SparsePoly::z(1, 0).scale(&Scalar::new(BigRational::new(1.into(), 2.into()), -BigRational::one())));
        assert_eq!(p("2z1"), SparsePoly::z(1, 0).scale(&Scalar::from(2)));
        assert_eq!(p("|z1|^{4}"), (&SparsePoly::z(1, 0) * &SparsePoly::zbar(1, 0)).pow(2));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_expr("z1 +", 0), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("z1 / z2", 0), Err(Error::NonPolynomial(_))));
        assert!(matches!(parse_expr("|z1|^3", 0), Err(Error::OddAbsolutePower(_))));
        assert!(matches!(parse_expr("q1", 0), Err(Error::Syntax { .. })));
        assert!(matches!(ModelSource::new("Re w = z1").rhs(), Err(Error::Syntax { .. })));
    }

    #[test]
    fn display_round_trips() {
        for s in ["Re(z1*conj(z2)^3)", "|z1|^4 + Re(z1*conj(z1)^3)", "(1/3-2i)*z1*conj(z2) + (1/3+2i)*z2*conj(z1)", "Im(z1^2*conj(z2))"] {
            let q = p(s);
            assert_eq!(p(&q.to_string()), q, "{s}");
        }
    }

    #[test]
    fn model_file() {
        let src = ModelSource::from_file_contents("# comment\n\nIm w = |z1|^2\nweights: 1/2\n").unwrap();
        assert_eq!(src.declared_weights.as_ref().unwrap().len(), 1);
        assert_eq!(src.rhs().unwrap(), "|z1|^2");
    }
}
