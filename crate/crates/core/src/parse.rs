//! Text syntax for scalars and tensor expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | tensor
//! tensor := power ('.' power)*
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Identifiers are the letters `u v w du dv dw` and the field variables
//! `q x y z c s delta`. `.` is the tensor product, `*` multiplies by a
//! scalar. A tensor raised to a positive power is its tensor power.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::{RationalFunction, Var};
use crate::tensor::{Letter, TensorElement, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at column {}: {message}", .position + 1)]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub position: usize,
    pub message: String,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

/// Linear combination of words of possibly different signatures; the empty
/// word carries the scalar part.
pub type Combination = BTreeMap<Word, RationalFunction>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((Tok::Int(n), start));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^.()".contains(ch) {
            out.push((Tok::Sym(ch), i));
            i += 1;
        } else {
            let c = text[i..].chars().next().unwrap_or('?');
            return err(i, format!("unexpected character `{}`", c));
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

fn is_scalar(c: &Combination) -> bool {
    c.keys().all(|w| w.is_empty())
}

fn scalar_part(c: &Combination) -> RationalFunction {
    c.get(&Word::empty()).cloned().unwrap_or_else(RationalFunction::zero)
}

fn add_into(acc: &mut Combination, other: Combination, sign: &RationalFunction) {
    for (w, c) in other {
        let s = acc.get(&w).cloned().unwrap_or_else(RationalFunction::zero) + &c * sign;
        if s.is_zero() {
            acc.remove(&w);
        } else {
            acc.insert(w, s);
        }
    }
}

fn scale(c: Combination, k: &RationalFunction) -> Combination {
    if k.is_zero() {
        return Combination::new();
    }
    c.into_iter().map(|(w, x)| (w, &x * k)).collect()
}

fn tensor(a: &Combination, b: &Combination) -> Combination {
    let mut out = Combination::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let mut single = Combination::new();
            single.insert(wa.concat(wb), ca * cb);
            add_into(&mut out, single, &RationalFunction::one());
        }
    }
    out
}

fn scalar(c: RationalFunction) -> Combination {
    let mut m = Combination::new();
    if !c.is_zero() {
        m.insert(Word::empty(), c);
    }
    m
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Combination, ParseError> {
        let mut acc = self.term()?;
        loop {
            let sign = if self.eat('+') {
                1
            } else if self.eat('-') {
                -1
            } else {
                return Ok(acc);
            };
            let rhs = self.term()?;
            add_into(&mut acc, rhs, &RationalFunction::from_int(sign));
        }
    }

    fn term(&mut self) -> Result<Combination, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let at = self.offset();
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = match (is_scalar(&acc), is_scalar(&rhs)) {
                    (true, _) => scale(rhs, &scalar_part(&acc)),
                    (_, true) => scale(acc, &scalar_part(&rhs)),
                    _ => return err(at, "`*` between two tensors; use `.` for the tensor product"),
                };
            } else if self.eat('/') {
                let rhs = self.unary()?;
                if !is_scalar(&rhs) {
                    return err(at, "division by a tensor");
                }
                let d = scalar_part(&rhs);
                if d.is_zero() {
                    return err(at, "division by zero");
                }
                acc = scale(acc, &d.inv().expect("non-zero"));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Combination, ParseError> {
        if self.eat('-') {
            let x = self.unary()?;
            return Ok(scale(x, &RationalFunction::from_int(-1)));
        }
        self.tensor()
    }

    fn tensor(&mut self) -> Result<Combination, ParseError> {
        let mut acc = self.power()?;
        while self.eat('.') {
            let rhs = self.power()?;
            acc = tensor(&acc, &rhs);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Combination, ParseError> {
        let base = self.atom()?;
        let at = self.offset();
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        let exp_at = self.offset();
        let Tok::Int(n) = self.peek().clone() else {
            return err(exp_at, "expected an integer exponent");
        };
        self.pos += 1;
        let Ok(n) = i32::try_from(n) else {
            return err(exp_at, "exponent too large");
        };
        if is_scalar(&base) {
            let b = scalar_part(&base);
            if negative && b.is_zero() {
                return err(at, "negative power of zero");
            }
            return Ok(scalar(b.pow(if negative { -n } else { n })));
        }
        if negative {
            return err(at, "negative power of a tensor");
        }
        let mut acc = scalar(RationalFunction::one());
        for _ in 0..n {
            acc = tensor(&acc, &base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Combination, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(scalar(RationalFunction::from_bigint(n)))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(l) = Letter::from_name(&name) {
                    let mut m = Combination::new();
                    m.insert(Word(vec![l]), RationalFunction::one());
                    Ok(m)
                } else if let Some(v) = Var::from_name(&name) {
                    Ok(scalar(RationalFunction::var(v)))
                } else {
                    err(at, format!("unknown identifier `{}`", name))
                }
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return err(self.offset(), "expected `)`");
                }
                Ok(e)
            }
            Tok::Sym(c) => err(at, format!("unexpected `{}`", c)),
            Tok::End => err(at, "unexpected end of input"),
        }
    }
}

/// Parses any expression into a combination of words.
pub fn parse_combination(text: &str) -> Result<Combination, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return err(p.offset(), "unexpected trailing input");
    }
    Ok(e)
}

/// Parses a tensor expression whose terms share one signature. A pure
/// scalar parses to an element with the empty signature.
pub fn parse_expression(text: &str) -> Result<TensorElement, ParseError> {
    let comb = parse_combination(text)?;
    let Some(first) = comb.keys().next() else {
        return Ok(TensorElement::zero(&[]));
    };
    let sig = first.signature();
    if let Some(bad) = comb.keys().find(|w| w.signature() != sig) {
        return err(
            0,
            format!("terms `{}` and `{}` live in different tensor spaces", first, bad),
        );
    }
    Ok(TensorElement::from_terms(&sig, comb).expect("signature checked"))
}

/// Parses an element of the coefficient field.
pub fn parse_scalar(text: &str) -> Result<RationalFunction, ParseError> {
    let comb = parse_combination(text)?;
    if let Some(w) = comb.keys().find(|w| !w.is_empty()) {
        return err(0, format!("expected a scalar, found the tensor word `{}`", w));
    }
    Ok(scalar_part(&comb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Letter::*;

    fn q() -> RationalFunction {
        RationalFunction::var(Var::Q)
    }

    #[test]
    fn spin_one_vector() {
        let x = parse_expression("q^2*u.v - v.u").unwrap();
        let expected = TensorElement::from_pairs(&[(&[U, V], q().pow(2)), (&[V, U], RationalFunction::from_int(-1))]);
        assert_eq!(x, expected);
    }

    #[test]
    fn mixed_word_and_scalar_term() {
        assert_eq!(
            parse_expression("u.du").unwrap(),
            TensorElement::basis(Word(vec![U, DU]))
        );
        let b = parse_expression("(1/(1+q^4))*du.v").unwrap();
        let beta = RationalFunction::one() / (RationalFunction::one() + q().pow(4));
        assert_eq!(b, TensorElement::term(Word(vec![DU, V]), beta));
    }

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("q^-2").unwrap(), q().pow(-2));
        assert_eq!(parse_scalar("-q^2").unwrap(), -q().pow(2));
        assert_eq!(
            parse_scalar("(1 - q^2)/(1 + q^4)").unwrap().to_string(),
            "(1 - q^2)/(1 + q^4)"
        );
    }

    #[test]
    fn errors_are_positioned() {
        assert_eq!(parse_expression("u + xx").unwrap_err().position, 4);
        assert_eq!(parse_expression("u*v").unwrap_err().position, 1);
        assert!(parse_expression("u + du").is_err());
        assert!(parse_scalar("1/(q-q)").is_err());
        assert!(parse_expression("(u").is_err());
        assert!(parse_expression("u $").is_err());
    }

    #[test]
    fn tensor_power() {
        assert_eq!(parse_expression("u^2").unwrap(), TensorElement::basis(Word(vec![U, U])));
    }
}
