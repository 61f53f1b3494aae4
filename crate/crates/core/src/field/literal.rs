//! Text form of field elements.
//!
//! Grammar (whitespace ignored):
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := power (('*' | '/') power)*
//! power  := atom ['^' ['-'] int]
//! atom   := int | 'p' | 'w' | 's' | 'O' '(' expr ')' | '(' expr ')'
//! ```
//! `O(x)` is zero known only to the valuation of `x`, so `2 + 3*5 + O(5^4)`
//! is known mod 5^4 and `5^-1 * (2 + O(5^3))` is known mod 5^2.

use num_bigint::BigInt;

use super::{Elem, ExtFieldSpec, Field};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(char),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((start, Tok::Int(text.parse().expect("digits"))));
        } else if matches!(c, 'p' | 'w' | 's' | 'O') {
            out.push((i, Tok::Ident(c)));
            i += 1;
        } else if matches!(c, '+' | '-' | '*' | '/' | '^' | '(' | ')') {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse { position: i, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    field: &'a Field,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(i, _)| *i).unwrap_or(self.len)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: self.here(), message: message.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Elem> {
        let negate = self.eat('-');
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Elem> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.power()?);
            } else if self.eat('/') {
                let d = self.power()?;
                acc = acc.div(&d)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Elem> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let k = match self.peek() {
                Some(Tok::Int(n)) => {
                    let n = i64::try_from(n.clone()).or_else(|_| self.err("exponent too large"))?;
                    self.pos += 1;
                    n
                }
                _ => return self.err("expected integer exponent"),
            };
            return base.pow(if neg { -k } else { k });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Elem> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of input"),
        };
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok(Elem::from_int(self.field, &n)),
            Tok::Ident('p') => Ok(Elem::from_i64(self.field, self.field.p() as i64)),
            Tok::Ident('w') => match self.field.ext() {
                ExtFieldSpec::Unramified { .. } => Ok(Elem::generator(self.field).expect("gen")),
                _ => {
                    self.pos -= 1;
                    self.err("`w` needs an unramified extension")
                }
            },
            Tok::Ident('s') => match self.field.ext() {
                ExtFieldSpec::SqrtP => Ok(Elem::generator(self.field).expect("gen")),
                _ => {
                    self.pos -= 1;
                    self.err("`s` needs the sqrt(p) extension")
                }
            },
            Tok::Ident('O') => {
                if !self.eat('(') {
                    return self.err("expected `(` after O");
                }
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(Elem::zero_with_ord_prec(self.field, inner.ord()))
            }
            Tok::Op('(') => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            _ => {
                self.pos -= 1;
                self.err("unexpected token")
            }
        }
    }
}

/// Parses a literal such as `"5^-1 * (2 + 3*5 + O(5^10))"` or `"(1 + O(5^8)) + (2)*w"`.
pub fn parse_literal(field: &Field, s: &str) -> Result<Elem> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Parse { position: 0, message: "empty literal".into() });
    }
    let mut parser = Parser { field, toks, pos: 0, len: s.len() };
    let x = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return parser.err("trailing input");
    }
    Ok(x)
}

fn format_padic(field: &Field, x: &super::padic::PAdic) -> String {
    let p = field.p();
    if x.is_exact_zero() {
        return "0".into();
    }
    if x.is_zero() {
        return format!("O({p}^{})", x.prec.min(field.cap()));
    }
    // shown to the nominal cap; guard digits stay internal
    let shown = (x.prec - x.val).min(field.cap());
    let mut digits = x.digits(field.base());
    digits.truncate(shown.max(0) as usize);
    let mut terms = Vec::new();
    for (i, d) in digits.iter().enumerate() {
        if *d == 0 {
            continue;
        }
        terms.push(match i {
            0 => format!("{d}"),
            1 => format!("{d}*{p}"),
            _ => format!("{d}*{p}^{i}"),
        });
    }
    terms.push(format!("O({p}^{})", shown));
    let body = terms.join(" + ");
    if x.val == 0 {
        body
    } else {
        format!("{p}^{} * ({body})", x.val)
    }
}

pub(crate) fn format_elem(x: &Elem) -> String {
    let field = x.field();
    let coords = x.coords();
    if coords.len() == 1 {
        return format_padic(field, &coords[0]);
    }
    let sym = match field.ext() {
        ExtFieldSpec::SqrtP => "s",
        _ => "w",
    };
    let mut terms = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        if c.is_exact_zero() {
            continue;
        }
        let lit = format_padic(field, c);
        terms.push(match i {
            0 => format!("({lit})"),
            1 => format!("({lit})*{sym}"),
            _ => format!("({lit})*{sym}^{i}"),
        });
    }
    if terms.is_empty() {
        return "0".into();
    }
    terms.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeConfig;

    #[test]
    fn parses_digit_expansions() {
        let f = Field::qp(5, 20).unwrap();
        let x = parse_literal(&f, "2 + 3*p + O(p^4)").unwrap();
        assert_eq!(x.to_i64(), Some(17));
        assert_eq!(x.prec_ord(), 4);
        let y = parse_literal(&f, "5^-1 * (2 + O(5^3))").unwrap();
        assert_eq!(y.ord(), -1);
        assert_eq!(y.prec_ord(), 2);
        assert_eq!(parse_literal(&f, "2 + O(5^10)").unwrap().prec_ord(), 10);
    }

    #[test]
    fn formats_canonically() {
        let f = Field::qp(5, 6).unwrap();
        assert_eq!(f.int(17).to_string(), "2 + 3*5 + O(5^6)");
        assert_eq!(f.rational(1, 5).unwrap().to_string(), "5^-1 * (1 + O(5^6))");
        assert_eq!(f.zero().to_string(), "0");
        assert_eq!(f.int(-1).to_string(), "4 + 4*5 + 4*5^2 + 4*5^3 + 4*5^4 + 4*5^5 + O(5^6)");
    }

    #[test]
    fn extension_literals_round_trip() {
        let f = Field::new(PrimeConfig::new(3, 8).unwrap(), ExtFieldSpec::SqrtP).unwrap();
        let x = parse_literal(&f, "1 + 2*s + O(3^5)").unwrap();
        let back = parse_literal(&f, &x.to_string()).unwrap();
        assert_eq!(x, back);
        let g = Field::new(PrimeConfig::new(5, 8).unwrap(), ExtFieldSpec::unramified(5, 2).unwrap()).unwrap();
        let y = parse_literal(&g, "3 + w*w").unwrap();
        assert_eq!(y.to_i64(), Some(1));
    }

    #[test]
    fn rejects_garbage() {
        let f = Field::qp(5, 20).unwrap();
        assert!(matches!(parse_literal(&f, "2 + x"), Err(Error::Parse { position: 4, .. })));
        assert!(parse_literal(&f, "w").is_err());
        assert!(parse_literal(&f, "(1 + 2").is_err());
    }
}
