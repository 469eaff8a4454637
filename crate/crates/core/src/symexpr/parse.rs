//! Expression grammar:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' INT)?
//! atom  := INT | IDENT | '(' expr ')'
//! ```

use num_bigint::BigInt;

use super::{Chart, RatFunc, Rational, Result, SymError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((Tok::Int(n), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(SymError::Syntax {
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                let pos = self.pos();
                self.at += 1;
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(SymError::LiteralDivisionByZero { pos });
                }
                acc = acc / d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let e = match self.peek() {
            Some(Tok::Int(n)) => u32::try_from(n.clone()).map_err(|_| SymError::Syntax {
                pos,
                msg: "exponent too large".into(),
            })?,
            _ => {
                return Err(SymError::Syntax {
                    pos,
                    msg: "expected a nonnegative integer exponent".into(),
                })
            }
        };
        self.at += 1;
        if self.peek() == Some(&Tok::Op('^')) {
            return Err(SymError::Syntax {
                pos: self.pos(),
                msg: "chained exponents need parentheses".into(),
            });
        }
        let e = i32::try_from(e).map_err(|_| SymError::Syntax {
            pos,
            msg: "exponent too large".into(),
        })?;
        base.pow(e)
    }

    fn atom(&mut self) -> Result<RatFunc> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(RatFunc::constant(self.chart, Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                RatFunc::var(self.chart, &name)
                    .map_err(|_| SymError::UnknownIdentifier { name, pos })
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(SymError::Syntax {
                        pos: self.pos(),
                        msg: "expected `)`".into(),
                    });
                }
                Ok(inner)
            }
            Some(Tok::Op(c)) => Err(SymError::Syntax {
                pos,
                msg: format!("unexpected `{c}`"),
            }),
            None => Err(SymError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parse `text` into the canonical rational function it denotes over `chart`.
pub fn parse(text: &str, chart: &Chart) -> Result<RatFunc> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        chart,
    };
    let r = p.expr()?;
    if p.at != p.toks.len() {
        return Err(SymError::Syntax {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(r)
}
