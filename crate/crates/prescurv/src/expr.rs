//! A small expression language for target-curvature prescriptions:
//! numbers, `t`, `+ - * /`, unary minus, parentheses, and `sin`, `cos`,
//! `exp`.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Expr(format!(
                "unexpected trailing input at byte {} in {src:?}",
                p.pos
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => t,
            Expr::Neg(e) => -e.eval(t),
            Expr::Add(a, b) => a.eval(t) + b.eval(t),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Mul(a, b) => a.eval(t) * b.eval(t),
            Expr::Div(a, b) => a.eval(t) / b.eval(t),
            Expr::Sin(e) => e.eval(t).sin(),
            Expr::Cos(e) => e.eval(t).cos(),
            Expr::Exp(e) => e.eval(t).exp(),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Expr("missing closing parenthesis".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "t" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "sin" | "cos" | "exp" => {
                        if self.peek() != Some(b'(') {
                            return Err(Error::Expr(format!("{name} needs parentheses")));
                        }
                        self.pos += 1;
                        let e = self.expr()?;
                        if self.peek() != Some(b')') {
                            return Err(Error::Expr("missing closing parenthesis".into()));
                        }
                        self.pos += 1;
                        let b = Box::new(e);
                        Ok(match name {
                            "sin" => Expr::Sin(b),
                            "cos" => Expr::Cos(b),
                            _ => Expr::Exp(b),
                        })
                    }
                    other => Err(Error::Expr(format!("unknown identifier {other:?}"))),
                }
            }
            other => Err(Error::Expr(format!("unexpected token {other:?}"))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| {
            c.is_ascii_digit() || *c == b'.' || *c == b'e' || *c == b'E'
            || ((*c == b'+' || *c == b'-')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E'))
        }) {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse::<f64>()
            .map(Expr::Num)
            .map_err(|e| Error::Expr(format!("bad number {s:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_evaluates() {
        let e = Expr::parse("2 + sin(t)").unwrap();
        assert!((e.eval(0.5) - (2.0 + 0.5f64.sin())).abs() < 1e-15);
        let e = Expr::parse("1 + t*t - t/2").unwrap();
        assert!((e.eval(3.0) - (1.0 + 9.0 - 1.5)).abs() < 1e-15);
        let e = Expr::parse("exp(-t) * cos(2*t) + 1.5e-1").unwrap();
        assert!((e.eval(1.0) - ((-1.0f64).exp() * 2.0f64.cos() + 0.15)).abs() < 1e-15);
        let e = Expr::parse("-(t - 1)").unwrap();
        assert!((e.eval(3.0) + 2.0).abs() < 1e-15);
        assert!((Expr::parse("2*pi").unwrap().eval(0.0) - std::f64::consts::TAU).abs() < 1e-15);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("2 +").is_err());
        assert!(Expr::parse("sin t").is_err());
        assert!(Expr::parse("foo(t)").is_err());
        assert!(Expr::parse("(1 + 2").is_err());
        assert!(Expr::parse("1 2").is_err());
    }
}
