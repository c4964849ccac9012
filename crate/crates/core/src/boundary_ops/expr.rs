//! Small expression language for custom boundary symbols.
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := "-" unary | power
//! power := atom ("^" unary)?
//! atom  := number | "i" | "pi" | "xi" | "xi2" | "tau"
//!        | func "(" expr ")" | "(" expr ")"
//! func  := sqrt_minus | sqrt_plus | sqrt | exp | abs
//! ```
//! `xi` is |ξ|, `xi2` is |ξ|², `tau` is the complex Laplace variable γ + iδ.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spectral_core::{sqrt_minus, sqrt_plus};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    I,
    Xi,
    Xi2,
    Tau,
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Func {
    SqrtMinus,
    SqrtPlus,
    Sqrt,
    Exp,
    Abs,
}

impl Expr {
    pub fn eval(&self, xi: f64, tau: C64) -> C64 {
        match self {
            Expr::Num(v) => C64::new(*v, 0.0),
            Expr::I => C64::new(0.0, 1.0),
            Expr::Xi => C64::new(xi, 0.0),
            Expr::Xi2 => C64::new(xi * xi, 0.0),
            Expr::Tau => tau,
            Expr::Neg(a) => -a.eval(xi, tau),
            Expr::Bin(op, a, b) => {
                let x = a.eval(xi, tau);
                let y = b.eval(xi, tau);
                match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => x / y,
                    Op::Pow => {
                        if y.im == 0.0 && y.re.fract() == 0.0 && y.re.abs() < 64.0 {
                            x.powi(y.re as i32)
                        } else {
                            x.powc(y)
                        }
                    }
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval(xi, tau);
                match f {
                    Func::SqrtMinus => sqrt_minus(x),
                    Func::SqrtPlus => sqrt_plus(x),
                    Func::Sqrt => x.sqrt(),
                    Func::Exp => x.exp(),
                    Func::Abs => C64::new(x.norm(), 0.0),
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col0: usize,
}

/// Parse `src`; `line` and `col0` locate the expression inside a config file.
pub fn parse_at(src: &str, line: usize, col0: usize) -> Result<Expr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, line, col0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

pub fn parse(src: &str) -> Result<Expr> {
    parse_at(src, 1, 1)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { line: self.line, col: self.col0 + self.pos, msg: msg.to_string() }
    }

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
        while let Some(c) = self.peek() {
            let op = match c {
                b'+' => Op::Add,
                b'-' => Op::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek() {
            let op = match c {
                b'*' => Op::Mul,
                b'/' => Op::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let func = match word {
                    "i" => return Ok(Expr::I),
                    "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
                    "xi" => return Ok(Expr::Xi),
                    "xi2" => return Ok(Expr::Xi2),
                    "tau" => return Ok(Expr::Tau),
                    "sqrt_minus" => Func::SqrtMinus,
                    "sqrt_plus" => Func::SqrtPlus,
                    "sqrt" => Func::Sqrt,
                    "exp" => Func::Exp,
                    "abs" => Func::Abs,
                    _ => {
                        self.pos = start;
                        return Err(self.err(&format!("unknown identifier '{word}'")));
                    }
                };
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected '(' after function name"));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let exp_sign = (c == b'+' || c == b'-') && self.pos > start && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse::<f64>().map(Expr::Num).map_err(|_| {
            self.pos = start;
            self.err(&format!("bad number '{s}'"))
        })
    }
}
