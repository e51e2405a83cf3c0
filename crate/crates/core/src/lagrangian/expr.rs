//! Expression trees over `t`, `x`, `r` and a recursive-descent parser.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | var | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus and associates to the right, so
//! `-r^2 = -(r^2)` and `2^3^2 = 2^9`.

use std::fmt;

use super::dual::Scalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    X,
    R,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::R => "r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

/// Fully parenthesized; parsing the output gives back an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

impl Expr {
    pub fn parse(src: &str, allowed: &[Var]) -> Result<Expr> {
        let mut p = Parser {
            tokens: tokenize(src)?,
            pos: 0,
            allowed,
            src_len: src.len(),
        };
        if p.tokens.is_empty() {
            return Err(Error::Syntax {
                pos: 0,
                msg: "empty expression".into(),
            });
        }
        let e = p.expr()?;
        if let Some(tok) = p.tokens.get(p.pos) {
            return Err(Error::Syntax {
                pos: tok.pos,
                msg: format!("unexpected {}", tok.kind),
            });
        }
        Ok(e)
    }

    /// Evaluates with the given variable bindings. `abs` at 0 and `sqrt` at 0
    /// are rejected only when the argument carries a tangent.
    pub fn eval<S: Scalar>(&self, t: S, x: S, r: S) -> Result<S> {
        match self {
            Expr::Num(v) => Ok(S::constant(*v)),
            Expr::Var(Var::T) => Ok(t),
            Expr::Var(Var::X) => Ok(x),
            Expr::Var(Var::R) => Ok(r),
            Expr::Neg(e) => Ok(-e.eval(t, x, r)?),
            Expr::Call(func, e) => {
                let a = e.eval(t, x, r)?;
                let v = a.primal();
                match func {
                    Func::Sin => Ok(a.sin()),
                    Func::Cos => Ok(a.cos()),
                    Func::Exp => Ok(a.exp()),
                    Func::Log if v <= 0.0 => {
                        Err(self.domain(format!("log of non-positive value {v}")))
                    }
                    Func::Log => Ok(a.ln()),
                    Func::Sqrt if v < 0.0 => {
                        Err(self.domain(format!("sqrt of negative value {v}")))
                    }
                    Func::Sqrt if v == 0.0 && a.has_tangent() => Err(self.non_differentiable()),
                    Func::Sqrt => Ok(a.sqrt()),
                    Func::Abs if v == 0.0 && a.has_tangent() => Err(self.non_differentiable()),
                    Func::Abs => Ok(a.abs()),
                }
            }
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval(t, x, r)?;
                let b = rhs.eval(t, x, r)?;
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div if b.primal() == 0.0 => Err(self.domain("division by zero".into())),
                    BinOp::Div => Ok(a / b),
                    BinOp::Pow => self.pow(a, b),
                }
            }
        }
        .and_then(|v: S| {
            if v.primal().is_finite() {
                Ok(v)
            } else {
                Err(self.domain(format!("non-finite result {}", v.primal())))
            }
        })
    }

    fn pow<S: Scalar>(&self, base: S, exponent: S) -> Result<S> {
        let (b, e) = (base.primal(), exponent.primal());
        let integral = e.fract() == 0.0 && e.abs() <= i32::MAX as f64;
        if integral && !exponent.has_tangent() {
            if b == 0.0 && e < 0.0 {
                return Err(self.domain("zero raised to a negative power".into()));
            }
            return Ok(base.powi(e as i32));
        }
        if b < 0.0 {
            return Err(self.domain(format!("negative base {b} with non-integer exponent")));
        }
        if b == 0.0 {
            if e > 0.0 && !base.has_tangent() && !exponent.has_tangent() {
                return Ok(S::constant(0.0));
            }
            return Err(self.non_differentiable());
        }
        Ok((exponent * base.ln()).exp())
    }

    fn domain(&self, msg: String) -> Error {
        Error::Domain {
            node: self.to_string(),
            msg,
        }
    }

    fn non_differentiable(&self) -> Error {
        Error::NonDifferentiable {
            node: self.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Num(v) => write!(f, "number {v}"),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Op(c) => write!(f, "`{c}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token {
                    kind: TokenKind::Op(c as char),
                    pos: start,
                });
                i += 1;
            }
            b'(' | b')' => {
                out.push(Token {
                    kind: if c == b'(' {
                        TokenKind::LParen
                    } else {
                        TokenKind::RParen
                    },
                    pos: start,
                });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: format!("malformed number `{text}`"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: format!("number `{text}` is out of range"),
                    });
                }
                out.push(Token {
                    kind: TokenKind::Num(v),
                    pos: start,
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: TokenKind::Ident(src[start..i].to_string()),
                    pos: start,
                });
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    allowed: &'a [Var],
    src_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.src_len, |t| t.pos)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(&TokenKind::Op(c)) if ops.contains(&c) => {
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.peek() {
            Some(TokenKind::RParen) => {
                self.pos += 1;
                Ok(())
            }
            other => Err(Error::Syntax {
                pos: self.here(),
                msg: match other {
                    Some(k) => format!("expected `)`, found {k}"),
                    None => "expected `)`, found end of input".into(),
                },
            }),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.here();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok {
            TokenKind::Num(v) => Ok(Expr::Num(v)),
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if self.peek() != Some(&TokenKind::LParen) {
                        return Err(Error::Syntax {
                            pos: self.here(),
                            msg: format!("expected `(` after `{name}`"),
                        });
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                let var = match name.as_str() {
                    "t" => Var::T,
                    "x" => Var::X,
                    "r" => Var::R,
                    _ => return Err(Error::UnknownIdentifier { name, pos }),
                };
                if !self.allowed.contains(&var) {
                    return Err(Error::UnknownIdentifier { name, pos });
                }
                Ok(Expr::Var(var))
            }
            other => Err(Error::Syntax {
                pos,
                msg: format!("unexpected {other}"),
            }),
        }
    }
}
