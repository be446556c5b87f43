//! A small arithmetic expression language for scalar fields f(x).
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" unary)?
//! atom   := number | var | "pi" | func "(" expr ("," expr)* ")" | "(" expr ")"
//! var    := "x" digit+ | "x" | "y" | "z"
//! func   := sin | cos | exp | abs | sqrt | log | min | max
//! number := digit+ ("." digit*)? (("e" | "E") ("+" | "-")? digit+)?
//! ```
//!
//! Whitespace is ignored. `^` is right-associative and binds tighter than
//! unary minus, so `-x^2` is `-(x^2)`. Variables are 1-based: `x1` is the
//! first coordinate, and `x`, `y`, `z` alias `x1`, `x2`, `x3`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::subequation::ScalarField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
    Log,
    Min,
    Max,
}

impl Func {
    fn parse(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "sin" => (Func::Sin, 1),
            "cos" => (Func::Cos, 1),
            "exp" => (Func::Exp, 1),
            "abs" => (Func::Abs, 1),
            "sqrt" => (Func::Sqrt, 1),
            "log" => (Func::Log, 1),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Var(i) => x[*i],
            Node::Neg(a) => -a.eval(x),
            Node::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            Node::Call(f, args) => {
                let a = args[0].eval(x);
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Sqrt => a.sqrt(),
                    Func::Log => a.ln(),
                    Func::Min => a.min(args[1].eval(x)),
                    Func::Max => a.max(args[1].eval(x)),
                }
            }
        }
    }
}

/// A parsed expression in `n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    n: usize,
    src: String,
    root: Node,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Expr {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            lhs = Node::Bin(c as char, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            lhs = Node::Bin(c as char, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            return Ok(Node::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.s.len() && p.s[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        digits(self);
        if self.s.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.s.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.s.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        match text.parse::<f64>() {
            Ok(v) => Ok(Node::Num(v)),
            Err(_) => {
                self.pos = start;
                self.err(format!("bad number '{text}'"))
            }
        }
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        match name {
            "x" => Some(0),
            "y" => Some(1),
            "z" => Some(2),
            _ => {
                let digits = name.strip_prefix('x')?;
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return None;
                }
                digits
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1)
                    .map(|i| i - 1)
            }
        }
    }

    fn atom(&mut self) -> Result<Node> {
        let c = match self.peek() {
            Some(c) => c,
            None => return self.err("unexpected end of input"),
        };
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
            if name == "pi" {
                return Ok(Node::Num(std::f64::consts::PI));
            }
            if let Some((f, arity)) = Func::parse(name) {
                self.expect(b'(')?;
                let mut args = vec![self.expr()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    args.push(self.expr()?);
                }
                self.expect(b')')?;
                if args.len() != arity {
                    self.pos = start;
                    return self.err(format!(
                        "{name} takes {arity} argument(s), got {}",
                        args.len()
                    ));
                }
                return Ok(Node::Call(f, args));
            }
            if let Some(i) = self.var_index(name) {
                if i >= self.n {
                    self.pos = start;
                    return self.err(format!("variable {name} needs dimension ≥ {}", i + 1));
                }
                return Ok(Node::Var(i));
            }
            self.pos = start;
            return self.err(format!("unknown identifier '{name}'"));
        }
        self.err(format!("unexpected character '{}'", c as char))
    }
}

impl Expr {
    /// Parses `src` as an expression in the variables x1..xn.
    pub fn parse(src: &str, n: usize) -> Result<Expr> {
        if !src.is_ascii() {
            let pos = src
                .char_indices()
                .find(|(_, c)| !c.is_ascii())
                .map_or(0, |(i, _)| i);
            return Err(Error::Expr {
                pos,
                msg: "non-ASCII input".into(),
            });
        }
        let mut p = Parser {
            s: src.as_bytes(),
            pos: 0,
            n,
        };
        let root = p.expr()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(Expr {
            n,
            src: src.to_string(),
            root,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Panics if `x` has fewer than n coordinates.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert!(x.len() >= self.n, "expression needs {} coordinates", self.n);
        self.root.eval(x)
    }

    pub fn into_field(self) -> ScalarField {
        Arc::new(move |x| self.eval(x))
    }
}

/// Parses and wraps as a [`ScalarField`].
pub fn parse_field(src: &str, n: usize) -> Result<ScalarField> {
    Expr::parse(src, n).map(Expr::into_field)
}
