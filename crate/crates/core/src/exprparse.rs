//! Small arithmetic expression language for problem data.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'x' | 't' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | tan | exp | log | sqrt | abs | gamma
//! ```
//!
//! `-x^2` parses as `-(x^2)`; `2^-1` is allowed.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::special::{gamma, is_gamma_pole};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Gamma,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "gamma" => Func::Gamma,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Gamma => "gamma",
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
enum Node {
    Num(f64),
    X,
    T,
    Pi,
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// Parsed, immutable expression in the variables `x` and `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
}

impl Expression {
    /// The constant expression `value`.
    pub fn constant(value: f64) -> Self {
        if value < 0.0 {
            Expression {
                root: Node::Neg(Box::new(Node::Num(-value))),
            }
        } else {
            Expression {
                root: Node::Num(value),
            }
        }
    }

    pub fn zero() -> Self {
        Expression::constant(0.0)
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        eval_node(&self.root, x, t)
    }

    /// True when the expression mentions neither `x` nor `t`.
    pub fn is_constant(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::X | Node::T => false,
                Node::Num(_) | Node::Pi => true,
                Node::Neg(a) | Node::Call(_, a) => walk(a),
                Node::Bin(_, a, b) => walk(a) && walk(b),
            }
        }
        walk(&self.root)
    }

    pub fn mentions_t(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::T => true,
                Node::X | Node::Num(_) | Node::Pi => false,
                Node::Neg(a) | Node::Call(_, a) => walk(a),
                Node::Bin(_, a, b) => walk(a) || walk(b),
            }
        }
        walk(&self.root)
    }
}

impl FromStr for Expression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Parse `text` into an [`Expression`].
pub fn parse(text: &str) -> Result<Expression> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let root = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(Expression { root })
}

/// Evaluate `e` at `(x, t)`.
pub fn eval(e: &Expression, x: f64, t: f64) -> Result<f64> {
    e.eval(x, t)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn syntax(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let expo = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(expo)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.syntax(format!("unexpected `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Node::Num)
            .map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })
    }

    fn identifier(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match name {
            "x" => return Ok(Node::X),
            "t" => return Ok(Node::T),
            "pi" => return Ok(Node::Pi),
            _ => {}
        }
        let Some(func) = Func::from_name(name) else {
            return Err(Error::UnknownIdentifier(name.to_string()));
        };
        if !self.eat(b'(') {
            return Err(self.syntax(format!("expected `(` after `{name}`")));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.syntax("expected `)`"));
        }
        Ok(Node::Call(func, Box::new(arg)))
    }
}

fn eval_node(n: &Node, x: f64, t: f64) -> Result<f64> {
    let fail = |message: String| Error::Eval { message, x, t };
    Ok(match n {
        Node::Num(v) => *v,
        Node::X => x,
        Node::T => t,
        Node::Pi => std::f64::consts::PI,
        Node::Neg(a) => -eval_node(a, x, t)?,
        Node::Bin(op, a, b) => {
            let a = eval_node(a, x, t)?;
            let b = eval_node(b, x, t)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => {
                    if a < 0.0 && b.fract() != 0.0 {
                        return Err(fail(format!(
                            "negative base {a} with non-integer exponent {b}"
                        )));
                    }
                    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
                        a.powi(b as i32)
                    } else {
                        a.powf(b)
                    }
                }
            }
        }
        Node::Call(func, arg) => {
            let v = eval_node(arg, x, t)?;
            match func {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Tan => v.tan(),
                Func::Exp => v.exp(),
                Func::Log => {
                    if v <= 0.0 {
                        return Err(fail(format!("log of nonpositive value {v}")));
                    }
                    v.ln()
                }
                Func::Sqrt => {
                    if v < 0.0 {
                        return Err(fail(format!("sqrt of negative value {v}")));
                    }
                    v.sqrt()
                }
                Func::Abs => v.abs(),
                Func::Gamma => {
                    if is_gamma_pole(v) {
                        return Err(fail(format!("gamma at pole {v}")));
                    }
                    gamma(v)
                }
            }
        }
    })
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.root, f)
    }
}

/// Fully parenthesised output; re-parses to an equivalent tree.
fn write_node(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match n {
        Node::Num(v) => write!(f, "{v:?}"),
        Node::X => f.write_str("x"),
        Node::T => f.write_str("t"),
        Node::Pi => f.write_str("pi"),
        Node::Neg(a) => {
            f.write_str("(-")?;
            write_node(a, f)?;
            f.write_str(")")
        }
        Node::Bin(op, a, b) => {
            f.write_str("(")?;
            write_node(a, f)?;
            write!(f, " {} ", op.symbol())?;
            write_node(b, f)?;
            f.write_str(")")
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(a, f)?;
            f.write_str(")")
        }
    }
}
