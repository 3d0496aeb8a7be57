//! Arithmetic expressions over the coordinates `x1..xn`, evaluated on any
//! [`Scalar`] so fields built from them are differentiable.

use std::collections::BTreeMap;
use std::fmt;

use excalc_core::Scalar;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected {found}, expected {expected}")]
    Unexpected {
        found: String,
        expected: &'static str,
    },
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error("coordinate x{index} out of range for dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },
    #[error("invalid number {0:?}")]
    InvalidNumber(String),
    #[error("exponent must be an integer")]
    NonIntegerExponent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    const ALL: [(&'static str, Func); 8] = [
        ("sin", Func::Sin),
        ("cos", Func::Cos),
        ("tan", Func::Tan),
        ("exp", Func::Exp),
        ("log", Func::Log),
        ("sqrt", Func::Sqrt),
        ("sinh", Func::Sinh),
        ("cosh", Func::Cosh),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL
            .iter()
            .find(|(_, f)| *f == self)
            .map(|(n, _)| *n)
            .unwrap_or("?")
    }

    fn lookup(name: &str) -> Option<Func> {
        Self::ALL.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
    }

    fn apply<S: Scalar>(self, v: S) -> S {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// A named constant and its value.
    Const(String, f64),
    /// Zero-based coordinate index.
    Coord(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        match self {
            Expr::Num(v) | Expr::Const(_, v) => S::from_f64(*v),
            Expr::Coord(i) => x[*i],
            Expr::Neg(e) => -e.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(e, n) => e.eval(x).powi(*n),
            Expr::Call(f, e) => f.apply(e.eval(x)),
        }
    }

    /// True when the expression mentions no coordinate.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Const(..) => true,
            Expr::Coord(_) => false,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(v) if *v < 0.0 => 3,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Const(name, _) => f.write_str(name),
            Expr::Coord(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_child(f, e.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = self.precedence();
                a.fmt_child(f, a.precedence() < p)?;
                f.write_str(match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => " * ",
                    BinOp::Div => " / ",
                })?;
                b.fmt_child(f, b.precedence() <= p)
            }
            Expr::Pow(e, n) => {
                e.fmt_child(f, e.precedence() <= 4)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Op(c) => format!("{c:?}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| ParseError {
                line: l0,
                col: c0,
                kind: ParseErrorKind::InvalidNumber(text.clone()),
            })?;
            Tok::Num(v)
        } else if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ParseError {
                        line: l0,
                        col: c0,
                        kind: ParseErrorKind::UnexpectedChar(c),
                    })
                }
            }
        };
        col += i - start;
        out.push(Lexed {
            tok,
            line: l0,
            col: c0,
        });
    }
    out.push(Lexed {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

/// Named constants visible to expressions, beyond `pi` and `e`.
pub type Constants = BTreeMap<String, f64>;

struct Parser<'a> {
    toks: Vec<Lexed>,
    pos: usize,
    dim: usize,
    constants: &'a Constants,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        self.error(ParseErrorKind::Unexpected {
            found: self.peek().describe(),
            expected,
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.pos += 1;
            let n = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    /// Integer exponent, right-associative: `2^3^2` is `2^9`.
    fn exponent(&mut self) -> Result<i32, ParseError> {
        let neg = *self.peek() == Tok::Op('-');
        if neg {
            self.pos += 1;
        }
        let n = match *self.peek() {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
            Tok::Num(_) => return Err(self.error(ParseErrorKind::NonIntegerExponent)),
            _ => return Err(self.unexpected("integer exponent")),
        };
        self.pos += 1;
        let mut n = if neg { -n } else { n };
        if *self.peek() == Tok::Op('^') {
            self.pos += 1;
            let m = self.exponent()?;
            if m < 0 {
                return Err(self.error(ParseErrorKind::NonIntegerExponent));
            }
            n = n
                .checked_pow(m as u32)
                .ok_or_else(|| self.error(ParseErrorKind::NonIntegerExponent))?;
        }
        Ok(n)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::Ident(name) => {
                let here = self.pos;
                self.pos += 1;
                if *self.peek() == Tok::LParen {
                    let Some(func) = Func::lookup(&name) else {
                        self.pos = here;
                        return Err(self.error(ParseErrorKind::UnknownFunction(name)));
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return Err(self.unexpected("')'"));
                    }
                    self.pos += 1;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                self.pos = here;
                let e = self.identifier(&name)?;
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.unexpected("expression")),
        }
    }

    fn identifier(&self, name: &str) -> Result<Expr, ParseError> {
        if let Some(v) = self.constants.get(name) {
            return Ok(Expr::Const(name.to_string(), *v));
        }
        match name {
            "pi" => return Ok(Expr::Const("pi".into(), std::f64::consts::PI)),
            "e" => return Ok(Expr::Const("e".into(), std::f64::consts::E)),
            _ => {}
        }
        if let Some(digits) = name.strip_prefix('x') {
            if let Ok(index) = digits.parse::<usize>() {
                if index == 0 || index > self.dim {
                    return Err(self.error(ParseErrorKind::CoordinateOutOfRange {
                        index,
                        dim: self.dim,
                    }));
                }
                return Ok(Expr::Coord(index - 1));
            }
        }
        Err(self.error(ParseErrorKind::UnknownIdentifier(name.to_string())))
    }
}

/// Parse with the built-in constants `pi` and `e` only.
pub fn parse_expression(src: &str, dim: usize) -> Result<Expr, ParseError> {
    parse_with_constants(src, dim, &Constants::new())
}

pub fn parse_with_constants(
    src: &str,
    dim: usize,
    constants: &Constants,
) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        dim,
        constants,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}
