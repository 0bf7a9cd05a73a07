//! A small expression language for problem configuration files.
//!
//! Variables: `t`, `x`, `alpha`. Functions: `exp`, `ln`, `sin`, `cos`,
//! `sqrt`, `abs`, `gamma` (one argument), `uppergamma` (two arguments).
//! Operator precedence, loosest to tightest: `+ -`, `* /`, unary minus,
//! `^` (right-associative), so `-x^2` parses as `-(x^2)` and `2^-3` is
//! accepted. Parse errors report a byte offset into the source string.

use std::fmt;

use crate::error::{Error, Result};
use crate::specfun::{gamma_fn, upper_incomplete_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    X,
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Abs,
    Gamma,
    UpperGamma,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Gamma => "gamma",
            Func::UpperGamma => "uppergamma",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::UpperGamma => 2,
            _ => 1,
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "gamma" => Func::Gamma,
            "uppergamma" => Func::UpperGamma,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn evaluate(&self, t: f64, x: f64, alpha: f64) -> Result<f64> {
        Ok(match self {
            Expr::Number(v) => *v,
            Expr::Var(Var::T) => t,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Alpha) => alpha,
            Expr::Neg(e) => -e.evaluate(t, x, alpha)?,
            Expr::Bin(op, a, b) => {
                let a = a.evaluate(t, x, alpha)?;
                let b = b.evaluate(t, x, alpha)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].evaluate(t, x, alpha)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Ln => a.ln(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sqrt => a.sqrt(),
                    Func::Abs => a.abs(),
                    Func::Gamma => gamma_fn(a)?,
                    Func::UpperGamma => {
                        let b = args[1].evaluate(t, x, alpha)?;
                        upper_incomplete_gamma(a, b)?
                    }
                }
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    /// Prints a form that parses back to an equivalent expression.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Number(v) => write!(f, "{v}"),
            Expr::Var(Var::T) => write!(f, "t"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::Alpha) => write!(f, "alpha"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                paren(f, e, 3)
            }
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                if *op == BinOp::Pow {
                    // right-associative: parenthesize an exponent tower on
                    // the left, not on the right
                    paren(f, a, p + 1)?;
                    write!(f, "{sym}")?;
                    paren(f, b, 3)
                } else {
                    paren(f, a, p)?;
                    write!(f, "{sym}")?;
                    // left-associative: the right operand needs one more
                    paren(f, b, p + 1)
                }
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while lx.pos < lx.src.len() {
            let start = lx.pos;
            let b = lx.src[lx.pos];
            match b {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    lx.pos += 1;
                    continue;
                }
                b'+' => out.push((start, Tok::Plus)),
                b'-' => out.push((start, Tok::Minus)),
                b'*' => out.push((start, Tok::Star)),
                b'/' => out.push((start, Tok::Slash)),
                b'^' => out.push((start, Tok::Caret)),
                b'(' => out.push((start, Tok::LParen)),
                b')' => out.push((start, Tok::RParen)),
                b',' => out.push((start, Tok::Comma)),
                b'0'..=b'9' | b'.' => {
                    out.push((start, lx.number()?));
                    continue;
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    out.push((start, lx.ident()));
                    continue;
                }
                _ => {
                    return Err(Error::Parse {
                        offset: start,
                        message: format!("unexpected character {:?}", b as char),
                    })
                }
            }
            lx.pos += 1;
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<Tok> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // optional exponent
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Tok::Number).map_err(|_| Error::Parse {
            offset: start,
            message: format!("invalid number literal {text:?}"),
        })
    }

    fn ident(&mut self) -> Tok {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Tok::Ident(
            std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii")
                .to_owned(),
        )
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

pub fn parse_expression(src: &str) -> Result<Expr> {
    let toks = Lexer::tokens(src)?;
    if toks.is_empty() {
        return Err(Error::Parse {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(Error::Parse {
            offset: p.toks[p.pos].0,
            message: format!("unexpected trailing {:?}", p.toks[p.pos].1),
        });
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    /// `factor := '-' factor | power` — `^` below binds tighter, so
    /// `-x^2` is `-(x^2)`.
    fn factor(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    /// `power := atom ('^' factor)?` — right-associative, and the exponent
    /// may carry its own unary minus.
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let exp = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Number(v)) => Ok(Expr::Number(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "closing parenthesis")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    let func = Func::lookup(&name).ok_or_else(|| Error::Parse {
                        offset,
                        message: format!("unknown function {name:?}"),
                    })?;
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "closing parenthesis")?;
                    if args.len() != func.arity() {
                        return Err(Error::Parse {
                            offset,
                            message: format!(
                                "{} takes {} argument(s), got {}",
                                func.name(),
                                func.arity(),
                                args.len()
                            ),
                        });
                    }
                    Ok(Expr::Call(func, args))
                } else {
                    match name.as_str() {
                        "t" => Ok(Expr::Var(Var::T)),
                        "x" => Ok(Expr::Var(Var::X)),
                        "alpha" => Ok(Expr::Var(Var::Alpha)),
                        _ => Err(Error::Parse {
                            offset,
                            message: format!("unknown variable {name:?}"),
                        }),
                    }
                }
            }
            Some(tok) => Err(Error::Parse {
                offset,
                message: format!("unexpected {tok:?}"),
            }),
            None => Err(Error::Parse {
                offset,
                message: "unexpected end of expression".into(),
            }),
        }
    }
}
