//! Polynomial literals: `+`, `-`, `*`, `^` with integer exponents, parentheses, decimal
//! constants and the variables `x`, `y`, `z` or `x1`, `x2`, ….

use std::fmt;

use whitney_core::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Character offset of the problem, counted from 0.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at position {}", self.message, self.position)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err<T>(&self, position: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn is_minus(c: char) -> bool {
        c == '-' || c == '−'
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            if c == '+' {
                self.pos += 1;
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if Self::is_minus(c) {
                self.pos += 1;
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(c) if Self::is_minus(c) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err(start, "exponents must be nonnegative integers");
            }
            if self.chars.get(self.pos) == Some(&'.') {
                return self.err(self.pos, "exponents must be nonnegative integers");
            }
            let text: String = self.chars[start..self.pos].iter().collect();
            let e = text
                .parse::<u32>()
                .or_else(|_| self.err(start, format!("exponent {text} is too large")))?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = match self.peek() {
            None => return self.err(self.pos, "unexpected end of input"),
            Some(_) => self.pos,
        };
        let c = self.chars[start];
        if c == '(' {
            self.pos += 1;
            let inner = self.expr()?;
            if self.peek() != Some(')') {
                return self.err(self.pos, "expected ')'");
            }
            self.pos += 1;
            return Ok(inner);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number(start);
        }
        if matches!(c, 'x' | 'y' | 'z') {
            self.pos += 1;
            let digits_start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits_start == self.pos {
                return Ok(Expr::Var(match c {
                    'x' => 0,
                    'y' => 1,
                    _ => 2,
                }));
            }
            if c != 'x' {
                return self.err(start, format!("only x takes an index, found '{c}'"));
            }
            let text: String = self.chars[digits_start..self.pos].iter().collect();
            return match text.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(Expr::Var(k - 1)),
                _ => self.err(digits_start, format!("variable index {text} must be at least 1")),
            };
        }
        self.err(start, format!("unexpected character '{c}'"))
    }

    fn number(&mut self, start: usize) -> Result<Expr, ParseError> {
        let n = self.chars.len();
        while self.pos < n && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.') {
            self.pos += 1;
        }
        if self.pos < n && matches!(self.chars[self.pos], 'e' | 'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < n && matches!(self.chars[self.pos], '+' | '-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < n && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits == self.pos {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Expr::Num)
            .or_else(|_| self.err(start, format!("malformed number '{text}'")))
    }
}

impl Expr {
    fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(k) => Some(*k),
            Expr::Neg(a) | Expr::Pow(a, _) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn build(&self, dim: usize) -> whitney_core::Result<Polynomial<f64>> {
        Ok(match self {
            Expr::Num(v) => Polynomial::constant(dim, *v),
            Expr::Var(k) => Polynomial::variable(dim, *k),
            Expr::Neg(a) => a.build(dim)?.scale(-1.0),
            Expr::Add(a, b) => a.build(dim)?.add(&b.build(dim)?)?,
            Expr::Sub(a, b) => a.build(dim)?.sub(&b.build(dim)?)?,
            Expr::Mul(a, b) => a.build(dim)?.mul(&b.build(dim)?)?,
            Expr::Pow(a, e) => {
                let base = a.build(dim)?;
                let mut acc = Polynomial::constant(dim, 1.0);
                for _ in 0..*e {
                    acc = acc.mul(&base)?;
                }
                acc
            }
        })
    }
}

/// Number of variables a literal mentions (`x3` alone needs three).
pub fn variables_used(src: &str) -> Result<usize, ParseError> {
    Ok(parse_expr(src)?.max_var().map_or(0, |k| k + 1))
}

fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
    };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return p.err(p.pos, format!("unexpected character '{c}'"));
    }
    Ok(e)
}

/// Parses `src` as a polynomial in `dim` variables.
pub fn parse_polynomial(src: &str, dim: usize) -> Result<Polynomial<f64>, ParseError> {
    let e = parse_expr(src)?;
    if let Some(k) = e.max_var() {
        if k >= dim {
            return Err(ParseError {
                position: 0,
                message: format!("variable x{} exceeds the body dimension {dim}", k + 1),
            });
        }
    }
    e.build(dim).map_err(|err| ParseError {
        position: 0,
        message: err.to_string(),
    })
}
