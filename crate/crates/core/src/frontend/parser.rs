//! Recursive descent parser for right-hand-side expressions.
//!
//! Precedence from loosest to tightest: `+ -`, `* /`, unary `-`, `^`.
//! `^` is right-associative and takes an integer constant exponent.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::expr::{Expr, VarId};

pub fn parse_expression(text: &str, m: usize) -> Result<Expr> {
    parse_at(text, m, 1, 1)
}

/// Parses `text` as if it started at `line`, `column` of some file.
pub fn parse_at(text: &str, m: usize, line: usize, column: usize) -> Result<Expr> {
    let tokens = tokenize(text, line, column)?;
    let mut p = Parser { tokens, pos: 0, m, end: (line, column + text.chars().count()) };
    let e = p.sum()?;
    if let Some(t) = p.peek() {
        return Err(p.syntax(t, format!("unexpected `{}`", t.kind)));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kind::Int(n) => write!(f, "{n}"),
            Kind::Ident(s) => f.write_str(s),
            Kind::Sym(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: Kind,
    line: usize,
    column: usize,
}

fn tokenize(text: &str, line: usize, column: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = column + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                return Err(Error::Syntax {
                    line,
                    column: column + i,
                    message: "decimal literals are not allowed; write a ratio of integers".into(),
                });
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token { kind: Kind::Int(s.parse().unwrap()), line, column: col });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { kind: Kind::Ident(chars[start..i].iter().collect()), line, column: col });
        } else if "+-*/^()".contains(c) {
            out.push(Token { kind: Kind::Sym(c), line, column: col });
            i += 1;
        } else {
            return Err(Error::Syntax { line, column: col, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    m: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_sym(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: Kind::Sym(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn syntax(&self, t: &Token, message: String) -> Error {
        Error::Syntax { line: t.line, column: t.column, message }
    }

    fn eof(&self) -> Error {
        Error::Syntax { line: self.end.0, column: self.end.1, message: "unexpected end of expression".into() }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut terms = vec![self.product()?];
        while let Some(c @ ('+' | '-')) = self.peek_sym() {
            self.pos += 1;
            let t = self.product()?;
            terms.push(if c == '-' { -t } else { t });
        }
        Ok(Expr::sum(terms))
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_sym() {
            let tok = self.tokens[self.pos].clone();
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == '*' {
                match acc.node() {
                    crate::expr::ExprNode::Product(fs) if !fs.is_empty() => {
                        let mut fs = fs.clone();
                        fs.push(rhs);
                        Expr::product(fs)
                    }
                    _ => Expr::product(vec![acc, rhs]),
                }
            } else {
                if rhs.normalize(self.m).map(|f| f.is_zero()).unwrap_or(false) {
                    return Err(Error::ZeroDenominator(format!(
                        "{}:{}: denominator is identically zero",
                        tok.line, tok.column
                    )));
                }
                Expr::quotient(acc, rhs)
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_sym() == Some('-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_sym() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.peek().cloned().ok_or_else(|| self.eof())?;
        let exp = self.unary()?;
        let bad = || Error::NonIntegerExponent { line: at.line, column: at.column };
        if exp.check_dim(self.m).is_err() {
            return Err(bad());
        }
        let c: BigRational = exp.normalize(self.m).ok().and_then(|f| f.as_constant()).ok_or_else(bad)?;
        if !c.is_integer() {
            return Err(bad());
        }
        let n = c.to_integer().to_i64().filter(|n| n.abs() <= 1 << 16).ok_or_else(|| {
            Error::Syntax { line: at.line, column: at.column, message: "exponent too large".into() }
        })?;
        if n < 0 && base.normalize(self.m).map(|f| f.is_zero()).unwrap_or(false) {
            return Err(Error::ZeroDenominator(format!("{}:{}: negative power of zero", at.line, at.column)));
        }
        Ok(Expr::pow(base, n))
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.peek().cloned().ok_or_else(|| self.eof())?;
        self.pos += 1;
        match &t.kind {
            Kind::Int(n) => Ok(Expr::constant(BigRational::from_integer(n.clone()))),
            Kind::Ident(name) => self.variable(name, &t),
            Kind::Sym('(') => {
                let e = self.sum()?;
                match self.peek_sym() {
                    Some(')') => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(match self.peek() {
                        Some(u) => self.syntax(u, "expected `)`".into()),
                        None => self.eof(),
                    }),
                }
            }
            Kind::Sym(c) => Err(self.syntax(&t, format!("unexpected `{c}`"))),
        }
    }

    fn variable(&self, name: &str, t: &Token) -> Result<Expr> {
        if name == "x" {
            return Ok(Expr::x());
        }
        let unknown = || Error::UnknownVariable { line: t.line, column: t.column, name: name.to_string() };
        let (head, digits) = name.split_at(1);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(unknown());
        }
        let kind: fn(usize) -> VarId = match head {
            "y" => VarId::Y,
            "p" => VarId::P,
            "q" => VarId::Q,
            _ => return Err(unknown()),
        };
        let i: usize = digits.parse().map_err(|_| unknown())?;
        let v = kind(i);
        v.check(self.m).map_err(|_| Error::IndexOutOfRange { var: name.to_string(), m: self.m })?;
        Ok(Expr::var(v))
    }
}
