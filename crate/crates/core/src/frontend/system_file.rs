//! Line-oriented system definition files.
//!
//! ```text
//! # name: circle, m = 2
//! # expect: conformal
//! m = 2
//! f1 = 3*q1*(p1*q1+p2*q2)/(1+p1^2+p2^2)
//! f2 = 3*q2*(p1*q1+p2*q2)/(1+p1^2+p2^2)
//! ```
//!
//! Metadata lives in comments so that it never affects the grammar.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parser::parse_at;
use crate::error::{Error, Result};
use crate::expr::MAX_DIM;
use crate::jet::OdeSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Conformal,
    NotConformal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rhs {
    pub text: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemFile {
    pub m: usize,
    pub rhs: Vec<Rhs>,
    pub name: Option<String>,
    pub expect: Option<Expectation>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, column, message: message.into() }
}

/// Splits `lhs = rhs`, returning the trimmed sides and the column of the rhs.
fn assignment(raw: &str, line: usize) -> Result<(&str, &str, usize)> {
    let eq = raw.find('=').ok_or_else(|| syntax(line, 1, "expected `name = value`"))?;
    let rhs = &raw[eq + 1..];
    let lead = rhs.len() - rhs.trim_start().len();
    let column = raw[..eq + 1 + lead].chars().count() + 1;
    Ok((raw[..eq].trim(), rhs.trim(), column))
}

fn metadata(comment: &str, name: &mut Option<String>, expect: &mut Option<Expectation>, line: usize) -> Result<()> {
    let body = comment.trim();
    if let Some(v) = body.strip_prefix("name:") {
        *name = Some(v.trim().to_string());
    } else if let Some(v) = body.strip_prefix("expect:") {
        *expect = Some(match v.trim() {
            "conformal" => Expectation::Conformal,
            "not_conformal" | "not conformal" => Expectation::NotConformal,
            other => return Err(syntax(line, 1, format!("unknown expectation `{other}`"))),
        });
    }
    Ok(())
}

pub fn parse_system_file(text: &str) -> Result<SystemFile> {
    let mut m: Option<usize> = None;
    let mut slots: Vec<Option<Rhs>> = Vec::new();
    let (mut name, mut expect) = (None, None);
    for (n, raw_line) in text.lines().enumerate() {
        let line = n + 1;
        let (code, comment) = match raw_line.find('#') {
            Some(h) => (&raw_line[..h], Some(&raw_line[h + 1..])),
            None => (raw_line, None),
        };
        if let Some(c) = comment {
            metadata(c, &mut name, &mut expect, line)?;
        }
        if code.trim().is_empty() {
            continue;
        }
        let (lhs, value, column) = assignment(code, line)?;
        match m {
            None => {
                if lhs != "m" {
                    return Err(syntax(line, 1, "the first definition must be `m = <int>`"));
                }
                let dim: usize =
                    value.parse().map_err(|_| syntax(line, column, format!("invalid dimension `{value}`")))?;
                if dim < 2 {
                    return Err(Error::InvalidSystem(format!("dimension must be at least 2, got {dim}")));
                }
                if dim > MAX_DIM {
                    return Err(Error::UnsupportedDimension(dim));
                }
                m = Some(dim);
                slots = vec![None; dim];
            }
            Some(dim) => {
                let index = lhs
                    .strip_prefix('f')
                    .and_then(|i| i.parse::<usize>().ok())
                    .ok_or_else(|| syntax(line, 1, format!("expected `f<i> = <expr>`, found `{lhs}`")))?;
                if index == 0 || index > dim {
                    return Err(Error::IndexOutOfRange { var: format!("f{index}"), m: dim });
                }
                if slots[index - 1].is_some() {
                    return Err(syntax(line, 1, format!("f{index} defined twice")));
                }
                if value.is_empty() {
                    return Err(syntax(line, column, "empty right-hand side"));
                }
                slots[index - 1] = Some(Rhs { text: value.to_string(), line, column });
            }
        }
    }
    let m = m.ok_or_else(|| Error::InvalidSystem("missing `m = <int>`".into()))?;
    let rhs = slots
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| Error::InvalidSystem(format!("missing right-hand side f{}", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SystemFile { m, rhs, name, expect })
}

pub fn read_system_file(path: &Path) -> Result<SystemFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_system_file(&text)
}

impl SystemFile {
    pub fn to_system(&self) -> Result<OdeSystem> {
        let f = self.rhs.iter().map(|r| parse_at(&r.text, self.m, r.line, r.column)).collect::<Result<Vec<_>>>()?;
        OdeSystem::new(self.m, f)
    }

    /// Canonical text of the file; parses back to an equal value.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(n) = &self.name {
            out += &format!("# name: {n}\n");
        }
        if let Some(e) = self.expect {
            let e = match e {
                Expectation::Conformal => "conformal",
                Expectation::NotConformal => "not_conformal",
            };
            out += &format!("# expect: {e}\n");
        }
        out += &format!("m = {}\n", self.m);
        for (i, r) in self.rhs.iter().enumerate() {
            out += &format!("f{} = {}\n", i + 1, r.text);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = "# name: circle\n# expect: conformal\nm = 2\n\nf2 = 3*q2*(p1*q1+p2*q2)/(1+p1^2+p2^2)  # second\nf1=3*q1*(p1*q1+p2*q2)/(1+p1^2+p2^2)\n";

    #[test]
    fn reads_metadata_and_any_order() {
        let f = parse_system_file(CIRCLE).unwrap();
        assert_eq!(f.m, 2);
        assert_eq!(f.name.as_deref(), Some("circle"));
        assert_eq!(f.expect, Some(Expectation::Conformal));
        assert!(f.rhs[0].text.starts_with("3*q1"));
        assert_eq!((f.rhs[1].line, f.rhs[1].column), (5, 6));
        f.to_system().unwrap();
    }

    #[test]
    fn render_round_trips() {
        let f = parse_system_file(CIRCLE).unwrap();
        let g = parse_system_file(&f.render()).unwrap();
        assert_eq!(f.m, g.m);
        assert_eq!(f.name, g.name);
        assert_eq!(f.rhs.iter().map(|r| &r.text).collect::<Vec<_>>(), g.rhs.iter().map(|r| &r.text).collect::<Vec<_>>());
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse_system_file("f1 = 0\nm = 2"), Err(Error::Syntax { line: 1, .. })));
        assert!(matches!(parse_system_file("m = 2\nf1 = 0"), Err(Error::InvalidSystem(_))));
        assert!(matches!(parse_system_file("m = 2\nf3 = 0"), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(parse_system_file("m = 2\nf1 = 0\nf1 = 1\nf2 = 0"), Err(Error::Syntax { line: 3, .. })));
        assert!(matches!(parse_system_file("m = 9\n"), Err(Error::UnsupportedDimension(9))));
        assert!(matches!(parse_system_file("m = two\n"), Err(Error::Syntax { line: 1, column: 5, .. })));
    }

    #[test]
    fn expression_errors_carry_file_positions() {
        let f = parse_system_file("m = 2\nf1 = p1 +* q1\nf2 = 0").unwrap();
        assert!(matches!(f.to_system(), Err(Error::Syntax { line: 2, column: 10, .. })));
        let f = parse_system_file("m = 2\nf1 = q3\nf2 = 0").unwrap();
        assert!(matches!(f.to_system(), Err(Error::IndexOutOfRange { .. })));
        let f = parse_system_file("m = 2\nf1 = p1^(1/2)\nf2 = 0").unwrap();
        assert!(matches!(f.to_system(), Err(Error::NonIntegerExponent { line: 2, .. })));
    }
}
