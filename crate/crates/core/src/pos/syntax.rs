//! Textual formula syntax.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! formula := imp ('<=>' imp)*
//! imp     := or ('=>' imp)?
//! or      := and ('|' and)*
//! and     := unary ('&' unary)*
//! unary   := '~' unary | 'true' | 'false' | name | '(' formula ')'
//! ```
//!
//! Printing produces the sum of all prime implicants, which is canonical.

use thiserror::Error;

use super::{BoolFn, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("formula syntax error at offset {offset}: {message}")]
pub struct FormulaSyntaxError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    And,
    Or,
    Not,
    Implies,
    Iff,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaSyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '&' => {
                i += 1;
                Tok::And
            }
            '|' => {
                i += 1;
                Tok::Or
            }
            '~' => {
                i += 1;
                Tok::Not
            }
            '(' => {
                i += 1;
                Tok::LParen
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '=' if text[i..].starts_with("=>") => {
                i += 2;
                Tok::Implies
            }
            '<' if text[i..].starts_with("<=>") => {
                i += 3;
                Tok::Iff
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                Tok::Name(text[start..i].to_string())
            }
            other => {
                return Err(FormulaSyntaxError {
                    offset: i,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'r> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
    resolve: &'r mut dyn FnMut(&str) -> Option<VarId>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.len)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, FormulaSyntaxError> {
        Err(FormulaSyntaxError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn formula(&mut self) -> Result<BoolFn, FormulaSyntaxError> {
        let mut f = self.imp()?;
        while self.peek() == Some(&Tok::Iff) {
            self.pos += 1;
            let g = self.imp()?;
            f = f.iff(&g);
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<BoolFn, FormulaSyntaxError> {
        let f = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.pos += 1;
            let g = self.imp()?;
            return Ok(f.implies(&g));
        }
        Ok(f)
    }

    fn or(&mut self) -> Result<BoolFn, FormulaSyntaxError> {
        let mut f = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            f = f.disj(&self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<BoolFn, FormulaSyntaxError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            f = f.conj(&self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<BoolFn, FormulaSyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(self.unary()?.negate())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(f)
            }
            Some(Tok::Name(name)) => {
                let f = match name.as_str() {
                    "true" | "1" => BoolFn::top(),
                    "false" | "0" => BoolFn::bottom(),
                    _ => match (self.resolve)(&name) {
                        Some(v) => BoolFn::var(v),
                        None => return self.err(format!("unknown variable `{name}`")),
                    },
                };
                self.pos += 1;
                Ok(f)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of formula"),
        }
    }
}

/// Parses `text`, mapping each variable name through `resolve`.
pub fn parse_formula(
    text: &str,
    resolve: &mut dyn FnMut(&str) -> Option<VarId>,
) -> Result<BoolFn, FormulaSyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
        resolve,
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parses a formula over positional names `<letter>1 .. <letter>N`
/// (for example `x1`, `a3`), mapping position `i` to `VarId(i - 1)`.
pub fn parse_positional(text: &str) -> Result<BoolFn, FormulaSyntaxError> {
    parse_formula(text, &mut |name| {
        let digits = name.trim_start_matches(|c: char| c.is_ascii_alphabetic());
        if digits.len() == name.len() || digits.is_empty() {
            return None;
        }
        match digits.parse::<u32>() {
            Ok(n) if n >= 1 => Some(VarId(n - 1)),
            _ => None,
        }
    })
}

/// Canonical sum-of-products rendering: prime implicants joined by `|`,
/// literals joined by `&`, negation as `~`.
pub fn format_formula(f: &BoolFn, name: &dyn Fn(VarId) -> String) -> String {
    if f.is_true() {
        return "true".to_string();
    }
    if f.is_false() {
        return "false".to_string();
    }
    f.prime_implicants()
        .iter()
        .map(|cube| {
            cube.iter()
                .map(|&(v, positive)| {
                    if positive {
                        name(v)
                    } else {
                        format!("~{}", name(v))
                    }
                })
                .collect::<Vec<_>>()
                .join(" & ")
        })
        .collect::<Vec<_>>()
        .join(" | ")
}
