//! Operator-precedence parser for the supported Prolog subset.

use super::ast::{Assertion, Goal, SourceClause, SourceProgram, Term};
use super::lexer::{tokenize, Tok, Token};
use super::FrontendError;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Assoc {
    Xfx,
    Xfy,
    Yfx,
}

fn infix_op(name: &str) -> Option<(u32, Assoc)> {
    use Assoc::*;
    Some(match name {
        ":-" | "-->" => (1200, Xfx),
        ";" => (1100, Xfy),
        "->" => (1050, Xfy),
        "," => (1000, Xfy),
        "=" | "\\=" | "==" | "\\==" | "@<" | "@>" | "@=<" | "@>=" | "=.." | "is" | "=:=" | "=\\="
        | "<" | ">" | "=<" | ">=" => (700, Xfx),
        "+" | "-" | "/\\" | "\\/" => (500, Yfx),
        "*" | "/" | "//" | "mod" | "rem" | "<<" | ">>" => (400, Yfx),
        "**" => (200, Xfx),
        "^" => (200, Xfy),
        _ => return None,
    })
}

/// Prefix operators: (priority, argument max priority).
fn prefix_op(name: &str) -> Option<(u32, u32)> {
    Some(match name {
        ":-" | "?-" => (1200, 1199),
        "\\+" => (900, 900),
        "-" | "+" | "\\" => (200, 200),
        _ => return None,
    })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Token {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i]
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, message: impl Into<String>) -> FrontendError {
        FrontendError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn unsupported_at(t: &Token, construct: &str) -> FrontendError {
        FrontendError::Unsupported {
            construct: construct.to_string(),
            line: t.line,
            col: t.col,
        }
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Atom(a) | Tok::Quoted(a) => format!("`{a}`"),
            Tok::Var(v) => format!("variable `{v}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Float => "float".into(),
            Tok::Str => "string".into(),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::End => "end of clause".into(),
            Tok::Eof => "end of file".into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), FrontendError> {
        let t = self.peek();
        if t.tok == Tok::Punct(c) {
            self.advance();
            Ok(())
        } else {
            Err(Self::error_at(
                t,
                format!("expected `{c}`, found {}", Self::describe(&t.tok)),
            ))
        }
    }

    /// True when the current token can start a term.
    fn starts_term(&self) -> bool {
        match &self.peek().tok {
            Tok::Atom(a) => infix_op(a).is_none() || prefix_op(a).is_some() || self.is_functional(),
            Tok::Quoted(_) | Tok::Var(_) | Tok::Int(_) | Tok::Float | Tok::Str => true,
            Tok::Punct(c) => matches!(c, '(' | '[' | '{'),
            Tok::End | Tok::Eof => false,
        }
    }

    /// The current token is a name immediately followed by `(`.
    fn is_functional(&self) -> bool {
        let next = self.peek_at(1);
        next.tok == Tok::Punct('(') && !next.layout_before
    }

    fn arguments(&mut self) -> Result<Vec<Term>, FrontendError> {
        self.expect_punct('(')?;
        let mut args = vec![self.parse(999)?];
        while self.peek().tok == Tok::Punct(',') {
            self.advance();
            args.push(self.parse(999)?);
        }
        self.expect_punct(')')?;
        Ok(args)
    }

    fn list(&mut self) -> Result<Term, FrontendError> {
        self.expect_punct('[')?;
        if self.peek().tok == Tok::Punct(']') {
            self.advance();
            return Ok(Term::nil());
        }
        let mut items = vec![self.parse(999)?];
        while self.peek().tok == Tok::Punct(',') {
            self.advance();
            items.push(self.parse(999)?);
        }
        let tail = if self.peek().tok == Tok::Punct('|') {
            self.advance();
            self.parse(999)?
        } else {
            Term::nil()
        };
        self.expect_punct(']')?;
        Ok(items
            .into_iter()
            .rev()
            .fold(tail, |acc, item| Term::cons(item, acc)))
    }

    fn primary(&mut self, max: u32) -> Result<(Term, u32), FrontendError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(i) => {
                self.advance();
                Ok((Term::Int(i), 0))
            }
            Tok::Var(v) => {
                self.advance();
                Ok((Term::Var(v), 0))
            }
            Tok::Float => Err(Self::unsupported_at(&t, "floating-point number")),
            Tok::Str => Err(Self::unsupported_at(&t, "string literal")),
            Tok::Punct('(') => {
                self.advance();
                let inner = self.parse(1200)?;
                self.expect_punct(')')?;
                Ok((inner, 0))
            }
            Tok::Punct('[') => {
                let l = self.list()?;
                if let Term::Atom(_) = l {
                    if self.is_functional() {
                        return Err(Self::error_at(&t, "`[]` cannot be a functor"));
                    }
                }
                Ok((l, 0))
            }
            Tok::Punct('{') => Err(Self::unsupported_at(&t, "curly-brace term")),
            Tok::Quoted(name) => {
                if self.is_functional() {
                    self.advance();
                    let args = self.arguments()?;
                    Ok((Term::Compound(name, args), 0))
                } else {
                    self.advance();
                    Ok((Term::Atom(name), 0))
                }
            }
            Tok::Atom(name) => {
                if self.is_functional() {
                    self.advance();
                    let args = self.arguments()?;
                    return Ok((Term::Compound(name, args), 0));
                }
                self.advance();
                if name == "-" || name == "+" {
                    let next = self.peek();
                    if let (Tok::Int(i), false) = (&next.tok, next.layout_before) {
                        let i = *i;
                        self.advance();
                        return Ok((Term::Int(if name == "-" { -i } else { i }), 0));
                    }
                }
                if let Some((p, arg_max)) = prefix_op(&name) {
                    let operand_follows = match &self.peek().tok {
                        Tok::Atom(a) => infix_op(a).is_none() || self.is_functional() || prefix_op(a).is_some(),
                        _ => self.starts_term(),
                    };
                    if operand_follows && p <= max {
                        let arg = self.parse(arg_max)?;
                        return Ok((Term::Compound(name, vec![arg]), p));
                    }
                }
                Ok((Term::Atom(name), 0))
            }
            Tok::Punct(_) | Tok::End | Tok::Eof => Err(Self::error_at(
                &t,
                format!("unexpected {}", Self::describe(&t.tok)),
            )),
        }
    }

    fn parse(&mut self, max: u32) -> Result<Term, FrontendError> {
        let (mut left, mut left_prec) = self.primary(max)?;
        loop {
            let name = match &self.peek().tok {
                Tok::Atom(a) => a.clone(),
                Tok::Punct(',') => ",".to_string(),
                Tok::Punct('|') => ";".to_string(),
                _ => break,
            };
            let Some((p, assoc)) = infix_op(&name) else {
                break;
            };
            let (left_max, right_max) = match assoc {
                Assoc::Xfx => (p - 1, p - 1),
                Assoc::Xfy => (p - 1, p),
                Assoc::Yfx => (p, p - 1),
            };
            if p > max || left_prec > left_max {
                break;
            }
            self.advance();
            let right = self.parse(right_max)?;
            left = Term::Compound(name, vec![left, right]);
            left_prec = p;
        }
        Ok(left)
    }

    /// Reads one clause term and its terminating `.`.
    fn clause_term(&mut self) -> Result<Term, FrontendError> {
        let t = self.parse(1200)?;
        let end = self.peek();
        if end.tok != Tok::End {
            return Err(Self::error_at(
                end,
                format!("operator expected, found {}", Self::describe(&end.tok)),
            ));
        }
        self.advance();
        Ok(t)
    }
}

fn flatten_conj(t: Term, out: &mut Vec<Term>) {
    match t {
        Term::Compound(f, args) if f == "," && args.len() == 2 => {
            let mut it = args.into_iter();
            flatten_conj(it.next().unwrap(), out);
            flatten_conj(it.next().unwrap(), out);
        }
        Term::Atom(a) if a == "true" && !out.is_empty() => {}
        other => out.push(other),
    }
}

fn goal(t: Term, line: usize, col: usize) -> Result<Goal, FrontendError> {
    let unsupported = |construct: &str| FrontendError::Unsupported {
        construct: construct.to_string(),
        line,
        col,
    };
    match t {
        Term::Var(_) => Err(unsupported("meta-call (variable goal)")),
        Term::Int(_) => Err(FrontendError::Syntax {
            line,
            col,
            message: "a number is not callable".into(),
        }),
        Term::Compound(f, args) => match (f.as_str(), args.len()) {
            ("=", 2) => {
                let mut it = args.into_iter();
                Ok(Goal::Eq(it.next().unwrap(), it.next().unwrap()))
            }
            (";", 2) => Err(unsupported("disjunction")),
            ("->", 2) => Err(unsupported("if-then-else")),
            ("\\+", 1) => Err(unsupported("negation as failure")),
            ("call", _) | ("findall", 3) | ("bagof", 3) | ("setof", 3) => {
                Err(unsupported(&format!("meta-call ({f}/{})", args.len())))
            }
            _ => Ok(Goal::Call(Term::Compound(f, args))),
        },
        atom => Ok(Goal::Call(atom)),
    }
}

fn check_head(head: &Term, line: usize, col: usize) -> Result<(), FrontendError> {
    match head {
        Term::Atom(_) | Term::Compound(..) => Ok(()),
        _ => Err(FrontendError::Syntax {
            line,
            col,
            message: format!("clause head `{head}` is not callable"),
        }),
    }
}

/// Parses a whole program.
pub fn parse_program(src: &str) -> Result<SourceProgram, FrontendError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
    };
    let mut prog = SourceProgram::default();
    while p.peek().tok != Tok::Eof {
        let start = p.peek().clone();
        let (line, col) = (start.line, start.col);
        let term = p.clause_term()?;
        match term {
            Term::Compound(f, args) if f == ":-" && args.len() == 2 => {
                let mut it = args.into_iter();
                let head = it.next().unwrap();
                check_head(&head, line, col)?;
                let mut goals = Vec::new();
                flatten_conj(it.next().unwrap(), &mut goals);
                let body = goals
                    .into_iter()
                    .filter(|g| !matches!(g, Term::Atom(a) if a == "true"))
                    .map(|g| goal(g, line, col))
                    .collect::<Result<Vec<_>, _>>()?;
                prog.clauses.push(SourceClause { head, body, line });
            }
            Term::Compound(f, args) if f == ":-" && args.len() == 1 => {
                prog.assertions.push(directive(args.into_iter().next().unwrap(), line, col)?);
            }
            Term::Compound(f, _) if f == "?-" => {
                return Err(Parser::unsupported_at(&start, "query directive"))
            }
            Term::Compound(f, args) if f == "-->" && args.len() == 2 => {
                return Err(Parser::unsupported_at(&start, "DCG rule"))
            }
            head => {
                check_head(&head, line, col)?;
                prog.clauses.push(SourceClause {
                    head,
                    body: Vec::new(),
                    line,
                });
            }
        }
    }
    Ok(prog)
}

fn directive(t: Term, line: usize, col: usize) -> Result<Assertion, FrontendError> {
    match t {
        Term::Compound(f, args) if f == "assertion" && args.len() == 2 => {
            let mut it = args.into_iter();
            let head = it.next().unwrap();
            check_head(&head, line, col)?;
            match it.next().unwrap() {
                Term::Atom(formula) => Ok(Assertion {
                    head,
                    formula,
                    line,
                }),
                other => Err(FrontendError::Syntax {
                    line,
                    col,
                    message: format!("assertion formula must be a quoted atom, found `{other}`"),
                }),
            }
        }
        other => {
            let what = other
                .pred_key()
                .map(|k| k.to_string())
                .unwrap_or_else(|| other.to_string());
            Err(FrontendError::Unsupported {
                construct: format!("directive {what}"),
                line,
                col,
            })
        }
    }
}

/// Parses a single term, with or without a trailing `.`.
pub fn parse_term(src: &str) -> Result<Term, FrontendError> {
    let mut toks = tokenize(src)?;
    if !toks.iter().any(|t| t.tok == Tok::End) {
        let eof = toks.pop().expect("token stream ends with eof");
        toks.push(Token {
            tok: Tok::End,
            ..eof.clone()
        });
        toks.push(eof);
    }
    let mut p = Parser { toks, pos: 0 };
    let t = p.clause_term()?;
    if p.peek().tok != Tok::Eof {
        return Err(Parser::error_at(p.peek(), "trailing input after term"));
    }
    Ok(t)
}
