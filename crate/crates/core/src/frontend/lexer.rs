use super::FrontendError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    /// Unquoted name, symbol-char sequence or solo char (`!`, `;`).
    Atom(String),
    /// Quoted atom; never treated as an operator.
    Quoted(String),
    Var(String),
    Int(i64),
    Float,
    Str,
    Punct(char),
    /// Clause terminator.
    End,
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// Whitespace or a comment precedes the token.
    pub layout_before: bool,
}

const SYMBOL_CHARS: &str = "+-*/\\^<>=~:.?@#&$";

fn is_symbol(c: char) -> bool {
    SYMBOL_CHARS.contains(c)
}

fn is_alnum(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, col: usize, message: impl Into<String>) -> FrontendError {
        FrontendError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    /// Skips whitespace and comments; reports whether anything was skipped.
    fn skip_layout(&mut self) -> Result<bool, FrontendError> {
        let mut skipped = false;
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            None => return Err(self.error(line, col, "unterminated block comment")),
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                        }
                    }
                }
                _ => return Ok(skipped),
            }
            skipped = true;
        }
    }

    fn quoted(&mut self, quote: char, line: usize, col: usize) -> Result<String, FrontendError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(line, col, "unterminated quoted item")),
                Some(c) if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        out.push(quote);
                    } else {
                        return Ok(out);
                    }
                }
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some('\\') => out.push('\\'),
                    Some('\'') => out.push('\''),
                    Some('"') => out.push('"'),
                    Some('\n') => {}
                    Some(c) => {
                        return Err(self.error(self.line, self.col - 1, format!("unknown escape `\\{c}`")))
                    }
                    None => return Err(self.error(line, col, "unterminated quoted item")),
                },
                Some(c) => out.push(c),
            }
        }
    }

    fn number(&mut self, line: usize, col: usize) -> Result<Tok, FrontendError> {
        if self.peek() == Some('0') && self.peek_at(1) == Some('\'') {
            self.bump();
            self.bump();
            let c = match self.bump() {
                Some('\\') => match self.bump() {
                    Some('n') => '\n',
                    Some('t') => '\t',
                    Some(c) => c,
                    None => return Err(self.error(line, col, "unterminated character code")),
                },
                Some('\'') if self.peek() == Some('\'') => {
                    self.bump();
                    '\''
                }
                Some(c) => c,
                None => return Err(self.error(line, col, "unterminated character code")),
            };
            return Ok(Tok::Int(c as i64));
        }
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            if matches!(self.peek(), Some('e' | 'E')) {
                self.bump();
                if matches!(self.peek(), Some('+' | '-')) {
                    self.bump();
                }
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
            }
            return Ok(Tok::Float);
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<i64>()
            .map(Tok::Int)
            .map_err(|_| self.error(line, col, format!("integer `{text}` out of range")))
    }

    fn next(&mut self) -> Result<Token, FrontendError> {
        let layout_before = self.skip_layout()?;
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok(Token {
                tok: Tok::Eof,
                line,
                col,
                layout_before,
            });
        };
        let tok = match c {
            c if c.is_ascii_digit() => self.number(line, col)?,
            c if c == '_' || c.is_ascii_uppercase() => Tok::Var(self.take_while(is_alnum)),
            c if c.is_ascii_lowercase() => Tok::Atom(self.take_while(is_alnum)),
            '\'' => Tok::Quoted(self.quoted('\'', line, col)?),
            '"' => {
                self.quoted('"', line, col)?;
                Tok::Str
            }
            '`' => {
                self.quoted('`', line, col)?;
                Tok::Str
            }
            '(' | ')' | '[' | ']' | '{' | '}' | ',' | '|' => {
                self.bump();
                Tok::Punct(c)
            }
            '!' | ';' => {
                self.bump();
                Tok::Atom(c.to_string())
            }
            '.' if self
                .peek_at(1)
                .is_none_or(|n| n.is_whitespace() || n == '%') =>
            {
                self.bump();
                Tok::End
            }
            c if is_symbol(c) => Tok::Atom(self.take_while(is_symbol)),
            other => return Err(self.error(line, col, format!("unexpected character {other:?}"))),
        };
        Ok(Token {
            tok,
            line,
            col,
            layout_before,
        })
    }

    fn take_while(&mut self, pred: fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|&c| pred(c)) {
            s.push(c);
            self.bump();
        }
        s
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lx = Lexer {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next()?;
        let eof = t.tok == Tok::Eof;
        out.push(t);
        if eof {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn basic_tokens() {
        assert_eq!(
            toks("qs([M|Xs], S) :- M =< 10. % done"),
            vec![
                Tok::Atom("qs".into()),
                Tok::Punct('('),
                Tok::Punct('['),
                Tok::Var("M".into()),
                Tok::Punct('|'),
                Tok::Var("Xs".into()),
                Tok::Punct(']'),
                Tok::Punct(','),
                Tok::Var("S".into()),
                Tok::Punct(')'),
                Tok::Atom(":-".into()),
                Tok::Var("M".into()),
                Tok::Atom("=<".into()),
                Tok::Int(10),
                Tok::End,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn quoted_comments_and_codes() {
        assert_eq!(
            toks("/* c */ 'it''s' 0'a =.. \"s\" 1.5"),
            vec![
                Tok::Quoted("it's".into()),
                Tok::Int(97),
                Tok::Atom("=..".into()),
                Tok::Str,
                Tok::Float,
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn positions() {
        let t = tokenize("a.\n  b(X).").unwrap();
        assert_eq!((t[2].line, t[2].col), (2, 3));
        assert!(t[2].layout_before);
        assert!(!t[3].layout_before);
    }

    #[test]
    fn errors() {
        assert!(tokenize("'abc").is_err());
        assert!(tokenize("/* x").is_err());
        assert!(tokenize("a € b").is_err());
    }
}
