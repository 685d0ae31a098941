//! Recursive-descent parser for the expression grammar.

use super::{Expression, Func, Params};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Next token plus its starting byte offset.
    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => {
                self.lex_number(start)?;
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("invalid number literal `{text}`"),
                })?;
                Tok::Num(value)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Ident(text.to_string())
            }
            other => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", other as char),
                });
            }
        };
        Ok((tok, start))
    }

    fn lex_number(&mut self, start: usize) -> Result<()> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit() {
                return Err(Error::Syntax {
                    offset: start,
                    message: "digits required after decimal point".into(),
                });
            }
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // not an exponent after all (e.g. `2*exp(x0)` sliced oddly);
                // back off and let the identifier lexer handle it
                self.pos = mark;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: (Tok, usize),
    dim: usize,
    params: &'a Params,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, dim: usize, params: &'a Params) -> Result<Self> {
        let mut lexer = Lexer::new(src);
        let lookahead = lexer.next()?;
        Ok(Parser {
            lexer,
            lookahead,
            dim,
            params,
        })
    }

    fn advance(&mut self) -> Result<(Tok, usize)> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.lookahead, next))
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut lhs = self.term()?;
        loop {
            match self.lookahead.0 {
                Tok::Plus => {
                    self.advance()?;
                    lhs = lhs + self.term()?;
                }
                Tok::Minus => {
                    self.advance()?;
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expression> {
        let mut lhs = self.unary()?;
        loop {
            match self.lookahead.0 {
                Tok::Star => {
                    self.advance()?;
                    lhs = lhs * self.unary()?;
                }
                Tok::Slash => {
                    self.advance()?;
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expression> {
        if self.lookahead.0 == Tok::Minus {
            self.advance()?;
            // folding literals here keeps negative constants as single nodes,
            // which is what Display emits
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression> {
        let base = self.atom()?;
        if self.lookahead.0 == Tok::Caret {
            self.advance()?;
            let exponent = self.unary()?;
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expression> {
        let (tok, offset) = self.advance()?;
        match tok {
            Tok::Num(v) => Ok(Expression::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                let (close, off) = self.advance()?;
                if close != Tok::RParen {
                    return Err(Error::Syntax {
                        offset: off,
                        message: "expected `)`".into(),
                    });
                }
                Ok(inner)
            }
            Tok::Ident(name) => self.ident(name, offset),
            other => Err(Error::Syntax {
                offset,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn ident(&mut self, name: String, offset: usize) -> Result<Expression> {
        if let Some(func) = Func::from_name(&name) {
            if self.lookahead.0 == Tok::LParen {
                self.advance()?;
                let arg = self.expr()?;
                let (close, off) = self.advance()?;
                if close != Tok::RParen {
                    return Err(Error::Syntax {
                        offset: off,
                        message: "expected `)` after function argument".into(),
                    });
                }
                return Ok(Expression::apply(func, arg));
            }
            return Err(Error::Syntax {
                offset,
                message: format!("function `{name}` requires parenthesized argument"),
            });
        }
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = rest.parse().map_err(|_| Error::Syntax {
                    offset,
                    message: format!("invalid variable index in `{name}`"),
                })?;
                if index >= self.dim {
                    return Err(Error::VarOutOfRange {
                        index,
                        dim: self.dim,
                    });
                }
                return Ok(Expression::Var(index));
            }
        }
        if let Some(value) = self.params.get(&name) {
            return Ok(Expression::Const(*value));
        }
        Err(Error::UnknownIdentifier { name, offset })
    }
}

/// Parse `text` as an expression over coordinates `x0 .. x(dimension-1)`.
pub fn parse(text: &str, dimension: usize) -> Result<Expression> {
    parse_with_params(text, dimension, &Params::new())
}

/// Parse with named parameters substituted by value at parse time.
pub fn parse_with_params(text: &str, dimension: usize, params: &Params) -> Result<Expression> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser::new(text, dimension, params)?;
    let expr = parser.expr()?;
    let (tok, offset) = parser.advance()?;
    if tok != Tok::Eof {
        return Err(Error::Syntax {
            offset,
            message: format!("trailing input starting with {tok:?}"),
        });
    }
    Ok(expr)
}
