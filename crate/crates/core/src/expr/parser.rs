//! Lexer and precedence-climbing parser.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//!          | '.' digits [exponent]
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^-1` is `2^(-1)`. There is no implicit multiplication.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{Ast, BinaryOp, Function, NodeKind, Span};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
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
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::End => "end of input".to_string(),
            Token::Plus => "`+`".to_string(),
            Token::Minus => "`-`".to_string(),
            Token::Star => "`*`".to_string(),
            Token::Slash => "`/`".to_string(),
            Token::Caret => "`^`".to_string(),
            Token::LParen => "`(`".to_string(),
            Token::RParen => "`)`".to_string(),
            Token::Comma => "`,`".to_string(),
        }
    }
}

fn syntax(pos: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        pos,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Token, Span)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            b',' => Some(Token::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push((tok, Span { start, end: i }));
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            let digits = |i: &mut usize| {
                let s = *i;
                while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                    *i += 1;
                }
                *i - s
            };
            let mut count = digits(&mut i);
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                count += digits(&mut i);
            }
            if count == 0 {
                return Err(syntax(start, "malformed number"));
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                let exp_start = j;
                let n = digits(&mut j);
                if n == 0 {
                    return Err(syntax(exp_start, "missing exponent digits"));
                }
                i = j;
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{text}`")))?;
            out.push((Token::Number(v), Span { start, end: i }));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Token::Ident(src[start..i].to_string()), Span { start, end: i }));
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(syntax(start, format!("unexpected character `{ch}`")));
    }
    out.push((
        Token::End,
        Span {
            start: src.len(),
            end: src.len(),
        },
    ));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, Span)>,
    pos: usize,
    coordinates: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token, Span) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token) -> Result<Span> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(syntax(
                self.span().start,
                format!("expected {}, found {}", want.describe(), self.peek().describe()),
            ))
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = join(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = join(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if *self.peek() == Token::Minus {
            let start = self.bump().1.start;
            let inner = self.unary()?;
            let end = inner.span.end;
            return Ok(Ast {
                kind: NodeKind::Neg(alloc::boxed::Box::new(inner)),
                span: Span { start, end },
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.primary()?;
        if *self.peek() == Token::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(join(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Ast> {
        let (tok, span) = self.bump();
        match tok {
            Token::Number(v) => Ok(Ast {
                kind: NodeKind::Number(v),
                span,
            }),
            Token::LParen => {
                let inner = self.expr()?;
                let close = self.expect(Token::RParen)?;
                Ok(Ast {
                    kind: inner.kind,
                    span: Span {
                        start: span.start,
                        end: close.end,
                    },
                })
            }
            Token::Ident(name) => {
                if *self.peek() == Token::LParen {
                    let func = Function::from_name(&name).ok_or_else(|| {
                        Error::UnknownIdentifier {
                            name: name.clone(),
                            pos: span.start,
                        }
                    })?;
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Token::RParen {
                        args.push(self.expr()?);
                        while *self.peek() == Token::Comma {
                            self.bump();
                            args.push(self.expr()?);
                        }
                    }
                    let close = self.expect(Token::RParen)?;
                    if args.len() != func.arity() {
                        return Err(Error::Arity {
                            name: func.name(),
                            expected: func.arity(),
                            found: args.len(),
                            pos: span.start,
                        });
                    }
                    return Ok(Ast {
                        kind: NodeKind::Call(func, args),
                        span: Span {
                            start: span.start,
                            end: close.end,
                        },
                    });
                }
                match self.coordinates.iter().position(|c| *c == name) {
                    Some(i) => Ok(Ast {
                        kind: NodeKind::Variable(i),
                        span,
                    }),
                    None => Err(Error::UnknownIdentifier {
                        name,
                        pos: span.start,
                    }),
                }
            }
            other => Err(syntax(
                span.start,
                format!("expected an operand, found {}", other.describe()),
            )),
        }
    }
}

fn join(op: BinaryOp, lhs: Ast, rhs: Ast) -> Ast {
    let span = Span {
        start: lhs.span.start,
        end: rhs.span.end,
    };
    Ast {
        kind: NodeKind::Binary(op, alloc::boxed::Box::new(lhs), alloc::boxed::Box::new(rhs)),
        span,
    }
}

pub(crate) fn parse_ast(src: &str, coordinates: &[String]) -> Result<Ast> {
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        coordinates,
    };
    let ast = p.expr()?;
    if *p.peek() != Token::End {
        return Err(syntax(
            p.span().start,
            format!("unexpected {}", p.peek().describe()),
        ));
    }
    Ok(ast)
}
