//! Concrete syntax:
//!
//! ```text
//! formula := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '!' IDENT | '<>' unary | '[]' unary
//!          | 'mu' IDENT '.' formula | 'nu' IDENT '.' formula
//!          | 'G' unary | 'F' unary | '(' formula ')' | IDENT
//! ```
//!
//! Fixpoint bodies extend as far to the right as possible. `G` and `F` are
//! the sugar `□*` and `◇*` only when followed by something that can start a
//! formula; otherwise they are plain identifiers, so `F` on its own is the
//! atom F. An identifier bound by an enclosing `mu`/`nu` is a variable,
//! anything else is an atom.

use thiserror::Error;

use super::Formula;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{message} at byte {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Diamond,
    Box,
    Dot,
    LParen,
    RParen,
    Mu,
    Nu,
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let token = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'.' => Token::Dot,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'<' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Token::Diamond
            }
            b'[' if bytes.get(i + 1) == Some(&b']') => {
                i += 1;
                Token::Box
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                match &text[start..=i] {
                    "mu" => Token::Mu,
                    "nu" => Token::Nu,
                    ident => Token::Ident(ident.to_string()),
                }
            }
            _ => {
                return Err(ParseError {
                    position: start,
                    message: format!("unexpected character `{}`", text[start..].chars().next().unwrap_or('?')),
                })
            }
        };
        i += 1;
        out.push((start, token));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    bound: Vec<String>,
    sugar: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.offset(), message: message.into() })
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn starts_formula(token: Option<&Token>) -> bool {
        matches!(
            token,
            Some(Token::Ident(_) | Token::Not | Token::Diamond | Token::Box | Token::LParen | Token::Mu | Token::Nu)
        )
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conj()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            let right = self.conj()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn fresh_sugar_binder(&mut self) -> String {
        self.sugar += 1;
        format!("#{}", self.sugar)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.bump() {
            Some(Token::Not) => match self.bump() {
                Some(Token::Ident(p)) if !self.bound.contains(&p) => Ok(Formula::NegAtom(p)),
                Some(Token::Ident(x)) => {
                    self.pos -= 1;
                    self.error(format!("negation of fixpoint variable `{x}`; negation only applies to atoms"))
                }
                _ => {
                    self.pos -= 1;
                    self.error("negation only applies to atoms")
                }
            },
            Some(Token::Diamond) => Ok(Formula::diamond(self.unary()?)),
            Some(Token::Box) => Ok(Formula::boxed(self.unary()?)),
            Some(t @ (Token::Mu | Token::Nu)) => {
                let x = match self.bump() {
                    Some(Token::Ident(x)) => x,
                    _ => {
                        self.pos -= 1;
                        return self.error("expected a variable after fixpoint operator");
                    }
                };
                self.expect(Token::Dot, "`.`")?;
                self.bound.push(x.clone());
                let body = self.formula()?;
                self.bound.pop();
                Ok(if t == Token::Mu { Formula::mu(&x, body) } else { Formula::nu(&x, body) })
            }
            Some(Token::LParen) => {
                let inner = self.formula()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                let is_sugar = (name == "G" || name == "F") && Self::starts_formula(self.peek());
                if is_sugar {
                    let phi = self.unary()?;
                    let x = self.fresh_sugar_binder();
                    return Ok(if name == "G" {
                        Formula::nu(&x, Formula::and(phi, Formula::boxed(Formula::var(&x))))
                    } else {
                        Formula::mu(&x, Formula::or(phi, Formula::diamond(Formula::var(&x))))
                    });
                }
                if self.bound.contains(&name) {
                    Ok(Formula::Var(name))
                } else {
                    Ok(Formula::Atom(name))
                }
            }
            Some(_) => {
                self.pos -= 1;
                self.error("expected a formula")
            }
            None => self.error("unexpected end of input"),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len(), bound: Vec::new(), sugar: 0 };
    let f = p.formula()?;
    if p.pos < p.tokens.len() {
        return p.error("trailing input");
    }
    Ok(f.rename_bound())
}
