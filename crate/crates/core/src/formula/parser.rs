//! Recursive-descent parser for the concrete LTL syntax.
//!
//! Binding strength, tightest first: `!`, then `X F G [] <>`, then `U`
//! (right associative), `&`, `|`, and `->` (right associative).

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Ltl, Property};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown property `{name}` at byte {pos}")]
    UnknownAtom { name: String, pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Not,
    And,
    Or,
    Implies,
    Next,
    Eventually,
    Always,
    Until,
    LParen,
    RParen,
    True,
    False,
    Ident(String),
}

fn describe(tok: Option<&(Tok, usize)>) -> String {
    match tok {
        None => "end of input".to_string(),
        Some((Tok::Ident(s), _)) => format!("identifier `{s}`"),
        Some((t, _)) => format!("{t:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let two = bytes.get(i..i + 2);
        let (tok, len) = match c {
            b'!' => (Tok::Not, 1),
            b'&' => (Tok::And, 1),
            b'|' => (Tok::Or, 1),
            b'(' => (Tok::LParen, 1),
            b')' => (Tok::RParen, 1),
            b'-' if two == Some(b"->") => (Tok::Implies, 2),
            b'[' if two == Some(b"[]") => (Tok::Always, 2),
            b'<' if two == Some(b"<>") => (Tok::Eventually, 2),
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[start..j];
                let tok = match word {
                    "X" => Tok::Next,
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "U" => Tok::Until,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word.to_string()),
                };
                (tok, j - start)
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    pos: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, i));
        i += len;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    alphabet: &'a BTreeSet<Property>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            Ok(lhs.implies(self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Ltl, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Ltl, ParseError> {
        let mut lhs = self.until()?;
        while self.eat(&Tok::And) {
            lhs = lhs.and(self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Ltl, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            Ok(lhs.until(self.until()?))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Ltl, ParseError> {
        let pos = self.pos();
        let Some((tok, _)) = self.toks.get(self.at).cloned() else {
            return Err(ParseError::Syntax {
                pos,
                message: "expected a formula, found end of input".into(),
            });
        };
        self.at += 1;
        match tok {
            Tok::Not => Ok(self.unary()?.not()),
            Tok::Next => Ok(self.unary()?.next()),
            Tok::Eventually => Ok(self.unary()?.eventually()),
            Tok::Always => Ok(self.unary()?.always()),
            Tok::True => Ok(Ltl::True),
            Tok::False => Ok(Ltl::False),
            Tok::Ident(name) => {
                let p = Property::new(name.clone());
                if self.alphabet.contains(&p) {
                    Ok(Ltl::Atom(p))
                } else {
                    Err(ParseError::UnknownAtom { name, pos })
                }
            }
            Tok::LParen => {
                let inner = self.implication()?;
                if !self.eat(&Tok::RParen) {
                    return Err(ParseError::Syntax {
                        pos: self.pos(),
                        message: format!(
                            "expected `)`, found {}",
                            describe(self.toks.get(self.at))
                        ),
                    });
                }
                Ok(inner)
            }
            other => Err(ParseError::Syntax {
                pos,
                message: format!("expected a formula, found {}", describe(Some(&(other, pos)))),
            }),
        }
    }
}

/// Parses `text`, rejecting atoms outside `alphabet`.
pub fn parse_ltl(text: &str, alphabet: &BTreeSet<Property>) -> Result<Ltl, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        alphabet,
    };
    let f = p.implication()?;
    if p.at != p.toks.len() {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            message: format!("unexpected trailing {}", describe(p.toks.get(p.at))),
        });
    }
    Ok(f)
}
