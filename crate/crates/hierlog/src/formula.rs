//! Formula syntax: nominals, propositions, negation, conjunction, the
//! jump operator `@i`, and one diamond per level.
//!
//! Concrete syntax, loosest to tightest binding:
//!
//! ```text
//! form    :=  or ('->' form)?          right associative
//! or      :=  and ('|' and)*
//! and     :=  unary ('&' unary)*
//! unary   :=  '!' unary | '@' name unary | '<' level '>' unary | primary
//! primary :=  name | '(' form ')'
//! ```
//!
//! `a -> b` and `a | b` are sugar for `!(a & !b)` and `!(!a & !b)`; the
//! tree keeps only the core connectives. Every formula has a level: atoms
//! carry the level of their symbol, `@i` stamps the level of `i`, `<l>`
//! stamps `l`, negation passes the level through and conjunction takes the
//! max. `@i f` and `<l> f` require `f` to sit at or below the stamped
//! level, so a diamond can step a low-level formula through a high-level
//! relation but never the reverse.

use std::fmt;

use thiserror::Error;

use crate::signature::{Signature, SymbolKind};

/// An occurrence of a named symbol together with its level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub name: String,
    pub level: usize,
}

impl Atom {
    pub fn new(name: &str, level: usize) -> Self {
        Atom {
            name: name.to_string(),
            level,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Nom(Atom),
    Prop(Atom),
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `@i f`: evaluate `f` at the world named by the nominal `i`.
    At(Atom, Box<Formula>),
    /// `<l> f`: some level-`l` successor of the point's level-`l` prefix
    /// satisfies `f`.
    Diamond(usize, Box<Formula>),
}

/// Shape summary used by the transfer conditions: which single level a
/// formula speaks about, and whether it is negation free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub level: usize,
    /// No negation anywhere in the tree.
    pub positive: bool,
    /// `Some(k)` when every atom level and every `@`/`<>` index equals `k`.
    pub strict_at: Option<usize>,
    /// `Some(level)` when the outermost node is an atom, `@`, or diamond.
    pub basic_at: Option<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown symbol {name}")]
    UnknownSymbol { name: String },
    #[error("{name} is not a nominal")]
    NotANominal { name: String },
    #[error("level-{index} operator cannot apply to a level-{inner} formula")]
    LevelViolation { index: usize, inner: usize },
    #[error("operator index {index} exceeds signature depth {depth}")]
    IndexOutOfRange { index: usize, depth: usize },
}

impl Formula {
    pub fn nom(name: &str, level: usize) -> Formula {
        Formula::Nom(Atom::new(name, level))
    }

    pub fn prop(name: &str, level: usize) -> Formula {
        Formula::Prop(Atom::new(name, level))
    }

    pub fn negate(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn at(name: &str, level: usize, f: Formula) -> Formula {
        Formula::At(Atom::new(name, level), Box::new(f))
    }

    pub fn diamond(level: usize, f: Formula) -> Formula {
        Formula::Diamond(level, Box::new(f))
    }

    pub fn parse(src: &str, sig: &Signature) -> Result<Formula, ParseError> {
        let tokens = lex(src)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            sig,
        };
        let f = p.form()?;
        match p.peek() {
            None => Ok(f),
            Some((_, pos)) => Err(ParseError::Syntax {
                pos: *pos,
                message: "unexpected trailing input".into(),
            }),
        }
    }

    /// The level a formula speaks at.
    pub fn level(&self) -> usize {
        match self {
            Formula::Nom(a) | Formula::Prop(a) => a.level,
            Formula::Neg(c) => c.level(),
            Formula::And(a, b) => a.level().max(b.level()),
            Formula::At(i, _) => i.level,
            Formula::Diamond(l, _) => *l,
        }
    }

    /// Validates a programmatically built tree against a signature: every
    /// atom must name a symbol of the right kind at its stored level, and
    /// the `@`/diamond level constraints must hold.
    pub fn check(&self, sig: &Signature) -> Result<(), ParseError> {
        let atom_ok = |a: &Atom, kind: SymbolKind| -> Result<(), ParseError> {
            match sig.symbol_level(&a.name) {
                Ok((level, k)) if k == kind && level == a.level => Ok(()),
                Ok((_, k)) if k != kind && kind == SymbolKind::Nom => {
                    Err(ParseError::NotANominal {
                        name: a.name.clone(),
                    })
                }
                _ => Err(ParseError::UnknownSymbol {
                    name: a.name.clone(),
                }),
            }
        };
        match self {
            Formula::Nom(a) => atom_ok(a, SymbolKind::Nom),
            Formula::Prop(a) => atom_ok(a, SymbolKind::Prop),
            Formula::Neg(c) => c.check(sig),
            Formula::And(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Formula::At(i, c) => {
                atom_ok(i, SymbolKind::Nom)?;
                c.check(sig)?;
                if c.level() > i.level {
                    return Err(ParseError::LevelViolation {
                        index: i.level,
                        inner: c.level(),
                    });
                }
                Ok(())
            }
            Formula::Diamond(l, c) => {
                if *l > sig.depth() {
                    return Err(ParseError::IndexOutOfRange {
                        index: *l,
                        depth: sig.depth(),
                    });
                }
                c.check(sig)?;
                if c.level() > *l {
                    return Err(ParseError::LevelViolation {
                        index: *l,
                        inner: c.level(),
                    });
                }
                Ok(())
            }
        }
    }

    pub fn classify(&self) -> Classification {
        let mut indices = std::collections::BTreeSet::new();
        let mut positive = true;
        collect(self, &mut indices, &mut positive);
        let strict_at = if indices.len() == 1 {
            indices.first().copied()
        } else {
            None
        };
        let basic_at = match self {
            Formula::Neg(_) | Formula::And(_, _) => None,
            _ => Some(self.level()),
        };
        Classification {
            level: self.level(),
            positive,
            strict_at,
            basic_at,
        }
    }

    /// Canonical text form; parses back to the same tree. Conjunctions
    /// self-parenthesize, so unary operators can take children verbatim.
    pub fn render(&self) -> String {
        match self {
            Formula::Nom(a) | Formula::Prop(a) => a.name.clone(),
            Formula::Neg(c) => format!("!{}", c.render()),
            Formula::And(a, b) => format!("({} & {})", a.render(), b.render()),
            Formula::At(i, c) => format!("@{} {}", i.name, c.render()),
            Formula::Diamond(l, c) => format!("<{l}> {}", c.render()),
        }
    }
}

fn collect(f: &Formula, indices: &mut std::collections::BTreeSet<usize>, positive: &mut bool) {
    match f {
        Formula::Nom(a) | Formula::Prop(a) => {
            indices.insert(a.level);
        }
        Formula::Neg(c) => {
            *positive = false;
            collect(c, indices, positive);
        }
        Formula::And(a, b) => {
            collect(a, indices, positive);
            collect(b, indices, positive);
        }
        Formula::At(i, c) => {
            indices.insert(i.level);
            collect(c, indices, positive);
        }
        Formula::Diamond(l, c) => {
            indices.insert(*l);
            collect(c, indices, positive);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    Arrow,
    AtSign,
    Diamond(usize),
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'!' => {
                out.push((Token::Bang, i));
                i += 1;
            }
            b'&' => {
                out.push((Token::Amp, i));
                i += 1;
            }
            b'|' => {
                out.push((Token::Pipe, i));
                i += 1;
            }
            b'@' => {
                out.push((Token::AtSign, i));
                i += 1;
            }
            b'(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((Token::Arrow, i));
                    i += 2;
                } else {
                    return Err(ParseError::Syntax {
                        pos: i,
                        message: "expected '->'".into(),
                    });
                }
            }
            b'<' => {
                let start = i;
                i += 1;
                let digits_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == digits_start || bytes.get(i) != Some(&b'>') {
                    return Err(ParseError::Syntax {
                        pos: start,
                        message: "expected '<level>'".into(),
                    });
                }
                let level: usize =
                    src[digits_start..i]
                        .parse()
                        .map_err(|_| ParseError::Syntax {
                            pos: digits_start,
                            message: "level does not fit".into(),
                        })?;
                out.push((Token::Diamond(level), start));
                i += 1;
            }
            _ if b.is_ascii_alphanumeric() || b == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError::Syntax {
                    pos: i,
                    message: format!(
                        "unexpected character {:?}",
                        src[i..].chars().next().unwrap()
                    ),
                });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Token, usize)> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_pos(&self) -> usize {
        self.tokens.last().map(|(_, p)| p + 1).unwrap_or(0)
    }

    fn form(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if matches!(self.peek(), Some((Token::Arrow, _))) {
            self.bump();
            let rhs = self.form()?;
            // a -> b  ==  !(a & !b)
            return Ok(Formula::negate(Formula::and(lhs, Formula::negate(rhs))));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while matches!(self.peek(), Some((Token::Pipe, _))) {
            self.bump();
            let rhs = self.and()?;
            // a | b  ==  !(!a & !b)
            lhs = Formula::negate(Formula::and(Formula::negate(lhs), Formula::negate(rhs)));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Some((Token::Amp, _))) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some((Token::Bang, _)) => {
                self.bump();
                Ok(Formula::negate(self.unary()?))
            }
            Some((Token::AtSign, at_pos)) => {
                self.bump();
                let (name, _) = self.ident("nominal after '@'", at_pos)?;
                let level = match self.sig.symbol_level(&name) {
                    Ok((level, SymbolKind::Nom)) => level,
                    Ok((_, SymbolKind::Prop)) => {
                        return Err(ParseError::NotANominal { name });
                    }
                    Err(_) => return Err(ParseError::UnknownSymbol { name }),
                };
                let arg = self.unary()?;
                if arg.level() > level {
                    return Err(ParseError::LevelViolation {
                        index: level,
                        inner: arg.level(),
                    });
                }
                Ok(Formula::at(&name, level, arg))
            }
            Some((Token::Diamond(level), _)) => {
                self.bump();
                if level > self.sig.depth() {
                    return Err(ParseError::IndexOutOfRange {
                        index: level,
                        depth: self.sig.depth(),
                    });
                }
                let arg = self.unary()?;
                if arg.level() > level {
                    return Err(ParseError::LevelViolation {
                        index: level,
                        inner: arg.level(),
                    });
                }
                Ok(Formula::diamond(level, arg))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.bump() {
            Some((Token::Ident(name), _)) => match self.sig.symbol_level(&name) {
                Ok((level, SymbolKind::Nom)) => Ok(Formula::nom(&name, level)),
                Ok((level, SymbolKind::Prop)) => Ok(Formula::prop(&name, level)),
                Err(_) => Err(ParseError::UnknownSymbol { name }),
            },
            Some((Token::LParen, open_pos)) => {
                let inner = self.form()?;
                match self.bump() {
                    Some((Token::RParen, _)) => Ok(inner),
                    _ => Err(ParseError::Syntax {
                        pos: open_pos,
                        message: "unclosed '('".into(),
                    }),
                }
            }
            Some((_, pos)) => Err(ParseError::Syntax {
                pos,
                message: "expected a formula".into(),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end_pos(),
                message: "unexpected end of input".into(),
            }),
        }
    }

    fn ident(&mut self, what: &str, fallback_pos: usize) -> Result<(String, usize), ParseError> {
        match self.bump() {
            Some((Token::Ident(name), pos)) => Ok((name, pos)),
            Some((_, pos)) => Err(ParseError::Syntax {
                pos,
                message: format!("expected {what}"),
            }),
            None => Err(ParseError::Syntax {
                pos: fallback_pos + 1,
                message: format!("expected {what}"),
            }),
        }
    }
}
