//! Textual syntax for guest expressions.
//!
//! ```text
//! expr := mul ('+' mul)*
//! mul  := post ('*' post)*
//! post := atom ('[' IDENT '/' IDENT ']')*
//! atom := '(' ')' | '(' expr ')' | node | node '-' LABEL '->' node
//! node := IDENT ('{' (flag (',' flag)*)? '}')?
//! flag := 'must' | 'uniq' | 'excl' | 'nil'
//! ```
//!
//! `+` is `⊕`, `*` is `⊗`, `()` is the empty guest and `e[p/q]` renames
//! `p` to `q`. IDENT is `[A-Za-z0-9_]+`; LABEL is one non-blank character
//! other than `-`, `>` and `#`.
//!
//! ```
//! use lgs::dsl::parse_guest_dsl;
//! let e = parse_guest_dsl("q{must,nil} + (p{must} -a-> p * p -b-> q)").unwrap();
//! assert_eq!(e.to_string(), "q{must,nil} + p{must} -a-> p * p -b-> q");
//! ```

use std::fmt;

use thiserror::Error;

use crate::algebra::{GuestExpr, UnaryTerm};
use crate::graph::{Label, NodeId};
use crate::guest::Flags;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown flag `{flag}` at position {pos} (expected must, uniq, excl or nil)")]
    UnknownFlag { pos: usize, flag: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Label(char),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Slash,
    Plus,
    Star,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Label(c) => write!(f, "arrow label `{c}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Star => f.write_str("`*`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_label_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '-' | '>' | '#')
}

fn syntax(pos: usize, message: impl Into<String>) -> DslError {
    DslError::Syntax {
        pos,
        message: message.into(),
    }
}

/// Splits the input into positioned tokens. An arrow `-a->` becomes a single
/// `Label` token; blanks are allowed around its parts.
fn lex(text: &str) -> Result<Vec<(usize, Tok)>, DslError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].1.is_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_ws(&mut i);
        let Some(&(pos, c)) = chars.get(i) else {
            out.push((text.len(), Tok::End));
            return Ok(out);
        };
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '/' => Some(Tok::Slash),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((pos, tok));
            i += 1;
            continue;
        }
        if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i].1) {
                i += 1;
            }
            out.push((
                pos,
                Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect()),
            ));
            continue;
        }
        if c == '-' {
            i += 1;
            skip_ws(&mut i);
            let label = match chars.get(i) {
                Some(&(_, l)) if is_label_char(l) => l,
                Some(&(p, l)) => return Err(syntax(p, format!("`{l}` cannot be an arrow label"))),
                None => return Err(syntax(text.len(), "arrow is missing its label")),
            };
            i += 1;
            skip_ws(&mut i);
            match (chars.get(i), chars.get(i + 1)) {
                (Some((_, '-')), Some((_, '>'))) => i += 2,
                (Some(&(p, _)), _) => return Err(syntax(p, "expected `->` after the arrow label")),
                (None, _) => return Err(syntax(text.len(), "expected `->` after the arrow label")),
            }
            out.push((pos, Tok::Label(label)));
            continue;
        }
        return Err(syntax(pos, format!("unexpected character `{c}`")));
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), DslError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.pos(),
                format!("expected {want}, found {}", self.peek()),
            ))
        }
    }

    fn ident(&mut self, what: &str) -> Result<NodeId, DslError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(NodeId::new(s))
            }
            other => Err(syntax(
                self.pos(),
                format!("expected {what}, found {other}"),
            )),
        }
    }

    fn expr(&mut self) -> Result<GuestExpr, DslError> {
        let mut e = self.mul()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            e = e + self.mul()?;
        }
        Ok(e)
    }

    fn mul(&mut self) -> Result<GuestExpr, DslError> {
        let mut e = self.post()?;
        while *self.peek() == Tok::Star {
            self.bump();
            e = e * self.post()?;
        }
        Ok(e)
    }

    fn post(&mut self) -> Result<GuestExpr, DslError> {
        let mut e = self.atom()?;
        while *self.peek() == Tok::LBracket {
            self.bump();
            let from = self.ident("a node name")?;
            self.expect(Tok::Slash)?;
            let to = self.ident("a node name")?;
            self.expect(Tok::RBracket)?;
            e = e.rename(from, to);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<GuestExpr, DslError> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                if *self.peek() == Tok::RParen {
                    self.bump();
                    return Ok(GuestExpr::Empty);
                }
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(_) => {
                let src = self.node()?;
                if let Tok::Label(l) = *self.peek() {
                    self.bump();
                    let dst = self.node()?;
                    Ok(GuestExpr::arrow(src, Label::from(l), dst))
                } else {
                    Ok(GuestExpr::Unary(src))
                }
            }
            other => Err(syntax(
                self.pos(),
                format!("expected a node or `(`, found {other}"),
            )),
        }
    }

    fn node(&mut self) -> Result<UnaryTerm, DslError> {
        let name = self.ident("a node name")?;
        let mut flags = Flags::NONE;
        if *self.peek() == Tok::LBrace {
            self.bump();
            if *self.peek() != Tok::RBrace {
                loop {
                    let pos = self.pos();
                    let word = match self.bump() {
                        Tok::Ident(w) => w,
                        other => {
                            return Err(syntax(pos, format!("expected a flag, found {other}")))
                        }
                    };
                    flags = flags.union(match word.as_str() {
                        "must" => Flags::must(),
                        "uniq" => Flags {
                            unique: true,
                            ..Flags::NONE
                        },
                        "excl" => Flags {
                            exclusive: true,
                            ..Flags::NONE
                        },
                        "nil" => Flags::nil(),
                        _ => return Err(DslError::UnknownFlag { pos, flag: word }),
                    });
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RBrace)?;
        }
        Ok(UnaryTerm { name, flags })
    }
}

/// Parses a guest expression; `*` binds tighter than `+`, both associate to
/// the left.
pub fn parse_guest_dsl(text: &str) -> Result<GuestExpr, DslError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.pos(),
            format!("unexpected {} after expression", p.peek()),
        ));
    }
    Ok(e)
}

/// Canonical text of `e`, with only the parentheses the grammar needs.
pub fn print_guest_dsl(e: &GuestExpr) -> String {
    e.to_string()
}

impl fmt::Display for UnaryTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.flags.is_empty() {
            write!(f, "{{{}}}", self.flags.keywords().join(","))?;
        }
        Ok(())
    }
}

impl fmt::Display for GuestExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // precedence: 0 = sum, 1 = product, 2 = atom
        fn go(e: &GuestExpr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let prec = match e {
                GuestExpr::Add(..) => 0,
                GuestExpr::Mul(..) => 1,
                _ => 2,
            };
            if prec < min {
                f.write_str("(")?;
                go(e, 0, f)?;
                return f.write_str(")");
            }
            match e {
                GuestExpr::Empty => f.write_str("()"),
                GuestExpr::Unary(t) => write!(f, "{t}"),
                GuestExpr::Arrow { src, label, dst } => write!(f, "{src} -{label}-> {dst}"),
                GuestExpr::Add(l, r) => {
                    go(l, 0, f)?;
                    f.write_str(" + ")?;
                    go(r, 1, f)
                }
                GuestExpr::Mul(l, r) => {
                    go(l, 1, f)?;
                    f.write_str(" * ")?;
                    go(r, 2, f)
                }
                GuestExpr::Rename { inner, from, to } => {
                    go(inner, 2, f)?;
                    write!(f, "[{from}/{to}]")
                }
            }
        }
        go(self, 0, f)
    }
}
