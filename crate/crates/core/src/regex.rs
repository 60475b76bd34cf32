//! ε-free regular expressions: `∅`, single symbols, concatenation, union and
//! `+`. There is no Kleene star and no ε, so no expression denotes a
//! language containing the empty word.
//!
//! Concrete syntax:
//!
//! ```text
//! expr := alt
//! alt  := cat ('|' cat)*
//! cat  := rep+
//! rep  := atom '+'*
//! atom := LITERAL | '(' expr ')' | '∅'
//! ```
//!
//! `LITERAL` is one alphanumeric character; whitespace is ignored.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::Label;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RegexAst {
    EmptyLang,
    Lit(Label),
    Concat(Box<RegexAst>, Box<RegexAst>),
    Union(Box<RegexAst>, Box<RegexAst>),
    Plus(Box<RegexAst>),
}

impl RegexAst {
    pub fn lit(symbol: impl Into<Label>) -> Self {
        RegexAst::Lit(symbol.into())
    }

    pub fn concat(self, rhs: RegexAst) -> Self {
        RegexAst::Concat(Box::new(self), Box::new(rhs))
    }

    pub fn union(self, rhs: RegexAst) -> Self {
        RegexAst::Union(Box::new(self), Box::new(rhs))
    }

    pub fn plus(self) -> Self {
        RegexAst::Plus(Box::new(self))
    }

    pub fn depth(&self) -> usize {
        match self {
            RegexAst::EmptyLang | RegexAst::Lit(_) => 0,
            RegexAst::Concat(l, r) | RegexAst::Union(l, r) => 1 + l.depth().max(r.depth()),
            RegexAst::Plus(inner) => 1 + inner.depth(),
        }
    }

    /// Symbols occurring in the expression.
    pub fn symbols(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Label>) {
        match self {
            RegexAst::EmptyLang => {}
            RegexAst::Lit(a) => {
                out.insert(a.clone());
            }
            RegexAst::Concat(l, r) | RegexAst::Union(l, r) => {
                l.collect_symbols(out);
                r.collect_symbols(out);
            }
            RegexAst::Plus(inner) => inner.collect_symbols(out),
        }
    }

    /// Pushes `∅` outwards: `∅·A = A·∅ = ∅`, `∅|A = A|∅ = A`, `∅⁺ = ∅`. The
    /// result is either `EmptyLang` or free of it, so `L(r) = ∅` iff
    /// `r.simplify() == EmptyLang`.
    pub fn simplify(&self) -> RegexAst {
        match self {
            RegexAst::EmptyLang | RegexAst::Lit(_) => self.clone(),
            RegexAst::Concat(l, r) => match (l.simplify(), r.simplify()) {
                (RegexAst::EmptyLang, _) | (_, RegexAst::EmptyLang) => RegexAst::EmptyLang,
                (l, r) => l.concat(r),
            },
            RegexAst::Union(l, r) => match (l.simplify(), r.simplify()) {
                (RegexAst::EmptyLang, x) | (x, RegexAst::EmptyLang) => x,
                (l, r) => l.union(r),
            },
            RegexAst::Plus(inner) => match inner.simplify() {
                RegexAst::EmptyLang => RegexAst::EmptyLang,
                x => x.plus(),
            },
        }
    }

    pub fn is_empty_language(&self) -> bool {
        self.simplify() == RegexAst::EmptyLang
    }
}

impl fmt::Display for RegexAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // precedence: 0 = alt, 1 = cat, 2 = rep/atom
        fn prec(r: &RegexAst) -> u8 {
            match r {
                RegexAst::Union(..) => 0,
                RegexAst::Concat(..) => 1,
                _ => 2,
            }
        }
        fn go(r: &RegexAst, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if prec(r) < min {
                f.write_str("(")?;
                go(r, 0, f)?;
                return f.write_str(")");
            }
            match r {
                RegexAst::EmptyLang => f.write_str("∅"),
                RegexAst::Lit(a) => write!(f, "{a}"),
                RegexAst::Union(l, r) => {
                    go(l, 0, f)?;
                    f.write_str("|")?;
                    go(r, 1, f)
                }
                RegexAst::Concat(l, r) => {
                    go(l, 1, f)?;
                    go(r, 2, f)
                }
                RegexAst::Plus(inner) => {
                    go(inner, 2, f)?;
                    f.write_str("+")
                }
            }
        }
        go(self, 0, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegexError {
    #[error("regex syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unsupported token `{token}` at position {pos}: only ε-free expressions are allowed ({hint})")]
    Unsupported {
        pos: usize,
        token: char,
        hint: &'static str,
    },
}

const STAR_HINT: &str = "use `+` and `|` instead, e.g. a*b is expressible as b|a+b";

struct Parser {
    chars: Vec<(usize, char)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, char)> {
        self.chars.get(self.at).copied()
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.len, |(p, _)| p)
    }

    fn error(&self, message: impl Into<String>) -> RegexError {
        RegexError::Syntax {
            pos: self.pos(),
            message: message.into(),
        }
    }

    fn alt(&mut self) -> Result<RegexAst, RegexError> {
        let mut left = self.cat()?;
        while let Some((_, '|')) = self.peek() {
            self.at += 1;
            left = left.union(self.cat()?);
        }
        Ok(left)
    }

    fn starts_atom(c: char) -> bool {
        c == '(' || c == '∅' || c.is_alphanumeric()
    }

    fn cat(&mut self) -> Result<RegexAst, RegexError> {
        let mut left = self.rep()?;
        while let Some((_, c)) = self.peek() {
            if !Self::starts_atom(c) {
                break;
            }
            left = left.concat(self.rep()?);
        }
        Ok(left)
    }

    fn rep(&mut self) -> Result<RegexAst, RegexError> {
        let mut inner = self.atom()?;
        while let Some((_, '+')) = self.peek() {
            self.at += 1;
            inner = inner.plus();
        }
        Ok(inner)
    }

    fn atom(&mut self) -> Result<RegexAst, RegexError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input, expected a symbol, `∅` or `(`")),
            Some((_, '(')) => {
                self.at += 1;
                let inner = self.alt()?;
                match self.peek() {
                    Some((_, ')')) => {
                        self.at += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error("expected `)`")),
                }
            }
            Some((_, '∅')) => {
                self.at += 1;
                Ok(RegexAst::EmptyLang)
            }
            Some((_, c)) if c.is_alphanumeric() => {
                self.at += 1;
                Ok(RegexAst::lit(c))
            }
            Some((_, c)) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }
}

pub fn parse_regex(text: &str) -> Result<RegexAst, RegexError> {
    let mut chars = Vec::new();
    for (pos, c) in text.char_indices() {
        if c.is_whitespace() {
            continue;
        }
        match c {
            '*' | '?' => {
                return Err(RegexError::Unsupported {
                    pos,
                    token: c,
                    hint: STAR_HINT,
                })
            }
            'ε' => {
                return Err(RegexError::Unsupported {
                    pos,
                    token: c,
                    hint: "the empty word cannot be expressed",
                })
            }
            _ => chars.push((pos, c)),
        }
    }
    let mut parser = Parser {
        chars,
        at: 0,
        len: text.len(),
    };
    let ast = parser.alt()?;
    if parser.peek().is_some() {
        return Err(parser.error("trailing input"));
    }
    Ok(ast)
}
