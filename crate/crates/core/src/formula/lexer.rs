use std::fmt;

use crate::error::{Error, Result, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pred {
    /// `m(x)`: x is an m-atom
    Micro,
    /// `M(x)`: x is an M-atom
    Macro,
    /// `Z(x)`: x is a set
    Zfu,
    /// `Q(x)`: x is a quasi-set
    QSet,
    /// `Cd(k)`: k is a cardinal
    Cardinal,
}

impl Pred {
    pub fn symbol(self) -> &'static str {
        match self {
            Pred::Micro => "m",
            Pred::Macro => "M",
            Pred::Zfu => "Z",
            Pred::QSet => "Q",
            Pred::Cardinal => "Cd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Qc,
    Card,
}

impl Func {
    pub fn symbol(self) -> &'static str {
        match self {
            Func::Qc => "qc",
            Func::Card => "card",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Indist,
    Member,
    ExtEq,
    Le,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Indist => "==",
            Rel::Member => "in",
            Rel::ExtEq => "=E",
            Rel::Le => "<=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
    ForallQ,
    ExistsQ,
    /// There is exactly one quasi-set, up to `=E`.
    ExistsQUnique,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
            Quantifier::ForallQ => "forallQ",
            Quantifier::ExistsQ => "existsQ",
            Quantifier::ExistsQUnique => "existsQ!",
        }
    }

    pub fn is_universal(self) -> bool {
        matches!(self, Quantifier::Forall | Quantifier::ForallQ)
    }

    /// Ranges over quasi-sets only.
    pub fn is_relativized(self) -> bool {
        !matches!(self, Quantifier::Forall | Quantifier::Exists)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Pred(Pred),
    Func(Func),
    Rel(Rel),
    Not,
    And,
    Or,
    Implies,
    Iff,
    Quant(Quantifier),
    Int(u64),
    LParen,
    RParen,
    Comma,
    Caret,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Pred(p) => write!(f, "`{}`", p.symbol()),
            TokenKind::Func(g) => write!(f, "`{}`", g.symbol()),
            TokenKind::Rel(r) => write!(f, "`{}`", r.symbol()),
            TokenKind::Not => f.write_str("`~`"),
            TokenKind::And => f.write_str("`&`"),
            TokenKind::Or => f.write_str("`|`"),
            TokenKind::Implies => f.write_str("`->`"),
            TokenKind::Iff => f.write_str("`<->`"),
            TokenKind::Quant(q) => write!(f, "`{}`", q.keyword()),
            TokenKind::Int(n) => write!(f, "integer `{n}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::Caret => f.write_str("`^`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "m" => TokenKind::Pred(Pred::Micro),
        "M" => TokenKind::Pred(Pred::Macro),
        "Z" => TokenKind::Pred(Pred::Zfu),
        "Q" => TokenKind::Pred(Pred::QSet),
        "Cd" => TokenKind::Pred(Pred::Cardinal),
        "qc" => TokenKind::Func(Func::Qc),
        "card" => TokenKind::Func(Func::Card),
        "in" => TokenKind::Rel(Rel::Member),
        "forall" => TokenKind::Quant(Quantifier::Forall),
        "exists" => TokenKind::Quant(Quantifier::Exists),
        "forallQ" => TokenKind::Quant(Quantifier::ForallQ),
        "existsQ" => TokenKind::Quant(Quantifier::ExistsQ),
        _ => return None,
    })
}

/// Splits a formula into tokens. Accepts both the Unicode symbols
/// (`≡ ∈ ¬ ∧ ∨ → ↔ ∀ ∃ ≤`, `∀_Q`, `∃_Q`, `∃_Q!`) and their ASCII spellings
/// (`== in ~ & | -> <-> forall exists <=`, `forallQ`, `existsQ`, `existsQ!`).
/// A bare `=` is read as `=E`.
pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let rest = &src[start..];
        let (kind, len) = if is_ident_start(c) {
            let len = rest
                .char_indices()
                .find(|&(_, ch)| !is_ident_continue(ch))
                .map_or(rest.len(), |(i, _)| i);
            let word = &rest[..len];
            match keyword(word) {
                Some(TokenKind::Quant(Quantifier::ExistsQ)) if rest[len..].starts_with('!') => {
                    (TokenKind::Quant(Quantifier::ExistsQUnique), len + 1)
                }
                Some(k) => (k, len),
                None => (TokenKind::Ident(word.to_string()), len),
            }
        } else if c.is_ascii_digit() {
            let len = rest
                .char_indices()
                .find(|&(_, ch)| !ch.is_ascii_digit())
                .map_or(rest.len(), |(i, _)| i);
            let value = rest[..len].parse::<u64>().map_err(|_| Error::Syntax {
                span: Span::new(start, start + len),
                expected: vec!["integer below 2^64".into()],
                found: rest[..len].to_string(),
            })?;
            (TokenKind::Int(value), len)
        } else if let Some(sym) = [
            ("<->", TokenKind::Iff),
            ("->", TokenKind::Implies),
            ("<=", TokenKind::Rel(Rel::Le)),
            ("==", TokenKind::Rel(Rel::Indist)),
            ("=_E", TokenKind::Rel(Rel::ExtEq)),
            ("=E", TokenKind::Rel(Rel::ExtEq)),
            ("=", TokenKind::Rel(Rel::ExtEq)),
            ("∀_Q", TokenKind::Quant(Quantifier::ForallQ)),
            ("∃_Q!", TokenKind::Quant(Quantifier::ExistsQUnique)),
            ("∃_Q", TokenKind::Quant(Quantifier::ExistsQ)),
            ("∀", TokenKind::Quant(Quantifier::Forall)),
            ("∃", TokenKind::Quant(Quantifier::Exists)),
            ("≡", TokenKind::Rel(Rel::Indist)),
            ("∈", TokenKind::Rel(Rel::Member)),
            ("≤", TokenKind::Rel(Rel::Le)),
            ("¬", TokenKind::Not),
            ("~", TokenKind::Not),
            ("∧", TokenKind::And),
            ("&", TokenKind::And),
            ("∨", TokenKind::Or),
            ("|", TokenKind::Or),
            ("→", TokenKind::Implies),
            ("↔", TokenKind::Iff),
            ("(", TokenKind::LParen),
            (")", TokenKind::RParen),
            (",", TokenKind::Comma),
            ("^", TokenKind::Caret),
        ]
        .into_iter()
        .find(|(s, _)| rest.starts_with(s) && !(*s == "=E" && continues_ident(rest, 2)))
        {
            (sym.1, sym.0.len())
        } else {
            return Err(Error::Lex {
                span: Span::new(start, start + c.len_utf8()),
                found: c,
            });
        };
        tokens.push(Token {
            kind,
            lexeme: rest[..len].to_string(),
            span: Span::new(start, start + len),
        });
        while chars.peek().is_some_and(|&(i, _)| i < start + len) {
            chars.next();
        }
    }
    Ok(tokens)
}

// `=Ex` reads as `=` followed by the identifier `Ex`.
fn continues_ident(rest: &str, at: usize) -> bool {
    rest[at..].chars().next().is_some_and(is_ident_continue)
}
