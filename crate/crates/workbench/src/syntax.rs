//! Lexer and tree syntax shared by all text formats.

use std::fmt;

use thiserror::Error;

use crate::tree::{RankedAlphabet, Symbol, Tree, TreeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown symbol {name}")]
    UnknownSymbol { pos: Pos, name: String },
    #[error("{pos}: {name} expects {expected} children, got {found}")]
    Arity { pos: Pos, name: String, expected: usize, found: usize },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownSymbol { pos, .. }
            | ParseError::Arity { pos, .. }
            | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '#' | '$' | '\'' | '+' | '-')
}

/// True if `name` can be written without quotes.
pub fn is_plain_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(is_name_char) && !name.contains("->")
}

/// Writes a name, quoting and escaping when needed.
pub fn write_name(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if is_plain_name(name) {
        return f.write_str(name);
    }
    f.write_char('"')?;
    for c in name.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

pub fn quote_name(name: &str) -> String {
    let mut s = String::new();
    write_name(&mut s, name).expect("writing to a String");
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Name(String),
    /// A quoted name; never treated as a keyword or reserved name.
    Quoted(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Slash,
    Colon,
    Semi,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(n) => write!(f, "name {n:?}"),
            Tok::Quoted(n) => write!(f, "quoted name {n:?}"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::LBrace => f.write_str("'{'"),
            Tok::RBrace => f.write_str("'}'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::Comma => f.write_str("','"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Colon => f.write_str("':'"),
            Tok::Semi => f.write_str("';'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

pub fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push((Tok::Arrow, pos));
            advance(&mut i, &mut line, &mut col, '-');
            advance(&mut i, &mut line, &mut col, '>');
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '/' => Some(Tok::Slash),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '"' {
            advance(&mut i, &mut line, &mut col, c);
            let mut s = String::new();
            loop {
                let Some(&c) = chars.get(i) else {
                    return Err(ParseError::Syntax { pos, msg: "unterminated quoted name".into() });
                };
                advance(&mut i, &mut line, &mut col, c);
                match c {
                    '"' => break,
                    '\\' => {
                        let Some(&e) = chars.get(i) else {
                            return Err(ParseError::Syntax { pos, msg: "unterminated escape".into() });
                        };
                        advance(&mut i, &mut line, &mut col, e);
                        s.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                    }
                    c => s.push(c),
                }
            }
            if s.is_empty() {
                return Err(ParseError::Syntax { pos, msg: "empty quoted name".into() });
            }
            out.push((Tok::Quoted(s), pos));
            continue;
        }
        if is_name_char(c) {
            let mut s = String::new();
            while let Some(&c) = chars.get(i) {
                if !is_name_char(c) || (c == '-' && chars.get(i + 1) == Some(&'>')) {
                    break;
                }
                s.push(c);
                advance(&mut i, &mut line, &mut col, c);
            }
            out.push((Tok::Name(s), pos));
            continue;
        }
        return Err(ParseError::Syntax { pos, msg: format!("unexpected character {c:?}") });
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Token cursor with the small helpers every format parser needs.
pub struct Cursor {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Cursor, ParseError> {
        Ok(Cursor { toks: tokenize(text)?, at: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    pub fn invalid<T>(&self, pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Invalid { pos, msg: msg.into() })
    }

    pub fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {t}, found {}", self.peek()))
        }
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Any name, quoted or not.
    pub fn name(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Name(n) | Tok::Quoted(n) => {
                self.bump();
                Ok(n)
            }
            t => self.err(format!("expected a name, found {t}")),
        }
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    pub fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected keyword {kw:?}, found {}", self.peek()))
        }
    }

    pub fn number(&mut self) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Name(n) if n.bytes().all(|b| b.is_ascii_digit()) => {
                self.bump();
                n.parse().or_else(|_| self.err("number out of range"))
            }
            t => self.err(format!("expected a number, found {t}")),
        }
    }

    /// `{ sym/rank ... }`
    pub fn alphabet_block(&mut self) -> Result<RankedAlphabet, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut a = RankedAlphabet::new();
        while !self.eat(&Tok::RBrace) {
            let pos = self.pos();
            let n = self.name()?;
            self.expect(Tok::Slash)?;
            let r = self.number()?;
            if a.insert(Symbol::new(n.clone(), r)).is_err() {
                return self.invalid(pos, format!("duplicate symbol {n}"));
            }
        }
        Ok(a)
    }

    /// `{ name ... }`, optionally comma separated.
    pub fn name_block(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut v = Vec::new();
        while !self.eat(&Tok::RBrace) {
            v.push(self.name()?);
            self.eat(&Tok::Comma);
        }
        Ok(v)
    }

    /// A tree over `alphabet`.
    pub fn tree(&mut self, alphabet: &RankedAlphabet) -> Result<Tree, ParseError> {
        let pos = self.pos();
        let name = self.name()?;
        let children = self.tree_args(alphabet)?;
        let sym = alphabet
            .get(&name)
            .ok_or_else(|| ParseError::UnknownSymbol { pos, name: name.clone() })?;
        Tree::new(sym, children).map_err(|e| arity_error(pos, e))
    }

    fn tree_args(&mut self, alphabet: &RankedAlphabet) -> Result<Vec<Tree>, ParseError> {
        let mut children = Vec::new();
        if self.eat(&Tok::LParen) {
            if self.eat(&Tok::RParen) {
                return Ok(children);
            }
            loop {
                children.push(self.tree(alphabet)?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(children)
    }
}

pub(crate) fn arity_error(pos: Pos, e: TreeError) -> ParseError {
    match e {
        TreeError::Arity { name, expected, found } => ParseError::Arity { pos, name, expected, found },
        other => ParseError::Invalid { pos, msg: other.to_string() },
    }
}

/// Parses `name | name(t1,...,tk)` against a ranked alphabet.
pub fn parse_tree(text: &str, alphabet: &RankedAlphabet) -> Result<Tree, ParseError> {
    let mut c = Cursor::new(text)?;
    let t = c.tree(alphabet)?;
    if !c.at_eof() {
        return c.err(format!("trailing input: {}", c.peek()));
    }
    Ok(t)
}

/// Prints a tree in the syntax accepted by [`parse_tree`].
pub fn format_tree(t: &Tree) -> String {
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::all_trees;

    #[test]
    fn parses_examples() {
        let e = RankedAlphabet::from_pairs(&[("e", 0)]).unwrap();
        assert_eq!(parse_tree("e", &e).unwrap().to_string(), "e");
        let fig = RankedAlphabet::from_pairs(&[("#", 1), ("a", 1), ("e", 0)]).unwrap();
        let t = parse_tree("#(a(a(e)))", &fig).unwrap();
        assert_eq!(t.height(), 4);
        assert_eq!(t.size(), 4);
        let bad = RankedAlphabet::from_pairs(&[("f", 2), ("a", 0)]).unwrap();
        assert!(matches!(parse_tree("f(a)", &bad), Err(ParseError::Arity { expected: 2, found: 1, .. })));
        assert!(matches!(parse_tree("g", &bad), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_tree("f(a,", &bad), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn syntax_error_positions() {
        let a = RankedAlphabet::from_pairs(&[("f", 2), ("a", 0)]).unwrap();
        let err = parse_tree("f(a,\n  a a)", &a).unwrap_err();
        assert_eq!(err.pos(), Pos { line: 2, col: 5 });
    }

    #[test]
    fn quoting() {
        let a = RankedAlphabet::from_pairs(&[("[sigma,p1,p1]", 2), ("e", 0), ("q\"x", 0)]).unwrap();
        let t = parse_tree(r#""[sigma,p1,p1]"(e, "q\"x")"#, &a).unwrap();
        assert_eq!(t.to_string(), r#""[sigma,p1,p1]"(e,"q\"x")"#);
        assert_eq!(parse_tree(&format_tree(&t), &a).unwrap(), t);
        assert_eq!(quote_name("a->b"), "\"a->b\"");
        assert_eq!(quote_name("e'"), "e'");
    }

    #[test]
    fn comments_are_skipped() {
        let a = RankedAlphabet::from_pairs(&[("a", 1), ("e", 0)]).unwrap();
        assert_eq!(parse_tree("a( // note\n e)", &a).unwrap().to_string(), "a(e)");
    }

    #[test]
    fn round_trip_on_enumerated_trees() {
        let a = RankedAlphabet::from_pairs(&[("sigma", 2), ("a", 1), ("e", 0), ("q.{1}", 1), ("$", 0)]).unwrap();
        for t in all_trees(&a, 8).unwrap() {
            assert_eq!(parse_tree(&format_tree(&t), &a).unwrap(), t);
        }
    }
}
