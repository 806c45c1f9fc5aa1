//! A small s-expression reader and printer.
//!
//! Atoms are maximal runs of characters other than whitespace, parentheses
//! and `;` (which starts a line comment). Both reading and printing use an
//! explicit stack, so nesting depth is limited only by memory.

use std::fmt;

use crate::error::{Error, Result};

/// Canonical s-expression form of a value.
pub trait ToSexp {
    fn to_sexp(&self) -> Sexp;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub enum Node {
    Atom(String),
    List(Vec<Sexp>),
}

/// A parsed s-expression, tagged with the position of its first character.
#[derive(Clone, Debug)]
pub struct Sexp {
    pub pos: Pos,
    pub node: Node,
}

impl Drop for Sexp {
    fn drop(&mut self) {
        if let Node::List(items) = &mut self.node {
            let mut stack = std::mem::take(items);
            while let Some(mut s) = stack.pop() {
                if let Node::List(items) = &mut s.node {
                    stack.append(items);
                }
            }
        }
    }
}

impl PartialEq for Sexp {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp { pos: Pos::default(), node: Node::Atom(s.into()) }
    }

    pub fn list(items: Vec<Sexp>) -> Sexp {
        Sexp { pos: Pos::default(), node: Node::List(items) }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match &self.node {
            Node::Atom(a) => Some(a),
            Node::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match &self.node {
            Node::List(v) => Some(v),
            Node::Atom(_) => None,
        }
    }

    /// The leading atom of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|v| v.first()).and_then(Sexp::as_atom)
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.pos.line, col: self.pos.col, msg: msg.into() }
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str> {
        self.as_atom().ok_or_else(|| self.error(format!("expected {what}, found a list")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[Sexp]> {
        self.as_list().ok_or_else(|| self.error(format!("expected {what}, found an atom")))
    }

    /// A list whose head atom is `tag`; returns the remaining items.
    pub fn expect_tagged(&self, tag: &str) -> Result<&[Sexp]> {
        let items = self.expect_list(&format!("({tag} ...)"))?;
        match items.first().and_then(Sexp::as_atom) {
            Some(h) if h == tag => Ok(&items[1..]),
            _ => Err(self.error(format!("expected ({tag} ...)"))),
        }
    }

    pub fn expect_usize(&self, what: &str) -> Result<usize> {
        let a = self.expect_atom(what)?;
        a.parse().map_err(|_| self.error(format!("expected {what} (a number), found `{a}`")))
    }
}

/// Parses exactly one expression; trailing non-comment text is an error.
pub fn parse(text: &str) -> Result<Sexp> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(Error::Parse { line: 1, col: 1, msg: "empty input".into() }),
        _ => {
            let p = all[1].pos;
            Err(Error::Parse { line: p.line, col: p.col, msg: "trailing input".into() })
        }
    }
}

/// Parses a sequence of top-level expressions.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>> {
    let mut top = Vec::new();
    // open lists: (start position, items so far)
    let mut open: Vec<(Pos, Vec<Sexp>)> = Vec::new();
    let mut chars = text.char_indices().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    while let Some(&(i, c)) = chars.peek() {
        let here = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                col += 1;
                open.push((here, Vec::new()));
            }
            ')' => {
                chars.next();
                col += 1;
                let (pos, items) = open.pop().ok_or(Error::Parse {
                    line: here.line,
                    col: here.col,
                    msg: "unbalanced `)`".into(),
                })?;
                let s = Sexp { pos, node: Node::List(items) };
                match open.last_mut() {
                    Some((_, parent)) => parent.push(s),
                    None => top.push(s),
                }
            }
            _ => {
                let start = i;
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    end = j + c.len_utf8();
                    chars.next();
                    col += 1;
                }
                let s = Sexp { pos: here, node: Node::Atom(text[start..end].to_string()) };
                match open.last_mut() {
                    Some((_, parent)) => parent.push(s),
                    None => top.push(s),
                }
            }
        }
    }
    if let Some((pos, _)) = open.last() {
        return Err(Error::Parse { line: pos.line, col: pos.col, msg: "unclosed `(`".into() });
    }
    Ok(top)
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // (remaining siblings, whether a separator is needed before the next)
        let mut stack: Vec<std::slice::Iter<'_, Sexp>> = Vec::new();
        let mut first = true;
        let mut cur = Some(self);
        loop {
            if let Some(s) = cur.take() {
                if !first {
                    f.write_str(" ")?;
                }
                match &s.node {
                    Node::Atom(a) => {
                        f.write_str(a)?;
                        first = false;
                    }
                    Node::List(items) => {
                        f.write_str("(")?;
                        first = true;
                        stack.push(items.iter());
                    }
                }
            }
            let Some(top) = stack.last_mut() else { return Ok(()) };
            match top.next() {
                Some(s) => cur = Some(s),
                None => {
                    stack.pop();
                    f.write_str(")")?;
                    first = false;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = parse("(a (b c)  c) ; trailing comment").unwrap();
        assert_eq!(s.to_string(), "(a (b c) c)");
        assert_eq!(parse("_").unwrap().to_string(), "_");
        assert_eq!(parse("()").unwrap().to_string(), "()");
    }

    #[test]
    fn error_positions() {
        match parse("(a\n  (b c)") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (1, 1)),
            other => panic!("{other:?}"),
        }
        match parse("(a))") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (1, 4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deep_nesting() {
        let n = 20_000;
        let text = format!("{}x{}", "(a ".repeat(n), ")".repeat(n));
        let s = parse(&text).unwrap();
        assert_eq!(s.to_string().len(), text.len());
    }
}
