//! Canonical text encoding of views.
//!
//! ```text
//! view := "(" color { " " port ":" port view } ")"
//! ```
//!
//! Children appear in increasing local-port order; each is preceded by its
//! local port and the port at which the edge arrives at the child. Integers
//! are decimal without leading zeros.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::{Record, ViewArena, ViewError, ViewRef};
use crate::netmodel::{Color, Port};

impl ViewArena {
    /// Materializes the canonical encoding. Its length grows like
    /// `deg^height`, so this is for small views only.
    pub fn encode(&self, root: ViewRef) -> String {
        let mut memo: HashMap<ViewRef, String> = HashMap::new();
        let mut stack = vec![root];
        while let Some(&v) = stack.last() {
            if memo.contains_key(&v) {
                stack.pop();
                continue;
            }
            let record = self.record(v);
            let pending: Vec<ViewRef> = record
                .children
                .iter()
                .map(|&(_, c)| c)
                .filter(|c| !memo.contains_key(c))
                .collect();
            if !pending.is_empty() {
                stack.extend(pending);
                continue;
            }
            let mut text = format!("({}", record.color);
            for (p, (q, c)) in record.children.iter().enumerate() {
                text.push_str(&format!(" {p}:{q}"));
                text.push_str(&memo[c]);
            }
            text.push(')');
            memo.insert(v, text);
            stack.pop();
        }
        memo.remove(&root).expect("root was encoded")
    }

    /// Parses a canonical encoding and interns it.
    pub fn decode(&mut self, text: &str) -> Result<ViewRef, ViewError> {
        let mut parser = Parser {
            bytes: text.as_bytes(),
            pos: 0,
        };
        let v = parser.view(self)?;
        if parser.pos != parser.bytes.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(v)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ViewError {
        ViewError::Decode {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), ViewError> {
        if self.bytes.get(self.pos) == Some(&byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", byte as char)))
        }
    }

    fn number(&mut self) -> Result<usize, ViewError> {
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let digits = &self.bytes[start..self.pos];
        if digits.is_empty() {
            return Err(self.error("expected a number"));
        }
        if digits.len() > 1 && digits[0] == b'0' {
            return Err(ViewError::Decode {
                offset: start,
                message: "leading zero".into(),
            });
        }
        std::str::from_utf8(digits)
            .expect("ascii digits")
            .parse()
            .map_err(|_| self.error("number out of range"))
    }

    fn view(&mut self, arena: &mut ViewArena) -> Result<ViewRef, ViewError> {
        self.expect(b'(')?;
        let color = Color::try_from(self.number()?).map_err(|_| self.error("color out of range"))?;
        if color == 0 {
            return Err(self.error("colors start at 1"));
        }
        let mut children: Vec<(Port, ViewRef)> = Vec::new();
        while self.bytes.get(self.pos) == Some(&b' ') {
            self.pos += 1;
            let offset = self.pos;
            let p = self.number()?;
            if p != children.len() {
                return Err(ViewError::Decode {
                    offset,
                    message: format!("expected local port {}, found {p}", children.len()),
                });
            }
            self.expect(b':')?;
            let q = self.number()?;
            let child = self.view(arena)?;
            if let Some(&(_, first)) = children.first() {
                if arena.height(first) != arena.height(child) {
                    return Err(ViewError::Decode {
                        offset,
                        message: "children have different depths".into(),
                    });
                }
            }
            children.push((q, child));
        }
        self.expect(b')')?;
        let height = children.first().map_or(0, |&(_, c)| arena.height(c) + 1);
        Ok(arena.intern(Record {
            color,
            height,
            children: children.into(),
        }))
    }
}

/// A rooted port-labeled colored tree whose canonical encoding can be
/// generated lazily.
pub trait EncodingSource {
    type Node: Copy;
    fn color(&self, node: Self::Node) -> Color;
    /// Children in local-port order, each with its incoming port.
    fn children(&self, node: Self::Node) -> Vec<(Port, Self::Node)>;
    /// Must return true only if the two subtrees have identical encodings.
    /// Returning true for every equal pair keeps comparisons linear in depth.
    fn same(&self, a: Self::Node, b: Self::Node) -> bool;
}

enum Piece<N> {
    Text(Vec<u8>),
    Tree(N),
}

struct Stream<N> {
    stack: Vec<Piece<N>>,
    buf: Vec<u8>,
    pos: usize,
}

impl<N: Copy> Stream<N> {
    fn new(root: N) -> Self {
        Stream {
            stack: vec![Piece::Tree(root)],
            buf: Vec::new(),
            pos: 0,
        }
    }

    fn buffered(&self) -> &[u8] {
        &self.buf[self.pos..]
    }

    fn top_tree(&self) -> Option<N> {
        match self.stack.last() {
            Some(Piece::Tree(n)) => Some(*n),
            _ => None,
        }
    }

    /// Pops one piece into the buffer or expands one subtree. Returns false
    /// at the end of the encoding.
    fn advance<S: EncodingSource<Node = N>>(&mut self, src: &S) -> bool {
        match self.stack.pop() {
            None => false,
            Some(Piece::Text(text)) => {
                self.buf = text;
                self.pos = 0;
                true
            }
            Some(Piece::Tree(node)) => {
                self.stack.push(Piece::Text(b")".to_vec()));
                for (p, (q, child)) in src.children(node).into_iter().enumerate().rev() {
                    self.stack.push(Piece::Tree(child));
                    self.stack.push(Piece::Text(format!(" {p}:{q}").into_bytes()));
                }
                self.stack
                    .push(Piece::Text(format!("({}", src.color(node)).into_bytes()));
                true
            }
        }
    }
}

/// Byte-wise lexicographic comparison of two canonical encodings.
///
/// Both encodings are produced lazily. Whenever both streams sit at the start
/// of subtrees that `src` reports as the same, those subtrees are skipped.
/// Equal byte prefixes imply the two streams are at the same grammatical
/// position, and a complete encoding is never a proper prefix of another, so
/// the first differing subtree pair always contains the first differing byte.
pub fn compare_encodings<S: EncodingSource>(src: &S, a: S::Node, b: S::Node) -> Ordering {
    let mut left = Stream::new(a);
    let mut right = Stream::new(b);
    loop {
        let (la, lb) = (left.buffered(), right.buffered());
        if !la.is_empty() && !lb.is_empty() {
            let n = la.len().min(lb.len());
            match la[..n].cmp(&lb[..n]) {
                Ordering::Equal => {
                    left.pos += n;
                    right.pos += n;
                    continue;
                }
                other => return other,
            }
        }
        if la.is_empty() && lb.is_empty() {
            match (left.stack.is_empty(), right.stack.is_empty()) {
                (true, true) => return Ordering::Equal,
                (false, false) => {
                    if let (Some(x), Some(y)) = (left.top_tree(), right.top_tree()) {
                        if src.same(x, y) {
                            left.stack.pop();
                            right.stack.pop();
                            continue;
                        }
                    }
                }
                _ => {}
            }
        }
        if left.buffered().is_empty() {
            if !left.advance(src) {
                return Ordering::Less;
            }
            continue;
        }
        if !right.advance(src) {
            return Ordering::Greater;
        }
    }
}
