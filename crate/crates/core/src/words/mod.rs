//! Exact word problem for odd-angled Coxeter systems.
//!
//! Elements live in a lazily grown Cayley graph ([`CoxeterGroup`]). A new
//! vertex `w·s` is identified with existing vertices only through rank-2
//! residues: `w·s` also equals `v·t` exactly when `w` and `v` sit one step
//! below the top of the same finite `⟨s, t⟩` residue. That is the whole
//! content of the braid relations, so no general word search is needed and
//! every vertex gets its ShortLex normal form on creation.
//!
//! [`tits`] holds an independent reference solver working directly with
//! deletions and braid replacements on words.

mod cayley;
pub mod tits;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use cayley::{CoxeterGroup, Elem, Session, DEFAULT_LENGTH_CAP};

/// A sequence of 0-based generator indices. Prints 1-based, `e` when empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn generator(s: usize) -> Self {
        Word(vec![s as u8])
    }

    /// Builds a word from 1-based letters.
    pub fn from_one_based(letters: &[usize]) -> Self {
        Word(letters.iter().map(|&l| (l - 1) as u8).collect())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, s: usize) {
        self.0.push(s as u8);
    }

    /// Renames letters through `map` (letter `i` becomes `map[i]`).
    pub fn relabel(&self, map: &[usize]) -> Word {
        Word(self.0.iter().map(|&l| map[l as usize] as u8).collect())
    }

    /// ShortLex comparison: length first, then lexicographic on letters.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }

    pub fn max_letter(&self) -> Option<usize> {
        self.0.iter().max().map(|&l| l as usize)
    }

    /// Parses the literal syntax: whitespace-separated 1-based indices, or `e`.
    pub fn parse_literal(s: &str) -> Result<Word> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks == ["e"] {
            return Ok(Word::empty());
        }
        if toks.is_empty() {
            return Err(Error::Invalid("empty word literal (use `e` for the identity)".into()));
        }
        toks.iter()
            .map(|t| match t.parse::<usize>() {
                Ok(v) if (1..=crate::diagrams::MAX_RANK).contains(&v) => Ok((v - 1) as u8),
                _ => Err(Error::Invalid(format!("bad letter `{t}` in word literal"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::parse_literal(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", l + 1)?;
        }
        Ok(())
    }
}

impl CoxeterGroup {
    /// ShortLex-least reduced word for the element `w` represents.
    pub fn normal_form(&self, w: &Word) -> Result<Word> {
        let mut s = self.session();
        let e = s.eval(w)?;
        Ok(s.word(e))
    }

    pub fn length(&self, w: &Word) -> Result<usize> {
        let mut s = self.session();
        let e = s.eval(w)?;
        Ok(s.len(e))
    }

    pub fn is_reduced(&self, w: &Word) -> Result<bool> {
        Ok(self.length(w)? == w.len())
    }

    pub fn multiply(&self, w: &Word, v: &Word) -> Result<Word> {
        self.normal_form(&w.concat(v))
    }

    pub fn invert(&self, w: &Word) -> Result<Word> {
        self.normal_form(&w.reversed())
    }

    /// Right descent set `{ s : l(ws) < l(w) }`, as sorted 0-based indices.
    pub fn descent_set(&self, w: &Word) -> Result<Vec<usize>> {
        let mut s = self.session();
        let e = s.eval(w)?;
        Ok(s.descent_list(e))
    }
}
