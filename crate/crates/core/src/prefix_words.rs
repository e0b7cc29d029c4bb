//! Finite binary words, the prefix order, and finite complete antichains.
//!
//! A [`Word`] is a vertex of the infinite rooted binary tree and, at the same
//! time, the address of a cone of Cantor space. The empty word is the root and
//! is written `^` in every text format.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite word over `{0, 1}`.
///
/// `Ord` is the canonical order used for serialization: shorter words first,
/// then lexicographic with `0 < 1`. Use [`Word::tree_cmp`] for the plain
/// lexicographic (left-to-right leaf) order.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u8>);

/// How two words sit relative to each other in the prefix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrefixRelation {
    Equal,
    FirstPrefixOfSecond,
    SecondPrefixOfFirst,
    Incomparable,
}

impl PrefixRelation {
    pub fn swapped(self) -> Self {
        match self {
            PrefixRelation::FirstPrefixOfSecond => PrefixRelation::SecondPrefixOfFirst,
            PrefixRelation::SecondPrefixOfFirst => PrefixRelation::FirstPrefixOfSecond,
            other => other,
        }
    }

    pub fn is_comparable(self) -> bool {
        self != PrefixRelation::Incomparable
    }
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from bits; every entry must be 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.iter().all(|&b| b <= 1) {
            Ok(Word(bits.to_vec()))
        } else {
            Err(Error::InvalidWord(format!("{bits:?}")))
        }
    }

    pub(crate) fn from_vec_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Word(bits)
    }

    /// Parses a literal; panics on malformed input. Intended for constants and tests.
    pub fn lit(s: &str) -> Self {
        s.parse()
            .unwrap_or_else(|e| panic!("bad word literal {s:?}: {e}"))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self · b`
    pub fn child(&self, bit: u8) -> Word {
        debug_assert!(bit <= 1);
        let mut bits = Vec::with_capacity(self.0.len() + 1);
        bits.extend_from_slice(&self.0);
        bits.push(bit);
        Word(bits)
    }

    pub fn concat(&self, tail: &Word) -> Word {
        let mut bits = Vec::with_capacity(self.0.len() + tail.0.len());
        bits.extend_from_slice(&self.0);
        bits.extend_from_slice(&tail.0);
        Word(bits)
    }

    pub fn concat_bits(&self, tail: &[u8]) -> Word {
        let mut bits = Vec::with_capacity(self.0.len() + tail.len());
        bits.extend_from_slice(&self.0);
        bits.extend_from_slice(tail);
        Word(bits)
    }

    pub fn prepend(&self, head: &Word) -> Word {
        head.concat(self)
    }

    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn last_bit(&self) -> Option<u8> {
        self.0.last().copied()
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &Word) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    /// `other` with the prefix `self` removed, if `self` is a prefix of `other`.
    pub fn suffix_after(&self, other: &Word) -> Option<Word> {
        other
            .0
            .strip_prefix(self.0.as_slice())
            .map(|t| Word(t.to_vec()))
    }

    /// Longest common prefix.
    pub fn lcp(&self, other: &Word) -> Word {
        let n = self
            .0
            .iter()
            .zip(&other.0)
            .take_while(|(a, b)| a == b)
            .count();
        Word(self.0[..n].to_vec())
    }

    /// Plain lexicographic comparison (prefixes before their extensions).
    pub fn tree_cmp(&self, other: &Word) -> Ordering {
        self.0.cmp(&other.0)
    }

    /// All proper prefixes, from the root down.
    pub fn proper_prefixes(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.0.len()).map(move |n| Word(self.0[..n].to_vec()))
    }

    /// The `2^len` words of the given length, in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = Word> {
        assert!(
            len < usize::BITS as usize,
            "level {len} is too deep to enumerate"
        );
        (0..1usize << len)
            .map(move |n| Word((0..len).rev().map(|i| ((n >> i) & 1) as u8).collect()))
    }

    /// All words of length `< len`, in canonical order.
    pub fn all_shorter_than(len: usize) -> impl Iterator<Item = Word> {
        (0..len).flat_map(Word::all_of_length)
    }
}

/// Classifies the prefix relation between two words.
pub fn compare(a: &Word, b: &Word) -> PrefixRelation {
    match (a.is_prefix_of(b), b.is_prefix_of(a)) {
        (true, true) => PrefixRelation::Equal,
        (true, false) => PrefixRelation::FirstPrefixOfSecond,
        (false, true) => PrefixRelation::SecondPrefixOfFirst,
        (false, false) => PrefixRelation::Incomparable,
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("^");
        }
        let s: String = self
            .0
            .iter()
            .map(|&b| if b == 0 { '0' } else { '1' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "^" {
            return Ok(Word::empty());
        }
        if s.is_empty() {
            return Err(Error::InvalidWord(s.to_string()));
        }
        s.bytes()
            .map(|c| match c {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::InvalidWord(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sorts lexicographically and returns the first comparable pair, if any.
/// In lexicographic order a prefix is always adjacent to one of its
/// extensions, so checking neighbours suffices.
fn first_comparable_pair(sorted_lex: &[Word]) -> Option<(Word, Word)> {
    sorted_lex
        .windows(2)
        .find(|w| w[0].is_prefix_of(&w[1]))
        .map(|w| (w[0].clone(), w[1].clone()))
}

/// Merges sibling leaves bottom-up; a finite antichain is complete iff this
/// collapses it to the single root.
fn collapses_to_root(sorted_lex: &[Word]) -> bool {
    let mut stack: Vec<Word> = Vec::with_capacity(sorted_lex.len());
    for w in sorted_lex {
        stack.push(w.clone());
        while stack.len() >= 2 {
            let n = stack.len();
            let (a, b) = (&stack[n - 2], &stack[n - 1]);
            if a.len() == b.len()
                && !a.is_empty()
                && a.last_bit() == Some(0)
                && b.last_bit() == Some(1)
                && a.0[..a.len() - 1] == b.0[..b.len() - 1]
            {
                let parent = a.parent().expect("nonempty");
                stack.truncate(n - 2);
                stack.push(parent);
            } else {
                break;
            }
        }
    }
    stack.len() == 1 && stack[0].is_empty()
}

/// True iff the words are pairwise incomparable and their cones cover Cantor space.
pub fn is_complete_antichain(words: &[Word]) -> bool {
    let mut sorted = words.to_vec();
    sorted.sort_by(Word::tree_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    first_comparable_pair(&sorted).is_none() && collapses_to_root(&sorted)
}

/// A finite antichain in the prefix order, stored in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Word>", into = "Vec<Word>")]
pub struct Antichain {
    words: Vec<Word>,
}

impl Antichain {
    /// Validates pairwise incomparability (not completeness).
    pub fn new(words: Vec<Word>) -> Result<Self> {
        let mut sorted = words;
        sorted.sort_by(Word::tree_cmp);
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::NotBijection(w[0].clone()));
        }
        if let Some((a, b)) = first_comparable_pair(&sorted) {
            return Err(Error::InvalidAntichain(a, b));
        }
        sorted.sort();
        Ok(Antichain { words: sorted })
    }

    /// Validates incomparability and completeness.
    pub fn complete(words: Vec<Word>) -> Result<Self> {
        let a = Antichain::new(words)?;
        if a.is_complete() {
            Ok(a)
        } else {
            Err(Error::IncompleteCover)
        }
    }

    pub fn root() -> Self {
        Antichain {
            words: vec![Word::empty()],
        }
    }

    /// The `2^level` words of length `level`.
    pub fn full_level(level: usize) -> Self {
        let mut words: Vec<Word> = Word::all_of_length(level).collect();
        words.sort();
        Antichain { words }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.binary_search(w).is_ok()
    }

    pub fn is_complete(&self) -> bool {
        let mut sorted = self.words.clone();
        sorted.sort_by(Word::tree_cmp);
        collapses_to_root(&sorted)
    }

    /// Words in left-to-right (lexicographic) leaf order.
    pub fn leaves_in_order(&self) -> Vec<Word> {
        let mut sorted = self.words.clone();
        sorted.sort_by(Word::tree_cmp);
        sorted
    }

    /// Vertices strictly above the antichain: the interior of its tree.
    pub fn interior_vertices(&self) -> Vec<Word> {
        interior_of(&self.words)
    }

    /// The member that is a prefix of `w`, if any.
    pub fn prefix_member_of(&self, w: &Word) -> Option<&Word> {
        self.words.iter().find(|a| a.is_prefix_of(w))
    }

    /// Replaces the member `a` by `a0`, `a1`.
    pub fn expand(&self, a: &Word) -> Result<Antichain> {
        let pos = self
            .words
            .binary_search(a)
            .map_err(|_| Error::NotAMember(a.clone()))?;
        let mut words = self.words.clone();
        words.remove(pos);
        words.push(a.child(0));
        words.push(a.child(1));
        words.sort();
        Ok(Antichain { words })
    }

    /// The coarsest complete antichain refining both inputs.
    pub fn refine(&self, other: &Antichain) -> Result<Antichain> {
        if !self.is_complete() || !other.is_complete() {
            return Err(Error::IncompleteInput);
        }
        let mut out = Vec::new();
        for a in &self.words {
            for b in &other.words {
                match compare(a, b) {
                    PrefixRelation::Equal | PrefixRelation::SecondPrefixOfFirst => {
                        out.push(a.clone())
                    }
                    PrefixRelation::FirstPrefixOfSecond => out.push(b.clone()),
                    PrefixRelation::Incomparable => {}
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(Antichain { words: out })
    }
}

impl TryFrom<Vec<Word>> for Antichain {
    type Error = Error;

    fn try_from(words: Vec<Word>) -> Result<Self> {
        Antichain::new(words)
    }
}

impl From<Antichain> for Vec<Word> {
    fn from(a: Antichain) -> Self {
        a.words
    }
}

/// All proper prefixes of the given words, deduplicated, in canonical order.
pub fn interior_of(words: &[Word]) -> Vec<Word> {
    let mut out: Vec<Word> = words.iter().flat_map(|w| w.proper_prefixes()).collect();
    out.sort();
    out.dedup();
    out
}
