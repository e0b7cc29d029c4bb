//! Text and JSON formats.
//!
//! A V element is written one entry per line as `a -> b`, with `^` for the
//! empty word, in canonical order; blank lines and lines starting with `#`
//! are ignored on input. The JSON form is `{"pairs": [["a", "b"], ...]}`.
//! A QAut element is written as its cutoff form:
//! `{"level": k, "v_part": [...], "bijection": [...]}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prefix_words::Word;
use crate::qaut::{CutoffForm, QAutElement};
use crate::thompson_v::{Pair, VElement};

#[derive(Serialize, Deserialize)]
struct PairsJson {
    pairs: Vec<Pair>,
}

impl Serialize for VElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairsJson {
            pairs: self.canonical_pairs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PairsJson::deserialize(d)?;
        VElement::from_pairs(raw.pairs).map_err(D::Error::custom)
    }
}

impl Serialize for QAutElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.cutoff_form().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QAutElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let form = CutoffForm::deserialize(d)?;
        QAutElement::from_cutoff_form(&form).map_err(D::Error::custom)
    }
}

pub fn v_to_text(v: &VElement) -> String {
    v.to_string()
}

pub fn v_to_json(v: &VElement) -> String {
    serde_json::to_string(v).expect("serializable")
}

pub fn qaut_to_json(t: &QAutElement) -> String {
    serde_json::to_string(t).expect("serializable")
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn json_error(e: serde_json::Error) -> Error {
    parse_error(e.line(), e.column(), e.to_string())
}

fn parse_word_at(token: &str, line: usize, column: usize) -> Result<Word> {
    token
        .parse::<Word>()
        .map_err(|e| parse_error(line, column, e.to_string()))
}

/// Parses the line-based text format.
pub fn v_from_text(input: &str) -> Result<VElement> {
    let mut pairs = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - trimmed.len();
        let Some(arrow) = trimmed.find("->") else {
            return Err(parse_error(line, indent + 1, "expected `a -> b`"));
        };
        let left = &trimmed[..arrow];
        let right = &trimmed[arrow + 2..];
        let left_col = indent + 1 + (left.len() - left.trim_start().len());
        let right_col = indent + arrow + 3 + (right.len() - right.trim_start().len());
        let (left, right) = (left.trim(), right.trim());
        if left.is_empty() {
            return Err(parse_error(line, left_col, "missing domain word"));
        }
        if right.is_empty() {
            return Err(parse_error(line, right_col, "missing range word"));
        }
        pairs.push((
            parse_word_at(left, line, left_col)?,
            parse_word_at(right, line, right_col)?,
        ));
    }
    VElement::from_pairs(pairs)
}

pub fn v_from_json(input: &str) -> Result<VElement> {
    let raw: PairsJson = serde_json::from_str(input).map_err(json_error)?;
    VElement::from_pairs(raw.pairs)
}

/// Reads either format, choosing JSON when the input starts with `{`.
pub fn v_from_str(input: &str) -> Result<VElement> {
    if input.trim_start().starts_with('{') {
        v_from_json(input)
    } else {
        v_from_text(input)
    }
}

pub fn qaut_from_json(input: &str) -> Result<QAutElement> {
    let form: CutoffForm = serde_json::from_str(input).map_err(json_error)?;
    QAutElement::from_cutoff_form(&form)
}
