//! Binary words, block decompositions, and the word ↔ index dictionary.
//!
//! A *bounded word* is a binary word starting with `0` and ending with `1`;
//! it encodes the index `(k₁,…,k_d)` as `0 · 10^{k₁−1} ⋯ 10^{k_d−1} · 1`,
//! integration bounds included, so `|word| = weight + 2`.
//!
//! The *block decomposition* of a word starting with `0` splits it at every
//! repeated adjacent letter; the pieces are the maximal alternating runs and
//! are recorded by their lengths alone, since the lengths (together with the
//! leading `0`) determine the word uniquely.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A nonempty binary word. Rendered as an ASCII string of `0`s and `1`s.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryWord {
    bits: Vec<bool>,
}

impl BinaryWord {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Empty);
        }
        Ok(BinaryWord { bits })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires nonempty
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid word character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        BinaryWord::new(bits)
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BinaryWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Lengths `(ℓ₁,…,ℓ_n)` of the maximal alternating blocks of a word.
///
/// Every entry is ≥ 1 and the list is nonempty. Serialized as a JSON array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct BlockLengths {
    lengths: Vec<u32>,
}

impl BlockLengths {
    pub fn new(lengths: Vec<u32>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::Empty);
        }
        if lengths.iter().any(|&l| l == 0) {
            return Err(Error::NonPositiveEntry);
        }
        Ok(BlockLengths { lengths })
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total(&self) -> u32 {
        self.lengths.iter().sum()
    }
}

impl fmt::Display for BlockLengths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.lengths.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for BlockLengths {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BlockLengths::new(parse_u32_list(s)?)
    }
}

impl<'de> Deserialize<'de> for BlockLengths {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let lengths = Vec::<u32>::deserialize(deserializer)?;
        BlockLengths::new(lengths).map_err(D::Error::custom)
    }
}

/// An index `(s₁,…,s_r)` of positive integers, written innermost-first:
/// the nested sum runs over `0 < n₁ < ⋯ < n_r` (or `≤` for star values),
/// with `s_i` the exponent of `n_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Index {
    parts: Vec<u32>,
}

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Empty);
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::NonPositiveEntry);
        }
        Ok(Index { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    /// The nested sum converges iff the outermost exponent is at least 2.
    pub fn is_convergent(&self) -> bool {
        *self.parts.last().expect("nonempty") >= 2
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Index {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Index::new(parse_u32_list(s)?)
    }
}

impl<'de> Deserialize<'de> for Index {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<u32>::deserialize(deserializer)?;
        Index::new(parts).map_err(D::Error::custom)
    }
}

pub(crate) fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("invalid entry {:?}: {e}", p.trim())))
        })
        .collect()
}

/// Splits `w` at every repeated adjacent letter and returns the lengths of
/// the resulting maximal alternating blocks. Requires the first bit to be 0.
pub fn block_decompose(w: &BinaryWord) -> Result<BlockLengths> {
    let bits = w.bits();
    if bits[0] {
        return Err(Error::LeadingOne);
    }
    let mut lengths = Vec::new();
    let mut run = 1u32;
    for i in 1..bits.len() {
        if bits[i] == bits[i - 1] {
            lengths.push(run);
            run = 1;
        } else {
            run += 1;
        }
    }
    lengths.push(run);
    BlockLengths::new(lengths)
}

/// Reconstructs the unique word starting with 0 whose block decomposition is
/// `ℓ`: each block alternates internally and starts with the letter the
/// previous block ended with.
pub fn block_recompose(l: &BlockLengths) -> BinaryWord {
    let mut bits = Vec::with_capacity(l.total() as usize);
    let mut start = false; // first block starts with 0
    for &len in l.lengths() {
        let mut bit = start;
        for _ in 0..len {
            bits.push(bit);
            bit = !bit;
        }
        // The next block repeats the letter this one ended with.
        start = *bits.last().expect("block is nonempty");
    }
    BinaryWord::new(bits).expect("lengths are nonempty")
}

/// Encodes an index as the bounded word `0 · 10^{k₁−1} ⋯ 10^{k_d−1} · 1`.
pub fn index_to_word(k: &Index) -> BinaryWord {
    let mut bits = Vec::with_capacity(k.weight() as usize + 2);
    bits.push(false);
    for &part in k.parts() {
        bits.push(true);
        for _ in 1..part {
            bits.push(false);
        }
    }
    bits.push(true);
    BinaryWord::new(bits).expect("nonempty")
}

/// Decodes a bounded word back to its index. The word must start with `01`,
/// end with `1`, and have interior of the form `(1 0^{k−1})⁺`.
pub fn word_to_index(w: &BinaryWord) -> Result<Index> {
    let bits = w.bits();
    if bits.len() < 3 {
        return Err(Error::InvalidWord(format!(
            "bounded word needs at least 3 bits, got {}",
            bits.len()
        )));
    }
    if bits[0] || !bits[1] {
        return Err(Error::InvalidWord(format!("word {w} does not start with 01")));
    }
    if !bits[bits.len() - 1] {
        return Err(Error::InvalidWord(format!("word {w} does not end with 1")));
    }
    let interior = &bits[1..bits.len() - 1];
    let mut parts = Vec::new();
    let mut current = 0u32;
    for &b in interior {
        if b {
            if current > 0 {
                parts.push(current);
            }
            current = 1;
        } else {
            // `interior[0]` is 1, so a 0 always continues a part.
            current += 1;
        }
    }
    parts.push(current);
    Index::new(parts)
}

/// Whether `block_recompose(ℓ)` ends with the letter 1, decided from the
/// lengths alone: the word ends in 1 iff `Σℓᵢ − n` is odd.
pub fn ends_in_one(l: &BlockLengths) -> bool {
    (l.total() as usize + l.len()) % 2 == 1
}
