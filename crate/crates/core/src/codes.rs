//! Binary linear `(n, k, d)` codes over GF(2).
//!
//! Words are packed into a `u64` with position `i` stored in bit `i`, so
//! lengths are capped at 64. Codeword enumeration is brute force over all
//! `2^k` messages and is guarded at `k <= 24`; the enumeration is also the
//! correctness oracle for everything else in this module.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest dimension `k` for which the `2^k` codewords are enumerated.
pub const MAX_ENUM_K: usize = 24;
/// Longest supported word.
pub const MAX_LEN: usize = 64;

/// A GF(2) element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn from_u8(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Bit::Zero),
            1 => Ok(Bit::One),
            _ => Err(Error::InvalidParameter(format!("bit must be 0 or 1, got {v}"))),
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl From<Bit> for u8 {
    fn from(b: Bit) -> u8 {
        b.as_u8()
    }
}

impl TryFrom<u8> for Bit {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        Self::from_u8(v)
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// A fixed-length bit string.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    len: usize,
    word: u64,
}

impl BitString {
    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_word(len, 0)
    }

    pub fn from_word(len: usize, word: u64) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::InvalidBitString(format!("length {len} outside 1..=64")));
        }
        if len < MAX_LEN && word >> len != 0 {
            return Err(Error::InvalidBitString(format!("word has bits beyond length {len}")));
        }
        Ok(Self { len, word })
    }

    pub fn from_bits(bits: &[Bit]) -> Result<Self> {
        let word = bits
            .iter()
            .enumerate()
            .fold(0u64, |w, (i, b)| w | (u64::from(b.as_u8()) << i));
        Self::from_word(bits.len(), word)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn word(&self) -> u64 {
        self.word
    }

    pub fn get(&self, i: usize) -> Bit {
        assert!(i < self.len, "position {i} out of range");
        Bit::from((self.word >> i) & 1 == 1)
    }

    pub fn with(&self, i: usize, bit: Bit) -> Self {
        assert!(i < self.len, "position {i} out of range");
        let word = (self.word & !(1 << i)) | (u64::from(bit.as_u8()) << i);
        Self { len: self.len, word }
    }

    pub fn bits(&self) -> impl Iterator<Item = Bit> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn weight(&self) -> usize {
        self.word.count_ones() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.word == 0
    }

    fn check_len(&self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        Ok(Self {
            len: self.len,
            word: self.word ^ other.word,
        })
    }

    pub fn distance(&self, other: &BitString) -> Result<usize> {
        Ok(self.xor(other)?.weight())
    }

    /// Positions where the two strings differ, ascending.
    pub fn differing_positions(&self, other: &BitString) -> Result<Vec<usize>> {
        let diff = self.xor(other)?;
        Ok((0..self.len).filter(|&i| (diff.word >> i) & 1 == 1).collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl core::str::FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(Bit::Zero),
                '1' => Ok(Bit::One),
                other => Err(Error::InvalidBitString(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(&bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|e: Error| serde::de::Error::custom(e.to_string()))
    }
}

/// A binary linear code given by a full-rank generator matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    n: usize,
    rows: Vec<u64>,
    d: usize,
}

impl LinearCode {
    /// Check rank and compute the minimum distance by enumeration.
    pub fn from_generator(rows: &[BitString]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidCode("empty generator".into()))?;
        let n = first.len();
        for row in rows {
            first.check_len(row)?;
        }
        let packed: Vec<u64> = rows.iter().map(BitString::word).collect();
        if gf2_rank(&packed) < packed.len() {
            return Err(Error::RankDeficient);
        }
        let d = min_weight(n, &packed)?;
        Ok(Self { n, rows: packed, d })
    }

    pub fn from_text_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.as_ref().parse())
            .collect::<Result<Vec<BitString>>>()?;
        Self::from_generator(&parsed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generator(&self) -> Vec<BitString> {
        self.rows
            .iter()
            .map(|&w| BitString { len: self.n, word: w })
            .collect()
    }

    /// Codeword for a message, where the first generator row is selected by
    /// the most significant message bit. Iterating messages `0..2^k` therefore
    /// walks codewords in lexicographic message order.
    pub fn encode_message(&self, message: u64) -> BitString {
        let k = self.k();
        let word = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| (message >> (k - 1 - i)) & 1 == 1)
            .fold(0u64, |acc, (_, &row)| acc ^ row);
        BitString { len: self.n, word }
    }

    /// All `2^k` codewords in message order.
    pub fn codewords(&self) -> Result<impl Iterator<Item = BitString> + '_> {
        if self.k() > MAX_ENUM_K {
            return Err(Error::EnumerationTooLarge(self.k()));
        }
        Ok((0..1u64 << self.k()).map(move |m| self.encode_message(m)))
    }

    /// Membership test by rank: `w` is a codeword iff appending it keeps the
    /// rank at `k`.
    pub fn contains(&self, w: &BitString) -> bool {
        if w.len() != self.n {
            return false;
        }
        let mut rows = self.rows.clone();
        rows.push(w.word());
        gf2_rank(&rows) == self.k()
    }

    /// The ratio threshold `1 - d/n` that bounds the intercept frequency.
    pub fn threshold(&self) -> f64 {
        1.0 - self.d as f64 / self.n as f64
    }
}

fn gf2_rank(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &row in rows {
        let reduced = basis.iter().fold(row, |r, &b| r.min(r ^ b));
        if reduced != 0 {
            basis.push(reduced);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

fn min_weight(n: usize, rows: &[u64]) -> Result<usize> {
    let k = rows.len();
    if k > MAX_ENUM_K {
        return Err(Error::EnumerationTooLarge(k));
    }
    // Gray-code walk: one XOR per codeword.
    let mut word = 0u64;
    let mut best = n;
    for step in 1u64..(1 << k) {
        word ^= rows[step.trailing_zeros() as usize];
        best = best.min(word.count_ones() as usize);
    }
    Ok(best)
}

/// Minimum Hamming weight over the nonzero codewords, recomputed by
/// enumeration.
pub fn min_distance(code: &LinearCode) -> Result<usize> {
    min_weight(code.n, &code.rows)
}

/// `c . r = XOR_i (c_i AND r_i)`.
pub fn parity(c: &BitString, r: &BitString) -> Result<Bit> {
    c.check_len(r)?;
    Ok(Bit::from((c.word & r.word).count_ones() % 2 == 1))
}

/// The two parity classes of a code under a public mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetSplit {
    pub zero: Vec<BitString>,
    pub one: Vec<BitString>,
}

impl CosetSplit {
    pub fn class(&self, b: Bit) -> &[BitString] {
        match b {
            Bit::Zero => &self.zero,
            Bit::One => &self.one,
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.zero.len() == self.one.len()
    }
}

pub fn coset_split(code: &LinearCode, r: &BitString) -> Result<CosetSplit> {
    if r.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            actual: r.len(),
        });
    }
    if r.is_zero() {
        return Err(Error::ZeroMask);
    }
    let mut split = CosetSplit {
        zero: Vec::new(),
        one: Vec::new(),
    };
    for c in code.codewords()? {
        match parity(&c, r)? {
            Bit::Zero => split.zero.push(c),
            Bit::One => split.one.push(c),
        }
    }
    Ok(split)
}

/// Uniform draw from the class of parity `b`.
pub fn sample_codeword<R: Rng + ?Sized>(split: &CosetSplit, b: Bit, rng: &mut R) -> Result<BitString> {
    split.class(b).choose(rng).copied().ok_or(Error::EmptyCoset)
}

/// A word half-way between two codewords: it agrees with `c_a` on the first
/// `ceil(h/2)` differing positions (index order) and with `c_b` on the rest.
pub fn midpoint_word(c_a: &BitString, c_b: &BitString) -> Result<BitString> {
    let diff = c_a.differing_positions(c_b)?;
    if diff.len() < 2 {
        return Err(Error::DistanceTooSmall(diff.len()));
    }
    let keep = diff.len().div_ceil(2);
    Ok(diff[keep..]
        .iter()
        .fold(*c_a, |w, &i| w.with(i, c_b.get(i))))
}

/// Codewords agreeing with `values` at `positions`.
pub fn consistent_codewords(
    code: &LinearCode,
    positions: &[usize],
    values: &[Bit],
) -> Result<Vec<BitString>> {
    if positions.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: positions.len(),
            actual: values.len(),
        });
    }
    let mut mask = 0u64;
    let mut want = 0u64;
    for (&p, &v) in positions.iter().zip(values) {
        if p >= code.n() {
            return Err(Error::InvalidParameter(format!("position {p} out of range")));
        }
        if mask & (1 << p) != 0 {
            return Err(Error::InvalidParameter(format!("position {p} repeated")));
        }
        mask |= 1 << p;
        want |= u64::from(v.as_u8()) << p;
    }
    Ok(code
        .codewords()?
        .filter(|c| c.word() & mask == want)
        .collect())
}

/// A codeword pair at the smallest distance whose parities under `r` differ,
/// with the first member drawn from parity class 0. The pair is `(0, w)` for
/// the first minimum-weight odd-parity codeword `w` in message order.
pub fn min_distance_cross_pair(code: &LinearCode, r: &BitString) -> Result<(BitString, BitString)> {
    let zero = BitString::zeros(code.n())?;
    let mut best: Option<BitString> = None;
    for c in code.codewords()? {
        if parity(&c, r)? == Bit::One && best.is_none_or(|b| c.weight() < b.weight()) {
            best = Some(c);
        }
    }
    best.map(|w| (zero, w)).ok_or(Error::NoCrossCosetPair)
}

/// Codes available by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BuiltinCode {
    Repetition3,
    Hamming74,
    ExtendedHamming84,
    Golay24,
}

impl BuiltinCode {
    pub const ALL: [BuiltinCode; 4] = [
        BuiltinCode::Repetition3,
        BuiltinCode::Hamming74,
        BuiltinCode::ExtendedHamming84,
        BuiltinCode::Golay24,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinCode::Repetition3 => "repetition3",
            BuiltinCode::Hamming74 => "hamming74",
            BuiltinCode::ExtendedHamming84 => "hamming84",
            BuiltinCode::Golay24 => "golay24",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::InvalidCode(format!("unknown builtin code {name:?}")))
    }

    pub fn rows(self) -> &'static [&'static str] {
        match self {
            BuiltinCode::Repetition3 => &["111"],
            BuiltinCode::Hamming74 => &["1000110", "0100101", "0010011", "0001111"],
            BuiltinCode::ExtendedHamming84 => &["10001101", "01001011", "00100111", "00011110"],
            BuiltinCode::Golay24 => &[
                "100000000000100111110001",
                "010000000000010011111010",
                "001000000000001001111101",
                "000100000000100100111110",
                "000010000000110010011101",
                "000001000000111001001110",
                "000000100000111100100101",
                "000000010000111110010010",
                "000000001000011111001001",
                "000000000100001111100110",
                "000000000010010101010111",
                "000000000001101010101011",
            ],
        }
    }

    pub fn code(self) -> LinearCode {
        LinearCode::from_text_rows(self.rows()).expect("builtin generators are full rank")
    }
}

/// A random full-rank `k x n` generator, redrawn until independent.
pub fn random_code<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<LinearCode> {
    if k == 0 || k >= n || n > MAX_LEN {
        return Err(Error::InvalidCode(format!("need 0 < k < n <= 64, got n={n}, k={k}")));
    }
    if k > MAX_ENUM_K {
        return Err(Error::EnumerationTooLarge(k));
    }
    let mask = if n == MAX_LEN { u64::MAX } else { (1u64 << n) - 1 };
    loop {
        let rows: Vec<BitString> = (0..k)
            .map(|_| BitString { len: n, word: rng.random::<u64>() & mask })
            .collect();
        match LinearCode::from_generator(&rows) {
            Err(Error::RankDeficient) => continue,
            other => return other,
        }
    }
}
