//! Dense GF(2) vectors, matrices and permutations.
//!
//! Every codec in this crate uses one bit-packing convention: logical bit
//! `i` (0-indexed) lives in byte `i / 8`, most-significant bit first within
//! the byte. Vectors and matrix rows are stored as `u64` words holding
//! eight consecutive bytes in big-endian order, so word-level operations
//! and the byte-level wire format agree without shuffling.

use std::fmt;

use rand::RngCore;
use thiserror::Error;

/// Attempt to invert a matrix with no GF(2) inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("matrix is singular over GF(2)")]
pub struct SingularMatrix;

#[inline]
fn word_count(nbits: usize) -> usize {
    nbits.div_ceil(64)
}

/// Mask keeping the leading `nbits % 64` bits of the final word (all bits
/// when the length is word-aligned).
#[inline]
fn tail_mask(nbits: usize) -> u64 {
    match nbits % 64 {
        0 => !0,
        r => !0 << (64 - r),
    }
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    nbits: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(nbits: usize) -> Self {
        BitVector {
            nbits,
            words: vec![0; word_count(nbits)],
        }
    }

    /// Unpacks `bytes` using the MSB-first convention. `bytes` must hold
    /// exactly `ceil(nbits / 8)` bytes; trailing bits beyond `nbits` are
    /// cleared.
    pub fn from_bytes(bytes: &[u8], nbits: usize) -> Self {
        assert_eq!(bytes.len(), nbits.div_ceil(8), "byte length mismatch");
        let mut words = vec![0u64; word_count(nbits)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (56 - 8 * (i % 8));
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(nbits);
        }
        BitVector { nbits, words }
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R, nbits: usize) -> Self {
        let mut words: Vec<u64> = (0..word_count(nbits)).map(|_| rng.next_u64()).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(nbits);
        }
        BitVector { nbits, words }
    }

    pub fn len(&self) -> usize {
        self.nbits
    }

    pub fn is_empty(&self) -> bool {
        self.nbits == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.nbits, "bit index out of range");
        self.words[i / 64] >> (63 - (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.nbits, "bit index out of range");
        let mask = 1u64 << (63 - (i % 64));
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.nbits, other.nbits, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the AND of two equal-length vectors (the GF(2) dot product).
    pub fn and_parity(&self, other: &BitVector) -> bool {
        assert_eq!(self.nbits, other.nbits, "length mismatch");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// `self ^= a & b` entrywise; all three lengths must agree.
    pub fn xor_and_assign(&mut self, a: &BitVector, b: &BitVector) {
        assert!(
            self.nbits == a.nbits && self.nbits == b.nbits,
            "length mismatch"
        );
        for (s, (x, y)) in self.words.iter_mut().zip(a.words.iter().zip(&b.words)) {
            *s ^= x & y;
        }
    }

    /// Indices of the set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let lz = bits.leading_zeros() as usize;
                    bits &= !(1u64 << (63 - lz));
                    Some(wi * 64 + lz)
                }
            })
        })
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Packs into `ceil(nbits / 8)` bytes, MSB-first.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.nbits.div_ceil(8);
        (0..nbytes)
            .map(|i| (self.words[i / 8] >> (56 - 8 * (i % 8))) as u8)
            .collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({}; ", self.nbits)?;
        for b in self.to_bytes() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// A dense GF(2) matrix with word-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    row_words: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        let row_words = word_count(cols);
        BitMatrix {
            rows,
            cols,
            row_words,
            words: vec![0; rows * row_words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        let mask = tail_mask(cols);
        for r in 0..rows {
            let row = m.row_mut(r);
            for w in row.iter_mut() {
                *w = rng.next_u64();
            }
            *row.last_mut().expect("row has at least one word") &= mask;
        }
        m
    }

    /// Uniformly random nonsingular matrix by rejection sampling.
    pub fn random_nonsingular<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> Self {
        loop {
            let m = BitMatrix::random(rng, n, n);
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.words[r * self.row_words + c / 64] >> (63 - (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        let mask = 1u64 << (63 - (c % 64));
        let w = &mut self.words[r * self.row_words + c / 64];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub(crate) fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.row_words..(r + 1) * self.row_words]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.words[r * self.row_words..(r + 1) * self.row_words]
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (d, s) = (dst * self.row_words, src * self.row_words);
        for i in 0..self.row_words {
            self.words[d + i] ^= self.words[s + i];
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.row_words {
            self.words
                .swap(a * self.row_words + i, b * self.row_words + i);
        }
    }

    /// Copies row `r` into a standalone vector of length `cols`.
    pub fn row_vector(&self, r: usize) -> BitVector {
        BitVector {
            nbits: self.cols,
            words: self.row(r).to_vec(),
        }
    }

    /// XORs `src` (a row of `src_cols >= self.cols` is not allowed; lengths
    /// must agree) into row `r`, keeping only columns `>= from_col`.
    pub(crate) fn xor_row_from(&mut self, r: usize, src: &[u64], from_col: usize) {
        debug_assert_eq!(src.len(), self.row_words);
        if from_col >= self.cols {
            return;
        }
        let start_word = from_col / 64;
        let row = self.row_mut(r);
        let first_mask = !0u64 >> (from_col % 64);
        row[start_word] ^= src[start_word] & first_mask;
        for i in start_word + 1..src.len() {
            row[i] ^= src[i];
        }
    }

    /// Standard GF(2) matrix product; panics on an inner-dimension mismatch.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for (wi, &w) in self.row(r).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let k = wi * 64 + bits.leading_zeros() as usize;
                    bits &= !(1u64 << (63 - bits.leading_zeros()));
                    let src_start = k * other.row_words;
                    let dst_start = r * out.row_words;
                    for i in 0..other.row_words {
                        out.words[dst_start + i] ^= other.words[src_start + i];
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vector(&self, x: &BitVector) -> BitVector {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0u64;
            for (a, b) in self.row(r).iter().zip(&x.words) {
                acc ^= a & b;
            }
            if acc.count_ones() & 1 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Entrywise XOR; panics if shapes differ.
    pub fn xor_assign(&mut self, other: &BitMatrix) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch"
        );
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for (wi, &w) in self.row(r).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let c = wi * 64 + bits.leading_zeros() as usize;
                    bits &= !(1u64 << (63 - bits.leading_zeros()));
                    out.set(c, r, true);
                }
            }
        }
        out
    }

    /// Rank over GF(2) via row elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let pivot = (rank..m.rows).find(|&r| m.get(r, c));
            let Some(p) = pivot else { continue };
            m.swap_rows(rank, p);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.xor_rows(r, rank);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Inverse over GF(2) via Gauss-Jordan elimination on `[self | I]`.
    pub fn inverse(&self) -> Result<BitMatrix, SingularMatrix> {
        assert_eq!(self.rows, self.cols, "inverse requires a square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = BitMatrix::identity(n);
        for c in 0..n {
            let pivot = (c..n).find(|&r| m.get(r, c)).ok_or(SingularMatrix)?;
            m.swap_rows(c, pivot);
            inv.swap_rows(c, pivot);
            for r in 0..n {
                if r != c && m.get(r, c) {
                    m.xor_rows(r, c);
                    inv.xor_rows(r, c);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == BitMatrix::identity(self.rows)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix({}x{})", self.rows, self.cols)?;
        for r in 0..self.rows.min(16) {
            for c in 0..self.cols.min(64) {
                write!(f, "{}", if self.get(r, c) { '1' } else { '0' })?;
            }
            writeln!(f)?;
        }
        if self.rows > 16 || self.cols > 64 {
            writeln!(f, "...")?;
        }
        Ok(())
    }
}

/// Exactly uniform draw from `0..bound` (Lemire multiply-shift with
/// rejection). Kept local because the permutation shuffle sits inside a
/// hot rejection loop.
#[inline]
fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, bound: u32) -> u32 {
    debug_assert!(bound > 0);
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let m = u64::from(rng.next_u32()) * u64::from(bound);
        if m as u32 >= threshold {
            return (m >> 32) as u32;
        }
    }
}

/// Reject an image sequence that is not a bijection of `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PermutationError {
    #[error("permutation value {0} out of range 1..={1}")]
    OutOfRange(u16, usize),
    #[error("permutation value {0} appears more than once")]
    Duplicate(u16),
}

/// A permutation of `{1, ..., n}`, stored as its image sequence.
///
/// Values are kept 1-indexed: several of the scheme's rules treat the
/// images as plain integers, so the stored form matches them directly.
/// Codecs store `value - 1` per byte.
#[derive(Clone, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<u16>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (1..=n as u16).collect(),
        }
    }

    pub fn from_images(images: Vec<u16>) -> Result<Self, PermutationError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v as usize > n {
                return Err(PermutationError::OutOfRange(v, n));
            }
            if seen[v as usize - 1] {
                return Err(PermutationError::Duplicate(v));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Permutation { images })
    }

    /// Uniformly random permutation (Fisher-Yates).
    pub fn random<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> Self {
        let mut images: Vec<u16> = (1..=n as u16).collect();
        for i in (1..n).rev() {
            let j = uniform_below(rng, i as u32 + 1) as usize;
            images.swap(i, j);
        }
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of position `i` (0-indexed position, 1-indexed value).
    #[inline]
    pub fn image(&self, i: usize) -> u16 {
        self.images[i]
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    /// Cyclically shifts the image sequence left by `l` positions.
    pub fn rotate_left(&self, l: usize) -> Permutation {
        let n = self.images.len();
        let l = l % n;
        let mut images = Vec::with_capacity(n);
        images.extend_from_slice(&self.images[l..]);
        images.extend_from_slice(&self.images[..l]);
        Permutation { images }
    }

    /// The n-by-n permutation matrix with entry `(i, image(i))` set.
    pub fn matrix(&self) -> BitMatrix {
        let n = self.images.len();
        let mut m = BitMatrix::zeros(n, n);
        for (i, &v) in self.images.iter().enumerate() {
            m.set(i, v as usize - 1, true);
        }
        m
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}

/// True iff the stacked rows form a Latin rectangle: every row is a
/// permutation (guaranteed by the type) and no column repeats a value.
pub fn is_latin_rectangle(rows: &[Permutation]) -> bool {
    let Some(first) = rows.first() else {
        return true;
    };
    let n = first.len();
    assert!(
        rows.iter().all(|r| r.len() == n),
        "rows must have equal length"
    );
    // column-stamped scratch table avoids clearing between columns
    let mut seen = vec![0u32; n];
    for col in 0..n {
        let stamp = col as u32 + 1;
        for row in rows {
            let v = row.image(col) as usize - 1;
            if seen[v] == stamp {
                return false;
            }
            seen[v] = stamp;
        }
    }
    true
}

/// MSB-first bit writer used by the fixed-size codecs.
pub(crate) struct BitWriter {
    buf: Vec<u8>,
    used: usize,
}

impl BitWriter {
    pub fn with_capacity(bits: usize) -> Self {
        BitWriter {
            buf: Vec::with_capacity(bits.div_ceil(8)),
            used: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.used.is_multiple_of(8) {
            self.buf.push(0);
        }
        if bit {
            let last = self.buf.last_mut().expect("buffer is non-empty");
            *last |= 0x80 >> (self.used % 8);
        }
        self.used += 1;
    }

    pub fn bit_len(&self) -> usize {
        self.used
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// MSB-first bit reader over a byte slice.
pub(crate) struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    #[inline]
    pub fn next(&mut self) -> bool {
        let bit = self.bytes[self.pos / 8] >> (7 - self.pos % 8) & 1 == 1;
        self.pos += 1;
        bit
    }
}
