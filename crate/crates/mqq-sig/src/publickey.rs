//! The truncated public quadratic system.
//!
//! Each polynomial stores `1 + n(n+1)/2` coefficient bits: one constant,
//! the diagonal pairs `(j, j)` acting as linear coefficients (over GF(2),
//! `x^2 = x`), and the strictly-upper pairs `(j, k)` with `j < k`. A
//! system holds the `3n/4` polynomials that survive truncation, i.e. the
//! composed coordinates `n/4 + 1 ..= n`.

use crate::centralmap::{forward_symbolic, AffineForm};
use crate::error::CodecError;
use crate::gf2::{BitMatrix, BitReader, BitVector, BitWriter};
use crate::masks::SigmaSet;
use crate::mqq::Quasigroup;

/// Exact serialized size of the public system for dimension `n`.
pub fn public_key_bytes(n: usize) -> usize {
    let per_poly_bits = 1 + n * (n + 1) / 2;
    (3 * n / 4) * per_poly_bits / 8
}

/// A quadratic Boolean polynomial in n variables.
///
/// `upper` keeps the strictly-above-diagonal coefficients row by row,
/// `diag` the linear ones, so XOR of polynomials and row-sliced
/// evaluation are plain word operations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadPoly {
    n: usize,
    upper: BitMatrix,
    diag: BitVector,
    constant: bool,
}

impl QuadPoly {
    pub fn zeros(n: usize) -> Self {
        QuadPoly {
            n,
            upper: BitMatrix::zeros(n, n),
            diag: BitVector::zeros(n),
            constant: false,
        }
    }

    pub fn from_affine(n: usize, f: &AffineForm) -> Self {
        QuadPoly {
            n,
            upper: BitMatrix::zeros(n, n),
            diag: f.linear.clone(),
            constant: f.constant,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient of the pair `(j, k)`; requires `j <= k` (0-indexed).
    /// `(j, j)` is the linear coefficient of variable `j`.
    pub fn coeff(&self, j: usize, k: usize) -> bool {
        assert!(j <= k && k < self.n, "coefficient index out of range");
        if j == k {
            self.diag.get(j)
        } else {
            self.upper.get(j, k)
        }
    }

    pub fn set_coeff(&mut self, j: usize, k: usize, value: bool) {
        assert!(j <= k && k < self.n, "coefficient index out of range");
        if j == k {
            self.diag.set(j, value);
        } else {
            self.upper.set(j, k, value);
        }
    }

    pub fn constant(&self) -> bool {
        self.constant
    }

    pub fn set_constant(&mut self, value: bool) {
        self.constant = value;
    }

    pub fn flip_constant(&mut self) {
        self.constant = !self.constant;
    }

    /// True when no strictly-quadratic coefficient is set.
    pub fn is_affine(&self) -> bool {
        (0..self.n).all(|r| self.upper.row_vector(r).is_zero())
    }

    /// XORs the product of two affine forms into the polynomial, folding
    /// squares onto the diagonal.
    pub fn accumulate_product(&mut self, a: &AffineForm, b: &AffineForm) {
        for p in a.linear.iter_ones() {
            self.upper.xor_row_from(p, b.linear.words(), p + 1);
        }
        for p in b.linear.iter_ones() {
            self.upper.xor_row_from(p, a.linear.words(), p + 1);
        }
        self.diag.xor_and_assign(&a.linear, &b.linear);
        if a.constant {
            self.diag.xor_assign(&b.linear);
        }
        if b.constant {
            self.diag.xor_assign(&a.linear);
        }
        self.constant ^= a.constant & b.constant;
    }

    /// XORs an affine form into the linear and constant parts.
    pub fn add_affine(&mut self, f: &AffineForm) {
        self.diag.xor_assign(&f.linear);
        self.constant ^= f.constant;
    }

    pub fn xor_assign(&mut self, other: &QuadPoly) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.upper.xor_assign(&other.upper);
        self.diag.xor_assign(&other.diag);
        self.constant ^= other.constant;
    }

    pub fn evaluate(&self, x: &BitVector) -> bool {
        assert_eq!(x.len(), self.n, "dimension mismatch");
        let mut acc = self.constant ^ self.diag.and_parity(x);
        let xw = x.words();
        for p in x.iter_ones() {
            let mut folded = 0u64;
            for (r, w) in self.upper.row(p).iter().zip(xw) {
                folded ^= r & w;
            }
            acc ^= folded.count_ones() & 1 == 1;
        }
        acc
    }
}

/// The `3n/4` public polynomials, in coordinate order `n/4 + 1 ..= n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadSystem {
    n: usize,
    polys: Vec<QuadPoly>,
}

impl QuadSystem {
    pub fn new(n: usize, polys: Vec<QuadPoly>) -> Self {
        assert_eq!(polys.len(), 3 * n / 4, "system must hold 3n/4 polynomials");
        assert!(polys.iter().all(|p| p.n() == n), "dimension mismatch");
        QuadSystem { n, polys }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn polys(&self) -> &[QuadPoly] {
        &self.polys
    }

    /// Evaluates every polynomial at `sig`, returning 3n/4 bits.
    pub fn evaluate(&self, sig: &BitVector) -> BitVector {
        assert_eq!(sig.len(), self.n, "signature length mismatch");
        let mut out = BitVector::zeros(self.polys.len());
        for (i, p) in self.polys.iter().enumerate() {
            if p.evaluate(sig) {
                out.set(i, true);
            }
        }
        out
    }

    /// Serializes to the exact public payload: polynomials in coordinate
    /// order, each as one constant bit followed by the coefficient bits in
    /// row-major pair order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = BitWriter::with_capacity(public_key_bytes(self.n) * 8);
        for p in &self.polys {
            w.push(p.constant);
            for j in 0..self.n {
                w.push(p.diag.get(j));
                for k in j + 1..self.n {
                    w.push(p.upper.get(j, k));
                }
            }
        }
        let bytes = w.into_bytes();
        debug_assert_eq!(bytes.len(), public_key_bytes(self.n));
        bytes
    }

    pub fn from_bytes(bytes: &[u8], n: usize) -> Result<QuadSystem, CodecError> {
        let expected = public_key_bytes(n);
        if bytes.len() != expected {
            return Err(CodecError::WrongLength {
                expected,
                actual: bytes.len(),
            });
        }
        let mut r = BitReader::new(bytes);
        let mut polys = Vec::with_capacity(3 * n / 4);
        for _ in 0..3 * n / 4 {
            let mut p = QuadPoly::zeros(n);
            p.constant = r.next();
            for j in 0..n {
                if r.next() {
                    p.diag.set(j, true);
                }
                for k in j + 1..n {
                    if r.next() {
                        p.upper.set(j, k, true);
                    }
                }
            }
            polys.push(p);
        }
        Ok(QuadSystem { n, polys })
    }
}

/// Composes the three secret layers symbolically and truncates: feeds the
/// affine forms of `S x + v` through the quasigroup transformation, mixes
/// the resulting polynomials with the rows of `S`, and keeps coordinates
/// `n/4 + 1 ..= n`.
pub fn compose(q: &Quasigroup, masks: &SigmaSet) -> QuadSystem {
    let n = masks.n();
    let forms: Vec<AffineForm> = (0..n)
        .map(|i| AffineForm {
            linear: masks.s().row_vector(i),
            constant: masks.v().get(i),
        })
        .collect();
    let inner = forward_symbolic(q, &forms);
    let mut polys = Vec::with_capacity(3 * n / 4);
    for i in n / 4..n {
        let mut acc = QuadPoly::zeros(n);
        for m in masks.s().row_vector(i).iter_ones() {
            acc.xor_assign(&inner[m]);
        }
        polys.push(acc);
    }
    QuadSystem::new(n, polys)
}
