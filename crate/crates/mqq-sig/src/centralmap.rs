//! The bijective quasigroup string transformation and its inverse.
//!
//! A string of n/8 byte blocks is chained through the quasigroup: the
//! first block passes through unchanged, even-positioned outputs multiply
//! the previous input block by the current one, odd-positioned outputs
//! (from the third onward) multiply in the opposite order. The inverse
//! walks the same chain with the left and right parastrophes, so the two
//! recursions are mutually inverse block by block.
//!
//! The same recursion is also applied symbolically to n affine forms,
//! which is how key generation turns the secret layers into a public
//! quadratic system.

use crate::gf2::BitVector;
use crate::mqq::Quasigroup;
use crate::publickey::QuadPoly;

/// Forward transformation on byte blocks.
pub fn forward(q: &Quasigroup, blocks: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(blocks.len());
    for (idx, &cur) in blocks.iter().enumerate() {
        if idx == 0 {
            out.push(cur);
        } else if idx % 2 == 1 {
            out.push(q.multiply(blocks[idx - 1], cur));
        } else {
            out.push(q.multiply(cur, blocks[idx - 1]));
        }
    }
    out
}

/// Inverse transformation via the parastrophes; `forward . inverse` and
/// `inverse . forward` are both the identity on block strings.
pub fn inverse(q: &Quasigroup, blocks: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::with_capacity(blocks.len());
    for (idx, &cur) in blocks.iter().enumerate() {
        if idx == 0 {
            out.push(cur);
        } else if idx % 2 == 1 {
            out.push(q.left_divide(out[idx - 1], cur));
        } else {
            out.push(q.right_divide(cur, out[idx - 1]));
        }
    }
    out
}

/// A degree-one polynomial over the n input variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub linear: BitVector,
    pub constant: bool,
}

impl AffineForm {
    pub fn zeros(n: usize) -> Self {
        AffineForm {
            linear: BitVector::zeros(n),
            constant: false,
        }
    }

    pub fn xor_assign(&mut self, other: &AffineForm) {
        self.linear.xor_assign(&other.linear);
        self.constant ^= other.constant;
    }

    pub fn evaluate(&self, x: &BitVector) -> bool {
        self.linear.and_parity(x) ^ self.constant
    }
}

/// Applies the forward recursion to n affine forms, producing n
/// polynomials of degree at most two. The first eight outputs stay
/// affine (the first block passes through).
pub fn forward_symbolic(q: &Quasigroup, inputs: &[AffineForm]) -> Vec<QuadPoly> {
    assert_eq!(q.d(), 8, "symbolic transform requires d = 8");
    assert!(
        !inputs.is_empty() && inputs.len().is_multiple_of(8),
        "inputs must split into 8-bit blocks"
    );
    let n = inputs[0].linear.len();
    let block_count = inputs.len() / 8;
    let block = |idx: usize| &inputs[8 * idx..8 * idx + 8];

    let mut out = Vec::with_capacity(inputs.len());
    for f in block(0) {
        out.push(QuadPoly::from_affine(n, f));
    }
    for idx in 1..block_count {
        let (left, right) = if idx % 2 == 1 {
            (block(idx - 1), block(idx))
        } else {
            (block(idx), block(idx - 1))
        };
        substitute(q, n, left, right, &mut out);
    }
    out
}

/// Substitutes two affine 8-blocks into the quasigroup's coefficient form,
/// appending the eight output polynomials.
fn substitute(
    q: &Quasigroup,
    n: usize,
    left: &[AffineForm],
    right: &[AffineForm],
    out: &mut Vec<QuadPoly>,
) {
    for r in 0..8 {
        let mut poly = QuadPoly::zeros(n);
        for (j, lf) in left.iter().enumerate() {
            // beta = sum over k of the bilinear row's selected right forms
            let mut beta = AffineForm::zeros(n);
            let mut any = false;
            for (k, rf) in right.iter().enumerate() {
                if q.bilinear_bit(r, j, k) {
                    beta.xor_assign(rf);
                    any = true;
                }
            }
            if any {
                poly.accumulate_product(lf, &beta);
            }
        }
        for (j, lf) in left.iter().enumerate() {
            if q.lin_x_bit(r, j) {
                poly.add_affine(lf);
            }
        }
        for (k, rf) in right.iter().enumerate() {
            if q.lin_y_bit(r, k) {
                poly.add_affine(rf);
            }
        }
        if q.const_bit(r) {
            poly.flip_constant();
        }
        out.push(poly);
    }
}
