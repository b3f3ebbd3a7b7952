//! Naive reference implementations used by the test suite.
//!
//! Everything here recomputes results with the most direct arithmetic
//! available: per-entry matrix products on `Vec<bool>`, per-monomial
//! polynomial walks, and the concrete layer-by-layer pipeline instead of
//! the symbolic composition. None of it shares kernels with the
//! production path it cross-checks.

use crate::gf2::BitVector;
use crate::masks::SigmaSet;
use crate::mqq::{MqqParams, Quasigroup};
use crate::publickey::QuadPoly;
use crate::scheme::PrivateKey;

fn byte_to_bits(v: u8, d: usize) -> Vec<bool> {
    (0..d).map(|j| v >> (d - 1 - j) & 1 == 1).collect()
}

fn bits_to_byte(bits: &[bool]) -> u8 {
    let d = bits.len();
    bits.iter()
        .enumerate()
        .fold(0u8, |acc, (j, &b)| acc | (b as u8) << (d - 1 - j))
}

fn matvec(m: &crate::gf2::BitMatrix, x: &[bool]) -> Vec<bool> {
    (0..m.rows())
        .map(|r| (0..m.cols()).fold(false, |acc, c| acc ^ (m.get(r, c) & x[c])))
        .collect()
}

/// The block-multiplication matrix `U(x) = I + sum_i (A1 x)_{i+1} U_i`,
/// built entry by entry.
pub fn naive_u_matrix(p: &MqqParams, x: u8) -> Vec<Vec<bool>> {
    let d = p.d();
    let w = matvec(p.a1(), &byte_to_bits(x, d));
    let mut u = vec![vec![false; d]; d];
    for (r, row) in u.iter_mut().enumerate() {
        row[r] = true;
    }
    for i in 0..d - 1 {
        if w[i + 1] {
            for (r, row) in u.iter_mut().enumerate() {
                for (c, cell) in row.iter_mut().enumerate() {
                    *cell ^= p.u(i).get(r, c);
                }
            }
        }
    }
    u
}

/// Evaluates `x * y = B U(x) A2 y + B A1 x + c` with explicit matrix
/// products per call.
pub fn naive_eq1_multiply(p: &MqqParams, x: u8, y: u8) -> u8 {
    let d = p.d();
    let xv = byte_to_bits(x, d);
    let yv = byte_to_bits(y, d);
    let u = naive_u_matrix(p, x);

    let a2y = matvec(p.a2(), &yv);
    let u_a2y: Vec<bool> = (0..d)
        .map(|r| (0..d).fold(false, |acc, c| acc ^ (u[r][c] & a2y[c])))
        .collect();
    let a1x = matvec(p.a1(), &xv);
    let inner: Vec<bool> = u_a2y.iter().zip(&a1x).map(|(a, b)| a ^ b).collect();
    let mut out = matvec(p.b(), &inner);
    for (r, bit) in out.iter_mut().enumerate() {
        *bit ^= p.c().get(r);
    }
    bits_to_byte(&out)
}

/// Builds the full multiplication table from the coefficient form (never
/// the lookup tables) and checks that every row and column is a
/// permutation of `0..2^d`.
pub fn exhaustive_latin_check(q: &Quasigroup) -> bool {
    let d = q.d();
    let size = 1usize << d;
    let mut table = vec![vec![0u8; size]; size];
    for (x, row) in table.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            let mut out = 0u8;
            for r in 0..d {
                if q.eval_coordinate(r, x as u8, y as u8) {
                    out |= 1 << (d - 1 - r);
                }
            }
            *cell = out;
        }
    }
    for row in &table {
        let mut seen = vec![false; size];
        for &cell in row {
            let z = cell as usize;
            if z >= size || seen[z] {
                return false;
            }
            seen[z] = true;
        }
    }
    for y in 0..size {
        let mut seen = vec![false; size];
        for row in &table {
            let z = row[y] as usize;
            if z >= size || seen[z] {
                return false;
            }
            seen[z] = true;
        }
    }
    true
}

/// Per-monomial polynomial evaluation: walks every stored coefficient.
pub fn naive_poly_eval(p: &QuadPoly, x: &BitVector) -> bool {
    let n = p.n();
    let mut acc = p.constant();
    for j in 0..n {
        if !x.get(j) {
            continue;
        }
        for k in j..n {
            acc ^= p.coeff(j, k) & x.get(k);
        }
    }
    acc
}

/// The concrete pipeline: affine transform, blockwise forward map, linear
/// transform, truncation to the last 3n/4 coordinates. No symbolic
/// composition is involved.
pub fn pipeline_parts(q: &Quasigroup, masks: &SigmaSet, x: &BitVector) -> BitVector {
    let n = masks.n();
    assert_eq!(x.len(), n);

    // S x + v, bit by bit
    let mut sx = vec![false; n];
    for (i, bit) in sx.iter_mut().enumerate() {
        let mut acc = masks.v().get(i);
        for j in 0..n {
            acc ^= masks.s().get(i, j) & x.get(j);
        }
        *bit = acc;
    }

    // forward quasigroup chain on the 8-bit blocks
    let blocks: Vec<u8> = sx.chunks(8).map(bits_to_byte).collect();
    let mut fwd = Vec::with_capacity(blocks.len());
    for (idx, &cur) in blocks.iter().enumerate() {
        if idx == 0 {
            fwd.push(cur);
        } else if idx % 2 == 1 {
            fwd.push(q.multiply(blocks[idx - 1], cur));
        } else {
            fwd.push(q.multiply(cur, blocks[idx - 1]));
        }
    }
    let y: Vec<bool> = fwd.iter().flat_map(|&b| byte_to_bits(b, 8)).collect();

    // S applied again, keeping coordinates n/4 .. n
    let mut out = BitVector::zeros(3 * n / 4);
    for i in n / 4..n {
        let mut acc = false;
        for (j, &bit) in y.iter().enumerate() {
            acc ^= masks.s().get(i, j) & bit;
        }
        if acc {
            out.set(i - n / 4, true);
        }
    }
    out
}

/// [`pipeline_parts`] applied to a private key.
pub fn pipeline_eval(key: &PrivateKey, x: &BitVector) -> BitVector {
    pipeline_parts(key.quasigroup(), key.sigmas(), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn identity_params_multiply_is_xor() {
        let p = MqqParams::identity(8);
        for (x, y) in [(0x0fu8, 0xf0u8), (0x00, 0x5a), (0xff, 0xff), (0x12, 0x34)] {
            assert_eq!(naive_eq1_multiply(&p, x, y), x ^ y);
        }
    }

    #[test]
    fn u_matrix_is_unit_upper_triangular_for_all_x() {
        let mut rng = ChaCha20Rng::seed_from_u64(51);
        for _ in 0..3 {
            let p = MqqParams::random(&mut rng, 8);
            for x in 0..=255u8 {
                let u = naive_u_matrix(&p, x);
                for (r, row) in u.iter().enumerate() {
                    assert!(row[r], "diagonal must be one");
                    for (c, &cell) in row.iter().enumerate().take(r) {
                        assert!(!cell, "entry ({r},{c}) below the diagonal");
                    }
                }
            }
        }
    }

    #[test]
    fn latin_check_rejects_constant_map() {
        let zero = Quasigroup::from_bytes(&[0u8; 81]).unwrap();
        assert!(!exhaustive_latin_check(&zero));
        assert!(!zero.is_latin());
    }

    #[test]
    fn latin_check_accepts_xor() {
        let q = Quasigroup::from_params(&MqqParams::identity(8));
        assert!(exhaustive_latin_check(&q));
    }
}
