//! The secret linear and affine masks.
//!
//! `S^{-1}` is the GF(2) sum of K permutation matrices. The first
//! permutation is sampled, the next K-2 are derived from it by rotating
//! the image sequence left 32 positions per step, and the last is sampled
//! independently. A candidate set is kept only if every row keeps its
//! first eight images outside `{1..8}`, the K rows form a Latin rectangle,
//! and the summed matrix is invertible. The chain uses a uniform 32-step
//! rotation for every derived row: any derived offset congruent to 0 mod n
//! would duplicate the first row and no Latin rectangle could ever form,
//! so the offsets must stay distinct mod n for all supported n.
//!
//! The affine offset `v` is read out of the last permutation: bits
//! `1..=n` of `v` take the four low bits of the values at positions
//! `65..=64+n/4`, cycling through bit positions 1, 2, 3, 0 of each value.

use rand::RngCore;

use crate::error::{AttemptsExhausted, CodecError, ParamError};
use crate::gf2::{is_latin_rectangle, BitMatrix, BitVector, Permutation};

/// Default rejection-sampling cap for [`SigmaSet::generate`].
///
/// Restarts are cheap (most fail an early first-eight check) but the full
/// acceptance probability drops to roughly 3e-5 at n = 256, so the cap
/// leaves two orders of magnitude of headroom.
pub const MASK_MAX_ATTEMPTS: usize = 1_000_000;

/// Number of summed permutations for a given `k = n / 32`: `k` when odd,
/// `k + 1` when even. Odd counts keep every row sum of `S^{-1}` odd.
pub fn sigma_count(k: usize) -> Result<usize, ParamError> {
    match k {
        5 | 7 => Ok(k),
        6 | 8 => Ok(k + 1),
        other => Err(ParamError::UnsupportedK(other)),
    }
}

/// True iff none of the first eight image values lies in `{1..8}`.
pub fn first_eight_clear(p: &Permutation) -> bool {
    p.images()[..8].iter().all(|&v| v > 8)
}

/// Builds the affine offset from the last permutation's values.
pub fn build_v(sigma_last: &Permutation) -> BitVector {
    let n = sigma_last.len();
    assert!(64 + n / 4 <= n, "n too small for the offset rule");
    let mut v = BitVector::zeros(n);
    for i in 1..=n {
        // 1-indexed position 64 + ceil(i/4), bit position i mod 4
        let value = sigma_last.image(63 + i.div_ceil(4)) as u32;
        if value >> (i % 4) & 1 == 1 {
            v.set(i - 1, true);
        }
    }
    v
}

fn derive_rows(sigma1: &Permutation, count: usize) -> Vec<Permutation> {
    let mut rows = Vec::with_capacity(count);
    rows.push(sigma1.clone());
    for _ in 1..count {
        let next = rows.last().expect("rows is non-empty").rotate_left(32);
        rows.push(next);
    }
    rows
}

/// The generated mask material: all K permutations, `S^{-1}`, `S` and `v`.
#[derive(Clone, Debug)]
pub struct SigmaSet {
    n: usize,
    rows: Vec<Permutation>,
    s_inv: BitMatrix,
    s: BitMatrix,
    v: BitVector,
}

impl SigmaSet {
    /// Rejection-samples until all structural conditions hold. Panics if
    /// `n` is not one of the supported `32k` sizes.
    pub fn generate<R: RngCore + ?Sized>(
        rng: &mut R,
        n: usize,
        max_attempts: usize,
    ) -> Result<SigmaSet, AttemptsExhausted> {
        assert!(n.is_multiple_of(32), "n must be a multiple of 32");
        let count = sigma_count(n / 32).expect("supported k");
        for _ in 0..max_attempts {
            let sigma1 = Permutation::random(rng, n);
            // the first eight images of every derived rotation read
            // straight off sigma_1: row nu starts at offset 32 nu
            let windows_ok =
                (0..count - 1).all(|nu| (0..8).all(|i| sigma1.image((32 * nu + i) % n) > 8));
            if !windows_ok {
                continue;
            }
            let sigma_last = Permutation::random(rng, n);
            if !first_eight_clear(&sigma_last) {
                continue;
            }
            // derived rows pick distinct sigma_1 positions per column, so
            // only the last row can break the Latin rectangle
            let clash = (0..n).any(|col| {
                let v = sigma_last.image(col);
                (0..count - 1).any(|nu| sigma1.image((col + 32 * nu) % n) == v)
            });
            if clash {
                continue;
            }
            let mut rows = derive_rows(&sigma1, count - 1);
            rows.push(sigma_last);
            debug_assert!(is_latin_rectangle(&rows));
            debug_assert!(rows.iter().all(first_eight_clear));
            match Self::assemble(n, rows) {
                Ok(set) => return Ok(set),
                Err(_) => continue,
            }
        }
        Err(AttemptsExhausted {
            attempts: max_attempts,
        })
    }

    fn assemble(n: usize, rows: Vec<Permutation>) -> Result<SigmaSet, ()> {
        let mut s_inv = BitMatrix::zeros(n, n);
        for row in &rows {
            s_inv.xor_assign(&row.matrix());
        }
        let s = s_inv.inverse().map_err(|_| ())?;
        let v = build_v(rows.last().expect("at least one row"));
        Ok(SigmaSet {
            n,
            rows,
            s_inv,
            s,
            v,
        })
    }

    /// Assembles a set from explicit parts, bypassing validation. Tests use
    /// this for degenerate masks such as the identity.
    #[cfg(test)]
    pub(crate) fn for_tests(
        n: usize,
        rows: Vec<Permutation>,
        s_inv: BitMatrix,
        s: BitMatrix,
        v: BitVector,
    ) -> SigmaSet {
        SigmaSet {
            n,
            rows,
            s_inv,
            s,
            v,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stacked permutations (the scheme's K).
    pub fn count(&self) -> usize {
        self.rows.len()
    }

    pub fn sigma(&self, idx: usize) -> &Permutation {
        &self.rows[idx]
    }

    pub fn sigmas(&self) -> &[Permutation] {
        &self.rows
    }

    pub fn s(&self) -> &BitMatrix {
        &self.s
    }

    pub fn s_inv(&self) -> &BitMatrix {
        &self.s_inv
    }

    pub fn v(&self) -> &BitVector {
        &self.v
    }

    /// `S x + v`.
    pub fn apply_affine(&self, x: &BitVector) -> BitVector {
        let mut out = self.s.mul_vector(x);
        out.xor_assign(&self.v);
        out
    }

    /// The exact inverse of [`SigmaSet::apply_affine`]: `S^{-1} (x + v)`.
    pub fn invert_affine(&self, xp: &BitVector) -> BitVector {
        let mut t = xp.clone();
        t.xor_assign(&self.v);
        self.s_inv.mul_vector(&t)
    }

    /// `2n` bytes: the first and last permutation, one `value - 1` byte per
    /// image. The derived rows are reproduced on decode.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 * self.n);
        for p in [&self.rows[0], self.rows.last().expect("non-empty")] {
            out.extend(p.images().iter().map(|&v| (v - 1) as u8));
        }
        out
    }

    /// Rebuilds the full set, re-deriving the rotated rows and
    /// re-validating every structural condition.
    pub fn from_bytes(bytes: &[u8], n: usize) -> Result<SigmaSet, CodecError> {
        assert!(
            n.is_multiple_of(32) && (5..=8).contains(&(n / 32)),
            "unsupported n"
        );
        if bytes.len() != 2 * n {
            return Err(CodecError::WrongLength {
                expected: 2 * n,
                actual: bytes.len(),
            });
        }
        let count = sigma_count(n / 32).expect("supported k");
        let parse = |chunk: &[u8]| -> Result<Permutation, CodecError> {
            let images: Vec<u16> = chunk.iter().map(|&b| b as u16 + 1).collect();
            Permutation::from_images(images)
                .map_err(|_| CodecError::InvalidPermutation("duplicate or out-of-range value"))
        };
        let sigma1 = parse(&bytes[..n])?;
        let sigma_last = parse(&bytes[n..])?;
        let mut rows = derive_rows(&sigma1, count - 1);
        rows.push(sigma_last);
        if rows.iter().any(|r| !first_eight_clear(r)) {
            return Err(CodecError::InvariantViolation(
                "first eight images intersect 1..8",
            ));
        }
        if !is_latin_rectangle(&rows) {
            return Err(CodecError::InvariantViolation(
                "permutations do not form a Latin rectangle",
            ));
        }
        SigmaSet::assemble(n, rows)
            .map_err(|_| CodecError::InvariantViolation("mask matrix sum is singular"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn sigma_count_rule() {
        assert_eq!(sigma_count(5), Ok(5));
        assert_eq!(sigma_count(6), Ok(7));
        assert_eq!(sigma_count(7), Ok(7));
        assert_eq!(sigma_count(8), Ok(9));
        assert_eq!(sigma_count(4), Err(ParamError::UnsupportedK(4)));
        assert_eq!(sigma_count(9), Err(ParamError::UnsupportedK(9)));
    }

    #[test]
    fn first_eight_cases() {
        assert!(!first_eight_clear(&Permutation::identity(160)));
        assert!(first_eight_clear(
            &Permutation::identity(160).rotate_left(8)
        ));
        let mut images: Vec<u16> = (9..=16).collect();
        images.extend(1..=8);
        images.extend(17..=32);
        let p = Permutation::from_images(images).unwrap();
        assert!(first_eight_clear(&p));
    }

    #[test]
    fn build_v_reads_low_nibbles() {
        // place value 13 at position 65 of an identity-based permutation
        let n = 160;
        let mut images: Vec<u16> = (1..=n as u16).collect();
        images.swap(64, 12); // positions 65 and 13 swap values 65 <-> 13
        let p = Permutation::from_images(images).unwrap();
        let v = build_v(&p);
        // 13 = 0b1101: bits (1, 2, 3, 0) are (0, 1, 1, 1)
        assert!(!v.get(0));
        assert!(v.get(1));
        assert!(v.get(2));
        assert!(v.get(3));
        assert_eq!(v.len(), n);

        // value 16 has an all-zero low nibble, 15 an all-one nibble
        let mut images: Vec<u16> = (1..=n as u16).collect();
        images.swap(64, 15);
        images.swap(65, 14);
        let p = Permutation::from_images(images).unwrap();
        let v = build_v(&p);
        assert!(!v.get(0) && !v.get(1) && !v.get(2) && !v.get(3));
        assert!(v.get(4) && v.get(5) && v.get(6) && v.get(7));
    }

    #[test]
    fn generate_satisfies_structure() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        for n in [160usize, 192] {
            let set = SigmaSet::generate(&mut rng, n, MASK_MAX_ATTEMPTS).unwrap();
            let k = sigma_count(n / 32).unwrap();
            assert_eq!(set.count(), k);
            assert_eq!(k % 2, 1);
            assert!(is_latin_rectangle(set.sigmas()));
            assert!(set.sigmas().iter().all(first_eight_clear));
            assert!(set.s().mul(set.s_inv()).is_identity());

            // each row and column of S^{-1} carries exactly K ones
            for r in 0..n {
                assert_eq!(set.s_inv().row_vector(r).count_ones(), k);
            }
            let t = set.s_inv().transpose();
            for c in 0..n {
                assert_eq!(t.row_vector(c).count_ones(), k);
            }

            // S^{-1} recomputed from scratch matches
            let mut sum = BitMatrix::zeros(n, n);
            for p in set.sigmas() {
                sum.xor_assign(&p.matrix());
            }
            assert_eq!(&sum, set.s_inv());
        }
    }

    #[test]
    fn derived_rows_are_uniform_rotations() {
        let mut rng = ChaCha20Rng::seed_from_u64(22);
        let set = SigmaSet::generate(&mut rng, 160, MASK_MAX_ATTEMPTS).unwrap();
        for idx in 1..set.count() - 1 {
            assert_eq!(set.sigma(idx), &set.sigma(0).rotate_left(32 * idx));
        }
    }

    #[test]
    fn affine_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        for n in [160usize, 192, 224, 256] {
            let set = SigmaSet::generate(&mut rng, n, MASK_MAX_ATTEMPTS).unwrap();
            for _ in 0..1000 {
                let x = BitVector::random(&mut rng, n);
                assert_eq!(set.invert_affine(&set.apply_affine(&x)), x);
            }
            let zero = BitVector::zeros(n);
            assert_eq!(set.apply_affine(&zero), *set.v());
        }
    }

    #[test]
    fn affine_with_identity_mask_adds_v() {
        let mut rng = ChaCha20Rng::seed_from_u64(24);
        let n = 160;
        let set = SigmaSet {
            n,
            rows: vec![Permutation::identity(n)],
            s_inv: BitMatrix::identity(n),
            s: BitMatrix::identity(n),
            v: BitVector::random(&mut rng, n),
        };
        let x = BitVector::random(&mut rng, n);
        let mut expected = x.clone();
        expected.xor_assign(set.v());
        assert_eq!(set.apply_affine(&x), expected);
    }

    #[test]
    fn codec_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(25);
        let set = SigmaSet::generate(&mut rng, 160, MASK_MAX_ATTEMPTS).unwrap();
        let bytes = set.to_bytes();
        assert_eq!(bytes.len(), 320);
        let back = SigmaSet::from_bytes(&bytes, 160).unwrap();
        assert_eq!(back.s_inv(), set.s_inv());
        assert_eq!(back.s(), set.s());
        assert_eq!(back.v(), set.v());
        assert_eq!(back.sigmas(), set.sigmas());
    }

    // Found by search: passes the first-eight and Latin-rectangle checks,
    // but the summed permutation matrices have no inverse.
    const SINGULAR_PAIR_HEX: &str = "\
        1a3e2a68996624449f860976522655052d4f8d018136174037111679347f7c071f3b336f9d935d88\
        6b9b77423c0a6e9a5c067d2e80125084674a1e27891d146d5f876a83395e2110739c2c7403947a8a\
        8e923d820020237545703a6c8c029585988b620e7b975b7e9e8f721b35785356290d5465594c6490\
        040b315a58716030223f0828474941465115630f1c38610c4b182b2f4e961319432557694d489132\
        4d6941944b5f86464f018130605408922e8a8052457e1f2c741d9d51104c6b09646d355a19882b34\
        872f9c8433320740220075620a3b915d9326701a4417737d439b577253859620369e0b4258981349\
        6f780314117c1c218b7155763115630e6c276859778f2d831e67656a5e5618666e7a3c5c3d3f9982\
        488d3a50380d7b8e8c799a24905b16061b250f7f970c372361472904284e39952a059f3e02894a12";

    #[test]
    fn decode_rejects_singular_sum() {
        let bytes: Vec<u8> = (0..SINGULAR_PAIR_HEX.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&SINGULAR_PAIR_HEX[i..i + 2], 16).unwrap())
            .collect();
        assert_eq!(bytes.len(), 320);
        assert_eq!(
            SigmaSet::from_bytes(&bytes, 160).unwrap_err(),
            CodecError::InvariantViolation("mask matrix sum is singular")
        );
    }

    #[test]
    fn codec_rejects_corruption() {
        let mut rng = ChaCha20Rng::seed_from_u64(26);
        let set = SigmaSet::generate(&mut rng, 160, MASK_MAX_ATTEMPTS).unwrap();
        let mut bytes = set.to_bytes();

        assert_eq!(
            SigmaSet::from_bytes(&bytes[..319], 160).unwrap_err(),
            CodecError::WrongLength {
                expected: 320,
                actual: 319
            }
        );

        // duplicate a value inside sigma_1
        let orig = bytes[10];
        bytes[10] = bytes[11];
        assert_eq!(
            SigmaSet::from_bytes(&bytes, 160).unwrap_err(),
            CodecError::InvalidPermutation("duplicate or out-of-range value")
        );
        bytes[10] = orig;

        // swap a small value into the first eight positions of sigma_K
        let small_pos = (0..160).find(|&i| bytes[160 + i] < 8).unwrap();
        if small_pos >= 8 {
            bytes.swap(160, 160 + small_pos);
            assert_eq!(
                SigmaSet::from_bytes(&bytes, 160).unwrap_err(),
                CodecError::InvariantViolation("first eight images intersect 1..8")
            );
        }
    }
}
