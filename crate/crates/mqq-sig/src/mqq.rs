//! Multivariate quadratic quasigroups of order `2^d`.
//!
//! A quasigroup here is a bilinear map on d-bit blocks,
//!
//! ```text
//! x * y = B . U(x) . A2 . y + B . A1 . x + c
//! U(x)  = I + sum_i (A1 x)_{i+1} . U_i
//! ```
//!
//! with `A1`, `A2`, `B` nonsingular d-by-d matrices, `c` a d-bit vector and
//! `U_i` nonzero only strictly above the diagonal in rows `1..=i`. Scaling
//! `U_i` by coordinate `i + 1` of `A1 x` keeps both section maps unit
//! triangular after a change of basis, so every parameter choice yields a
//! Latin square. Scaling by coordinate `i` would let the right-section map
//! collapse for some `y`, and zeroing row `i` of each `U_i` to compensate
//! would cap every bilinear-form rank at `2d - 4`, leaving the generation
//! target of one coordinate at rank exactly `2d - 2` unreachable.
//!
//! The shipped scheme uses `d = 8`; smaller `d` exists for tests only.

use rand::RngCore;

use crate::error::{AttemptsExhausted, CodecError};
use crate::gf2::{BitMatrix, BitReader, BitVector, BitWriter};

/// Block size of the shipped scheme.
pub const BLOCK_BITS: usize = 8;

/// Serialized size of a `d = 8` quasigroup: 8 coordinates times
/// (64 bilinear + 8 linear-x + 8 linear-y + 1 constant) bits.
pub const QUASIGROUP_BYTES: usize = 81;

/// Default rejection-sampling cap for [`Quasigroup::generate`].
pub const MQQ_MAX_ATTEMPTS: usize = 10_000;

/// Raw generator matrices for one quasigroup draw.
#[derive(Clone, Debug)]
pub struct MqqParams {
    d: usize,
    a1: BitMatrix,
    a2: BitMatrix,
    b: BitMatrix,
    c: BitVector,
    u: Vec<BitMatrix>,
}

impl MqqParams {
    /// Samples uniformly: nonsingular matrices by rejection, free `U_i`
    /// bits and `c` uniform.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R, d: usize) -> Self {
        assert!((2..=8).contains(&d), "block size must be in 2..=8");
        let a1 = BitMatrix::random_nonsingular(rng, d);
        let a2 = BitMatrix::random_nonsingular(rng, d);
        let b = BitMatrix::random_nonsingular(rng, d);
        let c = BitVector::random(rng, d);
        let mut u = Vec::with_capacity(d - 1);
        for i in 0..d - 1 {
            // U_{i+1}: rows 0..=i, columns strictly right of the diagonal
            let mut m = BitMatrix::zeros(d, d);
            for r in 0..=i {
                for col in r + 1..d {
                    if rng.next_u32() & 1 == 1 {
                        m.set(r, col, true);
                    }
                }
            }
            u.push(m);
        }
        MqqParams { d, a1, a2, b, c, u }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a1(&self) -> &BitMatrix {
        &self.a1
    }

    pub fn a2(&self) -> &BitMatrix {
        &self.a2
    }

    pub fn b(&self) -> &BitMatrix {
        &self.b
    }

    pub fn c(&self) -> &BitVector {
        &self.c
    }

    /// The strictly-upper-triangular generator `U_{idx+1}`, `idx < d - 1`.
    pub fn u(&self, idx: usize) -> &BitMatrix {
        &self.u[idx]
    }

    /// Identity matrices, zero offset, zero generators: expands to the
    /// bitwise-XOR quasigroup. Useful as a degenerate fixture; it fails
    /// the rank conditions by construction.
    pub fn identity(d: usize) -> Self {
        MqqParams {
            d,
            a1: BitMatrix::identity(d),
            a2: BitMatrix::identity(d),
            b: BitMatrix::identity(d),
            c: BitVector::zeros(d),
            u: (0..d - 1).map(|_| BitMatrix::zeros(d, d)).collect(),
        }
    }
}

/// Coefficient form of one output coordinate `f_r(x, y)`.
///
/// Bit `d-1-k` of `bilinear[j]` is the coefficient of `x_{j+1} y_{k+1}`;
/// `lin_x` and `lin_y` use the same bit order. A d-bit block maps to the
/// byte `sum v_j 2^(d-j)`, matching the crate-wide MSB-first packing at
/// `d = 8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct CoordCoeffs {
    bilinear: [u8; 8],
    lin_x: u8,
    lin_y: u8,
    const_bit: bool,
}

impl CoordCoeffs {
    fn zero() -> Self {
        CoordCoeffs {
            bilinear: [0; 8],
            lin_x: 0,
            lin_y: 0,
            const_bit: false,
        }
    }
}

fn row_mask(m: &BitMatrix, r: usize, d: usize) -> u8 {
    let mut mask = 0u8;
    for c in 0..d {
        if m.get(r, c) {
            mask |= 1 << (d - 1 - c);
        }
    }
    mask
}

fn expand(p: &MqqParams) -> Vec<CoordCoeffs> {
    let d = p.d;
    let mut coords = vec![CoordCoeffs::zero(); d];
    let b_a1 = p.b.mul(&p.a1);
    let b_a2 = p.b.mul(&p.a2);
    for (r, coord) in coords.iter_mut().enumerate() {
        coord.lin_x = row_mask(&b_a1, r, d);
        coord.lin_y = row_mask(&b_a2, r, d);
        coord.const_bit = p.c.get(r);
    }
    for (i, u_i) in p.u.iter().enumerate() {
        // U_{i+1} is scaled by coordinate i+2 (1-indexed) of A1 x
        let weight_row = row_mask(&p.a1, i + 1, d);
        let g = p.b.mul(u_i).mul(&p.a2);
        for (r, coord) in coords.iter_mut().enumerate() {
            let g_row = row_mask(&g, r, d);
            if g_row == 0 {
                continue;
            }
            for j in 0..d {
                if weight_row >> (d - 1 - j) & 1 == 1 {
                    coord.bilinear[j] ^= g_row;
                }
            }
        }
    }
    coords
}

fn ranks_acceptable(coords: &[CoordCoeffs], d: usize) -> bool {
    let bound = 2 * d - 4;
    let target = 2 * d - 2;
    let mut hit_target = false;
    for r in 0..d {
        let rank = rank_matrix_from(coords, d, r).rank();
        if rank < bound {
            return false;
        }
        if rank == target {
            hit_target = true;
        }
    }
    hit_target
}

fn rank_matrix_from(coords: &[CoordCoeffs], d: usize, coord: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(2 * d, 2 * d);
    for j in 0..d {
        let row = coords[coord].bilinear[j];
        for k in 0..d {
            if row >> (d - 1 - k) & 1 == 1 {
                m.set(j, d + k, true);
                m.set(d + k, j, true);
            }
        }
    }
    m
}

/// A quasigroup of order `2^d` in coefficient form plus derived
/// multiplication and parastrophe lookup tables.
///
/// Immutable after construction; lookups are safe to share across threads.
pub struct Quasigroup {
    d: usize,
    coords: Vec<CoordCoeffs>,
    mul: Box<[[u8; 256]; 256]>,
    ldiv: Box<[[u8; 256]; 256]>,
    rdiv: Box<[[u8; 256]; 256]>,
    latin: bool,
}

impl Quasigroup {
    /// Symbolic expansion of the generator matrices into coefficient form,
    /// with tables rebuilt from the coefficients.
    pub fn from_params(p: &MqqParams) -> Self {
        Quasigroup::from_coords(p.d, expand(p))
    }

    fn from_coords(d: usize, coords: Vec<CoordCoeffs>) -> Self {
        let size = 1usize << d;
        let mut mul = Box::new([[0u8; 256]; 256]);
        let mut ldiv = Box::new([[0u8; 256]; 256]);
        let mut rdiv = Box::new([[0u8; 256]; 256]);
        let mut row_seen = [0u16; 256];
        let mut col_seen = [0u16; 256];
        let mut latin = true;
        for x in 0..size {
            let xb = x as u8;
            // fold the bilinear part over x once per row of the table
            let mut masks = [0u8; 8];
            let mut bases = [false; 8];
            for r in 0..d {
                let c = &coords[r];
                let mut xrow = 0u8;
                for j in 0..d {
                    if xb >> (d - 1 - j) & 1 == 1 {
                        xrow ^= c.bilinear[j];
                    }
                }
                masks[r] = xrow ^ c.lin_y;
                bases[r] = ((c.lin_x & xb).count_ones() & 1 == 1) ^ c.const_bit;
            }
            for y in 0..size {
                let yb = y as u8;
                let mut out = 0u8;
                for r in 0..d {
                    let bit = ((masks[r] & yb).count_ones() & 1 == 1) ^ bases[r];
                    if bit {
                        out |= 1 << (d - 1 - r);
                    }
                }
                mul[x][y] = out;
                ldiv[x][out as usize] = yb;
                rdiv[out as usize][y] = xb;
                let stamp = x as u16 + 1;
                if row_seen[out as usize] == stamp {
                    latin = false;
                }
                row_seen[out as usize] = stamp;
            }
        }
        if latin {
            for y in 0..size {
                let stamp = y as u16 + 1;
                for x in 0..size {
                    let z = mul[x][y] as usize;
                    if col_seen[z] == stamp {
                        latin = false;
                    }
                    col_seen[z] = stamp;
                }
            }
        }
        Quasigroup {
            d,
            coords,
            mul,
            ldiv,
            rdiv,
            latin,
        }
    }

    /// Rejection-samples parameters until the rank conditions hold: every
    /// coordinate's bilinear-form matrix has rank at least `2d - 4`, and
    /// some coordinate attains rank exactly `2d - 2`.
    pub fn generate<R: RngCore + ?Sized>(
        rng: &mut R,
        d: usize,
        max_attempts: usize,
    ) -> Result<Quasigroup, AttemptsExhausted> {
        for _ in 0..max_attempts {
            let params = MqqParams::random(rng, d);
            let coords = expand(&params);
            if ranks_acceptable(&coords, d) {
                let q = Quasigroup::from_coords(d, coords);
                debug_assert!(q.latin);
                return Ok(q);
            }
        }
        Err(AttemptsExhausted {
            attempts: max_attempts,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Whether the multiplication table is a Latin square. True for every
    /// generated quasigroup; may be false for decoded foreign bytes.
    pub fn is_latin(&self) -> bool {
        self.latin
    }

    /// The symmetric `2d x 2d` matrix pairing `x_j` with `y_k` wherever
    /// `x_j y_k` occurs in coordinate `coord` (0-indexed).
    pub fn rank_matrix(&self, coord: usize) -> BitMatrix {
        assert!(coord < self.d, "coordinate out of range");
        rank_matrix_from(&self.coords, self.d, coord)
    }

    pub fn satisfies_rank_conditions(&self) -> bool {
        ranks_acceptable(&self.coords, self.d)
    }

    #[inline]
    pub fn multiply(&self, x: u8, y: u8) -> u8 {
        self.mul[x as usize][y as usize]
    }

    /// The unique `w` with `multiply(x, w) == z` (left parastrophe).
    #[inline]
    pub fn left_divide(&self, x: u8, z: u8) -> u8 {
        self.ldiv[x as usize][z as usize]
    }

    /// The unique `w` with `multiply(w, y) == z` (right parastrophe).
    #[inline]
    pub fn right_divide(&self, z: u8, y: u8) -> u8 {
        self.rdiv[z as usize][y as usize]
    }

    /// Coefficient of `x_{j+1} y_{k+1}` in coordinate `coord` (all 0-indexed).
    pub fn bilinear_bit(&self, coord: usize, j: usize, k: usize) -> bool {
        self.coords[coord].bilinear[j] >> (self.d - 1 - k) & 1 == 1
    }

    pub fn lin_x_bit(&self, coord: usize, j: usize) -> bool {
        self.coords[coord].lin_x >> (self.d - 1 - j) & 1 == 1
    }

    pub fn lin_y_bit(&self, coord: usize, k: usize) -> bool {
        self.coords[coord].lin_y >> (self.d - 1 - k) & 1 == 1
    }

    pub fn const_bit(&self, coord: usize) -> bool {
        self.coords[coord].const_bit
    }

    /// Evaluates coordinate `coord` from the coefficient form. Slower than
    /// the table but independent of it; the test oracles build on this.
    pub fn eval_coordinate(&self, coord: usize, x: u8, y: u8) -> bool {
        let d = self.d;
        let c = &self.coords[coord];
        let mut acc = c.const_bit;
        for j in 0..d {
            if x >> (d - 1 - j) & 1 == 0 {
                continue;
            }
            acc ^= (c.bilinear[j] & y).count_ones() & 1 == 1;
        }
        acc ^= (c.lin_x & x).count_ones() & 1 == 1;
        acc ^= (c.lin_y & y).count_ones() & 1 == 1;
        acc
    }

    /// Packs the coefficient form into 81 bytes: per coordinate, 64
    /// bilinear bits row-major, 8 linear-x bits, 8 linear-y bits, one
    /// constant bit. Requires `d = 8`.
    pub fn to_bytes(&self) -> [u8; QUASIGROUP_BYTES] {
        assert_eq!(self.d, 8, "the 81-byte encoding is defined for d = 8");
        let mut w = BitWriter::with_capacity(QUASIGROUP_BYTES * 8);
        for c in &self.coords {
            for j in 0..8 {
                for k in 0..8 {
                    w.push(c.bilinear[j] >> (7 - k) & 1 == 1);
                }
            }
            for j in 0..8 {
                w.push(c.lin_x >> (7 - j) & 1 == 1);
            }
            for k in 0..8 {
                w.push(c.lin_y >> (7 - k) & 1 == 1);
            }
            w.push(c.const_bit);
        }
        debug_assert_eq!(w.bit_len(), QUASIGROUP_BYTES * 8);
        w.into_bytes()
            .try_into()
            .expect("648 bits pack to 81 bytes")
    }

    /// Inverse of [`Quasigroup::to_bytes`]. Every 81-byte string decodes to
    /// some bilinear map; whether it is a Latin square is reported by
    /// [`Quasigroup::is_latin`], not here.
    pub fn from_bytes(bytes: &[u8]) -> Result<Quasigroup, CodecError> {
        if bytes.len() != QUASIGROUP_BYTES {
            return Err(CodecError::WrongLength {
                expected: QUASIGROUP_BYTES,
                actual: bytes.len(),
            });
        }
        let mut r = BitReader::new(bytes);
        let mut coords = Vec::with_capacity(8);
        for _ in 0..8 {
            let mut c = CoordCoeffs::zero();
            for j in 0..8 {
                for k in 0..8 {
                    if r.next() {
                        c.bilinear[j] |= 1 << (7 - k);
                    }
                }
            }
            for j in 0..8 {
                if r.next() {
                    c.lin_x |= 1 << (7 - j);
                }
            }
            for k in 0..8 {
                if r.next() {
                    c.lin_y |= 1 << (7 - k);
                }
            }
            c.const_bit = r.next();
            coords.push(c);
        }
        Ok(Quasigroup::from_coords(8, coords))
    }
}

impl std::fmt::Debug for Quasigroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Quasigroup")
            .field("d", &self.d)
            .field("latin", &self.latin)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn xor_quasigroup() -> Quasigroup {
        Quasigroup::from_params(&MqqParams::identity(8))
    }

    #[test]
    fn identity_params_expand_to_xor() {
        let q = xor_quasigroup();
        for r in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    assert!(!q.bilinear_bit(r, j, k));
                }
                assert_eq!(q.lin_x_bit(r, j), j == r);
                assert_eq!(q.lin_y_bit(r, j), j == r);
            }
            assert!(!q.const_bit(r));
        }
        assert_eq!(q.multiply(0x0f, 0xf0), 0xff);
        assert_eq!(q.multiply(0x00, 0x5a), 0x5a);
        assert!(q.is_latin());
    }

    #[test]
    fn constant_vector_lands_in_const_bits() {
        let mut p = MqqParams::identity(8);
        p.c.set(0, true);
        let q = Quasigroup::from_params(&p);
        assert!(q.const_bit(0));
        assert!(!q.const_bit(1));
        // f_1 = x_1 + y_1 + 1, so 0 * 0 flips the top bit
        assert_eq!(q.multiply(0, 0), 0x80);
    }

    #[test]
    fn expansion_matches_naive_eq1_on_all_pairs() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..3 {
            let p = MqqParams::random(&mut rng, 8);
            let q = Quasigroup::from_params(&p);
            for x in 0..=255u8 {
                for y in 0..=255u8 {
                    assert_eq!(q.multiply(x, y), oracle::naive_eq1_multiply(&p, x, y));
                }
            }
        }
    }

    #[test]
    fn every_draw_is_a_latin_square() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        for _ in 0..10 {
            let p = MqqParams::random(&mut rng, 8);
            assert!(Quasigroup::from_params(&p).is_latin());
        }
        for d in 2..8 {
            for _ in 0..5 {
                let p = MqqParams::random(&mut rng, d);
                assert!(Quasigroup::from_params(&p).is_latin());
            }
        }
    }

    #[test]
    fn xor_rank_matrices_are_zero() {
        let q = xor_quasigroup();
        for r in 0..8 {
            assert_eq!(q.rank_matrix(r).rank(), 0);
        }
        assert!(!q.satisfies_rank_conditions());
    }

    #[test]
    fn single_term_rank_matrix() {
        // place exactly x_1 y_2 into coordinate 3 via the codec
        let mut bytes = [0u8; QUASIGROUP_BYTES];
        let coord = 3;
        let slot = coord * 81 + 1; // bilinear bit (j=0, k=1)
        bytes[slot / 8] |= 0x80 >> (slot % 8);
        let q = Quasigroup::from_bytes(&bytes).unwrap();
        assert!(q.bilinear_bit(coord, 0, 1));
        let m = q.rank_matrix(coord);
        assert!(m.get(0, 9) && m.get(9, 0));
        let mut ones = 0;
        for r in 0..16 {
            for c in 0..16 {
                ones += m.get(r, c) as usize;
            }
        }
        assert_eq!(ones, 2);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn generate_respects_rank_conditions_and_determinism() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let q = Quasigroup::generate(&mut rng, 8, MQQ_MAX_ATTEMPTS).unwrap();
        assert!(q.satisfies_rank_conditions());
        assert!(q.is_latin());
        for r in 0..8 {
            let rank = q.rank_matrix(r).rank();
            assert!(rank >= 12, "coordinate {r} has rank {rank}");
        }
        assert!((0..8).any(|r| q.rank_matrix(r).rank() == 14));

        let mut rng2 = ChaCha20Rng::seed_from_u64(13);
        let q2 = Quasigroup::generate(&mut rng2, 8, MQQ_MAX_ATTEMPTS).unwrap();
        assert_eq!(q.to_bytes(), q2.to_bytes());
    }

    #[test]
    fn parastrophes_invert_multiplication() {
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        let q = Quasigroup::generate(&mut rng, 8, MQQ_MAX_ATTEMPTS).unwrap();
        for x in 0..=255u8 {
            for y in 0..=255u8 {
                let z = q.multiply(x, y);
                assert_eq!(q.left_divide(x, z), y);
                assert_eq!(q.right_divide(z, y), x);
            }
        }
        let xq = xor_quasigroup();
        assert_eq!(xq.left_divide(0x0f, 0xff), 0xf0);
    }

    #[test]
    fn left_divide_matches_linear_scan() {
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        let q = Quasigroup::generate(&mut rng, 8, MQQ_MAX_ATTEMPTS).unwrap();
        for _ in 0..1000 {
            let x = rng.next_u32() as u8;
            let z = rng.next_u32() as u8;
            let scan = (0..=255u8).find(|&w| q.multiply(x, w) == z).unwrap();
            assert_eq!(q.left_divide(x, z), scan);
            let scan_r = (0..=255u8).find(|&w| q.multiply(w, x) == z).unwrap();
            assert_eq!(q.right_divide(z, x), scan_r);
        }
    }

    #[test]
    fn codec_roundtrip_and_layout() {
        let q = xor_quasigroup();
        let bytes = q.to_bytes();
        assert_eq!(bytes.len(), QUASIGROUP_BYTES);
        // per coordinate r: bits 64 + r (lin_x) and 72 + r (lin_y) set
        let mut expected = [0u8; QUASIGROUP_BYTES];
        for r in 0..8 {
            for bit in [81 * r + 64 + r, 81 * r + 72 + r] {
                expected[bit / 8] |= 0x80 >> (bit % 8);
            }
        }
        assert_eq!(bytes, expected);

        let mut rng = ChaCha20Rng::seed_from_u64(16);
        let q2 = Quasigroup::generate(&mut rng, 8, MQQ_MAX_ATTEMPTS).unwrap();
        let round = Quasigroup::from_bytes(&q2.to_bytes()).unwrap();
        assert_eq!(round.to_bytes(), q2.to_bytes());
        assert!(round.is_latin());
        for x in 0..=255u8 {
            for y in 0..=255u8 {
                assert_eq!(round.multiply(x, y), q2.multiply(x, y));
            }
        }
    }

    #[test]
    fn decode_rejects_wrong_length() {
        let err = Quasigroup::from_bytes(&[0u8; 80]).unwrap_err();
        assert_eq!(
            err,
            CodecError::WrongLength {
                expected: 81,
                actual: 80
            }
        );
    }
}
