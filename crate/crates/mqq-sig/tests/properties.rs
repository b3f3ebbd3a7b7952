//! Property-based invariants over randomized inputs.

use std::sync::OnceLock;

use mqq_sig::centralmap;
use mqq_sig::gf2::{BitMatrix, BitVector, Permutation};
use mqq_sig::mqq::{Quasigroup, MQQ_MAX_ATTEMPTS};
use mqq_sig::scheme::hash_truncate;
use mqq_sig::{keygen, Params, PrivateKey, PublicKey};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn fixture() -> &'static (PublicKey, PrivateKey) {
    static PAIR: OnceLock<(PublicKey, PrivateKey)> = OnceLock::new();
    PAIR.get_or_init(|| {
        let params = Params::from_n(160).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(0x9001);
        keygen(params, &mut rng).unwrap()
    })
}

fn fixture_quasigroup() -> &'static Quasigroup {
    static Q: OnceLock<Quasigroup> = OnceLock::new();
    Q.get_or_init(|| {
        let mut rng = ChaCha20Rng::seed_from_u64(0x9002);
        Quasigroup::generate(&mut rng, 8, MQQ_MAX_ATTEMPTS).unwrap()
    })
}

proptest! {
    #[test]
    fn matrix_inverse_roundtrip(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let a = BitMatrix::random_nonsingular(&mut rng, 32);
        let inv = a.inverse().unwrap();
        prop_assert!(a.mul(&inv).is_identity());
        prop_assert!(inv.mul(&a).is_identity());
    }

    #[test]
    fn rotation_composes_additively(seed in any::<u64>(), a in 0usize..512, b in 0usize..512) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let p = Permutation::random(&mut rng, 96);
        prop_assert_eq!(p.rotate_left(a).rotate_left(b), p.rotate_left(a + b));
    }

    #[test]
    fn permutation_matrix_transpose_is_inverse(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let p = Permutation::random(&mut rng, 64);
        let m = p.matrix();
        prop_assert!(m.mul(&m.transpose()).is_identity());
    }

    #[test]
    fn bitvector_byte_roundtrip(bytes in proptest::collection::vec(any::<u8>(), 1..64)) {
        let nbits = bytes.len() * 8;
        let v = BitVector::from_bytes(&bytes, nbits);
        prop_assert_eq!(v.to_bytes(), bytes);
    }

    #[test]
    fn hash_truncation_nests(msg in proptest::collection::vec(any::<u8>(), 0..256)) {
        for n in [160usize, 192, 224, 256] {
            let outer = hash_truncate(&msg, n);
            let inner = hash_truncate(&msg, 3 * n / 4);
            for i in 0..3 * n / 4 {
                prop_assert_eq!(inner.get(i), outer.get(n / 4 + i));
            }
        }
    }

    #[test]
    fn block_chain_roundtrips(blocks in proptest::collection::vec(any::<u8>(), 1..40)) {
        let q = fixture_quasigroup();
        prop_assert_eq!(centralmap::inverse(q, &centralmap::forward(q, &blocks)), blocks.clone());
        prop_assert_eq!(centralmap::forward(q, &centralmap::inverse(q, &blocks)), blocks);
    }

    #[test]
    fn sign_verify_roundtrip(msg in proptest::collection::vec(any::<u8>(), 0..512)) {
        let (pk, sk) = fixture();
        let sig = sk.sign(&msg);
        prop_assert!(pk.verify(&msg, &sig));
    }

    #[test]
    fn tampered_message_rejected(msg in proptest::collection::vec(any::<u8>(), 1..256), flip in any::<u8>()) {
        let (pk, sk) = fixture();
        let sig = sk.sign(&msg);
        let mut tampered = msg.clone();
        let idx = flip as usize % tampered.len();
        tampered[idx] ^= 1 | (flip & 0xfe);
        prop_assert!(!pk.verify(&tampered, &sig));
    }
}

proptest! {
    // table rebuilds per case make this one heavier; keep the count down
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quasigroup_bytes_decode_encode_identity(bytes in proptest::collection::vec(any::<u8>(), 81..=81)) {
        let q = Quasigroup::from_bytes(&bytes).unwrap();
        prop_assert_eq!(q.to_bytes().to_vec(), bytes);
    }
}
