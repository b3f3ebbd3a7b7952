//! Key generation, signing and verification.
//!
//! Signing is deterministic: hash the document, take the trailing n bits,
//! undo the outer linear layer, invert the quasigroup chain with the
//! parastrophes, and undo the affine layer. Verification evaluates the
//! public system at the signature and compares against the trailing 3n/4
//! hash bits. Both sides take "least significant" bits of the digest as
//! trailing bits of the big-endian byte string, so the verifier's target
//! is always a suffix of the signer's.

use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::centralmap;
use crate::error::{AttemptsExhausted, CodecError, ParamError};
use crate::gf2::BitVector;
use crate::masks::{SigmaSet, MASK_MAX_ATTEMPTS};
use crate::mqq::{Quasigroup, MQQ_MAX_ATTEMPTS, QUASIGROUP_BYTES};
use crate::publickey::{compose, public_key_bytes, QuadSystem};

/// A validated scheme dimension, one of 160, 192, 224, 256.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Params {
    n: usize,
}

impl Params {
    pub fn from_n(n: usize) -> Result<Params, ParamError> {
        match n {
            160 | 192 | 224 | 256 => Ok(Params { n }),
            other => Err(ParamError::UnsupportedN(other)),
        }
    }

    pub fn all() -> [Params; 4] {
        [160, 192, 224, 256].map(|n| Params { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.n / 32
    }

    /// Raw signature size: n bits.
    pub fn signature_bytes(&self) -> usize {
        self.n / 8
    }

    /// Private payload size: two n-byte permutations plus the quasigroup.
    pub fn private_key_bytes(&self) -> usize {
        2 * self.n + QUASIGROUP_BYTES
    }

    /// Public payload size: `0.75 n (1 + n(n+1)/2)` bits.
    pub fn public_key_bytes(&self) -> usize {
        public_key_bytes(self.n)
    }
}

/// Trailing (least significant) `nbits` of the SHA-256 digest, read as a
/// big-endian bit string. `nbits` must not exceed 256.
pub fn hash_truncate(message: &[u8], nbits: usize) -> BitVector {
    assert!(nbits <= 256, "SHA-256 yields only 256 bits");
    let digest = Sha256::digest(message);
    let skip = 256 - nbits;
    let mut out = BitVector::zeros(nbits);
    for i in 0..nbits {
        let bit_idx = skip + i;
        if digest[bit_idx / 8] >> (7 - bit_idx % 8) & 1 == 1 {
            out.set(i, true);
        }
    }
    out
}

/// The public quadratic system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PublicKey {
    params: Params,
    system: QuadSystem,
}

/// The signing key: the mask permutations plus the quasigroup.
#[derive(Debug)]
pub struct PrivateKey {
    params: Params,
    sigmas: SigmaSet,
    quasigroup: Quasigroup,
}

/// An n-bit signature.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Signature {
    bits: BitVector,
}

/// Generates a key pair. Deterministic for a fixed RNG stream: the
/// quasigroup is drawn first, then the masks, then the public system is
/// composed.
pub fn keygen<R: RngCore + ?Sized>(
    params: Params,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey), AttemptsExhausted> {
    let quasigroup = Quasigroup::generate(rng, 8, MQQ_MAX_ATTEMPTS)?;
    let sigmas = SigmaSet::generate(rng, params.n, MASK_MAX_ATTEMPTS)?;
    let system = compose(&quasigroup, &sigmas);
    Ok((
        PublicKey { params, system },
        PrivateKey {
            params,
            sigmas,
            quasigroup,
        },
    ))
}

impl PrivateKey {
    pub fn params(&self) -> Params {
        self.params
    }

    pub fn sigmas(&self) -> &SigmaSet {
        &self.sigmas
    }

    pub fn quasigroup(&self) -> &Quasigroup {
        &self.quasigroup
    }

    /// Signs a document. No randomness is involved: the same key and
    /// message always yield the same signature.
    pub fn sign(&self, message: &[u8]) -> Signature {
        let n = self.params.n;
        let y = hash_truncate(message, n);
        let y_inner = self.sigmas.s_inv().mul_vector(&y);
        let x_inner = centralmap::inverse(&self.quasigroup, &y_inner.to_bytes());
        let x_inner = BitVector::from_bytes(&x_inner, n);
        Signature {
            bits: self.sigmas.invert_affine(&x_inner),
        }
    }

    /// Serializes to `2n + 81` bytes: the two permutations, then the
    /// quasigroup.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.sigmas.to_bytes();
        out.extend_from_slice(&self.quasigroup.to_bytes());
        out
    }

    /// Decodes and re-validates: mask structure, and the quasigroup's
    /// multiplication table must be a Latin square (otherwise the
    /// parastrophes are ill-defined and the key cannot sign).
    pub fn from_bytes(bytes: &[u8], params: Params) -> Result<PrivateKey, CodecError> {
        let expected = params.private_key_bytes();
        if bytes.len() != expected {
            return Err(CodecError::WrongLength {
                expected,
                actual: bytes.len(),
            });
        }
        let sigmas = SigmaSet::from_bytes(&bytes[..2 * params.n], params.n)?;
        let quasigroup = Quasigroup::from_bytes(&bytes[2 * params.n..])?;
        if !quasigroup.is_latin() {
            return Err(CodecError::InvariantViolation(
                "quasigroup multiplication table is not a Latin square",
            ));
        }
        Ok(PrivateKey {
            params,
            sigmas,
            quasigroup,
        })
    }
}

impl PublicKey {
    pub fn params(&self) -> Params {
        self.params
    }

    pub fn system(&self) -> &QuadSystem {
        &self.system
    }

    /// Verifies a signature. Well-formed but wrong inputs (including a
    /// signature of the wrong length) return `false`; errors are reserved
    /// for malformed encodings.
    pub fn verify(&self, message: &[u8], sig: &Signature) -> bool {
        let n = self.params.n;
        if sig.bits.len() != n {
            return false;
        }
        let z = self.system.evaluate(&sig.bits);
        let y = hash_truncate(message, 3 * n / 4);
        z == y
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.system.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8], params: Params) -> Result<PublicKey, CodecError> {
        let system = QuadSystem::from_bytes(bytes, params.n)?;
        Ok(PublicKey { params, system })
    }
}

impl Signature {
    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8], params: Params) -> Result<Signature, CodecError> {
        if bytes.len() != params.signature_bytes() {
            return Err(CodecError::WrongLength {
                expected: params.signature_bytes(),
                actual: bytes.len(),
            });
        }
        Ok(Signature {
            bits: BitVector::from_bytes(bytes, params.n()),
        })
    }
}
