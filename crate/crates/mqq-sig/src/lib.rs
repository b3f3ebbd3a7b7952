//! MQQ-SIG: a multivariate quadratic quasigroup signature scheme.
//!
//! The scheme hides an easily invertible quasigroup string transformation
//! between two secret linear/affine maps over GF(2). The public key is the
//! truncated system of 3n/4 quadratic polynomials obtained by composing
//! the three layers symbolically; the private key is two permutations plus
//! an 81-byte quasigroup encoding, 2n + 81 bytes in total. Signatures are
//! n bits with no message expansion.
//!
//! Supported parameters are `n = 160, 192, 224, 256` (`n = 32k` with
//! `k = 5..=8`).
//!
//! ```
//! use mqq_sig::{keygen, Params};
//! use rand::SeedableRng;
//!
//! let params = Params::from_n(160).unwrap();
//! let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
//! let (public, private) = keygen(params, &mut rng).unwrap();
//! let sig = private.sign(b"a document");
//! assert!(public.verify(b"a document", &sig));
//! assert!(!public.verify(b"another document", &sig));
//! ```

pub mod centralmap;
pub mod error;
pub mod gf2;
pub mod masks;
pub mod mqq;
pub mod oracle;
pub mod publickey;
pub mod scheme;

pub use error::{AttemptsExhausted, CodecError, ParamError};
pub use scheme::{keygen, Params, PrivateKey, PublicKey, Signature};
