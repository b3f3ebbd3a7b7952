//! mqqsig: keygen, sign, verify and bench for the MQQ-SIG scheme.
//!
//! Exit codes: 0 on success (or a valid signature), 1 for an invalid
//! signature, 2 for malformed inputs or usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mqq_sig::{keygen, Params, PrivateKey, PublicKey, Signature};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

const MAGIC: [u8; 4] = *b"MQQS";
const VERSION: u8 = 0x01;
const KIND_PUBLIC: u8 = 0x01;
const KIND_PRIVATE: u8 = 0x02;
const HASH_SHA256: u8 = 0x01;
const HEADER_LEN: usize = 8;

#[derive(Parser)]
#[command(name = "mqqsig", version, about = "MQQ-SIG signature tool")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair and write the key files
    Keygen {
        /// Scheme dimension (signature bits)
        #[arg(long, value_name = "N")]
        n: usize,
        /// Hex seed for deterministic generation; the bytes are hashed
        /// with SHA-256 into a ChaCha20 stream. Omit for OS entropy.
        #[arg(long, value_name = "HEX")]
        seed: Option<String>,
        /// Output path for the public key
        #[arg(long = "pub", value_name = "PATH")]
        public: PathBuf,
        /// Output path for the private key
        #[arg(long = "priv", value_name = "PATH")]
        private: PathBuf,
    },
    /// Sign a file, writing the raw n-bit signature
    Sign {
        /// Private key file
        #[arg(long = "priv", value_name = "PATH")]
        private: PathBuf,
        /// Document to sign
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        /// Output path for the signature
        #[arg(long = "sig", value_name = "PATH")]
        signature: PathBuf,
    },
    /// Verify a signature against a file
    Verify {
        /// Public key file
        #[arg(long = "pub", value_name = "PATH")]
        public: PathBuf,
        /// Signed document
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        /// Signature file
        #[arg(long = "sig", value_name = "PATH")]
        signature: PathBuf,
    },
    /// Time keygen, sign and verify (informational; always exits 0)
    Bench {
        /// Scheme dimension
        #[arg(long, value_name = "N", default_value_t = 160)]
        n: usize,
        /// Iterations per operation (median is reported)
        #[arg(long, default_value_t = 10)]
        iters: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Keygen {
            n,
            seed,
            public,
            private,
        } => cmd_keygen(n, seed.as_deref(), &public, &private),
        Command::Sign {
            private,
            input,
            signature,
        } => cmd_sign(&private, &input, &signature),
        Command::Verify {
            public,
            input,
            signature,
        } => cmd_verify(&public, &input, &signature),
        Command::Bench { n, iters } => {
            if let Err(e) = cmd_bench(n, iters) {
                eprintln!("bench error: {e:#}");
            }
            return ExitCode::SUCCESS;
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn rng_from_seed(seed: Option<&str>) -> Result<ChaCha20Rng> {
    match seed {
        Some(hexstr) => {
            let bytes = hex::decode(hexstr.trim()).context("seed is not valid hex")?;
            let digest: [u8; 32] = Sha256::digest(&bytes).into();
            Ok(ChaCha20Rng::from_seed(digest))
        }
        None => Ok(ChaCha20Rng::from_os_rng()),
    }
}

fn header(kind: u8, params: Params) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[..4].copy_from_slice(&MAGIC);
    h[4] = VERSION;
    h[5] = kind;
    h[6] = HASH_SHA256;
    h[7] = params.k() as u8;
    h
}

fn parse_header(bytes: &[u8], expect_kind: u8) -> Result<Params> {
    if bytes.len() < HEADER_LEN {
        bail!("file too short for a key header");
    }
    if bytes[..4] != MAGIC {
        bail!("bad magic: not an MQQS key file");
    }
    if bytes[4] != VERSION {
        bail!("unsupported key file version {}", bytes[4]);
    }
    if bytes[5] != expect_kind {
        let want = if expect_kind == KIND_PUBLIC {
            "public"
        } else {
            "private"
        };
        bail!("wrong key kind: expected a {want} key");
    }
    if bytes[6] != HASH_SHA256 {
        bail!("unsupported hash identifier {}", bytes[6]);
    }
    Params::from_n(bytes[7] as usize * 32).context("unsupported parameter in key header")
}

fn read_key_payload(path: &Path, expect_kind: u8) -> Result<(Params, Vec<u8>)> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let params = parse_header(&bytes, expect_kind)?;
    let expected = HEADER_LEN
        + if expect_kind == KIND_PUBLIC {
            params.public_key_bytes()
        } else {
            params.private_key_bytes()
        };
    if bytes.len() != expected {
        bail!(
            "key file has {} bytes, expected exactly {expected}",
            bytes.len()
        );
    }
    Ok((params, bytes[HEADER_LEN..].to_vec()))
}

fn cmd_keygen(n: usize, seed: Option<&str>, public: &Path, private: &Path) -> Result<bool> {
    let params = Params::from_n(n)?;
    let mut rng = rng_from_seed(seed)?;
    let (pk, sk) = keygen(params, &mut rng)?;

    let mut pk_file = header(KIND_PUBLIC, params).to_vec();
    pk_file.extend(pk.to_bytes());
    fs::write(public, &pk_file).with_context(|| format!("cannot write {}", public.display()))?;

    let mut sk_file = header(KIND_PRIVATE, params).to_vec();
    sk_file.extend(sk.to_bytes());
    fs::write(private, &sk_file).with_context(|| format!("cannot write {}", private.display()))?;

    println!(
        "n = {}: public payload {} bytes, private payload {} bytes",
        n,
        params.public_key_bytes(),
        params.private_key_bytes()
    );
    Ok(true)
}

fn cmd_sign(private: &Path, input: &Path, signature: &Path) -> Result<bool> {
    let (params, payload) = read_key_payload(private, KIND_PRIVATE)?;
    let key = PrivateKey::from_bytes(&payload, params).context("malformed private key")?;
    let message = fs::read(input).with_context(|| format!("cannot read {}", input.display()))?;
    let sig = key.sign(&message);
    fs::write(signature, sig.to_bytes())
        .with_context(|| format!("cannot write {}", signature.display()))?;
    Ok(true)
}

fn cmd_verify(public: &Path, input: &Path, signature: &Path) -> Result<bool> {
    let (params, payload) = read_key_payload(public, KIND_PUBLIC)?;
    let key = PublicKey::from_bytes(&payload, params).context("malformed public key")?;
    let message = fs::read(input).with_context(|| format!("cannot read {}", input.display()))?;
    let sig_bytes =
        fs::read(signature).with_context(|| format!("cannot read {}", signature.display()))?;
    let Ok(sig) = Signature::from_bytes(&sig_bytes, params) else {
        // wrong-length signatures are rejected, not treated as errors
        println!("INVALID");
        return Ok(false);
    };
    if key.verify(&message, &sig) {
        println!("VALID");
        Ok(true)
    } else {
        println!("INVALID");
        Ok(false)
    }
}

fn median(mut times: Vec<Duration>) -> Duration {
    times.sort_unstable();
    times[times.len() / 2]
}

fn fmt_duration(d: Duration) -> String {
    let micros = d.as_micros();
    if micros < 1_000 {
        format!("{micros} us")
    } else if micros < 1_000_000 {
        format!("{:.2} ms", micros as f64 / 1_000.0)
    } else {
        format!("{:.2} s", micros as f64 / 1_000_000.0)
    }
}

fn cmd_bench(n: usize, iters: usize) -> Result<()> {
    let params = Params::from_n(n)?;
    let iters = iters.max(1);
    let mut rng = ChaCha20Rng::from_os_rng();
    let message = b"The quick brown fox jumps over the lazy dog";

    let mut keygen_times = Vec::with_capacity(iters);
    let mut last = None;
    for _ in 0..iters {
        let start = Instant::now();
        let pair = keygen(params, &mut rng)?;
        keygen_times.push(start.elapsed());
        last = Some(pair);
    }
    let (pk, sk) = last.expect("at least one iteration ran");

    let mut sign_times = Vec::with_capacity(iters);
    let mut sig = sk.sign(message);
    for _ in 0..iters {
        let start = Instant::now();
        sig = sk.sign(message);
        sign_times.push(start.elapsed());
    }

    let mut verify_times = Vec::with_capacity(iters);
    let mut ok = true;
    for _ in 0..iters {
        let start = Instant::now();
        ok &= pk.verify(message, &sig);
        verify_times.push(start.elapsed());
    }

    println!(
        "keygen (n = {n}): median {} over {iters} iters",
        fmt_duration(median(keygen_times))
    );
    println!(
        "sign   (n = {n}): median {} over {iters} iters",
        fmt_duration(median(sign_times))
    );
    println!(
        "verify (n = {n}): median {} over {iters} iters (all valid: {ok})",
        fmt_duration(median(verify_times))
    );
    Ok(())
}
