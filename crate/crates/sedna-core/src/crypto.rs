//! Hashing, commitments, and signatures.
//!
//! All digests are 32-byte SHA-256; signatures are 64-byte Ed25519 with
//! deterministic signing, which keeps simulation runs reproducible. The
//! payload commitment is hash-based: `Com(sigma, payload) =
//! H("SEDNA/COM" || sigma || payload)` with 32 bytes of commitment
//! randomness. Every signed or hashed message class carries its own domain
//! tag so a signature or digest from one context can never be replayed in
//! another.

use ed25519_dalek::{Signer, SigningKey, VerifyingKey};
use sha2::{Digest as _, Sha256};

use crate::rng::DeterministicRng;

/// Domain-separation tags. Exactly one per signed/hashed message class.
pub mod domain {
    /// Payload commitment preimages.
    pub const COMMIT: &[u8] = b"SEDNA/COM";
    /// Header signatures (over the transaction id).
    pub const HEADER: &[u8] = b"SEDNA/HDR";
    /// Bundle signatures (over id, lane, and the carried symbols).
    pub const BUNDLE: &[u8] = b"SEDNA/BND";
    /// Coded-symbol coefficient seeds.
    pub const SYMBOL: &[u8] = b"SEDNA/SYM";
}

pub const DIGEST_LEN: usize = 32;
pub const SIGNATURE_LEN: usize = 64;
pub const COMMIT_RANDOMNESS_LEN: usize = 32;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CryptoError {
    #[error("commitment randomness must be exactly {COMMIT_RANDOMNESS_LEN} bytes, got {0}")]
    InvalidRandomness(usize),
}

/// 32-byte hash output. Ordered bytewise; that order is what breaks
/// inclusion-height ties in the execution order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(pub [u8; DIGEST_LEN]);

impl Digest {
    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        <[u8; DIGEST_LEN]>::try_from(bytes).ok().map(Digest)
    }
}

impl std::fmt::Debug for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Digest({}…)", &self.to_hex()[..12])
    }
}

impl std::fmt::Display for Digest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Commitment randomness sigma: fixed 32 bytes for every transaction.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct CommitRandomness(pub [u8; COMMIT_RANDOMNESS_LEN]);

impl CommitRandomness {
    pub fn sample(rng: &mut DeterministicRng) -> Self {
        Self(rng.bytes32())
    }
}

impl std::fmt::Debug for CommitRandomness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("CommitRandomness(…)")
    }
}

/// Binding, hiding commitment to a payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Commitment(pub Digest);

/// 64-byte Ed25519 signature.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Signature(pub [u8; SIGNATURE_LEN]);

impl Signature {
    pub fn as_bytes(&self) -> &[u8; SIGNATURE_LEN] {
        &self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        <[u8; SIGNATURE_LEN]>::try_from(bytes).ok().map(Signature)
    }
}

impl std::fmt::Debug for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Signature(…)")
    }
}

/// Ed25519 keypair. Construction is seed-driven so simulations can mint
/// reproducible identities; there is no key storage of any kind.
#[derive(Clone)]
pub struct KeyPair {
    signing: SigningKey,
    public: [u8; 32],
}

impl KeyPair {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        let signing = SigningKey::from_bytes(&seed);
        let public = signing.verifying_key().to_bytes();
        Self { signing, public }
    }

    pub fn from_rng(rng: &mut DeterministicRng) -> Self {
        Self::from_seed(rng.bytes32())
    }

    pub fn public_key(&self) -> [u8; 32] {
        self.public
    }
}

impl std::fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KeyPair(pk={}…)", hex_prefix(&self.public))
    }
}

fn hex_prefix(bytes: &[u8]) -> String {
    bytes[..4].iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of `data`.
pub fn hash(data: &[u8]) -> Digest {
    let mut h = Sha256::new();
    h.update(data);
    Digest(h.finalize().into())
}

/// SHA-256 of the concatenation of `parts`.
pub fn hash_parts(parts: &[&[u8]]) -> Digest {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    Digest(h.finalize().into())
}

/// `Com(sigma, payload)`. Deterministic; binding and hiding under standard
/// assumptions on the hash.
pub fn commit(sigma: &CommitRandomness, payload: &[u8]) -> Commitment {
    Commitment(hash_parts(&[domain::COMMIT, &sigma.0, payload]))
}

/// Commitment over untrusted randomness bytes (e.g. recovered by a decoder).
pub fn commit_bytes(sigma: &[u8], payload: &[u8]) -> Result<Commitment, CryptoError> {
    if sigma.len() != COMMIT_RANDOMNESS_LEN {
        return Err(CryptoError::InvalidRandomness(sigma.len()));
    }
    Ok(Commitment(hash_parts(&[domain::COMMIT, sigma, payload])))
}

/// Check a commitment opening: true iff `Com(sigma, payload)` equals `c`.
pub fn verify_opening(c: &Commitment, sigma: &[u8], payload: &[u8]) -> bool {
    match commit_bytes(sigma, payload) {
        Ok(recomputed) => recomputed == *c,
        Err(_) => false,
    }
}

/// Transaction identifier: `H(H_pre || C)` over the canonical preimage
/// header serialization.
pub fn derive_txid(h_pre_bytes: &[u8], c: &Commitment) -> Digest {
    hash_parts(&[h_pre_bytes, c.0.as_bytes()])
}

/// Deterministic Ed25519 signature over `message`.
pub fn sign(keypair: &KeyPair, message: &[u8]) -> Signature {
    Signature(keypair.signing.sign(message).to_bytes())
}

/// Verify a signature. Total on untrusted input: malformed keys or
/// signatures return false, never panic.
pub fn verify(public_key: &[u8; 32], message: &[u8], sig: &Signature) -> bool {
    let Ok(vk) = VerifyingKey::from_bytes(public_key) else {
        return false;
    };
    let sig = ed25519_dalek::Signature::from_bytes(&sig.0);
    vk.verify_strict(message, &sig).is_ok()
}
