//! Sender-side transaction construction and validator-side bundle checks.
//!
//! A sender samples commitment randomness sigma, commits to the payload,
//! derives `txid = H(H_pre || C)`, and signs the id. Coded symbols for the
//! message `sigma || payload` are packed into per-lane bundles; a bundle
//! signature binds the symbols, their indices, and the destination lane to
//! the transaction. Validators admit a bundle only if all four checks pass:
//!
//! 1. hash consistency: recomputing the id from the carried header yields
//!    the bundle's `txid`;
//! 2. the header signature verifies;
//! 3. the fee/accounting predicate holds (`fee_per_byte` at or above the
//!    local floor, and `max_fee` covering the serialized bundle bytes);
//! 4. the bundle signature verifies.
//!
//! Note what is deliberately *not* checked: that symbol values are correct
//! encodings. A malicious sender can sign garbage; it pays for the bytes and
//! the transaction is discarded post-decode. Bundle signatures also cannot
//! stop a sender from signing different values for the same index in
//! different bundles; the ledger's first-occurrence deduplication resolves
//! that downstream.

use crate::codec::{
    mds_encode, naive_package, rateless_symbol, MdsParams, Message, RatelessParams, Symbol,
};
use crate::crypto::{
    commit, derive_txid, domain, sign, verify, CommitRandomness, Commitment, Digest, KeyPair,
    Signature,
};
use crate::rng::DeterministicRng;
use crate::wire;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Fee and accounting fields, serialized canonically and bound into the
/// transaction id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreimageHeader {
    pub sender_pubkey: [u8; 32],
    pub fee_per_byte: u64,
    pub max_fee: u64,
    pub nonce: u64,
    /// Length of `sigma || payload` in bytes.
    pub declared_message_len: u64,
}

/// Public header: preimage fields, payload commitment, header signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublicHeader {
    pub pre: PreimageHeader,
    pub commitment: Commitment,
    pub header_sig: Signature,
}

/// Sender-side view of a transaction (includes the plaintext message).
#[derive(Debug, Clone)]
pub struct Transaction {
    pub header: PublicHeader,
    pub message: Message,
    pub txid: Digest,
}

/// A signed, lane-addressed carrier of coded symbols for one transaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub txid: Digest,
    /// Destination lane, 1-based.
    pub lane: u16,
    /// Carried symbols, strictly increasing by index.
    pub symbols: Vec<Symbol>,
    pub bundle_sig: Signature,
    pub header: PublicHeader,
}

impl Bundle {
    /// Build and sign a bundle. Symbols are sorted by index; duplicate
    /// indices are a caller bug and panic.
    ///
    /// This is the raw constructor: it signs whatever it is given, which is
    /// also how a malicious sender mints equivocating bundles (different
    /// values for one index in different bundles). Such bundles pass
    /// verification by design.
    pub fn build_signed(
        keypair: &KeyPair,
        header: PublicHeader,
        txid: Digest,
        lane: u16,
        mut symbols: Vec<Symbol>,
    ) -> Bundle {
        assert!(!symbols.is_empty(), "a bundle carries at least one symbol");
        symbols.sort_by_key(|s| s.index);
        assert!(
            symbols.windows(2).all(|w| w[0].index < w[1].index),
            "duplicate symbol index in bundle"
        );
        assert!(
            symbols.windows(2).all(|w| w[0].value.len() == w[1].value.len()),
            "a bundle's symbols share one value length (the wire format \
             encodes no per-symbol length)"
        );
        let msg = wire::bundle_signing_message(&txid, lane, &symbols);
        let bundle_sig = sign(keypair, &msg);
        Bundle {
            txid,
            lane,
            symbols,
            bundle_sig,
            header,
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.symbols.iter().map(|s| s.index)
    }
}

/// Dispersal variant plus its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// Full copies of the message, one per contacted lane.
    Naive,
    /// Fixed-rate shares; one share per contacted lane.
    Mds(MdsParams),
    /// Rateless symbols, `symbols_per_bundle` fresh indices per lane.
    Rateless {
        params: RatelessParams,
        symbols_per_bundle: u32,
    },
}

impl Strategy {
    /// Distinct verified units required before a decode can be attempted.
    pub fn decode_threshold(&self) -> usize {
        match self {
            Strategy::Naive => 1,
            Strategy::Mds(p) => p.shares_needed as usize,
            Strategy::Rateless { params, .. } => params.decode_threshold,
        }
    }

    /// Symbols placed in each bundle.
    pub fn symbols_per_bundle(&self) -> u32 {
        match self {
            Strategy::Rateless {
                symbols_per_bundle, ..
            } => *symbols_per_bundle,
            _ => 1,
        }
    }

    /// Value bytes of one carried symbol.
    pub fn symbol_value_len(&self) -> usize {
        match self {
            Strategy::Naive => 0, // depends on the message; resolved at build time
            Strategy::Mds(p) => p.share_len,
            Strategy::Rateless { params, .. } => params.symbol_len,
        }
    }
}

/// A sender's chosen strategy and fanout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyConfig {
    /// Lanes contacted per slot, `1 <= lanes <= n`.
    pub lanes: u16,
    pub strategy: Strategy,
}

/// Mutable sender state: the transaction plus the next unused symbol index.
/// The cursor only ever moves forward, which is what keeps index sets
/// disjoint across bundles and across slots.
#[derive(Debug, Clone)]
pub struct SenderState {
    pub transaction: Transaction,
    keypair: KeyPair,
    cursor: u64,
    mds_shares: Option<Vec<Symbol>>,
}

/// Validator-local accounting policy for check 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeePolicy {
    pub min_fee_per_byte: u64,
}

impl Default for FeePolicy {
    fn default() -> Self {
        Self {
            min_fee_per_byte: 1,
        }
    }
}

/// Build a transaction: sample sigma, commit, derive the id, sign it.
pub fn build_transaction(
    payload: &[u8],
    fee_per_byte: u64,
    max_fee: u64,
    nonce: u64,
    keypair: &KeyPair,
    rng: &mut DeterministicRng,
) -> SenderState {
    assert!(!payload.is_empty(), "payload must be non-empty");
    let sigma = CommitRandomness::sample(rng);
    let message = Message::from_parts(&sigma.0, payload);
    let commitment = commit(&sigma, payload);
    let pre = PreimageHeader {
        sender_pubkey: keypair.public_key(),
        fee_per_byte,
        max_fee,
        nonce,
        declared_message_len: message.len() as u64,
    };
    let txid = derive_txid(&wire::preimage_header_bytes(&pre), &commitment);
    let header_sig = sign(keypair, &header_signing_message(&txid));
    SenderState {
        transaction: Transaction {
            header: PublicHeader {
                pre,
                commitment,
                header_sig,
            },
            message,
            txid,
        },
        keypair: keypair.clone(),
        cursor: 0,
        mds_shares: None,
    }
}

/// Message signed by the header signature.
pub fn header_signing_message(txid: &Digest) -> Vec<u8> {
    let mut m = Vec::with_capacity(domain::HEADER.len() + 32);
    m.extend_from_slice(domain::HEADER);
    m.extend_from_slice(txid.as_bytes());
    m
}

/// Uniform sample of `m` distinct lanes from `{1..n}`, sorted.
pub fn sample_lanes(n: u16, m: u16, rng: &mut DeterministicRng) -> Result<Vec<u16>, ProtocolError> {
    if m == 0 || m > n {
        return Err(ProtocolError::InvalidConfig(format!(
            "need 0 < m <= n, got m={m} n={n}"
        )));
    }
    Ok(rng.sample_lanes(n, m))
}

impl SenderState {
    pub fn cursor(&self) -> u64 {
        self.cursor
    }

    pub fn keypair(&self) -> &KeyPair {
        &self.keypair
    }

    /// Build one signed bundle per sampled lane.
    ///
    /// Index assignment per variant, with `r` the lane's position in the
    /// (sorted) sample:
    /// * naive: every bundle carries the whole message as pseudo-symbol 0;
    /// * fixed-rate: the r-th lane carries share `cursor + r`, wrapping
    ///   modulo the share count once the fixed supply is exhausted;
    /// * rateless: the r-th lane carries the `s` fresh indices starting at
    ///   `cursor + r*s`.
    ///
    /// The cursor advances past every index consumed, so no later call can
    /// reuse one.
    pub fn build_bundles(&mut self, lanes: &[u16], config: &StrategyConfig) -> Vec<Bundle> {
        assert_eq!(
            lanes.len(),
            config.lanes as usize,
            "sampled lane count must match the configured fanout"
        );
        let header = self.transaction.header;
        let txid = self.transaction.txid;
        let mut bundles = Vec::with_capacity(lanes.len());
        match &config.strategy {
            Strategy::Naive => {
                let value = naive_package(&self.transaction.message);
                for &lane in lanes {
                    let symbols = vec![Symbol {
                        index: 0,
                        value: value.clone(),
                    }];
                    bundles.push(Bundle::build_signed(
                        &self.keypair,
                        header,
                        txid,
                        lane,
                        symbols,
                    ));
                }
            }
            Strategy::Mds(params) => {
                let shares = self
                    .mds_shares
                    .get_or_insert_with(|| mds_encode(&self.transaction.message, params));
                for (r, &lane) in lanes.iter().enumerate() {
                    let idx = (self.cursor + r as u64) % params.shares_total as u64;
                    let symbols = vec![shares[idx as usize].clone()];
                    bundles.push(Bundle::build_signed(
                        &self.keypair,
                        header,
                        txid,
                        lane,
                        symbols,
                    ));
                }
                self.cursor += lanes.len() as u64;
            }
            Strategy::Rateless {
                params,
                symbols_per_bundle,
            } => {
                let s = *symbols_per_bundle as u64;
                assert!(s >= 1, "rateless bundles carry at least one symbol");
                for (r, &lane) in lanes.iter().enumerate() {
                    let start = self.cursor + r as u64 * s;
                    let symbols: Vec<Symbol> = (start..start + s)
                        .map(|j| rateless_symbol(&self.transaction.message, j, params))
                        .collect();
                    bundles.push(Bundle::build_signed(
                        &self.keypair,
                        header,
                        txid,
                        lane,
                        symbols,
                    ));
                }
                self.cursor += lanes.len() as u64 * s;
            }
        }
        bundles
    }
}

/// The validator's four admission checks. Total on untrusted input; returns
/// false rather than panicking.
pub fn verify_bundle(bundle: &Bundle, policy: &FeePolicy) -> bool {
    // 1. Hash consistency: the header must re-derive the claimed id.
    let recomputed = derive_txid(
        &wire::preimage_header_bytes(&bundle.header.pre),
        &bundle.header.commitment,
    );
    if recomputed != bundle.txid {
        return false;
    }
    // 2. Header signature over the id.
    if !verify(
        &bundle.header.pre.sender_pubkey,
        &header_signing_message(&bundle.txid),
        &bundle.header.header_sig,
    ) {
        return false;
    }
    // 3. Accounting: pay-for-bytes with a local fee floor.
    if bundle.header.pre.fee_per_byte < policy.min_fee_per_byte {
        return false;
    }
    let bundle_bytes = wire::bundle_bytes(bundle).len() as u64;
    let Some(required) = bundle.header.pre.fee_per_byte.checked_mul(bundle_bytes) else {
        return false;
    };
    if bundle.header.pre.max_fee < required {
        return false;
    }
    // 4. Bundle signature over (txid, lane, sorted index-value pairs).
    // Structural canonicity first: at least one symbol, strictly increasing
    // indices, one shared value length (the wire format encodes nothing
    // else, so nothing else is admissible).
    if bundle.symbols.is_empty()
        || !bundle.symbols.windows(2).all(|w| w[0].index < w[1].index)
        || !bundle
            .symbols
            .windows(2)
            .all(|w| w[0].value.len() == w[1].value.len())
    {
        return false;
    }
    verify(
        &bundle.header.pre.sender_pubkey,
        &wire::bundle_signing_message(&bundle.txid, bundle.lane, &bundle.symbols),
        &bundle.bundle_sig,
    )
}

/// Effective number of censorable lanes for a user tolerating `c` censoring
/// validators in an n = 3f+1 system.
///
/// Up to `f` censors can only suppress the lanes they control. Past that
/// they can also stall honest lanes, because finalization needs 2f+1 votes
/// while only n-f lanes are guaranteed to decide, so `n - (2f+1) + c` lanes
/// are lost. Past 2f the whole lane set is suppressible.
pub fn effective_censors(n: u16, f: u16, c: u16) -> u16 {
    if c <= f {
        c
    } else if c <= 2 * f {
        let val = n as i64 - (2 * f as i64 + 1) + c as i64;
        val.clamp(0, n as i64) as u16
    } else {
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::hash;

    fn test_keypair(seed: u64) -> KeyPair {
        KeyPair::from_rng(&mut DeterministicRng::from_seed(seed))
    }

    fn rateless_config(message_len: usize, lanes: u16, s: u32) -> StrategyConfig {
        StrategyConfig {
            lanes,
            strategy: Strategy::Rateless {
                params: RatelessParams::new(message_len, 64, 0.05).unwrap(),
                symbols_per_bundle: s,
            },
        }
    }

    fn build_state(seed: u64, payload_len: usize) -> SenderState {
        let kp = test_keypair(seed);
        let mut rng = DeterministicRng::from_seed(seed ^ 0xABCD);
        let payload = vec![0x5A; payload_len];
        build_transaction(&payload, 1, u64::MAX, 7, &kp, &mut rng)
    }

    #[test]
    fn built_transaction_passes_header_checks() {
        let mut state = build_state(1, 400);
        let config = rateless_config(432, 3, 2);
        let mut rng = DeterministicRng::from_seed(2);
        let lanes = sample_lanes(16, 3, &mut rng).unwrap();
        let bundles = state.build_bundles(&lanes, &config);
        for b in &bundles {
            assert!(verify_bundle(b, &FeePolicy::default()));
        }
    }

    #[test]
    fn same_payload_fresh_randomness_changes_identity() {
        let kp = test_keypair(3);
        let payload = vec![1u8; 64];
        let mut rng = DeterministicRng::from_seed(10);
        let a = build_transaction(&payload, 1, u64::MAX, 0, &kp, &mut rng);
        let b = build_transaction(&payload, 1, u64::MAX, 0, &kp, &mut rng);
        assert_ne!(
            a.transaction.header.commitment,
            b.transaction.header.commitment
        );
        assert_ne!(a.transaction.txid, b.transaction.txid);
    }

    #[test]
    fn declared_length_counts_sigma() {
        let state = build_state(4, 100);
        assert_eq!(state.transaction.header.pre.declared_message_len, 132);
    }

    #[test]
    fn sample_lanes_rejects_oversized_draw() {
        let mut rng = DeterministicRng::from_seed(5);
        assert!(sample_lanes(4, 5, &mut rng).is_err());
        assert!(sample_lanes(4, 0, &mut rng).is_err());
        assert_eq!(sample_lanes(4, 4, &mut rng).unwrap(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn rateless_bundles_use_fresh_disjoint_index_blocks() {
        let mut state = build_state(6, 1000);
        let config = rateless_config(1032, 3, 2);
        let lanes = vec![2, 5, 9];
        let first = state.build_bundles(&lanes, &config);
        let idx: Vec<Vec<u64>> = first.iter().map(|b| b.indices().collect()).collect();
        assert_eq!(idx, vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        // A second call (a later slot) continues where the first stopped.
        let second = state.build_bundles(&lanes, &config);
        let idx2: Vec<Vec<u64>> = second.iter().map(|b| b.indices().collect()).collect();
        assert_eq!(idx2, vec![vec![6, 7], vec![8, 9], vec![10, 11]]);
    }

    #[test]
    fn index_sets_stay_disjoint_over_randomized_call_sequences() {
        let mut rng = DeterministicRng::from_seed(7);
        for variant in 0..2 {
            let mut state = build_state(100 + variant, 500);
            let mut seen = std::collections::HashSet::new();
            for _ in 0..10 {
                let m = 1 + rng.below(4) as u16;
                let lanes = sample_lanes(12, m, &mut rng).unwrap();
                let config = match variant {
                    0 => StrategyConfig {
                        lanes: m,
                        strategy: Strategy::Rateless {
                            params: RatelessParams::new(532, 64, 0.05).unwrap(),
                            symbols_per_bundle: 1 + rng.below(3) as u32,
                        },
                    },
                    _ => StrategyConfig {
                        lanes: m,
                        strategy: Strategy::Mds(MdsParams::new(100, 4, 532).unwrap()),
                    },
                };
                for b in state.build_bundles(&lanes, &config) {
                    for j in b.indices() {
                        assert!(seen.insert(j), "index {j} reused");
                    }
                }
            }
        }
    }

    #[test]
    fn naive_bundles_carry_the_full_message() {
        let mut state = build_state(8, 250);
        let config = StrategyConfig {
            lanes: 2,
            strategy: Strategy::Naive,
        };
        let bundles = state.build_bundles(&[1, 4], &config);
        for b in &bundles {
            assert_eq!(b.symbols.len(), 1);
            assert_eq!(b.symbols[0].index, 0);
            assert_eq!(b.symbols[0].value, state.transaction.message.bytes());
            assert!(verify_bundle(b, &FeePolicy::default()));
        }
    }

    #[test]
    fn mds_share_indices_advance_with_cursor() {
        let mut state = build_state(9, 300);
        let config = StrategyConfig {
            lanes: 2,
            strategy: Strategy::Mds(MdsParams::new(6, 2, 332).unwrap()),
        };
        let first = state.build_bundles(&[3, 7], &config);
        assert_eq!(first[0].symbols[0].index, 0);
        assert_eq!(first[1].symbols[0].index, 1);
        let second = state.build_bundles(&[3, 7], &config);
        assert_eq!(second[0].symbols[0].index, 2);
        assert_eq!(second[1].symbols[0].index, 3);
    }

    #[test]
    fn verify_rejects_single_field_tampering() {
        let mut state = build_state(10, 200);
        let config = rateless_config(232, 1, 2);
        let bundle = state.build_bundles(&[5], &config).pop().unwrap();
        let policy = FeePolicy::default();
        assert!(verify_bundle(&bundle, &policy));

        let mut b = bundle.clone();
        b.txid = hash(b"other");
        assert!(!verify_bundle(&b, &policy));

        let mut b = bundle.clone();
        b.lane = 6;
        assert!(!verify_bundle(&b, &policy));

        let mut b = bundle.clone();
        b.symbols[0].value[0] ^= 1;
        assert!(!verify_bundle(&b, &policy));

        let mut b = bundle.clone();
        b.symbols[1].index += 1;
        assert!(!verify_bundle(&b, &policy));

        let mut b = bundle.clone();
        b.header.pre.fee_per_byte = 2;
        assert!(!verify_bundle(&b, &policy), "fee change must break the id");

        let mut b = bundle.clone();
        b.header.commitment = Commitment(hash(b"swap"));
        assert!(!verify_bundle(&b, &policy));

        let mut b = bundle.clone();
        b.bundle_sig.0[0] ^= 1;
        assert!(!verify_bundle(&b, &policy));

        let mut b = bundle.clone();
        b.header.header_sig.0[0] ^= 1;
        assert!(!verify_bundle(&b, &policy));
    }

    #[test]
    fn substituted_header_with_original_txid_fails_hash_check() {
        let mut state = build_state(11, 200);
        let other = build_state(12, 200);
        let config = rateless_config(232, 1, 1);
        let mut bundle = state.build_bundles(&[2], &config).pop().unwrap();
        // Graft a different (valid) header while keeping the original txid.
        bundle.header = other.transaction.header;
        assert!(!verify_bundle(&bundle, &FeePolicy::default()));
    }

    #[test]
    fn fee_floor_and_budget_are_enforced() {
        let kp = test_keypair(13);
        let mut rng = DeterministicRng::from_seed(14);
        let payload = vec![9u8; 100];
        // fee_per_byte below the floor of 2:
        let mut state = build_transaction(&payload, 1, u64::MAX, 0, &kp, &mut rng);
        let config = rateless_config(132, 1, 1);
        let b = state.build_bundles(&[1], &config).pop().unwrap();
        assert!(!verify_bundle(
            &b,
            &FeePolicy {
                min_fee_per_byte: 2
            }
        ));
        assert!(verify_bundle(
            &b,
            &FeePolicy {
                min_fee_per_byte: 1
            }
        ));

        // max_fee too small for the serialized bundle:
        let mut state = build_transaction(&payload, 1, 10, 0, &kp, &mut rng);
        let b = state.build_bundles(&[1], &config).pop().unwrap();
        assert!(!verify_bundle(&b, &FeePolicy::default()));
    }

    #[test]
    fn equivocating_bundles_both_verify() {
        // A malicious sender can sign two different values for one index;
        // verification alone does not (and must not) catch this.
        let state = build_state(15, 300);
        let tx = &state.transaction;
        let a = Bundle::build_signed(
            state.keypair(),
            tx.header,
            tx.txid,
            1,
            vec![Symbol {
                index: 0,
                value: vec![1; 64],
            }],
        );
        let b = Bundle::build_signed(
            state.keypair(),
            tx.header,
            tx.txid,
            2,
            vec![Symbol {
                index: 0,
                value: vec![2; 64],
            }],
        );
        let policy = FeePolicy::default();
        assert!(verify_bundle(&a, &policy));
        assert!(verify_bundle(&b, &policy));
        assert_ne!(a.symbols[0].value, b.symbols[0].value);
    }

    #[test]
    fn effective_censors_matches_model() {
        assert_eq!(effective_censors(16, 5, 0), 0);
        assert_eq!(effective_censors(16, 5, 3), 3);
        assert_eq!(effective_censors(16, 5, 5), 5);
        // f < c <= 2f: n - (2f+1) + c
        assert_eq!(effective_censors(16, 5, 7), 12);
        assert_eq!(effective_censors(16, 5, 10), 15);
        // c > 2f: everything is suppressible
        assert_eq!(effective_censors(16, 5, 11), 16);
    }
}
