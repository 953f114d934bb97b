//! Payload dispersal codecs.
//!
//! Three interchangeable ways to turn a message into lane-addressable units:
//!
//! * **Rateless** ([`rateless_symbol`] / [`rateless_decode`]): a dense
//!   random-linear fountain over GF(2^8). The message is split into
//!   `ceil(S / ell_sym)` zero-padded source blocks; symbol `j` is the linear
//!   combination of all blocks under a coefficient row expanded from
//!   `H("SEDNA/SYM" || ell_sym || blocks || j)`. The stream is unbounded and
//!   any set of symbols whose coefficient rows reach full rank decodes
//!   exactly. The coefficient seed deliberately excludes the transaction id:
//!   rank behaviour and the decode threshold depend only on public
//!   parameters and the index, while bundle signatures provide the binding
//!   of symbols to transactions.
//! * **Fixed-rate shares** ([`mds::mds_encode`] / [`mds::mds_decode`]):
//!   systematic Reed-Solomon style (m, k) coding where any k distinct shares
//!   reconstruct the message exactly, with zero failure probability.
//! * **Naive** ([`naive_package`]): the identity copy, carried as a single
//!   pseudo-symbol so that downstream accounting is uniform.
//!
//! [`symbol_rank`] exposes the rank of an observed symbol set, which is also
//! the exact measure of what those symbols reveal: `r` observed symbols pin
//! down a rank-`r` subspace and leave `blocks - rank` source blocks
//! undetermined.
//!
//! Decode failure for the rateless codec is a property of which indices were
//! collected, not of the payload. [`estimate_delta_code`] measures the
//! residual failure rate empirically; [`delta::delta_code_lookup`] serves the
//! frozen measurements to the planner.

mod delta;
mod mds;

pub use delta::{delta_code_lookup, DeltaCodeEntry, DELTA_CODE_MEASUREMENT_SEED, DELTA_CODE_TABLE};
pub use mds::{mds_decode, mds_encode, MdsParams, MDS_MAX_SHARES};

use crate::crypto::{domain, hash_parts};
use crate::gf256;
use crate::rng::{derive_seed, DeterministicRng};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("message must not be empty")]
    EmptyMessage,
    #[error("invalid codec parameters: {0}")]
    InvalidParams(String),
    #[error("need {needed} distinct shares to reconstruct, got {got}")]
    NeedMoreShares { needed: usize, got: usize },
    #[error("share rejected: {0}")]
    InvalidShare(String),
}

/// The byte string handed to an encoder. For protocol transactions this is
/// `sigma || payload`; the codec itself treats it as opaque bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    bytes: Vec<u8>,
}

impl Message {
    pub fn new(bytes: Vec<u8>) -> Result<Self, CodecError> {
        if bytes.is_empty() {
            return Err(CodecError::EmptyMessage);
        }
        Ok(Self { bytes })
    }

    pub fn from_parts(sigma: &[u8; 32], payload: &[u8]) -> Self {
        let mut bytes = Vec::with_capacity(32 + payload.len());
        bytes.extend_from_slice(sigma);
        bytes.extend_from_slice(payload);
        Self { bytes }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// Split into commitment randomness and payload, when long enough.
    pub fn split_sigma(&self) -> Option<(&[u8], &[u8])> {
        if self.bytes.len() < 33 {
            return None;
        }
        Some(self.bytes.split_at(32))
    }
}

/// Parameters of the rateless code for one message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatelessParams {
    /// Exact message length S in bytes; the decoder truncates to this.
    pub message_len: usize,
    /// Symbol size in bytes.
    pub symbol_len: usize,
    /// Coding overhead epsilon in millionths (an epsilon of 0.05 is stored
    /// as 50_000). Kept rational so the decode threshold is exact.
    pub epsilon_micros: u64,
    /// Number of zero-padded source blocks, `ceil(S / ell_sym)`.
    pub source_blocks: usize,
    /// Decode threshold K: `ceil((1 + epsilon) * S / ell_sym)`.
    pub decode_threshold: usize,
}

const EPSILON_DENOM: u128 = 1_000_000;

impl RatelessParams {
    /// Standard construction: the decode threshold follows from
    /// `(message_len, symbol_len, epsilon)`. Epsilon is interpreted with a
    /// resolution of one millionth.
    pub fn new(message_len: usize, symbol_len: usize, epsilon: f64) -> Result<Self, CodecError> {
        if message_len == 0 {
            return Err(CodecError::EmptyMessage);
        }
        if symbol_len == 0 {
            return Err(CodecError::InvalidParams("symbol_len must be >= 1".into()));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(CodecError::InvalidParams("epsilon must be > 0".into()));
        }
        let epsilon_micros = (epsilon * EPSILON_DENOM as f64).round() as u64;
        if epsilon_micros == 0 {
            return Err(CodecError::InvalidParams(
                "epsilon below representable resolution (1e-6)".into(),
            ));
        }
        let source_blocks = message_len.div_ceil(symbol_len);
        let decode_threshold = decode_threshold_exact(message_len, symbol_len, epsilon_micros);
        Ok(Self {
            message_len,
            symbol_len,
            epsilon_micros,
            source_blocks,
            decode_threshold,
        })
    }

    /// Construction with an explicit decode threshold, for codec experiments
    /// that probe thresholds the standard formula cannot produce (e.g.
    /// exactly `source_blocks` symbols). `epsilon_micros` is set to zero to
    /// mark the threshold as explicit.
    pub fn with_threshold(
        message_len: usize,
        symbol_len: usize,
        decode_threshold: usize,
    ) -> Result<Self, CodecError> {
        if message_len == 0 {
            return Err(CodecError::EmptyMessage);
        }
        if symbol_len == 0 {
            return Err(CodecError::InvalidParams("symbol_len must be >= 1".into()));
        }
        let source_blocks = message_len.div_ceil(symbol_len);
        if decode_threshold < source_blocks {
            return Err(CodecError::InvalidParams(format!(
                "decode threshold {decode_threshold} below source block count {source_blocks}"
            )));
        }
        Ok(Self {
            message_len,
            symbol_len,
            epsilon_micros: 0,
            source_blocks,
            decode_threshold,
        })
    }
}

/// `ceil((1 + epsilon) * S / ell)` evaluated exactly in integer arithmetic,
/// with epsilon in millionths.
pub fn decode_threshold_exact(message_len: usize, symbol_len: usize, epsilon_micros: u64) -> usize {
    let num = (EPSILON_DENOM + epsilon_micros as u128) * message_len as u128;
    let den = EPSILON_DENOM * symbol_len as u128;
    (num.div_ceil(den)) as usize
}

/// One coded symbol: an index and `ell_sym` value bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub index: u64,
    pub value: Vec<u8>,
}

/// Outcome of a decode attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Unique reconstruction; for honestly generated symbols this is the
    /// original message.
    Success(Message),
    /// Not decodable from the given set.
    Failure {
        /// Rank the coefficient matrix reached.
        rank: usize,
        /// True when the symbol values contradict each other, which cannot
        /// happen for symbols produced by one honest encoder.
        inconsistent: bool,
    },
}

impl DecodeOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, DecodeOutcome::Success(_))
    }

    pub fn message(&self) -> Option<&Message> {
        match self {
            DecodeOutcome::Success(m) => Some(m),
            DecodeOutcome::Failure { .. } => None,
        }
    }
}

/// Deterministic coefficient row for symbol `index`: one GF(2^8)
/// coefficient per source block, expanded from
/// `H("SEDNA/SYM" || ell_sym:u32be || blocks:u64be || index:u64be)`.
pub fn coefficient_row(params: &RatelessParams, index: u64) -> Vec<u8> {
    let seed = hash_parts(&[
        domain::SYMBOL,
        &(params.symbol_len as u32).to_be_bytes(),
        &(params.source_blocks as u64).to_be_bytes(),
        &index.to_be_bytes(),
    ]);
    let mut row = Vec::with_capacity(params.source_blocks);
    let mut counter: u32 = 0;
    while row.len() < params.source_blocks {
        let chunk = hash_parts(&[seed.as_bytes(), &counter.to_be_bytes()]);
        let take = (params.source_blocks - row.len()).min(32);
        row.extend_from_slice(&chunk.as_bytes()[..take]);
        counter += 1;
    }
    row
}

/// Generate symbol `index` for `message`: the coefficient-weighted sum of
/// the zero-padded source blocks. Deterministic in `(message, index,
/// params)`.
pub fn rateless_symbol(message: &Message, index: u64, params: &RatelessParams) -> Symbol {
    assert_eq!(
        message.len(),
        params.message_len,
        "params were built for a different message length"
    );
    let row = coefficient_row(params, index);
    let mut value = vec![0u8; params.symbol_len];
    for (block, &coeff) in message.bytes().chunks(params.symbol_len).zip(row.iter()) {
        // The final partial block only touches a prefix of the value; the
        // implicit zero padding contributes nothing.
        gf256::axpy(&mut value[..block.len()], coeff, block);
    }
    Symbol { index, value }
}

/// Decode from a set of symbols with distinct indices.
///
/// Order-independent: duplicated indices keep their first occurrence, then
/// rows are processed in index order. Succeeds iff the coefficient rows
/// reach rank `source_blocks`; the recovered blocks are concatenated and
/// truncated to `message_len`.
pub fn rateless_decode(symbols: &[Symbol], params: &RatelessParams) -> DecodeOutcome {
    let mut by_index = std::collections::BTreeMap::new();
    for sym in symbols {
        assert_eq!(sym.value.len(), params.symbol_len, "symbol length mismatch");
        by_index
            .entry(sym.index)
            .or_insert_with(|| sym.value.clone());
    }
    let coeffs: Vec<Vec<u8>> = by_index
        .keys()
        .map(|&j| coefficient_row(params, j))
        .collect();
    let values: Vec<Vec<u8>> = by_index.into_values().collect();

    let report = gf256::solve(coeffs, values, params.source_blocks);
    if report.inconsistent {
        return DecodeOutcome::Failure {
            rank: report.rank,
            inconsistent: true,
        };
    }
    match report.solution {
        Some(blocks) => {
            let mut bytes = Vec::with_capacity(params.source_blocks * params.symbol_len);
            for block in blocks {
                bytes.extend_from_slice(&block);
            }
            bytes.truncate(params.message_len);
            DecodeOutcome::Success(Message { bytes })
        }
        None => DecodeOutcome::Failure {
            rank: report.rank,
            inconsistent: false,
        },
    }
}

/// Rank of the coefficient matrix spanned by the given symbols' indices.
///
/// This is exactly how much of the message the symbols determine: the
/// solution space of consistent messages has dimension
/// `source_blocks - rank`, so fewer than `source_blocks` independent
/// symbols always leave source blocks undetermined.
pub fn symbol_rank(symbols: &[Symbol], params: &RatelessParams) -> usize {
    let indices: std::collections::BTreeSet<u64> = symbols.iter().map(|s| s.index).collect();
    rank_of_indices(indices.iter().copied(), params, &mut |p, j| {
        coefficient_row(p, j)
    })
}

fn rank_of_indices(
    indices: impl Iterator<Item = u64>,
    params: &RatelessParams,
    row_fn: &mut dyn FnMut(&RatelessParams, u64) -> Vec<u8>,
) -> usize {
    let mut rows: Vec<Vec<u8>> = indices.map(|j| row_fn(params, j)).collect();
    gf256::rank(&mut rows, params.source_blocks)
}

/// The naive strategy's "encoder": an identity copy of the message.
pub fn naive_package(message: &Message) -> Vec<u8> {
    message.bytes().to_vec()
}

/// Result of an empirical decode-failure measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeltaEstimate {
    pub trials: u64,
    pub failures: u64,
}

impl DeltaEstimate {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }
}

/// Measure the residual decode-failure rate of the rateless code: the
/// fraction of trials in which `decode_threshold` symbols at uniformly
/// sampled distinct indices fail to reach full rank.
///
/// Deterministic for a fixed seed; each trial derives its own stream, so the
/// estimate is independent of evaluation order.
pub fn estimate_delta_code(params: &RatelessParams, trials: u64, seed: u64) -> DeltaEstimate {
    assert!(trials >= 1, "at least one trial required");
    let mut failures = 0u64;
    for trial in 0..trials {
        let mut rng = DeterministicRng::from_seed(derive_seed(seed, trial));
        let mut indices = std::collections::BTreeSet::new();
        while indices.len() < params.decode_threshold {
            indices.insert(rng.below(1 << 48));
        }
        let mut rows: Vec<Vec<u8>> = indices
            .iter()
            .map(|&j| coefficient_row(params, j))
            .collect();
        if gf256::rank(&mut rows, params.source_blocks) < params.source_blocks {
            failures += 1;
        }
    }
    DeltaEstimate { trials, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_message(rng: &mut DeterministicRng, len: usize) -> Message {
        let mut bytes = vec![0u8; len];
        rng.fill_bytes(&mut bytes);
        Message::new(bytes).unwrap()
    }

    #[test]
    fn decode_threshold_matches_exact_formula() {
        // 1.05 * 4096 / 256 = 16.8 -> 17
        let p = RatelessParams::new(4096, 256, 0.05).unwrap();
        assert_eq!(p.decode_threshold, 17);
        assert_eq!(p.source_blocks, 16);
        // Exactly-integer products must not be bumped by float noise:
        // 1.05 * 5120 / 256 = 21 exactly.
        let p = RatelessParams::new(5120, 256, 0.05).unwrap();
        assert_eq!(p.decode_threshold, 21);
    }

    #[test]
    fn symbol_generation_is_deterministic() {
        let mut rng = DeterministicRng::from_seed(21);
        let msg = random_message(&mut rng, 1000);
        let params = RatelessParams::new(1000, 128, 0.05).unwrap();
        assert_eq!(
            rateless_symbol(&msg, 7, &params),
            rateless_symbol(&msg, 7, &params)
        );
    }

    #[test]
    fn single_block_symbol_is_scalar_multiple() {
        // S <= ell_sym: one source block, symbol = c * block.
        let mut rng = DeterministicRng::from_seed(22);
        let msg = random_message(&mut rng, 100);
        let params = RatelessParams::new(100, 128, 0.05).unwrap();
        assert_eq!(params.source_blocks, 1);
        for j in 0..20u64 {
            let c = coefficient_row(&params, j)[0];
            let sym = rateless_symbol(&msg, j, &params);
            let mut expected = vec![0u8; 128];
            for (i, &b) in msg.bytes().iter().enumerate() {
                expected[i] = gf256::mul(c, b);
            }
            assert_eq!(sym.value, expected, "index {j}");
        }
    }

    #[test]
    fn coefficient_rows_differ_across_indices() {
        let params = RatelessParams::new(4096, 256, 0.05).unwrap();
        let rows: Vec<Vec<u8>> = (0..100).map(|j| coefficient_row(&params, j)).collect();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                assert_ne!(rows[i], rows[j], "rows {i} and {j} collide");
            }
        }
    }

    #[test]
    fn decode_recovers_message_from_threshold_symbols() {
        let mut rng = DeterministicRng::from_seed(23);
        for len in [33usize, 256, 1000, 4096, 5000] {
            let msg = random_message(&mut rng, len);
            let params = RatelessParams::new(len, 256, 0.05).unwrap();
            let symbols: Vec<Symbol> = (0..params.decode_threshold as u64)
                .map(|j| rateless_symbol(&msg, j, &params))
                .collect();
            match rateless_decode(&symbols, &params) {
                DecodeOutcome::Success(m) => assert_eq!(m, msg, "len {len}"),
                other => panic!("decode failed for len {len}: {other:?}"),
            }
        }
    }

    #[test]
    fn decode_fails_below_source_block_count() {
        let mut rng = DeterministicRng::from_seed(24);
        let msg = random_message(&mut rng, 4096);
        let params = RatelessParams::new(4096, 256, 0.05).unwrap();
        let symbols: Vec<Symbol> = (0..params.source_blocks as u64 - 1)
            .map(|j| rateless_symbol(&msg, j, &params))
            .collect();
        match rateless_decode(&symbols, &params) {
            DecodeOutcome::Failure { rank, inconsistent } => {
                assert!(rank < params.source_blocks);
                assert!(!inconsistent);
            }
            DecodeOutcome::Success(_) => panic!("must not decode below block count"),
        }
    }

    #[test]
    fn disjoint_symbol_sets_decode_identically() {
        let mut rng = DeterministicRng::from_seed(25);
        let msg = random_message(&mut rng, 2048);
        let params = RatelessParams::new(2048, 256, 0.05).unwrap();
        let k = params.decode_threshold as u64;
        let a: Vec<Symbol> = (0..k).map(|j| rateless_symbol(&msg, j, &params)).collect();
        let b: Vec<Symbol> = (k..2 * k)
            .map(|j| rateless_symbol(&msg, j, &params))
            .collect();
        let da = rateless_decode(&a, &params);
        let db = rateless_decode(&b, &params);
        if let (DecodeOutcome::Success(ma), DecodeOutcome::Success(mb)) = (&da, &db) {
            assert_eq!(ma, mb);
            assert_eq!(*ma, msg);
        } else {
            panic!("both honest K-sets should decode here: {da:?} {db:?}");
        }
    }

    #[test]
    fn inconsistent_symbols_are_flagged() {
        let mut rng = DeterministicRng::from_seed(26);
        let msg = random_message(&mut rng, 1024);
        let params = RatelessParams::new(1024, 128, 0.05).unwrap();
        let mut symbols: Vec<Symbol> = (0..params.decode_threshold as u64 + 4)
            .map(|j| rateless_symbol(&msg, j, &params))
            .collect();
        // Corrupt one value: the over-determined system now contradicts.
        symbols[0].value[0] ^= 0xA5;
        match rateless_decode(&symbols, &params) {
            DecodeOutcome::Failure { inconsistent, .. } => assert!(inconsistent),
            DecodeOutcome::Success(m) => {
                panic!("corruption went unnoticed: {:?}", m.len())
            }
        }
    }

    #[test]
    fn rank_of_empty_and_single_sets() {
        let mut rng = DeterministicRng::from_seed(27);
        let msg = random_message(&mut rng, 2048);
        let params = RatelessParams::new(2048, 256, 0.05).unwrap();
        assert_eq!(symbol_rank(&[], &params), 0);
        let one = vec![rateless_symbol(&msg, 3, &params)];
        assert_eq!(symbol_rank(&one, &params), 1);
    }

    #[test]
    fn rank_bounds_and_solution_space_dimension() {
        let mut rng = DeterministicRng::from_seed(28);
        let msg = random_message(&mut rng, 4096);
        let params = RatelessParams::new(4096, 256, 0.05).unwrap();
        let blocks = params.source_blocks;
        for r in [1usize, 5, 10, blocks - 1] {
            let symbols: Vec<Symbol> = (0..r as u64)
                .map(|j| rateless_symbol(&msg, j, &params))
                .collect();
            let rank = symbol_rank(&symbols, &params);
            assert!(rank <= r.min(blocks));
            let undetermined = blocks - rank;
            assert!(undetermined >= blocks - r);
            assert!(!rateless_decode(&symbols, &params).is_success());
        }
    }

    #[test]
    fn naive_package_is_identity() {
        let mut rng = DeterministicRng::from_seed(29);
        let msg = random_message(&mut rng, 500);
        let packed = naive_package(&msg);
        assert_eq!(packed, msg.bytes());
        assert_eq!(packed.len(), 500);
    }

    #[test]
    fn delta_estimate_is_seed_deterministic() {
        let params = RatelessParams::with_threshold(20 * 64, 64, 20).unwrap();
        let a = estimate_delta_code(&params, 500, 99);
        let b = estimate_delta_code(&params, 500, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn delta_at_zero_margin_matches_random_matrix_singularity() {
        // With K == source_blocks the failure rate is the probability that
        // a square pseudo-random GF(256) matrix is singular:
        // 1 - prod_{i=1..b} (1 - 256^-i) ~= 0.003922 at b = 20.
        let blocks = 20usize;
        let params = RatelessParams::with_threshold(blocks * 64, 64, blocks).unwrap();
        let trials = 100_000u64;
        let est = estimate_delta_code(&params, trials, 0x5EDA);
        let mut analytic = 1.0f64;
        for i in 1..=blocks as i32 {
            analytic *= 1.0 - 256f64.powi(-i);
        }
        let analytic_failure = 1.0 - analytic;
        let se = (analytic_failure * (1.0 - analytic_failure) / trials as f64).sqrt();
        assert!(
            (est.rate() - analytic_failure).abs() <= 3.0 * se + 1e-4,
            "measured {} vs analytic {analytic_failure}",
            est.rate()
        );
    }

    #[test]
    fn decode_failure_rate_is_bounded_by_the_estimator() {
        // Full decodes of 10^4 random K-index sets at the default geometry
        // (S = 4096, ell = 256, eps = 0.05 => K = 17 over 16 blocks) fail no
        // more often than the estimator's measurement of the same geometry
        // allows. Decodes that do succeed must be exact.
        let mut rng = DeterministicRng::from_seed(0xDE0);
        let msg = random_message(&mut rng, 4096);
        let params = RatelessParams::new(4096, 256, 0.05).unwrap();
        let sets = 10_000u64;
        let mut failures = 0u64;
        for _ in 0..sets {
            let mut idx = std::collections::BTreeSet::new();
            while idx.len() < params.decode_threshold {
                idx.insert(rng.below(1 << 44));
            }
            let symbols: Vec<Symbol> = idx
                .iter()
                .map(|&j| rateless_symbol(&msg, j, &params))
                .collect();
            match rateless_decode(&symbols, &params) {
                DecodeOutcome::Success(got) => assert_eq!(got, msg),
                DecodeOutcome::Failure { inconsistent, .. } => {
                    assert!(!inconsistent);
                    failures += 1;
                }
            }
        }
        let estimated = estimate_delta_code(&params, 100_000, 0x5EDA_0002).rate();
        let slack = 3.0 * ((estimated.max(1e-5)) / sets as f64).sqrt();
        assert!(
            failures as f64 / sets as f64 <= estimated + slack,
            "decode failures {failures}/{sets} exceed estimator rate {estimated}"
        );
    }

    #[test]
    fn monotone_supersets_preserve_decode_output() {
        let mut rng = DeterministicRng::from_seed(30);
        let msg = random_message(&mut rng, 3000);
        let params = RatelessParams::new(3000, 256, 0.05).unwrap();
        let k = params.decode_threshold as u64;
        let small: Vec<Symbol> = (0..k).map(|j| rateless_symbol(&msg, j, &params)).collect();
        let mut big = small.clone();
        big.extend((k..k + 6).map(|j| rateless_symbol(&msg, j, &params)));
        let d_small = rateless_decode(&small, &params);
        let d_big = rateless_decode(&big, &params);
        if d_small.is_success() {
            assert_eq!(d_small, d_big);
        }
    }
}
