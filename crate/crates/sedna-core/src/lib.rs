//! Sedna: coded transaction dissemination for multi-proposer chains.
//!
//! In a multi-proposer (MCP) system every validator proposes a block each
//! slot, and consensus finalizes an ordered n-vector of blocks per slot.
//! Reaching many proposers is how a user buys censorship resistance, but
//! naive whole-transaction replication pays for it with an m-fold byte
//! cost and hands the payload to the first adversarial lane it touches.
//!
//! Sedna replaces replication with verifiable coded symbols. The sender
//! commits to the payload, derives `txid = H(H_pre || C)`, encodes
//! `sigma || payload` into small symbols, and delivers signed per-lane
//! bundles with disjoint index sets. A transaction is included at the
//! first height where enough distinct verified symbols sit in finalized
//! history to decode and the commitment opening verifies; execution order
//! is the lexicographic order on `(inclusion height, txid)`, a pure
//! function of the finalized ledger. Before the decode threshold is
//! reached, observed symbols reveal no more than their own bits, which is
//! what keeps the pre-inclusion MEV surface small.
//!
//! The crate provides:
//!
//! * [`crypto`]: digests, hash commitments, deterministic Ed25519
//!   signatures and the domain-separation tags;
//! * [`codec`]: the rateless random-linear fountain over GF(2^8), the
//!   fixed-rate (m, k) share codec, rank accounting, and empirical
//!   decode-failure measurement;
//! * [`protocol`]: transaction construction, lane sampling, bundle
//!   building with disjoint indices, and the validator's four admission
//!   checks;
//! * [`ledger`]: the deterministic slot simulator with adversarial
//!   censoring, per-index deduplication, inclusion heights, execution
//!   order, and adversary early-decode tracking;
//! * [`analysis`]: exact hypergeometric tails, per-slot success and
//!   early-decode probabilities, byte-cost formulas, overhead floors, and
//!   the information-theoretic minimum;
//! * [`planner`]: bandwidth-minimal parameter selection per strategy with
//!   exact search plus conservative closed forms;
//! * [`experiments`]: reproducible CSV emission for the CLI surface.
//!
//! Everything is deterministic given a `u64` seed; no call reaches for an
//! OS entropy source.

pub mod analysis;
pub mod codec;
pub mod crypto;
pub mod experiments;
pub mod gf256;
pub mod ledger;
pub mod planner;
pub mod protocol;
pub mod rng;
pub mod wire;

pub use analysis::{bandwidth_cost, CostBreakdown, CostVariant, HypergeomSpec};
pub use codec::{
    estimate_delta_code, mds_decode, mds_encode, rateless_decode, rateless_symbol, symbol_rank,
    DecodeOutcome, MdsParams, Message, RatelessParams, Symbol,
};
pub use crypto::{Digest, KeyPair, Signature};
pub use ledger::{
    execution_order, inclusion_height, run_slot, scan_dedup, simulate_inclusion, simulate_many,
    AdversaryModel, FinalizedLedger, SimConfig, SimOutcome, SimPayload, SimResult,
};
pub use planner::{
    compare_strategies, exact_min_m, plan_mds, plan_naive, plan_rateless, PlanInputs, PlanResult,
    Variant,
};
pub use protocol::{
    build_transaction, effective_censors, sample_lanes, verify_bundle, Bundle, FeePolicy,
    SenderState, Strategy, StrategyConfig,
};
pub use rng::DeterministicRng;
