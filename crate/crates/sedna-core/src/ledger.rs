//! Deterministic slot-based simulation of the vector-commit ledger.
//!
//! Every slot finalizes an ordered n-vector of blocks, one per lane. The
//! adversary owns a fixed set of lanes for the whole run (sampled once per
//! run); a censored lane silently drops the monitored sender's bundles and
//! otherwise behaves normally. Slots are synchronous: whatever sits in an
//! honest lane's queue is finalized in that slot.
//!
//! Everything downstream of finality is a pure function of the ledger bytes:
//!
//! * [`scan_dedup`] resolves the unique value for every `(txid, index)` pair
//!   by first occurrence in (height, lane, intra-block position) order;
//! * [`inclusion_height`] finds the first height where the deduplicated
//!   symbol set decodes and the commitment opening verifies;
//! * [`execution_order`] sorts included transactions by
//!   `(inclusion height, txid)`.
//!
//! Duplicates never change the symbol set but always count toward published
//! bytes: deduplication affects decoding, not fee accounting.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::codec::{self, mds_decode, Message, Symbol};
use crate::crypto::{hash, verify_opening, Digest};
use crate::gf256;
use crate::protocol::{
    build_transaction, sample_lanes, verify_bundle, Bundle, FeePolicy, PublicHeader, SenderState,
    Strategy, StrategyConfig,
};
use crate::rng::{derive_seed, DeterministicRng};
use crate::wire;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum LedgerError {
    #[error("bundle failed verification and was rejected at enqueue")]
    RejectedBundle,
    #[error("lane {0} outside 1..={1}")]
    UnknownLane(u16, u16),
}

/// One lane's finalized block for one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub lane: u16,
    pub slot: u64,
    pub bundles: Vec<Bundle>,
}

/// Append-only ledger: a vector of slot vectors, each holding exactly one
/// block per lane (possibly empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalizedLedger {
    n: u16,
    slots: Vec<Vec<Block>>,
}

impl FinalizedLedger {
    pub fn new(n: u16) -> Self {
        assert!(n >= 1);
        Self {
            n,
            slots: Vec::new(),
        }
    }

    pub fn lane_count(&self) -> u16 {
        self.n
    }

    pub fn height(&self) -> u64 {
        self.slots.len() as u64
    }

    pub fn slots(&self) -> &[Vec<Block>] {
        &self.slots
    }

    /// Blocks of slot `h` (1-based height).
    pub fn slot(&self, h: u64) -> &[Block] {
        &self.slots[h as usize - 1]
    }

    pub(crate) fn append_slot_unchecked(&mut self, blocks: Vec<Block>) {
        debug_assert_eq!(blocks.len(), self.n as usize);
        debug_assert!(blocks
            .iter()
            .enumerate()
            .all(|(i, b)| b.lane == i as u16 + 1));
        self.slots.push(blocks);
    }
}

/// Static adversary: a fixed censored lane set, optionally collecting the
/// symbols addressed to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryModel {
    pub censored: BTreeSet<u16>,
    pub collects_symbols: bool,
}

impl AdversaryModel {
    pub fn none() -> Self {
        Self {
            censored: BTreeSet::new(),
            collects_symbols: false,
        }
    }

    /// Sample a censored set of size `c_e` uniformly from `{1..n}`.
    pub fn sample(n: u16, c_e: u16, collects_symbols: bool, rng: &mut DeterministicRng) -> Self {
        assert!(c_e <= n);
        Self {
            censored: rng.sample_lanes(n, c_e).into_iter().collect(),
            collects_symbols,
        }
    }

    pub fn censors(&self, lane: u16) -> bool {
        self.censored.contains(&lane)
    }
}

/// Per-lane mempool queues feeding the next slot.
#[derive(Debug, Clone)]
pub struct LaneQueues {
    n: u16,
    queues: Vec<Vec<Bundle>>,
}

impl LaneQueues {
    pub fn new(n: u16) -> Self {
        Self {
            n,
            queues: vec![Vec::new(); n as usize],
        }
    }

    /// Admit a bundle after full verification. Invalid bundles never reach
    /// a block.
    pub fn enqueue(&mut self, bundle: Bundle, policy: &FeePolicy) -> Result<(), LedgerError> {
        if !verify_bundle(&bundle, policy) {
            return Err(LedgerError::RejectedBundle);
        }
        self.enqueue_prechecked(bundle)
    }

    /// Admit a bundle the caller has already verified. The Monte Carlo
    /// harness uses this to skip re-verifying a byte-identical bundle it
    /// checked in an earlier trial; verification is pure, so the memoized
    /// result is the real one.
    pub fn enqueue_prechecked(&mut self, bundle: Bundle) -> Result<(), LedgerError> {
        if bundle.lane == 0 || bundle.lane > self.n {
            return Err(LedgerError::UnknownLane(bundle.lane, self.n));
        }
        self.queues[bundle.lane as usize - 1].push(bundle);
        Ok(())
    }
}

/// What one slot finalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotReceipt {
    pub slot: u64,
    pub finalized_bundles: usize,
    pub finalized_bytes: u64,
    pub censored_bundles: usize,
}

/// Advance one slot: honest lanes finalize their queued bundles, censored
/// lanes drain theirs without inclusion. Blocks are appended in lane order.
pub fn run_slot(
    ledger: &mut FinalizedLedger,
    queues: &mut LaneQueues,
    adversary: &AdversaryModel,
) -> SlotReceipt {
    assert_eq!(ledger.n, queues.n);
    let slot = ledger.height() + 1;
    let mut receipt = SlotReceipt {
        slot,
        finalized_bundles: 0,
        finalized_bytes: 0,
        censored_bundles: 0,
    };
    let mut blocks = Vec::with_capacity(ledger.n as usize);
    for lane in 1..=ledger.n {
        let pending = std::mem::take(&mut queues.queues[lane as usize - 1]);
        if adversary.censors(lane) {
            receipt.censored_bundles += pending.len();
            blocks.push(Block {
                lane,
                slot,
                bundles: Vec::new(),
            });
            continue;
        }
        for b in &pending {
            let value_len = b.symbols.first().map_or(0, |s| s.value.len());
            receipt.finalized_bytes += wire::bundle_wire_len(b.symbols.len(), value_len) as u64;
        }
        receipt.finalized_bundles += pending.len();
        blocks.push(Block {
            lane,
            slot,
            bundles: pending,
        });
    }
    ledger.append_slot_unchecked(blocks);
    receipt
}

/// First finalized occurrence of a `(txid, index)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DedupEntry {
    pub value: Vec<u8>,
    pub slot: u64,
    pub lane: u16,
    pub position: u32,
}

/// Deduplicated symbol view for one transaction: index -> first occurrence
/// in (height, lane, intra-block position) scan order. Later occurrences
/// never alter an entry, so the view is monotone in height.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DedupView {
    entries: BTreeMap<u64, DedupEntry>,
}

impl DedupView {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: u64) -> Option<&DedupEntry> {
        self.entries.get(&index)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&u64, &DedupEntry)> {
        self.entries.iter()
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        self.entries
            .iter()
            .map(|(&index, e)| Symbol {
                index,
                value: e.value.clone(),
            })
            .collect()
    }

    fn absorb_block(&mut self, block: &Block, txid: &Digest) {
        for (pos, bundle) in block.bundles.iter().enumerate() {
            if bundle.txid != *txid {
                continue;
            }
            for sym in &bundle.symbols {
                self.entries.entry(sym.index).or_insert_with(|| DedupEntry {
                    value: sym.value.clone(),
                    slot: block.slot,
                    lane: block.lane,
                    position: pos as u32,
                });
            }
        }
    }

    fn absorb_slot(&mut self, blocks: &[Block], txid: &Digest) {
        for block in blocks {
            self.absorb_block(block, txid);
        }
    }
}

/// Deduplicated symbol set `X_txid(h)`: all first-occurrence pairs up to and
/// including height `h`.
pub fn scan_dedup(ledger: &FinalizedLedger, txid: &Digest, h: u64) -> DedupView {
    assert!(h <= ledger.height(), "height beyond finalized prefix");
    let mut view = DedupView::default();
    for slot in &ledger.slots[..h as usize] {
        view.absorb_slot(slot, txid);
    }
    view
}

/// A transaction that reached inclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionRecord {
    pub txid: Digest,
    /// Minimal height at which decoding succeeded and the opening verified.
    pub height: u64,
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InclusionOutcome {
    Included(InclusionRecord),
    /// Decoding produced a message whose commitment opening failed, or the
    /// symbol set contradicts itself. The transaction is dead; its bytes
    /// stay charged.
    DiscardedInvalid {
        detected_at: u64,
    },
    NotIncluded,
}

impl InclusionOutcome {
    pub fn included(&self) -> Option<&InclusionRecord> {
        match self {
            InclusionOutcome::Included(r) => Some(r),
            _ => None,
        }
    }
}

/// Memoized rateless coefficient rows, shared across decode attempts (and
/// across Monte Carlo trials of one configuration).
#[derive(Debug, Default)]
pub struct RowCache {
    rows: HashMap<u64, Vec<u8>>,
}

impl RowCache {
    fn row(&mut self, params: &codec::RatelessParams, index: u64) -> Vec<u8> {
        self.rows
            .entry(index)
            .or_insert_with(|| codec::coefficient_row(params, index))
            .clone()
    }
}

enum Attempt {
    Included(Vec<u8>),
    Discard,
    NotYet,
}

/// Incremental decode-to-include tracking for one transaction. Feeding it
/// finalized slots in order reproduces exactly what a ledger rescan would
/// conclude; the simulator and [`inclusion_height`] share this path.
struct InclusionTracker<'a> {
    txid: Digest,
    header: &'a PublicHeader,
    strategy: &'a Strategy,
    view: DedupView,
    last_attempt_size: usize,
    /// Naive only: value hashes already rejected by the opening check.
    naive_rejected: HashSet<Digest>,
}

impl<'a> InclusionTracker<'a> {
    fn new(txid: Digest, header: &'a PublicHeader, strategy: &'a Strategy) -> Self {
        Self {
            txid,
            header,
            strategy,
            view: DedupView::default(),
            last_attempt_size: 0,
            naive_rejected: HashSet::new(),
        }
    }

    /// Absorb one finalized slot and, when the symbol set grew past the
    /// decode threshold, attempt decode plus opening verification.
    fn absorb_slot(&mut self, blocks: &[Block], rows: &mut RowCache) -> Attempt {
        if let Strategy::Naive = self.strategy {
            return self.naive_scan(blocks);
        }
        self.view.absorb_slot(blocks, &self.txid);
        let eligible = self.eligible_symbols();
        if eligible.len() < self.strategy.decode_threshold()
            || eligible.len() == self.last_attempt_size
        {
            return Attempt::NotYet;
        }
        self.last_attempt_size = eligible.len();
        match self.strategy {
            Strategy::Mds(params) => {
                let message = mds_decode(&eligible, params)
                    .expect("eligible share set was pre-filtered to k distinct valid shares");
                self.check_opening(&message)
            }
            Strategy::Rateless { params, .. } => {
                let coeffs: Vec<Vec<u8>> =
                    eligible.iter().map(|s| rows.row(params, s.index)).collect();
                let values: Vec<Vec<u8>> = eligible.into_iter().map(|s| s.value).collect();
                let report = gf256::solve(coeffs, values, params.source_blocks);
                if report.inconsistent {
                    return Attempt::Discard;
                }
                match report.solution {
                    Some(blocks_out) => {
                        let mut bytes =
                            Vec::with_capacity(params.source_blocks * params.symbol_len);
                        for b in blocks_out {
                            bytes.extend_from_slice(&b);
                        }
                        bytes.truncate(params.message_len);
                        let message = Message::new(bytes).expect("decoded message is non-empty");
                        self.check_opening(&message)
                    }
                    None => Attempt::NotYet,
                }
            }
            Strategy::Naive => unreachable!(),
        }
    }

    /// Symbols that can participate in a decode: well-formed values for the
    /// variant's geometry. A malicious sender can sign anything; garbage
    /// shapes simply never count toward the threshold.
    fn eligible_symbols(&self) -> Vec<Symbol> {
        match self.strategy {
            Strategy::Naive => unreachable!(),
            Strategy::Mds(params) => self
                .view
                .entries()
                .filter(|(&index, e)| {
                    index < params.shares_total as u64 && e.value.len() == params.share_len
                })
                .map(|(&index, e)| Symbol {
                    index,
                    value: e.value.clone(),
                })
                .take(params.shares_needed as usize)
                .collect(),
            Strategy::Rateless { params, .. } => self
                .view
                .entries()
                .filter(|(_, e)| e.value.len() == params.symbol_len)
                .map(|(&index, e)| Symbol {
                    index,
                    value: e.value.clone(),
                })
                .collect(),
        }
    }

    /// Naive inclusion: the transaction lands at the first height where any
    /// finalized copy's opening verifies.
    fn naive_scan(&mut self, blocks: &[Block]) -> Attempt {
        for block in blocks {
            for bundle in &block.bundles {
                if bundle.txid != self.txid {
                    continue;
                }
                for sym in &bundle.symbols {
                    let value_id = hash(&sym.value);
                    if self.naive_rejected.contains(&value_id) {
                        continue;
                    }
                    if let Ok(message) = Message::new(sym.value.clone()) {
                        if let Attempt::Included(payload) = self.check_opening(&message) {
                            return Attempt::Included(payload);
                        }
                    }
                    self.naive_rejected.insert(value_id);
                }
            }
        }
        Attempt::NotYet
    }

    fn check_opening(&self, message: &Message) -> Attempt {
        let Some((sigma, payload)) = message.split_sigma() else {
            return Attempt::Discard;
        };
        if verify_opening(&self.header.commitment, sigma, payload) {
            Attempt::Included(payload.to_vec())
        } else {
            Attempt::Discard
        }
    }
}

/// First height at which the transaction decodes and its commitment opening
/// verifies, scanning the finalized ledger from the start.
pub fn inclusion_height(
    ledger: &FinalizedLedger,
    txid: &Digest,
    header: &PublicHeader,
    strategy: &Strategy,
) -> InclusionOutcome {
    let mut rows = RowCache::default();
    let mut tracker = InclusionTracker::new(*txid, header, strategy);
    for (i, slot) in ledger.slots.iter().enumerate() {
        let h = i as u64 + 1;
        match tracker.absorb_slot(slot, &mut rows) {
            Attempt::Included(payload) => {
                return InclusionOutcome::Included(InclusionRecord {
                    txid: *txid,
                    height: h,
                    payload,
                })
            }
            Attempt::Discard => return InclusionOutcome::DiscardedInvalid { detected_at: h },
            Attempt::NotYet => {}
        }
    }
    InclusionOutcome::NotIncluded
}

/// Deterministic execution order: included transactions sorted
/// lexicographically by `(inclusion height, txid)`, with bytewise id
/// comparison breaking height ties.
pub fn execution_order(
    ledger: &FinalizedLedger,
    tracked: &[(Digest, PublicHeader, Strategy)],
) -> Vec<InclusionRecord> {
    let mut included: Vec<InclusionRecord> = tracked
        .iter()
        .filter_map(|(txid, header, strategy)| {
            match inclusion_height(ledger, txid, header, strategy) {
                InclusionOutcome::Included(r) => Some(r),
                _ => None,
            }
        })
        .collect();
    included.sort_by_key(|a| (a.height, a.txid));
    included
}

/// Indices the adversary captured in one slot (from bundles addressed to
/// lanes it controls).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotCapture {
    pub slot: u64,
    pub indices: Vec<u64>,
}

/// Earliest slot by which the adversary's cumulative captured set reaches
/// the decode threshold, or `None` if it never does. For the naive variant
/// a single captured copy is the whole payload.
pub fn adversary_early_decode(trace: &[SlotCapture], strategy: &Strategy) -> Option<u64> {
    let threshold = strategy.decode_threshold();
    let mut held: BTreeSet<u64> = BTreeSet::new();
    for capture in trace {
        held.extend(capture.indices.iter().copied());
        if held.len() >= threshold {
            return Some(capture.slot);
        }
    }
    None
}

/// Payload under simulation: either seed-derived random bytes of a given
/// length or caller-supplied bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimPayload {
    Random { len: usize },
    Fixed(Vec<u8>),
}

impl SimPayload {
    pub fn len(&self) -> usize {
        match self {
            SimPayload::Random { len } => *len,
            SimPayload::Fixed(bytes) => bytes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Full simulation configuration for one sender's transaction.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n: u16,
    /// Effective censored lane count; the censored set is sampled once per
    /// run.
    pub c_e: u16,
    /// Whether the adversary records symbols addressed to its lanes.
    pub adversary_collects: bool,
    pub config: StrategyConfig,
    pub payload: SimPayload,
    pub fee_per_byte: u64,
    pub max_slots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimOutcome {
    Included {
        slot: u64,
    },
    /// `max_slots` exhausted without inclusion.
    Censored,
    DiscardedInvalid {
        slot: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub seed: u64,
    pub outcome: SimOutcome,
    pub slots_run: u64,
    /// Bytes of every finalized bundle, duplicates included.
    pub bytes_published: u64,
    /// Earliest slot the adversary held a decodable set, when collecting.
    pub adversary_decode_slot: Option<u64>,
}

impl SimResult {
    pub fn included_slot(&self) -> Option<u64> {
        match self.outcome {
            SimOutcome::Included { slot } => Some(slot),
            _ => None,
        }
    }
}

const TX_STREAM: u64 = 0xDEA1;
const ADV_STREAM: u64 = 0xADE2;
const LANE_STREAM: u64 = 0x1A4E;
const TRIAL_STREAM_BASE: u64 = 0x7121_0000_0000;

/// Reusable state for running many seeded trials of one configuration:
/// the transaction, signed bundles, verification results, and rateless
/// coefficient rows are all memoized, since they are pure functions of
/// their keys. Trial outcomes are identical to fresh runs.
pub struct SimHarness {
    cfg: SimConfig,
    sender: SenderState,
    bundle_memo: HashMap<(u16, u64), Bundle>,
    verified: HashSet<(u16, u64)>,
    mds_shares: Option<Vec<Symbol>>,
    rows: RowCache,
    policy: FeePolicy,
}

impl SimHarness {
    /// Build the harness; the transaction identity derives from `seed`.
    pub fn new(cfg: SimConfig, seed: u64) -> Self {
        let mut tx_rng = DeterministicRng::from_seed(derive_seed(seed, TX_STREAM));
        let keypair = crate::crypto::KeyPair::from_rng(&mut tx_rng);
        let payload = match &cfg.payload {
            SimPayload::Fixed(bytes) => bytes.clone(),
            SimPayload::Random { len } => {
                let mut p = vec![0u8; *len];
                tx_rng.fill_bytes(&mut p);
                p
            }
        };
        // Budget covers any number of slots of this run's bundle size.
        let sender = build_transaction(
            &payload,
            cfg.fee_per_byte,
            u64::MAX,
            0,
            &keypair,
            &mut tx_rng,
        );
        Self {
            cfg,
            sender,
            bundle_memo: HashMap::new(),
            verified: HashSet::new(),
            mds_shares: None,
            rows: RowCache::default(),
            policy: FeePolicy::default(),
        }
    }

    pub fn transaction_id(&self) -> Digest {
        self.sender.transaction.txid
    }

    /// The signed bundle a fresh sender would address to `lane` with the
    /// cursor at `start`. Pure in `(lane, start)`, hence memoizable.
    fn bundle(&mut self, lane: u16, start: u64) -> Bundle {
        if let Some(b) = self.bundle_memo.get(&(lane, start)) {
            return b.clone();
        }
        let tx = &self.sender.transaction;
        let symbols: Vec<Symbol> = match &self.cfg.config.strategy {
            Strategy::Naive => vec![Symbol {
                index: 0,
                value: codec::naive_package(&tx.message),
            }],
            Strategy::Mds(params) => {
                let shares = self
                    .mds_shares
                    .get_or_insert_with(|| codec::mds_encode(&tx.message, params));
                let share_index = start % params.shares_total as u64;
                vec![shares[share_index as usize].clone()]
            }
            Strategy::Rateless {
                params,
                symbols_per_bundle,
            } => (start..start + *symbols_per_bundle as u64)
                .map(|j| codec::rateless_symbol(&tx.message, j, params))
                .collect(),
        };
        let bundle = Bundle::build_signed(self.sender.keypair(), tx.header, tx.txid, lane, symbols);
        self.bundle_memo.insert((lane, start), bundle.clone());
        bundle
    }

    /// One full protocol run under this harness's transaction.
    pub fn run(&mut self, seed: u64) -> (SimResult, FinalizedLedger) {
        let cfg = self.cfg.clone();
        let m = cfg.config.lanes;
        let s = cfg.config.strategy.symbols_per_bundle() as u64;
        let per_slot_indices = match cfg.config.strategy {
            Strategy::Naive => 0,
            Strategy::Mds(_) => m as u64,
            Strategy::Rateless { .. } => m as u64 * s,
        };

        let base = DeterministicRng::from_seed(seed);
        let adversary = AdversaryModel::sample(
            cfg.n,
            cfg.c_e,
            cfg.adversary_collects,
            &mut base.derive(ADV_STREAM),
        );
        let mut lane_rng = base.derive(LANE_STREAM);

        let tx = self.sender.transaction.clone();
        let mut tracker = InclusionTracker::new(tx.txid, &tx.header, &cfg.config.strategy);
        let mut ledger = FinalizedLedger::new(cfg.n);
        let mut queues = LaneQueues::new(cfg.n);
        let mut trace: Vec<SlotCapture> = Vec::new();
        let mut bytes_published = 0u64;
        let mut cursor = 0u64;
        let mut outcome = SimOutcome::Censored;

        for slot in 1..=cfg.max_slots {
            let lanes = sample_lanes(cfg.n, m, &mut lane_rng).expect("validated fanout");
            let mut capture = SlotCapture {
                slot,
                indices: Vec::new(),
            };
            for (r, &lane) in lanes.iter().enumerate() {
                let start = match cfg.config.strategy {
                    Strategy::Naive => 0,
                    Strategy::Mds(_) => cursor + r as u64,
                    Strategy::Rateless { .. } => cursor + r as u64 * s,
                };
                let bundle = self.bundle(lane, start);
                if adversary.collects_symbols && adversary.censors(lane) {
                    capture.indices.extend(bundle.indices());
                }
                if self.verified.contains(&(lane, start)) {
                    queues.enqueue_prechecked(bundle).expect("lane in range");
                } else {
                    queues
                        .enqueue(bundle, &self.policy)
                        .expect("honest bundles verify");
                    self.verified.insert((lane, start));
                }
            }
            cursor += per_slot_indices;
            if adversary.collects_symbols && !capture.indices.is_empty() {
                trace.push(capture);
            }

            let receipt = run_slot(&mut ledger, &mut queues, &adversary);
            bytes_published += receipt.finalized_bytes;

            match tracker.absorb_slot(ledger.slot(slot), &mut self.rows) {
                Attempt::Included(_) => {
                    outcome = SimOutcome::Included { slot };
                    break;
                }
                Attempt::Discard => {
                    outcome = SimOutcome::DiscardedInvalid { slot };
                    break;
                }
                Attempt::NotYet => {}
            }
        }

        let result = SimResult {
            seed,
            outcome,
            slots_run: ledger.height(),
            bytes_published,
            adversary_decode_slot: adversary_early_decode(&trace, &cfg.config.strategy),
        };
        (result, ledger)
    }
}

/// One protocol run: sample a censored set, then per slot sample lanes,
/// build and enqueue bundles, finalize, and check inclusion. Stops at
/// inclusion, at a discard, or after `max_slots`.
pub fn simulate_inclusion(cfg: &SimConfig, seed: u64) -> SimResult {
    simulate_inclusion_with_ledger(cfg, seed).0
}

/// As [`simulate_inclusion`], also returning the finalized ledger for
/// replay and inspection.
pub fn simulate_inclusion_with_ledger(cfg: &SimConfig, seed: u64) -> (SimResult, FinalizedLedger) {
    let mut harness = SimHarness::new(cfg.clone(), seed);
    harness.run(seed)
}

/// Run `trials` independent seeded trials against one memoized harness.
/// Each trial derives its own stream from `(seed, trial index)`, so the
/// sequence is reproducible and order-independent; the transaction identity
/// is shared across trials.
pub fn simulate_many(cfg: &SimConfig, trials: u64, seed: u64) -> Vec<SimResult> {
    let mut harness = SimHarness::new(cfg.clone(), seed);
    (0..trials)
        .map(|t| harness.run(derive_seed(seed, TRIAL_STREAM_BASE + t)).0)
        .collect()
}
