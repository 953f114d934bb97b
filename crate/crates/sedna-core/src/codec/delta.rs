//! Measured residual decode-failure rates for the rateless codec.
//!
//! For a dense random-linear code the failure probability of decoding from
//! exactly K symbols depends (up to a vanishing correction) only on the
//! margin `K - source_blocks`, not on the block count itself, so the table
//! is keyed by margin. The entries below were produced by
//! [`super::estimate_delta_code`] at 20 source blocks with the recorded
//! seed and trial counts; `sedna codec-bench` regenerates them.
//!
//! A margin where the measurement observed zero failures is recorded as
//! zero. The planner consumes these values as-is.

/// Seed used for the frozen measurements below.
pub const DELTA_CODE_MEASUREMENT_SEED: u64 = 0x5EDA_0001;

/// One measured table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCodeEntry {
    /// `decode_threshold - source_blocks`.
    pub margin: u64,
    /// Trials run for this margin.
    pub trials: u64,
    /// Failures observed.
    pub failures: u64,
}

impl DeltaCodeEntry {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }
}

/// Measured at 20 source blocks, symbol length 64, seed
/// [`DELTA_CODE_MEASUREMENT_SEED`], stream = margin.
pub const DELTA_CODE_TABLE: &[DeltaCodeEntry] = &[
    DeltaCodeEntry {
        margin: 0,
        trials: 200_000,
        failures: 805,
    },
    DeltaCodeEntry {
        margin: 1,
        trials: 2_000_000,
        failures: 37,
    },
    DeltaCodeEntry {
        margin: 2,
        trials: 4_000_000,
        failures: 0,
    },
    DeltaCodeEntry {
        margin: 3,
        trials: 1_000_000,
        failures: 0,
    },
];

/// Residual failure rate for a code with the given block count and decode
/// threshold. Margins beyond the table use the last (zero-failure) entry.
pub fn delta_code_lookup(source_blocks: usize, decode_threshold: usize) -> f64 {
    let margin = decode_threshold.saturating_sub(source_blocks) as u64;
    let entry = DELTA_CODE_TABLE
        .iter()
        .find(|e| e.margin == margin)
        .unwrap_or(DELTA_CODE_TABLE.last().expect("table is non-empty"));
    entry.rate()
}
