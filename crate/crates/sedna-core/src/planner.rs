//! Bandwidth-minimal submission planning.
//!
//! Given the lane count, an assumed censor mass, and a per-slot failure
//! budget, pick the cheapest configuration of each strategy whose
//! single-slot failure probability stays within budget:
//!
//! * naive: the smallest fanout `m` with `P[no honest lane hit] <= delta`;
//! * fixed-rate: the `(m, k)` pair minimizing `m * (M_h + ceil(S/k))`
//!   subject to `P[fewer than k honest lanes] <= delta`, with the share
//!   count capped by the field size;
//! * rateless: the `(m, s, ell_sym)` tuple minimizing
//!   `m * (M_h + s * (M_s + ell_sym))` subject to
//!   `P[fewer than ceil(K/s) honest lanes] <= delta - delta_code`, where
//!   `K = ceil((1+eps) * S / ell_sym)` follows from the symbol size.
//!
//! `exact_min_m` answers the feasibility question by exact hypergeometric
//! tail scan; `closed_form_m` is the conservative Chernoff-style closed
//! form, reported alongside for cross-checking (its ceiling is never below
//! the exact answer).

use crate::analysis::{
    bandwidth_cost, early_decode_prob, hypergeom_tail_ge, CostBreakdown, CostVariant, HypergeomSpec,
};
use crate::codec::{decode_threshold_exact, delta_code_lookup, MDS_MAX_SHARES};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum PlanError {
    #[error("no feasible configuration within the lane budget")]
    Infeasible,
    #[error(
        "failure budget {delta} does not exceed the residual decode failure rate {delta_code}"
    )]
    InfeasibleReliability { delta: f64, delta_code: f64 },
}

/// Planner inputs. `delta_code` overrides the measured table when set.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanInputs {
    pub n: u16,
    pub c_e: u16,
    /// Target per-slot failure probability.
    pub delta: f64,
    /// Residual decode failure budget of the rateless code; `None` means
    /// look the measured value up per candidate geometry.
    pub delta_code: Option<f64>,
    /// Coded message size S in bytes.
    pub payload: u64,
    /// Per-bundle header overhead M_h in bytes.
    pub header_bytes: u64,
    /// Per-symbol metadata M_s in bytes.
    pub symbol_meta_bytes: u64,
    /// Rateless coding overhead.
    pub epsilon: f64,
    /// Candidate symbol sizes.
    pub ell_sym_grid: Vec<u32>,
    /// Largest symbols-per-bundle considered.
    pub s_max: u32,
}

/// Default evaluation parameters: 256 lanes, 12.5% censored, one-in-a-
/// billion failure budget, 200-byte bundle header, 8-byte symbol metadata,
/// 5% coding overhead.
pub const DEFAULT_ELL_SYM_GRID: [u32; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

impl PlanInputs {
    pub fn defaults(payload: u64) -> Self {
        Self {
            n: 256,
            c_e: 32,
            delta: 1e-9,
            delta_code: None,
            payload,
            header_bytes: 200,
            symbol_meta_bytes: 8,
            epsilon: 0.05,
            ell_sym_grid: DEFAULT_ELL_SYM_GRID.to_vec(),
            s_max: 64,
        }
    }

    fn validate(&self) -> Result<(), PlanError> {
        assert!(
            self.delta > 0.0 && self.delta < 1.0,
            "delta must lie strictly between 0 and 1"
        );
        assert!(self.c_e <= self.n, "censor count cannot exceed lane count");
        if self.c_e == self.n {
            // Nothing honest is reachable; every plan degenerates.
            return Err(PlanError::Infeasible);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Naive,
    Mds,
    Rateless,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Naive => "naive",
            Variant::Mds => "mds",
            Variant::Rateless => "rateless",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Variant::Naive),
            "mds" => Ok(Variant::Mds),
            "rateless" => Ok(Variant::Rateless),
            other => Err(format!("unknown variant '{other}'")),
        }
    }
}

/// A planned configuration with its predicted cost and probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub variant: Variant,
    /// Chosen fanout.
    pub lanes: u16,
    /// Fixed-rate reconstruction threshold, when applicable.
    pub shares_needed: Option<u16>,
    /// Rateless symbols per bundle, when applicable.
    pub symbols_per_bundle: Option<u32>,
    /// Rateless symbol size, when applicable.
    pub symbol_len: Option<u32>,
    /// Rateless decode threshold `K`, when applicable.
    pub decode_threshold: Option<u64>,
    /// The exact-search fanout (equals `lanes`).
    pub m_exact: u16,
    /// Conservative closed-form fanout bound for the chosen point.
    pub m_closed_form: f64,
    pub cost: CostBreakdown,
    /// Predicted single-slot success at the chosen point.
    pub success_prob: f64,
    /// Predicted adversary early-decode probability at the chosen point.
    pub early_decode_prob: f64,
    /// True when the field-size share cap changed the fixed-rate optimum.
    pub mds_clamp_bound: bool,
    /// Residual decode failure rate charged against the budget.
    pub delta_code_used: f64,
}

/// Smallest fanout `m` with `P[H < needed] <= delta_eff` for
/// `H ~ Hypergeom(n, n - c_e, m)`.
///
/// Drawing one more lane never removes an honest lane from the sample, so
/// the failure probability is non-increasing in `m` and the boundary can be
/// found by binary search over `[needed, n]`.
pub fn exact_min_m(n: u16, c_e: u16, delta_eff: f64, needed: u64) -> Result<u16, PlanError> {
    assert!(needed >= 1, "at least one honest lane is always required");
    if needed > (n - c_e) as u64 {
        return Err(PlanError::Infeasible);
    }
    let feasible = |m: u16| {
        HypergeomSpec::new(n as u64, (n - c_e) as u64, m as u64).cdf_lt(needed) <= delta_eff
    };
    let mut lo = needed as u16;
    let mut hi = n;
    if !feasible(hi) {
        return Err(PlanError::Infeasible);
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Conservative closed-form fanout bound:
/// `((b + sqrt(b^2 + 4*c_r*k)) / (2*c_r))^2` with
/// `b = sqrt(2*c_r*ln(1/delta_eff))` and `c_r` the honest lane ratio.
pub fn closed_form_m(honest_ratio: f64, delta_eff: f64, needed: u64) -> Result<f64, PlanError> {
    assert!(honest_ratio > 0.0 && honest_ratio <= 1.0);
    assert!(needed >= 1, "callers never ask for zero honest lanes");
    if delta_eff <= 0.0 {
        return Err(PlanError::InfeasibleReliability {
            delta: delta_eff,
            delta_code: 0.0,
        });
    }
    let b = (2.0 * honest_ratio * (1.0 / delta_eff).ln()).sqrt();
    let root = (b * b + 4.0 * honest_ratio * needed as f64).sqrt();
    Ok(((b + root) / (2.0 * honest_ratio)).powi(2))
}

fn success_at(n: u16, c_e: u16, m: u16, needed: u64, delta_code: f64) -> f64 {
    let spec = HypergeomSpec::new(n as u64, (n - c_e) as u64, m as u64);
    (1.0 - delta_code) * hypergeom_tail_ge(&spec, needed)
}

/// Cheapest naive-replication configuration: cost grows strictly with the
/// fanout, so the optimum is the smallest feasible `m`.
pub fn plan_naive(inputs: &PlanInputs) -> Result<PlanResult, PlanError> {
    inputs.validate()?;
    let m = exact_min_m(inputs.n, inputs.c_e, inputs.delta, 1)?;
    let honest_ratio = 1.0 - inputs.c_e as f64 / inputs.n as f64;
    let cost = bandwidth_cost(
        &CostVariant::Naive { lanes: m },
        inputs.payload,
        inputs.header_bytes,
        inputs.symbol_meta_bytes,
    );
    Ok(PlanResult {
        variant: Variant::Naive,
        lanes: m,
        shares_needed: None,
        symbols_per_bundle: None,
        symbol_len: None,
        decode_threshold: None,
        m_exact: m,
        m_closed_form: closed_form_m(honest_ratio, inputs.delta, 1)?,
        cost,
        success_prob: success_at(inputs.n, inputs.c_e, m, 1, 0.0),
        early_decode_prob: early_decode_prob(inputs.n, inputs.c_e, m, 1, 1),
        mds_clamp_bound: false,
        delta_code_used: 0.0,
    })
}

/// Cheapest fixed-rate configuration over `k`, with the share count capped
/// at the field size. Ties prefer the smaller `k`.
pub fn plan_mds(inputs: &PlanInputs) -> Result<PlanResult, PlanError> {
    inputs.validate()?;
    let honest = inputs.n - inputs.c_e;
    let honest_ratio = honest as f64 / inputs.n as f64;
    let mut best: Option<(u64, u16, u16)> = None; // (cost, m, k)
    let mut best_clamped: Option<u64> = None; // cheapest cost lost to the cap
    for k in 1..=honest {
        let Ok(m) = exact_min_m(inputs.n, inputs.c_e, inputs.delta, k as u64) else {
            continue;
        };
        let cost = bandwidth_cost(
            &CostVariant::Mds {
                lanes: m,
                shares_needed: k,
            },
            inputs.payload,
            inputs.header_bytes,
            inputs.symbol_meta_bytes,
        );
        if k > MDS_MAX_SHARES || m > MDS_MAX_SHARES {
            // Feasible by lanes, unreachable over GF(256). Remember the
            // cost so the clamp can be reported when it binds.
            best_clamped = Some(best_clamped.map_or(cost.published, |c| c.min(cost.published)));
            continue;
        }
        let better = match &best {
            None => true,
            Some((c, _, bk)) => cost.published < *c || (cost.published == *c && k < *bk),
        };
        if better {
            best = Some((cost.published, m, k));
        }
    }
    let (best_cost, m, k) = best.ok_or(PlanError::Infeasible)?;
    let clamp_bound = best_clamped.is_some_and(|c| c < best_cost);
    let cost = bandwidth_cost(
        &CostVariant::Mds {
            lanes: m,
            shares_needed: k,
        },
        inputs.payload,
        inputs.header_bytes,
        inputs.symbol_meta_bytes,
    );
    Ok(PlanResult {
        variant: Variant::Mds,
        lanes: m,
        shares_needed: Some(k),
        symbols_per_bundle: None,
        symbol_len: None,
        decode_threshold: None,
        m_exact: m,
        m_closed_form: closed_form_m(honest_ratio, inputs.delta, k as u64)?,
        cost,
        success_prob: success_at(inputs.n, inputs.c_e, m, k as u64, 0.0),
        early_decode_prob: early_decode_prob(inputs.n, inputs.c_e, m, 1, k as u64),
        mds_clamp_bound: clamp_bound,
        delta_code_used: 0.0,
    })
}

/// Epsilon in millionths, matching the codec's exact threshold arithmetic.
fn epsilon_micros(epsilon: f64) -> u64 {
    (epsilon * 1e6).round() as u64
}

/// Cheapest rateless configuration over the symbol-size grid and
/// symbols-per-bundle range. The failure budget charged against the lane
/// constraint is `delta - delta_code` with the residual decode failure rate
/// taken from the measured table (or the explicit override). Ties prefer
/// fewer lanes, then fewer symbols per bundle, then the larger symbol size.
pub fn plan_rateless(inputs: &PlanInputs) -> Result<PlanResult, PlanError> {
    inputs.validate()?;
    let honest_ratio = 1.0 - inputs.c_e as f64 / inputs.n as f64;
    let eps = epsilon_micros(inputs.epsilon);
    assert!(eps > 0, "epsilon must be at least 1e-6");

    struct Candidate {
        cost: u64,
        m: u16,
        s: u32,
        ell: u32,
        threshold: u64,
        needed: u64,
        delta_code: f64,
    }
    let mut best: Option<Candidate> = None;
    let mut saw_reliability_block = false;
    for &ell in &inputs.ell_sym_grid {
        if ell == 0 {
            continue;
        }
        let blocks = (inputs.payload as usize).div_ceil(ell as usize);
        let threshold = decode_threshold_exact(inputs.payload as usize, ell as usize, eps) as u64;
        let delta_code = inputs
            .delta_code
            .unwrap_or_else(|| delta_code_lookup(blocks, threshold as usize));
        let delta_eff = inputs.delta - delta_code;
        if delta_eff <= 0.0 {
            saw_reliability_block = true;
            continue;
        }
        for s in 1..=inputs.s_max {
            let needed = threshold.div_ceil(s as u64);
            let Ok(m) = exact_min_m(inputs.n, inputs.c_e, delta_eff, needed) else {
                continue;
            };
            let cost = bandwidth_cost(
                &CostVariant::Rateless {
                    lanes: m,
                    symbols_per_bundle: s,
                    symbol_len: ell,
                    decode_threshold: threshold,
                },
                inputs.payload,
                inputs.header_bytes,
                inputs.symbol_meta_bytes,
            );
            let better = match &best {
                None => true,
                Some(b) => {
                    let lhs = (cost.published, m, s, std::cmp::Reverse(ell));
                    let rhs = (b.cost, b.m, b.s, std::cmp::Reverse(b.ell));
                    lhs < rhs
                }
            };
            if better {
                best = Some(Candidate {
                    cost: cost.published,
                    m,
                    s,
                    ell,
                    threshold,
                    needed,
                    delta_code,
                });
            }
        }
    }
    let Some(c) = best else {
        if saw_reliability_block {
            return Err(PlanError::InfeasibleReliability {
                delta: inputs.delta,
                delta_code: inputs.delta_code.unwrap_or(f64::NAN),
            });
        }
        return Err(PlanError::Infeasible);
    };
    let cost = bandwidth_cost(
        &CostVariant::Rateless {
            lanes: c.m,
            symbols_per_bundle: c.s,
            symbol_len: c.ell,
            decode_threshold: c.threshold,
        },
        inputs.payload,
        inputs.header_bytes,
        inputs.symbol_meta_bytes,
    );
    Ok(PlanResult {
        variant: Variant::Rateless,
        lanes: c.m,
        shares_needed: None,
        symbols_per_bundle: Some(c.s),
        symbol_len: Some(c.ell),
        decode_threshold: Some(c.threshold),
        m_exact: c.m,
        m_closed_form: closed_form_m(honest_ratio, inputs.delta - c.delta_code, c.needed)?,
        cost,
        success_prob: success_at(inputs.n, inputs.c_e, c.m, c.needed, c.delta_code),
        early_decode_prob: early_decode_prob(inputs.n, inputs.c_e, c.m, c.s, c.threshold),
        mds_clamp_bound: false,
        delta_code_used: c.delta_code,
    })
}

/// Every variant planned side by side.
#[derive(Debug, Clone)]
pub struct StrategyComparison {
    pub rows: Vec<(Variant, Result<PlanResult, PlanError>)>,
}

impl StrategyComparison {
    /// The variant with the lowest published-byte cost, if any plan exists.
    pub fn cheapest(&self) -> Option<&PlanResult> {
        self.rows
            .iter()
            .filter_map(|(_, r)| r.as_ref().ok())
            .min_by_key(|p| p.cost.published)
    }

    pub fn get(&self, variant: Variant) -> Option<&PlanResult> {
        self.rows
            .iter()
            .find(|(v, _)| *v == variant)
            .and_then(|(_, r)| r.as_ref().ok())
    }
}

pub fn compare_strategies(inputs: &PlanInputs) -> StrategyComparison {
    StrategyComparison {
        rows: vec![
            (Variant::Naive, plan_naive(inputs)),
            (Variant::Mds, plan_mds(inputs)),
            (Variant::Rateless, plan_rateless(inputs)),
        ],
    }
}
