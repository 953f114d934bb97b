//! Closed-form probability and byte-cost engine.
//!
//! Lane sampling without replacement makes the honest-lane count
//! hypergeometric; everything here reduces to exact tail evaluations of
//! that distribution via log-factorials (stable up to lane counts in the
//! tens of thousands), plus exact integer byte accounting for the three
//! submission strategies.

use std::sync::OnceLock;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no coded scheme tolerates every lane being censored (c_e = n)")]
    Infeasible,
}

/// Largest supported population for tail evaluations.
pub const MAX_POPULATION: u64 = 65_535;

fn ln_factorial(x: u64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_POPULATION as usize + 1);
        t.push(0.0);
        let mut acc = 0.0f64;
        for i in 1..=MAX_POPULATION {
            acc += (i as f64).ln();
            t.push(acc);
        }
        t
    });
    table[x as usize]
}

fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Hypergeometric distribution: draws without replacement from a population
/// with a marked success class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypergeomSpec {
    pub population: u64,
    pub successes: u64,
    pub draws: u64,
}

impl HypergeomSpec {
    pub fn new(population: u64, successes: u64, draws: u64) -> Self {
        assert!(successes <= population, "successes exceed population");
        assert!(draws <= population, "draws exceed population");
        assert!(population <= MAX_POPULATION, "population too large");
        Self {
            population,
            successes,
            draws,
        }
    }

    /// Support of the draw count: at least `draws - failures_available`,
    /// at most `min(draws, successes)`.
    fn support(&self) -> (u64, u64) {
        let lo = self.draws.saturating_sub(self.population - self.successes);
        let hi = self.draws.min(self.successes);
        (lo, hi)
    }

    pub fn pmf(&self, x: u64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        (ln_choose(self.successes, x) + ln_choose(self.population - self.successes, self.draws - x)
            - ln_choose(self.population, self.draws))
        .exp()
    }

    /// `P[X >= threshold]`, summed over the upper support.
    pub fn tail_ge(&self, threshold: u64) -> f64 {
        let (lo, hi) = self.support();
        if threshold <= lo {
            return 1.0;
        }
        if threshold > hi {
            return 0.0;
        }
        let sum: f64 = (threshold..=hi).map(|x| self.pmf(x)).sum();
        sum.clamp(0.0, 1.0)
    }

    /// `P[X < threshold]`, summed over the lower support. Summing the small
    /// side directly keeps tiny lower tails exact instead of computing
    /// `1 - tail` and losing them to cancellation.
    pub fn cdf_lt(&self, threshold: u64) -> f64 {
        let (lo, hi) = self.support();
        if threshold <= lo {
            return 0.0;
        }
        if threshold > hi {
            return 1.0;
        }
        let sum: f64 = (lo..threshold).map(|x| self.pmf(x)).sum();
        sum.clamp(0.0, 1.0)
    }
}

/// `P[H >= threshold]` for a named spec; the workhorse tail query.
pub fn hypergeom_tail_ge(spec: &HypergeomSpec, threshold: u64) -> f64 {
    spec.tail_ge(threshold)
}

/// Lower bound on single-slot inclusion probability: all addressed honest
/// lanes publish, so success needs at least `ceil(K/s)` honest lanes among
/// the `m` addressed, and then decode must not fail.
pub fn single_slot_success(
    n: u16,
    c_e: u16,
    m: u16,
    s: u32,
    decode_threshold: u64,
    delta_code: f64,
) -> f64 {
    assert!(c_e <= n && m <= n && s >= 1);
    let needed = decode_threshold.div_ceil(s as u64);
    if needed > m as u64 {
        return 0.0;
    }
    let spec = HypergeomSpec::new(n as u64, (n - c_e) as u64, m as u64);
    (1.0 - delta_code) * spec.tail_ge(needed)
}

/// Expected-slots bound from per-slot success `p`: the slot count is
/// dominated by a geometric variable, so the mean is at most `1/p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlotsBound {
    Finite(f64),
    /// Per-slot success of zero: no finite bound.
    Unbounded,
}

pub fn expected_slots_upper(p: f64) -> SlotsBound {
    assert!((0.0..=1.0).contains(&p), "probability out of range");
    if p == 0.0 {
        SlotsBound::Unbounded
    } else {
        SlotsBound::Finite(1.0 / p)
    }
}

/// Probability that the adversary's censored lanes capture a decodable set
/// in one slot. Exactly zero when the whole slot's symbol budget is below
/// the threshold.
pub fn early_decode_prob(n: u16, c_e: u16, m: u16, s: u32, decode_threshold: u64) -> f64 {
    assert!(c_e <= n && m <= n && s >= 1);
    if (m as u64) * (s as u64) < decode_threshold {
        return 0.0;
    }
    let needed = decode_threshold.div_ceil(s as u64);
    let spec = HypergeomSpec::new(n as u64, c_e as u64, m as u64);
    spec.tail_ge(needed)
}

/// Byte-cost model inputs per variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostVariant {
    Naive {
        lanes: u16,
    },
    Mds {
        lanes: u16,
        shares_needed: u16,
    },
    Rateless {
        lanes: u16,
        symbols_per_bundle: u32,
        symbol_len: u32,
        decode_threshold: u64,
    },
}

/// Published and minimum byte costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// Total bytes if every addressed lane publishes its bundle.
    pub published: u64,
    /// Bytes whose finalization suffices for inclusion.
    pub minimum: u64,
    /// `published / payload`.
    pub overhead: f64,
}

/// Exact integer byte costs for one submission. `payload` is the coded
/// message size S, `header_bytes` the per-bundle overhead, and
/// `symbol_meta_bytes` the per-symbol metadata (rateless only). Fractional
/// share and lane counts round up: shares are whole bytes and lanes are
/// whole lanes.
pub fn bandwidth_cost(
    variant: &CostVariant,
    payload: u64,
    header_bytes: u64,
    symbol_meta_bytes: u64,
) -> CostBreakdown {
    let (published, minimum) = match *variant {
        CostVariant::Naive { lanes } => {
            let bundle = header_bytes + payload;
            (lanes as u64 * bundle, bundle)
        }
        CostVariant::Mds {
            lanes,
            shares_needed,
        } => {
            let share = payload.div_ceil(shares_needed as u64);
            let bundle = header_bytes + share;
            (lanes as u64 * bundle, shares_needed as u64 * bundle)
        }
        CostVariant::Rateless {
            lanes,
            symbols_per_bundle,
            symbol_len,
            decode_threshold,
        } => {
            let bundle =
                header_bytes + symbols_per_bundle as u64 * (symbol_meta_bytes + symbol_len as u64);
            let lanes_needed = decode_threshold.div_ceil(symbols_per_bundle as u64);
            (lanes as u64 * bundle, lanes_needed * bundle)
        }
    };
    CostBreakdown {
        published,
        minimum,
        overhead: published as f64 / payload as f64,
    }
}

/// Large-payload overhead floor of each strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FloorVariant {
    /// Naive replication: the floor is the optimal fanout itself.
    Naive {
        m_opt: u16,
    },
    Mds,
    Rateless {
        epsilon: f64,
    },
}

pub fn overhead_floor(variant: FloorVariant, n: u16, c_e: u16) -> Result<f64, AnalysisError> {
    match variant {
        FloorVariant::Naive { m_opt } => Ok(m_opt as f64),
        FloorVariant::Mds => {
            if c_e >= n {
                return Err(AnalysisError::Infeasible);
            }
            Ok(1.0 / (1.0 - c_e as f64 / n as f64))
        }
        FloorVariant::Rateless { epsilon } => {
            if c_e >= n {
                return Err(AnalysisError::Infeasible);
            }
            Ok((1.0 + epsilon) / (1.0 - c_e as f64 / n as f64))
        }
    }
}

/// Minimum total bytes any deterministic scheme must spread across lanes
/// when decoding must succeed from every set of `n - c_e` lanes:
/// `n * S / (n - c_e)`.
pub fn info_theoretic_min_bytes(n: u16, c_e: u16, payload: u64) -> Result<f64, AnalysisError> {
    if c_e >= n {
        return Err(AnalysisError::Infeasible);
    }
    Ok(n as f64 * payload as f64 / (n - c_e) as f64)
}

/// Upper bound on payload bits learnable from `observed` symbols: each
/// symbol reveals at most its own size.
pub fn leakage_bound_bits(observed: u64, symbol_len_bytes: u64) -> u64 {
    observed * symbol_len_bytes * 8
}
