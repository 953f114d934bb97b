//! Browser bindings for the interactive demo page (`www/index.html`).
//!
//! Three operations, all pure and seed-deterministic, each returning a JSON
//! string for plain-JS plotting:
//!
//! * [`overhead_curve`]: planner overhead versus payload size for all three
//!   strategies, with the fixed-rate and rateless floors;
//! * [`success_curve`]: single-slot success probability versus fanout at
//!   the planned per-variant shapes;
//! * [`run_trials`]: live Monte Carlo of the full protocol (lane sampling,
//!   signed bundles, censoring, decode-to-include) with a slot histogram
//!   and the adversary's observed early-decode rate.
//!
//! Build with `wasm-pack build --target web crates/sedna-wasm`; the crate
//! also compiles natively so the workspace test run covers it.

use wasm_bindgen::prelude::*;

use sedna_core::analysis::{
    bandwidth_cost, overhead_floor, CostVariant, FloorVariant, HypergeomSpec,
};
use sedna_core::codec::{MdsParams, RatelessParams};
use sedna_core::ledger::{SimConfig, SimOutcome, SimPayload};
use sedna_core::planner::{compare_strategies, PlanInputs, Variant};
use sedna_core::protocol::{Strategy, StrategyConfig};
use sedna_core::simulate_many;

fn json_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "null".to_string()
    }
}

fn inputs_for(n: u16, ce: u16, delta_exp: u32, payload: u64) -> PlanInputs {
    let mut inputs = PlanInputs::defaults(payload);
    inputs.n = n;
    inputs.c_e = ce;
    inputs.delta = 10f64.powi(-(delta_exp as i32));
    inputs
}

/// Planner overhead (published bytes / payload) for payload sizes
/// `2^log2_min ..= 2^log2_max`, two points per octave. JSON: an array of
/// `{s, naive, mds, rateless, floor_mds, floor_rateless}` with `null` for
/// infeasible points.
#[wasm_bindgen]
pub fn overhead_curve(n: u16, ce: u16, delta_exp: u32, log2_min: u32, log2_max: u32) -> String {
    if ce >= n || delta_exp == 0 {
        return "[]".to_string();
    }
    let mut rows = Vec::new();
    let floor_mds = overhead_floor(FloorVariant::Mds, n, ce).ok();
    let floor_rtl = overhead_floor(FloorVariant::Rateless { epsilon: 0.05 }, n, ce).ok();
    let mut sizes = Vec::new();
    for e in log2_min..=log2_max.min(24) {
        sizes.push(1u64 << e);
        if e < log2_max {
            sizes.push((1u64 << e) + (1u64 << e.saturating_sub(1)));
        }
    }
    for payload in sizes {
        let inputs = inputs_for(n, ce, delta_exp, payload);
        let cmp = compare_strategies(&inputs);
        let cell = |v: Variant| {
            cmp.get(v)
                .map_or("null".to_string(), |p| json_num(p.cost.overhead))
        };
        rows.push(format!(
            "{{\"s\":{payload},\"naive\":{},\"mds\":{},\"rateless\":{},\"floor_mds\":{},\"floor_rateless\":{}}}",
            cell(Variant::Naive),
            cell(Variant::Mds),
            cell(Variant::Rateless),
            floor_mds.map_or("null".into(), json_num),
            floor_rtl.map_or("null".into(), json_num),
        ));
    }
    format!("[{}]", rows.join(","))
}

/// Single-slot success probability versus fanout `m = 1..=m_max`, holding
/// each variant's shape at its planned optimum for the given payload.
/// JSON: `{m: [...], naive: [...], mds: [...], rateless: [...], k, s, ell}`.
#[wasm_bindgen]
pub fn success_curve(n: u16, ce: u16, delta_exp: u32, payload: u64, m_max: u16) -> String {
    if ce >= n || delta_exp == 0 || payload < 64 {
        return "{}".to_string();
    }
    let inputs = inputs_for(n, ce, delta_exp, payload);
    let cmp = compare_strategies(&inputs);
    let k = cmp
        .get(Variant::Mds)
        .and_then(|p| p.shares_needed)
        .unwrap_or(1);
    let (s, ell, threshold) = cmp
        .get(Variant::Rateless)
        .map(|p| {
            (
                p.symbols_per_bundle.unwrap_or(1),
                p.symbol_len.unwrap_or(256),
                p.decode_threshold.unwrap_or(1),
            )
        })
        .unwrap_or((1, 256, 1));
    let m_max = m_max.min(n).max(1);
    let mut ms = Vec::new();
    let mut naive = Vec::new();
    let mut mds = Vec::new();
    let mut rateless = Vec::new();
    for m in 1..=m_max {
        let honest = HypergeomSpec::new(n as u64, (n - ce) as u64, m as u64);
        ms.push(m.to_string());
        naive.push(json_num(honest.tail_ge(1)));
        mds.push(json_num(honest.tail_ge(k as u64)));
        rateless.push(json_num(honest.tail_ge(threshold.div_ceil(s as u64))));
    }
    format!(
        "{{\"m\":[{}],\"naive\":[{}],\"mds\":[{}],\"rateless\":[{}],\"k\":{k},\"s\":{s},\"ell\":{ell},\"threshold\":{threshold}}}",
        ms.join(","),
        naive.join(","),
        mds.join(","),
        rateless.join(",")
    )
}

/// Run seeded protocol trials and summarize. `variant` is one of "naive",
/// "mds", "rateless". JSON: `{trials, included_rate, censored, mean_slots,
/// bytes_per_trial, early_decode_rate, histogram: [count at slot 1..]}`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)] // flat scalar surface for plain JS callers
pub fn run_trials(
    n: u16,
    ce: u16,
    variant: &str,
    m: u16,
    s: u32,
    ell_sym: u32,
    k: u16,
    payload_bytes: u32,
    trials: u32,
    seed: u32,
) -> Result<String, String> {
    if m == 0 || m > n || ce > n {
        return Err("need 0 < m <= n and ce <= n".to_string());
    }
    if payload_bytes == 0 || trials == 0 {
        return Err("payload_bytes and trials must be positive".to_string());
    }
    let message_len = payload_bytes as usize + 32;
    let strategy = match variant {
        "naive" => Strategy::Naive,
        "mds" => Strategy::Mds(
            MdsParams::new(n.min(255).max(k), k, message_len).map_err(|e| e.to_string())?,
        ),
        "rateless" => Strategy::Rateless {
            params: RatelessParams::new(message_len, ell_sym as usize, 0.05)
                .map_err(|e| e.to_string())?,
            symbols_per_bundle: s.max(1),
        },
        other => return Err(format!("unknown variant '{other}'")),
    };
    let cfg = SimConfig {
        n,
        c_e: ce,
        adversary_collects: true,
        config: StrategyConfig { lanes: m, strategy },
        payload: SimPayload::Random {
            len: payload_bytes as usize,
        },
        fee_per_byte: 1,
        max_slots: 30,
    };
    let results = simulate_many(&cfg, trials as u64, seed as u64);
    let mut histogram = [0u32; 30];
    let mut included = 0u32;
    let mut censored = 0u32;
    let mut early = 0u32;
    let mut slot_sum = 0u64;
    let mut bytes_sum = 0u64;
    for r in &results {
        bytes_sum += r.bytes_published;
        if r.adversary_decode_slot == Some(1) {
            early += 1;
        }
        match r.outcome {
            SimOutcome::Included { slot } => {
                included += 1;
                slot_sum += slot;
                histogram[(slot - 1).min(29) as usize] += 1;
            }
            SimOutcome::Censored => censored += 1,
            SimOutcome::DiscardedInvalid { .. } => {}
        }
    }
    let trials_f = trials as f64;
    let mean_slots = if included > 0 {
        slot_sum as f64 / included as f64
    } else {
        f64::NAN
    };
    let hist: Vec<String> = histogram.iter().map(|c| c.to_string()).collect();
    Ok(format!(
        "{{\"trials\":{trials},\"included_rate\":{},\"censored\":{censored},\"mean_slots\":{},\"bytes_per_trial\":{},\"early_decode_rate\":{},\"histogram\":[{}]}}",
        json_num(included as f64 / trials_f),
        json_num(mean_slots),
        json_num(bytes_sum as f64 / trials_f),
        json_num(early as f64 / trials_f),
        hist.join(",")
    ))
}

/// Predicted byte costs for one explicit configuration (used by the demo's
/// tooltip panel).
#[wasm_bindgen]
pub fn cost_breakdown(variant: &str, m: u16, s: u32, ell_sym: u32, k: u16, payload: u64) -> String {
    let cv = match variant {
        "naive" => CostVariant::Naive { lanes: m },
        "mds" => CostVariant::Mds {
            lanes: m,
            shares_needed: k.max(1),
        },
        _ => {
            let params = RatelessParams::new(payload as usize, ell_sym.max(1) as usize, 0.05);
            CostVariant::Rateless {
                lanes: m,
                symbols_per_bundle: s.max(1),
                symbol_len: ell_sym.max(1),
                decode_threshold: params.map(|p| p.decode_threshold as u64).unwrap_or(1),
            }
        }
    };
    let cost = bandwidth_cost(&cv, payload.max(1), 200, 8);
    format!(
        "{{\"published\":{},\"minimum\":{},\"overhead\":{}}}",
        cost.published,
        cost.minimum,
        json_num(cost.overhead)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overhead_curve_is_valid_json_shape() {
        let out = overhead_curve(64, 8, 9, 10, 14);
        assert!(out.starts_with("[{\"s\":1024,"));
        assert!(out.contains("\"floor_mds\":"));
        assert!(out.ends_with("}]"));
    }

    #[test]
    fn success_curve_has_matching_lengths() {
        let out = success_curve(32, 4, 9, 4096, 24);
        let count = |needle: &str| out.matches(needle).count();
        assert_eq!(count("\"m\":["), 1);
        // 24 fanout points -> 23 commas inside each of the four arrays.
        assert!(out.contains("\"threshold\":"));
    }

    #[test]
    fn run_trials_summarizes_and_is_deterministic() {
        let a = run_trials(16, 2, "rateless", 6, 2, 64, 0, 500, 300, 7).unwrap();
        let b = run_trials(16, 2, "rateless", 6, 2, 64, 0, 500, 300, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"included_rate\":"));
        let naive = run_trials(16, 16, "naive", 4, 1, 0, 0, 100, 50, 1).unwrap();
        assert!(naive.contains("\"censored\":50"));
    }

    #[test]
    fn run_trials_rejects_bad_input() {
        assert!(run_trials(8, 0, "rateless", 9, 1, 64, 0, 100, 10, 0).is_err());
        assert!(run_trials(8, 0, "bogus", 4, 1, 64, 0, 100, 10, 0).is_err());
    }
}
