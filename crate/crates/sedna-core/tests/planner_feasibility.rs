//! Every plan the planner returns must hold up twice over: its predicted
//! success probability must clear the budget analytically, and a Monte
//! Carlo run at the planned parameters must achieve the budget empirically.
//! The budget is set to 0.05 so failures are frequent enough to measure.

use sedna_core::codec::{MdsParams, RatelessParams};
use sedna_core::ledger::{SimConfig, SimOutcome, SimPayload};
use sedna_core::planner::{compare_strategies, PlanInputs, PlanResult, Variant};
use sedna_core::protocol::{Strategy, StrategyConfig};
use sedna_core::simulate_many;

fn sim_strategy(inputs: &PlanInputs, plan: &PlanResult) -> Strategy {
    let message_len = inputs.payload as usize;
    match plan.variant {
        Variant::Naive => Strategy::Naive,
        Variant::Mds => Strategy::Mds(
            MdsParams::new(
                plan.lanes.max(plan.shares_needed.unwrap()),
                plan.shares_needed.unwrap(),
                message_len,
            )
            .unwrap(),
        ),
        Variant::Rateless => Strategy::Rateless {
            params: RatelessParams::new(
                message_len,
                plan.symbol_len.unwrap() as usize,
                inputs.epsilon,
            )
            .unwrap(),
            symbols_per_bundle: plan.symbols_per_bundle.unwrap(),
        },
    }
}

#[test]
fn plans_meet_their_budget_analytically_and_empirically() {
    let trials = 4000u64;
    let delta = 0.05f64;
    let mut checked = 0u32;
    for &(n, c_e, payload) in &[
        (16u16, 2u16, 2080u64),
        (32, 4, 4128),
        (32, 8, 1056),
        (64, 8, 8224),
    ] {
        let mut inputs = PlanInputs::defaults(payload);
        inputs.n = n;
        inputs.c_e = c_e;
        inputs.delta = delta;
        inputs.ell_sym_grid = vec![64, 128, 256, 512];
        inputs.s_max = 16;
        for (variant, plan) in compare_strategies(&inputs).rows {
            let plan = plan.unwrap_or_else(|e| panic!("{variant} infeasible: {e}"));
            assert!(
                plan.success_prob >= 1.0 - delta,
                "{variant} at n={n} c_e={c_e}: predicted success {} under budget",
                plan.success_prob
            );

            let cfg = SimConfig {
                n,
                c_e,
                adversary_collects: false,
                config: StrategyConfig {
                    lanes: plan.lanes,
                    strategy: sim_strategy(&inputs, &plan),
                },
                payload: SimPayload::Random {
                    len: payload as usize - 32,
                },
                fee_per_byte: 1,
                max_slots: 1,
            };
            let results = simulate_many(&cfg, trials, 0x9A57 + checked as u64);
            let failures = results
                .iter()
                .filter(|r| !matches!(r.outcome, SimOutcome::Included { slot: 1 }))
                .count() as f64
                / trials as f64;
            let se = (delta * (1.0 - delta) / trials as f64).sqrt();
            assert!(
                failures <= delta + 3.0 * se,
                "{variant} at n={n} c_e={c_e}: empirical failure {failures} above {delta} + 3se"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 12);
}
