//! Reproducible experiment runners behind the CLI.
//!
//! Every command resolves its parameters from an optional flat config file
//! (`key = value` lines, with optional `[command]` sections) overlaid by
//! explicit overrides, runs deterministically from its seed, and emits a
//! CSV document whose `#` header echoes *every* resolved parameter. That
//! header is the experiment's provenance: [`rerun_csv`] parses it and
//! regenerates the identical file, which is also how the reproducibility
//! checks work. Output rows are emitted in a deterministic order, so files
//! never depend on evaluation scheduling.

use std::cell::RefCell;
use std::collections::BTreeMap;

use crate::analysis::{bandwidth_cost, overhead_floor, CostVariant, FloorVariant, HypergeomSpec};
use crate::codec::{
    coefficient_row, decode_threshold_exact, estimate_delta_code, rateless_symbol, MdsParams,
    Message, RatelessParams,
};
use crate::gf256;
use crate::ledger::{simulate_many, SimConfig, SimOutcome, SimPayload, SimResult};
use crate::planner::{
    compare_strategies, exact_min_m, plan_mds, plan_naive, plan_rateless, PlanError, PlanInputs,
    PlanResult, Variant, DEFAULT_ELL_SYM_GRID,
};
use crate::protocol::{effective_censors, Strategy, StrategyConfig};
use crate::rng::DeterministicRng;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ExperimentError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
}

impl From<PlanError> for ExperimentError {
    fn from(e: PlanError) -> Self {
        ExperimentError::Infeasible(e.to_string())
    }
}

/// The CLI surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Plan,
    Simulate,
    Sweep,
    CodecBench,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Plan => "plan",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::CodecBench => "codec-bench",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "plan" => Some(Command::Plan),
            "simulate" => Some(Command::Simulate),
            "sweep" => Some(Command::Sweep),
            "codec-bench" => Some(Command::CodecBench),
            _ => None,
        }
    }
}

/// Parse a flat config file: `key = value` lines, `#` comments, optional
/// `[section]` headers scoping keys to one command. Returns
/// section -> key -> value, with un-sectioned keys under `""`.
pub fn parse_config(
    text: &str,
) -> Result<BTreeMap<String, BTreeMap<String, String>>, ExperimentError> {
    let mut out: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ExperimentError::InvalidInput(format!(
                "line {}: expected `key = value`, got `{raw}`",
                lineno + 1
            )));
        };
        out.entry(section.clone())
            .or_default()
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

/// Resolved option bag for one command run. Every read is recorded with the
/// value actually used (explicit or default), and that record becomes the
/// CSV header, so no default is ever silent.
pub struct Options {
    values: BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Options {
    pub fn new(values: BTreeMap<String, String>) -> Self {
        Self {
            values,
            resolved: RefCell::new(BTreeMap::new()),
        }
    }

    /// Merge config-file sections (global, then `[command]`) and explicit
    /// overrides, later sources winning.
    pub fn merged(
        file_text: Option<&str>,
        command: Command,
        overrides: &[(String, String)],
    ) -> Result<Self, ExperimentError> {
        let mut values = BTreeMap::new();
        if let Some(text) = file_text {
            let sections = parse_config(text)?;
            if let Some(global) = sections.get("") {
                values.extend(global.clone());
            }
            if let Some(scoped) = sections.get(command.name()) {
                values.extend(scoped.clone());
            }
        }
        for (k, v) in overrides {
            values.insert(k.clone(), v.clone());
        }
        Ok(Self::new(values))
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    /// Every `key = value` actually consumed by the run, sorted by key.
    pub fn resolved(&self) -> Vec<(String, String)> {
        self.resolved
            .borrow()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        let v = self
            .values
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string());
        self.record(key, v.clone());
        v
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64, ExperimentError> {
        let v = self.string(key, &default.to_string());
        v.parse()
            .map_err(|_| ExperimentError::InvalidInput(format!("{key} = {v} is not an integer")))
    }

    pub fn u32(&self, key: &str, default: u32) -> Result<u32, ExperimentError> {
        Ok(self.u64(key, default as u64)? as u32)
    }

    pub fn u16(&self, key: &str, default: u16) -> Result<u16, ExperimentError> {
        let v = self.u64(key, default as u64)?;
        u16::try_from(v)
            .map_err(|_| ExperimentError::InvalidInput(format!("{key} = {v} exceeds 65535")))
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, ExperimentError> {
        let v = self.string(key, &format_float(default));
        v.parse()
            .map_err(|_| ExperimentError::InvalidInput(format!("{key} = {v} is not a number")))
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool, ExperimentError> {
        let v = self.string(key, if default { "true" } else { "false" });
        match v.as_str() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(ExperimentError::InvalidInput(format!(
                "{key} = {other} is not a boolean"
            ))),
        }
    }

    pub fn u32_list(&self, key: &str, default: &[u32]) -> Result<Vec<u32>, ExperimentError> {
        let default_str = default
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let v = self.string(key, &default_str);
        v.split(',')
            .map(|p| {
                p.trim().parse().map_err(|_| {
                    ExperimentError::InvalidInput(format!("{key}: `{p}` is not an integer"))
                })
            })
            .collect()
    }

    pub fn optional(&self, key: &str) -> Option<String> {
        let v = self.values.get(key).cloned();
        if let Some(ref v) = v {
            self.record(key, v.clone());
        }
        v
    }
}

/// Deterministic float formatting for CSV cells and header echoes
/// (shortest round-trip representation).
pub fn format_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// A rendered experiment: header comments, column names, data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvDoc {
    pub command: Command,
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# sedna {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("# command = {}\n", self.command.name()));
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Run one command against resolved options.
pub fn run_command(command: Command, opts: &Options) -> Result<CsvDoc, ExperimentError> {
    let mut doc = match command {
        Command::Plan => run_plan(opts)?,
        Command::Simulate => run_simulate(opts)?,
        Command::Sweep => run_sweep(opts)?,
        Command::CodecBench => run_codec_bench(opts)?,
    };
    doc.meta = opts.resolved();
    Ok(doc)
}

/// Re-execute the experiment embedded in a rendered CSV header and return
/// the regenerated document. Byte-identical output is the reproducibility
/// contract.
pub fn rerun_csv(text: &str) -> Result<String, ExperimentError> {
    let mut command = None;
    let mut overrides = Vec::new();
    for line in text.lines() {
        let Some(comment) = line.strip_prefix("# ") else {
            break;
        };
        let Some((key, value)) = comment.split_once(" = ") else {
            continue; // the version banner
        };
        if key == "command" {
            command = Command::from_name(value);
        } else {
            overrides.push((key.to_string(), value.to_string()));
        }
    }
    let command = command
        .ok_or_else(|| ExperimentError::InvalidInput("no `# command =` header found".into()))?;
    let opts = Options::merged(None, command, &overrides)?;
    Ok(run_command(command, &opts)?.render())
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

fn plan_inputs_from(opts: &Options) -> Result<PlanInputs, ExperimentError> {
    let n = opts.u16("n", 256)?;
    let c_e = resolve_censors(opts, n)?;
    if c_e > n {
        return Err(ExperimentError::InvalidInput(format!(
            "ce = {c_e} exceeds n = {n}"
        )));
    }
    let delta = opts.f64("delta", 1e-9)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(ExperimentError::InvalidInput(format!(
            "delta = {delta} must lie strictly between 0 and 1"
        )));
    }
    let delta_code = match opts.string("delta_code", "auto").as_str() {
        "auto" => None,
        v => Some(v.parse::<f64>().map_err(|_| {
            ExperimentError::InvalidInput(format!("delta_code = {v} is not a number or `auto`"))
        })?),
    };
    if let Some(dc) = delta_code {
        if dc >= delta {
            return Err(ExperimentError::Infeasible(format!(
                "failure budget delta = {delta} does not exceed delta_code = {dc}"
            )));
        }
    }
    let epsilon = opts.f64("epsilon", 0.05)?;
    if epsilon <= 0.0 {
        return Err(ExperimentError::InvalidInput("epsilon must be > 0".into()));
    }
    Ok(PlanInputs {
        n,
        c_e,
        delta,
        delta_code,
        payload: opts.u64("S", 4096)?,
        header_bytes: opts.u64("mh", 200)?,
        symbol_meta_bytes: opts.u64("ms", 8)?,
        epsilon,
        ell_sym_grid: opts.u32_list("ell_grid", &DEFAULT_ELL_SYM_GRID)?,
        s_max: opts.u32("s_max", 64)?,
    })
}

/// `ce` wins when given; otherwise `(f, c)` resolve through the effective-
/// censor formula; otherwise the default of 32.
fn resolve_censors(opts: &Options, n: u16) -> Result<u16, ExperimentError> {
    if let Some(ce) = opts.optional("ce") {
        return ce
            .parse()
            .map_err(|_| ExperimentError::InvalidInput(format!("ce = {ce} is not an integer")));
    }
    match (opts.optional("f"), opts.optional("c")) {
        (Some(f), Some(c)) => {
            let f: u16 = f
                .parse()
                .map_err(|_| ExperimentError::InvalidInput(format!("f = {f} is not an integer")))?;
            let c: u16 = c
                .parse()
                .map_err(|_| ExperimentError::InvalidInput(format!("c = {c} is not an integer")))?;
            if c >= n {
                return Err(ExperimentError::InvalidInput(format!(
                    "c = {c} must be below n = {n}"
                )));
            }
            Ok(effective_censors(n, f, c))
        }
        (None, None) => Ok(32.min(n)),
        _ => Err(ExperimentError::InvalidInput(
            "give both f and c, or ce alone".into(),
        )),
    }
}

pub const PLAN_COLUMNS: [&str; 16] = [
    "variant",
    "n",
    "c_e",
    "delta",
    "S",
    "m",
    "k",
    "s",
    "ell_sym",
    "K",
    "L_pub",
    "L_min",
    "overhead",
    "success_prob",
    "early_decode_prob",
    "m_closed_form",
];

fn plan_row(inputs: &PlanInputs, p: &PlanResult) -> Vec<String> {
    vec![
        p.variant.to_string(),
        inputs.n.to_string(),
        inputs.c_e.to_string(),
        format_float(inputs.delta),
        inputs.payload.to_string(),
        p.lanes.to_string(),
        p.shares_needed.map_or(String::new(), |k| k.to_string()),
        p.symbols_per_bundle
            .map_or(String::new(), |s| s.to_string()),
        p.symbol_len.map_or(String::new(), |l| l.to_string()),
        p.decode_threshold.map_or(String::new(), |k| k.to_string()),
        p.cost.published.to_string(),
        p.cost.minimum.to_string(),
        format_float(p.cost.overhead),
        format_float(p.success_prob),
        format_float(p.early_decode_prob),
        format_float(p.m_closed_form),
    ]
}

fn run_plan(opts: &Options) -> Result<CsvDoc, ExperimentError> {
    let inputs = plan_inputs_from(opts)?;
    let variant = opts.string("variant", "all");
    let plans: Vec<PlanResult> = match variant.as_str() {
        "all" => {
            let cmp = compare_strategies(&inputs);
            let mut out = Vec::new();
            for (v, r) in cmp.rows {
                out.push(r.map_err(|e| ExperimentError::Infeasible(format!("{v}: {e}")))?);
            }
            out
        }
        name => {
            let v: Variant = name
                .parse()
                .map_err(|e: String| ExperimentError::InvalidInput(e))?;
            vec![match v {
                Variant::Naive => plan_naive(&inputs)?,
                Variant::Mds => plan_mds(&inputs)?,
                Variant::Rateless => plan_rateless(&inputs)?,
            }]
        }
    };
    Ok(CsvDoc {
        command: Command::Plan,
        meta: Vec::new(),
        columns: PLAN_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows: plans.iter().map(|p| plan_row(&inputs, p)).collect(),
    })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Strategy described by scenario options, plus the derived per-variant
/// display parameters (s, ell_sym, threshold) for the CSV.
fn strategy_from(
    opts: &Options,
    message_len: usize,
) -> Result<(StrategyConfig, u32, usize, u64), ExperimentError> {
    let variant: Variant = opts
        .string("variant", "rateless")
        .parse()
        .map_err(ExperimentError::InvalidInput)?;
    let m = opts.u16("m", 20)?;
    if m == 0 {
        return Err(ExperimentError::InvalidInput("m must be >= 1".into()));
    }
    match variant {
        Variant::Naive => Ok((
            StrategyConfig {
                lanes: m,
                strategy: Strategy::Naive,
            },
            1,
            message_len,
            1,
        )),
        Variant::Mds => {
            let k = opts.u16("k", 8)?;
            let shares_total = opts.u16("shares_total", 255.min(m.max(k)).max(m))?;
            let params = MdsParams::new(shares_total, k, message_len)
                .map_err(|e| ExperimentError::InvalidInput(e.to_string()))?;
            let share_len = params.share_len;
            Ok((
                StrategyConfig {
                    lanes: m,
                    strategy: Strategy::Mds(params),
                },
                1,
                share_len,
                k as u64,
            ))
        }
        Variant::Rateless => {
            let s = opts.u32("s", 4)?;
            if s == 0 {
                return Err(ExperimentError::InvalidInput("s must be >= 1".into()));
            }
            let ell = opts.u32("ell_sym", 256)?;
            let epsilon = opts.f64("epsilon", 0.05)?;
            let params = RatelessParams::new(message_len, ell as usize, epsilon)
                .map_err(|e| ExperimentError::InvalidInput(e.to_string()))?;
            let threshold = params.decode_threshold as u64;
            Ok((
                StrategyConfig {
                    lanes: m,
                    strategy: Strategy::Rateless {
                        params,
                        symbols_per_bundle: s,
                    },
                },
                s,
                ell as usize,
                threshold,
            ))
        }
    }
}

pub const SIMULATE_COLUMNS: [&str; 13] = [
    "trial",
    "seed",
    "variant",
    "n",
    "c_e",
    "m",
    "s",
    "ell_sym",
    "K",
    "slots_to_inclusion",
    "included",
    "bytes_published",
    "adversary_decode_slot",
];

fn run_simulate(opts: &Options) -> Result<CsvDoc, ExperimentError> {
    let n = opts.u16("n", 256)?;
    let c_e = resolve_censors(opts, n)?;
    if c_e > n {
        return Err(ExperimentError::InvalidInput(format!(
            "ce = {c_e} exceeds n = {n}"
        )));
    }
    let payload = match opts.optional("payload_file") {
        Some(path) => {
            let bytes = std::fs::read(&path)
                .map_err(|e| ExperimentError::InvalidInput(format!("payload_file {path}: {e}")))?;
            if bytes.is_empty() {
                return Err(ExperimentError::InvalidInput(format!(
                    "payload_file {path} is empty"
                )));
            }
            SimPayload::Fixed(bytes)
        }
        None => {
            let len = opts.u64("payload_bytes", 4096)? as usize;
            if len == 0 {
                return Err(ExperimentError::InvalidInput(
                    "payload_bytes must be >= 1".into(),
                ));
            }
            SimPayload::Random { len }
        }
    };
    let message_len = payload.len() + 32;
    let (config, s, ell_sym, threshold) = strategy_from(opts, message_len)?;
    if config.lanes > n {
        return Err(ExperimentError::InvalidInput(format!(
            "m = {} exceeds n = {n}",
            config.lanes
        )));
    }
    let variant = opts.string("variant", "rateless");
    let cfg = SimConfig {
        n,
        c_e,
        adversary_collects: opts.bool("collect", true)?,
        config,
        payload,
        fee_per_byte: opts.u64("fee_per_byte", 1)?,
        max_slots: opts.u64("max_slots", 10_000)?,
    };
    let trials = opts.u64("trials", 1)?;
    if trials == 0 {
        return Err(ExperimentError::InvalidInput("trials must be >= 1".into()));
    }
    let seed = opts.u64("seed", 0)?;
    let results = simulate_many(&cfg, trials, seed);
    let rows = results
        .iter()
        .enumerate()
        .map(|(i, r)| sim_row(i as u64, r, &variant, &cfg, s, ell_sym, threshold))
        .collect();
    Ok(CsvDoc {
        command: Command::Simulate,
        meta: Vec::new(),
        columns: SIMULATE_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

fn sim_row(
    trial: u64,
    r: &SimResult,
    variant: &str,
    cfg: &SimConfig,
    s: u32,
    ell_sym: usize,
    threshold: u64,
) -> Vec<String> {
    let slots = match r.outcome {
        SimOutcome::Included { slot } => slot.to_string(),
        _ => String::new(),
    };
    vec![
        trial.to_string(),
        r.seed.to_string(),
        variant.to_string(),
        cfg.n.to_string(),
        cfg.c_e.to_string(),
        cfg.config.lanes.to_string(),
        s.to_string(),
        ell_sym.to_string(),
        threshold.to_string(),
        slots,
        matches!(r.outcome, SimOutcome::Included { .. }).to_string(),
        r.bytes_published.to_string(),
        r.adversary_decode_slot
            .map_or(String::new(), |s| s.to_string()),
    ]
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

pub const SWEEP_COLUMNS: [&str; 21] = [
    "axis",
    "value",
    "variant",
    "n",
    "c_e",
    "delta",
    "S",
    "m",
    "k",
    "s",
    "ell_sym",
    "K",
    "L_pub",
    "L_min",
    "overhead",
    "floor",
    "success_prob",
    "early_decode_prob",
    "m_closed_form",
    "sim_trials",
    "sim_success_rate",
];

fn sweep_defaults(axis: &str) -> Result<Vec<String>, ExperimentError> {
    let vals: Vec<String> = match axis {
        "S" => (8..=22).map(|e| (1u64 << e).to_string()).collect(),
        "m" => [1u16, 2, 4, 8, 12, 16, 20, 24, 28, 32, 40, 48, 64, 96, 128]
            .iter()
            .map(|v| v.to_string())
            .collect(),
        "s" => (1..=16u32).map(|v| v.to_string()).collect(),
        "ce_ratio" => ["0.05", "0.1", "0.2", "0.3", "0.4"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        "delta" => ["0.01", "0.001", "0.000001", "0.000000001", "0.000000000001"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        "n" => [16u16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192]
            .iter()
            .map(|v| v.to_string())
            .collect(),
        other => {
            return Err(ExperimentError::InvalidInput(format!(
                "unknown axis `{other}`; expected one of S, m, s, ce_ratio, delta, n"
            )))
        }
    };
    Ok(vals)
}

fn floor_for(variant: Variant, n: u16, c_e: u16, epsilon: f64, m_opt: u16) -> Option<f64> {
    let fv = match variant {
        Variant::Naive => FloorVariant::Naive { m_opt },
        Variant::Mds => FloorVariant::Mds,
        Variant::Rateless => FloorVariant::Rateless { epsilon },
    };
    overhead_floor(fv, n, c_e).ok()
}

fn sweep_plan_row(
    axis: &str,
    value: &str,
    inputs: &PlanInputs,
    p: &PlanResult,
    sim: Option<(u64, f64)>,
) -> Vec<String> {
    let floor = floor_for(p.variant, inputs.n, inputs.c_e, inputs.epsilon, p.lanes);
    vec![
        axis.to_string(),
        value.to_string(),
        p.variant.to_string(),
        inputs.n.to_string(),
        inputs.c_e.to_string(),
        format_float(inputs.delta),
        inputs.payload.to_string(),
        p.lanes.to_string(),
        p.shares_needed.map_or(String::new(), |k| k.to_string()),
        p.symbols_per_bundle
            .map_or(String::new(), |s| s.to_string()),
        p.symbol_len.map_or(String::new(), |l| l.to_string()),
        p.decode_threshold.map_or(String::new(), |k| k.to_string()),
        p.cost.published.to_string(),
        p.cost.minimum.to_string(),
        format_float(p.cost.overhead),
        floor.map_or(String::new(), format_float),
        format_float(p.success_prob),
        format_float(p.early_decode_prob),
        format_float(p.m_closed_form),
        sim.map_or(String::new(), |(t, _)| t.to_string()),
        sim.map_or(String::new(), |(_, r)| format_float(r)),
    ]
}

/// Monte Carlo check of one planned point, when the sweep asks for it.
fn simulate_plan_point(
    inputs: &PlanInputs,
    p: &PlanResult,
    trials: u64,
    seed: u64,
) -> Option<(u64, f64)> {
    let message_len = inputs.payload as usize;
    let payload_len = message_len.checked_sub(32)?;
    if payload_len == 0 {
        return None;
    }
    let strategy = match p.variant {
        Variant::Naive => Strategy::Naive,
        Variant::Mds => Strategy::Mds(
            MdsParams::new(p.lanes.max(p.shares_needed?), p.shares_needed?, message_len).ok()?,
        ),
        Variant::Rateless => Strategy::Rateless {
            params: RatelessParams::new(message_len, p.symbol_len? as usize, inputs.epsilon)
                .ok()?,
            symbols_per_bundle: p.symbols_per_bundle?,
        },
    };
    let cfg = SimConfig {
        n: inputs.n,
        c_e: inputs.c_e,
        adversary_collects: false,
        config: StrategyConfig {
            lanes: p.lanes,
            strategy,
        },
        payload: SimPayload::Random { len: payload_len },
        fee_per_byte: 1,
        max_slots: 1,
    };
    let results = simulate_many(&cfg, trials, seed);
    let successes = results
        .iter()
        .filter(|r| matches!(r.outcome, SimOutcome::Included { slot: 1 }))
        .count();
    Some((trials, successes as f64 / trials as f64))
}

fn run_sweep(opts: &Options) -> Result<CsvDoc, ExperimentError> {
    let axis = opts.string("axis", "S");
    let values = match opts.optional("values") {
        Some(list) => list.split(',').map(|v| v.trim().to_string()).collect(),
        None => {
            let vals = sweep_defaults(&axis)?;
            opts.record("values", vals.join(","));
            vals
        }
    };
    let with_sim = opts.bool("with_sim", false)?;
    let trials = opts.u64("trials", 2000)?;
    let seed = opts.u64("seed", 42)?;
    let base = plan_inputs_from(opts)?;

    let mut rows = Vec::new();
    let mut emit = |inputs: &PlanInputs, value: &str| {
        for (_, plan) in compare_strategies(inputs).rows {
            let Ok(p) = plan else { continue }; // infeasible points leave no row
            let sim = if with_sim {
                simulate_plan_point(inputs, &p, trials, seed)
            } else {
                None
            };
            rows.push(sweep_plan_row(&axis, value, inputs, &p, sim));
        }
    };

    match axis.as_str() {
        "S" => {
            for v in &values {
                let payload: u64 = parse_value(v, "S")?;
                let mut inputs = base.clone();
                inputs.payload = payload;
                emit(&inputs, v);
            }
        }
        "ce_ratio" => {
            for v in &values {
                let ratio: f64 = parse_value(v, "ce_ratio")?;
                if !(0.0..1.0).contains(&ratio) {
                    return Err(ExperimentError::InvalidInput(format!(
                        "ce_ratio = {ratio} out of [0, 1)"
                    )));
                }
                let mut inputs = base.clone();
                inputs.c_e = (ratio * base.n as f64).round() as u16;
                emit(&inputs, v);
            }
        }
        "delta" => {
            for v in &values {
                let delta: f64 = parse_value(v, "delta")?;
                let mut inputs = base.clone();
                inputs.delta = delta;
                emit(&inputs, v);
            }
        }
        "n" => {
            let ratio = opts.f64("ce_ratio", base.c_e as f64 / base.n as f64)?;
            for v in &values {
                let n: u16 = parse_value(v, "n")?;
                let mut inputs = base.clone();
                inputs.n = n;
                inputs.c_e = (ratio * n as f64).round() as u16;
                emit(&inputs, v);
            }
        }
        "m" => {
            // Fix each variant's shape at the planned optimum, then walk the
            // fanout and report the success curve.
            let cmp = compare_strategies(&base);
            for v in &values {
                let m: u16 = parse_value(v, "m")?;
                if m == 0 || m > base.n {
                    continue;
                }
                for (variant, plan) in &cmp.rows {
                    let Ok(p) = plan else { continue };
                    let honest =
                        HypergeomSpec::new(base.n as u64, (base.n - base.c_e) as u64, m as u64);
                    let (needed, s, cost_variant) = match variant {
                        Variant::Naive => (1u64, 1u32, CostVariant::Naive { lanes: m }),
                        Variant::Mds => {
                            let k = p.shares_needed.expect("mds plan has k");
                            (
                                k as u64,
                                1,
                                CostVariant::Mds {
                                    lanes: m,
                                    shares_needed: k,
                                },
                            )
                        }
                        Variant::Rateless => {
                            let s = p.symbols_per_bundle.expect("rateless plan has s");
                            let threshold = p.decode_threshold.expect("rateless plan has K");
                            (
                                threshold.div_ceil(s as u64),
                                s,
                                CostVariant::Rateless {
                                    lanes: m,
                                    symbols_per_bundle: s,
                                    symbol_len: p.symbol_len.expect("rateless plan has ell"),
                                    decode_threshold: threshold,
                                },
                            )
                        }
                    };
                    let success = if needed > m as u64 {
                        0.0
                    } else {
                        (1.0 - p.delta_code_used) * honest.tail_ge(needed)
                    };
                    let cost = bandwidth_cost(
                        &cost_variant,
                        base.payload,
                        base.header_bytes,
                        base.symbol_meta_bytes,
                    );
                    let early = crate::analysis::early_decode_prob(
                        base.n,
                        base.c_e,
                        m,
                        s,
                        match variant {
                            Variant::Naive => 1,
                            Variant::Mds => p.shares_needed.unwrap() as u64,
                            Variant::Rateless => p.decode_threshold.unwrap(),
                        },
                    );
                    let mut fixed = p.clone();
                    fixed.lanes = m;
                    fixed.m_exact = m;
                    fixed.cost = cost;
                    fixed.success_prob = success;
                    fixed.early_decode_prob = early;
                    rows.push(sweep_plan_row(&axis, v, &base, &fixed, None));
                }
            }
        }
        "s" => {
            // Rateless only: each s changes the honest-lane requirement.
            // Default the symbol size to the planner's choice so the sweep
            // is feasible at the base inputs.
            let planned_ell = plan_rateless(&base)
                .ok()
                .and_then(|p| p.symbol_len)
                .unwrap_or(256);
            let ell = opts.u32("ell_sym", planned_ell)?;
            let threshold =
                decode_threshold_exact(base.payload as usize, ell as usize, micros(base.epsilon))
                    as u64;
            let blocks = (base.payload as usize).div_ceil(ell as usize);
            let delta_code = base
                .delta_code
                .unwrap_or_else(|| crate::codec::delta_code_lookup(blocks, threshold as usize));
            for v in &values {
                let s: u32 = parse_value(v, "s")?;
                if s == 0 {
                    continue;
                }
                let needed = threshold.div_ceil(s as u64);
                let delta_eff = base.delta - delta_code;
                if delta_eff <= 0.0 {
                    continue;
                }
                let Ok(m) = exact_min_m(base.n, base.c_e, delta_eff, needed) else {
                    continue;
                };
                let cost = bandwidth_cost(
                    &CostVariant::Rateless {
                        lanes: m,
                        symbols_per_bundle: s,
                        symbol_len: ell,
                        decode_threshold: threshold,
                    },
                    base.payload,
                    base.header_bytes,
                    base.symbol_meta_bytes,
                );
                let honest =
                    HypergeomSpec::new(base.n as u64, (base.n - base.c_e) as u64, m as u64);
                let p = PlanResult {
                    variant: Variant::Rateless,
                    lanes: m,
                    shares_needed: None,
                    symbols_per_bundle: Some(s),
                    symbol_len: Some(ell),
                    decode_threshold: Some(threshold),
                    m_exact: m,
                    m_closed_form: crate::planner::closed_form_m(
                        1.0 - base.c_e as f64 / base.n as f64,
                        delta_eff,
                        needed,
                    )
                    .map_err(ExperimentError::from)?,
                    cost,
                    success_prob: (1.0 - delta_code) * honest.tail_ge(needed),
                    early_decode_prob: crate::analysis::early_decode_prob(
                        base.n, base.c_e, m, s, threshold,
                    ),
                    mds_clamp_bound: false,
                    delta_code_used: delta_code,
                };
                rows.push(sweep_plan_row(&axis, v, &base, &p, None));
            }
        }
        other => {
            return Err(ExperimentError::InvalidInput(format!(
                "unknown axis `{other}`"
            )))
        }
    }

    Ok(CsvDoc {
        command: Command::Sweep,
        meta: Vec::new(),
        columns: SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

fn micros(epsilon: f64) -> u64 {
    (epsilon * 1e6).round() as u64
}

fn parse_value<T: std::str::FromStr>(v: &str, what: &str) -> Result<T, ExperimentError> {
    v.parse()
        .map_err(|_| ExperimentError::InvalidInput(format!("{what}: `{v}` does not parse")))
}

// ---------------------------------------------------------------------------
// codec-bench
// ---------------------------------------------------------------------------

pub const CODEC_BENCH_COLUMNS: [&str; 8] = [
    "blocks",
    "K",
    "trials",
    "failures",
    "rate",
    "ell_sym",
    "encode_mults_per_symbol",
    "decode_mults",
];

fn run_codec_bench(opts: &Options) -> Result<CsvDoc, ExperimentError> {
    let blocks_list = opts.u32_list("blocks", &[4, 8, 16, 20, 32])?;
    let margins = opts.u32_list("margins", &[0, 1, 2])?;
    let ell = opts.u32("ell_sym", 64)? as usize;
    let trials = opts.u64("trials", 10_000)?;
    if trials == 0 {
        return Err(ExperimentError::InvalidInput("trials must be >= 1".into()));
    }
    let seed = opts.u64("seed", 23)?;
    let mut rows = Vec::new();
    for &blocks in &blocks_list {
        let blocks = blocks as usize;
        for &margin in &margins {
            let threshold = blocks + margin as usize;
            let params = RatelessParams::with_threshold(blocks * ell, ell, threshold)
                .map_err(|e| ExperimentError::InvalidInput(e.to_string()))?;
            let est = estimate_delta_code(&params, trials, seed);
            // Deterministic operation counts for one honest encode/decode at
            // this geometry.
            let mut msg_rng = DeterministicRng::from_seed(seed ^ 0xC0DE);
            let mut bytes = vec![0u8; params.message_len];
            msg_rng.fill_bytes(&mut bytes);
            let message = Message::new(bytes).expect("non-empty");
            let encode_mults: u64 = coefficient_row(&params, 0)
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(b, _)| {
                    let start = b * ell;
                    (params.message_len - start).min(ell) as u64
                })
                .sum();
            let symbols: Vec<_> = (0..threshold as u64)
                .map(|j| rateless_symbol(&message, j, &params))
                .collect();
            let coeffs: Vec<Vec<u8>> = symbols
                .iter()
                .map(|s| coefficient_row(&params, s.index))
                .collect();
            let values: Vec<Vec<u8>> = symbols.iter().map(|s| s.value.clone()).collect();
            let report = gf256::solve(coeffs, values, blocks);
            rows.push(vec![
                blocks.to_string(),
                threshold.to_string(),
                est.trials.to_string(),
                est.failures.to_string(),
                format_float(est.rate()),
                ell.to_string(),
                encode_mults.to_string(),
                report.multiplies.to_string(),
            ]);
        }
    }
    Ok(CsvDoc {
        command: Command::CodecBench,
        meta: Vec::new(),
        columns: CODEC_BENCH_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(pairs: &[(&str, &str)]) -> Options {
        Options::new(
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
    }

    #[test]
    fn config_sections_scope_keys() {
        let text = "seed = 7\n[plan]\nn = 64\n# comment\n\n[simulate]\nn = 32\n";
        let sections = parse_config(text).unwrap();
        assert_eq!(sections[""]["seed"], "7");
        assert_eq!(sections["plan"]["n"], "64");
        assert_eq!(sections["simulate"]["n"], "32");
        assert!(parse_config("no equals here").is_err());
    }

    #[test]
    fn overrides_beat_file_values() {
        let file = "[plan]\nn = 64\ndelta = 0.001\n";
        let o = Options::merged(
            Some(file),
            Command::Plan,
            &[("n".to_string(), "128".to_string())],
        )
        .unwrap();
        assert_eq!(o.u16("n", 256).unwrap(), 128);
        assert_eq!(o.f64("delta", 1e-9).unwrap(), 0.001);
    }

    #[test]
    fn every_consumed_key_is_echoed() {
        let o = opts(&[("n", "64")]);
        let _ = o.u16("n", 256).unwrap();
        let _ = o.f64("delta", 1e-9).unwrap();
        let resolved: BTreeMap<_, _> = o.resolved().into_iter().collect();
        assert_eq!(resolved["n"], "64");
        assert_eq!(resolved["delta"], "0.000000001");
    }

    #[test]
    fn plan_emits_a_row_per_variant() {
        let o = opts(&[("S", "4096")]);
        let doc = run_command(Command::Plan, &o).unwrap();
        assert_eq!(doc.rows.len(), 3);
        let rendered = doc.render();
        assert!(rendered.starts_with("# sedna "));
        assert!(rendered.contains("\n# command = plan\n"));
        assert!(rendered.contains("\nnaive,256,32,"));
    }

    #[test]
    fn plan_rejects_bad_budgets() {
        let o = opts(&[("delta", "0.000000000001"), ("delta_code", "0.000000001")]);
        match run_command(Command::Plan, &o) {
            Err(ExperimentError::Infeasible(msg)) => {
                assert!(msg.contains("delta"), "{msg}");
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn simulate_rows_are_reproducible() {
        let o = || {
            opts(&[
                ("n", "16"),
                ("ce", "2"),
                ("variant", "rateless"),
                ("m", "6"),
                ("s", "2"),
                ("ell_sym", "64"),
                ("payload_bytes", "400"),
                ("trials", "20"),
                ("seed", "9"),
                ("max_slots", "50"),
            ])
        };
        let a = run_command(Command::Simulate, &o()).unwrap().render();
        let b = run_command(Command::Simulate, &o()).unwrap().render();
        assert_eq!(a, b);
        assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 21);
    }

    #[test]
    fn rerun_from_header_is_byte_identical() {
        for (cmd, pairs) in [
            (Command::Plan, vec![("S", "2048")]),
            (
                Command::Simulate,
                vec![
                    ("n", "16"),
                    ("ce", "2"),
                    ("m", "6"),
                    ("payload_bytes", "300"),
                    ("trials", "5"),
                ],
            ),
            (Command::Sweep, vec![("axis", "ce_ratio"), ("S", "8192")]),
            (
                Command::CodecBench,
                vec![("blocks", "4,8"), ("margins", "0,1"), ("trials", "200")],
            ),
        ] {
            let o = opts(&pairs);
            let original = run_command(cmd, &o).unwrap().render();
            let rerun = rerun_csv(&original).unwrap();
            assert_eq!(original, rerun, "command {:?}", cmd);
        }
    }

    #[test]
    fn sweep_unknown_axis_is_rejected() {
        let o = opts(&[("axis", "bogus")]);
        assert!(matches!(
            run_command(Command::Sweep, &o),
            Err(ExperimentError::InvalidInput(_))
        ));
    }

    #[test]
    fn sweep_over_s_shrinks_required_honest_lanes() {
        let o = opts(&[("axis", "s"), ("values", "1,2,4,8")]);
        let doc = run_command(Command::Sweep, &o).unwrap();
        assert!(!doc.rows.is_empty(), "default symbol size must be feasible");
        // Larger s means each row's fanout can only shrink.
        let m_col = doc.columns.iter().position(|c| c == "m").unwrap();
        let ms: Vec<u64> = doc.rows.iter().map(|r| r[m_col].parse().unwrap()).collect();
        assert!(ms.windows(2).all(|w| w[1] <= w[0]), "{ms:?}");
    }

    #[test]
    fn censor_resolution_prefers_explicit_ce() {
        let o = opts(&[("ce", "5"), ("f", "5"), ("c", "7")]);
        assert_eq!(resolve_censors(&o, 16).unwrap(), 5);
        let o = opts(&[("f", "5"), ("c", "7")]);
        assert_eq!(resolve_censors(&o, 16).unwrap(), 12);
        let o = opts(&[("f", "5")]);
        assert!(resolve_censors(&o, 16).is_err());
    }

    #[test]
    fn codec_bench_zero_trials_rejected() {
        let o = opts(&[("trials", "0")]);
        assert!(run_command(Command::CodecBench, &o).is_err());
    }
}
