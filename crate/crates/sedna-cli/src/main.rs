//! `sedna`: plan submission strategies, run dissemination simulations, sweep
//! parameter grids, and measure codec constants. Every command writes a CSV
//! whose header embeds the fully resolved parameter set; rerunning that
//! header reproduces the file byte for byte.
//!
//! Exit codes: 0 success, 1 runtime error, 2 invalid or infeasible input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sedna_core::experiments::{run_command, Command as Cmd, ExperimentError, Options};

/// Default output directory when `--out` is not given.
const OUT_DIR_ENV: &str = "SEDNA_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "sedna",
    about = "Coded transaction dissemination: planning, simulation, and experiments",
    version
)]
struct Cli {
    /// Flat config file (`key = value` lines, optional `[command]` sections).
    /// Flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output CSV path; `-` for stdout. Defaults to stdout, or to
    /// `$SEDNA_OUT_DIR/<command>.csv` when that variable is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Commands,
}

/// `key=value` pairs forwarded to the experiment runner.
#[derive(Args, Clone)]
struct CommonParams {
    /// Validator (lane) count.
    #[arg(long)]
    n: Option<u16>,
    /// Effective censored lane count (wins over --f/--c).
    #[arg(long)]
    ce: Option<u16>,
    /// Byzantine bound, used with --c to derive the effective censor count.
    #[arg(long)]
    f: Option<u16>,
    /// User censorship-tolerance parameter, used with --f.
    #[arg(long)]
    c: Option<u16>,
    /// Target per-slot failure probability.
    #[arg(long)]
    delta: Option<f64>,
    /// Residual decode-failure budget, or `auto` for the measured table.
    #[arg(long)]
    delta_code: Option<String>,
    /// Coded message size in bytes (sigma plus payload).
    #[arg(long = "S")]
    payload: Option<u64>,
    /// Per-bundle header overhead in bytes.
    #[arg(long)]
    mh: Option<u64>,
    /// Per-symbol metadata in bytes.
    #[arg(long)]
    ms: Option<u64>,
    /// Rateless coding overhead epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Candidate symbol sizes, comma separated.
    #[arg(long)]
    ell_grid: Option<String>,
    /// Largest symbols-per-bundle considered by the planner.
    #[arg(long)]
    s_max: Option<u32>,
}

impl CommonParams {
    fn pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        push(&mut out, "n", &self.n);
        push(&mut out, "ce", &self.ce);
        push(&mut out, "f", &self.f);
        push(&mut out, "c", &self.c);
        push(&mut out, "delta", &self.delta);
        push(&mut out, "delta_code", &self.delta_code);
        push(&mut out, "S", &self.payload);
        push(&mut out, "mh", &self.mh);
        push(&mut out, "ms", &self.ms);
        push(&mut out, "epsilon", &self.epsilon);
        push(&mut out, "ell_grid", &self.ell_grid);
        push(&mut out, "s_max", &self.s_max);
        out
    }
}

fn push<T: ToString>(out: &mut Vec<(String, String)>, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        out.push((key.to_string(), v.to_string()));
    }
}

#[derive(Subcommand)]
enum Commands {
    /// Choose bandwidth-minimal parameters per strategy.
    Plan {
        #[command(flatten)]
        common: CommonParams,
        /// naive | mds | rateless | all
        #[arg(long)]
        variant: Option<String>,
    },
    /// Run seeded dissemination trials; one CSV row per trial.
    Simulate {
        #[command(flatten)]
        common: CommonParams,
        /// naive | mds | rateless
        #[arg(long)]
        variant: Option<String>,
        /// Lanes contacted per slot.
        #[arg(long)]
        m: Option<u16>,
        /// Fixed-rate reconstruction threshold.
        #[arg(long)]
        k: Option<u16>,
        /// Total fixed-rate shares.
        #[arg(long)]
        shares_total: Option<u16>,
        /// Rateless symbols per bundle.
        #[arg(long)]
        s: Option<u32>,
        /// Rateless symbol size in bytes.
        #[arg(long)]
        ell_sym: Option<u32>,
        /// Payload size in bytes (random payload derived from the seed).
        #[arg(long)]
        payload_bytes: Option<u64>,
        /// Read the payload from a file instead.
        #[arg(long)]
        payload_file: Option<PathBuf>,
        /// Whether the adversary collects symbols addressed to its lanes.
        #[arg(long)]
        collect: Option<bool>,
        #[arg(long)]
        fee_per_byte: Option<u64>,
        #[arg(long)]
        max_slots: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate all strategies across one parameter axis.
    Sweep {
        #[command(flatten)]
        common: CommonParams,
        /// One of: S, m, s, ce_ratio, delta, n.
        #[arg(long)]
        axis: Option<String>,
        /// Grid points, comma separated (axis-specific defaults otherwise).
        #[arg(long)]
        values: Option<String>,
        /// Also Monte Carlo each planned point.
        #[arg(long)]
        with_sim: Option<bool>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Censor ratio used by the n axis.
        #[arg(long)]
        ce_ratio: Option<f64>,
        /// Symbol size used by the s axis.
        #[arg(long)]
        ell_sym: Option<u32>,
    },
    /// Measure rateless decode-failure rates and operation counts.
    CodecBench {
        /// Source block counts, comma separated.
        #[arg(long)]
        blocks: Option<String>,
        /// Threshold margins over the block count, comma separated.
        #[arg(long)]
        margins: Option<String>,
        #[arg(long)]
        ell_sym: Option<u32>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn collect_overrides(commands: &Commands) -> (Cmd, Vec<(String, String)>) {
    match commands {
        Commands::Plan { common, variant } => {
            let mut pairs = common.pairs();
            push(&mut pairs, "variant", variant);
            (Cmd::Plan, pairs)
        }
        Commands::Simulate {
            common,
            variant,
            m,
            k,
            shares_total,
            s,
            ell_sym,
            payload_bytes,
            payload_file,
            collect,
            fee_per_byte,
            max_slots,
            trials,
            seed,
        } => {
            let mut pairs = common.pairs();
            push(&mut pairs, "variant", variant);
            push(&mut pairs, "m", m);
            push(&mut pairs, "k", k);
            push(&mut pairs, "shares_total", shares_total);
            push(&mut pairs, "s", s);
            push(&mut pairs, "ell_sym", ell_sym);
            push(&mut pairs, "payload_bytes", payload_bytes);
            push(
                &mut pairs,
                "payload_file",
                &payload_file.as_ref().map(|p| p.display().to_string()),
            );
            push(&mut pairs, "collect", collect);
            push(&mut pairs, "fee_per_byte", fee_per_byte);
            push(&mut pairs, "max_slots", max_slots);
            push(&mut pairs, "trials", trials);
            push(&mut pairs, "seed", seed);
            (Cmd::Simulate, pairs)
        }
        Commands::Sweep {
            common,
            axis,
            values,
            with_sim,
            trials,
            seed,
            ce_ratio,
            ell_sym,
        } => {
            let mut pairs = common.pairs();
            push(&mut pairs, "axis", axis);
            push(&mut pairs, "values", values);
            push(&mut pairs, "with_sim", with_sim);
            push(&mut pairs, "trials", trials);
            push(&mut pairs, "seed", seed);
            push(&mut pairs, "ce_ratio", ce_ratio);
            push(&mut pairs, "ell_sym", ell_sym);
            (Cmd::Sweep, pairs)
        }
        Commands::CodecBench {
            blocks,
            margins,
            ell_sym,
            trials,
            seed,
        } => {
            let mut pairs = Vec::new();
            push(&mut pairs, "blocks", blocks);
            push(&mut pairs, "margins", margins);
            push(&mut pairs, "ell_sym", ell_sym);
            push(&mut pairs, "trials", trials);
            push(&mut pairs, "seed", seed);
            (Cmd::CodecBench, pairs)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let file_text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };

    let (command, overrides) = collect_overrides(&cli.command);
    let opts = match Options::merged(file_text.as_deref(), command, &overrides) {
        Ok(o) => o,
        Err(e) => return report(e),
    };
    let doc = match run_command(command, &opts) {
        Ok(d) => d,
        Err(e) => return report(e),
    };
    let rendered = doc.render();

    let out_path = cli.out.or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(|dir| PathBuf::from(dir).join(format!("{}.csv", command.name())))
    });
    match out_path {
        None => {
            print!("{rendered}");
            ExitCode::SUCCESS
        }
        Some(p) if p.as_os_str() == "-" => {
            print!("{rendered}");
            ExitCode::SUCCESS
        }
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    if let Err(e) = std::fs::create_dir_all(parent) {
                        eprintln!("error: cannot create {}: {e}", parent.display());
                        return ExitCode::from(1);
                    }
                }
            }
            match std::fs::write(&p, rendered) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", p.display());
                    ExitCode::from(1)
                }
            }
        }
    }
}

fn report(e: ExperimentError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        ExperimentError::InvalidInput(_) | ExperimentError::Infeasible(_) => ExitCode::from(2),
    }
}
