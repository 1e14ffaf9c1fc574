use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fedmife::bench::{run_bench, BenchSpec, DEFAULT_RAM_BUDGET};
use fedmife::correctness::run_correctness;
use fedmife::formats::{self, MemRow, Scenario};
use fedmife::{keys, sweep, ChunkedThreads, Error, Result, WallClock};
use fedmife_core::ipfe::SchemeId;
use fedmife_core::memcost::{self, GIB, KIB, MIB};
use fedmife_core::params::{ParamPreset, PresetId};

#[derive(Parser)]
#[command(
    name = "fedmife",
    version,
    about = "Multi-input functional encryption for federated aggregation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serialized key and ciphertext sizes next to the memory formulas.
    Keys(Common),
    /// Randomized MIFE and aggregation checks against plaintext oracles.
    Correctness {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 300)]
        trials: usize,
    },
    /// Times one protocol round per phase.
    Bench(Common),
    /// Runs a training scenario and writes its transcript (JSON lines).
    Train(Common),
    /// Evaluates the memory-cost formulas.
    Memcost(Common),
    /// Rounds to convergence per precision, e.g. `--delta 1-6`.
    Sweep(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// ddh-selective, ddh-adaptive, lwe-selective, lwe-adaptive, or `all`.
    #[arg(long)]
    scheme: Option<String>,
    /// toy, toy-zero or table1.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    clients: Option<usize>,
    #[arg(long)]
    params: Option<usize>,
    /// Decimal digits; `sweep` also accepts a range `a-b`.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = ChunkedThreads::DEFAULT_CHUNKS)]
    chunks: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// GiB the ciphertexts of one benchmark round may occupy.
    #[arg(long)]
    ram_budget: Option<f64>,
    /// TOML scenario; explicit flags override its fields.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

impl Common {
    fn scenario(&self) -> Result<Scenario> {
        let mut s = match &self.scenario {
            Some(path) => Scenario::from_toml(&std::fs::read_to_string(path)?)?,
            None => Scenario::default(),
        };
        if let Some(v) = &self.scheme {
            s.scheme = v.clone();
        }
        if let Some(v) = &self.preset {
            s.preset = v.clone();
        }
        if let Some(v) = self.clients {
            s.clients = v;
        }
        if let Some(v) = self.params {
            s.params = v;
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(d) = &self.delta {
            if !d.contains('-') {
                s.delta = parse_u32(d)?;
            }
        }
        Ok(s)
    }

    fn schemes(&self, s: &Scenario) -> Result<Vec<SchemeId>> {
        match self.scheme.as_deref() {
            Some("all") => Ok(SchemeId::ALL.to_vec()),
            _ => Ok(vec![s.scheme.parse()?]),
        }
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn parse_u32(s: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::Usage(format!("not a number: `{s}`")))
}

fn delta_range(common: &Common, s: &Scenario) -> Result<std::ops::RangeInclusive<u32>> {
    match common.delta.as_deref().and_then(|d| d.split_once('-')) {
        Some((a, b)) => Ok(parse_u32(a)?..=parse_u32(b)?),
        None => Ok(s.delta..=s.delta),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Keys(c) => {
            let s = c.scenario()?;
            let mut rows = Vec::new();
            for scheme in c.schemes(&s)? {
                rows.extend(keys::key_sizes(scheme, s.preset.parse()?, s.clients, s.seed)?);
            }
            formats::write_csv(&rows, c.output()?)?;
        }
        Command::Correctness { common: c, trials } => {
            let s = c.scenario()?;
            let mut ok = true;
            let mut reports = Vec::new();
            for scheme in c.schemes(&s)? {
                let r = run_correctness(scheme, s.preset.parse()?, trials, s.seed)?;
                eprintln!(
                    "{} {}: {}/{} exact, {} noise-flagged, {} mismatches; aggregation {}/{}",
                    r.scheme,
                    r.preset,
                    r.exact,
                    r.trials,
                    r.noise_flagged,
                    r.mismatches,
                    r.aggregation_trials - r.aggregation_mismatches,
                    r.aggregation_trials
                );
                ok &= r.passed();
                reports.push(r);
            }
            formats::write_csv(&reports, c.output()?)?;
            return Ok(ok);
        }
        Command::Bench(c) => {
            let s = c.scenario()?;
            let budget = c
                .ram_budget
                .map_or(DEFAULT_RAM_BUDGET, |g| (g * (1u64 << 30) as f64) as u64);
            let mut rows = Vec::new();
            for scheme in c.schemes(&s)? {
                let out = run_bench(&BenchSpec {
                    scheme,
                    preset: s.preset.parse()?,
                    clients: s.clients,
                    params: s.params,
                    chunks: c.chunks,
                    seed: s.seed,
                    ram_budget: budget,
                })?;
                eprintln!("{scheme}: setup {:.3} s (not in the records)", out.setup_seconds);
                rows.extend(out.records);
            }
            formats::write_csv(&rows, c.output()?)?;
        }
        Command::Train(c) => {
            let s = c.scenario()?;
            let t = sweep::train_with(&s, s.config()?, &ChunkedThreads::new(c.chunks), &WallClock::new())?;
            formats::write_transcript(&t, c.output()?)?;
            eprintln!(
                "{} rounds, final a_mu {:.6}, {}",
                t.rounds.len(),
                t.rounds.last().map_or(0.0, |r| r.a_mu),
                if t.converged {
                    "converged"
                } else {
                    "stopped at max_rounds"
                }
            );
        }
        Command::Memcost(c) => {
            let s = c.scenario()?;
            let preset: PresetId = s.preset.parse()?;
            let schemes = if c.scheme.is_none() {
                SchemeId::ALL.to_vec()
            } else {
                c.schemes(&s)?
            };
            let mut rows = Vec::new();
            for scheme in schemes {
                let p = ParamPreset::new(scheme, preset)?;
                let cost = memcost::preset_cost(&p, s.clients as u64);
                let round = cost.round_ciphertext_bits(s.clients as u64, s.params as u64);
                eprintln!(
                    "{scheme:14} csk {:>10.2} KiB  sk_y {:>10.2} KiB  ct {:>9.2} KiB  round {:>8.3} MiB ({:.3} GiB)",
                    memcost::in_units(cost.client_key_bits, KIB),
                    memcost::in_units(cost.functional_key_bits, KIB),
                    memcost::in_units(cost.ciphertext_bits, KIB),
                    memcost::in_units(round, MIB),
                    memcost::in_units(round, GIB),
                );
                rows.push(MemRow {
                    scheme: scheme.as_str().into(),
                    preset: preset.as_str().into(),
                    n: s.clients as u64,
                    l: s.params as u64,
                    client_key_bits: cost.client_key_bits,
                    functional_key_bits: cost.functional_key_bits,
                    ciphertext_bits: cost.ciphertext_bits,
                    round_ciphertext_bits: round,
                });
            }
            formats::write_csv(&rows, c.output()?)?;
        }
        Command::Sweep(c) => {
            let s = c.scenario()?;
            let rows = sweep::delta_sweep(delta_range(&c, &s)?, &s, &ChunkedThreads::new(c.chunks))?;
            formats::write_csv(&rows, c.output()?)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
