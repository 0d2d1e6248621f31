//! Configuration: command-line flags, optional TOML file, and environment
//! overrides. Precedence is flags, then `TORBIT_WORKERS` / `TORBIT_SIEVE_CAP`
//! environment variables, then the config file, then built-in defaults. The
//! same structs serve clap and the TOML tables, so every flag has a config
//! key of the same name.

use crate::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::path::PathBuf;
use torbit_core::bounds::ScanConfig;
use torbit_core::orbit::{Guards, OrbitKind};
use torbit_core::totient::DEFAULT_SIEVE_CAP;

#[derive(Parser, Debug)]
#[command(
    name = "torbit",
    version,
    about = "Orbit, bound, and prime-product experiments over iterated totients"
)]
pub struct Cli {
    /// TOML config file; flags override file values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for scan parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output format; csv covers scan statistics only.
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    /// Checkpoint file for resumable scans.
    #[arg(long, global = true)]
    pub checkpoint: Option<PathBuf>,
    /// Write records to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized subroutines. Factorization derives its random
    /// sequence from each input, so this is echoed for provenance rather
    /// than consumed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Largest phi sieve table the run may allocate (entries).
    #[arg(long, global = true)]
    pub sieve_cap: Option<u64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    JsonLines,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    PhiSum,
    DigitSquareSum,
    MaxPlusC,
}

impl From<KindArg> for OrbitKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::PhiSum => OrbitKind::PhiSum,
            KindArg::DigitSquareSum => OrbitKind::DigitSquareSum,
            KindArg::MaxPlusC => OrbitKind::MaxPlusC,
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Run one orbit to a cycle or guard.
    Orbit(OrbitArgs),
    /// Iterated-phi chain of a single start value, with its length bracket.
    Chain(ChainArgs),
    /// Sweep a (k, seed-tuple) grid, with records, statistics, and optional
    /// checkpointing.
    Scan(ScanArgs),
    /// Single-term sup bound and drop-witness check.
    Thm1(Thm1Args),
    /// Two-term log-scale sup bound, parity, and base-case check.
    Thm2(Thm2Args),
    /// Digit-square-sum harness: decrease threshold and cycle cap.
    Prop1(Prop1Args),
    /// Exact prime product against its analytic envelope.
    Mertens(MertensArgs),
    /// Exact prod (1 - 1/p) over (x, x^3] against 1/2.
    Corollary(CorollaryArgs),
    /// Build and re-verify a prime-block congruence witness.
    CrtWitness(CrtArgs),
    /// Scan for composite q with phi(q) dividing q - 1.
    Lehmer(LehmerArgs),
    /// Diagonal survey of d >= 3 orbits.
    Explore(ExploreArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Orbit(_) => "orbit",
            Command::Chain(_) => "chain",
            Command::Scan(_) => "scan",
            Command::Thm1(_) => "thm1",
            Command::Thm2(_) => "thm2",
            Command::Prop1(_) => "prop1",
            Command::Mertens(_) => "mertens",
            Command::Corollary(_) => "corollary",
            Command::CrtWitness(_) => "crt-witness",
            Command::Lehmer(_) => "lehmer",
            Command::Explore(_) => "explore",
        }
    }
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct GuardArgs {
    /// Largest number of generated terms before giving up.
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Largest tolerated term value.
    #[arg(long)]
    pub max_value: Option<u64>,
}

impl GuardArgs {
    fn merged(self, file: Self) -> Self {
        GuardArgs {
            max_steps: self.max_steps.or(file.max_steps),
            max_value: self.max_value.or(file.max_value),
        }
    }

    fn resolve(&self) -> Guards {
        let d = Guards::default();
        Guards {
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            max_value: self.max_value.unwrap_or(d.max_value),
        }
    }
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitArgs {
    /// Window width d.
    #[arg(long)]
    pub d: Option<usize>,
    /// Additive shift k.
    #[arg(long)]
    pub k: Option<u64>,
    /// Comma-separated seed tuple; its length must equal d.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: GuardArgs,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ChainArgs {
    #[arg(long)]
    pub start: Option<u64>,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ScanArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k_lo: Option<u64>,
    #[arg(long)]
    pub k_hi: Option<u64>,
    #[arg(long)]
    pub seed_lo: Option<u64>,
    #[arg(long)]
    pub seed_hi: Option<u64>,
    /// Stop after emitting this many records in this invocation; with a
    /// checkpoint, a later run resumes where this one stopped.
    #[arg(long)]
    pub max_records: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: GuardArgs,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Thm1Args {
    #[arg(long)]
    pub x1: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: GuardArgs,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Thm2Args {
    #[arg(long)]
    pub x1: Option<u64>,
    #[arg(long)]
    pub x2: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: GuardArgs,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Prop1Args {
    /// Decrease threshold c.
    #[arg(long)]
    pub c: Option<u64>,
    /// Run every seed in 1..=seed_limit.
    #[arg(long)]
    pub seed_limit: Option<u64>,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct MertensArgs {
    /// Single evaluation point.
    #[arg(long)]
    pub x: Option<u64>,
    #[arg(long)]
    pub sweep_lo: Option<u64>,
    /// Evaluate every integer in sweep_lo..=sweep_hi.
    #[arg(long)]
    pub sweep_hi: Option<u64>,
    /// Append this many log-spaced points from sweep_hi to log_hi.
    #[arg(long)]
    pub log_samples: Option<u64>,
    #[arg(long)]
    pub log_hi: Option<u64>,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CorollaryArgs {
    /// Single evaluation point.
    #[arg(long)]
    pub x: Option<u64>,
    #[arg(long)]
    pub lo: Option<u64>,
    #[arg(long)]
    pub hi: Option<u64>,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CrtArgs {
    /// Threshold the block primes must exceed.
    #[arg(long = "X", visible_alias = "x")]
    pub x: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    /// Largest prime the block search may reach.
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct LehmerArgs {
    #[arg(long)]
    pub limit: Option<u64>,
}

#[derive(Args, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExploreArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub seed_lo: Option<u64>,
    #[arg(long)]
    pub seed_hi: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: GuardArgs,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub workers: Option<usize>,
    pub output: Option<OutputFormat>,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub sieve_cap: Option<u64>,
    pub orbit: Option<OrbitArgs>,
    pub chain: Option<ChainArgs>,
    pub scan: Option<ScanArgs>,
    pub thm1: Option<Thm1Args>,
    pub thm2: Option<Thm2Args>,
    pub prop1: Option<Prop1Args>,
    pub mertens: Option<MertensArgs>,
    pub corollary: Option<CorollaryArgs>,
    #[serde(rename = "crt-witness")]
    pub crt_witness: Option<CrtArgs>,
    pub lehmer: Option<LehmerArgs>,
    pub explore: Option<ExploreArgs>,
}

impl FileConfig {
    fn single_command(self) -> Result<Option<Command>, CliError> {
        let mut found: Vec<Command> = Vec::new();
        if let Some(a) = self.orbit {
            found.push(Command::Orbit(a));
        }
        if let Some(a) = self.chain {
            found.push(Command::Chain(a));
        }
        if let Some(a) = self.scan {
            found.push(Command::Scan(a));
        }
        if let Some(a) = self.thm1 {
            found.push(Command::Thm1(a));
        }
        if let Some(a) = self.thm2 {
            found.push(Command::Thm2(a));
        }
        if let Some(a) = self.prop1 {
            found.push(Command::Prop1(a));
        }
        if let Some(a) = self.mertens {
            found.push(Command::Mertens(a));
        }
        if let Some(a) = self.corollary {
            found.push(Command::Corollary(a));
        }
        if let Some(a) = self.crt_witness {
            found.push(Command::CrtWitness(a));
        }
        if let Some(a) = self.lehmer {
            found.push(Command::Lehmer(a));
        }
        if let Some(a) = self.explore {
            found.push(Command::Explore(a));
        }
        match found.len() {
            0 => Ok(None),
            1 => Ok(found.pop()),
            n => Err(CliError::Input(format!(
                "config file declares {n} commands; exactly one is allowed"
            ))),
        }
    }
}

/// Fully resolved invocation: one concrete command plus run-wide knobs.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub command: ResolvedCommand,
    pub workers: usize,
    pub output: OutputFormat,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub sieve_cap: u64,
}

#[derive(Debug, Clone)]
pub enum ResolvedCommand {
    Orbit {
        d: usize,
        k: u64,
        kind: OrbitKind,
        seeds: Vec<u64>,
        guards: Guards,
    },
    Chain {
        start: u64,
    },
    Scan {
        scan: ScanConfig,
        max_records: Option<u64>,
    },
    Thm1 {
        x1: u64,
        k: u64,
        guards: Guards,
    },
    Thm2 {
        x1: u64,
        x2: u64,
        k: u64,
        guards: Guards,
    },
    Prop1 {
        c: u64,
        seed_limit: u64,
    },
    MertensSingle {
        x: u64,
    },
    MertensSweep {
        lo: u64,
        hi: u64,
        log_samples: u64,
        log_hi: u64,
    },
    Corollary {
        lo: u64,
        hi: u64,
    },
    CrtWitness {
        x: u64,
        k: u64,
        budget: u64,
    },
    Lehmer {
        limit: u64,
    },
    Explore {
        d: usize,
        k: u64,
        seed_lo: u64,
        seed_hi: u64,
        guards: Guards,
    },
}

fn require<T>(v: Option<T>, what: &str, cmd: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Input(format!("{cmd}: missing required parameter --{what}")))
}

fn merge_command(cli: Option<Command>, file: Option<Command>) -> Result<Command, CliError> {
    match (cli, file) {
        (None, None) => Err(CliError::Input(
            "no command given on the command line or in the config file".into(),
        )),
        (None, Some(f)) => Ok(f),
        (Some(c), None) => Ok(c),
        (Some(c), Some(f)) => {
            if c.name() != f.name() {
                // flags pick the command; the file's other table is ignored
                return Ok(c);
            }
            Ok(match (c, f) {
                (Command::Orbit(a), Command::Orbit(b)) => Command::Orbit(OrbitArgs {
                    d: a.d.or(b.d),
                    k: a.k.or(b.k),
                    seeds: a.seeds.or(b.seeds),
                    kind: a.kind.or(b.kind),
                    guards: a.guards.merged(b.guards),
                }),
                (Command::Chain(a), Command::Chain(b)) => Command::Chain(ChainArgs {
                    start: a.start.or(b.start),
                }),
                (Command::Scan(a), Command::Scan(b)) => Command::Scan(ScanArgs {
                    d: a.d.or(b.d),
                    k_lo: a.k_lo.or(b.k_lo),
                    k_hi: a.k_hi.or(b.k_hi),
                    seed_lo: a.seed_lo.or(b.seed_lo),
                    seed_hi: a.seed_hi.or(b.seed_hi),
                    max_records: a.max_records.or(b.max_records),
                    guards: a.guards.merged(b.guards),
                }),
                (Command::Thm1(a), Command::Thm1(b)) => Command::Thm1(Thm1Args {
                    x1: a.x1.or(b.x1),
                    k: a.k.or(b.k),
                    guards: a.guards.merged(b.guards),
                }),
                (Command::Thm2(a), Command::Thm2(b)) => Command::Thm2(Thm2Args {
                    x1: a.x1.or(b.x1),
                    x2: a.x2.or(b.x2),
                    k: a.k.or(b.k),
                    guards: a.guards.merged(b.guards),
                }),
                (Command::Prop1(a), Command::Prop1(b)) => Command::Prop1(Prop1Args {
                    c: a.c.or(b.c),
                    seed_limit: a.seed_limit.or(b.seed_limit),
                }),
                (Command::Mertens(a), Command::Mertens(b)) => Command::Mertens(MertensArgs {
                    x: a.x.or(b.x),
                    sweep_lo: a.sweep_lo.or(b.sweep_lo),
                    sweep_hi: a.sweep_hi.or(b.sweep_hi),
                    log_samples: a.log_samples.or(b.log_samples),
                    log_hi: a.log_hi.or(b.log_hi),
                }),
                (Command::Corollary(a), Command::Corollary(b)) => {
                    Command::Corollary(CorollaryArgs {
                        x: a.x.or(b.x),
                        lo: a.lo.or(b.lo),
                        hi: a.hi.or(b.hi),
                    })
                }
                (Command::CrtWitness(a), Command::CrtWitness(b)) => Command::CrtWitness(CrtArgs {
                    x: a.x.or(b.x),
                    k: a.k.or(b.k),
                    budget: a.budget.or(b.budget),
                }),
                (Command::Lehmer(a), Command::Lehmer(b)) => Command::Lehmer(LehmerArgs {
                    limit: a.limit.or(b.limit),
                }),
                (Command::Explore(a), Command::Explore(b)) => Command::Explore(ExploreArgs {
                    d: a.d.or(b.d),
                    k: a.k.or(b.k),
                    seed_lo: a.seed_lo.or(b.seed_lo),
                    seed_hi: a.seed_hi.or(b.seed_hi),
                    guards: a.guards.merged(b.guards),
                }),
                _ => unreachable!("names matched"),
            })
        }
    }
}

fn resolve_command(cmd: Command) -> Result<ResolvedCommand, CliError> {
    Ok(match cmd {
        Command::Orbit(a) => {
            let seeds = require(a.seeds, "seeds", "orbit")?;
            let d = a.d.unwrap_or(seeds.len());
            ResolvedCommand::Orbit {
                d,
                k: a.k.unwrap_or(0),
                kind: a.kind.map(Into::into).unwrap_or(OrbitKind::PhiSum),
                seeds,
                guards: a.guards.resolve(),
            }
        }
        Command::Chain(a) => ResolvedCommand::Chain {
            start: require(a.start, "start", "chain")?,
        },
        Command::Scan(a) => {
            let d = a.d.unwrap_or(1);
            let seed_hi = require(a.seed_hi, "seed-hi", "scan")?;
            ResolvedCommand::Scan {
                scan: ScanConfig {
                    d,
                    k_lo: a.k_lo.unwrap_or(0),
                    k_hi: a.k_hi.unwrap_or(a.k_lo.unwrap_or(0)),
                    seed_lo: a.seed_lo.unwrap_or(1),
                    seed_hi,
                    guards: a.guards.resolve(),
                },
                max_records: a.max_records,
            }
        }
        Command::Thm1(a) => ResolvedCommand::Thm1 {
            x1: require(a.x1, "x1", "thm1")?,
            k: a.k.unwrap_or(0),
            guards: a.guards.resolve(),
        },
        Command::Thm2(a) => ResolvedCommand::Thm2 {
            x1: require(a.x1, "x1", "thm2")?,
            x2: require(a.x2, "x2", "thm2")?,
            k: a.k.unwrap_or(0),
            guards: a.guards.resolve(),
        },
        Command::Prop1(a) => ResolvedCommand::Prop1 {
            c: a.c.unwrap_or(100),
            seed_limit: a.seed_limit.unwrap_or(10_000),
        },
        Command::Mertens(a) => match (a.x, a.sweep_hi) {
            (Some(x), None) => ResolvedCommand::MertensSingle { x },
            (None, Some(hi)) => {
                let lo = a.sweep_lo.unwrap_or(2);
                let log_samples = a.log_samples.unwrap_or(0);
                let log_hi = a.log_hi.unwrap_or(hi);
                if log_samples > 0 && log_hi < hi {
                    return Err(CliError::Input(
                        "mertens: --log-hi must not be below --sweep-hi".into(),
                    ));
                }
                ResolvedCommand::MertensSweep {
                    lo,
                    hi,
                    log_samples,
                    log_hi,
                }
            }
            (Some(_), Some(_)) => {
                return Err(CliError::Input(
                    "mertens: give either --x or --sweep-hi, not both".into(),
                ))
            }
            (None, None) => return Err(CliError::Input("mertens: need --x or --sweep-hi".into())),
        },
        Command::Corollary(a) => match (a.x, a.lo, a.hi) {
            (Some(x), None, None) => ResolvedCommand::Corollary { lo: x, hi: x },
            (None, lo, Some(hi)) => ResolvedCommand::Corollary {
                lo: lo.unwrap_or(6),
                hi,
            },
            _ => {
                return Err(CliError::Input(
                    "corollary: give --x, or --hi with optional --lo".into(),
                ))
            }
        },
        Command::CrtWitness(a) => ResolvedCommand::CrtWitness {
            x: require(a.x, "X", "crt-witness")?,
            k: a.k.unwrap_or(0),
            budget: a
                .budget
                .unwrap_or(torbit_core::mertens::DEFAULT_PRIME_BUDGET),
        },
        Command::Lehmer(a) => ResolvedCommand::Lehmer {
            limit: require(a.limit, "limit", "lehmer")?,
        },
        Command::Explore(a) => ResolvedCommand::Explore {
            d: a.d.unwrap_or(3),
            k: a.k.unwrap_or(0),
            seed_lo: a.seed_lo.unwrap_or(1),
            seed_hi: require(a.seed_hi, "seed-hi", "explore")?,
            guards: a.guards.resolve(),
        },
    })
}

fn env_u64(name: &str) -> Result<Option<u64>, CliError> {
    match std::env::var(name) {
        Ok(raw) => raw
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{name} must be an unsigned integer: {raw:?}"))),
        Err(_) => Ok(None),
    }
}

pub fn resolve(cli: Cli) -> Result<ResolvedConfig, CliError> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| {
                CliError::Input(format!("cannot read config {}: {e}", path.display()))
            })?;
            toml::from_str(&raw)
                .map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let env_workers = env_u64("TORBIT_WORKERS")?;
    let env_cap = env_u64("TORBIT_SIEVE_CAP")?;
    let workers = cli
        .workers
        .or(env_workers.map(|w| w as usize))
        .or(file.workers)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    if workers == 0 {
        return Err(CliError::Input("workers must be at least 1".into()));
    }
    let sieve_cap = cli
        .sieve_cap
        .or(env_cap)
        .or(file.sieve_cap)
        .unwrap_or(DEFAULT_SIEVE_CAP);
    if sieve_cap < 2 {
        return Err(CliError::Input("sieve cap must be at least 2".into()));
    }
    let output = cli
        .output
        .or(file.output)
        .unwrap_or(OutputFormat::JsonLines);
    let checkpoint = cli.checkpoint.or(file.checkpoint.clone());
    let out = cli.out.or(file.out.clone());
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let file_command = file.single_command()?;
    let command = resolve_command(merge_command(cli.command, file_command)?)?;
    if output == OutputFormat::Csv && !matches!(command, ResolvedCommand::Scan { .. }) {
        return Err(CliError::Input(
            "csv output is only available for scan statistics".into(),
        ));
    }
    Ok(ResolvedConfig {
        command,
        workers,
        output,
        checkpoint,
        out,
        seed,
        sieve_cap,
    })
}

/// Semantic fingerprint for checkpoints: the command parameters and output
/// format, excluding knobs that cannot change the record stream (workers,
/// paths, the echoed seed, the per-run record budget).
pub fn config_hash(cfg: &ResolvedConfig) -> String {
    use sha2::{Digest, Sha256};
    let command = match &cfg.command {
        ResolvedCommand::Scan { scan, .. } => format!("Scan {{ scan: {scan:?} }}"),
        other => format!("{other:?}"),
    };
    let text = format!("v1|{command}|{:?}", cfg.output);
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    let out = h.finalize();
    let mut hex = String::with_capacity(64);
    for b in out {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).expect("parses")
    }

    #[test]
    fn orbit_example_shape() {
        let cli = parse(&["torbit", "orbit", "--d", "1", "--k", "0", "--seeds", "10"]);
        let cfg = resolve(cli).unwrap();
        match cfg.command {
            ResolvedCommand::Orbit {
                d,
                k,
                ref seeds,
                kind,
                ..
            } => {
                assert_eq!((d, k, kind), (1, 0, OrbitKind::PhiSum));
                assert_eq!(seeds, &[10]);
            }
            other => panic!("wrong command: {other:?}"),
        }
    }

    #[test]
    fn seeds_imply_d() {
        let cli = parse(&["torbit", "orbit", "--seeds", "3,5"]);
        let cfg = resolve(cli).unwrap();
        match cfg.command {
            ResolvedCommand::Orbit { d, ref seeds, .. } => {
                assert_eq!(d, 2);
                assert_eq!(seeds, &[3, 5]);
            }
            other => panic!("wrong command: {other:?}"),
        }
    }

    #[test]
    fn crt_uppercase_x() {
        let cli = parse(&["torbit", "crt-witness", "--X", "6", "--k", "0"]);
        match resolve(cli).unwrap().command {
            ResolvedCommand::CrtWitness { x, k, .. } => assert_eq!((x, k), (6, 0)),
            other => panic!("wrong command: {other:?}"),
        }
    }

    #[test]
    fn file_config_with_flag_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "workers = 3\nseed = 7\n[scan]\nd = 1\nk_lo = 2\nk_hi = 4\nseed_lo = 1\nseed_hi = 50\nmax_steps = 500\n",
        )
        .unwrap();
        let cli = parse(&[
            "torbit",
            "--config",
            path.to_str().unwrap(),
            "scan",
            "--k-hi",
            "6",
        ]);
        let cfg = resolve(cli).unwrap();
        assert_eq!(cfg.workers, 3);
        assert_eq!(cfg.seed, 7);
        match cfg.command {
            ResolvedCommand::Scan { scan, .. } => {
                assert_eq!(scan.d, 1);
                assert_eq!((scan.k_lo, scan.k_hi), (2, 6));
                assert_eq!((scan.seed_lo, scan.seed_hi), (1, 50));
                assert_eq!(scan.guards.max_steps, 500);
            }
            other => panic!("wrong command: {other:?}"),
        }
    }

    #[test]
    fn file_only_command() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "[chain]\nstart = 1000\n").unwrap();
        let cli = parse(&["torbit", "--config", path.to_str().unwrap()]);
        match resolve(cli).unwrap().command {
            ResolvedCommand::Chain { start } => assert_eq!(start, 1000),
            other => panic!("wrong command: {other:?}"),
        }
    }

    #[test]
    fn rejections() {
        let cli = parse(&["torbit", "mertens"]);
        assert!(matches!(resolve(cli), Err(CliError::Input(_))));
        let cli = parse(&["torbit", "--output", "csv", "mertens", "--x", "10"]);
        assert!(matches!(resolve(cli), Err(CliError::Input(_))));
        let cli = parse(&["torbit"]);
        assert!(matches!(resolve(cli), Err(CliError::Input(_))));
    }

    #[test]
    fn hash_tracks_semantics_only() {
        let a = resolve(parse(&["torbit", "scan", "--seed-hi", "10"])).unwrap();
        let mut b = resolve(parse(&["torbit", "scan", "--seed-hi", "10"])).unwrap();
        b.workers = 9;
        b.seed = 123;
        assert_eq!(config_hash(&a), config_hash(&b));
        let c = resolve(parse(&["torbit", "scan", "--seed-hi", "11"])).unwrap();
        assert_ne!(config_hash(&a), config_hash(&c));
        // a record budget interrupts the stream without changing it
        let d = resolve(parse(&[
            "torbit",
            "scan",
            "--seed-hi",
            "10",
            "--max-records",
            "3",
        ]))
        .unwrap();
        assert_eq!(config_hash(&a), config_hash(&d));
    }
}
