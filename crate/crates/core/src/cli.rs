//! Command-line driver: `run`, `sweep`, `oracle` and `generate`.
//!
//! Exit codes: 0 ok, 1 usage or configuration error, 2 I/O or unreadable
//! input, 3 invariant violation.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use log::info;

use crate::error::{Error, Result};
use crate::item::{Config, OrderPolicy};
use crate::oracle::{self, Miner, OracleVerdict};
use crate::stats::{self, BatchStats, RunSummary, SweepRow};
use crate::stream::{
    ClockMode, FileSource, PatternReplaySource, Pipeline, RealTimeSynthetic, SimulatedSynthetic,
    Step, StreamSource, SyntheticParams, TransactionGenerator, Window,
};
use crate::tilted::WindowMode;
use crate::ItemDict;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

/// Default max-support-error as a fraction of min-support, used when no
/// epsilon is given.
pub const DEFAULT_EPSILON_RATIO: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(name = "tiltstream", version, about = "Frequent-itemset mining over batched transaction streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine one stream and write per-batch statistics.
    Run(RunArgs),
    /// Repeat a run for several min-support values.
    Sweep(SweepArgs),
    /// Cross-check FP-growth against brute-force subset counting.
    Oracle(OracleArgs),
    /// Write a synthetic transaction stream in the `x`-delimited format.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClockArg {
    Real,
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    FirstBatch,
    Lexicographic,
}

#[derive(Debug, Clone, Args)]
pub struct MiningArgs {
    /// key=value configuration file; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Min-support as a fraction (0.004 = 0.4%).
    #[arg(long, conflicts_with = "sigma_pct")]
    pub sigma: Option<f64>,
    /// Min-support in per cent (0.4 = 0.004).
    #[arg(long)]
    pub sigma_pct: Option<f64>,
    /// Max-support-error as a fraction of the batch size.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Epsilon as a fraction of sigma when no epsilon is given.
    #[arg(long, default_value_t = DEFAULT_EPSILON_RATIO)]
    pub epsilon_ratio: f64,
    #[arg(long)]
    pub window_ms: Option<u64>,
    /// Batches between shaking points.
    #[arg(long)]
    pub shake_n: Option<u64>,
    #[arg(long)]
    pub fading_support: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    /// Keep one table entry per batch instead of logarithmic merging.
    #[arg(long)]
    pub flat_windows: bool,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["synthetic", "input", "replay_patterns"])))]
pub struct SourceArgs {
    /// Random transaction generator.
    #[arg(long)]
    pub synthetic: bool,
    /// Transaction file (`x`-delimited or one transaction per line).
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Pre-mined pattern sets, one batch per line.
    #[arg(long, value_name = "FILE")]
    pub replay_patterns: Option<PathBuf>,
    /// Transactions per batch in file mode (default: whole file).
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Transactions per second of the generator.
    #[arg(long, default_value_t = 200.0)]
    pub rate: f64,
    /// Number of distinct generator items.
    #[arg(long, default_value_t = 50)]
    pub universe: u32,
    #[arg(long, default_value_t = 5)]
    pub max_tx_len: u32,
    /// Windows to receive (required for synthetic streams).
    #[arg(long)]
    pub max_batches: Option<u64>,
    #[arg(long, value_enum, default_value_t = ClockArg::Simulated)]
    pub clock: ClockArg,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub mining: MiningArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    /// CSV destination (default: stdout, unless --dump-tree is given).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Print the final pattern tree.
    #[arg(long)]
    pub dump_tree: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated min-support fractions.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub sigmas: Vec<f64>,
    #[command(flatten)]
    pub mining: MiningArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub rounds: u64,
    #[arg(long, default_value_t = 8)]
    pub items: usize,
    #[arg(long, default_value_t = 30)]
    pub transactions: usize,
    /// Negative control: inflate one mined frequency.
    #[arg(long, hide = true)]
    pub corrupt_miner: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub count: u64,
    #[arg(long, default_value_t = 50)]
    pub universe: u32,
    #[arg(long, default_value_t = 5)]
    pub max_tx_len: u32,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } | Error::Csv(_) | Error::InvalidItem(_) => EXIT_IO,
        Error::Invariant(_) | Error::Sequence { .. } | Error::OrderViolation { .. } => {
            EXIT_INVARIANT
        }
        Error::Config(_) | Error::EmptyOrderBatch | Error::Threshold(_) | Error::EmptyWindow => {
            EXIT_USAGE
        }
    }
}

fn keys_in(text: &str) -> HashSet<String> {
    text.lines()
        .filter_map(|l| l.split('#').next())
        .filter_map(|l| l.split_once('='))
        .map(|(k, _)| k.trim().replace('-', "_"))
        .collect()
}

impl MiningArgs {
    /// Builds the configuration for `sigma_override` (or the configured
    /// sigma). Epsilon comes from `--epsilon`, then the config file, then
    /// `sigma * epsilon_ratio`.
    pub fn resolve(&self, sigma_override: Option<f64>) -> Result<Config> {
        let (mut cfg, file_keys) = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                (Config::from_kv_str(&text)?, keys_in(&text))
            }
            None => (Config::default(), HashSet::new()),
        };
        if let Some(s) = self.sigma {
            cfg.sigma = s;
        }
        if let Some(p) = self.sigma_pct {
            cfg.sigma = p / 100.0;
        }
        if let Some(s) = sigma_override {
            cfg.sigma = s;
        }
        cfg.epsilon = match self.epsilon {
            Some(e) => e,
            None if file_keys.contains("epsilon") => cfg.epsilon,
            None => cfg.sigma * self.epsilon_ratio,
        };
        if let Some(w) = self.window_ms {
            cfg.window_period_ms = w;
        }
        if let Some(n) = self.shake_n {
            cfg.shake_interval_n = n;
        }
        if let Some(f) = self.fading_support {
            cfg.fading_support = f;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = self.order {
            cfg.order_policy = match o {
                OrderArg::FirstBatch => OrderPolicy::FirstBatch,
                OrderArg::Lexicographic => OrderPolicy::Lexicographic,
            };
        }
        if self.flat_windows {
            cfg.window_mode = WindowMode::Flat;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl StreamSource for Box<dyn StreamSource + Send> {
    fn next_window(&mut self, window_ms: u64, dict: &mut ItemDict) -> Result<Option<Window>> {
        (**self).next_window(window_ms, dict)
    }

    fn offline(&mut self, offline_ms: f64) -> u64 {
        (**self).offline(offline_ms)
    }
}

impl SourceArgs {
    fn clock(&self) -> ClockMode {
        match self.clock {
            ClockArg::Real => ClockMode::Real,
            ClockArg::Simulated => ClockMode::Simulated,
        }
    }

    pub fn open(&self, seed: u64) -> Result<Box<dyn StreamSource + Send>> {
        if let Some(path) = &self.input {
            return Ok(Box::new(FileSource::open(path, self.batch_size)?));
        }
        if let Some(path) = &self.replay_patterns {
            return Ok(Box::new(PatternReplaySource::open(path)?));
        }
        if self.max_batches.is_none() {
            return Err(Error::Config("synthetic streams need --max-batches".into()));
        }
        let params = SyntheticParams {
            universe: self.universe,
            max_tx_len: self.max_tx_len,
            rate_tx_per_sec: self.rate,
            seed,
        };
        params.validate()?;
        Ok(match self.clock() {
            ClockMode::Simulated => Box::new(SimulatedSynthetic::new(params)),
            ClockMode::Real => Box::new(RealTimeSynthetic::spawn(params)),
        })
    }
}

/// Outcome of one run, before anything is written.
pub struct RunOutput {
    pub rows: Vec<BatchStats>,
    pub summary: RunSummary,
    pub dump: String,
    pub frequent_last_batch: usize,
}

/// Drives a pipeline to completion, stopping early when `interrupt` is set.
pub fn execute_run(
    cfg: &Config,
    source: &SourceArgs,
    interrupt: Option<&AtomicBool>,
) -> Result<RunOutput> {
    let mut pipeline = Pipeline::new(source.open(cfg.seed)?, cfg.clone(), source.clock())?;
    let mut windows = 0;
    while source.max_batches.is_none_or(|m| windows < m) {
        if interrupt.is_some_and(|f| f.load(Ordering::Relaxed)) {
            info!("interrupted after {windows} windows, flushing partial results");
            break;
        }
        match pipeline.step()? {
            Step::EndOfStream => break,
            Step::Processed { .. } | Step::SkippedEmpty => windows += 1,
        }
    }
    let frequent_last_batch = match pipeline.stats().last() {
        Some(_) => pipeline
            .tree()
            .report_frequent(cfg.sigma, 1, pipeline.window_transactions(1), pipeline.dict())?
            .len(),
        None => 0,
    };
    Ok(RunOutput {
        rows: pipeline.stats().to_vec(),
        summary: pipeline.summary(),
        dump: pipeline.tree().dump(pipeline.dict()),
        frequent_last_batch,
    })
}

/// Runs the same source once per sigma. Simulated runs are independent and
/// fan out on the rayon pool when the `parallel` feature is on; real-clock
/// runs stay sequential so they do not compete for the CPU.
pub fn execute_sweep(
    sigmas: &[f64],
    mining: &MiningArgs,
    source: &SourceArgs,
) -> Result<Vec<(f64, RunOutput)>> {
    if sigmas.is_empty() {
        return Err(Error::Config("empty sigma list".into()));
    }
    let configs: Vec<(f64, Config)> = sigmas
        .iter()
        .map(|&s| mining.resolve(Some(s)).map(|c| (s, c)))
        .collect::<Result<_>>()?;
    let one = |(s, cfg): &(f64, Config)| execute_run(cfg, source, None).map(|o| (*s, o));

    #[cfg(feature = "parallel")]
    {
        if source.clock() == ClockMode::Simulated {
            use rayon::prelude::*;
            return configs.par_iter().map(one).collect();
        }
    }
    configs.iter().map(one).collect()
}

fn open_out(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn print_summary(err: &mut dyn Write, sigma: f64, out: &RunOutput) {
    let s = &out.summary;
    let _ = writeln!(
        err,
        "sigma={sigma} batches={} dropped={} peak_bytes={} offline_ms={:.3} lost_tx={} frequent_last_batch={}",
        s.batches, s.total_dropped, s.peak_bytes, s.total_offline_ms, s.lost_transactions,
        out.frequent_last_batch
    );
}

fn cmd_run(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = args.mining.resolve(None)?;
    let interrupt = Arc::new(AtomicBool::new(false));
    {
        let flag = Arc::clone(&interrupt);
        // a handler may already be installed when called repeatedly in-process
        let _ = ctrlc::set_handler(move || flag.store(true, Ordering::Relaxed));
    }
    let out = execute_run(&cfg, &args.source, Some(&interrupt))?;
    match &args.out {
        Some(path) => stats::write_run_csv(open_out(path)?, &out.rows)?,
        None if !args.dump_tree => stats::write_run_csv(&mut *stdout, &out.rows)?,
        None => {}
    }
    if args.dump_tree {
        stdout
            .write_all(out.dump.as_bytes())
            .map_err(|e| Error::io("<stdout>", e))?;
    }
    print_summary(stderr, cfg.sigma, &out);
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let runs = execute_sweep(&args.sigmas, &args.mining, &args.source)?;
    let rows: Vec<SweepRow> = runs
        .iter()
        .flat_map(|(sigma, o)| o.rows.iter().map(|&stats| SweepRow { sigma: *sigma, stats }))
        .collect();
    match &args.out {
        Some(path) => stats::write_sweep_csv(open_out(path)?, &rows)?,
        None => stats::write_sweep_csv(&mut *stdout, &rows)?,
    }
    for (sigma, o) in &runs {
        print_summary(stderr, *sigma, o);
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs, stdout: &mut dyn Write) -> Result<bool> {
    let miner = if args.corrupt_miner {
        Miner::Corrupted
    } else {
        Miner::FpGrowth
    };
    let verdict = oracle::run_oracle(args.seed, args.rounds, args.items, args.transactions, miner)?;
    let ok = matches!(verdict, OracleVerdict::Pass { .. });
    let _ = match verdict {
        OracleVerdict::Pass { rounds } => writeln!(stdout, "PASS {rounds} rounds"),
        OracleVerdict::Fail(m) => writeln!(stdout, "FAIL {m}"),
    };
    Ok(ok)
}

fn cmd_generate(args: &GenerateArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = SyntheticParams {
        universe: args.universe,
        max_tx_len: args.max_tx_len,
        rate_tx_per_sec: 0.0,
        seed: args.seed,
    };
    params.validate()?;
    let mut generator = TransactionGenerator::new(params);
    let mut write_all = |w: &mut dyn Write, name: &Path| -> Result<()> {
        for _ in 0..args.count {
            writeln!(w, "{}", generator.next_line()).map_err(|e| Error::io(name, e))?;
        }
        w.flush().map_err(|e| Error::io(name, e))
    };
    match &args.out {
        Some(path) => write_all(&mut open_out(path)?, path),
        None => write_all(stdout, Path::new("<stdout>")),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, stdout, stderr).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a, stdout, stderr).map(|_| true),
        Command::Oracle(a) => cmd_oracle(a, stdout),
        Command::Generate(a) => cmd_generate(a, stdout).map(|_| true),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_INVARIANT,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the binary: logging from `TILTSTREAM_LOG`, real stdio.
pub fn main_exit_code() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TILTSTREAM_LOG", "warn"))
        .init();
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    let mut stderr = io::stderr();
    let code = run_cli(std::env::args_os(), &mut stdout, &mut stderr);
    let _ = stdout.flush();
    code
}
