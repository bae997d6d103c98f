//! Stream sources, the time-window batch manager and the offline-time
//! lattice.
//!
//! The pipeline alternates two phases. During reception a source fills a
//! batch for one window period. Reception then stops, the offline-time
//! counter starts, and the batch is mined and folded into the pattern tree
//! (plus a shaking point every `N` batches). When the batch is consumed the
//! counter stops, its value is appended to the [`OffcLattice`] and
//! reception resumes. Transactions that arrive while reception is stopped
//! are lost; the lattice records how long that lasted.
//!
//! Two clocks are supported. The real clock uses wall time and a background
//! generator thread. The simulated clock is deterministic: a window of
//! `W` ms at `r` tx/s yields exactly `floor(r * W / 1000)` transactions, and
//! processing is charged one microsecond per unit of work done (FP-tree
//! insertions, mining steps, pattern offers, scan and shake visits).

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use log::{debug, warn};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fpstream::{PatternTree, UpdateReport};
use crate::item::{Batch, Config, ItemDict, ItemId, ItemOrder, DELIMITER};
use crate::shaking::{is_shake_batch, shaking_point, ShakeReport};
use crate::stats::{BatchStats, RunSummary};

/// Simulated microseconds charged per unit of work.
pub const SIM_MICROS_PER_UNIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClockMode {
    Real,
    #[default]
    Simulated,
}

/// One entry of the offline-time lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffcEntry {
    pub batch: u64,
    /// Stream time elapsed while reception was stopped for this batch.
    pub offline_ms: f64,
    /// Transactions that arrived in that time and were dropped.
    pub lost_transactions: u64,
}

/// Append-only record of stream time lost while mining, keyed by batch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OffcLattice {
    entries: Vec<OffcEntry>,
}

impl OffcLattice {
    pub fn record(&mut self, entry: OffcEntry) {
        debug_assert!(entry.offline_ms >= 0.0);
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[OffcEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_offline_ms(&self) -> f64 {
        self.entries.iter().map(|e| e.offline_ms).sum()
    }

    pub fn total_lost(&self) -> u64 {
        self.entries.iter().map(|e| e.lost_transactions).sum()
    }
}

/// What a source delivers for one window.
#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    /// Raw transactions (items interned, not yet normalized).
    Transactions {
        transactions: Vec<Vec<ItemId>>,
        wall_duration_ms: u64,
    },
    /// A pre-mined pattern set: each itemset is a root path, with its batch
    /// frequency. `batch_len` is the batch size the threshold is taken from.
    Patterns {
        patterns: Vec<(Vec<ItemId>, u64)>,
        batch_len: usize,
    },
}

impl Window {
    pub fn len(&self) -> usize {
        match self {
            Window::Transactions { transactions, .. } => transactions.len(),
            Window::Patterns { batch_len, .. } => *batch_len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A source of windows.
pub trait StreamSource {
    /// Receives for `window_ms` and returns the window, or `None` at end of
    /// stream.
    fn next_window(&mut self, window_ms: u64, dict: &mut ItemDict) -> Result<Option<Window>>;

    /// Reports that reception stayed stopped for `offline_ms` after the last
    /// window; returns how many transactions were dropped meanwhile.
    fn offline(&mut self, offline_ms: f64) -> u64;
}

/// Parameters of the random transaction generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams {
    pub universe: u32,
    pub max_tx_len: u32,
    pub rate_tx_per_sec: f64,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            universe: 50,
            max_tx_len: 5,
            rate_tx_per_sec: 200.0,
            seed: 7,
        }
    }
}

impl SyntheticParams {
    pub fn validate(&self) -> Result<()> {
        if self.universe == 0 || self.max_tx_len == 0 || self.max_tx_len > self.universe {
            return Err(Error::Config(format!(
                "need 1 <= max_tx_len <= universe, got max_tx_len={} universe={}",
                self.max_tx_len, self.universe
            )));
        }
        if !(self.rate_tx_per_sec >= 0.0 && self.rate_tx_per_sec.is_finite()) {
            return Err(Error::Config("rate must be a non-negative number".into()));
        }
        Ok(())
    }
}

/// Random transactions of distinct items: length uniform in
/// `[1, max_tx_len]`, items uniform over `1..=universe`.
#[derive(Debug, Clone)]
pub struct TransactionGenerator {
    params: SyntheticParams,
    rng: ChaCha8Rng,
}

impl TransactionGenerator {
    pub fn new(params: SyntheticParams) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            params,
        }
    }

    /// Item numbers of the next transaction.
    pub fn next_raw(&mut self) -> Vec<u32> {
        let len = self.rng.gen_range(1..=self.params.max_tx_len) as usize;
        sample(&mut self.rng, self.params.universe as usize, len)
            .into_iter()
            .map(|i| i as u32 + 1)
            .collect()
    }

    /// The next transaction in the `x`-delimited wire format.
    pub fn next_line(&mut self) -> String {
        let mut line = self
            .next_raw()
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        line.push(' ');
        line.push_str(DELIMITER);
        line
    }
}

fn intern_raw(raw: &[u32], dict: &mut ItemDict) -> Vec<ItemId> {
    raw.iter()
        .map(|n| dict.intern(&n.to_string()).expect("numeric tokens are valid items"))
        .collect()
}

/// Deterministic synthetic source on the simulated clock.
#[derive(Debug, Clone)]
pub struct SimulatedSynthetic {
    generator: TransactionGenerator,
    rate: f64,
    // fractional arrivals carried between offline periods
    carry: f64,
}

impl SimulatedSynthetic {
    pub fn new(params: SyntheticParams) -> Self {
        Self {
            generator: TransactionGenerator::new(params),
            rate: params.rate_tx_per_sec,
            carry: 0.0,
        }
    }

    pub fn transactions_per_window(&self, window_ms: u64) -> usize {
        (self.rate * window_ms as f64 / 1000.0).floor() as usize
    }
}

impl StreamSource for SimulatedSynthetic {
    fn next_window(&mut self, window_ms: u64, dict: &mut ItemDict) -> Result<Option<Window>> {
        let n = self.transactions_per_window(window_ms);
        let transactions = (0..n)
            .map(|_| intern_raw(&self.generator.next_raw(), dict))
            .collect();
        Ok(Some(Window::Transactions {
            transactions,
            wall_duration_ms: window_ms,
        }))
    }

    fn offline(&mut self, offline_ms: f64) -> u64 {
        self.carry += self.rate * offline_ms / 1000.0;
        let lost = self.carry.floor();
        self.carry -= lost;
        for _ in 0..lost as u64 {
            self.generator.next_raw();
        }
        lost as u64
    }
}

/// Synthetic source on the wall clock: a background thread emits
/// transactions at a constant rate and drops them while reception is
/// stopped.
pub struct RealTimeSynthetic {
    rx: Receiver<Vec<u32>>,
    receiving: Arc<AtomicBool>,
    lost: Arc<AtomicU64>,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl RealTimeSynthetic {
    pub fn spawn(params: SyntheticParams) -> Self {
        let (tx, rx) = mpsc::channel();
        let receiving = Arc::new(AtomicBool::new(false));
        let lost = Arc::new(AtomicU64::new(0));
        let shutdown = Arc::new(AtomicBool::new(false));
        let handle = {
            let receiving = Arc::clone(&receiving);
            let lost = Arc::clone(&lost);
            let shutdown = Arc::clone(&shutdown);
            thread::spawn(move || {
                let mut generator = TransactionGenerator::new(params);
                if params.rate_tx_per_sec <= 0.0 {
                    while !shutdown.load(Ordering::Relaxed) {
                        thread::sleep(Duration::from_millis(5));
                    }
                    return;
                }
                let interval = Duration::from_secs_f64(1.0 / params.rate_tx_per_sec);
                let mut due = Instant::now();
                while !shutdown.load(Ordering::Relaxed) {
                    due += interval;
                    if let Some(wait) = due.checked_duration_since(Instant::now()) {
                        thread::sleep(wait);
                    }
                    let raw = generator.next_raw();
                    if receiving.load(Ordering::Acquire) {
                        if tx.send(raw).is_err() {
                            return;
                        }
                    } else {
                        lost.fetch_add(1, Ordering::Relaxed);
                    }
                }
            })
        };
        Self {
            rx,
            receiving,
            lost,
            shutdown,
            handle: Some(handle),
        }
    }
}

impl StreamSource for RealTimeSynthetic {
    fn next_window(&mut self, window_ms: u64, dict: &mut ItemDict) -> Result<Option<Window>> {
        let start = Instant::now();
        let deadline = start + Duration::from_millis(window_ms);
        self.receiving.store(true, Ordering::Release);
        let mut raw = Vec::new();
        while let Some(left) = deadline.checked_duration_since(Instant::now()) {
            match self.rx.recv_timeout(left) {
                Ok(t) => raw.push(t),
                Err(RecvTimeoutError::Timeout | RecvTimeoutError::Disconnected) => break,
            }
        }
        self.receiving.store(false, Ordering::Release);
        raw.extend(self.rx.try_iter());
        let transactions = raw.iter().map(|t| intern_raw(t, dict)).collect();
        Ok(Some(Window::Transactions {
            transactions,
            wall_duration_ms: start.elapsed().as_millis() as u64,
        }))
    }

    fn offline(&mut self, _offline_ms: f64) -> u64 {
        self.lost.swap(0, Ordering::Relaxed)
    }
}

impl Drop for RealTimeSynthetic {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::Relaxed);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

/// Parses the stream format: whitespace-separated tokens, `x` closes a
/// transaction, and so does the end of a line. Returns the transactions and
/// the number of empty ones dropped.
pub fn parse_transactions(text: &str) -> (Vec<Vec<String>>, u64) {
    let mut out = Vec::new();
    let mut empty = 0;
    for line in text.lines() {
        let mut cur: Vec<String> = Vec::new();
        let mut closed_any = false;
        for token in line.split_whitespace() {
            if token == DELIMITER {
                if cur.is_empty() {
                    empty += 1;
                } else {
                    out.push(std::mem::take(&mut cur));
                }
                closed_any = true;
            } else {
                cur.push(token.to_string());
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        } else if !closed_any && !line.trim().is_empty() {
            empty += 1;
        }
    }
    (out, empty)
}

/// Parses a pattern-replay file: one batch per non-blank line (`#` starts a
/// comment), patterns separated by `x`, items separated by whitespace.
pub fn parse_pattern_batches(text: &str) -> Vec<Vec<Vec<String>>> {
    let mut batches = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut batch = Vec::new();
        let mut cur = Vec::new();
        for token in line.split_whitespace() {
            if token == DELIMITER {
                if !cur.is_empty() {
                    batch.push(std::mem::take(&mut cur));
                }
            } else {
                cur.push(token.to_string());
            }
        }
        if !cur.is_empty() {
            batch.push(cur);
        }
        batches.push(batch);
    }
    batches
}

/// Expands each pattern into its prefix chain, frequency 1 per pattern,
/// summing over patterns sharing a prefix. First-appearance order.
pub fn expand_prefix_chains(patterns: &[Vec<ItemId>]) -> Vec<(Vec<ItemId>, u64)> {
    let mut out: Vec<(Vec<ItemId>, u64)> = Vec::new();
    let mut index: std::collections::HashMap<Vec<ItemId>, usize> = Default::default();
    for p in patterns {
        for len in 1..=p.len() {
            let prefix = &p[..len];
            match index.get(prefix) {
                Some(&i) => out[i].1 += 1,
                None => {
                    index.insert(prefix.to_vec(), out.len());
                    out.push((prefix.to_vec(), 1));
                }
            }
        }
    }
    out
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Window-free replay of a transaction file, whole file or fixed-size
/// chunks per batch. Nothing is lost while mining.
#[derive(Debug, Clone)]
pub struct FileSource {
    pending: std::vec::IntoIter<Vec<String>>,
    batch_size: Option<usize>,
    pub dropped_empty: u64,
}

impl FileSource {
    pub fn open(path: impl Into<PathBuf>, batch_size: Option<usize>) -> Result<Self> {
        let path = path.into();
        let text = read_file(&path)?;
        Ok(Self::from_text(&text, batch_size))
    }

    pub fn from_text(text: &str, batch_size: Option<usize>) -> Self {
        let (transactions, dropped_empty) = parse_transactions(text);
        if dropped_empty > 0 {
            warn!("dropped {dropped_empty} empty transactions");
        }
        Self {
            pending: transactions.into_iter(),
            batch_size: batch_size.filter(|&n| n > 0),
            dropped_empty,
        }
    }
}

impl StreamSource for FileSource {
    fn next_window(&mut self, _window_ms: u64, dict: &mut ItemDict) -> Result<Option<Window>> {
        let take = self.batch_size.unwrap_or(usize::MAX);
        let mut transactions = Vec::new();
        for tokens in self.pending.by_ref().take(take) {
            let items = tokens
                .iter()
                .map(|t| dict.intern(t))
                .collect::<Result<Vec<_>>>()?;
            transactions.push(items);
        }
        if transactions.is_empty() {
            return Ok(None);
        }
        Ok(Some(Window::Transactions {
            transactions,
            wall_duration_ms: 0,
        }))
    }

    fn offline(&mut self, _offline_ms: f64) -> u64 {
        0
    }
}

/// Replays pre-mined pattern sets, one batch per line.
#[derive(Debug, Clone)]
pub struct PatternReplaySource {
    batches: std::vec::IntoIter<Vec<Vec<String>>>,
}

impl PatternReplaySource {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::from_text(&read_file(path.as_ref())?))
    }

    pub fn from_text(text: &str) -> Self {
        Self {
            batches: parse_pattern_batches(text).into_iter(),
        }
    }
}

impl StreamSource for PatternReplaySource {
    fn next_window(&mut self, _window_ms: u64, dict: &mut ItemDict) -> Result<Option<Window>> {
        let Some(batch) = self.batches.next() else {
            return Ok(None);
        };
        let patterns = batch
            .iter()
            .map(|p| p.iter().map(|t| dict.intern(t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(Window::Patterns {
            batch_len: patterns.len(),
            patterns: expand_prefix_chains(&patterns),
        }))
    }

    fn offline(&mut self, _offline_ms: f64) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Idle,
    Receiving,
    Mining,
}

/// Enforces strict alternation of reception and mining and checks that
/// their time intervals never overlap.
#[derive(Debug, Clone)]
pub struct PhaseMonitor {
    phase: Phase,
    last_end_ms: f64,
    transitions: u64,
}

impl Default for PhaseMonitor {
    fn default() -> Self {
        Self {
            phase: Phase::Idle,
            last_end_ms: 0.0,
            transitions: 0,
        }
    }
}

impl PhaseMonitor {
    fn enter(&mut self, next: Phase, start_ms: f64, end_ms: f64) -> Result<()> {
        let allowed = matches!(
            (self.phase, next),
            (Phase::Idle | Phase::Mining, Phase::Receiving) | (Phase::Receiving, Phase::Mining)
        );
        if !allowed {
            return Err(Error::Invariant(format!(
                "phase {:?} cannot follow {:?}",
                next, self.phase
            )));
        }
        if start_ms + 1e-9 < self.last_end_ms || end_ms < start_ms {
            return Err(Error::Invariant(format!(
                "{next:?} interval [{start_ms}, {end_ms}] overlaps the previous phase ending at {}",
                self.last_end_ms
            )));
        }
        self.phase = next;
        self.last_end_ms = end_ms;
        self.transitions += 1;
        Ok(())
    }

    pub fn receive(&mut self, start_ms: f64, end_ms: f64) -> Result<()> {
        self.enter(Phase::Receiving, start_ms, end_ms)
    }

    pub fn mine(&mut self, start_ms: f64, end_ms: f64) -> Result<()> {
        self.enter(Phase::Mining, start_ms, end_ms)
    }

    pub fn transitions(&self) -> u64 {
        self.transitions
    }
}

/// Result of one pipeline step.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Processed {
        stats: BatchStats,
        update: UpdateReport,
        shake: Option<ShakeReport>,
    },
    /// The window held no transactions and was skipped.
    SkippedEmpty,
    EndOfStream,
}

/// Stream driver: windows in, pattern tree and telemetry out.
pub struct Pipeline<S> {
    source: S,
    cfg: Config,
    clock: ClockMode,
    dict: ItemDict,
    order: Option<ItemOrder>,
    tree: PatternTree,
    lattice: OffcLattice,
    stats: Vec<BatchStats>,
    batch_sizes: Vec<u64>,
    phases: PhaseMonitor,
    // simulated stream time in ms
    sim_now_ms: f64,
    epoch: Instant,
    windows: u64,
    ended: bool,
}

impl<S: StreamSource> Pipeline<S> {
    pub fn new(source: S, cfg: Config, clock: ClockMode) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            source,
            tree: PatternTree::new(cfg.window_mode),
            cfg,
            clock,
            dict: ItemDict::new(),
            order: None,
            lattice: OffcLattice::default(),
            stats: Vec::new(),
            batch_sizes: Vec::new(),
            phases: PhaseMonitor::default(),
            sim_now_ms: 0.0,
            epoch: Instant::now(),
            windows: 0,
            ended: false,
        })
    }

    fn now_ms(&self) -> f64 {
        match self.clock {
            ClockMode::Simulated => self.sim_now_ms,
            ClockMode::Real => self.epoch.elapsed().as_secs_f64() * 1000.0,
        }
    }

    /// Receives one window and processes it.
    pub fn step(&mut self) -> Result<Step> {
        if self.ended {
            return Ok(Step::EndOfStream);
        }
        let recv_start = self.now_ms();
        let window = self.source.next_window(self.cfg.window_period_ms, &mut self.dict)?;
        if self.clock == ClockMode::Simulated {
            if let Some(Window::Transactions { wall_duration_ms, .. }) = &window {
                self.sim_now_ms += *wall_duration_ms as f64;
            }
        }
        let recv_end = self.now_ms();
        self.phases.receive(recv_start, recv_end)?;
        let Some(window) = window else {
            self.ended = true;
            return Ok(Step::EndOfStream);
        };
        self.windows += 1;
        if window.is_empty() {
            warn!("window {} received no transactions, skipped", self.windows);
            self.phases.mine(recv_end, recv_end)?;
            return Ok(Step::SkippedEmpty);
        }

        // reception stopped; offline-time counter runs from here
        let offline_start = Instant::now();
        let index = self.tree.current_time() + 1;
        let batch_len = window.len();
        let started = Instant::now();
        let (update, fp_items) = match window {
            Window::Transactions {
                transactions,
                wall_duration_ms,
            } => self.update_transactions(index, transactions, wall_duration_ms)?,
            Window::Patterns {
                patterns,
                batch_len,
            } => {
                let threshold = self.cfg.mining_threshold(batch_len).max(1);
                (self.tree.update_from_patterns(index, threshold, &patterns)?, 0)
            }
        };
        let tree_bytes = self.tree.size_bytes();
        let node_count = self.tree.node_count() as u64;
        let shake = is_shake_batch(index, self.cfg.shake_interval_n)
            .then(|| shaking_point(&mut self.tree, self.cfg.fading_support));
        let measured_ms = started.elapsed().as_secs_f64() * 1000.0;

        let units = update.work_units(fp_items) + shake.map_or(0, |s| s.visited);
        let (runtime_ms, offline_ms) = match self.clock {
            ClockMode::Simulated => {
                let ms = units as f64 * SIM_MICROS_PER_UNIT / 1000.0;
                (ms, ms)
            }
            ClockMode::Real => (
                measured_ms,
                offline_start.elapsed().as_secs_f64() * 1000.0,
            ),
        };
        let mine_start = recv_end;
        if self.clock == ClockMode::Simulated {
            self.sim_now_ms += offline_ms;
        }
        let mine_end = match self.clock {
            ClockMode::Simulated => self.sim_now_ms,
            ClockMode::Real => self.now_ms(),
        };
        self.phases.mine(mine_start, mine_end)?;

        // batch consumed: stop the counter and record it
        let lost = self.source.offline(offline_ms);
        self.lattice.record(OffcEntry {
            batch: index,
            offline_ms,
            lost_transactions: lost,
        });
        self.batch_sizes.push(batch_len as u64);
        let stats = BatchStats {
            batch_index: index,
            runtime_ms,
            tree_bytes,
            node_count,
            new_nodes: update.new_nodes,
            dropped_nodes: shake.map_or(0, |s| s.dropped),
            offline_ms,
        };
        debug!(
            "batch {index}: {batch_len} tx, {} mined, {} nodes, {} dropped",
            update.mined_patterns, node_count, stats.dropped_nodes
        );
        self.stats.push(stats);
        Ok(Step::Processed {
            stats,
            update,
            shake,
        })
    }

    fn update_transactions(
        &mut self,
        index: u64,
        raw: Vec<Vec<ItemId>>,
        wall_duration_ms: u64,
    ) -> Result<(UpdateReport, u64)> {
        if self.order.is_none() {
            self.order = Some(ItemOrder::build(
                raw.iter().map(Vec::as_slice),
                self.cfg.order_policy,
                &self.dict,
            )?);
        }
        let order = self.order.as_ref().expect("order built above");
        let transactions: Vec<_> = raw
            .iter()
            .map(|t| order.normalize(t, &self.dict))
            .filter(|t| !t.is_empty())
            .collect();
        let fp_items = transactions.iter().map(|t| t.len() as u64).sum();
        let batch = Batch {
            index,
            transactions,
            wall_duration_ms,
        };
        let report = self.tree.stream_update(&batch, order, &self.dict, &self.cfg)?;
        Ok((report, fp_items))
    }

    /// Steps until end of stream or `max_windows` windows.
    pub fn run(&mut self, max_windows: Option<u64>) -> Result<()> {
        while max_windows.is_none_or(|m| self.windows < m) {
            if self.step()? == Step::EndOfStream {
                break;
            }
        }
        Ok(())
    }

    pub fn tree(&self) -> &PatternTree {
        &self.tree
    }

    pub fn dict(&self) -> &ItemDict {
        &self.dict
    }

    pub fn stats(&self) -> &[BatchStats] {
        &self.stats
    }

    pub fn lattice(&self) -> &OffcLattice {
        &self.lattice
    }

    pub fn phases(&self) -> &PhaseMonitor {
        &self.phases
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    /// Transactions in the last `k` processed batches.
    pub fn window_transactions(&self, k: u64) -> u64 {
        self.batch_sizes.iter().rev().take(k as usize).sum()
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary::from_rows(&self.stats, self.lattice.total_lost())
    }

    pub fn into_parts(self) -> (PatternTree, ItemDict, Vec<BatchStats>, OffcLattice) {
        (self.tree, self.dict, self.stats, self.lattice)
    }
}
