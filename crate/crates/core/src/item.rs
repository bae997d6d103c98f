//! Items, transactions, batches, run configuration and the item order (f-list).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tilted::WindowMode;

/// Token that terminates a transaction in the stream format. Never an item.
pub const DELIMITER: &str = "x";

/// Dense internal handle for an item token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interner mapping external string tokens to dense [`ItemId`]s.
#[derive(Debug, Default, Clone)]
pub struct ItemDict {
    names: Vec<String>,
    ids: HashMap<String, ItemId>,
}

impl ItemDict {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, token: &str) -> Result<ItemId> {
        if token.is_empty() || token == DELIMITER || token.chars().any(char::is_whitespace) {
            return Err(Error::InvalidItem(token.to_string()));
        }
        if let Some(&id) = self.ids.get(token) {
            return Ok(id);
        }
        let id = ItemId(self.names.len() as u32);
        self.names.push(token.to_string());
        self.ids.insert(token.to_string(), id);
        Ok(id)
    }

    pub fn get(&self, token: &str) -> Option<ItemId> {
        self.ids.get(token).copied()
    }

    pub fn name(&self, id: ItemId) -> &str {
        &self.names[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Renders an itemset as its concatenated tokens when every token is a
    /// single character (`ACD`), space-separated otherwise.
    pub fn render(&self, items: &[ItemId]) -> String {
        let single = items.iter().all(|&i| self.name(i).chars().count() == 1);
        let sep = if single { "" } else { " " };
        items
            .iter()
            .map(|&i| self.name(i))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

/// A set of items sorted by the frozen [`ItemOrder`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Transaction {
    items: Vec<ItemId>,
}

impl Transaction {
    /// Wraps items that are already deduplicated and order-sorted.
    pub fn from_sorted(items: Vec<ItemId>) -> Self {
        Self { items }
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Transactions collected during one time window.
#[derive(Debug, Clone, Default)]
pub struct Batch {
    /// 1-based sequence number.
    pub index: u64,
    pub transactions: Vec<Transaction>,
    /// Milliseconds the reception window was open.
    pub wall_duration_ms: u64,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderPolicy {
    /// Frequency-descending over the first non-empty batch.
    FirstBatch,
    Lexicographic,
}

impl FromStr for OrderPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "first-batch" | "firstbatch" | "frequency" => Ok(OrderPolicy::FirstBatch),
            "lexicographic" | "lex" => Ok(OrderPolicy::Lexicographic),
            other => Err(Error::Config(format!("unknown order policy {other:?}"))),
        }
    }
}

impl fmt::Display for OrderPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderPolicy::FirstBatch => f.write_str("first-batch"),
            OrderPolicy::Lexicographic => f.write_str("lexicographic"),
        }
    }
}

/// Sort key of an item under an [`ItemOrder`]. Items seen in the first batch
/// precede every unseen item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OrderKey<'a> {
    Seen(u32),
    Unseen(&'a str),
}

/// Total order over the open item universe, frozen once built.
#[derive(Debug, Clone, Default)]
pub struct ItemOrder {
    // rank by ItemId index; None for items not seen when the order was built
    seen: Vec<Option<u32>>,
}

impl ItemOrder {
    /// Pure lexicographic order.
    pub fn lexicographic() -> Self {
        Self { seen: Vec::new() }
    }

    /// Frequency-descending order over `first_batch` (ties broken
    /// lexicographically), or lexicographic for [`OrderPolicy::Lexicographic`].
    pub fn build<'t, I>(first_batch: I, policy: OrderPolicy, dict: &ItemDict) -> Result<Self>
    where
        I: IntoIterator<Item = &'t [ItemId]>,
    {
        let mut counts: HashMap<ItemId, u64> = HashMap::new();
        let mut nonempty = false;
        for tx in first_batch {
            if tx.is_empty() {
                continue;
            }
            nonempty = true;
            let mut uniq = tx.to_vec();
            uniq.sort_unstable();
            uniq.dedup();
            for item in uniq {
                *counts.entry(item).or_default() += 1;
            }
        }
        if !nonempty {
            return Err(Error::EmptyOrderBatch);
        }
        if policy == OrderPolicy::Lexicographic {
            return Ok(Self::lexicographic());
        }
        let mut ranked: Vec<(ItemId, u64)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| dict.name(a.0).cmp(dict.name(b.0))));
        let max_id = ranked.iter().map(|(i, _)| i.index()).max().unwrap_or(0);
        let mut seen = vec![None; max_id + 1];
        for (rank, (item, _)) in ranked.into_iter().enumerate() {
            seen[item.index()] = Some(rank as u32);
        }
        Ok(Self { seen })
    }

    pub fn key<'d>(&self, item: ItemId, dict: &'d ItemDict) -> OrderKey<'d> {
        match self.seen.get(item.index()).copied().flatten() {
            Some(rank) => OrderKey::Seen(rank),
            None => OrderKey::Unseen(dict.name(item)),
        }
    }

    pub fn compare(&self, a: ItemId, b: ItemId, dict: &ItemDict) -> Ordering {
        self.key(a, dict).cmp(&self.key(b, dict))
    }

    /// Items ranked from the first batch, most frequent first.
    pub fn seen_items(&self) -> Vec<ItemId> {
        let mut out: Vec<(u32, ItemId)> = self
            .seen
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.map(|r| (r, ItemId(i as u32))))
            .collect();
        out.sort_unstable();
        out.into_iter().map(|(_, i)| i).collect()
    }

    /// Deduplicates `raw` and sorts it by this order.
    pub fn normalize(&self, raw: &[ItemId], dict: &ItemDict) -> Transaction {
        let mut items = raw.to_vec();
        items.sort_unstable();
        items.dedup();
        items.sort_by(|&a, &b| self.compare(a, b, dict));
        Transaction { items }
    }
}

/// Run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Min-support as a fraction of the transactions considered.
    pub sigma: f64,
    /// Max-support-error as a fraction of the batch size.
    pub epsilon: f64,
    pub window_period_ms: u64,
    /// Batches between shaking points.
    pub shake_interval_n: u64,
    /// Staleness, in batches, at which a node is dropped.
    pub fading_support: u64,
    pub seed: u64,
    pub order_policy: OrderPolicy,
    pub window_mode: WindowMode,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            sigma: 0.004,
            epsilon: 0.001,
            window_period_ms: 5000,
            shake_interval_n: 10,
            fading_support: 2,
            seed: 7,
            order_policy: OrderPolicy::FirstBatch,
            window_mode: WindowMode::Logarithmic,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= self.sigma && self.sigma < 1.0) {
            return Err(Error::Config(format!(
                "require 0 < epsilon <= sigma < 1, got epsilon={} sigma={}",
                self.epsilon, self.sigma
            )));
        }
        if self.window_period_ms == 0 {
            return Err(Error::Config("window period must be positive".into()));
        }
        if self.shake_interval_n == 0 {
            return Err(Error::Config("shake interval must be at least 1".into()));
        }
        if self.fading_support == 0 {
            return Err(Error::Config("fading support must be at least 1".into()));
        }
        Ok(())
    }

    /// `ceil(epsilon * batch_len)`.
    pub fn mining_threshold(&self, batch_len: usize) -> u64 {
        ceil_fraction(self.epsilon, batch_len as u64)
    }

    /// Parses `key=value` lines on top of the defaults. Blank lines and
    /// `#` comments are ignored.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
        }
        match key.replace('-', "_").as_str() {
            "sigma" => self.sigma = num(key, value)?,
            "sigma_pct" => self.sigma = num::<f64>(key, value)? / 100.0,
            "epsilon" => self.epsilon = num(key, value)?,
            "window_period_ms" | "window_ms" => self.window_period_ms = num(key, value)?,
            "shake_interval_n" | "shake_n" => self.shake_interval_n = num(key, value)?,
            "fading_support" => self.fading_support = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "order_policy" => self.order_policy = value.parse()?,
            "flat_windows" => {
                self.window_mode = if num::<bool>(key, value)? {
                    WindowMode::Flat
                } else {
                    WindowMode::Logarithmic
                }
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}

/// `ceil(fraction * n)`, treating products within rounding error of an
/// integer as that integer.
pub fn ceil_fraction(fraction: f64, n: u64) -> u64 {
    let x = fraction * n as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dict_with(tokens: &[&str]) -> (ItemDict, Vec<ItemId>) {
        let mut d = ItemDict::new();
        let ids = tokens.iter().map(|t| d.intern(t).unwrap()).collect();
        (d, ids)
    }

    fn tx(d: &mut ItemDict, s: &str) -> Vec<ItemId> {
        s.chars().map(|c| d.intern(&c.to_string()).unwrap()).collect()
    }

    fn names(d: &ItemDict, items: &[ItemId]) -> String {
        d.render(items)
    }

    #[test]
    fn delimiter_is_not_an_item() {
        let mut d = ItemDict::new();
        assert!(matches!(d.intern("x"), Err(Error::InvalidItem(_))));
        assert!(d.intern("").is_err());
        assert!(d.intern("xx").is_ok());
    }

    #[test]
    fn first_batch_order_counts_occurrences() {
        let mut d = ItemDict::new();
        let batch: Vec<Vec<ItemId>> = ["ACD", "EV", "ACJ", "BFA"]
            .iter()
            .map(|s| tx(&mut d, s))
            .collect();
        let order =
            ItemOrder::build(batch.iter().map(Vec::as_slice), OrderPolicy::FirstBatch, &d).unwrap();
        assert_eq!(names(&d, &order.seen_items()), "ACBDEFJV");
    }

    #[test]
    fn lexicographic_policy_ignores_data() {
        let mut d = ItemDict::new();
        let batch = [tx(&mut d, "CCBA")];
        let order =
            ItemOrder::build(batch.iter().map(Vec::as_slice), OrderPolicy::Lexicographic, &d)
                .unwrap();
        let raw = tx(&mut d, "CBA");
        assert_eq!(names(&d, order.normalize(&raw, &d).items()), "ABC");
    }

    #[test]
    fn unseen_items_rank_after_seen() {
        let mut d = ItemDict::new();
        let batch = [tx(&mut d, "Z")];
        let order =
            ItemOrder::build(batch.iter().map(Vec::as_slice), OrderPolicy::FirstBatch, &d).unwrap();
        let a = d.intern("A").unwrap();
        let z = d.get("Z").unwrap();
        assert_eq!(order.compare(z, a, &d), Ordering::Less);
        assert_eq!(names(&d, &order.seen_items()), "Z");
    }

    #[test]
    fn empty_first_batch_is_rejected() {
        let d = ItemDict::new();
        let empty: [&[ItemId]; 1] = [&[]];
        assert!(matches!(
            ItemOrder::build(empty, OrderPolicy::FirstBatch, &d),
            Err(Error::EmptyOrderBatch)
        ));
    }

    #[test]
    fn normalize_examples() {
        let mut d = ItemDict::new();
        let batch: Vec<Vec<ItemId>> = ["ACD", "EV", "ACJ", "BFA"]
            .iter()
            .map(|s| tx(&mut d, s))
            .collect();
        let order =
            ItemOrder::build(batch.iter().map(Vec::as_slice), OrderPolicy::FirstBatch, &d).unwrap();
        let dac = tx(&mut d, "DAC");
        assert_eq!(names(&d, order.normalize(&dac, &d).items()), "ACD");
        let aaa = tx(&mut d, "AAA");
        assert_eq!(names(&d, order.normalize(&aaa, &d).items()), "A");
        assert!(order.normalize(&[], &d).is_empty());
    }

    #[test]
    fn threshold_is_exact_ceiling() {
        let cfg = Config {
            epsilon: 0.1,
            ..Config::default()
        };
        assert_eq!(cfg.mining_threshold(30), 3);
        assert_eq!(cfg.mining_threshold(31), 4);
        assert_eq!(ceil_fraction(0.001, 1000), 1);
        assert_eq!(ceil_fraction(0.0015, 1000), 2);
        assert_eq!(ceil_fraction(0.25, 0), 0);
    }

    #[test]
    fn config_validation() {
        assert!(Config::default().validate().is_ok());
        let bad = Config {
            epsilon: 0.01,
            sigma: 0.001,
            ..Config::default()
        };
        assert!(bad.validate().is_err());
        let bad = Config {
            fading_support: 0,
            ..Config::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_from_key_value_text() {
        let cfg = Config::from_kv_str(
            "# run\nsigma = 0.006\nepsilon=0.002\nshake_n=3\nfading_support=4\norder_policy=lexicographic\nflat_windows=true\n",
        )
        .unwrap();
        assert_eq!(cfg.sigma, 0.006);
        assert_eq!(cfg.epsilon, 0.002);
        assert_eq!(cfg.shake_interval_n, 3);
        assert_eq!(cfg.fading_support, 4);
        assert_eq!(cfg.order_policy, OrderPolicy::Lexicographic);
        assert_eq!(cfg.window_mode, WindowMode::Flat);
        assert!(Config::from_kv_str("bogus=1").is_err());
        assert!(Config::from_kv_str("sigma").is_err());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_and_canonical(
            first in prop::collection::vec(prop::collection::vec(0u8..10, 0..6), 1..8),
            raw in prop::collection::vec(0u8..14, 0..10),
        ) {
            let tokens: Vec<String> = (0..14).map(|i| format!("t{i}")).collect();
            let (d, ids) = dict_with(&tokens.iter().map(String::as_str).collect::<Vec<_>>());
            let first: Vec<Vec<ItemId>> = first
                .iter()
                .map(|t| t.iter().map(|&i| ids[i as usize]).collect())
                .collect();
            prop_assume!(first.iter().any(|t| !t.is_empty()));
            let order = ItemOrder::build(first.iter().map(Vec::as_slice), OrderPolicy::FirstBatch, &d).unwrap();
            let raw: Vec<ItemId> = raw.iter().map(|&i| ids[i as usize]).collect();
            let once = order.normalize(&raw, &d);
            let twice = order.normalize(once.items(), &d);
            prop_assert_eq!(&once, &twice);
            let mut shuffled = raw.clone();
            shuffled.reverse();
            prop_assert_eq!(&once, &order.normalize(&shuffled, &d));
            for w in once.items().windows(2) {
                prop_assert_eq!(order.compare(w[0], w[1], &d), Ordering::Less);
            }
        }
    }
}
