//! Per-batch FP-tree and FP-growth mining.
//!
//! Items are mapped to dense local ranks (0 = first in the item order) when
//! the tree is built, so every root-to-node path is strictly increasing in
//! rank. Mining walks header items from the highest rank down, emits each
//! pattern before its extensions, and lets the caller cut off an extension
//! chain by answering [`Verdict::Stop`].

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::item::{Batch, ItemDict, ItemId, ItemOrder};

const ROOT: u32 = u32::MAX;

/// Visitor answer for a mined pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Continue,
    /// Do not mine extensions of this pattern.
    Stop,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MinedPattern {
    /// Order-sorted itemset.
    pub itemset: Vec<ItemId>,
    pub frequency: u64,
}

/// Counters from one mining pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MineStats {
    pub emitted: u64,
    /// Nodes visited while building conditional pattern bases plus emissions.
    pub work: u64,
}

#[derive(Debug, Clone)]
struct Node {
    rank: u32,
    count: u64,
    parent: u32,
    children: Vec<(u32, u32)>,
}

/// Prefix tree over rank-sorted transactions with per-rank header chains.
#[derive(Debug, Clone)]
struct RankTree {
    nodes: Vec<Node>,
    header: Vec<Vec<u32>>,
}

impl RankTree {
    fn new(ranks: usize) -> Self {
        Self {
            nodes: vec![Node {
                rank: ROOT,
                count: 0,
                parent: ROOT,
                children: Vec::new(),
            }],
            header: vec![Vec::new(); ranks],
        }
    }

    fn insert(&mut self, path: &[u32], count: u64) {
        let mut cur = 0u32;
        for &rank in path {
            let found = self.nodes[cur as usize]
                .children
                .iter()
                .find(|(r, _)| *r == rank)
                .map(|&(_, idx)| idx);
            cur = match found {
                Some(idx) => {
                    self.nodes[idx as usize].count += count;
                    idx
                }
                None => {
                    let idx = self.nodes.len() as u32;
                    self.nodes.push(Node {
                        rank,
                        count,
                        parent: cur,
                        children: Vec::new(),
                    });
                    self.nodes[cur as usize].children.push((rank, idx));
                    self.header[rank as usize].push(idx);
                    idx
                }
            };
        }
    }

    fn support(&self, rank: u32) -> u64 {
        self.header[rank as usize]
            .iter()
            .map(|&n| self.nodes[n as usize].count)
            .sum()
    }

    /// Nodes top-down as `(rank, count)` when the tree is one chain.
    fn single_path(&self) -> Option<Vec<(u32, u64)>> {
        let mut out = Vec::new();
        let mut cur = &self.nodes[0];
        loop {
            match cur.children.as_slice() {
                [] => return Some(out),
                [(_, idx)] => {
                    cur = &self.nodes[*idx as usize];
                    out.push((cur.rank, cur.count));
                }
                _ => return None,
            }
        }
    }

    /// Conditional tree of `rank`, keeping only items with support
    /// `>= threshold` inside the conditional base.
    fn conditional(&self, rank: u32, threshold: u64, work: &mut u64) -> RankTree {
        let mut base: Vec<(Vec<u32>, u64)> = Vec::new();
        let mut counts = vec![0u64; rank as usize];
        for &leaf in &self.header[rank as usize] {
            let count = self.nodes[leaf as usize].count;
            let mut path = Vec::new();
            let mut cur = self.nodes[leaf as usize].parent;
            while cur != 0 {
                let node = &self.nodes[cur as usize];
                path.push(node.rank);
                counts[node.rank as usize] += count;
                cur = node.parent;
                *work += 1;
            }
            *work += 1;
            path.reverse();
            base.push((path, count));
        }
        let mut cond = RankTree::new(rank as usize);
        for (mut path, count) in base {
            path.retain(|&r| counts[r as usize] >= threshold);
            if !path.is_empty() {
                cond.insert(&path, count);
            }
        }
        cond
    }
}

/// Receives each mined suffix (in extension order, not sorted) with its support.
trait RankSink {
    fn emit(&mut self, suffix: &[u32], count: u64) -> Verdict;
}

fn mine_ranks<S: RankSink>(
    tree: &RankTree,
    threshold: u64,
    suffix: &mut Vec<u32>,
    sink: &mut S,
    stats: &mut MineStats,
) {
    if let Some(path) = tree.single_path() {
        mine_single_path(&path, u64::MAX, threshold, suffix, sink, stats);
        return;
    }
    for rank in (0..tree.header.len() as u32).rev() {
        mine_item(tree, rank, threshold, suffix, sink, stats);
    }
}

fn mine_item<S: RankSink>(
    tree: &RankTree,
    rank: u32,
    threshold: u64,
    suffix: &mut Vec<u32>,
    sink: &mut S,
    stats: &mut MineStats,
) {
    let support = tree.support(rank);
    if support < threshold {
        return;
    }
    suffix.push(rank);
    stats.emitted += 1;
    stats.work += 1;
    if sink.emit(suffix, support) == Verdict::Continue {
        let cond = tree.conditional(rank, threshold, &mut stats.work);
        if cond.nodes.len() > 1 {
            mine_ranks(&cond, threshold, suffix, sink, stats);
        }
    }
    suffix.pop();
}

fn mine_single_path<S: RankSink>(
    path: &[(u32, u64)],
    cap: u64,
    threshold: u64,
    suffix: &mut Vec<u32>,
    sink: &mut S,
    stats: &mut MineStats,
) {
    for idx in (0..path.len()).rev() {
        let (rank, count) = path[idx];
        let count = count.min(cap);
        if count < threshold {
            continue;
        }
        suffix.push(rank);
        stats.emitted += 1;
        stats.work += 1;
        if sink.emit(suffix, count) == Verdict::Continue {
            mine_single_path(&path[..idx], count, threshold, suffix, sink, stats);
        }
        suffix.pop();
    }
}

/// FP-tree of one batch.
#[derive(Debug, Clone)]
pub struct FpTree {
    tree: RankTree,
    // rank -> item
    items: Vec<ItemId>,
    ranks: HashMap<ItemId, u32>,
    transactions: u64,
}

impl FpTree {
    /// Empty tree over `items`, listed in item order.
    pub fn with_items(items: Vec<ItemId>) -> Self {
        let ranks = items
            .iter()
            .enumerate()
            .map(|(r, &i)| (i, r as u32))
            .collect();
        Self {
            tree: RankTree::new(items.len()),
            items,
            ranks,
            transactions: 0,
        }
    }

    /// Builds the tree for every transaction of `batch`; no item is pruned.
    pub fn from_batch(batch: &Batch, order: &ItemOrder, dict: &ItemDict) -> Result<Self> {
        let mut items: Vec<ItemId> = batch
            .transactions
            .iter()
            .flat_map(|t| t.items().iter().copied())
            .collect();
        items.sort_unstable();
        items.dedup();
        items.sort_by(|&a, &b| order.compare(a, b, dict));
        let mut tree = Self::with_items(items);
        for t in &batch.transactions {
            tree.insert(t.items())?;
        }
        Ok(tree)
    }

    /// Inserts one order-sorted transaction.
    pub fn insert(&mut self, items: &[ItemId]) -> Result<()> {
        let mut path = Vec::with_capacity(items.len());
        for (position, item) in items.iter().enumerate() {
            let rank = *self
                .ranks
                .get(item)
                .ok_or(Error::OrderViolation { position })?;
            if path.last().is_some_and(|&prev| prev >= rank) {
                return Err(Error::OrderViolation { position });
            }
            path.push(rank);
        }
        if path.is_empty() {
            return Ok(());
        }
        self.tree.insert(&path, 1);
        self.transactions += 1;
        Ok(())
    }

    /// Number of non-empty transactions inserted.
    pub fn transactions(&self) -> u64 {
        self.transactions
    }

    /// Non-root node count.
    pub fn node_count(&self) -> usize {
        self.tree.nodes.len() - 1
    }

    /// Sum of node counts along the header chain of `item`.
    pub fn header_support(&self, item: ItemId) -> u64 {
        self.ranks
            .get(&item)
            .map(|&r| self.tree.support(r))
            .unwrap_or(0)
    }

    /// Children of the node reached by `path`, as `(item, count)` in
    /// insertion order.
    pub fn children_of(&self, path: &[ItemId]) -> Option<Vec<(ItemId, u64)>> {
        let mut cur = 0u32;
        for item in path {
            let rank = *self.ranks.get(item)?;
            cur = self.tree.nodes[cur as usize]
                .children
                .iter()
                .find(|(r, _)| *r == rank)?
                .1;
        }
        Some(
            self.tree.nodes[cur as usize]
                .children
                .iter()
                .map(|&(r, idx)| (self.items[r as usize], self.tree.nodes[idx as usize].count))
                .collect(),
        )
    }

    /// Checks path ordering, child-count bounds and header chains.
    pub fn check_invariants(&self) -> Result<()> {
        let nodes = &self.tree.nodes;
        for (idx, node) in nodes.iter().enumerate().skip(1) {
            let parent = &nodes[node.parent as usize];
            if parent.rank != ROOT && parent.rank >= node.rank {
                return Err(Error::Invariant(format!("fp-tree node {idx} breaks rank order")));
            }
        }
        for (idx, node) in nodes.iter().enumerate().skip(1) {
            let below: u64 = node.children.iter().map(|&(_, c)| nodes[c as usize].count).sum();
            if below > node.count {
                return Err(Error::Invariant(format!("fp-tree node {idx} undercounts children")));
            }
        }
        let mut chained = 0;
        for (rank, chain) in self.tree.header.iter().enumerate() {
            for &n in chain {
                if nodes[n as usize].rank != rank as u32 {
                    return Err(Error::Invariant(format!("header chain {rank} links a foreign node")));
                }
            }
            chained += chain.len();
        }
        if chained != nodes.len() - 1 {
            return Err(Error::Invariant("header chains do not cover every node".into()));
        }
        Ok(())
    }

    fn frequent_ranks(&self, threshold: u64) -> Vec<u32> {
        (0..self.items.len() as u32)
            .rev()
            .filter(|&r| self.tree.support(r) >= threshold)
            .collect()
    }
}

struct ItemSink<'a, F> {
    items: &'a [ItemId],
    buf: Vec<ItemId>,
    sorted: Vec<u32>,
    visit: F,
}

impl<F: FnMut(&[ItemId], u64) -> Verdict> RankSink for ItemSink<'_, F> {
    fn emit(&mut self, suffix: &[u32], count: u64) -> Verdict {
        self.sorted.clear();
        self.sorted.extend_from_slice(suffix);
        self.sorted.sort_unstable();
        self.buf.clear();
        self.buf
            .extend(self.sorted.iter().map(|&r| self.items[r as usize]));
        (self.visit)(&self.buf, count)
    }
}

fn check_threshold(threshold: u64) -> Result<()> {
    if threshold == 0 {
        return Err(Error::Threshold(threshold));
    }
    Ok(())
}

/// Single-threaded FP-growth. `visit` receives each order-sorted itemset with
/// batch frequency `>= threshold` exactly once.
pub fn mine_sequential<F>(tree: &FpTree, threshold: u64, visit: F) -> Result<MineStats>
where
    F: FnMut(&[ItemId], u64) -> Verdict,
{
    check_threshold(threshold)?;
    let mut sink = ItemSink {
        items: &tree.items,
        buf: Vec::new(),
        sorted: Vec::new(),
        visit,
    };
    let mut stats = MineStats::default();
    let mut suffix = Vec::new();
    if tree.tree.nodes.len() > 1 {
        mine_ranks(&tree.tree, threshold, &mut suffix, &mut sink, &mut stats);
    }
    Ok(stats)
}

/// One emission recorded by a worker: rank-sorted itemset, count and depth
/// in the extension chain.
#[cfg(feature = "parallel")]
struct Recorded {
    ranks: Vec<u32>,
    count: u64,
    depth: usize,
}

#[cfg(feature = "parallel")]
#[derive(Default)]
struct Recorder {
    out: Vec<Recorded>,
}

#[cfg(feature = "parallel")]
impl RankSink for Recorder {
    fn emit(&mut self, suffix: &[u32], count: u64) -> Verdict {
        let mut ranks = suffix.to_vec();
        ranks.sort_unstable();
        self.out.push(Recorded {
            ranks,
            count,
            depth: suffix.len(),
        });
        Verdict::Continue
    }
}

/// FP-growth with the conditional trees of the top-level header items mined
/// on the rayon pool. Emissions are replayed to `visit` in the sequential
/// order; a `Stop` skips the recorded extensions of that pattern, so the
/// visitor observes exactly what [`mine_sequential`] would show it.
#[cfg(feature = "parallel")]
pub fn mine_parallel<F>(tree: &FpTree, threshold: u64, mut visit: F) -> Result<MineStats>
where
    F: FnMut(&[ItemId], u64) -> Verdict,
{
    use rayon::prelude::*;

    check_threshold(threshold)?;
    if tree.tree.nodes.len() <= 1 || tree.tree.single_path().is_some() {
        return mine_sequential(tree, threshold, visit);
    }
    let parts: Vec<(Recorder, MineStats)> = tree
        .frequent_ranks(threshold)
        .into_par_iter()
        .map(|rank| {
            let mut rec = Recorder::default();
            let mut stats = MineStats::default();
            let mut suffix = Vec::new();
            mine_item(&tree.tree, rank, threshold, &mut suffix, &mut rec, &mut stats);
            (rec, stats)
        })
        .collect();

    let mut stats = MineStats::default();
    let mut buf = Vec::new();
    let mut skip_below: Option<usize> = None;
    for (rec, part) in parts {
        stats.work += part.work;
        for e in rec.out {
            if let Some(depth) = skip_below {
                if e.depth > depth {
                    continue;
                }
                skip_below = None;
            }
            buf.clear();
            buf.extend(e.ranks.iter().map(|&r| tree.items[r as usize]));
            stats.emitted += 1;
            if visit(&buf, e.count) == Verdict::Stop {
                skip_below = Some(e.depth);
            }
        }
    }
    Ok(stats)
}

/// Minimum node count before [`fpgrowth_mine`] hands work to the rayon pool.
pub const PARALLEL_MIN_NODES: usize = 512;

/// FP-growth entry point used by the pattern tree. Runs [`mine_parallel`]
/// for large trees when the `parallel` feature is enabled.
pub fn fpgrowth_mine<F>(tree: &FpTree, threshold: u64, visit: F) -> Result<MineStats>
where
    F: FnMut(&[ItemId], u64) -> Verdict,
{
    #[cfg(feature = "parallel")]
    {
        if tree.node_count() >= PARALLEL_MIN_NODES {
            return mine_parallel(tree, threshold, visit);
        }
    }
    mine_sequential(tree, threshold, visit)
}

/// Collects every pattern with frequency `>= threshold`.
pub fn mine_all(tree: &FpTree, threshold: u64) -> Result<Vec<MinedPattern>> {
    let mut out = Vec::new();
    fpgrowth_mine(tree, threshold, |items, frequency| {
        out.push(MinedPattern {
            itemset: items.to_vec(),
            frequency,
        });
        Verdict::Continue
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::item::{OrderPolicy, Transaction};
    use proptest::prelude::*;
    use std::collections::{BTreeMap, BTreeSet};

    fn setup(txs: &[&str]) -> (ItemDict, ItemOrder, Batch) {
        let mut dict = ItemDict::new();
        let raw: Vec<Vec<ItemId>> = txs
            .iter()
            .map(|s| s.chars().map(|c| dict.intern(&c.to_string()).unwrap()).collect())
            .collect();
        let order = ItemOrder::build(raw.iter().map(Vec::as_slice), OrderPolicy::Lexicographic, &dict)
            .unwrap();
        let transactions = raw.iter().map(|t| order.normalize(t, &dict)).collect();
        let batch = Batch {
            index: 1,
            transactions,
            wall_duration_ms: 0,
        };
        (dict, order, batch)
    }

    fn as_map(dict: &ItemDict, pats: &[MinedPattern]) -> BTreeMap<String, u64> {
        pats.iter()
            .map(|p| (dict.render(&p.itemset), p.frequency))
            .collect()
    }

    fn ids(dict: &ItemDict, s: &str) -> Vec<ItemId> {
        s.chars().map(|c| dict.get(&c.to_string()).unwrap()).collect()
    }

    #[test]
    fn single_insert_builds_one_path() {
        let (dict, _, _) = setup(&["ACD"]);
        let mut tree = FpTree::with_items(ids(&dict, "ACD"));
        tree.insert(&ids(&dict, "ACD")).unwrap();
        let a = dict.get("A").unwrap();
        let c = dict.get("C").unwrap();
        let d = dict.get("D").unwrap();
        assert_eq!(tree.children_of(&[]).unwrap(), vec![(a, 1)]);
        assert_eq!(tree.children_of(&[a]).unwrap(), vec![(c, 1)]);
        assert_eq!(tree.children_of(&[a, c]).unwrap(), vec![(d, 1)]);
    }

    #[test]
    fn shared_prefix_branches() {
        let (dict, _, _) = setup(&["ACDJ"]);
        let mut tree = FpTree::with_items(ids(&dict, "ACDJ"));
        tree.insert(&ids(&dict, "ACD")).unwrap();
        tree.insert(&ids(&dict, "ACJ")).unwrap();
        let [a, c, d, j] = [ids(&dict, "A")[0], ids(&dict, "C")[0], ids(&dict, "D")[0], ids(&dict, "J")[0]];
        assert_eq!(tree.children_of(&[]).unwrap(), vec![(a, 2)]);
        assert_eq!(tree.children_of(&[a]).unwrap(), vec![(c, 2)]);
        assert_eq!(tree.children_of(&[a, c]).unwrap(), vec![(d, 1), (j, 1)]);
        tree.check_invariants().unwrap();
    }

    #[test]
    fn empty_transaction_is_a_no_op() {
        let (dict, _, _) = setup(&["AB"]);
        let mut tree = FpTree::with_items(ids(&dict, "AB"));
        tree.insert(&[]).unwrap();
        assert_eq!(tree.node_count(), 0);
        assert_eq!(tree.transactions(), 0);
    }

    #[test]
    fn unsorted_transaction_is_rejected() {
        let (dict, _, _) = setup(&["AB"]);
        let mut tree = FpTree::with_items(ids(&dict, "AB"));
        assert!(matches!(
            tree.insert(&ids(&dict, "BA")),
            Err(Error::OrderViolation { position: 1 })
        ));
        assert!(tree.insert(&ids(&dict, "AA")).is_err());
    }

    #[test]
    fn mines_golden_batch_one() {
        let (dict, order, batch) = setup(&["ACD", "EV", "ACJ", "BFA"]);
        let tree = FpTree::from_batch(&batch, &order, &dict).unwrap();
        let got = as_map(&dict, &mine_all(&tree, 1).unwrap());
        assert_eq!(got["A"], 3);
        assert_eq!(got["AC"], 2);
        assert_eq!(got["ACD"], 1);
        assert_eq!(got["ABF"], 1);
        assert_eq!(got["EV"], 1);
        // 7 + 3 + 7 + 7 distinct nonempty subsets, A, C, AC shared twice
        assert_eq!(got.len(), 7 + 3 + 7 + 7 - 3 - 1);
    }

    #[test]
    fn threshold_above_batch_size_mines_nothing() {
        let (dict, order, batch) = setup(&["AB", "BC"]);
        let tree = FpTree::from_batch(&batch, &order, &dict).unwrap();
        assert!(mine_all(&tree, 3).unwrap().is_empty());
    }

    #[test]
    fn single_transaction_power_set() {
        let (dict, order, batch) = setup(&["AB"]);
        let tree = FpTree::from_batch(&batch, &order, &dict).unwrap();
        let got = as_map(&dict, &mine_all(&tree, 1).unwrap());
        let want: BTreeMap<String, u64> = [("A", 1), ("B", 1), ("AB", 1)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn zero_threshold_is_an_error() {
        let (dict, order, batch) = setup(&["AB"]);
        let tree = FpTree::from_batch(&batch, &order, &dict).unwrap();
        assert!(matches!(mine_all(&tree, 0), Err(Error::Threshold(0))));
    }

    #[test]
    fn stop_suppresses_only_the_extension_chain() {
        let (dict, order, batch) = setup(&["ABC", "ABC", "BC"]);
        let tree = FpTree::from_batch(&batch, &order, &dict).unwrap();
        let c = dict.get("C").unwrap();
        let mut seen = Vec::new();
        mine_sequential(&tree, 1, |items, _| {
            seen.push(dict.render(items));
            if items == [c] {
                Verdict::Stop
            } else {
                Verdict::Continue
            }
        })
        .unwrap();
        // extensions of C (AC, BC, ABC) are cut; B's chain still yields AB
        assert_eq!(seen, vec!["C", "B", "AB", "A"]);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_replay_honors_stop() {
        let (dict, order, batch) = setup(&["ABCD", "ABD", "BCD", "ACD", "AB", "CD"]);
        let tree = FpTree::from_batch(&batch, &order, &dict).unwrap();
        let d = dict.get("D").unwrap();
        let b = dict.get("B").unwrap();
        let decide = |items: &[ItemId]| {
            if items == [d] || items == [b] {
                Verdict::Stop
            } else {
                Verdict::Continue
            }
        };
        let mut seq = Vec::new();
        mine_sequential(&tree, 1, |items, f| {
            seq.push((items.to_vec(), f));
            decide(items)
        })
        .unwrap();
        let mut par = Vec::new();
        mine_parallel(&tree, 1, |items, f| {
            par.push((items.to_vec(), f));
            decide(items)
        })
        .unwrap();
        assert_eq!(seq, par);
    }

    fn brute_force(txs: &[BTreeSet<u8>], threshold: u64) -> BTreeMap<Vec<u8>, u64> {
        let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
        for t in txs {
            let items: Vec<u8> = t.iter().copied().collect();
            for mask in 1u32..(1 << items.len()) {
                let subset: Vec<u8> = (0..items.len())
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| items[i])
                    .collect();
                *counts.entry(subset).or_default() += 1;
            }
        }
        counts.retain(|_, c| *c >= threshold);
        counts
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_brute_force(
            txs in prop::collection::vec(prop::collection::btree_set(0u8..10, 0..7), 0..30),
            threshold in 1u64..5,
            policy in prop_oneof![Just(OrderPolicy::FirstBatch), Just(OrderPolicy::Lexicographic)],
        ) {
            let mut dict = ItemDict::new();
            let raw: Vec<Vec<ItemId>> = txs
                .iter()
                .map(|t| t.iter().map(|i| dict.intern(&format!("i{i}")).unwrap()).collect())
                .collect();
            let order = match ItemOrder::build(raw.iter().map(Vec::as_slice), policy, &dict) {
                Ok(o) => o,
                Err(_) => ItemOrder::lexicographic(),
            };
            let batch = Batch {
                index: 1,
                transactions: raw.iter().map(|t| order.normalize(t, &dict)).collect::<Vec<Transaction>>(),
                wall_duration_ms: 0,
            };
            let tree = FpTree::from_batch(&batch, &order, &dict).unwrap();
            tree.check_invariants().unwrap();
            for item in 0u8..10 {
                if let Some(id) = dict.get(&format!("i{item}")) {
                    let containing = txs.iter().filter(|t| t.contains(&item)).count() as u64;
                    prop_assert_eq!(tree.header_support(id), containing);
                }
            }
            let mut got: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
            mine_sequential(&tree, threshold, |items, f| {
                let mut key: Vec<u8> = items
                    .iter()
                    .map(|&i| dict.name(i)[1..].parse().unwrap())
                    .collect();
                key.sort_unstable();
                assert!(got.insert(key, f).is_none(), "pattern emitted twice");
                Verdict::Continue
            }).unwrap();
            prop_assert_eq!(&got, &brute_force(&txs, threshold));
            for (set, &f) in &got {
                for drop in 0..set.len() {
                    if set.len() > 1 {
                        let mut sub = set.clone();
                        sub.remove(drop);
                        prop_assert!(got[&sub] >= f);
                    }
                }
            }
            #[cfg(feature = "parallel")]
            {
                let mut par: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
                mine_parallel(&tree, threshold, |items, f| {
                    let mut key: Vec<u8> = items
                        .iter()
                        .map(|&i| dict.name(i)[1..].parse().unwrap())
                        .collect();
                    key.sort_unstable();
                    par.insert(key, f);
                    Verdict::Continue
                }).unwrap();
                prop_assert_eq!(&got, &par);
            }
        }
    }
}
