//! The FP-stream pattern tree and its per-batch incremental update.
//!
//! Each node stores the itemset spelled by its root path, a tilted-time
//! table with one pushed value per batch since the node was created, and the
//! batch index of its last nonzero push. Updating a batch has three phases:
//!
//! 1. every mined itemset already in the tree gets its frequency pushed and
//!    its time-stamp refreshed;
//! 2. a mined itemset not yet in the tree is inserted when its frequency
//!    reaches `ceil(epsilon * |B|)`, otherwise mining stops extending it;
//! 3. a depth-first scan pushes 0 into every node not touched this batch
//!    and leaves its time-stamp alone.
//!
//! Old table entries are never pruned and no node is removed here; removal
//! only happens at shaking points (see [`crate::shaking`]).

use std::fmt::Write as _;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::fptree::{fpgrowth_mine, FpTree, MineStats, Verdict};
use crate::item::{ceil_fraction, Batch, Config, ItemDict, ItemId, ItemOrder};
use crate::tilted::{TiltedTimeTable, WindowMode};

/// Analytic bytes charged per pattern-tree node.
pub const NODE_BYTES: u64 = 48;
/// Analytic bytes charged per tilted-time table entry.
pub const ENTRY_BYTES: u64 = 12;

pub(crate) type NodeId = u32;
pub(crate) const ROOT: NodeId = 0;

#[derive(Debug, Clone)]
pub(crate) struct PatternNode {
    pub(crate) item: ItemId,
    pub(crate) parent: NodeId,
    pub(crate) children: IndexMap<ItemId, NodeId>,
    pub(crate) table: TiltedTimeTable,
    pub(crate) timestamp: u64,
    pub(crate) created: u64,
    pub(crate) touched: bool,
}

impl PatternNode {
    fn new(item: ItemId, parent: NodeId, now: u64) -> Self {
        Self {
            item,
            parent,
            children: IndexMap::new(),
            table: TiltedTimeTable::new(),
            timestamp: now,
            created: now,
            touched: false,
        }
    }
}

/// Read-only view of a node handed out by [`PatternTree::nodes`].
#[derive(Debug, Clone)]
pub struct NodeView<'a> {
    pub itemset: Vec<ItemId>,
    pub timestamp: u64,
    pub created: u64,
    pub table: &'a TiltedTimeTable,
}

impl NodeView<'_> {
    pub fn item(&self) -> ItemId {
        *self.itemset.last().expect("views are never the root")
    }

    pub fn depth(&self) -> usize {
        self.itemset.len()
    }
}

/// Counters for one batch update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateReport {
    pub new_nodes: u64,
    pub nonzero_updates: u64,
    pub zero_updates: u64,
    pub mined_patterns: u64,
    /// Mining pass counters (zero for injected pattern sets).
    pub mining: MineStats,
    /// Nodes visited by the zero-insertion scan.
    pub scan_visits: u64,
}

impl UpdateReport {
    /// Deterministic work units for the batch: transactions' items inserted
    /// into the FP-tree plus mining work plus pattern offers plus scan visits.
    pub fn work_units(&self, fp_items: u64) -> u64 {
        fp_items + self.mining.work + self.mined_patterns + self.scan_visits
    }
}

/// A σ-level report row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequentPattern {
    pub itemset: Vec<ItemId>,
    pub count: u64,
    pub approximate: bool,
}

/// The FP-stream pattern tree.
#[derive(Debug, Clone)]
pub struct PatternTree {
    pub(crate) nodes: Vec<Option<PatternNode>>,
    free: Vec<NodeId>,
    pub(crate) node_count: usize,
    pub(crate) current_time: u64,
    window_mode: WindowMode,
}

impl Default for PatternTree {
    fn default() -> Self {
        Self::new(WindowMode::Logarithmic)
    }
}

impl PatternTree {
    pub fn new(window_mode: WindowMode) -> Self {
        Self {
            nodes: vec![Some(PatternNode::new(ItemId(u32::MAX), ROOT, 0))],
            free: Vec::new(),
            node_count: 0,
            current_time: 0,
            window_mode,
        }
    }

    /// Non-root nodes.
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Index of the last batch folded in (0 before the first).
    pub fn current_time(&self) -> u64 {
        self.current_time
    }

    pub fn window_mode(&self) -> WindowMode {
        self.window_mode
    }

    pub(crate) fn node(&self, id: NodeId) -> &PatternNode {
        self.nodes[id as usize].as_ref().expect("live node")
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut PatternNode {
        self.nodes[id as usize].as_mut().expect("live node")
    }

    fn alloc(&mut self, node: PatternNode) -> NodeId {
        self.node_count += 1;
        match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = Some(node);
                id
            }
            None => {
                self.nodes.push(Some(node));
                (self.nodes.len() - 1) as NodeId
            }
        }
    }

    fn lookup(&self, path: &[ItemId]) -> Option<NodeId> {
        let mut cur = ROOT;
        for item in path {
            cur = *self.node(cur).children.get(item)?;
        }
        Some(cur)
    }

    /// Detaches `id` and everything below it. Returns `(nodes, entries)`
    /// released.
    pub(crate) fn remove_subtree(&mut self, id: NodeId) -> (u64, u64) {
        debug_assert_ne!(id, ROOT);
        let parent = self.node(id).parent;
        let item = self.node(id).item;
        self.node_mut(parent).children.shift_remove(&item);
        let mut nodes = 0;
        let mut entries = 0;
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            let node = self.nodes[cur as usize].take().expect("live node");
            nodes += 1;
            entries += node.table.len() as u64;
            stack.extend(node.children.values().copied());
            self.free.push(cur);
        }
        self.node_count -= nodes as usize;
        (nodes, entries)
    }

    /// Preorder node ids, children in insertion order.
    pub(crate) fn preorder(&self) -> Vec<(NodeId, usize)> {
        let mut out = Vec::with_capacity(self.node_count);
        let mut stack: Vec<(NodeId, usize)> = self
            .node(ROOT)
            .children
            .values()
            .rev()
            .map(|&c| (c, 1))
            .collect();
        while let Some((id, depth)) = stack.pop() {
            out.push((id, depth));
            stack.extend(self.node(id).children.values().rev().map(|&c| (c, depth + 1)));
        }
        out
    }

    /// Starts the update for batch `index`.
    pub fn begin_batch(&mut self, index: u64, threshold: u64) -> Result<BatchUpdate<'_>> {
        if index != self.current_time + 1 {
            return Err(Error::Sequence {
                expected: self.current_time + 1,
                got: index,
            });
        }
        if threshold == 0 {
            return Err(Error::Threshold(threshold));
        }
        Ok(BatchUpdate {
            tree: self,
            index,
            threshold,
            report: UpdateReport::default(),
        })
    }

    /// Builds the FP-tree of `batch`, mines it down to `ceil(epsilon * |B|)`
    /// and folds the result into the tree.
    pub fn stream_update(
        &mut self,
        batch: &Batch,
        order: &ItemOrder,
        dict: &ItemDict,
        cfg: &Config,
    ) -> Result<UpdateReport> {
        let threshold = cfg.mining_threshold(batch.len()).max(1);
        let fp = FpTree::from_batch(batch, order, dict)?;
        let mut update = self.begin_batch(batch.index, threshold)?;
        let stats = fpgrowth_mine(&fp, threshold, |items, freq| update.offer(items, freq))?;
        update.report.mining = stats;
        Ok(update.finish())
    }

    /// Folds a pre-mined pattern set into the tree. Each itemset is a root
    /// path taken in the order given. A pattern whose proper prefix was
    /// refused (below threshold and not yet stored) is skipped.
    pub fn update_from_patterns(
        &mut self,
        index: u64,
        threshold: u64,
        patterns: &[(Vec<ItemId>, u64)],
    ) -> Result<UpdateReport> {
        let mut update = self.begin_batch(index, threshold)?;
        let mut refused: Vec<&[ItemId]> = Vec::new();
        for (itemset, freq) in patterns {
            if refused
                .iter()
                .any(|p| p.len() < itemset.len() && itemset.starts_with(p))
            {
                continue;
            }
            if update.offer(itemset, *freq) == Verdict::Stop {
                refused.push(itemset);
            }
        }
        Ok(update.finish())
    }

    /// Analytic size: `nodes * 48 + table entries * 12`.
    pub fn size_bytes(&self) -> u64 {
        self.node_count as u64 * NODE_BYTES + self.table_entries() * ENTRY_BYTES
    }

    pub fn table_entries(&self) -> u64 {
        self.nodes
            .iter()
            .skip(1)
            .flatten()
            .map(|n| n.table.len() as u64)
            .sum()
    }

    /// Depth-first views of every node.
    pub fn nodes(&self) -> Vec<NodeView<'_>> {
        let mut path: Vec<ItemId> = Vec::new();
        let mut out = Vec::with_capacity(self.node_count);
        for (id, depth) in self.preorder() {
            let node = self.node(id);
            path.truncate(depth - 1);
            path.push(node.item);
            out.push(NodeView {
                itemset: path.clone(),
                timestamp: node.timestamp,
                created: node.created,
                table: &node.table,
            });
        }
        out
    }

    /// View of the node spelling `itemset` (as a root path).
    pub fn find(&self, itemset: &[ItemId]) -> Option<NodeView<'_>> {
        let id = self.lookup(itemset)?;
        if id == ROOT {
            return None;
        }
        let node = self.node(id);
        Some(NodeView {
            itemset: itemset.to_vec(),
            timestamp: node.timestamp,
            created: node.created,
            table: &node.table,
        })
    }

    /// Stored itemsets whose count over the last `window_k` batches reaches
    /// `sigma * window_transactions`, by count descending then itemset.
    pub fn report_frequent(
        &self,
        sigma: f64,
        window_k: u64,
        window_transactions: u64,
        dict: &ItemDict,
    ) -> Result<Vec<FrequentPattern>> {
        if window_k == 0 {
            return Err(Error::EmptyWindow);
        }
        let threshold = ceil_fraction(sigma, window_transactions);
        let mut out = Vec::new();
        for view in self.nodes() {
            let q = view.table.query(window_k)?;
            if q.count >= threshold && q.count > 0 {
                out.push(FrequentPattern {
                    itemset: view.itemset,
                    count: q.count,
                    approximate: q.approximate,
                });
            }
        }
        out.sort_by(|a, b| {
            b.count.cmp(&a.count).then_with(|| {
                let an = a.itemset.iter().map(|&i| dict.name(i));
                let bn = b.itemset.iter().map(|&i| dict.name(i));
                an.cmp(bn)
            })
        });
        Ok(out)
    }

    /// One line per node, depth-first:
    /// `<2*(depth-1) spaces><item> ts=<n> table=[span:freq,...]`.
    pub fn dump(&self, dict: &ItemDict) -> String {
        let mut out = String::new();
        for (id, depth) in self.preorder() {
            let node = self.node(id);
            let _ = writeln!(
                out,
                "{:indent$}{} ts={} table=[{}]",
                "",
                dict.name(node.item),
                node.timestamp,
                node.table,
                indent = 2 * (depth - 1)
            );
        }
        out
    }

    /// Full structural check: parent links, node count, time-stamp bounds
    /// and table alignment (`buffered = current - created + 1`).
    pub fn check_invariants(&self) -> Result<()> {
        let order = self.preorder();
        if order.len() != self.node_count {
            return Err(Error::Invariant(format!(
                "node_count {} but {} reachable",
                self.node_count,
                order.len()
            )));
        }
        for (id, _) in order {
            let node = self.node(id);
            if self.node(node.parent).children.get(&node.item) != Some(&id) {
                return Err(Error::Invariant(format!("node {id} has a stale parent link")));
            }
            if node.timestamp > self.current_time || node.timestamp < node.created {
                return Err(Error::Invariant(format!(
                    "node {id} time-stamp {} outside [{}, {}]",
                    node.timestamp, node.created, self.current_time
                )));
            }
            if self.current_time > 0
                && node.table.buffered_batches() != self.current_time - node.created + 1
            {
                return Err(Error::Invariant(format!(
                    "node {id} table holds {} batches, expected {}",
                    node.table.buffered_batches(),
                    self.current_time - node.created + 1
                )));
            }
            if node.touched {
                return Err(Error::Invariant(format!("node {id} left touched")));
            }
        }
        Ok(())
    }
}

/// An in-progress batch update. Offer each mined itemset once, then
/// [`finish`](BatchUpdate::finish).
pub struct BatchUpdate<'a> {
    tree: &'a mut PatternTree,
    index: u64,
    threshold: u64,
    report: UpdateReport,
}

impl BatchUpdate<'_> {
    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    /// Applies one mined itemset (a root path) with its batch frequency.
    pub fn offer(&mut self, itemset: &[ItemId], freq: u64) -> Verdict {
        if itemset.is_empty() {
            return Verdict::Continue;
        }
        self.report.mined_patterns += 1;
        let mode = self.tree.window_mode;
        let index = self.index;
        if let Some(id) = self.tree.lookup(itemset) {
            let node = self.tree.node_mut(id);
            debug_assert!(!node.touched, "itemset offered twice in one batch");
            // an ancestor created earlier in this batch counts as new
            let fresh = node.created == index && node.table.buffered_batches() == 0;
            node.table.push_with(freq, mode);
            if freq > 0 {
                node.timestamp = index;
            }
            node.touched = true;
            if !fresh {
                self.report.nonzero_updates += 1;
            }
            return Verdict::Continue;
        }
        if freq < self.threshold {
            return Verdict::Stop;
        }
        let mut cur = ROOT;
        for &item in itemset {
            cur = match self.tree.node(cur).children.get(&item) {
                Some(&child) => child,
                None => {
                    let child = self.tree.alloc(PatternNode::new(item, cur, index));
                    self.tree.node_mut(cur).children.insert(item, child);
                    self.report.new_nodes += 1;
                    child
                }
            };
        }
        let node = self.tree.node_mut(cur);
        node.table.push_with(freq, mode);
        node.touched = true;
        Verdict::Continue
    }

    /// Zero-insertion scan, then advances the tree clock to this batch.
    pub fn finish(mut self) -> UpdateReport {
        let mode = self.tree.window_mode;
        for (id, _) in self.tree.preorder() {
            self.report.scan_visits += 1;
            let node = self.tree.node_mut(id);
            if node.touched {
                node.touched = false;
            } else {
                node.table.push_with(0, mode);
                self.report.zero_updates += 1;
            }
        }
        self.tree.current_time = self.index;
        self.report
    }
}
