//! Shaking point: periodic removal of faded subtrees.
//!
//! The fading factor of a node is `current_time - timestamp`, the number of
//! batches since its table last received a nonzero value. A depth-first walk
//! from the root drops every node whose fading factor reaches the fading
//! support, together with its whole subtree, without examining the dropped
//! descendants.
//!
//! A descendant may have been refreshed more recently than a faded parent
//! (a batch can update `BF` without updating `B`'s other extensions, and
//! vice versa). Such a descendant is dropped with its parent. What the walk
//! does guarantee is that every surviving node has a fading factor below
//! the support, because all of its ancestors survived and so it was visited.

use crate::fpstream::{PatternTree, ENTRY_BYTES, NODE_BYTES, ROOT};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ShakeReport {
    /// Nodes whose fading factor was computed.
    pub visited: u64,
    /// Nodes removed, including unvisited descendants.
    pub dropped: u64,
    pub bytes_freed: u64,
}

/// Fading factor of a node with `timestamp` at `current_time`.
pub fn fading_factor(current_time: u64, timestamp: u64) -> u64 {
    current_time.saturating_sub(timestamp)
}

/// Whether a shaking point is due after batch `current_time`.
pub fn is_shake_batch(current_time: u64, interval: u64) -> bool {
    interval > 0 && current_time > 0 && current_time.is_multiple_of(interval)
}

/// Drops every faded subtree of `tree`. The root is never dropped.
pub fn shaking_point(tree: &mut PatternTree, fading_support: u64) -> ShakeReport {
    let now = tree.current_time;
    let mut report = ShakeReport::default();
    let mut stack: Vec<_> = tree.node(ROOT).children.values().rev().copied().collect();
    while let Some(id) = stack.pop() {
        report.visited += 1;
        let node = tree.node(id);
        if fading_factor(now, node.timestamp) >= fading_support {
            let (nodes, entries) = tree.remove_subtree(id);
            report.dropped += nodes;
            report.bytes_freed += nodes * NODE_BYTES + entries * ENTRY_BYTES;
        } else {
            stack.extend(node.children.values().rev().copied());
        }
    }
    report
}

/// Itemsets of nodes that would be dropped at a shake now, in visit order.
/// Only the roots of faded subtrees are listed.
pub fn faded_roots(tree: &PatternTree, fading_support: u64) -> Vec<Vec<crate::ItemId>> {
    let now = tree.current_time();
    let mut out = Vec::new();
    let mut skip_deeper_than: Option<usize> = None;
    for view in tree.nodes() {
        if let Some(depth) = skip_deeper_than {
            if view.depth() > depth {
                continue;
            }
            skip_deeper_than = None;
        }
        if fading_factor(now, view.timestamp) >= fading_support {
            skip_deeper_than = Some(view.depth());
            out.push(view.itemset);
        }
    }
    out
}
