//! Golden trace shared by the integration and acceptance targets.

#![allow(dead_code)]

use std::collections::BTreeMap;

use tiltstream::shaking::{fading_factor, shaking_point, ShakeReport};
use tiltstream::stream::{expand_prefix_chains, parse_pattern_batches};
use tiltstream::tilted::WindowMode;
use tiltstream::{ItemDict, PatternTree};

pub const GOLDEN_PATTERNS: &str = include_str!("../fixtures/golden_patterns.txt");
pub const GOLDEN_DUMP_FLAT: &str = include_str!("../fixtures/golden_shaken_flat.txt");
pub const GOLDEN_DUMP_LOG: &str = include_str!("../fixtures/golden_shaken_log.txt");

/// Node labels as root paths: `AC` is node C under A, `BFA` is A under BF.
pub type Labels = BTreeMap<String, u64>;

#[derive(Debug)]
pub struct GoldenTrace {
    /// Label to timestamp for nodes not refreshed by each batch.
    pub stale: Vec<Labels>,
    /// Label to new-node flag after each batch.
    pub created: Vec<Vec<String>>,
    /// Nonzero fading factors of the nodes the shake visits.
    pub factors: Labels,
    pub shake: ShakeReport,
    pub dump: String,
}

fn label(dict: &ItemDict, items: &[tiltstream::ItemId]) -> String {
    items.iter().map(|&i| dict.name(i)).collect()
}

/// Replays the three pattern batches with flat windows, shaking after the
/// third with the given fading support.
pub fn golden_trace(fading_support: u64) -> GoldenTrace {
    let mut dict = ItemDict::new();
    let mut tree = PatternTree::new(WindowMode::Flat);
    let mut stale = Vec::new();
    let mut created = Vec::new();
    for (i, batch) in parse_pattern_batches(GOLDEN_PATTERNS).into_iter().enumerate() {
        let index = i as u64 + 1;
        let patterns: Vec<Vec<_>> = batch
            .iter()
            .map(|p| p.iter().map(|t| dict.intern(t).unwrap()).collect())
            .collect();
        tree.update_from_patterns(index, 1, &expand_prefix_chains(&patterns))
            .unwrap();
        tree.check_invariants().unwrap();
        let views = tree.nodes();
        stale.push(
            views
                .iter()
                .filter(|v| v.timestamp < index)
                .map(|v| (label(&dict, &v.itemset), v.timestamp))
                .collect(),
        );
        created.push(
            views
                .iter()
                .filter(|v| v.created == index)
                .map(|v| label(&dict, &v.itemset))
                .collect(),
        );
    }
    let now = tree.current_time();
    let mut factors = Labels::new();
    let mut skip_below: Option<usize> = None;
    for v in tree.nodes() {
        if skip_below.is_some_and(|d| v.depth() > d) {
            continue;
        }
        skip_below = None;
        let f = fading_factor(now, v.timestamp);
        if f > 0 {
            factors.insert(label(&dict, &v.itemset), f);
        }
        if f >= fading_support {
            skip_below = Some(v.depth());
        }
    }
    let shake = shaking_point(&mut tree, fading_support);
    tree.check_invariants().unwrap();
    GoldenTrace {
        stale,
        created,
        factors,
        shake,
        dump: tree.dump(&dict),
    }
}

pub fn labels(pairs: &[(&str, u64)]) -> Labels {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}
