//! Brute-force cross-check of the FP-growth miner.
//!
//! Small batches (at most 12 distinct items) are encoded as bitmasks and
//! every nonempty subset of every transaction is counted directly. The
//! resulting `itemset -> frequency` map must equal the miner's output
//! exactly.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fptree::{mine_sequential, FpTree, Verdict};
use crate::item::{Batch, ItemDict, ItemOrder, OrderPolicy};

pub const MAX_ITEMS: usize = 12;
pub const MAX_TRANSACTIONS: usize = 50;

/// Itemset over item indices `0..MAX_ITEMS`, one bit per item.
pub type Mask = u16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleCase {
    pub items: usize,
    pub transactions: Vec<Mask>,
    pub threshold: u64,
}

impl fmt::Display for OracleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# threshold {}", self.threshold)?;
        for &t in &self.transactions {
            writeln!(f, "{} x", render(t))?;
        }
        Ok(())
    }
}

fn render(mask: Mask) -> String {
    (0..MAX_ITEMS)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| format!("i{i}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Which miner output to compare. `Corrupted` inflates one frequency and
/// serves as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Miner {
    #[default]
    FpGrowth,
    Corrupted,
}

/// Counts every subset of every transaction; keeps those `>= threshold`.
pub fn brute_force(transactions: &[Mask], threshold: u64) -> BTreeMap<Mask, u64> {
    let mut counts = vec![0u64; 1 << MAX_ITEMS];
    for &t in transactions {
        let mut sub = t;
        while sub != 0 {
            counts[sub as usize] += 1;
            sub = (sub - 1) & t;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(m, c)| m != 0 && c >= threshold)
        .map(|(m, c)| (m as Mask, c))
        .collect()
}

/// Runs FP-growth over the case and maps the result back to masks.
pub fn mine(case: &OracleCase, miner: Miner) -> Result<BTreeMap<Mask, u64>> {
    let mut dict = ItemDict::new();
    let ids: Vec<_> = (0..case.items)
        .map(|i| dict.intern(&format!("i{i}")))
        .collect::<Result<_>>()?;
    let raw: Vec<Vec<_>> = case
        .transactions
        .iter()
        .map(|&t| (0..case.items).filter(|i| t & (1 << i) != 0).map(|i| ids[i]).collect())
        .collect();
    let order = ItemOrder::build(raw.iter().map(Vec::as_slice), OrderPolicy::FirstBatch, &dict)
        .unwrap_or_else(|_| ItemOrder::lexicographic());
    let batch = Batch {
        index: 1,
        transactions: raw.iter().map(|t| order.normalize(t, &dict)).collect(),
        wall_duration_ms: 0,
    };
    let tree = FpTree::from_batch(&batch, &order, &dict)?;
    let mut out = BTreeMap::new();
    let mut duplicate = None;
    mine_sequential(&tree, case.threshold, |items, freq| {
        let mask = items
            .iter()
            .fold(0 as Mask, |m, &id| m | 1 << id.index());
        if out.insert(mask, freq).is_some() {
            duplicate = Some(mask);
        }
        Verdict::Continue
    })?;
    if let Some(mask) = duplicate {
        return Err(Error::Invariant(format!("itemset {{{}}} mined twice", render(mask))));
    }
    if miner == Miner::Corrupted {
        if let Some(f) = out.values_mut().next() {
            *f += 1;
        }
    }
    Ok(out)
}

/// First disagreement between miner and oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub round: u64,
    /// Smallest failing case found by dropping transactions.
    pub case: OracleCase,
    pub itemset: Mask,
    pub expected: Option<u64>,
    pub mined: Option<u64>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "round {}: itemset {{{}}} expected {:?}, mined {:?}",
            self.round,
            render(self.itemset),
            self.expected,
            self.mined
        )?;
        write!(f, "{}", self.case)
    }
}

fn first_difference(
    expected: &BTreeMap<Mask, u64>,
    mined: &BTreeMap<Mask, u64>,
) -> Option<(Mask, Option<u64>, Option<u64>)> {
    expected
        .keys()
        .chain(mined.keys())
        .copied()
        .find(|k| expected.get(k) != mined.get(k))
        .map(|k| (k, expected.get(&k).copied(), mined.get(&k).copied()))
}

fn fails(case: &OracleCase, miner: Miner) -> Result<bool> {
    Ok(brute_force(&case.transactions, case.threshold) != mine(case, miner)?)
}

/// Checks one case, minimizing it on failure.
pub fn check_case(round: u64, case: &OracleCase, miner: Miner) -> Result<Option<Mismatch>> {
    if !fails(case, miner)? {
        return Ok(None);
    }
    let mut small = case.clone();
    let mut i = 0;
    while i < small.transactions.len() {
        let mut trial = small.clone();
        trial.transactions.remove(i);
        if fails(&trial, miner)? {
            small = trial;
        } else {
            i += 1;
        }
    }
    let expected = brute_force(&small.transactions, small.threshold);
    let mined = mine(&small, miner)?;
    let (itemset, expected, mined) =
        first_difference(&expected, &mined).expect("minimized case still fails");
    Ok(Some(Mismatch {
        round,
        case: small,
        itemset,
        expected,
        mined,
    }))
}

/// Random case for `round`, derived from `seed` so rounds are independent
/// of evaluation order.
pub fn random_case(seed: u64, round: u64, items: usize, transactions: usize) -> OracleCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    let density: f64 = rng.gen_range(0.15..0.7);
    let n = rng.gen_range(1..=transactions.max(1)).min(transactions);
    let txs = (0..n)
        .map(|_| {
            let mut m: Mask = 0;
            for i in 0..items {
                if rng.gen_bool(density) {
                    m |= 1 << i;
                }
            }
            if m == 0 && items > 0 {
                m = 1 << rng.gen_range(0..items);
            }
            m
        })
        .collect();
    OracleCase {
        items,
        transactions: txs,
        threshold: rng.gen_range(1..=5),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Pass { rounds: u64 },
    Fail(Box<Mismatch>),
}

/// Checks `rounds` random cases; reports the lowest failing round.
pub fn run_oracle(
    seed: u64,
    rounds: u64,
    items: usize,
    transactions: usize,
    miner: Miner,
) -> Result<OracleVerdict> {
    if items == 0 || items > MAX_ITEMS || transactions > MAX_TRANSACTIONS {
        return Err(Error::Config(format!(
            "oracle bounds are 1..={MAX_ITEMS} items and at most {MAX_TRANSACTIONS} transactions"
        )));
    }
    let check = |round: u64| check_case(round, &random_case(seed, round, items, transactions), miner);

    #[cfg(feature = "parallel")]
    let results: Vec<Option<Mismatch>> = {
        use rayon::prelude::*;
        (0..rounds).into_par_iter().map(check).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Option<Mismatch>> = (0..rounds).map(check).collect::<Result<_>>()?;

    Ok(match results.into_iter().flatten().next() {
        Some(m) => OracleVerdict::Fail(Box::new(m)),
        None => OracleVerdict::Pass { rounds },
    })
}
