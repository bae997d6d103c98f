//! Streaming frequent-itemset mining over batched transaction streams.
//!
//! Transactions are collected into fixed time windows. Each window is mined
//! with FP-growth down to the max-support-error threshold and folded into a
//! persistent pattern tree (the FP-stream) whose nodes carry tilted-time
//! frequency tables and the batch index of their last nonzero update. Every
//! `N` batches a shaking point walks the tree depth-first and drops any
//! subtree whose root has not been updated for `fading_support` batches.
//!
//! Module map:
//!
//! * [`item`]: items, transactions, batches, configuration and the f-list.
//! * [`fptree`]: per-batch FP-tree and FP-growth mining.
//! * [`tilted`]: logarithmic tilted-time frequency tables.
//! * [`fpstream`]: the pattern tree and its incremental update.
//! * [`shaking`]: periodic removal of faded subtrees.
//! * [`stream`]: stream sources, batch manager, offline-time lattice, pipeline.
//! * [`stats`]: per-batch telemetry and CSV output.
//! * [`oracle`]: brute-force subset counting used to cross-check the miner.
//! * [`cli`]: command-line driver.
//!
//! With the `parallel` feature (on by default) FP-growth mines the
//! conditional trees of top-level header items on the rayon pool, and the
//! oracle checker and simulated sweeps fan out across runs. Without it every
//! path runs sequentially with identical output.

pub mod cli;
pub mod error;
pub mod fpstream;
pub mod fptree;
pub mod item;
pub mod oracle;
pub mod shaking;
pub mod stats;
pub mod stream;
pub mod tilted;

pub use error::{Error, Result};
pub use fpstream::{PatternTree, UpdateReport};
pub use fptree::{FpTree, MinedPattern, Verdict};
pub use item::{Batch, Config, ItemDict, ItemId, ItemOrder, OrderPolicy, Transaction};
pub use shaking::{shaking_point, ShakeReport};
pub use tilted::{TiltedTimeTable, WindowMode};
