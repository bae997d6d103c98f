//! Tilted-time frequency tables.
//!
//! A table records one frequency per batch. In [`WindowMode::Logarithmic`]
//! older batches are folded into coarser entries: at most two entries of
//! each span 1, 2, 4, ... are kept, and a third entry at some level merges
//! the two oldest of that level into one entry of twice the span. Totals are
//! always exact. Per-batch values are exact only for the newest entries.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowMode {
    #[default]
    Logarithmic,
    /// One entry per batch, never merged.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    /// Number of batches covered.
    pub span: u64,
    /// Summed frequency over those batches.
    pub freq: u64,
}

/// Result of [`TiltedTimeTable::query`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowCount {
    pub count: u64,
    /// The newest entries did not end exactly at the requested boundary, so
    /// the count includes batches older than requested.
    pub approximate: bool,
    /// More batches were requested than the table holds.
    pub clamped: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TiltedTimeTable {
    // oldest first; spans are non-increasing along the vector
    entries: Vec<Entry>,
    buffered_batches: u64,
}

impl TiltedTimeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, freq: u64) {
        self.push_with(freq, WindowMode::Logarithmic);
    }

    pub fn push_with(&mut self, freq: u64, mode: WindowMode) {
        self.entries.push(Entry { span: 1, freq });
        self.buffered_batches += 1;
        if mode == WindowMode::Flat {
            return;
        }
        let mut span = 1;
        let mut end = self.entries.len();
        loop {
            let level = self.entries[..end]
                .iter()
                .rev()
                .take_while(|e| e.span == span)
                .count();
            if level <= 2 {
                break;
            }
            let start = end - level;
            let merged = self.entries[start].freq + self.entries[start + 1].freq;
            self.entries[start] = Entry {
                span: span * 2,
                freq: merged,
            };
            self.entries.remove(start + 1);
            end = start + 1;
            span *= 2;
        }
    }

    /// Entries newest first.
    pub fn entries(&self) -> impl Iterator<Item = Entry> + '_ {
        self.entries.iter().rev().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn buffered_batches(&self) -> u64 {
        self.buffered_batches
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.freq).sum()
    }

    /// Frequency over the most recent `last_k` batches. When `last_k` falls
    /// inside a merged entry the whole entry is counted.
    pub fn query(&self, last_k: u64) -> Result<WindowCount> {
        if last_k == 0 {
            return Err(Error::EmptyWindow);
        }
        if last_k >= self.buffered_batches {
            return Ok(WindowCount {
                count: self.total(),
                approximate: false,
                clamped: last_k > self.buffered_batches,
            });
        }
        let mut covered = 0;
        let mut count = 0;
        for e in self.entries() {
            if covered >= last_k {
                break;
            }
            covered += e.span;
            count += e.freq;
        }
        Ok(WindowCount {
            count,
            approximate: covered > last_k,
            clamped: false,
        })
    }
}

impl fmt::Display for TiltedTimeTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", e.span, e.freq)?;
        }
        Ok(())
    }
}
