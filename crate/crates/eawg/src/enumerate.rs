//! Exhaustive classification of supporting classes of a given rank.
//!
//! A rank-ν supporting class is determined by which of the 2^ν − 1 − ν
//! subsets of cardinality ≥ 2 it contains (∅ and the singletons are
//! mandatory), so the classes of rank ν are indexed by free bitmasks over
//! those subsets listed in ascending mask order. The sweep walks every
//! class, computes n₀ with a specialized bitset elimination, and aggregates
//! an (index, n₀) histogram. Chunks of classes are processed independently
//! and merged by addition, so the result is identical for any worker count;
//! with the `parallel` feature the chunks run on a rayon pool, otherwise
//! sequentially.

use crate::semilattice::{permutations, SubsetMask, SupportingClass};
use crate::weyl;
use serde::Serialize;
use std::fmt;
use std::io;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

/// Full sweeps are capped here: rank 5 means 2^26 classes, rank 6 would be
/// 2^57.
pub const MAX_SWEEP_RANK: u32 = 5;

const MAX_INDEX: usize = 32;
const MAX_N0: usize = 17;
const CHUNK_BITS: u32 = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("rank {rank} is too large to sweep (maximum {MAX_SWEEP_RANK})")]
    RankTooLarge { rank: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExportFormat::Csv => write!(f, "csv"),
            ExportFormat::Json => write!(f, "json"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HistogramEntry {
    pub index: u32,
    pub n0: u32,
    pub count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexCount {
    pub index: u32,
    pub count: u64,
}

/// Counts restricted to permutation-canonical representatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DedupCounts {
    pub total_classes: u64,
    pub histogram: Vec<HistogramEntry>,
    pub failures_by_index: Vec<IndexCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepResult {
    pub rank: u32,
    pub total_classes: u64,
    pub histogram: Vec<HistogramEntry>,
    pub failures_by_index: Vec<IndexCount>,
    pub dedup: Option<DedupCounts>,
}

impl SweepResult {
    pub fn count(&self, index: u32, n0: u32) -> u64 {
        self.histogram
            .iter()
            .find(|e| e.index == index && e.n0 == n0)
            .map_or(0, |e| e.count)
    }

    /// Total number of classes lacking the presentation (n₀ > 0).
    pub fn lacking_total(&self) -> u64 {
        self.failures_by_index.iter().map(|e| e.count).sum()
    }
}

/// Number of classes a full sweep of this rank visits.
pub fn total_classes(rank: u32) -> Result<u64, EnumerateError> {
    if rank == 0 || rank > MAX_SWEEP_RANK {
        return Err(EnumerateError::RankTooLarge { rank });
    }
    Ok(1u64 << ((1u32 << rank) - 1 - rank))
}

/// The subsets a class of this rank may freely contain (cardinality ≥ 2),
/// in ascending mask order; bit i of a free mask toggles `slots[i]`.
pub fn free_slots(rank: u32) -> Vec<SubsetMask> {
    (1..(1u32 << rank))
        .map(SubsetMask)
        .filter(|m| m.card() >= 2)
        .collect()
}

/// Materialize the supporting class a free bitmask denotes.
pub fn class_from_free_mask(rank: u32, free: u64) -> Result<SupportingClass, EnumerateError> {
    if rank == 0 || rank > MAX_SWEEP_RANK {
        return Err(EnumerateError::RankTooLarge { rank });
    }
    let slots = free_slots(rank);
    assert!(free < 1u64 << slots.len(), "free mask out of range");
    let mut members = vec![SubsetMask::EMPTY];
    members.extend((1..=rank).map(SubsetMask::singleton));
    members.extend(
        slots
            .iter()
            .enumerate()
            .filter(|&(i, _)| free >> i & 1 == 1)
            .map(|(_, &m)| m),
    );
    Ok(SupportingClass::new(rank, members).expect("slot masks fit the rank"))
}

struct Tables {
    rank: u32,
    pair_slot_of: Vec<usize>,
    ess_positions: Vec<usize>,
    ess_row_of_pair: Vec<u64>,
    remaps: Vec<Vec<u8>>,
}

fn build_tables(rank: u32) -> Tables {
    let slots = free_slots(rank);
    let mut slot_of_mask = vec![usize::MAX; 1 << rank];
    for (i, m) in slots.iter().enumerate() {
        slot_of_mask[m.0 as usize] = i;
    }
    let pairs: Vec<(u32, u32)> = weyl::lex_pairs(rank).collect();
    let pair_slot_of: Vec<usize> = pairs
        .iter()
        .map(|&(r, s)| slot_of_mask[SubsetMask::pair(r, s).0 as usize])
        .collect();
    let ess_positions: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, m)| m.card() >= 3)
        .map(|(i, _)| i)
        .collect();
    let ess_row_of_pair: Vec<u64> = pairs
        .iter()
        .map(|&(r, s)| {
            ess_positions
                .iter()
                .enumerate()
                .filter(|&(_, &p)| slots[p].contains_pair(r, s))
                .fold(0u64, |row, (j, _)| row | 1 << j)
        })
        .collect();
    let mut remaps = Vec::new();
    for perm in permutations(rank) {
        let remap: Vec<u8> = slots
            .iter()
            .map(|m| {
                let image = m
                    .indices()
                    .iter()
                    .map(|&r| perm[r as usize - 1])
                    .fold(0u32, |acc, r| acc | 1 << (r - 1));
                slot_of_mask[image as usize] as u8
            })
            .collect();
        if remap.iter().enumerate().any(|(i, &j)| i != j as usize) {
            remaps.push(remap);
        }
    }
    Tables {
        rank,
        pair_slot_of,
        ess_positions,
        ess_row_of_pair,
        remaps,
    }
}

/// GF(2) nullity of the integral-collection system, specialized to the
/// bitmask encoding: one row per pair absent from the class, one column per
/// essential set present in it.
fn fast_n0(tables: &Tables, free: u64) -> u32 {
    let mut present_ess: u64 = 0;
    for (j, &p) in tables.ess_positions.iter().enumerate() {
        present_ess |= (free >> p & 1) << j;
    }
    let cols = present_ess.count_ones();
    if cols == 0 {
        return 0;
    }
    let mut pivot_for = [0u64; MAX_N0];
    let mut rank_count = 0;
    for (p, &slot) in tables.pair_slot_of.iter().enumerate() {
        if free >> slot & 1 == 1 {
            continue;
        }
        let mut row = tables.ess_row_of_pair[p] & present_ess;
        while row != 0 {
            let lead = 63 - row.leading_zeros() as usize;
            if pivot_for[lead] == 0 {
                pivot_for[lead] = row;
                rank_count += 1;
                break;
            }
            row ^= pivot_for[lead];
        }
    }
    cols - rank_count
}

fn is_canonical(tables: &Tables, free: u64) -> bool {
    for remap in &tables.remaps {
        let mut image: u64 = 0;
        let mut bits = free;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            image |= 1u64 << remap[i];
            bits &= bits - 1;
        }
        if image < free {
            return false;
        }
    }
    true
}

#[derive(Clone)]
struct Stats {
    total: u64,
    hist: [[u64; MAX_N0]; MAX_INDEX],
    dedup_total: u64,
    dedup_hist: [[u64; MAX_N0]; MAX_INDEX],
}

impl Stats {
    fn zero() -> Stats {
        Stats {
            total: 0,
            hist: [[0; MAX_N0]; MAX_INDEX],
            dedup_total: 0,
            dedup_hist: [[0; MAX_N0]; MAX_INDEX],
        }
    }

    fn absorb(mut self, other: Stats) -> Stats {
        self.total += other.total;
        self.dedup_total += other.dedup_total;
        for i in 0..MAX_INDEX {
            for j in 0..MAX_N0 {
                self.hist[i][j] += other.hist[i][j];
                self.dedup_hist[i][j] += other.dedup_hist[i][j];
            }
        }
        self
    }
}

fn scan_range(tables: &Tables, range: Range<u64>, dedup: bool) -> Stats {
    let mut stats = Stats::zero();
    for free in range {
        let index = tables.rank + free.count_ones();
        let n0 = fast_n0(tables, free);
        stats.total += 1;
        stats.hist[index as usize][n0 as usize] += 1;
        if dedup && is_canonical(tables, free) {
            stats.dedup_total += 1;
            stats.dedup_hist[index as usize][n0 as usize] += 1;
        }
    }
    stats
}

type Progress<'a> = Option<&'a (dyn Fn(u64, u64) + Sync)>;

#[cfg(feature = "parallel")]
fn run_parallel(
    tables: &Tables,
    range: Range<u64>,
    dedup: bool,
    workers: usize,
    progress: Progress<'_>,
) -> Stats {
    use rayon::prelude::*;
    use std::sync::atomic::{AtomicU64, Ordering};

    let total = range.end - range.start;
    let chunk = 1u64 << CHUNK_BITS;
    let chunks = total.div_ceil(chunk);
    let done = AtomicU64::new(0);
    let body = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = range.start + c * chunk;
                let hi = (lo + chunk).min(range.end);
                let stats = scan_range(tables, lo..hi, dedup);
                if let Some(cb) = progress {
                    cb(
                        done.fetch_add(hi - lo, Ordering::Relaxed) + (hi - lo),
                        total,
                    );
                }
                stats
            })
            .reduce(Stats::zero, Stats::absorb)
    };
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool construction")
            .install(body)
    } else {
        body()
    }
}

fn run_sequential(
    tables: &Tables,
    range: Range<u64>,
    dedup: bool,
    progress: Progress<'_>,
) -> Stats {
    let total = range.end - range.start;
    let chunk = 1u64 << CHUNK_BITS;
    let mut stats = Stats::zero();
    let mut lo = range.start;
    let mut done = 0;
    while lo < range.end {
        let hi = (lo + chunk).min(range.end);
        stats = stats.absorb(scan_range(tables, lo..hi, dedup));
        done += hi - lo;
        if let Some(cb) = progress {
            cb(done, total);
        }
        lo = hi;
    }
    stats
}

fn finish(rank: u32, stats: Stats, dedup: bool) -> SweepResult {
    fn tabulate(hist: &[[u64; MAX_N0]; MAX_INDEX]) -> (Vec<HistogramEntry>, Vec<IndexCount>) {
        let mut entries = Vec::new();
        let mut failures = Vec::new();
        for (index, row) in hist.iter().enumerate() {
            let mut lacking = 0;
            for (n0, &count) in row.iter().enumerate() {
                if count > 0 {
                    entries.push(HistogramEntry {
                        index: index as u32,
                        n0: n0 as u32,
                        count,
                    });
                    if n0 > 0 {
                        lacking += count;
                    }
                }
            }
            if lacking > 0 {
                failures.push(IndexCount {
                    index: index as u32,
                    count: lacking,
                });
            }
        }
        (entries, failures)
    }

    let (histogram, failures_by_index) = tabulate(&stats.hist);
    let dedup = dedup.then(|| {
        let (histogram, failures_by_index) = tabulate(&stats.dedup_hist);
        DedupCounts {
            total_classes: stats.dedup_total,
            histogram,
            failures_by_index,
        }
    });
    SweepResult {
        rank,
        total_classes: stats.total,
        histogram,
        failures_by_index,
        dedup,
    }
}

/// Classify every supporting class of the given rank. `workers` selects the
/// rayon pool size (0 = default); without the `parallel` feature the sweep
/// runs sequentially and `workers` is ignored. The result is independent of
/// the worker count.
pub fn sweep(rank: u32, dedup: bool, workers: usize) -> Result<SweepResult, EnumerateError> {
    sweep_with_progress(rank, dedup, workers, None)
}

/// As `sweep`, reporting (classes done, classes total) after each internal
/// chunk.
pub fn sweep_with_progress(
    rank: u32,
    dedup: bool,
    workers: usize,
    progress: Progress<'_>,
) -> Result<SweepResult, EnumerateError> {
    let total = total_classes(rank)?;
    let tables = build_tables(rank);
    #[cfg(feature = "parallel")]
    let stats = run_parallel(&tables, 0..total, dedup, workers, progress);
    #[cfg(not(feature = "parallel"))]
    let stats = {
        let _ = workers;
        run_sequential(&tables, 0..total, dedup, progress)
    };
    Ok(finish(rank, stats, dedup))
}

/// Classify a contiguous slice of the class space, optionally in parallel.
/// Bench support; not part of the public API surface.
#[doc(hidden)]
pub fn sweep_slice(
    rank: u32,
    start: u64,
    len: u64,
    dedup: bool,
    parallel: bool,
) -> Result<SweepResult, EnumerateError> {
    let total = total_classes(rank)?;
    let end = (start + len).min(total);
    let tables = build_tables(rank);
    let stats = if parallel {
        #[cfg(feature = "parallel")]
        {
            run_parallel(&tables, start..end, dedup, 0, None)
        }
        #[cfg(not(feature = "parallel"))]
        {
            run_sequential(&tables, start..end, dedup, None)
        }
    } else {
        run_sequential(&tables, start..end, dedup, None)
    };
    Ok(finish(rank, stats, dedup))
}

/// CSV view of the histogram: `index,n0,count` rows sorted by (index, n₀).
pub fn to_csv(result: &SweepResult) -> String {
    let mut out = String::from("index,n0,count\n");
    for e in &result.histogram {
        out.push_str(&format!("{},{},{}\n", e.index, e.n0, e.count));
    }
    out
}

/// Pretty-printed JSON mirror of the whole result.
pub fn to_json(result: &SweepResult) -> String {
    let mut text = serde_json::to_string_pretty(result).expect("result serializes");
    text.push('\n');
    text
}

pub fn export(result: &SweepResult, path: &Path, format: ExportFormat) -> io::Result<()> {
    let body = match format {
        ExportFormat::Csv => to_csv(result),
        ExportFormat::Json => to_json(result),
    };
    std::fs::write(path, body)
}
