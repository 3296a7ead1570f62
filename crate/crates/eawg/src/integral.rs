//! Integral collections and the GF(2) linear system that counts them.
//!
//! A collection ε: Esupp(S) → {0,1} is integral when for every pair r < s
//! the sum Σ_{J ∈ Esupp, {r,s} ⊊ J} ε_J is divisible by δ(r,s). For δ = 1
//! the condition is vacuous, for δ = 2 it asks for an even sum, so integral
//! collections are exactly the GF(2) nullspace vectors of a matrix with one
//! row per pair outside the class and one column per essential member. The
//! nullity n₀ of that matrix is the quantity the decision procedure needs:
//! the kernel of Ŵ → W has order 2^{n₀}.
//!
//! [`brute_force_count`] recounts solutions by exhausting all 2^{|Esupp|}
//! candidate collections, giving an oracle that is independent of the
//! elimination code.

use crate::semilattice::{SemilatticeContext, SubsetMask};
use std::collections::BTreeMap;
use thiserror::Error;

/// A candidate collection: one 0/1 value per essential-support member.
pub type EpsMap = BTreeMap<SubsetMask, u8>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegralError {
    #[error("collection keys or values do not match the essential support")]
    KeyMismatch,
    #[error("essential support of size {0} is too large to enumerate")]
    TooLarge(usize),
}

/// Applies the defining divisibility test with plain integer arithmetic.
/// The map must have exactly the essential support as key set and 0/1 values.
pub fn is_integral(ctx: &SemilatticeContext, eps: &EpsMap) -> Result<bool, IntegralError> {
    if eps.len() != ctx.esupp_size() {
        return Err(IntegralError::KeyMismatch);
    }
    for (key, member) in eps.keys().zip(ctx.esupp()) {
        if key != member {
            return Err(IntegralError::KeyMismatch);
        }
    }
    if eps.values().any(|&v| v > 1) {
        return Err(IntegralError::KeyMismatch);
    }
    for (pos, &(r, s)) in ctx.pairs().iter().enumerate() {
        let sum: i64 = ctx
            .esupp()
            .iter()
            .filter(|j| j.contains_pair(r, s))
            .map(|j| eps[j] as i64)
            .sum();
        if sum % ctx.delta_at(pos) != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The GF(2) system over Esupp: row (r, s) for each pair with δ(r,s) = 2,
/// with a 1 in column J exactly when {r,s} ⊊ J.
#[derive(Clone, Debug)]
pub struct Gf2System {
    columns: Vec<SubsetMask>,
    rows: Vec<(u32, u32)>,
    words: Vec<Vec<u64>>,
}

impl Gf2System {
    /// Columns in ascending bitmask order; this fixes the coordinate order
    /// of every nullspace vector.
    pub fn columns(&self) -> &[SubsetMask] {
        &self.columns
    }

    /// The pairs contributing rows, in lexicographic order.
    pub fn rows(&self) -> &[(u32, u32)] {
        &self.rows
    }

    pub fn bit(&self, row: usize, col: usize) -> bool {
        self.words[row][col / 64] >> (col % 64) & 1 != 0
    }
}

pub fn build_system(ctx: &SemilatticeContext) -> Gf2System {
    let columns: Vec<SubsetMask> = ctx.esupp().to_vec();
    let word_len = columns.len().div_ceil(64);
    let mut rows = Vec::new();
    let mut words = Vec::new();
    for (pos, &(r, s)) in ctx.pairs().iter().enumerate() {
        if ctx.delta_at(pos) != 2 {
            continue;
        }
        let mut row = vec![0u64; word_len];
        for (col, j) in columns.iter().enumerate() {
            if j.contains_pair(r, s) {
                row[col / 64] |= 1 << (col % 64);
            }
        }
        rows.push((r, s));
        words.push(row);
    }
    Gf2System {
        columns,
        rows,
        words,
    }
}

/// A basis of the integral collections, read off a reduced row echelon form.
/// Basis vectors are ordered by their free column, ascending, so the output
/// is deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nullspace {
    pub n0: usize,
    pub basis: Vec<EpsMap>,
}

pub fn nullspace(system: &Gf2System) -> Nullspace {
    let cols = system.columns.len();
    let word_len = cols.div_ceil(64);
    let mut rows = system.words.clone();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let Some(hit) = (next..rows.len()).find(|&i| rows[i][col / 64] >> (col % 64) & 1 != 0)
        else {
            continue;
        };
        rows.swap(next, hit);
        let pivot_row = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && row[col / 64] >> (col % 64) & 1 != 0 {
                for w in 0..word_len {
                    row[w] ^= pivot_row[w];
                }
            }
        }
        pivots.push((next, col));
        next += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut eps: EpsMap = system.columns.iter().map(|&m| (m, 0)).collect();
        eps.insert(system.columns[free], 1);
        for &(row, pivot_col) in &pivots {
            if rows[row][free / 64] >> (free % 64) & 1 != 0 {
                eps.insert(system.columns[pivot_col], 1);
            }
        }
        basis.push(eps);
    }
    Nullspace {
        n0: basis.len(),
        basis,
    }
}

/// Counts integral collections by enumerating every 0/1 assignment on the
/// essential support and testing each divisibility condition as an even
/// parity. Exponential in |Esupp|; the result always equals 2^{n₀}.
pub fn brute_force_count(ctx: &SemilatticeContext) -> Result<u64, IntegralError> {
    let k = ctx.esupp_size();
    if k > 24 {
        return Err(IntegralError::TooLarge(k));
    }
    // Row masks over Esupp columns for the pairs with δ = 2.
    let mut row_masks = Vec::new();
    for (pos, &(r, s)) in ctx.pairs().iter().enumerate() {
        if ctx.delta_at(pos) != 2 {
            continue;
        }
        let mut mask = 0u64;
        for (col, j) in ctx.esupp().iter().enumerate() {
            if j.contains_pair(r, s) {
                mask |= 1 << col;
            }
        }
        row_masks.push(mask);
    }
    let mut count = 0u64;
    for eps in 0..1u64 << k {
        if row_masks
            .iter()
            .all(|&mask| (eps & mask).count_ones() & 1 == 0)
        {
            count += 1;
        }
    }
    Ok(count)
}

/// Enumerates all integral collections as maps. Same guard as the counter;
/// meant for small essential supports (kernel closure checks, witnesses).
pub fn enumerate_integral(ctx: &SemilatticeContext) -> Result<Vec<EpsMap>, IntegralError> {
    let k = ctx.esupp_size();
    if k > 24 {
        return Err(IntegralError::TooLarge(k));
    }
    let mut out = Vec::new();
    for bits in 0..1u64 << k {
        let eps: EpsMap = ctx
            .esupp()
            .iter()
            .enumerate()
            .map(|(col, &j)| (j, (bits >> col & 1) as u8))
            .collect();
        if is_integral(ctx, &eps)? {
            out.push(eps);
        }
    }
    Ok(out)
}
