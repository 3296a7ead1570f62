//! Exact normal-form arithmetic for the extended affine Weyl group W.
//!
//! Every element of W factors uniquely as
//!
//! w_{α₁}^d · Π_r t_{1,r}^{n_r} · Π_{r<s} c_{r,s}^{k_{r,s}}
//!
//! with d ∈ {0,1}, translation exponents n ∈ ℤ^ν, and central exponents k
//! indexed by lexicographic pairs. The group law on triples follows from
//! three relations: w t_{1,r} w = t_{1,r}^{-1}, the commutator
//! [t_{1,r}, t_{1,s}] = c_{r,s}² for r < s, and centrality of the c's. The
//! only nontrivial bookkeeping is the two-cocycle picked up when translation
//! blocks pass each other.
//!
//! Everything here is independent of the supporting class except for the
//! operations that touch roots (which need validity) or the center (whose
//! generator lattice depends on the class). All of it is cross-checked
//! against the matrix representation in `rep`.

use crate::rep::{self, RepError, RepMatrix};
use crate::semilattice::{Root, SemilatticeContext, SubsetMask};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("elements have different ranks")]
    RankMismatch,
    #[error("root is not valid for this supporting class")]
    InvalidRoot,
    #[error("vector does not lie in the center of W")]
    NotInZ,
    #[error("integer overflow in exponent arithmetic")]
    Overflow,
}

/// Exponents of the commuting central generators c_{r,s}, in the
/// lexicographic pair order (1,2), (1,3), …, (ν−1,ν).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CentralVector(Vec<i64>);

impl CentralVector {
    pub fn zero(rank: u32) -> CentralVector {
        CentralVector(vec![0; pair_count(rank)])
    }

    pub fn from_exponents(exponents: Vec<i64>) -> CentralVector {
        CentralVector(exponents)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }
}

pub(crate) fn pair_count(rank: u32) -> usize {
    (rank as usize * (rank as usize - 1)) / 2
}

/// Position of pair (r, s), r < s, in the lexicographic pair list of the
/// given rank.
pub(crate) fn pair_slot(rank: u32, r: u32, s: u32) -> usize {
    debug_assert!(1 <= r && r < s && s <= rank);
    let r = r as usize - 1;
    let s = s as usize - 1;
    let n = rank as usize;
    r * n - r * (r + 1) / 2 + (s - r - 1)
}

/// Normal form (d, n, c) of an element of W.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeylElement {
    reflect: bool,
    t_exp: Vec<i64>,
    c_exp: CentralVector,
}

impl WeylElement {
    pub fn new(reflect: bool, t_exp: Vec<i64>, c_exp: CentralVector) -> WeylElement {
        assert_eq!(
            c_exp.0.len(),
            pair_count(t_exp.len() as u32),
            "central exponent length must match the rank"
        );
        WeylElement {
            reflect,
            t_exp,
            c_exp,
        }
    }

    pub fn identity(rank: u32) -> WeylElement {
        WeylElement::new(false, vec![0; rank as usize], CentralVector::zero(rank))
    }

    /// w_{α₁}.
    pub fn reflection_gen(rank: u32) -> WeylElement {
        WeylElement::new(true, vec![0; rank as usize], CentralVector::zero(rank))
    }

    /// t_{1,r}^k.
    pub fn translation_gen(rank: u32, r: u32, k: i64) -> WeylElement {
        assert!((1..=rank).contains(&r));
        let mut t_exp = vec![0; rank as usize];
        t_exp[r as usize - 1] = k;
        WeylElement::new(false, t_exp, CentralVector::zero(rank))
    }

    /// c_{r,s}^k, r < s.
    pub fn central_gen(rank: u32, r: u32, s: u32, k: i64) -> WeylElement {
        let mut c = CentralVector::zero(rank);
        c.0[pair_slot(rank, r, s)] = k;
        WeylElement::new(false, vec![0; rank as usize], c)
    }

    pub fn rank(&self) -> u32 {
        self.t_exp.len() as u32
    }

    pub fn reflect(&self) -> bool {
        self.reflect
    }

    pub fn t_exp(&self) -> &[i64] {
        &self.t_exp
    }

    pub fn c_exp(&self) -> &CentralVector {
        &self.c_exp
    }

    pub fn is_identity(&self) -> bool {
        !self.reflect && self.t_exp.iter().all(|&n| n == 0) && self.c_exp.is_zero()
    }

    /// Group product self·other (self acts after other on root vectors,
    /// matching matrix composition order).
    pub fn mul(&self, other: &WeylElement) -> Result<WeylElement, WeylError> {
        if self.rank() != other.rank() {
            return Err(WeylError::RankMismatch);
        }
        let rank = self.rank();
        // Move the left factor's translation block past the right factor's
        // reflection bit, then merge translations, collecting the cocycle.
        let left_t: Vec<i64> = if other.reflect {
            self.t_exp.iter().map(|&n| -n).collect()
        } else {
            self.t_exp.clone()
        };
        let mut t_exp = Vec::with_capacity(rank as usize);
        for (a, b) in left_t.iter().zip(&other.t_exp) {
            t_exp.push(a.checked_add(*b).ok_or(WeylError::Overflow)?);
        }
        let mut c_exp = Vec::with_capacity(pair_count(rank));
        for (slot, (r, s)) in lex_pairs(rank).enumerate() {
            let swap = left_t[s as usize - 1]
                .checked_mul(other.t_exp[r as usize - 1])
                .and_then(|p| p.checked_mul(-2))
                .ok_or(WeylError::Overflow)?;
            let k = self.c_exp.0[slot]
                .checked_add(other.c_exp.0[slot])
                .and_then(|v| v.checked_add(swap))
                .ok_or(WeylError::Overflow)?;
            c_exp.push(k);
        }
        Ok(WeylElement::new(
            self.reflect ^ other.reflect,
            t_exp,
            CentralVector(c_exp),
        ))
    }

    /// Group inverse. T(n)⁻¹ = T(−n)·C(−q(n)) with q(n)_{r,s} = 2 n_r n_s.
    pub fn inv(&self) -> Result<WeylElement, WeylError> {
        let rank = self.rank();
        let t_exp: Vec<i64> = if self.reflect {
            self.t_exp.clone()
        } else {
            self.t_exp.iter().map(|&n| -n).collect()
        };
        let mut c_exp = Vec::with_capacity(pair_count(rank));
        for (slot, (r, s)) in lex_pairs(rank).enumerate() {
            let q = self.t_exp[r as usize - 1]
                .checked_mul(self.t_exp[s as usize - 1])
                .and_then(|p| p.checked_mul(2))
                .ok_or(WeylError::Overflow)?;
            let k = self.c_exp.0[slot]
                .checked_neg()
                .and_then(|v| v.checked_sub(q))
                .ok_or(WeylError::Overflow)?;
            c_exp.push(k);
        }
        Ok(WeylElement::new(self.reflect, t_exp, CentralVector(c_exp)))
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.t_exp.iter().map(|n| n.to_string()).collect();
        write!(
            f,
            "w^{} * t[{}]",
            if self.reflect { 1 } else { 0 },
            body.join(",")
        )?;
        for (slot, (r, s)) in lex_pairs(self.rank()).enumerate() {
            let k = self.c_exp.0[slot];
            if k != 0 {
                write!(f, " * c{{{r},{s}}}^{k}")?;
            }
        }
        Ok(())
    }
}

pub(crate) fn lex_pairs(rank: u32) -> impl Iterator<Item = (u32, u32)> {
    (1..=rank).flat_map(move |r| (r + 1..=rank).map(move |s| (r, s)))
}

/// w_α(β) = β − (β, α)α on roots; only signs pair under the form, so
/// (β, α) = 2·sign(β)·sign(α).
pub fn reflect_root(alpha: &Root, beta: &Root) -> Root {
    assert_eq!(alpha.rank(), beta.rank(), "roots must share a rank");
    let pairing = 2 * alpha.sign() * beta.sign();
    let coeffs = beta
        .coeffs()
        .iter()
        .zip(alpha.coeffs())
        .map(|(&b, &a)| b - pairing * a)
        .collect();
    Root::new(-beta.sign(), coeffs)
}

/// The reflection w_α as a normal form: for α = ±(α₁ + τ_J + 2λ) this is
/// T(λ) · w_{α₁+τ_J} · T(λ)⁻¹ with base form (d=1, n=−1_J, c=−1 on pairs
/// inside J).
pub fn from_reflection(ctx: &SemilatticeContext, root: &Root) -> Result<WeylElement, WeylError> {
    let rank = ctx.rank();
    // w_{−α} = w_α, so normalize the sign first.
    let positive = if root.sign() < 0 {
        root.negated()
    } else {
        root.clone()
    };
    let parts = ctx.root_parts(&positive).ok_or(WeylError::InvalidRoot)?;
    let mut base_t = vec![0i64; rank as usize];
    for r in parts.support.indices() {
        base_t[r as usize - 1] = -1;
    }
    let mut base_c = CentralVector::zero(rank);
    for (slot, (r, s)) in lex_pairs(rank).enumerate() {
        if parts.support.contains_pair(r, s) {
            base_c.0[slot] = -1;
        }
    }
    let base = WeylElement::new(true, base_t, base_c);
    let shift = WeylElement::new(false, parts.lambda.clone(), CentralVector::zero(rank));
    shift.mul(&base)?.mul(&shift.inv()?)
}

/// Action on roots: C acts trivially, T(n) adds 2·sign·n to the radical
/// part, the reflection bit flips the sign.
pub fn act(ctx: &SemilatticeContext, w: &WeylElement, root: &Root) -> Result<Root, WeylError> {
    if w.rank() != ctx.rank() {
        return Err(WeylError::RankMismatch);
    }
    if !ctx.is_valid_root(root) {
        return Err(WeylError::InvalidRoot);
    }
    let sign = root.sign();
    let coeffs: Vec<i64> = root
        .coeffs()
        .iter()
        .zip(&w.t_exp)
        .map(|(&a, &n)| {
            n.checked_mul(2 * sign)
                .and_then(|shift| a.checked_add(shift))
                .ok_or(WeylError::Overflow)
        })
        .collect::<Result<_, _>>()?;
    Ok(Root::new(if w.reflect { -sign } else { sign }, coeffs))
}

/// Faithful matrix image: R^d · Π t-type · Π c-type in normal-form order.
pub fn to_matrix(ctx: &SemilatticeContext, w: &WeylElement) -> Result<RepMatrix, RepError> {
    let rank = ctx.rank();
    if w.rank() != rank {
        return Err(RepError::DimensionMismatch(
            w.rank() as usize,
            rank as usize,
        ));
    }
    let mut acc = if w.reflect {
        rep::reflection(ctx, &Root::alpha1(rank))?
    } else {
        RepMatrix::identity(rank)
    };
    for (r, &n) in (1..).zip(&w.t_exp) {
        if n != 0 {
            acc = acc.compose(&rep::t_matrix(rank, r, n)?)?;
        }
    }
    for (slot, (r, s)) in lex_pairs(rank).enumerate() {
        let k = w.c_exp.0[slot];
        if k != 0 {
            acc = acc.compose(&rep::c_matrix(rank, r, s, k)?)?;
        }
    }
    Ok(acc)
}

/// Exponent vector of the central element z_X over the c basis: pairs of X
/// when X belongs to the class, doubled unit for a pair outside it, zero
/// otherwise.
pub fn z_exponents(ctx: &SemilatticeContext, x: SubsetMask) -> CentralVector {
    let rank = ctx.rank();
    let mut c = CentralVector::zero(rank);
    if ctx.contains(x) {
        for (slot, (r, s)) in lex_pairs(rank).enumerate() {
            if x.contains_pair(r, s) {
                c.0[slot] = 1;
            }
        }
    } else if x.card() == 2 {
        let ix = x.indices();
        c.0[pair_slot(rank, ix[0], ix[1])] = 2;
    }
    c
}

/// The subsets X with a nontrivial z_X: every pair, in lexicographic order,
/// followed by the essential support in ascending bitmask order. These
/// generate the center of W.
pub fn z_generators(ctx: &SemilatticeContext) -> Vec<SubsetMask> {
    let mut gens: Vec<SubsetMask> = ctx
        .pairs()
        .iter()
        .map(|&(r, s)| SubsetMask::pair(r, s))
        .collect();
    gens.extend(ctx.esupp().iter().copied());
    gens
}

/// Writes a central vector as an integer combination of z_X for the given
/// generator list, or `NotInZ` when no integer combination exists. Any
/// valid decomposition may be returned; only generators with nonzero
/// coefficient appear in the output.
pub fn central_decompose_over(
    ctx: &SemilatticeContext,
    c: &CentralVector,
    generators: &[SubsetMask],
) -> Result<Vec<(SubsetMask, i64)>, WeylError> {
    if c.0.len() != ctx.pair_count() {
        return Err(WeylError::RankMismatch);
    }
    let columns: Vec<Vec<i64>> = generators.iter().map(|&x| z_exponents(ctx, x).0).collect();
    let solution = solve_integer(&columns, &c.0).ok_or(WeylError::NotInZ)?;
    Ok(generators
        .iter()
        .zip(solution)
        .filter(|&(_, x)| x != 0)
        .map(|(&g, x)| (g, x))
        .collect())
}

/// Membership in the center Z(W) = ⟨z_X⟩ with a constructive witness.
pub fn central_decompose(
    ctx: &SemilatticeContext,
    c: &CentralVector,
) -> Result<Vec<(SubsetMask, i64)>, WeylError> {
    central_decompose_over(ctx, c, &z_generators(ctx))
}

/// Rewrites a valid root as (word, base): a sequence of reflections in
/// roots of Π = {α₁ + τ_J : J ∈ supp} whose composite maps the base root
/// (itself in Π) onto the given root.
pub fn express_root(ctx: &SemilatticeContext, root: &Root) -> Result<(Vec<Root>, Root), WeylError> {
    let rank = ctx.rank();
    let parts = ctx.root_parts(root).ok_or(WeylError::InvalidRoot)?;
    let mut word = Vec::new();
    if root.sign() < 0 {
        // −α₁ + a = w_{α₁}(α₁ + a).
        word.push(Root::alpha1(rank));
    }
    for (r, &l) in (1u32..).zip(&parts.lambda) {
        let t_up = [
            Root::alpha1_plus_tau(rank, SubsetMask::singleton(r)),
            Root::alpha1(rank),
        ];
        for _ in 0..l.abs() {
            if l > 0 {
                word.extend(t_up.iter().cloned());
            } else {
                word.extend(t_up.iter().rev().cloned());
            }
        }
    }
    Ok((word, Root::alpha1_plus_tau(rank, parts.support)))
}

/// Solves Σ x_j·columns[j] = target over ℤ by column echelon reduction with
/// a unimodular transform. Returns any solution.
fn solve_integer(columns: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    let n = columns.len();
    let m = target.len();
    let mut a: Vec<Vec<i128>> = columns
        .iter()
        .map(|col| col.iter().map(|&v| v as i128).collect())
        .collect();
    for col in &a {
        assert_eq!(col.len(), m, "generator columns must match the pair count");
    }
    // u tracks column operations so a = original · u stays invariant.
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|j| (0..n).map(|i| i128::from(i == j)).collect())
        .collect();
    let mut fixed = 0;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for row in 0..m {
        loop {
            let mut best: Option<usize> = None;
            for j in fixed..n {
                if a[j][row] != 0 && best.is_none_or(|b| a[j][row].abs() < a[b][row].abs()) {
                    best = Some(j);
                }
            }
            let Some(pivot) = best else { break };
            a.swap(fixed, pivot);
            u.swap(fixed, pivot);
            let mut done = true;
            for j in fixed + 1..n {
                let q = a[j][row] / a[fixed][row];
                if q != 0 {
                    let (src, dst) = a.split_at_mut(j);
                    for (d, s) in dst[0].iter_mut().zip(&src[fixed]) {
                        *d = d.checked_sub(s.checked_mul(q)?)?;
                    }
                    let (src, dst) = u.split_at_mut(j);
                    for (d, s) in dst[0].iter_mut().zip(&src[fixed]) {
                        *d = d.checked_sub(s.checked_mul(q)?)?;
                    }
                }
                if a[j][row] != 0 {
                    done = false;
                }
            }
            if done {
                pivots.push((row, fixed));
                fixed += 1;
                break;
            }
        }
    }
    // Back substitution in echelon order.
    let mut residual: Vec<i128> = target.iter().map(|&v| v as i128).collect();
    let mut y = vec![0i128; n];
    for &(row, col) in &pivots {
        let pivot = a[col][row];
        if residual[row] % pivot != 0 {
            return None;
        }
        let q = residual[row] / pivot;
        y[col] = q;
        for i in 0..m {
            residual[i] = residual[i].checked_sub(a[col][i].checked_mul(q)?)?;
        }
    }
    if residual.iter().any(|&v| v != 0) {
        return None;
    }
    let mut x = vec![0i64; n];
    for (i, slot) in x.iter_mut().enumerate() {
        let mut acc: i128 = 0;
        for (j, &yj) in y.iter().enumerate() {
            acc = acc.checked_add(u[j][i].checked_mul(yj)?)?;
        }
        *slot = i64::try_from(acc).ok()?;
    }
    Some(x)
}
