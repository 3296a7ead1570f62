//! Supporting classes of semilattices and their derived combinatorial data.
//!
//! A semilattice S of rank ν sits inside the radical ℤσ₁ ⊕ … ⊕ ℤσ_ν and is
//! determined up to the relevant equivalence by its supporting class
//! supp(S) = { J ⊆ {1, …, ν} : τ_J ∈ S }, where τ_J = Σ_{r∈J} σ_r. A
//! collection of subsets arises this way exactly when it contains the empty
//! set and every singleton. Everything downstream (the pairing function δ,
//! the essential support, integral collections, the groups W and Ŵ) is
//! computed from this finite datum, so this module is the root of the crate.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Largest supported rank. Subsets are stored as `u32` bitmasks and several
/// tables are quadratic in the rank, so the cap is generous but finite.
pub const MAX_RANK: u32 = 24;

/// A subset of {1, …, ν} stored as a bitmask; bit r−1 encodes membership of r.
///
/// Ordering and equality are plain integer comparison of the mask, which
/// gives the deterministic "ascending bitmask" order used everywhere.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    /// The empty subset.
    pub const EMPTY: SubsetMask = SubsetMask(0);

    /// The singleton {r}; `r` is 1-based.
    pub fn singleton(r: u32) -> SubsetMask {
        assert!((1..=32).contains(&r), "singleton index {r} out of range");
        SubsetMask(1 << (r - 1))
    }

    /// The pair {r, s} with r ≠ s; both 1-based.
    pub fn pair(r: u32, s: u32) -> SubsetMask {
        assert_ne!(r, s, "a pair needs two distinct indices");
        SubsetMask(Self::singleton(r).0 | Self::singleton(s).0)
    }

    /// Builds a subset from 1-based indices. Repeats are collapsed.
    pub fn from_indices(indices: &[u32]) -> SubsetMask {
        indices.iter().fold(SubsetMask::EMPTY, |m, &r| {
            SubsetMask(m.0 | Self::singleton(r).0)
        })
    }

    /// The 1-based indices of the subset in ascending order.
    pub fn indices(self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.card() as usize);
        let mut bits = self.0;
        while bits != 0 {
            out.push(bits.trailing_zeros() + 1);
            bits &= bits - 1;
        }
        out
    }

    /// Number of elements.
    pub fn card(self) -> u32 {
        self.0.count_ones()
    }

    /// Whether r (1-based) is an element.
    pub fn contains(self, r: u32) -> bool {
        (1..=32).contains(&r) && self.0 & (1 << (r - 1)) != 0
    }

    /// Whether both r and s are elements.
    pub fn contains_pair(self, r: u32, s: u32) -> bool {
        self.contains(r) && self.contains(s)
    }

    /// Whether `self` ⊆ `other`.
    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// Symmetric difference `self` Δ `other`.
    pub fn symmetric_difference(self, other: SubsetMask) -> SubsetMask {
        SubsetMask(self.0 ^ other.0)
    }

    /// Whether every index fits inside {1, …, rank}.
    pub fn fits_rank(self, rank: u32) -> bool {
        rank >= 32 || self.0 >> rank == 0
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, r) in self.indices().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SubsetMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.indices().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SubsetMask {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let indices = Vec::<u32>::deserialize(deserializer)?;
        for &r in &indices {
            if !(1..=32).contains(&r) {
                return Err(D::Error::custom(format!(
                    "subset index {r} out of range 1..=32"
                )));
            }
        }
        Ok(SubsetMask::from_indices(&indices))
    }
}

/// Sort key placing subsets in graded order: by cardinality, then bitmask.
fn graded_key(m: SubsetMask) -> (u32, u32) {
    (m.card(), m.0)
}

/// Errors for building, parsing, and transforming supporting classes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemilatticeError {
    #[error("rank {rank} out of range 1..={MAX_RANK}")]
    RankOutOfRange { rank: u32 },
    #[error("member {member} does not fit rank {rank}")]
    MaskOutOfRange { member: SubsetMask, rank: u32 },
    #[error("the empty set must belong to every supporting class")]
    MissingEmptySet,
    #[error("missing singleton {{{0}}}")]
    MissingSingleton(u32),
    #[error("duplicate member {0}")]
    DuplicateMember(SubsetMask),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("no standard family of index {index} exists at rank {rank}")]
    IndexOutOfRange { rank: u32, index: u32 },
    #[error("permutation is not a bijection of 1..=rank")]
    InvalidPermutation,
}

/// The supporting class of a rank-ν semilattice: a set of subsets of
/// {1, …, ν} containing ∅ and every singleton.
///
/// Members are stored deduplicated and graded — by cardinality first, then by
/// ascending bitmask — so equality of two classes is plain structural
/// equality and serialization lists singletons before pairs before triples.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "ClassJson", into = "ClassJson")]
pub struct SupportingClass {
    rank: u32,
    members: Vec<SubsetMask>,
}

impl SupportingClass {
    /// Validates and builds a supporting class. The member list must contain
    /// ∅ and all singletons explicitly and must be free of duplicates.
    pub fn new(
        rank: u32,
        members: impl IntoIterator<Item = SubsetMask>,
    ) -> Result<SupportingClass, SemilatticeError> {
        if !(1..=MAX_RANK).contains(&rank) {
            return Err(SemilatticeError::RankOutOfRange { rank });
        }
        let mut members: Vec<SubsetMask> = members.into_iter().collect();
        members.sort_unstable_by_key(|m| graded_key(*m));
        for window in members.windows(2) {
            if window[0] == window[1] {
                return Err(SemilatticeError::DuplicateMember(window[0]));
            }
        }
        for &member in &members {
            if !member.fits_rank(rank) {
                return Err(SemilatticeError::MaskOutOfRange { member, rank });
            }
        }
        if members.first() != Some(&SubsetMask::EMPTY) {
            return Err(SemilatticeError::MissingEmptySet);
        }
        for r in 1..=rank {
            let singleton = SubsetMask::singleton(r);
            if members
                .binary_search_by_key(&graded_key(singleton), |m| graded_key(*m))
                .is_err()
            {
                return Err(SemilatticeError::MissingSingleton(r));
            }
        }
        Ok(SupportingClass { rank, members })
    }

    /// The minimal supporting class of the given rank: ∅ and the singletons.
    pub fn minimal(rank: u32) -> Result<SupportingClass, SemilatticeError> {
        let members =
            std::iter::once(SubsetMask::EMPTY).chain((1..=rank).map(SubsetMask::singleton));
        SupportingClass::new(rank, members)
    }

    /// The full lattice class: every subset of {1, …, rank}.
    pub fn full_lattice(rank: u32) -> Result<SupportingClass, SemilatticeError> {
        if !(1..=MAX_RANK).contains(&rank) {
            return Err(SemilatticeError::RankOutOfRange { rank });
        }
        SupportingClass::new(rank, (0..1u32 << rank).map(SubsetMask))
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Members in graded order (cardinality, then bitmask); the first is
    /// always ∅.
    pub fn members(&self) -> &[SubsetMask] {
        &self.members
    }

    /// The index of the semilattice: number of members minus one.
    pub fn index(&self) -> u32 {
        self.members.len() as u32 - 1
    }

    pub fn contains(&self, member: SubsetMask) -> bool {
        self.members
            .binary_search_by_key(&graded_key(member), |m| graded_key(*m))
            .is_ok()
    }
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    rank: u32,
    supp: Vec<SubsetMask>,
}

impl From<SupportingClass> for ClassJson {
    fn from(class: SupportingClass) -> ClassJson {
        ClassJson {
            rank: class.rank,
            supp: class
                .members
                .into_iter()
                .filter(|&m| m != SubsetMask::EMPTY)
                .collect(),
        }
    }
}

impl TryFrom<ClassJson> for SupportingClass {
    type Error = SemilatticeError;

    fn try_from(json: ClassJson) -> Result<SupportingClass, SemilatticeError> {
        let mut members = json.supp;
        if !members.contains(&SubsetMask::EMPTY) {
            members.push(SubsetMask::EMPTY);
        }
        SupportingClass::new(json.rank, members)
    }
}

impl TryFrom<ClassJson> for SemilatticeContext {
    type Error = SemilatticeError;

    fn try_from(json: ClassJson) -> Result<SemilatticeContext, SemilatticeError> {
        SupportingClass::try_from(json).map(SemilatticeContext::new)
    }
}

impl From<SemilatticeContext> for ClassJson {
    fn from(ctx: SemilatticeContext) -> ClassJson {
        ClassJson::from(ctx.supp)
    }
}

/// Parses the inline text format `rank=<ν>; {a,b},{c},…`.
///
/// The empty set is implicit (an explicit `{}` is also accepted), singletons
/// must be listed, and whitespace is free between tokens.
pub fn parse_supp(text: &str) -> Result<SupportingClass, SemilatticeError> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    cur.expect_keyword("rank")?;
    cur.skip_ws();
    cur.expect_byte(b'=')?;
    cur.skip_ws();
    let rank = cur.parse_u32()?;
    cur.skip_ws();
    cur.expect_byte(b';')?;
    let mut members: Vec<SubsetMask> = Vec::new();
    cur.skip_ws();
    if !cur.at_end() {
        loop {
            members.push(cur.parse_member()?);
            cur.skip_ws();
            if cur.at_end() {
                break;
            }
            cur.expect_byte(b',')?;
            cur.skip_ws();
        }
    }
    if !members.contains(&SubsetMask::EMPTY) {
        members.push(SubsetMask::EMPTY);
    }
    SupportingClass::new(rank, members)
}

/// Renders a class in the inline text format; `parse_supp` inverts it.
pub fn serialize_supp(class: &SupportingClass) -> String {
    let body: Vec<String> = class
        .members()
        .iter()
        .filter(|&&m| m != SubsetMask::EMPTY)
        .map(|m| m.to_string())
        .collect();
    format!("rank={}; {}", class.rank(), body.join(","))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        Cursor {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> SemilatticeError {
        SemilatticeError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<(), SemilatticeError> {
        if self.bytes[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            Ok(())
        } else {
            Err(self.err(format!("expected `{word}`")))
        }
    }

    fn expect_byte(&mut self, byte: u8) -> Result<(), SemilatticeError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", byte as char)))
        }
    }

    fn parse_u32(&mut self) -> Result<u32, SemilatticeError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number too large"))
    }

    fn parse_member(&mut self) -> Result<SubsetMask, SemilatticeError> {
        self.expect_byte(b'{')?;
        let mut indices = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() == Some(b'}') {
                if indices.is_empty() {
                    self.pos += 1;
                    return Ok(SubsetMask::EMPTY);
                }
                return Err(self.err("expected an index after `,`"));
            }
            let r = self.parse_u32()?;
            if !(1..=32).contains(&r) {
                return Err(self.err(format!("index {r} out of range 1..=32")));
            }
            indices.push(r);
            self.skip_ws();
            match self.peek() {
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(SubsetMask::from_indices(&indices));
                }
                Some(b',') => self.pos += 1,
                _ => return Err(self.err("expected `,` or `}`")),
            }
        }
    }
}

/// A root ±α₁ + Σ a_r σ_r of the extended affine root system, stored as the
/// sign of the α₁ component and the radical coefficient vector a ∈ ℤ^ν.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Root {
    sign: i8,
    coeffs: Vec<i64>,
}

impl Root {
    /// `sign` must be ±1; the anisotropic part of a root is never zero.
    pub fn new(sign: i64, coeffs: Vec<i64>) -> Root {
        assert!(sign == 1 || sign == -1, "root sign must be +1 or -1");
        Root {
            sign: sign as i8,
            coeffs,
        }
    }

    /// The base root α₁ at the given rank.
    pub fn alpha1(rank: u32) -> Root {
        Root::new(1, vec![0; rank as usize])
    }

    /// α₁ + τ_J: the representative root with 0/1 radical part.
    pub fn alpha1_plus_tau(rank: u32, support: SubsetMask) -> Root {
        let mut coeffs = vec![0; rank as usize];
        for r in support.indices() {
            coeffs[r as usize - 1] = 1;
        }
        Root::new(1, coeffs)
    }

    pub fn sign(&self) -> i64 {
        self.sign as i64
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn rank(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn negated(&self) -> Root {
        Root::new(-self.sign(), self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "r[{}1;{}]",
            if self.sign > 0 { "+" } else { "-" },
            body.join(",")
        )
    }
}

/// Decomposition of a valid root ±(α₁) + τ_J + 2λ into its supporting set J
/// and the halved remainder λ.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootParts {
    pub support: SubsetMask,
    pub lambda: Vec<i64>,
}

/// A supporting class together with the tables every group computation
/// needs: the essential support, the lexicographic pair list, and the
/// pairing function δ. Immutable and cheaply shareable.
#[derive(Clone, Debug)]
pub struct SemilatticeContext {
    supp: SupportingClass,
    esupp: Vec<SubsetMask>,
    pairs: Vec<(u32, u32)>,
    delta: Vec<i64>,
    pair_pos: Vec<usize>,
}

impl SemilatticeContext {
    pub fn new(supp: SupportingClass) -> SemilatticeContext {
        let rank = supp.rank();
        let mut esupp: Vec<SubsetMask> = supp
            .members()
            .iter()
            .copied()
            .filter(|m| m.card() >= 3)
            .collect();
        esupp.sort_unstable();
        let mut pairs = Vec::new();
        let mut delta = Vec::new();
        let mut pair_pos = vec![usize::MAX; (rank as usize + 1) * (rank as usize + 1)];
        for r in 1..=rank {
            for s in r + 1..=rank {
                pair_pos[(r * (rank + 1) + s) as usize] = pairs.len();
                pair_pos[(s * (rank + 1) + r) as usize] = pairs.len();
                pairs.push((r, s));
                delta.push(if supp.contains(SubsetMask::pair(r, s)) {
                    1
                } else {
                    2
                });
            }
        }
        SemilatticeContext {
            supp,
            esupp,
            pairs,
            delta,
            pair_pos,
        }
    }

    pub fn rank(&self) -> u32 {
        self.supp.rank()
    }

    pub fn index(&self) -> u32 {
        self.supp.index()
    }

    pub fn supp(&self) -> &SupportingClass {
        &self.supp
    }

    /// Essential support: members of cardinality ≥ 3, ascending bitmask order.
    pub fn esupp(&self) -> &[SubsetMask] {
        &self.esupp
    }

    pub fn esupp_size(&self) -> usize {
        self.esupp.len()
    }

    pub fn contains(&self, member: SubsetMask) -> bool {
        self.supp.contains(member)
    }

    /// All pairs (r, s) with 1 ≤ r < s ≤ ν in lexicographic order. Central
    /// exponent vectors in `weyl` and `hat` are indexed by this list.
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Position of the unordered pair {r, s} in `pairs()`.
    pub fn pair_position(&self, r: u32, s: u32) -> usize {
        assert!(r != s && r >= 1 && s >= 1 && r <= self.rank() && s <= self.rank());
        self.pair_pos[(r * (self.rank() + 1) + s) as usize]
    }

    /// δ(r, s): 1 when {r, s} belongs to the class, 2 otherwise.
    pub fn delta(&self, r: u32, s: u32) -> i64 {
        self.delta[self.pair_position(r, s)]
    }

    /// δ for the pair at a given position in `pairs()`.
    pub fn delta_at(&self, position: usize) -> i64 {
        self.delta[position]
    }

    /// Splits a root into support and halved remainder; `None` when the root
    /// does not belong to the root system of this class (wrong length, or
    /// parity pattern outside the class).
    pub fn root_parts(&self, root: &Root) -> Option<RootParts> {
        if root.rank() != self.rank() {
            return None;
        }
        let mut parity = SubsetMask::EMPTY;
        for (k, &c) in root.coeffs().iter().enumerate() {
            if c & 1 != 0 {
                parity.0 |= 1 << k;
            }
        }
        if !self.contains(parity) {
            return None;
        }
        let lambda = root
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, &c)| (c - ((parity.0 >> k) & 1) as i64) / 2)
            .collect();
        Some(RootParts {
            support: parity,
            lambda,
        })
    }

    pub fn is_valid_root(&self, root: &Root) -> bool {
        self.root_parts(root).is_some()
    }

    /// Whether a radical vector lies in S + S, which only depends on its
    /// parity pattern: v ∈ S + S iff parity(v) = J Δ K for members J, K.
    pub fn is_isotropic(&self, v: &[i64]) -> bool {
        assert_eq!(
            v.len(),
            self.rank() as usize,
            "vector length must equal rank"
        );
        let mut parity = SubsetMask::EMPTY;
        for (k, &c) in v.iter().enumerate() {
            if c & 1 != 0 {
                parity.0 |= 1 << k;
            }
        }
        self.supp
            .members()
            .iter()
            .any(|&j| self.contains(parity.symmetric_difference(j)))
    }
}

/// The standard family of a given index: ∅, the singletons, then
/// {1,2}, {1,3}, {2,3}, {1,2,3}, then remaining subsets of cardinality ≥ 2
/// in ascending bitmask order until index + 1 members are present. Defined
/// for rank ≥ 3 and rank + 4 ≤ index ≤ 2^rank − 1; every class it produces
/// of index ≥ rank + 4 lacks the presentation by conjugation.
pub fn make_family(rank: u32, index: u32) -> Result<SupportingClass, SemilatticeError> {
    if !(3..=MAX_RANK).contains(&rank) {
        return Err(SemilatticeError::RankOutOfRange { rank });
    }
    if index < rank + 4 || index > (1u32 << rank) - 1 {
        return Err(SemilatticeError::IndexOutOfRange { rank, index });
    }
    let mut members = vec![SubsetMask::EMPTY];
    members.extend((1..=rank).map(SubsetMask::singleton));
    members.extend([
        SubsetMask(0b011),
        SubsetMask(0b101),
        SubsetMask(0b110),
        SubsetMask(0b111),
    ]);
    for raw in 0..1u32 << rank {
        if members.len() as u32 == index + 1 {
            break;
        }
        let mask = SubsetMask(raw);
        if mask.card() >= 2 && !members.contains(&mask) {
            members.push(mask);
        }
    }
    SupportingClass::new(rank, members)
}

/// Relabels coordinates: member J goes to { perm[r−1] : r ∈ J }. The slice
/// must be a bijection of {1, …, rank} written in one-line notation.
pub fn permute(class: &SupportingClass, perm: &[u32]) -> Result<SupportingClass, SemilatticeError> {
    let rank = class.rank();
    if perm.len() != rank as usize {
        return Err(SemilatticeError::InvalidPermutation);
    }
    let mut seen = 0u32;
    for &image in perm {
        if !(1..=rank).contains(&image) || seen & (1 << (image - 1)) != 0 {
            return Err(SemilatticeError::InvalidPermutation);
        }
        seen |= 1 << (image - 1);
    }
    let members = class.members().iter().map(|&m| {
        m.indices().into_iter().fold(SubsetMask::EMPTY, |acc, r| {
            SubsetMask(acc.0 | SubsetMask::singleton(perm[r as usize - 1]).0)
        })
    });
    SupportingClass::new(rank, members.collect::<Vec<_>>())
}

/// All permutations of 1..=n in one-line notation. Factorial cost; intended
/// for the small ranks the enumeration sweep handles.
pub(crate) fn permutations(n: u32) -> Vec<Vec<u32>> {
    let mut current: Vec<u32> = (1..=n).collect();
    let mut out = vec![current.clone()];
    let mut stack = vec![0usize; n as usize];
    let mut i = 1;
    while i < n as usize {
        if stack[i] < i {
            if i % 2 == 0 {
                current.swap(0, i);
            } else {
                current.swap(stack[i], i);
            }
            out.push(current.clone());
            stack[i] += 1;
            i = 1;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    out
}

/// The lexicographically least class among all coordinate relabelings,
/// comparing sorted member lists. Two classes are relabelings of each other
/// exactly when their canonical forms coincide. Factorial in the rank.
pub fn canonical_form(class: &SupportingClass) -> SupportingClass {
    let mut best: Option<SupportingClass> = None;
    for perm in permutations(class.rank()) {
        let candidate = permute(class, &perm).expect("generated permutations are bijections");
        if best
            .as_ref()
            .is_none_or(|b| candidate.members() < b.members())
        {
            best = Some(candidate);
        }
    }
    best.expect("at least the identity permutation applies")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn class(rank: u32, extra: &[&[u32]]) -> SupportingClass {
        let members = std::iter::once(SubsetMask::EMPTY)
            .chain((1..=rank).map(SubsetMask::singleton))
            .chain(extra.iter().map(|ix| SubsetMask::from_indices(ix)));
        SupportingClass::new(rank, members.collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn subset_mask_basics() {
        let j = SubsetMask::from_indices(&[3, 1, 2]);
        assert_eq!(j, SubsetMask(0b111));
        assert_eq!(j.indices(), vec![1, 2, 3]);
        assert_eq!(j.card(), 3);
        assert!(j.contains_pair(1, 3));
        assert!(SubsetMask::pair(1, 2).is_subset_of(j));
        assert!(!j.is_subset_of(SubsetMask::pair(1, 2)));
        assert_eq!(j.to_string(), "{1,2,3}");
        assert_eq!(SubsetMask::EMPTY.to_string(), "{}");
        assert_eq!(
            SubsetMask::pair(2, 4).symmetric_difference(SubsetMask::pair(2, 3)),
            SubsetMask::pair(3, 4)
        );
    }

    #[test]
    fn constructor_validates() {
        assert_eq!(
            SupportingClass::new(2, vec![SubsetMask::singleton(1), SubsetMask::singleton(2)]),
            Err(SemilatticeError::MissingEmptySet)
        );
        assert_eq!(
            SupportingClass::new(2, vec![SubsetMask::EMPTY, SubsetMask::singleton(1)]),
            Err(SemilatticeError::MissingSingleton(2))
        );
        assert_eq!(
            SupportingClass::new(0, vec![SubsetMask::EMPTY]),
            Err(SemilatticeError::RankOutOfRange { rank: 0 })
        );
        assert_eq!(
            SupportingClass::new(25, vec![SubsetMask::EMPTY]),
            Err(SemilatticeError::RankOutOfRange { rank: 25 })
        );
        let overflowing = SupportingClass::new(
            2,
            vec![
                SubsetMask::EMPTY,
                SubsetMask::singleton(1),
                SubsetMask::singleton(2),
                SubsetMask::singleton(3),
            ],
        );
        assert_eq!(
            overflowing,
            Err(SemilatticeError::MaskOutOfRange {
                member: SubsetMask::singleton(3),
                rank: 2
            })
        );
        let duplicated = SupportingClass::new(
            1,
            vec![
                SubsetMask::EMPTY,
                SubsetMask::singleton(1),
                SubsetMask::singleton(1),
            ],
        );
        assert_eq!(
            duplicated,
            Err(SemilatticeError::DuplicateMember(SubsetMask::singleton(1)))
        );
    }

    #[test]
    fn parse_minimal_and_extended() {
        let minimal = parse_supp("rank=3; {1},{2},{3}").unwrap();
        assert_eq!(minimal, SupportingClass::minimal(3).unwrap());
        assert_eq!(minimal.index(), 3);

        let extended = parse_supp("rank=3; {1},{2},{3},{1,2}").unwrap();
        assert_eq!(extended, class(3, &[&[1, 2]]));
        assert_eq!(extended.index(), 4);

        let spaced = parse_supp("  rank = 3 ;  { 1 } , {2},{ 3 } , {1 , 2}  ").unwrap();
        assert_eq!(spaced, extended);

        let explicit_empty = parse_supp("rank=2; {},{1},{2}").unwrap();
        assert_eq!(explicit_empty, SupportingClass::minimal(2).unwrap());
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            parse_supp("rank=3 {1},{2},{3}"),
            Err(SemilatticeError::Syntax { .. })
        ));
        assert!(matches!(
            parse_supp("rank=3; {1},{2},{3},"),
            Err(SemilatticeError::Syntax { .. })
        ));
        assert!(matches!(
            parse_supp("rank=3; {1},{2},{3},{2,}"),
            Err(SemilatticeError::Syntax { .. })
        ));
        assert_eq!(
            parse_supp("rank=3; {1},{2}"),
            Err(SemilatticeError::MissingSingleton(3))
        );
        assert_eq!(
            parse_supp("rank=2; {1},{2},{1}"),
            Err(SemilatticeError::DuplicateMember(SubsetMask::singleton(1)))
        );
    }

    #[test]
    fn serialize_round_trip_examples() {
        let c = class(3, &[&[1, 2], &[1, 2, 3]]);
        let text = serialize_supp(&c);
        assert_eq!(text, "rank=3; {1},{2},{3},{1,2},{1,2,3}");
        assert_eq!(parse_supp(&text).unwrap(), c);
    }

    #[test]
    fn json_round_trip() {
        let c = class(3, &[&[1, 2]]);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"rank":3,"supp":[[1],[2],[3],[1,2]]}"#);
        assert_eq!(serde_json::from_str::<SupportingClass>(&json).unwrap(), c);

        let implicit: SupportingClass =
            serde_json::from_str(r#"{"rank":2,"supp":[[1],[2]]}"#).unwrap();
        assert_eq!(implicit, SupportingClass::minimal(2).unwrap());

        let missing = serde_json::from_str::<SupportingClass>(r#"{"rank":2,"supp":[[1]]}"#);
        assert!(missing.is_err());
    }

    #[test]
    fn context_tables() {
        // Rank 3, index 6: every pair except {2,3}, plus the full triple.
        let ctx = SemilatticeContext::new(class(3, &[&[1, 2], &[1, 3], &[1, 2, 3]]));
        assert_eq!(ctx.index(), 6);
        assert_eq!(ctx.esupp(), &[SubsetMask(0b111)]);
        assert_eq!(ctx.delta(1, 2), 1);
        assert_eq!(ctx.delta(1, 3), 1);
        assert_eq!(ctx.delta(2, 3), 2);
        assert_eq!(ctx.delta(3, 2), 2);
        assert_eq!(ctx.pairs(), &[(1, 2), (1, 3), (2, 3)]);
        assert_eq!(ctx.pair_position(3, 1), 1);
    }

    #[test]
    fn root_parts_examples() {
        let lattice = SemilatticeContext::new(SupportingClass::full_lattice(3).unwrap());
        let root = Root::new(1, vec![1, 1, 2]);
        let parts = lattice.root_parts(&root).unwrap();
        assert_eq!(parts.support, SubsetMask::pair(1, 2));
        assert_eq!(parts.lambda, vec![0, 0, 1]);

        let minimal = SemilatticeContext::new(SupportingClass::minimal(2).unwrap());
        assert!(minimal.root_parts(&Root::new(1, vec![1, 1])).is_none());
        assert!(minimal.is_valid_root(&Root::new(-1, vec![3, 0])));
        assert!(!minimal.is_valid_root(&Root::new(1, vec![1])));
    }

    #[test]
    fn isotropic_examples() {
        let minimal2 = SemilatticeContext::new(SupportingClass::minimal(2).unwrap());
        assert!(minimal2.is_isotropic(&[1, 1]));
        assert!(minimal2.is_isotropic(&[2, 0]));

        let with_pair = SemilatticeContext::new(class(3, &[&[1, 2]]));
        assert!(with_pair.is_isotropic(&[0, 1, 1]));
        assert!(with_pair.is_isotropic(&[1, 0, 1]));
    }

    #[test]
    fn family_construction() {
        let f8 = make_family(4, 8).unwrap();
        let expected = class(4, &[&[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]]);
        assert_eq!(f8, expected);

        let full3 = make_family(3, 7).unwrap();
        assert_eq!(full3, SupportingClass::full_lattice(3).unwrap());

        let f9 = make_family(4, 9).unwrap();
        assert!(f9.contains(SubsetMask::pair(1, 4)));
        assert_eq!(f9.index(), 9);

        assert_eq!(
            make_family(4, 15).unwrap(),
            SupportingClass::full_lattice(4).unwrap()
        );
        assert_eq!(
            make_family(4, 7),
            Err(SemilatticeError::IndexOutOfRange { rank: 4, index: 7 })
        );
        assert_eq!(
            make_family(3, 8),
            Err(SemilatticeError::IndexOutOfRange { rank: 3, index: 8 })
        );
        assert_eq!(
            make_family(2, 6),
            Err(SemilatticeError::RankOutOfRange { rank: 2 })
        );
    }

    #[test]
    fn permute_and_canonical() {
        let a = class(3, &[&[1, 3]]);
        let b = class(3, &[&[1, 2]]);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert_eq!(canonical_form(&b), b);

        let swapped = permute(&a, &[1, 3, 2]).unwrap();
        assert_eq!(swapped, b);

        assert_eq!(
            permute(&a, &[1, 1, 2]),
            Err(SemilatticeError::InvalidPermutation)
        );
        assert_eq!(
            permute(&a, &[1, 2]),
            Err(SemilatticeError::InvalidPermutation)
        );
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(1).len(), 1);
        assert_eq!(permutations(4).len(), 24);
        let mut unique = permutations(4);
        unique.sort();
        unique.dedup();
        assert_eq!(unique.len(), 24);
    }

    fn arbitrary_class(max_rank: u32) -> impl Strategy<Value = SupportingClass> {
        (1..=max_rank)
            .prop_flat_map(|rank| {
                let free = (1u32 << rank) as usize;
                (Just(rank), proptest::collection::vec(any::<bool>(), free))
            })
            .prop_map(|(rank, picks)| {
                let members = (0..1u32 << rank)
                    .map(SubsetMask)
                    .filter(|m| m.card() <= 1 || picks[m.0 as usize]);
                SupportingClass::new(rank, members.collect::<Vec<_>>()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn text_round_trip(class in arbitrary_class(6)) {
            let text = serialize_supp(&class);
            prop_assert_eq!(parse_supp(&text).unwrap(), class);
        }

        #[test]
        fn json_round_trip_any(class in arbitrary_class(6)) {
            let json = serde_json::to_string(&class).unwrap();
            prop_assert_eq!(serde_json::from_str::<SupportingClass>(&json).unwrap(), class);
        }

        #[test]
        fn canonical_is_permutation_invariant(class in arbitrary_class(5), seed in any::<u64>()) {
            let perms = permutations(class.rank());
            let perm = &perms[(seed % perms.len() as u64) as usize];
            let relabeled = permute(&class, perm).unwrap();
            prop_assert_eq!(canonical_form(&relabeled), canonical_form(&class));
        }
    }
}
