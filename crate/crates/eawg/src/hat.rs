//! Normal-form arithmetic in the presented group Ŵ.
//!
//! Ŵ is generated by symbols ŵ_α, one per valid root α, subject only to
//!
//! (I)  ŵ_α² = 1
//! (II) ŵ_α ŵ_β ŵ_α = ŵ_{w_α(β)}
//!
//! Every element factors uniquely as
//!
//! ŵ_{α₁}^d · Π_r t̂_{1,r}^{n_r} · Π_{r<s} ẑ_{{r,s}}^{m_{r,s}} · Π_{J} ẑ_J^{ε_J}
//!
//! where t̂_{1,r} = ŵ_{α₁+σ_r}ŵ_{α₁}, the ẑ's are the central elements
//! built from commutators and reflection words, J runs over the essential
//! support (members of cardinality ≥ 3), and ε_J ∈ {0,1} because of the
//! square relation ẑ_J² = Π_{r<s∈J} ẑ_{{r,s}}^{3−δ(r,s)}. The surjection
//! ψ: Ŵ → W sends hatted generators to their unhatted namesakes; its kernel
//! measures exactly the failure of the presentation above to describe W.
//!
//! All operations take the `SemilatticeContext` because the multiplication
//! cocycle and the ε-reduction depend on which pairs and essential sets
//! belong to the supporting class.

use crate::integral;
use crate::semilattice::{Root, SemilatticeContext, SubsetMask};
use crate::weyl::{self, CentralVector, WeylElement};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HatError {
    #[error("element does not match the context's rank and essential support")]
    RankMismatch,
    #[error("root is not valid for this supporting class")]
    InvalidRoot,
    #[error("element is not central (nonzero reflection or translation part)")]
    NotCentral,
    #[error("integer overflow in exponent arithmetic")]
    Overflow,
}

/// Order of a central element of Ŵ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    One,
    Two,
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::One => write!(f, "1"),
            Order::Two => write!(f, "2"),
            Order::Infinite => write!(f, "infinite"),
        }
    }
}

/// Normal form (d, n, m, ε) of an element of Ŵ. The m exponents follow the
/// lexicographic pair order; the ε exponents follow the ascending order of
/// the context's essential support.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HatElement {
    reflect: bool,
    t_exp: Vec<i64>,
    z_pair_exp: Vec<i64>,
    z_ess_exp: Vec<u8>,
}

impl HatElement {
    pub fn new(
        reflect: bool,
        t_exp: Vec<i64>,
        z_pair_exp: Vec<i64>,
        z_ess_exp: Vec<u8>,
    ) -> HatElement {
        assert_eq!(
            z_pair_exp.len(),
            weyl::pair_count(t_exp.len() as u32),
            "pair exponent length must match the rank"
        );
        assert!(
            z_ess_exp.iter().all(|&e| e <= 1),
            "essential exponents are reduced to 0/1"
        );
        HatElement {
            reflect,
            t_exp,
            z_pair_exp,
            z_ess_exp,
        }
    }

    pub fn identity(ctx: &SemilatticeContext) -> HatElement {
        HatElement::new(
            false,
            vec![0; ctx.rank() as usize],
            vec![0; ctx.pair_count()],
            vec![0; ctx.esupp_size()],
        )
    }

    /// ŵ_{α₁}.
    pub fn reflection_gen(ctx: &SemilatticeContext) -> HatElement {
        HatElement {
            reflect: true,
            ..HatElement::identity(ctx)
        }
    }

    /// t̂_{1,r}^k.
    pub fn translation_gen(ctx: &SemilatticeContext, r: u32, k: i64) -> HatElement {
        assert!((1..=ctx.rank()).contains(&r));
        let mut e = HatElement::identity(ctx);
        e.t_exp[r as usize - 1] = k;
        e
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

    pub fn z_pair_exp(&self) -> &[i64] {
        &self.z_pair_exp
    }

    pub fn z_ess_exp(&self) -> &[u8] {
        &self.z_ess_exp
    }

    pub fn is_identity(&self) -> bool {
        !self.reflect
            && self.t_exp.iter().all(|&n| n == 0)
            && self.z_pair_exp.iter().all(|&m| m == 0)
            && self.z_ess_exp.iter().all(|&e| e == 0)
    }

    /// Human-readable normal form; needs the context to name the essential
    /// sets behind the ε exponents.
    pub fn render(&self, ctx: &SemilatticeContext) -> String {
        let body: Vec<String> = self.t_exp.iter().map(|n| n.to_string()).collect();
        let mut out = format!(
            "w^{} * t[{}]",
            if self.reflect { 1 } else { 0 },
            body.join(",")
        );
        for (slot, &(r, s)) in ctx.pairs().iter().enumerate() {
            let m = self.z_pair_exp[slot];
            if m != 0 {
                out.push_str(&format!(" * z{{{r},{s}}}^{m}"));
            }
        }
        for (slot, j) in ctx.esupp().iter().enumerate() {
            if self.z_ess_exp[slot] != 0 {
                out.push_str(&format!(" * Z{j}^1"));
            }
        }
        out
    }
}

fn check_shape(ctx: &SemilatticeContext, a: &HatElement) -> Result<(), HatError> {
    if a.rank() != ctx.rank() || a.z_ess_exp.len() != ctx.esupp_size() {
        return Err(HatError::RankMismatch);
    }
    Ok(())
}

/// Group product a·b in normal form. Translation blocks crossing each other
/// contribute ẑ_{{r,s}}^{−κ(r,s)·a_s·b_r} with κ(r,s) = 3 − δ(r,s); the ε
/// sum is reduced mod 2, converting each excess ẑ_J² into pair exponents
/// 3 − δ(r,s) over the pairs inside J.
pub fn mul(
    ctx: &SemilatticeContext,
    a: &HatElement,
    b: &HatElement,
) -> Result<HatElement, HatError> {
    check_shape(ctx, a)?;
    check_shape(ctx, b)?;
    let left_t: Vec<i64> = if b.reflect {
        a.t_exp.iter().map(|&n| -n).collect()
    } else {
        a.t_exp.clone()
    };
    let mut t_exp = Vec::with_capacity(ctx.rank() as usize);
    for (x, y) in left_t.iter().zip(&b.t_exp) {
        t_exp.push(x.checked_add(*y).ok_or(HatError::Overflow)?);
    }
    let mut z_pair_exp = Vec::with_capacity(ctx.pair_count());
    for (slot, &(r, s)) in ctx.pairs().iter().enumerate() {
        let kappa = 3 - ctx.delta(r, s);
        let swap = left_t[s as usize - 1]
            .checked_mul(b.t_exp[r as usize - 1])
            .and_then(|p| p.checked_mul(-kappa))
            .ok_or(HatError::Overflow)?;
        let m = a.z_pair_exp[slot]
            .checked_add(b.z_pair_exp[slot])
            .and_then(|v| v.checked_add(swap))
            .ok_or(HatError::Overflow)?;
        z_pair_exp.push(m);
    }
    let mut z_ess_exp = Vec::with_capacity(ctx.esupp_size());
    for (slot, j) in ctx.esupp().iter().enumerate() {
        let sum = a.z_ess_exp[slot] + b.z_ess_exp[slot];
        if sum == 2 {
            z_ess_exp.push(0);
            for (pair_slot, &(r, s)) in ctx.pairs().iter().enumerate() {
                if j.contains_pair(r, s) {
                    z_pair_exp[pair_slot] = z_pair_exp[pair_slot]
                        .checked_add(3 - ctx.delta(r, s))
                        .ok_or(HatError::Overflow)?;
                }
            }
        } else {
            z_ess_exp.push(sum);
        }
    }
    Ok(HatElement::new(
        a.reflect ^ b.reflect,
        t_exp,
        z_pair_exp,
        z_ess_exp,
    ))
}

/// Group inverse, computed by folding the reversed factor chain through
/// `mul` so the multiplication law is the single source of truth. The only
/// closed form used is ẑ_J^{−1} = ẑ_J·(ẑ_J²)^{−1}, i.e. ε stays 1 while the
/// pair exponents absorb −(3 − δ) over the pairs of J.
pub fn inv(ctx: &SemilatticeContext, a: &HatElement) -> Result<HatElement, HatError> {
    check_shape(ctx, a)?;
    let mut z_pair_exp = Vec::with_capacity(ctx.pair_count());
    for (slot, &(r, s)) in ctx.pairs().iter().enumerate() {
        let mut m = a.z_pair_exp[slot].checked_neg().ok_or(HatError::Overflow)?;
        for (ess_slot, j) in ctx.esupp().iter().enumerate() {
            if a.z_ess_exp[ess_slot] == 1 && j.contains_pair(r, s) {
                m = m
                    .checked_sub(3 - ctx.delta(r, s))
                    .ok_or(HatError::Overflow)?;
            }
        }
        z_pair_exp.push(m);
    }
    let mut acc = HatElement::new(
        false,
        vec![0; ctx.rank() as usize],
        z_pair_exp,
        a.z_ess_exp.clone(),
    );
    for r in (1..=ctx.rank()).rev() {
        let k = a.t_exp[r as usize - 1];
        if k != 0 {
            let gen =
                HatElement::translation_gen(ctx, r, k.checked_neg().ok_or(HatError::Overflow)?);
            acc = mul(ctx, &acc, &gen)?;
        }
    }
    if a.reflect {
        acc = mul(ctx, &acc, &HatElement::reflection_gen(ctx))?;
    }
    Ok(acc)
}

/// The central element ẑ_X in normal form: the ε unit for X in the
/// essential support, the m unit for any pair (the pair generators exist
/// whether or not the pair belongs to the class), identity otherwise.
pub fn z_gen(ctx: &SemilatticeContext, x: SubsetMask) -> HatElement {
    let mut e = HatElement::identity(ctx);
    if x.card() == 2 {
        let ix = x.indices();
        e.z_pair_exp[ctx.pair_position(ix[0], ix[1])] = 1;
    } else if let Ok(slot) = ctx.esupp().binary_search(&x) {
        e.z_ess_exp[slot] = 1;
    }
    e
}

/// T̂(v) = Π_r t̂_{1,r}^{v_r} folded in ascending order (which is exactly the
/// normal-form order, so no cocycle appears).
fn translation_block(ctx: &SemilatticeContext, v: &[i64]) -> HatElement {
    HatElement::new(
        false,
        v.to_vec(),
        vec![0; ctx.pair_count()],
        vec![0; ctx.esupp_size()],
    )
}

/// Normal form of the generator ŵ_α, computed by folding the defining word:
/// ŵ_{α₁+τ_J} = ŵ_{α₁}·ẑ_J·T̂(1_J)^{−1}, conjugated by T̂(λ) for the
/// translation part of α, with ŵ_{−α} = ŵ_α.
pub fn generator(ctx: &SemilatticeContext, root: &Root) -> Result<HatElement, HatError> {
    let positive = if root.sign() < 0 {
        root.negated()
    } else {
        root.clone()
    };
    let parts = ctx.root_parts(&positive).ok_or(HatError::InvalidRoot)?;
    let mut indicator = vec![0i64; ctx.rank() as usize];
    for r in parts.support.indices() {
        indicator[r as usize - 1] = 1;
    }
    let base = mul(
        ctx,
        &mul(
            ctx,
            &HatElement::reflection_gen(ctx),
            &z_gen(ctx, parts.support),
        )?,
        &inv(ctx, &translation_block(ctx, &indicator))?,
    )?;
    let shift = translation_block(ctx, &parts.lambda);
    mul(ctx, &mul(ctx, &shift, &base)?, &inv(ctx, &shift)?)
}

/// The canonical surjection ψ: Ŵ → W. The reflection and translation parts
/// map through unchanged; ẑ_{{r,s}} ↦ c_{r,s}^{δ(r,s)} and ẑ_J ↦ Π_{r<s∈J}
/// c_{r,s}.
pub fn psi(ctx: &SemilatticeContext, a: &HatElement) -> Result<WeylElement, HatError> {
    check_shape(ctx, a)?;
    let mut c = Vec::with_capacity(ctx.pair_count());
    for (slot, &(r, s)) in ctx.pairs().iter().enumerate() {
        let mut exp = a.z_pair_exp[slot]
            .checked_mul(ctx.delta(r, s))
            .ok_or(HatError::Overflow)?;
        for (ess_slot, j) in ctx.esupp().iter().enumerate() {
            if a.z_ess_exp[ess_slot] == 1 && j.contains_pair(r, s) {
                exp = exp.checked_add(1).ok_or(HatError::Overflow)?;
            }
        }
        c.push(exp);
    }
    Ok(WeylElement::new(
        a.reflect,
        a.t_exp.clone(),
        CentralVector::from_exponents(c),
    ))
}

/// One kernel element per GF(2) nullspace basis vector of the integral
/// system: ε̃ is the basis vector and m_{r,s} = −(1/δ(r,s))·Σ_{J ⊇ {r,s}}
/// ε_J, which is integral exactly because ε̃ solves the parity system.
/// Every returned element satisfies ψ(û) = 1 and û² = 1, and together they
/// generate ker(ψ) ≅ (ℤ/2)^{n₀}.
pub fn kernel_basis(ctx: &SemilatticeContext) -> Vec<HatElement> {
    let nullspace = integral::nullspace(&integral::build_system(ctx));
    let mut basis = Vec::with_capacity(nullspace.n0);
    for eps in &nullspace.basis {
        let z_ess_exp: Vec<u8> = ctx.esupp().iter().map(|j| eps[j]).collect();
        let mut z_pair_exp = Vec::with_capacity(ctx.pair_count());
        for &(r, s) in ctx.pairs() {
            let sum: i64 = ctx
                .esupp()
                .iter()
                .filter(|j| j.contains_pair(r, s))
                .map(|j| i64::from(eps[j]))
                .sum();
            debug_assert_eq!(sum % ctx.delta(r, s), 0);
            z_pair_exp.push(-(sum / ctx.delta(r, s)));
        }
        basis.push(HatElement::new(
            false,
            vec![0; ctx.rank() as usize],
            z_pair_exp,
            z_ess_exp,
        ));
    }
    basis
}

/// Order of a central element: 1 for the identity, 2 for a non-identity
/// kernel element, infinite when the ψ-image is a nontrivial element of the
/// free abelian central subgroup of W.
pub fn order(ctx: &SemilatticeContext, a: &HatElement) -> Result<Order, HatError> {
    check_shape(ctx, a)?;
    if a.reflect || a.t_exp.iter().any(|&n| n != 0) {
        return Err(HatError::NotCentral);
    }
    if a.is_identity() {
        return Ok(Order::One);
    }
    if psi(ctx, a)?.is_identity() {
        Ok(Order::Two)
    } else {
        Ok(Order::Infinite)
    }
}
