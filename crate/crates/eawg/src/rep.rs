//! Faithful integer matrix representation on the hyperbolic extension.
//!
//! The root space V = ℝα₁ ⊕ Σℝσ_r extends to Ṽ of dimension 1 + 2ν with
//! ordered basis (α₁, σ₁, …, σ_ν, λ₁, …, λ_ν) and symmetric form
//! (α₁, α₁) = 2, (σ_r, λ_s) = δ_rs, all other basis pairings 0. On Ṽ the
//! form is nondegenerate, reflections and translations become integer
//! matrices, and W embeds faithfully. This module is the ground-truth side
//! of every cross-check: any claimed identity in `weyl` or `hat` must hold
//! here as exact matrix equality.
//!
//! Conventions: vectors are coordinate columns; a matrix acts on the left;
//! `compose(a, b)` is the product a·b, i.e. the operator applying b first,
//! matching left-to-right group words. All arithmetic is checked and
//! overflow is an error, never a wrapped value.

use crate::semilattice::{Root, SemilatticeContext, SubsetMask};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("integer overflow in matrix arithmetic")]
    Overflow,
    #[error("translation direction must lie in the radical span of the σ basis")]
    NotRadical,
    #[error("root is not valid for this supporting class")]
    InvalidRoot,
}

/// A vector of Ṽ in coordinates (α₁; σ₁, …, σ_ν; λ₁, …, λ_ν).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TildeVector {
    coords: Vec<i64>,
}

impl TildeVector {
    /// Builds from raw coordinates; the length must be odd (1 + 2ν).
    pub fn new(coords: Vec<i64>) -> TildeVector {
        assert!(
            coords.len() % 2 == 1,
            "hyperbolic extension has odd dimension"
        );
        TildeVector { coords }
    }

    pub fn zero(rank: u32) -> TildeVector {
        TildeVector::new(vec![0; 1 + 2 * rank as usize])
    }

    pub fn alpha1(rank: u32) -> TildeVector {
        let mut v = TildeVector::zero(rank);
        v.coords[0] = 1;
        v
    }

    /// σ_r scaled by `scale`; r is 1-based.
    pub fn sigma(rank: u32, r: u32, scale: i64) -> TildeVector {
        assert!((1..=rank).contains(&r));
        let mut v = TildeVector::zero(rank);
        v.coords[r as usize] = scale;
        v
    }

    /// λ_r scaled by `scale`; r is 1-based.
    pub fn lambda(rank: u32, r: u32, scale: i64) -> TildeVector {
        assert!((1..=rank).contains(&r));
        let mut v = TildeVector::zero(rank);
        v.coords[rank as usize + r as usize] = scale;
        v
    }

    /// Embeds a root ±α₁ + Σ a_r σ_r with zero λ part.
    pub fn from_root(root: &Root) -> TildeVector {
        let mut coords = Vec::with_capacity(1 + 2 * root.rank() as usize);
        coords.push(root.sign());
        coords.extend_from_slice(root.coeffs());
        coords.resize(1 + 2 * root.rank() as usize, 0);
        TildeVector::new(coords)
    }

    /// A radical vector Σ v_r σ_r.
    pub fn from_radical(v: &[i64]) -> TildeVector {
        let mut coords = vec![0; 1 + 2 * v.len()];
        coords[1..=v.len()].copy_from_slice(v);
        TildeVector::new(coords)
    }

    pub fn rank(&self) -> u32 {
        (self.coords.len() as u32 - 1) / 2
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    fn is_radical(&self) -> bool {
        let nu = self.rank() as usize;
        self.coords[0] == 0 && self.coords[nu + 1..].iter().all(|&c| c == 0)
    }
}

fn narrow(value: i128) -> Result<i64, RepError> {
    i64::try_from(value).map_err(|_| RepError::Overflow)
}

fn wide_form(u: &[i64], v: &[i64]) -> Result<i128, RepError> {
    if u.len() != v.len() {
        return Err(RepError::DimensionMismatch(u.len(), v.len()));
    }
    let nu = (u.len() - 1) / 2;
    let mut acc = (u[0] as i128 * v[0] as i128)
        .checked_mul(2)
        .ok_or(RepError::Overflow)?;
    for r in 1..=nu {
        acc = acc
            .checked_add(u[r] as i128 * v[nu + r] as i128)
            .and_then(|a| a.checked_add(u[nu + r] as i128 * v[r] as i128))
            .ok_or(RepError::Overflow)?;
    }
    Ok(acc)
}

/// The hyperbolic form on Ṽ: (u, v) = 2u₀v₀ + Σ (u_{σr} v_{λr} + u_{λr} v_{σr}).
pub fn form(u: &TildeVector, v: &TildeVector) -> Result<i64, RepError> {
    narrow(wide_form(u.coords(), v.coords())?)
}

/// The Gram matrix of the form in the standard basis.
pub fn gram_matrix(rank: u32) -> RepMatrix {
    let nu = rank as usize;
    let mut g = RepMatrix::zero(rank);
    g.set(0, 0, 2);
    for r in 1..=nu {
        g.set(r, nu + r, 1);
        g.set(nu + r, r, 1);
    }
    g
}

/// A square integer matrix acting on Ṽ, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RepMatrix {
    size: usize,
    entries: Vec<i64>,
}

impl RepMatrix {
    fn zero(rank: u32) -> RepMatrix {
        let size = 1 + 2 * rank as usize;
        RepMatrix {
            size,
            entries: vec![0; size * size],
        }
    }

    pub fn identity(rank: u32) -> RepMatrix {
        let mut m = RepMatrix::zero(rank);
        for i in 0..m.size {
            m.set(i, i, 1);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> u32 {
        (self.size as u32 - 1) / 2
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.size + col]
    }

    fn set(&mut self, row: usize, col: usize, value: i64) {
        self.entries[row * self.size + col] = value;
    }

    pub fn is_identity(&self) -> bool {
        self == &RepMatrix::identity(self.rank())
    }

    /// Matrix product self·other; the right factor is applied first.
    pub fn compose(&self, other: &RepMatrix) -> Result<RepMatrix, RepError> {
        if self.size != other.size {
            return Err(RepError::DimensionMismatch(self.size, other.size));
        }
        let n = self.size;
        let mut out = RepMatrix {
            size: n,
            entries: vec![0; n * n],
        };
        for i in 0..n {
            for j in 0..n {
                let mut acc: i128 = 0;
                for k in 0..n {
                    acc = acc
                        .checked_add(self.entry(i, k) as i128 * other.entry(k, j) as i128)
                        .ok_or(RepError::Overflow)?;
                }
                out.set(i, j, narrow(acc)?);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &TildeVector) -> Result<TildeVector, RepError> {
        if self.size != v.coords.len() {
            return Err(RepError::DimensionMismatch(self.size, v.coords.len()));
        }
        let mut out = vec![0i64; self.size];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc: i128 = 0;
            for k in 0..self.size {
                acc = acc
                    .checked_add(self.entry(i, k) as i128 * v.coords[k] as i128)
                    .ok_or(RepError::Overflow)?;
            }
            *slot = narrow(acc)?;
        }
        Ok(TildeVector::new(out))
    }

    /// Whether MᵀGM = G, i.e. the matrix is an isometry of the form.
    pub fn preserves_form(&self) -> bool {
        let g = gram_matrix(self.rank());
        let mut t = RepMatrix {
            size: self.size,
            entries: vec![0; self.size * self.size],
        };
        for i in 0..self.size {
            for j in 0..self.size {
                t.set(i, j, self.entry(j, i));
            }
        }
        match t.compose(&g).and_then(|tg| tg.compose(self)) {
            Ok(product) => product == g,
            Err(_) => false,
        }
    }

    /// Whether every σ_r is fixed, as required of elements of W.
    pub fn fixes_radical_basis(&self) -> bool {
        let nu = self.rank();
        (1..=nu).all(|r| {
            let sigma = TildeVector::sigma(nu, r, 1);
            self.apply(&sigma).map(|img| img == sigma).unwrap_or(false)
        })
    }
}

/// The reflection w_α(u) = u − (u, α)α for a valid root α of the class.
/// Fixes every σ_r and preserves the form.
pub fn reflection(ctx: &SemilatticeContext, root: &Root) -> Result<RepMatrix, RepError> {
    if !ctx.is_valid_root(root) {
        return Err(RepError::InvalidRoot);
    }
    let alpha = TildeVector::from_root(root);
    basis_images(ctx.rank(), |basis| {
        let pairing = wide_form(basis, alpha.coords())?;
        basis
            .iter()
            .zip(alpha.coords())
            .map(|(&b, &a)| {
                pairing
                    .checked_mul(a as i128)
                    .and_then(|p| (b as i128).checked_sub(p))
                    .ok_or(RepError::Overflow)
            })
            .collect()
    })
}

/// The translation T_α^σ(u) = u − (σ, u)α + (α, u)σ − ((α,α)/2)(σ, u)σ for a
/// radical direction σ. For α = α₁ this is t-type, for α = σ_r it is c-type.
pub fn translation(alpha: &TildeVector, sigma: &TildeVector) -> Result<RepMatrix, RepError> {
    if alpha.coords.len() != sigma.coords.len() {
        return Err(RepError::DimensionMismatch(
            alpha.coords.len(),
            sigma.coords.len(),
        ));
    }
    if !sigma.is_radical() {
        return Err(RepError::NotRadical);
    }
    let half_norm = wide_form(alpha.coords(), alpha.coords())? / 2;
    basis_images(alpha.rank(), |basis| {
        let s = wide_form(sigma.coords(), basis)?;
        let a = wide_form(alpha.coords(), basis)?;
        let scale = a
            .checked_sub(half_norm.checked_mul(s).ok_or(RepError::Overflow)?)
            .ok_or(RepError::Overflow)?;
        basis
            .iter()
            .enumerate()
            .map(|(k, &b)| {
                let shift = scale
                    .checked_mul(sigma.coords[k] as i128)
                    .ok_or(RepError::Overflow)?;
                s.checked_mul(alpha.coords[k] as i128)
                    .and_then(|sa| (b as i128).checked_sub(sa))
                    .and_then(|d| d.checked_add(shift))
                    .ok_or(RepError::Overflow)
            })
            .collect()
    })
}

/// t_{1,r}^k = T_{α₁}^{kσ_r} as a matrix.
pub fn t_matrix(rank: u32, r: u32, k: i64) -> Result<RepMatrix, RepError> {
    translation(&TildeVector::alpha1(rank), &TildeVector::sigma(rank, r, k))
}

/// c_{r,s}^k = T_{σ_r}^{kσ_s} as a matrix, r < s.
pub fn c_matrix(rank: u32, r: u32, s: u32, k: i64) -> Result<RepMatrix, RepError> {
    assert!(r < s, "central generators are indexed by ordered pairs");
    translation(
        &TildeVector::sigma(rank, r, 1),
        &TildeVector::sigma(rank, s, k),
    )
}

/// The central element z_J: the product Π_{r<s ∈ J} c_{r,s} when J belongs
/// to the class, c_{r,s}² when J is a pair outside it, identity otherwise.
pub fn z_matrix(ctx: &SemilatticeContext, j: SubsetMask) -> RepMatrix {
    let nu = ctx.rank();
    assert!(j.fits_rank(nu), "member does not fit the rank");
    if ctx.contains(j) {
        let indices = j.indices();
        let mut acc = RepMatrix::identity(nu);
        for (a, &r) in indices.iter().enumerate() {
            for &s in &indices[a + 1..] {
                let c = c_matrix(nu, r, s, 1).expect("unit exponents stay small");
                acc = acc.compose(&c).expect("central products stay small");
            }
        }
        acc
    } else if j.card() == 2 {
        let ix = j.indices();
        c_matrix(nu, ix[0], ix[1], 2).expect("exponent two stays small")
    } else {
        RepMatrix::identity(nu)
    }
}

/// Matrix of a left-to-right word of reflections.
pub fn word_matrix(ctx: &SemilatticeContext, word: &[Root]) -> Result<RepMatrix, RepError> {
    let mut acc = RepMatrix::identity(ctx.rank());
    for root in word {
        acc = acc.compose(&reflection(ctx, root)?)?;
    }
    Ok(acc)
}

fn basis_images(
    rank: u32,
    image: impl Fn(&[i64]) -> Result<Vec<i128>, RepError>,
) -> Result<RepMatrix, RepError> {
    let size = 1 + 2 * rank as usize;
    let mut m = RepMatrix::zero(rank);
    let mut basis = vec![0i64; size];
    for col in 0..size {
        basis[col] = 1;
        let img = image(&basis)?;
        basis[col] = 0;
        for (row, &value) in img.iter().enumerate() {
            m.set(row, col, narrow(value)?);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilattice::SupportingClass;

    fn lattice(rank: u32) -> SemilatticeContext {
        SemilatticeContext::new(SupportingClass::full_lattice(rank).unwrap())
    }

    fn t(rank: u32, r: u32, k: i64) -> RepMatrix {
        t_matrix(rank, r, k).unwrap()
    }

    fn c(rank: u32, r: u32, s: u32, k: i64) -> RepMatrix {
        c_matrix(rank, r, s, k).unwrap()
    }

    #[test]
    fn form_and_gram_agree() {
        let u = TildeVector::new(vec![1, 2, -1, 0, 3]);
        let v = TildeVector::new(vec![-2, 0, 1, 5, 1]);
        assert_eq!(form(&u, &v).unwrap(), 8);
        let g = gram_matrix(2);
        let gv = g.apply(&v).unwrap();
        let via_gram: i64 = u
            .coords()
            .iter()
            .zip(gv.coords())
            .map(|(&a, &b)| a * b)
            .sum();
        assert_eq!(form(&u, &v).unwrap(), via_gram);
        assert_eq!(
            form(&TildeVector::alpha1(2), &TildeVector::alpha1(2)).unwrap(),
            2
        );
        assert_eq!(
            form(&TildeVector::sigma(2, 1, 1), &TildeVector::lambda(2, 1, 1)).unwrap(),
            1
        );
        assert_eq!(
            form(&TildeVector::sigma(2, 1, 1), &TildeVector::lambda(2, 2, 1)).unwrap(),
            0
        );
    }

    #[test]
    fn base_reflection_matrix() {
        let ctx = lattice(2);
        let w = reflection(&ctx, &Root::alpha1(2)).unwrap();
        let a = w.apply(&TildeVector::alpha1(2)).unwrap();
        assert_eq!(a.coords(), &[-1, 0, 0, 0, 0]);
        for r in 1..=2 {
            let s = TildeVector::sigma(2, r, 1);
            assert_eq!(w.apply(&s).unwrap(), s);
            let l = TildeVector::lambda(2, r, 1);
            assert_eq!(w.apply(&l).unwrap(), l);
        }
        assert!(w.compose(&w).unwrap().is_identity());
        assert!(w.preserves_form());
        assert!(w.fixes_radical_basis());
    }

    #[test]
    fn shifted_reflection_matrix() {
        let ctx = lattice(2);
        let root = Root::new(1, vec![1, 0]);
        let w = reflection(&ctx, &root).unwrap();
        // α₁ ↦ −α₁ − 2σ₁, λ₁ ↦ λ₁ − α₁ − σ₁, λ₂ untouched.
        assert_eq!(
            w.apply(&TildeVector::alpha1(2)).unwrap().coords(),
            &[-1, -2, 0, 0, 0]
        );
        assert_eq!(
            w.apply(&TildeVector::lambda(2, 1, 1)).unwrap().coords(),
            &[-1, -1, 0, 1, 0]
        );
        assert_eq!(
            w.apply(&TildeVector::lambda(2, 2, 1)).unwrap(),
            TildeVector::lambda(2, 2, 1)
        );
        assert!(w.compose(&w).unwrap().is_identity());
        assert!(w.preserves_form());

        // Reflections in α and −α coincide.
        let w_neg = reflection(&ctx, &root.negated()).unwrap();
        assert_eq!(w, w_neg);
    }

    #[test]
    fn invalid_roots_are_rejected() {
        let minimal = SemilatticeContext::new(SupportingClass::minimal(2).unwrap());
        assert_eq!(
            reflection(&minimal, &Root::new(1, vec![1, 1])),
            Err(RepError::InvalidRoot)
        );
        assert_eq!(
            reflection(&minimal, &Root::new(1, vec![1])),
            Err(RepError::InvalidRoot)
        );
    }

    #[test]
    fn translation_matrices() {
        let t1 = t(2, 1, 1);
        assert_eq!(
            t1.apply(&TildeVector::alpha1(2)).unwrap().coords(),
            &[1, 2, 0, 0, 0]
        );
        assert_eq!(
            t1.apply(&TildeVector::lambda(2, 1, 1)).unwrap().coords(),
            &[-1, -1, 0, 1, 0]
        );
        assert!(t1.preserves_form());
        assert!(t1.fixes_radical_basis());

        let c12 = c(2, 1, 2, 1);
        assert_eq!(
            c12.apply(&TildeVector::lambda(2, 1, 1)).unwrap().coords(),
            &[0, 0, 1, 1, 0]
        );
        assert_eq!(
            c12.apply(&TildeVector::lambda(2, 2, 1)).unwrap().coords(),
            &[0, -1, 0, 0, 1]
        );
        assert!(c12.preserves_form());

        // Powers of a translation rescale the direction: t² = t_{k=2}, and
        // the λ column picks up the quadratic σ coefficient.
        let t3 = t(2, 1, 3);
        assert_eq!(t1.compose(&t1).unwrap().compose(&t1).unwrap(), t3);
        assert_eq!(
            t3.apply(&TildeVector::lambda(2, 1, 1)).unwrap().coords(),
            &[-3, -9, 0, 1, 0]
        );
        assert!(c12.compose(&c(2, 1, 2, -1)).unwrap().is_identity());
        assert!(t1.compose(&t(2, 1, -1)).unwrap().is_identity());
    }

    #[test]
    fn non_radical_direction_is_rejected() {
        let bad = TildeVector::lambda(2, 1, 1);
        assert_eq!(
            translation(&TildeVector::alpha1(2), &bad),
            Err(RepError::NotRadical)
        );
        let mixed = TildeVector::new(vec![1, 1, 0, 0, 0]);
        assert_eq!(
            translation(&TildeVector::alpha1(2), &mixed),
            Err(RepError::NotRadical)
        );
    }

    #[test]
    fn central_generators_commute() {
        let rank = 3;
        let pairs = [(1, 2), (1, 3), (2, 3)];
        for &(r1, s1) in &pairs {
            for &(r2, s2) in &pairs {
                let a = c(rank, r1, s1, 1);
                let b = c(rank, r2, s2, 1);
                assert_eq!(a.compose(&b).unwrap(), b.compose(&a).unwrap());
            }
        }
    }

    #[test]
    fn commutator_of_t_generators_is_c_squared() {
        let comm = t(2, 1, -1)
            .compose(&t(2, 2, -1))
            .unwrap()
            .compose(&t(2, 1, 1))
            .unwrap()
            .compose(&t(2, 2, 1))
            .unwrap();
        assert_eq!(comm, c(2, 1, 2, 2));
    }

    #[test]
    fn z_matrix_cases() {
        let ctx = lattice(3);
        let z = z_matrix(&ctx, SubsetMask(0b111));
        let expected = c(3, 1, 2, 1)
            .compose(&c(3, 1, 3, 1))
            .unwrap()
            .compose(&c(3, 2, 3, 1))
            .unwrap();
        assert_eq!(z, expected);

        let minimal = SemilatticeContext::new(SupportingClass::minimal(3).unwrap());
        assert_eq!(z_matrix(&minimal, SubsetMask(0b011)), c(3, 1, 2, 2));
        assert!(z_matrix(&minimal, SubsetMask(0b111)).is_identity());
        assert!(z_matrix(&ctx, SubsetMask::singleton(2)).is_identity());
        assert!(z_matrix(&ctx, SubsetMask::EMPTY).is_identity());
    }

    #[test]
    fn conjugation_word_for_z() {
        // z_J = w_{α₁} w_{α₁+τ_J} Π_{r∈J} t_{1,r} with t_{1,r} = w_{α₁+σ_r} w_{α₁}.
        let ctx = lattice(3);
        let j = SubsetMask(0b111);
        let mut word = vec![Root::alpha1(3), Root::alpha1_plus_tau(3, j)];
        for r in j.indices() {
            word.push(Root::alpha1_plus_tau(3, SubsetMask::singleton(r)));
            word.push(Root::alpha1(3));
        }
        assert_eq!(word_matrix(&ctx, &word).unwrap(), z_matrix(&ctx, j));
    }

    #[test]
    fn overflow_is_reported() {
        // The λ_r column of t_{1,r}^k carries k², so huge exponents already
        // overflow at construction time.
        assert_eq!(t_matrix(2, 1, 1 << 40), Err(RepError::Overflow));

        // Moderate exponents construct but blow up under composition.
        let big = t_matrix(2, 1, 1 << 31).unwrap();
        let mut result = Ok(big.clone());
        for _ in 0..2 {
            result = result.and_then(|m| m.compose(&big));
        }
        assert_eq!(result.err(), Some(RepError::Overflow));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = RepMatrix::identity(2);
        let b = RepMatrix::identity(3);
        assert_eq!(a.compose(&b), Err(RepError::DimensionMismatch(5, 7)));
        assert!(matches!(
            a.apply(&TildeVector::zero(3)),
            Err(RepError::DimensionMismatch(5, 7))
        ));
    }
}
