//! The decision engine: does W admit the presentation by conjugation?
//!
//! The verdict is controlled by a single number — n₀, the GF(2) nullity of
//! the integral-collection system — because ψ: Ŵ → W is an isomorphism
//! exactly when its kernel (of order 2^{n₀}) is trivial. The report bundles
//! the verdict with the explicit kernel basis, a witness showing which
//! reflection generator becomes redundant when the presentation fails, and
//! consistency checks against the closed-form classification results that
//! apply to the given class.

use crate::hat;
use crate::integral;
use crate::semilattice::{SemilatticeContext, SubsetMask};
use crate::weyl;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error("supporting classes are not nested (same rank, members ⊆ members required)")]
    NotNested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    HasPresentation,
    LacksPresentation,
}

/// One kernel generator û(m̃, ε̃): the essential sets carrying ε = 1 and the
/// full pair-exponent vector m̃ in lexicographic pair order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelBasisEntry {
    pub eps: Vec<SubsetMask>,
    pub m: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionTerm {
    pub generator: SubsetMask,
    pub coefficient: i64,
}

/// When the presentation fails, some essential set J₀ carries ε = 1 in a
/// kernel element, and z_{J₀} decomposes over the remaining central
/// generators — so the reflection in α₁ + τ_{J₀} is redundant and the
/// natural generating set is not minimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub j0: SubsetMask,
    pub decomposition: Vec<DecompositionTerm>,
}

/// One closed-form classification check whose hypothesis the class
/// satisfies, with the predicted outcome and whether the computation agrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorollaryCheck {
    pub name: String,
    pub predicted: String,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecisionReport {
    pub rank: u32,
    pub index: u32,
    pub esupp_size: usize,
    pub n0: usize,
    pub verdict: Verdict,
    pub kernel_basis: Vec<KernelBasisEntry>,
    pub witnesses: Option<Witness>,
    pub corollary_notes: Vec<CorollaryCheck>,
}

/// Decide the presentation question for one supporting class.
pub fn decide(ctx: &SemilatticeContext) -> DecisionReport {
    let basis = hat::kernel_basis(ctx);
    let n0 = basis.len();
    let verdict = if n0 == 0 {
        Verdict::HasPresentation
    } else {
        Verdict::LacksPresentation
    };
    let kernel_basis: Vec<KernelBasisEntry> = basis
        .iter()
        .map(|u| KernelBasisEntry {
            eps: ctx
                .esupp()
                .iter()
                .zip(u.z_ess_exp())
                .filter(|&(_, &e)| e == 1)
                .map(|(&j, _)| j)
                .collect(),
            m: u.z_pair_exp().to_vec(),
        })
        .collect();
    let witnesses = kernel_basis.first().map(|entry| {
        let j0 = entry.eps[0];
        let generators: Vec<SubsetMask> = weyl::z_generators(ctx)
            .into_iter()
            .filter(|&x| x != j0)
            .collect();
        let decomposition =
            weyl::central_decompose_over(ctx, &weyl::z_exponents(ctx, j0), &generators)
                .expect("a kernel element always makes its first ε-carrying generator redundant")
                .into_iter()
                .map(|(generator, coefficient)| DecompositionTerm {
                    generator,
                    coefficient,
                })
                .collect();
        Witness { j0, decomposition }
    });
    DecisionReport {
        rank: ctx.rank(),
        index: ctx.index(),
        esupp_size: ctx.esupp_size(),
        n0,
        verdict,
        kernel_basis,
        witnesses,
        corollary_notes: corollary_checks(ctx, n0),
    }
}

/// Re-evaluate the closed-form checks against an existing report.
pub fn check_corollaries(ctx: &SemilatticeContext, report: &DecisionReport) -> Vec<CorollaryCheck> {
    corollary_checks(ctx, report.n0)
}

fn corollary_checks(ctx: &SemilatticeContext, n0: usize) -> Vec<CorollaryCheck> {
    let rank = ctx.rank();
    let index = ctx.index();
    let esupp_size = ctx.esupp_size();
    let all_pairs_present = ctx.pairs().iter().all(|&(r, s)| ctx.delta(r, s) == 1);
    let full_index = (1u32 << rank) - 1;
    let mut notes = Vec::new();

    if index <= rank + 3 {
        notes.push(CorollaryCheck {
            name: "small-index".into(),
            predicted: "HasPresentation".into(),
            consistent: n0 == 0,
        });
    }
    if rank <= 3 {
        let has = index != 7;
        notes.push(CorollaryCheck {
            name: "low-rank-classification".into(),
            predicted: if has {
                "HasPresentation".into()
            } else {
                "LacksPresentation".into()
            },
            consistent: (n0 == 0) == has,
        });
    }
    if esupp_size == 0 {
        notes.push(CorollaryCheck {
            name: "no-essential-sets".into(),
            predicted: "HasPresentation".into(),
            consistent: n0 == 0,
        });
    }
    if all_pairs_present {
        notes.push(CorollaryCheck {
            name: "all-pairs-present".into(),
            predicted: format!("n0 = {esupp_size}"),
            consistent: n0 == esupp_size,
        });
    }
    if index == full_index {
        let rank_u = rank as usize;
        let expected = (1usize << rank) - 1 - rank_u - rank_u * (rank_u - 1) / 2;
        notes.push(CorollaryCheck {
            name: "full-lattice".into(),
            predicted: format!("n0 = {expected}"),
            consistent: n0 == expected,
        });
    }
    if ctx
        .esupp()
        .iter()
        .any(|j| pairs_of(j).all(|(r, s)| ctx.delta(r, s) == 1))
    {
        notes.push(CorollaryCheck {
            name: "covered-essential-set".into(),
            predicted: "LacksPresentation".into(),
            consistent: n0 > 0,
        });
    }
    if rank > 3 && index == full_index - 1 {
        notes.push(CorollaryCheck {
            name: "near-full-index".into(),
            predicted: "LacksPresentation".into(),
            consistent: n0 > 0,
        });
    }
    notes
}

fn pairs_of(j: &SubsetMask) -> impl Iterator<Item = (u32, u32)> {
    let ix = j.indices();
    (0..ix.len()).flat_map(move |a| {
        let ix = ix.clone();
        (a + 1..ix.len()).map(move |b| (ix[a], ix[b]))
    })
}

/// Containment check for the nesting theorem: enlarging a supporting class
/// (same rank, same span) can only destroy the presentation, never restore
/// it. Returns false exactly on a violation — the larger class having the
/// presentation while the smaller one lacks it.
pub fn check_monotonicity(
    small: &SemilatticeContext,
    big: &SemilatticeContext,
) -> Result<bool, DecideError> {
    if small.rank() != big.rank() || !small.supp().members().iter().all(|j| big.contains(*j)) {
        return Err(DecideError::NotNested);
    }
    let n0_small = integral::nullspace(&integral::build_system(small)).n0;
    let n0_big = integral::nullspace(&integral::build_system(big)).n0;
    Ok(!(n0_big == 0 && n0_small > 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilattice::{make_family, parse_supp, SupportingClass};
    use crate::weyl::CentralVector;

    fn lattice(rank: u32) -> SemilatticeContext {
        SemilatticeContext::new(SupportingClass::full_lattice(rank).unwrap())
    }

    fn index6() -> SemilatticeContext {
        SemilatticeContext::new(parse_supp("rank=3; {1},{2},{3},{1,2},{1,3},{1,2,3}").unwrap())
    }

    #[test]
    fn full_rank3_lattice_lacks_presentation() {
        let report = decide(&lattice(3));
        assert_eq!(report.rank, 3);
        assert_eq!(report.index, 7);
        assert_eq!(report.esupp_size, 1);
        assert_eq!(report.n0, 1);
        assert_eq!(report.verdict, Verdict::LacksPresentation);
        assert_eq!(
            report.kernel_basis,
            vec![KernelBasisEntry {
                eps: vec![SubsetMask::from_indices(&[1, 2, 3])],
                m: vec![-1, -1, -1],
            }]
        );
        let witness = report.witnesses.as_ref().unwrap();
        assert_eq!(witness.j0, SubsetMask::from_indices(&[1, 2, 3]));
        // The decomposition must actually recombine to z_{J₀}.
        let ctx = lattice(3);
        let target = weyl::z_exponents(&ctx, witness.j0);
        let mut acc = vec![0i64; ctx.pair_count()];
        for term in &witness.decomposition {
            assert_ne!(term.generator, witness.j0);
            for (slot, v) in weyl::z_exponents(&ctx, term.generator)
                .exponents()
                .iter()
                .enumerate()
            {
                acc[slot] += v * term.coefficient;
            }
        }
        assert_eq!(CentralVector::from_exponents(acc), target);
        assert!(report.corollary_notes.iter().all(|n| n.consistent));
        assert!(report
            .corollary_notes
            .iter()
            .any(|n| n.name == "low-rank-classification" && n.predicted == "LacksPresentation"));
    }

    #[test]
    fn index6_class_has_presentation() {
        let report = decide(&index6());
        assert_eq!(report.verdict, Verdict::HasPresentation);
        assert_eq!(report.n0, 0);
        assert!(report.kernel_basis.is_empty());
        assert!(report.witnesses.is_none());
        assert!(report.corollary_notes.iter().all(|n| n.consistent));
        // index 6 = ν + 3 triggers the small-index prediction.
        assert!(report
            .corollary_notes
            .iter()
            .any(|n| n.name == "small-index"));
    }

    #[test]
    fn family_classes_lack_presentation() {
        for index in 8..=15 {
            let ctx = SemilatticeContext::new(make_family(4, index).unwrap());
            let report = decide(&ctx);
            assert_eq!(report.verdict, Verdict::LacksPresentation, "index {index}");
            assert!(report
                .corollary_notes
                .iter()
                .any(|n| n.name == "covered-essential-set" && n.consistent));
        }
    }

    #[test]
    fn minimal_class_notes() {
        let report = decide(&SemilatticeContext::new(
            SupportingClass::minimal(4).unwrap(),
        ));
        assert_eq!(report.verdict, Verdict::HasPresentation);
        assert!(report
            .corollary_notes
            .iter()
            .any(|n| n.name == "no-essential-sets" && n.consistent));
    }

    #[test]
    fn rank5_lattice_notes() {
        let report = decide(&lattice(5));
        assert_eq!(report.n0, 16);
        for name in ["full-lattice", "all-pairs-present", "near-full-index"] {
            // near-full-index does not apply to the full lattice itself.
            let applies = report.corollary_notes.iter().any(|n| n.name == name);
            assert_eq!(applies, name != "near-full-index", "{name}");
        }
        assert!(report.corollary_notes.iter().all(|n| n.consistent));
    }

    #[test]
    fn json_field_names_are_stable() {
        let json = serde_json::to_string(&decide(&lattice(3))).unwrap();
        for fragment in [
            "\"rank\":3",
            "\"index\":7",
            "\"esuppSize\":1",
            "\"n0\":1",
            "\"verdict\":\"LacksPresentation\"",
            "\"kernelBasis\":[{\"eps\":[[1,2,3]],\"m\":[-1,-1,-1]}]",
            "\"witnesses\":{\"j0\":[1,2,3]",
            "\"corollaryNotes\":[",
        ] {
            assert!(json.contains(fragment), "missing {fragment} in {json}");
        }

        let json = serde_json::to_string(&decide(&index6())).unwrap();
        assert!(json.contains("\"witnesses\":null"));
        assert!(json.contains("\"kernelBasis\":[]"));
    }

    #[test]
    fn monotonicity_checks() {
        let small = index6();
        let big = lattice(3);
        assert_eq!(check_monotonicity(&small, &big), Ok(true));
        assert_eq!(check_monotonicity(&big, &big), Ok(true));
        assert_eq!(
            check_monotonicity(&big, &small),
            Err(DecideError::NotNested)
        );
        assert_eq!(
            check_monotonicity(&small, &lattice(4)),
            Err(DecideError::NotNested)
        );
    }

    #[test]
    fn psi_separates_elements_when_kernel_trivial() {
        use crate::hat::{psi, HatElement};
        let ctx = index6();
        let mut elements = Vec::new();
        for eps in 0..=1u8 {
            for m12 in -1..=1i64 {
                for m13 in -1..=1i64 {
                    for m23 in -1..=1i64 {
                        elements.push(HatElement::new(
                            false,
                            vec![0; 3],
                            vec![m12, m13, m23],
                            vec![eps],
                        ));
                    }
                }
            }
        }
        for (i, a) in elements.iter().enumerate() {
            for b in &elements[i + 1..] {
                assert_ne!(
                    psi(&ctx, a).unwrap(),
                    psi(&ctx, b).unwrap(),
                    "ψ collapsed {a:?} and {b:?}"
                );
            }
        }
    }
}
