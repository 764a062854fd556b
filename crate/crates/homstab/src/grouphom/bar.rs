//! The normalized bar complex of a finite group with module coefficients.
//!
//! Degree-`k` chains are spanned by `M`-basis vectors tensored with
//! `k`-tuples of non-identity elements. The differential acts by the
//! usual alternating sum: the first face moves `g_1` into the
//! coefficient through the right action, inner faces multiply adjacent
//! entries (tuples that pick up an identity die, this being the
//! normalized complex), the last face forgets the final entry.

use num_bigint::BigInt;

use super::group::FiniteGroup;
use super::module::{GModule, Scalars};
use crate::homology::{ChainComplex, Ring, SparseIntMatrix};
use crate::{Error, Result};

/// Caps for the bar tier.
#[derive(Clone, Copy, Debug)]
pub struct BarCaps {
    pub group_order: usize,
    pub max_entries: usize,
}

impl Default for BarCaps {
    fn default() -> Self {
        BarCaps { group_order: 24, max_entries: 10_000_000 }
    }
}

/// Non-identity elements in index order; bar tuples draw digits from
/// this list.
pub(crate) fn non_identity_elements(group: &FiniteGroup) -> Vec<u32> {
    (0..group.order() as u32).filter(|&i| i != group.identity).collect()
}

/// Number of degree-`k` tuples, i.e. `(|G|-1)^k`.
pub fn bar_tuple_count(order: usize, k: usize) -> Option<usize> {
    let q = order - 1;
    let mut acc: usize = 1;
    for _ in 0..k {
        acc = acc.checked_mul(q)?;
    }
    Some(acc)
}

/// Estimated nonzero count of the bar complex through `degree_cap`.
pub fn bar_size_estimate(order: usize, dim: usize, degree_cap: usize) -> Option<usize> {
    let mut total: usize = 0;
    for k in 1..=degree_cap {
        let tuples = bar_tuple_count(order, k)?;
        total = total.checked_add(tuples.checked_mul(k + 1)?.checked_mul(dim * dim)?)?;
    }
    Some(total)
}

/// Build the normalized bar complex of `(group, module)` through
/// `degree_cap`.
pub fn bar_complex(
    group: &FiniteGroup,
    module: &GModule,
    degree_cap: usize,
    caps: &BarCaps,
) -> Result<ChainComplex> {
    if group.order() > caps.group_order {
        return Err(Error::Resource {
            what: format!("bar tier |G| for {}", group.family.name()),
            size: group.order() as u128,
            cap: caps.group_order as u128,
        });
    }
    match bar_size_estimate(group.order(), module.dim, degree_cap) {
        Some(size) if size <= caps.max_entries => {}
        other => {
            return Err(Error::Resource {
                what: "bar chain size".into(),
                size: other.map(|s| s as u128).unwrap_or(u128::MAX),
                cap: caps.max_entries as u128,
            })
        }
    }

    let order = group.order();
    let q = order - 1;
    let non_id = non_identity_elements(group);
    let dim = module.dim;

    let ring = match module.scalars {
        Scalars::Int => Ring::Integer,
        Scalars::Fp(p) => Ring::ModP(p),
    };

    let mut dims = Vec::with_capacity(degree_cap + 1);
    for k in 0..=degree_cap {
        dims.push(bar_tuple_count(order, k).expect("size pre-checked") * dim);
    }

    let mut boundaries = Vec::with_capacity(degree_cap);
    let mut digits = Vec::with_capacity(degree_cap);
    for k in 1..=degree_cap {
        let tuples = bar_tuple_count(order, k).expect("size pre-checked");
        let mut triplets: Vec<(usize, usize, BigInt)> = Vec::new();
        digits.resize(k, 0usize);
        for t in 0..tuples {
            // Decode tuple digits, most significant first.
            let mut rest = t;
            for slot in (0..k).rev() {
                digits[slot] = rest % q;
                rest /= q;
            }
            // Face 0: move g_1 into the coefficient by the right action.
            {
                let g1 = non_id[digits[0]];
                let sub = tuple_index(&digits[1..], q);
                let action = module.act_right(group, g1);
                for c in 0..dim {
                    for r in 0..dim {
                        let v = action.get(r, c);
                        if v != 0 {
                            triplets.push((sub * dim + r, t * dim + c, BigInt::from(v)));
                        }
                    }
                }
            }
            // Inner faces: multiply adjacent entries.
            let mut scratch = vec![0usize; k - 1];
            for i in 1..k {
                let a = non_id[digits[i - 1]];
                let b = non_id[digits[i]];
                let prod = group.mul(a, b);
                if prod == group.identity {
                    continue;
                }
                let prod_digit = non_id.binary_search(&prod).expect("non-identity product");
                for (slot, target) in scratch.iter_mut().enumerate() {
                    *target = match slot {
                        s if s < i - 1 => digits[s],
                        s if s == i - 1 => prod_digit,
                        s => digits[s + 1],
                    };
                }
                let sub = tuple_index(&scratch, q);
                let sign = if i % 2 == 0 { 1i64 } else { -1 };
                for c in 0..dim {
                    triplets.push((sub * dim + c, t * dim + c, BigInt::from(sign)));
                }
            }
            // Last face: forget g_k.
            {
                let sub = tuple_index(&digits[..k - 1], q);
                let sign = if k % 2 == 0 { 1i64 } else { -1 };
                for c in 0..dim {
                    triplets.push((sub * dim + c, t * dim + c, BigInt::from(sign)));
                }
            }
        }
        boundaries.push(SparseIntMatrix::from_triplets(dims[k - 1], dims[k], triplets)?);
    }

    ChainComplex::from_parts(ring, false, dims, boundaries)
}

pub(crate) fn tuple_index(digits: &[usize], q: usize) -> usize {
    let mut acc = 0;
    for &d in digits {
        acc = acc * q + d;
    }
    acc
}

/// Coinvariants `M_G = M / span{m - m.g}`, an independent check of `H_0`.
pub fn coinvariants(
    group: &FiniteGroup,
    module: &GModule,
) -> Result<crate::homology::HomologySummand> {
    let dim = module.dim;
    let mut triplets = Vec::new();
    let mut col = 0;
    for g in 0..group.order() as u32 {
        let action = module.act_right(group, g);
        for c in 0..dim {
            for r in 0..dim {
                let v = action.get(r, c) - if r == c { 1 } else { 0 };
                if v != 0 {
                    triplets.push((r, col, BigInt::from(v)));
                }
            }
            col += 1;
        }
    }
    let m = SparseIntMatrix::from_triplets(dim, col, triplets)?;
    match module.scalars {
        Scalars::Int => {
            let snf = crate::homology::smith_normal_form(&m);
            Ok(crate::homology::HomologySummand {
                degree: 0,
                betti: dim - snf.rank,
                torsion: snf.torsion(),
            })
        }
        Scalars::Fp(p) => {
            let rank = crate::homology::modular::rank_mod_p(&m, p);
            Ok(crate::homology::HomologySummand {
                degree: 0,
                betti: dim - rank,
                torsion: Vec::new(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;
    use crate::homology::homology;

    #[test]
    fn bar_chain_ranks() {
        let z2 = FiniteGroup::from_family(&Family::symmetric(), 2).unwrap();
        let m = GModule::trivial(Scalars::Int, 1, "Z");
        let c = bar_complex(&z2, &m, 5, &BarCaps::default()).unwrap();
        assert_eq!(c.dims, vec![1, 1, 1, 1, 1, 1]);
        let s3 = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        let c = bar_complex(&s3, &m, 3, &BarCaps::default()).unwrap();
        assert_eq!(c.dims, vec![1, 5, 25, 125]);
        c.verify_dd_zero().unwrap();
    }

    #[test]
    fn homology_of_z2_matches_cyclic_resolution_oracle() {
        // Minimal periodic resolution of Z/t: H_0 = Z, H_odd = Z/t,
        // H_even = 0.
        let z2 = FiniteGroup::from_family(&Family::symmetric(), 2).unwrap();
        let m = GModule::trivial(Scalars::Int, 1, "Z");
        let c = bar_complex(&z2, &m, 6, &BarCaps::default()).unwrap();
        let h = homology(&c, 5).unwrap();
        assert_eq!(h.summand(0).unwrap().betti, 1);
        for d in 1..=5i64 {
            let s = h.summand(d).unwrap();
            assert_eq!(s.betti, 0);
            if d % 2 == 1 {
                assert_eq!(s.torsion, vec![BigInt::from(2)], "degree {d}");
            } else {
                assert!(s.torsion.is_empty(), "degree {d}");
            }
        }
    }

    #[test]
    fn h0_is_coinvariants() {
        let s3 = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        for module in [
            GModule::trivial(Scalars::Int, 1, "Z"),
            GModule::sign(&s3).unwrap(),
            GModule::standard_permutation(&s3).unwrap(),
        ] {
            let c = bar_complex(&s3, &module, 1, &BarCaps::default()).unwrap();
            let h = homology(&c, 0).unwrap();
            let ci = coinvariants(&s3, &module).unwrap();
            assert_eq!(h.summand(0).unwrap().betti, ci.betti, "{}", module.label);
            assert_eq!(h.summand(0).unwrap().torsion, ci.torsion, "{}", module.label);
        }
    }

    #[test]
    fn sign_coinvariants_of_sigma_are_z_mod_2() {
        let s4 = FiniteGroup::from_family(&Family::symmetric(), 4).unwrap();
        let sign = GModule::sign(&s4).unwrap();
        let ci = coinvariants(&s4, &sign).unwrap();
        assert_eq!(ci.betti, 0);
        assert_eq!(ci.torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn standard_coinvariants_collapse_coordinates() {
        for n in 1..=4 {
            let g = FiniteGroup::from_family(&Family::symmetric(), n).unwrap();
            let std = GModule::standard_permutation(&g).unwrap();
            let ci = coinvariants(&g, &std).unwrap();
            assert_eq!((ci.betti, ci.torsion.len()), (1, 0), "n={n}");
        }
    }

    #[test]
    fn bar_cap_exceeded_is_reported() {
        let s5 = FiniteGroup::from_family(&Family::symmetric(), 5).unwrap();
        let m = GModule::trivial(Scalars::Int, 1, "Z");
        let err = bar_complex(&s5, &m, 2, &BarCaps::default()).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }
}
