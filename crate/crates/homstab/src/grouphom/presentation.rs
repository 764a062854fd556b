//! Stored presentations and the abelianization oracle they feed.
//!
//! The Coxeter presentation of the symmetric groups is kept as data and
//! verified against enumeration at small rank (relators hold, generators
//! generate). Its exponent matrix gives `H_1` by Smith normal form,
//! independently of any bar or resolution computation.

use num_bigint::BigInt;

use super::group::FiniteGroup;
use crate::families::{Family, GroupElement};
use crate::homology::{smith_normal_form, SparseIntMatrix};
use crate::{Error, Result};

/// A finite presentation: relators are words in the generators, letters
/// `+(i+1)` and `-(i+1)` meaning the generator `i` or its inverse.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub generator_count: usize,
    pub relators: Vec<Vec<i32>>,
}

/// Coxeter presentation of the symmetric group on `n` letters: adjacent
/// transpositions `s_1..s_{n-1}` with `s_i^2`, braid and commutation
/// relations.
pub fn coxeter_symmetric(n: usize) -> Presentation {
    let gens = n.saturating_sub(1);
    let mut relators = Vec::new();
    for i in 0..gens {
        relators.push(vec![(i + 1) as i32; 2]);
    }
    for i in 0..gens.saturating_sub(1) {
        let (a, b) = ((i + 1) as i32, (i + 2) as i32);
        relators.push(vec![a, b, a, b, a, b]);
    }
    for i in 0..gens {
        for j in i + 2..gens {
            let (a, b) = ((i + 1) as i32, (j + 1) as i32);
            relators.push(vec![a, b, a, b]);
        }
    }
    Presentation { generator_count: gens, relators }
}

/// The generators the Coxeter presentation refers to, as elements.
pub fn adjacent_transpositions(family: &Family, n: usize) -> Vec<GroupElement> {
    let mut gens = Vec::new();
    for i in 1..n {
        let mut images: Vec<u16> = (1..=n as u16).collect();
        images.swap(i - 1, i);
        gens.push(GroupElement {
            kind: family.kind,
            rank: n,
            payload: crate::families::Payload::Perm(images),
        });
    }
    gens
}

/// Check a stored presentation against an enumerated group: every relator
/// must evaluate to the identity and the generators must generate.
pub fn verify_presentation(
    group: &FiniteGroup,
    presentation: &Presentation,
    generator_elements: &[GroupElement],
) -> Result<()> {
    if generator_elements.len() != presentation.generator_count {
        return Err(Error::InvalidInput("generator count mismatch".into()));
    }
    let gen_idx: Vec<u32> = generator_elements
        .iter()
        .map(|g| {
            group
                .index_of(g)
                .ok_or_else(|| Error::InvalidInput("presentation generator not in group".into()))
        })
        .collect::<Result<_>>()?;
    for relator in &presentation.relators {
        let mut acc = group.identity;
        for &letter in relator {
            let gen = gen_idx[letter.unsigned_abs() as usize - 1];
            let factor = if letter > 0 { gen } else { group.inv(gen) };
            acc = group.mul(acc, factor);
        }
        if acc != group.identity {
            return Err(Error::Integrity(format!("relator {relator:?} does not hold")));
        }
    }
    // Generators must generate: closure.
    let mut seen = vec![false; group.order()];
    let mut frontier = vec![group.identity];
    let mut count = 0;
    while let Some(x) = frontier.pop() {
        if seen[x as usize] {
            continue;
        }
        seen[x as usize] = true;
        count += 1;
        for &s in &gen_idx {
            frontier.push(group.mul(x, s));
        }
    }
    if count != group.order() {
        return Err(Error::Integrity(format!(
            "presentation generators span {count} of {} elements",
            group.order()
        )));
    }
    Ok(())
}

/// Abelianization from a presentation: Smith normal form of the exponent
/// matrix. Returns `(free rank, invariant factors > 1)`.
pub fn abelianization_from_presentation(p: &Presentation) -> (usize, Vec<BigInt>) {
    let mut triplets = Vec::new();
    for (col, relator) in p.relators.iter().enumerate() {
        for &letter in relator {
            let row = letter.unsigned_abs() as usize - 1;
            let sign = if letter > 0 { 1i64 } else { -1 };
            triplets.push((row, col, BigInt::from(sign)));
        }
    }
    let m = SparseIntMatrix::from_triplets(p.generator_count, p.relators.len(), triplets)
        .expect("exponent matrix triplets in range");
    let snf = smith_normal_form(&m);
    (p.generator_count - snf.rank, snf.torsion())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coxeter_presentation_verifies_small_ranks() {
        let sym = Family::symmetric();
        for n in 2..=5 {
            let group = FiniteGroup::from_family(&sym, n).unwrap();
            let pres = coxeter_symmetric(n);
            let gens = adjacent_transpositions(&sym, n);
            verify_presentation(&group, &pres, &gens).unwrap();
        }
    }

    #[test]
    fn symmetric_abelianization_is_z_mod_2() {
        for n in 2..=6 {
            let (rank, torsion) = abelianization_from_presentation(&coxeter_symmetric(n));
            assert_eq!(rank, 0, "n = {n}");
            assert_eq!(torsion, vec![BigInt::from(2)], "n = {n}");
        }
    }

    #[test]
    fn two_independent_abelianization_paths_agree() {
        // Presentation route vs pure enumeration route.
        let sym = Family::symmetric();
        for n in 2..=5 {
            let group = FiniteGroup::from_family(&sym, n).unwrap();
            let by_enum = group.abelian_invariants().unwrap();
            let (rank, torsion) = abelianization_from_presentation(&coxeter_symmetric(n));
            assert_eq!(rank, 0);
            let torsion_u64: Vec<u64> =
                torsion.iter().map(|t| t.to_string().parse().unwrap()).collect();
            assert_eq!(by_enum, torsion_u64, "n = {n}");
        }
    }

    #[test]
    fn corrupted_relator_is_detected() {
        let sym = Family::symmetric();
        let group = FiniteGroup::from_family(&sym, 3).unwrap();
        let mut pres = coxeter_symmetric(3);
        pres.relators.push(vec![1, 2]); // s_1 s_2 is not the identity
        let gens = adjacent_transpositions(&sym, 3);
        assert!(verify_presentation(&group, &pres, &gens).is_err());
    }
}
