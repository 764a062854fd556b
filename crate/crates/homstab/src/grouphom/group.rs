//! Concrete finite groups: an enumerated element list with fast indexed
//! multiplication, subgroup closure, and abelian invariants computed by
//! enumeration. Derived groups (commutator subgroups) live here too.

use std::collections::{BTreeMap, BTreeSet};

use crate::families::{Family, GroupElement, Payload};
use crate::{Error, Result};

const MUL_TABLE_CAP: usize = 1024;

/// A finite group given by its sorted element list, with composition
/// delegated to the carrying family.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pub family: Family,
    pub rank: usize,
    pub elements: Vec<GroupElement>,
    index: BTreeMap<Payload, u32>,
    pub identity: u32,
    pub generators: Vec<u32>,
    inverses: Vec<u32>,
    mul_table: Option<Vec<u32>>,
}

impl FiniteGroup {
    /// The full `G_n` of a family, with the family's generating set.
    pub fn from_family(family: &Family, n: usize) -> Result<FiniteGroup> {
        let elements = family.enumerate(n)?;
        let gens = family.generators(n);
        FiniteGroup::from_elements(family, n, elements, Some(gens))
    }

    pub fn from_family_capped(family: &Family, n: usize, cap: u128) -> Result<FiniteGroup> {
        let elements = family.enumerate_capped(n, cap)?;
        let gens = family.generators(n);
        FiniteGroup::from_elements(family, n, elements, Some(gens))
    }

    /// Build from an explicit element list (must be closed under the
    /// family's composition). Generators are found greedily if absent.
    pub fn from_elements(
        family: &Family,
        rank: usize,
        mut elements: Vec<GroupElement>,
        generators: Option<Vec<GroupElement>>,
    ) -> Result<FiniteGroup> {
        elements.sort();
        elements.dedup();
        let index: BTreeMap<Payload, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g.payload.clone(), i as u32))
            .collect();
        let id = family.identity(rank);
        let identity = *index
            .get(&id.payload)
            .ok_or_else(|| Error::InvalidInput("element list lacks the identity".into()))?;
        let mut inverses = Vec::with_capacity(elements.len());
        for g in &elements {
            let inv = family.inverse(g)?;
            let idx = index
                .get(&inv.payload)
                .ok_or_else(|| Error::InvalidInput("element list not closed under inverse".into()))?;
            inverses.push(*idx);
        }
        let mut group = FiniteGroup {
            family: *family,
            rank,
            elements,
            index,
            identity,
            generators: Vec::new(),
            inverses,
            mul_table: None,
        };
        if group.elements.len() <= MUL_TABLE_CAP {
            let n = group.elements.len();
            let mut table = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    let prod = family.compose(&group.elements[a], &group.elements[b])?;
                    let idx = group.index.get(&prod.payload).ok_or_else(|| {
                        Error::InvalidInput("element list not closed under composition".into())
                    })?;
                    table[a * n + b] = *idx;
                }
            }
            group.mul_table = Some(table);
        }
        group.generators = match generators {
            Some(gens) => {
                let mut idxs = Vec::new();
                for g in gens {
                    let idx = group.index_of(&g).ok_or_else(|| {
                        Error::InvalidInput("generator not in element list".into())
                    })?;
                    if idx != group.identity {
                        idxs.push(idx);
                    }
                }
                idxs
            }
            None => group.greedy_generators()?,
        };
        // Generators must actually generate.
        let span = group.closure(&group.generators)?;
        if span.len() != group.elements.len() {
            return Err(Error::InvalidInput(format!(
                "generators span {} of {} elements",
                span.len(),
                group.elements.len()
            )));
        }
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<u32> {
        self.index.get(&g.payload).copied()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul_table {
            Some(t) => t[a as usize * self.elements.len() + b as usize],
            None => {
                let prod = self
                    .family
                    .compose(&self.elements[a as usize], &self.elements[b as usize])
                    .expect("closed family composition");
                *self.index.get(&prod.payload).expect("closed under composition")
            }
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    fn closure(&self, seeds: &[u32]) -> Result<BTreeSet<u32>> {
        let mut span: BTreeSet<u32> = BTreeSet::new();
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            if !span.insert(x) {
                continue;
            }
            for &s in seeds {
                frontier.push(self.mul(x, s));
            }
        }
        Ok(span)
    }

    /// Deterministic small generating set: repeatedly adjoin the least
    /// element outside the current span.
    fn greedy_generators(&self) -> Result<Vec<u32>> {
        let mut gens: Vec<u32> = Vec::new();
        loop {
            let span = self.closure(&gens)?;
            if span.len() == self.elements.len() {
                return Ok(gens);
            }
            let next = (0..self.elements.len() as u32)
                .find(|i| !span.contains(i))
                .expect("span is proper");
            gens.push(next);
        }
    }

    /// The subgroup generated by the given elements, closed under
    /// multiplication.
    pub fn from_generating_set(
        family: &Family,
        rank: usize,
        gens: Vec<GroupElement>,
    ) -> Result<FiniteGroup> {
        let mut span: BTreeSet<GroupElement> = BTreeSet::new();
        let mut frontier = vec![family.identity(rank)];
        while let Some(x) = frontier.pop() {
            if span.contains(&x) {
                continue;
            }
            for g in &gens {
                frontier.push(family.compose(&x, g)?);
            }
            span.insert(x);
        }
        FiniteGroup::from_elements(family, rank, span.into_iter().collect(), Some(gens))
    }

    /// The subgroup generated by all commutators, as a group in its own
    /// right (with greedily chosen generators).
    pub fn commutator_subgroup(&self) -> Result<FiniteGroup> {
        let mut comms: BTreeSet<u32> = BTreeSet::new();
        let n = self.elements.len() as u32;
        for a in 0..n {
            for b in 0..n {
                let c = self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b));
                comms.insert(c);
            }
        }
        let span = self.closure(&comms.iter().copied().collect::<Vec<_>>())?;
        let elements: Vec<GroupElement> =
            span.iter().map(|&i| self.elements[i as usize].clone()).collect();
        FiniteGroup::from_elements(&self.family, self.rank, elements, None)
    }

    /// Invariant factors (> 1, ascending divisibility chain) of the
    /// abelianization `G/[G,G]`, computed purely by enumeration: coset
    /// arithmetic in the quotient plus order counting per prime.
    pub fn abelian_invariants(&self) -> Result<Vec<u64>> {
        let derived = self.commutator_subgroup()?;
        let derived_set: BTreeSet<u32> = derived
            .elements
            .iter()
            .map(|g| self.index_of(g).expect("subgroup elements indexed"))
            .collect();
        // Canonical coset representative: least element index in g*K.
        let coset_rep = |g: u32| -> u32 {
            derived_set.iter().map(|&k| self.mul(g, k)).min().unwrap()
        };
        let mut reps: Vec<u32> = (0..self.elements.len() as u32)
            .map(coset_rep)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        reps.sort_unstable();
        let rep_index: BTreeMap<u32, usize> =
            reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let q = reps.len() as u64;
        // Quotient multiplication through representatives.
        let qmul =
            |a: usize, b: usize| -> usize { rep_index[&coset_rep(self.mul(reps[a], reps[b]))] };
        let qid = rep_index[&coset_rep(self.identity)];

        // Structure of the finite abelian quotient: for each prime p | q,
        // count solutions of x^{p^j} = e to recover the partition.
        let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for (p, _) in factorize_u64(q) {
            let mut prev_log = 0u32;
            let mut parts: Vec<u32> = Vec::new(); // parts[j-1] = #{i : lambda_i >= j}
            for j in 1.. {
                let pj = p.pow(j);
                let count = (0..reps.len())
                    .filter(|&x| {
                        let mut acc = qid;
                        for _ in 0..pj {
                            acc = qmul(acc, x);
                        }
                        acc == qid
                    })
                    .count() as u64;
                let log = log_base(count, p);
                if log == prev_log {
                    break;
                }
                parts.push(log - prev_log);
                prev_log = log;
            }
            if !parts.is_empty() {
                // parts[j-1] counts cyclic factors of order >= p^j; convert
                // to the multiset of exponents, largest first.
                let mut lambdas: Vec<u32> = Vec::new();
                for (j, &count) in parts.iter().enumerate() {
                    let next = parts.get(j + 1).copied().unwrap_or(0);
                    for _ in 0..(count - next) {
                        lambdas.push((j + 1) as u32);
                    }
                }
                lambdas.sort_unstable_by(|a, b| b.cmp(a));
                primary.insert(p, lambdas);
            }
        }
        let factors = primary.values().map(|l| l.len()).max().unwrap_or(0);
        let mut invariants = Vec::new();
        for t in 0..factors {
            let mut d: u64 = 1;
            for (p, lambdas) in &primary {
                if let Some(&e) = lambdas.get(t) {
                    d *= p.pow(e);
                }
            }
            invariants.push(d);
        }
        invariants.reverse(); // ascending divisibility chain
        Ok(invariants)
    }
}

fn factorize_u64(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn log_base(mut n: u64, p: u64) -> u32 {
    let mut log = 0;
    while n > 1 {
        debug_assert_eq!(n % p, 0);
        n /= p;
        log += 1;
    }
    log
}

/// A homomorphism between enumerated groups, stored as an element-index
/// map, verified to respect multiplication.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub map: Vec<u32>,
}

impl GroupHom {
    pub fn new(source: &FiniteGroup, target: &FiniteGroup, map: Vec<u32>) -> Result<GroupHom> {
        if map.len() != source.order() {
            return Err(Error::InvalidInput("homomorphism map has wrong length".into()));
        }
        if map[source.identity as usize] != target.identity {
            return Err(Error::InvalidInput("homomorphism does not preserve identity".into()));
        }
        for a in 0..source.order() as u32 {
            for b in 0..source.order() as u32 {
                let lhs = map[source.mul(a, b) as usize];
                let rhs = target.mul(map[a as usize], map[b as usize]);
                if lhs != rhs {
                    return Err(Error::InvalidInput(format!(
                        "not a homomorphism at pair ({a},{b})"
                    )));
                }
            }
        }
        Ok(GroupHom { map })
    }

    /// The stabilization `G_n -> G_{n+1}` of a family, restricted to
    /// enumerated groups (source elements must stabilize into the target).
    pub fn stabilization(source: &FiniteGroup, target: &FiniteGroup) -> Result<GroupHom> {
        let mut map = Vec::with_capacity(source.order());
        for g in &source.elements {
            let image = source.family.stabilize(g)?;
            let idx = target
                .index_of(&image)
                .ok_or_else(|| Error::InvalidInput("stabilized element missing in target".into()))?;
            map.push(idx);
        }
        GroupHom::new(source, target, map)
    }

    /// Inclusion of a subgroup whose elements are payload-identical.
    pub fn inclusion(source: &FiniteGroup, target: &FiniteGroup) -> Result<GroupHom> {
        let mut map = Vec::with_capacity(source.order());
        for g in &source.elements {
            let idx = target
                .index_of(g)
                .ok_or_else(|| Error::InvalidInput("subgroup element missing in target".into()))?;
            map.push(idx);
        }
        GroupHom::new(source, target, map)
    }

    pub fn identity_hom(group: &FiniteGroup) -> GroupHom {
        GroupHom { map: (0..group.order() as u32).collect() }
    }

    pub fn compose(&self, outer: &GroupHom) -> GroupHom {
        GroupHom { map: self.map.iter().map(|&i| outer.map[i as usize]).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_group_tables() {
        let g = FiniteGroup::from_family(&Family::symmetric(), 4).unwrap();
        assert_eq!(g.order(), 24);
        for a in 0..24u32 {
            assert_eq!(g.mul(a, g.inv(a)), g.identity);
            assert_eq!(g.mul(g.identity, a), a);
        }
    }

    #[test]
    fn commutator_subgroup_of_sigma_is_alternating() {
        let s4 = FiniteGroup::from_family(&Family::symmetric(), 4).unwrap();
        let a4 = s4.commutator_subgroup().unwrap();
        assert_eq!(a4.order(), 12);
        let s3 = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        assert_eq!(s3.commutator_subgroup().unwrap().order(), 3);
    }

    #[test]
    fn abelian_invariants_by_enumeration() {
        // Sigma_n abelianizes to Z/2.
        for n in 2..=4 {
            let g = FiniteGroup::from_family(&Family::symmetric(), n).unwrap();
            assert_eq!(g.abelian_invariants().unwrap(), vec![2]);
        }
        // A_4 abelianizes to Z/3, A_3 is already Z/3.
        let s4 = FiniteGroup::from_family(&Family::symmetric(), 4).unwrap();
        let a4 = s4.commutator_subgroup().unwrap();
        assert_eq!(a4.abelian_invariants().unwrap(), vec![3]);
        // GL_2(F_2) is Sigma_3.
        let gl2 = FiniteGroup::from_family(&Family::gl(2).unwrap(), 2).unwrap();
        assert_eq!(gl2.abelian_invariants().unwrap(), vec![2]);
        // Hyperoctahedral rank 2 abelianizes to Z/2 x Z/2.
        let b2 = FiniteGroup::from_family(&Family::hyperoctahedral(), 2).unwrap();
        assert_eq!(b2.abelian_invariants().unwrap(), vec![2, 2]);
    }

    #[test]
    fn alternating_abelianization_vanishes_from_rank_5() {
        let s5 = FiniteGroup::from_family(&Family::symmetric(), 5).unwrap();
        let a5 = s5.commutator_subgroup().unwrap();
        assert_eq!(a5.order(), 60);
        assert_eq!(a5.abelian_invariants().unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn stabilization_hom_verifies() {
        let sym = Family::symmetric();
        let s3 = FiniteGroup::from_family(&sym, 3).unwrap();
        let s4 = FiniteGroup::from_family(&sym, 4).unwrap();
        let phi = GroupHom::stabilization(&s3, &s4).unwrap();
        assert_eq!(phi.map.len(), 6);
        // Identity goes to identity and distinct elements stay distinct.
        let distinct: BTreeSet<u32> = phi.map.iter().copied().collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn bad_homomorphism_rejected() {
        let sym = Family::symmetric();
        let s2 = FiniteGroup::from_family(&sym, 2).unwrap();
        let s3 = FiniteGroup::from_family(&sym, 3).unwrap();
        // Send the transposition to a 3-cycle; its square is not trivial.
        let cycle = crate::families::perm(vec![2, 3, 1]).unwrap();
        let bad = vec![s3.identity, s3.index_of(&cycle).unwrap()];
        assert!(GroupHom::new(&s2, &s3, bad).is_err());
    }
}
