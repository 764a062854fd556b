//! Spaces of destabilizations and their simplicial companions.
//!
//! For a family `{G_n}` the space `W_n` is the semi-simplicial set whose
//! `p`-simplices are the cosets `g * im(G_{n-p-1})`, where `G_{n-p-1}`
//! embeds by `p+1`-fold stabilization (identity on the last `p+1` slots).
//! The `i`-th face right-multiplies a representative by
//! `beta_{i,p} = id_{n-p-1} + b_{i,1}^{-1} + id_{p-i}`, the coset-level
//! translation of precomposing with the inverse block braid. The
//! symmetric-family instance is the complex of injective words, which
//! doubles as an independent oracle for the construction.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::families::{Family, FamilyKind, GroupElement, Payload, DEFAULT_ENUMERATION_CAP};
use crate::{Error, Result};

/// A finite semi-simplicial set with explicit face incidence.
///
/// `faces[p][s][i]` is the index of `d_i(s)` among the `(p-1)`-simplices;
/// `faces[0]` is empty.
#[derive(Clone, Debug)]
pub struct SemiSimplicialSet {
    pub counts: Vec<usize>,
    pub faces: Vec<Vec<Vec<usize>>>,
}

impl SemiSimplicialSet {
    pub fn empty() -> SemiSimplicialSet {
        SemiSimplicialSet { counts: Vec::new(), faces: Vec::new() }
    }

    /// Highest dimension stored, or `None` when the set is empty.
    pub fn dim(&self) -> Option<usize> {
        if self.counts.is_empty() {
            None
        } else {
            Some(self.counts.len() - 1)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty() || self.counts[0] == 0
    }

    /// Check the semi-simplicial identities `d_i d_j = d_{j-1} d_i` for
    /// `i < j`, exhaustively.
    pub fn verify_identities(&self) -> Result<()> {
        for p in 2..self.counts.len() {
            for s in 0..self.counts[p] {
                for j in 1..=p {
                    for i in 0..j {
                        let lhs = self.faces[p - 1][self.faces[p][s][j]][i];
                        let rhs = self.faces[p - 1][self.faces[p][s][i]][j - 1];
                        if lhs != rhs {
                            return Err(Error::Integrity(format!(
                                "semi-simplicial identity fails at dim {p}, simplex {s}, (i,j)=({i},{j})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Sorted vertex set of every simplex, by dimension.
    pub fn vertex_sets(&self) -> Vec<Vec<Vec<usize>>> {
        let mut sets: Vec<Vec<Vec<usize>>> = Vec::with_capacity(self.counts.len());
        if self.counts.is_empty() {
            return sets;
        }
        sets.push((0..self.counts[0]).map(|v| vec![v]).collect());
        for p in 1..self.counts.len() {
            let mut level = Vec::with_capacity(self.counts[p]);
            for s in 0..self.counts[p] {
                let mut verts: Vec<usize> = Vec::new();
                for i in 0..=p {
                    verts.extend(sets[p - 1][self.faces[p][s][i]].iter().copied());
                }
                verts.sort_unstable();
                verts.dedup();
                level.push(verts);
            }
            sets.push(level);
        }
        sets
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(p, &c)| if p % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Plain-text incidence export: one `dim id : face_0 ... face_dim`
    /// line per simplex.
    pub fn write_incidence<W: Write>(&self, mut w: W) -> Result<()> {
        for (p, &count) in self.counts.iter().enumerate() {
            for s in 0..count {
                if p == 0 {
                    writeln!(w, "0 {s} :")?;
                } else {
                    let faces: Vec<String> =
                        self.faces[p][s].iter().map(|f| f.to_string()).collect();
                    writeln!(w, "{p} {s} : {}", faces.join(" "))?;
                }
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> ComplexSummary {
        ComplexSummary {
            counts: self.counts.clone(),
            euler_characteristic: self.euler_characteristic(),
        }
    }
}

/// JSON-facing summary of a complex.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexSummary {
    pub counts: Vec<usize>,
    pub euler_characteristic: i64,
}

/// A finite simplicial complex on vertices `0..vertex_count`, stored as
/// all simplices per dimension, downward closed, each level sorted.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    pub vertex_count: usize,
    pub simplices: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// Close a collection of vertex sets under subsets.
    pub fn from_simplices(vertex_count: usize, sets: Vec<Vec<usize>>) -> SimplicialComplex {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        let mut stack: Vec<Vec<usize>> = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        while let Some(s) = stack.pop() {
            if s.is_empty() {
                continue;
            }
            let d = s.len() - 1;
            if by_dim.len() <= d {
                by_dim.resize_with(d + 1, BTreeSet::new);
            }
            if !by_dim[d].insert(s.clone()) {
                continue;
            }
            if d > 0 {
                for omit in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(omit);
                    stack.push(face);
                }
            }
        }
        SimplicialComplex {
            vertex_count,
            simplices: by_dim.into_iter().map(|set| set.into_iter().collect()).collect(),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        if self.simplices.is_empty() {
            None
        } else {
            Some(self.simplices.len() - 1)
        }
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(|level| level.len()).collect()
    }

    /// Downward closure holds by construction; verify it anyway.
    pub fn verify_closure(&self) -> Result<()> {
        for d in 1..self.simplices.len() {
            for s in &self.simplices[d] {
                for omit in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(omit);
                    if self.simplices[d - 1].binary_search(&face).is_err() {
                        return Err(Error::Integrity(format!(
                            "missing face {face:?} of simplex {s:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Is this the full simplex on `n` vertices?
    pub fn is_full_simplex(&self, n: usize) -> bool {
        if self.vertex_count != n {
            return false;
        }
        if n == 0 {
            return self.simplices.is_empty();
        }
        if self.simplices.len() != n {
            return false;
        }
        (0..n).all(|d| self.simplices[d].len() == binomial(n, d + 1))
    }

    pub fn summary(&self) -> ComplexSummary {
        let counts = self.counts();
        let euler = counts
            .iter()
            .enumerate()
            .map(|(p, &c)| if p % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum();
        ComplexSummary { counts, euler_characteristic: euler }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// The space of destabilizations of a family at rank `n`, with canonical
/// coset representatives per simplex.
#[derive(Clone, Debug)]
pub struct Destabilization {
    pub family: Family,
    pub rank: usize,
    pub complex: SemiSimplicialSet,
    /// Canonical (lexicographically least) coset representative of each
    /// simplex, per dimension, in sorted order.
    pub reps: Vec<Vec<GroupElement>>,
}

struct CosetLevel {
    /// The embedded subgroup `im(G_{n-p-1})`, fixing the last `p+1` slots.
    subgroup: Vec<GroupElement>,
    /// Canonical representative payload -> simplex index.
    index: BTreeMap<Payload, usize>,
    reps: Vec<GroupElement>,
}

impl CosetLevel {
    fn build(family: &Family, n: usize, p: usize, all: &[GroupElement]) -> Result<CosetLevel> {
        let subgroup = stabilized_subgroup(family, n, p)?;
        let mut index: BTreeMap<Payload, usize> = BTreeMap::new();
        for g in all {
            let rep = canonical_in_coset(family, g, &subgroup)?;
            index.entry(rep.payload).or_insert(usize::MAX);
        }
        let mut reps = Vec::with_capacity(index.len());
        for (i, (payload, slot)) in index.iter_mut().enumerate() {
            *slot = i;
            reps.push(GroupElement { kind: family.kind, rank: n, payload: payload.clone() });
        }
        Ok(CosetLevel { subgroup, index, reps })
    }

    fn locate(&self, family: &Family, g: &GroupElement) -> Result<usize> {
        let rep = canonical_in_coset(family, g, &self.subgroup)?;
        self.index
            .get(&rep.payload)
            .copied()
            .ok_or_else(|| Error::Integrity("coset representative not indexed".into()))
    }
}

/// Elements of `G_n` of the shape `h + id_{p+1}` for `h` in `G_{n-p-1}`.
fn stabilized_subgroup(family: &Family, n: usize, p: usize) -> Result<Vec<GroupElement>> {
    let id_top = family.identity(p + 1);
    family
        .enumerate(n - p - 1)?
        .into_iter()
        .map(|h| family.block_sum(&h, &id_top))
        .collect()
}

fn canonical_in_coset(
    family: &Family,
    g: &GroupElement,
    subgroup: &[GroupElement],
) -> Result<GroupElement> {
    let mut best: Option<GroupElement> = None;
    for h in subgroup {
        let cand = family.compose(g, h)?;
        if best.as_ref().map(|b| cand < *b).unwrap_or(true) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::Integrity("empty subgroup".into()))
}

/// The face multiplier `beta_{i,p}` as an element of `G_n`.
fn face_multiplier(family: &Family, n: usize, p: usize, i: usize) -> Result<GroupElement> {
    let b_inv = family.inverse(&family.braiding(i, 1))?;
    let left = family.block_sum(&family.identity(n - p - 1), &b_inv)?;
    family.block_sum(&left, &family.identity(p - i))
}

/// Build `W_n(A,X)` through dimension `dim_cap` (capped at `n-1`).
///
/// The transitivity and stabilizer hypotheses are verified first; a
/// failure refuses the build with a structured error naming the failed
/// condition.
pub fn build_wn(family: &Family, n: usize, dim_cap: usize) -> Result<Destabilization> {
    let top = dim_cap.min(n.saturating_sub(1));
    let hypotheses = check_hypotheses(family, n, top)?;
    if let Some(err) = hypotheses.first_failure() {
        return Err(err);
    }
    build_wn_unchecked(family, n, dim_cap)
}

/// As [`build_wn`] without the hypothesis gate, for callers that already
/// ran [`check_hypotheses`].
pub fn build_wn_unchecked(family: &Family, n: usize, dim_cap: usize) -> Result<Destabilization> {
    let all = family.enumerate(n)?;
    let mut levels: Vec<CosetLevel> = Vec::new();
    if n > 0 {
        for p in 0..=dim_cap.min(n - 1) {
            levels.push(CosetLevel::build(family, n, p, &all)?);
        }
    }

    let mut counts = Vec::new();
    let mut faces: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut reps = Vec::new();
    for (p, level) in levels.iter().enumerate() {
        counts.push(level.reps.len());
        reps.push(level.reps.clone());
        if p == 0 {
            faces.push(Vec::new());
            continue;
        }
        let mut level_faces = Vec::with_capacity(level.reps.len());
        for rep in &level.reps {
            let mut simplex_faces = Vec::with_capacity(p + 1);
            for i in 0..=p {
                let beta = face_multiplier(family, n, p, i)?;
                let moved = family.compose(rep, &beta)?;
                simplex_faces.push(levels[p - 1].locate(family, &moved)?);
            }
            level_faces.push(simplex_faces);
        }
        faces.push(level_faces);
    }

    let complex = SemiSimplicialSet { counts, faces };
    complex.verify_identities()?;
    Ok(Destabilization { family: *family, rank: n, complex, reps })
}

impl Destabilization {
    /// Act on a simplex by postcomposition with `g`, returning the index
    /// of the image simplex.
    pub fn act(&self, p: usize, simplex: usize, g: &GroupElement) -> Result<usize> {
        let rep = &self.reps[p][simplex];
        let moved = self.family.compose(g, rep)?;
        let subgroup = stabilized_subgroup(&self.family, self.rank, p)?;
        let canon = canonical_in_coset(&self.family, &moved, &subgroup)?;
        self.reps[p]
            .binary_search_by(|r| r.payload.cmp(&canon.payload))
            .map_err(|_| Error::Integrity("acted simplex left the level".into()))
    }
}

/// Build the simplicial complex `S_n(A,X)`: same vertices as `W_n`; a set
/// of vertices spans a simplex iff it is the vertex set of some
/// `W_n`-simplex.
pub fn build_sn(family: &Family, n: usize) -> Result<SimplicialComplex> {
    let w = build_wn(family, n, n.saturating_sub(1))?;
    let vertex_count = w.complex.counts.first().copied().unwrap_or(0);
    let mut sets = Vec::new();
    for level in w.complex.vertex_sets() {
        for vs in level {
            sets.push(vs);
        }
    }
    let complex = SimplicialComplex::from_simplices(vertex_count, sets);
    complex.verify_closure()?;
    Ok(complex)
}

/// The complex of injective words on `n` letters: `p`-simplices are the
/// ordered `(p+1)`-tuples of distinct letters from `1..=n`; the `i`-th
/// face forgets the `i+1`-st letter.
pub fn injective_words(n: usize) -> SemiSimplicialSet {
    if n == 0 {
        return SemiSimplicialSet::empty();
    }
    let words_by_len = all_injective_words(n);
    let index_by_len: Vec<BTreeMap<Vec<u16>, usize>> = words_by_len
        .iter()
        .map(|words| words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect())
        .collect();
    let counts: Vec<usize> = words_by_len.iter().map(|w| w.len()).collect();
    let mut faces: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for p in 1..n {
        let mut level = Vec::with_capacity(counts[p]);
        for word in &words_by_len[p] {
            let mut fs = Vec::with_capacity(p + 1);
            for i in 0..=p {
                let mut shorter = word.clone();
                shorter.remove(i);
                fs.push(index_by_len[p - 1][&shorter]);
            }
            level.push(fs);
        }
        faces.push(level);
    }
    SemiSimplicialSet { counts, faces }
}

fn all_injective_words(n: usize) -> Vec<Vec<Vec<u16>>> {
    let mut by_len = Vec::with_capacity(n);
    for len in 1..=n {
        let mut words = Vec::new();
        let mut current: Vec<u16> = Vec::new();
        gen_words(n as u16, len, &mut current, &mut words);
        by_len.push(words);
    }
    by_len
}

fn gen_words(n: u16, len: usize, current: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if current.len() == len {
        out.push(current.clone());
        return;
    }
    for letter in 1..=n {
        if !current.contains(&letter) {
            current.push(letter);
            gen_words(n, len, current, out);
            current.pop();
        }
    }
}

/// Check that a symmetric-family `W_n` is isomorphic to the complex of
/// injective words via the correspondence reading off a representative's
/// values on the last `p+1` slots.
pub fn wn_matches_injective_words(w: &Destabilization) -> Result<()> {
    if w.family.kind != FamilyKind::Symmetric {
        return Err(Error::InvalidInput(
            "injective-words comparison only applies to the symmetric family".into(),
        ));
    }
    let n = w.rank;
    let iw = injective_words(n);
    if w.complex.counts != iw.counts {
        return Err(Error::Integrity(format!(
            "level counts differ: {:?} vs {:?}",
            w.complex.counts, iw.counts
        )));
    }
    let word_index: Vec<BTreeMap<Vec<u16>, usize>> = all_injective_words(n)
        .iter()
        .map(|words| words.iter().cloned().enumerate().map(|(i, wd)| (wd, i)).collect())
        .collect();
    let mut correspondence: Vec<Vec<usize>> = Vec::new();
    for p in 0..w.complex.counts.len() {
        let mut level = Vec::with_capacity(w.complex.counts[p]);
        let mut seen = vec![false; iw.counts[p]];
        for rep in &w.reps[p] {
            let images = rep.perm_images().expect("symmetric payload");
            let word: Vec<u16> = images[n - p - 1..].to_vec();
            let target = *word_index[p]
                .get(&word)
                .ok_or_else(|| Error::Integrity(format!("word {word:?} not injective")))?;
            if seen[target] {
                return Err(Error::Integrity(format!("word {word:?} hit twice")));
            }
            seen[target] = true;
            level.push(target);
        }
        correspondence.push(level);
    }
    for p in 1..w.complex.counts.len() {
        for s in 0..w.complex.counts[p] {
            for i in 0..=p {
                let lhs = correspondence[p - 1][w.complex.faces[p][s][i]];
                let rhs = iw.faces[p][correspondence[p][s]][i];
                if lhs != rhs {
                    return Err(Error::Integrity(format!(
                        "face maps disagree at dim {p}, simplex {s}, face {i}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Per-level outcome of the transitivity and stabilizer checks.
#[derive(Clone, Debug, Serialize)]
pub struct LevelHypotheses {
    pub p: usize,
    pub transitive: bool,
    pub stabilization_injective: bool,
    pub stabilizer_order: u128,
    pub expected_order: u128,
    pub stabilizer_is_stabilized_image: bool,
}

/// Report of [`check_hypotheses`].
#[derive(Clone, Debug, Serialize)]
pub struct HypothesesReport {
    pub family: String,
    pub rank: usize,
    pub levels: Vec<LevelHypotheses>,
}

impl HypothesesReport {
    pub fn passed(&self) -> bool {
        self.levels.iter().all(|l| {
            l.transitive
                && l.stabilization_injective
                && l.stabilizer_order == l.expected_order
                && l.stabilizer_is_stabilized_image
        })
    }

    fn first_failure(&self) -> Option<Error> {
        for l in &self.levels {
            if !l.transitive {
                return Some(Error::Hypothesis {
                    condition: "local cancellation (transitive action)".into(),
                    detail: format!("action not transitive on level p={}", l.p),
                });
            }
            if !l.stabilization_injective
                || l.stabilizer_order != l.expected_order
                || !l.stabilizer_is_stabilized_image
            {
                return Some(Error::Hypothesis {
                    condition: "injectivity (stabilizer identification)".into(),
                    detail: format!(
                        "level p={}: stabilizer order {} vs expected {}",
                        l.p, l.stabilizer_order, l.expected_order
                    ),
                });
            }
        }
        None
    }
}

/// Verify by direct orbit computation that `G_n` acts transitively on each
/// simplex level, and that the stabilizer of the base simplex is exactly
/// the image of `G_{n-p-1}` under iterated stabilization.
pub fn check_hypotheses(family: &Family, n: usize, dim_cap: usize) -> Result<HypothesesReport> {
    let all = family.enumerate(n)?;
    let mut levels = Vec::new();
    if n > 0 {
        for p in 0..=dim_cap.min(n - 1) {
            levels.push(verify_level_hypotheses(family, n, p, &all)?);
        }
    }
    Ok(HypothesesReport { family: family.name(), rank: n, levels })
}

fn verify_level_hypotheses(
    family: &Family,
    n: usize,
    p: usize,
    all: &[GroupElement],
) -> Result<LevelHypotheses> {
    let sub_rank = n - p - 1;
    let small = family.enumerate(sub_rank)?;
    let id_top = family.identity(p + 1);
    let mut subgroup = Vec::with_capacity(small.len());
    for h in &small {
        subgroup.push(family.block_sum(h, &id_top)?);
    }
    let distinct: BTreeSet<&GroupElement> = subgroup.iter().collect();
    let stabilization_injective = distinct.len() == small.len();

    let base = canonical_in_coset(family, &family.identity(n), &subgroup)?;
    let mut orbit: BTreeSet<Payload> = BTreeSet::new();
    let mut stabilizer: Vec<GroupElement> = Vec::new();
    let mut all_cosets: BTreeSet<Payload> = BTreeSet::new();
    for g in all {
        let moved = family.compose(g, &base)?;
        let canon = canonical_in_coset(family, &moved, &subgroup)?;
        if canon == base {
            stabilizer.push(g.clone());
        }
        orbit.insert(canon.payload);
        all_cosets.insert(canonical_in_coset(family, g, &subgroup)?.payload);
    }
    let transitive = orbit == all_cosets;

    let image: BTreeSet<&GroupElement> = subgroup.iter().collect();
    let stab_set: BTreeSet<&GroupElement> = stabilizer.iter().collect();
    let stabilizer_is_stabilized_image = image == stab_set;

    Ok(LevelHypotheses {
        p,
        transitive,
        stabilization_injective,
        stabilizer_order: stabilizer.len() as u128,
        expected_order: family.order(sub_rank),
        stabilizer_is_stabilized_image,
    })
}

/// Expected level size from orbit-stabilizer: `|G_n| / |G_{n-p-1}|`.
pub fn expected_level_size(family: &Family, n: usize, p: usize) -> u128 {
    family.order(n) / family.order(n - p - 1)
}

/// Enumeration guard for builders with a configurable cap.
pub fn check_enumerable(family: &Family, n: usize, cap: Option<u128>) -> Result<()> {
    let cap = cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let order = family.order(n);
    if order > cap {
        return Err(Error::Resource {
            what: format!("|{}_{}|", family.name(), n),
            size: order,
            cap,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injective_words_counts_are_falling_factorials() {
        let iw = injective_words(3);
        assert_eq!(iw.counts, vec![3, 6, 6]);
        iw.verify_identities().unwrap();
        assert!(injective_words(0).is_empty());
        let iw6 = injective_words(6);
        assert_eq!(iw6.counts, vec![6, 30, 120, 360, 720, 720]);
        iw6.verify_identities().unwrap();
    }

    #[test]
    fn wn_symmetric_level_counts() {
        let sym = Family::symmetric();
        let w = build_wn(&sym, 3, 2).unwrap();
        assert_eq!(w.complex.counts, vec![3, 6, 6]);
        let w1 = build_wn(&sym, 1, 0).unwrap();
        assert_eq!(w1.complex.counts, vec![1]);
    }

    #[test]
    fn wn_matches_injective_words_through_rank_6() {
        let sym = Family::symmetric();
        for n in 1..=6 {
            let w = build_wn_unchecked(&sym, n, n - 1).unwrap();
            wn_matches_injective_words(&w).unwrap();
        }
    }

    #[test]
    fn wn_gl2_level_counts() {
        let gl = Family::gl(2).unwrap();
        let w = build_wn(&gl, 2, 1).unwrap();
        assert_eq!(w.complex.counts, vec![6, 6]);
        for (p, &count) in w.complex.counts.iter().enumerate() {
            assert_eq!(count as u128, expected_level_size(&gl, 2, p));
        }
    }

    #[test]
    fn level_sizes_match_orbit_stabilizer() {
        let sym = Family::symmetric();
        for n in 1..=5 {
            let w = build_wn_unchecked(&sym, n, n - 1).unwrap();
            for (p, &count) in w.complex.counts.iter().enumerate() {
                assert_eq!(count as u128, expected_level_size(&sym, n, p));
            }
        }
        let gl = Family::gl(2).unwrap();
        for n in 1..=3 {
            let w = build_wn_unchecked(&gl, n, n - 1).unwrap();
            for (p, &count) in w.complex.counts.iter().enumerate() {
                assert_eq!(count as u128, expected_level_size(&gl, n, p));
            }
        }
    }

    #[test]
    fn action_commutes_with_faces() {
        let sym = Family::symmetric();
        let w = build_wn(&sym, 4, 3).unwrap();
        let elems = sym.enumerate(4).unwrap();
        for g in elems.iter().step_by(3) {
            for p in 1..w.complex.counts.len() {
                for s in (0..w.complex.counts[p]).step_by(5) {
                    let gs = w.act(p, s, g).unwrap();
                    for i in 0..=p {
                        let lhs = w.complex.faces[p][gs][i];
                        let rhs = w.act(p - 1, w.complex.faces[p][s][i], g).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn sn_symmetric_is_full_simplex() {
        let sym = Family::symmetric();
        for n in 1..=5 {
            let s = build_sn(&sym, n).unwrap();
            assert!(s.is_full_simplex(n), "S_{n} should be the standard simplex");
        }
    }

    #[test]
    fn sn_gl2_matches_brute_force_complement_pairs() {
        // Independent brute force with F_2 linear algebra: vertices are
        // pairs (H, v) of a line H and a vector v with H + <v> = F_2^2;
        // two vertices span an edge iff the two vectors are independent
        // and each H is the span of the other vector.
        let nonzero = [0b01u8, 0b10, 0b11];
        let mut vertices = Vec::new();
        for &v in &nonzero {
            for &h in &nonzero {
                if h != v {
                    vertices.push((h, v));
                }
            }
        }
        assert_eq!(vertices.len(), 6);
        let mut edges = 0;
        for a in 0..vertices.len() {
            for b in a + 1..vertices.len() {
                let (h0, v0) = vertices[a];
                let (h1, v1) = vertices[b];
                if v0 != v1 && h0 == v1 && h1 == v0 {
                    edges += 1;
                }
            }
        }
        assert_eq!(edges, 3);

        let gl = Family::gl(2).unwrap();
        let s = build_sn(&gl, 2).unwrap();
        assert_eq!(s.counts(), vec![6, 3]);
    }

    #[test]
    fn sn_single_point_at_rank_1() {
        let s = build_sn(&Family::symmetric(), 1).unwrap();
        assert_eq!(s.counts(), vec![1]);
    }

    #[test]
    fn hypotheses_pass_for_symmetric_and_gl() {
        for n in 1..=5 {
            let report = check_hypotheses(&Family::symmetric(), n, n - 1).unwrap();
            assert!(report.passed());
        }
        let report = check_hypotheses(&Family::gl(2).unwrap(), 3, 2).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn stabilizer_orders_match_orbit_stabilizer() {
        let sym = Family::symmetric();
        let report = check_hypotheses(&sym, 4, 3).unwrap();
        // Base 2-simplex stabilizer has order |Sigma_1| = 1.
        assert_eq!(report.levels[2].stabilizer_order, 1);
        // Base 0-simplex stabilizer has order |Sigma_3| = 6.
        assert_eq!(report.levels[0].stabilizer_order, 6);
        let gl = Family::gl(2).unwrap();
        let report = check_hypotheses(&gl, 3, 1).unwrap();
        assert_eq!(report.levels[0].stabilizer_order, 6);
    }

    #[test]
    fn hypothesis_failure_refuses_build() {
        // A fabricated report with a failing level produces the structured
        // error that build_wn propagates.
        let report = HypothesesReport {
            family: "symmetric".into(),
            rank: 3,
            levels: vec![LevelHypotheses {
                p: 0,
                transitive: true,
                stabilization_injective: false,
                stabilizer_order: 1,
                expected_order: 2,
                stabilizer_is_stabilized_image: false,
            }],
        };
        match report.first_failure() {
            Some(Error::Hypothesis { condition, .. }) => {
                assert!(condition.contains("injectivity"));
            }
            other => panic!("expected hypothesis error, got {other:?}"),
        }
    }

    #[test]
    fn incidence_export_format() {
        let iw = injective_words(2);
        let mut buf = Vec::new();
        iw.write_incidence(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "0 0 :");
        assert_eq!(lines[1], "0 1 :");
        assert!(lines[2].starts_with("1 0 : "));
        assert_eq!(lines.len(), 4);
    }
}
