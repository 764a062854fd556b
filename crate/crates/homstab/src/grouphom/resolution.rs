//! Free resolutions of the trivial module over the group ring, built
//! degree by degree, and group homology read off from them.
//!
//! The boundary out of degree 1 is spanned by `s - e` over the group's
//! generators. At each later degree the integer (or `F_p`) kernel of the
//! previous boundary is computed as a lattice, and module generators are
//! selected greedily: a kernel basis vector joins the generating set
//! whenever it is not yet in the span of the group translates of the
//! vectors chosen so far. Exactness holds by construction and is
//! re-verified by rank accounting in tests.
//!
//! Homology needs no generators above the target degree: by exactness the
//! image of the tensored-down boundary out of degree `d+1` equals the
//! projection of the kernel of the full boundary at degree `d`, so
//! `H_d = ker(tensored d_d) / proj(ker d_d)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::group::FiniteGroup;
use super::module::{GModule, Scalars};
use crate::homology::modular::{mod_inv, BitMat, FpMat};
use crate::homology::{smith_normal_form, HomologySummand, SparseIntMatrix};
use crate::{Error, Result};

/// Caps for the resolution tier.
#[derive(Clone, Copy, Debug)]
pub struct ResolutionCaps {
    pub group_order: usize,
    pub max_entries: usize,
}

impl Default for ResolutionCaps {
    fn default() -> Self {
        ResolutionCaps { group_order: 10_000, max_entries: 10_000_000 }
    }
}

/// A group-ring vector: entries `(component, element, coefficient)`.
pub type GVec = Vec<(u32, u32, BigInt)>;

type SparseVec = Vec<(u32, BigInt)>;

/// Group homology through degree `i_max` via the resolution method.
pub fn resolution_homology(
    group: &FiniteGroup,
    module: &GModule,
    i_max: usize,
    caps: &ResolutionCaps,
) -> Result<Vec<HomologySummand>> {
    if group.order() > caps.group_order {
        return Err(Error::Resource {
            what: format!("resolution tier |G| for {}", group.family.name()),
            size: group.order() as u128,
            cap: caps.group_order as u128,
        });
    }
    match module.scalars {
        Scalars::Int => homology_over_z(group, module, i_max, caps),
        Scalars::Fp(2) => homology_over_f2(group, module, i_max, caps),
        Scalars::Fp(p) => homology_over_fp(group, module, i_max, p, caps),
    }
}

// ---------------------------------------------------------------------
// Integer path
// ---------------------------------------------------------------------

fn homology_over_z(
    group: &FiniteGroup,
    module: &GModule,
    i_max: usize,
    caps: &ResolutionCaps,
) -> Result<Vec<HomologySummand>> {
    let order = group.order();
    let dim = module.dim;
    let mut summands = Vec::with_capacity(i_max + 1);

    // Degree 0: quotient of M by the projections of the augmentation
    // ideal, whose Z-basis is {g - e}.
    let aug_ideal: Vec<SparseVec> = (0..order as u32)
        .filter(|&g| g != group.identity)
        .map(|g| {
            let mut v: SparseVec =
                vec![(g, BigInt::one()), (group.identity, -BigInt::one())];
            v.sort_by_key(|e| e.0);
            v
        })
        .collect();
    let kernel0: Vec<Vec<BigInt>> = (0..dim)
        .map(|i| {
            let mut e = vec![BigInt::zero(); dim];
            e[i] = BigInt::one();
            e
        })
        .collect();
    let l0 = project_all(group, module, 1, &aug_ideal);
    summands.push(z_quotient(0, kernel0, l0));

    let mut gens: Vec<GVec> = group
        .generators
        .iter()
        .map(|&s| {
            vec![(0u32, s, BigInt::one()), (0u32, group.identity, -BigInt::one())]
        })
        .collect();
    let mut prev_rank = 1usize;

    for d in 1..=i_max {
        let rank_d = gens.len();
        guard_size(order, prev_rank, rank_d, caps)?;
        let full = full_boundary(group, prev_rank, &gens)?;
        let kernel_full = sparse_kernel_basis(&full);
        let small = tensored_boundary(group, module, prev_rank, &gens);
        let kernel_small = dense_kernel(&small);
        let l = project_all(group, module, rank_d, &kernel_full);
        summands.push(z_quotient(d as i64, kernel_small, l));
        if d < i_max {
            let next = greedy_generators_z(group, &kernel_full);
            prev_rank = rank_d;
            gens = next;
        }
    }
    Ok(summands)
}

fn guard_size(
    order: usize,
    prev_rank: usize,
    rank: usize,
    caps: &ResolutionCaps,
) -> Result<()> {
    let cells = order
        .checked_mul(prev_rank.max(rank))
        .and_then(|v| v.checked_mul(8))
        .unwrap_or(usize::MAX);
    if cells > caps.max_entries {
        return Err(Error::Resource {
            what: "resolution boundary size".into(),
            size: cells as u128,
            cap: caps.max_entries as u128,
        });
    }
    Ok(())
}

/// The full boundary `(ZG)^{rank} -> (ZG)^{prev_rank}` as an integer
/// matrix; column `(j, g)` is the left translate `g . gens[j]`.
fn full_boundary(group: &FiniteGroup, prev_rank: usize, gens: &[GVec]) -> Result<SparseIntMatrix> {
    let order = group.order();
    let rows = prev_rank * order;
    let cols = gens.len() * order;
    let mut triplets = Vec::new();
    for (j, gen) in gens.iter().enumerate() {
        for g in 0..order as u32 {
            let col = j * order + g as usize;
            for (comp, elem, coef) in gen {
                let row = *comp as usize * order + group.mul(g, *elem) as usize;
                triplets.push((row, col, coef.clone()));
            }
        }
    }
    SparseIntMatrix::from_triplets(rows, cols, triplets)
}

/// The boundary tensored down to `M^{rank} -> M^{prev_rank}`.
fn tensored_boundary(
    group: &FiniteGroup,
    module: &GModule,
    prev_rank: usize,
    gens: &[GVec],
) -> Vec<Vec<BigInt>> {
    let dim = module.dim;
    let mut mat = vec![vec![BigInt::zero(); gens.len() * dim]; prev_rank * dim];
    for (j, gen) in gens.iter().enumerate() {
        for (comp, elem, coef) in gen {
            let action = module.act_right(group, *elem);
            for r in 0..dim {
                for c in 0..dim {
                    let v = action.get(r, c);
                    if v != 0 {
                        mat[*comp as usize * dim + r][j * dim + c] += coef * BigInt::from(v);
                    }
                }
            }
        }
    }
    mat
}

/// Project kernel vectors into `M^{rank}` against every module basis
/// vector. The group translates of these projections span the image of
/// the next tensored boundary.
fn project_all(
    group: &FiniteGroup,
    module: &GModule,
    rank: usize,
    kernel: &[SparseVec],
) -> Vec<Vec<BigInt>> {
    let order = group.order();
    let dim = module.dim;
    let mut out = Vec::with_capacity(kernel.len() * dim);
    for v in kernel {
        for s in 0..dim {
            let mut w = vec![BigInt::zero(); rank * dim];
            for (pos, coef) in v {
                let comp = *pos as usize / order;
                let elem = (*pos as usize % order) as u32;
                let action = module.act_right(group, elem);
                for r in 0..dim {
                    let a = action.get(r, s);
                    if a != 0 {
                        w[comp * dim + r] += coef * BigInt::from(a);
                    }
                }
            }
            if w.iter().any(|x| !x.is_zero()) {
                out.push(w);
            }
        }
    }
    out
}

/// Homology summand `ker / span(l)` where `kernel` is a lattice basis of
/// the kernel (dense columns) and every `l` lies in it.
fn z_quotient(degree: i64, kernel: Vec<Vec<BigInt>>, l: Vec<Vec<BigInt>>) -> HomologySummand {
    let z = kernel.len();
    if z == 0 {
        return HomologySummand { degree, betti: 0, torsion: Vec::new() };
    }
    let solver = EchelonSolver::new(&kernel);
    let mut triplets = Vec::new();
    for (col, v) in l.iter().enumerate() {
        let y = solver
            .solve(v)
            .expect("image vectors lie in the kernel lattice");
        for (row, val) in y.into_iter().enumerate() {
            if !val.is_zero() {
                triplets.push((row, col, val));
            }
        }
    }
    let relations = SparseIntMatrix::from_triplets(z, l.len(), triplets)
        .expect("relation triplets in range");
    let snf = smith_normal_form(&relations);
    HomologySummand { degree, betti: z - snf.rank, torsion: snf.torsion() }
}

// Sparse column echelon over BigInt with transform tracking. The zeroed
// input columns, read off through the transform, form a lattice basis of
// the kernel.

fn column_echelon_kernel(rows: usize, input: Vec<SparseVec>) -> Vec<SparseVec> {
    let n = input.len();
    let mut cols: Vec<SparseVec> = input;
    let mut transform: Vec<SparseVec> = (0..n)
        .map(|j| vec![(j as u32, BigInt::one())])
        .collect();
    let mut is_pivot = vec![false; n];
    for r in 0..rows as u32 {
        loop {
            let mut live: Vec<usize> = (0..n)
                .filter(|&j| !is_pivot[j] && leading(&cols[j]) == Some(r))
                .collect();
            if live.is_empty() {
                break;
            }
            if live.len() == 1 {
                is_pivot[live[0]] = true;
                break;
            }
            // Reduce against the entry of least absolute value; remainders
            // shrink strictly, so this terminates.
            live.sort_by(|&a, &b| {
                let va = &cols[a][0].1;
                let vb = &cols[b][0].1;
                va.abs().cmp(&vb.abs()).then(a.cmp(&b))
            });
            let jstar = live[0];
            let pivot_val = cols[jstar][0].1.clone();
            for &j in &live[1..] {
                let q = &cols[j][0].1 / &pivot_val;
                if q.is_zero() {
                    continue;
                }
                let (cj, cs) = (cols[j].clone(), cols[jstar].clone());
                cols[j] = spv_sub_scaled(&cj, &cs, &q);
                let (tj, ts) = (transform[j].clone(), transform[jstar].clone());
                transform[j] = spv_sub_scaled(&tj, &ts, &q);
            }
        }
    }
    (0..n)
        .filter(|&j| cols[j].is_empty())
        .map(|j| transform[j].clone())
        .collect()
}

fn leading(v: &SparseVec) -> Option<u32> {
    v.first().map(|e| e.0)
}

/// `a - q * b` on sorted sparse vectors.
fn spv_sub_scaled(a: &SparseVec, b: &SparseVec, q: &BigInt) -> SparseVec {
    let mut out = SparseVec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((ia, va)), Some((ib, vb))) if ia == ib => {
                let v = va - q * vb;
                if !v.is_zero() {
                    out.push((*ia, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ia, va)), Some((ib, _))) if ia < ib => {
                out.push((*ia, va.clone()));
                i += 1;
            }
            (Some(_), Some((ib, vb))) => {
                let v = -(q * vb);
                if !v.is_zero() {
                    out.push((*ib, v));
                }
                j += 1;
            }
            (Some((ia, va)), None) => {
                out.push((*ia, va.clone()));
                i += 1;
            }
            (None, Some((ib, vb))) => {
                let v = -(q * vb);
                if !v.is_zero() {
                    out.push((*ib, v));
                }
                j += 1;
            }
            (None, None) => break,
        }
    }
    out
}

/// Lattice basis of the kernel of a sparse integer matrix.
pub(crate) fn sparse_kernel_basis(m: &SparseIntMatrix) -> Vec<SparseVec> {
    let mut cols: Vec<SparseVec> = vec![Vec::new(); m.cols()];
    for (r, c, v) in m.entries() {
        cols[*c as usize].push((*r, v.clone()));
    }
    for col in &mut cols {
        col.sort_by_key(|e| e.0);
    }
    column_echelon_kernel(m.rows(), cols)
}

/// Forward-substitution solver over an echelonized lattice basis.
pub(crate) struct EchelonSolver {
    echelon: Vec<SparseVec>,
    transform: Vec<SparseVec>,
    width: usize,
}

impl EchelonSolver {
    pub(crate) fn new(basis: &[Vec<BigInt>]) -> EchelonSolver {
        let n = basis.len();
        let mut cols: Vec<SparseVec> = Vec::with_capacity(n);
        for b in basis {
            let col: SparseVec = b
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i as u32, v.clone()))
                .collect();
            cols.push(col);
        }
        let rows = basis.first().map(|b| b.len()).unwrap_or(0);
        // Echelonize while keeping track of how echelon columns combine
        // the original basis.
        let mut transform: Vec<SparseVec> =
            (0..n).map(|j| vec![(j as u32, BigInt::one())]).collect();
        for r in 0..rows as u32 {
            loop {
                let live: Vec<usize> = (0..n)
                    .filter(|&j| leading(&cols[j]) == Some(r))
                    .collect();
                if live.len() <= 1 {
                    break;
                }
                let jstar = *live
                    .iter()
                    .min_by(|&&a, &&b| cols[a][0].1.abs().cmp(&cols[b][0].1.abs()).then(a.cmp(&b)))
                    .unwrap();
                let pivot_val = cols[jstar][0].1.clone();
                for &j in &live {
                    if j == jstar {
                        continue;
                    }
                    let q = &cols[j][0].1 / &pivot_val;
                    if q.is_zero() {
                        continue;
                    }
                    let (cj, cs) = (cols[j].clone(), cols[jstar].clone());
                    cols[j] = spv_sub_scaled(&cj, &cs, &q);
                    let (tj, ts) = (transform[j].clone(), transform[jstar].clone());
                    transform[j] = spv_sub_scaled(&tj, &ts, &q);
                }
            }
        }
        EchelonSolver { echelon: cols, transform, width: n }
    }

    /// Solve `basis * y = v` exactly; `None` when `v` is outside the
    /// lattice.
    pub(crate) fn solve(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut residue: SparseVec = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i as u32, x.clone()))
            .collect();
        let mut y_echelon: Vec<BigInt> = vec![BigInt::zero(); self.width];
        while let Some(&(row, ref val)) = residue.first() {
            let j = (0..self.width).find(|&j| leading(&self.echelon[j]) == Some(row))?;
            let lead = &self.echelon[j][0].1;
            let (q, rem) = val.div_rem(lead);
            if !rem.is_zero() {
                return None;
            }
            y_echelon[j] = q.clone();
            residue = spv_sub_scaled(&residue, &self.echelon[j], &q);
        }
        // y = transform * y_echelon.
        let mut y = vec![BigInt::zero(); self.width];
        for (j, coef) in y_echelon.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (orig, w) in &self.transform[j] {
                y[*orig as usize] += coef * w;
            }
        }
        Some(y)
    }
}

fn dense_kernel(mat: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let rows = mat.len();
    let cols = mat.first().map(|r| r.len()).unwrap_or(0);
    let sparse_cols: Vec<SparseVec> = (0..cols)
        .map(|c| {
            (0..rows)
                .filter(|&r| !mat[r][c].is_zero())
                .map(|r| (r as u32, mat[r][c].clone()))
                .collect()
        })
        .collect();
    column_echelon_kernel(rows, sparse_cols)
        .into_iter()
        .map(|sv| {
            let mut dense = vec![BigInt::zero(); cols];
            for (i, v) in sv {
                dense[i as usize] = v;
            }
            dense
        })
        .collect()
}

// Echelonized integer lattice with membership and insertion.

#[derive(Default)]
struct IntLattice {
    basis: BTreeMap<u32, SparseVec>,
}

impl IntLattice {
    fn contains(&self, v: &SparseVec) -> bool {
        let mut work = v.clone();
        while let Some(&(row, ref val)) = work.first() {
            let Some(b) = self.basis.get(&row) else { return false };
            let (q, rem) = val.div_rem(&b[0].1);
            if !rem.is_zero() {
                return false;
            }
            work = spv_sub_scaled(&work, b, &q);
        }
        true
    }

    /// Insert, returning whether the lattice grew.
    fn insert(&mut self, v: SparseVec) -> bool {
        let mut work = v;
        let mut changed = false;
        while let Some(&(row, ref val)) = work.first() {
            match self.basis.get(&row) {
                None => {
                    self.basis.insert(row, work);
                    return true;
                }
                Some(b) => {
                    let bp = b[0].1.clone();
                    let (q, rem) = val.div_rem(&bp);
                    if rem.is_zero() {
                        work = spv_sub_scaled(&work, b, &q);
                    } else {
                        // gcd combine: replace the basis vector so its
                        // pivot divides both, push the residual down.
                        let e = bp.extended_gcd(val);
                        let (g, s, t) = (e.gcd, e.x, e.y);
                        let b_old = b.clone();
                        let new_b = spv_add_scaled(
                            &spv_scale(&b_old, &s),
                            &spv_scale(&work, &t),
                            &BigInt::one(),
                        );
                        let coef_b = val / &g;
                        let coef_w = &bp / &g;
                        let new_work =
                            spv_sub_scaled(&spv_scale(&work, &coef_w), &spv_scale(&b_old, &coef_b), &BigInt::one());
                        self.basis.insert(row, new_b);
                        work = new_work;
                        changed = true;
                    }
                }
            }
        }
        changed
    }
}

fn spv_scale(v: &SparseVec, c: &BigInt) -> SparseVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x * c)).collect()
}

/// `a + c * b`
fn spv_add_scaled(a: &SparseVec, b: &SparseVec, c: &BigInt) -> SparseVec {
    spv_sub_scaled(a, b, &(-c))
}

/// Greedy module-generator selection: a kernel basis vector is adopted
/// whenever it is not in the lattice spanned by the group translates of
/// the vectors adopted so far.
fn greedy_generators_z(group: &FiniteGroup, kernel: &[SparseVec]) -> Vec<GVec> {
    let order = group.order();
    let mut lattice = IntLattice::default();
    let mut gens: Vec<GVec> = Vec::new();
    for v in kernel {
        if lattice.contains(v) {
            continue;
        }
        gens.push(
            v.iter()
                .map(|(pos, coef)| {
                    let comp = *pos / order as u32;
                    let elem = *pos % order as u32;
                    (comp, elem, coef.clone())
                })
                .collect(),
        );
        for g in 0..order as u32 {
            let mut translated: SparseVec = v
                .iter()
                .map(|(pos, coef)| {
                    let comp = *pos / order as u32;
                    let elem = *pos % order as u32;
                    (comp * order as u32 + group.mul(g, elem), coef.clone())
                })
                .collect();
            translated.sort_by_key(|e| e.0);
            lattice.insert(translated);
        }
    }
    gens
}

// ---------------------------------------------------------------------
// F_2 path (bit packed)
// ---------------------------------------------------------------------

type F2Vec = Vec<u64>; // bit vector

fn f2_get(v: &F2Vec, i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

fn f2_xor(a: &mut F2Vec, b: &F2Vec) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

fn f2_leading(v: &F2Vec) -> Option<usize> {
    for (w, word) in v.iter().enumerate() {
        if *word != 0 {
            return Some(w * 64 + word.trailing_zeros() as usize);
        }
    }
    None
}

#[derive(Default)]
struct F2Span {
    basis: BTreeMap<usize, F2Vec>,
}

impl F2Span {
    fn reduce(&self, v: &F2Vec) -> F2Vec {
        let mut work = v.clone();
        while let Some(lead) = f2_leading(&work) {
            match self.basis.get(&lead) {
                Some(b) => f2_xor(&mut work, b),
                None => break,
            }
        }
        work
    }

    fn insert(&mut self, v: F2Vec) -> bool {
        let reduced = self.reduce(&v);
        match f2_leading(&reduced) {
            Some(lead) => {
                self.basis.insert(lead, reduced);
                true
            }
            None => false,
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Generators over `F_2G`: component and element per term (coefficients
/// are all 1).
type GVec2 = Vec<(u32, u32)>;

fn homology_over_f2(
    group: &FiniteGroup,
    module: &GModule,
    i_max: usize,
    caps: &ResolutionCaps,
) -> Result<Vec<HomologySummand>> {
    let order = group.order();
    let dim = module.dim;
    let mut summands = Vec::with_capacity(i_max + 1);

    let aug_ideal: Vec<GVec2> = (0..order as u32)
        .filter(|&g| g != group.identity)
        .map(|g| vec![(0u32, g), (0u32, group.identity)])
        .collect();
    summands.push(f2_quotient_summand(0, dim, &f2_identity_basis(dim), {
        let mut span = F2Span::default();
        for v in &aug_ideal {
            for s in 0..dim {
                span.insert(f2_project(group, module, 1, v, s));
            }
        }
        span
    }));

    let mut gens: Vec<GVec2> = group
        .generators
        .iter()
        .map(|&s| vec![(0u32, s), (0u32, group.identity)])
        .collect();
    let mut prev_rank = 1usize;

    for d in 1..=i_max {
        let rank_d = gens.len();
        guard_size(order, prev_rank, rank_d, caps)?;
        // Full boundary as a bit matrix.
        let mut full = BitMat::zero(prev_rank * order, rank_d * order);
        for (j, gen) in gens.iter().enumerate() {
            for g in 0..order as u32 {
                let col = j * order + g as usize;
                for (comp, elem) in gen {
                    let row = *comp as usize * order + group.mul(g, *elem) as usize;
                    let cur = full.get(row, col);
                    full.set(row, col, !cur);
                }
            }
        }
        let kernel_full = full.kernel_basis();
        // Tensored boundary over F_2.
        let mut small = BitMat::zero(prev_rank * dim, rank_d * dim);
        for (j, gen) in gens.iter().enumerate() {
            for (comp, elem) in gen {
                let action = module.act_right(group, *elem);
                for r in 0..dim {
                    for c in 0..dim {
                        if action.get(r, c).rem_euclid(2) == 1 {
                            let row = *comp as usize * dim + r;
                            let col = j * dim + c;
                            let cur = small.get(row, col);
                            small.set(row, col, !cur);
                        }
                    }
                }
            }
        }
        let kernel_small = small.kernel_basis();
        let mut span = F2Span::default();
        for v in &kernel_full {
            let terms = f2_terms(v, order);
            for s in 0..dim {
                span.insert(f2_project(group, module, rank_d, &terms, s));
            }
        }
        summands.push(f2_quotient_summand(d as i64, rank_d * dim, &kernel_small, span));
        if d < i_max {
            gens = f2_greedy_generators(group, rank_d, &kernel_full);
            prev_rank = rank_d;
        }
    }
    Ok(summands)
}

fn f2_identity_basis(dim: usize) -> Vec<F2Vec> {
    (0..dim)
        .map(|i| {
            let mut v = vec![0u64; dim.div_ceil(64)];
            v[i / 64] |= 1 << (i % 64);
            v
        })
        .collect()
}

fn f2_terms(v: &F2Vec, order: usize) -> GVec2 {
    let mut terms = Vec::new();
    let bits = v.len() * 64;
    for i in 0..bits {
        if f2_get(v, i) {
            terms.push(((i / order) as u32, (i % order) as u32));
        }
    }
    terms
}

fn f2_project(
    group: &FiniteGroup,
    module: &GModule,
    rank: usize,
    terms: &GVec2,
    basis_col: usize,
) -> F2Vec {
    let dim = module.dim;
    let mut w = vec![0u64; (rank * dim).div_ceil(64)];
    for (comp, elem) in terms {
        let action = module.act_right(group, *elem);
        for r in 0..dim {
            if action.get(r, basis_col).rem_euclid(2) == 1 {
                let idx = *comp as usize * dim + r;
                w[idx / 64] ^= 1 << (idx % 64);
            }
        }
    }
    w
}

fn f2_quotient_summand(degree: i64, _amb: usize, kernel: &[F2Vec], image: F2Span) -> HomologySummand {
    HomologySummand {
        degree,
        betti: kernel.len() - image.dim(),
        torsion: Vec::new(),
    }
}

fn f2_greedy_generators(group: &FiniteGroup, rank: usize, kernel: &[F2Vec]) -> Vec<GVec2> {
    let order = group.order();
    let mut span = F2Span::default();
    let mut gens = Vec::new();
    for v in kernel {
        if f2_leading(&span.reduce(v)).is_none() {
            continue;
        }
        let terms = f2_terms(v, order);
        gens.push(terms.clone());
        for g in 0..order as u32 {
            let mut translated = vec![0u64; (rank * order).div_ceil(64)];
            for (comp, elem) in &terms {
                let idx = *comp as usize * order + group.mul(g, *elem) as usize;
                translated[idx / 64] ^= 1 << (idx % 64);
            }
            span.insert(translated);
        }
    }
    gens
}

// ---------------------------------------------------------------------
// Odd prime path (dense, small groups only)
// ---------------------------------------------------------------------

fn homology_over_fp(
    group: &FiniteGroup,
    module: &GModule,
    i_max: usize,
    p: u64,
    caps: &ResolutionCaps,
) -> Result<Vec<HomologySummand>> {
    let order = group.order();
    let dim = module.dim;
    if order * dim > 4000 {
        return Err(Error::Resource {
            what: format!("dense F_{p} resolution"),
            size: (order * dim) as u128,
            cap: 4000,
        });
    }
    let mut summands = Vec::with_capacity(i_max + 1);

    let aug_ideal: Vec<Vec<(u32, u32, u64)>> = (0..order as u32)
        .filter(|&g| g != group.identity)
        .map(|g| vec![(0u32, g, 1u64), (0u32, group.identity, p - 1)])
        .collect();
    let id_basis: Vec<Vec<u64>> = (0..dim)
        .map(|i| {
            let mut v = vec![0u64; dim];
            v[i] = 1;
            v
        })
        .collect();
    let mut span0 = FpSpan::new(p);
    for v in &aug_ideal {
        for s in 0..dim {
            span0.insert(fp_project(group, module, p, 1, v, s));
        }
    }
    summands.push(HomologySummand {
        degree: 0,
        betti: id_basis.len() - span0.dim(),
        torsion: Vec::new(),
    });

    let mut gens: Vec<Vec<(u32, u32, u64)>> = group
        .generators
        .iter()
        .map(|&s| vec![(0u32, s, 1u64), (0u32, group.identity, p - 1)])
        .collect();
    let mut prev_rank = 1usize;

    for d in 1..=i_max {
        let rank_d = gens.len();
        guard_size(order, prev_rank, rank_d, caps)?;
        let mut full = FpMat::zero(p, prev_rank * order, rank_d * order);
        for (j, gen) in gens.iter().enumerate() {
            for g in 0..order as u32 {
                let col = j * order + g as usize;
                for (comp, elem, coef) in gen {
                    let row = *comp as usize * order + group.mul(g, *elem) as usize;
                    let cur = full.get(row, col);
                    full.set(row, col, (cur + coef) % p);
                }
            }
        }
        let kernel_full = full.kernel_basis();
        let mut small = FpMat::zero(p, prev_rank * dim, rank_d * dim);
        for (j, gen) in gens.iter().enumerate() {
            for (comp, elem, coef) in gen {
                let action = module.act_right(group, *elem);
                for r in 0..dim {
                    for c in 0..dim {
                        let a = action.get(r, c).rem_euclid(p as i64) as u64;
                        if a != 0 {
                            let row = *comp as usize * dim + r;
                            let col = j * dim + c;
                            let cur = small.get(row, col);
                            small.set(row, col, (cur + coef * a) % p);
                        }
                    }
                }
            }
        }
        let kernel_small = small.kernel_basis();
        let mut span = FpSpan::new(p);
        for v in &kernel_full {
            let terms = fp_terms(v, order);
            for s in 0..dim {
                span.insert(fp_project(group, module, p, rank_d, &terms, s));
            }
        }
        summands.push(HomologySummand {
            degree: d as i64,
            betti: kernel_small.len() - span.dim(),
            torsion: Vec::new(),
        });
        if d < i_max {
            gens = fp_greedy_generators(group, p, rank_d, &kernel_full);
            prev_rank = rank_d;
        }
    }
    Ok(summands)
}

struct FpSpan {
    p: u64,
    basis: BTreeMap<usize, Vec<u64>>,
}

impl FpSpan {
    fn new(p: u64) -> FpSpan {
        FpSpan { p, basis: BTreeMap::new() }
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut work = v.to_vec();
        loop {
            let Some(lead) = work.iter().position(|&x| x != 0) else { break };
            let Some(b) = self.basis.get(&lead) else { break };
            let factor = work[lead] * mod_inv(b[lead], self.p) % self.p;
            for (w, x) in work.iter_mut().zip(b) {
                *w = (*w + (self.p - factor % self.p) * x % self.p) % self.p;
            }
        }
        work
    }

    fn insert(&mut self, v: Vec<u64>) -> bool {
        let reduced = self.reduce(&v);
        match reduced.iter().position(|&x| x != 0) {
            Some(lead) => {
                self.basis.insert(lead, reduced);
                true
            }
            None => false,
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn fp_terms(v: &[u64], order: usize) -> Vec<(u32, u32, u64)> {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| ((i / order) as u32, (i % order) as u32, x))
        .collect()
}

fn fp_project(
    group: &FiniteGroup,
    module: &GModule,
    p: u64,
    rank: usize,
    terms: &[(u32, u32, u64)],
    basis_col: usize,
) -> Vec<u64> {
    let dim = module.dim;
    let mut w = vec![0u64; rank * dim];
    for (comp, elem, coef) in terms {
        let action = module.act_right(group, *elem);
        for r in 0..dim {
            let a = action.get(r, basis_col).rem_euclid(p as i64) as u64;
            if a != 0 {
                let idx = *comp as usize * dim + r;
                w[idx] = (w[idx] + coef * a) % p;
            }
        }
    }
    w
}

fn fp_greedy_generators(
    group: &FiniteGroup,
    p: u64,
    rank: usize,
    kernel: &[Vec<u64>],
) -> Vec<Vec<(u32, u32, u64)>> {
    let order = group.order();
    let mut span = FpSpan::new(p);
    let mut gens = Vec::new();
    for v in kernel {
        if span.reduce(v).iter().all(|&x| x == 0) {
            continue;
        }
        let terms = fp_terms(v, order);
        gens.push(terms.clone());
        for g in 0..order as u32 {
            let mut translated = vec![0u64; rank * order];
            for (comp, elem, coef) in &terms {
                let idx = *comp as usize * order + group.mul(g, *elem) as usize;
                translated[idx] = (translated[idx] + coef) % p;
            }
            span.insert(translated);
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;

    fn trivial_z() -> GModule {
        GModule::trivial(Scalars::Int, 1, "Z")
    }

    #[test]
    fn cyclic_group_recovers_periodic_resolution() {
        // Z/2 as Sigma_2: H_* = Z, Z/2, 0, Z/2, ...
        let z2 = FiniteGroup::from_family(&Family::symmetric(), 2).unwrap();
        let h = resolution_homology(&z2, &trivial_z(), 4, &ResolutionCaps::default()).unwrap();
        assert_eq!(h[0].betti, 1);
        assert!(h[0].torsion.is_empty());
        assert_eq!(h[1].torsion, vec![BigInt::from(2)]);
        assert_eq!(h[2].betti, 0);
        assert!(h[2].torsion.is_empty());
        assert_eq!(h[3].torsion, vec![BigInt::from(2)]);
        assert_eq!(h[4].betti, 0);
        assert!(h[4].torsion.is_empty());
    }

    #[test]
    fn sigma_3_homology_matches_bar() {
        use super::super::bar::{bar_complex, BarCaps};
        use crate::homology::homology;
        let s3 = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        let res = resolution_homology(&s3, &trivial_z(), 3, &ResolutionCaps::default()).unwrap();
        let bar = bar_complex(&s3, &trivial_z(), 4, &BarCaps::default()).unwrap();
        let bh = homology(&bar, 3).unwrap();
        for d in 0..=3 {
            let b = bh.summand(d as i64).unwrap();
            assert_eq!(res[d].betti, b.betti, "degree {d}");
            assert_eq!(res[d].torsion, b.torsion, "degree {d}");
        }
    }

    #[test]
    fn boundary_squares_to_zero_along_the_resolution() {
        // Rebuild the degree-1 and degree-2 boundaries of Sigma_3 and
        // compose them as integer matrices.
        let s3 = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        let gens1: Vec<GVec> = s3
            .generators
            .iter()
            .map(|&s| vec![(0u32, s, BigInt::one()), (0u32, s3.identity, -BigInt::one())])
            .collect();
        let d1 = full_boundary(&s3, 1, &gens1).unwrap();
        let k1 = sparse_kernel_basis(&d1);
        let gens2 = greedy_generators_z(&s3, &k1);
        assert!(!gens2.is_empty());
        let d2 = full_boundary(&s3, gens1.len(), &gens2).unwrap();
        let prod = d1.mul(&d2).unwrap();
        assert!(prod.is_zero_matrix());
        // Exactness by rank accounting: the translate span of the chosen
        // generators equals the kernel lattice.
        let rank_d1 = crate::homology::rank(&d1);
        let rank_d2 = crate::homology::rank(&d2);
        assert_eq!(rank_d2, d1.cols() - rank_d1);
    }

    #[test]
    fn f2_path_matches_z_path_mod_2() {
        let s3 = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        let hz = resolution_homology(&s3, &trivial_z(), 2, &ResolutionCaps::default()).unwrap();
        let h2 = resolution_homology(
            &s3,
            &GModule::trivial(Scalars::Fp(2), 1, "F2"),
            2,
            &ResolutionCaps::default(),
        )
        .unwrap();
        // dim H_d(F_2) = betti + 2-torsion here + 2-torsion below.
        for d in 0..=2usize {
            let t_here =
                hz[d].torsion.iter().filter(|t| (*t % BigInt::from(2)).is_zero()).count();
            let t_below = if d == 0 {
                0
            } else {
                hz[d - 1].torsion.iter().filter(|t| (*t % BigInt::from(2)).is_zero()).count()
            };
            assert_eq!(h2[d].betti, hz[d].betti + t_here + t_below, "degree {d}");
        }
    }

    #[test]
    fn f3_path_on_cyclic_3() {
        // A_3 inside Sigma_3 is Z/3.
        let s3 = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        let a3 = s3.commutator_subgroup().unwrap();
        assert_eq!(a3.order(), 3);
        let h = resolution_homology(
            &a3,
            &GModule::trivial(Scalars::Fp(3), 1, "F3"),
            3,
            &ResolutionCaps::default(),
        )
        .unwrap();
        // H_*(Z/3; F_3) is one dimensional in every degree.
        for s in &h {
            assert_eq!(s.betti, 1, "degree {}", s.degree);
        }
    }

    #[test]
    fn resolution_cap_is_enforced() {
        let s4 = FiniteGroup::from_family(&Family::symmetric(), 4).unwrap();
        let caps = ResolutionCaps { group_order: 10, max_entries: 1000 };
        assert!(matches!(
            resolution_homology(&s4, &trivial_z(), 1, &caps),
            Err(Error::Resource { .. })
        ));
    }
}

#[cfg(test)]
mod resolution_tier_tests {
    use super::*;
    use crate::families::Family;
    use std::time::Instant;

    #[test]
    fn sigma_6_h1_resolution() {
        let t = Instant::now();
        let s6 = FiniteGroup::from_family(&Family::symmetric(), 6).unwrap();
        let h = resolution_homology(
            &s6,
            &GModule::trivial(Scalars::Int, 1, "Z"),
            1,
            &ResolutionCaps::default(),
        )
        .unwrap();
        eprintln!("Sigma_6 H_1 over Z: {:?} in {:?}", h[1], t.elapsed());
        assert_eq!(h[1].betti, 0);
        assert_eq!(h[1].torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn sigma_6_h2_mod_2_resolution() {
        let t = Instant::now();
        let s6 = FiniteGroup::from_family(&Family::symmetric(), 6).unwrap();
        let h = resolution_homology(
            &s6,
            &GModule::trivial(Scalars::Fp(2), 1, "F2"),
            2,
            &ResolutionCaps::default(),
        )
        .unwrap();
        eprintln!("Sigma_6 H_* mod 2: {:?} in {:?}", h, t.elapsed());
        assert_eq!(h[1].betti, 1);
        assert_eq!(h[2].betti, 2);
    }

    #[test]
    fn gl3_f2_h1_mod_2_resolution() {
        let t = Instant::now();
        let gl3 = FiniteGroup::from_family(&Family::gl(2).unwrap(), 3).unwrap();
        let h = resolution_homology(
            &gl3,
            &GModule::trivial(Scalars::Fp(2), 1, "F2"),
            1,
            &ResolutionCaps::default(),
        )
        .unwrap();
        eprintln!("GL_3(F_2) H_1 mod 2: {:?} in {:?}", h[1], t.elapsed());
        assert_eq!(h[1].betti, 0);
    }

    #[test]
    fn alternating_h1_values() {
        let t = Instant::now();
        for (n, expected) in [(5usize, Vec::<BigInt>::new()), (6, Vec::new())] {
            let sn = FiniteGroup::from_family(&Family::symmetric(), n).unwrap();
            let an = sn.commutator_subgroup().unwrap();
            let h = resolution_homology(
                &an,
                &GModule::trivial(Scalars::Int, 1, "Z"),
                1,
                &ResolutionCaps::default(),
            )
            .unwrap();
            assert_eq!(h[1].betti, 0, "A_{n}");
            assert_eq!(h[1].torsion, expected, "A_{n}");
        }
        eprintln!("A_5, A_6 H_1: {:?}", t.elapsed());
    }
}
