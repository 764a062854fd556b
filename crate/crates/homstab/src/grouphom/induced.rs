//! Induced maps on group homology through bar functoriality.
//!
//! A homomorphism applied entrywise to bar tuples (killing tuples that
//! pick up the identity) together with an equivariant coefficient map is
//! a chain map; its effect on homology is read off against Smith-normal
//! presentations of source and target. Only the bar tier computes honest
//! map verdicts; the resolution tier compares isomorphism types.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::bar::{bar_complex, bar_tuple_count, non_identity_elements, tuple_index, BarCaps};
use super::group::{FiniteGroup, GroupHom};
use super::module::{GModule, IntMat, Scalars};
use crate::homology::{ChainComplex, HomologySummand, SparseIntMatrix};
use crate::{Error, Result};

/// Verdict on an induced map between homology groups.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum MapVerdict {
    Iso,
    SurjectionOnly,
    Neither,
}

/// An induced map on `H_i` with its verdict and the groups involved.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub degree: usize,
    pub verdict: MapVerdict,
    pub source: HomologySummand,
    pub target: HomologySummand,
    /// Matrix in Smith coordinates: target coordinates of the images of
    /// the source presentation generators.
    pub matrix: Vec<Vec<BigInt>>,
}

/// Presentation of `H_i` of an integer chain complex in Smith-normal
/// coordinates, with enough data to locate the class of any cycle.
pub struct HomologyPresentation {
    pub degree: usize,
    /// Kernel lattice basis of the boundary, dense columns.
    kernel: Vec<Vec<BigInt>>,
    solver: super::resolution::EchelonSolver,
    /// Coordinate change: class coordinates are `u_mat * (kernel coords)`.
    u_mat: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    /// One divisor per coordinate: 0 means free, d >= 1 means `Z/d`.
    pub divisors: Vec<BigInt>,
}

impl HomologyPresentation {
    pub fn build(complex: &ChainComplex, degree: usize) -> Result<HomologyPresentation> {
        let dims = &complex.dims;
        let kernel: Vec<Vec<BigInt>> = match complex.boundary(degree) {
            Some(b) => densify(super::resolution::sparse_kernel_basis(b), dims[degree]),
            None => identity_basis(dims[degree]),
        };
        let z = kernel.len();
        let solver = super::resolution::EchelonSolver::new(&kernel);
        // Relations: boundaries from one degree up, in kernel coordinates.
        let mut relations: Vec<Vec<BigInt>> = Vec::new();
        if let Some(up) = complex.boundary(degree + 1) {
            let mut cols: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); up.cols()]; dims[degree]];
            for (r, c, v) in up.entries() {
                cols[*r as usize][*c as usize] = v.clone();
            }
            for c in 0..up.cols() {
                let col: Vec<BigInt> = (0..dims[degree]).map(|r| cols[r][c].clone()).collect();
                let y = solver.solve(&col).ok_or_else(|| {
                    Error::Integrity("boundary image escapes the cycle lattice".into())
                })?;
                relations.push(y);
            }
        }
        let (u_mat, u_inv, diag) = smith_with_left_transform(z, &relations);
        let mut divisors = vec![BigInt::zero(); z];
        for (i, d) in diag.into_iter().enumerate() {
            divisors[i] = d;
        }
        Ok(HomologyPresentation { degree, kernel, solver, u_mat, u_inv, divisors })
    }

    pub fn summand(&self) -> HomologySummand {
        HomologySummand {
            degree: self.degree as i64,
            betti: self.divisors.iter().filter(|d| d.is_zero()).count(),
            torsion: {
                let mut t: Vec<BigInt> = self
                    .divisors
                    .iter()
                    .filter(|d| !d.is_zero() && !d.is_one())
                    .cloned()
                    .collect();
                t.sort();
                t
            },
        }
    }

    /// A cycle representing the presentation generator `j`.
    pub fn generator_cycle(&self, j: usize) -> Vec<BigInt> {
        let c = self.kernel.first().map(|k| k.len()).unwrap_or(0);
        let mut cycle = vec![BigInt::zero(); c];
        for (t, col) in self.kernel.iter().enumerate() {
            let coef = &self.u_inv[t][j];
            if coef.is_zero() {
                continue;
            }
            for (r, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    cycle[r] += coef * v;
                }
            }
        }
        cycle
    }

    /// Smith coordinates of the class of a cycle.
    pub fn class_coords(&self, cycle: &[BigInt]) -> Result<Vec<BigInt>> {
        let u = self
            .solver
            .solve(cycle)
            .ok_or_else(|| Error::Integrity("vector is not a cycle".into()))?;
        let z = self.kernel.len();
        let mut w = vec![BigInt::zero(); z];
        for i in 0..z {
            for (j, uj) in u.iter().enumerate() {
                if !uj.is_zero() && !self.u_mat[i][j].is_zero() {
                    w[i] += &self.u_mat[i][j] * uj;
                }
            }
            if !self.divisors[i].is_zero() {
                w[i] = w[i].mod_floor(&self.divisors[i]);
            }
        }
        Ok(w)
    }
}

fn densify(sparse: Vec<Vec<(u32, BigInt)>>, dim: usize) -> Vec<Vec<BigInt>> {
    sparse
        .into_iter()
        .map(|sv| {
            let mut dense = vec![BigInt::zero(); dim];
            for (i, v) in sv {
                dense[i as usize] = v;
            }
            dense
        })
        .collect()
}

fn identity_basis(dim: usize) -> Vec<Vec<BigInt>> {
    (0..dim)
        .map(|i| {
            let mut e = vec![BigInt::zero(); dim];
            e[i] = BigInt::one();
            e
        })
        .collect()
}

/// Smith normal form of the relation set with left transform tracking:
/// returns `(U, U^{-1}, diagonal)` with `U * relations * V = diag`.
fn smith_with_left_transform(
    z: usize,
    relations: &[Vec<BigInt>],
) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>, Vec<BigInt>) {
    let cols = relations.len();
    let mut a: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); cols]; z];
    for (c, rel) in relations.iter().enumerate() {
        for (r, v) in rel.iter().enumerate() {
            a[r][c] = v.clone();
        }
    }
    let mut u: Vec<Vec<BigInt>> = (0..z)
        .map(|i| {
            let mut row = vec![BigInt::zero(); z];
            row[i] = BigInt::one();
            row
        })
        .collect();
    let mut u_inv = u.clone();
    let mut diag = Vec::new();
    let mut t = 0usize;

    'outer: loop {
        if t >= z || t >= cols {
            break;
        }
        // Least nonzero entry in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..z {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && pivot
                        .map(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != t {
            a.swap(t, pi);
            u.swap(t, pi);
            for row in u_inv.iter_mut() {
                row.swap(t, pi);
            }
        }
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
        }
        let mut dirty = false;
        for i in t + 1..z {
            if !a[i][t].is_zero() {
                let q = &a[i][t] / &a[t][t];
                if !q.is_zero() {
                    for j in t..cols {
                        let sub = &q * &a[t][j];
                        a[i][j] -= sub;
                    }
                    for j in 0..z {
                        let sub = &q * &u[t][j];
                        u[i][j] -= sub;
                        // u_inv: column t gains q * column i.
                    }
                    for row in u_inv.iter_mut() {
                        let add = &q * &row[i];
                        row[t] += add;
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
        }
        for j in t + 1..cols {
            if !a[t][j].is_zero() {
                let q = &a[t][j] / &a[t][t];
                if !q.is_zero() {
                    for i in t..z {
                        let sub = &q * &a[i][t];
                        a[i][j] -= sub;
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue 'outer;
        }
        // Divisibility of the trailing block.
        for i in t + 1..z {
            for j in t + 1..cols {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    // Add row i to row t and restart the pivot hunt.
                    for jj in 0..cols {
                        let add = a[i][jj].clone();
                        a[t][jj] += add;
                    }
                    for jj in 0..z {
                        let add = u[i][jj].clone();
                        u[t][jj] += add;
                    }
                    for row in u_inv.iter_mut() {
                        let sub = row[t].clone();
                        row[i] -= sub;
                    }
                    continue 'outer;
                }
            }
        }
        if a[t][t].sign() == num_bigint::Sign::Minus {
            for j in t..cols {
                a[t][j] = -a[t][j].clone();
            }
            for j in 0..z {
                u[t][j] = -u[t][j].clone();
            }
            for row in u_inv.iter_mut() {
                row[t] = -row[t].clone();
            }
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    (u, u_inv, diag)
}

/// Functorial chain map on degree-`k` bar chains.
fn bar_chain_map(
    src: (&FiniteGroup, &GModule),
    tgt: (&FiniteGroup, &GModule),
    hom: &GroupHom,
    compat: &IntMat,
    k: usize,
) -> Result<SparseIntMatrix> {
    let (gs, ms) = src;
    let (gt, mt) = tgt;
    let qs = gs.order() - 1;
    let qt = gt.order() - 1;
    let tuples_s = bar_tuple_count(gs.order(), k).expect("checked by caller");
    let tuples_t = bar_tuple_count(gt.order(), k).expect("checked by caller");
    let non_id_s = non_identity_elements(gs);
    let non_id_t = non_identity_elements(gt);
    let rows = tuples_t * mt.dim;
    let cols = tuples_s * ms.dim;
    let mut triplets = Vec::new();
    let mut digits = vec![0usize; k];
    let mut image = vec![0usize; k];
    for t in 0..tuples_s {
        let mut rest = t;
        for slot in (0..k).rev() {
            digits[slot] = rest % qs;
            rest /= qs;
        }
        let mut dies = false;
        for slot in 0..k {
            let g = non_id_s[digits[slot]];
            let h = hom.map[g as usize];
            if h == gt.identity {
                dies = true;
                break;
            }
            image[slot] = non_id_t.binary_search(&h).expect("non-identity image");
        }
        if dies {
            continue;
        }
        let target = tuple_index(&image, qt);
        for c in 0..ms.dim {
            for r in 0..mt.dim {
                let v = compat.get(r, c);
                if v != 0 {
                    triplets.push((target * mt.dim + r, t * ms.dim + c, BigInt::from(v)));
                }
            }
        }
    }
    SparseIntMatrix::from_triplets(rows, cols, triplets)
}

/// Check that `compat` intertwines the two actions over `hom`.
pub fn verify_equivariant(
    src: (&FiniteGroup, &GModule),
    tgt: (&FiniteGroup, &GModule),
    hom: &GroupHom,
    compat: &IntMat,
) -> Result<()> {
    let (gs, ms) = src;
    let (gt, mt) = tgt;
    if compat.rows != mt.dim || compat.cols != ms.dim {
        return Err(Error::InvalidInput("coefficient map has wrong shape".into()));
    }
    for g in 0..gs.order() as u32 {
        let lhs = compat.mul(&ms.act(g));
        let rhs = mt.act(hom.map[g as usize]).mul(compat);
        let equal = match (ms.scalars, mt.scalars) {
            (Scalars::Int, Scalars::Int) => lhs == rhs,
            (Scalars::Fp(p), Scalars::Fp(q)) if p == q => {
                lhs.data.iter().zip(&rhs.data).all(|(a, b)| (a - b).rem_euclid(p as i64) == 0)
            }
            _ => return Err(Error::InvalidInput("coefficient scalars mismatch".into())),
        };
        if !equal {
            return Err(Error::InvalidInput(format!(
                "coefficient map is not equivariant at element {g}"
            )));
        }
    }
    Ok(())
}

/// Induced map on `H_i` along `hom` with coefficient map `compat`,
/// computed through the bar construction. Integer scalars only.
pub fn induced_map(
    src: (&FiniteGroup, &GModule),
    tgt: (&FiniteGroup, &GModule),
    hom: &GroupHom,
    compat: &IntMat,
    degree: usize,
    caps: &BarCaps,
) -> Result<InducedMap> {
    if !matches!(src.1.scalars, Scalars::Int) || !matches!(tgt.1.scalars, Scalars::Int) {
        return Err(Error::Unsupported(
            "induced maps are computed over integer coefficients".into(),
        ));
    }
    verify_equivariant(src, tgt, hom, compat)?;
    let c_src = bar_complex(src.0, src.1, degree + 1, caps)?;
    let c_tgt = bar_complex(tgt.0, tgt.1, degree + 1, caps)?;
    let p_src = HomologyPresentation::build(&c_src, degree)?;
    let p_tgt = HomologyPresentation::build(&c_tgt, degree)?;
    let f = bar_chain_map(src, tgt, hom, compat, degree)?;

    let z_s = p_src.divisors.len();
    let z_t = p_tgt.divisors.len();
    let mut matrix: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); z_s]; z_t];
    for j in 0..z_s {
        let cycle = p_src.generator_cycle(j);
        let image = apply_sparse(&f, &cycle);
        let coords = p_tgt.class_coords(&image)?;
        for i in 0..z_t {
            matrix[i][j] = coords[i].clone();
        }
    }

    let source = p_src.summand();
    let target = p_tgt.summand();
    let surjective = is_surjective(&matrix, &p_tgt.divisors);
    let same_type = source.betti == target.betti && source.torsion == target.torsion;
    let verdict = if surjective && same_type {
        MapVerdict::Iso
    } else if surjective {
        MapVerdict::SurjectionOnly
    } else {
        MapVerdict::Neither
    };
    Ok(InducedMap { degree, verdict, source, target, matrix })
}

fn apply_sparse(m: &SparseIntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); m.rows()];
    for (r, c, val) in m.entries() {
        let x = &v[*c as usize];
        if !x.is_zero() {
            out[*r as usize] += val * x;
        }
    }
    out
}

/// Cokernel test: the map is onto iff the matrix columns together with
/// the target relations present the zero group.
fn is_surjective(matrix: &[Vec<BigInt>], target_divisors: &[BigInt]) -> bool {
    let z_t = target_divisors.len();
    let z_s = matrix.first().map(|r| r.len()).unwrap_or(0);
    let mut triplets = Vec::new();
    for (r, row) in matrix.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if !v.is_zero() {
                triplets.push((r, c, v.clone()));
            }
        }
    }
    let mut col = z_s;
    for (r, d) in target_divisors.iter().enumerate() {
        if !d.is_zero() {
            triplets.push((r, col, d.clone()));
            col += 1;
        }
    }
    if z_t == 0 {
        return true;
    }
    let m = SparseIntMatrix::from_triplets(z_t, col.max(1), triplets).expect("triplets in range");
    let snf = crate::homology::smith_normal_form(&m);
    snf.rank == z_t && snf.divisors.iter().all(|d| d.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;

    fn trivial_z() -> GModule {
        GModule::trivial(Scalars::Int, 1, "Z")
    }

    #[test]
    fn identity_homomorphism_induces_identity_verdict() {
        let s3 = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        let m = trivial_z();
        for degree in 0..=2 {
            let r = induced_map(
                (&s3, &m),
                (&s3, &m),
                &GroupHom::identity_hom(&s3),
                &IntMat::identity(1),
                degree,
                &BarCaps::default(),
            )
            .unwrap();
            assert_eq!(r.verdict, MapVerdict::Iso, "degree {degree}");
        }
    }

    #[test]
    fn stabilization_sigma2_to_sigma3_is_iso_on_h1() {
        let sym = Family::symmetric();
        let s2 = FiniteGroup::from_family(&sym, 2).unwrap();
        let s3 = FiniteGroup::from_family(&sym, 3).unwrap();
        let hom = GroupHom::stabilization(&s2, &s3).unwrap();
        let m = trivial_z();
        let r = induced_map((&s2, &m), (&s3, &m), &hom, &IntMat::identity(1), 1, &BarCaps::default())
            .unwrap();
        assert_eq!(r.source.torsion, vec![BigInt::from(2)]);
        assert_eq!(r.target.torsion, vec![BigInt::from(2)]);
        assert_eq!(r.verdict, MapVerdict::Iso);
    }

    #[test]
    fn inclusion_a3_into_sigma3_is_neither_on_h1() {
        // H_1(A_3) = Z/3 -> H_1(Sigma_3) = Z/2 must be the zero map.
        let sym = Family::symmetric();
        let s3 = FiniteGroup::from_family(&sym, 3).unwrap();
        let a3 = s3.commutator_subgroup().unwrap();
        let hom = GroupHom::inclusion(&a3, &s3).unwrap();
        let m = trivial_z();
        let r = induced_map((&a3, &m), (&s3, &m), &hom, &IntMat::identity(1), 1, &BarCaps::default())
            .unwrap();
        assert_eq!(r.source.torsion, vec![BigInt::from(3)]);
        assert_eq!(r.target.torsion, vec![BigInt::from(2)]);
        assert_eq!(r.verdict, MapVerdict::Neither);
        // The matrix is zero on the torsion generator.
        for row in &r.matrix {
            for v in row {
                assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn functoriality_composes_on_stabilizations() {
        let sym = Family::symmetric();
        let s2 = FiniteGroup::from_family(&sym, 2).unwrap();
        let s3 = FiniteGroup::from_family(&sym, 3).unwrap();
        let s4 = FiniteGroup::from_family(&sym, 4).unwrap();
        let phi = GroupHom::stabilization(&s2, &s3).unwrap();
        let psi = GroupHom::stabilization(&s3, &s4).unwrap();
        let chained = phi.compose(&psi);
        let m = trivial_z();
        let caps = BarCaps::default();
        let direct =
            induced_map((&s2, &m), (&s4, &m), &chained, &IntMat::identity(1), 1, &caps).unwrap();
        let first =
            induced_map((&s2, &m), (&s3, &m), &phi, &IntMat::identity(1), 1, &caps).unwrap();
        let second =
            induced_map((&s3, &m), (&s4, &m), &psi, &IntMat::identity(1), 1, &caps).unwrap();
        assert_eq!(direct.verdict, MapVerdict::Iso);
        assert_eq!(first.verdict, MapVerdict::Iso);
        assert_eq!(second.verdict, MapVerdict::Iso);
        // Verdicts compose: iso after iso stays iso, and the composed
        // matrix agrees modulo the target relations.
        let z_t = direct.matrix.len();
        let z_mid = second.matrix.first().map(|r| r.len()).unwrap_or(0);
        let z_s = first.matrix.first().map(|r| r.len()).unwrap_or(0);
        for i in 0..z_t {
            for j in 0..z_s {
                let mut acc = BigInt::zero();
                for k in 0..z_mid {
                    acc += &second.matrix[i][k] * &first.matrix[k][j];
                }
                let composed = &direct.matrix[i][j];
                // The target H_1 here is Z/2, so classes agree mod 2.
                let diff = &acc - composed;
                assert!((&diff % BigInt::from(2)).is_zero(), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn non_equivariant_coefficient_map_rejected() {
        let sym = Family::symmetric();
        let s3 = FiniteGroup::from_family(&sym, 3).unwrap();
        let sign = GModule::sign(&s3).unwrap();
        let triv = trivial_z();
        // The identity Z -> Z is not equivariant from trivial to sign.
        let err = verify_equivariant(
            (&s3, &triv),
            (&s3, &sign),
            &GroupHom::identity_hom(&s3),
            &IntMat::identity(1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
