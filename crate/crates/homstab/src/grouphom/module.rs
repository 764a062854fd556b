//! Coefficient modules for group homology: finitely generated free
//! `Z`-modules or `F_p` vector spaces carrying a group action, stored as
//! one invertible matrix per enumerated element.

use num_bigint::BigInt;

use super::group::FiniteGroup;
use crate::{Error, Result};

/// Dense integer matrix, row-major. Entries are interpreted mod `p` when
/// the owning module is an `F_p` module.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> IntMat {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> IntMat {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> IntMat {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        IntMat { rows: r, cols: c, data }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] = out.data[i * other.cols + j]
                        .checked_add(a.checked_mul(other.get(k, j)).expect("action entry overflow"))
                        .expect("action entry overflow");
                }
            }
        }
        out
    }

    pub fn mul_mod(&self, other: &IntMat, p: u64) -> IntMat {
        let mut out = self.mul(other);
        for v in &mut out.data {
            *v = v.rem_euclid(p as i64);
        }
        out
    }
}

/// Scalars a module is defined over.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Scalars {
    Int,
    Fp(u64),
}

#[derive(Clone, Debug)]
enum ModAction {
    Trivial,
    ByElement(Vec<IntMat>),
}

/// A `G`-module: free `Z`-module or `F_p` vector space with a left action
/// of the group. Torsion coefficient modules are out of scope here;
/// `Z/t` coefficients are reached through `F_p` computations and
/// universal-coefficient bookkeeping instead.
#[derive(Clone, Debug)]
pub struct GModule {
    pub scalars: Scalars,
    pub dim: usize,
    action: ModAction,
    pub label: String,
}

impl GModule {
    pub fn trivial(scalars: Scalars, dim: usize, label: &str) -> GModule {
        GModule { scalars, dim, action: ModAction::Trivial, label: label.to_string() }
    }

    /// Build a module from one matrix per generator of `group`,
    /// extending along the Cayley graph. Fails when the matrices do not
    /// define a homomorphism into `GL(dim)`.
    pub fn from_generator_matrices(
        group: &FiniteGroup,
        scalars: Scalars,
        dim: usize,
        generator_actions: &[IntMat],
        label: &str,
    ) -> Result<GModule> {
        if generator_actions.len() != group.generators.len() {
            return Err(Error::InvalidInput(format!(
                "{} generator matrices for {} generators",
                generator_actions.len(),
                group.generators.len()
            )));
        }
        for m in generator_actions {
            if m.rows != dim || m.cols != dim {
                return Err(Error::InvalidInput("action matrix has wrong shape".into()));
            }
        }
        let order = group.order();
        let mut mats: Vec<Option<IntMat>> = vec![None; order];
        mats[group.identity as usize] = Some(IntMat::identity(dim));
        let mut frontier = vec![group.identity];
        let mul = |a: &IntMat, b: &IntMat| match scalars {
            Scalars::Int => a.mul(b),
            Scalars::Fp(p) => a.mul_mod(b, p),
        };
        while let Some(x) = frontier.pop() {
            let mx = mats[x as usize].clone().expect("frontier entries are known");
            for (s_pos, &s) in group.generators.iter().enumerate() {
                let y = group.mul(x, s);
                let my = mul(&mx, &generator_actions[s_pos]);
                match &mats[y as usize] {
                    None => {
                        mats[y as usize] = Some(my);
                        frontier.push(y);
                    }
                    Some(existing) => {
                        if *existing != my {
                            return Err(Error::InvalidInput(
                                "action matrices do not define a homomorphism".into(),
                            ));
                        }
                    }
                }
            }
        }
        let mats: Vec<IntMat> = mats
            .into_iter()
            .map(|m| m.ok_or_else(|| Error::InvalidInput("generators do not reach all elements".into())))
            .collect::<Result<_>>()?;
        Ok(GModule {
            scalars,
            dim,
            action: ModAction::ByElement(mats),
            label: label.to_string(),
        })
    }

    /// Build a module directly from a per-element matrix assignment.
    pub fn from_element_matrices(
        group: &FiniteGroup,
        scalars: Scalars,
        dim: usize,
        mats: Vec<IntMat>,
        label: &str,
    ) -> Result<GModule> {
        if mats.len() != group.order() {
            return Err(Error::InvalidInput("one matrix per element required".into()));
        }
        let module = GModule {
            scalars,
            dim,
            action: ModAction::ByElement(mats),
            label: label.to_string(),
        };
        module.verify_action(group)?;
        Ok(module)
    }

    /// Full homomorphism check against the multiplication of `group`.
    pub fn verify_action(&self, group: &FiniteGroup) -> Result<()> {
        let ModAction::ByElement(mats) = &self.action else {
            return Ok(());
        };
        if mats[group.identity as usize] != IntMat::identity(self.dim) {
            return Err(Error::InvalidInput("identity must act as the identity matrix".into()));
        }
        for a in 0..group.order() as u32 {
            for &s in &group.generators {
                let lhs = &mats[group.mul(a, s) as usize];
                let rhs = match self.scalars {
                    Scalars::Int => mats[a as usize].mul(&mats[s as usize]),
                    Scalars::Fp(p) => mats[a as usize].mul_mod(&mats[s as usize], p),
                };
                if *lhs != rhs {
                    return Err(Error::InvalidInput(
                        "action matrices do not define a homomorphism".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Left action of element index `g`.
    pub fn act(&self, g: u32) -> IntMat {
        match &self.action {
            ModAction::Trivial => IntMat::identity(self.dim),
            ModAction::ByElement(mats) => mats[g as usize].clone(),
        }
    }

    pub fn is_trivial_action(&self) -> bool {
        matches!(self.action, ModAction::Trivial)
    }

    /// Right action `m 'dot' g = rho(g^{-1}) m`, as used by bar chains and
    /// resolution tensors.
    pub fn act_right(&self, group: &FiniteGroup, g: u32) -> IntMat {
        match &self.action {
            ModAction::Trivial => IntMat::identity(self.dim),
            ModAction::ByElement(mats) => mats[group.inv(g) as usize].clone(),
        }
    }

    /// Standard permutation module of a symmetric-family group: rank `n`
    /// free module permuted by the images.
    pub fn standard_permutation(group: &FiniteGroup) -> Result<GModule> {
        let n = group.rank;
        let mut mats = Vec::with_capacity(group.order());
        for g in &group.elements {
            let images = g
                .perm_images()
                .ok_or_else(|| Error::InvalidInput("standard module needs a permutation family".into()))?;
            let mut m = IntMat::zero(n, n);
            for (i, &img) in images.iter().enumerate() {
                m.set(img as usize - 1, i, 1);
            }
            mats.push(m);
        }
        let module = GModule {
            scalars: Scalars::Int,
            dim: n,
            action: ModAction::ByElement(mats),
            label: format!("standard Z^{n}"),
        };
        module.verify_action(group)?;
        Ok(module)
    }

    /// Rank-one sign module of a symmetric-family group.
    pub fn sign(group: &FiniteGroup) -> Result<GModule> {
        let mut mats = Vec::with_capacity(group.order());
        for g in &group.elements {
            let images = g
                .perm_images()
                .ok_or_else(|| Error::InvalidInput("sign module needs a permutation family".into()))?;
            let mut m = IntMat::identity(1);
            m.set(0, 0, perm_sign(images));
            mats.push(m);
        }
        let module = GModule {
            scalars: Scalars::Int,
            dim: 1,
            action: ModAction::ByElement(mats),
            label: "sign Z".to_string(),
        };
        module.verify_action(group)?;
        Ok(module)
    }

    /// Reduce an integer module to `F_p` coefficients.
    pub fn reduce_mod(&self, p: u64) -> GModule {
        let action = match &self.action {
            ModAction::Trivial => ModAction::Trivial,
            ModAction::ByElement(mats) => ModAction::ByElement(
                mats.iter()
                    .map(|m| {
                        let mut r = m.clone();
                        for v in &mut r.data {
                            *v = v.rem_euclid(p as i64);
                        }
                        r
                    })
                    .collect(),
            ),
        };
        GModule {
            scalars: Scalars::Fp(p),
            dim: self.dim,
            action,
            label: format!("{} mod {}", self.label, p),
        }
    }
}

pub fn perm_sign(images: &[u16]) -> i64 {
    let n = images.len();
    let mut seen = vec![false; n];
    let mut sign = 1i64;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = images[cur] as usize - 1;
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Convert an `IntMat` column to sparse `BigInt` triplet entries.
pub fn column_entries(m: &IntMat, col: usize) -> Vec<(usize, BigInt)> {
    (0..m.rows)
        .filter_map(|r| {
            let v = m.get(r, col);
            if v == 0 {
                None
            } else {
                Some((r, BigInt::from(v)))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;

    #[test]
    fn standard_module_action_is_homomorphic() {
        let g = FiniteGroup::from_family(&Family::symmetric(), 4).unwrap();
        let m = GModule::standard_permutation(&g).unwrap();
        assert_eq!(m.dim, 4);
    }

    #[test]
    fn sign_module_alternates() {
        let g = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        let m = GModule::sign(&g).unwrap();
        let signs: Vec<i64> = (0..g.order() as u32).map(|i| m.act(i).get(0, 0)).collect();
        assert_eq!(signs.iter().filter(|&&s| s == -1).count(), 3);
    }

    #[test]
    fn generator_matrices_extend_or_reject() {
        let g = FiniteGroup::from_family(&Family::symmetric(), 3).unwrap();
        // Sign action on Z from generator matrices.
        let gen_mats: Vec<IntMat> = g
            .generators
            .iter()
            .map(|&s| {
                let mut m = IntMat::identity(1);
                m.set(0, 0, perm_sign(g.elements[s as usize].perm_images().unwrap()));
                m
            })
            .collect();
        let built = GModule::from_generator_matrices(&g, Scalars::Int, 1, &gen_mats, "sign").unwrap();
        let direct = GModule::sign(&g).unwrap();
        for i in 0..g.order() as u32 {
            assert_eq!(built.act(i), direct.act(i));
        }
        // A non-homomorphic assignment must be rejected: send the
        // transposition to -1 but the 3-cycle to -1 as well.
        let bad: Vec<IntMat> = g
            .generators
            .iter()
            .map(|_| {
                let mut m = IntMat::identity(1);
                m.set(0, 0, -1);
                m
            })
            .collect();
        assert!(GModule::from_generator_matrices(&g, Scalars::Int, 1, &bad, "bad").is_err());
    }

    #[test]
    fn perm_sign_basics() {
        assert_eq!(perm_sign(&[1, 2, 3]), 1);
        assert_eq!(perm_sign(&[2, 1, 3]), -1);
        assert_eq!(perm_sign(&[2, 3, 1]), 1);
    }
}
