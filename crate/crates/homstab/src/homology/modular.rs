//! Linear algebra over prime fields: sparse ranks for chain complexes and
//! small dense matrices for module actions and resolutions. The two-element
//! field gets a bit-packed representation since it carries the largest
//! workloads.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::sparse::SparseIntMatrix;

pub fn reduce_mod(v: &BigInt, p: u64) -> u64 {
    let r = v % BigInt::from(p);
    let r = if r < BigInt::from(0) { r + BigInt::from(p) } else { r };
    r.to_u64().expect("reduced residue fits u64")
}

/// Rank of an integer matrix reduced mod `p`. The two-element field runs
/// bit packed; odd primes run a sparse elimination with short-row
/// pivoting.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    if p == 2 && m.rows().checked_mul(m.cols()).map(|b| b <= 1 << 28).unwrap_or(false) {
        let mut bits = BitMat::zero(m.rows(), m.cols());
        for (r, c, v) in m.entries() {
            if reduce_mod(v, 2) == 1 {
                bits.set(*r as usize, *c as usize, true);
            }
        }
        return bits.rank();
    }
    rank_mod_p_sparse(m, p)
}

fn rank_mod_p_sparse(m: &SparseIntMatrix, p: u64) -> usize {
    let mut rows: Vec<BTreeMap<u32, u64>> = vec![BTreeMap::new(); m.rows()];
    for (r, c, v) in m.entries() {
        let red = reduce_mod(v, p);
        if red != 0 {
            rows[*r as usize].insert(*c, red);
        }
    }
    let mut cols_rows: Vec<std::collections::BTreeSet<u32>> =
        vec![std::collections::BTreeSet::new(); m.cols()];
    for (r, row) in rows.iter().enumerate() {
        for c in row.keys() {
            cols_rows[*c as usize].insert(r as u32);
        }
    }
    let mut rank = 0;
    let mut row_active = vec![true; m.rows()];
    let mut col_active = vec![true; m.cols()];
    loop {
        // Shortest active row, then its thinnest live column.
        let mut best_row: Option<(usize, u32)> = None;
        for (r, row) in rows.iter().enumerate() {
            if row_active[r] && !row.is_empty() {
                let len = row.len();
                if best_row.map(|(bl, _)| len < bl).unwrap_or(true) {
                    best_row = Some((len, r as u32));
                    if len == 1 {
                        break;
                    }
                }
            }
        }
        let Some((_, pr)) = best_row else { break };
        let mut best: Option<(usize, u32, u32)> = None;
        for c in rows[pr as usize].keys() {
            let live = cols_rows[*c as usize]
                .iter()
                .filter(|&&rr| row_active[rr as usize] && rows[rr as usize].contains_key(c))
                .count();
            if best.map(|(bl, _, _)| live < bl).unwrap_or(true) {
                best = Some((live, pr, *c));
            }
        }
        let Some((_, pr, pc)) = best else { break };
        rank += 1;
        row_active[pr as usize] = false;
        col_active[pc as usize] = false;
        let pivot = rows[pr as usize][&pc];
        let pivot_inv = mod_pow(pivot, p - 2, p);
        let pivot_row: Vec<(u32, u64)> = rows[pr as usize]
            .iter()
            .filter(|(c, _)| col_active[**c as usize])
            .map(|(c, v)| (*c, *v))
            .collect();
        let targets: Vec<u32> = cols_rows[pc as usize]
            .iter()
            .copied()
            .filter(|&rr| row_active[rr as usize] && rows[rr as usize].contains_key(&pc))
            .collect();
        for r2 in targets {
            let factor = rows[r2 as usize][&pc] * pivot_inv % p;
            for (c, v) in &pivot_row {
                let cur = rows[r2 as usize].get(c).copied().unwrap_or(0);
                let sub = factor * v % p;
                let new = (cur + p - sub) % p;
                if new == 0 {
                    rows[r2 as usize].remove(c);
                } else if rows[r2 as usize].insert(*c, new).is_none() {
                    cols_rows[*c as usize].insert(r2);
                }
            }
            rows[r2 as usize].remove(&pc);
        }
    }
    rank
}

fn mod_pow(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b: u128 = (base % p) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    acc as u64
}

pub fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a % p, p - 2, p)
}

/// Dense matrix over `F_p`, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FpMat {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl FpMat {
    pub fn zero(p: u64, rows: usize, cols: usize) -> FpMat {
        FpMat { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> FpMat {
        let mut m = FpMat::zero(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn mul(&self, other: &FpMat) -> FpMat {
        assert_eq!(self.cols, other.rows);
        let mut out = FpMat::zero(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = (out.get(i, j) + a * other.get(k, j)) % self.p;
                    out.data[i * other.cols + j] = v;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc: u128 = 0;
                for j in 0..self.cols {
                    acc += (self.get(i, j) as u128) * (v[j] as u128);
                }
                (acc % self.p as u128) as u64
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().0
    }

    /// In-place row reduction; returns (rank, pivot columns).
    fn row_reduce(mut self) -> (usize, Vec<usize>, FpMat) {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            for j in 0..self.cols {
                let a = self.get(row, j);
                let b = self.get(pr, j);
                self.set(row, j, b);
                self.set(pr, j, a);
            }
            let inv = mod_inv(self.get(row, col), p);
            for j in col..self.cols {
                let v = self.get(row, j) * inv % p;
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r != row && self.get(r, col) != 0 {
                    let f = self.get(r, col);
                    for j in col..self.cols {
                        let v = (self.get(r, j) + (p - f) * self.get(row, j)) % p;
                        self.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (pivots.len(), pivots, self)
    }

    /// Basis of the right kernel, as column vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let (_, pivots, rref) = self.clone().row_reduce();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free_cols: Vec<usize> =
            (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free_cols.len());
        for &fc in &free_cols {
            let mut v = vec![0u64; self.cols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                let coeff = rref.get(i, fc);
                if coeff != 0 {
                    v[pc] = (p - coeff) % p;
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Bit-packed matrix over `F_2`.
#[derive(Clone, Debug)]
pub struct BitMat {
    pub rows: usize,
    pub cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMat {
    pub fn zero(rows: usize, cols: usize) -> BitMat {
        let words_per_row = cols.div_ceil(64);
        BitMat { rows, cols, words_per_row, data: vec![0; rows * words_per_row] }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words_per_row + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (a, b) = (dst * self.words_per_row, src * self.words_per_row);
        for k in 0..self.words_per_row {
            let v = self.data[b + k];
            self.data[a + k] ^= v;
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().0
    }

    fn row_reduce(mut self) -> (usize, Vec<usize>, BitMat) {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            if pr != row {
                for k in 0..self.words_per_row {
                    self.data.swap(row * self.words_per_row + k, pr * self.words_per_row + k);
                }
            }
            for r in 0..self.rows {
                if r != row && self.get(r, col) {
                    self.xor_rows(r, row);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (pivots.len(), pivots, self)
    }

    /// Basis of the right kernel, as bit vectors of length `cols`.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let (_, pivots, rref) = self.clone().row_reduce();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let words = self.cols.div_ceil(64);
        let mut basis = Vec::new();
        for fc in 0..self.cols {
            if pivot_set.contains(&fc) {
                continue;
            }
            let mut v = vec![0u64; words];
            v[fc / 64] |= 1 << (fc % 64);
            for (i, &pc) in pivots.iter().enumerate() {
                if rref.get(i, fc) {
                    v[pc / 64] |= 1 << (pc % 64);
                }
            }
            basis.push(v);
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::snf;

    #[test]
    fn sparse_rank_matches_snf_rank_when_p_large() {
        let m = SparseIntMatrix::from_i64_triplets(
            3,
            4,
            vec![(0, 0, 1), (0, 1, 2), (1, 1, 2), (1, 2, 4), (2, 0, 1), (2, 3, 3)],
        )
        .unwrap();
        assert_eq!(rank_mod_p(&m, 1_000_003), snf::rank(&m));
    }

    #[test]
    fn rank_drops_mod_dividing_prime() {
        let m = SparseIntMatrix::from_i64_triplets(1, 1, vec![(0, 0, 6)]).unwrap();
        assert_eq!(rank_mod_p(&m, 2), 0);
        assert_eq!(rank_mod_p(&m, 3), 0);
        assert_eq!(rank_mod_p(&m, 5), 1);
    }

    #[test]
    fn fp_kernel_vectors_are_killed() {
        let mut m = FpMat::zero(5, 2, 3);
        m.set(0, 0, 1);
        m.set(0, 1, 2);
        m.set(1, 1, 1);
        m.set(1, 2, 4);
        for v in m.kernel_basis() {
            assert!(m.apply(&v).iter().all(|&x| x == 0));
        }
        assert_eq!(m.rank() + m.kernel_basis().len(), 3);
    }

    #[test]
    fn bit_matrix_rank_and_kernel() {
        let mut m = BitMat::zero(3, 5);
        m.set(0, 0, true);
        m.set(0, 1, true);
        m.set(1, 1, true);
        m.set(1, 2, true);
        m.set(2, 0, true);
        m.set(2, 2, true); // row2 = row0 + row1
        assert_eq!(m.rank(), 2);
        let kernel = m.kernel_basis();
        assert_eq!(kernel.len(), 3);
        for v in kernel {
            // Multiply manually.
            for r in 0..3 {
                let mut acc = false;
                for c in 0..5 {
                    if m.get(r, c) && v[c / 64] >> (c % 64) & 1 == 1 {
                        acc = !acc;
                    }
                }
                assert!(!acc);
            }
        }
    }
}
