//! Sparse integer matrices with arbitrary-precision entries.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::{Error, Result};

/// A sparse matrix over `Z`. Entries are kept sorted by `(row, col)` with
/// no duplicate positions and no stored zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, BigInt)>,
}

impl SparseIntMatrix {
    pub fn zero(rows: usize, cols: usize) -> SparseIntMatrix {
        SparseIntMatrix { rows, cols, entries: Vec::new() }
    }

    /// Build from triplets, accumulating duplicates and dropping zeros.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<SparseIntMatrix>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut acc: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::InvalidInput(format!(
                    "entry ({r},{c}) out of range for {rows}x{cols} matrix"
                )));
            }
            if v.is_zero() {
                continue;
            }
            let slot = acc.entry((r as u32, c as u32)).or_insert_with(BigInt::zero);
            *slot += v;
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Ok(SparseIntMatrix { rows, cols, entries })
    }

    pub fn from_i64_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<SparseIntMatrix>
    where
        I: IntoIterator<Item = (usize, usize, i64)>,
    {
        Self::from_triplets(rows, cols, triplets.into_iter().map(|(r, c, v)| (r, c, BigInt::from(v))))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u32, u32, BigInt)] {
        &self.entries
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        let mut entries: Vec<(u32, u32, BigInt)> =
            self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        SparseIntMatrix { rows: self.cols, cols: self.rows, entries }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "shape mismatch in product: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        // Row-indexed view of `other`.
        let mut other_rows: Vec<Vec<(u32, &BigInt)>> = vec![Vec::new(); other.rows];
        for (r, c, v) in &other.entries {
            other_rows[*r as usize].push((*c, v));
        }
        let mut acc: BTreeMap<(u32, u32), BigInt> = BTreeMap::new();
        for (r, k, v) in &self.entries {
            for (c, w) in &other_rows[*k as usize] {
                let slot = acc.entry((*r, *c)).or_insert_with(BigInt::zero);
                *slot += v * *w;
            }
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((r, c), v)| (r, c, v))
            .collect();
        Ok(SparseIntMatrix { rows: self.rows, cols: other.cols, entries })
    }

    /// Apply row and column relabelings (both must be bijections); used to
    /// probe invariance of normal forms.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<SparseIntMatrix> {
        if row_perm.len() != self.rows || col_perm.len() != self.cols {
            return Err(Error::InvalidInput("permutation length mismatch".into()));
        }
        SparseIntMatrix::from_triplets(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .map(|(r, c, v)| (row_perm[*r as usize], col_perm[*c as usize], v.clone())),
        )
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut dense = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            dense[*r as usize][*c as usize] = v.clone();
        }
        dense
    }

    /// Textual triplet exchange format: a `rows cols nnz` header line, then
    /// one `r c v` line per entry.
    pub fn write_triplet_format<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.entries.len())?;
        for (r, c, v) in &self.entries {
            writeln!(w, "{r} {c} {v}")?;
        }
        Ok(())
    }

    pub fn read_triplet_format<R: BufRead>(r: R) -> Result<SparseIntMatrix> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty triplet stream".into()))??;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad triplet header: {e}")))?;
        if head.len() != 3 {
            return Err(Error::InvalidInput("triplet header must be `rows cols nnz`".into()));
        }
        let (rows, cols, nnz) = (head[0], head[1], head[2]);
        let mut triplets = Vec::with_capacity(nnz);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::InvalidInput(format!("bad triplet line: {line:?}")));
            }
            let r: usize = toks[0]
                .parse()
                .map_err(|e| Error::InvalidInput(format!("bad row index: {e}")))?;
            let c: usize = toks[1]
                .parse()
                .map_err(|e| Error::InvalidInput(format!("bad col index: {e}")))?;
            let v: BigInt = toks[2]
                .parse()
                .map_err(|e| Error::InvalidInput(format!("bad value: {e}")))?;
            triplets.push((r, c, v));
        }
        if triplets.len() != nnz {
            return Err(Error::InvalidInput(format!(
                "triplet count mismatch: header says {nnz}, found {}",
                triplets.len()
            )));
        }
        SparseIntMatrix::from_triplets(rows, cols, triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_triplets_accumulate_and_zeros_drop() {
        let m = SparseIntMatrix::from_i64_triplets(
            2,
            2,
            vec![(0, 0, 1), (0, 0, 2), (1, 1, 5), (1, 1, -5), (1, 0, 0)],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.entries()[0], (0, 0, BigInt::from(3)));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(SparseIntMatrix::from_i64_triplets(2, 2, vec![(2, 0, 1)]).is_err());
    }

    #[test]
    fn product_matches_dense() {
        let a = SparseIntMatrix::from_i64_triplets(2, 3, vec![(0, 0, 1), (0, 2, -2), (1, 1, 3)])
            .unwrap();
        let b = SparseIntMatrix::from_i64_triplets(3, 2, vec![(0, 0, 4), (2, 0, 1), (1, 1, -1)])
            .unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(
            p,
            SparseIntMatrix::from_i64_triplets(2, 2, vec![(0, 0, 2), (1, 1, -3)]).unwrap()
        );
    }

    #[test]
    fn triplet_format_round_trip() {
        let m = SparseIntMatrix::from_i64_triplets(3, 4, vec![(0, 1, 7), (2, 3, -9)]).unwrap();
        let mut buf = Vec::new();
        m.write_triplet_format(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("3 4 2\n"));
        let back = SparseIntMatrix::read_triplet_format(&buf[..]).unwrap();
        assert_eq!(m, back);
    }
}
