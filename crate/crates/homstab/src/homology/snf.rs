//! Smith normal form by sparse fraction-free elimination.
//!
//! The elimination works on hash-indexed rows with Markowitz-style pivot
//! selection (unit pivots first, fewest fill-in candidates next) and runs
//! in `i64` arithmetic until an overflow is detected, at which point the
//! whole computation restarts over `BigInt`. Torsion correctness requires
//! exact arithmetic throughout; nothing here ever rounds.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::sparse::SparseIntMatrix;

/// Rank and elementary divisors (a divisibility chain, units included,
/// one entry per nonzero diagonal element).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub rank: usize,
    pub divisors: Vec<BigInt>,
}

impl SnfResult {
    /// The divisors exceeding 1, i.e. the torsion part of the cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

pub fn smith_normal_form(m: &SparseIntMatrix) -> SnfResult {
    if let Some(diag) = eliminate::<i64>(m) {
        return finish(diag);
    }
    let diag = eliminate::<BigInt>(m).expect("BigInt elimination cannot overflow");
    finish(diag)
}

/// Rank over `Z` (also the rank over `Q`).
pub fn rank(m: &SparseIntMatrix) -> usize {
    smith_normal_form(m).rank
}

fn finish(diagonal: Vec<BigInt>) -> SnfResult {
    let divisors = normalize_chain(diagonal);
    SnfResult { rank: divisors.len(), divisors }
}

fn normalize_chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for v in &mut d {
        *v = v.abs();
    }
    d.sort();
    loop {
        let mut changed = false;
        for i in 0..d.len() {
            if d[i].is_one() {
                continue;
            }
            for j in i + 1..d.len() {
                if (&d[j] % &d[i]).is_zero() {
                    continue;
                }
                let g = d[i].gcd(&d[j]);
                let l = &d[i] / &g * &d[j];
                d[i] = g;
                d[j] = l;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        d.sort();
    }
    d
}

/// Scalar abstraction shared by the `i64` fast path and the `BigInt`
/// fallback. All arithmetic is checked; `None` aborts the whole run.
trait Num: Clone + Eq + std::fmt::Debug {
    fn from_bigint(b: &BigInt) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;
    fn is_zero_val(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn cmp_abs(&self, o: &Self) -> Ordering;
    /// `self - a * q`
    fn checked_sub_mul(&self, a: &Self, q: &Self) -> Option<Self>;
    /// Truncated quotient.
    fn div_trunc(&self, o: &Self) -> Self;
}

impl Num for i64 {
    fn from_bigint(b: &BigInt) -> Option<Self> {
        b.to_i64()
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn is_zero_val(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.unsigned_abs().cmp(&o.unsigned_abs())
    }
    fn checked_sub_mul(&self, a: &Self, q: &Self) -> Option<Self> {
        self.checked_sub(a.checked_mul(*q)?)
    }
    fn div_trunc(&self, o: &Self) -> Self {
        self / o
    }
}

impl Num for BigInt {
    fn from_bigint(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn is_zero_val(&self) -> bool {
        self.is_zero()
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn cmp_abs(&self, o: &Self) -> Ordering {
        self.abs().cmp(&o.abs())
    }
    fn checked_sub_mul(&self, a: &Self, q: &Self) -> Option<Self> {
        Some(self - a * q)
    }
    fn div_trunc(&self, o: &Self) -> Self {
        self / o
    }
}

struct Work<T> {
    rows: Vec<BTreeMap<u32, T>>,
    cols: Vec<BTreeSet<u32>>,
}

impl<T: Num> Work<T> {
    fn load(m: &SparseIntMatrix) -> Option<Work<T>> {
        let mut rows: Vec<BTreeMap<u32, T>> = vec![BTreeMap::new(); m.rows()];
        let mut cols: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); m.cols()];
        for (r, c, v) in m.entries() {
            rows[*r as usize].insert(*c, T::from_bigint(v)?);
            cols[*c as usize].insert(*r);
        }
        Some(Work { rows, cols })
    }

    fn set(&mut self, r: u32, c: u32, v: T) {
        if v.is_zero_val() {
            self.rows[r as usize].remove(&c);
            self.cols[c as usize].remove(&r);
        } else {
            self.rows[r as usize].insert(c, v);
            self.cols[c as usize].insert(r);
        }
    }

    /// row[r2] -= q * row[r1]
    fn row_sub_mul(&mut self, r2: u32, r1: u32, q: &T) -> Option<()> {
        let src: Vec<(u32, T)> =
            self.rows[r1 as usize].iter().map(|(c, v)| (*c, v.clone())).collect();
        for (c, v) in src {
            let cur = self.rows[r2 as usize].get(&c).cloned();
            let new = match cur {
                Some(old) => old.checked_sub_mul(&v, q)?,
                None => T::from_bigint(&BigInt::zero())?.checked_sub_mul(&v, q)?,
            };
            self.set(r2, c, new);
        }
        Some(())
    }

    /// col[c2] -= q * col[c1]
    fn col_sub_mul(&mut self, c2: u32, c1: u32, q: &T) -> Option<()> {
        let src: Vec<u32> = self.cols[c1 as usize].iter().copied().collect();
        for r in src {
            let v = self.rows[r as usize].get(&c1).cloned().expect("index consistent");
            let cur = self.rows[r as usize].get(&c2).cloned();
            let new = match cur {
                Some(old) => old.checked_sub_mul(&v, q)?,
                None => T::from_bigint(&BigInt::zero())?.checked_sub_mul(&v, q)?,
            };
            self.set(r, c2, new);
        }
        Some(())
    }

    /// Pick the next pivot: unit entries first, then smallest absolute
    /// value; ties broken by the Markowitz fill bound, then by position
    /// so runs are deterministic.
    fn select_pivot(&self) -> Option<(u32, u32)> {
        let mut best: Option<(bool, BigInt, usize, u32, u32)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                let cost = (row.len() - 1) * (self.cols[*c as usize].len() - 1);
                let unit = v.is_unit();
                if unit && cost == 0 {
                    return Some((r as u32, *c));
                }
                let key = (!unit, v.to_bigint().abs(), cost, r as u32, *c);
                let better = match &best {
                    None => true,
                    Some(b) => {
                        (key.0, &key.1, key.2, key.3, key.4)
                            < (b.0, &b.1, b.2, b.3, b.4)
                    }
                };
                if better {
                    best = Some(key);
                }
            }
        }
        best.map(|(_, _, _, r, c)| (r, c))
    }
}

/// Diagonalize and return the diagonal values; `None` signals arithmetic
/// overflow in the scalar type.
fn eliminate<T: Num>(m: &SparseIntMatrix) -> Option<Vec<BigInt>> {
    let mut w: Work<T> = Work::load(m)?;
    let mut diagonal = Vec::new();

    while let Some((mut r, mut c)) = w.select_pivot() {
        loop {
            // Clear the pivot column with row operations, moving the pivot
            // to the entry of least absolute value until it divides the
            // whole column.
            loop {
                let col_rows: Vec<u32> = w.cols[c as usize].iter().copied().collect();
                let mut min_row = col_rows[0];
                for &cand in &col_rows[1..] {
                    let a = &w.rows[cand as usize][&c];
                    let b = &w.rows[min_row as usize][&c];
                    if a.cmp_abs(b) == Ordering::Less {
                        min_row = cand;
                    }
                }
                r = min_row;
                if col_rows.len() == 1 {
                    break;
                }
                let pivot = w.rows[r as usize][&c].clone();
                for r2 in col_rows {
                    if r2 == r {
                        continue;
                    }
                    let a = w.rows[r2 as usize][&c].clone();
                    let q = a.div_trunc(&pivot);
                    w.row_sub_mul(r2, r, &q)?;
                }
                if w.cols[c as usize].len() == 1 {
                    break;
                }
            }

            // Clear the pivot row with column operations. The column is a
            // singleton now, so these touch row `r` only. A nonzero
            // remainder moves the pivot to that column and we loop.
            let pivot = w.rows[r as usize][&c].clone();
            let row_cols: Vec<u32> = w.rows[r as usize].keys().copied().collect();
            for c2 in row_cols {
                if c2 == c {
                    continue;
                }
                let v = w.rows[r as usize][&c2].clone();
                let q = v.div_trunc(&pivot);
                w.col_sub_mul(c2, c, &q)?;
            }
            let leftover: Vec<u32> =
                w.rows[r as usize].keys().copied().filter(|&c2| c2 != c).collect();
            match leftover
                .into_iter()
                .min_by(|a, b| w.rows[r as usize][a].cmp_abs(&w.rows[r as usize][b]))
            {
                Some(c2) => c = c2,
                None => break,
            }
        }
        diagonal.push(w.rows[r as usize][&c].to_bigint());
        w.set(r, c, T::from_bigint(&BigInt::zero())?);
    }
    Some(diagonal)
}
