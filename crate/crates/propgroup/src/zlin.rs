//! Linear algebra over Z/p^k Z.
//!
//! Z/p^k is not a field, so all reductions pivot on entries of minimal
//! p-valuation; a pivot then divides every remaining entry in its row and
//! column and elimination is exact. Membership in a span is decided by a
//! column echelon form plus greedy reduction, which is sound here because
//! the residual ambiguity at each pivot is a multiple of p^k.

use crate::error::{Error, Result};
use crate::padic::{PadicRing, Valuation};

/// Dense matrix of residues mod p^k, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZpkMatrix {
    ring: PadicRing,
    rows: usize,
    cols: usize,
    a: Vec<u64>,
}

impl ZpkMatrix {
    pub fn zero(ring: PadicRing, rows: usize, cols: usize) -> Self {
        ZpkMatrix {
            ring,
            rows,
            cols,
            a: vec![0; rows * cols],
        }
    }

    pub fn identity(ring: PadicRing, n: usize) -> Self {
        let mut m = Self::zero(ring, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_columns(ring: PadicRing, rows: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = Self::zero(ring, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for i in 0..rows {
                m.set(i, j, col[i]);
            }
        }
        m
    }

    pub fn ring(&self) -> PadicRing {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.a[i * self.cols + j] = v % self.ring.modulus();
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, rhs: &ZpkMatrix) -> ZpkMatrix {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.ring, rhs.ring);
        let mut out = ZpkMatrix::zero(self.ring, self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let s = self.get(i, l);
                if s == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, self.ring.raw_add(cur, self.ring.raw_mul(s, rhs.get(l, j))));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for j in 0..self.cols {
                    acc = self.ring.raw_add(acc, self.ring.raw_mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    /// Inverse of a square matrix whose determinant is a unit mod p.
    /// Gauss-Jordan with unit pivots; fails with `NotUnimodular` otherwise.
    pub fn inverse(&self) -> Result<ZpkMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let ring = self.ring;
        let mut work = self.clone();
        let mut inv = ZpkMatrix::identity(ring, n);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&i| work.get(i, col) % ring.prime() != 0)
                .ok_or(Error::NotUnimodular)?;
            if pivot_row != col {
                for j in 0..n {
                    let (x, y) = (work.get(col, j), work.get(pivot_row, j));
                    work.set(col, j, y);
                    work.set(pivot_row, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot_row, j));
                    inv.set(col, j, y);
                    inv.set(pivot_row, j, x);
                }
            }
            let s = ring.raw_inv(work.get(col, col))?;
            for j in 0..n {
                work.set(col, j, ring.raw_mul(work.get(col, j), s));
                inv.set(col, j, ring.raw_mul(inv.get(col, j), s));
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = work.get(i, col);
                if f == 0 {
                    continue;
                }
                for j in 0..n {
                    let w = ring.raw_sub(work.get(i, j), ring.raw_mul(f, work.get(col, j)));
                    work.set(i, j, w);
                    let v = ring.raw_sub(inv.get(i, j), ring.raw_mul(f, inv.get(col, j)));
                    inv.set(i, j, v);
                }
            }
        }
        Ok(inv)
    }
}

#[derive(Debug, Clone)]
struct Pivot {
    row: usize,
    val: u32,
    column: Vec<u64>,
}

/// Column echelon form of a span of vectors over Z/p^k, pivoting on minimal
/// p-valuation entries.
#[derive(Debug, Clone)]
pub struct SpanEchelon {
    ring: PadicRing,
    rows: usize,
    pivots: Vec<Pivot>,
}

impl SpanEchelon {
    pub fn new(ring: PadicRing, rows: usize, generators: &[Vec<u64>]) -> Self {
        let mut cols: Vec<Vec<u64>> = generators
            .iter()
            .map(|g| {
                assert_eq!(g.len(), rows);
                g.iter().map(|&x| x % ring.modulus()).collect()
            })
            .collect();
        let mut pivots: Vec<Pivot> = Vec::new();
        let mut row_used = vec![false; rows];
        loop {
            // minimal valuation over remaining columns and unused rows
            let mut best: Option<(u32, usize, usize)> = None;
            for (c, col) in cols.iter().enumerate() {
                for (r, &x) in col.iter().enumerate() {
                    if row_used[r] {
                        continue;
                    }
                    if let Valuation::Finite(v) = ring.raw_val(x) {
                        if best.map_or(true, |(bv, br, bc)| (v, r, c) < (bv, br, bc)) {
                            best = Some((v, r, c));
                        }
                    }
                }
            }
            let Some((v, r, c)) = best else { break };
            let mut pivot_col = cols.swap_remove(c);
            // scale so the pivot entry is exactly p^v
            let unit = pivot_col[r] / ring.prime().pow(v);
            let s = ring.raw_inv(unit).expect("unit part is invertible");
            for x in pivot_col.iter_mut() {
                *x = ring.raw_mul(*x, s);
            }
            debug_assert_eq!(pivot_col[r], ring.prime().pow(v));
            // eliminate row r from every remaining column; exact since v is minimal
            let pv = ring.prime().pow(v);
            for col in cols.iter_mut() {
                let x = col[r];
                if x == 0 {
                    continue;
                }
                let y = x / pv;
                debug_assert_eq!(x % pv, 0);
                for (t, e) in col.iter_mut().enumerate() {
                    *e = ring.raw_sub(*e, ring.raw_mul(y, pivot_col[t]));
                }
            }
            row_used[r] = true;
            pivots.push(Pivot {
                row: r,
                val: v,
                column: pivot_col,
            });
        }
        SpanEchelon { ring, rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// True iff `target` lies in the Z/p^k-span of the generators.
    pub fn contains(&self, target: &[u64]) -> bool {
        assert_eq!(target.len(), self.rows);
        let ring = self.ring;
        let mut t: Vec<u64> = target.iter().map(|&x| x % ring.modulus()).collect();
        for piv in &self.pivots {
            let x = t[piv.row];
            if x == 0 {
                continue;
            }
            let pv = ring.prime().pow(piv.val);
            if x % pv != 0 {
                return false;
            }
            let y = x / pv;
            for (e, p) in t.iter_mut().zip(piv.column.iter()) {
                *e = ring.raw_sub(*e, ring.raw_mul(y, *p));
            }
        }
        t.iter().all(|&x| x == 0)
    }

    /// Exponent e with index [ (Z/p^k)^rows : span ] = p^e, counting a missing
    /// pivot as valuation k.
    pub fn covolume_exponent(&self) -> u64 {
        let k = self.ring.precision() as u64;
        let pivot_sum: u64 = self.pivots.iter().map(|p| p.val as u64).sum();
        pivot_sum + (self.rows - self.pivots.len()) as u64 * k
    }

    /// The echelonized generating columns, in pivot creation order.
    pub fn basis_columns(&self) -> Vec<Vec<u64>> {
        self.pivots.iter().map(|p| p.column.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, k: u32) -> PadicRing {
        PadicRing::new(p, k).unwrap()
    }

    #[test]
    fn span_membership_over_zpk() {
        let r = ring(3, 2);
        // span{(1,0), (0,3)} mod 9: contains (1,3), (0,6); not (0,1)
        let ech = SpanEchelon::new(r, 2, &[vec![1, 0], vec![0, 3]]);
        assert!(ech.contains(&[1, 3]));
        assert!(ech.contains(&[0, 6]));
        assert!(!ech.contains(&[0, 1]));
        assert_eq!(ech.covolume_exponent(), 1);
    }

    #[test]
    fn naive_field_pivoting_would_be_wrong() {
        // Over Z/9 the vector (3, 3) and (0, 3) span {(3a, 3a+3b)}:
        // (3, 0) is inside, (1, 0) is not, and ranks must track valuations.
        let r = ring(3, 2);
        let ech = SpanEchelon::new(r, 2, &[vec![3, 3], vec![0, 3]]);
        assert!(ech.contains(&[3, 0]));
        assert!(!ech.contains(&[1, 0]));
        assert_eq!(ech.covolume_exponent(), 2);
    }

    #[test]
    fn unimodular_inverse_round_trip() {
        let r = ring(5, 3);
        let m = ZpkMatrix::from_columns(r, 3, &[vec![1, 5, 7], vec![2, 1, 0], vec![0, 10, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), ZpkMatrix::identity(r, 3));
        assert_eq!(inv.mul(&m), ZpkMatrix::identity(r, 3));
    }

    #[test]
    fn singular_matrix_rejected() {
        let r = ring(3, 2);
        let m = ZpkMatrix::from_columns(r, 2, &[vec![3, 0], vec![0, 1]]);
        assert!(matches!(m.inverse(), Err(Error::NotUnimodular)));
    }
}
