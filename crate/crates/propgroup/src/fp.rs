//! Small dense linear algebra over the prime field F_p.

/// Dense F_p matrix, row-major, entries reduced mod p.
#[derive(Debug, Clone)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    a: Vec<u64>,
}

impl FpMatrix {
    pub fn zero(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            a: vec![0; rows * cols],
        }
    }

    pub fn from_rows(p: u64, rows: &[Vec<u64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zero(p, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
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
        self.a[i * self.cols + j] = v % self.p;
    }

    fn inv_mod_p(p: u64, a: u64) -> u64 {
        // p is prime and a != 0 mod p
        let mut result = 1u64;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        result
    }

    /// Rank by in-place Gaussian elimination.
    pub fn rank(mut self) -> usize {
        let p = self.p;
        let mut rank = 0;
        for col in 0..self.cols {
            let pivot = (rank..self.rows).find(|&i| self.get(i, col) != 0);
            let Some(pi) = pivot else { continue };
            if pi != rank {
                for j in 0..self.cols {
                    let (x, y) = (self.get(rank, j), self.get(pi, j));
                    self.set(rank, j, y);
                    self.set(pi, j, x);
                }
            }
            let s = Self::inv_mod_p(p, self.get(rank, col));
            for j in col..self.cols {
                let v = self.get(rank, j) * s % p;
                self.set(rank, j, v);
            }
            for i in 0..self.rows {
                if i == rank {
                    continue;
                }
                let f = self.get(i, col);
                if f == 0 {
                    continue;
                }
                for j in col..self.cols {
                    let v = (self.get(i, j) + (p - f) * self.get(rank, j)) % p;
                    self.set(i, j, v);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// dim ker, for the matrix as a map from F_p^cols.
    pub fn kernel_dim(self) -> usize {
        let cols = self.cols;
        cols - self.rank()
    }
}

/// Rank of the span of a list of vectors.
pub fn span_rank(p: u64, vectors: &[Vec<u64>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    FpMatrix::from_rows(p, vectors).rank()
}

pub fn vec_add_scaled(p: u64, target: &mut [u64], src: &[u64], scale: u64) {
    for (t, &s) in target.iter_mut().zip(src.iter()) {
        *t = (*t + scale % p * s) % p;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let m = FpMatrix::from_rows(3, &[vec![1, 2, 0], vec![2, 4, 0], vec![0, 0, 1]]);
        assert_eq!(m.clone().rank(), 2);
        assert_eq!(m.kernel_dim(), 1);
    }

    #[test]
    fn rank_mod_2() {
        let m = FpMatrix::from_rows(2, &[vec![1, 1], vec![1, 1]]);
        assert_eq!(m.rank(), 1);
    }
}
