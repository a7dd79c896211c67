//! Dense GF(2) matrices with bit-packed rows, plus Gaussian elimination.
//!
//! Sized for desk-scale block codes (hundreds of columns): rows are `u64`
//! words, elimination is straightforward row reduction.

/// A dense binary matrix. Rows are packed little-endian into `u64` words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BinMatrix {
    /// All-zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> BinMatrix {
        let words_per_row = cols.div_ceil(64).max(1);
        BinMatrix {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    /// Build a matrix from an entry predicate.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> BinMatrix {
        let mut m = BinMatrix::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
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

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let w = self.data[r * self.words_per_row + c / 64];
        (w >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let w = &mut self.data[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// XOR row `src` into row `dst`.
    fn xor_row_into(&mut self, dst: usize, src: usize) {
        let (a, b) = (dst.min(src), dst.max(src));
        let (lo, hi) = self.data.split_at_mut(b * self.words_per_row);
        let src_slice;
        let dst_slice;
        if dst < src {
            dst_slice = &mut lo[a * self.words_per_row..(a + 1) * self.words_per_row];
            src_slice = &hi[..self.words_per_row];
        } else {
            src_slice = &lo[a * self.words_per_row..(a + 1) * self.words_per_row];
            dst_slice = &mut hi[..self.words_per_row];
        }
        for (d, s) in dst_slice.iter_mut().zip(src_slice) {
            *d ^= *s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words_per_row {
            self.data.swap(a * self.words_per_row + w, b * self.words_per_row + w);
        }
    }

    /// Kronecker product `self (x) other`: indices of `other` vary fastest.
    pub fn kronecker(&self, other: &BinMatrix) -> BinMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        BinMatrix::from_fn(rows, cols, |r, c| {
            let (ra, rb) = (r / other.rows, r % other.rows);
            let (ca, cb) = (c / other.cols, c % other.cols);
            self.get(ra, ca) && other.get(rb, cb)
        })
    }

    /// Column permutation: entry `(r, c)` of the result is entry
    /// `(r, perm[c])` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> BinMatrix {
        assert_eq!(perm.len(), self.cols, "permutation length must equal cols");
        BinMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, perm[c]))
    }

    /// Row-vector times matrix over GF(2): `v` has one bit per row, the
    /// result one bit per column.
    pub fn mul_row_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.rows, "vector length must equal rows");
        let mut acc = vec![0u64; self.words_per_row];
        for (r, &bit) in v.iter().enumerate() {
            if bit & 1 == 1 {
                for (a, s) in acc.iter_mut().zip(self.row(r)) {
                    *a ^= *s;
                }
            }
        }
        (0..self.cols).map(|c| ((acc[c / 64] >> (c % 64)) & 1) as u8).collect()
    }

    /// Rank over GF(2). Destroys a working copy; `self` is untouched.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            for r in 0..m.rows {
                if r != rank && m.get(r, col) {
                    m.xor_row_into(r, rank);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }
}

/// Outcome of solving a GF(2) linear system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gf2Solution {
    /// The system pins every unknown.
    Unique(Vec<u8>),
    /// Consistent but rank-deficient; `rank` unknowns short of unique.
    Underdetermined { rank: usize },
    /// No assignment satisfies the equations.
    Inconsistent,
}

/// Solve `A x = b` over GF(2) for `x` of length `unknowns`.
///
/// `equations` yields one `(coefficients, rhs)` pair per equation, the
/// coefficient slice holding one bit per unknown.
pub fn solve(
    unknowns: usize,
    equations: impl Iterator<Item = (Vec<u8>, u8)>,
) -> Gf2Solution {
    let rows: Vec<(Vec<u8>, u8)> = equations.collect();
    let m = BinMatrix::from_fn(rows.len(), unknowns + 1, |r, c| {
        if c < unknowns {
            rows[r].0[c] & 1 == 1
        } else {
            rows[r].1 & 1 == 1
        }
    });
    solve_augmented(m, unknowns)
}

/// Solve from an augmented matrix whose last column is the right-hand
/// side.
pub fn solve_augmented(mut m: BinMatrix, unknowns: usize) -> Gf2Solution {
    assert_eq!(m.cols(), unknowns + 1, "matrix must carry one rhs column");
    let mut pivot_col_of_row = Vec::new();
    let mut rank = 0;
    for col in 0..unknowns {
        let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
            continue;
        };
        m.swap_rows(rank, pivot);
        for r in 0..m.rows {
            if r != rank && m.get(r, col) {
                m.xor_row_into(r, rank);
            }
        }
        pivot_col_of_row.push(col);
        rank += 1;
        if rank == m.rows {
            break;
        }
    }

    // A zero coefficient row with rhs 1 is a contradiction.
    for r in rank..m.rows {
        if m.get(r, unknowns) && (0..unknowns).all(|c| !m.get(r, c)) {
            return Gf2Solution::Inconsistent;
        }
    }

    if rank < unknowns {
        return Gf2Solution::Underdetermined { rank };
    }

    let mut x = vec![0u8; unknowns];
    for (r, &col) in pivot_col_of_row.iter().enumerate() {
        x[col] = m.get(r, unknowns) as u8;
    }
    Gf2Solution::Unique(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn get_set_roundtrip_across_words() {
        let mut m = BinMatrix::zero(2, 130);
        m.set(0, 0, true);
        m.set(0, 64, true);
        m.set(1, 129, true);
        assert!(m.get(0, 0) && m.get(0, 64) && m.get(1, 129));
        assert!(!m.get(0, 1) && !m.get(1, 0));
    }

    #[test]
    fn kronecker_matches_definition() {
        // [1 1] (x) [1 0; 0 1]
        let a = BinMatrix::from_fn(1, 2, |_, _| true);
        let b = BinMatrix::from_fn(2, 2, |r, c| r == c);
        let k = a.kronecker(&b);
        assert_eq!((k.rows(), k.cols()), (2, 4));
        let expect = [[1, 0, 1, 0], [0, 1, 0, 1]];
        for (r, row) in expect.iter().enumerate() {
            for (c, &bit) in row.iter().enumerate() {
                assert_eq!(k.get(r, c) as u8, bit);
            }
        }
    }

    #[test]
    fn mul_row_vec_spc() {
        // (3,2) SPC generator, parity last.
        let g = BinMatrix::from_fn(2, 3, |r, c| c == r || c == 2);
        assert_eq!(g.mul_row_vec(&[1, 0]), vec![1, 0, 1]);
        assert_eq!(g.mul_row_vec(&[1, 1]), vec![1, 1, 0]);
    }

    #[test]
    fn rank_and_solve() {
        let g = BinMatrix::from_fn(2, 3, |r, c| c == r || c == 2);
        assert_eq!(g.rank(), 2);

        // x0 = 1, x0 + x1 = 0 -> unique (1, 1).
        let sol = solve(
            2,
            [(vec![1, 0], 1u8), (vec![1, 1], 0u8)].into_iter(),
        );
        assert_eq!(sol, Gf2Solution::Unique(vec![1, 1]));

        // Single equation in two unknowns.
        let sol = solve(2, [(vec![1, 1], 0u8)].into_iter());
        assert_eq!(sol, Gf2Solution::Underdetermined { rank: 1 });

        // x0 = 0 and x0 = 1.
        let sol = solve(1, [(vec![1], 0u8), (vec![1], 1u8)].into_iter());
        assert_eq!(sol, Gf2Solution::Inconsistent);
    }

    #[test]
    fn solve_detects_hidden_inconsistency() {
        // x0+x1 = 0, x0 = 1, x1 = 0 -> inconsistent after elimination.
        let sol = solve(
            2,
            [(vec![1, 1], 0u8), (vec![1, 0], 1u8), (vec![0, 1], 0u8)].into_iter(),
        );
        assert_eq!(sol, Gf2Solution::Inconsistent);
    }
}
