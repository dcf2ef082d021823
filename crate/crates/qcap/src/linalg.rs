//! Dense row-major matrices and Gaussian elimination (LU with scaled
//! partial pivoting) for multiple right-hand sides.

use crate::error::{Error, Result};

/// Minimum acceptable pivot magnitude, relative to its row's scale.
const PIVOT_FLOOR: f64 = 1e-30;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Row-major backing storage; chunk by `cols()` to get rows.
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let (head, tail) = self.data.split_at_mut(hi * self.cols);
        head[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut tail[..self.cols]);
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Factors `a` in place (L and U share its storage) and solves for every
/// column of `rhs`. The pivot row for each column is the candidate with the
/// largest magnitude relative to its row scale; a pivot below
/// `PIVOT_FLOOR` of the scale means the matrix is numerically singular.
pub fn lu_solve(a: &mut Mat, rhs: &Mat) -> Result<Mat> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "coefficient matrix must be square");
    assert_eq!(rhs.rows(), n, "right-hand side row count must match");

    let mut scale = Vec::with_capacity(n);
    for r in 0..n {
        let s = a.row(r).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if s == 0.0 {
            return Err(Error::SingularMatrix { index: r });
        }
        scale.push(s);
    }

    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut best = k;
        let mut best_ratio = a[(k, k)].abs() / scale[k];
        for r in k + 1..n {
            let ratio = a[(r, k)].abs() / scale[r];
            if ratio > best_ratio {
                best = r;
                best_ratio = ratio;
            }
        }
        if a[(best, k)].abs() < PIVOT_FLOOR * scale[best] {
            return Err(Error::SingularMatrix { index: k });
        }
        a.swap_rows(k, best);
        scale.swap(k, best);
        perm.swap(k, best);

        let pivot = a[(k, k)];
        let (upper, lower) = a.data.split_at_mut((k + 1) * n);
        let pivot_row = &upper[k * n..(k + 1) * n];
        for i in k + 1..n {
            let row = &mut lower[(i - k - 1) * n..(i - k) * n];
            let m = row[k] / pivot;
            row[k] = m;
            if m != 0.0 {
                for j in k + 1..n {
                    row[j] -= m * pivot_row[j];
                }
            }
        }
    }

    let mut x = Mat::zeros(n, rhs.cols());
    let mut col = vec![0.0f64; n];
    for c in 0..rhs.cols() {
        for r in 0..n {
            col[r] = rhs[(perm[r], c)];
        }
        for r in 1..n {
            let mut acc = col[r];
            for (j, cj) in col[..r].iter().enumerate() {
                acc -= a[(r, j)] * cj;
            }
            col[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = col[r];
            for j in r + 1..n {
                acc -= a[(r, j)] * col[j];
            }
            col[r] = acc / a[(r, r)];
        }
        for r in 0..n {
            x[(r, c)] = col[r];
        }
    }
    Ok(x)
}
