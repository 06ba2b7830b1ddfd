//! Integer matrices, Smith normal form, and linear Diophantine solving.
//!
//! The reduction tracks all four transforms: `left * input * right = diag`
//! and the two inverses, so callers can transport coordinates both ways.
//! Pivots are chosen as a smallest-in-absolute-value nonzero entry of the
//! remaining submatrix, which keeps intermediate entries small.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Matrix::from_rows(
            rows.iter().map(|row| row.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let term = a * other.at(k, j);
                    *out.at_mut(i, j) += term;
                }
            }
        }
        out
    }

    /// Matrix-vector product `self * v` (column-vector convention).
    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Vector-matrix product `v * self` (row-vector convention).
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.rows, v.len(), "dimension mismatch");
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| v[i].clone() * self.at(i, j)).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[i] += k * row[t]`.
    fn add_row_mult(&mut self, i: usize, t: usize, k: &BigInt) {
        for j in 0..self.cols {
            let term = k * self.at(t, j);
            *self.at_mut(i, j) += term;
        }
    }

    /// `col[j] += k * col[t]`.
    fn add_col_mult(&mut self, j: usize, t: usize, k: &BigInt) {
        for i in 0..self.rows {
            let term = k * self.at(i, t);
            *self.at_mut(i, j) += term;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.at(i, j).clone();
            *self.at_mut(i, j) = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.at(i, j).clone();
            *self.at_mut(i, j) = v;
        }
    }
}

/// The result of a Smith reduction: `left * input * right = diag(diagonal)`,
/// with `left_inv` and `right_inv` the exact inverses of the transforms.
#[derive(Debug, Clone)]
pub struct SmithNormalForm {
    pub diagonal: Vec<BigInt>,
    pub left: Matrix,
    pub left_inv: Matrix,
    pub right: Matrix,
    pub right_inv: Matrix,
    rows: usize,
    cols: usize,
}

impl SmithNormalForm {
    /// The reduced matrix as a full rows-by-cols matrix.
    pub fn diag_matrix(&self) -> Matrix {
        let mut m = Matrix::zero(self.rows, self.cols);
        for (i, d) in self.diagonal.iter().enumerate() {
            *m.at_mut(i, i) = d.clone();
        }
        m
    }

    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Quotient rounded to nearest, so `x - q * p` has magnitude at most `|p| / 2`.
fn rounded_div(x: &BigInt, p: &BigInt) -> BigInt {
    let mut q = x.div_floor(p);
    let r = x - &q * p;
    if r.magnitude() * 2u32 > *p.magnitude() {
        q += 1;
    }
    q
}

/// Compute the Smith normal form of `input`.
pub fn smith_normal_form(input: &Matrix) -> SmithNormalForm {
    let mut a = input.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut left = Matrix::identity(rows);
    let mut left_inv = Matrix::identity(rows);
    let mut right = Matrix::identity(cols);
    let mut right_inv = Matrix::identity(cols);

    // Elementary operations applied to `a` are mirrored on the transforms:
    // a row operation E gives left := E*left and left_inv := left_inv*E^-1,
    // a column operation E gives right := right*E and right_inv := E^-1*right_inv.
    macro_rules! swap_rows {
        ($i:expr, $j:expr) => {{
            a.swap_rows($i, $j);
            left.swap_rows($i, $j);
            left_inv.swap_cols($i, $j);
        }};
    }
    macro_rules! swap_cols {
        ($i:expr, $j:expr) => {{
            a.swap_cols($i, $j);
            right.swap_cols($i, $j);
            right_inv.swap_rows($i, $j);
        }};
    }
    macro_rules! add_row {
        ($i:expr, $t:expr, $k:expr) => {{
            let k: BigInt = $k;
            a.add_row_mult($i, $t, &k);
            left.add_row_mult($i, $t, &k);
            left_inv.add_col_mult($t, $i, &-k);
        }};
    }
    macro_rules! add_col {
        ($j:expr, $t:expr, $k:expr) => {{
            let k: BigInt = $k;
            a.add_col_mult($j, $t, &k);
            right.add_col_mult($j, $t, &k);
            right_inv.add_row_mult($t, $j, &-k);
        }};
    }

    let bound = rows.min(cols);
    'outer: for t in 0..bound {
        // Every pass re-selects the smallest remaining entry as the pivot
        // and reduces with nearest-rounded quotients, so remainders at
        // most halve; this keeps both the matrix and the transforms from
        // the coefficient explosion a fixed pivot suffers.
        'step: loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a.at(i, j).is_zero()
                        && pivot.is_none_or(|(pi, pj)| a.at(i, j).abs() < a.at(pi, pj).abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                // The whole remaining submatrix is zero.
                break 'outer;
            };
            if pi != t {
                swap_rows!(t, pi);
            }
            if pj != t {
                swap_cols!(t, pj);
            }
            // One reduction pass over column t and row t.  Any nonzero
            // remainder is at most half the pivot and gets picked next.
            let mut clear = true;
            for i in t + 1..rows {
                if !a.at(i, t).is_zero() {
                    let q = rounded_div(a.at(i, t), a.at(t, t));
                    add_row!(i, t, -q);
                    if !a.at(i, t).is_zero() {
                        clear = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !a.at(t, j).is_zero() {
                    let q = rounded_div(a.at(t, j), a.at(t, t));
                    add_col!(j, t, -q);
                    if !a.at(t, j).is_zero() {
                        clear = false;
                    }
                }
            }
            if !clear {
                continue 'step;
            }
            // The pivot must divide every entry of the remaining submatrix;
            // fold a violating row in, which plants a smaller remainder.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !a.at(i, j).mod_floor(a.at(t, t)).is_zero() {
                        add_row!(t, i, BigInt::one());
                        continue 'step;
                    }
                }
            }
            break;
        }
        if a.at(t, t).is_negative() {
            a.negate_row(t);
            left.negate_row(t);
            left_inv.negate_col(t);
        }
    }

    let diagonal = (0..bound).map(|t| a.at(t, t).clone()).collect();
    SmithNormalForm { diagonal, left, left_inv, right, right_inv, rows, cols }
}

/// Solve `a * x = b` over the integers (column-vector convention).
///
/// Returns one solution when the system is solvable, `None` otherwise.
pub fn solve(a: &Matrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "dimension mismatch");
    let snf = smith_normal_form(a);
    let c = snf.left.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, ci) in c.iter().enumerate() {
        let d = snf.diagonal.get(i).filter(|d| !d.is_zero());
        match d {
            Some(d) => {
                let (q, r) = ci.div_rem(d);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            }
            None => {
                if !ci.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(snf.right.mul_vec(&y))
}
