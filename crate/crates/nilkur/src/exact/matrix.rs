use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gaussian::{GaussianRational, Rational};

/// Dense matrix over the Gaussian rationals, stored row-major.
///
/// All eliminations use exact arithmetic with a fixed pivoting rule (first
/// nonzero entry scanning rows top to bottom, columns left to right), so
/// every derived object — rank, kernel basis, solutions — is deterministic.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExactMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, GaussianRational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ExactMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(cols: Vec<Vec<GaussianRational>>, dim: usize) -> Self {
        let c = cols.len();
        assert!(cols.iter().all(|col| col.len() == dim), "ragged columns");
        let mut m = ExactMatrix::zeros(dim, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> GaussianRational,
    ) -> Self {
        let mut m = ExactMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
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

    pub fn entry(&self, i: usize, j: usize) -> &GaussianRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussianRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[GaussianRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<GaussianRational> {
        (0..self.rows).map(|i| self.entry(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn conj_transpose(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.cols, self.rows, |i, j| self.entry(j, i).conj())
    }

    pub fn scale(&self, c: &GaussianRational) -> ExactMatrix {
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j) * c)
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        ExactMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = GaussianRational::zero();
            for k in 0..self.cols {
                acc += &(self.entry(i, k) * other.entry(k, j));
            }
            acc
        })
    }

    /// Entrywise sum `self + other`.
    pub fn add(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.rows, other.rows, "row count mismatch");
        assert_eq!(self.cols, other.cols, "column count mismatch");
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.entry(i, j) + other.entry(i, j)
        })
    }

    pub fn mul_vec(&self, v: &[GaussianRational]) -> Vec<GaussianRational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = GaussianRational::zero();
                for (j, vj) in v.iter().enumerate() {
                    acc += &(self.entry(i, j) * vj);
                }
                acc
            })
            .collect()
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        ExactMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Reduced row echelon form together with the pivot column indices.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..m.cols {
            if pivot_row >= m.rows {
                break;
            }
            // First nonzero entry in this column at or below pivot_row.
            let Some(src) = (pivot_row..m.rows).find(|&r| !m.entry(r, col).is_zero()) else {
                continue;
            };
            if src != pivot_row {
                for j in 0..m.cols {
                    m.data.swap(pivot_row * m.cols + j, src * m.cols + j);
                }
            }
            let inv = m.entry(pivot_row, col).inv().expect("pivot is nonzero");
            for j in col..m.cols {
                let v = m.entry(pivot_row, j) * &inv;
                m.set(pivot_row, j, v);
            }
            for r in 0..m.rows {
                if r == pivot_row || m.entry(r, col).is_zero() {
                    continue;
                }
                let factor = m.entry(r, col).clone();
                for j in col..m.cols {
                    let v = m.entry(r, j) - &(&factor * m.entry(pivot_row, j));
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one vector per free column, ordered by
    /// the free column index.
    pub fn kernel_basis(&self) -> Vec<Vec<GaussianRational>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![GaussianRational::zero(); self.cols];
            v[free] = GaussianRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.entry(i, free);
            }
            basis.push(v);
        }
        basis
    }

    /// The original columns at the pivot positions: a basis of the column
    /// space.
    pub fn column_space_basis(&self) -> Vec<Vec<GaussianRational>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&j| self.col(j)).collect()
    }

    /// One particular solution of `self * x = b` (free variables set to
    /// zero), or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[GaussianRational]) -> Option<Vec<GaussianRational>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = ExactMatrix::zeros(self.rows, self.cols + 1);
        for (i, rhs) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.entry(i, j).clone());
            }
            aug.set(i, self.cols, rhs.clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // a row reads 0 = 1
        }
        let mut x = vec![GaussianRational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.entry(i, self.cols).clone();
        }
        Some(x)
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.entry(i, j) + rhs.entry(i, j)
        })
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "shape mismatch"
        );
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.entry(i, j) - rhs.entry(i, j)
        })
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| -self.entry(i, j))
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        ExactMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = GaussianRational::zero();
            for k in 0..self.cols {
                acc += &(self.entry(i, k) * rhs.entry(k, j));
            }
            acc
        })
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Inner product `sum_i w_i * conj(u_i) * v_i`; the plain Hermitian product
/// when all weights are 1.
pub fn weighted_inner(
    u: &[GaussianRational],
    v: &[GaussianRational],
    weight: &[Rational],
) -> GaussianRational {
    let mut acc = GaussianRational::zero();
    for i in 0..u.len() {
        let w = GaussianRational::from_rational(weight[i].clone());
        acc += &(&(&u[i].conj() * &v[i]) * &w);
    }
    acc
}

/// Basis of the orthogonal complement of `span` inside the standard
/// Hermitian inner-product space of dimension `dim`.
pub fn hermitian_complement(
    span: &[Vec<GaussianRational>],
    dim: usize,
) -> Vec<Vec<GaussianRational>> {
    // u is orthogonal to v exactly when the row conj(v) annihilates u.
    let rows: Vec<Vec<GaussianRational>> = span
        .iter()
        .map(|v| {
            assert_eq!(v.len(), dim, "spanning vector has wrong length");
            v.iter().map(|x| x.conj()).collect()
        })
        .collect();
    if rows.is_empty() {
        return ExactMatrix::zeros(0, dim).kernel_basis();
    }
    ExactMatrix::from_rows(rows).kernel_basis()
}

/// Orthogonal projection of `y` onto the span of `basis` with respect to the
/// weighted inner product.
pub fn project_onto_span(
    basis: &[Vec<GaussianRational>],
    y: &[GaussianRational],
    weight: &[Rational],
) -> Vec<GaussianRational> {
    if basis.is_empty() {
        return vec![GaussianRational::zero(); y.len()];
    }
    let k = basis.len();
    let gram = ExactMatrix::from_fn(k, k, |a, b| weighted_inner(&basis[a], &basis[b], weight));
    let rhs: Vec<GaussianRational> = (0..k)
        .map(|a| weighted_inner(&basis[a], y, weight))
        .collect();
    let z = gram
        .solve(&rhs)
        .expect("Gram matrix of a basis is invertible");
    let mut proj = vec![GaussianRational::zero(); y.len()];
    for (za, va) in z.iter().zip(basis) {
        for (p, x) in proj.iter_mut().zip(va) {
            *p += &(za * x);
        }
    }
    proj
}

/// Solves `a * x = proj_im(y)` for the unique `x` orthogonal to `ker a`,
/// where `a` must be self-adjoint with respect to the weighted inner product
/// (`w_i * a[i][j] == conj(a[j][i]) * w_j`). For such an operator the image
/// is exactly the orthogonal complement of the kernel, so the projected
/// right-hand side is always attainable.
pub fn hermitian_solve_weighted(
    a: &ExactMatrix,
    y: &[GaussianRational],
    weight: &[Rational],
) -> Vec<GaussianRational> {
    assert_eq!(a.rows(), a.cols(), "operator must be square");
    assert_eq!(y.len(), a.rows(), "vector length mismatch");
    assert_eq!(weight.len(), a.rows(), "weight length mismatch");
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let lhs = a.entry(i, j) * &GaussianRational::from_rational(weight[i].clone());
            let rhs = a.entry(j, i).conj() * GaussianRational::from_rational(weight[j].clone());
            assert!(
                lhs == rhs,
                "operator is not self-adjoint for the given weights"
            );
        }
    }
    let kernel = a.kernel_basis();
    let proj_y = project_onto_span(&kernel, y, weight);
    let y_perp: Vec<GaussianRational> = y.iter().zip(&proj_y).map(|(u, p)| u - p).collect();
    let x_part = a
        .solve(&y_perp)
        .expect("projected vector lies in the image");
    let proj_x = project_onto_span(&kernel, &x_part, weight);
    x_part.iter().zip(&proj_x).map(|(u, p)| u - p).collect()
}

/// `hermitian_solve_weighted` with all weights equal to 1 (the standard
/// Hermitian inner product).
pub fn hermitian_solve(a: &ExactMatrix, y: &[GaussianRational]) -> Vec<GaussianRational> {
    let weight = vec![Rational::from_integer(1.into()); y.len()];
    hermitian_solve_weighted(a, y, &weight)
}
