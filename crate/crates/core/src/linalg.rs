//! Dense exact linear algebra over the rationals: matrices, subspaces,
//! symmetric bilinear forms and their signatures.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, TripleError};

/// Arbitrary-precision rational scalar, always kept in lowest terms.
pub type Rational = BigRational;

/// Column vector of rationals.
pub type Vector = Vec<Rational>;

/// Rational from an integer.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(TripleError::Parse("empty rational".into()));
    }
    let bad = || TripleError::Parse(format!("not a rational: {t:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(TripleError::Parse(format!("zero denominator in {t:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Parses a comma separated list such as `"1, -2, 3/4"`; brackets are optional.
pub fn parse_list(s: &str) -> Result<Vector> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .enumerate()
        .map(|(k, x)| parse_rational(x).map_err(|e| TripleError::Parse(format!("list entry {}: {e}", k + 1))))
        .collect()
}

/// Formats as `"p"` for integers and `"p/q"` otherwise.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Floating approximation.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact square root of a nonnegative rational, if it is a rational square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn zero_vec(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Rational], s: &Rational) -> Vector {
    a.iter().map(|x| x * s).collect()
}

/// `acc += s * v`
pub fn axpy(acc: &mut [Rational], s: &Rational, v: &[Rational]) {
    if s.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += s * x;
        }
    }
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(fmt_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds from rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds from rows, with an explicit column count (handles zero rows).
    pub fn from_rows_with_cols(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        assert!(rows.iter().all(|row| row.len() == cols), "ragged rows");
        Matrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect())
    }

    /// Builds from column vectors of length `n`.
    pub fn from_columns(n: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n, "column length");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimensions");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&-Rational::one())
    }

    /// `AB - BA`
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// Entries flattened row-major.
    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Bilinear evaluation `xᵀ M y`.
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        dot(x, &self.mul_vec(y))
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        if !m[(r, j)].is_zero() {
                            let v = &f * &m[(r, j)];
                            m[(i, j)] -= v;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = zero_vec(self.cols);
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] / &piv;
                    for j in c..n {
                        let v = &f * &m[(c, j)];
                        m[(i, j)] -= v;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots) = aug.rref();
        if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
            return None;
        }
        let idx: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(r.submatrix(&idx, &cols))
    }

    /// Solves `A x = b`; returns a particular solution with free variables zero.
    pub fn solve(&self, b: &[Rational]) -> Option<Vector> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = zero_vec(self.cols);
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Matrix power for square matrices.
    pub fn pow(&self, k: usize) -> Matrix {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Float copy for approximate routines.
    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(to_f64).collect()
    }
}

/// Exact solution of `A x = b`, erroring on dimension mismatch or inconsistency.
pub fn solve_linear(a: &Matrix, b: &[Rational]) -> Result<Vector> {
    if a.rows() != b.len() {
        return Err(TripleError::DimensionMismatch(format!(
            "matrix has {} rows, right-hand side {}",
            a.rows(),
            b.len()
        )));
    }
    a.solve(b).ok_or(TripleError::Inconsistent)
}

/// Linear subspace of `Q^n`, stored canonically as a reduced echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vector>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<Vec<String>> =
            self.basis.iter().map(|v| v.iter().map(fmt_rational).collect()).collect();
        write!(f, "Subspace(n={}, basis={:?})", self.ambient_dim, b)
    }
}

impl Subspace {
    /// Span of the given vectors (which may be dependent).
    pub fn span(ambient_dim: usize, vectors: &[Vector]) -> Self {
        assert!(vectors.iter().all(|v| v.len() == ambient_dim), "vector length");
        let m = Matrix::from_rows_with_cols(vectors.to_vec(), ambient_dim);
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient_dim, basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: (0..ambient_dim).map(|i| unit_vec(ambient_dim, i)).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Canonical echelon basis.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Basis vectors as the columns of an `n × dim` matrix.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_columns(self.ambient_dim, &self.basis)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if is_zero_vec(v) {
            return true;
        }
        self.coordinates(v).is_some()
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` relative to the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vector> {
        if self.basis.is_empty() {
            return if is_zero_vec(v) { Some(Vec::new()) } else { None };
        }
        self.basis_matrix().solve(v)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Ok(Subspace::span(self.ambient_dim, &all))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        // Solve sum a_i u_i = sum b_j v_j.
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| vec_scale(v, &-Rational::one())));
        let m = Matrix::from_columns(self.ambient_dim, &cols);
        let vecs: Vec<Vector> = m
            .kernel()
            .into_iter()
            .map(|c| {
                let mut v = zero_vec(self.ambient_dim);
                for (i, u) in self.basis.iter().enumerate() {
                    axpy(&mut v, &c[i], u);
                }
                v
            })
            .collect();
        Ok(Subspace::span(self.ambient_dim, &vecs))
    }

    /// Vectors completing `inner`'s basis to a basis of `self` (echelon completion).
    pub fn quotient_basis(&self, inner: &Subspace) -> Result<Vec<Vector>> {
        self.check_same(inner)?;
        if !self.contains_space(inner) {
            return Err(TripleError::DimensionMismatch("inner space not contained".into()));
        }
        let mut current = inner.basis.clone();
        let mut out = Vec::new();
        let mut rank = inner.dim();
        for v in &self.basis {
            current.push(v.clone());
            let r = Matrix::from_rows_with_cols(current.clone(), self.ambient_dim).rank();
            if r > rank {
                rank = r;
                out.push(v.clone());
            } else {
                current.pop();
            }
        }
        Ok(out)
    }

    /// Image under a linear map.
    pub fn image(&self, a: &Matrix) -> Subspace {
        let vs: Vec<Vector> = self.basis.iter().map(|v| a.mul_vec(v)).collect();
        Subspace::span(a.rows(), &vs)
    }

    fn check_same(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(TripleError::DimensionMismatch(format!(
                "ambient {} vs {}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(())
    }
}

/// Symmetric bilinear form given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    gram: Matrix,
    nondegenerate: bool,
}

impl BilinearForm {
    /// Errors if the Gram matrix is not square and symmetric.
    pub fn new(gram: Matrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(TripleError::Symmetry("Gram matrix is not symmetric".into()));
        }
        let nondegenerate = gram.rank() == gram.rows();
        Ok(BilinearForm { gram, nondegenerate })
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.nondegenerate
    }

    pub fn eval(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.gram.bilinear(x, y)
    }

    /// Gram matrix of the restriction to the span of `vectors`.
    pub fn restrict(&self, vectors: &[Vector]) -> Matrix {
        let k = vectors.len();
        let gv: Vec<Vector> = vectors.iter().map(|v| self.gram.mul_vec(v)).collect();
        let mut m = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = dot(&vectors[i], &gv[j]);
            }
        }
        m
    }

    /// Gram matrix in a new basis given by the columns of `p`: `Pᵀ G P`.
    pub fn congruent(&self, p: &Matrix) -> Matrix {
        p.transpose().mul(&self.gram).mul(p)
    }
}

/// Congruence diagonalization: returns `(P, D)` with `Pᵀ G P = D` diagonal and `P` invertible.
///
/// Pivots on the diagonal entry of largest absolute value; when the remaining
/// diagonal vanishes, a hyperbolic pair `e_i + e_j` creates a nonzero pivot.
pub fn diagonalize_congruence(g: &Matrix) -> (Matrix, Matrix) {
    assert!(g.is_symmetric(), "congruence diagonalization needs a symmetric matrix");
    let n = g.rows();
    let mut a = g.clone();
    let mut p = Matrix::identity(n);
    for k in 0..n {
        let best = (k..n)
            .filter(|&i| !a[(i, i)].is_zero())
            .max_by(|&i, &j| a[(i, i)].abs().cmp(&a[(j, j)].abs()).then(j.cmp(&i)));
        let piv = match best {
            Some(i) => i,
            None => {
                let Some((i, j)) = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[(i, j)].is_zero())
                else {
                    break;
                };
                // e_i <- e_i + e_j gives diagonal entry 2 a_ij.
                add_congruence(&mut a, &mut p, i, j, &Rational::one());
                i
            }
        };
        if piv != k {
            a.swap_rows(piv, k);
            a.swap_cols(piv, k);
            p.swap_cols(piv, k);
        }
        let d = a[(k, k)].clone();
        for j in k + 1..n {
            if !a[(k, j)].is_zero() {
                let f = -(&a[(k, j)] / &d);
                add_congruence(&mut a, &mut p, j, k, &f);
            }
        }
    }
    (p, a)
}

/// Replaces basis vector `t` by `e_t + f e_s`, updating `A` by congruence and `P` by columns.
fn add_congruence(a: &mut Matrix, p: &mut Matrix, t: usize, s: usize, f: &Rational) {
    let n = a.rows();
    for i in 0..n {
        let v = f * &a[(i, s)];
        a[(i, t)] += v;
    }
    for j in 0..n {
        let v = f * &a[(s, j)];
        a[(t, j)] += v;
    }
    for i in 0..n {
        let v = f * &p[(i, s)];
        p[(i, t)] += v;
    }
}

/// Sylvester signature `(negative, positive, null)`.
pub fn signature(b: &BilinearForm) -> (usize, usize, usize) {
    signature_of(b.gram())
}

/// Signature of a symmetric matrix.
pub fn signature_of(g: &Matrix) -> (usize, usize, usize) {
    let (_, d) = diagonalize_congruence(g);
    let mut s = (0, 0, 0);
    for i in 0..d.rows() {
        match sign(&d[(i, i)]) {
            -1 => s.0 += 1,
            1 => s.1 += 1,
            _ => s.2 += 1,
        }
    }
    s
}

/// `{v : B(v, s) = 0 for all s in S}`.
pub fn orthogonal_complement(s: &Subspace, b: &BilinearForm) -> Result<Subspace> {
    if s.ambient_dim() != b.dim() {
        return Err(TripleError::DimensionMismatch("subspace and form".into()));
    }
    if s.is_zero() {
        return Ok(Subspace::full(b.dim()));
    }
    let rows: Vec<Vector> = s.basis().iter().map(|v| b.gram().mul_vec(v)).collect();
    let m = Matrix::from_rows_with_cols(rows, b.dim());
    Ok(Subspace::span(b.dim(), &m.kernel()))
}

/// True iff `B` vanishes on `S × S`.
pub fn is_totally_isotropic(s: &Subspace, b: &BilinearForm) -> bool {
    b.restrict(s.basis()).is_zero()
}

/// Radical `{v : B(v, ·) = 0}`.
pub fn radical(b: &BilinearForm) -> Subspace {
    Subspace::span(b.dim(), &b.gram().kernel())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), qi(-4));
        assert_eq!(parse_rational("-0.25").unwrap(), q(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(fmt_rational(&q(-3, 6)), "-1/2");
        assert_eq!(fmt_rational(&qi(7)), "7");
    }

    #[test]
    fn sqrt_detects_squares() {
        assert_eq!(rational_sqrt(&q(9, 4)), Some(q(3, 2)));
        assert_eq!(rational_sqrt(&qi(2)), None);
        assert_eq!(rational_sqrt(&qi(-1)), None);
    }

    #[test]
    fn signature_examples() {
        let s = |rows: &[Vec<i64>]| signature(&BilinearForm::new(Matrix::from_i64(rows)).unwrap());
        assert_eq!(s(&[vec![-1, 0], vec![0, 1]]), (1, 1, 0));
        assert_eq!(s(&[vec![0, 1], vec![1, 0]]), (1, 1, 0));
        assert_eq!(
            s(&[vec![2, 0, 0, 0], vec![0, 3, 0, 0], vec![0, 0, 0, 0], vec![0, 0, 0, -5]]),
            (1, 2, 1)
        );
    }

    #[test]
    fn congruence_diagonalizes() {
        let g = Matrix::from_i64(&[vec![0, 1, 2], vec![1, 0, 3], vec![2, 3, 0]]);
        let (p, d) = diagonalize_congruence(&g);
        assert_eq!(p.transpose().mul(&g).mul(&p), d);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(d[(i, j)].is_zero());
                }
            }
        }
        assert!(!p.determinant().is_zero());
    }

    #[test]
    fn complement_examples() {
        let i3 = BilinearForm::new(Matrix::identity(3)).unwrap();
        let s = Subspace::span(3, &[unit_vec(3, 0)]);
        assert_eq!(
            orthogonal_complement(&s, &i3).unwrap(),
            Subspace::span(3, &[unit_vec(3, 1), unit_vec(3, 2)])
        );
        let b = BilinearForm::new(Matrix::diag(&[qi(-1), qi(1), qi(1)])).unwrap();
        let f = Subspace::span(3, &[vec![qi(1), qi(1), qi(0)]]);
        assert_eq!(
            orthogonal_complement(&f, &b).unwrap(),
            Subspace::span(3, &[vec![qi(1), qi(1), qi(0)], unit_vec(3, 2)])
        );
        assert!(orthogonal_complement(&Subspace::full(3), &b).unwrap().is_zero());
    }

    #[test]
    fn subspace_ops() {
        let a = Subspace::span(3, &[unit_vec(3, 0), unit_vec(3, 1)]);
        let b = Subspace::span(3, &[unit_vec(3, 1), unit_vec(3, 2)]);
        assert_eq!(a.intersect(&b).unwrap(), Subspace::span(3, &[unit_vec(3, 1)]));
        let e1 = Subspace::span(3, &[unit_vec(3, 0)]);
        assert_eq!(e1.sum(&e1).unwrap(), e1);
        assert_eq!(solve_linear(&Matrix::identity(2), &[qi(3), qi(4)]).unwrap(), vec![qi(3), qi(4)]);
        assert!(a.intersect(&Subspace::zero(4)).is_err());
        let comp = Subspace::full(3).quotient_basis(&a).unwrap();
        assert_eq!(comp.len(), 1);
        assert_eq!(a.sum(&Subspace::span(3, &comp)).unwrap(), Subspace::full(3));
    }

    #[test]
    fn isotropy_examples() {
        let b = BilinearForm::new(Matrix::from_i64(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]))
            .unwrap();
        let s = Subspace::span(3, &[vec![qi(1), qi(0), qi(1)]]);
        assert!(!is_totally_isotropic(&s, &b));
        let h = BilinearForm::new(Matrix::from_i64(&[vec![0, 1], vec![1, 0]])).unwrap();
        assert!(is_totally_isotropic(&Subspace::span(2, &[unit_vec(2, 0)]), &h));
        assert!(is_totally_isotropic(&Subspace::zero(2), &h));
    }

    #[test]
    fn inverse_and_determinant() {
        let m = Matrix::from_i64(&[vec![2, 1], vec![7, 4]]);
        assert_eq!(m.determinant(), qi(1));
        assert_eq!(m.mul(&m.inverse().unwrap()), Matrix::identity(2));
        assert!(Matrix::from_i64(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }
}
