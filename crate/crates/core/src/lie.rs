//! Lie algebras given by structure constants, optionally carrying a symmetric
//! bilinear form, with the structural predicates used throughout the crate.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Result, TripleError};
use crate::linalg::{
    axpy, is_zero_vec, orthogonal_complement, zero_vec, BilinearForm, Matrix, Rational, Subspace,
    Vector,
};

/// Structure constants `[e_i, e_j] = Σ_k c_ij^k e_k`, stored for `i < j` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    labels: Vec<String>,
    consts: Vec<Vector>,
}

/// Nonzero Jacobi residual `Σ_cyc [[e_i, e_j], e_k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiViolation {
    pub indices: (usize, usize, usize),
    #[serde(serialize_with = "crate::json::ser_vec")]
    pub residual: Vector,
}

/// Nonzero value of `B([e_i, e_j], e_k) + B(e_j, [e_i, e_k])`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceViolation {
    pub indices: (usize, usize, usize),
    #[serde(serialize_with = "crate::json::ser_rat")]
    pub residual: Rational,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

impl LieAlgebra {
    /// Abelian algebra with the given labels.
    pub fn abelian(labels: Vec<String>) -> Self {
        let n = labels.len();
        LieAlgebra { dim: n, labels, consts: vec![zero_vec(n); n * n.saturating_sub(1) / 2] }
    }

    /// Builds from bracket entries `(i, j, [e_i, e_j])`. Entries with `i > j` are
    /// antisymmetrized; a contradicting pair or a nonzero `[e_i, e_i]` is an error.
    pub fn from_brackets(labels: Vec<String>, entries: &[(usize, usize, Vector)]) -> Result<Self> {
        let mut alg = Self::abelian(labels);
        let n = alg.dim;
        let mut seen = vec![false; alg.consts.len()];
        for (i, j, v) in entries {
            let (i, j) = (*i, *j);
            if i >= n || j >= n || v.len() != n {
                return Err(TripleError::DimensionMismatch(format!("bracket ({i},{j})")));
            }
            if i == j {
                if !is_zero_vec(v) {
                    return Err(TripleError::Symmetry(format!("[e_{i}, e_{i}] is nonzero")));
                }
                continue;
            }
            let (a, b, w) = if i < j {
                (i, j, v.clone())
            } else {
                (j, i, v.iter().map(|x| -x).collect())
            };
            let k = pair_index(n, a, b);
            if seen[k] && alg.consts[k] != w {
                return Err(TripleError::Symmetry(format!("bracket ({a},{b}) given inconsistently")));
            }
            seen[k] = true;
            alg.consts[k] = w;
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Sets `[e_i, e_j] = v` (and `[e_j, e_i] = -v`).
    pub fn set_bracket(&mut self, i: usize, j: usize, v: Vector) {
        assert!(i != j, "cannot set [e_i, e_i]");
        if i < j {
            let k = pair_index(self.dim, i, j);
            self.consts[k] = v;
        } else {
            let k = pair_index(self.dim, j, i);
            self.consts[k] = v.iter().map(|x| -x).collect();
        }
    }

    /// `[e_i, e_j]`
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.consts[pair_index(self.dim, i, j)].clone(),
            Greater => self.consts[pair_index(self.dim, j, i)].iter().map(|x| -x).collect(),
            Equal => zero_vec(self.dim),
        }
    }

    /// Accumulates `s · [e_i, e_j]` into `acc`.
    fn add_bracket_basis(&self, acc: &mut [Rational], s: &Rational, i: usize, j: usize) {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => axpy(acc, s, &self.consts[pair_index(self.dim, i, j)]),
            Greater => axpy(acc, &-s, &self.consts[pair_index(self.dim, j, i)]),
            Equal => {}
        }
    }

    /// `[x, y]`
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vector {
        let mut out = zero_vec(self.dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || i == j {
                    continue;
                }
                self.add_bracket_basis(&mut out, &(xi * yj), i, j);
            }
        }
        out
    }

    /// `[x, e_k]`
    pub fn bracket_with_basis(&self, x: &[Rational], k: usize) -> Vector {
        let mut out = zero_vec(self.dim);
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero() {
                self.add_bracket_basis(&mut out, xi, i, k);
            }
        }
        out
    }

    /// Matrix of `ad x`; column `j` holds `[x, e_j]`.
    pub fn ad(&self, x: &[Rational]) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim).map(|j| self.bracket_with_basis(x, j)).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    pub fn ad_basis(&self, i: usize) -> Matrix {
        let cols: Vec<Vector> = (0..self.dim).map(|j| self.bracket_basis(i, j)).collect();
        Matrix::from_columns(self.dim, &cols)
    }

    /// Every nonzero cyclic sum `Σ_cyc [[e_i, e_j], e_k]` for `i < j < k`.
    pub fn check_jacobi(&self) -> Vec<JacobiViolation> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let ij = self.bracket_basis(i, j);
                for k in j + 1..n {
                    let mut r = self.bracket_with_basis(&ij, k);
                    let jk = self.bracket_basis(j, k);
                    let t = self.bracket_with_basis(&jk, i);
                    axpy(&mut r, &Rational::from_integer(1.into()), &t);
                    let ki = self.bracket_basis(k, i);
                    let t = self.bracket_with_basis(&ki, j);
                    axpy(&mut r, &Rational::from_integer(1.into()), &t);
                    if !is_zero_vec(&r) {
                        out.push(JacobiViolation { indices: (i, j, k), residual: r });
                    }
                }
            }
        }
        out
    }

    /// `span{[a, b] : a ∈ A, b ∈ B}`
    pub fn bracket_spaces(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut vs = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                let v = self.bracket(x, y);
                if !is_zero_vec(&v) {
                    vs.push(v);
                }
            }
        }
        Subspace::span(self.dim, &vs)
    }

    /// `[g, g]`
    pub fn derived_algebra(&self) -> Subspace {
        Subspace::span(self.dim, &self.consts)
    }

    /// `g ⊇ [g,g] ⊇ [[g,g],[g,g]] ⊇ …` until it stabilizes.
    pub fn derived_series(&self) -> Vec<Subspace> {
        let mut series = vec![Subspace::full(self.dim)];
        loop {
            let last = series.last().unwrap();
            let next = self.bracket_spaces(last, last);
            if &next == last {
                break;
            }
            let done = next.is_zero();
            series.push(next);
            if done {
                break;
            }
        }
        series
    }

    /// `g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ …` until it stabilizes.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let full = Subspace::full(self.dim);
        let mut series = vec![full.clone()];
        loop {
            let last = series.last().unwrap();
            let next = self.bracket_spaces(&full, last);
            if &next == last {
                break;
            }
            let done = next.is_zero();
            series.push(next);
            if done {
                break;
            }
        }
        series
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().is_some_and(Subspace::is_zero)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last().is_some_and(Subspace::is_zero)
    }

    /// `{x : [x, g] = 0}`
    pub fn center_by_kernel(&self) -> Subspace {
        let n = self.dim;
        // Row (j, k) of the stacked system: ([x, e_j])_k = 0.
        let mut rows = Vec::with_capacity(n * n);
        for j in 0..n {
            let mut block = vec![zero_vec(n); n];
            for i in 0..n {
                let b = self.bracket_basis(i, j);
                for (k, v) in b.into_iter().enumerate() {
                    block[k][i] = v;
                }
            }
            rows.extend(block.into_iter().filter(|r| !is_zero_vec(r)));
        }
        let m = Matrix::from_rows_with_cols(rows, n);
        Subspace::span(n, &m.kernel())
    }

    /// Killing form `K(x, y) = tr(ad x ∘ ad y)`.
    pub fn killing_form(&self) -> BilinearForm {
        let ads: Vec<Matrix> = (0..self.dim).map(|i| self.ad_basis(i)).collect();
        let mut k = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in i..self.dim {
                let t = ads[i].mul(&ads[j]).trace();
                k[(i, j)] = t.clone();
                k[(j, i)] = t;
            }
        }
        BilinearForm::new(k).expect("Killing form is symmetric")
    }

    /// Same algebra in a new basis: column `k` of `p` is the new `e'_k` in old coordinates.
    pub fn change_basis(&self, p: &Matrix, labels: Vec<String>) -> Result<LieAlgebra> {
        let pinv = p
            .inverse()
            .ok_or_else(|| TripleError::InvalidParameters("basis change is singular".into()))?;
        let cols = p.columns();
        let mut out = LieAlgebra::abelian(labels);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let v = self.bracket(&cols[i], &cols[j]);
                out.set_bracket(i, j, pinv.mul_vec(&v));
            }
        }
        Ok(out)
    }
}

/// Lie algebra with a symmetric bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricLieAlgebra {
    pub algebra: LieAlgebra,
    pub form: BilinearForm,
}

impl MetricLieAlgebra {
    pub fn new(algebra: LieAlgebra, form: BilinearForm) -> Result<Self> {
        if algebra.dim() != form.dim() {
            return Err(TripleError::DimensionMismatch("algebra and form".into()));
        }
        Ok(MetricLieAlgebra { algebra, form })
    }

    /// Every nonzero `B([e_i, e_j], e_k) + B(e_j, [e_i, e_k])`.
    pub fn check_ad_invariance(&self) -> Vec<InvarianceViolation> {
        let n = self.algebra.dim();
        let g = self.form.gram();
        let mut out = Vec::new();
        for i in 0..n {
            let ad = self.algebra.ad_basis(i);
            // (adᵀ G + G ad)_{jk} = B([e_i,e_j], e_k) + B(e_j, [e_i,e_k])
            let s = ad.transpose().mul(g).add(&g.mul(&ad));
            for j in 0..n {
                for k in j..n {
                    if !s[(j, k)].is_zero() {
                        out.push(InvarianceViolation { indices: (i, j, k), residual: s[(j, k)].clone() });
                    }
                }
            }
        }
        out
    }

    /// Center, cross-checked against `[g,g]^⊥`.
    pub fn center(&self) -> Result<Subspace> {
        if !self.form.is_nondegenerate() {
            return Err(TripleError::DegenerateForm("center needs a nondegenerate form".into()));
        }
        let z = self.algebra.center_by_kernel();
        let perp = orthogonal_complement(&self.algebra.derived_algebra(), &self.form)?;
        if z != perp {
            return Err(TripleError::InvalidTriple(
                "center differs from [g,g]^⊥; the form is not ad-invariant".into(),
            ));
        }
        Ok(z)
    }

    /// For a nilpotent metric algebra of dimension at least two: `dim z ≥ 2`.
    pub fn nilpotent_center_bound_check(&self) -> Result<bool> {
        if self.algebra.dim() < 2 {
            return Err(TripleError::InvalidParameters("dimension below 2".into()));
        }
        if !self.algebra.is_nilpotent() {
            return Err(TripleError::InvalidParameters("algebra is not nilpotent".into()));
        }
        if !self.check_ad_invariance().is_empty() {
            return Err(TripleError::InvalidParameters("form is not ad-invariant".into()));
        }
        Ok(self.center()?.dim() >= 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{qi, unit_vec};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("e{}", i + 1)).collect()
    }

    fn heisenberg() -> LieAlgebra {
        LieAlgebra::from_brackets(labels(3), &[(0, 1, unit_vec(3, 2))]).unwrap()
    }

    #[test]
    fn abelian_is_trivial() {
        let a = LieAlgebra::abelian(labels(3));
        assert!(a.check_jacobi().is_empty());
        assert!(a.is_nilpotent() && a.is_solvable());
        assert_eq!(a.center_by_kernel(), Subspace::full(3));
        assert!(a.killing_form().gram().is_zero());
        let m = MetricLieAlgebra::new(a, BilinearForm::new(Matrix::identity(3)).unwrap()).unwrap();
        assert!(m.check_ad_invariance().is_empty());
        assert_eq!(m.center().unwrap(), Subspace::full(3));
    }

    #[test]
    fn heisenberg_structure() {
        let h = heisenberg();
        assert!(h.check_jacobi().is_empty());
        assert!(h.is_nilpotent());
        assert_eq!(h.bracket_basis(1, 0), vec![qi(0), qi(0), qi(-1)]);
        assert_eq!(h.center_by_kernel(), Subspace::span(3, &[unit_vec(3, 2)]));
    }

    #[test]
    fn jacobi_failure_detected() {
        // [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e1 is not a Lie algebra.
        let a = LieAlgebra::from_brackets(
            labels(3),
            &[(0, 1, unit_vec(3, 2)), (1, 2, unit_vec(3, 0)), (2, 0, unit_vec(3, 0))],
        )
        .unwrap();
        assert_eq!(a.check_jacobi().len(), 1);
    }

    #[test]
    fn inconsistent_brackets_rejected() {
        let r = LieAlgebra::from_brackets(
            labels(2),
            &[(0, 1, unit_vec(2, 0)), (1, 0, unit_vec(2, 0))],
        );
        assert!(r.is_err());
    }

    #[test]
    fn solvable_not_nilpotent() {
        // [e1, e2] = e2
        let a = LieAlgebra::from_brackets(labels(2), &[(0, 1, unit_vec(2, 1))]).unwrap();
        assert!(a.is_solvable() && !a.is_nilpotent());
        assert_eq!(a.killing_form().gram()[(0, 0)], qi(1));
    }

    #[test]
    fn change_basis_roundtrip() {
        let h = heisenberg();
        let p = Matrix::from_i64(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 2]]);
        let h2 = h.change_basis(&p, labels(3)).unwrap();
        assert!(h2.check_jacobi().is_empty());
        let back = h2.change_basis(&p.inverse().unwrap(), labels(3)).unwrap();
        assert_eq!(back, h);
    }
}
