//! Symmetric triples `(h ⊕ m, B)`: verification, invariant extension of the
//! form from `m` to `h`, curvature, Ricci form, direct sums, restriction to
//! invariant subspaces and a decomposability decider.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Result, TripleError};
use crate::lie::{JacobiViolation, LieAlgebra, MetricLieAlgebra};
use crate::linalg::{
    dot, is_zero_vec, qi, signature_of, unit_vec, zero_vec, BilinearForm, Matrix, Rational,
    Subspace, Vector,
};
use crate::poly::minimal_polynomial;

/// A Lie algebra graded as `h ⊕ m` with a form on `m`, before the form has
/// been extended to `h`. The involution is the grading: `+1` on `h`, `-1` on `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    pub algebra: LieAlgebra,
    pub h_indices: Vec<usize>,
    pub m_indices: Vec<usize>,
    pub gram_m: Matrix,
}

/// `(g, σ, B)` with `g = h ⊕ m`; σ is implicit in the index sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricTriple {
    metric: MetricLieAlgebra,
    h_idx: Vec<usize>,
    m_idx: Vec<usize>,
}

/// Pass/fail per axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub grading: bool,
    pub jacobi: bool,
    pub h_equals_mm: bool,
    pub h_orthogonal_m: bool,
    pub ad_invariant: bool,
    pub m_nondegenerate: bool,
    pub h_nondegenerate: bool,
    pub faithful: bool,
    /// `(negative, positive, null)` of `B|m`.
    pub signature_m: (usize, usize, usize),
    pub jacobi_violations: Vec<JacobiViolation>,
    pub messages: Vec<String>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.grading
            && self.jacobi
            && self.h_equals_mm
            && self.h_orthogonal_m
            && self.ad_invariant
            && self.m_nondegenerate
            && self.h_nondegenerate
            && self.faithful
    }
}

/// `R(X,Y,U,V) = B([[X,Y],U],V)` over a basis of `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTensor {
    dim: usize,
    entries: Vec<Rational>,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &Rational {
        let n = self.dim;
        &self.entries[((a * n + b) * n + c) * n + d]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Index tuples violating pair symmetry, either skew symmetry or first Bianchi.
    pub fn symmetry_violations(&self) -> Vec<(&'static str, [usize; 4])> {
        let n = self.dim;
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let r = self.get(a, b, c, d);
                        if r != self.get(c, d, a, b) {
                            out.push(("pair", [a, b, c, d]));
                        }
                        if *r != -self.get(b, a, c, d) {
                            out.push(("skew12", [a, b, c, d]));
                        }
                        if *r != -self.get(a, b, d, c) {
                            out.push(("skew34", [a, b, c, d]));
                        }
                        let bianchi = r + self.get(b, c, a, d) + self.get(c, a, b, d);
                        if !bianchi.is_zero() {
                            out.push(("bianchi", [a, b, c, d]));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Outcome of the decomposability decider.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposability {
    /// `m = m1 ⊥ m2`, both invariant and nonsingular (coordinates on `m`).
    Decomposable { m1: Subspace, m2: Subspace },
    Indecomposable(IndecomposableReason),
    Unknown,
}

/// Which argument certified indecomposability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IndecomposableReason {
    /// `dim m ≤ 1`.
    TooSmall,
    /// The commutant of `ad(h)|m` is a local algebra (scalars plus radical).
    LocalCommutant,
    /// Solvable with one-dimensional center.
    OneDimensionalCenter,
    /// Maximal center, least nilpotent and `dim Y > p(p-2)/2`.
    DimYBound { dim_y: usize, p: usize },
}

impl SymmetricTriple {
    /// Wraps raw data; only the index partition is checked here, the axioms are
    /// checked by [`SymmetricTriple::verify`].
    pub fn new(
        algebra: LieAlgebra,
        form: BilinearForm,
        h_indices: Vec<usize>,
        m_indices: Vec<usize>,
    ) -> Result<Self> {
        let n = algebra.dim();
        let mut seen = vec![false; n];
        for &i in h_indices.iter().chain(&m_indices) {
            if i >= n || seen[i] {
                return Err(TripleError::InvalidTriple(
                    "h_indices and m_indices must partition the basis".into(),
                ));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(TripleError::InvalidTriple(
                "h_indices and m_indices must partition the basis".into(),
            ));
        }
        let metric = MetricLieAlgebra::new(algebra, form)?;
        Ok(SymmetricTriple { metric, h_idx: h_indices, m_idx: m_indices })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.metric.algebra
    }

    pub fn form(&self) -> &BilinearForm {
        &self.metric.form
    }

    pub fn metric(&self) -> &MetricLieAlgebra {
        &self.metric
    }

    pub fn h_indices(&self) -> &[usize] {
        &self.h_idx
    }

    pub fn m_indices(&self) -> &[usize] {
        &self.m_idx
    }

    pub fn dim(&self) -> usize {
        self.algebra().dim()
    }

    pub fn dim_m(&self) -> usize {
        self.m_idx.len()
    }

    pub fn dim_h(&self) -> usize {
        self.h_idx.len()
    }

    pub fn m_labels(&self) -> Vec<String> {
        self.m_idx.iter().map(|&i| self.algebra().labels()[i].clone()).collect()
    }

    pub fn h_labels(&self) -> Vec<String> {
        self.h_idx.iter().map(|&i| self.algebra().labels()[i].clone()).collect()
    }

    /// Position of a basis label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.algebra().labels().iter().position(|l| l == label)
    }

    /// Position of a label within the `m` basis.
    pub fn m_position(&self, label: &str) -> Option<usize> {
        let i = self.index_of(label)?;
        self.m_idx.iter().position(|&j| j == i)
    }

    /// Position of a label within the `h` basis.
    pub fn h_position(&self, label: &str) -> Option<usize> {
        let i = self.index_of(label)?;
        self.h_idx.iter().position(|&j| j == i)
    }

    /// Embeds `m` coordinates into `g`.
    pub fn embed_m(&self, x: &[Rational]) -> Vector {
        let mut v = zero_vec(self.dim());
        for (k, &i) in self.m_idx.iter().enumerate() {
            v[i] = x[k].clone();
        }
        v
    }

    /// Embeds `h` coordinates into `g`.
    pub fn embed_h(&self, x: &[Rational]) -> Vector {
        let mut v = zero_vec(self.dim());
        for (k, &i) in self.h_idx.iter().enumerate() {
            v[i] = x[k].clone();
        }
        v
    }

    pub fn m_part(&self, v: &[Rational]) -> Vector {
        self.m_idx.iter().map(|&i| v[i].clone()).collect()
    }

    pub fn h_part(&self, v: &[Rational]) -> Vector {
        self.h_idx.iter().map(|&i| v[i].clone()).collect()
    }

    /// Gram matrix of `B|m` in the `m` basis.
    pub fn gram_m(&self) -> Matrix {
        self.form().gram().submatrix(&self.m_idx, &self.m_idx)
    }

    /// Gram matrix of `B|h` in the `h` basis.
    pub fn gram_h(&self) -> Matrix {
        self.form().gram().submatrix(&self.h_idx, &self.h_idx)
    }

    /// `[m_a, m_b]` in `h` coordinates.
    pub fn bracket_mm(&self, a: usize, b: usize) -> Vector {
        self.h_part(&self.algebra().bracket_basis(self.m_idx[a], self.m_idx[b]))
    }

    /// `[x, y]` for `x, y ∈ m` (coordinates on `m`), returned in `h` coordinates.
    pub fn bracket_m_vectors(&self, x: &[Rational], y: &[Rational]) -> Vector {
        self.h_part(&self.algebra().bracket(&self.embed_m(x), &self.embed_m(y)))
    }

    /// Matrix of `ad(x)|m` for `x ∈ h` given in `h` coordinates.
    pub fn ad_h_on_m(&self, x: &[Rational]) -> Matrix {
        let xv = self.embed_h(x);
        let cols: Vec<Vector> = self
            .m_idx
            .iter()
            .map(|&j| self.m_part(&self.algebra().bracket_with_basis(&xv, j)))
            .collect();
        Matrix::from_columns(self.dim_m(), &cols)
    }

    /// `ad(h_k)|m` for each `h` basis vector.
    pub fn holonomy_matrices(&self) -> Vec<Matrix> {
        (0..self.dim_h()).map(|k| self.ad_h_on_m(&unit_vec(self.dim_h(), k))).collect()
    }

    /// `ad(x)` restricted to `m` and projected to `m`, for `x ∈ m`; maps `h → m`.
    pub fn ad_m_on_h(&self, x: &[Rational]) -> Matrix {
        let xv = self.embed_m(x);
        let cols: Vec<Vector> = self
            .h_idx
            .iter()
            .map(|&j| self.m_part(&self.algebra().bracket_with_basis(&xv, j)))
            .collect();
        Matrix::from_columns(self.dim_m(), &cols)
    }

    /// Checks every axiom and reports each separately.
    pub fn verify(&self) -> VerifyReport {
        let alg = self.algebra();
        let n = alg.dim();
        let mut messages = Vec::new();
        let is_h: Vec<bool> = (0..n).map(|i| self.h_idx.contains(&i)).collect();

        let mut grading = true;
        for i in 0..n {
            for j in i + 1..n {
                let v = alg.bracket_basis(i, j);
                let target_h = is_h[i] == is_h[j];
                if v.iter().enumerate().any(|(k, c)| !c.is_zero() && is_h[k] != target_h) {
                    grading = false;
                    messages.push(format!("grading fails at [{}, {}]", alg.labels()[i], alg.labels()[j]));
                }
            }
        }

        let jacobi_violations = alg.check_jacobi();
        let jacobi = jacobi_violations.is_empty();
        if !jacobi {
            messages.push(format!("{} Jacobi violations", jacobi_violations.len()));
        }

        let dm = self.dim_m();
        let mut mm = Vec::new();
        for a in 0..dm {
            for b in a + 1..dm {
                mm.push(self.bracket_mm(a, b));
            }
        }
        let h_equals_mm = Subspace::span(self.dim_h(), &mm).dim() == self.dim_h();
        if !h_equals_mm {
            messages.push("h is larger than [m, m]".into());
        }

        let g = self.form().gram();
        let h_orthogonal_m = self.h_idx.iter().all(|&i| self.m_idx.iter().all(|&j| g[(i, j)].is_zero()));
        if !h_orthogonal_m {
            messages.push("B(h, m) is not zero".into());
        }

        let inv = self.metric.check_ad_invariance();
        let ad_invariant = inv.is_empty();
        if !ad_invariant {
            messages.push(format!("{} ad-invariance violations", inv.len()));
        }

        let gm = self.gram_m();
        let gh = self.gram_h();
        let m_nondegenerate = gm.rank() == dm;
        let h_nondegenerate = gh.rank() == self.dim_h();
        if !m_nondegenerate {
            messages.push("B|m is degenerate".into());
        }
        if !h_nondegenerate {
            messages.push("B|h is degenerate".into());
        }

        let kernel = self.faithfulness_kernel_dim();
        let faithful = kernel == 0;
        if !faithful {
            messages.push(format!("ad(h)|m has kernel of dimension {kernel}"));
        }

        VerifyReport {
            grading,
            jacobi,
            h_equals_mm,
            h_orthogonal_m,
            ad_invariant,
            m_nondegenerate,
            h_nondegenerate,
            faithful,
            signature_m: signature_of(&gm),
            jacobi_violations,
            messages,
        }
    }

    /// `dim ker(h → gl(m))`
    pub fn faithfulness_kernel_dim(&self) -> usize {
        let cols: Vec<Vector> =
            self.holonomy_matrices().iter().map(|m| m.entries().to_vec()).collect();
        let dm2 = self.dim_m() * self.dim_m();
        let rank = Matrix::from_columns(dm2, &cols).rank();
        self.dim_h() - rank
    }

    /// `R(X,Y,U,V) = B([[X,Y],U],V)` on the `m` basis.
    pub fn curvature(&self) -> CurvatureTensor {
        let dm = self.dim_m();
        let gm = self.gram_m();
        let mut entries = vec![Rational::zero(); dm * dm * dm * dm];
        for a in 0..dm {
            for b in 0..dm {
                let xy = self.embed_h(&self.bracket_mm(a, b));
                if is_zero_vec(&xy) {
                    continue;
                }
                for c in 0..dm {
                    let r = self.m_part(&self.algebra().bracket_with_basis(&xy, self.m_idx[c]));
                    let gr = gm.transpose().mul_vec(&r);
                    for d in 0..dm {
                        entries[((a * dm + b) * dm + c) * dm + d] = gr[d].clone();
                    }
                }
            }
        }
        CurvatureTensor { dim: dm, entries }
    }

    /// `Ric(X,Y) = tr_m(Z ↦ [[X,Z],Y])`.
    pub fn ricci(&self) -> BilinearForm {
        let dm = self.dim_m();
        let mut ric = Matrix::zeros(dm, dm);
        for c in 0..dm {
            for a in 0..dm {
                let xz = self.embed_h(&self.bracket_mm(a, c));
                if is_zero_vec(&xz) {
                    continue;
                }
                for b in 0..dm {
                    let v = self.algebra().bracket_with_basis(&xz, self.m_idx[b]);
                    ric[(a, b)] += &v[self.m_idx[c]];
                }
            }
        }
        BilinearForm::new(ric).expect("Ricci form is symmetric for a valid triple")
    }

    /// Killing form of `g` restricted to `m × m`.
    pub fn killing_on_m(&self) -> Matrix {
        self.algebra().killing_form().gram().submatrix(&self.m_idx, &self.m_idx)
    }

    /// True iff `(G⁻¹ Ric)² = 0` with `G` the Gram matrix of `B|m`.
    pub fn ricci_two_step_check(&self) -> bool {
        let Some(gi) = self.gram_m().inverse() else {
            return false;
        };
        let op = gi.mul(self.ricci().gram());
        op.mul(&op).is_zero()
    }

    /// Orthogonal direct sum; the basis of `t2` follows that of `t1`.
    pub fn direct_sum(&self, other: &SymmetricTriple) -> SymmetricTriple {
        let (n1, n2) = (self.dim(), other.dim());
        let n = n1 + n2;
        let mut labels: Vec<String> = self.algebra().labels().to_vec();
        let mut used: std::collections::HashSet<String> = labels.iter().cloned().collect();
        for l in other.algebra().labels() {
            let mut name = l.clone();
            while used.contains(&name) {
                name.push('\'');
            }
            used.insert(name.clone());
            labels.push(name);
        }
        let mut alg = LieAlgebra::abelian(labels);
        for i in 0..n1 {
            for j in i + 1..n1 {
                let mut v = self.algebra().bracket_basis(i, j);
                v.extend(zero_vec(n2));
                alg.set_bracket(i, j, v);
            }
        }
        for i in 0..n2 {
            for j in i + 1..n2 {
                let mut v = zero_vec(n1);
                v.extend(other.algebra().bracket_basis(i, j));
                alg.set_bracket(n1 + i, n1 + j, v);
            }
        }
        let gram = Matrix::block_diag(&[self.form().gram(), other.form().gram()]);
        let mut h = self.h_idx.clone();
        h.extend(other.h_idx.iter().map(|i| i + n1));
        let mut m = self.m_idx.clone();
        m.extend(other.m_idx.iter().map(|i| i + n1));
        debug_assert_eq!(h.len() + m.len(), n);
        SymmetricTriple::new(alg, BilinearForm::new(gram).expect("symmetric"), h, m)
            .expect("direct sum of valid triples")
    }

    /// Same triple in a new basis. Columns of `p_m` (resp. `p_h`) are the new
    /// `m` (resp. `h`) basis vectors in old coordinates. The result lists `m` first.
    pub fn change_basis(&self, p_m: &Matrix, p_h: &Matrix, labels: Option<Vec<String>>) -> Result<SymmetricTriple> {
        let (dm, dh) = (self.dim_m(), self.dim_h());
        if p_m.rows() != dm || p_m.cols() != dm || p_h.rows() != dh || p_h.cols() != dh {
            return Err(TripleError::DimensionMismatch("basis change blocks".into()));
        }
        let n = self.dim();
        let mut cols = Vec::with_capacity(n);
        for v in p_m.columns() {
            cols.push(self.embed_m(&v));
        }
        for v in p_h.columns() {
            cols.push(self.embed_h(&v));
        }
        let p = Matrix::from_columns(n, &cols);
        let labels = labels.unwrap_or_else(|| {
            let mut l = self.m_labels();
            l.extend(self.h_labels());
            l
        });
        let alg = self.algebra().change_basis(&p, labels)?;
        let gram = self.form().congruent(&p);
        SymmetricTriple::new(alg, BilinearForm::new(gram)?, (dm..n).collect(), (0..dm).collect())
    }

    /// Reorders so that `m` comes first, then `h`, each in its current order.
    pub fn normalized_order(&self) -> SymmetricTriple {
        self.change_basis(&Matrix::identity(self.dim_m()), &Matrix::identity(self.dim_h()), None)
            .expect("identity change")
    }

    /// Sub-triple `[m', m'] ⊕ m'` for an `ad(h)`-invariant nonsingular `m' ⊂ m`
    /// given by basis vectors in `m` coordinates.
    pub fn restrict(&self, m_sub: &[Vector], label_prefix: Option<&str>) -> Result<SymmetricTriple> {
        let k = m_sub.len();
        let mut h_vecs: Vec<Vector> = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                let v = self.bracket_m_vectors(&m_sub[a], &m_sub[b]);
                h_vecs.push(v);
            }
        }
        let hsp = Subspace::span(self.dim_h(), &h_vecs);
        // Keep bracket images as basis where possible for readable labels.
        let mut hb: Vec<Vector> = Vec::new();
        for v in &h_vecs {
            if is_zero_vec(v) {
                continue;
            }
            let mut trial = hb.clone();
            trial.push(v.clone());
            if Subspace::span(self.dim_h(), &trial).dim() > hb.len() {
                hb = trial;
            }
            if hb.len() == hsp.dim() {
                break;
            }
        }
        let mut cols: Vec<Vector> = m_sub.iter().map(|v| self.embed_m(v)).collect();
        cols.extend(hb.iter().map(|v| self.embed_h(v)));
        let n = cols.len();
        let basis = Matrix::from_columns(self.dim(), &cols);
        let mut labels = Vec::new();
        let pre = label_prefix.unwrap_or("");
        for i in 0..k {
            labels.push(format!("{pre}m{}", i + 1));
        }
        for i in 0..hb.len() {
            labels.push(format!("{pre}h{}", i + 1));
        }
        let mut alg = LieAlgebra::abelian(labels);
        for i in 0..n {
            for j in i + 1..n {
                let v = self.algebra().bracket(&cols[i], &cols[j]);
                let c = basis.solve(&v).ok_or_else(|| {
                    TripleError::InvalidParameters("subspace is not ad(h)-invariant".into())
                })?;
                alg.set_bracket(i, j, c);
            }
        }
        let gram = self.form().congruent(&basis);
        let t = SymmetricTriple::new(alg, BilinearForm::new(gram)?, (k..n).collect(), (0..k).collect())?;
        if t.gram_m().rank() != k {
            return Err(TripleError::DegenerateForm("restricted subspace is singular".into()));
        }
        Ok(t)
    }

    /// Decides whether `m` splits as an orthogonal sum of nonsingular
    /// `ad(h)`-invariant subspaces.
    pub fn decomposability(&self) -> Decomposability {
        let dm = self.dim_m();
        if dm <= 1 {
            return Decomposability::Indecomposable(IndecomposableReason::TooSmall);
        }
        let gm = self.gram_m();
        let hol = self.holonomy_matrices();
        let csa = selfadjoint_commutant(&gm, &hol);
        if let Some((m1, m2)) = split_from_commutant(&csa, dm) {
            return Decomposability::Decomposable { m1, m2 };
        }
        if commutant_is_local(&hol, dm) {
            return Decomposability::Indecomposable(IndecomposableReason::LocalCommutant);
        }
        if let Some(r) = crate::classification::indecomposable_sufficient(self) {
            return Decomposability::Indecomposable(r);
        }
        Decomposability::Unknown
    }

    /// Splits repeatedly until every piece is indecomposable or undecided.
    /// Returns bases (in `m` coordinates) of the pieces.
    pub fn full_splitting(&self) -> Vec<Vec<Vector>> {
        let dm = self.dim_m();
        let mut pieces = Vec::new();
        let mut stack: Vec<Vec<Vector>> = vec![(0..dm).map(|i| unit_vec(dm, i)).collect()];
        while let Some(basis) = stack.pop() {
            let sub = match self.restrict(&basis, None) {
                Ok(s) => s,
                Err(_) => {
                    pieces.push(basis);
                    continue;
                }
            };
            match sub.decomposability() {
                Decomposability::Decomposable { m1, m2 } => {
                    for part in [m1, m2] {
                        let vs: Vec<Vector> = part
                            .basis()
                            .iter()
                            .map(|c| {
                                let mut v = zero_vec(dm);
                                for (i, ci) in c.iter().enumerate() {
                                    crate::linalg::axpy(&mut v, ci, &basis[i]);
                                }
                                v
                            })
                            .collect();
                        stack.push(vs);
                    }
                }
                _ => pieces.push(basis),
            }
        }
        pieces.sort_by_key(|p| std::cmp::Reverse(p.len()));
        pieces
    }
}

/// Basis of `{T : Tᵀ G = G T, [T, D] = 0 for all D}`.
pub fn selfadjoint_commutant(g: &Matrix, ops: &[Matrix]) -> Vec<Matrix> {
    commutant_solve(g, ops, true)
}

fn commutant_solve(g: &Matrix, ops: &[Matrix], selfadjoint: bool) -> Vec<Matrix> {
    let n = g.rows();
    let var = |i: usize, j: usize| i * n + j;
    let mut rows: Vec<Vector> = Vec::new();
    if selfadjoint {
        // (Tᵀ G - G T)_{ij} = Σ_k T_ki G_kj - G_ik T_kj
        for i in 0..n {
            for j in i + 1..n {
                let mut r = zero_vec(n * n);
                for k in 0..n {
                    r[var(k, i)] += &g[(k, j)];
                    r[var(k, j)] -= &g[(i, k)];
                }
                if !is_zero_vec(&r) {
                    rows.push(r);
                }
            }
        }
    }
    for d in ops {
        // (T D - D T)_{ij} = Σ_k T_ik D_kj - D_ik T_kj
        for i in 0..n {
            for j in 0..n {
                let mut r = zero_vec(n * n);
                for k in 0..n {
                    r[var(i, k)] += &d[(k, j)];
                    r[var(k, j)] -= &d[(i, k)];
                }
                if !is_zero_vec(&r) {
                    rows.push(r);
                }
            }
        }
    }
    let m = Matrix::from_rows_with_cols(rows, n * n);
    m.kernel()
        .into_iter()
        .map(|v| Matrix::from_rows((0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect()))
        .collect()
}

/// Looks for an element with a coprime split of its minimal polynomial.
fn split_from_commutant(csa: &[Matrix], n: usize) -> Option<(Subspace, Subspace)> {
    if csa.len() <= 1 {
        return None;
    }
    let mut candidates: Vec<Matrix> = csa.to_vec();
    for i in 0..csa.len() {
        for j in i + 1..csa.len() {
            candidates.push(csa[i].add(&csa[j]));
            candidates.push(csa[i].sub(&csa[j]));
        }
    }
    // Deterministic pseudo-random integer combinations.
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    for _ in 0..24 {
        let mut t = Matrix::zeros(n, n);
        for b in csa {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let c = ((state >> 33) % 7) as i64 - 3;
            t = t.add(&b.scale(&qi(c)));
        }
        candidates.push(t);
    }
    for t in candidates {
        let mp = minimal_polynomial(&t);
        if mp.degree() <= 1 {
            continue;
        }
        if let Ok(Some((q1, q2))) = mp.coprime_split() {
            let k1 = q1.eval_matrix(&t).kernel();
            let k2 = q2.eval_matrix(&t).kernel();
            if !k1.is_empty() && !k2.is_empty() {
                return Some((Subspace::span(n, &k1), Subspace::span(n, &k2)));
            }
        }
    }
    None
}

/// True iff the full commutant of `ops` is scalars plus its radical, computed via
/// the trace form (a matrix algebra over a field of characteristic zero).
fn commutant_is_local(ops: &[Matrix], n: usize) -> bool {
    let alg = commutant_solve(&Matrix::identity(n), ops, false);
    let k = alg.len();
    let mut tf = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let t = alg[i].mul(&alg[j]).trace();
            tf[(i, j)] = t.clone();
            tf[(j, i)] = t;
        }
    }
    let radical_dim = k - tf.rank();
    k - radical_dim == 1
}

/// Extends `B|m` to the unique invariant form with `h ⊥ m`.
///
/// Picks brackets `[m_a, m_b]` forming a basis of `h` and sets
/// `B_h([X,Y],[U,V]) = B_m([[X,Y],U],V)`.
pub fn extend_form(g: &GradedAlgebra) -> Result<SymmetricTriple> {
    let alg = &g.algebra;
    let (dm, dh) = (g.m_indices.len(), g.h_indices.len());
    if g.gram_m.rows() != dm || !g.gram_m.is_symmetric() {
        return Err(TripleError::DimensionMismatch("gram on m".into()));
    }
    if g.gram_m.rank() != dm {
        return Err(TripleError::DegenerateForm("B on m is degenerate".into()));
    }
    let h_part = |v: &Vector| -> Vector { g.h_indices.iter().map(|&i| v[i].clone()).collect() };
    let m_part = |v: &Vector| -> Vector { g.m_indices.iter().map(|&i| v[i].clone()).collect() };

    // Faithfulness.
    let mut act = Vec::new();
    for &hk in &g.h_indices {
        let mut e = zero_vec(alg.dim());
        e[hk] = Rational::one();
        let mut flat = Vec::new();
        for &mj in &g.m_indices {
            flat.extend(m_part(&alg.bracket_with_basis(&e, mj)));
        }
        act.push(flat);
    }
    let rank = Matrix::from_columns(dm * dm, &act).rank();
    if rank < dh {
        return Err(TripleError::NotFaithful(dh - rank));
    }

    // Bracket pairs spanning h.
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut vecs: Vec<Vector> = Vec::new();
    'outer: for a in 0..dm {
        for b in a + 1..dm {
            if vecs.len() == dh {
                break 'outer;
            }
            let v = h_part(&alg.bracket_basis(g.m_indices[a], g.m_indices[b]));
            if is_zero_vec(&v) {
                continue;
            }
            let mut trial = vecs.clone();
            trial.push(v.clone());
            if Matrix::from_rows_with_cols(trial, dh).rank() > vecs.len() {
                vecs.push(v);
                pairs.push((a, b));
            }
        }
    }
    if vecs.len() < dh {
        return Err(TripleError::Closure("h is not spanned by [m, m]".into()));
    }
    let v = Matrix::from_columns(dh, &vecs);
    let mut qm = Matrix::zeros(dh, dh);
    for (k, &(_a, _b)) in pairs.iter().enumerate() {
        let mut xy = zero_vec(alg.dim());
        for (t, &hi) in g.h_indices.iter().enumerate() {
            xy[hi] = vecs[k][t].clone();
        }
        for (l, &(c, d)) in pairs.iter().enumerate() {
            let r = m_part(&alg.bracket_with_basis(&xy, g.m_indices[c]));
            qm[(k, l)] = dot(&r, &g.gram_m.column(d));
        }
    }
    let vinv = v.inverse().expect("pairs chosen independent");
    let bh = vinv.transpose().mul(&qm).mul(&vinv);
    if !bh.is_symmetric() {
        return Err(TripleError::InvalidTriple("extension is not symmetric; the curvature lacks pair symmetry".into()));
    }
    let n = alg.dim();
    let mut gram = Matrix::zeros(n, n);
    for (a, &i) in g.m_indices.iter().enumerate() {
        for (b, &j) in g.m_indices.iter().enumerate() {
            gram[(i, j)] = g.gram_m[(a, b)].clone();
        }
    }
    for (a, &i) in g.h_indices.iter().enumerate() {
        for (b, &j) in g.h_indices.iter().enumerate() {
            gram[(i, j)] = bh[(a, b)].clone();
        }
    }
    SymmetricTriple::new(alg.clone(), BilinearForm::new(gram)?, g.h_indices.clone(), g.m_indices.clone())
}

/// Quotient construction: `h` is the span of the given operators on `m`.
///
/// `mm` lists `([m_a, m_b], D)` with `D ∈ gl(m)` the action of that bracket on
/// `m`. The algebra has basis `m` followed by a basis of `span{D}` chosen among
/// the listed operators (labels from `h_labels`). `[h, h]` is the commutator;
/// if it leaves the span a closure error is returned.
pub fn graded_from_operators(
    m_labels: &[String],
    gram_m: &Matrix,
    mm: &[(usize, usize, Matrix)],
    h_labels: &[String],
) -> Result<GradedAlgebra> {
    let dm = m_labels.len();
    if mm.len() != h_labels.len() {
        return Err(TripleError::DimensionMismatch("one label per operator".into()));
    }
    let flat: Vec<Vector> = mm.iter().map(|(_, _, d)| d.entries().to_vec()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis_vecs: Vec<Vector> = Vec::new();
    for (k, f) in flat.iter().enumerate() {
        if is_zero_vec(f) {
            continue;
        }
        let mut trial = basis_vecs.clone();
        trial.push(f.clone());
        if Matrix::from_rows_with_cols(trial.clone(), dm * dm).rank() > basis_vecs.len() {
            basis_vecs = trial;
            chosen.push(k);
        }
    }
    let dh = chosen.len();
    let coords_mat = Matrix::from_columns(dm * dm, &basis_vecs);
    let coords = |m: &Matrix| -> Option<Vector> {
        if dh == 0 {
            return if m.is_zero() { Some(Vec::new()) } else { None };
        }
        coords_mat.solve(m.entries())
    };
    let n = dm + dh;
    let mut labels: Vec<String> = m_labels.to_vec();
    labels.extend(chosen.iter().map(|&k| h_labels[k].clone()));
    let mut alg = LieAlgebra::abelian(labels);
    for (a, b, d) in mm {
        if a == b {
            continue;
        }
        let c = coords(d).expect("listed operator lies in the span");
        let mut v = zero_vec(n);
        for (t, x) in c.into_iter().enumerate() {
            v[dm + t] = x;
        }
        alg.set_bracket(*a, *b, v);
    }
    for (t, &k) in chosen.iter().enumerate() {
        let d = &mm[k].2;
        for j in 0..dm {
            let mut v = zero_vec(n);
            for i in 0..dm {
                v[i] = d[(i, j)].clone();
            }
            alg.set_bracket(dm + t, j, v);
        }
        for (u, &l) in chosen.iter().enumerate().skip(t + 1) {
            let comm = d.commutator(&mm[l].2);
            let c = coords(&comm).ok_or_else(|| {
                TripleError::Closure(format!(
                    "[{}, {}] leaves the span of the curvature operators",
                    h_labels[k], h_labels[l]
                ))
            })?;
            let mut v = zero_vec(n);
            for (s, x) in c.into_iter().enumerate() {
                v[dm + s] = x;
            }
            alg.set_bracket(dm + t, dm + u, v);
        }
    }
    Ok(GradedAlgebra {
        algebra: alg,
        h_indices: (dm..n).collect(),
        m_indices: (0..dm).collect(),
        gram_m: gram_m.clone(),
    })
}

/// Exact `Ric = -½ K` on `m × m`.
pub fn ricci_matches_killing(t: &SymmetricTriple) -> bool {
    let k = t.killing_on_m();
    t.ricci().gram() == &k.scale(&crate::linalg::q(-1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::normal_forms::build_lorentz;

    #[test]
    fn tau3_basics() {
        let t = build_lorentz(&[qi(2)]).unwrap();
        assert!(t.verify().all_pass());
        let r = t.curvature();
        let (zs, w) = (t.m_position("Z*").unwrap(), t.m_position("W1").unwrap());
        assert_eq!(*r.get(zs, w, w, zs), qi(-2));
        assert!(r.symmetry_violations().is_empty());
        assert_eq!(t.ricci().gram()[(zs, zs)], qi(2));
        assert!(ricci_matches_killing(&t));
        assert!(t.ricci_two_step_check());
        let k = t.algebra().killing_form();
        let i = t.index_of("Z*").unwrap();
        assert_eq!(k.gram()[(i, i)], qi(-4));
        let x = t.h_position("X1").unwrap();
        assert_eq!(t.gram_h()[(x, x)], qi(2));
    }

    #[test]
    fn unfaithful_extension_rejected() {
        // Adjoin a central h-generator acting as zero.
        let t = build_lorentz(&[qi(1)]).unwrap();
        let mut labels = t.algebra().labels().to_vec();
        labels.push("C".into());
        let n = t.dim();
        let mut alg = LieAlgebra::abelian(labels);
        for i in 0..n {
            for j in i + 1..n {
                let mut v = t.algebra().bracket_basis(i, j);
                v.push(Rational::zero());
                alg.set_bracket(i, j, v);
            }
        }
        let mut h = t.h_indices().to_vec();
        h.push(n);
        let g = GradedAlgebra { algebra: alg.clone(), h_indices: h.clone(), m_indices: t.m_indices().to_vec(), gram_m: t.gram_m() };
        assert!(matches!(extend_form(&g), Err(TripleError::NotFaithful(1))));
        let gram = Matrix::block_diag(&[t.form().gram(), &Matrix::identity(1)]);
        let bad = SymmetricTriple::new(alg, BilinearForm::new(gram).unwrap(), h, t.m_indices().to_vec()).unwrap();
        let rep = bad.verify();
        assert!(!rep.faithful && !rep.h_equals_mm);
    }

    #[test]
    fn direct_sum_splits() {
        let t1 = build_lorentz(&[qi(1)]).unwrap();
        let t2 = build_lorentz(&[qi(2)]).unwrap();
        let s = t1.direct_sum(&t2);
        assert!(s.verify().all_pass());
        assert_eq!(s.metric().center().unwrap().dim(), 2);
        match s.decomposability() {
            Decomposability::Decomposable { m1, m2 } => {
                let first = Subspace::span(6, &(0..3).map(|i| unit_vec(6, i)).collect::<Vec<_>>());
                let second = Subspace::span(6, &(3..6).map(|i| unit_vec(6, i)).collect::<Vec<_>>());
                assert!((m1 == first && m2 == second) || (m1 == second && m2 == first));
            }
            other => panic!("expected a splitting, got {other:?}"),
        }
        assert_eq!(s.full_splitting().len(), 2);
    }

    #[test]
    fn lorentz_indecomposable() {
        let t = build_lorentz(&[qi(1), qi(2)]).unwrap();
        assert!(matches!(t.decomposability(), Decomposability::Indecomposable(_)));
    }

    #[test]
    fn flat_plane_decomposes() {
        let t = build_lorentz(&[]).unwrap();
        assert!(matches!(t.decomposability(), Decomposability::Decomposable { .. }));
    }

    #[test]
    fn change_basis_preserves_verification() {
        let t = build_lorentz(&[qi(1), q(-3, 2)]).unwrap();
        let pm = Matrix::from_i64(&[
            vec![1, 0, 0, 0],
            vec![0, 1, 1, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
        ]);
        let ph = Matrix::from_i64(&[vec![2, 1], vec![0, 1]]);
        let t2 = t.change_basis(&pm, &ph, None).unwrap();
        assert!(t2.verify().jacobi && t2.verify().ad_invariant);
    }
}
