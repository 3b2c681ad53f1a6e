//! Decompositions `V = E ⊕ W ⊕ U ⊕ E*` adapted to a subspace `F`, their
//! iteration along `ad(h)` for solvable triples, and generators of the group
//! of isometries stabilizing `F`.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Result, TripleError};
use crate::json::{ser_matrix, ser_vec, ser_vecs};
use crate::linalg::{
    axpy, diagonalize_congruence, qi, rational_sqrt, unit_vec, zero_vec, BilinearForm, Matrix, Rational,
    Subspace, Vector,
};
use crate::triple::SymmetricTriple;

/// `E = F ∩ F^⊥`, `E ⊕ W = F`, `E ⊕ U = F^⊥`, `E*` isotropic and dual to `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedDecomposition {
    pub e: Subspace,
    pub w: Subspace,
    pub u: Subspace,
    pub estar: Subspace,
}

/// Vectors from `basis` (in order) extending `inner` to a basis of `inner + span(basis)`.
fn echelon_complement(inner: &Subspace, basis: &[Vector]) -> Vec<Vector> {
    let n = inner.ambient_dim();
    let mut acc: Vec<Vector> = inner.basis().to_vec();
    let mut out = Vec::new();
    for v in basis {
        let mut trial = acc.clone();
        trial.push(v.clone());
        if Matrix::from_rows_with_cols(trial.clone(), n).rank() > acc.len() {
            acc = trial;
            out.push(v.clone());
        }
    }
    out
}

/// Isotropic vectors `x_i` with `B(x_i, e_j) = δ_ij` and `x_i ⊥ others`.
fn witt_duals(b: &BilinearForm, e_basis: &[Vector], others: &[Vector]) -> Vec<Vector> {
    let n = b.dim();
    let g = b.gram();
    let mut rows: Vec<Vector> = e_basis.iter().map(|v| g.mul_vec(v)).collect();
    rows.extend(others.iter().map(|v| g.mul_vec(v)));
    let a = Matrix::from_rows_with_cols(rows, n);
    let k = e_basis.len();
    let mut xs: Vec<Vector> = (0..k)
        .map(|i| {
            let mut rhs = zero_vec(a.rows());
            rhs[i] = Rational::one();
            a.solve(&rhs).expect("E, W, U independent and B nondegenerate")
        })
        .collect();
    // x_i -= ½ Σ_j B(x_i, x_j) e_j makes the span isotropic
    let half = Rational::new(1.into(), 2.into());
    let gram: Vec<Vec<Rational>> = (0..k).map(|i| (0..k).map(|j| b.eval(&xs[i], &xs[j])).collect()).collect();
    for i in 0..k {
        for j in 0..k {
            let c = -(&half * &gram[i][j]);
            axpy(&mut xs[i], &c, &e_basis[j]);
        }
    }
    xs
}

/// Adapted decomposition with echelon-completion complements.
pub fn adapted_decompose(b: &BilinearForm, f: &Subspace) -> Result<AdaptedDecomposition> {
    if !b.is_nondegenerate() {
        return Err(TripleError::DegenerateForm("adapted decomposition needs a nondegenerate form".into()));
    }
    let n = b.dim();
    let fp = crate::linalg::orthogonal_complement(f, b)?;
    let e = f.intersect(&fp)?;
    let w = echelon_complement(&e, f.basis());
    let u = echelon_complement(&e, fp.basis());
    let mut others = w.clone();
    others.extend(u.iter().cloned());
    let es = witt_duals(b, e.basis(), &others);
    Ok(AdaptedDecomposition {
        e: e.clone(),
        w: Subspace::span(n, &w),
        u: Subspace::span(n, &u),
        estar: Subspace::span(n, &es),
    })
}

/// Checks the defining conditions; returns the names of failed ones.
pub fn check_adapted(b: &BilinearForm, f: &Subspace, d: &AdaptedDecomposition) -> Result<Vec<&'static str>> {
    let fp = crate::linalg::orthogonal_complement(f, b)?;
    let mut bad = Vec::new();
    if d.e != f.intersect(&fp)? {
        bad.push("E = F ∩ F^⊥");
    }
    if d.e.sum(&d.w)? != *f || d.e.dim() + d.w.dim() != f.dim() {
        bad.push("E ⊕ W = F");
    }
    if d.e.sum(&d.u)? != fp || d.e.dim() + d.u.dim() != fp.dim() {
        bad.push("E ⊕ U = F^⊥");
    }
    let cross = |x: &Subspace, y: &Subspace| {
        x.basis().iter().all(|v| y.basis().iter().all(|w| b.eval(v, w).is_zero()))
    };
    if !cross(&d.u, &d.w) {
        bad.push("U ⊥ W");
    }
    if !b.restrict(d.e.basis()).is_zero() || !b.restrict(d.estar.basis()).is_zero() {
        bad.push("E, E* isotropic");
    }
    let ee = d.e.sum(&d.estar)?;
    let wu = d.w.sum(&d.u)?;
    if !cross(&ee, &wu) {
        bad.push("(E ⊕ E*) ⊥ (U ⊕ W)");
    }
    let pairing: Vec<Vec<Rational>> =
        d.e.basis().iter().map(|x| d.estar.basis().iter().map(|y| b.eval(x, y)).collect()).collect();
    let k = d.e.dim();
    if d.estar.dim() != k || Matrix::from_rows_with_cols(pairing, d.estar.dim()).rank() != k {
        bad.push("B|E×E* nondegenerate");
    }
    if ee.sum(&wu)?.dim() != b.dim() {
        bad.push("direct sum is V");
    }
    Ok(bad)
}

/// Exact Gram–Schmidt: an orthogonal basis of `span(vs)`, negatives first, each
/// vector divided by `sqrt|B(v, v)|` when that is rational.
/// Returns the basis and the norms that stayed non-square.
pub fn pseudo_orthonormal(b: &BilinearForm, vs: &[Vector]) -> (Vec<Vector>, Vec<Rational>) {
    if vs.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let g = b.restrict(vs);
    let (p, d) = diagonalize_congruence(&g);
    let n = b.dim();
    let mut out: Vec<(Rational, Vector)> = Vec::new();
    for j in 0..p.cols() {
        let mut v = zero_vec(n);
        for (i, x) in vs.iter().enumerate() {
            axpy(&mut v, &p[(i, j)], x);
        }
        out.push((d[(j, j)].clone(), v));
    }
    out.sort_by_key(|(dd, _)| if dd.is_negative() { 0 } else { 1 });
    let mut nonsquare = Vec::new();
    let vs = out
        .into_iter()
        .map(|(dd, v)| match rational_sqrt(&dd.abs()) {
            Some(r) if !r.is_zero() => crate::linalg::vec_scale(&v, &r.recip()),
            _ => {
                nonsquare.push(dd);
                v
            }
        })
        .collect();
    (vs, nonsquare)
}

/// Ordered basis `(E, W, U, E*)` with `E*` dual to `E`.
#[derive(Clone, Debug, Serialize)]
pub struct AdaptedBasis {
    #[serde(serialize_with = "ser_vecs")]
    pub e: Vec<Vector>,
    #[serde(serialize_with = "ser_vecs")]
    pub w: Vec<Vector>,
    #[serde(serialize_with = "ser_vecs")]
    pub u: Vec<Vector>,
    #[serde(serialize_with = "ser_vecs")]
    pub estar: Vec<Vector>,
    /// Diagonal entries of `B|W` and `B|U` that are not `±1`.
    #[serde(serialize_with = "ser_vec")]
    pub nonsquare_norms: Vec<Rational>,
}

impl AdaptedBasis {
    pub fn vectors(&self) -> Vec<Vector> {
        let mut v = self.e.clone();
        v.extend(self.w.iter().cloned());
        v.extend(self.u.iter().cloned());
        v.extend(self.estar.iter().cloned());
        v
    }

    pub fn matrix(&self, n: usize) -> Matrix {
        Matrix::from_columns(n, &self.vectors())
    }
}

pub fn adapted_basis(d: &AdaptedDecomposition, b: &BilinearForm) -> AdaptedBasis {
    let e = d.e.basis().to_vec();
    let estar = dual_in(b, &e, d.estar.basis());
    let (w, mut ns) = pseudo_orthonormal(b, d.w.basis());
    let (u, ns2) = pseudo_orthonormal(b, d.u.basis());
    ns.extend(ns2);
    AdaptedBasis { e, w, u, estar, nonsquare_norms: ns }
}

/// Basis of `span(star)` dual to `e` under `B`.
fn dual_in(b: &BilinearForm, e: &[Vector], star: &[Vector]) -> Vec<Vector> {
    let k = e.len();
    if k == 0 {
        return Vec::new();
    }
    // M_ij = B(e_i, s_j); want x_i = Σ_j C_ji s_j with M C = I
    let m = Matrix::from_rows((0..k).map(|i| (0..k).map(|j| b.eval(&e[i], &star[j])).collect()).collect());
    let c = m.inverse().expect("E and E* are paired");
    (0..k)
        .map(|i| {
            let mut v = zero_vec(b.dim());
            for j in 0..k {
                axpy(&mut v, &c[(j, i)], &star[j]);
            }
            v
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Iteration for triples.

/// One level `W_{i-1} = E_i ⊕ W_i ⊕ U_i ⊕ E_i*` (level 0 splits `m`).
#[derive(Clone, Debug, Serialize)]
pub struct Level {
    #[serde(serialize_with = "ser_vecs")]
    pub e: Vec<Vector>,
    #[serde(serialize_with = "ser_vecs")]
    pub w: Vec<Vector>,
    #[serde(serialize_with = "ser_vecs")]
    pub u: Vec<Vector>,
    #[serde(serialize_with = "ser_vecs")]
    pub estar: Vec<Vector>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LevelDims {
    pub e: usize,
    pub w: usize,
    pub u: usize,
}

/// Complete iterated decomposition of `m`; vectors in `m` coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct IteratedDecomposition {
    pub levels: Vec<Level>,
    pub dims: Vec<LevelDims>,
    /// Adapted basis `E_0..E_n, W_n, U_1..U_n, E_n*..E_0*`.
    #[serde(serialize_with = "ser_vecs")]
    pub basis: Vec<Vector>,
    #[serde(serialize_with = "ser_matrix")]
    pub gram: Matrix,
    #[serde(serialize_with = "ser_vec")]
    pub nonsquare_norms: Vec<Rational>,
}

impl IteratedDecomposition {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn final_w(&self) -> &[Vector] {
        &self.levels.last().expect("at least one level").w
    }

    /// Block sizes of the adapted basis, in order.
    pub fn block_sizes(&self) -> Vec<(String, usize)> {
        let n = self.levels.len();
        let mut out: Vec<(String, usize)> = (0..n).map(|i| (format!("E{i}"), self.dims[i].e)).collect();
        out.push((format!("W{}", n - 1), self.dims[n - 1].w));
        for i in 1..n {
            out.push((format!("U{i}"), self.dims[i].u));
        }
        for i in (0..n).rev() {
            out.push((format!("E{i}*"), self.dims[i].e));
        }
        out
    }
}

/// `[h, m]` in `m` coordinates.
pub fn h_m_image(t: &SymmetricTriple) -> Subspace {
    let dm = t.dim_m();
    let mut vs = Vec::new();
    for a in t.holonomy_matrices() {
        vs.extend(a.columns());
    }
    Subspace::span(dm, &vs)
}

/// Orthogonal projection onto a nondegenerate subspace spanned by `basis`.
fn orth_projector(g: &Matrix, basis: &[Vector]) -> Matrix {
    let n = g.rows();
    if basis.is_empty() {
        return Matrix::zeros(n, n);
    }
    let p = Matrix::from_columns(n, basis);
    let gw = p.transpose().mul(g).mul(&p);
    let inv = gw.inverse().expect("nondegenerate block");
    p.mul(&inv).mul(&p.transpose()).mul(g)
}

/// Runs the iteration until `pr_{W_n}[h, W_n] = 0`.
pub fn iterate_decompose(t: &SymmetricTriple) -> Result<IteratedDecomposition> {
    let dm = t.dim_m();
    let g = t.gram_m();
    let form = BilinearForm::new(g.clone())?;
    let hol = t.holonomy_matrices();
    let mut levels: Vec<Level> = Vec::new();
    let mut ns_all = Vec::new();
    // Current W_i as vectors in m, and the subspace F_{i+1} ⊂ W_i.
    let mut cur: Vec<Vector> = (0..dm).map(|i| unit_vec(dm, i)).collect();
    let mut f = h_m_image(t);
    loop {
        let k = cur.len();
        let pm = Matrix::from_columns(dm, &cur);
        let gk = pm.transpose().mul(&g).mul(&pm);
        let bk = BilinearForm::new(gk)?;
        // F in W_i coordinates
        let fcoords: Vec<Vector> = f
            .basis()
            .iter()
            .map(|v| pm.solve(v).expect("F ⊂ W_i"))
            .collect();
        let fk = Subspace::span(k, &fcoords);
        let d = adapted_decompose(&bk, &fk)?;
        if levels.is_empty() && !d.u.is_zero() && dm > 1 {
            return Err(TripleError::CenterNotIsotropic(d.u.dim()));
        }
        if d.e.is_zero() && !fk.is_zero() {
            return Err(TripleError::InvalidTriple("pr_W[h, W] is nonsingular and nonzero".into()));
        }
        let ab = adapted_basis(&d, &bk);
        ns_all.extend(ab.nonsquare_norms.iter().cloned());
        let lift = |vs: &[Vector]| -> Vec<Vector> { vs.iter().map(|c| pm.mul_vec(c)).collect() };
        let level = Level { e: lift(&ab.e), w: lift(&ab.w), u: lift(&ab.u), estar: lift(&ab.estar) };
        let next_w = level.w.clone();
        let done_here = d.e.is_zero();
        if done_here {
            // F = 0: W_n = U_{n+1}; keep W_{n} from the previous level
            break;
        }
        levels.push(level);
        // F_{i+1} = pr_{W_i}[h, W_i]
        let pr = orth_projector(&g, &next_w);
        let mut img = Vec::new();
        for a in &hol {
            for w in &next_w {
                img.push(pr.mul_vec(&a.mul_vec(w)));
            }
        }
        f = Subspace::span(dm, &img);
        cur = next_w;
        if f.is_zero() {
            break;
        }
        if levels.len() > dm {
            return Err(TripleError::InvalidTriple("iteration did not terminate".into()));
        }
    }
    if levels.is_empty() {
        // [h, m] = 0: flat, W_0 = m
        let (w, ns) = pseudo_orthonormal(&form, &(0..dm).map(|i| unit_vec(dm, i)).collect::<Vec<_>>());
        ns_all.extend(ns);
        levels.push(Level { e: Vec::new(), w, u: Vec::new(), estar: Vec::new() });
    }
    let dims: Vec<LevelDims> =
        levels.iter().map(|l| LevelDims { e: l.e.len(), w: l.w.len(), u: l.u.len() }).collect();
    let n = levels.len();
    let mut basis: Vec<Vector> = Vec::new();
    for l in &levels {
        basis.extend(l.e.iter().cloned());
    }
    basis.extend(levels[n - 1].w.iter().cloned());
    for l in levels.iter().skip(1) {
        basis.extend(l.u.iter().cloned());
    }
    for l in levels.iter().rev() {
        basis.extend(l.estar.iter().cloned());
    }
    let gram = form.restrict(&basis);
    Ok(IteratedDecomposition { levels, dims, basis, gram, nonsquare_norms: ns_all })
}

/// `ad(h_k)|m` in the adapted basis of the decomposition, and a report of
/// pattern violations (empty when the triangular shape holds).
#[derive(Clone, Debug, Serialize)]
pub struct TriangularForm {
    #[serde(serialize_with = "crate::json::ser_matrices")]
    pub matrices: Vec<Matrix>,
    pub violations: Vec<String>,
}

pub fn triangular_form(t: &SymmetricTriple, it: &IteratedDecomposition) -> TriangularForm {
    let dm = t.dim_m();
    let p = Matrix::from_columns(dm, &it.basis);
    let pinv = p.inverse().expect("adapted basis");
    let n = it.levels.len();
    let e_sizes: Vec<usize> = it.dims.iter().map(|d| d.e).collect();
    let e_tot: usize = e_sizes.iter().sum();
    let w_n = it.dims[n - 1].w;
    let u_sizes: Vec<usize> = it.dims.iter().skip(1).map(|d| d.u).collect();
    let u_tot: usize = u_sizes.iter().sum();
    // block index of each basis position
    #[derive(Clone, Copy, PartialEq)]
    enum Blk {
        E(usize),
        W,
        U(usize),
        Es,
    }
    let mut blk = Vec::new();
    for (i, &s) in e_sizes.iter().enumerate() {
        blk.extend(std::iter::repeat_n(Blk::E(i), s));
    }
    blk.extend(std::iter::repeat_n(Blk::W, w_n));
    for (i, &s) in u_sizes.iter().enumerate() {
        blk.extend(std::iter::repeat_n(Blk::U(i + 1), s));
    }
    blk.extend(std::iter::repeat_n(Blk::Es, e_tot));
    debug_assert_eq!(blk.len(), dm);
    let _ = u_tot;
    let mut matrices = Vec::new();
    let mut violations = Vec::new();
    for (k, a) in t.holonomy_matrices().iter().enumerate() {
        let m = pinv.mul(a).mul(&p);
        for r in 0..dm {
            for c in 0..dm {
                if m[(r, c)].is_zero() {
                    continue;
                }
                let ok = match (blk[r], blk[c]) {
                    (Blk::E(i), Blk::E(j)) => i < j,
                    (Blk::E(_), Blk::W) => true,
                    (Blk::E(i), Blk::U(j)) => i < j,
                    (_, Blk::Es) => true,
                    _ => false,
                };
                if !ok {
                    violations.push(format!("h{k}: entry ({r}, {c}) outside the triangular pattern"));
                }
            }
        }
        // skewness w.r.t. B: mᵀ G + G m = 0
        let s = m.transpose().mul(&it.gram).add(&it.gram.mul(&m));
        if !s.is_zero() {
            violations.push(format!("h{k}: not skew with respect to B"));
        }
        matrices.push(m);
    }
    TriangularForm { matrices, violations }
}

// ---------------------------------------------------------------------------
// Γ = stab(F) ∩ O(V, B).

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GammaKind {
    /// `W ⊕ U → graph of L`, with the isotropic correction on `E*`.
    RhoW,
    /// `E* → graph of S`, `S` skew.
    RhoEstar,
    /// `P_E ⊕ P_W ⊕ P_U ⊕ P_E^{-T}`.
    BasisChange,
}

/// An isometry stabilizing `F`, as a matrix in the coordinates of the ambient space.
#[derive(Clone, Debug, Serialize)]
pub struct GammaElement {
    pub kind: GammaKind,
    #[serde(serialize_with = "ser_matrix")]
    pub matrix: Matrix,
}

/// Gram layout of an adapted basis: `p = dim E`, middle block `G_mid` on `W ⊕ U`.
fn split_gram(ab: &AdaptedBasis, b: &BilinearForm) -> (usize, Matrix) {
    let mut mid = ab.w.clone();
    mid.extend(ab.u.iter().cloned());
    (ab.e.len(), b.restrict(&mid))
}

/// Matrix of `ρ_W(L)` in the adapted basis `(E, W ⊕ U, E*)`; `L` is `p × dim(W ⊕ U)`.
pub fn rho_w_adapted(p: usize, g_mid: &Matrix, l: &Matrix) -> Matrix {
    let k = g_mid.rows();
    let n = 2 * p + k;
    let ginv = g_mid.inverse().expect("nondegenerate middle block");
    let half = Rational::new(1.into(), 2.into());
    let h = l.mul(&ginv).mul(&l.transpose()).scale(&-half);
    let gm = ginv.mul(&l.transpose()).neg();
    let mut q = Matrix::identity(n);
    for i in 0..p {
        for a in 0..k {
            q[(i, p + a)] = l[(i, a)].clone();
        }
        for j in 0..p {
            q[(i, p + k + j)] = h[(i, j)].clone();
        }
    }
    for a in 0..k {
        for j in 0..p {
            q[(p + a, p + k + j)] = gm[(a, j)].clone();
        }
    }
    q
}

/// Matrix of `ρ_{E*}(S)` in the adapted basis; `S` must be skew.
pub fn rho_estar_adapted(p: usize, k: usize, s: &Matrix) -> Result<Matrix> {
    if s.transpose() != s.neg() {
        return Err(TripleError::InvalidParameters("S must be skew-symmetric".into()));
    }
    let mut q = Matrix::identity(2 * p + k);
    for i in 0..p {
        for j in 0..p {
            q[(i, p + k + j)] = s[(i, j)].clone();
        }
    }
    Ok(q)
}

/// `P_E ⊕ P_mid ⊕ P_E^{-T}` in the adapted basis; `P_mid` must preserve `G_mid`.
pub fn basis_change_adapted(pe: &Matrix, p_mid: &Matrix, g_mid: &Matrix) -> Result<Matrix> {
    if p_mid.transpose().mul(g_mid).mul(p_mid) != *g_mid {
        return Err(TripleError::InvalidParameters("P_W ⊕ P_U is not an isometry".into()));
    }
    let pinv = pe
        .inverse()
        .ok_or_else(|| TripleError::InvalidParameters("P_E is singular".into()))?;
    Ok(Matrix::block_diag(&[pe, p_mid, &pinv.transpose()]))
}

/// Cayley transform `(I - A)(I + A)^{-1}` with `A = G^{-1} K`, an isometry of `G`
/// for skew `K` when `I + A` is invertible.
pub fn cayley(g: &Matrix, k: &Matrix) -> Option<Matrix> {
    let n = g.rows();
    let a = g.inverse()?.mul(k);
    let i = Matrix::identity(n);
    Some(i.sub(&a).mul(&i.add(&a).inverse()?))
}

/// Random generators of `Γ` for the decomposition, as matrices in the
/// ambient coordinates. Entries of `L`, `S`, `P_E` and the skew Cayley
/// parameters are drawn from `-2..=2`.
pub struct GammaSampler {
    ab: AdaptedBasis,
    p: usize,
    g_mid: Matrix,
    to_ambient: Matrix,
    from_ambient: Matrix,
}

impl GammaSampler {
    pub fn new(d: &AdaptedDecomposition, b: &BilinearForm) -> Self {
        let ab = adapted_basis(d, b);
        let (p, g_mid) = split_gram(&ab, b);
        let to_ambient = ab.matrix(b.dim());
        let from_ambient = to_ambient.inverse().expect("adapted basis spans V");
        GammaSampler { ab, p, g_mid, to_ambient, from_ambient }
    }

    pub fn adapted_basis(&self) -> &AdaptedBasis {
        &self.ab
    }

    fn conj(&self, q: &Matrix) -> Matrix {
        self.to_ambient.mul(q).mul(&self.from_ambient)
    }

    pub fn rho_w(&self, l: &Matrix) -> GammaElement {
        GammaElement { kind: GammaKind::RhoW, matrix: self.conj(&rho_w_adapted(self.p, &self.g_mid, l)) }
    }

    pub fn rho_estar(&self, s: &Matrix) -> Result<GammaElement> {
        Ok(GammaElement {
            kind: GammaKind::RhoEstar,
            matrix: self.conj(&rho_estar_adapted(self.p, self.g_mid.rows(), s)?),
        })
    }

    pub fn basis_change(&self, pe: &Matrix, p_mid: &Matrix) -> Result<GammaElement> {
        Ok(GammaElement {
            kind: GammaKind::BasisChange,
            matrix: self.conj(&basis_change_adapted(pe, p_mid, &self.g_mid)?),
        })
    }

    /// A random product of one generator of each kind.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> GammaElement {
        let p = self.p;
        let k = self.g_mid.rows();
        let mut rnd = |r: usize, c: usize| {
            Matrix::from_rows_with_cols(
                (0..r).map(|_| (0..c).map(|_| qi(rng.gen_range(-2..=2))).collect()).collect(),
                c,
            )
        };
        let l = rnd(p, k);
        let mut s = rnd(p, p);
        for i in 0..p {
            s[(i, i)] = Rational::zero();
            for j in 0..i {
                s[(i, j)] = -s[(j, i)].clone();
            }
        }
        let mut pe = rnd(p, p);
        while pe.determinant().is_zero() {
            pe = rnd(p, p);
        }
        let mut kk = rnd(k, k);
        for i in 0..k {
            kk[(i, i)] = Rational::zero();
            for j in 0..i {
                kk[(i, j)] = -kk[(j, i)].clone();
            }
        }
        let p_mid = cayley(&self.g_mid, &kk).unwrap_or_else(|| Matrix::identity(k));
        let q = rho_w_adapted(p, &self.g_mid, &l)
            .mul(&rho_estar_adapted(p, k, &s).expect("skew by construction"))
            .mul(&basis_change_adapted(&pe, &p_mid, &self.g_mid).expect("isometry by construction"));
        GammaElement { kind: GammaKind::BasisChange, matrix: self.conj(&q) }
    }
}

/// Γ for the first level of a triple: isometries of `m` stabilizing `[h, m]`.
pub fn triple_gamma_sampler(t: &SymmetricTriple) -> Result<GammaSampler> {
    let b = BilinearForm::new(t.gram_m())?;
    let d = adapted_decompose(&b, &h_m_image(t))?;
    Ok(GammaSampler::new(&d, &b))
}

/// Applies an isometry `Q` of `m` to the triple: the new `m` basis is `Q e_i`.
/// `h` is rebased onto the operators `Q^{-1} ad(h) Q`; this is the same triple
/// seen in another `m` basis.
pub fn apply_gamma(t: &SymmetricTriple, q: &Matrix) -> Result<SymmetricTriple> {
    t.change_basis(q, &Matrix::identity(t.dim_h()), None)
}
