//! Invariants of maximal-center triples and family-level isomorphism deciders.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Result, TripleError};
use crate::json::{ser_matrix, ser_opt_rat, ser_rat, ser_vec, ser_vecs};
use crate::linalg::{
    axpy, is_zero_vec, q, qi, rational_sqrt, sign, signature_of, unit_vec, zero_vec, BilinearForm, Matrix, Rational,
    Subspace, Vector,
};
use crate::normal_forms::{eps_list, CoefficientSet, FamilyParams, LorentzBlock};
use crate::poly::{characteristic_polynomial, Poly};
use crate::witt::{adapted_basis, adapted_decompose, pseudo_orthonormal};
use crate::triple::{IndecomposableReason, SymmetricTriple};

/// Center of `g` in `m` coordinates; `None` if part of it lies outside `m`.
pub fn center_in_m(t: &SymmetricTriple) -> Option<Subspace> {
    let z = t.algebra().center_by_kernel();
    let mut vs = Vec::new();
    for v in z.basis() {
        if !t.h_part(v).iter().all(Zero::is_zero) {
            return None;
        }
        vs.push(t.m_part(v));
    }
    Some(Subspace::span(t.dim_m(), &vs))
}

/// `min(#neg, #pos)` of `B|m`.
pub fn witt_index_m(t: &SymmetricTriple) -> usize {
    let (n, p, _) = signature_of(&t.gram_m());
    n.min(p)
}

/// Orthogonal complement in `m`.
pub fn perp_in_m(t: &SymmetricTriple, s: &Subspace) -> Subspace {
    let form = BilinearForm::new(t.gram_m()).expect("B|m is nondegenerate");
    crate::linalg::orthogonal_complement(s, &form).expect("dimensions agree")
}

/// `{u ∈ z^⊥ : [a, [b, u]] ∈ z for all a, b ∈ m}`, in `m` coordinates.
pub fn w_nil_lift(t: &SymmetricTriple, z: &Subspace) -> Subspace {
    let dm = t.dim_m();
    let zp = perp_in_m(t, z);
    let basis = zp.basis().to_vec();
    if basis.is_empty() {
        return zp;
    }
    // rows span the annihilator of z, so ann·v = 0 iff v ∈ z
    let ann = Matrix::from_rows_with_cols(
        Matrix::from_rows_with_cols(z.basis().to_vec(), dm).kernel(),
        dm,
    );
    let units: Vec<Vector> = (0..dm).map(|i| crate::linalg::unit_vec(dm, i)).collect();
    let mut rows: Vec<Vector> = Vec::new();
    for a in &units {
        let ad_a = t.ad_m_on_h(a);
        for b in &units {
            let cols: Vec<Vector> = basis
                .iter()
                .map(|u| {
                    let h = t.bracket_m_vectors(b, u);
                    // [a, h] = -[h, a]
                    let v = ad_a.mul_vec(&h);
                    ann.mul_vec(&v)
                })
                .collect();
            let m = Matrix::from_columns(ann.rows(), &cols);
            rows.extend(m.to_rows());
        }
    }
    let k = Matrix::from_rows_with_cols(rows, basis.len()).kernel();
    let vs: Vec<Vector> = k
        .iter()
        .map(|c| {
            let mut v = vec![crate::linalg::Rational::zero(); dm];
            for (ci, u) in c.iter().zip(&basis) {
                crate::linalg::axpy(&mut v, ci, u);
            }
            v
        })
        .collect();
    Subspace::span(dm, &vs)
}

/// Sufficient criteria for indecomposability of a solvable triple.
pub fn indecomposable_sufficient(t: &SymmetricTriple) -> Option<IndecomposableReason> {
    if !t.algebra().is_solvable() {
        return None;
    }
    let z = center_in_m(t)?;
    if z.dim() == 1 {
        return Some(IndecomposableReason::OneDimensionalCenter);
    }
    let p = witt_index_m(t);
    if p == 0 || z.dim() != p {
        return None;
    }
    // least nilpotent: W_nil = 0, i.e. the lift is z itself
    if w_nil_lift(t, &z).dim() != p {
        return None;
    }
    let zp = perp_in_m(t, &z);
    let dm = t.dim_m();
    let mut xs = Vec::new();
    for i in 0..dm {
        let a = crate::linalg::unit_vec(dm, i);
        for u in zp.basis() {
            xs.push(t.bracket_m_vectors(&a, u));
        }
    }
    let x_dim = Subspace::span(t.dim_h(), &xs).dim();
    let dim_y = t.dim_h() - x_dim;
    if 2 * dim_y as i64 > (p as i64) * (p as i64 - 2) {
        return Some(IndecomposableReason::DimYBound { dim_y, p });
    }
    None
}

// ---------------------------------------------------------------------------
// Frames (Z_i, W_α, Z*_i) of a maximal-center triple.

/// Basis `z ⊕ W ⊕ z*` of `m` with `B(Z_i, Z*_j) = δ_ij`, `z`, `z*` isotropic and `W ⊥ z ⊕ z*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxCenterFrame {
    #[serde(serialize_with = "ser_vecs")]
    pub z: Vec<Vector>,
    #[serde(serialize_with = "ser_vecs")]
    pub w: Vec<Vector>,
    #[serde(serialize_with = "ser_vecs")]
    pub zstar: Vec<Vector>,
}

impl MaxCenterFrame {
    pub fn p(&self) -> usize {
        self.z.len()
    }

    pub fn s(&self) -> usize {
        self.w.len()
    }

    pub fn vectors(&self) -> Vec<Vector> {
        let mut v = self.z.clone();
        v.extend(self.w.iter().cloned());
        v.extend(self.zstar.iter().cloned());
        v
    }

    pub fn matrix(&self, n: usize) -> Matrix {
        Matrix::from_columns(n, &self.vectors())
    }

    pub fn w_gram(&self, t: &SymmetricTriple) -> Matrix {
        form_m(t).restrict(&self.w)
    }

    /// Checks the pairing conditions and that `z` spans the center.
    pub fn check(&self, t: &SymmetricTriple) -> Result<()> {
        let b = form_m(t);
        let (p, s) = (self.p(), self.s());
        if self.zstar.len() != p || p + p + s != t.dim_m() {
            return Err(TripleError::DimensionMismatch("frame does not fit m".into()));
        }
        for i in 0..p {
            for j in 0..p {
                let d = if i == j { Rational::one() } else { Rational::zero() };
                if !b.eval(&self.z[i], &self.z[j]).is_zero()
                    || !b.eval(&self.zstar[i], &self.zstar[j]).is_zero()
                    || b.eval(&self.z[i], &self.zstar[j]) != d
                {
                    return Err(TripleError::InvalidTriple("z, z* are not dual isotropic".into()));
                }
            }
            for w in &self.w {
                if !b.eval(w, &self.z[i]).is_zero() || !b.eval(w, &self.zstar[i]).is_zero() {
                    return Err(TripleError::InvalidTriple("W is not orthogonal to z + z*".into()));
                }
            }
        }
        let center = center_in_m(t).ok_or_else(|| TripleError::InvalidTriple("center meets h".into()))?;
        if center != Subspace::span(t.dim_m(), &self.z) {
            return Err(TripleError::InvalidTriple("z is not the center".into()));
        }
        Ok(())
    }
}

/// Frame read off the coordinate order `Z_1..Z_p, W.., Z*_1..Z*_p` used by the constructors.
pub fn standard_frame(t: &SymmetricTriple, p: usize) -> Result<MaxCenterFrame> {
    let n = t.dim_m();
    if 2 * p > n {
        return Err(TripleError::DimensionMismatch(format!("p = {p} too large for dim m = {n}")));
    }
    let s = n - 2 * p;
    let u = |i: usize| unit_vec(n, i);
    let fr = MaxCenterFrame {
        z: (0..p).map(u).collect(),
        w: (p..p + s).map(u).collect(),
        zstar: (p + s..n).map(u).collect(),
    };
    fr.check(t)?;
    Ok(fr)
}

/// Adapted frame built from the center; needs `dim z` equal to the Witt index of `B|m`.
pub fn max_center_frame(t: &SymmetricTriple) -> Result<MaxCenterFrame> {
    let z = center_in_m(t).ok_or_else(|| TripleError::InvalidTriple("center meets h".into()))?;
    let p = witt_index_m(t);
    if p == 0 || z.dim() != p {
        return Err(TripleError::InvalidTriple(format!(
            "center has dimension {} but the Witt index is {p}",
            z.dim()
        )));
    }
    let b = form_m(t);
    let d = adapted_decompose(&b, &z)?;
    let ab = adapted_basis(&d, &b);
    debug_assert!(ab.w.is_empty());
    let fr = MaxCenterFrame { z: ab.e, w: ab.u, zstar: ab.estar };
    fr.check(t)?;
    Ok(fr)
}

/// `[[x, y], z]` in `m` coordinates.
fn rr(t: &SymmetricTriple, x: &[Rational], y: &[Rational], z: &[Rational]) -> Vector {
    let h = t.bracket_m_vectors(x, y);
    t.ad_h_on_m(&h).mul_vec(z)
}

/// `R(x, y, z, w) = B([[x, y], z], w)`.
pub fn curvature_eval(t: &SymmetricTriple, x: &[Rational], y: &[Rational], z: &[Rational], w: &[Rational]) -> Rational {
    t.gram_m().bilinear(&rr(t, x, y, z), w)
}

/// Coefficients `a, b, f` in a frame with `B|W = I`.
pub fn extract_coefficients(t: &SymmetricTriple, fr: &MaxCenterFrame) -> Result<CoefficientSet> {
    let (p, s) = (fr.p(), fr.s());
    if fr.w_gram(t) != Matrix::identity(s) {
        return Err(TripleError::Unsupported("coefficients need an orthonormal W frame".into()));
    }
    let g = t.gram_m();
    let mut c = CoefficientSet::zeros(p, p + s);
    for i in 0..p {
        for j in 0..p {
            for k in 0..p {
                let v = rr(t, &fr.zstar[i], &fr.zstar[j], &fr.zstar[k]);
                for al in 0..s {
                    let ix = c.ai(i, j, k, al);
                    c.a[ix] = g.bilinear(&v, &fr.w[al]);
                }
                for l in 0..p {
                    let ix = c.bi(i, j, k, l);
                    c.b[ix] = g.bilinear(&v, &fr.zstar[l]);
                }
            }
        }
        for al in 0..s {
            for k in 0..p {
                let v = rr(t, &fr.zstar[i], &fr.w[al], &fr.zstar[k]);
                for ga in 0..s {
                    let ix = c.fi(i, k, al, ga);
                    c.f[ix] = g.bilinear(&v, &fr.w[ga]);
                }
            }
        }
    }
    Ok(c)
}

/// `F_ij = pr_W ∘ ad(Z*_i) ∘ ad(Z*_j)|_W`, as matrices in the frame's `W` basis.
pub fn fij_operators(t: &SymmetricTriple, fr: &MaxCenterFrame) -> Result<Vec<Vec<Matrix>>> {
    let (p, s) = (fr.p(), fr.s());
    let ginv = fr
        .w_gram(t)
        .inverse()
        .ok_or_else(|| TripleError::DegenerateForm("B|W".into()))?;
    let g = t.gram_m();
    let mut out = vec![vec![Matrix::zeros(s, s); p]; p];
    for i in 0..p {
        for j in 0..p {
            // B(F_ij w_β, w_δ) = B([[Z*_j, w_β], Z*_i], w_δ)
            let mut pairing = Matrix::zeros(s, s);
            for be in 0..s {
                let v = rr(t, &fr.zstar[j], &fr.w[be], &fr.zstar[i]);
                for de in 0..s {
                    pairing[(de, be)] = g.bilinear(&v, &fr.w[de]);
                }
            }
            out[i][j] = ginv.mul(&pairing);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Spectral data of the F_ij.

/// Eigenvalues `f_ij^α` on one common eigenvector `W_α`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralRecord {
    #[serde(serialize_with = "ser_matrix")]
    pub eigen_f: Matrix,
    /// Sign of the nonzero `f_ii^α`; `0` on `W_nil`.
    pub epsilon: i8,
    /// `λ_i² = ε f_ii`.
    #[serde(serialize_with = "ser_vec")]
    pub lambda_sq: Vector,
    /// `λ_2 / λ_1 = f_12 / f_11` for `p = 2`.
    #[serde(serialize_with = "ser_opt_rat")]
    pub lambda_ratio: Option<Rational>,
    /// The eigenvector in the coordinates of the `W` basis it was computed in.
    #[serde(serialize_with = "ser_vec")]
    pub vector: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralData {
    pub records: Vec<SpectralRecord>,
    pub exact: bool,
}

/// Floating-point counterpart, flagged non-exact.
#[derive(Clone, Debug, Serialize)]
pub struct FloatSpectralData {
    pub eigen_f: Vec<Vec<Vec<f64>>>,
    pub epsilon: Vec<i8>,
    pub exact: bool,
    pub tolerance: f64,
}

fn commute_check(ops: &[&Matrix]) -> Result<()> {
    for (a, x) in ops.iter().enumerate() {
        for y in &ops[a + 1..] {
            if !x.commutator(y).is_zero() {
                return Err(TripleError::NonCommuting);
            }
        }
    }
    Ok(())
}

/// Multiplicity of `r` as a root of `f`.
fn root_multiplicity(f: &Poly, r: &Rational) -> usize {
    let lin = Poly::new(vec![-r.clone(), Rational::one()]);
    let mut g = f.clone();
    let mut m = 0;
    while g.degree() > 0 {
        let (qq, rem) = g.divrem(&lin);
        if !rem.is_zero() {
            break;
        }
        g = qq;
        m += 1;
    }
    m
}

/// Exact common eigenbasis of the commuting family `fs[i][j]`, selfadjoint for the
/// definite Gram `g` on `W`. Eigenvalues must be rational.
pub fn simultaneous_diagonalize(fs: &[Vec<Matrix>], g: &Matrix) -> Result<SpectralData> {
    let s = g.rows();
    let p = fs.len();
    let ops: Vec<&Matrix> = fs.iter().flat_map(|r| r.iter()).collect();
    commute_check(&ops)?;
    let mut spaces: Vec<Vec<Vector>> = if s == 0 { Vec::new() } else { vec![(0..s).map(|i| unit_vec(s, i)).collect()] };
    for op in &ops {
        let mut next = Vec::new();
        for sp in spaces {
            let k = sp.len();
            let basis = Matrix::from_columns(s, &sp);
            let cols: Vec<Vector> = sp
                .iter()
                .map(|v| basis.solve(&op.mul_vec(v)).ok_or(TripleError::NonCommuting))
                .collect::<Result<_>>()?;
            let m = Matrix::from_columns(k, &cols);
            let cp = characteristic_polynomial(&m);
            let roots = cp
                .rational_roots()
                .ok_or_else(|| TripleError::IrrationalSpectrum(cp.to_string_var("x")))?;
            let total: usize = roots.iter().map(|r| root_multiplicity(&cp, r)).sum();
            if total < k {
                return Err(TripleError::IrrationalSpectrum(cp.to_string_var("x")));
            }
            let mut found = 0;
            for r in &roots {
                let shifted = m.sub(&Matrix::identity(k).scale(r));
                let ker = shifted.kernel();
                found += ker.len();
                next.push(ker.iter().map(|c| basis.mul_vec(c)).collect());
            }
            if found < k {
                return Err(TripleError::InvalidTriple("F_ij not diagonalizable".into()));
            }
        }
        spaces = next;
    }
    let form = BilinearForm::new(g.clone())?;
    let mut records = Vec::new();
    for sp in spaces {
        let (vs, _) = pseudo_orthonormal(&form, &sp);
        for v in vs {
            let piv = v.iter().position(|x| !x.is_zero()).expect("nonzero eigenvector");
            let mut ef = Matrix::zeros(p, p);
            for i in 0..p {
                for j in 0..p {
                    ef[(i, j)] = &fs[i][j].mul_vec(&v)[piv] / &v[piv];
                }
            }
            records.push(record_from_eigen(ef, v)?);
        }
    }
    Ok(SpectralData { records, exact: true })
}

fn record_from_eigen(ef: Matrix, vector: Vector) -> Result<SpectralRecord> {
    let p = ef.rows();
    if !ef.is_symmetric() {
        return Err(TripleError::Symmetry("f_ij^α is not symmetric in i, j".into()));
    }
    let mut epsilon = 0i8;
    for i in 0..p {
        let sg = sign(&ef[(i, i)]) as i8;
        if sg != 0 {
            if epsilon != 0 && epsilon != sg {
                return Err(TripleError::InvalidTriple("sign of f_ii^α changes with i".into()));
            }
            epsilon = sg;
        }
    }
    let e = Rational::from_integer(epsilon.into());
    let lambda_sq = (0..p).map(|i| &e * &ef[(i, i)]).collect();
    let lambda_ratio = if p == 2 && !ef[(0, 0)].is_zero() { Some(&ef[(0, 1)] / &ef[(0, 0)]) } else { None };
    Ok(SpectralRecord { eigen_f: ef, epsilon, lambda_sq, lambda_ratio, vector })
}

/// Floating path: symmetrize by a Cholesky factor of `±g`, diagonalize a generic
/// combination and read off Rayleigh quotients.
pub fn simultaneous_diagonalize_float(fs: &[Vec<Matrix>], g: &Matrix, tol: f64) -> Result<FloatSpectralData> {
    use nalgebra::DMatrix;
    let s = g.rows();
    let p = fs.len();
    let to_d = |m: &Matrix| DMatrix::from_row_slice(m.rows(), m.cols(), &m.to_f64());
    let mut gd = to_d(g);
    if s > 0 && gd[(0, 0)] < 0.0 {
        gd = -gd;
    }
    if s == 0 {
        return Ok(FloatSpectralData { eigen_f: Vec::new(), epsilon: Vec::new(), exact: false, tolerance: tol });
    }
    let chol = nalgebra::Cholesky::new(gd).ok_or_else(|| TripleError::DegenerateForm("B|W is not definite".into()))?;
    let l = chol.l();
    let linv_t = l.transpose().try_inverse().ok_or_else(|| TripleError::DegenerateForm("B|W".into()))?;
    let sym: Vec<Vec<DMatrix<f64>>> = fs
        .iter()
        .map(|row| row.iter().map(|f| l.transpose() * to_d(f) * &linv_t).collect())
        .collect();
    let flat: Vec<&DMatrix<f64>> = sym.iter().flat_map(|r| r.iter()).collect();
    let scale = flat.iter().map(|m| m.amax()).fold(1.0f64, f64::max);
    for (a, x) in flat.iter().enumerate() {
        for y in &flat[a + 1..] {
            if (*x * *y - *y * *x).amax() > tol * scale * scale {
                return Err(TripleError::NonCommuting);
            }
        }
    }
    let mut comb = DMatrix::<f64>::zeros(s, s);
    for (k, m) in flat.iter().enumerate() {
        comb += *m * (1.0 + 0.618_033_988_75 * k as f64);
    }
    let comb = (&comb + comb.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(comb);
    let mut eigen_f = Vec::new();
    let mut epsilon = Vec::new();
    for c in 0..s {
        let u = eig.eigenvectors.column(c);
        let mut ef = vec![vec![0.0; p]; p];
        let mut eps = 0i8;
        for i in 0..p {
            for j in 0..p {
                ef[i][j] = (u.transpose() * &sym[i][j] * u)[(0, 0)];
            }
            if ef[i][i].abs() > tol * scale {
                eps = if ef[i][i] > 0.0 { 1 } else { -1 };
            }
        }
        eigen_f.push(ef);
        epsilon.push(eps);
    }
    Ok(FloatSpectralData { eigen_f, epsilon, exact: false, tolerance: tol })
}

/// Indices of `W_nil` (all `f_ij^α = 0`) and `W_reg`.
pub fn split_w(records: &[SpectralRecord]) -> (Vec<usize>, Vec<usize>) {
    let mut nil = Vec::new();
    let mut reg = Vec::new();
    for (a, r) in records.iter().enumerate() {
        if r.eigen_f.is_zero() {
            nil.push(a);
        } else {
            reg.push(a);
        }
    }
    (nil, reg)
}

/// Replaces `W` by a common eigenbasis of the `F_ij`; records then refer to unit vectors.
pub fn spectral_frame(t: &SymmetricTriple, fr: &MaxCenterFrame) -> Result<(MaxCenterFrame, SpectralData)> {
    let fs = fij_operators(t, fr)?;
    let mut sd = simultaneous_diagonalize(&fs, &fr.w_gram(t))?;
    let n = t.dim_m();
    let s = fr.s();
    let w: Vec<Vector> = sd
        .records
        .iter()
        .map(|r| {
            let mut v = zero_vec(n);
            for (c, b) in r.vector.iter().zip(&fr.w) {
                axpy(&mut v, c, b);
            }
            v
        })
        .collect();
    for (a, r) in sd.records.iter_mut().enumerate() {
        r.vector = unit_vec(s, a);
    }
    Ok((MaxCenterFrame { z: fr.z.clone(), w, zstar: fr.zstar.clone() }, sd))
}

/// `V_λ = Σ_{α,β} (λ_1^α λ_2^β − λ_2^α λ_1^β)²` from rational `λ`.
pub fn v_lambda(l1: &[Rational], l2: &[Rational]) -> Rational {
    let mut v = Rational::zero();
    for a in 0..l1.len() {
        for b in 0..l1.len() {
            let d = &l1[a] * &l2[b] - &l2[a] * &l1[b];
            v += &d * &d;
        }
    }
    v
}

/// `V_λ` through `λ_i^α λ_j^α = ε_α f_ij^α` (needs `p = 2`).
pub fn v_lambda_from_spectral(records: &[SpectralRecord]) -> Rational {
    let mut v = Rational::zero();
    for x in records {
        for y in records {
            let e = Rational::from_integer((x.epsilon * y.epsilon).into());
            let (f, g) = (&x.eigen_f, &y.eigen_f);
            let term = &f[(0, 0)] * &g[(1, 1)] + &f[(1, 1)] * &g[(0, 0)] - qi(2) * &f[(0, 1)] * &g[(0, 1)];
            v += e * term;
        }
    }
    v
}

// ---------------------------------------------------------------------------
// Splitting transform.

#[derive(Clone, Debug, Serialize)]
pub struct SplittingResult {
    pub frame: MaxCenterFrame,
    /// `Z̃*_i = Z*_i − Σ_γ N_iγ W_γ + …`.
    #[serde(serialize_with = "ser_matrix")]
    pub n: Matrix,
    pub nil: Vec<usize>,
    pub reg: Vec<usize>,
    pub spectral: SpectralData,
}

/// Moves to a frame in which `a_{ijkα} = 0` for every `α ∈ I_reg`.
pub fn splitting_transform(t: &SymmetricTriple, fr: &MaxCenterFrame) -> Result<SplittingResult> {
    let (fr, sd) = spectral_frame(t, fr)?;
    let (p, s) = (fr.p(), fr.s());
    let (nil, reg) = split_w(&sd.records);
    let g = t.gram_m();
    let d: Vec<Rational> = fr.w.iter().map(|w| g.bilinear(w, w)).collect();
    let nr = reg.len();
    // R(Z*_i, W_β, Z*_k, W_γ)
    let mut fv = vec![vec![vec![vec![Rational::zero(); s]; p]; s]; p];
    for i in 0..p {
        for be in 0..s {
            for k in 0..p {
                let v = rr(t, &fr.zstar[i], &fr.w[be], &fr.zstar[k]);
                for ga in 0..s {
                    fv[i][be][k][ga] = g.bilinear(&v, &fr.w[ga]);
                }
            }
        }
    }
    let unk = |i: usize, bi: usize| i * nr + bi;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            for k in 0..p {
                let v = rr(t, &fr.zstar[i], &fr.zstar[j], &fr.zstar[k]);
                for &ga in &reg {
                    // ã = a − Σ_β N_jβ f(i,k;β,γ) + Σ_β N_iβ f(j,k;β,γ)
                    let mut row = zero_vec(p * nr);
                    for (bi, &be) in reg.iter().enumerate() {
                        row[unk(j, bi)] -= &fv[i][be][k][ga];
                        row[unk(i, bi)] += &fv[j][be][k][ga];
                    }
                    rows.push(row);
                    rhs.push(-g.bilinear(&v, &fr.w[ga]));
                }
            }
        }
    }
    let mut n = Matrix::zeros(p, s);
    if !rows.is_empty() && nr > 0 {
        let a = Matrix::from_rows_with_cols(rows, p * nr);
        let x = a.solve(&rhs).ok_or_else(|| {
            TripleError::InvalidTriple("a on W_reg does not have the split form".into())
        })?;
        for i in 0..p {
            for (bi, &be) in reg.iter().enumerate() {
                n[(i, be)] = x[unk(i, bi)].clone();
            }
        }
    }
    let half = q(1, 2);
    let mut w = fr.w.clone();
    for (al, wa) in w.iter_mut().enumerate() {
        for k in 0..p {
            axpy(wa, &(&n[(k, al)] * &d[al]), &fr.z[k]);
        }
    }
    let mut zstar = fr.zstar.clone();
    for (i, zi) in zstar.iter_mut().enumerate() {
        for ga in 0..s {
            axpy(zi, &-&n[(i, ga)], &fr.w[ga]);
        }
        for k in 0..p {
            let mut h = Rational::zero();
            for ga in 0..s {
                h -= &half * &n[(k, ga)] * &n[(i, ga)] * &d[ga];
            }
            axpy(zi, &h, &fr.z[k]);
        }
    }
    let out = MaxCenterFrame { z: fr.z.clone(), w, zstar };
    out.check(t)?;
    for i in 0..p {
        for j in i + 1..p {
            for k in 0..p {
                for &ga in &reg {
                    if !curvature_eval(t, &out.zstar[i], &out.zstar[j], &out.zstar[k], &out.w[ga]).is_zero() {
                        return Err(TripleError::InvalidTriple("splitting left a ≠ 0 on W_reg".into()));
                    }
                }
            }
        }
    }
    Ok(SplittingResult { frame: out, n, nil, reg, spectral: sd })
}

fn form_m(t: &SymmetricTriple) -> BilinearForm {
    BilinearForm::new(t.gram_m()).expect("B|m is nondegenerate")
}

// ---------------------------------------------------------------------------
// Isomorphism deciders.

/// Scalar or `2×2` base change carried by a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScaleOrP {
    Identity,
    Scale {
        #[serde(serialize_with = "ser_rat")]
        c: Rational,
    },
    P {
        #[serde(serialize_with = "ser_matrix")]
        p: Matrix,
    },
}

/// Witness of an isomorphism between two normal forms.
///
/// `permutation[α]` is the W index of the second triple matched with `α`,
/// `signs[α]` the sign relating the two `λ` rows (or `f` entries).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsomorphismCertificate {
    pub permutation: Vec<usize>,
    pub signs: Vec<i8>,
    pub scale_or_p: ScaleOrP,
    /// Exact linear isometry `m_1 → m_2` (columns are images) preserving `R`, when rational.
    #[serde(serialize_with = "ser_opt_matrix")]
    pub m_map: Option<Matrix>,
    pub note: Option<String>,
}

fn ser_opt_matrix<S: serde::Serializer>(m: &Option<Matrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match m {
        Some(m) => s.serialize_some(&crate::json::matrix_to_strings(m)),
        None => s.serialize_none(),
    }
}

impl IsomorphismCertificate {
    fn new(permutation: Vec<usize>, signs: Vec<i8>, scale_or_p: ScaleOrP) -> Self {
        IsomorphismCertificate { permutation, signs, scale_or_p, m_map: None, note: None }
    }

    fn identity(s: usize) -> Self {
        Self::new((0..s).collect(), vec![1; s], ScaleOrP::Identity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum Decision {
    Isomorphic { certificate: IsomorphismCertificate },
    NotIsomorphic { reason: String },
    Unknown { reason: String },
}

impl Decision {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Decision::Isomorphic { .. })
    }

    pub fn certificate(&self) -> Option<&IsomorphismCertificate> {
        match self {
            Decision::Isomorphic { certificate } => Some(certificate),
            _ => None,
        }
    }

    fn not(reason: impl Into<String>) -> Self {
        Decision::NotIsomorphic { reason: reason.into() }
    }
}

/// Exact check that `phi: m_1 → m_2` is an isometry carrying `R_1` to `R_2`.
pub fn verify_m_map(t1: &SymmetricTriple, t2: &SymmetricTriple, phi: &Matrix) -> bool {
    let n = t1.dim_m();
    if t2.dim_m() != n || phi.rows() != n || phi.cols() != n {
        return false;
    }
    let g2 = t2.gram_m();
    if phi.transpose().mul(&g2).mul(phi) != t1.gram_m() {
        return false;
    }
    let img = phi.columns();
    let g1 = t1.gram_m();
    for a in 0..n {
        for b in a + 1..n {
            let h1 = t1.bracket_mm(a, b);
            let ad1 = t1.ad_h_on_m(&h1);
            let h2 = t2.bracket_m_vectors(&img[a], &img[b]);
            let ad2 = t2.ad_h_on_m(&h2);
            for c in 0..n {
                let v1 = ad1.column(c);
                let v2 = ad2.mul_vec(&img[c]);
                let lhs = g1.mul_vec(&v1);
                let rhs = phi.transpose().mul(&g2).mul_vec(&v2);
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Pairs each `src[i]` with a distinct `dst[j]` satisfying `eq`; greedy is exact
/// when `eq` is an equivalence relation.
fn match_greedy<T>(src: &[T], dst: &[T], eq: impl Fn(&T, &T) -> bool) -> Option<Vec<usize>> {
    if src.len() != dst.len() {
        return None;
    }
    let mut used = vec![false; dst.len()];
    let mut out = Vec::with_capacity(src.len());
    for x in src {
        let j = (0..dst.len()).find(|&j| !used[j] && eq(x, &dst[j]))?;
        used[j] = true;
        out.push(j);
    }
    Some(out)
}

/// Decides `τ_n(f) ≅ τ_n(f̃)`: `f^α = c f̃^{Π(α)}` for some `c > 0`.
pub fn lorentz_isomorphic(f: &[Rational], ft: &[Rational]) -> Result<Option<IsomorphismCertificate>> {
    if f.len() != ft.len() {
        return Err(TripleError::DimensionMismatch(format!("{} vs {} entries", f.len(), ft.len())));
    }
    if f.iter().chain(ft).any(Zero::is_zero) {
        return Err(TripleError::InvalidParameters("f has a zero entry".into()));
    }
    if f.is_empty() {
        return Ok(Some(IsomorphismCertificate::identity(0)));
    }
    for b in ft {
        let c = &f[0] / b;
        if !c.is_positive() {
            continue;
        }
        let scaled: Vec<Rational> = ft.iter().map(|x| x * &c).collect();
        if let Some(perm) = match_greedy(f, &scaled, |x, y| x == y) {
            let s = f.len();
            let mut cert = IsomorphismCertificate::new(perm, vec![1; s], ScaleOrP::Scale { c: c.clone() });
            cert.m_map = rational_sqrt(&c).map(|r| lorentz_map(&cert.permutation, &r));
            if cert.m_map.is_none() {
                cert.note = Some("Z* scales by sqrt(c), which is irrational".into());
            }
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// `Z ↦ Z̃/r`, `W_α ↦ W̃_{Π(α)}`, `Z* ↦ r Z̃*` on `(Z, W.., Z*)`.
fn lorentz_map(perm: &[usize], r: &Rational) -> Matrix {
    let s = perm.len();
    let n = s + 2;
    let mut m = Matrix::zeros(n, n);
    m[(0, 0)] = r.recip();
    for (a, &b) in perm.iter().enumerate() {
        m[(1 + b, 1 + a)] = qi(1);
    }
    m[(n - 1, n - 1)] = r.clone();
    m
}

/// Least nilpotent data at `p = 2`: `ε_α`, rows `Λ_α = (λ_1^α, λ_2^α)`, `b = b_1212`.
#[derive(Clone, Debug)]
struct Ln2 {
    eps: Vec<i8>,
    lam: Vec<[Rational; 2]>,
    b: Rational,
    /// Number of nilpotent `w` directions between `W` and `Z*` (0 for the least nilpotent family).
    tail: usize,
}

fn eps_signs(r: usize, s: usize) -> Result<Vec<i8>> {
    Ok(eps_list(r, s)?.iter().map(|e| sign(e) as i8).collect())
}

fn rows2(l1: &[Rational], l2: &[Rational]) -> Result<Vec<[Rational; 2]>> {
    if l1.len() != l2.len() {
        return Err(TripleError::DimensionMismatch("λ1 and λ2 differ in length".into()));
    }
    Ok(l1.iter().zip(l2).map(|(a, b)| [a.clone(), b.clone()]).collect())
}

fn row_mul(r: &[Rational; 2], p: &Matrix) -> [Rational; 2] {
    [&r[0] * &p[(0, 0)] + &r[1] * &p[(1, 0)], &r[0] * &p[(0, 1)] + &r[1] * &p[(1, 1)]]
}

fn neg2(r: &[Rational; 2]) -> [Rational; 2] {
    [-r[0].clone(), -r[1].clone()]
}

fn rank_rows(rows: &[[Rational; 2]]) -> usize {
    Matrix::from_rows_with_cols(rows.iter().map(|r| r.to_vec()).collect(), 2).rank()
}

/// Matches rows `Λ_α P` to `±Λ̃_β` within equal `ε`; returns `(Π, σ)`.
fn match_rows(src: &Ln2, dst: &Ln2, p: &Matrix) -> Option<(Vec<usize>, Vec<i8>)> {
    let img: Vec<(i8, [Rational; 2])> = src.eps.iter().zip(&src.lam).map(|(e, r)| (*e, row_mul(r, p))).collect();
    let tgt: Vec<(i8, [Rational; 2])> = dst.eps.iter().cloned().zip(dst.lam.iter().cloned()).collect();
    let perm = match_greedy(&img, &tgt, |x, y| x.0 == y.0 && (x.1 == y.1 || x.1 == neg2(&y.1)))?;
    let signs = perm.iter().enumerate().map(|(a, &b)| if img[a].1 == tgt[b].1 { 1 } else { -1 }).collect();
    Some((perm, signs))
}

fn mat2(r0: &[Rational; 2], r1: &[Rational; 2]) -> Matrix {
    Matrix::from_rows(vec![r0.to_vec(), r1.to_vec()])
}

/// `det(P)² b = b̃` admits rational `det(P)`: returns it (sign +).
fn det_for(b: &Rational, bt: &Rational) -> std::result::Result<Option<Rational>, ()> {
    match (b.is_zero(), bt.is_zero()) {
        (true, true) => Ok(Some(qi(1))),
        (false, false) => {
            let r = bt / b;
            if !r.is_positive() {
                return Err(());
            }
            Ok(rational_sqrt(&r))
        }
        _ => Err(()),
    }
}

fn decide_ln2(x: &Ln2, y: &Ln2) -> Decision {
    let s = x.lam.len();
    if s != y.lam.len() || x.tail != y.tail {
        return Decision::not("dimensions differ");
    }
    let mut e1 = x.eps.clone();
    let mut e2 = y.eps.clone();
    e1.sort();
    e2.sort();
    if e1 != e2 {
        return Decision::not("ε multisets differ");
    }
    let rank = rank_rows(&x.lam);
    if rank != rank_rows(&y.lam) {
        return Decision::not("rank of Λ differs");
    }
    let with_p = |p: Matrix| -> Option<Decision> {
        let (perm, signs) = match_rows(x, y, &p)?;
        let mut cert = IsomorphismCertificate::new(perm, signs, ScaleOrP::P { p: p.clone() });
        cert.m_map = Some(ln2_map(&cert.permutation, &p, x.tail));
        Some(Decision::Isomorphic { certificate: cert })
    };
    match rank {
        2 => {
            let (i1, i2) = independent_pair(&y.lam).expect("rank 2");
            let tgt = mat2(&y.lam[i1], &y.lam[i2]);
            for j1 in 0..s {
                for j2 in 0..s {
                    if j1 == j2 || x.eps[j1] != y.eps[i1] || x.eps[j2] != y.eps[i2] {
                        continue;
                    }
                    for (s1, s2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        let r1 = if s1 == 1 { x.lam[j1].clone() } else { neg2(&x.lam[j1]) };
                        let r2 = if s2 == 1 { x.lam[j2].clone() } else { neg2(&x.lam[j2]) };
                        let Some(inv) = mat2(&r1, &r2).inverse() else { continue };
                        let p = inv.mul(&tgt);
                        let det = p.determinant();
                        if &det * &det * &x.b != y.b {
                            continue;
                        }
                        if let Some(d) = with_p(p) {
                            return d;
                        }
                    }
                }
            }
            Decision::not("no P ∈ GL(2) and signed permutation relate the λ rows")
        }
        _ => {
            let det = match det_for(&x.b, &y.b) {
                Err(()) => return Decision::not("b̃ / b is not a positive ratio"),
                Ok(d) => d,
            };
            // P = [u; v]^{-1} [κ ũ; d ṽ] with u P = κ ũ
            let (u, ut) = if rank == 1 {
                let u = x.lam.iter().find(|r| !r[0].is_zero() || !r[1].is_zero()).unwrap().clone();
                let ut = y.lam.iter().find(|r| !r[0].is_zero() || !r[1].is_zero()).unwrap().clone();
                (u, ut)
            } else {
                ([qi(1), qi(0)], [qi(1), qi(0)])
            };
            let coef = |r: &[Rational; 2], u: &[Rational; 2]| -> Rational {
                if !u[0].is_zero() {
                    &r[0] / &u[0]
                } else {
                    &r[1] / &u[1]
                }
            };
            let cx: Vec<Rational> = x.lam.iter().map(|r| coef(r, &u)).collect();
            let cy: Vec<Rational> = y.lam.iter().map(|r| coef(r, &ut)).collect();
            let kappas: Vec<Rational> = if rank == 1 {
                let a0 = cx.iter().position(|c| !c.is_zero()).unwrap();
                cy.iter().filter(|c| !c.is_zero()).map(|c| c / &cx[a0]).collect()
            } else {
                vec![qi(1)]
            };
            let other = |u: &[Rational; 2]| if u[0].is_zero() { [qi(1), qi(0)] } else { [qi(0), qi(1)] };
            let (v, vt) = (other(&u), other(&ut));
            for k in kappas {
                let src: Vec<(i8, Rational)> = x.eps.iter().zip(&cx).map(|(e, c)| (*e, (c * &k).abs())).collect();
                let dst: Vec<(i8, Rational)> = y.eps.iter().zip(&cy).map(|(e, c)| (*e, c.abs())).collect();
                let Some(perm) = match_greedy(&src, &dst, |a, b| a == b) else { continue };
                let signs: Vec<i8> = perm
                    .iter()
                    .enumerate()
                    .map(|(a, &b)| if &cx[a] * &k == cy[b] { 1 } else { -1 })
                    .collect();
                let base = mat2(&u, &v);
                let tb = mat2(&ut, &vt);
                let dscale = match &det {
                    Some(dv) => dv * base.determinant() / (&k * tb.determinant()),
                    None => qi(1),
                };
                let rhs = mat2(&[&k * &ut[0], &k * &ut[1]], &[&dscale * &vt[0], &dscale * &vt[1]]);
                let p = base.inverse().expect("independent").mul(&rhs);
                let mut cert = IsomorphismCertificate::new(perm, signs, ScaleOrP::P { p: p.clone() });
                if det.is_some() {
                    cert.m_map = Some(ln2_map(&cert.permutation, &p, x.tail));
                } else {
                    cert.scale_or_p = ScaleOrP::Identity;
                    cert.note = Some("det(P) = sqrt(b̃/b) is irrational".into());
                }
                return Decision::Isomorphic { certificate: cert };
            }
            Decision::not("λ rows are not proportional up to a common scale")
        }
    }
}

fn independent_pair(rows: &[[Rational; 2]]) -> Option<(usize, usize)> {
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if !mat2(&rows[i], &rows[j]).determinant().is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

/// m-map on `(Z1, Z2, W.., w.., Z*1, Z*2)`: `Z_i ↦ Σ_j P_ij Z̃_j`, `Z*_i ↦ Σ_j (P⁻¹)_ji Z̃*_j`,
/// `W_α ↦ W̃_{Π(α)}`, nilpotent tail fixed.
fn ln2_map(perm: &[usize], p: &Matrix, tail: usize) -> Matrix {
    let s = perm.len();
    let n = 4 + s + tail;
    let pinv = p.inverse().expect("P invertible");
    let mut m = Matrix::zeros(n, n);
    let zs = 2 + s + tail;
    for i in 0..2 {
        for j in 0..2 {
            m[(j, i)] = p[(i, j)].clone();
            m[(zs + j, zs + i)] = pinv[(j, i)].clone();
        }
    }
    for (a, &b) in perm.iter().enumerate() {
        m[(2 + b, 2 + a)] = qi(1);
    }
    for k in 0..tail {
        m[(2 + s + k, 2 + s + k)] = qi(1);
    }
    m
}

fn ln2_of(p: &FamilyParams) -> Result<Option<Ln2>> {
    Ok(match p {
        FamilyParams::Ia { eps_y, r, l1, l2 } => {
            Some(Ln2 { eps: eps_signs(*r, l1.len())?, lam: rows2(l1, l2)?, b: eps_y.clone(), tail: 0 })
        }
        FamilyParams::Ib { r, l1, l2 } => {
            Some(Ln2 { eps: eps_signs(*r, l1.len())?, lam: rows2(l1, l2)?, b: qi(0), tail: 0 })
        }
        FamilyParams::Nil22 { eps_y } => Some(Ln2 { eps: vec![], lam: vec![], b: eps_y.clone(), tail: 0 }),
        FamilyParams::LeastNilpotentPQ { p: 2, b, epsilon, lambda, .. } => Some(Ln2 {
            eps: epsilon.iter().map(|e| sign(e) as i8).collect(),
            lam: lambda.iter().map(|v| [v[0].clone(), v[1].clone()]).collect(),
            b: b.get(0, 1, 0, 1).clone(),
            tail: 0,
        }),
        _ => None,
    })
}

/// All permutations of `0..r` and `r..s` combined.
fn block_permutations(r: usize, s: usize) -> Vec<Vec<usize>> {
    fn perms(items: Vec<usize>) -> Vec<Vec<usize>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let x = rest.remove(i);
            for mut p in perms(rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let a = perms((0..r).collect());
    let b = perms((r..s).collect());
    let mut out = Vec::new();
    for x in &a {
        for y in &b {
            let mut v = x.clone();
            v.extend(y.iter().cloned());
            out.push(v);
        }
    }
    out
}

const IIA_SEARCH_LIMIT: u128 = 2_000_000;

/// Family IIa: `(λ̃_1, λ̃_2) = (λ_1, λ_2) P` with `P = [[1/a, 0], [β, a²]]` up to signed permutation.
fn decide_iia(r: usize, x: &[[Rational; 2]], rt: usize, y: &[[Rational; 2]]) -> Decision {
    let s = x.len();
    if s != y.len() {
        return Decision::not("dimensions differ");
    }
    if r != rt {
        return Decision::not("r differs");
    }
    let fact = |k: usize| (1..=k as u128).product::<u128>();
    if (fact(r) * fact(s - r)) << s > IIA_SEARCH_LIMIT {
        return Decision::Unknown { reason: "signed permutation search too large".into() };
    }
    let col = |rows: &[[Rational; 2]], c: usize| -> Vector { rows.iter().map(|v| v[c].clone()).collect() };
    let (y1, y2) = (col(y, 0), col(y, 1));
    for perm in block_permutations(r, s) {
        for mask in 0u32..(1u32 << s) {
            // M_{Π(α)} = σ_α Λ_α
            let mut m = vec![[qi(0), qi(0)]; s];
            for a in 0..s {
                m[perm[a]] = if mask >> a & 1 == 1 { neg2(&x[a]) } else { x[a].clone() };
            }
            let (m1, m2) = (col(&m, 0), col(&m, 1));
            let Some((alpha, beta)) = iia_solve(&m1, &m2, &y1, &y2) else { continue };
            let signs: Vec<i8> = (0..s).map(|a| if mask >> a & 1 == 1 { -1 } else { 1 }).collect();
            let mut cert = IsomorphismCertificate::new(perm.clone(), signs, ScaleOrP::Identity);
            match alpha {
                Some(al) => {
                    let p = Matrix::from_rows(vec![vec![al.recip(), qi(0)], vec![beta, &al * &al]]);
                    cert.m_map = Some(ln2_map(&perm, &p, 1));
                    cert.scale_or_p = ScaleOrP::P { p };
                }
                None => cert.note = Some("stabilizer parameter α is irrational".into()),
            }
            return Decision::Isomorphic { certificate: cert };
        }
    }
    Decision::not("no element of stab(a) and signed permutation relates the λ pairs")
}

/// Solves `y1 = m1/α + β m2`, `y2 = α² m2`; `Some((None, _))` when `α` is irrational.
fn iia_solve(m1: &[Rational], m2: &[Rational], y1: &[Rational], y2: &[Rational]) -> Option<(Option<Rational>, Rational)> {
    if is_zero_vec(m2) {
        if !is_zero_vec(y2) {
            return None;
        }
        let x = proportional(y1, m1)?;
        if x.is_zero() {
            return None;
        }
        return Some((Some(x.recip()), qi(0)));
    }
    let kappa = proportional(y2, m2)?;
    if !kappa.is_positive() {
        return None;
    }
    let a = Matrix::from_columns(m1.len(), &[m1.to_vec(), m2.to_vec()]);
    if a.rank() == 2 {
        let sol = a.solve(y1)?;
        if a.mul_vec(&sol) != y1 {
            return None;
        }
        let (x, beta) = (sol[0].clone(), sol[1].clone());
        if x.is_zero() || &x * &x * &kappa != qi(1) {
            return None;
        }
        Some((Some(x.recip()), beta))
    } else {
        // m1 ∥ m2: y1 must lie on the line of m2
        let c = proportional(y1, m2)?;
        let t = proportional(m1, m2).unwrap_or_else(|| qi(0));
        match rational_sqrt(&kappa) {
            Some(al) => {
                let beta = c - t / &al;
                Some((Some(al), beta))
            }
            None => Some((None, qi(0))),
        }
    }
}

/// `c` with `y = c x` (`x ≠ 0`).
fn proportional(y: &[Rational], x: &[Rational]) -> Option<Rational> {
    let i = x.iter().position(|v| !v.is_zero())?;
    let c = &y[i] / &x[i];
    if y.iter().zip(x).all(|(a, b)| a == &(&c * b)) {
        Some(c)
    } else {
        None
    }
}

/// Family IIb: `λ` rows agree up to a signed permutation.
fn decide_iib(r: usize, x: &[[Rational; 2]], rt: usize, y: &[[Rational; 2]]) -> Result<Decision> {
    if x.len() != y.len() {
        return Ok(Decision::not("dimensions differ"));
    }
    if r != rt {
        return Ok(Decision::not("r differs"));
    }
    let a = Ln2 { eps: eps_signs(r, x.len())?, lam: x.to_vec(), b: qi(0), tail: 2 };
    let b = Ln2 { eps: eps_signs(rt, y.len())?, lam: y.to_vec(), b: qi(0), tail: 2 };
    Ok(match match_rows(&a, &b, &Matrix::identity(2)) {
        Some((perm, signs)) => {
            let mut cert = IsomorphismCertificate::new(perm, signs, ScaleOrP::Identity);
            cert.m_map = Some(ln2_map(&cert.permutation, &Matrix::identity(2), 2));
            Decision::Isomorphic { certificate: cert }
        }
        None => Decision::not("λ rows differ beyond signed permutations"),
    })
}

/// Spectral type of the selfadjoint `F` of a family III triple.
#[derive(Clone, Debug, PartialEq)]
enum IiiType {
    /// Timelike eigenvalue, spacelike eigenvalues (with their W indices).
    Diag { t: Rational, space: Vec<(usize, Rational)> },
    Jordan { sign: i8, phi: Rational, rest: Vec<(usize, Rational)> },
    Complex { phi1: Rational, phi2: Rational, rest: Vec<(usize, Rational)> },
}

fn iii_type(block: Option<&LorentzBlock>, f: &[Rational]) -> Result<IiiType> {
    let tail = |off: usize| -> Vec<(usize, Rational)> { f.iter().enumerate().map(|(i, v)| (i + off, v.clone())).collect() };
    Ok(match block {
        None => IiiType::Diag { t: f[0].clone(), space: tail(0)[1..].to_vec() },
        Some(bl) => {
            let (g, phi) = bl.matrices()?;
            match bl {
                LorentzBlock::Diagonal { .. } => {
                    let mut space = vec![(1, phi[(0, 0)].clone())];
                    space.extend(tail(2));
                    IiiType::Diag { t: phi[(0, 0)].clone(), space }
                }
                LorentzBlock::Jordan { .. } => {
                    IiiType::Jordan { sign: sign(&g[(0, 1)]) as i8, phi: phi[(0, 0)].clone(), rest: tail(2) }
                }
                LorentzBlock::Complex { .. } => {
                    IiiType::Complex { phi1: phi[(0, 0)].clone(), phi2: phi[(0, 1)].clone(), rest: tail(2) }
                }
            }
        }
    })
}

fn decide_iii(x: &IiiType, y: &IiiType, t1: &SymmetricTriple, t2: &SymmetricTriple) -> Decision {
    let n = t1.dim_m();
    if n != t2.dim_m() {
        return Decision::not("dimensions differ");
    }
    let s = n - 2;
    // (κ, fixed W pairs, spacelike lists, block twist)
    let (kappa, mut fixed, xs, ys, twist) = match (x, y) {
        (IiiType::Diag { t, space }, IiiType::Diag { t: tt, space: st }) => {
            let k = t / tt;
            (k, vec![(0usize, 0usize)], space, st, false)
        }
        (IiiType::Jordan { sign: a, phi, rest }, IiiType::Jordan { sign: b, phi: pt, rest: rt }) => {
            if a != b {
                return Decision::not("Jordan block signs differ");
            }
            if phi.is_zero() || pt.is_zero() {
                return Decision::Unknown { reason: "singular Jordan block".into() };
            }
            (phi / pt, vec![], rest, rt, false)
        }
        (IiiType::Complex { phi1, phi2, rest }, IiiType::Complex { phi1: p1, phi2: p2, rest: rt }) => {
            let k = (phi2 / p2).abs();
            if phi1 != &(&k * p1) {
                return Decision::not("complex eigenvalues are not proportional");
            }
            let twist = sign(phi2) != sign(p2);
            let fixed = if twist { vec![(0, 1), (1, 0)] } else { vec![(0, 0), (1, 1)] };
            (k, fixed, rest, rt, twist)
        }
        _ => return Decision::not("the Lorentzian blocks have different types"),
    };
    if !kappa.is_positive() {
        return Decision::not("no positive scaling relates the spectra");
    }
    let scaled: Vec<Rational> = ys.iter().map(|(_, v)| v * &kappa).collect();
    let src: Vec<Rational> = xs.iter().map(|(_, v)| v.clone()).collect();
    let Some(m) = match_greedy(&src, &scaled, |a, b| a == b) else {
        return Decision::not("spacelike spectra differ after scaling");
    };
    for (a, &b) in m.iter().enumerate() {
        fixed.push((xs[a].0, ys[b].0));
    }
    if let IiiType::Jordan { .. } = x {
        fixed.push((0, 0));
        fixed.push((1, 1));
    }
    let mut perm = vec![0; s];
    for (a, b) in fixed {
        perm[a] = b;
    }
    let mut cert = IsomorphismCertificate::new(perm.clone(), vec![1; s], ScaleOrP::Scale { c: kappa.clone() });
    if twist {
        cert.note = Some("block basis swapped to flip the sign of φ2".into());
    }
    match rational_sqrt(&kappa) {
        Some(r) => {
            let mut base = lorentz_map(&perm, &r);
            let jordan = matches!(x, IiiType::Jordan { .. });
            let candidates: Vec<Matrix> = if jordan {
                let (a, b) = (r.clone(), r.recip());
                [(a.clone(), b.clone()), (b, a), (qi(1), qi(1))]
                    .into_iter()
                    .map(|(d0, d1)| {
                        let mut m = base.clone();
                        m[(1, 1)] = d0;
                        m[(2, 2)] = d1;
                        m
                    })
                    .collect()
            } else {
                vec![std::mem::replace(&mut base, Matrix::zeros(0, 0))]
            };
            cert.m_map = candidates.into_iter().find(|m| verify_m_map(t1, t2, m));
            if cert.m_map.is_none() {
                cert.note = Some("no explicit rational map found".into());
            }
        }
        None => cert.note = Some("Z* scales by sqrt(κ), which is irrational".into()),
    }
    Decision::Isomorphic { certificate: cert }
}

/// Family IV in its two normal cases.
fn decide_iv(a: &Rational, b: &Rational, f: &[Rational], at: &Rational, bt: &Rational, ft: &[Rational]) -> Decision {
    if f.len() != ft.len() {
        return Decision::not("dimensions differ");
    }
    let case = |a: &Rational, b: &Rational, f: &[Rational]| -> Option<u8> {
        if b.is_zero() && a.abs().is_one() {
            Some(1)
        } else if b.is_one() && f.first() == Some(a) {
            Some(2)
        } else {
            None
        }
    };
    let (Some(c1), Some(c2)) = (case(a, b, f), case(at, bt, ft)) else {
        return Decision::Unknown { reason: "parameters are not in normal form".into() };
    };
    if c1 != c2 {
        return Decision::not("b = 0 and b = 1 are distinct normal forms");
    }
    let fixed = if c1 == 1 {
        if a != at {
            return Decision::not("a differs");
        }
        0
    } else {
        if f[0] != ft[0] {
            return Decision::not("f_1 differs");
        }
        1
    };
    let Some(m) = match_greedy(&f[fixed..], &ft[fixed..], |x, y| x == y) else {
        return Decision::not("f multisets differ");
    };
    let mut perm: Vec<usize> = (0..fixed).collect();
    perm.extend(m.iter().map(|j| j + fixed));
    let u = f.len();
    let n = u + 5;
    let mut map = Matrix::identity(n);
    for i in 0..u {
        map[(3 + i, 3 + i)] = qi(0);
    }
    for (i, &j) in perm.iter().enumerate() {
        map[(3 + j, 3 + i)] = qi(1);
    }
    let mut cert = IsomorphismCertificate::new(perm, vec![1; u], ScaleOrP::Identity);
    cert.m_map = Some(map);
    Decision::Isomorphic { certificate: cert }
}

/// Decides isomorphism of two normal forms of the same family.
pub fn family_isomorphic(p1: &FamilyParams, p2: &FamilyParams) -> Result<Decision> {
    if p1.family() != p2.family() {
        return Err(TripleError::FamilyMismatch(format!("{:?} vs {:?}", p1.family(), p2.family())));
    }
    let t1 = p1.build()?;
    let t2 = p2.build()?;
    if t1.dim_m() != t2.dim_m() || t1.dim_h() != t2.dim_h() {
        return Ok(Decision::not("dimensions differ"));
    }
    let mut d = match (p1, p2) {
        (FamilyParams::Lorentz { f }, FamilyParams::Lorentz { f: ft }) => match lorentz_isomorphic(f, ft)? {
            Some(c) => Decision::Isomorphic { certificate: c },
            None => Decision::not("no positive scaling and permutation relate f and f̃"),
        },
        (FamilyParams::LeastNilpotentPQ { p: 1, epsilon, lambda, .. }, FamilyParams::LeastNilpotentPQ { epsilon: e2, lambda: l2, .. }) => {
            let f: Vec<Rational> = epsilon.iter().zip(lambda).map(|(e, l)| e * &l[0] * &l[0]).collect();
            let ft: Vec<Rational> = e2.iter().zip(l2).map(|(e, l)| e * &l[0] * &l[0]).collect();
            match lorentz_isomorphic(&f, &ft)? {
                Some(c) => Decision::Isomorphic { certificate: c },
                None => Decision::not("f = ελ² lists are not related by scaling"),
            }
        }
        (FamilyParams::LeastNilpotentPQ { p, .. }, FamilyParams::LeastNilpotentPQ { p: pt, .. }) if *p != 2 || *pt != 2 => {
            if p != pt {
                Decision::not("p differs")
            } else {
                Decision::Unknown { reason: format!("isomorphism for p = {p} is not decided") }
            }
        }
        (FamilyParams::IIa { r, l1, l2 }, FamilyParams::IIa { r: rt, l1: m1, l2: m2 }) => {
            decide_iia(*r, &rows2(l1, l2)?, *rt, &rows2(m1, m2)?)
        }
        (FamilyParams::IIb { r, l1, l2 }, FamilyParams::IIb { r: rt, l1: m1, l2: m2 }) => {
            decide_iib(*r, &rows2(l1, l2)?, *rt, &rows2(m1, m2)?)?
        }
        (FamilyParams::Nil23, FamilyParams::Nil23) | (FamilyParams::Nil24, FamilyParams::Nil24) => {
            let mut c = IsomorphismCertificate::identity(t1.dim_m() - 4);
            c.m_map = Some(Matrix::identity(t1.dim_m()));
            Decision::Isomorphic { certificate: c }
        }
        (FamilyParams::III { block, f }, FamilyParams::III { block: b2, f: f2 }) => {
            let x = iii_type(block.as_ref(), f)?;
            let y = iii_type(b2.as_ref(), f2)?;
            decide_iii(&x, &y, &t1, &t2)
        }
        (FamilyParams::IV { a, b, f }, FamilyParams::IV { a: at, b: bt, f: ft }) => decide_iv(a, b, f, at, bt, ft),
        _ => {
            let x = ln2_of(p1)?.expect("p = 2 least nilpotent data");
            let y = ln2_of(p2)?.expect("p = 2 least nilpotent data");
            decide_ln2(&x, &y)
        }
    };
    if let Decision::Isomorphic { certificate } = &mut d {
        if let Some(m) = &certificate.m_map {
            if !verify_m_map(&t1, &t2, m) {
                certificate.m_map = None;
                certificate.note = Some("explicit map failed verification; parameter-level certificate only".into());
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_forms::*;
    use crate::witt::{apply_gamma, rho_w_adapted};

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| qi(x)).collect()
    }

    #[test]
    fn fij_lorentz_and_nil22() {
        let t = build_lorentz(&[qi(2)]).unwrap();
        let fr = standard_frame(&t, 1).unwrap();
        let fs = fij_operators(&t, &fr).unwrap();
        assert_eq!(fs[0][0], Matrix::from_i64(&[vec![2]]));
        let fr2 = max_center_frame(&t).unwrap();
        assert_eq!(fij_operators(&t, &fr2).unwrap()[0][0], Matrix::from_i64(&[vec![2]]));
        for e in [1, -1] {
            let t = build_nil22(&qi(e)).unwrap();
            let fr = max_center_frame(&t).unwrap();
            assert_eq!(fr.s(), 0);
            assert!(simultaneous_diagonalize(&fij_operators(&t, &fr).unwrap(), &Matrix::zeros(0, 0))
                .unwrap()
                .records
                .is_empty());
        }
    }

    #[test]
    fn fij_family_ia_is_diagonal() {
        let (l1, l2) = (v(&[1, 2, 0]), v(&[3, -1, 1]));
        let t = build_ia(&qi(-1), 1, &l1, &l2).unwrap();
        let fr = standard_frame(&t, 2).unwrap();
        let fs = fij_operators(&t, &fr).unwrap();
        let eps = [-1, 1, 1];
        let lam = [&l1, &l2];
        for i in 0..2 {
            for j in 0..2 {
                let d: Vec<Rational> = (0..3).map(|a| qi(eps[a]) * &lam[i][a] * &lam[j][a]).collect();
                assert_eq!(fs[i][j], Matrix::diag(&d), "F_{i}{j}");
            }
        }
    }

    #[test]
    fn diagonalize_examples() {
        let sd = simultaneous_diagonalize(&[vec![Matrix::diag(&v(&[1, 4]))]], &Matrix::identity(2)).unwrap();
        let mut ev: Vec<Rational> = sd.records.iter().map(|r| r.eigen_f[(0, 0)].clone()).collect();
        ev.sort();
        assert_eq!(ev, v(&[1, 4]));
        let f = Matrix::from_rows(vec![vec![q(5, 2), q(3, 2)], vec![q(3, 2), q(5, 2)]]);
        let sd = simultaneous_diagonalize(&[vec![f]], &Matrix::identity(2)).unwrap();
        let mut ev: Vec<Rational> = sd.records.iter().map(|r| r.eigen_f[(0, 0)].clone()).collect();
        ev.sort();
        assert_eq!(ev, v(&[1, 4]));
        // char poly x² − 2
        let f = Matrix::from_i64(&[vec![0, 2], vec![1, 0]]);
        let g = Matrix::diag(&v(&[1, 2]));
        assert!(matches!(
            simultaneous_diagonalize(&[vec![f.clone()]], &g),
            Err(TripleError::IrrationalSpectrum(_))
        ));
        let fl = simultaneous_diagonalize_float(&[vec![f]], &g, 1e-9).unwrap();
        let mut e: Vec<f64> = fl.eigen_f.iter().map(|m| m[0][0]).collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((e[1] - 2f64.sqrt()).abs() < 1e-9 && !fl.exact);
        let a = Matrix::from_i64(&[vec![1, 1], vec![1, 0]]);
        let b = Matrix::diag(&v(&[1, 2]));
        assert_eq!(
            simultaneous_diagonalize(&[vec![a.clone(), b.clone()], vec![b.clone(), a]], &Matrix::identity(2)),
            Err(TripleError::NonCommuting)
        );
    }

    fn nil_dim(t: &SymmetricTriple) -> usize {
        let fr = max_center_frame(t).unwrap();
        let (_, sd) = spectral_frame(t, &fr).unwrap();
        split_w(&sd.records).0.len()
    }

    #[test]
    fn split_w_examples() {
        assert_eq!(nil_dim(&build_lorentz(&v(&[1, 2])).unwrap()), 0);
        assert_eq!(nil_dim(&build_iia(0, &v(&[1]), &v(&[2])).unwrap()), 1);
        assert_eq!(nil_dim(&build_iib(1, &v(&[1]), &v(&[0])).unwrap()), 2);
        let t = build_nil24().unwrap();
        let fr = max_center_frame(&t).unwrap();
        assert_eq!(nil_dim(&t), fr.s());
    }

    #[test]
    fn coefficient_round_trip() {
        let t = build_ia(&qi(1), 0, &v(&[1, 1]), &v(&[0, 2])).unwrap();
        let c = extract_coefficients(&t, &standard_frame(&t, 2).unwrap()).unwrap();
        assert!(coefficient_relations_check(&c).ok());
        let t2 = c.build().unwrap();
        let c2 = extract_coefficients(&t2, &standard_frame(&t2, 2).unwrap()).unwrap();
        assert_eq!(c, c2);
        assert_eq!(c.b(0, 1, 0, 1), &qi(1));
    }

    fn perturbed_ia() -> (SymmetricTriple, SymmetricTriple) {
        let t = build_ia(&qi(1), 1, &v(&[1, 2]), &v(&[1, -1])).unwrap();
        let l = Matrix::from_rows(vec![v(&[1, -2]), vec![q(1, 2), qi(3)]]);
        let qm = rho_w_adapted(2, &Matrix::identity(2), &l);
        let t2 = apply_gamma(&t, &qm).unwrap();
        (t, t2)
    }

    #[test]
    fn splitting_recovers_split_form() {
        let (t, t2) = perturbed_ia();
        let fr = standard_frame(&t2, 2).unwrap();
        let c = extract_coefficients(&t2, &fr).unwrap();
        assert!(c.a.iter().any(|x| !x.is_zero()), "perturbation must create a ≠ 0");
        let sp = splitting_transform(&t2, &fr).unwrap();
        assert_eq!(sp.reg.len(), 2);
        // the untouched normal form needs no transformation
        let sp0 = splitting_transform(&t, &standard_frame(&t, 2).unwrap()).unwrap();
        assert!(sp0.n.is_zero());
        let sp1 = splitting_transform(&build_lorentz(&v(&[3, -1])).unwrap(), &standard_frame(&build_lorentz(&v(&[3, -1])).unwrap(), 1).unwrap()).unwrap();
        assert!(sp1.n.is_zero());
    }

    #[test]
    fn spectral_multiset_gamma_invariant() {
        let (t, t2) = perturbed_ia();
        let key = |t: &SymmetricTriple| {
            let (_, sd) = spectral_frame(t, &max_center_frame(t).unwrap()).unwrap();
            let mut k: Vec<Vec<Rational>> = sd.records.iter().map(|r| r.eigen_f.entries().to_vec()).collect();
            k.sort();
            k
        };
        assert_eq!(key(&t), key(&t2));
    }

    #[test]
    fn v_lambda_consistency() {
        let (l1, l2) = (v(&[1, 0, 2]), v(&[0, 1, -1]));
        let t = build_ia(&qi(1), 1, &l1, &l2).unwrap();
        let (_, sd) = spectral_frame(&t, &standard_frame(&t, 2).unwrap()).unwrap();
        assert_eq!(v_lambda_from_spectral(&sd.records), v_lambda(&l1, &l2));
        assert_eq!(v_lambda(&v(&[1, 0]), &v(&[0, 1])), qi(2));
    }

    #[test]
    fn lorentz_decider() {
        let c = lorentz_isomorphic(&v(&[1, 2]), &v(&[2, 4])).unwrap().unwrap();
        assert_eq!(c.scale_or_p, ScaleOrP::Scale { c: q(1, 2) });
        assert_eq!(c.permutation, vec![0, 1]);
        assert!(lorentz_isomorphic(&v(&[1, 2]), &v(&[1, 3])).unwrap().is_none());
        let c = lorentz_isomorphic(&v(&[1, 2]), &v(&[1, 2])).unwrap().unwrap();
        assert_eq!(c.scale_or_p, ScaleOrP::Scale { c: qi(1) });
        assert!(lorentz_isomorphic(&v(&[1]), &v(&[1, 2])).is_err());
        let (t1, t2) = (build_lorentz(&v(&[4, 1])).unwrap(), build_lorentz(&v(&[1, 4])).unwrap());
        let c = lorentz_isomorphic(&v(&[4, 1]), &v(&[1, 4])).unwrap().unwrap();
        assert!(verify_m_map(&t1, &t2, c.m_map.as_ref().unwrap()));
        let (t1, t2) = (build_lorentz(&v(&[4, 8])).unwrap(), build_lorentz(&v(&[1, 2])).unwrap());
        let c = lorentz_isomorphic(&v(&[4, 8]), &v(&[1, 2])).unwrap().unwrap();
        assert!(verify_m_map(&t1, &t2, c.m_map.as_ref().unwrap()));
    }

    fn iso(a: &FamilyParams, b: &FamilyParams) -> Decision {
        family_isomorphic(a, b).unwrap()
    }

    #[test]
    fn spec_examples() {
        let a = FamilyParams::Ia { eps_y: qi(1), r: 0, l1: v(&[1, 0]), l2: v(&[0, 1]) };
        let b = FamilyParams::Ia { eps_y: qi(1), r: 0, l1: v(&[0, 1]), l2: v(&[-1, 0]) };
        let d = iso(&a, &b);
        let c = d.certificate().expect("isomorphic");
        assert!(c.m_map.is_some());
        let a = FamilyParams::IV { a: qi(1), b: qi(0), f: v(&[2, 3]) };
        let b = FamilyParams::IV { a: qi(1), b: qi(0), f: v(&[3, 2]) };
        let c = iso(&a, &b).certificate().cloned().expect("isomorphic");
        assert_eq!(c.permutation, vec![1, 0]);
        assert!(c.m_map.is_some());
        let a = FamilyParams::IV { a: qi(1), b: qi(0), f: v(&[2]) };
        let b = FamilyParams::IV { a: qi(-1), b: qi(0), f: v(&[2]) };
        assert!(matches!(iso(&a, &b), Decision::NotIsomorphic { .. }));
        assert!(family_isomorphic(&a, &FamilyParams::Nil23).is_err());
    }

    #[test]
    fn ia_orbits() {
        // V_λ differs: not isomorphic
        let a = FamilyParams::Ia { eps_y: qi(1), r: 0, l1: v(&[1, 0]), l2: v(&[0, 1]) };
        let b = FamilyParams::Ia { eps_y: qi(1), r: 0, l1: v(&[1, 0]), l2: v(&[0, 2]) };
        assert!(!iso(&a, &b).is_isomorphic());
        let b = FamilyParams::Ia { eps_y: qi(-1), r: 0, l1: v(&[1, 0]), l2: v(&[0, 1]) };
        assert!(!iso(&a, &b).is_isomorphic());
        // shear in SL(2)
        let a = FamilyParams::Ia { eps_y: qi(1), r: 1, l1: v(&[1, 2, 1]), l2: v(&[0, 1, 3]) };
        let b = FamilyParams::Ia { eps_y: qi(1), r: 1, l1: v(&[1, 2, 1]), l2: v(&[1, 3, 4]) };
        let d = iso(&a, &b);
        assert!(d.certificate().unwrap().m_map.is_some(), "{d:?}");
        // rank one: λ1 ∥ λ2
        let a = FamilyParams::Ia { eps_y: qi(1), r: 0, l1: v(&[1, 2]), l2: v(&[2, 4]) };
        let b = FamilyParams::Ia { eps_y: qi(1), r: 0, l1: v(&[-2, 1]), l2: v(&[0, 0]) };
        let d = iso(&a, &b);
        assert!(d.certificate().unwrap().m_map.is_some(), "{d:?}");
        let b = FamilyParams::Ia { eps_y: qi(1), r: 0, l1: v(&[3, 1]), l2: v(&[0, 0]) };
        assert!(!iso(&a, &b).is_isomorphic());
    }

    #[test]
    fn ib_and_ln() {
        let a = FamilyParams::Ib { r: 0, l1: v(&[1, 0, 1]), l2: v(&[0, 1, 1]) };
        let b = FamilyParams::Ib { r: 0, l1: v(&[2, 0, 2]), l2: v(&[0, 5, 5]) };
        assert!(iso(&a, &b).certificate().unwrap().m_map.is_some());
        let b = FamilyParams::Ib { r: 0, l1: v(&[1, 0, 1]), l2: v(&[0, 1, 2]) };
        assert!(!iso(&a, &b).is_isomorphic());
        let s = sample_params(Family::LeastNilpotentPQ);
        assert!(iso(&s, &s).certificate().unwrap().m_map.is_some());
    }

    #[test]
    fn iia_iib_orbits() {
        let a = FamilyParams::IIa { r: 0, l1: v(&[1, 0]), l2: v(&[0, 1]) };
        // α = 2, β = 1: λ̃1 = λ1/2 + λ2, λ̃2 = 4 λ2
        let b = FamilyParams::IIa { r: 0, l1: vec![q(1, 2), qi(1)], l2: v(&[0, 4]) };
        let d = iso(&a, &b);
        let c = d.certificate().expect("isomorphic");
        assert!(c.m_map.is_some(), "{d:?}");
        let b = FamilyParams::IIa { r: 0, l1: v(&[1, 0]), l2: v(&[0, 2]) };
        assert!(!iso(&a, &b).is_isomorphic());
        let a = FamilyParams::IIb { r: 1, l1: v(&[1, 2]), l2: v(&[0, 1]) };
        let b = FamilyParams::IIb { r: 1, l1: v(&[-1, 2]), l2: v(&[0, 1]) };
        assert!(iso(&a, &b).certificate().unwrap().m_map.is_some());
        let b = FamilyParams::IIb { r: 1, l1: v(&[2, 1]), l2: v(&[1, 0]) };
        assert!(!iso(&a, &b).is_isomorphic());
    }

    #[test]
    fn iii_orbits() {
        let d = |phi: &str| Some(LorentzBlock::Diagonal { phi: phi.into() });
        let a = FamilyParams::III { block: d("1"), f: v(&[2, 3]) };
        let b = FamilyParams::III { block: d("4"), f: v(&[12, 8]) };
        assert!(iso(&a, &b).certificate().unwrap().m_map.is_some());
        let b = FamilyParams::III { block: d("1"), f: v(&[2, 4]) };
        assert!(!iso(&a, &b).is_isomorphic());
        let j = |phi: &str, sign| Some(LorentzBlock::Jordan { phi: phi.into(), sign });
        let a = FamilyParams::III { block: j("1", 1), f: v(&[2]) };
        let b = FamilyParams::III { block: j("4", 1), f: v(&[8]) };
        assert!(iso(&a, &b).certificate().unwrap().m_map.is_some());
        let b = FamilyParams::III { block: j("1", -1), f: v(&[2]) };
        assert!(!iso(&a, &b).is_isomorphic());
        let c = |a: &str, b: &str| Some(LorentzBlock::Complex { phi1: a.into(), phi2: b.into() });
        let a = FamilyParams::III { block: c("1", "2"), f: v(&[1]) };
        let b = FamilyParams::III { block: c("1", "-2"), f: v(&[1]) };
        assert!(iso(&a, &b).certificate().unwrap().m_map.is_some());
        let a = FamilyParams::III { block: None, f: v(&[1, 2, 3]) };
        let b = FamilyParams::III { block: None, f: v(&[1, 3, 2]) };
        assert!(iso(&a, &b).certificate().unwrap().m_map.is_some());
        let b = FamilyParams::III { block: None, f: v(&[2, 1, 3]) };
        assert!(!iso(&a, &b).is_isomorphic());
    }

    #[test]
    fn sample_certificates_verify() {
        for fam in Family::ALL {
            let p = sample_params(fam);
            let d = iso(&p, &p);
            let c = d.certificate().unwrap_or_else(|| panic!("{fam:?}: {d:?}"));
            assert!(c.m_map.is_some(), "{fam:?}: {c:?}");
        }
    }
}
