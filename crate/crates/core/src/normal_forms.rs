//! Normal forms of indecomposable solvable symmetric triples in signature
//! `(1, n-1)` and `(2, n-2)`, plus the maximal-center coefficient ansatz
//! `(a, b, f)` with its relation checker.
//!
//! Every builder assembles the algebra from the action of an `h` basis on `m`
//! and the brackets `[m, m]`, extends the form invariantly and runs the full
//! verifier before returning.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Result, TripleError};
use crate::json::JsonScalar;
use crate::lie::LieAlgebra;
use crate::linalg::{is_zero_vec, q, qi, zero_vec, Matrix, Rational, Vector};
use crate::triple::{extend_form, GradedAlgebra, SymmetricTriple};

// ---------------------------------------------------------------------------
// Assembly from an operator table.

/// `h` given by operators on `m`. Dependent operators are identified in the
/// quotient, so `h` is the span of the listed operators.
#[derive(Clone, Debug)]
pub struct OpTable {
    m_labels: Vec<String>,
    gram_m: Matrix,
    h: Vec<(String, Matrix)>,
    mm: Vec<(usize, usize, usize, Rational)>,
}

impl OpTable {
    pub fn new(m_labels: Vec<String>, gram_m: Matrix) -> Self {
        OpTable { m_labels, gram_m, h: Vec::new(), mm: Vec::new() }
    }

    pub fn dim_m(&self) -> usize {
        self.m_labels.len()
    }

    pub fn m_index(&self, label: &str) -> usize {
        self.m_labels.iter().position(|l| l == label).unwrap_or_else(|| panic!("no m label {label}"))
    }

    /// New `h` generator acting as zero.
    pub fn add_h(&mut self, label: impl Into<String>) -> usize {
        let n = self.dim_m();
        self.h.push((label.into(), Matrix::zeros(n, n)));
        self.h.len() - 1
    }

    /// `[h, m_from] += c · m_to`
    pub fn act(&mut self, h: usize, from: usize, to: usize, c: Rational) {
        let e = &mut self.h[h].1[(to, from)];
        *e += c;
    }

    /// `[m_a, m_b] += c · h`
    pub fn bracket(&mut self, a: usize, b: usize, h: usize, c: Rational) {
        if !c.is_zero() {
            self.mm.push((a, b, h, c));
        }
    }

    pub fn operator(&self, h: usize) -> &Matrix {
        &self.h[h].1
    }

    /// Graded algebra on `m ⊕ h`, `m` first. `[h, h]` is the commutator of
    /// the operators; leaving their span is a closure error.
    pub fn graded(&self) -> Result<GradedAlgebra> {
        let dm = self.dim_m();
        let mut chosen: Vec<usize> = Vec::new();
        let mut rows: Vec<Vector> = Vec::new();
        for (k, (_, d)) in self.h.iter().enumerate() {
            let flat = d.entries().to_vec();
            if is_zero_vec(&flat) {
                continue;
            }
            let mut trial = rows.clone();
            trial.push(flat);
            if Matrix::from_rows_with_cols(trial.clone(), dm * dm).rank() > rows.len() {
                rows = trial;
                chosen.push(k);
            }
        }
        let dh = chosen.len();
        let span = Matrix::from_columns(dm * dm, &rows);
        let coords = |m: &Matrix| -> Option<Vector> {
            if dh == 0 {
                return m.is_zero().then(Vec::new);
            }
            span.solve(m.entries())
        };
        let n = dm + dh;
        let mut labels = self.m_labels.clone();
        labels.extend(chosen.iter().map(|&k| self.h[k].0.clone()));
        let mut alg = LieAlgebra::abelian(labels);
        // [m, m]
        let mut mm: std::collections::BTreeMap<(usize, usize), Vector> = Default::default();
        for (a, b, hk, c) in &self.mm {
            if a == b {
                continue;
            }
            let cc = coords(&self.h[*hk].1).expect("operator lies in its own span");
            let (i, j, s) = if a < b { (*a, *b, c.clone()) } else { (*b, *a, -c) };
            let e = mm.entry((i, j)).or_insert_with(|| zero_vec(n));
            for (t, x) in cc.iter().enumerate() {
                e[dm + t] += &s * x;
            }
        }
        for ((i, j), v) in mm {
            alg.set_bracket(i, j, v);
        }
        // [h, m] and [h, h]
        for (t, &k) in chosen.iter().enumerate() {
            let d = &self.h[k].1;
            for j in 0..dm {
                let mut v = zero_vec(n);
                for i in 0..dm {
                    v[i] = d[(i, j)].clone();
                }
                alg.set_bracket(dm + t, j, v);
            }
            for (u, &l) in chosen.iter().enumerate().skip(t + 1) {
                let comm = d.commutator(&self.h[l].1);
                let c = coords(&comm).ok_or_else(|| {
                    TripleError::Closure(format!(
                        "[{}, {}] leaves the span of the h operators",
                        self.h[k].0, self.h[l].0
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
            gram_m: self.gram_m.clone(),
        })
    }

    /// Assembles, extends the form and verifies every axiom.
    pub fn assemble(&self) -> Result<SymmetricTriple> {
        let t = extend_form(&self.graded()?)?;
        let rep = t.verify();
        if !rep.all_pass() {
            return Err(TripleError::InvalidTriple(format!("assembled triple fails verification: {:?}", rep.messages)));
        }
        Ok(t)
    }
}

fn expect_gram_h(t: &SymmetricTriple, expected: &Matrix) -> Result<()> {
    if &t.gram_h() != expected {
        return Err(TripleError::InvalidTriple(format!(
            "form on h differs from the normal form: got {:?}, expected {:?}",
            t.gram_h(),
            expected
        )));
    }
    Ok(())
}

/// Gram matrix pairing `Z_i ↔ Z*_i` around a middle block.
fn witt_gram(p: usize, middle: &Matrix) -> Matrix {
    let k = middle.rows();
    let n = 2 * p + k;
    let mut g = Matrix::zeros(n, n);
    for i in 0..p {
        g[(i, p + k + i)] = qi(1);
        g[(p + k + i, i)] = qi(1);
    }
    for i in 0..k {
        for j in 0..k {
            g[(p + i, p + j)] = middle[(i, j)].clone();
        }
    }
    g
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

pub(crate) fn eps_list(r: usize, s: usize) -> Result<Vec<Rational>> {
    if r > s {
        return Err(TripleError::InvalidParameters(format!("r = {r} exceeds the number {s} of W directions")));
    }
    Ok((0..s).map(|a| if a < r { qi(-1) } else { qi(1) }).collect())
}

// ---------------------------------------------------------------------------
// Signature (1, n-1).

/// `τ_n(f)`: `m = (Z, W_1..W_{n-2}, Z*)`, `h = (X_1..X_{n-2})`.
pub fn build_lorentz(f: &[Rational]) -> Result<SymmetricTriple> {
    if let Some(a) = f.iter().position(Zero::is_zero) {
        return Err(TripleError::InvalidParameters(format!("f[{}] = 0", a + 1)));
    }
    let s = f.len();
    let mut ml = vec!["Z".to_string()];
    ml.extend(labels("W", s));
    ml.push("Z*".into());
    let mut tab = OpTable::new(ml, witt_gram(1, &Matrix::identity(s)));
    let (z, zs) = (0, s + 1);
    for (a, fa) in f.iter().enumerate() {
        let x = tab.add_h(format!("X{}", a + 1));
        let w = 1 + a;
        tab.bracket(zs, w, x, qi(1));
        tab.act(x, zs, w, fa.clone());
        tab.act(x, w, z, -fa);
    }
    let t = tab.assemble()?;
    expect_gram_h(&t, &Matrix::diag(f))?;
    Ok(t)
}

// ---------------------------------------------------------------------------
// Maximal center, least nilpotent.

/// Algebraic curvature tensor `b_{ijkl}` on `z*` of dimension `p`, flat `p⁴`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureCoeffs {
    pub p: usize,
    pub b: Vec<Rational>,
}

impl CurvatureCoeffs {
    pub fn zero(p: usize) -> Self {
        CurvatureCoeffs { p, b: vec![Rational::zero(); p.pow(4)] }
    }

    pub fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        let p = self.p;
        ((i * p + j) * p + k) * p + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &Rational {
        &self.b[self.idx(i, j, k, l)]
    }

    /// Sets `b_{ijkl}` and the entries forced by pair symmetry and skewness.
    pub fn set_with_symmetries(&mut self, i: usize, j: usize, k: usize, l: usize, v: Rational) {
        for (a, b, c, d, s) in [
            (i, j, k, l, 1),
            (j, i, k, l, -1),
            (i, j, l, k, -1),
            (j, i, l, k, 1),
            (k, l, i, j, 1),
            (l, k, i, j, -1),
            (k, l, j, i, -1),
            (l, k, j, i, 1),
        ] {
            let x = self.idx(a, b, c, d);
            self.b[x] = if s == 1 { v.clone() } else { -v.clone() };
        }
    }

    /// Names of violated symmetries with an offending index tuple.
    pub fn symmetry_violations(&self) -> Vec<(&'static str, [usize; 4])> {
        let p = self.p;
        let mut out = Vec::new();
        for i in 0..p {
            for j in 0..p {
                for k in 0..p {
                    for l in 0..p {
                        let v = self.get(i, j, k, l);
                        if v != self.get(k, l, i, j) {
                            out.push(("pair", [i, j, k, l]));
                        }
                        if *v != -self.get(j, i, k, l) {
                            out.push(("skew", [i, j, k, l]));
                        }
                        let cyc = v + self.get(j, k, i, l) + self.get(k, i, j, l);
                        if !cyc.is_zero() {
                            out.push(("bianchi", [i, j, k, l]));
                        }
                    }
                }
            }
        }
        out
    }
}

/// `τ_{p,q}(R_b, ε, Λ)`; `lambda[α]` holds the coordinates `B(Z*_k, Λ_α)`.
///
/// `m = (Z_1..Z_p, W_1..W_s, Z*_1..Z*_p)` with `s = q - p`; `h` is spanned by
/// the `Y_ij` that act independently, followed by `W*_1..W*_s`.
pub fn build_least_nilpotent_pq(
    p: usize,
    q: usize,
    b: &CurvatureCoeffs,
    epsilon: &[Rational],
    lambda: &[Vector],
) -> Result<SymmetricTriple> {
    ln_table(p, q, b, epsilon, lambda, "Y", "W*")?.assemble()
}

fn ln_table(
    p: usize,
    q: usize,
    b: &CurvatureCoeffs,
    epsilon: &[Rational],
    lambda: &[Vector],
    y_label: &str,
    wstar: &str,
) -> Result<OpTable> {
    if q < p {
        return Err(TripleError::InvalidParameters(format!("q = {q} < p = {p}")));
    }
    let s = q - p;
    if b.p != p || epsilon.len() != s || lambda.len() != s {
        return Err(TripleError::DimensionMismatch(format!("expected p = {p} and {s} W directions")));
    }
    if let Some(v) = b.symmetry_violations().first() {
        return Err(TripleError::Symmetry(format!("b violates {} at {:?}", v.0, v.1)));
    }
    for (a, e) in epsilon.iter().enumerate() {
        if e.abs() != Rational::one() {
            return Err(TripleError::InvalidParameters(format!("epsilon[{}] is not ±1", a + 1)));
        }
        if lambda[a].len() != p || is_zero_vec(&lambda[a]) {
            return Err(TripleError::InvalidParameters(format!("Lambda[{}] must be a nonzero vector in z", a + 1)));
        }
    }
    // Closure: b(Y, z*) + span Λ = z.
    let mut zvecs: Vec<Vector> = lambda.to_vec();
    for i in 0..p {
        for j in 0..p {
            for k in 0..p {
                zvecs.push((0..p).map(|l| b.get(i, j, k, l).clone()).collect());
            }
        }
    }
    let zs = crate::linalg::Subspace::span(p, &zvecs);
    if zs.dim() < p {
        let perp = Matrix::from_rows_with_cols(zs.basis().to_vec(), p).kernel();
        return Err(TripleError::Closure(format!(
            "[h, m] misses part of the center: b(Y, z*) + span Λ has dimension {} < {p}; missing directions annihilate {:?}",
            zs.dim(),
            perp.iter().map(|v| v.iter().map(crate::linalg::fmt_rational).collect::<Vec<_>>()).collect::<Vec<_>>()
        )));
    }
    let mut ml = labels("Z", p);
    ml.extend(labels("W", s));
    ml.extend(labels("Z*", p));
    let mut tab = OpTable::new(ml, witt_gram(p, &Matrix::identity(s)));
    let zi = |i: usize| i;
    let wi = |a: usize| p + a;
    let zsi = |i: usize| p + s + i;
    for i in 0..p {
        for j in i + 1..p {
            let label = if p == 2 { y_label.to_string() } else { format!("{y_label}{}{}", i + 1, j + 1) };
            let y = tab.add_h(label);
            tab.bracket(zsi(i), zsi(j), y, qi(1));
            for k in 0..p {
                for l in 0..p {
                    tab.act(y, zsi(k), zi(l), b.get(i, j, k, l).clone());
                }
            }
        }
    }
    for a in 0..s {
        let w = tab.add_h(format!("{wstar}{}", a + 1));
        for k in 0..p {
            let lk = &lambda[a][k];
            tab.bracket(zsi(k), wi(a), w, lk.clone());
            tab.act(w, zsi(k), wi(a), &epsilon[a] * lk);
            tab.act(w, wi(a), zi(k), -(&epsilon[a] * lk));
        }
    }
    Ok(tab)
}

fn lambda_pairs(l1: &[Rational], l2: &[Rational]) -> Result<Vec<Vector>> {
    if l1.len() != l2.len() {
        return Err(TripleError::DimensionMismatch("λ1 and λ2 differ in length".into()));
    }
    let out: Vec<Vector> = l1.iter().zip(l2).map(|(a, b)| vec![a.clone(), b.clone()]).collect();
    if let Some(a) = out.iter().position(|v| is_zero_vec(v)) {
        return Err(TripleError::InvalidParameters(format!("(λ1, λ2) vanishes at α = {}", a + 1)));
    }
    Ok(out)
}

fn rank2(l1: &[Rational], l2: &[Rational]) -> usize {
    Matrix::from_rows_with_cols(vec![l1.to_vec(), l2.to_vec()], l1.len()).rank()
}

fn sign_check(e: &Rational, what: &str) -> Result<()> {
    if e.abs() != Rational::one() {
        return Err(TripleError::InvalidParameters(format!("{what} must be ±1")));
    }
    Ok(())
}

/// Family Ia, `τ_n(ε_Y, r, λ)`: `p = 2`, `b_{1212} = ε_Y`, no nilpotent part.
pub fn build_ia(eps_y: &Rational, r: usize, l1: &[Rational], l2: &[Rational]) -> Result<SymmetricTriple> {
    sign_check(eps_y, "ε_Y")?;
    let s = l1.len();
    let eps = eps_list(r, s)?;
    let lam = lambda_pairs(l1, l2)?;
    let mut b = CurvatureCoeffs::zero(2);
    b.set_with_symmetries(0, 1, 0, 1, eps_y.clone());
    let t = ln_table(2, s + 2, &b, &eps, &lam, "y", "W*")?.assemble()?;
    let mut d = vec![eps_y.clone()];
    d.extend(eps);
    expect_gram_h(&t, &Matrix::diag(&d))?;
    Ok(t)
}

/// Family Ib, `τ_n(r, λ)`: as Ia without `y`; requires `rank(λ) = 2`.
pub fn build_ib(r: usize, l1: &[Rational], l2: &[Rational]) -> Result<SymmetricTriple> {
    let s = l1.len();
    let eps = eps_list(r, s)?;
    let lam = lambda_pairs(l1, l2)?;
    if rank2(l1, l2) < 2 {
        return Err(TripleError::InvalidParameters("λ1, λ2 must be linearly independent".into()));
    }
    let t = ln_table(2, s + 2, &CurvatureCoeffs::zero(2), &eps, &lam, "y", "W*")?.assemble()?;
    expect_gram_h(&t, &Matrix::diag(&eps))?;
    Ok(t)
}

/// `τ_{2,2}(ε_Y)`.
pub fn build_nil22(eps_y: &Rational) -> Result<SymmetricTriple> {
    build_ia(eps_y, 0, &[], &[])
}

/// Families IIa (`nil = 1`) and IIb (`nil = 2`) share everything but the
/// nilpotent block `w` / `w_1, w_2`.
fn build_ii(nil: usize, r: usize, l1: &[Rational], l2: &[Rational]) -> Result<SymmetricTriple> {
    let s = l1.len();
    let eps = eps_list(r, s)?;
    let lam = lambda_pairs(l1, l2)?;
    let mut ml = labels("Z", 2);
    ml.extend(labels("W", s));
    if nil == 1 {
        ml.push("w".into());
    } else {
        ml.extend(labels("w", 2));
    }
    ml.extend(labels("Z*", 2));
    let mut tab = OpTable::new(ml, witt_gram(2, &Matrix::identity(s + nil)));
    let (z1, z2) = (0, 1);
    let wi = |a: usize| 2 + a;
    let wn = |k: usize| 2 + s + k;
    let (zs1, zs2) = (2 + s + nil, 3 + s + nil);
    let y = tab.add_h("y");
    let mut wst = Vec::new();
    for a in 0..s {
        wst.push(tab.add_h(format!("W*{}", a + 1)));
    }
    let w_star = tab.add_h("w*");
    tab.bracket(zs1, zs2, y, qi(1));
    for a in 0..s {
        for (k, zk, zsk) in [(0, z1, zs1), (1, z2, zs2)] {
            let lk = &lam[a][k];
            tab.bracket(zsk, wi(a), wst[a], lk.clone());
            tab.act(wst[a], zsk, wi(a), &eps[a] * lk);
            tab.act(wst[a], wi(a), zk, -(&eps[a] * lk));
        }
    }
    tab.act(w_star, zs1, z2, qi(1));
    tab.act(w_star, zs2, z1, qi(-1));
    if nil == 1 {
        tab.bracket(zs1, wn(0), w_star, qi(1));
        tab.act(y, zs1, wn(0), qi(1));
        tab.act(y, wn(0), z1, qi(-1));
    } else {
        for (k, zk, zsk) in [(0, z1, zs1), (1, z2, zs2)] {
            tab.bracket(zsk, wn(k), w_star, qi(1));
            tab.act(y, zsk, wn(k), qi(1));
            tab.act(y, wn(k), zk, qi(-1));
        }
    }
    let t = tab.assemble()?;
    let dh = s + 2;
    let mut bh = Matrix::zeros(dh, dh);
    bh[(0, dh - 1)] = qi(1);
    bh[(dh - 1, 0)] = qi(1);
    for (a, e) in eps.iter().enumerate() {
        bh[(1 + a, 1 + a)] = e.clone();
    }
    expect_gram_h(&t, &bh)?;
    Ok(t)
}

/// Family IIa, `τ_n(r, λ, 1)`: `dim W_nil = 1`.
pub fn build_iia(r: usize, l1: &[Rational], l2: &[Rational]) -> Result<SymmetricTriple> {
    build_ii(1, r, l1, l2)
}

/// Family IIb, `τ_n(r, λ, 2)`: `dim W_nil = 2`.
pub fn build_iib(r: usize, l1: &[Rational], l2: &[Rational]) -> Result<SymmetricTriple> {
    build_ii(2, r, l1, l2)
}

/// `τ_{2,3}`
pub fn build_nil23() -> Result<SymmetricTriple> {
    build_iia(0, &[], &[])
}

/// `τ_{2,4}`
pub fn build_nil24() -> Result<SymmetricTriple> {
    build_iib(0, &[], &[])
}

// ---------------------------------------------------------------------------
// One-dimensional center.

/// The 2×2 Lorentzian block of family III.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LorentzBlock {
    /// `g = diag(-1, 1)`, `Φ = φ I`.
    Diagonal { phi: String },
    /// `g = ±antidiag(1, 1)`, `Φ = [[φ, 1], [0, φ]]`.
    Jordan { phi: String, sign: i8 },
    /// `g = antidiag(1, 1)`, `Φ = [[φ1, φ2], [-φ2, φ1]]`.
    Complex { phi1: String, phi2: String },
}

impl LorentzBlock {
    /// `(g, Φ)` with `[W*_i, Z*] = Σ_k Φ_ki W_k`.
    pub fn matrices(&self) -> Result<(Matrix, Matrix)> {
        let pr = |s: &str| crate::linalg::parse_rational(s);
        Ok(match self {
            LorentzBlock::Diagonal { phi } => {
                let p = pr(phi)?;
                (Matrix::diag(&[qi(-1), qi(1)]), Matrix::diag(&[p.clone(), p]))
            }
            LorentzBlock::Jordan { phi, sign } => {
                let p = pr(phi)?;
                let e = match sign {
                    1 => qi(1),
                    -1 => qi(-1),
                    _ => return Err(TripleError::InvalidParameters("Jordan sign must be ±1".into())),
                };
                (
                    Matrix::from_rows(vec![vec![qi(0), e.clone()], vec![e, qi(0)]]),
                    Matrix::from_rows(vec![vec![p.clone(), qi(1)], vec![qi(0), p]]),
                )
            }
            LorentzBlock::Complex { phi1, phi2 } => {
                let (a, b) = (pr(phi1)?, pr(phi2)?);
                if b.is_zero() {
                    return Err(TripleError::InvalidParameters("φ2 = 0 reduces to the diagonal block".into()));
                }
                (
                    Matrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(1), qi(0)]]),
                    Matrix::from_rows(vec![vec![a.clone(), b.clone()], vec![-b, a]]),
                )
            }
        })
    }
}

/// Family III, `τ_n(g, Φ, f)`: `m = (Z, W_1..W_{n-2}, Z*)`, `h = (W*_1..W*_{n-2})`.
///
/// With a block, `W_1, W_2` span the Lorentzian block and `f` acts on the rest.
/// Without one, `B|W = diag(-1, 1, ..)` and `f_1` belongs to the timelike `W_1`.
pub fn build_iii(block: Option<&LorentzBlock>, f: &[Rational]) -> Result<SymmetricTriple> {
    if let Some(a) = f.iter().position(Zero::is_zero) {
        return Err(TripleError::InvalidParameters(format!("f[{}] = 0", a + 1)));
    }
    let (gw, fw) = match block {
        Some(bl) => {
            let (g, phi) = bl.matrices()?;
            if phi.determinant().is_zero() {
                return Err(TripleError::InvalidParameters("Φ is singular".into()));
            }
            let k = f.len();
            (Matrix::block_diag(&[&g, &Matrix::identity(k)]), Matrix::block_diag(&[&phi, &Matrix::diag(f)]))
        }
        None => {
            if f.is_empty() {
                return Err(TripleError::InvalidParameters("family III needs f or a Lorentzian block".into()));
            }
            let mut d = vec![qi(1); f.len()];
            d[0] = qi(-1);
            (Matrix::diag(&d), Matrix::diag(f))
        }
    };
    let s = gw.rows();
    let mut ml = vec!["Z".to_string()];
    ml.extend(labels("W", s));
    ml.push("Z*".into());
    let mut tab = OpTable::new(ml, witt_gram(1, &gw));
    let (z, zs) = (0, s + 1);
    let gf = gw.mul(&fw);
    for i in 0..s {
        let h = tab.add_h(format!("W*{}", i + 1));
        tab.bracket(zs, 1 + i, h, qi(1));
        for k in 0..s {
            tab.act(h, zs, 1 + k, fw[(k, i)].clone());
        }
        for j in 0..s {
            tab.act(h, 1 + j, z, -gf[(i, j)].clone());
        }
    }
    let t = tab.assemble()?;
    expect_gram_h(&t, &gf)?;
    Ok(t)
}

/// Family IV, `τ_n(a, b, f)`: `m = (Z, e, w, U_1..U_{n-5}, e*, Z*)`,
/// `h = (ē, Ū_1..Ū_{n-5}, ē*)`.
///
/// Admissible: `b = 0, |a| = 1` or `b = 1, a = f_1`.
pub fn build_iv(a: &Rational, b: &Rational, f: &[Rational]) -> Result<SymmetricTriple> {
    if let Some(k) = f.iter().position(Zero::is_zero) {
        return Err(TripleError::InvalidParameters(format!("f[{}] = 0", k + 1)));
    }
    if a.is_zero() {
        return Err(TripleError::InvalidParameters("a = 0".into()));
    }
    let case_i = b.is_zero() && a.abs() == Rational::one();
    let case_ii = b.is_one() && f.first() == Some(a);
    if !case_i && !case_ii {
        return Err(TripleError::InvalidParameters(
            "parameters must satisfy b = 0 with |a| = 1, or b = 1 with a = f_1".into(),
        ));
    }
    let u = f.len();
    let mut ml = vec!["Z".to_string(), "e".into(), "w".into()];
    ml.extend(labels("U", u));
    ml.extend(["e*".to_string(), "Z*".into()]);
    // middle block (e, w, U.., e*): e ↔ e* paired
    let k = u + 3;
    let mut mid = Matrix::identity(k);
    mid[(0, 0)] = qi(0);
    mid[(k - 1, k - 1)] = qi(0);
    mid[(0, k - 1)] = qi(1);
    mid[(k - 1, 0)] = qi(1);
    let mut tab = OpTable::new(ml, witt_gram(1, &mid));
    let (z, e, w) = (0, 1, 2);
    let ui = |i: usize| 3 + i;
    let (es, zs) = (3 + u, 4 + u);
    let eb = tab.add_h("ebar");
    let ub: Vec<usize> = (0..u).map(|i| tab.add_h(format!("Ubar{}", i + 1))).collect();
    let ebs = tab.add_h("ebar*");

    tab.bracket(zs, e, eb, qi(1));
    for i in 0..u {
        tab.bracket(zs, ui(i), ub[i], qi(1));
    }
    tab.bracket(zs, es, ebs, qi(1));
    tab.bracket(es, w, eb, a.recip());

    tab.act(eb, zs, e, a.clone());
    tab.act(eb, es, z, -a);

    for i in 0..u {
        tab.act(ub[i], zs, ui(i), f[i].clone());
        tab.act(ub[i], ui(i), z, -&f[i]);
    }
    if u > 0 {
        tab.act(ub[0], zs, e, b.clone());
        tab.act(ub[0], es, z, -b);
        tab.act(ebs, ui(0), z, -b);
        tab.act(ebs, zs, ui(0), b.clone());
    }
    tab.act(ebs, zs, es, a.clone());
    tab.act(ebs, es, w, qi(1));
    tab.act(ebs, w, e, qi(-1));
    tab.act(ebs, e, z, -a);

    let t = tab.assemble()?;
    let dh = u + 2;
    let mut bh = Matrix::zeros(dh, dh);
    bh[(0, dh - 1)] = a.clone();
    bh[(dh - 1, 0)] = a.clone();
    for i in 0..u {
        bh[(1 + i, 1 + i)] = f[i].clone();
    }
    if u > 0 {
        bh[(1, dh - 1)] = b.clone();
        bh[(dh - 1, 1)] = b.clone();
    }
    expect_gram_h(&t, &bh)?;
    Ok(t)
}

// ---------------------------------------------------------------------------
// Parameters.

/// The eleven families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Lorentz,
    LeastNilpotentPQ,
    Ia,
    Ib,
    IIa,
    IIb,
    Nil22,
    Nil23,
    Nil24,
    III,
    IV,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Lorentz,
        Family::LeastNilpotentPQ,
        Family::Ia,
        Family::Ib,
        Family::IIa,
        Family::IIb,
        Family::Nil22,
        Family::Nil23,
        Family::Nil24,
        Family::III,
        Family::IV,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Lorentz => "lorentz",
            Family::LeastNilpotentPQ => "least-nilpotent",
            Family::Ia => "ia",
            Family::Ib => "ib",
            Family::IIa => "iia",
            Family::IIb => "iib",
            Family::Nil22 => "nil22",
            Family::Nil23 => "nil23",
            Family::Nil24 => "nil24",
            Family::III => "iii",
            Family::IV => "iv",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        let k = s.to_ascii_lowercase().replace(['-', '_'], "");
        Ok(match k.as_str() {
            "lorentz" | "tauf" => Family::Lorentz,
            "leastnilpotent" | "leastnilpotentpq" | "ln" => Family::LeastNilpotentPQ,
            "ia" => Family::Ia,
            "ib" => Family::Ib,
            "iia" => Family::IIa,
            "iib" => Family::IIb,
            "nil22" | "tau22" => Family::Nil22,
            "nil23" | "tau23" => Family::Nil23,
            "nil24" | "tau24" => Family::Nil24,
            "iii" => Family::III,
            "iv" => Family::IV,
            _ => return Err(TripleError::Parse(format!("unknown family {s:?}"))),
        })
    }
}

/// Parameters of one normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyParams {
    Lorentz { f: Vector },
    LeastNilpotentPQ { p: usize, q: usize, b: CurvatureCoeffs, epsilon: Vector, lambda: Vec<Vector> },
    Ia { eps_y: Rational, r: usize, l1: Vector, l2: Vector },
    Ib { r: usize, l1: Vector, l2: Vector },
    IIa { r: usize, l1: Vector, l2: Vector },
    IIb { r: usize, l1: Vector, l2: Vector },
    Nil22 { eps_y: Rational },
    Nil23,
    Nil24,
    III { block: Option<LorentzBlock>, f: Vector },
    IV { a: Rational, b: Rational, f: Vector },
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Lorentz { .. } => Family::Lorentz,
            FamilyParams::LeastNilpotentPQ { .. } => Family::LeastNilpotentPQ,
            FamilyParams::Ia { .. } => Family::Ia,
            FamilyParams::Ib { .. } => Family::Ib,
            FamilyParams::IIa { .. } => Family::IIa,
            FamilyParams::IIb { .. } => Family::IIb,
            FamilyParams::Nil22 { .. } => Family::Nil22,
            FamilyParams::Nil23 => Family::Nil23,
            FamilyParams::Nil24 => Family::Nil24,
            FamilyParams::III { .. } => Family::III,
            FamilyParams::IV { .. } => Family::IV,
        }
    }

    pub fn build(&self) -> Result<SymmetricTriple> {
        match self {
            FamilyParams::Lorentz { f } => build_lorentz(f),
            FamilyParams::LeastNilpotentPQ { p, q, b, epsilon, lambda } => {
                build_least_nilpotent_pq(*p, *q, b, epsilon, lambda)
            }
            FamilyParams::Ia { eps_y, r, l1, l2 } => build_ia(eps_y, *r, l1, l2),
            FamilyParams::Ib { r, l1, l2 } => build_ib(*r, l1, l2),
            FamilyParams::IIa { r, l1, l2 } => build_iia(*r, l1, l2),
            FamilyParams::IIb { r, l1, l2 } => build_iib(*r, l1, l2),
            FamilyParams::Nil22 { eps_y } => build_nil22(eps_y),
            FamilyParams::Nil23 => build_nil23(),
            FamilyParams::Nil24 => build_nil24(),
            FamilyParams::III { block, f } => build_iii(block.as_ref(), f),
            FamilyParams::IV { a, b, f } => build_iv(a, b, f),
        }
    }

    /// Parses the JSON payload of `family`. Scalars are strings `"p/q"` or numbers.
    ///
    /// Keys: `f`; `eps_y`; `r`; `lambda1`, `lambda2`; `a`, `b`; for the
    /// least nilpotent family `p`, `q`, `epsilon`, `Lambda` (list of z-vectors)
    /// and `b` as a list of `[i, j, k, l, value]` (1-based, symmetries implied);
    /// for family III optionally `block`: `{"kind": "diagonal"|"jordan"|"complex", ...}`.
    pub fn from_json(family: Family, v: &Value) -> Result<FamilyParams> {
        let obj = v.as_object().cloned().unwrap_or_default();
        let get = |k: &str| obj.get(k);
        let scalar = |k: &str| -> Result<Rational> {
            let x = get(k).ok_or_else(|| TripleError::Parse(format!("missing key {k:?}")))?;
            json_scalar(x)
        };
        let list = |k: &str| -> Result<Vector> {
            match get(k) {
                None => Ok(Vec::new()),
                Some(x) => json_list(x),
            }
        };
        let uint = |k: &str| -> Result<usize> {
            match get(k) {
                None => Ok(0),
                Some(x) => x.as_u64().map(|u| u as usize).ok_or_else(|| TripleError::Parse(format!("{k:?} must be a nonnegative integer"))),
            }
        };
        Ok(match family {
            Family::Lorentz => FamilyParams::Lorentz { f: list("f")? },
            Family::Ia => FamilyParams::Ia { eps_y: scalar("eps_y")?, r: uint("r")?, l1: list("lambda1")?, l2: list("lambda2")? },
            Family::Ib => FamilyParams::Ib { r: uint("r")?, l1: list("lambda1")?, l2: list("lambda2")? },
            Family::IIa => FamilyParams::IIa { r: uint("r")?, l1: list("lambda1")?, l2: list("lambda2")? },
            Family::IIb => FamilyParams::IIb { r: uint("r")?, l1: list("lambda1")?, l2: list("lambda2")? },
            Family::Nil22 => FamilyParams::Nil22 { eps_y: scalar("eps_y")? },
            Family::Nil23 => FamilyParams::Nil23,
            Family::Nil24 => FamilyParams::Nil24,
            Family::IV => FamilyParams::IV { a: scalar("a")?, b: scalar("b")?, f: list("f")? },
            Family::III => {
                let block = match get("block") {
                    None | Some(Value::Null) => None,
                    Some(b) => Some(parse_block(b)?),
                };
                FamilyParams::III { block, f: list("f")? }
            }
            Family::LeastNilpotentPQ => {
                let p = uint("p")?;
                let q = uint("q")?;
                let mut b = CurvatureCoeffs::zero(p);
                if let Some(Value::Array(entries)) = get("b") {
                    for e in entries {
                        let arr = e.as_array().filter(|a| a.len() == 5).ok_or_else(|| {
                            TripleError::Parse("b entries are [i, j, k, l, value]".into())
                        })?;
                        let mut ix = [0usize; 4];
                        for t in 0..4 {
                            let u = arr[t].as_u64().ok_or_else(|| TripleError::Parse("b index must be an integer".into()))? as usize;
                            if u == 0 || u > p {
                                return Err(TripleError::Parse(format!("b index {u} out of 1..={p}")));
                            }
                            ix[t] = u - 1;
                        }
                        b.set_with_symmetries(ix[0], ix[1], ix[2], ix[3], json_scalar(&arr[4])?);
                    }
                }
                let lambda = match get("Lambda") {
                    None => Vec::new(),
                    Some(Value::Array(vs)) => vs.iter().map(json_list).collect::<Result<_>>()?,
                    Some(_) => return Err(TripleError::Parse("Lambda must be a list of vectors".into())),
                };
                FamilyParams::LeastNilpotentPQ { p, q, b, epsilon: list("epsilon")?, lambda }
            }
        })
    }
}

impl FamilyParams {
    /// Inverse of `from_json`, with a `family` key added.
    pub fn to_json(&self) -> Value {
        use crate::linalg::fmt_rational as fr;
        use serde_json::json;
        let l = |v: &[Rational]| -> Vec<String> { v.iter().map(fr).collect() };
        let mut v = match self {
            FamilyParams::Lorentz { f } => json!({ "f": l(f) }),
            FamilyParams::Ia { eps_y, r, l1, l2 } => json!({ "eps_y": fr(eps_y), "r": r, "lambda1": l(l1), "lambda2": l(l2) }),
            FamilyParams::Ib { r, l1, l2 } | FamilyParams::IIa { r, l1, l2 } | FamilyParams::IIb { r, l1, l2 } => {
                json!({ "r": r, "lambda1": l(l1), "lambda2": l(l2) })
            }
            FamilyParams::Nil22 { eps_y } => json!({ "eps_y": fr(eps_y) }),
            FamilyParams::Nil23 | FamilyParams::Nil24 => json!({}),
            FamilyParams::IV { a, b, f } => json!({ "a": fr(a), "b": fr(b), "f": l(f) }),
            FamilyParams::III { block, f } => {
                let blk = match block {
                    None => Value::Null,
                    Some(LorentzBlock::Diagonal { phi }) => json!({ "kind": "diagonal", "phi": phi }),
                    Some(LorentzBlock::Jordan { phi, sign }) => json!({ "kind": "jordan", "phi": phi, "sign": sign }),
                    Some(LorentzBlock::Complex { phi1, phi2 }) => json!({ "kind": "complex", "phi1": phi1, "phi2": phi2 }),
                };
                json!({ "block": blk, "f": l(f) })
            }
            FamilyParams::LeastNilpotentPQ { p, q, b, epsilon, lambda } => {
                let mut entries = Vec::new();
                for i in 0..*p {
                    for j in i + 1..*p {
                        for k in 0..*p {
                            for m in k + 1..*p {
                                if (i, j) <= (k, m) && !b.get(i, j, k, m).is_zero() {
                                    entries.push(json!([i + 1, j + 1, k + 1, m + 1, fr(b.get(i, j, k, m))]));
                                }
                            }
                        }
                    }
                }
                let lam: Vec<Vec<String>> = lambda.iter().map(|x| l(x)).collect();
                json!({ "p": p, "q": q, "b": entries, "epsilon": l(epsilon), "Lambda": lam })
            }
        };
        v["family"] = json!(self.family().name());
        v
    }
}

impl Serialize for FamilyParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

fn parse_block(v: &Value) -> Result<LorentzBlock> {
    let kind = v.get("kind").and_then(Value::as_str).unwrap_or("");
    let s = |k: &str| -> Result<String> {
        let x = v.get(k).ok_or_else(|| TripleError::Parse(format!("block needs {k:?}")))?;
        Ok(crate::linalg::fmt_rational(&json_scalar(x)?))
    };
    Ok(match kind {
        "diagonal" => LorentzBlock::Diagonal { phi: s("phi")? },
        "jordan" => {
            let sign = v.get("sign").and_then(Value::as_i64).unwrap_or(1) as i8;
            LorentzBlock::Jordan { phi: s("phi")?, sign }
        }
        "complex" => LorentzBlock::Complex { phi1: s("phi1")?, phi2: s("phi2")? },
        other => return Err(TripleError::InvalidParameters(format!("unlisted (g, Φ) block kind {other:?}"))),
    })
}

fn json_scalar(v: &Value) -> Result<Rational> {
    let js: JsonScalar = serde_json::from_value(v.clone()).map_err(|e| TripleError::Parse(e.to_string()))?;
    js.to_rational()
}

fn json_list(v: &Value) -> Result<Vector> {
    match v {
        Value::Array(xs) => xs.iter().map(json_scalar).collect(),
        Value::String(s) => crate::linalg::parse_list(s),
        _ => Err(TripleError::Parse("expected a list of scalars".into())),
    }
}

// ---------------------------------------------------------------------------
// Maximal-center coefficient ansatz.

/// Structure coefficients `(a_{ijkα}, b_{ijkl}, f_{ijαβ})` of a maximal-center
/// triple in an adapted basis; `p = dim z`, `s = q - p = dim W` (B|W = I).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoefficientSet {
    pub p: usize,
    pub q: usize,
    #[serde(serialize_with = "crate::json::ser_vec")]
    pub a: Vec<Rational>,
    #[serde(serialize_with = "crate::json::ser_vec")]
    pub b: Vec<Rational>,
    #[serde(serialize_with = "crate::json::ser_vec")]
    pub f: Vec<Rational>,
}

impl CoefficientSet {
    pub fn zeros(p: usize, q: usize) -> Self {
        assert!(q >= p, "q must be at least p");
        let s = q - p;
        CoefficientSet {
            p,
            q,
            a: vec![Rational::zero(); p * p * p * s],
            b: vec![Rational::zero(); p.pow(4)],
            f: vec![Rational::zero(); p * p * s * s],
        }
    }

    pub fn s(&self) -> usize {
        self.q - self.p
    }

    pub fn ai(&self, i: usize, j: usize, k: usize, al: usize) -> usize {
        ((i * self.p + j) * self.p + k) * self.s() + al
    }

    pub fn bi(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.p + j) * self.p + k) * self.p + l
    }

    pub fn fi(&self, i: usize, j: usize, al: usize, be: usize) -> usize {
        ((i * self.p + j) * self.s() + al) * self.s() + be
    }

    pub fn a(&self, i: usize, j: usize, k: usize, al: usize) -> &Rational {
        &self.a[self.ai(i, j, k, al)]
    }

    pub fn b(&self, i: usize, j: usize, k: usize, l: usize) -> &Rational {
        &self.b[self.bi(i, j, k, l)]
    }

    pub fn f(&self, i: usize, j: usize, al: usize, be: usize) -> &Rational {
        &self.f[self.fi(i, j, al, be)]
    }

    pub fn curvature(&self) -> CurvatureCoeffs {
        CurvatureCoeffs { p: self.p, b: self.b.clone() }
    }

    /// Operator table: `h̃` spanned by `Y_ij (i < j)` and `X_iα`; `h` is
    /// their span in `gl(m)`.
    pub fn table(&self) -> OpTable {
        let (p, s) = (self.p, self.s());
        let mut ml = labels("Z", p);
        ml.extend(labels("W", s));
        ml.extend(labels("Z*", p));
        let mut tab = OpTable::new(ml, witt_gram(p, &Matrix::identity(s)));
        let zi = |i: usize| i;
        let wi = |a: usize| p + a;
        let zsi = |i: usize| p + s + i;
        for i in 0..p {
            for j in i + 1..p {
                let y = tab.add_h(format!("Y{}{}", i + 1, j + 1));
                tab.bracket(zsi(i), zsi(j), y, qi(1));
                for k in 0..p {
                    for g in 0..s {
                        tab.act(y, zsi(k), wi(g), self.a(i, j, k, g).clone());
                    }
                    for l in 0..p {
                        tab.act(y, zsi(k), zi(l), self.b(i, j, k, l).clone());
                    }
                }
                for al in 0..s {
                    for l in 0..p {
                        tab.act(y, wi(al), zi(l), -self.a(i, j, l, al));
                    }
                }
            }
        }
        for i in 0..p {
            for al in 0..s {
                let x = tab.add_h(format!("X{}_{}", i + 1, al + 1));
                tab.bracket(zsi(i), wi(al), x, qi(1));
                for k in 0..p {
                    for g in 0..s {
                        tab.act(x, zsi(k), wi(g), self.f(i, k, al, g).clone());
                    }
                    for l in 0..p {
                        tab.act(x, zsi(k), zi(l), self.a(k, l, i, al).clone());
                    }
                }
                for be in 0..s {
                    for l in 0..p {
                        tab.act(x, wi(be), zi(l), -self.f(i, l, al, be));
                    }
                }
            }
        }
        tab
    }

    /// Builds the triple; `h` is the quotient of `h̃` acting faithfully.
    pub fn build(&self) -> Result<SymmetricTriple> {
        self.table().assemble()
    }
}

/// One violated symmetry or relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationViolation {
    pub relation: &'static str,
    pub indices: Vec<usize>,
}

/// Violations of the symmetries and of the quadratic relations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub violations: Vec<RelationViolation>,
}

impl RelationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, relation: &str) -> bool {
        self.violations.iter().any(|v| v.relation == relation)
    }
}

/// Checks symmetries of `a`, `b`, `f` and the relations
/// `f_{ikαγ} f_{jlβγ} = f_{ilαγ} f_{jkβγ}` (commutativity),
/// `f_{imαγ} a_{klnγ} = f_{inαγ} a_{klmγ}` (a-f) and the quadratic
/// relation among the `a`.
pub fn coefficient_relations_check(c: &CoefficientSet) -> RelationReport {
    let (p, s) = (c.p, c.s());
    let mut out = Vec::new();
    let mut push = |r: &'static str, ix: &[usize]| out.push(RelationViolation { relation: r, indices: ix.to_vec() });
    for i in 0..p {
        for j in 0..p {
            for k in 0..p {
                for al in 0..s {
                    if *c.a(i, j, k, al) != -c.a(j, i, k, al) {
                        push("a_skew", &[i, j, k, al]);
                    }
                    let cyc = c.a(i, j, k, al) + c.a(j, k, i, al) + c.a(k, i, j, al);
                    if !cyc.is_zero() {
                        push("a_cyclic", &[i, j, k, al]);
                    }
                }
            }
        }
    }
    for v in c.curvature().symmetry_violations() {
        push(match v.0 {
            "pair" => "b_pair",
            "skew" => "b_skew",
            _ => "b_bianchi",
        }, &v.1);
    }
    for i in 0..p {
        for j in 0..p {
            for al in 0..s {
                for be in 0..s {
                    let x = c.f(i, j, al, be);
                    if x != c.f(j, i, al, be) || x != c.f(i, j, be, al) {
                        push("f_symmetry", &[i, j, al, be]);
                    }
                }
            }
        }
    }
    let sum = |g: &dyn Fn(usize) -> Rational| -> Rational { (0..s).map(g).fold(Rational::zero(), |x, y| x + y) };
    for i in 0..p {
        for k in 0..p {
            for j in 0..p {
                for l in 0..p {
                    for al in 0..s {
                        for be in 0..s {
                            let lhs = sum(&|g| c.f(i, k, al, g) * c.f(j, l, be, g));
                            let rhs = sum(&|g| c.f(i, l, al, g) * c.f(j, k, be, g));
                            if lhs != rhs {
                                push("commutativity", &[i, k, j, l, al, be]);
                            }
                        }
                    }
                }
            }
        }
    }
    for i in 0..p {
        for m in 0..p {
            for n in 0..p {
                for k in 0..p {
                    for l in 0..p {
                        for al in 0..s {
                            let lhs = sum(&|g| c.f(i, m, al, g) * c.a(k, l, n, g));
                            let rhs = sum(&|g| c.f(i, n, al, g) * c.a(k, l, m, g));
                            if lhs != rhs {
                                push("af", &[i, m, n, k, l, al]);
                            }
                        }
                    }
                }
            }
        }
    }
    let idx = |v: usize, n: usize| -> Vec<usize> {
        let mut r = vec![0; n];
        let mut x = v;
        for t in (0..n).rev() {
            r[t] = x % p;
            x /= p;
        }
        r
    };
    if s > 0 {
        for v in 0..p.pow(6) {
            let t = idx(v, 6);
            let (i, j, k, l, m, n) = (t[0], t[1], t[2], t[3], t[4], t[5]);
            let lhs = sum(&|g| c.a(i, j, m, g) * c.a(k, l, n, g) - c.a(k, l, m, g) * c.a(i, j, n, g));
            let rhs = sum(&|g| c.a(i, j, k, g) * c.a(m, n, l, g) - c.a(i, j, l, g) * c.a(m, n, k, g));
            if lhs != rhs {
                push("aa", &t);
            }
        }
    }
    RelationReport { violations: out }
}

impl FamilyParams {
    /// `(negative, positive)` index of `B|m` fixed by the family.
    pub fn stated_signature(&self) -> (usize, usize) {
        let n = |k: usize, s: usize| (k, k + s);
        match self {
            FamilyParams::Lorentz { f } => n(1, f.len()),
            FamilyParams::LeastNilpotentPQ { p, q, .. } => n(*p, q - p),
            FamilyParams::Ia { l1, .. } | FamilyParams::Ib { l1, .. } => n(2, l1.len()),
            FamilyParams::IIa { l1, .. } => n(2, l1.len() + 1),
            FamilyParams::IIb { l1, .. } => n(2, l1.len() + 2),
            FamilyParams::Nil22 { .. } => n(2, 0),
            FamilyParams::Nil23 => n(2, 1),
            FamilyParams::Nil24 => n(2, 2),
            // one timelike direction in W, in the block or on W_1
            FamilyParams::III { block: Some(_), f } => n(2, f.len()),
            FamilyParams::III { block: None, f } => (2, f.len()),
            FamilyParams::IV { f, .. } => n(2, f.len() + 1),
        }
    }
}

fn rnd_nonzero<R: Rng>(rng: &mut R) -> Rational {
    let mut a = rng.gen_range(-4..=3);
    if a >= 0 {
        a += 1;
    }
    q(a, rng.gen_range(1..=3))
}

fn rnd_sign<R: Rng>(rng: &mut R) -> Rational {
    if rng.gen_bool(0.5) {
        qi(1)
    } else {
        qi(-1)
    }
}

fn rnd_rows<R: Rng>(rng: &mut R, s: usize) -> (Vector, Vector) {
    let mut l1 = Vec::with_capacity(s);
    let mut l2 = Vec::with_capacity(s);
    for _ in 0..s {
        match rng.gen_range(0..3) {
            0 => {
                l1.push(rnd_nonzero(rng));
                l2.push(Rational::zero());
            }
            1 => {
                l1.push(Rational::zero());
                l2.push(rnd_nonzero(rng));
            }
            _ => {
                l1.push(rnd_nonzero(rng));
                l2.push(rnd_nonzero(rng));
            }
        }
    }
    (l1, l2)
}

/// Random admissible parameters with small sizes.
pub fn random_params<R: Rng>(family: Family, rng: &mut R) -> FamilyParams {
    match family {
        Family::Lorentz => FamilyParams::Lorentz { f: (0..rng.gen_range(1..=3)).map(|_| rnd_nonzero(rng)).collect() },
        Family::LeastNilpotentPQ => loop {
            let p = rng.gen_range(2..=3);
            let s = rng.gen_range(1..=2);
            let mut b = CurvatureCoeffs::zero(p);
            // sums of ω⊗ω with ω = u∧v satisfy every curvature identity
            for _ in 0..2 {
                let u: Vector = (0..p).map(|_| qi(rng.gen_range(-2..=2))).collect();
                let v: Vector = (0..p).map(|_| qi(rng.gen_range(-2..=2))).collect();
                let k = rnd_nonzero(rng);
                for i in 0..p {
                    for j in 0..p {
                        let wij = &u[i] * &v[j] - &u[j] * &v[i];
                        for k2 in 0..p {
                            for l in 0..p {
                                let wkl = &u[k2] * &v[l] - &u[l] * &v[k2];
                                let x = b.idx(i, j, k2, l);
                                b.b[x] += &k * &wij * wkl;
                            }
                        }
                    }
                }
            }
            let epsilon: Vector = (0..s).map(|_| rnd_sign(rng)).collect();
            let lambda: Vec<Vector> = (0..s)
                .map(|_| loop {
                    let v: Vector = (0..p).map(|_| qi(rng.gen_range(-2..=2))).collect();
                    if !is_zero_vec(&v) {
                        break v;
                    }
                })
                .collect();
            let fp = FamilyParams::LeastNilpotentPQ { p, q: p + s, b, epsilon, lambda };
            if fp.build().is_ok() {
                break fp;
            }
        },
        Family::Ia => {
            let s = rng.gen_range(0..=3);
            let (l1, l2) = rnd_rows(rng, s);
            FamilyParams::Ia { eps_y: rnd_sign(rng), r: rng.gen_range(0..=s), l1, l2 }
        }
        Family::Ib => loop {
            let s = rng.gen_range(2..=3);
            let (l1, l2) = rnd_rows(rng, s);
            if rank2(&l1, &l2) == 2 {
                break FamilyParams::Ib { r: rng.gen_range(0..=s), l1, l2 };
            }
        },
        Family::IIa | Family::IIb => {
            let s = rng.gen_range(0..=2);
            let (l1, l2) = rnd_rows(rng, s);
            let r = rng.gen_range(0..=s);
            if family == Family::IIa {
                FamilyParams::IIa { r, l1, l2 }
            } else {
                FamilyParams::IIb { r, l1, l2 }
            }
        }
        Family::Nil22 => FamilyParams::Nil22 { eps_y: rnd_sign(rng) },
        Family::Nil23 => FamilyParams::Nil23,
        Family::Nil24 => FamilyParams::Nil24,
        Family::III => {
            let fmt = crate::linalg::fmt_rational;
            let block = match rng.gen_range(0..4) {
                0 => None,
                1 => Some(LorentzBlock::Diagonal { phi: fmt(&rnd_nonzero(rng)) }),
                2 => Some(LorentzBlock::Jordan { phi: fmt(&rnd_nonzero(rng)), sign: if rng.gen_bool(0.5) { 1 } else { -1 } }),
                _ => Some(LorentzBlock::Complex { phi1: fmt(&q(rng.gen_range(-3..=3), 1)), phi2: fmt(&rnd_nonzero(rng)) }),
            };
            let lo = usize::from(block.is_none());
            let f = (0..rng.gen_range(lo..=2)).map(|_| rnd_nonzero(rng)).collect();
            FamilyParams::III { block, f }
        }
        Family::IV => {
            if rng.gen_bool(0.5) {
                let f = (0..rng.gen_range(0..=2)).map(|_| rnd_nonzero(rng)).collect();
                FamilyParams::IV { a: rnd_sign(rng), b: Rational::zero(), f }
            } else {
                let f: Vector = (0..rng.gen_range(1..=2)).map(|_| rnd_nonzero(rng)).collect();
                FamilyParams::IV { a: f[0].clone(), b: qi(1), f }
            }
        }
    }
}

/// Default sample parameters per family, used by the CLI help and tests.
pub fn sample_params(family: Family) -> FamilyParams {
    match family {
        Family::Lorentz => FamilyParams::Lorentz { f: vec![qi(1), qi(2)] },
        Family::LeastNilpotentPQ => {
            let mut b = CurvatureCoeffs::zero(2);
            b.set_with_symmetries(0, 1, 0, 1, qi(1));
            FamilyParams::LeastNilpotentPQ {
                p: 2,
                q: 3,
                b,
                epsilon: vec![qi(1)],
                lambda: vec![vec![qi(1), q(1, 2)]],
            }
        }
        Family::Ia => FamilyParams::Ia { eps_y: qi(1), r: 0, l1: vec![qi(1)], l2: vec![qi(1)] },
        Family::Ib => FamilyParams::Ib { r: 0, l1: vec![qi(1), qi(0)], l2: vec![qi(0), qi(1)] },
        Family::IIa => FamilyParams::IIa { r: 0, l1: vec![qi(1)], l2: vec![qi(2)] },
        Family::IIb => FamilyParams::IIb { r: 1, l1: vec![qi(1)], l2: vec![qi(0)] },
        Family::Nil22 => FamilyParams::Nil22 { eps_y: qi(1) },
        Family::Nil23 => FamilyParams::Nil23,
        Family::Nil24 => FamilyParams::Nil24,
        Family::III => FamilyParams::III { block: Some(LorentzBlock::Diagonal { phi: "2".into() }), f: vec![qi(1)] },
        Family::IV => FamilyParams::IV { a: qi(1), b: qi(0), f: vec![qi(2)] },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::signature_of;

    fn ric_zs(t: &SymmetricTriple, label: &str) -> Rational {
        let i = t.m_position(label).unwrap();
        t.ricci().gram()[(i, i)].clone()
    }

    #[test]
    fn lorentz_examples() {
        let t = build_lorentz(&[qi(1)]).unwrap();
        assert_eq!(t.dim_m(), 3);
        assert_eq!(ric_zs(&t, "Z*"), qi(1));
        assert_eq!(signature_of(&t.gram_m()), (1, 2, 0));
        assert_eq!(t.metric().center().unwrap().dim(), 1);
        let t = build_lorentz(&[qi(-1), qi(-1)]).unwrap();
        assert!(!t.algebra().is_nilpotent());
        assert!(build_lorentz(&[qi(1), qi(0)]).is_err());
    }

    #[test]
    fn nilpotent_forms() {
        let t = build_nil23().unwrap();
        assert_eq!((t.dim_m(), t.dim_h()), (5, 2));
        assert!(t.algebra().is_nilpotent());
        assert!(t.ricci().gram().is_zero());
        for e in [qi(1), qi(-1)] {
            let t = build_nil22(&e).unwrap();
            assert!(t.ricci().gram().is_zero());
            assert_eq!(t.gram_h()[(0, 0)], e);
        }
        let t = build_nil24().unwrap();
        assert_eq!((t.dim_m(), t.dim_h()), (6, 2));
        assert!(t.ricci().gram().is_zero());
    }

    #[test]
    fn ia_small() {
        let t = build_ia(&qi(1), 0, &[qi(1)], &[qi(1)]).unwrap();
        assert_eq!(t.dim_m(), 5);
        assert_eq!(signature_of(&t.gram_m()), (2, 3, 0));
    }

    #[test]
    fn ib_requires_rank_two() {
        assert!(build_ib(0, &[qi(1), qi(2)], &[qi(2), qi(4)]).is_err());
        assert!(build_ib(0, &[qi(1), qi(0)], &[qi(0), qi(1)]).is_ok());
    }

    #[test]
    fn least_nilpotent_closure() {
        let b = CurvatureCoeffs::zero(2);
        let lam = vec![vec![qi(1), qi(0)], vec![qi(2), qi(0)]];
        let r = build_least_nilpotent_pq(2, 4, &b, &[qi(1), qi(1)], &lam);
        assert!(matches!(r, Err(TripleError::Closure(_))));
        let mut b = CurvatureCoeffs::zero(2);
        b.set_with_symmetries(0, 1, 0, 1, qi(1));
        let t = build_least_nilpotent_pq(2, 2, &b, &[], &[]).unwrap();
        let n = build_nil22(&qi(1)).unwrap();
        assert_eq!(t.form(), n.form());
        assert_eq!(t.curvature(), n.curvature());
    }

    #[test]
    fn family_iii_blocks() {
        let t = build_iii(Some(&LorentzBlock::Diagonal { phi: "2".into() }), &[qi(1)]).unwrap();
        assert_eq!(t.dim_m(), 5);
        assert_eq!(ric_zs(&t, "Z*"), qi(5));
        assert!(build_iii(Some(&LorentzBlock::Jordan { phi: "1".into(), sign: 1 }), &[]).is_ok());
        assert!(build_iii(Some(&LorentzBlock::Jordan { phi: "1".into(), sign: -1 }), &[qi(3)]).is_ok());
        assert!(build_iii(Some(&LorentzBlock::Complex { phi1: "1".into(), phi2: "2".into() }), &[qi(-1)]).is_ok());
        assert!(build_iii(Some(&LorentzBlock::Diagonal { phi: "0".into() }), &[qi(1)]).is_err());
        let t = build_iii(None, &[qi(2), qi(-3)]).unwrap();
        assert_eq!(ric_zs(&t, "Z*"), qi(-1));
    }

    #[test]
    fn family_iv_cases() {
        let t = build_iv(&qi(1), &qi(0), &[qi(2)]).unwrap();
        assert_eq!(t.dim_m(), 6);
        assert_eq!(ric_zs(&t, "Z*"), qi(4));
        let t = build_iv(&qi(3), &qi(1), &[qi(3), qi(5)]).unwrap();
        assert_eq!(ric_zs(&t, "Z*"), qi(14));
        assert!(build_iv(&qi(2), &qi(0), &[qi(1)]).is_err());
    }

    #[test]
    fn relations_rank_one_pattern() {
        let mut c = CoefficientSet::zeros(2, 4);
        let lam = [[qi(1), qi(2)], [qi(3), qi(-1)]];
        let eps = [qi(1), qi(-1)];
        for i in 0..2 {
            for j in 0..2 {
                for al in 0..2 {
                    let k = c.fi(i, j, al, al);
                    c.f[k] = &eps[al] * &lam[al][i] * &lam[al][j];
                }
            }
        }
        assert!(coefficient_relations_check(&c).ok());
        let k = c.fi(0, 0, 0, 1);
        c.f[k] = qi(1);
        let rep = coefficient_relations_check(&c);
        assert!(rep.violates("f_symmetry"));
    }

    #[test]
    fn coefficient_round_trip_matches_lorentz() {
        let mut c = CoefficientSet::zeros(1, 3);
        let k = c.fi(0, 0, 0, 0);
        c.f[k] = qi(3);
        let k = c.fi(0, 0, 1, 1);
        c.f[k] = qi(-2);
        let t = c.build().unwrap();
        let l = build_lorentz(&[qi(3), qi(-2)]).unwrap();
        assert_eq!(t.gram_h(), l.gram_h());
        assert_eq!(t.ricci(), l.ricci());
    }

    #[test]
    fn random_params_build_with_stated_signature() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for fam in Family::ALL {
            for _ in 0..8 {
                let p = random_params(fam, &mut rng);
                let t = p.build().unwrap_or_else(|e| panic!("{p:?}: {e}"));
                let (neg, pos, null) = signature_of(&t.gram_m());
                assert_eq!(((neg, pos), null), (p.stated_signature(), 0), "{p:?}");
            }
        }
    }

    #[test]
    fn params_from_json() {
        let v: Value = serde_json::json!({"f": ["1", 2]});
        let p = FamilyParams::from_json(Family::Lorentz, &v).unwrap();
        assert_eq!(p, FamilyParams::Lorentz { f: vec![qi(1), qi(2)] });
        for fam in Family::ALL {
            let p = sample_params(fam);
            assert!(p.build().is_ok(), "{fam:?}");
            let v = p.to_json();
            let back = FamilyParams::from_json(Family::parse(v["family"].as_str().unwrap()).unwrap(), &v).unwrap();
            assert_eq!(back, p);
        }
    }
}
