//! Brute-force cross-checks: grid census of maximal-center coefficient
//! families, bounded isomorphism search over monomial maps, and sampling of
//! the Jacobi identity against the coefficient relations.

use num_traits::{One, Signed, Zero};
use rand::{rngs::StdRng, Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classification::{family_isomorphic, simultaneous_diagonalize, verify_m_map, Decision};
use crate::error::{Result, TripleError};
use crate::json::ser_vec;
use crate::linalg::{q, qi, rational_sqrt, Matrix, Rational, Vector};
use crate::normal_forms::{build_nil22, coefficient_relations_check, CoefficientSet, FamilyParams};
use crate::triple::{Decomposability, SymmetricTriple};

pub const GRID_GUARD: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tensor {
    A,
    B,
    F,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub p: usize,
    pub q: usize,
    #[serde(serialize_with = "ser_vec")]
    pub value_set: Vec<Rational>,
    pub which_tensors: Vec<Tensor>,
}

/// Independent coordinate of a coefficient set; setting it also sets the
/// entries forced by the symmetries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    A(usize, usize, usize, usize),
    B(usize, usize, usize, usize),
    F(usize, usize, usize, usize),
}

fn slots(p: usize, q: usize, which: &[Tensor]) -> Vec<Slot> {
    let s = q - p;
    let mut out = Vec::new();
    if which.contains(&Tensor::A) {
        for i in 0..p {
            for j in i + 1..p {
                for k in 0..p {
                    for g in 0..s {
                        out.push(Slot::A(i, j, k, g));
                    }
                }
            }
        }
    }
    if which.contains(&Tensor::B) {
        let pairs: Vec<(usize, usize)> = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).collect();
        for (x, &(i, j)) in pairs.iter().enumerate() {
            for &(k, l) in &pairs[x..] {
                out.push(Slot::B(i, j, k, l));
            }
        }
    }
    if which.contains(&Tensor::F) {
        for i in 0..p {
            for j in i..p {
                for a in 0..s {
                    for b in a..s {
                        out.push(Slot::F(i, j, a, b));
                    }
                }
            }
        }
    }
    out
}

fn set_slot(c: &mut CoefficientSet, slot: Slot, v: &Rational) {
    match slot {
        Slot::A(i, j, k, g) => {
            let x = c.ai(i, j, k, g);
            c.a[x] = v.clone();
            let x = c.ai(j, i, k, g);
            c.a[x] = -v;
        }
        Slot::B(i, j, k, l) => {
            let mut b = c.curvature();
            b.set_with_symmetries(i, j, k, l, v.clone());
            c.b = b.b;
        }
        Slot::F(i, j, a, b) => {
            for (x, y) in [(i, j), (j, i)] {
                for (u, w) in [(a, b), (b, a)] {
                    let k = c.fi(x, y, u, w);
                    c.f[k] = v.clone();
                }
            }
        }
    }
}

fn get_slot(c: &CoefficientSet, slot: Slot) -> Rational {
    match slot {
        Slot::A(i, j, k, g) => c.a(i, j, k, g).clone(),
        Slot::B(i, j, k, l) => c.b(i, j, k, l).clone(),
        Slot::F(i, j, a, b) => c.f(i, j, a, b).clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub jacobi_ok: bool,
    pub relations_ok: bool,
    /// `None` when the triple could not be assembled or the decider was inconclusive.
    pub indecomposable: Option<bool>,
    /// First Jacobi failure: a closure error of `[h, h]` or a violated triple.
    pub jacobi_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusEntry {
    pub coefficients: CoefficientSet,
    pub verdicts: Verdicts,
    pub class_id: Option<usize>,
    pub nilpotent: Option<bool>,
    /// Dimension of the center of `g`.
    pub center_dim: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusClass {
    pub id: usize,
    pub representative: usize,
    pub members: Vec<usize>,
    pub recognized: Option<FamilyParams>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub grid: GridSpec,
    pub entries: Vec<CensusEntry>,
    pub classes: Vec<CensusClass>,
}

/// Jacobi verdict of the bracket table; a closure error counts as a failure.
pub fn jacobi_verdict(c: &CoefficientSet) -> (bool, Option<String>) {
    match c.table().graded() {
        Err(e) => (false, Some(e.to_string())),
        Ok(g) => match g.algebra.check_jacobi().first() {
            None => (true, None),
            Some(v) => (false, Some(format!("{:?}", v))),
        },
    }
}

fn grid_size(n_values: usize, n_slots: usize) -> u128 {
    let mut t: u128 = 1;
    for _ in 0..n_slots {
        t = t.saturating_mul(n_values as u128);
        if t > GRID_GUARD {
            return t;
        }
    }
    t
}

fn evaluate(c: CoefficientSet) -> (CensusEntry, Option<SymmetricTriple>) {
    let (jacobi_ok, jacobi_failure) = jacobi_verdict(&c);
    let relations_ok = coefficient_relations_check(&c).ok();
    let t = if jacobi_ok { c.build().ok() } else { None };
    let indecomposable = t.as_ref().and_then(|t| match t.decomposability() {
        Decomposability::Decomposable { .. } => Some(false),
        Decomposability::Indecomposable(_) => Some(true),
        Decomposability::Unknown => None,
    });
    let nilpotent = t.as_ref().map(|t| t.algebra().is_nilpotent());
    let center_dim = t.as_ref().and_then(|t| t.metric().center().ok().map(|z| z.dim()));
    let entry = CensusEntry {
        coefficients: c,
        verdicts: Verdicts { jacobi_ok, relations_ok, indecomposable, jacobi_failure },
        class_id: None,
        nilpotent,
        center_dim,
    };
    (entry, t)
}

/// Enumerates all coefficient sets with the chosen tensors ranging over
/// `value_set` (other tensors zero), evaluates both verdicts and buckets the
/// Jacobi-passing entries into isomorphism classes.
pub fn enumerate_max_center(spec: &GridSpec) -> Result<Census> {
    enumerate_in_order(spec, None)
}

/// Same census, visiting the grid in the given order of flat indices.
pub fn enumerate_in_order(spec: &GridSpec, order: Option<&[usize]>) -> Result<Census> {
    if spec.value_set.is_empty() {
        return Err(TripleError::InvalidParameters("value set is empty".into()));
    }
    if spec.q < spec.p || spec.p == 0 {
        return Err(TripleError::InvalidParameters(format!("need 1 ≤ p ≤ q, got p = {}, q = {}", spec.p, spec.q)));
    }
    let sl = slots(spec.p, spec.q, &spec.which_tensors);
    let nv = spec.value_set.len();
    let total = grid_size(nv, sl.len());
    if total > GRID_GUARD {
        return Err(TripleError::GridTooLarge(total));
    }
    let total = total as usize;
    let idx: Vec<usize> = match order {
        Some(o) => {
            let mut chk = o.to_vec();
            chk.sort_unstable();
            if chk != (0..total).collect::<Vec<_>>() {
                return Err(TripleError::InvalidParameters("order is not a permutation of the grid".into()));
            }
            o.to_vec()
        }
        None => (0..total).collect(),
    };
    let results: Vec<(CensusEntry, Option<SymmetricTriple>)> = idx
        .par_iter()
        .map(|&flat| {
            let mut c = CoefficientSet::zeros(spec.p, spec.q);
            let mut x = flat;
            for &s in &sl {
                set_slot(&mut c, s, &spec.value_set[x % nv]);
                x /= nv;
            }
            evaluate(c)
        })
        .collect();
    let (mut entries, triples): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let classes = bucket(&mut entries, &triples);
    Ok(Census { grid: spec.clone(), entries, classes })
}

/// Normal-form parameters for the coefficient patterns the deciders cover:
/// `p = 1` with nondegenerate rational spectrum, and `p = 2, q = 2`.
pub fn recognize(c: &CoefficientSet) -> Option<FamilyParams> {
    let s = c.s();
    if c.a.iter().any(|x| !x.is_zero()) {
        return None;
    }
    if c.p == 1 && s > 0 {
        let mut fm = Matrix::zeros(s, s);
        for a in 0..s {
            for b in 0..s {
                fm[(a, b)] = c.f(0, 0, a, b).clone();
            }
        }
        let sd = simultaneous_diagonalize(&[vec![fm]], &Matrix::identity(s)).ok()?;
        let f: Vector = sd.records.iter().map(|r| r.eigen_f[(0, 0)].clone()).collect();
        if f.len() != s || f.iter().any(Zero::is_zero) {
            return None;
        }
        return Some(FamilyParams::Lorentz { f });
    }
    if c.p == 2 && s == 0 {
        let b = c.b(0, 1, 0, 1);
        if b.is_zero() {
            return None;
        }
        let eps = if b.signum() == nil22_b_sign() { qi(1) } else { qi(-1) };
        return Some(FamilyParams::Nil22 { eps_y: eps });
    }
    None
}

/// Sign of `b_{1212}` in the normal form with `ε_Y = +1`.
fn nil22_b_sign() -> Rational {
    use crate::classification::{extract_coefficients, standard_frame};
    let t = build_nil22(&qi(1)).expect("normal form");
    let fr = standard_frame(&t, 2).expect("standard frame");
    extract_coefficients(&t, &fr).expect("coefficients").b(0, 1, 0, 1).signum()
}

fn same_shape(t1: &SymmetricTriple, t2: &SymmetricTriple) -> bool {
    t1.dim_m() == t2.dim_m()
        && t1.dim_h() == t2.dim_h()
        && crate::linalg::signature_of(&t1.gram_m()) == crate::linalg::signature_of(&t2.gram_m())
        && t1.algebra().is_nilpotent() == t2.algebra().is_nilpotent()
}

fn bucket(entries: &mut [CensusEntry], triples: &[Option<SymmetricTriple>]) -> Vec<CensusClass> {
    let mut classes: Vec<CensusClass> = Vec::new();
    let recog: Vec<Option<FamilyParams>> =
        entries.iter().zip(triples).map(|(e, t)| t.as_ref().and_then(|_| recognize(&e.coefficients))).collect();
    let grid = MonomialGrid::default();
    for (i, t) in triples.iter().enumerate() {
        let Some(t) = t else { continue };
        let mut found = None;
        for cl in &classes {
            let r = cl.representative;
            let tr = triples[r].as_ref().expect("representative assembled");
            if !same_shape(t, tr) {
                continue;
            }
            let decided = match (&recog[i], &recog[r]) {
                (Some(x), Some(y)) if x.family() == y.family() => match family_isomorphic(x, y) {
                    Ok(Decision::Isomorphic { .. }) => Some(true),
                    Ok(Decision::NotIsomorphic { .. }) => Some(false),
                    _ => None,
                },
                _ => None,
            };
            let iso = decided.unwrap_or_else(|| matches!(brute_force_iso(t, tr, &grid), BruteForce::Found(_)));
            if iso {
                found = Some(cl.id);
                break;
            }
        }
        let id = found.unwrap_or_else(|| {
            classes.push(CensusClass { id: classes.len(), representative: i, members: Vec::new(), recognized: recog[i].clone() });
            classes.len() - 1
        });
        classes[id].members.push(i);
        entries[i].class_id = Some(id);
    }
    classes
}

// ---------------------------------------------------------------------------
// Monomial isomorphism search.

/// Candidate maps `e_i ↦ σ_i √c_i e'_{π(i)}` on `m`, with `c_i ∈ {1} ∪ scalings`
/// and at most `depth` indices carrying a non-unit `c_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialGrid {
    #[serde(serialize_with = "ser_vec")]
    pub scalings: Vec<Rational>,
    pub depth: usize,
    pub max_candidates: u64,
}

impl Default for MonomialGrid {
    fn default() -> Self {
        MonomialGrid { scalings: vec![q(1, 2), qi(2)], depth: 4, max_candidates: 5_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialMap {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
    /// `c_i`; the scale of basis vector `i` is `σ_i √c_i`.
    #[serde(serialize_with = "ser_vec")]
    pub sq_scale: Vec<Rational>,
}

impl MonomialMap {
    pub fn identity(n: usize) -> Self {
        MonomialMap { perm: (0..n).collect(), signs: vec![1; n], sq_scale: vec![Rational::one(); n] }
    }

    /// Number of non-unit scalings.
    pub fn depth(&self) -> usize {
        self.sq_scale.iter().filter(|c| !c.is_one()).count()
    }

    /// Exact matrix (columns are images) when every `c_i` is a rational square.
    pub fn matrix(&self) -> Option<Matrix> {
        let n = self.perm.len();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            let r = rational_sqrt(&self.sq_scale[i])?;
            m[(self.perm[i], i)] = r * qi(self.signs[i] as i64);
        }
        Some(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BruteForce {
    Found(MonomialMap),
    /// Nothing within the bound; not a proof of non-isomorphism.
    NotFoundBounded { explored: u64 },
}

/// `x = s·√c·y` exactly, with `c > 0`.
fn eq_scaled(x: &Rational, y: &Rational, s: i8, c: &Rational) -> bool {
    if y.is_zero() || x.is_zero() {
        return x.is_zero() && y.is_zero();
    }
    let sx = x.is_positive();
    let sy = y.is_positive() == (s > 0);
    sx == sy && x * x == c * y * y
}

struct Search<'a> {
    n: usize,
    g1: &'a Matrix,
    g2: &'a Matrix,
    r1: Vec<Rational>,
    r2: Vec<Rational>,
    cs: Vec<Rational>,
    depth: usize,
    budget: u64,
    explored: u64,
    perm: Vec<usize>,
    signs: Vec<i8>,
    sq: Vec<Rational>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn ri(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }

    /// Checks every Gram and curvature entry whose largest index is `i`.
    fn consistent(&self, i: usize) -> bool {
        for j in 0..=i {
            let s = self.signs[i] * self.signs[j];
            let c = &self.sq[i] * &self.sq[j];
            if !eq_scaled(&self.g1[(i, j)], &self.g2[(self.perm[i], self.perm[j])], s, &c) {
                return false;
            }
        }
        let n = i + 1;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        if a != i && b != i && c != i && d != i {
                            continue;
                        }
                        let s = self.signs[a] * self.signs[b] * self.signs[c] * self.signs[d];
                        let cc = &self.sq[a] * &self.sq[b] * &self.sq[c] * &self.sq[d];
                        let x = &self.r1[self.ri(a, b, c, d)];
                        let y = &self.r2[self.ri(self.perm[a], self.perm[b], self.perm[c], self.perm[d])];
                        if !eq_scaled(x, y, s, &cc) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn go(&mut self, i: usize, nonunit: usize) -> bool {
        if i == self.n {
            return true;
        }
        for j in 0..self.n {
            if self.used[j] {
                continue;
            }
            for ci in 0..self.cs.len() {
                let nu = nonunit + usize::from(ci > 0);
                if nu > self.depth {
                    continue;
                }
                for sg in [1i8, -1] {
                    if self.explored >= self.budget {
                        return false;
                    }
                    self.explored += 1;
                    self.perm[i] = j;
                    self.signs[i] = sg;
                    self.sq[i] = self.cs[ci].clone();
                    if self.consistent(i) {
                        self.used[j] = true;
                        if self.go(i + 1, nu) {
                            return true;
                        }
                        self.used[j] = false;
                    }
                }
            }
        }
        false
    }
}

fn flat_curvature(t: &SymmetricTriple) -> Vec<Rational> {
    let r = t.curvature();
    let n = t.dim_m();
    let mut out = Vec::with_capacity(n.pow(4));
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    out.push(r.get(a, b, c, d).clone());
                }
            }
        }
    }
    out
}

/// Bounded search for a monomial map `m_1 → m_2` preserving the metric and
/// the curvature tensor. Identity is tried first.
pub fn brute_force_iso(t1: &SymmetricTriple, t2: &SymmetricTriple, grid: &MonomialGrid) -> BruteForce {
    let n = t1.dim_m();
    if t2.dim_m() != n || t1.dim_h() != t2.dim_h() {
        return BruteForce::NotFoundBounded { explored: 0 };
    }
    let (g1, g2) = (t1.gram_m(), t2.gram_m());
    let mut cs = vec![Rational::one()];
    cs.extend(grid.scalings.iter().filter(|c| c.is_positive() && !c.is_one()).cloned());
    let mut s = Search {
        n,
        g1: &g1,
        g2: &g2,
        r1: flat_curvature(t1),
        r2: flat_curvature(t2),
        cs,
        depth: grid.depth,
        budget: grid.max_candidates,
        explored: 0,
        perm: vec![0; n],
        signs: vec![1; n],
        sq: vec![Rational::one(); n],
        used: vec![false; n],
    };
    if s.go(0, 0) {
        let m = MonomialMap { perm: s.perm, signs: s.signs, sq_scale: s.sq };
        if let Some(phi) = m.matrix() {
            debug_assert!(verify_m_map(t1, t2, &phi));
        }
        BruteForce::Found(m)
    } else {
        BruteForce::NotFoundBounded { explored: s.explored }
    }
}

// ---------------------------------------------------------------------------
// Jacobi versus relations.

#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub sample: usize,
    pub jacobi_ok: bool,
    pub relations_ok: bool,
    pub coefficients: CoefficientSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiReport {
    pub p: usize,
    pub q: usize,
    pub samples: usize,
    pub both_pass: usize,
    pub both_fail: usize,
    pub discrepancies: Vec<Discrepancy>,
}

fn small(rng: &mut StdRng) -> Rational {
    q(rng.gen_range(-3..=3), rng.gen_range(1..=2))
}

/// Coefficients obeying every symmetry. Half of the draws satisfy the
/// quadratic relations by construction (rank-one `f`, decomposable `b`, `a`
/// supported on directions where `f` vanishes); a random slot is then
/// perturbed with probability ½.
pub fn random_symmetric_coefficients(p: usize, q_: usize, rng: &mut StdRng) -> CoefficientSet {
    let s = q_ - p;
    let mut c = CoefficientSet::zeros(p, q_);
    // f_{ijαα} = ε_α λ^α_i λ^α_j; some α nil
    let nil: Vec<bool> = (0..s).map(|_| rng.gen_bool(0.3)).collect();
    for a in 0..s {
        if nil[a] {
            continue;
        }
        let eps = if rng.gen_bool(0.5) { qi(1) } else { qi(-1) };
        let lam: Vector = (0..p).map(|_| small(rng)).collect();
        for i in 0..p {
            for j in 0..p {
                let k = c.fi(i, j, a, a);
                c.f[k] = &eps * &lam[i] * &lam[j];
            }
        }
    }
    // b = κ ω⊗ω, ω = u∧v
    let mut b = c.curvature();
    for _ in 0..if p >= 2 { 2 } else { 0 } {
        let u: Vector = (0..p).map(|_| small(rng)).collect();
        let v: Vector = (0..p).map(|_| small(rng)).collect();
        let kappa = small(rng);
        for i in 0..p {
            for j in 0..p {
                let wij = &u[i] * &v[j] - &u[j] * &v[i];
                for k in 0..p {
                    for l in 0..p {
                        let wkl = &u[k] * &v[l] - &u[l] * &v[k];
                        let x = b.idx(i, j, k, l);
                        b.b[x] += &kappa * &wij * wkl;
                    }
                }
            }
        }
    }
    c.b = b.b;
    // a_{ijkγ} = (δ_{i0}δ_{j1} − δ_{i1}δ_{j0}) u^γ_k on nil directions (p = 2)
    if p == 2 {
        for g in 0..s {
            if !nil[g] || rng.gen_bool(0.5) {
                continue;
            }
            for k in 0..2 {
                set_slot(&mut c, Slot::A(0, 1, k, g), &small(rng));
            }
        }
    }
    if rng.gen_bool(0.5) {
        let which = [Tensor::A, Tensor::B, Tensor::F];
        let sl = slots(p, q_, &which);
        if !sl.is_empty() {
            let slot = sl[rng.gen_range(0..sl.len())];
            let delta = loop {
                let d = small(rng);
                if !d.is_zero() {
                    break d;
                }
            };
            let v = get_slot(&c, slot) + delta;
            set_slot(&mut c, slot, &v);
        }
    }
    c
}

/// Compares the Jacobi verdict with the relations verdict sample by sample.
pub fn jacobi_relations_equivalence(p: usize, q_: usize, samples: usize, seed: u64) -> Result<JacobiReport> {
    if q_ < p || p == 0 {
        return Err(TripleError::InvalidParameters(format!("need 1 ≤ p ≤ q, got p = {p}, q = {q_}")));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let draws: Vec<CoefficientSet> = (0..samples).map(|_| random_symmetric_coefficients(p, q_, &mut rng)).collect();
    let verdicts: Vec<(bool, bool)> = draws
        .par_iter()
        .map(|c| (jacobi_verdict(c).0, coefficient_relations_check(c).ok()))
        .collect();
    let mut rep = JacobiReport { p, q: q_, samples, both_pass: 0, both_fail: 0, discrepancies: Vec::new() };
    for (k, ((j, r), c)) in verdicts.into_iter().zip(draws).enumerate() {
        match (j, r) {
            (true, true) => rep.both_pass += 1,
            (false, false) => rep.both_fail += 1,
            _ => rep.discrepancies.push(Discrepancy { sample: k, jacobi_ok: j, relations_ok: r, coefficients: c }),
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classification::lorentz_isomorphic;
    use crate::normal_forms::build_lorentz;

    fn fv(v: &[i64]) -> Vector {
        v.iter().map(|&a| qi(a)).collect()
    }

    #[test]
    fn identity_at_depth_zero() {
        let t = build_lorentz(&fv(&[1, 2])).unwrap();
        match brute_force_iso(&t, &t, &MonomialGrid::default()) {
            BruteForce::Found(m) => {
                assert_eq!(m, MonomialMap::identity(4));
                assert_eq!(m.depth(), 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lorentz_witness_and_bounded_miss() {
        let t1 = build_lorentz(&fv(&[1, 2])).unwrap();
        let t2 = build_lorentz(&fv(&[2, 4])).unwrap();
        let t3 = build_lorentz(&fv(&[1, 3])).unwrap();
        let m = match brute_force_iso(&t1, &t2, &MonomialGrid::default()) {
            BruteForce::Found(m) => m,
            other => panic!("{other:?}"),
        };
        assert!(m.depth() >= 2);
        assert!(m.matrix().is_none(), "needs √2");
        assert!(matches!(brute_force_iso(&t1, &t3, &MonomialGrid::default()), BruteForce::NotFoundBounded { .. }));
        // a rational witness does verify through the general checker
        let t4 = build_lorentz(&fv(&[4, 8])).unwrap();
        let grid = MonomialGrid { scalings: vec![q(1, 4), qi(4)], ..Default::default() };
        match brute_force_iso(&t1, &t4, &grid) {
            BruteForce::Found(m) => assert!(verify_m_map(&t1, &t4, &m.matrix().unwrap())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oracle_agrees_with_lorentz_decider() {
        let base = [[1, 2], [1, 3], [-1, 2], [1, -1], [2, 5], [-3, -1], [3, 7], [-2, 5], [1, 1], [-1, -5]];
        let mut lists: Vec<Vector> = Vec::new();
        for (k, b) in base.iter().enumerate() {
            lists.push(fv(b));
            let mut d = fv(&[2 * b[0], 2 * b[1]]);
            if k % 2 == 0 {
                d.reverse();
            }
            lists.push(d);
        }
        let ts: Vec<SymmetricTriple> = lists.iter().map(|f| build_lorentz(f).unwrap()).collect();
        let pairs: Vec<(usize, usize)> = (0..20).flat_map(|i| (i + 1..20).map(move |j| (i, j))).collect();
        let bad: Vec<_> = pairs
            .par_iter()
            .filter(|&&(i, j)| {
                let dec = lorentz_isomorphic(&lists[i], &lists[j]).unwrap().is_some();
                let bf = matches!(brute_force_iso(&ts[i], &ts[j], &MonomialGrid::default()), BruteForce::Found(_));
                dec != bf
            })
            .collect();
        assert!(bad.is_empty(), "{bad:?}");
    }

    #[test]
    fn census_nil22() {
        let spec = GridSpec { p: 2, q: 2, value_set: fv(&[-2, -1, 1, 2]), which_tensors: vec![Tensor::B] };
        let c = enumerate_max_center(&spec).unwrap();
        assert_eq!(c.entries.len(), 4);
        assert!(c.entries.iter().all(|e| e.verdicts.jacobi_ok && e.verdicts.relations_ok));
        assert_eq!(c.classes.len(), 2);
        for e in &c.entries {
            let cl = &c.classes[e.class_id.unwrap()];
            let sign = e.coefficients.b(0, 1, 0, 1).signum();
            let FamilyParams::Nil22 { eps_y } = cl.recognized.clone().unwrap() else { panic!() };
            assert_eq!(eps_y == qi(1), sign == nil22_b_sign());
            if e.nilpotent == Some(true) {
                assert!(e.center_dim.unwrap() >= 2);
            }
        }
        // stable under a permuted visiting order
        let c2 = enumerate_in_order(&spec, Some(&[3, 1, 0, 2])).unwrap();
        assert_eq!(c2.classes.len(), 2);
    }

    #[test]
    fn census_lorentz_and_guards() {
        let spec = GridSpec { p: 1, q: 3, value_set: fv(&[1, 2]), which_tensors: vec![Tensor::F] };
        let c = enumerate_max_center(&spec).unwrap();
        assert_eq!(c.entries.len(), 8);
        for e in &c.entries {
            assert_eq!(e.verdicts.jacobi_ok, e.verdicts.relations_ok);
        }
        // every member of a class shares its spectrum up to scaling
        for cl in &c.classes {
            for &m in &cl.members {
                if let (Some(FamilyParams::Lorentz { f: a }), Some(FamilyParams::Lorentz { f: b })) =
                    (recognize(&c.entries[m].coefficients), cl.recognized.clone())
                {
                    assert!(lorentz_isomorphic(&a, &b).unwrap().is_some());
                }
            }
        }
        let empty = GridSpec { p: 2, q: 2, value_set: vec![], which_tensors: vec![Tensor::B] };
        assert!(enumerate_max_center(&empty).is_err());
        let big = GridSpec { p: 2, q: 6, value_set: fv(&[-2, -1, 0, 1, 2]), which_tensors: vec![Tensor::A, Tensor::B, Tensor::F] };
        assert!(matches!(enumerate_max_center(&big), Err(TripleError::GridTooLarge(_))));
    }

    #[test]
    fn jacobi_matches_relations_small() {
        let rep = jacobi_relations_equivalence(2, 4, 60, 3).unwrap();
        assert!(rep.discrepancies.is_empty(), "{:?}", rep.discrepancies.first());
        assert!(rep.both_pass > 5 && rep.both_fail > 5, "{} {}", rep.both_pass, rep.both_fail);
        let zero = CoefficientSet::zeros(2, 4);
        assert!(jacobi_verdict(&zero).0 && coefficient_relations_check(&zero).ok());
    }

    #[test]
    fn commutativity_violation_breaks_jacobi() {
        let mut c = CoefficientSet::zeros(2, 4);
        // f_{11αα} = 1, f_{22αα} = 1, f_{12} = 0 for α = 1, 2 with a twist on α = 2
        for (i, j, a, v) in [(0, 0, 0, 1), (1, 1, 0, 1), (0, 0, 1, 1), (0, 1, 1, 1), (1, 1, 1, 1)] {
            set_slot(&mut c, Slot::F(i, j, a, a), &qi(v));
        }
        let rep = coefficient_relations_check(&c);
        assert!(rep.violates("commutativity"));
        assert!(!jacobi_verdict(&c).0);
    }
}
