//! The Lorentzian spaces `τ_n(f)` as concrete manifolds: the group law on
//! `g_f = X ⊕ W ⊕ z ⊕ z*`, the metric on `W ⊕ z ⊕ z*`, and the center of the
//! transvection group.
//!
//! Structure constants follow `build_lorentz`: `[Z*, W_α] = X_α`,
//! `[X_α, Z*] = f^α W_α`, `[X_α, W_α] = −f^α Z`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Result, TripleError};
use crate::json::{ser_opt_rat, ser_rat, ser_vec};
use crate::linalg::{q, qi, rational_sqrt, to_f64, BilinearForm, Matrix, Rational, Vector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupElement {
    #[serde(serialize_with = "ser_vec")]
    pub x: Vector,
    #[serde(serialize_with = "ser_vec")]
    pub w: Vector,
    #[serde(serialize_with = "ser_rat")]
    pub z: Rational,
    #[serde(serialize_with = "ser_rat")]
    pub zstar: Rational,
}

impl GroupElement {
    pub fn identity(s: usize) -> Self {
        GroupElement { x: vec![Rational::zero(); s], w: vec![Rational::zero(); s], z: Rational::zero(), zstar: Rational::zero() }
    }

    pub fn s(&self) -> usize {
        self.w.len()
    }

    /// Inverse, exact only on the nilpotent part `z* = 0`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.zstar.is_zero() {
            return Err(TripleError::Unsupported("exact inverse needs z* = 0".into()));
        }
        Ok(GroupElement {
            x: self.x.iter().map(|v| -v).collect(),
            w: self.w.iter().map(|v| -v).collect(),
            z: -&self.z,
            zstar: Rational::zero(),
        })
    }

    pub fn to_float(&self) -> FloatGroupElement {
        FloatGroupElement {
            x: self.x.iter().map(to_f64).collect(),
            w: self.w.iter().map(to_f64).collect(),
            z: to_f64(&self.z),
            zstar: to_f64(&self.zstar),
        }
    }

    fn check(&self, f_len: usize) -> Result<()> {
        if self.x.len() != f_len || self.w.len() != f_len {
            return Err(TripleError::DimensionMismatch(format!(
                "group element has |x| = {}, |w| = {}, expected {}",
                self.x.len(),
                self.w.len(),
                f_len
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FloatGroupElement {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub z: f64,
    pub zstar: f64,
}

impl FloatGroupElement {
    pub fn max_abs_diff(&self, o: &FloatGroupElement) -> f64 {
        let mut d = (self.z - o.z).abs().max((self.zstar - o.zstar).abs());
        for (a, b) in self.x.iter().zip(&o.x).chain(self.w.iter().zip(&o.w)) {
            d = d.max((a - b).abs());
        }
        d
    }
}

/// Product of two elements; `Float` marks a result that went through
/// `cos`/`sin` (or `cosh`/`sinh`) of a nonzero `z̄*`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "path", rename_all = "snake_case")]
pub enum GroupProduct {
    Exact(GroupElement),
    Float(FloatGroupElement),
}

impl GroupProduct {
    pub fn is_exact(&self) -> bool {
        matches!(self, GroupProduct::Exact(_))
    }

    pub fn exact(self) -> Option<GroupElement> {
        match self {
            GroupProduct::Exact(g) => Some(g),
            GroupProduct::Float(_) => None,
        }
    }

    pub fn to_float(&self) -> FloatGroupElement {
        match self {
            GroupProduct::Exact(g) => g.to_float(),
            GroupProduct::Float(g) => g.clone(),
        }
    }
}

/// Heisenberg bracket `[x+w, x̄+w̄]`, as a multiple of `Z`.
fn heis_bracket(f: &[Rational], x: &[Rational], w: &[Rational], xb: &[Rational], wb: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for a in 0..f.len() {
        acc -= &f[a] * (&x[a] * &wb[a] - &w[a] * &xb[a]);
    }
    acc
}

fn heis_bracket_f64(f: &[f64], x: &[f64], w: &[f64], xb: &[f64], wb: &[f64]) -> f64 {
    (0..f.len()).map(|a| -f[a] * (x[a] * wb[a] - w[a] * xb[a])).sum()
}

/// `e^{−t ad Z*}` on one `(X_α, W_α)` plane. `ad Z*` sends `W ↦ X`, `X ↦ −f W`.
fn exp_neg_ad_plane(fa: f64, t: f64, x: f64, w: f64) -> (f64, f64) {
    // A(x, w) = (w, −f x), A² = −f.
    let (c, s_over) = if fa > 0.0 {
        let om = fa.sqrt();
        ((om * t).cos(), (om * t).sin() / om)
    } else {
        let om = (-fa).sqrt();
        ((om * t).cosh(), (om * t).sinh() / om)
    };
    (c * x - s_over * w, c * w + s_over * fa * x)
}

pub fn group_multiply(g1: &GroupElement, g2: &GroupElement, f: &[Rational]) -> Result<GroupProduct> {
    g1.check(f.len())?;
    g2.check(f.len())?;
    if !g2.zstar.is_zero() {
        let ff: Vec<f64> = f.iter().map(to_f64).collect();
        return Ok(GroupProduct::Float(group_multiply_float(&g1.to_float(), &g2.to_float(), &ff)?));
    }
    let br = heis_bracket(f, &g1.x, &g1.w, &g2.x, &g2.w);
    Ok(GroupProduct::Exact(GroupElement {
        x: g1.x.iter().zip(&g2.x).map(|(a, b)| a + b).collect(),
        w: g1.w.iter().zip(&g2.w).map(|(a, b)| a + b).collect(),
        z: &g1.z + &g2.z + br / qi(2),
        zstar: &g1.zstar + &g2.zstar,
    }))
}

pub fn group_multiply_float(g1: &FloatGroupElement, g2: &FloatGroupElement, f: &[f64]) -> Result<FloatGroupElement> {
    let s = f.len();
    for g in [g1, g2] {
        if g.x.len() != s || g.w.len() != s {
            return Err(TripleError::DimensionMismatch(format!("group element size, expected {}", s)));
        }
    }
    let mut ex = vec![0.0; s];
    let mut ew = vec![0.0; s];
    for a in 0..s {
        let (x, w) = exp_neg_ad_plane(f[a], g2.zstar, g1.x[a], g1.w[a]);
        ex[a] = x;
        ew[a] = w;
    }
    let br = heis_bracket_f64(f, &ex, &ew, &g2.x, &g2.w);
    Ok(FloatGroupElement {
        x: (0..s).map(|a| ex[a] + g2.x[a]).collect(),
        w: (0..s).map(|a| ew[a] + g2.w[a]).collect(),
        z: g1.z + g2.z + 0.5 * br,
        zstar: g1.zstar + g2.zstar,
    })
}

fn check_point(point: &[Rational], f: &[Rational]) -> Result<()> {
    if point.len() != f.len() + 2 {
        return Err(TripleError::DimensionMismatch(format!(
            "point has {} coordinates, expected (w.., z, z*) = {}",
            point.len(),
            f.len() + 2
        )));
    }
    Ok(())
}

/// `2 dz*(dz − Σ f^α w_α² dz*) + Σ dw_α²` at `point = (w.., z, z*)`.
pub fn metric_at(point: &[Rational], f: &[Rational]) -> Result<BilinearForm> {
    check_point(point, f)?;
    let s = f.len();
    let mut g = Matrix::zeros(s + 2, s + 2);
    for a in 0..s {
        g[(a, a)] = qi(1);
    }
    g[(s, s + 1)] = qi(1);
    g[(s + 1, s)] = qi(1);
    let mut acc = Rational::zero();
    for a in 0..s {
        acc += &f[a] * &point[a] * &point[a];
    }
    g[(s + 1, s + 1)] = -acc * qi(2);
    BilinearForm::new(g)
}

/// Left translation by `k` (with `k.z* = 0`) of the section point
/// `(w, z, 0)`, together with its Jacobian in `(w.., z, z*)` coordinates.
///
/// Both are rational: at `z* = 0` only the first derivative of
/// `e^{−t ad Z*}` enters.
pub fn left_translation_jacobian(k: &GroupElement, point: &[Rational], f: &[Rational]) -> Result<(Vector, Matrix)> {
    k.check(f.len())?;
    check_point(point, f)?;
    let s = f.len();
    if !k.zstar.is_zero() || !point[s + 1].is_zero() {
        return Err(TripleError::Unsupported("exact left translation needs z* = 0 on both sides".into()));
    }
    let (xb, wb) = (&k.x, &k.w);
    let w = &point[..s];
    let half = q(1, 2);
    let mut image = Vec::with_capacity(s + 2);
    let mut zz = &k.z + &point[s];
    for a in 0..s {
        let wn = &w[a] + &wb[a];
        zz -= &half * &f[a] * &xb[a] * (&w[a] + &wn);
        image.push(wn);
    }
    image.push(zz);
    image.push(Rational::zero());

    let mut j = Matrix::identity(s + 2);
    let mut dz_dzs = Rational::zero();
    for a in 0..s {
        j[(a, s + 1)] = &f[a] * &xb[a];
        j[(s, a)] = -(&f[a] * &xb[a]);
        dz_dzs += &f[a] * (&w[a] * &wb[a] + &half * &wb[a] * &wb[a] - &half * &f[a] * &xb[a] * &xb[a]);
    }
    j[(s, s + 1)] = dz_dzs;
    Ok((image, j))
}

/// `Jᵀ G J` for the Gram `G` of `metric_at` at the translated point.
pub fn pullback(jac: &Matrix, g_image: &BilinearForm) -> Matrix {
    jac.transpose().mul(g_image.gram()).mul(jac)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CenterKind {
    #[serde(rename = "Z_only")]
    ZOnly,
    #[serde(rename = "Z_times_lattice")]
    ZTimesLattice,
}

/// `λ = c · 2π/√(−f^1)`; only `c` is stored exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CenterDescription {
    pub kind: CenterKind,
    #[serde(serialize_with = "ser_opt_rat")]
    pub lambda_coeff: Option<Rational>,
    pub lambda_float: Option<f64>,
}

fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn rational_gcd(rs: &[Rational]) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for r in rs {
        num = big_gcd(&num, r.numer());
        let g = big_gcd(&den, r.denom());
        den = &den / &g * r.denom();
    }
    Rational::new(num, den)
}

fn check_f(f: &[Rational]) -> Result<()> {
    if f.is_empty() {
        return Err(TripleError::InvalidParameters("f is empty".into()));
    }
    if let Some(a) = f.iter().position(Zero::is_zero) {
        return Err(TripleError::InvalidParameters(format!("f[{}] = 0", a + 1)));
    }
    Ok(())
}

/// Ratios `r_α = √(f^α/f^1)` when every `f^α < 0` and every ratio is a
/// rational square.
fn lattice_ratios(f: &[Rational]) -> Option<Vec<Rational>> {
    if f.iter().any(|v| v.is_positive()) {
        return None;
    }
    f.iter().map(|v| rational_sqrt(&(v / &f[0]))).collect()
}

pub fn center_of_transvection_group(f: &[Rational]) -> Result<CenterDescription> {
    check_f(f)?;
    Ok(match lattice_ratios(f) {
        None => CenterDescription { kind: CenterKind::ZOnly, lambda_coeff: None, lambda_float: None },
        Some(r) => {
            let c = rational_gcd(&r).recip();
            let lf = to_f64(&c) * 2.0 * std::f64::consts::PI / (-to_f64(&f[0])).sqrt();
            CenterDescription { kind: CenterKind::ZTimesLattice, lambda_coeff: Some(c), lambda_float: Some(lf) }
        }
    })
}

/// `(w, z, z*) ↦ (σ·w, z, z* + k·2π/√(−f^1))`, with `k` rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignShift {
    pub signs: Vec<i8>,
    #[serde(serialize_with = "ser_rat")]
    pub shift_coeff: Rational,
}

impl SignShift {
    pub fn then(&self, o: &SignShift) -> SignShift {
        SignShift {
            signs: self.signs.iter().zip(&o.signs).map(|(a, b)| a * b).collect(),
            shift_coeff: &self.shift_coeff + &o.shift_coeff,
        }
    }

    /// Image of a float point `(w.., z, z*)`; `unit = 2π/√(−f^1)`.
    pub fn apply_float(&self, point: &[f64], unit: f64) -> Vec<f64> {
        let s = self.signs.len();
        let mut out = point.to_vec();
        for a in 0..s {
            out[a] *= self.signs[a] as f64;
        }
        out[s + 1] += to_f64(&self.shift_coeff) * unit;
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecialIsometry {
    /// `m_α = λ√(−f^α)/2π`, integers.
    #[serde(serialize_with = "ser_vec")]
    pub m: Vector,
    pub phi: SignShift,
    /// `φ²`, which is the lattice translation by `λ`.
    pub phi_squared: SignShift,
    pub center: CenterDescription,
}

pub fn special_isometry_phi(f: &[Rational]) -> Result<SpecialIsometry> {
    let center = center_of_transvection_group(f)?;
    let c = match (&center.kind, &center.lambda_coeff) {
        (CenterKind::ZTimesLattice, Some(c)) => c.clone(),
        _ => return Err(TripleError::Unsupported("center is z only; no lattice isometry".into())),
    };
    let r = lattice_ratios(f).expect("lattice case");
    let m: Vector = r.iter().map(|ra| &c * ra).collect();
    let mut signs = Vec::with_capacity(m.len());
    for ma in &m {
        if !ma.is_integer() {
            return Err(TripleError::InvalidParameters("non-integral m_α".into()));
        }
        let odd = !(ma.numer() % BigInt::from(2)).is_zero();
        signs.push(if odd { -1 } else { 1 });
    }
    let phi = SignShift { signs, shift_coeff: &c / qi(2) };
    let phi_squared = phi.then(&phi);
    let lattice = SignShift { signs: vec![1; f.len()], shift_coeff: c };
    if phi_squared != lattice {
        return Err(TripleError::InvalidParameters("φ² is not the lattice shift".into()));
    }
    Ok(SpecialIsometry { m, phi, phi_squared, center })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_forms::build_lorentz;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn fv(v: &[i64]) -> Vector {
        v.iter().map(|&a| qi(a)).collect()
    }

    fn rand_rat(rng: &mut StdRng) -> Rational {
        q(rng.gen_range(-6..=6), rng.gen_range(1..=4))
    }

    fn rand_elem(rng: &mut StdRng, s: usize, zstar: bool) -> GroupElement {
        GroupElement {
            x: (0..s).map(|_| rand_rat(rng)).collect(),
            w: (0..s).map(|_| rand_rat(rng)).collect(),
            z: rand_rat(rng),
            zstar: if zstar { rand_rat(rng) + q(1, 7) } else { Rational::zero() },
        }
    }

    fn mul(a: &GroupElement, b: &GroupElement, f: &[Rational]) -> GroupElement {
        group_multiply(a, b, f).unwrap().exact().unwrap()
    }

    #[test]
    fn structure_constants_match_lorentz_builder() {
        let f = fv(&[-3, 2]);
        let t = build_lorentz(&f).unwrap();
        let alg = t.algebra();
        let idx = |l: &str| alg.labels().iter().position(|x| x == l).unwrap();
        let (z, zs) = (idx("Z"), idx("Z*"));
        for a in 0..2 {
            let (x, w) = (idx(&format!("X{}", a + 1)), idx(&format!("W{}", a + 1)));
            let n = alg.dim();
            let e = |i: usize, c: Rational| {
                let mut v = vec![Rational::zero(); n];
                v[i] = c;
                v
            };
            assert_eq!(alg.bracket_basis(zs, w), e(x, qi(1)));
            assert_eq!(alg.bracket_basis(x, zs), e(w, f[a].clone()));
            assert_eq!(alg.bracket_basis(x, w), e(z, -&f[a]));
            // same bracket through the group's Heisenberg part
            let mut xs = vec![Rational::zero(); 2];
            let mut ws = vec![Rational::zero(); 2];
            xs[a] = qi(1);
            ws[a] = qi(1);
            let zero = vec![Rational::zero(); 2];
            assert_eq!(heis_bracket(&f, &xs, &zero, &zero, &ws), -&f[a]);
        }
    }

    #[test]
    fn identity_and_campbell_hausdorff() {
        let f = fv(&[-1, 3]);
        let mut rng = StdRng::seed_from_u64(7);
        let g = rand_elem(&mut rng, 2, true);
        let e = GroupElement::identity(2);
        assert_eq!(group_multiply(&g, &e, &f).unwrap(), GroupProduct::Exact(g.clone()));
        let a = rand_elem(&mut rng, 2, false);
        let b = rand_elem(&mut rng, 2, false);
        let p = mul(&a, &b, &f);
        let br = heis_bracket(&f, &a.x, &a.w, &b.x, &b.w);
        assert_eq!(p.z, &a.z + &b.z + br / qi(2));
    }

    #[test]
    fn nilpotent_part_associative_with_inverse() {
        let mut rng = StdRng::seed_from_u64(11);
        for trial in 0..50 {
            let s = 1 + trial % 3;
            let f: Vector = (0..s).map(|_| loop {
                let v = rand_rat(&mut rng);
                if !v.is_zero() {
                    break v;
                }
            }).collect();
            let (a, b, c) = (rand_elem(&mut rng, s, false), rand_elem(&mut rng, s, false), rand_elem(&mut rng, s, false));
            assert_eq!(mul(&mul(&a, &b, &f), &c, &f), mul(&a, &mul(&b, &c, &f), &f));
            let e = GroupElement::identity(s);
            assert_eq!(mul(&a, &a.inverse().unwrap(), &f), e);
            assert_eq!(mul(&a.inverse().unwrap(), &a, &f), e);
        }
    }

    #[test]
    fn float_path_flagged_and_associative() {
        let f = fv(&[2, -1]);
        let ff: Vec<f64> = f.iter().map(to_f64).collect();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..30 {
            let (a, b, c) = (rand_elem(&mut rng, 2, true), rand_elem(&mut rng, 2, true), rand_elem(&mut rng, 2, true));
            assert!(!group_multiply(&a, &b, &f).unwrap().is_exact());
            let (a, b, c) = (a.to_float(), b.to_float(), c.to_float());
            let l = group_multiply_float(&group_multiply_float(&a, &b, &ff).unwrap(), &c, &ff).unwrap();
            let r = group_multiply_float(&a, &group_multiply_float(&b, &c, &ff).unwrap(), &ff).unwrap();
            assert!(l.max_abs_diff(&r) < 1e-8 * (1.0 + l.z.abs()), "{:?} vs {:?}", l, r);
        }
    }

    #[test]
    fn metric_closed_form_values() {
        let g = metric_at(&fv(&[0, 0, 0, 0]), &fv(&[3, -5])).unwrap();
        assert_eq!(g.gram(), &Matrix::from_i64(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 1, 0]]));
        let g = metric_at(&fv(&[1, 0, 0]), &fv(&[-1])).unwrap();
        assert_eq!(g.gram()[(2, 2)], qi(2));
        let g = metric_at(&fv(&[1, 1, 0, 0]), &fv(&[1, 2])).unwrap();
        assert_eq!(g.gram()[(3, 3)], qi(-6));
        assert!(metric_at(&fv(&[1, 0]), &fv(&[1])).is_err());
    }

    // The closed-form metric for `f` is the one induced by the group law and
    // the section for the parameter `2f`.
    #[test]
    fn metric_homogeneous_under_nilpotent_translations() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..40 {
            let s = rng.gen_range(1..=3);
            let f: Vector = (0..s).map(|_| qi(rng.gen_range(1..=4) * if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
            let f2: Vector = f.iter().map(|v| v * qi(2)).collect();
            let k = rand_elem(&mut rng, s, false);
            let mut p: Vector = (0..s + 1).map(|_| rand_rat(&mut rng)).collect();
            p.push(Rational::zero());
            let (img, j) = left_translation_jacobian(&k, &p, &f2).unwrap();
            let pulled = pullback(&j, &metric_at(&img, &f).unwrap());
            assert_eq!(&pulled, metric_at(&p, &f).unwrap().gram());
        }
    }

    #[test]
    fn center_examples() {
        let c = center_of_transvection_group(&fv(&[1, -1])).unwrap();
        assert_eq!(c.kind, CenterKind::ZOnly);
        let c = center_of_transvection_group(&fv(&[-1, -2])).unwrap();
        assert_eq!(c.kind, CenterKind::ZOnly);
        let c = center_of_transvection_group(&fv(&[-1, -4])).unwrap();
        assert_eq!(c.kind, CenterKind::ZTimesLattice);
        assert_eq!(c.lambda_coeff, Some(qi(1)));
        assert!((c.lambda_float.unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let c = center_of_transvection_group(&fv(&[-4])).unwrap();
        assert!((c.lambda_float.unwrap() - std::f64::consts::PI).abs() < 1e-12);
        // r = (1, 2/3): gcd 1/3, c = 3
        let c = center_of_transvection_group(&fv(&[-9, -4])).unwrap();
        assert_eq!(c.lambda_coeff, Some(qi(3)));
        assert!((c.lambda_float.unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(center_of_transvection_group(&fv(&[-1, 0])).is_err());
    }

    #[test]
    fn special_isometry_examples() {
        let phi = special_isometry_phi(&fv(&[-4])).unwrap();
        assert_eq!(phi.m, fv(&[1]));
        assert_eq!(phi.phi.signs, vec![-1]);
        assert_eq!(phi.phi.shift_coeff, q(1, 2));
        let unit = 2.0 * std::f64::consts::PI / 2.0;
        let img = phi.phi.apply_float(&[1.0, 0.0, 0.0], unit);
        assert!((img[0] + 1.0).abs() < 1e-15 && (img[2] - std::f64::consts::PI / 2.0).abs() < 1e-12);

        let phi = special_isometry_phi(&fv(&[-1, -4])).unwrap();
        assert_eq!(phi.m, fv(&[1, 2]));
        assert_eq!(phi.phi.signs, vec![-1, 1]);
        assert_eq!(phi.phi_squared, SignShift { signs: vec![1, 1], shift_coeff: qi(1) });
        assert!(special_isometry_phi(&fv(&[1, -1])).is_err());
    }

    // φ preserves the metric: w enters quadratically and z* not at all.
    #[test]
    fn special_isometry_preserves_metric() {
        let f = fv(&[-1, -4]);
        let phi = special_isometry_phi(&f).unwrap();
        let p = fv(&[2, -3, 5, 0]);
        let mut img = p.clone();
        for a in 0..2 {
            img[a] *= qi(phi.phi.signs[a] as i64);
        }
        let d = Matrix::diag(&[qi(phi.phi.signs[0] as i64), qi(phi.phi.signs[1] as i64), qi(1), qi(1)]);
        let pulled = pullback(&d, &metric_at(&img, &f).unwrap());
        assert_eq!(&pulled, metric_at(&p, &f).unwrap().gram());
    }

    // `e^{−t ad Z*}` is periodic on a plane exactly when `(ad Z*)²` is a
    // negative multiple of the identity there, i.e. for `f^α > 0`. The lattice
    // rule above is stated for `f < 0`, so its elements are central in the
    // group with parameter `−f`.
    #[test]
    fn lattice_elements_commute() {
        let mut rng = StdRng::seed_from_u64(99);
        for f in [fv(&[-1, -4]), fv(&[-4]), fv(&[-9, -4, -1])] {
            let c = center_of_transvection_group(&f).unwrap();
            let lam = c.lambda_float.unwrap();
            let neg: Vec<f64> = f.iter().map(|v| -to_f64(v)).collect();
            let s = f.len();
            for i in 0..100 {
                let g = rand_elem(&mut rng, s, true).to_float();
                let k = (i % 3) as f64 - 1.0;
                let zc = FloatGroupElement { x: vec![0.0; s], w: vec![0.0; s], z: 0.7, zstar: lam * k };
                let l = group_multiply_float(&zc, &g, &neg).unwrap();
                let r = group_multiply_float(&g, &zc, &neg).unwrap();
                assert!(l.max_abs_diff(&r) < 1e-9, "{:?} vs {:?}", l, r);
            }
            // with the parameter itself the flow is hyperbolic and λ is not a period
            let ff: Vec<f64> = f.iter().map(to_f64).collect();
            let g = FloatGroupElement { x: vec![1.0; s], w: vec![0.5; s], z: 0.0, zstar: 0.0 };
            let zc = FloatGroupElement { x: vec![0.0; s], w: vec![0.0; s], z: 0.0, zstar: lam };
            let l = group_multiply_float(&zc, &g, &ff).unwrap();
            let r = group_multiply_float(&g, &zc, &ff).unwrap();
            assert!(l.max_abs_diff(&r) > 1e-3);
        }
    }
}
