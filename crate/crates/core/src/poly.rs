//! Univariate polynomials over the rationals: arithmetic, gcd, squarefree
//! parts, rational roots, small-degree factor search and matrix polynomials.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{qi, Matrix, Rational};

/// Polynomial with ascending coefficients; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

/// The factor search gave up before deciding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBoundExceeded;

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Rational::one()] }
    }

    /// `x - r`
    pub fn linear(r: &Rational) -> Self {
        Poly::new(vec![-r.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().recip();
        Poly::new(self.coeffs.iter().map(|c| c * &l).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Rational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.coeffs.clone();
        let dl = d.lead();
        let dd = d.degree();
        if self.coeffs.len() < d.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quo = vec![Rational::zero(); self.coeffs.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            quo[k] = c;
        }
        (Poly::new(quo), Poly::new(r))
    }

    pub fn divides(&self, f: &Poly) -> bool {
        f.divrem(self).1.is_zero()
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * qi(i as i64)).collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// Evaluates at a square matrix by Horner's rule.
    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let n = m.rows();
        let mut acc = Matrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m).add(&Matrix::identity(n).scale(c));
        }
        acc
    }

    /// Squarefree factorization (Yun): pairs `(factor, multiplicity)` with monic,
    /// pairwise coprime, nonconstant factors.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.divrem(&a).0;
        let mut c = fp.divrem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.degree() > 0 {
                out.push((g.clone(), i));
            }
            b = b.divrem(&g).0;
            if b.degree() == 0 {
                break;
            }
            c = d.divrem(&g).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Primitive integer polynomial proportional to `self` with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| {
            let g = big_gcd(&acc, c.denom());
            &acc / g * c.denom()
        });
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| big_gcd(&acc, c));
        let g = if g.is_zero() { BigInt::one() } else { g };
        let sgn = if ints.last().is_some_and(|l| l.is_negative()) { -BigInt::one() } else { BigInt::one() };
        ints.iter().map(|c| c / &g * &sgn).collect()
    }

    /// Distinct rational roots. Returns `None` when coefficients are too large
    /// for divisor enumeration.
    pub fn rational_roots(&self) -> Option<Vec<Rational>> {
        let mut roots = Vec::new();
        if self.degree() == 0 {
            return Some(roots);
        }
        let mut f = self.clone();
        if f.coeffs[0].is_zero() {
            roots.push(Rational::zero());
            while !f.is_zero() && f.coeffs[0].is_zero() {
                f = Poly::new(f.coeffs[1..].to_vec());
            }
        }
        if f.degree() == 0 {
            return Some(roots);
        }
        let ints = f.primitive_integer();
        let a0 = divisors(&ints[0].abs())?;
        let an = divisors(&ints.last().unwrap().abs())?;
        for p in &a0 {
            for qd in &an {
                for s in [1i64, -1] {
                    let r = Rational::new(p * BigInt::from(s), qd.clone());
                    if f.eval(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        Some(roots)
    }

    /// A nontrivial factor of a squarefree polynomial of degree at most 8, if one
    /// exists over the rationals (Kronecker's method). `None` means irreducible;
    /// `Err` flags an exceeded search bound.
    pub fn find_factor(&self) -> Result<Option<Poly>, SearchBoundExceeded> {
        let n = self.degree();
        if n <= 1 {
            return Ok(None);
        }
        if let Some(roots) = self.rational_roots() {
            if let Some(r) = roots.first() {
                return Ok(Some(Poly::linear(r)));
            }
        } else {
            return Err(SearchBoundExceeded);
        }
        if n > 8 {
            return Err(SearchBoundExceeded);
        }
        let ints = self.primitive_integer();
        let fz = Poly::new(ints.iter().map(|c| Rational::from_integer(c.clone())).collect());
        for d in 2..=n / 2 {
            let mut pts: Vec<(BigInt, Vec<BigInt>)> = Vec::new();
            let mut x = 0i64;
            while pts.len() <= d {
                let xv = BigInt::from(x);
                let val = fz.eval(&Rational::from_integer(xv.clone())).to_integer();
                let divs = divisors(&val.abs()).ok_or(SearchBoundExceeded)?;
                let mut signed = Vec::new();
                for dv in divs {
                    signed.push(dv.clone());
                    signed.push(-dv);
                }
                pts.push((xv, signed));
                x = if x <= 0 { -x + 1 } else { -x };
            }
            let total: u128 = pts.iter().map(|p| p.1.len() as u128).product();
            if total > 2_000_000 {
                return Err(SearchBoundExceeded);
            }
            let mut idx = vec![0usize; pts.len()];
            loop {
                let xs: Vec<Rational> = pts.iter().map(|p| Rational::from_integer(p.0.clone())).collect();
                let ys: Vec<Rational> =
                    pts.iter().zip(&idx).map(|(p, &i)| Rational::from_integer(p.1[i].clone())).collect();
                let g = interpolate(&xs, &ys);
                if g.degree() == d && g.coeffs.iter().all(|c| c.is_integer()) && g.divides(&fz) {
                    return Ok(Some(g.monic()));
                }
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < pts[k].1.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }
        Ok(None)
    }

    /// Splits `self = q1 · q2` with `gcd(q1, q2) = 1` and both nonconstant.
    /// `Err` when the factor search bound was hit.
    pub fn coprime_split(&self) -> Result<Option<(Poly, Poly)>, SearchBoundExceeded> {
        let parts = self.squarefree_decomposition();
        if parts.len() >= 2 {
            let q1 = parts[0].0.pow(parts[0].1);
            let q2 = parts[1..].iter().fold(Poly::one(), |acc, (f, k)| acc.mul(&f.pow(*k)));
            return Ok(Some((q1, q2)));
        }
        let Some((s, k)) = parts.first() else {
            return Ok(None);
        };
        match s.find_factor()? {
            Some(g) => {
                let h = s.divrem(&g).0;
                Ok(Some((g.pow(*k), h.pow(*k))))
            }
            None => Ok(None),
        }
    }

    pub fn to_string_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = crate::linalg::fmt_rational(c);
            terms.push(match i {
                0 => cs,
                1 => format!("{cs}*{var}"),
                _ => format!("{cs}*{var}^{i}"),
            });
        }
        terms.join(" + ")
    }
}

/// Nonnegative gcd of two integers.
pub fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut x, mut y) = (a.abs(), b.abs());
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    x
}

/// Lagrange interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Poly {
    let mut acc = Poly::zero();
    for i in 0..xs.len() {
        let mut basis = Poly::one();
        let mut denom = Rational::one();
        for j in 0..xs.len() {
            if i != j {
                basis = basis.mul(&Poly::linear(&xs[j]));
                denom *= &xs[i] - &xs[j];
            }
        }
        acc = acc.add(&basis.scale(&(&ys[i] / denom)));
    }
    acc
}

/// Positive divisors of `n > 0`; `n = 0` yields `[1]` is not meaningful, so zero
/// returns an empty list. `None` if `n` is too large to factor by trial division.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    if n.is_zero() {
        return Some(Vec::new());
    }
    let v = n.to_u64().filter(|&v| v <= 1_000_000_000_000)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= v {
        if v % d == 0 {
            small.push(BigInt::from(d));
            if d * d != v {
                large.push(BigInt::from(v / d));
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    Some(small)
}

/// Monic minimal polynomial of a square matrix (Krylov on matrix powers).
pub fn minimal_polynomial(m: &Matrix) -> Poly {
    let n = m.rows();
    let mut powers: Vec<Vec<Rational>> = vec![Matrix::identity(n).entries().to_vec()];
    let mut cur = Matrix::identity(n);
    for k in 1..=n {
        cur = cur.mul(m);
        let target = cur.entries().to_vec();
        let a = Matrix::from_columns(n * n, &powers);
        if let Some(sol) = a.solve(&target) {
            let mut coeffs: Vec<Rational> = sol.into_iter().map(|c| -c).collect();
            coeffs.push(Rational::one());
            debug_assert_eq!(coeffs.len(), k + 1);
            return Poly::new(coeffs);
        }
        powers.push(target);
    }
    unreachable!("Cayley-Hamilton bounds the minimal polynomial degree")
}

/// Characteristic polynomial `det(xI - M)` (Faddeev-LeVerrier).
pub fn characteristic_polynomial(m: &Matrix) -> Poly {
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        mk = m.mul(&mk).add(&Matrix::identity(n).scale(&coeffs[n - k + 1]));
        coeffs[n - k] = -(m.mul(&mk).trace()) / qi(k as i64);
    }
    Poly::new(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| qi(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        let (quo, r) = a.divrem(&b);
        assert_eq!(quo, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[-1, 1]).mul(&p(&[2, 1]))), p(&[-1, 1]));
    }

    #[test]
    fn squarefree() {
        // (x-1)^2 (x+2)
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]));
        let parts = f.squarefree_decomposition();
        assert_eq!(parts, vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 2)]);
    }

    #[test]
    fn roots() {
        let f = p(&[4, -5, 1]);
        assert_eq!(f.rational_roots().unwrap(), vec![qi(1), qi(4)]);
        let g = Poly::new(vec![q(-1, 4), qi(0), qi(1)]);
        assert_eq!(g.rational_roots().unwrap(), vec![q(-1, 2), q(1, 2)]);
        assert!(p(&[-2, 0, 1]).rational_roots().unwrap().is_empty());
    }

    #[test]
    fn kronecker_finds_quadratic_factor() {
        let f = p(&[-2, 0, 1]).mul(&p(&[-3, 0, 1]));
        let g = f.find_factor().unwrap().unwrap();
        assert!(g.degree() == 2 && g.divides(&f));
        assert_eq!(p(&[1, 0, 1]).find_factor(), Ok(None));
    }

    #[test]
    fn matrix_polynomials() {
        let m = Matrix::from_rows(vec![vec![q(5, 2), q(3, 2)], vec![q(3, 2), q(5, 2)]]);
        assert_eq!(characteristic_polynomial(&m), p(&[4, -5, 1]));
        assert_eq!(minimal_polynomial(&m), p(&[4, -5, 1]));
        assert_eq!(minimal_polynomial(&Matrix::identity(3)), p(&[-1, 1]));
        let n = Matrix::from_i64(&[vec![0, 1], vec![0, 0]]);
        assert_eq!(minimal_polynomial(&n), p(&[0, 0, 1]));
        assert!(p(&[4, -5, 1]).eval_matrix(&m).is_zero());
    }
}
