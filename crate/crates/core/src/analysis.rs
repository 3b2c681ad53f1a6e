//! Whole-triple summaries and the isomorphism dispatcher used by the front ends.

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classification::{
    center_in_m, family_isomorphic, fij_operators, lorentz_isomorphic, max_center_frame, simultaneous_diagonalize,
    simultaneous_diagonalize_float, verify_m_map, witt_index_m, Decision, IsomorphismCertificate, ScaleOrP,
};
use crate::json::TripleJson;
use crate::linalg::{signature_of, Rational, Vector};
use crate::normal_forms::FamilyParams;
use crate::oracle::{brute_force_iso, BruteForce, MonomialGrid};
use crate::triple::{Decomposability, SymmetricTriple};
use crate::witt::{iterate_decompose, LevelDims};
use crate::{Result, TripleError};

pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

/// Exact rational spectra, or the `f64` path with a tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralMode {
    Exact,
    Float(f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct Invariants {
    pub dim_m: usize,
    pub dim_h: usize,
    pub signature_m: (usize, usize, usize),
    pub witt_index: usize,
    pub center_dim: usize,
    pub center_in_m: bool,
    pub solvable: bool,
    pub nilpotent: bool,
    pub ricci_rank: usize,
    pub ricci_signature: (usize, usize, usize),
    pub level_dims: Vec<LevelDims>,
    pub decomposability: Value,
    /// `F_ij` spectra when the center is maximal.
    pub spectrum: Option<Value>,
}

impl Invariants {
    /// The fields that two isomorphic triples must share.
    fn key(&self) -> impl PartialEq + std::fmt::Debug + '_ {
        (
            self.dim_m,
            self.dim_h,
            self.signature_m,
            self.center_dim,
            self.solvable,
            self.nilpotent,
            self.ricci_signature,
            &self.level_dims,
        )
    }
}

pub fn decomposability_json(t: &SymmetricTriple) -> Value {
    match t.decomposability() {
        Decomposability::Decomposable { m1, m2 } => json!({
            "verdict": "decomposable",
            "dims": [m1.dim(), m2.dim()],
            "pieces": t.full_splitting().iter().map(Vec::len).collect::<Vec<_>>(),
        }),
        Decomposability::Indecomposable(r) => json!({ "verdict": "indecomposable", "reason": r }),
        Decomposability::Unknown => json!({ "verdict": "unknown" }),
    }
}

fn spectrum_json(t: &SymmetricTriple, mode: SpectralMode) -> Option<Value> {
    let fr = max_center_frame(t).ok()?;
    let fs = fij_operators(t, &fr).ok()?;
    let g = fr.w_gram(t);
    Some(match mode {
        SpectralMode::Exact => match simultaneous_diagonalize(&fs, &g) {
            Ok(sd) => serde_json::to_value(sd).expect("serializable"),
            Err(e) => json!({ "exact": true, "error": e.to_string() }),
        },
        SpectralMode::Float(tol) => match simultaneous_diagonalize_float(&fs, &g, tol) {
            Ok(sd) => serde_json::to_value(sd).expect("serializable"),
            Err(e) => json!({ "exact": false, "error": e.to_string() }),
        },
    })
}

pub fn invariants(t: &SymmetricTriple, mode: SpectralMode) -> Result<Invariants> {
    let ric = t.ricci();
    let rsig = signature_of(ric.gram());
    let z = t.algebra().center_by_kernel();
    Ok(Invariants {
        dim_m: t.dim_m(),
        dim_h: t.dim_h(),
        signature_m: signature_of(&t.gram_m()),
        witt_index: witt_index_m(t),
        center_dim: z.dim(),
        center_in_m: center_in_m(t).is_some(),
        solvable: t.algebra().is_solvable(),
        nilpotent: t.algebra().is_nilpotent(),
        ricci_rank: rsig.0 + rsig.1,
        ricci_signature: rsig,
        level_dims: iterate_decompose(t)?.dims,
        decomposability: decomposability_json(t),
        spectrum: spectrum_json(t, mode),
    })
}

/// Whether `p` builds exactly the given triple (same basis, brackets and form).
pub fn params_describe(t: &SymmetricTriple, p: &FamilyParams) -> bool {
    let Ok(b) = p.build() else { return false };
    let (x, y) = (TripleJson::from_triple(t), TripleJson::from_triple(&b));
    serde_json::to_value(&x).ok() == serde_json::to_value(&y).ok()
}

/// `f` list of a Lorentzian triple with maximal center, read off the `F_11` spectrum.
fn lorentz_spectrum_exact(t: &SymmetricTriple) -> Result<Vector> {
    let fr = max_center_frame(t)?;
    let fs = fij_operators(t, &fr)?;
    let sd = simultaneous_diagonalize(&fs, &fr.w_gram(t))?;
    Ok(sd.records.iter().map(|r| r.eigen_f[(0, 0)].clone()).collect())
}

fn lorentz_spectrum_float(t: &SymmetricTriple, tol: f64) -> Result<Vec<f64>> {
    let fr = max_center_frame(t)?;
    let fs = fij_operators(t, &fr)?;
    let sd = simultaneous_diagonalize_float(&fs, &fr.w_gram(t), tol)?;
    Ok(sd.eigen_f.iter().map(|e| e[0][0]).collect())
}

/// `f = c f̃` up to order for some `c > 0`, within a relative tolerance.
fn float_lists_related(f: &[f64], ft: &[f64], tol: f64) -> bool {
    if f.len() != ft.len() {
        return false;
    }
    if f.is_empty() {
        return true;
    }
    let mut a = f.to_vec();
    a.sort_by(f64::total_cmp);
    for &b0 in ft {
        let c = f[0] / b0;
        if c <= 0.0 {
            continue;
        }
        let mut b: Vec<f64> = ft.iter().map(|x| c * x).collect();
        b.sort_by(f64::total_cmp);
        let scale = a.iter().map(|x| x.abs()).fold(1.0, f64::max);
        if a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol * scale) {
            return true;
        }
    }
    false
}

fn certificate_from_monomial(t1: &SymmetricTriple, t2: &SymmetricTriple, m: &crate::oracle::MonomialMap) -> IsomorphismCertificate {
    let phi = m.matrix().filter(|phi| verify_m_map(t1, t2, phi));
    let note = if phi.is_some() {
        "monomial map found by bounded search".to_string()
    } else {
        format!(
            "monomial map e_i -> sign_i sqrt(c_i) e'_perm(i) with c = [{}]",
            m.sq_scale.iter().map(crate::linalg::fmt_rational).collect::<Vec<_>>().join(", ")
        )
    };
    IsomorphismCertificate {
        permutation: m.perm.clone(),
        signs: m.signs.clone(),
        scale_or_p: ScaleOrP::Identity,
        m_map: phi,
        note: Some(note),
    }
}

/// Decides `t1 ≅ t2`.
///
/// Order: invariant mismatch, family decider when both parameter hints describe
/// their triples, Lorentzian spectra, then bounded monomial search.
pub fn triple_isomorphic(
    t1: &SymmetricTriple,
    p1: Option<&FamilyParams>,
    t2: &SymmetricTriple,
    p2: Option<&FamilyParams>,
    mode: SpectralMode,
) -> Result<Decision> {
    for (k, t) in [t1, t2].into_iter().enumerate() {
        if !t.verify().all_pass() {
            return Err(TripleError::InvalidTriple(format!("input {} fails verification", k + 1)));
        }
    }
    let (i1, i2) = (invariants(t1, SpectralMode::Exact)?, invariants(t2, SpectralMode::Exact)?);
    if i1.key() != i2.key() {
        return Ok(Decision::NotIsomorphic {
            reason: format!("invariants differ: {:?} vs {:?}", i1.key(), i2.key()),
        });
    }
    if let (Some(a), Some(b)) = (p1, p2) {
        if a.family() == b.family() && params_describe(t1, a) && params_describe(t2, b) {
            return family_isomorphic(a, b);
        }
    }
    let lorentzian = i1.signature_m.0 == 1 && i1.center_dim == 1 && i1.center_in_m && i1.solvable;
    if lorentzian && i1.dim_m >= 3 {
        match mode {
            SpectralMode::Exact => match (lorentz_spectrum_exact(t1), lorentz_spectrum_exact(t2)) {
                (Ok(f), Ok(ft)) if !f.iter().chain(&ft).any(Zero::is_zero) => {
                    return Ok(match lorentz_isomorphic(&f, &ft)? {
                        Some(mut c) => {
                            c.note = Some("decided from the F_11 spectra of adapted frames".into());
                            Decision::Isomorphic { certificate: c }
                        }
                        None => Decision::NotIsomorphic { reason: "F_11 spectra are not related by a positive scaling".into() },
                    });
                }
                (Err(TripleError::IrrationalSpectrum(s)), _) | (_, Err(TripleError::IrrationalSpectrum(s))) => {
                    return Ok(Decision::Unknown { reason: format!("irrational spectrum ({s}); use the float path") });
                }
                _ => {}
            },
            SpectralMode::Float(tol) => {
                let f = lorentz_spectrum_float(t1, tol)?;
                let ft = lorentz_spectrum_float(t2, tol)?;
                if f.iter().chain(&ft).all(|x| x.abs() > tol) {
                    return Ok(if float_lists_related(&f, &ft, tol) {
                        let s = f.len();
                        Decision::Isomorphic {
                            certificate: IsomorphismCertificate {
                                permutation: (0..s).collect(),
                                signs: vec![1; s],
                                scale_or_p: ScaleOrP::Scale { c: Rational::one() },
                                m_map: None,
                                note: Some(format!("float path: spectra {f:?} and {ft:?} agree up to scaling within {tol:e}")),
                            },
                        }
                    } else {
                        Decision::NotIsomorphic { reason: format!("float path: spectra {f:?} and {ft:?} differ beyond {tol:e}") }
                    });
                }
            }
        }
    }
    Ok(match brute_force_iso(t1, t2, &MonomialGrid::default()) {
        BruteForce::Found(m) => Decision::Isomorphic { certificate: certificate_from_monomial(t1, t2, &m) },
        BruteForce::NotFoundBounded { explored } => Decision::Unknown {
            reason: format!("no decider applies and bounded search found no map ({explored} candidates)"),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qi;
    use crate::normal_forms::{build_lorentz, build_nil22, Family};

    fn f(v: &[i64]) -> Vector {
        v.iter().map(|&x| qi(x)).collect()
    }

    #[test]
    fn lorentz_spectrum_recovers_parameters() {
        let t = build_lorentz(&f(&[1, -3])).unwrap();
        let mut s = lorentz_spectrum_exact(&t).unwrap();
        s.sort();
        assert_eq!(s, f(&[-3, 1]));
    }

    #[test]
    fn dispatcher_without_hints() {
        let a = build_lorentz(&f(&[1, 2])).unwrap();
        let b = build_lorentz(&f(&[4, 2])).unwrap();
        let c = build_lorentz(&f(&[1, 3])).unwrap();
        let d = triple_isomorphic(&a, None, &b, None, SpectralMode::Exact).unwrap();
        assert!(d.is_isomorphic());
        let d = triple_isomorphic(&a, None, &c, None, SpectralMode::Exact).unwrap();
        assert!(matches!(d, Decision::NotIsomorphic { .. }));
        let d = triple_isomorphic(&a, None, &c, None, SpectralMode::Float(1e-9)).unwrap();
        assert!(matches!(d, Decision::NotIsomorphic { .. }));
        let d = triple_isomorphic(&a, None, &b, None, SpectralMode::Float(1e-9)).unwrap();
        assert!(d.is_isomorphic());
    }

    #[test]
    fn dispatcher_uses_hints_and_invariants() {
        let p = FamilyParams::Nil22 { eps_y: qi(1) };
        let q = FamilyParams::Nil22 { eps_y: qi(-1) };
        let (a, b) = (p.build().unwrap(), q.build().unwrap());
        assert!(params_describe(&a, &p));
        assert!(!params_describe(&a, &q));
        let d = triple_isomorphic(&a, Some(&p), &b, Some(&q), SpectralMode::Exact).unwrap();
        assert!(matches!(d, Decision::NotIsomorphic { .. }));
        let e = triple_isomorphic(&a, None, &build_lorentz(&f(&[1, 2])).unwrap(), None, SpectralMode::Exact).unwrap();
        assert!(matches!(e, Decision::NotIsomorphic { .. }));
        // a wrong hint is ignored
        let d = triple_isomorphic(&a, Some(&q), &build_nil22(&qi(1)).unwrap(), None, SpectralMode::Exact).unwrap();
        assert!(d.is_isomorphic());
    }

    #[test]
    fn invariants_of_samples() {
        for fam in Family::ALL {
            let p = crate::normal_forms::sample_params(fam);
            let t = p.build().unwrap();
            let inv = invariants(&t, SpectralMode::Exact).unwrap();
            assert_eq!((inv.signature_m.0, inv.signature_m.1), p.stated_signature());
            assert!(inv.solvable);
            assert_eq!(inv.witt_index, inv.signature_m.0);
            let fl = invariants(&t, SpectralMode::Float(1e-9)).unwrap();
            assert_eq!(fl.level_dims, inv.level_dims);
        }
    }
}
