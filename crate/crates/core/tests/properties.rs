//! Property tests over randomized exact inputs.

use num_traits::Zero;
use proptest::prelude::*;
use rand::{rngs::StdRng, SeedableRng};
use triplekit_core::classification::{
    extract_coefficients, fij_operators, lorentz_isomorphic, max_center_frame, simultaneous_diagonalize, split_w,
    standard_frame, verify_m_map,
};
use triplekit_core::geometry::{group_multiply, GroupElement};
use triplekit_core::json::{document_from_json, document_to_json};
use triplekit_core::lie::MetricLieAlgebra;
use triplekit_core::linalg::{orthogonal_complement, q, qi, radical, signature_of, BilinearForm, Matrix, Rational, Subspace, Vector};
use triplekit_core::normal_forms::{coefficient_relations_check, random_params, Family, FamilyParams};
use triplekit_core::oracle::{jacobi_verdict, random_symmetric_coefficients};
use triplekit_core::triple::{ricci_matches_killing, Decomposability, SymmetricTriple};
use triplekit_core::witt::iterate_decompose;

fn rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rational> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn square(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(rat(), n * n).prop_map(move |v| Matrix::from_rows(v.chunks(n).map(<[_]>::to_vec).collect()))
}

fn symmetric(n: usize) -> impl Strategy<Value = Matrix> {
    square(n).prop_map(|m| {
        let t = m.transpose();
        let mut s = Matrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                s[(i, j)] = &m[(i, j)] + &t[(i, j)];
            }
        }
        s
    })
}

fn family_triple() -> impl Strategy<Value = (FamilyParams, SymmetricTriple)> {
    (0..Family::ALL.len(), any::<u64>()).prop_map(|(k, seed)| {
        let p = random_params(Family::ALL[k], &mut StdRng::seed_from_u64(seed));
        let t = p.build().expect("admissible draw builds");
        (p, t)
    })
}

fn lorentz_f() -> impl Strategy<Value = Vector> {
    prop::collection::vec(nonzero_rat(), 1..=4)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn signature_is_congruence_invariant((g, p) in (1usize..=5).prop_flat_map(|n| (symmetric(n), square(n)))) {
        prop_assume!(!p.determinant().is_zero());
        let pg = p.transpose().mul(&g).mul(&p);
        prop_assert_eq!(signature_of(&pg), signature_of(&g));
    }

    #[test]
    fn complement_dimension_formula(g in symmetric(4), vs in prop::collection::vec(prop::collection::vec(rat(), 4), 0..=4)) {
        let b = BilinearForm::new(g).unwrap();
        let s = Subspace::span(4, &vs);
        let perp = orthogonal_complement(&s, &b).unwrap();
        let meet = s.intersect(&radical(&b)).unwrap();
        prop_assert_eq!(s.dim() + perp.dim(), 4 + meet.dim());
        if b.is_nondegenerate() {
            prop_assert_eq!(orthogonal_complement(&perp, &b).unwrap(), s);
        }
    }

    #[test]
    fn quotient_basis_completes(vs in prop::collection::vec(prop::collection::vec(rat(), 5), 0..=5), k in 0usize..=5) {
        let outer = Subspace::span(5, &vs);
        let inner = Subspace::span(5, &outer.basis()[..k.min(outer.dim())]);
        let extra = outer.quotient_basis(&inner).unwrap();
        let mut all = inner.basis().to_vec();
        all.extend(extra.iter().cloned());
        prop_assert_eq!(Subspace::span(5, &all).dim(), all.len());
        prop_assert_eq!(Subspace::span(5, &all), outer);
    }

    #[test]
    fn group_law_on_nilpotent_part(
        (f, v) in lorentz_f().prop_flat_map(|f| { let n = 3 * (2 * f.len() + 1); (Just(f), prop::collection::vec(rat(), n)) }),
    ) {
        let s = f.len();
        let elt = |k: usize| {
            let v = &v[k * (2 * s + 1)..(k + 1) * (2 * s + 1)];
            GroupElement { x: v[..s].to_vec(), w: v[s..2 * s].to_vec(), z: v[2 * s].clone(), zstar: Rational::zero() }
        };
        let (a, b, c) = (elt(0), elt(1), elt(2));
        let mul = |x: &GroupElement, y: &GroupElement| group_multiply(x, y, &f).unwrap().exact().unwrap().clone();
        prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
        prop_assert_eq!(mul(&a, &a.inverse().unwrap()), GroupElement::identity(s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, ..ProptestConfig::default() })]

    #[test]
    fn constructed_triples_are_consistent((p, t) in family_triple()) {
        let metric = MetricLieAlgebra::new(t.algebra().clone(), t.form().clone()).unwrap();
        prop_assert!(t.algebra().check_jacobi().is_empty(), "{:?}", p);
        prop_assert!(metric.check_ad_invariance().is_empty(), "{:?}", p);
        // center equals [g,g]^⊥ and is nonzero for solvable g
        let z = metric.center().unwrap();
        prop_assert!(!z.is_zero());
        let r = t.curvature();
        prop_assert!(r.symmetry_violations().is_empty());
        prop_assert!(ricci_matches_killing(&t));
        let k = t.algebra().killing_form();
        prop_assert!(k.gram().is_symmetric());
        for i in 0..t.dim() {
            let ad = t.algebra().ad_basis(i);
            let lhs = ad.transpose().mul(k.gram());
            let rhs = k.gram().mul(&ad);
            prop_assert!(negatives(&lhs, &rhs));
        }
    }

    #[test]
    fn json_round_trip((p, t) in family_triple()) {
        let s = document_to_json(&t, Some(&p));
        let (t2, p2) = document_from_json(&s).unwrap();
        prop_assert_eq!(p2.as_ref(), Some(&p));
        prop_assert_eq!(document_to_json(&t2, p2.as_ref()), s);
    }

    #[test]
    fn abelian_part_of_iterated_decomposition((p, t) in family_triple()) {
        let it = iterate_decompose(&t).unwrap();
        let mut span: Vec<Vector> = it.final_w().to_vec();
        for l in &it.levels {
            span.extend(l.e.iter().cloned());
            span.extend(l.u.iter().cloned());
        }
        for x in &span {
            for y in &span {
                prop_assert!(t.bracket_m_vectors(x, y).iter().all(Zero::is_zero), "{:?}", p);
            }
        }
    }
}

/// `a + b == 0`
fn negatives(a: &Matrix, b: &Matrix) -> bool {
    a.entries().iter().zip(b.entries()).all(|(x, y)| (x + y).is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn direct_sum_verifies_and_splits((_, a) in family_triple(), (_, b) in family_triple()) {
        prop_assume!(a.dim() + b.dim() <= 20);
        let s = a.direct_sum(&b);
        prop_assert!(s.verify().all_pass());
        prop_assert!(!matches!(s.decomposability(), Decomposability::Indecomposable(_)));
    }

    #[test]
    fn coefficients_round_trip(seed in any::<u64>(), q_ in 2usize..=4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = random_symmetric_coefficients(2, q_, &mut rng);
        prop_assume!(coefficient_relations_check(&c).ok() && jacobi_verdict(&c).0);
        let t = c.build().unwrap();
        prop_assume!(t.verify().all_pass());
        // larger centers are not maximal-center triples
        prop_assume!(t.algebra().center_by_kernel().dim() == 2);
        let fr = standard_frame(&t, 2).unwrap();
        prop_assert_eq!(extract_coefficients(&t, &fr).unwrap(), c);
    }

    #[test]
    fn w_nil_bound((p, t) in family_triple()) {
        let Ok(fr) = max_center_frame(&t) else { return Ok(()) };
        prop_assume!(matches!(t.decomposability(), Decomposability::Indecomposable(_)));
        let fs = fij_operators(&t, &fr).unwrap();
        let sd = simultaneous_diagonalize(&fs, &fr.w_gram(&t));
        prop_assume!(sd.is_ok());
        let (nil, _) = split_w(&sd.unwrap().records);
        let pp = fr.p();
        prop_assert!(nil.len() <= pp * pp * (pp - 1) / 2, "{:?}: dim W_nil = {}", p, nil.len());
    }

    #[test]
    fn lorentz_decider_is_an_equivalence(fs in prop::collection::vec(prop::collection::vec(prop_oneof![Just(-2i64), Just(-1), Just(1), Just(2), Just(4)], 2), 3..6)) {
        let lists: Vec<Vector> = fs.iter().map(|v| v.iter().map(|&x| qi(x)).collect()).collect();
        let rel = |a: &Vector, b: &Vector| lorentz_isomorphic(a, b).unwrap().is_some();
        for a in &lists {
            prop_assert!(rel(a, a));
            for b in &lists {
                prop_assert_eq!(rel(a, b), rel(b, a));
                for c in &lists {
                    if rel(a, b) && rel(b, c) {
                        prop_assert!(rel(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn lorentz_certificates_are_sound(f in lorentz_f(), c in 1i64..=4, rot in 0usize..4) {
        // c² keeps the Z* scale rational, so the certificate carries an explicit map
        let mut g: Vector = f.iter().map(|x| x * qi(c * c)).collect();
        let k = rot % g.len();
        g.rotate_left(k);
        let cert = lorentz_isomorphic(&f, &g).unwrap().expect("scaled permutation is isomorphic");
        let (t1, t2) = (
            triplekit_core::normal_forms::build_lorentz(&f).unwrap(),
            triplekit_core::normal_forms::build_lorentz(&g).unwrap(),
        );
        if let Some(m) = &cert.m_map {
            prop_assert!(verify_m_map(&t1, &t2, m));
        }
    }
}
