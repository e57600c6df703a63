use cstar_orth::algebra::{characters, AlgebraElement, AlgebraShape};
use cstar_orth::forms::{
    factorize_pair, is_bounded_estimate, Factorization, FactorizeOptions, MultiForm,
};
use cstar_orth::module::{
    polarization_gram, AModuleMap, CLinearMap, ModuleMap, ModuleVector, ToleranceConfig,
};
use cstar_orth::orthogonality::{
    bj_orthogonal_minimize, bj_orthogonal_witness, condition_value, decide, ip_orthogonal,
    Relation, SearchOptions, Witness,
};
use cstar_orth::sampling::{bj_pair, generic_pair, orthogonal_pair, trial_rng};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const SHAPES: &[&[usize]] = &[&[1], &[2], &[1, 1], &[3], &[2, 1]];
const ABELIAN: &[&[usize]] = &[&[1], &[1, 1], &[1, 1, 1]];

fn shape(dims: &[usize]) -> AlgebraShape {
    AlgebraShape::new(dims.to_vec()).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    trial_rng(seed, 0xFE, 0)
}

fn pair(s: &AlgebraShape, k: usize, kind: u8, r: &mut ChaCha8Rng) -> (ModuleVector, ModuleVector) {
    match kind % 3 {
        0 => orthogonal_pair(s, k, r),
        1 => generic_pair(s, k, r),
        _ => bj_pair(s, k, r),
    }
}

fn shape_strategy(set: &'static [&'static [usize]]) -> impl Strategy<Value = AlgebraShape> {
    (0..set.len()).prop_map(move |i| shape(set[i]))
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn c_star_identity(s in shape_strategy(SHAPES), seed in any::<u64>()) {
        let a = AlgebraElement::random(&s, &mut rng(seed));
        let n = a.norm();
        prop_assert!(((&a.adjoint() * &a).norm() - n * n).abs() <= 1e-9 * (1.0 + n * n));
    }

    #[test]
    fn square_root_of_square(s in shape_strategy(SHAPES), seed in any::<u64>()) {
        let a = AlgebraElement::random(&s, &mut rng(seed));
        let p = &a.adjoint() * &a;
        let back = (&p * &p).sqrt_positive(1e-9).unwrap();
        prop_assert!((&back - &p).norm() <= 1e-8 * (1.0 + p.norm()));
    }

    #[test]
    fn abelian_sup_norm_is_attained_by_a_character(s in shape_strategy(ABELIAN), seed in any::<u64>()) {
        let a = AlgebraElement::random(&s, &mut rng(seed));
        let chars = characters(&s).unwrap();
        let sup = chars.evaluate_all(&a).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((sup - a.norm()).abs() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn inner_product_axioms(s in shape_strategy(SHAPES), k in 1usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y, z) = (ModuleVector::random(&s, k, &mut r), ModuleVector::random(&s, k, &mut r), ModuleVector::random(&s, k, &mut r));
        let a = AlgebraElement::random(&s, &mut r);
        let alpha = Complex64::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let tol = 1e-9 * (1.0 + x.norm() * (y.norm() + z.norm())) * (1.0 + a.norm() + alpha.norm());
        let lhs = x.inner_product(&y.axpy(alpha, &z).unwrap()).unwrap();
        let rhs = &x.inner_product(&y).unwrap() + &x.inner_product(&z).unwrap().scale(alpha);
        prop_assert!((&lhs - &rhs).norm() <= tol);
        let lhs = x.inner_product(&y.right_action(&a).unwrap()).unwrap();
        prop_assert!((&lhs - &(&x.inner_product(&y).unwrap() * &a)).norm() <= tol);
        let swapped = y.inner_product(&x).unwrap().adjoint();
        prop_assert!((&swapped - &x.inner_product(&y).unwrap()).norm() <= tol);
        prop_assert!(x.squared_modulus().min_eigenvalue() >= -1e-12 * (1.0 + x.norm() * x.norm()));
        prop_assert!(x.right_action(&a).unwrap().norm() <= x.norm() * a.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn pythagorean_expansion(s in shape_strategy(SHAPES), k in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y) = orthogonal_pair(&s, k, &mut r);
        let a = AlgebraElement::random(&s, &mut r);
        let xa = x.right_action(&a).unwrap();
        let lhs = &xa.try_add(&y).unwrap().squared_modulus() - &(&xa.squared_modulus() + &y.squared_modulus());
        prop_assert!(lhs.norm() <= 1e-9 * (1.0 + xa.norm() * y.norm()));
    }

    #[test]
    fn polarization_is_sesquilinear(s in shape_strategy(SHAPES), k in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = CLinearMap::random(&s, k, k, &mut r);
        let (x, y, z) = (ModuleVector::random(&s, k, &mut r), ModuleVector::random(&s, k, &mut r), ModuleVector::random(&s, k, &mut r));
        let alpha = Complex64::new(0.7, -1.3);
        let direct = t.apply(&x).unwrap().inner_product(&t.apply(&y).unwrap()).unwrap();
        let polar = polarization_gram(&t, &x, &y).unwrap();
        let scale = 1.0 + t.apply(&x).unwrap().norm() * (t.apply(&y).unwrap().norm() + t.apply(&z).unwrap().norm());
        prop_assert!((&direct - &polar).norm() <= 1e-9 * scale * 3.0);
        let lin = polarization_gram(&t, &x, &y.axpy(alpha, &z).unwrap()).unwrap();
        let expected = &polar + &polarization_gram(&t, &x, &z).unwrap().scale(alpha);
        prop_assert!((&lin - &expected).norm() <= 1e-9 * scale * 3.0);
        let conj = polarization_gram(&t, &x.scale(alpha), &y).unwrap();
        prop_assert!((&conj - &polar.scale(alpha.conj())).norm() <= 1e-9 * scale * 3.0);
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn inner_product_orthogonality_is_symmetric(s in shape_strategy(SHAPES), k in 1usize..=2, kind in any::<u8>(), seed in any::<u64>()) {
        let tol = ToleranceConfig::default();
        let (x, y) = pair(&s, k, kind, &mut rng(seed));
        prop_assert_eq!(ip_orthogonal(&x, &y, &tol).unwrap().holds, ip_orthogonal(&y, &x, &tol).unwrap().holds);
    }

    #[test]
    fn implication_chain(s in shape_strategy(SHAPES), k in 1usize..=2, kind in any::<u8>(), seed in any::<u64>()) {
        let tol = ToleranceConfig::default();
        let opts = SearchOptions { seed, ..SearchOptions::default() };
        let (x, y) = pair(&s, k, kind, &mut rng(seed));
        let ip = ip_orthogonal(&x, &y, &tol).unwrap().holds;
        let sbj = decide(Relation::StrongBirkhoffJames, &x, &y, &tol, &opts).unwrap().holds;
        let bj = bj_orthogonal_minimize(&x, &y, &tol).unwrap().holds;
        prop_assert!(!ip || sbj, "ip without strong BJ");
        prop_assert!(!sbj || bj, "strong BJ without BJ");
    }

    #[test]
    fn reversed_families_agree_with_inner_product(s in shape_strategy(SHAPES), k in 1usize..=2, kind in any::<u8>(), seed in any::<u64>()) {
        let tol = ToleranceConfig::default();
        let opts = SearchOptions { seed, ..SearchOptions::default() };
        let (x, y) = pair(&s, k, kind, &mut rng(seed));
        let ip = ip_orthogonal(&x, &y, &tol).unwrap().holds;
        for relation in [Relation::SquaredModulus, Relation::Modulus, Relation::ReversedAction] {
            prop_assert_eq!(decide(relation, &x, &y, &tol, &opts).unwrap().holds, ip, "{:?}", relation);
        }
    }

    #[test]
    fn element_witnesses_reevaluate_to_violations(s in shape_strategy(SHAPES), k in 1usize..=2, seed in any::<u64>()) {
        let tol = ToleranceConfig::default();
        let opts = SearchOptions { seed, ..SearchOptions::default() };
        let (x, y) = generic_pair(&s, k, &mut rng(seed));
        for relation in [Relation::SquaredModulus, Relation::Modulus, Relation::ReversedAction, Relation::StrongBirkhoffJames] {
            let v = decide(relation, &x, &y, &tol, &opts).unwrap();
            if let (false, Some(Witness::Element { a })) = (v.holds, &v.witness) {
                let again = condition_value(relation, &x, &y, a).unwrap();
                prop_assert!((again - v.margin).abs() <= 2.0 * tol.opt_tol * (1.0 + v.margin.abs()), "{:?}: {} vs {}", relation, again, v.margin);
                prop_assert!(again < -v.tolerance);
            }
        }
    }

    #[test]
    fn bj_procedures_agree(s in shape_strategy(SHAPES), k in 1usize..=2, kind in any::<u8>(), seed in any::<u64>()) {
        let tol = ToleranceConfig::default();
        let opts = SearchOptions { seed, ..SearchOptions::default() };
        let (x, y) = pair(&s, k, kind, &mut rng(seed));
        prop_assume!(x.norm() > 0.0);
        let m = bj_orthogonal_minimize(&x, &y, &tol).unwrap();
        let w = bj_orthogonal_witness(&x, &y, &tol, &opts).unwrap();
        prop_assert_eq!(m.holds, w.holds);
    }

    #[test]
    fn factorization_round_trip(s in shape_strategy(ABELIAN), k in 1usize..=2, n in 1usize..=3, seed in any::<u64>()) {
        let tol = ToleranceConfig::default();
        let mut r = rng(seed);
        let e = MultiForm::gram(&s, k);
        let e = if n == 2 { e } else { MultiForm::random(&s, k, n, &mut r).unwrap() };
        let c = AlgebraElement::random(&s, &mut r);
        let f = e.left_multiply(&c).unwrap();
        match factorize_pair(&e, &f, &tol, &FactorizeOptions::with_seed(seed)) {
            Ok(Factorization::Factorized(res)) => {
                prop_assert!((&res.c - &c).norm() <= 1e-8 * (1.0 + c.norm()));
                prop_assert!(res.h_variation <= 1e-8);
                let (me, mf) = (is_bounded_estimate(&e, 50, seed), is_bounded_estimate(&f, 50, seed));
                prop_assert!(mf <= c.norm() * me * (1.0 + 1e-6));
            }
            Ok(Factorization::PreservationViolated(v)) => prop_assert!(false, "violation {:?}", v.residual),
            Err(err) => prop_assert!(matches!(err, cstar_orth::Error::NotStrong { .. }), "{err}"),
        }
    }

    #[test]
    fn unitary_maps_preserve_the_gram(s in shape_strategy(SHAPES), k in 1usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = AModuleMap::random_unitary(&s, k, &mut r);
        let (x, y) = (ModuleVector::random(&s, k, &mut r), ModuleVector::random(&s, k, &mut r));
        let lhs = u.apply(&x).unwrap().inner_product(&u.apply(&y).unwrap()).unwrap();
        prop_assert!((&lhs - &x.inner_product(&y).unwrap()).norm() <= 1e-10 * (1.0 + x.norm() * y.norm()));
    }
}
