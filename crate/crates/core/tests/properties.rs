use brownian_core::brownian::{apply_adjoint_vector, apply_vector, power_growth, BrownianParams};
use brownian_core::hardy::{divide_by_zeta, AmbientSpec, HardyElement};
use brownian_core::linalg::{inner, principal_angles, vec_norm, CMat, CVec, C64};
use brownian_core::sampling::{ambient_columns, gaussian_vector, inner_spec, isometry, InnerDraw};
use brownian_core::structure::{build_reducing, converse_check, verify_reducing, ReducingCandidate};
use brownian_core::subspace::{
    build_gphi_element, build_type1, build_type2_parts, canonical_decomposition, classify,
    verify_invariance, SubspaceType,
};
use brownian_core::Tolerance;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn params(sigma: f64, theta: f64, d: usize, n: usize) -> BrownianParams {
    BrownianParams::new(sigma, theta, AmbientSpec::new(d, n).unwrap()).unwrap()
}

fn draw(d: usize, d2: usize) -> InnerDraw {
    InnerDraw {
        codomain_dim: d,
        domain_dim: d2,
        max_factors: 3,
        max_zero_modulus: 0.6,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjoint_matches_inner_products(seed in any::<u64>(), sigma in 0.1f64..3.0, theta in 0.0f64..6.3, d in 1usize..=3) {
        let p = params(sigma, theta, d, 12);
        let mut r = rng(seed);
        let cols = ambient_columns(&mut r, p.ambient(), 2, 11);
        let (u, v): (CVec, CVec) = (cols.column(0).into_owned(), cols.column(1).into_owned());
        let lhs = inner(&apply_vector(&p, &u), &v);
        let rhs = inner(&u, &apply_adjoint_vector(&p, &v));
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + vec_norm(&u) * vec_norm(&v)));
    }

    #[test]
    fn b_star_b_is_block_diagonal(seed in any::<u64>(), sigma in 0.1f64..3.0, theta in 0.0f64..6.3) {
        let p = params(sigma, theta, 2, 10);
        let mut r = rng(seed);
        let v = ambient_columns(&mut r, p.ambient(), 1, 9).column(0).into_owned();
        let w = apply_adjoint_vector(&p, &apply_vector(&p, &v));
        let mut want = v.clone();
        let a = p.ambient().analytic_dim();
        for j in 0..2 {
            want[a + j] *= C64::new(1.0 + sigma * sigma, 0.0);
        }
        prop_assert!(vec_norm(&(w - want)) < 1e-12 * vec_norm(&v) * (1.0 + sigma * sigma));
    }

    #[test]
    fn powers_grow_linearly(seed in any::<u64>(), sigma in 0.1f64..3.0, theta in 0.0f64..6.3, d in 1usize..=3) {
        let p = params(sigma, theta, d, 32);
        let x = gaussian_vector(&mut rng(seed), d);
        let seq = power_growth(&p, &x, 32).unwrap();
        let x2 = vec_norm(&x).powi(2);
        for (n, v) in seq.iter().enumerate() {
            let want = (1.0 + n as f64 * sigma * sigma) * x2;
            prop_assert!((v - want).abs() <= 1e-10 * want);
        }
    }

    #[test]
    fn division_inverts_multiplication(seed in any::<u64>(), theta in 0.0f64..6.3, deg in 1usize..20) {
        let amb = AmbientSpec::new(2, 24).unwrap();
        let mut r = rng(seed);
        let q: Vec<Vec<C64>> = (0..deg).map(|_| gaussian_vector(&mut r, 2).iter().copied().collect()).collect();
        let q = HardyElement::from_coeffs(amb, &q).unwrap();
        let (zq, _) = brownian_core::hardy::shift(&q);
        let lambda = C64::from_polar(1.0, theta);
        let h = &zq - &q.scale(lambda);
        let div = divide_by_zeta(&h, theta);
        prop_assert!((&div.quotient - &q).norm() < 1e-12 * (1.0 + q.norm()));
        prop_assert!(!div.is_flagged(1e-9));
    }

    #[test]
    fn gphi_is_linear_and_satisfies_identities(seed in any::<u64>(), sigma in 0.2f64..2.5, theta in 0.0f64..6.3) {
        let mut r = rng(seed);
        let spec = inner_spec(&mut r, draw(2, 2));
        let p = params(sigma, theta, 2, 96);
        let x1 = gaussian_vector(&mut r, 2);
        let x2 = gaussian_vector(&mut r, 2);
        let c = C64::new(0.3, -1.1);
        let e1 = build_gphi_element(&spec, &p, &x1).unwrap();
        let e2 = build_gphi_element(&spec, &p, &x2).unwrap();
        let e12 = build_gphi_element(&spec, &p, &(&x1 + &x2 * c)).unwrap();
        let combo = e1.to_vector() + e2.to_vector() * c;
        prop_assert!(vec_norm(&(combo - e12.to_vector())) < 1e-10 * (1.0 + vec_norm(&e12.to_vector())));
        for e in [&e1, &e2] {
            prop_assert!(e.norm_gap(&p) < 1e-10 * vec_norm(&e.x));
            prop_assert!(e.boundary_residual(&spec, &p).unwrap() < 1e-10 * vec_norm(&e.x));
            prop_assert!(e.identity_residual(&spec, &p).unwrap() < 1e-9);
            prop_assert!(e.model_space_defect(&spec).unwrap() < 1e-9);
        }
    }

    #[test]
    fn type1_sweep_is_invariant(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let d2 = if d == 1 { 1 } else { 1 + (seed as usize % d) };
        let spec = inner_spec(&mut r, draw(d, d2));
        let p = params(1.0, 0.4, d, 96);
        let tol = Tolerance::for_ambient(&p.ambient());
        let m = build_type1(&spec, p.ambient()).unwrap();
        let cls = classify(&m, &p, tol).unwrap();
        prop_assert_eq!(cls.kind, SubspaceType::TypeI);
    }

    #[test]
    fn type2_round_trip(seed in any::<u64>(), sigma in 0.3f64..2.0, theta in 0.0f64..6.3) {
        let mut r = rng(seed);
        let spec = inner_spec(&mut r, draw(2, 2));
        let p = params(sigma, theta, 2, 96);
        let tol = Tolerance::for_ambient(&p.ambient());
        let x = isometry(&mut r, 2, 1);
        let parts = build_type2_parts(&spec, &p, &x).unwrap();
        prop_assert_eq!(classify(&parts.basis, &p, tol).unwrap().kind, SubspaceType::TypeII);
        prop_assert!(verify_invariance(&parts.basis, &p).unwrap().max_residual < tol.value());
        let dec = canonical_decomposition(&parts.basis, &p, Some(&spec), tol).unwrap();
        prop_assert_eq!(dec.defect.dim(), 1);
        let want = CMat::from_columns(&[parts.elements[0].to_vector()]);
        prop_assert!(principal_angles(dec.defect.columns(), &want)[0] < 1e-7);
        prop_assert!(principal_angles(dec.m0.columns(), parts.type1.columns()).into_iter().fold(0.0, f64::max) < 1e-7);
    }

    #[test]
    fn product_subspaces_reduce(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let rank = 1 + seed as usize % d;
        let g = ReducingCandidate::new(&isometry(&mut r, d, rank));
        let p = params(0.8, 2.0, d, 20);
        let m = build_reducing(&g, p.ambient()).unwrap();
        prop_assert!(verify_reducing(&m, &p).unwrap().is_reducing(Tolerance::for_ambient(&p.ambient())));
        prop_assert!(converse_check(&m).unwrap().max_angle < 1e-7);
    }
}
