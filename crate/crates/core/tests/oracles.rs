//! Independent closed forms checked against the library.

use brownian_core::brownian::BrownianParams;
use brownian_core::equivalence::{decide_scalar_type2, Reason};
use brownian_core::hardy::{divide_by_zeta, AmbientSpec, HardyElement};
use brownian_core::inner::InnerSpec;
use brownian_core::linalg::{CVec, C64};
use brownian_core::subspace::build_gphi_element;
use brownian_core::Tolerance;

/// Synthetic division of `p` by `z - w`; returns the quotient and remainder.
fn synthetic_division(p: &[C64], w: C64) -> (Vec<C64>, C64) {
    let n = p.len();
    let mut q = vec![C64::new(0.0, 0.0); n - 1];
    let mut acc = C64::new(0.0, 0.0);
    for k in (1..n).rev() {
        acc = p[k] + w * acc;
        q[k - 1] = acc;
    }
    (q, p[0] + w * acc)
}

#[test]
fn division_matches_synthetic_division() {
    let amb = AmbientSpec::new(1, 20).unwrap();
    for (theta, roots) in [(0.0, 3usize), (1.3, 5), (4.0, 7)] {
        let w = C64::from_polar(1.0, theta);
        // (z - w) ∏ (z - r_i) with r_i inside the disc
        let mut p = vec![-w, C64::new(1.0, 0.0)];
        for i in 0..roots {
            let r = C64::from_polar(0.3 + 0.05 * i as f64, i as f64);
            let mut next = vec![C64::new(0.0, 0.0); p.len() + 1];
            for (k, c) in p.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            p = next;
        }
        let (q, rem) = synthetic_division(&p, w);
        assert!(rem.norm() < 1e-12);
        let h = HardyElement::scalar(amb, &p).unwrap();
        let div = divide_by_zeta(&h, theta);
        for (k, c) in q.iter().enumerate() {
            assert!((div.quotient.coeff(k)[0] - c).norm() < 1e-12);
        }
    }
}

#[test]
fn monomial_g_closed_form_any_angle() {
    for (k, sigma, theta) in [(1usize, 1.0, 0.0), (2, 0.5, 0.0), (3, 2.0, 2.1), (4, 1.3, 5.5)] {
        let p = BrownianParams::new(sigma, theta, AmbientSpec::new(1, 32).unwrap()).unwrap();
        let w = C64::from_polar(1.0, theta);
        // x = σ conj(w)^k gives y = 1 and g = σ conj(w)^k Σ_j w^{k-1-j} z^j
        let scale = w.conj().powu(k as u32) * sigma;
        let x = CVec::from_element(1, scale);
        let e = build_gphi_element(&InnerSpec::monomial(k), &p, &x).unwrap();
        assert!((e.y[0] - C64::new(1.0, 0.0)).norm() < 1e-13);
        for j in 0..=32 {
            let want = if j < k { scale * w.powu((k - 1 - j) as u32) } else { C64::new(0.0, 0.0) };
            assert!((e.g.coeff(j)[0] - want).norm() < 1e-12, "k={k} j={j}");
        }
    }
}

#[test]
fn blaschke_taylor_closed_form() {
    let a = C64::new(0.3, -0.4);
    let spec = InnerSpec::scalar_blaschke(&[a]).unwrap();
    let t = spec.taylor(40);
    let s = 1.0 - a.norm_sqr();
    assert!((t.coeffs[0][(0, 0)] + a).norm() < 1e-15);
    for n in 1..=40 {
        let want = a.conj().powu(n as u32 - 1) * s;
        assert!((t.coeffs[n][(0, 0)] - want).norm() < 1e-15);
    }
}

#[test]
fn scalar_criterion_grid_matches_arithmetic() {
    let n = 64;
    let amb = AmbientSpec::new(1, n).unwrap();
    let tol = Tolerance::for_ambient(&amb);
    let s1 = 1.0;
    for k1 in 1..=3usize {
        for k2 in 1..=3usize {
            let denom = 1.0 + (k1 as f64 - k2 as f64) * s1 * s1;
            if denom <= 0.0 {
                continue;
            }
            let s2 = (s1 * s1 / denom).sqrt();
            let p1 = BrownianParams::new(s1, 0.0, amb).unwrap();
            let v = decide_scalar_type2(
                &p1,
                &InnerSpec::monomial(k1),
                &BrownianParams::new(s2, 0.0, amb).unwrap(),
                &InnerSpec::monomial(k2),
                tol,
            )
            .unwrap();
            assert!(v.equivalent, "k1={k1} k2={k2}");
            let off = decide_scalar_type2(
                &p1,
                &InnerSpec::monomial(k1),
                &BrownianParams::new(s2 * 1.01, 0.0, amb).unwrap(),
                &InnerSpec::monomial(k2),
                tol,
            )
            .unwrap();
            assert_eq!(off.reason, Reason::ScalarCriterionFailed);
        }
    }
}
