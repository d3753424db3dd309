//! The Brownian shift `B = [S_E, σ i_E; 0, e^{iθ} I_E]` on truncated
//! `H²_E ⊕ E`, its adjoint, dense realizations and power diagnostics.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::hardy::{
    include_fiber_adjoint, shift, shift_adjoint, AmbientSpec, BrownianElement, HardyElement,
};
use crate::linalg::{cis, singular_values, CMat, CVec, C64};
use crate::operator::{Basis, OperatorMatrix};

/// Agreement required between the operator norm at `N` and at `2N`.
pub const NORM_STABILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianParams {
    sigma: f64,
    theta: f64,
    ambient: AmbientSpec,
}

impl BrownianParams {
    /// `sigma` must be positive and finite; `theta` is reduced into `[0, 2π)`.
    pub fn new(sigma: f64, theta: f64, ambient: AmbientSpec) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParams(format!("sigma must be > 0, got {sigma}")));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidParams(format!("theta must be finite, got {theta}")));
        }
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        Ok(Self {
            sigma,
            theta,
            ambient,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn ambient(&self) -> AmbientSpec {
        self.ambient
    }

    /// `e^{iθ}`.
    pub fn lambda(&self) -> C64 {
        cis(self.theta)
    }

    pub fn with_ambient(&self, ambient: AmbientSpec) -> Self {
        Self { ambient, ..*self }
    }
}

/// `B(f, x) = (z f + σ x, e^{iθ} x)`, plus the norm of the coefficient lost
/// to truncation (`‖f_N‖`).
pub fn apply(params: &BrownianParams, v: &BrownianElement) -> (BrownianElement, f64) {
    let amb = v.ambient();
    let (mut zf, loss) = shift(&v.analytic);
    let d = amb.fiber_dim();
    let mut flat = zf.flat().clone();
    for j in 0..d {
        flat[j] += v.fiber[j] * params.sigma;
    }
    zf = HardyElement::from_flat(amb, flat).expect("same layout");
    let fiber = &v.fiber * params.lambda();
    (
        BrownianElement {
            analytic: zf,
            fiber,
        },
        loss,
    )
}

/// `B^*(f, x) = (S^* f, σ f(0) + e^{-iθ} x)`. Exact on the truncated space.
pub fn apply_adjoint(params: &BrownianParams, v: &BrownianElement) -> BrownianElement {
    let analytic = shift_adjoint(&v.analytic);
    let fiber = include_fiber_adjoint(&v.analytic) * C64::new(params.sigma, 0.0)
        + &v.fiber * params.lambda().conj();
    BrownianElement { analytic, fiber }
}

/// Applies `B` to a raw ambient coordinate vector.
pub fn apply_vector(params: &BrownianParams, v: &CVec) -> CVec {
    let amb = params.ambient;
    let d = amb.fiber_dim();
    let a = amb.analytic_dim();
    let mut out = CVec::zeros(amb.total_dim());
    out.rows_mut(d, a - d).copy_from(&v.rows(0, a - d));
    let lambda = params.lambda();
    for j in 0..d {
        let x = v[a + j];
        out[j] += x * params.sigma;
        out[a + j] = x * lambda;
    }
    out
}

/// Applies `B^*` to a raw ambient coordinate vector.
pub fn apply_adjoint_vector(params: &BrownianParams, v: &CVec) -> CVec {
    let amb = params.ambient;
    let d = amb.fiber_dim();
    let a = amb.analytic_dim();
    let mut out = CVec::zeros(amb.total_dim());
    out.rows_mut(0, a - d).copy_from(&v.rows(d, a - d));
    let lam_bar = params.lambda().conj();
    for j in 0..d {
        out[a + j] = v[j] * params.sigma + v[a + j] * lam_bar;
    }
    out
}

/// Dense matrix of `B` on the truncated ambient space.
pub fn as_matrix(params: &BrownianParams) -> OperatorMatrix {
    let amb = params.ambient;
    let d = amb.fiber_dim();
    let a = amb.analytic_dim();
    let mut m = CMat::zeros(amb.total_dim(), amb.total_dim());
    for i in d..a {
        m[(i, i - d)] = C64::new(1.0, 0.0);
    }
    for j in 0..d {
        m[(j, a + j)] = C64::new(params.sigma, 0.0);
        m[(a + j, a + j)] = params.lambda();
    }
    OperatorMatrix::new(
        m,
        Basis::Ambient(amb),
        Basis::Ambient(amb),
        amb.max_degree() - 1,
    )
    .expect("layout matches ambient")
}

/// Largest singular value of the truncated `B` at degree `N`, and the same at `2N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub at_degree: f64,
    pub at_double_degree: f64,
}

impl NormEstimate {
    pub fn value(&self) -> f64 {
        self.at_degree
    }

    pub fn is_stable(&self) -> bool {
        (self.at_degree - self.at_double_degree).abs() <= NORM_STABILITY_TOL * self.at_degree
    }
}

/// Operator norm by dense SVD at `N` and re-checked at `2N`.
///
/// `B^E` is unitarily equivalent to `B ⊗ I_E`, so the SVD is taken on the
/// scalar (`d = 1`) matrix at the same truncation degree.
pub fn operator_norm(params: &BrownianParams) -> Result<NormEstimate> {
    let n = params.ambient.max_degree();
    let scalar = |deg: usize| -> Result<f64> {
        let amb = AmbientSpec::new(1, deg)?;
        let m = as_matrix(&params.with_ambient(amb));
        Ok(singular_values(&m.entries)[0])
    };
    let est = NormEstimate {
        at_degree: scalar(n)?,
        at_double_degree: scalar(2 * n)?,
    };
    if !est.is_stable() {
        return Err(Error::InsufficientDegree(format!(
            "operator norm unstable under N -> 2N: {} vs {}",
            est.at_degree, est.at_double_degree
        )));
    }
    Ok(est)
}

/// `‖B^n (0, x)‖²` for `n = 0..=n_max`.
///
/// The 2-isometry structure predicts `(1 + n σ²) ‖x‖²`.
pub fn power_growth(params: &BrownianParams, x: &CVec, n_max: usize) -> Result<Vec<f64>> {
    let amb = params.ambient;
    if n_max > amb.max_degree() {
        return Err(Error::Precondition(format!(
            "n_max = {n_max} exceeds the truncation degree N = {}",
            amb.max_degree()
        )));
    }
    let mut v = BrownianElement::new(HardyElement::zero(amb), x.clone())?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(v.norm().powi(2));
    for _ in 0..n_max {
        let (next, loss) = apply(params, &v);
        debug_assert!(loss == 0.0, "power growth left the exact regime");
        v = next;
        out.push(v.norm().powi(2));
    }
    Ok(out)
}

/// Normalized power sequences of `T = B / ‖B‖` applied to `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    pub norm: f64,
    /// `‖T^{*m} v‖` for `m = 0..=m_max`.
    pub adjoint: Vec<f64>,
    /// `‖T^m v‖` for `m = 0..=m_max`.
    pub forward: Vec<f64>,
}

impl DecayProfile {
    pub fn adjoint_non_increasing(&self, slack: f64) -> bool {
        self.adjoint.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    pub fn forward_non_increasing(&self, slack: f64) -> bool {
        self.forward.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// Powers of `B/‖B‖` and of its adjoint, up to `m_max ≤ N`.
pub fn c00_decay(params: &BrownianParams, v: &BrownianElement, m_max: usize) -> Result<DecayProfile> {
    if m_max > params.ambient.max_degree() {
        return Err(Error::Precondition(format!(
            "m_max = {m_max} exceeds the truncation degree N = {}",
            params.ambient.max_degree()
        )));
    }
    let norm = operator_norm(params)?.value();
    let inv = C64::new(1.0 / norm, 0.0);
    let mut fwd = v.to_vector();
    let mut adj = fwd.clone();
    let mut forward = vec![crate::linalg::vec_norm(&fwd)];
    let mut adjoint = forward.clone();
    for _ in 0..m_max {
        fwd = apply_vector(params, &fwd) * inv;
        adj = apply_adjoint_vector(params, &adj) * inv;
        forward.push(crate::linalg::vec_norm(&fwd));
        adjoint.push(crate::linalg::vec_norm(&adj));
    }
    Ok(DecayProfile {
        norm,
        adjoint,
        forward,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn scalar(sigma: f64, theta: f64, n: usize) -> BrownianParams {
        BrownianParams::new(sigma, theta, AmbientSpec::new(1, n).unwrap()).unwrap()
    }

    #[test]
    fn params_validation() {
        let amb = AmbientSpec::new(1, 4).unwrap();
        assert!(BrownianParams::new(0.0, 0.0, amb).is_err());
        assert!(BrownianParams::new(-1.0, 0.0, amb).is_err());
        let p = BrownianParams::new(1.0, -PI / 2.0, amb).unwrap();
        assert!((p.theta() - 1.5 * PI).abs() < 1e-15);
        let p = BrownianParams::new(1.0, 2.0 * PI, amb).unwrap();
        assert!(p.theta().abs() < 1e-15);
    }

    #[test]
    fn apply_on_fiber_vector() {
        let p = scalar(1.0, 0.0, 4);
        let v = BrownianElement::new(HardyElement::zero(p.ambient()), CVec::from_vec(vec![c(1.0)])).unwrap();
        let (out, loss) = apply(&p, &v);
        assert_eq!(out.analytic, HardyElement::scalar(p.ambient(), &[c(1.0)]).unwrap());
        assert_eq!(out.fiber[0], c(1.0));
        assert_eq!(loss, 0.0);
    }

    #[test]
    fn apply_on_analytic_part_is_the_shift() {
        let p = scalar(2.0, PI, 4);
        let z = HardyElement::scalar(p.ambient(), &[c(0.0), c(1.0)]).unwrap();
        let v = BrownianElement::new(z, CVec::zeros(1)).unwrap();
        let (out, _) = apply(&p, &v);
        let z2 = HardyElement::scalar(p.ambient(), &[c(0.0), c(0.0), c(1.0)]).unwrap();
        assert_eq!(out.analytic, z2);
        assert_eq!(out.fiber[0], c(0.0));
    }

    #[test]
    fn adjoint_on_constant() {
        let p = scalar(1.0, 0.3, 4);
        let k = HardyElement::scalar(p.ambient(), &[C64::new(2.0, -1.0)]).unwrap();
        let v = BrownianElement::new(k, CVec::zeros(1)).unwrap();
        let out = apply_adjoint(&p, &v);
        assert_eq!(out.analytic.norm(), 0.0);
        assert_eq!(out.fiber[0], C64::new(2.0, -1.0));
    }

    #[test]
    fn adjoint_times_operator_on_fiber() {
        // B^*B (0, x) = (0, (1 + σ²) x)
        let amb = AmbientSpec::new(2, 5).unwrap();
        let p = BrownianParams::new(1.7, 0.9, amb).unwrap();
        let x = CVec::from_vec(vec![C64::new(0.2, 1.0), c(-0.5)]);
        let v = BrownianElement::new(HardyElement::zero(amb), x.clone()).unwrap();
        let out = apply_adjoint(&p, &apply(&p, &v).0);
        assert!(out.analytic.norm() < 1e-15);
        assert!((out.fiber - x * c(1.0 + 1.7 * 1.7)).norm() < 1e-14);
    }

    #[test]
    fn small_matrix_layout() {
        let p = scalar(0.5, PI / 2.0, 2);
        let m = as_matrix(&p).entries;
        assert_eq!(m.shape(), (4, 4));
        assert_eq!(m[(1, 0)], c(1.0));
        assert_eq!(m[(2, 1)], c(1.0));
        assert_eq!(m[(0, 3)], c(0.5));
        assert!((m[(3, 3)] - C64::new(0.0, 1.0)).norm() < 1e-15);
        let nonzero = m.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn norm_is_sqrt_one_plus_sigma_squared() {
        for sigma in [0.3, 1.0, 2.5] {
            let est = operator_norm(&scalar(sigma, 1.0, 16)).unwrap();
            assert!((est.value() - (1.0 + sigma * sigma).sqrt()).abs() < 1e-12);
            assert!(est.is_stable());
        }
    }

    #[test]
    fn power_growth_examples() {
        let p = scalar(2.0, 0.4, 8);
        let one = CVec::from_vec(vec![c(1.0)]);
        let g = power_growth(&p, &one, 3).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-14);
        assert!((g[3] - 13.0).abs() < 1e-12);
        let g = power_growth(&scalar(1.0, 0.0, 4), &one, 1).unwrap();
        assert!((g[1] - 2.0).abs() < 1e-14);
        assert!(power_growth(&p, &one, 9).is_err());
    }

    #[test]
    fn adjoint_powers_kill_polynomials() {
        let p = scalar(1.0, 0.0, 12);
        let z3 = HardyElement::monomial(p.ambient(), 3, &CVec::from_vec(vec![c(1.0)])).unwrap();
        let v = BrownianElement::new(z3, CVec::zeros(1)).unwrap();
        let prof = c00_decay(&p, &v, 12).unwrap();
        assert_eq!(prof.adjoint[0], 1.0);
        // B^{*3} (z^3, 0) = (1, 0); B^{*4} = (0, σ); afterwards only the fiber part rotates
        assert!(prof.adjoint_non_increasing(1e-15));
        assert!(prof.adjoint[12] < prof.adjoint[4]);
    }
}
