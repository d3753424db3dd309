//! Rational inner functions: finite Blaschke and Blaschke-Potapov products
//! composed with a constant isometry.
//!
//! `Φ(z) = B_1(z) ⋯ B_m(z) V` where `V: C^{d₂} → C^d` is an isometry and each
//! factor is either `b_a(z) I` or `B_{a,P}(z) = I - P + b_a(z) P` with
//! `b_a(z) = (z - a) / (1 - ā z)` and `P` an orthogonal projection on `C^d`.
//! Every moving factor is square and unitary on the circle, so `Φ(w)` is an
//! isometry for `|w| = 1`.

use crate::error::{Error, Result};
use crate::hardy::{AmbientSpec, HardyElement};
use crate::linalg::{max_abs, orthonormality_defect, CMat, C64, ONE};
use crate::operator::{Basis, OperatorMatrix};

const STRUCTURE_TOL: f64 = 1e-10;

/// Threshold below which a Taylor coefficient block is treated as negligible
/// when choosing an effective degree.
pub const TAIL_EPS: f64 = 1e-14;

/// Cap on the internal oversampling degree.
const MAX_OVERSAMPLE: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    /// `b_a(z) I`.
    Scalar { zero: C64 },
    /// `I - P + b_a(z) P`.
    Potapov { zero: C64, projection: CMat },
}

impl Factor {
    pub fn zero(&self) -> C64 {
        match self {
            Factor::Scalar { zero } | Factor::Potapov { zero, .. } => *zero,
        }
    }

    fn evaluate(&self, w: C64, d: usize) -> CMat {
        let a = self.zero();
        let b = (w - a) / (ONE - a.conj() * w);
        match self {
            Factor::Scalar { .. } => CMat::identity(d, d) * b,
            Factor::Potapov { projection, .. } => {
                CMat::identity(d, d) - projection + projection * b
            }
        }
    }

    fn projection(&self, d: usize) -> CMat {
        match self {
            Factor::Scalar { .. } => CMat::identity(d, d),
            Factor::Potapov { projection, .. } => projection.clone(),
        }
    }
}

/// Symbolic description of a rational inner function `Φ: C^{d₂} → C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSpec {
    constant: CMat,
    factors: Vec<Factor>,
}

impl InnerSpec {
    /// Validates and builds a spec. `constant` is the `d × d₂` isometric factor
    /// (applied rightmost); factors are applied in list order from the left.
    pub fn new(constant: CMat, factors: Vec<Factor>) -> Result<Self> {
        let d = constant.nrows();
        let d2 = constant.ncols();
        if d == 0 || d2 == 0 || d2 > d {
            return Err(Error::InvalidInner(format!(
                "constant factor must be d x d2 with 1 <= d2 <= d, got {d} x {d2}"
            )));
        }
        let defect = orthonormality_defect(&constant);
        if defect > STRUCTURE_TOL {
            return Err(Error::InvalidInner(format!(
                "constant factor is not isometric (defect {defect:e})"
            )));
        }
        for (i, f) in factors.iter().enumerate() {
            let a = f.zero();
            if !(a.norm() < 1.0) {
                return Err(Error::InvalidInner(format!(
                    "factor {i}: zero |a| = {} is not inside the unit disc",
                    a.norm()
                )));
            }
            if let Factor::Potapov { projection, .. } = f {
                if projection.nrows() != d || projection.ncols() != d {
                    return Err(Error::InvalidInner(format!(
                        "factor {i}: projection must be {d} x {d}"
                    )));
                }
                let herm = max_abs(&(projection - projection.adjoint()));
                let idem = max_abs(&(projection * projection - projection));
                if herm > STRUCTURE_TOL || idem > STRUCTURE_TOL {
                    return Err(Error::InvalidInner(format!(
                        "factor {i}: not an orthogonal projection (hermitian defect {herm:e}, idempotent defect {idem:e})"
                    )));
                }
            }
        }
        Ok(Self { constant, factors })
    }

    /// The constant inner function `V`.
    pub fn constant(v: CMat) -> Result<Self> {
        Self::new(v, Vec::new())
    }

    /// Scalar finite Blaschke product with the given zeros.
    pub fn scalar_blaschke(zeros: &[C64]) -> Result<Self> {
        Self::new(
            CMat::identity(1, 1),
            zeros.iter().map(|&zero| Factor::Scalar { zero }).collect(),
        )
    }

    /// `z^k` (scalar).
    pub fn monomial(k: usize) -> Self {
        Self::scalar_blaschke(&vec![C64::new(0.0, 0.0); k]).expect("zeros at the origin are valid")
    }

    pub fn codomain_dim(&self) -> usize {
        self.constant.nrows()
    }

    pub fn domain_dim(&self) -> usize {
        self.constant.ncols()
    }

    pub fn constant_factor(&self) -> &CMat {
        &self.constant
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_scalar(&self) -> bool {
        self.codomain_dim() == 1 && self.domain_dim() == 1
    }

    /// `Φ(w)` for `|w| ≤ 1`.
    pub fn evaluate(&self, w: C64) -> Result<CMat> {
        if w.norm() > 1.0 + 1e-12 {
            return Err(Error::OutsideDisc(w.norm()));
        }
        let d = self.codomain_dim();
        let mut acc = CMat::identity(d, d);
        for f in &self.factors {
            acc *= f.evaluate(w, d);
        }
        Ok(acc * &self.constant)
    }

    /// Taylor coefficients `Φ_0, …, Φ_N`.
    ///
    /// Each factor is `T_0 = I - P - aP`, `T_k = ā^{k-1}(1 - |a|²) P`; the product
    /// is accumulated by truncated convolution, which is exact in every stored
    /// degree. The geometric structure of each factor turns the convolution into
    /// a running sum, so the cost is linear in `N`.
    pub fn taylor(&self, max_degree: usize) -> TaylorTable {
        let d = self.codomain_dim();
        let len = max_degree + 1;
        let mut acc: Vec<CMat> = (0..len)
            .map(|n| if n == 0 { CMat::identity(d, d) } else { CMat::zeros(d, d) })
            .collect();
        for f in &self.factors {
            let a = f.zero();
            let p = f.projection(d);
            let t0 = CMat::identity(d, d) - &p - &p * a;
            let weight = C64::new(1.0 - a.norm_sqr(), 0.0);
            let mut running = CMat::zeros(d, d);
            let mut next = Vec::with_capacity(len);
            for n in 0..len {
                if n > 0 {
                    running = &acc[n - 1] + &running * a.conj();
                }
                next.push(&acc[n] * &t0 + &running * &p * weight);
            }
            acc = next;
        }
        let coeffs: Vec<CMat> = acc.into_iter().map(|m| m * &self.constant).collect();
        TaylorTable::from_coeffs(coeffs)
    }

    /// Taylor table extended past `min_degree` until the trailing coefficients
    /// are negligible (below `1e-18`), so that sums over the table capture the
    /// full function to double precision.
    pub fn oversampled_taylor(&self, min_degree: usize) -> Result<TaylorTable> {
        let mut degree = (2 * min_degree).max(64);
        loop {
            let table = self.taylor(degree);
            let trailing = (degree.saturating_sub(8)..=degree)
                .map(|n| table.coeff_norm(n))
                .fold(0.0, f64::max);
            if trailing < 1e-18 {
                return Ok(table);
            }
            if degree >= MAX_OVERSAMPLE {
                return Err(Error::InsufficientDegree(format!(
                    "Taylor coefficients still {trailing:e} at degree {degree}; zeros too close to the circle"
                )));
            }
            degree = (2 * degree).min(MAX_OVERSAMPLE);
        }
    }

    /// Smallest `L` with `(Σ_{n>L} ‖Φ_n‖_F²)^{1/2} ≤ TAIL_EPS`.
    ///
    /// For a polynomial inner function (all zeros at the origin) this is its degree.
    pub fn effective_degree(&self) -> Result<usize> {
        let table = self.oversampled_taylor(64)?;
        let mut tail = 0.0;
        for n in (0..table.coeffs.len()).rev() {
            let c = table.coeff_norm(n);
            if (tail + c * c).sqrt() > TAIL_EPS {
                return Ok(n);
            }
            tail += c * c;
        }
        Ok(0)
    }

    /// Block lower-triangular Toeplitz matrix of `M_Φ` from truncated
    /// `H²_{E₂}` into truncated `H²_E`.
    pub fn multiplication_matrix(&self, ambient: AmbientSpec) -> Result<OperatorMatrix> {
        let d = self.codomain_dim();
        if ambient.fiber_dim() != d {
            return Err(Error::DimensionMismatch {
                context: "multiplication_matrix (fiber)",
                expected: d,
                actual: ambient.fiber_dim(),
            });
        }
        let d2 = self.domain_dim();
        let n_max = ambient.max_degree();
        let table = self.taylor(n_max);
        let domain = AmbientSpec::new(d2, n_max)?;
        let mut m = CMat::zeros(ambient.analytic_dim(), domain.analytic_dim());
        for col_deg in 0..=n_max {
            for row_deg in col_deg..=n_max {
                m.view_mut((row_deg * d, col_deg * d2), (d, d2))
                    .copy_from(&table.coeffs[row_deg - col_deg]);
            }
        }
        let exact = n_max.saturating_sub(self.effective_degree()?);
        OperatorMatrix::new(m, Basis::Analytic(ambient), Basis::Analytic(domain), exact)
    }

    /// `f - M_Φ M_Φ^* f`, the projection onto the model space `K_Φ`.
    ///
    /// For `f` of degree at most `N` the truncated adjoint is exact, and so is
    /// the truncated product in every degree `≤ N`.
    pub fn model_space_projection(&self, f: &HardyElement) -> Result<HardyElement> {
        let m = self.multiplication_matrix(f.ambient())?;
        let coeffs = m.entries.ad_mul(f.flat());
        let back = &m.entries * coeffs;
        HardyElement::from_flat(f.ambient(), f.flat() - back)
    }

    /// `(M_Φ^* h)_0 = Σ_n Φ_n^* h_n`, the constant coefficient of `M_Φ^* h`.
    pub fn adjoint_constant_term(&self, h: &HardyElement) -> Result<nalgebra::DVector<C64>> {
        if h.fiber_dim() != self.codomain_dim() {
            return Err(Error::DimensionMismatch {
                context: "adjoint_constant_term",
                expected: self.codomain_dim(),
                actual: h.fiber_dim(),
            });
        }
        let table = self.taylor(h.max_degree());
        let mut x = nalgebra::DVector::zeros(self.domain_dim());
        for n in 0..=h.max_degree() {
            x += table.coeffs[n].ad_mul(&h.coeff(n));
        }
        Ok(x)
    }
}

/// Taylor coefficients `Φ_0, …, Φ_N` of an inner function.
#[derive(Debug, Clone)]
pub struct TaylorTable {
    pub coeffs: Vec<CMat>,
    /// `‖I - Σ_{n≤N} Φ_n^* Φ_n‖₂`: the energy beyond degree `N`.
    ///
    /// Since `M_Φ` is an isometry, `Σ_n Φ_n^* Φ_n = I` exactly, so this is a
    /// certificate (up to rounding) for what the truncation discards.
    pub tail_energy: f64,
}

impl TaylorTable {
    fn from_coeffs(coeffs: Vec<CMat>) -> Self {
        let d2 = coeffs[0].ncols();
        let mut gram = CMat::identity(d2, d2);
        for c in &coeffs {
            gram -= c.ad_mul(c);
        }
        let tail_energy = crate::linalg::spectral_norm(&gram);
        Self { coeffs, tail_energy }
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff_norm(&self, n: usize) -> f64 {
        self.coeffs[n].norm()
    }

    /// `Σ_n Φ_n w^n` by Horner's rule.
    pub fn evaluate(&self, w: C64) -> CMat {
        let mut acc = CMat::zeros(self.coeffs[0].nrows(), self.coeffs[0].ncols());
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc
    }

    /// `Φ x` as a truncated `E`-valued function of degree `max_degree`.
    pub fn apply_constant(&self, x: &nalgebra::DVector<C64>, max_degree: usize) -> Result<HardyElement> {
        let d = self.coeffs[0].nrows();
        let ambient = AmbientSpec::new(d, max_degree)?;
        let rows: Vec<Vec<C64>> = (0..=max_degree.min(self.max_degree()))
            .map(|n| (&self.coeffs[n] * x).iter().copied().collect())
            .collect();
        HardyElement::from_coeffs(ambient, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cis, CVec};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn half() -> InnerSpec {
        InnerSpec::scalar_blaschke(&[c(0.5, 0.0)]).unwrap()
    }

    #[test]
    fn z_on_the_circle() {
        let z = InnerSpec::monomial(1);
        let w = cis(1.3);
        let v = z.evaluate(w).unwrap();
        assert!((v[(0, 0)] - w).norm() < 1e-15);
        assert!((v[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_isometry_is_constant() {
        let s = 1.0 / 2f64.sqrt();
        let v = CMat::from_row_slice(3, 2, &[c(s, 0.0), c(0.0, 0.0), c(0.0, s), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let spec = InnerSpec::constant(v.clone()).unwrap();
        for w in [c(0.0, 0.0), c(0.3, -0.2), cis(2.0)] {
            assert!(max_abs(&(spec.evaluate(w).unwrap() - &v)) < 1e-15);
        }
    }

    #[test]
    fn blaschke_factor_at_one() {
        let v = half().evaluate(c(1.0, 0.0)).unwrap();
        assert!((v[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn outside_disc_rejected() {
        assert!(matches!(half().evaluate(c(1.1, 0.0)), Err(Error::OutsideDisc(_))));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(InnerSpec::scalar_blaschke(&[c(1.0, 0.0)]).is_err());
        let not_iso = CMat::from_element(1, 1, c(2.0, 0.0));
        assert!(InnerSpec::constant(not_iso).is_err());
        let bad_p = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(InnerSpec::new(
            CMat::identity(2, 2),
            vec![Factor::Potapov { zero: c(0.1, 0.0), projection: bad_p }]
        )
        .is_err());
    }

    #[test]
    fn taylor_of_z() {
        let t = InnerSpec::monomial(1).taylor(4);
        assert_eq!(t.coeffs[0][(0, 0)], c(0.0, 0.0));
        assert_eq!(t.coeffs[1][(0, 0)], c(1.0, 0.0));
        assert_eq!(t.coeffs[2][(0, 0)], c(0.0, 0.0));
        assert!(t.tail_energy < 1e-15);
    }

    #[test]
    fn taylor_of_single_blaschke_factor() {
        // c_0 = -a, c_k = ā^{k-1} (1 - |a|²)
        let t = half().taylor(6);
        let want = [-0.5, 0.75, 0.375, 0.1875, 0.09375];
        for (n, w) in want.iter().enumerate() {
            assert!((t.coeffs[n][(0, 0)] - c(*w, 0.0)).norm() < 1e-15, "degree {n}");
        }
        // tail energy beyond 6 is (1 - |a|²) |a|^{12}
        let expect = 0.75 * 0.5f64.powi(12);
        assert!((t.tail_energy - expect).abs() < 1e-14);
    }

    #[test]
    fn taylor_matches_evaluation_inside_disc() {
        let spec = InnerSpec::scalar_blaschke(&[c(0.3, 0.4), c(-0.5, 0.1), c(0.0, 0.0)]).unwrap();
        let w = cis(PI / 3.0) * 0.7;
        let t = spec.taylor(200);
        let err = max_abs(&(t.evaluate(w) - spec.evaluate(w).unwrap()));
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn potapov_taylor_matches_evaluation() {
        let s = 0.5f64.sqrt();
        let p = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)]);
        let v = CMat::from_row_slice(2, 1, &[c(s, 0.0), c(0.0, s)]);
        let spec = InnerSpec::new(
            v,
            vec![
                Factor::Potapov { zero: c(0.2, -0.3), projection: p },
                Factor::Scalar { zero: c(-0.4, 0.0) },
            ],
        )
        .unwrap();
        let t = spec.taylor(150);
        for w in [c(0.1, 0.2), cis(0.4) * 0.6, c(-0.5, 0.0)] {
            assert!(max_abs(&(t.evaluate(w) - spec.evaluate(w).unwrap())) < 1e-10);
        }
        // boundary isometry
        let x = CVec::from_vec(vec![c(0.3, -1.2)]);
        let y = spec.evaluate(cis(2.2)).unwrap() * &x;
        assert!((y.norm() - x.norm()).abs() < 1e-14);
    }

    #[test]
    fn multiplication_by_z_is_the_shift() {
        let amb = AmbientSpec::new(1, 4).unwrap();
        let m = InnerSpec::monomial(1).multiplication_matrix(amb).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j + 1 { 1.0 } else { 0.0 };
                assert_eq!(m.entries[(i, j)], c(want, 0.0));
            }
        }
    }

    #[test]
    fn multiplication_by_constant_is_block_diagonal() {
        let amb = AmbientSpec::new(2, 3).unwrap();
        let v = CMat::from_row_slice(2, 1, &[c(0.6, 0.0), c(0.0, 0.8)]);
        let m = InnerSpec::constant(v.clone()).unwrap().multiplication_matrix(amb).unwrap();
        assert_eq!(m.entries.shape(), (8, 4));
        for n in 0..4 {
            for k in 0..4 {
                let block = m.entries.view((2 * n, k), (2, 1)).into_owned();
                if n == k {
                    assert_eq!(block, v);
                } else {
                    assert!(max_abs(&block) == 0.0);
                }
            }
        }
    }

    #[test]
    fn model_space_examples() {
        let amb = AmbientSpec::new(1, 6).unwrap();
        let f = HardyElement::scalar(amb, &[c(3.0, 0.0), c(2.0, 0.0)]).unwrap();
        let p = InnerSpec::monomial(1).model_space_projection(&f).unwrap();
        assert!((&p - &HardyElement::scalar(amb, &[c(3.0, 0.0)]).unwrap()).norm() < 1e-15);

        let unitary = InnerSpec::constant(CMat::from_element(1, 1, cis(0.4))).unwrap();
        assert!(unitary.model_space_projection(&f).unwrap().norm() < 1e-15);

        let f = HardyElement::scalar(amb, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let p = InnerSpec::monomial(2).model_space_projection(&f).unwrap();
        let want = HardyElement::scalar(amb, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((&p - &want).norm() < 1e-15);
    }

    #[test]
    fn effective_degree_of_polynomial_inner_function() {
        assert_eq!(InnerSpec::monomial(3).effective_degree().unwrap(), 3);
        let l = half().effective_degree().unwrap();
        // (1 - 1/4)·(1/4)^L ≤ 1e-28 first holds at L = 47
        assert!((45..=48).contains(&l), "{l}");
    }
}
