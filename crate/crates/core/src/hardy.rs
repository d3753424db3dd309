//! Truncated coefficient model of `H²_E(T)` and `H²_E(T) ⊕ E`.
//!
//! An E-valued analytic function is stored by its Taylor coefficients in
//! degrees `0..=N`, each coefficient a vector in `C^d`, flattened as
//! `index = n * d + j`. A point of `H²_E ⊕ E` appends the fiber vector after
//! the analytic block, giving ambient dimension `(N + 1) d + d`.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::linalg::{cis, vec_norm, CVec, C64, ZERO};

/// Truncation parameters: fiber dimension `d` and maximal degree `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AmbientSpec {
    fiber_dim: usize,
    max_degree: usize,
}

impl AmbientSpec {
    pub fn new(fiber_dim: usize, max_degree: usize) -> Result<Self> {
        if fiber_dim == 0 || max_degree == 0 {
            return Err(Error::InvalidAmbient {
                fiber_dim,
                max_degree,
            });
        }
        Ok(Self {
            fiber_dim,
            max_degree,
        })
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Dimension of the truncated `H²_E`.
    pub fn analytic_dim(&self) -> usize {
        (self.max_degree + 1) * self.fiber_dim
    }

    /// Dimension of the truncated `H²_E ⊕ E`.
    pub fn total_dim(&self) -> usize {
        self.analytic_dim() + self.fiber_dim
    }

    /// Flat index of fiber coordinate `j` of the degree-`n` coefficient.
    pub fn analytic_index(&self, degree: usize, j: usize) -> usize {
        degree * self.fiber_dim + j
    }

    /// Flat index of coordinate `j` of the `E` summand.
    pub fn fiber_index(&self, j: usize) -> usize {
        self.analytic_dim() + j
    }

    /// The same fiber dimension at another truncation degree.
    pub fn with_degree(&self, max_degree: usize) -> Result<Self> {
        Self::new(self.fiber_dim, max_degree)
    }
}

/// Truncated Taylor coefficients of an `E`-valued analytic function.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyElement {
    ambient: AmbientSpec,
    coeffs: CVec,
}

impl HardyElement {
    pub fn zero(ambient: AmbientSpec) -> Self {
        Self {
            ambient,
            coeffs: CVec::zeros(ambient.analytic_dim()),
        }
    }

    /// Builds an element from a flat coefficient vector of length `(N + 1) d`.
    pub fn from_flat(ambient: AmbientSpec, coeffs: CVec) -> Result<Self> {
        if coeffs.len() != ambient.analytic_dim() {
            return Err(Error::DimensionMismatch {
                context: "HardyElement::from_flat",
                expected: ambient.analytic_dim(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { ambient, coeffs })
    }

    /// Builds an element from per-degree coefficient vectors; missing degrees are zero.
    pub fn from_coeffs(ambient: AmbientSpec, coeffs: &[Vec<C64>]) -> Result<Self> {
        if coeffs.len() > ambient.max_degree + 1 {
            return Err(Error::DimensionMismatch {
                context: "HardyElement::from_coeffs (degree)",
                expected: ambient.max_degree + 1,
                actual: coeffs.len(),
            });
        }
        let mut out = Self::zero(ambient);
        for (n, c) in coeffs.iter().enumerate() {
            if c.len() != ambient.fiber_dim {
                return Err(Error::DimensionMismatch {
                    context: "HardyElement::from_coeffs (fiber)",
                    expected: ambient.fiber_dim,
                    actual: c.len(),
                });
            }
            for (j, v) in c.iter().enumerate() {
                out.coeffs[ambient.analytic_index(n, j)] = *v;
            }
        }
        Ok(out)
    }

    /// Scalar polynomial `Σ c_n z^n` (requires `d = 1`).
    pub fn scalar(ambient: AmbientSpec, coeffs: &[C64]) -> Result<Self> {
        if ambient.fiber_dim != 1 {
            return Err(Error::DimensionMismatch {
                context: "HardyElement::scalar",
                expected: 1,
                actual: ambient.fiber_dim,
            });
        }
        let rows: Vec<Vec<C64>> = coeffs.iter().map(|c| vec![*c]).collect();
        Self::from_coeffs(ambient, &rows)
    }

    /// `z^n x` for a fiber vector `x`.
    pub fn monomial(ambient: AmbientSpec, degree: usize, x: &CVec) -> Result<Self> {
        check_fiber(&ambient, x)?;
        if degree > ambient.max_degree {
            return Err(Error::DimensionMismatch {
                context: "HardyElement::monomial",
                expected: ambient.max_degree,
                actual: degree,
            });
        }
        let mut out = Self::zero(ambient);
        for j in 0..ambient.fiber_dim {
            out.coeffs[ambient.analytic_index(degree, j)] = x[j];
        }
        Ok(out)
    }

    pub fn ambient(&self) -> AmbientSpec {
        self.ambient
    }

    pub fn max_degree(&self) -> usize {
        self.ambient.max_degree
    }

    pub fn fiber_dim(&self) -> usize {
        self.ambient.fiber_dim
    }

    pub fn flat(&self) -> &CVec {
        &self.coeffs
    }

    pub fn into_flat(self) -> CVec {
        self.coeffs
    }

    /// The degree-`n` coefficient as a fiber vector.
    pub fn coeff(&self, degree: usize) -> CVec {
        let d = self.ambient.fiber_dim;
        CVec::from_iterator(d, (0..d).map(|j| self.coeffs[degree * d + j]))
    }

    pub fn coeff_norm(&self, degree: usize) -> f64 {
        let d = self.ambient.fiber_dim;
        (0..d)
            .map(|j| self.coeffs[degree * d + j].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖f‖`, by Parseval on the stored coefficients.
    pub fn norm(&self) -> f64 {
        vec_norm(&self.coeffs)
    }

    /// Largest degree whose coefficient exceeds `threshold` in norm, if any.
    pub fn support_degree(&self, threshold: f64) -> Option<usize> {
        (0..=self.ambient.max_degree)
            .rev()
            .find(|&n| self.coeff_norm(n) > threshold)
    }

    /// `f(w) = Σ_n f_n w^n`.
    pub fn evaluate(&self, w: C64) -> CVec {
        let d = self.ambient.fiber_dim;
        let mut acc = CVec::zeros(d);
        for n in (0..=self.ambient.max_degree).rev() {
            acc *= w;
            for j in 0..d {
                acc[j] += self.coeffs[n * d + j];
            }
        }
        acc
    }

    /// Same function viewed at another truncation degree (padding or dropping).
    pub fn resized(&self, max_degree: usize) -> Result<Self> {
        let target = self.ambient.with_degree(max_degree)?;
        let mut out = Self::zero(target);
        let keep = target.analytic_dim().min(self.ambient.analytic_dim());
        out.coeffs.rows_mut(0, keep).copy_from(&self.coeffs.rows(0, keep));
        Ok(out)
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        check_same(&self.ambient, &other.ambient)?;
        Ok(crate::linalg::inner(&self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            ambient: self.ambient,
            coeffs: &self.coeffs * c,
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!(self.ambient, other.ambient, "HardyElement ambient mismatch");
        Self {
            ambient: self.ambient,
            coeffs: self.coeffs.zip_map(&other.coeffs, f),
        }
    }
}

impl Add for &HardyElement {
    type Output = HardyElement;
    fn add(self, rhs: Self) -> HardyElement {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &HardyElement {
    type Output = HardyElement;
    fn sub(self, rhs: Self) -> HardyElement {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul<C64> for &HardyElement {
    type Output = HardyElement;
    fn mul(self, rhs: C64) -> HardyElement {
        self.scale(rhs)
    }
}

/// A point `(f, x)` of `H²_E ⊕ E`.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianElement {
    pub analytic: HardyElement,
    pub fiber: CVec,
}

impl BrownianElement {
    pub fn new(analytic: HardyElement, fiber: CVec) -> Result<Self> {
        check_fiber(&analytic.ambient, &fiber)?;
        Ok(Self { analytic, fiber })
    }

    pub fn zero(ambient: AmbientSpec) -> Self {
        Self {
            analytic: HardyElement::zero(ambient),
            fiber: CVec::zeros(ambient.fiber_dim),
        }
    }

    pub fn ambient(&self) -> AmbientSpec {
        self.analytic.ambient
    }

    /// Ambient coordinates: analytic block followed by the fiber block.
    pub fn to_vector(&self) -> CVec {
        let amb = self.ambient();
        let mut v = CVec::zeros(amb.total_dim());
        v.rows_mut(0, amb.analytic_dim())
            .copy_from(self.analytic.flat());
        v.rows_mut(amb.analytic_dim(), amb.fiber_dim)
            .copy_from(&self.fiber);
        v
    }

    pub fn from_vector(ambient: AmbientSpec, v: &CVec) -> Result<Self> {
        if v.len() != ambient.total_dim() {
            return Err(Error::DimensionMismatch {
                context: "BrownianElement::from_vector",
                expected: ambient.total_dim(),
                actual: v.len(),
            });
        }
        let analytic = HardyElement::from_flat(ambient, v.rows(0, ambient.analytic_dim()).into_owned())?;
        let fiber = v.rows(ambient.analytic_dim(), ambient.fiber_dim).into_owned();
        Ok(Self { analytic, fiber })
    }

    /// `‖(f, x)‖² = ‖f‖² + ‖x‖²`.
    pub fn norm(&self) -> f64 {
        (self.analytic.norm().powi(2) + vec_norm(&self.fiber).powi(2)).sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        let a = self.analytic.inner(&other.analytic)?;
        Ok(a + crate::linalg::inner(&self.fiber, &other.fiber))
    }
}

fn check_fiber(ambient: &AmbientSpec, x: &CVec) -> Result<()> {
    if x.len() != ambient.fiber_dim {
        return Err(Error::DimensionMismatch {
            context: "fiber vector",
            expected: ambient.fiber_dim,
            actual: x.len(),
        });
    }
    Ok(())
}

fn check_same(a: &AmbientSpec, b: &AmbientSpec) -> Result<()> {
    if a.fiber_dim != b.fiber_dim {
        return Err(Error::DimensionMismatch {
            context: "inner product (fiber_dim)",
            expected: a.fiber_dim,
            actual: b.fiber_dim,
        });
    }
    if a.max_degree != b.max_degree {
        return Err(Error::DimensionMismatch {
            context: "inner product (max_degree)",
            expected: a.max_degree,
            actual: b.max_degree,
        });
    }
    Ok(())
}

/// `S_E f = z f`. Returns the shifted element and the norm of the dropped
/// degree-`N` coefficient (zero exactly when the shift is exact).
pub fn shift(f: &HardyElement) -> (HardyElement, f64) {
    let amb = f.ambient;
    let d = amb.fiber_dim;
    let loss = f.coeff_norm(amb.max_degree);
    let mut out = HardyElement::zero(amb);
    let len = amb.analytic_dim() - d;
    out.coeffs.rows_mut(d, len).copy_from(&f.coeffs.rows(0, len));
    (out, loss)
}

/// `S_E^* f`: drops the constant term and lowers every degree by one. Exact.
pub fn shift_adjoint(f: &HardyElement) -> HardyElement {
    let amb = f.ambient;
    let d = amb.fiber_dim;
    let mut out = HardyElement::zero(amb);
    let len = amb.analytic_dim() - d;
    out.coeffs.rows_mut(0, len).copy_from(&f.coeffs.rows(d, len));
    out
}

/// `i_E x`: the constant function `x`.
pub fn include_fiber(ambient: AmbientSpec, x: &CVec) -> Result<HardyElement> {
    HardyElement::monomial(ambient, 0, x)
}

/// `i_E^* f = f(0)`, the constant coefficient.
pub fn include_fiber_adjoint(f: &HardyElement) -> CVec {
    f.coeff(0)
}

/// Outcome of dividing by `z - e^{iθ}`.
#[derive(Debug, Clone)]
pub struct Division {
    pub quotient: HardyElement,
    /// `‖(z - e^{iθ}) g - h‖` over the stored degrees.
    pub residual: f64,
    /// `‖h(e^{iθ})‖`; nonzero means no `H²` quotient exists.
    pub boundary_value: f64,
    h_norm: f64,
}

impl Division {
    /// True when the numerator fails to vanish at `e^{iθ}` relative to `tol`.
    pub fn is_flagged(&self, tol: f64) -> bool {
        self.boundary_value > tol * self.h_norm.max(1.0)
    }

    /// Returns the quotient, or an error when the numerator does not vanish.
    pub fn checked(self, tol: f64) -> Result<HardyElement> {
        if self.is_flagged(tol) {
            return Err(Error::NonVanishingNumerator {
                boundary_value: self.boundary_value,
                tolerance: tol,
            });
        }
        Ok(self.quotient)
    }
}

/// Divides `h` by `z - e^{iθ}` using the tail sums
/// `g_n = Σ_{k>n} h_k e^{i(k-n-1)θ}`, evaluated by the backward recursion
/// `g_n = h_{n+1} + e^{iθ} g_{n+1}`.
///
/// When `h(e^{iθ}) ≠ 0` the quotient returned is the polynomial part and the
/// defect shows up in `residual` (at degree 0) and in `boundary_value`.
pub fn divide_by_zeta(h: &HardyElement, theta: f64) -> Division {
    let amb = h.ambient;
    let d = amb.fiber_dim;
    let n_max = amb.max_degree;
    let lambda = cis(theta);
    let mut g = HardyElement::zero(amb);
    // g_N = 0; g_{N-1} = h_N
    let mut acc = CVec::zeros(d);
    for n in (0..n_max).rev() {
        for j in 0..d {
            acc[j] = h.coeffs[(n + 1) * d + j] + lambda * acc[j];
            g.coeffs[n * d + j] = acc[j];
        }
    }
    let boundary_value = vec_norm(&h.evaluate(lambda));
    let residual = division_residual(&g, h, theta);
    Division {
        quotient: g,
        residual,
        boundary_value,
        h_norm: h.norm(),
    }
}

/// Forward recursion `g_0 = -e^{-iθ} h_0`, `g_n = e^{-iθ}(g_{n-1} - h_n)`.
///
/// Agrees with [`divide_by_zeta`] when `h(e^{iθ}) = 0`; kept as a cross-check
/// because it carries any boundary residual undamped into every coefficient.
pub fn divide_by_zeta_forward(h: &HardyElement, theta: f64) -> HardyElement {
    let amb = h.ambient;
    let d = amb.fiber_dim;
    let inv = cis(-theta);
    let mut g = HardyElement::zero(amb);
    for j in 0..d {
        let mut prev = ZERO;
        for n in 0..=amb.max_degree {
            let cur = if n == 0 {
                -inv * h.coeffs[j]
            } else {
                inv * (prev - h.coeffs[n * d + j])
            };
            g.coeffs[n * d + j] = cur;
            prev = cur;
        }
    }
    g
}

/// `‖truncate((z - e^{iθ}) g) - h‖`.
pub fn division_residual(g: &HardyElement, h: &HardyElement, theta: f64) -> f64 {
    let lambda = cis(theta);
    let (zg, _) = shift(g);
    let prod = &zg - &g.scale(lambda);
    (&prod - h).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn amb(d: usize, n: usize) -> AmbientSpec {
        AmbientSpec::new(d, n).unwrap()
    }

    #[test]
    fn degenerate_ambient_rejected() {
        assert!(AmbientSpec::new(0, 4).is_err());
        assert!(AmbientSpec::new(2, 0).is_err());
    }

    #[test]
    fn shift_of_constant_is_z() {
        let a = amb(1, 5);
        let one = HardyElement::scalar(a, &[c(1.0)]).unwrap();
        let (s, loss) = shift(&one);
        assert_eq!(s, HardyElement::scalar(a, &[c(0.0), c(1.0)]).unwrap());
        assert_eq!(loss, 0.0);
    }

    #[test]
    fn shift_drops_top_degree() {
        let a = amb(1, 4);
        let mut coeffs = vec![c(0.0); 5];
        coeffs[4] = c(1.0);
        let f = HardyElement::scalar(a, &coeffs).unwrap();
        let (s, loss) = shift(&f);
        assert_eq!(s.norm(), 0.0);
        assert_eq!(loss, 1.0);
    }

    #[test]
    fn shift_of_linear_polynomial() {
        let a = amb(1, 4);
        let f = HardyElement::scalar(a, &[c(3.0), c(2.0)]).unwrap();
        let (s, loss) = shift(&f);
        assert_eq!(s, HardyElement::scalar(a, &[c(0.0), c(3.0), c(2.0)]).unwrap());
        assert_eq!(loss, 0.0);
        assert!((s.norm() - f.norm()).abs() < 1e-15);
    }

    #[test]
    fn adjoint_shift_examples() {
        let a = amb(1, 3);
        let z = HardyElement::scalar(a, &[c(0.0), c(1.0)]).unwrap();
        assert_eq!(shift_adjoint(&z), HardyElement::scalar(a, &[c(1.0)]).unwrap());
        let k = HardyElement::scalar(a, &[c(7.0)]).unwrap();
        assert_eq!(shift_adjoint(&k).norm(), 0.0);
    }

    #[test]
    fn inclusion_and_its_adjoint() {
        let a = amb(2, 3);
        let e1 = CVec::from_vec(vec![c(1.0), c(0.0)]);
        let f = include_fiber(a, &e1).unwrap();
        assert_eq!(f.coeff(0), e1);
        assert!((f.norm() - 1.0).abs() < 1e-15);
        let g = HardyElement::from_coeffs(
            a,
            &[vec![c(2.0), C64::new(0.0, 1.0)], vec![c(5.0), c(5.0)]],
        )
        .unwrap();
        // ⟨i_E x, g⟩ = ⟨x, g_0⟩
        let lhs = f.inner(&g).unwrap();
        let rhs = crate::linalg::inner(&e1, &include_fiber_adjoint(&g));
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn monomial_inner_products() {
        let a = amb(1, 3);
        let one = HardyElement::scalar(a, &[c(1.0)]).unwrap();
        let z = HardyElement::scalar(a, &[c(0.0), c(1.0)]).unwrap();
        assert_eq!(z.inner(&z).unwrap(), c(1.0));
        assert_eq!(one.inner(&z).unwrap(), c(0.0));
        let other = amb(1, 4);
        assert!(one.inner(&HardyElement::zero(other)).is_err());
    }

    #[test]
    fn brownian_norm_is_direct_sum() {
        let a = amb(1, 3);
        let f = HardyElement::scalar(a, &[c(1.0), c(2.0)]).unwrap();
        let v = BrownianElement::new(f, CVec::from_vec(vec![c(2.0)])).unwrap();
        let n2 = v.inner(&v).unwrap();
        assert!((n2.re - 9.0).abs() < 1e-14 && n2.im == 0.0);
        let back = BrownianElement::from_vector(a, &v.to_vector()).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn divide_linear_factor() {
        let a = amb(1, 6);
        let theta = 0.7;
        let h = HardyElement::scalar(a, &[-cis(theta), c(1.0)]).unwrap();
        let div = divide_by_zeta(&h, theta);
        let one = HardyElement::scalar(a, &[c(1.0)]).unwrap();
        assert!((&div.quotient - &one).norm() < 1e-15);
        assert!(div.residual < 1e-15);
        assert!(!div.is_flagged(1e-12));
    }

    #[test]
    fn divide_difference_of_squares() {
        let a = amb(1, 6);
        let h = HardyElement::scalar(a, &[c(-1.0), c(0.0), c(1.0)]).unwrap();
        let div = divide_by_zeta(&h, 0.0);
        let want = HardyElement::scalar(a, &[c(1.0), c(1.0)]).unwrap();
        assert!((&div.quotient - &want).norm() < 1e-15);
        assert!(div.residual < 1e-15);
    }

    #[test]
    fn divide_cubic() {
        let a = amb(1, 8);
        let h = HardyElement::scalar(a, &[c(-1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        let div = divide_by_zeta(&h, 0.0);
        let want = HardyElement::scalar(a, &[c(1.0), c(1.0), c(1.0)]).unwrap();
        assert!((&div.quotient - &want).norm() < 1e-15);
        assert!((div.quotient.norm().powi(2) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn non_vanishing_numerator_is_flagged() {
        let a = amb(1, 6);
        let h = HardyElement::scalar(a, &[c(1.0), c(1.0)]).unwrap();
        let div = divide_by_zeta(&h, PI);
        assert!(div.boundary_value < 1e-15);
        let div = divide_by_zeta(&h, 0.0);
        assert!((div.boundary_value - 2.0).abs() < 1e-15);
        assert!(div.is_flagged(1e-9));
        assert!(div.residual >= 2.0 - 1e-12);
        assert!(div.checked(1e-9).is_err());
    }

    #[test]
    fn forward_recursion_agrees_on_vanishing_numerators() {
        let a = amb(2, 10);
        let theta = 2.1;
        let lambda = cis(theta);
        // h = (z - λ) q with q = (1 + 2z + i z^3) e_1 + z e_2
        let q = HardyElement::from_coeffs(
            a,
            &[
                vec![c(1.0), c(0.0)],
                vec![c(2.0), c(1.0)],
                vec![c(0.0), c(0.0)],
                vec![C64::new(0.0, 1.0), c(0.0)],
            ],
        )
        .unwrap();
        let h = &shift(&q).0 - &q.scale(lambda);
        let tail = divide_by_zeta(&h, theta).quotient;
        let fwd = divide_by_zeta_forward(&h, theta);
        assert!((&tail - &q).norm() < 1e-14);
        assert!((&fwd - &q).norm() < 1e-13);
    }
}
