//! Invariant subspaces of the Brownian shift: canonical Type I and Type II
//! constructions, invariance checks, classification, canonical decomposition
//! (defect space, `M₀`, recovered parameters) and wandering subspaces.
//!
//! Subspaces live in truncated ambient coordinates. Because one application of
//! `B` raises degrees by one, a truncated basis of an invariant subspace is
//! only closed under `B` on part of its span. Each [`SubspaceBasis`] records how
//! many of its leading columns form that exact part; invariance is tested on
//! those columns only.

use crate::brownian::{apply_vector, BrownianParams};
use crate::error::{Error, Result};
use crate::hardy::{divide_by_zeta, AmbientSpec, BrownianElement, HardyElement};
use crate::inner::InnerSpec;
use crate::linalg::{
    distance_to_span, numerical_rank, orthonormal_complement, orthonormalize, sorted_svd,
    vec_norm, CMat, CVec, C64,
};
use crate::tolerance::Tolerance;

/// Coefficients below this (relative to a unit column) do not count as support.
pub const SUPPORT_EPS: f64 = 1e-13;

/// Relative threshold used to drop dependent generators.
const GENERATOR_DROP: f64 = 1e-10;

/// Orthonormal basis of a subspace of truncated `H²_E ⊕ E`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    ambient: AmbientSpec,
    columns: CMat,
    exact_columns: usize,
    exactness_margin: usize,
    label: String,
}

impl SubspaceBasis {
    /// Orthonormalizes `generators` in order. The first `exact_generators`
    /// generators must have their `B`-images inside the span of all generators;
    /// the surviving columns derived from them become the exact columns.
    pub fn from_generators(
        ambient: AmbientSpec,
        generators: &CMat,
        exact_generators: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        if generators.nrows() != ambient.total_dim() {
            return Err(Error::DimensionMismatch {
                context: "SubspaceBasis generators",
                expected: ambient.total_dim(),
                actual: generators.nrows(),
            });
        }
        let (q, kept) = orthonormalize(generators, GENERATOR_DROP);
        let exact_columns = kept.iter().filter(|&&i| i < exact_generators).count();
        Ok(Self::assemble(ambient, q, exact_columns, label.into()))
    }

    /// Basis spanned by arbitrary columns, all of which are tested for invariance.
    pub fn custom(ambient: AmbientSpec, columns: &CMat, label: impl Into<String>) -> Result<Self> {
        Self::from_generators(ambient, columns, columns.ncols(), label)
    }

    /// Wraps columns that are already orthonormal.
    pub fn from_orthonormal(
        ambient: AmbientSpec,
        columns: CMat,
        exact_columns: usize,
        label: impl Into<String>,
    ) -> Self {
        let exact_columns = exact_columns.min(columns.ncols());
        Self::assemble(ambient, columns, exact_columns, label.into())
    }

    fn assemble(ambient: AmbientSpec, columns: CMat, exact_columns: usize, label: String) -> Self {
        let d = ambient.fiber_dim();
        let mut margin = 0;
        for j in 0..columns.ncols() {
            for n in (0..=ambient.max_degree()).rev() {
                let c: f64 = (0..d)
                    .map(|i| columns[(ambient.analytic_index(n, i), j)].norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if c > SUPPORT_EPS {
                    margin = margin.max(n);
                    break;
                }
            }
        }
        Self {
            ambient,
            columns,
            exact_columns,
            exactness_margin: margin,
            label,
        }
    }

    pub fn ambient(&self) -> AmbientSpec {
        self.ambient
    }

    pub fn columns(&self) -> &CMat {
        &self.columns
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }

    pub fn exact_columns(&self) -> usize {
        self.exact_columns
    }

    pub fn exactness_margin(&self) -> usize {
        self.exactness_margin
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn column(&self, j: usize) -> CVec {
        self.columns.column(j).into_owned()
    }

    pub fn element(&self, j: usize) -> BrownianElement {
        BrownianElement::from_vector(self.ambient, &self.column(j)).expect("layout matches ambient")
    }

    /// Rows of the `E` summand (`d × k`).
    pub fn fiber_block(&self) -> CMat {
        self.columns
            .rows(self.ambient.analytic_dim(), self.ambient.fiber_dim())
            .into_owned()
    }

    /// Norm of the `E` component of each column.
    pub fn fiber_norms(&self) -> Vec<f64> {
        let f = self.fiber_block();
        (0..f.ncols()).map(|j| f.column(j).norm()).collect()
    }

    /// `‖(I - P_M) v‖`.
    pub fn distance(&self, v: &CVec) -> f64 {
        distance_to_span(&self.columns, v)
    }

    pub fn project(&self, v: &CVec) -> CVec {
        &self.columns * self.columns.ad_mul(v)
    }
}

/// An element `(g, y)` of `G_Φ` together with its parameter `x`.
#[derive(Debug, Clone)]
pub struct GPhiElement {
    pub g: HardyElement,
    pub y: CVec,
    pub x: CVec,
}

impl GPhiElement {
    pub fn to_brownian(&self) -> BrownianElement {
        BrownianElement {
            analytic: self.g.clone(),
            fiber: self.y.clone(),
        }
    }

    pub fn to_vector(&self) -> CVec {
        self.to_brownian().to_vector()
    }

    /// `‖(z - e^{iθ}) g + σ y - Φ x‖` over the stored degrees.
    pub fn identity_residual(&self, spec: &InnerSpec, params: &BrownianParams) -> Result<f64> {
        let h = zeta_image(&self.g, &self.y, params);
        let phi_x = spec.taylor(self.g.max_degree()).apply_constant(&self.x, self.g.max_degree())?;
        Ok((&h - &phi_x).norm())
    }

    /// `|‖x‖ - σ‖y‖|`.
    pub fn norm_gap(&self, params: &BrownianParams) -> f64 {
        (vec_norm(&self.x) - params.sigma() * vec_norm(&self.y)).abs()
    }

    /// `‖Φ(e^{iθ}) x - σ y‖`.
    pub fn boundary_residual(&self, spec: &InnerSpec, params: &BrownianParams) -> Result<f64> {
        let v = spec.evaluate(params.lambda())? * &self.x;
        Ok(vec_norm(&(v - &self.y * C64::new(params.sigma(), 0.0))))
    }

    /// `‖M_Φ^* g‖`: distance of `g` from the model space `K_Φ`.
    pub fn model_space_defect(&self, spec: &InnerSpec) -> Result<f64> {
        let p = spec.model_space_projection(&self.g)?;
        Ok((&self.g - &p).norm())
    }
}

/// `(z - e^{iθ}) g + σ y`, truncated to the degree of `g`.
pub fn zeta_image(g: &HardyElement, y: &CVec, params: &BrownianParams) -> HardyElement {
    let (zg, _) = crate::hardy::shift(g);
    let mut h = &zg - &g.scale(params.lambda());
    let mut flat = h.flat().clone();
    for j in 0..y.len() {
        flat[j] += y[j] * params.sigma();
    }
    h = HardyElement::from_flat(g.ambient(), flat).expect("same layout");
    h
}

fn check_spec(spec: &InnerSpec, ambient: &AmbientSpec) -> Result<()> {
    if spec.codomain_dim() != ambient.fiber_dim() {
        return Err(Error::DimensionMismatch {
            context: "inner function codomain vs ambient fiber",
            expected: ambient.fiber_dim(),
            actual: spec.codomain_dim(),
        });
    }
    Ok(())
}

/// Highest degree `K` of the generators `Φ z^n e_j` emitted by the builders:
/// `K = N - L - 1` with `L` the effective degree of `Φ`, so that the
/// generators with `n < K` stay exact under one application of `B`.
pub fn degree_cutoff(spec: &InnerSpec, ambient: &AmbientSpec) -> Result<usize> {
    let l = spec.effective_degree()?;
    let n = ambient.max_degree();
    if n < l + 2 {
        return Err(Error::InsufficientDegree(format!(
            "N = {n} leaves no exact generator for an inner function of effective degree {l}"
        )));
    }
    Ok(n - l - 1)
}

/// Generators `(Φ z^n e_j, 0)` for `n = 0..=K`, ordered by degree, and `K`.
pub fn type1_generators(spec: &InnerSpec, ambient: &AmbientSpec) -> Result<(CMat, usize)> {
    check_spec(spec, ambient)?;
    let k = degree_cutoff(spec, ambient)?;
    let d = ambient.fiber_dim();
    let d2 = spec.domain_dim();
    let n_max = ambient.max_degree();
    let table = spec.taylor(n_max);
    let mut gens = CMat::zeros(ambient.total_dim(), (k + 1) * d2);
    for n in 0..=k {
        for j in 0..d2 {
            let col = n * d2 + j;
            for m in n..=n_max {
                let block = &table.coeffs[m - n];
                for i in 0..d {
                    gens[(ambient.analytic_index(m, i), col)] = block[(i, j)];
                }
            }
        }
    }
    Ok((gens, k))
}

/// `Φ H²_{E₁} ⊕ {0}` at truncation.
pub fn build_type1(spec: &InnerSpec, ambient: AmbientSpec) -> Result<SubspaceBasis> {
    let (gens, k) = type1_generators(spec, &ambient)?;
    SubspaceBasis::from_generators(ambient, &gens, k * spec.domain_dim(), "type1")
}

/// Builds the element of `G_Φ` with parameter `x`:
/// `y = Φ(e^{iθ}) x / σ` and `g = (Φ x - σ y) / (z - e^{iθ})`.
pub fn build_gphi_element(spec: &InnerSpec, params: &BrownianParams, x: &CVec) -> Result<GPhiElement> {
    let ambient = params.ambient();
    check_spec(spec, &ambient)?;
    if x.len() != spec.domain_dim() {
        return Err(Error::DimensionMismatch {
            context: "G_Phi parameter",
            expected: spec.domain_dim(),
            actual: x.len(),
        });
    }
    let n = ambient.max_degree();
    let sigma = C64::new(params.sigma(), 0.0);
    let y = spec.evaluate(params.lambda())? * x / sigma;
    let table = spec.oversampled_taylor(n)?;
    let big = table.max_degree();
    let mut h = table.apply_constant(x, big)?;
    let mut flat = h.flat().clone();
    for j in 0..y.len() {
        flat[j] -= y[j] * sigma;
    }
    h = HardyElement::from_flat(h.ambient(), flat)?;
    let tol = Tolerance::for_ambient(&ambient).value();
    let division = divide_by_zeta(&h, params.theta());
    if division.residual > tol {
        return Err(Error::InsufficientDegree(format!(
            "division residual {:e} exceeds tolerance {tol:e}",
            division.residual
        )));
    }
    let g = division.checked(tol)?.resized(n)?;
    Ok(GPhiElement { g, y, x: x.clone() })
}

/// Constructed Type II subspace with its ingredients kept for cross-checks.
#[derive(Debug, Clone)]
pub struct TypeIIConstruction {
    pub basis: SubspaceBasis,
    /// Elements built from an orthonormal basis of the parameter subspace `X`.
    pub elements: Vec<GPhiElement>,
    /// Orthonormal basis of `X` (columns), matching `elements`.
    pub parameters: CMat,
    /// The Type I part `Φ H² ⊕ {0}` on its own.
    pub type1: SubspaceBasis,
}

/// `⟨G⟩ ⊕ (Φ H²_{E₂} ⊕ {0})` with `G = {element(x) : x ∈ X}`; `X` is given by
/// spanning columns in `C^{d₂}`.
pub fn build_type2_parts(
    spec: &InnerSpec,
    params: &BrownianParams,
    parameter_span: &CMat,
) -> Result<TypeIIConstruction> {
    let ambient = params.ambient();
    check_spec(spec, &ambient)?;
    if parameter_span.nrows() != spec.domain_dim() {
        return Err(Error::DimensionMismatch {
            context: "parameter subspace",
            expected: spec.domain_dim(),
            actual: parameter_span.nrows(),
        });
    }
    let (xs, _) = orthonormalize(parameter_span, GENERATOR_DROP);
    if xs.ncols() == 0 {
        return Err(Error::Precondition("parameter subspace X must be nonzero".into()));
    }
    let elements = (0..xs.ncols())
        .map(|j| build_gphi_element(spec, params, &xs.column(j).into_owned()))
        .collect::<Result<Vec<_>>>()?;
    let (t1, k) = type1_generators(spec, &ambient)?;
    let r = elements.len();
    let mut gens = CMat::zeros(ambient.total_dim(), r + t1.ncols());
    for (j, e) in elements.iter().enumerate() {
        gens.set_column(j, &e.to_vector());
    }
    gens.columns_mut(r, t1.ncols()).copy_from(&t1);
    let exact = r + k * spec.domain_dim();
    let basis = SubspaceBasis::from_generators(ambient, &gens, exact, "type2")?;
    let type1 = SubspaceBasis::from_generators(ambient, &t1, k * spec.domain_dim(), "type1")?;
    Ok(TypeIIConstruction {
        basis,
        elements,
        parameters: xs,
        type1,
    })
}

pub fn build_type2(spec: &InnerSpec, params: &BrownianParams, parameter_span: &CMat) -> Result<SubspaceBasis> {
    Ok(build_type2_parts(spec, params, parameter_span)?.basis)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub max_residual: f64,
    /// `‖(I - P_M) B c‖` for each exact column `c`.
    pub per_column: Vec<f64>,
    /// Columns excluded because their image leaves the truncated span.
    pub boundary_columns: usize,
}

impl InvarianceReport {
    pub fn is_invariant(&self, tol: Tolerance) -> bool {
        !self.per_column.is_empty() && tol.accepts(self.max_residual)
    }
}

/// Residuals `‖(I - P_M) B c‖` over the exact columns of `M`.
pub fn verify_invariance(m: &SubspaceBasis, params: &BrownianParams) -> Result<InvarianceReport> {
    check_margin(m)?;
    let per_column: Vec<f64> = (0..m.exact_columns())
        .map(|j| m.distance(&apply_vector(params, &m.column(j))))
        .collect();
    let max_residual = per_column.iter().copied().fold(0.0, f64::max);
    Ok(InvarianceReport {
        max_residual,
        per_column,
        boundary_columns: m.dim() - m.exact_columns(),
    })
}

fn check_margin(m: &SubspaceBasis) -> Result<()> {
    let n = m.ambient().max_degree();
    if m.exactness_margin() + 1 > n {
        return Err(Error::Precondition(format!(
            "exactness margin {} must be at most N - 1 = {}",
            m.exactness_margin(),
            n - 1
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceType {
    TypeI,
    TypeII,
    NotInvariant,
}

impl SubspaceType {
    pub fn as_str(&self) -> &'static str {
        match self {
            SubspaceType::TypeI => "type1",
            SubspaceType::TypeII => "type2",
            SubspaceType::NotInvariant => "not_invariant",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub kind: SubspaceType,
    pub invariance: InvarianceReport,
    pub max_fiber_norm: f64,
}

/// Type I when invariant with every fiber component below `tol`, Type II when
/// invariant otherwise.
pub fn classify(m: &SubspaceBasis, params: &BrownianParams, tol: Tolerance) -> Result<Classification> {
    let invariance = verify_invariance(m, params)?;
    let max_fiber_norm = m.fiber_norms().into_iter().fold(0.0, f64::max);
    let kind = if !invariance.is_invariant(tol) {
        SubspaceType::NotInvariant
    } else if max_fiber_norm < tol.value() {
        SubspaceType::TypeI
    } else {
        SubspaceType::TypeII
    };
    Ok(Classification {
        kind,
        invariance,
        max_fiber_norm,
    })
}

/// Parameter recovered from a defect vector `(g, y)`.
#[derive(Debug, Clone)]
pub struct RecoveredElement {
    pub element: GPhiElement,
    /// `‖(z - e^{iθ}) g + σ y - Φ x‖`.
    pub identity_residual: f64,
    /// `|‖x‖ - σ‖y‖|`.
    pub norm_gap: f64,
}

/// How the parameter `x` of a defect vector is read off.
#[derive(Debug, Clone, Copy)]
pub enum ParameterFrame<'a> {
    /// `x = (M_Φ^* h)_0` for a known inner function.
    Inner(&'a InnerSpec),
    /// Coordinates of `h` in an orthonormal basis of the wandering subspace.
    Wandering(&'a SubspaceBasis),
}

/// Recovers `x` from `(g, y)` via `h = (z - e^{iθ}) g + σ y = Φ x`.
pub fn recover_parameter(
    frame: ParameterFrame<'_>,
    params: &BrownianParams,
    v: &BrownianElement,
) -> Result<RecoveredElement> {
    let h = zeta_image(&v.analytic, &v.fiber, params);
    let (x, phi_x) = match frame {
        ParameterFrame::Inner(spec) => {
            let x = spec.adjoint_constant_term(&h)?;
            let phi_x = spec.taylor(h.max_degree()).apply_constant(&x, h.max_degree())?;
            (x, phi_x)
        }
        ParameterFrame::Wandering(w) => {
            let hv = BrownianElement {
                analytic: h.clone(),
                fiber: CVec::zeros(v.fiber.len()),
            }
            .to_vector();
            let x = w.columns().ad_mul(&hv);
            let back = BrownianElement::from_vector(w.ambient(), &(w.columns() * &x))?;
            (x, back.analytic)
        }
    };
    let element = GPhiElement {
        g: v.analytic.clone(),
        y: v.fiber.clone(),
        x,
    };
    let identity_residual = (&h - &phi_x).norm();
    let norm_gap = element.norm_gap(params);
    Ok(RecoveredElement {
        element,
        identity_residual,
        norm_gap,
    })
}

#[derive(Debug, Clone)]
pub struct CanonicalDecomposition {
    /// `M₀ = M ∩ (H² ⊕ {0})`.
    pub m0: SubspaceBasis,
    /// `D_M = M ⊖ M₀`.
    pub defect: SubspaceBasis,
    /// Parameters of the defect basis vectors.
    pub elements: Vec<RecoveredElement>,
    /// Singular values of the fiber map restricted to `M`.
    pub fiber_singular_values: Vec<f64>,
}

impl CanonicalDecomposition {
    pub fn kind(&self) -> SubspaceType {
        if self.defect.dim() == 0 {
            SubspaceType::TypeI
        } else {
            SubspaceType::TypeII
        }
    }
}

/// Splits a verified invariant subspace into `M₀` and the defect space and
/// recovers the `G_Φ` parameter of every defect basis vector. Without a known
/// inner function the parameters are expressed in wandering-subspace coordinates.
pub fn canonical_decomposition(
    m: &SubspaceBasis,
    params: &BrownianParams,
    phi: Option<&InnerSpec>,
    tol: Tolerance,
) -> Result<CanonicalDecomposition> {
    if m.dim() == 0 {
        return Err(Error::Precondition("subspace must be nonzero".into()));
    }
    let report = verify_invariance(m, params)?;
    if !report.is_invariant(tol) {
        return Err(Error::Precondition(format!(
            "subspace is not invariant (max residual {:e})",
            report.max_residual
        )));
    }
    let ambient = m.ambient();
    let fiber = m.fiber_block();
    let svd = sorted_svd(&fiber.adjoint());
    // fiber^* = U S V^*, so the row space of `fiber` is spanned by U's columns
    let s = svd.s.clone();
    let s_max = s.first().copied().unwrap_or(0.0);
    let rank = if s_max < tol.value() {
        0
    } else {
        numerical_rank(&s, s_max, "fiber map on M")?
    };
    let row_space = svd.u.columns(0, rank).into_owned();
    let defect_cols = m.columns() * &row_space;
    let m0_coords = orthonormal_complement(&row_space);
    let m0_cols = m.columns() * &m0_coords;
    let m0 = anchor(ambient, m0_cols, params, "M0")?;
    let defect = SubspaceBasis::from_orthonormal(ambient, defect_cols, 0, "defect");
    if rank > 0 && m0.dim() == 0 {
        return Err(Error::Precondition(
            "Type II subspace with trivial M0; increase N".into(),
        ));
    }
    let elements = if rank == 0 {
        Vec::new()
    } else {
        let wandering;
        let frame = match phi {
            Some(spec) => ParameterFrame::Inner(spec),
            None => {
                wandering = wandering_subspace(&m0, tol)?;
                ParameterFrame::Wandering(&wandering)
            }
        };
        (0..defect.dim())
            .map(|j| recover_parameter(frame, params, &defect.element(j)))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(CanonicalDecomposition {
        m0,
        defect,
        elements,
        fiber_singular_values: s,
    })
}

/// Reorders an orthonormal basis of an invariant subspace so that the part
/// whose `B`-image stays inside the span comes first.
pub fn anchor(
    ambient: AmbientSpec,
    columns: CMat,
    params: &BrownianParams,
    label: &str,
) -> Result<SubspaceBasis> {
    let k = columns.ncols();
    if k == 0 {
        return Ok(SubspaceBasis::from_orthonormal(ambient, columns, 0, label));
    }
    let mut image = CMat::zeros(columns.nrows(), k);
    for j in 0..k {
        image.set_column(j, &apply_vector(params, &columns.column(j).into_owned()));
    }
    let escape = &image - &columns * columns.ad_mul(&image);
    let svd = sorted_svd(&escape);
    let escaping = numerical_rank(&svd.s, 1.0, "escaping directions")?;
    let mut order = CMat::zeros(k, k);
    // exact directions (small singular values) first
    for (slot, j) in (escaping..k).chain(0..escaping).enumerate() {
        order.set_column(slot, &svd.v.column(j));
    }
    Ok(SubspaceBasis::from_orthonormal(
        ambient,
        &columns * order,
        k - escaping,
        label,
    ))
}

/// `W = M₀ ⊖ S M₀`; its dimension is the multiplicity of `M₀` and its columns
/// realize the columns of the inner function up to a unitary.
pub fn wandering_subspace(m0: &SubspaceBasis, tol: Tolerance) -> Result<SubspaceBasis> {
    let max_fiber = m0.fiber_norms().into_iter().fold(0.0, f64::max);
    if max_fiber >= tol.value() {
        return Err(Error::Precondition(format!(
            "M0 must lie in H2 + {{0}} (fiber component {max_fiber:e})"
        )));
    }
    check_margin(m0)?;
    let ambient = m0.ambient();
    let d = ambient.fiber_dim();
    let k = m0.dim();
    let q = m0.columns();
    // shift of each column; exact because the margin is at most N - 1
    let mut sq = CMat::zeros(q.nrows(), k);
    let shifted_rows = ambient.analytic_dim() - d;
    for j in 0..k {
        sq.view_mut((d, j), (shifted_rows, 1))
            .copy_from(&q.view((0, j), (shifted_rows, 1)));
    }
    let cosines = q.ad_mul(&sq);
    let svd = sorted_svd(&cosines);
    let rank = numerical_rank(&svd.s, 1.0, "wandering subspace")?;
    let w = q * svd.u.columns(rank, k - rank);
    Ok(SubspaceBasis::from_orthonormal(ambient, w, 0, "wandering"))
}
