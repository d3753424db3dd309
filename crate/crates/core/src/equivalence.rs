//! Unitary equivalence of restricted Brownian shifts.
//!
//! Every positive verdict carries an explicit intertwiner `U` assembled from
//! generator images, `U = C₂ (C₁^* C₁)^{-1} C₁^*`, together with the
//! intertwining residual measured on generators that stay in the exact regime.

use crate::brownian::{apply_vector, BrownianParams};
use crate::error::{Error, Result};
use crate::hardy::AmbientSpec;
use crate::inner::InnerSpec;
use crate::linalg::{
    cis, hermitian_eigen, orthonormality_defect, orthonormalize, spectral_norm, vec_norm, CMat,
    CVec, C64,
};
use crate::operator::{Basis, OperatorMatrix};
use crate::subspace::{
    build_gphi_element, canonical_decomposition, classify, recover_parameter, type1_generators,
    wandering_subspace, ParameterFrame, SubspaceBasis, SubspaceType,
};
use crate::tolerance::Tolerance;

/// Relative tolerance on both sides of the scalar norm identity.
pub const SCALAR_CRITERION_REL_TOL: f64 = 1e-6;

/// Angles closer than this are treated as equal.
pub const THETA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reason {
    TypeMismatch,
    DimMismatch,
    ThetaMismatch,
    ScalarCriterionFailed,
    Certified,
}

impl Reason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reason::TypeMismatch => "type_mismatch",
            Reason::DimMismatch => "dim_mismatch",
            Reason::ThetaMismatch => "theta_mismatch",
            Reason::ScalarCriterionFailed => "scalar_criterion_failed",
            Reason::Certified => "certified",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub reason: Reason,
    pub intertwiner: Option<OperatorMatrix>,
    /// Largest `‖U B₁ v - B₂ U v‖ / ‖v‖` over exact generators.
    pub residual: Option<f64>,
    /// `‖(U Q)^*(U Q) - I‖` for an orthonormal basis `Q` of the generator span.
    pub isometry_defect: Option<f64>,
}

impl EquivalenceVerdict {
    pub fn rejected(reason: Reason) -> Self {
        Self {
            equivalent: false,
            reason,
            intertwiner: None,
            residual: None,
            isometry_defect: None,
        }
    }
}

/// Verdict for a pair whose classifications differ.
pub fn decide_types(a: SubspaceType, b: SubspaceType) -> Option<EquivalenceVerdict> {
    (a != b).then(|| EquivalenceVerdict::rejected(Reason::TypeMismatch))
}

fn same_theta(a: &BrownianParams, b: &BrownianParams) -> bool {
    let d = (a.theta() - b.theta()).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d) < THETA_TOL
}

/// Intertwiner determined by `U c₁ⱼ = c₂ⱼ` on the span of `domain` and zero
/// on its orthogonal complement.
pub fn assemble_intertwiner(domain: &CMat, image: &CMat) -> Result<CMat> {
    if domain.ncols() != image.ncols() || domain.nrows() != image.nrows() {
        return Err(Error::DimensionMismatch {
            context: "intertwiner generators",
            expected: domain.ncols(),
            actual: image.ncols(),
        });
    }
    let gram = domain.ad_mul(domain);
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Precondition("intertwiner generators are dependent".into()))?;
    Ok(image * inv * domain.adjoint())
}

/// Largest relative intertwining residual over the first `exact` generators.
pub fn intertwining_residual(
    u: &CMat,
    generators: &CMat,
    exact: usize,
    p1: &BrownianParams,
    p2: &BrownianParams,
) -> f64 {
    (0..exact.min(generators.ncols()))
        .map(|j| {
            let v = generators.column(j).into_owned();
            let lhs = u * apply_vector(p1, &v);
            let rhs = apply_vector(p2, &(u * &v));
            vec_norm(&(lhs - rhs)) / vec_norm(&v)
        })
        .fold(0.0, f64::max)
}

/// `‖(U Q)^*(U Q) - I‖` with `Q` an orthonormal basis of the generator span.
pub fn isometry_defect(u: &CMat, generators: &CMat) -> f64 {
    let (q, _) = orthonormalize(generators, 1e-10);
    orthonormality_defect(&(u * q))
}

fn certified(
    ambient: AmbientSpec,
    domain: &CMat,
    image: &CMat,
    exact: usize,
    exact_degree: usize,
    p1: &BrownianParams,
    p2: &BrownianParams,
) -> Result<EquivalenceVerdict> {
    let u = assemble_intertwiner(domain, image)?;
    let residual = intertwining_residual(&u, domain, exact, p1, p2);
    let iso = isometry_defect(&u, domain);
    let op = OperatorMatrix::new(u, Basis::Ambient(ambient), Basis::Ambient(ambient), exact_degree)?;
    Ok(EquivalenceVerdict {
        equivalent: true,
        reason: Reason::Certified,
        intertwiner: Some(op),
        residual: Some(residual),
        isometry_defect: Some(iso),
    })
}

fn same_ambient(a: &BrownianParams, b: &BrownianParams) -> Result<AmbientSpec> {
    if a.ambient() != b.ambient() {
        return Err(Error::Precondition(
            "both subspaces must live in the same truncated ambient space".into(),
        ));
    }
    Ok(a.ambient())
}

/// Generators `Φ z^n U e_j` for `n = 0..=k`, ordered like [`type1_generators`].
fn rotated_type1(spec: &InnerSpec, ambient: &AmbientSpec, k: usize, u: &CMat) -> Result<CMat> {
    let (gens, own_k) = type1_generators(spec, ambient)?;
    let d2 = spec.domain_dim();
    let mut out = CMat::zeros(gens.nrows(), (k + 1) * u.ncols());
    for n in 0..=k.min(own_k) {
        let block = gens.columns(n * d2, d2) * u;
        out.columns_mut(n * u.ncols(), u.ncols()).copy_from(&block);
    }
    Ok(out)
}

/// Type I subspaces are equivalent iff their multiplicities agree. The
/// intertwiner sends `Φ₁ z^n e_j` to `Φ₂ z^n e_j`.
pub fn decide_type1(
    m1: &SubspaceBasis,
    spec1: &InnerSpec,
    p1: &BrownianParams,
    m2: &SubspaceBasis,
    spec2: &InnerSpec,
    p2: &BrownianParams,
    tol: Tolerance,
) -> Result<EquivalenceVerdict> {
    let ambient = same_ambient(p1, p2)?;
    for (m, p) in [(m1, p1), (m2, p2)] {
        let kind = classify(m, p, tol)?.kind;
        if kind != SubspaceType::TypeI {
            return Err(Error::Precondition(format!(
                "decide_type1 expects Type I subspaces, got {}",
                kind.as_str()
            )));
        }
    }
    let w1 = wandering_subspace(m1, tol)?.dim();
    let w2 = wandering_subspace(m2, tol)?.dim();
    if w1 != w2 {
        return Ok(EquivalenceVerdict::rejected(Reason::DimMismatch));
    }
    if spec1.domain_dim() != w1 || spec2.domain_dim() != w2 {
        return Err(Error::Precondition(
            "inner function domain dimension disagrees with the subspace multiplicity".into(),
        ));
    }
    let (_, k1) = type1_generators(spec1, &ambient)?;
    let (_, k2) = type1_generators(spec2, &ambient)?;
    let k = k1.min(k2);
    let id = CMat::identity(w1, w1);
    let domain = rotated_type1(spec1, &ambient, k, &id)?;
    let image = rotated_type1(spec2, &ambient, k, &id)?;
    certified(ambient, &domain, &image, k * w1, k.saturating_sub(1), p1, p2)
}

/// Canonical data of a Type II subspace: orthonormal defect basis, the
/// recovered parameter of each defect basis vector and the Type I generators.
#[derive(Debug, Clone)]
pub struct CanonicalTypeII {
    pub params: BrownianParams,
    pub spec: InnerSpec,
    pub basis: SubspaceBasis,
    /// Orthonormal basis of `⟨G⟩` (ambient columns).
    pub defect: CMat,
    /// Column `i` is the parameter `x'` of defect column `i`.
    pub parameters: CMat,
}

impl CanonicalTypeII {
    /// Runs the canonical decomposition of `m` with the parameter frame of `spec`.
    pub fn from_subspace(
        m: &SubspaceBasis,
        spec: &InnerSpec,
        params: &BrownianParams,
        tol: Tolerance,
    ) -> Result<Self> {
        let dec = canonical_decomposition(m, params, Some(spec), tol)?;
        if dec.defect.dim() == 0 {
            return Err(Error::Precondition("subspace is Type I".into()));
        }
        let mut parameters = CMat::zeros(spec.domain_dim(), dec.elements.len());
        for (j, e) in dec.elements.iter().enumerate() {
            parameters.set_column(j, &e.element.x);
        }
        Ok(Self {
            params: *params,
            spec: spec.clone(),
            basis: m.clone(),
            defect: dec.defect.columns().clone(),
            parameters,
        })
    }

    pub fn defect_dim(&self) -> usize {
        self.defect.ncols()
    }
}

fn unitary_defect(m: &CMat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    spectral_norm(&(m.ad_mul(m) - CMat::identity(m.ncols(), m.ncols())))
}

/// Checks a candidate pair `(U_G, U_E)`: both unitary and
/// `U_E x₁' = x₂'(U_G d)` for every defect basis vector `d`. On success the
/// full intertwiner `[Φ₁h; 0] + d ↦ [Φ₂ U_E h; 0] + U_G d` is assembled.
/// `ug` is expressed in the orthonormal defect bases of both subspaces.
pub fn certify_type2(
    m1: &CanonicalTypeII,
    m2: &CanonicalTypeII,
    ug: &CMat,
    ue: &CMat,
    tol: Tolerance,
) -> Result<EquivalenceVerdict> {
    let ambient = same_ambient(&m1.params, &m2.params)?;
    if !same_theta(&m1.params, &m2.params) {
        return Ok(EquivalenceVerdict::rejected(Reason::ThetaMismatch));
    }
    if m1.defect_dim() != m2.defect_dim() || m1.spec.domain_dim() != m2.spec.domain_dim() {
        return Ok(EquivalenceVerdict::rejected(Reason::DimMismatch));
    }
    let r = m1.defect_dim();
    let d2 = m1.spec.domain_dim();
    if ug.nrows() != r || ug.ncols() != r {
        return Err(Error::DimensionMismatch {
            context: "U_G",
            expected: r,
            actual: ug.nrows().max(ug.ncols()),
        });
    }
    if ue.nrows() != d2 || ue.ncols() != d2 {
        return Err(Error::DimensionMismatch {
            context: "U_E",
            expected: d2,
            actual: ue.nrows().max(ue.ncols()),
        });
    }
    for (name, m) in [("U_G", ug), ("U_E", ue)] {
        let defect = unitary_defect(m);
        if !tol.accepts(defect) {
            return Err(Error::NotUnitary { context: name, defect });
        }
    }
    let mapped = &m2.parameters * ug;
    for i in 0..r {
        let mismatch = vec_norm(&(ue * m1.parameters.column(i) - mapped.column(i)));
        if !tol.accepts(mismatch) {
            return Err(Error::Incompatible { index: i, mismatch });
        }
    }
    let (_, k1) = type1_generators(&m1.spec, &ambient)?;
    let (_, k2) = type1_generators(&m2.spec, &ambient)?;
    let k = k1.min(k2);
    let id = CMat::identity(d2, d2);
    let t1 = rotated_type1(&m1.spec, &ambient, k, &id)?;
    let t2 = rotated_type1(&m2.spec, &ambient, k, ue)?;
    let n = ambient.total_dim();
    let mut domain = CMat::zeros(n, r + t1.ncols());
    let mut image = CMat::zeros(n, r + t1.ncols());
    domain.columns_mut(0, r).copy_from(&m1.defect);
    image.columns_mut(0, r).copy_from(&(&m2.defect * ug));
    domain.columns_mut(r, t1.ncols()).copy_from(&t1);
    image.columns_mut(r, t2.ncols()).copy_from(&t2);
    certified(
        ambient,
        &domain,
        &image,
        r + k * d2,
        k.saturating_sub(1),
        &m1.params,
        &m2.params,
    )
}

fn require_scalar(p: &BrownianParams, psi: &InnerSpec) -> Result<()> {
    if p.ambient().fiber_dim() != 1 || !psi.is_scalar() || psi.domain_dim() != 1 {
        return Err(Error::Precondition(
            "scalar equivalence needs d = 1 and a scalar inner function".into(),
        ));
    }
    Ok(())
}

/// Scalar Type II subspace `⟨(g, 1)⟩ ⊕ ψ H²` and the pieces needed to decide
/// equivalence.
#[derive(Debug, Clone)]
pub struct ScalarTypeII {
    pub canonical: CanonicalTypeII,
    /// `g` for the normalization `y = 1`, as an ambient column `(g, 1)`.
    pub unit_fiber_element: CVec,
    /// `‖g‖²` for that normalization.
    pub g_norm_sq: f64,
    pub boundary_value: C64,
}

impl ScalarTypeII {
    pub fn build(p: &BrownianParams, psi: &InnerSpec, tol: Tolerance) -> Result<Self> {
        require_scalar(p, psi)?;
        let boundary_value = psi.evaluate(p.lambda())?[(0, 0)];
        let x = CVec::from_element(1, boundary_value.conj() * p.sigma());
        let e = build_gphi_element(psi, p, &x)?;
        let g_norm_sq = e.g.norm().powi(2);
        let m = crate::subspace::build_type2(psi, p, &CMat::identity(1, 1))?;
        let canonical = CanonicalTypeII::from_subspace(&m, psi, p, tol)?;
        Ok(Self {
            canonical,
            unit_fiber_element: e.to_vector(),
            g_norm_sq,
            boundary_value,
        })
    }

    /// Coefficient of the unit defect basis vector in `(g, 1)`.
    fn coordinate(&self) -> C64 {
        self.canonical
            .defect
            .column(0)
            .dotc(&self.unit_fiber_element)
    }
}

/// `σ₂²(1 + ‖g₁‖²)` and `σ₁²(1 + ‖g₂‖²)`.
pub fn scalar_criterion_sides(s1: &ScalarTypeII, s2: &ScalarTypeII) -> (f64, f64) {
    let (a, b) = (s1.canonical.params.sigma(), s2.canonical.params.sigma());
    (b * b * (1.0 + s1.g_norm_sq), a * a * (1.0 + s2.g_norm_sq))
}

pub fn scalar_criterion_holds(s1: &ScalarTypeII, s2: &ScalarTypeII) -> bool {
    let (l, r) = scalar_criterion_sides(s1, s2);
    (l - r).abs() <= SCALAR_CRITERION_REL_TOL * l.abs().max(r.abs())
}

/// Decides equivalence of the canonical Type II subspaces built from scalar
/// inner functions `ψ₁`, `ψ₂`; certifies positive decisions with
/// `U_G (g₁, 1) = (σ₁/σ₂)(g₂, 1)` and `U_E = conj(ψ₂(e^{iθ})) ψ₁(e^{iθ})`.
pub fn decide_scalar_type2(
    p1: &BrownianParams,
    psi1: &InnerSpec,
    p2: &BrownianParams,
    psi2: &InnerSpec,
    tol: Tolerance,
) -> Result<EquivalenceVerdict> {
    require_scalar(p1, psi1)?;
    require_scalar(p2, psi2)?;
    if !same_theta(p1, p2) {
        return Ok(EquivalenceVerdict::rejected(Reason::ThetaMismatch));
    }
    let s1 = ScalarTypeII::build(p1, psi1, tol)?;
    let s2 = ScalarTypeII::build(p2, psi2, tol)?;
    decide_scalar_built(&s1, &s2, tol)
}

/// [`decide_scalar_type2`] on subspaces that are already built.
pub fn decide_scalar_built(s1: &ScalarTypeII, s2: &ScalarTypeII, tol: Tolerance) -> Result<EquivalenceVerdict> {
    let (p1, p2) = (&s1.canonical.params, &s2.canonical.params);
    if !same_theta(p1, p2) {
        return Ok(EquivalenceVerdict::rejected(Reason::ThetaMismatch));
    }
    if !scalar_criterion_holds(s1, s2) {
        return Ok(EquivalenceVerdict::rejected(Reason::ScalarCriterionFailed));
    }
    let ratio = C64::new(p1.sigma() / p2.sigma(), 0.0);
    let ug = CMat::from_element(1, 1, ratio * s2.coordinate() / s1.coordinate());
    let ue = CMat::from_element(1, 1, s2.boundary_value.conj() * s1.boundary_value);
    certify_type2(&s1.canonical, &s2.canonical, &ug, &ue, tol)
}

/// Tries `U_G = e^{iφ}` for `phases` equally spaced angles, each with the
/// unit-modulus `U_E` suggested by the parameters; returns the first
/// certificate that passes.
pub fn scalar_certificate_search(
    p1: &BrownianParams,
    psi1: &InnerSpec,
    p2: &BrownianParams,
    psi2: &InnerSpec,
    phases: usize,
    tol: Tolerance,
) -> Result<Option<EquivalenceVerdict>> {
    require_scalar(p1, psi1)?;
    require_scalar(p2, psi2)?;
    if !same_theta(p1, p2) {
        return Ok(None);
    }
    let s1 = ScalarTypeII::build(p1, psi1, tol)?;
    let s2 = ScalarTypeII::build(p2, psi2, tol)?;
    let x1 = s1.canonical.parameters[(0, 0)];
    let x2 = s2.canonical.parameters[(0, 0)];
    for i in 0..phases.max(1) {
        let phase = cis(std::f64::consts::TAU * i as f64 / phases.max(1) as f64);
        let ue_raw = phase * x2 / x1;
        let ue = CMat::from_element(1, 1, ue_raw / ue_raw.norm());
        let ug = CMat::from_element(1, 1, phase);
        match certify_type2(&s1.canonical, &s2.canonical, &ug, &ue, tol) {
            Ok(v) if v.equivalent && v.residual.is_some_and(|r| tol.accepts(r)) => return Ok(Some(v)),
            Ok(_) | Err(Error::Incompatible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Largest singular value of the compression of `B` to `M`, restricted to the
/// exact columns.
pub fn restricted_norm(m: &SubspaceBasis, params: &BrownianParams) -> f64 {
    let q = m.columns();
    let k = m.exact_columns();
    if k == 0 {
        return 0.0;
    }
    let mut image = CMat::zeros(q.nrows(), k);
    for j in 0..k {
        image.set_column(j, &apply_vector(params, &q.column(j).into_owned()));
    }
    spectral_norm(&q.ad_mul(&image))
}

#[derive(Debug, Clone)]
pub struct NormSide {
    pub kind: SubspaceType,
    pub norm: f64,
    /// `1` for Type I, `√(1 + σ²μ)` for Type II.
    pub bound: f64,
    /// `μ = min ‖y‖²` over unit defect vectors (Type II only).
    pub mu: Option<f64>,
    pub within_bound: bool,
}

#[derive(Debug, Clone)]
pub struct NormSeparation {
    pub first: NormSide,
    pub second: NormSide,
    /// `Some(true)` when the norms separate a Type I from a Type II subspace;
    /// `None` when no cross-type conclusion applies.
    pub non_equivalent: Option<bool>,
}

fn norm_side(m: &SubspaceBasis, params: &BrownianParams, tol: Tolerance) -> Result<NormSide> {
    let kind = classify(m, params, tol)?.kind;
    let norm = restricted_norm(m, params);
    Ok(match kind {
        SubspaceType::TypeI => NormSide {
            kind,
            norm,
            bound: 1.0,
            mu: None,
            within_bound: (norm - 1.0).abs() < tol.value(),
        },
        SubspaceType::TypeII => {
            let dec = canonical_decomposition(m, params, None, tol)?;
            let f = dec.defect.fiber_block();
            let (evals, _) = hermitian_eigen(&f.ad_mul(&f));
            let mu = evals.first().copied().unwrap_or(0.0);
            let bound = (1.0 + params.sigma().powi(2) * mu).sqrt();
            NormSide {
                kind,
                norm,
                bound,
                mu: Some(mu),
                within_bound: norm >= bound - tol.value(),
            }
        }
        SubspaceType::NotInvariant => NormSide {
            kind,
            norm,
            bound: f64::NAN,
            mu: None,
            within_bound: false,
        },
    })
}

/// Restricted norms of two classified subspaces; a Type I norm of `1` against
/// a Type II norm above `1` rules out unitary equivalence.
pub fn norm_separation(
    a: (&SubspaceBasis, &BrownianParams),
    b: (&SubspaceBasis, &BrownianParams),
    tol: Tolerance,
) -> Result<NormSeparation> {
    let first = norm_side(a.0, a.1, tol)?;
    let second = norm_side(b.0, b.1, tol)?;
    let cross = matches!(
        (first.kind, second.kind),
        (SubspaceType::TypeI, SubspaceType::TypeII) | (SubspaceType::TypeII, SubspaceType::TypeI)
    );
    let non_equivalent = cross.then(|| {
        let (t1, t2) = if first.kind == SubspaceType::TypeI {
            (&first, &second)
        } else {
            (&second, &first)
        };
        t1.within_bound && t2.within_bound && t2.bound > 1.0 + tol.value()
    });
    Ok(NormSeparation {
        first,
        second,
        non_equivalent,
    })
}

/// Parameter of a single defect vector, used by callers that build their own
/// candidate maps.
pub fn defect_parameter(
    spec: &InnerSpec,
    params: &BrownianParams,
    v: &CVec,
) -> Result<CVec> {
    let e = crate::hardy::BrownianElement::from_vector(params.ambient(), v)?;
    Ok(recover_parameter(ParameterFrame::Inner(spec), params, &e)?.element.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::build_type1;

    fn params(sigma: f64, theta: f64, n: usize) -> BrownianParams {
        BrownianParams::new(sigma, theta, AmbientSpec::new(1, n).unwrap()).unwrap()
    }

    #[test]
    fn z_and_z_squared_type1_are_equivalent() {
        let p = params(1.0, 0.0, 32);
        let tol = Tolerance::for_ambient(&p.ambient());
        let (a, b) = (InnerSpec::monomial(1), InnerSpec::monomial(2));
        let m1 = build_type1(&a, p.ambient()).unwrap();
        let m2 = build_type1(&b, p.ambient()).unwrap();
        let v = decide_type1(&m1, &a, &p, &m2, &b, &p, tol).unwrap();
        assert!(v.equivalent);
        assert!(v.residual.unwrap() < 1e-13);
        assert!(v.isometry_defect.unwrap() < 1e-13);
    }

    #[test]
    fn multiplicity_mismatch() {
        let amb = AmbientSpec::new(2, 16).unwrap();
        let p = BrownianParams::new(1.0, 0.0, amb).unwrap();
        let tol = Tolerance::for_ambient(&amb);
        let e1 = CMat::from_column_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let a = InnerSpec::new(e1, vec![]).unwrap();
        let b = InnerSpec::constant(CMat::identity(2, 2)).unwrap();
        let m1 = build_type1(&a, amb).unwrap();
        let m2 = build_type1(&b, amb).unwrap();
        let v = decide_type1(&m1, &a, &p, &m2, &b, &p, tol).unwrap();
        assert!(!v.equivalent);
        assert_eq!(v.reason, Reason::DimMismatch);
    }

    #[test]
    fn scalar_examples() {
        let n = 64;
        let tol = Tolerance::for_ambient(&AmbientSpec::new(1, n).unwrap());
        let v = decide_scalar_type2(
            &params(1.0, 0.0, n),
            &InnerSpec::monomial(2),
            &params(0.5f64.sqrt(), 0.0, n),
            &InnerSpec::monomial(1),
            tol,
        )
        .unwrap();
        assert!(v.equivalent, "{v:?}");
        assert!(v.residual.unwrap() < 1e-10);
        let v = decide_scalar_type2(
            &params(1.0, 0.0, n),
            &InnerSpec::monomial(1),
            &params(1.0, 0.0, n),
            &InnerSpec::monomial(2),
            tol,
        )
        .unwrap();
        assert_eq!(v.reason, Reason::ScalarCriterionFailed);
        let v = decide_scalar_type2(
            &params(1.0, 0.0, n),
            &InnerSpec::monomial(1),
            &params(1.0, 0.3, n),
            &InnerSpec::monomial(1),
            tol,
        )
        .unwrap();
        assert_eq!(v.reason, Reason::ThetaMismatch);
    }

    #[test]
    fn negated_ue_breaks_compatibility() {
        let p = params(1.0, 0.0, 32);
        let tol = Tolerance::for_ambient(&p.ambient());
        let s = ScalarTypeII::build(&p, &InnerSpec::monomial(1), tol).unwrap();
        let id = CMat::identity(1, 1);
        let v = certify_type2(&s.canonical, &s.canonical, &id, &id, tol).unwrap();
        assert!(v.equivalent);
        assert!(v.residual.unwrap() < 1e-14);
        let err = certify_type2(&s.canonical, &s.canonical, &id, &(-id.clone()), tol).unwrap_err();
        assert!(matches!(err, Error::Incompatible { index: 0, .. }));
    }

    #[test]
    fn norm_separation_z() {
        let p = params(1.0, 0.0, 32);
        let tol = Tolerance::for_ambient(&p.ambient());
        let z = InnerSpec::monomial(1);
        let t1 = build_type1(&z, p.ambient()).unwrap();
        let t2 = crate::subspace::build_type2(&z, &p, &CMat::identity(1, 1)).unwrap();
        let rep = norm_separation((&t1, &p), (&t2, &p), tol).unwrap();
        assert!((rep.first.norm - 1.0).abs() < 1e-12);
        assert!((rep.second.mu.unwrap() - 0.5).abs() < 1e-12);
        assert!(rep.second.norm >= 1.5f64.sqrt() - 1e-12);
        assert_eq!(rep.non_equivalent, Some(true));
        let same = norm_separation((&t1, &p), (&t1, &p), tol).unwrap();
        assert_eq!(same.non_equivalent, None);
    }
}
