//! Reducing subspaces `H²_G ⊕ G`, the scalar irreducibility scan and the
//! extraction of `G` from a reducing subspace.

use rand::Rng;

use crate::brownian::{apply_adjoint_vector, BrownianParams};
use crate::error::{Error, Result};
use crate::hardy::AmbientSpec;
use crate::linalg::{
    hermitian_eigen, numerical_rank, orthonormality_defect, orthonormalize, principal_angles, CMat,
};
use crate::sampling::ambient_columns;
use crate::subspace::{verify_invariance, SubspaceBasis};
use crate::tolerance::Tolerance;

/// Orthonormal basis (columns) of a subspace `G ⊆ C^d`.
#[derive(Debug, Clone)]
pub struct ReducingCandidate {
    basis: CMat,
}

impl ReducingCandidate {
    /// Orthonormalizes the spanning columns.
    pub fn new(span: &CMat) -> Self {
        let (basis, _) = orthonormalize(span, 1e-10);
        Self { basis }
    }

    pub fn whole(d: usize) -> Self {
        Self {
            basis: CMat::identity(d, d),
        }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            basis: CMat::zeros(d, 0),
        }
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn fiber_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn orthonormality_defect(&self) -> f64 {
        orthonormality_defect(&self.basis)
    }
}

/// `{z^n g ⊕ 0 : n ≤ N - 1} ∪ {0 ⊕ g}` for `g` in the basis of `G`.
pub fn build_reducing(g: &ReducingCandidate, ambient: AmbientSpec) -> Result<SubspaceBasis> {
    let d = ambient.fiber_dim();
    if g.fiber_dim() != d {
        return Err(Error::DimensionMismatch {
            context: "reducing candidate",
            expected: d,
            actual: g.fiber_dim(),
        });
    }
    let r = g.dim();
    let n = ambient.max_degree();
    let mut cols = CMat::zeros(ambient.total_dim(), r * (n + 1));
    for j in 0..r {
        for i in 0..d {
            cols[(ambient.fiber_index(i), j)] = g.basis[(i, j)];
        }
    }
    for deg in 0..n {
        for j in 0..r {
            let col = r * (deg + 1) + j;
            for i in 0..d {
                cols[(ambient.analytic_index(deg, i), col)] = g.basis[(i, j)];
            }
        }
    }
    // degree N - 1 is the boundary block
    SubspaceBasis::from_generators(ambient, &cols, r * n, "reducing")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducingReport {
    /// Invariance residual over the exact columns.
    pub fwd_residual: f64,
    /// `max ‖(I - P_M) B^* c‖` over all columns.
    pub adj_residual: f64,
}

impl ReducingReport {
    pub fn is_reducing(&self, tol: Tolerance) -> bool {
        tol.accepts(self.fwd_residual) && tol.accepts(self.adj_residual)
    }
}

pub fn verify_reducing(m: &SubspaceBasis, params: &BrownianParams) -> Result<ReducingReport> {
    let fwd = verify_invariance(m, params)?;
    let adj_residual = (0..m.dim())
        .map(|j| m.distance(&apply_adjoint_vector(params, &m.column(j))))
        .fold(0.0, f64::max);
    Ok(ReducingReport {
        fwd_residual: fwd.max_residual,
        adj_residual,
    })
}

/// `G` spanned by the fiber parts and all Taylor coefficients of the columns
/// of `m`, with numerical rank decided on the singular values.
pub fn extract_fiber_subspace(m: &SubspaceBasis) -> Result<ReducingCandidate> {
    let ambient = m.ambient();
    let d = ambient.fiber_dim();
    let q = m.columns();
    let mut gram = CMat::zeros(d, d);
    for j in 0..q.ncols() {
        for block in 0..=ambient.max_degree() + 1 {
            let v = q.view((block * d, j), (d, 1));
            gram += &v * v.adjoint();
        }
    }
    let (evals, vecs) = hermitian_eigen(&gram);
    let s: Vec<f64> = evals.iter().rev().map(|e| e.max(0.0).sqrt()).collect();
    let s_max = s.first().copied().unwrap_or(0.0);
    let rank = if s_max == 0.0 {
        0
    } else {
        numerical_rank(&s, s_max, "fiber span of reducing subspace")?
    };
    let basis = vecs.columns(d - rank, rank).into_owned();
    Ok(ReducingCandidate { basis })
}

#[derive(Debug, Clone)]
pub struct ConverseReport {
    pub extracted: ReducingCandidate,
    /// Largest principal angle between `m` and `build_reducing(extracted)`.
    pub max_angle: f64,
}

/// Extracts `G` from `m` and measures how far `m` is from `H²_G ⊕ G`.
pub fn converse_check(m: &SubspaceBasis) -> Result<ConverseReport> {
    let extracted = extract_fiber_subspace(m)?;
    let rebuilt = build_reducing(&extracted, m.ambient())?;
    let max_angle = if rebuilt.dim() != m.dim() {
        std::f64::consts::FRAC_PI_2
    } else if m.dim() == 0 {
        0.0
    } else {
        principal_angles(m.columns(), rebuilt.columns())
            .into_iter()
            .fold(0.0, f64::max)
    };
    Ok(ConverseReport { extracted, max_angle })
}

#[derive(Debug, Clone)]
pub struct IrreducibilityReport {
    pub trials: usize,
    /// Residuals of the two product candidates `G = {0}` and `G = C`.
    pub trivial: [ReducingReport; 2],
    /// Random subspaces that passed `verify_reducing`.
    pub random_passing: usize,
    /// Smallest `max(fwd, adj)` residual seen among random subspaces.
    pub min_random_residual: f64,
    /// Passing subspaces other than `{0}` and the whole space.
    pub nontrivial_found: usize,
}

/// For `d = 1` the only product candidates are `G = {0}` and `G = C`; checks
/// both and then `trials` random subspaces of random dimension.
pub fn irreducibility_scan<R: Rng + ?Sized>(
    params: &BrownianParams,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Result<IrreducibilityReport> {
    let ambient = params.ambient();
    if ambient.fiber_dim() != 1 {
        return Err(Error::Precondition("irreducibility scan needs d = 1".into()));
    }
    let zero = verify_reducing(&build_reducing(&ReducingCandidate::zero(1), ambient)?, params)?;
    let whole = verify_reducing(&build_reducing(&ReducingCandidate::whole(1), ambient)?, params)?;
    let n = ambient.max_degree();
    let mut random_passing = 0;
    let mut min_random_residual = f64::INFINITY;
    for _ in 0..trials {
        let k = rng.random_range(1..=n);
        let support = rng.random_range(0..n);
        let cols = ambient_columns(rng, ambient, k, support);
        let m = SubspaceBasis::custom(ambient, &cols, "random")?;
        let rep = verify_reducing(&m, params)?;
        min_random_residual = min_random_residual.min(rep.fwd_residual.max(rep.adj_residual));
        if rep.is_reducing(tol) {
            random_passing += 1;
        }
    }
    let nontrivial_found = random_passing;
    Ok(IrreducibilityReport {
        trials,
        trivial: [zero, whole],
        random_passing,
        min_random_residual,
        nontrivial_found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::InnerSpec;
    use crate::linalg::C64;
    use crate::subspace::{build_type1, build_type2};
    use rand::SeedableRng;

    fn params(d: usize, n: usize) -> BrownianParams {
        BrownianParams::new(1.2, 0.7, AmbientSpec::new(d, n).unwrap()).unwrap()
    }

    #[test]
    fn product_spaces_reduce() {
        let p = params(2, 16);
        let tol = Tolerance::for_ambient(&p.ambient());
        for g in [
            ReducingCandidate::whole(2),
            ReducingCandidate::zero(2),
            ReducingCandidate::new(&CMat::from_column_slice(2, 1, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])),
        ] {
            let m = build_reducing(&g, p.ambient()).unwrap();
            assert_eq!(m.dim(), g.dim() * 17);
            assert!(verify_reducing(&m, &p).unwrap().is_reducing(tol));
        }
    }

    #[test]
    fn type1_of_z_is_not_reducing() {
        let p = params(1, 16);
        let m = build_type1(&InnerSpec::monomial(1), p.ambient()).unwrap();
        let rep = verify_reducing(&m, &p).unwrap();
        assert!(rep.fwd_residual < 1e-14);
        assert!((rep.adj_residual - 1.0).abs() < 1e-14);
    }

    #[test]
    fn type2_is_not_reducing() {
        let p = params(1, 16);
        let m = build_type2(&InnerSpec::monomial(2), &p, &CMat::identity(1, 1)).unwrap();
        let rep = verify_reducing(&m, &p).unwrap();
        assert!(rep.adj_residual > 1e-3);
    }

    #[test]
    fn extraction_recovers_g() {
        let p = params(3, 12);
        let span = CMat::from_column_slice(
            3,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, -2.0),
            ],
        );
        let g = ReducingCandidate::new(&span);
        let m = build_reducing(&g, p.ambient()).unwrap();
        let rep = converse_check(&m).unwrap();
        assert!(rep.max_angle < 1e-10);
        assert!(principal_angles(rep.extracted.basis(), g.basis())[1] < 1e-10);
    }

    #[test]
    fn scalar_scan_finds_nothing() {
        let p = params(1, 24);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let rep = irreducibility_scan(&p, 20, Tolerance::for_ambient(&p.ambient()), &mut rng).unwrap();
        assert_eq!(rep.nontrivial_found, 0);
        assert!(rep.trivial.iter().all(|r| r.is_reducing(Tolerance(1e-9))));
    }
}
