//! Random draws used by property sweeps: vectors, isometries, projections,
//! inner functions and subspaces. All functions take the RNG explicitly so a
//! single seed controls a whole run.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::hardy::AmbientSpec;
use crate::inner::{Factor, InnerSpec};
use crate::linalg::{orthonormalize, vec_norm, CMat, CVec, C64};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| gaussian(rng))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    let v = gaussian_vector(rng, n);
    let norm = vec_norm(&v);
    v / C64::new(norm, 0.0)
}

/// Haar-like random isometry `C^cols → C^rows` (`cols ≤ rows`).
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    assert!(cols <= rows);
    loop {
        let (q, kept) = orthonormalize(&gaussian_matrix(rng, rows, cols), 1e-8);
        if kept.len() == cols {
            return q;
        }
    }
}

/// Orthogonal projection onto a random `rank`-dimensional subspace of `C^d`.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> CMat {
    let q = isometry(rng, d, rank);
    &q * q.adjoint()
}

/// A point of the open disc with modulus at most `max_modulus`.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R, max_modulus: f64) -> C64 {
    let r = max_modulus * rng.random::<f64>().sqrt();
    let t = rng.random::<f64>() * std::f64::consts::TAU;
    C64::from_polar(r, t)
}

/// Shape constraints for random inner functions.
#[derive(Debug, Clone, Copy)]
pub struct InnerDraw {
    pub codomain_dim: usize,
    pub domain_dim: usize,
    pub max_factors: usize,
    pub max_zero_modulus: f64,
}

/// Random rational inner function: `0..=max_factors` factors, each a scalar
/// Blaschke factor or a Potapov factor with a random projection of random rank,
/// followed by a random isometric constant.
pub fn inner_spec<R: Rng + ?Sized>(rng: &mut R, draw: InnerDraw) -> InnerSpec {
    let d = draw.codomain_dim;
    let count = rng.random_range(0..=draw.max_factors);
    let factors = (0..count)
        .map(|_| {
            let zero = disc_point(rng, draw.max_zero_modulus);
            if d == 1 || rng.random_bool(0.3) {
                Factor::Scalar { zero }
            } else {
                let rank = rng.random_range(1..=d);
                Factor::Potapov {
                    zero,
                    projection: projection(rng, d, rank),
                }
            }
        })
        .collect();
    let v = isometry(rng, d, draw.domain_dim);
    InnerSpec::new(v, factors).expect("random draw satisfies the structural invariants")
}

/// `k` random ambient vectors with analytic support in degrees `0..=support`.
pub fn ambient_columns<R: Rng + ?Sized>(
    rng: &mut R,
    ambient: AmbientSpec,
    k: usize,
    support: usize,
) -> CMat {
    let d = ambient.fiber_dim();
    let mut m = CMat::zeros(ambient.total_dim(), k);
    for j in 0..k {
        for n in 0..=support.min(ambient.max_degree()) {
            for i in 0..d {
                m[(ambient.analytic_index(n, i), j)] = gaussian(rng);
            }
        }
        for i in 0..d {
            m[(ambient.fiber_index(i), j)] = gaussian(rng);
        }
    }
    m
}
