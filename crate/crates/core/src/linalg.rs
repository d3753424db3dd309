//! Dense complex linear algebra helpers shared by the subspace machinery.
//!
//! Everything here works on column collections stored as `DMatrix<Complex64>`:
//! orthonormalization with a reorthogonalization pass, orthogonal complements,
//! rank decisions with an ambiguity band, and principal angles computed from
//! sines so that tiny angles keep full relative accuracy.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Relative threshold below which a singular value counts as zero.
pub const RANK_REL_TOL: f64 = 1e-7;
/// Width of the ambiguity band above [`RANK_REL_TOL`].
pub const RANK_BAND: f64 = 10.0;

#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a, b⟩`, linear in the first argument and conjugate-linear in the second.
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// Removes the component of `v` in the span of the orthonormal columns `q`
/// (two passes of classical Gram-Schmidt).
pub fn project_out(q: &CMat, v: &CVec) -> CVec {
    let mut r = v.clone();
    if q.ncols() == 0 {
        return r;
    }
    for _ in 0..2 {
        let coeffs = q.ad_mul(&r);
        r -= q * coeffs;
    }
    r
}

/// Distance from `v` to the span of the orthonormal columns `q`.
pub fn distance_to_span(q: &CMat, v: &CVec) -> f64 {
    vec_norm(&project_out(q, v))
}

/// Modified Gram-Schmidt with a full reorthogonalization pass.
///
/// Columns whose residual falls below `rel_tol` times their original norm are
/// dropped. Returns the orthonormal columns together with the indices of the
/// input columns that were kept, in order.
pub fn orthonormalize(cols: &CMat, rel_tol: f64) -> (CMat, Vec<usize>) {
    let n = cols.nrows();
    let mut out: Vec<CVec> = Vec::with_capacity(cols.ncols());
    let mut kept = Vec::with_capacity(cols.ncols());
    for j in 0..cols.ncols() {
        let mut v: CVec = cols.column(j).into_owned();
        let original = vec_norm(&v);
        if original == 0.0 {
            continue;
        }
        for _pass in 0..2 {
            for q in &out {
                let c = inner(&v, q);
                v.axpy(-c, q, ONE);
            }
        }
        let res = vec_norm(&v);
        if res > rel_tol * original {
            v /= C64::new(res, 0.0);
            out.push(v);
            kept.push(j);
        }
    }
    let mut q = CMat::zeros(n, out.len());
    for (j, v) in out.iter().enumerate() {
        q.set_column(j, v);
    }
    (q, kept)
}

/// Orthonormal basis of the orthogonal complement (in `C^n`) of the span of the
/// orthonormal columns of `basis`. Uses column-pivoted Gram-Schmidt on the
/// standard basis vectors, so the result has exactly `n - basis.ncols()` columns.
pub fn orthonormal_complement(basis: &CMat) -> CMat {
    let n = basis.nrows();
    let r = basis.ncols();
    let want = n.saturating_sub(r);
    let mut accepted: Vec<CVec> = (0..r).map(|j| basis.column(j).into_owned()).collect();
    // residual of each unit vector against everything accepted so far
    let mut candidates: Vec<CVec> = (0..n)
        .map(|i| {
            let mut e = CVec::zeros(n);
            e[i] = ONE;
            project_out(basis, &e)
        })
        .collect();
    let mut used = vec![false; n];
    let mut out = CMat::zeros(n, want);
    for slot in 0..want {
        let (best, _) = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, c)| (i, vec_norm(c)))
            .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        used[best] = true;
        let mut v = candidates[best].clone();
        for _pass in 0..2 {
            for q in &accepted {
                let c = inner(&v, q);
                v.axpy(-c, q, ONE);
            }
        }
        let nv = vec_norm(&v);
        v /= C64::new(nv, 0.0);
        for (i, c) in candidates.iter_mut().enumerate() {
            if !used[i] {
                let k = inner(c, &v);
                c.axpy(-k, &v, ONE);
            }
        }
        out.set_column(slot, &v);
        accepted.push(v);
    }
    out
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let svd = SVD::new(m.clone(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Thin SVD with singular values sorted in descending order.
pub struct SortedSvd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

pub fn sorted_svd(m: &CMat) -> SortedSvd {
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = CMat::from_columns(&order.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>());
    let v = CMat::from_columns(
        &order
            .iter()
            .map(|&i| v_t.row(i).adjoint().into_owned())
            .collect::<Vec<_>>(),
    );
    SortedSvd { u, s, v }
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Counts the singular values that are numerically nonzero.
///
/// `s` must be sorted in descending order. Values below `RANK_REL_TOL * scale`
/// are zero; values inside `[RANK_REL_TOL * scale, RANK_BAND * RANK_REL_TOL * scale]`
/// produce [`Error::RankAmbiguous`]. `scale` is usually the largest singular value,
/// but callers that know the natural scale (e.g. unit-norm columns) pass it directly.
pub fn numerical_rank(s: &[f64], scale: f64, context: &'static str) -> Result<usize> {
    if scale <= 0.0 {
        return Ok(0);
    }
    let low = RANK_REL_TOL * scale;
    let high = RANK_BAND * low;
    let mut rank = 0;
    for &v in s {
        if v > high {
            rank += 1;
        } else if v >= low {
            return Err(Error::RankAmbiguous {
                context,
                value: v,
                low,
                high,
            });
        }
    }
    Ok(rank)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Principal angles (ascending, radians) between the spans of two orthonormal
/// column sets. When the dimensions differ the angles of the smaller subspace
/// relative to the larger one are returned.
///
/// Angles come from the sines `‖(I - P_large) Q_small‖`, which stay accurate
/// for nearly coincident subspaces where arccos of the cosines would not.
pub fn principal_angles(a: &CMat, b: &CMat) -> Vec<f64> {
    let (large, small) = if a.ncols() >= b.ncols() { (a, b) } else { (b, a) };
    if small.ncols() == 0 {
        return Vec::new();
    }
    let mut resid = small - large * large.ad_mul(small);
    resid -= large * large.ad_mul(&resid);
    let gram = resid.ad_mul(&resid);
    let (vals, _) = hermitian_eigen(&gram);
    let mut angles: Vec<f64> = vals
        .into_iter()
        .map(|ev| ev.max(0.0).sqrt().min(1.0).asin())
        .collect();
    angles.sort_by(|x, y| x.total_cmp(y));
    angles
}

/// Largest principal angle, or `π/2` when the dimensions disagree.
pub fn subspace_distance(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    principal_angles(a, b).last().copied().unwrap_or(0.0)
}

/// `‖Q* Q - I‖` in the max-entry norm.
pub fn orthonormality_defect(q: &CMat) -> f64 {
    let g = q.ad_mul(q);
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn orthonormalize_drops_dependent_columns() {
        let m = CMat::from_column_slice(
            3,
            3,
            &[
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(1.0, 1.0), c(0.0, 2.0), c(0.0, 0.0),
            ],
        );
        let (q, kept) = orthonormalize(&m, 1e-12);
        assert_eq!(kept, vec![0, 2]);
        assert!(orthonormality_defect(&q) < 1e-14);
    }

    #[test]
    fn complement_completes_a_basis() {
        let mut b = CMat::zeros(4, 1);
        b[(0, 0)] = c(0.6, 0.0);
        b[(1, 0)] = c(0.0, 0.8);
        let comp = orthonormal_complement(&b);
        assert_eq!(comp.ncols(), 3);
        assert!(orthonormality_defect(&comp) < 1e-14);
        assert!(max_abs(&b.ad_mul(&comp)) < 1e-14);
    }

    #[test]
    fn principal_angle_of_tilted_line() {
        let t: f64 = 1e-9;
        let a = CMat::from_column_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let b = CMat::from_column_slice(2, 1, &[c(t.cos(), 0.0), c(t.sin(), 0.0)]);
        let ang = principal_angles(&a, &b);
        assert!((ang[0] - t).abs() < 1e-20 + 1e-6 * t);
    }

    #[test]
    fn rank_band_is_reported() {
        assert_eq!(numerical_rank(&[1.0, 0.5, 1e-12], 1.0, "t").unwrap(), 2);
        assert!(matches!(
            numerical_rank(&[1.0, 5e-7], 1.0, "t"),
            Err(Error::RankAmbiguous { .. })
        ));
        assert_eq!(numerical_rank(&[0.0], 0.0, "t").unwrap(), 0);
    }

    #[test]
    fn sorted_svd_reconstructs() {
        let m = CMat::from_fn(3, 2, |i, j| c((i + 2 * j) as f64, (i * j) as f64 - 1.0));
        let svd = sorted_svd(&m);
        assert!(svd.s[0] >= svd.s[1]);
        let s = CMat::from_diagonal(&DVector::from_iterator(2, svd.s.iter().map(|&x| c(x, 0.0))));
        let back = &svd.u * s * svd.v.adjoint();
        assert!(max_abs(&(back - m)) < 1e-12);
    }
}
