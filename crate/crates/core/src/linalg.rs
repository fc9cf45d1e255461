//! Dense complex linear algebra shared by the operator modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Factor separating kept from discarded singular values: a value in
/// `(tol, GAP_FACTOR·tol]` (relative to the largest) makes the rank ambiguous.
pub const GAP_FACTOR: f64 = 10.0;

/// Numerical rank with an enforced spectral gap.
///
/// Singular values at or below `tol · σ_max` are discarded, values above
/// `GAP_FACTOR · tol · σ_max` are kept, and anything in between is an error.
pub fn gapped_rank(singular_values: &[f64], tol: f64) -> Result<usize> {
    let smax = singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    let lo = tol * smax;
    let hi = GAP_FACTOR * lo;
    let mut rank = 0;
    for &s in singular_values {
        if s > hi {
            rank += 1;
        } else if s > lo {
            return Err(Error::AmbiguousRank {
                value: s / smax,
                threshold: tol,
                upper: GAP_FACTOR * tol,
            });
        }
    }
    Ok(rank)
}

/// Smallest kept / largest discarded singular value ratio, for reports.
pub fn spectral_gap(singular_values: &[f64], rank: usize) -> f64 {
    let mut s: Vec<f64> = singular_values.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    match (rank.checked_sub(1).and_then(|i| s.get(i)), s.get(rank)) {
        (Some(&kept), Some(&dropped)) if dropped > 0.0 => kept / dropped,
        _ => f64::INFINITY,
    }
}

/// Singular values of an SVD result, in the order faer returns them.
fn diagonal<T: Copy>(s: faer::diag::DiagRef<'_, T>) -> Vec<T> {
    s.column_vector().iter().copied().collect()
}

/// Orthonormal basis (as columns) of the column span of `m`.
pub fn orthonormal_range(m: &CMat, tol: f64) -> Result<CMat> {
    let (rows, cols) = m.shape();
    if cols == 0 || rows == 0 {
        return Ok(CMat::zeros(rows, 0));
    }
    let fm = faer::Mat::<Complex64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = fm.thin_svd().map_err(|_| Error::SvdFailed)?;
    let sv: Vec<f64> = diagonal(svd.S()).iter().map(|s| s.re).collect();
    let rank = gapped_rank(&sv, tol)?;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let u = svd.U();
    let mut q = CMat::zeros(rows, rank);
    for (k, &j) in order.iter().take(rank).enumerate() {
        for i in 0..rows {
            q[(i, k)] = u[(i, j)];
        }
    }
    Ok(q)
}

/// Result of a real null-space computation.
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Orthonormal basis of the null space, as columns.
    pub basis: DMatrix<f64>,
    /// Singular values padded with zeros to the number of unknowns, descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

/// Null space of a real matrix via SVD, with the gap rule of [`gapped_rank`].
pub fn real_null_space(a: &DMatrix<f64>, tol: f64) -> Result<NullSpace> {
    let (rows, cols) = a.shape();
    let fa = faer::Mat::<f64>::from_fn(rows, cols, |i, j| a[(i, j)]);
    let svd = fa.svd().map_err(|_| Error::SvdFailed)?;
    let mut sv: Vec<(f64, usize)> = diagonal(svd.S()).into_iter().zip(0..).collect();
    // unknowns beyond the number of equations carry zero singular values
    sv.extend((sv.len()..cols).map(|i| (0.0, i)));
    sv.sort_by(|a, b| b.0.total_cmp(&a.0));
    let values: Vec<f64> = sv.iter().map(|p| p.0).collect();
    let rank = gapped_rank(&values, tol)?;
    let v = svd.V();
    let nullity = cols - rank;
    let mut basis = DMatrix::<f64>::zeros(cols, nullity);
    for (k, &(_, j)) in sv.iter().skip(rank).enumerate() {
        for i in 0..cols {
            basis[(i, k)] = v[(i, j)];
        }
    }
    let scale = values.first().copied().unwrap_or(0.0);
    let residual = if nullity > 0 { (a * &basis).abs().max() } else { 0.0 };
    if residual > tol * scale.max(1.0) {
        return Err(Error::InaccurateNullSpace(residual));
    }
    Ok(NullSpace {
        basis,
        singular_values: values,
        rank,
    })
}

/// Column-major vectorization.
pub fn vectorize(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVec, n: usize) -> CMat {
    CMat::from_column_slice(n, n, v.as_slice())
}

/// `Q Q*` for a matrix with orthonormal columns.
pub fn projector(q: &CMat) -> CMat {
    q * q.adjoint()
}

/// Frobenius distance between the orthogonal projectors onto two column
/// spans given by orthonormal bases.
pub fn projector_distance(q1: &CMat, q2: &CMat) -> f64 {
    (projector(q1) - projector(q2)).norm()
}

/// Distance from `x` to the span of the orthonormal columns of `q`.
pub fn distance_to_span(q: &CMat, x: &CVec) -> f64 {
    let coeffs = q.adjoint() * x;
    (x - q * coeffs).norm()
}

/// `‖M M* - I‖_F`.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    (m * m.adjoint() - CMat::identity(n, n)).norm()
}

/// `‖M* M - I‖_F`, i.e. orthonormality of the columns.
pub fn isometry_defect(m: &CMat) -> f64 {
    let k = m.ncols();
    (m.adjoint() * m - CMat::identity(k, k)).norm()
}

/// Elementwise complex conjugate.
pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn conj_vec(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
