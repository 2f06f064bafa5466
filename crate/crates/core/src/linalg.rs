//! Small dense helpers shared by the numerical modules.

use nalgebra::{Complex, DMatrix, DVector, Schur};

use crate::error::{Error, Result};

pub(crate) type C64 = Complex<f64>;

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub(crate) fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

pub(crate) fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Orthonormal basis of the `dim`-dimensional numerical kernel of `m`.
///
/// Returns the basis together with the largest singular value inside the
/// selected kernel and the smallest one outside it.
pub(crate) fn null_space_real(m: &DMatrix<f64>, dim: usize) -> (DMatrix<f64>, f64, f64) {
    let cols = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;
    // nalgebra sorts singular values in decreasing order.
    let mut basis = DMatrix::zeros(cols, dim);
    for k in 0..dim {
        let row = cols - dim + k;
        for i in 0..cols {
            basis[(i, k)] = v_t[(row, i)];
        }
    }
    let inside = if dim == 0 { 0.0 } else { sv[cols - dim] };
    let outside = if dim == cols { f64::INFINITY } else { sv[cols - dim - 1] };
    (basis, inside, outside)
}

/// Complex counterpart of [`null_space_real`].
pub(crate) fn null_space_complex(m: &DMatrix<C64>, dim: usize) -> (DMatrix<C64>, f64, f64) {
    let cols = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = svd.singular_values;
    let mut basis = DMatrix::zeros(cols, dim);
    for k in 0..dim {
        let row = cols - dim + k;
        for i in 0..cols {
            basis[(i, k)] = v_t[(row, i)].conj();
        }
    }
    let inside = if dim == 0 { 0.0 } else { sv[cols - dim] };
    let outside = if dim == cols { f64::INFINITY } else { sv[cols - dim - 1] };
    (basis, inside, outside)
}

/// Orthonormal basis for the span of the columns, keeping `rank` directions.
pub(crate) fn orthonormal_span(cols: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let svd = cols.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    u.columns(0, rank).into_owned()
}

const SCHUR_MAX_ITERATIONS: usize = 10_000;
const SIMILARITY_RETRIES: usize = 3;

/// Eigenvalues through a capped real Schur iteration.
///
/// The shifted QR sweep can cycle on particular inputs, so on failure the
/// same spectrum is requested from `Mᵀ` and then from a few fixed orthogonal
/// similarities `Q M Qᵀ`.
pub(crate) fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<C64>> {
    let attempt = |a: DMatrix<f64>| {
        Schur::try_new(a, f64::EPSILON, SCHUR_MAX_ITERATIONS).map(|s| s.complex_eigenvalues().iter().copied().collect())
    };
    if let Some(ev) = attempt(m.clone()).or_else(|| attempt(m.transpose())) {
        return Ok(ev);
    }
    let d = m.nrows();
    for r in 1..=SIMILARITY_RETRIES {
        let seed = DMatrix::from_fn(d, d, |i, j| ((r * (7 * i + 3 * j + 1)) as f64).sin());
        let q = seed.qr().q();
        if let Some(ev) = attempt(&q * m * q.transpose()) {
            return Ok(ev);
        }
    }
    Err(Error::NoConvergence("Schur eigenvalue iteration"))
}

pub(crate) fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

/// Least-squares solution of `design * x ≈ rhs` via SVD.
pub(crate) fn least_squares(design: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<(DVector<f64>, usize)> {
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-12;
    let rank = svd.singular_values.iter().filter(|s| **s > eps).count();
    svd.solve(rhs, eps).ok().map(|x| (x, rank))
}

pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / min
    }
}
