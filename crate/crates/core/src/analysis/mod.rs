//! Dense kernels: matrix exponential, polar decomposition, complexification
//! of orthogonal-symplectic matrices, complex determinant and phase lifting.

mod tracker;

pub use tracker::PolarPathTracker;

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, C64};
use crate::symplectic::SymplecticSpace;

/// Largest accepted condition number in [`polar_decompose`].
pub const POLAR_CONDITION_LIMIT: f64 = 1e14;

/// Gaps at or above `π − LIFT_MARGIN` are treated as undersampling.
pub const LIFT_MARGIN: f64 = 0.05;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Degree-13 Padé approximant with scaling and squaring.
fn expm_pade13(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = a.nrows();
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Overflow { norm });
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a * 2f64.powi(-s);
    let b = &PADE13;
    let id = DMatrix::<f64>::identity(d, d);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).ok_or(Error::NearSingular { condition: f64::INFINITY })?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow { norm });
    }
    Ok(r)
}

/// Matrix exponential by scaling and squaring of the degree-13 Padé
/// approximant.
///
/// The result is checked against `expm(A/2)²`; a relative Frobenius
/// discrepancy above `tol` is reported as [`Error::ExpmAccuracy`].
pub fn expm(a: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("expm tolerance must be positive, got {tol}")));
    }
    if a.is_empty() {
        return Ok(a.clone());
    }
    let full = expm_pade13(a)?;
    let half = expm_pade13(&(a * 0.5))?;
    let check = &half * &half;
    let scale = full.norm();
    let residual = (&full - &check).norm() / scale.max(f64::MIN_POSITIVE);
    if !residual.is_finite() {
        return Err(Error::Overflow { norm: one_norm(a) });
    }
    if residual > tol {
        return Err(Error::ExpmAccuracy { residual, tol });
    }
    Ok(full)
}

/// Polar decomposition `M = P U` with `P` symmetric positive-definite and
/// `U` orthogonal.
///
/// Both factors are assembled from one SVD `M = W Σ Vᵀ`: `P = W Σ Wᵀ`,
/// `U = W Vᵀ`.
pub fn polar_decompose(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= POLAR_CONDITION_LIMIT) {
        return Err(Error::NearSingular { condition });
    }
    let w = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let p = &w * DMatrix::from_diagonal(&svd.singular_values) * w.transpose();
    let p = (&p + p.transpose()) * 0.5;
    let u = w * v_t;
    Ok((p, u))
}

/// `‖U J₀ − J₀ U‖_max` for the standard complex structure.
pub fn complex_linearity_defect(u: &DMatrix<f64>) -> Result<f64> {
    let space = SymplecticSpace::from_dim(u.nrows())?;
    space.check_mat(u)?;
    let n = space.n();
    let mut defect = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            defect = defect
                .max((u[(i, j)] - u[(n + i, n + j)]).abs())
                .max((u[(i, n + j)] + u[(n + i, j)]).abs());
        }
    }
    Ok(defect)
}

/// `X + iY` for a complex-linear `U = [[X, −Y], [Y, X]]`.
pub fn complexify_orthosymplectic(u: &DMatrix<f64>) -> Result<DMatrix<C64>> {
    let defect = complex_linearity_defect(u)?;
    if defect > 1e-6 * max_abs(u).max(1.0) {
        return Err(Error::NotComplexLinear { defect });
    }
    Ok(complexify_unchecked(u))
}

pub(crate) fn complexify_unchecked(u: &DMatrix<f64>) -> DMatrix<C64> {
    let n = u.nrows() / 2;
    DMatrix::from_fn(n, n, |i, j| {
        let x = 0.5 * (u[(i, j)] + u[(n + i, n + j)]);
        let y = 0.5 * (u[(n + i, j)] - u[(i, n + j)]);
        C64::new(x, y)
    })
}

/// Complex determinant via LU.
pub fn det_complex(uc: &DMatrix<C64>) -> Result<C64> {
    if uc.nrows() != uc.ncols() {
        return Err(Error::NotSquare { rows: uc.nrows(), cols: uc.ncols() });
    }
    Ok(uc.clone().determinant())
}

/// Continuous lift of a sequence of unit complex numbers.
///
/// `θ_0` is the principal argument in `(−π, π]`; each later value adds the
/// principal argument of the ratio of neighbours.
pub fn lift_argument(phases: &[C64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(phases.len());
    let Some(first) = phases.first() else {
        return Ok(out);
    };
    let mut theta = first.arg();
    if theta <= -PI {
        theta = PI;
    }
    out.push(theta);
    for (k, pair) in phases.windows(2).enumerate() {
        let gap = (pair[1] * pair[0].conj()).arg();
        if gap.abs() >= PI - LIFT_MARGIN {
            return Err(Error::Undersampled { index: k + 1, gap });
        }
        theta += gap;
        out.push(theta);
    }
    Ok(out)
}

/// One point of the polar path `e^{tB} = P(t) U(t)`.
#[derive(Debug, Clone)]
pub struct PolarSample {
    pub t: f64,
    pub p: DMatrix<f64>,
    pub u: DMatrix<f64>,
    /// Lifted `arg det_ℂ U(s)` for `s` up to `t`.
    pub theta: f64,
}

/// Polar samples of `e^{tB}` at the given increasing times, computed by a
/// fresh exponential at every point.
///
/// Intended for short horizons; [`PolarPathTracker`] handles long ones.
pub fn polar_samples(b: &DMatrix<f64>, times: &[f64]) -> Result<Vec<PolarSample>> {
    let mut raw = Vec::with_capacity(times.len());
    let mut phases = Vec::with_capacity(times.len());
    for &t in times {
        let m = expm(&(b * t), 1e-8)?;
        let (p, u) = polar_decompose(&m)?;
        let det = det_complex(&complexify_orthosymplectic(&u)?)?;
        phases.push(det / det.norm());
        raw.push((t, p, u));
    }
    let thetas = lift_argument(&phases)?;
    Ok(raw
        .into_iter()
        .zip(thetas)
        .map(|((t, p, u), theta)| PolarSample { t, p, u, theta })
        .collect())
}
