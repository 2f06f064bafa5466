//! Long-horizon tracking of the unitary polar factor of `e^{tB}`.
//!
//! The state is a graded singular value decomposition `M = V·diag(d)·Wᵀ`
//! with `d` stored relative to its largest entry. Each step multiplies by
//! `E = exp(h·B)` and restores the decomposition with one-sided Jacobi
//! rotations, which stay accurate for strongly graded columns. Gaps between
//! consecutive singular values are clipped at [`MAX_LOG_GAP`]; beyond that
//! ratio the smaller directions no longer influence `V` or `W` in double
//! precision. The polar factor is `U = V·Wᵀ`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;

use super::{complexify_unchecked, expm, LIFT_MARGIN};
use crate::error::{Error, Result};
use crate::linalg::C64;

const MAX_LOG_GAP: f64 = 40.0;
const REORTHO_INTERVAL: usize = 512;
const MAX_SWEEPS: usize = 40;

#[derive(Debug, Clone)]
pub struct PolarPathTracker {
    generator: DMatrix<f64>,
    dt: f64,
    max_refinements: usize,
    step_cache: Vec<DMatrix<f64>>,
    v: DMatrix<f64>,
    d: Vec<f64>,
    w: DMatrix<f64>,
    log_gap_cap: f64,
    t: f64,
    theta: f64,
    phase: C64,
    substeps: usize,
    refined_steps: usize,
    since_reortho: usize,
}

impl PolarPathTracker {
    /// Starts at `t = 0`, where `U = I` and `θ = 0`.
    pub fn new(generator: &DMatrix<f64>, dt: f64, max_refinements: usize) -> Result<Self> {
        let dim = generator.nrows();
        if dim == 0 || dim != generator.ncols() || dim % 2 != 0 {
            return Err(Error::OddDimension(dim));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("step must be positive, got {dt}")));
        }
        let e0 = expm(&(generator * dt), 1e-10)?;
        // Keep the smallest graded value representable: (dim − 1)·cap < 600.
        let log_gap_cap = MAX_LOG_GAP.min(600.0 / (dim.max(2) - 1) as f64);
        Ok(Self {
            generator: generator.clone(),
            dt,
            max_refinements,
            step_cache: vec![e0],
            v: DMatrix::identity(dim, dim),
            d: vec![1.0; dim],
            w: DMatrix::identity(dim, dim),
            log_gap_cap,
            t: 0.0,
            theta: 0.0,
            phase: C64::new(1.0, 0.0),
            substeps: 0,
            refined_steps: 0,
            since_reortho: 0,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Lifted `arg det_ℂ U(t)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Accepted substeps, counting each refinement level's pieces.
    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// Nominal steps that needed at least one halving.
    pub fn refined_steps(&self) -> usize {
        self.refined_steps
    }

    /// Current orthogonal polar factor `U(t)`.
    pub fn unitary(&self) -> DMatrix<f64> {
        &self.v * self.w.transpose()
    }

    /// Advances by one nominal step `dt`, halving while the phase moves by
    /// more than π/2 per substep.
    pub fn advance(&mut self) -> Result<()> {
        let before = self.substeps;
        self.advance_level(0)?;
        if self.substeps > before + 1 {
            self.refined_steps += 1;
        }
        Ok(())
    }

    fn ensure_step_matrix(&mut self, level: usize) -> Result<()> {
        while self.step_cache.len() <= level {
            let h = self.dt / 2f64.powi(self.step_cache.len() as i32);
            self.step_cache.push(expm(&(&self.generator * h), 1e-10)?);
        }
        Ok(())
    }

    fn advance_level(&mut self, level: usize) -> Result<()> {
        let cap = self.log_gap_cap;
        self.ensure_step_matrix(level)?;
        let (v, d, w) = propose(&self.step_cache[level], &self.v, &self.d, &self.w, cap);
        let u = &v * w.transpose();
        let det = complexify_unchecked(&u).determinant();
        let phase = det / det.norm();
        let gap = (phase * self.phase.conj()).arg();
        if gap.abs() > FRAC_PI_2 && level < self.max_refinements {
            self.advance_level(level + 1)?;
            return self.advance_level(level + 1);
        }
        if gap.abs() >= PI - LIFT_MARGIN {
            return Err(Error::Undersampled { index: self.substeps + 1, gap });
        }
        self.v = v;
        self.d = d;
        self.w = w;
        self.phase = phase;
        self.theta += gap;
        self.t += self.dt / 2f64.powi(level as i32);
        self.substeps += 1;
        self.since_reortho += 1;
        if self.since_reortho >= REORTHO_INTERVAL {
            self.w = orthogonal_factor(&self.w);
            self.since_reortho = 0;
        }
        Ok(())
    }
}

/// One tracking step: the graded SVD of `E·V·diag(d)·Wᵀ`.
fn propose(
    e: &DMatrix<f64>,
    v: &DMatrix<f64>,
    d: &[f64],
    w: &DMatrix<f64>,
    cap: f64,
) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let dim = v.nrows();
    let mut g = e * v;
    for (j, dj) in d.iter().enumerate() {
        g.column_mut(j).scale_mut(*dj);
    }
    let mut w = w.clone();
    one_sided_jacobi(&mut g, &mut w);
    let mut logs = Vec::with_capacity(dim);
    for j in 0..dim {
        let norm = g.column(j).norm();
        g.column_mut(j).unscale_mut(norm);
        logs.push(norm.ln());
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| logs[b].total_cmp(&logs[a]).then(a.cmp(&b)));
    let mut sorted_logs: Vec<f64> = order.iter().map(|&j| logs[j]).collect();
    for k in 1..dim {
        let floor = sorted_logs[k - 1] - cap;
        if sorted_logs[k] < floor {
            sorted_logs[k] = floor;
        }
    }
    let top = sorted_logs[0];
    let d_new: Vec<f64> = sorted_logs.iter().map(|l| (l - top).exp()).collect();
    let v_new = DMatrix::from_fn(dim, dim, |i, k| g[(i, order[k])]);
    let w_new = DMatrix::from_fn(dim, dim, |i, k| w[(i, order[k])]);
    (v_new, d_new, w_new)
}

/// Rotates column pairs of `g` until they are mutually orthogonal, applying
/// the same rotations to the columns of `w`.
fn one_sided_jacobi(g: &mut DMatrix<f64>, w: &mut DMatrix<f64>) {
    let dim = g.ncols();
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..dim {
            for q in (p + 1)..dim {
                let (x, y) = column_pair(g, p, q);
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for (a, b) in x.iter().zip(y.iter()) {
                    alpha += a * a;
                    beta += b * b;
                    gamma += a * b;
                }
                // `alpha * beta` underflows for strongly graded columns.
                if gamma.abs() <= eps * alpha.sqrt() * beta.sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(x, y, c, s);
                let (x, y) = column_pair(w, p, q);
                rotate(x, y, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Disjoint mutable views of columns `p < q`.
fn column_pair(m: &mut DMatrix<f64>, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    let rows = m.nrows();
    let (head, tail) = m.as_mut_slice().split_at_mut(q * rows);
    (&mut head[p * rows..(p + 1) * rows], &mut tail[..rows])
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (u, v) = (*a, *b);
        *a = c * u - s * v;
        *b = s * u + c * v;
    }
}

fn orthogonal_factor(w: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = w.clone().svd(true, true);
    svd.u.expect("left singular vectors requested") * svd.v_t.expect("right singular vectors requested")
}
