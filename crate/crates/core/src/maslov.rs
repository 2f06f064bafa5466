//! The Maslov quasi-state `ζ_M(B) = lim θ(t)/t`, where `θ(t)` is the lifted
//! argument of `det_ℂ U(t)` and `U(t)` is the unitary polar factor of
//! `e^{tB}`.
//!
//! Three evaluators are provided: the limit itself ([`maslov_limit`]), a
//! spectral formula read off a Williamson frame ([`maslov_spectral`]) and the
//! closed form on sp(2, ℝ) ([`maslov_dim2`]).

use std::f64::consts::PI;

use crate::analysis::PolarPathTracker;
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::symplectic::{RankOneDescriptor, RankOneKind, SpElement};
use crate::williamson::{williamson_decompose, BlockType, ClusterKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaslovLimitConfig {
    /// Path horizon `T`.
    pub t_max: f64,
    /// Nominal step; shortened when needed so that `T/dt` is an even integer.
    pub dt: f64,
    /// Target for `error_bar`; sets [`MaslovEstimate::converged`].
    pub tol: f64,
    /// Maximum number of step halvings inside one nominal step.
    pub max_refinements: usize,
}

impl Default for MaslovLimitConfig {
    fn default() -> Self {
        Self { t_max: 2000.0, dt: 0.05, tol: 1e-3, max_refinements: 8 }
    }
}

impl MaslovLimitConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.t_max > 0.0
            && self.t_max.is_finite()
            && self.dt > 0.0
            && self.dt <= self.t_max
            && self.tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "need 0 < dt <= t_max and tol > 0 (t_max={}, dt={}, tol={})",
                self.t_max, self.dt, self.tol
            )))
        }
    }

    /// Number of nominal steps (even) and the step length actually used.
    pub fn steps(&self) -> (usize, f64) {
        let mut steps = (self.t_max / self.dt).ceil() as usize;
        steps = steps.max(2);
        if steps % 2 == 1 {
            steps += 1;
        }
        (steps, self.t_max / steps as f64)
    }

    /// Bound on `|θ(T)/T − ζ_M(B)|` from the bounded oscillation of
    /// `θ(t) − t·ζ_M(B)` in dimension `2n`.
    pub fn remainder_bound(&self, n: usize) -> f64 {
        n as f64 * PI / self.t_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaslovEstimate {
    /// `θ(T)/T`.
    pub value: f64,
    /// `|θ(T)/T − θ(T/2)/(T/2)|`.
    pub error_bar: f64,
    /// Accepted substeps including refinements.
    pub samples_used: usize,
    /// `(θ(T) − θ(T/2))/(T/2)`, which removes a constant offset in `θ`.
    pub extrapolated: f64,
    pub t_max: f64,
    /// `error_bar ≤ cfg.tol`.
    pub converged: bool,
}

/// One row of a convergence trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub theta: f64,
    pub theta_over_t: f64,
}

/// `θ(T)/T` along the polar path of `e^{tB}`.
pub fn maslov_limit(b: &SpElement, cfg: &MaslovLimitConfig) -> Result<MaslovEstimate> {
    run_limit(b, cfg, None)
}

/// Like [`maslov_limit`], also returning about `rows` evenly spaced samples
/// of `(t, θ(t), θ(t)/t)`; the last row is always `t = T`.
pub fn maslov_trace(b: &SpElement, cfg: &MaslovLimitConfig, rows: usize) -> Result<(MaslovEstimate, Vec<TraceRow>)> {
    let mut trace = Vec::new();
    let est = run_limit(b, cfg, Some((rows.max(1), &mut trace)))?;
    Ok((est, trace))
}

fn run_limit(b: &SpElement, cfg: &MaslovLimitConfig, mut trace: Option<(usize, &mut Vec<TraceRow>)>) -> Result<MaslovEstimate> {
    cfg.validate()?;
    let (steps, h) = cfg.steps();
    let stride = trace.as_ref().map(|(rows, _)| (steps / rows).max(1)).unwrap_or(usize::MAX);
    let mut tracker = PolarPathTracker::new(b.matrix(), h, cfg.max_refinements)?;
    let mut theta_half = 0.0;
    for k in 1..=steps {
        tracker.advance()?;
        if k == steps / 2 {
            theta_half = tracker.theta();
        }
        if let Some((_, rows)) = trace.as_mut() {
            if k % stride == 0 || k == steps {
                let t = if k == steps { cfg.t_max } else { k as f64 * h };
                rows.push(TraceRow { t, theta: tracker.theta(), theta_over_t: tracker.theta() / t });
            }
        }
    }
    let theta = tracker.theta();
    let half = cfg.t_max / 2.0;
    let value = theta / cfg.t_max;
    let error_bar = (value - theta_half / half).abs();
    Ok(MaslovEstimate {
        value,
        error_bar,
        samples_used: tracker.substeps(),
        extrapolated: (theta - theta_half) / half,
        t_max: cfg.t_max,
        converged: error_bar <= cfg.tol,
    })
}

/// Closed form on sp(2, ℝ) for the matrix `[[a, b], [c, −a]]`.
pub fn maslov_dim2(a: f64, b: f64, c: f64) -> f64 {
    let disc = a * a + b * c;
    if disc >= 0.0 {
        0.0
    } else if b < 0.0 && c > 0.0 {
        (-disc).sqrt()
    } else {
        -(-disc).sqrt()
    }
}

/// `ζ_M(Y_{ξ,η}) = −|ω(ξ,η)|` and `ζ_M(Z_{ξ,η}) = 0`.
///
/// `T_{ξ,ξ}` equals `Y_{ξ,ξ}` and is accepted; other `T` descriptors are not
/// in sp(2n, ℝ).
pub fn maslov_on_descriptor(desc: &RankOneDescriptor) -> Result<f64> {
    let w = desc.pairing()?;
    match desc.kind {
        RankOneKind::Y => Ok(-w.abs()),
        RankOneKind::Z => Ok(0.0),
        RankOneKind::T if desc.xi == desc.eta => Ok(0.0),
        RankOneKind::T => Err(Error::DescriptorNotInSp),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    /// `16·n·ε·‖B‖_F·cond(S) + 1e−12` for the Williamson frame `S`, plus the
    /// spread of imaginary and zero eigenvalue clusters.
    pub error_bar: f64,
    /// `cond₂(S) = ‖S‖₂²`.
    pub frame_condition: f64,
}

/// `ζ_M` summed over Williamson blocks: every imaginary pair written as
/// `b·Y_{e,f}` contributes `−b`; real pairs, quadruples and zero blocks
/// contribute nothing.
pub fn maslov_spectral(b: &SpElement) -> Result<SpectralEstimate> {
    let dec = williamson_decompose(b)?;
    let value: f64 = dec
        .blocks
        .iter()
        .map(|blk| match blk.btype {
            BlockType::ImagPair(beta) => -beta,
            _ => 0.0,
        })
        .sum();
    let s_norm = spectral_norm(&dec.s);
    let frame_condition = s_norm * s_norm;
    let n = b.space().n() as f64;
    let spread: f64 = dec
        .spectrum
        .clusters
        .iter()
        .filter(|c| matches!(c.kind, ClusterKind::ImagPair | ClusterKind::Zero))
        .map(|c| c.spread * c.multiplicity as f64)
        .sum();
    let error_bar = 16.0 * n * f64::EPSILON * b.norm() * frame_condition + spread + 1e-12;
    Ok(SpectralEstimate { value, error_bar, frame_condition })
}
