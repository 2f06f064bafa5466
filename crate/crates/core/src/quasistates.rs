//! Lie quasi-states: functionals on sp(2n, ℝ) that are linear on every
//! abelian subalgebra.
//!
//! Every family implements [`LieQuasiState`]. Evaluations carry an error bar
//! so that numerical evaluators (the Maslov limit) and exact ones (trace
//! forms) can be checked by the same harness.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::condition_number;
use crate::maslov::{maslov_limit, maslov_spectral, MaslovLimitConfig};
use crate::symplectic::{SpElement, SymplecticSpace};

/// Which construction a quasi-state comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Linear,
    Maslov,
    Dim2Homogeneous,
    Discontinuous,
    Composite,
    /// Arbitrary functionals, used as negative controls.
    Custom,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::Linear => "linear",
            Provenance::Maslov => "maslov",
            Provenance::Dim2Homogeneous => "dim2-homogeneous",
            Provenance::Discontinuous => "discontinuous",
            Provenance::Composite => "composite",
            Provenance::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Bound on `|value − ζ(A)|`.
    pub error_bar: f64,
}

impl Evaluation {
    pub fn exact(value: f64) -> Self {
        Self { value, error_bar: 0.0 }
    }
}

pub trait LieQuasiState: Send + Sync {
    fn space(&self) -> SymplecticSpace;

    fn evaluate(&self, a: &SpElement) -> Result<Evaluation>;

    /// Evaluation error the constructor guarantees on inputs of moderate
    /// norm.
    fn eval_tolerance(&self) -> f64;

    /// Claimed regularity.
    fn is_continuous(&self) -> bool;

    fn provenance(&self) -> Provenance;

    fn label(&self) -> String {
        self.provenance().to_string()
    }
}

fn check_space(qs: SymplecticSpace, a: &SpElement) -> Result<()> {
    if qs != a.space() {
        return Err(Error::DimensionMismatch { expected: qs.dim(), found: a.space().dim() });
    }
    Ok(())
}

/// `ζ(A) = tr(N A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearQs {
    space: SymplecticSpace,
    n_mat: DMatrix<f64>,
}

impl LinearQs {
    pub fn new(n_mat: DMatrix<f64>) -> Result<Self> {
        let space = SymplecticSpace::from_dim(n_mat.nrows())?;
        space.check_mat(&n_mat)?;
        Ok(Self { space, n_mat })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.n_mat
    }

    /// `tr(N A)` as an exact bilinear sum.
    fn trace_with(&self, a: &DMatrix<f64>) -> f64 {
        self.n_mat.transpose().dot(a)
    }
}

pub fn linear_qs(n_mat: DMatrix<f64>) -> Result<LinearQs> {
    LinearQs::new(n_mat)
}

impl LieQuasiState for LinearQs {
    fn space(&self) -> SymplecticSpace {
        self.space
    }

    fn evaluate(&self, a: &SpElement) -> Result<Evaluation> {
        check_space(self.space, a)?;
        let value = self.trace_with(a.matrix());
        let dim = self.space.dim() as f64;
        let error_bar = 2.0 * dim * dim * f64::EPSILON * self.n_mat.norm() * a.norm();
        Ok(Evaluation { value, error_bar })
    }

    fn eval_tolerance(&self) -> f64 {
        1e-12 * (1.0 + self.n_mat.norm())
    }

    fn is_continuous(&self) -> bool {
        true
    }

    fn provenance(&self) -> Provenance {
        Provenance::Linear
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaslovMethod {
    /// Spectral formula when the input is semi-simple, the limit otherwise.
    Auto,
    Limit,
    Spectral,
}

impl MaslovMethod {
    pub fn name(&self) -> &'static str {
        match self {
            MaslovMethod::Auto => "auto",
            MaslovMethod::Limit => "limit",
            MaslovMethod::Spectral => "spectral",
        }
    }
}

/// The Maslov quasi-state.
#[derive(Debug, Clone, PartialEq)]
pub struct MaslovQs {
    space: SymplecticSpace,
    cfg: MaslovLimitConfig,
    method: MaslovMethod,
}

pub fn maslov_qs(space: SymplecticSpace, cfg: MaslovLimitConfig, method: MaslovMethod) -> Result<MaslovQs> {
    cfg.validate()?;
    Ok(MaslovQs { space, cfg, method })
}

impl MaslovQs {
    pub fn method(&self) -> MaslovMethod {
        self.method
    }

    pub fn config(&self) -> &MaslovLimitConfig {
        &self.cfg
    }

    fn by_limit(&self, a: &SpElement) -> Result<Evaluation> {
        let est = maslov_limit(a, &self.cfg)?;
        Ok(Evaluation { value: est.value, error_bar: est.error_bar + self.cfg.remainder_bound(self.space.n()) })
    }

    fn by_spectrum(&self, a: &SpElement) -> Result<Evaluation> {
        let est = maslov_spectral(a)?;
        Ok(Evaluation { value: est.value, error_bar: est.error_bar })
    }
}

impl LieQuasiState for MaslovQs {
    fn space(&self) -> SymplecticSpace {
        self.space
    }

    fn evaluate(&self, a: &SpElement) -> Result<Evaluation> {
        check_space(self.space, a)?;
        match self.method {
            MaslovMethod::Limit => self.by_limit(a),
            MaslovMethod::Spectral => self.by_spectrum(a),
            MaslovMethod::Auto => match self.by_spectrum(a) {
                Ok(ev) => Ok(ev),
                Err(
                    Error::NotSemisimple(_)
                    | Error::AmbiguousEigenvalue { .. }
                    | Error::Normalization(_)
                    | Error::NearSingular { .. }
                    | Error::NoConvergence(_),
                ) => self.by_limit(a),
                Err(e) => Err(e),
            },
        }
    }

    fn eval_tolerance(&self) -> f64 {
        match self.method {
            MaslovMethod::Spectral => 1e-9,
            _ => self.cfg.remainder_bound(self.space.n()),
        }
    }

    fn is_continuous(&self) -> bool {
        true
    }

    fn provenance(&self) -> Provenance {
        Provenance::Maslov
    }

    fn label(&self) -> String {
        format!("maslov/{}", self.method.name())
    }
}

pub type UnitFunction = Arc<dyn Fn(&SpElement) -> f64 + Send + Sync>;

/// `ζ(A) = ‖A‖·f(A/‖A‖)` on sp(2, ℝ) for an odd `f` on the unit sphere
/// (Frobenius norm).
#[derive(Clone)]
pub struct Dim2Qs {
    f: UnitFunction,
    label: String,
}

impl fmt::Debug for Dim2Qs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dim2Qs").field("label", &self.label).finish()
    }
}

/// Antipodal pairs probed by [`dim2_homogeneous_qs`].
pub const ODDNESS_PROBES: usize = 200;

pub fn dim2_homogeneous_qs(space: SymplecticSpace, label: &str, f: UnitFunction) -> Result<Dim2Qs> {
    if space.n() != 1 {
        return Err(Error::Hypothesis(format!("dim2-homogeneous states live on sp(2, R), got {space}")));
    }
    // Deterministic spiral over the sphere in (a, b, c) coordinates.
    for k in 0..ODDNESS_PROBES {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / ODDNESS_PROBES as f64;
        let r = (1.0 - z * z).sqrt();
        let phi = k as f64 * 2.399963229728653;
        let (a, b, c) = (r * phi.cos(), r * phi.sin(), z);
        let u = SpElement::new(DMatrix::from_row_slice(2, 2, &[a, b, c, -a]))?;
        let u = u.scaled(1.0 / u.norm());
        let plus = f(&u);
        let minus = f(&u.scaled(-1.0));
        let defect = (plus + minus).abs();
        if defect > 1e-12 * (1.0 + plus.abs()) {
            return Err(Error::NotOdd { defect });
        }
    }
    Ok(Dim2Qs { f, label: label.to_string() })
}

impl LieQuasiState for Dim2Qs {
    fn space(&self) -> SymplecticSpace {
        SymplecticSpace::new(1).expect("n = 1")
    }

    fn evaluate(&self, a: &SpElement) -> Result<Evaluation> {
        check_space(self.space(), a)?;
        let norm = a.norm();
        if norm == 0.0 {
            return Ok(Evaluation::exact(0.0));
        }
        let value = norm * (self.f)(&a.scaled(1.0 / norm));
        Ok(Evaluation { value, error_bar: 4.0 * f64::EPSILON * value.abs() })
    }

    fn eval_tolerance(&self) -> f64 {
        1e-12
    }

    fn is_continuous(&self) -> bool {
        true
    }

    fn provenance(&self) -> Provenance {
        Provenance::Dim2Homogeneous
    }

    fn label(&self) -> String {
        format!("dim2/{}", self.label)
    }
}

/// A skew-symplectic `A` with a single nilpotent Jordan block of size `2n`:
/// `A = [[N, E_nn], [0, −Nᵀ]]` where `N` shifts `e_{i+1} ↦ e_i`. The chain
/// is `f_1 ↦ −f_2 ↦ … ↦ ±f_n ↦ ±e_n ↦ … ↦ ±e_1 ↦ 0`.
pub fn nilpotent_jordan_sp(space: SymplecticSpace) -> Result<SpElement> {
    let n = space.n();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = 1.0;
        m[(n + i + 1, n + i)] = -1.0;
    }
    m[(n - 1, 2 * n - 1)] = 1.0;
    let a = SpElement::new(m)?;
    check_single_jordan(&a)?;
    Ok(a)
}

/// Verifies `A^{2n} = 0` and the rank profile `rank(A^k) = 2n − k`.
pub fn check_single_jordan(a: &SpElement) -> Result<()> {
    let dim = a.space().dim();
    let norm = a.matrix().norm();
    if norm == 0.0 {
        return Err(Error::JordanCheck("zero matrix".into()));
    }
    let mut power = DMatrix::identity(dim, dim);
    for k in 1..=dim {
        power = &power * a.matrix();
        let scale = norm.powi(k as i32);
        let sv = power.clone().singular_values();
        let mut sorted: Vec<f64> = sv.iter().copied().collect();
        sorted.sort_by(|x, y| y.total_cmp(x));
        let expected = dim - k;
        if expected > 0 && sorted[expected - 1] <= 1e-8 * scale {
            return Err(Error::JordanCheck(format!("rank(A^{k}) < {expected}")));
        }
        if expected < dim && sorted[expected] > 1e-8 * scale {
            return Err(Error::JordanCheck(format!("rank(A^{k}) > {expected}")));
        }
    }
    Ok(())
}

/// Largest accepted condition number of the Gram matrix of `A, A³, …`.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;
/// Relative residual below which `x` is taken to lie in `L`.
pub const MEMBERSHIP_RESIDUAL: f64 = 1e-8;

/// `ζ(x) = c·a_1` when `x = a_1 A + a_3 A³ + … + a_{2n−1} A^{2n−1}` and
/// `ζ(x) = 0` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscontinuousQs {
    a: SpElement,
    c: f64,
    /// Columns are `vec(A^{2i−1})`.
    basis: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    bound: f64,
}

/// Result of projecting `x` onto `L = span{A, A³, …}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub coefficients: DVector<f64>,
    pub relative_residual: f64,
    pub in_l: bool,
}

pub fn discontinuous_qs(a: SpElement, c: f64) -> Result<DiscontinuousQs> {
    check_single_jordan(&a)?;
    let space = a.space();
    let (n, dim) = (space.n(), space.dim());
    let a2 = a.matrix() * a.matrix();
    let mut power = a.matrix().clone();
    let mut basis = DMatrix::zeros(dim * dim, n);
    for i in 0..n {
        if i > 0 {
            power = &a2 * &power;
        }
        basis.set_column(i, &DVector::from_column_slice(power.as_slice()));
    }
    let gram = basis.transpose() * &basis;
    let condition = condition_number(&gram);
    if !(condition <= GRAM_CONDITION_LIMIT) {
        return Err(Error::IllConditionedPowerBasis { condition });
    }
    let gram_inv = gram.try_inverse().ok_or(Error::IllConditionedPowerBasis { condition: f64::INFINITY })?;
    let bound = c.abs() * gram_inv[(0, 0)].sqrt();
    Ok(DiscontinuousQs { a, c, basis, gram_inv, bound })
}

impl DiscontinuousQs {
    pub fn jordan_element(&self) -> &SpElement {
        &self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `c′` with `|ζ(x)| ≤ c′·‖x‖_F` for all `x`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn membership(&self, x: &SpElement) -> Membership {
        let v = DVector::from_column_slice(x.matrix().as_slice());
        let coefficients = &self.gram_inv * (self.basis.transpose() * &v);
        let norm = v.norm();
        let relative_residual = if norm == 0.0 { 0.0 } else { (&v - &self.basis * &coefficients).norm() / norm };
        Membership { in_l: relative_residual <= MEMBERSHIP_RESIDUAL, coefficients, relative_residual }
    }
}

impl LieQuasiState for DiscontinuousQs {
    fn space(&self) -> SymplecticSpace {
        self.a.space()
    }

    fn evaluate(&self, x: &SpElement) -> Result<Evaluation> {
        check_space(self.space(), x)?;
        let m = self.membership(x);
        if !m.in_l {
            return Ok(Evaluation::exact(0.0));
        }
        let value = self.c * m.coefficients[0];
        Ok(Evaluation { value, error_bar: 1e-13 * (self.bound * x.norm() + value.abs()) })
    }

    fn eval_tolerance(&self) -> f64 {
        1e-10 * (1.0 + self.c.abs())
    }

    fn is_continuous(&self) -> bool {
        false
    }

    fn provenance(&self) -> Provenance {
        Provenance::Discontinuous
    }
}

/// `Σ c_i·ζ_i`.
#[derive(Clone)]
pub struct CompositeQs {
    space: SymplecticSpace,
    parts: Vec<(f64, Arc<dyn LieQuasiState>)>,
}

impl fmt::Debug for CompositeQs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.parts.iter().map(|(c, q)| format!("{c}*{}", q.label())).collect();
        f.debug_struct("CompositeQs").field("parts", &labels).finish()
    }
}

pub fn composite_qs(parts: Vec<(f64, Arc<dyn LieQuasiState>)>) -> Result<CompositeQs> {
    let space = parts
        .first()
        .map(|(_, q)| q.space())
        .ok_or_else(|| Error::InvalidConfig("composite needs at least one part".into()))?;
    if let Some((_, bad)) = parts.iter().find(|(_, q)| q.space() != space) {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: bad.space().dim() });
    }
    Ok(CompositeQs { space, parts })
}

impl LieQuasiState for CompositeQs {
    fn space(&self) -> SymplecticSpace {
        self.space
    }

    fn evaluate(&self, a: &SpElement) -> Result<Evaluation> {
        let mut value = 0.0;
        let mut error_bar = 0.0;
        for (c, q) in &self.parts {
            let ev = q.evaluate(a)?;
            value += c * ev.value;
            error_bar += c.abs() * ev.error_bar;
        }
        Ok(Evaluation { value, error_bar })
    }

    fn eval_tolerance(&self) -> f64 {
        self.parts.iter().map(|(c, q)| c.abs() * q.eval_tolerance()).sum()
    }

    fn is_continuous(&self) -> bool {
        self.parts.iter().all(|(_, q)| q.is_continuous())
    }

    fn provenance(&self) -> Provenance {
        Provenance::Composite
    }

    fn label(&self) -> String {
        let parts: Vec<String> = self.parts.iter().map(|(c, q)| format!("{c}*{}", q.label())).collect();
        format!("composite({})", parts.join(" + "))
    }
}

/// An arbitrary functional wrapped in the quasi-state interface.
#[derive(Clone)]
pub struct FunctionalQs {
    space: SymplecticSpace,
    f: UnitFunction,
    label: String,
    continuous: bool,
}

impl fmt::Debug for FunctionalQs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionalQs").field("label", &self.label).finish()
    }
}

impl FunctionalQs {
    pub fn new(space: SymplecticSpace, label: &str, continuous: bool, f: UnitFunction) -> Self {
        Self { space, f, label: label.to_string(), continuous }
    }

    /// `ζ(A) = ‖A‖_F`, which is not a quasi-state.
    pub fn norm_control(space: SymplecticSpace) -> Self {
        Self::new(space, "frobenius-norm", true, Arc::new(|a: &SpElement| a.norm()))
    }
}

impl LieQuasiState for FunctionalQs {
    fn space(&self) -> SymplecticSpace {
        self.space
    }

    fn evaluate(&self, a: &SpElement) -> Result<Evaluation> {
        check_space(self.space, a)?;
        let value = (self.f)(a);
        Ok(Evaluation { value, error_bar: 4.0 * f64::EPSILON * value.abs() })
    }

    fn eval_tolerance(&self) -> f64 {
        1e-12
    }

    fn is_continuous(&self) -> bool {
        self.continuous
    }

    fn provenance(&self) -> Provenance {
        Provenance::Custom
    }

    fn label(&self) -> String {
        format!("custom/{}", self.label)
    }
}
