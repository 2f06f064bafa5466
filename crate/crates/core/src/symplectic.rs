//! The standard symplectic space (ℝ²ⁿ, ω) and the Lie algebra sp(2n, ℝ).
//!
//! Coordinates are ordered `(p_1..p_n, q_1..q_n)`. The Darboux basis is
//! `e_i = ∂/∂p_i`, `f_i = ∂/∂q_i`, and `ω(x, y) = xᵀ Ω y` with
//! `Ω = [[0, I], [-I, 0]]`, so that `ω(e_i, f_j) = δ_ij`.
//!
//! Every downstream convention (block extraction, complexification, the
//! Williamson block layout) derives from this ordering.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::expm;
use crate::error::{Error, Result};
use crate::linalg::{commutator, max_abs};

/// Relative tolerance for membership in sp(2n, ℝ).
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// The space (ℝ²ⁿ, ω) with the standard form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymplecticSpace {
    n: usize,
}

impl SymplecticSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("half-dimension n must be positive".into()));
        }
        Ok(Self { n })
    }

    /// Space whose matrices are `dim x dim`.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::OddDimension(dim));
        }
        Self::new(dim / 2)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Ω = [[0, I], [-I, 0]].
    pub fn omega_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut om = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            om[(i, n + i)] = 1.0;
            om[(n + i, i)] = -1.0;
        }
        om
    }

    /// ω(x, y) = xᵀ Ω y.
    pub fn omega(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        self.check_vec(x)?;
        self.check_vec(y)?;
        Ok(omega_raw(x.as_slice(), y.as_slice()))
    }

    /// Darboux vector `e_i` (0-based).
    pub fn e(&self, i: usize) -> DVector<f64> {
        assert!(i < self.n, "plane index {i} out of range");
        let mut v = DVector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    /// Darboux vector `f_i` (0-based).
    pub fn f(&self, i: usize) -> DVector<f64> {
        assert!(i < self.n, "plane index {i} out of range");
        let mut v = DVector::zeros(self.dim());
        v[self.n + i] = 1.0;
        v
    }

    pub(crate) fn check_vec(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(())
    }

    pub(crate) fn check_mat(&self, m: &DMatrix<f64>) -> Result<()> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: m.nrows() });
        }
        Ok(())
    }
}

impl fmt::Display for SymplecticSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sp({}, R)", 2 * self.n)
    }
}

/// ω on raw slices of equal even length.
pub(crate) fn omega_raw(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() / 2;
    (0..n).map(|i| x[i] * y[n + i] - x[n + i] * y[i]).sum()
}

fn space_of(m: &DMatrix<f64>) -> Result<SymplecticSpace> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    SymplecticSpace::from_dim(m.nrows())
}

/// The ω-adjoint `A^ω = Ω⁻¹ Aᵀ Ω`, characterised by `ω(Ax, y) = ω(x, A^ω y)`.
pub fn omega_adjoint(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let space = space_of(a)?;
    Ok(omega_adjoint_raw(a, space.n()))
}

/// Block form: `A^ω = [[A22ᵀ, -A12ᵀ], [-A21ᵀ, A11ᵀ]]`.
pub(crate) fn omega_adjoint_raw(a: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = a[(n + j, n + i)];
            out[(i, n + j)] = -a[(j, n + i)];
            out[(n + i, j)] = -a[(n + j, i)];
            out[(n + i, n + j)] = a[(j, i)];
        }
    }
    out
}

/// `‖A + A^ω‖_max`; zero exactly on sp(2n, ℝ).
pub fn skew_symplectic_defect(a: &DMatrix<f64>) -> Result<f64> {
    let space = space_of(a)?;
    Ok(max_abs(&(a + omega_adjoint_raw(a, space.n()))))
}

pub fn is_skew_symplectic(a: &DMatrix<f64>, tol: f64) -> bool {
    skew_symplectic_defect(a).map(|d| d <= tol).unwrap_or(false)
}

/// `‖gᵀ Ω g − Ω‖_max`; zero exactly on Sp(2n, ℝ).
pub fn symplectic_defect(g: &DMatrix<f64>) -> Result<f64> {
    let space = space_of(g)?;
    let om = space.omega_matrix();
    Ok(max_abs(&(g.transpose() * &om * g - om)))
}

/// Inverse of a symplectic matrix, `g⁻¹ = Ω⁻¹ gᵀ Ω = g^ω`.
pub fn symplectic_inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    omega_adjoint(g)
}

/// An element of sp(2n, ℝ): a matrix with `A = -A^ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpElement {
    space: SymplecticSpace,
    mat: DMatrix<f64>,
}

impl SpElement {
    /// Checks membership at relative tolerance [`MEMBERSHIP_TOL`], then
    /// projects onto sp(2n, ℝ) to remove rounding noise.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        let space = space_of(&mat)?;
        let defect = max_abs(&(&mat + omega_adjoint_raw(&mat, space.n())));
        if defect > MEMBERSHIP_TOL * max_abs(&mat).max(1.0) {
            return Err(Error::NotSkewSymplectic { defect });
        }
        Ok(Self::project_in(space, mat))
    }

    /// Orthogonal projection `(A − A^ω)/2` of an arbitrary matrix.
    pub fn project(mat: DMatrix<f64>) -> Result<Self> {
        let space = space_of(&mat)?;
        Ok(Self::project_in(space, mat))
    }

    fn project_in(space: SymplecticSpace, mat: DMatrix<f64>) -> Self {
        let adj = omega_adjoint_raw(&mat, space.n());
        Self { space, mat: (mat - adj) * 0.5 }
    }

    pub fn zero(space: SymplecticSpace) -> Self {
        Self { space, mat: DMatrix::zeros(space.dim(), space.dim()) }
    }

    pub fn space(&self) -> SymplecticSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { space: self.space, mat: &self.mat * s }
    }

    /// `c1·a + c2·b`.
    pub fn lin_comb(c1: f64, a: &SpElement, c2: f64, b: &SpElement) -> Result<Self> {
        a.same_space(b)?;
        Ok(Self { space: a.space, mat: &a.mat * c1 + &b.mat * c2 })
    }

    pub fn add(&self, other: &SpElement) -> Result<Self> {
        Self::lin_comb(1.0, self, 1.0, other)
    }

    /// `[self, other]`; sp(2n, ℝ) is closed under the bracket.
    pub fn bracket(&self, other: &SpElement) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self { space: self.space, mat: commutator(&self.mat, &other.mat) })
    }

    /// `g A g⁻¹` for a symplectic `g`.
    pub fn conjugate(&self, g: &DMatrix<f64>) -> Result<Self> {
        self.space.check_mat(g)?;
        let g_inv = omega_adjoint_raw(g, self.space.n());
        Ok(Self::project_in(self.space, g * &self.mat * g_inv))
    }

    fn same_space(&self, other: &SpElement) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: other.space.dim(),
            });
        }
        Ok(())
    }
}

/// Names the rank-one operators built from a pair of vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankOneKind {
    /// `T_{ξ,η} x = ω(ξ, x) η`
    T,
    /// `Y_{ξ,η} = T_{ξ,ξ} + T_{η,η}`
    Y,
    /// `Z_{ξ,η} = T_{η,ξ} + T_{ξ,η}`
    Z,
}

impl fmt::Display for RankOneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RankOneKind::T => "T",
            RankOneKind::Y => "Y",
            RankOneKind::Z => "Z",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankOneDescriptor {
    pub kind: RankOneKind,
    pub xi: DVector<f64>,
    pub eta: DVector<f64>,
}

impl RankOneDescriptor {
    pub fn new(kind: RankOneKind, xi: DVector<f64>, eta: DVector<f64>) -> Self {
        Self { kind, xi, eta }
    }

    pub fn t(xi: DVector<f64>, eta: DVector<f64>) -> Self {
        Self::new(RankOneKind::T, xi, eta)
    }

    pub fn y(xi: DVector<f64>, eta: DVector<f64>) -> Self {
        Self::new(RankOneKind::Y, xi, eta)
    }

    pub fn z(xi: DVector<f64>, eta: DVector<f64>) -> Self {
        Self::new(RankOneKind::Z, xi, eta)
    }

    pub fn space(&self) -> Result<SymplecticSpace> {
        let space = SymplecticSpace::from_dim(self.xi.len())?;
        space.check_vec(&self.eta)?;
        Ok(space)
    }

    /// `ω(ξ, η)`.
    pub fn pairing(&self) -> Result<f64> {
        self.space()?;
        Ok(omega_raw(self.xi.as_slice(), self.eta.as_slice()))
    }

    /// The operator as a plain matrix.
    pub fn realize(&self) -> Result<DMatrix<f64>> {
        self.space()?;
        let (xi, eta) = (&self.xi, &self.eta);
        Ok(match self.kind {
            RankOneKind::T => t_matrix(xi, eta),
            RankOneKind::Y => t_matrix(xi, xi) + t_matrix(eta, eta),
            RankOneKind::Z => t_matrix(eta, xi) + t_matrix(xi, eta),
        })
    }

    /// The operator as an element of sp(2n, ℝ). `T` qualifies only when ξ = η.
    pub fn to_sp(&self) -> Result<SpElement> {
        if self.kind == RankOneKind::T && self.xi != self.eta {
            return Err(Error::DescriptorNotInSp);
        }
        SpElement::project(self.realize()?)
    }
}

/// Matrix of `x ↦ ω(ξ, x) η`, i.e. `η (ξᵀ Ω)`.
fn t_matrix(xi: &DVector<f64>, eta: &DVector<f64>) -> DMatrix<f64> {
    let d = xi.len();
    let n = d / 2;
    // (ξᵀ Ω)_j = -ξ_{n+j} for j < n and ξ_{j-n} for j ≥ n.
    let row = DVector::from_fn(d, |j, _| if j < n { -xi[n + j] } else { xi[j - n] });
    eta * row.transpose()
}

/// An ω-compatible complex structure `J`: `J² = -I` and `ω(·, J·)` is an
/// inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibleComplexStructure {
    space: SymplecticSpace,
    mat: DMatrix<f64>,
}

impl CompatibleComplexStructure {
    const TOL: f64 = 1e-9;

    /// `J₀ e_i = f_i`, `J₀ f_i = -e_i`, so `ω(x, J₀ x) = |x|²`.
    pub fn standard(space: SymplecticSpace) -> Self {
        let n = space.n();
        let mut mat = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            mat[(n + i, i)] = 1.0;
            mat[(i, n + i)] = -1.0;
        }
        Self { space, mat }
    }

    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        let space = space_of(&mat)?;
        let d = space.dim();
        let scale = max_abs(&mat).max(1.0);
        let sq = &mat * &mat + DMatrix::identity(d, d);
        let sq_defect = max_abs(&sq);
        if sq_defect > Self::TOL * scale * scale {
            return Err(Error::NotCompatible(format!("|J^2 + I| = {sq_defect:.3e}")));
        }
        let g = space.omega_matrix() * &mat;
        let asym = max_abs(&(&g - g.transpose()));
        if asym > Self::TOL * scale {
            return Err(Error::NotCompatible(format!("omega(., J.) asymmetric by {asym:.3e}")));
        }
        let min_eig = g.symmetric_eigenvalues().min();
        if min_eig <= 0.0 {
            return Err(Error::NotCompatible(format!("omega(., J.) not positive (min eig {min_eig:.3e})")));
        }
        Ok(Self { space, mat })
    }

    /// `g J g⁻¹` for symplectic `g`; compatible whenever `J` is.
    pub fn conjugated(&self, g: &DMatrix<f64>) -> Result<Self> {
        self.space.check_mat(g)?;
        let g_inv = symplectic_inverse(g)?;
        Self::new(g * &self.mat * g_inv)
    }

    pub fn space(&self) -> SymplecticSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// The inner product `(x, y)_J = ω(x, J y)`.
    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        self.space.omega(x, &(&self.mat * y))
    }
}

/// Deterministic generator for stream `stream` of seed `seed`.
///
/// ChaCha is counter based, so distinct streams of one seed are independent
/// and reproducible on every platform.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random element of sp(2n, ℝ): uniform entries in `[-scale, scale]`
/// projected onto the algebra.
pub fn random_sp_element<R: Rng + ?Sized>(space: SymplecticSpace, scale: f64, rng: &mut R) -> SpElement {
    assert!(scale >= 0.0 && scale.is_finite(), "scale must be finite and non-negative");
    let d = space.dim();
    if scale == 0.0 {
        return SpElement::zero(space);
    }
    let raw = DMatrix::from_fn(d, d, |_, _| rng.random_range(-scale..=scale));
    SpElement::project_in(space, raw)
}

/// `exp(A)` for a random `A` from [`random_sp_element`].
pub fn random_symplectic<R: Rng + ?Sized>(space: SymplecticSpace, scale: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    let a = random_sp_element(space, scale, rng);
    let g = expm(a.matrix(), 1e-10)?;
    let defect = symplectic_defect(&g)?;
    if defect > 1e-8 * max_abs(&g).powi(2).max(1.0) {
        return Err(Error::SymplecticDefect { defect });
    }
    Ok(g)
}

/// Generator for commuting pairs in sp(2n, ℝ).
#[derive(Debug, Clone, PartialEq)]
pub enum CommutingStrategy {
    /// Symplectic conjugate of two block-diagonal Y/Z combinations that use at
    /// most one kind per Darboux plane.
    CommonFrame,
    /// `p(A)`, `q(A)` for odd polynomials `p`, `q`; `A` is drawn at random
    /// unless supplied.
    OddPolynomial { base: Option<SpElement> },
}

impl CommutingStrategy {
    pub fn odd_polynomial() -> Self {
        CommutingStrategy::OddPolynomial { base: None }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CommutingStrategy::CommonFrame => "common-frame",
            CommutingStrategy::OddPolynomial { .. } => "odd-polynomial",
        }
    }
}

/// Two commuting elements with their commutator certificate.
#[derive(Debug, Clone)]
pub struct CommutingPair {
    pub a: SpElement,
    pub b: SpElement,
    /// `‖[a, b]‖_F`
    pub commutator_norm: f64,
}

pub fn commuting_pair<R: Rng + ?Sized>(
    space: SymplecticSpace,
    strategy: &CommutingStrategy,
    rng: &mut R,
) -> Result<CommutingPair> {
    let (a, b) = match strategy {
        CommutingStrategy::CommonFrame => common_frame_pair(space, rng)?,
        CommutingStrategy::OddPolynomial { base } => {
            let base = match base {
                Some(a) => {
                    if a.space() != space {
                        return Err(Error::DimensionMismatch { expected: space.dim(), found: a.space().dim() });
                    }
                    a.clone()
                }
                None => {
                    let a = random_sp_element(space, 1.0, rng);
                    let norm = a.norm();
                    if norm > 0.0 { a.scaled(1.5 / norm) } else { a }
                }
            };
            let p = random_odd_poly(space.n(), rng);
            let q = random_odd_poly(space.n(), rng);
            (eval_odd_poly(&base, &p), eval_odd_poly(&base, &q))
        }
    };
    let commutator_norm = commutator(a.matrix(), b.matrix()).norm();
    let bound = 1e-9 * (1.0 + a.norm()) * (1.0 + b.norm());
    if commutator_norm > bound {
        return Err(Error::CommutatorDefect { defect: commutator_norm });
    }
    Ok(CommutingPair { a, b, commutator_norm })
}

fn common_frame_pair<R: Rng + ?Sized>(space: SymplecticSpace, rng: &mut R) -> Result<(SpElement, SpElement)> {
    let n = space.n();
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        let kind = if rng.random_bool(0.5) { RankOneKind::Y } else { RankOneKind::Z };
        let plane = RankOneDescriptor::new(kind, space.e(k), space.f(k)).realize()?;
        // Each plane is used by a, by b, or by both.
        let (ca, cb) = match rng.random_range(0..4) {
            0 => (rng.random_range(-1.5..=1.5), 0.0),
            1 => (0.0, rng.random_range(-1.5..=1.5)),
            _ => (rng.random_range(-1.5..=1.5), rng.random_range(-1.5..=1.5)),
        };
        a += &plane * ca;
        b += &plane * cb;
    }
    let g = random_symplectic(space, 0.4, rng)?;
    let a = SpElement::project_in(space, a).conjugate(&g)?;
    let b = SpElement::project_in(space, b).conjugate(&g)?;
    Ok((a, b))
}

/// Coefficients of `t, t³, …, t^{2n-1}`.
fn random_odd_poly<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// `Σ c_k A^{2k+1}`; odd polynomials keep `A` inside sp(2n, ℝ).
pub fn eval_odd_poly(a: &SpElement, coeffs: &[f64]) -> SpElement {
    let a2 = a.matrix() * a.matrix();
    let mut power = a.matrix().clone();
    let mut acc = DMatrix::zeros(a.space().dim(), a.space().dim());
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            power = &a2 * &power;
        }
        acc += &power * *c;
    }
    SpElement::project_in(a.space(), acc)
}
