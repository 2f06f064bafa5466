//! Williamson normal form of semi-simple elements of sp(2n, ℝ).
//!
//! A semi-simple `B` is written as `S·D·S⁻¹` with `S` symplectic and `D`
//! block diagonal over Darboux planes. In the basis `e_k, f_k` (or
//! `e_k, e_{k+1}, f_k, f_{k+1}`) each block is one of
//!
//! ```text
//! RealPair(a):   [[-a, 0], [0, a]]
//! ImagPair(b):   [[0, b], [-b, 0]]
//! Quadruple(a, b):
//!                [[-a,  b, 0, 0],
//!                 [-b, -a, 0, 0],
//!                 [ 0,  0, a, b],
//!                 [ 0,  0,-b, a]]
//! ```
//!
//! `ImagPair(b)` and `ImagPair(-b)` share the eigenvalues `±i|b|` but are not
//! symplectically conjugate; the sign of `b` records the Krein orientation.

use std::cmp::Ordering;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, 
    commutator, condition_number, max_abs, null_space_complex, null_space_real, orthonormal_span, spectral_norm, to_complex, C64,
};
use crate::symplectic::{
    omega_adjoint_raw, random_symplectic, symplectic_defect, RankOneDescriptor, SpElement, SymplecticSpace,
};

/// An eigenvalue within `AXIS_BAND·(1 + |λ|)` of an axis lies on it.
pub const AXIS_BAND: f64 = 1e-8;
/// Eigenvalues closer than `CLUSTER_TOL·(1 + ‖B‖)` are merged; this is also
/// the radius of the zero cluster.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Largest kernel singular value (relative to `1 + ‖B‖`) accepted for a
/// semi-simple cluster.
pub const KERNEL_TOL: f64 = 1e-6;
/// Largest accepted condition number of the Williamson frame.
pub const FRAME_CONDITION_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClusterKind {
    Zero,
    RealPair,
    ImagPair,
    Quadruple,
}

/// A group of eigenvalues `±re ± i·im` treated as one spectral value.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    pub kind: ClusterKind,
    /// Mean of `|Re λ|` over the members.
    pub re: f64,
    /// Mean of `|Im λ|` over the members.
    pub im: f64,
    /// Number of eigenvalues in the cluster.
    pub count: usize,
    /// Number of Williamson blocks the cluster yields.
    pub multiplicity: usize,
    /// Largest distance of a member from the cluster centre.
    pub spread: f64,
    /// Largest singular value inside the selected eigenspace(s).
    pub kernel_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<C64>,
    pub clusters: Vec<EigenCluster>,
    /// Every cluster has a full eigenspace at tolerance [`KERNEL_TOL`].
    pub semisimple: bool,
}

impl SpectrumReport {
    pub fn count(&self, kind: ClusterKind) -> usize {
        self.clusters.iter().filter(|c| c.kind == kind).map(|c| c.multiplicity).sum()
    }
}

/// Groups the spectrum of `B` into zero, real-pair, imaginary-pair and
/// quadruple clusters and tests each eigenspace for full dimension.
pub fn classify_eigenstructure(b: &SpElement) -> Result<SpectrumReport> {
    let mat = b.matrix();
    let dim = mat.nrows();
    let scale = 1.0 + spectral_norm(mat);
    let tol = CLUSTER_TOL * scale;
    let eigenvalues = eigenvalues(mat)?;

    let reps: Vec<(f64, f64)> = eigenvalues.iter().map(|z| (z.re.abs(), z.im.abs())).collect();
    let mut zero_members = Vec::new();
    let mut rest = Vec::new();
    for (i, z) in eigenvalues.iter().enumerate() {
        if z.norm() <= tol {
            zero_members.push(i);
        } else {
            rest.push(i);
        }
    }
    rest.sort_by(|&i, &j| {
        reps[i].0.total_cmp(&reps[j].0).then(reps[i].1.total_cmp(&reps[j].1)).then(i.cmp(&j))
    });
    let groups = single_linkage(&rest, &reps, tol);

    let mut clusters = Vec::new();
    if !zero_members.is_empty() {
        let spread = zero_members.iter().map(|&i| eigenvalues[i].norm()).fold(0.0, f64::max);
        let count = zero_members.len();
        if count % 2 != 0 {
            return Err(Error::AmbiguousEigenvalue { re: 0.0, im: 0.0 });
        }
        let (_, residual, _) = null_space_real(mat, count);
        clusters.push(EigenCluster {
            kind: ClusterKind::Zero,
            re: 0.0,
            im: 0.0,
            count,
            multiplicity: count / 2,
            spread,
            kernel_residual: residual,
        });
    }
    for members in groups {
        let count = members.len();
        let re = members.iter().map(|&i| reps[i].0).sum::<f64>() / count as f64;
        let im = members.iter().map(|&i| reps[i].1).sum::<f64>() / count as f64;
        let spread = members
            .iter()
            .map(|&i| (reps[i].0 - re).hypot(reps[i].1 - im))
            .fold(0.0, f64::max);
        let band = AXIS_BAND * (1.0 + re.hypot(im));
        let kind = if re <= band {
            ClusterKind::ImagPair
        } else if im <= band {
            ClusterKind::RealPair
        } else {
            ClusterKind::Quadruple
        };
        let per_block = if kind == ClusterKind::Quadruple { 4 } else { 2 };
        if count % per_block != 0 {
            return Err(Error::AmbiguousEigenvalue { re, im });
        }
        let m = count / per_block;
        let kernel_residual = match kind {
            ClusterKind::RealPair => {
                let (_, r1, _) = null_space_real(&shifted(mat, -re), m);
                let (_, r2, _) = null_space_real(&shifted(mat, re), m);
                r1.max(r2)
            }
            ClusterKind::ImagPair => complex_kernel(mat, C64::new(0.0, im), m).1,
            ClusterKind::Quadruple => {
                let r1 = complex_kernel(mat, C64::new(-re, im), m).1;
                let r2 = complex_kernel(mat, C64::new(re, im), m).1;
                r1.max(r2)
            }
            ClusterKind::Zero => unreachable!("zero eigenvalues are grouped separately"),
        };
        let (re, im) = match kind {
            ClusterKind::ImagPair => (0.0, im),
            ClusterKind::RealPair => (re, 0.0),
            _ => (re, im),
        };
        clusters.push(EigenCluster { kind, re, im, count, multiplicity: m, spread, kernel_residual });
    }
    let total: usize = clusters.iter().map(|c| c.count).sum();
    debug_assert_eq!(total, dim);
    let semisimple = clusters.iter().all(|c| c.kernel_residual <= KERNEL_TOL * scale);
    Ok(SpectrumReport { eigenvalues, clusters, semisimple })
}

fn single_linkage(order: &[usize], reps: &[(f64, f64)], tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in order {
        let hits: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|(_, g)| g.iter().any(|&j| (reps[i].0 - reps[j].0).hypot(reps[i].1 - reps[j].1) <= tol))
            .map(|(k, _)| k)
            .collect();
        match hits.first() {
            None => groups.push(vec![i]),
            Some(&first) => {
                for &k in hits.iter().skip(1).rev() {
                    let merged = groups.remove(k);
                    groups[first].extend(merged);
                }
                groups[first].push(i);
            }
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}

/// `B − λI` for real `λ`.
fn shifted(b: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let mut m = b.clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= lambda;
    }
    m
}

fn complex_kernel(b: &DMatrix<f64>, lambda: C64, dim: usize) -> (DMatrix<C64>, f64) {
    let mut m = to_complex(b);
    for i in 0..m.nrows() {
        m[(i, i)] -= lambda;
    }
    let (basis, inside, _) = null_space_complex(&m, dim);
    (basis, inside)
}

/// Real span of the real and imaginary parts of a complex basis.
fn realify(basis: &DMatrix<C64>, rank: usize) -> DMatrix<f64> {
    let rows = basis.nrows();
    let k = basis.ncols();
    let parts = DMatrix::from_fn(rows, 2 * k, |i, j| if j < k { basis[(i, j)].re } else { basis[(i, j - k)].im });
    orthonormal_span(&parts, rank)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockType {
    RealPair(f64),
    ImagPair(f64),
    Quadruple(f64, f64),
}

impl BlockType {
    pub fn planes(&self) -> usize {
        match self {
            BlockType::Quadruple(..) => 2,
            _ => 1,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            BlockType::RealPair(_) => 0,
            BlockType::ImagPair(_) => 1,
            BlockType::Quadruple(..) => 2,
        }
    }

    fn magnitude(&self) -> f64 {
        match *self {
            BlockType::RealPair(a) => a.abs(),
            BlockType::ImagPair(b) => b.abs(),
            BlockType::Quadruple(a, b) => a.hypot(b),
        }
    }

    fn signed_key(&self) -> f64 {
        match *self {
            BlockType::RealPair(a) => a,
            BlockType::ImagPair(b) => b,
            BlockType::Quadruple(_, b) => b,
        }
    }

    /// Type first, then parameter magnitude, then signed parameter.
    pub fn canonical_cmp(&self, other: &BlockType) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then(self.magnitude().total_cmp(&other.magnitude()))
            .then(self.signed_key().total_cmp(&other.signed_key()))
    }

    pub fn name(&self) -> &'static str {
        match self {
            BlockType::RealPair(_) => "real-pair",
            BlockType::ImagPair(_) => "imag-pair",
            BlockType::Quadruple(..) => "quadruple",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonBlock {
    pub btype: BlockType,
    /// 0-based Darboux plane indices; quadruples use two consecutive planes.
    pub plane_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonDecomposition {
    pub space: SymplecticSpace,
    /// Columns `0..n` are `e_1..e_n`, columns `n..2n` are `f_1..f_n`.
    pub s: DMatrix<f64>,
    pub blocks: Vec<WilliamsonBlock>,
    /// `‖S·D·S⁻¹ − B‖_F`.
    pub reconstruction_residual: f64,
    /// `‖SᵀΩS − Ω‖_max`.
    pub symplectic_defect: f64,
    /// `cond₂(S)`.
    pub frame_condition: f64,
    pub spectrum: SpectrumReport,
}

impl WilliamsonDecomposition {
    pub fn e(&self, k: usize) -> DVector<f64> {
        self.s.column(k).into_owned()
    }

    pub fn f(&self, k: usize) -> DVector<f64> {
        self.s.column(self.space.n() + k).into_owned()
    }

    /// The block-diagonal normal form `D`.
    pub fn normal_form(&self) -> DMatrix<f64> {
        block_diagonal(self.space, &self.blocks)
    }

    /// `S·D·S⁻¹` with `S⁻¹ = Ω⁻¹SᵀΩ`.
    pub fn assemble(&self) -> DMatrix<f64> {
        &self.s * self.normal_form() * omega_adjoint_raw(&self.s, self.space.n())
    }
}

/// The normal form `D` for a list of blocks in the standard frame.
pub fn block_diagonal(space: SymplecticSpace, blocks: &[WilliamsonBlock]) -> DMatrix<f64> {
    let n = space.n();
    let mut d = DMatrix::zeros(2 * n, 2 * n);
    for blk in blocks {
        let k = blk.plane_indices[0];
        match blk.btype {
            BlockType::RealPair(a) => {
                d[(k, k)] = -a;
                d[(n + k, n + k)] = a;
            }
            BlockType::ImagPair(b) => {
                d[(k, n + k)] = b;
                d[(n + k, k)] = -b;
            }
            BlockType::Quadruple(a, b) => {
                let l = blk.plane_indices[1];
                d[(k, k)] = -a;
                d[(k, l)] = b;
                d[(l, k)] = -b;
                d[(l, l)] = -a;
                d[(n + k, n + k)] = a;
                d[(n + k, n + l)] = b;
                d[(n + l, n + k)] = -b;
                d[(n + l, n + l)] = a;
            }
        }
    }
    d
}

/// Frame vectors of one block before planes are assigned.
struct PendingBlock {
    btype: BlockType,
    es: Vec<DVector<f64>>,
    fs: Vec<DVector<f64>>,
}

/// Symplectic frame `S` and typed blocks with `B = S·D·S⁻¹`.
pub fn williamson_decompose(b: &SpElement) -> Result<WilliamsonDecomposition> {
    let spectrum = classify_eigenstructure(b)?;
    if !spectrum.semisimple {
        let worst = spectrum.clusters.iter().map(|c| c.kernel_residual).fold(0.0, f64::max);
        return Err(Error::NotSemisimple(format!("eigenspace deficit, kernel residual {worst:.3e}")));
    }
    let space = b.space();
    let n = space.n();
    let mat = b.matrix();
    let mut pending = Vec::new();
    for cluster in &spectrum.clusters {
        let m = cluster.multiplicity;
        match cluster.kind {
            ClusterKind::Zero => zero_blocks(mat, cluster.count, &mut pending)?,
            ClusterKind::RealPair => real_blocks(mat, cluster.re, m, &mut pending)?,
            ClusterKind::ImagPair => imag_blocks(mat, cluster.im, m, &mut pending)?,
            ClusterKind::Quadruple => quadruple_blocks(mat, cluster.re, cluster.im, m, &mut pending)?,
        }
    }
    pending.sort_by(|x, y| x.btype.canonical_cmp(&y.btype));

    let mut s = DMatrix::zeros(2 * n, 2 * n);
    let mut blocks = Vec::with_capacity(pending.len());
    let mut plane = 0;
    for blk in pending {
        let planes: Vec<usize> = (plane..plane + blk.btype.planes()).collect();
        for (j, &p) in planes.iter().enumerate() {
            s.set_column(p, &blk.es[j]);
            s.set_column(n + p, &blk.fs[j]);
        }
        plane += planes.len();
        blocks.push(WilliamsonBlock { btype: blk.btype, plane_indices: planes });
    }
    if plane != n {
        return Err(Error::Normalization(format!("frame covers {plane} of {n} planes")));
    }
    let frame_condition = condition_number(&s);
    if !(frame_condition <= FRAME_CONDITION_LIMIT) {
        return Err(Error::NotSemisimple(format!("eigenvector frame condition {frame_condition:.3e}")));
    }
    let symplectic_defect = symplectic_defect(&s)?;
    let mut dec = WilliamsonDecomposition {
        space,
        s,
        blocks,
        reconstruction_residual: 0.0,
        symplectic_defect,
        frame_condition,
        spectrum,
    };
    dec.reconstruction_residual = (dec.assemble() - mat).norm();
    Ok(dec)
}

fn omega_mat(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    // xᵀ Ω y without forming Ω.
    let n = x.nrows() / 2;
    let xp = x.rows(0, n);
    let xq = x.rows(n, n);
    let yp = y.rows(0, n);
    let yq = y.rows(n, n);
    xp.transpose() * yq - xq.transpose() * yp
}

fn omega_vec(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    crate::symplectic::omega_raw(x.as_slice(), y.as_slice())
}

/// `F = P·(EᵀΩP)⁻¹`, the ω-dual of `E` inside `span P`.
fn dual_basis(e: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let pairing = omega_mat(e, p);
    let cond = condition_number(&pairing);
    if !(cond <= FRAME_CONDITION_LIMIT) {
        return Err(Error::NotSemisimple(format!("eigenspace pairing condition {cond:.3e}")));
    }
    let inv = pairing.try_inverse().ok_or(Error::Normalization("singular eigenspace pairing".into()))?;
    Ok(p * inv)
}

fn real_blocks(b: &DMatrix<f64>, a: f64, m: usize, out: &mut Vec<PendingBlock>) -> Result<()> {
    let (e, _, _) = null_space_real(&shifted(b, -a), m);
    let (p, _, _) = null_space_real(&shifted(b, a), m);
    let f = dual_basis(&e, &p)?;
    for k in 0..m {
        out.push(PendingBlock {
            btype: BlockType::RealPair(a),
            es: vec![e.column(k).into_owned()],
            fs: vec![f.column(k).into_owned()],
        });
    }
    Ok(())
}

/// Removes the ω-projection onto `span{e, f}` (with `ω(e, f) = 1`) from the
/// columns of `x` and re-orthonormalizes to `rank` columns.
fn deflate(x: &DMatrix<f64>, e: &DVector<f64>, f: &DVector<f64>, rank: usize) -> DMatrix<f64> {
    if rank == 0 {
        return DMatrix::zeros(x.nrows(), 0);
    }
    let mut y = x.clone();
    for j in 0..y.ncols() {
        let col = y.column(j).into_owned();
        let proj = e * omega_vec(&col, f) - f * omega_vec(&col, e);
        y.set_column(j, &(col - proj));
    }
    orthonormal_span(&y, rank)
}

fn zero_blocks(b: &DMatrix<f64>, count: usize, out: &mut Vec<PendingBlock>) -> Result<()> {
    let (mut x, _, _) = null_space_real(b, count);
    let mut remaining = count;
    while remaining > 0 {
        let gram = omega_mat(&x, &x);
        let mut best = (0, 1, 0.0_f64);
        for i in 0..remaining {
            for j in (i + 1)..remaining {
                if gram[(i, j)].abs() > best.2.abs() {
                    best = (i, j, gram[(i, j)]);
                }
            }
        }
        let (i, j, w) = best;
        if w.abs() <= 1e-8 {
            return Err(Error::Normalization(format!("kernel is not symplectic (max pairing {w:.3e})")));
        }
        let scale = w.abs().sqrt();
        let e = x.column(i) / scale;
        let f = x.column(j) * (w.signum() / scale);
        remaining -= 2;
        x = deflate(&x, &e, &f, remaining);
        out.push(PendingBlock { btype: BlockType::RealPair(0.0), es: vec![e], fs: vec![f] });
    }
    Ok(())
}

fn imag_blocks(b: &DMatrix<f64>, beta: f64, m: usize, out: &mut Vec<PendingBlock>) -> Result<()> {
    let (basis, _) = complex_kernel(b, C64::new(0.0, beta), m);
    let mut x = realify(&basis, 2 * m);
    let j = b / beta;
    let mut remaining = 2 * m;
    while remaining > 0 {
        let jx = &j * &x;
        let g = omega_mat(&x, &jx);
        let g = (&g + g.transpose()) * 0.5;
        let eig = g.symmetric_eigen();
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |acc, (k, v)| if v.abs() > acc.1 { (k, v.abs()) } else { acc });
        let u = &x * eig.eigenvectors.column(idx);
        let gu = omega_vec(&u, &(&j * &u));
        if gu.abs() <= 1e-8 * u.norm_squared() {
            return Err(Error::Normalization(format!("degenerate Krein form on imaginary pair {beta:.6e}")));
        }
        let e = &u / gu.abs().sqrt();
        let sigma = -gu.signum();
        let f = (&j * &e) * (-sigma);
        remaining -= 2;
        x = deflate(&x, &e, &f, remaining);
        out.push(PendingBlock { btype: BlockType::ImagPair(sigma * beta), es: vec![e], fs: vec![f] });
    }
    Ok(())
}

fn quadruple_blocks(b: &DMatrix<f64>, a: f64, beta: f64, m: usize, out: &mut Vec<PendingBlock>) -> Result<()> {
    let (minus, _) = complex_kernel(b, C64::new(-a, beta), m);
    let (plus, _) = complex_kernel(b, C64::new(a, beta), m);
    let x_minus = realify(&minus, 2 * m);
    let x_plus = realify(&plus, 2 * m);
    let k_op = (b + DMatrix::identity(b.nrows(), b.ncols()) * a) / beta;
    let dim = b.nrows();
    let mut es = DMatrix::zeros(dim, 2 * m);
    let mut rest = x_minus;
    for k in 0..m {
        let u = rest.column(0).into_owned();
        let v = -(&k_op * &u);
        es.set_column(2 * k, &u);
        es.set_column(2 * k + 1, &v);
        let left = 2 * m - 2 * (k + 1);
        if left > 0 {
            let chosen = orthonormal_span(&es.columns(0, 2 * k + 2).into_owned(), 2 * k + 2);
            let projected = &rest - &chosen * (chosen.transpose() * &rest);
            rest = orthonormal_span(&projected, left);
        }
    }
    let fs = dual_basis(&es, &x_plus)?;
    for k in 0..m {
        out.push(PendingBlock {
            btype: BlockType::Quadruple(a, beta),
            es: vec![es.column(2 * k).into_owned(), es.column(2 * k + 1).into_owned()],
            fs: vec![fs.column(2 * k).into_owned(), fs.column(2 * k + 1).into_owned()],
        });
    }
    Ok(())
}

/// One summand of the commuting Y/Z representation.
#[derive(Debug, Clone, PartialEq)]
pub struct YzTerm {
    pub coefficient: f64,
    pub descriptor: RankOneDescriptor,
    /// Index of the Williamson block the term comes from.
    pub block: usize,
}

/// Writes `B` as a sum of pairwise commuting multiples of `Y` and `Z`
/// operators built from the Williamson frame.
///
/// Zero blocks contribute no terms.
pub fn yz_decomposition(dec: &WilliamsonDecomposition) -> Vec<YzTerm> {
    let mut terms = Vec::new();
    for (idx, blk) in dec.blocks.iter().enumerate() {
        let k = blk.plane_indices[0];
        match blk.btype {
            BlockType::RealPair(a) => {
                if a != 0.0 {
                    terms.push(YzTerm { coefficient: a, descriptor: RankOneDescriptor::z(dec.e(k), dec.f(k)), block: idx });
                }
            }
            BlockType::ImagPair(b) => {
                terms.push(YzTerm { coefficient: b, descriptor: RankOneDescriptor::y(dec.e(k), dec.f(k)), block: idx });
            }
            BlockType::Quadruple(a, b) => {
                let l = blk.plane_indices[1];
                let (ek, el, fk, fl) = (dec.e(k), dec.e(l), dec.f(k), dec.f(l));
                let r = FRAC_1_SQRT_2;
                terms.push(YzTerm { coefficient: a, descriptor: RankOneDescriptor::z(ek.clone(), fk.clone()), block: idx });
                terms.push(YzTerm { coefficient: a, descriptor: RankOneDescriptor::z(el.clone(), fl.clone()), block: idx });
                terms.push(YzTerm {
                    coefficient: -b,
                    descriptor: RankOneDescriptor::y((&el - &fk) * r, (&ek + &fl) * r),
                    block: idx,
                });
                terms.push(YzTerm {
                    coefficient: b,
                    descriptor: RankOneDescriptor::y((&ek - &fl) * r, (&el + &fk) * r),
                    block: idx,
                });
            }
        }
    }
    terms
}

/// `Σ coefficient·realize(descriptor)`.
pub fn realize_terms(space: SymplecticSpace, terms: &[YzTerm]) -> Result<DMatrix<f64>> {
    let mut acc = DMatrix::zeros(space.dim(), space.dim());
    for t in terms {
        acc += t.descriptor.realize()? * t.coefficient;
    }
    Ok(acc)
}

/// For every quadruple block, the max-norm of the three commutators
/// `[aZ₁ + aZ₂, −bY₁ + bY₂]`, `[Z₁, Z₂]` and `[Y₁, Y₂]` formed from its
/// four terms. The individual `Z` and `Y` terms of one quadruple do not
/// commute with each other; only these groupings do.
pub fn quadruple_relation_defects(dec: &WilliamsonDecomposition) -> Result<Vec<[f64; 3]>> {
    let terms = yz_decomposition(dec);
    let mut out = Vec::new();
    for (idx, blk) in dec.blocks.iter().enumerate() {
        if !matches!(blk.btype, BlockType::Quadruple(..)) {
            continue;
        }
        let group: Vec<&YzTerm> = terms.iter().filter(|t| t.block == idx).collect();
        let m: Vec<DMatrix<f64>> = group.iter().map(|t| t.descriptor.realize()).collect::<Result<_>>()?;
        let z_sum = &m[0] * group[0].coefficient + &m[1] * group[1].coefficient;
        let y_sum = &m[2] * group[2].coefficient + &m[3] * group[3].coefficient;
        out.push([
            max_abs(&commutator(&z_sum, &y_sum)),
            max_abs(&commutator(&m[0], &m[1])),
            max_abs(&commutator(&m[2], &m[3])),
        ]);
    }
    Ok(out)
}

/// Random block list covering `n` planes: quadruples with probability 1/3
/// when two planes remain, otherwise real or imaginary pairs. Parameters
/// have magnitude in `[0.3, 1.5]`; imaginary pairs get a random Krein sign.
pub fn random_blocks<R: Rng + ?Sized>(space: SymplecticSpace, rng: &mut R) -> Vec<WilliamsonBlock> {
    let n = space.n();
    let mut blocks = Vec::new();
    let mut plane = 0;
    while plane < n {
        let left = n - plane;
        let draw = rng.random_range(0.0..1.0);
        if left >= 2 && draw < 1.0 / 3.0 {
            let a = rng.random_range(0.3..=1.5);
            let b = rng.random_range(0.3..=1.5);
            blocks.push(WilliamsonBlock { btype: BlockType::Quadruple(a, b), plane_indices: vec![plane, plane + 1] });
            plane += 2;
        } else {
            let mag = rng.random_range(0.3..=1.5);
            let btype = if rng.random_bool(0.5) {
                BlockType::RealPair(mag)
            } else if rng.random_bool(0.5) {
                BlockType::ImagPair(mag)
            } else {
                BlockType::ImagPair(-mag)
            };
            blocks.push(WilliamsonBlock { btype, plane_indices: vec![plane] });
            plane += 1;
        }
    }
    blocks
}

/// A random semi-simple element with known blocks.
#[derive(Debug, Clone)]
pub struct SemisimpleSample {
    pub element: SpElement,
    pub blocks: Vec<WilliamsonBlock>,
    /// Symplectic conjugator: `element = g·D·g⁻¹`.
    pub g: DMatrix<f64>,
}

/// `g·D·g⁻¹` for random blocks `D` and a random symplectic `g` of scale 0.3.
pub fn random_semisimple<R: Rng + ?Sized>(space: SymplecticSpace, rng: &mut R) -> Result<SemisimpleSample> {
    let blocks = random_blocks(space, rng);
    let d = block_diagonal(space, &blocks);
    let g = random_symplectic(space, 0.3, rng)?;
    let element = SpElement::project(&g * d * omega_adjoint_raw(&g, space.n()))?;
    Ok(SemisimpleSample { element, blocks, g })
}
