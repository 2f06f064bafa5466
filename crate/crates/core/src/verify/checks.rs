//! Randomized property checkers.

use nalgebra::DVector;
use rand::Rng;

use super::report::{Tolerance, VerificationReport};
use crate::error::{Error, Result};
use crate::quasistates::{Evaluation, LieQuasiState};
use crate::symplectic::{
    commuting_pair, random_sp_element, random_symplectic, CommutingStrategy, CompatibleComplexStructure,
    RankOneDescriptor, SpElement, SymplecticSpace,
};

/// Scale of the random generators used for conjugating elements.
pub const CONJUGATION_SCALE: f64 = 0.3;

/// `|ζ(c₁A + c₂B) − c₁ζ(A) − c₂ζ(B)|` over random commuting pairs with
/// `c₁, c₂ ∈ [−2, 2]`.
pub fn check_quasi_linearity<R: Rng + ?Sized>(
    zeta: &dyn LieQuasiState,
    strategy: &CommutingStrategy,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let space = zeta.space();
    let mut report = VerificationReport::new("quasi-linearity", &zeta.label(), tol);
    report.notes.push(format!("strategy: {}", strategy.name()));
    if space.n() == 1 {
        report.notes.push("n = 1: commuting pairs are proportional, so a norm-like functional fails only through ζ(−A) ≠ −ζ(A)".into());
    }
    for _ in 0..trials {
        let pair = commuting_pair(space, strategy, rng)?;
        let c1 = rng.random_range(-2.0..=2.0);
        let c2 = rng.random_range(-2.0..=2.0);
        let sum = SpElement::lin_comb(c1, &pair.a, c2, &pair.b)?;
        let ea = zeta.evaluate(&pair.a)?;
        let eb = zeta.evaluate(&pair.b)?;
        let es = zeta.evaluate(&sum)?;
        let defect = (es.value - c1 * ea.value - c2 * eb.value).abs();
        let bars = es.error_bar + c1.abs() * ea.error_bar + c2.abs() * eb.error_bar;
        report.record_with_bars(
            defect,
            bars,
            &[("c1", c1), ("c2", c2), ("commutator", pair.commutator_norm)],
        );
    }
    Ok(report)
}

/// `|ζ(gAg⁻¹) − ζ(A)|` for random `A` and random symplectic `g`.
pub fn check_ad_invariance<R: Rng + ?Sized>(
    zeta: &dyn LieQuasiState,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let space = zeta.space();
    let mut report = VerificationReport::new("ad-invariance", &zeta.label(), tol);
    for _ in 0..trials {
        let a = random_sp_element(space, 1.0, rng);
        let g = random_symplectic(space, CONJUGATION_SCALE, rng)?;
        let b = a.conjugate(&g)?;
        let ea = zeta.evaluate(&a)?;
        let eb = zeta.evaluate(&b)?;
        report.record_with_bars((ea.value - eb.value).abs(), ea.error_bar + eb.error_bar, &[("value", ea.value)]);
    }
    Ok(report)
}

/// Draws `η₁, η₂` with `ω(η₁, η₂) = 0`: `η₂` loses its component along
/// `J₀η₁`, for which `ω(η₁, J₀η₁) = |η₁|²`.
pub fn isotropic_pair<R: Rng + ?Sized>(space: SymplecticSpace, rng: &mut R) -> Result<(DVector<f64>, DVector<f64>)> {
    let d = space.dim();
    let j0 = CompatibleComplexStructure::standard(space);
    let eta1 = DVector::from_fn(d, |_, _| rng.random_range(-1.0..=1.0));
    let eta2 = DVector::from_fn(d, |_, _| rng.random_range(-1.0..=1.0));
    let partner = j0.matrix() * &eta1;
    let w = space.omega(&eta1, &eta2)?;
    let eta2 = eta2 - partner * (w / eta1.norm_squared());
    Ok((eta1, eta2))
}

pub type VectorFunctional<'a> = dyn Fn(&DVector<f64>) -> Result<Evaluation> + 'a;

/// `|φ(c₁η₁ + c₂η₂) − c₁φ(η₁) − c₂φ(η₂)|` over random isotropic pairs.
pub fn check_isotropic_linearity<R: Rng + ?Sized>(
    space: SymplecticSpace,
    label: &str,
    phi: &VectorFunctional<'_>,
    trials: usize,
    tol: Tolerance,
    rng: &mut R,
) -> Result<VerificationReport> {
    if space.n() < 2 {
        return Ok(VerificationReport::skipped(
            "isotropic-linearity",
            label,
            "hypothesis n >= 2 not met: isotropic pairs in dimension 2 are proportional",
        ));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let mut report = VerificationReport::new("isotropic-linearity", label, tol);
    for _ in 0..trials {
        let (eta1, eta2) = isotropic_pair(space, rng)?;
        let c1 = rng.random_range(-2.0..=2.0);
        let c2 = rng.random_range(-2.0..=2.0);
        let e1 = phi(&eta1)?;
        let e2 = phi(&eta2)?;
        let es = phi(&(&eta1 * c1 + &eta2 * c2))?;
        let defect = (es.value - c1 * e1.value - c2 * e2.value).abs();
        let bars = es.error_bar + c1.abs() * e1.error_bar + c2.abs() * e2.error_bar;
        let w = space.omega(&eta1, &eta2)?;
        report.record_with_bars(defect, bars, &[("c1", c1), ("c2", c2), ("omega", w)]);
    }
    Ok(report)
}

/// `F(ξ, η) = ζ(Y_{ξ,η})` and `G(ξ, η) = ζ(Z_{ξ,η})`.
pub struct FGEvaluator<'a> {
    pub quasi_state: &'a dyn LieQuasiState,
    pub space: SymplecticSpace,
}

impl<'a> FGEvaluator<'a> {
    pub fn new(quasi_state: &'a dyn LieQuasiState) -> Self {
        Self { space: quasi_state.space(), quasi_state }
    }

    pub fn f(&self, xi: &DVector<f64>, eta: &DVector<f64>) -> Result<Evaluation> {
        self.quasi_state.evaluate(&RankOneDescriptor::y(xi.clone(), eta.clone()).to_sp()?)
    }

    pub fn g(&self, xi: &DVector<f64>, eta: &DVector<f64>) -> Result<Evaluation> {
        self.quasi_state.evaluate(&RankOneDescriptor::z(xi.clone(), eta.clone()).to_sp()?)
    }

    /// `+1` on the cone `ω(ξ, η) > 0`, `−1` on its negative, `0` on the wall.
    pub fn cone(&self, xi: &DVector<f64>, eta: &DVector<f64>) -> Result<i8> {
        let w = self.space.omega(xi, eta)?;
        Ok(if w > 0.0 {
            1
        } else if w < 0.0 {
            -1
        } else {
            0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maslov::MaslovLimitConfig;
    use crate::quasistates::{discontinuous_qs, linear_qs, maslov_qs, nilpotent_jordan_sp, FunctionalQs, MaslovMethod};
    use crate::symplectic::seeded_rng;
    use nalgebra::DMatrix;

    fn sp(n: usize) -> SymplecticSpace {
        SymplecticSpace::new(n).unwrap()
    }

    #[test]
    fn linear_passes_quasi_linearity_tightly() {
        let mut rng = seeded_rng(1, 0);
        let s = sp(2);
        let q = linear_qs(DMatrix::from_fn(4, 4, |i, j| (i as f64) - 0.5 * j as f64)).unwrap();
        for strat in [CommutingStrategy::CommonFrame, CommutingStrategy::odd_polynomial()] {
            let r = check_quasi_linearity(&q, &strat, 10, Tolerance::Absolute(1e-10), &mut rng).unwrap();
            assert!(r.pass, "{}", r.summary_line());
            assert_eq!(r.trials, 10);
        }
        let _ = s;
    }

    #[test]
    fn norm_control_fails_for_every_n() {
        for n in 1..=2 {
            let mut rng = seeded_rng(2, n as u64);
            let q = FunctionalQs::norm_control(sp(n));
            let r = check_quasi_linearity(&q, &CommutingStrategy::CommonFrame, 10, Tolerance::ErrorBars(3.0), &mut rng)
                .unwrap();
            assert!(!r.pass);
        }
    }

    #[test]
    fn discontinuous_on_its_own_jordan_element() {
        let s = sp(2);
        let a = nilpotent_jordan_sp(s).unwrap();
        let q = discontinuous_qs(a.clone(), 1.0).unwrap();
        let strat = CommutingStrategy::OddPolynomial { base: Some(a) };
        let r = check_quasi_linearity(&q, &strat, 10, Tolerance::Absolute(1e-9), &mut seeded_rng(3, 0)).unwrap();
        assert!(r.pass, "{}", r.summary_line());
    }

    #[test]
    fn ad_invariance_separates_maslov_from_linear() {
        let s = sp(2);
        let mut rng = seeded_rng(4, 0);
        let m = maslov_qs(s, MaslovLimitConfig::default(), MaslovMethod::Spectral).unwrap();
        let r = check_ad_invariance(&m, 10, Tolerance::ErrorBars(2.0), &mut rng).unwrap();
        assert!(r.pass, "{}", r.summary_line());
        let lin = linear_qs(DMatrix::from_fn(4, 4, |i, j| ((i * 4 + j) % 5) as f64 - 2.0)).unwrap();
        let r = check_ad_invariance(&lin, 10, Tolerance::ErrorBars(2.0), &mut rng).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn isotropic_pairs_are_isotropic() {
        let s = sp(3);
        let mut rng = seeded_rng(5, 0);
        for _ in 0..20 {
            let (a, b) = isotropic_pair(s, &mut rng).unwrap();
            assert!(s.omega(&a, &b).unwrap().abs() <= 1e-14);
        }
    }

    #[test]
    fn isotropic_linearity_examples() {
        let s = sp(2);
        let mut rng = seeded_rng(6, 0);
        let w = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let lin = move |x: &DVector<f64>| Ok(Evaluation::exact(w.dot(x)));
        let r = check_isotropic_linearity(s, "linear", &lin, 20, Tolerance::Absolute(1e-10), &mut rng).unwrap();
        assert!(r.pass);
        let norm = |x: &DVector<f64>| Ok(Evaluation::exact(x.norm()));
        let r = check_isotropic_linearity(s, "norm", &norm, 20, Tolerance::Absolute(1e-10), &mut rng).unwrap();
        assert!(!r.pass);

        let m = maslov_qs(s, MaslovLimitConfig::default(), MaslovMethod::Auto).unwrap();
        let fg = FGEvaluator::new(&m);
        let xi = DVector::from_vec(vec![0.3, -0.7, 1.1, 0.2]);
        let g = |eta: &DVector<f64>| fg.g(&xi, eta);
        let r = check_isotropic_linearity(s, "G(xi,.)", &g, 10, Tolerance::ErrorBars(3.0), &mut rng).unwrap();
        assert!(r.pass, "{}", r.summary_line());

        let r = check_isotropic_linearity(sp(1), "linear", &norm, 5, Tolerance::Absolute(1e-10), &mut rng).unwrap();
        assert!(r.skipped);
    }

    #[test]
    fn fg_values_for_maslov() {
        let s = sp(2);
        let m = maslov_qs(s, MaslovLimitConfig::default(), MaslovMethod::Spectral).unwrap();
        let fg = FGEvaluator::new(&m);
        let mut rng = seeded_rng(7, 0);
        for _ in 0..10 {
            let xi = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
            let eta = DVector::from_fn(4, |_, _| rng.random_range(-1.0..1.0));
            let w = s.omega(&xi, &eta).unwrap();
            assert!((fg.f(&xi, &eta).unwrap().value + w.abs()).abs() <= 1e-9);
            assert!(fg.g(&xi, &eta).unwrap().value.abs() <= 1e-9);
            assert_eq!(fg.cone(&xi, &eta).unwrap(), if w > 0.0 { 1 } else { -1 });
        }
    }
}
