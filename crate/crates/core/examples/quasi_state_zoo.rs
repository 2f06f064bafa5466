use std::sync::Arc;

use lieqs::maslov::MaslovLimitConfig;
use lieqs::quasistates::{
    composite_qs, dim2_homogeneous_qs, linear_qs, maslov_qs, FunctionalQs, LieQuasiState, MaslovMethod,
};
use lieqs::symplectic::{random_sp_element, seeded_rng, CommutingStrategy, SymplecticSpace};
use lieqs::verify::{check_quasi_linearity, Tolerance};
use lieqs::{DMatrix, Result};

fn main() -> Result<()> {
    let s1 = SymplecticSpace::new(1)?;
    let s2 = SymplecticSpace::new(2)?;
    let mut rng = seeded_rng(1, 0);

    // On sp(2) any odd, homogeneous, conjugation invariant function works.
    let cubic = dim2_homogeneous_qs(
        s1,
        "det-sign",
        Arc::new(|a| {
            let m = a.matrix();
            let det = -(m[(0, 0)] * m[(0, 0)] + m[(0, 1)] * m[(1, 0)]);
            if det > 0.0 { m[(1, 0)].signum() * det.sqrt() } else { 0.0 }
        }),
    )?;
    let zm2 = Arc::new(maslov_qs(s2, MaslovLimitConfig::default(), MaslovMethod::Auto)?);
    let lin2 = Arc::new(linear_qs(DMatrix::from_fn(4, 4, |i, j| ((i + 2 * j) as f64).cos()))?);
    let mix = composite_qs(vec![(2.0, zm2.clone() as Arc<dyn LieQuasiState>), (-1.0, lin2.clone() as _)])?;
    let norm = FunctionalQs::norm_control(s2);

    let zoo: Vec<&dyn LieQuasiState> = vec![&cubic, zm2.as_ref(), lin2.as_ref(), &mix, &norm];
    for q in zoo {
        let a = random_sp_element(q.space(), 1.0, &mut rng);
        let v = q.evaluate(&a)?;
        let r = check_quasi_linearity(q, &CommutingStrategy::CommonFrame, 20, Tolerance::ErrorBars(3.0), &mut rng)?;
        println!("{:<28} {:<16} ζ(A) = {:+.5} ± {:.1e}   {}", q.label(), q.provenance(), v.value, v.error_bar, r.status());
    }
    Ok(())
}
