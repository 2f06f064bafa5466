//! Recovers `ζ = −tr(C·) + m·ζ_M` from evaluations of a composite quasi-state.

use std::sync::Arc;

use lieqs::maslov::MaslovLimitConfig;
use lieqs::quasistates::{composite_qs, linear_qs, maslov_qs, LieQuasiState, MaslovMethod};
use lieqs::symplectic::{seeded_rng, SymplecticSpace};
use lieqs::verify::fit_main_theorem;
use lieqs::{DMatrix, Result};

fn main() -> Result<()> {
    let s = SymplecticSpace::new(3)?;
    let zm: Arc<dyn LieQuasiState> = Arc::new(maslov_qs(s, MaslovLimitConfig::default(), MaslovMethod::Spectral)?);
    let n0 = DMatrix::from_fn(6, 6, |i, j| 0.1 * (i as f64 - j as f64 * 0.5).sin());
    let lin: Arc<dyn LieQuasiState> = Arc::new(linear_qs(n0)?);
    let mut rng = seeded_rng(21, 0);
    for m in [-1.0, 0.5, 2.0] {
        let zeta = composite_qs(vec![(m, zm.clone()), (1.0, lin.clone())])?;
        let (report, fit) = fit_main_theorem(&zeta, 1e-2, &mut rng)?;
        println!("{}", report.summary_line());
        if let Some(fit) = fit {
            println!("  true maslov coefficient {m:+.3}, recovered {:+.6}", fit.maslov_coefficient);
            println!("  stage residuals {:?}", fit.stage_residuals);
        }
    }
    Ok(())
}
