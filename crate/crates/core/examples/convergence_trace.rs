//! Writes `θ(t)/t` for an elliptic and a hyperbolic element of sp(4, ℝ) to
//! `convergence_trace.csv` in the working directory.

use lieqs::cli::write_atomic;
use lieqs::maslov::{maslov_spectral, maslov_trace, MaslovLimitConfig};
use lieqs::symplectic::SpElement;
use lieqs::{DMatrix, Result};

fn main() -> Result<()> {
    let elliptic = SpElement::new(DMatrix::from_row_slice(4, 4, &[
        0.0, 0.0, -1.0, 0.0,
        0.0, 0.0, 0.0, 0.5,
        1.0, 0.0, 0.0, 0.0,
        0.0, -0.5, 0.0, 0.0,
    ]))?;
    let hyperbolic = SpElement::new(DMatrix::from_row_slice(4, 4, &[
        0.7, 0.1, 0.0, 0.2,
        0.0, -0.3, 0.2, 0.0,
        0.0, 0.0, -0.7, 0.0,
        0.0, 0.0, -0.1, 0.3,
    ]))?;
    let cfg = MaslovLimitConfig { t_max: 500.0, ..Default::default() };
    let mut csv = String::from("element,t,theta,theta_over_t\n");
    for (name, b) in [("elliptic", &elliptic), ("hyperbolic", &hyperbolic)] {
        let (est, rows) = maslov_trace(b, &cfg, 50)?;
        for r in &rows {
            csv.push_str(&format!("{name},{},{},{}\n", r.t, r.theta, r.theta_over_t));
        }
        println!("{name}: limit {:+.6} ± {:.1e}, spectral {:+.6}", est.value, est.error_bar, maslov_spectral(b)?.value);
    }
    write_atomic(std::path::Path::new("convergence_trace.csv"), csv.as_bytes())?;
    println!("wrote convergence_trace.csv");
    Ok(())
}
