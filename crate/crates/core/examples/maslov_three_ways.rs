//! Evaluates the Maslov quasi-state on a few elements of sp(2, ℝ) and sp(4, ℝ)
//! by the closed form (n = 1), the spectral formula and the long-time limit.
//!
//! Run with `cargo run --release --example maslov_three_ways`.

use lieqs::maslov::{maslov_dim2, maslov_limit, maslov_spectral, MaslovLimitConfig};
use lieqs::symplectic::{seeded_rng, SpElement, SymplecticSpace};
use lieqs::williamson::random_semisimple;
use lieqs::{DMatrix, Result};

fn main() -> Result<()> {
    let cfg = MaslovLimitConfig::default();
    println!("{:>24} {:>12} {:>12} {:>12} {:>10}", "element", "closed", "spectral", "limit", "limit_err");
    for (name, a, b, c) in [("rotation", 0.0, -1.0, 1.0), ("hyperbolic", 1.0, 0.3, 0.2), ("elliptic", 0.4, -2.0, 0.7), ("negative elliptic", -0.1, 1.5, -0.8)] {
        let m = SpElement::new(DMatrix::from_row_slice(2, 2, &[a, b, c, -a]))?;
        let spec = maslov_spectral(&m)?;
        let lim = maslov_limit(&m, &cfg)?;
        println!("{name:>24} {:>12.6} {:>12.6} {:>12.6} {:>10.1e}", maslov_dim2(a, b, c), spec.value, lim.value, lim.error_bar);
    }
    let s = SymplecticSpace::new(2)?;
    let mut rng = seeded_rng(7, 0);
    for k in 0..3 {
        let b = random_semisimple(s, &mut rng)?.element;
        let spec = maslov_spectral(&b)?;
        let lim = maslov_limit(&b, &cfg)?;
        println!("{:>24} {:>12} {:>12.6} {:>12.6} {:>10.1e}", format!("random sp(4) #{k}"), "-", spec.value, lim.value, lim.error_bar);
    }
    Ok(())
}
