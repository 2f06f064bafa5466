//! The discontinuous quasi-states `ζ = c·a₁` on the span of odd powers of a
//! nilpotent Jordan element, extended by zero elsewhere.

use lieqs::quasistates::{discontinuous_qs, nilpotent_jordan_sp, LieQuasiState};
use lieqs::symplectic::{eval_odd_poly, random_sp_element, seeded_rng, SymplecticSpace};
use lieqs::Result;

fn main() -> Result<()> {
    let mut rng = seeded_rng(9, 0);
    for n in 1..=3 {
        let s = SymplecticSpace::new(n)?;
        let a = nilpotent_jordan_sp(s)?;
        let zeta = discontinuous_qs(a.clone(), 1.5)?;
        println!("n = {n}: bound c' = {:.4}", zeta.bound());
        let coeffs: Vec<f64> = (0..n).map(|k| 0.5 - k as f64).collect();
        let inside = eval_odd_poly(&a, &coeffs);
        let m = zeta.membership(&inside);
        println!("  p(A) with a = {coeffs:?}: in L = {}, coefficients {:?}, ζ = {:+.4}", m.in_l, m.coefficients.as_slice(), zeta.evaluate(&inside)?.value);
        let outside = random_sp_element(s, 1.0, &mut rng);
        let m = zeta.membership(&outside);
        println!("  random element: residual {:.2e}, in L = {}, ζ = {:+.4}", m.relative_residual, m.in_l, zeta.evaluate(&outside)?.value);
    }
    Ok(())
}
