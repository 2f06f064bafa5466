use lieqs::maslov::MaslovLimitConfig;
use lieqs::quasistates::{maslov_qs, MaslovMethod};
use lieqs::symplectic::{seeded_rng, CompatibleComplexStructure, SymplecticSpace};
use lieqs::verify::{embed_gl, fit_gleason_on_unitary, fit_rank_one_trace, unitary_trace_oracle, ElementOracle};
use lieqs::Result;

fn main() -> Result<()> {
    let s = SymplecticSpace::new(3)?;
    let zm = maslov_qs(s, MaslovLimitConfig::default(), MaslovMethod::Spectral)?;
    let mut rng = seeded_rng(5, 0);

    let j = CompatibleComplexStructure::standard(s);
    let oracle: &ElementOracle = &unitary_trace_oracle;
    let g = fit_gleason_on_unitary(&zm, &j, 1e-2, Some((oracle, 1e-6)), &mut rng)?;
    println!("{}", g.summary_line());
    if let Some(h) = g.matrix("H") {
        println!("  fitted H:{h:.4}");
    }

    let emb = embed_gl(s, &mut rng)?;
    println!("gl(3) embedding bracket defect {:.2e}", emb.bracket_defect(20, &mut rng)?);
    let r = fit_rank_one_trace(&zm, &emb, 1e-2, &mut rng)?;
    println!("{}", r.summary_line());
    Ok(())
}
