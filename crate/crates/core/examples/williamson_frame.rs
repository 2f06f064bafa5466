//! Williamson normal form of a random semisimple element, followed by its
//! splitting into pairwise commuting Y/Z terms.

use lieqs::maslov::{maslov_on_descriptor, maslov_spectral};
use lieqs::symplectic::{seeded_rng, SymplecticSpace};
use lieqs::williamson::{random_semisimple, realize_terms, williamson_decompose, yz_decomposition};
use lieqs::Result;

fn main() -> Result<()> {
    let s = SymplecticSpace::new(3)?;
    let b = random_semisimple(s, &mut seeded_rng(3, 0))?.element;
    let dec = williamson_decompose(&b)?;
    println!("blocks:");
    for blk in &dec.blocks {
        println!("  {:<10} {:?} planes {:?}", blk.btype.name(), blk.btype, blk.plane_indices);
    }
    println!("reconstruction residual {:.2e}", dec.reconstruction_residual);
    println!("symplectic defect       {:.2e}", dec.symplectic_defect);
    println!("frame condition         {:.2e}", dec.frame_condition);

    let terms = yz_decomposition(&dec);
    let mut sum = 0.0;
    for t in &terms {
        let v = maslov_on_descriptor(&t.descriptor)?;
        sum += t.coefficient * v;
        println!("  {:+.4} * {:?} (block {}) -> {:+.4}", t.coefficient, t.descriptor.kind, t.block, v);
    }
    let rebuilt = realize_terms(s, &terms)?;
    println!("terms rebuild B to {:.2e}", (rebuilt - b.matrix()).norm());
    println!("sum over terms {sum:+.6}, spectral value {:+.6}", maslov_spectral(&b)?.value);
    Ok(())
}
