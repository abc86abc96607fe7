//! The stacked-nullspace and pseudo-inverse constructions agree block by block.

use ia3::prelude::*;

fn main() -> Result<()> {
    let tol = Tolerance::default();
    for (m, n, l) in [(5, 3, 1), (8, 5, 1), (7, 5, 2)] {
        let ch = ChannelSet::generate(m, n, 3, FieldMode::Complex)?;
        let a = solve_chain(&ch, l, 1, &tol)?;
        let b = solve_chain_xi(&ch, l, 1, &tol)?;
        let xi = ia3::alignment::xi_tilde(&ch, l, 0, &tol)?;
        let mut worst: f64 = 0.0;
        for (g, blocks) in chain_block_schedule(l).groups.iter().enumerate() {
            for slot in blocks {
                let pa = a.block(0, g, slot.block_index).expect("block");
                let pb = b.block(0, g, slot.block_index).expect("block");
                worst = worst.max(max_principal_angle(&pa, &pb, &tol)?);
            }
        }
        println!(
            "({m},{n}) L={l}: Xi is {}x{}, null dim {}, max angle {worst:.1e}",
            xi.nrows(),
            xi.ncols(),
            nullspace_basis(&xi, &tol)?.ncols()
        );
    }
    Ok(())
}
