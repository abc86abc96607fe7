//! Depth-1 chain on a 5x3 channel: precoders, decoders and the certificate.

use ia3::prelude::*;

fn main() -> Result<()> {
    let tol = Tolerance::default();
    let ch = ChannelSet::generate(5, 3, 7, FieldMode::Complex)?;

    let sched = chain_block_schedule(1);
    for (g, blocks) in sched.groups.iter().enumerate() {
        println!(
            "group {g}: {blocks:?} constrained at receivers {:?}",
            sched.constraint_receivers[g]
        );
    }

    let v = solve_chain(&ch, 1, 1, &tol)?;
    let u = build_decoders(&ch, &v, &tol)?;
    let leak = leakage(&ch, &v, &u)?;
    for (i, row) in leak.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.1e}")).collect();
        println!("receiver {i} leakage [{}]", cells.join(", "));
    }
    print!("{}", certify(&ch, &v, &tol)?.to_table());
    Ok(())
}
