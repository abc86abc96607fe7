//! M < N: design on the reciprocal channel, then swap roles back.

use ia3::alignment::reverse_link;
use ia3::prelude::*;

fn main() -> Result<()> {
    let tol = Tolerance::default();
    let forward = ChannelSet::generate(3, 5, 4, FieldMode::Complex)?;
    let rev = forward.reciprocal();
    println!(
        "forward {}x{} -> reverse {}x{}",
        forward.m(),
        forward.n(),
        rev.m(),
        rev.n()
    );

    let v_rev = solve_chain(&rev, 1, 1, &tol)?;
    let u_rev = build_decoders(&rev, &v_rev, &tol)?;
    let (v, _) = reverse_link(&v_rev, &u_rev, &tol);
    print!("{}", certify(&forward, &v, &tol)?.to_table());
    Ok(())
}
