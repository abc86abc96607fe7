//! M/N >= 2: zero forcing at 9x3 and nullspace intersection at 5x2 over three slots.

use ia3::prelude::*;

fn main() -> Result<()> {
    let tol = Tolerance::default();

    let ch = ChannelSet::generate(9, 3, 1, FieldMode::Complex)?;
    let v = synth_zero_forcing(&ch, &tol)?;
    println!("zero forcing 9x3: {}", certify(&ch, &v, &tol)?.per_slot_dof);

    let ch = ChannelSet::generate(5, 2, 1, FieldMode::Complex)?.extend(3)?;
    let (v, u) = synth_nullspace_intersection(&ch, 5, 11, &tol)?;
    let leak = leakage(&ch, &v, &u)?;
    let cert = certify(&ch, &v, &tol)?;
    println!(
        "nullspace intersection 5x2, t=3: {} DoF per slot, pass={}, leakage into receiver 0 {:.1e}",
        cert.per_slot_dof, cert.pass, leak[0][1]
    );
    Ok(())
}
