//! Greedy mixed-L plans: one slot at 30x19, five slots at 8x5.

use ia3::prelude::*;

fn run(m: usize, n: usize, t_max: usize, seed: u64) -> Result<()> {
    let tol = Tolerance::default();
    let plan = greedy_plan(m, n, t_max)?;
    println!("M={m} N={n}: t={} instances {:?}", plan.t, plan.instances);
    println!(
        "  {} per user per slot, {} total",
        plan.per_user_per_slot(),
        plan.per_slot_dof_total
    );

    let ch = ChannelSet::generate(m, n, seed, FieldMode::Complex)?.extend(plan.t)?;
    let v = synth_mixed(&ch, &plan, &tol)?;
    let cert = certify(&ch, &v, &tol)?;
    println!(
        "  certificate pass={} max leakage {:.1e}",
        cert.pass, cert.max_leakage
    );
    Ok(())
}

fn main() -> Result<()> {
    run(30, 19, 1, 1)?;
    run(8, 5, 24, 1)
}
