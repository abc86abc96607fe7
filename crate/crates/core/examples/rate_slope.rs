//! Sum rate against SNR; the high-SNR slope tracks the certified DoF.

use ia3::prelude::*;

fn main() -> Result<()> {
    let tol = Tolerance::default();
    let grid: Vec<f64> = (0..=12).map(|k| 5.0 * k as f64).collect();

    let ch = ChannelSet::generate(5, 3, 2, FieldMode::Complex)?;
    let chain = solve_chain(&ch, 1, 1, &tol)?;
    let zf_ch = ChannelSet::generate(9, 3, 2, FieldMode::Complex)?;
    let zf = synth_zero_forcing(&zf_ch, &tol)?;

    for (name, ch, v) in [
        ("5x3 chain", &ch, &chain),
        ("9x3 zero forcing", &zf_ch, &zf),
    ] {
        let u = build_decoders(ch, v, &tol)?;
        let curve = estimate_dof_slope(ch, v, &u, &NoiseModel::default(), &grid, 20.0, &tol)?;
        println!(
            "{name}: slope {:.3}, certified {}",
            curve.fitted_slope,
            certify(ch, v, &tol)?.per_slot_dof
        );
        for (db, r) in curve.snr_db.iter().zip(&curve.sum_rates).step_by(3) {
            println!("  {db:>4} dB  {r:8.3} bits");
        }
    }
    Ok(())
}
