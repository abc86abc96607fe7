//! Exact DoF bounds and the achievable value for a row of antenna counts.
//!
//! cargo run --example bounds_table -- 5

use ia3::prelude::*;

fn main() -> Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map_or(Ok(5), |s| s.parse())
        .unwrap_or(5);
    println!(
        "{:>3} {:>8} {:>8} {:>8} {:>8}  scheme",
        "M", "achv", "general", "beamf", "baseline"
    );
    for m in 1..=3 * n + 1 {
        let r = achievable(m, n, 24)?;
        let scheme = match &r.plan {
            None => "reference".to_string(),
            Some(p) => format!(
                "{:?} t={}{}",
                p.regime,
                p.t,
                if p.reciprocal { " (reverse link)" } else { "" }
            ),
        };
        println!(
            "{m:>3} {:>8} {:>8} {:>8} {:>8}  {scheme}",
            r.achievable.to_string(),
            r.general_ub.to_string(),
            r.beamforming_ub.to_string(),
            r.baseline.to_string()
        );
    }
    Ok(())
}
