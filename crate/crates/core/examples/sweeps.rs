//! Plot data for the normalized chain curves and the fixed-N table, as CSV on stdout.

use ia3::dofcalc::{fig1_ratio_grid, write_fig1_csv, write_fig2_csv};
use ia3::prelude::*;

fn main() -> Result<()> {
    let depths = [1, 2, 3, 4];
    let rows = sweep_fig1(&depths, &fig1_ratio_grid(&depths, 10))?;
    write_fig1_csv(std::io::stdout(), &rows)?;
    println!();
    write_fig2_csv(std::io::stdout(), &sweep_fig2(5, 1, 16, 24)?)?;
    Ok(())
}
