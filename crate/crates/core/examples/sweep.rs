//! Evaluate a small parameter grid and print it as CSV.

use rack_repair::cli::{cmd_sweep, SweepGrid};
use rack_repair::forge::Family;
use rack_repair::report::sweep_csv;

fn main() -> rack_repair::Result<()> {
    let grid = SweepGrid {
        family: vec![Family::Additive],
        p0: vec![2],
        base_degree: vec![1],
        t: vec![4, 6, 8],
        ell: vec![2, 3, 4, 6],
        trials: 10,
        seed: Some(5),
        ..SweepGrid::default()
    };
    let rows = cmd_sweep(&grid)?;
    print!("{}", sweep_csv(&rows)?);
    Ok(())
}
