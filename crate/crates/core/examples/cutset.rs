//! The rack-aware cut-set bound for a few parameter sets.

use rack_repair::rack::{cutset_bound, CutSetQuery};

fn main() -> rack_repair::Result<()> {
    let cases = [
        CutSetQuery { n: 64, k: 32, r: 4, d: 3, q: 64, base_order: 2 },
        CutSetQuery { n: 16, k: 8, r: 16, d: 15, q: 16, base_order: 2 },
        CutSetQuery { n: 729, k: 486, r: 2, d: 1, q: 729, base_order: 3 },
        CutSetQuery { n: 81, k: 27, r: 9, d: 6, q: 81, base_order: 9 },
    ];
    for qy in cases {
        let b = cutset_bound(&qy)?;
        println!(
            "n={:<4} k={:<4} r={:<3} d={:<3} -> m={} t={} bound={} symbols, {} bits ({:.6})",
            qy.n, qy.k, qy.r, qy.d, b.m, b.t, b.symbols, b.bits.exact(), b.bits.approx()
        );
    }
    Ok(())
}
