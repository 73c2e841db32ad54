//! Trace repair of a full-length Reed-Solomon code over F_16: every helper
//! sends one bit instead of a whole symbol.

use std::sync::Arc;

use rack_repair::forge::gw_scheme;
use rack_repair::rack::{repair_standard, worst_case_bandwidth};
use rack_repair::{Fe, FieldTower, GrsCode, Poly};

fn main() -> rack_repair::Result<()> {
    let tower = Arc::new(FieldTower::new(2, 4, None)?);
    let failed = 5;
    let scheme = gw_scheme(tower.clone(), 1, 8, failed)?;
    println!("h degrees {:?}, bound {}", scheme.h_degrees(), scheme.degree_bound());
    println!("validation passed: {}", scheme.validate().passed());

    let code = GrsCode::reed_solomon(tower.clone(), scheme.layout().points(), 8)?;
    let message = Poly::new((0..8).map(|i| Fe(i * 3 % 16)).collect());
    let word = code.encode(&message)?;
    let helpers: Vec<usize> = (0..16).filter(|&i| i != failed).collect();
    let tr = repair_standard(&scheme, &helpers, &code, &word.clone().with_erasures([failed]))?;

    println!("recovered {} (stored {})", tr.recovered.index(), word.symbols[failed].index());
    println!("downloaded {} bits, naive repair needs {}", tr.cross_rack_symbols, 8 * 4);
    println!("worst case {} symbols over F_2", worst_case_bandwidth(&scheme).symbols);
    Ok(())
}
