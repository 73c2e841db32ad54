//! Encode with a generalized Reed-Solomon code, check the dual relation and
//! recover from erasures by interpolation.

use std::sync::Arc;

use rack_repair::grs::dual_multipliers;
use rack_repair::{Fe, FieldTower, GrsCode, Poly};

fn main() -> rack_repair::Result<()> {
    let tower = Arc::new(FieldTower::new(3, 2, None)?);
    let tw = &*tower;
    let points: Vec<Fe> = tw.elements().take(8).collect();
    let mults: Vec<Fe> = (1..=8).map(|i| tw.pow(tw.primitive(), i)).collect();
    let code = GrsCode::new(tower.clone(), points.clone(), mults, 3)?;

    let message = Poly::new(vec![Fe(1), Fe(5), Fe(7)]);
    let word = code.encode(&message)?;
    println!("codeword over {}: {:?}", tw.descriptor(), word.symbols.iter().map(|x| x.index()).collect::<Vec<_>>());
    println!("is codeword: {}", code.is_codeword(&word));

    let u = dual_multipliers(&points, tw)?;
    println!("dual column multipliers: {:?}", u.iter().map(|x| x.index()).collect::<Vec<_>>());

    let damaged = word.clone().with_erasures([0, 4, 6]);
    let survivors = [1, 2, 3, 5, 7];
    let fixed = code.naive_recover(&damaged, &survivors)?;
    println!("recovered erased symbols: {} {} {}", fixed.symbols[0].index(), fixed.symbols[4].index(), fixed.symbols[6].index());
    assert_eq!(fixed.symbols, word.symbols);
    Ok(())
}
