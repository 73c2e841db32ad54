//! Field arithmetic, traces and dual bases in a small tower.

use rack_repair::{Fe, FieldTower};

fn main() -> rack_repair::Result<()> {
    let tw = FieldTower::new(2, 6, None)?;
    println!("field {}", tw.descriptor());
    let g = tw.primitive();
    println!("primitive element {} has order {}", tw.format_element(g), (1..).find(|&e| tw.pow(g, e) == Fe::ONE).unwrap());

    for s in [1, 2, 3] {
        let sub = tw.subfield(s)?;
        let x = tw.pow(g, 5);
        println!("Tr to F_{}: {} -> {}", sub.order(), tw.format_element(x), tw.format_element(tw.trace_to(x, sub)));
    }

    let sub = tw.prime_subfield();
    let basis = tw.default_basis(sub);
    let x = tw.pow(g, 17);
    let traces = tw.traces_of(x, &basis);
    let back = tw.element_from_traces(&traces, &basis)?;
    let shown: Vec<String> = traces.iter().map(|&c| tw.format_element(c)).collect();
    println!("x = {}  traces = [{}]  rebuilt = {}", tw.format_element(x), shown.join(" "), tw.format_element(back));
    assert_eq!(back, x);
    Ok(())
}
