//! Save a scheme as JSON, load it back, and repair a codeword read from the
//! text format.

use rack_repair::forge::{build_family_scheme, Family, FamilyParams, SubspacePolicy};
use rack_repair::io::{format_codeword, parse_codeword, SchemeFile};
use rack_repair::rack::{build_download_plan, execute_repair};
use rack_repair::{Fe, GrsCode, Poly};

fn main() -> rack_repair::Result<()> {
    let params = FamilyParams::new(Family::Additive, 2, 1, 6, 32).ell(3).host(2, 5);
    let built = build_family_scheme(&params, &SubspacePolicy::Auto, 42)?;
    let basis = built.subspace.as_ref().map(|v| v.basis.clone());
    let file = SchemeFile::from_scheme(&built.scheme, Some(params), basis);
    let json = file.to_json()?;
    println!("scheme file is {} bytes", json.len());

    let scheme = SchemeFile::from_json(&json)?.to_scheme()?;
    let tw = scheme.tower();
    let code = GrsCode::reed_solomon(tw.clone(), scheme.layout().points(), scheme.k())?;
    let word = code.encode(&Poly::new((0..32).map(|i| Fe(i * 11 % 64)).collect()))?;
    let host = scheme.layout().position(2, 5);
    let text = format_codeword(tw, &word.clone().with_erasures([host]));
    println!("{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));

    let (_, damaged) = parse_codeword(&text)?;
    let plan = build_download_plan(&scheme, &[0, 1, 3])?;
    let tr = execute_repair(&plan, &code, &damaged)?;
    println!("recovered {} with {} cross-rack symbols", tw.format_element(tr.recovered), tr.cross_rack_symbols);
    assert_eq!(tr.recovered, word.symbols[host]);
    Ok(())
}
