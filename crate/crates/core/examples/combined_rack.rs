//! The combined construction over F_729: racks are unions of additive cosets
//! picked out by a multiplicative character.

use rack_repair::forge::{build_family_scheme, Family, FamilyParams, SubspacePolicy};
use rack_repair::rack::worst_case_bandwidth;
use rack_repair::report::scheme_cutset;
use rack_repair::runner::{run_trials, HelperPolicy};

fn main() -> rack_repair::Result<()> {
    let params = FamilyParams::new(Family::Combined, 3, 1, 6, 1).ell(3).a(1).v(1);
    let built = build_family_scheme(&params, &SubspacePolicy::Auto, 42)?;
    let d = &built.derived;
    println!("q = {}, r = {}, u = {}, m = {}, d = {}", d.q, d.r, d.u, d.m, d.d);
    println!("subspace basis {:?} via {:?}", built.subspace.as_ref().map(|v| v.basis.iter().map(|x| x.index()).collect::<Vec<_>>()), built.strategy);

    let prof = worst_case_bandwidth(&built.scheme);
    println!("worst case {} symbols of F_3, bound {}", prof.symbols, scheme_cutset(&built.scheme)?.symbols);
    let s = run_trials(&built.scheme, 20, 1, HelperPolicy::All)?;
    println!("{} trials, {} failures", s.trials, s.failures);
    Ok(())
}
