//! Rack-aware repair over F_64 with racks given by the trace to F_4.
//!
//! The degree-descent search picks a 3-dimensional subspace, the resulting
//! scheme downloads 3 bits from each of the 3 helper racks, and 9 bits is
//! exactly the rack-aware cut-set bound.

use rack_repair::forge::{build_family_scheme, Family, FamilyParams, SubspacePolicy};
use rack_repair::rack::worst_case_bandwidth;
use rack_repair::report::scheme_cutset;
use rack_repair::runner::{run_trials, HelperPolicy};

fn main() -> rack_repair::Result<()> {
    let params = FamilyParams::new(Family::Additive, 2, 1, 6, 32).ell(3);
    let built = build_family_scheme(&params, &SubspacePolicy::Auto, 42)?;
    let d = &built.derived;
    println!("q = {}, n = {}, r = {} racks of u = {}, k = {}, d = {}", d.q, d.n, d.r, d.u, params.k, d.d);
    println!("strategy {:?} after {} candidates", built.strategy, built.tried);

    let scheme = &built.scheme;
    println!("h degrees {:?} (bound {})", scheme.h_degrees(), scheme.degree_bound());
    let prof = worst_case_bandwidth(scheme);
    let bound = scheme_cutset(scheme)?;
    println!("per rack {:?}", prof.per_rack);
    println!("worst case {} bits, cut-set bound {} bits", prof.symbols, bound.symbols);

    let summary = run_trials(scheme, 200, 7, HelperPolicy::All)?;
    println!("{} trials, {} failures, max download {}", summary.trials, summary.failures, summary.max_symbols);
    Ok(())
}
