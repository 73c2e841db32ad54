//! Repair over F_{2^{2s}} when the evaluation set is a subfield plus a coset.

use rack_repair::forge::two_coset_scheme;
use rack_repair::rack::worst_case_bandwidth;

fn main() -> rack_repair::Result<()> {
    let (s, n, k) = (2, 6, 4);
    for failed in 0..n {
        let scheme = two_coset_scheme(s, n, k, failed)?;
        let prof = worst_case_bandwidth(&scheme);
        let per: Vec<String> = prof.per_rack.iter().map(|b| b.map_or("-".into(), |b| b.to_string())).collect();
        println!("node {failed}: per helper [{}] total {} symbols of F_4", per.join(" "), prof.symbols);
    }
    Ok(())
}
