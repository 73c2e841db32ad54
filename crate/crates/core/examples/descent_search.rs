//! What the subspace search reports when no subspace meets the degree bound,
//! and how an explicit subspace is checked.

use rack_repair::forge::{build_family_scheme, gaussian_binomial, Family, FamilyParams, SubspacePolicy};
use rack_repair::{Error, Fe};

fn main() -> rack_repair::Result<()> {
    let params = FamilyParams::new(Family::Multiplicative, 2, 1, 6, 36).ell(4).a(3);
    println!("{} candidate subspaces of dimension 4 in F_2^6", gaussian_binomial(6, 4, 2));

    match build_family_scheme(&params, &SubspacePolicy::Auto, 42) {
        Ok(built) => println!("found scheme with degrees {:?}", built.scheme.h_degrees()),
        Err(Error::NoAdmissibleSubspace { best_degree, bound, tried }) => {
            println!("no admissible subspace: best degree {best_degree:?}, bound {bound}, tried {tried}")
        }
        Err(e) => return Err(e),
    }

    let explicit = SubspacePolicy::Explicit(vec![Fe(1), Fe(2), Fe(4), Fe(8)]);
    match build_family_scheme(&params, &explicit, 42) {
        Ok(built) => println!("explicit subspace accepted: {:?}", built.scheme.h_degrees()),
        Err(e) => println!("explicit subspace rejected: {e}"),
    }

    let bad = FamilyParams::new(Family::Multiplicative, 2, 1, 6, 36).ell(2).a(3);
    if let Err(Error::Hypotheses(v)) = build_family_scheme(&bad, &SubspacePolicy::Auto, 42) {
        for line in v {
            println!("violated: {line}");
        }
    }
    Ok(())
}
