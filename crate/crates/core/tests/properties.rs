use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rack_repair::forge;
use rack_repair::gf::{span_dim_over, Fe, FieldTower};
use rack_repair::grs::{dual_multipliers, GrsCode};
use rack_repair::poly::{
    apply_linearized, interpolate, reduce_mod_vanishing, subspace_linearized_coeffs, vanishing_poly, Poly,
    SubspaceChoice,
};
use rack_repair::rack::{build_download_plan, execute_repair, RepairScheme};

fn field(choice: u8) -> FieldTower {
    match choice % 4 {
        0 => FieldTower::new(2, 4, None),
        1 => FieldTower::new(2, 6, None),
        2 => FieldTower::new(3, 4, None),
        _ => FieldTower::new(5, 2, None),
    }
    .unwrap()
}

fn elem(r: &mut ChaCha8Rng, tw: &FieldTower) -> Fe {
    Fe(r.gen_range(0..tw.order()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn traces_round_trip(choice in 0u8..4, seed in any::<u64>()) {
        let tw = field(choice);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let sub = tw.prime_subfield();
        let basis = tw.default_basis(sub);
        for _ in 0..20 {
            let x = elem(&mut r, &tw);
            prop_assert_eq!(tw.element_from_traces(&tw.traces_of(x, &basis), &basis).unwrap(), x);
        }
        // the dual of the dual is the original basis
        let back = tw.dual_basis(sub, basis.theta()).unwrap();
        prop_assert_eq!(back.theta(), basis.eta());
    }

    #[test]
    fn reduction_preserves_evaluations(choice in 0u8..4, seed in any::<u64>(), len in 1usize..40) {
        let tw = field(choice);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut pts: Vec<Fe> = tw.elements().collect();
        let keep = r.gen_range(1..=pts.len().min(30));
        for i in 0..keep {
            let j = r.gen_range(i..pts.len());
            pts.swap(i, j);
        }
        pts.truncate(keep);
        let z = vanishing_poly(&pts, &tw).unwrap();
        let f = Poly::new((0..len).map(|_| elem(&mut r, &tw)).collect());
        let red = reduce_mod_vanishing(&f, &z, &tw).unwrap();
        for &x in &pts {
            prop_assert_eq!(red.eval(x, &tw), f.eval(x, &tw));
        }
        prop_assert!(red.degree().is_none_or(|d| d < pts.len()));
    }

    #[test]
    fn linearized_polynomials_are_additive(choice in 0u8..4, seed in any::<u64>(), dim in 1usize..3) {
        let tw = field(choice);
        let sub = tw.prime_subfield();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let basis: Vec<Fe> = loop {
            let b: Vec<Fe> = (0..dim).map(|_| elem(&mut r, &tw)).collect();
            if span_dim_over(&tw, &b.iter().map(|&x| vec![x]).collect::<Vec<_>>(), sub).unwrap().dim == dim {
                break b;
            }
        };
        let v = SubspaceChoice::new(sub, basis);
        let lin = subspace_linearized_coeffs(&v, &tw).unwrap();
        for &b in &v.elements(&tw) {
            prop_assert!(apply_linearized(&lin, b, sub.degree(), &tw).is_zero());
        }
        let (x, y) = (elem(&mut r, &tw), elem(&mut r, &tw));
        let lx = apply_linearized(&lin, x, sub.degree(), &tw);
        let ly = apply_linearized(&lin, y, sub.degree(), &tw);
        prop_assert_eq!(apply_linearized(&lin, tw.add(x, y), sub.degree(), &tw), tw.add(lx, ly));
        let lam = tw.from_int(r.gen_range(0..tw.characteristic() as i64));
        prop_assert_eq!(apply_linearized(&lin, tw.mul(lam, x), sub.degree(), &tw), tw.mul(lam, lx));
    }

    #[test]
    fn span_dimension_is_scale_invariant(choice in 0u8..4, seed in any::<u64>()) {
        let tw = field(choice);
        let sub = tw.prime_subfield();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let vectors: Vec<Vec<Fe>> = (0..4).map(|_| (0..3).map(|_| elem(&mut r, &tw)).collect()).collect();
        let c = Fe(r.gen_range(1..tw.order()));
        let scaled: Vec<Vec<Fe>> = vectors.iter().map(|v| v.iter().map(|&x| tw.mul(c, x)).collect()).collect();
        prop_assert_eq!(
            span_dim_over(&tw, &vectors, sub).unwrap().dim,
            span_dim_over(&tw, &scaled, sub).unwrap().dim
        );
    }

    #[test]
    fn grs_duality(choice in 0u8..4, seed in any::<u64>(), n in 3usize..9) {
        let tw = field(choice);
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Fe> = tw.elements().take(n).collect();
        let u = dual_multipliers(&pts, &tw).unwrap();
        let k = r.gen_range(1..n);
        let f = Poly::new((0..k).map(|_| elem(&mut r, &tw)).collect());
        let g = Poly::new((0..n - k).map(|_| elem(&mut r, &tw)).collect());
        let s = tw.sum(pts.iter().zip(&u).map(|(&a, &ui)| tw.mul(ui, tw.mul(f.eval(a, &tw), g.eval(a, &tw)))));
        prop_assert!(s.is_zero());
        let vals: Vec<Fe> = pts.iter().map(|&a| f.eval(a, &tw)).collect();
        prop_assert_eq!(interpolate(&pts, &vals, &tw).unwrap(), f);
    }

    #[test]
    fn normalization_is_sound(seed in any::<u64>(), failed in 0usize..16) {
        // scaling every h_a by c and the basis eta by c leaves the repair unchanged
        let tower = Arc::new(FieldTower::new(2, 4, None).unwrap());
        let tw = &*tower;
        let s = forge::gw_scheme(tower.clone(), 1, 8, failed).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let c = Fe(r.gen_range(1..tw.order()));
        let eta: Vec<Fe> = s.basis().eta().iter().map(|&e| tw.mul(c, e)).collect();
        let basis = tw.dual_basis(s.base(), &eta).unwrap();
        let hs: Vec<Poly> = s.h_polys().iter().map(|h| h.scale(c, tw)).collect();
        let scaled = RepairScheme::new(tower.clone(), s.layout().clone(), 8, s.host(), s.d(), basis, hs).unwrap();
        let code = GrsCode::reed_solomon(tower.clone(), s.layout().points(), 8).unwrap();
        let f = Poly::new((0..8).map(|_| elem(&mut r, tw)).collect());
        let word = code.encode(&f).unwrap().with_erasures([failed]);
        let helpers: Vec<usize> = (0..16).filter(|&i| i != failed).collect();
        let a = execute_repair(&build_download_plan(&s, &helpers).unwrap(), &code, &word).unwrap();
        let b = execute_repair(&build_download_plan(&scaled, &helpers).unwrap(), &code, &word).unwrap();
        prop_assert_eq!(a.recovered, b.recovered);
        prop_assert_eq!(a.recovered, word.symbols[failed]);
    }
}
