//! Constructors for concrete repair schemes.
//!
//! Standard-model schemes (`u = 1`): the full-length trace scheme over all of
//! `F_q` and the two-coset scheme over `F_{2^{2s}}`. Rack-aware schemes come
//! from a good polynomial `g` (zero on the host rack, a nonzero constant on
//! every other rack) and a subspace `V`:
//! `h_a = L_V(g eta_a) / g mod Z_E`, normalized so that `h_a(host) = eta_a`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldTower, Subfield, MAX_ORDER};
use crate::linalg;
use crate::poly::{
    linearized_to_dense, subspace_linearized_coeffs, vanishing_poly, Poly, SubspaceChoice,
};
use crate::rack::{Host, RackLayout, RepairScheme};

/// Exhaustive subspace enumeration is used up to this many candidates.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000;
/// Number of seeded random subspaces tried beyond the exhaustive limit.
pub const RANDOM_SAMPLES: usize = 4096;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Additive,
    Multiplicative,
    Combined,
    Gw,
    TwoCoset,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Additive => "additive",
            Family::Multiplicative => "multiplicative",
            Family::Combined => "combined",
            Family::Gw => "gw",
            Family::TwoCoset => "two-coset",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "additive" => Ok(Family::Additive),
            "multiplicative" => Ok(Family::Multiplicative),
            "combined" => Ok(Family::Combined),
            "gw" => Ok(Family::Gw),
            "two-coset" => Ok(Family::TwoCoset),
            other => Err(Error::Parse(format!("unknown family {other:?}"))),
        }
    }

    pub fn is_rack_aware(self) -> bool {
        matches!(self, Family::Additive | Family::Multiplicative | Family::Combined)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub family: Family,
    pub p0: u32,
    /// `F_p = F_{p0^s_base}`.
    pub s_base: u32,
    /// `[F_q : F_p]`.
    pub t: u32,
    pub k: usize,
    pub ell: Option<u32>,
    pub a: Option<u32>,
    pub v: Option<u32>,
    /// Code length, two-coset family only.
    pub n: Option<usize>,
    pub host: Host,
}

impl FamilyParams {
    pub fn new(family: Family, p0: u32, s_base: u32, t: u32, k: usize) -> Self {
        FamilyParams { family, p0, s_base, t, k, ell: None, a: None, v: None, n: None, host: Host::new(0, 0) }
    }

    pub fn ell(mut self, ell: u32) -> Self {
        self.ell = Some(ell);
        self
    }

    pub fn a(mut self, a: u32) -> Self {
        self.a = Some(a);
        self
    }

    pub fn v(mut self, v: u32) -> Self {
        self.v = Some(v);
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn host(mut self, rack: usize, node: usize) -> Self {
        self.host = Host::new(rack, node);
        self
    }
}

/// Quantities implied by valid family parameters.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derived {
    pub p: u64,
    pub q: u64,
    pub n: u64,
    pub r: u64,
    pub u: u64,
    pub m: u64,
    pub d: u64,
}

fn checked_pow(base: u64, e: u32) -> Option<u64> {
    base.checked_pow(e)
}

/// Checks every hypothesis of the family's theorem, naming each violation.
pub fn validate_family_params(params: &FamilyParams) -> Result<Derived> {
    let mut bad: Vec<String> = Vec::new();
    if !crate::gf::is_prime(params.p0) {
        return Err(Error::Hypotheses(vec![format!("p0 = {} is not prime", params.p0)]));
    }
    if params.s_base == 0 || params.t == 0 {
        return Err(Error::Hypotheses(vec!["s_base and t must be positive".into()]));
    }
    let p = checked_pow(params.p0 as u64, params.s_base);
    let q = p.and_then(|p| checked_pow(p, params.t)).filter(|&q| q <= MAX_ORDER);
    let (Some(p), Some(q)) = (p, q) else {
        return Err(Error::Hypotheses(vec![format!("field order exceeds {MAX_ORDER}")]));
    };
    let t = params.t as u64;
    let k = params.k as u64;
    let host_ok = |bad: &mut Vec<String>, r: u64, u: u64| {
        if params.host.rack as u64 >= r || params.host.node as u64 >= u {
            bad.push(format!("host {} outside the {r} x {u} layout", params.host));
        }
    };
    let need = |bad: &mut Vec<String>, name: &str, v: Option<u32>| -> u64 {
        v.map(u64::from).unwrap_or_else(|| {
            bad.push(format!("{name} is required"));
            0
        })
    };
    if k == 0 {
        bad.push("k must be >= 1".into());
    }
    let derived = match params.family {
        Family::Additive => {
            let ell = need(&mut bad, "ell", params.ell);
            if !t.is_multiple_of(2) {
                bad.push(format!("t = {t} is not even"));
            }
            if t <= 2 {
                bad.push(format!("t = {t} must exceed 2"));
            }
            if ell == 0 || ell >= t {
                bad.push(format!("ell = {ell} must satisfy 0 < ell < t"));
            }
            let r = p * p;
            let u = q / r.max(1);
            let m = k.checked_div(u).unwrap_or(0);
            if k > q.saturating_sub(q / p) + u.saturating_sub(1) {
                bad.push(format!("k = {k} exceeds p^t - p^(t-1) + p^(t-2) - 1"));
            }
            if ell < t && ((r as i64 - m as i64) * (t - ell) as i64 != t as i64) {
                bad.push(format!("p^2 - m = {} != t/(t-ell)", r as i64 - m as i64));
            }
            host_ok(&mut bad, r, u);
            Derived { p, q, n: q, r, u, m, d: r.saturating_sub(1) }
        }
        Family::Multiplicative => {
            let ell = need(&mut bad, "ell", params.ell);
            let a = need(&mut bad, "a", params.a);
            if a == 0 || a >= t || !t.is_multiple_of(a) {
                bad.push(format!("a = {a} must be a proper divisor of t = {t}"));
            }
            if ell == 0 || ell >= t {
                bad.push(format!("ell = {ell} must satisfy 0 < ell < t"));
            }
            if a + ell <= t {
                bad.push(format!("a + ell = {} must exceed t", a + ell));
            }
            let pa = p.pow(a.min(t) as u32);
            let r = pa.saturating_sub(1).max(1);
            let n = q - 1;
            let u = n / r;
            let m = k * r / n;
            if ell < t && ((r as i64 - m as i64) * (t - ell) as i64 != t as i64) {
                bad.push(format!("p^a - 1 - m = {} != t/(t-ell)", r as i64 - m as i64));
            }
            // k <= (p^t - p^ell)(p^t - 1)/(p^t - p^(t-a)) - 1
            if a < t && ell < t {
                let num = (q - p.pow(ell as u32)) as u128 * (q - 1) as u128;
                let den = (q - p.pow((t - a) as u32)) as u128;
                if (k as u128 + 1) * den > num {
                    bad.push(format!("k = {k} exceeds (p^t-p^ell)(p^t-1)/(p^t-p^(t-a)) - 1"));
                }
            }
            host_ok(&mut bad, r, u);
            Derived { p, q, n, r, u, m, d: r.saturating_sub(1) }
        }
        Family::Combined => {
            let ell = need(&mut bad, "ell", params.ell);
            let a = need(&mut bad, "a", params.a);
            let v = need(&mut bad, "v", params.v);
            if a == 0 || a >= t || !t.is_multiple_of(a) {
                bad.push(format!("a = {a} must be a proper divisor of t = {t}"));
            }
            if a > 0 && t.is_multiple_of(a) && !(t / a).is_multiple_of(p) {
                bad.push(format!("p = {p} does not divide t/a = {}", t / a.max(1)));
            }
            if v == 0 || v >= p {
                bad.push(format!("v = {v} must satisfy 0 < v < p"));
            }
            let pa = p.pow(a.min(t) as u32);
            if v > 0 && pa % v != 1 % v {
                bad.push(format!("p^a mod v = {} != 1", pa % v));
            }
            if ell == 0 || ell >= t {
                bad.push(format!("ell = {ell} must satisfy 0 < ell < t"));
            }
            let w = q / pa.max(1);
            let n = q - w;
            let u = v.max(1) * w;
            if n % u != 0 {
                bad.push(format!("n = {n} is not a multiple of u = {u}"));
            }
            let r = n / u;
            let m = k / u;
            if k + 1 > q.saturating_sub(v * (q / p)) {
                bad.push(format!("k = {k} exceeds p^t - v p^(t-1) - 1"));
            }
            if ell < t && ((r as i64 - m as i64) * (t - ell) as i64 != t as i64) {
                bad.push(format!("r - m = {} != t/(t-ell)", r as i64 - m as i64));
            }
            host_ok(&mut bad, r, u);
            Derived { p, q, n, r, u, m, d: r.saturating_sub(1) }
        }
        Family::Gw => {
            if k * p > q * (p - 1) {
                bad.push(format!("k = {k} exceeds q(1 - 1/p)"));
            }
            host_ok(&mut bad, q, 1);
            Derived { p, q, n: q, r: q, u: 1, m: k, d: q - 1 }
        }
        Family::TwoCoset => {
            if params.p0 != 2 || params.t != 2 {
                bad.push("two-coset needs p0 = 2 and t = 2".into());
            }
            let n = params.n.map(|n| n as u64).unwrap_or_else(|| {
                bad.push("n is required".into());
                0
            });
            if !n.is_multiple_of(2) {
                bad.push(format!("n = {n} is not even"));
            }
            if n > 2 * (p - 1) {
                bad.push(format!("n = {n} exceeds 2(2^s - 1)"));
            }
            if k + 2 > n {
                bad.push(format!("k = {k} exceeds n - 2"));
            }
            host_ok(&mut bad, n, 1);
            Derived { p, q, n, r: n, u: 1, m: k, d: n.saturating_sub(1) }
        }
    };
    if bad.is_empty() {
        Ok(derived)
    } else {
        Err(Error::Hypotheses(bad))
    }
}

/// A degree-`u` polynomial vanishing on the host rack and constant, nonzero,
/// on every other rack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodPolynomial {
    pub g: Poly,
    pub host_rack: usize,
    /// `g(A_i)`; zero at the host rack.
    pub rack_constants: Vec<Fe>,
}

pub fn is_good_polynomial(g: &Poly, layout: &RackLayout, host_rack: usize, tw: &FieldTower) -> bool {
    if g.degree() != Some(layout.u()) || host_rack >= layout.r() {
        return false;
    }
    (0..layout.r()).all(|i| {
        let vals: Vec<Fe> = layout.rack(i).iter().map(|&x| g.eval(x, tw)).collect();
        let first = vals[0];
        let constant = vals.iter().all(|&v| v == first);
        if i == host_rack {
            constant && first.is_zero()
        } else {
            constant && !first.is_zero()
        }
    })
}

/// `sum_{i < ext} x^(p^i)` for the subfield `sub`.
fn trace_poly(sub: Subfield) -> Poly {
    linearized_to_dense(&vec![Fe::ONE; sub.ext_degree()], sub)
}

fn shift_to_host(g: Poly, layout: &RackLayout, host_rack: usize, tw: &FieldTower) -> Result<GoodPolynomial> {
    if host_rack >= layout.r() {
        return Err(Error::InvalidLayout(format!("host rack {host_rack} >= r = {}", layout.r())));
    }
    let beta = layout.point(host_rack, 0);
    let g = g.sub(&Poly::constant(g.eval(beta, tw)), tw);
    let rack_constants = (0..layout.r()).map(|i| g.eval(layout.point(i, 0), tw)).collect();
    let good = GoodPolynomial { g, host_rack, rack_constants };
    if !is_good_polynomial(&good.g, layout, host_rack, tw) {
        return Err(Error::InvalidScheme("constructed polynomial is not good".into()));
    }
    Ok(good)
}

// Groups `points` by the value of `key`, in order of first appearance.
fn group_by_value(points: &[Fe], key: impl Fn(Fe) -> Fe) -> Vec<Vec<Fe>> {
    let mut order: Vec<Fe> = Vec::new();
    let mut groups: Vec<Vec<Fe>> = Vec::new();
    for &x in points {
        let k = key(x);
        match order.iter().position(|&o| o == k) {
            Some(i) => groups[i].push(x),
            None => {
                order.push(k);
                groups.push(vec![x]);
            }
        }
    }
    groups
}

/// Racks are the cosets of `W = ker Tr_{F_q/F_{p^2}}`, `W` first, then in
/// order of first appearance along `0, g^0, g^1, ...`.
pub fn additive_good_poly(tw: &FieldTower, base: Subfield, host_rack: usize) -> Result<(GoodPolynomial, RackLayout)> {
    let sub2 = tw.subfield(2 * base.degree()).map_err(|_| {
        Error::Hypotheses(vec![format!("t = {} is not even", base.ext_degree())])
    })?;
    let points = tw.elements_in_power_order();
    let racks = group_by_value(&points, |x| tw.trace_to(x, sub2));
    let layout = RackLayout::new(racks)?;
    let good = shift_to_host(trace_poly(sub2), &layout, host_rack, tw)?;
    Ok((good, layout))
}

/// Racks are the cosets `g^i H` of the order-`u` subgroup, `i = 0..p^a - 2`.
pub fn multiplicative_good_poly(
    tw: &FieldTower,
    base: Subfield,
    a: u32,
    host_rack: usize,
) -> Result<(GoodPolynomial, RackLayout)> {
    let sub_a = tw.subfield(a * base.degree()).map_err(|_| {
        Error::Hypotheses(vec![format!("a = {a} does not divide t = {}", base.ext_degree())])
    })?;
    let n = (tw.order() - 1) as usize;
    let r = (sub_a.order() - 1) as usize;
    let u = n / r;
    let gamma = tw.primitive();
    let racks = (0..r)
        .map(|i| (0..u).map(|m| tw.pow(gamma, (i + r * m) as u64)).collect())
        .collect();
    let layout = RackLayout::new(racks)?;
    let good = shift_to_host(Poly::monomial(Fe::ONE, u), &layout, host_rack, tw)?;
    debug_assert!(good.rack_constants.iter().all(|&c| tw.contains(sub_a, c)));
    Ok((good, layout))
}

/// Evaluation set `F_q \ W` for `W = ker Tr_{F_q/F_{p^a}}`; racks are the
/// level sets of `G = Tr^v`.
pub fn combined_good_poly(
    tw: &FieldTower,
    base: Subfield,
    a: u32,
    v: u32,
    host_rack: usize,
) -> Result<(GoodPolynomial, RackLayout)> {
    let t = base.ext_degree() as u32;
    let p = base.order() as u64;
    let sub_a = tw.subfield(a * base.degree()).map_err(|_| {
        Error::Hypotheses(vec![format!("a = {a} does not divide t = {t}")])
    })?;
    let mut bad = Vec::new();
    if a >= t || !((t / a) as u64).is_multiple_of(p) {
        bad.push(format!("p = {p} must divide t/a"));
    }
    if v == 0 || v as u64 >= p || (sub_a.order() as u64) % v as u64 != 1 % v as u64 {
        bad.push(format!("v = {v} must satisfy v < p and p^a mod v = 1"));
    }
    if !bad.is_empty() {
        return Err(Error::Hypotheses(bad));
    }
    let points: Vec<Fe> = tw
        .elements_in_power_order()
        .into_iter()
        .filter(|&x| !tw.trace_to(x, sub_a).is_zero())
        .collect();
    let racks = group_by_value(&points, |x| tw.pow(tw.trace_to(x, sub_a), v as u64));
    let layout = RackLayout::new(racks)?;
    let tr = trace_poly(sub_a);
    let mut big_g = Poly::constant(Fe::ONE);
    for _ in 0..v {
        big_g = big_g.mul(&tr, tw);
    }
    let good = shift_to_host(big_g, &layout, host_rack, tw)?;
    Ok((good, layout))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspacePolicy {
    /// Subfield first when `ell | t`, then exhaustive or random search.
    Auto,
    Subfield,
    Search,
    Explicit(Vec<Fe>),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Subfield,
    Exhaustive,
    Random,
    Explicit,
}

#[derive(Clone, Debug)]
pub struct DescentScheme {
    pub scheme: RepairScheme,
    pub subspace: SubspaceChoice,
    pub strategy: Strategy,
    /// Candidates evaluated before acceptance.
    pub tried: usize,
}

/// Number of `ell`-dimensional subspaces of `F_p^t`.
pub fn gaussian_binomial(t: u32, ell: u32, p: u64) -> u128 {
    if ell > t {
        return 0;
    }
    let p = p as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..ell {
        num = num.saturating_mul(p.saturating_pow(t - i).saturating_sub(1));
        den = den.saturating_mul(p.saturating_pow(i + 1) - 1);
    }
    num / den
}

/// Basis vectors of every `ell`-dimensional subspace, one per reduced
/// row-echelon matrix, pivot sets in lexicographic order.
pub fn enumerate_subspaces(tw: &FieldTower, base: Subfield, ell: usize) -> Vec<Vec<Fe>> {
    let t = base.ext_degree();
    let coords = tw.power_basis(base);
    let scalars = tw.subfield_elements(base);
    let cols: Vec<usize> = (0..t).collect();
    let mut out = Vec::new();
    for pivots in crate::rack::combinations(&cols, ell) {
        // free slots: (row, col) with col > pivot_row and col not a pivot
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| ((pc + 1)..t).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let total = scalars.len().pow(free.len() as u32);
        for mut idx in 0..total {
            let mut rows: Vec<Vec<Fe>> = pivots
                .iter()
                .map(|&pc| {
                    let mut row = vec![Fe::ZERO; t];
                    row[pc] = Fe::ONE;
                    row
                })
                .collect();
            for &(r, c) in &free {
                rows[r][c] = scalars[idx % scalars.len()];
                idx /= scalars.len();
            }
            out.push(
                rows.iter()
                    .map(|row| tw.sum(row.iter().zip(&coords).map(|(&x, &e)| tw.mul(x, e))))
                    .collect(),
            );
        }
    }
    out
}

fn subfield_subspace(tw: &FieldTower, base: Subfield, ell: usize) -> Option<Vec<Fe>> {
    let sub = tw.subfield(base.degree() * ell as u32).ok()?;
    let zeta = tw.pow(tw.primitive(), ((tw.order() - 1) / (sub.order() - 1)) as u64);
    Some((0..ell as u64).map(|i| tw.pow(zeta, i)).collect())
}

fn random_subspaces(tw: &FieldTower, base: Subfield, ell: usize, count: usize, seed: u64) -> Vec<Vec<Fe>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reference = tw.default_basis(base);
    (0..count)
        .map(|_| loop {
            let cand: Vec<Fe> = (0..ell).map(|_| Fe(rng.gen_range(1..tw.order()))).collect();
            let rows = cand.iter().map(|&x| tw.traces_of(x, &reference)).collect();
            if linalg::rank(tw, rows) == ell {
                break cand;
            }
        })
        .collect()
}

/// Precomputed `g^(p^i - 1) mod Z_E`, so that for any `V`
/// `h_a = sum_i c_i eta_a^(p^i) g^(p^i - 1)` before normalization.
struct DescentKernel<'a> {
    tw: &'a FieldTower,
    base: Subfield,
    powers: Vec<Poly>,
    eta: Vec<Fe>,
}

impl<'a> DescentKernel<'a> {
    fn new(tw: &'a FieldTower, base: Subfield, g: &Poly, z: &Poly, ell: usize, eta: Vec<Fe>) -> Result<Self> {
        let p = base.order() as u64;
        let mut g_pm1 = Poly::constant(Fe::ONE);
        for _ in 0..p - 1 {
            g_pm1 = g_pm1.mul_mod(g, z, tw)?;
        }
        let mut powers = vec![Poly::constant(Fe::ONE)];
        for i in 0..ell {
            // g^(p^(i+1) - 1) = (g^(p^i - 1))^p g^(p - 1)
            let frob = powers[i].frobenius(base.degree(), tw).reduce_mod(z, tw)?;
            powers.push(frob.mul_mod(&g_pm1, z, tw)?);
        }
        Ok(DescentKernel { tw, base, powers, eta })
    }

    fn max_degree(&self, lin: &[Fe]) -> i64 {
        let tw = self.tw;
        let len = self.powers.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
        self.eta
            .iter()
            .map(|&eta| {
                let mut weights = Vec::with_capacity(lin.len());
                let mut e = eta;
                for (i, &c) in lin.iter().enumerate() {
                    if i > 0 {
                        e = tw.frobenius(e, self.base.degree());
                    }
                    weights.push(tw.mul(c, e));
                }
                (0..len)
                    .rev()
                    .find(|&j| {
                        !tw.sum(weights.iter().zip(&self.powers).map(|(&w, p)| tw.mul(w, p.coeff(j)))).is_zero()
                    })
                    .map_or(-1, |j| j as i64)
            })
            .max()
            .unwrap_or(-1)
    }
}

/// `c_0^{-1} (L_V(g eta_a) / g) mod Z_E` for each `a`, divided before reducing.
pub fn descent_polynomials(
    tw: &FieldTower,
    g: &Poly,
    z: &Poly,
    subspace: &SubspaceChoice,
    eta: &[Fe],
) -> Result<Vec<Poly>> {
    let lin = subspace_linearized_coeffs(subspace, tw)?;
    let l = linearized_to_dense(&lin, subspace.base);
    let c0_inv = tw.inv(lin[0])?;
    eta.iter()
        .map(|&e| {
            let composed = l.compose_linearized(&g.scale(e, tw), subspace.base, tw)?;
            let raw = composed.exact_div(g, tw)?;
            Ok(raw.reduce_mod(z, tw)?.scale(c0_inv, tw))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn degree_descent_scheme(
    tower: Arc<FieldTower>,
    good: &GoodPolynomial,
    layout: &RackLayout,
    base: Subfield,
    ell: usize,
    k: usize,
    d: usize,
    host_node: usize,
    policy: &SubspacePolicy,
    seed: u64,
) -> Result<DescentScheme> {
    let tw = &*tower;
    let t = base.ext_degree();
    if ell == 0 || ell >= t {
        return Err(Error::Hypotheses(vec![format!("ell = {ell} must satisfy 0 < ell < t = {t}")]));
    }
    if !is_good_polynomial(&good.g, layout, good.host_rack, tw) {
        return Err(Error::InvalidScheme("not a good polynomial for this layout".into()));
    }
    let bound = (layout.u() * (d + 1)) as i64 - k as i64 - 1;
    let z = vanishing_poly(&layout.points(), tw)?;
    let basis = tw.default_basis(base);
    let kernel = DescentKernel::new(tw, base, &good.g, &z, ell, basis.eta().to_vec())?;

    let mut stages: Vec<(Strategy, Vec<Vec<Fe>>)> = Vec::new();
    let search_stage = || {
        if gaussian_binomial(t as u32, ell as u32, base.order() as u64) <= EXHAUSTIVE_LIMIT {
            (Strategy::Exhaustive, enumerate_subspaces(tw, base, ell))
        } else {
            (Strategy::Random, random_subspaces(tw, base, ell, RANDOM_SAMPLES, seed))
        }
    };
    match policy {
        SubspacePolicy::Explicit(b) => stages.push((Strategy::Explicit, vec![b.clone()])),
        SubspacePolicy::Subfield => match subfield_subspace(tw, base, ell) {
            Some(b) => stages.push((Strategy::Subfield, vec![b])),
            None => {
                return Err(Error::Hypotheses(vec![format!("ell = {ell} does not divide t = {t}")]));
            }
        },
        SubspacePolicy::Search => stages.push(search_stage()),
        SubspacePolicy::Auto => {
            if let Some(b) = subfield_subspace(tw, base, ell) {
                stages.push((Strategy::Subfield, vec![b]));
            }
            stages.push(search_stage());
        }
    }

    let mut tried = 0usize;
    let mut best: Option<i64> = None;
    for (strategy, candidates) in stages {
        let degrees: Vec<Result<i64>> = candidates
            .par_iter()
            .map(|b| {
                let v = SubspaceChoice::new(base, b.clone());
                Ok(kernel.max_degree(&subspace_linearized_coeffs(&v, tw)?))
            })
            .collect();
        for (i, deg) in degrees.into_iter().enumerate() {
            let deg = deg?;
            best = Some(best.map_or(deg, |b| b.min(deg)));
            if deg <= bound {
                tried += i + 1;
                let subspace = SubspaceChoice::new(base, candidates[i].clone());
                let hs = descent_polynomials(tw, &good.g, &z, &subspace, basis.eta())?;
                let host = Host::new(good.host_rack, host_node);
                let scheme = RepairScheme::new(tower.clone(), layout.clone(), k, host, d, basis.clone(), hs)?;
                let report = scheme.validate();
                if report.max_degree != deg {
                    return Err(Error::InvalidScheme(format!(
                        "degree mismatch: predicted {deg}, built {}",
                        report.max_degree
                    )));
                }
                if !report.passed() {
                    return Err(Error::InvalidScheme(report.failures().join("; ")));
                }
                return Ok(DescentScheme { scheme, subspace, strategy, tried });
            }
        }
        tried += candidates.len();
    }
    Err(Error::NoAdmissibleSubspace {
        best_degree: best.map(|b| b.max(0) as usize),
        bound: bound.max(0) as usize,
        tried,
    })
}

/// `h_a = Tr(eta_a (x - a_j)) / (x - a_j)` over all of `F_q`, one node per rack.
pub fn gw_scheme(tower: Arc<FieldTower>, s_base: u32, k: usize, failed: usize) -> Result<RepairScheme> {
    let tw = &*tower;
    let base = tw.subfield(s_base)?;
    let q = tw.order() as usize;
    let p = base.order() as usize;
    if k * p > q * (p - 1) {
        return Err(Error::Hypotheses(vec![format!("k = {k} exceeds q(1 - 1/p)")]));
    }
    if failed >= q {
        return Err(Error::InvalidHelper(failed));
    }
    let points = tw.elements_in_power_order();
    let layout = RackLayout::single_nodes(points.clone())?;
    let alpha = points[failed];
    let lin = Poly::new(vec![tw.neg(alpha), Fe::ONE]);
    let tr = trace_poly(base);
    let basis = tw.default_basis(base);
    let hs = basis
        .eta()
        .iter()
        .map(|&e| tr.compose_linearized(&lin.scale(e, tw), base, tw)?.exact_div(&lin, tw))
        .collect::<Result<Vec<_>>>()?;
    RepairScheme::new(tower.clone(), layout, k, Host::new(failed, 0), q - 1, basis, hs)
}

/// Evaluation points: `n/2` from `F_{2^s}^*` then their multiples by the
/// primitive element `beta`.
pub fn two_coset_points(tw: &FieldTower, n: usize) -> Result<Vec<Fe>> {
    let sub = tw.subfield(tw.degree() / 2)?;
    let step = ((tw.order() - 1) / (sub.order() - 1)) as u64;
    let gamma = tw.primitive();
    let half: Vec<Fe> = (0..(n / 2) as u64).map(|i| tw.pow(gamma, i * step)).collect();
    let shifted: Vec<Fe> = half.iter().map(|&x| tw.mul(gamma, x)).collect();
    Ok(half.into_iter().chain(shifted).collect())
}

pub fn two_coset_scheme(s_half: u32, n: usize, k: usize, failed: usize) -> Result<RepairScheme> {
    let params = FamilyParams::new(Family::TwoCoset, 2, s_half, 2, k).n(n).host(failed, 0);
    validate_family_params(&params)?;
    let tower = Arc::new(FieldTower::new(2, 2 * s_half, None)?);
    let tw = &*tower;
    let sub = tw.subfield(s_half)?;
    let points = two_coset_points(tw, n)?;
    let alpha = points[failed];
    let beta = tw.primitive();
    let h2 = if tw.contains(sub, alpha) {
        Poly::monomial(tw.inv(beta)?, 1)
    } else {
        Poly::x()
    };
    let h1 = Poly::constant(Fe::ONE);
    let eta = [Fe::ONE, h2.eval(alpha, tw)];
    let basis = tw.dual_basis(sub, &eta)?;
    let layout = RackLayout::single_nodes(points)?;
    RepairScheme::new(tower.clone(), layout, k, Host::new(failed, 0), n - 1, basis, vec![h1, h2])
}

/// A scheme built from family parameters.
#[derive(Clone, Debug)]
pub struct BuiltScheme {
    pub params: FamilyParams,
    pub derived: Derived,
    pub scheme: RepairScheme,
    pub subspace: Option<SubspaceChoice>,
    pub strategy: Option<Strategy>,
    pub tried: usize,
}

pub fn build_family_scheme(params: &FamilyParams, policy: &SubspacePolicy, seed: u64) -> Result<BuiltScheme> {
    let derived = validate_family_params(params)?;
    let host = params.host;
    match params.family {
        Family::Gw => {
            let tower = Arc::new(FieldTower::new(params.p0, params.s_base * params.t, None)?);
            let scheme = gw_scheme(tower, params.s_base, params.k, host.rack)?;
            Ok(BuiltScheme { params: params.clone(), derived, scheme, subspace: None, strategy: None, tried: 0 })
        }
        Family::TwoCoset => {
            let n = params.n.unwrap_or_default();
            let scheme = two_coset_scheme(params.s_base, n, params.k, host.rack)?;
            Ok(BuiltScheme { params: params.clone(), derived, scheme, subspace: None, strategy: None, tried: 0 })
        }
        family => {
            let tower = Arc::new(FieldTower::new(params.p0, params.s_base * params.t, None)?);
            let tw = &*tower;
            let base = tw.subfield(params.s_base)?;
            let (good, layout) = match family {
                Family::Additive => additive_good_poly(tw, base, host.rack)?,
                Family::Multiplicative => {
                    multiplicative_good_poly(tw, base, params.a.unwrap_or_default(), host.rack)?
                }
                _ => combined_good_poly(
                    tw,
                    base,
                    params.a.unwrap_or_default(),
                    params.v.unwrap_or_default(),
                    host.rack,
                )?,
            };
            let ell = params.ell.unwrap_or_default() as usize;
            let built = degree_descent_scheme(
                tower.clone(),
                &good,
                &layout,
                base,
                ell,
                params.k,
                derived.d as usize,
                host.node,
                policy,
                seed,
            )?;
            Ok(BuiltScheme {
                params: params.clone(),
                derived,
                scheme: built.scheme,
                subspace: Some(built.subspace),
                strategy: Some(built.strategy),
                tried: built.tried,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rack::worst_case_bandwidth;

    #[test]
    fn validator_examples() {
        let add = FamilyParams::new(Family::Additive, 2, 1, 6, 32).ell(3);
        let d = validate_family_params(&add).unwrap();
        assert_eq!((d.n, d.r, d.u, d.m, d.d), (64, 4, 16, 2, 3));
        let odd = FamilyParams::new(Family::Additive, 2, 1, 5, 32).ell(3);
        let Err(Error::Hypotheses(v)) = validate_family_params(&odd) else { panic!() };
        assert!(v.iter().any(|s| s.contains("not even")));
        let mul = FamilyParams::new(Family::Multiplicative, 2, 1, 6, 36).ell(4).a(3);
        let d = validate_family_params(&mul).unwrap();
        assert_eq!((d.n, d.r, d.u, d.m, d.d), (63, 7, 9, 4, 6));
        let mul_big_k = FamilyParams::new(Family::Multiplicative, 2, 1, 6, 54).ell(4).a(3);
        assert!(validate_family_params(&mul_big_k).is_err());
        let comb = FamilyParams::new(Family::Combined, 3, 1, 6, 162).ell(4).a(2).v(2);
        let d = validate_family_params(&comb).unwrap();
        assert_eq!((d.n, d.r, d.u, d.m, d.d), (648, 4, 162, 1, 3));
        let gw = FamilyParams::new(Family::Gw, 2, 1, 4, 9);
        assert!(validate_family_params(&gw).is_err());
        let tc = FamilyParams::new(Family::TwoCoset, 2, 2, 2, 4).n(6);
        assert!(validate_family_params(&tc).is_ok());
        let tc_odd = FamilyParams::new(Family::TwoCoset, 2, 2, 2, 4).n(7);
        assert!(validate_family_params(&tc_odd).is_err());
    }

    #[test]
    fn additive_layout_f16() {
        let tw = FieldTower::new(2, 4, None).unwrap();
        let base = tw.prime_subfield();
        let (good, layout) = additive_good_poly(&tw, base, 0).unwrap();
        assert_eq!((layout.r(), layout.u()), (4, 4));
        // host rack W: g = Tr = x^4 + x
        assert_eq!(good.g, Poly::new(vec![Fe::ZERO, Fe::ONE, Fe::ZERO, Fe::ZERO, Fe::ONE]));
        assert_eq!(good.g.degree(), Some(4));
        // oracle: group all 16 points by trace value
        let f4 = tw.subfield(2).unwrap();
        for rack in layout.grid() {
            let v = tw.trace_to(rack[0], f4);
            assert!(rack.iter().all(|&x| tw.trace_to(x, f4) == v));
        }
        let (shifted, _) = additive_good_poly(&tw, base, 2).unwrap();
        assert!(!shifted.g.coeff(0).is_zero());
        assert!(is_good_polynomial(&shifted.g, &layout, 2, &tw));
        let moved = shifted.g.add(&Poly::constant(Fe::ONE), &tw);
        assert!(!is_good_polynomial(&moved, &layout, 2, &tw));
        let odd = FieldTower::new(2, 5, None).unwrap();
        assert!(additive_good_poly(&odd, odd.prime_subfield(), 0).is_err());
    }

    #[test]
    fn x_is_not_good_on_multi_point_racks() {
        let tw = FieldTower::new(2, 4, None).unwrap();
        let (_, layout) = additive_good_poly(&tw, tw.prime_subfield(), 0).unwrap();
        assert!(!is_good_polynomial(&Poly::x(), &layout, 0, &tw));
    }

    #[test]
    fn multiplicative_layout_f64() {
        let tw = FieldTower::new(2, 6, None).unwrap();
        let (good, layout) = multiplicative_good_poly(&tw, tw.prime_subfield(), 3, 1).unwrap();
        assert_eq!((layout.r(), layout.u(), layout.n()), (7, 9, 63));
        // oracle: racks are the level sets of x^9
        for rack in layout.grid() {
            let v = tw.pow(rack[0], 9);
            assert!(rack.iter().all(|&x| tw.pow(x, 9) == v));
        }
        let f8 = tw.subfield(3).unwrap();
        assert!(good.rack_constants.iter().all(|&c| tw.contains(f8, c)));
        assert!(multiplicative_good_poly(&tw, tw.prime_subfield(), 4, 0).is_err());
    }

    #[test]
    fn combined_layout_f729() {
        let tw = FieldTower::new(3, 6, None).unwrap();
        let base = tw.prime_subfield();
        let (good, layout) = combined_good_poly(&tw, base, 2, 2, 0).unwrap();
        assert_eq!((layout.n(), layout.r(), layout.u()), (648, 4, 162));
        assert!(is_good_polynomial(&good.g, &layout, 0, &tw));
        let f9 = tw.subfield(2).unwrap();
        for rack in layout.grid() {
            let v = tw.pow(tw.trace_to(rack[0], f9), 2);
            assert!(rack.iter().all(|&x| tw.pow(tw.trace_to(x, f9), 2) == v));
        }
        assert!(combined_good_poly(&tw, base, 2, 3, 0).is_err());
    }

    #[test]
    fn combined_with_v_one_is_shifted_additive() {
        // v = 1: G = Tr_{F_q/F_{p^a}}, racks are the nonzero-trace cosets of W
        let tw = FieldTower::new(2, 4, None).unwrap();
        let (good, layout) = combined_good_poly(&tw, tw.prime_subfield(), 2, 1, 0).unwrap();
        assert_eq!((layout.r(), layout.u()), (3, 4));
        assert_eq!(good.g.degree(), Some(4));
        let (add, add_layout) = additive_good_poly(&tw, tw.prime_subfield(), 1).unwrap();
        assert_eq!(add_layout.rack(1), layout.rack(0));
        assert_eq!(add.g, good.g);
    }

    #[test]
    fn subspace_enumeration_counts() {
        let tw = FieldTower::new(2, 4, None).unwrap();
        let base = tw.prime_subfield();
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(6, 4, 2), 651);
        assert_eq!(gaussian_binomial(6, 4, 3), 11011);
        let all = enumerate_subspaces(&tw, base, 2);
        assert_eq!(all.len(), 35);
        // distinct subspaces: compare sorted element sets
        let mut sets: Vec<Vec<Fe>> = all
            .iter()
            .map(|b| {
                let mut e = SubspaceChoice::new(base, b.clone()).elements(&tw);
                e.sort();
                e
            })
            .collect();
        sets.sort();
        sets.dedup();
        assert_eq!(sets.len(), 35);
    }

    #[test]
    fn additive_f64_subfield_scheme() {
        let tower = Arc::new(FieldTower::new(2, 6, None).unwrap());
        let tw = &*tower;
        let base = tw.prime_subfield();
        let (good, layout) = additive_good_poly(tw, base, 0).unwrap();
        let built = degree_descent_scheme(
            tower.clone(), &good, &layout, base, 3, 32, 3, 0, &SubspacePolicy::Auto, 42,
        )
        .unwrap();
        assert_eq!(built.strategy, Strategy::Subfield);
        let s = &built.scheme;
        assert!(s.h_degrees().iter().all(|&d| d == 16));
        // h_a = eta_a + eta_a^8 g
        for (h, &eta) in s.h_polys().iter().zip(s.basis().eta()) {
            let want = Poly::constant(eta).add(&good.g.scale(tw.pow(eta, 8), tw), tw);
            assert_eq!(*h, want);
        }
        let prof = worst_case_bandwidth(s);
        assert_eq!(prof.symbols, 9);
        assert!(prof.per_rack.iter().flatten().all(|&b| b == 3));
    }

    #[test]
    fn additive_f16_ell2_has_no_admissible_subspace() {
        let tower = Arc::new(FieldTower::new(2, 4, None).unwrap());
        let tw = &*tower;
        let base = tw.prime_subfield();
        let (good, layout) = additive_good_poly(tw, base, 0).unwrap();
        for k in 8..=11 {
            let err = degree_descent_scheme(
                tower.clone(), &good, &layout, base, 2, k, 3, 0, &SubspacePolicy::Auto, 1,
            )
            .unwrap_err();
            assert_eq!(
                err,
                Error::NoAdmissibleSubspace { best_degree: Some(12), bound: 15 - k, tried: 36 }
            );
        }
    }

    #[test]
    fn kernel_route_matches_literal_division() {
        let tower = Arc::new(FieldTower::new(2, 6, None).unwrap());
        let tw = &*tower;
        let base = tw.prime_subfield();
        let (good, layout) = multiplicative_good_poly(tw, base, 3, 2).unwrap();
        let z = vanishing_poly(&layout.points(), tw).unwrap();
        let basis = tw.default_basis(base);
        let kernel = DescentKernel::new(tw, base, &good.g, &z, 4, basis.eta().to_vec()).unwrap();
        for b in enumerate_subspaces(tw, base, 4).into_iter().step_by(37) {
            let v = SubspaceChoice::new(base, b);
            let hs = descent_polynomials(tw, &good.g, &z, &v, basis.eta()).unwrap();
            let lit = hs.iter().map(Poly::degree_or_neg).max().unwrap();
            let lin = subspace_linearized_coeffs(&v, tw).unwrap();
            assert_eq!(kernel.max_degree(&lin), lit);
            // host values after normalization
            let x0 = layout.point(2, 0);
            for (h, &e) in hs.iter().zip(basis.eta()) {
                assert_eq!(h.eval(x0, tw), e);
            }
        }
    }

    #[test]
    fn gw_degrees_and_host_values() {
        let tower = Arc::new(FieldTower::new(2, 4, None).unwrap());
        for j in [0, 5, 15] {
            let s = gw_scheme(tower.clone(), 1, 8, j).unwrap();
            assert!(s.validate().passed());
            assert!(s.h_degrees().iter().all(|&d| d == 7));
            assert_eq!(worst_case_bandwidth(&s).symbols, 15);
        }
        assert!(matches!(gw_scheme(tower, 1, 9, 0), Err(Error::Hypotheses(_))));
    }

    #[test]
    fn two_coset_profiles() {
        // failed node in F_4^*: same-coset nodes give b = 2, the others b = 1
        let s = two_coset_scheme(2, 6, 4, 0).unwrap();
        assert!(s.validate().passed());
        let prof = worst_case_bandwidth(&s);
        assert_eq!(prof.per_rack, vec![None, Some(2), Some(2), Some(1), Some(1), Some(1)]);
        assert_eq!(prof.symbols, 7);
        assert_eq!(prof.bits.exact(), "14");
        let s = two_coset_scheme(2, 6, 4, 4).unwrap();
        assert_eq!(worst_case_bandwidth(&s).symbols, 7);
        assert!(s.h_degrees().iter().all(|&d| d <= 1));
        assert!(two_coset_scheme(2, 7, 4, 0).is_err());
    }
}
