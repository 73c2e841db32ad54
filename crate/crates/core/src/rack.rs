//! Rack-aware trace repair of a single failed node.
//!
//! A [`RepairScheme`] carries `t` repair polynomials `h_a` with
//! `h_a(host point) = eta_a` and degree at most `u(d+1) - k - 1`. Puncturing the
//! code to the host rack plus `d` helper racks makes every
//! `(v_x h_a(x))_x` a dual codeword, so each trace `Tr(eta_a f(host))` is a sum of
//! traces available from the surviving nodes. A helper rack only ships
//! `Tr(f_i . c_l)` for a basis `c_l` of the span of its `h`-evaluation vectors.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldTower, Subfield, TraceBasis};
use crate::grs::{dual_multipliers, Codeword, GrsCode};
use crate::linalg::{self, SpanEchelon};
use crate::poly::{vanishing_poly, Poly};

/// `r x u` grid of distinct evaluation points; rack `i` is row `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RackLayout {
    grid: Vec<Vec<Fe>>,
}

impl RackLayout {
    pub fn new(grid: Vec<Vec<Fe>>) -> Result<Self> {
        let u = grid.first().map_or(0, |r| r.len());
        if grid.is_empty() || u == 0 {
            return Err(Error::InvalidLayout("empty layout".into()));
        }
        if grid.iter().any(|r| r.len() != u) {
            return Err(Error::InvalidLayout("racks must have equal size".into()));
        }
        let mut seen = BTreeSet::new();
        if !grid.iter().flatten().all(|&a| seen.insert(a)) {
            return Err(Error::RepeatedPoint);
        }
        Ok(RackLayout { grid })
    }

    /// Standard model: one node per rack.
    pub fn single_nodes(points: Vec<Fe>) -> Result<Self> {
        RackLayout::new(points.into_iter().map(|a| vec![a]).collect())
    }

    pub fn r(&self) -> usize {
        self.grid.len()
    }

    pub fn u(&self) -> usize {
        self.grid[0].len()
    }

    pub fn n(&self) -> usize {
        self.r() * self.u()
    }

    pub fn rack(&self, i: usize) -> &[Fe] {
        &self.grid[i]
    }

    pub fn grid(&self) -> &[Vec<Fe>] {
        &self.grid
    }

    pub fn point(&self, rack: usize, node: usize) -> Fe {
        self.grid[rack][node]
    }

    pub fn position(&self, rack: usize, node: usize) -> usize {
        rack * self.u() + node
    }

    /// Rack-major flattening, the code's coordinate order.
    pub fn points(&self) -> Vec<Fe> {
        self.grid.iter().flatten().copied().collect()
    }
}

/// 0-based `(rack, node)` of the failed node.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Host {
    pub rack: usize,
    pub node: usize,
}

impl Host {
    pub fn new(rack: usize, node: usize) -> Self {
        Host { rack, node }
    }
}

impl fmt::Display for Host {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rack, self.node)
    }
}

#[derive(Clone, Debug)]
pub struct RepairScheme {
    tower: Arc<FieldTower>,
    layout: RackLayout,
    k: usize,
    host: Host,
    d: usize,
    basis: TraceBasis,
    h_polys: Vec<Poly>,
    // h_evals[a][position]
    h_evals: Vec<Vec<Fe>>,
}

impl RepairScheme {
    /// Stores each `h_a` as its remainder modulo the vanishing polynomial of
    /// the full evaluation set. Validity is checked by [`RepairScheme::validate`].
    pub fn new(
        tower: Arc<FieldTower>,
        layout: RackLayout,
        k: usize,
        host: Host,
        d: usize,
        basis: TraceBasis,
        h_polys: Vec<Poly>,
    ) -> Result<Self> {
        if host.rack >= layout.r() || host.node >= layout.u() {
            return Err(Error::InvalidScheme(format!("host {host} outside the layout")));
        }
        if h_polys.len() != basis.len() {
            return Err(Error::LengthMismatch { expected: basis.len(), got: h_polys.len() });
        }
        if k == 0 || k >= layout.n() {
            return Err(Error::InvalidCode(format!("need 1 <= k < n, got k={k}")));
        }
        for &a in layout.grid.iter().flatten() {
            tower.check(a)?;
        }
        let points = layout.points();
        let z = vanishing_poly(&points, &tower)?;
        let h_polys = h_polys
            .iter()
            .map(|h| h.reduce_mod(&z, &tower))
            .collect::<Result<Vec<_>>>()?;
        let h_evals = h_polys
            .iter()
            .map(|h| points.iter().map(|&x| h.eval(x, &tower)).collect())
            .collect();
        Ok(RepairScheme { tower, layout, k, host, d, basis, h_polys, h_evals })
    }

    /// Same polynomials with a different helper degree.
    pub fn with_helper_degree(&self, d: usize) -> Self {
        RepairScheme { d, ..self.clone() }
    }

    /// Same polynomials repairing another node; valid when the `h_a` take
    /// the same values at both positions (all descent schemes on one rack).
    pub fn with_host(&self, host: Host) -> Result<Self> {
        if host.rack >= self.layout.r() || host.node >= self.layout.u() {
            return Err(Error::InvalidScheme(format!("host {host} outside the layout")));
        }
        Ok(RepairScheme { host, ..self.clone() })
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn layout(&self) -> &RackLayout {
        &self.layout
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn host(&self) -> Host {
        self.host
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> &TraceBasis {
        &self.basis
    }

    pub fn base(&self) -> Subfield {
        self.basis.base()
    }

    pub fn h_polys(&self) -> &[Poly] {
        &self.h_polys
    }

    pub fn h_degrees(&self) -> Vec<i64> {
        self.h_polys.iter().map(Poly::degree_or_neg).collect()
    }

    /// `u(d+1) - k - 1`, possibly negative.
    pub fn degree_bound(&self) -> i64 {
        (self.layout.u() * (self.d + 1)) as i64 - self.k as i64 - 1
    }

    /// `(h_a(a_{i,1}), ..., h_a(a_{i,u}))`.
    pub fn rack_vector(&self, a: usize, rack: usize) -> &[Fe] {
        let u = self.layout.u();
        &self.h_evals[a][rack * u..(rack + 1) * u]
    }

    pub fn validate(&self) -> ValidationReport {
        let tw = &*self.tower;
        let h_degrees = self.h_degrees();
        let max_degree = h_degrees.iter().copied().max().unwrap_or(-1);
        let degree_bound = self.degree_bound();
        let host_point = self.layout.point(self.host.rack, self.host.node);
        let host_values_ok = self
            .h_polys
            .iter()
            .zip(self.basis.eta())
            .all(|(h, &eta)| h.eval(host_point, tw) == eta);
        let sub = self.basis.base();
        let t = sub.ext_degree();
        let reference = tw.default_basis(sub);
        let rows: Vec<Vec<Fe>> = self.basis.eta().iter().map(|&e| tw.traces_of(e, &reference)).collect();
        let dual_ok = self.basis.eta().iter().enumerate().all(|(i, &e)| {
            self.basis.theta().iter().enumerate().all(|(j, &th)| {
                let want = if i == j { Fe::ONE } else { Fe::ZERO };
                tw.trace_to(tw.mul(e, th), sub) == want
            })
        });
        let basis_ok = self.basis.len() == t && linalg::rank(tw, rows) == t && dual_ok;
        let u = self.layout.u();
        let d_min = (self.k + 1).div_ceil(u) as i64 - 1;
        let d_range_ok = (self.d as i64) >= d_min && self.d < self.layout.r();
        ValidationReport {
            degree_bound,
            max_degree,
            h_degrees,
            degree_ok: max_degree <= degree_bound,
            host_values_ok,
            basis_ok,
            d_range_ok,
        }
    }

    /// `b_i` for every rack; `None` at the host rack.
    pub fn rack_span_dims(&self) -> Vec<Option<usize>> {
        (0..self.layout.r())
            .map(|i| (i != self.host.rack).then(|| self.rack_span(i).0.len()))
            .collect()
    }

    /// Span basis of the `h`-evaluation vectors on a rack and, per `a`, the
    /// coefficients `e_{l,i,a}` over that basis.
    fn rack_span(&self, rack: usize) -> (Vec<Vec<Fe>>, Vec<Vec<Fe>>) {
        let tw = &*self.tower;
        let mut ech = SpanEchelon::new(tw, self.base());
        let mut basis = Vec::new();
        for a in 0..self.basis.len() {
            let v = self.rack_vector(a, rack);
            if ech.insert(v).is_none() {
                basis.push(v.to_vec());
            }
        }
        let coeffs = (0..self.basis.len())
            .map(|a| ech.express(self.rack_vector(a, rack)).expect("vector lies in its own span"))
            .collect();
        (basis, coeffs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub degree_bound: i64,
    pub max_degree: i64,
    pub h_degrees: Vec<i64>,
    pub degree_ok: bool,
    pub host_values_ok: bool,
    pub basis_ok: bool,
    pub d_range_ok: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.degree_ok && self.host_values_ok && self.basis_ok && self.d_range_ok
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.degree_ok {
            out.push(format!("max degree {} exceeds u(d+1)-k-1 = {}", self.max_degree, self.degree_bound));
        }
        if !self.host_values_ok {
            out.push("h_a(host) != eta_a".into());
        }
        if !self.basis_ok {
            out.push("eta/theta is not a dual basis".into());
        }
        if !self.d_range_ok {
            out.push("helper degree outside [ceil((k+1)/u)-1, r-1]".into());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RackDownload {
    pub rack: usize,
    /// `c_1..c_{b_i}`.
    pub span_basis: Vec<Vec<Fe>>,
    /// `coeffs[a][l] = e_{l,i,a}`.
    pub coeffs: Vec<Vec<Fe>>,
}

impl RackDownload {
    pub fn b(&self) -> usize {
        self.span_basis.len()
    }
}

#[derive(Clone, Debug)]
pub struct DownloadPlan<'a> {
    scheme: &'a RepairScheme,
    helpers: Vec<usize>,
    // punctured dual multipliers, indexed like `racks_in_order`
    punctured: Vec<Vec<Fe>>,
    downloads: Vec<RackDownload>,
}

impl<'a> DownloadPlan<'a> {
    pub fn scheme(&self) -> &RepairScheme {
        self.scheme
    }

    pub fn helpers(&self) -> &[usize] {
        &self.helpers
    }

    pub fn downloads(&self) -> &[RackDownload] {
        &self.downloads
    }

    /// `v_{i,j}` for the host rack (index 0) and each helper in order.
    pub fn punctured_multipliers(&self) -> &[Vec<Fe>] {
        &self.punctured
    }

    pub fn cross_rack_symbols(&self) -> usize {
        self.downloads.iter().map(RackDownload::b).sum()
    }
}

/// Builds the download plan for one helper set; fails on an invalid scheme.
pub fn build_download_plan<'a>(scheme: &'a RepairScheme, helpers: &[usize]) -> Result<DownloadPlan<'a>> {
    if helpers.len() != scheme.d {
        return Err(Error::InsufficientHelpers { needed: scheme.d, got: helpers.len() });
    }
    let mut seen = BTreeSet::new();
    for &h in helpers {
        if h >= scheme.layout.r() || h == scheme.host.rack || !seen.insert(h) {
            return Err(Error::InvalidHelper(h));
        }
    }
    let report = scheme.validate();
    if !report.passed() {
        return Err(Error::InvalidScheme(report.failures().join("; ")));
    }
    let tw = &*scheme.tower;
    let order: Vec<usize> = std::iter::once(scheme.host.rack).chain(helpers.iter().copied()).collect();
    let punctured_points: Vec<Fe> = order.iter().flat_map(|&i| scheme.layout.rack(i).iter().copied()).collect();
    let v = dual_multipliers(&punctured_points, tw)?;
    let u = scheme.layout.u();
    let punctured = v.chunks(u).map(<[Fe]>::to_vec).collect();
    let downloads = helpers
        .iter()
        .map(|&i| {
            let (span_basis, coeffs) = scheme.rack_span(i);
            RackDownload { rack: i, span_basis, coeffs }
        })
        .collect();
    Ok(DownloadPlan { scheme, helpers: helpers.to_vec(), punctured, downloads })
}

/// `symbols * log2|F_p|` kept exact.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Bits {
    pub symbols: Ratio<u64>,
    pub base_order: u64,
}

impl Bits {
    pub fn new(symbols: Ratio<u64>, base_order: u64) -> Self {
        Bits { symbols, base_order }
    }

    /// `"p/q"` when `|F_p|` is a power of two, else `"p/q*log2(|F_p|)"`.
    pub fn exact(&self) -> String {
        if self.base_order.is_power_of_two() {
            let e = self.base_order.trailing_zeros() as u64;
            (self.symbols * Ratio::from_integer(e)).to_string()
        } else {
            format!("{}*log2({})", self.symbols, self.base_order)
        }
    }

    pub fn approx(&self) -> f64 {
        let s = *self.symbols.numer() as f64 / *self.symbols.denom() as f64;
        s * (self.base_order as f64).log2()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairTranscript {
    pub cross_rack_symbols: usize,
    pub bits: Bits,
    pub intra_rack_symbols: usize,
    /// The regenerated stored symbol.
    pub recovered: Fe,
    /// `Tr(eta_a f(host))`.
    pub traces: Vec<Fe>,
    /// `(rack, [Tr(f_i . c_l)])` per helper rack.
    pub per_rack_payload: Vec<(usize, Vec<Fe>)>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Sign {
    Negated,
    #[cfg_attr(not(test), allow(dead_code))]
    Plain,
}

pub fn execute_repair(plan: &DownloadPlan<'_>, code: &GrsCode, word: &Codeword) -> Result<RepairTranscript> {
    repair_with_sign(plan, code, word, Sign::Negated)
}

fn repair_with_sign(plan: &DownloadPlan<'_>, code: &GrsCode, word: &Codeword, sign: Sign) -> Result<RepairTranscript> {
    let scheme = plan.scheme;
    if **code.tower() != *scheme.tower {
        return Err(Error::MixedTowers);
    }
    if code.k() != scheme.k {
        return Err(Error::PlanMismatch(format!("code k={} but scheme k={}", code.k(), scheme.k)));
    }
    if code.points() != scheme.layout.points().as_slice() {
        return Err(Error::PlanMismatch("code points differ from the rack layout".into()));
    }
    if word.len() != code.n() {
        return Err(Error::LengthMismatch { expected: code.n(), got: word.len() });
    }
    if !code.is_codeword(word) {
        return Err(Error::NotACodeword);
    }
    let host_pos = scheme.layout.position(scheme.host.rack, scheme.host.node);
    let racks = std::iter::once(scheme.host.rack).chain(plan.helpers.iter().copied());
    for i in racks {
        for l in 0..scheme.layout.u() {
            let pos = scheme.layout.position(i, l);
            if pos != host_pos && word.erased.contains(&pos) {
                return Err(Error::InvalidHelper(pos));
            }
        }
    }
    let tw = &*scheme.tower;
    let sub = scheme.base();
    let layout = &scheme.layout;
    let u = layout.u();
    let t = scheme.basis.len();
    let host = scheme.host;
    let f = code.unscaled(word);
    let v_host = &plan.punctured[0];
    let v_sj = v_host[host.node];

    // Host rack: (u-1)t traces, free inside the rack.
    let host_terms: Vec<Fe> = (0..t)
        .map(|a| {
            let hv = scheme.rack_vector(a, host.rack);
            tw.sum((0..u).filter(|&l| l != host.node).map(|l| {
                let pos = layout.position(host.rack, l);
                let coef = tw.div(v_host[l], v_sj).expect("nonzero multiplier");
                tw.trace_to(tw.mul(tw.mul(coef, hv[l]), f[pos]), sub)
            }))
        })
        .collect();

    // Helper racks: the relayer ships Tr(f_i . c_l) for each span vector.
    let mut per_rack_payload = Vec::with_capacity(plan.downloads.len());
    for (slot, dl) in plan.downloads.iter().enumerate() {
        let v_rack = &plan.punctured[slot + 1];
        let f_i: Vec<Fe> = (0..u)
            .map(|m| {
                let coef = tw.div(v_rack[m], v_sj).expect("nonzero multiplier");
                tw.mul(coef, f[layout.position(dl.rack, m)])
            })
            .collect();
        let payload = dl
            .span_basis
            .iter()
            .map(|c| tw.trace_to(tw.sum(f_i.iter().zip(c).map(|(&x, &y)| tw.mul(x, y))), sub))
            .collect();
        per_rack_payload.push((dl.rack, payload));
    }

    let traces: Vec<Fe> = (0..t)
        .map(|a| {
            let helper_sum = tw.sum(plan.downloads.iter().zip(&per_rack_payload).flat_map(|(dl, (_, pay))| {
                dl.coeffs[a].iter().zip(pay).map(|(&e, &y)| tw.mul(e, y))
            }));
            let rhs = tw.add(host_terms[a], helper_sum);
            match sign {
                Sign::Negated => tw.neg(rhs),
                Sign::Plain => rhs,
            }
        })
        .collect();
    let value = tw.element_from_traces(&traces, &scheme.basis)?;
    let pos = layout.position(host.rack, host.node);
    let recovered = tw.mul(value, code.multipliers()[pos]);
    let cross = plan.cross_rack_symbols();
    Ok(RepairTranscript {
        cross_rack_symbols: cross,
        bits: Bits::new(Ratio::from_integer(cross as u64), sub.order() as u64),
        intra_rack_symbols: (u - 1) * t,
        recovered,
        traces,
        per_rack_payload,
    })
}

/// Standard model (one node per rack): helpers are node indices.
pub fn repair_standard(
    scheme: &RepairScheme,
    helpers: &[usize],
    code: &GrsCode,
    word: &Codeword,
) -> Result<RepairTranscript> {
    if scheme.layout.u() != 1 {
        return Err(Error::InvalidLayout(format!("standard repair needs u = 1, got {}", scheme.layout.u())));
    }
    let plan = build_download_plan(scheme, helpers)?;
    execute_repair(&plan, code, word)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandwidthProfile {
    /// `b_i` per rack, `None` at the host.
    pub per_rack: Vec<Option<usize>>,
    /// Sum of the `d` largest `b_i`.
    pub symbols: usize,
    pub bits: Bits,
}

pub fn worst_case_bandwidth(scheme: &RepairScheme) -> BandwidthProfile {
    let per_rack = scheme.rack_span_dims();
    let mut dims: Vec<usize> = per_rack.iter().flatten().copied().collect();
    dims.sort_unstable_by(|a, b| b.cmp(a));
    let symbols: usize = dims.iter().take(scheme.d).sum();
    BandwidthProfile {
        per_rack,
        symbols,
        bits: Bits::new(Ratio::from_integer(symbols as u64), scheme.base().order() as u64),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSetQuery {
    pub n: u64,
    pub k: u64,
    pub r: u64,
    pub d: u64,
    pub q: u64,
    pub base_order: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CutSetBound {
    pub m: u64,
    pub t: u64,
    /// `d t / (d - m + 1)` base-field symbols.
    pub symbols: Ratio<u64>,
    pub bits: Bits,
}

/// Rack-aware cut-set bound `b >= d log q / (d - floor(kr/n) + 1)`.
pub fn cutset_bound(qy: &CutSetQuery) -> Result<CutSetBound> {
    if qy.n == 0 || qy.base_order < 2 {
        return Err(Error::InvalidCode("n and |F_p| must be positive".into()));
    }
    let mut t = 0u64;
    let mut acc = 1u64;
    while acc < qy.q {
        acc = acc
            .checked_mul(qy.base_order)
            .ok_or_else(|| Error::InvalidCode("q overflow".into()))?;
        t += 1;
    }
    if acc != qy.q {
        return Err(Error::InvalidCode(format!("q = {} is not a power of |F_p| = {}", qy.q, qy.base_order)));
    }
    let m = qy.k * qy.r / qy.n;
    let denom = qy.d as i64 - m as i64 + 1;
    if denom <= 0 {
        return Err(Error::BoundUndefined(denom));
    }
    let symbols = Ratio::new(qy.d * t, denom as u64);
    Ok(CutSetBound { m, t, symbols, bits: Bits::new(symbols, qy.base_order) })
}

/// Exact optimality: worst-case symbols equal the bound.
pub fn meets_cutset(symbols: usize, bound: &CutSetBound) -> bool {
    Ratio::from_integer(symbols as u64) == bound.symbols
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Helper sets to exercise: every `d`-subset of the non-host racks when there
/// are at most 64, else 50 seeded random subsets.
pub fn helper_sets(r: usize, host_rack: usize, d: usize, seed: u64) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..r).filter(|&i| i != host_rack).collect();
    if binomial(others.len(), d) <= 64 {
        combinations(&others, d)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50)
            .map(|_| {
                let mut pick: Vec<usize> = others.choose_multiple(&mut rng, d).copied().collect();
                pick.sort_unstable();
                pick
            })
            .collect()
    }
}

pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}
