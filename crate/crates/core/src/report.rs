//! Machine-readable run reports.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gf::Fe;
use crate::rack::{cutset_bound, meets_cutset, Bits, CutSetBound, CutSetQuery, Host, RepairScheme};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BitsField {
    pub exact: String,
    pub approx: f64,
}

impl From<Bits> for BitsField {
    fn from(b: Bits) -> Self {
        BitsField { exact: b.exact(), approx: round6(b.approx()) }
    }
}

pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub family: String,
    pub p0: u32,
    pub s_base: u32,
    pub t: usize,
    pub q: u64,
    pub n: usize,
    pub r: usize,
    pub u: usize,
    pub k: usize,
    pub d: usize,
    pub ell: Option<u32>,
    pub host: Host,
    pub bandwidth_symbols: usize,
    pub bandwidth_bits: BitsField,
    /// Exact rational, e.g. `"9"` or `"15/2"`.
    pub cutset_symbols: String,
    pub cutset_bits: BitsField,
    pub optimal: bool,
    /// `k t` symbols downloaded by interpolation.
    pub naive_symbols: usize,
    pub trials: usize,
    pub failures: usize,
    pub h_degrees: Vec<i64>,
    pub subspace_basis: Option<Vec<Fe>>,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl Report {
    /// Report skeleton for `scheme` with `bandwidth_symbols` as measured.
    pub fn new(
        family: &str,
        scheme: &RepairScheme,
        ell: Option<u32>,
        bandwidth_symbols: usize,
        subspace_basis: Option<Vec<Fe>>,
    ) -> Result<Self> {
        let tw = scheme.tower();
        let base = scheme.base();
        let layout = scheme.layout();
        let bound = scheme_cutset(scheme)?;
        let bits = Bits::new((bandwidth_symbols as u64).into(), base.order() as u64);
        Ok(Report {
            family: family.to_string(),
            p0: tw.characteristic(),
            s_base: base.degree(),
            t: base.ext_degree(),
            q: tw.order() as u64,
            n: layout.n(),
            r: layout.r(),
            u: layout.u(),
            k: scheme.k(),
            d: scheme.d(),
            ell,
            host: scheme.host(),
            bandwidth_symbols,
            bandwidth_bits: bits.into(),
            cutset_symbols: bound.symbols.to_string(),
            cutset_bits: bound.bits.into(),
            optimal: meets_cutset(bandwidth_symbols, &bound),
            naive_symbols: scheme.k() * base.ext_degree(),
            trials: 0,
            failures: 0,
            h_degrees: scheme.h_degrees(),
            subspace_basis,
            version: VERSION.to_string(),
            duration_ms: None,
        })
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn scheme_cutset(scheme: &RepairScheme) -> Result<CutSetBound> {
    let layout = scheme.layout();
    cutset_bound(&CutSetQuery {
        n: layout.n() as u64,
        k: scheme.k() as u64,
        r: layout.r() as u64,
        d: scheme.d() as u64,
        q: scheme.tower().order() as u64,
        base_order: scheme.base().order() as u64,
    })
}

/// One CSV row per parameter point; infeasible points carry the reason.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepRow {
    pub family: String,
    pub p0: u32,
    pub s_base: u32,
    pub t: u32,
    pub k: Option<usize>,
    pub ell: Option<u32>,
    pub a: Option<u32>,
    pub v: Option<u32>,
    pub n_param: Option<usize>,
    pub status: String,
    pub report: Option<Report>,
    pub detail: String,
}

pub const SWEEP_HEADER: [&str; 23] = [
    "family",
    "p0",
    "s_base",
    "t",
    "k",
    "ell",
    "a",
    "v",
    "q",
    "n",
    "r",
    "u",
    "d",
    "feasible",
    "status",
    "bandwidth_symbols",
    "bandwidth_bits",
    "cutset_symbols",
    "cutset_bits",
    "optimal",
    "trials",
    "failures",
    "detail",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        let rep = self.report.as_ref();
        vec![
            self.family.clone(),
            self.p0.to_string(),
            self.s_base.to_string(),
            self.t.to_string(),
            opt(self.k.or(rep.map(|r| r.k))),
            opt(self.ell),
            opt(self.a),
            opt(self.v),
            opt(rep.map(|r| r.q)),
            opt(rep.map(|r| r.n).or(self.n_param)),
            opt(rep.map(|r| r.r)),
            opt(rep.map(|r| r.u)),
            opt(rep.map(|r| r.d)),
            rep.is_some().to_string(),
            self.status.clone(),
            opt(rep.map(|r| r.bandwidth_symbols)),
            opt(rep.map(|r| r.bandwidth_bits.exact.clone())),
            opt(rep.map(|r| r.cutset_symbols.clone())),
            opt(rep.map(|r| r.cutset_bits.exact.clone())),
            opt(rep.map(|r| r.optimal)),
            opt(rep.map(|r| r.trials)),
            opt(rep.map(|r| r.failures)),
            self.detail.clone(),
        ]
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| crate::error::Error::Io(e.to_string());
    w.write_record(SWEEP_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.record()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// A single report as a one-row CSV with the sweep columns.
pub fn report_csv(family: &str, report: &Report, params: (Option<u32>, Option<u32>)) -> Result<String> {
    let row = SweepRow {
        family: family.to_string(),
        p0: report.p0,
        s_base: report.s_base,
        t: report.t as u32,
        k: Some(report.k),
        ell: report.ell,
        a: params.0,
        v: params.1,
        n_param: None,
        status: if report.passed() { "ok".into() } else { "repair-failure".into() },
        report: Some(report.clone()),
        detail: String::new(),
    };
    sweep_csv(&[row])
}
