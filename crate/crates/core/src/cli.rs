//! Command-line front end. The binary only forwards `argv` to [`run`].
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 hypothesis violation,
//! 3 subspace search exhausted, 4 repair failure.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forge::{build_family_scheme, Family, FamilyParams, SubspacePolicy};
use crate::gf::{Fe, FieldTower};
use crate::grs::GrsCode;
use crate::io::{parse_codeword, SchemeFile};
use crate::rack::{
    build_download_plan, cutset_bound, execute_repair, worst_case_bandwidth, CutSetQuery, Host,
};
use crate::report::{report_csv, round6, sweep_csv, Report, SweepRow};
use crate::runner::{self, HelperPolicy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_NO_SUBSPACE: i32 = 3;
pub const EXIT_REPAIR_FAILURE: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Hypotheses(_) => EXIT_HYPOTHESIS,
        Error::NoAdmissibleSubspace { .. } => EXIT_NO_SUBSPACE,
        Error::NotACodeword | Error::PlanMismatch(_) | Error::InvalidHelper(_) => EXIT_REPAIR_FAILURE,
        _ => EXIT_USAGE,
    }
}

#[derive(Parser, Debug)]
#[command(name = "rack-repair", version, about = "Rack-aware Reed-Solomon repair schemes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a field summary.
    Ff(FfArgs),
    #[command(subcommand)]
    Scheme(SchemeCmd),
    #[command(subcommand)]
    Repair(RepairCmd),
    /// Print the rack-aware cut-set bound.
    Cutset(CutsetArgs),
    /// Evaluate a parameter grid and emit one CSV row per point.
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
pub enum SchemeCmd {
    /// Construct a scheme and write it as JSON.
    Build(Settings),
}

#[derive(Subcommand, Debug)]
pub enum RepairCmd {
    /// Repair trials on a scheme file.
    Run(RunArgs),
    /// Repair every node position of a family instance.
    Exhaustive(Settings),
}

#[derive(Args, Debug)]
pub struct FfArgs {
    #[arg(long)]
    pub p0: u32,
    #[arg(long)]
    pub t: u32,
    /// Monic modulus coefficients, low degree first, comma separated.
    #[arg(long)]
    pub modulus: Option<String>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub scheme: PathBuf,
    /// Repair this codeword file (plain RS code on the scheme's points).
    #[arg(long)]
    pub codeword: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Args, Debug)]
pub struct CutsetArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub d: u64,
    #[arg(long)]
    pub q: u64,
    /// Order of the base field.
    #[arg(long)]
    pub base: u64,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Grid description (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
}

/// Flags shared by the experiment commands; a `--config` JSON file with the
/// same keys supplies defaults that explicit flags override.
#[derive(Args, Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub p0: Option<u32>,
    #[arg(long)]
    pub base_degree: Option<u32>,
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub ell: Option<u32>,
    #[arg(long)]
    pub a: Option<u32>,
    #[arg(long)]
    pub v: Option<u32>,
    /// Code length (two-coset family).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub host_rack: Option<usize>,
    #[arg(long)]
    pub host_node: Option<usize>,
    /// auto | subfield | search | explicit:<e1,e2,...> (packed elements)
    #[arg(long)]
    pub subspace: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// all | exhaustive | random
    #[arg(long)]
    pub helpers: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// json | csv
    #[arg(long)]
    pub format: Option<String>,
    /// Add wall-clock `duration_ms` to the report.
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Settings {
    /// Fields of `self` win over `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            family: self.family.or(base.family),
            p0: self.p0.or(base.p0),
            base_degree: self.base_degree.or(base.base_degree),
            t: self.t.or(base.t),
            k: self.k.or(base.k),
            ell: self.ell.or(base.ell),
            a: self.a.or(base.a),
            v: self.v.or(base.v),
            n: self.n.or(base.n),
            host_rack: self.host_rack.or(base.host_rack),
            host_node: self.host_node.or(base.host_node),
            subspace: self.subspace.or(base.subspace),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            helpers: self.helpers.or(base.helpers),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            timing: self.timing || base.timing,
            config: None,
        }
    }

    pub fn load(self) -> Result<Settings> {
        match &self.config {
            Some(path) => {
                let base: Settings = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                Ok(self.over(base))
            }
            None => Ok(self),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

pub fn parse_subspace(s: &str) -> Result<SubspacePolicy> {
    let list = |body: &str| -> Result<SubspacePolicy> {
        let v = body
            .split(',')
            .map(|x| x.trim().parse::<u32>().map(Fe).map_err(|_| Error::Parse(format!("bad basis element {x:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubspacePolicy::Explicit(v))
    };
    match s {
        "auto" => Ok(SubspacePolicy::Auto),
        "subfield" => Ok(SubspacePolicy::Subfield),
        "search" => Ok(SubspacePolicy::Search),
        other => match other.strip_prefix("explicit:") {
            Some(body) => list(body),
            None => Err(Error::Parse(format!("unknown subspace policy {other:?}"))),
        },
    }
}

/// Resolved experiment description.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub params: FamilyParams,
    pub subspace: SubspacePolicy,
    pub trials: usize,
    pub helpers: HelperPolicy,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: usize = 100;

impl ExperimentConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let missing = |name: &str| Error::Parse(format!("missing --{name}"));
        let family = Family::parse(s.family.as_deref().ok_or_else(|| missing("family"))?)?;
        let params = FamilyParams {
            family,
            p0: s.p0.unwrap_or(2),
            s_base: s.base_degree.unwrap_or(1),
            t: s.t.ok_or_else(|| missing("t"))?,
            k: s.k.ok_or_else(|| missing("k"))?,
            ell: s.ell,
            a: s.a,
            v: s.v,
            n: s.n,
            host: Host::new(s.host_rack.unwrap_or(0), s.host_node.unwrap_or(0)),
        };
        Self::with_params(params, s)
    }

    fn with_params(params: FamilyParams, s: &Settings) -> Result<Self> {
        let trials = s.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(Error::Parse("trials must be >= 1".into()));
        }
        Ok(ExperimentConfig {
            params,
            subspace: parse_subspace(s.subspace.as_deref().unwrap_or("auto"))?,
            trials,
            helpers: HelperPolicy::parse(s.helpers.as_deref().unwrap_or("all"))?,
            seed: s.seed.unwrap_or(DEFAULT_SEED),
            out: s.out.clone(),
            format: Format::parse(s.format.as_deref().unwrap_or("json"))?,
            timing: s.timing,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }
}

/// Failure document printed for exit codes 2 and 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    pub status: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub best_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tried: Option<usize>,
    pub message: String,
}

fn failure(err: &Error) -> Outcome {
    let code = exit_code(err);
    let mut stdout = String::new();
    let doc = match err {
        Error::Hypotheses(v) => Some(FailureReport {
            status: "hypothesis-violation".into(),
            violations: v.clone(),
            best_degree: None,
            bound: None,
            tried: None,
            message: err.to_string(),
        }),
        Error::NoAdmissibleSubspace { best_degree, bound, tried } => Some(FailureReport {
            status: "no-admissible-subspace".into(),
            violations: Vec::new(),
            best_degree: *best_degree,
            bound: Some(*bound),
            tried: Some(*tried),
            message: err.to_string(),
        }),
        _ => None,
    };
    if let Some(doc) = doc {
        stdout = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
    }
    Outcome { code, stdout, stderr: format!("error: {err}\n") }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome::ok(text)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => out,
        Err(e) => failure(&e),
    }
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Ff(a) => {
            let modulus = a
                .modulus
                .map(|m| {
                    m.split(',')
                        .map(|c| c.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad modulus {m:?}"))))
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            Ok(Outcome::ok(cmd_ff_info(a.p0, a.t, modulus.as_deref())?))
        }
        Command::Scheme(SchemeCmd::Build(s)) => {
            let cfg = ExperimentConfig::from_settings(&s.load()?)?;
            let (_, report) = cmd_scheme_build(&cfg)?;
            Ok(Outcome::ok(report.to_json()? + "\n"))
        }
        Command::Repair(RepairCmd::Run(a)) => {
            let settings = a.settings.load()?;
            match &a.codeword {
                Some(path) => cmd_repair_codeword(&a.scheme, path),
                None => {
                    let report = cmd_repair_run(&a.scheme, &settings)?;
                    let fmt = Format::parse(settings.format.as_deref().unwrap_or("json"))?;
                    finish_report(report, fmt, settings.out.as_deref())
                }
            }
        }
        Command::Repair(RepairCmd::Exhaustive(s)) => {
            let cfg = ExperimentConfig::from_settings(&s.load()?)?;
            let report = cmd_repair_exhaustive(&cfg)?;
            finish_report(report, cfg.format, cfg.out.as_deref())
        }
        Command::Cutset(a) => Ok(Outcome::ok(cmd_cutset(&CutSetQuery {
            n: a.n,
            k: a.k,
            r: a.r,
            d: a.d,
            q: a.q,
            base_order: a.base,
        })?)),
        Command::Sweep(a) => {
            let grid: SweepGrid = serde_json::from_str(&std::fs::read_to_string(&a.config)?)?;
            let rows = cmd_sweep(&grid)?;
            let text = match Format::parse(a.format.as_deref().unwrap_or("csv"))? {
                Format::Csv => sweep_csv(&rows)?,
                Format::Json => {
                    let reports: Vec<_> = rows.iter().map(SweepJson::from).collect();
                    serde_json::to_string_pretty(&reports)? + "\n"
                }
            };
            if let Some(out) = &a.out {
                std::fs::write(out, &text)?;
            }
            Ok(Outcome::ok(text))
        }
    }
}

fn finish_report(report: Report, format: Format, out: Option<&Path>) -> Result<Outcome> {
    let text = match format {
        Format::Json => report.to_json()? + "\n",
        Format::Csv => report_csv(&report.family, &report, (None, None))?,
    };
    if let Some(out) = out {
        std::fs::write(out, &text)?;
    }
    let code = if report.passed() { EXIT_OK } else { EXIT_REPAIR_FAILURE };
    let stderr = if report.passed() {
        String::new()
    } else {
        format!("error: {} of {} repairs failed\n", report.failures, report.trials)
    };
    Ok(Outcome { code, stdout: text, stderr })
}

fn poly_text(coeffs: &[u32]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            }
        })
        .collect();
    terms.join(" + ")
}

pub fn cmd_ff_info(p0: u32, t: u32, modulus: Option<&[u32]>) -> Result<String> {
    let tw = FieldTower::new(p0, t, modulus)?;
    let mut out = String::new();
    out.push_str(&format!("field F_{} = F_{}^{}\n", tw.order(), p0, t));
    if t == 1 {
        out.push_str("prime field\n");
    }
    out.push_str(&format!("modulus {}\n", poly_text(tw.modulus())));
    out.push_str(&format!("descriptor {}\n", tw.descriptor()));
    let g = tw.primitive();
    out.push_str(&format!("primitive element {} (order {})\n", tw.format_element(g), tw.order() - 1));
    let subs: Vec<String> = crate::gf::divisors(t)
        .into_iter()
        .map(|d| format!("F_{}^{} (order {})", p0, d, (p0 as u64).pow(d)))
        .collect();
    out.push_str(&format!("subfields {}\n", subs.join(", ")));
    Ok(out)
}

/// Builds the scheme, writes it to `cfg.out` when set, and reports its
/// worst-case bandwidth against the cut-set bound.
pub fn cmd_scheme_build(cfg: &ExperimentConfig) -> Result<(SchemeFile, Report)> {
    let start = Instant::now();
    let built = build_family_scheme(&cfg.params, &cfg.subspace, cfg.seed)?;
    let basis = built.subspace.as_ref().map(|v| v.basis.clone());
    let file = SchemeFile::from_scheme(&built.scheme, Some(cfg.params.clone()), basis.clone());
    if let Some(out) = &cfg.out {
        file.write(out)?;
    }
    let prof = worst_case_bandwidth(&built.scheme);
    let mut report = Report::new(cfg.params.family.name(), &built.scheme, cfg.params.ell, prof.symbols, basis)?;
    if cfg.timing {
        report.duration_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok((file, report))
}

pub fn cmd_repair_run(scheme_path: &Path, settings: &Settings) -> Result<Report> {
    let start = Instant::now();
    let file = SchemeFile::read(scheme_path)?;
    let scheme = file.to_scheme()?;
    let trials = settings.trials.unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(Error::Parse("trials must be >= 1".into()));
    }
    let seed = settings.seed.unwrap_or(DEFAULT_SEED);
    let helpers = HelperPolicy::parse(settings.helpers.as_deref().unwrap_or("all"))?;
    let summary = runner::run_trials(&scheme, trials, seed, helpers)?;
    let prof = worst_case_bandwidth(&scheme);
    let family = file.family.as_ref().map_or("custom", |p| p.family.name());
    let ell = file.family.as_ref().and_then(|p| p.ell);
    let mut report = Report::new(family, &scheme, ell, prof.symbols, file.subspace_basis.clone())?;
    report.trials = summary.trials;
    report.failures = summary.failures;
    if settings.timing {
        report.duration_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
struct CodewordRepair {
    host: Host,
    recovered: String,
    cross_rack_symbols: usize,
    intra_rack_symbols: usize,
    traces: Vec<String>,
}

fn cmd_repair_codeword(scheme_path: &Path, word_path: &Path) -> Result<Outcome> {
    let scheme = SchemeFile::read(scheme_path)?.to_scheme()?;
    let (tw, mut word) = parse_codeword(&std::fs::read_to_string(word_path)?)?;
    if tw != **scheme.tower() {
        return Err(Error::MixedTowers);
    }
    let host = scheme.host();
    let pos = scheme.layout().position(host.rack, host.node);
    word.erase(pos);
    let code = GrsCode::reed_solomon(Arc::clone(scheme.tower()), scheme.layout().points(), scheme.k())?;
    let helpers: Vec<usize> = (0..scheme.layout().r()).filter(|&i| i != host.rack).take(scheme.d()).collect();
    let plan = build_download_plan(&scheme, &helpers)?;
    let tr = execute_repair(&plan, &code, &word)?;
    let doc = CodewordRepair {
        host,
        recovered: tw.format_element(tr.recovered),
        cross_rack_symbols: tr.cross_rack_symbols,
        intra_rack_symbols: tr.intra_rack_symbols,
        traces: tr.traces.iter().map(|&x| tw.format_element(x)).collect(),
    };
    Ok(Outcome::ok(serde_json::to_string_pretty(&doc)? + "\n"))
}

pub fn cmd_repair_exhaustive(cfg: &ExperimentConfig) -> Result<Report> {
    let start = Instant::now();
    let out = runner::repair_exhaustive(&cfg.params, &cfg.subspace, cfg.trials, cfg.seed, cfg.helpers)?;
    let first = &out.schemes[0];
    let basis = first.subspace.as_ref().map(|v| v.basis.clone());
    let mut report = Report::new(cfg.params.family.name(), &first.scheme, cfg.params.ell, out.bandwidth_symbols, basis)?;
    report.trials = out.summary.trials;
    report.failures = out.summary.failures;
    if cfg.timing {
        report.duration_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

pub fn cmd_cutset(qy: &CutSetQuery) -> Result<String> {
    let b = cutset_bound(qy)?;
    Ok(format!(
        "m = {}\nt = {}\nbound = {} symbols over F_{}\nbits = {} ({:.6})\n",
        b.m,
        b.t,
        b.symbols,
        qy.base_order,
        b.bits.exact(),
        round6(b.bits.approx())
    ))
}

fn one() -> Vec<u32> {
    vec![1]
}

fn two() -> Vec<u32> {
    vec![2]
}

/// Parameter grid; empty optional lists mean "unset" (k is then derived).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub family: Vec<Family>,
    #[serde(default = "two")]
    pub p0: Vec<u32>,
    #[serde(default = "one")]
    pub base_degree: Vec<u32>,
    pub t: Vec<u32>,
    pub ell: Vec<u32>,
    pub a: Vec<u32>,
    pub v: Vec<u32>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    /// Repair trials per feasible point.
    pub trials: usize,
    pub seed: Option<u64>,
    pub subspace: Option<String>,
}

fn or_none<T: Copy>(v: &[T]) -> Vec<Option<T>> {
    if v.is_empty() {
        vec![None]
    } else {
        v.iter().copied().map(Some).collect()
    }
}

/// Smallest `k >= 1` with `r - floor(k/u) = t/(t - ell)` for the descent families.
pub fn auto_k(family: Family, p: u64, t: u32, ell: Option<u32>, a: Option<u32>, v: Option<u32>) -> Option<usize> {
    let ell = ell?;
    if ell >= t || !t.is_multiple_of(t - ell) {
        return None;
    }
    let q = p.checked_pow(t)?;
    let (r, u) = match family {
        Family::Additive => (p * p, q / (p * p)),
        Family::Multiplicative => {
            let r = p.checked_pow(a?)?.checked_sub(1).filter(|&r| r > 0)?;
            (r, (q - 1) / r)
        }
        Family::Combined => {
            let w = q / p.checked_pow(a?)?;
            let u = v? as u64 * w;
            if u == 0 {
                return None;
            }
            ((q - w) / u, u)
        }
        _ => return None,
    };
    let m = r.checked_sub((t / (t - ell)) as u64)?;
    Some((m * u).max(1) as usize)
}

pub fn cmd_sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    let seed = grid.seed.unwrap_or(DEFAULT_SEED);
    let policy = parse_subspace(grid.subspace.as_deref().unwrap_or("auto"))?;
    let mut points = Vec::new();
    for &family in &grid.family {
        for &p0 in &grid.p0 {
            for &s in &grid.base_degree {
                for &t in &grid.t {
                    for ell in or_none(&grid.ell) {
                        for a in or_none(&grid.a) {
                            for v in or_none(&grid.v) {
                                for n in or_none(&grid.n) {
                                    for k in or_none(&grid.k) {
                                        points.push((family, p0, s, t, ell, a, v, n, k));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(family, p0, s, t, ell, a, v, n, k)| {
            let mut row = SweepRow {
                family: family.name().to_string(),
                p0,
                s_base: s,
                t,
                k,
                ell,
                a,
                v,
                n_param: n,
                ..SweepRow::default()
            };
            let p = (p0 as u64).checked_pow(s);
            let k = k.or_else(|| p.and_then(|p| auto_k(family, p, t, ell, a, v)));
            let Some(k) = k else {
                row.status = "hypothesis-violation".into();
                row.detail = "no k satisfies r - m = t/(t-ell)".into();
                return row;
            };
            row.k = Some(k);
            let params = FamilyParams { family, p0, s_base: s, t, k, ell, a, v, n, host: Host::new(0, 0) };
            match evaluate_point(&params, &policy, grid.trials, seed) {
                Ok(report) => {
                    row.status = if report.passed() { "ok".into() } else { "repair-failure".into() };
                    row.report = Some(report);
                }
                Err(e) => {
                    row.status = match exit_code(&e) {
                        EXIT_HYPOTHESIS => "hypothesis-violation",
                        EXIT_NO_SUBSPACE => "no-admissible-subspace",
                        _ => "error",
                    }
                    .into();
                    row.detail = match &e {
                        Error::Hypotheses(v) => v.join("; "),
                        other => other.to_string(),
                    };
                }
            }
            row
        })
        .collect();
    Ok(rows)
}

fn evaluate_point(params: &FamilyParams, policy: &SubspacePolicy, trials: usize, seed: u64) -> Result<Report> {
    let built = build_family_scheme(params, policy, seed)?;
    let prof = worst_case_bandwidth(&built.scheme);
    let basis = built.subspace.as_ref().map(|v| v.basis.clone());
    let mut report = Report::new(params.family.name(), &built.scheme, params.ell, prof.symbols, basis)?;
    if trials > 0 {
        let s = runner::run_trials(&built.scheme, trials, seed, HelperPolicy::All)?;
        report.trials = s.trials;
        report.failures = s.failures;
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
struct SweepJson {
    family: String,
    p0: u32,
    s_base: u32,
    t: u32,
    k: Option<usize>,
    ell: Option<u32>,
    a: Option<u32>,
    v: Option<u32>,
    status: String,
    detail: String,
    report: Option<Report>,
}

impl From<&SweepRow> for SweepJson {
    fn from(r: &SweepRow) -> Self {
        SweepJson {
            family: r.family.clone(),
            p0: r.p0,
            s_base: r.s_base,
            t: r.t,
            k: r.k,
            ell: r.ell,
            a: r.a,
            v: r.v,
            status: r.status.clone(),
            detail: r.detail.clone(),
            report: r.report.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ff_summary() {
        let out = run(["rack-repair", "ff", "--p0", "2", "--t", "4"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("modulus x^4 + x + 1"));
        assert!(out.stdout.contains("subfields F_2^1 (order 2), F_2^2 (order 4), F_2^4 (order 16)"));
        assert!(run(["rack-repair", "ff", "--p0", "2", "--t", "1"]).stdout.contains("prime field"));
        assert_eq!(run(["rack-repair", "ff", "--p0", "4", "--t", "2"]).code, EXIT_USAGE);
    }

    #[test]
    fn cutset_examples() {
        let out = run(["rack-repair", "cutset", "--n", "64", "--k", "32", "--r", "4", "--d", "3", "--q", "64", "--base", "2"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("bound = 9 symbols over F_2"));
        assert!(out.stdout.contains("bits = 9 (9.000000)"));
        let out = run(["rack-repair", "cutset", "--n", "63", "--k", "36", "--r", "7", "--d", "6", "--q", "64", "--base", "2"]);
        assert!(out.stdout.contains("bound = 12 symbols"));
    }

    #[test]
    fn hypothesis_exit_code() {
        let out = run([
            "rack-repair", "scheme", "build", "--family", "additive", "--t", "5", "--ell", "3", "--k", "32",
        ]);
        assert_eq!(out.code, EXIT_HYPOTHESIS);
        assert!(out.stdout.contains("not even"));
    }

    #[test]
    fn no_subspace_exit_code() {
        let out = run(["rack-repair", "scheme", "build", "--family", "additive", "--t", "4", "--ell", "2", "--k", "8"]);
        assert_eq!(out.code, EXIT_NO_SUBSPACE, "{}", out.stderr);
        let doc: FailureReport = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(doc.best_degree, Some(12));
        assert_eq!(doc.bound, Some(7));
    }

    #[test]
    fn auto_k_values() {
        assert_eq!(auto_k(Family::Additive, 2, 6, Some(3), None, None), Some(32));
        assert_eq!(auto_k(Family::Additive, 2, 4, Some(2), None, None), Some(8));
        assert_eq!(auto_k(Family::Additive, 2, 4, Some(3), None, None), Some(1));
        assert_eq!(auto_k(Family::Additive, 2, 6, Some(2), None, None), None);
        assert_eq!(auto_k(Family::Multiplicative, 2, 6, Some(4), Some(3), None), Some(36));
        assert_eq!(auto_k(Family::Combined, 3, 6, Some(4), Some(2), Some(2)), Some(162));
    }

    #[test]
    fn settings_merge() {
        let base = Settings { t: Some(6), k: Some(1), seed: Some(7), ..Settings::default() };
        let flags = Settings { k: Some(32), ..Settings::default() };
        let m = flags.over(base);
        assert_eq!((m.t, m.k, m.seed), (Some(6), Some(32), Some(7)));
        let json = r#"{"family":"additive","t":6,"ell":3,"k":32,"seed":5}"#;
        let s: Settings = serde_json::from_str(json).unwrap();
        let cfg = ExperimentConfig::from_settings(&s).unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.trials, DEFAULT_TRIALS);
        assert!(serde_json::from_str::<Settings>(r#"{"tee":6}"#).is_err());
        let zero = Settings { trials: Some(0), ..s };
        assert!(ExperimentConfig::from_settings(&zero).is_err());
    }
}
