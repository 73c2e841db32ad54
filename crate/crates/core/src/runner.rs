//! Repair experiments: seeded trials against ground truth and the
//! interpolation oracle.
//!
//! Trial `i` draws from `ChaCha8Rng` seeded with the run seed on stream `i`,
//! so results do not depend on scheduling. Column multipliers come from the
//! last stream.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forge::{build_family_scheme, BuiltScheme, FamilyParams, SubspacePolicy};
use crate::gf::{Fe, FieldTower};
use crate::grs::GrsCode;
use crate::poly::Poly;
use crate::rack::{
    build_download_plan, combinations, execute_repair, helper_sets, worst_case_bandwidth, Host, RepairScheme,
};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HelperPolicy {
    /// Every `d`-subset when there are at most 64, else 50 seeded subsets.
    #[default]
    All,
    Exhaustive,
    Random,
}

impl HelperPolicy {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(HelperPolicy::All),
            "exhaustive" => Ok(HelperPolicy::Exhaustive),
            "random" => Ok(HelperPolicy::Random),
            other => Err(Error::Parse(format!("unknown helper policy {other:?}"))),
        }
    }

    pub fn sets(self, r: usize, host_rack: usize, d: usize, seed: u64) -> Vec<Vec<usize>> {
        let others: Vec<usize> = (0..r).filter(|&i| i != host_rack).collect();
        match self {
            HelperPolicy::All => helper_sets(r, host_rack, d, seed),
            HelperPolicy::Exhaustive => combinations(&others, d),
            HelperPolicy::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..50)
                    .map(|_| {
                        let mut pick = rand::seq::index::sample(&mut rng, others.len(), d)
                            .into_iter()
                            .map(|i| others[i])
                            .collect::<Vec<_>>();
                        pick.sort_unstable();
                        pick
                    })
                    .collect()
            }
        }
    }
}

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_element(rng: &mut impl Rng, tw: &FieldTower) -> Fe {
    Fe(rng.gen_range(0..tw.order()))
}

pub fn random_nonzero(rng: &mut impl Rng, tw: &FieldTower) -> Fe {
    Fe(rng.gen_range(1..tw.order()))
}

/// GRS code on the scheme's layout with seeded nonzero column multipliers.
pub fn code_for(scheme: &RepairScheme, seed: u64) -> Result<GrsCode> {
    let tw = scheme.tower();
    let mut rng = trial_rng(seed, u64::MAX);
    let points = scheme.layout().points();
    let mults = points.iter().map(|_| random_nonzero(&mut rng, tw)).collect();
    GrsCode::new(tw.clone(), points, mults, scheme.k())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub failures: usize,
    /// Largest cross-rack download seen in any trial.
    pub max_symbols: usize,
    /// Trials whose transcript disagreed with the independent span count.
    pub accounting_mismatches: usize,
    pub oracle_mismatches: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct TrialResult {
    ok: bool,
    symbols: usize,
    accounting_ok: bool,
    oracle_ok: bool,
}

fn one_trial(
    scheme: &RepairScheme,
    code: &GrsCode,
    helpers: &[usize],
    rng: &mut ChaCha8Rng,
    spans: &[Option<usize>],
) -> Result<TrialResult> {
    let tw = scheme.tower();
    let message = Poly::new((0..scheme.k()).map(|_| random_element(rng, tw)).collect());
    let truth = code.encode(&message)?;
    let host = scheme.host();
    let pos = scheme.layout().position(host.rack, host.node);
    let mut damaged = truth.clone().with_erasures([pos]);
    damaged.symbols[pos] = Fe::ZERO;

    let plan = build_download_plan(scheme, helpers)?;
    let transcript = execute_repair(&plan, code, &damaged)?;
    let expected: usize = helpers.iter().map(|&i| spans[i].unwrap_or(0)).sum();

    let survivors: Vec<usize> = (0..code.n()).filter(|&i| i != pos).collect();
    let naive = code.naive_recover(&damaged, &survivors)?;
    let oracle_ok = naive.symbols[pos] == transcript.recovered;
    let ok = transcript.recovered == truth.symbols[pos] && oracle_ok;
    Ok(TrialResult {
        ok,
        symbols: transcript.cross_rack_symbols,
        accounting_ok: transcript.cross_rack_symbols == expected,
        oracle_ok,
    })
}

/// Runs `trials` seeded repairs of the scheme's host node, cycling through
/// the helper sets of `policy`.
pub fn run_trials(scheme: &RepairScheme, trials: usize, seed: u64, policy: HelperPolicy) -> Result<TrialSummary> {
    let code = code_for(scheme, seed)?;
    run_trials_on(scheme, &code, trials, seed, policy)
}

pub fn run_trials_on(
    scheme: &RepairScheme,
    code: &GrsCode,
    trials: usize,
    seed: u64,
    policy: HelperPolicy,
) -> Result<TrialSummary> {
    let sets = policy.sets(scheme.layout().r(), scheme.host().rack, scheme.d(), seed);
    if sets.is_empty() {
        return Err(Error::InsufficientHelpers { needed: scheme.d(), got: 0 });
    }
    let spans = scheme.rack_span_dims();
    let results = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            one_trial(scheme, code, &sets[i % sets.len()], &mut rng, &spans)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialSummary {
        trials,
        failures: results.iter().filter(|r| !r.ok || !r.accounting_ok).count(),
        max_symbols: results.iter().map(|r| r.symbols).max().unwrap_or(0),
        accounting_mismatches: results.iter().filter(|r| !r.accounting_ok).count(),
        oracle_mismatches: results.iter().filter(|r| !r.oracle_ok).count(),
    })
}

/// Outcome of repairing every node position of a family instance.
#[derive(Clone, Debug)]
pub struct ExhaustiveOutcome {
    /// One scheme per host rack (per node for the standard-model families).
    pub schemes: Vec<BuiltScheme>,
    pub summary: TrialSummary,
    /// Worst-case bandwidth over all positions.
    pub bandwidth_symbols: usize,
    pub positions: usize,
}

/// Builds a scheme for every failure position and runs `words` trials at each.
/// The descent-family polynomials depend only on the host rack, so each rack
/// is constructed once and reused for its `u` nodes.
pub fn repair_exhaustive(
    params: &FamilyParams,
    policy: &SubspacePolicy,
    words: usize,
    seed: u64,
    helpers: HelperPolicy,
) -> Result<ExhaustiveOutcome> {
    let derived = crate::forge::validate_family_params(&FamilyParams { host: Host::new(0, 0), ..params.clone() })?;
    let (r, u) = (derived.r as usize, derived.u as usize);
    let schemes = (0..r)
        .map(|rack| build_family_scheme(&FamilyParams { host: Host::new(rack, 0), ..params.clone() }, policy, seed))
        .collect::<Result<Vec<_>>>()?;
    let code = code_for(&schemes[0].scheme, seed)?;
    let jobs: Vec<(usize, usize)> = (0..r).flat_map(|i| (0..u).map(move |j| (i, j))).collect();
    let results = jobs
        .par_iter()
        .map(|&(rack, node)| {
            let base = &schemes[rack].scheme;
            let scheme = base.with_host(Host::new(rack, node))?;
            let pos_seed = seed ^ ((rack * u + node) as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            let prof = worst_case_bandwidth(&scheme);
            let s = run_trials_on(&scheme, &code, words, pos_seed, helpers)?;
            Ok((s, prof.symbols))
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = TrialSummary {
        trials: results.iter().map(|(s, _)| s.trials).sum(),
        failures: results.iter().map(|(s, _)| s.failures).sum(),
        max_symbols: results.iter().map(|(s, _)| s.max_symbols).max().unwrap_or(0),
        accounting_mismatches: results.iter().map(|(s, _)| s.accounting_mismatches).sum(),
        oracle_mismatches: results.iter().map(|(s, _)| s.oracle_mismatches).sum(),
    };
    Ok(ExhaustiveOutcome {
        bandwidth_symbols: results.iter().map(|(_, b)| *b).max().unwrap_or(0),
        schemes,
        summary,
        positions: jobs.len(),
    })
}

pub fn shared_tower(p0: u32, degree: u32) -> Result<Arc<FieldTower>> {
    Ok(Arc::new(FieldTower::new(p0, degree, None)?))
}
