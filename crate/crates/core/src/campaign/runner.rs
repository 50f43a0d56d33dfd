use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{
    CampaignReport, ConfigRecord, ConfigTiming, ConverseCheck, ConverseRecord, FailureItem, NoiseRecord, Timing,
};
use super::spec::{CampaignSpec, ConfigSpec, HelperPolicy, MessagePolicy};
use super::CampaignError;
use crate::css::{css_constructions, qudits_per_helper, CssCode, CssParams};
use crate::field::{Elem, PrimeField};
use crate::mds::{apply_update, mds_constructions, MdsCode, MdsError};
use crate::oracle::{syndrome_oracles, PreparedOracle, SyndromeOracle};
use crate::protocol::{bandwidth_report, ProtocolError, ProtocolInstance};
use crate::qsim::DEFAULT_CAP;
use crate::registry::Registry;

/// Messages per parallel work unit.
const CHUNK: u64 = 1 << 15;

const DOMAIN_CASES: u64 = 0;
const DOMAIN_NOISE: u64 = 1;

fn keyed_rng(seed: u64, domain: u64, config: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&domain.to_le_bytes());
    key[16..24].copy_from_slice(&config.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Generator for one case, keyed by `(seed, configuration, case)`.
pub fn case_rng(seed: u64, config: usize, case: u64) -> ChaCha8Rng {
    keyed_rng(seed, DOMAIN_CASES, config as u64, case)
}

#[derive(Debug, Clone, Copy)]
enum Messages {
    Exhaustive(u64),
    Random(u64),
}

impl Messages {
    fn count(self) -> u64 {
        match self {
            Messages::Exhaustive(c) | Messages::Random(c) => c,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Messages::Exhaustive(_) => "exhaustive",
            Messages::Random(_) => "random",
        }
    }
}

fn resolve_messages(spec: &CampaignSpec, cfg: &ConfigSpec) -> Result<Messages, CampaignError> {
    let space = (cfg.q as u128).checked_pow(cfg.message_len() as u32).unwrap_or(u128::MAX);
    match spec.policy_for(cfg) {
        MessagePolicy::Exhaustive if space > spec.budget as u128 => {
            Err(CampaignError::Budget { label: cfg.label(), messages: space, budget: spec.budget })
        }
        MessagePolicy::Exhaustive => Ok(Messages::Exhaustive(space as u64)),
        MessagePolicy::Random { count } => Ok(Messages::Random(count)),
        MessagePolicy::Auto { .. } if space <= spec.budget as u128 => Ok(Messages::Exhaustive(space as u64)),
        MessagePolicy::Auto { count } => Ok(Messages::Random(count)),
    }
}

/// `(m, m')` for case `case` of configuration `config`: `m'` is the
/// `msg`-th message of the policy, `m` differs from it in one symbol.
pub fn case_messages(field: PrimeField, b: usize, exhaustive: bool, seed: u64, config: usize, case: u64, msg: u64) -> (Vec<Elem>, Vec<Elem>) {
    let q = field.modulus();
    let mut rng = case_rng(seed, config, case);
    let m_prime: Vec<Elem> = if exhaustive {
        (0..b).scan(msg, |rest, _| {
            let d = (*rest % q as u64) as Elem;
            *rest /= q as u64;
            Some(d)
        })
        .collect()
    } else {
        (0..b).map(|_| rng.random_range(0..q)).collect()
    };
    let j = rng.random_range(0..b);
    let delta = rng.random_range(1..q);
    let m = apply_update(field, &m_prime, j, field.neg(delta));
    (m, m_prime)
}

fn choices(cfg: &ConfigSpec) -> Vec<(Vec<usize>, usize)> {
    match &cfg.helpers {
        HelperPolicy::Fixed { helpers, stale } => vec![(helpers.clone(), *stale)],
        HelperPolicy::All => (0..cfg.n)
            .combinations(cfg.k)
            .flat_map(|h| {
                let stale: Vec<usize> = (0..cfg.n).filter(|s| !h.contains(s)).collect();
                stale.into_iter().map(move |s| (h.clone(), s))
            })
            .collect(),
    }
}

struct Planned {
    index: usize,
    cfg: ConfigSpec,
    mds: MdsCode,
    css: CssCode,
    choices: Vec<(Vec<usize>, usize)>,
}

fn build(
    spec: &CampaignSpec,
    index: usize,
    cfg: &ConfigSpec,
    mds_reg: &Registry<dyn crate::mds::MdsConstruction>,
) -> Result<Planned, CampaignError> {
    let err = |msg: String| CampaignError::Build { label: cfg.label(), msg };
    let construction = mds_reg.get(&cfg.mds).map_err(|e| err(e.to_string()))?;
    if construction.is_negative_fixture() != cfg.negative {
        return Err(err(format!(
            "construction `{}` {} a negative fixture but the configuration says otherwise",
            cfg.mds,
            if cfg.negative { "is not" } else { "is" }
        )));
    }
    if !cfg.negative && cfg.q as usize <= qudits_per_helper(cfg.alpha) * cfg.k {
        return Err(err(format!("q = {} must exceed ceil(alpha/2) k = {}", cfg.q, qudits_per_helper(cfg.alpha) * cfg.k)));
    }
    let mds = construction.build(cfg.n, cfg.k, cfg.alpha, cfg.q).map_err(|e| err(e.to_string()))?;
    let params = CssParams { alpha: cfg.alpha, k: cfg.k, q: cfg.q, seed: spec.seed, param: cfg.css_param };
    let css = css_constructions()
        .get(&cfg.css)
        .map_err(|e| err(e.to_string()))?
        .build(&params)
        .map_err(|e| err(e.to_string()))?;
    let choices = choices(cfg);
    for (h, s) in &choices {
        if h.len() != cfg.k || *s >= cfg.n || h.iter().any(|&x| x >= cfg.n) {
            return Err(err(format!("helpers {h:?} / stale {s} do not fit (n, k) = ({}, {})", cfg.n, cfg.k)));
        }
    }
    Ok(Planned { index, cfg: cfg.clone(), mds, css, choices })
}

fn bind(p: &Planned, helpers: &[usize], stale: usize) -> Result<ProtocolInstance, ProtocolError> {
    ProtocolInstance::bind(p.mds.clone(), p.css.clone(), helpers, stale)
}

struct ChunkResult {
    cases: u64,
    failures: u64,
    items: Vec<FailureItem>,
    max_residual: f64,
}

#[allow(clippy::too_many_arguments)]
fn run_chunk(
    spec: &CampaignSpec,
    p: &Planned,
    inst: &ProtocolInstance,
    oracles: &[&dyn SyndromeOracle],
    choice: usize,
    messages: Messages,
    lo: u64,
    hi: u64,
) -> ChunkResult {
    let field = inst.field();
    let q = field.modulus();
    let b = inst.mds().message_len();
    let exhaustive = matches!(messages, Messages::Exhaustive(_));
    let per_choice = messages.count();
    let (helpers, stale) = &p.choices[choice];
    let mut out = ChunkResult { cases: 0, failures: 0, items: Vec::new(), max_residual: 0.0 };
    let record = |out: &mut ChunkResult, case: u64, msg: u64, detail: String| {
        out.failures += 1;
        if out.items.len() < spec.failure_cap {
            let (m, m_prime) = case_messages(field, b, exhaustive, spec.seed, p.index, case, msg);
            out.items.push(FailureItem {
                config: p.index,
                case,
                seed: spec.seed,
                helpers: helpers.clone(),
                stale: *stale,
                m,
                m_prime,
                detail,
            });
        }
    };
    let mut prepared: Vec<(&'static str, Box<dyn PreparedOracle + '_>)> = Vec::new();
    for o in oracles {
        match o.prepare(inst) {
            Ok(run) => prepared.push((o.name(), run)),
            Err(e) => {
                for msg in lo..hi {
                    record(&mut out, choice as u64 * per_choice + msg, msg, format!("{}: {e}", o.name()));
                }
                out.cases = hi - lo;
                return out;
            }
        }
    }
    let mut m_prime: Vec<Elem> = vec![0; b];
    if exhaustive {
        let mut rest = lo;
        for d in m_prime.iter_mut() {
            *d = (rest % q as u64) as Elem;
            rest /= q as u64;
        }
    }
    for msg in lo..hi {
        let case = choice as u64 * per_choice + msg;
        if exhaustive {
            if msg > lo {
                for d in m_prime.iter_mut() {
                    *d += 1;
                    if *d < q {
                        break;
                    }
                    *d = 0;
                }
            }
        } else {
            let mut rng = case_rng(spec.seed, p.index, case);
            m_prime.iter_mut().for_each(|d| *d = rng.random_range(0..q));
        }
        let mut failed: Vec<String> = Vec::new();
        for (name, run) in prepared.iter_mut() {
            match run.check(&m_prime) {
                Ok(o) => {
                    out.max_residual = out.max_residual.max(o.residual);
                    if !o.pass {
                        failed.push(format!("{name}: mismatch"));
                    }
                }
                Err(e) => failed.push(format!("{name}: {e}")),
            }
        }
        out.cases += 1;
        if !failed.is_empty() {
            record(&mut out, case, msg, failed.join("; "));
        }
    }
    out
}

fn plan_all(spec: &CampaignSpec, include_negative: bool) -> Result<Vec<Planned>, CampaignError> {
    let mds_reg = mds_constructions();
    spec.configurations
        .iter()
        .enumerate()
        .filter(|(_, c)| include_negative || !c.negative)
        .map(|(i, c)| build(spec, i, c, &mds_reg))
        .collect()
}

/// Runs every suite the spec enables. Budget and construction errors are
/// reported before any case runs; individual case failures never abort.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignReport, CampaignError> {
    run(spec, None)
}

/// One `H_X` entry to perturb after binding, for every helper/stale choice of
/// configuration `config`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaultInjection {
    pub config: usize,
    pub row: usize,
    pub col: usize,
    pub delta: Elem,
}

/// [`run_campaign`] with a deliberately corrupted CSS code, for exercising
/// failure reporting.
#[doc(hidden)]
pub fn run_campaign_with_fault(spec: &CampaignSpec, fault: FaultInjection) -> Result<CampaignReport, CampaignError> {
    run(spec, Some(fault))
}

fn run(spec: &CampaignSpec, fault: Option<FaultInjection>) -> Result<CampaignReport, CampaignError> {
    let start = Instant::now();
    let registry = syndrome_oracles();
    let oracles: Vec<&dyn SyndromeOracle> =
        spec.oracle.names().iter().map(|n| registry.get(n).expect("built-in oracle")).collect();
    let mut report = CampaignReport::empty(&spec.name, spec.seed, &spec.oracle.to_string());
    let mut timings = Vec::new();

    if spec.cases {
        let plans = plan_all(spec, false)?;
        let messages = plans
            .iter()
            .map(|p| resolve_messages(spec, &p.cfg))
            .collect::<Result<Vec<_>, _>>()?;
        if spec.oracle != super::OracleChoice::Algebraic {
            for p in &plans {
                let dim = (p.cfg.q as u128).checked_pow((qudits_per_helper(p.cfg.alpha) * p.cfg.k) as u32);
                if dim.is_none_or(|d| d > DEFAULT_CAP as u128) {
                    return Err(CampaignError::Build {
                        label: p.cfg.label(),
                        msg: format!("state dimension exceeds the quantum oracle cap of {DEFAULT_CAP}"),
                    });
                }
            }
        }
        for (p, &msgs) in plans.iter().zip(&messages) {
            let t0 = Instant::now();
            let mut instances = p
                .choices
                .iter()
                .map(|(h, s)| bind(p, h, *s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CampaignError::Build { label: p.cfg.label(), msg: e.to_string() })?;
            if let Some(f) = fault.filter(|f| f.config == p.index) {
                instances.iter_mut().for_each(|i| i.corrupt_h_x_entry(f.row, f.col, f.delta));
            }
            let per_choice = msgs.count();
            let tasks: Vec<(usize, u64, u64)> = (0..p.choices.len())
                .flat_map(|c| (0..per_choice).step_by(CHUNK as usize).map(move |lo| (c, lo, (lo + CHUNK).min(per_choice))))
                .collect();
            let results: Vec<ChunkResult> = tasks
                .par_iter()
                .map(|&(c, lo, hi)| run_chunk(spec, p, &instances[c], &oracles, c, msgs, lo, hi))
                .collect();
            let mut rec = ConfigRecord {
                index: p.index,
                label: p.cfg.label(),
                n: p.cfg.n,
                k: p.cfg.k,
                alpha: p.cfg.alpha,
                q: p.cfg.q,
                mds: p.cfg.mds.clone(),
                css: p.cfg.css.clone(),
                helper_choices: p.choices.len(),
                message_policy: msgs.name().into(),
                messages_per_choice: per_choice,
                cases_run: 0,
                failures: 0,
                max_residual: None,
                bandwidth: bandwidth_report(p.cfg.alpha, p.cfg.k, p.cfg.q),
                failure_items: Vec::new(),
            };
            let mut residual = 0.0f64;
            for r in results {
                rec.cases_run += r.cases;
                rec.failures += r.failures;
                residual = residual.max(r.max_residual);
                rec.failure_items.extend(r.items);
            }
            rec.failure_items.sort_by_key(|f| f.case);
            rec.failure_items.truncate(spec.failure_cap);
            if spec.oracle != super::OracleChoice::Algebraic {
                rec.max_residual = Some(residual);
            }
            let secs = t0.elapsed().as_secs_f64();
            timings.push(ConfigTiming { index: p.index, seconds: secs, cases_per_second: rec.cases_run as f64 / secs.max(1e-9) });
            report.configurations.push(rec);
        }
    }
    if spec.converse {
        report.converse = converse_records(spec)?;
    }
    if let Some(noise) = &spec.noise {
        report.noise = noise_records(&spec.configurations, &noise.p, noise.trials, spec.seed)?;
    }
    report.recount();
    report.timing = Some(Timing { total_seconds: start.elapsed().as_secs_f64(), configurations: timings });
    Ok(report)
}

fn converse_records(spec: &CampaignSpec) -> Result<Vec<ConverseRecord>, CampaignError> {
    let plans = plan_all(spec, true)?;
    let records: Vec<Result<ConverseRecord, CampaignError>> = plans
        .par_iter()
        .map(|p| {
            let mut items = Vec::new();
            for (helpers, stale) in &p.choices {
                match bind(p, helpers, *stale) {
                    Ok(inst) => {
                        for i in 0..helpers.len() {
                            let out = inst
                                .converse_image(i, spec.seed)
                                .map_err(|e| CampaignError::Build { label: p.cfg.label(), msg: e.to_string() })?;
                            items.push(ConverseCheck {
                                helpers: helpers.clone(),
                                stale: *stale,
                                helper: i,
                                subspace_dim: out.subspace_dim,
                                image_size: out.image_size,
                                target: out.target,
                                injective: out.injective,
                                detail: None,
                            });
                        }
                    }
                    // A singular helper stack means the stale share is not a
                    // function of the helpers' data at all.
                    Err(e @ ProtocolError::Mds(MdsError::HelperStackSingular(_))) if p.cfg.negative => {
                        items.push(ConverseCheck {
                            helpers: helpers.clone(),
                            stale: *stale,
                            helper: 0,
                            subspace_dim: 0,
                            image_size: 0,
                            target: (p.cfg.q as u64).pow(p.cfg.alpha as u32),
                            injective: false,
                            detail: Some(e.to_string()),
                        });
                    }
                    Err(e) => return Err(CampaignError::Build { label: p.cfg.label(), msg: e.to_string() }),
                }
            }
            let non_injective = items.iter().filter(|c| !c.injective).count();
            Ok(ConverseRecord {
                config: p.index,
                label: p.cfg.label(),
                negative: p.cfg.negative,
                checks: items.len(),
                non_injective,
                pass: if p.cfg.negative { non_injective > 0 } else { non_injective == 0 },
                items,
            })
        })
        .collect();
    records.into_iter().collect()
}

/// Converse injectivity checks for every (configuration, choice, helper).
pub fn run_converse_suite(spec: &CampaignSpec) -> Result<CampaignReport, CampaignError> {
    let mut report = CampaignReport::empty(&spec.name, spec.seed, "none");
    report.converse = converse_records(spec)?;
    report.recount();
    Ok(report)
}

fn noise_records(configs: &[ConfigSpec], ps: &[f64], trials: u64, seed: u64) -> Result<Vec<NoiseRecord>, CampaignError> {
    if trials == 0 {
        return Err(CampaignError::Config("noise suite needs at least one trial".into()));
    }
    let spec = CampaignSpec { configurations: configs.to_vec(), seed, ..CampaignSpec::default() };
    let plans = plan_all(&spec, false)?;
    let mut out = Vec::new();
    for p in &plans {
        let (helpers, stale) = &p.choices[0];
        let inst = bind(p, helpers, *stale).map_err(|e| CampaignError::Build { label: p.cfg.label(), msg: e.to_string() })?;
        let q = p.cfg.q;
        let b = inst.mds().message_len();
        for (pi, &prob) in ps.iter().enumerate() {
            let mut rng = keyed_rng(seed, DOMAIN_NOISE, p.index as u64, pi as u64);
            let mut successes = 0u64;
            for _ in 0..trials {
                let m_prime: Vec<Elem> = (0..b).map(|_| rng.random_range(0..q)).collect();
                let o = inst
                    .noisy_run(&m_prime, prob, &mut rng)
                    .map_err(|e| CampaignError::Config(format!("{}: {e}", p.cfg.label())))?;
                successes += o.success as u64;
            }
            let expected = prob + (1.0 - prob) / (q as f64).powi(p.cfg.alpha as i32);
            let rate = successes as f64 / trials as f64;
            let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
            out.push(NoiseRecord {
                config: p.index,
                label: p.cfg.label(),
                p: prob,
                trials,
                successes,
                rate,
                expected,
                sigma,
                within_3_sigma: (rate - expected).abs() <= 3.0 * sigma + 1e-12,
            });
        }
    }
    Ok(out)
}

/// Monte-Carlo success rate of rounds on a depolarized shared state, for
/// each configuration (first helper/stale choice) and fidelity `p`.
pub fn run_noise_suite(configs: &[ConfigSpec], ps: &[f64], trials: u64, seed: u64) -> Result<CampaignReport, CampaignError> {
    let mut report = CampaignReport::empty("noise", seed, "algebraic");
    report.noise = noise_records(configs, ps, trials, seed)?;
    report.recount();
    Ok(report)
}
