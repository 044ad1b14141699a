//! Seeded campaign comparing unitary-only control with remote control over
//! random (initial, target) pairs and a sweep of final times.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::qcore::PureState;
use crate::random::haar_state;
use crate::reach::search::SearchConfig;
use crate::reach::trial::{optimize_remote, optimize_unitary, Protocol, TrialResult, TrialSpec, DEFAULT_EPSILON};
use crate::report::fmt_f64;

/// Longest final time of the default sweep.
pub const DEFAULT_T_MAX: f64 = std::f64::consts::PI / 10.0;
pub const DEFAULT_PAIRS: usize = 100;
pub const DEFAULT_SEED: u64 = 42;

/// `T_k = k/n · t_max`, `k = 1..=n`.
pub fn final_time_sweep(n: usize, t_max: f64) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / n as f64 * t_max).collect()
}

pub fn default_final_times() -> Vec<f64> {
    final_time_sweep(10, DEFAULT_T_MAX)
}

/// How the net success probability is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Accounting {
    /// Mean over every pair; unreached pairs contribute 0.
    #[default]
    AllPairs,
    /// Mean over reached pairs only.
    ReachedOnly,
}

impl Accounting {
    pub fn as_str(self) -> &'static str {
        match self {
            Accounting::AllPairs => "all-pairs",
            Accounting::ReachedOnly => "reached-only",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CampaignError {
    #[error("pairs must be at least 1")]
    NoPairs,
    #[error("final times must be nonempty")]
    NoTimes,
    #[error("final time {0} must be positive and finite")]
    BadTime(f64),
    #[error("epsilon must lie in (0,1), got {0}")]
    BadEpsilon(f64),
    #[error("grid must be at least 1")]
    BadGrid,
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub n_pairs: usize,
    pub final_times: Vec<f64>,
    pub epsilon: f64,
    pub master_seed: u64,
    pub search: SearchConfig,
    pub accounting: Accounting,
    /// Worker threads; 0 lets the pool decide.
    pub parallelism: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            n_pairs: DEFAULT_PAIRS,
            final_times: default_final_times(),
            epsilon: DEFAULT_EPSILON,
            master_seed: DEFAULT_SEED,
            search: SearchConfig::default(),
            accounting: Accounting::AllPairs,
            parallelism: 0,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.n_pairs == 0 {
            return Err(CampaignError::NoPairs);
        }
        if self.final_times.is_empty() {
            return Err(CampaignError::NoTimes);
        }
        if let Some(&t) = self.final_times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(CampaignError::BadTime(t));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CampaignError::BadEpsilon(self.epsilon));
        }
        if self.search.grid == 0 {
            return Err(CampaignError::BadGrid);
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(i: u64) -> u64 {
    let mut z = i.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, pair_id: usize) -> u64 {
    master ^ splitmix64(pair_id as u64)
}

/// The `(initial, target)` pair of `pair_id`, drawn from its own stream.
pub fn haar_pair(master: u64, pair_id: usize) -> (PureState<f64>, PureState<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(master, pair_id));
    let initial = haar_state(2, &mut rng);
    let target = haar_state(2, &mut rng);
    (initial, target)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub pair_id: usize,
    pub final_time: f64,
    pub result: TrialResult<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PublishedRow {
    pub reached_mean: f64,
    pub reached_stderr: f64,
    pub net_prob_mean: f64,
    pub net_prob_stderr: f64,
}

/// Published comparison figures, reported next to ours.
pub fn published_row(p: Protocol) -> PublishedRow {
    match p {
        Protocol::Unitary => PublishedRow {
            reached_mean: 2.4,
            reached_stderr: 0.4,
            net_prob_mean: 0.024,
            net_prob_stderr: 0.004,
        },
        Protocol::Remote => PublishedRow {
            reached_mean: 6.6,
            reached_stderr: 0.5,
            net_prob_mean: 0.0345,
            net_prob_stderr: 0.0012,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub protocol: Protocol,
    pub pairs_tested: usize,
    /// Total reached (pair, T) trials.
    pub reached_total: usize,
    /// Mean over final times of the reached count per 100 pairs.
    pub reached_mean: f64,
    pub reached_stderr: f64,
    pub net_prob_mean: f64,
    pub net_prob_stderr: f64,
    pub published: PublishedRow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub pairs: usize,
    pub final_times: Vec<f64>,
    pub epsilon: f64,
    pub seed: u64,
    pub grid: usize,
    pub refine_iterations: usize,
    pub accounting: Accounting,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub rows: Vec<SummaryRow>,
    pub config: ConfigEcho,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    /// Sorted by pair, then final time, then protocol.
    pub records: Vec<TrialRecord>,
    pub summary: CampaignSummary,
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs the campaign on Haar-random pairs derived from the master seed.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignOutcome, CampaignError> {
    cfg.validate()?;
    let pairs: Vec<_> = (0..cfg.n_pairs).map(|i| haar_pair(cfg.master_seed, i)).collect();
    run_campaign_with_pairs(cfg, &pairs)
}

/// Runs the campaign on explicit pairs; `cfg.n_pairs` is ignored.
pub fn run_campaign_with_pairs(
    cfg: &CampaignConfig,
    pairs: &[(PureState<f64>, PureState<f64>)],
) -> Result<CampaignOutcome, CampaignError> {
    let cfg = CampaignConfig {
        n_pairs: pairs.len(),
        ..cfg.clone()
    };
    cfg.validate()?;
    let jobs: Vec<(usize, f64)> = (0..pairs.len())
        .flat_map(|p| cfg.final_times.iter().map(move |&t| (p, t)))
        .collect();
    let run_job = |&(p, t): &(usize, f64)| {
        let spec = TrialSpec {
            initial: pairs[p].0.clone(),
            target: pairs[p].1.clone(),
            final_time: t,
            epsilon: cfg.epsilon,
            seed: trial_seed(cfg.master_seed, p),
        };
        [
            TrialRecord {
                pair_id: p,
                final_time: t,
                result: optimize_unitary(&spec, &cfg.search),
            },
            TrialRecord {
                pair_id: p,
                final_time: t,
                result: optimize_remote(&spec, &cfg.search),
            },
        ]
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| CampaignError::Pool(e.to_string()))?;
    let records: Vec<TrialRecord> = pool
        .install(|| jobs.par_iter().map(run_job).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect();
    let summary = summarize(&cfg, &records);
    Ok(CampaignOutcome { records, summary })
}

fn summarize(cfg: &CampaignConfig, records: &[TrialRecord]) -> CampaignSummary {
    let n = cfg.n_pairs as f64;
    let rows = [Protocol::Unitary, Protocol::Remote]
        .into_iter()
        .map(|proto| {
            let mut reached_per_t = Vec::new();
            let mut net_per_t = Vec::new();
            let mut reached_total = 0;
            for (k, _) in cfg.final_times.iter().enumerate() {
                let at_t: Vec<&TrialResult<f64>> = records
                    .iter()
                    .enumerate()
                    .filter(|(idx, r)| r.result.protocol == proto && (idx / 2) % cfg.final_times.len() == k)
                    .map(|(_, r)| &r.result)
                    .collect();
                let reached = at_t.iter().filter(|r| r.reached).count();
                reached_total += reached;
                reached_per_t.push(reached as f64 * 100.0 / n);
                let net_sum: f64 = at_t.iter().map(|r| r.net_success_probability).sum();
                match cfg.accounting {
                    Accounting::AllPairs => net_per_t.push(net_sum / n),
                    Accounting::ReachedOnly if reached > 0 => net_per_t.push(net_sum / reached as f64),
                    Accounting::ReachedOnly => {}
                }
            }
            let (reached_mean, reached_stderr) = mean_stderr(&reached_per_t);
            let (net_prob_mean, net_prob_stderr) = mean_stderr(&net_per_t);
            SummaryRow {
                protocol: proto,
                pairs_tested: cfg.n_pairs,
                reached_total,
                reached_mean,
                reached_stderr,
                net_prob_mean,
                net_prob_stderr,
                published: published_row(proto),
            }
        })
        .collect();
    CampaignSummary {
        rows,
        config: ConfigEcho {
            pairs: cfg.n_pairs,
            final_times: cfg.final_times.clone(),
            epsilon: cfg.epsilon,
            seed: cfg.master_seed,
            grid: cfg.search.grid,
            refine_iterations: cfg.search.iterations,
            accounting: cfg.accounting,
        },
    }
}

pub const TRIALS_HEADER: &str = "pair_id,T,protocol,reached,best_fidelity,omega,g,branch,branch_prob";

/// Trial table; remote branches are 1-based, unitary rows leave it empty.
pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRIALS_HEADER);
    out.push('\n');
    for r in records {
        let res = &r.result;
        let branch = res.branch.map(|m| (m + 1).to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.pair_id,
            fmt_f64(r.final_time),
            res.protocol.as_str(),
            res.reached,
            fmt_f64(res.best_fidelity),
            fmt_f64(res.best_params.0),
            fmt_f64(res.best_params.1),
            branch,
            fmt_f64(res.branch_probability),
        ));
    }
    out
}

pub fn summary_json(summary: &CampaignSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Plain-text comparison table: our figures and the published ones.
pub fn format_table(summary: &CampaignSummary) -> String {
    let mut out = format!(
        "{:<8} | {:>6} | {:>22} | {:>26} | {:>17} | {:>19}\n",
        "Protocol",
        "Pairs",
        "Target states reached",
        "Net probability of success",
        "Published reached",
        "Published net prob."
    );
    out.push_str(&format!("{}\n", "-".repeat(113)));
    for r in &summary.rows {
        out.push_str(&format!(
            "{:<8} | {:>6} | {:>22} | {:>26} | {:>17} | {:>19}\n",
            r.protocol.as_str(),
            r.pairs_tested,
            format!("{:.2} ± {:.2}", r.reached_mean, r.reached_stderr),
            format!("{:.4} ± {:.4}", r.net_prob_mean, r.net_prob_stderr),
            format!("{} ± {}", r.published.reached_mean, r.published.reached_stderr),
            format!("{} ± {}", r.published.net_prob_mean, r.published.net_prob_stderr),
        ));
    }
    out
}
