//! Evaluation against ground truth (coverage, normalized consensus error,
//! recovery distance), the mean-rank baseline, and the repetition harness
//! behind the comparison tables.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{apply_noise_swaps, gen_rank_consistency, gen_top_rank, GroundTruth, RankingDataset};
use crate::error::{Error, Result};
use crate::perm::rank_vector;
use crate::postprocess::{default_hps_k, posterior_point_estimates, selection_frequencies, DrawAccumulator, PosteriorSummary};
use crate::sampler::{run_chain, SamplerConfig};
use crate::seed::derive_seed;

/// Scores of one fitted selection against the truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_corr: usize,
    /// `n_corr / n*`.
    pub coverage: f64,
    /// Footrule between the consensus rankings on the correctly selected
    /// items, divided by `n_corr`; infinite when no item is correct.
    pub d_norm: f64,
    /// Kendall distance on the correctly selected items plus the
    /// wrong-selection penalty `(n* - n_corr)(n + n* + 1)/2`.
    pub d_r: f64,
    pub wall_time_sec: f64,
}

/// Proportion of correctly selected items; both sets must have size `n*`.
pub fn coverage(true_set: &crate::perm::ItemSet, est_set: &crate::perm::ItemSet) -> Result<f64> {
    if true_set.len() != est_set.len() {
        return Err(Error::DimensionMismatch {
            expected: true_set.len(),
            got: est_set.len(),
        });
    }
    let n_corr = intersection(true_set, est_set).len();
    Ok(n_corr as f64 / true_set.len() as f64)
}

fn intersection(a: &crate::perm::ItemSet, b: &crate::perm::ItemSet) -> Vec<usize> {
    a.members()
        .iter()
        .copied()
        .filter(|&i| b.contains(i))
        .collect()
}

/// Consensus ranks of the given items inside a summary-style pair
/// (`members` ascending, `ranks` aligned).
fn ranks_of(items: &[usize], members: &[usize], ranks: &[u32]) -> Vec<u32> {
    items
        .iter()
        .map(|&item| {
            let pos = members.binary_search(&item).expect("item in member list");
            ranks[pos]
        })
        .collect()
}

/// Footrule between the true and estimated consensus on the intersection
/// items, each contributing the gap between its two ranks, divided by
/// `n_corr`; infinity when the intersection is empty.
pub fn d_norm(gt: &GroundTruth, est: &PosteriorSummary) -> f64 {
    let common = intersection(&gt.true_set, &est.a_hat);
    if common.is_empty() {
        return f64::INFINITY;
    }
    let true_ranks = ranks_of(&common, gt.true_set.members(), gt.true_consensus.ranks());
    let est_ranks = ranks_of(&common, est.a_hat.members(), est.rho_hat.ranks());
    let total: u64 = true_ranks
        .iter()
        .zip(&est_ranks)
        .map(|(&a, &b)| (i64::from(a) - i64::from(b)).unsigned_abs())
        .sum();
    total as f64 / common.len() as f64
}

/// Kendall distance between the consensus rankings on the intersection
/// items (order comparisons use each item's rank within its own consensus)
/// plus `(n* - n_corr)(n + n* + 1)/2` for the wrongly selected items.
pub fn recovery_distance(gt: &GroundTruth, est: &PosteriorSummary, n: usize) -> f64 {
    let n_star = gt.true_set.len();
    let common = intersection(&gt.true_set, &est.a_hat);
    let true_ranks = ranks_of(&common, gt.true_set.members(), gt.true_consensus.ranks());
    let est_ranks = ranks_of(&common, est.a_hat.members(), est.rho_hat.ranks());
    let mut discordant = 0u64;
    for i in 0..common.len() {
        for j in i + 1..common.len() {
            if (true_ranks[i] < true_ranks[j]) != (est_ranks[i] < est_ranks[j]) {
                discordant += 1;
            }
        }
    }
    let wrong = (n_star - common.len()) as f64;
    discordant as f64 + wrong * (n + n_star + 1) as f64 / 2.0
}

/// Builds the full report; wall time is the caller's concern.
pub fn evaluate(gt: &GroundTruth, est: &PosteriorSummary, n: usize) -> Result<EvalReport> {
    let cov = coverage(&gt.true_set, &est.a_hat)?;
    Ok(EvalReport {
        n_corr: (cov * gt.true_set.len() as f64).round() as usize,
        coverage: cov,
        d_norm: d_norm(gt, est),
        d_r: recovery_distance(gt, est, n),
        wall_time_sec: 0.0,
    })
}

/// Mean-rank aggregation baseline: selects the `n*` items with the smallest
/// mean rank across assessors and ranks those means.
pub fn borda(ds: &RankingDataset, n_star: usize) -> Result<PosteriorSummary> {
    let n = ds.n_items();
    if n_star < 1 || n_star > n {
        return Err(Error::InvalidConfig(format!(
            "n_star must be in 1..={n}, got {n_star}"
        )));
    }
    let n_rows = ds.n_assessors();
    let mut means = vec![0.0f64; n];
    for j in 0..n_rows {
        for (i, &r) in ds.row(j).iter().enumerate() {
            means[i] += f64::from(r);
        }
    }
    for m in &mut means {
        *m /= n_rows as f64;
    }
    let overall = rank_vector(&means)?;
    let selected: Vec<usize> = (0..n)
        .filter(|&i| overall.ranks()[i] <= n_star as u32)
        .collect();
    let a_hat = crate::perm::ItemSet::new(selected, n)?;
    let sel_means: Vec<f64> = a_hat.members().iter().map(|&i| means[i]).collect();
    let rho_hat = rank_vector(&sel_means)?;
    Ok(PosteriorSummary {
        hps: a_hat.clone(),
        a_hat,
        rho_hat,
        x_bar: sel_means,
    })
}

/// Data-generating process of a benchmark scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    TopRank,
    RankConsistency,
}

/// Fitted methods available to the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lowbmm,
    Borda,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Lowbmm => "lowbmm",
            Method::Borda => "borda",
        }
    }
}

fn default_noise_fraction() -> f64 {
    0.9
}

/// One benchmark scenario: a generating process, a sampler setup, methods
/// to fit, and a repetition count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchScenario {
    pub name: String,
    pub generator: GeneratorKind,
    pub n: usize,
    pub n_star: usize,
    pub assessors: usize,
    /// Scale of the generating Mallows; also the fitting scale unless
    /// `fit_alpha` overrides it.
    pub alpha: f64,
    #[serde(default)]
    pub fit_alpha: Option<f64>,
    pub iterations: u64,
    #[serde(default)]
    pub burn_in: Option<u64>,
    #[serde(default)]
    pub thin: Option<u64>,
    #[serde(default)]
    pub leap_size: Option<usize>,
    #[serde(default)]
    pub swap_count: Option<usize>,
    #[serde(default)]
    pub noise_levels: Option<usize>,
    #[serde(default = "default_noise_fraction")]
    pub noise_fraction: f64,
    #[serde(default)]
    pub hps_k: Option<usize>,
    pub methods: Vec<Method>,
    pub repetitions: usize,
}

impl BenchScenario {
    pub fn sampler_config(&self, seed: u64) -> SamplerConfig {
        let mut cfg = SamplerConfig::new(
            self.fit_alpha.unwrap_or(self.alpha),
            self.n_star,
            self.iterations,
        );
        if let Some(b) = self.burn_in {
            cfg.burn_in = b;
        }
        if let Some(t) = self.thin {
            cfg.thin = t;
        }
        if let Some(l) = self.leap_size {
            cfg.leap_size = l;
        }
        if let Some(s) = self.swap_count {
            cfg.swap_count = s;
        }
        cfg.seed = seed;
        cfg
    }

    pub fn generate(&self, seed: u64) -> Result<(RankingDataset, GroundTruth)> {
        let (ds, gt) = match self.generator {
            GeneratorKind::TopRank => {
                gen_top_rank(self.n, self.n_star, self.assessors, self.alpha, seed)?
            }
            GeneratorKind::RankConsistency => {
                gen_rank_consistency(self.n, self.n_star, self.assessors, self.alpha, seed)?
            }
        };
        match self.noise_levels {
            Some(levels) if levels > 0 => {
                let noisy = apply_noise_swaps(
                    &ds,
                    &gt,
                    levels,
                    self.noise_fraction,
                    derive_seed(seed, "bench-noise", 0),
                )?;
                Ok((noisy, gt))
            }
            _ => Ok((ds, gt)),
        }
    }
}

/// Outcome of one `(method, repetition)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub scenario: String,
    pub method: Method,
    pub repetition: usize,
    pub report: Option<EvalReport>,
    pub error: Option<String>,
}

/// Per-method summary over the completed repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodAggregate {
    pub method: Method,
    pub completed: usize,
    pub failed: usize,
    pub mean_coverage: f64,
    pub sd_coverage: Option<f64>,
    pub mean_d_norm: f64,
    pub sd_d_norm: Option<f64>,
    pub mean_d_r: f64,
    pub sd_d_r: Option<f64>,
    pub mean_wall_time_sec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub scenario: BenchScenario,
    pub seed: u64,
    pub records: Vec<RepRecord>,
    pub aggregates: Vec<MethodAggregate>,
}

fn fit_method(
    method: Method,
    scenario: &BenchScenario,
    ds: &RankingDataset,
    gt: &GroundTruth,
    chain_seed: u64,
) -> Result<EvalReport> {
    let start = Instant::now();
    let summary = match method {
        Method::Borda => borda(ds, scenario.n_star)?,
        Method::Lowbmm => {
            let cfg = scenario.sampler_config(chain_seed);
            let samples = run_chain(ds, &cfg)?;
            let acc = DrawAccumulator::from_samples(&samples);
            let w = selection_frequencies(&acc)?;
            let k = scenario
                .hps_k
                .unwrap_or_else(|| default_hps_k(&w, scenario.n_star));
            posterior_point_estimates(&acc, k)?
        }
    };
    let mut report = evaluate(gt, &summary, scenario.n)?;
    report.wall_time_sec = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs every `(repetition, method)` cell of a scenario with split seeds;
/// repetitions run in parallel, failures are recorded rather than fatal.
pub fn run_benchmark(scenario: &BenchScenario, master_seed: u64) -> Result<BenchResult> {
    if scenario.repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be >= 1".into()));
    }
    if scenario.methods.is_empty() {
        return Err(Error::InvalidConfig("no methods selected".into()));
    }
    let records: Vec<RepRecord> = (0..scenario.repetitions)
        .into_par_iter()
        .flat_map_iter(|rep| {
            let data_seed = derive_seed(master_seed, "bench-data", rep as u64);
            let generated = scenario.generate(data_seed);
            scenario
                .methods
                .iter()
                .map(move |&method| {
                    let outcome = generated.as_ref().map_err(|e| e.to_string()).and_then(
                        |(ds, gt)| {
                            fit_method(
                                method,
                                scenario,
                                ds,
                                gt,
                                derive_seed(master_seed, "bench-chain", rep as u64),
                            )
                            .map_err(|e| e.to_string())
                        },
                    );
                    match outcome {
                        Ok(report) => RepRecord {
                            scenario: scenario.name.clone(),
                            method,
                            repetition: rep,
                            report: Some(report),
                            error: None,
                        },
                        Err(error) => RepRecord {
                            scenario: scenario.name.clone(),
                            method,
                            repetition: rep,
                            report: None,
                            error: Some(error),
                        },
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let aggregates = scenario
        .methods
        .iter()
        .map(|&method| aggregate(method, &records))
        .collect();
    Ok(BenchResult {
        scenario: scenario.clone(),
        seed: master_seed,
        records,
        aggregates,
    })
}

fn mean_sd(values: &[f64]) -> (f64, Option<f64>) {
    if values.is_empty() {
        return (f64::NAN, None);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if !mean.is_finite() || values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, Some(var.sqrt()))
}

fn aggregate(method: Method, records: &[RepRecord]) -> MethodAggregate {
    let reports: Vec<&EvalReport> = records
        .iter()
        .filter(|r| r.method == method)
        .filter_map(|r| r.report.as_ref())
        .collect();
    let failed = records
        .iter()
        .filter(|r| r.method == method && r.report.is_none())
        .count();
    let pick = |f: fn(&EvalReport) -> f64| -> Vec<f64> { reports.iter().map(|r| f(r)).collect() };
    let (mean_coverage, sd_coverage) = mean_sd(&pick(|r| r.coverage));
    let (mean_d_norm, sd_d_norm) = mean_sd(&pick(|r| r.d_norm));
    let (mean_d_r, sd_d_r) = mean_sd(&pick(|r| r.d_r));
    let (mean_wall_time_sec, _) = mean_sd(&pick(|r| r.wall_time_sec));
    MethodAggregate {
        method,
        completed: reports.len(),
        failed,
        mean_coverage,
        sd_coverage,
        mean_d_norm,
        sd_d_norm,
        mean_d_r,
        sd_d_r,
        mean_wall_time_sec,
    }
}
