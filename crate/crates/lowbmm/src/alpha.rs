//! Off-line tuning of the scale parameter: match the observed mean pairwise
//! distance between assessors against Mallows-simulated references over a
//! grid, locate the crossing, and rescale the estimate from the full
//! dimension down to `n*`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::RankingDataset;
use crate::error::{Error, Result};
use crate::mallows::{default_burn_in, default_thin, MallowsParams};
use crate::perm::{footrule_slices, max_footrule, Ranking};
use crate::seed::derive_seed;

/// Which grid end an estimate was clamped to when no crossing exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampEnd {
    Low,
    High,
}

/// Grid table and selected scale values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaGridResult {
    pub grid: Vec<f64>,
    /// Simulated mean pairwise distance per grid point (averaged over reps).
    pub mean_dists: Vec<f64>,
    pub observed_mean: f64,
    pub alpha_hat_n: f64,
    pub alpha_hat_nstar: f64,
    /// Set when the observed mean never crosses the simulated curve.
    pub clamped: Option<ClampEnd>,
}

/// Mean pairwise footrule between assessors, `1/(N(N-1))` times the double
/// sum over ordered pairs.
pub fn mean_pairwise_distance(ds: &RankingDataset) -> Result<f64> {
    let n_rows = ds.n_assessors();
    if n_rows < 2 {
        return Err(Error::DegenerateInput(
            "mean pairwise distance needs at least two assessors".into(),
        ));
    }
    let mut total = 0u64;
    for j in 0..n_rows {
        for k in j + 1..n_rows {
            total += footrule_slices(ds.row(j), ds.row(k));
        }
    }
    // each unordered pair counts twice in the double sum
    Ok(2.0 * total as f64 / (n_rows as f64 * (n_rows as f64 - 1.0)))
}

/// Sampler knobs for the reference batches; defaults mirror the batch
/// sampler but can be cheapened for very large `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSampling {
    pub burn_in: Option<usize>,
    pub thin: Option<usize>,
}

impl Default for ReferenceSampling {
    fn default() -> Self {
        Self {
            burn_in: None,
            thin: None,
        }
    }
}

/// Simulated mean pairwise distance at one scale value, averaged over
/// `reps` datasets of the observed shape.
fn simulated_mean(
    n: usize,
    n_rows: usize,
    alpha0: f64,
    reps: usize,
    seed: u64,
    sampling: ReferenceSampling,
) -> Result<f64> {
    // the consensus does not matter under a right-invariant distance
    let params = MallowsParams::new(Ranking::identity(n), alpha0)?;
    let burn = sampling.burn_in.unwrap_or_else(|| default_burn_in(n));
    let thin = sampling.thin.unwrap_or_else(|| default_thin(n));
    let mut total = 0.0;
    for rep in 0..reps {
        let rows = crate::mallows::sample_mallows_rows(
            &params,
            n_rows,
            burn,
            thin,
            crate::mallows::default_leap(n),
            &mut crate::seed::derived_rng(seed, "alpha-grid-rep", rep as u64),
        );
        let ids = RankingDataset::default_item_ids(n);
        let ds = RankingDataset::from_flat_unchecked(ids, rows.concat());
        total += mean_pairwise_distance(&ds)?;
    }
    Ok(total / reps as f64)
}

/// Estimates the scale by locating where the simulated mean-distance curve
/// crosses the observed mean, with linear interpolation between the
/// bracketing grid points, then rescales to dimension `n*`.
pub fn estimate_alpha(
    observed: &RankingDataset,
    n_star: usize,
    grid: &[f64],
    reps: usize,
    seed: u64,
) -> Result<AlphaGridResult> {
    estimate_alpha_with(
        observed,
        n_star,
        grid,
        reps,
        seed,
        ReferenceSampling::default(),
    )
}

/// `estimate_alpha` with explicit reference-sampler settings.
pub fn estimate_alpha_with(
    observed: &RankingDataset,
    n_star: usize,
    grid: &[f64],
    reps: usize,
    seed: u64,
    sampling: ReferenceSampling,
) -> Result<AlphaGridResult> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("alpha grid is empty".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "alpha grid must be strictly ascending".into(),
        ));
    }
    if grid.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidConfig(
            "alpha grid values must be positive and finite".into(),
        ));
    }
    if reps < 1 {
        return Err(Error::InvalidConfig("reps must be >= 1".into()));
    }
    let n = observed.n_items();
    if n_star < 1 || n_star > n {
        return Err(Error::InvalidConfig(format!(
            "n_star must be in 1..={n}, got {n_star}"
        )));
    }
    let observed_mean = mean_pairwise_distance(observed)?;

    let mean_dists: Result<Vec<f64>> = grid
        .par_iter()
        .enumerate()
        .map(|(g, &alpha0)| {
            simulated_mean(
                n,
                observed.n_assessors(),
                alpha0,
                reps,
                derive_seed(seed, "alpha-grid", g as u64),
                sampling,
            )
        })
        .collect();
    let mean_dists = mean_dists?;

    // the curve decreases in alpha; find the bracket containing the
    // observed mean
    let mut alpha_hat_n = f64::NAN;
    let mut clamped = None;
    if observed_mean > mean_dists[0] {
        alpha_hat_n = grid[0];
        clamped = Some(ClampEnd::Low);
    } else if observed_mean < *mean_dists.last().unwrap() {
        alpha_hat_n = *grid.last().unwrap();
        clamped = Some(ClampEnd::High);
    } else {
        for w in 0..grid.len() - 1 {
            let (d0, d1) = (mean_dists[w], mean_dists[w + 1]);
            if observed_mean <= d0 && observed_mean >= d1 {
                let denom = d0 - d1;
                alpha_hat_n = if denom.abs() < 1e-12 {
                    // locally flat: nearest grid point
                    grid[w]
                } else {
                    grid[w] + (grid[w + 1] - grid[w]) * (d0 - observed_mean) / denom
                };
                break;
            }
        }
        if alpha_hat_n.is_nan() {
            // simulation noise made the curve locally non-monotone around
            // the observed level; fall back to the nearest grid point
            let nearest = grid
                .iter()
                .zip(&mean_dists)
                .min_by(|a, b| {
                    (a.1 - observed_mean)
                        .abs()
                        .partial_cmp(&(b.1 - observed_mean).abs())
                        .unwrap()
                })
                .unwrap();
            alpha_hat_n = *nearest.0;
        }
    }

    Ok(AlphaGridResult {
        grid: grid.to_vec(),
        mean_dists,
        observed_mean,
        alpha_hat_n,
        alpha_hat_nstar: rescale_alpha(alpha_hat_n, n, n_star),
        clamped,
    })
}

/// Rescales a full-dimension estimate to dimension `n*` by matching the
/// Mallows exponents: `alpha * (n/n*) * (max_d(n*) / max_d(n))`.
pub fn rescale_alpha(alpha_hat_n: f64, n: usize, n_star: usize) -> f64 {
    alpha_hat_n * (n as f64 / n_star as f64)
        * (max_footrule(n_star) as f64 / max_footrule(n) as f64)
}

/// Default tuning grid: 13 points, logarithmically spaced over
/// `[1e-3, 1e2]`.
pub fn default_grid() -> Vec<f64> {
    let points = 13usize;
    (0..points)
        .map(|i| 10f64.powf(-3.0 + 5.0 * i as f64 / (points - 1) as f64))
        .collect()
}
