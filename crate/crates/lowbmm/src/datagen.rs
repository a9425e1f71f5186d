//! Synthetic ranking datasets: the top-rank and rank-consistency generating
//! processes, plus the iterative rank-swap noise perturbation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mallows::{default_burn_in, default_leap, default_thin, sample_mallows_rows, MallowsParams};
use crate::perm::{is_permutation, ItemSet, Ranking};
use crate::seed::derived_rng;

/// How a dataset came to be; echoed into ground-truth files.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub descriptor: String,
    pub seed: u64,
}

/// `N` complete rankings of `n` items, with item identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingDataset {
    item_ids: Vec<String>,
    rows: Vec<u32>,
    n: usize,
    pub provenance: Option<Provenance>,
}

impl RankingDataset {
    pub fn from_rows(item_ids: Vec<String>, rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = item_ids.len();
        if n == 0 {
            return Err(Error::DegenerateInput("dataset has no items".into()));
        }
        if rows.is_empty() {
            return Err(Error::DegenerateInput("dataset has no assessors".into()));
        }
        let mut flat = Vec::with_capacity(n * rows.len());
        for (j, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            if !is_permutation(row) {
                return Err(Error::InvalidPermutation { len: n, row: Some(j) });
            }
            flat.extend_from_slice(row);
        }
        Ok(Self {
            item_ids,
            rows: flat,
            n,
            provenance: None,
        })
    }

    pub(crate) fn from_flat_unchecked(item_ids: Vec<String>, rows: Vec<u32>) -> Self {
        let n = item_ids.len();
        debug_assert_eq!(rows.len() % n, 0);
        Self {
            item_ids,
            rows,
            n,
            provenance: None,
        }
    }

    /// `item_1 ... item_n`.
    pub fn default_item_ids(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("item_{i}")).collect()
    }

    pub fn n_items(&self) -> usize {
        self.n
    }

    pub fn n_assessors(&self) -> usize {
        self.rows.len() / self.n
    }

    pub fn item_ids(&self) -> &[String] {
        &self.item_ids
    }

    pub fn row(&self, j: usize) -> &[u32] {
        &self.rows[j * self.n..(j + 1) * self.n]
    }

    pub(crate) fn flat_rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn ranking(&self, j: usize) -> Result<Ranking> {
        Ranking::new(self.row(j).to_vec())
    }
}

/// The generating truth: the relevant set and its consensus, the latter
/// aligned to the ascending member order of the set.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub true_set: ItemSet,
    pub true_consensus: Ranking,
}

impl GroundTruth {
    /// Item holding `rank` (1-based) in the true consensus.
    pub fn item_with_true_rank(&self, rank: u32) -> usize {
        let pos = self
            .true_consensus
            .ranks()
            .iter()
            .position(|&r| r == rank)
            .expect("rank within consensus dimension");
        self.true_set.members()[pos]
    }
}

fn validate_gen_params(n: usize, n_star: usize, n_assessors: usize, alpha: f64) -> Result<()> {
    if n_star < 1 || n_star >= n {
        return Err(Error::InvalidConfig(format!(
            "need 1 <= n_star < n, got n_star={n_star}, n={n}"
        )));
    }
    if n_assessors == 0 {
        return Err(Error::InvalidConfig("need at least one assessor".into()));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "alpha must be positive and finite, got {alpha}"
        )));
    }
    Ok(())
}

/// Shuffled item labels; the first `n_star` carry the signal, so the true
/// set occupies seed-dependent positions in the id space.
fn shuffled_labels<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }
    labels
}

fn truth_from_labels(labels: &[usize], n: usize, n_star: usize) -> GroundTruth {
    let mut members: Vec<usize> = labels[..n_star].to_vec();
    members.sort_unstable();
    let consensus: Vec<u32> = members
        .iter()
        .map(|&item| {
            labels[..n_star]
                .iter()
                .position(|&l| l == item)
                .expect("member came from labels") as u32
                + 1
        })
        .collect();
    GroundTruth {
        true_set: ItemSet::new(members, n).expect("labels are valid items"),
        true_consensus: Ranking::new(consensus).expect("positions form a permutation"),
    }
}

fn relevant_batch(n_star: usize, alpha: f64, n_assessors: usize, seed: u64) -> Vec<Vec<u32>> {
    let params = MallowsParams::new(Ranking::identity(n_star), alpha)
        .expect("validated alpha");
    let mut rng = derived_rng(seed, "relevant-ranks", 0);
    sample_mallows_rows(
        &params,
        n_assessors,
        default_burn_in(n_star),
        default_thin(n_star),
        default_leap(n_star),
        &mut rng,
    )
}

/// Top-rank process: the relevant items occupy ranks `1..=n*` following a
/// Mallows draw; all other items get the remaining ranks uniformly.
pub fn gen_top_rank(
    n: usize,
    n_star: usize,
    n_assessors: usize,
    alpha: f64,
    seed: u64,
) -> Result<(RankingDataset, GroundTruth)> {
    validate_gen_params(n, n_star, n_assessors, alpha)?;
    let mut label_rng = derived_rng(seed, "labels", 0);
    let labels = shuffled_labels(n, &mut label_rng);
    let sigma = relevant_batch(n_star, alpha, n_assessors, seed);
    let mut fill_rng = derived_rng(seed, "noise-ranks", 0);

    let mut rows = Vec::with_capacity(n * n_assessors);
    let mut tail: Vec<u32> = (n_star as u32 + 1..=n as u32).collect();
    for sig in sigma.iter().take(n_assessors) {
        let mut row = vec![0u32; n];
        for (k, &rank) in sig.iter().enumerate() {
            row[labels[k]] = rank;
        }
        for i in (1..tail.len()).rev() {
            let j = fill_rng.random_range(0..=i);
            tail.swap(i, j);
        }
        for (k, &rank) in tail.iter().enumerate() {
            row[labels[n_star + k]] = rank;
        }
        rows.extend_from_slice(&row);
    }
    let mut ds = RankingDataset::from_flat_unchecked(RankingDataset::default_item_ids(n), rows);
    ds.provenance = Some(Provenance {
        descriptor: format!("top-rank n={n} n_star={n_star} N={n_assessors} alpha={alpha}"),
        seed,
    });
    Ok((ds, truth_from_labels(&labels, n, n_star)))
}

/// Rank-consistency process: the relevant items keep a Mallows-distributed
/// relative order, placed at uniformly chosen absolute positions.
pub fn gen_rank_consistency(
    n: usize,
    n_star: usize,
    n_assessors: usize,
    alpha: f64,
    seed: u64,
) -> Result<(RankingDataset, GroundTruth)> {
    validate_gen_params(n, n_star, n_assessors, alpha)?;
    let mut label_rng = derived_rng(seed, "labels", 0);
    let labels = shuffled_labels(n, &mut label_rng);
    let sigma = relevant_batch(n_star, alpha, n_assessors, seed);
    let mut fill_rng = derived_rng(seed, "noise-ranks", 0);

    let mut rows = Vec::with_capacity(n * n_assessors);
    let mut taken = vec![false; n];
    for sig in sigma.iter().take(n_assessors) {
        let mut row = vec![0u32; n];
        taken.fill(false);
        // n* distinct positions, ascending; the item with relative rank s
        // lands on the s-th smallest of them
        let mut positions = rand::seq::index::sample(&mut fill_rng, n, n_star).into_vec();
        positions.sort_unstable();
        for (k, &rel_rank) in sig.iter().enumerate() {
            let rank = positions[rel_rank as usize - 1] as u32 + 1;
            row[labels[k]] = rank;
            taken[rank as usize - 1] = true;
        }
        let mut rest: Vec<u32> = (1..=n as u32).filter(|&r| !taken[r as usize - 1]).collect();
        for i in (1..rest.len()).rev() {
            let j = fill_rng.random_range(0..=i);
            rest.swap(i, j);
        }
        for (k, &rank) in rest.iter().enumerate() {
            row[labels[n_star + k]] = rank;
        }
        rows.extend_from_slice(&row);
    }
    let mut ds = RankingDataset::from_flat_unchecked(RankingDataset::default_item_ids(n), rows);
    ds.provenance = Some(Provenance {
        descriptor: format!(
            "rank-consistency n={n} n_star={n_star} N={n_assessors} alpha={alpha}"
        ),
        seed,
    });
    Ok((ds, truth_from_labels(&labels, n, n_star)))
}

/// Iterative rank-swap perturbation: level `i` takes the item with true
/// rank `n* - i + 1` and, for a random `fraction` of the assessors, swaps
/// its rank with that of a per-assessor uniformly chosen outside item.
pub fn apply_noise_swaps(
    ds: &RankingDataset,
    gt: &GroundTruth,
    levels: usize,
    fraction: f64,
    seed: u64,
) -> Result<RankingDataset> {
    let n_star = gt.true_set.len();
    if levels > n_star {
        return Err(Error::InvalidConfig(format!(
            "levels must be <= n_star = {n_star}, got {levels}"
        )));
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidConfig(format!(
            "fraction must be in [0, 1], got {fraction}"
        )));
    }
    let n = ds.n_items();
    let n_rows = ds.n_assessors();
    let outside = gt.true_set.complement(n);
    if outside.is_empty() && levels > 0 {
        return Err(Error::InvalidConfig(
            "no items outside the true set to swap with".into(),
        ));
    }
    let mut rng = derived_rng(seed, "noise-swaps", 0);
    let mut rows = ds.flat_rows().to_vec();
    let picked = ((fraction * n_rows as f64).round() as usize).min(n_rows);
    for level in 1..=levels {
        let target = gt.item_with_true_rank((n_star - level + 1) as u32);
        let assessors = rand::seq::index::sample(&mut rng, n_rows, picked);
        for j in assessors {
            let partner = outside[rng.random_range(0..outside.len())];
            rows.swap(j * n + target, j * n + partner);
        }
    }
    let mut out = RankingDataset::from_flat_unchecked(ds.item_ids().to_vec(), rows);
    out.provenance = ds.provenance.clone().map(|p| Provenance {
        descriptor: format!("{} + noise levels={levels} fraction={fraction}", p.descriptor),
        seed: p.seed,
    });
    Ok(out)
}
