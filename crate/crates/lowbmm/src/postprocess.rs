//! Posterior summaries: selection frequencies, the Highest Probability Set,
//! point estimates of the relevant set and its consensus, top-K inclusion
//! probabilities, and the long-format tables behind heatplots, violin plots
//! and trace plots.

use crate::error::{Error, Result};
use crate::perm::{rank_vector, ItemSet, Ranking};
use crate::sampler::PosteriorSamples;

/// Per-item inclusion frequency over the stored draws; sums to `n*`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionFrequencies {
    pub w_bar: Vec<f64>,
}

/// Point summaries built from the draws: the HPS `A'`, the selected set
/// `A-hat` with its consensus estimate, and the conditional mean ranks over
/// the HPS.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub hps: ItemSet,
    pub a_hat: ItemSet,
    pub rho_hat: Ranking,
    /// Conditional mean rank of each HPS member (aligned with `hps`).
    pub x_bar: Vec<f64>,
}

/// Single-pass sufficient statistics over draws: inclusion counts, rank
/// sums, and the per-item marginal rank histogram. Everything downstream
/// (HPS, point estimates, any-K top probabilities, export tables) reads
/// from here, so draw logs can be streamed without keeping draws around.
#[derive(Debug, Clone)]
pub struct DrawAccumulator {
    n_items: usize,
    n_star: usize,
    n_draws: u64,
    inclusion: Vec<u64>,
    rank_sum: Vec<u64>,
    rank_counts: Vec<u32>,
}

impl DrawAccumulator {
    pub fn new(n_items: usize, n_star: usize) -> Self {
        Self {
            n_items,
            n_star,
            n_draws: 0,
            inclusion: vec![0; n_items],
            rank_sum: vec![0; n_items],
            rank_counts: vec![0; n_items * n_star],
        }
    }

    pub fn add_draw(&mut self, items: &[u32], ranks: &[u16]) {
        debug_assert_eq!(items.len(), self.n_star);
        self.n_draws += 1;
        for (&item, &rank) in items.iter().zip(ranks) {
            let i = item as usize;
            self.inclusion[i] += 1;
            self.rank_sum[i] += u64::from(rank);
            self.rank_counts[i * self.n_star + usize::from(rank) - 1] += 1;
        }
    }

    pub fn from_samples(samples: &PosteriorSamples) -> Self {
        let mut acc = Self::new(samples.n_items, samples.n_star);
        for (_, _, items, ranks) in samples.draws() {
            acc.add_draw(items, ranks);
        }
        acc
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn n_star(&self) -> usize {
        self.n_star
    }

    pub fn n_draws(&self) -> u64 {
        self.n_draws
    }

    pub fn inclusion_count(&self, item: usize) -> u64 {
        self.inclusion[item]
    }

    /// Count of draws where `item` is included with exactly `rank`.
    pub fn rank_count(&self, item: usize, rank: u32) -> u32 {
        self.rank_counts[item * self.n_star + rank as usize - 1]
    }

    fn conditional_mean_rank(&self, item: usize) -> Option<f64> {
        (self.inclusion[item] > 0)
            .then(|| self.rank_sum[item] as f64 / self.inclusion[item] as f64)
    }
}

/// `w_bar[i]`: fraction of draws including item `i`.
pub fn selection_frequencies(acc: &DrawAccumulator) -> Result<SelectionFrequencies> {
    if acc.n_draws == 0 {
        return Err(Error::EmptySamples);
    }
    let m = acc.n_draws as f64;
    Ok(SelectionFrequencies {
        w_bar: acc.inclusion.iter().map(|&c| c as f64 / m).collect(),
    })
}

/// Default HPS size: every item seen in a draw, capped at `2 n*`.
pub fn default_hps_k(w: &SelectionFrequencies, n_star: usize) -> usize {
    let positive = w.w_bar.iter().filter(|&&f| f > 0.0).count();
    positive.min(2 * n_star).max(n_star)
}

/// The `k` items with the largest selection frequency, ties broken by
/// ascending item index.
pub fn highest_probability_set(
    w: &SelectionFrequencies,
    n_star: usize,
    k: usize,
) -> Result<ItemSet> {
    let n = w.w_bar.len();
    if k < n_star || k > n {
        return Err(Error::InvalidConfig(format!(
            "k must be in {n_star}..={n}, got {k}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        w.w_bar[b]
            .partial_cmp(&w.w_bar[a])
            .expect("frequencies are finite")
            .then(a.cmp(&b))
    });
    order.truncate(k);
    ItemSet::new(order, n)
}

/// Point estimates from the draws: `A-hat` keeps the `n*` HPS items with the
/// smallest conditional mean rank, and `rho_hat` ranks those means.
pub fn posterior_point_estimates(acc: &DrawAccumulator, k: usize) -> Result<PosteriorSummary> {
    let w = selection_frequencies(acc)?;
    let hps = highest_probability_set(&w, acc.n_star, k)?;
    let mut x_bar = Vec::with_capacity(hps.len());
    for &item in hps.members() {
        let mean = acc
            .conditional_mean_rank(item)
            .ok_or(Error::ZeroInclusion { item })?;
        x_bar.push(mean);
    }
    let mut order: Vec<usize> = (0..hps.len()).collect();
    order.sort_by(|&a, &b| {
        x_bar[a]
            .partial_cmp(&x_bar[b])
            .expect("means are finite")
            .then(hps.members()[a].cmp(&hps.members()[b]))
    });
    let a_hat_members: Vec<usize> = order[..acc.n_star]
        .iter()
        .map(|&p| hps.members()[p])
        .collect();
    let a_hat = ItemSet::new(a_hat_members, acc.n_items)?;
    let a_hat_means: Vec<f64> = a_hat
        .members()
        .iter()
        .map(|&item| {
            let p = hps.members().binary_search(&item).expect("a_hat within hps");
            x_bar[p]
        })
        .collect();
    let rho_hat = rank_vector(&a_hat_means)?;
    Ok(PosteriorSummary {
        hps,
        a_hat,
        rho_hat,
        x_bar,
    })
}

/// For every item, the fraction of its including draws where its rank is at
/// most `k`; `None` for items never included.
pub fn topk_inclusion_probabilities(
    acc: &DrawAccumulator,
    k: usize,
) -> Result<Vec<Option<f64>>> {
    if k < 1 || k > acc.n_star {
        return Err(Error::InvalidConfig(format!(
            "top-K must be in 1..={}, got {k}",
            acc.n_star
        )));
    }
    Ok((0..acc.n_items)
        .map(|item| {
            (acc.inclusion[item] > 0).then(|| {
                let hits: u64 = (1..=k as u32)
                    .map(|r| u64::from(acc.rank_count(item, r)))
                    .sum();
                hits as f64 / acc.inclusion[item] as f64
            })
        })
        .collect())
}

/// Items of `A-hat` whose top-`k` inclusion probability reaches the cutoff
/// `c` (so `c = 0` keeps all of `A-hat` and `c = 1` keeps the items
/// top-`k`-ranked in every including draw). May be empty, hence a plain
/// ascending item list rather than an `ItemSet`.
pub fn top_probability_selection(
    acc: &DrawAccumulator,
    summary: &PosteriorSummary,
    k: usize,
    c: f64,
) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidConfig(format!(
            "cutoff must be in [0, 1], got {c}"
        )));
    }
    let probs = topk_inclusion_probabilities(acc, k)?;
    Ok(summary
        .a_hat
        .members()
        .iter()
        .copied()
        .filter(|&item| probs[item].is_some_and(|p| p >= c))
        .collect())
}

/// One cell of the long-format heatplot table: the marginal probability
/// that `item` holds `rank`, conditional on inclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatplotCell {
    pub item: usize,
    pub rank: u32,
    pub probability: f64,
    pub w_bar: f64,
}

/// Long-format marginal-rank table over the HPS, items ordered by their
/// conditional mean rank (the `rho_hat` ordering extended to the HPS).
/// Zero-probability cells are omitted.
pub fn heatplot_table(acc: &DrawAccumulator, summary: &PosteriorSummary) -> Vec<HeatplotCell> {
    let w = selection_frequencies(acc).expect("summary exists, draws exist");
    let mut order: Vec<usize> = (0..summary.hps.len()).collect();
    order.sort_by(|&a, &b| {
        summary.x_bar[a]
            .partial_cmp(&summary.x_bar[b])
            .expect("means are finite")
            .then(summary.hps.members()[a].cmp(&summary.hps.members()[b]))
    });
    let mut cells = Vec::new();
    for &p in &order {
        let item = summary.hps.members()[p];
        let incl = acc.inclusion[item];
        for rank in 1..=acc.n_star as u32 {
            let count = acc.rank_count(item, rank);
            if count > 0 {
                cells.push(HeatplotCell {
                    item,
                    rank,
                    probability: f64::from(count) / incl as f64,
                    w_bar: w.w_bar[item],
                });
            }
        }
    }
    cells
}

/// One cell of the violin table: top-`k` inclusion probability of an item.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolinCell {
    pub item: usize,
    pub top_k: usize,
    pub probability: f64,
}

/// Top-`k` inclusion probabilities over a grid of `k` values, for every item
/// appearing in at least one draw.
pub fn violin_table(acc: &DrawAccumulator, k_grid: &[usize]) -> Result<Vec<ViolinCell>> {
    let mut cells = Vec::new();
    for &k in k_grid {
        let probs = topk_inclusion_probabilities(acc, k)?;
        for (item, prob) in probs.iter().enumerate() {
            if let Some(p) = prob {
                cells.push(ViolinCell {
                    item,
                    top_k: k,
                    probability: *p,
                });
            }
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::PosteriorSamples;

    fn samples_from(draws: Vec<Vec<(usize, u32)>>, n: usize, n_star: usize) -> PosteriorSamples {
        PosteriorSamples::from_draws(
            n,
            n_star,
            draws
                .into_iter()
                .enumerate()
                .map(|(i, d)| (0u32, i as u64 + 1, d)),
        )
        .unwrap()
    }

    #[test]
    fn identical_draws_give_indicator_frequencies() {
        let s = samples_from(vec![vec![(1, 2), (3, 1)]; 5], 6, 2);
        let acc = DrawAccumulator::from_samples(&s);
        let w = selection_frequencies(&acc).unwrap();
        assert_eq!(w.w_bar, vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let summary = posterior_point_estimates(&acc, 2).unwrap();
        assert_eq!(summary.a_hat.members(), &[1, 3]);
        assert_eq!(summary.rho_hat.ranks(), &[2, 1]);
    }

    #[test]
    fn single_differing_item_splits_frequency() {
        let s = samples_from(vec![vec![(0, 1), (1, 2)], vec![(0, 1), (2, 2)]], 4, 2);
        let acc = DrawAccumulator::from_samples(&s);
        let w = selection_frequencies(&acc).unwrap();
        assert_eq!(w.w_bar, vec![1.0, 0.5, 0.5, 0.0]);
        let total: f64 = w.w_bar.iter().sum();
        assert_eq!(total, 2.0);
    }

    #[test]
    fn frequencies_match_column_count_oracle() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
        let n = 9;
        let n_star = 3;
        let mut draws = Vec::new();
        for _ in 0..200 {
            let items = rand::seq::index::sample(&mut rng, n, n_star).into_vec();
            let mut sorted = items.clone();
            sorted.sort_unstable();
            let mut ranks: Vec<u32> = (1..=n_star as u32).collect();
            for i in (1..n_star).rev() {
                let j = rng.random_range(0..=i);
                ranks.swap(i, j);
            }
            draws.push(sorted.into_iter().zip(ranks).collect::<Vec<_>>());
        }
        let oracle: Vec<f64> = (0..n)
            .map(|item| {
                draws
                    .iter()
                    .filter(|d| d.iter().any(|&(i, _)| i == item))
                    .count() as f64
                    / draws.len() as f64
            })
            .collect();
        let s = samples_from(draws, n, n_star);
        let acc = DrawAccumulator::from_samples(&s);
        let w = selection_frequencies(&acc).unwrap();
        assert_eq!(w.w_bar, oracle);
        assert!((w.w_bar.iter().sum::<f64>() - n_star as f64).abs() < 1e-12);
    }

    #[test]
    fn hps_picks_largest_frequencies_with_index_ties() {
        let w = SelectionFrequencies {
            w_bar: vec![0.9, 0.1, 0.8, 0.2],
        };
        assert_eq!(
            highest_probability_set(&w, 2, 2).unwrap().members(),
            &[0, 2]
        );
        assert_eq!(
            highest_probability_set(&w, 2, 4).unwrap().members(),
            &[0, 1, 2, 3]
        );
        let uniform = SelectionFrequencies {
            w_bar: vec![0.5; 4],
        };
        assert_eq!(
            highest_probability_set(&uniform, 2, 2).unwrap().members(),
            &[0, 1]
        );
        assert!(highest_probability_set(&w, 2, 1).is_err());
        assert!(highest_probability_set(&w, 2, 5).is_err());
    }

    #[test]
    fn two_draw_toy_matches_hand_arithmetic() {
        // draw 1: {0,1} with ranks (1,2); draw 2: {0,2} with ranks (2,1)
        let s = samples_from(vec![vec![(0, 1), (1, 2)], vec![(0, 2), (2, 1)]], 4, 2);
        let acc = DrawAccumulator::from_samples(&s);
        let summary = posterior_point_estimates(&acc, 3).unwrap();
        assert_eq!(summary.hps.members(), &[0, 1, 2]);
        assert_eq!(summary.x_bar, vec![1.5, 2.0, 1.0]);
        // smallest means: item 2 (1.0) then item 0 (1.5)
        assert_eq!(summary.a_hat.members(), &[0, 2]);
        assert_eq!(summary.rho_hat.ranks(), &[2, 1]);
    }

    #[test]
    fn zero_inclusion_hps_item_is_an_error() {
        let s = samples_from(vec![vec![(0, 1), (1, 2)]], 4, 2);
        let acc = DrawAccumulator::from_samples(&s);
        // k = 3 forces a never-included item into the HPS
        assert!(matches!(
            posterior_point_estimates(&acc, 3),
            Err(Error::ZeroInclusion { .. })
        ));
    }

    #[test]
    fn default_k_counts_positive_items_capped() {
        let w = SelectionFrequencies {
            w_bar: vec![0.4, 0.0, 0.2, 0.6, 0.8],
        };
        assert_eq!(default_hps_k(&w, 2), 4);
        let w2 = SelectionFrequencies {
            w_bar: vec![0.1; 20],
        };
        assert_eq!(default_hps_k(&w2, 3), 6);
    }

    #[test]
    fn topk_probabilities_examples() {
        let s = samples_from(vec![vec![(0, 1), (1, 2)], vec![(0, 2), (2, 1)]], 4, 2);
        let acc = DrawAccumulator::from_samples(&s);
        let p1 = topk_inclusion_probabilities(&acc, 1).unwrap();
        assert_eq!(p1, vec![Some(0.5), Some(0.0), Some(1.0), None]);
        // K = n* gives probability 1 for every included item
        let p2 = topk_inclusion_probabilities(&acc, 2).unwrap();
        assert_eq!(p2, vec![Some(1.0), Some(1.0), Some(1.0), None]);
        assert!(topk_inclusion_probabilities(&acc, 0).is_err());
        assert!(topk_inclusion_probabilities(&acc, 3).is_err());
    }

    #[test]
    fn topk_probability_monotone_in_k() {
        let s = samples_from(
            vec![
                vec![(0, 1), (1, 3), (2, 2)],
                vec![(0, 2), (1, 1), (3, 3)],
                vec![(0, 3), (2, 1), (3, 2)],
            ],
            5,
            3,
        );
        let acc = DrawAccumulator::from_samples(&s);
        let mut prev = vec![Some(0.0); 5];
        for k in 1..=3 {
            let p = topk_inclusion_probabilities(&acc, k).unwrap();
            for item in 0..5 {
                if let (Some(a), Some(b)) = (prev[item], p[item]) {
                    assert!(b >= a);
                }
            }
            prev = p;
        }
    }

    #[test]
    fn top_selection_cutoff_boundaries() {
        let s = samples_from(vec![vec![(0, 1), (1, 2)], vec![(0, 2), (1, 1)]], 4, 2);
        let acc = DrawAccumulator::from_samples(&s);
        let summary = posterior_point_estimates(&acc, 2).unwrap();
        let all = top_probability_selection(&acc, &summary, 1, 0.0).unwrap();
        assert_eq!(all, summary.a_hat.members());
        // single-draw degenerate: indicator of rank <= K
        let s1 = samples_from(vec![vec![(0, 1), (1, 2)]], 4, 2);
        let acc1 = DrawAccumulator::from_samples(&s1);
        let sum1 = posterior_point_estimates(&acc1, 2).unwrap();
        let top = top_probability_selection(&acc1, &sum1, 1, 1.0).unwrap();
        assert_eq!(top, vec![0]);
    }

    #[test]
    fn heatplot_table_normalizes_per_item() {
        let s = samples_from(
            vec![
                vec![(0, 1), (1, 2)],
                vec![(0, 2), (1, 1)],
                vec![(0, 1), (2, 2)],
            ],
            4,
            2,
        );
        let acc = DrawAccumulator::from_samples(&s);
        let summary = posterior_point_estimates(&acc, 3).unwrap();
        let cells = heatplot_table(&acc, &summary);
        for &item in summary.hps.members() {
            let total: f64 = cells
                .iter()
                .filter(|c| c.item == item)
                .map(|c| c.probability)
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "item {item} sums to {total}");
        }
        // degenerate posterior: one probability-1 cell per item
        let d = samples_from(vec![vec![(0, 1), (1, 2)]; 4], 4, 2);
        let dacc = DrawAccumulator::from_samples(&d);
        let dsum = posterior_point_estimates(&dacc, 2).unwrap();
        let dcells = heatplot_table(&dacc, &dsum);
        assert_eq!(dcells.len(), 2);
        assert!(dcells.iter().all(|c| c.probability == 1.0));
    }

    #[test]
    fn violin_mass_matches_counting_oracle() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let n = 12;
        let n_star = 4;
        let mut draws = Vec::new();
        for _ in 0..100 {
            let mut items = rand::seq::index::sample(&mut rng, n, n_star).into_vec();
            items.sort_unstable();
            let mut ranks: Vec<u32> = (1..=n_star as u32).collect();
            for i in (1..n_star).rev() {
                let j = rng.random_range(0..=i);
                ranks.swap(i, j);
            }
            draws.push(items.into_iter().zip(ranks).collect::<Vec<_>>());
        }
        let s = samples_from(draws, n, n_star);
        let acc = DrawAccumulator::from_samples(&s);
        let grid = [1usize, 2, 3, 4];
        let cells = violin_table(&acc, &grid).unwrap();
        // sum over items of P(rank <= K | incl) * incl = draws * min(K, n*)
        for &k in &grid {
            let mass: f64 = cells
                .iter()
                .filter(|c| c.top_k == k)
                .map(|c| c.probability * acc.inclusion_count(c.item) as f64)
                .sum();
            let expect = acc.n_draws() as f64 * k.min(n_star) as f64;
            assert!((mass - expect).abs() < 1e-9, "K={k}: {mass} vs {expect}");
        }
    }

    #[test]
    fn empty_samples_error() {
        let acc = DrawAccumulator::new(4, 2);
        assert!(matches!(
            selection_frequencies(&acc),
            Err(Error::EmptySamples)
        ));
    }
}
