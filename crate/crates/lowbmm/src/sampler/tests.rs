use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::datagen::gen_top_rank;
use crate::perm::test_support::all_permutations;
use crate::perm::{footrule, restrict};
use crate::postprocess::{selection_frequencies, DrawAccumulator};

fn dataset(rows: Vec<Vec<u32>>) -> RankingDataset {
    let n = rows[0].len();
    RankingDataset::from_rows(RankingDataset::default_item_ids(n), rows).unwrap()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Brute-force normalized posterior over all `(A*, rho)` joint states.
fn exact_posterior(
    ds: &RankingDataset,
    n_star: usize,
    alpha: f64,
) -> HashMap<(Vec<u32>, Vec<u16>), f64> {
    let n = ds.n_items();
    let mut weights = HashMap::new();
    let mut z = 0.0;
    for set in subsets(n, n_star) {
        let item_set = ItemSet::new(set.clone(), n).unwrap();
        let restricted: Vec<Ranking> = (0..ds.n_assessors())
            .map(|j| restrict(&ds.ranking(j).unwrap(), &item_set).unwrap())
            .collect();
        for rho in all_permutations(n_star) {
            let rho_rank = Ranking::new(rho.clone()).unwrap();
            let total: u64 = restricted
                .iter()
                .map(|r| footrule(r, &rho_rank).unwrap())
                .sum();
            let w = (-(alpha / n_star as f64) * total as f64).exp();
            let key = (
                set.iter().map(|&i| i as u32).collect::<Vec<u32>>(),
                rho.iter().map(|&r| r as u16).collect::<Vec<u16>>(),
            );
            weights.insert(key, w);
            z += w;
        }
    }
    for w in weights.values_mut() {
        *w /= z;
    }
    weights
}

fn joint_tv(ds: &RankingDataset, cfg: &SamplerConfig) -> f64 {
    let exact = exact_posterior(ds, cfg.n_star, cfg.alpha);
    let samples = run_chain(ds, cfg).unwrap();
    let mut counts: HashMap<(Vec<u32>, Vec<u16>), u64> = HashMap::new();
    for (_, _, items, ranks) in samples.draws() {
        *counts
            .entry((items.to_vec(), ranks.to_vec()))
            .or_insert(0) += 1;
    }
    let kept = samples.len() as f64;
    let mut tv = 0.0;
    for (state, p) in &exact {
        let emp = *counts.get(state).unwrap_or(&0) as f64 / kept;
        tv += (p - emp).abs();
    }
    for (state, c) in &counts {
        assert!(exact.contains_key(state), "chain visited impossible state");
        let _ = c;
    }
    tv / 2.0
}

#[test]
fn config_validation_rejects_bad_fields() {
    let ok = SamplerConfig::new(2.0, 4, 100);
    assert!(ok.validate(10).is_ok());

    let mut c = ok.clone();
    c.alpha = 0.0;
    assert!(c.validate(10).is_err());
    c = ok.clone();
    c.n_star = 1;
    assert!(c.validate(10).is_err());
    c = ok.clone();
    c.n_star = 10;
    assert!(c.validate(10).is_err());
    c = ok.clone();
    c.leap_size = 0;
    assert!(c.validate(10).is_err());
    c = ok.clone();
    c.leap_size = 4;
    assert!(c.validate(10).is_err());
    c = ok.clone();
    c.swap_count = 0;
    assert!(c.validate(10).is_err());
    c = ok.clone();
    c.swap_count = 5;
    assert!(c.validate(10).is_err());
    c = ok.clone();
    c.burn_in = 100;
    assert!(c.validate(10).is_err());
    c = ok.clone();
    c.thin = 0;
    assert!(c.validate(10).is_err());
    c = ok;
    c.iterations = 0;
    assert!(c.validate(10).is_err());
}

#[test]
fn draw_bookkeeping_counts() {
    let (ds, _) = gen_top_rank(8, 3, 4, 3.0, 2).unwrap();
    // M = burn_in + thin keeps exactly one draw
    let mut cfg = SamplerConfig::new(3.0, 3, 25);
    cfg.burn_in = 20;
    cfg.thin = 5;
    let samples = run_chain(&ds, &cfg).unwrap();
    assert_eq!(samples.len(), 1);
    assert_eq!(samples.draw(0).1, 25);

    cfg.iterations = 100;
    cfg.burn_in = 10;
    cfg.thin = 7;
    let samples = run_chain(&ds, &cfg).unwrap();
    assert_eq!(samples.len() as u64, (100 - 10) / 7);
}

#[test]
fn chains_are_deterministic_and_seed_sensitive() {
    let (ds, _) = gen_top_rank(10, 3, 5, 4.0, 8).unwrap();
    let mut cfg = SamplerConfig::new(4.0, 3, 500);
    cfg.seed = 31;
    let a = run_chain(&ds, &cfg).unwrap();
    let b = run_chain(&ds, &cfg).unwrap();
    assert_eq!(a, b);
    cfg.seed = 32;
    let c = run_chain(&ds, &cfg).unwrap();
    assert_ne!(a, c);
}

#[test]
fn stored_draws_are_valid_states() {
    let (ds, _) = gen_top_rank(12, 4, 6, 2.0, 3).unwrap();
    let mut cfg = SamplerConfig::new(2.0, 4, 800);
    cfg.swap_count = 2;
    cfg.leap_size = 3;
    let samples = run_chain(&ds, &cfg).unwrap();
    assert!(samples.len() > 0);
    for i in 0..samples.len() {
        let state = samples.state_at(i);
        assert_eq!(state.rho.len(), 4);
        assert_eq!(state.aset.len(), 4);
    }
}

/// Joint empirical law matches the brute-force-normalized posterior on the
/// tiny instance (the full-scale version runs in the acceptance suite).
#[test]
fn exact_posterior_tiny_instance() {
    let ds = dataset(vec![
        vec![1, 2, 3, 4],
        vec![2, 1, 3, 4],
        vec![1, 3, 2, 4],
    ]);
    let mut cfg = SamplerConfig::new(2.0, 2, 400_000);
    cfg.burn_in = 4_000;
    cfg.thin = 1;
    cfg.seed = 17;
    let tv = joint_tv(&ds, &cfg);
    assert!(tv <= 0.02, "tv = {tv}");
}

/// Same oracle with n* = 3, leap 2 and L = 2, exercising the multi-swap
/// proposal and the asymmetric leap supports.
#[test]
fn exact_posterior_multiswap() {
    let ds = dataset(vec![vec![2, 4, 1, 5, 3], vec![1, 4, 2, 5, 3]]);
    let mut cfg = SamplerConfig::new(1.5, 3, 400_000);
    cfg.burn_in = 4_000;
    cfg.thin = 1;
    cfg.leap_size = 2;
    cfg.swap_count = 2;
    cfg.seed = 23;
    let tv = joint_tv(&ds, &cfg);
    assert!(tv <= 0.02, "tv = {tv}");
}

/// Relabeling the items permutes the exact marginal selection
/// probabilities identically.
#[test]
fn posterior_invariant_under_relabeling() {
    let rows = vec![vec![3, 1, 2, 4], vec![2, 1, 4, 3], vec![3, 2, 1, 4]];
    let ds = dataset(rows.clone());
    // relabel by pi: new index of old item i is pi[i]
    let pi = [2usize, 0, 3, 1];
    let mut relabeled = vec![vec![0u32; 4]; rows.len()];
    for (j, row) in rows.iter().enumerate() {
        for (i, &r) in row.iter().enumerate() {
            relabeled[j][pi[i]] = r;
        }
    }
    let ds2 = dataset(relabeled);

    let marginal = |ds: &RankingDataset| -> Vec<f64> {
        let exact = exact_posterior(ds, 2, 1.7);
        let mut w = vec![0.0; 4];
        for ((items, _), p) in &exact {
            for &i in items {
                w[i as usize] += p;
            }
        }
        w
    };
    let w1 = marginal(&ds);
    let w2 = marginal(&ds2);
    for i in 0..4 {
        assert!((w1[i] - w2[pi[i]]).abs() < 1e-9);
    }
}

#[test]
fn accept_rho_certain_and_exponential_cases() {
    let rows: Vec<Ranking> = vec![
        Ranking::new(vec![1, 2, 3]).unwrap(),
        Ranking::new(vec![2, 1, 3]).unwrap(),
    ];
    let rho = Ranking::new(vec![1, 2, 3]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    // equal distance sums, symmetric proposal: always accepted
    let same_dist = Ranking::new(vec![2, 1, 3]).unwrap();
    for _ in 0..50 {
        let got = accept_rho(&rho, &same_dist, -1.0, -1.0, &rows, 2.0, &mut rng).unwrap();
        assert_eq!(got, same_dist);
    }

    // distance sum increases by delta: acceptance frequency ~ exp(-a*delta/n*)
    let worse = Ranking::new(vec![3, 2, 1]).unwrap();
    let delta: i64 = rows
        .iter()
        .map(|r| footrule(r, &worse).unwrap() as i64 - footrule(r, &rho).unwrap() as i64)
        .sum();
    assert!(delta > 0);
    let alpha = 1.0;
    let expect = (-alpha / 3.0 * delta as f64).exp();
    let trials = 40_000;
    let mut hits = 0;
    for _ in 0..trials {
        if accept_rho(&rho, &worse, -1.0, -1.0, &rows, alpha, &mut rng).unwrap() == worse {
            hits += 1;
        }
    }
    let freq = hits as f64 / trials as f64;
    assert!(
        (freq - expect).abs() < 0.01,
        "freq {freq}, expected {expect}"
    );
}

#[test]
fn propose_aset_swaps_and_keeps_retained_ranks() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let aset = ItemSet::new(vec![0, 2, 5], 8).unwrap();
    let rho = Ranking::new(vec![2, 3, 1]).unwrap();
    for _ in 0..300 {
        let (prop_set, prop_rho) = propose_aset(&aset, &rho, 8, 1, &mut rng).unwrap();
        let kept: Vec<usize> = prop_set
            .members()
            .iter()
            .copied()
            .filter(|&i| aset.contains(i))
            .collect();
        assert_eq!(kept.len(), 2);
        assert_eq!(prop_set.len(), 3);
        for &item in &kept {
            let old_pos = aset.members().iter().position(|&m| m == item).unwrap();
            let new_pos = prop_set.members().iter().position(|&m| m == item).unwrap();
            assert_eq!(rho.rank_of(old_pos), prop_rho.rank_of(new_pos));
        }
    }
}

#[test]
fn propose_aset_brings_outside_items_in_uniformly() {
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let n = 6;
    let aset = ItemSet::new(vec![0, 1, 2], n).unwrap();
    let rho = Ranking::new(vec![1, 2, 3]).unwrap();
    let outside = aset.complement(n);
    let trials = 300_000;
    let mut counts = vec![0u64; n];
    for _ in 0..trials {
        let (prop, _) = propose_aset(&aset, &rho, n, 1, &mut rng).unwrap();
        for &m in prop.members() {
            if !aset.contains(m) {
                counts[m] += 1;
            }
        }
    }
    for &item in &outside {
        let freq = counts[item] as f64 / trials as f64;
        let expect = 1.0 / outside.len() as f64;
        assert!(
            (freq - expect).abs() / expect < 0.01,
            "item {item}: freq {freq}"
        );
    }
}

#[test]
fn accept_aset_degenerate_identity_is_certain() {
    let ds = dataset(vec![vec![1, 2, 3, 4], vec![4, 3, 2, 1]]);
    let aset = ItemSet::new(vec![0, 1], 4).unwrap();
    let rho = Ranking::new(vec![1, 2]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let (s, r) =
            accept_aset(&aset, &aset, &rho, &rho, &ds, 2.0, 2, &mut rng).unwrap();
        assert_eq!(s, aset);
        assert_eq!(r, rho);
    }
}

#[test]
fn merged_chains_concatenate_draws() {
    let (ds, _) = gen_top_rank(10, 3, 5, 4.0, 44).unwrap();
    let mut cfg = SamplerConfig::new(4.0, 3, 300);
    cfg.burn_in = 50;
    cfg.seed = 9;
    let single = run_chain(&ds, &cfg).unwrap();
    let merged = run_chains(&ds, &cfg, 3).unwrap();
    assert_eq!(merged.len(), 3 * single.len());
    let rates = merged.acceptance_rho.unwrap();
    assert!(rates > 0.0 && rates < 1.0);
}

#[test]
fn higher_alpha_concentrates_the_selection() {
    let (ds, _) = gen_top_rank(12, 4, 30, 10.0, 55).unwrap();
    let max_w = |alpha: f64| -> f64 {
        let mut cfg = SamplerConfig::new(alpha, 4, 4000);
        cfg.seed = 21;
        let samples = run_chain(&ds, &cfg).unwrap();
        let acc = DrawAccumulator::from_samples(&samples);
        selection_frequencies(&acc)
            .unwrap()
            .w_bar
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    };
    assert!(max_w(10.0) >= max_w(3.0));
}

#[test]
fn distance_trace_is_recorded_when_asked() {
    let (ds, _) = gen_top_rank(10, 3, 5, 4.0, 60).unwrap();
    let mut cfg = SamplerConfig::new(4.0, 3, 200);
    cfg.record_distance_trace = true;
    let samples = run_chain(&ds, &cfg).unwrap();
    let trace = samples.distance_trace.as_ref().unwrap();
    assert_eq!(trace.len(), 200);
}

#[test]
fn from_draws_validates() {
    assert!(PosteriorSamples::from_draws(4, 2, vec![(0, 1, vec![(0, 1), (1, 2)])]).is_ok());
    // not a permutation
    assert!(PosteriorSamples::from_draws(4, 2, vec![(0, 1, vec![(0, 1), (1, 1)])]).is_err());
    // not ascending
    assert!(PosteriorSamples::from_draws(4, 2, vec![(0, 1, vec![(1, 1), (0, 2)])]).is_err());
    // wrong arity
    assert!(PosteriorSamples::from_draws(4, 2, vec![(0, 1, vec![(0, 1)])]).is_err());
    // out of range
    assert!(PosteriorSamples::from_draws(4, 2, vec![(0, 1, vec![(0, 1), (9, 2)])]).is_err());
}
