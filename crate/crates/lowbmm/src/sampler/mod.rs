//! Metropolis-Hastings MCMC over the joint state `(rho, A*)`: a consensus
//! ranking in dimension `n*` and the set of relevant items it ranks.
//!
//! Each iteration first updates `rho` with a leap-and-shift proposal and
//! then updates `A*` by swapping items with the complement, both against
//! the unnormalized posterior
//! `exp{ -(alpha/n*) * sum_j d(R_j|_{A*}, rho) }`.
//!
//! Distance bookkeeping is incremental: a leap touches at most `l + 1`
//! consensus ranks, and a set swap re-derives each assessor's restricted
//! ranking in O(n* L) by counting crossings. A full recomputation backs
//! both paths as a debug-mode oracle.

pub(crate) mod proposal;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::RankingDataset;
use crate::error::{Error, Result};
use crate::mallows::default_leap;
use crate::perm::{footrule, is_permutation, restrict, restrict_into, ItemSet, Ranking};
use crate::seed::derive_seed;

pub use proposal::{leap_and_shift_propose, leap_mass};
use proposal::PermState;

/// Tuning knobs for one chain.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    /// Scale parameter of the Mallows kernel (fixed, tuned off-line).
    pub alpha: f64,
    /// Dimension of the consensus ranking and cardinality of `A*`.
    pub n_star: usize,
    /// Leap size `l` of the consensus proposal, in `1..=n*-1`.
    pub leap_size: usize,
    /// Number of items `L` swapped per set proposal.
    pub swap_count: usize,
    /// Total MCMC iterations `M`.
    pub iterations: u64,
    /// Iterations discarded before storing draws.
    pub burn_in: u64,
    /// Stride between stored draws.
    pub thin: u64,
    pub seed: u64,
    /// Record the total restricted distance after every iteration.
    #[serde(default)]
    pub record_distance_trace: bool,
}

impl SamplerConfig {
    /// Defaults: `l = max(1, round(n*/5))`, `L = 1`, burn-in `M/10`, thin 1
    /// for `M <= 1e5` and 10 above.
    pub fn new(alpha: f64, n_star: usize, iterations: u64) -> Self {
        let leap = default_leap(n_star).min(n_star.saturating_sub(1)).max(1);
        Self {
            alpha,
            n_star,
            leap_size: leap,
            swap_count: 1,
            iterations,
            burn_in: iterations / 10,
            thin: if iterations <= 100_000 { 1 } else { 10 },
            seed: 0,
            record_distance_trace: false,
        }
    }

    /// Checks every field against the universe size, before iteration 1.
    pub fn validate(&self, n_items: usize) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return fail(format!("alpha must be positive and finite, got {}", self.alpha));
        }
        if self.n_star < 2 {
            return fail(format!("n_star must be >= 2, got {}", self.n_star));
        }
        if self.n_star >= n_items {
            return fail(format!(
                "n_star must be smaller than the number of items ({} >= {n_items})",
                self.n_star
            ));
        }
        if self.n_star > u16::MAX as usize {
            return fail(format!("n_star {} exceeds supported maximum", self.n_star));
        }
        if self.leap_size < 1 || self.leap_size > self.n_star - 1 {
            return fail(format!(
                "leap_size must be in 1..={}, got {}",
                self.n_star - 1,
                self.leap_size
            ));
        }
        let max_swap = self.n_star.min(n_items - self.n_star);
        if self.swap_count < 1 || self.swap_count > max_swap {
            return fail(format!(
                "swap_count must be in 1..={max_swap}, got {}",
                self.swap_count
            ));
        }
        if self.iterations == 0 {
            return fail("iterations must be >= 1".into());
        }
        if self.burn_in >= self.iterations {
            return fail(format!(
                "burn_in {} must be smaller than iterations {}",
                self.burn_in, self.iterations
            ));
        }
        if self.thin < 1 {
            return fail("thin must be >= 1".into());
        }
        Ok(())
    }
}

/// Snapshot of the chain state after some iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainState {
    pub rho: Ranking,
    pub aset: ItemSet,
    pub iteration: u64,
}

/// Stored post-burn-in draws plus run metadata. Draw `i` is the pair of an
/// ascending item list and the rank of each listed item.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    pub n_items: usize,
    pub n_star: usize,
    chains: Vec<u32>,
    iterations: Vec<u64>,
    items: Vec<u32>,
    ranks: Vec<u16>,
    pub acceptance_rho: Option<f64>,
    pub acceptance_aset: Option<f64>,
    pub config: Option<SamplerConfig>,
    pub distance_trace: Option<Vec<u64>>,
}

impl PosteriorSamples {
    pub fn empty(n_items: usize, n_star: usize) -> Self {
        Self {
            n_items,
            n_star,
            chains: Vec::new(),
            iterations: Vec::new(),
            items: Vec::new(),
            ranks: Vec::new(),
            acceptance_rho: None,
            acceptance_aset: None,
            config: None,
            distance_trace: None,
        }
    }

    /// Builds samples from explicit draws; validates each one.
    pub fn from_draws<I>(n_items: usize, n_star: usize, draws: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u64, Vec<(usize, u32)>)>,
    {
        if n_star == 0 || n_star > u16::MAX as usize {
            return Err(Error::InvalidConfig(format!(
                "unsupported n_star {n_star}"
            )));
        }
        let mut out = Self::empty(n_items, n_star);
        for (chain, iteration, pairs) in draws {
            if pairs.len() != n_star {
                return Err(Error::DimensionMismatch {
                    expected: n_star,
                    got: pairs.len(),
                });
            }
            let ranks: Vec<u32> = pairs.iter().map(|&(_, r)| r).collect();
            if !is_permutation(&ranks) {
                return Err(Error::InvalidPermutation {
                    len: n_star,
                    row: None,
                });
            }
            for w in pairs.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(Error::InvalidItemSet(
                        "draw items must be strictly ascending".into(),
                    ));
                }
            }
            if pairs.last().map(|&(i, _)| i >= n_items).unwrap_or(false) {
                return Err(Error::InvalidItemSet("draw item out of range".into()));
            }
            out.chains.push(chain);
            out.iterations.push(iteration);
            for (item, rank) in pairs {
                out.items.push(item as u32);
                out.ranks.push(rank as u16);
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    /// `(chain, iteration, items, ranks)` of draw `i`.
    pub fn draw(&self, i: usize) -> (u32, u64, &[u32], &[u16]) {
        let lo = i * self.n_star;
        let hi = lo + self.n_star;
        (
            self.chains[i],
            self.iterations[i],
            &self.items[lo..hi],
            &self.ranks[lo..hi],
        )
    }

    pub fn draws(&self) -> impl Iterator<Item = (u32, u64, &[u32], &[u16])> {
        (0..self.len()).map(move |i| self.draw(i))
    }

    pub fn state_at(&self, i: usize) -> ChainState {
        let (_, iteration, items, ranks) = self.draw(i);
        ChainState {
            rho: Ranking::new(ranks.iter().map(|&r| u32::from(r)).collect())
                .expect("stored draws are permutations"),
            aset: ItemSet::new(items.iter().map(|&i| i as usize).collect(), self.n_items)
                .expect("stored draws are valid sets"),
            iteration,
        }
    }

    /// Concatenates per-chain sample sets (burn-in already applied per
    /// chain); acceptance rates are averaged weighted by draw counts.
    pub fn merge(parts: Vec<PosteriorSamples>) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptySamples)?;
        let (n_items, n_star) = (first.n_items, first.n_star);
        let mut out = Self::empty(n_items, n_star);
        out.config = first.config.clone();
        let mut rho_acc = 0.0;
        let mut aset_acc = 0.0;
        let mut weight = 0.0;
        for part in &parts {
            if part.n_items != n_items || part.n_star != n_star {
                return Err(Error::DimensionMismatch {
                    expected: n_star,
                    got: part.n_star,
                });
            }
            let w = part.len() as f64;
            if let (Some(r), Some(a)) = (part.acceptance_rho, part.acceptance_aset) {
                rho_acc += w * r;
                aset_acc += w * a;
                weight += w;
            }
            out.chains.extend_from_slice(&part.chains);
            out.iterations.extend_from_slice(&part.iterations);
            out.items.extend_from_slice(&part.items);
            out.ranks.extend_from_slice(&part.ranks);
        }
        if weight > 0.0 {
            out.acceptance_rho = Some(rho_acc / weight);
            out.acceptance_aset = Some(aset_acc / weight);
        }
        Ok(out)
    }
}

/// Receiver for kept draws; lets a chain stream to disk without holding
/// every draw in memory.
pub trait DrawSink {
    /// `items` ascending, `ranks[k]` the consensus rank of `items[k]`.
    fn record(&mut self, chain: u32, iteration: u64, items: &[u32], ranks: &[u16]) -> Result<()>;
}

/// In-memory sink building a `PosteriorSamples`.
pub struct MemoryCollector {
    samples: PosteriorSamples,
}

impl MemoryCollector {
    pub fn new(n_items: usize, n_star: usize) -> Self {
        Self {
            samples: PosteriorSamples::empty(n_items, n_star),
        }
    }

    pub fn into_samples(self) -> PosteriorSamples {
        self.samples
    }
}

impl DrawSink for MemoryCollector {
    fn record(&mut self, chain: u32, iteration: u64, items: &[u32], ranks: &[u16]) -> Result<()> {
        self.samples.chains.push(chain);
        self.samples.iterations.push(iteration);
        self.samples.items.extend_from_slice(items);
        self.samples.ranks.extend_from_slice(ranks);
        Ok(())
    }
}

impl<A: DrawSink, B: DrawSink> DrawSink for (A, B) {
    fn record(&mut self, chain: u32, iteration: u64, items: &[u32], ranks: &[u16]) -> Result<()> {
        self.0.record(chain, iteration, items, ranks)?;
        self.1.record(chain, iteration, items, ranks)
    }
}

/// Acceptance statistics of a finished chain.
#[derive(Debug, Clone)]
pub struct ChainStats {
    pub acceptance_rho: f64,
    pub acceptance_aset: f64,
    pub kept_draws: u64,
    /// Total restricted distance after every iteration, when requested.
    pub distance_trace: Option<Vec<u64>>,
}

// ---------------------------------------------------------------------------
// Spec-level single-step operations
// ---------------------------------------------------------------------------

/// Metropolis-Hastings update of the consensus given restricted data rows:
/// accepts `rho_prime` with probability
/// `min{1, exp[(log_backward - log_forward) - (alpha/n*) * (D' - D)]}`.
pub fn accept_rho<R: Rng>(
    rho: &Ranking,
    rho_prime: &Ranking,
    log_forward: f64,
    log_backward: f64,
    restricted_rows: &[Ranking],
    alpha: f64,
    rng: &mut R,
) -> Result<Ranking> {
    let n_star = rho.len();
    if rho_prime.len() != n_star {
        return Err(Error::DimensionMismatch {
            expected: n_star,
            got: rho_prime.len(),
        });
    }
    let mut delta = 0i64;
    for row in restricted_rows {
        delta += footrule(row, rho_prime)? as i64;
        delta -= footrule(row, rho)? as i64;
    }
    let log_acc = (log_backward - log_forward) - alpha / n_star as f64 * delta as f64;
    if log_acc >= 0.0 || rng.random::<f64>().ln() < log_acc {
        Ok(rho_prime.clone())
    } else {
        Ok(rho.clone())
    }
}

/// Proposes a new relevant set by swapping `l` members with `l` items from
/// the complement; retained items keep their consensus ranks and the
/// incomers receive the vacated ranks in uniformly random order. Returns
/// the proposal aligned to the ascending member order of the new set.
pub fn propose_aset<R: Rng>(
    aset: &ItemSet,
    rho: &Ranking,
    n_items: usize,
    l: usize,
    rng: &mut R,
) -> Result<(ItemSet, Ranking)> {
    let n_star = aset.len();
    if rho.len() != n_star {
        return Err(Error::DimensionMismatch {
            expected: n_star,
            got: rho.len(),
        });
    }
    let outside = aset.complement(n_items);
    if l < 1 || l > n_star.min(outside.len()) {
        return Err(Error::InvalidConfig(format!(
            "swap count must be in 1..={}, got {l}",
            n_star.min(outside.len())
        )));
    }
    let out_pos = rand::seq::index::sample(rng, n_star, l).into_vec();
    let in_pos = rand::seq::index::sample(rng, outside.len(), l).into_vec();
    let mut vacated: Vec<u32> = out_pos.iter().map(|&p| rho.rank_of(p)).collect();
    for i in (1..l).rev() {
        let j = rng.random_range(0..=i);
        vacated.swap(i, j);
    }

    let mut pairs: Vec<(usize, u32)> = aset
        .members()
        .iter()
        .enumerate()
        .filter(|(p, _)| !out_pos.contains(p))
        .map(|(p, &item)| (item, rho.rank_of(p)))
        .collect();
    for (k, &p) in in_pos.iter().enumerate() {
        pairs.push((outside[p], vacated[k]));
    }
    pairs.sort_unstable_by_key(|&(item, _)| item);
    let members: Vec<usize> = pairs.iter().map(|&(item, _)| item).collect();
    let ranks: Vec<u32> = pairs.iter().map(|&(_, r)| r).collect();
    Ok((ItemSet::new(members, n_items)?, Ranking::new(ranks)?))
}

/// Acceptance step for a set proposal: the proposal is symmetric, so only
/// the likelihood ratio of restricted distances remains.
#[allow(clippy::too_many_arguments)]
pub fn accept_aset<R: Rng>(
    aset: &ItemSet,
    aset_prop: &ItemSet,
    rho: &Ranking,
    rho_prop: &Ranking,
    data: &RankingDataset,
    alpha: f64,
    n_star: usize,
    rng: &mut R,
) -> Result<(ItemSet, Ranking)> {
    let mut delta = 0i64;
    for j in 0..data.n_assessors() {
        let row = data.ranking(j)?;
        delta += footrule(&restrict(&row, aset_prop)?, rho_prop)? as i64;
        delta -= footrule(&restrict(&row, aset)?, rho)? as i64;
    }
    let log_acc = -alpha / n_star as f64 * delta as f64;
    if log_acc >= 0.0 || rng.random::<f64>().ln() < log_acc {
        Ok((aset_prop.clone(), rho_prop.clone()))
    } else {
        Ok((aset.clone(), rho.clone()))
    }
}

// ---------------------------------------------------------------------------
// Chain internals
// ---------------------------------------------------------------------------

struct ChainCore<'d> {
    data: &'d [u32],
    n: usize,
    n_rows: usize,
    n_star: usize,
    rate: f64,
    leap: usize,
    swap: usize,
    /// slot -> item currently in the set
    slot_item: Vec<usize>,
    in_set: Vec<bool>,
    outside: Vec<usize>,
    /// item -> index in `outside` (valid only while outside)
    outside_pos: Vec<usize>,
    /// consensus over slots
    rho: PermState,
    /// N x n* restricted data ranks, assessor-major
    sub: Vec<u32>,
    prop_sub: Vec<u32>,
    total_dist: u64,
    rng: ChaCha8Rng,
    // scratch
    changes: Vec<(usize, u32, u32)>,
    out_slots: Vec<usize>,
    in_items: Vec<usize>,
    vacated: Vec<u32>,
    is_out: Vec<bool>,
    out_dr: Vec<u32>,
    in_dr: Vec<u32>,
    retained_below: Vec<u32>,
    emit_order: Vec<usize>,
    emit_items: Vec<u32>,
    emit_ranks: Vec<u16>,
}

impl<'d> ChainCore<'d> {
    fn init(data: &'d RankingDataset, cfg: &SamplerConfig, chain_seed: u64) -> Self {
        let n = data.n_items();
        let n_rows = data.n_assessors();
        let n_star = cfg.n_star;
        let mut rng = ChaCha8Rng::seed_from_u64(chain_seed);

        // rho_0 uniform over P_{n*}, A*_0 uniform over n*-subsets
        let rho = PermState::random(n_star, &mut rng);
        let slot_item = rand::seq::index::sample(&mut rng, n, n_star).into_vec();

        let mut in_set = vec![false; n];
        for &item in &slot_item {
            in_set[item] = true;
        }
        let mut outside = Vec::with_capacity(n - n_star);
        let mut outside_pos = vec![usize::MAX; n];
        for item in 0..n {
            if !in_set[item] {
                outside_pos[item] = outside.len();
                outside.push(item);
            }
        }

        let mut sub = vec![0u32; n_rows * n_star];
        let mut scratch = Vec::with_capacity(n_star);
        for j in 0..n_rows {
            restrict_into(data.row(j), &slot_item, &mut scratch);
            sub[j * n_star..(j + 1) * n_star].copy_from_slice(&scratch);
        }
        let total_dist = Self::distance_sum(&sub, rho.ranks(), n_rows, n_star);

        Self {
            data: data.flat_rows(),
            n,
            n_rows,
            n_star,
            rate: cfg.alpha / n_star as f64,
            leap: cfg.leap_size,
            swap: cfg.swap_count,
            slot_item,
            in_set,
            outside,
            outside_pos,
            rho,
            sub,
            prop_sub: vec![0u32; n_rows * n_star],
            total_dist,
            rng,
            changes: Vec::with_capacity(cfg.leap_size + 1),
            out_slots: Vec::new(),
            in_items: Vec::new(),
            vacated: Vec::new(),
            is_out: vec![false; n_star],
            out_dr: vec![0; cfg.swap_count],
            in_dr: vec![0; cfg.swap_count],
            retained_below: vec![0; cfg.swap_count],
            emit_order: Vec::with_capacity(n_star),
            emit_items: Vec::with_capacity(n_star),
            emit_ranks: Vec::with_capacity(n_star),
        }
    }

    fn distance_sum(sub: &[u32], rho: &[u32], n_rows: usize, n_star: usize) -> u64 {
        let mut total = 0u64;
        for j in 0..n_rows {
            let base = j * n_star;
            for slot in 0..n_star {
                total +=
                    (i64::from(sub[base + slot]) - i64::from(rho[slot])).unsigned_abs();
            }
        }
        total
    }

    fn rho_step(&mut self) -> bool {
        let mv = self.rho.propose(self.leap, &mut self.rng);
        self.rho.collect_changes(&mv, &mut self.changes);
        let mut delta = 0i64;
        for j in 0..self.n_rows {
            let base = j * self.n_star;
            for &(slot, old, new) in &self.changes {
                let s = i64::from(self.sub[base + slot]);
                delta += (s - i64::from(new)).abs() - (s - i64::from(old)).abs();
            }
        }
        let log_acc = (mv.log_backward - mv.log_forward) - self.rate * delta as f64;
        if log_acc >= 0.0 || self.rng.random::<f64>().ln() < log_acc {
            self.rho.apply(&mv);
            self.total_dist = (self.total_dist as i64 + delta) as u64;
            debug_assert!(is_permutation(self.rho.ranks()));
            true
        } else {
            false
        }
    }

    fn aset_step(&mut self) -> bool {
        let l = self.swap;
        self.out_slots = rand::seq::index::sample(&mut self.rng, self.n_star, l).into_vec();
        let in_pos = rand::seq::index::sample(&mut self.rng, self.outside.len(), l);
        self.in_items.clear();
        self.in_items.extend(in_pos.iter().map(|p| self.outside[p]));
        self.vacated.clear();
        self.vacated
            .extend(self.out_slots.iter().map(|&s| self.rho.rank_of(s)));
        for i in (1..l).rev() {
            let j = self.rng.random_range(0..=i);
            self.vacated.swap(i, j);
        }
        for &s in &self.out_slots {
            self.is_out[s] = true;
        }

        let mut new_total = 0u64;
        for j in 0..self.n_rows {
            let drow = &self.data[j * self.n..(j + 1) * self.n];
            let base = j * self.n_star;
            for k in 0..l {
                self.out_dr[k] = drow[self.slot_item[self.out_slots[k]]];
                self.in_dr[k] = drow[self.in_items[k]];
                self.retained_below[k] = 0;
            }
            for slot in 0..self.n_star {
                if self.is_out[slot] {
                    continue;
                }
                let dr = drow[self.slot_item[slot]];
                let mut shift = 0i32;
                for k in 0..l {
                    shift += i32::from(self.in_dr[k] < dr) - i32::from(self.out_dr[k] < dr);
                    self.retained_below[k] += u32::from(dr < self.in_dr[k]);
                }
                let ns = (self.sub[base + slot] as i32 + shift) as u32;
                self.prop_sub[base + slot] = ns;
                new_total += (i64::from(ns) - i64::from(self.rho.rank_of(slot))).unsigned_abs();
            }
            for k in 0..l {
                // rank of the k-th incomer within the proposed set
                let mut ns = 1 + self.retained_below[k];
                for k2 in 0..l {
                    if k2 != k && self.in_dr[k2] < self.in_dr[k] {
                        ns += 1;
                    }
                }
                self.prop_sub[base + self.out_slots[k]] = ns;
                new_total += (i64::from(ns) - i64::from(self.vacated[k])).unsigned_abs();
            }
        }
        for &s in &self.out_slots {
            self.is_out[s] = false;
        }

        let delta = new_total as i64 - self.total_dist as i64;
        let log_acc = -self.rate * delta as f64;
        let accept = log_acc >= 0.0 || self.rng.random::<f64>().ln() < log_acc;
        if accept {
            for k in 0..l {
                let slot = self.out_slots[k];
                let old_item = self.slot_item[slot];
                let new_item = self.in_items[k];
                self.slot_item[slot] = new_item;
                self.in_set[old_item] = false;
                self.in_set[new_item] = true;
                let p = self.outside_pos[new_item];
                self.outside[p] = old_item;
                self.outside_pos[old_item] = p;
                self.outside_pos[new_item] = usize::MAX;
                self.rho.set_rank(slot, self.vacated[k]);
            }
            std::mem::swap(&mut self.sub, &mut self.prop_sub);
            self.total_dist = new_total;
            debug_assert!(is_permutation(self.rho.ranks()));
            debug_assert_eq!(self.in_set.iter().filter(|&&b| b).count(), self.n_star);
        }
        accept
    }

    /// Full-recomputation oracle for the incremental bookkeeping.
    #[cfg(debug_assertions)]
    fn check_consistency(&self) {
        let mut scratch = Vec::with_capacity(self.n_star);
        let mut expect = vec![0u32; self.n_rows * self.n_star];
        for j in 0..self.n_rows {
            restrict_into(
                &self.data[j * self.n..(j + 1) * self.n],
                &self.slot_item,
                &mut scratch,
            );
            expect[j * self.n_star..(j + 1) * self.n_star].copy_from_slice(&scratch);
        }
        assert_eq!(self.sub, expect, "incremental restricted ranks drifted");
        let dist = Self::distance_sum(&self.sub, self.rho.ranks(), self.n_rows, self.n_star);
        assert_eq!(self.total_dist, dist, "incremental distance sum drifted");
    }

    fn emit(&mut self, chain: u32, iteration: u64, sink: &mut dyn DrawSink) -> Result<()> {
        self.emit_order.clear();
        self.emit_order.extend(0..self.n_star);
        let slot_item = &self.slot_item;
        self.emit_order.sort_unstable_by_key(|&slot| slot_item[slot]);
        self.emit_items.clear();
        self.emit_ranks.clear();
        for &s in &self.emit_order {
            self.emit_items.push(self.slot_item[s] as u32);
            self.emit_ranks.push(self.rho.rank_of(s) as u16);
        }
        sink.record(chain, iteration, &self.emit_items, &self.emit_ranks)
    }
}

/// Runs one chain, streaming kept draws into `sink`.
pub fn run_chain_with_sink(
    data: &RankingDataset,
    cfg: &SamplerConfig,
    chain_index: u32,
    sink: &mut dyn DrawSink,
) -> Result<ChainStats> {
    cfg.validate(data.n_items())?;
    if data.n_assessors() == 0 {
        return Err(Error::DegenerateInput("dataset has no assessors".into()));
    }
    let chain_seed = if chain_index == 0 {
        cfg.seed
    } else {
        derive_seed(cfg.seed, "chain", u64::from(chain_index))
    };
    let mut core = ChainCore::init(data, cfg, chain_seed);
    #[cfg(debug_assertions)]
    core.check_consistency();

    let mut accepted_rho = 0u64;
    let mut accepted_aset = 0u64;
    let mut kept = 0u64;
    let mut trace = cfg
        .record_distance_trace
        .then(|| Vec::with_capacity(cfg.iterations as usize));
    for m in 1..=cfg.iterations {
        accepted_rho += u64::from(core.rho_step());
        accepted_aset += u64::from(core.aset_step());
        if let Some(t) = trace.as_mut() {
            t.push(core.total_dist);
        }
        if m > cfg.burn_in && (m - cfg.burn_in) % cfg.thin == 0 {
            core.emit(chain_index, m, sink)?;
            kept += 1;
        }
        #[cfg(debug_assertions)]
        if m % 512 == 0 {
            core.check_consistency();
        }
    }
    #[cfg(debug_assertions)]
    core.check_consistency();

    Ok(ChainStats {
        acceptance_rho: accepted_rho as f64 / cfg.iterations as f64,
        acceptance_aset: accepted_aset as f64 / cfg.iterations as f64,
        kept_draws: kept,
        distance_trace: trace,
    })
}

/// Runs one chain and returns the kept draws in memory.
pub fn run_chain(data: &RankingDataset, cfg: &SamplerConfig) -> Result<PosteriorSamples> {
    let mut collector = MemoryCollector::new(data.n_items(), cfg.n_star);
    let stats = run_chain_with_sink(data, cfg, 0, &mut collector)?;
    let mut samples = collector.into_samples();
    samples.acceptance_rho = Some(stats.acceptance_rho);
    samples.acceptance_aset = Some(stats.acceptance_aset);
    samples.config = Some(cfg.clone());
    samples.distance_trace = stats.distance_trace;
    Ok(samples)
}

/// Runs `n_chains` independent chains with split seeds (in parallel) and
/// merges the kept draws.
pub fn run_chains(
    data: &RankingDataset,
    cfg: &SamplerConfig,
    n_chains: u32,
) -> Result<PosteriorSamples> {
    if n_chains == 0 {
        return Err(Error::InvalidConfig("need at least one chain".into()));
    }
    if n_chains == 1 {
        return run_chain(data, cfg);
    }
    cfg.validate(data.n_items())?;
    use rayon::prelude::*;
    let parts: Result<Vec<PosteriorSamples>> = (0..n_chains)
        .into_par_iter()
        .map(|c| {
            let mut collector = MemoryCollector::new(data.n_items(), cfg.n_star);
            let stats = run_chain_with_sink(data, cfg, c, &mut collector)?;
            let mut samples = collector.into_samples();
            samples.acceptance_rho = Some(stats.acceptance_rho);
            samples.acceptance_aset = Some(stats.acceptance_aset);
            samples.config = Some(cfg.clone());
            Ok(samples)
        })
        .collect();
    PosteriorSamples::merge(parts?)
}

#[cfg(test)]
mod tests;
