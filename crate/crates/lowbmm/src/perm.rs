//! Permutation and ranking primitives: validation, distances, the rank
//! operator, and restriction of full rankings to item subsets.
//!
//! A ranking stores, for each item, its rank value: 1 is the most preferred.
//! Items are addressed by 0-based index throughout the crate; string
//! identifiers exist only at the I/O boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complete ranking of `m` items: `ranks()[i]` is the rank of item `i`,
/// and the values form a permutation of `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ranking(Vec<u32>);

impl Ranking {
    pub fn new(ranks: Vec<u32>) -> Result<Self> {
        if !is_permutation(&ranks) {
            return Err(Error::InvalidPermutation {
                len: ranks.len(),
                row: None,
            });
        }
        Ok(Self(ranks))
    }

    /// The identity ranking `(1, 2, ..., m)`.
    pub fn identity(m: usize) -> Self {
        Self((1..=m as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ranks(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// Rank of item `i` (0-based item index, 1-based rank value).
    pub fn rank_of(&self, i: usize) -> u32 {
        self.0[i]
    }
}

/// True iff `ranks` contains every value in `1..=len` exactly once.
pub fn is_permutation(ranks: &[u32]) -> bool {
    let m = ranks.len();
    let mut seen = vec![false; m];
    for &r in ranks {
        if r == 0 || r as usize > m || seen[r as usize - 1] {
            return false;
        }
        seen[r as usize - 1] = true;
    }
    true
}

/// An ordered set of item indices (0-based, strictly ascending).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemSet(Vec<usize>);

impl ItemSet {
    /// Builds a set from arbitrary-order indices; sorts and rejects
    /// duplicates or indices outside `0..n_items`.
    pub fn new(mut members: Vec<usize>, n_items: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidItemSet("empty set".into()));
        }
        members.sort_unstable();
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidItemSet(format!("duplicate item {}", w[0])));
            }
        }
        if let Some(&last) = members.last() {
            if last >= n_items {
                return Err(Error::InvalidItemSet(format!(
                    "item {last} out of range for universe of {n_items}"
                )));
            }
        }
        Ok(Self(members))
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    /// Ascending complement within a universe of `n_items`.
    pub fn complement(&self, n_items: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n_items - self.0.len());
        let mut it = self.0.iter().peekable();
        for i in 0..n_items {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        out
    }
}

fn check_same_len(a: &Ranking, b: &Ranking) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(())
}

/// Footrule distance `sum_i |a_i - b_i|`.
pub fn footrule(a: &Ranking, b: &Ranking) -> Result<u64> {
    check_same_len(a, b)?;
    Ok(footrule_slices(a.ranks(), b.ranks()))
}

pub(crate) fn footrule_slices(a: &[u32], b: &[u32]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (i64::from(x) - i64::from(y)).unsigned_abs())
        .sum()
}

/// Kendall distance: the number of discordant item pairs.
pub fn kendall(a: &Ranking, b: &Ranking) -> Result<u64> {
    check_same_len(a, b)?;
    Ok(kendall_slices(a.ranks(), b.ranks()))
}

pub(crate) fn kendall_slices(a: &[u32], b: &[u32]) -> u64 {
    let m = a.len();
    let mut count = 0u64;
    for i in 0..m {
        for j in i + 1..m {
            let da = a[i].cmp(&a[j]);
            let db = b[i].cmp(&b[j]);
            if da != db {
                count += 1;
            }
        }
    }
    count
}

/// Ranks a vector of scores: the smallest value gets rank 1 and ties are
/// broken by ascending index, so the result is always a permutation.
pub fn rank_vector(values: &[f64]) -> Result<Ranking> {
    if values.is_empty() {
        return Err(Error::DegenerateInput("empty score vector".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite score".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap().then(i.cmp(&j)));
    let mut ranks = vec![0u32; values.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos as u32 + 1;
    }
    Ok(Ranking(ranks))
}

/// Restriction of a full ranking to an item subset: extracts the members'
/// ranks and re-ranks them into a permutation of `1..=|s|`, aligned with the
/// ascending member order of `s`.
pub fn restrict(r: &Ranking, s: &ItemSet) -> Result<Ranking> {
    if let Some(&last) = s.members().last() {
        if last >= r.len() {
            return Err(Error::InvalidItemSet(format!(
                "item {last} out of range for ranking of length {}",
                r.len()
            )));
        }
    }
    let mut sub = Vec::with_capacity(s.len());
    restrict_into(r.ranks(), s.members(), &mut sub);
    Ok(Ranking(sub))
}

/// Restriction on raw slices, writing into `out` (cleared first).
/// Members must be in-range; full ranks are distinct so no ties arise.
pub(crate) fn restrict_into(full: &[u32], members: &[usize], out: &mut Vec<u32>) {
    out.clear();
    let k = members.len();
    // order[j] = position (within members) of the j-th smallest full rank
    let mut order: Vec<u32> = (0..k as u32).collect();
    order.sort_unstable_by_key(|&p| full[members[p as usize]]);
    out.resize(k, 0);
    for (pos, &p) in order.iter().enumerate() {
        out[p as usize] = pos as u32 + 1;
    }
}

/// Maximum footrule distance attainable between two rankings of dimension
/// `m`: `floor(m^2 / 2)`, reached by the reversal.
pub fn max_footrule(m: usize) -> u64 {
    (m as u64 * m as u64) / 2
}
