//! User vector representations: raw per-item basket counts, 0/1 presence
//! unions, and the hierarchically time-decayed frequency vector that the main
//! predictor runs on.

use std::collections::BTreeMap;

use crate::corpus::BasketSequence;
use crate::{Error, Result};

/// Vectors with at most this many dimensions are stored dense; larger ones as
/// sorted (index, value) pairs. Both stores carry identical numbers.
pub const DENSE_DIM_LIMIT: usize = 65536;

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(Vec<f64>),
    Sparse(Vec<(u32, f64)>),
}

/// One user's representation vector over the dense item space.
#[derive(Debug, Clone, PartialEq)]
pub struct UserVector {
    pub user_id: String,
    dim: usize,
    storage: Storage,
}

impl UserVector {
    fn from_entries(user_id: String, dim: usize, entries: BTreeMap<u32, f64>) -> UserVector {
        let storage = if dim <= DENSE_DIM_LIMIT {
            let mut dense = vec![0.0; dim];
            for (idx, value) in entries {
                dense[idx as usize] = value;
            }
            Storage::Dense(dense)
        } else {
            Storage::Sparse(entries.into_iter().collect())
        };
        UserVector { user_id, dim, storage }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Value at dense item index `idx` (0.0 where nothing was recorded).
    pub fn get(&self, idx: u32) -> f64 {
        match &self.storage {
            Storage::Dense(v) => v[idx as usize],
            Storage::Sparse(pairs) => pairs
                .binary_search_by_key(&idx, |&(i, _)| i)
                .map_or(0.0, |pos| pairs[pos].1),
        }
    }

    /// Non-zero entries in ascending index order.
    pub fn nonzeros(&self) -> Vec<(u32, f64)> {
        match &self.storage {
            Storage::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .map(|(i, &x)| (i as u32, x))
                .collect(),
            Storage::Sparse(pairs) => pairs.iter().copied().filter(|&(_, x)| x != 0.0).collect(),
        }
    }

    /// Materializes the full dense vector (for blending and tests).
    pub fn to_dense(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(v) => v.clone(),
            Storage::Sparse(pairs) => {
                let mut dense = vec![0.0; self.dim];
                for &(i, x) in pairs {
                    dense[i as usize] = x;
                }
                dense
            }
        }
    }
}

/// Hyperparameters of the decayed representation and of the predictor built
/// on it: basket grouping, the two decay ratios, the own-vs-neighbor blend,
/// the neighbor count, and the recommended basket size.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayConfig {
    /// Number of temporal groups the history is partitioned into (m ≥ 1).
    pub groups: usize,
    /// Within-group decay ratio applied per basket step, in (0, 1].
    pub basket_decay: f64,
    /// Across-group decay ratio, in (0, 1].
    pub group_decay: f64,
    /// Weight of the user's own vector vs. the neighbor average, in [0, 1].
    pub blend: f64,
    /// How many nearest neighbors to aggregate (k ≥ 1).
    pub neighbors: usize,
    /// How many items a predicted basket contains (s ≥ 1).
    pub basket_size: usize,
}

impl Default for DecayConfig {
    fn default() -> Self {
        crate::presets::INSTACART.config.clone()
    }
}

impl DecayConfig {
    pub fn validate(&self) -> Result<()> {
        if self.groups < 1 {
            return Err(Error::config("groups must be at least 1"));
        }
        for (name, r) in [("basket_decay", self.basket_decay), ("group_decay", self.group_decay)] {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::config(format!("{name} must be in (0, 1], got {r}")));
            }
        }
        if !(0.0..=1.0).contains(&self.blend) {
            return Err(Error::config(format!("blend must be in [0, 1], got {}", self.blend)));
        }
        if self.neighbors < 1 {
            return Err(Error::config("neighbors must be at least 1"));
        }
        if self.basket_size < 1 {
            return Err(Error::config("basket_size must be at least 1"));
        }
        Ok(())
    }
}

fn check_dim(history: &BasketSequence, dim: usize) -> Result<()> {
    for basket in &history.baskets {
        if let Some(&max) = basket.last() {
            if max as usize >= dim {
                return Err(Error::data(format!(
                    "item id {max} out of range for dimension {dim}"
                )));
            }
        }
    }
    Ok(())
}

/// Personalized item frequency: entry j counts the history baskets containing
/// item j (an item twice in one basket still counts once — baskets are sets).
pub fn pif_vector(history: &BasketSequence, dim: usize) -> Result<UserVector> {
    check_dim(history, dim)?;
    let mut entries: BTreeMap<u32, f64> = BTreeMap::new();
    for basket in &history.baskets {
        for &item in basket {
            *entries.entry(item).or_insert(0.0) += 1.0;
        }
    }
    Ok(UserVector::from_entries(history.user_id.clone(), dim, entries))
}

/// 0/1 presence vector: entry j is 1 when any history basket contains item j.
pub fn union_vector(history: &BasketSequence, dim: usize) -> Result<UserVector> {
    check_dim(history, dim)?;
    let mut entries: BTreeMap<u32, f64> = BTreeMap::new();
    for basket in &history.baskets {
        for &item in basket {
            entries.insert(item, 1.0);
        }
    }
    Ok(UserVector::from_entries(history.user_id.clone(), dim, entries))
}

/// Sizes of the temporal groups for `t` baskets in up to `m` groups, oldest
/// group first.
///
/// With `m_eff = min(m, t)`: when `t` divides evenly the groups all have size
/// `t / m_eff`; otherwise baskets are taken in runs of `x = ceil(t / m_eff)`
/// from the newest end, which fills `ceil(t / x)` groups and leaves the oldest
/// group with the remainder. (For most shapes `ceil(t / x) = m_eff`; where a
/// full partition into `m_eff` groups of `x` is impossible — e.g. t=5, m=4 —
/// the group count shrinks rather than producing an empty group.)
fn group_sizes(t: usize, m: usize) -> Vec<usize> {
    let m_eff = m.min(t);
    if t % m_eff == 0 {
        return vec![t / m_eff; m_eff];
    }
    let x = t.div_ceil(m_eff);
    let n_groups = t.div_ceil(x);
    let mut sizes = vec![x; n_groups];
    sizes[0] = t - x * (n_groups - 1);
    sizes
}

/// The hierarchically time-decayed user vector.
///
/// The `t` history baskets are partitioned into temporal groups (as even as
/// possible, remainder in the oldest); within group `i` of size `g`, the `j`-th basket
/// (1-indexed, oldest first) is weighted `basket_decay^(g-j)` and the group
/// vector is the weighted sum divided by `g`. Group `i` of `n` is then
/// weighted `group_decay^(n-i)` and the user vector is that weighted sum
/// divided by `n`. All sums run in fixed ascending item order, so repeated
/// calls are bit-identical.
pub fn build_user_vector(
    history: &BasketSequence,
    dim: usize,
    cfg: &DecayConfig,
) -> Result<UserVector> {
    cfg.validate()?;
    check_dim(history, dim)?;
    let t = history.baskets.len();
    if t == 0 {
        return Err(Error::data(format!("user '{}' has an empty history", history.user_id)));
    }

    let sizes = group_sizes(t, cfg.groups);
    let n_groups = sizes.len();
    let mut combined: BTreeMap<u32, f64> = BTreeMap::new();
    let mut cursor = 0usize;
    for (i, &g) in sizes.iter().enumerate() {
        let mut group_acc: BTreeMap<u32, f64> = BTreeMap::new();
        for j in 0..g {
            let weight = cfg.basket_decay.powi((g - 1 - j) as i32);
            for &item in &history.baskets[cursor + j] {
                *group_acc.entry(item).or_insert(0.0) += weight;
            }
        }
        let group_weight = cfg.group_decay.powi((n_groups - 1 - i) as i32);
        for (item, sum) in group_acc {
            *combined.entry(item).or_insert(0.0) += group_weight * (sum / g as f64);
        }
        cursor += g;
    }
    for value in combined.values_mut() {
        *value /= n_groups as f64;
    }
    Ok(UserVector::from_entries(history.user_id.clone(), dim, combined))
}
