//! Dataset pattern analysis: how much of a user's next basket is explained
//! by their own repeat purchases versus their nearest neighbors' items, how
//! repeat purchases space out over time, and how both interact with the
//! decay rate used to build user vectors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, Write};

use rayon::prelude::*;

use crate::corpus::{BasketSequence, Corpus};
use crate::knn::{build_index, NeighborSet};
use crate::representation::{build_user_vector, pif_vector, DecayConfig, UserVector};
use crate::{Error, Result};

/// Which per-user vector the neighbor search runs on.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// Raw basket-presence counts.
    Frequency,
    /// Temporally decayed vectors.
    Decayed(DecayConfig),
}

impl Representation {
    fn vector(&self, history: &BasketSequence, dim: usize) -> Result<UserVector> {
        match self {
            Representation::Frequency => pif_vector(history, dim),
            Representation::Decayed(cfg) => build_user_vector(history, dim, cfg),
        }
    }
}

/// Where target-basket items come from, averaged over users: the user's own
/// history (`recall_repeat`), the union of the k nearest neighbors'
/// histories (`recall_collab`), both at once (`recall_both`), or neither
/// (`recall_unseen`). The four satisfy
/// `recall_repeat + recall_collab - recall_both + recall_unseen = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternRatios {
    pub neighbors: usize,
    /// Users the averages run over (those with at least two baskets).
    pub users: usize,
    pub recall_repeat: f64,
    pub recall_collab: f64,
    pub recall_both: f64,
    pub recall_unseen: f64,
}

struct Participant {
    history: BasketSequence,
    /// Distinct items in the history, ascending.
    own_items: Vec<u32>,
    /// The held-out last basket.
    target: Vec<u32>,
}

fn participants(corpus: &Corpus) -> Vec<Participant> {
    (0..corpus.n_users())
        .filter_map(|u| {
            let (history, target) = corpus.user(u).hold_out_last().ok()?;
            let own_items: Vec<u32> = history
                .baskets
                .iter()
                .flat_map(|b| b.iter().copied())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            Some(Participant { history, own_items, target })
        })
        .collect()
}

fn ratios_at_k(parts: &[Participant], all_neighbors: &[NeighborSet], k: usize) -> PatternRatios {
    let per_user: Vec<[f64; 4]> = parts
        .par_iter()
        .zip(all_neighbors)
        .map(|(part, neighbors)| {
            let neighbor_items: BTreeSet<u32> = neighbors
                .prefix(k)
                .iter()
                .flat_map(|n| parts[n.user].own_items.iter().copied())
                .collect();
            let t = part.target.len() as f64;
            let mut counts = [0usize; 4];
            for item in &part.target {
                let in_own = part.own_items.binary_search(item).is_ok();
                let in_neighbors = neighbor_items.contains(item);
                counts[0] += usize::from(in_own);
                counts[1] += usize::from(in_neighbors);
                counts[2] += usize::from(in_own && in_neighbors);
                counts[3] += usize::from(!in_own && !in_neighbors);
            }
            [
                counts[0] as f64 / t,
                counts[1] as f64 / t,
                counts[2] as f64 / t,
                counts[3] as f64 / t,
            ]
        })
        .collect();
    let n = per_user.len() as f64;
    let mut mean = [0.0; 4];
    for row in &per_user {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    PatternRatios {
        neighbors: k,
        users: parts.len(),
        recall_repeat: mean[0],
        recall_collab: mean[1],
        recall_both: mean[2],
        recall_unseen: mean[3],
    }
}

fn neighbor_sets(
    parts: &[Participant],
    representation: &Representation,
    dim: usize,
    k: usize,
) -> Result<Vec<NeighborSet>> {
    let vectors: Vec<UserVector> = parts
        .par_iter()
        .map(|p| representation.vector(&p.history, dim))
        .collect::<Result<_>>()?;
    let index = build_index(&vectors)?;
    vectors
        .par_iter()
        .enumerate()
        .map(|(row, query)| index.nearest(query, k, Some(row)))
        .collect()
}

fn check_enough_participants(parts: &[Participant], k: usize) -> Result<()> {
    if parts.len() < k + 1 {
        return Err(Error::data(format!(
            "pattern analysis with {k} neighbors needs at least {} users with two or more baskets, found {}",
            k + 1,
            parts.len()
        )));
    }
    Ok(())
}

/// Measures, for every user with at least two baskets, where the items of
/// the held-out last basket come from, with neighbors searched over the
/// remaining baskets under the given representation.
pub fn pattern_ratios(
    corpus: &Corpus,
    neighbors: usize,
    representation: &Representation,
) -> Result<PatternRatios> {
    if neighbors == 0 {
        return Err(Error::config("pattern analysis needs at least one neighbor"));
    }
    let parts = participants(corpus);
    check_enough_participants(&parts, neighbors)?;
    let sets = neighbor_sets(&parts, representation, corpus.dim(), neighbors)?;
    Ok(ratios_at_k(&parts, &sets, neighbors))
}

/// One decay setting of the sweep: both decay rates set to `ratio`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub ratio: f64,
    pub ratios: PatternRatios,
}

/// Sweeps the decay rate (applied as both the basket and group decay, with a
/// single group) against neighbor count, reporting the pattern ratios at
/// every combination — the cheap way to see how much decay shifts mass from
/// repeat items to collaborative ones before running a full grid search.
pub fn unseen_sweep(
    corpus: &Corpus,
    neighbor_counts: &[usize],
    decay_ratios: &[f64],
) -> Result<Vec<SweepPoint>> {
    if neighbor_counts.is_empty() || decay_ratios.is_empty() {
        return Err(Error::config("the sweep needs at least one neighbor count and one decay ratio"));
    }
    if neighbor_counts.contains(&0) {
        return Err(Error::config("neighbor counts must be at least 1"));
    }
    let k_max = *neighbor_counts.iter().max().expect("non-empty");
    let parts = participants(corpus);
    check_enough_participants(&parts, k_max)?;

    let mut points = Vec::with_capacity(decay_ratios.len() * neighbor_counts.len());
    for &ratio in decay_ratios {
        let cfg = DecayConfig {
            groups: 1,
            basket_decay: ratio,
            group_decay: ratio,
            blend: 0.5,
            neighbors: k_max,
            basket_size: 10,
        };
        cfg.validate()?;
        let sets = neighbor_sets(&parts, &Representation::Decayed(cfg), corpus.dim(), k_max)?;
        for &k in neighbor_counts {
            points.push(SweepPoint { ratio, ratios: ratios_at_k(&parts, &sets, k) });
        }
    }
    Ok(points)
}

/// One bucket of the repeat-gap histogram: how many consecutive
/// same-item purchase pairs are `gap` baskets apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBucket {
    pub gap: usize,
    pub count: u64,
    /// Share of all consecutive repeat pairs.
    pub fraction: f64,
}

/// Histogram of basket-index gaps between consecutive purchases of the same
/// item, over every user's full sequence. A gap of 1 means the item was
/// bought again in the very next basket. Users who never repeat an item
/// contribute nothing; an empty histogram means the corpus has no repeat
/// purchases at all.
pub fn gap_histogram(corpus: &Corpus) -> Vec<GapBucket> {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for user in corpus.users() {
        let mut last_seen: HashMap<u32, usize> = HashMap::new();
        for (i, basket) in user.baskets.iter().enumerate() {
            for &item in basket {
                if let Some(prev) = last_seen.insert(item, i) {
                    *counts.entry(i - prev).or_insert(0) += 1;
                }
            }
        }
    }
    let total: u64 = counts.values().sum();
    counts
        .into_iter()
        .map(|(gap, count)| GapBucket { gap, count, fraction: count as f64 / total as f64 })
        .collect()
}

/// Writes pattern ratios as `key: value` lines.
pub fn write_pattern_ratios(ratios: &PatternRatios, writer: &mut impl Write) -> Result<()> {
    let mut w = io::BufWriter::new(writer);
    writeln!(w, "tifuknn-patterns v1")?;
    writeln!(w, "neighbors: {}", ratios.neighbors)?;
    writeln!(w, "users: {}", ratios.users)?;
    writeln!(w, "recall_repeat: {:.6}", ratios.recall_repeat)?;
    writeln!(w, "recall_collab: {:.6}", ratios.recall_collab)?;
    writeln!(w, "recall_both: {:.6}", ratios.recall_both)?;
    writeln!(w, "recall_unseen: {:.6}", ratios.recall_unseen)?;
    w.flush()?;
    Ok(())
}

/// Writes the gap histogram as a tab-separated table.
pub fn write_gap_histogram(buckets: &[GapBucket], writer: &mut impl Write) -> Result<()> {
    let mut w = io::BufWriter::new(writer);
    writeln!(w, "#gap\tcount\tfraction")?;
    for b in buckets {
        writeln!(w, "{}\t{}\t{:.6}", b.gap, b.count, b.fraction)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the decay sweep as a tab-separated table, one row per
/// (ratio, neighbor count) point.
pub fn write_unseen_sweep(points: &[SweepPoint], writer: &mut impl Write) -> Result<()> {
    let mut w = io::BufWriter::new(writer);
    writeln!(
        w,
        "#ratio\tneighbors\trecall_repeat\trecall_collab\trecall_both\trecall_unseen"
    )?;
    for p in points {
        writeln!(
            w,
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            p.ratio,
            p.ratios.neighbors,
            p.ratios.recall_repeat,
            p.ratios.recall_collab,
            p.ratios.recall_both,
            p.ratios.recall_unseen
        )?;
    }
    w.flush()?;
    Ok(())
}
