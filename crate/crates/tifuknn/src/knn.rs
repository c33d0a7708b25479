//! Exact k-nearest-neighbor search over user vectors under Euclidean
//! distance: a brute-force full scan, parallel across candidate rows, with a
//! deterministic tie rule.
//!
//! The index is immutable after construction; queries only read it, so any
//! number of threads may search concurrently (many readers, no writers).
//! Per-row distances are accumulated in ascending item order, which makes the
//! result independent of thread count.

use rayon::prelude::*;

use crate::representation::UserVector;
use crate::{Error, Result};

/// One retrieved neighbor: row index in the [`VectorIndex`] plus true
/// Euclidean distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub user: usize,
    pub distance: f64,
}

/// Neighbors in ascending (squared distance, user index) order, at most k of
/// them, never including the excluded row. Ordering uses the exact squared
/// distance rather than the rounded `distance` field: two entries can
/// display equal distances (the square root collapses near-equal values)
/// yet still be ordered by their true squared distances.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NeighborSet {
    neighbors: Vec<Neighbor>,
}

impl NeighborSet {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Neighbor> {
        self.neighbors.iter()
    }

    pub fn as_slice(&self) -> &[Neighbor] {
        &self.neighbors
    }

    /// Row indices in retrieval order.
    pub fn users(&self) -> Vec<usize> {
        self.neighbors.iter().map(|n| n.user).collect()
    }

    /// The first `k` neighbors. Searching at `k` and taking a prefix is
    /// identical to searching at the smaller count directly.
    pub fn prefix(&self, k: usize) -> NeighborSet {
        NeighborSet { neighbors: self.neighbors[..k.min(self.neighbors.len())].to_vec() }
    }
}

/// Immutable matrix of candidate user vectors, stored as sorted sparse rows.
#[derive(Debug, Clone)]
pub struct VectorIndex {
    dim: usize,
    user_ids: Vec<String>,
    rows: Vec<Vec<(u32, f64)>>,
}

/// Builds an index over the given vectors (rows keep their list order).
/// All vectors must share one dimension; duplicates are allowed.
pub fn build_index(vectors: &[UserVector]) -> Result<VectorIndex> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::data("cannot build an index over zero vectors"))?;
    let dim = first.dim();
    let mut user_ids = Vec::with_capacity(vectors.len());
    let mut rows = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::data(format!(
                "vector for user '{}' has dimension {}, index has {}",
                v.user_id,
                v.dim(),
                dim
            )));
        }
        user_ids.push(v.user_id.clone());
        rows.push(v.nonzeros());
    }
    Ok(VectorIndex { dim, user_ids, rows })
}

/// Squared Euclidean distance between two sorted sparse vectors, accumulated
/// in ascending item order (skipping shared zeros, which adds nothing and so
/// matches a dense ascending loop bit-for-bit).
fn distance_sq(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                sum += a[i].1 * a[i].1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                sum += b[j].1 * b[j].1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let d = a[i].1 - b[j].1;
                sum += d * d;
                i += 1;
                j += 1;
            }
        }
    }
    for &(_, v) in &a[i..] {
        sum += v * v;
    }
    for &(_, v) in &b[j..] {
        sum += v * v;
    }
    sum
}

impl VectorIndex {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn user_id(&self, row: usize) -> &str {
        &self.user_ids[row]
    }

    /// Non-zero entries of one stored row, ascending by item.
    pub fn row(&self, row: usize) -> &[(u32, f64)] {
        &self.rows[row]
    }

    /// Adds one stored row into a dense accumulator.
    pub fn accumulate_row(&self, row: usize, acc: &mut [f64]) {
        for &(item, value) in &self.rows[row] {
            acc[item as usize] += value;
        }
    }

    /// The `k` rows nearest to `query` (smallest Euclidean distance, ties by
    /// ascending row index), never returning `exclude`. Fewer than `k`
    /// candidates returns them all; `k = 0` returns an empty set.
    ///
    /// Comparison happens on the exact squared distance — square roots are
    /// taken only for the returned `distance` fields, so rounding in the
    /// root can never reorder two candidates (see [`NeighborSet`]).
    ///
    /// The scan over rows runs in parallel; each row's distance is a pure
    /// fixed-order accumulation, and selection uses a total order, so the
    /// result is identical at any thread count.
    pub fn nearest(&self, query: &UserVector, k: usize, exclude: Option<usize>) -> Result<NeighborSet> {
        if query.dim() != self.dim {
            return Err(Error::data(format!(
                "query for user '{}' has dimension {}, index has {}",
                query.user_id,
                query.dim(),
                self.dim
            )));
        }
        let q = query.nonzeros();
        let mut scored: Vec<(f64, usize)> = self
            .rows
            .par_iter()
            .enumerate()
            .filter(|(row, _)| Some(*row) != exclude)
            .map(|(row, stored)| (distance_sq(&q, stored), row))
            .collect();

        let take = k.min(scored.len());
        let by_distance_then_row = |a: &(f64, usize), b: &(f64, usize)| {
            a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1))
        };
        if take == 0 {
            return Ok(NeighborSet::default());
        }
        if take < scored.len() {
            scored.select_nth_unstable_by(take - 1, by_distance_then_row);
            scored.truncate(take);
        }
        scored.sort_unstable_by(by_distance_then_row);
        Ok(NeighborSet {
            neighbors: scored
                .into_iter()
                .map(|(d2, user)| Neighbor { user, distance: d2.sqrt() })
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Encodes an integer-valued dense vector as a user vector by emitting
    /// one single-item basket per count and taking item frequencies.
    fn vec_of(user: &str, values: &[f64]) -> UserVector {
        let baskets: Vec<Vec<u32>> = values
            .iter()
            .enumerate()
            .flat_map(|(i, &v)| {
                assert!(v.fract() == 0.0 && v >= 0.0, "test helper takes small counts");
                std::iter::repeat(vec![i as u32]).take(v as usize)
            })
            .collect();
        let seq = crate::corpus::BasketSequence { user_id: user.into(), baskets };
        crate::representation::pif_vector(&seq, values.len()).unwrap()
    }

    #[test]
    fn index_build_checks_dimensions_and_counts_duplicates() {
        let vs = vec![vec_of("a", &[0.0, 1.0]), vec_of("b", &[1.0, 0.0]), vec_of("c", &[1.0, 0.0])];
        let index = build_index(&vs).unwrap();
        assert_eq!(index.len(), 3);
        assert_eq!(index.dim(), 2);
        assert_eq!(index.user_id(2), "c");

        assert!(build_index(&[]).is_err());
        let mixed = vec![vec_of("a", &[0.0, 1.0]), vec_of("b", &[1.0, 0.0, 0.0])];
        assert!(build_index(&mixed).is_err());
    }

    #[test]
    fn identical_row_is_its_own_nearest_neighbor() {
        let vs = vec![vec_of("a", &[1.0, 2.0]), vec_of("b", &[5.0, 5.0])];
        let index = build_index(&vs).unwrap();
        let found = index.nearest(&vs[0], 1, None).unwrap();
        assert_eq!(found.users(), [0]);
        assert_eq!(found.as_slice()[0].distance, 0.0);
    }

    #[test]
    fn three_four_five_triangle_distances() {
        let vs = vec![
            vec_of("o", &[0.0, 0.0]),
            vec_of("p", &[3.0, 4.0]),
            vec_of("q", &[6.0, 8.0]),
        ];
        let index = build_index(&vs).unwrap();
        let found = index.nearest(&vs[0], 2, None).unwrap();
        assert_eq!(found.users(), [0, 1]);
        assert_eq!(found.as_slice()[0].distance, 0.0);
        assert_eq!(found.as_slice()[1].distance, 5.0);
    }

    #[test]
    fn excluding_the_identical_row_returns_the_next_nearest() {
        let vs = vec![
            vec_of("a", &[1.0, 0.0]),
            vec_of("b", &[1.0, 1.0]),
            vec_of("c", &[9.0, 9.0]),
        ];
        let index = build_index(&vs).unwrap();
        let found = index.nearest(&vs[0], 1, Some(0)).unwrap();
        assert_eq!(found.users(), [1]);
    }

    #[test]
    fn k_zero_is_empty_and_small_pools_return_everything() {
        let vs = vec![vec_of("a", &[1.0]), vec_of("b", &[2.0])];
        let index = build_index(&vs).unwrap();
        assert!(index.nearest(&vs[0], 0, None).unwrap().is_empty());
        assert_eq!(index.nearest(&vs[0], 10, None).unwrap().len(), 2);
        assert_eq!(index.nearest(&vs[0], 10, Some(1)).unwrap().users(), [0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let index = build_index(&[vec_of("a", &[1.0, 0.0])]).unwrap();
        assert!(index.nearest(&vec_of("q", &[1.0, 0.0, 0.0]), 1, None).is_err());
    }

    /// Independent oracle: dense O(n·d) distance computation plus a full
    /// stable sort under the documented (squared distance, row) order.
    fn full_scan_oracle(
        rows: &[Vec<f64>],
        query: &[f64],
        k: usize,
        exclude: Option<usize>,
    ) -> Vec<(usize, f64)> {
        let mut scored: Vec<(usize, f64)> = rows
            .iter()
            .enumerate()
            .filter(|(r, _)| Some(*r) != exclude)
            .map(|(r, row)| {
                let mut sum = 0.0;
                for (a, b) in row.iter().zip(query) {
                    sum += (a - b) * (a - b);
                }
                (r, sum)
            })
            .collect();
        scored.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        scored.into_iter().map(|(r, d2)| (r, d2.sqrt())).collect()
    }

    #[test]
    fn matches_full_scan_oracle_on_random_corpora() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for round in 0..200 {
            let n = rng.random_range(2..=60usize);
            let d = rng.random_range(1..=50usize);
            // Integer-valued vectors keep every arithmetic step exact, so the
            // engine and the oracle must agree to the bit.
            let dense: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(0..4) as f64).collect())
                .collect();
            let vectors: Vec<UserVector> = dense
                .iter()
                .enumerate()
                .map(|(i, row)| vec_of(&format!("u{i}"), row))
                .collect();
            let index = build_index(&vectors).unwrap();

            let q = rng.random_range(0..n);
            let k = rng.random_range(0..=n);
            let exclude = if rng.random_range(0..2) == 1 { Some(q) } else { None };
            let got = index.nearest(&vectors[q], k, exclude).unwrap();
            let want = full_scan_oracle(&dense, &dense[q], k, exclude);
            assert_eq!(got.len(), want.len(), "round {round}");
            for (g, (row, dist)) in got.iter().zip(&want) {
                assert_eq!(g.user, *row, "round {round}");
                assert_eq!(g.distance, *dist, "round {round}: exact agreement expected");
            }
        }
    }

    #[test]
    fn translating_query_and_rows_preserves_the_neighbor_list() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = 8;
        let dense: Vec<Vec<f64>> =
            (0..20).map(|_| (0..d).map(|_| rng.random_range(0..5) as f64).collect()).collect();
        let shifted: Vec<Vec<f64>> =
            dense.iter().map(|row| row.iter().map(|v| v + 3.0).collect()).collect();

        let index = |rows: &[Vec<f64>]| {
            build_index(
                &rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| vec_of(&format!("u{i}"), r))
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        };
        let base = index(&dense);
        let moved = index(&shifted);
        for q in 0..dense.len() {
            let a = base.nearest(&vec_of("q", &dense[q]), 5, Some(q)).unwrap();
            let b = moved.nearest(&vec_of("q", &shifted[q]), 5, Some(q)).unwrap();
            assert_eq!(a.users(), b.users());
        }
    }

    #[test]
    fn smaller_k_is_a_prefix_of_larger_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let dense: Vec<Vec<f64>> =
            (0..30).map(|_| (0..6).map(|_| rng.random_range(0..3) as f64).collect()).collect();
        let vectors: Vec<UserVector> =
            dense.iter().enumerate().map(|(i, r)| vec_of(&format!("u{i}"), r)).collect();
        let index = build_index(&vectors).unwrap();
        let q = &vectors[4];
        let full = index.nearest(q, 30, Some(4)).unwrap();
        for k in 0..full.len() {
            let partial = index.nearest(q, k, Some(4)).unwrap();
            assert_eq!(partial, full.prefix(k));
        }
    }
}
