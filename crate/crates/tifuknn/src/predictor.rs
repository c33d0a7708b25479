//! Next-basket prediction: the blended frequency/neighborhood method plus the
//! three baselines (global top frequency, personal top frequency, 0/1
//! user-kNN), a whole-corpus recommendation pipeline, and the prediction dump
//! format.

use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{BasketSequence, Corpus};
use crate::knn::{build_index, NeighborSet, VectorIndex};
use crate::representation::{build_user_vector, pif_vector, union_vector, DecayConfig, UserVector};
use crate::{Error, Result};

/// Which prediction method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Blend of the user's decayed frequency vector and the mean of the k
    /// nearest neighbors' vectors.
    TifuKnn,
    /// The globally most frequent items, identical for every user.
    TopFreq,
    /// The user's own most frequent items.
    PersonTopFreq,
    /// Classical user-kNN over 0/1 item-presence vectors, equal-weight blend.
    UserKnn,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::TifuKnn => "tifu-knn",
            Method::TopFreq => "top-freq",
            Method::PersonTopFreq => "person-top-freq",
            Method::UserKnn => "user-knn",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "tifu-knn" => Ok(Method::TifuKnn),
            "top-freq" => Ok(Method::TopFreq),
            "person-top-freq" => Ok(Method::PersonTopFreq),
            "user-knn" => Ok(Method::UserKnn),
            other => Err(Error::config(format!(
                "unknown method '{other}' (expected tifu-knn | top-freq | person-top-freq | user-knn)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Which users' vectors may serve as neighbor candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolPolicy {
    /// Only training-fold users (no leakage from held-out users). The default
    /// for evaluation.
    TrainingOnly,
    /// Every user except the target itself. Used for production inference on
    /// a full corpus.
    AllUsers,
}

/// Method, hyperparameters, and neighbor-pool policy in one value.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorConfig {
    pub method: Method,
    pub decay: DecayConfig,
    pub pool: PoolPolicy,
}

impl PredictorConfig {
    pub fn new(method: Method, decay: DecayConfig) -> Self {
        PredictorConfig { method, decay, pool: PoolPolicy::TrainingOnly }
    }
}

/// The top-s items for one user: (dense item id, score), scores
/// non-increasing, ties broken by ascending item id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPrediction {
    pub user_id: String,
    pub items: Vec<(u32, f64)>,
}

impl RankedPrediction {
    /// Item ids only, in rank order.
    pub fn item_ids(&self) -> Vec<u32> {
        self.items.iter().map(|&(id, _)| id).collect()
    }
}

/// Top `s` of a dense score vector under the documented total order
/// (descending score, ascending item id). Returns min(s, d) items.
pub fn rank_top_s(scores: &[f64], s: usize) -> Vec<(u32, f64)> {
    let take = s.min(scores.len());
    if take == 0 {
        return Vec::new();
    }
    let better = |a: &u32, b: &u32| {
        scores[*b as usize]
            .total_cmp(&scores[*a as usize])
            .then_with(|| a.cmp(b))
    };
    let mut ids: Vec<u32> = (0..scores.len() as u32).collect();
    if take < ids.len() {
        ids.select_nth_unstable_by(take - 1, better);
        ids.truncate(take);
    }
    ids.sort_unstable_by(better);
    ids.into_iter().map(|id| (id, scores[id as usize])).collect()
}

/// Blends a target vector with the unweighted mean of neighbor rows
/// (`blend`·target + (1−`blend`)·mean) in ascending item order and ranks the
/// result. An empty neighbor set contributes a zero vector.
fn blend_and_rank(
    target: &UserVector,
    neighbors: &NeighborSet,
    index: &VectorIndex,
    blend: f64,
    s: usize,
) -> Result<RankedPrediction> {
    if target.dim() != index.dim() {
        return Err(Error::data(format!(
            "target vector dimension {} does not match index dimension {}",
            target.dim(),
            index.dim()
        )));
    }
    let d = index.dim();
    let mut neighbor_mean = vec![0.0; d];
    if !neighbors.is_empty() {
        for n in neighbors.iter() {
            index.accumulate_row(n.user, &mut neighbor_mean);
        }
        let count = neighbors.len() as f64;
        for value in neighbor_mean.iter_mut() {
            *value /= count;
        }
    }
    let own = target.to_dense();
    let mut scores = vec![0.0; d];
    for j in 0..d {
        scores[j] = blend * own[j] + (1.0 - blend) * neighbor_mean[j];
    }
    Ok(RankedPrediction { user_id: target.user_id.clone(), items: rank_top_s(&scores, s) })
}

/// The main predictor: P = blend·u_target + (1−blend)·mean(neighbor vectors),
/// ranked top-s.
pub fn predict_tifu(
    target: &UserVector,
    neighbors: &NeighborSet,
    index: &VectorIndex,
    blend: f64,
    s: usize,
) -> Result<RankedPrediction> {
    if !(0.0..=1.0).contains(&blend) {
        return Err(Error::config(format!("blend must be in [0, 1], got {blend}")));
    }
    blend_and_rank(target, neighbors, index, blend, s)
}

/// Personal top frequency: ranks items by how many of the user's own baskets
/// contain them.
pub fn predict_person_top_freq(
    history: &BasketSequence,
    dim: usize,
    s: usize,
) -> Result<RankedPrediction> {
    let counts = pif_vector(history, dim)?;
    Ok(RankedPrediction { user_id: history.user_id.clone(), items: rank_top_s(&counts.to_dense(), s) })
}

/// Basket-presence counts over an iterator of basket slices.
pub(crate) fn presence_counts<'a>(
    baskets: impl Iterator<Item = &'a [u32]>,
    dim: usize,
) -> Vec<f64> {
    let mut counts = vec![0.0; dim];
    for basket in baskets {
        for &item in basket {
            counts[item as usize] += 1.0;
        }
    }
    counts
}

/// Global top frequency over every basket of the given corpus; the resulting
/// ranking is user-independent, so `user_id` is `"*"`.
pub fn predict_top_freq(corpus: &Corpus, s: usize) -> RankedPrediction {
    let counts = presence_counts(
        corpus.users().iter().flat_map(|u| u.baskets.iter().map(Vec::as_slice)),
        corpus.dim(),
    );
    RankedPrediction { user_id: "*".into(), items: rank_top_s(&counts, s) }
}

/// Classical user-kNN baseline: the target's 0/1 item-presence vector is
/// blended equal-weight with the mean of its k nearest neighbors' 0/1 vectors
/// (the index must hold [`union_vector`] rows).
pub fn predict_user_knn(
    target: &BasketSequence,
    index: &VectorIndex,
    k: usize,
    s: usize,
    exclude: Option<usize>,
) -> Result<RankedPrediction> {
    let own = union_vector(target, index.dim())?;
    let neighbors = index.nearest(&own, k, exclude)?;
    blend_and_rank(&own, &neighbors, index, 0.5, s)
}

/// Builds the per-user representation the method searches neighbors with:
/// decayed vectors for the main method, 0/1 unions for user-kNN.
pub(crate) fn method_vector(
    method: Method,
    history: &BasketSequence,
    dim: usize,
    decay: &DecayConfig,
) -> Result<UserVector> {
    match method {
        Method::UserKnn => union_vector(history, dim),
        _ => build_user_vector(history, dim, decay),
    }
}

/// Production inference: predicts the next basket for every user from their
/// full sequence, with every other user's full-sequence vector as a neighbor
/// candidate. Predictions come back in corpus user order.
pub fn recommend_corpus(corpus: &Corpus, cfg: &PredictorConfig, s: usize) -> Result<Vec<RankedPrediction>> {
    cfg.decay.validate()?;
    if s < 1 {
        return Err(Error::config("basket size s must be at least 1"));
    }
    let d = corpus.dim();
    match cfg.method {
        Method::TopFreq => {
            let shared = predict_top_freq(corpus, s);
            Ok(corpus
                .users()
                .iter()
                .map(|u| RankedPrediction { user_id: u.user_id.clone(), items: shared.items.clone() })
                .collect())
        }
        Method::PersonTopFreq => corpus
            .users()
            .par_iter()
            .map(|u| predict_person_top_freq(u, d, s))
            .collect(),
        Method::TifuKnn | Method::UserKnn => {
            let vectors: Vec<UserVector> = corpus
                .users()
                .par_iter()
                .map(|u| method_vector(cfg.method, u, d, &cfg.decay))
                .collect::<Result<_>>()?;
            let index = build_index(&vectors)?;
            (0..corpus.n_users())
                .into_par_iter()
                .map(|u| match cfg.method {
                    Method::UserKnn => {
                        predict_user_knn(corpus.user(u), &index, cfg.decay.neighbors, s, Some(u))
                    }
                    _ => {
                        let neighbors = index.nearest(&vectors[u], cfg.decay.neighbors, Some(u))?;
                        predict_tifu(&vectors[u], &neighbors, &index, cfg.decay.blend, s)
                    }
                })
                .collect()
        }
    }
}

/// Writes predictions as one line per user:
/// `user_id TAB id,id,... TAB score,score,...` with scores at 6 decimals.
pub fn write_predictions(predictions: &[RankedPrediction], writer: &mut impl Write) -> Result<()> {
    let mut w = io::BufWriter::new(writer);
    for p in predictions {
        let ids: Vec<String> = p.items.iter().map(|(id, _)| id.to_string()).collect();
        let scores: Vec<String> = p.items.iter().map(|(_, x)| format!("{x:.6}")).collect();
        writeln!(w, "{}\t{}\t{}", p.user_id, ids.join(","), scores.join(","))?;
    }
    w.flush()?;
    Ok(())
}
