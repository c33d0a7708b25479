//! Seeded synthetic corpora for examples, tests, and desk-scale benchmarks.
//!
//! Users are grouped into taste clusters with overlapping preferred item
//! sets, so neighborhood methods have real signal to find; everything is a
//! pure function of the spec's seed.

use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{BasketSequence, Corpus};
use crate::Result;

/// Shape of a synthetic corpus.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub users: usize,
    pub items: usize,
    /// Taste clusters users are assigned to round-robin.
    pub clusters: usize,
    pub min_baskets: usize,
    pub max_baskets: usize,
    pub min_basket_size: usize,
    pub max_basket_size: usize,
    /// Probability that a purchase comes from the user's cluster preferences
    /// rather than the full item range.
    pub preference_strength: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            users: 50,
            items: 20,
            clusters: 4,
            min_baskets: 3,
            max_baskets: 10,
            min_basket_size: 1,
            max_basket_size: 5,
            preference_strength: 0.8,
            seed: 42,
        }
    }
}

/// Generates a corpus per the spec. Deterministic in `spec.seed`.
pub fn generate_corpus(spec: &SynthSpec) -> Result<Corpus> {
    assert!(spec.users >= 1 && spec.items >= 1 && spec.clusters >= 1);
    assert!(1 <= spec.min_baskets && spec.min_baskets <= spec.max_baskets);
    assert!(1 <= spec.min_basket_size && spec.min_basket_size <= spec.max_basket_size);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let all_items: Vec<u32> = (0..spec.items as u32).collect();

    // Each cluster prefers a contiguous arc of the item space, half a cluster
    // width wide of overlap with its neighbor.
    let arc = (spec.items / spec.clusters).max(1);
    let preferred: Vec<Vec<u32>> = (0..spec.clusters)
        .map(|c| {
            let start = c * arc;
            let width = (arc + arc / 2).max(1);
            (0..width).map(|o| ((start + o) % spec.items) as u32).collect()
        })
        .collect();

    let users = (0..spec.users)
        .map(|u| {
            let prefs = &preferred[u % spec.clusters];
            let n_baskets = rng.random_range(spec.min_baskets..=spec.max_baskets);
            let baskets = (0..n_baskets)
                .map(|_| {
                    let size = rng.random_range(spec.min_basket_size..=spec.max_basket_size);
                    let mut basket: Vec<u32> = (0..size)
                        .map(|_| {
                            if rng.random_range(0.0..1.0) < spec.preference_strength {
                                *prefs.choose(&mut rng).expect("non-empty preferences")
                            } else {
                                *all_items.choose(&mut rng).expect("non-empty items")
                            }
                        })
                        .collect();
                    basket.sort_unstable();
                    basket.dedup();
                    basket
                })
                .collect();
            BasketSequence { user_id: format!("u{u:05}"), baskets }
        })
        .collect();

    Corpus::new((0..spec.items).map(|i| format!("item{i:04}")).collect(), users)
}

/// Renders a corpus back into the transaction CSV format `ingest` accepts
/// (basket keys are per-user indices, timestamps are the basket positions).
pub fn corpus_to_csv(corpus: &Corpus) -> String {
    let mut out = String::from("user_id,basket_id,timestamp,item_id\n");
    for user in corpus.users() {
        for (b, basket) in user.baskets.iter().enumerate() {
            for &item in basket {
                out.push_str(&format!(
                    "{},b{b:04},{b},{}\n",
                    user.user_id,
                    corpus.item(item)
                ));
            }
        }
    }
    out
}
