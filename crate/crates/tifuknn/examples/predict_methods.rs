//! The main predictor and all three baselines on one corpus.
//!
//! Predicts the next basket for every user of a synthetic corpus under each
//! method and prints a side-by-side comparison for a few users:
//!
//! - `tifu-knn`        blend of the user's decayed vector and the mean of its
//!                     k nearest neighbors' decayed vectors
//! - `person-top-freq` the user's own most frequent items
//! - `top-freq`        the globally most frequent items (same for everyone)
//! - `user-knn`        0/1 presence vectors, equal-weight neighbor blend

use tifuknn::predictor::{recommend_corpus, Method, PoolPolicy, PredictorConfig};
use tifuknn::representation::DecayConfig;
use tifuknn::synth::{generate_corpus, SynthSpec};
use tifuknn::Result;

fn main() -> Result<()> {
    let corpus = generate_corpus(&SynthSpec {
        users: 60,
        items: 40,
        clusters: 4,
        preference_strength: 0.85,
        seed: 11,
        ..SynthSpec::default()
    })?;
    println!(
        "corpus: {} users, {} items, {} baskets\n",
        corpus.n_users(),
        corpus.dim(),
        corpus.total_baskets()
    );

    let decay = DecayConfig {
        groups: 3,
        basket_decay: 0.9,
        group_decay: 0.7,
        blend: 0.7,
        neighbors: 10,
        basket_size: 5,
    };

    let methods = [Method::TifuKnn, Method::PersonTopFreq, Method::TopFreq, Method::UserKnn];
    let mut per_method = Vec::new();
    for method in methods {
        let cfg = PredictorConfig {
            method,
            decay: decay.clone(),
            // Production inference: every other user is a neighbor candidate.
            pool: PoolPolicy::AllUsers,
        };
        per_method.push(recommend_corpus(&corpus, &cfg, 5)?);
    }

    for user in 0..3 {
        println!("user {}:", corpus.user(user).user_id);
        for (method, predictions) in methods.iter().zip(&per_method) {
            let items: Vec<&str> =
                predictions[user].item_ids().iter().map(|&i| corpus.item(i)).collect();
            println!("  {:<16} {}", method.tag(), items.join(" "));
        }
    }

    // top-freq ranks items globally, so every user gets the same basket.
    let global = &per_method[2];
    assert!(global.iter().all(|p| p.items == global[0].items));
    println!("\ntop-freq is user-independent: all {} predictions identical", global.len());
    Ok(())
}
