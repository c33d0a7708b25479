//! Exact Euclidean k-nearest-neighbor search over user vectors.
//!
//! Builds decayed vectors for a synthetic corpus with taste clusters, indexes
//! them, and retrieves neighbors — which land in the query user's own cluster
//! because cluster-mates buy the same items.

use tifuknn::knn::build_index;
use tifuknn::representation::{build_user_vector, DecayConfig};
use tifuknn::synth::{generate_corpus, SynthSpec};
use tifuknn::Result;

fn main() -> Result<()> {
    // 40 users in 4 taste clusters (user i belongs to cluster i % 4).
    let corpus = generate_corpus(&SynthSpec {
        users: 40,
        items: 30,
        clusters: 4,
        preference_strength: 0.9,
        seed: 7,
        ..SynthSpec::default()
    })?;

    let cfg = DecayConfig {
        groups: 2,
        basket_decay: 0.9,
        group_decay: 0.7,
        blend: 0.5,
        neighbors: 5,
        basket_size: 10,
    };
    let vectors = corpus
        .users()
        .iter()
        .map(|u| build_user_vector(u, corpus.dim(), &cfg))
        .collect::<Result<Vec<_>>>()?;
    let index = build_index(&vectors)?;
    println!("indexed {} vectors of dimension {}", index.len(), index.dim());

    for query_row in [0, 1] {
        // `exclude` keeps the query user out of its own neighbor list.
        let neighbors = index.nearest(&vectors[query_row], 5, Some(query_row))?;
        println!(
            "\nnearest to {} (cluster {}):",
            index.user_id(query_row),
            query_row % 4
        );
        for n in neighbors.iter() {
            println!(
                "  {:<8} cluster {}  distance {:.4}",
                index.user_id(n.user),
                n.user % 4,
                n.distance
            );
        }
        // Neighbor sets are ascending by distance, so any prefix is the
        // exact answer for a smaller k — no re-query needed.
        let top2 = neighbors.prefix(2);
        println!(
            "  top-2 prefix: {:?}",
            top2.iter().map(|n| index.user_id(n.user)).collect::<Vec<_>>()
        );
    }
    Ok(())
}
