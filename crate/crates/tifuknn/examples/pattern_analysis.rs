//! Where do next-basket items come from?
//!
//! For every user, holds out the last basket and asks how much of it appears
//! in the user's own history (repeat purchases), in the k nearest neighbors'
//! histories (collaborative items), in both, or in neither. Also prints the
//! repeat-gap histogram and a decay-rate sweep.

use tifuknn::analysis::{gap_histogram, pattern_ratios, unseen_sweep, Representation};
use tifuknn::representation::DecayConfig;
use tifuknn::synth::{generate_corpus, SynthSpec};
use tifuknn::Result;

fn main() -> Result<()> {
    let corpus = generate_corpus(&SynthSpec {
        users: 150,
        items: 50,
        clusters: 5,
        preference_strength: 0.85,
        seed: 9,
        ..SynthSpec::default()
    })?;

    // Ratios under plain frequency vectors at a few neighbor counts. The
    // four columns always satisfy repeat + collab - both + unseen = 1.
    println!("neighbors   repeat   collab     both   unseen   (identity check)");
    for k in [1, 10, 50] {
        let r = pattern_ratios(&corpus, k, &Representation::Frequency)?;
        let identity = r.recall_repeat + r.recall_collab - r.recall_both + r.recall_unseen;
        println!(
            "{k:>9} {:>8.4} {:>8.4} {:>8.4} {:>8.4}   {identity:.12}",
            r.recall_repeat, r.recall_collab, r.recall_both, r.recall_unseen
        );
    }

    // The same measurement with decayed vectors changes who the neighbors
    // are (recent tastes match instead of all-time tastes).
    let decayed = Representation::Decayed(DecayConfig {
        groups: 1,
        basket_decay: 0.6,
        group_decay: 0.6,
        blend: 0.5,
        neighbors: 10,
        basket_size: 10,
    });
    let r = pattern_ratios(&corpus, 10, &decayed)?;
    println!(
        "decayed-10 {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
        r.recall_repeat, r.recall_collab, r.recall_both, r.recall_unseen
    );

    // How soon do users re-buy? gap = 1 means the very next basket.
    println!("\nrepeat-gap histogram (top 5 gaps):");
    for bucket in gap_histogram(&corpus).iter().take(5) {
        println!(
            "  gap {:>2}: {:>5} pairs ({:.1}%)",
            bucket.gap,
            bucket.count,
            100.0 * bucket.fraction
        );
    }

    // Sweep the decay rate against neighbor count: lower ratios weight
    // recent baskets more when choosing neighbors.
    println!("\nunseen-item sweep (rows: decay ratio, columns: neighbors 5/20):");
    let points = unseen_sweep(&corpus, &[5, 20], &[0.2, 0.6, 1.0])?;
    for pair in points.chunks(2) {
        println!(
            "  ratio {:.1}: unseen {:.4} / {:.4}",
            pair[0].ratio, pair[0].ratios.recall_unseen, pair[1].ratios.recall_unseen
        );
    }
    Ok(())
}
