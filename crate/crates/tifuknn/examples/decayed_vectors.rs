//! Item-frequency and temporally decayed user vectors.
//!
//! Shows the three per-user representations: raw basket-presence counts,
//! 0/1 union vectors, and the two-tier decayed vector (per-basket decay
//! inside each temporal group, per-group decay across groups), plus the
//! degenerate setting that reduces the decayed vector to normalized counts.

use tifuknn::corpus::BasketSequence;
use tifuknn::representation::{build_user_vector, pif_vector, union_vector, DecayConfig};
use tifuknn::Result;

fn show(label: &str, entries: &[(u32, f64)]) {
    let parts: Vec<String> =
        entries.iter().map(|(item, v)| format!("item{item}={v:.4}")).collect();
    println!("{label:<26} {}", parts.join("  "));
}

fn main() -> Result<()> {
    // Six baskets over a 4-item vocabulary. Item 0 appears early and late,
    // item 3 only in the first basket, item 2 only in the last.
    let history = BasketSequence {
        user_id: "u".into(),
        baskets: vec![vec![0, 3], vec![0, 1], vec![1], vec![0, 1], vec![1], vec![0, 2]],
    };
    let dim = 4;

    // Raw frequency: how many baskets contain each item.
    show("frequency", &pif_vector(&history, dim)?.nonzeros());
    // Union: 1 for every item ever bought.
    show("union (0/1)", &union_vector(&history, dim)?.nonzeros());

    // Decayed vector: the six baskets are split into `groups` consecutive
    // runs; within a run each step back in time multiplies the weight by
    // basket_decay, and older runs are further multiplied by group_decay.
    let decayed = DecayConfig {
        groups: 3,
        basket_decay: 0.9,
        group_decay: 0.7,
        blend: 0.5,
        neighbors: 5,
        basket_size: 10,
    };
    show("decayed (m=3, 0.9/0.7)", &build_user_vector(&history, dim, &decayed)?.nonzeros());

    // Stronger decay pushes the vector toward the most recent baskets:
    // item 2 (bought last) overtakes item 3 (bought first) by a wide margin.
    let sharp = DecayConfig { basket_decay: 0.5, group_decay: 0.3, ..decayed.clone() };
    show("decayed (m=3, 0.5/0.3)", &build_user_vector(&history, dim, &sharp)?.nonzeros());

    // With one group and no decay, the decayed vector is exactly the
    // frequency vector divided by the number of baskets.
    let flat = DecayConfig { groups: 1, basket_decay: 1.0, group_decay: 1.0, ..decayed.clone() };
    let reduced = build_user_vector(&history, dim, &flat)?;
    show("no decay (m=1, 1.0/1.0)", &reduced.nonzeros());
    let t = history.baskets.len() as f64;
    for (item, value) in reduced.nonzeros() {
        assert_eq!(value, pif_vector(&history, dim)?.get(item) / t);
    }
    println!("m=1, r=1 reduction equals frequency/t exactly");
    Ok(())
}
