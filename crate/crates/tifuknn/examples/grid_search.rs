//! Validation-driven hyperparameter search.
//!
//! Reserves a slice of the training users for validation, scores every
//! combination of (neighbors, groups, basket decay, group decay, blend) on
//! them, picks the objective argmax, and re-checks the winner on the
//! held-out test fold.

use tifuknn::corpus::split_folds;
use tifuknn::eval::{evaluate_fold, grid_search, GridSpec, Objective};
use tifuknn::predictor::{Method, PredictorConfig};
use tifuknn::synth::{generate_corpus, SynthSpec};
use tifuknn::Result;

fn main() -> Result<()> {
    let corpus = generate_corpus(&SynthSpec {
        users: 200,
        items: 60,
        clusters: 5,
        preference_strength: 0.85,
        seed: 3,
        ..SynthSpec::default()
    })?;

    // 5 folds; 20% of the training users become the validation set the
    // search optimizes on (the test fold stays untouched until the end).
    let split = split_folds(&corpus, 5, 0.2, 0, 42)?;
    println!(
        "{} users -> {} test, {} validation, {} tuning-pool",
        corpus.n_users(),
        split.test_users().len(),
        split.validation_users().len(),
        split.tuning_pool_users().len()
    );

    let grid = GridSpec {
        neighbors: vec![5, 10, 20, 40],
        groups: vec![1, 3, 5],
        basket_decays: vec![0.6, 0.9, 1.0],
        group_decays: vec![0.6, 0.9, 1.0],
        blends: vec![0.1, 0.3, 0.5, 0.7, 0.9],
    };
    let objective: Objective = "recall@10".parse()?;
    println!("searching {} grid points for the best {objective}\n", grid.len());

    let outcome = grid_search(&corpus, &split, &grid, objective, &[5, 10])?;
    let best = &outcome.best;
    println!("best config:");
    println!("  neighbors:    {}", best.neighbors);
    println!("  groups:       {}", best.groups);
    println!("  basket decay: {}", best.basket_decay);
    println!("  group decay:  {}", best.group_decay);
    println!("  blend:        {}", best.blend);
    println!("validation {objective}: {:.4}", outcome.best_objective);

    // Final answer: the tuned config, evaluated once on the test fold.
    let cfg = PredictorConfig::new(Method::TifuKnn, best.clone());
    let test = evaluate_fold(&corpus, &split, &cfg, &[5, 10])?;
    println!("\ntest fold with the tuned config:");
    print!("{}", test.aggregate_block());
    Ok(())
}
