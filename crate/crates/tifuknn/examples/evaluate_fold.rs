//! Fold-based evaluation: hold out each test user's last basket, predict it
//! from the preceding baskets, and score recall@s and NDCG@s.
//!
//! Users are split into folds by seed; neighbor candidates come only from
//! the training folds, so no held-out information leaks into a prediction.

use tifuknn::corpus::split_folds;
use tifuknn::eval::{evaluate_fold, write_report};
use tifuknn::predictor::{Method, PredictorConfig};
use tifuknn::representation::DecayConfig;
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

    // 5 folds, fold 0 held out for testing, no validation users reserved.
    let split = split_folds(&corpus, 5, 0.0, 0, 42)?;
    println!(
        "{} users -> {} test, {} training (seed {})\n",
        corpus.n_users(),
        split.test_users().len(),
        split.training_users().len(),
        split.seed
    );

    let decay = DecayConfig {
        groups: 3,
        basket_decay: 0.9,
        group_decay: 0.7,
        blend: 0.7,
        neighbors: 20,
        basket_size: 10,
    };
    let s_values = [5, 10];

    println!("method            recall@5  recall@10   ndcg@5  ndcg@10");
    let mut tifu_report = None;
    for method in [Method::TifuKnn, Method::PersonTopFreq, Method::TopFreq, Method::UserKnn] {
        let cfg = PredictorConfig::new(method, decay.clone());
        let report = evaluate_fold(&corpus, &split, &cfg, &s_values)?;
        println!(
            "{:<16} {:>9.4} {:>10.4} {:>8.4} {:>8.4}",
            method.tag(),
            report.recall[0],
            report.recall[1],
            report.ndcg[0],
            report.ndcg[1]
        );
        if method == Method::TifuKnn {
            tifu_report = Some(report);
        }
    }

    // The full report format: header, aggregates, then one row per user.
    let report = tifu_report.expect("evaluated above");
    let mut text = Vec::new();
    write_report(&report, &mut text)?;
    let text = String::from_utf8(text).expect("reports are UTF-8");
    println!(
        "\nreport for {} ({} users evaluated, {} skipped), first lines:",
        report.method, report.evaluated_users, report.skipped_users
    );
    for line in text.lines().take(16) {
        println!("  {line}");
    }
    Ok(())
}
