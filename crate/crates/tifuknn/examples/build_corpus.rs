//! CSV ingest, filtering, and the snapshot format.
//!
//! Parses raw transaction rows, builds a filtered corpus (minimum baskets
//! per user, item-coverage cutoff for rare items), holds out a prediction
//! target, and round-trips the result through the text snapshot format.

use tifuknn::corpus::{build_corpus, parse_transactions, read_snapshot, write_snapshot, ColumnMap};
use tifuknn::Result;

const RAW: &str = "\
user_id,basket_id,timestamp,item_id
alice,a1,2024-01-02,bread
alice,a1,2024-01-02,milk
alice,a2,2024-01-09,bread
alice,a2,2024-01-09,eggs
alice,a3,2024-01-16,bread
alice,a3,2024-01-16,milk
alice,a3,2024-01-16,truffle-oil
bob,b1,2024-01-03,milk
bob,b1,2024-01-03,eggs
bob,b2,2024-01-10,milk
bob,b2,2024-01-10,bread
bob,b3,2024-01-17,eggs
carol,c1,2024-01-05,bread
";

fn main() -> Result<()> {
    // 1. Parse rows. The column map says which CSV headers carry the user,
    //    basket, time, and item; here they match the defaults.
    let parsed = parse_transactions(RAW.as_bytes(), &ColumnMap::default())?;
    println!("parsed {} rows ({} skipped)", parsed.transactions.len(), parsed.skipped_rows);

    // 2. Build the corpus: users need at least 3 baskets, and the rarest
    //    items are dropped as long as the kept basket-presence mass stays at
    //    or above 95%. Here even truffle-oil survives: dropping its single
    //    appearance would keep only 11/12 of the mass.
    let corpus = build_corpus(&parsed.transactions, 3, 0.95)?;
    println!(
        "corpus: {} users, {} items, {} baskets",
        corpus.n_users(),
        corpus.dim(),
        corpus.total_baskets()
    );

    // Dense item ids are assigned by descending corpus frequency, so id 0 is
    // the most common item.
    println!("item vocabulary (dense id -> name):");
    for (id, name) in corpus.items().iter().enumerate() {
        println!("  {id} -> {name}");
    }

    // carol had only one basket and is filtered out.
    for user in corpus.users() {
        let baskets: Vec<Vec<&str>> = user
            .baskets
            .iter()
            .map(|b| b.iter().map(|&i| corpus.item(i)).collect())
            .collect();
        println!("{}: {:?}", user.user_id, baskets);
    }

    // 3. Hold out the final basket as a prediction target.
    let (history, target) = corpus.user(0).hold_out_last()?;
    println!(
        "{}: {} history baskets, target {:?}",
        history.user_id,
        history.baskets.len(),
        target.iter().map(|&i| corpus.item(i)).collect::<Vec<_>>()
    );

    // 4. Snapshot round trip: the text format preserves the corpus exactly.
    let mut snapshot = Vec::new();
    write_snapshot(&corpus, &mut snapshot)?;
    let restored = read_snapshot(snapshot.as_slice())?;
    assert_eq!(corpus, restored);
    println!("snapshot round trip: {} bytes, corpus identical", snapshot.len());
    Ok(())
}
