//! Transaction ingest: CSV parsing, basket grouping, item filtering, fold
//! splits, and a line-oriented corpus snapshot format.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, BufRead, BufReader, Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Basket timestamp with a total order: values that parse as integers sort
/// numerically and before all non-numeric values; everything else sorts
/// lexicographically (which does the right thing for ISO-style date strings).
/// Raw text breaks remaining ties so the order is consistent with equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeKey {
    raw: String,
    numeric: Option<i64>,
}

impl TimeKey {
    pub fn new(raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let numeric = raw.parse::<i64>().ok();
        TimeKey { raw, numeric }
    }

    /// The original field text.
    pub fn raw(&self) -> &str {
        &self.raw
    }
}

impl Ord for TimeKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.numeric, other.numeric) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.raw.cmp(&other.raw)),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => self.raw.cmp(&other.raw),
        }
    }
}

impl PartialOrd for TimeKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// One purchase event: a single item inside one basket of one user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub user_id: String,
    pub basket_key: String,
    pub timestamp: TimeKey,
    pub item_id: String,
}

/// Names of the four required CSV columns.
#[derive(Debug, Clone)]
pub struct ColumnMap {
    pub user: String,
    pub basket: String,
    pub time: String,
    pub item: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            user: "user_id".into(),
            basket: "basket_id".into(),
            time: "timestamp".into(),
            item: "item_id".into(),
        }
    }
}

/// Result of [`parse_transactions`]: the usable rows plus skip accounting.
#[derive(Debug)]
pub struct ParsedTransactions {
    pub transactions: Vec<Transaction>,
    pub skipped_rows: usize,
    pub total_rows: usize,
}

/// Parses a headered CSV of purchase events.
///
/// A data row is skipped (and counted) when any mapped field is absent or
/// empty. Files of at least 10 data rows where more than half the rows are
/// skipped are rejected as malformed; smaller files always parse, so a
/// header-plus-one-bad-row file yields an empty list with a skip count of 1.
/// A header that lacks one of the mapped column names is an error.
pub fn parse_transactions(reader: impl Read, columns: &ColumnMap) -> Result<ParsedTransactions> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = csv.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::data(format!("missing column '{name}' in CSV header")))
    };
    let (ui, bi, ti, ii) = (
        col(&columns.user)?,
        col(&columns.basket)?,
        col(&columns.time)?,
        col(&columns.item)?,
    );

    let mut transactions = Vec::new();
    let mut skipped_rows = 0usize;
    let mut total_rows = 0usize;
    for record in csv.records() {
        let record = record?;
        total_rows += 1;
        let field = |idx: usize| record.get(idx).filter(|f| !f.is_empty());
        match (field(ui), field(bi), field(ti), field(ii)) {
            (Some(user), Some(basket), Some(time), Some(item)) => transactions.push(Transaction {
                user_id: user.to_string(),
                basket_key: basket.to_string(),
                timestamp: TimeKey::new(time),
                item_id: item.to_string(),
            }),
            _ => skipped_rows += 1,
        }
    }

    if total_rows >= 10 && skipped_rows * 2 > total_rows {
        return Err(Error::data(format!(
            "{skipped_rows} of {total_rows} rows are missing required fields; \
             refusing to build a corpus from a majority-malformed file"
        )));
    }
    Ok(ParsedTransactions { transactions, skipped_rows, total_rows })
}

/// One user's baskets in temporal order. Baskets are sets of dense item ids,
/// stored sorted ascending without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasketSequence {
    pub user_id: String,
    pub baskets: Vec<Vec<u32>>,
}

impl BasketSequence {
    /// Splits off the final basket: everything before it becomes the history,
    /// the last basket becomes the prediction target. Errors when there are
    /// fewer than two baskets, since the history would be empty.
    pub fn hold_out_last(&self) -> Result<(BasketSequence, Vec<u32>)> {
        if self.baskets.len() < 2 {
            return Err(Error::data(format!(
                "user '{}' has {} basket(s); holding out the last needs at least 2",
                self.user_id,
                self.baskets.len()
            )));
        }
        let history = BasketSequence {
            user_id: self.user_id.clone(),
            baskets: self.baskets[..self.baskets.len() - 1].to_vec(),
        };
        Ok((history, self.baskets[self.baskets.len() - 1].clone()))
    }
}

/// A filtered dataset: the dense item index plus every user's basket sequence.
///
/// Dense item ids are assigned by descending corpus-wide basket frequency
/// (ties by item id), users are sorted ascending by user id, and baskets are
/// in temporal order — so a corpus built twice from the same rows, in any row
/// order, is identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    items: Vec<String>,
    users: Vec<BasketSequence>,
}

fn check_id(kind: &str, id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::data(format!("empty {kind} id")));
    }
    if id.contains(['\t', '\n', '\r']) {
        return Err(Error::data(format!(
            "{kind} id {id:?} contains a tab or line break, which the snapshot format cannot carry"
        )));
    }
    Ok(())
}

impl Corpus {
    /// Assembles a corpus from parts, validating every invariant the rest of
    /// the crate relies on: ids carry no tabs/line breaks, users are sorted
    /// and unique, every basket is a sorted non-empty set of ids below `dim`.
    pub fn new(items: Vec<String>, users: Vec<BasketSequence>) -> Result<Corpus> {
        if items.is_empty() || users.is_empty() {
            return Err(Error::data("corpus needs at least one item and one user"));
        }
        let mut seen = BTreeSet::new();
        for item in &items {
            check_id("item", item)?;
            if !seen.insert(item.as_str()) {
                return Err(Error::data(format!("duplicate item id {item:?}")));
            }
        }
        let d = items.len() as u32;
        for (u, user) in users.iter().enumerate() {
            check_id("user", &user.user_id)?;
            if u > 0 && users[u - 1].user_id >= user.user_id {
                return Err(Error::data("users must be sorted ascending by unique user id"));
            }
            if user.baskets.is_empty() {
                return Err(Error::data(format!("user '{}' has no baskets", user.user_id)));
            }
            for basket in &user.baskets {
                if basket.is_empty() {
                    return Err(Error::data(format!("user '{}' has an empty basket", user.user_id)));
                }
                for (i, &id) in basket.iter().enumerate() {
                    if id >= d {
                        return Err(Error::data(format!("item id {id} out of range (dim {d})")));
                    }
                    if i > 0 && basket[i - 1] >= id {
                        return Err(Error::data("basket items must be sorted ascending and unique"));
                    }
                }
            }
        }
        Ok(Corpus { items, users })
    }

    /// Number of distinct items (the dimensionality of all user vectors).
    pub fn dim(&self) -> usize {
        self.items.len()
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn users(&self) -> &[BasketSequence] {
        &self.users
    }

    pub fn user(&self, index: usize) -> &BasketSequence {
        &self.users[index]
    }

    /// Item id for a dense index.
    pub fn item(&self, dense: u32) -> &str {
        &self.items[dense as usize]
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn total_baskets(&self) -> usize {
        self.users.iter().map(|u| u.baskets.len()).sum()
    }
}

/// Groups transactions into per-user temporally ordered baskets, drops the
/// rarest items while retained purchase events still cover at least
/// `item_coverage` of the total, drops baskets left empty and users left with
/// fewer than `min_baskets` baskets, and assigns dense item ids.
///
/// Item rarity is measured in baskets containing the item (presence, not
/// multiplicity); removal proceeds rarest-first (ties by item id) and stops at
/// the first item whose removal would push coverage below the threshold.
pub fn build_corpus(
    transactions: &[Transaction],
    min_baskets: usize,
    item_coverage: f64,
) -> Result<Corpus> {
    if min_baskets < 1 {
        return Err(Error::config("min_baskets must be at least 1"));
    }
    if !(item_coverage > 0.0 && item_coverage <= 1.0) {
        return Err(Error::config(format!(
            "item_coverage must be in (0, 1], got {item_coverage}"
        )));
    }

    // user -> basket key -> (earliest timestamp, item set)
    let mut grouped: BTreeMap<&str, BTreeMap<&str, (TimeKey, BTreeSet<&str>)>> = BTreeMap::new();
    for t in transactions {
        check_id("user", &t.user_id)?;
        check_id("item", &t.item_id)?;
        let basket = grouped
            .entry(&t.user_id)
            .or_default()
            .entry(&t.basket_key)
            .or_insert_with(|| (t.timestamp.clone(), BTreeSet::new()));
        if t.timestamp < basket.0 {
            basket.0 = t.timestamp.clone();
        }
        basket.1.insert(&t.item_id);
    }

    // Presence counts over all baskets, before any filtering.
    let mut count: BTreeMap<&str, usize> = BTreeMap::new();
    let mut total_events = 0usize;
    for baskets in grouped.values() {
        for (_, items) in baskets.values() {
            for item in items {
                *count.entry(item).or_insert(0) += 1;
            }
            total_events += items.len();
        }
    }
    if total_events == 0 {
        return Err(Error::data("no transactions to build a corpus from"));
    }

    // Greedy removal, rarest first.
    let mut by_rarity: Vec<(&str, usize)> = count.iter().map(|(&i, &c)| (i, c)).collect();
    by_rarity.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    let mut removed: BTreeSet<&str> = BTreeSet::new();
    let mut retained = total_events;
    for &(item, c) in &by_rarity {
        if (retained - c) as f64 / total_events as f64 >= item_coverage {
            removed.insert(item);
            retained -= c;
        } else {
            break;
        }
    }

    // Apply filters and order baskets temporally.
    let mut survivors: BTreeSet<&str> = BTreeSet::new();
    let mut kept_users: Vec<(&str, Vec<Vec<&str>>)> = Vec::new();
    for (user, baskets) in &grouped {
        let mut ordered: Vec<(&TimeKey, &str, Vec<&str>)> = Vec::new();
        for (key, (time, items)) in baskets {
            let kept: Vec<&str> = items.iter().copied().filter(|i| !removed.contains(i)).collect();
            if !kept.is_empty() {
                ordered.push((time, key, kept));
            }
        }
        if ordered.len() < min_baskets {
            continue;
        }
        ordered.sort_by(|a, b| a.0.cmp(b.0).then_with(|| a.1.cmp(b.1)));
        for (_, _, items) in &ordered {
            survivors.extend(items.iter().copied());
        }
        kept_users.push((user, ordered.into_iter().map(|(_, _, items)| items).collect()));
    }
    if kept_users.is_empty() {
        return Err(Error::data(
            "no users left after item-coverage and min-baskets filtering",
        ));
    }

    // Dense ids: highest corpus-wide count first, ties by item id.
    let mut index_order: Vec<&str> = survivors.into_iter().collect();
    index_order.sort_by(|a, b| count[b].cmp(&count[a]).then_with(|| a.cmp(b)));
    let dense: HashMap<&str, u32> =
        index_order.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();

    let users = kept_users
        .into_iter()
        .map(|(user_id, baskets)| BasketSequence {
            user_id: user_id.to_string(),
            baskets: baskets
                .into_iter()
                .map(|items| {
                    let mut ids: Vec<u32> = items.into_iter().map(|i| dense[i]).collect();
                    ids.sort_unstable();
                    ids
                })
                .collect(),
        })
        .collect();
    Corpus::new(index_order.into_iter().map(str::to_string).collect(), users)
}

/// User-level cross-validation split: which fold each user landed in, which
/// fold is the test fold, and which training users are held aside for
/// validation (hyperparameter selection).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub n_folds: usize,
    pub test_fold: usize,
    /// The seed the split was drawn with, carried along so downstream
    /// reports can record it.
    pub seed: u64,
    fold_of: Vec<usize>,
    validation: Vec<bool>,
}

impl FoldSplit {
    pub fn fold_of(&self, user: usize) -> usize {
        self.fold_of[user]
    }

    pub fn is_test(&self, user: usize) -> bool {
        self.fold_of[user] == self.test_fold
    }

    pub fn is_validation(&self, user: usize) -> bool {
        self.validation[user]
    }

    /// Test-fold users, ascending by corpus index.
    pub fn test_users(&self) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&u| self.is_test(u)).collect()
    }

    /// All users outside the test fold, ascending by corpus index.
    pub fn training_users(&self) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&u| !self.is_test(u)).collect()
    }

    /// Training users reserved for validation, ascending by corpus index.
    pub fn validation_users(&self) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&u| self.validation[u]).collect()
    }

    /// Training users *not* reserved for validation — the candidate pool used
    /// while tuning on the validation users.
    pub fn tuning_pool_users(&self) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&u| !self.is_test(u) && !self.validation[u]).collect()
    }
}

/// Randomly partitions users into `n_folds` near-equal folds (sizes differ by
/// at most one) and reserves `floor(validation_fraction * n_train)` of the
/// non-test users for validation. The split is a pure function of the seed:
/// the same seed always produces the same assignment.
pub fn split_folds(
    corpus: &Corpus,
    n_folds: usize,
    validation_fraction: f64,
    test_fold: usize,
    seed: u64,
) -> Result<FoldSplit> {
    let n = corpus.n_users();
    if n_folds < 2 {
        return Err(Error::config("n_folds must be at least 2"));
    }
    if test_fold >= n_folds {
        return Err(Error::config(format!(
            "test_fold {test_fold} out of range for {n_folds} folds"
        )));
    }
    if !(0.0..1.0).contains(&validation_fraction) {
        return Err(Error::config(format!(
            "validation_fraction must be in [0, 1), got {validation_fraction}"
        )));
    }
    if n < n_folds {
        return Err(Error::data(format!(
            "{n} users cannot fill {n_folds} folds"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let base = n / n_folds;
    let remainder = n % n_folds;
    let mut fold_of = vec![0usize; n];
    let mut cursor = 0usize;
    for fold in 0..n_folds {
        let size = base + usize::from(fold < remainder);
        for &user in &order[cursor..cursor + size] {
            fold_of[user] = fold;
        }
        cursor += size;
    }

    // Validation users are the first slice of the shuffled training users, so
    // they are themselves a uniform sample of the training side.
    let n_train = n - (base + usize::from(test_fold < remainder));
    let n_validation = (validation_fraction * n_train as f64).floor() as usize;
    let mut validation = vec![false; n];
    let mut taken = 0usize;
    for &user in &order {
        if taken == n_validation {
            break;
        }
        if fold_of[user] != test_fold {
            validation[user] = true;
            taken += 1;
        }
    }

    Ok(FoldSplit { n_folds, test_fold, seed, fold_of, validation })
}

const SNAPSHOT_MAGIC: &str = "tifuknn-corpus v1";

/// Writes the corpus in the line-oriented snapshot format:
///
/// ```text
/// tifuknn-corpus v1
/// items <d>
/// <item id>            (d lines; line number = dense id)
/// users <n>
/// <user id>\t<basket>;<basket>;...   (baskets in temporal order,
///                                     each a comma list of dense ids)
/// ```
pub fn write_snapshot(corpus: &Corpus, writer: &mut impl Write) -> Result<()> {
    let mut w = io::BufWriter::new(writer);
    writeln!(w, "{SNAPSHOT_MAGIC}")?;
    writeln!(w, "items {}", corpus.dim())?;
    for item in corpus.items() {
        writeln!(w, "{item}")?;
    }
    writeln!(w, "users {}", corpus.n_users())?;
    for user in corpus.users() {
        let baskets: Vec<String> = user
            .baskets
            .iter()
            .map(|b| b.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
            .collect();
        writeln!(w, "{}\t{}", user.user_id, baskets.join(";"))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a snapshot produced by [`write_snapshot`], re-validating every
/// corpus invariant. The round trip is bit-exact.
pub fn read_snapshot(reader: impl Read) -> Result<Corpus> {
    let mut lines = BufReader::new(reader).lines();
    let mut next = |what: &str| -> Result<String> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::data(format!("snapshot truncated: expected {what}")))
    };

    let magic = next("header")?;
    if magic != SNAPSHOT_MAGIC {
        return Err(Error::data(format!(
            "not a corpus snapshot (header {magic:?}, expected {SNAPSHOT_MAGIC:?})"
        )));
    }
    let parse_count = |line: &str, keyword: &str| -> Result<usize> {
        line.strip_prefix(keyword)
            .and_then(|rest| rest.strip_prefix(' '))
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Error::data(format!("expected '{keyword} <count>', got {line:?}")))
    };

    let d = parse_count(&next("item count")?, "items")?;
    let mut items = Vec::with_capacity(d);
    for _ in 0..d {
        items.push(next("item line")?);
    }

    let n = parse_count(&next("user count")?, "users")?;
    let mut users = Vec::with_capacity(n);
    for _ in 0..n {
        let line = next("user line")?;
        let (user_id, baskets_part) = line
            .split_once('\t')
            .ok_or_else(|| Error::data(format!("user line without tab: {line:?}")))?;
        let baskets = baskets_part
            .split(';')
            .map(|basket| {
                basket
                    .split(',')
                    .map(|id| {
                        id.parse::<u32>()
                            .map_err(|_| Error::data(format!("bad item id {id:?} for user '{user_id}'")))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<Vec<u32>>>>()?;
        users.push(BasketSequence { user_id: user_id.to_string(), baskets });
    }
    Corpus::new(items, users)
}
