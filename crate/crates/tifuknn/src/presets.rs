//! Reference constants for the four public grocery datasets TIFU-KNN was
//! originally tuned on: best-known hyperparameters, dataset statistics after
//! preprocessing, the published pattern-ratio measurements, and headline
//! recall/NDCG figures. These drive CLI defaults, grid construction, and
//! regression spot-checks.

use crate::eval::GridSpec;
use crate::representation::DecayConfig;

/// Published pattern-ratio row (300 neighbors over plain frequency vectors):
/// recall of the user's own items, of the neighbors' items, of the
/// intersection, and of items seen by neither.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternReference {
    pub recall_repeat: f64,
    pub recall_collab: f64,
    pub recall_both: f64,
    pub recall_unseen: f64,
}

/// Best-known TIFU-KNN test metrics on the dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadlineMetrics {
    pub recall_at_10: f64,
    pub recall_at_20: f64,
    pub ndcg_at_10: f64,
    pub ndcg_at_20: f64,
}

/// Everything this crate knows about one reference dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPreset {
    /// Name accepted by `--dataset-preset` (lowercase, hyphenated).
    pub name: &'static str,
    /// Best-known hyperparameters (k, m, r_b, r_g, blend) with the standard
    /// 10-item predicted basket.
    pub config: DecayConfig,
    /// Group counts searched for this dataset.
    pub groups_grid: &'static [usize],
    pub pattern: PatternReference,
    /// Distinct items after preprocessing.
    pub n_items: usize,
    /// Users after preprocessing.
    pub n_users: usize,
    pub avg_basket_size: f64,
    pub avg_baskets_per_user: f64,
    pub headline: HeadlineMetrics,
}

impl DatasetPreset {
    /// The full hyperparameter grid searched for this dataset: neighbor
    /// counts 100..1300 by 200, both decays 0.1..1.0 by 0.1, blend 0.0..1.0
    /// by 0.1, and the dataset's group-count list.
    pub fn grid(&self) -> GridSpec {
        GridSpec {
            neighbors: vec![100, 300, 500, 700, 900, 1100, 1300],
            groups: self.groups_grid.to_vec(),
            basket_decays: (1..=10).map(|i| i as f64 / 10.0).collect(),
            group_decays: (1..=10).map(|i| i as f64 / 10.0).collect(),
            blends: (0..=10).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

const fn config(
    neighbors: usize,
    groups: usize,
    basket_decay: f64,
    group_decay: f64,
    blend: f64,
) -> DecayConfig {
    DecayConfig { groups, basket_decay, group_decay, blend, neighbors, basket_size: 10 }
}

pub static VALUED_SHOPPER: DatasetPreset = DatasetPreset {
    name: "valued-shopper",
    config: config(300, 7, 1.0, 0.6, 0.7),
    groups_grid: &[3, 7, 11, 15, 19, 23],
    pattern: PatternReference {
        recall_repeat: 0.6570,
        recall_collab: 0.9808,
        recall_both: 0.6490,
        recall_unseen: 0.0111,
    },
    n_items: 7907,
    n_users: 10_000,
    avg_basket_size: 8.71,
    avg_baskets_per_user: 56.85,
    headline: HeadlineMetrics {
        recall_at_10: 0.2162,
        recall_at_20: 0.3028,
        ndcg_at_10: 0.2171,
        ndcg_at_20: 0.2589,
    },
};

pub static INSTACART: DatasetPreset = DatasetPreset {
    name: "instacart",
    config: config(900, 3, 0.9, 0.7, 0.9),
    groups_grid: &[2, 3, 4, 5, 6, 7],
    pattern: PatternReference {
        recall_repeat: 0.5711,
        recall_collab: 0.8338,
        recall_both: 0.5056,
        recall_unseen: 0.1007,
    },
    n_items: 8000,
    n_users: 19_935,
    avg_basket_size: 8.97,
    avg_baskets_per_user: 7.97,
    headline: HeadlineMetrics {
        recall_at_10: 0.3952,
        recall_at_20: 0.4875,
        ndcg_at_10: 0.3825,
        ndcg_at_20: 0.4384,
    },
};

pub static DUNNHUMBY: DatasetPreset = DatasetPreset {
    name: "dunnhumby",
    config: config(900, 3, 0.9, 0.6, 0.2),
    groups_grid: &[2, 3, 4, 5, 6, 7],
    pattern: PatternReference {
        recall_repeat: 0.2777,
        recall_collab: 0.5580,
        recall_both: 0.2432,
        recall_unseen: 0.4075,
    },
    n_items: 4997,
    n_users: 36_241,
    avg_basket_size: 7.33,
    avg_baskets_per_user: 7.99,
    headline: HeadlineMetrics {
        recall_at_10: 0.2087,
        recall_at_20: 0.2692,
        ndcg_at_10: 0.1983,
        ndcg_at_20: 0.2302,
    },
};

pub static TA_FENG: DatasetPreset = DatasetPreset {
    name: "tafeng",
    config: config(300, 7, 0.9, 0.7, 0.7),
    groups_grid: &[2, 3, 4, 5, 6, 7],
    pattern: PatternReference {
        recall_repeat: 0.1378,
        recall_collab: 0.8614,
        recall_both: 0.1256,
        recall_unseen: 0.1262,
    },
    n_items: 12_062,
    n_users: 13_949,
    avg_basket_size: 6.27,
    avg_baskets_per_user: 5.69,
    headline: HeadlineMetrics {
        recall_at_10: 0.1301,
        recall_at_20: 0.1810,
        ndcg_at_10: 0.1011,
        ndcg_at_20: 0.1206,
    },
};

/// All presets, in the order they are usually reported.
pub static ALL: [&DatasetPreset; 4] = [&VALUED_SHOPPER, &INSTACART, &DUNNHUMBY, &TA_FENG];

/// Looks a preset up by its `--dataset-preset` name.
pub fn by_name(name: &str) -> Option<&'static DatasetPreset> {
    ALL.iter().copied().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_configs_validate_and_resolve_by_name() {
        for preset in ALL {
            preset.config.validate().unwrap();
            assert_eq!(by_name(preset.name).unwrap().name, preset.name);
        }
        assert!(by_name("unknown").is_none());
    }

    #[test]
    fn pattern_rows_satisfy_the_inclusion_exclusion_identity_approximately() {
        // The four published ratios are rounded to 4 decimals, so the exact
        // identity own + collab − both + unseen = 1 holds only to ~2e-4.
        for preset in ALL {
            let p = preset.pattern;
            let total = p.recall_repeat + p.recall_collab - p.recall_both + p.recall_unseen;
            assert!((total - 1.0).abs() < 2e-4, "{}: {total}", preset.name);
        }
    }

    #[test]
    fn grids_cover_the_documented_ranges() {
        let grid = INSTACART.grid();
        assert_eq!(grid.neighbors, [100, 300, 500, 700, 900, 1100, 1300]);
        assert_eq!(grid.groups, [2, 3, 4, 5, 6, 7]);
        assert_eq!(VALUED_SHOPPER.grid().groups, [3, 7, 11, 15, 19, 23]);
        assert_eq!(grid.basket_decays.len(), 10);
        assert_eq!(grid.blends.len(), 11);
        assert!(grid.contains(&INSTACART.config));
    }
}
