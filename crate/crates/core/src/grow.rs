//! Greedy CART-style grower with Gini impurity.

use serde::{Deserialize, Serialize};

use crate::data::{mode, Dataset};
use crate::error::{Error, Result};
use crate::loss::partition;
use crate::tree::Tree;

/// Decreases at or below this are treated as zero (rounding noise on
/// splits that leave class proportions unchanged).
const MIN_DECREASE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Impurity {
    #[default]
    Gini,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthConfig {
    /// `None` grows until the other stopping rules fire.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub impurity: Impurity,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            max_depth: Some(20),
            min_samples_split: 2,
            impurity: Impurity::Gini,
        }
    }
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::Config(format!(
                "min_samples_split must be >= 2, got {}",
                self.min_samples_split
            )));
        }
        if self.max_depth == Some(0) {
            return Err(Error::Config("max_depth must be >= 1 when bounded".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    pub decrease: f64,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Midpoint of two consecutive distinct values, kept inside `[lo, hi)` so
/// that `lo` goes left and `hi` goes right.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = 0.5 * lo + 0.5 * hi;
    if mid >= lo && mid < hi {
        mid
    } else {
        lo
    }
}

/// Best Gini split over all features, or `None` when no candidate has a
/// strictly positive impurity decrease.
pub fn best_split(data: &Dataset) -> Result<Option<SplitCandidate>> {
    if data.is_empty() {
        return Err(Error::EmptyData("best_split needs at least one row"));
    }
    Ok(best_split_rows(data, &data.all_rows()))
}

pub(crate) fn best_split_rows(data: &Dataset, rows: &[usize]) -> Option<SplitCandidate> {
    let n = rows.len();
    let parent_counts = data.class_counts(rows);
    let parent = gini(&parent_counts, n);
    if parent <= 0.0 {
        return None;
    }

    let mut best: Option<SplitCandidate> = None;
    let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(n);
    for feature in 0..data.n_features() {
        sorted.clear();
        sorted.extend(
            rows.iter()
                .map(|&i| (data.value(i, feature), data.label(i))),
        );
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = vec![0usize; data.n_classes()];
        let mut right = parent_counts.clone();
        // running sums of squared class counts on each side
        let mut sq_left: u64 = 0;
        let mut sq_right: u64 = right.iter().map(|&c| (c as u64).pow(2)).sum();
        for k in 0..n - 1 {
            let class = sorted[k].1;
            sq_left += 2 * left[class] as u64 + 1;
            sq_right -= 2 * right[class] as u64 - 1;
            left[class] += 1;
            right[class] -= 1;

            let (lo, hi) = (sorted[k].0, sorted[k + 1].0);
            if lo == hi {
                continue;
            }
            let nl = (k + 1) as f64;
            let nr = (n - k - 1) as f64;
            let weighted = (nl - sq_left as f64 / nl + nr - sq_right as f64 / nr) / n as f64;
            let decrease = parent - weighted;
            if decrease > MIN_DECREASE && best.is_none_or(|b| decrease > b.decrease) {
                best = Some(SplitCandidate {
                    feature,
                    threshold: midpoint(lo, hi),
                    decrease,
                });
            }
        }
    }
    best
}

/// Grows a tree by recursive best splits. Leaves take the majority class,
/// ties to the lowest class index.
pub fn grow(data: &Dataset, config: &GrowthConfig) -> Result<Tree> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData("cannot grow a tree on no rows"));
    }
    Ok(grow_rows(data, &data.all_rows(), config))
}

pub(crate) fn grow_rows(data: &Dataset, rows: &[usize], config: &GrowthConfig) -> Tree {
    grow_node(data, rows, config, 0)
}

fn grow_node(data: &Dataset, rows: &[usize], config: &GrowthConfig, depth: usize) -> Tree {
    let leaf = || Tree::leaf(mode(&data.class_counts(rows)));
    if rows.len() < config.min_samples_split || config.max_depth.is_some_and(|d| depth >= d) {
        return leaf();
    }
    let Some(split) = best_split_rows(data, rows) else {
        return leaf();
    };
    let (l, r) = partition(data, rows, split.feature, split.threshold);
    debug_assert!(!l.is_empty() && !r.is_empty());
    Tree::split(
        split.feature,
        split.threshold,
        grow_node(data, &l, config, depth + 1),
        grow_node(data, &r, config, depth + 1),
    )
}
