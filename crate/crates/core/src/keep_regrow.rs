//! The Keep-Regrow update operator and its two baselines.
//!
//! Walking the previous tree from the root, each node is offered two
//! candidates on the rows that reach it:
//!
//! * **Keep**: retain the node's split (or leaf class) unchanged and update
//!   its children recursively on their partitions.
//! * **Regrow**: grow a fresh subtree on the partition and prune it with
//!   every node charged `alpha + beta`.
//!
//! The candidate with the lower penalised loss against the previous node
//! wins; Keep wins ties.

use crate::data::{mode, Dataset};
use crate::error::{Error, Result};
use crate::grow::{grow_rows, GrowthConfig};
use crate::loss::{check_features, partition, parts_on_rows, LossParams, Parts};
use crate::prune::{prune, prune_rows};
use crate::tree::Tree;

/// Updates `prev` on `data`, trading accuracy against size and changes.
pub fn update(
    prev: &Tree,
    data: &Dataset,
    params: &LossParams,
    growth: &GrowthConfig,
) -> Result<Tree> {
    growth.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData("cannot update a tree on no rows"));
    }
    check_features(prev, data)?;
    Ok(update_rows(prev, data, &data.all_rows(), params, growth).0)
}

fn update_rows(
    prev: &Tree,
    data: &Dataset,
    rows: &[usize],
    params: &LossParams,
    growth: &GrowthConfig,
) -> (Tree, Parts) {
    // No rows: nothing to learn from, and no errors to pay for.
    if rows.is_empty() {
        let parts = Parts {
            misclassified: 0,
            nodes: prev.node_count(),
            changed: 0,
        };
        return (prev.clone(), parts);
    }

    let (kept, kept_parts) = match prev {
        Tree::Leaf { class } => {
            let wrong = rows.iter().filter(|&&i| data.label(i) != *class).count();
            (
                prev.clone(),
                Parts {
                    misclassified: wrong,
                    nodes: 1,
                    changed: 0,
                },
            )
        }
        Tree::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            let (l, r) = partition(data, rows, *feature, *threshold);
            let (new_left, left_parts) = update_rows(left, data, &l, params, growth);
            let (new_right, right_parts) = update_rows(right, data, &r, params, growth);
            let parts = Parts {
                misclassified: 0,
                nodes: 1,
                changed: 0,
            } + left_parts
                + right_parts;
            (
                Tree::split(*feature, *threshold, new_left, new_right),
                parts,
            )
        }
    };

    let regrown = regrow_rows(data, rows, params, growth);
    let regrown_parts = parts_on_rows(Some(prev), &regrown, data, rows);

    if kept_parts.total(params) <= regrown_parts.total(params) {
        (kept, kept_parts)
    } else {
        (regrown, regrown_parts)
    }
}

fn regrow_rows(data: &Dataset, rows: &[usize], params: &LossParams, growth: &GrowthConfig) -> Tree {
    let grown = grow_rows(data, rows, growth);
    let fallback = mode(&data.class_counts(rows));
    prune_rows(&grown, data, rows, params, fallback).0
}

/// The Regrow candidate on its own: grow on `data`, then prune with every
/// node charged `alpha + beta`.
pub fn regrow(data: &Dataset, params: &LossParams, growth: &GrowthConfig) -> Result<Tree> {
    growth.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData("cannot regrow a tree on no rows"));
    }
    Ok(regrow_rows(data, &data.all_rows(), params, growth))
}

/// Retrain baseline: grow and prune from scratch with no change penalty,
/// ignoring any previous tree.
pub fn retrain(data: &Dataset, params: &LossParams, growth: &GrowthConfig) -> Result<Tree> {
    let grown = crate::grow::grow(data, growth)?;
    prune(&grown, data, &params.with_beta(0.0)?)
}

/// Keep-original baseline: the previous tree, untouched.
pub fn keep_original(prev: &Tree) -> Tree {
    prev.clone()
}
