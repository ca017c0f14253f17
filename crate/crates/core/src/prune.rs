//! Bottom-up pruning of a freshly grown tree.
//!
//! A grown tree has no counterpart in the previous tree, so every node it
//! keeps is both a complexity cost and a change: each retained node costs
//! `alpha + beta`. At every split the cheaper of "terminate to the majority
//! leaf" and "keep the split with pruned children" wins; exact ties terminate.

use crate::data::{mode, Dataset};
use crate::error::Result;
use crate::loss::{check_features, partition, LossParams, Parts};
use crate::tree::Tree;

/// Leaf predicting the most frequent label (lowest class index on ties).
/// Empty data yields class 0.
pub fn best_leaf(data: &Dataset) -> Tree {
    Tree::leaf(mode(&data.class_counts(&data.all_rows())))
}

pub fn prune(grown: &Tree, data: &Dataset, params: &LossParams) -> Result<Tree> {
    check_features(grown, data)?;
    let rows = data.all_rows();
    let fallback = mode(&data.class_counts(&rows));
    Ok(prune_rows(grown, data, &rows, params, fallback).0)
}

/// Prunes `tree` against `rows`, returning the result and its loss parts
/// with every node counted as changed. `fallback` labels a node that
/// receives no rows.
pub(crate) fn prune_rows(
    tree: &Tree,
    data: &Dataset,
    rows: &[usize],
    params: &LossParams,
    fallback: usize,
) -> (Tree, Parts) {
    let (leaf, leaf_parts) = terminate(data, rows, fallback);
    let Tree::Split {
        feature,
        threshold,
        left,
        right,
    } = tree
    else {
        return (leaf, leaf_parts);
    };

    let here = if rows.is_empty() {
        fallback
    } else {
        leaf_class(&leaf)
    };
    let (l, r) = partition(data, rows, *feature, *threshold);
    let (left, left_parts) = prune_rows(left, data, &l, params, here);
    let (right, right_parts) = prune_rows(right, data, &r, params, here);
    let split_parts = Parts {
        misclassified: 0,
        nodes: 1,
        changed: 1,
    } + left_parts
        + right_parts;

    if leaf_parts.total(params) <= split_parts.total(params) {
        (leaf, leaf_parts)
    } else {
        (Tree::split(*feature, *threshold, left, right), split_parts)
    }
}

fn leaf_class(t: &Tree) -> usize {
    match t {
        Tree::Leaf { class } => *class,
        Tree::Split { .. } => unreachable!("terminate always yields a leaf"),
    }
}

fn terminate(data: &Dataset, rows: &[usize], fallback: usize) -> (Tree, Parts) {
    if rows.is_empty() {
        return (
            Tree::leaf(fallback),
            Parts {
                misclassified: 0,
                nodes: 1,
                changed: 1,
            },
        );
    }
    let counts = data.class_counts(rows);
    let class = mode(&counts);
    (
        Tree::leaf(class),
        Parts {
            misclassified: rows.len() - counts[class],
            nodes: 1,
            changed: 1,
        },
    )
}
