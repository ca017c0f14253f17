//! Node-by-node comparison of a previous and an updated tree.
//!
//! Two measures come out of one simultaneous traversal:
//!
//! * `delta`, the strict change count: a node whose split or class differs
//!   from the previous tree is changed together with everything below it.
//! * `similarity`, a partial-match score. Exact node matches score 1, a split
//!   on the same feature with a moved threshold scores 0.5, and anything else
//!   scores 0 and ends the comparison for that subtree. The sum is divided by
//!   the larger of the two node counts.
//!
//! Other metrics plug in through [`SimilarityMetric`].

use std::fmt::Write as _;

use crate::loss::roots_match;
use crate::tree::{NodeId, Step, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    Kept,
    Changed,
}

impl NodeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeStatus::Kept => "kept",
            NodeStatus::Changed => "changed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffEntry {
    /// Position in the new tree.
    pub node: NodeId,
    pub status: NodeStatus,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    /// One entry per node of the new tree, in pre-order.
    pub entries: Vec<DiffEntry>,
    pub delta: usize,
    pub similarity: f64,
}

impl DiffReport {
    pub fn status(&self, node: &NodeId) -> Option<NodeStatus> {
        self.entries
            .iter()
            .find(|e| &e.node == node)
            .map(|e| e.status)
    }

    /// Tab-separated table: header row, then `node  status  score` per node.
    pub fn to_table(&self) -> String {
        let mut out = String::from("node\tstatus\tscore\n");
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}\t{}", e.node, e.status.as_str(), e.score);
        }
        out
    }
}

/// A similarity measure between a previous and a new tree, in `[0, 1]`.
pub trait SimilarityMetric {
    fn similarity(&self, prev: &Tree, new: &Tree) -> f64;
}

/// Partial-match similarity with half credit for moved thresholds.
#[derive(Debug, Clone, Copy, Default)]
pub struct PartialMatch;

impl SimilarityMetric for PartialMatch {
    fn similarity(&self, prev: &Tree, new: &Tree) -> f64 {
        structural_diff(prev, new).similarity
    }
}

fn node_score(prev: &Tree, new: &Tree) -> f64 {
    match (prev, new) {
        _ if roots_match(prev, new) => 1.0,
        (Tree::Split { feature: a, .. }, Tree::Split { feature: b, .. }) if a == b => 0.5,
        _ => 0.0,
    }
}

pub fn structural_diff(prev: &Tree, new: &Tree) -> DiffReport {
    let mut entries = Vec::with_capacity(new.node_count());
    walk(Some(prev), new, NodeId::root(), false, true, &mut entries);
    let delta = entries
        .iter()
        .filter(|e| e.status == NodeStatus::Changed)
        .count();
    let matched: f64 = entries.iter().map(|e| e.score).sum();
    let similarity = matched / prev.node_count().max(new.node_count()) as f64;
    DiffReport {
        entries,
        delta,
        similarity,
    }
}

/// Like [`structural_diff`] but reports `metric` as the similarity.
pub fn structural_diff_with(prev: &Tree, new: &Tree, metric: &dyn SimilarityMetric) -> DiffReport {
    DiffReport {
        similarity: metric.similarity(prev, new),
        ..structural_diff(prev, new)
    }
}

pub fn similarity(prev: &Tree, new: &Tree) -> f64 {
    structural_diff(prev, new).similarity
}

fn walk(
    prev: Option<&Tree>,
    new: &Tree,
    id: NodeId,
    changed_above: bool,
    scoring: bool,
    out: &mut Vec<DiffEntry>,
) {
    let matched = !changed_above && prev.is_some_and(|p| roots_match(p, new));
    let score = match prev {
        Some(p) if scoring => node_score(p, new),
        _ => 0.0,
    };
    out.push(DiffEntry {
        node: id.clone(),
        status: if matched {
            NodeStatus::Kept
        } else {
            NodeStatus::Changed
        },
        score,
    });
    if let Tree::Split { left, right, .. } = new {
        let (pl, pr) = match prev {
            Some(Tree::Split { left, right, .. }) => (Some(&**left), Some(&**right)),
            _ => (None, None),
        };
        let descend = scoring && score > 0.0;
        walk(pl, left, id.child(Step::Left), !matched, descend, out);
        walk(pr, right, id.child(Step::Right), !matched, descend, out);
    }
}
