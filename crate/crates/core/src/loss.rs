//! Penalised loss over a candidate tree: training misclassifications, node
//! count and the number of nodes changed relative to the previous tree.
//!
//! `L(prev, new, D) = f(new, D) + alpha * c(new) + beta * delta(prev, new)`
//!
//! The change penalty applies where a node *differs* from the previous tree:
//! a split whose feature or threshold moved, a leaf whose class moved, or a
//! node whose kind flipped. Such a node discards its whole subtree, so every
//! node beneath it in the new tree counts as changed too.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::tree::{goes_left, Tree};

/// Complexity penalty `alpha` per node and change penalty `beta` per changed node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    alpha: f64,
    beta: f64,
}

impl LossParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Config(format!(
                "alpha must be finite and >= 0, got {alpha}"
            )));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::Config(format!(
                "beta must be finite and >= 0, got {beta}"
            )));
        }
        Ok(LossParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self::new(self.alpha, beta)
    }

    /// The one place loss components are combined. Every comparison in the
    /// crate goes through here so equal components give bit-equal totals.
    pub fn total(&self, misclassifications: usize, nodes: usize, changed: usize) -> f64 {
        misclassifications as f64 + self.alpha * nodes as f64 + self.beta * changed as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub misclassifications: usize,
    pub nodes: usize,
    pub changed: usize,
    pub total: f64,
}

impl LossBreakdown {
    pub(crate) fn from_parts(params: &LossParams, parts: Parts) -> Self {
        LossBreakdown {
            misclassifications: parts.misclassified,
            nodes: parts.nodes,
            changed: parts.changed,
            total: params.total(parts.misclassified, parts.nodes, parts.changed),
        }
    }
}

/// Integer loss components, summed up the tree before being combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Parts {
    pub misclassified: usize,
    pub nodes: usize,
    pub changed: usize,
}

impl std::ops::Add for Parts {
    type Output = Parts;

    fn add(self, o: Parts) -> Parts {
        Parts {
            misclassified: self.misclassified + o.misclassified,
            nodes: self.nodes + o.nodes,
            changed: self.changed + o.changed,
        }
    }
}

impl Parts {
    pub fn total(&self, params: &LossParams) -> f64 {
        params.total(self.misclassified, self.nodes, self.changed)
    }
}

pub(crate) fn check_features(tree: &Tree, data: &Dataset) -> Result<()> {
    match tree.max_feature() {
        Some(f) if f >= data.n_features() => Err(Error::InputShape(format!(
            "tree splits on feature {f} but the data has {} features",
            data.n_features()
        ))),
        _ => Ok(()),
    }
}

/// Splits `rows` by `x[feature] <= threshold`.
pub(crate) fn partition(
    data: &Dataset,
    rows: &[usize],
    feature: usize,
    threshold: f64,
) -> (Vec<usize>, Vec<usize>) {
    rows.iter()
        .partition(|&&i| goes_left(data.value(i, feature), threshold))
}

pub(crate) fn misclassified_rows(tree: &Tree, data: &Dataset, rows: &[usize]) -> usize {
    rows.iter()
        .filter(|&&i| tree.classify(data.row(i)).expect("features checked") != data.label(i))
        .count()
}

/// Number of rows the tree gets wrong.
pub fn misclassification_count(tree: &Tree, data: &Dataset) -> Result<usize> {
    check_features(tree, data)?;
    Ok(misclassified_rows(tree, data, &data.all_rows()))
}

/// True when `prev` and `new` agree at their roots: both splits on the same
/// feature and threshold, or both leaves with the same class.
pub(crate) fn roots_match(prev: &Tree, new: &Tree) -> bool {
    match (prev, new) {
        (Tree::Leaf { class: a }, Tree::Leaf { class: b }) => a == b,
        (
            Tree::Split {
                feature: fa,
                threshold: ta,
                ..
            },
            Tree::Split {
                feature: fb,
                threshold: tb,
                ..
            },
        ) => fa == fb && ta == tb,
        _ => false,
    }
}

/// Nodes of `new` not present in `prev`.
pub fn change_count(prev: Option<&Tree>, new: &Tree) -> usize {
    let Some(prev) = prev else {
        return new.node_count();
    };
    if !roots_match(prev, new) {
        return new.node_count();
    }
    match (prev, new) {
        (
            Tree::Split {
                left: pl,
                right: pr,
                ..
            },
            Tree::Split {
                left: nl,
                right: nr,
                ..
            },
        ) => change_count(Some(pl), nl) + change_count(Some(pr), nr),
        _ => 0,
    }
}

pub fn loss(
    prev: Option<&Tree>,
    new: &Tree,
    data: &Dataset,
    params: &LossParams,
) -> Result<LossBreakdown> {
    check_features(new, data)?;
    Ok(LossBreakdown::from_parts(
        params,
        parts_on_rows(prev, new, data, &data.all_rows()),
    ))
}

pub(crate) fn parts_on_rows(
    prev: Option<&Tree>,
    new: &Tree,
    data: &Dataset,
    rows: &[usize],
) -> Parts {
    Parts {
        misclassified: misclassified_rows(new, data, rows),
        nodes: new.node_count(),
        changed: change_count(prev, new),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tests::{arb_tree, stump};
    use proptest::prelude::*;

    fn xy(xs: &[f64], ys: &[usize]) -> Dataset {
        Dataset::from_flat(xs.to_vec(), 1, ys.to_vec(), 2).unwrap()
    }

    fn params(a: f64, b: f64) -> LossParams {
        LossParams::new(a, b).unwrap()
    }

    #[test]
    fn misclassification_examples() {
        let d = xy(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 1, 1]);
        assert_eq!(misclassification_count(&Tree::leaf(0), &d).unwrap(), 2);
        assert_eq!(
            misclassification_count(&stump(0, 2.5, 0, 1), &d).unwrap(),
            0
        );
        // row by row: 1->0 (y1) wrong, 2->0 (y0) ok, 3->1 (y1) ok, 4->1 (y0) wrong
        let d = xy(&[1.0, 2.0, 3.0, 4.0], &[1, 0, 1, 0]);
        assert_eq!(
            misclassification_count(&stump(0, 2.5, 0, 1), &d).unwrap(),
            2
        );
        let empty = Dataset::from_flat(vec![], 1, vec![], 2).unwrap();
        assert_eq!(
            misclassification_count(&stump(0, 2.5, 0, 1), &empty).unwrap(),
            0
        );
    }

    #[test]
    fn misclassification_shape_error() {
        let d = xy(&[1.0], &[0]);
        assert!(matches!(
            misclassification_count(&stump(1, 0.0, 0, 1), &d),
            Err(Error::InputShape(_))
        ));
    }

    #[test]
    fn change_count_examples() {
        let s = stump(0, 2.5, 0, 1);
        assert_eq!(change_count(Some(&s), &s), 0);
        assert_eq!(change_count(None, &s), 3);
        assert_eq!(change_count(Some(&s), &stump(1, 2.5, 0, 1)), 3);
        assert_eq!(change_count(Some(&s), &stump(0, 2.5, 0, 0)), 1);
        // kind flip counts the whole new subtree
        assert_eq!(change_count(Some(&Tree::leaf(0)), &s), 3);
        assert_eq!(change_count(Some(&s), &Tree::leaf(0)), 1);
    }

    #[test]
    fn loss_examples() {
        let d = xy(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 1, 1]);
        let s = stump(0, 2.5, 0, 1);
        let l = loss(Some(&s), &s, &d, &params(5.0, 1.0)).unwrap();
        assert_eq!(
            (l.misclassifications, l.nodes, l.changed, l.total),
            (0, 3, 0, 15.0)
        );

        let d3 = xy(&[1.0, 2.0, 3.0], &[0, 0, 1]);
        let l = loss(None, &Tree::leaf(0), &d3, &params(1.0, 1.0)).unwrap();
        assert_eq!(
            (l.misclassifications, l.nodes, l.changed, l.total),
            (1, 1, 1, 3.0)
        );

        // x=3 now goes left and is wrong; the moved threshold discards all 3 nodes
        let l = loss(Some(&s), &stump(0, 3.5, 0, 1), &d, &params(5.0, 1.0)).unwrap();
        assert_eq!(
            (l.misclassifications, l.nodes, l.changed, l.total),
            (1, 3, 3, 19.0)
        );
    }

    #[test]
    fn params_reject_negative_and_non_finite() {
        assert!(LossParams::new(-1.0, 0.0).is_err());
        assert!(LossParams::new(0.0, -100.0).is_err());
        assert!(LossParams::new(f64::NAN, 0.0).is_err());
        assert!(LossParams::new(0.0, f64::INFINITY).is_err());
    }

    fn arb_case() -> impl Strategy<Value = (Option<Tree>, Tree, Dataset, LossParams)> {
        let data =
            prop::collection::vec(((-5i32..=5), (-5i32..=5), 0usize..3), 0..40).prop_map(|rows| {
                let feats = rows
                    .iter()
                    .flat_map(|&(a, b, _)| [f64::from(a) * 0.5, f64::from(b) * 0.5])
                    .collect();
                Dataset::from_flat(feats, 2, rows.iter().map(|r| r.2).collect(), 3).unwrap()
            });
        // quarter-integer penalties keep every total exactly representable
        (
            prop::option::of(arb_tree(3, 2, 3)),
            arb_tree(3, 2, 3),
            data,
            (0u32..40, 0u32..40),
        )
            .prop_map(|(p, n, d, (a, b))| {
                (p, n, d, params(f64::from(a) * 0.25, f64::from(b) * 0.25))
            })
    }

    proptest! {
        #[test]
        fn loss_decomposes_over_children((prev, new, data, p) in arb_case()) {
            let whole = loss(prev.as_ref(), &new, &data, &p).unwrap();
            if let Tree::Split { feature, threshold, left, right } = &new {
                let matched = prev.as_ref().is_some_and(|pr| roots_match(pr, &new));
                let (pl, pr) = match (&prev, matched) {
                    (Some(Tree::Split { left, right, .. }), true) => (Some(&**left), Some(&**right)),
                    _ => (None, None),
                };
                let (lrows, rrows) = partition(&data, &data.all_rows(), *feature, *threshold);
                let l = loss(pl, left, &data.subset(&lrows), &p).unwrap();
                let r = loss(pr, right, &data.subset(&rrows), &p).unwrap();
                let root_change = if matched { 0.0 } else { p.beta() };
                prop_assert_eq!(whole.total, l.total + r.total + p.alpha() + root_change);
                prop_assert_eq!(whole.misclassifications, l.misclassifications + r.misclassifications);
                prop_assert_eq!(whole.changed, l.changed + r.changed + usize::from(!matched));
            }
            prop_assert!(whole.changed <= whole.nodes);
        }

        #[test]
        fn delta_zero_iff_equal(a in arb_tree(3, 2, 2), b in arb_tree(3, 2, 2)) {
            prop_assert_eq!(change_count(Some(&a), &b) == 0, a == b);
            prop_assert_eq!(change_count(None, &b), b.node_count());
        }

        #[test]
        fn zero_beta_ignores_prev((prev, new, data, p) in arb_case(), other in arb_tree(3, 2, 3)) {
            let p = p.with_beta(0.0).unwrap();
            let a = loss(prev.as_ref(), &new, &data, &p).unwrap();
            let b = loss(Some(&other), &new, &data, &p).unwrap();
            prop_assert_eq!(a.total, b.total);
        }

        #[test]
        fn total_is_monotone_in_components(f in 0usize..100, c in 1usize..50, d in 0usize..50, a in 1u32..20, b in 1u32..20) {
            let p = params(f64::from(a) * 0.5, f64::from(b) * 0.5);
            let base = p.total(f, c, d);
            prop_assert!(p.total(f + 1, c, d) > base);
            prop_assert!(p.total(f, c + 1, d) > base);
            prop_assert!(p.total(f, c, d + 1) > base);
        }
    }
}
