//! Binary axis-aligned decision trees.
//!
//! A [`Tree`] is either a split on `x[feature] <= threshold` with two owned
//! subtrees, or a leaf emitting a class index. Rows whose value equals the
//! threshold descend to the left; every module in the crate shares
//! [`goes_left`] for that predicate.

use std::fmt;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::diff::{DiffReport, NodeStatus};
use crate::error::{Error, Result};

/// Decision predicate shared by prediction, partitioning and loss.
#[inline]
pub fn goes_left(value: f64, threshold: f64) -> bool {
    value <= threshold
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tree {
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Tree>,
        right: Box<Tree>,
    },
    Leaf {
        class: usize,
    },
}

impl Tree {
    pub fn leaf(class: usize) -> Self {
        Tree::Leaf { class }
    }

    /// Builds a split node.
    ///
    /// Panics if `threshold` is not finite; use [`Tree::try_split`] for
    /// untrusted input.
    pub fn split(feature: usize, threshold: f64, left: Tree, right: Tree) -> Self {
        Self::try_split(feature, threshold, left, right).expect("split threshold must be finite")
    }

    pub fn try_split(feature: usize, threshold: f64, left: Tree, right: Tree) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::TreeParse {
                path: NodeId::root().to_string(),
                message: format!("non-finite threshold {threshold}"),
            });
        }
        Ok(Tree::Split {
            feature,
            threshold,
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf { .. })
    }

    /// Total number of nodes, splits and leaves together.
    pub fn node_count(&self) -> usize {
        match self {
            Tree::Leaf { .. } => 1,
            Tree::Split { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    /// Number of split levels on the longest root-to-leaf path; a leaf has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Tree::Leaf { .. } => 0,
            Tree::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Largest feature index referenced by any split.
    pub fn max_feature(&self) -> Option<usize> {
        match self {
            Tree::Leaf { .. } => None,
            Tree::Split {
                feature,
                left,
                right,
                ..
            } => Some(
                [Some(*feature), left.max_feature(), right.max_feature()]
                    .into_iter()
                    .flatten()
                    .max()
                    .unwrap_or(*feature),
            ),
        }
    }

    /// Predicts the class of a single row.
    pub fn classify(&self, row: &[f64]) -> Result<usize> {
        let mut node = self;
        loop {
            match node {
                Tree::Leaf { class } => return Ok(*class),
                Tree::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let value = *row.get(*feature).ok_or_else(|| {
                        Error::InputShape(format!(
                            "split on feature {feature} but row has {} values",
                            row.len()
                        ))
                    })?;
                    node = if goes_left(value, *threshold) {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Looks up the node at `id`, if the path exists in this tree.
    pub fn get(&self, id: &NodeId) -> Option<&Tree> {
        let mut node = self;
        for step in &id.0 {
            node = match (node, step) {
                (Tree::Split { left, .. }, Step::Left) => left,
                (Tree::Split { right, .. }, Step::Right) => right,
                (Tree::Leaf { .. }, _) => return None,
            };
        }
        Some(node)
    }

    /// All nodes in pre-order (node, then left subtree, then right subtree).
    pub fn nodes(&self) -> Vec<(NodeId, &Tree)> {
        let mut out = Vec::with_capacity(self.node_count());
        let mut stack = vec![(NodeId::root(), self)];
        while let Some((id, node)) = stack.pop() {
            if let Tree::Split { left, right, .. } = node {
                stack.push((id.child(Step::Right), right));
                stack.push((id.child(Step::Left), left));
            }
            out.push((id, node));
        }
        out
    }

    /// Serializes to the JSON tree document format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("tree values always serialize")
    }

    fn to_value(&self) -> Value {
        match self {
            Tree::Leaf { class } => json!({ "kind": "leaf", "class": class }),
            Tree::Split {
                feature,
                threshold,
                left,
                right,
            } => json!({
                "kind": "split",
                "feature": feature,
                "threshold": threshold,
                "left": left.to_value(),
                "right": right.to_value(),
            }),
        }
    }

    /// Parses a JSON tree document. Errors name the offending node path.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::TreeParse {
            path: NodeId::root().to_string(),
            message: e.to_string(),
        })?;
        Self::from_value(&value, NodeId::root())
    }

    fn from_value(value: &Value, id: NodeId) -> Result<Self> {
        let err = |message: String| Error::TreeParse {
            path: id.to_string(),
            message,
        };
        let obj = value
            .as_object()
            .ok_or_else(|| err("expected an object".into()))?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| err("missing string field `kind`".into()))?;
        match kind {
            "leaf" => {
                let class = index_field(obj, "class").map_err(err)?;
                Ok(Tree::leaf(class))
            }
            "split" => {
                let feature = index_field(obj, "feature").map_err(err)?;
                let threshold = obj
                    .get("threshold")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| err("`threshold` must be a finite number".into()))?;
                if !threshold.is_finite() {
                    return Err(err("`threshold` must be a finite number".into()));
                }
                let left = obj
                    .get("left")
                    .ok_or_else(|| err("missing field `left`".into()))?;
                let right = obj
                    .get("right")
                    .ok_or_else(|| err("missing field `right`".into()))?;
                Ok(Tree::Split {
                    feature,
                    threshold,
                    left: Box::new(Self::from_value(left, id.child(Step::Left))?),
                    right: Box::new(Self::from_value(right, id.child(Step::Right))?),
                })
            }
            other => Err(err(format!(
                "unknown node kind `{other}` (expected `split` or `leaf`)"
            ))),
        }
    }

    /// Renders the tree as a Graphviz digraph.
    ///
    /// When `diff` is given, nodes it marks as changed are filled red and
    /// kept nodes green.
    pub fn to_dot(&self, diff: Option<&DiffReport>) -> String {
        let mut out =
            String::from("digraph tree {\n    node [shape=box, fontname=\"helvetica\"];\n");
        let nodes = self.nodes();
        let index_of = |id: &NodeId| nodes.iter().position(|(n, _)| n == id).unwrap();
        for (i, (id, node)) in nodes.iter().enumerate() {
            let label = match node {
                Tree::Leaf { class } => format!("class = {class}"),
                Tree::Split {
                    feature, threshold, ..
                } => format!("x[{feature}] <= {threshold}"),
            };
            let style = match diff.and_then(|d| d.status(id)) {
                Some(NodeStatus::Changed) => ", style=\"filled,bold\", fillcolor=\"#f4a6a6\"",
                Some(NodeStatus::Kept) => ", style=filled, fillcolor=\"#c8e6c9\"",
                None => "",
            };
            let _ = writeln!(out, "    n{i} [label=\"{label}\"{style}];");
        }
        for (id, node) in &nodes {
            if !node.is_leaf() {
                let parent = index_of(id);
                let left = index_of(&id.child(Step::Left));
                let right = index_of(&id.child(Step::Right));
                let _ = writeln!(out, "    n{parent} -> n{left} [label=\"true\"];");
                let _ = writeln!(out, "    n{parent} -> n{right} [label=\"false\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn index_field(obj: &Map<String, Value>, name: &str) -> std::result::Result<usize, String> {
    obj.get(name)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| format!("`{name}` must be a non-negative integer"))
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Tree, indent: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let pad = "  ".repeat(indent);
            match t {
                Tree::Leaf { class } => writeln!(f, "{pad}class = {class}"),
                Tree::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    writeln!(f, "{pad}x[{feature}] <= {threshold}")?;
                    go(left, indent + 1, f)?;
                    go(right, indent + 1, f)
                }
            }
        }
        go(self, 0, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Left,
    Right,
}

/// Path from the root; the root is the empty path.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(Vec<Step>);

impl NodeId {
    pub fn root() -> Self {
        NodeId(Vec::new())
    }

    pub fn child(&self, step: Step) -> Self {
        let mut path = self.0.clone();
        path.push(step);
        NodeId(path)
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for NodeId {
    /// `root` for the root, otherwise `root.` followed by `L`/`R` steps.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("root")?;
        if !self.0.is_empty() {
            f.write_str(".")?;
            for step in &self.0 {
                f.write_str(match step {
                    Step::Left => "L",
                    Step::Right => "R",
                })?;
            }
        }
        Ok(())
    }
}
