//! Decision-tree updates that keep the number of structural changes an
//! auditor has to review small.
//!
//! The loss being minimised is
//! `misclassifications + alpha * nodes + beta * changed_nodes`, where a node
//! counts as changed when its split or class differs from the previous tree
//! (a changed split also changes everything below it). [`keep_regrow::update`]
//! walks the previous tree and, at each node, keeps it or regrows that
//! subtree from the current data, whichever is cheaper.

pub mod cli;
pub mod data;
pub mod diff;
pub mod error;
pub mod eval;
pub mod grow;
pub mod keep_regrow;
pub mod loss;
pub mod prune;
pub mod tree;

pub use data::{BatchPlan, Dataset};
pub use diff::{structural_diff, DiffReport};
pub use error::{Error, Result};
pub use grow::GrowthConfig;
pub use keep_regrow::{keep_original, retrain, update};
pub use loss::{LossBreakdown, LossParams};
pub use tree::{NodeId, Tree};
