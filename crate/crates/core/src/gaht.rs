//! Green Accelerated Hoeffding Tree: per-leaf split criteria.
//!
//! Every arrival at a leaf recomputes the leaf's arrival fraction
//!
//! ```text
//! fraction = n_l / (n_since_creation / n_leaves)
//! ```
//!
//! which is 1 when instances spread evenly over the leaves. A leaf whose
//! fraction drops below `deactivate_threshold` stops growing for good; one
//! whose fraction exceeds `grow_fast_threshold` switches to the null-split
//! criterion. Everything else behaves like a plain Hoeffding tree, and split
//! nodes are never re-evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{GreenLeafState, HoeffdingTree, SplitPolicy, TreeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GahtConfig {
    pub base: TreeConfig,
    pub deactivate_threshold: f64,
    pub grow_fast_threshold: f64,
}

impl Default for GahtConfig {
    fn default() -> Self {
        Self {
            base: TreeConfig::default(),
            deactivate_threshold: 0.01,
            grow_fast_threshold: 2.0,
        }
    }
}

impl GahtConfig {
    /// Thresholds that can never fire, reducing the tree to a plain HT.
    pub fn degenerate(base: TreeConfig) -> Self {
        Self {
            base,
            deactivate_threshold: 0.0,
            grow_fast_threshold: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.deactivate_threshold >= 0.0) || self.deactivate_threshold.is_infinite() {
            return Err(Error::InvalidConfig(format!(
                "deactivate threshold must be finite and >= 0, got {}",
                self.deactivate_threshold
            )));
        }
        if !(self.grow_fast_threshold > self.deactivate_threshold) {
            return Err(Error::InvalidConfig(format!(
                "grow-fast threshold ({}) must exceed the deactivate threshold ({})",
                self.grow_fast_threshold, self.deactivate_threshold
            )));
        }
        Ok(())
    }

    pub fn policy(&self) -> SplitPolicy {
        SplitPolicy::Green {
            deactivate_threshold: self.deactivate_threshold,
            grow_fast_threshold: self.grow_fast_threshold,
        }
    }
}

/// Arrival fraction of a leaf, or `None` while no tree weight has arrived
/// since the leaf was created.
pub fn fraction(state: &GreenLeafState, total_tree_weight: f64, n_leaves: usize) -> Option<f64> {
    let since_creation = total_tree_weight - state.tree_weight_at_creation;
    (since_creation > 0.0).then(|| state.n_l / (since_creation / n_leaves.max(1) as f64))
}

/// State a leaf is in when a split decision is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeafMode {
    Deactivated,
    /// Classic second-best criterion.
    Hoeffding,
    /// Null-split criterion.
    Fast,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafModeCensus {
    pub inactive_leaves: usize,
    pub fast_nodes: usize,
}

pub fn leaf_mode_census(tree: &HoeffdingTree) -> LeafModeCensus {
    let census = tree.node_count();
    LeafModeCensus {
        inactive_leaves: census.deactivated_leaves,
        fast_nodes: census.fast_nodes,
    }
}
