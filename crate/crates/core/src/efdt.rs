//! Split revision for the EFDT policy.
//!
//! Leaves split as soon as the best attribute beats the null split by the
//! Hoeffding bound. Split nodes keep their statistics and re-score
//! themselves every `nmin` units of weight; a split whose attribute trails
//! the current best by more than the bound is demoted to a fresh leaf.

use crate::error::Result;
use crate::observer::best_splits;
use crate::stream::LabeledExample;
use crate::tree::{should_split, DecisionSite, LeafContext, SplitDecision, SplitNode};

/// EFDT leaf rule: compare the best merit against the null split.
pub fn efdt_should_split(best: f64, epsilon: f64, tau: f64) -> bool {
    best > 0.0 && should_split(best, 0.0, epsilon, tau)
}

/// Re-evaluation verdict for a split node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Revision {
    Keep,
    Replace,
}

/// Keep unless a different attribute beats the current one by more than
/// `epsilon`.
pub fn revise(current_attribute: usize, best: (Option<usize>, f64), current_merit: f64, epsilon: f64) -> Revision {
    let (best_attribute, best_merit) = best;
    if best_attribute.is_some_and(|a| a != current_attribute) && best_merit - current_merit > epsilon {
        Revision::Replace
    } else {
        Revision::Keep
    }
}

/// Folds one routed instance into a split node's statistics and re-evaluates
/// the split when due. Returns `true` when the subtree must be replaced.
pub(crate) fn update_split_node(
    node: &mut SplitNode,
    example: &LabeledExample,
    weight: f64,
    ctx: &mut LeafContext<'_>,
) -> Result<bool> {
    node.class_distribution[example.label as usize] += weight;
    let Some(stats) = node.revision.as_mut() else {
        return Ok(false);
    };
    stats.weight_seen += weight;
    ctx.observe_all(&mut stats.observers, example, weight)?;
    if stats.weight_seen - stats.weight_at_last_eval < ctx.config.nmin as f64 {
        return Ok(false);
    }
    stats.weight_at_last_eval = stats.weight_seen;
    let disabled = vec![false; stats.observers.len()];
    let ranked = best_splits(&stats.observers, &disabled, &node.class_distribution, ctx.counters)?;
    ctx.events.reevaluations += 1;
    let epsilon = ctx.epsilon(stats.weight_seen);
    let current = node.test.attribute();
    let current_merit = ranked
        .iter()
        .find(|s| s.attribute == Some(current))
        .map_or(0.0, |s| s.merit);
    let verdict = revise(current, (ranked[0].attribute, ranked[0].merit), current_merit, epsilon);
    let best_merit = ranked[0].merit;
    ctx.record(|instance| SplitDecision {
        instance,
        site: DecisionSite::Internal,
        epsilon,
        best_merit,
        runner_up_merit: current_merit,
        split: verdict == Revision::Replace,
    });
    Ok(verdict == Revision::Replace)
}
