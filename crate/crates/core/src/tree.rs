//! Incremental Hoeffding tree with pluggable split policies.
//!
//! One tree type backs all three single-tree learners. The policy decides
//! which runner-up a leaf's best split is compared against, whether internal
//! nodes keep statistics for re-evaluation, and whether leaves can be
//! deactivated:
//!
//! * [`SplitPolicy::Hoeffding`]: best vs second-best suggestion.
//! * [`SplitPolicy::Efdt`]: best vs the null split, internal nodes revised.
//! * [`SplitPolicy::Green`]: per-leaf choice driven by the arrival fraction.

use serde::{Deserialize, Serialize};

use crate::counters::{Counters, ResourceCounters};
use crate::efdt;
use crate::error::{Error, Result};
use crate::eval::ByteModel;
use crate::gaht::{self, GahtConfig, LeafMode};
use crate::observer::{best_splits, gain_range, hoeffding_bound, AttributeObserver, SplitKind};
use crate::stream::{validate_example, validate_instance, Instance, LabeledExample, Schema, Value};

/// Grace period, confidence and tie threshold shared by every tree learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// Weight a leaf accumulates between split attempts.
    pub nmin: u64,
    /// One minus the confidence of each split decision.
    pub delta: f64,
    /// Tie threshold on the Hoeffding bound.
    pub tau: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            nmin: 200,
            delta: 1e-7,
            tau: 0.05,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nmin == 0 {
            return Err(Error::InvalidConfig("nmin must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "delta must be in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tau must be >= 0, got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplitPolicy {
    Hoeffding,
    Efdt,
    Green {
        deactivate_threshold: f64,
        grow_fast_threshold: f64,
    },
}

impl SplitPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            SplitPolicy::Hoeffding => "ht",
            SplitPolicy::Efdt => "efdt",
            SplitPolicy::Green { .. } => "gaht",
        }
    }
}

/// What a leaf's best split is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Best vs second-best suggestion.
    SecondBest,
    /// Best vs the null split.
    NullSplit,
}

/// The split rule shared by every policy: split when the advantage beats
/// the bound, or when the bound itself has shrunk below the tie threshold.
pub fn should_split(best: f64, runner_up: f64, epsilon: f64, tau: f64) -> bool {
    let delta_g = best - runner_up;
    delta_g > epsilon || (delta_g < epsilon && epsilon < tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplitTest {
    /// Child index is the nominal value.
    Nominal { attribute: usize },
    /// `value <= threshold` goes to child 0.
    Numeric { attribute: usize, threshold: f64 },
}

impl SplitTest {
    pub fn attribute(&self) -> usize {
        match *self {
            SplitTest::Nominal { attribute } | SplitTest::Numeric { attribute, .. } => attribute,
        }
    }

    pub fn branch(&self, instance: &Instance) -> usize {
        match (*self, instance.values[self.attribute()]) {
            (SplitTest::Nominal { .. }, Value::Nominal(v)) => v as usize,
            (SplitTest::Numeric { threshold, .. }, Value::Numeric(x)) => usize::from(x > threshold),
            // Unreachable for validated instances.
            _ => 0,
        }
    }
}

/// Statistics an EFDT split node keeps to revise its own decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionStats {
    pub observers: Vec<AttributeObserver>,
    pub weight_seen: f64,
    pub weight_at_last_eval: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitNode {
    pub test: SplitTest,
    pub children: Vec<Node>,
    pub class_distribution: Vec<f64>,
    /// The leaf was in grow-fast mode when it split.
    pub grown_fast: bool,
    pub revision: Option<Box<RevisionStats>>,
}

/// Per-leaf bookkeeping for the arrival-fraction policy.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GreenLeafState {
    /// Weight that reached this leaf since it was created.
    pub n_l: f64,
    /// Total tree weight when the leaf was created.
    pub tree_weight_at_creation: f64,
    pub grow_fast: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveLeaf {
    pub class_distribution: Vec<f64>,
    pub weight_seen: f64,
    pub weight_at_last_eval: f64,
    pub observers: Vec<AttributeObserver>,
    pub disabled: Vec<bool>,
    pub green: GreenLeafState,
}

impl ActiveLeaf {
    fn new(schema: &Schema, class_distribution: Vec<f64>, tree_weight: f64) -> Self {
        let weight_seen = class_distribution.iter().sum();
        Self {
            class_distribution,
            weight_seen,
            weight_at_last_eval: weight_seen,
            observers: fresh_observers(schema),
            disabled: vec![false; schema.attribute_count()],
            green: GreenLeafState {
                n_l: 0.0,
                tree_weight_at_creation: tree_weight,
                grow_fast: false,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeactivatedLeaf {
    pub class_distribution: Vec<f64>,
    pub grow_fast: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split(SplitNode),
    Leaf(ActiveLeaf),
    Deactivated(DeactivatedLeaf),
}

impl Node {
    pub fn class_distribution(&self) -> &[f64] {
        match self {
            Node::Split(s) => &s.class_distribution,
            Node::Leaf(l) => &l.class_distribution,
            Node::Deactivated(l) => &l.class_distribution,
        }
    }

    fn census(&self, census: &mut NodeCensus) {
        match self {
            Node::Split(s) => {
                census.split_nodes += 1;
                census.fast_nodes += usize::from(s.grown_fast);
                for child in &s.children {
                    child.census(census);
                }
            }
            Node::Leaf(l) => {
                census.active_leaves += 1;
                census.fast_nodes += usize::from(l.green.grow_fast);
            }
            Node::Deactivated(l) => {
                census.deactivated_leaves += 1;
                census.fast_nodes += usize::from(l.grow_fast);
            }
        }
    }

    fn estimated_bytes(&self, bytes: &ByteModel) -> u64 {
        let dist = self.class_distribution().len() as u64 * bytes.distribution_entry;
        match self {
            Node::Split(s) => {
                let own = bytes.node_overhead
                    + dist
                    + s.revision
                        .as_ref()
                        .map_or(0, |r| observers_bytes(&r.observers, bytes));
                own + s
                    .children
                    .iter()
                    .map(|c| c.estimated_bytes(bytes))
                    .sum::<u64>()
            }
            Node::Leaf(l) => bytes.node_overhead + dist + observers_bytes(&l.observers, bytes),
            Node::Deactivated(_) => bytes.node_overhead + dist,
        }
    }
}

fn observers_bytes(observers: &[AttributeObserver], bytes: &ByteModel) -> u64 {
    observers
        .iter()
        .map(|o| match o {
            AttributeObserver::Nominal(n) => {
                (n.value_count() as u64) * bytes.class_count * bytes.count_entry
            }
            AttributeObserver::Gaussian(_) => bytes.class_count * bytes.gaussian_tuple,
        })
        .sum()
}

fn fresh_observers(schema: &Schema) -> Vec<AttributeObserver> {
    schema
        .attributes()
        .iter()
        .map(|a| AttributeObserver::for_kind(a.kind, schema.class_count()))
        .collect()
}

/// Exact node counts from a full walk of the tree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCensus {
    pub total: usize,
    pub split_nodes: usize,
    pub active_leaves: usize,
    pub deactivated_leaves: usize,
    /// Leaves in grow-fast mode plus split nodes that split while in it.
    pub fast_nodes: usize,
}

impl NodeCensus {
    pub fn leaves(&self) -> usize {
        self.active_leaves + self.deactivated_leaves
    }
}

impl std::ops::Add for NodeCensus {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            total: self.total + o.total,
            split_nodes: self.split_nodes + o.split_nodes,
            active_leaves: self.active_leaves + o.active_leaves,
            deactivated_leaves: self.deactivated_leaves + o.deactivated_leaves,
            fast_nodes: self.fast_nodes + o.fast_nodes,
        }
    }
}

/// Where a split decision was taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DecisionSite {
    Leaf { mode: LeafMode, criterion: Criterion },
    /// Re-evaluation of an existing split node.
    Internal,
}

/// One traced split decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitDecision {
    /// Training calls processed before this decision, including the current one.
    pub instance: u64,
    pub site: DecisionSite,
    pub epsilon: f64,
    pub best_merit: f64,
    pub runner_up_merit: f64,
    pub split: bool,
}

/// Structural events that the node census cannot show.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeEvents {
    pub leaf_splits: u64,
    pub reevaluations: u64,
    pub subtree_replacements: u64,
    pub deactivations: u64,
    pub disabled_attributes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoeffdingTree {
    schema: Schema,
    config: TreeConfig,
    policy: SplitPolicy,
    root: Node,
    total_weight: f64,
    /// Active plus deactivated leaves, kept in step with the tree.
    leaf_count: usize,
    counters: Counters,
    events: TreeEvents,
    #[serde(skip)]
    trace: Option<Vec<SplitDecision>>,
}

enum LeafOutcome {
    Done,
    Deactivate,
    Split(crate::observer::SplitSuggestion),
}

impl HoeffdingTree {
    pub fn new(schema: Schema, config: TreeConfig, policy: SplitPolicy) -> Result<Self> {
        config.validate()?;
        if let SplitPolicy::Green {
            deactivate_threshold,
            grow_fast_threshold,
        } = policy
        {
            GahtConfig {
                base: config,
                deactivate_threshold,
                grow_fast_threshold,
            }
            .validate()?;
        }
        let root = Node::Leaf(ActiveLeaf::new(
            &schema,
            vec![0.0; schema.class_count()],
            0.0,
        ));
        Ok(Self {
            schema,
            config,
            policy,
            root,
            total_weight: 0.0,
            leaf_count: 1,
            counters: Counters::new(),
            events: TreeEvents::default(),
            trace: None,
        })
    }

    pub fn hoeffding(schema: Schema, config: TreeConfig) -> Result<Self> {
        Self::new(schema, config, SplitPolicy::Hoeffding)
    }

    pub fn efdt(schema: Schema, config: TreeConfig) -> Result<Self> {
        Self::new(schema, config, SplitPolicy::Efdt)
    }

    pub fn gaht(schema: Schema, config: GahtConfig) -> Result<Self> {
        Self::new(schema, config.base, config.policy())
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn config(&self) -> &TreeConfig {
        &self.config
    }

    pub fn policy(&self) -> SplitPolicy {
        self.policy
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn counters(&self) -> ResourceCounters {
        self.counters.snapshot()
    }

    pub fn events(&self) -> TreeEvents {
        self.events
    }

    /// Starts recording every split decision; see [`Self::take_trace`].
    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn take_trace(&mut self) -> Vec<SplitDecision> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn node_count(&self) -> NodeCensus {
        let mut census = NodeCensus::default();
        self.root.census(&mut census);
        census.total = census.split_nodes + census.leaves();
        census
    }

    pub fn estimated_bytes(&self) -> u64 {
        self.root
            .estimated_bytes(&ByteModel::for_classes(self.schema.class_count()))
    }

    /// Leaf reached by `instance` and the number of edges followed.
    pub fn route(&self, instance: &Instance) -> (&Node, u64) {
        let mut node = &self.root;
        let mut depth = 0;
        while let Node::Split(s) = node {
            node = &s.children[s.test.branch(instance)];
            depth += 1;
        }
        (node, depth)
    }

    /// Class votes of the leaf reached by `instance`.
    pub fn predict(&self, instance: &Instance) -> Result<Vec<f64>> {
        validate_instance(&self.schema, instance)?;
        let (leaf, depth) = self.route(instance);
        self.counters.add_traversal_steps_shared(depth);
        Ok(leaf.class_distribution().to_vec())
    }

    pub fn train(&mut self, example: &LabeledExample, weight: f64) -> Result<()> {
        validate_example(&self.schema, example)?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "training weight must be finite and >= 0, got {weight}"
            )));
        }
        if weight == 0.0 {
            return Ok(());
        }
        self.counters.add_instance();
        self.total_weight += weight;
        match self.policy {
            SplitPolicy::Efdt => self.train_revising(example, weight),
            _ => self.train_leaf_only(example, weight),
        }
    }

    fn train_leaf_only(&mut self, example: &LabeledExample, weight: f64) -> Result<()> {
        let Self {
            schema,
            config,
            policy,
            root,
            total_weight,
            leaf_count,
            counters,
            events,
            trace,
        } = self;
        let mut node = root;
        let mut depth = 0;
        while let Node::Split(s) = node {
            let branch = s.test.branch(&example.instance);
            node = &mut s.children[branch];
            depth += 1;
        }
        counters.add_traversal_steps(depth);
        let mut ctx = LeafContext {
            schema,
            config,
            policy: *policy,
            total_weight: *total_weight,
            leaf_count: *leaf_count,
            counters,
            events,
            trace,
        };
        let outcome = ctx.learn_at_leaf(node, example, weight)?;
        *leaf_count = apply_outcome(node, outcome, &mut ctx);
        Ok(())
    }

    fn train_revising(&mut self, example: &LabeledExample, weight: f64) -> Result<()> {
        let Self {
            schema,
            config,
            policy,
            root,
            total_weight,
            leaf_count,
            counters,
            events,
            trace,
        } = self;
        let mut ctx = LeafContext {
            schema,
            config,
            policy: *policy,
            total_weight: *total_weight,
            leaf_count: *leaf_count,
            counters,
            events,
            trace,
        };
        let mut node = root;
        let mut depth = 0;
        loop {
            let replace = match node {
                Node::Split(s) => efdt::update_split_node(s, example, weight, &mut ctx)?,
                _ => break,
            };
            if replace {
                let Node::Split(s) = node else { unreachable!() };
                let mut removed = NodeCensus::default();
                s.children.iter().for_each(|c| c.census(&mut removed));
                let fresh = ActiveLeaf::new(
                    ctx.schema,
                    s.class_distribution.clone(),
                    ctx.total_weight,
                );
                *node = Node::Leaf(fresh);
                ctx.leaf_count = ctx.leaf_count + 1 - removed.leaves();
                ctx.events.subtree_replacements += 1;
                ctx.counters.add_traversal_steps(depth);
                *leaf_count = ctx.leaf_count;
                return Ok(());
            }
            let Node::Split(s) = node else { unreachable!() };
            let branch = s.test.branch(&example.instance);
            node = &mut s.children[branch];
            depth += 1;
        }
        ctx.counters.add_traversal_steps(depth);
        let outcome = ctx.learn_at_leaf(node, example, weight)?;
        *leaf_count = apply_outcome(node, outcome, &mut ctx);
        Ok(())
    }
}

/// Replaces `node` according to `outcome`; returns the new leaf count.
fn apply_outcome(node: &mut Node, outcome: LeafOutcome, ctx: &mut LeafContext<'_>) -> usize {
    match outcome {
        LeafOutcome::Done => {}
        LeafOutcome::Deactivate => {
            let Node::Leaf(leaf) = node else { unreachable!() };
            let class_distribution = std::mem::take(&mut leaf.class_distribution);
            *node = Node::Deactivated(DeactivatedLeaf {
                class_distribution,
                grow_fast: leaf.green.grow_fast,
            });
            ctx.events.deactivations += 1;
        }
        LeafOutcome::Split(suggestion) => {
            let Node::Leaf(leaf) = node else { unreachable!() };
            let attribute = suggestion.attribute.expect("null split never applied");
            let test = match suggestion.kind {
                Some(SplitKind::Threshold(threshold)) => SplitTest::Numeric {
                    attribute,
                    threshold,
                },
                _ => SplitTest::Nominal { attribute },
            };
            let children: Vec<Node> = suggestion
                .child_distributions
                .into_iter()
                .map(|d| Node::Leaf(ActiveLeaf::new(ctx.schema, d, ctx.total_weight)))
                .collect();
            ctx.leaf_count += children.len() - 1;
            let revision = (ctx.policy == SplitPolicy::Efdt).then(|| {
                Box::new(RevisionStats {
                    observers: std::mem::take(&mut leaf.observers),
                    weight_seen: leaf.weight_seen,
                    weight_at_last_eval: leaf.weight_seen,
                })
            });
            *node = Node::Split(SplitNode {
                test,
                children,
                class_distribution: std::mem::take(&mut leaf.class_distribution),
                grown_fast: leaf.green.grow_fast,
                revision,
            });
            ctx.events.leaf_splits += 1;
        }
    }
    ctx.leaf_count
}

/// Borrowed tree state needed while a single instance is being learned.
pub(crate) struct LeafContext<'a> {
    pub(crate) schema: &'a Schema,
    pub(crate) config: &'a TreeConfig,
    pub(crate) policy: SplitPolicy,
    pub(crate) total_weight: f64,
    pub(crate) leaf_count: usize,
    pub(crate) counters: &'a mut Counters,
    pub(crate) events: &'a mut TreeEvents,
    pub(crate) trace: &'a mut Option<Vec<SplitDecision>>,
}

impl LeafContext<'_> {
    pub(crate) fn epsilon(&self, n: f64) -> f64 {
        hoeffding_bound(
            gain_range(self.schema.class_count()),
            self.config.delta,
            n,
        )
    }

    pub(crate) fn record(&mut self, decision: impl FnOnce(u64) -> SplitDecision) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(decision(self.counters.snapshot().instances_processed));
        }
    }

    pub(crate) fn observe_all(
        &mut self,
        observers: &mut [AttributeObserver],
        example: &LabeledExample,
        weight: f64,
    ) -> Result<()> {
        for (observer, value) in observers.iter_mut().zip(&example.instance.values) {
            observer.observe(*value, example.label, weight, self.counters)?;
        }
        Ok(())
    }

    fn learn_at_leaf(
        &mut self,
        node: &mut Node,
        example: &LabeledExample,
        weight: f64,
    ) -> Result<LeafOutcome> {
        let label = example.label as usize;
        let leaf = match node {
            Node::Leaf(leaf) => leaf,
            Node::Deactivated(leaf) => {
                leaf.class_distribution[label] += weight;
                return Ok(LeafOutcome::Done);
            }
            Node::Split(_) => unreachable!("routing always ends at a leaf"),
        };
        leaf.class_distribution[label] += weight;
        leaf.weight_seen += weight;
        self.observe_all(&mut leaf.observers, example, weight)?;

        if let SplitPolicy::Green {
            deactivate_threshold,
            grow_fast_threshold,
        } = self.policy
        {
            leaf.green.n_l += weight;
            if let Some(fraction) = gaht::fraction(&leaf.green, self.total_weight, self.leaf_count)
            {
                if fraction < deactivate_threshold {
                    return Ok(LeafOutcome::Deactivate);
                } else if fraction > grow_fast_threshold {
                    leaf.green.grow_fast = true;
                }
            }
        }

        if leaf.weight_seen - leaf.weight_at_last_eval < self.config.nmin as f64 {
            return Ok(LeafOutcome::Done);
        }
        let (mode, criterion) = match self.policy {
            SplitPolicy::Hoeffding => (LeafMode::Hoeffding, Criterion::SecondBest),
            SplitPolicy::Efdt => (LeafMode::Fast, Criterion::NullSplit),
            SplitPolicy::Green { .. } if leaf.green.grow_fast => (LeafMode::Fast, Criterion::NullSplit),
            SplitPolicy::Green { .. } => (LeafMode::Hoeffding, Criterion::SecondBest),
        };
        self.attempt_split(leaf, mode, criterion)
    }

    /// Scores the leaf and either returns the winning suggestion or
    /// disables attributes that trail the best by more than the bound.
    fn attempt_split(
        &mut self,
        leaf: &mut ActiveLeaf,
        mode: LeafMode,
        criterion: Criterion,
    ) -> Result<LeafOutcome> {
        let mut ranked = best_splits(
            &leaf.observers,
            &leaf.disabled,
            &leaf.class_distribution,
            self.counters,
        )?;
        leaf.weight_at_last_eval = leaf.weight_seen;
        let epsilon = self.epsilon(leaf.weight_seen);
        let best_merit = ranked[0].merit;
        let runner_up_merit = match criterion {
            Criterion::SecondBest => ranked.get(1).map_or(0.0, |s| s.merit),
            Criterion::NullSplit => 0.0,
        };
        let split =
            !ranked[0].is_null() && should_split(best_merit, runner_up_merit, epsilon, self.config.tau);
        self.record(|instance| SplitDecision {
            instance,
            site: DecisionSite::Leaf { mode, criterion },
            epsilon,
            best_merit,
            runner_up_merit,
            split,
        });
        if split {
            return Ok(LeafOutcome::Split(ranked.swap_remove(0)));
        }
        for s in &ranked {
            if let Some(p) = s.attribute {
                if best_merit - s.merit > epsilon && !leaf.disabled[p] {
                    leaf.disabled[p] = true;
                    self.events.disabled_attributes += 1;
                }
            }
        }
        Ok(LeafOutcome::Done)
    }
}

/// Index of the largest vote; ties and empty votes resolve to the lowest class.
pub fn argmax(votes: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in votes.iter().enumerate() {
        if *v > votes[best] {
            best = i;
        }
    }
    best
}
