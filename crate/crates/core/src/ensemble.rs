//! Online bagging and online boosting over Hoeffding-tree members.
//!
//! Both schemes replace resampling with Poisson-distributed training weights.
//! "Train k times" is realized as one update of weight k.

use serde::{Deserialize, Serialize};

use crate::counters::ResourceCounters;
use crate::error::{Error, Result};
use crate::learner::Learner;
use crate::rng::SplitMix64;
use crate::stream::{Instance, LabeledExample, Schema};
use crate::tree::{argmax, HoeffdingTree, NodeCensus, SplitPolicy, TreeConfig};

/// Largest rate drawn in a single product-method pass; larger rates are
/// split into chunks and the draws summed.
const POISSON_CHUNK: f64 = 30.0;

/// Exact Poisson(`lambda`) draw by Knuth's product method.
pub fn poisson_sample(rng: &mut SplitMix64, lambda: f64) -> u64 {
    assert!(lambda > 0.0 && lambda.is_finite(), "poisson rate must be positive");
    let mut remaining = lambda;
    let mut total = 0;
    while remaining > 0.0 {
        let rate = remaining.min(POISSON_CHUNK);
        remaining -= rate;
        let limit = (-rate).exp();
        let mut product = rng.next_f64();
        while product > limit {
            total += 1;
            product *= rng.next_f64();
        }
    }
    total
}

/// Tree learner each ensemble member is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseLearner {
    pub config: TreeConfig,
    pub policy: SplitPolicy,
}

impl Default for BaseLearner {
    fn default() -> Self {
        Self {
            config: TreeConfig::default(),
            policy: SplitPolicy::Hoeffding,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub members: usize,
    pub base: BaseLearner,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            members: 10,
            base: BaseLearner::default(),
            seed: 1,
        }
    }
}

impl EnsembleConfig {
    fn build_members(&self, schema: &Schema) -> Result<Vec<HoeffdingTree>> {
        if self.members == 0 {
            return Err(Error::InvalidConfig("ensemble needs at least one member".into()));
        }
        (0..self.members)
            .map(|_| HoeffdingTree::new(schema.clone(), self.base.config, self.base.policy))
            .collect()
    }
}

fn sum_counters(members: &[HoeffdingTree]) -> ResourceCounters {
    members.iter().map(HoeffdingTree::counters).sum()
}

fn sum_census(members: &[HoeffdingTree]) -> NodeCensus {
    members
        .iter()
        .map(HoeffdingTree::node_count)
        .fold(NodeCensus::default(), |a, b| a + b)
}

/// Online bagging: each member trains on each example with weight k ~ Poisson(1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OzaBag {
    config: EnsembleConfig,
    members: Vec<HoeffdingTree>,
    rng: SplitMix64,
}

impl OzaBag {
    pub fn new(schema: Schema, config: EnsembleConfig) -> Result<Self> {
        Ok(Self {
            members: config.build_members(&schema)?,
            rng: SplitMix64::new(config.seed),
            config,
        })
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn members(&self) -> &[HoeffdingTree] {
        &self.members
    }

    /// Trains member `m` with weight `draw(m) * weight`, skipping zero draws.
    pub fn train_with(
        &mut self,
        example: &LabeledExample,
        weight: f64,
        mut draw: impl FnMut(&mut SplitMix64) -> u64,
    ) -> Result<()> {
        for member in &mut self.members {
            let k = draw(&mut self.rng);
            if k > 0 {
                member.train(example, k as f64 * weight)?;
            }
        }
        Ok(())
    }
}

impl Learner for OzaBag {
    fn schema(&self) -> &Schema {
        self.members[0].schema()
    }

    /// Unweighted majority over the members' predicted classes.
    fn predict(&self, instance: &Instance) -> Result<Vec<f64>> {
        let mut votes = vec![0.0; self.schema().class_count()];
        for member in &self.members {
            votes[argmax(&member.predict(instance)?)] += 1.0;
        }
        Ok(votes)
    }

    fn train(&mut self, example: &LabeledExample, weight: f64) -> Result<()> {
        self.train_with(example, weight, |rng| poisson_sample(rng, 1.0))
    }

    fn counters(&self) -> ResourceCounters {
        sum_counters(&self.members)
    }

    fn census(&self) -> NodeCensus {
        sum_census(&self.members)
    }

    fn estimated_bytes(&self) -> u64 {
        self.members.iter().map(HoeffdingTree::estimated_bytes).sum()
    }
}

/// Weight mass a boosting member classified correctly (`lambda_sc`) and
/// incorrectly (`lambda_sw`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoostMemberState {
    pub lambda_sc: f64,
    pub lambda_sw: f64,
}

/// Members with an error estimate of at least this much get no vote.
const MAX_MEMBER_ERROR: f64 = 0.5;
/// Upper clamp on a member's vote weight.
const MAX_VOTE_WEIGHT: f64 = 10.0;

impl BoostMemberState {
    /// Records the outcome for an example presented with rate `lambda` and
    /// returns the rate for the next member.
    pub fn update(&mut self, lambda: f64, correct: bool) -> f64 {
        if correct {
            self.lambda_sc += lambda;
            lambda * (self.lambda_sc + self.lambda_sw) / (2.0 * self.lambda_sc)
        } else {
            self.lambda_sw += lambda;
            lambda * (self.lambda_sc + self.lambda_sw) / (2.0 * self.lambda_sw)
        }
    }

    /// Weighted error estimate, `None` before any mass was seen.
    pub fn error(&self) -> Option<f64> {
        let mass = self.lambda_sc + self.lambda_sw;
        (mass > 0.0).then(|| self.lambda_sw / mass)
    }

    pub fn vote_weight(&self) -> f64 {
        match self.error() {
            Some(e) if e < MAX_MEMBER_ERROR => {
                if e <= 0.0 {
                    MAX_VOTE_WEIGHT
                } else {
                    ((1.0 - e) / e).ln().clamp(0.0, MAX_VOTE_WEIGHT)
                }
            }
            _ => 0.0,
        }
    }
}

/// Online boosting: the Poisson rate for each member depends on how the
/// previous members handled the example.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OzaBoost {
    config: EnsembleConfig,
    members: Vec<HoeffdingTree>,
    states: Vec<BoostMemberState>,
    rng: SplitMix64,
}

impl OzaBoost {
    pub fn new(schema: Schema, config: EnsembleConfig) -> Result<Self> {
        let members = config.build_members(&schema)?;
        Ok(Self {
            states: vec![BoostMemberState::default(); members.len()],
            members,
            rng: SplitMix64::new(config.seed),
            config,
        })
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn members(&self) -> &[HoeffdingTree] {
        &self.members
    }

    pub fn states(&self) -> &[BoostMemberState] {
        &self.states
    }

    /// Boosting pass with a caller-supplied draw; returns the rate sequence
    /// presented to each member.
    pub fn train_with(
        &mut self,
        example: &LabeledExample,
        weight: f64,
        mut draw: impl FnMut(&mut SplitMix64, f64) -> u64,
    ) -> Result<Vec<f64>> {
        let mut lambda = 1.0;
        let mut rates = Vec::with_capacity(self.members.len());
        for (member, state) in self.members.iter_mut().zip(&mut self.states) {
            rates.push(lambda);
            let k = draw(&mut self.rng, lambda);
            if k > 0 {
                member.train(example, k as f64 * weight)?;
            }
            let correct = member.predict_class(&example.instance)? == example.label as usize;
            lambda = state.update(lambda, correct);
        }
        Ok(rates)
    }
}

impl Learner for OzaBoost {
    fn schema(&self) -> &Schema {
        self.members[0].schema()
    }

    /// Members vote for their predicted class with weight log((1-e)/e).
    fn predict(&self, instance: &Instance) -> Result<Vec<f64>> {
        let mut votes = vec![0.0; self.schema().class_count()];
        for (member, state) in self.members.iter().zip(&self.states) {
            let class = member.predict_class(instance)?;
            votes[class] += state.vote_weight();
        }
        Ok(votes)
    }

    fn train(&mut self, example: &LabeledExample, weight: f64) -> Result<()> {
        self.train_with(example, weight, poisson_sample).map(|_| ())
    }

    fn counters(&self) -> ResourceCounters {
        sum_counters(&self.members)
    }

    fn census(&self) -> NodeCensus {
        sum_census(&self.members)
    }

    fn estimated_bytes(&self) -> u64 {
        self.members.iter().map(HoeffdingTree::estimated_bytes).sum()
    }
}
