use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::counters::ResourceCounters;
use crate::ensemble::{BaseLearner, EnsembleConfig, OzaBag, OzaBoost};
use crate::error::{Error, Result};
use crate::gaht::GahtConfig;
use crate::stream::{Instance, LabeledExample, Schema};
use crate::tree::{argmax, HoeffdingTree, NodeCensus, SplitPolicy, TreeConfig};

/// Common surface of every online classifier in the crate.
pub trait Learner {
    fn schema(&self) -> &Schema;

    /// Per-class votes; all zeros for a model that has seen nothing.
    fn predict(&self, instance: &Instance) -> Result<Vec<f64>>;

    fn train(&mut self, example: &LabeledExample, weight: f64) -> Result<()>;

    fn counters(&self) -> ResourceCounters;

    fn census(&self) -> NodeCensus;

    fn estimated_bytes(&self) -> u64;

    fn predict_class(&self, instance: &Instance) -> Result<usize> {
        Ok(argmax(&self.predict(instance)?))
    }
}

impl Learner for HoeffdingTree {
    fn schema(&self) -> &Schema {
        HoeffdingTree::schema(self)
    }

    fn predict(&self, instance: &Instance) -> Result<Vec<f64>> {
        HoeffdingTree::predict(self, instance)
    }

    fn train(&mut self, example: &LabeledExample, weight: f64) -> Result<()> {
        HoeffdingTree::train(self, example, weight)
    }

    fn counters(&self) -> ResourceCounters {
        HoeffdingTree::counters(self)
    }

    fn census(&self) -> NodeCensus {
        self.node_count()
    }

    fn estimated_bytes(&self) -> u64 {
        HoeffdingTree::estimated_bytes(self)
    }
}

/// Any learner the CLI can build, save and load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Model {
    Tree(HoeffdingTree),
    Bagging(OzaBag),
    Boosting(OzaBoost),
}

impl Model {
    fn inner(&self) -> &dyn Learner {
        match self {
            Model::Tree(m) => m,
            Model::Bagging(m) => m,
            Model::Boosting(m) => m,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Learner {
        match self {
            Model::Tree(m) => m,
            Model::Bagging(m) => m,
            Model::Boosting(m) => m,
        }
    }

    /// Short algorithm name as used on the command line.
    pub fn algorithm(&self) -> &'static str {
        match self {
            Model::Tree(t) => t.policy().name(),
            Model::Bagging(_) => "ozabag",
            Model::Boosting(_) => "ozaboost",
        }
    }
}

impl Learner for Model {
    fn schema(&self) -> &Schema {
        self.inner().schema()
    }

    fn predict(&self, instance: &Instance) -> Result<Vec<f64>> {
        self.inner().predict(instance)
    }

    fn train(&mut self, example: &LabeledExample, weight: f64) -> Result<()> {
        self.inner_mut().train(example, weight)
    }

    fn counters(&self) -> ResourceCounters {
        self.inner().counters()
    }

    fn census(&self) -> NodeCensus {
        self.inner().census()
    }

    fn estimated_bytes(&self) -> u64 {
        self.inner().estimated_bytes()
    }
}

impl From<HoeffdingTree> for Model {
    fn from(t: HoeffdingTree) -> Self {
        Model::Tree(t)
    }
}

impl From<OzaBag> for Model {
    fn from(m: OzaBag) -> Self {
        Model::Bagging(m)
    }
}

impl From<OzaBoost> for Model {
    fn from(m: OzaBoost) -> Self {
        Model::Boosting(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ht,
    Efdt,
    Gaht,
    OzaBag,
    OzaBoost,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Ht,
        Algorithm::Efdt,
        Algorithm::Gaht,
        Algorithm::OzaBag,
        Algorithm::OzaBoost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ht => "ht",
            Algorithm::Efdt => "efdt",
            Algorithm::Gaht => "gaht",
            Algorithm::OzaBag => "ozabag",
            Algorithm::OzaBoost => "ozaboost",
        }
    }

    pub fn is_ensemble(self) -> bool {
        matches!(self, Algorithm::OzaBag | Algorithm::OzaBoost)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                what: "algorithm",
                name: s.to_string(),
            })
    }
}

/// Everything needed to build a fresh learner for a schema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub algorithm: Algorithm,
    /// Member learner of an ensemble: `Ht` or `Gaht`.
    pub base: Algorithm,
    pub members: usize,
    pub tree: TreeConfig,
    pub deactivate_threshold: f64,
    pub grow_fast_threshold: f64,
    pub seed: u64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        let gaht = GahtConfig::default();
        Self {
            algorithm: Algorithm::Ht,
            base: Algorithm::Ht,
            members: EnsembleConfig::default().members,
            tree: gaht.base,
            deactivate_threshold: gaht.deactivate_threshold,
            grow_fast_threshold: gaht.grow_fast_threshold,
            seed: 1,
        }
    }
}

impl ModelSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            ..Self::default()
        }
    }

    fn gaht(&self) -> GahtConfig {
        GahtConfig {
            base: self.tree,
            deactivate_threshold: self.deactivate_threshold,
            grow_fast_threshold: self.grow_fast_threshold,
        }
    }

    fn policy(&self, algorithm: Algorithm) -> Result<SplitPolicy> {
        match algorithm {
            Algorithm::Ht => Ok(SplitPolicy::Hoeffding),
            Algorithm::Efdt => Ok(SplitPolicy::Efdt),
            Algorithm::Gaht => {
                let gaht = self.gaht();
                gaht.validate()?;
                Ok(gaht.policy())
            }
            other => Err(Error::InvalidConfig(format!("{other} is not a tree learner"))),
        }
    }

    pub fn build(&self, schema: Schema) -> Result<Model> {
        if !self.algorithm.is_ensemble() {
            return Ok(HoeffdingTree::new(schema, self.tree, self.policy(self.algorithm)?)?.into());
        }
        if !matches!(self.base, Algorithm::Ht | Algorithm::Gaht) {
            return Err(Error::InvalidConfig(format!(
                "ensemble base learner must be ht or gaht, got {}",
                self.base
            )));
        }
        let config = EnsembleConfig {
            members: self.members,
            base: BaseLearner {
                config: self.tree,
                policy: self.policy(self.base)?,
            },
            seed: self.seed,
        };
        Ok(match self.algorithm {
            Algorithm::OzaBag => OzaBag::new(schema, config)?.into(),
            _ => OzaBoost::new(schema, config)?.into(),
        })
    }
}
