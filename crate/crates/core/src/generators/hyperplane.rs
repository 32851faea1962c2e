use serde::{Deserialize, Serialize};

use super::{check_probability, instance_rng, model_rng, Synthetic};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::stream::{AttributeSpec, Instance, LabeledExample, Schema, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneParams {
    pub attributes: u32,
    /// Probability of flipping the label.
    pub noise: f64,
}

impl Default for HyperplaneParams {
    fn default() -> Self {
        Self {
            attributes: 10,
            noise: 0.05,
        }
    }
}

/// Points uniform on the unit cube labeled by a static random hyperplane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneGenerator {
    params: HyperplaneParams,
    schema: Schema,
    weights: Vec<f64>,
    threshold: f64,
    rng: SplitMix64,
}

impl HyperplaneGenerator {
    pub fn new(params: HyperplaneParams, seed: u64) -> Result<Self> {
        check_probability("hyperplane noise", params.noise)?;
        let attributes = (0..params.attributes)
            .map(|i| AttributeSpec::numeric(format!("att{}", i + 1)))
            .collect();
        let schema = Schema::new(attributes, 2).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut model = model_rng(seed);
        let weights: Vec<f64> = (0..params.attributes).map(|_| model.next_f64()).collect();
        let threshold = 0.5 * weights.iter().sum::<f64>();
        Ok(Self {
            params,
            schema,
            weights,
            threshold,
            rng: instance_rng(seed),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Noise-free label: which side of the hyperplane the point lies on.
    pub fn true_label(&self, instance: &Instance) -> u32 {
        let dot: f64 = self
            .weights
            .iter()
            .zip(&instance.values)
            .map(|(w, v)| w * v.as_f64())
            .sum();
        u32::from(dot >= self.threshold)
    }
}

impl Synthetic for HyperplaneGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn generate(&mut self) -> LabeledExample {
        let values: Vec<Value> = self.weights.iter().map(|_| Value::Numeric(self.rng.next_f64())).collect();
        let instance = Instance::new(values);
        let mut label = self.true_label(&instance);
        if self.rng.chance(self.params.noise) {
            label ^= 1;
        }
        LabeledExample { instance, label }
    }

    /// The threshold halves the weighted sum, which is symmetric about it.
    fn class_priors(&self) -> Vec<f64> {
        vec![0.5, 0.5]
    }
}
