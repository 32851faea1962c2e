use serde::{Deserialize, Serialize};

use super::{instance_rng, model_rng, Synthetic};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::stream::{AttributeSpec, LabeledExample, Schema, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomRbfParams {
    pub centroids: u32,
    pub attributes: u32,
    pub classes: u32,
}

impl Default for RandomRbfParams {
    fn default() -> Self {
        Self {
            centroids: 50,
            attributes: 10,
            classes: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Centroid {
    center: Vec<f64>,
    class: u32,
    std_dev: f64,
    weight: f64,
}

/// Gaussian clouds around weighted random centroids, each owning a class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomRbfGenerator {
    schema: Schema,
    centroids: Vec<Centroid>,
    /// Running sums of centroid weights for weighted selection.
    cumulative: Vec<f64>,
    rng: SplitMix64,
}

impl RandomRbfGenerator {
    pub fn new(params: RandomRbfParams, seed: u64) -> Result<Self> {
        if params.centroids == 0 {
            return Err(Error::InvalidConfig("RBF generator needs at least one centroid".into()));
        }
        let attributes = (0..params.attributes)
            .map(|i| AttributeSpec::numeric(format!("att{}", i + 1)))
            .collect();
        let schema = Schema::new(attributes, params.classes).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut model = model_rng(seed);
        let centroids: Vec<Centroid> = (0..params.centroids)
            .map(|_| Centroid {
                center: (0..params.attributes).map(|_| model.next_f64()).collect(),
                class: model.below(u64::from(params.classes)) as u32,
                std_dev: model.next_f64(),
                weight: model.next_f64(),
            })
            .collect();
        let cumulative = centroids
            .iter()
            .scan(0.0, |acc, c| {
                *acc += c.weight;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            schema,
            centroids,
            cumulative,
            rng: instance_rng(seed),
        })
    }

    fn pick_centroid(&mut self) -> usize {
        let total = *self.cumulative.last().expect("at least one centroid");
        let target = self.rng.next_f64() * total;
        self.cumulative
            .partition_point(|&c| c <= target)
            .min(self.centroids.len() - 1)
    }
}

impl Synthetic for RandomRbfGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn generate(&mut self) -> LabeledExample {
        let index = self.pick_centroid();
        let d = self.schema.attribute_count();
        let mut direction: Vec<f64> = (0..d).map(|_| self.rng.next_f64() * 2.0 - 1.0).collect();
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        let centroid = &self.centroids[index];
        let magnitude = self.rng.gaussian() * centroid.std_dev;
        let scale = if norm > 0.0 { magnitude / norm } else { 0.0 };
        for (x, c) in direction.iter_mut().zip(&centroid.center) {
            *x = c + *x * scale;
        }
        let values = direction.into_iter().map(Value::Numeric).collect();
        LabeledExample::new(values, centroid.class)
    }

    fn class_priors(&self) -> Vec<f64> {
        let total: f64 = self.centroids.iter().map(|c| c.weight).sum();
        let mut priors = vec![0.0; self.schema.class_count()];
        for c in &self.centroids {
            priors[c.class as usize] += c.weight / total;
        }
        priors
    }
}
