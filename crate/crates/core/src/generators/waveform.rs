use serde::{Deserialize, Serialize};

use super::{instance_rng, Synthetic};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::stream::{AttributeSpec, LabeledExample, Schema, Value};

const ATTRIBUTES: usize = 21;
const CLASSES: usize = 3;

/// Triangular base waves.
const BASE_WAVES: [[f64; ATTRIBUTES]; 3] = [
    [0., 1., 2., 3., 4., 5., 6., 5., 4., 3., 2., 1., 0., 0., 0., 0., 0., 0., 0., 0., 0.],
    [0., 0., 0., 0., 0., 1., 2., 3., 4., 5., 6., 5., 4., 3., 2., 1., 0., 0., 0., 0., 0.],
    [0., 0., 0., 0., 0., 0., 0., 0., 0., 1., 2., 3., 4., 5., 6., 5., 4., 3., 2., 1., 0.],
];

/// Pair of base waves mixed for each class.
const CLASS_WAVES: [(usize, usize); CLASSES] = [(0, 1), (0, 2), (1, 2)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformParams {
    /// Standard deviation of the additive Gaussian noise.
    pub noise_std_dev: f64,
}

impl Default for WaveformParams {
    fn default() -> Self {
        Self { noise_std_dev: 1.0 }
    }
}

/// Random convex combination of two base waves plus Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformGenerator {
    params: WaveformParams,
    schema: Schema,
    rng: SplitMix64,
}

impl WaveformGenerator {
    pub fn new(params: WaveformParams, seed: u64) -> Result<Self> {
        if !(params.noise_std_dev >= 0.0 && params.noise_std_dev.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "waveform noise must be finite and >= 0, got {}",
                params.noise_std_dev
            )));
        }
        let attributes = (0..ATTRIBUTES).map(|i| AttributeSpec::numeric(format!("att{}", i + 1))).collect();
        let schema = Schema::new(attributes, CLASSES as u32).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(Self {
            params,
            schema,
            rng: instance_rng(seed),
        })
    }
}

impl Synthetic for WaveformGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn generate(&mut self) -> LabeledExample {
        let class = self.rng.below(CLASSES as u64) as usize;
        let (a, b) = CLASS_WAVES[class];
        let u = self.rng.next_f64();
        let values = (0..ATTRIBUTES)
            .map(|i| {
                let clean = u * BASE_WAVES[a][i] + (1.0 - u) * BASE_WAVES[b][i];
                Value::Numeric(clean + self.params.noise_std_dev * self.rng.gaussian())
            })
            .collect();
        LabeledExample::new(values, class as u32)
    }

    fn class_priors(&self) -> Vec<f64> {
        vec![1.0 / CLASSES as f64; CLASSES]
    }
}
