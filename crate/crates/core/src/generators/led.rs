use serde::{Deserialize, Serialize};

use super::{check_probability, instance_rng, Synthetic};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::stream::{AttributeSpec, LabeledExample, Schema, Value};

const DIGITS: usize = 10;
const SEGMENTS: usize = 7;

/// Seven-segment encodings of the digits 0..=9.
const SEGMENT_TABLE: [[u32; SEGMENTS]; DIGITS] = [
    [1, 1, 1, 0, 1, 1, 1],
    [0, 0, 1, 0, 0, 1, 0],
    [1, 0, 1, 1, 1, 0, 1],
    [1, 0, 1, 1, 0, 1, 1],
    [0, 1, 1, 1, 0, 1, 0],
    [1, 1, 0, 1, 0, 1, 1],
    [1, 1, 0, 1, 1, 1, 1],
    [1, 0, 1, 0, 0, 1, 0],
    [1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 0, 1, 1],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedParams {
    /// Probability of flipping each segment.
    pub noise: f64,
    pub irrelevant_attributes: u32,
}

impl Default for LedParams {
    fn default() -> Self {
        Self {
            noise: 0.10,
            irrelevant_attributes: 17,
        }
    }
}

/// Noisy seven-segment display of a uniformly drawn digit, padded with
/// random irrelevant bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedGenerator {
    params: LedParams,
    schema: Schema,
    rng: SplitMix64,
}

impl LedGenerator {
    pub fn new(params: LedParams, seed: u64) -> Result<Self> {
        check_probability("LED noise", params.noise)?;
        let total = SEGMENTS + params.irrelevant_attributes as usize;
        let attributes = (0..total)
            .map(|i| AttributeSpec::nominal(format!("att{}", i + 1), 2))
            .collect();
        let schema = Schema::new(attributes, DIGITS as u32).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(Self {
            params,
            schema,
            rng: instance_rng(seed),
        })
    }
}

impl Synthetic for LedGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn generate(&mut self) -> LabeledExample {
        let digit = self.rng.below(DIGITS as u64) as usize;
        let mut values = Vec::with_capacity(self.schema.attribute_count());
        for &segment in &SEGMENT_TABLE[digit] {
            let flip = self.rng.chance(self.params.noise);
            values.push(Value::Nominal(segment ^ u32::from(flip)));
        }
        for _ in 0..self.params.irrelevant_attributes {
            values.push(Value::Nominal(self.rng.below(2) as u32));
        }
        LabeledExample::new(values, digit as u32)
    }

    fn class_priors(&self) -> Vec<f64> {
        vec![1.0 / DIGITS as f64; DIGITS]
    }
}
