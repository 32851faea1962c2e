//! Seeded synthetic stream sources.
//!
//! Every generator draws from [`SplitMix64`] only, so the same config and seed
//! yield the same stream on any platform. Model structure (trees, centroids,
//! hyperplanes) and instances use separate derived generators.

mod agrawal;
mod hyperplane;
mod led;
mod random_tree;
mod rbf;
mod waveform;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use agrawal::{AgrawalGenerator, AgrawalParams};
pub use hyperplane::{HyperplaneGenerator, HyperplaneParams};
pub use led::{LedGenerator, LedParams};
pub use random_tree::{RandomTreeGenerator, RandomTreeParams};
pub use rbf::{RandomRbfGenerator, RandomRbfParams};
pub use waveform::{WaveformGenerator, WaveformParams};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::stream::{LabeledExample, Schema, StreamSource};

/// Derived-stream index for model construction.
const MODEL_STREAM: u64 = 0;
/// Derived-stream index for instance sampling.
const INSTANCE_STREAM: u64 = 1;

fn model_rng(seed: u64) -> SplitMix64 {
    SplitMix64::derive(seed, MODEL_STREAM)
}

fn instance_rng(seed: u64) -> SplitMix64 {
    SplitMix64::derive(seed, INSTANCE_STREAM)
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {p}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GeneratorKind {
    RandomTree,
    Waveform,
    RandomRbf,
    Led,
    Hyperplane,
    Agrawal,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 6] = [
        GeneratorKind::RandomTree,
        GeneratorKind::Waveform,
        GeneratorKind::RandomRbf,
        GeneratorKind::Led,
        GeneratorKind::Hyperplane,
        GeneratorKind::Agrawal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::RandomTree => "randomtree",
            GeneratorKind::Waveform => "waveform",
            GeneratorKind::RandomRbf => "rbf",
            GeneratorKind::Led => "led",
            GeneratorKind::Hyperplane => "hyperplane",
            GeneratorKind::Agrawal => "agrawal",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "randomtree" | "rtree" => Ok(GeneratorKind::RandomTree),
            "waveform" | "wave" => Ok(GeneratorKind::Waveform),
            "rbf" | "randomrbf" => Ok(GeneratorKind::RandomRbf),
            "led" => Ok(GeneratorKind::Led),
            "hyperplane" => Ok(GeneratorKind::Hyperplane),
            "agrawal" => Ok(GeneratorKind::Agrawal),
            _ => Err(Error::Unknown {
                what: "stream",
                name: s.to_string(),
            }),
        }
    }
}

/// Kind-specific parameters; `Default` mirrors the usual toolkit defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GeneratorParams {
    RandomTree(RandomTreeParams),
    Waveform(WaveformParams),
    RandomRbf(RandomRbfParams),
    Led(LedParams),
    Hyperplane(HyperplaneParams),
    Agrawal(AgrawalParams),
}

impl GeneratorParams {
    pub fn defaults(kind: GeneratorKind) -> Self {
        match kind {
            GeneratorKind::RandomTree => GeneratorParams::RandomTree(Default::default()),
            GeneratorKind::Waveform => GeneratorParams::Waveform(Default::default()),
            GeneratorKind::RandomRbf => GeneratorParams::RandomRbf(Default::default()),
            GeneratorKind::Led => GeneratorParams::Led(Default::default()),
            GeneratorKind::Hyperplane => GeneratorParams::Hyperplane(Default::default()),
            GeneratorKind::Agrawal => GeneratorParams::Agrawal(Default::default()),
        }
    }

    pub fn kind(&self) -> GeneratorKind {
        match self {
            GeneratorParams::RandomTree(_) => GeneratorKind::RandomTree,
            GeneratorParams::Waveform(_) => GeneratorKind::Waveform,
            GeneratorParams::RandomRbf(_) => GeneratorKind::RandomRbf,
            GeneratorParams::Led(_) => GeneratorKind::Led,
            GeneratorParams::Hyperplane(_) => GeneratorKind::Hyperplane,
            GeneratorParams::Agrawal(_) => GeneratorKind::Agrawal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub params: GeneratorParams,
}

impl GeneratorConfig {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        Self {
            seed,
            params: GeneratorParams::defaults(kind),
        }
    }

    pub fn kind(&self) -> GeneratorKind {
        self.params.kind()
    }
}

/// Any of the synthetic generators behind one serializable type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    RandomTree(RandomTreeGenerator),
    Waveform(WaveformGenerator),
    RandomRbf(RandomRbfGenerator),
    Led(LedGenerator),
    Hyperplane(HyperplaneGenerator),
    Agrawal(AgrawalGenerator),
}

pub fn make_generator(config: &GeneratorConfig) -> Result<Generator> {
    let seed = config.seed;
    Ok(match &config.params {
        GeneratorParams::RandomTree(p) => Generator::RandomTree(RandomTreeGenerator::new(p.clone(), seed)?),
        GeneratorParams::Waveform(p) => Generator::Waveform(WaveformGenerator::new(p.clone(), seed)?),
        GeneratorParams::RandomRbf(p) => Generator::RandomRbf(RandomRbfGenerator::new(p.clone(), seed)?),
        GeneratorParams::Led(p) => Generator::Led(LedGenerator::new(p.clone(), seed)?),
        GeneratorParams::Hyperplane(p) => Generator::Hyperplane(HyperplaneGenerator::new(p.clone(), seed)?),
        GeneratorParams::Agrawal(p) => Generator::Agrawal(AgrawalGenerator::new(p.clone(), seed)?),
    })
}

impl Generator {
    pub fn kind(&self) -> GeneratorKind {
        match self {
            Generator::RandomTree(_) => GeneratorKind::RandomTree,
            Generator::Waveform(_) => GeneratorKind::Waveform,
            Generator::RandomRbf(_) => GeneratorKind::RandomRbf,
            Generator::Led(_) => GeneratorKind::Led,
            Generator::Hyperplane(_) => GeneratorKind::Hyperplane,
            Generator::Agrawal(_) => GeneratorKind::Agrawal,
        }
    }

    fn inner(&self) -> &dyn Synthetic {
        match self {
            Generator::RandomTree(g) => g,
            Generator::Waveform(g) => g,
            Generator::RandomRbf(g) => g,
            Generator::Led(g) => g,
            Generator::Hyperplane(g) => g,
            Generator::Agrawal(g) => g,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn Synthetic {
        match self {
            Generator::RandomTree(g) => g,
            Generator::Waveform(g) => g,
            Generator::RandomRbf(g) => g,
            Generator::Led(g) => g,
            Generator::Hyperplane(g) => g,
            Generator::Agrawal(g) => g,
        }
    }

    /// Exact class probabilities of the generating process.
    pub fn class_priors(&self) -> Vec<f64> {
        self.inner().class_priors()
    }
}

impl StreamSource for Generator {
    fn schema(&self) -> &Schema {
        self.inner().schema()
    }

    fn next_example(&mut self) -> Option<LabeledExample> {
        Some(self.inner_mut().generate())
    }
}

/// Shared surface of the concrete generators.
pub(crate) trait Synthetic {
    fn schema(&self) -> &Schema;
    fn generate(&mut self) -> LabeledExample;
    fn class_priors(&self) -> Vec<f64>;
}

/// Published HT and GAHT accuracies (percent) for a synthetic stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceAccuracy {
    pub ht: f64,
    pub gaht: f64,
}

pub fn generator_reference_accuracy(kind: GeneratorKind) -> ReferenceAccuracy {
    let (ht, gaht) = match kind {
        GeneratorKind::Led => (74.50, 74.18),
        GeneratorKind::RandomTree => (95.01, 96.74),
        GeneratorKind::Waveform => (84.22, 83.60),
        GeneratorKind::RandomRbf => (91.93, 93.31),
        GeneratorKind::Hyperplane => (90.14, 88.49),
        GeneratorKind::Agrawal => (94.10, 94.44),
    };
    ReferenceAccuracy { ht, gaht }
}
