//! Streaming decision-tree learners with deterministic operation counters.
//!
//! The crate provides Hoeffding trees under three split policies (classic,
//! EFDT-style revision, and per-leaf green criteria), online bagging and
//! boosting ensembles, seeded synthetic generators, a prequential harness and
//! dataset and model I/O. Every learner counts split evaluations, gain
//! computations, observer updates and traversal steps as an energy proxy.

pub mod cli;
pub mod counters;
pub mod efdt;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod gaht;
pub mod generators;
pub mod io;
pub mod learner;
pub mod observer;
pub mod rng;
pub mod stream;
pub mod tree;

pub use counters::ResourceCounters;
pub use ensemble::{EnsembleConfig, OzaBag, OzaBoost};
pub use error::{Error, Result};
pub use eval::{run_prequential, PrequentialEvaluator, PrequentialResult, Snapshot};
pub use gaht::GahtConfig;
pub use generators::{make_generator, GeneratorConfig, GeneratorKind};
pub use learner::{Algorithm, Learner, Model, ModelSpec};
pub use stream::{AttributeKind, AttributeSpec, Instance, LabeledExample, Schema, StreamSource, Value};
pub use tree::{HoeffdingTree, NodeCensus, SplitPolicy, TreeConfig};
