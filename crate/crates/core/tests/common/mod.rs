#![allow(dead_code)]

use greenstream::generators::{make_generator, Generator, GeneratorConfig, GeneratorKind};
use greenstream::{AttributeSpec, LabeledExample, Learner, Schema, StreamSource, Value};

pub fn generator(kind: GeneratorKind, seed: u64) -> Generator {
    make_generator(&GeneratorConfig::new(kind, seed)).expect("default generator config is valid")
}

/// Trains on `n` examples without prediction.
pub fn train_n<L: Learner + ?Sized>(learner: &mut L, stream: &mut impl StreamSource, n: usize) {
    for _ in 0..n {
        let e = stream.next_example().expect("unbounded stream");
        learner.train(&e, 1.0).expect("valid example");
    }
}

/// Single nominal attribute with `classes` values whose value is the label.
pub fn identity_schema(classes: u32) -> Schema {
    Schema::new(vec![AttributeSpec::nominal("key", classes)], classes).unwrap()
}

pub fn identity_example(class: u32) -> LabeledExample {
    LabeledExample::new(vec![Value::Nominal(class)], class)
}
