//! Schema, instances and the stream abstraction shared by learners and generators.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};

/// Kind of a single input attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttributeKind {
    /// Categorical attribute with dense 0-based value indices.
    Nominal { value_count: u32 },
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
}

impl AttributeSpec {
    pub fn nominal(name: impl Into<String>, value_count: u32) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Nominal { value_count },
        }
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }
}

/// Ordered attribute list plus the number of target classes.
///
/// A schema is validated once at construction and immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchema")]
pub struct Schema {
    attributes: Vec<AttributeSpec>,
    class_count: u32,
}

#[derive(Deserialize)]
struct RawSchema {
    attributes: Vec<AttributeSpec>,
    class_count: u32,
}

impl TryFrom<RawSchema> for Schema {
    type Error = Error;

    fn try_from(raw: RawSchema) -> Result<Self> {
        Schema::new(raw.attributes, raw.class_count)
    }
}

impl Schema {
    pub fn new(attributes: Vec<AttributeSpec>, class_count: u32) -> Result<Self> {
        if class_count < 2 {
            return Err(Error::InvalidSchema(format!(
                "class count must be at least 2, got {class_count}"
            )));
        }
        if attributes.is_empty() {
            return Err(Error::InvalidSchema(
                "schema needs at least one attribute".into(),
            ));
        }
        let mut seen = HashSet::new();
        for spec in &attributes {
            if !seen.insert(spec.name.as_str()) {
                return Err(Error::InvalidSchema(format!(
                    "duplicate attribute name `{}`",
                    spec.name
                )));
            }
            if let AttributeKind::Nominal { value_count } = spec.kind {
                if value_count < 2 {
                    return Err(Error::InvalidSchema(format!(
                        "nominal attribute `{}` needs at least 2 values, got {value_count}",
                        spec.name
                    )));
                }
            }
        }
        Ok(Self {
            attributes,
            class_count,
        })
    }

    pub fn attributes(&self) -> &[AttributeSpec] {
        &self.attributes
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_count as usize
    }

    pub fn nominal_count(&self) -> usize {
        self.attributes
            .iter()
            .filter(|a| matches!(a.kind, AttributeKind::Nominal { .. }))
            .count()
    }

    pub fn numeric_count(&self) -> usize {
        self.attribute_count() - self.nominal_count()
    }

    pub fn kind(&self, attribute: usize) -> AttributeKind {
        self.attributes[attribute].kind
    }
}

/// A single attribute value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Nominal(u32),
    Numeric(f64),
}

impl Value {
    /// Numeric view of the value; nominal indices become whole numbers.
    pub fn as_f64(self) -> f64 {
        match self {
            Value::Nominal(v) => f64::from(v),
            Value::Numeric(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub values: Vec<Value>,
}

impl Instance {
    pub fn new(values: Vec<Value>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub instance: Instance,
    pub label: u32,
}

impl LabeledExample {
    pub fn new(values: Vec<Value>, label: u32) -> Self {
        Self {
            instance: Instance::new(values),
            label,
        }
    }
}

/// First violated constraint found by [`validate_example`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("instance has {found} values, schema has {expected} attributes")]
    ArityMismatch { expected: usize, found: usize },
    #[error("attribute {attribute} expects a {expected} value")]
    KindMismatch {
        attribute: usize,
        expected: &'static str,
    },
    #[error("attribute {attribute}: nominal index {index} out of range (value count {value_count})")]
    OutOfRangeNominal {
        attribute: usize,
        index: u32,
        value_count: u32,
    },
    #[error("label {label} out of range (class count {class_count})")]
    OutOfRangeLabel { label: u32, class_count: usize },
    #[error("attribute {attribute}: numeric value {value} is not finite")]
    NonFiniteNumeric { attribute: usize, value: f64 },
}

/// Checks an instance against the schema, ignoring the label.
pub fn validate_instance(
    schema: &Schema,
    instance: &Instance,
) -> std::result::Result<(), ValidationError> {
    if instance.len() != schema.attribute_count() {
        return Err(ValidationError::ArityMismatch {
            expected: schema.attribute_count(),
            found: instance.len(),
        });
    }
    for (attribute, (spec, value)) in schema.attributes.iter().zip(&instance.values).enumerate() {
        match (spec.kind, *value) {
            (AttributeKind::Nominal { value_count }, Value::Nominal(index)) => {
                if index >= value_count {
                    return Err(ValidationError::OutOfRangeNominal {
                        attribute,
                        index,
                        value_count,
                    });
                }
            }
            (AttributeKind::Numeric, Value::Numeric(x)) => {
                if !x.is_finite() {
                    return Err(ValidationError::NonFiniteNumeric {
                        attribute,
                        value: x,
                    });
                }
            }
            (AttributeKind::Nominal { .. }, Value::Numeric(_)) => {
                return Err(ValidationError::KindMismatch {
                    attribute,
                    expected: "nominal",
                })
            }
            (AttributeKind::Numeric, Value::Nominal(_)) => {
                return Err(ValidationError::KindMismatch {
                    attribute,
                    expected: "numeric",
                })
            }
        }
    }
    Ok(())
}

pub fn validate_example(
    schema: &Schema,
    example: &LabeledExample,
) -> std::result::Result<(), ValidationError> {
    validate_instance(schema, &example.instance)?;
    if example.label as usize >= schema.class_count() {
        return Err(ValidationError::OutOfRangeLabel {
            label: example.label,
            class_count: schema.class_count(),
        });
    }
    Ok(())
}

/// A source of labeled examples, finite or unbounded.
pub trait StreamSource {
    fn schema(&self) -> &Schema;

    /// Next example, or `None` once a finite source is exhausted.
    fn next_example(&mut self) -> Option<LabeledExample>;
}

impl<S: StreamSource + ?Sized> StreamSource for Box<S> {
    fn schema(&self) -> &Schema {
        (**self).schema()
    }

    fn next_example(&mut self) -> Option<LabeledExample> {
        (**self).next_example()
    }
}

/// Finite in-memory stream, e.g. a parsed dataset file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VecStream {
    schema: Schema,
    examples: Vec<LabeledExample>,
    position: usize,
}

impl VecStream {
    pub fn new(schema: Schema, examples: Vec<LabeledExample>) -> Self {
        Self {
            schema,
            examples,
            position: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }
}

impl StreamSource for VecStream {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn next_example(&mut self) -> Option<LabeledExample> {
        let example = self.examples.get(self.position).cloned();
        if example.is_some() {
            self.position += 1;
        }
        example
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} nominal + {} numeric attributes, {} classes",
            self.nominal_count(),
            self.numeric_count(),
            self.class_count
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed() -> Schema {
        Schema::new(
            vec![AttributeSpec::nominal("a", 3), AttributeSpec::numeric("b")],
            2,
        )
        .unwrap()
    }

    #[test]
    fn accepts_valid_example() {
        let ex = LabeledExample::new(vec![Value::Nominal(2), Value::Numeric(1.5)], 0);
        assert_eq!(validate_example(&mixed(), &ex), Ok(()));
    }

    #[test]
    fn rejects_nominal_index_equal_to_value_count() {
        let schema = Schema::new(vec![AttributeSpec::nominal("a", 3)], 2).unwrap();
        let ex = LabeledExample::new(vec![Value::Nominal(3)], 0);
        assert!(matches!(
            validate_example(&schema, &ex),
            Err(ValidationError::OutOfRangeNominal { index: 3, .. })
        ));
    }

    #[test]
    fn rejects_nan() {
        let schema = Schema::new(vec![AttributeSpec::numeric("x")], 2).unwrap();
        let ex = LabeledExample::new(vec![Value::Numeric(f64::NAN)], 1);
        assert!(matches!(
            validate_example(&schema, &ex),
            Err(ValidationError::NonFiniteNumeric { attribute: 0, .. })
        ));
    }

    #[test]
    fn reports_first_violation() {
        let ex = LabeledExample::new(vec![Value::Numeric(1.0), Value::Numeric(f64::INFINITY)], 7);
        assert!(matches!(
            validate_example(&mixed(), &ex),
            Err(ValidationError::KindMismatch { attribute: 0, .. })
        ));
        let ex = LabeledExample::new(vec![Value::Nominal(0)], 0);
        assert!(matches!(
            validate_example(&mixed(), &ex),
            Err(ValidationError::ArityMismatch { expected: 2, found: 1 })
        ));
        let ex = LabeledExample::new(vec![Value::Nominal(0), Value::Numeric(0.0)], 2);
        assert!(matches!(
            validate_example(&mixed(), &ex),
            Err(ValidationError::OutOfRangeLabel { label: 2, .. })
        ));
    }

    #[test]
    fn schema_invariants() {
        assert!(Schema::new(vec![AttributeSpec::numeric("x")], 1).is_err());
        assert!(Schema::new(vec![], 2).is_err());
        assert!(Schema::new(vec![AttributeSpec::nominal("x", 1)], 2).is_err());
        assert!(Schema::new(
            vec![AttributeSpec::numeric("x"), AttributeSpec::numeric("x")],
            2
        )
        .is_err());
    }

    #[test]
    fn deserializing_rechecks_invariants() {
        let bad = r#"{"attributes":[],"class_count":2}"#;
        assert!(serde_json::from_str::<Schema>(bad).is_err());
        let good = serde_json::to_string(&mixed()).unwrap();
        assert_eq!(serde_json::from_str::<Schema>(&good).unwrap(), mixed());
    }
}
