use serde::{Deserialize, Serialize};

use super::{check_probability, instance_rng, model_rng, Synthetic};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::stream::{AttributeSpec, LabeledExample, Schema, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomTreeParams {
    pub classes: u32,
    pub nominal_attributes: u32,
    pub numeric_attributes: u32,
    pub values_per_nominal: u32,
    pub max_depth: u32,
    /// Shallowest depth at which a leaf may appear.
    pub first_leaf_level: u32,
    /// Chance that a node at or below `first_leaf_level` becomes a leaf.
    pub leaf_fraction: f64,
}

impl Default for RandomTreeParams {
    fn default() -> Self {
        Self {
            classes: 2,
            nominal_attributes: 5,
            numeric_attributes: 5,
            values_per_nominal: 5,
            max_depth: 5,
            first_leaf_level: 3,
            leaf_fraction: 0.15,
        }
    }
}

/// Hidden concept tree. Nominal attributes appear at most once per path;
/// numeric thresholds are drawn inside the interval reaching the node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum ConceptNode {
    Leaf(u32),
    Nominal { attribute: usize, children: Vec<ConceptNode> },
    Numeric { attribute: usize, threshold: f64, children: Box<[ConceptNode; 2]> },
}

/// Instances uniform over the attribute space, labeled by a random tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomTreeGenerator {
    params: RandomTreeParams,
    schema: Schema,
    tree: ConceptNode,
    rng: SplitMix64,
}

struct Builder<'a> {
    params: &'a RandomTreeParams,
    rng: SplitMix64,
}

impl Builder<'_> {
    fn node(&mut self, depth: u32, nominal_left: &[usize], lo: &mut [f64], hi: &mut [f64]) -> ConceptNode {
        let p = self.params;
        if depth >= p.max_depth || (depth >= p.first_leaf_level && p.leaf_fraction >= 1.0 - self.rng.next_f64()) {
            return ConceptNode::Leaf(self.rng.below(u64::from(p.classes)) as u32);
        }
        let numeric = p.numeric_attributes as usize;
        let choice = self.rng.below((nominal_left.len() + numeric) as u64) as usize;
        if choice < nominal_left.len() {
            let attribute = nominal_left[choice];
            let remaining: Vec<usize> = nominal_left.iter().copied().filter(|&a| a != attribute).collect();
            let children = (0..p.values_per_nominal)
                .map(|_| self.node(depth + 1, &remaining, lo, hi))
                .collect();
            ConceptNode::Nominal { attribute, children }
        } else {
            let index = choice - nominal_left.len();
            let threshold = lo[index] + (hi[index] - lo[index]) * self.rng.next_f64();
            let saved_hi = std::mem::replace(&mut hi[index], threshold);
            let left = self.node(depth + 1, nominal_left, lo, hi);
            hi[index] = saved_hi;
            let saved_lo = std::mem::replace(&mut lo[index], threshold);
            let right = self.node(depth + 1, nominal_left, lo, hi);
            lo[index] = saved_lo;
            ConceptNode::Numeric {
                attribute: p.nominal_attributes as usize + index,
                threshold,
                children: Box::new([left, right]),
            }
        }
    }
}

impl RandomTreeGenerator {
    pub fn new(params: RandomTreeParams, seed: u64) -> Result<Self> {
        check_probability("leaf fraction", params.leaf_fraction)?;
        if params.values_per_nominal < 2 {
            return Err(Error::InvalidConfig("nominal attributes need at least two values".into()));
        }
        if params.max_depth == 0 {
            return Err(Error::InvalidConfig("random tree depth must be positive".into()));
        }
        let mut attributes: Vec<AttributeSpec> = (0..params.nominal_attributes)
            .map(|i| AttributeSpec::nominal(format!("nominal{}", i + 1), params.values_per_nominal))
            .collect();
        attributes.extend((0..params.numeric_attributes).map(|i| AttributeSpec::numeric(format!("numeric{}", i + 1))));
        let schema = Schema::new(attributes, params.classes).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let numeric = params.numeric_attributes as usize;
        let nominal: Vec<usize> = (0..params.nominal_attributes as usize).collect();
        let mut builder = Builder {
            params: &params,
            rng: model_rng(seed),
        };
        let tree = builder.node(0, &nominal, &mut vec![0.0; numeric], &mut vec![1.0; numeric]);
        Ok(Self {
            params,
            schema,
            tree,
            rng: instance_rng(seed),
        })
    }

    /// Depth of the hidden concept tree.
    pub fn concept_depth(&self) -> u32 {
        fn depth(node: &ConceptNode) -> u32 {
            match node {
                ConceptNode::Leaf(_) => 0,
                ConceptNode::Nominal { children, .. } => 1 + children.iter().map(depth).max().unwrap_or(0),
                ConceptNode::Numeric { children, .. } => 1 + children.iter().map(depth).max().unwrap_or(0),
            }
        }
        depth(&self.tree)
    }

    fn label(&self, values: &[Value]) -> u32 {
        let mut node = &self.tree;
        loop {
            match node {
                ConceptNode::Leaf(class) => return *class,
                ConceptNode::Nominal { attribute, children } => {
                    node = &children[values[*attribute].as_f64() as usize];
                }
                ConceptNode::Numeric {
                    attribute,
                    threshold,
                    children,
                } => {
                    node = &children[usize::from(values[*attribute].as_f64() >= *threshold)];
                }
            }
        }
    }
}

impl Synthetic for RandomTreeGenerator {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn generate(&mut self) -> LabeledExample {
        let v = u64::from(self.params.values_per_nominal);
        let mut values = Vec::with_capacity(self.schema.attribute_count());
        for _ in 0..self.params.nominal_attributes {
            values.push(Value::Nominal(self.rng.below(v) as u32));
        }
        for _ in 0..self.params.numeric_attributes {
            values.push(Value::Numeric(self.rng.next_f64()));
        }
        let label = self.label(&values);
        LabeledExample::new(values, label)
    }

    /// Probability mass of every leaf region, summed per class.
    fn class_priors(&self) -> Vec<f64> {
        fn walk(node: &ConceptNode, mass: f64, lo: &mut Vec<f64>, hi: &mut Vec<f64>, first_numeric: usize, out: &mut [f64]) {
            match node {
                ConceptNode::Leaf(class) => out[*class as usize] += mass,
                ConceptNode::Nominal { children, .. } => {
                    let share = mass / children.len() as f64;
                    for child in children {
                        walk(child, share, lo, hi, first_numeric, out);
                    }
                }
                ConceptNode::Numeric {
                    attribute,
                    threshold,
                    children,
                } => {
                    let i = attribute - first_numeric;
                    let (l, h) = (lo[i], hi[i]);
                    let width = h - l;
                    let left = if width > 0.0 { (threshold - l) / width } else { 0.5 };
                    hi[i] = *threshold;
                    walk(&children[0], mass * left, lo, hi, first_numeric, out);
                    hi[i] = h;
                    lo[i] = *threshold;
                    walk(&children[1], mass * (1.0 - left), lo, hi, first_numeric, out);
                    lo[i] = l;
                }
            }
        }
        let numeric = self.params.numeric_attributes as usize;
        let mut out = vec![0.0; self.schema.class_count()];
        walk(
            &self.tree,
            1.0,
            &mut vec![0.0; numeric],
            &mut vec![1.0; numeric],
            self.params.nominal_attributes as usize,
            &mut out,
        );
        out
    }
}
