//! Per-leaf sufficient statistics and split scoring.
//!
//! Nominal attributes keep a value × class weight table. Numeric attributes
//! keep one weighted Gaussian summary per class and are scored at a fixed
//! number of equally spaced thresholds between the observed extremes.
//! Merits are information gains in bits, relative to the parent entropy, so
//! the "do not split" option always scores exactly zero.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::stream::{AttributeKind, Value};

/// Candidate thresholds scored per numeric attribute.
pub const NUMERIC_SPLIT_CANDIDATES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalObserver {
    value_count: usize,
    class_count: usize,
    /// Row-major `[value][class]`.
    counts: Vec<f64>,
}

impl NominalObserver {
    pub fn new(value_count: usize, class_count: usize) -> Self {
        Self {
            value_count,
            class_count,
            counts: vec![0.0; value_count * class_count],
        }
    }

    pub fn observe(&mut self, value: u32, class: u32, weight: f64) {
        self.counts[value as usize * self.class_count + class as usize] += weight;
    }

    pub fn count(&self, value: usize, class: usize) -> f64 {
        self.counts[value * self.class_count + class]
    }

    pub fn value_count(&self) -> usize {
        self.value_count
    }

    /// Class distribution of every value branch.
    pub fn branch_distributions(&self) -> Vec<Vec<f64>> {
        self.counts
            .chunks(self.class_count)
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// Weighted running mean and variance (West's incremental update).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GaussianEstimator {
    weight_sum: f64,
    mean: f64,
    variance_sum: f64,
}

impl GaussianEstimator {
    pub fn add(&mut self, value: f64, weight: f64) {
        if self.weight_sum > 0.0 {
            self.weight_sum += weight;
            let last_mean = self.mean;
            self.mean += weight * (value - last_mean) / self.weight_sum;
            self.variance_sum += weight * (value - last_mean) * (value - self.mean);
        } else {
            self.mean = value;
            self.weight_sum = weight;
        }
    }

    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance; zero until more than one unit of weight is seen.
    pub fn variance(&self) -> f64 {
        if self.weight_sum > 1.0 {
            (self.variance_sum / (self.weight_sum - 1.0)).max(0.0)
        } else {
            0.0
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Weight estimated to fall at or below `threshold`.
    fn weight_at_or_below(&self, threshold: f64) -> f64 {
        let sd = self.std_dev();
        if sd > 0.0 {
            self.weight_sum * standard_normal_cdf((threshold - self.mean) / sd)
        } else if threshold >= self.mean {
            self.weight_sum
        } else {
            0.0
        }
    }
}

fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianObserver {
    per_class: Vec<GaussianEstimator>,
    min: Vec<f64>,
    max: Vec<f64>,
}

impl GaussianObserver {
    pub fn new(class_count: usize) -> Self {
        Self {
            per_class: vec![GaussianEstimator::default(); class_count],
            min: vec![f64::INFINITY; class_count],
            max: vec![f64::NEG_INFINITY; class_count],
        }
    }

    pub fn observe(&mut self, value: f64, class: u32, weight: f64) {
        let c = class as usize;
        self.per_class[c].add(value, weight);
        self.min[c] = self.min[c].min(value);
        self.max[c] = self.max[c].max(value);
    }

    pub fn estimator(&self, class: usize) -> &GaussianEstimator {
        &self.per_class[class]
    }

    /// Observed (min, max) over all classes, if any weight was seen.
    pub fn range(&self) -> Option<(f64, f64)> {
        let lo = self.min.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo <= hi).then_some((lo, hi))
    }

    /// Equally spaced thresholds strictly inside the observed range.
    pub fn candidate_thresholds(&self) -> Vec<f64> {
        match self.range() {
            Some((lo, hi)) if hi > lo => {
                let step = (hi - lo) / (NUMERIC_SPLIT_CANDIDATES as f64 + 1.0);
                (1..=NUMERIC_SPLIT_CANDIDATES)
                    .map(|i| lo + step * i as f64)
                    .filter(|t| *t > lo && *t < hi)
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Estimated `[left, right]` class distributions for `value <= threshold`.
    pub fn split_distributions(&self, threshold: f64) -> [Vec<f64>; 2] {
        let c = self.per_class.len();
        let mut left = vec![0.0; c];
        let mut right = vec![0.0; c];
        for (k, est) in self.per_class.iter().enumerate() {
            let w = est.weight_sum();
            if w <= 0.0 {
                continue;
            }
            if threshold < self.min[k] {
                right[k] = w;
            } else if threshold >= self.max[k] {
                left[k] = w;
            } else {
                let below = est.weight_at_or_below(threshold).clamp(0.0, w);
                left[k] = below;
                right[k] = w - below;
            }
        }
        [left, right]
    }
}

/// Sufficient statistics for one attribute at one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttributeObserver {
    Nominal(NominalObserver),
    Gaussian(GaussianObserver),
}

impl AttributeObserver {
    pub fn for_kind(kind: AttributeKind, class_count: usize) -> Self {
        match kind {
            AttributeKind::Nominal { value_count } => {
                Self::Nominal(NominalObserver::new(value_count as usize, class_count))
            }
            AttributeKind::Numeric => Self::Gaussian(GaussianObserver::new(class_count)),
        }
    }

    /// Adds `weight` units of (`value`, `class`). Zero weight leaves the
    /// observer and the counters untouched.
    pub fn observe(
        &mut self,
        value: Value,
        class: u32,
        weight: f64,
        counters: &mut Counters,
    ) -> Result<()> {
        match (self, value) {
            (Self::Nominal(obs), Value::Nominal(v)) => {
                if weight > 0.0 {
                    obs.observe(v, class, weight);
                    counters.add_observer_update();
                }
                Ok(())
            }
            (Self::Gaussian(obs), Value::Numeric(x)) => {
                if weight > 0.0 {
                    obs.observe(x, class, weight);
                    counters.add_observer_update();
                }
                Ok(())
            }
            (Self::Nominal(_), Value::Numeric(_)) => Err(Error::ObserverKind {
                expected: "nominal",
            }),
            (Self::Gaussian(_), Value::Nominal(_)) => Err(Error::ObserverKind {
                expected: "numeric",
            }),
        }
    }
}

/// Shannon entropy in bits of a nonnegative distribution.
pub fn entropy(distribution: &[f64]) -> Result<f64> {
    if !distribution.iter().any(|w| *w > 0.0) {
        return Err(Error::EmptyDistribution);
    }
    Ok(entropy_bits(distribution))
}

/// Entropy with the empty distribution mapped to zero.
fn entropy_bits(distribution: &[f64]) -> f64 {
    let total: f64 = distribution.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &w in distribution {
        if w > 0.0 {
            let p = w / total;
            h -= p * p.log2();
        }
    }
    h
}

/// Information gain of splitting the merged distribution into `branches`.
///
/// The parent distribution is the sum of the branches, so every attribute at
/// a node is scored against the same mass it was observed with.
pub fn information_gain(branches: &[Vec<f64>]) -> f64 {
    let class_count = branches.first().map_or(0, Vec::len);
    let mut parent = vec![0.0; class_count];
    for branch in branches {
        for (p, w) in parent.iter_mut().zip(branch) {
            *p += w;
        }
    }
    let total: f64 = parent.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let children: f64 = branches
        .iter()
        .map(|b| b.iter().sum::<f64>() / total * entropy_bits(b))
        .sum();
    (entropy_bits(&parent) - children).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplitKind {
    /// One branch per nominal value.
    Multiway,
    /// Two branches: `value <= threshold` goes left.
    Threshold(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSuggestion {
    /// `None` is the null split (keep the leaf).
    pub attribute: Option<usize>,
    pub kind: Option<SplitKind>,
    /// Information gain in bits, never negative.
    pub merit: f64,
    pub child_distributions: Vec<Vec<f64>>,
}

impl SplitSuggestion {
    pub fn null() -> Self {
        Self {
            attribute: None,
            kind: None,
            merit: 0.0,
            child_distributions: Vec::new(),
        }
    }

    pub fn is_null(&self) -> bool {
        self.attribute.is_none()
    }
}

fn rank_order(a: &SplitSuggestion, b: &SplitSuggestion) -> Ordering {
    b.merit.total_cmp(&a.merit).then_with(|| {
        // Null split first among equals, then lower attribute index.
        let key = |s: &SplitSuggestion| s.attribute.map_or(-1, |i| i as i64);
        key(a).cmp(&key(b))
    })
}

/// Scores every enabled attribute plus the null split, best first.
///
/// `disabled[i] == true` excludes attribute `i`. Counts one split
/// evaluation and one gain computation per scored branch layout.
pub fn best_splits(
    observers: &[AttributeObserver],
    disabled: &[bool],
    leaf_distribution: &[f64],
    counters: &mut Counters,
) -> Result<Vec<SplitSuggestion>> {
    if !leaf_distribution.iter().any(|w| *w > 0.0) {
        return Err(Error::EmptyDistribution);
    }
    counters.add_split_evaluation();
    let mut gains = 0u64;
    let mut ranked = vec![SplitSuggestion::null()];
    for (attribute, observer) in observers.iter().enumerate() {
        if disabled.get(attribute).copied().unwrap_or(false) {
            continue;
        }
        match observer {
            AttributeObserver::Nominal(obs) => {
                let branches = obs.branch_distributions();
                gains += 1;
                ranked.push(SplitSuggestion {
                    attribute: Some(attribute),
                    kind: Some(SplitKind::Multiway),
                    merit: information_gain(&branches),
                    child_distributions: branches,
                });
            }
            AttributeObserver::Gaussian(obs) => {
                let mut best: Option<(f64, f64, [Vec<f64>; 2])> = None;
                for threshold in obs.candidate_thresholds() {
                    let dists = obs.split_distributions(threshold);
                    let merit = information_gain(&dists);
                    gains += 1;
                    if best.as_ref().is_none_or(|(m, _, _)| merit > *m) {
                        best = Some((merit, threshold, dists));
                    }
                }
                if let Some((merit, threshold, [left, right])) = best {
                    ranked.push(SplitSuggestion {
                        attribute: Some(attribute),
                        kind: Some(SplitKind::Threshold(threshold)),
                        merit,
                        child_distributions: vec![left, right],
                    });
                }
            }
        }
    }
    counters.add_gain_computations(gains);
    ranked.sort_by(rank_order);
    Ok(ranked)
}

/// Hoeffding bound: `sqrt(R² ln(1/δ) / 2n)`.
pub fn hoeffding_bound(range: f64, delta: f64, n: f64) -> f64 {
    debug_assert!(range > 0.0 && delta > 0.0 && delta <= 1.0 && n > 0.0);
    (range * range * (1.0 / delta).ln() / (2.0 * n)).sqrt()
}

/// Range of the information-gain merit for `class_count` classes.
pub fn gain_range(class_count: usize) -> f64 {
    (class_count.max(2) as f64).log2()
}
