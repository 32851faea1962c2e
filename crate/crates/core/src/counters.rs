//! Operation counters used as a deterministic energy proxy.
//!
//! Split evaluation and tree traversal dominate the energy cost of Hoeffding
//! trees, so each learner counts the operations behind those terms. Counters
//! only ever increase.

use std::ops::{Add, AddAssign};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

/// Plain snapshot of a learner's counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResourceCounters {
    /// Calls to split scoring (leaf attempts and internal re-evaluations).
    pub split_evaluations: u64,
    /// Individual information-gain evaluations inside split scoring.
    pub gain_computations: u64,
    /// Per-attribute sufficient-statistic updates.
    pub observer_updates: u64,
    /// Edges followed while routing instances, for prediction and training.
    pub traversal_steps: u64,
    /// Training calls with positive weight.
    pub instances_processed: u64,
}

impl ResourceCounters {
    /// Scalar energy proxy: every counted operation weighs one unit.
    pub fn proxy_energy(&self) -> u64 {
        self.as_array().iter().sum()
    }

    pub fn as_array(&self) -> [u64; 5] {
        [
            self.split_evaluations,
            self.gain_computations,
            self.observer_updates,
            self.traversal_steps,
            self.instances_processed,
        ]
    }

    pub const FIELD_NAMES: [&'static str; 5] = [
        "split_evaluations",
        "gain_computations",
        "observer_updates",
        "traversal_steps",
        "instances_processed",
    ];

    /// True when every component is `<=` the matching component of `other`.
    pub fn componentwise_le(&self, other: &Self) -> bool {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .all(|(a, b)| *a <= b)
    }

    pub fn componentwise_max(&self, other: &Self) -> Self {
        let a = self.as_array();
        let b = other.as_array();
        Self::from_array(std::array::from_fn(|i| a[i].max(b[i])))
    }

    fn from_array(v: [u64; 5]) -> Self {
        Self {
            split_evaluations: v[0],
            gain_computations: v[1],
            observer_updates: v[2],
            traversal_steps: v[3],
            instances_processed: v[4],
        }
    }
}

impl Add for ResourceCounters {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let a = self.as_array();
        let b = rhs.as_array();
        Self::from_array(std::array::from_fn(|i| a[i] + b[i]))
    }
}

impl AddAssign for ResourceCounters {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for ResourceCounters {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

/// Live counters owned by one learner.
///
/// Training paths hold `&mut` and bump counters without atomics; prediction
/// only needs `&self`, so traversal steps taken there go through a relaxed
/// atomic add.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(from = "ResourceCounters", into = "ResourceCounters")]
pub struct Counters {
    split_evaluations: u64,
    gain_computations: u64,
    observer_updates: u64,
    traversal_steps: AtomicU64,
    instances_processed: u64,
}

impl Counters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn snapshot(&self) -> ResourceCounters {
        ResourceCounters {
            split_evaluations: self.split_evaluations,
            gain_computations: self.gain_computations,
            observer_updates: self.observer_updates,
            traversal_steps: self.traversal_steps.load(Ordering::Relaxed),
            instances_processed: self.instances_processed,
        }
    }

    pub fn add_split_evaluation(&mut self) {
        self.split_evaluations += 1;
    }

    pub fn add_gain_computations(&mut self, n: u64) {
        self.gain_computations += n;
    }

    pub fn add_observer_update(&mut self) {
        self.observer_updates += 1;
    }

    pub fn add_instance(&mut self) {
        self.instances_processed += 1;
    }

    pub fn add_traversal_steps(&mut self, n: u64) {
        *self.traversal_steps.get_mut() += n;
    }

    pub fn add_traversal_steps_shared(&self, n: u64) {
        self.traversal_steps.fetch_add(n, Ordering::Relaxed);
    }
}

impl Clone for Counters {
    fn clone(&self) -> Self {
        self.snapshot().into()
    }
}

impl PartialEq for Counters {
    fn eq(&self, other: &Self) -> bool {
        self.snapshot() == other.snapshot()
    }
}

impl From<ResourceCounters> for Counters {
    fn from(c: ResourceCounters) -> Self {
        Self {
            split_evaluations: c.split_evaluations,
            gain_computations: c.gain_computations,
            observer_updates: c.observer_updates,
            traversal_steps: AtomicU64::new(c.traversal_steps),
            instances_processed: c.instances_processed,
        }
    }
}

impl From<Counters> for ResourceCounters {
    fn from(c: Counters) -> Self {
        c.snapshot()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_and_order() {
        let a = ResourceCounters {
            split_evaluations: 1,
            gain_computations: 2,
            observer_updates: 3,
            traversal_steps: 4,
            instances_processed: 5,
        };
        let b = a + a;
        assert_eq!(b.proxy_energy(), 30);
        assert!(a.componentwise_le(&b));
        assert!(!b.componentwise_le(&a));
        assert_eq!([a, a].into_iter().sum::<ResourceCounters>(), b);
    }

    #[test]
    fn shared_and_exclusive_paths_agree() {
        let mut c = Counters::new();
        c.add_traversal_steps(3);
        c.add_traversal_steps_shared(2);
        assert_eq!(c.snapshot().traversal_steps, 5);
        let round = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Counters>(&round).unwrap(), c);
    }
}
