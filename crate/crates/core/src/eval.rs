//! Prequential evaluation, model-size estimates and cross-run ranking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::counters::ResourceCounters;
use crate::error::{Error, Result};
use crate::learner::Learner;
use crate::stream::StreamSource;
use crate::tree::NodeCensus;

/// Snapshot cadence used when none is given.
pub const DEFAULT_SNAPSHOT_EVERY: u64 = 100_000;

/// Constants of the structural size estimate, in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByteModel {
    pub node_overhead: u64,
    /// One cell of a nominal observer's value-by-class table.
    pub count_entry: u64,
    /// One per-class (weight, mean, variance) triple of a numeric observer.
    pub gaussian_tuple: u64,
    /// One class-distribution cell.
    pub distribution_entry: u64,
    pub class_count: u64,
}

impl ByteModel {
    pub const NODE_OVERHEAD: u64 = 64;
    pub const COUNT_ENTRY: u64 = 8;
    pub const GAUSSIAN_TUPLE: u64 = 24;
    pub const DISTRIBUTION_ENTRY: u64 = 8;

    pub fn for_classes(class_count: usize) -> Self {
        Self {
            node_overhead: Self::NODE_OVERHEAD,
            count_entry: Self::COUNT_ENTRY,
            gaussian_tuple: Self::GAUSSIAN_TUPLE,
            distribution_entry: Self::DISTRIBUTION_ENTRY,
            class_count: class_count as u64,
        }
    }
}

/// Deterministic structural size of any learner, summed over ensemble members.
pub fn estimate_model_bytes<L: Learner + ?Sized>(model: &L) -> u64 {
    model.estimated_bytes()
}

/// Model state at one point of a prequential run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub instances_seen: u64,
    pub cumulative_accuracy: f64,
    /// Accuracy over the instances since the previous snapshot.
    pub window_accuracy: f64,
    pub counters: ResourceCounters,
    pub census: NodeCensus,
    pub estimated_model_bytes: u64,
    pub wall_time_secs: f64,
}

impl Snapshot {
    /// Equality on every field except wall time.
    pub fn same_outcome(&self, other: &Snapshot) -> bool {
        Snapshot {
            wall_time_secs: 0.0,
            ..self.clone()
        } == Snapshot {
            wall_time_secs: 0.0,
            ..other.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrequentialResult {
    /// Records at every multiple of the cadence.
    pub snapshots: Vec<Snapshot>,
    /// State after the last processed instance.
    pub summary: Snapshot,
    /// The stream ran dry before the requested limit.
    pub truncated: bool,
}

/// Resumable test-then-train loop. The evaluator holds only scoring state, so
/// a run can be checkpointed together with its learner and stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrequentialEvaluator {
    snapshot_every: u64,
    seen: u64,
    correct: u64,
    window_seen: u64,
    window_correct: u64,
    elapsed_secs: f64,
    snapshots: Vec<Snapshot>,
    truncated: bool,
}

impl PrequentialEvaluator {
    pub fn new(snapshot_every: u64) -> Result<Self> {
        if snapshot_every == 0 {
            return Err(Error::InvalidConfig("snapshot cadence must be at least 1".into()));
        }
        Ok(Self {
            snapshot_every,
            seen: 0,
            correct: 0,
            window_seen: 0,
            window_correct: 0,
            elapsed_secs: 0.0,
            snapshots: Vec::new(),
            truncated: false,
        })
    }

    pub fn instances_seen(&self) -> u64 {
        self.seen
    }

    pub fn cumulative_accuracy(&self) -> f64 {
        ratio(self.correct, self.seen)
    }

    /// Tests then trains on one example; returns whether the prediction was right.
    pub fn step<L: Learner + ?Sized>(&mut self, learner: &mut L, example: &crate::stream::LabeledExample) -> Result<bool> {
        let hit = learner.predict_class(&example.instance)? == example.label as usize;
        learner.train(example, 1.0)?;
        self.seen += 1;
        self.window_seen += 1;
        if hit {
            self.correct += 1;
            self.window_correct += 1;
        }
        Ok(hit)
    }

    /// Processes examples until `until` instances have been seen in total or
    /// the stream is exhausted.
    pub fn run_until<L, S>(&mut self, learner: &mut L, stream: &mut S, until: u64) -> Result<()>
    where
        L: Learner + ?Sized,
        S: StreamSource + ?Sized,
    {
        if learner.schema() != stream.schema() {
            return Err(Error::InvalidSchema(format!(
                "learner schema ({}) differs from stream schema ({})",
                learner.schema(),
                stream.schema()
            )));
        }
        let start = Instant::now();
        while self.seen < until {
            let Some(example) = stream.next_example() else {
                self.truncated = true;
                break;
            };
            self.step(learner, &example)?;
            if self.seen % self.snapshot_every == 0 {
                let snapshot = self.snapshot(learner, start);
                self.snapshots.push(snapshot);
                self.window_seen = 0;
                self.window_correct = 0;
            }
        }
        self.elapsed_secs += start.elapsed().as_secs_f64();
        Ok(())
    }

    fn snapshot<L: Learner + ?Sized>(&self, learner: &L, start: Instant) -> Snapshot {
        Snapshot {
            instances_seen: self.seen,
            cumulative_accuracy: self.cumulative_accuracy(),
            window_accuracy: ratio(self.window_correct, self.window_seen),
            counters: learner.counters(),
            census: learner.census(),
            estimated_model_bytes: learner.estimated_bytes(),
            wall_time_secs: self.elapsed_secs + start.elapsed().as_secs_f64(),
        }
    }

    pub fn finish<L: Learner + ?Sized>(&self, learner: &L) -> PrequentialResult {
        let mut summary = self.snapshot(learner, Instant::now());
        summary.wall_time_secs = self.elapsed_secs;
        if self.window_seen == 0 {
            if let Some(last) = self.snapshots.last() {
                summary.window_accuracy = last.window_accuracy;
            }
        }
        PrequentialResult {
            snapshots: self.snapshots.clone(),
            summary,
            truncated: self.truncated,
        }
    }
}

fn ratio(hits: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

/// Runs `limit` test-then-train steps from a fresh evaluator.
pub fn run_prequential<L, S>(learner: &mut L, stream: &mut S, limit: u64, snapshot_every: u64) -> Result<PrequentialResult>
where
    L: Learner + ?Sized,
    S: StreamSource + ?Sized,
{
    let mut evaluator = PrequentialEvaluator::new(snapshot_every)?;
    evaluator.run_until(learner, stream, limit)?;
    Ok(evaluator.finish(learner))
}

/// Quantity a rank table orders algorithms by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Accuracy,
    ProxyEnergy,
    SplitEvaluations,
    ObserverUpdates,
    ModelBytes,
    WallTime,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Accuracy,
        Metric::ProxyEnergy,
        Metric::SplitEvaluations,
        Metric::ObserverUpdates,
        Metric::ModelBytes,
        Metric::WallTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::ProxyEnergy => "proxy_energy",
            Metric::SplitEvaluations => "split_evaluations",
            Metric::ObserverUpdates => "observer_updates",
            Metric::ModelBytes => "model_bytes",
            Metric::WallTime => "wall_time",
        }
    }

    pub fn higher_is_better(self) -> bool {
        self == Metric::Accuracy
    }

    pub fn value(self, s: &Snapshot) -> f64 {
        match self {
            Metric::Accuracy => s.cumulative_accuracy,
            Metric::ProxyEnergy => s.counters.proxy_energy() as f64,
            Metric::SplitEvaluations => s.counters.split_evaluations as f64,
            Metric::ObserverUpdates => s.counters.observer_updates as f64,
            Metric::ModelBytes => s.estimated_model_bytes as f64,
            Metric::WallTime => s.wall_time_secs,
        }
    }
}

/// Final state of one algorithm on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub algorithm: String,
    pub dataset: String,
    pub summary: Snapshot,
}

/// Ranks of `values` with 1 for the best; ties share their average rank.
pub fn rank_values(values: &[f64], higher_is_better: bool) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let ord = values[a].total_cmp(&values[b]);
        if higher_is_better {
            ord.reverse()
        } else {
            ord
        }
    });
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub metric: Metric,
    pub algorithms: Vec<String>,
    pub datasets: Vec<String>,
    /// `ranks[dataset][algorithm]`.
    pub ranks: Vec<Vec<f64>>,
    pub average_ranks: Vec<f64>,
}

impl RankTable {
    pub fn average_rank(&self, algorithm: &str) -> Option<f64> {
        let i = self.algorithms.iter().position(|a| a == algorithm)?;
        Some(self.average_ranks[i])
    }
}

impl fmt::Display for RankTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<12}", self.metric.name())?;
        for a in &self.algorithms {
            write!(f, " {a:>9}")?;
        }
        writeln!(f)?;
        for (dataset, row) in self.datasets.iter().zip(&self.ranks) {
            write!(f, "{dataset:<12}")?;
            for r in row {
                write!(f, " {r:>9.2}")?;
            }
            writeln!(f)?;
        }
        write!(f, "{:<12}", "average")?;
        for r in &self.average_ranks {
            write!(f, " {r:>9.2}")?;
        }
        writeln!(f)
    }
}

/// Per-dataset ranks of every algorithm plus their averages.
pub fn compare_runs(outcomes: &[RunOutcome], metric: Metric) -> Result<RankTable> {
    let mut grid: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    let mut algorithms: Vec<String> = Vec::new();
    for o in outcomes {
        if !algorithms.contains(&o.algorithm) {
            algorithms.push(o.algorithm.clone());
        }
        let row = grid.entry(o.dataset.as_str()).or_default();
        if row.insert(o.algorithm.as_str(), metric.value(&o.summary)).is_some() {
            return Err(Error::MismatchedDatasets(format!(
                "{} appears twice on {}",
                o.algorithm, o.dataset
            )));
        }
    }
    if algorithms.len() < 2 {
        return Err(Error::InvalidConfig("ranking needs at least two algorithms".into()));
    }
    let expected: BTreeSet<&str> = algorithms.iter().map(String::as_str).collect();
    let mut ranks = Vec::with_capacity(grid.len());
    for (dataset, row) in &grid {
        let present: BTreeSet<&str> = row.keys().copied().collect();
        if present != expected {
            return Err(Error::MismatchedDatasets(format!(
                "dataset {dataset} has results for {present:?}, expected {expected:?}"
            )));
        }
        let values: Vec<f64> = algorithms.iter().map(|a| row[a.as_str()]).collect();
        ranks.push(rank_values(&values, metric.higher_is_better()));
    }
    let n = ranks.len().max(1) as f64;
    let average_ranks = (0..algorithms.len())
        .map(|i| ranks.iter().map(|r| r[i]).sum::<f64>() / n)
        .collect();
    Ok(RankTable {
        metric,
        algorithms,
        datasets: grid.keys().map(|d| d.to_string()).collect(),
        ranks,
        average_ranks,
    })
}
