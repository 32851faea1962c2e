//! C ABI over the greenstream learners, generators and evaluator.
//!
//! Learners and streams are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`GsStatus`]; on failure the
//! message is available from [`gs_last_error_message`] on the same thread.
//! Instances cross the boundary as `double` arrays in schema order, with
//! nominal values given as their integral index.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use greenstream::eval::PrequentialEvaluator;
use greenstream::generators::{make_generator, GeneratorConfig, GeneratorKind};
use greenstream::io::{load_dataset, load_model, save_model};
use greenstream::{
    Algorithm, AttributeKind, AttributeSpec, Error, Instance, LabeledExample, Learner, Model, ModelSpec, Schema,
    StreamSource, TreeConfig, Value,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SchemaMismatch = 3,
    Io = 4,
    Parse = 5,
    VersionMismatch = 6,
    Corrupt = 7,
    /// A finite stream has no more examples.
    Exhausted = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsAlgorithm {
    Ht = 0,
    Efdt = 1,
    Gaht = 2,
    OzaBag = 3,
    OzaBoost = 4,
}

impl From<GsAlgorithm> for Algorithm {
    fn from(a: GsAlgorithm) -> Self {
        match a {
            GsAlgorithm::Ht => Algorithm::Ht,
            GsAlgorithm::Efdt => Algorithm::Efdt,
            GsAlgorithm::Gaht => Algorithm::Gaht,
            GsAlgorithm::OzaBag => Algorithm::OzaBag,
            GsAlgorithm::OzaBoost => Algorithm::OzaBoost,
        }
    }
}

/// Learner hyperparameters; start from [`gs_learner_config_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsLearnerConfig {
    pub algorithm: GsAlgorithm,
    /// Ensemble member type, `GS_ALGORITHM_HT` or `GS_ALGORITHM_GAHT`.
    pub base_learner: GsAlgorithm,
    pub members: usize,
    pub nmin: u64,
    pub delta: f64,
    pub tau: f64,
    pub deactivate_threshold: f64,
    pub grow_fast_threshold: f64,
    pub seed: u64,
}

impl GsLearnerConfig {
    fn spec(&self) -> ModelSpec {
        ModelSpec {
            algorithm: self.algorithm.into(),
            base: self.base_learner.into(),
            members: self.members,
            tree: TreeConfig {
                nmin: self.nmin,
                delta: self.delta,
                tau: self.tau,
            },
            deactivate_threshold: self.deactivate_threshold,
            grow_fast_threshold: self.grow_fast_threshold,
            seed: self.seed,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GsCounters {
    pub split_evaluations: u64,
    pub gain_computations: u64,
    pub observer_updates: u64,
    pub traversal_steps: u64,
    pub instances_processed: u64,
    pub proxy_energy: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GsCensus {
    pub total_nodes: u64,
    pub split_nodes: u64,
    pub active_leaves: u64,
    pub inactive_leaves: u64,
    pub fast_nodes: u64,
    pub estimated_bytes: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GsSchemaInfo {
    pub attribute_count: usize,
    pub class_count: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GsRunSummary {
    pub instances_seen: u64,
    pub accuracy: f64,
    /// Nonzero when the stream ended before the limit.
    pub truncated: u8,
}

/// Opaque learner handle.
pub struct GsLearner {
    model: Model,
}

/// Opaque stream handle.
pub struct GsStream {
    source: Box<dyn StreamSource>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GsStatus {
    match e {
        Error::SchemaMismatch(_) | Error::InvalidSchema(_) | Error::ObserverKind { .. } => GsStatus::SchemaMismatch,
        Error::Io(_) => GsStatus::Io,
        Error::Parse { .. } | Error::Json(_) => GsStatus::Parse,
        Error::VersionMismatch { .. } => GsStatus::VersionMismatch,
        Error::Corrupt(_) => GsStatus::Corrupt,
        _ => GsStatus::InvalidArgument,
    }
}

struct Failure(GsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn fail(status: GsStatus, message: impl Into<String>) -> Failure {
    Failure(status, message.into())
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            GsStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(GsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(GsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(GsStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(GsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(GsStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn to_instance(schema: &Schema, values: &[f64]) -> Result<Instance, Failure> {
    if values.len() != schema.attribute_count() {
        return Err(fail(
            GsStatus::SchemaMismatch,
            format!("expected {} values, got {}", schema.attribute_count(), values.len()),
        ));
    }
    let values = values
        .iter()
        .enumerate()
        .map(|(i, &x)| match schema.kind(i) {
            AttributeKind::Numeric => Ok(Value::Numeric(x)),
            AttributeKind::Nominal { .. } if x >= 0.0 && x.fract() == 0.0 && x <= f64::from(u32::MAX) => {
                Ok(Value::Nominal(x as u32))
            }
            AttributeKind::Nominal { .. } => Err(fail(
                GsStatus::SchemaMismatch,
                format!("attribute {i} is nominal but got {x}"),
            )),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Instance::new(values))
}

fn from_instance(instance: &Instance, out: &mut [f64]) {
    for (o, v) in out.iter_mut().zip(&instance.values) {
        *o = v.as_f64();
    }
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn gs_learner_config_default(algorithm: GsAlgorithm) -> GsLearnerConfig {
    let spec = ModelSpec::new(algorithm.into());
    GsLearnerConfig {
        algorithm,
        base_learner: GsAlgorithm::Ht,
        members: spec.members,
        nmin: spec.tree.nmin,
        delta: spec.tree.delta,
        tau: spec.tree.tau,
        deactivate_threshold: spec.deactivate_threshold,
        grow_fast_threshold: spec.grow_fast_threshold,
        seed: spec.seed,
    }
}

fn boxed_learner(model: Model, out: *mut *mut GsLearner) {
    // SAFETY: callers checked `out` for null.
    unsafe { *out = Box::into_raw(Box::new(GsLearner { model })) };
}

/// Creates a learner for a schema given as per-attribute value counts, where
/// 0 marks a numeric attribute.
///
/// # Safety
/// `value_counts` must point to `attribute_count` readable values and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_new(
    value_counts: *const u32,
    attribute_count: usize,
    class_count: u32,
    config: *const GsLearnerConfig,
    out: *mut *mut GsLearner,
) -> GsStatus {
    guard(|| {
        borrow_mut(out, "out")?;
        let counts = slice(value_counts, attribute_count, "value_counts")?;
        let config = borrow(config, "config")?;
        let attributes = counts
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == 0 {
                    AttributeSpec::numeric(format!("a{i}"))
                } else {
                    AttributeSpec::nominal(format!("a{i}"), v)
                }
            })
            .collect();
        let schema = Schema::new(attributes, class_count)?;
        boxed_learner(config.spec().build(schema)?, out);
        Ok(())
    })
}

/// Creates a learner matching a stream's schema.
///
/// # Safety
/// `stream` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_new_for_stream(
    stream: *const GsStream,
    config: *const GsLearnerConfig,
    out: *mut *mut GsLearner,
) -> GsStatus {
    guard(|| {
        borrow_mut(out, "out")?;
        let stream = borrow(stream, "stream")?;
        let config = borrow(config, "config")?;
        boxed_learner(config.spec().build(stream.source.schema().clone())?, out);
        Ok(())
    })
}

/// # Safety
/// `learner` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_free(learner: *mut GsLearner) {
    if !learner.is_null() {
        drop(Box::from_raw(learner));
    }
}

/// # Safety
/// `values` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_train(
    learner: *mut GsLearner,
    values: *const f64,
    len: usize,
    label: u32,
    weight: f64,
) -> GsStatus {
    guard(|| {
        let learner = borrow_mut(learner, "learner")?;
        let instance = to_instance(learner.model.schema(), slice(values, len, "values")?)?;
        learner.model.train(&LabeledExample { instance, label }, weight)?;
        Ok(())
    })
}

/// Writes per-class votes into `votes` (capacity `votes_len`, at least the
/// class count) and the predicted class into `class_out` when non-null.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_predict(
    learner: *const GsLearner,
    values: *const f64,
    len: usize,
    votes: *mut f64,
    votes_len: usize,
    class_out: *mut u32,
) -> GsStatus {
    guard(|| {
        let learner = borrow(learner, "learner")?;
        let instance = to_instance(learner.model.schema(), slice(values, len, "values")?)?;
        let v = learner.model.predict(&instance)?;
        if !votes.is_null() {
            if votes_len < v.len() {
                return Err(fail(
                    GsStatus::BufferTooSmall,
                    format!("votes buffer holds {votes_len}, need {}", v.len()),
                ));
            }
            std::slice::from_raw_parts_mut(votes, v.len()).copy_from_slice(&v);
        }
        if let Some(c) = class_out.as_mut() {
            *c = greenstream::tree::argmax(&v) as u32;
        }
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_schema(learner: *const GsLearner, out: *mut GsSchemaInfo) -> GsStatus {
    guard(|| {
        let schema = borrow(learner, "learner")?.model.schema();
        *borrow_mut(out, "out")? = GsSchemaInfo {
            attribute_count: schema.attribute_count(),
            class_count: schema.class_count(),
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_counters(learner: *const GsLearner, out: *mut GsCounters) -> GsStatus {
    guard(|| {
        let c = borrow(learner, "learner")?.model.counters();
        *borrow_mut(out, "out")? = GsCounters {
            split_evaluations: c.split_evaluations,
            gain_computations: c.gain_computations,
            observer_updates: c.observer_updates,
            traversal_steps: c.traversal_steps,
            instances_processed: c.instances_processed,
            proxy_energy: c.proxy_energy(),
        };
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_census(learner: *const GsLearner, out: *mut GsCensus) -> GsStatus {
    guard(|| {
        let learner = borrow(learner, "learner")?;
        let c = learner.model.census();
        *borrow_mut(out, "out")? = GsCensus {
            total_nodes: c.total as u64,
            split_nodes: c.split_nodes as u64,
            active_leaves: c.active_leaves as u64,
            inactive_leaves: c.deactivated_leaves as u64,
            fast_nodes: c.fast_nodes as u64,
            estimated_bytes: learner.model.estimated_bytes(),
        };
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_save(learner: *const GsLearner, path: *const c_char) -> GsStatus {
    guard(|| {
        let learner = borrow(learner, "learner")?;
        save_model(&learner.model, Path::new(text(path, "path")?))?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated UTF-8 string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_learner_load(path: *const c_char, out: *mut *mut GsLearner) -> GsStatus {
    guard(|| {
        borrow_mut(out, "out")?;
        let model = load_model(Path::new(text(path, "path")?))?;
        boxed_learner(model, out);
        Ok(())
    })
}

fn boxed_stream(source: Box<dyn StreamSource>, out: *mut *mut GsStream) {
    // SAFETY: callers checked `out` for null.
    unsafe { *out = Box::into_raw(Box::new(GsStream { source })) };
}

/// Opens a synthetic generator by name, e.g. `"led"` or `"randomtree"`.
///
/// # Safety
/// `name` must be a NUL-terminated UTF-8 string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_stream_synthetic(name: *const c_char, seed: u64, out: *mut *mut GsStream) -> GsStatus {
    guard(|| {
        borrow_mut(out, "out")?;
        let kind: GeneratorKind = text(name, "name")?.parse()?;
        boxed_stream(Box::new(make_generator(&GeneratorConfig::new(kind, seed))?), out);
        Ok(())
    })
}

/// Loads an ARFF or CSV file; a negative `class_index` selects the last column.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_stream_open_file(path: *const c_char, class_index: i64, out: *mut *mut GsStream) -> GsStatus {
    guard(|| {
        borrow_mut(out, "out")?;
        let class_index = usize::try_from(class_index).ok();
        let dataset = load_dataset(Path::new(text(path, "path")?), class_index)?;
        boxed_stream(Box::new(dataset.into_stream()), out);
        Ok(())
    })
}

/// # Safety
/// `stream` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gs_stream_free(stream: *mut GsStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_stream_schema(stream: *const GsStream, out: *mut GsSchemaInfo) -> GsStatus {
    guard(|| {
        let schema = borrow(stream, "stream")?.source.schema();
        *borrow_mut(out, "out")? = GsSchemaInfo {
            attribute_count: schema.attribute_count(),
            class_count: schema.class_count(),
        };
        Ok(())
    })
}

/// Draws the next example into `values` (capacity `len`) and `label`.
/// Returns `GS_STATUS_EXHAUSTED` once a finite stream ends.
///
/// # Safety
/// `values` must hold `len` writable doubles and `label` be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_stream_next(stream: *mut GsStream, values: *mut f64, len: usize, label: *mut u32) -> GsStatus {
    guard(|| {
        let stream = borrow_mut(stream, "stream")?;
        let label = borrow_mut(label, "label")?;
        let d = stream.source.schema().attribute_count();
        if len < d || (d > 0 && values.is_null()) {
            return Err(fail(GsStatus::BufferTooSmall, format!("values buffer holds {len}, need {d}")));
        }
        let example = stream
            .source
            .next_example()
            .ok_or_else(|| fail(GsStatus::Exhausted, "stream is exhausted"))?;
        from_instance(&example.instance, std::slice::from_raw_parts_mut(values, d));
        *label = example.label;
        Ok(())
    })
}

/// Test-then-train for up to `limit` examples of `stream`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_run_prequential(
    learner: *mut GsLearner,
    stream: *mut GsStream,
    limit: u64,
    snapshot_every: u64,
    out: *mut GsRunSummary,
) -> GsStatus {
    guard(|| {
        let learner = borrow_mut(learner, "learner")?;
        let stream = borrow_mut(stream, "stream")?;
        let out = borrow_mut(out, "out")?;
        let mut evaluator = PrequentialEvaluator::new(snapshot_every)?;
        evaluator.run_until(&mut learner.model, &mut stream.source, limit)?;
        let result = evaluator.finish(&learner.model);
        *out = GsRunSummary {
            instances_seen: result.summary.instances_seen,
            accuracy: result.summary.cumulative_accuracy,
            truncated: u8::from(result.truncated),
        };
        Ok(())
    })
}
