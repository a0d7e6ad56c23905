//! C ABI over the linkpred toolkit: opaque handles for datasets and
//! score maps, integer status codes, and a thread-local last-error
//! message. Every function catches panics at the boundary.
//!
//! Ownership: functions returning a handle through an out-parameter
//! transfer ownership to the caller, who must release it with the
//! matching `*_free`. Strings returned by `lp_*_name`-style functions
//! must be released with `lp_string_free`. The pointer returned by
//! `lp_last_error` stays owned by the library and is valid until the
//! next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use linkpred::config::{ExperimentConfig, PredictorName};
use linkpred::dynamic_predictors::{EwmaConfig, SbmConfig};
use linkpred::evaluation::evaluate_transition;
use linkpred::experiment::{
    build_dataset, compute_predictor_map, run_experiment_on, PredictorParams,
};
use linkpred::fusion::{build_augmented_friendship, fuse_current, fuse_predicted, Aggregate};
use linkpred::graph::filter_by_aggregate_degree;
use linkpred::ingest::{ingest_edges, IngestOptions};
use linkpred::static_predictors::{
    adamic_adar, katz, normalize_scores, CandidatePairs, KatzConfig,
};
use linkpred::synth::{generate_synthetic, SyntheticSpec};
use linkpred::{dataset_io, DualDataset, Error, Pair, ScoreMap};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum LpStatus {
    LpOk = 0,
    /// File could not be read or written.
    LpErrIo = 1,
    /// Malformed input file or dataset format.
    LpErrParse = 2,
    /// Invalid parameter, configuration or index.
    LpErrInvalid = 3,
    /// An operation produced or received an empty result set.
    LpErrEmpty = 4,
    /// A requested metric is undefined on the given pools.
    LpErrMetric = 5,
    /// A required pointer argument was null or not valid UTF-8.
    LpErrNull = 6,
    /// Internal failure.
    LpErrInternal = 7,
}

/// Metric aggregation across transitions for `lp_run_sweep`.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum LpAggregate {
    /// Use whatever the config file declares.
    LpAggregateConfig = 0,
    LpAggregateMean = 1,
    LpAggregatePooled = 2,
}

/// Opaque dataset handle.
pub struct LpDataset(DualDataset);

/// Opaque score map handle.
pub struct LpScores(ScoreMap);

/// Predictor parameters for `lp_predict` and `lp_augmented_friendship`.
#[repr(C)]
#[derive(Copy, Clone, Debug)]
pub struct LpPredictorParams {
    /// EWMA smoothing weight in (0,1].
    pub lambda: f64,
    /// Katz decay in (0,1).
    pub beta: f64,
    /// Katz series truncation length, at least 1.
    pub max_length: u32,
    /// Block count for the block-model predictor.
    pub blocks: u32,
    /// Weight on the block score against the smoothed adjacency, in [0,1].
    pub mix: f64,
    /// Seed for the block-model clustering.
    pub seed: u64,
}

/// Evaluation result for one transition.
#[repr(C)]
#[derive(Copy, Clone, Debug, Default)]
pub struct LpEvalReport {
    pub prauc_new: f64,
    pub auc_prev: f64,
    pub gmauc: f64,
    pub p_new: u64,
    pub n_new: u64,
    pub p_prev: u64,
    pub n_prev: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let cstring = CString::new(msg.replace('\0', "?"))
        .unwrap_or_else(|_| CString::new("invalid error message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(err: &Error) -> LpStatus {
    match err {
        Error::Io { .. } => LpStatus::LpErrIo,
        Error::MalformedLine { .. } | Error::DatasetFormat { .. } | Error::NodeCollision(_) => {
            LpStatus::LpErrParse
        }
        Error::OutOfRange { .. }
        | Error::InvalidParameter(_)
        | Error::InvalidConfig(_)
        | Error::SyntheticInfeasible(_) => LpStatus::LpErrInvalid,
        Error::EmptyFilterResult { .. } | Error::EmptyScores => LpStatus::LpErrEmpty,
        Error::UndefinedMetric(_) => LpStatus::LpErrMetric,
        Error::EvalContext { source, .. } => status_of(source),
    }
}

fn fail(err: Error) -> LpStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn run_guarded<F: FnOnce() -> LpStatus>(f: F) -> LpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            LpStatus::LpErrInternal
        }
    }
}

fn null_error(what: &str) -> LpStatus {
    set_error(format!("{what} must not be null"));
    LpStatus::LpErrNull
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn path_arg(ptr: *const c_char, what: &str) -> Result<PathBuf, LpStatus> {
    if ptr.is_null() {
        return Err(null_error(what));
    }
    match CStr::from_ptr(ptr).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => {
            set_error(format!("{what} is not valid UTF-8"));
            Err(LpStatus::LpErrNull)
        }
    }
}

fn params_of(p: &LpPredictorParams) -> PredictorParams {
    PredictorParams {
        ewma: EwmaConfig { lambda: p.lambda },
        katz: KatzConfig {
            beta: p.beta,
            max_length: p.max_length as usize,
        },
        sbm: SbmConfig {
            blocks: p.blocks as usize,
            mix: p.mix,
            seed: p.seed,
        },
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent error on this thread, or null if none.
#[no_mangle]
pub extern "C" fn lp_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Defaults matching the toolkit's configuration defaults.
#[no_mangle]
pub extern "C" fn lp_default_params() -> LpPredictorParams {
    LpPredictorParams {
        lambda: 0.5,
        beta: 0.05,
        max_length: 4,
        blocks: 10,
        mix: 0.5,
        seed: 42,
    }
}

/// Ingest raw friendship and interaction edge files.
///
/// # Safety
/// String arguments must be valid NUL-terminated paths; `out` must be a
/// valid location to store the new handle.
#[no_mangle]
pub unsafe extern "C" fn lp_dataset_ingest(
    friend_file: *const c_char,
    interaction_file: *const c_char,
    start: i64,
    end: i64,
    interval_secs: i64,
    out: *mut *mut LpDataset,
) -> LpStatus {
    run_guarded(|| {
        if out.is_null() {
            return null_error("out");
        }
        let friend = match path_arg(friend_file, "friend_file") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let inter = match path_arg(interaction_file, "interaction_file") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let opts = IngestOptions {
            start,
            end,
            interval_secs,
        };
        match ingest_edges(&friend, &inter, opts) {
            Ok((ds, _)) => {
                *out = Box::into_raw(Box::new(LpDataset(ds)));
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Load a serialized dataset file.
///
/// # Safety
/// See `lp_dataset_ingest`.
#[no_mangle]
pub unsafe extern "C" fn lp_dataset_load(
    path: *const c_char,
    out: *mut *mut LpDataset,
) -> LpStatus {
    run_guarded(|| {
        if out.is_null() {
            return null_error("out");
        }
        let path = match path_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match dataset_io::load(&path) {
            Ok(ds) => {
                *out = Box::into_raw(Box::new(LpDataset(ds)));
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Save a dataset to the versioned text format.
///
/// # Safety
/// `ds` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lp_dataset_save(ds: *const LpDataset, path: *const c_char) -> LpStatus {
    run_guarded(|| {
        let Some(ds) = ds.as_ref() else {
            return null_error("ds");
        };
        let path = match path_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match dataset_io::save(&ds.0, &path) {
            Ok(()) => LpStatus::LpOk,
            Err(e) => fail(e),
        }
    })
}

/// Generate a synthetic coupled dataset.
///
/// # Safety
/// `out` must be a valid location to store the new handle.
#[no_mangle]
pub unsafe extern "C" fn lp_dataset_synthetic(
    nodes: u32,
    snapshots: u32,
    friendship_growth: u32,
    q_friend: f64,
    q_nonfriend: f64,
    persistence_boost: f64,
    seed: u64,
    out: *mut *mut LpDataset,
) -> LpStatus {
    run_guarded(|| {
        if out.is_null() {
            return null_error("out");
        }
        let spec = SyntheticSpec {
            nodes: nodes as usize,
            snapshots: snapshots as usize,
            friendship_growth: friendship_growth as usize,
            q_friend,
            q_nonfriend,
            persistence_boost,
        };
        match generate_synthetic(&spec, seed) {
            Ok(ds) => {
                *out = Box::into_raw(Box::new(LpDataset(ds)));
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Keep only nodes with aggregate friendship degree >= threshold,
/// producing a new dataset handle.
///
/// # Safety
/// `ds` must be a live handle; `out` a valid store location.
#[no_mangle]
pub unsafe extern "C" fn lp_dataset_filter_degree(
    ds: *const LpDataset,
    threshold: u32,
    out: *mut *mut LpDataset,
) -> LpStatus {
    run_guarded(|| {
        let Some(ds) = ds.as_ref() else {
            return null_error("ds");
        };
        if out.is_null() {
            return null_error("out");
        }
        match filter_by_aggregate_degree(&ds.0, threshold as usize) {
            Ok(filtered) => {
                *out = Box::into_raw(Box::new(LpDataset(filtered)));
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `ds` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lp_dataset_node_count(ds: *const LpDataset) -> u32 {
    ds.as_ref().map_or(0, |d| d.0.node_count() as u32)
}

/// # Safety
/// `ds` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lp_dataset_snapshot_count(ds: *const LpDataset) -> u32 {
    ds.as_ref().map_or(0, |d| d.0.snapshot_count() as u32)
}

/// Original identifier of a node; release with `lp_string_free`.
///
/// # Safety
/// `ds` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lp_dataset_node_name(ds: *const LpDataset, id: u32) -> *mut c_char {
    let Some(ds) = ds.as_ref() else {
        return std::ptr::null_mut();
    };
    if id as usize >= ds.0.node_count() {
        return std::ptr::null_mut();
    }
    CString::new(ds.0.node_name(id))
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Fraction of friend pairs at `t` that interact at `t + 1`.
///
/// # Safety
/// `ds` must be a live handle; `out` a valid f64 location.
#[no_mangle]
pub unsafe extern "C" fn lp_fraction_friends_interacting(
    ds: *const LpDataset,
    t: u32,
    out: *mut f64,
) -> LpStatus {
    run_guarded(|| {
        let Some(ds) = ds.as_ref() else {
            return null_error("ds");
        };
        if out.is_null() {
            return null_error("out");
        }
        match ds.0.fraction_friends_interacting(t as usize) {
            Ok(v) => {
                *out = v;
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Fraction of interactions at `t + 1` occurring between friends at `t`.
///
/// # Safety
/// `ds` must be a live handle; `out` a valid f64 location.
#[no_mangle]
pub unsafe extern "C" fn lp_fraction_interactions_between_friends(
    ds: *const LpDataset,
    t: u32,
    out: *mut f64,
) -> LpStatus {
    run_guarded(|| {
        let Some(ds) = ds.as_ref() else {
            return null_error("ds");
        };
        if out.is_null() {
            return null_error("out");
        }
        match ds.0.fraction_interactions_between_friends(t as usize) {
            Ok(v) => {
                *out = v;
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

fn predictor_from(name: &str) -> Result<PredictorName, LpStatus> {
    PredictorName::parse(name).map_err(|e| {
        let s = status_of(&e);
        set_error(e.to_string());
        s
    })
}

/// Score interactions at `t + 1` with one of the dynamic predictors
/// ("ewma", "ts_aa", "ts_katz", "dsbm"). AA/Katz-family outputs are
/// normalized onto [0,1].
///
/// # Safety
/// Pointer arguments must be valid; `out` receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn lp_predict(
    ds: *const LpDataset,
    predictor: *const c_char,
    t: u32,
    params: *const LpPredictorParams,
    out: *mut *mut LpScores,
) -> LpStatus {
    run_guarded(|| {
        let Some(ds) = ds.as_ref() else {
            return null_error("ds");
        };
        if predictor.is_null() {
            return null_error("predictor");
        }
        if out.is_null() {
            return null_error("out");
        }
        let name = match CStr::from_ptr(predictor).to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("predictor is not valid UTF-8".into());
                return LpStatus::LpErrNull;
            }
        };
        let p = params
            .as_ref()
            .copied()
            .unwrap_or_else(|| lp_default_params());
        let predictor = match predictor_from(name) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match compute_predictor_map(&ds.0, predictor, t as usize, &params_of(&p)) {
            Ok(map) => {
                *out = Box::into_raw(Box::new(LpScores(map)));
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Augmented friendship matrix at time `t`: edges stay 1, zeros are
/// replaced by normalized AA (`use_katz = false`) or Katz scores.
///
/// # Safety
/// Pointer arguments must be valid; `out` receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn lp_augmented_friendship(
    ds: *const LpDataset,
    t: u32,
    use_katz: bool,
    params: *const LpPredictorParams,
    out: *mut *mut LpScores,
) -> LpStatus {
    run_guarded(|| {
        let Some(ds) = ds.as_ref() else {
            return null_error("ds");
        };
        if out.is_null() {
            return null_error("out");
        }
        let p = params
            .as_ref()
            .copied()
            .unwrap_or_else(|| lp_default_params());
        let result = (|| -> linkpred::Result<ScoreMap> {
            let friends = ds.0.friendships().snapshot(t as usize)?;
            let raw = if use_katz {
                katz(friends, &params_of(&p).katz, CandidatePairs::All)?
            } else {
                adamic_adar(friends, CandidatePairs::All)?
            };
            let predicted = if raw.is_empty() {
                raw
            } else {
                normalize_scores(&raw)?
            };
            build_augmented_friendship(friends, &predicted)
        })();
        match result {
            Ok(map) => {
                *out = Box::into_raw(Box::new(LpScores(map)));
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Convex combination with the binary current-friendship matrix at `t`.
///
/// # Safety
/// Handles must be live; `out` receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn lp_fuse_current(
    scores: *const LpScores,
    ds: *const LpDataset,
    t: u32,
    alpha: f64,
    out: *mut *mut LpScores,
) -> LpStatus {
    run_guarded(|| {
        let Some(scores) = scores.as_ref() else {
            return null_error("scores");
        };
        let Some(ds) = ds.as_ref() else {
            return null_error("ds");
        };
        if out.is_null() {
            return null_error("out");
        }
        let result =
            ds.0.friendships()
                .snapshot(t as usize)
                .and_then(|friends| fuse_current(&scores.0, friends, alpha));
        match result {
            Ok(map) => {
                *out = Box::into_raw(Box::new(LpScores(map)));
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Convex combination with an augmented friendship matrix.
///
/// # Safety
/// Handles must be live; `out` receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn lp_fuse_predicted(
    scores: *const LpScores,
    augmented: *const LpScores,
    alpha: f64,
    out: *mut *mut LpScores,
) -> LpStatus {
    run_guarded(|| {
        let Some(scores) = scores.as_ref() else {
            return null_error("scores");
        };
        let Some(augmented) = augmented.as_ref() else {
            return null_error("augmented");
        };
        if out.is_null() {
            return null_error("out");
        }
        match fuse_predicted(&scores.0, &augmented.0, alpha) {
            Ok(map) => {
                *out = Box::into_raw(Box::new(LpScores(map)));
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Evaluate a score map against the interactions at `t + 1`.
///
/// # Safety
/// Handles must be live; `report` must be a valid store location.
#[no_mangle]
pub unsafe extern "C" fn lp_evaluate(
    scores: *const LpScores,
    ds: *const LpDataset,
    t: u32,
    report: *mut LpEvalReport,
) -> LpStatus {
    run_guarded(|| {
        let Some(scores) = scores.as_ref() else {
            return null_error("scores");
        };
        let Some(ds) = ds.as_ref() else {
            return null_error("ds");
        };
        if report.is_null() {
            return null_error("report");
        }
        match evaluate_transition(&scores.0, ds.0.interactions(), t as usize) {
            Ok(row) => {
                *report = LpEvalReport {
                    prauc_new: row.prauc_new,
                    auc_prev: row.auc_prev,
                    gmauc: row.gmauc,
                    p_new: row.p_new,
                    n_new: row.n_new,
                    p_prev: row.p_prev,
                    n_prev: row.n_prev,
                };
                LpStatus::LpOk
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of stored (nonzero) pair scores.
///
/// # Safety
/// `scores` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lp_scores_len(scores: *const LpScores) -> u64 {
    scores.as_ref().map_or(0, |s| s.0.len() as u64)
}

/// Score of the unordered pair (u, v); 0 when unscored. Returns NaN for
/// an invalid pair.
///
/// # Safety
/// `scores` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lp_scores_get(scores: *const LpScores, u: u32, v: u32) -> f64 {
    let Some(scores) = scores.as_ref() else {
        return f64::NAN;
    };
    if u == v || u as usize >= scores.0.node_count() || v as usize >= scores.0.node_count() {
        return f64::NAN;
    }
    scores.0.get(Pair::new(u, v))
}

/// Write the `u v score` export of a score map.
///
/// # Safety
/// `scores` must be a live handle; `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lp_scores_export(
    scores: *const LpScores,
    path: *const c_char,
) -> LpStatus {
    run_guarded(|| {
        let Some(scores) = scores.as_ref() else {
            return null_error("scores");
        };
        let path = match path_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let result = std::fs::File::create(&path)
            .map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })
            .and_then(|f| {
                let mut w = std::io::BufWriter::new(f);
                scores.0.export(&mut w).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })
            });
        match result {
            Ok(()) => LpStatus::LpOk,
            Err(e) => fail(e),
        }
    })
}

/// Run a full sweep from a config file, writing results.csv, summary.md,
/// fractions.csv and run_meta.toml. Null overrides keep the config's
/// values; `override_seed = false` keeps the config's seed.
///
/// # Safety
/// `config_path` must be valid; `out_dir` may be null.
#[no_mangle]
pub unsafe extern "C" fn lp_run_sweep(
    config_path: *const c_char,
    out_dir: *const c_char,
    seed: u64,
    override_seed: bool,
    aggregate: LpAggregate,
) -> LpStatus {
    run_guarded(|| {
        let config_path = match path_arg(config_path, "config_path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        let out_override: Option<PathBuf> = if out_dir.is_null() {
            None
        } else {
            match path_arg(out_dir, "out_dir") {
                Ok(p) => Some(p),
                Err(s) => return s,
            }
        };
        let result = (|| -> linkpred::Result<()> {
            let mut cfg = ExperimentConfig::from_path(Path::new(&config_path))?;
            if override_seed {
                cfg.run.seed = seed;
            }
            if let Some(dir) = out_override {
                cfg.run.out_dir = dir;
            }
            match aggregate {
                LpAggregate::LpAggregateConfig => {}
                LpAggregate::LpAggregateMean => cfg.run.aggregate = Aggregate::Mean,
                LpAggregate::LpAggregatePooled => cfg.run.aggregate = Aggregate::Pooled,
            }
            let ds = build_dataset(&cfg)?;
            let output = run_experiment_on(&ds, &cfg)?;
            output.write(&cfg.run.out_dir, &cfg)
        })();
        match result {
            Ok(()) => LpStatus::LpOk,
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `ds` must be a handle obtained from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn lp_dataset_free(ds: *mut LpDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// # Safety
/// `scores` must be a handle obtained from this library, or null.
#[no_mangle]
pub unsafe extern "C" fn lp_scores_free(scores: *mut LpScores) {
    if !scores.is_null() {
        drop(Box::from_raw(scores));
    }
}

/// # Safety
/// `s` must come from a string-returning function of this library.
#[no_mangle]
pub unsafe extern "C" fn lp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
