//! C ABI over `sfembed`.
//!
//! Every fallible function returns an [`SfStatus`]; on failure a message is
//! kept per thread and readable through [`sf_last_error`]. Objects are
//! opaque handles owned by the caller and released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sfembed::bounds::sphere_bounds;
use sfembed::embedding::write_embedding;
use sfembed::generator::{generate_pa, PaConfig};
use sfembed::graph::{load_edge_list, Graph};
use sfembed::pipeline::{self, EmbedConfig, Method};
use sfembed::powerlaw::fit_power_law;
use sfembed::reconstruct::{reconstruct, sweep_epsilon, EpsilonGrid};
use sfembed::{Embedding, Error};

/// Outcome of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    EmptyGraph = 5,
    DimensionMismatch = 6,
    ZeroRowSum = 7,
    Disconnected = 8,
    NoConvergence = 9,
    Unfittable = 10,
    InsufficientData = 11,
    UnknownLabel = 12,
    Panic = 13,
}

impl From<&Error> for SfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Io(_) => SfStatus::Io,
            Error::Parse { .. } => SfStatus::Parse,
            Error::EmptyGraph => SfStatus::EmptyGraph,
            Error::InvalidConfig(_) => SfStatus::InvalidArgument,
            Error::DimensionMismatch { .. } => SfStatus::DimensionMismatch,
            Error::ZeroRowSum { .. } => SfStatus::ZeroRowSum,
            Error::Disconnected { .. } => SfStatus::Disconnected,
            Error::NoConvergence { .. } => SfStatus::NoConvergence,
            Error::Unfittable(_) => SfStatus::Unfittable,
            Error::InsufficientData(_) => SfStatus::InsufficientData,
            Error::UnknownLabel(_) => SfStatus::UnknownLabel,
        }
    }
}

/// Opaque graph handle.
pub struct SfGraph(Graph);

/// Opaque embedding handle; rows follow the dense vertex order of the graph
/// it was computed from.
pub struct SfEmbedding(Embedding);

/// Options for walk-based embeddings.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfWalkerOptions {
    pub dim: usize,
    pub beta: f64,
    pub walks_per_vertex: usize,
    pub walk_length: usize,
    pub window: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Uniform neighbor walks instead of degree-penalized ones.
    pub uniform_walks: bool,
    /// Single-threaded, reproducible training.
    pub deterministic: bool,
    pub workers: usize,
}

/// Best row of an ε sweep.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SfSweepBest {
    pub epsilon: f64,
    /// False when every reconstructed degree sequence was constant; the
    /// correlations are then NaN.
    pub defined: bool,
    pub pearson: f64,
    pub spearman: f64,
    pub kendall: f64,
    pub edge_count: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SfPowerLawFit {
    pub alpha: f64,
    pub d_min: usize,
    pub ks: f64,
    pub n_tail: usize,
    pub norm_const: f64,
}

/// Sphere-packing bounds, as base-2 logarithms.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SfBounds {
    pub k: usize,
    pub lower_log2: f64,
    pub upper_log2: f64,
    pub lower_density_log2: f64,
    pub upper_density_log2: f64,
    pub upper_valid: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Status(SfStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null() -> Failure {
    Failure::Status(SfStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfStatus::Ok,
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            SfStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            SfStatus::Panic
        }
    }
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a str, Failure> {
    if path.is_null() {
        return Err(null());
    }
    CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Failure::Status(SfStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(null)
}

/// Checks `out` before running `make`; `*out` is NULL unless it succeeds.
unsafe fn store<T>(out: *mut *mut T, make: impl FnOnce() -> Result<T, Failure>) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = ptr::null_mut();
    *out = Box::into_raw(Box::new(make()?));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a whitespace-separated edge list.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_load(path: *const c_char, out: *mut *mut SfGraph) -> SfStatus {
    guard(|| {
        store(out, || {
            let file = File::open(path_arg(path)?).map_err(Error::from)?;
            Ok(SfGraph(load_edge_list(BufReader::new(file))?))
        })
    })
}

/// Builds a graph from `count` edges `(a[i], b[i])` of vertex labels.
///
/// # Safety
/// `a` and `b` must point to `count` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_from_edges(a: *const u64, b: *const u64, count: usize, out: *mut *mut SfGraph) -> SfStatus {
    guard(|| {
        store(out, || {
            if count > 0 && (a.is_null() || b.is_null()) {
                return Err(null());
            }
            let (a, b) = if count == 0 {
                (&[][..], &[][..])
            } else {
                (std::slice::from_raw_parts(a, count), std::slice::from_raw_parts(b, count))
            };
            Ok(SfGraph(Graph::from_labeled_edges(a.iter().copied().zip(b.iter().copied()))?))
        })
    })
}

/// Preferential-attachment graph with `n` vertices, `m` edges per arrival.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_generate(n: usize, m: usize, seed: u64, out: *mut *mut SfGraph) -> SfStatus {
    guard(|| store(out, || Ok(SfGraph(generate_pa(&PaConfig { n, m, seed })?))))
}

/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_free(g: *mut SfGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_num_vertices(g: *const SfGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_num_edges(g: *const SfGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.num_edges())
}

/// Copies labels and degrees in dense vertex order; either buffer may be
/// NULL, and each must otherwise hold `len ≥ n` entries.
///
/// # Safety
/// Non-null buffers must be writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn sf_graph_vertices(g: *const SfGraph, labels: *mut u64, degrees: *mut usize, len: usize) -> SfStatus {
    guard(|| {
        let g = &handle(g)?.0;
        if len < g.n() {
            return Err(Error::DimensionMismatch { expected: g.n(), got: len }.into());
        }
        for v in 0..g.n() {
            if !labels.is_null() {
                *labels.add(v) = g.label(v);
            }
            if !degrees.is_null() {
                *degrees.add(v) = g.degree(v);
            }
        }
        Ok(())
    })
}

/// Spectral embedding; `baseline` selects the unpenalized adjacency
/// weights (and ignores `beta`).
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_embed_spectral(
    g: *const SfGraph,
    dim: usize,
    beta: f64,
    baseline: bool,
    seed: u64,
    tol: f64,
    out: *mut *mut SfEmbedding,
) -> SfStatus {
    guard(|| {
        let g = &handle(g)?.0;
        let cfg = EmbedConfig {
            method: if baseline { Method::Le } else { Method::DpSpectral },
            k: dim,
            beta,
            seed,
            tol,
            ..EmbedConfig::default()
        };
        store(out, || Ok(SfEmbedding(pipeline::embed(g, &cfg)?.embedding)))
    })
}

/// Walk-based embedding.
///
/// # Safety
/// `g` and `opts` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_embed_walker(g: *const SfGraph, opts: *const SfWalkerOptions, out: *mut *mut SfEmbedding) -> SfStatus {
    guard(|| {
        let g = &handle(g)?.0;
        let o = *handle(opts)?;
        let cfg = EmbedConfig {
            method: if o.uniform_walks { Method::Deepwalk } else { Method::DpWalker },
            k: o.dim,
            beta: o.beta,
            seed: o.seed,
            walks_per_vertex: o.walks_per_vertex,
            walk_length: o.walk_length,
            window: o.window,
            epochs: o.epochs,
            deterministic: o.deterministic,
            workers: o.workers.max(1),
            ..EmbedConfig::default()
        };
        store(out, || Ok(SfEmbedding(pipeline::embed(g, &cfg)?.embedding)))
    })
}

/// Default walker options.
#[no_mangle]
pub extern "C" fn sf_walker_options_default() -> SfWalkerOptions {
    let d = EmbedConfig { method: Method::DpWalker, ..EmbedConfig::default() };
    SfWalkerOptions {
        dim: d.k,
        beta: d.beta,
        walks_per_vertex: d.walks_per_vertex,
        walk_length: d.walk_length,
        window: d.window,
        epochs: d.epochs,
        seed: d.seed,
        uniform_walks: false,
        deterministic: true,
        workers: 1,
    }
}

/// # Safety
/// `e` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sf_embedding_free(e: *mut SfEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle; `n` and `k` writable or NULL.
#[no_mangle]
pub unsafe extern "C" fn sf_embedding_shape(e: *const SfEmbedding, n: *mut usize, k: *mut usize) -> SfStatus {
    guard(|| {
        let e = &handle(e)?.0;
        if !n.is_null() {
            *n = e.n();
        }
        if !k.is_null() {
            *k = e.k();
        }
        Ok(())
    })
}

/// Copies the row-major `n × k` matrix into `buf` (at least `n·k` values).
///
/// # Safety
/// `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_embedding_copy(e: *const SfEmbedding, buf: *mut f64, len: usize) -> SfStatus {
    guard(|| {
        let e = &handle(e)?.0;
        let values = e.as_slice();
        if buf.is_null() {
            return Err(null());
        }
        if len < values.len() {
            return Err(Error::DimensionMismatch { expected: values.len(), got: len }.into());
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// Writes the embedding in the text format, labelling rows with `g`.
///
/// # Safety
/// Handles must be live and `path` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn sf_embedding_write(e: *const SfEmbedding, g: *const SfGraph, path: *const c_char) -> SfStatus {
    guard(|| {
        let (e, g) = (&handle(e)?.0, &handle(g)?.0);
        let file = File::create(path_arg(path)?).map_err(Error::from)?;
        Ok(write_embedding(e, g.labels(), BufWriter::new(file))?)
    })
}

/// Reconstructed degrees at threshold `epsilon` into `degrees` (`len ≥ n`).
///
/// # Safety
/// `degrees` must be writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn sf_reconstruct_degrees(e: *const SfEmbedding, epsilon: f64, degrees: *mut usize, len: usize) -> SfStatus {
    guard(|| {
        let e = &handle(e)?.0;
        if degrees.is_null() {
            return Err(null());
        }
        if len < e.n() {
            return Err(Error::DimensionMismatch { expected: e.n(), got: len }.into());
        }
        let d = reconstruct(e, epsilon)?;
        ptr::copy_nonoverlapping(d.as_ptr(), degrees, d.len());
        Ok(())
    })
}

/// Sweeps ε from `start` to `end` by `step`, comparing with the degrees of
/// `g`, and reports the row of highest Pearson correlation.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sf_sweep(
    e: *const SfEmbedding,
    g: *const SfGraph,
    start: f64,
    end: f64,
    step: f64,
    out: *mut SfSweepBest,
) -> SfStatus {
    guard(|| {
        let (e, g) = (&handle(e)?.0, &handle(g)?.0);
        if out.is_null() {
            return Err(null());
        }
        let sweep = sweep_epsilon(e, &g.degrees(), &EpsilonGrid { start, end, step })?;
        let best = sweep.best();
        let c = best.correlations;
        *out = SfSweepBest {
            epsilon: best.epsilon,
            defined: c.is_some(),
            pearson: c.map_or(f64::NAN, |c| c.pearson),
            spearman: c.map_or(f64::NAN, |c| c.spearman),
            kendall: c.map_or(f64::NAN, |c| c.kendall),
            edge_count: best.edge_count,
        };
        Ok(())
    })
}

/// Fits a power law to `len` positive degrees.
///
/// # Safety
/// `degrees` must point to `len` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_fit_power_law(degrees: *const usize, len: usize, out: *mut SfPowerLawFit) -> SfStatus {
    guard(|| {
        if degrees.is_null() || out.is_null() {
            return Err(null());
        }
        let f = fit_power_law(std::slice::from_raw_parts(degrees, len))?;
        *out = SfPowerLawFit { alpha: f.alpha, d_min: f.d_min, ks: f.ks, n_tail: f.n_tail, norm_const: f.norm_const };
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sf_sphere_bounds(k: usize, out: *mut SfBounds) -> SfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let b = sphere_bounds(k)?;
        *out = SfBounds {
            k,
            lower_log2: b.lower.log2,
            upper_log2: b.upper.log2,
            lower_density_log2: b.lower_density.log2,
            upper_density_log2: b.upper_density.log2,
            upper_valid: b.upper_valid,
        };
        Ok(())
    })
}
