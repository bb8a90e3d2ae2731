//! C ABI for `ggeval`.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free` function. Every fallible call returns a
//! [`GgStatus`]; on failure [`ggeval_last_error`] describes the problem for
//! the calling thread. Strings returned through `char **` out-parameters are
//! owned by the caller and released with [`ggeval_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use ggeval::embed_metrics::{evaluate_embeddings, frechet_distance, gaussian_summary, EmbedMetricsConfig};
use ggeval::generators::perturb_set;
use ggeval::gin::{embed, load_model, EmbeddingMatrix, GinModel};
use ggeval::harness::{generate_dataset, DatasetKind, Scale};
use ggeval::io::{read_graphset, write_graphset};
use ggeval::linalg::Matrix;
use ggeval::mmd::{mmd_suite, MmdConfig};
use ggeval::report::MetricReport;
use ggeval::{Error, Graph, GraphSet, Provenance, Rng};

/// Status codes; the numeric values are stable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GgStatus {
    Ok = 0,
    /// Bad argument, null pointer or invalid parameter.
    InvalidArgument = 1,
    /// Malformed or inconsistent input data.
    DataError = 2,
    /// Numerical failure such as a non-converging eigensolver.
    Numerical = 3,
    /// File could not be read or written.
    Io = 4,
    /// Model file of an unsupported version.
    Version = 5,
    /// Internal panic caught at the boundary.
    Panic = 6,
}

/// Opaque set of graphs.
pub struct GgGraphSet {
    inner: GraphSet,
}

/// Opaque trained (or untrained) GIN model.
pub struct GgModel {
    inner: GinModel,
}

/// Opaque row-major embedding matrix.
pub struct GgEmbedding {
    inner: EmbeddingMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GgStatus {
    match e {
        Error::Stage { source, .. } => status_of(source),
        Error::InvalidParameter(_) => GgStatus::InvalidArgument,
        Error::Numerical(_) | Error::Diverged { .. } => GgStatus::Numerical,
        Error::Io { .. } => GgStatus::Io,
        Error::Version { .. } => GgStatus::Version,
        _ => GgStatus::DataError,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Error>) -> GgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            GgStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            GgStatus::Panic
        }
    }
}

fn null(what: &str) -> Error {
    Error::InvalidParameter(format!("`{what}` is null"))
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, Error> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::InvalidParameter(format!("`{what}` is not UTF-8")))?;
    Ok(PathBuf::from(s))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::InvalidParameter(format!("`{what}` is not UTF-8")))
}

unsafe fn out_string(out: *mut *mut c_char, text: String) -> Result<(), Error> {
    let c = CString::new(text).map_err(|_| Error::InvalidParameter("string contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ggeval_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ggeval_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ggeval_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reads a JSON-lines graph file (`.gz` transparently).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ggeval_graphset_read(path: *const c_char, out: *mut *mut GgGraphSet) -> GgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let set = read_graphset(path_arg(path, "path")?)?;
        put(out, GgGraphSet { inner: set });
        Ok(())
    })
}

/// # Safety
/// `set` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ggeval_graphset_write(set: *const GgGraphSet, path: *const c_char) -> GgStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("set"))?;
        write_graphset(&set.inner, path_arg(path, "path")?)
    })
}

/// Builds a set from flat arrays: graph `i` has `node_counts[i]` nodes and
/// `edge_counts[i]` edges, taken in order from `edges` as `(u, v)` pairs.
///
/// # Safety
/// The arrays must hold `graph_count` entries and `2 * sum(edge_counts)`
/// entries respectively.
#[no_mangle]
pub unsafe extern "C" fn ggeval_graphset_from_edges(
    graph_count: usize,
    node_counts: *const usize,
    edge_counts: *const usize,
    edges: *const usize,
    label: i64,
    out: *mut *mut GgGraphSet,
) -> GgStatus {
    guard(|| {
        if out.is_null() || node_counts.is_null() || edge_counts.is_null() {
            return Err(null("argument"));
        }
        let nodes = std::slice::from_raw_parts(node_counts, graph_count);
        let counts = std::slice::from_raw_parts(edge_counts, graph_count);
        let total: usize = counts.iter().sum();
        if total > 0 && edges.is_null() {
            return Err(null("edges"));
        }
        let flat = if total == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(edges, 2 * total)
        };
        let mut graphs = Vec::with_capacity(graph_count);
        let mut offset = 0;
        for (&n, &e) in nodes.iter().zip(counts) {
            let pairs: Vec<(usize, usize)> = flat[2 * offset..2 * (offset + e)]
                .chunks(2)
                .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
                .collect();
            graphs.push(Graph::from_edges(n, &pairs)?);
            offset += e;
        }
        let set = GraphSet::new(graphs, label, Provenance::new("external", None))?;
        put(out, GgGraphSet { inner: set });
        Ok(())
    })
}

/// Number of graphs; 0 for a null handle.
///
/// # Safety
/// `set` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ggeval_graphset_len(set: *const GgGraphSet) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

/// Node and edge count of graph `index`.
///
/// # Safety
/// `set` must be a live handle; `nodes` and `edges` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ggeval_graphset_graph_size(
    set: *const GgGraphSet,
    index: usize,
    nodes: *mut usize,
    edges: *mut usize,
) -> GgStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("set"))?;
        if nodes.is_null() || edges.is_null() {
            return Err(null("out"));
        }
        let g = set
            .inner
            .graphs
            .get(index)
            .ok_or_else(|| Error::InvalidParameter(format!("graph index {index} out of range")))?;
        *nodes = g.node_count();
        *edges = g.edge_count();
        Ok(())
    })
}

/// # Safety
/// `set` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ggeval_graphset_free(set: *mut GgGraphSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Generates one of the named datasets (`BA`, `WS`, `C2L`, `C2S`, `Gr`,
/// `Ld`) at reduced (`large_scale == 0`) or full benchmark size.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ggeval_generate_dataset(
    name: *const c_char,
    large_scale: i32,
    seed: u64,
    out: *mut *mut GgGraphSet,
) -> GgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind: DatasetKind = str_arg(name, "name")?.parse()?;
        let scale = if large_scale != 0 { Scale::Large } else { Scale::Desk };
        put(
            out,
            GgGraphSet {
                inner: generate_dataset(kind, scale, seed)?,
            },
        );
        Ok(())
    })
}

/// Rewires `fraction` of the edges of every graph.
///
/// # Safety
/// `set` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ggeval_perturb(
    set: *const GgGraphSet,
    fraction: f64,
    seed: u64,
    out: *mut *mut GgGraphSet,
) -> GgStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("set"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = perturb_set(&set.inner, fraction, &mut Rng::new(seed))?;
        put(out, GgGraphSet { inner: p });
        Ok(())
    })
}

/// Degree, clustering, orbit and spectral MMD as a JSON report.
///
/// # Safety
/// `a` and `b` must be live handles and `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ggeval_mmd_suite(
    a: *const GgGraphSet,
    b: *const GgGraphSet,
    sigma: f64,
    json_out: *mut *mut c_char,
) -> GgStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        if json_out.is_null() {
            return Err(null("json_out"));
        }
        let config = MmdConfig {
            sigma,
            ..MmdConfig::default()
        };
        let report = mmd_suite(&a.inner, &b.inner, &config)?;
        out_string(json_out, serde_json::to_string(&report)?)
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ggeval_model_load(path: *const c_char, out: *mut *mut GgModel) -> GgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        put(
            out,
            GgModel {
                inner: load_model(&path_arg(path, "path")?)?,
            },
        );
        Ok(())
    })
}

/// Width of the model's embeddings; 0 for a null handle.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ggeval_model_embedding_dim(model: *const GgModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.embedding_dim())
}

/// # Safety
/// `model` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ggeval_model_free(model: *mut GgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` and `set` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ggeval_embed(
    model: *const GgModel,
    set: *const GgGraphSet,
    seed: u64,
    out: *mut *mut GgEmbedding,
) -> GgStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let set = set.as_ref().ok_or_else(|| null("set"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        put(
            out,
            GgEmbedding {
                inner: embed(&model.inner, &set.inner, seed)?,
            },
        );
        Ok(())
    })
}

/// Copies `rows * cols` row-major values into a new embedding handle.
///
/// # Safety
/// `data` must hold `rows * cols` values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ggeval_embedding_from_data(
    data: *const f64,
    rows: usize,
    cols: usize,
    out: *mut *mut GgEmbedding,
) -> GgStatus {
    guard(|| {
        if out.is_null() || (data.is_null() && rows * cols > 0) {
            return Err(null("argument"));
        }
        let values = if rows * cols == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(data, rows * cols).to_vec()
        };
        let m = Matrix::from_vec(rows, cols, values)?;
        put(
            out,
            GgEmbedding {
                inner: EmbeddingMatrix::new(m),
            },
        );
        Ok(())
    })
}

/// # Safety
/// `e` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ggeval_embedding_rows(e: *const GgEmbedding) -> usize {
    e.as_ref().map_or(0, |e| e.inner.len())
}

/// # Safety
/// `e` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ggeval_embedding_cols(e: *const GgEmbedding) -> usize {
    e.as_ref().map_or(0, |e| e.inner.dim())
}

/// Row-major values, valid while the handle lives; null for a null handle.
///
/// # Safety
/// `e` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ggeval_embedding_data(e: *const GgEmbedding) -> *const f64 {
    e.as_ref().map_or(ptr::null(), |e| e.inner.rows.as_slice().as_ptr())
}

/// # Safety
/// `e` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ggeval_embedding_free(e: *mut GgEmbedding) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Fréchet distance between the Gaussian summaries of two embedding sets.
///
/// # Safety
/// `a` and `b` must be live handles; `raw` and `clamped` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ggeval_frechet_distance(
    a: *const GgEmbedding,
    b: *const GgEmbedding,
    raw: *mut f64,
    clamped: *mut f64,
) -> GgStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        if raw.is_null() || clamped.is_null() {
            return Err(null("out"));
        }
        let fd = frechet_distance(&gaussian_summary(&a.inner)?, &gaussian_summary(&b.inner)?)?;
        *raw = fd.raw;
        *clamped = fd.clamped;
        Ok(())
    })
}

/// FD (clamped and raw), precision, recall, density, coverage and both F1
/// scores as JSON.
///
/// # Safety
/// `real` and `gen` must be live handles and `json_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ggeval_eval_embed(
    real: *const GgEmbedding,
    gen: *const GgEmbedding,
    k: usize,
    json_out: *mut *mut c_char,
) -> GgStatus {
    guard(|| {
        let real = real.as_ref().ok_or_else(|| null("real"))?;
        let gen = gen.as_ref().ok_or_else(|| null("gen"))?;
        if json_out.is_null() {
            return Err(null("json_out"));
        }
        let mut report = MetricReport::new("real", "gen");
        let config = EmbedMetricsConfig {
            k,
            ..EmbedMetricsConfig::default()
        };
        evaluate_embeddings(&real.inner, &gen.inner, &config, &mut report)?;
        out_string(json_out, serde_json::to_string(&report)?)
    })
}
