//! C ABI for oscicut. Graphs live behind an opaque handle; every call returns
//! an [`OscicutStatus`] and leaves a message for [`oscicut_last_error`] on failure.
//!
//! Output labels are written to caller-owned buffers of length `n`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oscicut::graph::{check_k, cut_weight, house_graph, random_dense_graph, PartitionAssignment, SpinConfiguration, WeightedGraph};
use oscicut::oracle::brute_force_cut;
use oscicut::rounding::{best_cut, BoundarySet};
use oscicut::solve::{solve, SolveOptions, Solver};
use oscicut::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OscicutStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedK = 3,
    TooLarge = 4,
    NotConverged = 5,
    Io = 6,
    Parse = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OscicutSolver {
    Sl = 0,
    Brute = 1,
}

/// Opaque weighted graph.
pub struct OscicutGraph {
    inner: WeightedGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OscicutStatus {
    match e {
        Error::UnsupportedK(_) => OscicutStatus::UnsupportedK,
        Error::TooLarge { .. } => OscicutStatus::TooLarge,
        Error::NotConverged(_) | Error::Divergence { .. } => OscicutStatus::NotConverged,
        Error::Io(_) => OscicutStatus::Io,
        Error::Parse { .. } | Error::Json(_) => OscicutStatus::Parse,
        _ => OscicutStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (OscicutStatus, String)>) -> OscicutStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OscicutStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside oscicut".into());
            OscicutStatus::Panic
        }
    }
}

fn lib<T>(r: oscicut::Result<T>) -> Result<T, (OscicutStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (OscicutStatus, String) {
    (OscicutStatus::NullPointer, format!("{what} is null"))
}

unsafe fn graph_ref<'a>(g: *const OscicutGraph) -> Result<&'a WeightedGraph, (OscicutStatus, String)> {
    g.as_ref().map(|g| &g.inner).ok_or_else(|| null("graph"))
}

unsafe fn emit(out: *mut *mut OscicutGraph, graph: WeightedGraph) -> Result<(), (OscicutStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(OscicutGraph { inner: graph }));
    Ok(())
}

unsafe fn write_labels(labels: *mut u8, a: &PartitionAssignment) {
    if !labels.is_null() {
        ptr::copy_nonoverlapping(a.labels().as_ptr(), labels, a.len());
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn oscicut_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn oscicut_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Edgeless graph on `n` vertices.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn oscicut_graph_new(n: usize, out: *mut *mut OscicutGraph) -> OscicutStatus {
    guard(|| emit(out, lib(WeightedGraph::empty(n))?))
}

/// The five-vertex house graph.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn oscicut_graph_house(out: *mut *mut OscicutGraph) -> OscicutStatus {
    guard(|| emit(out, house_graph()))
}

/// Complete graph with standard normal weights, seeded.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn oscicut_graph_random(n: usize, seed: u64, out: *mut *mut OscicutGraph) -> OscicutStatus {
    guard(|| emit(out, lib(random_dense_graph(n, seed))?))
}

/// Parses a graph from JSON or edge-list text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn oscicut_graph_parse(text: *const c_char, out: *mut *mut OscicutGraph) -> OscicutStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (OscicutStatus::Parse, e.to_string()))?;
        let g = if s.trim_start().starts_with('{') {
            WeightedGraph::from_json_str(s)
        } else {
            WeightedGraph::from_edge_list_str(s)
        };
        emit(out, lib(g)?)
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn oscicut_graph_free(g: *mut OscicutGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn oscicut_graph_n(g: *const OscicutGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn oscicut_graph_set_weight(g: *mut OscicutGraph, i: usize, j: usize, w: f64) -> OscicutStatus {
    guard(|| {
        let g = g.as_mut().ok_or_else(|| null("graph"))?;
        lib(g.inner.set_weight(i, j, w))
    })
}

/// # Safety
/// `g` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn oscicut_graph_weight(g: *const OscicutGraph, i: usize, j: usize, out: *mut f64) -> OscicutStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if i >= g.n() || j >= g.n() {
            return Err((OscicutStatus::InvalidArgument, format!("vertex out of range: ({i}, {j})")));
        }
        *out.as_mut().ok_or_else(|| null("out"))? = g.weight(i, j);
        Ok(())
    })
}

/// Weight of the cut given by `labels` (length `n`, values below `k`).
///
/// # Safety
/// `labels` must hold `n` bytes; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn oscicut_cut_weight(
    g: *const OscicutGraph,
    k: usize,
    labels: *const u8,
    n: usize,
    out: *mut f64,
) -> OscicutStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if labels.is_null() {
            return Err(null("labels"));
        }
        let a = lib(PartitionAssignment::new(k, std::slice::from_raw_parts(labels, n).to_vec()))?;
        *out.as_mut().ok_or_else(|| null("out"))? = lib(cut_weight(g, &a))?;
        Ok(())
    })
}

/// Exact maximum and minimum nontrivial k-cut by enumeration. `argmax` may
/// be null; otherwise it receives `n` labels.
///
/// # Safety
/// Output pointers must be valid; `argmax` null or `n` bytes.
#[no_mangle]
pub unsafe extern "C" fn oscicut_brute_force(
    g: *const OscicutGraph,
    k: usize,
    max_weight: *mut f64,
    min_weight: *mut f64,
    argmax: *mut u8,
) -> OscicutStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let r = lib(brute_force_cut(g, k))?;
        *max_weight.as_mut().ok_or_else(|| null("max_weight"))? = r.max_weight;
        if let Some(m) = min_weight.as_mut() {
            *m = r.min_weight;
        }
        write_labels(argmax, &r.argmax);
        Ok(())
    })
}

/// Bins `phases` (length `n`) over `boundaries` uniform rotations and
/// returns the heaviest cut.
///
/// # Safety
/// `phases` must hold `n` doubles; `labels` null or `n` bytes.
#[no_mangle]
pub unsafe extern "C" fn oscicut_best_cut(
    g: *const OscicutGraph,
    phases: *const f64,
    n: usize,
    k: usize,
    boundaries: usize,
    weight: *mut f64,
    labels: *mut u8,
) -> OscicutStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if phases.is_null() {
            return Err(null("phases"));
        }
        lib(check_k(k))?;
        let spins = lib(SpinConfiguration::new(std::slice::from_raw_parts(phases, n).to_vec()))?;
        let set = lib(BoundarySet::uniform(k, boundaries))?;
        let cut = lib(best_cut(g, &spins, &set))?;
        *weight.as_mut().ok_or_else(|| null("weight"))? = cut.best_weight;
        write_labels(labels, &cut.best_assignment);
        Ok(())
    })
}

/// Max-k-cut with the oscillator annealer (`runs` seeds from `seed`, rounded
/// over `boundaries` uniform rotations) or exactly.
///
/// # Safety
/// `weight` valid for one write; `labels` null or `n` bytes.
#[no_mangle]
pub unsafe extern "C" fn oscicut_solve(
    g: *const OscicutGraph,
    solver: OscicutSolver,
    k: usize,
    boundaries: usize,
    runs: usize,
    seed: u64,
    weight: *mut f64,
    labels: *mut u8,
) -> OscicutStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let opts = SolveOptions {
            k,
            boundaries,
            runs,
            seed,
            ..Default::default()
        };
        let s = match solver {
            OscicutSolver::Sl => Solver::Sl,
            OscicutSolver::Brute => Solver::Brute,
        };
        let sol = lib(solve(g, s, &opts))?;
        *weight.as_mut().ok_or_else(|| null("weight"))? = sol.weight;
        write_labels(labels, &sol.assignment);
        Ok(())
    })
}
