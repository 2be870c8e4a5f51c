//! C ABI over the anterial library.
//!
//! Graphs and models cross the boundary as opaque handles; everything else
//! is a NUL-terminated UTF-8 string (labels, JSON, CSV, DOT) or a plain
//! number. Every fallible call returns an [`AnterialStatus`] and writes its
//! result through an out-pointer. After a failure,
//! [`anterial_last_error`] gives the message for the calling thread.
//!
//! Strings returned by the library are owned by the caller and released
//! with [`anterial_string_free`]; handles with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anterial::adjust::{select_adjustment, AdjustmentProblem};
use anterial::classes::classify;
use anterial::gaussian::{gibbs_sample, joint_law, markov_report, sample_coupled, sample_equilibrium, EquilibriumSystem, GaussianModel, MarkovData};
use anterial::{causal, inducing, io, separation, transforms, Error, MixedGraph};

/// Result of every fallible call. Values are stable across releases.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnterialStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    DuplicateLabel = 10,
    DuplicateEdge = 11,
    SelfLoop = 12,
    UnknownNode = 13,
    NotChainMixed = 20,
    NotAnterial = 21,
    NotChainConnected = 22,
    NotChainConnectedAnterial = 23,
    NotDag = 24,
    InvalidOrder = 30,
    OverlappingSets = 31,
    GraphTooLarge = 32,
    NodeSetMismatch = 33,
    InvalidModel = 40,
    NonAnterialResult = 41,
    MissingValues = 42,
    SingularCovariance = 43,
    TooFewSamples = 44,
    ConstantColumn = 45,
    LabelMismatch = 46,
    InvalidProblem = 50,
    SetValuedTreatment = 51,
    TooLargeForExactCheck = 52,
    InvalidArgument = 60,
    Panic = 99,
}

impl From<&Error> for AnterialStatus {
    fn from(e: &Error) -> Self {
        use AnterialStatus as S;
        match e {
            Error::DuplicateLabel(_) => S::DuplicateLabel,
            Error::DuplicateEdge(..) => S::DuplicateEdge,
            Error::SelfLoop(_) => S::SelfLoop,
            Error::UnknownNode(_) => S::UnknownNode,
            Error::NotChainMixed => S::NotChainMixed,
            Error::NotAnterial => S::NotAnterial,
            Error::NotChainConnected => S::NotChainConnected,
            Error::NotChainConnectedAnterial => S::NotChainConnectedAnterial,
            Error::NotDag => S::NotDag,
            Error::InvalidOrder(_) => S::InvalidOrder,
            Error::OverlappingSets => S::OverlappingSets,
            Error::GraphTooLarge { .. } => S::GraphTooLarge,
            Error::NodeSetMismatch => S::NodeSetMismatch,
            Error::InvalidModel(_) => S::InvalidModel,
            Error::NonAnterialResult => S::NonAnterialResult,
            Error::MissingValues(_) => S::MissingValues,
            Error::SingularCovariance => S::SingularCovariance,
            Error::TooFewSamples { .. } => S::TooFewSamples,
            Error::ConstantColumn(_) => S::ConstantColumn,
            Error::LabelMismatch(_) => S::LabelMismatch,
            Error::InvalidProblem(_) => S::InvalidProblem,
            Error::SetValuedTreatment => S::SetValuedTreatment,
            Error::TooLargeForExactCheck(_) => S::TooLargeForExactCheck,
            Error::Parse(_) => S::Parse,
        }
    }
}

/// Sampling scheme for [`anterial_model_simulate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnterialMode {
    Equilibrium = 0,
    Gibbs = 1,
    Coupled = 2,
}

/// Opaque mixed graph.
pub struct AnterialGraph(MixedGraph);

/// Opaque compiled Gaussian equilibrium model.
pub struct AnterialModel(EquilibriumSystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(AnterialStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(AnterialStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AnterialStatus::NullPointer, format!("`{what}` is null"))
}

fn set_last_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

/// Runs `body`, turning errors and panics into a status and a stored message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AnterialStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AnterialStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            AnterialStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(AnterialStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn labels(p: *const *const c_char, len: usize, what: &str) -> Result<Vec<String>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts(p, len).iter().map(|&s| text(s, what).map(str::to_string)).collect()
}

unsafe fn graph<'a>(g: *const AnterialGraph) -> Result<&'a MixedGraph, Failure> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("graph"))
}

unsafe fn model<'a>(m: *const AnterialModel) -> Result<&'a EquilibriumSystem, Failure> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("model"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let s = CString::new(s).map_err(|_| Failure(AnterialStatus::InvalidArgument, "output contains NUL".into()))?;
    put(out, s.into_raw())
}

unsafe fn put_graph(out: *mut *mut AnterialGraph, g: MixedGraph) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(AnterialGraph(g))));
    Ok(())
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer is valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn anterial_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn anterial_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses graph JSON `{"nodes": [...], "edges": [{"u", "v", "type"}]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_graph_from_json(json: *const c_char, out: *mut *mut AnterialGraph) -> AnterialStatus {
    guard(|| put_graph(out, io::graph_from_json(text(json, "json")?)?))
}

/// # Safety
/// `g` must be a handle from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn anterial_graph_free(g: *mut AnterialGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anterial_graph_node_count(g: *const AnterialGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_graph_to_json(g: *const AnterialGraph, out: *mut *mut c_char) -> AnterialStatus {
    guard(|| put_string(out, io::graph_to_json(graph(g)?)))
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_graph_to_dot(g: *const AnterialGraph, out: *mut *mut c_char) -> AnterialStatus {
    guard(|| put_string(out, io::to_dot(graph(g)?)))
}

/// Graph-class report as JSON, with witnesses.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_graph_classify(g: *const AnterialGraph, out: *mut *mut c_char) -> AnterialStatus {
    guard(|| {
        let g = graph(g)?;
        put_string(out, io::to_json(&io::class_report_value(g, &classify(g))))
    })
}

/// Whether `z` separates `a` from `b`.
///
/// # Safety
/// `g` must be a live handle, each label array must hold the given number
/// of NUL-terminated strings, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_separated(
    g: *const AnterialGraph,
    a: *const *const c_char,
    a_len: usize,
    b: *const *const c_char,
    b_len: usize,
    z: *const *const c_char,
    z_len: usize,
    out: *mut bool,
) -> AnterialStatus {
    guard(|| {
        let g = graph(g)?;
        let ids = |p, n, what| -> Result<Vec<usize>, Failure> { Ok(g.ids_of(&labels(p, n, what)?)?) };
        let sep = separation::separated(g, &ids(a, a_len, "a")?, &ids(b, b_len, "b")?, &ids(z, z_len, "z")?)?;
        put(out, sep)
    })
}

/// Graph operations taking a node set and returning a new graph.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnterialOp {
    Marginalize = 0,
    Condition = 1,
    Intervene = 2,
    Counterfactual = 3,
    Swaig = 4,
    /// The node set is the ordered treatment sequence; the input must be a DAG.
    ParallelWorldsSwig = 5,
}

/// Applies `op` over the labelled node set and writes a new graph handle.
///
/// # Safety
/// `g` must be a live handle, `nodes` must hold `len` NUL-terminated
/// strings, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_graph_apply(
    g: *const AnterialGraph,
    op: AnterialOp,
    nodes: *const *const c_char,
    len: usize,
    out: *mut *mut AnterialGraph,
) -> AnterialStatus {
    guard(|| {
        let g = graph(g)?;
        let ids = g.ids_of(&labels(nodes, len, "nodes")?)?;
        let h = match op {
            AnterialOp::Marginalize => transforms::alpha_m(g, &ids)?,
            AnterialOp::Condition => transforms::alpha_c(g, &ids)?,
            AnterialOp::Intervene => causal::do_graph(g, &ids)?,
            AnterialOp::Counterfactual => causal::phi(g, &ids)?,
            AnterialOp::Swaig => causal::swaig(g, &ids)?,
            AnterialOp::ParallelWorldsSwig => causal::parallel_worlds_swig(g, &ids)?,
        };
        put_graph(out, h)
    })
}

/// Maximal supergraph with the same separations.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_graph_maximize(g: *const AnterialGraph, out: *mut *mut AnterialGraph) -> AnterialStatus {
    guard(|| put_graph(out, inducing::maximize(graph(g)?)?))
}

/// Minimal set `S` with `lower ⊆ S ⊆ upper` separating treatment from
/// outcome. Writes the result JSON `{"outcome", "S", "trace"}` and whether
/// a set was found. An infeasible problem is a success with `feasible`
/// set to false.
///
/// # Safety
/// `g` must be a live handle, strings NUL-terminated, label arrays of the
/// given lengths, and both out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_adjust(
    g: *const AnterialGraph,
    treatment: *const c_char,
    outcome: *const c_char,
    lower: *const *const c_char,
    lower_len: usize,
    upper: *const *const c_char,
    upper_len: usize,
    feasible: *mut bool,
    out: *mut *mut c_char,
) -> AnterialStatus {
    guard(|| {
        let p = AdjustmentProblem::new(
            graph(g)?.clone(),
            text(treatment, "treatment")?,
            text(outcome, "outcome")?,
            &labels(lower, lower_len, "lower")?,
            &labels(upper, upper_len, "upper")?,
        );
        let r = select_adjustment(&p)?;
        put(feasible, r.set().is_some())?;
        put_string(out, io::to_json(&r))
    })
}

/// Parses, validates and compiles model JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_model_from_json(json: *const c_char, out: *mut *mut AnterialModel) -> AnterialStatus {
    guard(|| {
        let sys = GaussianModel::from_json(text(json, "json")?)?.compile()?;
        put(out, Box::into_raw(Box::new(AnterialModel(sys))))
    })
}

/// # Safety
/// `m` must be a handle from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn anterial_model_free(m: *mut AnterialModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_model_graph(m: *const AnterialModel, out: *mut *mut AnterialGraph) -> AnterialStatus {
    guard(|| put_graph(out, model(m)?.corresponding_graph()?))
}

/// Draws `n` records as CSV. `treated`/`values` give `len` interventions,
/// applied to the whole model for equilibrium and Gibbs sampling and to the
/// second world for coupled sampling. `burn_in` is used only by Gibbs.
///
/// # Safety
/// `m` must be a live handle, `treated` and `values` must hold `len`
/// entries, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_model_simulate(
    m: *const AnterialModel,
    mode: AnterialMode,
    n: usize,
    burn_in: usize,
    seed: u64,
    treated: *const *const c_char,
    values: *const f64,
    len: usize,
    out: *mut *mut c_char,
) -> AnterialStatus {
    guard(|| {
        let sys = model(m)?;
        let names = labels(treated, len, "treated")?;
        if len > 0 && values.is_null() {
            return Err(null("values"));
        }
        let vals = if len == 0 { &[][..] } else { std::slice::from_raw_parts(values, len) };
        let iv = names.iter().zip(vals).map(|(l, &v)| Ok((sys.id(l)?, v))).collect::<Result<Vec<_>, Error>>()?;
        let samples = match mode {
            AnterialMode::Coupled => sample_coupled(sys, &iv, n, seed)?,
            AnterialMode::Equilibrium => sample_equilibrium(&sys.intervene(&iv)?, n, seed)?,
            AnterialMode::Gibbs => gibbs_sample(&sys.intervene(&iv)?, n, burn_in, seed)?,
        };
        put_string(out, io::samples_to_csv(&samples))
    })
}

/// Exact pairwise Markov report of the model against its corresponding
/// graph, as a JSON array of rows.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn anterial_model_markov_report(m: *const AnterialModel, out: *mut *mut c_char) -> AnterialStatus {
    guard(|| {
        let sys = model(m)?;
        let rows = markov_report(&sys.corresponding_graph()?, MarkovData::Law(&joint_law(sys)))?;
        put_string(out, io::to_json(&rows))
    })
}
