//! C ABI over `gibbssat`.
//!
//! Formulas and energy histograms cross the boundary as opaque handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a [`GsStatus`]; on failure, [`gs_last_error_message`] holds a
//! description for the calling thread. Strings returned through out-pointers
//! are owned by the caller and released with [`gs_string_free`].
//!
//! The header is generated into `include/gibbssat.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gibbssat::cnf::{generate_instance, parse_dimacs, write_dimacs};
use gibbssat::gibbs::{enumerate_spectrum_with_limit, ground_occupancy, min_beta_for_occupancy, EnergyHistogram};
use gibbssat::ising::embed;
use gibbssat::solver::{max_sat_bruteforce_with_limit, solve, SolverKind};
use gibbssat::{Assignment, CnfFormula, Error};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    TooLarge = 4,
    Io = 5,
    Internal = 6,
}

/// Decision procedure for [`gs_solve`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GsSolver {
    /// Implication graph for width 2, DPLL otherwise.
    Auto = 0,
    TwoSat = 1,
    Dpll = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GsWorkStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub wall_time_secs: f64,
}

/// Opaque CNF formula.
pub struct GsFormula(CnfFormula);

/// Opaque energy histogram.
pub struct GsHistogram(EnergyHistogram);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: GsStatus,
    message: String,
}

impl Failure {
    fn new(status: GsStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::MalformedHeader { .. }
            | Error::MalformedBody { .. }
            | Error::LiteralOutOfRange { .. }
            | Error::WrongClauseWidth { .. }
            | Error::RepeatedVariable { .. }
            | Error::ClauseCountMismatch { .. }
            | Error::Json(_) => GsStatus::Parse,
            Error::TooLarge { .. } => GsStatus::TooLarge,
            Error::Io { .. } | Error::Csv { .. } => GsStatus::Io,
            Error::ResumeMismatch { .. } | Error::SolverDisagreement { .. } => GsStatus::Internal,
            _ => GsStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `body`, recording its error and converting panics into `Internal`.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            GsStatus::Ok
        }
        Ok(Err(f)) => {
            set_last_error(&f.message);
            f.status
        }
        Err(_) => {
            set_last_error("internal panic");
            GsStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::new(GsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(GsStatus::Internal, "string contains NUL"))
}

/// Message for the most recent failure on this thread, or null if the last
/// call succeeded. Valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn gs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Random k-SAT instance with `n_clauses` clauses over `n_vars` variables.
///
/// # Safety
/// `out` must be a valid pointer to write a handle to.
#[no_mangle]
pub unsafe extern "C" fn gs_formula_generate(
    n_vars: usize,
    n_clauses: usize,
    k: usize,
    seed: u64,
    out: *mut *mut GsFormula,
) -> GsStatus {
    guard(|| {
        let f = generate_instance(n_vars, n_clauses, k, seed)?;
        write_out(out, Box::into_raw(Box::new(GsFormula(f))), "out")
    })
}

/// Parses DIMACS CNF text of `len` bytes.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_formula_parse_dimacs(data: *const u8, len: usize, out: *mut *mut GsFormula) -> GsStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let bytes = std::slice::from_raw_parts(data, len);
        let f = parse_dimacs(bytes)?;
        write_out(out, Box::into_raw(Box::new(GsFormula(f))), "out")
    })
}

/// # Safety
/// `formula` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_formula_free(formula: *mut GsFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// DIMACS text of `formula`; free with [`gs_string_free`].
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_formula_to_dimacs(formula: *const GsFormula, out: *mut *mut c_char) -> GsStatus {
    guard(|| {
        let f = deref(formula, "formula")?;
        let text = String::from_utf8(write_dimacs(&f.0)).expect("DIMACS output is ASCII");
        write_out(out, into_c_string(text)?, "out")
    })
}

/// # Safety
/// `formula` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gs_formula_n_vars(formula: *const GsFormula) -> usize {
    formula.as_ref().map_or(0, |f| f.0.n_vars())
}

/// # Safety
/// `formula` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gs_formula_n_clauses(formula: *const GsFormula) -> usize {
    formula.as_ref().map_or(0, |f| f.0.n_clauses())
}

/// # Safety
/// `formula` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gs_formula_k(formula: *const GsFormula) -> usize {
    formula.as_ref().map_or(0, |f| f.0.k())
}

/// Number of clauses violated by an assignment given as `len` bytes, one per
/// variable, non-zero meaning true.
///
/// # Safety
/// `values` must point to `len` readable bytes; `out_violated` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_formula_evaluate(
    formula: *const GsFormula,
    values: *const u8,
    len: usize,
    out_violated: *mut usize,
) -> GsStatus {
    guard(|| {
        let f = deref(formula, "formula")?;
        if values.is_null() && len > 0 {
            return Err(null("values"));
        }
        let bits = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(values, len).iter().map(|&b| b != 0).collect()
        };
        let violated = f.0.evaluate(&Assignment::new(bits))?;
        write_out(out_violated, violated, "out_violated")
    })
}

/// Decides satisfiability.
///
/// `witness` may be null. Otherwise it must hold `n_vars` bytes and receives
/// a satisfying assignment (1 = true) when one exists. `stats` may be null.
///
/// # Safety
/// Pointers must be valid as described above.
#[no_mangle]
pub unsafe extern "C" fn gs_solve(
    formula: *const GsFormula,
    solver: GsSolver,
    out_satisfiable: *mut bool,
    witness: *mut u8,
    stats: *mut GsWorkStats,
) -> GsStatus {
    guard(|| {
        let f = deref(formula, "formula")?;
        let kind = match solver {
            GsSolver::Auto => SolverKind::Auto,
            GsSolver::TwoSat => SolverKind::TwoSat,
            GsSolver::Dpll => SolverKind::Dpll,
        };
        let result = solve(&f.0, kind)?;
        write_out(out_satisfiable, result.satisfiable, "out_satisfiable")?;
        if let (false, Some(model)) = (witness.is_null(), &result.witness) {
            for (i, &b) in model.bits().iter().enumerate() {
                witness.add(i).write(b as u8);
            }
        }
        if !stats.is_null() {
            let w = &result.work;
            stats.write(GsWorkStats {
                decisions: w.decisions,
                propagations: w.propagations,
                conflicts: w.conflicts,
                wall_time_secs: w.wall_time.as_secs_f64(),
            });
        }
        Ok(())
    })
}

/// Minimum violated-clause count and the number of assignments attaining it,
/// by exhaustive search over at most `2^limit` assignments.
///
/// # Safety
/// `formula` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_max_sat_bruteforce(
    formula: *const GsFormula,
    limit: usize,
    out_lambda_min: *mut usize,
    out_degeneracy: *mut u64,
) -> GsStatus {
    guard(|| {
        let f = deref(formula, "formula")?;
        let (lambda, d) = max_sat_bruteforce_with_limit(&f.0, limit)?;
        write_out(out_lambda_min, lambda, "out_lambda_min")?;
        write_out(out_degeneracy, d, "out_degeneracy")
    })
}

/// Ising Hamiltonian of `formula` as JSON; free with [`gs_string_free`].
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_embed_json(formula: *const GsFormula, out: *mut *mut c_char) -> GsStatus {
    guard(|| {
        let f = deref(formula, "formula")?;
        let h = embed(&f.0)?;
        write_out(out, into_c_string(h.to_json())?, "out")
    })
}

/// Exact energy histogram of `formula`, refusing more than `limit` variables.
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_histogram_enumerate(
    formula: *const GsFormula,
    limit: usize,
    out: *mut *mut GsHistogram,
) -> GsStatus {
    guard(|| {
        let f = deref(formula, "formula")?;
        let hist = enumerate_spectrum_with_limit(&f.0, limit)?;
        write_out(out, Box::into_raw(Box::new(GsHistogram(hist))), "out")
    })
}

/// Reads a histogram from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_histogram_from_json(json: *const c_char, out: *mut *mut GsHistogram) -> GsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = std::ffi::CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Failure::new(GsStatus::Parse, "histogram JSON is not UTF-8"))?;
        let hist = EnergyHistogram::from_json(text)?;
        write_out(out, Box::into_raw(Box::new(GsHistogram(hist))), "out")
    })
}

/// # Safety
/// `hist` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_histogram_free(hist: *mut GsHistogram) {
    if !hist.is_null() {
        drop(Box::from_raw(hist));
    }
}

/// # Safety
/// `hist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_histogram_to_json(hist: *const GsHistogram, out: *mut *mut c_char) -> GsStatus {
    guard(|| {
        let h = deref(hist, "hist")?;
        write_out(out, into_c_string(h.0.to_json())?, "out")
    })
}

/// # Safety
/// `hist` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gs_histogram_lambda_min(hist: *const GsHistogram) -> usize {
    hist.as_ref().map_or(0, |h| h.0.lambda_min())
}

/// # Safety
/// `hist` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gs_histogram_degeneracy(hist: *const GsHistogram) -> u64 {
    hist.as_ref().map_or(0, |h| h.0.degeneracy())
}

/// Configurations at energy `level`.
///
/// # Safety
/// `hist` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gs_histogram_count(hist: *const GsHistogram, level: usize) -> u64 {
    hist.as_ref().map_or(0, |h| h.0.count(level))
}

/// Gibbs probability of the ground level at inverse temperature `beta`.
///
/// # Safety
/// `hist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_ground_occupancy(hist: *const GsHistogram, beta: f64, out: *mut f64) -> GsStatus {
    guard(|| {
        let h = deref(hist, "hist")?;
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Failure::new(
                GsStatus::InvalidArgument,
                format!("inverse temperature must be finite and non-negative, got {beta}"),
            ));
        }
        write_out(out, ground_occupancy(&h.0, beta), "out")
    })
}

/// Smallest inverse temperature whose ground occupancy reaches `threshold`,
/// located to within `tol`.
///
/// # Safety
/// `hist` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_min_beta(hist: *const GsHistogram, threshold: f64, tol: f64, out: *mut f64) -> GsStatus {
    guard(|| {
        let h = deref(hist, "hist")?;
        write_out(out, min_beta_for_occupancy(&h.0, threshold, tol)?, "out")
    })
}
