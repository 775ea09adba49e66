//! C interface to the blendplan planning library.
//!
//! A case holds a loaded energy system together with its temporal structure
//! and scenario configuration. Solving a case yields a run handle that
//! answers queries about the solution. Every function returns a
//! [`BlendplanStatus`]; the message of the most recent failure on the calling
//! thread is available through [`blendplan_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use blendplan::analysis::{run_scenario, ScenarioRun, SolverSetup};
use blendplan::physics::chen_friction;
use blendplan::system::{EnergySystem, FlowFormulation, ScenarioConfig};
use blendplan::temporal::{TemporalStructure, WeightTargets};
use blendplan::Error;

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlendplanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    NotFound = 4,
    NoSolution = 5,
    SolverUnavailable = 6,
    Internal = 7,
}

/// A loaded planning case. Opaque to C callers.
pub struct BlendplanCase {
    system: EnergySystem,
    temporal: TemporalStructure,
    config: ScenarioConfig,
}

/// The outcome of solving a case. Opaque to C callers.
pub struct BlendplanRun {
    run: ScenarioRun,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: BlendplanStatus, message: impl Into<String>) -> BlendplanStatus {
    set_last_error(message);
    status
}

fn status_of(err: &Error) -> BlendplanStatus {
    match err {
        Error::Environment(_) | Error::Protocol(_) => BlendplanStatus::SolverUnavailable,
        _ => BlendplanStatus::InvalidInput,
    }
}

/// Runs `body`, turning panics into [`BlendplanStatus::Internal`].
fn guarded(body: impl FnOnce() -> BlendplanStatus) -> BlendplanStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(BlendplanStatus::Internal, "internal error"),
    }
}

/// Reads a required UTF-8 string argument.
///
/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn required_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, BlendplanStatus> {
    if ptr.is_null() {
        return Err(fail(BlendplanStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(BlendplanStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Reads an optional UTF-8 string argument.
///
/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn optional_str<'a>(ptr: *const c_char, what: &str) -> Result<Option<&'a str>, BlendplanStatus> {
    if ptr.is_null() {
        Ok(None)
    } else {
        required_str(ptr, what).map(Some)
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Version of the library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn blendplan_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on the calling thread, or null if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn blendplan_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Chen friction factor for Reynolds number `reynolds`, absolute roughness
/// `roughness_mm` (mm) and inner diameter `diameter_m` (m).
///
/// # Safety
/// `out` must be null or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn blendplan_chen_friction(
    reynolds: f64,
    roughness_mm: f64,
    diameter_m: f64,
    out: *mut f64,
) -> BlendplanStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BlendplanStatus::NullPointer, "out is null");
        }
        match chen_friction(reynolds, roughness_mm, diameter_m) {
            Ok(v) => {
                *out = v;
                BlendplanStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Loads a case from the CSV directory `system_dir`.
///
/// `temporal_dir` holds the temporal mapping and weights and defaults to
/// `system_dir` when null. `config_toml` is the text of a scenario
/// configuration; null selects the defaults. On success `*out` receives a
/// handle to release with [`blendplan_case_free`].
///
/// # Safety
/// String arguments must be null or NUL-terminated. `out` must be null or
/// point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn blendplan_case_load(
    system_dir: *const c_char,
    temporal_dir: *const c_char,
    config_toml: *const c_char,
    out: *mut *mut BlendplanCase,
) -> BlendplanStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BlendplanStatus::NullPointer, "out is null");
        }
        let system_dir = PathBuf::from(try_status!(required_str(system_dir, "system_dir")));
        let temporal_dir = try_status!(optional_str(temporal_dir, "temporal_dir")).map(PathBuf::from);
        let config = match try_status!(optional_str(config_toml, "config_toml")) {
            Some(text) => ScenarioConfig::parse(text),
            None => Ok(ScenarioConfig::default()),
        };
        let loaded = config.and_then(|config| {
            let system = EnergySystem::read_dir(&system_dir)?;
            let targets = WeightTargets {
                rp_sum: config.year_days,
                hour_sum: config.year_hours,
            };
            let temporal = TemporalStructure::read_dir(temporal_dir.as_deref().unwrap_or(&system_dir), targets)?;
            Ok(BlendplanCase {
                system,
                temporal,
                config,
            })
        });
        match loaded {
            Ok(case) => {
                *out = Box::into_raw(Box::new(case));
                BlendplanStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Releases a case. Null is ignored.
///
/// # Safety
/// `case` must be null or a handle from [`blendplan_case_load`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn blendplan_case_free(case: *mut BlendplanCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

/// Selects the gas flow formulation by name: `stp`, `btp` or `bpp`.
///
/// # Safety
/// `case` must be null or a live case handle. `name` must be null or
/// NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn blendplan_case_set_formulation(
    case: *mut BlendplanCase,
    name: *const c_char,
) -> BlendplanStatus {
    guarded(|| {
        let Some(case) = case.as_mut() else {
            return fail(BlendplanStatus::NullPointer, "case is null");
        };
        let name = try_status!(required_str(name, "name"));
        match name.parse::<FlowFormulation>() {
            Ok(flow) => {
                case.config.flow_formulation = flow;
                BlendplanStatus::Ok
            }
            Err(e) => fail(BlendplanStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Sizes of a loaded case. Any output pointer may be null.
///
/// # Safety
/// `case` must be null or a live case handle. Non-null outputs must point to
/// writable memory for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn blendplan_case_counts(
    case: *const BlendplanCase,
    nodes: *mut usize,
    pipelines: *mut usize,
    units: *mut usize,
    slots: *mut usize,
) -> BlendplanStatus {
    guarded(|| {
        let Some(case) = case.as_ref() else {
            return fail(BlendplanStatus::NullPointer, "case is null");
        };
        for (ptr, value) in [
            (nodes, case.system.nodes.len()),
            (pipelines, case.system.pipelines.len()),
            (units, case.system.units.len()),
            (slots, case.temporal.n_rp() * case.temporal.n_k()),
        ] {
            if !ptr.is_null() {
                *ptr = value;
            }
        }
        BlendplanStatus::Ok
    })
}

/// Builds and solves a case, writing model and solution files to `out_dir`.
///
/// `solver` is the path of the `blendplan-highs` runner; null searches next
/// to the running executable. A solve that ends without a solution (for
/// example an infeasible model) still returns [`BlendplanStatus::Ok`] and a
/// run handle; query it with [`blendplan_run_has_solution`]. Release the
/// handle with [`blendplan_run_free`].
///
/// # Safety
/// `case` must be null or a live case handle. String arguments must be null
/// or NUL-terminated. `out` must be null or point to writable memory for one
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn blendplan_case_solve(
    case: *const BlendplanCase,
    solver: *const c_char,
    out_dir: *const c_char,
    out: *mut *mut BlendplanRun,
) -> BlendplanStatus {
    guarded(|| {
        let Some(case) = case.as_ref() else {
            return fail(BlendplanStatus::NullPointer, "case is null");
        };
        if out.is_null() {
            return fail(BlendplanStatus::NullPointer, "out is null");
        }
        let out_dir = PathBuf::from(try_status!(required_str(out_dir, "out_dir")));
        let setup = SolverSetup {
            executable: try_status!(optional_str(solver, "solver")).map(PathBuf::from),
            ..SolverSetup::default()
        };
        if let Err(e) = std::fs::create_dir_all(&out_dir) {
            return fail(BlendplanStatus::InvalidInput, format!("{}: {e}", out_dir.display()));
        }
        match run_scenario(&case.system, &case.temporal, &case.config, None, &setup, &out_dir) {
            Ok(run) => {
                *out = Box::into_raw(Box::new(BlendplanRun { run }));
                BlendplanStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Releases a run. Null is ignored.
///
/// # Safety
/// `run` must be null or a handle from [`blendplan_case_solve`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn blendplan_run_free(run: *mut BlendplanRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Returns 1 if the run holds a solution and 0 otherwise (including null).
///
/// # Safety
/// `run` must be null or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn blendplan_run_has_solution(run: *const BlendplanRun) -> i32 {
    run.as_ref().map_or(0, |r| i32::from(r.run.report.has_solution()))
}

/// Solver status of the run as a static NUL-terminated string, or null.
///
/// # Safety
/// `run` must be null or a live run handle.
#[no_mangle]
pub unsafe extern "C" fn blendplan_run_status(run: *const BlendplanRun) -> *const c_char {
    let Some(r) = run.as_ref() else {
        return std::ptr::null();
    };
    let text: &'static str = match r.run.report.status.as_str() {
        "optimal" => "optimal\0",
        "gap_reached" => "gap_reached\0",
        "infeasible" => "infeasible\0",
        "unbounded" => "unbounded\0",
        _ => "error\0",
    };
    text.as_ptr().cast()
}

/// Reads one number from a solved run.
///
/// # Safety
/// `run` must be null or a live run handle; `out` must be null or writable.
unsafe fn read_solved(
    run: *const BlendplanRun,
    out: *mut f64,
    get: impl FnOnce(&ScenarioRun) -> Result<f64, BlendplanStatus>,
) -> BlendplanStatus {
    guarded(|| {
        let Some(r) = run.as_ref() else {
            return fail(BlendplanStatus::NullPointer, "run is null");
        };
        if out.is_null() {
            return fail(BlendplanStatus::NullPointer, "out is null");
        }
        if !r.run.report.has_solution() {
            return fail(
                BlendplanStatus::NoSolution,
                format!("run ended with status {}", r.run.report.status.as_str()),
            );
        }
        *out = try_status!(get(&r.run));
        BlendplanStatus::Ok
    })
}

/// Objective value (M€) of a solved run.
///
/// # Safety
/// `run` must be null or a live run handle. `out` must be null or point to
/// writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn blendplan_run_objective(run: *const BlendplanRun, out: *mut f64) -> BlendplanStatus {
    read_solved(run, out, |r| {
        r.report
            .objective
            .ok_or_else(|| fail(BlendplanStatus::NoSolution, "solver reported no objective"))
    })
}

/// Value of the model variable called `name` in a solved run.
///
/// # Safety
/// `run` must be null or a live run handle. `name` must be null or
/// NUL-terminated. `out` must be null or point to writable memory for one
/// `double`.
#[no_mangle]
pub unsafe extern "C" fn blendplan_run_value(
    run: *const BlendplanRun,
    name: *const c_char,
    out: *mut f64,
) -> BlendplanStatus {
    let name = try_status!(required_str(name, "name"));
    read_solved(run, out, |r| {
        r.report
            .values
            .get(name)
            .copied()
            .ok_or_else(|| fail(BlendplanStatus::NotFound, format!("no variable named `{name}`")))
    })
}

/// Weighted hydrogen non-served as a share of hydrogen deployment.
///
/// # Safety
/// `run` must be null or a live run handle. `out` must be null or point to
/// writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn blendplan_run_h2ns_share(run: *const BlendplanRun, out: *mut f64) -> BlendplanStatus {
    read_solved(run, out, |r| Ok(r.report.h2ns_share()))
}
