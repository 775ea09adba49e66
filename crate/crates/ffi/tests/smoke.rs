use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::ptr;

use blendplan::analysis::{run_scenario, SolverSetup};
use blendplan::system::{EnergySystem, ScenarioConfig};
use blendplan::temporal::{TemporalStructure, WeightTargets};
use blendplan_ffi::*;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/corridor")
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = blendplan_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load(config: Option<&str>) -> *mut BlendplanCase {
    let dir = c(fixture().to_str().unwrap());
    let config = config.map(c);
    let mut case = ptr::null_mut();
    let status = unsafe {
        blendplan_case_load(
            dir.as_ptr(),
            ptr::null(),
            config.as_ref().map_or(ptr::null(), |s| s.as_ptr()),
            &mut case,
        )
    };
    assert_eq!(status, BlendplanStatus::Ok, "{}", last_error());
    case
}

fn fixture_config() -> String {
    std::fs::read_to_string(fixture().join("config.toml")).unwrap()
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(blendplan_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn chen_friction_matches_the_library() {
    let mut out = 0.0;
    let status = unsafe { blendplan_chen_friction(1e6, 0.012, 0.6, &mut out) };
    assert_eq!(status, BlendplanStatus::Ok);
    assert_eq!(out, blendplan::physics::chen_friction(1e6, 0.012, 0.6).unwrap());
    let status = unsafe { blendplan_chen_friction(-1.0, 0.012, 0.6, &mut out) };
    assert_eq!(status, BlendplanStatus::InvalidInput);
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { blendplan_chen_friction(1e6, 0.012, 0.6, ptr::null_mut()) },
        BlendplanStatus::NullPointer
    );
}

#[test]
fn null_arguments_are_rejected() {
    let mut case = ptr::null_mut();
    let status = unsafe { blendplan_case_load(ptr::null(), ptr::null(), ptr::null(), &mut case) };
    assert_eq!(status, BlendplanStatus::NullPointer);
    assert!(case.is_null());
    assert!(last_error().contains("system_dir"));
    let status = unsafe {
        blendplan_case_counts(
            ptr::null(),
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, BlendplanStatus::NullPointer);
    assert_eq!(unsafe { blendplan_run_has_solution(ptr::null()) }, 0);
    assert!(unsafe { blendplan_run_status(ptr::null()) }.is_null());
    unsafe {
        blendplan_case_free(ptr::null_mut());
        blendplan_run_free(ptr::null_mut());
    }
}

#[test]
fn bad_inputs_are_reported() {
    let missing = c("/nonexistent/blendplan");
    let mut case = ptr::null_mut();
    let status = unsafe { blendplan_case_load(missing.as_ptr(), ptr::null(), ptr::null(), &mut case) };
    assert_eq!(status, BlendplanStatus::InvalidInput);
    assert!(case.is_null());

    let dir = c(fixture().to_str().unwrap());
    let bad = c("blend_max = \"lots\"");
    let status = unsafe { blendplan_case_load(dir.as_ptr(), ptr::null(), bad.as_ptr(), &mut case) };
    assert_eq!(status, BlendplanStatus::InvalidInput);
    assert!(last_error().contains("configuration"));

    let case = load(Some(&fixture_config()));
    let name = c("darcy");
    assert_eq!(
        unsafe { blendplan_case_set_formulation(case, name.as_ptr()) },
        BlendplanStatus::InvalidInput
    );
    let bytes = [0xffu8, 0];
    assert_eq!(
        unsafe { blendplan_case_set_formulation(case, bytes.as_ptr().cast()) },
        BlendplanStatus::InvalidUtf8
    );
    unsafe { blendplan_case_free(case) };
}

#[test]
fn case_counts_describe_the_fixture() {
    let case = load(Some(&fixture_config()));
    let (mut nodes, mut pipes, mut units, mut slots) = (0, 0, 0, 0);
    let status = unsafe { blendplan_case_counts(case, &mut nodes, &mut pipes, &mut units, &mut slots) };
    assert_eq!(status, BlendplanStatus::Ok);
    assert_eq!((nodes, pipes, units, slots), (3, 2, 4, 2));
    unsafe { blendplan_case_free(case) };
}

#[test]
fn solving_through_the_c_interface_matches_the_library() {
    let text = fixture_config();
    let case = load(Some(&text));
    let formulation = c("bpp");
    assert_eq!(
        unsafe { blendplan_case_set_formulation(case, formulation.as_ptr()) },
        BlendplanStatus::Ok
    );
    let out_dir = tempfile::tempdir().unwrap();
    let out = c(out_dir.path().to_str().unwrap());
    let mut run = ptr::null_mut();
    let status = unsafe { blendplan_case_solve(case, ptr::null(), out.as_ptr(), &mut run) };
    assert_eq!(status, BlendplanStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { blendplan_run_has_solution(run) }, 1);
    let st = unsafe { CStr::from_ptr(blendplan_run_status(run)) };
    assert_eq!(st.to_str().unwrap(), "optimal");

    let mut objective = 0.0;
    assert_eq!(
        unsafe { blendplan_run_objective(run, &mut objective) },
        BlendplanStatus::Ok
    );
    let mut share = -1.0;
    assert_eq!(
        unsafe { blendplan_run_h2ns_share(run, &mut share) },
        BlendplanStatus::Ok
    );
    assert!((0.0..=1.0).contains(&share));
    let mut x_el = -1.0;
    let var = c("x__el");
    assert_eq!(
        unsafe { blendplan_run_value(run, var.as_ptr(), &mut x_el) },
        BlendplanStatus::Ok
    );
    let unknown = c("x__nothing");
    assert_eq!(
        unsafe { blendplan_run_value(run, unknown.as_ptr(), &mut x_el) },
        BlendplanStatus::NotFound
    );
    assert!(out_dir.path().join("solution.csv").exists());

    let mut cfg = ScenarioConfig::parse(&text).unwrap();
    cfg.flow_formulation = "bpp".parse().unwrap();
    let sys = EnergySystem::read_dir(&fixture()).unwrap();
    let ts = TemporalStructure::read_dir(
        &fixture(),
        WeightTargets {
            rp_sum: cfg.year_days,
            hour_sum: cfg.year_hours,
        },
    )
    .unwrap();
    let direct_dir = tempfile::tempdir().unwrap();
    let direct = run_scenario(&sys, &ts, &cfg, None, &SolverSetup::default(), direct_dir.path()).unwrap();
    let expected = direct.report.objective.unwrap();
    assert!((objective - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    assert_eq!(x_el, direct.report.values["x__el"]);

    unsafe {
        blendplan_run_free(run);
        blendplan_case_free(case);
    }
}

#[test]
fn unsolved_runs_have_no_objective() {
    let text = format!("{}\nbig_m = 0.01\n", fixture_config());
    let case = load(Some(&text));
    let out_dir = tempfile::tempdir().unwrap();
    let out = c(out_dir.path().to_str().unwrap());
    let mut run = ptr::null_mut();
    let status = unsafe { blendplan_case_solve(case, ptr::null(), out.as_ptr(), &mut run) };
    assert_eq!(status, BlendplanStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { blendplan_run_has_solution(run) }, 0);
    let mut objective = 0.0;
    assert_eq!(
        unsafe { blendplan_run_objective(run, &mut objective) },
        BlendplanStatus::NoSolution
    );
    assert!(last_error().contains("infeasible"));
    unsafe {
        blendplan_run_free(run);
        blendplan_case_free(case);
    }
}

#[test]
fn missing_solver_is_an_environment_failure() {
    let case = load(Some(&fixture_config()));
    let out_dir = tempfile::tempdir().unwrap();
    let out = c(out_dir.path().to_str().unwrap());
    let solver = c("/nonexistent/highs");
    let mut run = ptr::null_mut();
    let status = unsafe { blendplan_case_solve(case, solver.as_ptr(), out.as_ptr(), &mut run) };
    assert_eq!(status, BlendplanStatus::SolverUnavailable);
    assert!(run.is_null());
    unsafe { blendplan_case_free(case) };
}

#[test]
fn header_declares_the_exported_functions() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/blendplan.h")).unwrap();
    for f in [
        "blendplan_version",
        "blendplan_last_error",
        "blendplan_chen_friction",
        "blendplan_case_load",
        "blendplan_case_free",
        "blendplan_case_set_formulation",
        "blendplan_case_counts",
        "blendplan_case_solve",
        "blendplan_run_free",
        "blendplan_run_has_solution",
        "blendplan_run_status",
        "blendplan_run_objective",
        "blendplan_run_value",
        "blendplan_run_h2ns_share",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from the header");
    }
    assert!(header.contains("typedef struct BlendplanCase BlendplanCase;"));
    assert!(header.contains("BLENDPLAN_STATUS_OK = 0"));
}

#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"blendplan.h\"\n\
         int probe(void) {\n\
           BlendplanCase *c = 0;\n\
           double f = 0.0;\n\
           BlendplanStatus s = blendplan_chen_friction(1e6, 0.012, 0.6, &f);\n\
           blendplan_case_free(c);\n\
           return s == BLENDPLAN_STATUS_OK;\n\
         }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = std::process::Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
}
