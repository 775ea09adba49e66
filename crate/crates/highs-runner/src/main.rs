//! Minimal HiGHS command-line front end.
//!
//! Accepts the same core flags as the upstream `highs` executable:
//!
//! ```text
//! blendplan-highs --model_file model.mps --solution_file model.sol \
//!     [--options_file highs.opt] [--time_limit 60] [--mip_rel_gap 0.01]
//! ```
//!
//! The solution file is written in HiGHS' native raw format. After solving a
//! short summary block is printed to stdout.

use std::ffi::{c_void, CString};
use std::process::ExitCode;

use highs_sys::*;

struct Args {
    model_file: String,
    solution_file: Option<String>,
    options_file: Option<String>,
    time_limit: Option<f64>,
    mip_rel_gap: Option<f64>,
}

fn usage() -> ExitCode {
    eprintln!(
        "usage: blendplan-highs [--model_file] FILE [--solution_file FILE] \
         [--options_file FILE] [--time_limit SECONDS] [--mip_rel_gap GAP]"
    );
    ExitCode::from(2)
}

fn parse_args() -> Result<Args, String> {
    let mut model_file = None;
    let mut solution_file = None;
    let mut options_file = None;
    let mut time_limit = None;
    let mut mip_rel_gap = None;
    let mut it = std::env::args().skip(1);
    while let Some(arg) = it.next() {
        let mut value = |flag: &str| it.next().ok_or_else(|| format!("missing value for {flag}"));
        match arg.as_str() {
            "--model_file" => model_file = Some(value("--model_file")?),
            "--solution_file" => solution_file = Some(value("--solution_file")?),
            "--options_file" => options_file = Some(value("--options_file")?),
            "--time_limit" => {
                let v = value("--time_limit")?;
                time_limit = Some(v.parse().map_err(|_| format!("bad time limit {v}"))?);
            }
            "--mip_rel_gap" => {
                let v = value("--mip_rel_gap")?;
                mip_rel_gap = Some(v.parse().map_err(|_| format!("bad gap {v}"))?);
            }
            other if other.starts_with("--") => return Err(format!("unknown flag {other}")),
            other => {
                if model_file.replace(other.to_string()).is_some() {
                    return Err("more than one model file given".into());
                }
            }
        }
    }
    Ok(Args {
        model_file: model_file.ok_or("no model file given")?,
        solution_file,
        options_file,
        time_limit,
        mip_rel_gap,
    })
}

fn status_name(status: HighsInt) -> &'static str {
    match status {
        MODEL_STATUS_NOTSET => "Not Set",
        MODEL_STATUS_LOAD_ERROR => "Load error",
        MODEL_STATUS_MODEL_ERROR => "Model error",
        MODEL_STATUS_PRESOLVE_ERROR => "Presolve error",
        MODEL_STATUS_SOLVE_ERROR => "Solve error",
        MODEL_STATUS_POSTSOLVE_ERROR => "Postsolve error",
        MODEL_STATUS_MODEL_EMPTY => "Empty",
        MODEL_STATUS_OPTIMAL => "Optimal",
        MODEL_STATUS_INFEASIBLE => "Infeasible",
        MODEL_STATUS_UNBOUNDED_OR_INFEASIBLE => "Primal infeasible or unbounded",
        MODEL_STATUS_UNBOUNDED => "Unbounded",
        MODEL_STATUS_REACHED_TIME_LIMIT => "Time limit reached",
        MODEL_STATUS_REACHED_ITERATION_LIMIT => "Iteration limit reached",
        MODEL_STATUS_REACHED_SOLUTION_LIMIT => "Solution limit reached",
        MODEL_STATUS_REACHED_INTERRUPT => "Interrupted by user",
        MODEL_STATUS_REACHED_MEMORY_LIMIT => "Memory limit reached",
        _ => "Unknown",
    }
}

struct Highs(*mut c_void);

impl Drop for Highs {
    fn drop(&mut self) {
        unsafe { Highs_destroy(self.0) }
    }
}

fn c_string(s: &str) -> Result<CString, String> {
    CString::new(s).map_err(|_| format!("interior NUL in {s:?}"))
}

fn run(args: &Args) -> Result<ExitCode, String> {
    let highs = Highs(unsafe { Highs_create() });
    if let Some(options) = &args.options_file {
        let path = c_string(options)?;
        if unsafe { Highs_readOptions(highs.0, path.as_ptr()) } == STATUS_ERROR {
            return Err(format!("cannot read options file {options}"));
        }
    }
    if let Some(limit) = args.time_limit {
        let name = c_string("time_limit")?;
        unsafe { Highs_setDoubleOptionValue(highs.0, name.as_ptr(), limit) };
    }
    if let Some(gap) = args.mip_rel_gap {
        let name = c_string("mip_rel_gap")?;
        unsafe { Highs_setDoubleOptionValue(highs.0, name.as_ptr(), gap) };
    }

    let model = c_string(&args.model_file)?;
    if unsafe { Highs_readModel(highs.0, model.as_ptr()) } == STATUS_ERROR {
        return Err(format!("cannot read model file {}", args.model_file));
    }
    let run_status = unsafe { Highs_run(highs.0) };
    let model_status = unsafe { Highs_getModelStatus(highs.0) };

    if let Some(solution) = &args.solution_file {
        let path = c_string(solution)?;
        if unsafe { Highs_writeSolution(highs.0, path.as_ptr()) } == STATUS_ERROR {
            return Err(format!("cannot write solution file {solution}"));
        }
    }

    let mut gap = 0.0;
    let mut primal = 0.0;
    let mut dual = 0.0;
    unsafe {
        let mip_gap = c_string("mip_gap")?;
        let primal_name = c_string("objective_function_value")?;
        let dual_name = c_string("mip_dual_bound")?;
        Highs_getDoubleInfoValue(highs.0, mip_gap.as_ptr(), &mut gap);
        Highs_getDoubleInfoValue(highs.0, primal_name.as_ptr(), &mut primal);
        Highs_getDoubleInfoValue(highs.0, dual_name.as_ptr(), &mut dual);
    }
    if !gap.is_finite() {
        gap = f64::INFINITY;
    }
    println!("blendplan-highs summary");
    println!("  model status: {}", status_name(model_status));
    println!("  objective: {primal:e}");
    println!("  dual bound: {dual:e}");
    println!("  relative gap: {gap:e}");
    if run_status == STATUS_ERROR {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(args) => args,
        Err(msg) => {
            eprintln!("blendplan-highs: {msg}");
            return usage();
        }
    };
    match run(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("blendplan-highs: {msg}");
            ExitCode::from(1)
        }
    }
}
