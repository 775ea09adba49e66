//! External solver driver and solution-file parsers.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use super::model::ModelInstance;
use super::writer::{emit, fixed_mps_column_names, ModelFormat};
use crate::error::{Error, Result};

/// Environment variable naming the solver executable.
pub const SOLVER_ENV: &str = "BLENDPLAN_SOLVER";

/// Relative gap above which a solution is reported as `GapReached`.
pub const OPTIMAL_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    GapReached,
    Infeasible,
    Unbounded,
    Error,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::GapReached => "gap_reached",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::Error => "error",
        }
    }

    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::GapReached)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub gap: Option<f64>,
    pub values: BTreeMap<String, f64>,
    pub wall_time: Duration,
}

/// Solution-file dialect of the configured executable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverFlavor {
    /// HiGHS command line interface or the bundled `blendplan-highs` runner.
    Highs,
    Cbc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub executable: PathBuf,
    pub flavor: SolverFlavor,
    pub format: ModelFormat,
    pub gap: f64,
    pub time_limit: Option<f64>,
}

impl SolveOptions {
    /// Options for the discovered solver with LP output.
    pub fn discover(explicit: Option<&Path>, gap: f64, time_limit: Option<f64>) -> Result<Self> {
        let executable = discover_solver(explicit)?;
        let flavor = flavor_of(&executable);
        Ok(SolveOptions {
            executable,
            flavor,
            format: ModelFormat::Lp,
            gap,
            time_limit,
        })
    }
}

fn flavor_of(path: &Path) -> SolverFlavor {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_ascii_lowercase())
        .unwrap_or_default();
    if name.contains("cbc") {
        SolverFlavor::Cbc
    } else {
        SolverFlavor::Highs
    }
}

/// Finds a solver executable. Order: explicit path, `BLENDPLAN_SOLVER`,
/// `blendplan-highs` next to the running executable (or its parent
/// directory), then `blendplan-highs`, `highs` and `cbc` on `PATH`.
pub fn discover_solver(explicit: Option<&Path>) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return resolve(p).ok_or_else(|| Error::Environment(format!("solver `{}` not found", p.display())));
    }
    if let Some(p) = std::env::var_os(SOLVER_ENV) {
        let p = PathBuf::from(p);
        return resolve(&p).ok_or_else(|| {
            Error::Environment(format!(
                "{SOLVER_ENV} points to `{}`, which does not exist",
                p.display()
            ))
        });
    }
    let runner = format!("blendplan-highs{}", std::env::consts::EXE_SUFFIX);
    if let Ok(exe) = std::env::current_exe() {
        for dir in exe.ancestors().skip(1).take(2) {
            let candidate = dir.join(&runner);
            if candidate.is_file() {
                return Ok(candidate);
            }
        }
    }
    for name in ["blendplan-highs", "highs", "cbc"] {
        if let Some(p) = resolve(Path::new(name)) {
            return Ok(p);
        }
    }
    Err(Error::Environment(format!(
        "no MILP solver found; build `blendplan-highs`, put `highs` or `cbc` on PATH, or set {SOLVER_ENV}"
    )))
}

fn resolve(p: &Path) -> Option<PathBuf> {
    if p.components().count() > 1 || p.is_absolute() {
        return p.is_file().then(|| p.to_path_buf());
    }
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join(p)).find(|c| c.is_file())
}

/// Writes `model` into `workdir`, runs the solver and parses its output.
///
/// Files left in `workdir`: `model.lp` or `model.mps`, `model.sol` and
/// `solver.log`.
pub fn solve(model: &ModelInstance, workdir: &Path, opts: &SolveOptions) -> Result<Solution> {
    std::fs::create_dir_all(workdir).map_err(|e| Error::io(workdir, e))?;
    let model_path = workdir.join(format!("model.{}", opts.format.extension()));
    let sol_path = workdir.join("model.sol");
    let log_path = workdir.join("solver.log");
    let text = emit(model, opts.format)?;
    std::fs::write(&model_path, text).map_err(|e| Error::io(&model_path, e))?;
    if sol_path.exists() {
        std::fs::remove_file(&sol_path).map_err(|e| Error::io(&sol_path, e))?;
    }

    let mut cmd = Command::new(&opts.executable);
    match opts.flavor {
        SolverFlavor::Highs => {
            let opt_path = workdir.join("highs.opt");
            let mut options = format!("mip_rel_gap = {}\n", opts.gap);
            if opts.format == ModelFormat::FixedMps {
                options.push_str("mps_parser_type_free = false\n");
            }
            if let Some(t) = opts.time_limit {
                options.push_str(&format!("time_limit = {t}\n"));
            }
            std::fs::write(&opt_path, options).map_err(|e| Error::io(&opt_path, e))?;
            cmd.arg("--model_file")
                .arg(&model_path)
                .arg("--solution_file")
                .arg(&sol_path)
                .arg("--options_file")
                .arg(&opt_path);
        }
        SolverFlavor::Cbc => {
            cmd.arg(&model_path).arg("ratio").arg(opts.gap.to_string());
            if let Some(t) = opts.time_limit {
                cmd.arg("sec").arg(t.to_string());
            }
            cmd.arg("solve").arg("solu").arg(&sol_path);
        }
    }
    log::debug!("running {cmd:?}");
    let start = Instant::now();
    let output = cmd
        .output()
        .map_err(|e| Error::Environment(format!("cannot run `{}`: {e}", opts.executable.display())))?;
    let wall_time = start.elapsed();
    let stdout = String::from_utf8_lossy(&output.stdout).into_owned();
    let stderr = String::from_utf8_lossy(&output.stderr);
    std::fs::write(&log_path, format!("{stdout}{stderr}")).map_err(|e| Error::io(&log_path, e))?;
    if !sol_path.exists() {
        return Err(Error::Protocol(format!(
            "solver exited with {} without writing a solution file; see {}",
            output.status,
            log_path.display()
        )));
    }
    let sol_text = std::fs::read_to_string(&sol_path).map_err(|e| Error::io(&sol_path, e))?;
    let mut solution = match opts.flavor {
        SolverFlavor::Highs => parse_highs_solution(&sol_text, &stdout)?,
        SolverFlavor::Cbc => parse_cbc_solution(&sol_text)?,
    };
    solution.wall_time = wall_time;
    if opts.format == ModelFormat::FixedMps {
        let names: BTreeMap<String, String> = fixed_mps_column_names(model).into_iter().collect();
        let mut renamed = BTreeMap::new();
        for (k, v) in std::mem::take(&mut solution.values) {
            let name = names
                .get(&k)
                .ok_or_else(|| Error::Protocol(format!("solution names unknown column `{k}`")))?;
            renamed.insert(name.clone(), v);
        }
        solution.values = renamed;
    }
    check_columns(model, &solution)?;
    Ok(solution)
}

fn check_columns(model: &ModelInstance, sol: &Solution) -> Result<()> {
    for name in sol.values.keys() {
        if name != super::model::OBJ_CONSTANT_VAR && model.var_id(name).is_none() {
            return Err(Error::Protocol(format!("solution names unknown variable `{name}`")));
        }
    }
    Ok(())
}

/// Parses HiGHS' raw solution file, taking the gap from the solver log.
pub fn parse_highs_solution(text: &str, log: &str) -> Result<Solution> {
    let mut lines = text.lines();
    let header = lines.next().map(str::trim);
    if header != Some("Model status") {
        return Err(Error::Protocol(
            "HiGHS solution file does not start with `Model status`".into(),
        ));
    }
    let model_status = lines
        .next()
        .map(str::trim)
        .ok_or_else(|| Error::Protocol("HiGHS solution file ends after the header".into()))?
        .to_string();
    let mut objective = None;
    let mut values = BTreeMap::new();
    let mut feasible = false;
    let mut in_primal = false;
    let mut columns_left = 0usize;
    for line in lines {
        let line = line.trim();
        if columns_left > 0 {
            let (name, value) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| Error::Protocol(format!("malformed column line `{line}`")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Protocol(format!("malformed column value `{line}`")))?;
            values.insert(name.trim().to_string(), v);
            columns_left -= 1;
            continue;
        }
        if line == "# Primal solution values" {
            in_primal = true;
        } else if line.starts_with("# Dual") || line.starts_with("# Basis") {
            in_primal = false;
        } else if in_primal && line == "Feasible" {
            feasible = true;
        } else if in_primal && line.starts_with("Objective ") {
            let v = line["Objective ".len()..].trim();
            objective = Some(
                v.parse::<f64>()
                    .map_err(|_| Error::Protocol(format!("malformed objective `{v}`")))?,
            );
        } else if in_primal && line.starts_with("# Columns ") {
            columns_left = line["# Columns ".len()..]
                .trim()
                .parse()
                .map_err(|_| Error::Protocol(format!("malformed column count `{line}`")))?;
        }
    }
    if columns_left > 0 {
        return Err(Error::Protocol("HiGHS solution file is truncated".into()));
    }
    let gap = parse_highs_gap(log);
    let status = match model_status.as_str() {
        "Optimal" => {
            if gap.is_some_and(|g| g > OPTIMAL_GAP) {
                SolveStatus::GapReached
            } else {
                SolveStatus::Optimal
            }
        }
        "Infeasible" | "Primal infeasible or unbounded" => SolveStatus::Infeasible,
        "Unbounded" => SolveStatus::Unbounded,
        "Time limit reached" | "Iteration limit reached" | "Solution limit reached" | "Interrupted by user"
            if feasible =>
        {
            SolveStatus::GapReached
        }
        _ => SolveStatus::Error,
    };
    if status.has_solution() && (!feasible || objective.is_none()) {
        return Err(Error::Protocol(format!(
            "HiGHS reports `{model_status}` but the solution file holds no feasible point"
        )));
    }
    let gap = match status {
        SolveStatus::Optimal => Some(gap.unwrap_or(0.0)),
        SolveStatus::GapReached => gap,
        _ => None,
    };
    Ok(Solution {
        status,
        objective: if status.has_solution() { objective } else { None },
        gap,
        values: if status.has_solution() { values } else { BTreeMap::new() },
        wall_time: Duration::ZERO,
    })
}

/// Reads the relative gap from a `blendplan-highs` summary or from the
/// `Gap` line of the HiGHS solving report.
fn parse_highs_gap(log: &str) -> Option<f64> {
    for line in log.lines().rev() {
        let t = line.trim();
        if let Some(v) = t.strip_prefix("relative gap:") {
            let v = v.trim();
            return if v == "inf" {
                None
            } else {
                v.parse().ok().filter(|g: &f64| g.is_finite())
            };
        }
    }
    for line in log.lines().rev() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("Gap") {
            let rest = rest.trim();
            if let Some(pct) = rest.split_whitespace().next().and_then(|w| w.strip_suffix('%')) {
                return pct.parse::<f64>().ok().map(|p| p / 100.0);
            }
            if rest.starts_with("inf") {
                return None;
            }
        }
    }
    None
}

/// Parses a CBC solution file (`solu` output).
pub fn parse_cbc_solution(text: &str) -> Result<Solution> {
    let mut lines = text.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Protocol("empty CBC solution file".into()))?
        .trim();
    let objective = first
        .split("objective value")
        .nth(1)
        .and_then(|v| v.trim().parse::<f64>().ok());
    let lower = first.to_ascii_lowercase();
    let status = if lower.starts_with("optimal") {
        SolveStatus::Optimal
    } else if lower.contains("infeasible") {
        SolveStatus::Infeasible
    } else if lower.contains("unbounded") {
        SolveStatus::Unbounded
    } else if lower.starts_with("stopped") && objective.is_some() {
        SolveStatus::GapReached
    } else {
        SolveStatus::Error
    };
    let mut values = BTreeMap::new();
    if status.has_solution() {
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let fields = if fields.first() == Some(&"**") {
                &fields[1..]
            } else {
                &fields[..]
            };
            if fields.len() < 3 {
                continue;
            }
            let v: f64 = fields[2]
                .parse()
                .map_err(|_| Error::Protocol(format!("malformed CBC column line `{line}`")))?;
            values.insert(fields[1].to_string(), v);
        }
    }
    Ok(Solution {
        status,
        objective: if status.has_solution() { objective } else { None },
        gap: match status {
            SolveStatus::Optimal => Some(0.0),
            _ => None,
        },
        values,
        wall_time: Duration::ZERO,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const RAW: &str = "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 2.5\n# Columns 2\nx 0.5\ny 1\n# Rows 1\nc1 1.5\n\n# Dual solution values\nNone\n";

    #[test]
    fn highs_raw_optimal() {
        let s = parse_highs_solution(RAW, "  relative gap: 0e0\n").unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.objective, Some(2.5));
        assert_eq!(s.values["x"], 0.5);
        assert_eq!(s.values["y"], 1.0);
        assert_eq!(s.values.len(), 2);
    }

    #[test]
    fn highs_gap_from_report() {
        let s = parse_highs_solution(RAW, "Solving report\n  Gap               0.8% (tolerance: 1%)\n").unwrap();
        assert_eq!(s.status, SolveStatus::GapReached);
        assert!((s.gap.unwrap() - 0.008).abs() < 1e-15);
    }

    #[test]
    fn highs_infeasible() {
        let s = parse_highs_solution("Model status\nInfeasible\n\n# Primal solution values\nNone\n", "").unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
        assert!(s.objective.is_none());
    }

    #[test]
    fn highs_time_limit_with_incumbent() {
        let text = RAW.replace("Optimal", "Time limit reached");
        let s = parse_highs_solution(&text, "  relative gap: 5e-2\n").unwrap();
        assert_eq!(s.status, SolveStatus::GapReached);
        assert_eq!(s.gap, Some(0.05));
    }

    #[test]
    fn highs_garbage_is_protocol_error() {
        assert!(matches!(parse_highs_solution("hello", ""), Err(Error::Protocol(_))));
        let truncated = "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 1\n# Columns 3\nx 1\n";
        assert!(matches!(parse_highs_solution(truncated, ""), Err(Error::Protocol(_))));
    }

    #[test]
    fn cbc_solution() {
        let text = "Optimal - objective value 2.50000000\n      0 x                      0.5                       0\n      1 y                        1                       2\n";
        let s = parse_cbc_solution(text).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.objective, Some(2.5));
        assert_eq!(s.values["y"], 1.0);
        let s = parse_cbc_solution("Infeasible - objective value 0.00000000\n").unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
    }

    #[test]
    fn missing_explicit_solver_is_environment_error() {
        let err = discover_solver(Some(Path::new("/nonexistent/solver"))).unwrap_err();
        assert!(matches!(err, Error::Environment(_)));
    }
}
