//! Scenario runs, solution reports, violation detection and fixed-investment
//! audits.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use crate::backend::{solve, ModelFormat, Solution, SolveOptions, SolveStatus};
use crate::error::{Error, Result};
use crate::formulation::{CostBreakdown, Formulation};
use crate::system::{EnergySystem, FlowFormulation, ScenarioConfig};
use crate::table::{fmt_f64, write_csv, Table};
use crate::temporal::TemporalStructure;

mod audit;
mod pressure;
mod violations;

pub use audit::{audit_fixed_investments, RegretReport};
pub use pressure::{pressure_profile, reconstruct_pressures, write_profile, ProfileRow, Reconstruction};
pub use violations::{detect_violations, write_violations, Violation, ViolationKind, FLOW_TOL, PRESSURE_TOL};

/// Where and how models are solved.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSetup {
    /// Solver executable; discovered when absent.
    pub executable: Option<PathBuf>,
    pub format: ModelFormat,
}

impl Default for SolverSetup {
    fn default() -> Self {
        SolverSetup {
            executable: None,
            format: ModelFormat::Lp,
        }
    }
}

impl SolverSetup {
    pub fn options(&self, gap: f64, time_limit: Option<f64>) -> Result<SolveOptions> {
        let mut opts = SolveOptions::discover(self.executable.as_deref(), gap, time_limit)?;
        opts.format = self.format;
        Ok(opts)
    }
}

/// Gas flows of one pipeline in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRecord {
    pub pipe: String,
    pub from: String,
    pub to: String,
    pub rp: usize,
    pub k: usize,
    pub f_gas: f64,
    pub f_ch4: f64,
    pub f_h2: f64,
    /// Candidate pipelines that were not built carry no flow.
    pub built: bool,
}

/// Squared pressure of one node in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureRecord {
    pub rp: usize,
    pub k: usize,
    pub node: String,
    pub p_sqr: f64,
}

/// Everything read back from one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    pub flow: FlowFormulation,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub gap: Option<f64>,
    pub blend_max: f64,
    /// Every variable value by name (empty without a solution).
    pub values: BTreeMap<String, f64>,
    pub investments: BTreeMap<String, f64>,
    pub costs: CostBreakdown,
    pub flows: Vec<FlowRecord>,
    /// Solved pressures for B-PP, otherwise reconstructed ones if requested.
    pub pressures: Vec<PressureRecord>,
    pub pressures_reconstructed: bool,
    /// Weighted non-supplied hydrogen (MSm³).
    pub h2ns_total: f64,
    /// Weighted non-supplied natural gas (MSm³).
    pub ch4ns_total: f64,
    /// Weighted hydrogen consumption (MSm³).
    pub hydrogen_use: f64,
    /// `(constraint, lhs − rhs)` of every nodal balance.
    pub balance_residuals: Vec<(String, f64)>,
}

impl SolutionReport {
    pub fn has_solution(&self) -> bool {
        self.status.has_solution()
    }

    /// Reads a solution into a report using the handles in `f`.
    pub fn from_solution(f: &Formulation, sol: &Solution, cfg: &ScenarioConfig) -> Self {
        let mut report = SolutionReport {
            flow: f.flow,
            status: sol.status,
            objective: sol.objective,
            gap: sol.gap,
            blend_max: cfg.blend_max,
            values: BTreeMap::new(),
            investments: BTreeMap::new(),
            costs: CostBreakdown::default(),
            flows: Vec::new(),
            pressures: Vec::new(),
            pressures_reconstructed: false,
            h2ns_total: 0.0,
            ch4ns_total: 0.0,
            hydrogen_use: 0.0,
            balance_residuals: Vec::new(),
        };
        if !sol.status.has_solution() {
            return report;
        }
        let x = f.model.values_from(&sol.values);
        report.values = f
            .model
            .vars()
            .iter()
            .zip(&x)
            .map(|(v, &val)| (v.name.clone(), val))
            .collect();
        report.investments = f.investments.iter().map(|(n, id)| (n.clone(), x[id.index()])).collect();
        report.costs = f.costs(&x);
        for p in &f.pipes {
            let built = !p.candidate
                || report
                    .investments
                    .get(&format!("x__{}", p.entity))
                    .is_some_and(|v| *v > 0.5);
            for (s, &(rp, k)) in f.slots.iter().enumerate() {
                report.flows.push(FlowRecord {
                    pipe: p.entity.clone(),
                    from: p.from.clone(),
                    to: p.to.clone(),
                    rp,
                    k,
                    f_gas: x[p.f_gas[s].index()],
                    f_ch4: x[p.f_ch4[s].index()],
                    f_h2: x[p.f_h2[s].index()],
                    built,
                });
            }
        }
        report.pressures = f
            .pressures
            .iter()
            .map(|((rp, k, node), id)| PressureRecord {
                rp: *rp,
                k: *k,
                node: node.clone(),
                p_sqr: x[id.index()],
            })
            .collect();
        for ns in &f.non_supplied {
            let w = f.weights[f.slot_index(ns.rp, ns.k).expect("slot exists")];
            report.h2ns_total += w * x[ns.h2ns.index()];
            if let Some(c) = ns.ch4ns {
                report.ch4ns_total += w * x[c.index()];
            }
        }
        report.hydrogen_use = f.hydrogen_use.eval(&x);
        let wanted: HashSet<&str> = f
            .balances
            .hydrogen
            .iter()
            .chain(&f.balances.natural_gas)
            .chain(&f.balances.power)
            .map(String::as_str)
            .collect();
        report.balance_residuals = f
            .model
            .constraints()
            .iter()
            .filter(|c| wanted.contains(c.name.as_str()))
            .map(|c| (c.name.clone(), c.residual(&x)))
            .collect();
        report
    }

    /// Share of non-supplied hydrogen in total hydrogen deployment.
    pub fn h2ns_share(&self) -> f64 {
        let total = self.hydrogen_use + self.h2ns_total;
        if total > 0.0 {
            self.h2ns_total / total
        } else {
            0.0
        }
    }

    /// Writes `variable,value` rows in model order.
    pub fn write_solution_csv(&self, f: &Formulation, path: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> = f
            .model
            .vars()
            .iter()
            .filter_map(|v| self.values.get(&v.name).map(|x| vec![v.name.clone(), fmt_f64(*x)]))
            .collect();
        write_csv(path, &["variable", "value"], &rows)
    }
}

/// Reads a `solution.csv` written by [`SolutionReport::write_solution_csv`].
pub fn read_solution_csv(path: &Path) -> Result<BTreeMap<String, f64>> {
    let table = Table::read(path, &["variable", "value"], &["variable", "value"])?
        .ok_or_else(|| Error::io(path, std::io::Error::from(std::io::ErrorKind::NotFound)))?;
    let mut out = BTreeMap::new();
    for row in table.rows() {
        out.insert(row.str("variable")?.to_string(), row.f64("value")?);
    }
    Ok(out)
}

/// Investment values (`x__*`) of a plan read from a solution file.
pub fn investments_of(values: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    values
        .iter()
        .filter(|(k, _)| k.starts_with("x__"))
        .map(|(k, v)| (k.clone(), *v))
        .collect()
}

/// Output of [`run_scenario`].
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub formulation: Formulation,
    pub solution: Solution,
    pub report: SolutionReport,
}

/// Builds, writes, solves and reads back one scenario. Model, solution and
/// reports are written to `out_dir`. An infeasible model is not an error: the
/// report carries the status and `infeasible.txt` lists the constraints.
pub fn run_scenario(
    sys: &EnergySystem,
    ts: &TemporalStructure,
    cfg: &ScenarioConfig,
    fixed: Option<&BTreeMap<String, f64>>,
    setup: &SolverSetup,
    out_dir: &Path,
) -> Result<ScenarioRun> {
    let formulation = Formulation::build_with_investments(sys, ts, cfg, fixed)?;
    log::info!(
        "{} model: {} variables ({} discrete), {} constraints",
        cfg.flow_formulation,
        formulation.model.n_vars(),
        formulation.model.n_discrete(),
        formulation.model.n_constraints()
    );
    let opts = setup.options(cfg.milp_gap, cfg.time_limit)?;
    let solution = solve(&formulation.model, out_dir, &opts)?;
    log::info!(
        "solver finished: {} (objective {:?}, gap {:?}) in {:.2?}",
        solution.status.as_str(),
        solution.objective,
        solution.gap,
        solution.wall_time
    );
    let report = SolutionReport::from_solution(&formulation, &solution, cfg);
    if report.has_solution() {
        report.write_solution_csv(&formulation, &out_dir.join("solution.csv"))?;
        report.costs.write_csv(&out_dir.join("costs.csv"))?;
        check_invariants(&formulation, &report);
    } else {
        write_infeasibility_dump(&formulation, &solution, &out_dir.join("infeasible.txt"))?;
    }
    Ok(ScenarioRun {
        formulation,
        solution,
        report,
    })
}

fn check_invariants(f: &Formulation, report: &SolutionReport) {
    if let Some(obj) = report.objective {
        let total = report.costs.total();
        if (obj - total).abs() > 1e-6 * obj.abs().max(1.0) {
            log::warn!("objective {obj} differs from the cost breakdown total {total}");
        }
    }
    let mut kinds = vec![ViolationKind::Balance];
    if f.flow != FlowFormulation::Stp {
        kinds.extend([ViolationKind::Sign, ViolationKind::Blend, ViolationKind::Reversal]);
    }
    for v in detect_violations(report, None, &kinds) {
        log::warn!("unexpected {} violation on {}: {}", v.kind.as_str(), v.entity, v.detail);
    }
}

fn write_infeasibility_dump(f: &Formulation, sol: &Solution, path: &Path) -> Result<()> {
    use std::fmt::Write as _;
    let mut families: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for c in f.model.constraints() {
        let family = c.name.split("__").next().unwrap_or(&c.name);
        families.entry(family).or_default().push(&c.name);
    }
    let mut s = String::new();
    let _ = writeln!(s, "status: {}", sol.status.as_str());
    let _ = writeln!(
        s,
        "The solver proved no feasible point exists. Constraint families, most specific first:"
    );
    let mut ordered: Vec<_> = families.into_iter().collect();
    ordered.sort_by_key(|(name, members)| (members.len(), *name));
    for (family, members) in &ordered {
        let _ = writeln!(s, "\n[{family}] {} constraints", members.len());
        for m in members {
            let _ = writeln!(s, "  {m}");
        }
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
