//! Re-operating a fixed investment plan under another flow formulation.

use std::path::Path;

use super::{
    detect_violations, pressure_profile, run_scenario, write_profile, write_violations, ProfileRow, ScenarioRun,
    SolutionReport, SolverSetup, Violation, ViolationKind,
};
use crate::backend::SolveStatus;
use crate::error::{Error, Result};
use crate::system::{EnergySystem, FlowFormulation, RunMode, ScenarioConfig};
use crate::table::{fmt_opt, write_csv};
use crate::temporal::TemporalStructure;

/// Consequences of operating a plan under a stricter flow formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    pub plan_formulation: FlowFormulation,
    pub audit_formulation: FlowFormulation,
    pub status: SolveStatus,
    pub plan_cost: Option<f64>,
    pub audit_cost: Option<f64>,
    /// Audited minus planned total cost (M€).
    pub cost_delta: Option<f64>,
    /// Weighted non-supplied hydrogen in the audit (MSm³).
    pub h2ns_total: f64,
    /// Non-supplied hydrogen over total hydrogen deployment.
    pub h2ns_share: f64,
    pub ch4ns_total: f64,
    /// Violations of the audited operation.
    pub violations: Vec<Violation>,
    /// Pressure profile along the requested path, when one was given.
    pub profile: Vec<ProfileRow>,
}

impl RegretReport {
    /// Writes `metric,value` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows = vec![
            vec!["plan_formulation".into(), self.plan_formulation.to_string()],
            vec!["audit_formulation".into(), self.audit_formulation.to_string()],
            vec!["status".into(), self.status.as_str().to_string()],
            vec!["plan_cost".into(), fmt_opt(self.plan_cost)],
            vec!["audit_cost".into(), fmt_opt(self.audit_cost)],
            vec!["cost_delta".into(), fmt_opt(self.cost_delta)],
            vec!["h2ns_total".into(), fmt_opt(Some(self.h2ns_total))],
            vec!["h2ns_share".into(), fmt_opt(Some(self.h2ns_share))],
            vec!["ch4ns_total".into(), fmt_opt(Some(self.ch4ns_total))],
            vec!["violations".into(), self.violations.len().to_string()],
        ];
        write_csv(path, &["metric", "value"], &rows)
    }
}

/// Fixes the investments of `plan` and re-optimizes operation under
/// `audit_cfg`. Writes `regret.csv`, `violations.csv` and, with a profile
/// path, `pressure_profile.csv` next to the usual run outputs.
pub fn audit_fixed_investments(
    plan: &SolutionReport,
    sys: &EnergySystem,
    ts: &TemporalStructure,
    audit_cfg: &ScenarioConfig,
    setup: &SolverSetup,
    out_dir: &Path,
    profile_path: Option<&[String]>,
) -> Result<(RegretReport, ScenarioRun)> {
    if !plan.has_solution() {
        return Err(Error::Audit(format!(
            "the plan has no solution to audit (status {})",
            plan.status.as_str()
        )));
    }
    let mut cfg = audit_cfg.clone();
    cfg.mode = RunMode::OperateFixed;
    let run = run_scenario(sys, ts, &cfg, Some(&plan.investments), setup, out_dir)?;
    let report = &run.report;
    let violations = detect_violations(report, Some(sys), &ViolationKind::ALL);
    let profile = match profile_path {
        Some(path) if report.has_solution() && !report.pressures.is_empty() => pressure_profile(report, sys, path)?,
        _ => Vec::new(),
    };
    let regret = RegretReport {
        plan_formulation: plan.flow,
        audit_formulation: cfg.flow_formulation,
        status: report.status,
        plan_cost: plan.objective,
        audit_cost: report.objective,
        cost_delta: plan.objective.zip(report.objective).map(|(p, a)| a - p),
        h2ns_total: report.h2ns_total,
        h2ns_share: report.h2ns_share(),
        ch4ns_total: report.ch4ns_total,
        violations,
        profile,
    };
    regret.write_csv(&out_dir.join("regret.csv"))?;
    write_violations(&out_dir.join("violations.csv"), &regret.violations)?;
    if !regret.profile.is_empty() {
        write_profile(&out_dir.join("pressure_profile.csv"), &regret.profile)?;
    }
    Ok((regret, run))
}
