//! Physical-consistency checks on solved flows and pressures.

use std::collections::BTreeMap;
use std::path::Path;

use super::SolutionReport;
use crate::error::Result;
use crate::system::EnergySystem;
use crate::table::{fmt_f64, write_csv};

/// Absolute tolerance on flows and balance residuals (MSm³/h).
pub const FLOW_TOL: f64 = 1e-6;
/// Absolute tolerance on pressures (bar).
pub const PRESSURE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    /// Hydrogen and natural gas flow in opposite directions.
    Sign,
    /// Hydrogen exceeds the admissible share of a pipeline flow.
    Blend,
    /// A pipeline changes direction within a representative period.
    Reversal,
    /// A nodal pressure exceeds its maximum operating pressure.
    Mop,
    /// A nodal balance does not close.
    Balance,
}

impl ViolationKind {
    pub const ALL: [ViolationKind; 5] = [
        ViolationKind::Sign,
        ViolationKind::Blend,
        ViolationKind::Reversal,
        ViolationKind::Mop,
        ViolationKind::Balance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::Sign => "sign",
            ViolationKind::Blend => "blend",
            ViolationKind::Reversal => "reversal",
            ViolationKind::Mop => "mop",
            ViolationKind::Balance => "balance",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Pipeline, node or constraint name.
    pub entity: String,
    pub rp: Option<usize>,
    pub k: Option<usize>,
    /// Size of the violation in flow units, or bar for `Mop`.
    pub amount: f64,
    pub detail: String,
}

/// Runs the requested checks. `Mop` needs `sys` for the node limits and the
/// report's pressures; it is skipped when either is missing.
pub fn detect_violations(
    report: &SolutionReport,
    sys: Option<&EnergySystem>,
    kinds: &[ViolationKind],
) -> Vec<Violation> {
    let mut out = Vec::new();
    if !report.has_solution() {
        return out;
    }
    let want = |k: ViolationKind| kinds.contains(&k);
    if want(ViolationKind::Sign) || want(ViolationKind::Blend) {
        for r in report.flows.iter().filter(|r| r.built) {
            let opposite = (r.f_h2 > FLOW_TOL && r.f_ch4 < -FLOW_TOL) || (r.f_h2 < -FLOW_TOL && r.f_ch4 > FLOW_TOL);
            if want(ViolationKind::Sign) && opposite {
                out.push(Violation {
                    kind: ViolationKind::Sign,
                    entity: r.pipe.clone(),
                    rp: Some(r.rp),
                    k: Some(r.k),
                    amount: r.f_h2.abs().min(r.f_ch4.abs()),
                    detail: format!("f_h2 = {}, f_ch4 = {}", r.f_h2, r.f_ch4),
                });
            }
            let excess = r.f_h2.abs() - report.blend_max * r.f_ch4.abs();
            if want(ViolationKind::Blend) && (excess > FLOW_TOL || opposite && r.f_h2.abs() > FLOW_TOL) {
                out.push(Violation {
                    kind: ViolationKind::Blend,
                    entity: r.pipe.clone(),
                    rp: Some(r.rp),
                    k: Some(r.k),
                    amount: if opposite { r.f_h2.abs() } else { excess },
                    detail: format!(
                        "f_h2 = {}, f_ch4 = {}, blend limit {}",
                        r.f_h2, r.f_ch4, report.blend_max
                    ),
                });
            }
        }
    }
    if want(ViolationKind::Reversal) {
        let mut extremes: BTreeMap<(&str, usize), (f64, f64)> = BTreeMap::new();
        for r in report.flows.iter().filter(|r| r.built) {
            let e = extremes.entry((&r.pipe, r.rp)).or_insert((0.0, 0.0));
            e.0 = e.0.max(r.f_gas);
            e.1 = e.1.min(r.f_gas);
        }
        for ((pipe, rp), (hi, lo)) in extremes {
            if hi > FLOW_TOL && lo < -FLOW_TOL {
                out.push(Violation {
                    kind: ViolationKind::Reversal,
                    entity: pipe.to_string(),
                    rp: Some(rp),
                    k: None,
                    amount: hi.min(-lo),
                    detail: format!("f_gas ranges over [{lo}, {hi}]"),
                });
            }
        }
    }
    if want(ViolationKind::Mop) {
        if let Some(sys) = sys {
            for p in &report.pressures {
                let Some(node) = sys.node(&p.node) else { continue };
                let over = p.p_sqr.max(0.0).sqrt() - node.p_max_sqr.sqrt();
                if over > PRESSURE_TOL {
                    out.push(Violation {
                        kind: ViolationKind::Mop,
                        entity: p.node.clone(),
                        rp: Some(p.rp),
                        k: Some(p.k),
                        amount: over,
                        detail: format!(
                            "{:.4} bar against a limit of {:.4} bar",
                            p.p_sqr.max(0.0).sqrt(),
                            node.p_max_sqr.sqrt()
                        ),
                    });
                }
            }
        }
    }
    if want(ViolationKind::Balance) {
        for (name, res) in &report.balance_residuals {
            if res.abs() > FLOW_TOL {
                out.push(Violation {
                    kind: ViolationKind::Balance,
                    entity: name.clone(),
                    rp: None,
                    k: None,
                    amount: res.abs(),
                    detail: format!("residual {res}"),
                });
            }
        }
    }
    out
}

/// Writes `kind,entity,rp,k,amount,detail` rows.
pub fn write_violations(path: &Path, violations: &[Violation]) -> Result<()> {
    let rows: Vec<Vec<String>> = violations
        .iter()
        .map(|v| {
            vec![
                v.kind.as_str().to_string(),
                v.entity.clone(),
                v.rp.map(|x| x.to_string()).unwrap_or_default(),
                v.k.map(|x| x.to_string()).unwrap_or_default(),
                fmt_f64(v.amount),
                v.detail.clone(),
            ]
        })
        .collect();
    write_csv(path, &["kind", "entity", "rp", "k", "amount", "detail"], &rows)
}
