//! Nodal pressure reconstruction and pressure profiles along a node path.

use std::path::Path;

use super::{PressureRecord, SolutionReport, SolverSetup, FLOW_TOL};
use crate::backend::{solve, LinExpr, ModelInstance, Sense, VarKind};
use crate::error::{Error, Result};
use crate::formulation::{names, Formulation};
use crate::physics::signed_square;
use crate::system::EnergySystem;
use crate::table::{fmt_f64, write_csv};

/// Penalty per bar² of pipeline-equation mismatch relative to one bar² of
/// pressure-bound slack.
const EQUATION_WEIGHT: f64 = 1e3;
/// Penalty per bar² below the minimum pressure.
const SHORTFALL_WEIGHT: f64 = 2.0;

/// Result of [`reconstruct_pressures`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reconstruction {
    /// Largest mismatch of `F·|F|/R = p_m² − p_n²` over built pipelines (bar²).
    pub max_equation_slack: f64,
    /// Sum of squared-pressure excess above the MOP (bar²).
    pub total_overpressure: f64,
    /// Sum of squared-pressure shortfall below the minimum (bar²).
    pub total_underpressure: f64,
}

/// Finds the nodal pressures that best explain the solved flows of a
/// transport-type solution and stores them in `report`. Pipeline equations and
/// pressure limits are both softened; equation mismatch is penalized much more
/// heavily, so the remaining bound excess shows where the flows need
/// pressures outside the operating window.
pub fn reconstruct_pressures(
    report: &mut SolutionReport,
    f: &Formulation,
    sys: &EnergySystem,
    setup: &SolverSetup,
    workdir: &Path,
) -> Result<Reconstruction> {
    if !report.has_solution() {
        return Err(Error::Audit("no solution to reconstruct pressures from".into()));
    }
    let mut m = ModelInstance::new();
    let mut psqr = Vec::with_capacity(f.slots.len());
    let mut objective = LinExpr::new();
    let mut over = Vec::new();
    let mut under = Vec::new();
    for &(rp, k) in &f.slots {
        let mut row = Vec::with_capacity(sys.nodes.len());
        for n in &sys.nodes {
            let p = m.add_var(
                names::slot("psqr", rp, k, &n.id),
                VarKind::Continuous,
                0.0,
                f64::INFINITY,
            )?;
            let o = m.add_var(
                names::slot("over", rp, k, &n.id),
                VarKind::Continuous,
                0.0,
                f64::INFINITY,
            )?;
            let u = m.add_var(
                names::slot("under", rp, k, &n.id),
                VarKind::Continuous,
                0.0,
                f64::INFINITY,
            )?;
            m.add_con(
                names::slot("upper", rp, k, &n.id),
                &LinExpr::term(p, 1.0).with(o, -1.0),
                Sense::Le,
                n.p_max_sqr,
            )?;
            m.add_con(
                names::slot("lower", rp, k, &n.id),
                &LinExpr::term(p, 1.0).with(u, 1.0),
                Sense::Ge,
                n.p_min_sqr,
            )?;
            objective.add(o, 1.0).add(u, SHORTFALL_WEIGHT);
            over.push(o);
            under.push(u);
            row.push(p);
        }
        psqr.push(row);
    }
    let node_ix = |id: &str| sys.nodes.iter().position(|n| n.id == id).expect("pipelines are linked");
    let mut slacks = Vec::new();
    for r in report.flows.iter().filter(|r| r.built) {
        let s = f.slot_index(r.rp, r.k).expect("flow slots come from the formulation");
        let pipe = f
            .pipes
            .iter()
            .find(|p| p.entity == r.pipe)
            .expect("flow records come from the formulation");
        let (a, b) = (psqr[s][node_ix(&r.from)], psqr[s][node_ix(&r.to)]);
        let pos = m.add_var(
            names::slot("eq_pos", r.rp, r.k, &r.pipe),
            VarKind::Continuous,
            0.0,
            f64::INFINITY,
        )?;
        let neg = m.add_var(
            names::slot("eq_neg", r.rp, r.k, &r.pipe),
            VarKind::Continuous,
            0.0,
            f64::INFINITY,
        )?;
        m.add_con(
            names::slot("pipe_eq", r.rp, r.k, &r.pipe),
            &LinExpr::term(a, 1.0).with(b, -1.0).with(pos, 1.0).with(neg, -1.0),
            Sense::Eq,
            signed_square(r.f_gas) / pipe.r_gas,
        )?;
        objective.add(pos, EQUATION_WEIGHT).add(neg, EQUATION_WEIGHT);
        slacks.push((pos, neg));
    }
    for (c, cv) in sys.compressors.iter().zip(&f.compressors) {
        let p_max_in = sys.node(&c.from_node).expect("compressors are linked").p_max_sqr;
        let boost_cap = p_max_in - (p_max_in.sqrt() - c.max_boost).powi(2);
        for (s, &(rp, k)) in f.slots.iter().enumerate() {
            let flow = value_of(report, f, cv.f_ch4[s]) + value_of(report, f, cv.f_h2[s]);
            if flow <= FLOW_TOL {
                continue;
            }
            let (pm, pn) = (psqr[s][node_ix(&c.from_node)], psqr[s][node_ix(&c.to_node)]);
            m.add_con(
                names::slot("cmp_ratio", rp, k, &cv.entity),
                &LinExpr::term(pn, 1.0).with(pm, -c.ratio_sqr),
                Sense::Le,
                0.0,
            )?;
            let lift = LinExpr::term(pn, 1.0).with(pm, -1.0);
            m.add_con(names::slot("cmp_lift_lo", rp, k, &cv.entity), &lift, Sense::Ge, 0.0)?;
            m.add_con(
                names::slot("cmp_lift_hi", rp, k, &cv.entity),
                &lift,
                Sense::Le,
                boost_cap,
            )?;
        }
    }
    m.add_objective(&objective);
    let opts = setup.options(0.0, None)?;
    let sol = solve(&m, workdir, &opts)?;
    if !sol.status.has_solution() {
        return Err(Error::Audit(format!(
            "pressure reconstruction ended with status {}",
            sol.status.as_str()
        )));
    }
    let x = m.values_from(&sol.values);
    report.pressures = f
        .slots
        .iter()
        .enumerate()
        .flat_map(|(s, &(rp, k))| {
            let x = &x;
            let psqr = &psqr;
            sys.nodes.iter().enumerate().map(move |(i, n)| PressureRecord {
                rp,
                k,
                node: n.id.clone(),
                p_sqr: x[psqr[s][i].index()],
            })
        })
        .collect();
    report.pressures_reconstructed = true;
    Ok(Reconstruction {
        max_equation_slack: slacks
            .iter()
            .map(|(p, n)| x[p.index()] + x[n.index()])
            .fold(0.0, f64::max),
        total_overpressure: over.iter().map(|o| x[o.index()]).sum(),
        total_underpressure: under.iter().map(|u| x[u.index()]).sum(),
    })
}

fn value_of(report: &SolutionReport, f: &Formulation, id: crate::backend::VarId) -> f64 {
    report.values.get(&f.model.var(id).name).copied().unwrap_or(0.0)
}

/// One point of a pressure profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub rp: usize,
    pub k: usize,
    /// Position of the node along the path, starting at 1.
    pub position: usize,
    pub node: String,
    pub pressure: f64,
    pub p_min: f64,
    pub mop: f64,
}

/// Pressures (bar) along `path` for every slot, with each node's limits.
pub fn pressure_profile(report: &SolutionReport, sys: &EnergySystem, path: &[String]) -> Result<Vec<ProfileRow>> {
    let mut slots: Vec<(usize, usize)> = report.pressures.iter().map(|p| (p.rp, p.k)).collect();
    slots.sort_unstable();
    slots.dedup();
    let mut rows = Vec::with_capacity(slots.len() * path.len());
    for (rp, k) in slots {
        for (i, id) in path.iter().enumerate() {
            let node = sys
                .node(id)
                .ok_or_else(|| Error::Config(format!("profile node `{id}` is not a gas node")))?;
            let p = report
                .pressures
                .iter()
                .find(|p| p.rp == rp && p.k == k && p.node == *id)
                .ok_or_else(|| Error::Config(format!("no pressure for node `{id}` in rp {rp}, k {k}")))?;
            rows.push(ProfileRow {
                rp,
                k,
                position: i + 1,
                node: id.clone(),
                pressure: p.p_sqr.max(0.0).sqrt(),
                p_min: node.p_min_sqr.sqrt(),
                mop: node.p_max_sqr.sqrt(),
            });
        }
    }
    Ok(rows)
}

/// Writes `rp,k,position,node,pressure_bar,p_min_bar,mop_bar` rows.
pub fn write_profile(path: &Path, rows: &[ProfileRow]) -> Result<()> {
    let out: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.rp.to_string(),
                r.k.to_string(),
                r.position.to_string(),
                r.node.clone(),
                fmt_f64(r.pressure),
                fmt_f64(r.p_min),
                fmt_f64(r.mop),
            ]
        })
        .collect();
    write_csv(
        path,
        &["rp", "k", "position", "node", "pressure_bar", "p_min_bar", "mop_bar"],
        &out,
    )
}
