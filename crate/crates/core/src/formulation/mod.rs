//! Assembly of the planning MILP from system data, a temporal structure and
//! scenario settings.
//!
//! [`Formulation::build`] adds, in order: investment variables, the power
//! sector, gas supply and demand, gas-fired thermals, hydrogen units,
//! storage, the gas network of the chosen flow formulation, the nodal
//! balances, the renewable policy and finally the objective.

use std::collections::BTreeMap;

use crate::backend::{LinExpr, ModelInstance, Sense, VarId, VarKind};
use crate::error::{Error, Result};
use crate::physics::BreakpointTable;
use crate::system::{EnergySystem, FlowFormulation, RunMode, ScenarioConfig, Unit};
use crate::temporal::TemporalStructure;

mod costs;
mod energy;
mod gasnet;
mod hydrogen;
pub mod names;

pub use costs::{CostBreakdown, CostTerm};

/// Flow variables of one pipeline, indexed like [`Formulation::slots`].
#[derive(Debug, Clone)]
pub struct PipeVars {
    pub entity: String,
    pub from: String,
    pub to: String,
    pub f_max: f64,
    pub r_gas: f64,
    pub candidate: bool,
    pub f_gas: Vec<VarId>,
    pub f_ch4: Vec<VarId>,
    pub f_h2: Vec<VarId>,
    /// Direction binary per representative period (empty for S-TP).
    pub alpha: Vec<VarId>,
    /// Slack of the pressure–flow coupling (B-PP only).
    pub rho: Vec<VarId>,
}

#[derive(Debug, Clone)]
pub struct CompressorVars {
    pub entity: String,
    pub from: String,
    pub to: String,
    pub f_ch4: Vec<VarId>,
    pub f_h2: Vec<VarId>,
}

/// Demand-side blending variables of one `(rp, k, node, class)` gas demand.
#[derive(Debug, Clone)]
pub struct DemandBlendVars {
    pub rp: usize,
    pub k: usize,
    pub node: String,
    pub class: String,
    pub demand: f64,
    pub d_ch4: VarId,
    pub d_h2: VarId,
}

/// Non-supplied hydrogen and natural gas of one `(rp, k, node, class)`.
#[derive(Debug, Clone)]
pub struct NonSuppliedVars {
    pub rp: usize,
    pub k: usize,
    pub node: String,
    pub class: String,
    pub h2ns: VarId,
    pub ch4ns: Option<VarId>,
}

/// Nodal balance constraint names.
#[derive(Debug, Clone, Default)]
pub struct BalanceNames {
    pub hydrogen: Vec<String>,
    pub natural_gas: Vec<String>,
    pub power: Vec<String>,
}

/// A built model together with the handles needed to interpret a solution.
#[derive(Debug, Clone)]
pub struct Formulation {
    pub model: ModelInstance,
    pub flow: FlowFormulation,
    /// Operational slots `(rp, k)` in the order used by per-slot vectors.
    pub slots: Vec<(usize, usize)>,
    /// Slot weights `w_rp * w_k`, aligned with `slots`.
    pub weights: Vec<f64>,
    cost_exprs: Vec<LinExpr>,
    /// Investment variables by variable name.
    pub investments: BTreeMap<String, VarId>,
    pub pipes: Vec<PipeVars>,
    pub compressors: Vec<CompressorVars>,
    /// Squared nodal pressures per `(rp, k, node)` (B-PP only).
    pub pressures: BTreeMap<(usize, usize, String), VarId>,
    pub blends: Vec<DemandBlendVars>,
    pub non_supplied: Vec<NonSuppliedVars>,
    pub balances: BalanceNames,
    /// Breakpoint tables by pipeline entity (B-PP only).
    pub breakpoints: Vec<(String, BreakpointTable)>,
    /// Weighted hydrogen consumed by demand, thermals and fuel cells (MSm³).
    pub hydrogen_use: LinExpr,
    pub big_m: f64,
}

impl Formulation {
    /// Builds the planning model. In [`RunMode::OperateFixed`] use
    /// [`Formulation::build_with_investments`] instead.
    pub fn build(sys: &EnergySystem, ts: &TemporalStructure, cfg: &ScenarioConfig) -> Result<Self> {
        Self::build_with_investments(sys, ts, cfg, None)
    }

    /// Builds the model with every investment variable fixed to the value
    /// found under its name in `fixed`, when given.
    pub fn build_with_investments(
        sys: &EnergySystem,
        ts: &TemporalStructure,
        cfg: &ScenarioConfig,
        fixed: Option<&BTreeMap<String, f64>>,
    ) -> Result<Self> {
        cfg.validate()?;
        sys.check()?;
        if cfg.mode == RunMode::OperateFixed && fixed.is_none() {
            return Err(Error::Config("operate_fixed mode needs investment values".into()));
        }
        let owned;
        let ts = match cfg.mow {
            Some(mow) if mow != ts.mow() => {
                owned = ts
                    .clone()
                    .with_mow(mow)
                    .map_err(|e| Error::Config(format!("mow {mow}: {e}")))?;
                &owned
            }
            _ => ts,
        };
        check_demand_slots(sys, ts)?;
        let mut b = Builder::new(sys, ts, cfg);
        b.add_investments()?;
        b.add_power_sector()?;
        b.add_gas_wells()?;
        b.add_demand_blending()?;
        b.add_non_supplied()?;
        b.add_gas_thermals()?;
        b.add_other_thermals()?;
        b.add_renewables()?;
        b.add_electrolyzers()?;
        b.add_smr()?;
        b.add_fuel_cells()?;
        b.add_storages()?;
        b.add_gas_network()?;
        b.add_balances()?;
        b.add_policy()?;
        if let Some(values) = fixed {
            b.fix_investments(values)?;
        }
        Ok(b.finish())
    }

    /// Evaluates each objective term at `values` (dense, model order).
    pub fn costs(&self, values: &[f64]) -> CostBreakdown {
        let mut out = [0.0; CostTerm::COUNT];
        for (o, e) in out.iter_mut().zip(&self.cost_exprs) {
            *o = e.eval(values);
        }
        CostBreakdown::from_values(out)
    }

    /// Expression of one objective term.
    pub fn cost_expr(&self, term: CostTerm) -> &LinExpr {
        &self.cost_exprs[term.index()]
    }

    /// Position of `(rp, k)` in [`Formulation::slots`].
    pub fn slot_index(&self, rp: usize, k: usize) -> Option<usize> {
        self.slots.iter().position(|&s| s == (rp, k))
    }
}

fn check_demand_slots(sys: &EnergySystem, ts: &TemporalStructure) -> Result<()> {
    let inside = |rp: usize, k: usize| (1..=ts.n_rp()).contains(&rp) && (1..=ts.n_k()).contains(&k);
    let keys = sys
        .demand
        .power
        .keys()
        .map(|(rp, k, _)| (*rp, *k))
        .chain(sys.demand.gas.keys().map(|(rp, k, _, _)| (*rp, *k)))
        .chain(sys.demand.h2.keys().map(|(rp, k, _, _)| (*rp, *k)))
        .chain(sys.availability.keys().map(|(rp, k, _)| (*rp, *k)));
    for (rp, k) in keys {
        if !inside(rp, k) {
            return Err(Error::Config(format!(
                "input refers to slot (rp {rp}, k {k}) outside the temporal structure ({} rp x {} k)",
                ts.n_rp(),
                ts.n_k()
            )));
        }
    }
    Ok(())
}

/// Nodal or bus balance accumulator: supply minus use per `(slot, location)`.
type BalanceMap = BTreeMap<(usize, String), LinExpr>;

struct Builder<'a> {
    sys: &'a EnergySystem,
    ts: &'a TemporalStructure,
    cfg: &'a ScenarioConfig,
    m: ModelInstance,
    slots: Vec<(usize, usize)>,
    weights: Vec<f64>,
    costs: Vec<LinExpr>,
    /// Investment variables by entity.
    invest: BTreeMap<String, VarId>,
    h2_bal: BalanceMap,
    ch4_bal: BalanceMap,
    power_bal: BalanceMap,
    policy_lhs: LinExpr,
    hydrogen_use: LinExpr,
    big_m: f64,
    ns_upper: f64,
    pipes: Vec<PipeVars>,
    compressors: Vec<CompressorVars>,
    pressures: BTreeMap<(usize, usize, String), VarId>,
    blends: Vec<DemandBlendVars>,
    non_supplied: Vec<NonSuppliedVars>,
    balances: BalanceNames,
    breakpoints: Vec<(String, BreakpointTable)>,
}

impl<'a> Builder<'a> {
    fn new(sys: &'a EnergySystem, ts: &'a TemporalStructure, cfg: &'a ScenarioConfig) -> Self {
        let slots: Vec<_> = ts.slots().collect();
        let weights = slots.iter().map(|&(rp, k)| ts.weight(rp, k)).collect();
        let network_m = 10.0 * sys.max_pipeline_capacity();
        let peak_demand = slots
            .iter()
            .map(|&(rp, k)| {
                let total = |t: &BTreeMap<crate::system::GasDemandKey, f64>| {
                    t.iter()
                        .filter(|((r, kk, _, _), _)| *r == rp && *kk == k)
                        .map(|(_, v)| *v)
                        .sum::<f64>()
                };
                total(&sys.demand.gas) + total(&sys.demand.h2)
            })
            .fold(0.0, f64::max);
        let big_m = cfg.big_m.unwrap_or(if network_m > 0.0 {
            network_m
        } else {
            10.0 * peak_demand.max(0.1)
        });
        let ns_upper = cfg.big_m.unwrap_or(big_m.max(10.0 * peak_demand));
        Builder {
            sys,
            ts,
            cfg,
            m: ModelInstance::new(),
            slots,
            weights,
            costs: vec![LinExpr::new(); CostTerm::COUNT],
            invest: BTreeMap::new(),
            h2_bal: BTreeMap::new(),
            ch4_bal: BTreeMap::new(),
            power_bal: BTreeMap::new(),
            policy_lhs: LinExpr::new(),
            hydrogen_use: LinExpr::new(),
            big_m,
            ns_upper,
            pipes: Vec::new(),
            compressors: Vec::new(),
            pressures: BTreeMap::new(),
            blends: Vec::new(),
            non_supplied: Vec::new(),
            balances: BalanceNames::default(),
            breakpoints: Vec::new(),
        }
    }

    fn var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64) -> Result<VarId> {
        self.m.add_var(name, kind, lower, upper)
    }

    fn nonneg(&mut self, name: String) -> Result<VarId> {
        self.m.add_var(name, VarKind::Continuous, 0.0, f64::INFINITY)
    }

    fn con(&mut self, name: String, lhs: &LinExpr, sense: Sense, rhs: f64) -> Result<()> {
        self.m.add_con(name, lhs, sense, rhs)
    }

    fn cost(&mut self, term: CostTerm, expr: &LinExpr, scale: f64) {
        self.costs[term.index()].add_expr(expr, scale);
    }

    /// Installed fleet `x + EU` of a unit.
    fn fleet(&self, u: &Unit) -> LinExpr {
        LinExpr::term(self.invest[&u.id], 1.0).with_constant(u.eu())
    }

    /// A price that must be set because some unit or demand uses it.
    fn price(&self, value: Option<f64>, name: &str, user: &str) -> Result<f64> {
        value.ok_or_else(|| Error::Config(format!("`{name}` must be set because {user} is present")))
    }

    fn node_of<'u>(&self, u: &'u Unit) -> &'u str {
        u.node.as_deref().expect("attachments are checked")
    }

    fn bus_of<'u>(&self, u: &'u Unit) -> &'u str {
        u.bus.as_deref().expect("attachments are checked")
    }

    fn h2(&mut self, s: usize, node: &str) -> &mut LinExpr {
        self.h2_bal.entry((s, node.to_string())).or_default()
    }

    fn ch4(&mut self, s: usize, node: &str) -> &mut LinExpr {
        self.ch4_bal.entry((s, node.to_string())).or_default()
    }

    fn power(&mut self, s: usize, bus: &str) -> &mut LinExpr {
        self.power_bal.entry((s, bus.to_string())).or_default()
    }

    fn add_investments(&mut self) -> Result<()> {
        let sys = self.sys;
        for u in &sys.units {
            let upper = u.x_max();
            let kind = if !self.cfg.integer_invest(u.kind) {
                VarKind::Continuous
            } else if upper <= 1.0 {
                VarKind::Binary
            } else {
                VarKind::Integer
            };
            let x = self.var(names::invest(&u.id), kind, 0.0, upper)?;
            self.invest.insert(u.id.clone(), x);
            let inv = LinExpr::term(x, u.c_inv());
            let om = LinExpr::term(x, u.c_om()).with_constant(u.c_om() * u.eu());
            if u.kind.is_power_unit() {
                self.cost(CostTerm::GenerationInvestment, &inv, 1.0);
            } else if u.kind.is_hydrogen_unit() {
                self.cost(CostTerm::HydrogenInvestment, &inv, 1.0);
                self.cost(CostTerm::HydrogenOm, &om, 1.0);
            } else if u.kind.is_natural_gas_unit() {
                self.cost(CostTerm::GasInvestment, &inv, 1.0);
                self.cost(CostTerm::GasOm, &om, 1.0);
            }
        }
        for l in &sys.lines {
            if !l.existing {
                let e = names::line(l);
                let x = self.var(names::invest(&e), VarKind::Binary, 0.0, l.x_max.min(1.0))?;
                self.invest.insert(e, x);
                self.cost(CostTerm::LineInvestment, &LinExpr::term(x, l.invest_cost), 1.0);
            }
        }
        for p in &sys.pipelines {
            if p.is_candidate() {
                let e = names::pipeline(p);
                let x = self.var(names::invest(&e), VarKind::Binary, 0.0, p.x_max.min(1.0))?;
                self.invest.insert(e, x);
                self.cost(CostTerm::PipelineInvestment, &LinExpr::term(x, p.invest_cost()), 1.0);
            }
        }
        Ok(())
    }

    fn fix_investments(&mut self, values: &BTreeMap<String, f64>) -> Result<()> {
        let ids: Vec<VarId> = self.invest.values().copied().collect();
        for id in ids {
            let v = self.m.var(id);
            let name = v.name.clone();
            let value = *values
                .get(&name)
                .ok_or_else(|| Error::Audit(format!("plan has no value for investment `{name}`")))?;
            let value = if v.kind.is_discrete() { value.round() } else { value };
            let value = value.clamp(v.lower, v.upper);
            self.m.fix(id, value)?;
        }
        Ok(())
    }

    fn add_balances(&mut self) -> Result<()> {
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            for n in &self.sys.nodes {
                let key = (s, n.id.clone());
                if let Some(e) = self.h2_bal.remove(&key) {
                    if let Some(name) = self.balance("h2_balance", rp, k, &n.id, &e)? {
                        self.balances.hydrogen.push(name);
                    }
                }
                if let Some(e) = self.ch4_bal.remove(&key) {
                    if let Some(name) = self.balance("ch4_balance", rp, k, &n.id, &e)? {
                        self.balances.natural_gas.push(name);
                    }
                }
            }
            for bus in &self.sys.buses {
                if let Some(e) = self.power_bal.remove(&(s, bus.id.clone())) {
                    if let Some(name) = self.balance("power_balance", rp, k, &bus.id, &e)? {
                        self.balances.power.push(name);
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds `expr = 0`; returns the name unless the balance is empty.
    fn balance(&mut self, family: &str, rp: usize, k: usize, at: &str, expr: &LinExpr) -> Result<Option<String>> {
        let name = names::slot(family, rp, k, at);
        let before = self.m.n_constraints();
        self.con(name.clone(), expr, Sense::Eq, 0.0).map_err(|_| {
            Error::Config(format!(
                "{family} at `{at}` (rp {rp}, k {k}) has demand but nothing can serve it"
            ))
        })?;
        Ok((self.m.n_constraints() > before).then_some(name))
    }

    fn finish(mut self) -> Formulation {
        for e in &self.costs {
            self.m.add_objective(e);
        }
        Formulation {
            model: self.m,
            flow: self.cfg.flow_formulation,
            slots: self.slots,
            weights: self.weights,
            cost_exprs: self.costs,
            investments: self.invest.keys().map(|e| (names::invest(e), self.invest[e])).collect(),
            pipes: self.pipes,
            compressors: self.compressors,
            pressures: self.pressures,
            blends: self.blends,
            non_supplied: self.non_supplied,
            balances: self.balances,
            breakpoints: self.breakpoints,
            hydrogen_use: self.hydrogen_use,
            big_m: self.big_m,
        }
    }
}
