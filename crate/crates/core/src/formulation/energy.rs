//! Power sector, gas supply and demand, thermal units and the renewable
//! policy.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use super::names;
use super::{Builder, CostTerm, DemandBlendVars, NonSuppliedVars};
use crate::backend::{LinExpr, Sense, VarId, VarKind};
use crate::error::{Error, Result};
use crate::system::{Unit, UnitKind};

/// Unit-commitment variables of one thermal unit, aligned with the slots.
struct Commitment {
    p: Vec<VarId>,
    u: Vec<VarId>,
    y: Vec<VarId>,
}

impl Builder<'_> {
    pub(super) fn add_power_sector(&mut self) -> Result<()> {
        let sys = self.sys;
        let slots = self.slots.clone();
        let has_demand = sys.demand.power.values().any(|&d| d > 0.0);
        let c_ens = if has_demand {
            self.price(self.cfg.c_ens, "c_ens", "power demand")?
        } else {
            self.cfg.c_ens.unwrap_or(0.0)
        };
        for (s, &(rp, k)) in slots.iter().enumerate() {
            let w = self.weights[s];
            for bus in &sys.buses {
                let d = sys.demand.power(rp, k, &bus.id);
                let pns = self.var(names::slot("pns", rp, k, &bus.id), VarKind::Continuous, 0.0, d)?;
                self.cost(CostTerm::EnergyNotSupplied, &LinExpr::term(pns, c_ens), w);
                let bal = self.power(s, &bus.id);
                bal.add(pns, 1.0);
                bal.add_constant(-d);
            }
            if sys.lines.is_empty() {
                continue;
            }
            let mut theta = Vec::with_capacity(sys.buses.len());
            for (i, bus) in sys.buses.iter().enumerate() {
                let (lo, hi) = if i == 0 { (0.0, 0.0) } else { (-PI, PI) };
                theta.push(self.var(names::slot("theta", rp, k, &bus.id), VarKind::Continuous, lo, hi)?);
            }
            let bus_index = |id: &str| sys.buses.iter().position(|b| b.id == id).expect("lines are linked");
            for l in &sys.lines {
                let e = names::line(l);
                let f = self.var(
                    names::slot("f_line", rp, k, &e),
                    VarKind::Continuous,
                    -l.capacity,
                    l.capacity,
                )?;
                let (ti, tj) = (theta[bus_index(&l.from_bus)], theta[bus_index(&l.to_bus)]);
                let dc = LinExpr::term(f, 1.0).with(ti, -l.susceptance).with(tj, l.susceptance);
                if l.existing {
                    self.con(names::slot("dc_flow", rp, k, &e), &dc, Sense::Eq, 0.0)?;
                } else {
                    let x = self.invest[&e];
                    let big = l.susceptance.abs() * 2.0 * PI;
                    self.con(
                        names::slot("dc_flow_up", rp, k, &e),
                        &dc.clone().with(x, big),
                        Sense::Le,
                        big,
                    )?;
                    self.con(names::slot("dc_flow_lo", rp, k, &e), &dc.with(x, -big), Sense::Ge, -big)?;
                    let gate = LinExpr::term(f, 1.0);
                    self.con(
                        names::slot("line_cap_up", rp, k, &e),
                        &gate.clone().with(x, -l.capacity),
                        Sense::Le,
                        0.0,
                    )?;
                    self.con(
                        names::slot("line_cap_lo", rp, k, &e),
                        &gate.with(x, l.capacity),
                        Sense::Ge,
                        0.0,
                    )?;
                }
                self.power(s, &l.from_bus).add(f, -1.0);
                self.power(s, &l.to_bus).add(f, 1.0);
            }
        }
        Ok(())
    }

    pub(super) fn add_gas_wells(&mut self) -> Result<()> {
        let sys = self.sys;
        let wells: Vec<&Unit> = sys.units_of(UnitKind::GasWell).collect();
        if wells.is_empty() {
            return Ok(());
        }
        let c_ch4 = self.price(self.cfg.c_ch4, "c_ch4", "a gas well")?;
        for u in wells {
            let node = self.node_of(u);
            let cap = self.fleet(u).scaled(u.p_max());
            for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
                let p = self.nonneg(names::slot("p_ch4", rp, k, &u.id))?;
                let mut e = LinExpr::term(p, 1.0);
                e.add_expr(&cap, -1.0);
                self.con(names::slot("well_cap", rp, k, &u.id), &e, Sense::Le, 0.0)?;
                self.ch4(s, node).add(p, 1.0);
                let w = self.weights[s];
                self.cost(CostTerm::GasSupply, &LinExpr::term(p, c_ch4), w);
            }
        }
        Ok(())
    }

    pub(super) fn add_demand_blending(&mut self) -> Result<()> {
        let sys = self.sys;
        let (h_ch4, h_h2) = (sys.constants.h_ch4, sys.constants.h_h2);
        let needs_co2 = sys
            .demand
            .gas
            .keys()
            .any(|(_, _, _, c)| sys.demand.class(c).is_some_and(|c| c.is_industry() && c.emis > 0.0));
        let c_co2 = if needs_co2 {
            self.price(self.cfg.c_co2, "c_co2", "an emitting industry demand class")?
        } else {
            0.0
        };
        for ((rp, k, node, class), &d) in &sys.demand.gas {
            let (rp, k) = (*rp, *k);
            let s = self.slot_of(rp, k);
            let w = self.weights[s];
            let cls = sys
                .demand
                .class(class)
                .ok_or_else(|| Error::Link(format!("gas demand references missing class `{class}`")))?;
            let e = names::demand(node, class);
            let d_ch4 = self.var(names::slot("d_ch4", rp, k, &e), VarKind::Continuous, 0.0, d)?;
            let d_h2 = self.nonneg(names::slot("d_h2", rp, k, &e))?;
            self.con(
                names::slot("blend_energy", rp, k, &e),
                &LinExpr::term(d_ch4, h_ch4).with(d_h2, h_h2),
                Sense::Eq,
                d * h_ch4,
            )?;
            self.con(
                names::slot("sub_max", rp, k, &e),
                &LinExpr::term(d_h2, 1.0).with(d_ch4, -cls.sub_max),
                Sense::Le,
                0.0,
            )?;
            if cls.sub_min > 0.0 {
                self.con(
                    names::slot("sub_min", rp, k, &e),
                    &LinExpr::term(d_h2, 1.0).with(d_ch4, -cls.sub_min),
                    Sense::Ge,
                    0.0,
                )?;
            }
            self.ch4(s, node).add(d_ch4, -1.0);
            self.h2(s, node).add(d_h2, -1.0);
            self.hydrogen_use.add(d_h2, w);
            if cls.is_industry() && cls.emis > 0.0 {
                self.cost(CostTerm::Co2Industry, &LinExpr::term(d_ch4, c_co2 * cls.emis), w);
            }
            self.blends.push(DemandBlendVars {
                rp,
                k,
                node: node.clone(),
                class: class.clone(),
                demand: d,
                d_ch4,
                d_h2,
            });
        }
        for ((rp, k, node, _), &d) in &sys.demand.h2 {
            let s = self.slot_of(*rp, *k);
            let w = self.weights[s];
            self.h2(s, node).add_constant(-d);
            self.hydrogen_use.add_constant(w * d);
        }
        Ok(())
    }

    pub(super) fn add_non_supplied(&mut self) -> Result<()> {
        let sys = self.sys;
        let gas_pairs: BTreeSet<(&str, &str)> = sys
            .demand
            .gas
            .keys()
            .map(|(_, _, n, c)| (n.as_str(), c.as_str()))
            .collect();
        let mut pairs = gas_pairs.clone();
        pairs.extend(sys.demand.h2.keys().map(|(_, _, n, c)| (n.as_str(), c.as_str())));
        if pairs.is_empty() {
            return Ok(());
        }
        let c_h2ns = self.cfg.c_h2ns;
        let c_ch4ns = if gas_pairs.is_empty() {
            0.0
        } else {
            self.price(self.cfg.c_ch4ns, "c_ch4ns", "natural gas demand")?
        };
        let upper = self.ns_upper;
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            let w = self.weights[s];
            for &(node, class) in &pairs {
                let e = names::demand(node, class);
                let h2ns = self.var(names::slot("h2ns", rp, k, &e), VarKind::Continuous, 0.0, upper)?;
                self.h2(s, node).add(h2ns, 1.0);
                self.cost(CostTerm::GasNotSupplied, &LinExpr::term(h2ns, c_h2ns), w);
                let ch4ns = if gas_pairs.contains(&(node, class)) {
                    let v = self.var(names::slot("ch4ns", rp, k, &e), VarKind::Continuous, 0.0, upper)?;
                    self.ch4(s, node).add(v, 1.0);
                    self.cost(CostTerm::GasNotSupplied, &LinExpr::term(v, c_ch4ns), w);
                    Some(v)
                } else {
                    None
                };
                self.non_supplied.push(NonSuppliedVars {
                    rp,
                    k,
                    node: node.to_string(),
                    class: class.to_string(),
                    h2ns,
                    ch4ns,
                });
            }
        }
        Ok(())
    }

    /// Output, commitment and start-up variables with the commitment logic
    /// shared by all thermal units.
    fn add_commitment(&mut self, u: &Unit) -> Result<Commitment> {
        let upper = u.x_max() + u.eu();
        let kind = if upper <= 1.0 {
            VarKind::Binary
        } else {
            VarKind::Integer
        };
        let fleet = self.fleet(u);
        let mut c = Commitment {
            p: Vec::new(),
            u: Vec::new(),
            y: Vec::new(),
        };
        for &(rp, k) in &self.slots.clone() {
            c.p.push(self.nonneg(names::slot("p_e", rp, k, &u.id))?);
            c.u.push(self.var(names::slot("u", rp, k, &u.id), kind, 0.0, upper)?);
            c.y.push(self.var(names::slot("y", rp, k, &u.id), kind, 0.0, upper)?);
        }
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            let (p, on, start) = (c.p[s], c.u[s], c.y[s]);
            let mut e = LinExpr::term(on, 1.0);
            e.add_expr(&fleet, -1.0);
            self.con(names::slot("commit_cap", rp, k, &u.id), &e, Sense::Le, 0.0)?;
            self.con(
                names::slot("gen_max", rp, k, &u.id),
                &LinExpr::term(p, 1.0).with(on, -u.p_max()),
                Sense::Le,
                0.0,
            )?;
            if u.p_min() > 0.0 {
                self.con(
                    names::slot("gen_min", rp, k, &u.id),
                    &LinExpr::term(p, 1.0).with(on, -u.p_min()),
                    Sense::Ge,
                    0.0,
                )?;
            }
            if let Some(prev) = self.ts.predecessor(k) {
                let sp = self.slot_of(rp, prev);
                self.con(
                    names::slot("startup", rp, k, &u.id),
                    &LinExpr::term(start, 1.0).with(on, -1.0).with(c.u[sp], 1.0),
                    Sense::Ge,
                    0.0,
                )?;
            }
        }
        Ok(c)
    }

    pub(super) fn add_gas_thermals(&mut self) -> Result<()> {
        let sys = self.sys;
        let units: Vec<&Unit> = sys.units_of(UnitKind::ThermalGas).collect();
        if units.is_empty() {
            return Ok(());
        }
        let (h_ch4, h_h2) = (sys.constants.h_ch4, sys.constants.h_h2);
        let (b_min, b_max) = (self.cfg.blend_min, self.cfg.blend_max);
        let c_co2 = if units.iter().any(|u| u.emis() > 0.0) {
            self.price(self.cfg.c_co2, "c_co2", "an emitting gas-fired unit")?
        } else {
            0.0
        };
        for u in units {
            let node = self.node_of(u);
            let bus = self.bus_of(u);
            let cs_v = u.params.cs_v.expect("checked by validation");
            let cs_su = u.params.cs_su.unwrap_or(0.0);
            let cs_up = u.params.cs_up.unwrap_or(0.0);
            let var_cost = u.params.c_om.unwrap_or(0.0)
                + if self.cfg.gas_thermal_var_cost {
                    u.params.c_var.unwrap_or(0.0)
                } else {
                    0.0
                };
            let fleet = self.fleet(u);
            let uc = self.add_commitment(u)?;
            self.add_ramps(u, &uc.p, &fleet)?;
            for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
                let w = self.weights[s];
                let wk = self.ts.w_k(k);
                let (p, on, start) = (uc.p[s], uc.u[s], uc.y[s]);
                let ch4_e = self.nonneg(names::slot("cs_ch4_e", rp, k, &u.id))?;
                let h2_e = self.nonneg(names::slot("cs_h2_e", rp, k, &u.id))?;
                let ch4_aux = self.nonneg(names::slot("cs_ch4_aux", rp, k, &u.id))?;
                let h2_aux = self.nonneg(names::slot("cs_h2_aux", rp, k, &u.id))?;
                let aux_need = LinExpr::term(start, cs_su / wk).with(on, cs_up);
                self.con(
                    names::slot("gt_conversion", rp, k, &u.id),
                    &LinExpr::term(ch4_e, h_ch4).with(h2_e, h_h2).with(p, -cs_v),
                    Sense::Eq,
                    0.0,
                )?;
                let mut aux = LinExpr::term(ch4_aux, h_ch4).with(h2_aux, h_h2);
                aux.add_expr(&aux_need, -1.0);
                self.con(names::slot("gt_auxiliary", rp, k, &u.id), &aux, Sense::Eq, 0.0)?;
                let mut cap = LinExpr::term(ch4_e, 1.0);
                cap.add_expr(&fleet, -cs_v * u.p_max() / h_ch4);
                self.con(names::slot("gt_ch4_cap", rp, k, &u.id), &cap, Sense::Le, 0.0)?;
                let mut aux_cap = LinExpr::term(ch4_aux, h_ch4);
                aux_cap.add_expr(&aux_need, -1.0);
                self.con(names::slot("gt_aux_cap", rp, k, &u.id), &aux_cap, Sense::Le, 0.0)?;
                for (tag, h2v, ch4v) in [("e", h2_e, ch4_e), ("aux", h2_aux, ch4_aux)] {
                    self.con(
                        names::slot(&format!("gt_blend_max_{tag}"), rp, k, &u.id),
                        &LinExpr::term(h2v, 1.0).with(ch4v, -b_max),
                        Sense::Le,
                        0.0,
                    )?;
                    if b_min > 0.0 {
                        self.con(
                            names::slot(&format!("gt_blend_min_{tag}"), rp, k, &u.id),
                            &LinExpr::term(h2v, 1.0).with(ch4v, -b_min),
                            Sense::Ge,
                            0.0,
                        )?;
                    }
                }
                self.power(s, bus).add(p, 1.0);
                self.ch4(s, node).add(ch4_e, -1.0).add(ch4_aux, -1.0);
                self.h2(s, node).add(h2_e, -1.0).add(h2_aux, -1.0);
                self.hydrogen_use.add(h2_e, w).add(h2_aux, w);
                self.cost(CostTerm::GasThermalOm, &LinExpr::term(p, var_cost), w);
                self.cost(
                    CostTerm::Co2GasThermal,
                    &LinExpr::term(ch4_e, c_co2 * u.emis()).with(ch4_aux, c_co2 * u.emis()),
                    w,
                );
                self.policy_lhs.add(ch4_e, w * h_ch4 / cs_v);
            }
        }
        Ok(())
    }

    fn add_ramps(&mut self, u: &Unit, p: &[VarId], fleet: &LinExpr) -> Result<()> {
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            let Some(prev) = self.ts.predecessor(k) else { continue };
            let sp = self.slot_of(rp, prev);
            let wk = self.ts.w_k(k);
            if let Some(ru) = u.params.ramp_up {
                let mut e = LinExpr::term(p[s], 1.0).with(p[sp], -1.0);
                e.add_expr(fleet, -ru * wk);
                self.con(names::slot("ramp_up", rp, k, &u.id), &e, Sense::Le, 0.0)?;
            }
            if let Some(rd) = u.params.ramp_dn {
                let mut e = LinExpr::term(p[sp], 1.0).with(p[s], -1.0);
                e.add_expr(fleet, -rd * wk);
                self.con(names::slot("ramp_dn", rp, k, &u.id), &e, Sense::Le, 0.0)?;
            }
        }
        Ok(())
    }

    pub(super) fn add_other_thermals(&mut self) -> Result<()> {
        let sys = self.sys;
        let units: Vec<&Unit> = sys.units_of(UnitKind::ThermalOther).collect();
        if units.is_empty() {
            return Ok(());
        }
        let c_co2 = if units.iter().any(|u| u.emis() > 0.0) {
            self.price(self.cfg.c_co2, "c_co2", "an emitting thermal unit")?
        } else {
            0.0
        };
        for u in units {
            let bus = self.bus_of(u);
            let uc = self.add_commitment(u)?;
            let c_su = u.params.c_su.unwrap_or(0.0);
            let c_up = u.params.c_up.unwrap_or(0.0);
            let c_var = u.params.c_var.unwrap_or(0.0);
            let cs_su = u.params.cs_su.unwrap_or(0.0);
            let cs_up = u.params.cs_up.unwrap_or(0.0);
            let cs_v = u.params.cs_v.unwrap_or(0.0);
            let e_t = u.emis();
            for (s, &(_, k)) in self.slots.clone().iter().enumerate() {
                let w = self.weights[s];
                let wk = self.ts.w_k(k);
                let (p, on, start) = (uc.p[s], uc.u[s], uc.y[s]);
                self.power(s, bus).add(p, 1.0);
                self.cost(
                    CostTerm::ThermalOperation,
                    &LinExpr::term(start, c_su).with(on, c_up).with(p, c_var),
                    w,
                );
                let fuel = LinExpr::term(start, cs_su / wk).with(on, cs_up).with(p, cs_v);
                self.cost(CostTerm::Co2Thermal, &fuel, w * c_co2 * e_t);
                self.policy_lhs.add(p, w);
            }
        }
        Ok(())
    }

    pub(super) fn add_renewables(&mut self) -> Result<()> {
        let sys = self.sys;
        for u in sys.units_of(UnitKind::Renewable) {
            let bus = self.bus_of(u);
            let fleet = self.fleet(u);
            for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
                let w = self.weights[s];
                let p = self.nonneg(names::slot("p_e", rp, k, &u.id))?;
                let mut e = LinExpr::term(p, 1.0);
                e.add_expr(&fleet, -sys.availability(rp, k, &u.id) * u.p_max());
                self.con(names::slot("res_cap", rp, k, &u.id), &e, Sense::Le, 0.0)?;
                self.power(s, bus).add(p, 1.0);
                self.cost(CostTerm::RenewableOm, &LinExpr::term(p, u.c_om()), w);
            }
        }
        Ok(())
    }

    pub(super) fn add_policy(&mut self) -> Result<()> {
        let Some(kappa) = self.cfg.kappa else { return Ok(()) };
        let demand: f64 = self
            .sys
            .demand
            .power
            .iter()
            .map(|((rp, k, _), d)| self.ts.weight(*rp, *k) * d)
            .sum();
        let lhs = std::mem::take(&mut self.policy_lhs);
        let before = self.m.n_constraints();
        self.con("renewable_share".into(), &lhs, Sense::Le, (1.0 - kappa) * demand)?;
        if self.m.n_constraints() == before {
            log::debug!("renewable share constraint has no fossil generation to limit");
        }
        Ok(())
    }

    pub(super) fn slot_of(&self, rp: usize, k: usize) -> usize {
        (rp - 1) * self.ts.n_k() + (k - 1)
    }
}
