//! Electrolyzers, SMR-CCS, fuel cells and all storage fleets.

use super::names;
use super::{Builder, CostTerm};
use crate::backend::{LinExpr, Sense, VarId};
use crate::error::{Error, Result};
use crate::system::{StorageMode, Unit, UnitKind};

/// Carrier a storage unit charges and discharges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Carrier {
    Power,
    Hydrogen,
    NaturalGas,
}

impl Carrier {
    fn var_names(self) -> (&'static str, &'static str) {
        match self {
            Carrier::Power => ("p_e", "cs_e"),
            Carrier::Hydrogen => ("p_h2", "cs_h2"),
            Carrier::NaturalGas => ("p_ch4", "cs_ch4"),
        }
    }
}

/// How a storage unit's state of charge is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SocModel {
    /// Per slot, cyclic within each representative period, anchored to the
    /// initial reserve in full chronology.
    Intra { terminal: bool },
    /// At moving-window checkpoints.
    Inter,
}

impl Builder<'_> {
    pub(super) fn add_electrolyzers(&mut self) -> Result<()> {
        let sys = self.sys;
        for u in sys.units_of(UnitKind::Electrolyzer) {
            let (node, bus) = (self.node_of(u), self.bus_of(u));
            let hpe = u.params.hpe.expect("checked by validation");
            let fleet = self.fleet(u);
            for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
                let cs = self.nonneg(names::slot("cs_e", rp, k, &u.id))?;
                let p = self.nonneg(names::slot("p_h2", rp, k, &u.id))?;
                self.con(
                    names::slot("el_conversion", rp, k, &u.id),
                    &LinExpr::term(p, 1.0).with(cs, -hpe),
                    Sense::Eq,
                    0.0,
                )?;
                self.upper_by_fleet("el_cons_cap", rp, k, u, cs, &fleet, u.p_max())?;
                self.upper_by_fleet("el_prod_cap", rp, k, u, p, &fleet, u.p_max() * hpe)?;
                self.power(s, bus).add(cs, -1.0);
                self.h2(s, node).add(p, 1.0);
            }
        }
        Ok(())
    }

    pub(super) fn add_smr(&mut self) -> Result<()> {
        let sys = self.sys;
        let units: Vec<&Unit> = sys.units_of(UnitKind::SmrCcs).collect();
        let priced = self.cfg.price_smr_emissions && units.iter().any(|u| u.emis() > 0.0);
        let c_co2 = if priced {
            self.price(self.cfg.c_co2, "c_co2", "an emitting SMR-CCS unit")?
        } else {
            0.0
        };
        for u in units {
            let node = self.node_of(u);
            let hpc = u.params.hpc.expect("checked by validation");
            let fleet = self.fleet(u);
            for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
                let cs = self.nonneg(names::slot("cs_ch4", rp, k, &u.id))?;
                let p = self.nonneg(names::slot("p_h2", rp, k, &u.id))?;
                self.con(
                    names::slot("smr_conversion", rp, k, &u.id),
                    &LinExpr::term(p, 1.0).with(cs, -hpc),
                    Sense::Eq,
                    0.0,
                )?;
                self.upper_by_fleet("smr_cons_cap", rp, k, u, cs, &fleet, u.p_max() / hpc)?;
                self.upper_by_fleet("smr_prod_cap", rp, k, u, p, &fleet, u.p_max())?;
                self.ch4(s, node).add(cs, -1.0);
                self.h2(s, node).add(p, 1.0);
                if priced {
                    let w = self.weights[s];
                    self.cost(CostTerm::Co2Industry, &LinExpr::term(p, c_co2 * u.emis()), w);
                }
            }
        }
        Ok(())
    }

    pub(super) fn add_fuel_cells(&mut self) -> Result<()> {
        let sys = self.sys;
        for u in sys.units_of(UnitKind::FuelCell) {
            let (node, bus) = (self.node_of(u), self.bus_of(u));
            let eph = u.params.eph.expect("checked by validation");
            let fleet = self.fleet(u);
            for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
                let w = self.weights[s];
                let cs = self.nonneg(names::slot("cs_h2", rp, k, &u.id))?;
                let p = self.nonneg(names::slot("p_e", rp, k, &u.id))?;
                self.con(
                    names::slot("fc_conversion", rp, k, &u.id),
                    &LinExpr::term(p, 1.0).with(cs, -eph),
                    Sense::Eq,
                    0.0,
                )?;
                self.upper_by_fleet("fc_cons_cap", rp, k, u, cs, &fleet, u.cs_max())?;
                self.upper_by_fleet("fc_prod_cap", rp, k, u, p, &fleet, u.cs_max() * eph)?;
                self.h2(s, node).add(cs, -1.0);
                self.hydrogen_use.add(cs, w);
                self.power(s, bus).add(p, 1.0);
            }
        }
        Ok(())
    }

    pub(super) fn add_storages(&mut self) -> Result<()> {
        let sys = self.sys;
        for u in &sys.units {
            let carrier = match u.kind {
                UnitKind::Bess => Carrier::Power,
                UnitKind::H2Tank | UnitKind::H2Cavern => Carrier::Hydrogen,
                UnitKind::NgStorage => Carrier::NaturalGas,
                _ => continue,
            };
            let soc = self.soc_model(u)?;
            self.add_storage(u, carrier, soc)?;
        }
        Ok(())
    }

    fn soc_model(&self, u: &Unit) -> Result<SocModel> {
        let chronology = self.ts.is_full_chronology();
        if !u.kind.is_long_term_storage() {
            return Ok(SocModel::Intra { terminal: false });
        }
        Ok(match self.cfg.long_term_storage {
            StorageMode::Auto if chronology => SocModel::Intra { terminal: true },
            StorageMode::Auto | StorageMode::Inter => {
                if !self.ts.n_periods().is_multiple_of(self.ts.mow()) {
                    return Err(Error::Config(format!(
                        "long-term storage `{}` needs a moving window dividing {} periods",
                        u.id,
                        self.ts.n_periods()
                    )));
                }
                SocModel::Inter
            }
            StorageMode::Intra => SocModel::Intra { terminal: chronology },
        })
    }

    fn add_storage(&mut self, u: &Unit, carrier: Carrier, soc: SocModel) -> Result<()> {
        let (dis_name, ch_name) = carrier.var_names();
        let fleet = self.fleet(u);
        let charge_cap = match (carrier, u.params.cs_max) {
            (Carrier::Power, None) => u.p_max(),
            _ => u.cs_max(),
        };
        let location = match carrier {
            Carrier::Power => self.bus_of(u),
            _ => self.node_of(u),
        };
        let mut dis = Vec::with_capacity(self.slots.len());
        let mut ch = Vec::with_capacity(self.slots.len());
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            let d = self.nonneg(names::slot(dis_name, rp, k, &u.id))?;
            let c = self.nonneg(names::slot(ch_name, rp, k, &u.id))?;
            self.upper_by_fleet("st_dis_cap", rp, k, u, d, &fleet, u.p_max())?;
            self.upper_by_fleet("st_ch_cap", rp, k, u, c, &fleet, charge_cap)?;
            let bal = match carrier {
                Carrier::Power => self.power(s, location),
                Carrier::Hydrogen => self.h2(s, location),
                Carrier::NaturalGas => self.ch4(s, location),
            };
            bal.add(d, 1.0).add(c, -1.0);
            if carrier == Carrier::Power {
                let w = self.weights[s];
                self.cost(CostTerm::StorageOm, &LinExpr::term(d, u.c_om()), w);
            }
            dis.push(d);
            ch.push(c);
        }
        match soc {
            SocModel::Intra { terminal } => self.add_intra_soc(u, &dis, &ch, &fleet, terminal),
            SocModel::Inter => self.add_inter_soc(u, &dis, &ch, &fleet),
        }
    }

    /// Net charge of slot `s` in stored units: `cs·W^K·η_ch − p·W^K/η_dis`.
    fn net_charge(&self, u: &Unit, s: usize, dis: &[VarId], ch: &[VarId], scale: f64) -> LinExpr {
        let wk = self.ts.w_k(self.slots[s].1);
        LinExpr::term(ch[s], scale * wk * u.eta_ch()).with(dis[s], -scale * wk / u.eta_dis())
    }

    fn soc_bounds(&mut self, name_at: impl Fn(&str) -> String, soc: VarId, u: &Unit, fleet: &LinExpr) -> Result<()> {
        let cap = u.storage_capacity();
        let mut hi = LinExpr::term(soc, 1.0);
        hi.add_expr(fleet, -cap);
        self.con(name_at("soc_max"), &hi, Sense::Le, 0.0)?;
        if u.r_min() > 0.0 {
            let mut lo = LinExpr::term(soc, 1.0);
            lo.add_expr(fleet, -u.r_min() * cap);
            self.con(name_at("soc_min"), &lo, Sense::Ge, 0.0)?;
        }
        Ok(())
    }

    fn add_intra_soc(&mut self, u: &Unit, dis: &[VarId], ch: &[VarId], fleet: &LinExpr, terminal: bool) -> Result<()> {
        let reserve = fleet.scaled(u.in_res() * u.storage_capacity());
        let mut soc = Vec::with_capacity(self.slots.len());
        for &(rp, k) in &self.slots.clone() {
            let v = self.nonneg(names::slot("intra", rp, k, &u.id))?;
            self.soc_bounds(|f| names::slot(f, rp, k, &u.id), v, u, fleet)?;
            soc.push(v);
        }
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            let mut e = LinExpr::term(soc[s], 1.0);
            e.add_expr(&self.net_charge(u, s, dis, ch, -1.0), 1.0);
            match self.ts.predecessor(k) {
                Some(prev) => {
                    e.add(soc[self.slot_of(rp, prev)], -1.0);
                }
                None => {
                    e.add_expr(&reserve, -1.0);
                }
            }
            self.con(names::slot("soc_intra", rp, k, &u.id), &e, Sense::Eq, 0.0)?;
        }
        if terminal {
            let last = *soc.last().expect("at least one slot");
            let mut e = LinExpr::term(last, 1.0);
            e.add_expr(&reserve, -1.0);
            self.con(names::global_at("soc_terminal", &u.id), &e, Sense::Eq, 0.0)?;
        }
        Ok(())
    }

    fn add_inter_soc(&mut self, u: &Unit, dis: &[VarId], ch: &[VarId], fleet: &LinExpr) -> Result<()> {
        let reserve = fleet.scaled(u.in_res() * u.storage_capacity());
        let checkpoints: Vec<usize> = self.ts.checkpoints().collect();
        let mut prev: Option<VarId> = None;
        for &p in &checkpoints {
            let v = self.nonneg(names::period("inter", p, &u.id))?;
            self.soc_bounds(|f| names::period(f, p, &u.id), v, u, fleet)?;
            let mut e = LinExpr::term(v, 1.0);
            match prev {
                Some(pv) => {
                    e.add(pv, -1.0);
                }
                None => {
                    e.add_expr(&reserve, -1.0);
                }
            }
            for m in self.ts.window_members(p)? {
                let s = self.slot_of(m.rp, m.k);
                e.add_expr(&self.net_charge(u, s, dis, ch, -(m.multiplicity as f64)), 1.0);
            }
            self.con(names::period("soc_inter", p, &u.id), &e, Sense::Eq, 0.0)?;
            prev = Some(v);
        }
        if let Some(last) = prev {
            let mut e = LinExpr::term(last, 1.0);
            e.add_expr(&reserve, -1.0);
            self.con(names::global_at("soc_terminal", &u.id), &e, Sense::Eq, 0.0)?;
        }
        Ok(())
    }

    /// `var ≤ coef·(x + EU)`.
    #[allow(clippy::too_many_arguments)]
    fn upper_by_fleet(
        &mut self,
        family: &str,
        rp: usize,
        k: usize,
        u: &Unit,
        var: VarId,
        fleet: &LinExpr,
        coef: f64,
    ) -> Result<()> {
        let mut e = LinExpr::term(var, 1.0);
        e.add_expr(fleet, -coef);
        self.con(names::slot(family, rp, k, &u.id), &e, Sense::Le, 0.0)
    }
}
