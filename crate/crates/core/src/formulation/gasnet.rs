//! Pipelines under the three flow formulations, compressors and nodal
//! pressures.

use super::names;
use super::{Builder, CompressorVars, PipeVars};
use crate::backend::{LinExpr, Sense, VarId, VarKind};
use crate::error::Result;
use crate::physics::BreakpointTable;
use crate::system::{FlowFormulation, Pipeline};

impl Builder<'_> {
    pub(super) fn add_gas_network(&mut self) -> Result<()> {
        let flow = self.cfg.flow_formulation;
        if flow == FlowFormulation::Bpp {
            self.add_pressures()?;
        }
        let sys = self.sys;
        for p in &sys.pipelines {
            let vars = match flow {
                FlowFormulation::Stp => self.add_stp_pipe(p)?,
                FlowFormulation::Btp => {
                    let mut v = self.add_blend_pipe(p)?;
                    self.add_direction(&mut v)?;
                    v
                }
                FlowFormulation::Bpp => {
                    let mut v = self.add_blend_pipe(p)?;
                    self.add_direction(&mut v)?;
                    self.add_increments(p, &mut v)?;
                    v
                }
            };
            for (s, _) in self.slots.clone().iter().enumerate() {
                self.h2(s, &vars.from).add(vars.f_h2[s], -1.0);
                self.h2(s, &vars.to).add(vars.f_h2[s], 1.0);
                self.ch4(s, &vars.from).add(vars.f_ch4[s], -1.0);
                self.ch4(s, &vars.to).add(vars.f_ch4[s], 1.0);
            }
            self.pipes.push(vars);
        }
        self.add_compressors()
    }

    fn add_pressures(&mut self) -> Result<()> {
        let sys = self.sys;
        for &(rp, k) in &self.slots.clone() {
            for n in &sys.nodes {
                let v = self.var(
                    names::slot("psqr", rp, k, &n.id),
                    VarKind::Continuous,
                    n.p_min_sqr,
                    n.p_max_sqr,
                )?;
                self.pressures.insert((rp, k, n.id.clone()), v);
            }
        }
        Ok(())
    }

    fn pipe_vars(&self, p: &Pipeline) -> PipeVars {
        PipeVars {
            entity: names::pipeline(p),
            from: p.from_node.clone(),
            to: p.to_node.clone(),
            f_max: p.f_max,
            r_gas: p.r_gas,
            candidate: p.is_candidate(),
            f_gas: Vec::new(),
            f_ch4: Vec::new(),
            f_h2: Vec::new(),
            alpha: Vec::new(),
            rho: Vec::new(),
        }
    }

    /// `f_gas = f_ch4 + f_h2` and, for candidates, `|f_gas| ≤ F̄·x`.
    fn add_flow_sum(&mut self, v: &PipeVars, s: usize) -> Result<()> {
        let (rp, k) = self.slots[s];
        let e = &v.entity;
        self.con(
            names::slot("flow_sum", rp, k, e),
            &LinExpr::term(v.f_gas[s], 1.0)
                .with(v.f_ch4[s], -1.0)
                .with(v.f_h2[s], -1.0),
            Sense::Eq,
            0.0,
        )?;
        if v.candidate {
            let x = self.invest[e];
            self.con(
                names::slot("pipe_gate_up", rp, k, e),
                &LinExpr::term(v.f_gas[s], 1.0).with(x, -v.f_max),
                Sense::Le,
                0.0,
            )?;
            self.con(
                names::slot("pipe_gate_lo", rp, k, e),
                &LinExpr::term(v.f_gas[s], 1.0).with(x, v.f_max),
                Sense::Ge,
                0.0,
            )?;
        }
        Ok(())
    }

    fn add_stp_pipe(&mut self, p: &Pipeline) -> Result<PipeVars> {
        let mut v = self.pipe_vars(p);
        let (f, b) = (p.f_max, self.cfg.blend_max);
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            let e = &v.entity;
            v.f_gas
                .push(self.var(names::slot("f_gas", rp, k, e), VarKind::Continuous, -f, f)?);
            v.f_ch4.push(self.var(
                names::slot("f_ch4", rp, k, e),
                VarKind::Continuous,
                -f * (1.0 - b),
                f * (1.0 - b),
            )?);
            v.f_h2
                .push(self.var(names::slot("f_h2", rp, k, e), VarKind::Continuous, -f * b, f * b)?);
            self.add_flow_sum(&v, s)?;
        }
        Ok(v)
    }

    fn add_blend_pipe(&mut self, p: &Pipeline) -> Result<PipeVars> {
        let mut v = self.pipe_vars(p);
        let (f, m) = (p.f_max, self.big_m);
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            let e = &v.entity;
            v.f_gas
                .push(self.var(names::slot("f_gas", rp, k, e), VarKind::Continuous, -f, f)?);
            v.f_ch4
                .push(self.var(names::slot("f_ch4", rp, k, e), VarKind::Continuous, -m, m)?);
            v.f_h2
                .push(self.var(names::slot("f_h2", rp, k, e), VarKind::Continuous, -m, m)?);
            self.add_flow_sum(&v, s)?;
        }
        Ok(v)
    }

    /// Direction binary per representative period with sign coherence and
    /// the blend-rate envelope.
    fn add_direction(&mut self, v: &mut PipeVars) -> Result<()> {
        let (m, b) = (self.big_m, self.cfg.blend_max);
        for rp in 1..=self.ts.n_rp() {
            v.alpha
                .push(self.var(names::per_rp("alpha", rp, &v.entity), VarKind::Binary, 0.0, 1.0)?);
        }
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            let a = v.alpha[rp - 1];
            let e = &v.entity;
            for (tag, f) in [("h2", v.f_h2[s]), ("ch4", v.f_ch4[s])] {
                self.con(
                    names::slot(&format!("dir_{tag}_lo"), rp, k, e),
                    &LinExpr::term(f, 1.0).with(a, -m),
                    Sense::Ge,
                    -m,
                )?;
                self.con(
                    names::slot(&format!("dir_{tag}_hi"), rp, k, e),
                    &LinExpr::term(f, 1.0).with(a, -m),
                    Sense::Le,
                    0.0,
                )?;
            }
            let envelope = LinExpr::term(v.f_h2[s], 1.0).with(v.f_ch4[s], -b).with(a, m);
            self.con(names::slot("blend_lo", rp, k, e), &envelope, Sense::Ge, 0.0)?;
            self.con(names::slot("blend_hi", rp, k, e), &envelope, Sense::Le, m)?;
        }
        Ok(())
    }

    /// Incremental piecewise-linear pressure–flow coupling.
    fn add_increments(&mut self, p: &Pipeline, v: &mut PipeVars) -> Result<()> {
        let table = BreakpointTable::uniform(p.f_max, self.cfg.n_increments)?;
        let n = table.increments();
        let e = v.entity.clone();
        let x = v.candidate.then(|| self.invest[&e]);
        for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
            let rho_bound = if x.is_some() { p.f_max } else { 0.0 };
            let rho = self.var(
                names::slot("rho", rp, k, &e),
                VarKind::Continuous,
                -rho_bound,
                rho_bound,
            )?;
            v.rho.push(rho);
            if let Some(x) = x {
                self.con(
                    names::slot("rho_up", rp, k, &e),
                    &LinExpr::term(rho, 1.0).with(x, p.f_max),
                    Sense::Le,
                    p.f_max,
                )?;
                self.con(
                    names::slot("rho_lo", rp, k, &e),
                    &LinExpr::term(rho, 1.0).with(x, -p.f_max),
                    Sense::Ge,
                    -p.f_max,
                )?;
            }
            let mut gamma = Vec::with_capacity(n);
            for i in 1..=n {
                let name = names::slot("gamma", rp, k, &names::increment(&e, i));
                gamma.push(self.var(name, VarKind::Continuous, 0.0, 1.0)?);
            }
            let mut delta = Vec::with_capacity(n - 1);
            for i in 1..n {
                let name = names::slot("delta", rp, k, &names::increment(&e, i));
                delta.push(self.var(name, VarKind::Binary, 0.0, 1.0)?);
            }
            let pm = self.pressures[&(rp, k, p.from_node.clone())];
            let pn = self.pressures[&(rp, k, p.to_node.clone())];
            let mut quad = LinExpr::new();
            let mut lin = LinExpr::new();
            for (i, &g) in gamma.iter().enumerate() {
                quad.add(g, table.f_prime[i + 1] - table.f_prime[i]);
                lin.add(g, table.f[i + 1] - table.f[i]);
            }
            quad.add(pm, -p.r_gas).add(pn, p.r_gas);
            lin.add(rho, -1.0).add(v.f_gas[s], -1.0);
            self.con(
                names::slot("inc_pressure", rp, k, &e),
                &quad,
                Sense::Eq,
                -table.f_prime[0],
            )?;
            self.con(names::slot("inc_flow", rp, k, &e), &lin, Sense::Eq, -table.f[0])?;
            for (i, &d) in delta.iter().enumerate() {
                let inc = names::increment(&e, i + 1);
                self.con(
                    names::slot("fill_next", rp, k, &inc),
                    &LinExpr::term(d, 1.0).with(gamma[i + 1], -1.0),
                    Sense::Ge,
                    0.0,
                )?;
                self.con(
                    names::slot("fill_this", rp, k, &inc),
                    &LinExpr::term(gamma[i], 1.0).with(d, -1.0),
                    Sense::Ge,
                    0.0,
                )?;
            }
        }
        self.breakpoints.push((e, table));
        Ok(())
    }

    fn add_compressors(&mut self) -> Result<()> {
        let sys = self.sys;
        let b = self.cfg.blend_max;
        let with_pressure = self.cfg.flow_formulation == FlowFormulation::Bpp;
        for c in &sys.compressors {
            let e = names::compressor(c);
            let mut vars = CompressorVars {
                entity: e.clone(),
                from: c.from_node.clone(),
                to: c.to_node.clone(),
                f_ch4: Vec::new(),
                f_h2: Vec::new(),
            };
            let p_max_in = sys.node(&c.from_node).expect("compressors are linked").p_max_sqr;
            let boost_cap = p_max_in - (p_max_in.sqrt() - c.max_boost).powi(2);
            for (s, &(rp, k)) in self.slots.clone().iter().enumerate() {
                let f_ch4 = self.nonneg(names::slot("f_cmp_ch4", rp, k, &e))?;
                let f_h2 = self.nonneg(names::slot("f_cmp_h2", rp, k, &e))?;
                self.con(
                    names::slot("cmp_cap", rp, k, &e),
                    &LinExpr::term(f_ch4, 1.0).with(f_h2, 1.0),
                    Sense::Le,
                    c.f_max,
                )?;
                self.con(
                    names::slot("cmp_h2_share", rp, k, &e),
                    &LinExpr::term(f_h2, 1.0).with(f_ch4, -b),
                    Sense::Le,
                    0.0,
                )?;
                if with_pressure {
                    let pm: VarId = self.pressures[&(rp, k, c.from_node.clone())];
                    let pn: VarId = self.pressures[&(rp, k, c.to_node.clone())];
                    self.con(
                        names::slot("cmp_ratio", rp, k, &e),
                        &LinExpr::term(pn, 1.0).with(pm, -c.ratio_sqr),
                        Sense::Le,
                        0.0,
                    )?;
                    let lift = LinExpr::term(pn, 1.0).with(pm, -1.0);
                    self.con(names::slot("cmp_lift_lo", rp, k, &e), &lift, Sense::Ge, 0.0)?;
                    self.con(names::slot("cmp_lift_hi", rp, k, &e), &lift, Sense::Le, boost_cap)?;
                }
                self.h2(s, &c.from_node).add(f_h2, -(1.0 + c.cons_h2));
                self.h2(s, &c.to_node).add(f_h2, 1.0);
                self.ch4(s, &c.from_node).add(f_ch4, -(1.0 + c.cons_ch4));
                self.ch4(s, &c.to_node).add(f_ch4, 1.0);
                vars.f_ch4.push(f_ch4);
                vars.f_h2.push(f_h2);
            }
            self.compressors.push(vars);
        }
        Ok(())
    }
}
