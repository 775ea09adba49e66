//! Solver-agnostic linear model with named variables and constraints.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Continuous,
    Binary,
    Integer,
}

impl VarKind {
    pub fn is_discrete(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn lp_symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// Linear expression `Σ c·x + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(v: VarId, c: f64) -> Self {
        LinExpr {
            terms: vec![(v, c)],
            constant: 0.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        LinExpr {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn add(&mut self, v: VarId, c: f64) -> &mut Self {
        if c != 0.0 {
            self.terms.push((v, c));
        }
        self
    }

    pub fn add_constant(&mut self, c: f64) -> &mut Self {
        self.constant += c;
        self
    }

    pub fn add_expr(&mut self, other: &LinExpr, scale: f64) -> &mut Self {
        for &(v, c) in &other.terms {
            self.add(v, c * scale);
        }
        self.constant += other.constant * scale;
        self
    }

    pub fn with(mut self, v: VarId, c: f64) -> Self {
        self.add(v, c);
        self
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn scaled(&self, s: f64) -> LinExpr {
        let mut e = LinExpr::new();
        e.add_expr(self, s);
        e
    }

    /// Merges repeated variables and drops zero coefficients, keeping the
    /// order of first appearance.
    pub fn merged(&self) -> Vec<(VarId, f64)> {
        let mut pos: HashMap<VarId, usize> = HashMap::new();
        let mut out: Vec<(VarId, f64)> = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match pos.get(&v) {
                Some(&i) => out[i].1 += c,
                None => {
                    pos.insert(v, out.len());
                    out.push((v, c));
                }
            }
        }
        out.retain(|t| t.1 != 0.0);
        out
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(v, c)| c * values[v.0]).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    /// `lhs − rhs`; zero when an equality holds.
    pub fn residual(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|(v, c)| c * values[v.0]).sum::<f64>() - self.rhs
    }

    /// Amount by which the constraint is violated (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let r = self.residual(values);
        match self.sense {
            Sense::Le => r.max(0.0),
            Sense::Ge => (-r).max(0.0),
            Sense::Eq => r.abs(),
        }
    }
}

/// Name of the fixed variable that carries a constant objective offset.
pub const OBJ_CONSTANT_VAR: &str = "objconst__";

/// A minimisation problem with linear constraints and mixed-integer variables.
#[derive(Debug, Clone, Default)]
pub struct ModelInstance {
    vars: Vec<Variable>,
    by_name: HashMap<String, VarId>,
    constraints: Vec<Constraint>,
    constraint_names: HashSet<String>,
    objective: LinExpr,
}

impl ModelInstance {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a variable. Names must be unique.
    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> Result<VarId> {
        let name = name.into();
        if name == OBJ_CONSTANT_VAR || self.by_name.contains_key(&name) {
            return Err(Error::Emission(format!("variable name `{name}` is used twice")));
        }
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(Error::Emission(format!(
                "variable `{name}` has bounds [{lower}, {upper}]"
            )));
        }
        let id = VarId(self.vars.len());
        self.by_name.insert(name.clone(), id);
        self.vars.push(Variable {
            name,
            kind,
            lower,
            upper,
        });
        Ok(id)
    }

    /// Adds `lhs (sense) rhs`. The constant part of `lhs` moves to the right.
    ///
    /// Constraints without variables are checked immediately: satisfied ones
    /// are dropped, violated ones are an error.
    pub fn add_con(&mut self, name: impl Into<String>, lhs: &LinExpr, sense: Sense, rhs: f64) -> Result<()> {
        let name = name.into();
        if !self.constraint_names.insert(name.clone()) {
            return Err(Error::Emission(format!("constraint name `{name}` is used twice")));
        }
        let rhs = rhs - lhs.constant;
        let terms = lhs.merged();
        if let Some((v, _)) = terms.iter().find(|(v, _)| v.0 >= self.vars.len()) {
            return Err(Error::Emission(format!(
                "constraint `{name}` references undeclared variable {}",
                v.0
            )));
        }
        if terms.is_empty() {
            let ok = match sense {
                Sense::Le => 0.0 <= rhs + 1e-12,
                Sense::Ge => 0.0 >= rhs - 1e-12,
                Sense::Eq => rhs.abs() <= 1e-12,
            };
            return if ok {
                Ok(())
            } else {
                Err(Error::Emission(format!(
                    "constraint `{name}` has no variables and cannot hold"
                )))
            };
        }
        if !rhs.is_finite() || terms.iter().any(|t| !t.1.is_finite()) {
            return Err(Error::Emission(format!(
                "constraint `{name}` has a non-finite coefficient"
            )));
        }
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
        Ok(())
    }

    pub fn add_objective(&mut self, expr: &LinExpr) {
        self.objective.add_expr(expr, 1.0);
    }

    pub fn objective(&self) -> &LinExpr {
        &self.objective
    }

    pub fn merged_objective(&self) -> Vec<(VarId, f64)> {
        self.objective.merged()
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn set_bounds(&mut self, id: VarId, lower: f64, upper: f64) -> Result<()> {
        if lower > upper {
            return Err(Error::Emission(format!(
                "variable `{}` would get bounds [{lower}, {upper}]",
                self.vars[id.0].name
            )));
        }
        let v = &mut self.vars[id.0];
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn fix(&mut self, id: VarId, value: f64) -> Result<()> {
        self.set_bounds(id, value, value)
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_discrete(&self) -> usize {
        self.vars.iter().filter(|v| v.kind.is_discrete()).count()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Dense value vector from a name/value map. Missing variables take the
    /// bound-feasible value closest to zero.
    pub fn values_from(&self, named: &BTreeMap<String, f64>) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| match named.get(&v.name) {
                Some(x) => *x,
                None => 0.0f64.clamp(v.lower, v.upper),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_variable_rejected() {
        let mut m = ModelInstance::new();
        m.add_var("x", VarKind::Continuous, 0.0, 1.0).unwrap();
        assert!(matches!(
            m.add_var("x", VarKind::Continuous, 0.0, 1.0),
            Err(Error::Emission(_))
        ));
        assert!(m.add_var(OBJ_CONSTANT_VAR, VarKind::Continuous, 0.0, 1.0).is_err());
    }

    #[test]
    fn duplicate_constraint_rejected() {
        let mut m = ModelInstance::new();
        let x = m.add_var("x", VarKind::Continuous, 0.0, 1.0).unwrap();
        m.add_con("c", &LinExpr::term(x, 1.0), Sense::Le, 1.0).unwrap();
        assert!(m.add_con("c", &LinExpr::term(x, 1.0), Sense::Le, 1.0).is_err());
    }

    #[test]
    fn terms_are_merged_and_constant_moved() {
        let mut m = ModelInstance::new();
        let x = m.add_var("x", VarKind::Continuous, 0.0, 1.0).unwrap();
        let y = m.add_var("y", VarKind::Continuous, 0.0, 1.0).unwrap();
        let mut e = LinExpr::term(x, 1.0);
        e.add(y, 2.0).add(x, 3.0).add(y, -2.0).add_constant(4.0);
        m.add_con("c", &e, Sense::Eq, 10.0).unwrap();
        let c = &m.constraints()[0];
        assert_eq!(c.terms, vec![(x, 4.0)]);
        assert_eq!(c.rhs, 6.0);
    }

    #[test]
    fn empty_constraints_checked() {
        let mut m = ModelInstance::new();
        assert!(m.add_con("ok", &LinExpr::constant(1.0), Sense::Le, 2.0).is_ok());
        assert_eq!(m.n_constraints(), 0);
        assert!(m.add_con("bad", &LinExpr::constant(3.0), Sense::Le, 2.0).is_err());
    }
}
