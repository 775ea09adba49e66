//! CPLEX-LP and MPS (free and fixed) emission.
//!
//! Output depends only on the model contents, so identical models give
//! identical bytes.

use std::fmt::Write as _;

use super::model::{ModelInstance, Sense, VarKind, OBJ_CONSTANT_VAR};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelFormat {
    Lp,
    FreeMps,
    FixedMps,
}

impl ModelFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ModelFormat::Lp => "lp",
            ModelFormat::FreeMps | ModelFormat::FixedMps => "mps",
        }
    }
}

/// Serializes `model` in `format`. Fixed MPS uses generated eight-character
/// names (`C0000001`, `R0000001`); [`fixed_mps_column_names`] maps them back.
pub fn emit(model: &ModelInstance, format: ModelFormat) -> Result<String> {
    check_names(model)?;
    match format {
        ModelFormat::Lp => Ok(emit_lp(model)),
        ModelFormat::FreeMps => Ok(emit_mps(model, false)),
        ModelFormat::FixedMps => {
            if model.n_vars() + 1 > 9_999_999 || model.n_constraints() > 9_999_999 {
                return Err(Error::Emission("model too large for fixed MPS names".into()));
            }
            Ok(emit_mps(model, true))
        }
    }
}

/// Column names used in a fixed-MPS file, in model order, followed by the
/// objective-constant column when present.
pub fn fixed_mps_column_names(model: &ModelInstance) -> Vec<(String, String)> {
    let mut out: Vec<_> = model
        .vars()
        .iter()
        .enumerate()
        .map(|(i, v)| (fixed_col(i), v.name.clone()))
        .collect();
    if model.objective().constant != 0.0 {
        out.push((fixed_col(model.n_vars()), OBJ_CONSTANT_VAR.to_string()));
    }
    out
}

fn fixed_col(i: usize) -> String {
    format!("C{:07}", i + 1)
}

fn fixed_row(i: usize) -> String {
    format!("R{:07}", i + 1)
}

fn check_names(model: &ModelInstance) -> Result<()> {
    let valid = |s: &str| {
        !s.is_empty()
            && !s.starts_with(|c: char| c.is_ascii_digit() || c == '.')
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
    };
    for v in model.vars() {
        if !valid(&v.name) {
            return Err(Error::Emission(format!("variable name `{}` cannot be written", v.name)));
        }
    }
    for c in model.constraints() {
        if !valid(&c.name) {
            return Err(Error::Emission(format!(
                "constraint name `{}` cannot be written",
                c.name
            )));
        }
    }
    Ok(())
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Number rendering limited to the twelve characters of a fixed-MPS field.
fn num12(v: f64) -> String {
    let s = num(v);
    if s.len() <= 12 {
        return s;
    }
    (0..=8usize)
        .rev()
        .map(|p| format!("{v:.p$e}"))
        .find(|s| s.len() <= 12)
        .unwrap_or_else(|| format!("{v:.0e}"))
}

fn emit_lp(model: &ModelInstance) -> String {
    let mut s = String::with_capacity(64 * (model.n_vars() + 4 * model.n_constraints()));
    let vars = model.vars();
    let has_const = model.objective().constant != 0.0;
    s.push_str("\\ blendplan model\nMinimize\n obj:");
    let obj = model.merged_objective();
    let mut obj_terms: Vec<(f64, &str)> = obj.iter().map(|(v, c)| (*c, vars[v.0].name.as_str())).collect();
    if has_const {
        obj_terms.push((model.objective().constant, OBJ_CONSTANT_VAR));
    }
    if obj_terms.is_empty() {
        // an empty objective still needs one term
        obj_terms.push((0.0, vars.first().map(|v| v.name.as_str()).unwrap_or(OBJ_CONSTANT_VAR)));
    }
    write_lp_terms(&mut s, obj_terms.into_iter());
    s.push_str("\nSubject To\n");
    for c in model.constraints() {
        let _ = write!(s, " {}:", c.name);
        write_lp_terms(&mut s, c.terms.iter().map(|(v, k)| (*k, vars[v.0].name.as_str())));
        let _ = writeln!(s, " {} {}", c.sense.lp_symbol(), num(c.rhs));
    }
    s.push_str("Bounds\n");
    for v in vars {
        let (lo, hi) = (v.lower, v.upper);
        if lo == hi {
            let _ = writeln!(s, " {} = {}", v.name, num(lo));
        } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            let _ = writeln!(s, " {} free", v.name);
        } else {
            let lo_s = if lo == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                num(lo)
            };
            let hi_s = if hi == f64::INFINITY {
                "+inf".to_string()
            } else {
                num(hi)
            };
            let _ = writeln!(s, " {} <= {} <= {}", lo_s, v.name, hi_s);
        }
    }
    if has_const || vars.is_empty() {
        let _ = writeln!(s, " {OBJ_CONSTANT_VAR} = 1.0");
    }
    let ints: Vec<&str> = vars
        .iter()
        .filter(|v| v.kind.is_discrete())
        .map(|v| v.name.as_str())
        .collect();
    if !ints.is_empty() {
        s.push_str("General\n");
        for chunk in ints.chunks(8) {
            let _ = writeln!(s, " {}", chunk.join(" "));
        }
    }
    s.push_str("End\n");
    s
}

fn write_lp_terms<'a>(s: &mut String, terms: impl Iterator<Item = (f64, &'a str)>) {
    for (i, (c, name)) in terms.enumerate() {
        if i > 0 && i % 6 == 0 {
            s.push_str("\n   ");
        }
        if c < 0.0 {
            let _ = write!(s, " - {} {}", num(-c), name);
        } else {
            let _ = write!(s, " + {} {}", num(c), name);
        }
    }
}

fn emit_mps(model: &ModelInstance, fixed: bool) -> String {
    let vars = model.vars();
    let cons = model.constraints();
    let has_const = model.objective().constant != 0.0;
    let n_cols = vars.len() + usize::from(has_const);
    let col_name = |i: usize| -> String {
        if fixed {
            fixed_col(i)
        } else if i < vars.len() {
            vars[i].name.clone()
        } else {
            OBJ_CONSTANT_VAR.to_string()
        }
    };
    let row_name = |i: usize| -> String {
        if fixed {
            fixed_row(i)
        } else {
            cons[i].name.clone()
        }
    };
    let obj_row = if fixed { "OBJ" } else { "obj" };
    let num = |v: f64| if fixed { num12(v) } else { num(v) };

    // column-major view of the constraint matrix
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_cols];
    for (v, c) in model.merged_objective() {
        columns[v.0].push((usize::MAX, c));
    }
    if has_const {
        columns[vars.len()].push((usize::MAX, model.objective().constant));
    }
    for (r, c) in cons.iter().enumerate() {
        for &(v, k) in &c.terms {
            columns[v.0].push((r, k));
        }
    }

    let mut s = String::with_capacity(48 * (n_cols + 4 * cons.len()));
    let line = |s: &mut String, fields: &[&str]| {
        if fixed {
            // field starts at columns 2, 5, 15, 25, 40, 50
            const START: [usize; 6] = [1, 4, 14, 24, 39, 49];
            let mut out = String::new();
            for (f, start) in fields.iter().zip(START) {
                if out.len() < start {
                    out.push_str(&" ".repeat(start - out.len()));
                } else {
                    out.push(' ');
                }
                out.push_str(f);
            }
            s.push_str(out.trim_end());
        } else {
            s.push(' ');
            s.push_str(&fields.join(" "));
        }
        s.push('\n');
    };
    s.push_str("NAME          blendplan\nROWS\n");
    line(&mut s, &["N", obj_row]);
    for (i, c) in cons.iter().enumerate() {
        let t = match c.sense {
            Sense::Le => "L",
            Sense::Eq => "E",
            Sense::Ge => "G",
        };
        line(&mut s, &[t, &row_name(i)]);
    }
    s.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0usize;
    for (j, entries) in columns.iter().enumerate() {
        let discrete = j < vars.len() && vars[j].kind.is_discrete();
        if discrete != in_int {
            let tag = if discrete { "'INTORG'" } else { "'INTEND'" };
            let m = format!("MARKER{marker:02}");
            marker += 1;
            line(&mut s, &["", &m, "'MARKER'", "", tag]);
            in_int = discrete;
        }
        let name = col_name(j);
        if entries.is_empty() {
            line(&mut s, &["", &name, obj_row, "0.0"]);
        }
        for &(r, k) in entries {
            let row = if r == usize::MAX {
                obj_row.to_string()
            } else {
                row_name(r)
            };
            line(&mut s, &["", &name, &row, &num(k)]);
        }
    }
    if in_int {
        let m = format!("MARKER{marker:02}");
        line(&mut s, &["", &m, "'MARKER'", "", "'INTEND'"]);
    }
    s.push_str("RHS\n");
    for (i, c) in cons.iter().enumerate() {
        if c.rhs != 0.0 {
            line(&mut s, &["", "RHS", &row_name(i), &num(c.rhs)]);
        }
    }
    s.push_str("BOUNDS\n");
    for (j, v) in vars.iter().enumerate() {
        let name = col_name(j);
        let discrete = v.kind == VarKind::Integer || v.kind == VarKind::Binary;
        let (lo, hi) = (v.lower, v.upper);
        if lo == hi {
            line(&mut s, &["FX", "BND", &name, &num(lo)]);
            continue;
        }
        if lo == f64::NEG_INFINITY {
            if hi == f64::INFINITY {
                line(&mut s, &["FR", "BND", &name]);
                continue;
            }
            line(&mut s, &["MI", "BND", &name]);
        } else if lo != 0.0 || discrete {
            line(&mut s, &["LO", "BND", &name, &num(lo)]);
        }
        if hi != f64::INFINITY {
            line(&mut s, &["UP", "BND", &name, &num(hi)]);
        } else if discrete {
            line(&mut s, &["PL", "BND", &name]);
        }
    }
    if has_const {
        line(&mut s, &["FX", "BND", &col_name(vars.len()), "1.0"]);
    }
    s.push_str("ENDATA\n");
    s
}
