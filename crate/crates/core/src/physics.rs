//! Steady-state gas flow physics: Reynolds number, Chen friction factor,
//! pipeline resistance, transmission capacity and breakpoint tables for the
//! piecewise-linear flow-pressure relation.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::system::{EnergySystem, GasConstants, GasNode, PipeGeometry};
use crate::table::{fmt_f64, write_csv};

/// Lowest Reynolds number for which the turbulent correlation is used.
pub const TURBULENT_RE: f64 = 4000.0;

/// Converts a resistance from SI units ((Sm³/s)²/Pa²) to (MSm³/h)²/bar².
const SI_TO_INTERNAL: f64 = (3600e-6 * 3600e-6) * (1e5 * 1e5);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionResult {
    pub reynolds: f64,
    pub lambda: f64,
}

/// `Re = D·v·ρ/η` with the viscosity given in 10⁻⁶ Pa·s.
pub fn reynolds(d: f64, c: &GasConstants) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!("diameter must be positive, got {d}")));
    }
    for (name, v) in [("v_m", c.v_m), ("rho_m", c.rho_m), ("eta_m", c.eta_m)] {
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(d * c.v_m * c.rho_m / (c.eta_m * 1e-6))
}

/// Explicit Chen approximation of the Colebrook-White friction factor.
///
/// `eps` is the absolute roughness in mm, `d` the diameter in m.
pub fn chen_friction(re: f64, eps: f64, d: f64) -> Result<f64> {
    if !(re > TURBULENT_RE) {
        return Err(Error::Regime(format!(
            "Reynolds number {re} is not turbulent (needs > {TURBULENT_RE})"
        )));
    }
    if !(eps >= 0.0 && d > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "roughness must be non-negative and diameter positive, got {eps} mm and {d} m"
        )));
    }
    let rel = eps / 1000.0 / d;
    let inner = rel.powf(1.1098) / 2.8257 + 5.8506 / re.powf(0.8981);
    let x = -2.0 * (rel / 3.7065 - 5.0425 / re * inner.log10()).log10();
    Ok(1.0 / (x * x))
}

pub fn friction(g: &PipeGeometry, c: &GasConstants) -> Result<FrictionResult> {
    let reynolds = reynolds(g.diameter, c)?;
    let lambda = chen_friction(reynolds, g.roughness, g.diameter)?;
    Ok(FrictionResult { reynolds, lambda })
}

/// Pipeline factor `R` such that `F² = R·(p_m² − p_n²)` with flows in MSm³/h
/// and pressures in bar.
pub fn pipeline_resistance(g: &PipeGeometry, c: &GasConstants) -> Result<f64> {
    if !(g.length > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "length must be positive, got {}",
            g.length
        )));
    }
    for (name, v) in [
        ("t_n", c.t_n),
        ("t_m", c.t_m),
        ("p_n", c.p_n),
        ("rho_n", c.rho_n),
        ("k_m", c.k_m),
    ] {
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    let f = friction(g, c)?;
    let p_n_pa = c.p_n * 1e5;
    let si = (1.0 / f.lambda) * (g.diameter.powi(5) / g.length) * (PI * PI / 16.0) * (c.t_n / c.t_m)
        / (p_n_pa * c.rho_n * c.k_m);
    Ok(si * SI_TO_INTERNAL)
}

/// `F̄ = √((p_max,m² − p_min,n²)·R)`.
pub fn max_capacity(r_gas: f64, from: &GasNode, to: &GasNode) -> Result<f64> {
    let span = from.p_max_sqr - to.p_min_sqr;
    if span < 0.0 {
        return Err(Error::NoFeasibleFlow(format!(
            "maximum pressure at `{}` is below the minimum pressure at `{}`",
            from.id, to.id
        )));
    }
    if !(r_gas > 0.0) {
        return Err(Error::InvalidArgument(format!("r_gas must be positive, got {r_gas}")));
    }
    Ok((span * r_gas).sqrt())
}

/// Returns constants whose compressibility factor makes `g` reproduce
/// `target_r`. Resistance is inversely proportional to `k_m`, so one
/// rescaling hits the target exactly.
pub fn calibrate_compressibility(g: &PipeGeometry, c: &GasConstants, target_r: f64) -> Result<GasConstants> {
    if !(target_r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "target resistance must be positive, got {target_r}"
        )));
    }
    let current = pipeline_resistance(g, c)?;
    Ok(GasConstants {
        k_m: c.k_m * current / target_r,
        ..*c
    })
}

/// Signed square `F·|F|`.
pub fn signed_square(f: f64) -> f64 {
    f * f.abs()
}

/// Largest deviation between `f·|f|` and its chord on `[a, b]`.
pub fn chord_error(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    if a >= 0.0 || b <= 0.0 {
        let h = b - a;
        return h * h / 4.0;
    }
    let slope = (signed_square(b) - signed_square(a)) / (b - a);
    let chord = |x: f64| signed_square(a) + slope * (x - a);
    // Stationary points of the difference on each branch of the curve.
    [-slope / 2.0, slope / 2.0, 0.0]
        .into_iter()
        .filter(|x| (a..=b).contains(x))
        .map(|x| (signed_square(x) - chord(x)).abs())
        .fold(0.0, f64::max)
}

/// Breakpoints `F_inc` and values `F'_inc = F_inc·|F_inc|` for one pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointTable {
    pub f: Vec<f64>,
    pub f_prime: Vec<f64>,
}

impl BreakpointTable {
    /// `n + 1` uniformly spaced breakpoints on `[−f_max, f_max]`.
    pub fn uniform(f_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "at least two increments are needed, got {n}"
            )));
        }
        if !(f_max > 0.0 && f_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "capacity must be positive, got {f_max}"
            )));
        }
        let f: Vec<f64> = (0..=n)
            .map(|i| {
                // symmetric construction keeps F(−x) = −F(x) bit-exact
                let j = 2 * i as i64 - n as i64;
                f_max * j as f64 / n as f64
            })
            .collect();
        let f_prime = f.iter().map(|&x| signed_square(x)).collect();
        Ok(BreakpointTable { f, f_prime })
    }

    pub fn increments(&self) -> usize {
        self.f.len() - 1
    }

    /// Piecewise-linear interpolation of `F'` at `x`, clamped to the table.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.f.len();
        if x <= self.f[0] {
            return self.f_prime[0];
        }
        if x >= self.f[n - 1] {
            return self.f_prime[n - 1];
        }
        let i = self.f.partition_point(|&b| b <= x).saturating_sub(1).min(n - 2);
        let t = (x - self.f[i]) / (self.f[i + 1] - self.f[i]);
        self.f_prime[i] + t * (self.f_prime[i + 1] - self.f_prime[i])
    }

    /// Largest chord error over all segments.
    pub fn max_chord_error(&self) -> f64 {
        self.f.windows(2).map(|w| chord_error(w[0], w[1])).fold(0.0, f64::max)
    }

    /// Segment containing `x`, for the chord-error bound at a given flow.
    pub fn segment_error_at(&self, x: f64) -> f64 {
        let n = self.f.len();
        let i = self.f.partition_point(|&b| b <= x).saturating_sub(1).min(n - 2);
        chord_error(self.f[i], self.f[i + 1])
    }
}

/// Writes breakpoint tables as `pipeline,inc,f,f_prime`.
pub fn write_breakpoints(path: &Path, tables: &[(String, BreakpointTable)]) -> Result<()> {
    let mut rows = Vec::new();
    for (name, t) in tables {
        for (i, (f, fp)) in t.f.iter().zip(&t.f_prime).enumerate() {
            rows.push(vec![name.clone(), (i + 1).to_string(), fmt_f64(*f), fmt_f64(*fp)]);
        }
    }
    write_csv(path, &["pipeline", "inc", "f", "f_prime"], &rows)
}

/// One row of the pipeline parameter table.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRow {
    pub from_node: String,
    pub to_node: String,
    pub circuit: String,
    pub geometry: PipeGeometry,
    pub reynolds: f64,
    pub lambda: f64,
    /// Pipeline factor ((MSm³/h)²/bar²).
    pub r_gas: f64,
    /// Transmission capacity (MSm³/h).
    pub f_max: f64,
}

/// Recomputes friction, resistance and capacity of every pipeline that has a
/// geometry, using the system's gas constants and node pressure limits.
pub fn pipeline_table(sys: &EnergySystem) -> Result<Vec<PipelineRow>> {
    let mut rows = Vec::new();
    for p in &sys.pipelines {
        let Some(g) = p.geometry else { continue };
        let fr = friction(&g, &sys.constants)?;
        let r_gas = pipeline_resistance(&g, &sys.constants)?;
        let node = |id: &str| {
            sys.node(id)
                .ok_or_else(|| Error::Link(format!("pipeline references missing gas node `{id}`")))
        };
        let f_max = max_capacity(r_gas, node(&p.from_node)?, node(&p.to_node)?)?;
        rows.push(PipelineRow {
            from_node: p.from_node.clone(),
            to_node: p.to_node.clone(),
            circuit: p.circuit.clone(),
            geometry: g,
            reynolds: fr.reynolds,
            lambda: fr.lambda,
            r_gas,
            f_max,
        });
    }
    Ok(rows)
}

/// Writes the pipeline table as CSV.
pub fn write_pipeline_table(path: &Path, rows: &[PipelineRow]) -> Result<()> {
    let out: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.from_node.clone(),
                r.to_node.clone(),
                r.circuit.clone(),
                fmt_f64(r.geometry.length),
                fmt_f64(r.geometry.diameter),
                fmt_f64(r.geometry.roughness),
                fmt_f64(r.reynolds),
                fmt_f64(r.lambda),
                fmt_f64(r.r_gas),
                fmt_f64(r.f_max),
            ]
        })
        .collect();
    write_csv(
        path,
        &[
            "from_node",
            "to_node",
            "circuit",
            "length",
            "diameter",
            "roughness",
            "reynolds",
            "lambda",
            "r_gas",
            "f_max",
        ],
        &out,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constants() -> GasConstants {
        GasConstants {
            v_m: 7.5,
            rho_m: 0.75,
            eta_m: 11.0,
            ..GasConstants::PLACEHOLDER
        }
    }

    #[test]
    fn reynolds_direct_arithmetic() {
        let re = reynolds(0.6, &constants()).unwrap();
        assert!((re - 0.6 * 7.5 * 0.75 / 11e-6).abs() < 1e-6);
        assert!((re - 306_818.18).abs() < 0.01);
    }

    #[test]
    fn reynolds_linear_in_velocity() {
        let c = constants();
        let doubled = GasConstants { v_m: 15.0, ..c };
        let a = reynolds(0.6, &c).unwrap();
        let b = reynolds(0.6, &doubled).unwrap();
        assert!((b / a - 2.0).abs() < 1e-15);
    }

    #[test]
    fn reynolds_rejects_zero_diameter() {
        assert!(matches!(reynolds(0.0, &constants()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn laminar_regime_rejected() {
        assert!(matches!(chen_friction(1000.0, 0.01, 0.6), Err(Error::Regime(_))));
    }

    #[test]
    fn capacity_examples() {
        let m = GasNode {
            id: "m".into(),
            p_min_sqr: 43.0 * 43.0,
            p_max_sqr: 68.0 * 68.0,
        };
        let f = max_capacity(6.808e-5, &m, &m).unwrap();
        assert!((f - (2775.0f64 * 6.808e-5).sqrt()).abs() < 1e-15);
        assert!((f - 0.435).abs() < 5e-4);
        let f = max_capacity(10.590e-5, &m, &m).unwrap();
        assert!((f - 0.542).abs() < 5e-4);
        let flat = GasNode {
            p_min_sqr: 1849.0,
            p_max_sqr: 1849.0,
            ..m.clone()
        };
        assert_eq!(max_capacity(1e-4, &flat, &flat).unwrap(), 0.0);
        let low = GasNode {
            p_max_sqr: 1000.0,
            p_min_sqr: 0.0,
            ..m.clone()
        };
        assert!(matches!(max_capacity(1e-4, &low, &m), Err(Error::NoFeasibleFlow(_))));
    }

    #[test]
    fn resistance_inverse_in_length() {
        let c = GasConstants::PLACEHOLDER;
        let g = PipeGeometry {
            length: 70_000.0,
            diameter: 0.6,
            roughness: 0.012,
        };
        let r1 = pipeline_resistance(&g, &c).unwrap();
        let r2 = pipeline_resistance(&PipeGeometry { length: 140_000.0, ..g }, &c).unwrap();
        assert!((r1 / r2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn calibration_hits_target() {
        let g = PipeGeometry {
            length: 70_000.0,
            diameter: 0.6,
            roughness: 0.012,
        };
        let c = calibrate_compressibility(&g, &GasConstants::PLACEHOLDER, 6.808e-5).unwrap();
        let r = pipeline_resistance(&g, &c).unwrap();
        assert!((r / 6.808e-5 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn breakpoints_n6() {
        let t = BreakpointTable::uniform(0.435, 6).unwrap();
        let expected = [-0.435, -0.29, -0.145, 0.0, 0.145, 0.29, 0.435];
        for (a, b) in t.f.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((t.f_prime[6] - 0.189225).abs() < 1e-12);
        assert_eq!(t.f_prime[3], 0.0);
        for i in 0..=6 {
            assert_eq!(t.f_prime[i], -t.f_prime[6 - i]);
        }
    }

    #[test]
    fn chord_error_straddling_zero_matches_sampling() {
        for (a, b) in [(-0.3, 0.1), (-0.2, 0.2), (-0.05, 0.4)] {
            let sampled = (0..=200_000)
                .map(|i| a + (b - a) * i as f64 / 200_000.0)
                .map(|x| {
                    let chord = signed_square(a) + (signed_square(b) - signed_square(a)) / (b - a) * (x - a);
                    (x * x.abs() - chord).abs()
                })
                .fold(0.0, f64::max);
            assert!((chord_error(a, b) - sampled).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn eval_is_exact_at_breakpoints() {
        let t = BreakpointTable::uniform(0.5, 5).unwrap();
        for (f, fp) in t.f.iter().zip(&t.f_prime) {
            assert!((t.eval(*f) - fp).abs() < 1e-15);
        }
    }
}
