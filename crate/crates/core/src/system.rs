//! Typed energy-system data model and its CSV directory format.
//!
//! Every table stores values in the internal unit system (GW, GWh, MSm³/h,
//! MSm³, bar, bar², M€), so a load/export round trip is bit-exact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics;
use crate::table::{fmt_f64, fmt_opt, write_csv, Row, Table};

/// Global gas properties shared by every pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasConstants {
    /// Lower heating value of natural gas (GWh/MSm³).
    pub h_ch4: f64,
    /// Lower heating value of hydrogen (GWh/MSm³).
    pub h_h2: f64,
    /// Standard temperature (K).
    pub t_n: f64,
    /// Average gas temperature (K).
    pub t_m: f64,
    /// Standard pressure (bar).
    pub p_n: f64,
    /// Standard density (kg/Sm³).
    pub rho_n: f64,
    /// Average density (kg/m³).
    pub rho_m: f64,
    /// Average dynamic viscosity (10⁻⁶ Pa·s).
    pub eta_m: f64,
    /// Average compressibility factor.
    pub k_m: f64,
    /// Average velocity (m/s).
    pub v_m: f64,
}

impl GasConstants {
    /// Placeholder values used when a system ships no `gas_constants.csv`.
    /// They are plausible for high-pressure natural gas but are not taken from
    /// any measured data set and should be overridden.
    pub const PLACEHOLDER: GasConstants = GasConstants {
        h_ch4: 10.0,
        h_h2: 3.0,
        t_n: 273.15,
        t_m: 281.15,
        p_n: 1.01325,
        rho_n: 0.73,
        rho_m: 45.0,
        eta_m: 11.0,
        k_m: 0.9,
        v_m: 7.5,
    };

    const COLUMNS: [&'static str; 10] = [
        "h_ch4", "h_h2", "t_n", "t_m", "p_n", "rho_n", "rho_m", "eta_m", "k_m", "v_m",
    ];

    fn values(&self) -> [f64; 10] {
        [
            self.h_ch4, self.h_h2, self.t_n, self.t_m, self.p_n, self.rho_n, self.rho_m, self.eta_m, self.k_m, self.v_m,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in Self::COLUMNS.iter().zip(self.values()) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "gas constant {name} must be positive, got {v}"
                )));
            }
        }
        if self.h_ch4 <= self.h_h2 {
            return Err(Error::InvalidArgument(
                "heating value of natural gas must exceed that of hydrogen".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasNode {
    pub id: String,
    /// Squared minimum pressure (bar²).
    pub p_min_sqr: f64,
    /// Squared maximum operating pressure (bar²).
    pub p_max_sqr: f64,
}

/// Physical dimensions of a pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipeGeometry {
    /// Length (m).
    pub length: f64,
    /// Inner diameter (m).
    pub diameter: f64,
    /// Absolute roughness (mm).
    pub roughness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub from_node: String,
    pub to_node: String,
    pub circuit: String,
    pub geometry: Option<PipeGeometry>,
    /// Pipeline factor ((MSm³/h)²/bar²).
    pub r_gas: f64,
    /// Transmission capacity (MSm³/h).
    pub f_max: f64,
    pub existing: bool,
    /// Investment cost (M€). Annualized with `annuity_rate` and `lifetime`
    /// when a rate is given, used as-is otherwise.
    pub capex: f64,
    pub annuity_rate: Option<f64>,
    /// Economic lifetime (years). Absent means a perpetual annuity.
    pub lifetime: Option<f64>,
    pub x_max: f64,
}

impl Pipeline {
    /// Annualized investment cost (M€/yr).
    pub fn invest_cost(&self) -> f64 {
        self.capex * annuity_factor(self.annuity_rate, self.lifetime)
    }

    pub fn is_candidate(&self) -> bool {
        !self.existing
    }
}

/// `a = r / (1 - (1 + r)^-n)`, or `r` without a lifetime, or 1 without a rate.
pub fn annuity_factor(rate: Option<f64>, lifetime: Option<f64>) -> f64 {
    match (rate, lifetime) {
        (None, _) => 1.0,
        (Some(0.0), _) => lifetime.map(|n| 1.0 / n).unwrap_or(1.0),
        (Some(r), None) => r,
        (Some(r), Some(n)) => r / (1.0 - (1.0 + r).powf(-n)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compressor {
    pub from_node: String,
    pub to_node: String,
    pub circuit: String,
    /// Ratio of outlet to inlet squared pressure (p.u.).
    pub ratio_sqr: f64,
    /// Maximum absolute pressure increase (bar).
    pub max_boost: f64,
    /// Natural gas consumed per unit of natural gas compressed (p.u.).
    pub cons_ch4: f64,
    /// Hydrogen consumed per unit of hydrogen compressed (p.u.).
    pub cons_h2: f64,
    /// Combined throughput limit (MSm³/h).
    pub f_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub from_bus: String,
    pub to_bus: String,
    pub circuit: String,
    /// Susceptance (GW per radian).
    pub susceptance: f64,
    /// Thermal capacity (GW).
    pub capacity: f64,
    pub existing: bool,
    /// Annualized investment cost (M€/yr).
    pub invest_cost: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    GasWell,
    NgStorage,
    ThermalGas,
    ThermalOther,
    Renewable,
    Bess,
    Electrolyzer,
    SmrCcs,
    FuelCell,
    H2Tank,
    H2Cavern,
}

impl UnitKind {
    pub const ALL: [UnitKind; 11] = [
        UnitKind::GasWell,
        UnitKind::NgStorage,
        UnitKind::ThermalGas,
        UnitKind::ThermalOther,
        UnitKind::Renewable,
        UnitKind::Bess,
        UnitKind::Electrolyzer,
        UnitKind::SmrCcs,
        UnitKind::FuelCell,
        UnitKind::H2Tank,
        UnitKind::H2Cavern,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            UnitKind::GasWell => "gas_well",
            UnitKind::NgStorage => "ng_storage",
            UnitKind::ThermalGas => "thermal_gas",
            UnitKind::ThermalOther => "thermal_other",
            UnitKind::Renewable => "renewable",
            UnitKind::Bess => "bess",
            UnitKind::Electrolyzer => "electrolyzer",
            UnitKind::SmrCcs => "smr_ccs",
            UnitKind::FuelCell => "fuel_cell",
            UnitKind::H2Tank => "h2_tank",
            UnitKind::H2Cavern => "h2_cavern",
        }
    }

    pub fn needs_bus(self) -> bool {
        matches!(
            self,
            UnitKind::ThermalGas
                | UnitKind::ThermalOther
                | UnitKind::Renewable
                | UnitKind::Bess
                | UnitKind::Electrolyzer
                | UnitKind::FuelCell
        )
    }

    pub fn needs_node(self) -> bool {
        matches!(
            self,
            UnitKind::GasWell
                | UnitKind::NgStorage
                | UnitKind::ThermalGas
                | UnitKind::Electrolyzer
                | UnitKind::SmrCcs
                | UnitKind::FuelCell
                | UnitKind::H2Tank
                | UnitKind::H2Cavern
        )
    }

    pub fn is_storage(self) -> bool {
        matches!(
            self,
            UnitKind::NgStorage | UnitKind::Bess | UnitKind::H2Tank | UnitKind::H2Cavern
        )
    }

    /// Storage that tracks its state of charge across representative periods.
    pub fn is_long_term_storage(self) -> bool {
        matches!(self, UnitKind::NgStorage | UnitKind::H2Cavern)
    }

    pub fn is_hydrogen_unit(self) -> bool {
        matches!(
            self,
            UnitKind::Electrolyzer | UnitKind::SmrCcs | UnitKind::FuelCell | UnitKind::H2Tank | UnitKind::H2Cavern
        )
    }

    pub fn is_natural_gas_unit(self) -> bool {
        matches!(self, UnitKind::GasWell | UnitKind::NgStorage)
    }

    /// Power-sector units whose investment enters the generation cost term.
    pub fn is_power_unit(self) -> bool {
        matches!(
            self,
            UnitKind::ThermalGas | UnitKind::ThermalOther | UnitKind::Renewable | UnitKind::Bess
        )
    }

    fn required_fields(self) -> &'static [&'static str] {
        match self {
            UnitKind::GasWell => &["p_max"],
            UnitKind::NgStorage | UnitKind::H2Tank | UnitKind::H2Cavern => {
                &["p_max", "cs_max", "eta_ch", "eta_dis", "etp"]
            }
            UnitKind::ThermalGas => &["p_max", "cs_v"],
            UnitKind::ThermalOther | UnitKind::Renewable => &["p_max"],
            UnitKind::Bess => &["p_max", "eta_ch", "eta_dis", "etp"],
            UnitKind::Electrolyzer => &["p_max", "hpe"],
            UnitKind::SmrCcs => &["p_max", "hpc"],
            UnitKind::FuelCell => &["cs_max", "eph"],
        }
    }
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UnitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        UnitKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown unit kind `{s}`")))
    }
}

/// One generation, conversion, storage or supply unit.
///
/// Each kind reads a different subset of the optional numeric fields;
/// the accessors return 0 for absent values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UnitParams {
    pub p_max: Option<f64>,
    pub p_min: Option<f64>,
    pub cs_max: Option<f64>,
    pub hpe: Option<f64>,
    pub hpc: Option<f64>,
    pub eph: Option<f64>,
    pub cs_v: Option<f64>,
    pub cs_su: Option<f64>,
    pub cs_up: Option<f64>,
    pub eta_ch: Option<f64>,
    pub eta_dis: Option<f64>,
    pub etp: Option<f64>,
    pub in_res: Option<f64>,
    pub r_min: Option<f64>,
    pub ramp_up: Option<f64>,
    pub ramp_dn: Option<f64>,
    pub emis: Option<f64>,
    pub c_inv: Option<f64>,
    pub c_om: Option<f64>,
    pub c_var: Option<f64>,
    pub c_su: Option<f64>,
    pub c_up: Option<f64>,
    pub eu: Option<f64>,
    pub x_max: Option<f64>,
}

macro_rules! unit_param_impl {
    ($($f:ident),*) => {
        impl UnitParams {
            pub const COLUMNS: &'static [&'static str] = &[$(stringify!($f)),*];

            fn read(row: &Row<'_>) -> Result<Self> {
                Ok(UnitParams { $($f: row.opt_f64(stringify!($f))?),* })
            }

            fn fields(&self) -> Vec<Option<f64>> {
                vec![$(self.$f),*]
            }

            fn get(&self, name: &str) -> Option<f64> {
                match name {
                    $(stringify!($f) => self.$f,)*
                    _ => None,
                }
            }
        }
    };
}

unit_param_impl!(
    p_max, p_min, cs_max, hpe, hpc, eph, cs_v, cs_su, cs_up, eta_ch, eta_dis, etp, in_res, r_min, ramp_up, ramp_dn,
    emis, c_inv, c_om, c_var, c_su, c_up, eu, x_max
);

#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub id: String,
    pub kind: UnitKind,
    pub bus: Option<String>,
    pub node: Option<String>,
    pub params: UnitParams,
}

impl Unit {
    pub fn p_max(&self) -> f64 {
        self.params.p_max.unwrap_or(0.0)
    }
    pub fn p_min(&self) -> f64 {
        self.params.p_min.unwrap_or(0.0)
    }
    pub fn cs_max(&self) -> f64 {
        self.params.cs_max.unwrap_or(0.0)
    }
    pub fn eta_ch(&self) -> f64 {
        self.params.eta_ch.unwrap_or(1.0)
    }
    pub fn eta_dis(&self) -> f64 {
        self.params.eta_dis.unwrap_or(1.0)
    }
    pub fn etp(&self) -> f64 {
        self.params.etp.unwrap_or(0.0)
    }
    pub fn in_res(&self) -> f64 {
        self.params.in_res.unwrap_or(0.0)
    }
    pub fn r_min(&self) -> f64 {
        self.params.r_min.unwrap_or(0.0)
    }
    pub fn eu(&self) -> f64 {
        self.params.eu.unwrap_or(0.0)
    }
    pub fn x_max(&self) -> f64 {
        self.params.x_max.unwrap_or(0.0)
    }
    pub fn c_inv(&self) -> f64 {
        self.params.c_inv.unwrap_or(0.0)
    }
    pub fn c_om(&self) -> f64 {
        self.params.c_om.unwrap_or(0.0)
    }
    pub fn emis(&self) -> f64 {
        self.params.emis.unwrap_or(0.0)
    }
    /// Energy or volume capacity of one storage unit, `P̄·ETP`.
    pub fn storage_capacity(&self) -> f64 {
        self.p_max() * self.etp()
    }

    fn validate(&self) -> std::result::Result<(), String> {
        for f in self.kind.required_fields() {
            if self.params.get(f).is_none() {
                return Err(format!("{} unit `{}` needs `{f}`", self.kind, self.id));
            }
        }
        for (name, v) in UnitParams::COLUMNS.iter().zip(self.params.fields()) {
            if let Some(v) = v {
                if v < 0.0 {
                    return Err(format!("unit `{}`: `{name}` must be non-negative", self.id));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.params.p_min, self.params.p_max) {
            if lo > hi {
                return Err(format!("unit `{}`: p_min exceeds p_max", self.id));
            }
        }
        if self.r_min() >= 1.0 {
            return Err(format!("unit `{}`: r_min must be below 1", self.id));
        }
        if self.in_res() > 1.0 {
            return Err(format!("unit `{}`: in_res must not exceed 1", self.id));
        }
        for eta in [self.params.eta_ch, self.params.eta_dis].into_iter().flatten() {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(format!("unit `{}`: efficiencies must lie in (0, 1]", self.id));
            }
        }
        for (name, v) in [
            ("hpe", self.params.hpe),
            ("hpc", self.params.hpc),
            ("eph", self.params.eph),
            ("cs_v", self.params.cs_v),
        ] {
            if v == Some(0.0) {
                return Err(format!("unit `{}`: `{name}` must be positive", self.id));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandClass {
    pub id: String,
    pub sector: String,
    /// Minimum hydrogen substitution rate (p.u. of delivered natural gas).
    pub sub_min: f64,
    /// Maximum hydrogen substitution rate.
    pub sub_max: f64,
    /// Emission factor of natural gas burned by this class (MtCO₂/MSm³).
    pub emis: f64,
}

impl DemandClass {
    pub fn is_industry(&self) -> bool {
        self.sector == "industry"
    }
}

/// Key of a per-node gas or hydrogen demand: `(rp, k, node, class)`.
pub type GasDemandKey = (usize, usize, String, String);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DemandSet {
    /// Power demand per `(rp, k, bus)` (GW).
    pub power: BTreeMap<(usize, usize, String), f64>,
    /// Natural gas demand per `(rp, k, node, class)` (MSm³/h).
    pub gas: BTreeMap<GasDemandKey, f64>,
    /// Dedicated hydrogen demand per `(rp, k, node, class)` (MSm³/h).
    pub h2: BTreeMap<GasDemandKey, f64>,
    pub classes: Vec<DemandClass>,
}

impl DemandSet {
    pub fn power(&self, rp: usize, k: usize, bus: &str) -> f64 {
        self.power.get(&(rp, k, bus.to_string())).copied().unwrap_or(0.0)
    }

    pub fn class(&self, id: &str) -> Option<&DemandClass> {
        self.classes.iter().find(|c| c.id == id)
    }
}

/// Long-term storage representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StorageMode {
    /// Inter-period in representative mode, anchored intra-period in full chronology.
    #[default]
    Auto,
    Inter,
    Intra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    #[default]
    Plan,
    OperateFixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub enum FlowFormulation {
    #[serde(rename = "stp")]
    Stp,
    #[default]
    #[serde(rename = "btp")]
    Btp,
    #[serde(rename = "bpp")]
    Bpp,
}

impl FlowFormulation {
    pub fn as_str(self) -> &'static str {
        match self {
            FlowFormulation::Stp => "stp",
            FlowFormulation::Btp => "btp",
            FlowFormulation::Bpp => "bpp",
        }
    }
}

impl fmt::Display for FlowFormulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FlowFormulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stp" => Ok(FlowFormulation::Stp),
            "btp" => Ok(FlowFormulation::Btp),
            "bpp" => Ok(FlowFormulation::Bpp),
            _ => Err(Error::InvalidArgument(format!("unknown flow formulation `{s}`"))),
        }
    }
}

fn default_blend_max() -> f64 {
    0.1
}
fn default_h2ns() -> f64 {
    3.0
}
fn default_increments() -> usize {
    6
}
fn default_gap() -> f64 {
    0.01
}
fn default_true() -> bool {
    true
}
fn default_days() -> f64 {
    365.0
}
fn default_hours() -> f64 {
    8760.0
}
fn default_continuous_kinds() -> Vec<UnitKind> {
    vec![
        UnitKind::Renewable,
        UnitKind::Bess,
        UnitKind::Electrolyzer,
        UnitKind::SmrCcs,
        UnitKind::H2Tank,
        UnitKind::FuelCell,
    ]
}

/// Scenario settings, read from a flat TOML file.
///
/// Prices are in internal units: M€/MSm³ for gas, M€/GWh for electricity and
/// M€/MtCO₂ for carbon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub flow_formulation: FlowFormulation,
    #[serde(default)]
    pub blend_min: f64,
    #[serde(default = "default_blend_max")]
    pub blend_max: f64,
    /// Minimum renewable generation share. Absent disables the policy.
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(default)]
    pub c_co2: Option<f64>,
    #[serde(default)]
    pub c_ch4: Option<f64>,
    #[serde(default)]
    pub c_ens: Option<f64>,
    #[serde(default = "default_h2ns")]
    pub c_h2ns: f64,
    #[serde(default)]
    pub c_ch4ns: Option<f64>,
    #[serde(default = "default_increments")]
    pub n_increments: usize,
    /// Moving-window length. Defaults to the number of sub-periods per rp.
    #[serde(default)]
    pub mow: Option<usize>,
    #[serde(default = "default_gap")]
    pub milp_gap: f64,
    /// Solver time limit (s).
    #[serde(default)]
    pub time_limit: Option<f64>,
    /// Big-M constant. Defaults to ten times the largest pipeline capacity.
    #[serde(default)]
    pub big_m: Option<f64>,
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default)]
    pub long_term_storage: StorageMode,
    /// Charge gas thermals the variable cost `c_var` as well.
    #[serde(default)]
    pub gas_thermal_var_cost: bool,
    /// Price SMR-CCS residual emissions in the industry carbon term.
    #[serde(default = "default_true")]
    pub price_smr_emissions: bool,
    /// Unit kinds whose investment variable is continuous.
    #[serde(default = "default_continuous_kinds")]
    pub continuous_invest_kinds: Vec<UnitKind>,
    /// Target of the representative-period weight sum.
    #[serde(default = "default_days")]
    pub year_days: f64,
    /// Target of the weighted sub-period sum.
    #[serde(default = "default_hours")]
    pub year_hours: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty configuration is valid")
    }
}

impl ScenarioConfig {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Parses and validates a configuration from TOML text.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(0.0 <= self.blend_min && self.blend_min <= self.blend_max && self.blend_max < 1.0) {
            return bad(format!(
                "blend bounds must satisfy 0 <= blend_min <= blend_max < 1, got {} and {}",
                self.blend_min, self.blend_max
            ));
        }
        if let Some(k) = self.kappa {
            if !(0.0..=1.0).contains(&k) {
                return bad(format!("kappa must lie in [0, 1], got {k}"));
            }
        }
        if self.n_increments < 2 {
            return bad(format!("at least two increments are needed, got {}", self.n_increments));
        }
        if self.mow == Some(0) {
            return bad("mow must be positive".into());
        }
        if !(self.milp_gap >= 0.0) {
            return bad("milp_gap must be non-negative".into());
        }
        if let Some(m) = self.big_m {
            if !(m > 0.0) {
                return bad("big_m must be positive".into());
            }
        }
        for (name, v) in [
            ("c_co2", self.c_co2),
            ("c_ch4", self.c_ch4),
            ("c_ens", self.c_ens),
            ("c_ch4ns", self.c_ch4ns),
            ("c_h2ns", Some(self.c_h2ns)),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 0.0) {
                    return bad(format!("{name} must be a non-negative price"));
                }
            }
        }
        Ok(())
    }

    pub fn integer_invest(&self, kind: UnitKind) -> bool {
        !self.continuous_invest_kinds.contains(&kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySystem {
    pub constants: GasConstants,
    pub nodes: Vec<GasNode>,
    pub pipelines: Vec<Pipeline>,
    pub compressors: Vec<Compressor>,
    /// The first bus is the angle reference.
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub units: Vec<Unit>,
    pub demand: DemandSet,
    /// Capacity factor per `(rp, k, unit)`; absent entries are 1.
    pub availability: BTreeMap<(usize, usize, String), f64>,
}

/// A unit attachment problem found by [`EnergySystem::validate_attachments`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AttachmentIssue {
    pub unit: String,
    pub problem: AttachmentProblem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AttachmentProblem {
    MissingBus,
    MissingNode,
    UnexpectedBus,
    UnexpectedNode,
    DuplicateId,
}

impl fmt::Display for AttachmentIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.problem {
            AttachmentProblem::MissingBus => "has no bus attachment",
            AttachmentProblem::MissingNode => "has no gas node attachment",
            AttachmentProblem::UnexpectedBus => "must not attach to a bus",
            AttachmentProblem::UnexpectedNode => "must not attach to a gas node",
            AttachmentProblem::DuplicateId => "id is used more than once",
        };
        write!(f, "unit `{}` {what}", self.unit)
    }
}

impl EnergySystem {
    pub fn empty(constants: GasConstants) -> Self {
        EnergySystem {
            constants,
            nodes: Vec::new(),
            pipelines: Vec::new(),
            compressors: Vec::new(),
            buses: Vec::new(),
            lines: Vec::new(),
            units: Vec::new(),
            demand: DemandSet::default(),
            availability: BTreeMap::new(),
        }
    }

    pub fn node(&self, id: &str) -> Option<&GasNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn unit(&self, id: &str) -> Option<&Unit> {
        self.units.iter().find(|u| u.id == id)
    }

    pub fn units_of(&self, kind: UnitKind) -> impl Iterator<Item = &Unit> {
        self.units.iter().filter(move |u| u.kind == kind)
    }

    pub fn availability(&self, rp: usize, k: usize, unit: &str) -> f64 {
        self.availability
            .get(&(rp, k, unit.to_string()))
            .copied()
            .unwrap_or(1.0)
    }

    pub fn max_pipeline_capacity(&self) -> f64 {
        self.pipelines.iter().map(|p| p.f_max).fold(0.0, f64::max)
    }

    /// Lists units whose bus/node attachments do not fit their kind.
    pub fn validate_attachments(&self) -> Vec<AttachmentIssue> {
        let mut issues = Vec::new();
        let mut seen = BTreeSet::new();
        for u in &self.units {
            let mut push = |problem| {
                issues.push(AttachmentIssue {
                    unit: u.id.clone(),
                    problem,
                })
            };
            if !seen.insert(u.id.as_str()) {
                push(AttachmentProblem::DuplicateId);
            }
            match (u.kind.needs_bus(), u.bus.is_some()) {
                (true, false) => push(AttachmentProblem::MissingBus),
                (false, true) => push(AttachmentProblem::UnexpectedBus),
                _ => {}
            }
            match (u.kind.needs_node(), u.node.is_some()) {
                (true, false) => push(AttachmentProblem::MissingNode),
                (false, true) => push(AttachmentProblem::UnexpectedNode),
                _ => {}
            }
        }
        issues.sort();
        issues
    }

    /// Checks cross references and invariants of a fully assembled system.
    pub fn check(&self) -> Result<()> {
        self.constants.validate()?;
        let mut node_ids = BTreeSet::new();
        for n in &self.nodes {
            check_id("gas node", &n.id)?;
            if !node_ids.insert(n.id.as_str()) {
                return Err(Error::Link(format!("gas node `{}` is defined twice", n.id)));
            }
            if !(0.0 <= n.p_min_sqr && n.p_min_sqr < n.p_max_sqr) {
                return Err(Error::InvalidArgument(format!(
                    "gas node `{}` needs 0 <= p_min_sqr < p_max_sqr",
                    n.id
                )));
            }
        }
        let mut bus_ids = BTreeSet::new();
        for b in &self.buses {
            check_id("bus", &b.id)?;
            if !bus_ids.insert(b.id.as_str()) {
                return Err(Error::Link(format!("bus `{}` is defined twice", b.id)));
            }
        }
        let node = |what: &str, id: &str| -> Result<()> {
            if node_ids.contains(id) {
                Ok(())
            } else {
                Err(Error::Link(format!("{what} references missing gas node `{id}`")))
            }
        };
        let bus = |what: &str, id: &str| -> Result<()> {
            if bus_ids.contains(id) {
                Ok(())
            } else {
                Err(Error::Link(format!("{what} references missing bus `{id}`")))
            }
        };
        let mut arcs = BTreeSet::new();
        for p in &self.pipelines {
            let name = format!("pipeline {}-{}-{}", p.from_node, p.to_node, p.circuit);
            check_id("pipeline circuit", &p.circuit)?;
            node(&name, &p.from_node)?;
            node(&name, &p.to_node)?;
            if !arcs.insert(("pl", &p.from_node, &p.to_node, &p.circuit)) {
                return Err(Error::Link(format!("{name} is defined twice")));
            }
            if !(p.r_gas > 0.0 && p.f_max > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} needs positive r_gas and f_max")));
            }
        }
        for c in &self.compressors {
            let name = format!("compressor {}-{}-{}", c.from_node, c.to_node, c.circuit);
            check_id("compressor circuit", &c.circuit)?;
            node(&name, &c.from_node)?;
            node(&name, &c.to_node)?;
            if !arcs.insert(("cp", &c.from_node, &c.to_node, &c.circuit)) {
                return Err(Error::Link(format!("{name} is defined twice")));
            }
            if c.ratio_sqr < 1.0 || !(0.0..1.0).contains(&c.cons_ch4) || !(0.0..1.0).contains(&c.cons_h2) {
                return Err(Error::InvalidArgument(format!(
                    "{name} needs ratio_sqr >= 1 and consumption fractions in [0, 1)"
                )));
            }
        }
        for l in &self.lines {
            let name = format!("line {}-{}-{}", l.from_bus, l.to_bus, l.circuit);
            check_id("line circuit", &l.circuit)?;
            bus(&name, &l.from_bus)?;
            bus(&name, &l.to_bus)?;
            if !arcs.insert(("ln", &l.from_bus, &l.to_bus, &l.circuit)) {
                return Err(Error::Link(format!("{name} is defined twice")));
            }
        }
        for u in &self.units {
            check_id("unit", &u.id)?;
            if let Some(b) = &u.bus {
                bus(&format!("unit `{}`", u.id), b)?;
            }
            if let Some(n) = &u.node {
                node(&format!("unit `{}`", u.id), n)?;
            }
            u.validate().map_err(Error::InvalidArgument)?;
        }
        if let Some(issue) = self.validate_attachments().first() {
            return Err(Error::Link(issue.to_string()));
        }
        for (rp, k, b) in self.demand.power.keys() {
            bus(&format!("power demand ({rp}, {k})"), b)?;
        }
        let mut class_ids = BTreeSet::new();
        for c in &self.demand.classes {
            check_id("demand class", &c.id)?;
            if !class_ids.insert(c.id.as_str()) {
                return Err(Error::Link(format!("demand class `{}` is defined twice", c.id)));
            }
            if !(0.0 <= c.sub_min && c.sub_min <= c.sub_max) {
                return Err(Error::InvalidArgument(format!(
                    "demand class `{}` needs 0 <= sub_min <= sub_max",
                    c.id
                )));
            }
        }
        for (what, table) in [("gas demand", &self.demand.gas), ("hydrogen demand", &self.demand.h2)] {
            for (rp, k, n, c) in table.keys() {
                node(&format!("{what} ({rp}, {k})"), n)?;
                if !class_ids.contains(c.as_str()) {
                    return Err(Error::Link(format!("{what} references missing class `{c}`")));
                }
            }
        }
        for (rp, k, u) in self.availability.keys() {
            if self.unit(u).is_none() {
                return Err(Error::Link(format!(
                    "availability ({rp}, {k}) references missing unit `{u}`"
                )));
            }
        }
        let values = self
            .demand
            .power
            .values()
            .chain(self.demand.gas.values())
            .chain(self.demand.h2.values())
            .chain(self.availability.values());
        if values.into_iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidArgument(
                "demands and availabilities must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Reads a system from a directory of CSV tables. See the data dictionary
    /// in the README for the file layout.
    pub fn read_dir(dir: &Path) -> Result<Self> {
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
            ));
        }
        let constants = read_constants(dir)?;
        let mut sys = EnergySystem::empty(constants);

        if let Some(t) = Table::read(
            &dir.join("gas_nodes.csv"),
            &["id", "p_min_sqr", "p_max_sqr"],
            &["id", "p_min_sqr", "p_max_sqr"],
        )? {
            for r in t.rows() {
                sys.nodes.push(GasNode {
                    id: r.str("id")?.to_string(),
                    p_min_sqr: r.f64("p_min_sqr")?,
                    p_max_sqr: r.f64("p_max_sqr")?,
                });
            }
        }

        const PIPE_COLS: &[&str] = &[
            "from_node",
            "to_node",
            "circuit",
            "length",
            "diameter",
            "roughness",
            "r_gas",
            "f_max",
            "existing",
            "capex",
            "annuity_rate",
            "lifetime",
            "x_max",
        ];
        if let Some(t) = Table::read(
            &dir.join("pipelines.csv"),
            PIPE_COLS,
            &["from_node", "to_node", "circuit", "existing"],
        )? {
            for r in t.rows() {
                let p = read_pipeline(&r, &sys.nodes, &constants)?;
                sys.pipelines.push(p);
            }
        }

        const CMP_COLS: &[&str] = &[
            "from_node",
            "to_node",
            "circuit",
            "ratio_sqr",
            "max_boost",
            "cons_ch4",
            "cons_h2",
            "f_max",
        ];
        if let Some(t) = Table::read(&dir.join("compressors.csv"), CMP_COLS, CMP_COLS)? {
            for r in t.rows() {
                sys.compressors.push(Compressor {
                    from_node: r.str("from_node")?.to_string(),
                    to_node: r.str("to_node")?.to_string(),
                    circuit: r.str("circuit")?.to_string(),
                    ratio_sqr: r.f64("ratio_sqr")?,
                    max_boost: r.f64("max_boost")?,
                    cons_ch4: r.f64("cons_ch4")?,
                    cons_h2: r.f64("cons_h2")?,
                    f_max: r.f64("f_max")?,
                });
            }
        }

        if let Some(t) = Table::read(&dir.join("buses.csv"), &["id"], &["id"])? {
            for r in t.rows() {
                sys.buses.push(Bus {
                    id: r.str("id")?.to_string(),
                });
            }
        }

        const LINE_COLS: &[&str] = &[
            "from_bus",
            "to_bus",
            "circuit",
            "susceptance",
            "capacity",
            "existing",
            "invest_cost",
            "x_max",
        ];
        if let Some(t) = Table::read(&dir.join("lines.csv"), LINE_COLS, &LINE_COLS[..6])? {
            for r in t.rows() {
                let existing = r.opt_bool("existing")?.unwrap_or(true);
                sys.lines.push(Line {
                    from_bus: r.str("from_bus")?.to_string(),
                    to_bus: r.str("to_bus")?.to_string(),
                    circuit: r.str("circuit")?.to_string(),
                    susceptance: r.f64("susceptance")?,
                    capacity: r.f64("capacity")?,
                    existing,
                    invest_cost: r.opt_f64("invest_cost")?.unwrap_or(0.0),
                    x_max: r.opt_f64("x_max")?.unwrap_or(if existing { 0.0 } else { 1.0 }),
                });
            }
        }

        let mut unit_cols = vec!["id", "kind", "bus", "node"];
        unit_cols.extend_from_slice(UnitParams::COLUMNS);
        if let Some(t) = Table::read(&dir.join("units.csv"), &unit_cols, &["id", "kind"])? {
            for r in t.rows() {
                let kind: UnitKind = r.str("kind")?.parse().map_err(|e: Error| r.error(e.to_string()))?;
                let unit = Unit {
                    id: r.str("id")?.to_string(),
                    kind,
                    bus: r.opt_str("bus").map(str::to_string),
                    node: r.opt_str("node").map(str::to_string),
                    params: UnitParams::read(&r)?,
                };
                unit.validate().map_err(|m| r.error(m))?;
                sys.units.push(unit);
            }
        }

        const CLASS_COLS: &[&str] = &["id", "sector", "sub_min", "sub_max", "emis"];
        if let Some(t) = Table::read(&dir.join("demand_classes.csv"), CLASS_COLS, &["id", "sector"])? {
            for r in t.rows() {
                let c = DemandClass {
                    id: r.str("id")?.to_string(),
                    sector: r.str("sector")?.to_string(),
                    sub_min: r.opt_f64("sub_min")?.unwrap_or(0.0),
                    sub_max: r.opt_f64("sub_max")?.unwrap_or(0.0),
                    emis: r.opt_f64("emis")?.unwrap_or(0.0),
                };
                if c.sub_min > c.sub_max {
                    return Err(r.error("sub_min exceeds sub_max"));
                }
                sys.demand.classes.push(c);
            }
        }

        if let Some(t) = Table::read(
            &dir.join("power_demand.csv"),
            &["rp", "k", "bus", "value"],
            &["rp", "k", "bus", "value"],
        )? {
            for r in t.rows() {
                let key = (r.usize("rp")?, r.usize("k")?, r.str("bus")?.to_string());
                insert_unique(&mut sys.demand.power, key, nonneg(&r)?, &r)?;
            }
        }
        for (file, target) in [
            ("gas_demand.csv", &mut sys.demand.gas),
            ("h2_demand.csv", &mut sys.demand.h2),
        ] {
            let cols = ["rp", "k", "node", "class", "value"];
            if let Some(t) = Table::read(&dir.join(file), &cols, &cols)? {
                for r in t.rows() {
                    let key = (
                        r.usize("rp")?,
                        r.usize("k")?,
                        r.str("node")?.to_string(),
                        r.str("class")?.to_string(),
                    );
                    insert_unique(target, key, nonneg(&r)?, &r)?;
                }
            }
        }
        if let Some(t) = Table::read(
            &dir.join("availability.csv"),
            &["rp", "k", "unit", "value"],
            &["rp", "k", "unit", "value"],
        )? {
            for r in t.rows() {
                let key = (r.usize("rp")?, r.usize("k")?, r.str("unit")?.to_string());
                insert_unique(&mut sys.availability, key, nonneg(&r)?, &r)?;
            }
        }

        sys.check()?;
        Ok(sys)
    }

    /// Writes the system in the format read by [`EnergySystem::read_dir`].
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let c = &self.constants;
        write_csv(
            &dir.join("gas_constants.csv"),
            &GasConstants::COLUMNS,
            &[c.values().iter().map(|v| fmt_f64(*v)).collect()],
        )?;
        let rows: Vec<_> = self
            .nodes
            .iter()
            .map(|n| vec![n.id.clone(), fmt_f64(n.p_min_sqr), fmt_f64(n.p_max_sqr)])
            .collect();
        write_csv(&dir.join("gas_nodes.csv"), &["id", "p_min_sqr", "p_max_sqr"], &rows)?;
        let rows: Vec<_> = self
            .pipelines
            .iter()
            .map(|p| {
                let g = p.geometry;
                vec![
                    p.from_node.clone(),
                    p.to_node.clone(),
                    p.circuit.clone(),
                    fmt_opt(g.map(|g| g.length)),
                    fmt_opt(g.map(|g| g.diameter)),
                    fmt_opt(g.map(|g| g.roughness)),
                    fmt_f64(p.r_gas),
                    fmt_f64(p.f_max),
                    p.existing.to_string(),
                    fmt_f64(p.capex),
                    fmt_opt(p.annuity_rate),
                    fmt_opt(p.lifetime),
                    fmt_f64(p.x_max),
                ]
            })
            .collect();
        write_csv(
            &dir.join("pipelines.csv"),
            &[
                "from_node",
                "to_node",
                "circuit",
                "length",
                "diameter",
                "roughness",
                "r_gas",
                "f_max",
                "existing",
                "capex",
                "annuity_rate",
                "lifetime",
                "x_max",
            ],
            &rows,
        )?;
        let rows: Vec<_> = self
            .compressors
            .iter()
            .map(|c| {
                vec![
                    c.from_node.clone(),
                    c.to_node.clone(),
                    c.circuit.clone(),
                    fmt_f64(c.ratio_sqr),
                    fmt_f64(c.max_boost),
                    fmt_f64(c.cons_ch4),
                    fmt_f64(c.cons_h2),
                    fmt_f64(c.f_max),
                ]
            })
            .collect();
        write_csv(
            &dir.join("compressors.csv"),
            &[
                "from_node",
                "to_node",
                "circuit",
                "ratio_sqr",
                "max_boost",
                "cons_ch4",
                "cons_h2",
                "f_max",
            ],
            &rows,
        )?;
        let rows: Vec<_> = self.buses.iter().map(|b| vec![b.id.clone()]).collect();
        write_csv(&dir.join("buses.csv"), &["id"], &rows)?;
        let rows: Vec<_> = self
            .lines
            .iter()
            .map(|l| {
                vec![
                    l.from_bus.clone(),
                    l.to_bus.clone(),
                    l.circuit.clone(),
                    fmt_f64(l.susceptance),
                    fmt_f64(l.capacity),
                    l.existing.to_string(),
                    fmt_f64(l.invest_cost),
                    fmt_f64(l.x_max),
                ]
            })
            .collect();
        write_csv(
            &dir.join("lines.csv"),
            &[
                "from_bus",
                "to_bus",
                "circuit",
                "susceptance",
                "capacity",
                "existing",
                "invest_cost",
                "x_max",
            ],
            &rows,
        )?;
        let mut header = vec!["id", "kind", "bus", "node"];
        header.extend_from_slice(UnitParams::COLUMNS);
        let rows: Vec<_> = self
            .units
            .iter()
            .map(|u| {
                let mut row = vec![
                    u.id.clone(),
                    u.kind.to_string(),
                    u.bus.clone().unwrap_or_default(),
                    u.node.clone().unwrap_or_default(),
                ];
                row.extend(u.params.fields().into_iter().map(fmt_opt));
                row
            })
            .collect();
        write_csv(&dir.join("units.csv"), &header, &rows)?;
        let rows: Vec<_> = self
            .demand
            .classes
            .iter()
            .map(|c| {
                vec![
                    c.id.clone(),
                    c.sector.clone(),
                    fmt_f64(c.sub_min),
                    fmt_f64(c.sub_max),
                    fmt_f64(c.emis),
                ]
            })
            .collect();
        write_csv(
            &dir.join("demand_classes.csv"),
            &["id", "sector", "sub_min", "sub_max", "emis"],
            &rows,
        )?;
        let rows: Vec<_> = self
            .demand
            .power
            .iter()
            .map(|((rp, k, b), v)| vec![rp.to_string(), k.to_string(), b.clone(), fmt_f64(*v)])
            .collect();
        write_csv(&dir.join("power_demand.csv"), &["rp", "k", "bus", "value"], &rows)?;
        for (file, table) in [("gas_demand.csv", &self.demand.gas), ("h2_demand.csv", &self.demand.h2)] {
            let rows: Vec<_> = table
                .iter()
                .map(|((rp, k, n, c), v)| vec![rp.to_string(), k.to_string(), n.clone(), c.clone(), fmt_f64(*v)])
                .collect();
            write_csv(&dir.join(file), &["rp", "k", "node", "class", "value"], &rows)?;
        }
        let rows: Vec<_> = self
            .availability
            .iter()
            .map(|((rp, k, u), v)| vec![rp.to_string(), k.to_string(), u.clone(), fmt_f64(*v)])
            .collect();
        write_csv(&dir.join("availability.csv"), &["rp", "k", "unit", "value"], &rows)
    }
}

fn check_id(what: &str, id: &str) -> Result<()> {
    let ok = !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
    if ok && !id.contains("__") {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} id `{id}` must be non-empty ASCII letters, digits, `_` or `.` without `__`"
        )))
    }
}

fn nonneg(r: &Row<'_>) -> Result<f64> {
    let v = r.f64("value")?;
    if v < 0.0 {
        return Err(r.error("value must be non-negative"));
    }
    Ok(v)
}

fn insert_unique<K: Ord>(map: &mut BTreeMap<K, f64>, key: K, v: f64, r: &Row<'_>) -> Result<()> {
    if map.insert(key, v).is_some() {
        return Err(r.error("duplicate entry"));
    }
    Ok(())
}

fn read_constants(dir: &Path) -> Result<GasConstants> {
    let path = dir.join("gas_constants.csv");
    let Some(t) = Table::read(&path, &GasConstants::COLUMNS, &GasConstants::COLUMNS)? else {
        log::warn!(
            "{} not found; using placeholder gas constants that must be overridden for real studies",
            path.display()
        );
        return Ok(GasConstants::PLACEHOLDER);
    };
    let mut rows = t.rows();
    let r = rows
        .next()
        .ok_or_else(|| Error::schema(t.file(), None, "expected exactly one row"))?;
    let c = GasConstants {
        h_ch4: r.f64("h_ch4")?,
        h_h2: r.f64("h_h2")?,
        t_n: r.f64("t_n")?,
        t_m: r.f64("t_m")?,
        p_n: r.f64("p_n")?,
        rho_n: r.f64("rho_n")?,
        rho_m: r.f64("rho_m")?,
        eta_m: r.f64("eta_m")?,
        k_m: r.f64("k_m")?,
        v_m: r.f64("v_m")?,
    };
    c.validate().map_err(|e| r.error(e.to_string()))?;
    if let Some(extra) = rows.next() {
        return Err(extra.error("expected exactly one row"));
    }
    Ok(c)
}

fn read_pipeline(r: &Row<'_>, nodes: &[GasNode], constants: &GasConstants) -> Result<Pipeline> {
    let geometry = match (r.opt_f64("length")?, r.opt_f64("diameter")?, r.opt_f64("roughness")?) {
        (Some(length), Some(diameter), Some(roughness)) => {
            if !(length > 0.0 && diameter > 0.0 && roughness >= 0.0) {
                return Err(r.error("length and diameter must be positive, roughness non-negative"));
            }
            Some(PipeGeometry {
                length,
                diameter,
                roughness,
            })
        }
        (None, None, None) => None,
        _ => return Err(r.error("length, diameter and roughness must be given together")),
    };
    let r_gas = match r.opt_f64("r_gas")? {
        Some(v) => v,
        None => {
            let g = geometry.ok_or_else(|| r.error("r_gas is blank and no geometry is given"))?;
            physics::pipeline_resistance(&g, constants).map_err(|e| r.error(e.to_string()))?
        }
    };
    let from_node = r.str("from_node")?.to_string();
    let to_node = r.str("to_node")?.to_string();
    let f_max = match r.opt_f64("f_max")? {
        Some(v) => v,
        None => {
            let find = |id: &str| {
                nodes
                    .iter()
                    .find(|n| n.id == id)
                    .ok_or_else(|| Error::Link(format!("pipeline references missing gas node `{id}`")))
            };
            physics::max_capacity(r_gas, find(&from_node)?, find(&to_node)?).map_err(|e| r.error(e.to_string()))?
        }
    };
    let existing = r
        .opt_bool("existing")?
        .ok_or_else(|| r.error("empty value in column `existing`"))?;
    Ok(Pipeline {
        from_node,
        to_node,
        circuit: r.str("circuit")?.to_string(),
        geometry,
        r_gas,
        f_max,
        existing,
        capex: r.opt_f64("capex")?.unwrap_or(0.0),
        annuity_rate: r.opt_f64("annuity_rate")?,
        lifetime: r.opt_f64("lifetime")?,
        x_max: r.opt_f64("x_max")?.unwrap_or(if existing { 0.0 } else { 1.0 }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(id: &str, kind: UnitKind, bus: Option<&str>, node: Option<&str>) -> Unit {
        Unit {
            id: id.into(),
            kind,
            bus: bus.map(Into::into),
            node: node.map(Into::into),
            params: UnitParams {
                p_max: Some(1.0),
                ..Default::default()
            },
        }
    }

    #[test]
    fn electrolyzer_may_attach_to_both_sides() {
        let mut sys = EnergySystem::empty(GasConstants::PLACEHOLDER);
        sys.units
            .push(unit("el", UnitKind::Electrolyzer, Some("b1"), Some("n1")));
        assert!(sys.validate_attachments().is_empty());
    }

    #[test]
    fn gas_well_on_bus_is_flagged() {
        let mut sys = EnergySystem::empty(GasConstants::PLACEHOLDER);
        sys.units.push(unit("w", UnitKind::GasWell, Some("b1"), Some("n1")));
        let issues = sys.validate_attachments();
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].problem, AttachmentProblem::UnexpectedBus);
    }

    #[test]
    fn fuel_cell_without_node_is_flagged() {
        let mut sys = EnergySystem::empty(GasConstants::PLACEHOLDER);
        sys.units.push(unit("fc", UnitKind::FuelCell, Some("b1"), None));
        let issues = sys.validate_attachments();
        assert_eq!(issues[0].problem, AttachmentProblem::MissingNode);
    }

    #[test]
    fn duplicate_ids_are_flagged() {
        let mut sys = EnergySystem::empty(GasConstants::PLACEHOLDER);
        sys.units.push(unit("r", UnitKind::Renewable, Some("b1"), None));
        sys.units.push(unit("r", UnitKind::Renewable, Some("b1"), None));
        assert_eq!(sys.validate_attachments()[0].problem, AttachmentProblem::DuplicateId);
    }

    #[test]
    fn annuity_factor_five_percent() {
        let a = annuity_factor(Some(0.05), Some(20.0));
        let oracle = 0.05 * 1.05f64.powi(20) / (1.05f64.powi(20) - 1.0);
        assert!((a - oracle).abs() < 1e-15);
        assert_eq!(annuity_factor(Some(0.05), None), 0.05);
        assert_eq!(annuity_factor(None, Some(30.0)), 1.0);
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = ScenarioConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_increments, 6);
        assert_eq!(cfg.c_h2ns, 3.0);
        assert!(cfg.integer_invest(UnitKind::ThermalGas));
        assert!(!cfg.integer_invest(UnitKind::Electrolyzer));
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(toml::from_str::<ScenarioConfig>("blend_maxx = 0.2").is_err());
    }

    #[test]
    fn config_rejects_inverted_blend_bounds() {
        let cfg: ScenarioConfig = toml::from_str("blend_min = 0.2\nblend_max = 0.1").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg: ScenarioConfig = toml::from_str("flow_formulation = \"bpp\"\nkappa = 0.95\nc_co2 = 80.0").unwrap();
        let back: ScenarioConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn ids_with_separator_rejected() {
        assert!(check_id("unit", "a__b").is_err());
        assert!(check_id("unit", "a b").is_err());
        assert!(check_id("unit", "ccgt.1_a").is_ok());
    }
}
