//! Objective terms and their evaluation.

use std::path::Path;

use crate::error::Result;
use crate::table::{fmt_f64, write_csv};

/// The eighteen objective terms, in objective order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CostTerm {
    GasSupply,
    GasThermalOm,
    ThermalOperation,
    RenewableOm,
    StorageOm,
    EnergyNotSupplied,
    GasNotSupplied,
    Co2Thermal,
    Co2GasThermal,
    Co2Industry,
    GenerationInvestment,
    LineInvestment,
    HydrogenInvestment,
    HydrogenOm,
    GasInvestment,
    GasOm,
    PipelineInvestment,
    /// Extension hook; always zero.
    Other,
}

impl CostTerm {
    pub const COUNT: usize = 18;

    pub const ALL: [CostTerm; CostTerm::COUNT] = [
        CostTerm::GasSupply,
        CostTerm::GasThermalOm,
        CostTerm::ThermalOperation,
        CostTerm::RenewableOm,
        CostTerm::StorageOm,
        CostTerm::EnergyNotSupplied,
        CostTerm::GasNotSupplied,
        CostTerm::Co2Thermal,
        CostTerm::Co2GasThermal,
        CostTerm::Co2Industry,
        CostTerm::GenerationInvestment,
        CostTerm::LineInvestment,
        CostTerm::HydrogenInvestment,
        CostTerm::HydrogenOm,
        CostTerm::GasInvestment,
        CostTerm::GasOm,
        CostTerm::PipelineInvestment,
        CostTerm::Other,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Roman numeral of the term.
    pub fn numeral(self) -> &'static str {
        [
            "i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "xii", "xiii", "xiv", "xv", "xvi",
            "xvii", "xviii",
        ][self.index()]
    }

    pub fn label(self) -> &'static str {
        match self {
            CostTerm::GasSupply => "gas_supply",
            CostTerm::GasThermalOm => "gas_thermal_om",
            CostTerm::ThermalOperation => "thermal_operation",
            CostTerm::RenewableOm => "renewable_om",
            CostTerm::StorageOm => "storage_om",
            CostTerm::EnergyNotSupplied => "energy_not_supplied",
            CostTerm::GasNotSupplied => "gas_not_supplied",
            CostTerm::Co2Thermal => "co2_thermal",
            CostTerm::Co2GasThermal => "co2_gas_thermal",
            CostTerm::Co2Industry => "co2_industry",
            CostTerm::GenerationInvestment => "generation_investment",
            CostTerm::LineInvestment => "line_investment",
            CostTerm::HydrogenInvestment => "hydrogen_investment",
            CostTerm::HydrogenOm => "hydrogen_om",
            CostTerm::GasInvestment => "gas_investment",
            CostTerm::GasOm => "gas_om",
            CostTerm::PipelineInvestment => "pipeline_investment",
            CostTerm::Other => "other",
        }
    }
}

/// Value of every objective term for one solution (M€).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    values: [f64; CostTerm::COUNT],
}

impl CostBreakdown {
    pub fn from_values(values: [f64; CostTerm::COUNT]) -> Self {
        CostBreakdown { values }
    }

    pub fn get(&self, term: CostTerm) -> f64 {
        self.values[term.index()]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CostTerm, f64)> + '_ {
        CostTerm::ALL.into_iter().map(|t| (t, self.get(t)))
    }

    /// Writes `term,label,value` rows followed by a `total` row.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut rows: Vec<Vec<String>> = self
            .iter()
            .map(|(t, v)| vec![t.numeral().to_string(), t.label().to_string(), fmt_f64(v)])
            .collect();
        rows.push(vec![String::new(), "total".into(), fmt_f64(self.total())]);
        write_csv(path, &["term", "label", "value"], &rows)
    }
}
