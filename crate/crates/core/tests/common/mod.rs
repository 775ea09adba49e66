//! Fixture systems shared by the integration tests.

#![allow(dead_code)]

use blendplan::analysis::SolverSetup;
use blendplan::system::{
    Bus, Compressor, DemandClass, EnergySystem, FlowFormulation, GasConstants, GasNode, Line, PipeGeometry, Pipeline,
    ScenarioConfig, Unit, UnitKind, UnitParams,
};
use blendplan::temporal::{TemporalStructure, WeightTargets};

/// Solver discovered next to the test binary (`target/<profile>/blendplan-highs`).
pub fn solver() -> SolverSetup {
    SolverSetup::default()
}

pub fn node(id: &str, p_min: f64, p_max: f64) -> GasNode {
    GasNode {
        id: id.into(),
        p_min_sqr: p_min * p_min,
        p_max_sqr: p_max * p_max,
    }
}

pub fn pipe(from: &str, to: &str, r_gas: f64, f_max: f64) -> Pipeline {
    Pipeline {
        from_node: from.into(),
        to_node: to.into(),
        circuit: "c1".into(),
        geometry: None,
        r_gas,
        f_max,
        existing: true,
        capex: 0.0,
        annuity_rate: None,
        lifetime: None,
        x_max: 0.0,
    }
}

pub fn candidate_pipe(from: &str, to: &str, r_gas: f64, f_max: f64, capex: f64) -> Pipeline {
    Pipeline {
        existing: false,
        capex,
        x_max: 1.0,
        ..pipe(from, to, r_gas, f_max)
    }
}

pub fn unit(id: &str, kind: UnitKind, bus: Option<&str>, node: Option<&str>, params: UnitParams) -> Unit {
    Unit {
        id: id.into(),
        kind,
        bus: bus.map(Into::into),
        node: node.map(Into::into),
        params,
    }
}

pub fn class(id: &str, sector: &str, sub_max: f64) -> DemandClass {
    DemandClass {
        id: id.into(),
        sector: sector.into(),
        sub_min: 0.0,
        sub_max,
        emis: 0.0,
    }
}

pub fn bus(id: &str) -> Bus {
    Bus { id: id.into() }
}

pub fn gas_demand(sys: &mut EnergySystem, rp: usize, k: usize, node: &str, class: &str, v: f64) {
    sys.demand.gas.insert((rp, k, node.into(), class.into()), v);
}

pub fn h2_demand(sys: &mut EnergySystem, rp: usize, k: usize, node: &str, class: &str, v: f64) {
    sys.demand.h2.insert((rp, k, node.into(), class.into()), v);
}

pub fn power_demand(sys: &mut EnergySystem, rp: usize, k: usize, bus: &str, v: f64) {
    sys.demand.power.insert((rp, k, bus.into()), v);
}

pub fn existing(p_max: f64) -> UnitParams {
    UnitParams {
        p_max: Some(p_max),
        eu: Some(1.0),
        x_max: Some(0.0),
        ..Default::default()
    }
}

pub fn config(flow: FlowFormulation) -> ScenarioConfig {
    ScenarioConfig {
        flow_formulation: flow,
        c_ch4: Some(1.0),
        c_ch4ns: Some(1000.0),
        c_ens: Some(100.0),
        milp_gap: 0.0,
        ..ScenarioConfig::default()
    }
}

pub fn chronology(n: usize) -> TemporalStructure {
    TemporalStructure::full_chronology(n).unwrap()
}

/// Three-node network in which transport flows can break physical
/// consistency. Natural gas enters at `n1`, hydrogen at `n3`.
///
/// * slot 1: gas is needed at `n3` and hydrogen at `n1`, so the two carriers
///   would like to cross each other;
/// * slot 2: hydrogen is needed at `n2` while `n2`–`n3` carries no natural gas;
/// * slot 3: both carriers are needed at `n2`, one from each side.
pub fn pathology() -> (EnergySystem, TemporalStructure) {
    let mut sys = EnergySystem::empty(GasConstants::PLACEHOLDER);
    sys.nodes = vec![node("n1", 43.0, 68.0), node("n2", 43.0, 68.0), node("n3", 43.0, 68.0)];
    sys.pipelines = vec![pipe("n1", "n2", 1e-4, 1.0), pipe("n2", "n3", 1e-4, 1.0)];
    sys.buses = vec![bus("b1")];
    sys.units = vec![
        unit("well", UnitKind::GasWell, None, Some("n1"), existing(2.0)),
        unit(
            "pv",
            UnitKind::Renewable,
            Some("b1"),
            None,
            UnitParams {
                c_om: Some(0.0),
                ..existing(5.0)
            },
        ),
        unit(
            "el",
            UnitKind::Electrolyzer,
            Some("b1"),
            Some("n3"),
            UnitParams {
                hpe: Some(0.3),
                ..existing(1.0)
            },
        ),
    ];
    sys.demand.classes = vec![class("res", "residential", 0.0), class("ind", "industry", 0.0)];
    gas_demand(&mut sys, 1, 1, "n3", "res", 0.5);
    h2_demand(&mut sys, 1, 1, "n1", "ind", 0.05);
    gas_demand(&mut sys, 1, 2, "n2", "res", 0.1);
    h2_demand(&mut sys, 1, 2, "n2", "ind", 0.08);
    gas_demand(&mut sys, 1, 3, "n2", "res", 0.4);
    h2_demand(&mut sys, 1, 3, "n2", "ind", 0.06);
    sys.check().unwrap();
    (sys, chronology(3))
}

/// Corridor `A → B → C` of two identical pipelines sized for 0.435 MSm³/h
/// each at 43–68 bar. In series they carry only `0.435/√2` under steady-state
/// physics. `C` needs 0.3 of natural gas and 0.03 of hydrogen; hydrogen can
/// come from a cheap reformer candidate at `A` or a costly electrolyzer
/// candidate at `C`.
pub fn corridor() -> (EnergySystem, TemporalStructure) {
    let r = corridor_r();
    let mut sys = EnergySystem::empty(GasConstants::PLACEHOLDER);
    sys.nodes = vec![node("A", 43.0, 68.0), node("B", 43.0, 68.0), node("C", 43.0, 68.0)];
    sys.pipelines = vec![pipe("A", "B", r, 0.435), pipe("B", "C", r, 0.435)];
    sys.buses = vec![bus("bc")];
    sys.units = vec![
        unit("well", UnitKind::GasWell, None, Some("A"), existing(2.0)),
        unit(
            "smr",
            UnitKind::SmrCcs,
            None,
            Some("A"),
            UnitParams {
                p_max: Some(0.05),
                hpc: Some(0.7),
                c_inv: Some(0.05),
                x_max: Some(1.0),
                ..Default::default()
            },
        ),
        unit(
            "el",
            UnitKind::Electrolyzer,
            Some("bc"),
            Some("C"),
            UnitParams {
                p_max: Some(0.2),
                hpe: Some(0.3),
                c_inv: Some(5.0),
                x_max: Some(1.0),
                ..Default::default()
            },
        ),
        unit("pv", UnitKind::Renewable, Some("bc"), None, existing(1.0)),
    ];
    sys.demand.classes = vec![class("res", "residential", 0.0), class("ind", "industry", 0.0)];
    for k in 1..=2 {
        gas_demand(&mut sys, 1, k, "C", "res", 0.3);
        h2_demand(&mut sys, 1, k, "C", "ind", 0.03);
    }
    sys.check().unwrap();
    (sys, chronology(2))
}

/// Pipeline factor that gives 0.435 MSm³/h at 68/43 bar.
pub fn corridor_r() -> f64 {
    0.435f64.powi(2) / (68f64.powi(2) - 43f64.powi(2))
}

/// Single node with one blended demand class whose substitution limit
/// binds because hydrogen is free and natural gas is not.
pub fn blending(sub_max: f64) -> (EnergySystem, TemporalStructure) {
    let mut sys = EnergySystem::empty(GasConstants {
        h_ch4: 10.0,
        h_h2: 3.0,
        ..GasConstants::PLACEHOLDER
    });
    sys.nodes = vec![node("n1", 43.0, 68.0)];
    sys.buses = vec![bus("b1")];
    sys.units = vec![
        unit("well", UnitKind::GasWell, None, Some("n1"), existing(5.0)),
        unit("pv", UnitKind::Renewable, Some("b1"), None, existing(10.0)),
        unit(
            "el",
            UnitKind::Electrolyzer,
            Some("b1"),
            Some("n1"),
            UnitParams {
                hpe: Some(1.0),
                ..existing(10.0)
            },
        ),
    ];
    sys.demand.classes = vec![class("res", "residential", sub_max)];
    gas_demand(&mut sys, 1, 1, "n1", "res", 1.0);
    sys.check().unwrap();
    (sys, chronology(1))
}

/// One bus with a committed CCGT, a renewable park that is unavailable in the
/// first of ten periods and flat demand of 1 GW.
pub fn policy() -> (EnergySystem, TemporalStructure) {
    let mut sys = EnergySystem::empty(GasConstants::PLACEHOLDER);
    sys.nodes = vec![node("n1", 43.0, 68.0)];
    sys.buses = vec![bus("b1")];
    sys.units = vec![
        unit("well", UnitKind::GasWell, None, Some("n1"), existing(5.0)),
        unit(
            "ccgt",
            UnitKind::ThermalGas,
            Some("b1"),
            Some("n1"),
            UnitParams {
                p_min: Some(0.08),
                cs_v: Some(2.092),
                cs_su: Some(1.162),
                cs_up: Some(0.349),
                emis: Some(0.181),
                ..existing(0.4)
            },
        ),
        unit("pv", UnitKind::Renewable, Some("b1"), None, existing(2.0)),
    ];
    for k in 1..=10 {
        power_demand(&mut sys, 1, k, "b1", 1.0);
    }
    sys.availability.insert((1, 1, "pv".into()), 0.0);
    sys.check().unwrap();
    (sys, chronology(10))
}

/// One bus and one node with a hydrogen cavern that can move cheap
/// electrolysis hydrogen from sunny periods to dark ones.
pub fn storage_system(n: usize) -> EnergySystem {
    let mut sys = EnergySystem::empty(GasConstants::PLACEHOLDER);
    sys.nodes = vec![node("n1", 43.0, 68.0)];
    sys.buses = vec![bus("b1")];
    sys.units = vec![
        unit("pv", UnitKind::Renewable, Some("b1"), None, existing(2.0)),
        unit(
            "el",
            UnitKind::Electrolyzer,
            Some("b1"),
            Some("n1"),
            UnitParams {
                hpe: Some(0.2),
                ..existing(0.8)
            },
        ),
        unit(
            "cavern",
            UnitKind::H2Cavern,
            None,
            Some("n1"),
            UnitParams {
                p_max: Some(0.2),
                cs_max: Some(0.2),
                eta_ch: Some(0.9),
                eta_dis: Some(0.95),
                etp: Some(2.0),
                in_res: Some(0.5),
                ..existing(0.2)
            },
        ),
    ];
    sys.demand.classes = vec![class("ind", "industry", 0.0)];
    for p in 1..=n {
        let sunny = p % 3 != 0;
        sys.availability
            .insert((p, 1, "pv".into()), if sunny { 1.0 } else { 0.0 });
        h2_demand(&mut sys, p, 1, "n1", "ind", 0.15);
    }
    sys
}

/// The same system keyed by chronological sub-period of a single
/// representative period.
pub fn storage_chronology(n: usize) -> EnergySystem {
    let mut sys = storage_system(n);
    sys.availability = sys
        .availability
        .into_iter()
        .map(|((p, _, u), v)| ((1, p, u), v))
        .collect();
    sys.demand.h2 = sys
        .demand
        .h2
        .into_iter()
        .map(|((p, _, n, c), v)| ((1, p, n, c), v))
        .collect();
    sys
}

/// Every period is its own representative period of one sub-period.
pub fn identity_mapping(n: usize) -> TemporalStructure {
    let mapping: Vec<_> = (1..=n).map(|p| (p, p, 1)).collect();
    let w_rp: Vec<_> = (1..=n).map(|rp| (rp, 1.0)).collect();
    TemporalStructure::representative(
        &mapping,
        &w_rp,
        &[(1, 1.0)],
        WeightTargets {
            rp_sum: n as f64,
            hour_sum: n as f64,
        },
    )
    .unwrap()
}

/// Pipeline lengths (km) on the 12-node skeleton.
pub const SKELETON_PIPES: [(&str, &str, f64); 10] = [
    ("1", "2", 70.0),
    ("3", "5", 70.0),
    ("4", "5", 60.0),
    ("5", "6", 45.0),
    ("4", "7", 70.0),
    ("6", "8", 80.0),
    ("7", "8", 80.0),
    ("9", "10", 125.0),
    ("10", "11", 90.0),
    ("11", "12", 85.0),
];

/// Reference resistances (10⁻⁵ (MSm³/h)²/bar²) and capacities (MSm³/h) of
/// the skeleton pipelines, in [`SKELETON_PIPES`] order.
pub const SKELETON_TABLE: [(f64, f64); 10] = [
    (6.808, 0.435),
    (6.808, 0.435),
    (7.942, 0.469),
    (10.590, 0.542),
    (6.808, 0.435),
    (5.957, 0.407),
    (5.957, 0.407),
    (3.812, 0.325),
    (5.295, 0.383),
    (5.606, 0.394),
];

/// Twelve gas nodes joined by ten pipelines and two compressors, with wells
/// at nodes 1, 3 and 9, gas demand at six nodes, one candidate pipeline and
/// two representative periods of three sub-periods. Resistances and
/// capacities follow from the geometry with constants calibrated on the
/// first pipeline.
pub fn skeleton() -> (EnergySystem, TemporalStructure) {
    let base = GasConstants::PLACEHOLDER;
    let g12 = PipeGeometry {
        length: 70_000.0,
        diameter: 0.6,
        roughness: 0.012,
    };
    let constants = blendplan::physics::calibrate_compressibility(&g12, &base, 6.808e-5).unwrap();
    let mut sys = EnergySystem::empty(constants);
    sys.nodes = (1..=12).map(|i| node(&i.to_string(), 43.0, 68.0)).collect();
    for (from, to, km) in SKELETON_PIPES {
        let g = PipeGeometry {
            length: km * 1000.0,
            ..g12
        };
        let r = blendplan::physics::pipeline_resistance(&g, &constants).unwrap();
        let f = blendplan::physics::max_capacity(r, sys.node(from).unwrap(), sys.node(to).unwrap()).unwrap();
        sys.pipelines.push(Pipeline {
            geometry: Some(g),
            ..pipe(from, to, r, f)
        });
    }
    let mut cand = candidate_pipe("2", "3", 6.808e-5, 0.435, 120.0);
    cand.annuity_rate = Some(0.05);
    cand.lifetime = Some(40.0);
    sys.pipelines.push(cand);
    for (from, to, ratio, cons) in [("2", "4", 1.2, 0.0015), ("9", "8", 1.3, 0.002)] {
        sys.compressors.push(Compressor {
            from_node: from.into(),
            to_node: to.into(),
            circuit: "c1".into(),
            ratio_sqr: ratio,
            max_boost: 30.0,
            cons_ch4: cons,
            cons_h2: cons,
            f_max: 1.0,
        });
    }
    for (id, n) in [("w1", "1"), ("w3", "3"), ("w9", "9")] {
        sys.units
            .push(unit(id, UnitKind::GasWell, None, Some(n), existing(0.6)));
    }
    sys.demand.classes = vec![class("res", "residential", 0.1)];
    let ts = TemporalStructure::representative(
        &(1..=6)
            .map(|p| (p, (p - 1) / 3 + 1, (p - 1) % 3 + 1))
            .collect::<Vec<_>>(),
        &[(1, 1.0), (2, 1.0)],
        &[(1, 1.0), (2, 1.0), (3, 1.0)],
        WeightTargets {
            rp_sum: 2.0,
            hour_sum: 6.0,
        },
    )
    .unwrap();
    for (rp, k) in ts.slots().collect::<Vec<_>>() {
        for (i, n) in ["5", "6", "7", "8", "11", "12"].iter().enumerate() {
            gas_demand(&mut sys, rp, k, n, "res", 0.05 + 0.01 * (i + k) as f64);
        }
    }
    sys.check().unwrap();
    (sys, ts)
}

/// Two-bus expansion toy: a cheap-to-run candidate at `b1`, an expensive one
/// at `b2` and a candidate line between them over two periods.
pub fn expansion_toy() -> (EnergySystem, TemporalStructure) {
    let mut sys = EnergySystem::empty(GasConstants::PLACEHOLDER);
    sys.buses = vec![bus("b1"), bus("b2")];
    sys.lines = vec![Line {
        from_bus: "b1".into(),
        to_bus: "b2".into(),
        circuit: "c1".into(),
        susceptance: 10.0,
        capacity: TOY.line_cap,
        existing: false,
        invest_cost: TOY.line_inv,
        x_max: 1.0,
    }];
    for (id, b, c_var, c_inv, x_max) in [
        ("g1", "b1", TOY.c1, TOY.inv1, TOY.x1_max),
        ("g2", "b2", TOY.c2, TOY.inv2, TOY.x2_max),
    ] {
        sys.units.push(unit(
            id,
            UnitKind::ThermalOther,
            Some(b),
            None,
            UnitParams {
                p_max: Some(TOY.unit_size),
                c_var: Some(c_var),
                c_inv: Some(c_inv),
                x_max: Some(x_max as f64),
                ..Default::default()
            },
        ));
    }
    for (t, (d1, d2)) in TOY.demand.iter().enumerate() {
        power_demand(&mut sys, 1, t + 1, "b1", *d1);
        power_demand(&mut sys, 1, t + 1, "b2", *d2);
    }
    sys.check().unwrap();
    (sys, chronology(2))
}

pub struct Toy {
    pub unit_size: f64,
    pub c1: f64,
    pub c2: f64,
    pub inv1: f64,
    pub inv2: f64,
    pub x1_max: u32,
    pub x2_max: u32,
    pub line_cap: f64,
    pub line_inv: f64,
    pub ens: f64,
    pub demand: [(f64, f64); 2],
}

pub const TOY: Toy = Toy {
    unit_size: 1.0,
    c1: 10.0,
    c2: 30.0,
    inv1: 25.0,
    inv2: 8.0,
    x1_max: 3,
    x2_max: 2,
    line_cap: 1.0,
    line_inv: 12.0,
    ens: 100.0,
    demand: [(1.5, 1.2), (0.5, 2.0)],
};
