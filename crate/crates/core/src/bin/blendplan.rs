use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use blendplan::analysis::{
    audit_fixed_investments, detect_violations, investments_of, pressure_profile, read_solution_csv,
    reconstruct_pressures, run_scenario, write_profile, write_violations, ScenarioRun, SolverSetup, ViolationKind,
};
use blendplan::backend::ModelFormat;
use blendplan::physics::{calibrate_compressibility, pipeline_table, write_pipeline_table};
use blendplan::system::{EnergySystem, FlowFormulation, ScenarioConfig};
use blendplan::temporal::{TemporalStructure, WeightTargets};
use blendplan::Error;

#[derive(Parser)]
#[command(
    name = "blendplan",
    version,
    about = "Power, natural gas and hydrogen expansion planning"
)]
struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the expansion planning problem.
    Plan {
        #[command(flatten)]
        run: RunArgs,
        /// Flow formulation of the gas network.
        #[arg(long)]
        formulation: Option<FlowFormulation>,
    },
    /// Operate the system with the investments of an earlier plan.
    Operate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        formulation: Option<FlowFormulation>,
        /// `solution.csv` of the plan to operate.
        #[arg(long)]
        plan: PathBuf,
    },
    /// Plan under one formulation, then operate the plan under another.
    Audit {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "btp")]
        plan_formulation: FlowFormulation,
        #[arg(long, default_value = "bpp")]
        audit_formulation: FlowFormulation,
        /// Price of non-supplied hydrogen in the audit (M€/MSm³).
        #[arg(long)]
        h2ns_price: Option<f64>,
    },
    /// Recompute friction, resistance and capacity of every pipeline.
    Physics {
        #[arg(long)]
        system: PathBuf,
        /// Rescale the compressibility factor so the first pipeline with a
        /// geometry has this resistance.
        #[arg(long)]
        calibrate_r: Option<f64>,
        /// Also write `physics.csv` into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Load and check the inputs without solving.
    Validate {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Directory with the system CSV tables.
    #[arg(long)]
    system: PathBuf,
    /// Directory with `gamma.csv`, `rp_weights.csv` and `k_weights.csv`;
    /// defaults to the system directory.
    #[arg(long)]
    temporal: Option<PathBuf>,
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    blend_max: Option<f64>,
    /// Minimum renewable generation share.
    #[arg(long)]
    kappa: Option<f64>,
    /// CO2 price (M€/Mt).
    #[arg(long)]
    co2_price: Option<f64>,
    /// Relative MIP gap.
    #[arg(long)]
    gap: Option<f64>,
    /// Piecewise-linear increments per pipeline.
    #[arg(long)]
    increments: Option<usize>,
    /// Moving-window length for long-term storage.
    #[arg(long)]
    mow: Option<usize>,
    /// Solver time limit (s).
    #[arg(long)]
    time_limit: Option<f64>,
    /// Solver executable.
    #[arg(long)]
    solver: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Lp)]
    format: FormatArg,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Comma-separated gas nodes for `pressure_profile.csv`.
    #[arg(long, value_delimiter = ',')]
    path: Option<Vec<String>>,
    /// Reconstruct pressures of transport-type solutions before checking
    /// operating pressure limits.
    #[arg(long)]
    reconstruct_pressures: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Lp,
    Mps,
    FixedMps,
}

impl From<FormatArg> for ModelFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Lp => ModelFormat::Lp,
            FormatArg::Mps => ModelFormat::FreeMps,
            FormatArg::FixedMps => ModelFormat::FixedMps,
        }
    }
}

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_ENVIRONMENT: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Environment(_) | Error::Protocol(_) => EXIT_ENVIRONMENT,
                _ => EXIT_INPUT,
            })
        }
    }
}

fn execute(command: Command) -> blendplan::Result<u8> {
    match command {
        Command::Plan { run, formulation } => {
            let (sys, ts, mut cfg) = load_run(&run)?;
            if let Some(f) = formulation {
                cfg.flow_formulation = f;
            }
            let out = prepare_out(&run.out_dir)?;
            let result = run_scenario(&sys, &ts, &cfg, None, &setup(&run), &out)?;
            finish_run(&run, &sys, result, &out)
        }
        Command::Operate { run, formulation, plan } => {
            let (sys, ts, mut cfg) = load_run(&run)?;
            if let Some(f) = formulation {
                cfg.flow_formulation = f;
            }
            cfg.mode = blendplan::system::RunMode::OperateFixed;
            let investments = investments_of(&read_solution_csv(&plan)?);
            let out = prepare_out(&run.out_dir)?;
            let result = run_scenario(&sys, &ts, &cfg, Some(&investments), &setup(&run), &out)?;
            finish_run(&run, &sys, result, &out)
        }
        Command::Audit {
            run,
            plan_formulation,
            audit_formulation,
            h2ns_price,
        } => {
            let (sys, ts, cfg) = load_run(&run)?;
            let out = prepare_out(&run.out_dir)?;
            let solver = setup(&run);
            let plan_cfg = ScenarioConfig {
                flow_formulation: plan_formulation,
                ..cfg.clone()
            };
            let plan_dir = prepare_out(&out.join("plan"))?;
            let plan = run_scenario(&sys, &ts, &plan_cfg, None, &solver, &plan_dir)?;
            print_summary("plan", &plan);
            if !plan.report.has_solution() {
                return Ok(EXIT_INFEASIBLE);
            }
            let mut audit_cfg = ScenarioConfig {
                flow_formulation: audit_formulation,
                ..cfg
            };
            if let Some(p) = h2ns_price {
                audit_cfg.c_h2ns = p;
            }
            audit_cfg.validate()?;
            let (regret, audit) =
                audit_fixed_investments(&plan.report, &sys, &ts, &audit_cfg, &solver, &out, run.path.as_deref())?;
            print_summary("audit", &audit);
            println!(
                "regret: cost delta {}, non-supplied hydrogen {:.6} MSm³ ({:.4}% of deployment), {} violations",
                regret
                    .cost_delta
                    .map(|d| format!("{d:.6} M€"))
                    .unwrap_or_else(|| "n/a".into()),
                regret.h2ns_total,
                100.0 * regret.h2ns_share,
                regret.violations.len()
            );
            Ok(if audit.report.has_solution() {
                0
            } else {
                EXIT_INFEASIBLE
            })
        }
        Command::Physics {
            system,
            calibrate_r,
            out_dir,
        } => {
            let mut sys = EnergySystem::read_dir(&system)?;
            if let Some(r) = calibrate_r {
                let g = sys
                    .pipelines
                    .iter()
                    .find_map(|p| p.geometry)
                    .ok_or_else(|| Error::Config("no pipeline has a geometry to calibrate against".into()))?;
                sys.constants = calibrate_compressibility(&g, &sys.constants, r)?;
            }
            let rows = pipeline_table(&sys)?;
            println!(
                "{:<10} {:<10} {:>8} {:>10} {:>6} {:>8} {:>12} {:>9} {:>12} {:>8}",
                "from", "to", "circuit", "length_km", "d_m", "eps_mm", "reynolds", "lambda", "r_gas", "f_max"
            );
            for r in &rows {
                println!(
                    "{:<10} {:<10} {:>8} {:>10.1} {:>6.3} {:>8.4} {:>12.4e} {:>9.6} {:>12.4e} {:>8.3}",
                    r.from_node,
                    r.to_node,
                    r.circuit,
                    r.geometry.length / 1000.0,
                    r.geometry.diameter,
                    r.geometry.roughness,
                    r.reynolds,
                    r.lambda,
                    r.r_gas,
                    r.f_max
                );
            }
            if let Some(dir) = out_dir {
                let dir = prepare_out(&dir)?;
                write_pipeline_table(&dir.join("physics.csv"), &rows)?;
            }
            Ok(0)
        }
        Command::Validate { input } => {
            let (sys, ts, cfg) = load_inputs(&input)?;
            let f = blendplan::formulation::Formulation::build(&sys, &ts, &cfg)?;
            println!(
                "ok: {} nodes, {} pipelines, {} buses, {} units, {} periods in {} representative periods of {} sub-periods",
                sys.nodes.len(),
                sys.pipelines.len(),
                sys.buses.len(),
                sys.units.len(),
                ts.n_periods(),
                ts.n_rp(),
                ts.n_k()
            );
            println!(
                "{} model: {} variables ({} discrete), {} constraints",
                cfg.flow_formulation,
                f.model.n_vars(),
                f.model.n_discrete(),
                f.model.n_constraints()
            );
            Ok(0)
        }
    }
}

fn load_inputs(input: &InputArgs) -> blendplan::Result<(EnergySystem, TemporalStructure, ScenarioConfig)> {
    let cfg = match &input.config {
        Some(p) => ScenarioConfig::read(p)?,
        None => ScenarioConfig::default(),
    };
    let sys = EnergySystem::read_dir(&input.system)?;
    let targets = WeightTargets {
        rp_sum: cfg.year_days,
        hour_sum: cfg.year_hours,
    };
    let ts = TemporalStructure::read_dir(input.temporal.as_deref().unwrap_or(&input.system), targets)?;
    Ok((sys, ts, cfg))
}

fn load_run(run: &RunArgs) -> blendplan::Result<(EnergySystem, TemporalStructure, ScenarioConfig)> {
    let (sys, ts, mut cfg) = load_inputs(&run.input)?;
    if let Some(v) = run.blend_max {
        cfg.blend_max = v;
    }
    if let Some(v) = run.kappa {
        cfg.kappa = Some(v);
    }
    if let Some(v) = run.co2_price {
        cfg.c_co2 = Some(v);
    }
    if let Some(v) = run.gap {
        cfg.milp_gap = v;
    }
    if let Some(v) = run.increments {
        cfg.n_increments = v;
    }
    if let Some(v) = run.mow {
        cfg.mow = Some(v);
    }
    if let Some(v) = run.time_limit {
        cfg.time_limit = Some(v);
    }
    cfg.validate()?;
    Ok((sys, ts, cfg))
}

fn setup(run: &RunArgs) -> SolverSetup {
    SolverSetup {
        executable: run.solver.clone(),
        format: run.format.into(),
    }
}

fn prepare_out(dir: &Path) -> blendplan::Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    Ok(dir.to_path_buf())
}

fn print_summary(label: &str, run: &ScenarioRun) {
    let r = &run.report;
    println!(
        "{label}: {} {} objective {} gap {}",
        r.flow,
        r.status.as_str(),
        r.objective.map(|v| format!("{v:.6}")).unwrap_or_else(|| "n/a".into()),
        r.gap.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "n/a".into()),
    );
}

fn finish_run(run: &RunArgs, sys: &EnergySystem, mut result: ScenarioRun, out: &Path) -> blendplan::Result<u8> {
    print_summary("run", &result);
    if !result.report.has_solution() {
        eprintln!("no feasible solution; see {}", out.join("infeasible.txt").display());
        return Ok(EXIT_INFEASIBLE);
    }
    if run.reconstruct_pressures && result.report.flow != FlowFormulation::Bpp {
        let rec = reconstruct_pressures(
            &mut result.report,
            &result.formulation,
            sys,
            &setup(run),
            &out.join("pressures"),
        )?;
        println!(
            "reconstructed pressures: max equation slack {:.3e}, total excess {:.3e} bar²",
            rec.max_equation_slack, rec.total_overpressure
        );
    }
    let violations = detect_violations(&result.report, Some(sys), &ViolationKind::ALL);
    write_violations(&out.join("violations.csv"), &violations)?;
    println!("{} violations", violations.len());
    if let Some(path) = &run.path {
        if !result.report.pressures.is_empty() {
            let rows = pressure_profile(&result.report, sys, path)?;
            write_profile(&out.join("pressure_profile.csv"), &rows)?;
        }
    }
    Ok(0)
}
