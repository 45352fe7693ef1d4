//! Command-line driver.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{fmt_num, load_config, RunConfig};
use crate::cryo::{ElectronicsScenario, ScenarioKind};
use crate::emit::{self, Format, Table};
use crate::error::{Error, Result};
use crate::optimizer::{
    bare_efficiency_max, compare_quantum_classical, dressed_efficiency, magnification,
    optimize_nisq, optimize_single_qubit, sweep, user_efficiency_rsa, Axis, FtOptimizer,
    HardwareModel, NisqTarget, OptimizationResult, QuantumConfig, SearchSettings,
};

/// Default worst-case fidelity for the single-gate problem.
pub const DEFAULT_GATE_TARGET: f64 = 0.99965;
/// Default success probability for circuits and fault-tolerant runs.
pub const DEFAULT_ALGORITHM_TARGET: f64 = 2.0 / 3.0;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mnr", version, about = "Minimize full-stack power of a quantum computer under a metric target")]
pub struct Cli {
    /// Configuration file; missing keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Result file; defaults to <subcommand>.<format> in the working directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Print the resolved configuration.
    #[arg(long, global = true)]
    pub show_config: bool,
    /// Override a configuration key, as section.key=value.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Jsonl,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Jsonl => Format::Jsonl,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    #[value(name = "1qb")]
    SingleQubit,
    Nisq,
    Ft,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cheapest single gate at the target worst-case fidelity.
    #[command(name = "optimize-1qb")]
    Optimize1qb,
    /// Cheapest compressible circuit at the target metric.
    OptimizeNisq,
    /// Cheapest fault-tolerant run of the configured workload.
    OptimizeFt,
    /// Repeat an optimization over a grid of configuration values.
    Sweep {
        /// Axis as section.key=start:stop:points[:log]; repeat for a Cartesian grid.
        #[arg(long = "sweep", required = true, value_name = "AXIS")]
        axes: Vec<String>,
        #[arg(long, value_enum, default_value_t = ProblemArg::Ft)]
        problem: ProblemArg,
    },
    /// Quantum against classical factoring over the configured key sizes.
    CompareRsa {
        /// Electronics scenarios to compare; defaults to the configured one.
        #[arg(long, value_delimiter = ',')]
        scenarios: Vec<String>,
    },
    /// Per-stage power of the fault-tolerant optimum.
    Breakdown,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Optimize1qb => "optimize-1qb",
            Command::OptimizeNisq => "optimize-nisq",
            Command::OptimizeFt => "optimize-ft",
            Command::Sweep { .. } => "sweep",
            Command::CompareRsa { .. } => "compare-rsa",
            Command::Breakdown => "breakdown",
        }
    }
}

/// Parses arguments and runs, returning the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    let mut errs = Vec::new();
    for o in &cli.overrides {
        match o.split_once('=') {
            Some((k, v)) => {
                if let Err(e) = cfg.set(k.trim(), v) {
                    errs.push(e);
                }
            }
            None => errs.push(format!("--set expects KEY=VALUE, got '{o}'")),
        }
    }
    errs.extend(cfg.violations());
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errs))
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let cfg = resolve_config(cli)?;
    if cli.show_config {
        write!(out, "{}", cfg.render())?;
    }
    let Some(cmd) = &cli.command else {
        if cli.show_config {
            return Ok(EXIT_OK);
        }
        return Err(Error::Config(vec!["no subcommand given; see --help".into()]));
    };
    let format: Format = cli.format.into();
    let (table, feasible) = match cmd {
        Command::Optimize1qb => single(&cfg, out)?,
        Command::OptimizeNisq => nisq(&cfg, out)?,
        Command::OptimizeFt => ft(&cfg, out, false)?,
        Command::Breakdown => ft(&cfg, out, true)?,
        Command::Sweep { axes, problem } => run_sweep(&cfg, axes, *problem, out)?,
        Command::CompareRsa { scenarios } => compare(&cfg, scenarios, out)?,
    };
    let path = cli.out.clone().unwrap_or_else(|| {
        let ext = match format {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        };
        PathBuf::from(format!("{}.{ext}", cmd.name()))
    });
    emit::write_table(&path, &table, format)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(if feasible { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn g(x: f64) -> String {
    format!("{:.4e}", x + 0.0)
}

fn report_infeasible(out: &mut dyn Write, r: &OptimizationResult) -> Result<()> {
    writeln!(out, "infeasible (target {}): {}", r.target, r.diagnostic)?;
    Ok(())
}

fn single(cfg: &RunConfig, out: &mut dyn Write) -> Result<(Table, bool)> {
    let hw = cfg.hardware()?;
    let m0 = cfg.target_or(DEFAULT_GATE_TARGET);
    let r = optimize_single_qubit(&hw, &cfg.settings, m0);
    writeln!(out, "single gate, target fidelity {m0}, 1/gamma = {} s", fmt_num(cfg.gamma_inverse_s))?;
    if r.feasible {
        writeln!(out, "  power            {} W", g(r.power_w))?;
        writeln!(out, "  T_qb             {} K", g(r.control.t_qb))?;
        writeln!(out, "  attenuation      {}", g(r.control.a_total))?;
        writeln!(out, "  dressed eff.     {} 1/W", g(dressed_efficiency(&r)))?;
        writeln!(out, "  bare eff. max    {} 1/W", g(bare_efficiency_max(&hw.tech, m0)))?;
        writeln!(out, "  A*T_ext/T_qb     {}", g(magnification(&r, hw.t_ext)))?;
    } else {
        report_infeasible(out, &r)?;
    }
    Ok((emit::results_table(&[], &[("single_qubit".into(), vec![], &r)]), r.feasible))
}

fn nisq(cfg: &RunConfig, out: &mut dyn Write) -> Result<(Table, bool)> {
    let hw = cfg.hardware()?;
    let target = match cfg.target {
        Some(m) => NisqTarget::Metric(m),
        None => NisqTarget::SuccessTwoThirds,
    };
    let q = cfg.nisq_qubits;
    let r = optimize_nisq(&hw, &cfg.settings, q, target);
    writeln!(out, "circuit on {q} qubits, target metric {:.6}", target.value())?;
    if r.feasible {
        writeln!(out, "  power            {} W", g(r.power_w))?;
        writeln!(out, "  compression m    {} of {}", r.control.m.unwrap_or(0), q - 3)?;
        writeln!(out, "  T_qb             {} K", g(r.control.t_qb))?;
        writeln!(out, "  attenuation      {}", g(r.control.a_total))?;
        writeln!(out, "  register/W       {} 1/W", g(q as f64 / r.power_w))?;
    } else {
        report_infeasible(out, &r)?;
    }
    Ok((emit::results_table(&[], &[(format!("nisq-{q}"), vec![], &r)]), r.feasible))
}

fn ft(cfg: &RunConfig, out: &mut dyn Write, breakdown: bool) -> Result<(Table, bool)> {
    let hw = cfg.hardware()?;
    let w = cfg.workload()?;
    let m0 = cfg.target_or(DEFAULT_ALGORITHM_TARGET);
    let opt = FtOptimizer::new(hw.clone(), cfg.settings)?;
    let r = opt.optimize(&w, m0);
    writeln!(
        out,
        "{}: Q_L = {}, D_L = {}, target {:.6}, scenario {}, {} cooling",
        w.label,
        w.q_logical,
        w.d_logical,
        m0,
        hw.scenario.kind.label(),
        hw.efficiency.name()
    )?;
    if !r.feasible {
        report_infeasible(out, &r)?;
        let table = if breakdown {
            emit::breakdown_table(&w.label, &r)
        } else {
            emit::results_table(&[], &[(w.label.clone(), vec![], &r)])
        };
        return Ok((table, false));
    }
    writeln!(out, "  power            {} W", g(r.power_w))?;
    writeln!(out, "  level k          {}", r.control.k)?;
    writeln!(out, "  physical qubits  {}", g(r.physical_qubits))?;
    writeln!(out, "  per qubit        {} W", g(r.per_qubit_power_w))?;
    writeln!(out, "  T_qb             {} K", g(r.control.t_qb))?;
    writeln!(out, "  T_gen            {} K", g(r.control.t_gen))?;
    writeln!(out, "  attenuation      {}", g(r.control.a_total))?;
    writeln!(out, "  p_err            {}", g(r.error_rate))?;
    if cfg.workload_kind == crate::config::WorkloadKind::Rsa {
        let cost = user_efficiency_rsa(cfg.rsa_bits, &r, &w, &hw.tech, cfg.step_convention);
        writeln!(out, "  duration         {} s", g(cost.duration_s))?;
        writeln!(out, "  energy           {} J", g(cost.energy_j))?;
        writeln!(out, "  bits per joule   {}", g(cost.efficiency_bit_per_j))?;
    }
    if breakdown {
        let t = emit::breakdown_table(&w.label, &r);
        writeln!(out, "  {:>12}  {:<12} {:>12} {:>12}", "T (K)", "source", "heat (W)", "power (W)")?;
        for row in &t.rows {
            if let [_, emit::Value::Num(temp), emit::Value::Text(src), emit::Value::Num(h), emit::Value::Num(p)] =
                row.as_slice()
            {
                writeln!(out, "  {:>12}  {:<12} {:>12} {:>12}", g(*temp), src, g(*h), g(*p))?;
            }
        }
        return Ok((t, true));
    }
    Ok((emit::results_table(&[], &[(w.label.clone(), vec![], &r)]), true))
}

/// Applies a swept value, rounding to an integer when the key needs one.
fn with_swept_value(cfg: &RunConfig, key: &str, v: f64) -> Result<RunConfig> {
    match cfg.with_value(key, &fmt_num(v)) {
        Ok(c) => Ok(c),
        Err(first) => {
            let rounded = v.round();
            if rounded != v && rounded >= 0.0 {
                cfg.with_value(key, &format!("{rounded:.0}")).map_err(|_| first)
            } else {
                Err(first)
            }
        }
    }
}

fn run_sweep(cfg: &RunConfig, specs: &[String], problem: ProblemArg, out: &mut dyn Write) -> Result<(Table, bool)> {
    let axes: Vec<Axis> = specs.iter().map(|s| Axis::parse(s)).collect::<Result<_>>()?;
    let mut cache: Option<(HardwareModel, SearchSettings, FtOptimizer)> = None;
    let mut labels = Vec::new();
    let rows = sweep(&axes, |coords| {
        let mut c = cfg.clone();
        for (k, v) in coords {
            c = with_swept_value(&c, k, *v)?;
        }
        let hw = c.hardware()?;
        let r = match problem {
            ProblemArg::SingleQubit => {
                labels.push("single_qubit".to_string());
                optimize_single_qubit(&hw, &c.settings, c.target_or(DEFAULT_GATE_TARGET))
            }
            ProblemArg::Nisq => {
                labels.push(format!("nisq-{}", c.nisq_qubits));
                let target = c.target.map_or(NisqTarget::SuccessTwoThirds, NisqTarget::Metric);
                optimize_nisq(&hw, &c.settings, c.nisq_qubits, target)
            }
            ProblemArg::Ft => {
                let w = c.workload()?;
                labels.push(w.label.clone());
                let fresh = match &cache {
                    Some((h, s, _)) => *h != hw || *s != c.settings,
                    None => true,
                };
                if fresh {
                    cache = Some((hw.clone(), c.settings, FtOptimizer::new(hw, c.settings)?));
                }
                let opt = &cache.as_ref().expect("just filled").2;
                opt.optimize(&w, c.target_or(DEFAULT_ALGORITHM_TARGET))
            }
        };
        Ok(r)
    })?;
    let keys: Vec<String> = axes.iter().map(|a| a.key.clone()).collect();
    let table_rows: Vec<(String, Vec<f64>, &OptimizationResult)> = rows
        .iter()
        .zip(&labels)
        .map(|(r, l)| (l.clone(), r.coords.iter().map(|c| c.1).collect(), &r.result))
        .collect();
    let infeasible = rows.iter().filter(|r| !r.result.feasible).count();
    writeln!(out, "sweep over {} points, {} infeasible", rows.len(), infeasible)?;
    for r in &rows {
        let coords: Vec<String> = r.coords.iter().map(|(k, v)| format!("{k}={}", fmt_num(*v))).collect();
        if r.result.feasible {
            writeln!(out, "  {}  power {} W  k {}", coords.join(" "), g(r.result.power_w), r.result.control.k)?;
        } else {
            writeln!(out, "  {}  infeasible: {}", coords.join(" "), r.result.diagnostic)?;
        }
    }
    Ok((emit::results_table(&keys, &table_rows), infeasible == 0))
}

fn compare(cfg: &RunConfig, scenarios: &[String], out: &mut dyn Write) -> Result<(Table, bool)> {
    let base = cfg.hardware()?;
    let mut configs = Vec::new();
    let names: Vec<String> = if scenarios.is_empty() {
        vec![cfg.scenario.kind.label().to_string()]
    } else {
        scenarios.to_vec()
    };
    for name in &names {
        let scenario = match name.trim().to_ascii_uppercase().as_str() {
            "A" => ElectronicsScenario::a(),
            "B" => ElectronicsScenario::b(),
            "C" => ElectronicsScenario::c(),
            "CUSTOM" if cfg.scenario.kind == ScenarioKind::Custom => cfg.scenario,
            _ => return Err(Error::Config(vec![format!("unknown scenario '{name}' for --scenarios")])),
        };
        configs.push(QuantumConfig {
            label: format!("{}-{}s", scenario.kind.label(), fmt_num(cfg.gamma_inverse_s)),
            hardware: base.clone().with_scenario(scenario),
            variant: cfg.rsa_variant,
            log_base: cfg.rsa_log_base,
            target: cfg.target_or(DEFAULT_ALGORITHM_TARGET),
            convention: cfg.step_convention,
        });
    }
    let table = compare_quantum_classical(&cfg.compare_bits, &configs, &cfg.settings)?;
    for c in &table.crossovers {
        let show = |n: Option<u32>| n.map_or("none in range".to_string(), |n| format!("n = {n}"));
        writeln!(out, "{}: faster from {}, more energy efficient from {}", c.config, show(c.time_n), show(c.energy_n))?;
    }
    let feasible = table.rows.iter().all(|r| r.feasible);
    Ok((emit::comparison_table(&table), feasible))
}
