//! Single-attenuator problems: one gate and the compressible NISQ circuit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::refine;
use super::{
    beats, Certificate, ControlPoint, GridStep, HardwareModel, LevelSummary, OptimizationResult,
    ProblemKind, SearchSettings, TIE_TOLERANCE,
};
use crate::cryo::{attenuator_records, layout_unchecked};
use crate::noise::{occupancy, worst_case_infidelity_1qb, QubitTechnology, HBAR};
use crate::workloads::{nisq_circuit, nisq_metric, nisq_power_factor, NisqCircuit};

/// Cheapest single-attenuator setting meeting an occupancy bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleStageOptimum {
    pub t_qb: f64,
    pub a_total: f64,
    /// Cooling power of one pi pulse at this setting.
    pub pulse_power_w: f64,
    /// Final log10 step in T_qb.
    pub t_qb_step_log10: f64,
}

/// Attenuation bringing the occupancy at `t_qb` down to `n_max`, if any.
fn attenuation_for(hw: &HardwareModel, t_qb: f64, n_max: f64, a_max: f64) -> Option<f64> {
    if n_max.is_infinite() && n_max > 0.0 {
        return Some(1.0);
    }
    let n_t = occupancy(t_qb, hw.tech.omega0);
    let n_ext = occupancy(hw.t_ext, hw.tech.omega0);
    if n_max >= n_ext {
        return Some(1.0);
    }
    if !(n_max > n_t) {
        return None;
    }
    let a = ((n_ext - n_t) / (n_max - n_t)).max(1.0);
    (a <= a_max).then_some(a)
}

fn occupancy_at(hw: &HardwareModel, t_qb: f64, a: f64) -> f64 {
    let n_t = occupancy(t_qb, hw.tech.omega0);
    n_t + (occupancy(hw.t_ext, hw.tech.omega0) - n_t) / a
}

fn infidelity(hw: &HardwareModel, n: f64) -> f64 {
    worst_case_infidelity_1qb(&hw.tech, n.max(0.0)).unwrap_or(f64::NAN)
}

fn pulse_power(hw: &HardwareModel, p_pi: f64, t_qb: f64, a: f64) -> f64 {
    hw.efficiency.multiplier(t_qb, hw.t_ext) * a * p_pi
}

/// Minimizes the single-attenuator pulse cooling power over T_qb for an occupancy bound.
pub fn single_stage_optimum(
    hw: &HardwareModel,
    settings: &SearchSettings,
    n_max: f64,
) -> Option<SingleStageOptimum> {
    let p_pi = hw.pi_power().ok()?;
    let t_hi = settings.t_qb_max.min(hw.t_ext * (1.0 - 1e-12));
    let grid = super::LogGrid::per_decade(settings.t_qb_min, t_hi, settings.t_qb_per_decade);
    let eval = |t: f64| {
        attenuation_for(hw, t, n_max, settings.a_max).map(|a| (t, a, pulse_power(hw, p_pi, t, a)))
    };
    let better = |x: &(f64, f64, f64), y: &(f64, f64, f64)| beats((x.2, 0, x.1, x.0), (y.2, 0, y.1, y.0));
    let mut best: Option<(f64, f64, f64)> = None;
    for t in grid.values() {
        if let Some(c) = eval(t) {
            if best.as_ref().map_or(true, |b| better(&c, b)) {
                best = Some(c);
            }
        }
    }
    let start = best?;
    let (best, step) = refine(
        start,
        |c: &(f64, f64, f64)| [c.0.log10()],
        [grid.step_log10()],
        [settings.t_qb_min.log10()],
        [t_hi.log10()],
        settings.refinement_factor,
        settings.refinement_passes,
        |pts: &[[f64; 1]]| pts.iter().map(|p| eval(10f64.powf(p[0]))).collect(),
        better,
    );
    Some(SingleStageOptimum {
        t_qb: best.0,
        a_total: best.1,
        pulse_power_w: best.2,
        t_qb_step_log10: step[0],
    })
}

/// Occupancy bound from a worst-case gate fidelity target.
pub fn single_qubit_required_occupancy(tech: &QubitTechnology, m0: f64) -> f64 {
    (1.0 - m0) / (tech.gamma * tech.tau_1qb) - 1.0
}

/// Occupancy bound for the circuit metric; unbounded for a non-positive target.
pub fn nisq_required_occupancy(circuit: &NisqCircuit, tech: &QubitTechnology, m0: f64) -> f64 {
    if m0 <= 0.0 {
        return f64::INFINITY;
    }
    let if_max = (1.0 - m0) / circuit.weighted_gates();
    if_max / (tech.gamma * tech.tau_1qb) - 1.0
}

fn single_stage_result(
    hw: &HardwareModel,
    problem: ProblemKind,
    target: f64,
    opt: &SingleStageOptimum,
    scale: f64,
    m: Option<u32>,
    metric: f64,
) -> OptimizationResult {
    let p_pi = hw.pi_power().unwrap_or(f64::NAN);
    let chain = layout_unchecked(opt.t_qb, hw.t_ext, opt.a_total, 2, hw.t_ext);
    let n = occupancy_at(hw, opt.t_qb, opt.a_total);
    OptimizationResult {
        problem,
        feasible: true,
        target,
        control: ControlPoint {
            t_qb: opt.t_qb,
            t_gen: hw.t_ext,
            a_total: opt.a_total,
            k: 0,
            m,
        },
        power_w: opt.pulse_power_w * scale,
        metric_achieved: metric,
        per_qubit_power_w: opt.pulse_power_w,
        physical_qubits: 1.0,
        error_rate: infidelity(hw, n),
        per_stage: attenuator_records(&chain, p_pi * scale, &hw.efficiency),
        per_level: Vec::new(),
        grid_step: GridStep {
            t_qb_log10: opt.t_qb_step_log10,
            t_gen_log10: 0.0,
            // attenuation is solved in closed form on the constraint boundary
            a_log10: 0.0,
        },
        diagnostic: String::new(),
    }
}

/// Minimum cooling power of one gate at worst-case fidelity `m0`.
pub fn optimize_single_qubit(hw: &HardwareModel, settings: &SearchSettings, m0: f64) -> OptimizationResult {
    let n_max = single_qubit_required_occupancy(&hw.tech, m0);
    if n_max < 0.0 {
        let floor = 1.0 - hw.tech.gamma * hw.tech.tau_1qb;
        return OptimizationResult::infeasible(
            ProblemKind::SingleQubit,
            m0,
            format!("target fidelity {m0} exceeds the zero-occupancy bound {floor}"),
        );
    }
    match single_stage_optimum(hw, settings, n_max) {
        Some(opt) => {
            let n = occupancy_at(hw, opt.t_qb, opt.a_total);
            let metric = 1.0 - infidelity(hw, n);
            single_stage_result(hw, ProblemKind::SingleQubit, m0, &opt, 1.0, None, metric)
        }
        None => OptimizationResult::infeasible(
            ProblemKind::SingleQubit,
            m0,
            format!("occupancy {n_max:.3e} is not reachable within the temperature and attenuation bounds"),
        ),
    }
}

/// Circuit target: an explicit metric or the two-thirds success convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NisqTarget {
    Metric(f64),
    SuccessTwoThirds,
}

impl NisqTarget {
    pub fn value(&self) -> f64 {
        match self {
            NisqTarget::Metric(m) => *m,
            NisqTarget::SuccessTwoThirds => 2.0 / 3.0,
        }
    }
}

/// Minimum average cooling power of the `q`-qubit circuit over (A, T_qb, m).
pub fn optimize_nisq(
    hw: &HardwareModel,
    settings: &SearchSettings,
    q: u32,
    target: NisqTarget,
) -> OptimizationResult {
    let m0 = target.value();
    if q < 3 {
        return OptimizationResult::infeasible(
            ProblemKind::Nisq,
            m0,
            format!("circuit needs at least 3 qubits, got {q}"),
        );
    }
    let mut best: Option<(NisqCircuit, SingleStageOptimum, f64)> = None;
    let mut per_level = Vec::new();
    for m in 0..=q - 3 {
        let circuit = nisq_circuit(q, m).expect("m within range");
        let scale = nisq_power_factor(&circuit);
        let n_max = nisq_required_occupancy(&circuit, &hw.tech, m0);
        let opt = if n_max < 0.0 {
            None
        } else {
            single_stage_optimum(hw, settings, n_max)
        };
        match opt {
            Some(o) => {
                let power = o.pulse_power_w * scale;
                per_level.push(LevelSummary {
                    level: m,
                    feasible: true,
                    power_w: power,
                    t_qb: o.t_qb,
                    t_gen: hw.t_ext,
                    a_total: o.a_total,
                });
                let replace = best.as_ref().map_or(true, |(bc, bo, bp)| {
                    beats((power, m, o.a_total, o.t_qb), (*bp, bc.m, bo.a_total, bo.t_qb))
                });
                if replace {
                    best = Some((circuit, o, power));
                }
            }
            None => per_level.push(LevelSummary {
                level: m,
                feasible: false,
                power_w: f64::NAN,
                t_qb: f64::NAN,
                t_gen: f64::NAN,
                a_total: f64::NAN,
            }),
        }
    }
    let Some((circuit, opt, _)) = best else {
        let floor = nisq_metric(&nisq_circuit(q, q - 3).expect("valid"), hw.tech.gamma * hw.tech.tau_1qb);
        let mut r = OptimizationResult::infeasible(
            ProblemKind::Nisq,
            m0,
            format!("circuit metric {m0} is above the best zero-occupancy value {floor:.6}"),
        );
        r.per_level = per_level;
        return r;
    };
    let n = occupancy_at(hw, opt.t_qb, opt.a_total);
    let metric = nisq_metric(&circuit, infidelity(hw, n));
    let mut r = single_stage_result(
        hw,
        ProblemKind::Nisq,
        m0,
        &opt,
        nisq_power_factor(&circuit),
        Some(circuit.m),
        metric,
    );
    r.physical_qubits = q as f64;
    r.per_qubit_power_w = r.power_w / q as f64;
    r.per_level = per_level;
    r
}

/// Largest bare efficiency M0/P_pi over the pulse duration, valid at low occupancy.
pub fn bare_efficiency_max(tech: &QubitTechnology, m0: f64) -> f64 {
    4.0 / (PI * PI) * m0 * (1.0 - m0).powi(2) / (tech.gamma * HBAR * tech.omega0)
}

/// Metric per watt of full-stack power.
pub fn dressed_efficiency(result: &OptimizationResult) -> f64 {
    result.metric_achieved / result.power_w
}

/// Power magnification A·T_ext/T_qb at a single-attenuator optimum.
pub fn magnification(result: &OptimizationResult, t_ext: f64) -> f64 {
    result.control.a_total * t_ext / result.control.t_qb
}

/// Register size per watt.
pub fn nisq_user_efficiency(result: &OptimizationResult, q: u32) -> f64 {
    q as f64 / result.power_w
}

/// Local-optimality check for single-attenuator optima at fixed m.
pub fn certify_single_stage(hw: &HardwareModel, settings: &SearchSettings, result: &OptimizationResult) -> Certificate {
    let mut cert = Certificate {
        holds: true,
        neighbours_checked: 0,
        violations: Vec::new(),
    };
    if !result.feasible {
        return cert;
    }
    let Ok(p_pi) = hw.pi_power() else { return cert };
    let c = result.control;
    let (n_max, scale) = match (result.problem, c.m) {
        (ProblemKind::Nisq, Some(m)) => {
            let q = result.physical_qubits as u32;
            let circuit = nisq_circuit(q, m).expect("reported m is valid");
            (
                nisq_required_occupancy(&circuit, &hw.tech, result.target),
                nisq_power_factor(&circuit),
            )
        }
        _ => (single_qubit_required_occupancy(&hw.tech, result.target), 1.0),
    };
    let f_t = 10f64.powf(result.grid_step.t_qb_log10);
    let f_a = 10f64.powf(1.0 / settings.a_per_decade / settings.refinement_shrink());
    let moves = [
        ("t_qb", c.t_qb * f_t, c.a_total),
        ("t_qb", c.t_qb / f_t, c.a_total),
        ("a_total", c.t_qb, c.a_total * f_a),
        ("a_total", c.t_qb, c.a_total / f_a),
    ];
    for (name, t, a) in moves {
        let in_bounds = t >= settings.t_qb_min * (1.0 - 1e-12)
            && t <= settings.t_qb_max * (1.0 + 1e-12)
            && t < hw.t_ext
            && a >= settings.a_min
            && a <= settings.a_max;
        if !in_bounds {
            continue;
        }
        cert.neighbours_checked += 1;
        if occupancy_at(hw, t, a) > n_max {
            continue;
        }
        let p = pulse_power(hw, p_pi, t, a) * scale;
        if p < result.power_w * (1.0 - TIE_TOLERANCE) {
            cert.holds = false;
            cert.violations.push(format!(
                "{name} step to ({t:.6e}, {a:.6e}) gives {p:.9e} W < {:.9e} W",
                result.power_w
            ));
        }
    }
    cert
}
