//! Derived analyses: transition sizes, RSA cost, quantum-classical comparison
//! and parameter sweeps.

use serde::{Deserialize, Serialize};

use super::{FtOptimizer, HardwareModel, OptimizationResult, SearchSettings};
use crate::error::{Error, Result};
use crate::noise::QubitTechnology;
use crate::workloads::{classical_energy_time, rsa_workload, LogBase, RsaVariant, Workload};

/// Logical size N_L at which level `k` runs out of margin even at zero occupancy.
pub fn transition_size_estimate(tech: &QubitTechnology, m0: f64, k: u32, p_thr: f64) -> f64 {
    let base = 4.0 * p_thr / (tech.gamma * tech.tau_step);
    (1.0 / m0).ln() / p_thr * base.powf(2f64.powi(k as i32))
}

/// Physical time-steps spent per logical time-step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepConvention {
    /// Three steps at every concatenation level, 3^k in total.
    #[default]
    ThreePerLevel,
    /// Three physical steps regardless of level.
    ThreeSteps,
}

impl StepConvention {
    pub fn steps_per_logical(&self, k: u32) -> f64 {
        match self {
            StepConvention::ThreePerLevel => 3f64.powi(k as i32),
            StepConvention::ThreeSteps => 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsaCost {
    pub n_bits: u32,
    pub k: u32,
    pub power_w: f64,
    pub duration_s: f64,
    pub energy_j: f64,
    /// Key bits per joule.
    pub efficiency_bit_per_j: f64,
}

/// Wall time, energy and bits per joule of an RSA run at an optimum.
pub fn user_efficiency_rsa(
    n: u32,
    result: &OptimizationResult,
    workload: &Workload,
    tech: &QubitTechnology,
    convention: StepConvention,
) -> RsaCost {
    let k = result.control.k;
    let duration = convention.steps_per_logical(k) * workload.d_logical as f64 * tech.tau_step;
    let energy = result.power_w * duration;
    RsaCost {
        n_bits: n,
        k,
        power_w: result.power_w,
        duration_s: duration,
        energy_j: energy,
        efficiency_bit_per_j: n as f64 / energy,
    }
}

/// One quantum machine entered into the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumConfig {
    pub label: String,
    pub hardware: HardwareModel,
    pub variant: RsaVariant,
    pub log_base: LogBase,
    pub target: f64,
    pub convention: StepConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub config: String,
    pub n_bits: u32,
    pub feasible: bool,
    pub k: u32,
    pub power_w: f64,
    pub t_classical_s: f64,
    pub t_quantum_s: f64,
    pub e_classical_j: f64,
    pub e_quantum_j: f64,
    pub h_classical_bit_per_j: f64,
    pub h_quantum_bit_per_j: f64,
    pub quantum_faster: bool,
    pub quantum_more_efficient: bool,
}

/// Smallest key sizes at which the quantum machine wins on time and on energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossovers {
    pub config: String,
    pub time_n: Option<u32>,
    pub energy_n: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub crossovers: Vec<Crossovers>,
}

/// Quantum and classical factoring cost for every key size and configuration.
pub fn compare_quantum_classical(
    n_bits: &[u32],
    configs: &[QuantumConfig],
    settings: &SearchSettings,
) -> Result<ComparisonTable> {
    if n_bits.is_empty() {
        return Err(Error::EmptyAxis("n_bits".into()));
    }
    let mut rows = Vec::new();
    let mut crossovers = Vec::new();
    for cfg in configs {
        let opt = FtOptimizer::new(cfg.hardware.clone(), *settings)?;
        let mut cross = Crossovers {
            config: cfg.label.clone(),
            time_n: None,
            energy_n: None,
        };
        for &n in n_bits {
            let w = rsa_workload(n, cfg.variant, cfg.log_base)?;
            let r = opt.optimize(&w, cfg.target);
            let (e_c, t_c) = classical_energy_time(n);
            let (k, power, t_q, e_q) = if r.feasible {
                let cost = user_efficiency_rsa(n, &r, &w, &cfg.hardware.tech, cfg.convention);
                (cost.k, cost.power_w, cost.duration_s, cost.energy_j)
            } else {
                (0, f64::NAN, f64::NAN, f64::NAN)
            };
            let faster = r.feasible && t_q < t_c;
            let efficient = r.feasible && e_q < e_c;
            if faster && cross.time_n.is_none() {
                cross.time_n = Some(n);
            }
            if efficient && cross.energy_n.is_none() {
                cross.energy_n = Some(n);
            }
            rows.push(ComparisonRow {
                config: cfg.label.clone(),
                n_bits: n,
                feasible: r.feasible,
                k,
                power_w: power,
                t_classical_s: t_c,
                t_quantum_s: t_q,
                e_classical_j: e_c,
                e_quantum_j: e_q,
                h_classical_bit_per_j: n as f64 / e_c,
                h_quantum_bit_per_j: n as f64 / e_q,
                quantum_faster: faster,
                quantum_more_efficient: efficient,
            });
        }
        crossovers.push(cross);
    }
    Ok(ComparisonTable { rows, crossovers })
}

/// Values taken by one swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub key: String,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn linear(key: impl Into<String>, start: f64, stop: f64, points: usize) -> Self {
        let values = match points {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..points)
                .map(|i| {
                    if i == points - 1 {
                        stop
                    } else {
                        start + (stop - start) * i as f64 / (points - 1) as f64
                    }
                })
                .collect(),
        };
        Axis {
            key: key.into(),
            values,
        }
    }

    pub fn log(key: impl Into<String>, start: f64, stop: f64, points: usize) -> Result<Self> {
        if !(start > 0.0 && stop > 0.0) {
            return Err(Error::Domain("log axis bounds must be positive".into()));
        }
        let lin = Axis::linear(key, start.log10(), stop.log10(), points);
        let mut values: Vec<f64> = lin.values.iter().map(|v| 10f64.powf(*v)).collect();
        if let Some(first) = values.first_mut() {
            *first = start;
        }
        if points > 1 {
            if let Some(last) = values.last_mut() {
                *last = stop;
            }
        }
        Ok(Axis {
            key: lin.key,
            values,
        })
    }

    /// Parses `key=start:stop:points[:log|lin]`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Config(vec![format!("bad sweep axis '{text}', expected key=start:stop:points[:log|lin]")]);
        let (key, rest) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(':').collect();
        if !(3..=4).contains(&parts.len()) || key.trim().is_empty() {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let key = key.trim();
        match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => Ok(Axis::linear(key, start, stop, points)),
            Some("log") => Axis::log(key, start, stop, points),
            Some(_) => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub coords: Vec<(String, f64)>,
    pub result: OptimizationResult,
}

/// Evaluates `eval` on the Cartesian product of `axes`, first axis slowest.
pub fn sweep<F>(axes: &[Axis], mut eval: F) -> Result<Vec<SweepRow>>
where
    F: FnMut(&[(String, f64)]) -> Result<OptimizationResult>,
{
    if axes.is_empty() {
        return Err(Error::EmptyAxis("no sweep axes given".into()));
    }
    if let Some(a) = axes.iter().find(|a| a.values.is_empty()) {
        return Err(Error::EmptyAxis(a.key.clone()));
    }
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let mut rows = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut coords = vec![(String::new(), 0.0); axes.len()];
        for (d, a) in axes.iter().enumerate().rev() {
            let n = a.values.len();
            coords[d] = (a.key.clone(), a.values[rem % n]);
            rem /= n;
        }
        let result = eval(&coords)?;
        rows.push(SweepRow { coords, result });
    }
    Ok(rows)
}

/// Change of concatenation level between two neighbouring sweep points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub from_k: u32,
    pub to_k: u32,
    pub below: f64,
    pub above: f64,
}

/// Level changes along a 1-D sweep given as (coordinate, result) pairs in order.
pub fn find_transitions(points: &[(f64, &OptimizationResult)]) -> Vec<Transition> {
    let feasible: Vec<(f64, u32)> = points
        .iter()
        .filter(|(_, r)| r.feasible)
        .map(|(x, r)| (*x, r.control.k))
        .collect();
    feasible
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| Transition {
            from_k: w[0].1,
            to_k: w[1].1,
            below: w[0].0,
            above: w[1].0,
        })
        .collect()
}
