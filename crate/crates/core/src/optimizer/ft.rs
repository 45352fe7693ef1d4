//! Fault-tolerant power minimization over (T_qb, T_gen, A, k).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::refine;
use super::{
    beats, Certificate, ControlPoint, GridStep, HardwareModel, LevelSummary, OptimizationResult, ProblemKind,
    SearchSettings, TIE_TOLERANCE,
};
use crate::code::{ft_metric, ft_power, dynamic_weight, max_physical_error, physical_qubits};
use crate::cryo::{
    attenuator_records, conducted_heat, demodulation_power_per_qubit, layout_unchecked,
    static_records_from_spans, syndrome_power_per_qubit, HeatSource, StageRecord,
};
use crate::error::{Error, Result};
use crate::noise::{occupancy, occupancy_for_pauli_error, pauli_error_raw};
use crate::workloads::Workload;

/// Quantities at one (T_qb, T_gen) pair that do not depend on attenuation or level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtSite {
    pub t_qb: f64,
    pub t_gen: f64,
    temps: Vec<f64>,
    occ0: f64,
    occ_steps: Vec<f64>,
    multipliers: Vec<f64>,
    spans: Vec<f64>,
    /// Static electrical power per physical qubit, excluding readout computation.
    pub static_power: f64,
}

impl FtSite {
    pub fn new(hw: &HardwareModel, t_qb: f64, t_gen: f64) -> Option<Self> {
        if !(t_qb > 0.0 && t_qb < t_gen && t_gen <= hw.t_ext) {
            return None;
        }
        let chain = layout_unchecked(t_qb, t_gen, 1.0, hw.stages, hw.t_ext);
        let temps = chain.temperatures().to_vec();
        let occ: Vec<f64> = temps.iter().map(|&t| occupancy(t, hw.tech.omega0)).collect();
        let occ_steps = occ.windows(2).map(|w| w[1] - w[0]).collect();
        let multipliers = temps
            .iter()
            .map(|&t| hw.efficiency.multiplier(t, hw.t_ext))
            .collect();
        let spans: Vec<f64> = temps
            .windows(2)
            .map(|w| conducted_heat(w[0], w[1], &hw.cable) * hw.cable.lines_per_qubit())
            .collect();
        let static_power = static_records_from_spans(&temps, &spans, hw.t_ext, &hw.scenario, &hw.efficiency)
            .iter()
            .map(|r| r.electrical_power_w)
            .sum();
        Some(FtSite {
            t_qb,
            t_gen,
            temps,
            occ0: occ[0],
            occ_steps,
            multipliers,
            spans,
            static_power,
        })
    }

    fn gaps(&self) -> f64 {
        (self.temps.len() - 1) as f64
    }

    /// Thermal occupancy at the qubit for total attenuation `a_total`.
    pub fn occupancy(&self, a_total: f64) -> f64 {
        let x = a_total.powf(-1.0 / self.gaps());
        let tail = self.occ_steps.iter().rev().fold(0.0, |acc, d| (acc + d) * x);
        (self.occ0 + tail).max(0.0)
    }

    /// Cooling power per watt of drive at the qubit.
    pub fn drive_factor(&self, a_total: f64) -> f64 {
        let per = a_total.powf(1.0 / self.gaps());
        let last = self.temps.len() - 1;
        let mut prev = 0.0;
        let mut sum = 0.0;
        for i in 1..=last {
            let cum = if i == last { a_total } else { per.powi(i as i32) };
            sum += self.multipliers[i - 1] * (cum - prev);
            prev = cum;
        }
        sum
    }

    /// Smallest attenuation in `[a_min, a_max]` bringing the occupancy down to `n_max`.
    pub fn min_attenuation(&self, n_max: f64, a_min: f64, a_max: f64) -> Option<f64> {
        if n_max.is_infinite() && n_max > 0.0 {
            return Some(a_min);
        }
        if !(n_max >= 0.0) {
            return None;
        }
        if self.occupancy(a_min) <= n_max {
            return Some(a_min);
        }
        if self.occupancy(a_max) > n_max {
            return None;
        }
        let (mut lo, mut hi) = (a_min.ln(), a_max.ln());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.occupancy(mid.exp()) <= n_max {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi.exp())
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    k: u32,
    t_qb: f64,
    t_gen: f64,
    a_total: f64,
    power: f64,
}

impl Candidate {
    fn key(&self) -> (f64, u32, f64, f64) {
        (self.power, self.k, self.a_total, self.t_qb)
    }
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    beats(a.key(), b.key())
}

/// Fault-tolerant optimizer with the coarse grid precomputed for one machine.
#[derive(Debug, Clone)]
pub struct FtOptimizer {
    hw: HardwareModel,
    settings: SearchSettings,
    p_pi: f64,
    coarse: Vec<FtSite>,
}

impl FtOptimizer {
    pub fn new(hw: HardwareModel, settings: SearchSettings) -> Result<Self> {
        settings.validate().map_err(Error::Config)?;
        hw.code.validate()?;
        hw.cable.validate()?;
        if hw.stages < 2 {
            return Err(Error::Domain("need at least 2 stages".into()));
        }
        let p_pi = hw.pi_power()?;
        let t_qbs = settings.t_qb_grid().values();
        let t_gens = settings.t_gen_grid().values();
        let pairs: Vec<(f64, f64)> = t_qbs
            .iter()
            .flat_map(|&a| t_gens.iter().map(move |&b| (a, b)))
            .collect();
        let coarse = pairs
            .par_iter()
            .filter_map(|&(a, b)| FtSite::new(&hw, a, b))
            .collect();
        Ok(FtOptimizer {
            hw,
            settings,
            p_pi,
            coarse,
        })
    }

    pub fn hardware(&self) -> &HardwareModel {
        &self.hw
    }

    pub fn settings(&self) -> &SearchSettings {
        &self.settings
    }

    fn static_power(&self, site: &FtSite, k: u32) -> f64 {
        if self.hw.include_readout_compute {
            site.static_power
                + demodulation_power_per_qubit(k, &self.hw.tech)
                + syndrome_power_per_qubit(&self.hw.tech)
        } else {
            site.static_power
        }
    }

    /// Full-stack power at a control point, ignoring the metric constraint.
    pub fn power_at(&self, site: &FtSite, q_logical: f64, k: u32, a_total: f64) -> f64 {
        let p2 = self.p_pi * site.drive_factor(a_total);
        let p1 = self.hw.tech.tau_1qb / self.hw.tech.tau_step * p2;
        ft_power(q_logical, k, p2, p1, 0.0, self.static_power(site, k), &self.hw.code)
    }

    /// Metric at a control point.
    pub fn metric_at(&self, site: &FtSite, n_logical: f64, k: u32, a_total: f64) -> f64 {
        let p = pauli_error_raw(&self.hw.tech, site.occupancy(a_total)).clamp(0.0, 1.0);
        ft_metric(p, k, n_logical, self.hw.metric_form, self.hw.code.p_thr)
    }

    /// Largest qubit occupancy meeting `m0` at level `k`; negative when impossible.
    pub fn required_occupancy(&self, n_logical: f64, m0: f64, k: u32) -> f64 {
        let p_max = max_physical_error(n_logical, m0, k, self.hw.metric_form, self.hw.code.p_thr);
        if p_max.is_infinite() || p_max >= 1.0 {
            return f64::INFINITY;
        }
        if p_max < 0.0 {
            return -1.0;
        }
        occupancy_for_pauli_error(&self.hw.tech, p_max)
    }

    fn candidate(&self, site: &FtSite, q_l: f64, k: u32, n_req: f64) -> Option<Candidate> {
        let a = site.min_attenuation(n_req, self.settings.a_min, self.settings.a_max)?;
        Some(Candidate {
            k,
            t_qb: site.t_qb,
            t_gen: site.t_gen,
            a_total: a,
            power: self.power_at(site, q_l, k, a),
        })
    }

    fn site(&self, t_qb: f64, t_gen: f64) -> Option<FtSite> {
        FtSite::new(&self.hw, t_qb, t_gen)
    }

    pub fn optimize(&self, workload: &Workload, m0: f64) -> OptimizationResult {
        let q_l = workload.q_logical as f64;
        let n_l = workload.n_logical();
        let s = &self.settings;
        let levels: Vec<u32> = (s.k_min..=s.k_max).collect();
        let n_req: Vec<f64> = levels.iter().map(|&k| self.required_occupancy(n_l, m0, k)).collect();

        let per_site: Vec<Vec<Option<Candidate>>> = self
            .coarse
            .par_iter()
            .map(|site| {
                levels
                    .iter()
                    .zip(&n_req)
                    .map(|(&k, &n)| self.candidate(site, q_l, k, n))
                    .collect()
            })
            .collect();

        let coarse_step = [s.t_qb_grid().step_log10(), s.t_gen_grid().step_log10()];
        let lo = [s.t_qb_min.log10(), s.t_gen_min.log10()];
        let hi = [s.t_qb_max.log10(), s.t_gen_max.log10()];
        let mut final_step = [coarse_step[0] / s.refinement_shrink(), coarse_step[1] / s.refinement_shrink()];

        let mut best_per_level: Vec<Option<Candidate>> = Vec::with_capacity(levels.len());
        for (li, (&k, &n)) in levels.iter().zip(&n_req).enumerate() {
            let mut inc: Option<Candidate> = None;
            for row in &per_site {
                if let Some(c) = row[li] {
                    if inc.map_or(true, |b| better(&c, &b)) {
                        inc = Some(c);
                    }
                }
            }
            let refined = inc.map(|start| {
                let (best, step) = refine(
                    start,
                    |c: &Candidate| [c.t_qb.log10(), c.t_gen.log10()],
                    coarse_step,
                    lo,
                    hi,
                    s.refinement_factor,
                    s.refinement_passes,
                    |pts: &[[f64; 2]]| {
                        pts.par_iter()
                            .map(|p| {
                                let site = self.site(10f64.powf(p[0]), 10f64.powf(p[1]))?;
                                self.candidate(&site, q_l, k, n)
                            })
                            .collect()
                    },
                    better,
                );
                final_step = step;
                best
            });
            best_per_level.push(refined);
        }

        let per_level: Vec<LevelSummary> = levels
            .iter()
            .zip(&best_per_level)
            .map(|(&k, c)| match c {
                Some(c) => LevelSummary {
                    level: k,
                    feasible: true,
                    power_w: c.power,
                    t_qb: c.t_qb,
                    t_gen: c.t_gen,
                    a_total: c.a_total,
                },
                None => LevelSummary {
                    level: k,
                    feasible: false,
                    power_w: f64::NAN,
                    t_qb: f64::NAN,
                    t_gen: f64::NAN,
                    a_total: f64::NAN,
                },
            })
            .collect();

        let mut best: Option<Candidate> = None;
        for c in best_per_level.iter().flatten() {
            if best.map_or(true, |b| better(c, &b)) {
                best = Some(*c);
            }
        }

        let Some(best) = best else {
            let mut r = OptimizationResult::infeasible(
                ProblemKind::FaultTolerant,
                m0,
                self.infeasibility_reason(n_l, m0),
            );
            r.per_level = per_level;
            return r;
        };

        let site = self.site(best.t_qb, best.t_gen).expect("optimum lies on a valid site");
        let qubits = physical_qubits(q_l, best.k);
        let p_err = pauli_error_raw(&self.hw.tech, site.occupancy(best.a_total)).clamp(0.0, 1.0);
        OptimizationResult {
            problem: ProblemKind::FaultTolerant,
            feasible: true,
            target: m0,
            control: ControlPoint {
                t_qb: best.t_qb,
                t_gen: best.t_gen,
                a_total: best.a_total,
                k: best.k,
                m: None,
            },
            power_w: best.power,
            metric_achieved: self.metric_at(&site, n_l, best.k, best.a_total),
            per_qubit_power_w: best.power / qubits,
            physical_qubits: qubits,
            error_rate: p_err,
            per_stage: self.breakdown(&site, q_l, best.k, best.a_total),
            per_level,
            grid_step: GridStep {
                t_qb_log10: final_step[0],
                t_gen_log10: final_step[1],
                a_log10: s.final_a_step_log10(),
            },
            diagnostic: String::new(),
        }
    }

    fn infeasibility_reason(&self, n_l: f64, m0: f64) -> String {
        let floor = pauli_error_raw(&self.hw.tech, 0.0);
        let p_thr = self.hw.code.p_thr;
        if m0 > 1.0 {
            return format!("target metric {m0} exceeds 1");
        }
        if floor >= p_thr {
            return format!(
                "error floor gamma*tau_step/4 = {floor:.3e} is not below the threshold {p_thr:.3e}"
            );
        }
        let k = self.settings.k_max;
        let need = max_physical_error(n_l, m0, k, self.hw.metric_form, p_thr);
        format!(
            "metric {m0} needs p_err <= {need:.3e} at k = {k}; no point within the temperature and attenuation bounds reaches it (floor {floor:.3e})"
        )
    }

    /// Per-stage heat and electrical power for the whole machine.
    pub fn breakdown(&self, site: &FtSite, q_logical: f64, k: u32, a_total: f64) -> Vec<StageRecord> {
        let hw = &self.hw;
        let chain = layout_unchecked(site.t_qb, site.t_gen, a_total, hw.stages, hw.t_ext);
        let ratio = hw.tech.tau_1qb / hw.tech.tau_step;
        let drive = q_logical * dynamic_weight(k) * (16.0 + 7.0 * ratio) * hw.code.t_gate_multiplier * self.p_pi;
        let qubits = physical_qubits(q_logical, k);
        let mut out = attenuator_records(&chain, drive, &hw.efficiency);
        out.extend(
            static_records_from_spans(&site.temps, &site.spans, hw.t_ext, &hw.scenario, &hw.efficiency)
                .iter()
                .map(|r| r.scaled(qubits)),
        );
        if hw.include_readout_compute {
            let per = demodulation_power_per_qubit(k, &hw.tech) + syndrome_power_per_qubit(&hw.tech);
            out.push(StageRecord {
                stage_temperature_k: hw.t_ext,
                heat_extracted_w: per * qubits,
                electrical_power_w: per * qubits,
                source: HeatSource::Electronics,
            });
        }
        out
    }

    /// Checks that no single-control step away from the optimum is feasible and cheaper.
    pub fn certify(&self, workload: &Workload, result: &OptimizationResult) -> Certificate {
        let mut cert = Certificate {
            holds: true,
            neighbours_checked: 0,
            violations: Vec::new(),
        };
        if !result.feasible {
            return cert;
        }
        let s = &self.settings;
        let c = result.control;
        let q_l = workload.q_logical as f64;
        let n_l = workload.n_logical();
        let st = result.grid_step;
        let f_q = 10f64.powf(st.t_qb_log10);
        let f_g = 10f64.powf(st.t_gen_log10);
        let f_a = 10f64.powf(st.a_log10);
        let moves = [
            ("t_qb", c.t_qb * f_q, c.t_gen, c.a_total),
            ("t_qb", c.t_qb / f_q, c.t_gen, c.a_total),
            ("t_gen", c.t_qb, c.t_gen * f_g, c.a_total),
            ("t_gen", c.t_qb, c.t_gen / f_g, c.a_total),
            ("a_total", c.t_qb, c.t_gen, c.a_total * f_a),
            ("a_total", c.t_qb, c.t_gen, c.a_total / f_a),
        ];
        for (name, t_qb, t_gen, a) in moves {
            let in_bounds = t_qb >= s.t_qb_min * (1.0 - 1e-12)
                && t_qb <= s.t_qb_max * (1.0 + 1e-12)
                && t_gen >= s.t_gen_min * (1.0 - 1e-12)
                && t_gen <= s.t_gen_max * (1.0 + 1e-12)
                && a >= s.a_min
                && a <= s.a_max;
            if !in_bounds {
                continue;
            }
            let Some(site) = self.site(t_qb, t_gen) else { continue };
            cert.neighbours_checked += 1;
            if self.metric_at(&site, n_l, c.k, a) < result.target {
                continue;
            }
            let p = self.power_at(&site, q_l, c.k, a);
            if p < result.power_w * (1.0 - TIE_TOLERANCE) {
                cert.holds = false;
                cert.violations.push(format!(
                    "{name} step to ({t_qb:.6e}, {t_gen:.6e}, {a:.6e}) gives {p:.9e} W < {:.9e} W",
                    result.power_w
                ));
            }
        }
        cert
    }
}
