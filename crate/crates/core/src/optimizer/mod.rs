//! Constrained power minimization for single gates, NISQ circuits and
//! fault-tolerant computations, plus the analyses built on top of them.

mod analysis;
mod ft;
mod gate;
mod grid;

pub use analysis::{
    compare_quantum_classical, find_transitions, sweep, transition_size_estimate,
    user_efficiency_rsa, Axis, ComparisonRow, ComparisonTable, Crossovers, QuantumConfig,
    RsaCost, StepConvention, SweepRow, Transition,
};
pub use ft::{FtOptimizer, FtSite};
pub use gate::{
    bare_efficiency_max, certify_single_stage, dressed_efficiency, magnification, nisq_required_occupancy,
    nisq_user_efficiency, optimize_nisq, optimize_single_qubit, single_qubit_required_occupancy,
    single_stage_optimum, NisqTarget, SingleStageOptimum,
};
pub use grid::LogGrid;

use serde::{Deserialize, Serialize};

use crate::code::{CodeParameters, MetricForm};
use crate::cryo::{
    CableModel, CryoEfficiencyModel, ElectronicsScenario, StageRecord, DEFAULT_STAGES, DEFAULT_T_EXT,
};
use crate::error::Result;
use crate::noise::{pi_pulse_power, QubitTechnology};

/// Relative power difference below which two candidates count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Which duration sets the drive amplitude charged to gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseDuration {
    #[default]
    OneQubitGate,
    TwoQubitGate,
}

/// Everything about the machine that is not a control parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareModel {
    pub tech: QubitTechnology,
    pub stages: usize,
    pub t_ext: f64,
    pub scenario: ElectronicsScenario,
    pub cable: CableModel,
    pub efficiency: CryoEfficiencyModel,
    pub code: CodeParameters,
    pub metric_form: MetricForm,
    pub pulse_duration: PulseDuration,
    /// Add demodulation and syndrome decoding to the per-qubit power.
    pub include_readout_compute: bool,
}

impl Default for HardwareModel {
    fn default() -> Self {
        HardwareModel {
            tech: QubitTechnology::default(),
            stages: DEFAULT_STAGES,
            t_ext: DEFAULT_T_EXT,
            scenario: ElectronicsScenario::a(),
            cable: CableModel::default(),
            efficiency: CryoEfficiencyModel::Carnot,
            code: CodeParameters::default(),
            metric_form: MetricForm::Linear,
            pulse_duration: PulseDuration::OneQubitGate,
            include_readout_compute: false,
        }
    }
}

impl HardwareModel {
    /// Drive power of a pi pulse under the chosen duration convention.
    pub fn pi_power(&self) -> Result<f64> {
        let tau = match self.pulse_duration {
            PulseDuration::OneQubitGate => self.tech.tau_1qb,
            PulseDuration::TwoQubitGate => self.tech.tau_2qb,
        };
        pi_pulse_power(&self.tech, tau)
    }

    pub fn with_gamma_inverse(mut self, seconds: f64) -> Self {
        self.tech = self.tech.with_gamma_inverse(seconds);
        self
    }

    pub fn with_scenario(mut self, scenario: ElectronicsScenario) -> Self {
        self.scenario = scenario;
        self
    }

    pub fn with_efficiency(mut self, efficiency: CryoEfficiencyModel) -> Self {
        self.efficiency = efficiency;
        self
    }
}

/// Search domain and resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSettings {
    pub t_qb_min: f64,
    pub t_qb_max: f64,
    pub t_gen_min: f64,
    pub t_gen_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub t_qb_per_decade: f64,
    pub t_gen_per_decade: f64,
    /// Resolution used for the attenuation step reported by the optimality certificate.
    pub a_per_decade: f64,
    pub refinement_passes: u32,
    pub refinement_factor: u32,
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            t_qb_min: 1e-3,
            t_qb_max: 4.0,
            t_gen_min: 4.0,
            t_gen_max: 300.0,
            a_min: 1.0,
            a_max: 1e12,
            t_qb_per_decade: 40.0,
            t_gen_per_decade: 40.0,
            a_per_decade: 10.0,
            refinement_passes: 2,
            refinement_factor: 4,
            k_min: 0,
            k_max: 6,
        }
    }
}

impl SearchSettings {
    pub fn t_qb_grid(&self) -> LogGrid {
        LogGrid::per_decade(self.t_qb_min, self.t_qb_max, self.t_qb_per_decade)
    }

    pub fn t_gen_grid(&self) -> LogGrid {
        LogGrid::per_decade(self.t_gen_min, self.t_gen_max, self.t_gen_per_decade)
    }

    /// Overall shrink factor of the refinement passes.
    pub fn refinement_shrink(&self) -> f64 {
        (self.refinement_factor.max(1) as f64).powi(self.refinement_passes as i32)
    }

    pub fn final_a_step_log10(&self) -> f64 {
        1.0 / self.a_per_decade / self.refinement_shrink()
    }

    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut errs = Vec::new();
        if !(self.t_qb_min > 0.0 && self.t_qb_min <= self.t_qb_max) {
            errs.push("optimizer.t_qb bounds must satisfy 0 < min <= max".to_string());
        }
        if !(self.t_gen_min > 0.0 && self.t_gen_min <= self.t_gen_max) {
            errs.push("optimizer.t_gen bounds must satisfy 0 < min <= max".to_string());
        }
        if !(self.a_min >= 1.0 && self.a_min <= self.a_max && self.a_max.is_finite()) {
            errs.push("optimizer attenuation bounds must satisfy 1 <= min <= max < inf".to_string());
        }
        for (name, v) in [
            ("t_qb_points_per_decade", self.t_qb_per_decade),
            ("t_gen_points_per_decade", self.t_gen_per_decade),
            ("a_points_per_decade", self.a_per_decade),
        ] {
            if !(v > 0.0) {
                errs.push(format!("optimizer.{name} must be positive"));
            }
        }
        if self.refinement_factor < 2 && self.refinement_passes > 0 {
            errs.push("optimizer.refinement_factor must be at least 2".to_string());
        }
        if self.k_min > self.k_max {
            errs.push("optimizer.k_min must not exceed optimizer.k_max".to_string());
        }
        if self.k_max > 12 {
            errs.push("optimizer.k_max must be at most 12".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    SingleQubit,
    Nisq,
    FaultTolerant,
}

impl ProblemKind {
    pub fn label(&self) -> &'static str {
        match self {
            ProblemKind::SingleQubit => "single_qubit",
            ProblemKind::Nisq => "nisq",
            ProblemKind::FaultTolerant => "fault_tolerant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    pub t_qb: f64,
    pub t_gen: f64,
    pub a_total: f64,
    pub k: u32,
    /// Overlapped sub-circuits, for circuit problems only.
    pub m: Option<u32>,
}

impl ControlPoint {
    fn undefined() -> Self {
        ControlPoint {
            t_qb: f64::NAN,
            t_gen: f64::NAN,
            a_total: f64::NAN,
            k: 0,
            m: None,
        }
    }
}

/// Final grid spacing in log10 units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridStep {
    pub t_qb_log10: f64,
    pub t_gen_log10: f64,
    pub a_log10: f64,
}

/// Best point found for one discrete setting (concatenation level or compression).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: u32,
    pub feasible: bool,
    pub power_w: f64,
    pub t_qb: f64,
    pub t_gen: f64,
    pub a_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub problem: ProblemKind,
    pub feasible: bool,
    pub target: f64,
    pub control: ControlPoint,
    pub power_w: f64,
    pub metric_achieved: f64,
    pub per_qubit_power_w: f64,
    pub physical_qubits: f64,
    /// Pauli error (fault-tolerant) or gate infidelity (gates and circuits) at the optimum.
    pub error_rate: f64,
    pub per_stage: Vec<StageRecord>,
    pub per_level: Vec<LevelSummary>,
    pub grid_step: GridStep,
    /// Binding constraint when infeasible, empty otherwise.
    pub diagnostic: String,
}

impl OptimizationResult {
    pub(crate) fn infeasible(problem: ProblemKind, target: f64, diagnostic: String) -> Self {
        OptimizationResult {
            problem,
            feasible: false,
            target,
            control: ControlPoint::undefined(),
            power_w: f64::NAN,
            metric_achieved: f64::NAN,
            per_qubit_power_w: f64::NAN,
            physical_qubits: f64::NAN,
            error_rate: f64::NAN,
            per_stage: Vec::new(),
            per_level: Vec::new(),
            grid_step: GridStep {
                t_qb_log10: f64::NAN,
                t_gen_log10: f64::NAN,
                a_log10: f64::NAN,
            },
            diagnostic,
        }
    }

    /// Sum of the electrical power over the breakdown records.
    pub fn breakdown_total(&self) -> f64 {
        self.per_stage.iter().map(|r| r.electrical_power_w).sum()
    }
}

/// Outcome of the local-optimality check at a reported optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub holds: bool,
    pub neighbours_checked: usize,
    pub violations: Vec<String>,
}

/// `a` beats `b`: lower power, or tied power with smaller `k`, then smaller
/// attenuation, then warmer qubits.
pub(crate) fn beats(a: (f64, u32, f64, f64), b: (f64, u32, f64, f64)) -> bool {
    let (pa, ka, aa, ta) = a;
    let (pb, kb, ab, tb) = b;
    let scale = pa.abs().max(pb.abs());
    if (pa - pb).abs() > TIE_TOLERANCE * scale {
        return pa < pb;
    }
    if ka != kb {
        return ka < kb;
    }
    if aa != ab {
        return aa < ab;
    }
    ta > tb
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_break_order() {
        assert!(beats((1.0, 3, 10.0, 0.1), (2.0, 0, 1.0, 1.0)));
        assert!(beats((1.0, 2, 10.0, 0.1), (1.0 + 1e-12, 3, 1.0, 1.0)));
        assert!(beats((1.0, 2, 5.0, 0.1), (1.0, 2, 10.0, 1.0)));
        assert!(beats((1.0, 2, 5.0, 0.2), (1.0, 2, 5.0, 0.1)));
        assert!(!beats((1.0, 2, 5.0, 0.1), (1.0, 2, 5.0, 0.1)));
    }

    #[test]
    fn default_settings_validate() {
        assert!(SearchSettings::default().validate().is_ok());
        let bad = SearchSettings {
            k_min: 4,
            k_max: 2,
            ..Default::default()
        };
        assert_eq!(bad.validate().unwrap_err().len(), 1);
    }
}
