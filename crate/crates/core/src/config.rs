//! Run configuration: a sectioned `key = value` text format with `#` comments.
//!
//! Every key carries its unit in the name. Unknown keys and sections are
//! rejected and validation reports every problem at once.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::code::{CodeParameters, MetricForm, P_THRESHOLD};
use crate::cryo::{CableModel, CryoEfficiencyModel, ElectronicsScenario, ScenarioKind};
use crate::error::{Error, Result};
use crate::noise::QubitTechnology;
use crate::optimizer::{HardwareModel, PulseDuration, SearchSettings, StepConvention};
use crate::workloads::{rsa_workload, LogBase, RsaVariant, Workload};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkloadKind {
    Rsa,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficiencyKind {
    Carnot,
    SmallScale,
}

/// Raw configuration values, one field per key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub qubit_frequency_hz: f64,
    pub gamma_inverse_s: f64,
    pub tau_1qb_s: f64,
    pub tau_2qb_s: f64,
    pub tau_meas_s: f64,

    pub stages: u32,
    pub t_ext_k: f64,
    pub settings: SearchSettings,

    pub scenario: ElectronicsScenario,

    pub efficiency: EfficiencyKind,
    pub prefactor_k2: f64,
    pub extra_heat_w: f64,

    pub cable: CableModel,

    pub p_thr: f64,

    pub workload_kind: WorkloadKind,
    pub rsa_bits: u32,
    pub rsa_variant: RsaVariant,
    pub q_logical: u64,
    pub d_logical: u64,
    pub nisq_qubits: u32,

    /// Target metric; each subcommand has its own default when unset.
    pub target: Option<f64>,

    pub compare_bits: Vec<u32>,

    pub include_demod_syndrome: bool,
    pub t_gate_multiplier: f64,
    pub p_pi_duration: PulseDuration,
    pub rsa_log_base: LogBase,
    pub metric_form: MetricForm,
    pub step_convention: StepConvention,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tech = QubitTechnology::default();
        let small = CryoEfficiencyModel::small_scale();
        RunConfig {
            qubit_frequency_hz: 6e9,
            gamma_inverse_s: 1.0 / tech.gamma,
            tau_1qb_s: tech.tau_1qb,
            tau_2qb_s: tech.tau_2qb,
            tau_meas_s: tech.tau_meas,
            stages: crate::cryo::DEFAULT_STAGES as u32,
            t_ext_k: crate::cryo::DEFAULT_T_EXT,
            settings: SearchSettings::default(),
            scenario: ElectronicsScenario::a(),
            efficiency: EfficiencyKind::Carnot,
            prefactor_k2: match small {
                CryoEfficiencyModel::SmallScale { prefactor_k2, .. } => prefactor_k2,
                CryoEfficiencyModel::Carnot => unreachable!(),
            },
            extra_heat_w: small.extra_heat(),
            cable: CableModel::default(),
            p_thr: P_THRESHOLD,
            workload_kind: WorkloadKind::Rsa,
            rsa_bits: 2048,
            rsa_variant: RsaVariant::Gidney,
            q_logical: 6175,
            d_logical: 2_100_000_000,
            nisq_qubits: 25,
            target: None,
            compare_bits: (2..=16).map(|i| i * 256).collect(),
            include_demod_syndrome: false,
            t_gate_multiplier: 1.0,
            p_pi_duration: PulseDuration::OneQubitGate,
            rsa_log_base: LogBase::Two,
            metric_form: MetricForm::Linear,
            step_convention: StepConvention::ThreePerLevel,
        }
    }
}

/// Keys applied before all others so that explicit values can override presets.
const PRIORITY_KEYS: [&str; 2] = ["scenario.preset", "efficiency.model"];

/// Every accepted key, in rendering order.
pub const KEYS: &[&str] = &[
    "technology.qubit_frequency_hz",
    "technology.gamma_inverse_s",
    "technology.tau_1qb_s",
    "technology.tau_2qb_s",
    "technology.tau_meas_s",
    "chain.stages",
    "chain.t_ext_k",
    "chain.t_qb_min_k",
    "chain.t_qb_max_k",
    "chain.t_gen_min_k",
    "chain.t_gen_max_k",
    "chain.attenuation_min",
    "chain.attenuation_max",
    "chain.attenuation_min_db",
    "chain.attenuation_max_db",
    "scenario.preset",
    "scenario.q_gen_w",
    "scenario.q_para_w",
    "scenario.q_hemt_w",
    "efficiency.model",
    "efficiency.prefactor_k2",
    "efficiency.extra_heat_w",
    "cable.length_m",
    "cable.area_hi_m2",
    "cable.area_lo_m2",
    "cable.control_lines_per_qubit",
    "cable.readout_lines_per_qubit",
    "code.p_thr",
    "workload.kind",
    "workload.rsa_bits",
    "workload.rsa_variant",
    "workload.q_logical",
    "workload.d_logical",
    "workload.nisq_qubits",
    "target.metric",
    "optimizer.t_qb_points_per_decade",
    "optimizer.t_gen_points_per_decade",
    "optimizer.a_points_per_decade",
    "optimizer.refinement_passes",
    "optimizer.refinement_factor",
    "optimizer.k_min",
    "optimizer.k_max",
    "compare.n_bits",
    "toggles.include_demod_syndrome",
    "toggles.t_gate_multiplier",
    "toggles.p_pi_duration_convention",
    "toggles.rsa_log_base",
    "toggles.metric_form",
    "toggles.step_convention",
];

// the dB keys are inputs only; rendering writes natural units
const INPUT_ONLY: [&str; 2] = ["chain.attenuation_min_db", "chain.attenuation_max_db"];

fn num(key: &str, raw: &str) -> std::result::Result<f64, String> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{key}: expected a finite number, got '{raw}'"))
}

fn int<T: std::str::FromStr>(key: &str, raw: &str) -> std::result::Result<T, String> {
    raw.parse::<T>()
        .map_err(|_| format!("{key}: expected a non-negative integer, got '{raw}'"))
}

fn boolean(key: &str, raw: &str) -> std::result::Result<bool, String> {
    match raw {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("{key}: expected true or false, got '{raw}'")),
    }
}

fn choice<T: Copy>(key: &str, raw: &str, options: &[(&str, T)]) -> std::result::Result<T, String> {
    options
        .iter()
        .find(|(name, _)| name.eq_ignore_ascii_case(raw))
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            format!("{key}: expected one of {}, got '{raw}'", names.join("|"))
        })
}

fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Formats a number so that it parses back to the same value.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

const SCENARIOS: [(&str, ScenarioKind); 4] = [
    ("A", ScenarioKind::A),
    ("B", ScenarioKind::B),
    ("C", ScenarioKind::C),
    ("custom", ScenarioKind::Custom),
];
const EFFICIENCIES: [(&str, EfficiencyKind); 2] =
    [("carnot", EfficiencyKind::Carnot), ("small_scale", EfficiencyKind::SmallScale)];
const WORKLOADS: [(&str, WorkloadKind); 2] =
    [("rsa", WorkloadKind::Rsa), ("rectangular", WorkloadKind::Rectangular)];
const VARIANTS: [(&str, RsaVariant); 2] = [("gidney", RsaVariant::Gidney), ("haner", RsaVariant::Haner)];
const PULSES: [(&str, PulseDuration); 2] = [
    ("one_qubit_gate", PulseDuration::OneQubitGate),
    ("two_qubit_gate", PulseDuration::TwoQubitGate),
];
const LOG_BASES: [(&str, LogBase); 2] = [("two", LogBase::Two), ("natural", LogBase::Natural)];
const FORMS: [(&str, MetricForm); 2] = [("linear", MetricForm::Linear), ("exact", MetricForm::Exact)];
const CONVENTIONS: [(&str, StepConvention); 2] = [
    ("three_per_level", StepConvention::ThreePerLevel),
    ("three_steps", StepConvention::ThreeSteps),
];

fn name_of<T: PartialEq>(options: &[(&'static str, T)], v: &T) -> &'static str {
    options.iter().find(|(_, o)| o == v).map(|(n, _)| *n).unwrap_or("?")
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, raw: &str) -> std::result::Result<(), String> {
        let raw = raw.trim();
        let s = &mut self.settings;
        match key {
            "technology.qubit_frequency_hz" => self.qubit_frequency_hz = num(key, raw)?,
            "technology.gamma_inverse_s" => self.gamma_inverse_s = num(key, raw)?,
            "technology.tau_1qb_s" => self.tau_1qb_s = num(key, raw)?,
            "technology.tau_2qb_s" => self.tau_2qb_s = num(key, raw)?,
            "technology.tau_meas_s" => self.tau_meas_s = num(key, raw)?,
            "chain.stages" => self.stages = int(key, raw)?,
            "chain.t_ext_k" => self.t_ext_k = num(key, raw)?,
            "chain.t_qb_min_k" => s.t_qb_min = num(key, raw)?,
            "chain.t_qb_max_k" => s.t_qb_max = num(key, raw)?,
            "chain.t_gen_min_k" => s.t_gen_min = num(key, raw)?,
            "chain.t_gen_max_k" => s.t_gen_max = num(key, raw)?,
            "chain.attenuation_min" => s.a_min = num(key, raw)?,
            "chain.attenuation_max" => s.a_max = num(key, raw)?,
            "chain.attenuation_min_db" => s.a_min = from_db(num(key, raw)?),
            "chain.attenuation_max_db" => s.a_max = from_db(num(key, raw)?),
            "scenario.preset" => {
                let kind = choice(key, raw, &SCENARIOS)?;
                self.scenario = ElectronicsScenario::preset(kind).unwrap_or(ElectronicsScenario {
                    kind,
                    ..self.scenario
                });
            }
            "scenario.q_gen_w" => self.set_scenario_load(0, num(key, raw)?),
            "scenario.q_para_w" => self.set_scenario_load(1, num(key, raw)?),
            "scenario.q_hemt_w" => self.set_scenario_load(2, num(key, raw)?),
            "efficiency.model" => self.efficiency = choice(key, raw, &EFFICIENCIES)?,
            "efficiency.prefactor_k2" => self.prefactor_k2 = num(key, raw)?,
            "efficiency.extra_heat_w" => self.extra_heat_w = num(key, raw)?,
            "cable.length_m" => self.cable.length_m = num(key, raw)?,
            "cable.area_hi_m2" => self.cable.area_hi = num(key, raw)?,
            "cable.area_lo_m2" => self.cable.area_lo = num(key, raw)?,
            "cable.control_lines_per_qubit" => self.cable.control_lines_per_qubit = num(key, raw)?,
            "cable.readout_lines_per_qubit" => self.cable.readout_lines_per_qubit = num(key, raw)?,
            "code.p_thr" => self.p_thr = num(key, raw)?,
            "workload.kind" => self.workload_kind = choice(key, raw, &WORKLOADS)?,
            "workload.rsa_bits" => self.rsa_bits = int(key, raw)?,
            "workload.rsa_variant" => self.rsa_variant = choice(key, raw, &VARIANTS)?,
            "workload.q_logical" => self.q_logical = int_or_float(key, raw)?,
            "workload.d_logical" => self.d_logical = int_or_float(key, raw)?,
            "workload.nisq_qubits" => self.nisq_qubits = int(key, raw)?,
            "target.metric" => {
                self.target = if raw.eq_ignore_ascii_case("default") {
                    None
                } else {
                    Some(num(key, raw)?)
                }
            }
            "optimizer.t_qb_points_per_decade" => s.t_qb_per_decade = num(key, raw)?,
            "optimizer.t_gen_points_per_decade" => s.t_gen_per_decade = num(key, raw)?,
            "optimizer.a_points_per_decade" => s.a_per_decade = num(key, raw)?,
            "optimizer.refinement_passes" => s.refinement_passes = int(key, raw)?,
            "optimizer.refinement_factor" => s.refinement_factor = int(key, raw)?,
            "optimizer.k_min" => s.k_min = int(key, raw)?,
            "optimizer.k_max" => s.k_max = int(key, raw)?,
            "compare.n_bits" => {
                self.compare_bits = raw
                    .split(',')
                    .map(|t| int::<u32>(key, t.trim()))
                    .collect::<std::result::Result<_, _>>()?
            }
            "toggles.include_demod_syndrome" => self.include_demod_syndrome = boolean(key, raw)?,
            "toggles.t_gate_multiplier" => self.t_gate_multiplier = num(key, raw)?,
            "toggles.p_pi_duration_convention" => self.p_pi_duration = choice(key, raw, &PULSES)?,
            "toggles.rsa_log_base" => self.rsa_log_base = choice(key, raw, &LOG_BASES)?,
            "toggles.metric_form" => self.metric_form = choice(key, raw, &FORMS)?,
            "toggles.step_convention" => self.step_convention = choice(key, raw, &CONVENTIONS)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    fn set_scenario_load(&mut self, which: usize, v: f64) {
        let s = &mut self.scenario;
        let slot = match which {
            0 => &mut s.q_gen,
            1 => &mut s.q_para,
            _ => &mut s.q_hemt,
        };
        if *slot != v {
            *slot = v;
            s.kind = ScenarioKind::Custom;
        }
    }

    /// Textual value of a key, as `set` would accept it.
    pub fn get(&self, key: &str) -> Option<String> {
        let s = &self.settings;
        let v = match key {
            "technology.qubit_frequency_hz" => fmt_num(self.qubit_frequency_hz),
            "technology.gamma_inverse_s" => fmt_num(self.gamma_inverse_s),
            "technology.tau_1qb_s" => fmt_num(self.tau_1qb_s),
            "technology.tau_2qb_s" => fmt_num(self.tau_2qb_s),
            "technology.tau_meas_s" => fmt_num(self.tau_meas_s),
            "chain.stages" => self.stages.to_string(),
            "chain.t_ext_k" => fmt_num(self.t_ext_k),
            "chain.t_qb_min_k" => fmt_num(s.t_qb_min),
            "chain.t_qb_max_k" => fmt_num(s.t_qb_max),
            "chain.t_gen_min_k" => fmt_num(s.t_gen_min),
            "chain.t_gen_max_k" => fmt_num(s.t_gen_max),
            "chain.attenuation_min" => fmt_num(s.a_min),
            "chain.attenuation_max" => fmt_num(s.a_max),
            "chain.attenuation_min_db" => fmt_num(10.0 * s.a_min.log10()),
            "chain.attenuation_max_db" => fmt_num(10.0 * s.a_max.log10()),
            "scenario.preset" => name_of(&SCENARIOS, &self.scenario.kind).to_string(),
            "scenario.q_gen_w" => fmt_num(self.scenario.q_gen),
            "scenario.q_para_w" => fmt_num(self.scenario.q_para),
            "scenario.q_hemt_w" => fmt_num(self.scenario.q_hemt),
            "efficiency.model" => name_of(&EFFICIENCIES, &self.efficiency).to_string(),
            "efficiency.prefactor_k2" => fmt_num(self.prefactor_k2),
            "efficiency.extra_heat_w" => fmt_num(self.extra_heat_w),
            "cable.length_m" => fmt_num(self.cable.length_m),
            "cable.area_hi_m2" => fmt_num(self.cable.area_hi),
            "cable.area_lo_m2" => fmt_num(self.cable.area_lo),
            "cable.control_lines_per_qubit" => fmt_num(self.cable.control_lines_per_qubit),
            "cable.readout_lines_per_qubit" => fmt_num(self.cable.readout_lines_per_qubit),
            "code.p_thr" => fmt_num(self.p_thr),
            "workload.kind" => name_of(&WORKLOADS, &self.workload_kind).to_string(),
            "workload.rsa_bits" => self.rsa_bits.to_string(),
            "workload.rsa_variant" => name_of(&VARIANTS, &self.rsa_variant).to_string(),
            "workload.q_logical" => self.q_logical.to_string(),
            "workload.d_logical" => self.d_logical.to_string(),
            "workload.nisq_qubits" => self.nisq_qubits.to_string(),
            "target.metric" => self.target.map_or("default".to_string(), fmt_num),
            "optimizer.t_qb_points_per_decade" => fmt_num(s.t_qb_per_decade),
            "optimizer.t_gen_points_per_decade" => fmt_num(s.t_gen_per_decade),
            "optimizer.a_points_per_decade" => fmt_num(s.a_per_decade),
            "optimizer.refinement_passes" => s.refinement_passes.to_string(),
            "optimizer.refinement_factor" => s.refinement_factor.to_string(),
            "optimizer.k_min" => s.k_min.to_string(),
            "optimizer.k_max" => s.k_max.to_string(),
            "compare.n_bits" => self
                .compare_bits
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
            "toggles.include_demod_syndrome" => self.include_demod_syndrome.to_string(),
            "toggles.t_gate_multiplier" => fmt_num(self.t_gate_multiplier),
            "toggles.p_pi_duration_convention" => name_of(&PULSES, &self.p_pi_duration).to_string(),
            "toggles.rsa_log_base" => name_of(&LOG_BASES, &self.rsa_log_base).to_string(),
            "toggles.metric_form" => name_of(&FORMS, &self.metric_form).to_string(),
            "toggles.step_convention" => name_of(&CONVENTIONS, &self.step_convention).to_string(),
            _ => return None,
        };
        Some(v)
    }

    /// Every constraint violation, with the offending key.
    pub fn violations(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let mut positive = |key: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                errs.push(format!("{key}: must be positive, got {v}"));
            }
        };
        positive("technology.qubit_frequency_hz", self.qubit_frequency_hz);
        positive("technology.gamma_inverse_s", self.gamma_inverse_s);
        positive("technology.tau_1qb_s", self.tau_1qb_s);
        positive("technology.tau_2qb_s", self.tau_2qb_s);
        positive("technology.tau_meas_s", self.tau_meas_s);
        positive("chain.t_ext_k", self.t_ext_k);
        positive("efficiency.prefactor_k2", self.prefactor_k2);
        positive("cable.length_m", self.cable.length_m);
        positive("cable.area_hi_m2", self.cable.area_hi);
        positive("cable.area_lo_m2", self.cable.area_lo);
        positive("cable.control_lines_per_qubit", self.cable.control_lines_per_qubit);
        positive("cable.readout_lines_per_qubit", self.cable.readout_lines_per_qubit);
        positive("code.p_thr", self.p_thr);
        for (key, v) in [
            ("scenario.q_gen_w", self.scenario.q_gen),
            ("scenario.q_para_w", self.scenario.q_para),
            ("scenario.q_hemt_w", self.scenario.q_hemt),
            ("efficiency.extra_heat_w", self.extra_heat_w),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                errs.push(format!("{key}: must be non-negative, got {v}"));
            }
        }
        if !(2..=20).contains(&self.stages) {
            errs.push(format!("chain.stages: must lie in [2, 20], got {}", self.stages));
        }
        if self.p_thr >= 1.0 {
            errs.push(format!("code.p_thr: must be below 1, got {}", self.p_thr));
        }
        let s = &self.settings;
        if s.t_gen_max > self.t_ext_k {
            errs.push(format!(
                "chain.t_gen_max_k: must not exceed chain.t_ext_k = {}, got {}",
                self.t_ext_k, s.t_gen_max
            ));
        }
        if s.t_qb_max >= self.t_ext_k {
            errs.push("chain.t_qb_max_k: must be below chain.t_ext_k".to_string());
        }
        if let Err(v) = s.validate() {
            errs.extend(v.into_iter().map(|m| m.replace("optimizer.t_qb", "chain.t_qb").replace("optimizer.t_gen bounds", "chain.t_gen bounds")));
        }
        let code = CodeParameters {
            p_thr: self.p_thr,
            t_gate_multiplier: self.t_gate_multiplier,
        };
        if self.p_thr > 0.0 && self.p_thr < 1.0 {
            if let Err(e) = code.validate() {
                errs.push(format!("toggles.t_gate_multiplier: {e}"));
            }
        }
        if self.rsa_bits < 16 {
            errs.push(format!("workload.rsa_bits: must be at least 16, got {}", self.rsa_bits));
        }
        if self.q_logical < 1 {
            errs.push("workload.q_logical: must be at least 1".to_string());
        }
        if self.d_logical < 1 {
            errs.push("workload.d_logical: must be at least 1".to_string());
        }
        if self.nisq_qubits < 3 {
            errs.push(format!("workload.nisq_qubits: must be at least 3, got {}", self.nisq_qubits));
        }
        if self.compare_bits.iter().any(|&n| n < 16) {
            errs.push("compare.n_bits: every key size must be at least 16".to_string());
        }
        errs
    }

    pub fn validate(&self) -> Result<()> {
        let errs = self.violations();
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn technology(&self) -> Result<QubitTechnology> {
        QubitTechnology::new(
            2.0 * PI * self.qubit_frequency_hz,
            1.0 / self.gamma_inverse_s,
            self.tau_1qb_s,
            self.tau_2qb_s,
            self.tau_meas_s,
        )
    }

    pub fn efficiency_model(&self) -> CryoEfficiencyModel {
        match self.efficiency {
            EfficiencyKind::Carnot => CryoEfficiencyModel::Carnot,
            EfficiencyKind::SmallScale => CryoEfficiencyModel::SmallScale {
                prefactor_k2: self.prefactor_k2,
                extra_heat_w: self.extra_heat_w,
            },
        }
    }

    pub fn hardware(&self) -> Result<HardwareModel> {
        Ok(HardwareModel {
            tech: self.technology()?,
            stages: self.stages as usize,
            t_ext: self.t_ext_k,
            scenario: self.scenario,
            cable: self.cable.clone(),
            efficiency: self.efficiency_model(),
            code: CodeParameters {
                p_thr: self.p_thr,
                t_gate_multiplier: self.t_gate_multiplier,
            },
            metric_form: self.metric_form,
            pulse_duration: self.p_pi_duration,
            include_readout_compute: self.include_demod_syndrome,
        })
    }

    pub fn workload(&self) -> Result<Workload> {
        match self.workload_kind {
            WorkloadKind::Rsa => rsa_workload(self.rsa_bits, self.rsa_variant, self.rsa_log_base),
            WorkloadKind::Rectangular => Workload::rectangular(
                format!("rect-{}x{}", self.q_logical, self.d_logical),
                self.q_logical,
                self.d_logical,
            ),
        }
    }

    pub fn target_or(&self, default: f64) -> f64 {
        self.target.unwrap_or(default)
    }

    /// Copy with one key replaced, validated.
    pub fn with_value(&self, key: &str, raw: &str) -> Result<RunConfig> {
        let mut c = self.clone();
        c.set(key, raw).map_err(|e| Error::Config(vec![e]))?;
        c.validate()?;
        Ok(c)
    }

    /// Renders the configuration in the file format, with every key present.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for key in KEYS.iter().filter(|k| !INPUT_ONLY.contains(k)) {
            let (sec, name) = key.split_once('.').expect("keys are sectioned");
            if sec != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{sec}]\n"));
                section = sec;
            }
            out.push_str(&format!("{name} = {}\n", self.get(key).expect("listed key")));
        }
        out
    }
}

fn int_or_float(key: &str, raw: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = raw.parse::<u64>() {
        return Ok(v);
    }
    let v = num(key, raw)?;
    if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63) {
        Ok(v as u64)
    } else {
        Err(format!("{key}: expected a non-negative integer, got '{raw}'"))
    }
}

/// Parses configuration text; missing keys keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut errs = Vec::new();
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    let sections: Vec<&str> = {
        let mut v: Vec<&str> = KEYS.iter().map(|k| k.split_once('.').unwrap().0).collect();
        v.dedup();
        v
    };
    let mut section: Option<String> = None;
    let mut bad_section = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            bad_section = !sections.contains(&name);
            if bad_section {
                errs.push(format!("line {lineno}: unknown section [{name}]"));
                section = None;
            } else {
                section = Some(name.to_string());
            }
            continue;
        }
        if bad_section {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errs.push(format!("line {lineno}: expected 'key = value', got '{line}'"));
            continue;
        };
        let k = k.trim();
        let full = match (&section, k.contains('.')) {
            (_, true) => k.to_string(),
            (Some(s), false) => format!("{s}.{k}"),
            (None, false) => {
                errs.push(format!("line {lineno}: key '{k}' outside any section"));
                continue;
            }
        };
        if !KEYS.contains(&full.as_str()) {
            errs.push(format!("line {lineno}: unknown key '{full}'"));
            continue;
        }
        if pairs.iter().any(|(_, f, _)| *f == full) {
            errs.push(format!("line {lineno}: duplicate key '{full}'"));
            continue;
        }
        pairs.push((lineno, full, v.trim().to_string()));
    }
    for (a, b) in [
        ("chain.attenuation_min", "chain.attenuation_min_db"),
        ("chain.attenuation_max", "chain.attenuation_max_db"),
    ] {
        if pairs.iter().any(|p| p.1 == a) && pairs.iter().any(|p| p.1 == b) {
            errs.push(format!("{a} and {b} are mutually exclusive"));
        }
    }
    pairs.sort_by_key(|(lineno, key, _)| (!PRIORITY_KEYS.contains(&key.as_str()), *lineno));
    let mut cfg = RunConfig::default();
    for (lineno, key, value) in &pairs {
        if let Err(e) = cfg.set(key, value) {
            errs.push(format!("line {lineno}: {e}"));
        }
    }
    errs.extend(cfg.violations());
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errs))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        let hw = c.hardware().unwrap();
        assert_eq!(hw, HardwareModel::default());
        assert_eq!(c.scenario, ElectronicsScenario::a());
    }

    #[test]
    fn scenario_preset_b() {
        let c = parse_config("[scenario]\npreset = B\n").unwrap();
        assert_eq!((c.scenario.q_gen, c.scenario.q_para, c.scenario.q_hemt), (1e-5, 1e-8, 0.0));
        let o = parse_config("[scenario]\nq_gen_w = 2e-4\npreset = B\n").unwrap();
        assert_eq!(o.scenario.q_gen, 2e-4);
        assert_eq!(o.scenario.kind, ScenarioKind::Custom);
    }

    #[test]
    fn negative_gamma_names_the_key() {
        let err = parse_config("[technology]\ngamma_inverse_s = -1\n").unwrap_err();
        assert!(err.to_string().contains("technology.gamma_inverse_s"));
    }

    #[test]
    fn every_violation_is_listed() {
        let text = "[technology]\ngamma_inverse_s = -1\ntau_1qb_s = 0\n[bogus]\nx = 1\n[chain]\nfoo = 2\nstages = many\n";
        let Error::Config(errs) = parse_config(text).unwrap_err() else { panic!() };
        assert_eq!(errs.len(), 5, "{errs:?}");
        let Error::Config(errs) = parse_config("[technology]\ngamma_inverse_s = -1\ntau_1qb_s = 0\n").unwrap_err() else {
            panic!()
        };
        assert_eq!(errs.len(), 2);
    }

    #[test]
    fn decibel_keys() {
        let c = parse_config("[chain]\nattenuation_max_db = 60\n").unwrap();
        assert!((c.settings.a_max - 1e6).abs() < 1e-6);
        assert!(parse_config("[chain]\nattenuation_max_db = 60\nattenuation_max = 10\n").is_err());
    }

    #[test]
    fn render_round_trips() {
        let mut c = RunConfig::default();
        c.set("technology.gamma_inverse_s", "0.5").unwrap();
        c.set("efficiency.model", "small_scale").unwrap();
        c.set("target.metric", "0.9").unwrap();
        c.set("compare.n_bits", "512, 1024").unwrap();
        let back = parse_config(&c.render()).unwrap();
        assert_eq!(back, c);
        assert_eq!(parse_config(&RunConfig::default().render()).unwrap(), RunConfig::default());
    }

    #[test]
    fn rendered_defaults_match_table_values() {
        let r = RunConfig::default().render();
        for line in [
            "qubit_frequency_hz = 6e9",
            "gamma_inverse_s = 0.05",
            "tau_1qb_s = 2.5e-8",
            "tau_2qb_s = 1e-7",
            "tau_meas_s = 1e-7",
            "stages = 5",
            "t_ext_k = 300",
            "p_thr = 2e-5",
            "q_gen_w = 0.001",
            "q_para_w = 1e-6",
            "q_hemt_w = 5e-5",
        ] {
            assert!(r.contains(line), "missing '{line}' in\n{r}");
        }
    }
}
