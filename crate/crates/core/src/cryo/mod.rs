//! Thermodynamic model of the stack: stage layout, cooling, gate and per-qubit power.

mod cable;
mod readout;

pub use cable::{
    adaptive_simpson, cable_heat_flow, conducted_heat_per_qubit, CableModel, PowerLaw,
    KAPTON_SPLIT_K, MATERIAL_SPLIT_K, STEEL_FIT,
};
pub(crate) use cable::conducted_heat;
pub use readout::{
    demodulation_power_per_qubit, fiber_bitrate_per_qubit, measurement_power,
    measurement_power_diagnostic, syndrome_power_per_qubit, FiberLink,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::noise::QubitTechnology;

pub const T_PARA: f64 = 4.0;
pub const T_HEMT: f64 = 70.0;
pub const DEFAULT_T_EXT: f64 = 300.0;
pub const DEFAULT_STAGES: usize = 5;

/// Temperatures and attenuations of the refrigeration stages.
///
/// Stage 0 holds the qubits, stage `K-1` the signal generation. The
/// attenuator at stage `i < K-1` sits between stage `i+1` and stage `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CryoChain {
    t_ext: f64,
    temps: Vec<f64>,
    per_stage: f64,
    cumulative: Vec<f64>,
}

/// Geometric temperature spacing and equal attenuation split over `stages` stages.
pub fn stage_layout(
    t_qb: f64,
    t_gen: f64,
    a_total: f64,
    stages: usize,
    t_ext: f64,
) -> Result<CryoChain> {
    if stages < 2 {
        return domain(format!("need at least 2 stages, got {stages}"));
    }
    if !(t_qb > 0.0 && t_qb < t_gen && t_gen <= t_ext) {
        return domain(format!(
            "need 0 < t_qb < t_gen <= t_ext, got t_qb={t_qb}, t_gen={t_gen}, t_ext={t_ext}"
        ));
    }
    if !(a_total >= 1.0) || !a_total.is_finite() {
        return domain(format!("total attenuation must be finite and >= 1, got {a_total}"));
    }
    Ok(layout_unchecked(t_qb, t_gen, a_total, stages, t_ext))
}

pub(crate) fn layout_unchecked(
    t_qb: f64,
    t_gen: f64,
    a_total: f64,
    stages: usize,
    t_ext: f64,
) -> CryoChain {
    let gaps = (stages - 1) as f64;
    let ratio = t_gen / t_qb;
    let mut temps: Vec<f64> = (0..stages)
        .map(|i| t_qb * ratio.powf(i as f64 / gaps))
        .collect();
    temps[stages - 1] = t_gen;
    let per_stage = a_total.powf(1.0 / gaps);
    let mut cumulative: Vec<f64> = (1..stages).map(|i| per_stage.powi(i as i32)).collect();
    cumulative[stages - 2] = a_total;
    CryoChain {
        t_ext,
        temps,
        per_stage,
        cumulative,
    }
}

impl CryoChain {
    pub fn stages(&self) -> usize {
        self.temps.len()
    }

    pub fn t_qb(&self) -> f64 {
        self.temps[0]
    }

    pub fn t_gen(&self) -> f64 {
        self.temps[self.temps.len() - 1]
    }

    pub fn t_ext(&self) -> f64 {
        self.t_ext
    }

    pub fn a_total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    pub fn per_stage_attenuation(&self) -> f64 {
        self.per_stage
    }

    pub fn temperatures(&self) -> &[f64] {
        &self.temps
    }

    /// Cumulative attenuation below each attenuator, one entry per attenuator.
    pub fn cumulative_attenuations(&self) -> &[f64] {
        &self.cumulative
    }

    /// Cumulative attenuation with the convention that it is 0 below the qubit
    /// and unchanged at the top stage, indexed `0..=K`.
    pub fn padded_cumulative(&self, i: usize) -> f64 {
        match i {
            0 => 0.0,
            i if i <= self.cumulative.len() => self.cumulative[i - 1],
            _ => self.a_total(),
        }
    }

    /// Heat dissipated at each stage per watt reaching the qubit.
    pub fn dissipation_weights(&self) -> Vec<f64> {
        (1..=self.stages())
            .map(|i| self.padded_cumulative(i) - self.padded_cumulative(i - 1))
            .collect()
    }
}

/// How electrical power scales with heat extracted at a cold stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CryoEfficiencyModel {
    Carnot,
    /// Empirical fit for small refrigerators plus a fixed extra load per qubit at the qubit stage.
    SmallScale { prefactor_k2: f64, extra_heat_w: f64 },
}

impl Default for CryoEfficiencyModel {
    fn default() -> Self {
        CryoEfficiencyModel::Carnot
    }
}

impl CryoEfficiencyModel {
    pub fn small_scale() -> Self {
        CryoEfficiencyModel::SmallScale {
            prefactor_k2: 3.24e5,
            extra_heat_w: 5e-8,
        }
    }

    /// Electrical watts per watt of heat lifted from `t` to `t_ext`.
    #[inline]
    pub fn multiplier(&self, t: f64, t_ext: f64) -> f64 {
        match *self {
            CryoEfficiencyModel::Carnot => (t_ext - t) / t,
            CryoEfficiencyModel::SmallScale { prefactor_k2, .. } => {
                prefactor_k2 * (1.0 - t / t_ext) / (t * t)
            }
        }
    }

    pub fn extra_heat(&self) -> f64 {
        match *self {
            CryoEfficiencyModel::Carnot => 0.0,
            CryoEfficiencyModel::SmallScale { extra_heat_w, .. } => extra_heat_w,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CryoEfficiencyModel::Carnot => "carnot",
            CryoEfficiencyModel::SmallScale { .. } => "small_scale",
        }
    }
}

/// Electrical power needed to extract `heat` at `t_stage`.
pub fn cooling_power(heat: f64, t_stage: f64, t_ext: f64, model: &CryoEfficiencyModel) -> Result<f64> {
    if !(heat >= 0.0) {
        return domain(format!("heat must be non-negative, got {heat}"));
    }
    if !(t_stage > 0.0 && t_stage <= t_ext) {
        return domain(format!("stage temperature must lie in (0, {t_ext}], got {t_stage}"));
    }
    Ok(heat * model.multiplier(t_stage, t_ext))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioKind {
    A,
    B,
    C,
    Custom,
}

impl ScenarioKind {
    pub fn label(&self) -> &'static str {
        match self {
            ScenarioKind::A => "A",
            ScenarioKind::B => "B",
            ScenarioKind::C => "C",
            ScenarioKind::Custom => "custom",
        }
    }
}

/// Heat per physical qubit dissipated by the control and readout electronics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectronicsScenario {
    pub kind: ScenarioKind,
    /// Signal generation and readout at the top stage (W/qubit).
    pub q_gen: f64,
    /// Parametric amplifiers at 4 K (W/qubit).
    pub q_para: f64,
    /// HEMT amplifiers at 70 K (W/qubit).
    pub q_hemt: f64,
}

impl ElectronicsScenario {
    pub fn preset(kind: ScenarioKind) -> Option<Self> {
        let (q_gen, q_para, q_hemt) = match kind {
            ScenarioKind::A => (1e-3, 1e-6, 5e-5),
            ScenarioKind::B => (1e-5, 1e-8, 0.0),
            ScenarioKind::C => (1e-7, 1e-10, 0.0),
            ScenarioKind::Custom => return None,
        };
        Some(ElectronicsScenario {
            kind,
            q_gen,
            q_para,
            q_hemt,
        })
    }

    pub fn a() -> Self {
        Self::preset(ScenarioKind::A).unwrap()
    }

    pub fn b() -> Self {
        Self::preset(ScenarioKind::B).unwrap()
    }

    pub fn c() -> Self {
        Self::preset(ScenarioKind::C).unwrap()
    }

    pub fn custom(q_gen: f64, q_para: f64, q_hemt: f64) -> Result<Self> {
        if !(q_gen >= 0.0 && q_para >= 0.0 && q_hemt >= 0.0) {
            return domain("electronics heat loads must be non-negative");
        }
        Ok(ElectronicsScenario {
            kind: ScenarioKind::Custom,
            q_gen,
            q_para,
            q_hemt,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatSource {
    Attenuator,
    Conduction,
    Amplifier,
    Electronics,
    Extra,
}

impl HeatSource {
    pub fn label(&self) -> &'static str {
        match self {
            HeatSource::Attenuator => "attenuator",
            HeatSource::Conduction => "conduction",
            HeatSource::Amplifier => "amplifier",
            HeatSource::Electronics => "electronics",
            HeatSource::Extra => "extra",
        }
    }
}

/// Heat extracted at one temperature and the electrical power it costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage_temperature_k: f64,
    pub heat_extracted_w: f64,
    pub electrical_power_w: f64,
    pub source: HeatSource,
}

impl StageRecord {
    pub fn scaled(&self, factor: f64) -> StageRecord {
        StageRecord {
            heat_extracted_w: self.heat_extracted_w * factor,
            electrical_power_w: self.electrical_power_w * factor,
            ..*self
        }
    }
}

/// Attenuator heat and its cooling cost per stage for `drive` watts at the qubit.
pub fn attenuator_records(chain: &CryoChain, drive: f64, model: &CryoEfficiencyModel) -> Vec<StageRecord> {
    chain
        .temperatures()
        .iter()
        .zip(chain.dissipation_weights())
        .filter(|(_, w)| *w > 0.0)
        .map(|(&t, w)| {
            let heat = drive * w;
            StageRecord {
                stage_temperature_k: t,
                heat_extracted_w: heat,
                electrical_power_w: heat * model.multiplier(t, chain.t_ext()),
                source: HeatSource::Attenuator,
            }
        })
        .collect()
}

/// Cooling power for a sustained two-qubit drive of strength `p_pi` at the qubit.
pub fn gate_power_2qb(chain: &CryoChain, p_pi: f64, model: &CryoEfficiencyModel) -> f64 {
    chain
        .temperatures()
        .iter()
        .zip(chain.dissipation_weights())
        .map(|(&t, w)| model.multiplier(t, chain.t_ext()) * w)
        .sum::<f64>()
        * p_pi
}

/// Single-qubit gate power averaged over a clock period.
pub fn gate_power_1qb(
    chain: &CryoChain,
    p_pi: f64,
    tech: &QubitTechnology,
    model: &CryoEfficiencyModel,
) -> f64 {
    tech.tau_1qb / tech.tau_step * gate_power_2qb(chain, p_pi, model)
}

/// Per-qubit static heat sources and their electrical cost.
///
/// Electronics and amplifiers are charged their own dissipation plus the
/// cooling needed to remove it. Conduction is charged at each stage for the
/// net heat arriving from above minus the heat leaving below; nothing flows
/// into the top stage, whose cable load is absorbed by the electronics.
pub fn static_power_records(
    chain: &CryoChain,
    scenario: &ElectronicsScenario,
    cable: &CableModel,
    model: &CryoEfficiencyModel,
) -> Vec<StageRecord> {
    let t_ext = chain.t_ext();
    let temps = chain.temperatures();
    let spans: Vec<f64> = temps
        .windows(2)
        .map(|w| conducted_heat(w[0], w[1], cable) * cable.lines_per_qubit())
        .collect();
    static_records_from_spans(temps, &spans, t_ext, scenario, model)
}

pub(crate) fn static_records_from_spans(
    temps: &[f64],
    spans: &[f64],
    t_ext: f64,
    scenario: &ElectronicsScenario,
    model: &CryoEfficiencyModel,
) -> Vec<StageRecord> {
    let t_gen = temps[temps.len() - 1];
    let mut out = Vec::with_capacity(temps.len() + 4);
    let self_and_cooling = |heat: f64, t: f64| heat * (1.0 + model.multiplier(t, t_ext));
    out.push(StageRecord {
        stage_temperature_k: t_gen,
        heat_extracted_w: scenario.q_gen,
        electrical_power_w: self_and_cooling(scenario.q_gen, t_gen),
        source: HeatSource::Electronics,
    });
    if t_gen > T_HEMT {
        out.push(StageRecord {
            stage_temperature_k: T_HEMT,
            heat_extracted_w: scenario.q_hemt,
            electrical_power_w: self_and_cooling(scenario.q_hemt, T_HEMT),
            source: HeatSource::Amplifier,
        });
    }
    out.push(StageRecord {
        stage_temperature_k: T_PARA,
        heat_extracted_w: scenario.q_para,
        electrical_power_w: self_and_cooling(scenario.q_para, T_PARA),
        source: HeatSource::Amplifier,
    });
    for (i, &t) in temps.iter().enumerate() {
        let from_above = spans.get(i).copied().unwrap_or(0.0);
        let to_below = if i == 0 { 0.0 } else { spans[i - 1] };
        let heat = from_above - to_below;
        out.push(StageRecord {
            stage_temperature_k: t,
            heat_extracted_w: heat,
            electrical_power_w: heat * model.multiplier(t, t_ext),
            source: HeatSource::Conduction,
        });
    }
    let extra = model.extra_heat();
    if extra > 0.0 {
        out.push(StageRecord {
            stage_temperature_k: temps[0],
            heat_extracted_w: extra,
            electrical_power_w: extra * model.multiplier(temps[0], t_ext),
            source: HeatSource::Extra,
        });
    }
    out
}

/// Static electrical power per physical qubit.
pub fn per_qubit_static_power(
    chain: &CryoChain,
    scenario: &ElectronicsScenario,
    cable: &CableModel,
    model: &CryoEfficiencyModel,
) -> f64 {
    static_power_records(chain, scenario, cable, model)
        .iter()
        .map(|r| r.electrical_power_w)
        .sum()
}
