//! Driven-qubit noise model: drive power, thermal photons, infidelity and Pauli errors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Exponents above this are treated as zero occupancy.
const MAX_EXPONENT: f64 = 700.0;

/// Physical constants of a qubit and its gate timings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitTechnology {
    /// Angular transition frequency (rad/s).
    pub omega0: f64,
    /// Spontaneous emission rate into the drive line (1/s).
    pub gamma: f64,
    pub tau_1qb: f64,
    pub tau_2qb: f64,
    pub tau_meas: f64,
    /// Clock period, the duration of the slowest operation.
    pub tau_step: f64,
}

impl Default for QubitTechnology {
    fn default() -> Self {
        QubitTechnology::new(2.0 * PI * 6e9, 1.0 / 50e-3, 25e-9, 100e-9, 100e-9)
            .expect("default technology is valid")
    }
}

impl QubitTechnology {
    pub fn new(omega0: f64, gamma: f64, tau_1qb: f64, tau_2qb: f64, tau_meas: f64) -> Result<Self> {
        let fields = [
            ("omega0", omega0),
            ("gamma", gamma),
            ("tau_1qb", tau_1qb),
            ("tau_2qb", tau_2qb),
            ("tau_meas", tau_meas),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be finite and positive, got {v}"));
            }
        }
        Ok(QubitTechnology {
            omega0,
            gamma,
            tau_1qb,
            tau_2qb,
            tau_meas,
            tau_step: tau_1qb.max(tau_2qb).max(tau_meas),
        })
    }

    /// Same timings with a different emission time `1/gamma` (s).
    pub fn with_gamma_inverse(self, seconds: f64) -> Self {
        QubitTechnology {
            gamma: 1.0 / seconds,
            ..self
        }
    }

    pub fn photon_energy(&self) -> f64 {
        HBAR * self.omega0
    }

    /// Rabi frequency of a pi pulse lasting `tau_1qb`.
    pub fn rabi_frequency(&self) -> f64 {
        PI / self.tau_1qb
    }

    /// Drive power producing Rabi frequency `rabi` (rad/s).
    pub fn drive_power_for_rabi(&self, rabi: f64) -> f64 {
        rabi * rabi * self.photon_energy() / (4.0 * self.gamma)
    }
}

/// A probability that may have been clamped into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    pub value: f64,
    pub clamped: bool,
}

impl Probability {
    pub fn clamp(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Probability {
            value,
            clamped: value != raw,
        }
    }
}

/// Power of a resonant pi pulse of duration `tau`.
pub fn pi_pulse_power(tech: &QubitTechnology, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return domain(format!("pulse duration must be positive, got {tau}"));
    }
    Ok(tech.photon_energy() * PI * PI / (4.0 * tech.gamma * tau * tau))
}

/// Bose-Einstein occupancy of a mode at `omega0` and temperature `t` (K).
pub fn bose_einstein(t: f64, omega0: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return domain(format!("temperature must be non-negative, got {t}"));
    }
    Ok(occupancy(t, omega0))
}

/// Unchecked occupancy for hot loops; `t` must be non-negative.
#[inline]
pub(crate) fn occupancy(t: f64, omega0: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega0 / (K_B * t);
    if x > MAX_EXPONENT {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Occupancy behind one attenuator of strength `a` sitting at `t_qb`, fed from `t_ext`.
pub fn single_attenuator_occupancy(a: f64, t_qb: f64, t_ext: f64, omega0: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return domain(format!("attenuation must be >= 1, got {a}"));
    }
    let n_qb = bose_einstein(t_qb, omega0)?;
    let n_ext = bose_einstein(t_ext, omega0)?;
    if a.is_infinite() {
        return Ok(n_qb);
    }
    Ok((a - 1.0) / a * n_qb + n_ext / a)
}

/// Occupancy at the bottom of a chain of attenuators.
///
/// `temps` lists the K stage temperatures from the qubit upward and
/// `cumulative` the K-1 cumulative attenuations, where entry `i` is the
/// product of the attenuators at stages `0..=i`.
pub fn chain_occupancy_from(temps: &[f64], cumulative: &[f64], omega0: f64) -> Result<f64> {
    if temps.len() < 2 || cumulative.len() + 1 != temps.len() {
        return domain(format!(
            "chain needs K >= 2 temperatures and K-1 attenuations, got {} and {}",
            temps.len(),
            cumulative.len()
        ));
    }
    if temps[0] < 0.0 || temps.windows(2).any(|w| w[1] < w[0]) {
        return domain("stage temperatures must be non-negative and nondecreasing upward");
    }
    if cumulative[0] < 1.0 || cumulative.windows(2).any(|w| w[1] < w[0]) {
        return domain("cumulative attenuations must be >= 1 and nondecreasing upward");
    }
    let n: Vec<f64> = temps.iter().map(|&t| occupancy(t, omega0)).collect();
    let mut total = n[0];
    for (i, &acc) in cumulative.iter().enumerate() {
        if acc.is_finite() {
            total += (n[i + 1] - n[i]) / acc;
        }
    }
    Ok(total.max(0.0))
}

/// Occupancy at the qubit for a stage layout.
pub fn chain_occupancy(chain: &crate::cryo::CryoChain, omega0: f64) -> Result<f64> {
    chain_occupancy_from(chain.temperatures(), chain.cumulative_attenuations(), omega0)
}

/// Worst-case single-qubit gate infidelity; the gate metric is one minus this.
pub fn worst_case_infidelity_1qb(tech: &QubitTechnology, n_noise: f64) -> Result<f64> {
    if !(n_noise >= 0.0) {
        return domain(format!("occupancy must be non-negative, got {n_noise}"));
    }
    Ok(tech.gamma * tech.tau_1qb * (1.0 + n_noise))
}

/// Worst-case Pauli error probability per qubit per clock period.
pub fn pauli_error_probability(tech: &QubitTechnology, n_noise: f64) -> Result<Probability> {
    if !(n_noise >= 0.0) {
        return domain(format!("occupancy must be non-negative, got {n_noise}"));
    }
    Ok(Probability::clamp(pauli_error_raw(tech, n_noise)))
}

#[inline]
pub(crate) fn pauli_error_raw(tech: &QubitTechnology, n_noise: f64) -> f64 {
    0.5 * tech.gamma * tech.tau_step * (0.5 + n_noise)
}

/// Largest occupancy keeping the Pauli error at or below `p_max`.
pub(crate) fn occupancy_for_pauli_error(tech: &QubitTechnology, p_max: f64) -> f64 {
    2.0 * p_max / (tech.gamma * tech.tau_step) - 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tech_ms(ms: f64) -> QubitTechnology {
        QubitTechnology::default().with_gamma_inverse(ms * 1e-3)
    }

    #[test]
    fn pi_pulse_at_one_ms() {
        let p = pi_pulse_power(&tech_ms(1.0), 25e-9).unwrap();
        // hbar * 2pi*6e9 * pi^2 / 4 * 1e-3 / (25e-9)^2
        let expected = 1.054_571_817e-34 * 2.0 * PI * 6e9 * PI * PI / 4.0 * 1e-3 / 6.25e-16;
        assert!((p / expected - 1.0).abs() < 1e-14);
        assert!((p / 1.57e-11 - 1.0).abs() < 0.01);
    }

    #[test]
    fn pi_pulse_scalings() {
        let t = tech_ms(1.0);
        let p1 = pi_pulse_power(&t, 25e-9).unwrap();
        let p2 = pi_pulse_power(&t, 50e-9).unwrap();
        assert!((p1 / p2 - 4.0).abs() < 1e-12);
        let fast = QubitTechnology { gamma: 2.0 * t.gamma, ..t };
        let p3 = pi_pulse_power(&fast, 25e-9).unwrap();
        assert!((p1 / p3 - 2.0).abs() < 1e-12);
        assert!(pi_pulse_power(&t, 0.0).is_err());
        assert!(pi_pulse_power(&t, -1.0).is_err());
    }

    #[test]
    fn pulse_power_matches_rabi_relation() {
        let t = tech_ms(3.0);
        let direct = pi_pulse_power(&t, t.tau_1qb).unwrap();
        let via_rabi = t.drive_power_for_rabi(t.rabi_frequency());
        assert!((direct / via_rabi - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bose_einstein_anchors() {
        let w = 2.0 * PI * 6e9;
        assert_eq!(bose_einstein(0.0, w).unwrap(), 0.0);
        assert!(bose_einstein(-1.0, w).is_err());
        let scale = HBAR * w / K_B;
        assert!((scale - 0.288).abs() < 1e-3);
        let n = bose_einstein(0.3, w).unwrap();
        assert!((n - 1.0 / (scale / 0.3).exp_m1()).abs() < 1e-15);
        assert!((n - 0.62).abs() < 0.01);
        let hot = bose_einstein(1e6, w).unwrap();
        assert!((hot / (1e6 / scale) - 1.0).abs() < 1e-6);
        assert_eq!(bose_einstein(1e-4, w).unwrap(), 0.0);
    }

    #[test]
    fn single_attenuator_limits() {
        let w = 2.0 * PI * 6e9;
        let n_ext = bose_einstein(300.0, w).unwrap();
        assert_eq!(single_attenuator_occupancy(1.0, 0.02, 300.0, w).unwrap(), n_ext);
        let n_inf = single_attenuator_occupancy(f64::INFINITY, 0.5, 300.0, w).unwrap();
        assert_eq!(n_inf, bose_einstein(0.5, w).unwrap());
        let n = single_attenuator_occupancy(1e3, 0.02, 300.0, w).unwrap();
        assert!((n_ext - 1041.0).abs() < 1.0);
        assert!((n - 1.04).abs() < 0.01);
        assert!(single_attenuator_occupancy(0.5, 0.02, 300.0, w).is_err());
    }

    #[test]
    fn chain_rejects_bad_layouts() {
        let w = 2.0 * PI * 6e9;
        assert!(chain_occupancy_from(&[1.0, 0.5], &[10.0], w).is_err());
        assert!(chain_occupancy_from(&[0.1, 1.0, 2.0], &[10.0, 5.0], w).is_err());
        assert!(chain_occupancy_from(&[0.1], &[], w).is_err());
        assert_eq!(chain_occupancy_from(&[0.0, 0.0, 0.0], &[3.0, 9.0], w).unwrap(), 0.0);
    }

    #[test]
    fn two_stage_chain_is_single_attenuator() {
        let w = 2.0 * PI * 6e9;
        for &(a, t) in &[(1.0, 0.01), (37.0, 0.2), (1e6, 1.3)] {
            let c = chain_occupancy_from(&[t, 300.0], &[a], w).unwrap();
            let s = single_attenuator_occupancy(a, t, 300.0, w).unwrap();
            assert!((c - s).abs() <= 1e-12 * s.max(1e-300));
        }
    }

    #[test]
    fn infidelity_and_pauli_anchors() {
        let t = tech_ms(1.0);
        let inf = worst_case_infidelity_1qb(&t, 0.0).unwrap();
        assert!((inf - 2.5e-5).abs() < 1e-18);
        let p = pauli_error_probability(&tech_ms(50.0), 0.0).unwrap();
        assert!((p.value - 5e-7).abs() < 1e-20);
        assert!(!p.clamped);
        let p3 = pauli_error_probability(&tech_ms(3.0), 0.0).unwrap();
        assert!((p3.value / 2e-5 - 0.4167).abs() < 1e-3);
        let huge = pauli_error_probability(&t, 1e9).unwrap();
        assert_eq!(huge.value, 1.0);
        assert!(huge.clamped);
    }

    #[test]
    fn noiseless_target_fixes_gate_time() {
        let m0 = 0.999;
        let t = tech_ms(1.0);
        let tau = (1.0 - m0) / t.gamma;
        let tuned = QubitTechnology { tau_1qb: tau, ..t };
        let inf = worst_case_infidelity_1qb(&tuned, 0.0).unwrap();
        assert!((1.0 - inf - m0).abs() < 1e-15);
    }

    #[test]
    fn occupancy_inverse_round_trips() {
        let t = tech_ms(20.0);
        for &n in &[0.0, 0.3, 12.0] {
            let p = pauli_error_raw(&t, n);
            assert!((occupancy_for_pauli_error(&t, p) - n).abs() < 1e-9);
        }
    }

    #[test]
    fn technology_validation() {
        assert!(QubitTechnology::new(1.0, -1.0, 1.0, 1.0, 1.0).is_err());
        let t = QubitTechnology::new(1.0, 1.0, 3.0, 2.0, 1.0).unwrap();
        assert_eq!(t.tau_step, 3.0);
        let d = QubitTechnology::default();
        assert_eq!(d.tau_step, 100e-9);
        assert!(d.tau_1qb <= d.tau_step);
    }
}
