//! Room-temperature readout costs: demodulation, syndrome decoding, optical links.

use serde::{Deserialize, Serialize};

use crate::code::measurements_per_physical_qubit;
use crate::noise::QubitTechnology;

/// Energy of one floating-point operation at room temperature (J).
pub const FLOAT_OP_ENERGY_J: f64 = 0.85e-12;
/// Samples taken per measurement trace.
pub const SAMPLES_PER_MEASUREMENT: f64 = 100.0;
/// Bits per encoded sample.
pub const BITS_PER_SAMPLE: f64 = 14.0;
/// Capacity of one optical fiber (bit/s).
pub const FIBER_CAPACITY_BPS: f64 = 4e11;

/// Measurement drive power; neglected against gate power.
pub fn measurement_power() -> f64 {
    0.0
}

/// Rough drive power of one measurement: a hundred photons per measurement
/// time, amplified a hundredfold.
pub fn measurement_power_diagnostic(tech: &QubitTechnology) -> f64 {
    100.0 * (tech.photon_energy() / tech.tau_meas) * 100.0
}

/// Demodulation cost per physical qubit at concatenation level `k`.
pub fn demodulation_power_per_qubit(k: u32, tech: &QubitTechnology) -> f64 {
    2.0 * SAMPLES_PER_MEASUREMENT * measurements_per_physical_qubit(k) / tech.tau_step
        * FLOAT_OP_ENERGY_J
}

/// Pessimistic syndrome decoding cost per physical qubit.
pub fn syndrome_power_per_qubit(tech: &QubitTechnology) -> f64 {
    FLOAT_OP_ENERGY_J / tech.tau_step
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberLink {
    pub bitrate_bps: f64,
    pub qubits_per_fiber: u64,
}

/// Readout bit-rate per physical qubit and how many qubits share one fiber.
pub fn fiber_bitrate_per_qubit(k: u32, tech: &QubitTechnology) -> FiberLink {
    let rate = BITS_PER_SAMPLE * SAMPLES_PER_MEASUREMENT / tech.tau_step
        * measurements_per_physical_qubit(k);
    FiberLink {
        bitrate_bps: rate,
        qubits_per_fiber: (FIBER_CAPACITY_BPS / rate).floor() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::pi_pulse_power;

    #[test]
    fn measurement_drive_estimate() {
        let t = QubitTechnology::default();
        assert_eq!(measurement_power(), 0.0);
        let d = measurement_power_diagnostic(&t);
        assert!((d - 4e-13).abs() < 0.1e-13);
        for ms in [3.0, 10.0, 100.0] {
            let tt = t.with_gamma_inverse(ms * 1e-3);
            let p = pi_pulse_power(&tt, tt.tau_1qb).unwrap();
            assert!(d / p <= 1.0 / 40.0);
        }
    }

    #[test]
    fn demodulation_values() {
        let t = QubitTechnology::default();
        let k1 = demodulation_power_per_qubit(1, &t);
        assert!(k1 > 150e-6 && k1 < 210e-6, "{k1}");
        let k2 = demodulation_power_per_qubit(2, &t);
        assert!(((k2 / k1) - 64.0 / 91.0).abs() < 1e-12);
        for k in 1..6 {
            assert!(demodulation_power_per_qubit(k + 1, &t) < demodulation_power_per_qubit(k, &t));
        }
    }

    #[test]
    fn syndrome_values() {
        let t = QubitTechnology::default();
        let s = syndrome_power_per_qubit(&t);
        assert!((s - 8.5e-6).abs() < 1e-12);
        assert!(s / 1e-3 < 1e-2);
        let slow = QubitTechnology { tau_step: 200e-9, ..t };
        assert!((syndrome_power_per_qubit(&slow) * 2.0 - s).abs() < 1e-18);
    }

    #[test]
    fn fiber_values() {
        let t = QubitTechnology::default();
        let f1 = fiber_bitrate_per_qubit(1, &t);
        assert!(f1.bitrate_bps <= 1.5e9);
        assert!((f1.qubits_per_fiber as f64 - 270.0).abs() < 10.0);
        for k in 2..7 {
            assert!(fiber_bitrate_per_qubit(k, &t).bitrate_bps < f1.bitrate_bps);
        }
    }
}
