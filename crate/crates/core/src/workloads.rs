//! Workloads: rectangular logical computations, RSA instances, the compressible
//! NISQ circuit and the classical number-field-sieve baseline.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A rectangular logical computation: `q_logical` qubits for `d_logical` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub label: String,
    pub q_logical: u64,
    pub d_logical: u64,
}

impl Workload {
    pub fn rectangular(label: impl Into<String>, q_logical: u64, d_logical: u64) -> Result<Self> {
        if q_logical < 1 || d_logical < 1 {
            return domain("logical width and depth must be at least 1");
        }
        Ok(Workload {
            label: label.into(),
            q_logical,
            d_logical,
        })
    }

    /// Number of logical error locations.
    pub fn n_logical(&self) -> f64 {
        self.q_logical as f64 * self.d_logical as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RsaVariant {
    /// Fewer-step construction with about 3n qubits.
    Gidney,
    /// Fewer-qubit construction with 2n+2 qubits and cubic depth.
    Haner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Two,
    Natural,
}

impl LogBase {
    pub fn log(&self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::Natural => x.ln(),
        }
    }
}

/// Logical resources to factor an `n`-bit RSA modulus.
///
/// `log_base` selects the logarithm in the qubit-count correction of the
/// Gidney construction; depth always uses log2.
pub fn rsa_workload(n: u32, variant: RsaVariant, log_base: LogBase) -> Result<Workload> {
    if n < 16 {
        return domain(format!("RSA key size must be at least 16 bits, got {n}"));
    }
    let nf = n as f64;
    let (q, d) = match variant {
        RsaVariant::Gidney => (
            3.0 * nf + 0.002 * nf * log_base.log(nf),
            500.0 * nf * nf + nf * nf * nf.log2(),
        ),
        RsaVariant::Haner => (2.0 * nf + 2.0, 52.0 * nf * nf * nf),
    };
    let label = match variant {
        RsaVariant::Gidney => format!("rsa-{n}-gidney"),
        RsaVariant::Haner => format!("rsa-{n}-haner"),
    };
    Ok(Workload {
        label,
        q_logical: ceil_count(q),
        d_logical: ceil_count(d),
    })
}

fn ceil_count(x: f64) -> u64 {
    // tolerate representation error on values that are integers in exact arithmetic
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// The all-pairs two-qubit circuit on `q` qubits with `m` overlapped sub-circuits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NisqCircuit {
    pub q: u32,
    pub m: u32,
    /// Depth after compression; interpolated linearly in `m`, so it may be fractional.
    pub depth: f64,
    pub n_2qb_total: f64,
    pub n_1qb_total: f64,
    pub n_id_total: f64,
}

impl NisqCircuit {
    /// Compression `m / (q - 1)`.
    pub fn epsilon(&self) -> f64 {
        self.m as f64 / (self.q as f64 - 1.0)
    }

    pub fn max_m(&self) -> u32 {
        self.q - 3
    }

    pub fn n_2qb_avg(&self) -> f64 {
        self.n_2qb_total / self.depth
    }

    pub fn n_1qb_avg(&self) -> f64 {
        self.n_1qb_total / self.depth
    }

    pub fn n_id_avg(&self) -> f64 {
        self.n_id_total / self.depth
    }

    /// Infidelity-weighted gate count; a two-qubit gate counts twice.
    pub fn weighted_gates(&self) -> f64 {
        self.n_id_total + self.n_1qb_total + 2.0 * self.n_2qb_total
    }
}

pub fn nisq_circuit(q: u32, m: u32) -> Result<NisqCircuit> {
    if q < 3 {
        return domain(format!("circuit needs at least 3 qubits, got {q}"));
    }
    if m > q - 3 {
        return domain(format!("compression index must lie in [0, {}], got {m}", q - 3));
    }
    let qf = q as f64;
    let sequential = qf * (qf - 1.0) / 2.0;
    let compressed = 2.0 * qf - 3.0;
    let depth = if q == 3 {
        sequential
    } else {
        sequential - m as f64 * (sequential - compressed) / (qf - 3.0)
    };
    Ok(NisqCircuit {
        q,
        m,
        depth,
        n_2qb_total: sequential,
        n_1qb_total: 0.0,
        n_id_total: qf * depth - 2.0 * sequential,
    })
}

/// Circuit metric: one minus the summed gate infidelities, clamped at zero.
pub fn nisq_metric(circuit: &NisqCircuit, if_1qb: f64) -> f64 {
    (1.0 - circuit.weighted_gates() * if_1qb).max(0.0)
}

/// Cooling power averaged over the circuit, with two-qubit gates at a quarter of
/// the single-qubit gate power and idling free.
pub fn nisq_power(circuit: &NisqCircuit, p_1qb: f64) -> f64 {
    p_1qb * nisq_power_factor(circuit)
}

pub(crate) fn nisq_power_factor(circuit: &NisqCircuit) -> f64 {
    circuit.n_1qb_avg() + circuit.n_2qb_avg() / 4.0
}

pub const GNFS_ANCHOR_BITS: u32 = 830;
pub const GNFS_ANCHOR_ENERGY_J: f64 = 1e12;
pub const GNFS_ANCHOR_DURATION_S: f64 = 8.5 * 86_400.0;

/// Natural log of the heuristic number-field-sieve operation count.
pub fn gnfs_log_operations(n: u32) -> f64 {
    let x = n as f64 * LN_2;
    (64.0 * x / 9.0 * x.ln().powi(2)).cbrt()
}

pub fn gnfs_operations(n: u32) -> f64 {
    gnfs_log_operations(n).exp()
}

/// Energy (J) and wall time (s) of classical factoring, scaled from the 830-bit record.
pub fn classical_energy_time(n: u32) -> (f64, f64) {
    let ratio = (gnfs_log_operations(n) - gnfs_log_operations(GNFS_ANCHOR_BITS)).exp();
    (GNFS_ANCHOR_ENERGY_J * ratio, GNFS_ANCHOR_DURATION_S * ratio)
}
