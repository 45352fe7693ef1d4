//! Concatenated 7-qubit code: logical errors, physical counts and full-stack power.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const P_THRESHOLD: f64 = 2e-5;
/// Physical qubits per logical qubit per level: 7 data plus 3 ancilla blocks of 28.
pub const QUBIT_BLOWUP_BASE: u64 = 91;
/// Dominant eigenvalue of the gate transfer matrix.
pub const GATE_EIGENVALUE: u64 = 64;
/// Normalization of the dominant eigenvector.
pub const RECTANGULAR_NORM: f64 = 185.0;
/// Dominant eigenvector components for (2qb, 1qb, id, meas).
pub const RECTANGULAR_WEIGHTS: [f64; 4] = [64.0, 28.0, 29.0, 28.0];
pub const MAX_T_GATE_MULTIPLIER: f64 = 10.0;

/// Numerators of the transfer matrix, all over a common denominator of 3.
///
/// Rows give physical (2qb, 1qb, id, meas) counts per time step produced by one
/// logical (2qb, 1qb, id, meas) operation in the corresponding column.
pub const TRANSFER_NUMERATORS: [[i64; 4]; 4] = [
    [135, 64, 64, 0],
    [56, 35, 28, 0],
    [58, 29, 36, 0],
    [56, 28, 28, 7],
];
pub const TRANSFER_DENOMINATOR: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeParameters {
    pub p_thr: f64,
    /// Factor on dynamic power accounting for T gates, in [1, 10].
    pub t_gate_multiplier: f64,
}

impl Default for CodeParameters {
    fn default() -> Self {
        CodeParameters {
            p_thr: P_THRESHOLD,
            t_gate_multiplier: 1.0,
        }
    }
}

impl CodeParameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_thr > 0.0 && self.p_thr < 1.0) {
            return Err(Error::Domain(format!("threshold must lie in (0,1), got {}", self.p_thr)));
        }
        if !(1.0..=MAX_T_GATE_MULTIPLIER).contains(&self.t_gate_multiplier) {
            return Err(Error::Domain(format!(
                "T-gate multiplier must lie in [1, {MAX_T_GATE_MULTIPLIER}], got {}",
                self.t_gate_multiplier
            )));
        }
        Ok(())
    }
}

/// Logical operations running in parallel during one logical time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LogicalGateCounts {
    pub n_2qb: u64,
    pub n_1qb: u64,
    pub n_id: u64,
    pub n_meas: u64,
}

impl LogicalGateCounts {
    /// A rectangular step: every logical qubit idles.
    pub fn idle(q_logical: u64) -> Self {
        LogicalGateCounts {
            n_id: q_logical,
            ..Default::default()
        }
    }

    pub fn as_array(&self) -> [u64; 4] {
        [self.n_2qb, self.n_1qb, self.n_id, self.n_meas]
    }

    /// Logical qubits occupied.
    pub fn qubits(&self) -> u64 {
        2 * self.n_2qb + self.n_1qb + self.n_id
    }
}

/// Exact physical operation counts (2qb, 1qb, id, meas) per physical time step.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalGateCounts {
    pub exact: [BigRational; 4],
}

impl PhysicalGateCounts {
    pub fn to_f64(&self) -> [f64; 4] {
        std::array::from_fn(|i| ratio_to_f64(&self.exact[i]))
    }

    /// Counts rounded to integers, ties to even.
    pub fn rounded(&self) -> [BigInt; 4] {
        std::array::from_fn(|i| round_half_even(&self.exact[i]))
    }
}

pub fn transfer_matrix() -> [[BigRational; 4]; 4] {
    let d = BigInt::from(TRANSFER_DENOMINATOR);
    std::array::from_fn(|r| {
        std::array::from_fn(|c| BigRational::new(BigInt::from(TRANSFER_NUMERATORS[r][c]), d.clone()))
    })
}

/// Physical counts after `k` levels, using exact rational arithmetic.
pub fn physical_gate_counts_exact(logical: &LogicalGateCounts, k: u32) -> PhysicalGateCounts {
    let m = transfer_matrix();
    let mut v: [BigRational; 4] =
        std::array::from_fn(|i| BigRational::from_integer(BigInt::from(logical.as_array()[i])));
    for _ in 0..k {
        v = std::array::from_fn(|r| {
            (0..4).fold(BigRational::zero(), |acc, c| acc + &m[r][c] * &v[c])
        });
    }
    PhysicalGateCounts { exact: v }
}

/// Dominant-eigenvector approximation for a rectangular step of `q_logical` qubits.
pub fn physical_gate_counts_rectangular(q_logical: f64, k: u32) -> [f64; 4] {
    let scale = (GATE_EIGENVALUE as f64).powi(k as i32) * q_logical / RECTANGULAR_NORM;
    RECTANGULAR_WEIGHTS.map(|w| w * scale)
}

/// Error probability per logical qubit per logical step after `k` levels.
pub fn logical_error_probability(p_err: f64, k: u32, p_thr: f64) -> f64 {
    if k == 0 {
        return p_err;
    }
    p_thr * (p_err / p_thr).powf(2f64.powi(k as i32))
}

pub fn physical_qubits(q_logical: f64, k: u32) -> f64 {
    q_logical * (QUBIT_BLOWUP_BASE as f64).powi(k as i32)
}

pub fn physical_qubits_exact(q_logical: u64, k: u32) -> BigUint {
    BigUint::from(QUBIT_BLOWUP_BASE).pow(k) * BigUint::from(q_logical)
}

/// Physical measurements per clock period per physical qubit.
pub fn measurements_per_physical_qubit(k: u32) -> f64 {
    physical_gate_counts_rectangular(1.0, k)[3] / physical_qubits(1.0, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricForm {
    /// `1 - N_L p_L`, clamped below at zero.
    #[default]
    Linear,
    /// `(1 - p_L)^N_L`.
    Exact,
}

/// Success metric of a rectangular computation with `n_logical` error locations.
pub fn ft_metric(p_err: f64, k: u32, n_logical: f64, form: MetricForm, p_thr: f64) -> f64 {
    if n_logical <= 0.0 {
        return 1.0;
    }
    let p_l = logical_error_probability(p_err, k, p_thr);
    match form {
        MetricForm::Linear => (1.0 - n_logical * p_l).max(0.0),
        MetricForm::Exact => {
            let p = p_l.clamp(0.0, 1.0);
            if p >= 1.0 {
                0.0
            } else {
                (n_logical * (-p).ln_1p()).exp()
            }
        }
    }
}

/// Largest logical error probability meeting metric `m0` (infinite when unconstrained).
pub fn max_logical_error(n_logical: f64, m0: f64, form: MetricForm) -> f64 {
    if m0 <= 0.0 || n_logical <= 0.0 {
        return f64::INFINITY;
    }
    if m0 > 1.0 {
        return -1.0;
    }
    match form {
        MetricForm::Linear => (1.0 - m0) / n_logical,
        MetricForm::Exact => -(m0.ln() / n_logical).exp_m1(),
    }
}

/// Largest physical error probability meeting metric `m0` at level `k`.
pub fn max_physical_error(n_logical: f64, m0: f64, k: u32, form: MetricForm, p_thr: f64) -> f64 {
    let p_l = max_logical_error(n_logical, m0, form);
    if p_l.is_infinite() || p_l < 0.0 {
        return p_l;
    }
    if k == 0 {
        return p_l;
    }
    p_thr * (p_l / p_thr).powf(0.5f64.powi(k as i32))
}

/// Full-stack power of a rectangular computation.
pub fn ft_power(
    q_logical: f64,
    k: u32,
    p_2qb: f64,
    p_1qb: f64,
    p_meas: f64,
    p_static: f64,
    code: &CodeParameters,
) -> f64 {
    q_logical * (dynamic_weight(k) * (16.0 * p_2qb + 7.0 * p_1qb + 7.0 * p_meas) * code.t_gate_multiplier
        + physical_qubits(1.0, k) * p_static)
}

/// Common factor `4 * 64^k / 185` of the dynamic bracket.
pub fn dynamic_weight(k: u32) -> f64 {
    4.0 * (GATE_EIGENVALUE as f64).powi(k as i32) / RECTANGULAR_NORM
}

/// Smallest level whose metric reaches `m0`.
pub fn required_concatenation(
    p_err: f64,
    n_logical: f64,
    m0: f64,
    form: MetricForm,
    p_thr: f64,
    k_max: u32,
) -> Result<u32> {
    for k in 0..=k_max {
        if ft_metric(p_err, k, n_logical, form, p_thr) >= m0 {
            return Ok(k);
        }
    }
    if p_err >= p_thr {
        Err(Error::AboveThreshold { p_err, p_thr })
    } else {
        Err(Error::Unreachable { k_max })
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge operands before dividing
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub(crate) fn round_half_even(r: &BigRational) -> BigInt {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    let twice: BigInt = &rem * BigInt::from(2);
    match twice.cmp(r.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn blowup_identity() {
        assert_eq!(QUBIT_BLOWUP_BASE, 7 + 3 * 28);
        assert_eq!(physical_qubits(6175.0, 0), 6175.0);
        assert_eq!(physical_qubits_exact(1, 2), BigUint::from(8281u32));
        let p3 = physical_qubits(6175.0, 3);
        assert!((p3 / 4.6e9 - 1.0).abs() < 0.02);
    }

    #[test]
    fn logical_error_anchors() {
        for k in 0..5 {
            assert!((logical_error_probability(P_THRESHOLD, k, P_THRESHOLD) - P_THRESHOLD).abs() < 1e-20);
        }
        assert_eq!(logical_error_probability(3e-6, 0, P_THRESHOLD), 3e-6);
        let v = logical_error_probability(P_THRESHOLD / 40.0, 2, P_THRESHOLD);
        assert!((v / 7.8125e-12 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_counts_identity_and_column() {
        let l = LogicalGateCounts {
            n_2qb: 3,
            n_1qb: 1,
            n_id: 4,
            n_meas: 2,
        };
        let c0 = physical_gate_counts_exact(&l, 0);
        assert_eq!(c0.to_f64(), [3.0, 1.0, 4.0, 2.0]);
        let one = LogicalGateCounts {
            n_2qb: 1,
            ..Default::default()
        };
        let c1 = physical_gate_counts_exact(&one, 1);
        assert_eq!(c1.exact[1], q(56, 3));
        assert_eq!(c1.exact[0], q(45, 1));
        assert_eq!(c1.rounded()[1], BigInt::from(19));
    }

    #[test]
    fn logical_id_over_three_steps() {
        let c = physical_gate_counts_exact(&LogicalGateCounts::idle(1), 1);
        let three: Vec<BigRational> = c.exact.iter().map(|x| x * BigInt::from(3)).collect();
        assert_eq!(three, vec![q(64, 1), q(28, 1), q(36, 1), q(28, 1)]);
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(round_half_even(&q(5, 2)), BigInt::from(2));
        assert_eq!(round_half_even(&q(7, 2)), BigInt::from(4));
        assert_eq!(round_half_even(&q(-5, 2)), BigInt::from(-2));
        assert_eq!(round_half_even(&q(10, 3)), BigInt::from(3));
        assert_eq!(round_half_even(&q(11, 3)), BigInt::from(4));
    }

    #[test]
    fn high_levels_stay_exact() {
        let c = physical_gate_counts_exact(&LogicalGateCounts::idle(1), 20);
        assert!(c.exact.iter().all(|x| !x.is_negative()));
        let approx = physical_gate_counts_rectangular(1.0, 20);
        for (e, a) in c.to_f64().iter().zip(approx) {
            assert!((e / a - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rectangular_coefficients() {
        let r = physical_gate_counts_rectangular(185.0, 1);
        assert_eq!(r[0], 4096.0);
        let s = physical_gate_counts_rectangular(1.0, 3);
        assert!((2.0 * s[0] + s[1] + s[2] - 64f64.powi(3)).abs() < 1e-9);
    }

    #[test]
    fn metric_forms() {
        assert_eq!(ft_metric(0.1, 1, 0.0, MetricForm::Linear, P_THRESHOLD), 1.0);
        let p = P_THRESHOLD / 40.0;
        let n_l = 6190.0 * 2.1e9;
        assert!(ft_metric(p, 3, n_l, MetricForm::Linear, P_THRESHOLD) >= 2.0 / 3.0);
        assert_eq!(ft_metric(p, 2, n_l, MetricForm::Linear, P_THRESHOLD), 0.0);
        let lin = ft_metric(p, 3, n_l, MetricForm::Linear, P_THRESHOLD);
        let ex = ft_metric(p, 3, n_l, MetricForm::Exact, P_THRESHOLD);
        assert!(lin <= ex);
    }

    #[test]
    fn max_error_inverts_metric() {
        for form in [MetricForm::Linear, MetricForm::Exact] {
            for k in 0..4 {
                let n_l = 1e9;
                let p = max_physical_error(n_l, 2.0 / 3.0, k, form, P_THRESHOLD);
                let m = ft_metric(p, k, n_l, form, P_THRESHOLD);
                assert!((m - 2.0 / 3.0).abs() < 1e-9, "{form:?} k={k} m={m}");
            }
        }
    }

    #[test]
    fn power_formula() {
        let code = CodeParameters::default();
        assert_eq!(ft_power(10.0, 2, 0.0, 0.0, 0.0, 1e-3, &code), 10.0 * 8281.0 * 1e-3);
        assert!((4.0 * 16.0 / 185.0 - 64.0 / 185.0).abs() < 1e-15);
        assert!((4.0 * 7.0 / 185.0 - 28.0 / 185.0).abs() < 1e-15);
        let base = ft_power(1.0, 1, 1.0, 0.25, 0.0, 0.0, &code);
        let tripled = ft_power(1.0, 1, 1.0, 0.25, 0.0, 0.0, &CodeParameters { t_gate_multiplier: 3.0, ..code });
        assert!((tripled / base - 3.0).abs() < 1e-12);
        assert!(CodeParameters { t_gate_multiplier: 11.0, ..code }.validate().is_err());
    }

    #[test]
    fn required_level() {
        let p = P_THRESHOLD / 40.0;
        let n_l = 6190.0 * 2.1e9;
        assert_eq!(required_concatenation(p, n_l, 2.0 / 3.0, MetricForm::Linear, P_THRESHOLD, 6).unwrap(), 3);
        assert_eq!(required_concatenation(p, 1.0, 2.0 / 3.0, MetricForm::Linear, P_THRESHOLD, 6).unwrap(), 0);
        let err = required_concatenation(2.0 * P_THRESHOLD, n_l, 2.0 / 3.0, MetricForm::Linear, P_THRESHOLD, 6);
        assert!(matches!(err, Err(Error::AboveThreshold { .. })));
    }
}
