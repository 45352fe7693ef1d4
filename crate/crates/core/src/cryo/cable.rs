//! Heat conducted down the drive and readout lines between stages.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Stainless-steel conductivity fit, log10(lambda) as a polynomial in log10(T).
pub const STEEL_FIT: [f64; 9] = [
    -1.4087, 1.3982, 0.2543, -0.6260, 0.2334, 0.4256, -0.4658, 0.1650, -0.0199,
];

/// Power law `prefactor * T^exponent` for the dielectric below 10 K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub prefactor: f64,
    pub exponent: f64,
}

impl PowerLaw {
    pub fn eval(&self, t: f64) -> f64 {
        self.prefactor * t.powf(self.exponent)
    }

    /// Closed-form integral over [a, b].
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let e = self.exponent + 1.0;
        self.prefactor * (b.powf(e) - a.powf(e)) / e
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableModel {
    /// Cable length between neighbouring stages (m).
    pub length_m: f64,
    /// Conducting cross-section of the coax above 10 K (m^2).
    pub area_hi: f64,
    /// Cross-section of the microstrip dielectric below 10 K (m^2).
    pub area_lo: f64,
    pub steel_fit: [f64; 9],
    /// Dielectric conductivity below 4 K.
    pub kapton_low: PowerLaw,
    /// Dielectric conductivity between 4 K and 10 K.
    pub kapton_mid: PowerLaw,
    pub control_lines_per_qubit: f64,
    pub readout_lines_per_qubit: f64,
}

impl Default for CableModel {
    fn default() -> Self {
        CableModel {
            length_m: 1.0,
            area_hi: 2.7e-7,
            area_lo: 1.3e-9,
            steel_fit: STEEL_FIT,
            kapton_low: PowerLaw {
                prefactor: 4.6,
                exponent: 0.56,
            },
            kapton_mid: PowerLaw {
                prefactor: 3.0,
                exponent: 0.98,
            },
            control_lines_per_qubit: 1.0 / 25.0,
            readout_lines_per_qubit: 1.0 / 100.0,
        }
    }
}

pub const KAPTON_SPLIT_K: f64 = 4.0;
pub const MATERIAL_SPLIT_K: f64 = 10.0;
const QUAD_ABS_TOL: f64 = 1e-15;
const QUAD_REL_TOL: f64 = 1e-13;
const QUAD_MAX_DEPTH: u32 = 60;

impl CableModel {
    /// Thermal conductivity (W/m/K) of the conducting material at `t`.
    pub fn conductivity(&self, t: f64) -> f64 {
        if t > MATERIAL_SPLIT_K {
            self.steel_conductivity(t)
        } else if t < KAPTON_SPLIT_K {
            self.kapton_low.eval(t)
        } else {
            self.kapton_mid.eval(t)
        }
    }

    pub fn steel_conductivity(&self, t: f64) -> f64 {
        let x = t.log10();
        let log_lambda = self.steel_fit.iter().rev().fold(0.0, |acc, &a| acc * x + a);
        10f64.powf(log_lambda)
    }

    pub fn area(&self, t: f64) -> f64 {
        if t > MATERIAL_SPLIT_K {
            self.area_hi
        } else {
            self.area_lo
        }
    }

    pub fn lines_per_qubit(&self) -> f64 {
        self.control_lines_per_qubit + self.readout_lines_per_qubit
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_m > 0.0 && self.area_hi > 0.0 && self.area_lo > 0.0) {
            return domain("cable length and cross-sections must be positive");
        }
        if self.control_lines_per_qubit < 0.0 || self.readout_lines_per_qubit < 0.0 {
            return domain("lines per qubit must be non-negative");
        }
        Ok(())
    }
}

/// Heat flow (W) carried by one cable between `t_low` and `t_high`.
pub fn cable_heat_flow(t_low: f64, t_high: f64, cable: &CableModel) -> Result<f64> {
    if !(t_low >= 0.0) || !(t_high >= t_low) {
        return domain(format!(
            "cable span needs 0 <= t_low <= t_high, got [{t_low}, {t_high}]"
        ));
    }
    if !(t_high <= 300.0) {
        return domain(format!("conductivity fits stop at 300 K, got {t_high}"));
    }
    Ok(conducted_heat(t_low, t_high, cable))
}

/// Heat flow per physical qubit between two stages.
pub fn conducted_heat_per_qubit(t_low: f64, t_high: f64, cable: &CableModel) -> Result<f64> {
    Ok(cable_heat_flow(t_low, t_high, cable)? * cable.lines_per_qubit())
}

pub(crate) fn conducted_heat(t_low: f64, t_high: f64, cable: &CableModel) -> f64 {
    if t_high <= t_low {
        return 0.0;
    }
    let mut cuts = vec![t_low];
    for split in [KAPTON_SPLIT_K, MATERIAL_SPLIT_K] {
        if t_low < split && split < t_high {
            cuts.push(split);
        }
    }
    cuts.push(t_high);
    let total: f64 = cuts
        .windows(2)
        .map(|w| {
            // pick the material law from the piece midpoint so endpoints never flip branch
            let (a, b) = (w[0], w[1]);
            let mid = 0.5 * (a + b);
            let area = cable.area(mid);
            if mid > MATERIAL_SPLIT_K {
                adaptive_simpson(&|t: f64| area * cable.steel_conductivity(t), a, b)
            } else if mid < KAPTON_SPLIT_K {
                adaptive_simpson(&|t: f64| area * cable.kapton_low.eval(t), a, b)
            } else {
                adaptive_simpson(&|t: f64| area * cable.kapton_mid.eval(t), a, b)
            }
        })
        .sum();
    total / cable.length_m
}

/// Adaptive Simpson quadrature with a mixed absolute/relative tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = QUAD_ABS_TOL.min(QUAD_REL_TOL * whole.abs()).max(1e-300);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, QUAD_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_span_is_zero() {
        let c = CableModel::default();
        assert_eq!(cable_heat_flow(5.0, 5.0, &c).unwrap(), 0.0);
        assert!(cable_heat_flow(5.0, 4.0, &c).is_err());
        assert!(cable_heat_flow(-1.0, 4.0, &c).is_err());
    }

    #[test]
    fn low_segment_matches_power_law() {
        let c = CableModel::default();
        let q = cable_heat_flow(0.0, 4.0, &c).unwrap();
        let exact = 1.3e-9 * 4.6 * 4f64.powf(1.56) / 1.56;
        assert!((q / exact - 1.0).abs() < 1e-10, "{q} vs {exact}");
        assert!((q - 3.3e-8).abs() < 0.1e-8);
    }

    #[test]
    fn mid_segment_matches_power_law() {
        let c = CableModel::default();
        let q = cable_heat_flow(4.0, 10.0, &c).unwrap();
        let exact = 1.3e-9 * c.kapton_mid.integral(4.0, 10.0);
        assert!((q / exact - 1.0).abs() < 1e-10);
    }

    #[test]
    fn full_span_is_about_a_milliwatt() {
        let c = CableModel::default();
        let q = cable_heat_flow(0.0, 300.0, &c).unwrap();
        assert!(q > 3e-4 && q < 3e-3, "{q}");
    }

    #[test]
    fn steel_fit_is_positive_and_rising() {
        let c = CableModel::default();
        let mut prev = 0.0;
        for t in [10.5, 20.0, 50.0, 100.0, 200.0, 300.0] {
            let l = c.conductivity(t);
            assert!(l > prev);
            prev = l;
        }
        // published stainless-steel 304 value near room temperature is ~15 W/m/K
        assert!((c.conductivity(300.0) - 15.0).abs() < 2.0);
    }

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        let v = adaptive_simpson(&|x: f64| 3.0 * x * x + 1.0, 0.0, 2.0);
        assert!((v - 10.0).abs() < 1e-13);
    }
}
