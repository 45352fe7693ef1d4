//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{Complex, Matrix2};

type C = Complex<f64>;
type M = Matrix2<C>;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn dissipator(l: &M, rho: &M) -> M {
    let ld = l.adjoint();
    let ldl = ld * l;
    l * rho * ld - (ldl * rho + rho * ldl) * c(0.5)
}

/// Worst-case infidelity of the thermal emission channel over one gate time,
/// found by integrating the master equation with RK4 (step tau/1000) and
/// scanning pure inputs on a 32 x 64 Bloch-sphere grid.
pub fn lindblad_worst_infidelity(gamma_tau: f64, n_noise: f64) -> f64 {
    // basis order (ground, excited); lowering operator |g><e|
    let lower = M::new(c(0.0), c(1.0), c(0.0), c(0.0));
    let raise = lower.adjoint();
    let down = gamma_tau * (n_noise + 1.0);
    let up = gamma_tau * n_noise;
    let rhs = |rho: &M| dissipator(&lower, rho) * c(down) + dissipator(&raise, rho) * c(up);

    let steps = 1000;
    let dt = c(1.0 / steps as f64);
    let half = c(0.5);
    let sixth = c(1.0 / 6.0);
    let two = c(2.0);
    let propagate = |mut rho: M| {
        for _ in 0..steps {
            let k1 = rhs(&rho);
            let k2 = rhs(&(rho + k1 * dt * half));
            let k3 = rhs(&(rho + k2 * dt * half));
            let k4 = rhs(&(rho + k3 * dt));
            rho += (k1 + k2 * two + k3 * two + k4) * dt * sixth;
        }
        rho
    };
    let mut images = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let mut e = M::zeros();
            e[(i, j)] = c(1.0);
            images.push(propagate(e));
        }
    }

    let mut worst: f64 = 0.0;
    for it in 0..32 {
        let theta = std::f64::consts::PI * it as f64 / 31.0;
        for ip in 0..64 {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / 64.0;
            let psi = [c((theta / 2.0).cos()), C::from_polar((theta / 2.0).sin(), phi)];
            let mut out = M::zeros();
            for i in 0..2 {
                for j in 0..2 {
                    out += images[2 * i + j] * (psi[i] * psi[j].conj());
                }
            }
            let mut overlap = c(0.0);
            for i in 0..2 {
                for j in 0..2 {
                    overlap += psi[i].conj() * out[(i, j)] * psi[j];
                }
            }
            worst = worst.max(1.0 - overlap.re);
        }
    }
    worst
}

/// Composite Simpson rule on a fixed uniform grid.
pub fn simpson_uniform<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}
