//! Log-spaced grids and local pattern refinement.

use serde::{Deserialize, Serialize};

const MAX_RECENTERS: usize = 200;
const BOUND_SLACK: f64 = 1e-12;

/// Points evenly spaced in log10 between `lo` and `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl LogGrid {
    /// Grid with at least `per_decade` points per decade.
    pub fn per_decade(lo: f64, hi: f64, per_decade: f64) -> Self {
        let decades = (hi / lo).log10();
        let points = if decades <= 0.0 {
            1
        } else {
            (decades * per_decade - 1e-9).ceil().max(1.0) as usize + 1
        };
        LogGrid { lo, hi, points }
    }

    pub fn step_log10(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            (self.hi / self.lo).log10() / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points < 2 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.log10(), self.hi.log10());
        let n = (self.points - 1) as f64;
        let mut v: Vec<f64> = (0..self.points)
            .map(|i| 10f64.powf(a + (b - a) * i as f64 / n))
            .collect();
        v[0] = self.lo;
        v[self.points - 1] = self.hi;
        v
    }
}

/// Refines `incumbent` by repeated local window searches in log10 coordinates.
///
/// Each pass divides the step by `factor` and scans a window reaching one
/// previous step in every direction. When the best point lands on the window
/// edge and the domain continues, the window is recentred and scanned again,
/// so the result always has its evaluated neighbours on both sides.
#[allow(clippy::too_many_arguments)]
pub(crate) fn refine<const D: usize, C, X, E, B>(
    incumbent: C,
    coords: X,
    mut step: [f64; D],
    lo: [f64; D],
    hi: [f64; D],
    factor: u32,
    passes: u32,
    eval: E,
    better: B,
) -> (C, [f64; D])
where
    C: Clone,
    X: Fn(&C) -> [f64; D],
    E: Fn(&[[f64; D]]) -> Vec<Option<C>>,
    B: Fn(&C, &C) -> bool,
{
    let mut best = incumbent;
    let f = factor.max(1) as i64;
    let inside = |x: f64, d: usize| x >= lo[d] - BOUND_SLACK && x <= hi[d] + BOUND_SLACK;
    for _ in 0..passes {
        for s in step.iter_mut() {
            *s /= f as f64;
        }
        for _ in 0..MAX_RECENTERS {
            let center = coords(&best);
            let mut offsets: Vec<[i64; D]> = Vec::new();
            let mut points: Vec<[f64; D]> = Vec::new();
            let width = (2 * f + 1) as usize;
            let total = width.pow(D as u32);
            for flat in 0..total {
                let mut o = [0i64; D];
                let mut x = [0f64; D];
                let mut rem = flat;
                let mut ok = true;
                for d in 0..D {
                    o[d] = (rem % width) as i64 - f;
                    rem /= width;
                    let v = center[d] + o[d] as f64 * step[d];
                    if !inside(v, d) {
                        ok = false;
                        break;
                    }
                    x[d] = v.clamp(lo[d], hi[d]);
                }
                if ok {
                    offsets.push(o);
                    points.push(x);
                }
            }
            let results = eval(&points);
            let mut best_offset = [0i64; D];
            for (o, r) in offsets.iter().zip(results) {
                if let Some(c) = r {
                    if better(&c, &best) {
                        best = c;
                        best_offset = *o;
                    }
                }
            }
            let on_edge = (0..D).any(|d| {
                let o = best_offset[d];
                o.abs() == f && inside(center[d] + (o + o.signum()) as f64 * step[d], d)
            });
            if !on_edge {
                break;
            }
        }
    }
    (best, step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts_and_ends() {
        let g = LogGrid::per_decade(1e-3, 4.0, 40.0);
        assert_eq!(g.points, 146);
        let v = g.values();
        assert_eq!(v[0], 1e-3);
        assert_eq!(*v.last().unwrap(), 4.0);
        assert!(g.step_log10() <= 1.0 / 40.0);
        let a = LogGrid::per_decade(1.0, 1e12, 10.0);
        assert_eq!(a.points, 121);
        assert!((a.step_log10() - 0.1).abs() < 1e-12);
        assert_eq!(LogGrid::per_decade(2.0, 2.0, 10.0).values(), vec![2.0]);
    }

    #[test]
    fn refinement_walks_to_smooth_minimum() {
        let target = [0.37, -1.21];
        let f = |x: &[f64; 2]| (x[0] - target[0]).powi(2) + 3.0 * (x[1] - target[1]).powi(2);
        let start = ([0.0, 0.0], f(&[0.0, 0.0]));
        let (best, step) = refine(
            start,
            |c: &([f64; 2], f64)| c.0,
            [0.1, 0.1],
            [-5.0, -5.0],
            [5.0, 5.0],
            4,
            2,
            |pts: &[[f64; 2]]| pts.iter().map(|p| Some((*p, f(p)))).collect(),
            |a, b| a.1 < b.1,
        );
        assert!((step[0] - 0.1 / 16.0).abs() < 1e-15);
        assert!((best.0[0] - target[0]).abs() <= step[0]);
        assert!((best.0[1] - target[1]).abs() <= step[1]);
    }

    #[test]
    fn refinement_respects_bounds() {
        let f = |x: &[f64; 1]| x[0];
        let (best, _) = refine(
            ([0.5], 0.5),
            |c: &([f64; 1], f64)| c.0,
            [0.1],
            [0.0],
            [1.0],
            4,
            2,
            |pts: &[[f64; 1]]| pts.iter().map(|p| Some((*p, f(p)))).collect(),
            |a, b| a.1 < b.1,
        );
        assert!(best.0[0].abs() < 1e-12);
    }
}
