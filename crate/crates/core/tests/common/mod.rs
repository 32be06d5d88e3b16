#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

/// Reference per-run columns for the shipped study.
pub mod reference {
    pub const SN: [f64; 9] = [-12.98, -10.43, -11.42, -9.95, -9.61, -10.93, -12.01, -10.19, -11.72];
    pub const AMPLITUDE: [f64; 9] = [0.76, 0.68, 0.61, 0.60, 0.55, 0.96, 0.49, 0.86, 0.75];
    pub const POWER_GRC: [f64; 9] = [0.33, 0.67, 0.48, 0.83, 1.00, 0.56, 0.41, 0.74, 0.44];
}

/// Reference average grade per factor level, rows A, B, C.
pub const LEVEL_AVERAGES: [[f64; 3]; 3] =
    [[0.554162, 0.668827, 0.587269], [0.615386, 0.664180, 0.530693], [0.646039, 0.570653, 0.593566]];

pub const REFERENCE_SS: [f64; 4] = [0.020896, 0.027373, 0.008962, 0.001618];
pub const REFERENCE_F: [f64; 3] = [12.91703, 16.9208, 5.539721];
pub const REFERENCE_PCT: [f64; 4] = [35.50825, 46.5144, 15.2284, 2.748948];

/// Fourth column of the standard L9 array, used to place the residual.
const L9_COLUMN_4: [usize; 9] = [1, 2, 3, 3, 1, 2, 2, 3, 1];
const L9_FIRST_THREE: [[usize; 3]; 9] =
    [[1, 1, 1], [1, 2, 2], [1, 3, 3], [2, 1, 2], [2, 2, 3], [2, 3, 1], [3, 1, 3], [3, 2, 1], [3, 3, 2]];

/// A grade vector whose level averages reproduce `LEVEL_AVERAGES` and whose
/// residual sum of squares is `error_ss`. The residual lives on the unused
/// fourth column, so it is orthogonal to all three factors.
pub fn grades_from_level_averages(error_ss: f64) -> Vec<f64> {
    let mean = LEVEL_AVERAGES[0].iter().sum::<f64>() / 3.0;
    let centred: Vec<[f64; 3]> = LEVEL_AVERAGES
        .iter()
        .map(|row| {
            let m = row.iter().sum::<f64>() / 3.0;
            [row[0] - m, row[1] - m, row[2] - m]
        })
        .collect();
    let s = (error_ss / 6.0).sqrt();
    let residual = [s, -s, 0.0];
    (0..9)
        .map(|r| {
            let levels = L9_FIRST_THREE[r];
            mean + (0..3).map(|f| centred[f][levels[f] - 1]).sum::<f64>() + residual[L9_COLUMN_4[r] - 1]
        })
        .collect()
}

/// Stair and module used for the child-count ceiling.
#[derive(Debug, Clone, Copy)]
pub struct OracleScene {
    pub overhang: f64,
    pub riser: f64,
    pub nosing_thickness: f64,
    pub module_length: f64,
}

pub const DESIGN_SCENE: OracleScene =
    OracleScene { overhang: 31.75, riser: 177.8, nosing_thickness: 25.4, module_length: 352.37 };

#[derive(Debug, Clone, Copy)]
pub struct OracleSolution {
    pub steps: u32,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
}

/// Solves the two closure equations by seeding Newton's method on a dense
/// (phi1, phi2) grid, independently of the library's one-dimensional
/// bracketing.
pub fn oracle_solutions(rp: f64, rc: f64, n: u32, scene: &OracleScene) -> Vec<OracleSolution> {
    let d = TAU / f64::from(n);
    let phi2_max = d / 2.0 + (rp * (d / 2.0).sin() / rc).min(1.0).asin();
    let o = scene.overhang;
    let seeds = 80;
    let mut out: Vec<OracleSolution> = Vec::new();
    for p in 1..=n.div_ceil(4) {
        let pd = f64::from(p) * d;
        let residual = |x: f64, y: f64| {
            let a = x + pd;
            let b = a - y;
            let r3 = rp * x.cos() + rc - o - rp * a.cos() - rc * b.cos();
            let r5 = rp * (a - d).sin() + rc - rp * a.sin() - rc * b.sin();
            (r3, r5)
        };
        for i in 0..seeds {
            for j in 0..=seeds {
                let mut x = -d / 2.0 + d * (i as f64 + 0.5) / seeds as f64;
                let mut y = phi2_max * j as f64 / seeds as f64;
                let mut converged = false;
                for _ in 0..60 {
                    let (r3, r5) = residual(x, y);
                    if r3.abs() < 1e-12 && r5.abs() < 1e-12 {
                        converged = true;
                        break;
                    }
                    let a = x + pd;
                    let b = a - y;
                    let j11 = -rp * x.sin() + rp * a.sin() + rc * b.sin();
                    let j12 = -rc * b.sin();
                    let j21 = rp * (a - d).cos() - rp * a.cos() - rc * b.cos();
                    let j22 = rc * b.cos();
                    let det = j11 * j22 - j12 * j21;
                    if det.abs() < 1e-14 {
                        break;
                    }
                    x -= (r3 * j22 - j12 * r5) / det;
                    y -= (j11 * r5 - j21 * r3) / det;
                    if !(x.is_finite() && y.is_finite()) || x.abs() > PI || y.abs() > PI {
                        break;
                    }
                }
                if !converged || !(-d / 2.0 < x && x <= d / 2.0 + 1e-12) || !(-1e-12 <= y && y <= phi2_max + 1e-12) {
                    continue;
                }
                if out.iter().any(|s| s.steps == p && (s.phi1 - x).abs() < 1e-9 && (s.phi2 - y).abs() < 1e-9) {
                    continue;
                }
                // Absolute placement: tip fixed, wheel centre behind it,
                // rear axle on the ground one module length back.
                let tip = (-o, scene.riser - scene.nosing_thickness);
                let rel = (rp * x.cos() + rc - o, rp * (x + pd - d).sin() + rc);
                let centre = (tip.0 - rel.0, tip.1 - rel.1);
                let axle_y = rp + rc;
                let rise = centre.1 - axle_y;
                if rise.abs() > scene.module_length {
                    continue;
                }
                let axle_x = centre.0 - (scene.module_length.powi(2) - rise * rise).sqrt();
                let phi3 = (tip.1 - axle_y).atan2(tip.0 - axle_x);
                let phi4 = x + pd - y;
                out.push(OracleSolution { steps: p, phi1: x, phi2: y, phi3, phi4 });
            }
        }
    }
    out
}

pub fn oracle_feasible(rp: f64, rc: f64, n: u32, scene: &OracleScene) -> bool {
    oracle_solutions(rp, rc, n, scene).iter().any(|s| s.phi4 <= s.phi3)
}

/// Largest feasible child count from `ceil(pi rp / rc)` up to `max_n`.
pub fn oracle_upper_bound(rp: f64, rc: f64, scene: &OracleScene, max_n: u32) -> Option<u32> {
    let lower = (PI * rp / rc).ceil() as u32;
    (lower..=max_n).filter(|&n| oracle_feasible(rp, rc, n, scene)).max()
}
