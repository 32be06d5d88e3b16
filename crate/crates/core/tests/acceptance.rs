//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! Criteria listed in `KNOWN_RED` cannot be met from the reference inputs;
//! they print FAIL with the measured gap and do not fail the build. Any
//! other FAIL, or a known-red criterion turning green, exits non-zero.

mod common;

use std::f64::consts::TAU;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_wheel::anova::{anova_from_grades, predict_grade, AnovaTable};
use robust_wheel::design_space::{
    circular_wheel_configuration, moment_sign, nc_lower_bound, nc_upper_bound, rolling_height, rp_bounds,
    FeasibilitySearch, ModuleGeometry, OverhangContact, StairSpec, Vec2, WheelSpec,
};
use robust_wheel::gra::{grey_coefficients, normalize, AttributeSpec, AttributeTable, Direction, InfluenceTable};
use robust_wheel::pipeline::dataset::{study_config, study_responses};
use robust_wheel::pipeline::{config_bounds, run_analysis, Report};
use robust_wheel::taguchi::{build_l9, Factor};

use common::{
    grades_from_level_averages, reference, DESIGN_SCENE, LEVEL_AVERAGES, REFERENCE_F, REFERENCE_PCT, REFERENCE_SS,
};

const SN_TOL_DB: f64 = 0.01;
const AMPLITUDE_TOL_MM: f64 = 0.01;
const GRC_TOL: f64 = 0.01;
const SS_TOL: f64 = 1e-5;
const F_TOL: f64 = 0.05;
const PCT_TOL: f64 = 0.05;
const PREDICTION_TARGET: f64 = 0.7296;
const PREDICTION_TOL: f64 = 0.005;
const RP_MAX_TARGET: f64 = 56.67;
const RP_MAX_TOL: f64 = 0.01;
const RP_MIN_EXPECTED: f64 = 21.75;
const RP_MIN_REFERENCE: f64 = 21.25;
const PROPERTY_TOL: f64 = 1e-9;
const PROPERTY_CASES: usize = 256;

/// Reference S/N values for runs 2, 4 and 6 sit 0.011 to 0.016 dB away from
/// what the rounded replicates give.
const KNOWN_RED: &[u8] = &[1];

struct Outcome {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn max_gap(actual: &[f64], expected: &[f64]) -> (usize, f64) {
    actual.iter().zip(expected).map(|(a, e)| (a - e).abs()).enumerate().fold((0, 0.0), |best, (i, g)| {
        if g > best.1 {
            (i, g)
        } else {
            best
        }
    })
}

fn column_check(id: u8, title: &'static str, actual: &[f64], expected: &[f64], tol: f64) -> Outcome {
    let misses: Vec<String> = actual
        .iter()
        .zip(expected)
        .enumerate()
        .filter(|(_, (a, e))| (*a - *e).abs() > tol)
        .map(|(i, (a, e))| format!("run {} {:.4} vs {:.2}", i + 1, a, e))
        .collect();
    let (worst, gap) = max_gap(actual, expected);
    Outcome {
        id,
        title,
        pass: misses.is_empty(),
        detail: if misses.is_empty() {
            format!("max gap {gap:.4} at run {} (tol {tol})", worst + 1)
        } else {
            format!("outside tol {tol}: {}", misses.join("; "))
        },
    }
}

fn criterion_1(report: &Report) -> Outcome {
    column_check(1, "S/N ratios vs reference", &report.sn.0, &reference::SN, SN_TOL_DB)
}

fn criterion_2(report: &Report) -> Outcome {
    let amps: Vec<f64> = report.wheels.iter().map(|w| w.amplitude).collect();
    column_check(2, "transverse amplitudes vs reference", &amps, &reference::AMPLITUDE, AMPLITUDE_TOL_MM)
}

fn criterion_3(report: &Report) -> Outcome {
    let j = report.grey.attributes.iter().position(|a| a.name == "power").expect("power attribute");
    let grc: Vec<f64> = report.grey.coefficients.iter().map(|row| row[j]).collect();
    column_check(3, "power grey coefficients vs reference", &grc, &reference::POWER_GRC, GRC_TOL)
}

fn criterion_4() -> Outcome {
    let config = study_config().expect("config");
    let plan = build_l9(&config.factors).expect("plan");
    let grades = grades_from_level_averages(REFERENCE_SS[3]);
    let t: AnovaTable = anova_from_grades(&plan, &grades).expect("anova");
    let ss = [t.factors[0].ss, t.factors[1].ss, t.factors[2].ss, t.error_ss];
    let f = [t.factors[0].f, t.factors[1].f, t.factors[2].f];
    let pct = [
        t.factors[0].contribution_pct,
        t.factors[1].contribution_pct,
        t.factors[2].contribution_pct,
        t.error_contribution_pct,
    ];
    let (_, ss_gap) = max_gap(&ss, &REFERENCE_SS);
    let (_, f_gap) = max_gap(&f, &REFERENCE_F);
    let (_, pct_gap) = max_gap(&pct, &REFERENCE_PCT);
    Outcome {
        id: 4,
        title: "ANOVA vs reference",
        pass: ss_gap <= SS_TOL && f_gap <= F_TOL && pct_gap <= PCT_TOL,
        detail: format!(
            "SS {:.6}/{:.6}/{:.6}/{:.6} (gap {ss_gap:.1e}), F {:.3}/{:.3}/{:.3} (gap {f_gap:.3}), % {:.2}/{:.2}/{:.2}/{:.2} (gap {pct_gap:.3})",
            ss[0], ss[1], ss[2], ss[3], f[0], f[1], f[2], pct[0], pct[1], pct[2], pct[3]
        ),
    }
}

fn criterion_5() -> Outcome {
    let config = study_config().expect("config");
    let plan = build_l9(&config.factors).expect("plan");
    let mean = LEVEL_AVERAGES[0].iter().sum::<f64>() / 3.0;
    let averages: Vec<Vec<f64>> = LEVEL_AVERAGES.iter().map(|r| r.to_vec()).collect();
    let table = InfluenceTable::from_level_averages(&plan, &averages, mean).expect("influence");
    let p = predict_grade(&table, &["A".to_string(), "B".to_string()]).expect("prediction");
    let gap = (p.predicted_grade - PREDICTION_TARGET).abs();
    Outcome {
        id: 5,
        title: "predicted grade for {A, B}",
        pass: gap <= PREDICTION_TOL,
        detail: format!("{:.6} vs {PREDICTION_TARGET} (gap {gap:.4}, tol {PREDICTION_TOL})", p.predicted_grade),
    }
}

fn criterion_6(report: &Report) -> Outcome {
    let setting: Vec<f64> = report.influence.factors.iter().map(|f| f.optimal_value()).collect();
    let top: Vec<usize> =
        [1, 2].iter().map(|r| report.grey.ranks.iter().position(|x| x == r).expect("rank") + 1).collect();
    Outcome {
        id: 6,
        title: "end-to-end optimal setting and top runs",
        pass: setting == [260.0, 45.0, 16.0] && top == [8, 5],
        detail: format!("setting {:?} ({}), ranks 1-2: runs {:?}", setting, report.optimal_label(), top),
    }
}

fn criterion_7() -> Outcome {
    let config = study_config().expect("config");
    let bounds = config_bounds(&config).expect("bounds");
    let (rp_min, rp_max) = rp_bounds(config.child_radius, config.o_max, config.riser_min()).expect("rp bounds");
    let text = bounds.to_text(Some(RP_MIN_REFERENCE));
    let flagged = text.contains("21.25") && text.contains("+0.50 mm");
    let nc = nc_lower_bound(50.0, 10.0);
    let pass = (rp_max - RP_MAX_TARGET).abs() <= RP_MAX_TOL
        && (bounds.rp_max - rp_max).abs() < 1e-12
        && (rp_min - RP_MIN_EXPECTED).abs() < 1e-9
        && nc == 16
        && bounds.nc_min == 16
        && flagged;
    Outcome {
        id: 7,
        title: "design bounds",
        pass,
        detail: format!(
            "r_p in [{rp_min:.3}, {rp_max:.3}], nc_lower_bound(50, 10) = {nc}, deviation flagged: {flagged}"
        ),
    }
}

fn criterion_8() -> Outcome {
    let stair = StairSpec::new(DESIGN_SCENE.riser, 279.4, DESIGN_SCENE.overhang, 0.6, DESIGN_SCENE.nosing_thickness)
        .expect("stair");
    let module = ModuleGeometry::new(DESIGN_SCENE.module_length).expect("module");
    let bound = nc_upper_bound(50.0, 10.0, &stair, &module);
    let feasible = FeasibilitySearch::default().feasible_counts(50.0, 10.0, 16..=30, &stair, &module);
    let oracle: Vec<u32> = (16..=30).filter(|&n| common::oracle_feasible(50.0, 10.0, n, &DESIGN_SCENE)).collect();
    let closed = match feasible.last() {
        Some(&top) => feasible == (16..=top).collect::<Vec<_>>(),
        None => false,
    };
    let witness = FeasibilitySearch::default().witness(50.0, 10.0, 20, &stair, &module);
    Outcome {
        id: 8,
        title: "child-count ceiling",
        pass: matches!(bound, Ok(20)) && closed && feasible == oracle,
        detail: format!(
            "bound {bound:?}, feasible {feasible:?}, oracle {oracle:?}, scene riser {} overhang {} nosing {} l_m {}{}",
            DESIGN_SCENE.riser,
            DESIGN_SCENE.overhang,
            DESIGN_SCENE.nosing_thickness,
            DESIGN_SCENE.module_length,
            witness.map_or(String::new(), |w| format!(
                ", n=20 witness p={} phi1={:.2} phi2={:.2} phi3={:.2} phi4={:.2} deg",
                w.steps,
                w.phi1.to_degrees(),
                w.phi2.to_degrees(),
                w.phi3.to_degrees(),
                w.phi4.to_degrees()
            ))
        ),
    }
}

fn criterion_9(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();

    // Amplitude equals the peak-to-trough range of the rolling height.
    for _ in 0..PROPERTY_CASES {
        let rc = rng.gen_range(2.0..20.0);
        let rp = rng.gen_range(5.0..80.0);
        let lower = (std::f64::consts::PI * rp / rc).ceil() as u32;
        let n = rng.gen_range(lower.max(3)..lower.max(3) + 20);
        let w = WheelSpec::new(rp, rc, n).expect("wheel");
        let d = TAU / f64::from(n);
        let grid = (0..2 * n).map(|k| rolling_height(&w, f64::from(k) * d / 2.0));
        let random = (0..32).map(|_| rolling_height(&w, rng.gen_range(-TAU..TAU))).collect::<Vec<_>>();
        let all: Vec<f64> = grid.chain(random.iter().copied()).collect();
        let hi = all.iter().copied().fold(f64::MIN, f64::max);
        let lo = all.iter().copied().fold(f64::MAX, f64::min);
        if ((hi - lo) - w.transverse_amplitude()).abs() > PROPERTY_TOL {
            failures.push(format!("amplitude rp={rp} rc={rc} n={n}"));
            break;
        }
    }

    // L9 balance and pairwise orthogonality.
    for _ in 0..PROPERTY_CASES / 8 {
        let factors: Vec<Factor> = ["A", "B", "C"]
            .iter()
            .map(|k| {
                let base = rng.gen_range(-100.0..100.0);
                let step = rng.gen_range(0.1..10.0);
                Factor::control(k, k, "", vec![base, base + step, base + 2.0 * step]).expect("factor")
            })
            .collect();
        let plan = build_l9(&factors).expect("plan");
        for f in 0..3 {
            for level in 1..=3 {
                if plan.runs_at_level(f, level).count() != 3 {
                    failures.push("L9 balance".into());
                }
            }
            for g in f + 1..3 {
                for a in 1..=3 {
                    for b in 1..=3 {
                        let hits = plan.runs.iter().filter(|r| r[f] == a && r[g] == b).count();
                        if hits != 1 {
                            failures.push("L9 orthogonality".into());
                        }
                    }
                }
            }
        }
    }

    // Normalisation is unchanged by a positive affine map of a column.
    let specs = [
        AttributeSpec::new("x", Direction::LargerIsBetter, robust_wheel::gra::AttributeSource::SnRatio),
        AttributeSpec::new("y", Direction::SmallerIsBetter, robust_wheel::gra::AttributeSource::Amplitude),
    ];
    for _ in 0..PROPERTY_CASES {
        let x: Vec<f64> = (0..9).map(|_| rng.gen_range(-20.0..20.0)).collect();
        let y: Vec<f64> = (0..9).map(|_| rng.gen_range(0.0..5.0)).collect();
        let (a, b) = (rng.gen_range(0.01..100.0), rng.gen_range(-100.0..100.0));
        let base = normalize(&AttributeTable::from_columns(&[x.clone(), y.clone()]).unwrap(), &specs).unwrap();
        let mapped: Vec<Vec<f64>> = [&x, &y].iter().map(|c| c.iter().map(|v| a * v + b).collect()).collect();
        let moved = normalize(&AttributeTable::from_columns(&mapped).unwrap(), &specs).unwrap();
        let worst = base
            .matrix
            .iter()
            .flatten()
            .zip(moved.matrix.iter().flatten())
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        if worst > PROPERTY_TOL {
            failures.push(format!("affine normalisation gap {worst:e}"));
            break;
        }
        let _ = grey_coefficients(&base.matrix, 0.5).expect("grc");
    }

    // ANOVA shift and scale invariance.
    let plan = build_l9(&study_config().expect("config").factors).expect("plan");
    for _ in 0..PROPERTY_CASES {
        let g: Vec<f64> = (0..9).map(|_| rng.gen_range(0.0..1.0)).collect();
        let (c, k) = (rng.gen_range(-10.0..10.0), rng.gen_range(0.1..10.0));
        let t0 = anova_from_grades(&plan, &g).unwrap();
        let shifted = anova_from_grades(&plan, &g.iter().map(|v| v + c).collect::<Vec<_>>()).unwrap();
        let scaled = anova_from_grades(&plan, &g.iter().map(|v| v * k).collect::<Vec<_>>()).unwrap();
        for ((r0, rs), rk) in t0.factors.iter().zip(&shifted.factors).zip(&scaled.factors) {
            let ss_scale = t0.total_ss.max(1.0);
            let ok = (r0.ss - rs.ss).abs() <= PROPERTY_TOL * ss_scale
                && (r0.ss * k * k - rk.ss).abs() <= PROPERTY_TOL * ss_scale * k * k
                && (r0.f - rs.f).abs() <= PROPERTY_TOL * r0.f.abs().max(1.0)
                && (r0.f - rk.f).abs() <= PROPERTY_TOL * r0.f.abs().max(1.0)
                && (r0.contribution_pct - rs.contribution_pct).abs() <= PROPERTY_TOL * 100.0
                && (r0.contribution_pct - rk.contribution_pct).abs() <= PROPERTY_TOL * 100.0;
            if !ok {
                failures.push(format!("ANOVA invariance for {}", r0.key));
            }
        }
    }

    // Without friction the verdict is the sign of (contact - axis) x normal.
    for _ in 0..PROPERTY_CASES {
        let point = Vec2::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
        let axis = Vec2::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
        let normal = Vec2::from_polar(1.0, rng.gen_range(-TAU..TAU));
        let contact = OverhangContact::new(point, normal, axis, 0.0).expect("contact");
        let expected = (point - axis).cross(normal) > 0.0;
        if moment_sign(&contact).expect("sign").is_climb() != expected {
            failures.push("moment sign at zero friction".into());
            break;
        }
    }

    failures.dedup();
    Outcome {
        id: 9,
        title: "randomised property suites",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("seed {seed}, {PROPERTY_CASES} cases per property")
        } else {
            failures.join("; ")
        },
    }
}

fn criterion_10() -> Outcome {
    let stair = StairSpec::new(177.8, 279.4, 31.75, 0.6, 25.4).expect("stair");
    let module = ModuleGeometry::new(352.37).expect("module");
    let arc = FeasibilitySearch { require_moment: false, ..FeasibilitySearch::default() }
        .configurations(45.0, 10.0, 16, &stair, &module)
        .into_iter()
        .find(|c| c.normal_turns_module());
    let (round, _) = circular_wheel_configuration(55.0, &stair, &module).expect("circular wheel");
    let round_sign = moment_sign(&round).expect("sign");
    let Some(arc) = arc else {
        return Outcome {
            id: 10,
            title: "climb vs jam at the overhang",
            pass: false,
            detail: "arc wheel not placed".into(),
        };
    };
    let arc_sign = moment_sign(&arc.contact(stair.friction).expect("contact")).expect("sign");
    let same_tip = arc.tip.distance(round.point) < 1e-9;
    Outcome {
        id: 10,
        title: "climb vs jam at the overhang",
        pass: arc_sign.is_climb() && !round_sign.is_climb() && same_tip,
        detail: format!(
            "arc 45/10/16: {} (phi3 {:.2}, phi4 {:.2} deg); circle r=55: {} (tip {:.2}, normal {:.2} deg)",
            arc_sign.verdict(),
            arc.phi3.to_degrees(),
            arc.phi4.to_degrees(),
            round_sign.verdict(),
            (round.point - round.axis).angle().to_degrees(),
            (-round.normal).angle().to_degrees()
        ),
    }
}

fn main() -> ExitCode {
    let config = study_config().expect("shipped config");
    let report = run_analysis(&config, &study_responses().expect("shipped responses")).expect("analysis");
    let outcomes = [
        criterion_1(&report),
        criterion_2(&report),
        criterion_3(&report),
        criterion_4(),
        criterion_5(),
        criterion_6(&report),
        criterion_7(),
        criterion_8(),
        criterion_9(config.seed),
        criterion_10(),
    ];
    let mut unexpected = Vec::new();
    for o in &outcomes {
        let known = KNOWN_RED.contains(&o.id);
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if known && !o.pass { " [known red]" } else { "" };
        println!("criterion {:>2} {status}{note}: {}: {}", o.id, o.title, o.detail);
        if o.pass == known {
            unexpected.push(o.id);
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} pass, known red {:?}", outcomes.len(), KNOWN_RED);
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected status for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
