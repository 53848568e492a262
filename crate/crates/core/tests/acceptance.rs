//! Acceptance criteria, one line per criterion.
//!
//! Every randomized draw comes from a fixed seed, so a run is reproducible.
//! The process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use twogroup::analysis::{dulac_curl, dulac_field, numerical_curl, threshold_sweep};
use twogroup::equilibria::{scan_unreported_rest_points, HYPERBOLICITY_TOL};
use twogroup::sampling::{random_interior_point, random_params};
use twogroup::{
    all_rest_points, endemic_equilibrium, integrate, invariance_audit, AbsoluteState, InitialState,
    IntegratorConfig, Matrix2, ModelParams, ParamName, PlanarState, ProportionState,
    TerminalReason, Trajectory,
};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn rng(stream: u64) -> StdRng {
    StdRng::seed_from_u64(0x7769_6e67 ^ stream)
}

fn field_scale(m: &ModelParams) -> f64 {
    1.0 + m.lambda1() + m.lambda2() + m.outflow1() + m.outflow2()
}

/// Audit totals carried from criteria 2 and 6 into criterion 9.
#[derive(Default)]
struct AuditTotals {
    trajectories: usize,
    max_drift: f64,
    min_coord: f64,
    max_projection: f64,
}

impl AuditTotals {
    fn add(&mut self, tr: &Trajectory) {
        let rep = invariance_audit(tr);
        self.trajectories += 1;
        self.max_drift = self.max_drift.max(rep.max_simplex_drift);
        self.min_coord = self.min_coord.min(rep.min_coordinate);
        self.max_projection = self.max_projection.max(rep.max_projection);
    }
}

fn threshold_dichotomy() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut mismatches = 0;
    let mut above = 0;
    for _ in 0..200 {
        let m = random_params(&mut r);
        let exists = match endemic_equilibrium(&m) {
            Ok(e) => e.is_some(),
            Err(_) => {
                mismatches += 1;
                continue;
            }
        };
        let want = m.r0() > 1.0 + HYPERBOLICITY_TOL;
        above += usize::from(want);
        mismatches += usize::from(exists != want);
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(10),
        format!("200 sets ({above} above threshold), {mismatches} mismatches, {elapsed:.2?}"),
    )
}

/// Sets drawn until `n` lie above and `n` below the threshold.
fn split_sets(r: &mut StdRng, n: usize) -> (Vec<ModelParams>, Vec<ModelParams>) {
    let (mut hi, mut lo) = (Vec::new(), Vec::new());
    while hi.len() < n || lo.len() < n {
        let m = random_params(r);
        let r0 = m.r0();
        if r0 > 1.0 + HYPERBOLICITY_TOL && hi.len() < n {
            hi.push(m);
        } else if r0 < 1.0 - HYPERBOLICITY_TOL && lo.len() < n {
            lo.push(m);
        }
    }
    (hi, lo)
}

struct AttractionRun {
    params: ModelParams,
    trajectories: Vec<(Trajectory, f64, bool)>,
}

fn global_attraction(audit: &mut AuditTotals, traces: &mut Vec<f64>) -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let (hi, lo) = split_sets(&mut r, 50);
    let cfg = IntegratorConfig {
        t_end: 1e4,
        convergence_tol: 1e-6,
        ..Default::default()
    };
    let jobs: Vec<(ModelParams, Vec<PlanarState>)> = hi
        .iter()
        .chain(&lo)
        .map(|m| (*m, (0..20).map(|_| random_interior_point(&mut r)).collect()))
        .collect();
    let runs: Vec<AttractionRun> = jobs
        .par_iter()
        .map(|(m, starts)| {
            let rest = all_rest_points(m).expect("rest points");
            let target = rest.last().expect("origin always present");
            let goal = target.location().to_simplex().to_array();
            let trajectories = starts
                .par_iter()
                .map(|x| {
                    let tr = integrate(m, &InitialState::Proportions(x.to_simplex()), &cfg, &rest)
                        .expect("integration");
                    let end = tr.last_state();
                    let dist = end
                        .iter()
                        .zip(goal)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    let captured = tr.terminal() == TerminalReason::ConvergedTo(rest.len() - 1);
                    (tr, dist, captured)
                })
                .collect();
            AttractionRun {
                params: *m,
                trajectories,
            }
        })
        .collect();

    let mut unresolved = 0;
    let mut worst = 0.0_f64;
    let mut latest = 0.0_f64;
    for run in &runs {
        if let Ok(Some(e)) = endemic_equilibrium(&run.params) {
            traces.push(e.jacobian().trace());
        }
        for (tr, dist, captured) in &run.trajectories {
            audit.add(tr);
            worst = worst.max(*dist);
            latest = latest.max(tr.last_time());
            unresolved += usize::from(!captured);
        }
    }
    let elapsed = start.elapsed();
    outcome(
        unresolved == 0 && worst <= 1e-6 && elapsed < Duration::from_secs(120),
        format!(
            "50+50 sets x 20 starts, unresolved {unresolved}, max final distance {worst:.2e}, \
             latest capture t={latest}, {elapsed:.2?}"
        ),
    )
}

fn trace_negativity(traces: &mut Vec<f64>) -> Outcome {
    let mut r = rng(3);
    for _ in 0..200 {
        let m = random_params(&mut r);
        if let Ok(Some(e)) = endemic_equilibrium(&m) {
            traces.push(e.jacobian().trace());
        }
    }
    let max = traces.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    outcome(
        !traces.is_empty() && max < 0.0,
        format!(
            "{} interior equilibria, largest trace {max:.4e} (margin {:.4e})",
            traces.len(),
            -max
        ),
    )
}

fn uniqueness_scan() -> Outcome {
    let mut r = rng(4);
    let sets: Vec<ModelParams> = (0..100).map(|_| random_params(&mut r)).collect();
    let extras: Vec<usize> = sets
        .par_iter()
        .map(|m| {
            let mut known = vec![PlanarState::ORIGIN];
            if let Ok(Some(e)) = endemic_equilibrium(m) {
                known.push(e.location());
            }
            scan_unreported_rest_points(m, 200, &known).len()
        })
        .collect();
    let total: usize = extras.iter().sum();
    outcome(
        total == 0,
        format!("100 sets, 200x200 scan, {total} unreported rest points"),
    )
}

fn dulac_certificate() -> Outcome {
    let mut r = rng(5);
    let sets: Vec<ModelParams> = (0..100).map(|_| random_params(&mut r)).collect();
    let per_set: Vec<(f64, f64, f64)> = sets
        .par_iter()
        .map(|m| {
            let n = 50;
            let (mut max_curl, mut max_rel, mut max_dot) = (f64::NEG_INFINITY, 0.0_f64, 0.0_f64);
            for j in 1..n {
                for k in 1..n - j {
                    let (i1, i2) = (j as f64 / n as f64, k as f64 / n as f64);
                    let x = ProportionState::new(1.0 - i1 - i2, i1, i2).unwrap();
                    let closed = dulac_curl(m, &x).unwrap();
                    max_curl = max_curl.max(closed);
                    let g = dulac_field(m, x.to_array()).unwrap();
                    let f = m.proportions_field(&x);
                    let dot: f64 = g.iter().zip(f).map(|(a, b)| a * b).sum();
                    max_dot = max_dot.max(dot.abs());
                    if x.s().min(i1).min(i2) >= 0.05 {
                        let fd = numerical_curl(m, x.to_array(), 1e-5).unwrap();
                        max_rel = max_rel.max((fd - closed).abs() / closed.abs());
                    }
                }
            }
            (max_curl, max_rel, max_dot)
        })
        .collect();
    let curl = per_set
        .iter()
        .map(|v| v.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let rel = per_set.iter().map(|v| v.1).fold(0.0, f64::max);
    let dot = per_set.iter().map(|v| v.2).fold(0.0, f64::max);
    outcome(
        curl < 0.0 && rel <= 1e-4 && dot <= 1e-10,
        format!("100 sets, max curl {curl:.3e}, max FD gap {rel:.3e}, max |g.f| {dot:.3e}"),
    )
}

/// Whether `N` stays inside f64 range over `t` starting from 100.
fn representable(m: &ModelParams, t: f64) -> bool {
    let fastest = (m.b() - m.d())
        .abs()
        .max((m.b1() - m.d() - m.epsilon()).abs());
    fastest * t <= 500.0
}

fn cross_system(audit: &mut AuditTotals) -> Outcome {
    let mut r = rng(6);
    let cfg = IntegratorConfig {
        t_end: 100.0,
        ..Default::default()
    };
    // N may decay by many orders of magnitude, so the absolute run needs
    // error control relative to the state rather than a fixed floor
    let abs_cfg = IntegratorConfig {
        atol: 1e-300,
        ..cfg
    };
    let mut worst_traj = 0.0_f64;
    let mut sets = 0;
    while sets < 20 {
        let m = random_params(&mut r);
        if !representable(&m, cfg.t_end) {
            continue;
        }
        sets += 1;
        let x = AbsoluteState::new(
            r.gen_range(1.0..100.0),
            r.gen_range(0.0..50.0),
            r.gen_range(0.0..50.0),
        )
        .unwrap();
        let abs = integrate(&m, &InitialState::Absolute(x), &abs_cfg, &[]).unwrap();
        let prop = integrate(
            &m,
            &InitialState::Proportions(x.to_proportions()),
            &cfg,
            &[],
        )
        .unwrap();
        audit.add(&prop);
        assert_eq!(abs.times(), prop.times(), "shared sample grid");
        for (a, p) in abs.states().zip(prop.states()) {
            let n: f64 = a.iter().sum();
            for k in 0..3 {
                worst_traj = worst_traj.max((a[k] / n - p[k]).abs());
            }
        }
    }

    let mut worst_field = 0.0_f64;
    let m = random_params(&mut r);
    let scale = field_scale(&m);
    for _ in 0..1000 {
        let x = random_interior_point(&mut r);
        let fp = m.planar_field(&x);
        let f3 = m.proportions_field(&x.to_simplex());
        worst_field = worst_field.max((fp[0] - f3[1]).abs().max((fp[1] - f3[2]).abs()) / scale);
    }
    outcome(
        worst_traj <= 1e-6 && worst_field <= 1e-12,
        format!(
            "20 sets, max |abs/N - proportions| {worst_traj:.3e}; \
             1000 points, max planar gap {worst_field:.3e}"
        ),
    )
}

fn jacobian_correctness() -> Outcome {
    let mut r = rng(7);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let m = random_params(&mut r);
        for _ in 0..100 {
            let x = random_interior_point(&mut r).to_array();
            let h = 1e-6;
            let d = |a: f64, b: f64| m.planar_field_raw([x[0] + a, x[1] + b]);
            let (p1, m1, p2, m2) = (d(h, 0.0), d(-h, 0.0), d(0.0, h), d(0.0, -h));
            let num = Matrix2::new(
                (p1[0] - m1[0]) / (2.0 * h),
                (p2[0] - m2[0]) / (2.0 * h),
                (p1[1] - m1[1]) / (2.0 * h),
                (p2[1] - m2[1]) / (2.0 * h),
            );
            let j = m.planar_jacobian_raw(x);
            worst = worst.max(j.max_abs_diff(&num) / j.max_abs());
        }
    }
    outcome(
        worst <= 1e-5,
        format!("20 sets x 100 points, max relative gap {worst:.3e}"),
    )
}

fn boundary_crossing() -> Outcome {
    let base = ModelParams::new(0.5, 0.3, 0.1, 0.2, 0.5, 0.8, 0.3, 0.1, 0.5).unwrap();
    // R0 is affine in lambda2 with slope q/(b+eps+gamma2)
    let slope = base.q() / base.outflow2();
    let crossing = (1.0 - base.p() * base.lambda1() / base.outflow1()) / slope;
    let step = 0.02 / slope;
    let values: Vec<f64> = (0..20)
        .map(|k| crossing + (k as f64 - 9.5) * step)
        .collect();
    let rows = threshold_sweep(&base, ParamName::Lambda2, &values);
    let mut ok = rows.iter().all(|r| r.error.is_none() && r.is_coherent());
    let dist: Vec<f64> = rows.iter().map(|r| r.endemic_distance()).collect();
    let below = rows.iter().filter(|r| r.r0.unwrap_or(0.0) < 1.0).count();
    ok &= below == 10;
    ok &= dist[..10].iter().all(|&d| d == 0.0);
    ok &= dist[10..].iter().all(|&d| d > 0.0);
    ok &= dist[10..].windows(2).all(|w| w[1] >= w[0]);
    let max_jump = dist
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    ok &= max_jump <= 0.2;
    outcome(
        ok,
        format!(
            "lambda2 crossing at {crossing:.4}, {below} rows below, first endemic distance \
             {:.4}, max adjacent jump {max_jump:.4}",
            dist[10]
        ),
    )
}

fn simplex_invariance(audit: &AuditTotals) -> Outcome {
    outcome(
        audit.trajectories > 0 && audit.max_drift <= 1e-9 && audit.min_coord >= -1e-12,
        format!(
            "{} proportions trajectories, max |sum-1| {:.3e}, min coordinate {:.3e}, \
             max per-step projection {:.3e}",
            audit.trajectories, audit.max_drift, audit.min_coord, audit.max_projection
        ),
    )
}

fn main() -> ExitCode {
    let mut audit = AuditTotals::default();
    let mut traces = Vec::new();
    // criterion 9 audits trajectories gathered by 2 and 6, so order matters
    let results: Vec<(&str, Outcome)> = vec![
        ("1 threshold dichotomy", threshold_dichotomy()),
        (
            "2 global attraction",
            global_attraction(&mut audit, &mut traces),
        ),
        ("3 trace negativity", trace_negativity(&mut traces)),
        ("4 interior uniqueness", uniqueness_scan()),
        ("5 dulac certificate", dulac_certificate()),
        ("6 cross-system consistency", cross_system(&mut audit)),
        ("7 jacobian correctness", jacobian_correctness()),
        ("8 threshold crossing", boundary_crossing()),
        ("9 simplex invariance", simplex_invariance(&audit)),
    ];

    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", o.detail);
        failed += usize::from(!o.passed);
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", results.len());
        ExitCode::FAILURE
    }
}
