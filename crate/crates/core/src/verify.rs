//! Property suite run against a single parameter set.
//!
//! Each check compares two independent routes (closed form against finite
//! differences, eigenvalues against the threshold rule, a solver against
//! brute-force scanning or long integration) and records pass or fail with
//! a short detail string.

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::analysis::{basin_probe, dulac_curl, dulac_field, numerical_curl};
use crate::equilibria::{
    classify_origin, endemic_equilibrium, origin_matrix, scan_unreported_rest_points,
    StabilityClass, HYPERBOLICITY_TOL,
};
use crate::integrator::{integrate, invariance_audit, InitialState, IntegratorConfig};
use crate::linalg::Matrix2;
use crate::params::ModelParams;
use crate::sampling::random_interior_point;
use crate::state::{PlanarState, ProportionState};

const SEED: u64 = 0x5150_2d32;

/// Deliberate corruption of the planar field, used to confirm that the
/// suite notices a broken model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaultInjection {
    #[default]
    None,
    /// Reverses the planar field and its Jacobian.
    NegateField,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy)]
struct Probe<'a> {
    params: &'a ModelParams,
    sign: f64,
}

impl Probe<'_> {
    fn field(&self, x: [f64; 2]) -> [f64; 2] {
        self.params.planar_field_raw(x).map(|v| self.sign * v)
    }

    fn jacobian(&self, x: [f64; 2]) -> Matrix2 {
        let j = self.params.planar_jacobian_raw(x);
        Matrix2::new(
            self.sign * j.a11,
            self.sign * j.a12,
            self.sign * j.a21,
            self.sign * j.a22,
        )
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// Runs every check. `config` drives the integration-based checks.
pub fn run_suite(
    params: &ModelParams,
    config: &IntegratorConfig,
    fault: FaultInjection,
) -> VerifyReport {
    let probe = Probe {
        params,
        sign: match fault {
            FaultInjection::None => 1.0,
            FaultInjection::NegateField => -1.0,
        },
    };
    let mut rng = StdRng::seed_from_u64(SEED);
    let r0 = params.r0();
    let mut checks = Vec::new();

    // origin linearization against the threshold rule
    let c = origin_matrix(params);
    let det_sign_ok = (r0 - 1.0).abs() <= HYPERBOLICITY_TOL
        || (c.det() > 0.0) == (r0 < 1.0) && (r0 >= 1.0 || c.trace() < 0.0);
    let origin = classify_origin(params);
    checks.push(check(
        "origin-threshold",
        det_sign_ok && origin.is_ok(),
        format!(
            "R0={r0:.6} det C={:.3e} trace C={:.3e} class={}",
            c.det(),
            c.trace(),
            origin
                .as_ref()
                .map_or_else(|e| e.to_string(), |c| c.to_string())
        ),
    ));

    let endemic = endemic_equilibrium(params);
    let dichotomy_ok = match &endemic {
        Ok(e) => e.is_some() == (r0 > 1.0 + HYPERBOLICITY_TOL),
        Err(_) => false,
    };
    checks.push(check(
        "threshold-dichotomy",
        dichotomy_ok,
        match &endemic {
            Ok(Some(e)) => format!(
                "endemic at ({:.6}, {:.6})",
                e.location().i1(),
                e.location().i2()
            ),
            Ok(None) => "no endemic point".into(),
            Err(e) => e.to_string(),
        },
    ));

    let interior: Vec<PlanarState> = match &endemic {
        Ok(Some(e)) => vec![e.location()],
        _ => Vec::new(),
    };

    let jacs: Vec<Matrix2> = interior
        .iter()
        .map(|x| probe.jacobian(x.to_array()))
        .collect();
    let max_trace = jacs
        .iter()
        .map(Matrix2::trace)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(check(
        "trace-negative",
        jacs.iter().all(|j| j.trace() < 0.0),
        if jacs.is_empty() {
            "no interior rest point".into()
        } else {
            format!("max trace {max_trace:.6e}")
        },
    ));

    let classes: Vec<StabilityClass> = jacs
        .iter()
        .map(|j| StabilityClass::from_eigenvalues(&j.eigenvalues()))
        .collect();
    checks.push(check(
        "no-interior-source",
        !classes.contains(&StabilityClass::Source),
        format!("{classes:?}"),
    ));
    let min_re = jacs
        .iter()
        .flat_map(|j| j.eigenvalues())
        .map(|e| e.re.abs())
        .fold(f64::INFINITY, f64::min);
    checks.push(check(
        "interior-hyperbolic",
        min_re > 1e-8,
        if jacs.is_empty() {
            "no interior rest point".into()
        } else {
            format!("min |Re| {min_re:.3e}")
        },
    ));

    let mut known = vec![PlanarState::ORIGIN];
    known.extend(&interior);
    let extra = scan_unreported_rest_points(params, 200, &known);
    checks.push(check(
        "unique-interior-rest-point",
        extra.is_empty(),
        format!("{} unreported rest points on a 200x200 scan", extra.len()),
    ));

    // Dulac certificate on a 50x50 barycentric grid
    let n = 50;
    let mut max_curl = f64::NEG_INFINITY;
    let mut max_dot = 0.0_f64;
    let mut max_rel = 0.0_f64;
    for j in 1..n {
        for k in 1..n - j {
            let (i1, i2) = (j as f64 / n as f64, k as f64 / n as f64);
            let s = 1.0 - i1 - i2;
            let x = ProportionState::new(s, i1, i2).expect("grid point on simplex");
            let closed = dulac_curl(params, &x).expect("interior");
            max_curl = max_curl.max(closed);
            let g = dulac_field(params, x.to_array()).expect("interior");
            let f = probe.field([i1, i2]);
            let fs = -(f[0] + f[1]);
            let dot = g[0] * fs + g[1] * f[0] + g[2] * f[1];
            max_dot = max_dot.max(dot.abs());
            if s.min(i1).min(i2) >= 0.05 {
                let fd = numerical_curl(params, x.to_array(), 1e-5).expect("interior");
                max_rel = max_rel.max((fd - closed).abs() / closed.abs());
            }
        }
    }
    checks.push(check(
        "dulac-negative",
        max_curl < 0.0,
        format!("max (curl g).n {max_curl:.3e}"),
    ));
    checks.push(check(
        "dulac-orthogonal",
        max_dot <= 1e-10,
        format!("max |g.f| {max_dot:.3e}"),
    ));
    checks.push(check(
        "dulac-curl-differences",
        max_rel <= 1e-4,
        format!("max relative gap {max_rel:.3e}"),
    ));

    // planar field against the proportions field, Jacobian against differences
    let mut worst_field = 0.0_f64;
    let mut worst_jac = 0.0_f64;
    for _ in 0..1000 {
        let x = random_interior_point(&mut rng);
        let fp = probe.field(x.to_array());
        let f3 = params.proportions_field(&x.to_simplex());
        let scale =
            1.0 + params.lambda1() + params.lambda2() + params.outflow1() + params.outflow2();
        worst_field = worst_field.max((fp[0] - f3[1]).abs().max((fp[1] - f3[2]).abs()) / scale);
    }
    for _ in 0..100 {
        let x = random_interior_point(&mut rng).to_array();
        let h = 1e-6;
        let d = |a: f64, b: f64| probe.field([x[0] + a, x[1] + b]);
        let (p1, m1, p2, m2) = (d(h, 0.0), d(-h, 0.0), d(0.0, h), d(0.0, -h));
        let num = Matrix2::new(
            (p1[0] - m1[0]) / (2.0 * h),
            (p2[0] - m2[0]) / (2.0 * h),
            (p1[1] - m1[1]) / (2.0 * h),
            (p2[1] - m2[1]) / (2.0 * h),
        );
        let j = probe.jacobian(x);
        worst_jac = worst_jac.max(j.max_abs_diff(&num) / j.max_abs().max(1e-300));
    }
    checks.push(check(
        "planar-proportions-agreement",
        worst_field <= 1e-12,
        format!("max relative gap {worst_field:.3e}"),
    ));
    checks.push(check(
        "jacobian-differences",
        worst_jac <= 1e-5,
        format!("max relative gap {worst_jac:.3e}"),
    ));

    // global attraction
    match basin_probe(params, 8, config) {
        Ok(rep) => checks.push(check(
            "global-attraction",
            rep.matches_threshold(),
            format!(
                "origin {} endemic {} unresolved {}",
                rep.counts.origin, rep.counts.endemic, rep.counts.unresolved
            ),
        )),
        Err(e) => checks.push(check("global-attraction", false, e.to_string())),
    }

    // positive invariance of the proportions system
    let mut worst = (0.0_f64, f64::INFINITY, 0.0_f64);
    let mut ok = true;
    let audit_cfg = IntegratorConfig {
        t_end: config.t_end.min(200.0),
        ..*config
    };
    for _ in 0..5 {
        let x = random_interior_point(&mut rng).to_simplex();
        match integrate(params, &InitialState::Proportions(x), &audit_cfg, &[]) {
            Ok(tr) => {
                let rep = invariance_audit(&tr);
                ok &= rep.passes();
                worst.0 = worst.0.max(rep.max_simplex_drift);
                worst.1 = worst.1.min(rep.min_coordinate);
                worst.2 = worst.2.max(rep.max_projection);
            }
            Err(_) => ok = false,
        }
    }
    checks.push(check(
        "simplex-invariance",
        ok,
        format!(
            "max drift {:.3e} min coordinate {:.3e} max projection {:.3e}",
            worst.0, worst.1, worst.2
        ),
    ));

    VerifyReport { checks }
}
