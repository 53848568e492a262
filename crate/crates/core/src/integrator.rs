//! Adaptive Dormand–Prince 5(4) integration of the three systems, with
//! capture of trajectories that settle on a rest point.
//!
//! Steps are clipped so that every multiple of `record_every` is hit
//! exactly; trajectories of different systems started together therefore
//! share sample times.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::equilibria::RestPoint;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::state::{AbsoluteState, PlanarState, ProportionState, SIMPLEX_TOL};

/// Coordinates in `(-NEG_CLAMP, 0)` are set to zero after each step.
pub const NEG_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Absolute,
    Proportions,
    Planar,
}

impl SystemKind {
    pub fn dim(&self) -> usize {
        match self {
            SystemKind::Planar => 2,
            _ => 3,
        }
    }

    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            SystemKind::Absolute => &["t", "S", "I1", "I2", "N"],
            SystemKind::Proportions => &["t", "s", "i1", "i2"],
            SystemKind::Planar => &["t", "i1", "i2"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Absolute(AbsoluteState),
    Proportions(ProportionState),
    Planar(PlanarState),
}

impl InitialState {
    /// Validates raw coordinates for the given system.
    pub fn from_slice(kind: SystemKind, x: &[f64]) -> Result<Self> {
        if x.len() != kind.dim() {
            return Err(Error::InvalidState(format!(
                "{kind:?} system needs {} coordinates, got {}",
                kind.dim(),
                x.len()
            )));
        }
        Ok(match kind {
            SystemKind::Absolute => InitialState::Absolute(AbsoluteState::new(x[0], x[1], x[2])?),
            SystemKind::Proportions => {
                InitialState::Proportions(ProportionState::new(x[0], x[1], x[2])?)
            }
            SystemKind::Planar => InitialState::Planar(PlanarState::new(x[0], x[1])?),
        })
    }

    pub fn kind(&self) -> SystemKind {
        match self {
            InitialState::Absolute(_) => SystemKind::Absolute,
            InitialState::Proportions(_) => SystemKind::Proportions,
            InitialState::Planar(_) => SystemKind::Planar,
        }
    }

    fn coords(&self) -> Vec<f64> {
        match self {
            InitialState::Absolute(x) => x.to_array().to_vec(),
            InitialState::Proportions(x) => x.to_array().to_vec(),
            InitialState::Planar(x) => x.to_array().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub t_end: f64,
    pub record_every: f64,
    pub convergence_tol: f64,
    pub stall_window: f64,
    /// Project proportions states back onto `s + i1 + i2 = 1` after each
    /// step. The corrections are recorded in the trajectory.
    pub project_simplex: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: 1e-3,
            h_min: 1e-12,
            h_max: 1.0,
            t_end: 1000.0,
            record_every: 1.0,
            convergence_tol: 1e-8,
            stall_window: 10.0,
            project_simplex: true,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParams(format!("integrator config: {msg}")));
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("h_min", self.h_min),
            ("t_end", self.t_end),
            ("record_every", self.record_every),
            ("convergence_tol", self.convergence_tol),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return bad(&format!("{name} must be finite and > 0"));
            }
        }
        if !(self.h_min <= self.h_init && self.h_init <= self.h_max) || !self.h_max.is_finite() {
            return bad("need 0 < h_min <= h_init <= h_max");
        }
        if !self.stall_window.is_finite() || self.stall_window < 0.0 {
            return bad("stall_window must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerminalReason {
    HorizonReached,
    /// Index into the rest-point list passed to [`integrate`].
    ConvergedTo(usize),
    StepSizeUnderflow,
}

/// Recorded samples of one integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    system: SystemKind,
    times: Vec<f64>,
    states: Vec<f64>,
    speeds: Vec<f64>,
    terminal: TerminalReason,
    capture_time: Option<f64>,
    max_projection: f64,
    steps: usize,
}

impl Trajectory {
    pub fn system(&self) -> SystemKind {
        self.system
    }
    pub fn len(&self) -> usize {
        self.times.len()
    }
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn state(&self, k: usize) -> &[f64] {
        let d = self.system.dim();
        &self.states[k * d..(k + 1) * d]
    }
    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks(self.system.dim())
    }
    /// Euclidean norm of the vector field at each sample.
    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }
    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }
    pub fn last_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectories hold at least one sample")
    }
    pub fn terminal(&self) -> TerminalReason {
        self.terminal
    }
    pub fn capture_time(&self) -> Option<f64> {
        self.capture_time
    }
    /// Largest `|s + i1 + i2 - 1|` removed by simplex projection in any step.
    pub fn max_projection(&self) -> f64 {
        self.max_projection
    }
    /// Accepted steps.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// CSV with a header row; 17 significant digits. Absolute trajectories
    /// carry an extra `N` column.
    pub fn to_csv(&self) -> String {
        let mut out = self.system.columns().join(",");
        out.push('\n');
        for (t, x) in self.times.iter().zip(self.states()) {
            let _ = write!(out, "{}", fmt17(*t));
            for v in x {
                let _ = write!(out, ",{}", fmt17(*v));
            }
            if self.system == SystemKind::Absolute {
                let _ = write!(out, ",{}", fmt17(x.iter().sum()));
            }
            out.push('\n');
        }
        out
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Result of checking a trajectory against a list of rest points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceOutcome {
    pub limit: Option<RestPoint>,
    pub index: Option<usize>,
    pub time_of_capture: Option<f64>,
}

/// Tracks whether samples stay on one rest point for a full window.
struct Monitor<'a> {
    targets: &'a [Vec<f64>],
    tol: f64,
    window: f64,
    candidate: Option<(usize, f64)>,
}

impl<'a> Monitor<'a> {
    fn new(targets: &'a [Vec<f64>], config: &IntegratorConfig) -> Self {
        Monitor {
            targets,
            tol: config.convergence_tol,
            window: config.stall_window,
            candidate: None,
        }
    }

    /// Feeds one sample; returns `(rest point index, capture time)` once the
    /// state has stayed near the same rest point, with speed below the
    /// tolerance, for the full window. A state where the field vanishes
    /// exactly is captured at once.
    fn observe(&mut self, t: f64, x: &[f64], speed: f64) -> Option<(usize, f64)> {
        let nearest = self
            .targets
            .iter()
            .enumerate()
            .map(|(k, r)| (k, dist(r, x)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((k, d)) if d <= self.tol && speed <= self.tol => {
                if speed == 0.0 {
                    return Some((k, t));
                }
                match self.candidate {
                    Some((c, since)) if c == k => {
                        if t - since >= self.window {
                            return Some((k, since));
                        }
                    }
                    _ => self.candidate = Some((k, t)),
                }
            }
            _ => self.candidate = None,
        }
        None
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Rest point coordinates expressed in the given system.
fn targets_for(kind: SystemKind, rest_points: &[RestPoint]) -> Vec<Vec<f64>> {
    match kind {
        SystemKind::Absolute => Vec::new(),
        SystemKind::Proportions => rest_points
            .iter()
            .map(|r| r.location().to_simplex().to_array().to_vec())
            .collect(),
        SystemKind::Planar => rest_points
            .iter()
            .map(|r| r.location().to_array().to_vec())
            .collect(),
    }
}

fn field(params: &ModelParams, kind: SystemKind, x: &[f64], out: &mut [f64]) {
    match kind {
        SystemKind::Absolute => out.copy_from_slice(&params.absolute_field_raw([x[0], x[1], x[2]])),
        SystemKind::Proportions => {
            out.copy_from_slice(&params.proportions_field_raw([x[0], x[1], x[2]]))
        }
        SystemKind::Planar => out.copy_from_slice(&params.planar_field_raw([x[0], x[1]])),
    }
}

// Dormand–Prince 5(4) tableau. The systems are autonomous, so the nodes
// are not needed; the last row holds the fifth-order weights.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const GROW_MIN: f64 = 0.2;
const GROW_MAX: f64 = 5.0;

/// Integrates one system from `initial` until `t_end`, capture by one of
/// `rest_points`, or step-size underflow.
///
/// Capture is checked at recorded samples only, with the same rule as
/// [`detect_convergence`], so replaying the samples reproduces the outcome.
/// Rest points are ignored for the absolute system.
pub fn integrate(
    params: &ModelParams,
    initial: &InitialState,
    config: &IntegratorConfig,
    rest_points: &[RestPoint],
) -> Result<Trajectory> {
    config.validate()?;
    let kind = initial.kind();
    let dim = kind.dim();
    let targets = targets_for(kind, rest_points);
    let mut monitor = Monitor::new(&targets, config);
    let project = config.project_simplex && kind == SystemKind::Proportions;

    let mut y = initial.coords();
    let mut k = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];

    let mut traj = Trajectory {
        system: kind,
        times: Vec::new(),
        states: Vec::new(),
        speeds: Vec::new(),
        terminal: TerminalReason::HorizonReached,
        capture_time: None,
        max_projection: 0.0,
        steps: 0,
    };

    let mut t = 0.0;
    field(params, kind, &y, &mut k[0]);
    let push = |traj: &mut Trajectory, t: f64, y: &[f64], speed: f64| {
        traj.times.push(t);
        traj.states.extend_from_slice(y);
        traj.speeds.push(speed);
    };
    push(&mut traj, t, &y, norm(&k[0]));
    if let Some((idx, at)) = monitor.observe(t, &y, norm(&k[0])) {
        traj.terminal = TerminalReason::ConvergedTo(idx);
        traj.capture_time = Some(at);
        return Ok(traj);
    }

    let mut h = config.h_init;
    let mut record_idx: u64 = 1;
    loop {
        let next_record = (record_idx as f64 * config.record_every).min(config.t_end);
        let mut h_try = h.min(config.h_max).min(next_record - t);
        let lands = h_try >= next_record - t;
        if lands {
            h_try = next_record - t;
        }

        for s in 1..7 {
            for i in 0..dim {
                let acc: f64 = (0..s).map(|j| A[s][j] * k[j][i]).sum();
                stage[i] = y[i] + h_try * acc;
            }
            field(params, kind, &stage, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }

        let mut err = 0.0;
        for i in 0..dim {
            let e: f64 = h_try * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            let sc = config.atol + config.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();
        // every system keeps its coordinates non-negative, so a step that
        // leaves the orthant by more than the clamp is rejected
        let shift = if project {
            (y_new.iter().sum::<f64>() - 1.0) / dim as f64
        } else {
            0.0
        };
        let escaped = y_new.iter().any(|&v| v - shift <= -NEG_CLAMP);

        if err <= 1.0 && !escaped {
            t = if lands { next_record } else { t + h_try };
            let mut touched = false;
            if project {
                traj.max_projection = traj.max_projection.max((shift * dim as f64).abs());
                y_new.iter_mut().for_each(|v| *v -= shift);
                touched = shift != 0.0;
            }
            for v in y_new.iter_mut() {
                if *v < 0.0 && *v > -NEG_CLAMP {
                    *v = 0.0;
                    touched = true;
                }
            }
            y.copy_from_slice(&y_new);
            traj.steps += 1;
            // FSAL: the last stage is f(y_new) unless y was adjusted
            if touched {
                field(params, kind, &y, &mut k[0]);
            } else {
                let last = k[6].clone();
                k[0].copy_from_slice(&last);
            }

            let factor = if err == 0.0 {
                GROW_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(GROW_MIN, GROW_MAX)
            };
            h = (h_try * factor)
                .min(config.h_max)
                .max(if lands { h } else { 0.0 });

            if lands {
                let speed = norm(&k[0]);
                push(&mut traj, t, &y, speed);
                record_idx += 1;
                if let Some((idx, at)) = monitor.observe(t, &y, speed) {
                    traj.terminal = TerminalReason::ConvergedTo(idx);
                    traj.capture_time = Some(at);
                    return Ok(traj);
                }
                if t >= config.t_end {
                    traj.terminal = TerminalReason::HorizonReached;
                    return Ok(traj);
                }
            }
        } else {
            let factor = if escaped && err <= 1.0 {
                0.5
            } else if err.is_finite() {
                (SAFETY * err.powf(-0.2)).clamp(GROW_MIN, 1.0)
            } else {
                GROW_MIN
            };
            h = h_try * factor;
            if h < config.h_min {
                if t > traj.last_time() {
                    push(&mut traj, t, &y, norm(&k[0]));
                }
                traj.terminal = TerminalReason::StepSizeUnderflow;
                return Ok(traj);
            }
        }
    }
}

/// Replays the capture rule over the recorded samples of `trajectory`.
pub fn detect_convergence(
    trajectory: &Trajectory,
    rest_points: &[RestPoint],
    config: &IntegratorConfig,
) -> ConvergenceOutcome {
    let targets = targets_for(trajectory.system, rest_points);
    let mut monitor = Monitor::new(&targets, config);
    for (k, x) in trajectory.states().enumerate() {
        if let Some((idx, at)) = monitor.observe(trajectory.times[k], x, trajectory.speeds[k]) {
            return ConvergenceOutcome {
                limit: Some(rest_points[idx]),
                index: Some(idx),
                time_of_capture: Some(at),
            };
        }
    }
    ConvergenceOutcome {
        limit: None,
        index: None,
        time_of_capture: None,
    }
}

/// Positive-invariance audit of a proportions or planar trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceReport {
    /// False for absolute trajectories, which have no invariant region.
    pub applicable: bool,
    /// Largest `|s + i1 + i2 - 1|` over samples (planar: excess of
    /// `i1 + i2` over one).
    pub max_simplex_drift: f64,
    pub min_coordinate: f64,
    /// Largest per-step correction applied by simplex projection.
    pub max_projection: f64,
    /// Samples outside the region beyond tolerance.
    pub violations: usize,
}

impl InvarianceReport {
    pub fn passes(&self) -> bool {
        self.violations == 0
    }
}

pub fn invariance_audit(trajectory: &Trajectory) -> InvarianceReport {
    if trajectory.system == SystemKind::Absolute {
        return InvarianceReport {
            applicable: false,
            max_simplex_drift: 0.0,
            min_coordinate: 0.0,
            max_projection: 0.0,
            violations: 0,
        };
    }
    let mut drift_max = 0.0_f64;
    let mut min_coord = f64::INFINITY;
    let mut violations = 0;
    for x in trajectory.states() {
        let sum: f64 = x.iter().sum();
        let drift = match trajectory.system {
            SystemKind::Planar => (sum - 1.0).max(0.0),
            _ => (sum - 1.0).abs(),
        };
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
        drift_max = drift_max.max(drift);
        min_coord = min_coord.min(lo);
        if drift > SIMPLEX_TOL || lo < -NEG_CLAMP {
            violations += 1;
        }
    }
    if trajectory.max_projection > SIMPLEX_TOL {
        violations += 1;
    }
    InvarianceReport {
        applicable: true,
        max_simplex_drift: drift_max,
        min_coordinate: min_coord,
        max_projection: trajectory.max_projection,
        violations,
    }
}
