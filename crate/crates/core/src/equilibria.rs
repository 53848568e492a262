//! Rest points of the planar system and their linear stability.
//!
//! At a rest point both `i1' = L1 + u·K1` and `i2' = L2 + u·K2` vanish
//! (`u = i1 + i2`, `L` linear, `K` linear), so `L1·K2 - L2·K1 = 0`. That
//! difference is a homogeneous quadratic form in `(i1, i2)`; its zero set is
//! a pair of lines through the origin, exactly one of which enters the
//! feasible triangle. Every interior rest point therefore lies on a single
//! ray `i2 = m·i1`, and substituting the ray into `i1'` leaves a quadratic
//! in `i1` with one nonzero root.

use num_complex::Complex64;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix2;
use crate::model::PlanarCoefficients;
use crate::params::ModelParams;
use crate::state::PlanarState;

/// Relative tolerance below which an eigenvalue real part counts as zero.
/// Also the margin around `R0 = 1` treated as the threshold itself.
pub const HYPERBOLICITY_TOL: f64 = 1e-8;

/// Largest accepted `|f|` at a reported rest point.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StabilityClass {
    Sink,
    Saddle,
    Source,
    NonHyperbolic,
}

impl StabilityClass {
    /// Classification from eigenvalue real parts, with a zero band of width
    /// `HYPERBOLICITY_TOL` times the spectral radius.
    pub fn from_eigenvalues(eig: &[Complex64; 2]) -> Self {
        let radius = eig[0].norm().max(eig[1].norm());
        if radius == 0.0 {
            return StabilityClass::NonHyperbolic;
        }
        let tol = HYPERBOLICITY_TOL * radius;
        if eig.iter().any(|e| e.re.abs() <= tol) {
            return StabilityClass::NonHyperbolic;
        }
        match eig.iter().filter(|e| e.re > 0.0).count() {
            0 => StabilityClass::Sink,
            1 => StabilityClass::Saddle,
            _ => StabilityClass::Source,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityClass::Sink => "Sink",
            StabilityClass::Saddle => "Saddle",
            StabilityClass::Source => "Source",
            StabilityClass::NonHyperbolic => "NonHyperbolic",
        }
    }
}

impl std::fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An equilibrium of the planar system with its linearization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestPoint {
    location: PlanarState,
    jacobian: Matrix2,
    eigenvalues: [Complex64; 2],
    class: StabilityClass,
    residual: f64,
}

impl RestPoint {
    /// Linearizes the planar field at `location`. Nothing checks that the
    /// location is actually a rest point; see [`RestPoint::residual`].
    pub fn evaluate(params: &ModelParams, location: PlanarState) -> Self {
        let jacobian = params.planar_jacobian(&location);
        let eigenvalues = jacobian.eigenvalues();
        let [f1, f2] = params.planar_field(&location);
        RestPoint {
            location,
            jacobian,
            eigenvalues,
            class: StabilityClass::from_eigenvalues(&eigenvalues),
            residual: f1.hypot(f2),
        }
    }

    pub fn location(&self) -> PlanarState {
        self.location
    }
    pub fn jacobian(&self) -> Matrix2 {
        self.jacobian
    }
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        self.eigenvalues
    }
    pub fn class(&self) -> StabilityClass {
        self.class
    }
    pub fn residual(&self) -> f64 {
        self.residual
    }
    pub fn is_origin(&self) -> bool {
        self.location == PlanarState::ORIGIN
    }
}

impl Serialize for RestPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Eig {
            re: f64,
            im: f64,
        }
        let eig = self.eigenvalues.map(|e| Eig { re: e.re, im: e.im });
        let mut st = serializer.serialize_struct("RestPoint", 6)?;
        st.serialize_field("i1", &self.location.i1())?;
        st.serialize_field("i2", &self.location.i2())?;
        st.serialize_field("s", &self.location.to_simplex().s())?;
        st.serialize_field("eigenvalues", &eig)?;
        st.serialize_field("class", &self.class)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

/// Linearization of the planar system at the origin.
pub fn origin_matrix(params: &ModelParams) -> Matrix2 {
    let c = PlanarCoefficients::new(params);
    Matrix2::new(c.lin11, c.lin12, c.lin21, c.lin22)
}

/// Stability of the disease-free state from the eigenvalues of the origin
/// matrix, cross-checked against the `R0` rule (sink below one, saddle
/// above). Either test landing in its zero band gives `NonHyperbolic`.
pub fn classify_origin(params: &ModelParams) -> Result<StabilityClass> {
    let by_eigen = StabilityClass::from_eigenvalues(&origin_matrix(params).eigenvalues());
    let r0 = params.r0();
    let by_r0 = if (r0 - 1.0).abs() <= HYPERBOLICITY_TOL {
        StabilityClass::NonHyperbolic
    } else if r0 < 1.0 {
        StabilityClass::Sink
    } else {
        StabilityClass::Saddle
    };
    match (by_eigen, by_r0) {
        (a, b) if a == b => Ok(a),
        (StabilityClass::NonHyperbolic, _) | (_, StabilityClass::NonHyperbolic) => {
            Ok(StabilityClass::NonHyperbolic)
        }
        (a, b) => Err(Error::Internal(format!(
            "origin classified {a} from eigenvalues but {b} from R0 = {r0}"
        ))),
    }
}

/// Homogeneous quadratic `A·i1² + B·i1·i2 + C·i2²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticForm {
    pub fn eval(&self, i1: f64, i2: f64) -> f64 {
        self.a * i1 * i1 + self.b * i1 * i2 + self.c * i2 * i2
    }
}

/// `L1·K2 - L2·K1`, where the planar field is `i1' = L1 + u·K1`,
/// `i2' = L2 + u·K2`. Vanishes at every rest point.
pub fn conic_difference(params: &ModelParams, i1: f64, i2: f64) -> f64 {
    let c = PlanarCoefficients::new(params);
    let l1 = c.lin11 * i1 + c.lin12 * i2;
    let k1 = c.quad1 * i1 - c.lin12 * i2;
    let l2 = c.lin21 * i1 + c.lin22 * i2;
    let k2 = c.quad2 * i2 - c.lin21 * i1;
    l1 * k2 - l2 * k1
}

/// Coefficients of [`conic_difference`] as a quadratic form.
///
/// `A = q·λ1·(b1 + γ1)` and `C = -p·λ2·(b1 + γ2)` are closed forms; the
/// cross term is extracted as `B = Q(1,1) - Q(1,0) - Q(0,1)`.
pub fn equilibrium_quadratic(params: &ModelParams) -> QuadraticForm {
    let a = params.q() * params.lambda1() * (params.b1() + params.gamma1());
    let c = -params.p() * params.lambda2() * (params.b1() + params.gamma2());
    let b = conic_difference(params, 1.0, 1.0)
        - conic_difference(params, 1.0, 0.0)
        - conic_difference(params, 0.0, 1.0);
    QuadraticForm { a, b, c }
}

/// Slope `m >= 0` of the line `i2 = m·i1` carrying every interior rest
/// point. Requires `0 < p < 1`.
pub fn equilibrium_ray(params: &ModelParams) -> Result<f64> {
    let p = params.p();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::Degenerate(format!(
            "equilibrium ray needs 0 < p < 1, got p = {p}"
        )));
    }
    let QuadraticForm { a, b, c } = equilibrium_quadratic(params);
    // C·m² + B·m + A = 0 with A > 0 > C: roots of opposite sign
    let root = (b * b - 4.0 * a * c).sqrt();
    let m = if b >= 0.0 {
        (b + root) / (-2.0 * c)
    } else {
        2.0 * a / (root - b)
    };
    Ok(m)
}

/// The unique interior rest point, present iff `R0 > 1`.
///
/// For `p` equal to 0 or 1 only one infective class is fed and the point
/// sits on the corresponding axis.
pub fn endemic_equilibrium(params: &ModelParams) -> Result<Option<RestPoint>> {
    if params.r0() <= 1.0 + HYPERBOLICITY_TOL {
        return Ok(None);
    }
    let c = PlanarCoefficients::new(params);
    let (i1, i2) = if params.p() == 1.0 {
        (-c.lin11 / c.quad1, 0.0)
    } else if params.p() == 0.0 {
        (0.0, -c.lin22 / c.quad2)
    } else {
        let m = equilibrium_ray(params)?;
        // i1' restricted to the ray: alpha·i1 + beta·i1²
        let alpha = c.lin11 + c.lin12 * m;
        let beta = (1.0 + m) * (c.quad1 - c.lin12 * m);
        if beta == 0.0 {
            return Err(Error::Internal(
                "no quadratic term along the equilibrium ray".into(),
            ));
        }
        let i1 = -alpha / beta;
        (i1, m * i1)
    };
    let inside = i1 >= 0.0 && i2 >= 0.0 && i1 + i2 > 0.0 && i1 + i2 < 1.0;
    if !inside || !i1.is_finite() || !i2.is_finite() {
        return Err(Error::Internal(format!(
            "endemic point ({i1}, {i2}) outside the feasible triangle with R0 = {}",
            params.r0()
        )));
    }
    let point = RestPoint::evaluate(params, PlanarState::new(i1, i2)?);
    if point.residual() > RESIDUAL_TOL {
        return Err(Error::Internal(format!(
            "endemic point residual {:e} exceeds {RESIDUAL_TOL:e}",
            point.residual()
        )));
    }
    if matches!(
        point.class(),
        StabilityClass::Saddle | StabilityClass::Source
    ) {
        return Err(Error::Internal(format!(
            "endemic point classified {}",
            point.class()
        )));
    }
    Ok(Some(point))
}

/// The origin followed by the endemic point when it exists.
///
/// Also scans a 200×200 grid of D1 for sign changes of both field
/// components and fails if any cell hides a rest point not in the list.
pub fn all_rest_points(params: &ModelParams) -> Result<Vec<RestPoint>> {
    let mut origin = RestPoint::evaluate(params, PlanarState::ORIGIN);
    origin.class = classify_origin(params)?;
    let mut points = vec![origin];
    if let Some(e) = endemic_equilibrium(params)? {
        points.push(e);
    }
    let known: Vec<_> = points.iter().map(|p| p.location()).collect();
    let extra = scan_unreported_rest_points(params, 200, &known);
    if let Some(x) = extra.first() {
        return Err(Error::Internal(format!(
            "grid scan found an unreported rest point at ({}, {})",
            x.i1(),
            x.i2()
        )));
    }
    Ok(points)
}

/// Brute-force search for rest points in D1 other than `known`.
///
/// Cells of an `n×n` grid over the unit square that touch D1 are flagged
/// when both field components change sign (or vanish) over the cell's
/// corners; each flagged cell seeds a Newton iteration. Converged roots that
/// lie in D1 and are farther than `1e-6` from every known point are
/// returned.
pub fn scan_unreported_rest_points(
    params: &ModelParams,
    n: usize,
    known: &[PlanarState],
) -> Vec<PlanarState> {
    let h = 1.0 / n as f64;
    let nodes: Vec<[f64; 2]> = (0..=n)
        .flat_map(|j| (0..=n).map(move |k| [j as f64 * h, k as f64 * h]))
        .map(|x| params.planar_field_raw(x))
        .collect();
    let at = |j: usize, k: usize| nodes[j * (n + 1) + k];

    let mut found: Vec<PlanarState> = Vec::new();
    for j in 0..n {
        for k in 0..n {
            if (j + k) as f64 * h > 1.0 + 1e-12 {
                continue;
            }
            let corners = [at(j, k), at(j + 1, k), at(j, k + 1), at(j + 1, k + 1)];
            let straddles = |c: usize| {
                let lo = corners.iter().map(|f| f[c]).fold(f64::INFINITY, f64::min);
                let hi = corners
                    .iter()
                    .map(|f| f[c])
                    .fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if !(straddles(0) && straddles(1)) {
                continue;
            }
            let seed = [(j as f64 + 0.5) * h, (k as f64 + 0.5) * h];
            let Some(root) = newton(params, seed) else {
                continue;
            };
            let in_d1 = root[0] >= -1e-12 && root[1] >= -1e-12 && root[0] + root[1] <= 1.0 + 1e-12;
            let is_new = |x: &PlanarState| (x.i1() - root[0]).hypot(x.i2() - root[1]) > 1e-6;
            if in_d1 && known.iter().all(is_new) && found.iter().all(is_new) {
                if let Ok(x) = PlanarState::new(root[0].max(0.0), root[1].max(0.0)) {
                    found.push(x);
                }
            }
        }
    }
    found
}

fn newton(params: &ModelParams, mut x: [f64; 2]) -> Option<[f64; 2]> {
    let scale = 1.0 + origin_matrix(params).max_abs();
    for _ in 0..60 {
        let f = params.planar_field_raw(x);
        if f[0].hypot(f[1]) <= 1e-13 * scale {
            return Some(x);
        }
        let j = params.planar_jacobian_raw(x);
        let det = j.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (f[0] * j.a22 - f[1] * j.a12) / det;
        let dy = (f[1] * j.a11 - f[0] * j.a21) / det;
        x = [x[0] - dx, x[1] - dy];
        if !x[0].is_finite() || !x[1].is_finite() || x[0].abs() > 10.0 || x[1].abs() > 10.0 {
            return None;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ParamName;

    fn endemic_set() -> ModelParams {
        ModelParams::new(0.5, 0.3, 0.1, 0.2, 1.0, 5.0, 0.3, 0.1, 0.9).unwrap()
    }

    fn decaying_set() -> ModelParams {
        ModelParams::new(0.5, 0.3, 0.1, 0.2, 0.5, 0.8, 0.3, 0.1, 0.5).unwrap()
    }

    fn symmetric() -> ModelParams {
        ModelParams::new(0.5, 0.3, 0.1, 0.2, 2.0, 2.0, 0.3, 0.3, 0.5).unwrap()
    }

    /// Solves R0 = 1 for lambda1 with everything else fixed.
    fn at_threshold(m: &ModelParams) -> ModelParams {
        let l1 = (1.0 - m.q() * m.lambda2() / m.outflow2()) * m.outflow1() / m.p();
        m.with(ParamName::Lambda1, l1).unwrap()
    }

    #[test]
    fn origin_matrix_signs_follow_r0() {
        let a = origin_matrix(&endemic_set());
        assert!(a.det() < 0.0);
        let b = origin_matrix(&decaying_set());
        assert!(b.det() > 0.0 && b.trace() < 0.0);
        let one = origin_matrix(&endemic_set().with(ParamName::P, 1.0).unwrap());
        assert_eq!(one.a21, 0.0);
        let [e1, e2] = one.eigenvalues();
        assert!((e1.re - one.a11).abs() < 1e-15 && (e2.re - one.a22).abs() < 1e-15);
    }

    #[test]
    fn det_factorizes_through_r0() {
        for m in [endemic_set(), decaying_set(), symmetric()] {
            let want = m.outflow1() * m.outflow2() * (1.0 - m.r0());
            assert!((origin_matrix(&m).det() - want).abs() < 1e-13);
        }
    }

    #[test]
    fn origin_classification() {
        assert_eq!(
            classify_origin(&decaying_set()).unwrap(),
            StabilityClass::Sink
        );
        assert_eq!(
            classify_origin(&endemic_set()).unwrap(),
            StabilityClass::Saddle
        );
        let t = at_threshold(&endemic_set());
        assert!((t.r0() - 1.0).abs() < 1e-14);
        assert_eq!(classify_origin(&t).unwrap(), StabilityClass::NonHyperbolic);
    }

    #[test]
    fn quadratic_form_reference_values() {
        let f = equilibrium_quadratic(&endemic_set());
        assert!((f.a - 0.06).abs() < 1e-15);
        assert!((f.c + 1.8).abs() < 1e-14);
        // exact rational evaluation of Q(1,1) - A - C gives -7/50
        assert!((f.b + 0.14).abs() < 1e-14);
        assert_eq!(conic_difference(&endemic_set(), 1.0, 0.0), f.a);
        assert!((conic_difference(&endemic_set(), 0.0, 1.0) - f.c).abs() < 1e-15);
    }

    #[test]
    fn symmetric_form_is_antisymmetric() {
        let f = equilibrium_quadratic(&symmetric());
        assert!((f.a + f.c).abs() < 1e-15);
        assert!(f.b.abs() < 1e-14);
        assert!((equilibrium_ray(&symmetric()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ray_reference_values() {
        let m = equilibrium_ray(&endemic_set()).unwrap();
        let f = equilibrium_quadratic(&endemic_set());
        // quadratic formula for -1.8 m² - 0.14 m + 0.06 = 0
        let want = (0.14 - (0.14f64.powi(2) + 4.0 * 1.8 * 0.06).sqrt()) / -3.6;
        assert!((m - want).abs() < 1e-14);
        let other = (0.14 + (0.14f64.powi(2) + 4.0 * 1.8 * 0.06).sqrt()) / -3.6;
        assert!(other < 0.0 && (m * other - f.a / f.c).abs() < 1e-14);
        assert!(f.eval(1.0, m).abs() < 1e-10);
    }

    #[test]
    fn ray_rejects_single_group() {
        for p in [0.0, 1.0] {
            let m = endemic_set().with(ParamName::P, p).unwrap();
            assert!(matches!(equilibrium_ray(&m), Err(Error::Degenerate(_))));
        }
    }

    #[test]
    fn endemic_reference_point() {
        assert!(endemic_equilibrium(&decaying_set()).unwrap().is_none());
        assert!(endemic_equilibrium(&at_threshold(&endemic_set()))
            .unwrap()
            .is_none());
        let e = endemic_equilibrium(&endemic_set()).unwrap().unwrap();
        // DOP853 (rtol 1e-13) from (0.4, 0.4), t = 1000
        let x = e.location();
        assert!((x.i1() - 0.422541480840943).abs() < 1e-6);
        assert!((x.i2() - 0.062443638338486).abs() < 1e-6);
        assert_eq!(e.class(), StabilityClass::Sink);
        assert!(e.jacobian().trace() < 0.0);
        assert!(e.residual() <= RESIDUAL_TOL);
        let m = equilibrium_ray(&endemic_set()).unwrap();
        assert!((x.i2() - m * x.i1()).abs() <= 1e-10 * x.i2());
    }

    #[test]
    fn single_group_endemic_on_axis() {
        // p = 1 leaves R0 = lambda1/(b+eps+gamma1), so raise lambda1 to 2
        let one = endemic_set()
            .with(ParamName::P, 1.0)
            .and_then(|m| m.with(ParamName::Lambda1, 2.0))
            .unwrap();
        let e = endemic_equilibrium(&one).unwrap().unwrap();
        assert_eq!(e.location().i2(), 0.0);
        assert!(e.location().i1() > 0.0);
        assert_eq!(e.class(), StabilityClass::Sink);

        // p = 0: only the second group is fed; lambda2/(b+eps+gamma2) = 6.25
        let zero = endemic_set().with(ParamName::P, 0.0).unwrap();
        let e = endemic_equilibrium(&zero).unwrap().unwrap();
        assert_eq!(e.location().i1(), 0.0);
        assert!(e.residual() <= RESIDUAL_TOL);
    }

    #[test]
    fn rest_point_lists() {
        let b = all_rest_points(&decaying_set()).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].class(), StabilityClass::Sink);
        assert!(b[0].is_origin());

        let a = all_rest_points(&endemic_set()).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].class(), StabilityClass::Saddle);
        assert_eq!(a[1].class(), StabilityClass::Sink);

        let t = all_rest_points(&at_threshold(&endemic_set())).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].class(), StabilityClass::NonHyperbolic);
    }

    #[test]
    fn scan_finds_endemic_when_not_told() {
        let found = scan_unreported_rest_points(&endemic_set(), 200, &[PlanarState::ORIGIN]);
        assert_eq!(found.len(), 1);
        assert!((found[0].i1() - 0.422541480840943).abs() < 1e-9);
    }

    #[test]
    fn rest_point_json_shape() {
        let e = endemic_equilibrium(&endemic_set()).unwrap().unwrap();
        let v = serde_json::to_value(e).unwrap();
        let obj = v.as_object().unwrap();
        let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["class", "eigenvalues", "i1", "i2", "residual", "s"]);
        assert_eq!(obj["class"], "Sink");
        assert_eq!(obj["eigenvalues"].as_array().unwrap().len(), 2);
        assert!(obj["eigenvalues"][0].get("re").is_some());
    }
}
