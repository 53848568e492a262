//! Dulac-type certificate against closed orbits in the interior of D.
//!
//! The auxiliary field `g = g1 + g2 + g3` is built from the three pairwise
//! planar projections of the proportions field, each divided by the product
//! of its two coordinates. Each `f_k` below is the proportions field with the
//! third coordinate eliminated through `s + i1 + i2 = 1`, evaluated as a
//! function of the two listed arguments only, so `g` extends to a
//! neighbourhood of the plane.
//!
//! ```text
//! g1(i1, i2) = [0, -f_i2, f_i1] / (i1·i2)
//! g2(s, i2)  = [f_i2, 0, -f_s]  / (s·i2)
//! g3(s, i1)  = [-f_i1, f_s, 0]  / (s·i1)
//! ```
//!
//! Then `g·f = 0` on the plane and `(curl g)·(1,1,1)` has the closed form
//! returned by [`dulac_curl`].

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::state::ProportionState;

/// `(curl g)·(1,1,1) = -(p·λ2/i1² + q·λ1/i2² + (b1+γ1)/(i2·s²) + (b1+γ2)/(i1·s²))`.
pub fn dulac_curl(params: &ModelParams, x: &ProportionState) -> Result<f64> {
    let (s, i1, i2) = (x.s(), x.i1(), x.i2());
    if s <= 0.0 || i1 <= 0.0 || i2 <= 0.0 {
        return Err(Error::InvalidState(
            "Dulac curl is only defined in the interior of D".into(),
        ));
    }
    Ok(-(params.p() * params.lambda2() / (i1 * i1)
        + params.q() * params.lambda1() / (i2 * i2)
        + (params.b1() + params.gamma1()) / (i2 * s * s)
        + (params.b1() + params.gamma2()) / (i1 * s * s)))
}

/// The three summands `[g1, g2, g3]` at a point `(s, i1, i2)` of R³.
pub fn dulac_parts(params: &ModelParams, [s, i1, i2]: [f64; 3]) -> Result<[[f64; 3]; 3]> {
    if i1 * i2 == 0.0 || s * i2 == 0.0 || s * i1 == 0.0 {
        return Err(Error::InvalidState(format!(
            "Dulac field undefined at ({s}, {i1}, {i2})"
        )));
    }
    // (i1, i2) plane
    let [fi1, fi2] = params.planar_field_raw([i1, i2]);
    let w = i1 * i2;
    let g1 = [0.0, -fi2 / w, fi1 / w];
    // (s, i2) plane
    let [fs, _, fi2] = params.proportions_field_raw([s, 1.0 - s - i2, i2]);
    let w = s * i2;
    let g2 = [fi2 / w, 0.0, -fs / w];
    // (s, i1) plane
    let [fs, fi1, _] = params.proportions_field_raw([s, i1, 1.0 - s - i1]);
    let w = s * i1;
    let g3 = [-fi1 / w, fs / w, 0.0];
    Ok([g1, g2, g3])
}

pub fn dulac_field(params: &ModelParams, x: [f64; 3]) -> Result<[f64; 3]> {
    let [a, b, c] = dulac_parts(params, x)?;
    Ok([a[0] + b[0] + c[0], a[1] + b[1] + c[1], a[2] + b[2] + c[2]])
}

/// `(curl g)·(1,1,1)` by central differences of [`dulac_field`] with step
/// `h`, independent of the closed form.
pub fn numerical_curl(params: &ModelParams, x: [f64; 3], h: f64) -> Result<f64> {
    // d[j][i] = ∂g_i/∂x_j
    let mut d = [[0.0; 3]; 3];
    for j in 0..3 {
        let mut hi = x;
        let mut lo = x;
        hi[j] += h;
        lo[j] -= h;
        let gp = dulac_field(params, hi)?;
        let gm = dulac_field(params, lo)?;
        for i in 0..3 {
            d[j][i] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    let curl = [d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]];
    Ok(curl.iter().sum())
}
