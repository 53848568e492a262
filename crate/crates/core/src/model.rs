//! Vector fields of the absolute, proportions and planar systems, the
//! threshold `R0`, and the planar Jacobian.
//!
//! Transmission uses proportionate mixing: a susceptible meets infectives of
//! group `j` at rate `lambda_j · I_j / N`. New infections enter group 1 with
//! probability `p` and group 2 with probability `q = 1 - p`.

use crate::linalg::Matrix2;
use crate::params::ModelParams;
use crate::state::{AbsoluteState, PlanarState, ProportionState};

impl ModelParams {
    /// Threshold quantity `p·λ1/(b+ε+γ1) + q·λ2/(b+ε+γ2)`.
    pub fn r0(&self) -> f64 {
        let (a, b) = self.r0_terms();
        a + b
    }

    /// The two summands of [`ModelParams::r0`], one per infective group.
    pub fn r0_terms(&self) -> (f64, f64) {
        (
            self.p() * self.lambda1() / self.outflow1(),
            self.q() * self.lambda2() / self.outflow2(),
        )
    }

    /// Right-hand side `(S', I1', I2')` of the absolute system.
    pub fn absolute_field(&self, x: &AbsoluteState) -> [f64; 3] {
        self.absolute_field_raw(x.to_array())
    }

    /// [`ModelParams::absolute_field`] without state validation. `N` must be
    /// nonzero.
    pub fn absolute_field_raw(&self, [s, i1, i2]: [f64; 3]) -> [f64; 3] {
        let n = s + i1 + i2;
        let force = (self.lambda1() * i1 + self.lambda2() * i2) * s / n;
        let ds =
            self.b1() * n + (self.b2() - self.d()) * s + self.gamma1() * i1 + self.gamma2() * i2
                - force;
        let di1 = self.p() * force - (self.d() + self.epsilon() + self.gamma1()) * i1;
        let di2 = self.q() * force - (self.d() + self.epsilon() + self.gamma2()) * i2;
        [ds, di1, di2]
    }

    /// `N' = (b1 - d)·N + b2·S - ε·(I1 + I2)`.
    pub fn total_population_rate(&self, x: &AbsoluteState) -> f64 {
        (self.b1() - self.d()) * x.total() + self.b2() * x.susceptible()
            - self.epsilon() * (x.i1() + x.i2())
    }

    /// Right-hand side `(s', i1', i2')` of the proportions system.
    pub fn proportions_field(&self, x: &ProportionState) -> [f64; 3] {
        self.proportions_field_raw(x.to_array())
    }

    /// Proportions field at an arbitrary point of R³, including points off
    /// the plane `s + i1 + i2 = 1`. Used by the Dulac construction and the
    /// invariance checks.
    pub fn proportions_field_raw(&self, [s, i1, i2]: [f64; 3]) -> [f64; 3] {
        let (b1, b2, eps) = (self.b1(), self.b2(), self.epsilon());
        let (l1, l2) = (self.lambda1(), self.lambda2());
        let force = s * (l1 * i1 + l2 * i2);
        let ds = b1 * (1.0 - s)
            + b2 * s * (1.0 - s)
            + self.gamma1() * i1
            + self.gamma2() * i2
            + (eps - l1) * i1 * s
            + (eps - l2) * i2 * s;
        let di1 =
            self.p() * force + eps * i1 * (i1 + i2) - (b1 + eps + self.gamma1()) * i1 - b2 * s * i1;
        let di2 =
            self.q() * force + eps * i2 * (i1 + i2) - (b1 + eps + self.gamma2()) * i2 - b2 * s * i2;
        [ds, di1, di2]
    }

    /// Right-hand side `(i1', i2')` of the planar system obtained by
    /// eliminating `s = 1 - i1 - i2`.
    pub fn planar_field(&self, x: &PlanarState) -> [f64; 2] {
        self.planar_field_raw(x.to_array())
    }

    pub fn planar_field_raw(&self, [i1, i2]: [f64; 2]) -> [f64; 2] {
        let c = PlanarCoefficients::new(self);
        let u = i1 + i2;
        [
            c.lin11 * i1 + c.lin12 * i2 + u * (c.quad1 * i1 - c.lin12 * i2),
            c.lin21 * i1 + c.lin22 * i2 + u * (c.quad2 * i2 - c.lin21 * i1),
        ]
    }

    /// Analytic Jacobian of the planar field.
    pub fn planar_jacobian(&self, x: &PlanarState) -> Matrix2 {
        self.planar_jacobian_raw(x.to_array())
    }

    pub fn planar_jacobian_raw(&self, [i1, i2]: [f64; 2]) -> Matrix2 {
        let c = PlanarCoefficients::new(self);
        Matrix2::new(
            c.lin11 + 2.0 * c.quad1 * i1 + (c.quad1 - c.lin12) * i2,
            c.lin12 + (c.quad1 - c.lin12) * i1 - 2.0 * c.lin12 * i2,
            c.lin21 - 2.0 * c.lin21 * i1 + (c.quad2 - c.lin21) * i2,
            c.lin22 + 2.0 * c.quad2 * i2 + (c.quad2 - c.lin21) * i1,
        )
    }
}

/// Coefficients of the planar quadratic system
///
/// ```text
/// i1' = lin11·i1 + lin12·i2 + (i1 + i2)·(quad1·i1 - lin12·i2)
/// i2' = lin21·i1 + lin22·i2 + (i1 + i2)·(quad2·i2 - lin21·i1)
/// ```
///
/// The linear part is the linearization at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PlanarCoefficients {
    pub lin11: f64,
    pub lin12: f64,
    pub lin21: f64,
    pub lin22: f64,
    pub quad1: f64,
    pub quad2: f64,
}

impl PlanarCoefficients {
    pub fn new(m: &ModelParams) -> Self {
        let (p, q) = (m.p(), m.q());
        let base = m.b2() + m.epsilon();
        PlanarCoefficients {
            lin11: p * m.lambda1() - m.outflow1(),
            lin12: p * m.lambda2(),
            lin21: q * m.lambda1(),
            lin22: q * m.lambda2() - m.outflow2(),
            quad1: base - p * m.lambda1(),
            quad2: base - q * m.lambda2(),
        }
    }
}
