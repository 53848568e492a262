//! State types for the three coordinate systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted deviation of `s + i1 + i2` from one.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Population counts `(S, I1, I2)` with positive total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsoluteState {
    s: f64,
    i1: f64,
    i2: f64,
}

impl AbsoluteState {
    pub fn new(s: f64, i1: f64, i2: f64) -> Result<Self> {
        for (name, v) in [("S", s), ("I1", i1), ("I2", i2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidState(format!("{name} must be >= 0, got {v}")));
            }
        }
        if s + i1 + i2 <= 0.0 {
            return Err(Error::InvalidState(
                "total population N = S + I1 + I2 must be > 0".into(),
            ));
        }
        Ok(AbsoluteState { s, i1, i2 })
    }

    pub fn susceptible(&self) -> f64 {
        self.s
    }
    pub fn i1(&self) -> f64 {
        self.i1
    }
    pub fn i2(&self) -> f64 {
        self.i2
    }
    pub fn total(&self) -> f64 {
        self.s + self.i1 + self.i2
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.s, self.i1, self.i2]
    }

    pub fn to_proportions(&self) -> ProportionState {
        let n = self.total();
        ProportionState {
            s: self.s / n,
            i1: self.i1 / n,
            i2: self.i2 / n,
        }
    }
}

/// Fractions `(s, i1, i2)` on the simplex `s + i1 + i2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionState {
    s: f64,
    i1: f64,
    i2: f64,
}

impl ProportionState {
    pub fn new(s: f64, i1: f64, i2: f64) -> Result<Self> {
        for (name, v) in [("s", s), ("i1", i1), ("i2", i2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidState(format!("{name} must be >= 0, got {v}")));
            }
        }
        let drift = (s + i1 + i2 - 1.0).abs();
        if drift > SIMPLEX_TOL {
            return Err(Error::InvalidState(format!(
                "s + i1 + i2 must equal 1 (off by {drift:e})"
            )));
        }
        Ok(ProportionState { s, i1, i2 })
    }

    pub const DISEASE_FREE: ProportionState = ProportionState {
        s: 1.0,
        i1: 0.0,
        i2: 0.0,
    };

    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn i1(&self) -> f64 {
        self.i1
    }
    pub fn i2(&self) -> f64 {
        self.i2
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.s, self.i1, self.i2]
    }

    /// Drops `s`.
    pub fn to_planar(&self) -> PlanarState {
        PlanarState {
            i1: self.i1,
            i2: self.i2,
        }
    }
}

/// Infective fractions `(i1, i2)` in the triangle `i1, i2 >= 0, i1 + i2 <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarState {
    i1: f64,
    i2: f64,
}

impl PlanarState {
    pub fn new(i1: f64, i2: f64) -> Result<Self> {
        for (name, v) in [("i1", i1), ("i2", i2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidState(format!("{name} must be >= 0, got {v}")));
            }
        }
        if i1 + i2 > 1.0 + SIMPLEX_TOL {
            return Err(Error::InvalidState(format!(
                "i1 + i2 must not exceed 1, got {}",
                i1 + i2
            )));
        }
        Ok(PlanarState { i1, i2 })
    }

    pub const ORIGIN: PlanarState = PlanarState { i1: 0.0, i2: 0.0 };

    pub fn i1(&self) -> f64 {
        self.i1
    }
    pub fn i2(&self) -> f64 {
        self.i2
    }

    pub fn to_array(&self) -> [f64; 2] {
        [self.i1, self.i2]
    }

    /// Restores the eliminated susceptible fraction, `s = 1 - i1 - i2`.
    pub fn to_simplex(&self) -> ProportionState {
        ProportionState {
            s: (1.0 - self.i1 - self.i2).max(0.0),
            i1: self.i1,
            i2: self.i2,
        }
    }

    /// Whether the point lies strictly inside the triangle.
    pub fn is_interior(&self) -> bool {
        self.i1 > 0.0 && self.i2 > 0.0 && self.i1 + self.i2 < 1.0
    }
}
