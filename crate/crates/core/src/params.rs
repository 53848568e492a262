//! Model parameters.
//!
//! All rates share one arbitrary time unit. The disease-free death rate `d`
//! only enters the absolute system: it cancels when the equations are
//! rewritten for proportions, so the proportions and planar fields ignore it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The eight epidemiological rates plus the fraction `p` of new infections
/// routed into the first infective group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    b: f64,
    b1: f64,
    d: f64,
    epsilon: f64,
    lambda1: f64,
    lambda2: f64,
    gamma1: f64,
    gamma2: f64,
    p: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    b: f64,
    b1: f64,
    d: f64,
    epsilon: f64,
    lambda1: f64,
    lambda2: f64,
    gamma1: f64,
    gamma2: f64,
    p: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        ModelParams::new(
            r.b, r.b1, r.d, r.epsilon, r.lambda1, r.lambda2, r.gamma1, r.gamma2, r.p,
        )
    }
}

impl From<ModelParams> for RawParams {
    fn from(m: ModelParams) -> Self {
        RawParams {
            b: m.b,
            b1: m.b1,
            d: m.d,
            epsilon: m.epsilon,
            lambda1: m.lambda1,
            lambda2: m.lambda2,
            gamma1: m.gamma1,
            gamma2: m.gamma2,
            p: m.p,
        }
    }
}

impl ModelParams {
    /// Validates and builds a parameter set.
    ///
    /// Every rate must be finite and strictly positive, `b1 <= b`, and
    /// `0 <= p <= 1`. The endpoints of `p` are accepted; the model then has a
    /// single active infective class.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        b: f64,
        b1: f64,
        d: f64,
        epsilon: f64,
        lambda1: f64,
        lambda2: f64,
        gamma1: f64,
        gamma2: f64,
        p: f64,
    ) -> Result<Self> {
        let rates = [
            ("b", b),
            ("b1", b1),
            ("d", d),
            ("epsilon", epsilon),
            ("lambda1", lambda1),
            ("lambda2", lambda2),
            ("gamma1", gamma1),
            ("gamma2", gamma2),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if b1 > b {
            return Err(Error::InvalidParams(format!(
                "b1 must not exceed b (b1={b1}, b={b})"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!(
                "p must lie in [0, 1], got {p}"
            )));
        }
        Ok(ModelParams {
            b,
            b1,
            d,
            epsilon,
            lambda1,
            lambda2,
            gamma1,
            gamma2,
            p,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("parameters always serialize")
    }

    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn b1(&self) -> f64 {
        self.b1
    }
    /// Birth rate surplus of susceptibles over infectives, `b - b1`.
    pub fn b2(&self) -> f64 {
        self.b - self.b1
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }
    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }
    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// Total outflow rate of the first infective group in proportions,
    /// `b + epsilon + gamma1`.
    pub fn outflow1(&self) -> f64 {
        self.b + self.epsilon + self.gamma1
    }

    /// `b + epsilon + gamma2`.
    pub fn outflow2(&self) -> f64 {
        self.b + self.epsilon + self.gamma2
    }

    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::B => self.b,
            ParamName::B1 => self.b1,
            ParamName::D => self.d,
            ParamName::Epsilon => self.epsilon,
            ParamName::Lambda1 => self.lambda1,
            ParamName::Lambda2 => self.lambda2,
            ParamName::Gamma1 => self.gamma1,
            ParamName::Gamma2 => self.gamma2,
            ParamName::P => self.p,
        }
    }

    /// Returns a copy with one parameter replaced, revalidated.
    pub fn with(&self, name: ParamName, value: f64) -> Result<Self> {
        let mut r = RawParams::from(*self);
        match name {
            ParamName::B => r.b = value,
            ParamName::B1 => r.b1 = value,
            ParamName::D => r.d = value,
            ParamName::Epsilon => r.epsilon = value,
            ParamName::Lambda1 => r.lambda1 = value,
            ParamName::Lambda2 => r.lambda2 = value,
            ParamName::Gamma1 => r.gamma1 = value,
            ParamName::Gamma2 => r.gamma2 = value,
            ParamName::P => r.p = value,
        }
        ModelParams::try_from(r)
    }
}

/// Names of the nine model parameters, spelled as in the JSON schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    B,
    B1,
    D,
    Epsilon,
    Lambda1,
    Lambda2,
    Gamma1,
    Gamma2,
    P,
}

impl ParamName {
    pub const ALL: [ParamName; 9] = [
        ParamName::B,
        ParamName::B1,
        ParamName::D,
        ParamName::Epsilon,
        ParamName::Lambda1,
        ParamName::Lambda2,
        ParamName::Gamma1,
        ParamName::Gamma2,
        ParamName::P,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ParamName::B => "b",
            ParamName::B1 => "b1",
            ParamName::D => "d",
            ParamName::Epsilon => "epsilon",
            ParamName::Lambda1 => "lambda1",
            ParamName::Lambda2 => "lambda2",
            ParamName::Gamma1 => "gamma1",
            ParamName::Gamma2 => "gamma2",
            ParamName::P => "p",
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown parameter name `{s}`")))
    }
}
