//! Run configuration read from `--config`.

use serde::{Deserialize, Serialize};
use twogroup::{IntegratorConfig, ModelParams, ParamName, SystemKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    R0,
    Equilibria,
    Simulate,
    Sweep,
    Basin,
    Verify,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::R0 => "r0",
            Command::Equilibria => "equilibria",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Basin => "basin",
            Command::Verify => "verify",
        }
    }

    fn integrates(&self) -> bool {
        matches!(self, Command::Simulate | Command::Basin | Command::Verify)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateBlock {
    pub system: SystemKind,
    pub initial: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub parameter: ParamName,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasinBlock {
    pub grid_n: usize,
}

/// Everything a subcommand reads. Model rates have no defaults; integrator
/// settings do, and the resolved values are echoed into the sidecar.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basin: Option<BasinBlock>,
}

impl RunConfig {
    /// Parses `text` and checks that exactly the blocks `cmd` needs are
    /// present. Integrator defaults are filled in for commands that integrate.
    pub fn parse(text: &str, cmd: Command) -> Result<Self, String> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let present = [
            ("simulate", cfg.simulate.is_some(), cmd == Command::Simulate),
            ("sweep", cfg.sweep.is_some(), cmd == Command::Sweep),
            ("basin", cfg.basin.is_some(), cmd == Command::Basin),
            ("integrator", cfg.integrator.is_some(), cmd.integrates()),
        ];
        for (key, has, wanted) in present {
            if has && !wanted {
                return Err(format!("key \"{key}\" is not used by `{}`", cmd.as_str()));
            }
            if !has && wanted && key != "integrator" {
                return Err(format!(
                    "missing key \"{key}\" required by `{}`",
                    cmd.as_str()
                ));
            }
        }
        if cmd.integrates() {
            let ic = cfg.integrator.unwrap_or_default();
            ic.validate().map_err(|e| e.to_string())?;
            cfg.integrator = Some(ic);
        }
        if let Some(s) = &cfg.sweep {
            if s.values.is_empty() {
                return Err("sweep.values must not be empty".into());
            }
            if let Some(v) = s.values.iter().find(|v| !v.is_finite()) {
                return Err(format!("sweep.values contains non-finite {v}"));
            }
        }
        Ok(cfg)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        self.integrator.unwrap_or_default()
    }
}
