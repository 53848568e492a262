//! Grid probe of where interior starting points end up.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{all_rest_points, HYPERBOLICITY_TOL};
use crate::error::{Error, Result};
use crate::integrator::{fmt17, integrate, InitialState, IntegratorConfig, TerminalReason};
use crate::params::ModelParams;
use crate::state::PlanarState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BasinLabel {
    Origin,
    Endemic,
    Unresolved,
}

impl BasinLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasinLabel::Origin => "origin",
            BasinLabel::Endemic => "endemic",
            BasinLabel::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasinCell {
    pub i1: f64,
    pub i2: f64,
    pub label: BasinLabel,
    pub capture_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BasinCounts {
    pub origin: usize,
    pub endemic: usize,
    pub unresolved: usize,
}

impl BasinCounts {
    pub fn total(&self) -> usize {
        self.origin + self.endemic + self.unresolved
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasinReport {
    pub grid_n: usize,
    pub r0: f64,
    pub cells: Vec<BasinCell>,
    pub counts: BasinCounts,
}

impl BasinReport {
    /// Every cell reaches the endemic point above threshold and the origin
    /// below it, with nothing unresolved.
    pub fn matches_threshold(&self) -> bool {
        if self.counts.unresolved > 0 {
            return false;
        }
        if self.r0 > 1.0 + HYPERBOLICITY_TOL {
            self.counts.endemic == self.cells.len()
        } else {
            self.counts.origin == self.cells.len()
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i1,i2,label,capture_time\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt17(c.i1),
                fmt17(c.i2),
                c.label.as_str(),
                c.capture_time.map(fmt17).unwrap_or_default()
            );
        }
        out
    }
}

/// Interior points `(j, k)/(n + 1)` with `j, k >= 1` and `j + k <= n`.
pub fn basin_grid(grid_n: usize) -> Vec<PlanarState> {
    let step = 1.0 / (grid_n as f64 + 1.0);
    (1..=grid_n)
        .flat_map(|j| (1..=grid_n - j).map(move |k| (j, k)))
        .map(|(j, k)| PlanarState::new(j as f64 * step, k as f64 * step).expect("interior"))
        .collect()
}

/// Integrates the planar system from every grid point and labels it by the
/// rest point that captures it.
pub fn basin_probe(
    params: &ModelParams,
    grid_n: usize,
    config: &IntegratorConfig,
) -> Result<BasinReport> {
    if grid_n < 2 {
        return Err(Error::InvalidParams(format!(
            "grid_n must be >= 2, got {grid_n}"
        )));
    }
    config.validate()?;
    let rest = all_rest_points(params)?;
    let cells = basin_grid(grid_n)
        .par_iter()
        .map(|x| {
            let tr = integrate(params, &InitialState::Planar(*x), config, &rest)?;
            let label = match tr.terminal() {
                TerminalReason::ConvergedTo(k) if rest[k].is_origin() => BasinLabel::Origin,
                TerminalReason::ConvergedTo(_) => BasinLabel::Endemic,
                _ => BasinLabel::Unresolved,
            };
            Ok(BasinCell {
                i1: x.i1(),
                i2: x.i2(),
                label,
                capture_time: tr.capture_time(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = BasinCounts::default();
    for c in &cells {
        match c.label {
            BasinLabel::Origin => counts.origin += 1,
            BasinLabel::Endemic => counts.endemic += 1,
            BasinLabel::Unresolved => counts.unresolved += 1,
        }
    }
    Ok(BasinReport {
        grid_n,
        r0: params.r0(),
        cells,
        counts,
    })
}
