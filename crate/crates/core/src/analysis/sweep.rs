//! One-parameter sweeps across the threshold.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{classify_origin, endemic_equilibrium, StabilityClass, HYPERBOLICITY_TOL};
use crate::integrator::fmt17;
use crate::params::{ModelParams, ParamName};
use crate::state::PlanarState;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: ParamName,
    pub value: f64,
    pub r0: Option<f64>,
    pub origin_class: Option<StabilityClass>,
    pub endemic: Option<PlanarState>,
    pub endemic_class: Option<StabilityClass>,
    /// Set when the row could not be computed.
    pub error: Option<String>,
}

impl SweepRow {
    /// Euclidean distance of the endemic point from the origin; zero when
    /// there is none.
    pub fn endemic_distance(&self) -> f64 {
        self.endemic.map_or(0.0, |e| e.i1().hypot(e.i2()))
    }

    /// Endemic point present iff `R0 > 1`, saddle origin iff `R0 > 1`, sink
    /// origin iff `R0 < 1`, all outside the threshold band.
    pub fn is_coherent(&self) -> bool {
        let (Some(r0), Some(origin)) = (self.r0, self.origin_class) else {
            return self.error.is_some();
        };
        if (r0 - 1.0).abs() <= HYPERBOLICITY_TOL {
            return self.endemic.is_none();
        }
        let above = r0 > 1.0;
        above == self.endemic.is_some()
            && above == (origin == StabilityClass::Saddle)
            && !above == (origin == StabilityClass::Sink)
    }
}

/// Evaluates the threshold, the origin's class and the endemic point for
/// each value of one parameter. Rows come back sorted by value; a value
/// that fails validation or solving yields a row with `error` set.
pub fn threshold_sweep(params: &ModelParams, name: ParamName, values: &[f64]) -> Vec<SweepRow> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .par_iter()
        .map(|&value| {
            let mut row = SweepRow {
                parameter: name,
                value,
                r0: None,
                origin_class: None,
                endemic: None,
                endemic_class: None,
                error: None,
            };
            let result = params.with(name, value).and_then(|m| {
                let origin = classify_origin(&m)?;
                let endemic = endemic_equilibrium(&m)?;
                Ok((m.r0(), origin, endemic))
            });
            match result {
                Ok((r0, origin, endemic)) => {
                    row.r0 = Some(r0);
                    row.origin_class = Some(origin);
                    row.endemic = endemic.map(|e| e.location());
                    row.endemic_class = endemic.map(|e| e.class());
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("parameter,value,r0,origin_class,endemic_i1,endemic_i2,endemic_class,error\n");
    let num = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
    let class = |c: Option<StabilityClass>| c.map(|c| c.as_str()).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.parameter,
            fmt17(r.value),
            num(r.r0),
            class(r.origin_class),
            num(r.endemic.map(|e| e.i1())),
            num(r.endemic.map(|e| e.i2())),
            class(r.endemic_class),
            r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decaying_set() -> ModelParams {
        ModelParams::new(0.5, 0.3, 0.1, 0.2, 0.5, 0.8, 0.3, 0.1, 0.5).unwrap()
    }

    #[test]
    fn single_value_matches_direct_computation() {
        let m = decaying_set();
        let rows = threshold_sweep(&m, ParamName::Lambda2, &[3.0]);
        assert_eq!(rows.len(), 1);
        let direct = m.with(ParamName::Lambda2, 3.0).unwrap();
        let e = endemic_equilibrium(&direct).unwrap().unwrap();
        assert_eq!(rows[0].r0, Some(direct.r0()));
        assert_eq!(rows[0].endemic, Some(e.location()));
        assert_eq!(rows[0].origin_class, Some(StabilityClass::Saddle));
    }

    #[test]
    fn rows_sorted_and_errors_captured() {
        let rows = threshold_sweep(&decaying_set(), ParamName::P, &[0.9, -0.5, 0.1, 0.5]);
        let vals: Vec<_> = rows.iter().map(|r| r.value).collect();
        assert_eq!(vals, [-0.5, 0.1, 0.5, 0.9]);
        assert!(rows[0].error.is_some());
        assert!(rows.iter().all(SweepRow::is_coherent));
        let csv = sweep_to_csv(&rows);
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn r0_affine_in_p() {
        // endemic-set rates: group terms 1.0 and 6.25 per unit routing
        let m = ModelParams::new(0.5, 0.3, 0.1, 0.2, 1.0, 5.0, 0.3, 0.1, 0.9).unwrap();
        let ps: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        let rows = threshold_sweep(&m, ParamName::P, &ps);
        let r0: Vec<f64> = rows.iter().map(|r| r.r0.unwrap()).collect();
        assert!(r0.windows(2).all(|w| w[1] < w[0]));

        // equal per-group ratios make R0 flat in p
        let flat = ModelParams::new(0.5, 0.3, 0.1, 0.2, 2.0, 2.0, 0.3, 0.3, 0.5).unwrap();
        let rows = threshold_sweep(&flat, ParamName::P, &ps);
        assert!(rows.iter().all(|r| (r.r0.unwrap() - 2.0).abs() < 1e-14));
    }
}
