//! Parameter sweeps over a scenario document.

use rayon::prelude::*;

use crate::config::{is_numeric_key, set_value, to_scenario, ConfigError, Document};
use crate::report::table_csv;
use crate::sim::{run, MetricsReport, SimError};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub metrics: MetricsReport,
}

fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        v.to_string()
    }
}

/// One run per value of the numeric field `key`; rows keep the order of
/// `values`. Runs execute in parallel and share nothing.
pub fn sweep(doc: &Document, key: &str, values: &[f64]) -> Result<Vec<SweepRow>, ConfigError> {
    if !is_numeric_key(key) {
        return Err(ConfigError::Usage(format!("sweep key `{key}` is not a numeric field")));
    }
    if values.is_empty() {
        return Err(ConfigError::Usage("sweep needs at least one value".into()));
    }
    let scenarios = values
        .iter()
        .map(|&v| {
            let mut d = doc.clone();
            set_value(&mut d, key, &format_value(v))?;
            to_scenario(&d)
        })
        .collect::<Result<Vec<_>, _>>()?;
    scenarios
        .par_iter()
        .zip(values.par_iter())
        .map(|(sc, &value)| {
            run(sc)
                .map(|o| SweepRow {
                    value,
                    metrics: o.metrics,
                })
                .map_err(|e| match e {
                    SimError::Invalid(err) => ConfigError::from(err),
                    other => ConfigError::Usage(other.to_string()),
                })
        })
        .collect()
}

/// `sweep.csv` contents: one row per value.
pub fn sweep_csv(key: &str, rows: &[SweepRow]) -> Vec<u8> {
    table_csv(key, rows.iter().map(|r| (format_value(r.value), &r.metrics)))
}

/// Parse `a,b,c` or `start:stop:step` into values.
pub fn parse_values(input: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = || ConfigError::Usage(format!("cannot parse sweep values `{input}`"));
    let parts: Vec<&str> = input.split(':').collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let (a, b, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || b < a {
            return Err(bad());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| a + step * i as f64).collect());
    }
    input.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}
