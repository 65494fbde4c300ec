use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// One cell of a measurable function: its value, the measure of the cell and,
/// optionally, the planar chart position of the cell centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub value: f64,
    pub measure: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 2]>,
}

impl Sample {
    pub fn new(value: f64, measure: f64) -> Self {
        Self {
            value,
            measure,
            position: None,
        }
    }

    pub fn at(value: f64, measure: f64, position: [f64; 2]) -> Self {
        Self {
            value,
            measure,
            position: Some(position),
        }
    }
}

/// A function stored as `(value, cell measure)` pairs.
///
/// Construction checks that every measure is positive and every value finite, so
/// downstream norm code never has to re-validate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSamples {
    entries: Vec<Sample>,
    total_measure: f64,
}

impl WeightedSamples {
    pub fn new(entries: Vec<Sample>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyDomain);
        }
        for (i, s) in entries.iter().enumerate() {
            if !s.value.is_finite() {
                return Err(Error::InvalidSamples(format!(
                    "value at cell {i} is not finite"
                )));
            }
            if !(s.measure > 0.0 && s.measure.is_finite()) {
                return Err(Error::InvalidSamples(format!(
                    "measure at cell {i} must be positive, got {}",
                    s.measure
                )));
            }
            if let Some(p) = s.position {
                if !(p[0].is_finite() && p[1].is_finite()) {
                    return Err(Error::InvalidSamples(format!(
                        "position at cell {i} is not finite"
                    )));
                }
            }
        }
        let total_measure = entries.iter().map(|s| s.measure).sum();
        Ok(Self {
            entries,
            total_measure,
        })
    }

    pub fn from_pairs<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(v, m)| Sample::new(v, m)).collect())
    }

    pub fn entries(&self) -> &[Sample] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    /// Measure of `{f != 0}`.
    pub fn support_measure(&self) -> f64 {
        self.entries
            .iter()
            .filter(|s| s.value != 0.0)
            .map(|s| s.measure)
            .sum()
    }

    pub fn has_positions(&self) -> bool {
        self.entries.iter().all(|s| s.position.is_some())
    }

    /// Signed integral, summed in storage order.
    pub fn integral(&self) -> f64 {
        self.entries.iter().map(|s| s.value * s.measure).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|s| s.value.abs() * s.measure).sum()
    }

    pub fn sup_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|s| s.value.abs())
            .fold(0.0, f64::max)
    }

    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(
            self.entries
                .iter()
                .map(|s| Sample {
                    value: f(s.value),
                    ..*s
                })
                .collect(),
        )
    }

    /// Parses `[[value, measure], ...]` or `[[value, r, theta, measure], ...]`.
    /// Polar rows are stored with Cartesian positions.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let rows: Vec<Vec<Value>> = serde_json::from_str(text).map_err(|source| Error::Json {
            context: "samples".into(),
            source,
        })?;
        let mut entries = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let nums: Vec<f64> = row
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| Error::InvalidSamples(format!("row {i}: non-numeric entry")))
                })
                .collect::<Result<_>>()?;
            let sample = match nums.as_slice() {
                [v, m] => Sample::new(*v, *m),
                [v, r, t, m] => Sample::at(*v, *m, [r * t.cos(), r * t.sin()]),
                _ => {
                    return Err(Error::InvalidSamples(format!(
                        "row {i}: expected 2 or 4 numbers, got {}",
                        nums.len()
                    )))
                }
            };
            entries.push(sample);
        }
        Self::new(entries)
    }

    /// Serialises as `[[value, measure], ...]`, or with polar positions when
    /// every sample carries one.
    pub fn to_json_value(&self) -> Value {
        let polar = self.has_positions();
        Value::Array(
            self.entries
                .iter()
                .map(|s| match (polar, s.position) {
                    (true, Some([x, y])) => {
                        serde_json::json!([s.value, x.hypot(y), y.atan2(x), s.measure])
                    }
                    _ => serde_json::json!([s.value, s.measure]),
                })
                .collect(),
        )
    }
}
