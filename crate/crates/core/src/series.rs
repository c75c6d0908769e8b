//! Time-series container, CSV ingestion, chronological splitting, and the
//! RMSE/MAPE metrics shared by every model in the toolkit.
//!
//! All series are uniformly sampled scalar series. Timestamps are epoch
//! seconds; when the input has no timestamp column, hourly stamps
//! (`row index * 3600`) are synthesized so downstream code never has to
//! special-case their absence.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled scalar time series.
///
/// Invariants, enforced at construction: timestamps and values have equal
/// length, timestamps are strictly increasing, and values are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    timestamps: Vec<i64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(timestamps: Vec<i64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if timestamps.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: timestamps.len(),
                right: values.len(),
            });
        }
        for (i, w) in timestamps.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NonMonotoneTimestamps { row: i + 1 });
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::BadValue {
                row: i,
                column: "value".into(),
                value: values[i].to_string(),
            });
        }
        Ok(Self { timestamps, values })
    }

    /// Builds a series from bare values with synthesized hourly timestamps.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let timestamps = (0..values.len() as i64).map(|i| i * 3600).collect();
        Self::new(timestamps, values)
    }

    /// Same timestamps, new values. Used by transforms (filtering,
    /// decomposition) that preserve the time axis.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.timestamps.clone(), values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Chronological train/test split; the first `floor(ratio * len)`
    /// samples go to the train side, the remainder to the test side.
    pub fn split(&self, ratio: f64) -> Result<SplitSeries> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "split ratio must be in (0,1), got {ratio}"
            )));
        }
        if self.len() < 2 {
            return Err(Error::SeriesTooShort {
                needed: 2,
                got: self.len(),
            });
        }
        let train_len = (ratio * self.len() as f64).floor() as usize;
        self.split_at(train_len.clamp(1, self.len() - 1), ratio)
    }

    /// Split at an explicit index (train takes `[0, index)`). Exposed so a
    /// published split that used a different rounding convention can be
    /// reproduced exactly.
    pub fn split_at(&self, index: usize, ratio: f64) -> Result<SplitSeries> {
        if index == 0 || index >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "split index {index} out of range for series of length {}",
                self.len()
            )));
        }
        let train = TimeSeries::new(
            self.timestamps[..index].to_vec(),
            self.values[..index].to_vec(),
        )?;
        let test = TimeSeries::new(
            self.timestamps[index..].to_vec(),
            self.values[index..].to_vec(),
        )?;
        Ok(SplitSeries { train, test, ratio })
    }
}

/// Chronological train/test pair. Train always precedes test; no shuffling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitSeries {
    pub train: TimeSeries,
    pub test: TimeSeries,
    pub ratio: f64,
}

/// Forecast accuracy summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rmse: f64,
    pub mape: f64,
    pub n: usize,
}

impl MetricsReport {
    pub fn compute(pred: &[f64], target: &[f64]) -> Result<Self> {
        Ok(Self {
            rmse: rmse(pred, target)?,
            mape: mape(pred, target)?,
            n: pred.len(),
        })
    }
}

fn check_paired(pred: &[f64], target: &[f64]) -> Result<()> {
    if pred.len() != target.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: target.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(())
}

/// Root mean square error: `sqrt(mean((pred - target)^2))`.
pub fn rmse(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_paired(pred, target)?;
    let mse = pred
        .iter()
        .zip(target)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / pred.len() as f64;
    Ok(mse.sqrt())
}

/// Mean absolute percentage error: `mean(|(pred - target) / target|)`.
///
/// Undefined when any target element is exactly zero; the offending index
/// is reported.
pub fn mape(pred: &[f64], target: &[f64]) -> Result<f64> {
    check_paired(pred, target)?;
    let mut acc = 0.0;
    for (i, (p, t)) in pred.iter().zip(target).enumerate() {
        if *t == 0.0 {
            return Err(Error::ZeroTarget { index: i });
        }
        acc += ((p - t) / t).abs();
    }
    Ok(acc / pred.len() as f64)
}

/// CSV ingestion. Header row required. An optional `timestamp` column
/// (epoch seconds or ISO-8601) is used when present; otherwise hourly
/// stamps are synthesized. The value column is selected by name.
pub fn load_csv(path: &Path, value_column: &str) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);

    let headers = reader
        .headers()
        .map_err(|e| Error::Csv {
            row: 0,
            msg: e.to_string(),
        })?
        .clone();
    let value_idx = headers
        .iter()
        .position(|h| h.trim() == value_column)
        .ok_or_else(|| Error::MissingColumn {
            name: value_column.to_string(),
        })?;
    let ts_idx = headers.iter().position(|h| h.trim() == "timestamp");

    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let row = row_no + 1; // 1-based, header is row 0
        let record = record.map_err(|e| Error::Csv {
            row,
            msg: e.to_string(),
        })?;
        let raw = record.get(value_idx).unwrap_or("").trim();
        let value: f64 = raw.parse().map_err(|_| Error::BadValue {
            row,
            column: value_column.to_string(),
            value: raw.to_string(),
        })?;
        if !value.is_finite() {
            return Err(Error::BadValue {
                row,
                column: value_column.to_string(),
                value: raw.to_string(),
            });
        }
        let ts = match ts_idx {
            Some(idx) => {
                let raw_ts = record.get(idx).unwrap_or("").trim();
                parse_timestamp(raw_ts).ok_or_else(|| Error::BadValue {
                    row,
                    column: "timestamp".to_string(),
                    value: raw_ts.to_string(),
                })?
            }
            None => row_no as i64 * 3600,
        };
        if let Some(&prev) = timestamps.last() {
            if ts <= prev {
                return Err(Error::NonMonotoneTimestamps { row });
            }
        }
        timestamps.push(ts);
        values.push(value);
    }
    TimeSeries::new(timestamps, values)
}

/// Writes a series as `timestamp,value` rows with a header.
pub fn save_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    let as_io = |source: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(as_io)?;
    let mut writer = csv::Writer::from_writer(file);
    writer
        .write_record(["timestamp", "value"])
        .map_err(|e| Error::Csv {
            row: 0,
            msg: e.to_string(),
        })?;
    for (ts, v) in series.timestamps().iter().zip(series.values()) {
        writer
            .write_record([ts.to_string(), format!("{v:?}")])
            .map_err(|e| Error::Csv {
                row: 0,
                msg: e.to_string(),
            })?;
    }
    writer.flush().map_err(as_io)?;
    Ok(())
}

fn parse_timestamp(raw: &str) -> Option<i64> {
    if let Ok(epoch) = raw.parse::<i64>() {
        return Some(epoch);
    }
    if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(raw) {
        return Some(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"] {
        if let Ok(naive) = chrono::NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(naive.and_utc().timestamp());
        }
    }
    None
}
