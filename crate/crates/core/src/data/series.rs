use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Timestamp {
    Index(i64),
    /// ISO-8601 text together with its instant in nanoseconds since the
    /// epoch, used for ordering.
    Iso {
        text: String,
        nanos: i64,
    },
}

impl Timestamp {
    fn parse(raw: &str) -> Option<Self> {
        let raw = raw.trim();
        if let Ok(i) = raw.parse::<i64>() {
            return Some(Self::Index(i));
        }
        let nanos = DateTime::parse_from_rfc3339(raw)
            .ok()
            .and_then(|d| d.timestamp_nanos_opt())
            .or_else(|| {
                ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"]
                    .iter()
                    .find_map(|f| NaiveDateTime::parse_from_str(raw, f).ok())
                    .and_then(|d| d.and_utc().timestamp_nanos_opt())
            })
            .or_else(|| {
                NaiveDate::parse_from_str(raw, "%Y-%m-%d")
                    .ok()
                    .and_then(|d| d.and_hms_opt(0, 0, 0))
                    .and_then(|d| d.and_utc().timestamp_nanos_opt())
            })?;
        Some(Self::Iso {
            text: raw.to_string(),
            nanos,
        })
    }

    fn key(&self) -> (u8, i64) {
        match self {
            Self::Index(i) => (0, *i),
            Self::Iso { nanos, .. } => (1, *nanos),
        }
    }
}

impl std::fmt::Display for Timestamp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Index(i) => write!(f, "{i}"),
            Self::Iso { text, .. } => f.write_str(text),
        }
    }
}

/// A validated univariate series: strictly increasing timestamps, finite
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    timestamps: Vec<Timestamp>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(timestamps: Vec<Timestamp>, values: Vec<f64>) -> Result<Self> {
        if timestamps.len() != values.len() {
            return Err(Error::InvalidData(format!(
                "{} timestamps but {} values",
                timestamps.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!("row {}: non-finite value", i + 1)));
        }
        for (i, pair) in timestamps.windows(2).enumerate() {
            let (a, b) = (pair[0].key(), pair[1].key());
            if a.0 != b.0 {
                return Err(Error::InvalidData(format!(
                    "row {}: mixes integer and ISO-8601 timestamps",
                    i + 2
                )));
            }
            if b.1 <= a.1 {
                return Err(Error::InvalidData(format!(
                    "row {}: timestamp {} is not after {}",
                    i + 2,
                    pair[1],
                    pair[0]
                )));
            }
        }
        Ok(Self { timestamps, values })
    }

    /// Integer timestamps `0..values.len()`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let ts = (0..values.len() as i64).map(Timestamp::Index).collect();
        Self::new(ts, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> &[Timestamp] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn from_reader(reader: impl Read, time_col: &str, value_col: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::InvalidData(format!("missing column `{name}`")))
        };
        let (ti, vi) = (find(time_col)?, find(value_col)?);
        let mut timestamps = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = i + 1;
            let raw_t = rec.get(ti).unwrap_or("");
            let t = Timestamp::parse(raw_t).ok_or_else(|| {
                Error::InvalidData(format!(
                    "row {row}, column `{time_col}`: cannot parse timestamp `{raw_t}`"
                ))
            })?;
            let raw_v = rec.get(vi).unwrap_or("");
            let v: f64 = raw_v.trim().parse().map_err(|_| {
                Error::InvalidData(format!("row {row}, column `{value_col}`: `{raw_v}` is not a number"))
            })?;
            timestamps.push(t);
            values.push(v);
        }
        Self::new(timestamps, values)
    }

    pub fn write_csv(&self, writer: impl Write, time_col: &str, value_col: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([time_col, value_col])?;
        for (t, v) in self.timestamps.iter().zip(&self.values) {
            w.write_record([t.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a series from a CSV file with a header row.
pub fn load_csv(path: impl AsRef<Path>, time_col: &str, value_col: &str) -> Result<TimeSeries> {
    let file = std::fs::File::open(path)?;
    TimeSeries::from_reader(file, time_col, value_col)
}
