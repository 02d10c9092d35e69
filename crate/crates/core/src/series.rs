//! Uniformly sampled scalar time series: the container every other module
//! consumes, plus windowing, differencing, linear detrending and CSV I/O.
//!
//! CSV format: header row required, comma delimiter, optional leading time
//! column named `t`. Values are written with 17 significant digits so that a
//! write/load round trip is bit-exact for f64.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

/// Relative tolerance for the uniform-spacing check on a time column.
const SPACING_RTOL: f64 = 1e-6;

/// Minimum window length accepted by [`windows`]. ARMA fitting below this
/// size is statistically meaningless.
pub const MIN_WINDOW_LEN: usize = 10;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("column {0:?} not found in CSV header")]
    MissingColumn(String),
    #[error("non-uniform sampling at data row {row}: expected step {expected}, got {actual}")]
    NonUniformSampling { row: usize, expected: f64, actual: f64 },
    #[error("non-numeric entry at data row {row}, column {column:?}: {token:?}")]
    NonNumericEntry { row: usize, column: String, token: String },
    #[error("series too short: need at least {need} points, have {have}")]
    TooShort { need: usize, have: usize },
    #[error("window length {tau} exceeds series length {len}")]
    WindowTooLong { tau: usize, len: usize },
    #[error("window length {tau} is below the minimum of {MIN_WINDOW_LEN}")]
    WindowTooShort { tau: usize },
    #[error("empty series")]
    Empty,
    #[error("sampling interval must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// A uniformly sampled scalar series.
///
/// Immutable after construction; all operations on it are pure functions.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
    unit_label: String,
}

impl TimeSeries {
    /// Builds a series, rejecting empty input, non-positive `dt` and any
    /// NaN/Inf entry.
    pub fn new(
        t0: f64,
        dt: f64,
        values: Vec<f64>,
        unit_label: impl Into<String>,
    ) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        if !(dt > 0.0) {
            return Err(SeriesError::NonPositiveStep(dt));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonNumericEntry {
                row: pos + 1,
                column: "<values>".into(),
                token: format!("{}", values[pos]),
            });
        }
        Ok(Self { t0, dt, values, unit_label: unit_label.into() })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit_label(&self) -> &str {
        &self.unit_label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of the i-th sample.
    pub fn time_at(&self, index: usize) -> f64 {
        self.t0 + self.dt * index as f64
    }
}

/// A contiguous slice of a series, identified by start index and length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start_index: usize,
    pub length: usize,
}

impl Window {
    /// Index of the window's final point.
    pub fn end_index(&self) -> usize {
        self.start_index + self.length - 1
    }

    pub fn slice<'a>(&self, series: &'a TimeSeries) -> &'a [f64] {
        &series.values()[self.start_index..self.start_index + self.length]
    }

    /// Time label of the window: the time of its final point. Results are
    /// reported at window end so the indicator stays causal.
    pub fn end_time(&self, series: &TimeSeries) -> f64 {
        series.time_at(self.end_index())
    }
}

/// d-th forward difference of a series. `d = 0` is the identity. The result
/// keeps the sampling step and starts at `t0 + d*dt` (each difference is
/// stamped at the later of the two points it uses).
pub fn difference(series: &TimeSeries, d: usize) -> Result<TimeSeries, SeriesError> {
    if d >= series.len() {
        return Err(SeriesError::TooShort { need: d + 1, have: series.len() });
    }
    let values = difference_values(series.values(), d);
    TimeSeries::new(
        series.t0() + series.dt() * d as f64,
        series.dt(),
        values,
        series.unit_label(),
    )
}

/// Difference on a raw slice; callers must ensure `d < values.len()`.
pub fn difference_values(values: &[f64], d: usize) -> Vec<f64> {
    let mut out = values.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

/// Residuals of an ordinary-least-squares line fit against the sample index.
pub fn detrend_linear(values: &[f64]) -> Result<Vec<f64>, SeriesError> {
    let n = values.len();
    if n < 2 {
        return Err(SeriesError::TooShort { need: 2, have: n });
    }
    let nf = n as f64;
    let x_mean = (nf - 1.0) / 2.0;
    let y_mean = values.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, &y) in values.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, &y)| y - y_mean - slope * (i as f64 - x_mean))
        .collect())
}

/// Sliding windows of length `tau` advanced by `stride`, all fully inside
/// the series. The first window starts at index 0.
pub fn windows(series: &TimeSeries, tau: usize, stride: usize) -> Result<Vec<Window>, SeriesError> {
    if tau < MIN_WINDOW_LEN {
        return Err(SeriesError::WindowTooShort { tau });
    }
    if tau > series.len() {
        return Err(SeriesError::WindowTooLong { tau, len: series.len() });
    }
    let stride = stride.max(1);
    let mut out = Vec::new();
    let mut start = 0usize;
    while start + tau <= series.len() {
        out.push(Window { start_index: start, length: tau });
        start += stride;
    }
    Ok(out)
}

/// Formats a float with 17 significant digits, enough for a bit-exact f64
/// round trip through decimal text.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `t,<label>` CSV with a time column derived from `t0`/`dt`.
pub fn write_csv(series: &TimeSeries, path: &Path, value_column: &str) -> Result<(), SeriesError> {
    let mut body = String::new();
    let _ = writeln!(body, "t,{value_column}");
    for (i, v) in series.values().iter().enumerate() {
        let _ = writeln!(body, "{},{}", format_value(series.time_at(i)), format_value(*v));
    }
    std::fs::write(path, body)?;
    Ok(())
}

/// Which column of a CSV file to read.
#[derive(Debug, Clone)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl ColumnSelector {
    /// Interprets a CLI-style string: an unsigned integer selects by
    /// position, anything else by header name.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        }
    }
}

/// Loads one column of a CSV file as a [`TimeSeries`].
///
/// If the header has a leading column named `t` it is used as the time axis
/// (must be uniformly spaced within a 1e-6 relative tolerance); otherwise
/// `fallback_dt` supplies the step (default 1.0) and `t0 = 0`.
pub fn load_csv(
    path: &Path,
    column: &ColumnSelector,
    fallback_dt: Option<f64>,
) -> Result<TimeSeries, SeriesError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(SeriesError::Empty)?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();

    let has_time = names.first().is_some_and(|n| *n == "t");
    let col_idx = match column {
        ColumnSelector::Name(name) => names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| SeriesError::MissingColumn(name.clone()))?,
        ColumnSelector::Index(i) => {
            if *i >= names.len() {
                return Err(SeriesError::MissingColumn(format!("#{i}")));
            }
            *i
        }
    };
    let col_name = names[col_idx].to_string();

    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (row0, line) in lines.enumerate() {
        let row = row0 + 1; // 1-based data row, header excluded
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |idx: usize, column: &str| -> Result<f64, SeriesError> {
            let token = *fields.get(idx).ok_or_else(|| SeriesError::NonNumericEntry {
                row,
                column: column.to_string(),
                token: "<missing>".into(),
            })?;
            let v: f64 = token.parse().map_err(|_| SeriesError::NonNumericEntry {
                row,
                column: column.to_string(),
                token: token.to_string(),
            })?;
            if !v.is_finite() {
                return Err(SeriesError::NonNumericEntry {
                    row,
                    column: column.to_string(),
                    token: token.to_string(),
                });
            }
            Ok(v)
        };
        if has_time {
            times.push(get(0, "t")?);
        }
        values.push(get(col_idx, &col_name)?);
    }
    if values.is_empty() {
        return Err(SeriesError::Empty);
    }

    let (t0, dt) = if has_time && times.len() >= 2 {
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(SeriesError::NonPositiveStep(dt));
        }
        for i in 2..times.len() {
            let step = times[i] - times[i - 1];
            if (step - dt).abs() > SPACING_RTOL * dt.abs() {
                return Err(SeriesError::NonUniformSampling {
                    row: i + 1,
                    expected: dt,
                    actual: step,
                });
            }
        }
        (times[0], dt)
    } else if has_time {
        (times[0], fallback_dt.unwrap_or(1.0))
    } else {
        (0.0, fallback_dt.unwrap_or(1.0))
    };

    TimeSeries::new(t0, dt, values, col_name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn series(values: &[f64]) -> TimeSeries {
        TimeSeries::new(0.0, 1.0, values.to_vec(), "x").unwrap()
    }

    #[test]
    fn difference_basics() {
        let s = series(&[1.0, 2.0, 4.0, 7.0]);
        assert_eq!(difference(&s, 1).unwrap().values(), &[1.0, 2.0, 3.0]);
        assert_eq!(difference(&s, 0).unwrap().values(), &[1.0, 2.0, 4.0, 7.0]);
        assert_eq!(difference(&s, 2).unwrap().values(), &[1.0, 1.0]);
        assert!(matches!(difference(&s, 4), Err(SeriesError::TooShort { .. })));
    }

    #[test]
    fn difference_composes() {
        let s = series(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0]);
        let twice = difference(&difference(&s, 1).unwrap(), 1).unwrap();
        let once2 = difference(&s, 2).unwrap();
        assert_eq!(twice.values(), once2.values());
        assert_abs_diff_eq!(twice.t0(), once2.t0(), epsilon = 1e-12);
    }

    #[test]
    fn detrend_exact_line_and_constant() {
        for r in detrend_linear(&[1.0, 2.0, 3.0]).unwrap() {
            assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
        }
        for r in detrend_linear(&[0.0, 0.0, 0.0]).unwrap() {
            assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn detrend_three_points() {
        // OLS by hand on [1,0,1]: zero slope, mean 2/3.
        let r = detrend_linear(&[1.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(r[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], -2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[2], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn detrend_residuals_sum_to_zero() {
        let vals: Vec<f64> =
            (0..101).map(|i| (i as f64) * 0.37 + ((i * 7919) % 13) as f64).collect();
        let r = detrend_linear(&vals).unwrap();
        let max = vals.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(r.iter().sum::<f64>().abs() <= 1e-10 * vals.len() as f64 * max);
    }

    #[test]
    fn detrend_idempotent() {
        let vals: Vec<f64> = (0..64).map(|i| 0.3 * i as f64 + ((i * 31) % 7) as f64).collect();
        let once = detrend_linear(&vals).unwrap();
        let twice = detrend_linear(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn windows_layout() {
        let s = series(&[0.0; 10]);
        let w = windows(&s, 5, 5);
        assert!(matches!(w, Err(SeriesError::WindowTooShort { .. })));
        let w = windows(&s, 10, 1).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].end_index(), 9);
        let s20 = series(&[0.0; 20]);
        let w = windows(&s20, 10, 10).unwrap();
        assert_eq!(w.iter().map(|w| w.start_index).collect::<Vec<_>>(), vec![0, 10]);
    }

    #[test]
    fn windows_count_long_series() {
        let s = series(&vec![0.0; 10_000]);
        let w = windows(&s, 350, 1).unwrap();
        assert_eq!(w.len(), 9651);
        // stride 1: every index >= tau-1 is the endpoint of exactly one window
        let ends: Vec<usize> = w.iter().map(Window::end_index).collect();
        assert_eq!(ends, (349..10_000).collect::<Vec<_>>());
    }

    #[test]
    fn windows_too_long() {
        let s = series(&[0.0; 10]);
        assert!(matches!(windows(&s, 11, 1), Err(SeriesError::WindowTooLong { .. })));
    }

    #[test]
    fn load_small_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("small.csv");
        std::fs::write(&p, "t,x\n0,1\n0.2,2\n0.4,3\n").unwrap();
        let s = load_csv(&p, &ColumnSelector::Name("x".into()), None).unwrap();
        assert_abs_diff_eq!(s.t0(), 0.0);
        assert_abs_diff_eq!(s.dt(), 0.2);
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn load_rejects_nonuniform_time() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "t,x\n0,1\n0.2,2\n0.5,3\n").unwrap();
        let err = load_csv(&p, &ColumnSelector::Name("x".into()), None).unwrap_err();
        match err {
            SeriesError::NonUniformSampling { row, .. } => assert_eq!(row, 3),
            other => panic!("expected NonUniformSampling, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_non_numeric_and_nan() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad2.csv");
        std::fs::write(&p, "t,x\n0,1\n1,abc\n").unwrap();
        match load_csv(&p, &ColumnSelector::Name("x".into()), None).unwrap_err() {
            SeriesError::NonNumericEntry { row, token, .. } => {
                assert_eq!(row, 2);
                assert_eq!(token, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
        std::fs::write(&p, "t,x\n0,1\n1,nan\n").unwrap();
        assert!(matches!(
            load_csv(&p, &ColumnSelector::Name("x".into()), None),
            Err(SeriesError::NonNumericEntry { .. })
        ));
    }

    #[test]
    fn load_missing_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cols.csv");
        std::fs::write(&p, "t,x\n0,1\n1,2\n").unwrap();
        assert!(matches!(
            load_csv(&p, &ColumnSelector::Name("y".into()), None),
            Err(SeriesError::MissingColumn(_))
        ));
        assert!(matches!(
            load_csv(&p, &ColumnSelector::Index(5), None),
            Err(SeriesError::MissingColumn(_))
        ));
    }

    #[test]
    fn csv_round_trip_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rt.csv");
        let vals: Vec<f64> = (0..500)
            .map(|i| (i as f64 * 0.1234567890123).sin() * 1e-3 + 1.0 / (i as f64 + 3.0))
            .collect();
        let s = TimeSeries::new(-3.25, 0.2, vals, "x").unwrap();
        write_csv(&s, &p, "x").unwrap();
        let back = load_csv(&p, &ColumnSelector::Name("x".into()), None).unwrap();
        for (i, (a, b)) in s.values().iter().zip(back.values()).enumerate() {
            assert!(a.to_bits() == b.to_bits(), "bit mismatch at {i}");
        }
    }
}
