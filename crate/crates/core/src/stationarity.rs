//! KPSS stationarity testing and automatic choice of the differencing
//! order applied before ARMA fitting.
//!
//! Level-stationarity variant (null: stationary around a constant), 5%
//! level, Bartlett-kernel long-run variance, Schwert-style automatic lag
//! `floor(4 (n/100)^{1/4})`. The smallest differencing order that passes
//! the test wins; a unit-root test is deliberately not used because it
//! over-differences.

use thiserror::Error;

use crate::series::difference_values;

/// 5% critical value of the level-stationarity KPSS distribution.
pub const KPSS_CRIT_5PCT: f64 = 0.463;

/// Minimum sample size for the test.
pub const KPSS_MIN_LEN: usize = 12;

#[derive(Debug, Error)]
pub enum StationarityError {
    #[error("series too short: need at least {need} points, have {have}")]
    TooShort { need: usize, have: usize },
    #[error("zero-variance (constant) input")]
    ZeroVariance,
    #[error("d_max must be at most 2, got {0}")]
    InvalidDMax(usize),
}

/// Outcome of a KPSS level-stationarity test.
#[derive(Debug, Clone, Copy)]
pub struct KpssResult {
    pub statistic: f64,
    pub lags: usize,
    pub critical_value: f64,
    pub reject_stationarity: bool,
}

/// Bartlett-window lag count `floor(4 (n/100)^{1/4})`.
pub fn auto_lags(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// KPSS level-stationarity test at the 5% level.
///
/// Demeans the series, forms partial sums, and divides the mean squared
/// partial sum by the Bartlett-kernel estimate of the long-run variance.
pub fn kpss(values: &[f64], lags: Option<usize>) -> Result<KpssResult, StationarityError> {
    let n = values.len();
    if n < KPSS_MIN_LEN {
        return Err(StationarityError::TooShort { need: KPSS_MIN_LEN, have: n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let resid: Vec<f64> = values.iter().map(|v| v - mean).collect();

    let var = resid.iter().map(|e| e * e).sum::<f64>() / nf;
    let guard = 1e-12 * mean * mean + 1e-300;
    if var < guard {
        return Err(StationarityError::ZeroVariance);
    }

    let mut cum = 0.0;
    let mut eta = 0.0;
    for e in &resid {
        cum += e;
        eta += cum * cum;
    }
    eta /= nf * nf;

    let l = lags.unwrap_or_else(|| auto_lags(n));
    let mut s2 = var;
    for j in 1..=l.min(n - 1) {
        let w = 1.0 - j as f64 / (l as f64 + 1.0);
        let mut gamma_j = 0.0;
        for t in j..n {
            gamma_j += resid[t] * resid[t - j];
        }
        gamma_j /= nf;
        s2 += 2.0 * w * gamma_j;
    }
    let s2 = s2.max(1e-300);

    let statistic = eta / s2;
    Ok(KpssResult {
        statistic,
        lags: l,
        critical_value: KPSS_CRIT_5PCT,
        reject_stationarity: statistic > KPSS_CRIT_5PCT,
    })
}

/// Smallest d <= d_max whose d-th difference the KPSS test accepts as
/// stationary; d_max when every order is rejected.
pub fn choose_d(values: &[f64], d_max: usize) -> Result<usize, StationarityError> {
    if d_max > 2 {
        return Err(StationarityError::InvalidDMax(d_max));
    }
    let need = KPSS_MIN_LEN + d_max;
    if values.len() < need {
        return Err(StationarityError::TooShort { need, have: values.len() });
    }
    for d in 0..=d_max {
        let diffed = difference_values(values, d);
        match kpss(&diffed, None) {
            Ok(r) if !r.reject_stationarity => return Ok(d),
            // A constant difference is as stationary as it gets.
            Err(StationarityError::ZeroVariance) => return Ok(d),
            _ => {}
        }
    }
    Ok(d_max)
}
