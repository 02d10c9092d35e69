//! Early-warning analysis of scalar time series built on sliding-window
//! ARMA model selection, together with a stochastic 3-box ocean-circulation
//! simulator that generates the scenario data the indicator is exercised on.
//!
//! Modules:
//! - [`series`]: time-series container, windowing, differencing, CSV I/O
//! - [`arma`]: ARMA models, exact likelihood, maximum-likelihood fitting
//! - [`stationarity`]: KPSS test and automatic differencing-order choice
//! - [`upsilon`]: per-window model selection and the stability indicator
//! - [`scenarios`]: box model, hosing forcing, equilibria, noise generators

pub mod arma;
pub mod scenarios;
pub mod series;
pub mod stationarity;
pub mod upsilon;

pub use arma::{ArmaError, ArmaModel, FittedArma};
pub use series::{SeriesError, TimeSeries, Window};
