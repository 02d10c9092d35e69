//! Artificial colored-noise series: a fast linear relaxation driven by an
//! AR(1) forcing whose coefficient and innovation amplitude ramp linearly
//! across the run. Variance and autocorrelation rise steadily with no
//! tipping point anywhere, which is exactly what classical early-warning
//! indicators cannot distinguish from an approaching transition.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ScenarioError;
use crate::series::TimeSeries;

/// Relaxation rate of dx/dt = -DECAY_RATE * x + xi(t).
const DECAY_RATE: f64 = 5.0;

/// Largest internal Euler step; output intervals are subdivided to stay
/// well inside the stability region of the explicit scheme.
const MAX_INNER_DT: f64 = 0.02;

#[derive(Debug, Clone)]
pub struct ColoredNoiseConfig {
    /// Number of output points.
    pub n: usize,
    /// Output sampling interval (non-dimensional time units).
    pub dt: f64,
    /// AR(1) coefficient of the forcing at the start and end of the run.
    pub ar_start: f64,
    pub ar_end: f64,
    /// Innovation standard deviation at the start and end of the run.
    pub sd_start: f64,
    pub sd_end: f64,
    pub seed: u64,
}

impl Default for ColoredNoiseConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            dt: 0.5,
            ar_start: 0.0,
            ar_end: 0.95,
            sd_start: 1.0,
            sd_end: 10.0,
            seed: 0,
        }
    }
}

impl ColoredNoiseConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        for (name, v) in [("ar_start", self.ar_start), ("ar_end", self.ar_end)] {
            if !(0.0..1.0).contains(&v) {
                return Err(ScenarioError::InvalidRamp(format!(
                    "{name} must lie in [0, 1), got {v}"
                )));
            }
        }
        for (name, v) in [("sd_start", self.sd_start), ("sd_end", self.sd_end)] {
            if !(v > 0.0) {
                return Err(ScenarioError::InvalidRamp(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.n < 2 {
            return Err(ScenarioError::InvalidRamp("n must be >= 2".into()));
        }
        if !(self.dt > 0.0) {
            return Err(ScenarioError::InvalidRamp("dt must be > 0".into()));
        }
        Ok(())
    }
}

/// Simulates dx/dt = -5x + xi(t) with xi an AR(1) sequence at the output
/// resolution whose coefficient and innovation amplitude ramp linearly.
/// The forcing is held over each sampling interval and x advances by inner
/// Euler sub-steps. Deterministic per seed.
pub fn colored_noise_series(cfg: &ColoredNoiseConfig) -> Result<TimeSeries, ScenarioError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let inner = (cfg.dt / MAX_INNER_DT).ceil().max(1.0);
    let dt_in = cfg.dt / inner;
    let inner = inner as usize;

    let mut xi = 0.0f64;
    let mut x = 0.0f64;
    let mut values = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let frac = i as f64 / (cfg.n - 1) as f64;
        let ar = cfg.ar_start + (cfg.ar_end - cfg.ar_start) * frac;
        let sd = cfg.sd_start + (cfg.sd_end - cfg.sd_start) * frac;
        let z: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        xi = ar * xi + sd * z;
        for _ in 0..inner {
            x += dt_in * (-DECAY_RATE * x + xi);
        }
        values.push(x);
    }
    Ok(TimeSeries::new(0.0, cfg.dt, values, "x")?)
}
