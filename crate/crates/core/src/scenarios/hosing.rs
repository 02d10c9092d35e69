//! Piece-wise-linear hosing forcing and the scenario description.

use super::ScenarioError;

/// How a run is initialized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Start on the upper (strong-flow) equilibrium branch at H0.
    UpperBranch,
    /// Start on the lower (reversed-flow) equilibrium branch at H0.
    LowerBranch,
    Explicit { s_n: f64, s_t: f64 },
}

/// A hosing experiment: rise to `h_pert` over `t_rise` years, hold for
/// `t_pert` years (infinity allowed), fall back to `h0` over `t_fall`
/// years. Constant-H runs set `h_pert = h0`.
#[derive(Debug, Clone)]
pub struct HosingScenario {
    pub h0: f64,
    pub h_pert: f64,
    pub t_rise: f64,
    pub t_pert: f64,
    pub t_fall: f64,
    /// Run length in years.
    pub duration: f64,
    /// Additive white-noise amplitude on both salinity equations,
    /// salinity units per sqrt(year).
    pub noise_amplitude: f64,
    pub seed: u64,
    /// Output sampling interval in years.
    pub output_dt: f64,
    /// Internal Euler-Maruyama step in years; must divide `output_dt`.
    pub dt_int: f64,
    pub initial_state: InitialState,
}

impl HosingScenario {
    /// Constant-hosing scenario (no ramp).
    pub fn constant(h: f64, duration: f64) -> Self {
        Self {
            h0: h,
            h_pert: h,
            t_rise: 1.0,
            t_pert: f64::INFINITY,
            t_fall: 1.0,
            duration,
            noise_amplitude: 0.0,
            seed: 0,
            output_dt: 0.2,
            dt_int: 0.01,
            initial_state: InitialState::UpperBranch,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.t_rise > 0.0) {
            return Err(ScenarioError::InvalidScenario("t_rise must be > 0".into()));
        }
        if self.t_pert < 0.0 {
            return Err(ScenarioError::InvalidScenario("t_pert must be >= 0".into()));
        }
        if !(self.t_fall > 0.0) {
            return Err(ScenarioError::InvalidScenario("t_fall must be > 0".into()));
        }
        if !(self.duration >= self.t_rise) {
            return Err(ScenarioError::InvalidScenario(
                "duration must cover at least the rise".into(),
            ));
        }
        if !(self.output_dt > 0.0) {
            return Err(ScenarioError::InvalidScenario("output_dt must be > 0".into()));
        }
        if self.noise_amplitude < 0.0 {
            return Err(ScenarioError::InvalidScenario(
                "noise_amplitude must be >= 0".into(),
            ));
        }
        if !(self.dt_int > 0.0) {
            return Err(ScenarioError::InvalidScenario("dt_int must be > 0".into()));
        }
        let steps = (self.output_dt / self.dt_int).round();
        if steps < 1.0 || (steps * self.dt_int - self.output_dt).abs() > 1e-9 * self.output_dt {
            return Err(ScenarioError::InvalidScenario(format!(
                "dt_int {} must divide output_dt {}",
                self.dt_int, self.output_dt
            )));
        }
        Ok(())
    }

    /// Internal steps per output sample.
    pub(crate) fn steps_per_output(&self) -> usize {
        (self.output_dt / self.dt_int).round() as usize
    }
}

/// The five-segment piece-wise-linear hosing function. The rise and fall
/// rates are `|h_pert - h0| / t_rise` and `|h_pert - h0| / t_fall`; the
/// linear segments carry the sign needed to keep H continuous everywhere.
pub fn hosing(t: f64, sc: &HosingScenario) -> f64 {
    let sign = (sc.h_pert - sc.h0).signum();
    let amp = (sc.h_pert - sc.h0).abs();
    if amp == 0.0 {
        return sc.h0;
    }
    let r_rise = amp / sc.t_rise;
    let r_fall = amp / sc.t_fall;
    if t < 0.0 {
        sc.h0
    } else if t <= sc.t_rise {
        sc.h0 + sign * r_rise * t
    } else if t - sc.t_rise <= sc.t_pert {
        sc.h_pert
    } else if t - sc.t_rise - sc.t_pert <= sc.t_fall {
        sc.h_pert - sign * r_fall * (t - sc.t_rise - sc.t_pert)
    } else {
        sc.h0
    }
}
