//! Euler-Maruyama integration of the stochastic box model under a hosing
//! scenario.

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::equilibria::{branch_equilibrium, BranchLabel};
use super::hosing::{hosing, HosingScenario, InitialState};
use super::{BoxModelParams, ScenarioError};
use crate::series::{format_value, TimeSeries};

/// Sampled trajectory of one scenario run. Rows start at t = 0 and advance
/// by the scenario's `output_dt`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub s_n: Vec<f64>,
    pub s_t: Vec<f64>,
    pub s_ip: Vec<f64>,
    pub gamma_flow: Vec<f64>,
    pub h: Vec<f64>,
    pub output_dt: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// North Atlantic salinity as a time series (the variable the
    /// indicator is applied to).
    pub fn s_n_series(&self) -> TimeSeries {
        TimeSeries::new(self.t[0], self.output_dt, self.s_n.clone(), "S_N")
            .expect("trajectory is finite and non-empty")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "t,S_N,S_T,S_IP,Gamma,H");
        for i in 0..self.t.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                format_value(self.t[i]),
                format_value(self.s_n[i]),
                format_value(self.s_t[i]),
                format_value(self.s_ip[i]),
                format_value(self.gamma_flow[i]),
                format_value(self.h[i]),
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_csv()).map_err(|e| {
            ScenarioError::InvalidScenario(format!("cannot write {}: {e}", path.display()))
        })
    }
}

/// Integrates the scenario with the Euler-Maruyama scheme.
///
/// Independent Gaussian noise of identical amplitude is added to both
/// prognostic salinity equations; the flow-reversal branch of the vector
/// field is re-evaluated every internal step. Output is sampled every
/// `output_dt` starting at t = 0; a run of D years at sampling interval o
/// yields D/o rows. Deterministic per seed.
pub fn integrate(
    scenario: &HosingScenario,
    params: &BoxModelParams,
) -> Result<Trajectory, ScenarioError> {
    scenario.validate()?;
    let (mut s_n, mut s_t) = match scenario.initial_state {
        InitialState::Explicit { s_n, s_t } => (s_n, s_t),
        InitialState::UpperBranch => {
            let e = branch_equilibrium(scenario.h0, params, BranchLabel::Upper)?;
            (e.s_n, e.s_t)
        }
        InitialState::LowerBranch => {
            let e = branch_equilibrium(scenario.h0, params, BranchLabel::Lower)?;
            (e.s_n, e.s_t)
        }
    };

    let steps_per_out = scenario.steps_per_output();
    let n_out = (scenario.duration / scenario.output_dt).floor() as usize;
    let dt = scenario.dt_int;
    let noise = scenario.noise_amplitude * dt.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);

    let mut traj = Trajectory {
        t: Vec::with_capacity(n_out),
        s_n: Vec::with_capacity(n_out),
        s_t: Vec::with_capacity(n_out),
        s_ip: Vec::with_capacity(n_out),
        gamma_flow: Vec::with_capacity(n_out),
        h: Vec::with_capacity(n_out),
        output_dt: scenario.output_dt,
    };

    let record = |t: f64, s_n: f64, s_t: f64, traj: &mut Trajectory| {
        traj.t.push(t);
        traj.s_n.push(s_n);
        traj.s_t.push(s_t);
        traj.s_ip.push(params.compute_sip(s_n, s_t));
        traj.gamma_flow.push(params.amoc_flow(s_n));
        traj.h.push(hosing(t, scenario));
    };

    record(0.0, s_n, s_t, &mut traj);
    let mut step_index = 0u64;
    for out_idx in 1..n_out {
        for _ in 0..steps_per_out {
            let t = step_index as f64 * dt;
            let h = hosing(t, scenario);
            let (dn, dtt) = params.derivatives(s_n, s_t, h);
            if noise > 0.0 {
                let z1: f64 =
                    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
                let z2: f64 =
                    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
                s_n += dn * dt + noise * z1;
                s_t += dtt * dt + noise * z2;
            } else {
                s_n += dn * dt;
                s_t += dtt * dt;
            }
            step_index += 1;
        }
        let t_out = out_idx as f64 * scenario.output_dt;
        if !(s_n.is_finite() && s_t.is_finite()) {
            return Err(ScenarioError::NonFiniteState { t: t_out });
        }
        record(t_out, s_n, s_t, &mut traj);
    }
    Ok(traj)
}
