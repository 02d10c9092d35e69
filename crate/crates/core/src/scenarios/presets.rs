//! Named scenario presets and the key = value config format.
//!
//! Format: one `key = value` pair per line; `#` starts a comment (units and
//! provenance live in comments); blank lines ignored. `t_pert = inf` is
//! accepted for runs whose hosing never falls back.

use super::colored::ColoredNoiseConfig;
use super::hosing::{HosingScenario, InitialState};
use super::ScenarioError;

pub const PRESET_B_TIP: &str = include_str!("../../presets/b_tip.conf");
pub const PRESET_N_TIP_UP: &str = include_str!("../../presets/n_tip_up.conf");
pub const PRESET_N_TIP_DOWN: &str = include_str!("../../presets/n_tip_down.conf");
pub const PRESET_R_TIP: &str = include_str!("../../presets/r_tip.conf");
pub const PRESET_R_NOTIP: &str = include_str!("../../presets/r_notip.conf");
pub const PRESET_COLORED_NOISE: &str = include_str!("../../presets/colored_noise.conf");

/// Names of the built-in presets, hosing scenarios first.
pub const PRESET_NAMES: [&str; 6] =
    ["b_tip", "n_tip_up", "n_tip_down", "r_tip", "r_notip", "colored_noise"];

/// Raw text of a built-in preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    match name {
        "b_tip" => Some(PRESET_B_TIP),
        "n_tip_up" => Some(PRESET_N_TIP_UP),
        "n_tip_down" => Some(PRESET_N_TIP_DOWN),
        "r_tip" => Some(PRESET_R_TIP),
        "r_notip" => Some(PRESET_R_NOTIP),
        "colored_noise" => Some(PRESET_COLORED_NOISE),
        _ => None,
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(usize, String, String)>, ScenarioError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ScenarioError::Parse {
            line: i + 1,
            msg: format!("expected key = value, got {line:?}"),
        })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ScenarioError> {
    if v.eq_ignore_ascii_case("inf") || v.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    v.parse().map_err(|_| ScenarioError::Parse {
        line,
        msg: format!("{key}: not a number: {v:?}"),
    })
}

/// Parses a hosing scenario config.
pub fn parse_scenario(text: &str) -> Result<HosingScenario, ScenarioError> {
    let mut sc = HosingScenario::constant(0.0, 2000.0);
    let mut kind_ok = true;
    for (line, key, value) in parse_pairs(text)? {
        match key.as_str() {
            "kind" => kind_ok = value == "hosing",
            "h0" => sc.h0 = parse_f64(line, &key, &value)?,
            "h_pert" => sc.h_pert = parse_f64(line, &key, &value)?,
            "t_rise" => sc.t_rise = parse_f64(line, &key, &value)?,
            "t_pert" => sc.t_pert = parse_f64(line, &key, &value)?,
            "t_fall" => sc.t_fall = parse_f64(line, &key, &value)?,
            "duration" => sc.duration = parse_f64(line, &key, &value)?,
            "noise_amplitude" => sc.noise_amplitude = parse_f64(line, &key, &value)?,
            "output_dt" => sc.output_dt = parse_f64(line, &key, &value)?,
            "dt_int" => sc.dt_int = parse_f64(line, &key, &value)?,
            "seed" => {
                sc.seed = value.parse().map_err(|_| ScenarioError::Parse {
                    line,
                    msg: format!("seed: not an integer: {value:?}"),
                })?
            }
            "initial_state" => {
                sc.initial_state = match value.as_str() {
                    "upper" => InitialState::UpperBranch,
                    "lower" => InitialState::LowerBranch,
                    other => {
                        let (a, b) = other.split_once(',').ok_or(ScenarioError::Parse {
                            line,
                            msg: format!(
                                "initial_state must be upper, lower or \"s_n,s_t\", got {other:?}"
                            ),
                        })?;
                        InitialState::Explicit {
                            s_n: parse_f64(line, "initial_state.s_n", a.trim())?,
                            s_t: parse_f64(line, "initial_state.s_t", b.trim())?,
                        }
                    }
                }
            }
            other => {
                return Err(ScenarioError::Parse {
                    line,
                    msg: format!("unknown key {other:?}"),
                })
            }
        }
    }
    if !kind_ok {
        return Err(ScenarioError::Parse { line: 1, msg: "kind must be \"hosing\"".into() });
    }
    sc.validate()?;
    Ok(sc)
}

/// Parses a colored-noise config.
pub fn parse_noise(text: &str) -> Result<ColoredNoiseConfig, ScenarioError> {
    let mut cfg = ColoredNoiseConfig::default();
    for (line, key, value) in parse_pairs(text)? {
        match key.as_str() {
            "kind" => {
                if value != "colored_noise" {
                    return Err(ScenarioError::Parse {
                        line,
                        msg: "kind must be \"colored_noise\"".into(),
                    });
                }
            }
            "n" => {
                cfg.n = value.parse().map_err(|_| ScenarioError::Parse {
                    line,
                    msg: format!("n: not an integer: {value:?}"),
                })?
            }
            "dt" => cfg.dt = parse_f64(line, &key, &value)?,
            "ar_start" => cfg.ar_start = parse_f64(line, &key, &value)?,
            "ar_end" => cfg.ar_end = parse_f64(line, &key, &value)?,
            "sd_start" => cfg.sd_start = parse_f64(line, &key, &value)?,
            "sd_end" => cfg.sd_end = parse_f64(line, &key, &value)?,
            "seed" => {
                cfg.seed = value.parse().map_err(|_| ScenarioError::Parse {
                    line,
                    msg: format!("seed: not an integer: {value:?}"),
                })?
            }
            other => {
                return Err(ScenarioError::Parse {
                    line,
                    msg: format!("unknown key {other:?}"),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Is this preset/config a hosing scenario (as opposed to colored noise)?
pub fn config_kind(text: &str) -> Result<&'static str, ScenarioError> {
    for (_, key, value) in parse_pairs(text)? {
        if key == "kind" {
            return Ok(match value.as_str() {
                "colored_noise" => "colored_noise",
                _ => "hosing",
            });
        }
    }
    Ok("hosing")
}
