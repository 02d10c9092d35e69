//! Equilibria of the deterministic box model: damped-Newton multi-start
//! over a salinity lattice, stability from the finite-difference Jacobian,
//! and branch continuation over a hosing grid.

use super::{BoxModelParams, ScenarioError};

/// Geometric branch classification of an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchLabel {
    Upper,
    Lower,
    /// Saddle branch connecting the two stable branches.
    Unstable,
}

impl std::fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BranchLabel::Upper => write!(f, "upper"),
            BranchLabel::Lower => write!(f, "lower"),
            BranchLabel::Unstable => write!(f, "unstable"),
        }
    }
}

/// A located equilibrium with its local linearization.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumPoint {
    pub h: f64,
    pub s_n: f64,
    pub s_t: f64,
    pub gamma_flow: f64,
    /// Eigenvalues of the 2x2 Jacobian as (re, im) pairs.
    pub eig: [(f64, f64); 2],
    pub stable: bool,
    pub branch: BranchLabel,
}

const NEWTON_MAX_ITER: usize = 80;
const RESIDUAL_TOL: f64 = 1e-13;
const DEDUP_TOL: f64 = 1e-9;
const FD_STEP: f64 = 1e-8;

fn jacobian(params: &BoxModelParams, s_n: f64, s_t: f64, h: f64) -> [[f64; 2]; 2] {
    let f = |x: f64, y: f64| params.derivatives(x, y, h);
    let (fn_p, ft_p) = f(s_n + FD_STEP, s_t);
    let (fn_m, ft_m) = f(s_n - FD_STEP, s_t);
    let (gn_p, gt_p) = f(s_n, s_t + FD_STEP);
    let (gn_m, gt_m) = f(s_n, s_t - FD_STEP);
    [
        [(fn_p - fn_m) / (2.0 * FD_STEP), (gn_p - gn_m) / (2.0 * FD_STEP)],
        [(ft_p - ft_m) / (2.0 * FD_STEP), (gt_p - gt_m) / (2.0 * FD_STEP)],
    ]
}

fn eigenvalues_2x2(j: &[[f64; 2]; 2]) -> [(f64, f64); 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [((tr + s) / 2.0, 0.0), ((tr - s) / 2.0, 0.0)]
    } else {
        let s = (-disc).sqrt() / 2.0;
        [(tr / 2.0, s), (tr / 2.0, -s)]
    }
}

fn newton_root(params: &BoxModelParams, h: f64, mut x: f64, mut y: f64) -> Option<(f64, f64)> {
    for _ in 0..NEWTON_MAX_ITER {
        let (fx, fy) = params.derivatives(x, y, h);
        if fx.abs().max(fy.abs()) < RESIDUAL_TOL {
            return Some((x, y));
        }
        if !(fx.is_finite() && fy.is_finite()) {
            return None;
        }
        let j = jacobian(params, x, y, h);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-30 {
            return None;
        }
        let mut dx = -(fx * j[1][1] - fy * j[0][1]) / det;
        let mut dy = -(j[0][0] * fy - j[1][0] * fx) / det;
        // keep steps inside the plausible salinity box
        let max_step = 0.2;
        let norm = dx.abs().max(dy.abs());
        if norm > max_step {
            dx *= max_step / norm;
            dy *= max_step / norm;
        }
        x += dx;
        y += dy;
        if x.abs() > 5.0 || y.abs() > 5.0 {
            return None;
        }
    }
    let (fx, fy) = params.derivatives(x, y, h);
    if fx.abs().max(fy.abs()) < RESIDUAL_TOL {
        Some((x, y))
    } else {
        None
    }
}

/// All equilibria of the deterministic model at hosing value `h`, from a
/// fixed lattice of starting points spanning the plausible salinity box.
/// Converged roots are deduplicated at 1e-9 and labeled by S_N ordering:
/// with three roots the middle one is the connecting saddle.
pub fn find_equilibria(
    h: f64,
    params: &BoxModelParams,
) -> Result<Vec<EquilibriumPoint>, ScenarioError> {
    let mut roots: Vec<(f64, f64)> = Vec::new();
    let lattice = 13;
    for i in 0..lattice {
        for j in 0..lattice {
            let x0 = -0.45 + 0.9 * i as f64 / (lattice - 1) as f64;
            let y0 = -0.45 + 0.9 * j as f64 / (lattice - 1) as f64;
            if let Some((x, y)) = newton_root(params, h, x0, y0) {
                if !roots
                    .iter()
                    .any(|(rx, ry)| (rx - x).abs() < DEDUP_TOL && (ry - y).abs() < DEDUP_TOL)
                {
                    roots.push((x, y));
                }
            }
        }
    }
    if roots.is_empty() {
        return Err(ScenarioError::NoConvergence(format!(
            "no equilibrium found at H = {h} from {lattice}x{lattice} starts"
        )));
    }
    roots.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let n = roots.len();
    let mut out = Vec::with_capacity(n);
    for (idx, (x, y)) in roots.iter().enumerate() {
        let j = jacobian(params, *x, *y, h);
        let eig = eigenvalues_2x2(&j);
        let stable = eig[0].0 < 0.0 && eig[1].0 < 0.0;
        let gamma_flow = params.amoc_flow(*x);
        let branch = if n >= 3 {
            if idx == 0 {
                BranchLabel::Upper
            } else if idx == n - 1 {
                BranchLabel::Lower
            } else {
                BranchLabel::Unstable
            }
        } else if n == 2 {
            if idx == 0 {
                BranchLabel::Upper
            } else {
                BranchLabel::Lower
            }
        } else if gamma_flow >= 0.0 {
            BranchLabel::Upper
        } else {
            BranchLabel::Lower
        };
        out.push(EquilibriumPoint { h, s_n: *x, s_t: *y, gamma_flow, eig, stable, branch });
    }
    Ok(out)
}

/// Equilibria over an inclusive hosing grid, ordered by H then branch.
pub fn equilibrium_branches(
    h_min: f64,
    h_max: f64,
    steps: usize,
    params: &BoxModelParams,
) -> Result<Vec<EquilibriumPoint>, ScenarioError> {
    if steps < 2 {
        return Err(ScenarioError::InvalidScenario("steps must be >= 2".into()));
    }
    if !(h_min < h_max) {
        return Err(ScenarioError::InvalidScenario("need h_min < h_max".into()));
    }
    let mut out = Vec::new();
    for i in 0..steps {
        let h = h_min + (h_max - h_min) * i as f64 / (steps - 1) as f64;
        if let Ok(points) = find_equilibria(h, params) {
            out.extend(points);
        }
    }
    if out.is_empty() {
        return Err(ScenarioError::NoConvergence(format!(
            "no equilibria anywhere in [{h_min}, {h_max}]"
        )));
    }
    Ok(out)
}

/// The stable equilibrium on the requested branch at hosing value `h`.
pub fn branch_equilibrium(
    h: f64,
    params: &BoxModelParams,
    branch: BranchLabel,
) -> Result<EquilibriumPoint, ScenarioError> {
    let eq = find_equilibria(h, params)?;
    eq.into_iter()
        .find(|e| e.branch == branch && e.stable)
        .ok_or_else(|| ScenarioError::NoEquilibrium(branch.to_string(), h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bistable_at_zero_hosing() {
        let params = BoxModelParams::default();
        let eq = find_equilibria(0.0, &params).unwrap();
        let stable: Vec<_> = eq.iter().filter(|e| e.stable).collect();
        assert!(stable.len() >= 2, "expected bistability at H = 0, got {eq:?}");
        assert!(eq.iter().any(|e| e.branch == BranchLabel::Upper && e.stable));
        assert!(eq.iter().any(|e| e.branch == BranchLabel::Lower && e.stable));
    }

    #[test]
    fn residuals_are_tiny() {
        let params = BoxModelParams::default();
        for e in find_equilibria(0.0, &params).unwrap() {
            let (fx, fy) = params.derivatives(e.s_n, e.s_t, 0.0);
            assert!(fx.abs() < 1e-12 && fy.abs() < 1e-12, "residual ({fx}, {fy})");
        }
    }

    #[test]
    fn upper_branch_flow_exceeds_lower() {
        let params = BoxModelParams::default();
        let up = branch_equilibrium(0.0, &params, BranchLabel::Upper).unwrap();
        let lo = branch_equilibrium(0.0, &params, BranchLabel::Lower).unwrap();
        assert!(up.gamma_flow > 0.0, "upper branch flow {}", up.gamma_flow);
        assert!(up.gamma_flow > lo.gamma_flow);
        assert!(up.s_n > lo.s_n);
    }

    #[test]
    fn lower_branch_stable_in_n_tipping_regimes() {
        let params = BoxModelParams::default();
        for h in [-0.25, 0.24] {
            let lo = branch_equilibrium(h, &params, BranchLabel::Lower).unwrap();
            assert!(lo.stable, "lower branch unstable at H = {h}: {lo:?}");
        }
    }

    #[test]
    fn saddle_sits_between_branches() {
        let params = BoxModelParams::default();
        let eq = find_equilibria(0.0, &params).unwrap();
        if eq.len() >= 3 {
            let upper = eq.iter().find(|e| e.branch == BranchLabel::Upper).unwrap();
            let lower = eq.iter().find(|e| e.branch == BranchLabel::Lower).unwrap();
            let saddle = eq.iter().find(|e| e.branch == BranchLabel::Unstable).unwrap();
            assert!(!saddle.stable);
            assert!(saddle.s_n < upper.s_n && saddle.s_n > lower.s_n);
        }
    }

    #[test]
    fn branch_sweep_has_rows() {
        let params = BoxModelParams::default();
        let rows = equilibrium_branches(-0.1, 0.1, 5, &params).unwrap();
        assert!(rows.len() >= 10);
        assert!(equilibrium_branches(0.0, 1.0, 1, &params).is_err());
    }
}
