//! Exact Gaussian ARMA likelihood via a stationary-initialized Kalman
//! recursion on the companion-form state space
//!
//! ```text
//! alpha[t+1] = T alpha[t] + R w[t+1],   y[t] = alpha[t][0]
//! ```
//!
//! with `T` companion (first column phi, ones on the superdiagonal) and
//! `R = (1, theta_1, ..., theta_q, 0, ...)`. The filter runs with unit
//! innovation variance; the intercept and sigma2 are concentrated out in
//! closed form from a dual pass over the data and a constant-ones stream.

use super::{ArmaError, ArmaModel};

/// Maximum state dimension: supports p <= 8 and q <= 7.
pub(crate) const R_MAX: usize = 8;

const F_MIN: f64 = 1e-12;
const DIFFUSE_KAPPA: f64 = 1e7;
const COND_MAX: f64 = 1e12;
const LN_2PI: f64 = 1.8378770664093453;

#[derive(Clone, Debug)]
pub(crate) struct StateSpace {
    r: usize,
    p: usize,
    /// First column of the companion transition matrix (the AR coefficients).
    tcol: [f64; R_MAX],
    rvec: [f64; R_MAX],
}

impl StateSpace {
    pub(crate) fn new(phi: &[f64], theta: &[f64]) -> Self {
        let p = phi.len();
        let q = theta.len();
        let r = p.max(q + 1).max(1);
        debug_assert!(r <= R_MAX);
        let mut tcol = [0.0; R_MAX];
        tcol[..p].copy_from_slice(phi);
        let mut rvec = [0.0; R_MAX];
        rvec[0] = 1.0;
        rvec[1..=q].copy_from_slice(theta);
        Self { r, p, tcol, rvec }
    }

    /// `out = T v` exploiting the companion structure.
    #[inline]
    fn apply_t(&self, v: &[f64; R_MAX], out: &mut [f64; R_MAX]) {
        let r = self.r;
        for i in 0..r {
            let shift = if i + 1 < r { v[i + 1] } else { 0.0 };
            out[i] = if i < self.p { self.tcol[i] * v[0] + shift } else { shift };
        }
    }
}

type Mat = [[f64; R_MAX]; R_MAX];

/// Stationary covariance: solves `P = T P T' + R R'` by vectorization.
/// Falls back to a diffuse diagonal when the system is near-singular.
fn stationary_cov(ss: &StateSpace) -> Mat {
    let r = ss.r;
    let n = r * r;
    // lhs = I - T (x) T, rhs = vec(R R')
    let mut lhs = [[0.0f64; 64]; 64];
    let mut rhs = [0.0f64; 64];
    let t_at = |i: usize, j: usize| -> f64 {
        let mut v = 0.0;
        if j == 0 && i < ss.p {
            v += ss.tcol[i];
        }
        if j == i + 1 {
            v += 1.0;
        }
        v
    };
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    lhs[i * r + k][j * r + l] -= t_at(i, j) * t_at(k, l);
                }
            }
        }
    }
    for i in 0..n {
        lhs[i][i] += 1.0;
    }
    for i in 0..r {
        for k in 0..r {
            rhs[i * r + k] = ss.rvec[i] * ss.rvec[k];
        }
    }

    // LU with partial pivoting; track pivot range as a condition estimate.
    let mut perm = [0usize; 64];
    for (i, p) in perm.iter_mut().enumerate().take(n) {
        *p = i;
    }
    let mut max_piv = 0.0f64;
    let mut min_piv = f64::MAX;
    let mut singular = false;
    for col in 0..n {
        let mut best = lhs[perm[col]][col].abs();
        let mut best_row = col;
        for row in (col + 1)..n {
            let v = lhs[perm[row]][col].abs();
            if v > best {
                best = v;
                best_row = row;
            }
        }
        if best < 1e-14 {
            singular = true;
            break;
        }
        max_piv = max_piv.max(best);
        min_piv = min_piv.min(best);
        perm.swap(col, best_row);
        let pivot = lhs[perm[col]][col];
        for row in (col + 1)..n {
            let factor = lhs[perm[row]][col] / pivot;
            lhs[perm[row]][col] = factor;
            for k in (col + 1)..n {
                lhs[perm[row]][k] -= factor * lhs[perm[col]][k];
            }
        }
    }

    let mut out: Mat = [[0.0; R_MAX]; R_MAX];
    if singular || min_piv <= 0.0 || max_piv / min_piv > COND_MAX {
        for (i, row) in out.iter_mut().enumerate().take(r) {
            row[i] = DIFFUSE_KAPPA;
        }
        return out;
    }

    let mut y = [0.0f64; 64];
    for i in 0..n {
        let mut s = rhs[perm[i]];
        for j in 0..i {
            s -= lhs[perm[i]][j] * y[j];
        }
        y[i] = s;
    }
    let mut x = [0.0f64; 64];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in (i + 1)..n {
            s -= lhs[perm[i]][j] * x[j];
        }
        x[i] = s / lhs[perm[i]][i];
    }
    for i in 0..r {
        for k in 0..r {
            out[i][k] = x[i * r + k];
        }
    }
    out
}

/// Accumulated filter sums for one pass over the data (`y`) and the
/// constant-ones stream run through the same innovation transform.
pub(crate) struct DualSums {
    pub sum_ln_f: f64,
    pub s_yy: f64,
    pub s_y1: f64,
    pub s_11: f64,
}

/// Kalman pass with unit innovation variance over `data` and the all-ones
/// series simultaneously (gains and innovation variances are shared because
/// they do not depend on the observations).
///
/// Once the covariance recursion has converged the gains are frozen and the
/// remaining steps run in O(r) per observation.
pub(crate) fn filter_dual(ss: &StateSpace, data: &[f64]) -> Option<DualSums> {
    let r = ss.r;
    let mut p = stationary_cov(ss);
    let mut ay = [0.0f64; R_MAX];
    let mut a1 = [0.0f64; R_MAX];
    let mut ayp = [0.0f64; R_MAX];
    let mut a1p = [0.0f64; R_MAX];
    let mut a = [[0.0f64; R_MAX]; R_MAX];
    let mut pp = [[0.0f64; R_MAX]; R_MAX];
    let mut k = [0.0f64; R_MAX];

    let mut sum_ln_f = 0.0;
    let mut s_yy = 0.0;
    let mut s_y1 = 0.0;
    let mut s_11 = 0.0;

    let mut f_prev = f64::NAN;
    let mut steady_runs = 0u32;
    let mut idx = 0usize;

    while idx < data.len() {
        let y = data[idx];
        ss.apply_t(&ay, &mut ayp);
        ss.apply_t(&a1, &mut a1p);

        // A = T P,  P_pred = A T' + R R'
        for i in 0..r {
            let phi_i = if i < ss.p { ss.tcol[i] } else { 0.0 };
            for j in 0..r {
                let shift = if i + 1 < r { p[i + 1][j] } else { 0.0 };
                a[i][j] = phi_i * p[0][j] + shift;
            }
        }
        for i in 0..r {
            for j in 0..r {
                let phi_j = if j < ss.p { ss.tcol[j] } else { 0.0 };
                let shift = if j + 1 < r { a[i][j + 1] } else { 0.0 };
                pp[i][j] = phi_j * a[i][0] + shift + ss.rvec[i] * ss.rvec[j];
            }
        }

        let f = pp[0][0].max(F_MIN);
        let vy = y - ayp[0];
        let v1 = 1.0 - a1p[0];
        sum_ln_f += f.ln();
        s_yy += vy * vy / f;
        s_y1 += vy * v1 / f;
        s_11 += v1 * v1 / f;
        if !(sum_ln_f.is_finite() && s_yy.is_finite()) {
            return None;
        }

        for i in 0..r {
            k[i] = pp[i][0] / f;
        }
        for i in 0..r {
            ay[i] = ayp[i] + k[i] * vy;
            a1[i] = a1p[i] + k[i] * v1;
        }
        for i in 0..r {
            for j in 0..r {
                p[i][j] = pp[i][j] - k[i] * pp[0][j];
            }
        }

        steady_runs = if (f - f_prev).abs() <= 1e-13 * f { steady_runs + 1 } else { 0 };
        f_prev = f;
        idx += 1;

        if steady_runs >= 2 {
            break;
        }
    }

    if idx < data.len() {
        // steady state: fixed f, fixed gain
        let f = f_prev;
        let ln_f = f.ln();
        let inv_f = 1.0 / f;
        for &y in &data[idx..] {
            ss.apply_t(&ay, &mut ayp);
            ss.apply_t(&a1, &mut a1p);
            let vy = y - ayp[0];
            let v1 = 1.0 - a1p[0];
            sum_ln_f += ln_f;
            s_yy += vy * vy * inv_f;
            s_y1 += vy * v1 * inv_f;
            s_11 += v1 * v1 * inv_f;
            for i in 0..r {
                ay[i] = ayp[i] + k[i] * vy;
                a1[i] = a1p[i] + k[i] * v1;
            }
        }
        if !(s_yy.is_finite() && s_y1.is_finite()) {
            return None;
        }
    }
    Some(DualSums { sum_ln_f, s_yy, s_y1, s_11 })
}

/// Result of concentrating the intercept and sigma2 out of a filter pass.
pub(crate) struct Concentrated {
    pub loglik: f64,
    pub mean: f64,
    pub sigma2: f64,
}

/// Profile log-likelihood with the process mean and sigma2 replaced by
/// their exact conditional maximizers.
pub(crate) fn concentrated_loglik(ss: &StateSpace, data: &[f64]) -> Option<Concentrated> {
    let n = data.len() as f64;
    let sums = filter_dual(ss, data)?;
    if !(sums.s_11 > 0.0) {
        return None;
    }
    let mean = sums.s_y1 / sums.s_11;
    let rss = (sums.s_yy - sums.s_y1 * sums.s_y1 / sums.s_11).max(1e-300);
    let sigma2 = rss / n;
    let loglik = -0.5 * n * (LN_2PI + sigma2.ln() + 1.0) - 0.5 * sums.sum_ln_f;
    if !loglik.is_finite() {
        return None;
    }
    Some(Concentrated { loglik, mean, sigma2 })
}

/// Exact Gaussian log-likelihood of `data` under a fully specified model.
///
/// The data are centred at the stationary mean `nu / (1 - sum phi)` and run
/// through the unit-variance filter; `sigma2` then scales the quadratic
/// form and the normalizing constant.
pub fn log_likelihood(model: &ArmaModel, data: &[f64]) -> Result<f64, ArmaError> {
    if !model.admissible() {
        return Err(ArmaError::InadmissibleModel);
    }
    let need = model.p() + model.q() + 1;
    if data.len() < need {
        return Err(ArmaError::TooShort { need, have: data.len() });
    }
    let mean = model.mean();
    let ss = StateSpace::new(&model.phi, &model.theta);
    let r = ss.r;

    let mut p = stationary_cov(&ss);
    let mut st = [0.0f64; R_MAX];
    let mut stp = [0.0f64; R_MAX];
    let mut a = [[0.0f64; R_MAX]; R_MAX];
    let mut pp = [[0.0f64; R_MAX]; R_MAX];
    let mut kg = [0.0f64; R_MAX];

    let mut sum_ln_f = 0.0;
    let mut sum_v2_f = 0.0;
    let mut f_prev = f64::NAN;
    let mut steady_runs = 0u32;
    let mut idx = 0usize;
    while idx < data.len() {
        let y = data[idx] - mean;
        ss.apply_t(&st, &mut stp);
        for i in 0..r {
            let phi_i = if i < ss.p { ss.tcol[i] } else { 0.0 };
            for j in 0..r {
                let shift = if i + 1 < r { p[i + 1][j] } else { 0.0 };
                a[i][j] = phi_i * p[0][j] + shift;
            }
        }
        for i in 0..r {
            for j in 0..r {
                let phi_j = if j < ss.p { ss.tcol[j] } else { 0.0 };
                let shift = if j + 1 < r { a[i][j + 1] } else { 0.0 };
                pp[i][j] = phi_j * a[i][0] + shift + ss.rvec[i] * ss.rvec[j];
            }
        }
        let f = pp[0][0].max(F_MIN);
        let v = y - stp[0];
        sum_ln_f += f.ln();
        sum_v2_f += v * v / f;
        for i in 0..r {
            kg[i] = pp[i][0] / f;
        }
        for i in 0..r {
            st[i] = stp[i] + kg[i] * v;
        }
        for i in 0..r {
            for j in 0..r {
                p[i][j] = pp[i][j] - kg[i] * pp[0][j];
            }
        }
        steady_runs = if (f - f_prev).abs() <= 1e-13 * f { steady_runs + 1 } else { 0 };
        f_prev = f;
        idx += 1;
        if steady_runs >= 2 {
            break;
        }
    }
    if idx < data.len() {
        let f = f_prev;
        let ln_f = f.ln();
        let inv_f = 1.0 / f;
        for &raw in &data[idx..] {
            let y = raw - mean;
            ss.apply_t(&st, &mut stp);
            let v = y - stp[0];
            sum_ln_f += ln_f;
            sum_v2_f += v * v * inv_f;
            for i in 0..r {
                st[i] = stp[i] + kg[i] * v;
            }
        }
    }

    let n = data.len() as f64;
    Ok(-0.5 * n * (LN_2PI + model.sigma2.ln()) - 0.5 * sum_ln_f - 0.5 * sum_v2_f / model.sigma2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn white_noise_closed_form() {
        let model = ArmaModel::new(0.7, vec![], vec![], 2.3).unwrap();
        let data = [1.0, -0.5, 2.0, 0.7, 0.1, 1.4, -0.2];
        let got = log_likelihood(&model, &data).unwrap();
        let n = data.len() as f64;
        let want = -0.5 * n * (2.0 * std::f64::consts::PI * 2.3).ln()
            - data.iter().map(|x| (x - 0.7) * (x - 0.7)).sum::<f64>() / (2.0 * 2.3);
        assert_abs_diff_eq!(got, want, epsilon = 1e-8);
    }

    #[test]
    fn ar1_stationary_init() {
        // First innovation variance must be gamma0 = 1/(1-phi^2), not 1.
        let ss = StateSpace::new(&[0.6], &[]);
        let p0 = stationary_cov(&ss);
        assert_abs_diff_eq!(p0[0][0], 1.0 / (1.0 - 0.36), epsilon = 1e-10);
    }

    #[test]
    fn lyapunov_identity_holds() {
        let ss = StateSpace::new(&[0.5, -0.3], &[0.4, 0.2]);
        let p = stationary_cov(&ss);
        let r = 3;
        // rebuild T densely and check P = T P T' + RR'
        let mut t = [[0.0f64; 3]; 3];
        t[0][0] = 0.5;
        t[1][0] = -0.3;
        t[0][1] = 1.0;
        t[1][2] = 1.0;
        let rv = [1.0, 0.4, 0.2];
        for i in 0..r {
            for j in 0..r {
                let mut s = rv[i] * rv[j];
                for k in 0..r {
                    for l in 0..r {
                        s += t[i][k] * p[k][l] * t[j][l];
                    }
                }
                assert_abs_diff_eq!(p[i][j], s, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn shift_invariance() {
        // Translating data by c and the intercept by c (1 - sum phi) leaves
        // the likelihood unchanged. For white noise this is nu -> nu + c.
        let data = [0.3, 1.2, -0.4, 0.9, 0.05, -1.3, 0.6, 0.8, -0.1, 0.2];
        let shifted: Vec<f64> = data.iter().map(|x| x + 5.0).collect();

        let wn = ArmaModel::new(0.1, vec![], vec![], 1.5).unwrap();
        let wn_shift = ArmaModel::new(0.1 + 5.0, vec![], vec![], 1.5).unwrap();
        assert_abs_diff_eq!(
            log_likelihood(&wn, &data).unwrap(),
            log_likelihood(&wn_shift, &shifted).unwrap(),
            epsilon = 1e-9
        );

        let ar = ArmaModel::new(0.2, vec![0.6], vec![0.3], 1.1).unwrap();
        let nu_shift = 0.2 + 5.0 * (1.0 - 0.6);
        let ar_shift = ArmaModel::new(nu_shift, vec![0.6], vec![0.3], 1.1).unwrap();
        assert_abs_diff_eq!(
            log_likelihood(&ar, &data).unwrap(),
            log_likelihood(&ar_shift, &shifted).unwrap(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn inadmissible_rejected() {
        let m = ArmaModel::new(0.0, vec![0.9999], vec![], 1.0).unwrap();
        assert!(matches!(log_likelihood(&m, &[1.0, 2.0, 3.0]), Err(ArmaError::InadmissibleModel)));
    }

    #[test]
    fn too_short_rejected() {
        let m = ArmaModel::new(0.0, vec![0.5], vec![0.2], 1.0).unwrap();
        assert!(matches!(log_likelihood(&m, &[1.0, 2.0]), Err(ArmaError::TooShort { .. })));
    }

    #[test]
    fn concentrated_white_noise_matches_moments() {
        let data = [2.0, 4.0, 3.0, 5.0, 1.0, 3.0, 2.5, 4.5];
        let ss = StateSpace::new(&[], &[]);
        let c = concentrated_loglik(&ss, &data).unwrap();
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        assert_abs_diff_eq!(c.mean, mean, epsilon = 1e-12);
        assert_abs_diff_eq!(c.sigma2, var, epsilon = 1e-12);
        // profile loglik equals the full loglik at the maximizers
        let m = ArmaModel::new(mean, vec![], vec![], var).unwrap();
        assert_abs_diff_eq!(c.loglik, log_likelihood(&m, &data).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn concentrated_is_profile_maximum() {
        // concentrated loglik must dominate the full likelihood at nearby
        // (mean, sigma2) pairs for the same (phi, theta)
        let data: Vec<f64> = (0..60).map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.0).collect();
        let ss = StateSpace::new(&[0.4], &[0.25]);
        let c = concentrated_loglik(&ss, &data).unwrap();
        for dm in [-0.2, 0.0, 0.3] {
            for ds in [0.8, 1.0, 1.3] {
                let nu = (c.mean + dm) * (1.0 - 0.4);
                let m = ArmaModel::new(nu, vec![0.4], vec![0.25], c.sigma2 * ds).unwrap();
                let ll = log_likelihood(&m, &data).unwrap();
                assert!(ll <= c.loglik + 1e-8, "profile not maximal: {ll} > {}", c.loglik);
            }
        }
    }
}
