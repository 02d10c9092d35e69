//! Maximum-likelihood ARMA fitting.
//!
//! Coefficients are optimized in an unconstrained space mapped onto the
//! admissible region through the partial-autocorrelation transform (applied
//! to both the AR part and the negated MA part), so every candidate the
//! simplex search visits is stationary and invertible by construction. The
//! intercept and sigma2 are concentrated out analytically at each step.
//! Starts: Hannan-Rissanen regression estimates plus two random restarts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::kalman::{concentrated_loglik, StateSpace};
use super::optim::{minimize, NmOptions, NmResult};
use super::{
    bic, coeffs_admissible, levinson_step_down, levinson_step_up, ArmaError, ArmaModel,
    FittedArma, ROOT_MARGIN,
};

/// Partial autocorrelations are bounded to this magnitude so order-one
/// polynomials clear the admissibility margin with headroom.
const PAC_BOUND: f64 = 1.0 - 2.0 * ROOT_MARGIN;

/// Threshold of the constant-data guard: sample variance below
/// `1e-12 mean^2 + 1e-300` is rejected as degenerate.
fn is_degenerate(data: &[f64]) -> bool {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    var < 1e-12 * mean * mean + 1e-300
}

/// Unconstrained conditional-least-squares AR(1) coefficient: the slope of
/// the lag-1 autoregression with intercept, no stationarity constraint.
pub fn cls_ar1_coefficient(data: &[f64]) -> f64 {
    let n = data.len();
    if n < 3 {
        return 0.0;
    }
    let y = &data[1..];
    let u = &data[..n - 1];
    let m = (n - 1) as f64;
    let ym = y.iter().sum::<f64>() / m;
    let um = u.iter().sum::<f64>() / m;
    let mut suy = 0.0;
    let mut suu = 0.0;
    for (yi, ui) in y.iter().zip(u) {
        suy += (ui - um) * (yi - ym);
        suu += (ui - um) * (ui - um);
    }
    if suu > 0.0 {
        suy / suu
    } else {
        0.0
    }
}

fn pacs_to_coeffs(z: &[f64], p: usize, q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut phi = vec![0.0; p];
    let mut theta = vec![0.0; q];
    let mut pac = [0.0f64; 16];
    for (i, zi) in z[..p].iter().enumerate() {
        pac[i] = PAC_BOUND * zi.tanh();
    }
    levinson_step_up(&pac[..p], &mut phi);
    for (j, zj) in z[p..].iter().enumerate() {
        pac[j] = PAC_BOUND * zj.tanh();
    }
    levinson_step_up(&pac[..q], &mut theta);
    // The MA polynomial 1 + theta z + ... is invertible exactly when the
    // negated coefficients form a stable AR-style polynomial.
    for t in theta.iter_mut() {
        *t = -*t;
    }
    (phi, theta)
}

/// Inverse of [`pacs_to_coeffs`] for warm starts; shrinks coefficient sets
/// that fall outside the stationary/invertible region until they map.
fn coeffs_to_z(phi: &[f64], theta: &[f64]) -> Vec<f64> {
    let mut z = Vec::with_capacity(phi.len() + theta.len());
    let neg_theta: Vec<f64> = theta.iter().map(|t| -t).collect();
    for part in [phi, &neg_theta[..]] {
        let mut c = part.to_vec();
        let mut pacs = None;
        for _ in 0..60 {
            if let Some(p) = levinson_step_down(&c) {
                if p.iter().all(|r| r.abs() < 0.999 * PAC_BOUND) {
                    pacs = Some(p);
                    break;
                }
            }
            for v in c.iter_mut() {
                *v *= 0.92;
            }
        }
        match pacs {
            Some(p) => {
                for r in p {
                    let clamped = (r / PAC_BOUND).clamp(-0.999, 0.999);
                    z.push(clamped.atanh());
                }
            }
            None => z.extend(std::iter::repeat(0.0).take(part.len())),
        }
    }
    z
}

fn sample_autocov(x: &[f64], maxlag: usize) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut g = vec![0.0; maxlag + 1];
    for (k, gk) in g.iter_mut().enumerate() {
        let mut s = 0.0;
        for t in k..n {
            s += (x[t] - mean) * (x[t - k] - mean);
        }
        *gk = s / n as f64;
    }
    g
}

/// Levinson-Durbin solve of the Yule-Walker equations at order `m`.
fn yule_walker(gammas: &[f64], m: usize) -> Option<Vec<f64>> {
    if m == 0 {
        return Some(Vec::new());
    }
    if gammas[0] <= 0.0 {
        return None;
    }
    let mut a = vec![0.0; m];
    let mut prev = vec![0.0; m];
    let mut var = gammas[0];
    for k in 0..m {
        let mut num = gammas[k + 1];
        for j in 0..k {
            num -= a[j] * gammas[k - j];
        }
        if var.abs() < 1e-300 {
            return None;
        }
        let r = (num / var).clamp(-0.999, 0.999);
        prev[..k].copy_from_slice(&a[..k]);
        a[k] = r;
        for j in 0..k {
            a[j] = prev[j] - r * prev[k - 1 - j];
        }
        var *= 1.0 - r * r;
    }
    Some(a)
}

/// Cholesky solve of a symmetric positive-definite system, in place.
fn solve_spd(a: &mut [Vec<f64>], b: &mut [f64]) -> bool {
    let n = b.len();
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= a[i][k] * a[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                a[i][j] = s.sqrt();
            } else {
                a[i][j] = s / a[j][j];
            }
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i][k] * b[k];
        }
        b[i] = s / a[i][i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= a[k][i] * b[k];
        }
        b[i] = s / a[i][i];
    }
    true
}

/// Hannan-Rissanen two-stage regression estimates: a long autoregression
/// supplies innovation proxies, then `x_t` is regressed on lagged values
/// and lagged proxies.
fn hannan_rissanen(x: &[f64], p: usize, q: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let xc: Vec<f64> = x.iter().map(|v| v - mean).collect();

    if q == 0 {
        let g = sample_autocov(&xc, p);
        return yule_walker(&g, p).map(|phi| (phi, Vec::new()));
    }

    let mut m = (2 * (p + q) + 4).max(8).min((n / 4).max(2));
    let mut start = p.max(m + q);
    while n.saturating_sub(start) < p + q + 4 && m > 1 {
        m -= 1;
        start = p.max(m + q);
    }
    if n.saturating_sub(start) < p + q + 4 {
        return None;
    }

    let g = sample_autocov(&xc, m);
    let a = yule_walker(&g, m)?;
    // innovation proxies e[t] for t >= m
    let mut e = vec![0.0; n];
    for t in m..n {
        let mut pred = 0.0;
        for (i, ai) in a.iter().enumerate() {
            pred += ai * xc[t - 1 - i];
        }
        e[t] = xc[t] - pred;
    }

    let k = p + q;
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    let mut row = vec![0.0; k];
    for t in start..n {
        for i in 0..p {
            row[i] = xc[t - 1 - i];
        }
        for j in 0..q {
            row[p + j] = e[t - 1 - j];
        }
        for i in 0..k {
            for j in 0..=i {
                xtx[i][j] += row[i] * row[j];
            }
            xty[i] += row[i] * xc[t];
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            xtx[i][j] = xtx[j][i];
        }
        xtx[i][i] += 1e-10 * (1.0 + xtx[i][i]);
    }
    if !solve_spd(&mut xtx, &mut xty) {
        return None;
    }
    if xty.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((xty[..p].to_vec(), xty[p..].to_vec()))
}

/// Fits an ARMA(p,q) model by exact Gaussian maximum likelihood with the
/// default optimizer seed. See [`fit_seeded`].
pub fn fit(data: &[f64], p: usize, q: usize) -> Result<FittedArma, ArmaError> {
    fit_seeded(data, p, q, 0)
}

/// Fits an ARMA(p,q) model by exact Gaussian maximum likelihood.
///
/// `seed` drives the optimizer's random restarts only; identical inputs and
/// seeds produce bit-identical fits. A fit that exhausts the optimizer
/// budget is returned with `converged = false` rather than failing.
///
/// For (p,q) = (1,0) the unconstrained conditional-least-squares slope is
/// also computed; when it reaches the admissibility boundary the fit keeps
/// its constrained-boundary likelihood and BIC but is flagged
/// `admissible = false`.
pub fn fit_seeded(data: &[f64], p: usize, q: usize, seed: u64) -> Result<FittedArma, ArmaError> {
    let n = data.len();
    let need = 20.max(5 * (p + q + 1));
    if n < need {
        return Err(ArmaError::TooShort { need, have: n });
    }
    if is_degenerate(data) {
        return Err(ArmaError::DegenerateInput);
    }

    let dim = p + q;
    let mut best_z = vec![0.0; dim];
    let mut best = NmResult { x: best_z.clone(), fx: f64::INFINITY, converged: false };

    if dim == 0 {
        best.fx = objective(&[], p, q, data);
        best.converged = true;
    } else {
        let z_hr = match hannan_rissanen(data, p, q) {
            Some((phi, theta)) => coeffs_to_z(&phi, &theta),
            None => vec![0.0; dim],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut starts = vec![z_hr];
        for _ in 0..2 {
            let z: Vec<f64> = (0..dim)
                .map(|_| {
                    0.75 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
                })
                .collect();
            starts.push(z);
        }
        let opts = NmOptions {
            ftol: 1e-8,
            max_evals: 160 * (dim + 1),
            init_step: 0.25,
        };
        for s in &starts {
            let r = minimize(|z| objective(z, p, q, data), s, &opts);
            if r.fx < best.fx {
                best = r;
            }
        }
        best_z = best.x.clone();
    }

    if !best.fx.is_finite() {
        // Optimizer never found an evaluable point; report the white-noise
        // profile as a non-converged, inadmissible placeholder.
        let ss = StateSpace::new(&[], &[]);
        let c = concentrated_loglik(&ss, data).ok_or(ArmaError::DegenerateInput)?;
        let model = ArmaModel {
            nu: c.mean,
            phi: vec![0.0; p],
            theta: vec![0.0; q],
            sigma2: c.sigma2.max(1e-300),
        };
        return Ok(FittedArma {
            model,
            d: 0,
            loglik: c.loglik,
            bic: bic(c.loglik, p, q, n, false),
            n_fitted: n,
            admissible: false,
            converged: false,
        });
    }

    let (phi, theta) = pacs_to_coeffs(&best_z, p, q);
    let ss = StateSpace::new(&phi, &theta);
    let c = concentrated_loglik(&ss, data).ok_or(ArmaError::DegenerateInput)?;

    let mut admissible = coeffs_admissible(&phi, &theta, ROOT_MARGIN);
    if p == 1 && q == 0 {
        let phi_cls = cls_ar1_coefficient(data);
        if phi_cls.abs() >= 1.0 - ROOT_MARGIN {
            admissible = false;
        }
    }

    let phi_sum: f64 = phi.iter().sum();
    let model = ArmaModel {
        nu: c.mean * (1.0 - phi_sum),
        phi,
        theta,
        sigma2: c.sigma2.max(1e-300),
    };
    Ok(FittedArma {
        model,
        d: 0,
        loglik: c.loglik,
        bic: bic(c.loglik, p, q, n, false),
        n_fitted: n,
        admissible,
        converged: best.converged,
    })
}

fn objective(z: &[f64], p: usize, q: usize, data: &[f64]) -> f64 {
    let (phi, theta) = pacs_to_coeffs(z, p, q);
    let ss = StateSpace::new(&phi, &theta);
    match concentrated_loglik(&ss, data) {
        Some(c) => -c.loglik,
        None => f64::INFINITY,
    }
}
