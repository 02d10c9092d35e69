//! ARMA(p,q) models: definition, admissibility, seeded simulation, exact
//! Gaussian maximum-likelihood fitting and the BIC.
//!
//! The likelihood is exact (stationary-initialized state-space recursion),
//! not conditional sum of squares: the windows this engine is used on can be
//! short, where initialization bias matters.

mod fit;
mod kalman;
mod optim;
mod simulate;

pub use fit::{cls_ar1_coefficient, fit, fit_seeded};
pub use kalman::log_likelihood;
pub use simulate::simulate;

use thiserror::Error;

/// Margin by which every AR/MA polynomial root must clear the unit circle.
pub const ROOT_MARGIN: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum ArmaError {
    #[error("model is not admissible (root within {ROOT_MARGIN} of the unit circle)")]
    InadmissibleModel,
    #[error("series too short: need at least {need} points, have {have}")]
    TooShort { need: usize, have: usize },
    #[error("degenerate input: sample variance below the constant-data guard")]
    DegenerateInput,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// An ARMA(p,q) model
/// `x_t = nu + sum_i phi_i x_{t-i} + sum_j theta_j w_{t-j} + w_t`
/// with white-noise variance `sigma2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaModel {
    pub nu: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
}

impl ArmaModel {
    pub fn new(nu: f64, phi: Vec<f64>, theta: Vec<f64>, sigma2: f64) -> Result<Self, ArmaError> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(ArmaError::InvalidParameter(format!(
                "sigma2 must be positive and finite, got {sigma2}"
            )));
        }
        Ok(Self { nu, phi, theta, sigma2 })
    }

    /// White noise with mean `nu` and variance `sigma2`.
    pub fn white_noise(nu: f64, sigma2: f64) -> Self {
        Self { nu, phi: Vec::new(), theta: Vec::new(), sigma2 }
    }

    pub fn p(&self) -> usize {
        self.phi.len()
    }

    pub fn q(&self) -> usize {
        self.theta.len()
    }

    /// Stationary process mean `nu / (1 - sum phi)`.
    pub fn mean(&self) -> f64 {
        let phi_sum: f64 = self.phi.iter().sum();
        self.nu / (1.0 - phi_sum)
    }

    /// True when all roots of the AR polynomial `1 - phi_1 z - ... - phi_p z^p`
    /// and the MA polynomial `1 + theta_1 z + ... + theta_q z^q` have modulus
    /// greater than `1 + ROOT_MARGIN`.
    pub fn admissible(&self) -> bool {
        coeffs_admissible(&self.phi, &self.theta, ROOT_MARGIN)
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone)]
pub struct FittedArma {
    pub model: ArmaModel,
    /// Differencing applied upstream of this fit (0 when fitted directly).
    pub d: usize,
    /// Maximized log-likelihood.
    pub loglik: f64,
    /// BIC at the fitted sample length, `-2 loglik + ln(n) (p+q+1)`.
    pub bic: f64,
    /// Length of the sample the model was fitted on.
    pub n_fitted: usize,
    pub admissible: bool,
    pub converged: bool,
}

impl FittedArma {
    pub fn order(&self) -> (usize, usize) {
        (self.model.p(), self.model.q())
    }
}

/// `BIC = -2 ln L + ln(tau) * (p + q + 1)`.
///
/// The parameter count is exactly `p + q + 1` (the coefficients plus the
/// intercept; the innovation variance is not counted). Set `count_sigma2`
/// to use the `p + q + 2` convention instead.
pub fn bic(loglik: f64, p: usize, q: usize, tau: usize, count_sigma2: bool) -> f64 {
    let k = (p + q + 1 + usize::from(count_sigma2)) as f64;
    -2.0 * loglik + (tau as f64).ln() * k
}

/// Schur-Cohn admissibility of the AR and MA coefficient sets with a root
/// margin: all roots of both polynomials must have modulus > 1 + margin.
pub fn coeffs_admissible(phi: &[f64], theta: &[f64], margin: f64) -> bool {
    poly_roots_outside(phi, margin) && {
        let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
        poly_roots_outside(&neg, margin)
    }
}

/// True when all roots of `1 - a_1 z - ... - a_k z^k` have modulus
/// strictly greater than `1 + margin`.
///
/// Substituting `z -> (1+margin) z` rescales the roots; the scaled
/// polynomial then has to be Schur-stable, which the reverse Levinson-Durbin
/// recursion decides: stability is equivalent to every partial
/// autocorrelation lying in (-1, 1).
fn poly_roots_outside(coeffs: &[f64], margin: f64) -> bool {
    let k = coeffs.len();
    if k == 0 {
        return true;
    }
    let s = 1.0 + margin;
    let mut a = [0.0f64; 16];
    debug_assert!(k <= 16);
    let mut scale = 1.0;
    for (i, c) in coeffs.iter().enumerate() {
        scale *= s;
        a[i] = c * scale;
        if !a[i].is_finite() {
            return false;
        }
    }
    // Reverse Levinson-Durbin on a[0..k].
    let mut buf = [0.0f64; 16];
    for order in (1..=k).rev() {
        let r = a[order - 1];
        if !(r.abs() < 1.0) {
            return false;
        }
        let denom = 1.0 - r * r;
        for j in 0..order - 1 {
            buf[j] = (a[j] + r * a[order - 2 - j]) / denom;
        }
        a[..order - 1].copy_from_slice(&buf[..order - 1]);
    }
    true
}

/// Levinson-Durbin step-up: maps partial autocorrelations in (-1,1) onto
/// the coefficients of a stable polynomial `1 - a_1 z - ... - a_k z^k`.
pub(crate) fn levinson_step_up(pacs: &[f64], out: &mut [f64]) {
    let k = pacs.len();
    let mut buf = [0.0f64; 16];
    for m in 0..k {
        let r = pacs[m];
        for j in 0..m {
            buf[j] = out[j] - r * out[m - 1 - j];
        }
        out[..m].copy_from_slice(&buf[..m]);
        out[m] = r;
    }
}

/// Inverse of [`levinson_step_up`]; returns None when the coefficients do
/// not describe a strictly stable polynomial.
pub(crate) fn levinson_step_down(coeffs: &[f64]) -> Option<Vec<f64>> {
    let k = coeffs.len();
    let mut a = coeffs.to_vec();
    let mut pacs = vec![0.0; k];
    let mut buf = [0.0f64; 16];
    for order in (1..=k).rev() {
        let r = a[order - 1];
        if !(r.abs() < 1.0) {
            return None;
        }
        pacs[order - 1] = r;
        let denom = 1.0 - r * r;
        for j in 0..order - 1 {
            buf[j] = (a[j] + r * a[order - 2 - j]) / denom;
        }
        a[..order - 1].copy_from_slice(&buf[..order - 1]);
    }
    Some(pacs)
}
