//! Shared test oracles, deliberately independent of the library internals.
//!
//! The dense-covariance Gaussian log-likelihood here is built from ARMA
//! autocovariances obtained by solving the Yule-Walker-type linear system,
//! then evaluated through a Cholesky factorization of the full n-by-n
//! covariance matrix. No state-space machinery is shared with the library.

#![allow(dead_code)]

/// MA(infinity) weights psi_0..psi_m of the ARMA transfer function.
pub fn psi_weights(phi: &[f64], theta: &[f64], m: usize) -> Vec<f64> {
    let p = phi.len();
    let q = theta.len();
    let mut psi = vec![0.0; m + 1];
    psi[0] = 1.0;
    for j in 1..=m {
        let mut v = if j <= q { theta[j - 1] } else { 0.0 };
        for i in 1..=p.min(j) {
            v += phi[i - 1] * psi[j - i];
        }
        psi[j] = v;
    }
    psi
}

/// Autocovariances gamma_0..gamma_maxlag of a stationary ARMA process.
///
/// The first p+1 values solve the linear system
/// `gamma(k) - sum_i phi_i gamma(|k-i|) = sigma2 * sum_{j>=k} theta_j psi_{j-k}`
/// for k = 0..p (theta_0 = 1); higher lags follow by recursion.
pub fn arma_autocovariances(phi: &[f64], theta: &[f64], sigma2: f64, maxlag: usize) -> Vec<f64> {
    let p = phi.len();
    let q = theta.len();
    let psi = psi_weights(phi, theta, q);
    let rhs_at = |k: usize| -> f64 {
        if k > q {
            return 0.0;
        }
        let mut s = 0.0;
        for j in k..=q {
            let theta_j = if j == 0 { 1.0 } else { theta[j - 1] };
            s += theta_j * psi[j - k];
        }
        sigma2 * s
    };

    let m = p + 1;
    let mut a = vec![vec![0.0; m]; m];
    let mut b = vec![0.0; m];
    for k in 0..m {
        a[k][k] += 1.0;
        for i in 1..=p {
            let lag = k.abs_diff(i);
            if lag < m {
                a[k][lag] -= phi[i - 1];
            } else {
                // only possible when k + i exceeds p, cannot happen for k <= p
                unreachable!();
            }
        }
        b[k] = rhs_at(k);
    }
    let gam_head = gauss_solve(a, b);

    let mut gamma = vec![0.0; maxlag + 1];
    for (k, g) in gam_head.iter().enumerate().take((maxlag + 1).min(m)) {
        gamma[k] = *g;
    }
    for k in m..=maxlag {
        let mut v = rhs_at(k);
        for i in 1..=p {
            v += phi[i - 1] * gamma[k - i];
        }
        gamma[k] = v;
    }
    gamma
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for row in (col + 1)..n {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-300, "singular Yule-Walker system");
        for row in (col + 1)..n {
            let f = a[row][col] / d;
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in (i + 1)..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    x
}

/// Log-density of `data` under N(mean * 1, Sigma) with Sigma the Toeplitz
/// matrix of the supplied autocovariances, via dense Cholesky.
pub fn dense_gaussian_loglik(gamma: &[f64], data: &[f64], mean: f64) -> f64 {
    let n = data.len();
    assert!(gamma.len() >= n);
    let mut l = vec![vec![0.0; n]; n];
    let mut logdet = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let mut s = gamma[i - j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                assert!(s > 0.0, "covariance not positive definite at {i}");
                l[i][j] = s.sqrt();
                logdet += 2.0 * l[i][j].ln();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // solve L z = (data - mean)
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut s = data[i] - mean;
        for k in 0..i {
            s -= l[i][k] * z[k];
        }
        z[i] = s / l[i][i];
    }
    let quad: f64 = z.iter().map(|v| v * v).sum();
    let nf = n as f64;
    -0.5 * nf * (2.0 * std::f64::consts::PI).ln() - 0.5 * logdet - 0.5 * quad
}

/// Oracle log-likelihood of an ARMA model on data: dense covariance route.
pub fn oracle_loglik(
    phi: &[f64],
    theta: &[f64],
    sigma2: f64,
    nu: f64,
    data: &[f64],
) -> f64 {
    let phi_sum: f64 = phi.iter().sum();
    let mean = nu / (1.0 - phi_sum);
    let gamma = arma_autocovariances(phi, theta, sigma2, data.len());
    dense_gaussian_loglik(&gamma, data, mean)
}

/// Deterministic pseudo-random admissible model generator for oracle sweeps.
/// Draws partial autocorrelations uniformly in (-0.85, 0.85) from a simple
/// splitmix stream, then maps them to coefficients via Levinson step-up.
pub struct ModelGen {
    state: u64,
}

impl ModelGen {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_f64(&mut self) -> f64 {
        // splitmix64
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn pac(&mut self) -> f64 {
        (self.next_f64() * 2.0 - 1.0) * 0.85
    }

    /// Stable polynomial coefficients of the given order via Levinson step-up.
    pub fn stable_coeffs(&mut self, order: usize) -> Vec<f64> {
        let mut a = vec![0.0; order];
        let mut prev = vec![0.0; order];
        for m in 0..order {
            let r = self.pac();
            prev[..m].copy_from_slice(&a[..m]);
            for j in 0..m {
                a[j] = prev[j] - r * prev[m - 1 - j];
            }
            a[m] = r;
        }
        a
    }
}
