//! Seeded simulation of stationary ARMA processes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ArmaError, ArmaModel};

/// Draws `n` values of the stationary process driven by seeded Gaussian
/// white noise. `burn_in` defaults to `10 * (p + q + 1)`; the recursion
/// starts from zero histories and the burn-in washes the transient out.
/// Deterministic given `(model, n, seed, burn_in)`.
pub fn simulate(
    model: &ArmaModel,
    n: usize,
    seed: u64,
    burn_in: Option<usize>,
) -> Result<Vec<f64>, ArmaError> {
    if !model.admissible() {
        return Err(ArmaError::InadmissibleModel);
    }
    if n == 0 {
        return Err(ArmaError::InvalidParameter("n must be >= 1".into()));
    }
    let p = model.p();
    let q = model.q();
    let burn = burn_in.unwrap_or(10 * (p + q + 1));
    let total = n + burn;
    let sd = model.sigma2.sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x_hist = vec![0.0f64; p.max(1)];
    let mut w_hist = vec![0.0f64; q.max(1)];
    let mut out = Vec::with_capacity(n);

    for t in 0..total {
        let w: f64 = sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        let mut x = model.nu + w;
        for (i, &phi) in model.phi.iter().enumerate() {
            x += phi * x_hist[i];
        }
        for (j, &theta) in model.theta.iter().enumerate() {
            x += theta * w_hist[j];
        }
        if p > 0 {
            x_hist.rotate_right(1);
            x_hist[0] = x;
        }
        if q > 0 {
            w_hist.rotate_right(1);
            w_hist[0] = w;
        }
        if t >= burn {
            out.push(x);
        }
    }
    Ok(out)
}
