//! Derivative-free Nelder-Mead simplex minimizer used by the ARMA fitter.
//!
//! Standard coefficients (reflect 1, expand 2, contract 1/2, shrink 1/2).
//! Objective failures may return +inf; the simplex moves away from them.

pub(crate) struct NmOptions {
    pub ftol: f64,
    pub max_evals: usize,
    pub init_step: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self { ftol: 1e-8, max_evals: 2000, init_step: 0.25 }
    }
}

pub(crate) struct NmResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub converged: bool,
}

pub(crate) fn minimize<F>(mut f: F, x0: &[f64], opts: &NmOptions) -> NmResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    if dim == 0 {
        let fx = f(x0);
        return NmResult { x: Vec::new(), fx, converged: true };
    }

    let mut evals = 0usize;
    let eval = |x: &[f64], f: &mut F, evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus a step along each axis.
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    pts.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += opts.init_step;
        pts.push(p);
    }
    let mut fv: Vec<f64> = pts.iter().map(|p| eval(p, &mut f, &mut evals)).collect();

    let mut converged = false;
    while evals < opts.max_evals {
        // order ascending by objective
        let mut idx: Vec<usize> = (0..=dim).collect();
        idx.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).unwrap_or(std::cmp::Ordering::Equal));
        let reorder_pts: Vec<Vec<f64>> = idx.iter().map(|&i| pts[i].clone()).collect();
        let reorder_fv: Vec<f64> = idx.iter().map(|&i| fv[i]).collect();
        pts = reorder_pts;
        fv = reorder_fv;

        let best = fv[0];
        let worst = fv[dim];
        if worst.is_finite() && (worst - best).abs() <= opts.ftol * (1.0 + best.abs()) {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; dim];
        for p in pts.iter().take(dim) {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
        };

        // reflect the worst through the centroid
        let xr = lerp(&centroid, &pts[dim], -1.0);
        let fr = eval(&xr, &mut f, &mut evals);

        if fr < fv[0] {
            let xe = lerp(&centroid, &pts[dim], -2.0);
            let fe = eval(&xe, &mut f, &mut evals);
            if fe < fr {
                pts[dim] = xe;
                fv[dim] = fe;
            } else {
                pts[dim] = xr;
                fv[dim] = fr;
            }
        } else if fr < fv[dim - 1] {
            pts[dim] = xr;
            fv[dim] = fr;
        } else {
            // contraction: outside if the reflection improved on the worst
            let (xc, fc) = if fr < fv[dim] {
                let xc = lerp(&centroid, &xr, 0.5);
                let fc = eval(&xc, &mut f, &mut evals);
                (xc, fc)
            } else {
                let xc = lerp(&centroid, &pts[dim], 0.5);
                let fc = eval(&xc, &mut f, &mut evals);
                (xc, fc)
            };
            if fc < fv[dim].min(fr) {
                pts[dim] = xc;
                fv[dim] = fc;
            } else {
                // shrink toward the best point
                for i in 1..=dim {
                    pts[i] = lerp(&pts[0], &pts[i], 0.5);
                    fv[i] = eval(&pts[i], &mut f, &mut evals);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    NmResult { x: pts[best].clone(), fx: fv[best], converged }
}
