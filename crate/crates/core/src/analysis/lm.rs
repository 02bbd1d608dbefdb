//! Levenberg–Marquardt damped least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    /// Converged when ‖δ‖ < x_tol·(‖p‖ + x_tol).
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { x_tol: 1e-9, max_iter: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct LmSolution {
    pub params: Vec<f64>,
    /// Sum of squared residuals at `params`.
    pub cost: f64,
    pub iterations: usize,
}

fn cost(r: &DVector<f64>) -> f64 {
    r.norm_squared()
}

/// Central-difference Jacobian of `residuals` at `p`.
fn jacobian<F: Fn(&[f64], &mut [f64])>(residuals: &F, p: &[f64], m: usize) -> DMatrix<f64> {
    let n = p.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut q = p.to_vec();
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    for j in 0..n {
        let h = 1e-6 * p[j].abs().max(1e-6);
        q[j] = p[j] + h;
        residuals(&q, &mut plus);
        q[j] = p[j] - h;
        residuals(&q, &mut minus);
        q[j] = p[j];
        for i in 0..m {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    jac
}

/// Minimizes Σ rᵢ(p)² starting from `p0`. `residuals(p, out)` fills `out`
/// with the `m` residuals.
pub fn levenberg_marquardt<F>(residuals: F, p0: &[f64], m: usize, opts: LmOptions) -> Result<LmSolution>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = p0.len();
    if m < n {
        return Err(Error::Fit(format!("{m} data points for {n} parameters")));
    }
    let mut p = p0.to_vec();
    let mut r = DVector::zeros(m);
    residuals(&p, r.as_mut_slice());
    let mut c = cost(&r);
    if !c.is_finite() {
        return Err(Error::Fit("non-finite residuals at the initial guess".into()));
    }
    let mut lambda = 1e-3;
    let mut trial = vec![0.0; n];
    let mut r_trial = DVector::zeros(m);
    for iter in 1..=opts.max_iter {
        let jac = jacobian(&residuals, &p, m);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        if g.amax() == 0.0 {
            return Ok(LmSolution { params: p, cost: c, iterations: iter });
        }
        loop {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let step = a.cholesky().map(|ch| ch.solve(&(-&g)));
            let Some(step) = step else {
                lambda *= 10.0;
                if lambda > 1e20 {
                    return Err(Error::Fit(format!("singular normal equations after {iter} iterations")));
                }
                continue;
            };
            for k in 0..n {
                trial[k] = p[k] + step[k];
            }
            residuals(&trial, r_trial.as_mut_slice());
            let c_trial = cost(&r_trial);
            let p_norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            let small = step.norm() < opts.x_tol * (p_norm + opts.x_tol);
            if c_trial.is_finite() && c_trial <= c {
                p.copy_from_slice(&trial);
                std::mem::swap(&mut r, &mut r_trial);
                c = c_trial;
                lambda = (lambda / 3.0).max(1e-12);
                if small {
                    return Ok(LmSolution { params: p, cost: c, iterations: iter });
                }
                break;
            }
            if small {
                // no downhill step left at this resolution
                return Ok(LmSolution { params: p, cost: c, iterations: iter });
            }
            lambda *= 4.0;
            if lambda > 1e20 {
                return Ok(LmSolution { params: p, cost: c, iterations: iter });
            }
        }
    }
    Err(Error::Fit(format!("no convergence after {} iterations (cost {c:.6e}, params {p:?})", opts.max_iter)))
}
