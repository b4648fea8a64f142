//! Damped Gauss-Newton (Levenberg-Marquardt) for small dense least-squares problems.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Copy, Debug)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop once `|r|^2` falls below this value.
    pub cost_tol: f64,
    /// Stop when a step changes `x` by less than this relative amount.
    pub step_tol: f64,
    pub initial_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { max_iter: 200, cost_tol: 1e-28, step_tol: 1e-15, initial_damping: 1e-3 }
    }
}

#[derive(Clone, Debug)]
pub struct LmResult {
    pub x: DVector<f64>,
    /// Final `|r|^2`.
    pub cost: f64,
    pub iterations: usize,
}

/// Minimizes `|r(x)|^2` where `model(x)` returns the residual and its Jacobian.
pub fn levenberg_marquardt<F>(x0: DVector<f64>, model: F, opts: &LmOptions) -> LmResult
where
    F: Fn(&DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
{
    let mut x = x0;
    let (mut r, mut jac) = model(&x);
    let mut cost = r.norm_squared();
    let mut mu = opts.initial_damping;
    let mut nu = 2.0;
    let mut it = 0;
    if !cost.is_finite() {
        return LmResult { x, cost: f64::INFINITY, iterations: 0 };
    }
    if x.is_empty() {
        return LmResult { x, cost, iterations: 0 };
    }
    while it < opts.max_iter && cost > opts.cost_tol {
        it += 1;
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &r;
        let scale = jtj.diagonal().max().max(1e-300);
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for k in 0..a.nrows() {
                a[(k, k)] += mu * scale;
            }
            let Some(chol) = a.cholesky() else {
                mu *= nu;
                nu *= 2.0;
                continue;
            };
            let step = -chol.solve(&g);
            let xn = &x + &step;
            let (rn, jn) = model(&xn);
            let cn = rn.norm_squared();
            // gain ratio against the linear model
            let predicted = cost - (&r + &jac * &step).norm_squared();
            if cn.is_finite() && cn < cost {
                let rho = if predicted > 0.0 { (cost - cn) / predicted } else { 1.0 };
                let small_step = step.norm() <= opts.step_tol * (x.norm() + opts.step_tol);
                x = xn;
                r = rn;
                jac = jn;
                cost = cn;
                mu *= (1.0f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
                nu = 2.0;
                accepted = true;
                if small_step {
                    return LmResult { x, cost, iterations: it };
                }
                break;
            }
            mu *= nu;
            nu *= 2.0;
        }
        if !accepted {
            break;
        }
    }
    LmResult { x, cost, iterations: it }
}
