//! Levenberg–Marquardt with Marquardt diagonal scaling, forward-difference
//! Jacobians and box constraints applied by projection.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Converged once the undamped Gauss–Newton step is shorter than
    /// `step_tolerance·(‖x‖ + step_tolerance)`, or once no step changes the
    /// cost by more than its evaluation noise.
    pub step_tolerance: f64,
    pub initial_damping: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_tolerance: 1e-10,
            initial_damping: 1e-3,
        }
    }
}

const MAX_DAMPING: f64 = 1e16;
/// Relative cost change below which two points count as equally good. Model
/// evaluation error, amplified by the cancellation in `model − data`, puts
/// the noise floor of the cost near 1e-14 relative.
const COST_NOISE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome {
    pub x: Vec<f64>,
    /// Sum of squared weighted residuals.
    pub cost: f64,
    pub iterations: usize,
    /// Diagonal of (JᵀJ)⁻¹ at `x`; NaN where singular.
    pub jtj_inverse_diag: Vec<f64>,
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn jacobian<F>(residuals: &F, x: &[f64], r0: &[f64]) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let m = r0.len();
    let n = x.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut probe = x.to_vec();
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1.0);
        probe[j] = x[j] + h;
        let r = residuals(&probe);
        for i in 0..m {
            jac[(i, j)] = (r[i] - r0[i]) / h;
        }
        probe[j] = x[j];
    }
    jac
}

/// Solves `lhs·δ = −grad` and projects `x + δ`. Coordinates that the
/// projection clips are held at the bound and the rest re-solved, so a box
/// constraint does not distort the free directions.
fn bounded_step<P: Fn(&mut [f64])>(lhs: &DMatrix<f64>, grad: &DVector<f64>, x: &[f64], project: &P) -> Option<Vec<f64>> {
    let n = x.len();
    let delta = lhs.clone().cholesky()?.solve(&(-grad));
    let raw: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
    let mut trial = raw.clone();
    project(&mut trial);
    let free: Vec<usize> = (0..n).filter(|&i| trial[i] == raw[i]).collect();
    if free.len() < n && !free.is_empty() {
        let fixed: Vec<usize> = (0..n).filter(|&i| trial[i] != raw[i]).collect();
        let a_ff = lhs.select_rows(&free).select_columns(&free);
        let a_fc = lhs.select_rows(&free).select_columns(&fixed);
        let d_c = DVector::from_iterator(fixed.len(), fixed.iter().map(|&i| trial[i] - x[i]));
        let rhs = -(grad.select_rows(&free) + a_fc * d_c);
        if let Some(sub) = a_ff.cholesky() {
            let d_f = sub.solve(&rhs);
            for (k, &i) in free.iter().enumerate() {
                trial[i] = x[i] + d_f[k];
            }
            project(&mut trial);
        }
    }
    Some(trial)
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

/// Minimises `Σ r_i(x)²`. `project` maps a trial point back into the
/// feasible box and is applied to every accepted point.
pub(crate) fn minimize<F, P>(residuals: F, project: P, x0: &[f64], config: &LmConfig) -> Result<LmOutcome>
where
    F: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&mut [f64]),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x);
    let mut r = residuals(&x);
    let mut cost = sum_sq(&r);
    if !cost.is_finite() {
        return Err(Error::DegenerateData(
            "model is not finite at the initial parameters".into(),
        ));
    }
    if r.len() < n {
        return Err(Error::DegenerateData(format!(
            "{} data points for {n} parameters",
            r.len()
        )));
    }

    let mut damping = config.initial_damping;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        iterations += 1;
        let jac = jacobian(&residuals, &x, &r);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * DVector::from_column_slice(&r);
        if cost == 0.0 || grad.amax() == 0.0 {
            converged = true;
            break;
        }
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let tolerance = config.step_tolerance * (norm + config.step_tolerance);
        // Judge convergence on the undamped step: a tiny step taken under heavy
        // damping says nothing about distance to the minimum.
        if let Some(target) = bounded_step(&jtj, &grad, &x, &project) {
            if distance(&x, &target) <= tolerance {
                converged = true;
                break;
            }
        }
        let scale: Vec<f64> = (0..n).map(|i| jtj[(i, i)].max(1e-300)).collect();
        // costs this close cannot be told apart in floating point
        let noise = COST_NOISE * cost;

        let mut accepted = false;
        while damping <= MAX_DAMPING {
            let mut lhs = jtj.clone();
            for i in 0..n {
                lhs[(i, i)] += damping * scale[i];
            }
            let Some(trial) = bounded_step(&lhs, &grad, &x, &project) else {
                damping *= 10.0;
                continue;
            };
            let r_trial = residuals(&trial);
            let c_trial = sum_sq(&r_trial);
            if !(c_trial <= cost + noise) {
                damping *= 10.0;
                continue;
            }
            if c_trial >= cost - noise {
                // the best available move changes the cost by less than its
                // rounding error: stationary to working precision
                converged = true;
                break;
            }
            x = trial;
            r = r_trial;
            cost = c_trial;
            damping = (damping / 10.0).max(1e-12);
            accepted = true;
            break;
        }
        if !accepted {
            // no descent along any damped direction
            converged = true;
        }
        if converged {
            break;
        }
    }

    if !converged {
        return Err(Error::NotConverged { iterations });
    }

    let jac = jacobian(&residuals, &x, &r);
    let jtj = jac.transpose() * &jac;
    let jtj_inverse_diag = match jtj.try_inverse() {
        Some(inv) => (0..n).map(|i| inv[(i, i)]).collect(),
        None => vec![f64::NAN; n],
    };
    Ok(LmOutcome {
        x,
        cost,
        iterations,
        jtj_inverse_diag,
    })
}
