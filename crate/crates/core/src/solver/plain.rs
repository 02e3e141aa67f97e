//! Floating-point reference solvers.

use nalgebra::{DVector, Cholesky};

use super::instance::QpInstance;
use super::trace::Trace;
use crate::error::{Error, Result};

fn check_eigenvalues(lambda_min: f64, lambda_max: f64) -> Result<()> {
    if !(lambda_min > 0.0 && lambda_max >= lambda_min && lambda_max.is_finite()) {
        return Err(Error::contract(format!("need 0 < λmin ≤ λmax, got {lambda_min}, {lambda_max}")));
    }
    Ok(())
}

/// Signed gradient step `-2/(λmin + λmax)`.
pub fn gd_step_size(lambda_min: f64, lambda_max: f64) -> Result<f64> {
    check_eigenvalues(lambda_min, lambda_max)?;
    Ok(-2.0 / (lambda_min + lambda_max))
}

/// Signed gradient step `-1/λmax`.
pub fn agd_step_size(lambda_max: f64) -> Result<f64> {
    check_eigenvalues(lambda_max, lambda_max)?;
    Ok(-1.0 / lambda_max)
}

/// Momentum weight `(√κ − 1)/(√κ + 1)`.
pub fn momentum(kappa: f64) -> f64 {
    let s = kappa.sqrt();
    (s - 1.0) / (s + 1.0)
}

/// `x + η(Qx + p)`.
fn gradient_step(inst: &QpInstance, x: &DVector<f64>, eta: f64) -> DVector<f64> {
    x + eta * (&inst.q * x + &inst.p)
}

/// Gradient descent with an explicit signed step.
pub fn gd_plain_with_step(inst: &QpInstance, iterations: usize, eta: f64) -> Trace {
    let mut trace = Trace::default();
    let mut x = inst.x0.clone();
    trace.push(inst, &x, None, 0.0);
    for _ in 0..iterations {
        x = gradient_step(inst, &x, eta);
        trace.push(inst, &x, None, 0.0);
    }
    trace
}

pub fn gd_plain(inst: &QpInstance, iterations: usize) -> Result<Trace> {
    Ok(gd_plain_with_step(inst, iterations, gd_step_size(inst.lambda_min, inst.lambda_max)?))
}

/// `y₊ = x₋ + η(Qx₋ + p)`, `x₊ = (1+θ)y₊ − θy₋`.
pub fn agd_plain(inst: &QpInstance, iterations: usize) -> Result<Trace> {
    let eta = agd_step_size(inst.lambda_max)?;
    let theta = momentum(inst.kappa);
    let mut trace = Trace::default();
    let mut x = inst.x0.clone();
    let mut y_prev = inst.x0.clone();
    trace.push(inst, &x, None, 0.0);
    for _ in 0..iterations {
        let y = gradient_step(inst, &x, eta);
        x = (1.0 + theta) * &y - theta * &y_prev;
        y_prev = y;
        trace.push(inst, &x, None, 0.0);
    }
    Ok(trace)
}

/// Solves `Qx = −p` through a Cholesky factorization.
pub fn closed_form(inst: &QpInstance) -> Result<DVector<f64>> {
    let chol = Cholesky::new(inst.q.clone()).ok_or_else(|| Error::contract("Q is not positive definite"))?;
    Ok(-chol.solve(&inst.p))
}
