//! Gradient descent and accelerated gradient descent over levelled
//! arithmetic, with a fixed iteration count in place of a stopping test.

use std::time::Instant;

use super::backend::{CkksBackend, LevelledBackend};
use super::depth::{depth_cost, Algorithm};
use super::instance::{QpInstance, QpMeta};
use super::plain::{agd_step_size, gd_step_size, momentum};
use super::trace::Trace;
use crate::enclin::{EncodedMatrix, EncodedVector};
use crate::error::{Error, Result};

/// One solver run that can be advanced an iteration at a time.
///
/// `η·p` is formed once at the start and mod-switched down to each
/// iteration's level.
pub struct LevelledSolver<'b, B: LevelledBackend> {
    backend: &'b B,
    algorithm: Algorithm,
    q: &'b B::Matrix,
    eta: f64,
    theta: f64,
    eta_p: B::Vector,
    x: B::Vector,
    y_prev: B::Vector,
    done: usize,
}

impl<'b, B: LevelledBackend> LevelledSolver<'b, B> {
    pub fn new(
        backend: &'b B,
        algorithm: Algorithm,
        q: &'b B::Matrix,
        p: &B::Vector,
        x0: B::Vector,
        meta: &QpMeta,
    ) -> Result<Self> {
        let (eta, theta) = match algorithm {
            Algorithm::Gd => (gd_step_size(meta.lambda_min, meta.lambda_max)?, 0.0),
            Algorithm::Agd => (agd_step_size(meta.lambda_max)?, momentum(meta.kappa())),
        };
        let eta_p = backend.rescale(&backend.mul_const(p, eta)?)?;
        Ok(Self { backend, algorithm, q, eta, theta, eta_p, y_prev: x0.clone(), x: x0, done: 0 })
    }

    pub fn iterate(&self) -> &B::Vector {
        &self.x
    }

    pub fn into_iterate(self) -> B::Vector {
        self.x
    }

    pub fn iterations_done(&self) -> usize {
        self.done
    }

    pub fn step_size(&self) -> f64 {
        self.eta
    }

    /// `x₋ ⊞ MMult(Q, x₋, η) ⊞ η⊙p`, all at the level of the product.
    fn gradient_step(&self) -> Result<B::Vector> {
        let b = self.backend;
        let prod = b.mmult(self.q, &self.x, self.eta)?;
        let level = b.level(&prod);
        let x = b.mod_switch(&self.x, level)?;
        let eta_p = b.mod_switch(&self.eta_p, level)?;
        b.add(&b.add(&x, &prod)?, &eta_p)
    }

    pub fn step(&mut self) -> Result<()> {
        let b = self.backend;
        let y = self.gradient_step()?;
        self.x = match self.algorithm {
            Algorithm::Gd => y,
            Algorithm::Agd => {
                let level = b.level(&y);
                let y_prev = b.mod_switch(&self.y_prev, level)?;
                let lead = b.mul_const(&y, 1.0 + self.theta)?;
                let lag = b.mul_const(&y_prev, self.theta)?;
                self.y_prev = y;
                b.rescale(&b.sub(&lead, &lag)?)?
            }
        };
        self.done += 1;
        Ok(())
    }
}

/// Runs `iterations` steps after checking the depth they need against the
/// levels left on `x0`. A trace is kept when the backend can observe
/// iterates and a reference instance is supplied.
#[allow(clippy::too_many_arguments)]
pub fn run_levelled<B: LevelledBackend>(
    backend: &B,
    algorithm: Algorithm,
    q: &B::Matrix,
    p: &B::Vector,
    x0: B::Vector,
    meta: &QpMeta,
    iterations: usize,
    reference: Option<&QpInstance>,
) -> Result<(B::Vector, Option<Trace>)> {
    let need = depth_cost(algorithm, iterations);
    let have = backend.level(&x0);
    if need > have {
        return Err(Error::DepthExhausted(format!(
            "{iterations} {algorithm} iterations need {need} levels, {have} available"
        )));
    }
    let mut trace = Trace::default();
    let record = |x: &B::Vector, secs: f64, trace: &mut Trace| -> Result<()> {
        if let Some(inst) = reference {
            if let Some(plain) = backend.observe(x)? {
                trace.push(inst, &plain, Some(backend.level(x)), secs);
            }
        }
        Ok(())
    };
    record(&x0, 0.0, &mut trace)?;
    let mut solver = LevelledSolver::new(backend, algorithm, q, p, x0, meta)?;
    for _ in 0..iterations {
        let start = Instant::now();
        solver.step()?;
        let secs = start.elapsed().as_secs_f64();
        log::debug!("{algorithm} iteration {} took {secs:.3}s", solver.iterations_done());
        record(solver.iterate(), secs, &mut trace)?;
    }
    let trace = (!trace.is_empty()).then_some(trace);
    Ok((solver.into_iterate(), trace))
}

fn zero_start(backend: &CkksBackend<'_>, p: &EncodedVector) -> EncodedVector {
    let ctx = backend.ev.context();
    EncodedVector::new(ctx.zero_ciphertext(p.ct.level(), p.ct.scale()), p.d)
}

/// Encrypted gradient descent. Without `x0` the run starts from zero.
pub fn he_gd(
    backend: &CkksBackend<'_>,
    q: &EncodedMatrix,
    p: &EncodedVector,
    meta: &QpMeta,
    x0: Option<&EncodedVector>,
    iterations: usize,
    reference: Option<&QpInstance>,
) -> Result<(EncodedVector, Option<Trace>)> {
    let x0 = x0.cloned().unwrap_or_else(|| zero_start(backend, p));
    run_levelled(backend, Algorithm::Gd, q, p, x0, meta, iterations, reference)
}

/// Encrypted accelerated gradient descent. Without `x0` the run starts
/// from zero.
pub fn he_agd(
    backend: &CkksBackend<'_>,
    q: &EncodedMatrix,
    p: &EncodedVector,
    meta: &QpMeta,
    x0: Option<&EncodedVector>,
    iterations: usize,
    reference: Option<&QpInstance>,
) -> Result<(EncodedVector, Option<Trace>)> {
    let x0 = x0.cloned().unwrap_or_else(|| zero_start(backend, p));
    run_levelled(backend, Algorithm::Agd, q, p, x0, meta, iterations, reference)
}
