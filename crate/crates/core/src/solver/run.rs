//! Backend selection and the exportable result of one solve.

use std::sync::{Arc, Mutex};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::backend::{CkksBackend, SimMatrix, SimVector, SimulatedBackend};
use super::depth::{depth_cost, Algorithm};
use super::encrypted::run_levelled;
use super::instance::QpInstance;
use super::plain::{agd_plain, gd_plain};
use super::trace::Trace;
use crate::ckks::{CkksContext, CkksParams, Evaluator, GaloisKeys, KeyGenerator, KeySet, PublicKey, RelinKey, SecretKey};
use crate::enclin::{encode_matrix, encode_vector_replicated, mmult_rotation_steps, EncodedMatrix, EncodedVector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    /// Floating-point iteration with no level accounting.
    PlainExact,
    /// Floating-point iteration that tracks levels like the encrypted run.
    PlainSimulatedDepth,
    Ckks,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::PlainExact => "plain",
            BackendKind::PlainSimulatedDepth => "sim",
            BackendKind::Ckks => "ckks",
        }
    }
}

impl std::fmt::Display for BackendKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" | "plain_exact" => Ok(BackendKind::PlainExact),
            "sim" | "plain_simulated_depth" => Ok(BackendKind::PlainSimulatedDepth),
            "ckks" => Ok(BackendKind::Ckks),
            _ => Err(Error::contract(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub iterations: usize,
    pub backend: BackendKind,
    /// Levels available to the run.
    pub depth_budget: usize,
    pub record_trajectory: bool,
}

impl SolverConfig {
    pub fn new(iterations: usize, backend: BackendKind) -> Self {
        Self { iterations, backend, depth_budget: 18, record_trajectory: false }
    }

    pub fn validate(&self, algorithm: Algorithm) -> Result<()> {
        let need = depth_cost(algorithm, self.iterations);
        if self.backend != BackendKind::PlainExact && need > self.depth_budget {
            return Err(Error::DepthExhausted(format!(
                "{} {algorithm} iterations need {need} levels, budget is {}",
                self.iterations, self.depth_budget
            )));
        }
        Ok(())
    }
}

/// Keys and evaluator for encrypted solves. Holding the secret key lets the
/// session decrypt results, which only the data owner may do.
pub struct CkksSession {
    pub ctx: Arc<CkksContext>,
    pub ev: Evaluator,
    pub public: PublicKey,
    pub secret: Option<SecretKey>,
    pub relin: RelinKey,
    pub galois: GaloisKeys,
    rng: Mutex<ChaCha20Rng>,
}

impl CkksSession {
    /// Generates keys, with rotation keys limited to what matrix products
    /// of the given dimensions use.
    pub fn generate(params: CkksParams, dims: &[usize], seed: u64) -> Result<Self> {
        let ctx = CkksContext::new(params)?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let kg = KeyGenerator::new(ctx.clone(), &mut rng);
        let mut steps = std::collections::BTreeSet::new();
        for &d in dims {
            steps.extend(mmult_rotation_steps(d, ctx.slots())?);
        }
        let steps: Vec<i64> = steps.into_iter().collect();
        let keys = KeySet {
            secret: kg.secret_key().clone(),
            public: kg.public_key(&mut rng),
            relin: kg.relin_key(&mut rng),
            galois: kg.galois_keys_for(&steps, &mut rng),
        };
        Ok(Self::from_keys(ctx, keys, seed.wrapping_add(1)))
    }

    pub fn from_keys(ctx: Arc<CkksContext>, keys: KeySet, seed: u64) -> Self {
        Self::from_parts(ctx, keys.public, Some(keys.secret), keys.relin, keys.galois, seed)
    }

    pub fn from_stored(keys: crate::ckks::StoredKeys, seed: u64) -> Self {
        Self::from_parts(keys.ctx, keys.public, keys.secret, keys.relin, keys.galois, seed)
    }

    pub fn from_parts(
        ctx: Arc<CkksContext>,
        public: PublicKey,
        secret: Option<SecretKey>,
        relin: RelinKey,
        galois: GaloisKeys,
        seed: u64,
    ) -> Self {
        Self {
            ev: Evaluator::new(ctx.clone()),
            ctx,
            public,
            secret,
            relin,
            galois,
            rng: Mutex::new(ChaCha20Rng::seed_from_u64(seed)),
        }
    }

    pub fn backend(&self, observe: bool) -> CkksBackend<'_> {
        CkksBackend {
            ev: &self.ev,
            rk: &self.relin,
            gk: &self.galois,
            observer: if observe { self.secret.as_ref() } else { None },
        }
    }

    fn encrypt_slots(&self, slots: &[f64], level: usize) -> Result<crate::ckks::Ciphertext> {
        let pt = self.ctx.encode_real(slots, self.ctx.default_scale(), level)?;
        let mut rng = self.rng.lock().expect("rng lock poisoned");
        self.ctx.encrypt(&pt, &self.public, &mut *rng)
    }

    pub fn encrypt_matrix(&self, m: &nalgebra::DMatrix<f64>, level: usize) -> Result<EncodedMatrix> {
        let d = m.nrows();
        Ok(EncodedMatrix::new(self.encrypt_slots(&encode_matrix(m)?, level)?, d))
    }

    pub fn encrypt_vector(&self, v: &DVector<f64>, level: usize) -> Result<EncodedVector> {
        Ok(EncodedVector::new(self.encrypt_slots(&encode_vector_replicated(v), level)?, v.len()))
    }

    pub fn decrypt_vector(&self, v: &EncodedVector) -> Result<DVector<f64>> {
        let sk = self.secret.as_ref().ok_or_else(|| Error::contract("decryption needs the secret key"))?;
        v.decrypt(&self.ctx, sk)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub x: Vec<f64>,
    pub tolerance: f64,
    pub level: Option<usize>,
    pub seconds: f64,
}

/// Exported outcome of one solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub instance_id: String,
    pub algorithm: Algorithm,
    pub backend: BackendKind,
    pub iterations: usize,
    pub final_tolerance: f64,
    pub final_x: Vec<f64>,
    pub per_iteration: Vec<IterationRecord>,
}

impl SolveResult {
    fn from_trace(inst: &QpInstance, algorithm: Algorithm, config: &SolverConfig, trace: &Trace) -> Self {
        let per_iteration = if config.record_trajectory {
            (0..trace.len())
                .map(|t| IterationRecord {
                    t,
                    x: trace.iterates[t].clone(),
                    tolerance: trace.tolerances[t],
                    level: trace.levels[t],
                    seconds: trace.seconds[t],
                })
                .collect()
        } else {
            Vec::new()
        };
        Self {
            instance_id: inst.id.clone(),
            algorithm,
            backend: config.backend,
            iterations: config.iterations,
            final_tolerance: trace.final_tolerance().unwrap_or(f64::NAN),
            final_x: trace.iterates.last().cloned().unwrap_or_default(),
            per_iteration,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Rebuilds the trajectory from the recorded iterations.
    pub fn trace(&self) -> Trace {
        let mut t = Trace::default();
        for r in &self.per_iteration {
            t.iterates.push(r.x.clone());
            t.tolerances.push(r.tolerance);
            t.levels.push(r.level);
            t.seconds.push(r.seconds);
        }
        t
    }
}

/// Solves `inst` on the configured backend. The encrypted backend encrypts
/// `Q`, `p` and `x0` at the budgeted level and decrypts with the session's
/// secret key.
pub fn solve(
    inst: &QpInstance,
    algorithm: Algorithm,
    config: &SolverConfig,
    session: Option<&CkksSession>,
) -> Result<SolveResult> {
    config.validate(algorithm)?;
    let n = config.iterations;
    let trace = match config.backend {
        BackendKind::PlainExact => match algorithm {
            Algorithm::Gd => gd_plain(inst, n)?,
            Algorithm::Agd => agd_plain(inst, n)?,
        },
        BackendKind::PlainSimulatedDepth => {
            let level = config.depth_budget;
            let q = SimMatrix { value: inst.q.clone(), level };
            let p = SimVector::new(inst.p.clone(), level);
            let x0 = SimVector::new(inst.x0.clone(), level);
            let (_, trace) = run_levelled(&SimulatedBackend, algorithm, &q, &p, x0, &inst.meta(), n, Some(inst))?;
            trace.expect("simulated runs are always observable")
        }
        BackendKind::Ckks => {
            let s = session.ok_or_else(|| Error::contract("the ckks backend needs a key session"))?;
            let sk = s.secret.as_ref().ok_or_else(|| Error::contract("reporting a ckks solve needs the secret key"))?;
            let level = config.depth_budget.min(s.ctx.max_level());
            let q = s.encrypt_matrix(&inst.q, level)?;
            let p = s.encrypt_vector(&inst.p, level)?;
            let x0 = s.encrypt_vector(&inst.x0, level)?;
            let observe = config.record_trajectory;
            let backend = s.backend(observe);
            let (x, trace) = run_levelled(&backend, algorithm, &q, &p, x0, &inst.meta(), n, Some(inst))?;
            match trace {
                Some(t) => t,
                None => {
                    let mut t = Trace::default();
                    t.push(inst, &x.decrypt(&s.ctx, sk)?, Some(x.ct.level()), 0.0);
                    t
                }
            }
        }
    };
    Ok(SolveResult::from_trace(inst, algorithm, config, &trace))
}
