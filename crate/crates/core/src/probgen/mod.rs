//! Random quadratic programs with a prescribed condition number.

mod eigen;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use eigen::{sym_eig, SymEig, OFF_DIAGONAL_TOLERANCE};

use crate::error::{Error, Result};
use crate::solver::QpInstance;

/// How eigenvalues strictly between `1` and `κ` are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenProfile {
    /// Every eigenvalue at an endpoint, each interior one picked at random.
    TwoPoint,
    /// Interior eigenvalues uniform in `[1, κ]`.
    #[default]
    UniformSpread,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub d: usize,
    pub kappa: f64,
    pub seed: u64,
    #[serde(default)]
    pub eigen_profile: EigenProfile,
}

impl GenSpec {
    pub fn new(d: usize, kappa: f64, seed: u64) -> Self {
        Self { d, kappa, seed, eigen_profile: EigenProfile::UniformSpread }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::contract(format!("dimension must be at least 2, got {}", self.d)));
        }
        if !(self.kappa >= 1.0 && self.kappa.is_finite()) {
            return Err(Error::contract(format!("condition number must be ≥ 1, got {}", self.kappa)));
        }
        Ok(())
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Haar-distributed orthogonal matrix from the QR factors of a Gaussian
/// matrix, with column signs fixed by the diagonal of `R`.
fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn spectrum<R: Rng + ?Sized>(spec: &GenSpec, rng: &mut R) -> Vec<f64> {
    let d = spec.d;
    let mut lambda = vec![1.0; d];
    lambda[d - 1] = spec.kappa;
    for l in lambda.iter_mut().take(d - 1).skip(1) {
        *l = match spec.eigen_profile {
            EigenProfile::UniformSpread => rng.gen_range(1.0..=spec.kappa),
            EigenProfile::TwoPoint => {
                if rng.gen_bool(0.5) {
                    spec.kappa
                } else {
                    1.0
                }
            }
        };
    }
    lambda
}

fn spd_from_rng<R: Rng + ?Sized>(spec: &GenSpec, rng: &mut R) -> DMatrix<f64> {
    let u = random_orthogonal(spec.d, rng);
    let lambda = spectrum(spec, rng);
    let q = &u * DMatrix::from_diagonal(&DVector::from_vec(lambda)) * u.transpose();
    (&q + q.transpose()) * 0.5
}

/// `Q = U·diag(λ)·Uᵀ` with `λ_min = 1` and `λ_max = κ`, exactly symmetric.
pub fn random_spd(spec: &GenSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    Ok(spd_from_rng(spec, &mut spec.rng()))
}

/// Instance with `x*` uniform in `[-1, 1]^d`, `p = -Q·x*` and `x0` at unit
/// distance from `x*` in a uniformly random direction.
pub fn make_instance(spec: &GenSpec) -> Result<QpInstance> {
    spec.validate()?;
    let mut rng = spec.rng();
    let q = spd_from_rng(spec, &mut rng);
    let d = spec.d;
    let x_star = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..=1.0));
    let p = -(&q * &x_star);
    let dir = loop {
        let g = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm > 1e-8 {
            break g / norm;
        }
    };
    let x0 = &x_star + dir;
    let id = format!("d{d}-k{}-s{}", spec.kappa, spec.seed);
    QpInstance::new(id, q, p, 1.0, spec.kappa, x_star, x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_dimensional_spectrum_is_exact() {
        let q = random_spd(&GenSpec::new(2, 7.0, 3)).unwrap();
        let e = sym_eig(&q).unwrap();
        assert!((e.min() - 1.0).abs() < 1e-12);
        assert!((e.max() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn certified_condition_number() {
        for d in [2usize, 4, 8] {
            for (seed, kappa) in [1.5, 2.0, 10.0, 50.0].into_iter().enumerate() {
                for profile in [EigenProfile::UniformSpread, EigenProfile::TwoPoint] {
                    let spec = GenSpec { d, kappa, seed: seed as u64, eigen_profile: profile };
                    let q = random_spd(&spec).unwrap();
                    assert_eq!(q, q.transpose());
                    assert!((sym_eig(&q).unwrap().condition_number() - kappa).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn seed_determinism() {
        let spec = GenSpec::new(4, 5.0, 99);
        assert_eq!(random_spd(&spec).unwrap(), random_spd(&spec).unwrap());
        let a = make_instance(&spec).unwrap();
        let b = make_instance(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.q, random_spd(&spec).unwrap());
        assert_ne!(make_instance(&GenSpec::new(4, 5.0, 100)).unwrap().q, a.q);
    }

    #[test]
    fn instance_geometry() {
        for seed in 0..20 {
            let spec = GenSpec::new(2 + (seed as usize % 7), 1.0 + seed as f64, seed);
            let inst = make_instance(&spec).unwrap();
            assert!(((&inst.x0 - &inst.x_star).norm() - 1.0).abs() < 1e-12);
            assert!((&inst.q * &inst.x_star + &inst.p).amax() < 1e-12);
            let gap = inst.tolerance(&inst.x0);
            assert!(gap >= 0.5 - 1e-12 && gap <= spec.kappa / 2.0 + 1e-12);
        }
    }

    #[test]
    fn rayleigh_quotients_within_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in [2usize, 4, 8] {
            let spec = GenSpec::new(d, 20.0, d as u64);
            let q = random_spd(&spec).unwrap();
            for _ in 0..100 {
                let x = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
                let r = x.dot(&(&q * &x)) / x.dot(&x);
                assert!(r >= 1.0 - 1e-12 && r <= 20.0 + 1e-12);
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(random_spd(&GenSpec::new(1, 2.0, 0)).is_err());
        assert!(random_spd(&GenSpec::new(2, 0.5, 0)).is_err());
    }
}
