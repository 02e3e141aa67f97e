//! Levelled arithmetic shared by the encrypted solver and its exact
//! simulation.

use nalgebra::{DMatrix, DVector};

use crate::ckks::{Evaluator, GaloisKeys, RelinKey, SecretKey};
use crate::enclin::{mmult, EncodedMatrix, EncodedVector};
use crate::error::{Error, Result};

/// The operations the encrypted solvers are written against.
pub trait LevelledBackend {
    type Matrix;
    type Vector: Clone;

    fn level(&self, v: &Self::Vector) -> usize;
    /// `a·Q·x`, consuming two levels.
    fn mmult(&self, q: &Self::Matrix, x: &Self::Vector, a: f64) -> Result<Self::Vector>;
    fn add(&self, a: &Self::Vector, b: &Self::Vector) -> Result<Self::Vector>;
    fn sub(&self, a: &Self::Vector, b: &Self::Vector) -> Result<Self::Vector>;
    /// Product with a scalar, to be followed by [`Self::rescale`].
    fn mul_const(&self, a: &Self::Vector, c: f64) -> Result<Self::Vector>;
    fn rescale(&self, a: &Self::Vector) -> Result<Self::Vector>;
    fn mod_switch(&self, a: &Self::Vector, level: usize) -> Result<Self::Vector>;
    /// Plain view of an iterate, if this backend can see one.
    fn observe(&self, a: &Self::Vector) -> Result<Option<DVector<f64>>>;
}

/// Full CKKS arithmetic. Observation needs the secret key and is meant for
/// tests and benchmarks only.
pub struct CkksBackend<'a> {
    pub ev: &'a Evaluator,
    pub rk: &'a RelinKey,
    pub gk: &'a GaloisKeys,
    pub observer: Option<&'a SecretKey>,
}

impl LevelledBackend for CkksBackend<'_> {
    type Matrix = EncodedMatrix;
    type Vector = EncodedVector;

    fn level(&self, v: &EncodedVector) -> usize {
        v.ct.level()
    }

    fn mmult(&self, q: &EncodedMatrix, x: &EncodedVector, a: f64) -> Result<EncodedVector> {
        mmult(self.ev, q, x, a, self.rk, self.gk)
    }

    fn add(&self, a: &EncodedVector, b: &EncodedVector) -> Result<EncodedVector> {
        Ok(EncodedVector::new(self.ev.add(&a.ct, &b.ct)?, a.d))
    }

    fn sub(&self, a: &EncodedVector, b: &EncodedVector) -> Result<EncodedVector> {
        Ok(EncodedVector::new(self.ev.sub(&a.ct, &b.ct)?, a.d))
    }

    fn mul_const(&self, a: &EncodedVector, c: f64) -> Result<EncodedVector> {
        Ok(EncodedVector::new(self.ev.mul_const(&a.ct, c)?, a.d))
    }

    fn rescale(&self, a: &EncodedVector) -> Result<EncodedVector> {
        Ok(EncodedVector::new(self.ev.rescale(&a.ct)?, a.d))
    }

    fn mod_switch(&self, a: &EncodedVector, level: usize) -> Result<EncodedVector> {
        Ok(EncodedVector::new(self.ev.mod_switch_to(&a.ct, level)?, a.d))
    }

    fn observe(&self, a: &EncodedVector) -> Result<Option<DVector<f64>>> {
        match self.observer {
            Some(sk) => Ok(Some(a.decrypt(self.ev.context(), sk)?)),
            None => Ok(None),
        }
    }
}

/// Exact arithmetic with the level and scale bookkeeping of CKKS.
#[derive(Clone, Copy, Debug, Default)]
pub struct SimulatedBackend;

#[derive(Clone, Debug, PartialEq)]
pub struct SimMatrix {
    pub value: DMatrix<f64>,
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimVector {
    pub value: DVector<f64>,
    pub level: usize,
    /// Scalar products not yet rescaled.
    pub pending: u32,
}

impl SimVector {
    pub fn new(value: DVector<f64>, level: usize) -> Self {
        Self { value, level, pending: 0 }
    }
}

impl SimulatedBackend {
    fn check_pair(a: &SimVector, b: &SimVector) -> Result<()> {
        if a.level != b.level {
            return Err(Error::Alignment { left: a.level, right: b.level });
        }
        if a.pending != b.pending {
            return Err(Error::Scale { left: a.pending as f64, right: b.pending as f64 });
        }
        Ok(())
    }
}

impl LevelledBackend for SimulatedBackend {
    type Matrix = SimMatrix;
    type Vector = SimVector;

    fn level(&self, v: &SimVector) -> usize {
        v.level
    }

    fn mmult(&self, q: &SimMatrix, x: &SimVector, a: f64) -> Result<SimVector> {
        if q.value.nrows() != x.value.len() {
            return Err(Error::Dimension("matrix and vector sizes differ".into()));
        }
        let level = q.level.min(x.level);
        if level < 2 {
            return Err(Error::DepthExhausted(format!("matrix product needs two levels, {level} left")));
        }
        Ok(SimVector::new(a * (&q.value * &x.value), level - 2))
    }

    fn add(&self, a: &SimVector, b: &SimVector) -> Result<SimVector> {
        Self::check_pair(a, b)?;
        Ok(SimVector { value: &a.value + &b.value, level: a.level, pending: a.pending })
    }

    fn sub(&self, a: &SimVector, b: &SimVector) -> Result<SimVector> {
        Self::check_pair(a, b)?;
        Ok(SimVector { value: &a.value - &b.value, level: a.level, pending: a.pending })
    }

    fn mul_const(&self, a: &SimVector, c: f64) -> Result<SimVector> {
        Ok(SimVector { value: c * &a.value, level: a.level, pending: a.pending + 1 })
    }

    fn rescale(&self, a: &SimVector) -> Result<SimVector> {
        if a.level == 0 {
            return Err(Error::DepthExhausted("rescale at level 0".into()));
        }
        Ok(SimVector { value: a.value.clone(), level: a.level - 1, pending: a.pending.saturating_sub(1) })
    }

    fn mod_switch(&self, a: &SimVector, level: usize) -> Result<SimVector> {
        if level > a.level {
            return Err(Error::contract(format!("cannot raise level {} to {level}", a.level)));
        }
        Ok(SimVector { value: a.value.clone(), level, pending: a.pending })
    }

    fn observe(&self, a: &SimVector) -> Result<Option<DVector<f64>>> {
        Ok(Some(a.value.clone()))
    }
}
