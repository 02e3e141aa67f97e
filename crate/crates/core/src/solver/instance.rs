//! Unconstrained quadratic programs `min ½xᵀQx + pᵀx`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probgen::sym_eig;

/// A quadratic program together with its spectral bounds, minimizer and
/// starting point.
#[derive(Clone, Debug, PartialEq)]
pub struct QpInstance {
    pub id: String,
    pub q: DMatrix<f64>,
    pub p: DVector<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kappa: f64,
    pub x_star: DVector<f64>,
    pub x0: DVector<f64>,
    /// `‖x0 − x*‖₂`.
    pub r: f64,
}

/// Plaintext metadata that travels alongside an encrypted instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpMeta {
    pub d: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl QpMeta {
    pub fn kappa(&self) -> f64 {
        self.lambda_max / self.lambda_min
    }
}

impl QpInstance {
    pub fn new(
        id: impl Into<String>,
        q: DMatrix<f64>,
        p: DVector<f64>,
        lambda_min: f64,
        lambda_max: f64,
        x_star: DVector<f64>,
        x0: DVector<f64>,
    ) -> Result<Self> {
        let d = q.nrows();
        if q.ncols() != d || p.len() != d || x_star.len() != d || x0.len() != d || d == 0 {
            return Err(Error::Dimension("instance parts disagree on the dimension".into()));
        }
        if q != q.transpose() {
            return Err(Error::contract("Q must be exactly symmetric"));
        }
        if !(lambda_min > 0.0 && lambda_min <= lambda_max) {
            return Err(Error::contract(format!("need 0 < λmin ≤ λmax, got {lambda_min}, {lambda_max}")));
        }
        let r = (&x0 - &x_star).norm();
        Ok(Self { id: id.into(), q, p, lambda_min, lambda_max, kappa: lambda_max / lambda_min, x_star, x0, r })
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn meta(&self) -> QpMeta {
        QpMeta { d: self.dim(), lambda_min: self.lambda_min, lambda_max: self.lambda_max }
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + self.p.dot(x)
    }

    /// `f(x) − f(x*)`, evaluated as `½(x−x*)ᵀQ(x−x*)` to avoid cancellation.
    pub fn tolerance(&self, x: &DVector<f64>) -> f64 {
        let e = x - &self.x_star;
        0.5 * e.dot(&(&self.q * &e))
    }

    /// Checks the stated spectral bounds and minimizer.
    pub fn validate(&self) -> Result<()> {
        let eig = sym_eig(&self.q)?;
        let slack = 1e-8 * self.lambda_max.max(1.0);
        if eig.min() < self.lambda_min - slack || eig.max() > self.lambda_max + slack {
            return Err(Error::contract(format!(
                "spectrum [{}, {}] outside the stated bounds [{}, {}]",
                eig.min(),
                eig.max(),
                self.lambda_min,
                self.lambda_max
            )));
        }
        let residual = (&self.q * &self.x_star + &self.p).amax();
        if residual > 1e-10 * self.p.amax().max(1.0) {
            return Err(Error::contract(format!("x* is not a minimizer (residual {residual:e})")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&InstanceFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<InstanceFile>(text)?.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk form: row-major `Q` and plain arrays.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    id: String,
    d: usize,
    q: Vec<Vec<f64>>,
    p: Vec<f64>,
    x0: Vec<f64>,
    x_star: Vec<f64>,
    lambda_min: f64,
    lambda_max: f64,
    kappa: f64,
    r: f64,
}

impl From<&QpInstance> for InstanceFile {
    fn from(i: &QpInstance) -> Self {
        Self {
            id: i.id.clone(),
            d: i.dim(),
            q: i.q.row_iter().map(|r| r.iter().copied().collect()).collect(),
            p: i.p.iter().copied().collect(),
            x0: i.x0.iter().copied().collect(),
            x_star: i.x_star.iter().copied().collect(),
            lambda_min: i.lambda_min,
            lambda_max: i.lambda_max,
            kappa: i.kappa,
            r: i.r,
        }
    }
}

impl TryFrom<InstanceFile> for QpInstance {
    type Error = Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        let d = f.d;
        if f.q.len() != d || f.q.iter().any(|row| row.len() != d) {
            return Err(Error::Dimension(format!("Q is not {d}×{d}")));
        }
        let flat: Vec<f64> = f.q.into_iter().flatten().collect();
        QpInstance::new(
            f.id,
            DMatrix::from_row_slice(d, d, &flat),
            DVector::from_vec(f.p),
            f.lambda_min,
            f.lambda_max,
            DVector::from_vec(f.x_star),
            DVector::from_vec(f.x0),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probgen::{make_instance, GenSpec};

    #[test]
    fn json_round_trip_is_exact() {
        let inst = make_instance(&GenSpec::new(4, 3.0, 8)).unwrap();
        let back = QpInstance::from_json(&inst.to_json().unwrap()).unwrap();
        assert_eq!(back, inst);
        inst.validate().unwrap();
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        let v = DVector::zeros(2);
        assert!(QpInstance::new("x", q, v.clone(), 1.0, 1.0, v.clone(), v.clone()).is_err());
        let q = DMatrix::identity(2, 2);
        assert!(QpInstance::new("x", q.clone(), v.clone(), 0.0, 1.0, v.clone(), v.clone()).is_err());
        let wrong = QpInstance::new("x", q * 3.0, v.clone(), 1.0, 2.0, v.clone(), v).unwrap();
        assert!(wrong.validate().is_err());
    }
}
