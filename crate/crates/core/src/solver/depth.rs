//! Multiplicative depth accounting for the encrypted solvers.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[serde(alias = "GD")]
    Gd,
    #[serde(alias = "AGD")]
    Agd,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gd => "GD",
            Algorithm::Agd => "AGD",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gd" => Ok(Algorithm::Gd),
            "agd" => Ok(Algorithm::Agd),
            _ => Err(crate::Error::contract(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Encrypted matrix product whose cost is being accounted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatMulScheme {
    /// One ciphertext product after one plaintext product: 2 levels.
    Ours,
    /// One ciphertext product after two plaintext products: 3 levels.
    Jkls,
}

impl MatMulScheme {
    pub fn depth(self) -> usize {
        match self {
            MatMulScheme::Ours => 2,
            MatMulScheme::Jkls => 3,
        }
    }
}

/// Levels consumed by one iteration: the matrix product plus one more for
/// the momentum combination of AGD.
pub fn per_iteration_cost(algorithm: Algorithm, scheme: MatMulScheme) -> usize {
    scheme.depth()
        + match algorithm {
            Algorithm::Gd => 0,
            Algorithm::Agd => 1,
        }
}

pub fn depth_cost(algorithm: Algorithm, iterations: usize) -> usize {
    per_iteration_cost(algorithm, MatMulScheme::Ours) * iterations
}

pub fn max_iterations(algorithm: Algorithm, budget: usize, scheme: MatMulScheme) -> usize {
    budget / per_iteration_cost(algorithm, scheme)
}
