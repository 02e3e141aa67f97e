use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::RnsBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecurityPreset {
    Secure128,
    InsecureTest,
}

/// Largest total modulus size (including the special prime) that keeps
/// 128-bit classical security for a ternary secret, per ring degree.
pub fn max_secure_modulus_bits(n: usize) -> Option<u32> {
    match n {
        1024 => Some(27),
        2048 => Some(54),
        4096 => Some(109),
        8192 => Some(218),
        16384 => Some(438),
        32768 => Some(881),
        _ => None,
    }
}

/// User-facing parameter set. The RNS basis is derived deterministically
/// from `(n, scale_bits, depth)` when a context is built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CkksParams {
    pub n: usize,
    pub depth: usize,
    pub scale_bits: u32,
    pub security_preset: SecurityPreset,
    /// Must be set for `InsecureTest` parameters to be accepted.
    #[serde(default)]
    pub allow_insecure: bool,
}

impl CkksParams {
    /// N = 32768, 18 levels of 40-bit scale: enough modulus for a depth-18 circuit.
    pub fn secure128() -> Self {
        Self { n: 32768, depth: 18, scale_bits: 40, security_preset: SecurityPreset::Secure128, allow_insecure: false }
    }

    /// Small-ring parameters for tests and experiments. Not secure.
    pub fn insecure_test(n: usize, depth: usize) -> Self {
        Self { n, depth, scale_bits: 40, security_preset: SecurityPreset::InsecureTest, allow_insecure: true }
    }

    pub fn with_scale_bits(mut self, bits: u32) -> Self {
        self.scale_bits = bits;
        self
    }

    pub fn slots(&self) -> usize {
        self.n / 2
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let params: Self = serde_json::from_str(text)?;
        params.validate_shape()?;
        Ok(params)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn validate_shape(&self) -> Result<()> {
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::contract(format!("ring degree {} must be a power of two >= 8", self.n)));
        }
        if self.depth == 0 {
            return Err(Error::contract("depth must be at least 1"));
        }
        if !(20..=60).contains(&self.scale_bits) {
            return Err(Error::contract(format!("scale_bits {} outside [20, 60]", self.scale_bits)));
        }
        if self.security_preset == SecurityPreset::InsecureTest && !self.allow_insecure {
            return Err(Error::contract("insecure_test parameters require allow_insecure = true"));
        }
        Ok(())
    }

    /// Checks the parameters and derives the modulus chain.
    pub fn build_basis(&self) -> Result<RnsBasis> {
        self.validate_shape()?;
        let basis = RnsBasis::generate(self.n, self.scale_bits, self.depth)?;
        if self.security_preset == SecurityPreset::Secure128 {
            let limit = max_secure_modulus_bits(self.n)
                .ok_or_else(|| Error::contract(format!("no 128-bit security bound for n = {}", self.n)))?;
            if basis.total_bits() > limit as f64 {
                return Err(Error::contract(format!(
                    "modulus of {:.0} bits exceeds the 128-bit bound of {limit} bits for n = {}",
                    basis.total_bits(),
                    self.n
                )));
            }
        }
        Ok(basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn secure_preset_fits_bound() {
        let basis = CkksParams::secure128().build_basis().unwrap();
        assert_eq!(basis.max_level(), 18);
        assert!(basis.special().is_some());
        assert!(basis.total_bits() <= 881.0);
    }

    #[test]
    fn secure_preset_rejects_small_ring() {
        let mut p = CkksParams::secure128();
        p.n = 8192;
        assert!(matches!(p.build_basis(), Err(Error::Contract(_))));
    }

    #[test]
    fn insecure_requires_opt_in() {
        let json = r#"{"n": 4096, "depth": 2, "scale_bits": 40, "security_preset": "insecure_test"}"#;
        assert!(CkksParams::from_json(json).is_err());
        let json = r#"{"n": 4096, "depth": 2, "scale_bits": 40, "security_preset": "insecure_test", "allow_insecure": true}"#;
        let p = CkksParams::from_json(json).unwrap();
        assert_eq!(p.slots(), 2048);
        assert_eq!(CkksParams::from_json(&p.to_json().unwrap()).unwrap(), p);
    }

    #[test]
    fn scale_primes_near_delta() {
        let basis = CkksParams::insecure_test(4096, 4).build_basis().unwrap();
        let delta = 2f64.powi(40);
        for p in &basis.primes()[1..] {
            let r = p.value() as f64 / delta;
            assert!((0.5..2.0).contains(&r));
        }
    }
}
