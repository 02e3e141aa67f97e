use crate::ring::RnsPoly;

/// An encoded message `⌊Δ·σ⁻¹(z)⌉`, kept in the evaluation domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Plaintext {
    pub(crate) poly: RnsPoly,
    pub(crate) scale: f64,
}

impl Plaintext {
    pub fn level(&self) -> usize {
        self.poly.level()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn poly(&self) -> &RnsPoly {
        &self.poly
    }
}

/// RLWE ciphertext `(c0, c1[, c2])` decrypting to `c0 + c1·s (+ c2·s²)`.
///
/// Parts are stored in the evaluation domain. A third part only exists
/// between a ciphertext product and the following relinearization.
#[derive(Clone, Debug, PartialEq)]
pub struct Ciphertext {
    pub(crate) parts: Vec<RnsPoly>,
    pub(crate) scale: f64,
}

impl Ciphertext {
    pub fn level(&self) -> usize {
        self.parts[0].level()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn size(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[RnsPoly] {
        &self.parts
    }
}
