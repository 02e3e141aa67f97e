//! Canonical-embedding encoder.
//!
//! Slot `j` holds the evaluation of the message polynomial at `ζ^(5^j)`,
//! where `ζ` is a primitive `2N`-th complex root of unity. The remaining
//! roots are the complex conjugates of these, so a polynomial with real
//! coefficients carries `N/2` complex slots.

use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Clone, Debug)]
pub(crate) struct EmbeddingTables {
    slots: usize,
    m: usize,
    rot_group: Vec<usize>,
    ksi_pows: Vec<Complex64>,
}

impl EmbeddingTables {
    pub(crate) fn new(n: usize) -> Self {
        let m = 2 * n;
        let slots = n / 2;
        let mut rot_group = Vec::with_capacity(slots);
        let mut g = 1usize;
        for _ in 0..slots {
            rot_group.push(g);
            g = g * 5 % m;
        }
        let ksi_pows = (0..=m)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))
            .collect();
        Self { slots, m, rot_group, ksi_pows }
    }

    pub(crate) fn slots(&self) -> usize {
        self.slots
    }

    /// Slot values to (unscaled) coefficient pairs: inverse of `embed`.
    pub(crate) fn embed_inverse(&self, vals: &mut [Complex64]) {
        let slots = vals.len();
        let mut len = slots;
        while len >= 1 {
            let lenh = len >> 1;
            let lenq = len << 2;
            let gap = self.m / lenq;
            for chunk in vals.chunks_mut(len) {
                for j in 0..lenh {
                    let idx = (lenq - (self.rot_group[j] % lenq)) * gap;
                    let u = chunk[j] + chunk[j + lenh];
                    let v = (chunk[j] - chunk[j + lenh]) * self.ksi_pows[idx];
                    chunk[j] = u;
                    chunk[j + lenh] = v;
                }
            }
            len >>= 1;
        }
        bit_reverse_permute(vals);
        let inv = 1.0 / slots as f64;
        for v in vals.iter_mut() {
            *v *= inv;
        }
    }

    /// Coefficient pairs to slot values.
    pub(crate) fn embed(&self, vals: &mut [Complex64]) {
        let slots = vals.len();
        bit_reverse_permute(vals);
        let mut len = 2;
        while len <= slots {
            let lenh = len >> 1;
            let lenq = len << 2;
            let gap = self.m / lenq;
            for chunk in vals.chunks_mut(len) {
                for j in 0..lenh {
                    let idx = (self.rot_group[j] % lenq) * gap;
                    let u = chunk[j];
                    let v = chunk[j + lenh] * self.ksi_pows[idx];
                    chunk[j] = u + v;
                    chunk[j + lenh] = u - v;
                }
            }
            len <<= 1;
        }
    }
}

fn bit_reverse_permute<T>(vals: &mut [T]) {
    let n = vals.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            vals.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation of the real-coefficient polynomial at ζ^(5^j).
    fn evaluate(coeffs: &[f64], n: usize, j: usize) -> Complex64 {
        let m = 2 * n;
        let mut e = 1usize;
        for _ in 0..j {
            e = e * 5 % m;
        }
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * Complex64::from_polar(1.0, 2.0 * PI * (e * k % m) as f64 / m as f64))
            .sum()
    }

    #[test]
    fn embed_matches_direct_evaluation() {
        let n = 16;
        let tables = EmbeddingTables::new(n);
        let slots = n / 2;
        let coeffs: Vec<f64> = (0..n).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut vals: Vec<Complex64> = (0..slots).map(|i| Complex64::new(coeffs[i], coeffs[i + slots])).collect();
        tables.embed(&mut vals);
        for (j, v) in vals.iter().enumerate() {
            let expect = evaluate(&coeffs, n, j);
            assert!((v - expect).norm() < 1e-12, "slot {j}: {v} vs {expect}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let tables = EmbeddingTables::new(64);
        let orig: Vec<Complex64> = (0..32).map(|i| Complex64::new(i as f64 * 0.1, -(i as f64) * 0.05)).collect();
        let mut v = orig.clone();
        tables.embed_inverse(&mut v);
        tables.embed(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
