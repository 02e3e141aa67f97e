use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;

use super::encoder::EmbeddingTables;
use super::keys::{PublicKey, SecretKey};
use super::params::CkksParams;
use super::types::{Ciphertext, Plaintext};
use crate::error::{Error, Result};
use crate::ring::{Domain, RnsBasis, RnsPoly, SampleKind};

/// Encoded coefficients must stay below this magnitude.
const MAX_ENCODED_BITS: i32 = 120;

/// Parameters, modulus chain and encoder tables shared by every CKKS object.
#[derive(Debug)]
pub struct CkksContext {
    params: CkksParams,
    basis: RnsBasis,
    tables: EmbeddingTables,
}

impl CkksContext {
    pub fn new(params: CkksParams) -> Result<Arc<Self>> {
        let basis = params.build_basis()?;
        let tables = EmbeddingTables::new(params.n);
        Ok(Arc::new(Self { params, basis, tables }))
    }

    pub fn params(&self) -> &CkksParams {
        &self.params
    }

    pub fn basis(&self) -> &RnsBasis {
        &self.basis
    }

    pub fn slots(&self) -> usize {
        self.tables.slots()
    }

    pub fn degree(&self) -> usize {
        self.params.n
    }

    /// Level of a fresh ciphertext.
    pub fn max_level(&self) -> usize {
        self.basis.max_level()
    }

    /// Δ = 2^scale_bits.
    pub fn default_scale(&self) -> f64 {
        2f64.powi(self.params.scale_bits as i32)
    }

    /// Value of the prime removed by a rescale at `level`.
    pub fn prime_at(&self, level: usize) -> f64 {
        self.basis.prime(level).value() as f64
    }

    fn check_encode_args(&self, len: usize, scale: f64, level: usize) -> Result<()> {
        if len > self.slots() {
            return Err(Error::contract(format!("{len} values exceed {} slots", self.slots())));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::contract(format!("scale must be positive, got {scale}")));
        }
        if level > self.max_level() {
            return Err(Error::contract(format!("level {level} above maximum {}", self.max_level())));
        }
        Ok(())
    }

    pub fn encode(&self, values: &[Complex64], scale: f64, level: usize) -> Result<Plaintext> {
        self.check_encode_args(values.len(), scale, level)?;
        let slots = self.slots();
        let mut vals = vec![Complex64::new(0.0, 0.0); slots];
        vals[..values.len()].copy_from_slice(values);
        self.tables.embed_inverse(&mut vals);
        let mut coeffs = vec![0i128; self.params.n];
        for (i, v) in vals.iter().enumerate() {
            coeffs[i] = round_scaled(v.re, scale)?;
            coeffs[i + slots] = round_scaled(v.im, scale)?;
        }
        self.plaintext_from_coeffs(&coeffs, scale, level)
    }

    pub fn encode_real(&self, values: &[f64], scale: f64, level: usize) -> Result<Plaintext> {
        let vals: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.encode(&vals, scale, level)
    }

    /// Encoding of the all-`c` vector: the constant polynomial `⌊scale·c⌉`.
    pub fn encode_constant(&self, c: f64, scale: f64, level: usize) -> Result<Plaintext> {
        self.check_encode_args(0, scale, level)?;
        let mut coeffs = vec![0i128; self.params.n];
        coeffs[0] = round_scaled(c, scale)?;
        self.plaintext_from_coeffs(&coeffs, scale, level)
    }

    fn plaintext_from_coeffs(&self, coeffs: &[i128], scale: f64, level: usize) -> Result<Plaintext> {
        let residues = self.basis.primes()[..=level]
            .iter()
            .map(|p| {
                coeffs
                    .iter()
                    .map(|&c| match i64::try_from(c) {
                        Ok(small) => p.reduce_i64(small),
                        Err(_) => p.reduce_i128(c),
                    })
                    .collect()
            })
            .collect();
        let mut poly = RnsPoly::from_residues(residues, Domain::Coefficient)?;
        self.basis.to_evaluation(&mut poly)?;
        Ok(Plaintext { poly, scale })
    }

    /// Signed coefficients of a plaintext, as floating point (unscaled).
    fn plaintext_coeffs(&self, pt: &Plaintext) -> Result<Vec<f64>> {
        let mut poly = pt.poly.clone();
        self.basis.to_coefficient(&mut poly)?;
        if poly.level() == 0 {
            let p = self.basis.prime(0);
            return Ok(poly.residues()[0].iter().map(|&x| p.center(x) as f64).collect());
        }
        Ok(self
            .basis
            .to_bigint(&poly)?
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect())
    }

    pub fn decode(&self, pt: &Plaintext) -> Result<Vec<Complex64>> {
        let coeffs = self.plaintext_coeffs(pt)?;
        let slots = self.slots();
        let mut vals: Vec<Complex64> = (0..slots)
            .map(|i| Complex64::new(coeffs[i] / pt.scale, coeffs[i + slots] / pt.scale))
            .collect();
        self.tables.embed(&mut vals);
        Ok(vals)
    }

    pub fn decode_real(&self, pt: &Plaintext) -> Result<Vec<f64>> {
        Ok(self.decode(pt)?.into_iter().map(|z| z.re).collect())
    }

    /// Secret key in the evaluation domain at `level`.
    pub(crate) fn secret_at(&self, sk: &SecretKey, level: usize) -> Result<RnsPoly> {
        let mut s = self.basis.from_signed(&sk.coeffs, level)?;
        self.basis.to_evaluation(&mut s)?;
        Ok(s)
    }

    /// Public-key encryption at the plaintext's level.
    pub fn encrypt<R: Rng + ?Sized>(&self, pt: &Plaintext, pk: &PublicKey, rng: &mut R) -> Result<Ciphertext> {
        let level = pt.level();
        if pk.b.level() < level {
            return Err(Error::contract("public key does not cover the plaintext level"));
        }
        let basis = &self.basis;
        let mut u = basis.sample(SampleKind::Ternary, level, rng);
        let mut e0 = basis.sample(SampleKind::Gaussian, level, rng);
        let mut e1 = basis.sample(SampleKind::Gaussian, level, rng);
        basis.to_evaluation(&mut u)?;
        basis.to_evaluation(&mut e0)?;
        basis.to_evaluation(&mut e1)?;
        let mut b = pk.b.clone();
        let mut a = pk.a.clone();
        b.truncate(level);
        a.truncate(level);
        let mut c0 = basis.mul_pointwise(&b, &u)?;
        basis.add_assign(&mut c0, &e0)?;
        basis.add_assign(&mut c0, &pt.poly)?;
        let mut c1 = basis.mul_pointwise(&a, &u)?;
        basis.add_assign(&mut c1, &e1)?;
        Ok(Ciphertext { parts: vec![c0, c1], scale: pt.scale })
    }

    pub fn decrypt(&self, ct: &Ciphertext, sk: &SecretKey) -> Result<Plaintext> {
        let level = ct.level();
        let s = self.secret_at(sk, level)?;
        let basis = &self.basis;
        let mut m = ct.parts[0].clone();
        let mut s_pow = s.clone();
        for part in &ct.parts[1..] {
            basis.mul_acc(&mut m, part, &s_pow)?;
            s_pow = basis.mul_pointwise(&s_pow, &s)?;
        }
        Ok(Plaintext { poly: m, scale: ct.scale })
    }

    /// The all-zero ciphertext `(0, 0)`. It carries no randomness and is
    /// only meant as a public starting value.
    pub fn zero_ciphertext(&self, level: usize, scale: f64) -> Ciphertext {
        let z = self.basis.zero(level, Domain::Evaluation);
        Ciphertext { parts: vec![z.clone(), z], scale }
    }

    /// Convenience: encode, encrypt at the top level with the default scale.
    pub fn encrypt_real<R: Rng + ?Sized>(&self, values: &[f64], pk: &PublicKey, rng: &mut R) -> Result<Ciphertext> {
        let pt = self.encode_real(values, self.default_scale(), self.max_level())?;
        self.encrypt(&pt, pk, rng)
    }

    /// Convenience: decrypt and decode the real parts of every slot.
    pub fn decrypt_real(&self, ct: &Ciphertext, sk: &SecretKey) -> Result<Vec<f64>> {
        self.decode_real(&self.decrypt(ct, sk)?)
    }
}

fn round_scaled(x: f64, scale: f64) -> Result<i128> {
    let v = (x * scale).round();
    if !v.is_finite() || v.abs() >= 2f64.powi(MAX_ENCODED_BITS) {
        return Err(Error::contract(format!("value {x} at scale {scale} overflows the encoder")));
    }
    Ok(v as i128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ckks::KeyGenerator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn ctx() -> Arc<CkksContext> {
        CkksContext::new(CkksParams::insecure_test(4096, 2)).unwrap()
    }

    #[test]
    fn zero_vector_encodes_to_zero_polynomial() {
        let ctx = ctx();
        let pt = ctx.encode_real(&[0.0; 16], ctx.default_scale(), 2).unwrap();
        assert!(pt.poly.is_zero());
        let back = ctx.decode_real(&pt).unwrap();
        assert!(back.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn constant_vector_is_constant_polynomial() {
        let ctx = ctx();
        let c = 0.731_25;
        let delta = ctx.default_scale();
        let pt = ctx.encode_real(&vec![c; ctx.slots()], delta, 1).unwrap();
        let mut poly = pt.poly.clone();
        ctx.basis().to_coefficient(&mut poly).unwrap();
        let coeffs = ctx.basis().to_bigint(&poly).unwrap();
        assert_eq!(coeffs[0], num_bigint::BigInt::from((delta * c).round() as i64));
        assert!(coeffs[1..].iter().all(|x| *x == num_bigint::BigInt::from(0)));
        assert_eq!(pt, ctx.encode_constant(c, delta, 1).unwrap());
    }

    #[test]
    fn round_trip_precision() {
        let ctx = ctx();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let v: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pt = ctx.encode_real(&v, 2f64.powi(40), 2).unwrap();
        let back = ctx.decode_real(&pt).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).abs() < 1e-9);
        }
        let bound = 2f64.powi(-20) * 2.0;
        assert!(back[8..].iter().all(|x| x.abs() < bound));
    }

    #[test]
    fn decode_is_linear_and_conjugate_symmetric() {
        let ctx = ctx();
        let delta = ctx.default_scale();
        let u: Vec<f64> = (0..32).map(|i| (i as f64).cos()).collect();
        let v: Vec<f64> = (0..32).map(|i| (i as f64 * 0.3).sin()).collect();
        let pu = ctx.encode_real(&u, delta, 1).unwrap();
        let pv = ctx.encode_real(&v, delta, 1).unwrap();
        let sum = Plaintext { poly: ctx.basis().add(&pu.poly, &pv.poly).unwrap(), scale: delta };
        let d = ctx.decode(&sum).unwrap();
        for i in 0..32 {
            assert!((d[i].re - (u[i] + v[i])).abs() < 1e-9);
            assert!(d[i].im.abs() < 1e-9);
        }
    }

    #[test]
    fn encode_errors() {
        let ctx = ctx();
        assert!(ctx.encode_real(&vec![1.0; ctx.slots() + 1], 1e6, 0).is_err());
        assert!(ctx.encode_real(&[1.0], 0.0, 0).is_err());
        assert!(ctx.encode_real(&[1.0], -3.0, 0).is_err());
    }

    #[test]
    fn encrypt_decrypt_round_trip() {
        let ctx = ctx();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let kg = KeyGenerator::new(ctx.clone(), &mut rng);
        let pk = kg.public_key(&mut rng);
        let v: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ct = ctx.encrypt_real(&v, &pk, &mut rng).unwrap();
        let back = ctx.decrypt_real(&ct, kg.secret_key()).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).abs() < 1e-6);
        }
        let zero = ctx.encrypt_real(&[], &pk, &mut rng).unwrap();
        let back = ctx.decrypt_real(&zero, kg.secret_key()).unwrap();
        assert!(back.iter().all(|x| x.abs() < 1e-6));
    }
}
