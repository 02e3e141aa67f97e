//! Secret, public and key-switching keys.
//!
//! Key switching uses the RNS digits of the input (one digit per active
//! prime) together with a single special prime `P`: digit `i` of a switching
//! key encrypts `P·t` modulo `q_i` and `0` modulo every other prime, so the
//! digit-wise inner product reconstructs `P·c·t` and a final division by `P`
//! brings the key-switching noise down to roughly `q_i/P` of its raw size.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use super::context::CkksContext;
use crate::error::{Error, Result};
use crate::ring::{ntt, sample_gaussian, Domain, RnsBasis, RnsPoly, SampleKind};

/// Ternary secret `s`, stored by its signed coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    pub(crate) coeffs: Vec<i64>,
}

impl SecretKey {
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }
}

/// `(b, a) = (-a·s + e, a)` at the top level, evaluation domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub(crate) b: RnsPoly,
    pub(crate) a: RnsPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct KeySwitchDigit {
    pub(crate) b: RnsPoly,
    pub(crate) a: RnsPoly,
    pub(crate) b_special: Vec<u64>,
    pub(crate) a_special: Vec<u64>,
}

/// Switches a ciphertext component from some key `t` back to `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeySwitchKey {
    pub(crate) digits: Vec<KeySwitchDigit>,
}

/// Key switching key for `s²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelinKey(pub(crate) KeySwitchKey);

/// Rotation keys indexed by signed slot step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GaloisKeys {
    pub(crate) keys: BTreeMap<i64, Arc<KeySwitchKey>>,
}

impl GaloisKeys {
    pub fn steps(&self) -> impl Iterator<Item = i64> + '_ {
        self.keys.keys().copied()
    }

    pub fn contains(&self, step: i64) -> bool {
        self.keys.contains_key(&step)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub(crate) fn get(&self, step: i64) -> Result<&KeySwitchKey> {
        self.keys.get(&step).map(|k| k.as_ref()).ok_or(Error::MissingGaloisKey(step))
    }
}

/// `±1, ±2, ±4, …, ±slots/2`.
pub fn power_of_two_steps(slots: usize) -> Vec<i64> {
    let mut steps = Vec::new();
    let mut s = 1usize;
    while s <= slots / 2 {
        steps.push(s as i64);
        steps.push(-(s as i64));
        s <<= 1;
    }
    steps
}

/// Galois element `5^k mod 2N` realizing a left rotation by `step` slots.
pub fn galois_element(step: i64, n: usize) -> usize {
    let slots = (n / 2) as i64;
    let k = step.rem_euclid(slots) as u64;
    let m = 2 * n as u64;
    let mut g = 1u64;
    let mut base = 5u64;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            g = g * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    g as usize
}

/// The full key material produced by one key generation run.
#[derive(Clone, Debug)]
pub struct KeySet {
    pub secret: SecretKey,
    pub public: PublicKey,
    pub relin: RelinKey,
    pub galois: GaloisKeys,
}

pub struct KeyGenerator {
    ctx: Arc<CkksContext>,
    secret: SecretKey,
    s_eval: RnsPoly,
    s_special: Vec<u64>,
}

impl KeyGenerator {
    pub fn new<R: Rng + ?Sized>(ctx: Arc<CkksContext>, rng: &mut R) -> Self {
        let coeffs = crate::ring::sample_ternary(ctx.degree(), rng);
        Self::from_secret(ctx, SecretKey { coeffs }).expect("fresh secret matches ring degree")
    }

    pub fn from_secret(ctx: Arc<CkksContext>, secret: SecretKey) -> Result<Self> {
        if secret.coeffs.len() != ctx.degree() {
            return Err(Error::contract("secret key degree does not match context"));
        }
        let s_eval = ctx.secret_at(&secret, ctx.max_level())?;
        let s_special = special_eval(ctx.basis(), &secret.coeffs)?;
        Ok(Self { ctx, secret, s_eval, s_special })
    }

    pub fn secret_key(&self) -> &SecretKey {
        &self.secret
    }

    pub fn public_key<R: Rng + ?Sized>(&self, rng: &mut R) -> PublicKey {
        let basis = self.ctx.basis();
        let level = self.ctx.max_level();
        let a = uniform_eval(basis, level, rng);
        let mut e = basis.sample(SampleKind::Gaussian, level, rng);
        basis.to_evaluation(&mut e).expect("coefficient domain");
        let mut b = basis.mul_pointwise(&a, &self.s_eval).expect("same level");
        b = basis.neg(&b).expect("valid level");
        basis.add_assign(&mut b, &e).expect("same level");
        PublicKey { b, a }
    }

    pub fn relin_key<R: Rng + ?Sized>(&self, rng: &mut R) -> RelinKey {
        let basis = self.ctx.basis();
        let s2 = basis.mul_pointwise(&self.s_eval, &self.s_eval).expect("same level");
        RelinKey(self.switch_key(&s2, rng))
    }

    /// Rotation keys for every power-of-two step `±1 … ±slots/2`.
    pub fn galois_keys<R: Rng + ?Sized>(&self, rng: &mut R) -> GaloisKeys {
        self.galois_keys_for(&power_of_two_steps(self.ctx.slots()), rng)
    }

    /// Rotation keys for an explicit list of steps.
    pub fn galois_keys_for<R: Rng + ?Sized>(&self, steps: &[i64], rng: &mut R) -> GaloisKeys {
        let basis = self.ctx.basis();
        let n = self.ctx.degree();
        let mut keys: BTreeMap<i64, Arc<KeySwitchKey>> = BTreeMap::new();
        let mut by_element: BTreeMap<usize, Arc<KeySwitchKey>> = BTreeMap::new();
        for &step in steps {
            let g = galois_element(step, n);
            let key = by_element
                .entry(g)
                .or_insert_with(|| {
                    let rotated = rotated_signed(&self.secret.coeffs, g);
                    let mut t = basis.from_signed(&rotated, self.ctx.max_level()).expect("degree");
                    basis.to_evaluation(&mut t).expect("coefficient domain");
                    Arc::new(self.switch_key(&t, rng))
                })
                .clone();
            keys.insert(step, key);
        }
        GaloisKeys { keys }
    }

    /// Power-of-two rotation keys up to `max_step` in absolute value.
    pub fn galois_keys_up_to<R: Rng + ?Sized>(&self, max_step: usize, rng: &mut R) -> GaloisKeys {
        let steps: Vec<i64> = power_of_two_steps(self.ctx.slots())
            .into_iter()
            .filter(|s| s.unsigned_abs() as usize <= max_step.next_power_of_two())
            .collect();
        self.galois_keys_for(&steps, rng)
    }

    pub fn key_set<R: Rng + ?Sized>(&self, rng: &mut R) -> KeySet {
        KeySet {
            secret: self.secret.clone(),
            public: self.public_key(rng),
            relin: self.relin_key(rng),
            galois: self.galois_keys(rng),
        }
    }

    /// Digit `i` holds `-a·s + e + P·t` modulo `q_i`, and `-a·s + e` modulo
    /// every other prime including `P` itself.
    fn switch_key<R: Rng + ?Sized>(&self, target: &RnsPoly, rng: &mut R) -> KeySwitchKey {
        let basis = self.ctx.basis();
        let level = self.ctx.max_level();
        let sp = basis.special().expect("context basis has a special prime");
        let n = basis.degree();
        let digits = (0..=level)
            .map(|i| {
                let a = uniform_eval(basis, level, rng);
                let a_special: Vec<u64> = (0..n).map(|_| rng.gen_range(0..sp.value())).collect();
                let e_coeffs = sample_gaussian(n, rng);
                let mut e = basis.from_signed(&e_coeffs, level).expect("degree");
                basis.to_evaluation(&mut e).expect("coefficient domain");
                let mut e_special: Vec<u64> = e_coeffs.iter().map(|&c| sp.reduce_i64(c)).collect();
                ntt::forward(sp, &mut e_special);

                let mut b = basis.neg(&basis.mul_pointwise(&a, &self.s_eval).expect("level")).expect("level");
                basis.add_assign(&mut b, &e).expect("level");
                let qi = basis.prime(i);
                let p_mod = sp.value() % qi.value();
                for (x, &t) in b.residues[i].iter_mut().zip(&target.residues[i]) {
                    *x = qi.add(*x, qi.mul(p_mod, t));
                }
                let b_special = a_special
                    .iter()
                    .zip(&self.s_special)
                    .zip(&e_special)
                    .map(|((&a, &s), &e)| sp.add(sp.neg(sp.mul(a, s)), e))
                    .collect();
                KeySwitchDigit { b, a, b_special, a_special }
            })
            .collect();
        KeySwitchKey { digits }
    }
}

/// Key generation in one call: secret, public, relinearization and the
/// full power-of-two rotation key set.
pub fn keygen<R: Rng + ?Sized>(ctx: Arc<CkksContext>, rng: &mut R) -> KeySet {
    KeyGenerator::new(ctx, rng).key_set(rng)
}

fn uniform_eval<R: Rng + ?Sized>(basis: &RnsBasis, level: usize, rng: &mut R) -> RnsPoly {
    // uniform residues are uniform in either domain
    let mut a = basis.sample(SampleKind::Uniform, level, rng);
    a.domain = Domain::Evaluation;
    a
}

fn special_eval(basis: &RnsBasis, coeffs: &[i64]) -> Result<Vec<u64>> {
    let sp = basis.special().ok_or_else(|| Error::contract("basis has no special prime"))?;
    let mut v: Vec<u64> = coeffs.iter().map(|&c| sp.reduce_i64(c)).collect();
    ntt::forward(sp, &mut v);
    Ok(v)
}

fn rotated_signed(coeffs: &[i64], g: usize) -> Vec<i64> {
    let n = coeffs.len();
    let m = 2 * n;
    let mut out = vec![0i64; n];
    for (i, &c) in coeffs.iter().enumerate() {
        let idx = i * g % m;
        if idx < n {
            out[idx] = c;
        } else {
            out[idx - n] = -c;
        }
    }
    out
}

impl KeySwitchKey {
    /// Returns `(d0, d1)` in the evaluation domain with `d0 + d1·s ≈ c·t`.
    /// `c` must be in the coefficient domain.
    pub(crate) fn switch(&self, basis: &RnsBasis, c: &RnsPoly) -> Result<(RnsPoly, RnsPoly)> {
        if c.domain() != Domain::Coefficient {
            return Err(Error::contract("key switching input must be in coefficient domain"));
        }
        let level = c.level();
        if self.digits.len() <= level {
            return Err(Error::contract("key switching key does not cover this level"));
        }
        let sp = basis.special().ok_or_else(|| Error::contract("basis has no special prime"))?;
        let n = basis.degree();
        let primes = &basis.primes()[..=level];

        let mut acc0 = vec![vec![0u64; n]; level + 1];
        let mut acc1 = vec![vec![0u64; n]; level + 1];
        let mut acc0_sp = vec![0u64; n];
        let mut acc1_sp = vec![0u64; n];
        let mut tmp = vec![0u64; n];

        for (i, digit) in self.digits[..=level].iter().enumerate() {
            let src = &c.residues[i];
            let qi = &primes[i];
            for j in 0..=level + 1 {
                let m = if j <= level { &primes[j] } else { sp };
                if j == i {
                    tmp.copy_from_slice(src);
                } else {
                    for (t, &x) in tmp.iter_mut().zip(src) {
                        *t = m.reduce_i64(qi.center(x));
                    }
                }
                ntt::forward(m, &mut tmp);
                let (kb, ka, a0, a1) = if j <= level {
                    (&digit.b.residues[j], &digit.a.residues[j], &mut acc0[j], &mut acc1[j])
                } else {
                    (&digit.b_special, &digit.a_special, &mut acc0_sp, &mut acc1_sp)
                };
                for k in 0..n {
                    a0[k] = m.add(a0[k], m.mul(tmp[k], kb[k]));
                    a1[k] = m.add(a1[k], m.mul(tmp[k], ka[k]));
                }
            }
        }

        let mut mod_down = |acc: &mut Vec<Vec<u64>>, acc_sp: &mut Vec<u64>| -> Result<()> {
            ntt::inverse(sp, acc_sp);
            for (j, q) in primes.iter().enumerate() {
                let p_inv = q.inv(sp.value() % q.value())?;
                let p_inv_s = q.shoup(p_inv);
                for (t, &x) in tmp.iter_mut().zip(acc_sp.iter()) {
                    *t = q.reduce_i64(sp.center(x));
                }
                ntt::forward(q, &mut tmp);
                for (a, &t) in acc[j].iter_mut().zip(&tmp) {
                    *a = q.mul_shoup(q.sub(*a, t), p_inv, p_inv_s);
                }
            }
            Ok(())
        };
        mod_down(&mut acc0, &mut acc0_sp)?;
        mod_down(&mut acc1, &mut acc1_sp)?;

        Ok((
            RnsPoly::from_residues(acc0, Domain::Evaluation)?,
            RnsPoly::from_residues(acc1, Domain::Evaluation)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_of_two_step_set() {
        let steps = power_of_two_steps(16);
        assert_eq!(steps, vec![1, -1, 2, -2, 4, -4, 8, -8]);
    }

    #[test]
    fn galois_elements() {
        assert_eq!(galois_element(0, 16), 1);
        assert_eq!(galois_element(1, 16), 5);
        assert_eq!(galois_element(2, 16), 25);
        // 5^8 = 1 mod 32, so rotating by -1 is 5^7
        assert_eq!(galois_element(-1, 16), galois_element(7, 16));
        assert_eq!(galois_element(-1, 16) * 5 % 32, 1);
    }
}
