//! Leveled CKKS evaluator: ⊞, ⊟, ⊙, •, relinearization, rescaling,
//! rotation and level alignment.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::context::CkksContext;
use super::keys::{galois_element, GaloisKeys, RelinKey};
use super::types::{Ciphertext, Plaintext};
use crate::error::{Error, Result};

/// Relative tolerance on scale equality for additions.
pub const SCALE_TOLERANCE: f64 = 1.0 / 1024.0;

/// Snapshot of operation counts performed by an [`Evaluator`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub add: u64,
    pub mul_plain: u64,
    pub mul_cipher: u64,
    pub relinearize: u64,
    pub rescale: u64,
    pub rotate: u64,
    pub key_switch: u64,
}

impl std::ops::Sub for OpCounts {
    type Output = OpCounts;

    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            add: self.add - rhs.add,
            mul_plain: self.mul_plain - rhs.mul_plain,
            mul_cipher: self.mul_cipher - rhs.mul_cipher,
            relinearize: self.relinearize - rhs.relinearize,
            rescale: self.rescale - rhs.rescale,
            rotate: self.rotate - rhs.rotate,
            key_switch: self.key_switch - rhs.key_switch,
        }
    }
}

#[derive(Debug, Default)]
struct Counters {
    add: AtomicU64,
    mul_plain: AtomicU64,
    mul_cipher: AtomicU64,
    relinearize: AtomicU64,
    rescale: AtomicU64,
    rotate: AtomicU64,
    key_switch: AtomicU64,
}

fn bump(c: &AtomicU64) {
    c.fetch_add(1, Ordering::Relaxed);
}

/// Stateless apart from operation counters; safe to share across threads.
#[derive(Debug)]
pub struct Evaluator {
    ctx: Arc<CkksContext>,
    counters: Counters,
}

impl Evaluator {
    pub fn new(ctx: Arc<CkksContext>) -> Self {
        Self { ctx, counters: Counters::default() }
    }

    pub fn context(&self) -> &Arc<CkksContext> {
        &self.ctx
    }

    pub fn counts(&self) -> OpCounts {
        let c = &self.counters;
        OpCounts {
            add: c.add.load(Ordering::Relaxed),
            mul_plain: c.mul_plain.load(Ordering::Relaxed),
            mul_cipher: c.mul_cipher.load(Ordering::Relaxed),
            relinearize: c.relinearize.load(Ordering::Relaxed),
            rescale: c.rescale.load(Ordering::Relaxed),
            rotate: c.rotate.load(Ordering::Relaxed),
            key_switch: c.key_switch.load(Ordering::Relaxed),
        }
    }

    fn check_scales(a: f64, b: f64) -> Result<()> {
        if (a - b).abs() > SCALE_TOLERANCE * a.abs().max(b.abs()) {
            return Err(Error::Scale { left: a, right: b });
        }
        Ok(())
    }

    fn check_levels(a: usize, b: usize) -> Result<()> {
        if a != b {
            return Err(Error::Alignment { left: a, right: b });
        }
        Ok(())
    }

    /// ⊞
    pub fn add(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        self.combine(a, b, false)
    }

    /// ⊟
    pub fn sub(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        self.combine(a, b, true)
    }

    fn combine(&self, a: &Ciphertext, b: &Ciphertext, subtract: bool) -> Result<Ciphertext> {
        Self::check_levels(a.level(), b.level())?;
        Self::check_scales(a.scale, b.scale)?;
        bump(&self.counters.add);
        let basis = self.ctx.basis();
        let (long, short, flip) = if a.size() >= b.size() { (a, b, false) } else { (b, a, true) };
        let mut parts = long.parts.clone();
        if flip && subtract {
            for p in parts.iter_mut() {
                *p = basis.neg(p)?;
            }
        }
        for (p, q) in parts.iter_mut().zip(&short.parts) {
            if subtract && !flip {
                basis.sub_assign(p, q)?;
            } else {
                basis.add_assign(p, q)?;
            }
        }
        Ok(Ciphertext { parts, scale: a.scale })
    }

    pub fn negate(&self, a: &Ciphertext) -> Result<Ciphertext> {
        let basis = self.ctx.basis();
        let parts = a.parts.iter().map(|p| basis.neg(p)).collect::<Result<_>>()?;
        Ok(Ciphertext { parts, scale: a.scale })
    }

    /// ⊞ with a plaintext operand.
    pub fn add_plain(&self, a: &Ciphertext, pt: &Plaintext) -> Result<Ciphertext> {
        Self::check_levels(a.level(), pt.level())?;
        Self::check_scales(a.scale, pt.scale)?;
        bump(&self.counters.add);
        let mut out = a.clone();
        self.ctx.basis().add_assign(&mut out.parts[0], &pt.poly)?;
        Ok(out)
    }

    /// ⊙: slot-wise product with a plaintext. Scales multiply.
    pub fn mul_plain(&self, a: &Ciphertext, pt: &Plaintext) -> Result<Ciphertext> {
        Self::check_levels(a.level(), pt.level())?;
        bump(&self.counters.mul_plain);
        let basis = self.ctx.basis();
        let parts = a.parts.iter().map(|p| basis.mul_pointwise(p, &pt.poly)).collect::<Result<_>>()?;
        Ok(Ciphertext { parts, scale: a.scale * pt.scale })
    }

    /// ⊙ by the all-`c` vector, encoded at the scale of the prime the next
    /// rescale removes, so that rescaling returns the input scale exactly.
    pub fn mul_const(&self, a: &Ciphertext, c: f64) -> Result<Ciphertext> {
        let level = a.level();
        let pt = self.ctx.encode_constant(c, self.ctx.prime_at(level), level)?;
        self.mul_plain(a, &pt)
    }

    /// `acc += a ⊙ pt`, without touching the scale of `acc`.
    pub(crate) fn mul_plain_acc(&self, acc: &mut Ciphertext, a: &Ciphertext, pt: &Plaintext) -> Result<()> {
        Self::check_levels(a.level(), pt.level())?;
        Self::check_levels(acc.level(), a.level())?;
        bump(&self.counters.mul_plain);
        let basis = self.ctx.basis();
        for (dst, src) in acc.parts.iter_mut().zip(&a.parts) {
            basis.mul_acc(dst, src, &pt.poly)?;
        }
        Ok(())
    }

    /// •: tensor product of two 2-part ciphertexts, giving 3 parts.
    pub fn mul(&self, a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
        Self::check_levels(a.level(), b.level())?;
        if a.size() != 2 || b.size() != 2 {
            return Err(Error::contract("ciphertext product needs 2-part operands; relinearize first"));
        }
        bump(&self.counters.mul_cipher);
        let basis = self.ctx.basis();
        let d0 = basis.mul_pointwise(&a.parts[0], &b.parts[0])?;
        let mut d1 = basis.mul_pointwise(&a.parts[0], &b.parts[1])?;
        basis.mul_acc(&mut d1, &a.parts[1], &b.parts[0])?;
        let d2 = basis.mul_pointwise(&a.parts[1], &b.parts[1])?;
        Ok(Ciphertext { parts: vec![d0, d1, d2], scale: a.scale * b.scale })
    }

    /// Folds the `s²` component back into two parts. A 2-part input is
    /// returned unchanged.
    pub fn relinearize(&self, a: &Ciphertext, rk: &RelinKey) -> Result<Ciphertext> {
        if a.size() == 2 {
            log::warn!("relinearize called on a 2-part ciphertext; nothing to do");
            return Ok(a.clone());
        }
        bump(&self.counters.relinearize);
        bump(&self.counters.key_switch);
        let basis = self.ctx.basis();
        let mut c2 = a.parts[2].clone();
        basis.to_coefficient(&mut c2)?;
        let (d0, d1) = rk.0.switch(basis, &c2)?;
        let c0 = basis.add(&a.parts[0], &d0)?;
        let c1 = basis.add(&a.parts[1], &d1)?;
        Ok(Ciphertext { parts: vec![c0, c1], scale: a.scale })
    }

    /// Divides by the top prime of the current level, dropping one level.
    pub fn rescale(&self, a: &Ciphertext) -> Result<Ciphertext> {
        let level = a.level();
        if level == 0 {
            return Err(Error::DepthExhausted("rescale at level 0".into()));
        }
        bump(&self.counters.rescale);
        let basis = self.ctx.basis();
        let parts = a
            .parts
            .iter()
            .map(|p| {
                let mut c = p.clone();
                basis.to_coefficient(&mut c)?;
                let mut r = basis.drop_last_prime_and_round(&c)?;
                basis.to_evaluation(&mut r)?;
                Ok(r)
            })
            .collect::<Result<_>>()?;
        Ok(Ciphertext { parts, scale: a.scale / self.ctx.prime_at(level) })
    }

    /// Drops primes down to `level` without changing the encrypted value.
    pub fn mod_switch_to(&self, a: &Ciphertext, level: usize) -> Result<Ciphertext> {
        if level > a.level() {
            return Err(Error::contract(format!(
                "cannot raise a ciphertext from level {} to {level}",
                a.level()
            )));
        }
        let mut out = a.clone();
        for p in out.parts.iter_mut() {
            p.truncate(level);
        }
        Ok(out)
    }

    pub fn mod_switch_plain_to(&self, pt: &Plaintext, level: usize) -> Result<Plaintext> {
        if level > pt.level() {
            return Err(Error::contract("cannot raise a plaintext level"));
        }
        let mut out = pt.clone();
        out.poly.truncate(level);
        Ok(out)
    }

    /// Cyclic left rotation of the slot vector by `steps`, composed from
    /// power-of-two rotation keys.
    pub fn rotate(&self, a: &Ciphertext, steps: i64, gk: &GaloisKeys) -> Result<Ciphertext> {
        let slots = self.ctx.slots() as i64;
        if steps.abs() >= slots {
            return Err(Error::contract(format!("rotation by {steps} not below {slots} slots")));
        }
        if a.size() != 2 {
            return Err(Error::contract("rotation needs a 2-part ciphertext"));
        }
        let mut out = a.clone();
        for step in signed_binary_steps(normalize_step(steps, slots)) {
            out = self.apply_galois(&out, step, gk)?;
        }
        Ok(out)
    }

    /// Applies the automorphism for a single keyed step.
    fn apply_galois(&self, a: &Ciphertext, step: i64, gk: &GaloisKeys) -> Result<Ciphertext> {
        let key = gk.get(step)?;
        bump(&self.counters.rotate);
        bump(&self.counters.key_switch);
        let basis = self.ctx.basis();
        let g = galois_element(step, self.ctx.degree());
        let mut c0 = a.parts[0].clone();
        let mut c1 = a.parts[1].clone();
        basis.to_coefficient(&mut c0)?;
        basis.to_coefficient(&mut c1)?;
        let mut c0 = basis.automorphism(&c0, g)?;
        let c1 = basis.automorphism(&c1, g)?;
        basis.to_evaluation(&mut c0)?;
        let (d0, d1) = key.switch(basis, &c1)?;
        basis.add_assign(&mut c0, &d0)?;
        Ok(Ciphertext { parts: vec![c0, d1], scale: a.scale })
    }
}

/// Number of key switches [`Evaluator::rotate`] spends on a rotation by
/// `steps` over `slots` slots.
pub fn rotation_key_switches(steps: i64, slots: i64) -> usize {
    signed_binary_steps(normalize_step(steps, slots)).len()
}

/// Keyed power-of-two steps [`Evaluator::rotate`] composes for `steps`.
pub fn rotation_steps(steps: i64, slots: i64) -> Vec<i64> {
    signed_binary_steps(normalize_step(steps, slots))
}

/// Representative of `steps` modulo `slots` in `(-slots/2, slots/2]`.
fn normalize_step(steps: i64, slots: i64) -> i64 {
    let k = steps.rem_euclid(slots);
    if k > slots / 2 {
        k - slots
    } else {
        k
    }
}

/// Non-adjacent form of `k` as a list of signed powers of two.
pub(crate) fn signed_binary_steps(mut k: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut bit = 1i64;
    while k != 0 {
        if k & 1 == 1 {
            let digit = 2 - k.rem_euclid(4);
            out.push(digit * bit);
            k -= digit;
        }
        k >>= 1;
        bit <<= 1;
    }
    out
}
