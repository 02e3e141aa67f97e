//! Diagonal-method linear transforms and the two-level encrypted matrix
//! product `a·A·B = Σ_k (V_k(a)·A) • (W_k·B)`.

use std::collections::BTreeMap;

use super::encoding::GridCiphertext;
use super::linear_map::{make_vk, make_wk, PlainLinearMap};
use crate::ckks::{Ciphertext, Evaluator, GaloisKeys, RelinKey};
use crate::error::{Error, Result};

/// Rotations of one ciphertext, each derived from the closest already
/// computed rotation so that regular offset patterns cost one key switch
/// per new offset.
struct RotationCache<'a> {
    ev: &'a Evaluator,
    gk: &'a GaloisKeys,
    slots: i64,
    cache: BTreeMap<i64, Ciphertext>,
}

impl<'a> RotationCache<'a> {
    fn new(ev: &'a Evaluator, gk: &'a GaloisKeys, base: Ciphertext) -> Self {
        let mut cache = BTreeMap::new();
        cache.insert(0, base);
        Self { ev, gk, slots: ev.context().slots() as i64, cache }
    }

    fn get(&mut self, step: i64) -> Result<&Ciphertext> {
        if !self.cache.contains_key(&step) {
            let from = nearest_source(self.cache.keys().copied(), step, self.slots);
            let rotated = self.ev.rotate(&self.cache[&from], step - from, self.gk)?;
            self.cache.insert(step, rotated);
        }
        Ok(&self.cache[&step])
    }
}

/// Cached rotation from which `step` is cheapest to reach.
fn nearest_source(cached: impl Iterator<Item = i64>, step: i64, slots: i64) -> i64 {
    cached
        .min_by_key(|&r| (switch_cost(step - r, slots), (step - r).abs()))
        .expect("cache holds the unrotated ciphertext")
}

/// Rotations needed by a transform, in the order they are computed.
fn rotation_order(map: &PlainLinearMap, slots: usize) -> Vec<(i64, Vec<f64>)> {
    let mut parts: Vec<(i64, Vec<f64>)> = masked_diagonals(map, slots).into_iter().collect();
    parts.sort_by_key(|(rot, _)| (rot.abs(), *rot));
    parts
}

/// Power-of-two rotation steps whose Galois keys [`mmult`] uses for
/// dimension `d` with `slots` slots.
pub fn mmult_rotation_steps(d: usize, slots: usize) -> Result<Vec<i64>> {
    let s = slots as i64;
    let mut steps = std::collections::BTreeSet::new();
    for side in 0..2 {
        let mut cached = std::collections::BTreeSet::from([0i64]);
        for k in 0..d {
            let map = if side == 0 { make_vk(d, k, 1.0)? } else { make_wk(d, k)? };
            for (rot, _) in rotation_order(&map, slots) {
                if cached.insert(rot) {
                    let from = nearest_source(cached.iter().copied().filter(|&r| r != rot), rot, s);
                    steps.extend(crate::ckks::rotation_steps(rot - from, s));
                }
            }
        }
    }
    Ok(steps.into_iter().collect())
}

fn switch_cost(step: i64, slots: i64) -> usize {
    crate::ckks::rotation_key_switches(step, slots)
}

/// Representative of `r` modulo `slots` in `(-slots/2, slots/2]`.
fn centered(r: i64, slots: i64) -> i64 {
    let k = r.rem_euclid(slots);
    if k > slots / 2 {
        k - slots
    } else {
        k
    }
}

/// Splits every stored diagonal into the part served by `rot(x, l)` and the
/// wrap-around part served by `rot(x, l - n)`, keyed by slot rotation.
/// All-zero parts are dropped.
pub(crate) fn masked_diagonals(map: &PlainLinearMap, slots: usize) -> BTreeMap<i64, Vec<f64>> {
    let n = map.dim();
    let s = slots as i64;
    let mut out: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for (&l, diag) in map.diagonals() {
        for t in 0..n {
            if diag[t] == 0.0 {
                continue;
            }
            let rot = if t + l < n { l as i64 } else { l as i64 - n as i64 };
            out.entry(centered(rot, s)).or_insert_with(|| vec![0.0; slots])[t] += diag[t];
        }
    }
    out.retain(|_, v| v.iter().any(|&x| x != 0.0));
    out
}

/// `Σ_r mask_r ⊙ rot(x, r)` with the masks encoded at `diag_scale`, before
/// rescaling.
fn accumulate(
    ev: &Evaluator,
    rotations: &mut RotationCache<'_>,
    map: &PlainLinearMap,
    level: usize,
    diag_scale: f64,
) -> Result<Ciphertext> {
    let ctx = ev.context().clone();
    let mut acc: Option<Ciphertext> = None;
    for (rot, mask) in rotation_order(map, ctx.slots()) {
        let pt = ctx.encode_real(&mask, diag_scale, level)?;
        let term = rotations.get(rot)?;
        match acc.as_mut() {
            None => acc = Some(ev.mul_plain(term, &pt)?),
            Some(a) => ev.mul_plain_acc(a, term, &pt)?,
        }
    }
    match acc {
        Some(a) => Ok(a),
        None => {
            let zero = ctx.encode_constant(0.0, diag_scale, level)?;
            ev.mul_plain(rotations.get(0)?, &zero)
        }
    }
}

fn check_map(ct: &Ciphertext, map: &PlainLinearMap, slots: usize) -> Result<()> {
    if map.dim() > slots {
        return Err(Error::Dimension(format!("map of dim {} exceeds {slots} slots", map.dim())));
    }
    if ct.level() == 0 {
        return Err(Error::DepthExhausted("linear transform needs one level".into()));
    }
    Ok(())
}

/// Encrypted `U·x`, consuming one level. Only stored diagonals are visited
/// and the output keeps the input scale.
pub fn lin_trans(ev: &Evaluator, ct: &Ciphertext, map: &PlainLinearMap, gk: &GaloisKeys) -> Result<Ciphertext> {
    let ctx = ev.context();
    check_map(ct, map, ctx.slots())?;
    let level = ct.level();
    let mut rotations = RotationCache::new(ev, gk, ct.clone());
    let acc = accumulate(ev, &mut rotations, map, level, ctx.prime_at(level))?;
    ev.rescale(&acc)
}

/// Encrypted `a·A·B` in the layout of `B`, consuming exactly two levels.
///
/// Operands are first brought to a common level. The `A` side masks are
/// encoded so that after the two rescales the output carries exactly the
/// scale of `B`. The products for all `k` are summed before a single
/// relinearization.
pub fn mmult<B: GridCiphertext>(
    ev: &Evaluator,
    a: &super::EncodedMatrix,
    b: &B,
    scalar: f64,
    rk: &RelinKey,
    gk: &GaloisKeys,
) -> Result<B> {
    let d = a.d;
    if b.dim() != d {
        return Err(Error::Dimension(format!("matrix product of d={d} and d={}", b.dim())));
    }
    let ctx = ev.context();
    if d * d > ctx.slots() {
        return Err(Error::Dimension(format!("{d}×{d} grid exceeds {} slots", ctx.slots())));
    }
    let level = a.ct.level().min(b.ciphertext().level());
    if level < 2 {
        return Err(Error::DepthExhausted(format!("matrix product needs two levels, {level} left")));
    }
    let a_ct = ev.mod_switch_to(&a.ct, level)?;
    let b_ct = ev.mod_switch_to(b.ciphertext(), level)?;
    let q_top = ctx.prime_at(level);
    let q_next = ctx.prime_at(level - 1);
    let a_scale = q_top * q_next / a_ct.scale();

    let mut rot_a = RotationCache::new(ev, gk, a_ct);
    let mut rot_b = RotationCache::new(ev, gk, b_ct);
    let mut sum: Option<Ciphertext> = None;
    for k in 0..d {
        let ak = ev.rescale(&accumulate(ev, &mut rot_a, &make_vk(d, k, scalar)?, level, a_scale)?)?;
        let bk = ev.rescale(&accumulate(ev, &mut rot_b, &make_wk(d, k)?, level, q_top)?)?;
        let prod = ev.mul(&ak, &bk)?;
        sum = Some(match sum {
            None => prod,
            Some(s) => ev.add(&s, &prod)?,
        });
    }
    let sum = sum.expect("d ≥ 1");
    let out = ev.rescale(&ev.relinearize(&sum, rk)?)?;
    Ok(b.with_ciphertext(out))
}
