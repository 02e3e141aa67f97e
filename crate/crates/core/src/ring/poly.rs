use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::modulus::{ntt_primes_below, PrimeModulus};
use super::ntt;
use crate::error::{Error, Result};

/// Standard deviation of the discrete Gaussian error distribution.
pub const GAUSSIAN_STD_DEV: f64 = 3.2;

/// Bit size of the bottom modulus that holds the final decrypted message.
pub const BASE_PRIME_BITS: u32 = 60;

/// Bit size of the auxiliary key-switching prime.
pub const SPECIAL_PRIME_BITS: u32 = 61;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Coefficient,
    Evaluation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    Ternary,
    Gaussian,
    Uniform,
}

/// Element of `Z_q[X]/(X^N + 1)` stored as one residue vector per active prime.
///
/// The level is the number of active primes minus one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnsPoly {
    pub(crate) residues: Vec<Vec<u64>>,
    pub(crate) domain: Domain,
}

impl RnsPoly {
    pub fn level(&self) -> usize {
        self.residues.len() - 1
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn degree(&self) -> usize {
        self.residues[0].len()
    }

    pub fn residues(&self) -> &[Vec<u64>] {
        &self.residues
    }

    /// Builds a polynomial from raw residues. Each residue vector must already
    /// be reduced modulo its prime.
    pub fn from_residues(residues: Vec<Vec<u64>>, domain: Domain) -> Result<Self> {
        if residues.is_empty() {
            return Err(Error::contract("polynomial needs at least one residue vector"));
        }
        let n = residues[0].len();
        if residues.iter().any(|r| r.len() != n) {
            return Err(Error::contract("residue vectors differ in length"));
        }
        Ok(Self { residues, domain })
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|r| r.iter().all(|&x| x == 0))
    }

    /// Drops primes above `level` without rescaling.
    pub fn truncate(&mut self, level: usize) {
        self.residues.truncate(level + 1);
    }
}

/// An ordered chain of NTT-friendly primes `q_0, ..., q_L` plus an optional
/// special prime used only inside key switching.
#[derive(Clone, Debug)]
pub struct RnsBasis {
    n: usize,
    scale_bits: u32,
    primes: Vec<PrimeModulus>,
    special: Option<PrimeModulus>,
}

impl RnsBasis {
    /// Deterministic CKKS chain: one `BASE_PRIME_BITS` prime at the bottom,
    /// `depth` primes just below `2^scale_bits`, and a special prime.
    pub fn generate(n: usize, scale_bits: u32, depth: usize) -> Result<Self> {
        let base = ntt_primes_below(BASE_PRIME_BITS, n, 1, &[])?;
        let special = ntt_primes_below(SPECIAL_PRIME_BITS, n, 1, &base)?;
        let mut exclude = base.clone();
        exclude.extend(&special);
        let scale_primes = ntt_primes_below(scale_bits, n, depth, &exclude)?;
        let mut chain = base;
        chain.extend(scale_primes);
        Self::from_primes(n, scale_bits, &chain, Some(special[0]))
    }

    /// Basis from explicit primes, level 0 first.
    pub fn from_primes(n: usize, scale_bits: u32, chain: &[u64], special: Option<u64>) -> Result<Self> {
        if chain.is_empty() {
            return Err(Error::contract("basis needs at least one prime"));
        }
        let mut seen: Vec<u64> = chain.to_vec();
        seen.extend(special);
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::contract("basis primes must be distinct"));
        }
        let primes = chain
            .iter()
            .map(|&q| PrimeModulus::new(q, n))
            .collect::<Result<Vec<_>>>()?;
        let special = special.map(|q| PrimeModulus::new(q, n)).transpose()?;
        Ok(Self { n, scale_bits, primes, special })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn scale_bits(&self) -> u32 {
        self.scale_bits
    }

    pub fn max_level(&self) -> usize {
        self.primes.len() - 1
    }

    pub fn primes(&self) -> &[PrimeModulus] {
        &self.primes
    }

    pub fn prime(&self, i: usize) -> &PrimeModulus {
        &self.primes[i]
    }

    pub fn special(&self) -> Option<&PrimeModulus> {
        self.special.as_ref()
    }

    /// Total bit count of all primes including the special one.
    pub fn total_bits(&self) -> f64 {
        self.primes
            .iter()
            .chain(self.special.iter())
            .map(|p| (p.value() as f64).log2())
            .sum()
    }

    /// Product of the active primes at `level`.
    pub fn modulus_at(&self, level: usize) -> BigUint {
        self.primes[..=level]
            .iter()
            .fold(BigUint::one(), |acc, p| acc * BigUint::from(p.value()))
    }

    fn check_level(&self, poly: &RnsPoly) -> Result<()> {
        if poly.residues.len() > self.primes.len() {
            return Err(Error::contract(format!(
                "polynomial level {} above basis maximum {}",
                poly.level(),
                self.max_level()
            )));
        }
        if poly.degree() != self.n {
            return Err(Error::contract(format!(
                "polynomial degree {} does not match ring degree {}",
                poly.degree(),
                self.n
            )));
        }
        Ok(())
    }

    fn check_pair(&self, a: &RnsPoly, b: &RnsPoly) -> Result<()> {
        self.check_level(a)?;
        self.check_level(b)?;
        if a.level() != b.level() {
            return Err(Error::Alignment { left: a.level(), right: b.level() });
        }
        if a.domain != b.domain {
            return Err(Error::contract("operands are in different domains"));
        }
        Ok(())
    }

    pub fn zero(&self, level: usize, domain: Domain) -> RnsPoly {
        RnsPoly { residues: vec![vec![0; self.n]; level + 1], domain }
    }

    /// Coefficient-domain polynomial from small signed coefficients.
    pub fn from_signed(&self, coeffs: &[i64], level: usize) -> Result<RnsPoly> {
        if coeffs.len() != self.n {
            return Err(Error::contract("coefficient count does not match ring degree"));
        }
        let residues = self.primes[..=level]
            .iter()
            .map(|p| coeffs.iter().map(|&c| p.reduce_i64(c)).collect())
            .collect();
        Ok(RnsPoly { residues, domain: Domain::Coefficient })
    }

    /// Coefficient-domain polynomial from arbitrary-size signed coefficients.
    pub fn from_bigint(&self, coeffs: &[BigInt], level: usize) -> Result<RnsPoly> {
        if coeffs.len() != self.n {
            return Err(Error::contract("coefficient count does not match ring degree"));
        }
        let residues = self.primes[..=level]
            .iter()
            .map(|p| {
                let q = BigInt::from(p.value());
                coeffs
                    .iter()
                    .map(|c| {
                        let r = ((c % &q) + &q) % &q;
                        u64::try_from(r).expect("reduced residue fits in u64")
                    })
                    .collect()
            })
            .collect();
        Ok(RnsPoly { residues, domain: Domain::Coefficient })
    }

    /// Centered CRT reconstruction of every coefficient (coefficient domain).
    pub fn to_bigint(&self, poly: &RnsPoly) -> Result<Vec<BigInt>> {
        self.check_level(poly)?;
        if poly.domain != Domain::Coefficient {
            return Err(Error::contract("CRT reconstruction needs coefficient domain"));
        }
        let level = poly.level();
        let q = self.modulus_at(level);
        let half = &q >> 1;
        let weights: Vec<BigUint> = self.primes[..=level]
            .iter()
            .map(|p| {
                let qi = BigUint::from(p.value());
                let hat = &q / &qi;
                let hat_mod = u64::try_from(&hat % &qi).expect("residue fits");
                let inv = p.inv(hat_mod).expect("distinct primes are coprime");
                hat * BigUint::from(inv)
            })
            .collect();
        let q_signed = BigInt::from(q.clone());
        Ok((0..self.n)
            .map(|j| {
                let mut acc = BigUint::zero();
                for (res, w) in poly.residues.iter().zip(&weights) {
                    acc += w * res[j];
                }
                acc %= &q;
                if acc > half {
                    BigInt::from(acc) - &q_signed
                } else {
                    BigInt::from(acc)
                }
            })
            .collect())
    }

    pub fn ntt(&self, poly: &RnsPoly, direction: Direction) -> Result<RnsPoly> {
        let mut out = poly.clone();
        self.ntt_in_place(&mut out, direction)?;
        Ok(out)
    }

    pub fn ntt_in_place(&self, poly: &mut RnsPoly, direction: Direction) -> Result<()> {
        self.check_level(poly)?;
        let (from, to) = match direction {
            Direction::Forward => (Domain::Coefficient, Domain::Evaluation),
            Direction::Inverse => (Domain::Evaluation, Domain::Coefficient),
        };
        if poly.domain != from {
            return Err(Error::contract(format!("{direction:?} NTT expects {from:?} domain input")));
        }
        for (res, p) in poly.residues.iter_mut().zip(&self.primes) {
            match direction {
                Direction::Forward => ntt::forward(p, res),
                Direction::Inverse => ntt::inverse(p, res),
            }
        }
        poly.domain = to;
        Ok(())
    }

    pub fn to_evaluation(&self, poly: &mut RnsPoly) -> Result<()> {
        if poly.domain == Domain::Coefficient {
            self.ntt_in_place(poly, Direction::Forward)?;
        }
        Ok(())
    }

    pub fn to_coefficient(&self, poly: &mut RnsPoly) -> Result<()> {
        if poly.domain == Domain::Evaluation {
            self.ntt_in_place(poly, Direction::Inverse)?;
        }
        Ok(())
    }

    pub fn add(&self, a: &RnsPoly, b: &RnsPoly) -> Result<RnsPoly> {
        let mut out = a.clone();
        self.add_assign(&mut out, b)?;
        Ok(out)
    }

    pub fn add_assign(&self, a: &mut RnsPoly, b: &RnsPoly) -> Result<()> {
        self.check_pair(a, b)?;
        for ((ra, rb), p) in a.residues.iter_mut().zip(&b.residues).zip(&self.primes) {
            for (x, &y) in ra.iter_mut().zip(rb) {
                *x = p.add(*x, y);
            }
        }
        Ok(())
    }

    pub fn sub(&self, a: &RnsPoly, b: &RnsPoly) -> Result<RnsPoly> {
        let mut out = a.clone();
        self.sub_assign(&mut out, b)?;
        Ok(out)
    }

    pub fn sub_assign(&self, a: &mut RnsPoly, b: &RnsPoly) -> Result<()> {
        self.check_pair(a, b)?;
        for ((ra, rb), p) in a.residues.iter_mut().zip(&b.residues).zip(&self.primes) {
            for (x, &y) in ra.iter_mut().zip(rb) {
                *x = p.sub(*x, y);
            }
        }
        Ok(())
    }

    pub fn neg(&self, a: &RnsPoly) -> Result<RnsPoly> {
        self.check_level(a)?;
        let mut out = a.clone();
        for (r, p) in out.residues.iter_mut().zip(&self.primes) {
            for x in r.iter_mut() {
                *x = p.neg(*x);
            }
        }
        Ok(out)
    }

    /// Pointwise product of two evaluation-domain polynomials.
    pub fn mul_pointwise(&self, a: &RnsPoly, b: &RnsPoly) -> Result<RnsPoly> {
        self.check_pair(a, b)?;
        if a.domain != Domain::Evaluation {
            return Err(Error::contract("pointwise product needs evaluation domain"));
        }
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.primes)
            .map(|((ra, rb), p)| ra.iter().zip(rb).map(|(&x, &y)| p.mul(x, y)).collect())
            .collect();
        Ok(RnsPoly { residues, domain: Domain::Evaluation })
    }

    /// `acc += a * b`, all in the evaluation domain.
    pub fn mul_acc(&self, acc: &mut RnsPoly, a: &RnsPoly, b: &RnsPoly) -> Result<()> {
        self.check_pair(a, b)?;
        self.check_pair(acc, a)?;
        for (((rc, ra), rb), p) in acc.residues.iter_mut().zip(&a.residues).zip(&b.residues).zip(&self.primes) {
            for ((z, &x), &y) in rc.iter_mut().zip(ra).zip(rb) {
                *z = p.add(*z, p.mul(x, y));
            }
        }
        Ok(())
    }

    /// Ring product `a * b mod (X^N + 1, q)`. Both operands must share level
    /// and domain; the result is returned in that same domain.
    pub fn poly_mul(&self, a: &RnsPoly, b: &RnsPoly) -> Result<RnsPoly> {
        self.check_pair(a, b)?;
        match a.domain {
            Domain::Evaluation => self.mul_pointwise(a, b),
            Domain::Coefficient => {
                let fa = self.ntt(a, Direction::Forward)?;
                let fb = self.ntt(b, Direction::Forward)?;
                let mut prod = self.mul_pointwise(&fa, &fb)?;
                self.ntt_in_place(&mut prod, Direction::Inverse)?;
                Ok(prod)
            }
        }
    }

    /// Multiplies every coefficient by a signed integer constant.
    pub fn mul_scalar(&self, a: &RnsPoly, c: i128) -> Result<RnsPoly> {
        self.check_level(a)?;
        let mut out = a.clone();
        for (r, p) in out.residues.iter_mut().zip(&self.primes) {
            let cm = p.reduce_i128(c);
            let cs = p.shoup(cm);
            for x in r.iter_mut() {
                *x = p.mul_shoup(*x, cm, cs);
            }
        }
        Ok(out)
    }

    /// Computes `round(x / q_last)` in the basis without the last prime.
    pub fn drop_last_prime_and_round(&self, poly: &RnsPoly) -> Result<RnsPoly> {
        self.check_level(poly)?;
        if poly.level() == 0 {
            return Err(Error::DepthExhausted("cannot drop the last remaining prime".into()));
        }
        if poly.domain != Domain::Coefficient {
            return Err(Error::contract("rounding division needs coefficient domain"));
        }
        let level = poly.level();
        let last = &self.primes[level];
        let top = &poly.residues[level];
        let mut residues = Vec::with_capacity(level);
        for (res, p) in poly.residues[..level].iter().zip(&self.primes) {
            let inv = p.inv(last.value() % p.value())?;
            let inv_s = p.shoup(inv);
            residues.push(
                res.iter()
                    .zip(top)
                    .map(|(&x, &t)| {
                        let r = p.reduce_i64(last.center(t));
                        p.mul_shoup(p.sub(x, r), inv, inv_s)
                    })
                    .collect(),
            );
        }
        Ok(RnsPoly { residues, domain: Domain::Coefficient })
    }

    /// Applies `X -> X^g` (odd `g`) to a coefficient-domain polynomial.
    pub fn automorphism(&self, poly: &RnsPoly, galois_elt: usize) -> Result<RnsPoly> {
        self.check_level(poly)?;
        if poly.domain != Domain::Coefficient {
            return Err(Error::contract("automorphism needs coefficient domain"));
        }
        let n = self.n;
        let m = 2 * n;
        if galois_elt % 2 == 0 {
            return Err(Error::contract("Galois element must be odd"));
        }
        let g = galois_elt % m;
        let mut residues = Vec::with_capacity(poly.residues.len());
        for (res, p) in poly.residues.iter().zip(&self.primes) {
            let mut out = vec![0u64; n];
            let mut idx = 0usize;
            for &c in res {
                if idx < n {
                    out[idx] = c;
                } else {
                    out[idx - n] = p.neg(c);
                }
                idx = (idx + g) % m;
            }
            residues.push(out);
        }
        Ok(RnsPoly { residues, domain: Domain::Coefficient })
    }

    /// Draws a fresh polynomial at `level` in the coefficient domain.
    pub fn sample<R: Rng + ?Sized>(&self, kind: SampleKind, level: usize, rng: &mut R) -> RnsPoly {
        match kind {
            SampleKind::Ternary => {
                let c = sample_ternary(self.n, rng);
                self.from_signed(&c, level).expect("length matches")
            }
            SampleKind::Gaussian => {
                let c = sample_gaussian(self.n, rng);
                self.from_signed(&c, level).expect("length matches")
            }
            SampleKind::Uniform => {
                let residues = self.primes[..=level]
                    .iter()
                    .map(|p| (0..self.n).map(|_| rng.gen_range(0..p.value())).collect())
                    .collect();
                RnsPoly { residues, domain: Domain::Coefficient }
            }
        }
    }
}

pub fn sample_ternary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-1i64..=1)).collect()
}

/// Rounded Gaussian with standard deviation `GAUSSIAN_STD_DEV`, tail-cut at 6σ.
pub fn sample_gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i64> {
    let normal = Normal::new(0.0, GAUSSIAN_STD_DEV).expect("positive std dev");
    let bound = 6.0 * GAUSSIAN_STD_DEV;
    (0..n)
        .map(|_| loop {
            let x: f64 = normal.sample(rng);
            if x.abs() <= bound {
                break x.round() as i64;
            }
        })
        .collect()
}
