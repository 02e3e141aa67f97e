//! Word-size modular arithmetic and NTT-friendly prime moduli.

use crate::error::{Error, Result};

/// Largest supported prime size. Keeps `a + b` and Shoup products inside a u64.
pub const MAX_PRIME_BITS: u32 = 62;

/// A prime `q ≡ 1 (mod 2N)` together with everything needed to run a
/// negacyclic NTT of length `N` modulo `q`.
#[derive(Clone, Debug)]
pub struct PrimeModulus {
    value: u64,
    n: usize,
    root: u64,
    /// floor(2^128 / q), used for Barrett reduction of 128-bit products.
    barrett: u128,
    pub(crate) psi_rev: Vec<u64>,
    pub(crate) psi_rev_shoup: Vec<u64>,
    pub(crate) psi_inv_rev: Vec<u64>,
    pub(crate) psi_inv_rev_shoup: Vec<u64>,
    pub(crate) n_inv: u64,
    pub(crate) n_inv_shoup: u64,
}

impl PartialEq for PrimeModulus {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.n == other.n && self.root == other.root
    }
}

impl Eq for PrimeModulus {}

impl PrimeModulus {
    /// Builds the modulus for ring degree `n` (a power of two, at least 2).
    pub fn new(value: u64, n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::contract(format!("ring degree {n} is not a power of two >= 2")));
        }
        if value < 3 || 64 - value.leading_zeros() > MAX_PRIME_BITS {
            return Err(Error::contract(format!("modulus {value} outside supported range")));
        }
        if !is_prime(value) {
            return Err(Error::contract(format!("modulus {value} is not prime")));
        }
        let two_n = 2 * n as u64;
        if (value - 1) % two_n != 0 {
            return Err(Error::contract(format!("modulus {value} is not 1 mod {two_n}")));
        }
        let barrett = u128::MAX / value as u128;
        let root = find_primitive_root(value, two_n);

        let log_n = n.trailing_zeros();
        let root_inv = pow_mod(root, value - 2, value);
        let mut psi_rev = vec![0u64; n];
        let mut psi_inv_rev = vec![0u64; n];
        let (mut pw, mut pw_inv) = (1u64, 1u64);
        for i in 0..n {
            let r = bit_reverse(i, log_n);
            psi_rev[r] = pw;
            psi_inv_rev[r] = pw_inv;
            pw = mul_mod_u128(pw, root, value);
            pw_inv = mul_mod_u128(pw_inv, root_inv, value);
        }
        let psi_rev_shoup = psi_rev.iter().map(|&w| shoup(w, value)).collect();
        let psi_inv_rev_shoup = psi_inv_rev.iter().map(|&w| shoup(w, value)).collect();
        let n_inv = pow_mod(n as u64 % value, value - 2, value);

        Ok(Self {
            value,
            n,
            root,
            barrett,
            psi_rev,
            psi_rev_shoup,
            psi_inv_rev,
            psi_inv_rev_shoup,
            n_inv,
            n_inv_shoup: shoup(n_inv, value),
        })
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.n
    }

    /// The primitive 2N-th root of unity the twiddle tables are built from.
    pub fn root(&self) -> u64 {
        self.root
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.value {
            s - self.value
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.value - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.value - a
        }
    }

    /// Barrett reduction of a 128-bit value below q^2 (or any value below 2^124).
    #[inline]
    pub fn reduce_u128(&self, z: u128) -> u64 {
        let (z1, z0) = ((z >> 64) as u64 as u128, z as u64 as u128);
        let (r1, r0) = (self.barrett >> 64, self.barrett as u64 as u128);
        let mid = z1 * r0 + z0 * r1 + ((z0 * r0) >> 64);
        let quot = z1 * r1 + (mid >> 64);
        let mut r = z.wrapping_sub(quot.wrapping_mul(self.value as u128)) as u64;
        while r >= self.value {
            r -= self.value;
        }
        r
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        if a >= self.value {
            a % self.value
        } else {
            a
        }
    }

    /// Maps a signed integer into `[0, q)`.
    #[inline]
    pub fn reduce_i64(&self, a: i64) -> u64 {
        let r = a.rem_euclid(self.value as i64);
        r as u64
    }

    pub fn reduce_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.value as i128) as u64
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce_u128(a as u128 * b as u128)
    }

    /// Multiplies by a constant with precomputed `shoup(w)`.
    #[inline]
    pub fn mul_shoup(&self, a: u64, w: u64, w_shoup: u64) -> u64 {
        let quot = ((a as u128 * w_shoup as u128) >> 64) as u64;
        let r = a.wrapping_mul(w).wrapping_sub(quot.wrapping_mul(self.value));
        if r >= self.value {
            r - self.value
        } else {
            r
        }
    }

    pub fn shoup(&self, w: u64) -> u64 {
        shoup(w, self.value)
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.value)
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = self.reduce(a);
        if a == 0 {
            return Err(Error::contract("zero has no modular inverse"));
        }
        Ok(pow_mod(a, self.value - 2, self.value))
    }

    /// Centered representative of `a` in `(-q/2, q/2]`.
    #[inline]
    pub fn center(&self, a: u64) -> i64 {
        if a > self.value / 2 {
            a as i64 - self.value as i64
        } else {
            a as i64
        }
    }
}

fn shoup(w: u64, q: u64) -> u64 {
    (((w as u128) << 64) / q as u128) as u64
}

pub(crate) fn mul_mod_u128(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, q);
        }
        base = mul_mod_u128(base, base, q);
        exp >>= 1;
    }
    acc
}

pub(crate) fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        return 0;
    }
    i.reverse_bits() >> (usize::BITS - bits)
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest generator-derived primitive `order`-th root of unity mod `q`
/// (`order` a power of two dividing `q - 1`).
fn find_primitive_root(q: u64, order: u64) -> u64 {
    let cofactor = (q - 1) / order;
    (2..q)
        .map(|g| pow_mod(g, cofactor, q))
        .find(|&r| pow_mod(r, order / 2, q) == q - 1)
        .expect("a prime congruent to 1 mod the order has a primitive root")
}

/// Collects `count` distinct primes `≡ 1 (mod 2n)` strictly below `2^bits`,
/// scanning downward, skipping any value in `exclude`.
pub fn ntt_primes_below(bits: u32, n: usize, count: usize, exclude: &[u64]) -> Result<Vec<u64>> {
    if bits > MAX_PRIME_BITS || bits < 4 {
        return Err(Error::contract(format!("unsupported prime size {bits} bits")));
    }
    let step = 2 * n as u64;
    let top = 1u64 << bits;
    let mut candidate = top - step + 1;
    let floor = 1u64 << (bits - 1);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if candidate <= floor {
            return Err(Error::contract(format!(
                "not enough {bits}-bit NTT primes for degree {n}"
            )));
        }
        if !exclude.contains(&candidate) && is_prime(candidate) {
            out.push(candidate);
        }
        candidate -= step;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(is_prime((1 << 61) - 1));
    }

    #[test]
    fn root_of_unity_invariants() {
        let m = PrimeModulus::new(97, 4).unwrap();
        let r = m.root();
        assert_eq!(m.pow(r, 8), 1);
        assert_eq!(m.pow(r, 4), 96);
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(PrimeModulus::new(91, 4).is_err());
        assert!(PrimeModulus::new(97, 3).is_err());
        assert!(PrimeModulus::new(101, 4).is_err());
    }

    #[test]
    fn generated_primes_are_ntt_friendly() {
        let ps = ntt_primes_below(40, 4096, 5, &[]).unwrap();
        for p in ps {
            assert!(is_prime(p));
            assert_eq!((p - 1) % 8192, 0);
            assert!(p < 1 << 40 && p > 1 << 39);
        }
    }

    proptest! {
        #[test]
        fn barrett_matches_u128_remainder(a in any::<u64>(), b in any::<u64>()) {
            let q = ntt_primes_below(62, 2, 1, &[]).unwrap()[0];
            let m = PrimeModulus::new(q, 2).unwrap();
            let (a, b) = (a % m.value(), b % m.value());
            prop_assert_eq!(m.mul(a, b), mul_mod_u128(a, b, m.value()));
        }

        #[test]
        fn shoup_matches_u128_remainder(a in any::<u64>(), w in any::<u64>()) {
            let q = ntt_primes_below(40, 2, 1, &[]).unwrap()[0];
            let m = PrimeModulus::new(q, 2).unwrap();
            let (a, w) = (a % m.value(), w % m.value());
            prop_assert_eq!(m.mul_shoup(a, w, m.shoup(w)), mul_mod_u128(a, w, m.value()));
        }
    }
}
