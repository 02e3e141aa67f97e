//! Negacyclic number-theoretic transform over a single prime.
//!
//! Forward is Cooley-Tukey taking natural order to bit-reversed order,
//! inverse is Gentleman-Sande taking it back, both with the 2N-th root
//! folded into the twiddles so no pre/post weighting pass is needed.

use super::modulus::PrimeModulus;

pub fn forward(m: &PrimeModulus, a: &mut [u64]) {
    let n = a.len();
    debug_assert_eq!(n, m.degree());
    let q = m.value();
    let mut t = n;
    let mut groups = 1;
    while groups < n {
        t >>= 1;
        for i in 0..groups {
            let w = m.psi_rev[groups + i];
            let ws = m.psi_rev_shoup[groups + i];
            let start = 2 * i * t;
            let (lo, hi) = a[start..start + 2 * t].split_at_mut(t);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let u = *x;
                let v = m.mul_shoup(*y, w, ws);
                *x = if u + v >= q { u + v - q } else { u + v };
                *y = if u >= v { u - v } else { u + q - v };
            }
        }
        groups <<= 1;
    }
}

pub fn inverse(m: &PrimeModulus, a: &mut [u64]) {
    let n = a.len();
    debug_assert_eq!(n, m.degree());
    let q = m.value();
    let mut t = 1;
    let mut groups = n >> 1;
    while groups >= 1 {
        for i in 0..groups {
            let w = m.psi_inv_rev[groups + i];
            let ws = m.psi_inv_rev_shoup[groups + i];
            let start = 2 * i * t;
            let (lo, hi) = a[start..start + 2 * t].split_at_mut(t);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let u = *x;
                let v = *y;
                *x = if u + v >= q { u + v - q } else { u + v };
                let diff = if u >= v { u - v } else { u + q - v };
                *y = m.mul_shoup(diff, w, ws);
            }
        }
        t <<= 1;
        groups >>= 1;
    }
    for x in a.iter_mut() {
        *x = m.mul_shoup(*x, m.n_inv, m.n_inv_shoup);
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ring::modulus::ntt_primes_below;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(N^2) product in Z_q[X]/(X^N + 1).
    pub(crate) fn schoolbook(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let n = a.len();
        let mut out = vec![0u128; n];
        let q128 = q as u128;
        for i in 0..n {
            for j in 0..n {
                let prod = a[i] as u128 * b[j] as u128 % q128;
                let k = i + j;
                if k < n {
                    out[k] = (out[k] + prod) % q128;
                } else {
                    out[k - n] = (out[k - n] + q128 - prod) % q128;
                }
            }
        }
        out.into_iter().map(|x| x as u64).collect()
    }

    fn ntt_mul(m: &PrimeModulus, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (mut fa, mut fb) = (a.to_vec(), b.to_vec());
        forward(m, &mut fa);
        forward(m, &mut fb);
        let mut prod: Vec<u64> = fa.iter().zip(&fb).map(|(&x, &y)| m.mul(x, y)).collect();
        inverse(m, &mut prod);
        prod
    }

    #[test]
    fn toy_square_of_one_plus_x() {
        let m = PrimeModulus::new(97, 4).unwrap();
        let a = [1, 1, 0, 0];
        assert_eq!(schoolbook(&a, &a, 97), vec![1, 2, 1, 0]);
        assert_eq!(ntt_mul(&m, &a, &a), vec![1, 2, 1, 0]);
    }

    #[test]
    fn zero_maps_to_zero() {
        let m = PrimeModulus::new(97, 4).unwrap();
        let mut a = [0u64; 4];
        forward(&m, &mut a);
        assert_eq!(a, [0; 4]);
    }

    #[test]
    fn round_trip_many_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (bits, n) in [(40, 1024), (60, 256), (20, 16)] {
            let q = ntt_primes_below(bits, n, 1, &[]).unwrap()[0];
            let m = PrimeModulus::new(q, n).unwrap();
            let reps = if n <= 256 { 1000 } else { 50 };
            for _ in 0..reps {
                let x: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
                let mut y = x.clone();
                forward(&m, &mut y);
                inverse(&m, &mut y);
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn agrees_with_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [4usize, 8, 16] {
            let q = ntt_primes_below(50, n, 1, &[]).unwrap()[0];
            let m = PrimeModulus::new(q, n).unwrap();
            for _ in 0..100 {
                let a: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
                let b: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
                assert_eq!(ntt_mul(&m, &a, &b), schoolbook(&a, &b, q));
            }
        }
    }
}
