//! Negacyclic polynomial product through the RNS number-theoretic
//! transform, checked against the schoolbook product.

use cipherdescent::ring::{ntt_primes_below, RnsBasis, SampleKind};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> anyhow::Result<()> {
    let n = 16;
    let chain = ntt_primes_below(40, n, 3, &[])?;
    let basis = RnsBasis::from_primes(n, 40, &chain, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = basis.sample(SampleKind::Ternary, 2, &mut rng);
    let b = basis.sample(SampleKind::Gaussian, 2, &mut rng);

    let prod = basis.to_bigint(&basis.poly_mul(&a, &b)?)?;

    // X^n = -1: coefficients that wrap past degree n change sign.
    let (ca, cb) = (basis.to_bigint(&a)?, basis.to_bigint(&b)?);
    let mut want = vec![BigInt::from(0); n];
    for i in 0..n {
        for j in 0..n {
            let term = &ca[i] * &cb[j];
            if i + j < n {
                want[i + j] += term;
            } else {
                want[i + j - n] -= term;
            }
        }
    }

    println!("primes: {chain:?}");
    println!("a     = {:?}", ca);
    println!("b     = {:?}", cb);
    println!("a * b = {:?}", prod);
    assert_eq!(prod, want);
    println!("matches the schoolbook negacyclic product");
    Ok(())
}
