//! Encrypted product of two matrices and of a matrix with a vector, each
//! costing two levels.

use cipherdescent::ckks::{CkksContext, CkksParams, Evaluator, KeyGenerator};
use cipherdescent::enclin::{mmult, mmult_rotation_steps, EncodedMatrix, EncodedVector};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn main() -> anyhow::Result<()> {
    let d = 4;
    let ctx = CkksContext::new(CkksParams::insecure_test(8192, 4))?;
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let kg = KeyGenerator::new(ctx.clone(), &mut rng);
    let pk = kg.public_key(&mut rng);
    let rk = kg.relin_key(&mut rng);
    let steps = mmult_rotation_steps(d, ctx.slots())?;
    println!("rotation keys for d={d}: {steps:?}");
    let gk = kg.galois_keys_for(&steps, &mut rng);
    let sk = kg.secret_key();
    let ev = Evaluator::new(ctx.clone());

    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let b = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let x = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
    let ea = EncodedMatrix::encrypt(&ctx, &a, &pk, &mut rng)?;
    let eb = EncodedMatrix::encrypt(&ctx, &b, &pk, &mut rng)?;
    let ex = EncodedVector::encrypt(&ctx, &x, &pk, &mut rng)?;

    let start = std::time::Instant::now();
    let ab = mmult(&ev, &ea, &eb, 1.0, &rk, &gk)?;
    println!("A·B took {:.2?}, level {} -> {}", start.elapsed(), ea.ct.level(), ab.ct.level());
    let got = ab.decrypt(&ctx, sk)?;
    println!("relative Frobenius error {:.2e}", (&got - &a * &b).norm() / (&a * &b).norm());

    let ax = mmult(&ev, &ea, &ex, -0.5, &rk, &gk)?;
    let got = ax.decrypt(&ctx, sk)?;
    let want = -0.5 * &a * &x;
    println!("-0.5·A·x = {:?}", got.as_slice());
    println!("max error {:.2e}", (got - want).amax());
    println!("operation counts: {:?}", ev.counts());
    Ok(())
}
