//! Encrypt two vectors, combine them homomorphically and decrypt.

use cipherdescent::ckks::{keygen, CkksContext, CkksParams, Evaluator};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> anyhow::Result<()> {
    let ctx = CkksContext::new(CkksParams::insecure_test(1024, 3))?;
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let keys = keygen(ctx.clone(), &mut rng);
    let ev = Evaluator::new(ctx.clone());

    let a = [0.5, -1.25, 3.0, 0.125];
    let b = [2.0, 0.5, -0.75, 4.0];
    let ca = ctx.encrypt_real(&a, &keys.public, &mut rng)?;
    let cb = ctx.encrypt_real(&b, &keys.public, &mut rng)?;

    let sum = ev.add(&ca, &cb)?;
    let prod = ev.rescale(&ev.relinearize(&ev.mul(&ca, &cb)?, &keys.relin)?)?;
    let scaled = ev.rescale(&ev.mul_const(&ca, -3.0)?)?;
    let rotated = ev.rotate(&ca, 1, &keys.galois)?;

    let show = |name: &str, ct: &cipherdescent::ckks::Ciphertext| -> anyhow::Result<()> {
        let v = ctx.decrypt_real(ct, &keys.secret)?;
        let head: Vec<String> = v[..4].iter().map(|x| format!("{x:+.6}")).collect();
        println!("{name:<10} level {:>2}  [{}]", ct.level(), head.join(", "));
        Ok(())
    };
    show("a", &ca)?;
    show("b", &cb)?;
    show("a + b", &sum)?;
    show("a * b", &prod)?;
    show("-3 a", &scaled)?;
    show("rot(a, 1)", &rotated)?;
    Ok(())
}
