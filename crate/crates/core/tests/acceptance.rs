//! Acceptance suite. Each test checks one criterion and writes a single
//! `PASS`/`FAIL` line straight to stderr, so the verdicts show up even
//! when libtest captures output.

use std::io::Write;
use std::sync::OnceLock;

use cipherdescent::ckks::{
    Ciphertext, CkksContext, CkksParams, Evaluator, GaloisKeys, KeyGenerator, Plaintext, PublicKey, RelinKey,
    SecretKey, Serializable,
};
use cipherdescent::enclin::{flatten, make_vk, make_wk, mmult, mmult_rotation_steps, EncodedMatrix, EncodedVector};
use cipherdescent::harness::{run_sweep, run_trajectory, SweepSpec, TrajectorySpec};
use cipherdescent::probgen::{make_instance, GenSpec};
use cipherdescent::solver::{
    agd_plain, gd_plain_with_step, gd_step_size, he_agd, he_gd, max_iterations, Algorithm, CkksSession,
    LevelledSolver, MatMulScheme,
};
use cipherdescent::Error;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn report(n: usize, ok: bool, what: &str, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{verdict} criterion {n}: {what} ({detail})");
}

fn finish(n: usize, what: &str, failures: &[String], detail: &str) {
    report(n, failures.is_empty(), what, detail);
    assert!(failures.is_empty(), "criterion {n} failed:\n  {}", failures.join("\n  "));
}

fn random_matrix(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0))
}

/// Depth-18 session with the rotations a 2×2 product needs.
fn deep_session() -> &'static CkksSession {
    static S: OnceLock<CkksSession> = OnceLock::new();
    S.get_or_init(|| CkksSession::generate(CkksParams::insecure_test(8192, 18), &[2], 1).unwrap())
}

#[test]
fn criterion_1_iteration_caps() {
    let cases = [
        (Algorithm::Gd, MatMulScheme::Ours, 9),
        (Algorithm::Agd, MatMulScheme::Ours, 6),
        (Algorithm::Gd, MatMulScheme::Jkls, 6),
        (Algorithm::Agd, MatMulScheme::Jkls, 4),
    ];
    let mut failures = Vec::new();
    let mut got = Vec::new();
    for (alg, scheme, want) in cases {
        let n = max_iterations(alg, 18, scheme);
        got.push(format!("{alg}/{scheme:?}={n}"));
        if n != want {
            failures.push(format!("{alg} {scheme:?}: {n} != {want}"));
        }
    }
    finish(1, "iteration caps at depth 18", &failures, &got.join(", "));
}

#[test]
fn criterion_2_encrypted_matrix_products() {
    let ctx = CkksContext::new(CkksParams::insecure_test(8192, 2)).unwrap();
    assert_eq!(ctx.default_scale(), 2f64.powi(40));
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let kg = KeyGenerator::new(ctx.clone(), &mut rng);
    let pk = kg.public_key(&mut rng);
    let rk = kg.relin_key(&mut rng);
    let mut steps: Vec<i64> = Vec::new();
    for d in [2, 4, 8] {
        steps.extend(mmult_rotation_steps(d, ctx.slots()).unwrap());
    }
    steps.sort_unstable();
    steps.dedup();
    let gk = kg.galois_keys_for(&steps, &mut rng);
    let sk = kg.secret_key();
    let ev = Evaluator::new(ctx.clone());

    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for d in [2, 4, 8] {
        for pair in 0..50 {
            let a = random_matrix(&mut rng, d);
            let b = random_matrix(&mut rng, d);
            let x = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
            let ea = EncodedMatrix::encrypt(&ctx, &a, &pk, &mut rng).unwrap();
            let eb = EncodedMatrix::encrypt(&ctx, &b, &pk, &mut rng).unwrap();
            let ex = EncodedVector::encrypt(&ctx, &x, &pk, &mut rng).unwrap();

            let ab = mmult(&ev, &ea, &eb, 1.0, &rk, &gk).unwrap();
            let want = &a * &b;
            let err = (ab.decrypt(&ctx, sk).unwrap() - &want).norm() / want.norm();
            worst = worst.max(err);
            if err >= 1e-4 {
                failures.push(format!("d={d} pair {pair} A·B relative error {err:.2e}"));
            }
            if ea.ct.level() - ab.ct.level() != 2 {
                failures.push(format!("d={d} pair {pair} A·B used {} levels", ea.ct.level() - ab.ct.level()));
            }

            let ax = mmult(&ev, &ea, &ex, 1.0, &rk, &gk).unwrap();
            let want = &a * &x;
            let err = (ax.decrypt(&ctx, sk).unwrap() - &want).norm() / want.norm();
            worst = worst.max(err);
            if err >= 1e-4 {
                failures.push(format!("d={d} pair {pair} A·x relative error {err:.2e}"));
            }
            if ea.ct.level() - ax.ct.level() != 2 {
                failures.push(format!("d={d} pair {pair} A·x used {} levels", ea.ct.level() - ax.ct.level()));
            }
        }
    }
    finish(
        2,
        "encrypted products for d in {2,4,8}, 50 pairs each",
        &failures,
        &format!("worst relative Frobenius error {worst:.2e}, 2 levels each"),
    );
}

#[test]
fn criterion_3_diagonal_decomposition() {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4, 8] {
        for _ in 0..50 {
            let a = random_matrix(&mut rng, d);
            let b = random_matrix(&mut rng, d);
            let s = rng.gen_range(-2.0..2.0);
            let (fa, fb) = (flatten(&a), flatten(&b));
            let mut sum = vec![0.0; d * d];
            for k in 0..d {
                let va = make_vk(d, k, s).unwrap().apply(&fa).unwrap();
                let wb = make_wk(d, k).unwrap().apply(&fb).unwrap();
                for (acc, (u, v)) in sum.iter_mut().zip(va.iter().zip(&wb)) {
                    *acc += u * v;
                }
            }
            let want = flatten(&(s * &a * &b));
            let err = sum.iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
            worst = worst.max(err);
            if err > 1e-12 {
                failures.push(format!("d={d}: error {err:.2e}"));
            }
        }
    }
    finish(3, "plaintext diagonal decomposition", &failures, &format!("max error {worst:.2e}"));
}

#[test]
fn criterion_4_contraction() {
    let spec = SweepSpec::default();
    let mut failures = Vec::new();
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..100 {
        let kappa = spec.kappas[i % spec.kappas.len()];
        let d = spec.dims[i % spec.dims.len()];
        let inst = make_instance(&GenSpec::new(d, kappa, 4000 + i as u64)).unwrap();
        let eta = gd_step_size(inst.lambda_min, inst.lambda_max).unwrap();
        let dist = gd_plain_with_step(&inst, 20, eta).distances(&inst);
        let rho = (kappa - 1.0) / (kappa + 1.0);
        for t in 1..dist.len() {
            let excess = dist[t] - rho * dist[t - 1];
            worst_excess = worst_excess.max(excess);
            if excess > 1e-12 {
                failures.push(format!("instance {} step {t}: excess {excess:.2e}", inst.id));
            }
        }
    }
    finish(
        4,
        "GD contraction on 100 instances",
        &failures,
        &format!("largest ‖x_t+1 − x*‖ − ρ‖x_t − x*‖ = {worst_excess:.2e}"),
    );
}

#[test]
fn criterion_5_crossover() {
    let spec = SweepSpec::ci();
    let report5 = run_sweep(&spec, None).unwrap();
    let mut failures = Vec::new();
    for &d in &spec.dims {
        for &kappa in &spec.kappas {
            let gd = report5.row(d, kappa, Algorithm::Gd).unwrap().median_tol;
            let agd = report5.row(d, kappa, Algorithm::Agd).unwrap().median_tol;
            if kappa <= 5.0 && gd >= agd {
                failures.push(format!("d={d} κ={kappa}: GD {gd:.3e} not below AGD {agd:.3e}"));
            }
            if kappa >= 10.0 && agd >= gd {
                failures.push(format!("d={d} κ={kappa}: AGD {agd:.3e} not below GD {gd:.3e}"));
            }
        }
    }
    let mut spots = Vec::new();
    for (kappa, alg, reference) in [(1.5, Algorithm::Gd, 3e-9), (10.0, Algorithm::Agd, 7e-3)] {
        let m = report5.row(2, kappa, alg).unwrap().median_tol;
        spots.push(format!("d=2 κ={kappa} {alg} {m:.2e}"));
        if (m / reference).log10().abs() > 2.0 {
            failures.push(format!("d=2 κ={kappa} {alg} median {m:.3e} is more than 100x from {reference:e}"));
        }
    }
    finish(5, "GD@9 vs AGD@6 crossover, 20 repetitions", &failures, &spots.join(", "));
}

#[test]
fn criterion_6_encrypted_trajectory() {
    let session = deep_session();
    let spec = TrajectorySpec::fig2();
    let data = run_trajectory(&spec, Some(session)).unwrap();
    let mut failures = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for run in &data.runs {
        let inst = spec.instance(run.rep).unwrap();
        let plain = agd_plain(&inst, spec.iterations).unwrap();
        let gap = run.trace.max_gap(&plain);
        worst_gap = worst_gap.max(gap);
        if gap > 1e-3 {
            failures.push(format!("rep {}: gap {gap:.2e}", run.rep));
        }
        let dist = run.distances();
        if let Some(t) = (1..dist.len()).find(|&t| dist[t] >= dist[t - 1]) {
            failures.push(format!("rep {}: distance rises at t={t}", run.rep));
        }
    }
    finish(
        6,
        "encrypted AGD trajectories track plaintext",
        &failures,
        &format!("{} repetitions, largest ∞-norm gap {worst_gap:.2e}", data.runs.len()),
    );
}

#[test]
fn criterion_7_depth_exhaustion() {
    let session = deep_session();
    let inst = TrajectorySpec::fig2().instance(0).unwrap();
    let backend = session.backend(false);
    let q = session.encrypt_matrix(&inst.q, 18).unwrap();
    let p = session.encrypt_vector(&inst.p, 18).unwrap();
    let x0 = session.encrypt_vector(&inst.x0, 18).unwrap();
    let meta = inst.meta();
    let mut failures = Vec::new();

    match he_gd(&backend, &q, &p, &meta, Some(&x0), 10, None) {
        Err(Error::DepthExhausted(_)) => {}
        other => failures.push(format!("he_gd with 10 iterations returned {:?}", other.map(|_| ()))),
    }
    match he_agd(&backend, &q, &p, &meta, Some(&x0), 7, None) {
        Err(Error::DepthExhausted(_)) => {}
        other => failures.push(format!("he_agd with 7 iterations returned {:?}", other.map(|_| ()))),
    }

    // Step past the cap to see the levels themselves run out.
    let mut completed = Vec::new();
    for (alg, cap) in [(Algorithm::Gd, 9), (Algorithm::Agd, 6)] {
        let mut s = LevelledSolver::new(&backend, alg, &q, &p, x0.clone(), &meta).unwrap();
        let mut done = 0;
        let err = loop {
            match s.step() {
                Ok(()) => done += 1,
                Err(e) => break e,
            }
        };
        completed.push(format!("{alg} stops after {done}"));
        if done != cap || !matches!(err, Error::DepthExhausted(_)) {
            failures.push(format!("{alg}: {done} steps then {err}"));
        }
    }
    finish(7, "depth exhaustion past the caps", &failures, &completed.join(", "));
}

fn round_trips<T: Serializable>(item: &T) -> bool {
    let bytes = item.to_bytes().unwrap();
    T::from_bytes(&bytes).map(|back| back.to_bytes().unwrap() == bytes).unwrap_or(false)
}

#[test]
fn criterion_8_homomorphism_and_serialization() {
    let ctx = CkksContext::new(CkksParams::insecure_test(128, 3)).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let kg = KeyGenerator::new(ctx.clone(), &mut rng);
    let pk: PublicKey = kg.public_key(&mut rng);
    let rk: RelinKey = kg.relin_key(&mut rng);
    let gk: GaloisKeys = kg.galois_keys(&mut rng);
    let sk: &SecretKey = kg.secret_key();
    let ev = Evaluator::new(ctx.clone());
    let slots = ctx.slots();
    let gap = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let mut failures = Vec::new();
    let mut worst = [0.0f64; 5];
    let names = ["add", "sub", "plain mul", "cipher mul", "rotate"];
    for trial in 0..100 {
        let a: Vec<f64> = (0..slots).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..slots).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ca = ctx.encrypt_real(&a, &pk, &mut rng).unwrap();
        let cb = ctx.encrypt_real(&b, &pk, &mut rng).unwrap();
        let pb = ctx.encode_real(&b, ctx.prime_at(ca.level()), ca.level()).unwrap();
        let k = 1 + trial % (slots - 1);

        let dec = |ct: &Ciphertext| ctx.decrypt_real(ct, sk).unwrap();
        let pairwise = |f: fn(f64, f64) -> f64| a.iter().zip(&b).map(|(x, y)| f(*x, *y)).collect::<Vec<_>>();
        let rotated: Vec<f64> = (0..slots).map(|i| a[(i + k) % slots]).collect();
        let results = [
            gap(&dec(&ev.add(&ca, &cb).unwrap()), &pairwise(|x, y| x + y)),
            gap(&dec(&ev.sub(&ca, &cb).unwrap()), &pairwise(|x, y| x - y)),
            gap(&dec(&ev.rescale(&ev.mul_plain(&ca, &pb).unwrap()).unwrap()), &pairwise(|x, y| x * y)),
            gap(
                &dec(&ev.rescale(&ev.relinearize(&ev.mul(&ca, &cb).unwrap(), &rk).unwrap()).unwrap()),
                &pairwise(|x, y| x * y),
            ),
            gap(&dec(&ev.rotate(&ca, k as i64, &gk).unwrap()), &rotated),
        ];
        for (i, e) in results.into_iter().enumerate() {
            worst[i] = worst[i].max(e);
            if e > 1e-5 {
                failures.push(format!("trial {trial} {}: error {e:.2e}", names[i]));
            }
        }
    }

    let a: Vec<f64> = (0..slots).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let ct = ctx.encrypt_real(&a, &pk, &mut rng).unwrap();
    let pt: Plaintext = ctx.encode_real(&a, ctx.default_scale(), ctx.max_level()).unwrap();
    let serial = [
        ("ciphertext", round_trips(&ct)),
        ("plaintext", round_trips(&pt)),
        ("secret key", round_trips(sk)),
        ("public key", round_trips(&pk)),
        ("relinearization key", round_trips(&rk)),
        ("galois keys", round_trips(&gk)),
    ];
    for (what, ok) in serial {
        if !ok {
            failures.push(format!("{what} does not round-trip"));
        }
    }
    let back = Ciphertext::from_bytes(&ct.to_bytes().unwrap()).unwrap();
    if gap(&ctx.decrypt_real(&back, sk).unwrap(), &a) > 1e-5 {
        failures.push("reloaded ciphertext decrypts wrongly".into());
    }

    let detail = names.iter().zip(worst).map(|(n, w)| format!("{n} {w:.1e}")).collect::<Vec<_>>().join(", ");
    finish(8, "homomorphic operations over 100 vectors and bit-exact serialization", &failures, &detail);
}
