//! Solver behaviour across the plaintext, simulated and encrypted backends.

use cipherdescent::ckks::CkksParams;
use cipherdescent::probgen::{make_instance, random_spd, GenSpec};
use cipherdescent::solver::{
    agd_plain, gd_plain, he_agd, he_gd, per_iteration_cost, solve, Algorithm, BackendKind, CkksSession,
    LevelledSolver, MatMulScheme, QpInstance, SimMatrix, SimVector, SimulatedBackend, SolveResult, SolverConfig,
};
use cipherdescent::Error;
use nalgebra::{DMatrix, DVector};

fn fixed_point_instance(seed: u64) -> QpInstance {
    let q = random_spd(&GenSpec::new(2, 2.0, seed)).unwrap();
    let x_star = DVector::from_vec(vec![1.0, 1.0]);
    let p = -(&q * &x_star);
    QpInstance::new("fixed-points", q, p, 1.0, 2.0, x_star, DVector::from_vec(vec![3.0, 3.0])).unwrap()
}

fn toy_session(depth: usize, dims: &[usize]) -> CkksSession {
    CkksSession::generate(CkksParams::insecure_test(256, depth), dims, 7).unwrap()
}

#[test]
fn simulated_levels_follow_the_budget() {
    let inst = make_instance(&GenSpec::new(4, 10.0, 1)).unwrap();
    for (alg, cap) in [(Algorithm::Gd, 9), (Algorithm::Agd, 6)] {
        let mut cfg = SolverConfig::new(cap, BackendKind::PlainSimulatedDepth);
        cfg.record_trajectory = true;
        let res = solve(&inst, alg, &cfg, None).unwrap();
        let cost = per_iteration_cost(alg, MatMulScheme::Ours);
        for r in &res.per_iteration {
            assert_eq!(r.level, Some(18 - cost * r.t));
        }
        let plain = match alg {
            Algorithm::Gd => gd_plain(&inst, cap).unwrap(),
            Algorithm::Agd => agd_plain(&inst, cap).unwrap(),
        };
        assert!(res.trace().max_gap(&plain) < 1e-12);

        cfg.iterations = cap + 1;
        assert!(matches!(solve(&inst, alg, &cfg, None), Err(Error::DepthExhausted(_))));
        cfg.backend = BackendKind::PlainExact;
        assert!(solve(&inst, alg, &cfg, None).is_ok());
    }
}

#[test]
fn stepping_past_the_cap_exhausts_depth() {
    let inst = make_instance(&GenSpec::new(2, 3.0, 2)).unwrap();
    let q = SimMatrix { value: inst.q.clone(), level: 18 };
    let p = SimVector::new(inst.p.clone(), 18);
    for (alg, cap) in [(Algorithm::Gd, 9), (Algorithm::Agd, 6)] {
        let x0 = SimVector::new(inst.x0.clone(), 18);
        let mut s = LevelledSolver::new(&SimulatedBackend, alg, &q, &p, x0, &inst.meta()).unwrap();
        for _ in 0..cap {
            s.step().unwrap();
        }
        assert_eq!(s.iterate().level, 0);
        assert!(matches!(s.step(), Err(Error::DepthExhausted(_))));
    }
}

#[test]
fn result_json_round_trip() {
    let inst = make_instance(&GenSpec::new(2, 5.0, 3)).unwrap();
    let mut cfg = SolverConfig::new(4, BackendKind::PlainExact);
    cfg.record_trajectory = true;
    let res = solve(&inst, Algorithm::Agd, &cfg, None).unwrap();
    assert_eq!(res.per_iteration.len(), 5);
    let back: SolveResult = serde_json::from_str(&res.to_json().unwrap()).unwrap();
    assert_eq!(back, res);
    let v: serde_json::Value = serde_json::from_str(&res.to_json().unwrap()).unwrap();
    for key in ["instance_id", "algorithm", "backend", "iterations", "final_tolerance", "per_iteration"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn encrypted_identity_converges_in_one_step() {
    let s = toy_session(2, &[2]);
    let x_star = DVector::from_vec(vec![1.0, 1.0]);
    let inst =
        QpInstance::new("id", DMatrix::identity(2, 2), -&x_star, 1.0, 1.0, x_star, DVector::from_vec(vec![3.0, 3.0]))
            .unwrap();
    let mut cfg = SolverConfig::new(1, BackendKind::Ckks);
    cfg.depth_budget = 2;
    let res = solve(&inst, Algorithm::Gd, &cfg, Some(&s)).unwrap();
    for v in &res.final_x {
        assert!((v - 1.0).abs() < 1e-3);
    }
}

#[test]
fn encrypted_trajectories_track_plaintext() {
    let s = toy_session(18, &[2, 4]);
    let inst = fixed_point_instance(4);
    let mut cfg = SolverConfig::new(6, BackendKind::Ckks);
    cfg.record_trajectory = true;
    let enc = solve(&inst, Algorithm::Agd, &cfg, Some(&s)).unwrap().trace();
    let plain = agd_plain(&inst, 6).unwrap();
    assert_eq!(enc.len(), 7);
    assert!(enc.max_gap(&plain) < 1e-3, "gap {}", enc.max_gap(&plain));
    let dist = enc.distances(&inst);
    assert!(dist.windows(2).all(|w| w[1] < w[0]));

    let inst = make_instance(&GenSpec::new(4, 10.0, 5)).unwrap();
    cfg.iterations = 9;
    let enc = solve(&inst, Algorithm::Gd, &cfg, Some(&s)).unwrap().trace();
    let plain = gd_plain(&inst, 9).unwrap();
    assert!(enc.max_gap(&plain) < 1e-3, "gap {}", enc.max_gap(&plain));
    assert_eq!(enc.levels.last().copied().flatten(), Some(0));
}

#[test]
fn encrypted_solvers_from_ciphertexts() {
    let s = toy_session(18, &[2]);
    let inst = fixed_point_instance(6);
    let level = s.ctx.max_level();
    let q = s.encrypt_matrix(&inst.q, level).unwrap();
    let p = s.encrypt_vector(&inst.p, level).unwrap();
    let x0 = s.encrypt_vector(&inst.x0, level).unwrap();
    let backend = s.backend(false);
    let meta = inst.meta();

    let (x, trace) = he_gd(&backend, &q, &p, &meta, Some(&x0), 9, None).unwrap();
    assert!(trace.is_none());
    let want = gd_plain(&inst, 9).unwrap().last().unwrap();
    assert!((s.decrypt_vector(&x).unwrap() - want).amax() < 1e-3);
    assert!(matches!(he_gd(&backend, &q, &p, &meta, Some(&x0), 10, None), Err(Error::DepthExhausted(_))));
    assert!(matches!(he_agd(&backend, &q, &p, &meta, Some(&x0), 7, None), Err(Error::DepthExhausted(_))));

    // Without a starting point the run begins at zero.
    let mut from_zero = inst.clone();
    from_zero.x0 = DVector::zeros(2);
    let (x, _) = he_agd(&backend, &q, &p, &meta, None, 3, None).unwrap();
    let want = agd_plain(&from_zero, 3).unwrap().last().unwrap();
    assert!((s.decrypt_vector(&x).unwrap() - want).amax() < 1e-3);
}

#[test]
fn zero_momentum_agd_matches_gd_under_encryption() {
    let s = toy_session(8, &[2]);
    let x_star = DVector::from_vec(vec![0.5, -0.25]);
    let q = DMatrix::identity(2, 2) * 2.0;
    let inst = QpInstance::new("flat", q.clone(), -(&q * &x_star), 2.0, 2.0, x_star, DVector::from_vec(vec![1.0, 1.0]))
        .unwrap();
    let mut cfg = SolverConfig::new(2, BackendKind::Ckks);
    cfg.depth_budget = 8;
    let agd = solve(&inst, Algorithm::Agd, &cfg, Some(&s)).unwrap();
    let gd = solve(&inst, Algorithm::Gd, &cfg, Some(&s)).unwrap();
    for (a, g) in agd.final_x.iter().zip(&gd.final_x) {
        assert!((a - g).abs() < 1e-3);
    }
}
