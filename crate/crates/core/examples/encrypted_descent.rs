//! Encrypted GD and AGD on a two-dimensional problem with `κ = 2`,
//! `x* = (1, 1)` and `x0 = (3, 3)`, compared step by step with the
//! plaintext iteration.
//!
//! ```text
//! cargo run --release --example encrypted_descent -- [ring_degree]
//! ```

use cipherdescent::ckks::CkksParams;
use cipherdescent::harness::TrajectorySpec;
use cipherdescent::solver::{agd_plain, gd_plain, solve, Algorithm, BackendKind, CkksSession, SolverConfig};

fn main() -> anyhow::Result<()> {
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(8192);
    let start = std::time::Instant::now();
    let session = CkksSession::generate(CkksParams::insecure_test(n, 18), &[2], 1)?;
    println!("keys for N={n}, depth 18 in {:.1?}", start.elapsed());

    let inst = TrajectorySpec::fig2().instance(0)?;
    for (alg, iters) in [(Algorithm::Agd, 6), (Algorithm::Gd, 9)] {
        let mut cfg = SolverConfig::new(iters, BackendKind::Ckks);
        cfg.record_trajectory = true;
        let enc = solve(&inst, alg, &cfg, Some(&session))?.trace();
        let plain = match alg {
            Algorithm::Gd => gd_plain(&inst, iters)?,
            Algorithm::Agd => agd_plain(&inst, iters)?,
        };
        println!("\n{alg}: t  level  encrypted x_t                 plaintext x_t                 |x_t - x*|");
        let dist = enc.distances(&inst);
        for t in 0..enc.len() {
            let e = &enc.iterates[t];
            let p = &plain.iterates[t];
            println!(
                "     {t:>2}  {:>5}  ({:+.6}, {:+.6})  ({:+.6}, {:+.6})  {:.3e}",
                enc.levels[t].map(|l| l.to_string()).unwrap_or_default(),
                e[0],
                e[1],
                p[0],
                p[1],
                dist[t]
            );
        }
        println!("     largest gap to plaintext {:.2e}, {:.1}s total", enc.max_gap(&plain), enc.seconds.iter().sum::<f64>());
    }
    Ok(())
}
