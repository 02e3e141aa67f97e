//! GD after 9 steps against AGD after 6 steps across condition numbers.
//!
//! ```text
//! cargo run --release --example kappa_sweep -- [repetitions] [seed]
//! ```

use cipherdescent::harness::{run_sweep, SweepSpec, DEFAULT_SEED};
use cipherdescent::solver::Algorithm;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let repetitions = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(DEFAULT_SEED);
    let spec = SweepSpec { repetitions, seed, ..SweepSpec::default() };
    let report = run_sweep(&spec, None)?;

    println!("median f(x) - f(x*) over {repetitions} instances, seed {seed}");
    println!("{:>3} {:>6} {:>12} {:>12}  winner", "d", "kappa", "GD@9", "AGD@6");
    for &d in &spec.dims {
        for &kappa in &spec.kappas {
            let gd = report.row(d, kappa, Algorithm::Gd).expect("cell present");
            let agd = report.row(d, kappa, Algorithm::Agd).expect("cell present");
            let winner = if gd.winner { "GD" } else { "AGD" };
            println!("{d:>3} {kappa:>6} {:>12.3e} {:>12.3e}  {winner}", gd.median_tol, agd.median_tol);
        }
    }
    Ok(())
}
