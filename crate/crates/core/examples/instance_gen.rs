//! Generate a random quadratic program, certify its condition number and
//! write it as JSON.
//!
//! ```text
//! cargo run --example instance_gen -- <d> <kappa> <seed> [out.json]
//! ```

use cipherdescent::probgen::{make_instance, sym_eig, GenSpec};
use cipherdescent::solver::closed_form;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let d = args.first().map(|s| s.parse()).transpose()?.unwrap_or(4);
    let kappa = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(10.0);
    let seed = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let inst = make_instance(&GenSpec::new(d, kappa, seed))?;

    let eig = sym_eig(&inst.q)?;
    println!("eigenvalues {:?}", eig.values.as_slice());
    println!("certified kappa {:.12} (target {kappa})", eig.condition_number());
    let x = closed_form(&inst)?;
    println!("x* = {:?}", inst.x_star.as_slice());
    println!("closed-form error {:.2e}", (x - &inst.x_star).amax());
    println!("|x0 - x*| = {:.15}, f(x0) - f(x*) = {:.6}", inst.r, inst.tolerance(&inst.x0));

    match args.get(3) {
        Some(path) => {
            inst.save(path)?;
            println!("wrote {path}");
        }
        None => println!("{}", inst.to_json()?),
    }
    Ok(())
}
