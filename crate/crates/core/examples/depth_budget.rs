//! Iteration caps implied by a depth budget, and what happens one step
//! past the cap.

use cipherdescent::probgen::{make_instance, GenSpec};
use cipherdescent::solver::{
    max_iterations, per_iteration_cost, Algorithm, LevelledSolver, MatMulScheme, SimMatrix, SimVector,
    SimulatedBackend,
};

fn main() -> anyhow::Result<()> {
    let budget = 18;
    println!("depth budget {budget}");
    for scheme in [MatMulScheme::Ours, MatMulScheme::Jkls] {
        for alg in [Algorithm::Gd, Algorithm::Agd] {
            println!(
                "  {scheme:?} {alg}: {} levels per iteration, at most {} iterations",
                per_iteration_cost(alg, scheme),
                max_iterations(alg, budget, scheme)
            );
        }
    }

    let inst = make_instance(&GenSpec::new(4, 10.0, 1))?;
    let q = SimMatrix { value: inst.q.clone(), level: budget };
    let p = SimVector::new(inst.p.clone(), budget);
    for alg in [Algorithm::Gd, Algorithm::Agd] {
        let x0 = SimVector::new(inst.x0.clone(), budget);
        let mut s = LevelledSolver::new(&SimulatedBackend, alg, &q, &p, x0, &inst.meta())?;
        let mut levels = vec![budget];
        let err = loop {
            match s.step() {
                Ok(()) => levels.push(s.iterate().level),
                Err(e) => break e,
            }
        };
        println!("\n{alg} levels: {levels:?}");
        println!("step {} fails: {err}", s.iterations_done() + 1);
    }
    Ok(())
}
