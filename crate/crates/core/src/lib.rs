//! Leveled CKKS encryption built from scratch, encrypted matrix products of
//! multiplicative depth two, and gradient descent (plain and accelerated)
//! for unconstrained quadratic programs run entirely on ciphertexts.
//!
//! * [`ring`]: RNS polynomial arithmetic over negacyclic NTTs.
//! * [`ckks`]: keys, encoding, the evaluator and a binary format.
//! * [`enclin`]: slot layouts, diagonal linear maps and [`enclin::mmult`].
//! * [`solver`]: problem instances and GD/AGD over plain, depth-simulated
//!   and encrypted backends.
//! * [`probgen`]: random SPD matrices with a prescribed condition number.
//! * [`harness`]: sweeps over `(d, κ)` and trajectory studies.
//!
//! ```no_run
//! use cipherdescent::probgen::{make_instance, GenSpec};
//! use cipherdescent::solver::{solve, Algorithm, BackendKind, SolverConfig};
//!
//! let inst = make_instance(&GenSpec::new(4, 10.0, 1))?;
//! let cfg = SolverConfig::new(6, BackendKind::PlainSimulatedDepth);
//! let res = solve(&inst, Algorithm::Agd, &cfg, None)?;
//! println!("f(x) - f(x*) = {:e}", res.final_tolerance);
//! # Ok::<(), cipherdescent::Error>(())
//! ```

pub mod ckks;
pub mod enclin;
pub mod error;
pub mod harness;
pub mod probgen;
pub mod ring;
pub mod solver;

pub use error::{Error, Result};
