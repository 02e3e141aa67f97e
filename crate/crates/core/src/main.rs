//! Command line front end: key generation, single solves, sweeps and
//! trajectory studies.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use cipherdescent::ckks::{load_keys, power_of_two_steps, save_keys, CkksContext, CkksParams, KeyGenerator, KeySet};
use cipherdescent::enclin::mmult_rotation_steps;
use cipherdescent::harness::{emit, run_sweep, run_trajectory, OutputFormat, SweepSpec, TrajectorySpec, DEFAULT_SEED};
use cipherdescent::solver::{solve, Algorithm, BackendKind, CkksSession, QpInstance, SolverConfig};

#[derive(Parser)]
#[command(name = "cipherdescent", version, about = "Gradient descent on encrypted quadratic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Secure128,
    InsecureTest,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Gd,
    Agd,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Gd => Algorithm::Gd,
            AlgoArg::Agd => Algorithm::Agd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Plain,
    Sim,
    Ckks,
}

impl From<BackendArg> for BackendKind {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Plain => BackendKind::PlainExact,
            BackendArg::Sim => BackendKind::PlainSimulatedDepth,
            BackendArg::Ckks => BackendKind::Ckks,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate CKKS keys into a directory.
    Keygen {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long)]
        out: PathBuf,
        /// Ring degree for the insecure test preset.
        #[arg(long, default_value_t = 8192)]
        n: usize,
        #[arg(long, default_value_t = 18)]
        depth: usize,
        /// Matrix dimensions whose products the rotation keys must cover.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        dims: Vec<usize>,
        /// Instead of `--dims`, generate every power-of-two rotation key up
        /// to this step.
        #[arg(long)]
        max_rotation: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Solve one instance file.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long)]
        iters: usize,
        #[arg(long, value_enum, default_value = "plain")]
        backend: BackendArg,
        /// Key directory for the ckks backend; fresh test keys otherwise.
        #[arg(long)]
        keys: Option<PathBuf>,
        /// Write the full per-iteration result as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 18)]
        depth_budget: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Sweep dimensions and condition numbers, comparing GD and AGD.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,3,5,10,20,50")]
        kappas: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, value_enum, default_value = "plain")]
        backend: BackendArg,
        /// Report path; `.json` selects JSON, anything else CSV.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 9)]
        gd_iters: usize,
        #[arg(long, default_value_t = 6)]
        agd_iters: usize,
        #[arg(long)]
        keys: Option<PathBuf>,
    },
    /// Record per-iteration trajectories to CSV.
    Trace {
        /// Two-dimensional AGD study with x* = (1,1) and x0 = (3,3).
        #[arg(long)]
        fig2: bool,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2.0)]
        kappa: f64,
        #[arg(long, value_enum, default_value = "agd")]
        algo: AlgoArg,
        #[arg(long, default_value_t = 6)]
        iters: usize,
        #[arg(long)]
        keys: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn session(keys: Option<&PathBuf>, dims: &[usize], seed: u64) -> anyhow::Result<CkksSession> {
    match keys {
        Some(dir) => {
            let stored = load_keys(dir).with_context(|| format!("loading keys from {}", dir.display()))?;
            Ok(CkksSession::from_stored(stored, seed))
        }
        None => {
            log::warn!("no key directory given; generating insecure test keys (N=8192, depth 18)");
            Ok(CkksSession::generate(CkksParams::insecure_test(8192, 18), dims, seed)?)
        }
    }
}

fn keygen(
    preset: Preset,
    out: &PathBuf,
    n: usize,
    depth: usize,
    dims: &[usize],
    max_rotation: Option<usize>,
    seed: u64,
) -> anyhow::Result<()> {
    let params = match preset {
        Preset::Secure128 => CkksParams::secure128(),
        Preset::InsecureTest => CkksParams::insecure_test(n, depth),
    };
    let ctx = CkksContext::new(params.clone())?;
    let steps: Vec<i64> = match max_rotation {
        Some(m) => power_of_two_steps(ctx.slots()).into_iter().filter(|s| s.unsigned_abs() as usize <= m).collect(),
        None => {
            let mut s = std::collections::BTreeSet::new();
            for &d in dims {
                s.extend(mmult_rotation_steps(d, ctx.slots())?);
            }
            s.into_iter().collect()
        }
    };
    log::info!("generating keys for N={} depth={} with {} rotation steps", params.n, params.depth, steps.len());
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let kg = KeyGenerator::new(ctx, &mut rng);
    let keys = KeySet {
        secret: kg.secret_key().clone(),
        public: kg.public_key(&mut rng),
        relin: kg.relin_key(&mut rng),
        galois: kg.galois_keys_for(&steps, &mut rng),
    };
    save_keys(out, &params, &keys)?;
    println!("wrote keys to {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Keygen { preset, out, n, depth, dims, max_rotation, seed } => {
            keygen(preset, &out, n, depth, &dims, max_rotation, seed)
        }
        Command::Solve { instance, algo, iters, backend, keys, trace, depth_budget, seed } => {
            let inst = QpInstance::load(&instance).with_context(|| format!("reading {}", instance.display()))?;
            let mut cfg = SolverConfig::new(iters, backend.into());
            cfg.depth_budget = depth_budget;
            cfg.record_trajectory = trace.is_some();
            let sess = match cfg.backend {
                BackendKind::Ckks => Some(session(keys.as_ref(), &[inst.dim()], seed)?),
                _ => None,
            };
            let res = solve(&inst, algo.into(), &cfg, sess.as_ref())?;
            println!(
                "{} {} on {}: {} iterations, f(x) - f(x*) = {:e}, x = {:?}",
                res.instance_id, res.algorithm, res.backend, res.iterations, res.final_tolerance, res.final_x
            );
            if let Some(path) = trace {
                std::fs::write(&path, res.to_json()?).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(())
        }
        Command::Bench { dims, kappas, reps, backend, out, seed, gd_iters, agd_iters, keys } => {
            let spec = SweepSpec {
                dims: dims.clone(),
                kappas,
                repetitions: reps,
                backend: backend.into(),
                gd_iterations: gd_iters,
                agd_iterations: agd_iters,
                seed,
                ..SweepSpec::default()
            };
            let sess = match spec.backend {
                BackendKind::Ckks => Some(session(keys.as_ref(), &dims, seed)?),
                _ => None,
            };
            let report = run_sweep(&spec, sess.as_ref())?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            emit(&report, OutputFormat::from_path(&out), BufWriter::new(file))?;
            println!("wrote {} rows to {}", report.rows.len(), out.display());
            Ok(())
        }
        Command::Trace { fig2, out, backend, reps, d, kappa, algo, iters, keys, seed } => {
            let mut spec = if fig2 {
                TrajectorySpec::fig2()
            } else {
                TrajectorySpec {
                    d,
                    kappa,
                    iterations: iters,
                    algorithm: algo.into(),
                    backend: BackendKind::PlainExact,
                    fixed_points: None,
                    ..TrajectorySpec::fig2()
                }
            };
            spec.seed = seed;
            if let Some(b) = backend {
                spec.backend = b.into();
            }
            if let Some(r) = reps {
                spec.repetitions = r;
            }
            let sess = match spec.backend {
                BackendKind::Ckks => Some(session(keys.as_ref(), &[spec.d], seed)?),
                _ => None,
            };
            let data = run_trajectory(&spec, sess.as_ref())?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            data.write_csv(BufWriter::new(file))?;
            let med: Vec<String> = data.median_distances().iter().map(|v| format!("{v:.3e}")).collect();
            println!("median distance to x* per iteration: {}", med.join(" "));
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<cipherdescent::Error>() {
            return e.exit_code() as u8;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
    }
    2
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
