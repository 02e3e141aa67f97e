//! Per-iteration trajectories of repeated solves.

use std::io::Write;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::stats::{derive_seed, quantile};
use super::sweep::DEFAULT_SEED;
use crate::error::{Error, Result};
use crate::probgen::{make_instance, random_spd, GenSpec};
use crate::solver::{max_iterations, solve, Algorithm, BackendKind, CkksSession, MatMulScheme, QpInstance, SolverConfig, Trace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub d: usize,
    pub kappa: f64,
    pub repetitions: usize,
    pub iterations: usize,
    pub algorithm: Algorithm,
    pub backend: BackendKind,
    pub seed: u64,
    pub depth_budget: usize,
    /// Fixed minimizer and start shared by every repetition; only `Q`
    /// varies. When absent each repetition draws a full instance.
    pub fixed_points: Option<(Vec<f64>, Vec<f64>)>,
}

impl TrajectorySpec {
    /// Two-dimensional AGD study: `κ = 2`, `x* = (1, 1)`, `x0 = (3, 3)`,
    /// six encrypted iterations over 100 random matrices.
    pub fn fig2() -> Self {
        Self {
            d: 2,
            kappa: 2.0,
            repetitions: 100,
            iterations: 6,
            algorithm: Algorithm::Agd,
            backend: BackendKind::Ckks,
            seed: DEFAULT_SEED,
            depth_budget: 18,
            fixed_points: Some((vec![1.0, 1.0], vec![3.0, 3.0])),
        }
    }

    pub fn instance(&self, rep: usize) -> Result<QpInstance> {
        let seed = derive_seed(self.seed, self.d, self.kappa, rep);
        let gen = GenSpec::new(self.d, self.kappa, seed);
        match &self.fixed_points {
            None => make_instance(&gen),
            Some((x_star, x0)) => {
                if x_star.len() != self.d || x0.len() != self.d {
                    return Err(Error::Dimension("fixed points do not match the dimension".into()));
                }
                let q = random_spd(&gen)?;
                let x_star = DVector::from_column_slice(x_star);
                let p = -(&q * &x_star);
                QpInstance::new(
                    format!("traj-d{}-k{}-r{rep}", self.d, self.kappa),
                    q,
                    p,
                    1.0,
                    self.kappa,
                    x_star,
                    DVector::from_column_slice(x0),
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRun {
    pub rep: usize,
    pub instance_id: String,
    pub x_star: Vec<f64>,
    pub trace: Trace,
}

impl TrajectoryRun {
    pub fn distances(&self) -> Vec<f64> {
        let x_star = DVector::from_column_slice(&self.x_star);
        self.trace.iterates.iter().map(|x| (DVector::from_column_slice(x) - &x_star).norm()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDataset {
    pub spec: TrajectorySpec,
    pub runs: Vec<TrajectoryRun>,
}

impl TrajectoryDataset {
    /// Median over repetitions of `‖x_t − x*‖₂`, per iteration.
    pub fn median_distances(&self) -> Vec<f64> {
        let per_run: Vec<Vec<f64>> = self.runs.iter().map(TrajectoryRun::distances).collect();
        (0..=self.spec.iterations)
            .map(|t| quantile(&per_run.iter().map(|d| d[t]).collect::<Vec<_>>(), 0.5))
            .collect()
    }

    /// One CSV row per repetition and iteration.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let d = self.spec.d;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["rep".to_string(), "t".to_string()];
        header.extend((0..d).map(|i| format!("x{i}")));
        header.extend(["distance", "tolerance", "level"].map(String::from));
        w.write_record(&header)?;
        for run in &self.runs {
            let dist = run.distances();
            for (t, x) in run.trace.iterates.iter().enumerate() {
                let mut rec = vec![run.rep.to_string(), t.to_string()];
                rec.extend(x.iter().map(|v| v.to_string()));
                rec.push(dist[t].to_string());
                rec.push(run.trace.tolerances[t].to_string());
                rec.push(run.trace.levels[t].map(|l| l.to_string()).unwrap_or_default());
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Solves `repetitions` instances and keeps every iterate.
pub fn run_trajectory(spec: &TrajectorySpec, session: Option<&CkksSession>) -> Result<TrajectoryDataset> {
    let cap = max_iterations(spec.algorithm, spec.depth_budget, MatMulScheme::Ours);
    if spec.backend != BackendKind::PlainExact && spec.iterations > cap {
        return Err(Error::DepthExhausted(format!(
            "{} {} iterations exceed the cap of {cap}",
            spec.iterations, spec.algorithm
        )));
    }
    let mut cfg = SolverConfig::new(spec.iterations, spec.backend);
    cfg.depth_budget = spec.depth_budget;
    cfg.record_trajectory = true;
    let runs = (0..spec.repetitions)
        .map(|rep| {
            let inst = spec.instance(rep)?;
            let res = solve(&inst, spec.algorithm, &cfg, session).map_err(|e| e.with_context(format!("rep {rep}")))?;
            log::info!("trajectory rep {rep}: final tolerance {:e}", res.final_tolerance);
            Ok(TrajectoryRun {
                rep,
                instance_id: inst.id.clone(),
                x_star: inst.x_star.iter().copied().collect(),
                trace: res.trace(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(TrajectoryDataset { spec: spec.clone(), runs })
}
