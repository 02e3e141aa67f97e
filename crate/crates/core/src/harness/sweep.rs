//! Median tolerance of GD and AGD over a grid of dimensions and condition
//! numbers.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{derive_seed, quantile};
use crate::error::{Error, Result};
use crate::probgen::{make_instance, EigenProfile, GenSpec};
use crate::solver::{max_iterations, solve, Algorithm, BackendKind, CkksSession, MatMulScheme, SolverConfig};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub dims: Vec<usize>,
    pub kappas: Vec<f64>,
    pub repetitions: usize,
    pub backend: BackendKind,
    pub gd_iterations: usize,
    pub agd_iterations: usize,
    pub seed: u64,
    pub eigen_profile: EigenProfile,
    pub depth_budget: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            dims: vec![2, 4, 8],
            kappas: vec![1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0],
            repetitions: 100,
            backend: BackendKind::PlainExact,
            gd_iterations: 9,
            agd_iterations: 6,
            seed: DEFAULT_SEED,
            eigen_profile: EigenProfile::UniformSpread,
            depth_budget: 18,
        }
    }
}

impl SweepSpec {
    /// Defaults with 20 repetitions.
    pub fn ci() -> Self {
        Self { repetitions: 20, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (alg, n) in [(Algorithm::Gd, self.gd_iterations), (Algorithm::Agd, self.agd_iterations)] {
            let cap = max_iterations(alg, self.depth_budget, MatMulScheme::Ours);
            if n > cap {
                return Err(Error::DepthExhausted(format!(
                    "{n} {alg} iterations exceed the cap of {cap} for depth {}",
                    self.depth_budget
                )));
            }
        }
        if self.repetitions == 0 {
            return Err(Error::contract("a sweep needs at least one repetition"));
        }
        Ok(())
    }

    fn iterations(&self, alg: Algorithm) -> usize {
        match alg {
            Algorithm::Gd => self.gd_iterations,
            Algorithm::Agd => self.agd_iterations,
        }
    }
}

/// One `(d, κ, algorithm)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: usize,
    pub kappa: f64,
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub backend: BackendKind,
    pub median_tol: f64,
    pub q1_tol: f64,
    pub q3_tol: f64,
    /// Lower median than the other algorithm in the same cell.
    pub winner: bool,
    pub seed: u64,
}

/// How instances were drawn, so results can be read in context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub repetitions: usize,
    pub eigen_profile: EigenProfile,
    pub spectrum: String,
    pub x_star_distribution: String,
    pub start_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub metadata: SweepMetadata,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn row(&self, d: usize, kappa: f64, algorithm: Algorithm) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.d == d && r.kappa == kappa && r.algorithm == algorithm)
    }
}

/// Runs every cell. Each repetition draws its instance from a seed derived
/// from `(seed, d, κ, repetition)`, so the schedule never changes results.
pub fn run_sweep(spec: &SweepSpec, session: Option<&CkksSession>) -> Result<SweepReport> {
    spec.validate()?;
    let jobs: Vec<(usize, f64, usize)> = spec
        .dims
        .iter()
        .flat_map(|&d| spec.kappas.iter().flat_map(move |&k| (0..spec.repetitions).map(move |r| (d, k, r))))
        .collect();
    let run = |&(d, kappa, rep): &(usize, f64, usize)| -> Result<[f64; 2]> {
        let gen = GenSpec { d, kappa, seed: derive_seed(spec.seed, d, kappa, rep), eigen_profile: spec.eigen_profile };
        let inst = make_instance(&gen)?;
        let mut out = [0.0; 2];
        for (slot, alg) in [Algorithm::Gd, Algorithm::Agd].into_iter().enumerate() {
            let mut cfg = SolverConfig::new(spec.iterations(alg), spec.backend);
            cfg.depth_budget = spec.depth_budget;
            out[slot] = solve(&inst, alg, &cfg, session)
                .map_err(|e| e.with_context(format!("cell d={d} κ={kappa} rep={rep} {alg}")))?
                .final_tolerance;
        }
        Ok(out)
    };
    let results: Vec<[f64; 2]> = if spec.backend == BackendKind::Ckks {
        jobs.iter().map(run).collect::<Result<_>>()?
    } else {
        jobs.par_iter().map(run).collect::<Result<_>>()?
    };

    let mut rows = Vec::new();
    for &d in &spec.dims {
        for &kappa in &spec.kappas {
            let tols: Vec<&[f64; 2]> =
                jobs.iter().zip(&results).filter(|((jd, jk, _), _)| *jd == d && *jk == kappa).map(|(_, r)| r).collect();
            let mut cell = Vec::new();
            for (slot, alg) in [Algorithm::Gd, Algorithm::Agd].into_iter().enumerate() {
                let v: Vec<f64> = tols.iter().map(|t| t[slot]).collect();
                cell.push(SweepRow {
                    d,
                    kappa,
                    algorithm: alg,
                    iterations: spec.iterations(alg),
                    backend: spec.backend,
                    median_tol: quantile(&v, 0.5),
                    q1_tol: quantile(&v, 0.25),
                    q3_tol: quantile(&v, 0.75),
                    winner: false,
                    seed: spec.seed,
                });
            }
            cell[0].winner = cell[0].median_tol < cell[1].median_tol;
            cell[1].winner = cell[1].median_tol < cell[0].median_tol;
            rows.extend(cell);
        }
    }
    Ok(SweepReport {
        metadata: SweepMetadata {
            repetitions: spec.repetitions,
            eigen_profile: spec.eigen_profile,
            spectrum: "lambda_min = 1, lambda_max = kappa".into(),
            x_star_distribution: "uniform in [-1, 1]^d".into(),
            start_distance: 1.0,
        },
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// Picks JSON for a `.json` extension and CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    d: usize,
    kappa: f64,
    algorithm: String,
    iterations: usize,
    backend: String,
    median_tol: f64,
    q1_tol: f64,
    q3_tol: f64,
    winner: bool,
    seed: u64,
}

const CSV_HEADER: [&str; 10] =
    ["d", "kappa", "algorithm", "iterations", "backend", "median_tol", "q1_tol", "q3_tol", "winner", "seed"];

/// Writes the report rows as CSV, or the whole report as JSON.
pub fn emit(report: &SweepReport, format: OutputFormat, mut out: impl Write) -> Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in &report.rows {
                w.serialize(CsvRow {
                    d: r.d,
                    kappa: r.kappa,
                    algorithm: r.algorithm.name().into(),
                    iterations: r.iterations,
                    backend: r.backend.name().into(),
                    median_tol: r.median_tol,
                    q1_tol: r.q1_tol,
                    q3_tol: r.q3_tol,
                    winner: r.winner,
                    seed: r.seed,
                })?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Reads rows written by [`emit`] in CSV form.
pub fn parse_csv(input: impl std::io::Read) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != CSV_HEADER {
        return Err(Error::Format(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize::<CsvRow>()
        .map(|row| {
            let row = row?;
            Ok(SweepRow {
                d: row.d,
                kappa: row.kappa,
                algorithm: row.algorithm.parse()?,
                iterations: row.iterations,
                backend: row.backend.parse()?,
                median_tol: row.median_tol,
                q1_tol: row.q1_tol,
                q3_tol: row.q3_tol,
                winner: row.winner,
                seed: row.seed,
            })
        })
        .collect()
}
