use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::instance::QpInstance;

/// Per-iteration record of a solver run, starting with `x0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub iterates: Vec<Vec<f64>>,
    /// `f(x_t) − f(x*)`.
    pub tolerances: Vec<f64>,
    /// Levels left on the iterate; absent for unlevelled backends.
    pub levels: Vec<Option<usize>>,
    /// Wall-clock seconds spent producing each iterate.
    pub seconds: Vec<f64>,
}

impl Trace {
    pub fn push(&mut self, inst: &QpInstance, x: &DVector<f64>, level: Option<usize>, seconds: f64) {
        self.iterates.push(x.iter().copied().collect());
        self.tolerances.push(inst.tolerance(x));
        self.levels.push(level);
        self.seconds.push(seconds);
    }

    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn last(&self) -> Option<DVector<f64>> {
        self.iterates.last().map(|x| DVector::from_column_slice(x))
    }

    pub fn final_tolerance(&self) -> Option<f64> {
        self.tolerances.last().copied()
    }

    /// `‖x_t − x*‖₂` for every recorded iterate.
    pub fn distances(&self, inst: &QpInstance) -> Vec<f64> {
        self.iterates.iter().map(|x| (DVector::from_column_slice(x) - &inst.x_star).norm()).collect()
    }

    /// Largest `∞`-norm gap between matching iterates.
    pub fn max_gap(&self, other: &Trace) -> f64 {
        self.iterates
            .iter()
            .zip(&other.iterates)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}
