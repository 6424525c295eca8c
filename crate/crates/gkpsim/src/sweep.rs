//! Parameter grids evaluated in parallel.

use gkp_core::{Error, Result};
use rayon::prelude::*;

/// A `l x kappa` grid for one target.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub target: String,
    pub ells: Vec<usize>,
    pub kappas: Vec<f64>,
}

impl SweepConfig {
    pub fn new(target: &str, ells: Vec<usize>, kappas: Vec<f64>) -> Result<Self> {
        if ells.is_empty() {
            return Err(Error::Parameter(format!("{target}: --l needs at least one value")));
        }
        if kappas.is_empty() {
            return Err(Error::Parameter(format!("{target}: --kappa needs at least one value")));
        }
        if let Some(l) = ells.iter().find(|&&l| l == 0) {
            return Err(Error::Parameter(format!("{target}: l must be at least 1, got {l}")));
        }
        if let Some(k) = kappas.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
            return Err(Error::Parameter(format!("{target}: kappa must be positive, got {k}")));
        }
        Ok(SweepConfig { target: target.to_lowercase(), ells, kappas })
    }

    /// Grid points, `l` major.
    pub fn grid(&self) -> Vec<(usize, f64)> {
        self.ells.iter().flat_map(|&l| self.kappas.iter().map(move |&k| (l, k))).collect()
    }

    /// Evaluates `f` at every grid point on the current rayon pool; results
    /// come back in grid order regardless of scheduling.
    pub fn run<R: Send>(&self, f: impl Fn(usize, f64) -> Result<R> + Sync) -> Result<Vec<R>> {
        self.grid().par_iter().map(|&(l, k)| f(l, k)).collect()
    }
}
