//! Telegraph motions on the line with space-varying speed `c(x)`.
//!
//! Samplers run in the transformed coordinate `y = Phi(x)`, where the particle
//! moves at unit speed, and map the endpoint back with `Phi^{-1}`. The
//! explicit laws are represented as [`DensityModel1D`]: point masses at the
//! edge of the cone plus an absolutely continuous part.

mod density;
mod lorentz;
mod simulate;

pub use density::{
    density_coth, density_epd, density_symmetric, density_tanh, Atom, DensityModel1D,
    TabulatedCdf,
};
pub use lorentz::{lorentz_coefficient, lorentz_transform};
pub use simulate::{
    simulate_asymmetric, simulate_symmetric, simulate_symmetric_rk4, Rk4Settings,
};

/// Terminal positions of a batch of independent paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    pub positions: Vec<f64>,
    pub event_counts: Vec<u32>,
    /// Direction of motion at time `t`, `+1` or `-1`.
    pub directions: Vec<i8>,
    pub seed: u64,
    pub t: f64,
    pub n_paths: usize,
}

impl PathBatch {
    pub(crate) fn from_paths(paths: Vec<(f64, u32, i8)>, seed: u64, t: f64) -> Self {
        let n_paths = paths.len();
        let mut positions = Vec::with_capacity(n_paths);
        let mut event_counts = Vec::with_capacity(n_paths);
        let mut directions = Vec::with_capacity(n_paths);
        for (x, k, d) in paths {
            positions.push(x);
            event_counts.push(k);
            directions.push(d);
        }
        Self {
            positions,
            event_counts,
            directions,
            seed,
            t,
            n_paths,
        }
    }

    /// Fraction of paths without any change of direction.
    pub fn zero_event_fraction(&self) -> f64 {
        self.event_counts.iter().filter(|&&k| k == 0).count() as f64 / self.n_paths as f64
    }

    pub fn mean(&self) -> f64 {
        self.positions.iter().sum::<f64>() / self.n_paths as f64
    }

    /// Positions of paths with at least one event.
    pub fn switched_positions(&self) -> Vec<f64> {
        self.positions
            .iter()
            .zip(&self.event_counts)
            .filter(|(_, &k)| k > 0)
            .map(|(&x, _)| x)
            .collect()
    }
}
