//! Discrete space-time white noise: independent N(0, dt*dx) increments per
//! (step, cell), reproducibly addressed by (seed, step) streams, plus the
//! Brownian-sheet covariance oracle and its empirical estimator.

use crate::error::{Error, Result};
use crate::grid::Grid1D;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Stream id reserved for initial-condition randomness so it never collides
/// with a noise row.
pub(crate) const IC_STREAM: u64 = 1 << 63;

/// Derives the seed for one Monte Carlo replicate from the experiment seed
/// by a splitmix64 scramble, keeping replicate streams well separated.
pub fn replicate_seed(seed: u64, replicate: usize) -> u64 {
    let mut z = seed ^ (replicate as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fills one row of increments: cell j of step m is draw j of the ChaCha8
/// stream keyed by (seed, m), scaled to standard deviation `scale`.
pub(crate) fn fill_row(seed: u64, step: usize, scale: f64, row: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(step as u64);
    for slot in row.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *slot = scale * z;
    }
}

/// White-noise increment sheet: entry (m, j) is the increment over time cell
/// m and space cell j, with variance dt*dx.
#[derive(Debug, Clone)]
pub struct NoiseField {
    grid: Grid1D,
    dt: f64,
    n_steps: usize,
    seed: u64,
    increments: Vec<f64>,
}

impl NoiseField {
    /// The spatial grid.
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Time step of each increment row.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of time steps.
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Seed the sheet was generated from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Configured variance of a single increment.
    pub fn increment_variance(&self) -> f64 {
        self.dt * self.grid.dx()
    }

    /// One increment.
    pub fn increment(&self, step: usize, cell: usize) -> f64 {
        self.increments[step * self.grid.n_points() + cell]
    }

    /// All increments of one time step.
    pub fn row(&self, step: usize) -> &[f64] {
        let n = self.grid.n_points();
        &self.increments[step * n..(step + 1) * n]
    }

    /// Aggregates 2x2 blocks (time pairs by space pairs) into the increment
    /// sheet of the twice-coarser mesh, for common-random-number refinement
    /// studies; the result is the exact coarse-mesh noise realization.
    pub fn coarsen(&self) -> Result<NoiseField> {
        let n = self.grid.n_points();
        if self.n_steps % 2 != 0 || n % 4 != 0 {
            return Err(Error::ShapeMismatch(format!(
                "cannot halve {} steps x {} cells",
                self.n_steps, n
            )));
        }
        let coarse_grid = Grid1D::new(self.grid.half_width(), n / 2)?;
        let mut out = vec![0.0; (self.n_steps / 2) * (n / 2)];
        for m in 0..self.n_steps / 2 {
            for j in 0..n / 2 {
                out[m * (n / 2) + j] = self.increment(2 * m, 2 * j)
                    + self.increment(2 * m, 2 * j + 1)
                    + self.increment(2 * m + 1, 2 * j)
                    + self.increment(2 * m + 1, 2 * j + 1);
            }
        }
        Ok(NoiseField {
            grid: coarse_grid,
            dt: 2.0 * self.dt,
            n_steps: self.n_steps / 2,
            seed: self.seed,
            increments: out,
        })
    }
}

/// Samples a full increment sheet; regeneration from the same arguments is
/// bit-identical, and rows may be regenerated independently by step index.
pub fn sample_noise(grid: &Grid1D, dt: f64, n_steps: usize, seed: u64) -> Result<NoiseField> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("{dt} is not positive")));
    }
    if n_steps == 0 {
        return Err(Error::invalid("n_steps", "must be at least 1".to_string()));
    }
    let n = grid.n_points();
    let scale = (dt * grid.dx()).sqrt();
    let mut increments = vec![0.0; n_steps * n];
    for (m, row) in increments.chunks_mut(n).enumerate() {
        fill_row(seed, m, scale, row);
    }
    Ok(NoiseField {
        grid: *grid,
        dt,
        n_steps,
        seed,
        increments,
    })
}

/// Brownian-sheet covariance E[W(t,x) W(s,y)] = (s ^ t)(|x|+|y|-|x-y|)/2.
pub fn sheet_covariance(s: f64, t: f64, x: f64, y: f64) -> f64 {
    0.5 * s.min(t) * (x.abs() + y.abs() - (x - y).abs())
}

/// One row of the empirical covariance table.
#[derive(Debug, Clone, Copy)]
pub struct CovarianceEntry {
    pub point_a: (f64, f64),
    pub point_b: (f64, f64),
    pub analytic: f64,
    pub empirical: f64,
    pub stderr: f64,
}

/// Sheet value W(t, x) reconstructed from increments by signed cumulative
/// sums from the origin; x < 0 sums the cells in [x, 0) with a minus sign.
fn sheet_value(field: &NoiseField, t: f64, x: f64) -> f64 {
    let grid = field.grid();
    let n = grid.n_points();
    let steps = (t / field.dt()).round() as usize;
    let cells = (x.abs() / grid.dx()).round() as usize;
    let mut acc = 0.0;
    for m in 0..steps {
        let row = field.row(m);
        if x >= 0.0 {
            acc += row[..cells].iter().sum::<f64>();
        } else {
            acc -= row[n - cells..].iter().sum::<f64>();
        }
    }
    acc
}

/// Estimates covariances of the reconstructed sheet at the given point
/// pairs over independent replicates, against the analytic oracle.
pub fn empirical_sheet_covariance(
    grid: &Grid1D,
    dt: f64,
    n_steps: usize,
    n_replicates: usize,
    pairs: &[((f64, f64), (f64, f64))],
    seed: u64,
) -> Result<Vec<CovarianceEntry>> {
    if n_replicates < 100 {
        return Err(Error::invalid(
            "n_replicates",
            "need at least 100".to_string(),
        ));
    }
    let horizon = dt * n_steps as f64;
    for &((s, x), (t, y)) in pairs {
        if s < 0.0 || t < 0.0 || s > horizon || t > horizon {
            return Err(Error::invalid(
                "pairs",
                format!("time outside [0, {horizon}]"),
            ));
        }
        if x.abs() > grid.half_width() || y.abs() > grid.half_width() {
            return Err(Error::invalid(
                "pairs",
                "position outside the grid".to_string(),
            ));
        }
    }
    let mut sums = vec![0.0f64; pairs.len()];
    let mut sq_sums = vec![0.0f64; pairs.len()];
    for r in 0..n_replicates {
        let field = sample_noise(grid, dt, n_steps, replicate_seed(seed, r))?;
        for (i, &((s, x), (t, y))) in pairs.iter().enumerate() {
            let product = sheet_value(&field, s, x) * sheet_value(&field, t, y);
            sums[i] += product;
            sq_sums[i] += product * product;
        }
    }
    let nr = n_replicates as f64;
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let mean = sums[i] / nr;
            let var = (sq_sums[i] / nr - mean * mean).max(0.0);
            CovarianceEntry {
                point_a: a,
                point_b: b,
                analytic: sheet_covariance(a.0, b.0, a.1, b.1),
                empirical: mean,
                stderr: (var / nr).sqrt(),
            }
        })
        .collect())
}
