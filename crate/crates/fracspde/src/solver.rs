//! Mild-solution integrator for the fractional stochastic heat equation:
//! a spectral exponential-Euler scheme driven by white-noise increments,
//! plus a Picard fixed-point solver under a frozen noise realization.

use crate::error::{Error, Result};
use crate::fft::Fft1D;
use crate::grid::Grid1D;
use crate::kernel::KernelSpec;
use crate::noise::{fill_row, NoiseField, IC_STREAM};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type CoeffFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Drift and diffusion coefficients b(t,x,u) and sigma(t,x,u) together with
/// Lipschitz and linear-growth constants they are certified against.
#[derive(Clone)]
pub enum Coefficients {
    /// sigma constant, no drift; the equation is linear with additive noise.
    Additive { sigma0: f64 },
    /// sigma(u) = 1 + u/2 clipped to |sigma| <= 50, b(u) = -u.
    Affine,
    /// sigma(u) = 1 + sin(u)/2, b(u) = cos(u); both bounded and smooth.
    BoundedSmooth,
    /// User-supplied coefficient functions with declared constants.
    Custom {
        drift: CoeffFn,
        sigma: CoeffFn,
        lipschitz_constant: f64,
        growth_constant: f64,
    },
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Additive { sigma0 } => write!(f, "Additive {{ sigma0: {sigma0} }}"),
            Coefficients::Affine => write!(f, "Affine"),
            Coefficients::BoundedSmooth => write!(f, "BoundedSmooth"),
            Coefficients::Custom { lipschitz_constant, growth_constant, .. } => write!(
                f,
                "Custom {{ lipschitz_constant: {lipschitz_constant}, growth_constant: {growth_constant} }}"
            ),
        }
    }
}

impl Coefficients {
    /// Zero drift and zero diffusion; the purely deterministic linear flow.
    pub fn zero() -> Self {
        Coefficients::Custom {
            drift: Arc::new(|_, _, _| 0.0),
            sigma: Arc::new(|_, _, _| 0.0),
            lipschitz_constant: 0.0,
            growth_constant: 0.0,
        }
    }

    /// Drift coefficient b(t, x, u).
    pub fn drift(&self, t: f64, x: f64, u: f64) -> f64 {
        match self {
            Coefficients::Additive { .. } => 0.0,
            Coefficients::Affine => -u,
            Coefficients::BoundedSmooth => u.cos(),
            Coefficients::Custom { drift, .. } => drift(t, x, u),
        }
    }

    /// Diffusion coefficient sigma(t, x, u).
    pub fn sigma(&self, t: f64, x: f64, u: f64) -> f64 {
        match self {
            Coefficients::Additive { sigma0 } => *sigma0,
            Coefficients::Affine => (1.0 + 0.5 * u).clamp(-50.0, 50.0),
            Coefficients::BoundedSmooth => 1.0 + 0.5 * u.sin(),
            Coefficients::Custom { sigma, .. } => sigma(t, x, u),
        }
    }

    /// Declared joint Lipschitz constant of b and sigma in u.
    pub fn lipschitz_constant(&self) -> f64 {
        match self {
            Coefficients::Additive { .. } => 0.0,
            Coefficients::Affine => 1.0,
            Coefficients::BoundedSmooth => 1.0,
            Coefficients::Custom {
                lipschitz_constant, ..
            } => *lipschitz_constant,
        }
    }

    /// Declared constant C with |b| + |sigma| <= C (1 + |u|).
    pub fn growth_constant(&self) -> f64 {
        match self {
            Coefficients::Additive { sigma0 } => sigma0.abs(),
            Coefficients::Affine => 1.5,
            Coefficients::BoundedSmooth => 2.5,
            Coefficients::Custom {
                growth_constant, ..
            } => *growth_constant,
        }
    }

    /// Spot-checks the declared Lipschitz and growth constants on randomly
    /// sampled (t, x, u, v) tuples; returns false on the first violation.
    pub fn verify_regularity(&self, n_samples: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lip = self.lipschitz_constant();
        let growth = self.growth_constant();
        let slack = 1.0 + 1e-9;
        for _ in 0..n_samples {
            let t = rng.gen::<f64>();
            let x = 32.0 * rng.gen::<f64>() - 16.0;
            let u = 240.0 * rng.gen::<f64>() - 120.0;
            let v = 240.0 * rng.gen::<f64>() - 120.0;
            let db = (self.drift(t, x, u) - self.drift(t, x, v)).abs();
            let ds = (self.sigma(t, x, u) - self.sigma(t, x, v)).abs();
            if db > lip * (u - v).abs() * slack + 1e-12 {
                return false;
            }
            if ds > lip * (u - v).abs() * slack + 1e-12 {
                return false;
            }
            let size = self.drift(t, x, u).abs() + self.sigma(t, x, u).abs();
            if size > growth * (1.0 + u.abs()) * slack {
                return false;
            }
        }
        true
    }
}

/// Initial profile u(0, x), possibly random, realized on a grid by seed.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// The same value in every cell.
    Constant { value: f64 },
    /// One full cosine period across the domain.
    SmoothCosine { amplitude: f64 },
    /// Lacunary cosine series with decay 2^(-rho k), Hoelder exponent rho.
    HoelderRough { rho: f64, amplitude: f64 },
    /// Random low-frequency trigonometric polynomial with bounded amplitude.
    RandomField { amplitude: f64 },
}

impl InitialCondition {
    /// Hoelder regularity the construction guarantees, capped at 1.
    pub fn declared_regularity(&self) -> f64 {
        match self {
            InitialCondition::HoelderRough { rho, .. } => *rho,
            _ => 1.0,
        }
    }

    /// Evaluates the profile on the grid; random kinds draw from a stream
    /// derived from the seed that never collides with noise rows.
    pub fn realize(&self, grid: &Grid1D, seed: u64) -> Result<Vec<f64>> {
        let n = grid.n_points();
        let l = grid.half_width();
        match self {
            InitialCondition::Constant { value } => Ok(vec![*value; n]),
            InitialCondition::SmoothCosine { amplitude } => Ok((0..n)
                .map(|j| amplitude * (PI * grid.x(j) / l).cos())
                .collect()),
            InitialCondition::HoelderRough { rho, amplitude } => {
                if !(*rho > 0.0 && *rho <= 1.0) {
                    return Err(Error::invalid("rho", format!("{rho} outside (0, 1]")));
                }
                if n < 8 {
                    return Err(Error::invalid(
                        "grid",
                        "need at least 8 points for a lacunary profile".to_string(),
                    ));
                }
                let mut k_max = 0u32;
                while 2usize.pow(k_max + 1) <= n / 8 {
                    k_max += 1;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(IC_STREAM);
                let phases: Vec<f64> = (0..=k_max).map(|_| rng.gen::<f64>() * 2.0 * PI).collect();
                Ok((0..n)
                    .map(|j| {
                        let x = grid.x(j);
                        amplitude
                            * (0..=k_max)
                                .map(|k| {
                                    let freq = 2f64.powi(k as i32);
                                    2f64.powf(-rho * k as f64)
                                        * (PI * freq * x / l + phases[k as usize]).cos()
                                })
                                .sum::<f64>()
                    })
                    .collect())
            }
            InitialCondition::RandomField { amplitude } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(IC_STREAM);
                let coeffs: Vec<(f64, f64)> = (1..=8)
                    .map(|_| (2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0))
                    .collect();
                Ok((0..n)
                    .map(|j| {
                        let x = grid.x(j);
                        amplitude
                            * coeffs
                                .iter()
                                .enumerate()
                                .map(|(i, (a, b))| {
                                    let k = (i + 1) as f64;
                                    let theta = PI * k * x / l;
                                    (a * theta.cos() + b * theta.sin()) / k
                                })
                                .sum::<f64>()
                    })
                    .collect())
            }
        }
    }
}

/// Full description of one simulation: equation order, mesh, coefficients,
/// initial profile, and the seed all randomness derives from.
#[derive(Debug, Clone)]
pub struct SimConfig {
    kernel: KernelSpec,
    dt: f64,
    n_steps: usize,
    coefficients: Coefficients,
    initial: InitialCondition,
    seed: u64,
}

impl SimConfig {
    /// Validates the parameters; the equation order must lie in (1, 2].
    pub fn new(
        lambda: f64,
        grid: Grid1D,
        dt: f64,
        n_steps: usize,
        coefficients: Coefficients,
        initial: InitialCondition,
        seed: u64,
    ) -> Result<Self> {
        if !(lambda > 1.0 && lambda <= 2.0) {
            return Err(Error::invalid(
                "lambda",
                format!("{lambda} outside the supported range (1, 2]"),
            ));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", format!("{dt} is not positive")));
        }
        if n_steps == 0 {
            return Err(Error::invalid("n_steps", "must be at least 1".to_string()));
        }
        Ok(SimConfig {
            kernel: KernelSpec::new(lambda, grid)?,
            dt,
            n_steps,
            coefficients,
            initial,
            seed,
        })
    }

    /// The kernel specification (equation order plus grid).
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// The spatial grid.
    pub fn grid(&self) -> &Grid1D {
        self.kernel.grid()
    }

    /// Order of the fractional Laplacian.
    pub fn lambda(&self) -> f64 {
        self.kernel.lambda()
    }

    /// Time step.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of time steps.
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Final time n_steps * dt.
    pub fn horizon(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    /// The coefficient pair (b, sigma).
    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    /// The initial profile.
    pub fn initial(&self) -> &InitialCondition {
        &self.initial
    }

    /// Master seed.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The same configuration rekeyed with another seed, for replicates.
    pub fn with_seed(&self, seed: u64) -> SimConfig {
        let mut c = self.clone();
        c.seed = seed;
        c
    }
}

/// Solution field sampled on the space-time mesh, snapshot 0 being the
/// realized initial condition.
#[derive(Debug, Clone)]
pub struct Trajectory {
    config: SimConfig,
    data: Vec<f64>,
    max_imag_residue: f64,
}

impl Trajectory {
    /// The configuration this trajectory was produced from.
    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// The spatial grid.
    pub fn grid(&self) -> &Grid1D {
        self.config.grid()
    }

    /// Time step between snapshots.
    pub fn dt(&self) -> f64 {
        self.config.dt()
    }

    /// Seed the run derived its randomness from.
    pub fn seed(&self) -> u64 {
        self.config.seed()
    }

    /// Number of stored snapshots, n_steps + 1.
    pub fn n_snapshots(&self) -> usize {
        self.config.n_steps() + 1
    }

    /// Time of snapshot m.
    pub fn time(&self, m: usize) -> f64 {
        m as f64 * self.config.dt()
    }

    /// The field at snapshot m.
    pub fn snapshot(&self, m: usize) -> &[f64] {
        let n = self.config.grid().n_points();
        &self.data[m * n..(m + 1) * n]
    }

    /// One field value.
    pub fn value(&self, m: usize, j: usize) -> f64 {
        self.data[m * self.config.grid().n_points() + j]
    }

    /// Largest imaginary part seen before truncating any inverse transform.
    pub fn max_imag_residue(&self) -> f64 {
        self.max_imag_residue
    }

    /// Sup-norm distance to another trajectory on the same mesh.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        assert_eq!(
            self.data.len(),
            other.data.len(),
            "trajectories on different meshes"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Shared time stepper; `provide_row` fills the raw noise increments of one
/// step and `sink` receives every snapshot in order, starting with u(0).
fn run_scheme(
    config: &SimConfig,
    mut provide_row: impl FnMut(usize, &mut [f64]),
    mut sink: impl FnMut(usize, &[f64]),
) -> Result<f64> {
    let grid = *config.grid();
    let n = grid.n_points();
    let dx = grid.dx();
    let dt = config.dt();
    let fft = Fft1D::new(n);
    let decay = config.kernel().symbol(dt);
    let coeff = config.coefficients();

    let mut u = config.initial().realize(&grid, config.seed())?;
    sink(0, &u);
    let mut spectrum = fft.forward_real(&u);
    let mut raw_row = vec![0.0; n];
    let mut coeff_row = vec![0.0; n];
    let mut scratch = vec![Complex64::default(); n];
    let mut residue = 0.0f64;

    for m in 0..config.n_steps() {
        let t = m as f64 * dt;
        let mut any = false;
        for j in 0..n {
            let v = coeff.drift(t, grid.x(j), u[j]);
            coeff_row[j] = v;
            any |= v != 0.0;
        }
        if any {
            let drift_hat = fft.forward_real(&coeff_row);
            for k in 0..n {
                spectrum[k] += dt * drift_hat[k];
            }
        }
        provide_row(m, &mut raw_row);
        let mut any = false;
        for j in 0..n {
            let v = coeff.sigma(t, grid.x(j), u[j]) * raw_row[j] / dx;
            coeff_row[j] = v;
            any |= v != 0.0;
        }
        if any {
            let noise_hat = fft.forward_real(&coeff_row);
            for k in 0..n {
                spectrum[k] += noise_hat[k];
            }
        }
        for k in 0..n {
            spectrum[k] *= decay[k];
        }
        scratch.copy_from_slice(&spectrum);
        fft.inverse(&mut scratch);
        for j in 0..n {
            u[j] = scratch[j].re;
            residue = residue.max(scratch[j].im.abs());
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: m + 1 });
        }
        sink(m + 1, &u);
    }
    Ok(residue)
}

fn check_noise_shape(config: &SimConfig, noise: &NoiseField) -> Result<()> {
    let same_grid = noise.grid().n_points() == config.grid().n_points()
        && noise.grid().half_width() == config.grid().half_width();
    let same_dt = (noise.dt() - config.dt()).abs() <= 1e-12 * config.dt();
    if !same_grid || !same_dt || noise.n_steps() != config.n_steps() {
        return Err(Error::ShapeMismatch(format!(
            "noise is {} steps of dt {} on {} cells, config wants {} steps of dt {} on {}",
            noise.n_steps(),
            noise.dt(),
            noise.grid().n_points(),
            config.n_steps(),
            config.dt(),
            config.grid().n_points()
        )));
    }
    Ok(())
}

/// Integrates the mild-solution recursion over the given noise realization,
/// storing every snapshot.
pub fn evolve_mild(config: &SimConfig, noise: &NoiseField) -> Result<Trajectory> {
    check_noise_shape(config, noise)?;
    let n = config.grid().n_points();
    let mut data = Vec::with_capacity((config.n_steps() + 1) * n);
    let residue = run_scheme(
        config,
        |m, row| row.copy_from_slice(noise.row(m)),
        |_, snap| data.extend_from_slice(snap),
    )?;
    Ok(Trajectory {
        config: config.clone(),
        data,
        max_imag_residue: residue,
    })
}

/// Same scheme with noise rows generated on the fly from the config seed,
/// keeping only the requested snapshots; bit-identical to `evolve_mild`
/// over `sample_noise` with the same seed.
pub fn evolve_sampled(config: &SimConfig, snapshot_steps: &[usize]) -> Result<Vec<Vec<f64>>> {
    for pair in snapshot_steps.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::invalid(
                "snapshot_steps",
                "must be strictly increasing".to_string(),
            ));
        }
    }
    if let Some(&last) = snapshot_steps.last() {
        if last > config.n_steps() {
            return Err(Error::invalid(
                "snapshot_steps",
                format!(
                    "step {last} beyond the {} configured steps",
                    config.n_steps()
                ),
            ));
        }
    }
    let scale = (config.dt() * config.grid().dx()).sqrt();
    let seed = config.seed();
    let mut wanted = snapshot_steps.iter().peekable();
    let mut out = Vec::with_capacity(snapshot_steps.len());
    run_scheme(
        config,
        |m, row| fill_row(seed, m, scale, row),
        |m, snap| {
            if wanted.peek() == Some(&&m) {
                out.push(snap.to_vec());
                wanted.next();
            }
        },
    )?;
    Ok(out)
}

/// The zeroth Picard iterate: the initial profile transported by the
/// deterministic semigroup, no drift and no noise.
pub fn picard_initial(config: &SimConfig) -> Result<Trajectory> {
    let grid = *config.grid();
    let n = grid.n_points();
    let fft = Fft1D::new(n);
    let u0 = config.initial().realize(&grid, config.seed())?;
    let u0_hat = fft.forward_real(&u0);
    let mut data = Vec::with_capacity((config.n_steps() + 1) * n);
    data.extend_from_slice(&u0);
    let mut residue = 0.0f64;
    let mut scratch = vec![Complex64::default(); n];
    for m in 1..=config.n_steps() {
        let propagator = config.kernel().symbol(m as f64 * config.dt());
        for k in 0..n {
            scratch[k] = propagator[k] * u0_hat[k];
        }
        fft.inverse(&mut scratch);
        for v in &scratch {
            data.push(v.re);
            residue = residue.max(v.im.abs());
        }
    }
    Ok(Trajectory {
        config: config.clone(),
        data,
        max_imag_residue: residue,
    })
}

fn check_same_mesh(previous: &Trajectory, config: &SimConfig) -> Result<()> {
    let same = previous.config.grid().n_points() == config.grid().n_points()
        && previous.config.grid().half_width() == config.grid().half_width()
        && previous.config.n_steps() == config.n_steps()
        && (previous.config.dt() - config.dt()).abs() <= 1e-12 * config.dt();
    if same {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(
            "previous iterate lives on a different space-time mesh".to_string(),
        ))
    }
}

/// One Picard step: evaluates the mild-solution integrals with the
/// coefficients frozen at the previous iterate, trapezoidal in the drift
/// lag and left-endpoint in the noise lag.
pub fn picard_iterate(
    previous: &Trajectory,
    config: &SimConfig,
    noise: &NoiseField,
) -> Result<Trajectory> {
    check_same_mesh(previous, config)?;
    check_noise_shape(config, noise)?;
    let grid = *config.grid();
    let n = grid.n_points();
    let dx = grid.dx();
    let dt = config.dt();
    let steps = config.n_steps();
    let fft = Fft1D::new(n);
    let coeff = config.coefficients();

    let propagators: Vec<Vec<f64>> = (0..=steps)
        .map(|m| config.kernel().symbol(m as f64 * dt))
        .collect();

    let transform_row = |row: &[f64]| -> Option<Vec<Complex64>> {
        if row.iter().all(|&v| v == 0.0) {
            None
        } else {
            Some(fft.forward_real(row))
        }
    };
    let mut drift_hats = Vec::with_capacity(steps + 1);
    let mut noise_hats = Vec::with_capacity(steps);
    let mut row = vec![0.0; n];
    for l in 0..=steps {
        let t = l as f64 * dt;
        let snap = previous.snapshot(l);
        for j in 0..n {
            row[j] = coeff.drift(t, grid.x(j), snap[j]);
        }
        drift_hats.push(transform_row(&row));
        if l < steps {
            let dw = noise.row(l);
            for j in 0..n {
                row[j] = coeff.sigma(t, grid.x(j), snap[j]) * dw[j] / dx;
            }
            noise_hats.push(transform_row(&row));
        }
    }

    let u0_hat = fft.forward_real(previous.snapshot(0));
    let mut data = Vec::with_capacity((steps + 1) * n);
    data.extend_from_slice(previous.snapshot(0));
    let mut residue = 0.0f64;
    let mut acc = vec![Complex64::default(); n];
    for m in 1..=steps {
        for k in 0..n {
            acc[k] = propagators[m][k] * u0_hat[k];
        }
        for l in 0..=m {
            if let Some(hat) = &drift_hats[l] {
                let weight = if l == 0 || l == m { 0.5 * dt } else { dt };
                let prop = &propagators[m - l];
                for k in 0..n {
                    acc[k] += weight * prop[k] * hat[k];
                }
            }
        }
        for l in 0..m {
            if let Some(hat) = &noise_hats[l] {
                let prop = &propagators[m - l];
                for k in 0..n {
                    acc[k] += prop[k] * hat[k];
                }
            }
        }
        fft.inverse(&mut acc);
        for v in &acc {
            data.push(v.re);
            residue = residue.max(v.im.abs());
        }
        if data[m * n..].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: m });
        }
    }
    Ok(Trajectory {
        config: config.clone(),
        data,
        max_imag_residue: residue,
    })
}

/// Outcome of the Picard fixed-point solve: the converged iterate and the
/// sup-distance between consecutive iterates.
#[derive(Debug, Clone)]
pub struct PicardResult {
    pub trajectory: Trajectory,
    pub distances: Vec<f64>,
}

/// Iterates `picard_iterate` from the semigroup flow of the initial profile
/// until consecutive iterates are closer than `tol` in sup norm.
pub fn picard_solve(
    config: &SimConfig,
    noise: &NoiseField,
    tol: f64,
    max_iter: usize,
) -> Result<PicardResult> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("{tol} is not positive")));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter", "must be at least 1".to_string()));
    }
    let mut prev = picard_initial(config)?;
    let mut distances = Vec::new();
    for _ in 0..max_iter {
        let next = picard_iterate(&prev, config, noise)?;
        let dist = next.sup_distance(&prev);
        distances.push(dist);
        prev = next;
        if dist < tol {
            return Ok(PicardResult {
                trajectory: prev,
                distances,
            });
        }
    }
    Err(Error::NoConvergence { distances })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::sample_noise;

    fn grid(l: f64, n: usize) -> Grid1D {
        Grid1D::new(l, n).unwrap()
    }

    fn config(
        lambda: f64,
        g: Grid1D,
        dt: f64,
        n_steps: usize,
        coefficients: Coefficients,
        initial: InitialCondition,
        seed: u64,
    ) -> SimConfig {
        SimConfig::new(lambda, g, dt, n_steps, coefficients, initial, seed).unwrap()
    }

    fn matching_noise(c: &SimConfig) -> NoiseField {
        sample_noise(c.grid(), c.dt(), c.n_steps(), c.seed()).unwrap()
    }

    #[test]
    fn order_outside_one_two_rejected() {
        for lambda in [2.5, 1.0, 0.8] {
            let err = SimConfig::new(
                lambda,
                grid(8.0, 64),
                0.01,
                10,
                Coefficients::zero(),
                InitialCondition::Constant { value: 0.0 },
                1,
            )
            .unwrap_err();
            assert!(err.to_string().contains("(1, 2]"), "{err}");
        }
    }

    #[test]
    fn single_mode_decays_at_symbol_rate() {
        let g = grid(8.0, 64);
        let c = config(
            1.5,
            g,
            0.05,
            10,
            Coefficients::zero(),
            InitialCondition::SmoothCosine { amplitude: 1.0 },
            1,
        );
        let traj = evolve_mild(&c, &matching_noise(&c)).unwrap();
        let omega = (1.0 / 16.0f64).powf(1.5);
        for m in 0..=10 {
            let factor = (-(m as f64) * 0.05 * omega).exp();
            for j in 0..64 {
                let want = factor * (PI * g.x(j) / 8.0).cos();
                assert!((traj.value(m, j) - want).abs() < 1e-12 * factor.max(1e-3));
            }
        }
    }

    #[test]
    fn constant_forcing_grows_linearly() {
        let c = config(
            2.0,
            grid(4.0, 32),
            0.01,
            25,
            Coefficients::Custom {
                drift: Arc::new(|_, _, _| 1.0),
                sigma: Arc::new(|_, _, _| 0.0),
                lipschitz_constant: 0.0,
                growth_constant: 1.0,
            },
            InitialCondition::Constant { value: 0.0 },
            2,
        );
        let traj = evolve_mild(&c, &matching_noise(&c)).unwrap();
        for m in 0..=25 {
            for j in 0..32 {
                assert!((traj.value(m, j) - m as f64 * 0.01).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_linear_step_equals_many() {
        let g = grid(8.0, 64);
        let ic = InitialCondition::RandomField { amplitude: 1.0 };
        let fine = config(1.5, g, 0.2, 5, Coefficients::zero(), ic.clone(), 3);
        let coarse = config(1.5, g, 1.0, 1, Coefficients::zero(), ic, 3);
        let a = evolve_mild(&fine, &matching_noise(&fine)).unwrap();
        let b = evolve_mild(&coarse, &matching_noise(&coarse)).unwrap();
        for j in 0..64 {
            assert!((a.value(5, j) - b.value(1, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_inputs_give_bit_identical_trajectories() {
        let c = config(
            1.8,
            grid(4.0, 64),
            0.01,
            20,
            Coefficients::Affine,
            InitialCondition::HoelderRough {
                rho: 0.5,
                amplitude: 1.0,
            },
            7,
        );
        let noise = matching_noise(&c);
        let a = evolve_mild(&c, &noise).unwrap();
        let b = evolve_mild(&c, &noise).unwrap();
        for m in 0..=20 {
            for j in 0..64 {
                assert_eq!(a.value(m, j).to_bits(), b.value(m, j).to_bits());
            }
        }
        assert!(a.max_imag_residue() < 1e-10);
    }

    #[test]
    fn streamed_snapshots_match_materialized_run() {
        let c = config(
            1.8,
            grid(4.0, 64),
            0.01,
            20,
            Coefficients::BoundedSmooth,
            InitialCondition::RandomField { amplitude: 0.5 },
            9,
        );
        let full = evolve_mild(&c, &matching_noise(&c)).unwrap();
        let sampled = evolve_sampled(&c, &[0, 7, 20]).unwrap();
        for (want_m, got) in [0usize, 7, 20].into_iter().zip(&sampled) {
            for j in 0..64 {
                assert_eq!(got[j].to_bits(), full.value(want_m, j).to_bits());
            }
        }
    }

    #[test]
    fn sampled_steps_validated() {
        let c = config(
            2.0,
            grid(4.0, 32),
            0.01,
            10,
            Coefficients::zero(),
            InitialCondition::Constant { value: 0.0 },
            1,
        );
        assert!(evolve_sampled(&c, &[3, 3]).is_err());
        assert!(evolve_sampled(&c, &[0, 11]).is_err());
    }

    #[test]
    fn mismatched_noise_rejected() {
        let c = config(
            2.0,
            grid(4.0, 32),
            0.01,
            10,
            Coefficients::zero(),
            InitialCondition::Constant { value: 0.0 },
            1,
        );
        let wrong_steps = sample_noise(c.grid(), 0.01, 11, 1).unwrap();
        let wrong_cells = sample_noise(&grid(4.0, 64), 0.01, 10, 1).unwrap();
        assert!(matches!(
            evolve_mild(&c, &wrong_steps),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            evolve_mild(&c, &wrong_cells),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn coarsened_noise_drives_coarse_mesh() {
        let fine = config(
            2.0,
            grid(4.0, 64),
            0.01,
            20,
            Coefficients::Affine,
            InitialCondition::Constant { value: -1.0 },
            5,
        );
        let coarse_noise = matching_noise(&fine).coarsen().unwrap();
        let coarse = config(
            2.0,
            grid(4.0, 32),
            0.02,
            10,
            Coefficients::Affine,
            InitialCondition::Constant { value: -1.0 },
            5,
        );
        let traj = evolve_mild(&coarse, &coarse_noise).unwrap();
        assert!(traj.snapshot(10).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn blow_up_reports_offending_step() {
        let c = config(
            2.0,
            grid(4.0, 32),
            0.5,
            50,
            Coefficients::Custom {
                drift: Arc::new(|_, _, u| u * u * u),
                sigma: Arc::new(|_, _, _| 0.0),
                lipschitz_constant: f64::MAX,
                growth_constant: f64::MAX,
            },
            InitialCondition::Constant { value: 10.0 },
            1,
        );
        match evolve_mild(&c, &matching_noise(&c)) {
            Err(Error::NonFinite { step }) => assert!(step >= 1 && step <= 50),
            other => panic!("expected non-finite abort, got {other:?}"),
        }
    }

    #[test]
    fn presets_pass_regularity_spot_checks() {
        for coeff in [
            Coefficients::Additive { sigma0: 1.0 },
            Coefficients::Affine,
            Coefficients::BoundedSmooth,
        ] {
            assert!(coeff.verify_regularity(10_000, 17), "{coeff:?}");
        }
    }

    #[test]
    fn affine_diffusion_is_clipped() {
        let c = Coefficients::Affine;
        assert_eq!(c.sigma(0.0, 0.0, 1000.0), 50.0);
        assert_eq!(c.sigma(0.0, 0.0, -1000.0), -50.0);
        assert_eq!(c.drift(0.0, 0.0, 3.0), -3.0);
    }

    #[test]
    fn initial_profiles_realize_as_declared() {
        let g = grid(8.0, 256);
        let flat = InitialCondition::Constant { value: 2.5 }
            .realize(&g, 1)
            .unwrap();
        assert!(flat.iter().all(|&v| v == 2.5));

        let smooth = InitialCondition::SmoothCosine { amplitude: 3.0 }
            .realize(&g, 1)
            .unwrap();
        assert!((smooth[0] - 3.0).abs() < 1e-12);
        assert!((smooth[128] + 3.0).abs() < 1e-12);

        let rough = InitialCondition::HoelderRough {
            rho: 0.5,
            amplitude: 1.0,
        };
        let a = rough.realize(&g, 4).unwrap();
        let b = rough.realize(&g, 4).unwrap();
        let c = rough.realize(&g, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(rough.declared_regularity(), 0.5);

        let field = InitialCondition::RandomField { amplitude: 1.0 }
            .realize(&g, 6)
            .unwrap();
        let bound = 2.0 * (1..=8).map(|k| 1.0 / k as f64).sum::<f64>();
        assert!(field.iter().all(|&v| v.abs() <= bound));
    }

    #[test]
    fn lacunary_profile_is_band_limited() {
        let g = grid(8.0, 256);
        let field = InitialCondition::HoelderRough {
            rho: 0.3,
            amplitude: 1.0,
        }
        .realize(&g, 9)
        .unwrap();
        let fft = Fft1D::new(256);
        let spectrum = fft.forward_real(&field);
        for k in 33..=128 {
            assert!(spectrum[k].norm() < 1e-9 * 256.0, "mode {k} populated");
            assert!(spectrum[256 - k].norm() < 1e-9 * 256.0);
        }
    }

    #[test]
    fn lacunary_profile_validates_input() {
        let g = grid(8.0, 256);
        assert!(InitialCondition::HoelderRough {
            rho: 0.0,
            amplitude: 1.0
        }
        .realize(&g, 1)
        .is_err());
        assert!(InitialCondition::HoelderRough {
            rho: 1.5,
            amplitude: 1.0
        }
        .realize(&g, 1)
        .is_err());
        assert!(InitialCondition::HoelderRough {
            rho: 0.5,
            amplitude: 1.0
        }
        .realize(&grid(1.0, 4), 1)
        .is_err());
    }

    #[test]
    fn picard_zero_coefficients_fixed_after_one_iterate() {
        let c = config(
            1.5,
            grid(4.0, 32),
            0.02,
            10,
            Coefficients::zero(),
            InitialCondition::SmoothCosine { amplitude: 1.0 },
            1,
        );
        let result = picard_solve(&c, &matching_noise(&c), 1e-6, 5).unwrap();
        assert_eq!(result.distances, vec![0.0]);
        let base = picard_initial(&c).unwrap();
        assert_eq!(result.trajectory.sup_distance(&base), 0.0);
    }

    #[test]
    fn picard_converges_for_affine_preset() {
        let c = config(
            2.0,
            grid(4.0, 32),
            0.02,
            10,
            Coefficients::Affine,
            InitialCondition::Constant { value: -1.0 },
            11,
        );
        let result = picard_solve(&c, &matching_noise(&c), 1e-6, 30).unwrap();
        assert!(*result.distances.last().unwrap() < 1e-6);
        for pair in result.distances[2..].windows(2) {
            assert!(
                pair[1] < pair[0],
                "distances not decaying: {:?}",
                result.distances
            );
        }
    }

    #[test]
    fn picard_mesh_mismatch_rejected() {
        let c10 = config(
            2.0,
            grid(4.0, 32),
            0.02,
            10,
            Coefficients::Affine,
            InitialCondition::Constant { value: 0.0 },
            1,
        );
        let c20 = config(
            2.0,
            grid(4.0, 32),
            0.02,
            20,
            Coefficients::Affine,
            InitialCondition::Constant { value: 0.0 },
            1,
        );
        let base = picard_initial(&c10).unwrap();
        let err = picard_iterate(&base, &c20, &matching_noise(&c20)).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch(_)));
    }

    #[test]
    fn nonconvergence_reports_distance_sequence() {
        let c = config(
            2.0,
            grid(4.0, 32),
            0.02,
            10,
            Coefficients::Affine,
            InitialCondition::Constant { value: -1.0 },
            11,
        );
        match picard_solve(&c, &matching_noise(&c), 1e-30, 3) {
            Err(Error::NoConvergence { distances }) => assert_eq!(distances.len(), 3),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
