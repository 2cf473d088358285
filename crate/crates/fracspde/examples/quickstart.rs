//! Minimal end-to-end run: integrate one trajectory, then estimate a moment.

use fracspde::analysis::estimate_moments;
use fracspde::noise::sample_noise;
use fracspde::solver::evolve_mild;
use fracspde::{Coefficients, Grid1D, InitialCondition, SimConfig};

fn main() -> fracspde::Result<()> {
    let grid = Grid1D::new(8.0, 256)?;
    let config = SimConfig::new(
        2.0,
        grid,
        1e-3,
        500,
        Coefficients::Additive { sigma0: 1.0 },
        InitialCondition::Constant { value: 0.0 },
        42,
    )?;
    let noise = sample_noise(config.grid(), 1e-3, 500, 42)?;
    let trajectory = evolve_mild(&config, &noise)?;
    let last = trajectory.snapshot(config.n_steps());
    let sup = last.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    println!("final sup |u| = {sup}");
    let second = estimate_moments(&config, 2.0, 0.5, 200, 42)?;
    println!("sup_x E u(0.5, x)^2 = {}", second.sup_over_grid);
    Ok(())
}
