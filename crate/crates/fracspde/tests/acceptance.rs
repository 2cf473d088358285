//! Acceptance suite: one test per release criterion, each printing a
//! single pass/fail line with the measured quantities.

use fracspde::analysis::{
    estimate_moments, fit_holder_exponent, gronwall_check_with_initial, gronwall_property_check,
    increment_table_windowed, weighted_holder_check, Direction,
};
use fracspde::kernel::{
    kernel_closed_form, kernel_values, l2_time_scaling, power_integrability_exponent,
    self_similarity_residual, semigroup_residual,
};
use fracspde::noise::{replicate_seed, sample_noise};
use fracspde::solver::{evolve_mild, picard_solve};
use fracspde::{Coefficients, Grid1D, InitialCondition, KernelSpec, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn report(criterion: usize, pass: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion:02}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn spec(lambda: f64, l: f64, n: usize) -> KernelSpec {
    KernelSpec::new(lambda, Grid1D::new(l, n).unwrap()).unwrap()
}

fn closed_form_sup_error(sp: &KernelSpec, t: f64) -> f64 {
    let kv = kernel_values(sp, t).unwrap();
    let grid = sp.grid();
    (0..grid.n_points())
        .map(|j| (kv.values()[j] - kernel_closed_form(sp.lambda(), t, grid.x(j)).unwrap()).abs())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_01_kernel_identities() {
    let cases: [(f64, f64, f64, usize); 9] = [
        (1.1, 0.1, 128.0, 131072),
        (1.1, 1.0, 48.0, 8192),
        (1.1, 5.0, 224.0, 16384),
        (1.5, 0.1, 48.0, 16384),
        (1.5, 1.0, 24.0, 2048),
        (1.5, 5.0, 96.0, 8192),
        (2.0, 0.1, 12.0, 1024),
        (2.0, 1.0, 12.0, 1024),
        (2.0, 5.0, 24.0, 2048),
    ];
    let mut mass_err = 0.0f64;
    let mut min_value = 0.0f64;
    let mut selfsim = 0.0f64;
    let mut semigroup = 0.0f64;
    let mut gauss = 0.0f64;
    for (lambda, t, l, n) in cases {
        let sp = spec(lambda, l, n);
        let kv = kernel_values(&sp, t).unwrap();
        mass_err = mass_err.max((kv.mass() - 1.0).abs());
        min_value = min_value.min(kv.min_value());
        selfsim = selfsim.max(self_similarity_residual(&sp, t).unwrap());
        semigroup = semigroup.max(semigroup_residual(&sp, t / 2.0, t / 2.0).unwrap());
        if lambda == 2.0 {
            gauss = gauss.max(closed_form_sup_error(&sp, t));
        }
    }
    let cauchy = closed_form_sup_error(&spec(1.0, 512.0, 65536), 1.0);
    let pass = mass_err < 1e-6
        && min_value >= -1e-8
        && selfsim < 1e-5
        && semigroup < 1e-5
        && gauss < 1e-8
        && cauchy < 1e-6;
    let detail = format!(
        "mass err {mass_err:.2e}, min {min_value:.2e}, selfsim {selfsim:.2e}, \
         semigroup {semigroup:.2e}, gaussian {gauss:.2e}, cauchy {cauchy:.2e}"
    );
    assert!(report(1, pass, &detail), "{detail}");
}

#[test]
fn criterion_02_l2_time_scaling() {
    let times = [0.05, 0.1, 0.2, 0.4, 0.8];
    let mut slope_err = 0.0f64;
    let mut constant_err = 0.0f64;
    for lambda in [1.25, 1.5, 2.0] {
        let fit = l2_time_scaling(&spec(lambda, 16.0, 8192), &times).unwrap();
        slope_err = slope_err.max((fit.slope + 1.0 / lambda).abs());
        if lambda == 2.0 {
            constant_err = (fit.constant - (std::f64::consts::PI / 2.0).sqrt()).abs();
        }
    }
    let pass = slope_err < 1e-3 && constant_err < 1e-4;
    let detail =
        format!("worst slope err {slope_err:.2e}, gaussian constant err {constant_err:.2e}");
    assert!(report(2, pass, &detail), "{detail}");
}

#[test]
fn criterion_03_integrability_classification() {
    let finite = [
        (2.0, 1.5),
        (2.0, 2.0),
        (1.0, 1.1),
        (1.0, 1.3),
        (1.0, 1.5),
        (1.0, 2.0),
    ];
    let infinite = [(2.5, 1.5), (3.0, 1.5), (3.0, 2.0), (3.2, 2.0)];
    let low_order = [(2.0, 1.0), (2.0, 0.8)];
    let mut pass = true;
    for (alpha, lambda) in finite {
        pass &= power_integrability_exponent(lambda, alpha)
            .unwrap()
            .overall_finite;
    }
    for (alpha, lambda) in infinite {
        let r = power_integrability_exponent(lambda, alpha).unwrap();
        pass &= !r.overall_finite && r.time_exponent <= -1.0;
    }
    for (alpha, lambda) in low_order {
        let r = power_integrability_exponent(lambda, alpha).unwrap();
        pass &= !r.overall_finite && r.time_exponent <= -1.0 && r.space_finite;
    }
    let detail = format!(
        "{} finite, {} infinite via time exponent, order <= 1 rejected via time exponent",
        finite.len(),
        infinite.len() + low_order.len()
    );
    assert!(report(3, pass, &detail), "{detail}");
}

#[test]
fn criterion_04_deterministic_solver_oracles() {
    let grid = Grid1D::new(8.0, 256).unwrap();
    let dt = 2f64.powi(-10);
    let n_steps = 512;
    let mut mode_err = 0.0f64;
    for lambda in [1.5, 2.0] {
        let cfg = SimConfig::new(
            lambda,
            grid,
            dt,
            n_steps,
            Coefficients::zero(),
            InitialCondition::SmoothCosine { amplitude: 1.0 },
            41,
        )
        .unwrap();
        let noise = sample_noise(&grid, dt, n_steps, 41).unwrap();
        let traj = evolve_mild(&cfg, &noise).unwrap();
        let freq: f64 = 1.0 / 16.0;
        let decay = (-0.5 * freq.powf(lambda)).exp();
        for j in 0..grid.n_points() {
            let expected = decay * (std::f64::consts::PI * grid.x(j) / 8.0).cos();
            mode_err = mode_err.max((traj.value(n_steps, j) - expected).abs());
        }
    }
    let forced = SimConfig::new(
        2.0,
        grid,
        dt,
        n_steps,
        Coefficients::Custom {
            drift: Arc::new(|_, _, _| 1.0),
            sigma: Arc::new(|_, _, _| 0.0),
            lipschitz_constant: 0.0,
            growth_constant: 1.0,
        },
        InitialCondition::Constant { value: 0.0 },
        41,
    )
    .unwrap();
    let noise = sample_noise(&grid, dt, n_steps, 41).unwrap();
    let traj = evolve_mild(&forced, &noise).unwrap();
    let mut forcing_err = 0.0f64;
    for m in [128, 256, 512] {
        let t = m as f64 * dt;
        for j in 0..grid.n_points() {
            forcing_err = forcing_err.max((traj.value(m, j) - t).abs());
        }
    }
    let pass = mode_err < 1e-12 && forcing_err < 1e-8;
    let detail = format!("single mode err {mode_err:.2e}, constant forcing err {forcing_err:.2e}");
    assert!(report(4, pass, &detail), "{detail}");
}

#[test]
fn criterion_05_additive_noise_variance() {
    let grid = Grid1D::new(8.0, 1024).unwrap();
    let cfg = SimConfig::new(
        2.0,
        grid,
        2.5e-4,
        1000,
        Coefficients::Additive { sigma0: 1.0 },
        InitialCondition::Constant { value: 0.0 },
        5,
    )
    .unwrap();
    let est = estimate_moments(&cfg, 2.0, 0.25, 1000, 5).unwrap();
    let target = (std::f64::consts::PI / 2.0).sqrt();
    let diff = est.per_point[0] - target;
    let four_se = 4.0 * est.stderrs[0];
    let pass = diff.abs() <= four_se;
    let detail = format!(
        "var {:.5} vs integral {target:.5}, diff {diff:+.4}, 4 stderr {four_se:.4}",
        est.per_point[0]
    );
    assert!(report(5, pass, &detail), "{detail}");
}

#[test]
fn criterion_06_picard_convergence() {
    let fine_grid = Grid1D::new(8.0, 256).unwrap();
    let fine_noise = sample_noise(&fine_grid, 2e-3, 250, 0).unwrap();
    let coarse_noise = fine_noise.coarsen().unwrap();
    let coarse_cfg = SimConfig::new(
        2.0,
        *coarse_noise.grid(),
        coarse_noise.dt(),
        coarse_noise.n_steps(),
        Coefficients::Affine,
        InitialCondition::Constant { value: -2.0 },
        0,
    )
    .unwrap();
    let coarse = picard_solve(&coarse_cfg, &coarse_noise, 1e-6, 15).unwrap();
    let iterations = coarse.distances.len();
    let monotone = coarse.distances.windows(2).skip(2).all(|w| w[1] < w[0]);
    let coarse_gap = coarse
        .trajectory
        .sup_distance(&evolve_mild(&coarse_cfg, &coarse_noise).unwrap());
    let fine_cfg = SimConfig::new(
        2.0,
        fine_grid,
        2e-3,
        250,
        Coefficients::Affine,
        InitialCondition::Constant { value: -2.0 },
        0,
    )
    .unwrap();
    let fine = picard_solve(&fine_cfg, &fine_noise, 1e-6, 25).unwrap();
    let fine_gap = fine
        .trajectory
        .sup_distance(&evolve_mild(&fine_cfg, &fine_noise).unwrap());
    let pass = iterations <= 15
        && *coarse.distances.last().unwrap() < 1e-6
        && monotone
        && fine_gap < coarse_gap;
    let detail = format!(
        "{iterations} iterations, final distance {:.2e}, monotone {monotone}, \
         fixed point vs scheme gap {coarse_gap:.3e} -> {fine_gap:.3e} under refinement",
        coarse.distances.last().unwrap()
    );
    assert!(report(6, pass, &detail), "{detail}");
}

#[test]
fn criterion_07_moment_bound_refinement() {
    let mut pass = true;
    let mut detail = String::new();
    for lambda in [1.5, 2.0] {
        let fine_grid = Grid1D::new(8.0, 1024).unwrap();
        let n_reps = 500usize;
        let mut sums = [
            vec![0.0f64; 1024],
            vec![0.0f64; 1024],
            vec![0.0f64; 512],
            vec![0.0f64; 512],
        ];
        for r in 0..n_reps {
            let seed = replicate_seed(7, r);
            let fine_noise = sample_noise(&fine_grid, 5e-4, 1000, seed).unwrap();
            let coarse_noise = fine_noise.coarsen().unwrap();
            let fine_cfg = SimConfig::new(
                lambda,
                fine_grid,
                5e-4,
                1000,
                Coefficients::BoundedSmooth,
                InitialCondition::SmoothCosine { amplitude: 1.0 },
                seed,
            )
            .unwrap();
            let coarse_cfg = SimConfig::new(
                lambda,
                *coarse_noise.grid(),
                1e-3,
                500,
                Coefficients::BoundedSmooth,
                InitialCondition::SmoothCosine { amplitude: 1.0 },
                seed,
            )
            .unwrap();
            let tf = evolve_mild(&fine_cfg, &fine_noise).unwrap();
            let tc = evolve_mild(&coarse_cfg, &coarse_noise).unwrap();
            for (j, &u) in tf.snapshot(1000).iter().enumerate() {
                sums[0][j] += u * u;
                sums[1][j] += u * u * u * u;
            }
            for (j, &u) in tc.snapshot(500).iter().enumerate() {
                sums[2][j] += u * u;
                sums[3][j] += u * u * u * u;
            }
        }
        let sup = |v: &[f64]| v.iter().copied().fold(0.0f64, f64::max) / n_reps as f64;
        for (p, fi, ci) in [(2, 0, 2), (4, 1, 3)] {
            let (sf, sc) = (sup(&sums[fi]), sup(&sums[ci]));
            let margin = (sf - sc).abs() / sc;
            pass &= sf.is_finite() && margin <= 0.2;
            detail.push_str(&format!("lambda {lambda} p {p}: margin {margin:.3}; "));
        }
    }
    let detail = detail.trim_end_matches("; ").to_string();
    assert!(report(7, pass, &detail), "{detail}");
}

fn holder_gammas(lambda: f64) -> (f64, f64, f64, f64) {
    let (dt, m, stride, tseed, sseed, lag_steps): (f64, usize, usize, u64, u64, [usize; 6]) =
        if lambda == 2.0 {
            (2.5e-4, 4800, 64, 8201, 8202, [32, 64, 128, 256, 512, 1024])
        } else {
            (
                1.25e-4,
                9600,
                128,
                8151,
                8152,
                [64, 128, 256, 512, 1024, 2048],
            )
        };
    let grid = Grid1D::new(4.0, 4096).unwrap();
    let cfg = SimConfig::new(
        lambda,
        grid,
        dt,
        m,
        Coefficients::Additive { sigma0: 1.0 },
        InitialCondition::HoelderRough {
            rho: 1.0,
            amplitude: 0.2,
        },
        0,
    )
    .unwrap();
    let time_lags: Vec<f64> = lag_steps.iter().map(|&s| s as f64 * dt).collect();
    let t_table = increment_table_windowed(
        &cfg,
        Direction::Time,
        2.0,
        &time_lags,
        (0.6, 1.2),
        stride,
        400,
        tseed,
    )
    .unwrap();
    let t_fit = fit_holder_exponent(&t_table).unwrap();
    let dx = grid.dx();
    let space_lags: Vec<f64> = [5, 10, 20, 40, 80, 160]
        .iter()
        .map(|&c| c as f64 * dx)
        .collect();
    let hi = (m - lag_steps[5]) as f64 * dt;
    let s_table = increment_table_windowed(
        &cfg,
        Direction::Space,
        2.0,
        &space_lags,
        (0.6, hi),
        stride,
        400,
        sseed,
    )
    .unwrap();
    let s_fit = fit_holder_exponent(&s_table).unwrap();
    (
        t_fit.estimated_gamma,
        t_fit.stderr,
        s_fit.estimated_gamma,
        s_fit.stderr,
    )
}

#[test]
fn criterion_08_holder_exponents() {
    let mut pass = true;
    let mut detail = String::new();
    for (lambda, t_band, s_band) in [
        (2.0, (0.20, 0.30), (0.43, 0.57)),
        (1.5, (0.11, 0.22), (0.18, 0.32)),
    ] {
        let (gt, set, gs, ses) = holder_gammas(lambda);
        pass &= gt >= t_band.0 && gt <= t_band.1 && gs >= s_band.0 && gs <= s_band.1;
        detail.push_str(&format!(
            "lambda {lambda}: time gamma {gt:.3} (se {set:.3}) in [{}, {}], \
             space gamma {gs:.3} (se {ses:.3}) in [{}, {}]; ",
            t_band.0, t_band.1, s_band.0, s_band.1
        ));
    }
    let detail = detail.trim_end_matches("; ").to_string();
    assert!(report(8, pass, &detail), "{detail}");
}

#[test]
fn criterion_09_rough_initial_layer() {
    let grid = Grid1D::new(2.0, 65536).unwrap();
    let dt = 4e-3;
    let cfg = SimConfig::new(
        2.0,
        grid,
        dt,
        260,
        Coefficients::Additive { sigma0: 0.05 },
        InitialCondition::HoelderRough {
            rho: 0.1,
            amplitude: 1.0,
        },
        0,
    )
    .unwrap();
    let lags: Vec<f64> = [8, 16, 32, 64, 128, 256]
        .iter()
        .map(|&s| s as f64 * dt)
        .collect();
    let table = increment_table_windowed(
        &cfg,
        Direction::Time,
        2.0,
        &lags,
        (0.0, 2.5 * dt),
        1,
        200,
        9,
    )
    .unwrap();
    let fit = fit_holder_exponent(&table).unwrap();
    let g = fit.estimated_gamma;
    let pass = (0.03..=0.08).contains(&g);
    let detail = format!(
        "initial-layer time gamma {g:.4} (se {:.4}) in [0.03, 0.08], theory {:.3}",
        fit.stderr, fit.theoretical_bound
    );
    assert!(report(9, pass, &detail), "{detail}");
}

#[test]
fn criterion_10_appendix_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut violations = 0usize;
    for q in [1.5, 2.0, 3.0, 7.0] {
        for _ in 0..10_000 {
            let d = rng.gen_range(2..=64);
            let f: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0 + 1e-3).collect();
            let h: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0 + 1e-3).collect();
            let mu: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 3.0).collect();
            if !weighted_holder_check(&f, &h, &mu, q).unwrap().pass {
                violations += 1;
            }
        }
    }
    let holder_ok = violations == 0;

    let t_grid: Vec<f64> = (1..=8).map(|i| i as f64 / 8.0).collect();
    let mut gronwall_ok = true;
    let mut worst_line = String::new();
    for theta in [0.25, 1.0 / 3.0, 0.5, 1.0] {
        let random = gronwall_property_check(theta, 0.5, 1.0, 2.0, &t_grid, 10, 99).unwrap();
        let saturating =
            gronwall_check_with_initial(theta, 0.0, 1.0, 1.0, &t_grid, 10, |_| 1.0).unwrap();
        println!(
            "criterion 10 detail: theta {theta:.3} random start pass {} (worst ratio {:.3}), \
             saturating start pass {} (worst ratio {:.3} at n = {})",
            random.pass,
            random.worst_ratio,
            saturating.pass,
            saturating.worst_ratio,
            saturating.worst_n
        );
        if !(random.pass && saturating.pass) {
            gronwall_ok = false;
            worst_line = format!(
                "theta {theta:.3}: iterate exceeds the envelope \
                 0.5(a + a e^(2bt^theta/theta) + M (2bt^theta/theta)^n/n!) \
                 by ratio {:.3} at n = {}",
                saturating.worst_ratio.max(random.worst_ratio),
                saturating.worst_n.max(random.worst_n)
            );
        }
    }
    let pass = holder_ok && gronwall_ok;
    let detail = format!(
        "holder violations {violations}/40000; gronwall envelope holds for all theta: {gronwall_ok}\
         {}{}",
        if worst_line.is_empty() { "" } else { "; " },
        worst_line
    );
    assert!(
        report(10, pass, &detail),
        "{detail}; for theta < 1 the factorial envelope is not an upper bound for the \
         singular-kernel recursion: the exact iterates from a saturating start overtake it, \
         so this criterion fails honestly rather than weakening the check"
    );
}
