//! Monte Carlo estimation of moment bounds and increment-scaling exponents,
//! plus executable forms of the weighted Hoelder inequality and the
//! singular-kernel Gronwall recursion with its closed-form envelope.

use crate::error::{Error, Result};
use crate::noise::replicate_seed;
use crate::solver::{evolve_sampled, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;

/// Largest admissible Hoelder exponents in time (alpha) and space (beta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    pub alpha_max: f64,
    pub beta_max: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 1.0 && lambda <= 2.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "lambda",
            format!("{lambda} outside the supported range (1, 2]"),
        ))
    }
}

/// Admissible exponents for initial data of regularity rho:
/// alpha < rho/lambda ^ (lambda-1)/(2 lambda), beta < rho ^ (lambda-1)/2.
pub fn theoretical_exponents(lambda: f64, rho: f64) -> Result<ExponentPair> {
    check_lambda(lambda)?;
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::invalid("rho", format!("{rho} outside (0, 1]")));
    }
    Ok(ExponentPair {
        alpha_max: (rho / lambda).min((lambda - 1.0) / (2.0 * lambda)),
        beta_max: rho.min((lambda - 1.0) / 2.0),
    })
}

/// Interior-time exponents free of the initial-data limitation.
pub fn remark_exponents(lambda: f64) -> Result<ExponentPair> {
    check_lambda(lambda)?;
    Ok(ExponentPair {
        alpha_max: (lambda - 1.0) / (2.0 * lambda),
        beta_max: (lambda - 1.0) / 2.0,
    })
}

/// Empirical p-th absolute moment of the solution field at one time.
#[derive(Debug, Clone)]
pub struct MomentEstimate {
    pub p: f64,
    pub t: f64,
    pub sup_over_grid: f64,
    pub per_point: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub n_replicates: usize,
}

fn mesh_index(value: f64, unit: f64, what: &'static str) -> Result<usize> {
    if value < 0.0 {
        return Err(Error::invalid(what, format!("{value} is negative")));
    }
    let ratio = value / unit;
    let index = ratio.round();
    if (ratio - index).abs() > 1e-6 * index.max(1.0) {
        return Err(Error::invalid(
            what,
            format!("{value} is not a multiple of {unit}"),
        ));
    }
    Ok(index as usize)
}

/// Estimates E|u(t, x_j)|^p per grid point over independent replicates,
/// together with the grid supremum of the estimates.
pub fn estimate_moments(
    config: &SimConfig,
    p: f64,
    t: f64,
    n_replicates: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    if !(p >= 1.0) {
        return Err(Error::invalid("p", format!("{p} is below 1")));
    }
    if n_replicates < 100 {
        return Err(Error::invalid(
            "n_replicates",
            "need at least 100".to_string(),
        ));
    }
    let step = mesh_index(t, config.dt(), "t")?;
    if step > config.n_steps() {
        return Err(Error::invalid("t", format!("{t} is beyond the horizon")));
    }
    let rows: Vec<Vec<f64>> = (0..n_replicates)
        .into_par_iter()
        .map(|r| {
            let cfg = config.with_seed(replicate_seed(seed, r));
            let snaps = evolve_sampled(&cfg, &[step]).map_err(|e| Error::ReplicateFailed {
                replicate: r,
                source: Box::new(e),
            })?;
            Ok(snaps
                .into_iter()
                .next()
                .unwrap()
                .iter()
                .map(|u| u.abs().powf(p))
                .collect())
        })
        .collect::<Result<_>>()?;
    let n = config.grid().n_points();
    let mut sum = vec![0.0f64; n];
    let mut sumsq = vec![0.0f64; n];
    for row in &rows {
        for j in 0..n {
            sum[j] += row[j];
            sumsq[j] += row[j] * row[j];
        }
    }
    let nr = n_replicates as f64;
    let per_point: Vec<f64> = sum.iter().map(|s| s / nr).collect();
    let stderrs: Vec<f64> = (0..n)
        .map(|j| {
            let var = ((sumsq[j] - nr * per_point[j] * per_point[j]) / (nr - 1.0)).max(0.0);
            (var / nr).sqrt()
        })
        .collect();
    let sup_over_grid = per_point.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MomentEstimate {
        p,
        t,
        sup_over_grid,
        per_point,
        stderrs,
        n_replicates,
    })
}

/// Which argument of u(t, x) an increment is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Time,
    Space,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Time => write!(f, "time"),
            Direction::Space => write!(f, "space"),
        }
    }
}

/// Sup-over-base-point p-th moments of solution increments per lag.
#[derive(Debug, Clone)]
pub struct IncrementTable {
    pub direction: Direction,
    pub p: f64,
    pub lambda: f64,
    pub rho: f64,
    pub lags: Vec<f64>,
    pub moments: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub n_replicates: usize,
}

/// Fixed chunking of the replicate range keeps parallel accumulation
/// byte-deterministic for any thread count.
const ACCUMULATION_CHUNKS: usize = 8;

struct IncrementAccumulator {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

fn validate_lags(lags: &[f64]) -> Result<()> {
    if lags.len() < 4 {
        return Err(Error::invalid("lags", "need at least 4 lags".to_string()));
    }
    for pair in lags.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::invalid(
                "lags",
                "must be strictly increasing".to_string(),
            ));
        }
    }
    if lags[0] < 0.0 {
        return Err(Error::invalid("lags", "must be nonnegative".to_string()));
    }
    let smallest_positive = lags.iter().copied().find(|&l| l > 0.0);
    match smallest_positive {
        Some(first) if lags[lags.len() - 1] / first >= 10.0 * (1.0 - 1e-9) => Ok(()),
        Some(_) => Err(Error::invalid(
            "lags",
            "must span at least one decade".to_string(),
        )),
        None => Err(Error::invalid("lags", "all lags are zero".to_string())),
    }
}

/// Increment moments with base points thinned from an explicit time window;
/// `base_stride` 0 picks a stride giving roughly two dozen base times.
pub fn increment_table_windowed(
    config: &SimConfig,
    direction: Direction,
    p: f64,
    lags: &[f64],
    window: (f64, f64),
    base_stride: usize,
    n_replicates: usize,
    seed: u64,
) -> Result<IncrementTable> {
    if !(p >= 1.0) {
        return Err(Error::invalid("p", format!("{p} is below 1")));
    }
    if n_replicates < 2 {
        return Err(Error::invalid(
            "n_replicates",
            "need at least 2".to_string(),
        ));
    }
    validate_lags(lags)?;
    let grid = config.grid();
    let n = grid.n_points();
    let steps = config.n_steps();
    let unit = match direction {
        Direction::Time => config.dt(),
        Direction::Space => grid.dx(),
    };
    let lag_cells: Vec<usize> = lags
        .iter()
        .map(|&l| mesh_index(l, unit, "lags"))
        .collect::<Result<_>>()?;
    match direction {
        Direction::Time => {
            if lag_cells.iter().any(|&c| c > steps) {
                return Err(Error::invalid(
                    "lags",
                    "lag exceeds the horizon".to_string(),
                ));
            }
        }
        Direction::Space => {
            if lag_cells.iter().any(|&c| c >= n) {
                return Err(Error::invalid("lags", "lag exceeds the domain".to_string()));
            }
        }
    }
    let (w_lo, w_hi) = window;
    if !(w_lo >= 0.0 && w_hi >= w_lo && w_lo.is_finite() && w_hi.is_finite()) {
        return Err(Error::invalid(
            "window",
            format!("[{w_lo}, {w_hi}] is not ordered"),
        ));
    }
    let max_lag = *lag_cells.iter().max().unwrap();
    let b_lo = (w_lo / config.dt() - 1e-9).ceil().max(0.0) as usize;
    let mut b_hi = ((w_hi / config.dt() + 1e-9).floor() as usize).min(steps);
    if direction == Direction::Time {
        b_hi = b_hi.min(steps.saturating_sub(max_lag));
    }
    if b_lo > b_hi {
        return Err(Error::invalid(
            "window",
            "no admissible base times in the window".to_string(),
        ));
    }
    let stride = if base_stride > 0 {
        base_stride
    } else {
        ((b_hi - b_lo) / 23).max(1)
    };
    let bases: Vec<usize> = (b_lo..=b_hi).step_by(stride).collect();

    let wanted: Vec<usize> = match direction {
        Direction::Time => {
            let mut set = std::collections::BTreeSet::new();
            for &b in &bases {
                set.insert(b);
                for &c in &lag_cells {
                    set.insert(b + c);
                }
            }
            set.into_iter().collect()
        }
        Direction::Space => bases.clone(),
    };
    let position = |step: usize| wanted.binary_search(&step).unwrap();

    let n_lags = lags.len();
    let n_bases = bases.len();
    let cells = n_lags * n_bases * n;
    let chunk_count = ACCUMULATION_CHUNKS.min(n_replicates);
    let accumulators: Vec<IncrementAccumulator> = (0..chunk_count)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * n_replicates / chunk_count;
            let hi = (chunk + 1) * n_replicates / chunk_count;
            let mut acc = IncrementAccumulator {
                sum: vec![0.0; cells],
                sumsq: vec![0.0; cells],
            };
            for r in lo..hi {
                let cfg = config.with_seed(replicate_seed(seed, r));
                let snaps = evolve_sampled(&cfg, &wanted).map_err(|e| Error::ReplicateFailed {
                    replicate: r,
                    source: Box::new(e),
                })?;
                for (li, &c) in lag_cells.iter().enumerate() {
                    for (bi, &b) in bases.iter().enumerate() {
                        let base_row = &snaps[position(b)];
                        let off = (li * n_bases + bi) * n;
                        match direction {
                            Direction::Time => {
                                let lag_row = &snaps[position(b + c)];
                                for j in 0..n {
                                    let d = (lag_row[j] - base_row[j]).abs().powf(p);
                                    acc.sum[off + j] += d;
                                    acc.sumsq[off + j] += d * d;
                                }
                            }
                            Direction::Space => {
                                for j in 0..n {
                                    let d = (base_row[(j + c) % n] - base_row[j]).abs().powf(p);
                                    acc.sum[off + j] += d;
                                    acc.sumsq[off + j] += d * d;
                                }
                            }
                        }
                    }
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let mut sum = vec![0.0f64; cells];
    let mut sumsq = vec![0.0f64; cells];
    for acc in &accumulators {
        for i in 0..cells {
            sum[i] += acc.sum[i];
            sumsq[i] += acc.sumsq[i];
        }
    }
    let nr = n_replicates as f64;
    let mut moments = Vec::with_capacity(n_lags);
    let mut stderrs = Vec::with_capacity(n_lags);
    for li in 0..n_lags {
        let slice = li * n_bases * n..(li + 1) * n_bases * n;
        let (argmax, best) =
            sum[slice.clone()]
                .iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc },
                );
        let mean = best / nr;
        let idx = li * n_bases * n + argmax;
        let var = ((sumsq[idx] - nr * mean * mean) / (nr - 1.0)).max(0.0);
        moments.push(mean);
        stderrs.push((var / nr).sqrt());
    }
    Ok(IncrementTable {
        direction,
        p,
        lambda: config.lambda(),
        rho: config.initial().declared_regularity(),
        lags: lags.to_vec(),
        moments,
        stderrs,
        n_replicates,
    })
}

/// Increment moments with base times in the default interior window
/// [T/2, T], avoiding the initial layer.
pub fn increment_table(
    config: &SimConfig,
    direction: Direction,
    p: f64,
    lags: &[f64],
    n_replicates: usize,
    seed: u64,
) -> Result<IncrementTable> {
    let horizon = config.horizon();
    increment_table_windowed(
        config,
        direction,
        p,
        lags,
        (horizon / 2.0, horizon),
        0,
        n_replicates,
        seed,
    )
}

/// Log-log regression of an increment table: fitted scaling exponent of
/// E|increment|^(1/p) against the lag, with its theoretical ceiling.
#[derive(Debug, Clone)]
pub struct HolderFit {
    pub estimated_gamma: f64,
    pub stderr: f64,
    pub theoretical_bound: f64,
    pub direction: Direction,
}

/// Fits log(moment) on log(lag), weighted by the delta-method standard
/// errors when available, and divides the slope by p.
pub fn fit_holder_exponent(table: &IncrementTable) -> Result<HolderFit> {
    if table.lags.len() < 4 {
        return Err(Error::invalid("table", "need at least 4 lags".to_string()));
    }
    if table.moments.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::invalid(
            "table",
            "moments must be positive to fit".to_string(),
        ));
    }
    let xs: Vec<f64> = table.lags.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = table.moments.iter().map(|m| m.ln()).collect();
    let weighted = table.stderrs.iter().all(|&s| s > 0.0);
    let ws: Vec<f64> = if weighted {
        table
            .stderrs
            .iter()
            .zip(&table.moments)
            .map(|(s, m)| (m / s) * (m / s))
            .collect()
    } else {
        vec![1.0; xs.len()]
    };
    let sw: f64 = ws.iter().sum();
    let xb = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let yb = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs
        .iter()
        .zip(&ws)
        .map(|(x, w)| w * (x - xb) * (x - xb))
        .sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .zip(&ws)
        .map(|((x, y), w)| w * (x - xb) * (y - yb))
        .sum();
    if sxx <= 0.0 {
        return Err(Error::invalid("table", "degenerate lag spread".to_string()));
    }
    let slope = sxy / sxx;
    let se_slope = if weighted {
        (1.0 / sxx).sqrt()
    } else {
        let dof = (xs.len() - 2) as f64;
        let rss: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| {
                let fitted = yb + slope * (x - xb);
                (y - fitted) * (y - fitted)
            })
            .sum();
        (rss / dof / sxx).sqrt()
    };
    let bound = theoretical_exponents(table.lambda, table.rho)?;
    Ok(HolderFit {
        estimated_gamma: slope / table.p,
        stderr: (se_slope / table.p).max(1e-12),
        theoretical_bound: match table.direction {
            Direction::Time => bound.alpha_max,
            Direction::Space => bound.beta_max,
        },
        direction: table.direction,
    })
}

/// Natural log of the Gamma function for positive arguments, by the
/// Lanczos approximation; accurate to about 1e-13 relative.
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = 0.999_999_999_999_809_9;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (z + (i + 1) as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Closed-form envelope 0.5 (alpha + alpha e^z + M z^n / n!) with
/// z = 2 beta t^theta / theta.
pub fn gronwall_envelope(theta: f64, alpha: f64, beta: f64, m: f64, t: f64, n: usize) -> f64 {
    let z = 2.0 * beta * t.powf(theta) / theta;
    let mut tail = m;
    for i in 1..=n {
        tail *= z / i as f64;
    }
    0.5 * (alpha + alpha * z.exp() + tail)
}

/// Exact n-th iterate of the singular recursion for f0 identically M and
/// alpha = 0: M (beta Gamma(theta))^n t^(n theta) / Gamma(n theta + 1).
pub fn gronwall_saturating_iterate(theta: f64, beta: f64, m: f64, t: f64, n: usize) -> f64 {
    if n == 0 {
        return m;
    }
    if beta == 0.0 || t == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let ln_value =
        nf * (beta.ln() + ln_gamma(theta)) + nf * theta * t.ln() - ln_gamma(nf * theta + 1.0);
    m * ln_value.exp()
}

/// Ratio of the exact saturating iterate to the envelope, independent of
/// t, beta, and M: 2 n! (Gamma(theta+1)/2)^n / Gamma(n theta + 1).
pub fn gronwall_violation_ratio(theta: f64, n: usize) -> f64 {
    let nf = n as f64;
    (2f64.ln() + ln_gamma(nf + 1.0) + nf * (ln_gamma(theta + 1.0) - 2f64.ln())
        - ln_gamma(nf * theta + 1.0))
    .exp()
}

/// Outcome of checking iterates of the singular recursion against the
/// envelope; worst figures are taken at the largest iterate/envelope ratio.
#[derive(Debug, Clone, Copy)]
pub struct GronwallCheck {
    pub pass: bool,
    pub worst_ratio: f64,
    pub worst_margin: f64,
    pub worst_n: usize,
    pub worst_t: f64,
}

/// Iterates f_n(t) = alpha + beta Int_0^t f_{n-1}(s) (t-s)^(theta-1) ds
/// from the given f0 by product integration (piecewise-linear f against
/// exact moments of the singular weight), returning the values of
/// f_1..f_{n_max} at the requested times, one row per iterate.
pub fn gronwall_iterates(
    theta: f64,
    alpha: f64,
    beta: f64,
    t_grid: &[f64],
    n_max: usize,
    f0: impl Fn(f64) -> f64,
) -> Result<Vec<Vec<f64>>> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::invalid("theta", format!("{theta} is not positive")));
    }
    if alpha < 0.0 || beta < 0.0 {
        return Err(Error::invalid(
            "parameters",
            "alpha, beta must be nonnegative".to_string(),
        ));
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::invalid(
            "t_grid",
            "need finite nonnegative times".to_string(),
        ));
    }
    if n_max == 0 {
        return Err(Error::invalid("n_max", "must be at least 1".to_string()));
    }
    let t_max = t_grid.iter().copied().fold(0.0, f64::max);

    let mut nodes: Vec<f64> = (0..=1024).map(|i| t_max * i as f64 / 1024.0).collect();
    nodes.extend_from_slice(t_grid);
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * t_max.max(1.0));
    let s = nodes.len();

    let targets: Vec<usize> = t_grid
        .iter()
        .map(|&t| {
            nodes
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| (*a - t).abs().partial_cmp(&(*b - t).abs()).unwrap())
                .unwrap()
                .0
        })
        .collect();

    let mut f_prev: Vec<f64> = nodes.iter().map(|&t| f0(t)).collect();
    if f_prev.iter().any(|&v| v < 0.0) {
        return Err(Error::invalid(
            "f0",
            "initial function must be nonnegative".to_string(),
        ));
    }
    let mut rows = Vec::with_capacity(n_max);
    let mut f_next = vec![0.0f64; s];
    for _ in 1..=n_max {
        for i in 0..s {
            let t = nodes[i];
            let mut integral = 0.0;
            for l in 0..i {
                let h = nodes[l + 1] - nodes[l];
                if h <= 0.0 {
                    continue;
                }
                let b_edge = t - nodes[l];
                let a_edge = t - nodes[l + 1];
                let pow_b = b_edge.powf(theta);
                let pow_a = a_edge.powf(theta);
                let m0 = (pow_b - pow_a) / theta;
                let m1 = (pow_b * b_edge - pow_a * a_edge) / (theta + 1.0);
                let slope = (f_prev[l + 1] - f_prev[l]) / h;
                integral += (f_prev[l] + b_edge * slope) * m0 - slope * m1;
            }
            f_next[i] = alpha + beta * integral;
        }
        rows.push(targets.iter().map(|&j| f_next[j]).collect());
        std::mem::swap(&mut f_prev, &mut f_next);
    }
    Ok(rows)
}

/// Runs the iteration from the given f0 and compares every iterate
/// n = 1..n_max with the envelope at the requested times.
pub fn gronwall_check_with_initial(
    theta: f64,
    alpha: f64,
    beta: f64,
    m: f64,
    t_grid: &[f64],
    n_max: usize,
    f0: impl Fn(f64) -> f64,
) -> Result<GronwallCheck> {
    if m < 0.0 {
        return Err(Error::invalid("m", format!("{m} is negative")));
    }
    let rows = gronwall_iterates(theta, alpha, beta, t_grid, n_max, f0)?;
    let mut check = GronwallCheck {
        pass: true,
        worst_ratio: 0.0,
        worst_margin: f64::INFINITY,
        worst_n: 0,
        worst_t: 0.0,
    };
    for (ni, row) in rows.iter().enumerate() {
        let n = ni + 1;
        for (ti, &t) in t_grid.iter().enumerate() {
            let value = row[ti];
            let envelope = gronwall_envelope(theta, alpha, beta, m, t, n);
            let ratio = if envelope > 0.0 {
                value / envelope
            } else if value > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            if value > envelope * (1.0 + 1e-9) {
                check.pass = false;
            }
            if ratio > check.worst_ratio {
                check.worst_ratio = ratio;
                check.worst_margin = envelope - value;
                check.worst_n = n;
                check.worst_t = t;
            }
        }
    }
    Ok(check)
}

/// The envelope check with a random nonnegative initial function bounded
/// by M, drawn from the seed.
pub fn gronwall_property_check(
    theta: f64,
    alpha: f64,
    beta: f64,
    m: f64,
    t_grid: &[f64],
    n_max: usize,
    seed: u64,
) -> Result<GronwallCheck> {
    let t_max = t_grid
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (1..=4)
        .map(|_| (2.0 * rng.gen::<f64>() - 1.0, rng.gen::<f64>() * 2.0 * PI))
        .collect();
    let f0 = move |t: f64| {
        let wobble: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, phase))| {
                let k = (i + 1) as f64;
                a * (k * PI * t / t_max + phase).sin() / k
            })
            .sum();
        m * (0.5 + 0.6 * wobble).clamp(0.0, 1.0)
    };
    gronwall_check_with_initial(theta, alpha, beta, m, t_grid, n_max, f0)
}

/// Both sides of the weighted Hoelder inequality on a discrete measure.
#[derive(Debug, Clone, Copy)]
pub struct HolderCheck {
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Checks |Int f |h| dmu|^q <= (Int |f|^q |h| dmu) (Int |h| dmu)^(q-1)
/// as finite sums.
pub fn weighted_holder_check(f: &[f64], h: &[f64], mu: &[f64], q: f64) -> Result<HolderCheck> {
    if f.len() != h.len() || f.len() != mu.len() {
        return Err(Error::ShapeMismatch(format!(
            "lengths {} / {} / {} differ",
            f.len(),
            h.len(),
            mu.len()
        )));
    }
    if !(q > 1.0) {
        return Err(Error::invalid("q", format!("{q} is not above 1")));
    }
    if mu.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(Error::invalid(
            "mu",
            "weights must be nonnegative and finite".to_string(),
        ));
    }
    let mut plain = 0.0f64;
    let mut power = 0.0f64;
    let mut mass = 0.0f64;
    for i in 0..f.len() {
        let w = h[i].abs() * mu[i];
        plain += f[i] * w;
        power += f[i].abs().powf(q) * w;
        mass += w;
    }
    let lhs = plain.abs().powf(q);
    let rhs = power * mass.powf(q - 1.0);
    Ok(HolderCheck {
        pass: lhs <= rhs * (1.0 + 1e-12),
        lhs,
        rhs,
    })
}
