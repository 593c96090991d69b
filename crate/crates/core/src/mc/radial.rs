//! Euler-Maruyama simulation of the radial search in `d >= 2`.
//!
//! The radius of a `d`-dimensional Brownian motion with generator
//! `(D/2) Laplacian` solves the Bessel SDE
//!
//! ```text
//! dY = D (d - 1) / (2 Y) dt + sqrt(D) dW,
//! ```
//!
//! simulated on a fixed grid `dt` with three refinements:
//!
//! - resets happen at the *exact* jump times of the exponential clock: the
//!   step in progress is shortened to end on the reset, so no `O(dt)` bias
//!   enters through reset timing;
//! - absorption between grid points is recovered with the Brownian-bridge
//!   crossing probability `exp(-2 (Y_k - eps0)(Y_{k+1} - eps0) / (D h))`,
//!   skipped (as exactly negligible) when the product exceeds `21 D h`;
//! - checkpoints are hit exactly by the same step-shortening.
//!
//! A separate driver ([`simulate_survival_2d_no_reset`]) handles the
//! reset-free planar benchmark, where survival decays only logarithmically:
//! it grows the step as the searcher wanders away from the target
//! (`h ~ beta (Y - eps0)^2 / D`), which turns `t = 10^7` horizons from
//! `10^10` steps into a few hundred per trajectory while the bridge factor
//! keeps absorption resolved.

use super::{run_batches, validate_checkpoints, McError, SimConfig, SurvivalEstimate};
use crate::eigen_radial::ParamsRadial;

/// Survival probabilities `P(tau > t)` for the resetting radial search at
/// the given checkpoints.
///
/// Requires `sqrt(D dt) <= eps0 / 4`, i.e. at least four noise scales
/// between grid points and the target surface; coarser steps are rejected
/// rather than silently under-resolving absorption.
pub fn simulate_survival_radial(
    params: &ParamsRadial,
    cfg: &SimConfig,
    ts: &[f64],
) -> Result<Vec<SurvivalEstimate>, McError> {
    cfg.validate(true)?;
    validate_checkpoints(ts, cfg.t_max)?;
    let d_diff = params.diffusion();
    let eps0 = params.target_radius();
    let step_scale = (d_diff * cfg.dt).sqrt();
    if step_scale > eps0 / 4.0 {
        return Err(McError::StepTooCoarse { step_scale, target_radius: eps0 });
    }

    let r = params.reset_rate();
    let reset_radius = params.reset_radius();
    let drift_coef = d_diff * f64::from(params.dim() - 1) / 2.0;
    let sigma = d_diff.sqrt();
    let n = cfg.n_trajectories;

    let partials = run_batches(n, |lo, hi| {
        let mut counts = vec![0u64; ts.len()];
        for i in lo..hi {
            let mut rng = cfg.rng_for(i);
            let mut y = reset_radius;
            let mut elapsed = 0.0;
            let mut next_reset = rng.exponential(r);
            let mut ci = 0;
            'traj: while ci < ts.len() {
                let step_end = (elapsed + cfg.dt).min(next_reset).min(ts[ci]);
                let h = step_end - elapsed;
                if h > 0.0 {
                    let y_next = y + drift_coef / y * h + sigma * h.sqrt() * rng.std_normal();
                    if y_next <= eps0 {
                        break 'traj;
                    }
                    let gap_product = (y - eps0) * (y_next - eps0);
                    if gap_product < 21.0 * d_diff * h {
                        let p_cross = (-2.0 * gap_product / (d_diff * h)).exp();
                        if rng.uniform() < p_cross {
                            break 'traj;
                        }
                    }
                    y = y_next;
                }
                elapsed = step_end;
                if elapsed == next_reset {
                    y = reset_radius;
                    next_reset = elapsed + rng.exponential(r);
                }
                if elapsed == ts[ci] {
                    counts[ci] += 1;
                    ci += 1;
                }
            }
        }
        counts
    });

    Ok(reduce_counts(ts, partials, n, cfg.seed))
}

/// Survival of a planar (`d = 2`) searcher with *no* resetting, started at
/// radius `start_radius`, absorbed at `target_radius`.
///
/// The step adapts to the distance from the target,
/// `h = max(dt, beta (Y - eps0)^2 / D)` with `beta = 0.02`, so the
/// logarithmically slow decay can be followed over many decades of `t`.
/// `cfg.dt` acts as the floor resolution near the target and must satisfy
/// the same `sqrt(D dt) <= eps0 / 4` guard as the resetting driver.
pub fn simulate_survival_2d_no_reset(
    diffusion: f64,
    target_radius: f64,
    start_radius: f64,
    cfg: &SimConfig,
    ts: &[f64],
) -> Result<Vec<SurvivalEstimate>, McError> {
    cfg.validate(true)?;
    validate_checkpoints(ts, cfg.t_max)?;
    for (name, value) in [("diffusion", diffusion), ("target_radius", target_radius)] {
        if !value.is_finite() || value <= 0.0 {
            return Err(McError::InvalidParameter {
                name,
                value,
                requirement: "must be finite and > 0",
            });
        }
    }
    if !start_radius.is_finite() || start_radius <= target_radius {
        return Err(McError::InvalidParameter {
            name: "start_radius",
            value: start_radius,
            requirement: "must be finite and > target_radius",
        });
    }
    let step_scale = (diffusion * cfg.dt).sqrt();
    if step_scale > target_radius / 4.0 {
        return Err(McError::StepTooCoarse { step_scale, target_radius });
    }

    const BETA: f64 = 0.02;
    let drift_coef = diffusion / 2.0; // D (d-1)/2 at d = 2
    let sigma = diffusion.sqrt();
    let n = cfg.n_trajectories;

    let partials = run_batches(n, |lo, hi| {
        let mut counts = vec![0u64; ts.len()];
        for i in lo..hi {
            let mut rng = cfg.rng_for(i);
            let mut y = start_radius;
            let mut elapsed = 0.0;
            let mut ci = 0;
            'traj: while ci < ts.len() {
                let gap = y - target_radius;
                let h_adaptive = (BETA * gap * gap / diffusion).max(cfg.dt);
                let step_end = (elapsed + h_adaptive).min(ts[ci]);
                let h = step_end - elapsed;
                if h > 0.0 {
                    let y_next = y + drift_coef / y * h + sigma * h.sqrt() * rng.std_normal();
                    if y_next <= target_radius {
                        break 'traj;
                    }
                    let gap_product = (y - target_radius) * (y_next - target_radius);
                    if gap_product < 21.0 * diffusion * h {
                        let p_cross = (-2.0 * gap_product / (diffusion * h)).exp();
                        if rng.uniform() < p_cross {
                            break 'traj;
                        }
                    }
                    y = y_next;
                }
                elapsed = step_end;
                if elapsed == ts[ci] {
                    counts[ci] += 1;
                    ci += 1;
                }
            }
        }
        counts
    });

    Ok(reduce_counts(ts, partials, n, cfg.seed))
}

fn reduce_counts(
    ts: &[f64],
    partials: Vec<Vec<u64>>,
    n: u64,
    seed: u64,
) -> Vec<SurvivalEstimate> {
    let mut totals = vec![0u64; ts.len()];
    for batch in partials {
        for (tot, c) in totals.iter_mut().zip(batch) {
            *tot += c;
        }
    }
    ts.iter()
        .zip(totals)
        .map(|(&t, survivors)| SurvivalEstimate::from_counts(t, survivors, n, seed))
        .collect()
}
