//! Monte Carlo simulators for the resetting search process.
//!
//! Two engines, matched to what can be sampled exactly:
//!
//! - one dimension ([`simulate_survival_1d`] and friends): an *event-driven*
//!   sampler with no time discretisation at all. Between resets the searcher
//!   is a free Brownian motion, whose first-passage law to the target is
//!   known in closed form; each inter-reset gap therefore costs a handful of
//!   draws, and the sampled search times are exact in distribution.
//! - radial dimension `d >= 2` ([`simulate_survival_radial`]): Euler-Maruyama
//!   on the Bessel-process radius with an exponential resetting clock hit
//!   exactly (partial steps up to each reset), and a Brownian-bridge
//!   correction for absorption between grid points.
//!
//! Determinism: every trajectory owns a counter-addressed RNG stream
//! ([`rng::TrajRng`]), work is sharded in fixed batches, and per-batch
//! results are reduced in index order — so outputs are bit-identical for any
//! thread count. Rayon's `RAYON_NUM_THREADS` environment variable controls
//! parallelism.
//!
//! Estimates carry `1.96 sqrt(p(1-p)/n)` normal-approximation error bars;
//! callers decide what to do with them.

pub mod rng;

mod one_d;
mod radial;

pub use one_d::{
    simulate_conditioned_eigenfunction_1d, simulate_mean_search_time_1d, simulate_survival_1d,
};
pub use radial::{simulate_survival_2d_no_reset, simulate_survival_radial};

use rayon::prelude::*;
use thiserror::Error;

/// Error raised by the simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    /// A configuration field was non-finite or out of range.
    #[error("invalid parameter {name} = {value}: {requirement}")]
    InvalidParameter { name: &'static str, value: f64, requirement: &'static str },
    /// Checkpoint times must be finite, positive and strictly increasing.
    #[error("checkpoint times must be finite, positive and strictly increasing (violation at index {index})")]
    BadCheckpoints { index: usize },
    /// A checkpoint lies beyond the configured horizon `t_max`.
    #[error("checkpoint t = {t} exceeds the configured horizon t_max = {t_max}")]
    BeyondHorizon { t: f64, t_max: f64 },
    /// The Euler-Maruyama step is too coarse to resolve the target.
    #[error("step too coarse: sqrt(D dt) = {step_scale} exceeds a quarter of the target radius {target_radius}")]
    StepTooCoarse { step_scale: f64, target_radius: f64 },
    /// A mean-time run had a trajectory outlive the horizon.
    #[error("a trajectory exceeded t_max = {t_max} before finding the target; raise the horizon")]
    HorizonExceeded { t_max: f64 },
    /// Too few surviving trajectories to form a conditional estimate.
    #[error("only {survivors} survivors at t = {t}; at least {required} required")]
    TooFewSurvivors { survivors: u64, required: u64, t: f64 },
}

/// Common simulation controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Number of trajectories.
    pub n_trajectories: u64,
    /// Hard time horizon; checkpoints beyond it are rejected.
    pub t_max: f64,
    /// Euler-Maruyama step (ignored by the exact one-dimensional engine).
    pub dt: f64,
    /// Run seed; together with a trajectory index it determines every draw.
    pub seed: u64,
    /// Pair trajectories antithetically (mirrored noise).
    pub antithetic: bool,
}

impl SimConfig {
    fn validate(&self, needs_dt: bool) -> Result<(), McError> {
        if self.n_trajectories == 0 {
            return Err(McError::InvalidParameter {
                name: "n_trajectories",
                value: 0.0,
                requirement: "must be >= 1",
            });
        }
        if !self.t_max.is_finite() || self.t_max <= 0.0 {
            return Err(McError::InvalidParameter {
                name: "t_max",
                value: self.t_max,
                requirement: "must be finite and > 0",
            });
        }
        if needs_dt && (!self.dt.is_finite() || self.dt <= 0.0) {
            return Err(McError::InvalidParameter {
                name: "dt",
                value: self.dt,
                requirement: "must be finite and > 0",
            });
        }
        Ok(())
    }

    /// RNG for trajectory `index` under this configuration: antithetic runs
    /// pair `(2k, 2k+1)` on mirrored copies of stream `k`.
    fn rng_for(&self, index: u64) -> rng::TrajRng {
        if self.antithetic {
            rng::TrajRng::new(self.seed, index / 2, index % 2 == 1)
        } else {
            rng::TrajRng::new(self.seed, index, false)
        }
    }
}

/// Survival estimate at a single checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalEstimate {
    /// Checkpoint time.
    pub t: f64,
    /// Fraction of trajectories with search time exceeding `t`.
    pub p_hat: f64,
    /// `1.96 sqrt(p_hat (1 - p_hat) / n)`.
    pub half_width_95: f64,
    /// Trajectories simulated.
    pub n: u64,
    /// Trajectories still searching at `t`.
    pub survivors: u64,
    /// Seed the run was performed with.
    pub seed: u64,
}

impl SurvivalEstimate {
    fn from_counts(t: f64, survivors: u64, n: u64, seed: u64) -> Self {
        let p_hat = survivors as f64 / n as f64;
        let half_width_95 = 1.96 * (p_hat * (1.0 - p_hat) / n as f64).sqrt();
        Self { t, p_hat, half_width_95, n, survivors, seed }
    }
}

/// Sample-mean estimate with a 95% normal error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    /// Sample mean.
    pub mean: f64,
    /// `1.96 sqrt(sample variance / n)`.
    pub half_width_95: f64,
    /// Sample size.
    pub n: u64,
    /// Seed the run was performed with.
    pub seed: u64,
}

/// Estimate of the principal-eigenfunction mean over surviving paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionedEstimate {
    /// Checkpoint time.
    pub t: f64,
    /// `E[u(X_t) | tau > t]`, over surviving trajectories.
    pub conditional_mean: f64,
    /// `E[u(X_t); tau > t]`, over all trajectories (martingale observable:
    /// equals `exp(-lambda0 t)` for every `t`).
    pub product_mean: f64,
    /// 95% half-width for `product_mean`.
    pub product_half_width_95: f64,
    /// Surviving trajectories.
    pub survivors: u64,
    /// Trajectories simulated.
    pub n: u64,
    /// Seed the run was performed with.
    pub seed: u64,
}

/// Fixed shard size for deterministic parallel reduction.
const BATCH: u64 = 4096;

/// Run `per_batch` over `[lo, hi)` trajectory-index ranges in parallel and
/// return the partial results in batch order (hence deterministically).
fn run_batches<T: Send>(
    n: u64,
    per_batch: impl Fn(u64, u64) -> T + Sync,
) -> Vec<T> {
    let n_batches = n.div_ceil(BATCH);
    (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let lo = b * BATCH;
            let hi = (lo + BATCH).min(n);
            per_batch(lo, hi)
        })
        .collect()
}

/// Validate a strictly increasing, positive, in-horizon checkpoint list.
fn validate_checkpoints(ts: &[f64], t_max: f64) -> Result<(), McError> {
    if ts.is_empty() {
        return Err(McError::BadCheckpoints { index: 0 });
    }
    let mut prev = 0.0;
    for (index, &t) in ts.iter().enumerate() {
        if !t.is_finite() || t <= prev {
            return Err(McError::BadCheckpoints { index });
        }
        prev = t;
    }
    if prev > t_max {
        return Err(McError::BeyondHorizon { t: prev, t_max });
    }
    Ok(())
}

/// Survival probability of a *non-resetting* Brownian searcher in one
/// dimension: `P(no contact with the target at distance a by time t)
/// = erf(a / sqrt(2 D t))`.
pub fn brownian_survival_no_reset(diffusion: f64, distance: f64, t: f64) -> Result<f64, McError> {
    for (name, value, positive) in [
        ("diffusion", diffusion, true),
        ("distance", distance, true),
        ("t", t, false),
    ] {
        if !value.is_finite() || (positive && value <= 0.0) || value < 0.0 {
            return Err(McError::InvalidParameter {
                name,
                value,
                requirement: "must be finite and positive",
            });
        }
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    Ok(libm::erf(distance / (2.0 * diffusion * t).sqrt()))
}
