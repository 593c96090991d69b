//! Classification of moving-target schedules against the detection front.
//!
//! With resetting at rate `r`, the set of points the searcher has visited by
//! time `t` grows like a ball of radius `sqrt(D/2r) ln t`: a target whose
//! distance `a_t` falls behind that front by an unbounded margin is found
//! with probability one, while a target pulling unboundedly ahead escapes.
//! In dimension `d >= 2` the boundary carries a log-log correction with
//! critical exponent `(d-1)/2 sqrt(D/2r)`: escape to certain detection needs
//! the corrected drift `|a_t| - sqrt(D/2r) ln t + gamma ln ln t` to diverge
//! to `-inf` for some `gamma` above critical, certain escape needs the
//! drift corrected at exactly the critical exponent to diverge to `+inf`,
//! and schedules between the two conditions are unresolved.
//!
//! [`classify_schedule`] turns those limit statements into a finite-grid
//! rule (strict monotonicity over the last half of the probe grid plus a
//! threshold at the end) and reports `lambda0(a_t) t` along the grid — the
//! product whose divergence or vanishing drives the dichotomy — so the
//! verdict can be checked against simulation.

use std::f64::consts::E;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eigen1d::{self, Eigen1dError, Params1d};
use crate::eigen_radial::{self, EigenRadialError, ParamsRadial};
use crate::target::SearchModel;

/// Default divergence threshold: a corrected drift is only called unbounded
/// once it is strictly monotone over the last half of the grid and clears
/// this magnitude at the end.
pub const DEFAULT_THRESHOLD: f64 = 5.0;

/// Fewest probe times that still leave two points in the "last half" used
/// for the monotonicity test.
const MIN_GRID: usize = 4;

/// Multiple of the critical exponent used to probe the detection branch.
/// The branch condition asks for divergence at *some* exponent above
/// critical, and divergence at a larger exponent implies it at every smaller
/// one (the difference only subtracts a growing term), so probing just above
/// critical is the sharpest single test a finite grid can run.
const SUB_PROBE_FACTOR: f64 = 1.25;

/// Errors from schedule classification.
#[derive(Debug, Error)]
pub enum SpeedError {
    /// A parameter was non-finite or out of range.
    #[error("invalid parameter {name} = {value}: {requirement}")]
    InvalidParameter { name: &'static str, value: f64, requirement: &'static str },
    /// The probe grid has too few points to read a trend from.
    #[error("probe grid needs at least {min} points, got {len}")]
    GridTooShort { len: usize, min: usize },
    /// The probe grid is not strictly increasing.
    #[error("probe grid must be strictly increasing: t[{index}] = {value} does not exceed its predecessor")]
    GridNotIncreasing { index: usize, value: f64 },
    /// A probe time was too small for the log-log correction to be defined
    /// with a positive sign.
    #[error("probe time t = {t} too small: the log-log correction needs t > e")]
    TimeTooSmall { t: f64 },
    /// The schedule left the set of reachable target distances.
    #[error("schedule offset {offset} at t = {t} is not a reachable target distance (must be finite and exceed {floor})")]
    OffsetOutOfRange { t: f64, offset: f64, floor: f64 },
    /// One-dimensional spectral solve failed.
    #[error("spectral solve failed: {0}")]
    Eigen1d(#[from] Eigen1dError),
    /// Radial spectral solve failed.
    #[error("radial spectral solve failed: {0}")]
    EigenRadial(#[from] EigenRadialError),
}

/// Verdict of [`classify_schedule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// The schedule falls behind the front: detection probability tends
    /// to one (`lambda0(a_t) t` diverges).
    SubFront,
    /// The schedule outruns the front: the target escapes with probability
    /// tending to one (`lambda0(a_t) t` vanishes).
    SuperFront,
    /// The schedule tracks the front to within the log-log correction
    /// window, where neither branch condition applies.
    LogLogCorrected,
    /// The drift was non-monotone or too small on this grid to call.
    Indeterminate,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::SubFront => "sub-front",
            Regime::SuperFront => "super-front",
            Regime::LogLogCorrected => "log-log-corrected",
            Regime::Indeterminate => "indeterminate",
        })
    }
}

type OffsetFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A moving-target schedule `t -> a_t`. Only the magnitude of the offset
/// matters; the searcher resets to the origin and the problem is symmetric.
#[derive(Clone)]
pub struct FrontSchedule {
    offset: OffsetFn,
}

impl fmt::Debug for FrontSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrontSchedule").finish_non_exhaustive()
    }
}

impl FrontSchedule {
    /// Schedule given by an arbitrary offset function of time.
    pub fn new(offset: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FrontSchedule { offset: Arc::new(offset) }
    }

    /// Schedule of the form `a_t = log_coeff ln t + log_log_coeff ln ln t +
    /// constant`, the family in which the front and its correction live.
    pub fn from_coeffs(log_coeff: f64, log_log_coeff: f64, constant: f64) -> Self {
        FrontSchedule::new(move |t: f64| {
            let u = t.ln();
            log_coeff * u + log_log_coeff * u.ln() + constant
        })
    }

    /// Target offset at time `t`.
    pub fn offset(&self, t: f64) -> f64 {
        (self.offset)(t)
    }
}

/// Diagnostics at one probe time.
#[derive(Debug, Clone, Copy)]
pub struct SpeedRow {
    /// Probe time.
    pub t: f64,
    /// Target offset magnitude `|a_t|`.
    pub offset: f64,
    /// Raw drift `|a_t| - sqrt(D/2r) ln t`.
    pub drift: f64,
    /// Drift corrected at the critical exponent,
    /// `drift + (d-1)/2 sqrt(D/2r) ln ln t`; equal to `drift` on the line.
    pub corrected_drift: f64,
    /// `ln(lambda0(a_t) t)`, exact even where the product under- or
    /// overflows.
    pub log_lambda_t: f64,
    /// `lambda0(a_t) t`; may round to zero or infinity for extreme
    /// schedules, in which case `log_lambda_t` keeps the information.
    pub lambda_t: f64,
}

/// Verdict plus the per-time diagnostics it was read from.
#[derive(Debug, Clone)]
pub struct SpeedReport {
    /// Classification of the schedule on this grid.
    pub regime: Regime,
    /// Front scale `sqrt(D/2r)`: the coefficient of `ln t` in the front
    /// radius.
    pub front_scale: f64,
    /// Critical log-log exponent `(d-1)/2 sqrt(D/2r)`; zero on the line.
    pub gamma_critical: f64,
    /// Divergence threshold the verdict used.
    pub threshold: f64,
    /// Diagnostics at each probe time, in grid order.
    pub rows: Vec<SpeedRow>,
}

/// `ln lambda0` at target distance `a`, by the model's eigenvalue solver.
fn log_lambda0(model: &SearchModel, a: f64) -> Result<f64, SpeedError> {
    match *model {
        SearchModel::OneDimensional { diffusion, reset_rate } => {
            Ok(eigen1d::solve(Params1d::new(diffusion, reset_rate, a)?, 0.0)?.log_lambda0())
        }
        SearchModel::Radial { diffusion, reset_rate, dim, target_radius } => {
            let params = ParamsRadial::new(diffusion, reset_rate, dim, target_radius, a)?;
            Ok(eigen_radial::solve(params, 0.0)?.log_lambda0())
        }
    }
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Classifies a moving-target schedule against the detection front.
///
/// The limit conditions are operationalised on the probe grid as: a
/// corrected drift diverges when it is strictly monotone over the last half
/// of the grid *and* its magnitude exceeds `threshold` at the grid end.
/// The escape-to-detection branch is probed at exponent
/// [`SUB_PROBE_FACTOR`] times critical, the escape-to-survival branch at
/// exactly the critical exponent. A schedule whose critically corrected
/// drift stays below `threshold` in magnitude over the last half of the
/// grid sits in the unresolved correction window and is reported
/// [`Regime::LogLogCorrected`]; anything else is
/// [`Regime::Indeterminate`].
pub fn classify_schedule(
    schedule: &FrontSchedule,
    model: &SearchModel,
    t_grid: &[f64],
    threshold: f64,
) -> Result<SpeedReport, SpeedError> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(SpeedError::InvalidParameter {
            name: "threshold",
            value: threshold,
            requirement: "finite and positive",
        });
    }
    if t_grid.len() < MIN_GRID {
        return Err(SpeedError::GridTooShort { len: t_grid.len(), min: MIN_GRID });
    }
    for (index, &t) in t_grid.iter().enumerate() {
        if !(t > E) {
            return Err(SpeedError::TimeTooSmall { t });
        }
        if index > 0 && t <= t_grid[index - 1] {
            return Err(SpeedError::GridNotIncreasing { index, value: t });
        }
    }

    let front_scale = 1.0 / model.kappa();
    let gamma_critical = 0.5 * (f64::from(model.dim()) - 1.0) * front_scale;
    let floor = match *model {
        SearchModel::OneDimensional { .. } => 0.0,
        SearchModel::Radial { target_radius, .. } => target_radius,
    };

    let mut rows = Vec::with_capacity(t_grid.len());
    let mut probed = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let raw = schedule.offset(t);
        let offset = raw.abs();
        if !offset.is_finite() || offset <= floor {
            return Err(SpeedError::OffsetOutOfRange { t, offset: raw, floor });
        }
        let u = t.ln();
        let drift = offset - front_scale * u;
        let corrected_drift = drift + gamma_critical * u.ln();
        let log_lambda_t = log_lambda0(model, offset)? + u;
        rows.push(SpeedRow {
            t,
            offset,
            drift,
            corrected_drift,
            log_lambda_t,
            lambda_t: log_lambda_t.exp(),
        });
        probed.push(drift + SUB_PROBE_FACTOR * gamma_critical * u.ln());
    }

    let corrected: Vec<f64> = rows.iter().map(|row| row.corrected_drift).collect();
    let tail = &corrected[corrected.len() / 2..];
    let probed_tail = &probed[probed.len() / 2..];

    let regime = if strictly_increasing(tail) && corrected[corrected.len() - 1] > threshold {
        Regime::SuperFront
    } else if strictly_decreasing(probed_tail) && probed[probed.len() - 1] < -threshold {
        Regime::SubFront
    } else if tail.iter().all(|&m| m.abs() < threshold) {
        Regime::LogLogCorrected
    } else {
        Regime::Indeterminate
    };

    Ok(SpeedReport { regime, front_scale, gamma_critical, threshold, rows })
}
