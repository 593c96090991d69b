//! Failure probabilities averaged over random target positions.
//!
//! A target is drawn from an isotropic law on `R^d` with radial density
//! proportional to `c(a) exp(-B a^l)`; the searcher runs the resetting
//! dynamics whose survival tail `(1/M(a)) exp(-lambda0(a) t)` comes from
//! [`eigen1d`](crate::eigen1d) / [`eigen_radial`](crate::eigen_radial). This
//! module integrates that tail over the target law
//! ([`failure_probability`]), tracks the scaling functional
//! `log F(t) / (log t)^l` whose large-`t` limit is `-B (D/2r)^{l/2}`
//! ([`scaling_functional`]), and analyses the underlying Laplace-type
//! exponent `gamma_t(a) = R t exp(-kappa a) + B a^l`
//! ([`laplace_minimize`], [`laplace_bound_check`]).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eigen1d::{self, Eigen1dError, Params1d};
use crate::eigen_radial::{self, EigenRadialError, ParamsRadial};
use crate::interp::{InterpError, MonotoneCubic};
use crate::quad::{adaptive_simpson, QuadError};
use crate::roots::{brent, BrentConfig, RootError};

/// Relative tolerance used by [`scaling_functional`], which has no
/// tolerance parameter of its own.
const DEFAULT_QUAD_TOL: f64 = 1e-7;
/// The averaged integrand is truncated this many nats below its maximum.
const TRUNCATION_NATS: f64 = 40.0;
/// Probes per pass while locating the integration window.
const PROBE_COUNT: usize = 48;
/// Cap on window relocation passes before giving up.
const WINDOW_PASS_CAP: usize = 80;
/// Node counts of the nested spectral-table refinement levels.
const LEVELS: [usize; 6] = [33, 65, 129, 257, 513, 1025];
/// Tolerance for the radial overlap prefactor at each table node.
const RADIAL_PREFACTOR_TOL: f64 = 1e-9;
/// Tolerance for the cached normalisation integral.
const NORMALISATION_TOL: f64 = 1e-11;

/// Errors from target averaging and Laplace analysis.
#[derive(Debug, Error)]
pub enum TargetError {
    /// A parameter was non-finite or out of range.
    #[error("invalid parameter {name} = {value}: {requirement}")]
    InvalidParameter { name: &'static str, value: f64, requirement: &'static str },
    /// Target distribution and search model live in different dimensions.
    #[error("dimension mismatch: search model is {model_dim}-dimensional, target law {dist_dim}-dimensional")]
    DimensionMismatch { model_dim: u32, dist_dim: u32 },
    /// `gamma_t` has no interior minimiser yet: for stretch exponents below
    /// 1 the two critical points only appear beyond a time threshold.
    #[error("no interior minimiser of the exponent at t = {t}: pre-asymptotic regime")]
    PreAsymptotic { t: f64 },
    /// Iterative refinement stalled before reaching the requested tolerance.
    #[error("{what} did not converge: last change {last_change:e} vs tolerance {tol:e}")]
    NotConverged { what: &'static str, last_change: f64, tol: f64 },
    /// One-dimensional spectral solve failed.
    #[error("spectral solve failed: {0}")]
    Eigen1d(#[from] Eigen1dError),
    /// Radial spectral solve failed.
    #[error("radial spectral solve failed: {0}")]
    EigenRadial(#[from] EigenRadialError),
    /// Quadrature failed.
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    /// Table interpolation failed.
    #[error("interpolation failed: {0}")]
    Interpolation(#[from] InterpError),
    /// Root bracketing failed.
    #[error("root finding failed: {0}")]
    Root(#[from] RootError),
}

/// `ln Gamma(half/2)` for positive integer `half`, via the exact product
/// formulas for integer and half-integer arguments.
fn ln_gamma_half_integer(half: u32) -> f64 {
    if half % 2 == 0 {
        // Gamma(m) = (m - 1)!
        (2..half / 2).map(|k| f64::from(k).ln()).sum()
    } else {
        // Gamma(m + 1/2) = sqrt(pi) prod_{k=1}^{m} (k - 1/2)
        0.5 * std::f64::consts::PI.ln()
            + (1..=half / 2).map(|k| (f64::from(k) - 0.5).ln()).sum::<f64>()
    }
}

/// `ln` of the surface area of the unit sphere in `R^dim`,
/// `2 pi^{dim/2} / Gamma(dim/2)`; for `dim = 1` this is `ln 2`.
fn log_surface_area(dim: u32) -> f64 {
    2.0f64.ln() + 0.5 * f64::from(dim) * std::f64::consts::PI.ln() - ln_gamma_half_integer(dim)
}

type LogPrefactor = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Isotropic stretched-exponential target law on `R^d`: density proportional
/// to `c(|x|) exp(-B |x|^l)` with a user-pluggable slowly varying prefactor
/// `c` (default 1). The normalisation is computed once at construction and
/// cached.
#[derive(Clone)]
pub struct TargetDistribution {
    tail_coefficient: f64,
    stretch_exponent: f64,
    dim: u32,
    log_prefactor: LogPrefactor,
    /// `ln` of `integral_0^inf c(a) exp(-B a^l) a^{d-1} da`.
    log_radial_norm: f64,
}

impl fmt::Debug for TargetDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetDistribution")
            .field("tail_coefficient", &self.tail_coefficient)
            .field("stretch_exponent", &self.stretch_exponent)
            .field("dim", &self.dim)
            .field("log_radial_norm", &self.log_radial_norm)
            .finish_non_exhaustive()
    }
}

impl TargetDistribution {
    /// Pure stretched-exponential law (`c = 1`) with tail coefficient `B`,
    /// stretch exponent `l`, in dimension `dim`.
    pub fn new(tail_coefficient: f64, stretch_exponent: f64, dim: u32) -> Result<Self, TargetError> {
        Self::with_log_prefactor(tail_coefficient, stretch_exponent, dim, |_| 0.0)
    }

    /// Isotropic Gaussian with per-coordinate standard deviation `sigma`
    /// (`B = 1/(2 sigma^2)`, `l = 2`).
    pub fn gaussian(sigma: f64, dim: u32) -> Result<Self, TargetError> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(TargetError::InvalidParameter {
                name: "sigma",
                value: sigma,
                requirement: "must be finite and > 0",
            });
        }
        Self::new(0.5 / (sigma * sigma), 2.0, dim)
    }

    /// Exponential radial tail `exp(-rate |x|)` (`B = rate`, `l = 1`); in
    /// `d = 1` this is the two-sided symmetric exponential law.
    pub fn exponential(rate: f64, dim: u32) -> Result<Self, TargetError> {
        Self::new(rate, 1.0, dim)
    }

    /// General form with a custom log-prefactor `log c(a)`. The factor must
    /// be subexponential against the stretched tail (`log c(a) / a^l -> 0`);
    /// that contract is the caller's, but a prefactor violating it badly
    /// enough surfaces as a normalisation failure.
    pub fn with_log_prefactor(
        tail_coefficient: f64,
        stretch_exponent: f64,
        dim: u32,
        log_prefactor: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self, TargetError> {
        for (name, value, floor) in [
            ("tail_coefficient", tail_coefficient, 0.0),
            ("stretch_exponent", stretch_exponent, 0.0),
        ] {
            if !value.is_finite() || value <= floor {
                return Err(TargetError::InvalidParameter {
                    name,
                    value,
                    requirement: "must be finite and > 0",
                });
            }
        }
        if !(1..=40).contains(&dim) {
            return Err(TargetError::InvalidParameter {
                name: "dim",
                value: f64::from(dim),
                requirement: "must be between 1 and 40",
            });
        }
        let mut dist = TargetDistribution {
            tail_coefficient,
            stretch_exponent,
            dim,
            log_prefactor: Arc::new(log_prefactor),
            log_radial_norm: 0.0,
        };
        dist.log_radial_norm = dist.compute_log_radial_norm()?;
        Ok(dist)
    }

    /// Tail coefficient `B`.
    pub fn tail_coefficient(&self) -> f64 {
        self.tail_coefficient
    }

    /// Stretch exponent `l`.
    pub fn stretch_exponent(&self) -> f64 {
        self.stretch_exponent
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// `log c(a) - B a^l`: the unnormalised log-density at radius `a`.
    pub fn log_relative_density(&self, a: f64) -> f64 {
        (self.log_prefactor)(a) - self.tail_coefficient * a.powf(self.stretch_exponent)
    }

    /// Log of the full-space density at any point of radius `a >= 0`.
    pub fn log_density(&self, a: f64) -> f64 {
        self.log_relative_density(a) - self.log_radial_norm - log_surface_area(self.dim)
    }

    /// Log of the radial marginal density (the law of `|x|`), i.e. the
    /// full-space density times the sphere surface `S_d a^{d-1}`.
    pub fn log_radial_marginal(&self, a: f64) -> f64 {
        self.log_relative_density(a) + self.log_power_term(a) - self.log_radial_norm
    }

    /// `(d - 1) ln a`, guarded so `d = 1` yields 0 even at `a = 0` (where
    /// `0 * ln 0` would be NaN).
    fn log_power_term(&self, a: f64) -> f64 {
        if self.dim == 1 {
            0.0
        } else {
            f64::from(self.dim - 1) * a.ln()
        }
    }

    /// `ln integral_0^inf c(a) exp(-B a^l) a^{d-1} da`, evaluated by scanning
    /// for the peak of the log-integrand and integrating the shifted
    /// exponential over a window truncated 45 nats below the peak.
    fn compute_log_radial_norm(&self) -> Result<f64, TargetError> {
        let b = self.tail_coefficient;
        let l = self.stretch_exponent;
        let h = |rho: f64| self.log_relative_density(rho) + self.log_power_term(rho);

        // Reach of the stretched tail, then extend until 45 nats below peak.
        let scale = (1.0 / b).powf(1.0 / l);
        let mut hi = scale * ((45.0 + f64::from(self.dim)) / 1.0).powf(1.0 / l).max(2.0);
        let mut peak;
        let mut at = 0.0f64;
        for pass in 0..60 {
            peak = f64::NEG_INFINITY;
            for k in 0..=256 {
                let rho = hi * f64::from(k) / 256.0;
                let v = h(rho);
                if v > peak {
                    peak = v;
                    at = rho;
                }
            }
            if !peak.is_finite() {
                return Err(TargetError::InvalidParameter {
                    name: "log_prefactor",
                    value: f64::NAN,
                    requirement: "log-density must be finite somewhere on the scan grid",
                });
            }
            if h(hi) < peak - 45.0 && at < 0.9 * hi {
                let f = |rho: f64| (h(rho) - peak).exp();
                let head = adaptive_simpson(f, 0.0, at, NORMALISATION_TOL, 0.0)?;
                let tail = adaptive_simpson(f, at, hi, NORMALISATION_TOL, 0.0)?;
                return Ok(peak + (head.value + tail.value).ln());
            }
            if pass == 59 {
                break;
            }
            hi *= 2.0;
        }
        Err(TargetError::NotConverged {
            what: "normalisation window search",
            last_change: hi,
            tol: 45.0,
        })
    }
}

/// The searcher whose survival tail is averaged: resetting diffusion on the
/// line or a radial resetting diffusion with an absorbing sphere.
#[derive(Debug, Clone, Copy)]
pub enum SearchModel {
    /// Diffusion on `R` with point target at distance `a` (the integration
    /// variable), reset to the origin at rate `reset_rate`.
    OneDimensional { diffusion: f64, reset_rate: f64 },
    /// Radial diffusion in `R^dim` with an absorbing sphere of radius
    /// `target_radius` at distance `a` (the integration variable) from the
    /// reset point.
    Radial { diffusion: f64, reset_rate: f64, dim: u32, target_radius: f64 },
}

/// Spectral data at one target distance, stored in the forms that stay
/// finite when the eigenvalue underflows: `s = ln lambda0 + kappa a +
/// nu ln a` (the slowly varying residue after removing the exponential and
/// power trends) and `ln M`.
#[derive(Debug, Clone, Copy)]
struct SpectralPoint {
    shifted_log_lambda: f64,
    log_m: f64,
}

impl SearchModel {
    /// Line searcher with diffusion coefficient `diffusion` and reset rate
    /// `reset_rate`.
    pub fn one_dimensional(diffusion: f64, reset_rate: f64) -> Result<Self, TargetError> {
        // Delegate validation to the parameter type at a probe distance.
        Params1d::new(diffusion, reset_rate, 1.0)?;
        Ok(SearchModel::OneDimensional { diffusion, reset_rate })
    }

    /// Radial searcher in `R^dim` with detection radius `target_radius`.
    pub fn radial(
        diffusion: f64,
        reset_rate: f64,
        dim: u32,
        target_radius: f64,
    ) -> Result<Self, TargetError> {
        ParamsRadial::new(diffusion, reset_rate, dim, target_radius, 2.0 * target_radius)?;
        Ok(SearchModel::Radial { diffusion, reset_rate, dim, target_radius })
    }

    /// Ambient dimension.
    pub fn dim(&self) -> u32 {
        match *self {
            SearchModel::OneDimensional { .. } => 1,
            SearchModel::Radial { dim, .. } => dim,
        }
    }

    /// Asymptotic spatial decay rate `kappa = sqrt(2 r / D)` of the
    /// eigenvalue in the target distance.
    pub fn kappa(&self) -> f64 {
        let (d, r) = match *self {
            SearchModel::OneDimensional { diffusion, reset_rate } => (diffusion, reset_rate),
            SearchModel::Radial { diffusion, reset_rate, .. } => (diffusion, reset_rate),
        };
        (2.0 * r / d).sqrt()
    }

    /// Reset rate `r`.
    pub fn reset_rate(&self) -> f64 {
        match *self {
            SearchModel::OneDimensional { reset_rate, .. } => reset_rate,
            SearchModel::Radial { reset_rate, .. } => reset_rate,
        }
    }

    /// Exponent of the power-law trend `a^{-nu}` of the eigenvalue:
    /// `nu = (dim - 2)/2` for the radial model, 0 on the line.
    fn power_trend(&self) -> f64 {
        match *self {
            SearchModel::OneDimensional { .. } => 0.0,
            SearchModel::Radial { dim, .. } => (f64::from(dim) - 2.0) / 2.0,
        }
    }

    /// Smallest admissible target distance: 0 on the line, the detection
    /// radius for the radial model.
    fn support_floor(&self) -> f64 {
        match *self {
            SearchModel::OneDimensional { .. } => 0.0,
            SearchModel::Radial { target_radius, .. } => target_radius,
        }
    }

    /// Solve the spectral problem at target distance `a`.
    fn spectral_point(&self, a: f64) -> Result<SpectralPoint, TargetError> {
        let kappa = self.kappa();
        match *self {
            SearchModel::OneDimensional { diffusion, reset_rate } => {
                let sol = eigen1d::solve(Params1d::new(diffusion, reset_rate, a)?, 0.0)?;
                Ok(SpectralPoint {
                    shifted_log_lambda: sol.log_lambda0() + kappa * a,
                    log_m: sol.prefactor().ln(),
                })
            }
            SearchModel::Radial { diffusion, reset_rate, dim, target_radius } => {
                let params = ParamsRadial::new(diffusion, reset_rate, dim, target_radius, a)?;
                let sol = eigen_radial::solve(params, 0.0)?;
                let nu = self.power_trend();
                Ok(SpectralPoint {
                    shifted_log_lambda: sol.log_lambda0() + kappa * a + nu * a.ln(),
                    log_m: sol.prefactor(RADIAL_PREFACTOR_TOL)?.ln(),
                })
            }
        }
    }
}

/// Memoised spectral solves keyed by the bit pattern of the target distance;
/// the nested refinement grids reproduce coarse-level nodes bit-exactly, so
/// each level only pays for its new nodes.
struct SpectralCache<'m> {
    model: &'m SearchModel,
    nodes: BTreeMap<u64, SpectralPoint>,
}

impl<'m> SpectralCache<'m> {
    fn new(model: &'m SearchModel) -> Self {
        SpectralCache { model, nodes: BTreeMap::new() }
    }

    fn point(&mut self, a: f64) -> Result<SpectralPoint, TargetError> {
        if let Some(p) = self.nodes.get(&a.to_bits()) {
            return Ok(*p);
        }
        let p = self.model.spectral_point(a)?;
        self.nodes.insert(a.to_bits(), p);
        Ok(p)
    }
}

/// Log-integrand of the averaged failure probability in the radius variable:
/// `log marginal(a) - lambda0(a) t - ln M(a)`.
fn log_integrand(
    dist: &TargetDistribution,
    kappa: f64,
    nu: f64,
    ln_t: f64,
    a: f64,
    point: SpectralPoint,
) -> f64 {
    let log_lambda = point.shifted_log_lambda - kappa * a - nu * a.ln();
    // exp underflows to 0 for distant targets (harmless) and stays finite
    // even when lambda0 itself cannot be represented.
    let lambda_t = (log_lambda + ln_t).exp();
    dist.log_radial_marginal(a) - lambda_t - point.log_m
}

/// Integration window `[a_lo, a_hi]` containing every radius whose
/// log-integrand (in the log-radius variable) lies within
/// [`TRUNCATION_NATS`] of the maximum, plus the shift used to centre the
/// exponentials.
fn locate_window(
    dist: &TargetDistribution,
    model: &SearchModel,
    cache: &mut SpectralCache<'_>,
    t: f64,
) -> Result<(f64, f64, f64), TargetError> {
    let kappa = model.kappa();
    let nu = model.power_trend();
    let ln_t = t.ln();
    let floor = model.support_floor();
    let scale = 1.0 / kappa;
    let b = dist.tail_coefficient();
    let l = dist.stretch_exponent();

    let mut lo = if floor > 0.0 { floor * (1.0 + 1e-9) } else { 1e-6 * scale };
    let tail_reach = ((TRUNCATION_NATS + 25.0) / b).powf(1.0 / l);
    let mut hi = (scale * ((model.reset_rate() * t).ln_1p() + 15.0))
        .max(tail_reach)
        .max(4.0 * lo)
        .max(floor + 10.0 * scale);

    for _ in 0..WINDOW_PASS_CAP {
        let (ulo, uhi) = (lo.ln(), hi.ln());
        let mut w = [0.0f64; PROBE_COUNT];
        let mut radii = [0.0f64; PROBE_COUNT];
        for (k, (wk, rk)) in w.iter_mut().zip(radii.iter_mut()).enumerate() {
            let u = ulo + (uhi - ulo) * k as f64 / (PROBE_COUNT - 1) as f64;
            let a = u.exp();
            *rk = a;
            *wk = log_integrand(dist, kappa, nu, ln_t, a, cache.point(a)?) + u;
        }
        let (imax, &wmax) = w
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("probe array is non-empty");

        // Peak pinned to an end: the window lies (partly) outside [lo, hi].
        if imax + 1 == PROBE_COUNT {
            hi *= 4.0;
            continue;
        }
        let can_lower = |lo: f64| -> Option<f64> {
            if floor > 0.0 {
                let gap = lo - floor;
                (gap > floor * 1e-11).then(|| floor + gap / 64.0)
            } else {
                (lo > 1e-250 * scale).then(|| lo / 1e3)
            }
        };
        if imax == 0 {
            if let Some(lower) = can_lower(lo) {
                lo = lower;
                continue;
            }
        }

        // Walk outwards to the truncation threshold.
        let cutoff = wmax - TRUNCATION_NATS;
        let left = (0..imax).rev().find(|&k| w[k] <= cutoff);
        let right = (imax + 1..PROBE_COUNT).find(|&k| w[k] <= cutoff);
        match (left, right) {
            (Some(i), Some(j)) => return Ok((radii[i], radii[j], wmax)),
            (None, _) if imax > 0 && can_lower(lo).is_some() => {
                lo = can_lower(lo).expect("checked above");
            }
            (None, Some(j)) => return Ok((radii[0], radii[j], wmax)),
            (_, None) => hi *= 1.7,
        }
    }
    Err(TargetError::NotConverged {
        what: "integration window search",
        last_change: hi,
        tol: TRUNCATION_NATS,
    })
}

fn validate_common(
    dist: &TargetDistribution,
    model: &SearchModel,
    t: f64,
    quad_tol: f64,
) -> Result<(), TargetError> {
    if dist.dim() != model.dim() {
        return Err(TargetError::DimensionMismatch {
            model_dim: model.dim(),
            dist_dim: dist.dim(),
        });
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(TargetError::InvalidParameter {
            name: "t",
            value: t,
            requirement: "must be finite and > 0",
        });
    }
    if !quad_tol.is_finite() || quad_tol <= 0.0 || quad_tol > 0.5 {
        return Err(TargetError::InvalidParameter {
            name: "quad_tol",
            value: quad_tol,
            requirement: "must be in (0, 0.5]",
        });
    }
    Ok(())
}

/// `ln` of the averaged failure integral
/// `integral (1/M(a)) exp(-lambda0(a) t) marginal(a) da`, uncapped.
///
/// The spectral data are solved exactly on nested geometric grids and
/// interpolated with shape-preserving cubics; grids refine until the result
/// changes by less than `quad_tol` relatively. See [`failure_probability`]
/// for the regime guidance.
pub fn log_failure_probability(
    dist: &TargetDistribution,
    model: &SearchModel,
    t: f64,
    quad_tol: f64,
) -> Result<f64, TargetError> {
    validate_common(dist, model, t, quad_tol)?;
    let kappa = model.kappa();
    let nu = model.power_trend();
    let ln_t = t.ln();
    let mut cache = SpectralCache::new(model);
    let (a_lo, a_hi, shift) = locate_window(dist, model, &mut cache, t)?;
    let (ulo, uhi) = (a_lo.ln(), a_hi.ln());

    let mut previous: Option<f64> = None;
    let mut last_change = f64::INFINITY;
    for &n in &LEVELS {
        // Bit-exact nesting: the spacing is the coarse spacing divided by a
        // power of two, so even-indexed nodes reproduce the previous level.
        let du = (uhi - ulo) / (n - 1) as f64;
        let mut us = Vec::with_capacity(n);
        let mut s_vals = Vec::with_capacity(n);
        let mut m_vals = Vec::with_capacity(n);
        for k in 0..n {
            let u = if k + 1 == n { uhi } else { ulo + du * k as f64 };
            let p = cache.point(u.exp())?;
            us.push(u);
            s_vals.push(p.shifted_log_lambda);
            m_vals.push(p.log_m);
        }
        let s_fit = MonotoneCubic::fit(&us, &s_vals)?;
        let m_fit = MonotoneCubic::fit(&us, &m_vals)?;

        let integrand = |u: f64| {
            let a = u.exp();
            let point =
                SpectralPoint { shifted_log_lambda: s_fit.eval(u), log_m: m_fit.eval(u) };
            (log_integrand(dist, kappa, nu, ln_t, a, point) + u - shift).exp()
        };
        let quad = adaptive_simpson(integrand, ulo, uhi, quad_tol * 0.05, 0.0)?;
        let log_f = shift + quad.value.ln();

        if let Some(prev) = previous {
            last_change = f64::exp_m1(log_f - prev).abs();
            if last_change <= quad_tol {
                return Ok(log_f);
            }
        }
        previous = Some(log_f);
    }
    Err(TargetError::NotConverged {
        what: "spectral-table refinement",
        last_change,
        tol: quad_tol,
    })
}

/// Probability that the searcher has not located the random target by time
/// `t`, i.e. the survival tail averaged over the target law.
///
/// The integrand is the large-`t` spectral asymptote `(1/M) exp(-lambda0 t)`;
/// guidance for its validity is `lambda0(a) t >= 3` at the radii carrying
/// the bulk of the target law. Outside that regime the asymptote can
/// overshoot the true probability, so the returned value is capped at 1;
/// [`log_failure_probability`] exposes the uncapped integral.
pub fn failure_probability(
    dist: &TargetDistribution,
    model: &SearchModel,
    t: f64,
    quad_tol: f64,
) -> Result<f64, TargetError> {
    Ok(log_failure_probability(dist, model, t, quad_tol)?.exp().min(1.0))
}

/// Scaling functional `log F(t) / (log t)^l` of the uncapped failure
/// integral; converges to `-B (D/2r)^{l/2}` as `t -> infinity`, in any
/// dimension. Requires `t > e` so the normalisation by `(log t)^l` is
/// meaningful. Uses an internal relative tolerance of `1e-7`.
pub fn scaling_functional(
    dist: &TargetDistribution,
    model: &SearchModel,
    t: f64,
) -> Result<f64, TargetError> {
    scaling_functional_with_tolerance(dist, model, t, DEFAULT_QUAD_TOL)
}

/// [`scaling_functional`] with an explicit refinement tolerance.
pub fn scaling_functional_with_tolerance(
    dist: &TargetDistribution,
    model: &SearchModel,
    t: f64,
    quad_tol: f64,
) -> Result<f64, TargetError> {
    if !t.is_finite() || t <= std::f64::consts::E {
        return Err(TargetError::InvalidParameter {
            name: "t",
            value: t,
            requirement: "must be finite and > e",
        });
    }
    let log_f = log_failure_probability(dist, model, t, quad_tol)?;
    Ok(log_f / t.ln().powf(dist.stretch_exponent()))
}

/// Effective exponential-tail parameters `(kappa, R)` of the eigenvalue at a
/// reference distance: `kappa = sqrt(2r/D)` and `R` such that
/// `R exp(-kappa a_ref) = lambda0(a_ref)`. On the line `R -> r` for distant
/// references; radially it carries the power-law prefactor at `a_ref`.
pub fn effective_laplace_parameters(
    model: &SearchModel,
    reference_radius: f64,
) -> Result<(f64, f64), TargetError> {
    if !reference_radius.is_finite() || reference_radius <= model.support_floor() {
        return Err(TargetError::InvalidParameter {
            name: "reference_radius",
            value: reference_radius,
            requirement: "must be finite and beyond the model's smallest target distance",
        });
    }
    let point = model.spectral_point(reference_radius)?;
    let r_eff = (point.shifted_log_lambda - model.power_trend() * reference_radius.ln()).exp();
    Ok((model.kappa(), r_eff))
}

/// Interior minimiser of the exponent `gamma_t(a) = R t exp(-kappa a) +
/// B a^l` together with the attained minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacePoint {
    /// Time at which the exponent was minimised.
    pub t: f64,
    /// Location of the global interior minimum.
    pub a_star: f64,
    /// `gamma_t(a_star)`.
    pub gamma_at_star: f64,
    /// Spatial decay rate of the exponential term.
    pub kappa: f64,
    /// Prefactor `R` of the exponential term.
    pub prefactor: f64,
}

/// `ln(kappa R t / (l B))`, the constant of the stationarity condition, via
/// logs so extreme `t` cannot overflow the product.
fn log_rate_ratio(
    tail_coefficient: f64,
    stretch_exponent: f64,
    kappa: f64,
    prefactor: f64,
    t: f64,
) -> f64 {
    kappa.ln() + prefactor.ln() + t.ln() - stretch_exponent.ln() - tail_coefficient.ln()
}

/// Stationarity condition in log form:
/// `phi(a) = ln(kappa R t / (l B)) - kappa a - (l - 1) ln a`, whose roots on
/// `a > 0` are exactly the critical points of `gamma_t`.
fn stationarity(
    tail_coefficient: f64,
    stretch_exponent: f64,
    kappa: f64,
    prefactor: f64,
    t: f64,
) -> impl Fn(f64) -> f64 {
    let log_ratio = log_rate_ratio(tail_coefficient, stretch_exponent, kappa, prefactor, t);
    move |a: f64| log_ratio - kappa * a - (stretch_exponent - 1.0) * a.ln()
}

fn validate_laplace(
    tail_coefficient: f64,
    stretch_exponent: f64,
    kappa: f64,
    prefactor: f64,
    t: f64,
) -> Result<(), TargetError> {
    for (name, value) in [
        ("tail_coefficient", tail_coefficient),
        ("stretch_exponent", stretch_exponent),
        ("kappa", kappa),
        ("prefactor", prefactor),
        ("t", t),
    ] {
        if !value.is_finite() || value <= 0.0 {
            return Err(TargetError::InvalidParameter {
                name,
                value,
                requirement: "must be finite and > 0",
            });
        }
    }
    Ok(())
}

/// Global interior minimiser of `gamma_t(a) = R t exp(-kappa a) + B a^l`
/// over `a > 0`.
///
/// For `l >= 1` the critical point is unique (for `l = 1` it exists only
/// once `kappa R t > B`). For `l < 1` the stationarity curve is strictly
/// concave in log form with its maximum at `a_c = (1 - l)/kappa`: two
/// critical points exist exactly when it is positive there — the smaller is
/// a relative maximum, the larger the global minimum. Below that time
/// threshold (and for `l = 1` with `kappa R t <= B`) the exponent has no
/// interior minimum and [`TargetError::PreAsymptotic`] is returned.
pub fn laplace_minimize(
    tail_coefficient: f64,
    stretch_exponent: f64,
    kappa: f64,
    prefactor: f64,
    t: f64,
) -> Result<LaplacePoint, TargetError> {
    validate_laplace(tail_coefficient, stretch_exponent, kappa, prefactor, t)?;
    let phi = stationarity(tail_coefficient, stretch_exponent, kappa, prefactor, t);
    let l = stretch_exponent;

    let a_star = if l == 1.0 {
        // phi is linear: root in closed form (phi itself is NaN at a = 0).
        let a = log_rate_ratio(tail_coefficient, l, kappa, prefactor, t) / kappa;
        if a <= 0.0 {
            return Err(TargetError::PreAsymptotic { t });
        }
        a
    } else {
        // Left end of the bracket: for l > 1, phi -> +inf towards 0; for
        // l < 1 the two-root criterion is phi > 0 at the concave maximum.
        let mut lo = if l > 1.0 {
            let mut lo = 1.0 / kappa;
            let mut shrink = 0;
            while phi(lo) <= 0.0 {
                lo /= 8.0;
                shrink += 1;
                if shrink > 600 {
                    return Err(TargetError::PreAsymptotic { t });
                }
            }
            lo
        } else {
            let a_c = (1.0 - l) / kappa;
            if phi(a_c) <= 0.0 {
                return Err(TargetError::PreAsymptotic { t });
            }
            a_c
        };
        let mut hi = 2.0 * lo.max(1.0 / kappa);
        let mut grow = 0;
        while phi(hi) >= 0.0 {
            lo = hi;
            hi *= 2.0;
            grow += 1;
            if grow > 600 {
                return Err(TargetError::NotConverged {
                    what: "stationarity bracket growth",
                    last_change: hi,
                    tol: 0.0,
                });
            }
        }
        brent(&phi, lo, hi, BrentConfig::default())?.x
    };

    // gamma at the root, with the exponential term via logs so huge R t
    // cannot overflow on the way in.
    let gamma_at_star = (prefactor.ln() + t.ln() - kappa * a_star).exp()
        + tail_coefficient * a_star.powf(l);
    Ok(LaplacePoint { t, a_star, gamma_at_star, kappa, prefactor })
}

/// Explicit asymptotic bounds on `ln integral_0^inf exp(-gamma_t(a)) da`
/// together with the directly integrated value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceBounds {
    /// `ln alpha - max(0, l-1) ln ln t - (1 + eps) B (ln t / kappa)^l - 1`.
    pub lower_log: f64,
    /// `ln[(1+eps)(ln t / kappa) + (ln t / kappa)^{1-l}/(l B)] - (1 - eps) B (ln t / kappa)^l`.
    pub upper_log: f64,
    /// `ln` of the integral by adaptive quadrature (relative `1e-10`).
    pub integral_log: f64,
    /// Whether `lower_log <= integral_log <= upper_log`. The bounds hold
    /// only for large `t`; a `false` here at moderate `t` reports honestly
    /// that the asymptotic regime has not set in for this `eps`.
    pub bracketed: bool,
}

/// Evaluate the explicit lower/upper bounds on the Laplace integral
/// `integral_0^inf exp(-R t e^{-kappa a} - B a^l) da` for a supplied
/// slack `epsilon` and lower-bound constant `alpha`, and verify them
/// against direct quadrature. Requires `t > 1` so `ln t > 0`.
pub fn laplace_bound_check(
    tail_coefficient: f64,
    stretch_exponent: f64,
    kappa: f64,
    prefactor: f64,
    t: f64,
    epsilon: f64,
    alpha: f64,
) -> Result<LaplaceBounds, TargetError> {
    validate_laplace(tail_coefficient, stretch_exponent, kappa, prefactor, t)?;
    if t <= 1.0 {
        return Err(TargetError::InvalidParameter {
            name: "t",
            value: t,
            requirement: "must be > 1",
        });
    }
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(TargetError::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            requirement: "must be in (0, 1)",
        });
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(TargetError::InvalidParameter {
            name: "alpha",
            value: alpha,
            requirement: "must be finite and > 0",
        });
    }
    let (b, l) = (tail_coefficient, stretch_exponent);
    let big_l = t.ln() / kappa;
    let lower_log =
        alpha.ln() - (l - 1.0).max(0.0) * t.ln().ln() - (1.0 + epsilon) * b * big_l.powf(l) - 1.0;
    let upper_log = ((1.0 + epsilon) * big_l + big_l.powf(1.0 - l) / (l * b)).ln()
        - (1.0 - epsilon) * b * big_l.powf(l);

    // Direct integration, shifted by the exponent minimum. The minimiser
    // may not exist yet at small t; then the integrand peaks at a = 0.
    let gamma = |a: f64| (prefactor.ln() + t.ln() - kappa * a).exp() + b * a.powf(l);
    let centre = match laplace_minimize(b, l, kappa, prefactor, t) {
        Ok(point) => point.a_star,
        Err(TargetError::PreAsymptotic { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    let g0 = gamma(centre);
    let mut end = (centre * 2.0)
        .max(((g0.abs() + 60.0) / b).powf(1.0 / l))
        .max(2.0 / kappa);
    let mut grow = 0;
    while gamma(end) - g0 < 60.0 {
        end *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(TargetError::NotConverged {
                what: "bound-check integration window",
                last_change: end,
                tol: 60.0,
            });
        }
    }
    let f = |a: f64| (-(gamma(a) - g0)).exp();
    let head = adaptive_simpson(f, 0.0, centre, 1e-10, 0.0)?;
    let tail = adaptive_simpson(f, centre, end, 1e-10, 0.0)?;
    let integral_log = -g0 + (head.value + tail.value).ln();

    Ok(LaplaceBounds {
        lower_log,
        upper_log,
        integral_log,
        bracketed: lower_log <= integral_log && integral_log <= upper_log,
    })
}
