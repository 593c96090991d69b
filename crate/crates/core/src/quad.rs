//! Adaptive Simpson quadrature on finite intervals.
//!
//! Bisects recursively until the Richardson error estimate
//! `|S_half - S| / 15` falls below the local tolerance, then returns the
//! extrapolated value. Used for eigenfunction overlap integrals and for
//! integrating survival probabilities against target densities, all of which
//! are smooth away from isolated kinks that callers split at.

use thiserror::Error;

/// Error raised by [`adaptive_simpson`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    /// Interval ends were not finite and ordered.
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    /// The integrand returned NaN or infinity.
    #[error("integrand returned a non-finite value at x={x}")]
    NonFiniteIntegrand { x: f64 },
}

/// Result of a quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    /// Estimated integral.
    pub value: f64,
    /// Accumulated local error estimate (conservative).
    pub error_estimate: f64,
    /// Number of integrand evaluations.
    pub evaluations: u64,
}

const MAX_DEPTH: u32 = 60;

/// Integrate `f` over `[lo, hi]`.
///
/// Refines until the local error estimate is below
/// `max(rel_tol * |integral|, abs_tol)`, distributing the budget over
/// subintervals. `lo == hi` yields zero.
pub fn adaptive_simpson(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature, QuadError> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(QuadError::InvalidInterval { lo, hi });
    }
    if lo == hi {
        return Ok(Quadrature { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }

    let mut evals: u64 = 0;
    let mut eval = |x: f64| -> Result<f64, QuadError> {
        let y = f(x);
        evals += 1;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadError::NonFiniteIntegrand { x })
        }
    };

    // Magnitude pre-pass over 64 panels. The L1 estimate anchors the
    // relative tolerance (a naive 3-point estimate can undershoot by many
    // orders of magnitude when the mass sits in a narrow interior bump,
    // turning the relative tolerance into an unreachable absolute one), and
    // the panels seed the subdivision so that a bump much narrower than the
    // interval cannot hide between the first few Simpson points.
    const PANELS: usize = 64;
    let h = (hi - lo) / PANELS as f64;
    let mut nodes = [0.0f64; PANELS + 1];
    let mut values = [0.0f64; PANELS + 1];
    for (k, (x, v)) in nodes.iter_mut().zip(values.iter_mut()).enumerate() {
        *x = if k == PANELS { hi } else { lo + h * k as f64 };
        *v = eval(*x)?;
    }
    let panel_mass: Vec<f64> =
        (0..PANELS).map(|k| 0.5 * (values[k].abs() + values[k + 1].abs()) * h).collect();
    let magnitude: f64 = panel_mass.iter().sum();
    let tol = (rel_tol * magnitude).max(abs_tol);

    let mut err_acc = 0.0;
    let mut value = 0.0;
    for k in 0..PANELS {
        let (plo, phi) = (nodes[k], nodes[k + 1]);
        let pmid = 0.5 * (plo + phi);
        let f_mid = eval(pmid)?;
        let whole = (phi - plo) / 6.0 * (values[k] + 4.0 * f_mid + values[k + 1]);
        // Each panel gets the share of the budget its mass claims, floored
        // so empty panels (which accept immediately) keep a positive one.
        let share = if magnitude > 0.0 { (panel_mass[k] / magnitude).max(1.0 / 1024.0) } else { 1.0 };
        let panel = simpson_step(
            &mut eval,
            plo,
            phi,
            values[k],
            f_mid,
            values[k + 1],
            whole,
            tol * share,
            MAX_DEPTH,
            &mut err_acc,
        )?;
        value += panel;
    }
    Ok(Quadrature { value, error_estimate: err_acc, evaluations: evals })
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    eval: &mut impl FnMut(f64) -> Result<f64, QuadError>,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_mid: f64,
    f_hi: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    err_acc: &mut f64,
) -> Result<f64, QuadError> {
    let mid = 0.5 * (lo + hi);
    let lmid = 0.5 * (lo + mid);
    let rmid = 0.5 * (mid + hi);
    let f_lmid = eval(lmid)?;
    let f_rmid = eval(rmid)?;
    let left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lmid + f_mid);
    let right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rmid + f_hi);
    let delta = left + right - whole;

    // delta is computed by cancellation, so it carries rounding noise of a
    // few ulps of the local integral; demanding less than that would recurse
    // forever. Hence the machine floor on the acceptance threshold.
    let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
    // Interval too thin to split further, or estimate already good enough.
    if depth == 0 || delta.abs() <= (15.0 * tol).max(floor) || lmid <= lo || rmid >= hi {
        *err_acc += delta.abs() / 15.0;
        return Ok(left + right + delta / 15.0);
    }
    let half_tol = 0.5 * tol;
    let l = simpson_step(eval, lo, mid, f_lo, f_lmid, f_mid, left, half_tol, depth - 1, err_acc)?;
    let r = simpson_step(eval, mid, hi, f_mid, f_rmid, f_hi, right, half_tol, depth - 1, err_acc)?;
    Ok(l + r)
}
