//! Bracketing scalar root solver (Brent's method).
//!
//! Combines bisection, secant and inverse quadratic interpolation; given a
//! sign change the iteration always converges, with superlinear speed on the
//! smooth problems solved here (eigenvalue equations, Laplace saddle points).

use thiserror::Error;

/// Error raised by [`brent`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    /// `f` has the same sign at both bracket ends.
    #[error("no sign change on [{lo}, {hi}]: f(lo)={f_lo:e}, f(hi)={f_hi:e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    /// Bracket ends were not finite and ordered.
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    /// `f` returned a non-finite value during the iteration.
    #[error("objective returned a non-finite value at x={x}")]
    NonFiniteObjective { x: f64 },
    /// Iteration budget exhausted before the tolerance was met.
    #[error("no convergence within {max_iter} iterations (last x={x}, f={f:e})")]
    MaxIterations { max_iter: u32, x: f64, f: f64 },
}

/// Convergence controls for [`brent`].
#[derive(Debug, Clone, Copy)]
pub struct BrentConfig {
    /// Absolute half-width of the final interval (on top of an automatic
    /// floor of a few ulps of the iterate).
    pub x_tol: f64,
    /// Accept as soon as `|f| <= f_tol` (set to 0.0 to disable).
    pub f_tol: f64,
    /// Iteration cap.
    pub max_iter: u32,
}

impl Default for BrentConfig {
    fn default() -> Self {
        Self { x_tol: 0.0, f_tol: 0.0, max_iter: 200 }
    }
}

/// A converged root.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    /// Abscissa of the root.
    pub x: f64,
    /// Objective value at `x`.
    pub f_x: f64,
    /// Iterations consumed.
    pub iterations: u32,
}

/// Find a root of `f` on the bracket `[lo, hi]`.
///
/// Requires `f(lo)` and `f(hi)` of opposite sign (either may be zero).
pub fn brent(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    cfg: BrentConfig,
) -> Result<Root, RootError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(RootError::InvalidBracket { lo, hi });
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if !fa.is_finite() {
        return Err(RootError::NonFiniteObjective { x: a });
    }
    if !fb.is_finite() {
        return Err(RootError::NonFiniteObjective { x: b });
    }
    if fa == 0.0 {
        return Ok(Root { x: a, f_x: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, f_x: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoSignChange { lo, hi, f_lo: fa, f_hi: fb });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=cfg.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * cfg.x_tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= cfg.f_tol {
            return Ok(Root { x: b, f_x: fb, iterations: iter });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Attempt inverse quadratic / secant interpolation.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(RootError::NonFiniteObjective { x: b });
        }
    }
    Err(RootError::MaxIterations { max_iter: cfg.max_iter, x: b, f: fb })
}
