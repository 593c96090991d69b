//! One-dimensional search: principal eigenvalue and eigenfunctions in
//! closed form.
//!
//! A Brownian searcher with diffusion constant `D` starts at the origin, is
//! reset there at rate `r`, and stops on first contact with a point target at
//! distance `a`. Conditioned on not yet having found the target, the process
//! relaxes to a quasi-stationary state, and the search-time tail is exactly
//! exponential:
//!
//! ```text
//! P(tau > t) ~ (1/M) exp(-lambda0 t),    t -> infinity,
//! ```
//!
//! where `lambda0` is the unique root in `(0, r)` of the transcendental
//! equation
//!
//! ```text
//! lambda = r exp(-a q(lambda)),    q(lambda) = sqrt(2 (r - lambda) / D),
//! ```
//!
//! and the prefactor `M` is the overlap integral of the principal
//! eigenfunction `u` against the adjoint eigenfunction `v`, normalised by the
//! mass of `v`. All three objects have closed forms, implemented here:
//!
//! ```text
//! u(x) = rho (1 - exp(-q (a - x))),            rho = r / (r - lambda0),
//! v(y) = exp(q y)                              for y < 0,
//! v(y) = sinh(q (a - y)) / sinh(q a)           for 0 <= y <= a,
//! M    = (2 - (2 + q a) exp(-q a)) / (2 (1 - lambda0/r)^2).
//! ```
//!
//! `u` is normalised so that `u(0) = 1`, which makes
//! `exp(lambda0 t) E[u(X_t); tau > t] = 1` for all `t`: a martingale identity
//! that the Monte Carlo module cross-checks trajectory-by-trajectory.
//!
//! The distance only enters through `|a|`; the problem is symmetric under
//! reflection, and constructors fold the sign.

use crate::roots::{brent, BrentConfig, RootError};
use thiserror::Error;

/// Error raised by the one-dimensional solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Eigen1dError {
    /// A model parameter was non-finite or out of range.
    #[error("invalid parameter {name} = {value}: {requirement}")]
    InvalidParameter { name: &'static str, value: f64, requirement: &'static str },
    /// The eigenvalue bracketing failed (indicates a bug: the bracket is
    /// analytically guaranteed).
    #[error("eigenvalue solve failed: {0}")]
    Root(#[from] RootError),
    /// A requested value exceeds the range of `f64`.
    #[error("{what} overflows f64 for these parameters")]
    Overflow { what: &'static str },
    /// Evaluation point outside the natural domain.
    #[error("point {x} lies beyond the absorbing target at {limit}")]
    BeyondTarget { x: f64, limit: f64 },
}

/// Validated parameters of the one-dimensional problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params1d {
    diffusion: f64,
    reset_rate: f64,
    distance: f64,
}

impl Params1d {
    /// Diffusion constant `D > 0`, reset rate `r > 0`, target coordinate
    /// `a != 0` (the sign is dropped: the problem is reflection-symmetric).
    pub fn new(diffusion: f64, reset_rate: f64, distance: f64) -> Result<Self, Eigen1dError> {
        check_positive("diffusion", diffusion)?;
        check_positive("reset_rate", reset_rate)?;
        if !distance.is_finite() || distance == 0.0 {
            return Err(Eigen1dError::InvalidParameter {
                name: "distance",
                value: distance,
                requirement: "must be finite and nonzero",
            });
        }
        Ok(Self { diffusion, reset_rate, distance: distance.abs() })
    }

    /// Diffusion constant `D`.
    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    /// Reset rate `r`.
    pub fn reset_rate(&self) -> f64 {
        self.reset_rate
    }

    /// Target distance `|a|`.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// `sqrt(2 r / D)`: inverse of the natural length scale. The eigenvalue
    /// obeys the a-priori bound `lambda0 >= r exp(-a sqrt(2r/D))`.
    pub fn inverse_length_scale(&self) -> f64 {
        (2.0 * self.reset_rate / self.diffusion).sqrt()
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), Eigen1dError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Eigen1dError::InvalidParameter {
            name,
            value,
            requirement: "must be finite and > 0",
        });
    }
    Ok(())
}

/// Solved one-dimensional spectral problem.
#[derive(Debug, Clone, Copy)]
pub struct Eigen1d {
    params: Params1d,
    lambda0: f64,
    decay_rate: f64,
    residual: f64,
    /// `1 - lambda0 / r`, held as `-expm1(-q a)` to avoid cancellation.
    rho_inv: f64,
}

/// Solve the eigenvalue equation for the given parameters.
///
/// `residual_tol` bounds the accepted defect `|lambda - r exp(-a q)|`; pass
/// `0.0` to iterate to machine precision in the abscissa (the residual then
/// lands within a few ulps of `r`). The root always lies in `[0, r)` and the
/// bracket used is analytically guaranteed, so this only fails on invalid
/// tolerances.
pub fn solve(params: Params1d, residual_tol: f64) -> Result<Eigen1d, Eigen1dError> {
    if !residual_tol.is_finite() || residual_tol < 0.0 {
        return Err(Eigen1dError::InvalidParameter {
            name: "residual_tol",
            value: residual_tol,
            requirement: "must be finite and >= 0",
        });
    }
    let (d, r, a) = (params.diffusion, params.reset_rate, params.distance);
    let q_of = |lambda: f64| (2.0 * (r - lambda).max(0.0) / d).sqrt();
    let defect = |lambda: f64| r * (-a * q_of(lambda)).exp() - lambda;

    // Degenerate corner: target within ~1e-8 diffusion lengths of the
    // origin. Then lambda0 = r (1 - eps) with eps = 2 a^2 r / D below f64
    // resolution of the bracket, and the expansion of the eigenvalue
    // equation gives the root directly.
    let eps = 2.0 * a * a * r / d;
    if eps < 1e-12 {
        let lambda0 = r * (1.0 - eps);
        // q from the expansion, not q_of(lambda0): r (1 - eps) rounds back
        // to r once eps < 1e-16 and q_of would collapse to 0, poisoning the
        // prefactor. sqrt(2 r eps / D) = 2 a r / D exactly.
        let decay_rate = 2.0 * a * r / d;
        return Ok(Eigen1d {
            params,
            lambda0,
            decay_rate,
            residual: defect(lambda0).abs(),
            rho_inv: -f64::exp_m1(-a * decay_rate),
        });
    }

    // defect(0) = r exp(-a sqrt(2r/D)) >= 0 and the defect is strictly
    // negative just below r, so [0, r(1 - 5 ulp)] always brackets.
    let hi = r * (1.0 - 5e-16);
    let cfg = BrentConfig { x_tol: 0.0, f_tol: residual_tol, max_iter: 200 };
    let root = brent(defect, 0.0, hi, cfg)?;
    let lambda0 = root.x;
    let decay_rate = q_of(lambda0);
    Ok(Eigen1d {
        params,
        lambda0,
        decay_rate,
        residual: root.f_x.abs(),
        rho_inv: -f64::exp_m1(-a * decay_rate),
    })
}

impl Eigen1d {
    /// The parameters this solution belongs to.
    pub fn params(&self) -> &Params1d {
        &self.params
    }

    /// Principal eigenvalue `lambda0 in [0, r)`.
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// `ln lambda0`, exact even where `lambda0` underflows `f64`: at the
    /// root, `ln lambda0 = ln r - a q`.
    pub fn log_lambda0(&self) -> f64 {
        self.params.reset_rate.ln() - self.params.distance * self.decay_rate
    }

    /// Spatial decay rate `q = sqrt(2 (r - lambda0) / D)`.
    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    /// Defect `|lambda0 - r exp(-a q)|` at the accepted root.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Principal eigenfunction `u(x) = rho (1 - exp(-q (a - x)))` for
    /// `x <= a`, normalised so `u(0) = 1`. Vanishes at the target and
    /// saturates at `rho = r / (r - lambda0)` far behind the origin.
    pub fn eigenfunction(&self, x: f64) -> Result<f64, Eigen1dError> {
        let a = self.params.distance;
        if !x.is_finite() || x > a {
            return Err(Eigen1dError::BeyondTarget { x, limit: a });
        }
        Ok(-f64::exp_m1(-self.decay_rate * (a - x)) / self.rho_inv)
    }

    /// Adjoint eigenfunction (quasi-stationary density up to normalisation):
    /// `exp(q y)` behind the origin, `sinh(q (a - y)) / sinh(q a)` between
    /// origin and target, continuous with `v(0) = 1` and `v(a) = 0`. The
    /// derivative jump at the origin carries the resetting source.
    pub fn adjoint_eigenfunction(&self, y: f64) -> Result<f64, Eigen1dError> {
        let a = self.params.distance;
        let q = self.decay_rate;
        if !y.is_finite() || y > a {
            return Err(Eigen1dError::BeyondTarget { x: y, limit: a });
        }
        if y < 0.0 {
            Ok((q * y).exp())
        } else {
            // sinh-ratio in overflow-safe form:
            // exp(-q y) expm1(-2 q (a - y)) / expm1(-2 q a).
            Ok((-q * y).exp() * f64::exp_m1(-2.0 * q * (a - y)) / f64::exp_m1(-2.0 * q * a))
        }
    }

    /// Tail prefactor `M`: the overlap `integral(u v) / integral(v)`. In
    /// closed form `M = (2 - (2 + qa) e^{-qa}) / (2 (1 - lambda0/r)^2)`,
    /// evaluated here in a cancellation- and overflow-free arrangement.
    ///
    /// `M` diverges as the target approaches the origin, crosses below 1
    /// near `a ~ 1.4 sqrt(D/2r)` and tends to 1 from below for distant
    /// targets.
    pub fn prefactor(&self) -> f64 {
        let s = self.decay_rate * self.params.distance;
        let numerator = -2.0 * f64::exp_m1(-s) - s * (-s).exp();
        numerator / (2.0 * self.rho_inv * self.rho_inv)
    }

    /// Leading large-`t` survival probability `exp(-lambda0 t) / M`.
    pub fn survival_asymptote(&self, t: f64) -> Result<f64, Eigen1dError> {
        if !t.is_finite() || t < 0.0 {
            return Err(Eigen1dError::InvalidParameter {
                name: "t",
                value: t,
                requirement: "must be finite and >= 0",
            });
        }
        Ok((-self.lambda0 * t).exp() / self.prefactor())
    }
}

/// Mean search time `(exp(a sqrt(2r/D)) - 1) / r`.
///
/// Exact for every parameter choice (no asymptotics involved); errors if the
/// exponential exceeds `f64` range.
pub fn mean_search_time(params: Params1d) -> Result<f64, Eigen1dError> {
    let exponent = params.distance * params.inverse_length_scale();
    let value = f64::exp_m1(exponent) / params.reset_rate;
    if !value.is_finite() {
        return Err(Eigen1dError::Overflow { what: "mean search time" });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference solutions computed with 40-digit arithmetic.
    /// Columns: D, r, a, lambda0, prefactor M.
    const REFERENCE: &[(f64, f64, f64, f64, f64)] = &[
        (1.0, 1.0, 1.0, 0.30850971584524494, 1.0667716617861191),
        (1.0, 1.0, 2.0, 0.06488584255470477, 0.9679110627868920),
        (1.0, 1.0, 0.5, 0.66354850632856706, 1.7700872479089197),
        (4.0, 0.5, 5.0, 0.04619617425138100, 0.9682307900159486),
        (0.25, 2.0, 10.0, 8.496708510583179e-18, 0.9999999999999999),
        (1.0, 2.0, 2.0, 0.03805926426708297, 0.9802267108439243),
        (4.0, 2.0, 0.5, 1.59866108586066237, 2.7602936074956503),
        (0.25, 0.5, 1.0, 0.07995651562530514, 0.9826716052026921),
    ];

    fn solve_ref(d: f64, r: f64, a: f64) -> Eigen1d {
        solve(Params1d::new(d, r, a).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn matches_reference_eigenvalues_and_prefactors() {
        for &(d, r, a, lambda_ref, m_ref) in REFERENCE {
            let sol = solve_ref(d, r, a);
            let rel = ((sol.lambda0() - lambda_ref) / lambda_ref).abs();
            assert!(rel < 1e-13, "lambda0({d},{r},{a}): rel err {rel:e}");
            let m = sol.prefactor();
            let rel_m = ((m - m_ref) / m_ref).abs();
            assert!(rel_m < 1e-13, "M({d},{r},{a}): rel err {rel_m:e}");
        }
    }

    #[test]
    fn residual_is_tiny_at_machine_solve() {
        for &(d, r, a, _, _) in REFERENCE {
            let sol = solve_ref(d, r, a);
            assert!(
                sol.residual() <= 1e-14 * r,
                "residual {:e} too large for ({d},{r},{a})",
                sol.residual()
            );
            // And the defect recomputed from the stored fields agrees.
            let q = sol.decay_rate();
            let defect = (sol.lambda0() - r * (-a * q).exp()).abs();
            assert!(defect <= 1e-14 * r);
        }
    }

    #[test]
    fn eigenvalue_respects_a_priori_bounds() {
        for &(d, r, a, _, _) in REFERENCE {
            let p = Params1d::new(d, r, a).unwrap();
            let sol = solve(p, 0.0).unwrap();
            let lower = r * (-a * p.inverse_length_scale()).exp();
            assert!(sol.lambda0() >= lower * (1.0 - 1e-12));
            assert!(sol.lambda0() < r);
        }
    }

    #[test]
    fn eigenfunction_normalisation_and_shape() {
        let sol = solve_ref(1.0, 1.0, 1.0);
        assert!((sol.eigenfunction(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(sol.eigenfunction(1.0).unwrap().abs() < 1e-15, "vanishes at target");
        // Saturates at rho behind the origin.
        let rho = 1.0 / (1.0 - sol.lambda0());
        assert!((sol.eigenfunction(-60.0).unwrap() - rho).abs() < 1e-12);
        // Monotone decreasing towards the target.
        let mut prev = sol.eigenfunction(-5.0).unwrap();
        for k in 1..=120 {
            let x = -5.0 + 6.0 * f64::from(k) / 120.0;
            let here = sol.eigenfunction(x).unwrap();
            assert!(here < prev);
            prev = here;
        }
        assert!(sol.eigenfunction(1.5).is_err());
    }

    #[test]
    fn adjoint_eigenfunction_values_and_continuity() {
        let sol = solve_ref(1.0, 1.0, 1.0);
        let q = sol.decay_rate();
        assert!((sol.adjoint_eigenfunction(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(sol.adjoint_eigenfunction(1.0).unwrap().abs() < 1e-15);
        // Continuity across the origin.
        let left = sol.adjoint_eigenfunction(-1e-9).unwrap();
        let right = sol.adjoint_eigenfunction(1e-9).unwrap();
        assert!((left - right).abs() < 1e-8);
        // Closed form inside: sinh(q (a - y)) / sinh(q a).
        for y in [0.1, 0.35, 0.7, 0.99] {
            let want = (q * (1.0 - y)).sinh() / q.sinh();
            let got = sol.adjoint_eigenfunction(y).unwrap();
            assert!(((got - want) / want).abs() < 1e-13);
        }
    }

    #[test]
    fn adjoint_derivative_jump_carries_reset_source() {
        // v'(0+) - v'(0-) = -2 q c with c = 1 / (1 - exp(-2 q a)).
        for &(d, r, a, _, _) in &REFERENCE[..4] {
            let sol = solve_ref(d, r, a);
            let q = sol.decay_rate();
            let c = -1.0 / f64::exp_m1(-2.0 * q * a);
            let h = 1e-6 * a;
            let v = |y: f64| sol.adjoint_eigenfunction(y).unwrap();
            let right = (-3.0 * v(0.0) + 4.0 * v(h) - v(2.0 * h)) / (2.0 * h);
            let left = (3.0 * v(0.0) - 4.0 * v(-h) + v(-2.0 * h)) / (2.0 * h);
            let jump = right - left;
            let want = -2.0 * q * c;
            assert!(
                ((jump - want) / want).abs() < 1e-7,
                "jump {jump} vs {want} at ({d},{r},{a})"
            );
        }
    }

    #[test]
    fn survival_asymptote_composes_eigenvalue_and_prefactor() {
        let sol = solve_ref(1.0, 1.0, 2.0);
        let t = 37.5;
        let direct = (-sol.lambda0() * t).exp() / sol.prefactor();
        assert_eq!(sol.survival_asymptote(t).unwrap(), direct);
        assert!(sol.survival_asymptote(f64::NAN).is_err());
        assert!(sol.survival_asymptote(-1.0).is_err());
    }

    #[test]
    fn mean_search_time_closed_form() {
        // (e^{sqrt 2} - 1) / 1 at D = r = a = 1.
        let met = mean_search_time(Params1d::new(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert!(((met - 3.1132503787829275) / met).abs() < 1e-15);
        // Overflow is reported, not returned as infinity.
        let far = Params1d::new(1e-6, 1.0, 1e3).unwrap();
        assert!(matches!(
            mean_search_time(far),
            Err(Eigen1dError::Overflow { .. })
        ));
    }

    #[test]
    fn distance_sign_is_folded() {
        let plus = solve_ref(1.0, 1.0, 1.0);
        let minus = solve(Params1d::new(1.0, 1.0, -1.0).unwrap(), 0.0).unwrap();
        assert_eq!(plus.lambda0(), minus.lambda0());
    }

    #[test]
    fn near_origin_target_degenerates_gracefully() {
        // a sqrt(2r/D) ~ 3e-7: lambda0 = r (1 - 2 a^2 r / D) to full accuracy.
        let p = Params1d::new(1.0, 1.0, 2e-7).unwrap();
        let sol = solve(p, 0.0).unwrap();
        let want = 1.0 - 2.0 * 4e-14;
        assert!(((sol.lambda0() - want) / want).abs() < 1e-13);
        assert!(sol.residual() < 1e-13);
    }

    #[test]
    fn parameter_validation() {
        assert!(Params1d::new(0.0, 1.0, 1.0).is_err());
        assert!(Params1d::new(1.0, -1.0, 1.0).is_err());
        assert!(Params1d::new(1.0, 1.0, 0.0).is_err());
        assert!(Params1d::new(f64::INFINITY, 1.0, 1.0).is_err());
        let p = Params1d::new(1.0, 1.0, 1.0).unwrap();
        assert!(solve(p, -1.0).is_err());
    }
}
