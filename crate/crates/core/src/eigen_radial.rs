//! Radially symmetric search in dimension `d >= 2`.
//!
//! The searcher diffuses in `R^d` with diffusion constant `D`, resets at rate
//! `r` to its starting point at distance `A` from the target centre, and is
//! absorbed on the sphere of radius `eps0 < A`. By symmetry everything
//! reduces to the radial coordinate, and the principal eigenvalue solves
//!
//! ```text
//! lambda = r (A/eps0)^{-nu} K_nu(q A) / K_nu(q eps0),
//! q = sqrt(2 (r - lambda) / D),    nu = (d - 2) / 2,
//! ```
//!
//! with `K_nu` the modified Bessel function of the second kind. In `d = 3`
//! (`nu = 1/2`) this collapses to `lambda = r (eps0/A) exp(-q (A - eps0))`.
//!
//! The principal eigenfunction (normalised to 1 at the reset radius) is
//!
//! ```text
//! U(x) = rho (1 - (x/eps0)^{-nu} K_nu(q x) / K_nu(q eps0)),
//! rho  = r / (r - lambda0),
//! ```
//!
//! and the adjoint eigenfunction is supported on `[eps0, infinity)` with a
//! kink at the reset radius where the resetting source re-injects mass:
//!
//! ```text
//! V(x) ∝ x^{d/2} [I_nu(q eps0) K_nu(q x) - I_nu(q x) K_nu(q eps0)],  x <= A,
//! V(x) ∝ x^{d/2} K_nu(q x),                                         x >= A,
//! ```
//!
//! glued continuously, normalised here so `V(A) = 1`, and satisfying the flux
//! identity `V'(A+) - V'(A-) = -(2r/D) integral(V)`. The survival prefactor
//! is `M = integral(U V) / integral(V)` (radial line integrals), computed by
//! adaptive quadrature split at the kink.
//!
//! All Bessel evaluations go through the scaled forms `e^{-z} I`, `e^{z} K`
//! with the exponentials regrouped analytically, so arguments `q A` of
//! several hundred cause no over- or underflow.

use crate::bessel::{bessel_ik_scaled, BesselError, BesselOrder};
use crate::quad::{adaptive_simpson, QuadError};
use crate::roots::{brent, BrentConfig, RootError};
use thiserror::Error;

/// Error raised by the radial solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenRadialError {
    /// A model parameter was non-finite or out of range.
    #[error("invalid parameter {name} = {value}: {requirement}")]
    InvalidParameter { name: &'static str, value: f64, requirement: &'static str },
    /// Dimension outside `2..=40` (orders beyond that would need log-space
    /// Bessel evaluation near the `lambda -> r` end of the bracket).
    #[error("dimension {0} unsupported: must be between 2 and 40")]
    UnsupportedDimension(u32),
    /// Underlying Bessel evaluation failed.
    #[error("bessel evaluation failed: {0}")]
    Bessel(#[from] BesselError),
    /// Eigenvalue bracketing failed.
    #[error("eigenvalue solve failed: {0}")]
    Root(#[from] RootError),
    /// Quadrature for the prefactor failed.
    #[error("prefactor quadrature failed: {0}")]
    Quad(#[from] QuadError),
    /// Evaluation point outside `[eps0, infinity)`.
    #[error("radius {x} lies inside the absorbing ball of radius {eps0}")]
    InsideTarget { x: f64, eps0: f64 },
}

/// Validated parameters of the radial problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamsRadial {
    diffusion: f64,
    reset_rate: f64,
    dim: u32,
    target_radius: f64,
    reset_radius: f64,
}

impl ParamsRadial {
    /// Diffusion constant `D > 0`, reset rate `r > 0`, dimension `d >= 2`,
    /// target (absorbing-ball) radius `eps0 > 0` and reset radius
    /// `A > eps0`.
    pub fn new(
        diffusion: f64,
        reset_rate: f64,
        dim: u32,
        target_radius: f64,
        reset_radius: f64,
    ) -> Result<Self, EigenRadialError> {
        for (name, value) in [
            ("diffusion", diffusion),
            ("reset_rate", reset_rate),
            ("target_radius", target_radius),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(EigenRadialError::InvalidParameter {
                    name,
                    value,
                    requirement: "must be finite and > 0",
                });
            }
        }
        if !(2..=40).contains(&dim) {
            return Err(EigenRadialError::UnsupportedDimension(dim));
        }
        if !reset_radius.is_finite() || reset_radius <= target_radius {
            return Err(EigenRadialError::InvalidParameter {
                name: "reset_radius",
                value: reset_radius,
                requirement: "must be finite and > target_radius",
            });
        }
        Ok(Self { diffusion, reset_rate, dim, target_radius, reset_radius })
    }

    /// Diffusion constant `D`.
    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    /// Reset rate `r`.
    pub fn reset_rate(&self) -> f64 {
        self.reset_rate
    }

    /// Spatial dimension `d`.
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Absorbing-ball radius `eps0`.
    pub fn target_radius(&self) -> f64 {
        self.target_radius
    }

    /// Distance `A` from the target centre to the reset point.
    pub fn reset_radius(&self) -> f64 {
        self.reset_radius
    }

    /// Bessel order `nu = (d - 2) / 2`.
    pub fn order(&self) -> BesselOrder {
        BesselOrder::from_dimension(self.dim).expect("dimension validated at construction")
    }
}

/// Solved radial spectral problem.
#[derive(Debug, Clone, Copy)]
pub struct EigenRadial {
    params: ParamsRadial,
    lambda0: f64,
    decay_rate: f64,
    residual: f64,
    /// `log (lambda0 / r)` straight from the eigenvalue map; exact even
    /// where `lambda0` itself underflows `f64`.
    log_ratio: f64,
    /// `1 - lambda0/r` via `-expm1(log (lambda0 / r))`: cancellation-free.
    rho_inv: f64,
}

/// `log( (A/eps0)^{-nu} K_nu(q A) / K_nu(q eps0) )`, the log of the
/// eigenvalue map at decay rate `q`; `exp` of it is `lambda / r` at a root.
fn log_ratio(params: &ParamsRadial, q: f64) -> Result<f64, BesselError> {
    let nu = params.order();
    let eps0 = params.target_radius;
    let a = params.reset_radius;
    let (_, k_outer) = bessel_ik_scaled(nu, q * a)?;
    let (_, k_inner) = bessel_ik_scaled(nu, q * eps0)?;
    Ok(-nu.value() * (a / eps0).ln() - q * (a - eps0) + k_outer.ln() - k_inner.ln())
}

/// Solve the radial eigenvalue equation.
///
/// `residual_tol` bounds the accepted defect
/// `|lambda - r (A/eps0)^{-nu} K_nu(qA)/K_nu(q eps0)|`; pass `0.0` to iterate
/// to machine precision in the abscissa.
pub fn solve(params: ParamsRadial, residual_tol: f64) -> Result<EigenRadial, EigenRadialError> {
    if !residual_tol.is_finite() || residual_tol < 0.0 {
        return Err(EigenRadialError::InvalidParameter {
            name: "residual_tol",
            value: residual_tol,
            requirement: "must be finite and >= 0",
        });
    }
    let r = params.reset_rate;
    let d = params.diffusion;
    let q_of = |lambda: f64| (2.0 * (r - lambda).max(0.0) / d).sqrt();

    // The defect r exp(log_ratio) - lambda is positive at lambda = 0 (the
    // ratio is finite) and negative just below r, where q ~ 0 makes the
    // Bessel ratio approach (eps0/A)^{2 nu} < 1 (power law) or a ratio of
    // logarithms < 1 (d = 2). Non-finite Bessel failures surface through
    // brent as NonFiniteObjective; none occur for validated parameters.
    let defect = |lambda: f64| match log_ratio(&params, q_of(lambda)) {
        Ok(g) => r * g.exp() - lambda,
        Err(_) => f64::NAN,
    };
    let hi = r * (1.0 - 5e-16);
    let cfg = BrentConfig { x_tol: 0.0, f_tol: residual_tol, max_iter: 200 };
    let root = brent(defect, 0.0, hi, cfg)?;

    let lambda0 = root.x;
    let decay_rate = q_of(lambda0);
    let g = log_ratio(&params, decay_rate)?;
    Ok(EigenRadial {
        params,
        lambda0,
        decay_rate,
        residual: root.f_x.abs(),
        log_ratio: g,
        rho_inv: -f64::exp_m1(g),
    })
}

impl EigenRadial {
    /// The parameters this solution belongs to.
    pub fn params(&self) -> &ParamsRadial {
        &self.params
    }

    /// Principal eigenvalue `lambda0 in (0, r)`.
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// `ln lambda0`, exact even where `lambda0` underflows `f64`.
    pub fn log_lambda0(&self) -> f64 {
        self.params.reset_rate.ln() + self.log_ratio
    }

    /// Spatial decay rate `q = sqrt(2 (r - lambda0) / D)`.
    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }

    /// Defect of the eigenvalue equation at the accepted root.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Principal eigenfunction `U(x)` for `x >= eps0`, normalised so that
    /// `U(A) = 1`. Vanishes on the absorbing sphere and saturates at
    /// `rho = r / (r - lambda0)` far from the target.
    pub fn eigenfunction(&self, x: f64) -> Result<f64, EigenRadialError> {
        let p = &self.params;
        if !x.is_finite() || x < p.target_radius {
            return Err(EigenRadialError::InsideTarget { x, eps0: p.target_radius });
        }
        let nu = p.order();
        let q = self.decay_rate;
        let (_, k_here) = bessel_ik_scaled(nu, q * x)?;
        let (_, k_target) = bessel_ik_scaled(nu, q * p.target_radius)?;
        let log_term = -nu.value() * (x / p.target_radius).ln() - q * (x - p.target_radius)
            + k_here.ln()
            - k_target.ln();
        Ok(-f64::exp_m1(log_term) / self.rho_inv)
    }

    /// Adjoint eigenfunction `V(x)` for `x >= eps0`, normalised so that
    /// `V(A) = 1`. Vanishes on the absorbing sphere, decays like
    /// `x^{(d-1)/2} e^{-q x}` far away, and has the derivative kink at `A`
    /// that carries the resetting source.
    pub fn adjoint_eigenfunction(&self, x: f64) -> Result<f64, EigenRadialError> {
        let p = &self.params;
        if !x.is_finite() || x < p.target_radius {
            return Err(EigenRadialError::InsideTarget { x, eps0: p.target_radius });
        }
        let nu = p.order();
        let q = self.decay_rate;
        let a = p.reset_radius;
        let eps0 = p.target_radius;
        let half_d = f64::from(p.dim) / 2.0;
        if x >= a {
            let (_, k_here) = bessel_ik_scaled(nu, q * x)?;
            let (_, k_reset) = bessel_ik_scaled(nu, q * a)?;
            Ok((x / a).powf(half_d) * (-q * (x - a)).exp() * k_here / k_reset)
        } else {
            // Cross term I_nu(q eps0) K_nu(q x) - I_nu(q x) K_nu(q eps0),
            // rearranged so every exponential has a nonpositive argument:
            // G(y) = i(q y) k(q eps0) - e^{-2 q (y - eps0)} i(q eps0) k(q y)
            // in scaled-Bessel variables, and V(x)/V(A) =
            // (x/A)^{d/2} e^{-q (A - x)} G(x) / G(A).
            let cross = |y: f64| -> Result<f64, BesselError> {
                let (i_y, k_y) = bessel_ik_scaled(nu, q * y)?;
                let (i_eps, k_eps) = bessel_ik_scaled(nu, q * eps0)?;
                Ok(i_y * k_eps - (-2.0 * q * (y - eps0)).exp() * i_eps * k_y)
            };
            let g_here = cross(x)?;
            let g_reset = cross(a)?;
            Ok((x / a).powf(half_d) * (-q * (a - x)).exp() * g_here / g_reset)
        }
    }

    /// Tail prefactor `M = integral(U V) / integral(V)` over `[eps0, inf)`,
    /// by adaptive quadrature split at the kink radius `A` and truncated
    /// where `V` falls below `1e-18` of its peak.
    ///
    /// Refines until the quadrature error estimate is below `quad_tol`
    /// relative; `1e-10` is plenty for every downstream use.
    pub fn prefactor(&self, quad_tol: f64) -> Result<f64, EigenRadialError> {
        if !quad_tol.is_finite() || quad_tol <= 0.0 {
            return Err(EigenRadialError::InvalidParameter {
                name: "quad_tol",
                value: quad_tol,
                requirement: "must be finite and > 0",
            });
        }
        let p = &self.params;
        let a = p.reset_radius;
        let eps0 = p.target_radius;
        let q = self.decay_rate;

        // Truncation radius: V(A) = 1 and the tail decays like e^{-q(x-A)}
        // times a slowly growing power, so stepping out in units of 45/q
        // reaches 1e-18 quickly.
        let mut cut = a + 45.0 / q;
        for _ in 0..60 {
            if self.adjoint_eigenfunction(cut)? < 1e-18 {
                break;
            }
            cut += 20.0 / q;
        }

        let v = |x: f64| self.adjoint_eigenfunction(x).unwrap_or(f64::NAN);
        let uv = |x: f64| {
            let u = self.eigenfunction(x).unwrap_or(f64::NAN);
            u * v(x)
        };
        let mut total_v = 0.0;
        let mut total_uv = 0.0;
        for (lo, hi) in [(eps0, a), (a, cut)] {
            total_v += adaptive_simpson(v, lo, hi, quad_tol, 0.0)?.value;
            total_uv += adaptive_simpson(uv, lo, hi, quad_tol, 0.0)?.value;
        }
        Ok(total_uv / total_v)
    }

    /// Leading large-`t` survival probability `exp(-lambda0 t) / M`.
    pub fn survival_asymptote(&self, t: f64, quad_tol: f64) -> Result<f64, EigenRadialError> {
        if !t.is_finite() || t < 0.0 {
            return Err(EigenRadialError::InvalidParameter {
                name: "t",
                value: t,
                requirement: "must be finite and >= 0",
            });
        }
        Ok((-self.lambda0 * t).exp() / self.prefactor(quad_tol)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// d = 3 reference eigenvalues computed with 40-digit arithmetic.
    /// Columns: D, r, eps0, A, lambda0.
    const REFERENCE_D3: &[(f64, f64, f64, f64, f64)] = &[
        (1.0, 1.0, 0.5, 3.0, 4.899502737298023e-3),
        (1.0, 1.0, 0.5, 5.0, 1.723475132467658e-4),
        (1.0, 1.0, 1.0, 4.0, 3.620118005217810e-3),
        (2.0, 1.0, 0.5, 3.0, 1.392184386842841e-2),
        (0.5, 1.0, 0.5, 3.0, 1.126158178724968e-3),
        (1.0, 2.0, 0.5, 3.0, 2.252316357449935e-3),
        (1.0, 0.5, 1.0, 5.0, 1.845144484178146e-3),
        (2.0, 2.0, 0.25, 2.0, 2.132363030492051e-2),
        (0.5, 0.5, 1.0, 6.0, 7.081259176532664e-5),
        (1.0, 1.0, 0.25, 8.0, 5.431458054626399e-7),
    ];

    fn solve_cfg(d: f64, r: f64, dim: u32, eps0: f64, a: f64) -> EigenRadial {
        solve(ParamsRadial::new(d, r, dim, eps0, a).unwrap(), 0.0).unwrap()
    }

    #[test]
    fn matches_three_dimensional_reference_values() {
        for &(d, r, eps0, a, lambda_ref) in REFERENCE_D3 {
            let sol = solve_cfg(d, r, 3, eps0, a);
            let rel = ((sol.lambda0() - lambda_ref) / lambda_ref).abs();
            assert!(rel < 1e-12, "lambda0({d},{r},{eps0},{a}): rel err {rel:e}");
        }
    }

    #[test]
    fn three_dimensional_closed_form_is_satisfied() {
        // In d = 3: lambda = r (eps0/A) exp(-q (A - eps0)).
        for &(d, r, eps0, a, _) in REFERENCE_D3 {
            let sol = solve_cfg(d, r, 3, eps0, a);
            let q = sol.decay_rate();
            let closed = r * (eps0 / a) * (-q * (a - eps0)).exp();
            let rel = ((sol.lambda0() - closed) / closed).abs();
            assert!(rel < 1e-12, "closed-form defect {rel:e} at ({d},{r},{eps0},{a})");
        }
    }

    #[test]
    fn matches_two_dimensional_reference_config() {
        // d=2, D=1, r=1, eps0=0.5, A=3, 40-digit references.
        let sol = solve_cfg(1.0, 1.0, 2, 0.5, 3.0);
        assert!(((sol.lambda0() - 1.335378631515403e-2) / 1.335378631515403e-2).abs() < 1e-12);
        assert!(((sol.decay_rate() - 1.4047392738048196) / 1.4047392738048196).abs() < 1e-12);
        let m = sol.prefactor(1e-10).unwrap();
        assert!(
            ((m - 0.9890195433948635) / 0.9890195433948635).abs() < 1e-8,
            "M = {m}"
        );
    }

    #[test]
    fn eigenfunction_normalisation_and_shape() {
        let sol = solve_cfg(1.0, 1.0, 2, 0.5, 3.0);
        assert!(sol.eigenfunction(0.5).unwrap().abs() < 1e-13, "vanishes on target");
        assert!((sol.eigenfunction(3.0).unwrap() - 1.0).abs() < 1e-12, "U(A) = 1");
        let rho = 1.0 / (1.0 - sol.lambda0());
        assert!((sol.eigenfunction(400.0).unwrap() - rho).abs() < 1e-10);
        // Monotone increasing in the radius.
        let mut prev = 0.0;
        for k in 1..=200 {
            let x = 0.5 + 10.0 * f64::from(k) / 200.0;
            let here = sol.eigenfunction(x).unwrap();
            assert!(here > prev, "not monotone at {x}");
            prev = here;
        }
        assert!(sol.eigenfunction(0.49).is_err());
    }

    #[test]
    fn adjoint_eigenfunction_boundary_values_and_continuity() {
        for (dim, eps0, a) in [(2u32, 0.5, 3.0), (3, 0.5, 5.0), (5, 1.0, 4.0)] {
            let sol = solve_cfg(1.0, 1.0, dim, eps0, a);
            assert!(sol.adjoint_eigenfunction(eps0).unwrap().abs() < 1e-12);
            assert!((sol.adjoint_eigenfunction(a).unwrap() - 1.0).abs() < 1e-12);
            let inner = sol.adjoint_eigenfunction(a * (1.0 - 1e-9)).unwrap();
            let outer = sol.adjoint_eigenfunction(a * (1.0 + 1e-9)).unwrap();
            assert!((inner - outer).abs() < 1e-7, "kink is continuous (d={dim})");
            assert!(sol.adjoint_eigenfunction(eps0 * 0.99).is_err());
        }
    }

    #[test]
    fn adjoint_derivative_jump_matches_flux_identity() {
        // V'(A+) - V'(A-) = -(2 r / D) integral(V), the defining property of
        // the resetting source in the adjoint equation.
        let sol = solve_cfg(1.0, 1.0, 2, 0.5, 3.0);
        let a = 3.0;
        let h = 1e-6;
        let v = |x: f64| sol.adjoint_eigenfunction(x).unwrap();
        let right = (-3.0 * v(a) + 4.0 * v(a + h) - v(a + 2.0 * h)) / (2.0 * h);
        let left = (3.0 * v(a) - 4.0 * v(a - h) + v(a - 2.0 * h)) / (2.0 * h);
        let jump = right - left;

        let q = sol.decay_rate();
        let mut int_v = adaptive_simpson(v, 0.5, a, 1e-11, 0.0).unwrap().value;
        int_v += adaptive_simpson(v, a, a + 60.0 / q, 1e-11, 0.0).unwrap().value;
        let want = -2.0 * int_v; // 2 r / D = 2 here
        assert!(
            ((jump - want) / want).abs() < 1e-5,
            "jump {jump} vs flux {want}"
        );
    }

    #[test]
    fn prefactor_tends_to_one_from_below_for_distant_targets() {
        // Frozen references along A = {5, 10, 20} sqrt(D/2r), d=3, eps0=0.5.
        let sigma = 0.5f64.sqrt();
        let refs = [0.99776677768, 0.999976257831, 0.999999998722];
        let mut prev = 0.0;
        for (mult, m_ref) in [5.0, 10.0, 20.0].iter().zip(refs) {
            let sol = solve_cfg(1.0, 1.0, 3, 0.5, mult * sigma);
            let m = sol.prefactor(1e-10).unwrap();
            assert!(((m - m_ref) / m_ref).abs() < 1e-8, "M = {m} vs {m_ref}");
            assert!(m < 1.0 && m > prev);
            prev = m;
        }
    }

    #[test]
    fn residual_is_tiny_and_bracket_respected() {
        for &(d, r, eps0, a, _) in REFERENCE_D3 {
            let sol = solve_cfg(d, r, 3, eps0, a);
            assert!(sol.residual() <= 1e-13 * r);
            assert!(sol.lambda0() > 0.0 && sol.lambda0() < r);
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(ParamsRadial::new(1.0, 1.0, 1, 0.5, 3.0).is_err());
        assert!(ParamsRadial::new(1.0, 1.0, 2, 0.0, 3.0).is_err());
        assert!(ParamsRadial::new(1.0, 1.0, 2, 3.0, 0.5).is_err());
        assert!(ParamsRadial::new(1.0, 1.0, 2, 0.5, 0.5).is_err());
        assert!(ParamsRadial::new(-1.0, 1.0, 2, 0.5, 3.0).is_err());
        assert!(ParamsRadial::new(1.0, 1.0, 41, 0.5, 3.0).is_err());
        let p = ParamsRadial::new(1.0, 1.0, 2, 0.5, 3.0).unwrap();
        assert!(solve(p, f64::NAN).is_err());
    }

    #[test]
    fn survival_asymptote_composes() {
        let sol = solve_cfg(1.0, 1.0, 2, 0.5, 3.0);
        let m = sol.prefactor(1e-10).unwrap();
        let t = 120.0;
        let got = sol.survival_asymptote(t, 1e-10).unwrap();
        assert!((got - (-sol.lambda0() * t).exp() / m).abs() < 1e-15);
    }
}
