//! Modified Bessel functions `I_nu` and `K_nu` for integer and half-integer
//! orders `nu >= 0`.
//!
//! These are the only orders that arise here: the radially symmetric
//! absorption problem in dimension `d` involves order `nu = (d - 2) / 2` and
//! its neighbour `nu + 1`. Restricting to `2 nu` integral keeps every gamma
//! value required by the series expansion an exact constant, which is what
//! lets the implementation hold ~1e-13 relative error without carrying a
//! general gamma function.
//!
//! Algorithm outline (the classical Temme/Thompson-Barnett scheme):
//!
//! - order reduction: write `nu = n + u` with `n` integral and `|u| <= 1/2`;
//! - `x <= 2`: Temme's series for `K_u`, `K_{u+1}`;
//! - `x > 2`: Steed's continued fraction, which natively produces the scaled
//!   values `e^x K_u`, `e^x K_{u+1}`;
//! - upward recurrence `K_{w+1} = K_{w-1} + (2w/x) K_w` (all terms positive,
//!   hence stable) to reach `K_nu`, `K_{nu+1}`;
//! - `I_nu` from the ratio `I_{nu+1}/I_nu` (Lentz continued fraction) and the
//!   Wronskian `I_nu K_{nu+1} + I_{nu+1} K_nu = 1/x`;
//! - large `x`: Hankel's asymptotic expansion for `e^{-x} I_nu` directly.
//!
//! Scaled variants (`e^{-x} I_nu`, `e^x K_nu`) are first-class: the radial
//! eigenvalue equation is evaluated entirely in scaled form so that argument
//! products `q * A` of several hundred stay representable.

use std::f64::consts::PI;
use thiserror::Error;

/// Relative accuracy targeted by the series/continued-fraction stops.
const EPS: f64 = f64::EPSILON;
/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// sqrt(pi).
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Error raised by the Bessel evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BesselError {
    /// Order was not a nonnegative integer or half-integer.
    #[error("bessel order must be a nonnegative integer or half-integer, got {0}")]
    InvalidOrder(f64),
    /// Argument outside the domain `x > 0`.
    #[error("bessel argument must be positive and finite, got {0}")]
    InvalidArgument(f64),
    /// The unscaled value over- or underflows `f64`; use the scaled variant.
    #[error("bessel_{kind}({nu}, {x}) is not representable in f64; use the scaled form")]
    NotRepresentable { kind: char, nu: f64, x: f64 },
    /// An internal expansion failed to converge (indicates a bug or an
    /// argument far outside the supported range).
    #[error("bessel expansion failed to converge for nu={nu}, x={x}")]
    NoConvergence { nu: f64, x: f64 },
}

/// A validated Bessel order: `nu = k/2` for some integer `k >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(f64);

impl BesselOrder {
    /// Order from its value; fails unless `2 nu` is a nonnegative integer.
    pub fn new(nu: f64) -> Result<Self, BesselError> {
        let doubled = 2.0 * nu;
        if !nu.is_finite() || nu < 0.0 || doubled.fract() != 0.0 {
            return Err(BesselError::InvalidOrder(nu));
        }
        Ok(Self(nu))
    }

    /// The order `nu = (d - 2) / 2` that governs radial diffusion in
    /// dimension `d >= 2`.
    pub fn from_dimension(d: u32) -> Result<Self, BesselError> {
        if d < 2 {
            return Err(BesselError::InvalidOrder(f64::from(d)));
        }
        Ok(Self(f64::from(d - 2) / 2.0))
    }

    /// Numeric value of the order.
    pub fn value(self) -> f64 {
        self.0
    }

    /// The next order up, `nu + 1`.
    pub fn succ(self) -> Self {
        Self(self.0 + 1.0)
    }
}

/// `I_nu(x)`, unscaled.
pub fn bessel_i(order: BesselOrder, x: f64) -> Result<f64, BesselError> {
    let (i_scaled, _) = bessel_ik_scaled(order, x)?;
    let value = i_scaled * x.exp();
    if !value.is_finite() {
        return Err(BesselError::NotRepresentable {
            kind: 'i',
            nu: order.value(),
            x,
        });
    }
    Ok(value)
}

/// `K_nu(x)`, unscaled.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64, BesselError> {
    let (_, k_scaled) = bessel_ik_scaled(order, x)?;
    let value = k_scaled * (-x).exp();
    if value == 0.0 || !value.is_finite() {
        return Err(BesselError::NotRepresentable {
            kind: 'k',
            nu: order.value(),
            x,
        });
    }
    Ok(value)
}

/// Scaled pair `(e^{-x} I_nu(x), e^x K_nu(x))`.
///
/// Both factors are of moderate size for every `x > 0`, so this is the form
/// to use inside ratios with large arguments.
pub fn bessel_ik_scaled(order: BesselOrder, x: f64) -> Result<(f64, f64), BesselError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(BesselError::InvalidArgument(x));
    }
    let nu = order.value();

    // Reduce the order: nu = n + u, n integral, |u| <= 1/2.
    let n = nu.round();
    let u = nu - n;

    // K_u and K_{u+1} in scaled form e^x K.
    let (mut k_lo, mut k_hi) = if x <= 2.0 {
        let (k0, k1) = temme_k(u, x)?;
        let scale = x.exp(); // x <= 2, no overflow
        (k0 * scale, k1 * scale)
    } else {
        steed_k_scaled(u, x)?
    };

    // March the order up: K_{w+1} = K_{w-1} + (2 w / x) K_w. Every term is
    // positive, so the recurrence only ever adds — no cancellation. K grows
    // with the order, and for very small x it can overflow f64 on the way up.
    let mut w = u + 1.0;
    for _ in 0..(n as u64) {
        let next = k_lo + (2.0 * w / x) * k_hi;
        k_lo = k_hi;
        k_hi = next;
        w += 1.0;
        if !k_hi.is_finite() {
            return Err(BesselError::NotRepresentable {
                kind: 'k',
                nu,
                x,
            });
        }
    }
    // Now k_lo = e^x K_nu, k_hi = e^x K_{nu+1}.

    let i_scaled = if x >= 100.0 && x >= 10.0 * nu * nu {
        asymptotic_i_scaled(nu, x)
    } else {
        // Wronskian: I_nu (K_{nu+1} + ratio * K_nu) = 1/x with
        // ratio = I_{nu+1}/I_nu, everything in scaled form.
        let ratio = lentz_i_ratio(nu, x)?;
        (1.0 / x) / (k_hi + ratio * k_lo)
    };

    Ok((i_scaled, k_lo))
}

/// Temme's series for `(K_u(x), K_{u+1}(x))`, valid for `x <= 2`,
/// `|u| <= 1/2`. Unscaled (harmless: `e^x <= e^2`).
fn temme_k(u: f64, x: f64) -> Result<(f64, f64), BesselError> {
    // Gamma values at 1 +/- u are exact for the orders admitted here.
    let (gamma_1_plus, gamma_1_minus) = if u == 0.0 {
        (1.0, 1.0)
    } else if u == -0.5 {
        (SQRT_PI, SQRT_PI / 2.0)
    } else {
        // u == 0.5 cannot be produced by rounding, but keep it correct.
        (SQRT_PI / 2.0, SQRT_PI)
    };

    // gam1 = (1/Gamma(1-u) - 1/Gamma(1+u)) / (2u), continuous limit -gamma_E.
    let gam1 = if u == 0.0 {
        -EULER_GAMMA
    } else {
        (1.0 / gamma_1_minus - 1.0 / gamma_1_plus) / (2.0 * u)
    };
    let gam2 = (1.0 / gamma_1_minus + 1.0 / gamma_1_plus) / 2.0;

    let log_half_x = (x / 2.0).ln();
    let sigma = -u * log_half_x;
    let fact = if u == 0.0 {
        1.0
    } else {
        let piu = PI * u;
        piu / piu.sin()
    };
    let sinh_ratio = if sigma.abs() < 1e-10 {
        1.0 + sigma * sigma / 6.0
    } else {
        sigma.sinh() / sigma
    };

    let mut f = fact * (gam1 * sigma.cosh() - gam2 * sinh_ratio * log_half_x);
    let e = sigma.exp(); // (x/2)^{-u}
    let mut p = 0.5 * e * gamma_1_plus;
    let mut q = 0.5 / e * gamma_1_minus;
    let x2_quarter = 0.25 * x * x;

    let mut coef = 1.0;
    let mut sum = f;
    let mut sum1 = p;
    for k in 1..=200u32 {
        let kf = f64::from(k);
        f = (kf * f + p + q) / (kf * kf - u * u);
        p /= kf - u;
        q /= kf + u;
        coef *= x2_quarter / kf;
        let del = coef * f;
        sum += del;
        sum1 += coef * (p - kf * f);
        if del.abs() < sum.abs() * EPS {
            return Ok((sum, 2.0 * sum1 / x));
        }
    }
    Err(BesselError::NoConvergence { nu: u, x })
}

/// Steed/Thompson-Barnett continued fraction for the scaled pair
/// `(e^x K_u(x), e^x K_{u+1}(x))`, valid for `x > 2`, `|u| <= 1/2`.
fn steed_k_scaled(u: f64, x: f64) -> Result<(f64, f64), BesselError> {
    let mut a = u * u - 0.25;
    let a_initial = a;
    let mut b = 2.0 * (x + 1.0);
    let mut d = 1.0 / b;
    let mut delta = d;
    let mut f = d;
    let mut prev = 0.0;
    let mut current = 1.0;
    let mut c = -a;
    let mut q = c;
    let mut s = 1.0 + q * delta;

    let mut converged = u == 0.5 || u == -0.5; // a == 0: fraction terminates
    if !converged {
        for k in 2..=40_000u64 {
            let kf = k as f64;
            a -= 2.0 * (kf - 1.0);
            b += 2.0;
            d = 1.0 / (b + a * d);
            delta *= b * d - 1.0;
            f += delta;
            let q_next = (prev - (b - 2.0) * current) / a;
            prev = current;
            current = q_next;
            c *= -a / kf;
            q += c * q_next;
            s += q * delta;
            if (q * delta).abs() < s.abs() * EPS {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(BesselError::NoConvergence { nu: u, x });
    }

    let k_u = (PI / (2.0 * x)).sqrt() / s;
    let k_u1 = k_u * (0.5 + u + x + a_initial * f) / x;
    Ok((k_u, k_u1))
}

/// Continued fraction (modified Lentz) for the ratio `I_{nu+1}(x) / I_nu(x)`.
fn lentz_i_ratio(nu: f64, x: f64) -> Result<f64, BesselError> {
    const TINY: f64 = 1e-300;
    let mut f = TINY;
    let mut c = TINY;
    let mut d = 0.0;
    // Convergence needs O(x) terms; x < 100 on this path except for large
    // orders, where x <= 700 still converges well within the cap.
    for k in 1..=40_000u64 {
        let b = 2.0 * (nu + k as f64) / x;
        d = b + d;
        if d == 0.0 {
            d = TINY;
        }
        c = b + 1.0 / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            return Ok(f);
        }
    }
    Err(BesselError::NoConvergence { nu, x })
}

/// Hankel's large-argument expansion for `e^{-x} I_nu(x)`.
///
/// The neglected reflection term is `O(e^{-2x})` relative, i.e. below 1e-86
/// on the `x >= 100` branch that calls this.
fn asymptotic_i_scaled(nu: f64, x: f64) -> f64 {
    let four_nu_sq = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=60u32 {
        let kf = f64::from(k);
        let odd = 2.0 * kf - 1.0;
        term *= (odd * odd - four_nu_sq) / (8.0 * kf * x);
        let next = sum + term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
        sum = next;
    }
    sum / (2.0 * PI * x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reference values computed with 40-digit arithmetic, rounded to f64.
    /// Columns: nu, x, I_nu(x), K_nu(x), e^{-x} I_nu(x), e^x K_nu(x).
    const REFERENCE: &[(f64, f64, f64, f64, f64, f64)] = &[
        (0.0, 0.1, 1.0025015629340956, 2.4270690247020166, 0.9071009257823011, 2.6823261022628943),
        (0.0, 1.0, 1.2660658777520084, 0.42102443824070834, 0.4657596075936404, 1.144463079806895),
        (0.0, 2.0, 2.2795853023360673, 0.11389387274953344, 0.30850832255367104, 0.8415682150707714),
        (0.0, 8.0, 427.5641157218048, 1.4647070522281539e-4, 0.14343178185685031, 0.4366230186015861),
        (0.0, 20.0, 4.3558282559553534e7, 5.741237815336524e-10, 0.08978031188482602, 0.2785448766571822),
        (0.0, 100.0, 1.0737517071310738e42, 4.656628229175902e-45, 0.039944379299096684, 0.12517562165912658),
        (0.0, 700.0, 1.5295933476718737e302, 4.669776431685377e-306, 0.015081295651531358, 0.04736236945461357),
        (0.5, 1.0, 0.9376748882454876, 0.46106850444789456, 0.34495131388824463, 1.2533141373155003),
        (0.5, 2.0, 2.046236863089055, 0.11993777196806145, 0.27692804543535513, 0.886226925452758),
        (0.5, 1.0e-6, 7.978845608029983e-4, 1253.3128840019896, 7.978837629188365e-4, 1253.3141373155003),
        (0.5, 50.0, 2.92515685299129e20, 3.4186200954570746e-23, 0.05641895835477563, 0.1772453850905516),
        (1.0, 0.5, 0.2578943053908963, 1.6564411200033009, 0.1564208031848717, 2.7310097082117857),
        (1.0, 1.0, 0.565159103992485, 0.6019072301972346, 0.20791041534970845, 1.6361534862632582),
        (1.0, 8.0, 399.8731367825601, 1.5536921180500113e-4, 0.13414249329269818, 0.4631490928704961),
        (1.0, 300.0, 4.4683813850369544e128, 3.7298958583323727e-132, 0.02300412204026895, 0.07245048166725841),
        (1.5, 1.0, 0.2935253263474798, 0.9221370088957891, 0.1079819330263761, 2.5066282746310005),
        (1.5, 3.0, 3.099483456725636, 0.04803464684235279, 0.1543141947650625, 0.9648016727443569),
        (1.5, 1.0e-4, 2.6596152053358332e-7, 1.2533141310493472e6, 2.6593492571129324e-7, 1.2534394687292317e6),
        (2.0, 1.0, 0.13574766976703828, 1.6248388986351775, 0.04993877689422354, 4.4167700523334115),
        (2.0, 10.0, 2281.5189677260035, 2.150981700693277e-5, 0.1035808008865375, 0.4737852485557564),
        (2.5, 2.0, 0.3970270801393905, 0.3897977588961997, 0.05373177234326974, 2.8802375077214635),
        (3.0, 5.0, 10.331150169151138, 8.291768415230932e-3, 0.06961074227933323, 1.2306075450513878),
        (5.0, 0.1, 2.6052519298936976e-9, 3.837600999583592e7, 2.357329429578214e-9, 4.241205019917821e7),
        (5.0, 30.0, 5.1215146547693497e11, 3.210333510589026e-14, 0.047925203168721224, 0.3430714745912582),
        (4.5, 12.0, 7937.289458312568, 4.9164776446961705e-6, 0.048768391941705855, 0.8001802935787209),
        (0.0, 1.0e-6, 1.00000000000025, 13.93144207362642, 0.99999900000075, 13.931456005075459),
        (1.0, 1.0e-6, 5.000000000000625e-7, 999999.9999927843, 4.999995000003125e-7, 1.0000009999932843e6),
        (5.0, 1.0e-6, 2.6041666666667746e-34, 3.839999999999761e32, 2.60416406250141e-34, 3.840003840001681e32),
    ];

    fn rel_err(got: f64, want: f64) -> f64 {
        ((got - want) / want).abs()
    }

    #[test]
    fn matches_reference_values() {
        for &(nu, x, i_ref, k_ref, i_scaled_ref, k_scaled_ref) in REFERENCE {
            let order = BesselOrder::new(nu).unwrap();
            let (i_scaled, k_scaled) = bessel_ik_scaled(order, x).unwrap();
            assert!(
                rel_err(i_scaled, i_scaled_ref) < 1e-12,
                "scaled I_{nu}({x}): got {i_scaled:e}, want {i_scaled_ref:e}"
            );
            assert!(
                rel_err(k_scaled, k_scaled_ref) < 1e-12,
                "scaled K_{nu}({x}): got {k_scaled:e}, want {k_scaled_ref:e}"
            );
            let i = bessel_i(order, x).unwrap();
            let k = bessel_k(order, x).unwrap();
            assert!(rel_err(i, i_ref) < 1e-12, "I_{nu}({x}): got {i:e}, want {i_ref:e}");
            assert!(rel_err(k, k_ref) < 1e-12, "K_{nu}({x}): got {k:e}, want {k_ref:e}");
        }
    }

    #[test]
    fn wronskian_identity() {
        // I_nu K_{nu+1} + I_{nu+1} K_nu = 1/x, checked in scaled form where
        // the exponential factors cancel exactly.
        for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0, 3.5, 6.0] {
            for &x in &[1.0e-5, 0.01, 0.5, 1.0, 2.0, 2.5, 7.0, 30.0, 150.0, 700.0] {
                let lo = BesselOrder::new(nu).unwrap();
                let hi = lo.succ();
                let (i0, k0) = bessel_ik_scaled(lo, x).unwrap();
                let (i1, k1) = bessel_ik_scaled(hi, x).unwrap();
                let w = i0 * k1 + i1 * k0;
                assert!(
                    rel_err(w, 1.0 / x) < 1e-12,
                    "wronskian at nu={nu}, x={x}: {w:e} vs {:e}",
                    1.0 / x
                );
            }
        }
    }

    #[test]
    fn half_integer_orders_match_closed_forms() {
        // K_{1/2}(x) = sqrt(pi/(2x)) e^{-x} and
        // K_{3/2}(x) = sqrt(pi/(2x)) e^{-x} (1 + 1/x).
        for &x in &[1.0e-6, 0.3, 1.0, 2.0, 10.0, 400.0] {
            let k_half = bessel_ik_scaled(BesselOrder::new(0.5).unwrap(), x).unwrap().1;
            let k_three_half = bessel_ik_scaled(BesselOrder::new(1.5).unwrap(), x).unwrap().1;
            let base = (PI / (2.0 * x)).sqrt();
            assert!(rel_err(k_half, base) < 1e-13, "K_1/2 scaled at x={x}");
            assert!(
                rel_err(k_three_half, base * (1.0 + 1.0 / x)) < 1e-13,
                "K_3/2 scaled at x={x}"
            );
        }
        // I_{1/2}(x) = sqrt(2/(pi x)) sinh(x).
        for &x in &[0.25, 1.0, 2.0, 5.0] {
            let i_half = bessel_i(BesselOrder::new(0.5).unwrap(), x).unwrap();
            let want = (2.0 / (PI * x)).sqrt() * x.sinh();
            assert!(rel_err(i_half, want) < 1e-13, "I_1/2 at x={x}");
        }
    }

    #[test]
    fn recurrence_consistency_three_terms() {
        // K_{nu+1} - K_{nu-1} = (2 nu / x) K_nu and the same for I with the
        // opposite sign, probed across both algorithm branches.
        for &nu in &[1.0, 1.5, 2.0, 4.0] {
            for &x in &[0.7, 1.9, 2.1, 12.0, 90.0, 350.0] {
                let om = BesselOrder::new(nu - 1.0).unwrap();
                let o0 = BesselOrder::new(nu).unwrap();
                let op = BesselOrder::new(nu + 1.0).unwrap();
                let (im, km) = bessel_ik_scaled(om, x).unwrap();
                let (i0, k0) = bessel_ik_scaled(o0, x).unwrap();
                let (ip, kp) = bessel_ik_scaled(op, x).unwrap();
                let k_resid = (kp - km) - (2.0 * nu / x) * k0;
                let i_resid = (im - ip) - (2.0 * nu / x) * i0;
                assert!(
                    (k_resid / kp).abs() < 1e-12,
                    "K recurrence nu={nu} x={x}: {k_resid:e}"
                );
                assert!(
                    (i_resid / i0).abs() < 1e-11,
                    "I recurrence nu={nu} x={x}: {i_resid:e}"
                );
            }
        }
    }

    #[test]
    fn order_validation() {
        assert!(BesselOrder::new(0.25).is_err());
        assert!(BesselOrder::new(-0.5).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
        assert!(BesselOrder::new(3.5).is_ok());
        assert_eq!(BesselOrder::from_dimension(2).unwrap().value(), 0.0);
        assert_eq!(BesselOrder::from_dimension(3).unwrap().value(), 0.5);
        assert_eq!(BesselOrder::from_dimension(5).unwrap().value(), 1.5);
        assert!(BesselOrder::from_dimension(1).is_err());
    }

    #[test]
    fn argument_validation_and_overflow() {
        let o = BesselOrder::new(0.0).unwrap();
        assert!(matches!(
            bessel_ik_scaled(o, 0.0),
            Err(BesselError::InvalidArgument(_))
        ));
        assert!(matches!(
            bessel_ik_scaled(o, -1.0),
            Err(BesselError::InvalidArgument(_))
        ));
        assert!(matches!(
            bessel_ik_scaled(o, f64::NAN),
            Err(BesselError::InvalidArgument(_))
        ));
        // Unscaled I overflows near x ~ 713; unscaled K underflows there.
        assert!(matches!(
            bessel_i(o, 800.0),
            Err(BesselError::NotRepresentable { .. })
        ));
        assert!(matches!(
            bessel_k(o, 800.0),
            Err(BesselError::NotRepresentable { .. })
        ));
        // The scaled form stays healthy at the same argument.
        let (i_scaled, k_scaled) = bessel_ik_scaled(o, 800.0).unwrap();
        assert!(i_scaled.is_finite() && i_scaled > 0.0);
        assert!(k_scaled.is_finite() && k_scaled > 0.0);
    }
}
