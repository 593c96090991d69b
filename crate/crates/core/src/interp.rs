//! Shape-preserving cubic interpolation (Fritsch-Carlson / PCHIP).
//!
//! Used to interpolate tabulated principal eigenvalues on geometric grids of
//! the target distance. The eigenvalue is strictly monotone in the distance,
//! and the Fritsch-Carlson slope limiter guarantees the interpolant is too,
//! so interpolation can never manufacture spurious extrema in the integrands
//! built on top of it.

use thiserror::Error;

/// Error raised when fitting a [`MonotoneCubic`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterpError {
    /// Fewer than two knots, or mismatched input lengths.
    #[error("need at least two knots with equal x/y lengths (got {x_len} x, {y_len} y)")]
    BadShape { x_len: usize, y_len: usize },
    /// Abscissae not strictly increasing or not finite.
    #[error("knot abscissae must be finite and strictly increasing (violation near index {index})")]
    NotIncreasing { index: usize },
    /// Ordinates not finite.
    #[error("knot ordinate at index {index} is not finite")]
    NonFiniteValue { index: usize },
}

/// A fitted monotone piecewise-cubic interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    /// Fit the interpolant to `(x, y)` knots with strictly increasing `x`.
    ///
    /// If the data are monotone, the interpolant is monotone on every
    /// segment; in general it never overshoots the local data range.
    pub fn fit(x: &[f64], y: &[f64]) -> Result<Self, InterpError> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(InterpError::BadShape { x_len: n, y_len: y.len() });
        }
        for i in 0..n {
            if !x[i].is_finite() {
                return Err(InterpError::NotIncreasing { index: i });
            }
            if !y[i].is_finite() {
                return Err(InterpError::NonFiniteValue { index: i });
            }
            if i > 0 && x[i] <= x[i - 1] {
                return Err(InterpError::NotIncreasing { index: i });
            }
        }

        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        let mut slope = vec![0.0; n];
        if n == 2 {
            slope[0] = delta[0];
            slope[1] = delta[0];
        } else {
            // Interior: weighted harmonic mean of adjacent secants, zero at
            // local extrema (sign change or flat secant).
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] <= 0.0 {
                    slope[i] = 0.0;
                } else {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            slope[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            slope[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }

        Ok(Self { x: x.to_vec(), y: y.to_vec(), slope })
    }

    /// Evaluate at `xq`. Outside the knot range the end cubic is continued
    /// (callers here always query within the fitted range).
    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        // Index of the segment [x[i], x[i+1]] containing xq.
        let i = match self.x.partition_point(|&xi| xi <= xq) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (xq - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }

    /// Knot range covered by the fit.
    pub fn range(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().expect("at least two knots"))
    }
}

/// Non-centred three-point end slope with the standard monotonicity clamps.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        s = 0.0;
    } else if d0 * d1 < 0.0 && s.abs() > 3.0 * d0.abs() {
        s = 3.0 * d0;
    }
    s
}
