//! Shape-preserving piecewise-cubic interpolation with exact antiderivatives.
//!
//! Slopes follow Fritsch and Carlson: on monotone data the interpolant is
//! monotone, which is what keeps tabulated second derivatives from
//! manufacturing convexity violations between nodes. Each segment is a cubic
//! Hermite polynomial, so running integrals (quartic) and double integrals
//! (quintic) are available in closed form, and derivatives come from plain
//! polynomial differentiation.

use crate::error::{OrliczError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct MonotoneCubic<T> {
    x: Vec<T>,
    y: Vec<T>,
    d: Vec<T>,
    /// Running integral of the interpolant from `x[0]` to `x[k]`.
    cum1: Vec<T>,
    /// Running double integral from `x[0]` to `x[k]`.
    cum2: Vec<T>,
}

fn sign<T: Real>(v: T) -> i8 {
    if v > T::zero() {
        1
    } else if v < T::zero() {
        -1
    } else {
        0
    }
}

impl<T: Real> MonotoneCubic<T> {
    /// Builds the interpolant through `(x[i], y[i])`.
    ///
    /// # Errors
    ///
    /// Rejects fewer than two nodes, non-finite data, and abscissae that are
    /// not strictly increasing.
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(OrliczError::LengthMismatch { expected: x.len(), got: y.len() });
        }
        if x.len() < 2 {
            return Err(OrliczError::InvalidParameter(
                "interpolation needs at least two nodes".into(),
            ));
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(OrliczError::NonFiniteInput("interpolation nodes"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(OrliczError::InvalidParameter(
                "interpolation abscissae must be strictly increasing".into(),
            ));
        }

        let n = x.len();
        let h: Vec<T> = (0..n - 1).map(|k| x[k + 1] - x[k]).collect();
        let delta: Vec<T> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();

        let mut d = vec![T::zero(); n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                let (d0, d1) = (delta[k - 1], delta[k]);
                if d0 == T::zero() || d1 == T::zero() || sign(d0) != sign(d1) {
                    d[k] = T::zero();
                } else {
                    let w1 = T::of(2.0) * h[k] + h[k - 1];
                    let w2 = h[k] + T::of(2.0) * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
                }
            }
            d[0] = endpoint_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = endpoint_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }

        let mut cum1 = vec![T::zero(); n];
        let mut cum2 = vec![T::zero(); n];
        for k in 0..n - 1 {
            let seg = SegmentPoly::new(y[k], d[k], d[k + 1], delta[k], h[k]);
            cum1[k + 1] = cum1[k] + seg.single(h[k]);
            cum2[k + 1] = cum2[k] + cum1[k] * h[k] + seg.double(h[k]);
        }

        Ok(Self { x, y, d, cum1, cum2 })
    }

    pub fn nodes(&self) -> &[T] {
        &self.x
    }

    pub fn node_values(&self) -> &[T] {
        &self.y
    }

    fn segment_index(&self, t: T) -> usize {
        let n = self.x.len();
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn segment(&self, k: usize) -> SegmentPoly<T> {
        let h = self.x[k + 1] - self.x[k];
        let delta = (self.y[k + 1] - self.y[k]) / h;
        SegmentPoly::new(self.y[k], self.d[k], self.d[k + 1], delta, h)
    }

    /// Interpolated value at `t`; arguments outside the node range are
    /// clamped to the nearest segment.
    pub fn value(&self, t: T) -> T {
        let k = self.segment_index(t);
        self.segment(k).value(t - self.x[k])
    }

    /// First derivative of the interpolant at `t`.
    pub fn derivative(&self, t: T) -> T {
        let k = self.segment_index(t);
        self.segment(k).derivative(t - self.x[k])
    }

    /// Exact `\int_{x_0}^{t}` of the interpolant.
    pub fn integral_from_start(&self, t: T) -> T {
        let k = self.segment_index(t);
        self.cum1[k] + self.segment(k).single(t - self.x[k])
    }

    /// Exact `\int_{x_0}^{t} \int_{x_0}^{u}` of the interpolant.
    pub fn double_integral_from_start(&self, t: T) -> T {
        let k = self.segment_index(t);
        let s = t - self.x[k];
        self.cum2[k] + self.cum1[k] * s + self.segment(k).double(s)
    }
}

fn endpoint_slope<T: Real>(h0: T, h1: T, d0: T, d1: T) -> T {
    let mut slope = ((T::of(2.0) * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if sign(slope) != sign(d0) {
        slope = T::zero();
    } else if sign(d0) != sign(d1) && slope.abs() > T::of(3.0) * d0.abs() {
        slope = T::of(3.0) * d0;
    }
    slope
}

/// One Hermite segment written as `y + d s + c2 s^2 + c3 s^3` in the local
/// coordinate `s`, together with its first two antiderivatives.
struct SegmentPoly<T> {
    y: T,
    d: T,
    c2: T,
    c3: T,
}

impl<T: Real> SegmentPoly<T> {
    fn new(y: T, d_left: T, d_right: T, delta: T, h: T) -> Self {
        let c2 = (T::of(3.0) * delta - T::of(2.0) * d_left - d_right) / h;
        let c3 = (d_left + d_right - T::of(2.0) * delta) / (h * h);
        Self { y, d: d_left, c2, c3 }
    }

    fn value(&self, s: T) -> T {
        self.y + s * (self.d + s * (self.c2 + s * self.c3))
    }

    fn derivative(&self, s: T) -> T {
        self.d + s * (T::of(2.0) * self.c2 + s * T::of(3.0) * self.c3)
    }

    fn single(&self, s: T) -> T {
        s * (self.y
            + s * (self.d / T::of(2.0) + s * (self.c2 / T::of(3.0) + s * self.c3 / T::of(4.0))))
    }

    fn double(&self, s: T) -> T {
        s * s
            * (self.y / T::of(2.0)
                + s * (self.d / T::of(6.0)
                    + s * (self.c2 / T::of(12.0) + s * self.c3 / T::of(20.0))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        crate::scalar::log_grid(lo, hi, n)
    }

    #[test]
    fn reproduces_nodes_exactly() {
        let x = grid(64, 0.01, 2.0);
        let y: Vec<f64> = x.iter().map(|t| t.powf(0.7)).collect();
        let c = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((c.value(*xi) - yi).abs() < 1e-15);
        }
    }

    #[test]
    fn preserves_monotonicity_of_step_data() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y = vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0];
        let c = MonotoneCubic::new(x, y).unwrap();
        let mut prev = -1.0;
        for i in 0..=900 {
            let t = i as f64 * 0.01;
            let v = c.value(t);
            assert!(v >= prev - 1e-12, "dip at {t}: {v} < {prev}");
            assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn integral_matches_quadrature() {
        let x = grid(128, 0.05, 3.0);
        let y: Vec<f64> = x.iter().map(|t| (1.0 + t).ln()).collect();
        let c = MonotoneCubic::new(x, y).unwrap();
        let q = crate::quad::integrate(|t| c.value(t), 0.05, 2.5, 1e-12).unwrap();
        assert!((c.integral_from_start(2.5) - q.value).abs() < 1e-9);
    }

    #[test]
    fn double_integral_matches_nested_quadrature() {
        let x = grid(96, 0.1, 2.0);
        let y: Vec<f64> = x.iter().map(|t| t * t).collect();
        let c = MonotoneCubic::new(x, y).unwrap();
        let q = crate::quad::integrate(|t| c.integral_from_start(t), 0.1, 1.7, 1e-12).unwrap();
        assert!((c.double_integral_from_start(1.7) - q.value).abs() < 1e-9);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let x = grid(256, 0.02, 1.5);
        let y: Vec<f64> = x.iter().map(|t| t.powf(1.4)).collect();
        let c = MonotoneCubic::new(x, y).unwrap();
        for &t in &[0.05, 0.3, 0.9, 1.2] {
            let h = 1e-6;
            let fd = (c.value(t + h) - c.value(t - h)) / (2.0 * h);
            assert!((c.derivative(t) - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn interpolation_error_is_small_on_log_grids() {
        // Node spacing mirrors the tabulated bodies: 2048 log-spaced points
        // over six decades.
        let x = grid(2048, 2e-6, 2.0);
        let y: Vec<f64> = x.iter().map(|t| t.powf(-0.5)).collect();
        let c = MonotoneCubic::new(x.clone(), y).unwrap();
        let mut worst = 0.0f64;
        for w in x.windows(2).step_by(97) {
            let t = 0.5 * (w[0] + w[1]);
            let rel = (c.value(t) - t.powf(-0.5)).abs() / t.powf(-0.5);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-7, "relative interpolation error {worst}");
    }
}
