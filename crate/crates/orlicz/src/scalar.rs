//! Scalar abstraction underneath the numeric layer.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the mathematical core is generic over.
///
/// Blanket-implemented for `f32` and `f64` (and anything else satisfying the
/// bounds). The Monte Carlo layer is `f64`-only; everything upstream of it —
/// function bodies, norms, quadrature, interpolation, tails — accepts either
/// width.
pub trait Real:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    ///
    /// Used for tolerances and literal coefficients; conversion follows the
    /// usual narrowing rules, so constants chosen here stay representable in
    /// `f32` as well.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("constant not representable in scalar type")
    }

    /// Lossy view of this scalar as `f64`, for diagnostics and error payloads.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Logarithmically spaced grid with `n >= 2` points from `lo` to `hi`
/// inclusive; both endpoints must be positive and ordered.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2, "log grid needs at least two points");
    assert!(
        lo > T::zero() && hi > lo,
        "log grid needs 0 < lo < hi",
    );
    let (lln, lhn) = (lo.ln(), hi.ln());
    let step = (lhn - lln) / T::from_usize(n - 1).unwrap();
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (lln + step * T::from_usize(i).unwrap()).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_hits_endpoints() {
        let g = log_grid(1e-6_f64, 2.0, 512);
        assert_eq!(g.len(), 512);
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[511], 2.0);
        for w in g.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn log_grid_works_in_f32() {
        let g = log_grid(1e-3_f32, 4.0, 16);
        assert_eq!(g.len(), 16);
        assert!((g[15] - 4.0).abs() < 1e-6);
    }
}
