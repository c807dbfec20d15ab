//! Grid predicates: 2-concavity tests and pointwise function equivalence.

use crate::defaults;
use crate::function::OrliczFunction;
use crate::scalar::Real;

/// True iff `M''' <= 0` (up to a tiny slack) at every grid point. For bodies
/// with three derivatives this characterizes 2-concavity of the function.
pub fn check_two_concave<T: Real>(m: &OrliczFunction<T>, grid: &[T]) -> bool {
    let slack = T::of(defaults::NEGATIVE_DENSITY_TOL);
    grid.iter().all(|&t| {
        let v = m.m3(t);
        v.is_finite() && v <= slack * v.abs().max(T::one())
    })
}

/// True iff `M''` is nonincreasing along the (sorted) grid.
///
/// Whenever this holds, `t M''(t) <= M'(t)` holds as well (integrate the
/// constant bound `M''(t)` over `[0, t]`); callers lean on that implication,
/// and the test suite asserts it as a paired property.
pub fn check_second_derivative_decreasing<T: Real>(m: &OrliczFunction<T>, grid: &[T]) -> bool {
    let slack = T::of(defaults::NEGATIVE_DENSITY_TOL);
    let mut prev = T::infinity();
    for &t in grid {
        let v = m.m2(t);
        if !v.is_finite() || v > prev * (T::one() + slack) + slack {
            return false;
        }
        prev = v;
    }
    true
}

/// True iff `a^{-1} M(b^{-1} t) <= N(t) <= a M(b t)` at every grid point,
/// the two-sided equivalence of Orlicz functions with constants `(a, b)`.
pub fn check_equivalent<T: Real>(
    m: &OrliczFunction<T>,
    n: &OrliczFunction<T>,
    a: T,
    b: T,
    grid: &[T],
) -> bool {
    if !(a >= T::one() && b >= T::one()) {
        return false;
    }
    let slack = T::of(1e-12);
    grid.iter().all(|&t| {
        let nv = n.m0(t);
        let lower = m.m0(t / b) / a;
        let upper = a * m.m0(t * b);
        let span = nv.abs().max(upper.abs()).max(T::one());
        lower <= nv + slack * span && nv <= upper + slack * span
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::approx_smooth_kink;

    fn grid(m: &OrliczFunction<f64>) -> Vec<f64> {
        m.default_grid(512)
    }

    #[test]
    fn third_derivative_sign_tracks_the_exponent() {
        let below = OrliczFunction::power(1.5).unwrap();
        let at = OrliczFunction::power(2.0).unwrap();
        let above = OrliczFunction::power(3.0).unwrap();
        assert!(check_two_concave(&below, &grid(&below)));
        assert!(check_two_concave(&at, &grid(&at)));
        assert!(!check_two_concave(&above, &grid(&above)));
    }

    #[test]
    fn curvature_monotonicity_tracks_the_exponent() {
        let below = OrliczFunction::power(1.5).unwrap();
        let above = OrliczFunction::power(3.0).unwrap();
        assert!(check_second_derivative_decreasing(&below, &grid(&below)));
        assert!(!check_second_derivative_decreasing(&above, &grid(&above)));
    }

    #[test]
    fn affine_region_is_trivially_monotone() {
        let m = OrliczFunction::power(3.0).unwrap();
        let beyond: Vec<f64> = vec![1.5, 2.0, 4.0, 10.0];
        assert!(check_second_derivative_decreasing(&m, &beyond));
        assert!(check_two_concave(&m, &beyond));
    }

    #[test]
    fn decreasing_curvature_implies_the_derivative_bound() {
        // The paired property: wherever M'' is nonincreasing,
        // t M''(t) <= M'(t).
        for q in [1.2, 1.5, 2.0] {
            let m = OrliczFunction::power(q).unwrap().normalize().unwrap();
            let g = grid(&m);
            assert!(check_second_derivative_decreasing(&m, &g), "q={q}");
            for &t in &g {
                let lhs = t * m.eval(t, 2).unwrap();
                let rhs = m.eval(t, 1).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-12), "q={q} t={t}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn function_is_equivalent_to_itself() {
        let m = OrliczFunction::power(1.7).unwrap();
        assert!(check_equivalent(&m, &m, 1.0, 1.0, &grid(&m)));
    }

    #[test]
    fn smoothed_function_is_equivalent_with_the_smoothing_constant() {
        let m = OrliczFunction::power(1.5).unwrap().normalize().unwrap();
        let (n, _) = approx_smooth_kink(&m, 1.1).unwrap();
        assert!(check_equivalent(&m, &n, 1.1, 1.0, &grid(&m)));
    }

    #[test]
    fn different_powers_are_not_pointwise_equivalent_with_unit_constants() {
        let m = OrliczFunction::power(2.0).unwrap();
        let n = OrliczFunction::power(3.0).unwrap();
        // At t = 1/2: t^3 < t^2, violating the lower bound with a = b = 1.
        assert!(!check_equivalent(&m, &n, 1.0, 1.0, &[0.5]));
    }

    #[test]
    fn powerlog_with_positive_log_exponent_is_two_concave_for_small_q() {
        let m = OrliczFunction::<f64>::power_log(1.5, 1.0).unwrap();
        let g = grid(&m);
        assert!(check_second_derivative_decreasing(&m, &g));
    }
}
