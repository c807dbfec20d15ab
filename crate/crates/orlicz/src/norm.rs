//! Luxemburg norms for Orlicz and Musielak-Orlicz sequence spaces.
//!
//! The norm of `x` is the smallest `rho > 0` with
//! `sum_i M_i(|x_i| / rho) <= 1`; since each `M_i` is convex, continuous and
//! vanishes at zero, the modular on the left is continuous and nonincreasing
//! in `rho`, so the norm is the root of `modular(rho) = 1` and bracketed
//! bisection finds it to any requested residual tolerance.

use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;
use crate::scalar::Real;

/// Coordinate vector accepted by the norm operations: nonempty with finite
/// entries (zeros allowed, including the all-zero vector).
#[derive(Debug, Clone)]
pub struct WeightVector<T: Real>(Vec<T>);

impl<T: Real> WeightVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(OrliczError::InvalidParameter(
                "weight vector must not be empty".into(),
            ));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(OrliczError::NonFiniteInput("weight vector entry"));
        }
        Ok(Self(entries))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// One Orlicz function per coordinate.
#[derive(Debug, Clone)]
pub struct MusielakFamily<T: Real>(Vec<OrliczFunction<T>>);

impl<T: Real> MusielakFamily<T> {
    pub fn new(functions: Vec<OrliczFunction<T>>) -> Result<Self> {
        if functions.is_empty() {
            return Err(OrliczError::InvalidParameter(
                "a Musielak family needs at least one coordinate function".into(),
            ));
        }
        Ok(Self(functions))
    }

    pub fn functions(&self) -> &[OrliczFunction<T>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Luxemburg norm of `x` under a single Orlicz function.
///
/// Returns `rho` with `|sum M(|x_i|/rho) - 1| <= tol`; the all-zero vector
/// has norm zero.
pub fn orlicz_norm<T: Real>(m: &OrliczFunction<T>, x: &WeightVector<T>, tol: T) -> Result<T> {
    let mut xmax = T::zero();
    for &v in x.as_slice() {
        xmax = xmax.max(v.abs());
    }
    if xmax == T::zero() {
        return Ok(T::zero());
    }
    // At rho = xmax / M^{-1}(1) the largest term alone reaches one; padded
    // slightly so the root stays strictly inside the bracket even when the
    // vector is a multiple of a basis vector.
    let lo = xmax / m.inverse(T::one())? * (T::one() - T::of(1e-6));
    bisect_modular(|rho| modular_single(m, x.as_slice(), rho), lo, tol)
}

/// Musielak-Orlicz norm: coordinate `i` is measured through `family[i]`.
pub fn musielak_norm<T: Real>(
    family: &MusielakFamily<T>,
    x: &WeightVector<T>,
    tol: T,
) -> Result<T> {
    if family.len() != x.len() {
        return Err(OrliczError::LengthMismatch {
            expected: family.len(),
            got: x.len(),
        });
    }
    // Bracket from the coordinate whose unit argument is largest, padded as
    // in the single-function case.
    let mut lo = T::zero();
    for (mi, &xi) in family.functions().iter().zip(x.as_slice()) {
        if xi != T::zero() {
            lo = lo.max(xi.abs() / mi.inverse(T::one())?);
        }
    }
    if lo == T::zero() {
        return Ok(T::zero());
    }
    let lo = lo * (T::one() - T::of(1e-6));
    bisect_modular(
        |rho| {
            family
                .functions()
                .iter()
                .zip(x.as_slice())
                .fold(T::zero(), |acc, (mi, &xi)| acc + mi.m0(xi.abs() / rho))
        },
        lo,
        tol,
    )
}

fn modular_single<T: Real>(m: &OrliczFunction<T>, x: &[T], rho: T) -> T {
    x.iter().fold(T::zero(), |acc, &xi| {
        if xi == T::zero() {
            acc
        } else {
            acc + m.m0(xi.abs() / rho)
        }
    })
}

/// Bisection on the nonincreasing modular, starting from a bracket floor
/// `lo` with `modular(lo) >= 1`.
fn bisect_modular<T: Real>(modular: impl Fn(T) -> T, lo: T, tol: T) -> Result<T> {
    if !(tol.is_finite() && tol > T::zero()) {
        return Err(OrliczError::InvalidParameter(
            "norm tolerance must be positive".into(),
        ));
    }
    let (mut lo, mut hi) = (lo, lo * T::of(2.0));
    let mut expansions = 0;
    while modular(hi) >= T::one() {
        lo = hi;
        hi *= T::of(2.0);
        expansions += 1;
        if expansions > 200 {
            return Err(OrliczError::QuadratureNonConvergence {
                error: modular(hi).as_f64(),
            });
        }
    }
    let mut best = hi;
    let mut best_res = (modular(hi) - T::one()).abs();
    for _ in 0..500 {
        let mid = T::of(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let value = modular(mid);
        let res = (value - T::one()).abs();
        if res < best_res {
            best = mid;
            best_res = res;
        }
        if res <= tol {
            return Ok(mid);
        }
        if value > T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_res <= tol * T::of(10.0) {
        Ok(best)
    } else {
        Err(OrliczError::QuadratureNonConvergence {
            error: best_res.as_f64(),
        })
    }
}
