//! Tail distribution functions `t -> P(X > t)` for positive random
//! variables, with explicit atoms.
//!
//! A [`TailFunction`] is the universal distribution carrier of the crate:
//! generated laws, reference laws, point masses, and numerically convolved
//! products all live here. The continuous part is one of a few closed-form
//! kinds plus a log-log interpolated table for quadrature outputs; atoms are
//! kept separately so jumps are exact (point masses sample exactly, mass
//! bookkeeping has no smearing).

use crate::defaults;
use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;
use crate::interp::MonotoneCubic;
use crate::quad::{integrate, integrate_with_breakpoints};
use crate::scalar::{log_grid, Real};

/// A point mass: `P(X = location) = mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom<T> {
    pub location: T,
    pub mass: T,
}

#[derive(Debug, Clone)]
pub(crate) enum TailKind<T: Real> {
    /// Purely atomic distribution.
    Atomless,
    /// `min(1, t^{-p})` — the law written `log-gamma(1, p)` here and there.
    LogGamma { p: T },
    /// Law whose coordinate maximum generates the norm of `m`:
    /// `P(X > t) = (1/t) M'(1/t) - M(1/t)` above the floor.
    OrliczMax { m: OrliczFunction<T> },
    /// Law generating the l_p average for `m` (continuous part only; the
    /// kink atom, if any, lives in the atom list).
    OrliczP { m: OrliczFunction<T>, p: T },
    /// `inner` stretched by a positive factor: `P(X > t) = inner(t/factor)`.
    Scaled { inner: Box<TailKind<T>>, factor: T },
    /// Log-log monotone-cubic table with constant continuation on the left
    /// and power-law continuation on the right.
    Interpolated {
        curve: MonotoneCubic<T>,
        left_value: T,
        right_slope: T,
    },
}

impl<T: Real> TailKind<T> {
    /// Continuous part of the tail, `P(X > t, X not atomic)`.
    pub(crate) fn value(&self, t: T) -> T {
        match self {
            TailKind::Atomless => T::zero(),
            TailKind::LogGamma { p } => {
                if t <= T::one() {
                    T::one()
                } else {
                    t.powf(-*p)
                }
            }
            TailKind::OrliczMax { m } => {
                // min() guards the recip roundoff at the floor, which would
                // otherwise push the argument past the kink into the affine
                // region.
                let floor = (m.kink()).recip();
                let s = t.max(floor).recip().min(m.kink());
                let v = s * m.m1(s) - m.m0(s);
                v.max(T::zero()).min(T::one())
            }
            TailKind::OrliczP { m, p } => {
                let floor = (m.kink()).recip();
                let s = t.max(floor).recip().min(m.kink());
                let v = s * m.m1(s) - m.m0(s) - s * s / *p * m.m2(s);
                v.max(T::zero()).min(T::one())
            }
            TailKind::Scaled { inner, factor } => inner.value(t / *factor),
            TailKind::Interpolated { curve, left_value, right_slope } => {
                let nodes = curve.nodes();
                let (lo, hi) = (nodes[0], *nodes.last().unwrap());
                let lt = t.max(T::of(1e-300)).ln();
                if lt <= lo {
                    *left_value
                } else if lt >= hi {
                    (curve.node_values().last().unwrap().exp())
                        * (*right_slope * (lt - hi)).exp()
                } else {
                    curve.value(lt).exp()
                }
            }
        }
    }

    /// Density of the continuous part, where it exists.
    fn density(&self, t: T) -> T {
        match self {
            TailKind::Atomless => T::zero(),
            TailKind::LogGamma { p } => {
                if t < T::one() {
                    T::zero()
                } else {
                    *p * t.powf(-*p - T::one())
                }
            }
            TailKind::OrliczMax { m } => {
                let floor = (m.kink()).recip();
                if t < floor {
                    T::zero()
                } else {
                    m.m2(t.recip().min(m.kink())) / (t * t * t)
                }
            }
            TailKind::OrliczP { m, p } => {
                let floor = (m.kink()).recip();
                if t < floor {
                    T::zero()
                } else {
                    let s = t.recip().min(m.kink());
                    let t3 = t * t * t;
                    (T::one() - T::of(2.0) / *p) * m.m2(s) / t3
                        - m.m3(s) / (*p * t3 * t)
                }
            }
            TailKind::Scaled { inner, factor } => inner.density(t / *factor) / *factor,
            TailKind::Interpolated { curve, right_slope, .. } => {
                let nodes = curve.nodes();
                let (lo, hi) = (nodes[0], *nodes.last().unwrap());
                let lt = t.max(T::of(1e-300)).ln();
                if lt <= lo {
                    T::zero()
                } else {
                    // f = -dC/dt = -C(t) * dlnC/dlnt / t.
                    let (c, slope) = if lt >= hi {
                        (self.value(t), *right_slope)
                    } else {
                        (curve.value(lt).exp(), curve.derivative(lt))
                    };
                    (-c * slope / t).max(T::zero())
                }
            }
        }
    }

    /// Abscissae where the continuous part's density can jump.
    fn breakpoints(&self) -> Vec<T> {
        match self {
            TailKind::Atomless => Vec::new(),
            TailKind::LogGamma { .. } => vec![T::one()],
            TailKind::OrliczMax { m } | TailKind::OrliczP { m, .. } => {
                let mut pts = vec![m.kink().recip()];
                for s in m.breakpoints() {
                    if s > T::zero() {
                        pts.push(s.recip());
                    }
                }
                pts
            }
            TailKind::Scaled { inner, factor } => {
                inner.breakpoints().into_iter().map(|b| b * *factor).collect()
            }
            TailKind::Interpolated { curve, .. } => {
                let nodes = curve.nodes();
                vec![nodes[0].exp(), nodes.last().unwrap().exp()]
            }
        }
    }
}

/// `t -> P(X > t)` for a positive random variable `X`, split into a
/// continuous part and a sorted list of atoms.
#[derive(Debug, Clone)]
pub struct TailFunction<T: Real> {
    pub(crate) kind: TailKind<T>,
    atoms: Vec<Atom<T>>,
    floor: T,
}

impl<T: Real> TailFunction<T> {
    pub(crate) fn from_parts(kind: TailKind<T>, mut atoms: Vec<Atom<T>>, floor: T) -> Result<Self> {
        if !(floor.is_finite() && floor > T::zero()) {
            return Err(OrliczError::InvalidParameter(format!(
                "support floor must be positive and finite, got {floor}"
            )));
        }
        for a in &atoms {
            if !(a.location.is_finite() && a.location > T::zero()) {
                return Err(OrliczError::InvalidParameter(format!(
                    "atom location must be positive and finite, got {}",
                    a.location
                )));
            }
            if !(a.mass.is_finite() && a.mass > T::zero() && a.mass <= T::one()) {
                return Err(OrliczError::InvalidParameter(format!(
                    "atom mass must lie in (0, 1], got {}",
                    a.mass
                )));
            }
        }
        atoms.sort_by(|a, b| a.location.partial_cmp(&b.location).unwrap());
        Ok(Self { kind, atoms, floor })
    }

    /// The reference law `P(X > x) = min(1, x^{-p})`, `p > 1`.
    pub fn log_gamma(p: T) -> Result<Self> {
        if !p.is_finite() || p <= T::one() {
            return Err(OrliczError::InvalidParameter(format!(
                "tail exponent must exceed 1, got {p}"
            )));
        }
        Self::from_parts(TailKind::LogGamma { p }, Vec::new(), T::one())
    }

    /// The deterministic law `X = a` almost surely.
    pub fn point_mass(a: T) -> Result<Self> {
        if !(a.is_finite() && a > T::zero()) {
            return Err(OrliczError::InvalidParameter(format!(
                "point mass location must be positive and finite, got {a}"
            )));
        }
        Self::from_parts(TailKind::Atomless, vec![Atom { location: a, mass: T::one() }], a)
    }

    /// Continuous part of `P(X > t)`, atoms excluded.
    pub fn continuous_value(&self, t: T) -> T {
        self.kind.value(t.max(T::of(1e-300)))
    }

    /// `P(X > t)`. Arguments at or below zero return one.
    pub fn tail(&self, t: T) -> T {
        if t <= T::zero() {
            return T::one();
        }
        if t < self.floor {
            return T::one();
        }
        let atomic = self
            .atoms
            .iter()
            .filter(|a| a.location > t)
            .fold(T::zero(), |acc, a| acc + a.mass);
        (self.kind.value(t) + atomic).min(T::one())
    }

    /// `P(X >= t)` — differs from [`tail`](Self::tail) exactly at atoms.
    pub fn tail_at_least(&self, t: T) -> T {
        if t <= T::zero() {
            return T::one();
        }
        let atomic = self
            .atoms
            .iter()
            .filter(|a| a.location >= t)
            .fold(T::zero(), |acc, a| acc + a.mass);
        if t < self.floor {
            return T::one();
        }
        (self.kind.value(t) + atomic).min(T::one())
    }

    /// Density of the continuous part (atoms excluded), zero where the
    /// continuous part is flat.
    pub fn density(&self, t: T) -> T {
        if t <= T::zero() {
            return T::zero();
        }
        self.kind.density(t)
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    /// Largest `t0` such that `P(X > t) = 1` for every `t < t0`; the
    /// distribution lives on `[t0, infinity)`.
    pub fn support_floor(&self) -> T {
        self.floor
    }

    /// Points where the density may jump: kind-specific kinks plus atom
    /// locations and the floor.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut pts = self.kind.breakpoints();
        pts.push(self.floor);
        pts.extend(self.atoms.iter().map(|a| a.location));
        pts.retain(|p| p.is_finite() && *p > T::zero());
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() <= T::of(1e-12) * b.abs());
        pts
    }

    /// First moment `E[X] = \int_0^\infty P(X > t) dt`, by quadrature with
    /// the affine head below the floor taken exactly.
    pub fn mean(&self) -> Result<T> {
        let far = self.decay_point()?;
        let tol = T::of(defaults::QUADRATURE_ABS_TOL);
        let mid = integrate_with_breakpoints(
            |t| self.tail(t),
            self.floor,
            far,
            &self.breakpoints(),
            tol,
        )?;
        Ok(self.floor + mid.value + self.mass_beyond(far)?)
    }

    /// `\int_far^infty P(X > t) dt`, with the continuous part resolved by a
    /// power-law fit. Heavy tails (exponents barely above one) keep an O(1)
    /// share of their mean out here, far past where quadrature in doubles
    /// can follow; the fit is exact for the power-decay laws this crate
    /// produces.
    fn mass_beyond(&self, far: T) -> Result<T> {
        let atom_part = self
            .atoms
            .iter()
            .filter(|a| a.location > far)
            .fold(T::zero(), |acc, a| acc + a.mass * (a.location - far));
        let v1 = self.kind.value(far);
        if v1 <= T::of(1e-300) {
            return Ok(atom_part);
        }
        let v2 = self.kind.value(far * T::of(2.0));
        if v2 <= T::of(1e-300) {
            // Continuous part dies inside [far, 2 far]; crude bound, already
            // below every tolerance in play since v1 < 1e-6.
            let stub = integrate(|t| self.kind.value(t), far, far * T::of(2.0), T::of(1e-12))?;
            return Ok(atom_part + stub.value);
        }
        let beta = (v1 / v2).ln() / T::of(2.0).ln();
        if beta <= T::one() + T::of(1e-9) {
            return Err(OrliczError::NonIntegrableTail(format!(
                "tail decays like t^-{} beyond {}",
                beta.as_f64(),
                far.as_f64()
            )));
        }
        Ok(atom_part + v1 * far / (beta - T::one()))
    }

    /// A point beyond which the tail has decayed below `1e-6`, found by
    /// doubling; errors when no such point exists within range (the tail
    /// does not decay).
    pub(crate) fn decay_point(&self) -> Result<T> {
        let mut r = self.floor.max(T::one()) * T::of(2.0);
        for _ in 0..200 {
            if self.tail(r) < T::of(1e-6) {
                return Ok(r);
            }
            r *= T::of(2.0);
        }
        Err(OrliczError::NonIntegrableTail(
            "tail does not decay below 1e-6 within range".into(),
        ))
    }

    /// Type-invariant validation: tail in `[0, 1]` and nonincreasing on a
    /// grid, decays at the right end, and total mass is one.
    pub fn validate(&self) -> Result<()> {
        let far = self.decay_point()?;
        let grid = log_grid(self.floor * T::of(0.5), far, defaults::GRID_POINTS);
        let mut prev = T::one() + T::of(1e-12);
        for &t in &grid {
            let v = self.tail(t);
            if !v.is_finite() || v < -T::of(1e-12) || v > T::one() + T::of(1e-12) {
                return Err(OrliczError::InvalidParameter(format!(
                    "tail value {} at {} outside [0, 1]",
                    v.as_f64(),
                    t.as_f64()
                )));
            }
            if v > prev + T::of(1e-9) {
                return Err(OrliczError::InvalidParameter(format!(
                    "tail increases at {}",
                    t.as_f64()
                )));
            }
            prev = v;
        }
        let mass = self.total_mass()?;
        if (mass - T::one()).abs() > T::of(defaults::MASS_TOL) {
            return Err(OrliczError::MassMismatch { mass: mass.as_f64() });
        }
        Ok(())
    }

    /// Continuous mass by quadrature of the density, plus atom masses, plus
    /// the exact tail remainder past the quadrature horizon.
    pub(crate) fn total_mass(&self) -> Result<T> {
        let far = self.decay_point()?;
        let tol = T::of(defaults::QUADRATURE_ABS_TOL);
        let continuous = integrate_with_breakpoints(
            |t| self.density(t),
            self.floor * T::of(0.5),
            far,
            &self.breakpoints(),
            tol,
        )?;
        let atomic = self.atoms.iter().fold(T::zero(), |acc, a| acc + a.mass);
        let leftover = self.kind.value(far);
        Ok(continuous.value + atomic + leftover)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_gamma_matches_the_formula() {
        let xi = TailFunction::log_gamma(2.0).unwrap();
        assert_eq!(xi.tail(2.0), 0.25);
        assert_eq!(xi.tail(0.5), 1.0);
        assert_eq!(xi.tail(1.0), 1.0);
        assert!((xi.density(2.0) - 2.0 * 2.0f64.powf(-3.0)).abs() < 1e-15);
        assert_eq!(xi.density(0.5), 0.0);
        xi.validate().unwrap();
    }

    #[test]
    fn log_gamma_mean_is_p_over_p_minus_one() {
        for p in [1.5, 2.0, 3.0] {
            let xi = TailFunction::<f64>::log_gamma(p).unwrap();
            let mean = xi.mean().unwrap();
            let expected = p / (p - 1.0);
            assert!((mean - expected).abs() < 1e-6, "p={p}: {mean} vs {expected}");
        }
    }

    #[test]
    fn log_gamma_rejects_nonintegrable_exponents() {
        assert!(TailFunction::log_gamma(1.0).is_err());
        assert!(TailFunction::log_gamma(0.5).is_err());
    }

    #[test]
    fn point_mass_is_a_step() {
        let d: TailFunction<f64> = TailFunction::point_mass(2.5).unwrap();
        assert_eq!(d.tail(1.0), 1.0);
        assert_eq!(d.tail(2.5), 0.0);
        assert_eq!(d.tail_at_least(2.5), 1.0);
        assert_eq!(d.tail(3.0), 0.0);
        assert!((d.mean().unwrap() - 2.5).abs() < 1e-9);
        d.validate().unwrap();
    }

    #[test]
    fn atoms_are_the_jump_sizes() {
        let d: TailFunction<f64> = TailFunction::point_mass(2.0).unwrap();
        let eps = 1e-9;
        let jump = d.tail(2.0 - eps) - d.tail(2.0 + eps);
        assert!((jump - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constructors_reject_garbage() {
        assert!(TailFunction::point_mass(0.0).is_err());
        assert!(TailFunction::point_mass(-1.0).is_err());
        assert!(TailFunction::point_mass(f64::NAN).is_err());
        assert!(TailFunction::from_parts(
            TailKind::<f64>::Atomless,
            vec![Atom { location: 1.0, mass: 1.5 }],
            1.0
        )
        .is_err());
    }
}
