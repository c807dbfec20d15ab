//! Kink smoothing.
//!
//! [`approx_smooth_kink`] replaces a function `M` near its kink `T` by one
//! whose second derivative ramps linearly down to an exact zero at `T`, so
//! the affine extension attaches with two continuous derivatives. The
//! construction caps the second derivative on a window `[T(1-d), T]`:
//!
//! ```text
//! N''(t) = min( M''(t), M''(T(1-d)) * (T - t) / (T d) )
//! ```
//!
//! and integrates twice, matching value and slope at the window's left edge.
//! Since `N'' <= M''` everywhere and the two functions agree to first order
//! at `T(1-d)`, `N <= M` pointwise; the window width `d` is chosen as large
//! as possible subject to
//!
//! ```text
//! T d^2 max_{[T(1-d), T]} M''  <=  (c - 1) M(T(1-d)),
//! ```
//!
//! which bounds the sacrificed mass and guarantees `M <= c N`.

use crate::error::{OrliczError, Result};
use crate::function::{Body, OrliczFunction};
use crate::scalar::Real;

/// One maximal interval on which `N''` is either the linear ramp or the
/// untouched inner second derivative. Slope and value accumulate from the
/// left so evaluation inside any segment is closed-form.
#[derive(Debug, Clone)]
struct Segment<T> {
    start: T,
    end: T,
    ramp: bool,
    m1_start: T,
    m0_start: T,
}

#[derive(Debug, Clone)]
pub(crate) struct Smoothed<T: Real> {
    pub(crate) inner: Box<Body<T>>,
    pub(crate) t_low: T,
    pub(crate) t_kink: T,
    ramp_height: T,
    denom: T,
    segments: Vec<Segment<T>>,
}

impl<T: Real> Smoothed<T> {
    fn ramp(&self, t: T) -> T {
        self.ramp_height * (self.t_kink - t) / self.denom
    }

    /// `\int_a^t` of the ramp.
    fn ramp_int(&self, a: T, t: T) -> T {
        let big = self.t_kink - a;
        let small = self.t_kink - t;
        self.ramp_height * (big * big - small * small) / (T::of(2.0) * self.denom)
    }

    /// `\int_a^t \int_a^u` of the ramp.
    fn ramp_dint(&self, a: T, t: T) -> T {
        let big = self.t_kink - a;
        let small = self.t_kink - t;
        self.ramp_height
            * (big * big * (t - a) - (big * big * big - small * small * small) / T::of(3.0))
            / (T::of(2.0) * self.denom)
    }

    fn segment(&self, t: T) -> &Segment<T> {
        self.segments
            .iter()
            .find(|s| t < s.end)
            .unwrap_or_else(|| self.segments.last().unwrap())
    }

    /// Interior segment boundaries (crossing points of ramp and inner
    /// second derivative), plus the window edge itself.
    pub(crate) fn knots(&self) -> Vec<T> {
        self.segments.iter().map(|s| s.start).collect()
    }

    pub(crate) fn m0(&self, t: T) -> T {
        if t <= self.t_low {
            return self.inner.m0(t);
        }
        let t = t.min(self.t_kink);
        let s = self.segment(t);
        let linear = s.m0_start + s.m1_start * (t - s.start);
        if s.ramp {
            linear + self.ramp_dint(s.start, t)
        } else {
            linear + self.inner.m0(t) - self.inner.m0(s.start)
                - self.inner.m1(s.start) * (t - s.start)
        }
    }

    pub(crate) fn m1(&self, t: T) -> T {
        if t <= self.t_low {
            return self.inner.m1(t);
        }
        let t = t.min(self.t_kink);
        let s = self.segment(t);
        if s.ramp {
            s.m1_start + self.ramp_int(s.start, t)
        } else {
            s.m1_start + self.inner.m1(t) - self.inner.m1(s.start)
        }
    }

    pub(crate) fn m2(&self, t: T) -> T {
        if t <= self.t_low {
            return self.inner.m2(t);
        }
        if t >= self.t_kink {
            // The final segment is always a ramp, which hits zero at the
            // kink by construction.
            return T::zero();
        }
        let s = self.segment(t);
        if s.ramp {
            self.ramp(t)
        } else {
            self.inner.m2(t)
        }
    }

    pub(crate) fn m3(&self, t: T) -> T {
        if t <= self.t_low {
            return self.inner.m3(t);
        }
        let t = t.min(self.t_kink);
        let s = self.segment(t);
        if s.ramp {
            -self.ramp_height / self.denom
        } else {
            self.inner.m3(t)
        }
    }
}

/// Smooths the kink of `m` as described in the module docs, returning the
/// smoothed function `N` together with the chosen window width `d`.
///
/// The pair satisfies `N <= M <= c N` pointwise, `N = M` below `T(1-d)`,
/// and `N''(T) = 0` exactly. A function whose second derivative already
/// vanishes at the kink is returned unchanged with `d = 0`, which makes the
/// operation idempotent.
///
/// # Errors
///
/// `c` must be finite and strictly greater than one.
pub fn approx_smooth_kink<T: Real>(
    m: &OrliczFunction<T>,
    c: T,
) -> Result<(OrliczFunction<T>, T)> {
    if !c.is_finite() || c <= T::one() {
        return Err(OrliczError::InvalidParameter(format!(
            "smoothing constant must exceed 1, got {c}"
        )));
    }
    let t_kink = m.kink();
    if m.body.m2(t_kink) <= T::zero() {
        return Ok((m.clone(), T::zero()));
    }

    // Largest window width satisfying the mass condition. The left side
    // grows and the right side shrinks in d, so the admissible set is an
    // interval anchored at zero and bisection applies.
    let window_max_m2 = |d: T| {
        let lo = t_kink * (T::one() - d);
        let mut peak = T::zero();
        let steps = 256;
        for i in 0..=steps {
            let t = lo + (t_kink - lo) * T::of(i as f64 / steps as f64);
            peak = peak.max(m.body.m2(t));
        }
        peak
    };
    let admissible = |d: T| {
        t_kink * d * d * window_max_m2(d)
            <= (c - T::one()) * m.body.m0(t_kink * (T::one() - d))
    };
    let cap = T::one() - T::of(1e-6);
    let delta = if admissible(cap) {
        cap
    } else {
        let (mut lo, mut hi) = (T::zero(), cap);
        for _ in 0..100 {
            let mid = T::of(0.5) * (lo + hi);
            if admissible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if delta.is_nan() || delta <= T::zero() {
        return Err(OrliczError::InvalidParameter(
            "no admissible smoothing window; the function is degenerate at its kink".into(),
        ));
    }

    let t_low = t_kink * (T::one() - delta);
    let denom = t_kink - t_low;
    let ramp_height = m.body.m2(t_low);
    let inner = m.body.clone();

    // Partition the window by comparing the ramp with the inner second
    // derivative at midpoints of a fine scan, bisecting each sign change.
    let h = |t: T| ramp_height * (t_kink - t) / denom - inner.m2(t);
    let scan = 512;
    let at = |i: usize| t_low + denom * T::of(i as f64 / scan as f64);
    let mut boundaries: Vec<(T, bool)> = Vec::new();
    let mid0 = T::of(0.5) * (at(0) + at(1));
    let mut mode = h(mid0) <= T::zero();
    boundaries.push((t_low, mode));
    for i in 1..scan {
        let mid = T::of(0.5) * (at(i) + at(i + 1));
        let next = h(mid) <= T::zero();
        if next != mode {
            let (mut a, mut b) = (T::of(0.5) * (at(i - 1) + at(i)), mid);
            for _ in 0..80 {
                let x = T::of(0.5) * (a + b);
                if (h(x) <= T::zero()) == mode {
                    a = x;
                } else {
                    b = x;
                }
            }
            boundaries.push((T::of(0.5) * (a + b), next));
            mode = next;
        }
    }

    let mut segments = Vec::with_capacity(boundaries.len());
    let mut cur1 = inner.m1(t_low);
    let mut cur0 = inner.m0(t_low);
    let two = T::of(2.0);
    for (k, &(start, ramp)) in boundaries.iter().enumerate() {
        let end = boundaries.get(k + 1).map_or(t_kink, |&(b, _)| b);
        segments.push(Segment { start, end, ramp, m1_start: cur1, m0_start: cur0 });
        // Advance value and slope across this segment in closed form.
        let width = end - start;
        let (slope_gain, curve_area) = if ramp {
            let big = t_kink - start;
            let small = t_kink - end;
            (
                ramp_height * (big * big - small * small) / (two * denom),
                ramp_height
                    * (big * big * width - (big * big * big - small * small * small) / T::of(3.0))
                    / (two * denom),
            )
        } else {
            (
                inner.m1(end) - inner.m1(start),
                inner.m0(end) - inner.m0(start) - inner.m1(start) * width,
            )
        };
        cur0 = cur0 + cur1 * width + curve_area;
        cur1 += slope_gain;
    }

    let smoothed = Smoothed { inner: Box::new(inner), t_low, t_kink, ramp_height, denom, segments };
    let n = OrliczFunction::from_parts(Body::Smoothed(smoothed), t_kink, m.scale())?;
    Ok((n, delta))
}
