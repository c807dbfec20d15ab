//! Orlicz functions with an affine tail.
//!
//! An [`OrliczFunction`] is convex, vanishes at zero, and is affine past a
//! kink `T`: the *body* describes it on `[0, T]` and the affine extension
//! `M(T) + (t - T) M'(T)` takes over beyond. Three body families are
//! supported:
//!
//! * `power` — `t^q` with `q >= 1`;
//! * `powerlog` — `t^q (1 + ln(1 + t))^r`;
//! * tabulated — a sampled second derivative interpolated by a
//!   shape-preserving cubic, integrated in closed form, with a power-law
//!   head below the first node so values and slopes extend to the origin.
//!
//! A positive `scale` multiplies any body, and smoothing (see
//! [`crate::smooth`]) wraps one into a fourth, piecewise body. Evaluation
//! covers orders 0 through 3; for tabulated bodies the third derivative is
//! the piecewise differentiation of the interpolant and is defined almost
//! everywhere, with the left segment's value returned at node boundaries.

use crate::defaults;
use crate::error::{OrliczError, Result};
use crate::interp::MonotoneCubic;
use crate::scalar::{log_grid, Real};
use crate::smooth::Smoothed;

// =============================================================================
// Bodies
// =============================================================================

/// `c * t^e`, with the convention that a zero coefficient wins over any
/// exponent (avoids `0 * inf` at the origin).
fn pw<T: Real>(c: T, t: T, e: T) -> T {
    if c == T::zero() {
        T::zero()
    } else {
        c * t.powf(e)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Body<T: Real> {
    Power { q: T },
    PowerLog { q: T, r: T },
    Tabulated(Tabulated<T>),
    Smoothed(Smoothed<T>),
}

/// Tabulated second derivative plus everything derived from it.
#[derive(Debug, Clone)]
pub(crate) struct Tabulated<T: Real> {
    pub(crate) m2: MonotoneCubic<T>,
    grid_start: T,
    /// Head model `M''(t) = a t^b` on `[0, grid_start]`.
    head_a: T,
    head_b: T,
    /// `\int_0^{grid_start} M''` and its second antiderivative.
    m1_head: T,
    m0_head: T,
}

impl<T: Real> Tabulated<T> {
    fn new(nodes: Vec<T>, mut values: Vec<T>) -> Result<Self> {
        if nodes.first().copied().unwrap_or_else(T::zero) <= T::zero() {
            return Err(OrliczError::InvalidParameter(
                "tabulated grid must start above zero".into(),
            ));
        }
        let peak = values.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
        let clamp = T::of(defaults::NEGATIVE_DENSITY_TOL) * peak.max(T::one());
        for (i, v) in values.iter_mut().enumerate() {
            if *v < T::zero() {
                if *v < -clamp {
                    return Err(OrliczError::ConvexityViolation {
                        at: nodes[i].as_f64(),
                        value: v.as_f64(),
                    });
                }
                *v = T::zero();
            }
        }

        let (g0, g1) = (nodes[0], nodes[1]);
        let (v0, v1) = (values[0], values[1]);
        let (head_a, head_b) = if v0 > T::zero() && v1 > T::zero() {
            let b = (v1 / v0).ln() / (g1 / g0).ln();
            if b <= T::of(-1.0 + 1e-9) {
                return Err(OrliczError::NonIntegrableTail(format!(
                    "second derivative grows like t^{} toward the origin",
                    b.as_f64()
                )));
            }
            (v0 / g0.powf(b), b)
        } else {
            // Flat-zero head; the first node value is zero (or the data is
            // too degenerate for a power fit, in which case a conservative
            // linear head through the first value keeps M' continuous).
            if v0 > T::zero() {
                (v0 / g0, T::one())
            } else {
                (T::zero(), T::zero())
            }
        };
        let m1_head = pw(head_a / (head_b + T::one()), g0, head_b + T::one());
        let m0_head = pw(
            head_a / ((head_b + T::one()) * (head_b + T::of(2.0))),
            g0,
            head_b + T::of(2.0),
        );

        Ok(Self {
            m2: MonotoneCubic::new(nodes, values)?,
            grid_start: g0,
            head_a,
            head_b,
            m1_head,
            m0_head,
        })
    }
}

impl<T: Real> Body<T> {
    pub(crate) fn m0(&self, t: T) -> T {
        match self {
            Body::Power { q } => pw(T::one(), t, *q),
            Body::PowerLog { q, r } => pw(T::one(), t, *q) * ell(t).powf(*r),
            Body::Tabulated(tab) => {
                if t < tab.grid_start {
                    pw(
                        tab.head_a / ((tab.head_b + T::one()) * (tab.head_b + T::of(2.0))),
                        t,
                        tab.head_b + T::of(2.0),
                    )
                } else {
                    tab.m0_head
                        + tab.m1_head * (t - tab.grid_start)
                        + tab.m2.double_integral_from_start(t)
                }
            }
            Body::Smoothed(s) => s.m0(t),
        }
    }

    pub(crate) fn m1(&self, t: T) -> T {
        match self {
            Body::Power { q } => pw(*q, t, *q - T::one()),
            Body::PowerLog { q, r } => {
                let l = ell(t);
                pw(*q, t, *q - T::one()) * l.powf(*r)
                    + pw(*r, t, *q) * l.powf(*r - T::one()) * ell1(t)
            }
            Body::Tabulated(tab) => {
                if t < tab.grid_start {
                    pw(tab.head_a / (tab.head_b + T::one()), t, tab.head_b + T::one())
                } else {
                    tab.m1_head + tab.m2.integral_from_start(t)
                }
            }
            Body::Smoothed(s) => s.m1(t),
        }
    }

    pub(crate) fn m2(&self, t: T) -> T {
        match self {
            Body::Power { q } => pw(*q * (*q - T::one()), t, *q - T::of(2.0)),
            Body::PowerLog { q, r } => {
                let l = ell(t);
                let (l1, l2) = (ell1(t), ell2(t));
                pw(*q * (*q - T::one()), t, *q - T::of(2.0)) * l.powf(*r)
                    + T::of(2.0) * pw(*q * *r, t, *q - T::one()) * l.powf(*r - T::one()) * l1
                    + pw(*r * (*r - T::one()), t, *q) * l.powf(*r - T::of(2.0)) * l1 * l1
                    + pw(*r, t, *q) * l.powf(*r - T::one()) * l2
            }
            Body::Tabulated(tab) => {
                if t < tab.grid_start {
                    pw(tab.head_a, t, tab.head_b)
                } else {
                    tab.m2.value(t)
                }
            }
            Body::Smoothed(s) => s.m2(t),
        }
    }

    pub(crate) fn m3(&self, t: T) -> T {
        match self {
            Body::Power { q } => {
                pw(*q * (*q - T::one()) * (*q - T::of(2.0)), t, *q - T::of(3.0))
            }
            Body::PowerLog { q, r } => {
                let l = ell(t);
                let (l1, l2, l3) = (ell1(t), ell2(t), ell3(t));
                let (q, r) = (*q, *r);
                pw(q * (q - T::one()) * (q - T::of(2.0)), t, q - T::of(3.0)) * l.powf(r)
                    + T::of(3.0)
                        * pw(q * (q - T::one()) * r, t, q - T::of(2.0))
                        * l.powf(r - T::one())
                        * l1
                    + T::of(3.0)
                        * pw(q, t, q - T::one())
                        * (r * (r - T::one()) * l.powf(r - T::of(2.0)) * l1 * l1
                            + r * l.powf(r - T::one()) * l2)
                    + pw(T::one(), t, q)
                        * (r * (r - T::one()) * (r - T::of(2.0)) * l.powf(r - T::of(3.0)) * l1 * l1 * l1
                            + T::of(3.0) * r * (r - T::one()) * l.powf(r - T::of(2.0)) * l1 * l2
                            + r * l.powf(r - T::one()) * l3)
            }
            Body::Tabulated(tab) => {
                if t < tab.grid_start {
                    pw(tab.head_a * tab.head_b, t, tab.head_b - T::one())
                } else {
                    tab.m2.derivative(t)
                }
            }
            Body::Smoothed(s) => s.m3(t),
        }
    }

    /// Largest argument the body can be evaluated at; `None` when the
    /// defining formulas extend to all of `(0, inf)`.
    pub(crate) fn domain_end(&self) -> Option<T> {
        match self {
            Body::Power { .. } | Body::PowerLog { .. } => None,
            Body::Tabulated(tab) => Some(*tab.m2.nodes().last().unwrap()),
            Body::Smoothed(s) => Some(s.t_kink),
        }
    }

    /// Interior points where derivatives of order two and above may jump;
    /// quadratures over the body split here.
    pub(crate) fn breakpoints(&self) -> Vec<T> {
        match self {
            Body::Power { .. } | Body::PowerLog { .. } => Vec::new(),
            Body::Tabulated(tab) => vec![tab.grid_start],
            Body::Smoothed(s) => {
                let mut pts = s.inner.breakpoints();
                pts.extend(s.knots());
                pts
            }
        }
    }
}

// `1 + ln(1 + t)` and its first three derivatives.
fn ell<T: Real>(t: T) -> T {
    T::one() + (T::one() + t).ln()
}
fn ell1<T: Real>(t: T) -> T {
    (T::one() + t).recip()
}
fn ell2<T: Real>(t: T) -> T {
    let u = (T::one() + t).recip();
    -u * u
}
fn ell3<T: Real>(t: T) -> T {
    let u = (T::one() + t).recip();
    T::of(2.0) * u * u * u
}

// =============================================================================
// OrliczFunction
// =============================================================================

/// A convex function `M` with `M(0) = 0`, affine past the kink `t_lin`.
///
/// The Luxemburg norm it induces, the distributions it generates, and the
/// smoothing and normalization operations all live in sibling modules; this
/// type owns representation and evaluation.
#[derive(Debug, Clone)]
pub struct OrliczFunction<T: Real> {
    pub(crate) body: Body<T>,
    t_lin: T,
    scale: T,
    /// Slope of the affine extension, including `scale`.
    tail_slope: T,
    /// `scale * body(t_lin)`, cached for the affine branch.
    value_at_kink: T,
}

impl<T: Real> OrliczFunction<T> {
    // -------------------------------------------------------------------------
    // Constructors
    // -------------------------------------------------------------------------

    /// The power family `M(t) = t^q` on `[0, 1]`, extended affinely past
    /// `t = 1` (which is exactly `M^{-1}(1)`, so Luxemburg norms are
    /// unaffected by the kink).
    ///
    /// # Errors
    ///
    /// `q < 1` breaks convexity and is rejected.
    pub fn power(q: T) -> Result<Self> {
        if !q.is_finite() || q < T::one() {
            return Err(OrliczError::InvalidParameter(format!(
                "power exponent must satisfy q >= 1, got {q}"
            )));
        }
        Self::from_parts(Body::Power { q }, T::one(), T::one())
    }

    /// The power-log family `M(t) = t^q (1 + ln(1 + t))^r`, with the kink
    /// placed at `M^{-1}(1)`.
    ///
    /// Convexity is not automatic for every `(q, r)` pair; the constructor
    /// scans the standard grid and rejects combinations whose second
    /// derivative turns negative.
    pub fn power_log(q: T, r: T) -> Result<Self> {
        if !q.is_finite() || !r.is_finite() || q < T::one() {
            return Err(OrliczError::InvalidParameter(format!(
                "power-log family needs finite parameters with q >= 1, got q={q}, r={r}"
            )));
        }
        let body = Body::PowerLog { q, r };
        // Solve body(t) = 1 for the default kink.
        let mut lo = T::of(1e-12);
        let mut hi = T::one();
        while body.m0(hi) < T::one() {
            hi *= T::of(2.0);
            if hi > T::of(1e30) {
                return Err(OrliczError::InvalidParameter(
                    "power-log body never reaches 1".into(),
                ));
            }
        }
        for _ in 0..200 {
            let mid = T::of(0.5) * (lo + hi);
            if body.m0(mid) < T::one() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::from_parts(body, T::of(0.5) * (lo + hi), T::one())
    }

    /// Builds a function from samples of its second derivative on a
    /// strictly increasing grid of positive abscissae; the kink is the last
    /// grid point. `M'` and `M` are the exact antiderivatives of the
    /// interpolated data, with a fitted power head below the first node.
    pub fn from_second_derivative_samples(nodes: &[T], values: &[T]) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(OrliczError::LengthMismatch {
                expected: nodes.len(),
                got: values.len(),
            });
        }
        let tab = Tabulated::new(nodes.to_vec(), values.to_vec())?;
        let t_lin = *tab.m2.nodes().last().unwrap();
        Self::from_parts(Body::Tabulated(tab), t_lin, T::one())
    }

    /// [`Self::from_second_derivative_samples`] with an explicit affine
    /// slope instead of the continuous one, for laws whose mean exceeds the
    /// integrated curvature (an atom at the bottom of the support).
    pub(crate) fn from_tabulated_with_slope(
        nodes: &[T],
        values: &[T],
        tail_slope: T,
    ) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(OrliczError::LengthMismatch {
                expected: nodes.len(),
                got: values.len(),
            });
        }
        let tab = Tabulated::new(nodes.to_vec(), values.to_vec())?;
        let t_lin = *tab.m2.nodes().last().unwrap();
        Self::from_parts_with_slope(Body::Tabulated(tab), t_lin, T::one(), tail_slope)
    }

    /// Internal assembly + validation; `tail_slope` is the body slope at the
    /// kink (the continuous choice).
    pub(crate) fn from_parts(body: Body<T>, t_lin: T, scale: T) -> Result<Self> {
        let tail_slope = scale * body.m1(t_lin);
        Self::from_parts_with_slope(body, t_lin, scale, tail_slope)
    }

    /// Assembly with an explicit affine slope. The slope may exceed the body
    /// slope at the kink (the function then has a convex corner there, which
    /// arises when a generating distribution carries an atom at the bottom
    /// of its support); it may never undercut it.
    pub(crate) fn from_parts_with_slope(
        body: Body<T>,
        t_lin: T,
        scale: T,
        tail_slope: T,
    ) -> Result<Self> {
        if !(t_lin.is_finite() && t_lin > T::zero()) {
            return Err(OrliczError::InvalidParameter(format!(
                "kink position must be positive and finite, got {t_lin}"
            )));
        }
        if !(scale.is_finite() && scale > T::zero()) {
            return Err(OrliczError::InvalidParameter(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        if let Some(end) = body.domain_end() {
            if t_lin > end * (T::one() + T::of(1e-12)) {
                return Err(OrliczError::DomainExceeded {
                    value: t_lin.as_f64(),
                    max: end.as_f64(),
                });
            }
        }
        let value_at_kink = scale * body.m0(t_lin);
        if !value_at_kink.is_finite() || !tail_slope.is_finite() {
            return Err(OrliczError::NonFiniteInput("function kink data"));
        }
        if tail_slope <= T::zero() {
            return Err(OrliczError::InvalidParameter(
                "affine tail slope must be positive".into(),
            ));
        }
        let body_slope = scale * body.m1(t_lin);
        if tail_slope < body_slope * (T::one() - T::of(1e-7)) - T::of(1e-12) {
            return Err(OrliczError::ConvexityViolation {
                at: t_lin.as_f64(),
                value: (tail_slope - body_slope).as_f64(),
            });
        }
        let f = Self { body, t_lin, scale, tail_slope, value_at_kink };
        f.validate_convexity()?;
        Ok(f)
    }

    fn validate_convexity(&self) -> Result<()> {
        let grid = self.default_grid(defaults::GRID_POINTS);
        let mut peak = T::zero();
        let mut worst = (T::zero(), T::zero());
        for &t in &grid {
            let v = self.body.m2(t);
            if !v.is_finite() {
                return Err(OrliczError::NonFiniteInput("second derivative on grid"));
            }
            peak = peak.max(v);
            if v < worst.1 {
                worst = (t, v);
            }
        }
        if worst.1 < -T::of(defaults::NEGATIVE_DENSITY_TOL) * peak.max(T::one()) {
            return Err(OrliczError::ConvexityViolation {
                at: worst.0.as_f64(),
                value: (self.scale * worst.1).as_f64(),
            });
        }
        Ok(())
    }

    // -------------------------------------------------------------------------
    // Evaluation
    // -------------------------------------------------------------------------

    /// Evaluates the function (`order = 0`) or one of its first three
    /// derivatives at `t >= 0`.
    ///
    /// Beyond the kink the extension is affine, so orders two and three are
    /// identically zero there; at the kink itself the body's (left) values
    /// are returned. For exponents below two the second derivative is
    /// unbounded toward the origin and `eval(0, 2)` reflects that.
    ///
    /// # Errors
    ///
    /// Negative or non-finite `t`, or `order > 3`.
    pub fn eval(&self, t: T, order: usize) -> Result<T> {
        if !t.is_finite() || t < T::zero() {
            return Err(OrliczError::InvalidParameter(format!(
                "evaluation point must be finite and nonnegative, got {t}"
            )));
        }
        match order {
            0 => Ok(self.m0(t)),
            1 => Ok(self.m1(t)),
            2 => Ok(self.m2(t)),
            3 => Ok(self.m3(t)),
            _ => Err(OrliczError::InvalidParameter(format!(
                "derivative order must be 0..=3, got {order}"
            ))),
        }
    }

    pub(crate) fn m0(&self, t: T) -> T {
        if t <= self.t_lin {
            self.scale * self.body.m0(t)
        } else {
            self.value_at_kink + (t - self.t_lin) * self.tail_slope
        }
    }

    pub(crate) fn m1(&self, t: T) -> T {
        if t <= self.t_lin {
            self.scale * self.body.m1(t)
        } else {
            self.tail_slope
        }
    }

    pub(crate) fn m2(&self, t: T) -> T {
        if t <= self.t_lin {
            self.scale * self.body.m2(t)
        } else {
            T::zero()
        }
    }

    pub(crate) fn m3(&self, t: T) -> T {
        if t <= self.t_lin {
            self.scale * self.body.m3(t)
        } else {
            T::zero()
        }
    }

    /// Inverse of the (nondecreasing) function: the smallest `t` with
    /// `M(t) = y`.
    pub fn inverse(&self, y: T) -> Result<T> {
        if !y.is_finite() || y < T::zero() {
            return Err(OrliczError::InvalidParameter(format!(
                "inverse argument must be finite and nonnegative, got {y}"
            )));
        }
        if y == T::zero() {
            return Ok(T::zero());
        }
        if y >= self.value_at_kink {
            return Ok(self.t_lin + (y - self.value_at_kink) / self.tail_slope);
        }
        let (mut lo, mut hi) = (T::zero(), self.t_lin);
        for _ in 0..200 {
            let mid = T::of(0.5) * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.m0(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= T::epsilon() * T::of(4.0) * hi {
                break;
            }
        }
        Ok(T::of(0.5) * (lo + hi))
    }

    // -------------------------------------------------------------------------
    // Structure
    // -------------------------------------------------------------------------

    pub fn kink(&self) -> T {
        self.t_lin
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    /// Slope of the affine extension. Coincides with `M'(t_lin)` except for
    /// functions recovered from distributions with an atom at the bottom of
    /// the support, where `M'` genuinely jumps at the kink.
    pub fn tail_slope(&self) -> T {
        self.tail_slope
    }

    /// The standard logarithmic validation grid `[1e-6 T, T]`.
    pub fn default_grid(&self, n: usize) -> Vec<T> {
        log_grid(T::of(defaults::GRID_SPAN) * self.t_lin, self.t_lin, n)
    }

    /// Interior abscissae where higher derivatives may jump (tabulation
    /// heads, smoothing knots). Useful as quadrature breakpoints.
    pub fn breakpoints(&self) -> Vec<T> {
        self.body.breakpoints()
    }

    /// Returns the same function scaled by `factor > 0`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        if !(factor.is_finite() && factor > T::zero()) {
            return Err(OrliczError::InvalidParameter(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        Self::from_parts_with_slope(
            self.body.clone(),
            self.t_lin,
            self.scale * factor,
            self.tail_slope * factor,
        )
    }

    // -------------------------------------------------------------------------
    // Normalization and extension
    // -------------------------------------------------------------------------

    /// `\int_0^\infty x \, dM'(x)`, which the affine tail collapses to
    /// `T M'(T) - M(T)` with `M'(T)` the tail slope.
    pub fn normalization_integral(&self) -> T {
        self.t_lin * self.tail_slope - self.value_at_kink
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.normalization_integral() - T::one()).abs() <= tol
    }

    /// Moves the kink to the unique `T*` with `T* M'(T*) - M(T*) = 1`,
    /// leaving body and scale untouched. A function already normalized to
    /// within the standard tolerance is returned as-is — this keeps the
    /// operation an identity on functions whose kink slope genuinely jumps
    /// (atom-generated ones), where no nearby continuous solution exists.
    ///
    /// # Errors
    ///
    /// [`OrliczError::NonNormalizable`] when the integral stays below one on
    /// the whole representable domain (degenerate bodies such as `t^1`, or
    /// tabulated bodies whose grid ends too early).
    pub fn normalize(&self) -> Result<Self> {
        if self.is_normalized(T::of(defaults::NORMALIZATION_TOL)) {
            return Ok(self.clone());
        }
        let g = |t: T| self.scale * (t * self.body.m1(t) - self.body.m0(t));
        let mut hi = match self.body.domain_end() {
            Some(end) => {
                let ge = g(end);
                if ge < T::one() - T::of(1e-12) {
                    return Err(OrliczError::NonNormalizable { supremum: ge.as_f64() });
                }
                end
            }
            None => {
                let mut hi = self.t_lin.max(T::one());
                let mut tries = 0;
                while g(hi) < T::one() {
                    hi *= T::of(2.0);
                    tries += 1;
                    if tries > 256 {
                        return Err(OrliczError::NonNormalizable {
                            supremum: g(hi).as_f64(),
                        });
                    }
                }
                hi
            }
        };
        let mut lo = T::zero();
        for _ in 0..300 {
            let mid = T::of(0.5) * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < T::one() {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo) <= T::of(defaults::BISECTION_REL_TOL) * hi {
                break;
            }
        }
        let t_star = T::of(0.5) * (lo + hi);
        Self::from_parts(self.body.clone(), t_star, self.scale)
    }

    /// Replaces the affine extension: the body is kept on `[0, T]` and
    /// extended affinely from there with slope `M'(T)`.
    ///
    /// # Errors
    ///
    /// `T` must be positive, finite, and within the body's representable
    /// domain (tabulated and smoothed bodies cannot be evaluated past their
    /// last node).
    pub fn linear_extension(&self, t: T) -> Result<Self> {
        if !(t.is_finite() && t > T::zero()) {
            return Err(OrliczError::InvalidParameter(format!(
                "extension point must be positive and finite, got {t}"
            )));
        }
        Self::from_parts(self.body.clone(), t, self.scale)
    }
}

// =============================================================================
// Tests
// =============================================================================
