//! Conversions between Orlicz functions and the laws that generate them.
//!
//! Forward direction: a normalized function `M` determines a positive random
//! variable `X` whose coordinate maximum (or l_p average) reproduces the
//! `M`-norm in expectation. The tail and density come straight from the
//! calculus of `M`:
//!
//! ```text
//! max case:  P(X > t) = (1/t) M'(1/t) - M(1/t),      f(t) = t^{-3} M''(1/t)
//! l_p case:  P(X > x) = -M(1/x) + (1/x)M'(1/x) - (1/(p x^2)) M''(1/x)
//! ```
//!
//! Backward direction: a tail determines `M` through its truncated moments;
//! we tabulate `M''` analytically and integrate in closed form, so the
//! roundtrips are exact up to interpolation error.
//!
//! The multiplicative convolution `product_tail` ties the two averaging
//! schemes together: an l_p generator times an independent Pareto-type
//! factor has exactly the max-generator law.

use crate::defaults;
use crate::error::{OrliczError, Result};
use crate::function::OrliczFunction;
use crate::interp::MonotoneCubic;
use crate::norm::MusielakFamily;
use crate::quad::{integrate_to_infinity, integrate_with_breakpoints};
use crate::scalar::{log_grid, Real};
use crate::tail::{Atom, TailFunction, TailKind};

// =============================================================================
// Preconditions
// =============================================================================

fn require_normalized<T: Real>(m: &OrliczFunction<T>) -> Result<()> {
    let integral = m.normalization_integral();
    if (integral - T::one()).abs() > T::of(defaults::NORMALIZATION_TOL) {
        return Err(OrliczError::NotNormalized {
            integral: integral.as_f64(),
        });
    }
    Ok(())
}

/// The generation formulas require `M'(0) = 0`. A pure grid threshold fails
/// slowly-vanishing slopes (e.g. exponents just above one, where
/// `M'(1e-8) ~ 1e-2`), so the slope is accepted if it is already negligible
/// at the probe point or demonstrably decaying toward the origin.
fn require_vanishing_slope<T: Real>(m: &OrliczFunction<T>) -> Result<()> {
    let near = m.m1(T::of(defaults::ORIGIN_PROBE));
    if near <= T::of(defaults::ORIGIN_SLOPE_TOL) {
        return Ok(());
    }
    let farther = m.m1(T::of(defaults::ORIGIN_PROBE * 100.0));
    if near < T::of(0.99) * farther {
        return Ok(());
    }
    Err(OrliczError::HypothesisNotMet(format!(
        "M'(0) = 0 fails: slope {} at {} does not vanish toward the origin",
        near.as_f64(),
        defaults::ORIGIN_PROBE
    )))
}

// =============================================================================
// Forward: Orlicz function -> law
// =============================================================================

/// Law of the variable whose coordinate maximum generates the `M`-norm:
/// `P(X > t) = (1/t) M'(1/t) - M(1/t)`, identically one below `1/T`.
///
/// # Errors
///
/// Unnormalized input, or an `M` whose slope does not vanish at zero.
pub fn tail_from_orlicz_max<T: Real>(m: &OrliczFunction<T>) -> Result<TailFunction<T>> {
    require_normalized(m)?;
    require_vanishing_slope(m)?;
    let floor = m.kink().recip();
    let tail = TailFunction::from_parts(TailKind::OrliczMax { m: m.clone() }, Vec::new(), floor)?;
    tail.validate()?;
    Ok(tail)
}

/// Density companion of [`tail_from_orlicz_max`]: `f(t) = t^{-3} M''(1/t)`
/// above the floor, zero below, no atoms.
pub fn density_from_orlicz_max<T: Real>(m: &OrliczFunction<T>) -> Result<DensityModel<T>> {
    DensityModel::new(tail_from_orlicz_max(m)?)
}

/// Law of the variable whose l_p average generates the `M`-norm.
///
/// When `M''(T) > 0` the tail genuinely jumps at the bottom of the support
/// and the jump is carried as an explicit atom of mass `T^2 M''(T) / p`;
/// smoothing `M` first (see [`crate::approx_smooth_kink`]) removes it.
///
/// # Errors
///
/// [`OrliczError::NegativeDensity`] when the density formula turns negative
/// — the construction is then not a probability law for this `(M, p)`.
pub fn tail_from_orlicz_p<T: Real>(m: &OrliczFunction<T>, p: T) -> Result<TailFunction<T>> {
    require_normalized(m)?;
    require_vanishing_slope(m)?;
    if !p.is_finite() || p <= T::one() {
        return Err(OrliczError::InvalidParameter(format!(
            "exponent must satisfy p > 1, got {p}"
        )));
    }
    let kink = m.kink();
    let floor = kink.recip();
    let kind = TailKind::OrliczP { m: m.clone(), p };

    // Reject negative densities before any mass bookkeeping: the raw
    // formula, not the clamped evaluation, decides validity.
    let far = provisional_decay(&kind, floor);
    let grid = log_grid(floor, far, defaults::GRID_POINTS);
    let mut worst = (T::zero(), T::zero());
    for &x in &grid {
        let s = x.recip();
        let x3 = x * x * x;
        let raw = (T::one() - T::of(2.0) / p) * m.m2(s) / x3 - m.m3(s) / (p * x3 * x);
        if raw < worst.1 {
            worst = (x, raw);
        }
    }
    if worst.1 < -T::of(defaults::NEGATIVE_DENSITY_TOL) {
        return Err(OrliczError::NegativeDensity {
            at: worst.0.as_f64(),
            value: worst.1.as_f64(),
        });
    }

    let jump = kink * kink * m.m2(kink) / p;
    let mut atoms = Vec::new();
    if jump > T::of(1e-12) {
        if jump > T::one() + T::of(1e-9) {
            return Err(OrliczError::MassMismatch { mass: jump.as_f64() });
        }
        atoms.push(Atom { location: floor, mass: jump.min(T::one()) });
    }
    let tail = TailFunction::from_parts(kind, atoms, floor)?;
    tail.validate()?;
    Ok(tail)
}

/// Density companion of [`tail_from_orlicz_p`]:
/// `f(x) = (1 - 2/p) x^{-3} M''(1/x) - (1/p) x^{-4} M'''(1/x)`.
pub fn density_from_orlicz_p<T: Real>(m: &OrliczFunction<T>, p: T) -> Result<DensityModel<T>> {
    DensityModel::new(tail_from_orlicz_p(m, p)?)
}

/// The `p = 2` special case, where the first density term vanishes and
/// `f(x) = -(1/(2 x^4)) M'''(1/x)`. Delegates to the general construction —
/// the `(1 - 2/p)` coefficient is exactly zero — so agreement with
/// `density_from_orlicz_p(m, 2)` is bitwise.
pub fn density_from_orlicz_2<T: Real>(m: &OrliczFunction<T>) -> Result<DensityModel<T>> {
    density_from_orlicz_p(m, T::of(2.0))
}

/// Doubling probe used before a `TailFunction` exists to host `decay_point`.
fn provisional_decay<T: Real>(kind: &TailKind<T>, floor: T) -> T {
    let mut r = floor.max(T::one()) * T::of(2.0);
    for _ in 0..200 {
        if kind.value(r) < T::of(1e-6) {
            break;
        }
        r *= T::of(2.0);
    }
    r
}

// =============================================================================
// Density wrapper
// =============================================================================

/// Validated density view of a tail: nonnegative pdf plus the atom list,
/// with unit total mass.
#[derive(Debug, Clone)]
pub struct DensityModel<T: Real> {
    source: TailFunction<T>,
}

impl<T: Real> DensityModel<T> {
    pub(crate) fn new(source: TailFunction<T>) -> Result<Self> {
        let far = source.decay_point()?;
        let grid = log_grid(source.support_floor(), far, defaults::GRID_POINTS);
        let mut worst = (T::zero(), T::zero());
        for &x in &grid {
            let v = source.density(x);
            if v < worst.1 {
                worst = (x, v);
            }
        }
        if worst.1 < -T::of(defaults::NEGATIVE_DENSITY_TOL) {
            return Err(OrliczError::NegativeDensity {
                at: worst.0.as_f64(),
                value: worst.1.as_f64(),
            });
        }
        let mass = source.total_mass()?;
        if (mass - T::one()).abs() > T::of(defaults::MASS_TOL) {
            return Err(OrliczError::MassMismatch { mass: mass.as_f64() });
        }
        Ok(Self { source })
    }

    /// Nonnegative density (quadrature-level negative noise clamped to 0).
    pub fn pdf(&self, x: T) -> T {
        self.source.density(x).max(T::zero())
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        self.source.atoms()
    }

    pub fn tail(&self) -> &TailFunction<T> {
        &self.source
    }
}

// =============================================================================
// Backward: law -> Orlicz function
// =============================================================================

/// Reconstructs the Orlicz function whose coordinate-maximum law is `d`:
/// `M''(s) = f(1/s) / s^3` tabulated on a log grid ending at `1/floor`, with
/// the affine slope `M'(T) = E[X]` attached at the kink.
///
/// An atom at the support floor is admissible (it produces the genuine slope
/// jump `M'(T^+) > M'(T^-)`); atoms strictly inside the support would put a
/// kink inside the body and are rejected.
pub fn orlicz_from_distribution_max<T: Real>(d: &TailFunction<T>) -> Result<OrliczFunction<T>> {
    let floor = d.support_floor();
    for a in d.atoms() {
        if a.location > floor * (T::one() + T::of(1e-9)) {
            return Err(OrliczError::InvalidParameter(format!(
                "atom at {} above the support floor {} is not representable",
                a.location.as_f64(),
                floor.as_f64()
            )));
        }
    }
    let t_out = floor.recip();
    let nodes = sample_grid(d, t_out);
    let values: Vec<T> = nodes
        .iter()
        .map(|&s| {
            // Clamp against recip roundoff: 1/(1/floor) may land one ulp
            // below the floor, where the density is identically zero.
            let x = s.recip().max(floor);
            d.density(x) / (s * s * s)
        })
        .collect();
    let mean = d.mean()?;
    OrliczFunction::from_tabulated_with_slope(&nodes, &values, mean)
}

/// Reconstructs the Orlicz function whose l_p-average law is `d`, through
/// the truncated-moment identity `M''(s) = p s^{p-2} E[X^p 1{X <= 1/s}]`.
pub fn orlicz_from_distribution_p<T: Real>(d: &TailFunction<T>, p: T) -> Result<OrliczFunction<T>> {
    if !p.is_finite() || p <= T::one() {
        return Err(OrliczError::InvalidParameter(format!(
            "exponent must satisfy p > 1, got {p}"
        )));
    }
    let floor = d.support_floor();
    for a in d.atoms() {
        if a.location > floor * (T::one() + T::of(1e-9)) {
            return Err(OrliczError::InvalidParameter(format!(
                "atom at {} above the support floor {} is not representable",
                a.location.as_f64(),
                floor.as_f64()
            )));
        }
    }
    let t_out = floor.recip();
    let nodes = sample_grid(d, t_out);

    // Truncated p-th moments by parts:
    //   E[X^p 1{X <= b}] = p \int_0^b x^{p-1} tail(x) dx - b^p tail(b),
    // accumulated once over the sorted bounds b = 1/s. Below the floor the
    // integrand is exactly x^{p-1}, so the first piece is closed-form.
    let mut bounds: Vec<T> = nodes.iter().rev().map(|&s| s.recip()).collect();
    // 1/(1/floor) may sit one ulp off the floor; the first bound is the
    // floor by construction, and an ulp below it would drop the atom there.
    bounds[0] = floor;
    let bps = d.breakpoints();
    let tol = T::of(defaults::QUADRATURE_ABS_TOL);
    let mut running = floor.powf(p) / p;
    let mut moments = Vec::with_capacity(bounds.len());
    moments.push(p * running - bounds[0].powf(p) * d.tail(bounds[0]));
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        let seg_tol = (tol * (b - a) / (bounds[bounds.len() - 1] - floor)).max(T::of(1e-13));
        let piece = integrate_with_breakpoints(
            |x| x.powf(p - T::one()) * d.tail(x),
            a,
            b,
            &bps,
            seg_tol,
        )?;
        running += piece.value;
        moments.push(p * running - b.powf(p) * d.tail(b));
    }

    let values: Vec<T> = nodes
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let truncated = moments[nodes.len() - 1 - k].max(T::zero());
            p * s.powf(p - T::of(2.0)) * truncated
        })
        .collect();

    // Affine slope at the kink: M'(T) = p/(p-1) [ T^{p-1} E[X^p 1{X<=1/T}]
    // + E[X 1{X > 1/T}] ].
    let atom_mass_at_floor = d
        .atoms()
        .iter()
        .filter(|a| a.location <= floor * (T::one() + T::of(1e-9)))
        .fold(T::zero(), |acc, a| acc + a.mass);
    let upper_mean = d.mean()? - floor * atom_mass_at_floor;
    // bounds ascend, so the moment truncated at the kink (b = floor) is the
    // first entry.
    let truncated_at_kink = moments[0].max(T::zero());
    let slope =
        p / (p - T::one()) * (t_out.powf(p - T::one()) * truncated_at_kink + upper_mean);
    OrliczFunction::from_tabulated_with_slope(&nodes, &values, slope)
}

/// Tabulation grid for the backward constructions: log-spaced up to the
/// reconstructed kink, with extra nodes wherever the law's density can jump
/// — interpolating across such a corner would bias the integrated slope.
fn sample_grid<T: Real>(d: &TailFunction<T>, t_out: T) -> Vec<T> {
    let mut nodes = log_grid(T::of(defaults::GRID_SPAN) * t_out, t_out, defaults::TABLE_POINTS);
    let lo = nodes[0];
    for bp in d.breakpoints() {
        if bp > T::zero() {
            // Bracket the corner with sliver nodes so the derivative blend
            // at the corner node only corrupts a vanishingly thin segment.
            let s = bp.recip();
            for shift in [T::one() - T::of(1e-9), T::one(), T::one() + T::of(1e-9)] {
                let v = s * shift;
                if v > lo && v < t_out {
                    nodes.push(v);
                }
            }
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup_by(|b, a| *b - *a <= T::of(1e-12) * *a);
    nodes
}

/// Coordinate-wise [`orlicz_from_distribution_max`].
pub fn musielak_from_distributions<T: Real>(ds: &[TailFunction<T>]) -> Result<MusielakFamily<T>> {
    let functions = ds
        .iter()
        .map(orlicz_from_distribution_max)
        .collect::<Result<Vec<_>>>()?;
    MusielakFamily::new(functions)
}

// =============================================================================
// Multiplicative convolution
// =============================================================================

/// Law of the product `X Y` of independent variables with laws `mu` and `y`:
/// `P(XY > z) = \int P(Y > z/x) d mu(x)`.
///
/// Point-mass factors short-circuit to an exact rescaling. Otherwise the
/// continuous part is computed by quadrature on `z_grid` and interpolated
/// log-log (so the result is exact at the grid nodes), and product atoms are
/// the cross products of the factor atoms.
pub fn product_tail<T: Real>(
    mu: &TailFunction<T>,
    y: &TailFunction<T>,
    z_grid: &[T],
) -> Result<TailFunction<T>> {
    if let Some(a) = sole_point_mass(mu) {
        return scaled_copy(y, a);
    }
    if let Some(b) = sole_point_mass(y) {
        return scaled_copy(mu, b);
    }
    if z_grid.len() < 2 || z_grid.windows(2).any(|w| w[1] <= w[0]) || z_grid[0] <= T::zero() {
        return Err(OrliczError::InvalidParameter(
            "product grid must be strictly increasing and positive".into(),
        ));
    }

    let floor = mu.support_floor() * y.support_floor();
    let mut atoms: Vec<Atom<T>> = Vec::new();
    for am in mu.atoms() {
        for ay in y.atoms() {
            let loc = am.location * ay.location;
            let mass = am.mass * ay.mass;
            match atoms
                .iter_mut()
                .find(|a| (a.location - loc).abs() <= T::of(1e-12) * loc)
            {
                Some(hit) => hit.mass += mass,
                None => atoms.push(Atom { location: loc, mass }),
            }
        }
    }

    let tol = T::of(defaults::QUADRATURE_ABS_TOL);
    let x_far = mu.decay_point()?;
    let y_bps = y.breakpoints();
    let mu_bps = mu.breakpoints();
    let continuous_at = |z: T| -> Result<T> {
        // Atomic X against continuous Y.
        let mut c = mu
            .atoms()
            .iter()
            .fold(T::zero(), |acc, a| acc + a.mass * y.continuous_value(z / a.location));
        // Continuous X against all of Y; the integrand kinks where z/x
        // crosses a breakpoint of Y.
        let mut bps: Vec<T> = mu_bps.clone();
        for &b in &y_bps {
            if b > T::zero() {
                bps.push(z / b);
            }
        }
        let head = integrate_with_breakpoints(
            |x| mu.density(x) * y.tail(z / x),
            mu.support_floor(),
            x_far,
            &bps,
            tol,
        )?;
        let rest = integrate_to_infinity(|x| mu.density(x) * y.tail(z / x), x_far, tol)?;
        c = c + head.value + rest.value;
        Ok(c.max(T::zero()).min(T::one()))
    };

    let mut ln_z = Vec::with_capacity(z_grid.len());
    let mut ln_c = Vec::with_capacity(z_grid.len());
    let mut prev = T::infinity();
    for &z in z_grid {
        let c = continuous_at(z)?.min(prev);
        prev = c;
        ln_z.push(z.ln());
        ln_c.push(c.max(T::of(1e-300)).ln());
    }
    let left_value = ln_c[0].exp();
    let curve = MonotoneCubic::new(ln_z, ln_c.clone())?;
    let right_slope = {
        let n = ln_c.len();
        let last = curve.nodes()[n - 1];
        curve.derivative(last).min(T::zero())
    };
    let kind = TailKind::Interpolated { curve, left_value, right_slope };
    TailFunction::from_parts(kind, atoms, floor)
}

fn sole_point_mass<T: Real>(d: &TailFunction<T>) -> Option<T> {
    match (&d.kind, d.atoms()) {
        (TailKind::Atomless, [a]) if (a.mass - T::one()).abs() <= T::of(1e-12) => {
            Some(a.location)
        }
        _ => None,
    }
}

fn scaled_copy<T: Real>(d: &TailFunction<T>, factor: T) -> Result<TailFunction<T>> {
    let atoms = d
        .atoms()
        .iter()
        .map(|a| Atom { location: a.location * factor, mass: a.mass })
        .collect();
    let kind = match &d.kind {
        TailKind::Atomless => TailKind::Atomless,
        k => TailKind::Scaled { inner: Box::new(k.clone()), factor },
    };
    TailFunction::from_parts(kind, atoms, d.support_floor() * factor)
}

/// Residual of the convolution identity
/// `tail_max(M)(t) = \int tail_max(N)(t/x) d mu(x)` over a grid.
#[derive(Debug, Clone, Copy)]
pub struct ConvolutionReport<T> {
    pub sup_residual: T,
    /// Grid point attaining the supremum.
    pub at: T,
}

/// Measures how well `mu` transports the max-generator of `N` onto the
/// max-generator of `M` (report-only; never fails on a large residual).
pub fn check_mult_convolution<T: Real>(
    m: &OrliczFunction<T>,
    n: &OrliczFunction<T>,
    mu: &TailFunction<T>,
    grid: &[T],
) -> Result<ConvolutionReport<T>> {
    let target = tail_from_orlicz_max(m)?;
    let source = tail_from_orlicz_max(n)?;
    let product = product_tail(mu, &source, grid)?;
    let mut report = ConvolutionReport { sup_residual: T::zero(), at: grid[0] };
    for &t in grid {
        let r = (target.tail(t) - product.tail(t)).abs();
        if r > report.sup_residual {
            report = ConvolutionReport { sup_residual: r, at: t };
        }
    }
    Ok(report)
}

/// The Orlicz function induced by scaling the max-generator of `N` with an
/// independent multiplier `mu` — the composite of [`product_tail`] and
/// [`orlicz_from_distribution_max`].
pub fn induced_orlicz<T: Real>(
    mu: &TailFunction<T>,
    n: &OrliczFunction<T>,
) -> Result<OrliczFunction<T>> {
    let source = tail_from_orlicz_max(n)?;
    let floor = mu.support_floor() * source.support_floor();
    let far = mu.decay_point()? * source.decay_point()?;
    let grid = log_grid(floor, far, defaults::GRID_POINTS);
    let product = product_tail(mu, &source, &grid)?;
    orlicz_from_distribution_max(&product)
}

// =============================================================================
// Tests
// =============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::approx_smooth_kink;
    use proptest::prelude::*;

    fn sup_gap(a: &OrliczFunction<f64>, b: &OrliczFunction<f64>, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|&t| (a.m0(t) - b.m0(t)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn max_law_of_the_quadratic_function_is_inverse_square() {
        let m = OrliczFunction::<f64>::power(2.0).unwrap();
        let d = tail_from_orlicz_max(&m).unwrap();
        for &t in &log_grid(0.01f64, 1e4, 100) {
            let want = 1.0f64.min(t.powi(-2));
            assert!((d.tail(t) - want).abs() <= 1e-10, "tail({t}) = {}", d.tail(t));
        }
        assert!((d.density(2.0) - 2.0 * 2.0f64.powi(-3)).abs() <= 1e-12);
        assert_eq!(d.density(0.5), 0.0);
        assert!(d.atoms().is_empty());
        assert!((d.mean().unwrap() - 2.0).abs() <= 1e-7);
    }

    #[test]
    fn max_law_requires_normalization() {
        let m = OrliczFunction::<f64>::power(1.5).unwrap();
        assert!(matches!(
            tail_from_orlicz_max(&m),
            Err(OrliczError::NotNormalized { .. })
        ));
    }

    #[test]
    fn max_law_requires_vanishing_slope_at_zero() {
        let m = OrliczFunction::<f64>::power_log(1.0, 1.0).unwrap().normalize().unwrap();
        assert!(matches!(
            tail_from_orlicz_max(&m),
            Err(OrliczError::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn pareto_tails_reconstruct_power_functions() {
        for p in [1.5f64, 2.0, 3.0] {
            let d = TailFunction::log_gamma(p).unwrap();
            let m = orlicz_from_distribution_max(&d).unwrap();
            assert!((m.kink() - 1.0).abs() <= 1e-12);
            assert!((m.tail_slope() - p / (p - 1.0)).abs() <= 1e-8, "p = {p}");
            for &s in &log_grid(1e-5f64, 1.0, 200) {
                let want = s.powf(p) / (p - 1.0);
                let got = m.m0(s);
                assert!(
                    (got - want).abs() <= 1e-6 * want.max(1e-30),
                    "p = {p}, s = {s}: {got} vs {want}"
                );
            }
            assert!(m.is_normalized(1e-7));
        }
    }

    #[test]
    fn point_mass_reconstructs_the_hinge() {
        let d = TailFunction::<f64>::point_mass(2.0).unwrap();
        let m = orlicz_from_distribution_max(&d).unwrap();
        for s in [0.1, 0.4999, 0.5, 0.6, 1.0, 5.0] {
            let want = (2.0 * s - 1.0f64).max(0.0);
            assert!((m.m0(s) - want).abs() <= 1e-12, "s = {s}");
        }
        assert!(m.is_normalized(1e-12));
    }

    #[test]
    fn max_roundtrip_is_faithful() {
        let m = OrliczFunction::<f64>::power(1.5).unwrap().normalize().unwrap();
        let back = orlicz_from_distribution_max(&tail_from_orlicz_max(&m).unwrap()).unwrap();
        let gap = sup_gap(&m, &back, &m.default_grid(512));
        assert!(gap <= 1e-6, "roundtrip gap {gap}");
        assert!(back.is_normalized(1e-6));
    }

    #[test]
    fn lp_law_of_sqrt_cube_carries_the_kink_atom() {
        let m = OrliczFunction::<f64>::power(1.5).unwrap().normalize().unwrap();
        let d = tail_from_orlicz_p(&m, 2.0).unwrap();
        let floor = 2.0f64.powf(-2.0 / 3.0);
        assert_eq!(d.atoms().len(), 1);
        assert_eq!(d.atoms()[0].location, m.kink().recip());
        assert!((d.atoms()[0].location - floor).abs() <= 1e-9);
        assert!((d.atoms()[0].mass - 0.75).abs() <= 1e-10);
        // The tail jumps by the atom mass across the floor.
        let above = d.tail(floor * (1.0 + 1e-9));
        assert!((1.0 - above - 0.75).abs() <= 1e-6, "jump {}", 1.0 - above);
    }

    #[test]
    fn lp_law_of_the_quadratic_is_a_point_mass() {
        let m = OrliczFunction::<f64>::power(2.0).unwrap();
        let d = tail_from_orlicz_p(&m, 2.0).unwrap();
        assert_eq!(d.atoms().len(), 1);
        assert!((d.atoms()[0].location - 1.0).abs() <= 1e-12);
        assert!((d.atoms()[0].mass - 1.0).abs() <= 1e-10);
        assert!(d.continuous_value(1.0) <= 1e-10);
    }

    #[test]
    fn lp_law_rejects_cubic_growth_at_p_two_but_not_p_four() {
        let m = OrliczFunction::<f64>::power(3.0).unwrap().normalize().unwrap();
        assert!(matches!(
            tail_from_orlicz_p(&m, 2.0),
            Err(OrliczError::NegativeDensity { .. })
        ));
        let d = tail_from_orlicz_p(&m, 4.0).unwrap();
        let mass = d.total_mass().unwrap();
        assert!((mass - 1.0).abs() <= 1e-6, "mass {mass}");
    }

    #[test]
    fn lp_roundtrip_is_faithful_with_the_atom() {
        let m = OrliczFunction::<f64>::power(1.5).unwrap().normalize().unwrap();
        let d = tail_from_orlicz_p(&m, 2.0).unwrap();
        let back = orlicz_from_distribution_p(&d, 2.0).unwrap();
        let gap = sup_gap(&m, &back, &m.default_grid(512));
        assert!(gap <= 1e-4, "roundtrip gap {gap}");
        assert!(back.is_normalized(1e-5));
    }

    #[test]
    fn lp_roundtrip_survives_fractional_exponents() {
        // Shallow growth against a fractional p leaves heavy mass in the far
        // tail, driving the truncated-moment quadrature to its roundoff floor.
        let m = OrliczFunction::<f64>::power(1.3).unwrap().normalize().unwrap();
        let d = tail_from_orlicz_p(&m, 2.5).unwrap();
        let back = orlicz_from_distribution_p(&d, 2.5).unwrap();
        let gap = sup_gap(&m, &back, &m.default_grid(512));
        assert!(gap <= 1e-4, "roundtrip gap {gap}");
    }

    #[test]
    fn lp_roundtrip_is_faithful_after_smoothing() {
        let m = OrliczFunction::<f64>::power(1.5).unwrap().normalize().unwrap();
        let (n, _) = approx_smooth_kink(&m, 1.1).unwrap();
        let n = n.scaled(n.normalization_integral().recip()).unwrap();
        let d = tail_from_orlicz_p(&n, 2.0).unwrap();
        assert!(d.atoms().is_empty(), "smoothing should remove the kink atom");
        let back = orlicz_from_distribution_p(&d, 2.0).unwrap();
        let gap = sup_gap(&n, &back, &n.default_grid(512));
        assert!(gap <= 1e-4, "roundtrip gap {gap}");
    }

    #[test]
    fn second_moment_specialization_matches_the_general_construction() {
        let m = OrliczFunction::<f64>::power(1.5).unwrap().normalize().unwrap();
        let a = density_from_orlicz_2(&m).unwrap();
        let b = density_from_orlicz_p(&m, 2.0).unwrap();
        for &x in &log_grid(0.1f64, 100.0, 64) {
            assert_eq!(a.pdf(x), b.pdf(x), "x = {x}");
        }
        assert_eq!(a.atoms().len(), b.atoms().len());
    }

    #[test]
    fn product_with_a_point_mass_rescales_exactly() {
        let grid = log_grid(1.0f64, 1e4, 32);
        let lg = TailFunction::<f64>::log_gamma(2.0).unwrap();
        let pm = TailFunction::<f64>::point_mass(2.0).unwrap();
        for d in [
            product_tail(&pm, &lg, &grid).unwrap(),
            product_tail(&lg, &pm, &grid).unwrap(),
        ] {
            for &z in &log_grid(0.5f64, 1e5, 200) {
                let want = 1.0f64.min((z / 2.0).powi(-2));
                assert!((d.tail(z) - want).abs() <= 1e-15, "z = {z}");
            }
        }
    }

    #[test]
    fn product_of_two_point_masses_is_a_point_mass() {
        let grid = [1.0, 2.0];
        let a = TailFunction::<f64>::point_mass(2.0).unwrap();
        let b = TailFunction::<f64>::point_mass(3.0).unwrap();
        let d = product_tail(&a, &b, &grid).unwrap();
        assert_eq!(d.atoms().len(), 1);
        assert!((d.atoms()[0].location - 6.0).abs() <= 1e-15);
        assert_eq!(d.tail(5.9), 1.0);
        assert_eq!(d.tail(6.1), 0.0);
    }

    #[test]
    fn product_of_pareto_factors_matches_the_closed_form() {
        let lg = TailFunction::<f64>::log_gamma(2.0).unwrap();
        let grid = log_grid(1.0f64, 1e5, 512);
        let d = product_tail(&lg, &lg, &grid).unwrap();
        for &z in grid.iter().step_by(7) {
            let want = if z <= 1.0 { 1.0 } else { (2.0 * z.ln() + 1.0) / (z * z) };
            assert!(
                (d.tail(z) - want).abs() <= 1e-8,
                "z = {z}: {} vs {want}",
                d.tail(z)
            );
        }
        d.validate().unwrap();
    }

    #[test]
    fn transport_through_the_identity_multiplier_is_exact() {
        let m = OrliczFunction::<f64>::power(1.5).unwrap().normalize().unwrap();
        let grid = log_grid(m.kink().recip(), 1e4, 128);
        let one = TailFunction::<f64>::point_mass(1.0).unwrap();
        let report = check_mult_convolution(&m, &m, &one, &grid).unwrap();
        assert!(report.sup_residual <= 1e-14, "residual {}", report.sup_residual);
    }

    #[test]
    fn transport_detects_a_wrong_multiplier() {
        let m = OrliczFunction::<f64>::power(1.5).unwrap().normalize().unwrap();
        let grid = log_grid(m.kink().recip(), 1e4, 128);
        let wrong = TailFunction::<f64>::point_mass(3.0).unwrap();
        let report = check_mult_convolution(&m, &m, &wrong, &grid).unwrap();
        assert!(report.sup_residual > 0.1, "residual {}", report.sup_residual);
    }

    #[test]
    fn induced_function_by_identity_multiplier_reproduces_the_source() {
        let n = OrliczFunction::<f64>::power(1.5).unwrap().normalize().unwrap();
        let one = TailFunction::<f64>::point_mass(1.0).unwrap();
        let m = induced_orlicz(&one, &n).unwrap();
        let gap = sup_gap(&n, &m, &n.default_grid(512));
        assert!(gap <= 1e-6, "gap {gap}");
    }

    #[test]
    fn coordinate_families_come_from_their_laws() {
        let ds = [
            TailFunction::<f64>::log_gamma(2.0).unwrap(),
            TailFunction::<f64>::log_gamma(3.0).unwrap(),
        ];
        let family = musielak_from_distributions(&ds).unwrap();
        assert_eq!(family.len(), 2);
        let solo = orlicz_from_distribution_max(&ds[1]).unwrap();
        for s in [0.1, 0.5, 1.0] {
            assert_eq!(family.functions()[1].m0(s), solo.m0(s));
        }
    }

    #[test]
    fn interior_atoms_are_rejected() {
        let d = TailFunction::<f64>::from_parts(
            TailKind::LogGamma { p: 2.0 },
            vec![Atom { location: 2.0, mass: 0.1 }],
            1.0,
        )
        .unwrap();
        assert!(matches!(
            orlicz_from_distribution_max(&d),
            Err(OrliczError::InvalidParameter(_))
        ));
        assert!(matches!(
            orlicz_from_distribution_p(&d, 2.0),
            Err(OrliczError::InvalidParameter(_))
        ));
    }

    #[test]
    fn density_wrappers_clamp_noise_and_keep_atoms() {
        let m = OrliczFunction::<f64>::power(1.5).unwrap().normalize().unwrap();
        let d = density_from_orlicz_p(&m, 2.0).unwrap();
        assert_eq!(d.atoms().len(), 1);
        for &x in &log_grid(0.1f64, 100.0, 64) {
            assert!(d.pdf(x) >= 0.0);
        }
        let dm = density_from_orlicz_max(&m).unwrap();
        assert!(dm.atoms().is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn generated_max_laws_validate_and_roundtrip(q in 1.05f64..3.0) {
            let m = OrliczFunction::<f64>::power(q).unwrap().normalize().unwrap();
            let d = tail_from_orlicz_max(&m).unwrap();
            let back = orlicz_from_distribution_max(&d).unwrap();
            let grid = m.default_grid(256);
            let scale = m.m0(m.kink()).max(1.0);
            let gap = sup_gap(&m, &back, &grid);
            prop_assert!(gap <= 1e-5 * scale, "q = {q}: gap {gap}");
        }

        #[test]
        fn generated_lp_laws_validate_and_roundtrip(q in 1.05f64..=2.0) {
            let m = OrliczFunction::<f64>::power(q).unwrap().normalize().unwrap();
            let d = tail_from_orlicz_p(&m, 2.0).unwrap();
            let back = orlicz_from_distribution_p(&d, 2.0).unwrap();
            let grid = m.default_grid(256);
            let scale = m.m0(m.kink()).max(1.0);
            let gap = sup_gap(&m, &back, &grid);
            prop_assert!(gap <= 1e-4 * scale, "q = {q}: gap {gap}");
        }
    }
}
