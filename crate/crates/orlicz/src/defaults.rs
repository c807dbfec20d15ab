//! Central numeric tolerances and grid sizes.
//!
//! Every magic number that a test pins against lives here, with the reason
//! it has the value it has. Callers that need different behaviour pass their
//! own values through the corresponding function parameters; these are only
//! the defaults.

/// Relative tolerance for bisection root finding (Luxemburg norms, kink
/// normalization, quantile refinement). Roughly 50 halvings of the initial
/// bracket, comfortably inside `f64` resolution for arguments of any
/// magnitude encountered here.
pub const BISECTION_REL_TOL: f64 = 1e-10;

/// Absolute tolerance handed to adaptive Gauss-Kronrod quadrature. Tail
/// masses, means, and truncated moments are all order one, so an absolute
/// target is appropriate.
pub const QUADRATURE_ABS_TOL: f64 = 1e-9;

/// Number of points in validation grids (convexity scans, equivalence
/// checks, residual scans).
pub const GRID_POINTS: usize = 512;

/// Number of nodes used when a function or tail is tabulated.
pub const TABLE_POINTS: usize = 2048;

/// Validation and tabulation grids are logarithmic and span this many
/// decades below the kink: `[1e-6 * T, T]`.
pub const GRID_SPAN: f64 = 1e-6;

/// Probe abscissa for the vanishing-slope check at the origin.
pub const ORIGIN_PROBE: f64 = 1e-8;

/// Absolute tolerance under which `M'` near the origin counts as zero.
pub const ORIGIN_SLOPE_TOL: f64 = 1e-6;

/// Tolerance on `|normalization integral - 1|` for operations that require
/// a normalized function.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Tolerance on `|total probability mass - 1|` for tails and densities.
pub const MASS_TOL: f64 = 1e-6;

/// Densities may dip this far below zero (quadrature and interpolation
/// noise) and are clamped; anything lower is a hard error.
pub const NEGATIVE_DENSITY_TOL: f64 = 1e-9;

/// Number of probability nodes in a sampler's quantile table.
pub const QUANTILE_POINTS: usize = 4096;

/// Smallest tabulated tail probability; draws below it fall back to direct
/// root finding on the tail itself.
pub const QUANTILE_FLOOR: f64 = 1e-9;

/// Default number of Monte Carlo replications per vector.
pub const DEFAULT_N_MC: usize = 200_000;

/// Smallest accepted number of Monte Carlo replications.
pub const MIN_N_MC: usize = 100;

/// Largest weight-vector length for exact Rademacher enumeration; longer
/// vectors switch to a seeded Monte Carlo average.
pub const KHINTCHINE_ENUM_MAX: usize = 20;
