//! Orlicz-function toolkit: norms, distribution generation, smoothing, and
//! Monte Carlo verification experiments.
//!
//! The crate is organized around three layers:
//!
//! * **Functions and norms** — [`OrliczFunction`] (convex, vanishing at the
//!   origin, linear beyond a kink point), the Luxemburg-style [`orlicz_norm`]
//!   and its per-coordinate [`musielak_norm`] variant, and
//!   [`approx_smooth_kink`] for replacing the kink with a curvature ramp.
//! * **Generation** — maps between functions and the heavy-tailed laws whose
//!   expected maxima or ℓ_p averages reproduce the norm:
//!   [`tail_from_orlicz_max`], [`tail_from_orlicz_p`], their inverses
//!   [`orlicz_from_distribution_max`] / [`orlicz_from_distribution_p`], and
//!   multiplicative-convolution tools ([`product_tail`], [`induced_orlicz`],
//!   [`check_mult_convolution`]).
//! * **Sampling and experiments** — a reproducible inverse-CDF [`Sampler`]
//!   over stream-indexed RNGs, and Monte Carlo experiments
//!   ([`max_equivalence_experiment`], [`p_equivalence_experiment`],
//!   [`embedding_experiment`]) that report norm-to-expectation ratios over
//!   weight-vector suites.
//!
//! Math types are generic over the scalar via [`Real`]; the sampling and
//! experiment layer is double-precision only.
//!
//! ```
//! use orlicz::{orlicz_norm, parse_function, WeightVector};
//!
//! let m = parse_function("power:q=2")?;
//! let x = WeightVector::new(vec![3.0, 4.0])?;
//! let value = orlicz_norm(&m, &x, 1e-12)?;
//! assert!((value - 5.0).abs() < 1e-9);
//! # Ok::<(), orlicz::OrliczError>(())
//! ```

mod checks;
pub mod defaults;
mod error;
mod experiment;
mod function;
mod generate;
mod grammar;
mod interp;
mod norm;
mod quad;
mod sampler;
mod scalar;
mod smooth;
mod tail;

pub use checks::{check_equivalent, check_second_derivative_decreasing, check_two_concave};
pub use error::{OrliczError, Result};
pub use experiment::{
    embedding_experiment, expected_max, expected_norm_p, khintchine_check,
    max_equivalence_experiment, p_equivalence_experiment, pareto_generates_lp, EquivalenceReport,
    MCEstimate, ReportEntry, Suite,
};
pub use function::OrliczFunction;
pub use grammar::parse_function;
pub use generate::{
    check_mult_convolution, density_from_orlicz_2, density_from_orlicz_max, density_from_orlicz_p,
    induced_orlicz, musielak_from_distributions, orlicz_from_distribution_max,
    orlicz_from_distribution_p, product_tail, tail_from_orlicz_max, tail_from_orlicz_p,
    ConvolutionReport, DensityModel,
};
pub use norm::{musielak_norm, orlicz_norm, MusielakFamily, WeightVector};
pub use sampler::{empirical_tail_deviation, QuantileTable, Sampler};
pub use scalar::{log_grid, Real};
pub use smooth::approx_smooth_kink;
pub use tail::{Atom, TailFunction};

/// Double-precision Orlicz function, the workhorse type.
pub type OrliczFunction64 = OrliczFunction<f64>;
/// Single-precision variant.
pub type OrliczFunction32 = OrliczFunction<f32>;
/// Double-precision tail distribution, as consumed by the sampler.
pub type TailFunction64 = TailFunction<f64>;
/// Single-precision variant.
pub type TailFunction32 = TailFunction<f32>;
/// Double-precision weight vector, as consumed by the experiments.
pub type WeightVector64 = WeightVector<f64>;
