//! Harmonic analysis for the multi-axis Bessel operator
//! `D_a = sum_i d^2/dx_i^2 + ((2 a_i + 1)/x_i) d/dx_i` on the positive orthant.

pub mod alpha;
pub mod error;
pub mod grid;
pub mod pde;
pub mod quadrature;
pub mod sobolev;
pub mod special;
pub mod specs;
pub mod summation;
pub mod transform;
pub mod translation;

pub use alpha::AlphaParams;
pub use error::{Error, Result};
pub use grid::{build_grid, Field, QuadGrid, SampledFunction, Snapshot, SpectralSamples};
pub use pde::{solve_helmholtz, solve_polynomial, EvenPolynomial, RegularityReport};
pub use sobolev::{sobolev_norm, SobolevIndex, SpectralDistribution};
pub use special::{bessel_kernel, bessel_ode_residual, normalized_bessel, BesselOrder};
pub use specs::{Evaluable, ExactTransform, FunctionSpec};
pub use transform::TransformPlan;
pub use translation::{convolve, translate, translation_kernel, ThetaRule};
