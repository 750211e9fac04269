//! Closed families of even test functions.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alpha::AlphaParams;
use crate::error::{Error, Result};
use crate::grid::{QuadGrid, SampledFunction, SpectralSamples};

/// Anything that can be evaluated pointwise on the positive orthant.
pub trait Evaluable: Sync {
    fn eval(&self, x: &[f64]) -> f64;

    /// Per-axis upper bound of the region where `eval` is meaningful;
    /// `None` means everywhere.
    fn reach(&self) -> Option<Vec<f64>> {
        None
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Evaluable for F {
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

fn one() -> f64 {
    1.0
}

fn default_exponent() -> f64 {
    8.0
}

/// Serialized as `{"kind": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `exp(-a ||x||^2 / 2)`.
    Gaussian {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `prod_i (1 - (x_i/r)^2)^q` on `prod (0, r)`, zero outside.
    Bump {
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "default_exponent")]
        exponent: f64,
    },
    /// `sum_j c_j ||x||^{2j} exp(-a ||x||^2 / 2)`.
    PolyGaussian {
        coeffs: Vec<f64>,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `prod_i exp(1 - 1/(1 - (x_i/r)^2))` on `prod (0, r)`, zero outside.
    SmoothBump {
        #[serde(default = "one")]
        radius: f64,
    },
}

impl FunctionSpec {
    pub fn gaussian(scale: f64) -> Self {
        FunctionSpec::Gaussian { scale }
    }

    pub fn bump(radius: f64, exponent: f64) -> Self {
        FunctionSpec::Bump { radius, exponent }
    }

    pub fn poly_gaussian(coeffs: Vec<f64>, scale: f64) -> Self {
        FunctionSpec::PolyGaussian { coeffs, scale }
    }

    pub fn smooth_bump(radius: f64) -> Self {
        FunctionSpec::SmoothBump { radius }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FunctionSpec::Gaussian { .. } => "gaussian",
            FunctionSpec::Bump { .. } => "bump",
            FunctionSpec::PolyGaussian { .. } => "poly_gaussian",
            FunctionSpec::SmoothBump { .. } => "smooth_bump",
        }
    }

    /// Parameter sanity; the message names the offending field.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidParameter(format!(
                "function.params.{what} = {v} is out of range"
            )))
        };
        match self {
            FunctionSpec::Gaussian { scale } | FunctionSpec::PolyGaussian { scale, .. } => {
                if !(scale.is_finite() && *scale >= 0.0) {
                    return bad("scale", *scale);
                }
                if let FunctionSpec::PolyGaussian { coeffs, .. } = self {
                    if coeffs.is_empty() {
                        return Err(Error::InvalidParameter("function.params.coeffs is empty".into()));
                    }
                    if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
                        return bad("coeffs", *c);
                    }
                }
            }
            FunctionSpec::Bump { radius, exponent } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad("radius", *radius);
                }
                if !(exponent.is_finite() && *exponent >= 4.0) {
                    return bad("exponent", *exponent);
                }
            }
            FunctionSpec::SmoothBump { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad("radius", *radius);
                }
            }
        }
        Ok(())
    }

    /// Whether the function lies in `L^1_a`; only the scale-zero Gaussians
    /// (constants) fail.
    pub fn is_integrable(&self) -> bool {
        match self {
            FunctionSpec::Gaussian { scale } | FunctionSpec::PolyGaussian { scale, .. } => *scale > 0.0,
            FunctionSpec::Bump { .. } | FunctionSpec::SmoothBump { .. } => true,
        }
    }

    pub(crate) fn require_integrable(&self) -> Result<()> {
        if self.is_integrable() {
            Ok(())
        } else {
            Err(Error::NotIntegrable(format!(
                "{} with zero scale is constant",
                self.name()
            )))
        }
    }

    /// Support radius per axis for the compactly supported kinds.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            FunctionSpec::Bump { radius, .. } | FunctionSpec::SmoothBump { radius } => Some(*radius),
            _ => None,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            FunctionSpec::Gaussian { scale } => (-0.5 * scale * norm_sq(x)).exp(),
            FunctionSpec::PolyGaussian { coeffs, scale } => {
                let r2 = norm_sq(x);
                horner(coeffs, r2) * (-0.5 * scale * r2).exp()
            }
            FunctionSpec::Bump { radius, exponent } => x
                .iter()
                .map(|&xi| {
                    let u = xi / radius;
                    if u.abs() >= 1.0 {
                        0.0
                    } else {
                        (1.0 - u * u).powf(*exponent)
                    }
                })
                .product(),
            FunctionSpec::SmoothBump { radius } => x
                .iter()
                .map(|&xi| {
                    let u = xi / radius;
                    if u.abs() >= 1.0 {
                        0.0
                    } else {
                        (1.0 - 1.0 / (1.0 - u * u)).exp()
                    }
                })
                .product(),
        }
    }

    pub fn sample(&self, grid: &Arc<QuadGrid>) -> Result<SampledFunction> {
        SampledFunction::from_fn(grid.clone(), |x| self.evaluate(x))
    }

    /// `int f d mu_a` over the whole orthant, where a closed form exists.
    pub fn exact_integral(&self, alpha: &AlphaParams) -> Option<f64> {
        match self {
            FunctionSpec::Gaussian { scale } if *scale > 0.0 => {
                Some(self.exact_transform(alpha)?.eval(&vec![0.0; alpha.dim()]))
            }
            FunctionSpec::PolyGaussian { scale, .. } if *scale > 0.0 => {
                Some(self.exact_transform(alpha)?.eval(&vec![0.0; alpha.dim()]))
            }
            _ => None,
        }
    }

    /// Closed-form `F_a f` for the Gaussian kinds; absent for the bumps.
    pub fn exact_transform(&self, alpha: &AlphaParams) -> Option<ExactTransform> {
        match self {
            FunctionSpec::Gaussian { scale } if *scale > 0.0 => Some(ExactTransform {
                alpha: alpha.clone(),
                coeffs: vec![1.0],
                scale: *scale,
            }),
            FunctionSpec::PolyGaussian { coeffs, scale } if *scale > 0.0 => Some(ExactTransform {
                alpha: alpha.clone(),
                coeffs: coeffs.clone(),
                scale: *scale,
            }),
            _ => None,
        }
    }
}

impl Evaluable for FunctionSpec {
    fn eval(&self, x: &[f64]) -> f64 {
        self.evaluate(x)
    }
}

/// `F_a` of `sum_j c_j ||x||^{2j} exp(-a ||x||^2/2)`.
///
/// Built from `F_a[exp(-a r^2/2)](l) = c_a^{-1} a^{-nu} exp(-b/a)` with
/// `nu = |a| + n`, `b = ||l||^2/2`, and `r^2 exp(-a r^2/2) = -2 d/da exp(-a r^2/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactTransform {
    alpha: AlphaParams,
    coeffs: Vec<f64>,
    scale: f64,
}

impl ExactTransform {
    pub fn alpha(&self) -> &AlphaParams {
        &self.alpha
    }

    pub fn evaluate(&self, lambda: &[f64]) -> f64 {
        let nu = self.alpha.abs() + self.alpha.dim() as f64;
        let b = 0.5 * norm_sq(lambda);
        let a = self.scale;
        // term m of `cur` multiplies a^{-(nu+m)}
        let mut cur = vec![1.0];
        let mut total = 0.0;
        for (j, &c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                let mut next = vec![0.0; cur.len() + 2];
                for (m, &d) in cur.iter().enumerate() {
                    next[m + 1] += 2.0 * (nu + m as f64) * d;
                    next[m + 2] -= 2.0 * b * d;
                }
                cur = next;
            }
            if c != 0.0 {
                let s: f64 = cur.iter().enumerate().map(|(m, &d)| d * a.powf(-(nu + m as f64))).sum();
                total += c * s;
            }
        }
        total * (-b / a).exp() / self.alpha.c_alpha()
    }

    pub fn sample(&self, grid: &Arc<QuadGrid>) -> Result<SpectralSamples> {
        SpectralSamples::from_fn(grid.clone(), |l| self.evaluate(l))
    }
}

impl Evaluable for ExactTransform {
    fn eval(&self, x: &[f64]) -> f64 {
        self.evaluate(x)
    }
}

pub(crate) fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}
