//! Generalized translation
//! `T_y f(x) = c' int_{[0,pi]^n} f(X(theta)) prod sin^{2a_i} theta_i d theta`,
//! `X_i = sqrt(x_i^2 + y_i^2 - 2 x_i y_i cos theta_i)`, its explicit kernel,
//! and the convolution built on it.
//!
//! With `t = cos theta` the angular weight is the Jacobi weight
//! `(1 - t^2)^{a - 1/2}`, so the primary path is a Gauss–Jacobi sum.

use std::sync::Arc;

use log::warn;
use rayon::prelude::*;

use crate::alpha::AlphaParams;
use crate::error::{Error, Result};
use crate::grid::{QuadGrid, SampledFunction, SpectralSamples};
use crate::quadrature::{gauss_jacobi, GaussRule};
use crate::specs::{Evaluable, FunctionSpec};
use crate::summation::{pairwise_sum, pairwise_sum_by};
use crate::transform::{TransformPlan, TRUNCATION_TOL};

pub const DEFAULT_THETA_NODES: usize = 64;

/// Per-axis Gauss–Jacobi rules in `t = cos theta` with exponents `(a_i - 1/2, a_i - 1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRule {
    alpha: AlphaParams,
    axes: Vec<GaussRule>,
    /// `c'_i * w`: sums to one on each axis.
    normalized: Vec<Vec<f64>>,
}

impl ThetaRule {
    pub fn new(alpha: &AlphaParams, nodes: usize) -> Result<Self> {
        let mut axes = Vec::with_capacity(alpha.dim());
        let mut normalized = Vec::with_capacity(alpha.dim());
        for (i, &a) in alpha.values().iter().enumerate() {
            let rule = gauss_jacobi(nodes, a - 0.5, a - 0.5)?;
            let c = alpha.c_prime_axis(i);
            normalized.push(rule.weights.iter().map(|w| c * w).collect());
            axes.push(rule);
        }
        Ok(Self {
            alpha: alpha.clone(),
            axes,
            normalized,
        })
    }

    pub fn with_default_nodes(alpha: &AlphaParams) -> Result<Self> {
        Self::new(alpha, DEFAULT_THETA_NODES)
    }

    pub fn alpha(&self) -> &AlphaParams {
        &self.alpha
    }

    pub fn nodes(&self) -> usize {
        self.axes[0].len()
    }

    pub fn axis(&self, i: usize) -> &GaussRule {
        &self.axes[i]
    }

    pub fn normalized_weights(&self, i: usize) -> &[f64] {
        &self.normalized[i]
    }
}

/// Law-of-cosines radius, written to avoid cancellation when `x ~ y`, `t ~ 1`.
fn law_of_cosines(x: f64, y: f64, t: f64) -> f64 {
    let d = x - y;
    (d * d + 2.0 * x * y * (1.0 - t)).max(0.0).sqrt()
}

/// `T_y f(x)` by the angular quadrature.
pub fn translate(f: &impl Evaluable, y: &[f64], x: &[f64], rule: &ThetaRule) -> Result<f64> {
    let alpha = rule.alpha();
    alpha.check_dim("y", y.len())?;
    alpha.check_dim("x", x.len())?;
    for (i, (&xi, &yi)) in x.iter().zip(y).enumerate() {
        if !(xi >= 0.0 && yi >= 0.0 && xi.is_finite() && yi.is_finite()) {
            return Err(Error::Domain {
                what: "translate",
                value: if xi >= 0.0 { yi } else { xi },
            });
        }
        if let Some(reach) = f.reach() {
            if xi + yi > reach[i] {
                return Err(Error::NotEvaluable {
                    lo: (xi - yi).abs(),
                    hi: xi + yi,
                });
            }
        }
    }
    let n = alpha.dim();
    // Axes with a zero coordinate do not move: X_i is then the other coordinate.
    let mut fixed = vec![0.0; n];
    let mut active: Vec<(usize, Vec<f64>)> = Vec::new();
    for i in 0..n {
        if x[i] == 0.0 || y[i] == 0.0 {
            fixed[i] = x[i] + y[i];
        } else {
            let radii = rule
                .axis(i)
                .nodes
                .iter()
                .map(|&t| law_of_cosines(x[i], y[i], t))
                .collect();
            active.push((i, radii));
        }
    }
    if active.is_empty() {
        return Ok(f.eval(&fixed));
    }
    let sizes: Vec<usize> = active.iter().map(|(_, r)| r.len()).collect();
    let total: usize = sizes.iter().product();
    let mut p = fixed.clone();
    let mut cell = |mut k: usize| {
        let mut w = 1.0;
        for (slot, (axis, radii)) in active.iter().enumerate().rev() {
            let m = k % sizes[slot];
            k /= sizes[slot];
            p[*axis] = radii[m];
            w *= rule.normalized_weights(*axis)[m];
        }
        w * f.eval(&p)
    };
    // Evaluate in flat order, then reduce pairwise.
    let terms: Vec<f64> = (0..total).map(&mut cell).collect();
    Ok(pairwise_sum(&terms))
}

/// `y -> T_x f(y)` sampled on `grid`.
pub fn translated(f: &impl Evaluable, x: &[f64], grid: &Arc<QuadGrid>, rule: &ThetaRule) -> Result<SampledFunction> {
    let vals: Result<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|k| translate(f, x, &grid.point(k), rule))
        .collect();
    SampledFunction::new(grid.clone(), vals?)
}

/// `|T_y j(lambda .)(x) - j(lambda x) j(lambda y)|` with `j` the product kernel.
pub fn product_formula_defect(lambda: &[f64], x: &[f64], y: &[f64], rule: &ThetaRule) -> Result<f64> {
    let orders = rule.alpha().values().to_vec();
    rule.alpha().check_dim("lambda", lambda.len())?;
    let kernel = |p: &[f64]| {
        orders
            .iter()
            .zip(lambda)
            .zip(p)
            .map(|((&a, &l), &v)| crate::special::jnorm(a, l * v))
            .product::<f64>()
    };
    let got = translate(&kernel, y, x, rule)?;
    Ok((got - kernel(x) * kernel(y)).abs())
}

/// The closed-form kernel `w_a(x, y, z)` of the translation:
/// `prod_i c'_i 2^{1 - 2a_i} D_i^{a_i - 1/2} / (x_i y_i z_i)^{2a_i}` with
/// `D_i = [z_i^2 - (x_i - y_i)^2][(x_i + y_i)^2 - z_i^2]`, zero off the support.
pub fn translation_kernel(alpha: &AlphaParams, x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
    alpha.check_dim("x", x.len())?;
    alpha.check_dim("y", y.len())?;
    alpha.check_dim("z", z.len())?;
    let mut prod = 1.0;
    for i in 0..alpha.dim() {
        let (xi, yi, zi) = (x[i], y[i], z[i]);
        if !(xi > 0.0 && yi > 0.0 && zi > 0.0) {
            return Err(Error::Domain {
                what: "translation_kernel",
                value: xi.min(yi).min(zi),
            });
        }
        let lo = (xi - yi).abs();
        let hi = xi + yi;
        if zi < lo || zi > hi {
            return Ok(0.0);
        }
        let a = alpha.get(i);
        let beta = a - 0.5;
        let d = (zi * zi - lo * lo) * (hi * hi - zi * zi);
        if d <= 0.0 {
            if beta < 0.0 {
                return Err(Error::EndpointSingular { axis: i });
            }
            if beta > 0.0 {
                return Ok(0.0);
            }
        }
        let ln = (1.0 - 2.0 * a) * std::f64::consts::LN_2 + if beta == 0.0 { 0.0 } else { beta * d.ln() }
            - 2.0 * a * (xi * yi * zi).ln();
        prod *= alpha.c_prime_axis(i) * ln.exp();
    }
    Ok(prod)
}

/// Per-axis nodes `z` and weights for `int_{|x-y|}^{x+y} h(z) w_a(x,y,z) z^{2a+1} dz`,
/// with the kernel's endpoint behaviour absorbed by the substitution `u = z^2`
/// and the Jacobi rule of `rule`. Returns `(z_k, v_k)` with `v_k` multiplying
/// `w_a(x,y,z_k)` evaluated by the caller.
fn kernel_axis_rule(rule: &ThetaRule, i: usize, x: f64, y: f64) -> (Vec<f64>, Vec<f64>) {
    let a = rule.alpha().get(i);
    let beta = a - 0.5;
    let lo = (x - y) * (x - y);
    let hi = (x + y) * (x + y);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let jr = rule.axis(i);
    let mut zs = Vec::with_capacity(jr.len());
    let mut vs = Vec::with_capacity(jr.len());
    for (&s, &w) in jr.nodes.iter().zip(&jr.weights) {
        let u = mid + half * s;
        let z = u.sqrt();
        // du-integrand: w_a z^{2a+1} / (2z), du = half ds; the rule already
        // carries (1 - s^2)^b, and `D^b = half^{2b} (1 - s^2)^b` inside w_a.
        let jac = 0.5 * z.powf(2.0 * a) * half;
        let weight_out = (1.0 - s * s).powf(beta);
        zs.push(z);
        vs.push(w * jac / weight_out);
    }
    (zs, vs)
}

/// `| int w_a(x, y, z) d mu_a(z) - 1 |`.
pub fn kernel_mass_defect(alpha: &AlphaParams, x: &[f64], y: &[f64], rule: &ThetaRule) -> Result<f64> {
    if rule.alpha() != alpha {
        return Err(Error::AlphaMismatch("alpha", "rule"));
    }
    alpha.check_dim("x", x.len())?;
    alpha.check_dim("y", y.len())?;
    let mut mass = 1.0;
    for i in 0..alpha.dim() {
        let one = AlphaParams::new(vec![alpha.get(i)])?;
        let (zs, vs) = kernel_axis_rule(rule, i, x[i], y[i]);
        let terms = zs
            .iter()
            .zip(&vs)
            .map(|(&z, &v)| Ok(v * translation_kernel(&one, &[x[i]], &[y[i]], &[z])?))
            .collect::<Result<Vec<f64>>>()?;
        mass *= pairwise_sum(&terms);
    }
    Ok((mass - 1.0).abs())
}

/// `T_y f(x)` through the explicit kernel: `int f(z) w_a(x, y, z) d mu_a(z)`.
pub fn translate_via_kernel(f: &impl Evaluable, y: &[f64], x: &[f64], rule: &ThetaRule) -> Result<f64> {
    let alpha = rule.alpha();
    alpha.check_dim("y", y.len())?;
    alpha.check_dim("x", x.len())?;
    let n = alpha.dim();
    let mut axes = Vec::with_capacity(n);
    for i in 0..n {
        let one = AlphaParams::new(vec![alpha.get(i)])?;
        let (zs, vs) = kernel_axis_rule(rule, i, x[i], y[i]);
        let ws = zs
            .iter()
            .zip(&vs)
            .map(|(&z, &v)| Ok(v * translation_kernel(&one, &[x[i]], &[y[i]], &[z])?))
            .collect::<Result<Vec<f64>>>()?;
        axes.push((zs, ws));
    }
    let sizes: Vec<usize> = axes.iter().map(|(z, _)| z.len()).collect();
    let total: usize = sizes.iter().product();
    let mut p = vec![0.0; n];
    let terms: Vec<f64> = (0..total)
        .map(|mut k| {
            let mut w = 1.0;
            for i in (0..n).rev() {
                let m = k % sizes[i];
                k /= sizes[i];
                p[i] = axes[i].0[m];
                w *= axes[i].1[m];
            }
            w * f.eval(&p)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `(f * g)(x) = int f(y) T_x g(y) d mu_a(y)` at every node of `out_grid`.
pub fn convolve(
    f: &SampledFunction,
    g: &impl Evaluable,
    out_grid: &Arc<QuadGrid>,
    rule: &ThetaRule,
) -> Result<SampledFunction> {
    if f.alpha() != rule.alpha() || out_grid.alpha() != rule.alpha() {
        return Err(Error::AlphaMismatch("convolution inputs", "rule"));
    }
    let r = f.boundary_ratio();
    if r > TRUNCATION_TOL {
        warn!("convolution input is not negligible at the outer nodes (ratio {r:.3e})");
    }
    let in_grid = f.grid();
    let w = in_grid.measure_weights();
    let support: Vec<usize> = (0..in_grid.len()).filter(|&k| f.values()[k] != 0.0).collect();
    let ys: Vec<Vec<f64>> = support.iter().map(|&k| in_grid.point(k)).collect();
    let values = (0..out_grid.len())
        .into_par_iter()
        .map(|k| {
            let x = out_grid.point(k);
            let terms = support
                .iter()
                .zip(&ys)
                .map(|(&j, y)| Ok(w[j] * f.values()[j] * translate(g, &x, y, rule)?))
                .collect::<Result<Vec<f64>>>()?;
            Ok(pairwise_sum(&terms))
        })
        .collect::<Result<Vec<f64>>>()?;
    SampledFunction::new(out_grid.clone(), values)
}

/// `f * g = c_a^2 F(F f . F g)`, the spectral route used for `n >= 3`.
pub fn convolve_spectral(
    f: &SampledFunction,
    g: &SampledFunction,
    forward_plan: &TransformPlan,
    inverse_plan: &TransformPlan,
) -> Result<SampledFunction> {
    let ff = forward_plan.forward(f)?;
    let fg = forward_plan.forward(g)?;
    let prod = ff.map(|k, v| v * fg.values()[k])?;
    inverse_plan.inverse(&prod)
}

fn relative_l2(a: &SpectralSamples, b: &SpectralSamples) -> Result<f64> {
    let w = a.grid().measure_weights();
    let diff = pairwise_sum_by(0..w.len(), &|k| w[k] * (a.values()[k] - b.values()[k]).powi(2));
    let base = pairwise_sum_by(0..w.len(), &|k| w[k] * b.values()[k].powi(2));
    Ok(if base == 0.0 { diff.sqrt() } else { (diff / base).sqrt() })
}

/// `||F(f * g) - F f . F g||_2 / ||F f . F g||_2` with `f * g` by direct convolution.
pub fn convolution_theorem_defect(
    f: &FunctionSpec,
    g: &FunctionSpec,
    phys: &Arc<QuadGrid>,
    freq: &Arc<QuadGrid>,
    rule: &ThetaRule,
) -> Result<f64> {
    f.require_integrable()?;
    g.require_integrable()?;
    let plan = TransformPlan::new(phys, freq)?;
    let fs = f.sample(phys)?;
    let gs = g.sample(phys)?;
    let conv = convolve(&fs, g, phys, rule)?;
    let lhs = plan.forward(&conv)?;
    let ff = plan.forward(&fs)?;
    let fg = plan.forward(&gs)?;
    let rhs = ff.map(|k, v| v * fg.values()[k])?;
    relative_l2(&lhs, &rhs)
}

/// `||F(f g) - c_a^2 F f * F g||_2 / ||F(f g)||_2`; the convolution runs on
/// the frequency grid with `F g` taken in closed form.
pub fn product_transform_defect(
    f: &FunctionSpec,
    g: &FunctionSpec,
    phys: &Arc<QuadGrid>,
    freq: &Arc<QuadGrid>,
    rule: &ThetaRule,
) -> Result<f64> {
    f.require_integrable()?;
    g.require_integrable()?;
    let fg_exact = g
        .exact_transform(phys.alpha())
        .ok_or(Error::NoClosedForm("second factor of the product"))?;
    let plan = TransformPlan::new(phys, freq)?;
    let prod = SampledFunction::from_fn(phys.clone(), |x| f.evaluate(x) * g.evaluate(x))?;
    let lhs = plan.forward(&prod)?;
    let ff = plan.forward(&f.sample(phys)?)?;
    // Convolve on the frequency grid, viewed as a physical grid.
    let ff_as_fn = SampledFunction::new(freq.clone(), ff.into_values())?;
    let conv = convolve(&ff_as_fn, &fg_exact, freq, rule)?;
    let c2 = phys.alpha().c_alpha().powi(2);
    let rhs = SpectralSamples::new(freq.clone(), conv.values().iter().map(|v| c2 * v).collect())?;
    relative_l2(&rhs, &lhs)
}
