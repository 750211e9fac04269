//! The transform `F_a f(l) = int f(x) prod_i j_{a_i}(l_i x_i) d mu_a(x)`,
//! applied one axis at a time through dense per-axis kernel matrices.

use std::sync::Arc;

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Domain, Field, QuadGrid, SampledFunction, SpectralSamples};
use crate::special::jnorm;
use crate::specs::Evaluable;
use crate::summation::{pairwise_dot, pairwise_sum_by};

/// Outermost-node magnitude (relative to the peak) above which a sampled
/// input is reported as truncated.
pub const TRUNCATION_TOL: f64 = 1e-12;

/// Kernel matrices `K_i[k, j] = j_{a_i}(l_k x_j) w_j` for one ordered pair
/// of grids. Build once, apply many times.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    src: Arc<QuadGrid>,
    dst: Arc<QuadGrid>,
    matrices: Vec<Vec<f64>>,
}

impl TransformPlan {
    pub fn new(src: &Arc<QuadGrid>, dst: &Arc<QuadGrid>) -> Result<Self> {
        if src.alpha() != dst.alpha() {
            return Err(Error::AlphaMismatch("source grid", "target grid"));
        }
        let matrices = (0..src.dim())
            .map(|i| {
                let a = src.alpha().get(i);
                let xs = &src.axis(i).nodes;
                let ws = &src.axis(i).weights;
                let ls = &dst.axis(i).nodes;
                let n_in = xs.len();
                let mut m = vec![0.0; ls.len() * n_in];
                m.par_chunks_mut(n_in).zip(ls.par_iter()).for_each(|(row, &l)| {
                    for (j, r) in row.iter_mut().enumerate() {
                        *r = jnorm(a, l * xs[j]) * ws[j];
                    }
                });
                m
            })
            .collect();
        Ok(Self {
            src: src.clone(),
            dst: dst.clone(),
            matrices,
        })
    }

    pub fn source(&self) -> &Arc<QuadGrid> {
        &self.src
    }

    pub fn target(&self) -> &Arc<QuadGrid> {
        &self.dst
    }

    /// Raw separable quadrature of `values` (no constant factor).
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let mut shape: Vec<usize> = self.src.shape().to_vec();
        let mut data = values.to_vec();
        for (i, m) in self.matrices.iter().enumerate() {
            let n_out = self.dst.shape()[i];
            data = apply_axis(&data, &shape, i, m, n_out);
            shape[i] = n_out;
        }
        data
    }

    fn check_source<D: Domain>(&self, f: &Field<D>) -> Result<()> {
        if Arc::ptr_eq(f.grid(), &self.src) || **f.grid() == *self.src {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `F_a f` on the target grid.
    pub fn forward(&self, f: &SampledFunction) -> Result<SpectralSamples> {
        self.check_source(f)?;
        let r = f.boundary_ratio();
        if r > TRUNCATION_TOL {
            warn!("input is not negligible at the outer nodes (ratio {r:.3e}); widen the grid");
        }
        SpectralSamples::new(self.dst.clone(), self.apply(f.values()))
    }

    /// `c_a^2 F_a F` on the target grid.
    pub fn inverse(&self, spec: &SpectralSamples) -> Result<SampledFunction> {
        self.check_source(spec)?;
        let c2 = self.src.alpha().c_alpha().powi(2);
        let mut v = self.apply(spec.values());
        v.iter_mut().for_each(|x| *x *= c2);
        SampledFunction::new(self.dst.clone(), v)
    }
}

/// Contracts axis `axis` of a row-major tensor with the `(n_out x n_in)` matrix `m`.
fn apply_axis(data: &[f64], shape: &[usize], axis: usize, m: &[f64], n_out: usize) -> Vec<f64> {
    let n_in = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let fibres: Vec<Vec<f64>> = (0..outer * inner)
        .into_par_iter()
        .map_init(
            || vec![0.0; n_in],
            |col, f| {
                let (o, t) = (f / inner, f % inner);
                for (j, c) in col.iter_mut().enumerate() {
                    *c = data[(o * n_in + j) * inner + t];
                }
                m.chunks(n_in).map(|row| pairwise_dot(row, col)).collect()
            },
        )
        .collect();
    let mut out = vec![0.0; outer * n_out * inner];
    for (f, fibre) in fibres.into_iter().enumerate() {
        let (o, t) = (f / inner, f % inner);
        for (k, v) in fibre.into_iter().enumerate() {
            out[(o * n_out + k) * inner + t] = v;
        }
    }
    out
}

/// `F_a f` on `freq_grid`.
pub fn forward(f: &SampledFunction, freq_grid: &Arc<QuadGrid>) -> Result<SpectralSamples> {
    TransformPlan::new(f.grid(), freq_grid)?.forward(f)
}

/// `c_a^2 F_a F` on `phys_grid`.
pub fn inverse(spec: &SpectralSamples, phys_grid: &Arc<QuadGrid>) -> Result<SampledFunction> {
    TransformPlan::new(spec.grid(), phys_grid)?.inverse(spec)
}

/// `| ||f||_2 - c_a ||F f||_2 | / ||f||_2`.
pub fn plancherel_defect(f: &SampledFunction, freq_grid: &Arc<QuadGrid>) -> Result<f64> {
    let nf = f.lp_norm(2.0)?;
    if nf == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let spec = forward(f, freq_grid)?;
    let ns = f.alpha().c_alpha() * spec.lp_norm(2.0)?;
    Ok((nf - ns).abs() / nf)
}

/// `||c_a^2 F F f - f||_2 / ||f||_2`, through `freq_grid` and back.
pub fn inversion_defect(f: &SampledFunction, freq_grid: &Arc<QuadGrid>) -> Result<f64> {
    let nf = f.lp_norm(2.0)?;
    if nf == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let back = inverse(&forward(f, freq_grid)?, f.grid())?;
    Ok(back.combine(1.0, f, -1.0)?.lp_norm(2.0)? / nf)
}

/// `max(0, ||F f||_inf - ||f||_1)`, sup taken over the frequency nodes.
pub fn sup_bound_defect(f: &SampledFunction, freq_grid: &Arc<QuadGrid>) -> Result<f64> {
    let spec = forward(f, freq_grid)?;
    Ok((spec.lp_norm(f64::INFINITY)? - f.lp_norm(1.0)?).max(0.0))
}

/// Pointwise `m(xi_k) F(xi_k)`.
pub fn apply_multiplier(spec: &SpectralSamples, m: impl Fn(&[f64]) -> f64) -> Result<SpectralSamples> {
    let grid = spec.grid();
    let mut p = vec![0.0; grid.dim()];
    let mut values = Vec::with_capacity(grid.len());
    for (k, &v) in spec.values().iter().enumerate() {
        grid.fill_point(k, &mut p);
        let mk = m(&p);
        if !mk.is_finite() {
            return Err(Error::NonFiniteMultiplier(k));
        }
        values.push(mk * v);
    }
    SpectralSamples::new(grid.clone(), values)
}

/// Pointwise multiplier that depends on `t = ||xi||^2` only.
pub fn apply_radial_multiplier(spec: &SpectralSamples, m: impl Fn(f64) -> f64) -> Result<SpectralSamples> {
    apply_multiplier(spec, |xi| m(xi.iter().map(|v| v * v).sum()))
}

/// `|int f F g - int g F f| / max(|int f F g|, |int g F f|)`, with the
/// shared grid serving as both the physical and the frequency node set.
pub fn dual_pairing_defect(f: &SampledFunction, g: &SampledFunction) -> Result<f64> {
    f.check_same_grid(g)?;
    let plan = TransformPlan::new(f.grid(), f.grid())?;
    let fg = plan.apply(g.values());
    let ff = plan.apply(f.values());
    let w = f.grid().measure_weights();
    let lhs = pairwise_sum_by(0..w.len(), &|k| w[k] * f.values()[k] * fg[k]);
    let rhs = pairwise_sum_by(0..w.len(), &|k| w[k] * g.values()[k] * ff[k]);
    let scale = lhs.abs().max(rhs.abs());
    Ok(if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale })
}

/// Centred-difference `D_a f(x)` with step `h`.
///
/// The function is even in each variable, so `f(x - h e_i)` is read as
/// `f(|x_i - h|)`; this keeps the stencil valid right down to the axes.
pub fn fd_laplacian(f: &impl Evaluable, alpha: &[f64], x: &[f64], h: f64) -> f64 {
    let f0 = f.eval(x);
    let mut p = x.to_vec();
    let mut total = 0.0;
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let fp = f.eval(&p);
        p[i] = (x[i] - h).abs();
        let fm = f.eval(&p);
        p[i] = x[i];
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        let d1 = (fp - fm) / (2.0 * h);
        total += d2 + (2.0 * alpha[i] + 1.0) / x[i] * d1;
    }
    total
}

/// `||F(D_a f) + ||xi||^2 F f||_2 / ||F f||_2` with `D_a f` by finite differences.
pub fn eigenrelation_defect(f: &impl Evaluable, plan: &TransformPlan, h: f64) -> Result<f64> {
    let phys = plan.source();
    let alpha = phys.alpha().values().to_vec();
    let fs = SampledFunction::from_fn(phys.clone(), |x| f.eval(x))?;
    let lap = SampledFunction::from_fn(phys.clone(), |x| fd_laplacian(f, &alpha, x, h))?;
    let ff = plan.forward(&fs)?;
    let fl = plan.forward(&lap)?;
    let t = plan.target().norm_sq();
    let resid = fl.map(|k, v| v + t[k] * ff.values()[k])?;
    let denom = ff.lp_norm(2.0)?;
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(resid.lp_norm(2.0)? / denom)
}
