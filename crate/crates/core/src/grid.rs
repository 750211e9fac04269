//! Tensor Gauss–Legendre grids on boxes `prod (0, R_i)` carrying the
//! measure `d mu_a(x) = prod x_i^{2 a_i + 1} dx_i`, and values sampled on them.
//!
//! Storage is a flattened row-major tensor, axis 0 slowest.

use std::marker::PhantomData;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::AlphaParams;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi, gauss_legendre};
use crate::summation::{pairwise_dot, pairwise_sum_by};

/// One axis of a [`QuadGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub nodes: Vec<f64>,
    /// Plain Legendre weights on `(0, R)`.
    pub base_weights: Vec<f64>,
    /// `base_weight * node^{2a+1}`.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    alpha: AlphaParams,
    radius: Vec<f64>,
    axes: Vec<Axis>,
    shape: Vec<usize>,
    measure_weights: Vec<f64>,
}

/// Gauss–Legendre nodes on each `(0, R_i)` with the measure weight folded in;
/// Gauss–Jacobi in `(1 + z)^{2a_i+1}` when that exponent is not an integer.
pub fn build_grid(alpha: &AlphaParams, radius: &[f64], nodes_per_axis: &[usize]) -> Result<Arc<QuadGrid>> {
    alpha.check_dim("radius", radius.len())?;
    alpha.check_dim("nodes_per_axis", nodes_per_axis.len())?;
    let mut axes = Vec::with_capacity(alpha.dim());
    for (i, (&r, &n)) in radius.iter().zip(nodes_per_axis).enumerate() {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidGrid(format!("radius[{i}] = {r} must be positive")));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("nodes[{i}] = {n} must be at least 2")));
        }
        let power = 2.0 * alpha.get(i) + 1.0;
        let (nodes, base_weights, weights) = if power.fract() == 0.0 {
            let rule = gauss_legendre(n)?.mapped(0.0, r);
            let weights = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| w * x.powf(power))
                .collect();
            (rule.nodes, rule.weights, weights)
        } else {
            // x^{2a+1} is not polynomial: absorb it into a Jacobi weight.
            let rule = gauss_jacobi(n, 0.0, power)?;
            let half = 0.5 * r;
            let scale = half.powf(power + 1.0);
            let nodes: Vec<f64> = rule.nodes.iter().map(|&t| half * (1.0 + t)).collect();
            let weights: Vec<f64> = rule.weights.iter().map(|&w| scale * w).collect();
            let base = nodes.iter().zip(&weights).map(|(&x, &w)| w / x.powf(power)).collect();
            (nodes, base, weights)
        };
        axes.push(Axis {
            nodes,
            base_weights,
            weights,
        });
    }
    let shape: Vec<usize> = nodes_per_axis.to_vec();
    let total = shape.iter().product();
    let mut measure_weights = vec![1.0; total];
    let mut stride = total;
    for (axis, &n) in axes.iter().zip(&shape) {
        stride /= n;
        for (k, w) in measure_weights.iter_mut().enumerate() {
            *w *= axis.weights[(k / stride) % n];
        }
    }
    Ok(Arc::new(QuadGrid {
        alpha: alpha.clone(),
        radius: radius.to_vec(),
        axes,
        shape,
        measure_weights,
    }))
}

impl QuadGrid {
    pub fn alpha(&self) -> &AlphaParams {
        &self.alpha
    }

    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    /// Node count per axis.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.measure_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure_weights.is_empty()
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn measure_weights(&self) -> &[f64] {
        &self.measure_weights
    }

    /// Per-axis node indices of flat index `k`.
    pub fn multi_index(&self, mut k: usize, out: &mut [usize]) {
        for i in (0..self.dim()).rev() {
            out[i] = k % self.shape[i];
            k /= self.shape[i];
        }
    }

    /// Coordinates of flat node `k`.
    pub fn point(&self, k: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.fill_point(k, &mut p);
        p
    }

    pub fn fill_point(&self, mut k: usize, out: &mut [f64]) {
        for i in (0..self.dim()).rev() {
            out[i] = self.axes[i].nodes[k % self.shape[i]];
            k /= self.shape[i];
        }
    }

    /// `||x_k||^2` for every node.
    pub fn norm_sq(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        (0..self.len())
            .map(|k| {
                self.fill_point(k, &mut p);
                p.iter().map(|x| x * x).sum()
            })
            .collect()
    }

    /// Flat indices of nodes lying on the outermost node of some axis.
    pub fn outer_shell(&self) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        (0..self.len())
            .filter(|&k| {
                self.multi_index(k, &mut idx);
                idx.iter().zip(&self.shape).any(|(&i, &n)| i + 1 == n)
            })
            .collect()
    }

    /// `prod R_i^{2a_i+2} / (2a_i+2)`, the exact measure of the box.
    pub fn exact_volume(&self) -> f64 {
        self.radius
            .iter()
            .zip(self.alpha.values())
            .map(|(&r, &a)| r.powf(2.0 * a + 2.0) / (2.0 * a + 2.0))
            .product()
    }
}

/// Marker for values on a physical grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Physical;

/// Marker for transform values on a frequency grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frequency;

pub trait Domain: Send + Sync + 'static {
    const TAG: &'static str;
}

impl Domain for Physical {
    const TAG: &'static str = "physical";
}

impl Domain for Frequency {
    const TAG: &'static str = "frequency";
}

/// Real values on every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<D> {
    grid: Arc<QuadGrid>,
    values: Vec<f64>,
    _domain: PhantomData<D>,
}

/// A function sampled on a physical grid.
pub type SampledFunction = Field<Physical>;
/// A transform sampled on a frequency grid.
pub type SpectralSamples = Field<Frequency>;

impl<D: Domain> Field<D> {
    pub fn new(grid: Arc<QuadGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ValueCount {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self {
            grid,
            values,
            _domain: PhantomData,
        })
    }

    pub fn zeros(grid: Arc<QuadGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self {
            grid,
            values,
            _domain: PhantomData,
        }
    }

    /// Samples `f` at every node (in parallel; results are order-independent).
    pub fn from_fn(grid: Arc<QuadGrid>, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<Self> {
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; grid.dim()],
                |p, k| {
                    grid.fill_point(k, p);
                    f(p)
                },
            )
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<QuadGrid> {
        &self.grid
    }

    pub fn alpha(&self) -> &AlphaParams {
        self.grid.alpha()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `int f d mu_a` as a balanced-tree weighted sum.
    pub fn integrate(&self) -> f64 {
        pairwise_dot(&self.values, self.grid.measure_weights())
    }

    /// `(int |f|^p d mu_a)^{1/p}`; `p = inf` gives the largest nodal modulus.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        weighted_lp(&self.values, self.grid.measure_weights(), p)
    }

    /// Same grid, new values computed from `(node index, old value)`.
    pub fn map(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let values = self.values.iter().enumerate().map(|(k, &v)| f(k, v)).collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.map(|_, v| c * v)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        self.map(|k, v| a * v + b * other.values[k])
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `max |f|` over the outermost shell relative to `max |f|` overall.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        let edge = self
            .grid
            .outer_shell()
            .into_iter()
            .fold(0.0f64, |m, k| m.max(self.values[k].abs()));
        edge / peak
    }

    pub fn to_snapshot(&self) -> Snapshot {
        Snapshot {
            alpha: self.alpha().values().to_vec(),
            radius: self.grid.radius().to_vec(),
            nodes_per_axis: self.grid.shape().to_vec(),
            values: self.values.clone(),
            domain: Some(D::TAG.to_string()),
        }
    }

    /// Rebuilds the grid from its description; rules are deterministic, so
    /// the node set is identical to the one that produced the snapshot.
    pub fn from_snapshot(snap: &Snapshot) -> Result<Self> {
        if let Some(tag) = &snap.domain {
            if tag != D::TAG {
                return Err(Error::Snapshot(format!("domain tag {tag:?}, expected {:?}", D::TAG)));
            }
        }
        let alpha = AlphaParams::new(snap.alpha.clone())?;
        let grid = build_grid(&alpha, &snap.radius, &snap.nodes_per_axis)?;
        Self::new(grid, snap.values.clone())
    }
}

pub(crate) fn weighted_lp(values: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        return Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    if !(p >= 1.0) || p.is_nan() {
        return Err(Error::InvalidExponent(p));
    }
    let sum = if p == 1.0 {
        pairwise_sum_by(0..values.len(), &|k| weights[k] * values[k].abs())
    } else if p == 2.0 {
        pairwise_sum_by(0..values.len(), &|k| weights[k] * values[k] * values[k])
    } else {
        pairwise_sum_by(0..values.len(), &|k| weights[k] * values[k].abs().powf(p))
    };
    Ok(if p == 1.0 {
        sum
    } else if p == 2.0 {
        sum.sqrt()
    } else {
        sum.powf(1.0 / p)
    })
}

/// Portable JSON form of a grid plus values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub alpha: Vec<f64>,
    pub radius: Vec<f64>,
    pub nodes_per_axis: Vec<usize>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
}
