//! Sobolev-type quantities on spectra.
//!
//! Weight convention: `||T||_{E^{s,p}} = c_a ||(1 + ||xi||^2)^s F T||_{L^p_a}`,
//! exponent `s` rather than `s/2`, so `H^s = E^{s,2}` here is the classical
//! `H^{2s}`.

use std::sync::Arc;

use serde::Serialize;

use crate::alpha::AlphaParams;
use crate::error::{Error, Result};
use crate::grid::{build_grid, weighted_lp, QuadGrid, SampledFunction, SpectralSamples};
use crate::pde::EvenPolynomial;
use crate::special::jnorm;
use crate::specs::{Evaluable, FunctionSpec};
use crate::summation::pairwise_sum_by;
use crate::transform::TransformPlan;

/// Relative change under refinement below which a quantity counts as finite.
pub const REFINEMENT_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevIndex {
    pub s: f64,
    pub p: f64,
}

impl SobolevIndex {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("s = {s} must be finite")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Self { s, p })
    }

    pub fn hilbert(s: f64) -> Result<Self> {
        Self::new(s, 2.0)
    }
}

/// A tempered distribution held through its transform on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDistribution {
    spectral: SpectralSamples,
}

impl SpectralDistribution {
    pub fn new(spectral: SpectralSamples) -> Self {
        Self { spectral }
    }

    /// Samples a pointwise spectrum such as a closed-form transform.
    pub fn from_spectrum(grid: &Arc<QuadGrid>, spectrum: &impl Evaluable) -> Result<Self> {
        Ok(Self::new(SpectralSamples::from_fn(grid.clone(), |xi| {
            spectrum.eval(xi)
        })?))
    }

    /// The transform of a sampled function.
    pub fn from_function(f: &SampledFunction, plan: &TransformPlan) -> Result<Self> {
        Ok(Self::new(plan.forward(f)?))
    }

    pub fn zero(grid: &Arc<QuadGrid>) -> Self {
        Self::new(SpectralSamples::zeros(grid.clone()))
    }

    pub fn spectrum(&self) -> &SpectralSamples {
        &self.spectral
    }

    pub fn into_spectrum(self) -> SpectralSamples {
        self.spectral
    }

    pub fn grid(&self) -> &Arc<QuadGrid> {
        self.spectral.grid()
    }

    pub fn alpha(&self) -> &AlphaParams {
        self.spectral.alpha()
    }

    fn radial_map(&self, m: impl Fn(f64) -> f64) -> Result<Self> {
        let t = self.grid().norm_sq();
        let mut out = Vec::with_capacity(t.len());
        for (k, &v) in self.spectral.values().iter().enumerate() {
            let mk = m(t[k]);
            if !mk.is_finite() {
                return Err(Error::NonFiniteMultiplier(k));
            }
            out.push(mk * v);
        }
        Ok(Self::new(SpectralSamples::new(self.grid().clone(), out)?))
    }
}

/// `c_a ||(1 + ||xi||^2)^s F T||_p`.
pub fn sobolev_norm(t: &SpectralDistribution, idx: SobolevIndex) -> Result<f64> {
    let weighted = weighted_spectrum(t, idx.s)?;
    let v = t.alpha().c_alpha() * weighted_lp(&weighted, t.grid().measure_weights(), idx.p)?;
    if !v.is_finite() {
        return Err(Error::Overflow("Sobolev norm"));
    }
    Ok(v)
}

/// `(1 + ||xi||^2)^s F T` at every node: the isometric image of `T` in `L^p_a`
/// (up to the factor `c_a`).
pub fn weighted_spectrum(t: &SpectralDistribution, s: f64) -> Result<Vec<f64>> {
    let ts = t.grid().norm_sq();
    let mut out = Vec::with_capacity(ts.len());
    for (k, &v) in t.spectrum().values().iter().enumerate() {
        let w = (1.0 + ts[k]).powf(s) * v;
        if !w.is_finite() {
            return Err(Error::Overflow("Sobolev weight"));
        }
        out.push(w);
    }
    Ok(out)
}

/// `c_a^2 int (1 + ||xi||^2)^{2s} F S F T d mu_a`.
pub fn hs_inner_product(a: &SpectralDistribution, b: &SpectralDistribution, s: f64) -> Result<f64> {
    a.spectrum().check_same_grid(b.spectrum())?;
    let wa = weighted_spectrum(a, s)?;
    let wb = weighted_spectrum(b, s)?;
    let w = a.grid().measure_weights();
    let c = a.alpha().c_alpha();
    let v = c * c * pairwise_sum_by(0..w.len(), &|k| w[k] * wa[k] * wb[k]);
    if !v.is_finite() {
        return Err(Error::Overflow("H^s inner product"));
    }
    Ok(v)
}

/// Whether `delta_x` lies in `E^{s,p}`: `2sp + (2 - p)(|a| + n/2) < -n`.
pub fn dirac_membership(s: f64, p: f64, alpha: &AlphaParams) -> bool {
    let n = alpha.dim() as f64;
    2.0 * s * p + (2.0 - p) * (alpha.abs() + 0.5 * n) < -n
}

/// `F(delta_x)(xi) = prod_i j_{a_i}(x_i xi_i)`, as a pointwise spectrum.
pub fn dirac_spectrum(alpha: &AlphaParams, x: &[f64]) -> Result<impl Evaluable + Clone> {
    alpha.check_dim("x", x.len())?;
    if x.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Domain {
            what: "dirac_spectrum",
            value: x.iter().copied().fold(f64::NAN, f64::min),
        });
    }
    let orders = alpha.values().to_vec();
    let x = x.to_vec();
    Ok(move |xi: &[f64]| {
        orders
            .iter()
            .zip(&x)
            .zip(xi)
            .map(|((&a, &xv), &l)| jnorm(a, xv * l))
            .product::<f64>()
    })
}

/// `(-D_a)^k T`, i.e. the multiplier `||xi||^{2k}`.
pub fn laplacian_power(t: &SpectralDistribution, k: u32) -> Result<SpectralDistribution> {
    if k == 0 {
        return Ok(t.clone());
    }
    t.radial_map(|ts| ts.powi(k as i32))
}

/// `(1 - D_a)^m T` as the multiplier `(1 + ||xi||^2)^m`.
pub fn bessel_potential(t: &SpectralDistribution, m: f64) -> Result<SpectralDistribution> {
    t.radial_map(|ts| (1.0 + ts).powf(m))
}

/// `sum_j C(m, j) (-D_a)^j T`.
pub fn binomial_expansion(t: &SpectralDistribution, m: u32) -> Result<SpectralDistribution> {
    let mut acc = vec![0.0; t.grid().len()];
    for j in 0..=m {
        let term = laplacian_power(t, j)?;
        let c = binomial(m, j);
        for (a, v) in acc.iter_mut().zip(term.spectrum().values()) {
            *a += c * v;
        }
    }
    Ok(SpectralDistribution::new(SpectralSamples::new(t.grid().clone(), acc)?))
}

pub fn binomial(m: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// Both sides of the multiplication bound
/// `||phi T||_{E^{s,p}} <= 2^{|s|} c_a ||T||_{E^{s,p}} ||(1 + ||x||^2)^{|s|} F phi||_{L^1}`.
///
/// `phi T` is formed in physical space, so `T` must survive the round trip
/// through `phys` to within `roundtrip_tol`.
pub fn schwartz_multiply_bound(
    phi: &FunctionSpec,
    t: &SpectralDistribution,
    idx: SobolevIndex,
    phys: &Arc<QuadGrid>,
    roundtrip_tol: f64,
) -> Result<(f64, f64)> {
    let to_phys = TransformPlan::new(t.grid(), phys)?;
    let to_freq = TransformPlan::new(phys, t.grid())?;
    let f = to_phys.inverse(t.spectrum())?;
    let back = to_freq.forward(&f)?;
    let defect = relative_l2(back.values(), t.spectrum().values(), t.grid().measure_weights());
    if !(defect <= roundtrip_tol) {
        return Err(Error::NotRepresentable(defect));
    }
    let prod = f.map(|k, v| v * phi.evaluate(&phys.point(k)))?;
    let lhs = sobolev_norm(&SpectralDistribution::new(to_freq.forward(&prod)?), idx)?;
    let phi_hat = phi_spectrum(phi, phys, t.grid())?;
    let s_abs = idx.s.abs();
    let weighted = weighted_spectrum(&phi_hat, s_abs)?;
    let l1 = weighted_lp(&weighted, t.grid().measure_weights(), 1.0)?;
    let rhs = 2f64.powf(s_abs) * t.alpha().c_alpha() * sobolev_norm(t, idx)? * l1;
    if !rhs.is_finite() {
        return Err(Error::Overflow("multiplication bound"));
    }
    Ok((lhs, rhs))
}

/// `F phi` on `freq`: closed form where available, else by quadrature on `phys`.
pub fn phi_spectrum(phi: &FunctionSpec, phys: &Arc<QuadGrid>, freq: &Arc<QuadGrid>) -> Result<SpectralDistribution> {
    match phi.exact_transform(freq.alpha()) {
        Some(t) => SpectralDistribution::from_spectrum(freq, &t),
        None => {
            let plan = TransformPlan::new(phys, freq)?;
            SpectralDistribution::from_function(&phi.sample(phys)?, &plan)
        }
    }
}

fn relative_l2(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    let diff = pairwise_sum_by(0..w.len(), &|k| w[k] * (a[k] - b[k]).powi(2));
    let base = pairwise_sum_by(0..w.len(), &|k| w[k] * b[k] * b[k]);
    if base == 0.0 {
        diff.sqrt()
    } else {
        (diff / base).sqrt()
    }
}

/// `(c_a^2 int F T F phi d mu_a, ||phi||_{H^s} ||T||_{H^{-s}})`.
pub fn duality_pairing(t: &SpectralDistribution, phi: &SpectralDistribution, s: f64) -> Result<(f64, f64)> {
    t.spectrum().check_same_grid(phi.spectrum())?;
    let w = t.grid().measure_weights();
    let c = t.alpha().c_alpha();
    let (ft, fp) = (t.spectrum().values(), phi.spectrum().values());
    let pairing = c * c * pairwise_sum_by(0..w.len(), &|k| w[k] * ft[k] * fp[k]);
    let bound = sobolev_norm(phi, SobolevIndex::hilbert(s)?)? * sobolev_norm(t, SobolevIndex::hilbert(-s)?)?;
    Ok((pairing, bound))
}

/// `T = (1 - D_a)^m g`, i.e. `F T = (1 + ||xi||^2)^m F g`.
pub fn negative_order_representation(
    g: &SampledFunction,
    m: u32,
    plan: &TransformPlan,
) -> Result<SpectralDistribution> {
    let fg = SpectralDistribution::from_function(g, plan)?;
    fg.radial_map(|ts| (1.0 + ts).powi(m as i32))
}

/// `c_a (int ||xi||^{4s} |F T|^2 d mu_a)^{1/2}`.
pub fn homogeneous_seminorm(t: &SpectralDistribution, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::InvalidParameter(format!("s = {s} must be nonnegative")));
    }
    let ts = t.grid().norm_sq();
    let v = t.spectrum().values();
    let w = t.grid().measure_weights();
    let sum = pairwise_sum_by(0..w.len(), &|k| {
        let m = if s == 0.0 { 1.0 } else { ts[k].powf(2.0 * s) };
        w[k] * m * v[k] * v[k]
    });
    let r = t.alpha().c_alpha() * sum.sqrt();
    if !r.is_finite() {
        return Err(Error::Overflow("homogeneous seminorm"));
    }
    Ok(r)
}

/// A quantity evaluated on a grid and on its refinement (radius and node
/// count both doubled).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Refined {
    pub base: f64,
    pub refined: f64,
}

impl Refined {
    pub fn relative_change(&self) -> f64 {
        if self.base == 0.0 && self.refined == 0.0 {
            0.0
        } else {
            (self.refined - self.base).abs() / self.base.abs().max(self.refined.abs())
        }
    }

    /// Finite on both grids and stable to [`REFINEMENT_TOL`].
    pub fn is_stable(&self) -> bool {
        self.base.is_finite() && self.refined.is_finite() && self.relative_change() < REFINEMENT_TOL
    }
}

/// The grid with every radius and node count doubled.
pub fn refine(grid: &QuadGrid) -> Result<Arc<QuadGrid>> {
    let r: Vec<f64> = grid.radius().iter().map(|r| 2.0 * r).collect();
    let n: Vec<usize> = grid.shape().iter().map(|n| 2 * n).collect();
    build_grid(grid.alpha(), &r, &n)
}

/// Evaluates `q` on the spectrum sampled on `grid` and on its refinement.
/// Errors inside `q` (overflow) count as an infinite value.
pub fn under_refinement(
    spectrum: &impl Evaluable,
    grid: &Arc<QuadGrid>,
    q: impl Fn(&SpectralDistribution) -> Result<f64>,
) -> Result<Refined> {
    let eval = |g: &Arc<QuadGrid>| -> Result<f64> {
        let t = SpectralDistribution::from_spectrum(g, spectrum)?;
        match q(&t) {
            Ok(v) => Ok(v),
            Err(Error::Overflow(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    Ok(Refined {
        base: eval(grid)?,
        refined: eval(&refine(grid)?)?,
    })
}

/// Whether the index condition `s > (|a| + n)/2 + m` holds and
/// `int ||xi||^{2k} |F T| d mu_a` is finite and refinement-stable for `k <= m`.
pub fn continuity_embedding_check(spectrum: &impl Evaluable, grid: &Arc<QuadGrid>, s: f64, m: u32) -> Result<bool> {
    let alpha = grid.alpha();
    if !(s > 0.5 * (alpha.abs() + grid.dim() as f64) + m as f64) {
        return Ok(false);
    }
    for k in 0..=m {
        let r = under_refinement(spectrum, grid, |t| {
            let ts = t.grid().norm_sq();
            let w = t.grid().measure_weights();
            let v = t.spectrum().values();
            Ok(pairwise_sum_by(0..w.len(), &|i| {
                w[i] * ts[i].powi(k as i32) * v[i].abs()
            }))
        })?;
        if !r.is_stable() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of [`polynomial_regularity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityCheck {
    /// `||g||_{E^{s+m,2}}` on the base and refined grids.
    pub norm_g: Refined,
    /// `||P(-D_a) g||_{E^{s,2}}` on the base grid.
    pub norm_u: f64,
    /// `sup (1+t)^m / P(t)`.
    pub bound: f64,
    pub pass: bool,
}

/// `g` in `E^{s+m,2}` given `u = P(-D_a) g` in `E^{s,2}`: the norm of `g` must be
/// finite, refinement-stable, and below `bound * ||u||`.
pub fn polynomial_regularity_check(
    g_hat: &impl Evaluable,
    p: &EvenPolynomial,
    s: f64,
    m: u32,
    grid: &Arc<QuadGrid>,
) -> Result<RegularityCheck> {
    let ts = grid.norm_sq();
    p.check_positive(&ts)?;
    let idx = SobolevIndex::hilbert(s + m as f64)?;
    let norm_g = under_refinement(g_hat, grid, |t| sobolev_norm(t, idx))?;
    let g = SpectralDistribution::from_spectrum(grid, g_hat)?;
    let u = g.radial_map(|t| p.eval(t))?;
    let norm_u = sobolev_norm(&u, SobolevIndex::hilbert(s)?)?;
    let bound = p.regularity_bound(m as f64, &ts);
    let pass = norm_g.is_stable() && norm_g.base <= bound * norm_u * (1.0 + 1e-12) + 1e-8;
    Ok(RegularityCheck {
        norm_g,
        norm_u,
        bound,
        pass,
    })
}

/// Resolution of the Poincaré experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareGrid {
    /// Gauss–Legendre nodes on each `(0, eps)`.
    pub phys_nodes: usize,
    /// Frequency radius is `freq_scale / eps_min`.
    pub freq_scale: f64,
    pub freq_nodes: usize,
}

impl Default for PoincareGrid {
    fn default() -> Self {
        Self {
            phys_nodes: 64,
            freq_scale: 14.0,
            freq_nodes: 400,
        }
    }
}

/// Share of `||T||^2_{H^s}` carried by the outer tenth of the frequency box,
/// above which the box is declared too small.
const POINCARE_TAIL_TOL: f64 = 0.02;

/// Least-squares slope of `log(||T_e||_{H^t} / ||T_e||_{H^s})` against `log e`
/// for the bump family `T_e = bump(e, q)`.
pub fn poincare_slope(
    alpha: &AlphaParams,
    exponent: f64,
    s: f64,
    t: f64,
    eps_list: &[f64],
    res: PoincareGrid,
) -> Result<f64> {
    if !(0.0 <= t && t <= s) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= t <= s, got s = {s}, t = {t}"
        )));
    }
    if eps_list.len() < 2 {
        return Err(Error::InvalidParameter("eps_list needs at least two entries".into()));
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        return Err(Error::InvalidParameter("every eps must lie in (0, 1]".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("eps_list must be strictly decreasing".into()));
    }
    if s == t {
        return Ok(0.0);
    }
    let n = alpha.dim();
    let eps_min = eps_list[eps_list.len() - 1];
    let rxi = res.freq_scale / eps_min;
    let freq = build_grid(alpha, &vec![rxi; n], &vec![res.freq_nodes; n])?;
    let eps_max = eps_list[0];
    if rxi * eps_max > res.freq_nodes as f64 {
        return Err(Error::UnderResolved(format!(
            "{} frequency nodes cannot follow oscillations up to R_xi * eps = {:.1}",
            res.freq_nodes,
            rxi * eps_max
        )));
    }
    let mut pts = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let phys = build_grid(alpha, &vec![eps; n], &vec![res.phys_nodes; n])?;
        let bump = FunctionSpec::bump(eps, exponent);
        let plan = TransformPlan::new(&phys, &freq)?;
        let d = SpectralDistribution::from_function(&bump.sample(&phys)?, &plan)?;
        check_tail(&d, s)?;
        let ns = sobolev_norm(&d, SobolevIndex::hilbert(s)?)?;
        let nt = sobolev_norm(&d, SobolevIndex::hilbert(t)?)?;
        pts.push((eps.ln(), (nt / ns).ln()));
    }
    Ok(least_squares_slope(&pts))
}

fn check_tail(d: &SpectralDistribution, s: f64) -> Result<()> {
    let grid = d.grid();
    let weighted = weighted_spectrum(d, s)?;
    let w = grid.measure_weights();
    let mut p = vec![0.0; grid.dim()];
    let mut total = 0.0;
    let mut tail = 0.0;
    for k in 0..grid.len() {
        grid.fill_point(k, &mut p);
        let e = w[k] * weighted[k] * weighted[k];
        total += e;
        if p.iter().zip(grid.radius()).any(|(&x, &r)| x > 0.9 * r) {
            tail += e;
        }
    }
    if total > 0.0 && tail / total > POINCARE_TAIL_TOL {
        return Err(Error::UnderResolved(format!(
            "{:.1}% of the H^{s} norm sits in the outer tenth of the frequency box",
            100.0 * tail / total
        )));
    }
    Ok(())
}

/// Slope of the least-squares line through `pts`.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
