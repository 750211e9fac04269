//! Spectral inversion of `P(-D_a) u = f` for strictly positive `P`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sobolev::{sobolev_norm, SobolevIndex, SpectralDistribution};

/// Polynomial `P(t) = sum_j c_j t^j` in `t = ||xi||^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvenPolynomial {
    coeffs: Vec<f64>,
}

impl EvenPolynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "polynomial coefficient {c} is not finite"
            )));
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() || coeffs == [0.0] {
            return Err(Error::NonPositivePolynomial("P is identically zero".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree in `t`; the degree in `xi` is twice this.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// `P > 0` on every `t` in `ts` together with `P(0) > 0` and a positive
    /// leading coefficient.
    pub fn check_positive(&self, ts: &[f64]) -> Result<()> {
        if !(self.leading() > 0.0) {
            return Err(Error::NonPositivePolynomial(format!(
                "leading coefficient {} is not positive",
                self.leading()
            )));
        }
        for &t in std::iter::once(&0.0).chain(ts) {
            let v = self.eval(t);
            if !(v > 0.0) {
                return Err(Error::NonPositivePolynomial(format!("P({t}) = {v}")));
            }
        }
        Ok(())
    }

    /// `sup_{t >= 0} (1 + t)^m / P(t)`, as the max over `ts` (plus `t = 0`)
    /// and the limit at infinity; infinite if `m` exceeds the degree.
    pub fn regularity_bound(&self, m: f64, ts: &[f64]) -> f64 {
        let deg = self.degree() as f64;
        let limit = if m > deg {
            f64::INFINITY
        } else if m == deg {
            1.0 / self.leading()
        } else {
            0.0
        };
        std::iter::once(&0.0)
            .chain(ts)
            .map(|&t| (1.0 + t).powf(m) / self.eval(t))
            .fold(limit, f64::max)
    }
}

impl EvenPolynomial {
    /// `k^2 + t`.
    pub fn helmholtz(k: f64) -> Result<Self> {
        if k == 0.0 || !k.is_finite() {
            return Err(Error::ZeroWavenumber);
        }
        Self::new(vec![k * k, 1.0])
    }
}

/// `F u = P(||xi||^2) F f`.
pub fn apply_polynomial(u: &SpectralDistribution, p: &EvenPolynomial) -> Result<SpectralDistribution> {
    map_radial(u, |t| p.eval(t))
}

/// `F u = P(||xi||^2)^{-1} F f`, after checking `P > 0` on the grid.
pub fn solve_polynomial(f: &SpectralDistribution, p: &EvenPolynomial) -> Result<SpectralDistribution> {
    p.check_positive(&f.grid().norm_sq())?;
    map_radial(f, |t| 1.0 / p.eval(t))
}

/// `F u = (k^2 + ||xi||^2)^{-1} F f`.
pub fn solve_helmholtz(f: &SpectralDistribution, k: f64) -> Result<SpectralDistribution> {
    solve_polynomial(f, &EvenPolynomial::helmholtz(k)?)
}

fn map_radial(f: &SpectralDistribution, m: impl Fn(f64) -> f64) -> Result<SpectralDistribution> {
    let ts = f.grid().norm_sq();
    let mut out = Vec::with_capacity(ts.len());
    for (k, &v) in f.spectrum().values().iter().enumerate() {
        let r = m(ts[k]) * v;
        if !r.is_finite() {
            return Err(Error::NonFiniteMultiplier(k));
        }
        out.push(r);
    }
    Ok(SpectralDistribution::new(f.spectrum().map(|k, _| out[k])?))
}

/// `max_k |(P u)_k - f_k| / max_k |f_k|` for `u = solve_polynomial(f, P)`.
pub fn roundtrip_defect(f: &SpectralDistribution, p: &EvenPolynomial) -> Result<f64> {
    let back = apply_polynomial(&solve_polynomial(f, p)?, p)?;
    let scale = f.spectrum().values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = back
        .spectrum()
        .values()
        .iter()
        .zip(f.spectrum().values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityReport {
    /// `||f||_{H^s}`.
    pub f_norm: f64,
    /// `||u||_{H^{s+gain}}`.
    pub u_norm: f64,
    pub ratio: f64,
    /// `sup_t (1 + t)^gain / P(t)`.
    pub bound: f64,
    pub pass: bool,
}

/// Compares `||u||_{H^{s+gain}} / ||f||_{H^s}` with the multiplier bound.
pub fn regularity_report(
    f: &SpectralDistribution,
    u: &SpectralDistribution,
    p: &EvenPolynomial,
    s: f64,
    gain: f64,
) -> Result<RegularityReport> {
    let f_norm = sobolev_norm(f, SobolevIndex::hilbert(s)?)?;
    let u_norm = sobolev_norm(u, SobolevIndex::hilbert(s + gain)?)?;
    let ratio = if f_norm == 0.0 { 0.0 } else { u_norm / f_norm };
    let bound = p.regularity_bound(gain, &f.grid().norm_sq());
    Ok(RegularityReport {
        f_norm,
        u_norm,
        ratio,
        bound,
        pass: ratio <= bound + 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::AlphaParams;
    use crate::grid::build_grid;
    use crate::specs::FunctionSpec;
    use std::sync::Arc;

    fn gaussian(alpha: &[f64]) -> SpectralDistribution {
        let a = AlphaParams::new(alpha.to_vec()).unwrap();
        let g: Arc<_> = build_grid(&a, &vec![14.0; a.dim()], &vec![100; a.dim()]).unwrap();
        let t = FunctionSpec::gaussian(1.0).exact_transform(&a).unwrap();
        SpectralDistribution::from_spectrum(&g, &t).unwrap()
    }

    #[test]
    fn constructed_inverse_is_recovered() {
        let g = gaussian(&[0.0]);
        for k in [1.0, 2.0] {
            let p = EvenPolynomial::helmholtz(k).unwrap();
            let f = apply_polynomial(&g, &p).unwrap();
            let u = solve_helmholtz(&f, k).unwrap();
            for (a, b) in u.spectrum().values().iter().zip(g.spectrum().values()) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
            }
            assert!(roundtrip_defect(&f, &p).unwrap() <= 1e-12);
        }
        assert_eq!(solve_helmholtz(&g, 0.0).unwrap_err(), Error::ZeroWavenumber);
        let z = SpectralDistribution::zero(g.grid());
        assert_eq!(solve_helmholtz(&z, 1.0).unwrap(), z);
    }

    #[test]
    fn constant_and_linear_polynomials() {
        let g = gaussian(&[0.5]);
        let u = solve_polynomial(&g, &EvenPolynomial::new(vec![4.0]).unwrap()).unwrap();
        for (a, b) in u.spectrum().values().iter().zip(g.spectrum().values()) {
            assert_eq!(*a, b / 4.0);
        }
        let a = solve_polynomial(&g, &EvenPolynomial::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(a, solve_helmholtz(&g, 1.0).unwrap());
        assert!(solve_polynomial(&g, &EvenPolynomial::new(vec![1.0, -0.5]).unwrap()).is_err());
    }

    #[test]
    fn regularity_reports() {
        let f = gaussian(&[0.0]);
        for (k, s) in [(1.0, 0.0), (1.0, 1.0), (2.0, 0.0), (2.0, 1.0)] {
            let p = EvenPolynomial::helmholtz(k).unwrap();
            let u = solve_helmholtz(&f, k).unwrap();
            let r = regularity_report(&f, &u, &p, s, 1.0).unwrap();
            assert!(r.pass, "{r:?}");
            if k == 1.0 {
                assert_eq!(r.bound, 1.0);
                assert!((r.ratio - 1.0).abs() <= 1e-12);
            } else {
                assert!(r.bound >= 0.25 && r.bound <= 1.0);
            }
        }
        let p = EvenPolynomial::new(vec![1.0]).unwrap();
        let r = regularity_report(&f, &f, &p, 0.5, 0.0).unwrap();
        assert_eq!((r.ratio, r.bound), (1.0, 1.0));
        let p = EvenPolynomial::new(vec![4.0, 0.0, 1.0]).unwrap();
        let u = solve_polynomial(&f, &p).unwrap();
        let r = regularity_report(&f, &u, &p, 0.0, 2.0).unwrap();
        assert!(r.pass && r.bound.is_finite(), "{r:?}");
    }
}
