//! Normalized Bessel functions `j_g(x) = Gamma(g+1) (2/x)^g J_g(x)`, `g > -1/2`.
//!
//! Three regimes:
//!
//! * power series in `(x/2)^2` while its terms stay small relative to the
//!   sum, i.e. `x <= 2` or `(x/2)^2 <= 2(g+1)`;
//! * Hankel's asymptotic expansion of `J_g` once `x >= 50` and `x >= 4 g^2`;
//! * otherwise `J_g` from the continued fractions of Steed's method
//!   (CF1 for `J'/J`, downward recurrence to a reduced order, CF2 for the
//!   complex ratio `(J' + iY')/(J + iY)`), normalised through the Wronskian.
//!
//! The two asymptotic-free regimes cover the region where the Hankel series
//! diverges before reaching double precision (large order, moderate argument).

use std::f64::consts::PI;

#[allow(unused_imports)]
use crate::alpha::AlphaParams;
use crate::error::{Error, Result};

const SERIES_REL_TOL: f64 = 1e-17;
const SERIES_MAX_TERMS: usize = 500;
const HANKEL_MIN_X: f64 = 50.0;
const CF_EPS: f64 = 1e-16;
const CF_FPMIN: f64 = 1e-200;
const CF_MAX_ITER: usize = 200_000;

/// A Bessel order `g >= -1/2` (`j_{-1/2} = cos` is the closed endpoint).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < -0.5 {
            return Err(Error::InvalidOrder { index: 0, value: gamma });
        }
        Ok(Self(gamma))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `j_g(x)` for `x >= 0`, with `j_g(0) = 1` exactly.
pub fn normalized_bessel(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain {
            what: "normalized_bessel",
            value: x,
        });
    }
    Ok(jnorm(order.0, x))
}

/// Unchecked evaluator used by the hot loops; `gamma > -1/2`, `x >= 0`.
pub(crate) fn jnorm(gamma: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let quarter_sq = 0.25 * x * x;
    if x <= 2.0 || quarter_sq <= 2.0 * (gamma + 1.0) {
        return series(gamma, quarter_sq);
    }
    let j = if x >= HANKEL_MIN_X && x >= 4.0 * gamma * gamma {
        hankel_j(gamma, x)
    } else {
        steed_j(gamma, x)
    };
    let ln_scale = libm::lgamma(gamma + 1.0) + gamma * (2.0 / x).ln();
    ln_scale.exp() * j
}

/// `sum_k (-q)^k / (k! (g+1)_k)` with `q = (x/2)^2`.
fn series(gamma: f64, quarter_sq: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= -quarter_sq / (kf * (kf + gamma));
        sum += term;
        if term.abs() < SERIES_REL_TOL * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel expansion `J_nu(x) = sqrt(2/(pi x)) (P cos w - Q sin w)`,
/// `w = x - nu pi/2 - pi/4`, truncated at its smallest term.
fn hankel_j(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let mag = term.abs();
        if mag == 0.0 || mag > last {
            break;
        }
        last = mag;
        // k odd feeds Q, k even feeds P; signs alternate in pairs.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if mag < 1e-17 {
            break;
        }
    }
    // cos(x - phi), sin(x - phi) from sin/cos of the exact argument.
    let phi = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let cw = cx * cp + sx * sp;
    let sw = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cw - q * sw)
}

/// `J_nu(x)` for `x >= 2` by Steed's method.
fn steed_j(nu: f64, x: f64) -> f64 {
    let nl = (nu - x + 1.5).max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: h = J'_nu / J_nu.
    let mut isign = 1.0;
    let mut h = nu * xi;
    if h.abs() < CF_FPMIN {
        h = CF_FPMIN;
    }
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..CF_MAX_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < CF_FPMIN {
            d = CF_FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < CF_FPMIN {
            c = CF_FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }

    // Downward recurrence of the unnormalised pair (J, J') to order xmu.
    let mut rjl = isign * CF_FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = CF_EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq = (J' + iY') / (J + iY) at order xmu.
    let mut a = 0.25 - xmu * xmu;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..CF_MAX_ITER {
        a += 2.0 * (i - 1) as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < CF_FPMIN {
            dr = CF_FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < CF_FPMIN {
            cr = CF_FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < CF_EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    rjl1 * (rjmu / rjl)
}

/// The tensor kernel `prod_i j_{orders_i}(lambda_i x_i)`.
///
/// Takes raw orders rather than [`AlphaParams`] so that the cosine endpoint
/// `-1/2` is admissible; pass `alpha.values()` for a multi-index.
pub fn bessel_kernel(orders: &[f64], lambda: &[f64], x: &[f64]) -> Result<f64> {
    for (index, &value) in orders.iter().enumerate() {
        if !value.is_finite() || value < -0.5 {
            return Err(Error::InvalidOrder { index, value });
        }
    }
    for (what, found) in [("lambda", lambda.len()), ("x", x.len())] {
        if found != orders.len() {
            return Err(Error::DimensionMismatch {
                what,
                expected: orders.len(),
                found,
            });
        }
    }
    let mut prod = 1.0;
    for (i, (&l, &xi)) in lambda.iter().zip(x).enumerate() {
        let arg = l * xi;
        if !arg.is_finite() || l < 0.0 || xi < 0.0 {
            return Err(Error::Domain {
                what: "bessel_kernel",
                value: if l < 0.0 { l } else { xi },
            });
        }
        prod *= jnorm(orders[i], arg);
    }
    Ok(prod)
}

/// `|j'' + (2g+1)/x j' + j|` by centred differences with step `h`.
///
/// Diagnostic only: the normalized Bessel function solves this ODE exactly.
pub fn bessel_ode_residual(order: BesselOrder, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && x > 2.0 * h && x.is_finite()) {
        return Err(Error::Domain {
            what: "bessel_ode_residual",
            value: x,
        });
    }
    let g = order.0;
    let jm = jnorm(g, x - h);
    let j0 = jnorm(g, x);
    let jp = jnorm(g, x + h);
    let d2 = (jp - 2.0 * j0 + jm) / (h * h);
    let d1 = (jp - jm) / (2.0 * h);
    Ok((d2 + (2.0 * g + 1.0) / x * d1 + j0).abs())
}

/// `Gamma(x)`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `ln |Gamma(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}
