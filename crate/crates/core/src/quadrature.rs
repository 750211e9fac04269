//! Gauss rules on `(-1, 1)`.
//!
//! Jacobi nodes are found by Newton iteration on the three-term recurrence,
//! started from the asymptotic guess `cos((4k - 1 + 2a) pi / (4n + 2a + 2b + 2))`
//! and deflated by the roots already found, so a poor guess for large
//! exponents can never converge onto a neighbour twice. Weights are the
//! Christoffel numbers `1 / sum_k q_k(z)^2` of the orthonormal polynomials.

use crate::error::{Error, Result};

const NEWTON_EPS: f64 = 4e-16;
const NEWTON_MAX_ITER: usize = 100;

/// Nodes ascending on `(-1, 1)` with matching positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The same rule carried affinely onto `(lo, hi)`.
    pub fn mapped(&self, lo: f64, hi: f64) -> GaussRule {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        GaussRule {
            nodes: self.nodes.iter().map(|&t| mid + half * t).collect(),
            weights: self.weights.iter().map(|&w| half * w).collect(),
        }
    }
}

/// `n`-point Gauss–Legendre rule.
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// `n`-point Gauss–Jacobi rule for the weight `(1-x)^a (1+x)^b`, `a, b > -1`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::InvalidGrid("a Gauss rule needs at least one node".into()));
    }
    if !(a > -1.0 && b > -1.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "Jacobi exponents ({a}, {b}) must exceed -1"
        )));
    }
    let rec = Recurrence::jacobi(n, a, b);
    let nf = n as f64;
    let ab = a + b;
    let mut nodes: Vec<f64> = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 1..=n {
        let theta = (4.0 * k as f64 - 1.0 + 2.0 * a) * std::f64::consts::PI / (4.0 * nf + 2.0 * ab + 2.0);
        let mut z = theta.cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp, _) = rec.eval(z);
            let pole: f64 = nodes.iter().map(|&r| 1.0 / (z - r)).sum();
            let step = p / (dp - p * pole);
            z -= step;
            if step.abs() <= NEWTON_EPS {
                converged = true;
                break;
            }
        }
        if !converged || !(z > -1.0 && z < 1.0) {
            return Err(Error::InvalidGrid(format!(
                "Jacobi root {k} of {n} did not converge for exponents ({a}, {b})"
            )));
        }
        let (_, _, christoffel) = rec.eval(z);
        nodes.push(z);
        weights.push(1.0 / christoffel);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| nodes[i].total_cmp(&nodes[j]));
    let nodes: Vec<f64> = order.iter().map(|&i| nodes[i]).collect();
    let weights: Vec<f64> = order.iter().map(|&i| weights[i]).collect();
    if nodes.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidGrid(format!(
            "Jacobi nodes for n = {n}, ({a}, {b}) are not distinct"
        )));
    }
    Ok(GaussRule { nodes, weights })
}

/// Orthonormal three-term recurrence
/// `sqrt(b_{k+1}) q_{k+1} = (z - a_k) q_k - sqrt(b_k) q_{k-1}`, `q_0 = 1/sqrt(mu_0)`.
struct Recurrence {
    diag: Vec<f64>,
    /// `sqrt(b_k)` for `k = 1..=n`.
    off: Vec<f64>,
    q0: f64,
}

impl Recurrence {
    fn jacobi(n: usize, a: f64, b: f64) -> Self {
        let ab = a + b;
        let diag = (0..n)
            .map(|k| {
                if k == 0 {
                    (b - a) / (ab + 2.0)
                } else {
                    let t = 2.0 * k as f64 + ab;
                    (b * b - a * a) / (t * (t + 2.0))
                }
            })
            .collect();
        let off = (1..=n)
            .map(|k| {
                let kf = k as f64;
                let t = 2.0 * kf + ab;
                let bk = if k == 1 {
                    4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (t * t * (t + 1.0) * (t - 1.0))
                };
                bk.sqrt()
            })
            .collect();
        // mu_0 = 2^{a+b+1} B(a+1, b+1)
        let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0)
            - libm::lgamma(ab + 2.0);
        Self {
            diag,
            off,
            q0: (-0.5 * ln_mu0).exp(),
        }
    }

    /// `(q_n(z), q_n'(z), sum_{k<n} q_k(z)^2)`.
    fn eval(&self, z: f64) -> (f64, f64, f64) {
        let (mut q_prev, mut q) = (0.0, self.q0);
        let (mut d_prev, mut d) = (0.0, 0.0);
        let mut sum = 0.0;
        for k in 0..self.diag.len() {
            sum += q * q;
            let prev_off = if k == 0 { 0.0 } else { self.off[k - 1] };
            let next = ((z - self.diag[k]) * q - prev_off * q_prev) / self.off[k];
            let dnext = (q + (z - self.diag[k]) * d - prev_off * d_prev) / self.off[k];
            q_prev = q;
            q = next;
            d_prev = d;
            d = dnext;
        }
        (q, d, sum)
    }
}
