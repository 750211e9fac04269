use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The multi-index `alpha = (alpha_1, ..., alpha_n)` with `alpha_i > -1/2`,
/// together with the normalising constants derived from it.
///
/// `c_alpha = 2^{-|alpha|} / prod Gamma(alpha_i + 1)` is the inversion and
/// Plancherel constant; `c'_alpha = prod Gamma(alpha_i + 1) / (sqrt(pi) Gamma(alpha_i + 1/2))`
/// normalises the translation operator so that it fixes constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AlphaParams {
    alpha: Vec<f64>,
    abs_alpha: f64,
    c_alpha: f64,
    c_prime_axis: Vec<f64>,
}

impl AlphaParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::DimensionMismatch {
                what: "alpha",
                expected: 1,
                found: 0,
            });
        }
        for (index, &value) in alpha.iter().enumerate() {
            if !value.is_finite() || value <= -0.5 {
                return Err(Error::InvalidOrder { index, value });
            }
        }
        let abs_alpha = alpha.iter().sum();
        let ln_c: f64 = alpha
            .iter()
            .map(|&a| -a * std::f64::consts::LN_2 - libm::lgamma(a + 1.0))
            .sum();
        let c_prime_axis = alpha
            .iter()
            .map(|&a| (libm::lgamma(a + 1.0) - libm::lgamma(a + 0.5)).exp() / std::f64::consts::PI.sqrt())
            .collect();
        Ok(Self {
            alpha,
            abs_alpha,
            c_alpha: ln_c.exp(),
            c_prime_axis,
        })
    }

    /// Same order on every one of `n` axes.
    pub fn uniform(value: f64, n: usize) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha
    }

    pub fn get(&self, axis: usize) -> f64 {
        self.alpha[axis]
    }

    /// `|alpha| = sum alpha_i`.
    pub fn abs(&self) -> f64 {
        self.abs_alpha
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    pub fn c_prime(&self) -> f64 {
        self.c_prime_axis.iter().product()
    }

    pub fn c_prime_axis(&self, axis: usize) -> f64 {
        self.c_prime_axis[axis]
    }

    pub(crate) fn check_dim(&self, what: &'static str, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for AlphaParams {
    type Error = Error;

    fn try_from(alpha: Vec<f64>) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<AlphaParams> for Vec<f64> {
    fn from(a: AlphaParams) -> Self {
        a.alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constants_at_zero_order() {
        let a = AlphaParams::uniform(0.0, 3).unwrap();
        assert_eq!(a.c_alpha(), 1.0);
        // Gamma(1) / (sqrt(pi) Gamma(1/2)) = 1/pi per axis
        assert_relative_eq!(a.c_prime(), std::f64::consts::PI.powi(-3), max_relative = 1e-14);
    }

    #[test]
    fn constants_at_half_order() {
        let a = AlphaParams::new(vec![0.5]).unwrap();
        // 2^{-1/2} / Gamma(3/2) = sqrt(2/pi)
        assert_relative_eq!(a.c_alpha(), (2.0 / std::f64::consts::PI).sqrt(), max_relative = 1e-14);
        // Gamma(3/2) / (sqrt(pi) Gamma(1)) = 1/2
        assert_relative_eq!(a.c_prime(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn rejects_orders_at_or_below_minus_half() {
        assert_eq!(
            AlphaParams::new(vec![0.0, -0.5]),
            Err(Error::InvalidOrder { index: 1, value: -0.5 })
        );
        assert!(AlphaParams::new(vec![]).is_err());
        assert!(AlphaParams::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn serde_is_a_plain_vector() {
        let a = AlphaParams::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), "[0.0,1.0]");
        let err = serde_json::from_str::<AlphaParams>("[-0.6]").unwrap_err();
        assert!(err.to_string().contains("alpha[0]"));
    }
}
