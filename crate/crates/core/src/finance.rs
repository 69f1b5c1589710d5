//! Capital recovery arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::InvalidArgument;

/// Interest rate and economic lifetime for one class of asset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Financing {
    /// Annual interest rate as a fraction (0.05 = 5 %).
    pub interest_rate: f64,
    pub lifetime_years: f64,
}

impl Financing {
    pub const fn new(interest_rate: f64, lifetime_years: f64) -> Self {
        Self {
            interest_rate,
            lifetime_years,
        }
    }

    pub fn annuity_factor(&self) -> Result<f64, InvalidArgument> {
        annuity_factor(self.interest_rate, self.lifetime_years)
    }
}

impl Default for Financing {
    fn default() -> Self {
        Self::new(0.05, 10.0)
    }
}

/// Per-class financing terms. Each class gets its own annuity factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct FinanceTerms {
    pub wind: Financing,
    pub pv: Financing,
    pub dfg: Financing,
    pub ess: Financing,
}

/// Capital recovery factor: the constant annual payment per unit of capital
/// that repays it over `lifetime` years at `rate`.
///
/// ```
/// # use mgplan_core::finance::annuity_factor;
/// assert!((annuity_factor(0.05, 10.0).unwrap() - 0.1295046).abs() < 1e-7);
/// assert_eq!(annuity_factor(0.0, 10.0).unwrap(), 0.1);
/// ```
pub fn annuity_factor(rate: f64, lifetime: f64) -> Result<f64, InvalidArgument> {
    if !(lifetime.is_finite() && lifetime >= 1.0) {
        return Err(InvalidArgument::new(format!(
            "lifetime must be at least one year, got {lifetime}"
        )));
    }
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(InvalidArgument::new(format!(
            "interest rate must be non-negative, got {rate}"
        )));
    }
    if rate == 0.0 {
        return Ok(1.0 / lifetime);
    }
    let growth = (1.0 + rate).powf(lifetime);
    Ok(rate * growth / (growth - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Finds the level payment that drives a loan balance of 1 to zero after
    /// `years` payments, by bisection over a year-by-year amortization table.
    fn amortization_oracle(rate: f64, years: u32) -> f64 {
        let remaining = |payment: f64| {
            let mut balance = 1.0;
            for _ in 0..years {
                balance = balance * (1.0 + rate) - payment;
            }
            balance
        };
        let (mut lo, mut hi) = (0.0, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if remaining(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn matches_amortization_table() {
        let oracle = amortization_oracle(0.05, 10);
        assert!((oracle - 0.1295046).abs() < 1e-7, "oracle {oracle}");
        let closed = annuity_factor(0.05, 10.0).unwrap();
        assert!((closed - oracle).abs() < 1e-12);
        for (rate, years) in [(0.03, 20), (0.08, 5), (0.12, 30)] {
            let closed = annuity_factor(rate, years as f64).unwrap();
            assert!((closed - amortization_oracle(rate, years)).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_cases() {
        assert_eq!(annuity_factor(0.0, 10.0).unwrap(), 0.1);
        assert!((annuity_factor(0.05, 1.0).unwrap() - 1.05).abs() < 1e-15);
        assert!(annuity_factor(0.05, 0.0).is_err());
        assert!(annuity_factor(0.05, -3.0).is_err());
        assert!(annuity_factor(-0.01, 10.0).is_err());
    }
}
