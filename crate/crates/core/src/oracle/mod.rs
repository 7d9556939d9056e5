//! Independent checks: exact-diagonalisation entropy differences, finite
//! differences with Richardson extrapolation, closed-form versus quadrature
//! reports and the alternating binomial identity.

mod crosscheck;
mod extended;
mod fd;

pub use crosscheck::{quadrature_crosscheck, CrosscheckReport, CrosscheckRow};
pub use extended::entropy_shift;
pub use fd::{fd_derivative, fd_derivative_with, DerivativeEstimate, FdOptions};

use crate::error::{Error, Result};

/// Σ_{l=0}^{n} (−1)^l C(n, l) l^m in exact integers, 0 ≤ m ≤ n ≤ 20.
/// Equals 0 for m < n and (−1)ⁿ n! for m = n.
pub fn appendix_a_identity(n: u32, m: u32) -> Result<i128> {
    if m > n || n > 20 {
        return Err(Error::InvalidParameter(format!("need 0 <= m <= n <= 20, got n={n}, m={m}")));
    }
    let mut binom: i128 = 1;
    let mut sum: i128 = 0;
    for l in 0..=n {
        let sign = if l % 2 == 0 { 1 } else { -1 };
        sum += sign * binom * (l as i128).pow(m);
        binom = binom * (n - l) as i128 / (l + 1) as i128;
    }
    Ok(sum)
}
