//! Asymptotic and finite-sample variances of the scaled empirical
//! autocovariance.
//!
//! `Sigma(k)` is the long-run variance of `n^{-1/2} sum X(t+k) X(t)`, which
//! for AR(1) has the closed form below; `Sigma~(k)` is the exact variance of
//! the same statistic built from the m-dependent truncation `Y`, a
//! Bartlett-weighted sum of the lag-product covariance function `C~(u)`.

use crate::ar1::{Ar1Model, MDepApprox};
use crate::error::Error;
use crate::math;
use crate::Result;

/// Long-run variance `Sigma(k)` of the scaled empirical autocovariance:
///
/// ```text
/// kappa_2^2 (1 + a^2 + a^{2k} (1 + a^2 + 2k (1 - a^2))) / (1 - a^2)^3
///   + kappa_4 a^{2k} / (1 - a^2)^2
/// ```
///
/// Callers with negative lags pass `|k|` (the form is even in `k`).
pub fn sigma_asymptotic(model: &Ar1Model, k: u32) -> f64 {
    let a = model.alpha();
    let a2 = a * a;
    let kappas = model.innovations().cumulants();
    let a2k = math::powi(a, 2 * k);
    let one = 1.0 - a2;
    kappas[2] * kappas[2] * (1.0 + a2 + a2k * (1.0 + a2 + 2.0 * k as f64 * one))
        / (one * one * one)
        + kappas[4] * a2k / (one * one)
}

/// Lag-product covariance `C~(u) = cum(Z~(0), Z~(u))` of
/// `Z~(t) = Y(t+k) Y(t) - E[Y(t+k) Y(t)]`:
///
/// ```text
/// C~(u) = cum(Y(k), Y(0), Y(u+k), Y(u)) + g(u)^2 + g(k-u) g(k+u)
/// ```
///
/// where `g(v) = cum(Y(v), Y(0))`.  Vanishes for `|u| > m` because every
/// constituent cumulant then has spread beyond `m`.
pub fn c_tilde(approx: &MDepApprox, k: u32, u: i64) -> f64 {
    let k = k as i64;
    let g = |v: i64| approx.cum_y(&[v, 0]).expect("pair cumulant");
    let cum4 = approx
        .cum_y(&[k, 0, u + k, u])
        .expect("fourth-order cumulant");
    cum4 + g(u) * g(u) + g(k - u) * g(k + u)
}

/// Finite-sample variance `Sigma~(k) = var(n^{-1/2} sum_{t=1..n-k} Y(t+k) Y(t))`:
///
/// ```text
/// (n - k)/n * sum_{|u| <= min(n-k-1, m)} (1 - |u|/(n-k)) C~(u)
/// ```
///
/// The summation range `min(n-k-1, m)` is equivalent to `min(n-k, m)` since
/// the Bartlett weight vanishes at `|u| = n - k`.
pub fn sigma_tilde(approx: &MDepApprox, k: u32, n: u64) -> Result<f64> {
    if n <= k as u64 {
        return Err(Error::argument("sigma_tilde requires n > k"));
    }
    let nk = (n - k as u64) as f64;
    let umax = (nk as i64 - 1).min(approx.m as i64);
    let mut sum = c_tilde(approx, k, 0);
    for u in 1..=umax {
        sum += 2.0 * (1.0 - u as f64 / nk) * c_tilde(approx, k, u);
    }
    Ok(nk / n as f64 * sum)
}
