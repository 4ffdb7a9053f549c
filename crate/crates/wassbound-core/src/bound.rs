//! Assembly of the Wasserstein-1 upper bounds, minimization over the
//! truncation level, and the inputs-driven inequality toolkit.
//!
//! The stationary bound for `sqrt(n) (gamma_hat(k) - gamma(k))` against
//! `N(0, Sigma(k))` is a sum of four terms:
//!
//! ```text
//! k/sqrt(n) |gamma(k)|                              (bias of gamma_hat)
//!   + sqrt(2/(pi Sigma)) |Sigma - Sigma~|           (variance mismatch)
//!   + 2(n-k)/sqrt(n) K~                             (m-dependent approximation)
//!   + 2 (n Sigma~)^{-3/2} sum_t Q~_t                (Stein, local dependence)
//! ```
//!
//! with `K~ = 2 D~(2) ||X(0)||_2 + (D~(2))^2` in the univariate case.  The
//! bound is a function of the truncation level `m`; [`optimize_m`] scans
//! `m = 0..=m_max` and returns the minimizer.
//!
//! The general (non-stationary) form takes per-position inputs instead of
//! computing them from a model, and the remaining operations are the
//! inputs-driven inequalities used when only the original process is
//! tractable: the index family `Lambda_p` with its product bound
//! `K~_p^(alpha)`, the variance-replacement factor `F~`, and the
//! `|Q_t - Q~_t|` bound with constants `C~_1..C~_3`.

use alloc::vec;
use alloc::vec::Vec;

use crate::ar1::Ar1Model;
use crate::error::Error;
use crate::math;
use crate::qbound::{q_bound_method1, QTables};
use crate::variance::{sigma_asymptotic, sigma_tilde};
use crate::Result;

/// Which bound on the Stein term `Q~_t` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QMethod {
    /// Crude moment bound `5/2 (4m+4k+1)^2 ||Y(0)||_6^6`; cheap, `O(m^2)`.
    Method1,
    /// Cumulant (Cauchy-Schwarz) bound; exact joint-moment evaluation,
    /// `O(m)` in the window width and used for all table output.
    #[default]
    Method2,
}

/// The four additive terms of the stationary bound plus the quantities they
/// were assembled from.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundBreakdown {
    /// Truncation level of the m-dependent approximation.
    pub m: u32,
    /// Lag of the autocovariance.
    pub k: u32,
    /// Segment length.
    pub n: u64,
    /// Stein-term bound variant used.
    pub q_method: QMethod,
    /// Bias term `k/sqrt(n) |gamma(k)|`.
    pub term1: f64,
    /// Variance mismatch `sqrt(2/(pi Sigma)) |Sigma - Sigma~|`.
    pub term2: f64,
    /// m-dependent approximation `2(n-k)/sqrt(n) K~`.
    pub term3: f64,
    /// Stein term `2 (n Sigma~)^{-3/2} sum_t Q~_t`.
    pub term4: f64,
    /// Sum of the four terms.
    pub total: f64,
    /// `gamma(k)`.
    pub gamma_k: f64,
    /// Long-run variance `Sigma(k)`.
    pub sigma: f64,
    /// Finite-sample variance `Sigma~(k)` of the truncated statistic.
    pub sigma_tilde: f64,
    /// `K~ = 2 D~(2) ||X(0)||_2 + (D~(2))^2`.
    pub k_tilde: f64,
    /// `sum_{t=1..n-k} Q~_t` (bounded by the chosen method).
    pub sum_q: f64,
}

/// Result of minimizing the bound over the truncation level.
#[derive(Debug, Clone, PartialEq)]
pub struct MStarResult {
    /// The minimizing truncation level (smallest index on ties).
    pub m_star: u32,
    /// The bound at `m_star`.
    pub breakdown: BoundBreakdown,
    /// True when the minimum sat on the scan boundary `m_star = m_max`,
    /// i.e. the stopping rule was violated and `m_max` should be raised.
    pub hit_m_max: bool,
}

/// Evaluates the stationary bound at one `(m, k, n)`.
pub fn bound_stationary(
    model: &Ar1Model,
    m: u32,
    k: u32,
    n: u64,
    q_method: QMethod,
) -> Result<BoundBreakdown> {
    let tables = match q_method {
        QMethod::Method2 => Some(QTables::new(model.mdep(m), k)),
        QMethod::Method1 => None,
    };
    bound_with_tables(model, m, k, n, q_method, tables.as_ref())
}

fn bound_with_tables(
    model: &Ar1Model,
    m: u32,
    k: u32,
    n: u64,
    q_method: QMethod,
    tables: Option<&QTables>,
) -> Result<BoundBreakdown> {
    if n <= k as u64 {
        return Err(Error::argument("bound requires n > k"));
    }
    let approx = model.mdep(m);
    let sqrt_n = math::sqrt(n as f64);
    let nk = (n - k as u64) as f64;

    let gamma_k = model.gamma(k as i64);
    let term1 = k as f64 / sqrt_n * math::abs(gamma_k);

    let sigma = sigma_asymptotic(model, k);
    let st = sigma_tilde(&approx, k, n)?;
    if !(sigma > 0.0) || !(st > 0.0) {
        return Err(Error::precondition("Sigma and Sigma~ must be positive"));
    }
    let term2 = math::sqrt(2.0 / (core::f64::consts::PI * sigma)) * math::abs(sigma - st);

    let d2 = approx.mdep_error(2)?;
    let x2 = math::sqrt(model.gamma(0));
    let k_tilde = 2.0 * d2 * x2 + d2 * d2;
    let term3 = 2.0 * nk / sqrt_n * k_tilde;

    let sum_q = match q_method {
        QMethod::Method1 => nk * q_bound_method1(m, k, approx.moment_y(6)?),
        QMethod::Method2 => tables.expect("tables built for method 2").sum_q_method2(n)?,
    };
    let ns = n as f64 * st;
    let term4 = 2.0 / (ns * math::sqrt(ns)) * sum_q;

    Ok(BoundBreakdown {
        m,
        k,
        n,
        q_method,
        term1,
        term2,
        term3,
        term4,
        total: term1 + term2 + term3 + term4,
        gamma_k,
        sigma,
        sigma_tilde: st,
        k_tilde,
        sum_q,
    })
}

/// Minimizes the bound over `m = 0..=m_max` for one segment length.
pub fn optimize_m(
    model: &Ar1Model,
    k: u32,
    n: u64,
    m_max: u32,
    q_method: QMethod,
) -> Result<MStarResult> {
    let mut results = grid_optimize(model, k, &[n], m_max, q_method)?;
    Ok(results.pop().expect("one result per n"))
}

/// Minimizes the bound over `m = 0..=m_max` for several segment lengths at
/// once, building each cumulant table once per `m` and sharing it across the
/// lengths.  Returns one result per entry of `ns`, in order.
pub fn grid_optimize(
    model: &Ar1Model,
    k: u32,
    ns: &[u64],
    m_max: u32,
    q_method: QMethod,
) -> Result<Vec<MStarResult>> {
    let mut best: Vec<Option<MStarResult>> = vec![None; ns.len()];
    for m in 0..=m_max {
        let tables = match q_method {
            QMethod::Method2 => Some(QTables::new(model.mdep(m), k)),
            QMethod::Method1 => None,
        };
        for (i, &n) in ns.iter().enumerate() {
            let b = bound_with_tables(model, m, k, n, q_method, tables.as_ref())?;
            let better = match &best[i] {
                Some(prev) => b.total < prev.breakdown.total,
                None => true,
            };
            if better {
                best[i] = Some(MStarResult {
                    m_star: m,
                    breakdown: b,
                    hit_m_max: m == m_max,
                });
            }
        }
    }
    Ok(best.into_iter().map(|r| r.expect("m scan nonempty")).collect())
}

/// Per-position inputs for the non-stationary bound.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralBoundInputs {
    /// Segment length.
    pub n: u64,
    /// Lag.
    pub k: u32,
    /// The centering constant `gamma` (any real).
    pub gamma: f64,
    /// Target variance `sigma^2 > 0` of the normal comparison law.
    pub sigma2: f64,
    /// Variance `Sigma~ > 0` of the truncated statistic.
    pub sigma_tilde: f64,
    /// `K~_t`, length `n - k`.
    pub k_t: Vec<f64>,
    /// `E[Y_a(t+k) Y_b(t)]`, length `n - k`.
    pub mean_y: Vec<f64>,
    /// Bounds on `Q~_t`, length `n - k`.
    pub q_t: Vec<f64>,
}

/// The non-stationary bound:
///
/// ```text
/// n^{-1/2} sum K~_t + n^{-1/2} sum |n/(n-k) gamma - E[Y_a(t+k) Y_b(t)]|
///   + sqrt(2/(pi sigma^2)) |sigma^2 - Sigma~|
///   + 2 n^{-3/2} Sigma~^{-3/2} sum Q~_t
/// ```
pub fn bound_nonstationary(inputs: &GeneralBoundInputs) -> Result<f64> {
    if inputs.n <= inputs.k as u64 {
        return Err(Error::argument("bound requires n > k"));
    }
    let nk = (inputs.n - inputs.k as u64) as usize;
    if inputs.k_t.len() != nk || inputs.mean_y.len() != nk || inputs.q_t.len() != nk {
        return Err(Error::argument("per-position inputs must have length n - k"));
    }
    if !(inputs.sigma2 > 0.0) || !(inputs.sigma_tilde > 0.0) {
        return Err(Error::precondition("sigma2 and sigma_tilde must be positive"));
    }
    let n = inputs.n as f64;
    let sqrt_n = math::sqrt(n);
    let centered = n / nk as f64 * inputs.gamma;

    let t1 = inputs.k_t.iter().sum::<f64>() / sqrt_n;
    let t2 = inputs
        .mean_y
        .iter()
        .map(|&ey| math::abs(centered - ey))
        .sum::<f64>()
        / sqrt_n;
    let t3 = math::sqrt(2.0 / (core::f64::consts::PI * inputs.sigma2))
        * math::abs(inputs.sigma2 - inputs.sigma_tilde);
    let st = inputs.sigma_tilde;
    let t4 = 2.0 / (n * sqrt_n * st * math::sqrt(st)) * inputs.q_t.iter().sum::<f64>();
    Ok(t1 + t2 + t3 + t4)
}

/// The index family `Lambda_p`: all 0/1 tuples of length `p` with at least
/// one 1, enumerated as the displayed union
/// `{1} x {0,1}^{p-1}  u  U_j {0}^{j-1} x {1} x {0,1}^{p-j}  u  {0}^{p-1} x {1}`.
pub fn lambda_set(p: u32) -> Result<Vec<Vec<u8>>> {
    if p == 0 || p > 8 {
        return Err(Error::argument("lambda_set requires p in 1..=8"));
    }
    let p = p as usize;
    let mut out = Vec::new();
    for j in 1..=p {
        // leading zeros, then a 1 at position j, then free tail bits
        let tail = p - j;
        for bits in 0..(1u32 << tail) {
            let mut tuple = vec![0u8; p];
            tuple[j - 1] = 1;
            for i in 0..tail {
                tuple[j + i] = ((bits >> (tail - 1 - i)) & 1) as u8;
            }
            out.push(tuple);
        }
    }
    Ok(out)
}

/// Product bound `K~_p^(alpha) = sum_{l in Lambda_p} prod_i D_i^{l_i} X_i^{1-l_i}`
/// for the approximation error of p-fold products.
///
/// `d` holds the approximation errors `D~_{a_i}^{(alpha p)}` and `x` the
/// norms `||X_{a_i}(0)||_{alpha p}`; which `alpha` those were computed at is
/// the caller's contract (the sum itself does not depend on it).
pub fn k_alpha_p(d: &[f64], x: &[f64], alpha: f64) -> Result<f64> {
    if d.len() != x.len() || d.is_empty() {
        return Err(Error::argument("d and x must have equal nonzero length"));
    }
    if !(alpha >= 1.0) {
        return Err(Error::argument("k_alpha_p requires alpha >= 1"));
    }
    let mut sum = 0.0;
    for tuple in lambda_set(d.len() as u32)? {
        let mut prod = 1.0;
        for (i, &l) in tuple.iter().enumerate() {
            prod *= if l == 1 { d[i] } else { x[i] };
        }
        sum += prod;
    }
    Ok(sum)
}

/// The factor `F~` controlling `|Sigma~ - n var(gamma_hat)|`:
///
/// ```text
/// F~ = |gamma(k)| (x2a + x2b + min(d2a, d2b))
///      + 1/2 max(d2a, d2b) (x2a + x2b + min(d2a, d2b))^2
///      + (x4a + d4a)(x4b + d4b)(x4a + x4b + d4a + d4b)
/// ```
#[allow(clippy::too_many_arguments)]
pub fn f_tilde(
    gamma_k: f64,
    x2a: f64,
    x2b: f64,
    x4a: f64,
    x4b: f64,
    d2a: f64,
    d2b: f64,
    d4a: f64,
    d4b: f64,
) -> f64 {
    let base = x2a + x2b + d2a.min(d2b);
    math::abs(gamma_k) * base
        + 0.5 * d2a.max(d2b) * base * base
        + (x4a + d4a) * (x4b + d4b) * (x4a + x4b + d4a + d4b)
}

/// Bound on `|Q_t - Q~_t|`, the error from replacing the truncated process
/// by the original one in the Stein term:
///
/// ```text
/// K2^(3) (|A_t||B_t| + |A_t|^2/2) C1 + K2^(2) |A_t||B_t| C2 + K2^(1) |B_t| C3
/// ```
///
/// with `C1 = 6 (2 x6a x6b + K2^(3))^2 + 2 (K2^(3))^2`,
/// `C2 = 8 (2 x4a x4b + K2^(2)) (x2a x2b + K2^(1))` and `C3 = 2 |c3_sum|`,
/// where `c3_sum = sum_{j in A_t} E[Z(t) Z(j)]` is supplied by the caller.
#[allow(clippy::too_many_arguments)]
pub fn q_diff_bound(
    k2_1: f64,
    k2_2: f64,
    k2_3: f64,
    x2a: f64,
    x2b: f64,
    x4a: f64,
    x4b: f64,
    x6a: f64,
    x6b: f64,
    a_size: u64,
    b_size: u64,
    c3_sum: f64,
) -> f64 {
    let c1 = 6.0 * {
        let t = 2.0 * x6a * x6b + k2_3;
        t * t
    } + 2.0 * k2_3 * k2_3;
    let c2 = 8.0 * (2.0 * x4a * x4b + k2_2) * (x2a * x2b + k2_1);
    let c3 = 2.0 * math::abs(c3_sum);
    let (a, b) = (a_size as f64, b_size as f64);
    k2_3 * (a * b + 0.5 * a * a) * c1 + k2_2 * a * b * c2 + k2_1 * b * c3
}

/// Bound on the Wasserstein distance between the empirically-centered and
/// population-centered statistics, specialized to the univariate model:
///
/// ```text
/// n^{-1/2} S0 + k n^{-3/2} (S0 + S1/n)
/// ```
///
/// with `S0 = sum_u |gamma(u)| = kappa_2 (1+|a|) / ((1-a^2)(1-|a|))` and
/// `S1 = sum_u |u| |gamma(u)| = 2 gamma(0) |a| / (1-|a|)^2`.
pub fn noncentered_correction(model: &Ar1Model, k: u32, n: u64) -> f64 {
    let a = math::abs(model.alpha());
    let g0 = model.gamma(0);
    let s0 = g0 * (1.0 + a) / (1.0 - a);
    let s1 = 2.0 * g0 * a / ((1.0 - a) * (1.0 - a));
    let n = n as f64;
    let sqrt_n = math::sqrt(n);
    s0 / sqrt_n + k as f64 / (n * sqrt_n) * (s0 + s1 / n)
}
