//! Monte Carlo estimation of the true Wasserstein-1 distance between the
//! scaled empirical autocovariance and its Gaussian limit.
//!
//! On the real line the Wasserstein-1 distance is the integral of
//! `|F^{-1}(u) - G^{-1}(u)|` over `(0,1)`.  Replacing `F` by the empirical
//! distribution of `R` simulated copies `Z_1..Z_R` of the statistic and
//! integrating the normal quantile over each `1/R` cell at its midpoint
//! gives the estimator
//!
//! ```text
//! W_hat = 1/R sum_r | Z_(r) - sqrt(Sigma(k)) Phi^{-1}((2r-1)/(2R)) |
//! ```
//!
//! whose sampling error is `O_P(R^{-1/2})` plus an `O(R^{-1})` discretization
//! term.  `B` independent replicates are averaged to reduce the variance;
//! each replicate runs on its own (seed, stream) substream so results do not
//! depend on scheduling.

use alloc::vec::Vec;

use crate::ar1::Ar1Model;
use crate::error::Error;
use crate::innovations::{RngHandle, Sampler};
use crate::math;
use crate::variance::sigma_asymptotic;
use crate::Result;

/// Monte Carlo estimate of the Wasserstein-1 distance.
#[derive(Debug, Clone, PartialEq)]
pub struct W1Estimate {
    /// The per-replicate estimates, in replicate order (length `B`).
    pub per_replicate: Vec<f64>,
    /// Average of the replicates.
    pub mean: f64,
    /// Sample standard deviation over replicates (denominator `B - 1`;
    /// reported as 0 when `B = 1`).
    pub sd: f64,
    /// Simulated statistics per replicate.
    pub r: u64,
    /// Number of replicates.
    pub b: u32,
    /// Experiment seed; replicate `i` runs on stream `i`.
    pub seed: u64,
}

/// Number of warm-up steps discarded so the recursion starts within
/// `2^-52` of stationarity: `ceil(max(100, 52 / -log2 |alpha|))`.
pub fn burn_in(alpha: f64) -> u64 {
    if alpha == 0.0 {
        return 100;
    }
    let rate = -math::ln(math::abs(alpha)) / core::f64::consts::LN_2;
    let steps = 52.0 / rate.max(1e-12);
    let v = if steps > 100.0 { steps } else { 100.0 };
    // ceil without std
    let t = v as u64;
    if t as f64 >= v {
        t
    } else {
        t + 1
    }
}

/// Simulates one AR(1) path of length `n`, deterministic given the handle.
///
/// The recursion starts at zero and a burn-in prefix is discarded, leaving
/// the marginal law within double-precision rounding of stationarity.
pub fn simulate_ar1(model: &Ar1Model, n: u64, rng: &RngHandle) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::argument("path length must be positive"));
    }
    let mut sampler = Sampler::new(*model.innovations(), rng);
    let mut out = Vec::with_capacity(n as usize);
    simulate_into(model.alpha(), &mut sampler, n as usize, &mut out);
    Ok(out)
}

fn simulate_into(alpha: f64, sampler: &mut Sampler, n: usize, out: &mut Vec<f64>) {
    out.clear();
    let mut x = 0.0;
    for _ in 0..burn_in(alpha) {
        x = alpha * x + sampler.draw();
    }
    for _ in 0..n {
        x = alpha * x + sampler.draw();
        out.push(x);
    }
}

/// The scaled deviation `sqrt(n) (1/n sum_{t=1..n-k} x(t+k) x(t) - gamma)`.
pub fn statistic(x: &[f64], k: u32, gamma: f64) -> Result<f64> {
    let n = x.len();
    if k as usize >= n {
        return Err(Error::argument("statistic requires k <= n - 1"));
    }
    let mut acc = 0.0;
    for i in 0..n - k as usize {
        acc += x[i + k as usize] * x[i];
    }
    Ok(math::sqrt(n as f64) * (acc / n as f64 - gamma))
}

/// Inverse standard normal CDF, absolute error below 1e-9 across
/// `[1e-300, 1 - 1e-300]` (Wichura's AS 241 rational approximation,
/// PPND16 grade).
pub fn normal_quantile(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::argument("normal_quantile requires u in (0, 1)"));
    }
    let q = u - 0.5;
    if math::abs(q) <= 0.425 {
        let r = 0.180625 - q * q;
        return Ok(q * horner(r, &CENTRAL_NUM) / horner(r, &CENTRAL_DEN));
    }
    let tail = if q < 0.0 { u } else { 1.0 - u };
    let r = math::sqrt(-math::ln(tail));
    let v = if r <= 5.0 {
        let r = r - 1.6;
        horner(r, &MIDDLE_NUM) / horner(r, &MIDDLE_DEN)
    } else {
        let r = r - 5.0;
        horner(r, &FAR_NUM) / horner(r, &FAR_DEN)
    };
    Ok(if q < 0.0 { -v } else { v })
}

fn horner(x: f64, coeffs: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs {
        acc = acc * x + c;
    }
    acc
}

// AS 241 coefficients, highest power first.
const CENTRAL_NUM: [f64; 8] = [
    2.5090809287301226727e3,
    3.3430575583588128105e4,
    6.7265770927008700853e4,
    4.5921953931549871457e4,
    1.3731693765509461125e4,
    1.9715909503065514427e3,
    1.3314166789178437745e2,
    3.3871328727963666080e0,
];
const CENTRAL_DEN: [f64; 8] = [
    5.2264952788528545610e3,
    2.8729085735721942674e4,
    3.9307895800092710610e4,
    2.1213794301586595867e4,
    5.3941960214247511077e3,
    6.8718700749205790830e2,
    4.2313330701600911252e1,
    1.0,
];
const MIDDLE_NUM: [f64; 8] = [
    7.74545014278341407640e-4,
    2.27238449892691845833e-2,
    2.41780725177450611770e-1,
    1.27045825245236838258e0,
    3.64784832476320460504e0,
    5.76949722146069140550e0,
    4.63033784615654529590e0,
    1.42343711074968357734e0,
];
const MIDDLE_DEN: [f64; 8] = [
    1.05075007164441684324e-9,
    5.47593808499534494600e-4,
    1.51986665636164571966e-2,
    1.48103976427480074590e-1,
    6.89767334985100004550e-1,
    1.67638483018380384940e0,
    2.05319162663775882187e0,
    1.0,
];
const FAR_NUM: [f64; 8] = [
    2.01033439929228813265e-7,
    2.71155556874348757815e-5,
    1.24266094738807843860e-3,
    2.65321895265761230930e-2,
    2.96560571828504891230e-1,
    1.78482653991729133580e0,
    5.46378491116411436990e0,
    6.65790464350110377720e0,
];
const FAR_DEN: [f64; 8] = [
    2.04426310338993978564e-15,
    1.42151175831644588870e-7,
    1.84631831751005468180e-5,
    7.86869131145613259100e-4,
    1.48753612908506148525e-2,
    1.36929880922735805310e-1,
    5.99832206555887937690e-1,
    1.0,
];

/// Empirical Wasserstein-1 distance between `samples` and `N(0, sigma2)` by
/// midpoint quantile coupling.
///
/// Sorts the buffer in place; no second copy is made, so the 4-million
/// sample runs stay within one buffer.
pub fn w1_vs_normal(samples: &mut [f64], sigma2: f64) -> Result<f64> {
    let r = samples.len();
    if r < 2 {
        return Err(Error::argument("w1_vs_normal requires at least 2 samples"));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::argument("w1_vs_normal requires sigma2 > 0"));
    }
    samples.sort_unstable_by(f64::total_cmp);
    let sd = math::sqrt(sigma2);
    let rf = r as f64;
    let mut acc = 0.0;
    for (i, &z) in samples.iter().enumerate() {
        let u = (2 * i + 1) as f64 / (2.0 * rf);
        let q = sd * normal_quantile(u).expect("u strictly inside (0,1)");
        acc += math::abs(z - q);
    }
    Ok(acc / rf)
}

/// One replicate of the estimator on stream `stream`: simulates `r` paths,
/// forms the scaled statistics against `gamma(k)` and couples them to
/// `N(0, Sigma(k))`.
pub fn w1_replicate(
    model: &Ar1Model,
    k: u32,
    n: u64,
    r: u64,
    seed: u64,
    stream: u64,
) -> Result<f64> {
    if r < 2 {
        return Err(Error::argument("estimate_w1 requires R >= 2"));
    }
    if k as u64 >= n {
        return Err(Error::argument("estimate_w1 requires k < n"));
    }
    let gamma = model.gamma(k as i64);
    let sigma2 = sigma_asymptotic(model, k);
    let mut sampler = Sampler::new(*model.innovations(), &RngHandle::new(seed, stream));
    let mut path = Vec::with_capacity(n as usize);
    let mut stats = Vec::with_capacity(r as usize);
    for _ in 0..r {
        simulate_into(model.alpha(), &mut sampler, n as usize, &mut path);
        stats.push(statistic(&path, k, gamma)?);
    }
    w1_vs_normal(&mut stats, sigma2)
}

/// Monte Carlo estimate of the Wasserstein-1 distance between the law of the
/// scaled empirical autocovariance and its Gaussian limit.
///
/// Replicate `i` runs on substream `i`; the estimate is identical for any
/// parallel schedule that assigns whole replicates to workers.
pub fn estimate_w1(
    model: &Ar1Model,
    k: u32,
    n: u64,
    r: u64,
    b: u32,
    seed: u64,
) -> Result<W1Estimate> {
    if b == 0 {
        return Err(Error::argument("estimate_w1 requires B >= 1"));
    }
    let per_replicate: Vec<f64> = (0..b as u64)
        .map(|i| w1_replicate(model, k, n, r, seed, i))
        .collect::<Result<_>>()?;
    Ok(aggregate_w1(per_replicate, r, b, seed))
}

/// Combines per-replicate estimates (in replicate order) into a
/// [`W1Estimate`]; used by parallel drivers that compute replicates
/// elsewhere.
pub fn aggregate_w1(per_replicate: Vec<f64>, r: u64, b: u32, seed: u64) -> W1Estimate {
    let bf = per_replicate.len() as f64;
    let mean = per_replicate.iter().sum::<f64>() / bf;
    let sd = if per_replicate.len() > 1 {
        let ss = per_replicate.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>();
        math::sqrt(ss / (bf - 1.0))
    } else {
        0.0
    };
    W1Estimate {
        per_replicate,
        mean,
        sd,
        r,
        b,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::innovations::InnovationModel;

    fn normal(alpha: f64) -> Ar1Model {
        Ar1Model::new(alpha, InnovationModel::standard_normal()).unwrap()
    }

    #[test]
    fn burn_in_values() {
        assert_eq!(burn_in(0.0), 100);
        assert_eq!(burn_in(0.5), 100); // 52 / 1 = 52 < 100
        assert_eq!(burn_in(0.7), 102); // 52 / 0.51457 = 101.06
        assert_eq!(burn_in(-0.7), 102);
    }

    #[test]
    fn white_noise_path_equals_innovations() {
        let model = normal(0.0);
        let handle = RngHandle::new(9, 1);
        let path = simulate_ar1(&model, 50, &handle).unwrap();
        let draws = model.innovations().sample(&handle, 150);
        assert_eq!(&path[..], &draws[100..]);
    }

    #[test]
    fn paths_are_deterministic() {
        let model = Ar1Model::new(0.6, InnovationModel::scaled_student_t(9.0).unwrap()).unwrap();
        let a = simulate_ar1(&model, 40, &RngHandle::new(11, 2)).unwrap();
        let b = simulate_ar1(&model, 40, &RngHandle::new(11, 2)).unwrap();
        assert_eq!(a, b);
        let c = simulate_ar1(&model, 40, &RngHandle::new(11, 3)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn statistic_examples() {
        assert_eq!(statistic(&[0.0; 10], 0, 0.0).unwrap(), 0.0);
        let x = [3.0, 5.0];
        let got = statistic(&x, 1, 0.25).unwrap();
        let expect = 2.0f64.sqrt() * (15.0 / 2.0 - 0.25);
        assert!((got - expect).abs() < 1e-14);
        let got = statistic(&[1.0, 2.0, 3.0], 0, 0.0).unwrap();
        assert!((got - 3.0f64.sqrt() * 14.0 / 3.0).abs() < 1e-14);
        assert!(statistic(&[1.0, 2.0], 2, 0.0).is_err());
    }

    #[test]
    fn quantile_basic_values() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!((normal_quantile(0.975).unwrap() - 1.959964).abs() < 1e-6);
        assert!((normal_quantile(0.025).unwrap() + 1.959964).abs() < 1e-6);
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(-0.1).is_err());
    }

    #[test]
    fn quantile_is_odd_about_half() {
        // below u ~ 1e-6 the rounding of the input 1 - u itself moves the
        // quantile by more than the comparison tolerance; the oracle
        // round-trip test covers the far tails
        for &u in &[1e-6, 1e-4, 0.01, 0.2, 0.49] {
            let lo = normal_quantile(u).unwrap();
            let hi = normal_quantile(1.0 - u).unwrap();
            assert!((lo + hi).abs() < 1e-9 * hi.abs().max(1.0), "u={u}");
        }
    }

    #[test]
    fn w1_perfect_match_is_zero() {
        let r = 1000usize;
        let sigma2: f64 = 2.5;
        let mut samples: Vec<f64> = (0..r)
            .map(|i| sigma2.sqrt() * normal_quantile((2 * i + 1) as f64 / (2 * r) as f64).unwrap())
            .collect();
        // shuffle deterministically to exercise the internal sort
        samples.reverse();
        let w = w1_vs_normal(&mut samples, sigma2).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn w1_is_permutation_invariant() {
        let model = normal(0.3);
        let draws = model.innovations().sample(&RngHandle::new(5, 0), 400);
        let mut a = draws.clone();
        let mut b: Vec<f64> = draws.iter().rev().copied().collect();
        assert_eq!(
            w1_vs_normal(&mut a, 1.0).unwrap(),
            w1_vs_normal(&mut b, 1.0).unwrap()
        );
    }

    #[test]
    fn w1_validates_inputs() {
        assert!(w1_vs_normal(&mut [], 1.0).is_err());
        assert!(w1_vs_normal(&mut [1.0], 1.0).is_err());
        assert!(w1_vs_normal(&mut [1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn estimate_is_deterministic_and_sd_zero_for_single_replicate() {
        let model = normal(0.2);
        let a = estimate_w1(&model, 0, 10, 200, 3, 77).unwrap();
        let b = estimate_w1(&model, 0, 10, 200, 3, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_replicate.len(), 3);
        let single = estimate_w1(&model, 0, 10, 200, 1, 77).unwrap();
        assert_eq!(single.sd, 0.0);
        assert!(estimate_w1(&model, 10, 10, 200, 1, 77).is_err());
        assert!(estimate_w1(&model, 0, 10, 1, 1, 77).is_err());
        assert!(estimate_w1(&model, 0, 10, 200, 0, 77).is_err());
    }

    #[test]
    fn aggregate_matches_sequential() {
        let model = normal(0.4);
        let (k, n, r, b, seed) = (1u32, 12u64, 150u64, 4u32, 13u64);
        let seq = estimate_w1(&model, k, n, r, b, seed).unwrap();
        let reps: Vec<f64> = (0..b as u64)
            .map(|i| w1_replicate(&model, k, n, r, seed, i).unwrap())
            .collect();
        let agg = aggregate_w1(reps, r, b, seed);
        assert_eq!(seq, agg);
    }
}
