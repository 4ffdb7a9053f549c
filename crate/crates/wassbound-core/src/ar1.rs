//! Closed-form moments and cumulants for the causal AR(1) process and its
//! m-dependent truncation.
//!
//! The process is `X(t) = alpha X(t-1) + eps(t) = sum_{j>=0} alpha^j eps(t-j)`
//! with `|alpha| < 1`; the m-dependent approximation keeps the first `m + 1`
//! moving-average terms, `Y(t) = sum_{j=0..m} alpha^j eps(t-j)`.
//!
//! Joint cumulants of linear forms in i.i.d. innovations collapse to a single
//! geometric sum.  With `M = min(u_i)`, `R = max(u_i) - M` and
//! `S = sum(u_i - M)`:
//!
//! ```text
//! cum(Y(u_1), .., Y(u_p)) = kappa_p alpha^S (1 - alpha^{p(m-R+1)}) / (1 - alpha^p),  R <= m
//!                         = 0,                                                       R > m
//! cum(X(u_1), .., X(u_p)) = kappa_p alpha^S / (1 - alpha^p)
//! ```
//!
//! with the convention `0^0 = 1` covering `alpha = 0`.  Moment formulas are
//! the usual sums over set partitions with a cumulant factor per block; only
//! even block sizes survive because odd innovation cumulants vanish.

use crate::error::Error;
use crate::innovations::InnovationModel;
use crate::math;
use crate::partitions::even_set_partitions;
use crate::Result;

/// A causal AR(1) model `X(t) = alpha X(t-1) + eps(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Model {
    alpha: f64,
    innovations: InnovationModel,
}

impl Ar1Model {
    /// Creates a model; requires `|alpha| < 1`.
    pub fn new(alpha: f64, innovations: InnovationModel) -> Result<Self> {
        if !(alpha.abs() < 1.0) {
            return Err(Error::argument("AR(1) requires |alpha| < 1"));
        }
        Ok(Ar1Model { alpha, innovations })
    }

    /// The autoregressive coefficient.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The innovation distribution.
    pub fn innovations(&self) -> &InnovationModel {
        &self.innovations
    }

    /// The m-dependent truncation of this model.
    pub fn mdep(&self, m: u32) -> MDepApprox {
        MDepApprox { model: *self, m }
    }

    /// Autocovariance `gamma(k) = alpha^|k| kappa_2 / (1 - alpha^2)`.
    pub fn gamma(&self, k: i64) -> f64 {
        let kappa2 = self.innovations.cumulants()[2];
        math::powi(self.alpha, k.unsigned_abs() as u32) * kappa2 / (1.0 - self.alpha * self.alpha)
    }

    /// `E[(X(t+k) X(t))^q]` for `q` in `1..=4`.
    ///
    /// For `alpha != 0` this is `alpha^{q|k|}` times the partition sum of
    /// `kappa_|b| / (1 - alpha^|b|)` over even-block partitions of `2q`
    /// elements; `alpha = 0` degenerates to `E[eps^{2q}]` at lag zero and
    /// `(E[eps^q])^2` otherwise.
    pub fn lag_product_moment(&self, k: i64, q: u32) -> Result<f64> {
        if q == 0 || q > 4 {
            return Err(Error::argument("lag product moment requires q in 1..=4"));
        }
        let kappas = self.innovations.cumulants();
        if self.alpha == 0.0 && k != 0 {
            let half = moment_from_cumulants(&kappas, q as usize)?;
            return Ok(half * half);
        }
        let mut sum = 0.0;
        for p in even_set_partitions(2 * q as usize)? {
            let mut prod = 1.0;
            for b in p.blocks() {
                let s = b.len() as u32;
                prod *= kappas[s as usize] / (1.0 - math::powi(self.alpha, s));
                if prod == 0.0 {
                    break;
                }
            }
            sum += prod;
        }
        Ok(math::powi(self.alpha, q * k.unsigned_abs() as u32) * sum)
    }

    /// Joint cumulant `cum(X(u_1), .., X(u_p))` for `p = times.len()` in
    /// `2..=8`.
    pub fn cum_x(&self, times: &[i64]) -> Result<f64> {
        let (p, s, _r) = time_stats(times)?;
        let kappa = self.innovations.cumulants()[p as usize];
        if kappa == 0.0 {
            return Ok(0.0);
        }
        Ok(kappa * math::powi(self.alpha, s) / (1.0 - math::powi(self.alpha, p)))
    }
}

/// The m-dependent moving-average truncation `Y(t)` of an AR(1) model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MDepApprox {
    /// The underlying AR(1) model.
    pub model: Ar1Model,
    /// Truncation level; `Y(t)` is m-dependent by construction.
    pub m: u32,
}

impl MDepApprox {
    /// `||X(0) - Y(0)||_q` for even `q` in `{2, 4, 6, 8}`:
    /// `|alpha|^{m+1}` times the q-th root of the partition sum of
    /// `kappa_|b| / (1 - alpha^|b|)`.
    pub fn mdep_error(&self, q: u32) -> Result<f64> {
        check_even_order(q)?;
        let alpha = self.model.alpha;
        let kappas = self.model.innovations.cumulants();
        let mut sum = 0.0;
        for p in even_set_partitions(q as usize)? {
            let mut prod = 1.0;
            for b in p.blocks() {
                let s = b.len() as u32;
                prod *= kappas[s as usize] / (1.0 - math::powi(alpha, s));
                if prod == 0.0 {
                    break;
                }
            }
            sum += prod;
        }
        Ok(math::powi(alpha.abs(), self.m + 1) * math::powf(sum, 1.0 / q as f64))
    }

    /// Joint cumulant `cum(Y(u_1), .., Y(u_p))`; zero whenever the time
    /// spread exceeds `m`.
    pub fn cum_y(&self, times: &[i64]) -> Result<f64> {
        let (p, s, r) = time_stats(times)?;
        if r > self.m as u64 {
            return Ok(0.0);
        }
        let kappa = self.model.innovations.cumulants()[p as usize];
        if kappa == 0.0 {
            return Ok(0.0);
        }
        let alpha = self.model.alpha;
        let reach = p * (self.m - r as u32 + 1);
        Ok(kappa * math::powi(alpha, s) * (1.0 - math::powi(alpha, reach))
            / (1.0 - math::powi(alpha, p)))
    }

    /// `E[Y(0)^q]` for even `q <= 8`, the partition sum of
    /// `kappa_|b| (1 - alpha^{|b|(m+1)}) / (1 - alpha^|b|)`.
    pub fn moment_y(&self, q: u32) -> Result<f64> {
        check_even_order(q)?;
        let alpha = self.model.alpha;
        let kappas = self.model.innovations.cumulants();
        let mut sum = 0.0;
        for p in even_set_partitions(q as usize)? {
            let mut prod = 1.0;
            for b in p.blocks() {
                let s = b.len() as u32;
                prod *= kappas[s as usize] * (1.0 - math::powi(alpha, s * (self.m + 1)))
                    / (1.0 - math::powi(alpha, s));
                if prod == 0.0 {
                    break;
                }
            }
            sum += prod;
        }
        Ok(sum)
    }
}

fn check_even_order(q: u32) -> Result<()> {
    if q == 0 || q > 8 || q % 2 != 0 {
        return Err(Error::argument("order must be even and in 2..=8"));
    }
    Ok(())
}

/// `(p, S, R)` of a time vector: length, shifted sum, and spread.
fn time_stats(times: &[i64]) -> Result<(u32, u32, u64)> {
    let p = times.len();
    if !(2..=8).contains(&p) {
        return Err(Error::argument("cumulant order must be in 2..=8"));
    }
    let min = *times.iter().min().expect("nonempty");
    let max = *times.iter().max().expect("nonempty");
    let s: u64 = times.iter().map(|&t| (t - min) as u64).sum();
    Ok((p as u32, s as u32, (max - min) as u64))
}

/// `E[eps^s]` from innovation cumulants via even-block partitions of `s`
/// elements (zero for odd `s`).
fn moment_from_cumulants(kappas: &[f64; 9], s: usize) -> Result<f64> {
    if s % 2 == 1 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for p in even_set_partitions(s)? {
        let mut prod = 1.0;
        for b in p.blocks() {
            prod *= kappas[b.len()];
        }
        sum += prod;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(alpha: f64) -> Ar1Model {
        Ar1Model::new(alpha, InnovationModel::standard_normal()).unwrap()
    }

    fn t9(alpha: f64) -> Ar1Model {
        Ar1Model::new(alpha, InnovationModel::scaled_student_t(9.0).unwrap()).unwrap()
    }

    #[test]
    fn causality_is_enforced() {
        assert!(Ar1Model::new(1.0, InnovationModel::standard_normal()).is_err());
        assert!(Ar1Model::new(-1.0, InnovationModel::standard_normal()).is_err());
        assert!(Ar1Model::new(0.999, InnovationModel::standard_normal()).is_ok());
    }

    #[test]
    fn gamma_closed_forms() {
        assert_eq!(normal(0.0).gamma(1), 0.0);
        assert!((normal(0.5).gamma(0) - 4.0 / 3.0).abs() < 1e-15);
        assert!((normal(0.7).gamma(2) - 0.49 / 0.51).abs() < 1e-15);
    }

    #[test]
    fn gamma_recursion_and_symmetry() {
        let m = t9(0.6);
        for k in 1..6 {
            assert!((m.gamma(k) - 0.6 * m.gamma(k - 1)).abs() < 1e-14);
            assert!((m.gamma(k) - m.gamma(-k)).abs() < 1e-15);
        }
    }

    #[test]
    fn lag_product_moment_examples() {
        // q = 1 agrees with gamma(k)
        for model in [normal(0.5), t9(0.3)] {
            for k in 0..4 {
                assert!(
                    (model.lag_product_moment(k, 1).unwrap() - model.gamma(k)).abs() < 1e-14
                );
            }
        }
        // white noise special cases
        assert!((normal(0.0).lag_product_moment(1, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((normal(0.0).lag_product_moment(0, 2).unwrap() - 3.0).abs() < 1e-15);
        assert!(normal(0.5).lag_product_moment(0, 5).is_err());
        assert!(normal(0.5).lag_product_moment(0, 0).is_err());
    }

    #[test]
    fn lag_product_moment_printed_forms() {
        // compare the partition sum against the expanded displays at k = 0
        let model = t9(0.4);
        let a = model.alpha();
        let k = model.innovations().cumulants();
        let c2 = k[2] / (1.0 - a.powi(2));
        let c4 = k[4] / (1.0 - a.powi(4));
        let c6 = k[6] / (1.0 - a.powi(6));
        let c8 = k[8] / (1.0 - a.powi(8));
        let q2 = c4 + 3.0 * c2 * c2;
        let q3 = c6 + 15.0 * c4 * c2 + 15.0 * c2.powi(3);
        let q4 = c8 + 28.0 * c6 * c2 + 35.0 * c4 * c4 + 210.0 * c4 * c2 * c2 + 105.0 * c2.powi(4);
        assert!((model.lag_product_moment(0, 2).unwrap() - q2).abs() < 1e-12 * q2);
        assert!((model.lag_product_moment(0, 3).unwrap() - q3).abs() < 1e-12 * q3);
        assert!((model.lag_product_moment(0, 4).unwrap() - q4).abs() < 1e-12 * q4);
    }

    #[test]
    fn mdep_error_examples() {
        assert_eq!(normal(0.0).mdep(5).mdep_error(4).unwrap(), 0.0);
        let e = normal(0.5).mdep(2).mdep_error(2).unwrap();
        assert!((e - 0.125 * (4.0f64 / 3.0).sqrt()).abs() < 1e-15, "{e}");
        let e4 = normal(0.5).mdep(0).mdep_error(4).unwrap();
        let expect = 0.5 * (3.0 * (4.0f64 / 3.0) * (4.0 / 3.0)).powf(0.25);
        assert!((e4 - expect).abs() < 1e-15, "{e4} vs {expect}");
        assert!((e4 - 0.759836).abs() < 1e-6);
    }

    #[test]
    fn mdep_error_printed_forms() {
        // q = 2, 4, 8 displays against the generic partition sum
        let approx = t9(0.6).mdep(3);
        let a: f64 = 0.6;
        let k = approx.model.innovations().cumulants();
        let c2 = k[2] / (1.0 - a.powi(2));
        let c4 = k[4] / (1.0 - a.powi(4));
        let c6 = k[6] / (1.0 - a.powi(6));
        let c8 = k[8] / (1.0 - a.powi(8));
        let d2 = a.powi(4) * c2.sqrt();
        let d4 = a.powi(4) * (c4 + 3.0 * c2 * c2).powf(0.25);
        let d8 = a.powi(4)
            * (c8 + 28.0 * c6 * c2 + 35.0 * c4 * c4 + 210.0 * c4 * c2 * c2 + 105.0 * c2.powi(4))
                .powf(0.125);
        assert!((approx.mdep_error(2).unwrap() - d2).abs() < 1e-14);
        assert!((approx.mdep_error(4).unwrap() - d4).abs() < 1e-14);
        assert!((approx.mdep_error(8).unwrap() - d8).abs() < 1e-13);
        assert!(approx.mdep_error(3).is_err());
        assert!(approx.mdep_error(10).is_err());
    }

    #[test]
    fn mdep_error_decays_geometrically() {
        let model = t9(-0.45);
        for q in [2, 4, 6, 8] {
            let e0 = model.mdep(0).mdep_error(q).unwrap();
            for m in 1..6 {
                let e = model.mdep(m).mdep_error(q).unwrap();
                assert!((e / e0 - 0.45f64.powi(m as i32)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn cum_y_examples() {
        let approx = t9(0.5).mdep(3);
        // spread beyond m vanishes
        assert_eq!(approx.cum_y(&[0, approx.m as i64 + 1]).unwrap(), 0.0);
        // variance of Y(0)
        let v = approx.cum_y(&[0, 0]).unwrap();
        let expect = (1.0 - 0.5f64.powi(8)) / (1.0 - 0.25);
        assert!((v - expect).abs() < 1e-15);
        // iid limit: all-equal times give kappa_p
        let iid = t9(0.0).mdep(4);
        assert!((iid.cum_y(&[3, 3, 3, 3]).unwrap() - 1.2).abs() < 1e-15);
        assert!(approx.cum_y(&[0]).is_err());
        assert!(approx.cum_y(&[0; 9]).is_err());
    }

    #[test]
    fn cum_x_examples() {
        let model = normal(0.5);
        assert!((model.cum_x(&[0, 0]).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(normal(0.0).cum_x(&[0, 1]).unwrap(), 0.0);
        // large-m truncation converges to the untruncated process
        let approx = t9(0.5).mdep(200);
        for times in [&[0i64, 2][..], &[1, 0, 2, 1], &[0, 0, 0, 0, 0, 0]] {
            let x = t9(0.5).cum_x(times).unwrap();
            let y = approx.cum_y(times).unwrap();
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300), "{times:?}");
        }
    }

    #[test]
    fn moment_y_examples() {
        assert!((normal(0.0).mdep(7).moment_y(6).unwrap() - 15.0).abs() < 1e-12);
        assert!((t9(0.0).mdep(1).moment_y(4).unwrap() - 4.2).abs() < 1e-14);
        let m200 = normal(0.5).mdep(200).moment_y(2).unwrap();
        assert!((m200 - normal(0.5).gamma(0)).abs() < 1e-12);
        assert!(normal(0.1).mdep(0).moment_y(3).is_err());
    }

    #[test]
    fn closed_forms_even_in_alpha() {
        for a in [0.25, 0.6] {
            let pos = t9(a);
            let neg = t9(-a);
            for k in [0i64, 2, 4] {
                assert_eq!(pos.gamma(k), neg.gamma(k));
                assert_eq!(
                    pos.lag_product_moment(k, 2).unwrap(),
                    neg.lag_product_moment(k, 2).unwrap()
                );
            }
            for q in [2, 4, 6, 8] {
                assert_eq!(
                    pos.mdep(2).mdep_error(q).unwrap(),
                    neg.mdep(2).mdep_error(q).unwrap()
                );
                assert_eq!(pos.mdep(3).moment_y(q).unwrap(), neg.mdep(3).moment_y(q).unwrap());
            }
            // even shifted sum S
            assert_eq!(
                pos.mdep(3).cum_y(&[0, 2]).unwrap(),
                neg.mdep(3).cum_y(&[0, 2]).unwrap()
            );
        }
    }
}
