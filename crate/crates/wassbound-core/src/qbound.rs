//! Upper bounds for the Stein term `Q~_t`, the expectation controlling the
//! local-dependence normal approximation of `sum_t Z~(t)` with
//! `Z~(t) = Y(t+k) Y(t) - E[Y(t+k) Y(t)]`.
//!
//! Two bounds are provided.  Method 1 is the crude moment bound
//! `5/2 (4m + 4k + 1)^2 ||Y(0)||_6^6`, cheap and best for small `m`.
//! Method 2 applies Cauchy-Schwarz to the defining expectation and evaluates
//! every factor exactly from joint cumulants of `Y`:
//!
//! ```text
//! Q~_t <= (M1 + C~(0) M2a + M3^2)^{1/2} M2b^{1/2}
//!         + 1/2 (M1 + C~(0) M2a + 2 M3^2)^{1/2} M2a^{1/2}
//! ```
//!
//! with `M1` a double sum of the fourth-order cumulant function
//! `D~(u1, u2) = cum(Z~(0), Z~(0), Z~(u1), Z~(u2))`, `M2a`/`M2b`
//! Bartlett-weighted variances of window sums, and `M3` a window sum of
//! `C~`.  `D~` expands over the indecomposable partitions of a 4x2 table of
//! indices (cumulants-of-products theorem), which is where the partition
//! engine earns its keep.
//!
//! Evaluating the bound naively per `t` is quadratic in the window width, so
//! [`QTables`] precomputes `C~(u)` for `|u| <= 2(m+k)` and the `D~` grid for
//! `|u_i| <= m+k` once per `(model, m, k)` and serves every `t` from prefix
//! sums.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::ar1::MDepApprox;
use crate::error::Error;
use crate::math;
use crate::partitions::{cached_filtered, IndexedTable, Partition, PartitionFilter};
use crate::variance::c_tilde;
use crate::Result;

/// Tolerance below which a radicand that is a variance analytically is
/// treated as floating-point cancellation and clamped to zero.
const RADICAND_TOL: f64 = -1e-12;

/// Position-dependent context for one Stein summand.
#[derive(Debug, Clone, Copy)]
pub struct QTermContext {
    /// The m-dependent approximation in force.
    pub approx: MDepApprox,
    /// Lag of the autocovariance statistic.
    pub k: u32,
    /// Segment length.
    pub n: u64,
    /// Position, `1 <= t <= n - k`.
    pub t: u64,
}

impl QTermContext {
    /// Creates a context, validating `1 <= t <= n - k`.
    pub fn new(approx: MDepApprox, k: u32, n: u64, t: u64) -> Result<Self> {
        if n <= k as u64 {
            return Err(Error::argument("QTermContext requires n > k"));
        }
        if t == 0 || t > n - k as u64 {
            return Err(Error::argument("QTermContext requires 1 <= t <= n - k"));
        }
        Ok(QTermContext { approx, k, n, t })
    }

    fn window(&self, radius: i64) -> (i64, i64) {
        let t = self.t as i64;
        let nk = (self.n - self.k as u64) as i64;
        ((1 - t).max(-radius), (nk - t).min(radius))
    }

    /// The neighborhood `A_t = {l in 1..n-k : |l - t| <= m + k}`, returned as
    /// offsets `l - t` (inclusive bounds).
    pub fn a_window(&self) -> (i64, i64) {
        self.window(self.approx.m as i64 + self.k as i64)
    }

    /// The wider neighborhood `B_t` with radius `2(m + k)`, as offsets.
    pub fn b_window(&self) -> (i64, i64) {
        self.window(2 * (self.approx.m as i64 + self.k as i64))
    }
}

/// The four window statistics feeding the Method-2 bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MTerms {
    /// Double window sum of the fourth-order cumulant function `D~`.
    pub m1: f64,
    /// Bartlett-weighted variance of the `A_t` window sum.
    pub m2a: f64,
    /// Bartlett-weighted variance of the `B_t` window sum.
    pub m2b: f64,
    /// Window sum of `C~`, i.e. `E[Z~(t) Z~(A_t)]`.
    pub m3: f64,
}

/// Fourth-order cumulant function
/// `D~(u1, u2) = cum(Z~(0), Z~(0), Z~(u1), Z~(u2))`, expanded over
/// indecomposable partitions of the 4x2 table whose rows carry the times
/// `(k, 0), (k, 0), (u1+k, u1), (u2+k, u2)`.
///
/// Only even block sizes contribute for the supported innovation models, and
/// for Gaussian innovations only perfect matchings do, so the sum runs over
/// the 249- or 48-element cached lists accordingly.
pub fn d_tilde(approx: &MDepApprox, k: u32, u1: i64, u2: i64) -> f64 {
    // evaluate on the canonical order u1 <= u2 so the symmetry
    // D~(u1, u2) = D~(u2, u1) holds bit-exactly
    let (u1, u2) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
    let kappas = approx.model.innovations().cumulants();
    let parts = d_tilde_partitions(approx);
    let k = k as i64;
    let times = [k, 0, k, 0, u1 + k, u1, u2 + k, u2];
    d_tilde_from(&times, parts, approx.model.alpha(), approx.m, &kappas)
}

fn d_tilde_partitions(approx: &MDepApprox) -> &'static [Partition] {
    let table = IndexedTable::new(4, 2).expect("4x2 table");
    let filter = if approx.model.innovations().is_gaussian() {
        PartitionFilter::pairs()
    } else {
        PartitionFilter::even_min2()
    };
    cached_filtered(&table, &filter).expect("cached partition list")
}

fn d_tilde_from(
    times: &[i64; 8],
    parts: &'static [Partition],
    alpha: f64,
    m: u32,
    kappas: &[f64; 9],
) -> f64 {
    let mut sum = 0.0;
    'parts: for p in parts {
        let mut prod = 1.0;
        for block in p.blocks() {
            let c = cum_y_block(times, block, alpha, m, kappas);
            if c == 0.0 {
                continue 'parts;
            }
            prod *= c;
        }
        sum += prod;
    }
    sum
}

/// `cum(Y(times[b]) : b in block)` without per-call validation; the block
/// sizes come from the vetted partition lists.
fn cum_y_block(times: &[i64; 8], block: &[u8], alpha: f64, m: u32, kappas: &[f64; 9]) -> f64 {
    let p = block.len() as u32;
    let kappa = kappas[p as usize];
    if kappa == 0.0 {
        return 0.0;
    }
    let mut min = i64::MAX;
    let mut max = i64::MIN;
    for &c in block {
        let t = times[c as usize];
        min = min.min(t);
        max = max.max(t);
    }
    let r = (max - min) as u64;
    if r > m as u64 {
        return 0.0;
    }
    let mut s: u64 = 0;
    for &c in block {
        s += (times[c as usize] - min) as u64;
    }
    let reach = p * (m - r as u32 + 1);
    kappa * math::powi(alpha, s as u32) * (1.0 - math::powi(alpha, reach))
        / (1.0 - math::powi(alpha, p))
}

/// Precomputed `C~` and `D~` tables for one `(model, m, k)`, shared across
/// `t` and across segment lengths.
///
/// Immutable after construction; safe to share between threads.
#[derive(Debug, Clone)]
pub struct QTables {
    approx: MDepApprox,
    k: u32,
    /// window radius `m + k`
    w: i64,
    /// `C~(u)` for `u = 0..=2(m+k)` (symmetric in `u`)
    c: Vec<f64>,
    /// prefix sums of `C~` over `[-w, w]`: `cpre[i] = sum_{v <= i - w - 1}`
    cpre: Vec<f64>,
    /// `D~` on `[-w, w]^2`, row-major
    d: Vec<f64>,
    /// 2D prefix sums of `d`, `(2w+2) x (2w+2)`
    dpre: Vec<f64>,
}

impl QTables {
    /// Builds the tables for `(approx, k)`.
    pub fn new(approx: MDepApprox, k: u32) -> Self {
        let w = approx.m as i64 + k as i64;
        let side = (2 * w + 1) as usize;

        let c: Vec<f64> = (0..=2 * w).map(|u| c_tilde(&approx, k, u)).collect();

        let kappas = approx.model.innovations().cumulants();
        let parts = d_tilde_partitions(&approx);
        let alpha = approx.model.alpha();
        let m = approx.m;
        let kk = k as i64;
        let mut d = vec![0.0; side * side];
        for i in 0..side {
            let u1 = i as i64 - w;
            for j in i..side {
                let u2 = j as i64 - w;
                let times = [kk, 0, kk, 0, u1 + kk, u1, u2 + kk, u2];
                let v = d_tilde_from(&times, parts, alpha, m, &kappas);
                d[i * side + j] = v;
                d[j * side + i] = v; // D~(u1, u2) = D~(u2, u1)
            }
        }

        let mut dpre = vec![0.0; (side + 1) * (side + 1)];
        for i in 0..side {
            for j in 0..side {
                dpre[(i + 1) * (side + 1) + j + 1] = d[i * side + j]
                    + dpre[i * (side + 1) + j + 1]
                    + dpre[(i + 1) * (side + 1) + j]
                    - dpre[i * (side + 1) + j];
            }
        }

        let mut cpre = vec![0.0; side + 1];
        for i in 0..side {
            let u = (i as i64 - w).unsigned_abs() as usize;
            cpre[i + 1] = cpre[i] + if u < c.len() { c[u] } else { 0.0 };
        }

        QTables {
            approx,
            k,
            w,
            c,
            cpre,
            d,
            dpre,
        }
    }

    /// The approximation the tables were built for.
    pub fn approx(&self) -> &MDepApprox {
        &self.approx
    }

    /// The lag the tables were built for.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// `C~(u)` (symmetric lookup; zero outside the stored range).
    pub fn c_at(&self, u: i64) -> f64 {
        let a = u.unsigned_abs() as usize;
        if a < self.c.len() {
            self.c[a]
        } else {
            0.0
        }
    }

    /// `D~(u1, u2)` for `|u_i| <= m + k` (zero outside).
    pub fn d_at(&self, u1: i64, u2: i64) -> f64 {
        if u1.abs() > self.w || u2.abs() > self.w {
            return 0.0;
        }
        let side = (2 * self.w + 1) as usize;
        self.d[((u1 + self.w) as usize) * side + (u2 + self.w) as usize]
    }

    /// `|W| * sum_{|u| <= |W|-1} (1 - |u|/|W|) C~(u)` for a window of `len`
    /// consecutive positions: the variance of the window sum of `Z~`.
    fn bartlett_sum(&self, len: i64) -> f64 {
        let mut sum = len as f64 * self.c[0];
        let umax = (len - 1).min(self.c.len() as i64 - 1);
        for u in 1..=umax {
            sum += 2.0 * (len - u) as f64 * self.c[u as usize];
        }
        sum
    }

    /// Window sum of `C~` over offsets `[lo, hi]` (clipped to `[-w, w]`,
    /// exact since `C~` vanishes beyond `m <= w`).
    fn c_window(&self, lo: i64, hi: i64) -> f64 {
        let lo = lo.max(-self.w);
        let hi = hi.min(self.w);
        if lo > hi {
            return 0.0;
        }
        self.cpre[(hi + self.w + 1) as usize] - self.cpre[(lo + self.w) as usize]
    }

    /// Double window sum of `D~` over `[lo, hi]^2` (offsets are always inside
    /// `[-w, w]` for valid contexts).
    fn d_window(&self, lo: i64, hi: i64) -> f64 {
        let side1 = (2 * self.w + 2) as usize;
        let lo = (lo + self.w) as usize;
        let hi = (hi + self.w + 1) as usize;
        self.dpre[hi * side1 + hi] - self.dpre[lo * side1 + hi] - self.dpre[hi * side1 + lo]
            + self.dpre[lo * side1 + lo]
    }

    fn m_terms_windows(&self, (lo_a, hi_a): (i64, i64), (lo_b, hi_b): (i64, i64)) -> MTerms {
        MTerms {
            m1: self.d_window(lo_a, hi_a),
            m2a: self.bartlett_sum(hi_a - lo_a + 1),
            m2b: self.bartlett_sum(hi_b - lo_b + 1),
            m3: self.c_window(lo_a, hi_a),
        }
    }

    /// Sum of the Method-2 bound over `t = 1..=n-k`.
    ///
    /// `Q~_t` depends on `t` only through the clipped windows, which take a
    /// handful of distinct values (all interior `t` share one), so each
    /// distinct window pair is evaluated once.
    pub fn sum_q_method2(&self, n: u64) -> Result<f64> {
        let nk = n - self.k as u64;
        let mut memo: BTreeMap<(i64, i64, i64, i64), f64> = BTreeMap::new();
        let mut sum = 0.0;
        for t in 1..=nk {
            let ctx = QTermContext {
                approx: self.approx,
                k: self.k,
                n,
                t,
            };
            let a = ctx.a_window();
            let b = ctx.b_window();
            let key = (a.0, a.1, b.0, b.1);
            let q = match memo.get(&key) {
                Some(&q) => q,
                None => {
                    let q = q_method2_from(&self.m_terms_windows(a, b), self.c[0])?;
                    memo.insert(key, q);
                    q
                }
            };
            sum += q;
        }
        Ok(sum)
    }
}

/// The four window statistics `M1, M2a, M2b, M3` at one position.
pub fn m_terms(ctx: &QTermContext) -> Result<MTerms> {
    let tables = QTables::new(ctx.approx, ctx.k);
    Ok(tables.m_terms_windows(ctx.a_window(), ctx.b_window()))
}

fn checked_sqrt(v: f64, what: &str) -> Result<f64> {
    if v < RADICAND_TOL {
        return Err(Error::internal(alloc::format!(
            "negative radicand {v} in {what}"
        )));
    }
    Ok(math::sqrt(v.max(0.0)))
}

fn q_method2_from(mt: &MTerms, c0: f64) -> Result<f64> {
    let v1 = mt.m1 + c0 * mt.m2a + mt.m3 * mt.m3;
    let v2 = mt.m1 + c0 * mt.m2a + 2.0 * mt.m3 * mt.m3;
    let first = checked_sqrt(v1, "var(Z~(t) Z~(A_t))")? * checked_sqrt(mt.m2b, "var(Z~(B_t))")?;
    let second =
        0.5 * checked_sqrt(v2, "E[(Z~(t) Z~(A_t))^2]")? * checked_sqrt(mt.m2a, "var(Z~(A_t))")?;
    Ok(first + second)
}

/// Method-2 (cumulant) bound on `Q~_t`:
/// `(M1 + C~(0) M2a + M3^2)^{1/2} M2b^{1/2} + 1/2 (M1 + C~(0) M2a + 2 M3^2)^{1/2} M2a^{1/2}`.
pub fn q_bound_method2(ctx: &QTermContext) -> Result<f64> {
    let tables = QTables::new(ctx.approx, ctx.k);
    let mt = tables.m_terms_windows(ctx.a_window(), ctx.b_window());
    q_method2_from(&mt, tables.c[0])
}

/// Method-1 (crude moment) bound on `Q~_t`:
/// `5/2 (4m + 4k + 1)^2 ||Y(0)||_6^6`, with `y6 = E[Y(0)^6]`.
pub fn q_bound_method1(m: u32, k: u32, y6: f64) -> f64 {
    let width = (4 * m + 4 * k + 1) as f64;
    2.5 * width * width * y6
}
