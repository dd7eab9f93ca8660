//! Sliding-window Cesàro averages over `Z`, lower/upper Banach-density
//! estimation and almost-convergence detection.
//!
//! The true densities take the inf/sup of window averages over every start
//! position in `Z`; here the scan is truncated to `[-K, K]` and every report
//! carries the `K` and window schedule that produced it.

#[cfg(not(target_arch = "wasm32"))]
use rayon::prelude::*;

use crate::error::Error;
use crate::sequence::SequenceSlice;
use crate::Result;

/// A bounded real sequence over the integers that the scanners can read.
pub trait ZSequence: Sync {
    /// Value at index `k`. Only called inside [`ZSequence::domain`].
    fn value(&self, k: i64) -> f64;

    /// Inclusive index range on which the sequence is defined, or `None`
    /// when it is defined on all of `Z`.
    fn domain(&self) -> Option<(i64, i64)> {
        None
    }
}

impl ZSequence for SequenceSlice {
    fn value(&self, k: i64) -> f64 {
        self.values()[(k - self.start()) as usize]
    }

    fn domain(&self) -> Option<(i64, i64)> {
        Some((self.start(), self.end()))
    }
}

/// Adapter turning a plain closure into a sequence defined on all of `Z`.
pub struct SeqFn<F>(pub F);

impl<F: Fn(i64) -> f64 + Sync> ZSequence for SeqFn<F> {
    fn value(&self, k: i64) -> f64 {
        (self.0)(k)
    }
}

impl<T: ZSequence + ?Sized> ZSequence for &T {
    fn value(&self, k: i64) -> f64 {
        (**self).value(k)
    }

    fn domain(&self) -> Option<(i64, i64)> {
        (**self).domain()
    }
}

/// Lower/upper Banach-density estimates, together with the truncation that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub lower_estimate: f64,
    pub upper_estimate: f64,
    /// Largest window length of the schedule; the estimates come from it.
    pub window_length: usize,
    /// Window starts were scanned over `[-scan_range, scan_range]`.
    pub scan_range: i64,
    /// `(N, inf s_N, sup s_N)` for every schedule entry, for convergence
    /// inspection.
    pub per_window_extrema: Vec<(usize, f64, f64)>,
}

/// Cesàro averages `s_n` at a fixed base point for several `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CesaroTrace {
    pub base_point: i64,
    pub n_values: Vec<usize>,
    pub averages: Vec<f64>,
}

fn check_scan(f: &impl ZSequence, window: usize, scan: i64) -> Result<()> {
    if window < 1 {
        return Err(Error::RangeTooShort("window length must be >= 1".into()));
    }
    if scan < 0 {
        return Err(Error::InvalidArgument("scan range must be >= 0".into()));
    }
    if let Some((lo, hi)) = f.domain() {
        let need_lo = -scan;
        let need_hi = scan + window as i64 - 1;
        if lo > need_lo || hi < need_hi {
            return Err(Error::RangeTooShort(format!(
                "scan needs [{need_lo}, {need_hi}] but sequence covers [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// Minimum and maximum of the `N`-window averages
/// `s_N(n) = (1/N) sum_{k=n}^{n+N-1} f(k)` over all starts `n` in `[-K, K]`.
///
/// Disjoint start ranges are scanned in parallel and merged by min/max,
/// which is order-independent.
pub fn sliding_extrema(f: &impl ZSequence, window: usize, scan: i64) -> Result<(f64, f64)> {
    check_scan(f, window, scan)?;
    let chunk: i64 = 1 << 15;
    let total = 2 * scan + 1;
    let chunks = (total + chunk - 1) / chunk;
    let per_chunk = |ci: i64| {
        let lo = -scan + ci * chunk;
        let hi = (lo + chunk - 1).min(scan);
        scan_chunk(f, window, lo, hi)
    };
    let merge = |a: (f64, f64), b: (f64, f64)| (a.0.min(b.0), a.1.max(b.1));
    let identity = (f64::INFINITY, f64::NEG_INFINITY);
    #[cfg(not(target_arch = "wasm32"))]
    let (inf, sup) = (0..chunks)
        .into_par_iter()
        .map(per_chunk)
        .reduce(|| identity, merge);
    #[cfg(target_arch = "wasm32")]
    let (inf, sup) = (0..chunks).map(per_chunk).fold(identity, merge);
    Ok((inf, sup))
}

/// Rolling scan of window starts in `[lo, hi]`.
fn scan_chunk(f: &impl ZSequence, window: usize, lo: i64, hi: i64) -> (f64, f64) {
    let n = window as i64;
    let mut sum = 0.0f64;
    for k in lo..lo + n {
        sum += f.value(k);
    }
    let mut min = sum;
    let mut max = sum;
    let mut pos = lo;
    while pos < hi {
        sum += f.value(pos + n) - f.value(pos);
        if sum < min {
            min = sum;
        }
        if sum > max {
            max = sum;
        }
        pos += 1;
    }
    (min / window as f64, max / window as f64)
}

/// Banach-density estimate along an increasing window schedule. The final
/// (largest) window provides the reported estimates; the whole schedule is
/// recorded so convergence can be inspected.
pub fn banach_density(f: &impl ZSequence, schedule: &[usize], scan: i64) -> Result<DensityReport> {
    if schedule.is_empty() {
        return Err(Error::InvalidArgument(
            "window schedule must be nonempty".into(),
        ));
    }
    for pair in schedule.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidArgument(format!(
                "window schedule not increasing at {} >= {}",
                pair[0], pair[1]
            )));
        }
    }
    let mut per_window = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let (inf, sup) = sliding_extrema(f, n, scan)?;
        per_window.push((n, inf, sup));
    }
    let (n_last, lower, upper) = *per_window.last().unwrap();
    Ok(DensityReport {
        lower_estimate: lower,
        upper_estimate: upper,
        window_length: n_last,
        scan_range: scan,
        per_window_extrema: per_window,
    })
}

/// Detects almost convergence: the lower and upper estimates agree within
/// `tol` at the final schedule entry. Returns the midpoint as the mean
/// estimate.
pub fn is_almost_convergent(
    f: &impl ZSequence,
    schedule: &[usize],
    scan: i64,
    tol: f64,
) -> Result<(bool, f64)> {
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let report = banach_density(f, schedule, scan)?;
    let gap = report.upper_estimate - report.lower_estimate;
    Ok((
        gap <= tol,
        0.5 * (report.lower_estimate + report.upper_estimate),
    ))
}

/// Default tolerance for almost-convergence detection.
pub const DEFAULT_AC_TOL: f64 = 1e-3;

/// Cesàro averages of `f` over `[base_point, base_point + n)` for each `n`.
pub fn cesaro_trace(
    f: &impl ZSequence,
    base_point: i64,
    n_values: &[usize],
) -> Result<CesaroTrace> {
    if n_values.is_empty() {
        return Err(Error::InvalidArgument("n_values must be nonempty".into()));
    }
    if n_values.contains(&0) {
        return Err(Error::InvalidArgument("n_values must be positive".into()));
    }
    let max_n = *n_values.iter().max().unwrap();
    if let Some((lo, hi)) = f.domain() {
        let need_hi = base_point + max_n as i64 - 1;
        if lo > base_point || hi < need_hi {
            return Err(Error::RangeTooShort(format!(
                "trace needs [{base_point}, {need_hi}] but sequence covers [{lo}, {hi}]"
            )));
        }
    }
    // one ascending pass; capture partial sums at each requested n
    let mut partial = vec![0.0f64; max_n + 1];
    let mut sum = 0.0f64;
    for i in 0..max_n {
        sum += f.value(base_point + i as i64);
        partial[i + 1] = sum;
    }
    let averages = n_values.iter().map(|&n| partial[n] / n as f64).collect();
    Ok(CesaroTrace {
        base_point,
        n_values: n_values.to_vec(),
        averages,
    })
}

/// Named indicator sequences used in the examples and the test fixtures.
pub mod fixtures {
    /// Indicator of the even integers.
    pub fn parity(k: i64) -> f64 {
        if k.rem_euclid(2) == 0 {
            1.0
        } else {
            0.0
        }
    }

    /// Indicator of `{2^j : j >= 0}`.
    pub fn pow2_indicator(k: i64) -> f64 {
        if k >= 1 && (k & (k - 1)) == 0 {
            1.0
        } else {
            0.0
        }
    }

    /// Dyadic block exponent: `j` with `2^j < |k| <= 2^(j+1)`, if any.
    ///
    /// Blocks at scale `2^n` replace the factorial ranges of the classical
    /// non-almost-convergent example, which overflow immediately.
    fn block_exponent(k: i64) -> Option<u32> {
        let x = k.unsigned_abs();
        if x < 2 {
            return None;
        }
        Some((x - 1).ilog2())
    }

    /// Indicator of the block set `B`: even numbers inside odd-exponent
    /// dyadic blocks, odd numbers inside even-exponent blocks, symmetric
    /// under negation.
    pub fn alternating_blocks(k: i64) -> f64 {
        match block_exponent(k) {
            Some(j) if j >= 1 => {
                let even = k.rem_euclid(2) == 0;
                let want_even = j % 2 == 1;
                if even == want_even {
                    1.0
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    /// Indicator of `A ∩ B` for `A` the even integers: the even numbers
    /// inside odd-exponent dyadic blocks. Lower Banach density 0, upper 1/2.
    pub fn alternating_blocks_even_part(k: i64) -> f64 {
        match block_exponent(k) {
            Some(j) if j >= 1 && j % 2 == 1 && k.rem_euclid(2) == 0 => 1.0,
            _ => 0.0,
        }
    }
}
