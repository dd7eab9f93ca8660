//! The ternary-Cantor product family and its Fourier-Stieltjes machinery.
//!
//! The truncated products `f_n(k) = prod_{j=1..n} cos^2(2 pi k / 3^j)` are
//! `3^n`-periodic with period mean exactly `1/2^n`, arise as transforms of
//! an explicit convolution recursion of discrete measures on the circle,
//! and push down to continuous functions on the truncated 3-adic integers.
//!
//! Atom locations are exact rationals, so convolution merging is exact;
//! floating point enters only in the final transform. Each cosine factor
//! reduces its argument by the exact residue `k mod 3^j`, which makes the
//! `3^n`-periodicity and the index-shift identity `f_{n+1}(3k) = f_n(k)`
//! hold bitwise.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Ratio;

use crate::compactification::{CompactPoint, FactorPoint};
use crate::error::Error;
use crate::Result;

/// Exact circle coordinate: a rational reduced into `[0, 1)`.
pub type Loc = Ratio<i64>;

/// `prod_{j=1..n} cos(2 pi k / 3^j)`, the transform of the measure
/// recursion without its base atom. With `include_half_factor` the base
/// atom at 1/2 contributes the extra `(-1)^k`, matching the transform of
/// the recursion exactly.
pub fn f_tilde_n(n: u32, k: i64, include_half_factor: bool) -> f64 {
    let mut prod = if include_half_factor && k.rem_euclid(2) == 1 {
        -1.0
    } else {
        1.0
    };
    let mut pow: i128 = 1;
    for _ in 1..=n {
        pow *= 3;
        // beyond this the factor is 1.0 to double precision for any i64 k
        if pow > 1i128 << 120 {
            break;
        }
        let r = (k as i128).rem_euclid(pow);
        // divide before scaling by TAU: (3r)/3^(j+1) and r/3^j then round
        // to the same double, which keeps the index-shift identity exact
        let t = (r as f64) / (pow as f64);
        prod *= (TAU * t).cos();
    }
    prod
}

/// `f_n(k) = prod_{j=1..n} cos^2(2 pi k / 3^j)`, in `[0, 1]`.
pub fn f_n(n: u32, k: i64) -> f64 {
    let t = f_tilde_n(n, k, false);
    t * t
}

/// Mean of `f_n` over one full period `[0, 3^n)`, summed in ascending `k`
/// so results are reproducible bit for bit.
pub fn period_mean(n: u32) -> f64 {
    let period = 3i64.pow(n);
    let mut sum = 0.0f64;
    for k in 0..period {
        sum += f_n(n, k);
    }
    sum / period as f64
}

/// A finitely supported complex measure on the circle.
///
/// Locations are exact rationals in `[0, 1)`; atoms at equal locations are
/// merged and exactly cancelled atoms dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: BTreeMap<Loc, Complex64>,
}

fn reduce_mod_one(x: Loc) -> Loc {
    x - x.floor()
}

impl DiscreteMeasure {
    pub fn new<I: IntoIterator<Item = (Loc, Complex64)>>(atoms: I) -> Self {
        let mut map: BTreeMap<Loc, Complex64> = BTreeMap::new();
        for (loc, w) in atoms {
            let entry = map.entry(reduce_mod_one(loc)).or_insert(Complex64::ZERO);
            *entry += w;
        }
        map.retain(|_, w| *w != Complex64::ZERO);
        DiscreteMeasure { atoms: map }
    }

    /// Point mass at `loc`.
    pub fn dirac(loc: Loc) -> Self {
        DiscreteMeasure::new([(loc, Complex64::new(1.0, 0.0))])
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Loc, &Complex64)> {
        self.atoms.iter()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// Sum of the weights, i.e. the measure of the whole circle.
    pub fn total_weight(&self) -> Complex64 {
        self.atoms.values().sum()
    }

    /// Convolution: atoms at all mod-1 sums of locations with product
    /// weights, merged.
    pub fn convolve(&self, other: &DiscreteMeasure) -> DiscreteMeasure {
        let mut map: BTreeMap<Loc, Complex64> = BTreeMap::new();
        for (la, wa) in &self.atoms {
            for (lb, wb) in &other.atoms {
                let entry = map
                    .entry(reduce_mod_one(la + lb))
                    .or_insert(Complex64::ZERO);
                *entry += wa * wb;
            }
        }
        map.retain(|_, w| *w != Complex64::ZERO);
        DiscreteMeasure { atoms: map }
    }

    /// Fourier-Stieltjes transform at the integer character `k`:
    /// `sum_a w_a exp(2 pi i k loc_a)`, with the exponent reduced exactly.
    pub fn fourier_stieltjes(&self, k: i64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for (loc, w) in &self.atoms {
            acc += w * unit_phase(k, loc);
        }
        acc
    }

    /// Transform sampled on the inclusive character range `[k_lo, k_hi]`.
    ///
    /// When the atom locations share a moderate common denominator `L`, the
    /// phases walk a precomputed table of `L`-th roots of unity; otherwise
    /// this falls back to per-atom evaluation.
    pub fn transform_range(&self, k_lo: i64, k_hi: i64) -> Result<Vec<Complex64>> {
        if k_lo > k_hi {
            return Err(Error::InvalidArgument(format!(
                "empty character range [{k_lo}, {k_hi}]"
            )));
        }
        let len = (k_hi - k_lo + 1) as usize;
        let denom_lcm = self.atoms.keys().try_fold(1i64, |acc, loc| {
            let d = *loc.denom();
            let g = gcd(acc, d);
            (acc / g).checked_mul(d)
        });
        const TABLE_LIMIT: i64 = 1 << 22;
        let Some(l) = denom_lcm.filter(|l| *l <= TABLE_LIMIT) else {
            return Ok((k_lo..=k_hi).map(|k| self.fourier_stieltjes(k)).collect());
        };
        let roots: Vec<Complex64> = (0..l)
            .map(|r| Complex64::from_polar(1.0, TAU * r as f64 / l as f64))
            .collect();
        let mut acc = vec![Complex64::ZERO; len];
        for (loc, w) in &self.atoms {
            let step =
                ((l / loc.denom()) as i128 * *loc.numer() as i128).rem_euclid(l as i128) as i64;
            let mut r = (k_lo as i128 * step as i128).rem_euclid(l as i128) as i64;
            for slot in acc.iter_mut() {
                *slot += w * roots[r as usize];
                r += step;
                if r >= l {
                    r -= l;
                }
            }
        }
        Ok(acc)
    }

    /// The measure recursion: the base atom at 1/2 convolved with the
    /// symmetric pair at `±1/3^j` for `j = 1..=n`. Its transform is
    /// `(-1)^k prod_{j=1..n} cos(2 pi k / 3^j)`.
    pub fn nu(n: u32) -> Self {
        let mut m = DiscreteMeasure::dirac(Loc::new(1, 2));
        let half = Complex64::new(0.5, 0.0);
        for j in 1..=n {
            let p = 3i64.pow(j);
            let pair = DiscreteMeasure::new([(Loc::new(-1, p), half), (Loc::new(1, p), half)]);
            m = m.convolve(&pair);
        }
        m
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `exp(2 pi i k loc)` with the exponent reduced exactly mod 1.
fn unit_phase(k: i64, loc: &Loc) -> Complex64 {
    let q = *loc.denom();
    let r = ((k as i128 * *loc.numer() as i128).rem_euclid(q as i128)) as i64;
    Complex64::from_polar(1.0, TAU * r as f64 / q as f64)
}

/// Evaluates the continuous realization `F_n` of `f_n` on the truncated
/// 3-adic integers: the first `n` digits of the point determine a residue
/// `k mod 3^n`, and `F_n(point) = f_n(k)`.
pub fn triadic_realization(n: u32, point: &CompactPoint) -> Result<f64> {
    let [FactorPoint::Triadic(digits)] = point.factors.as_slice() else {
        return Err(Error::ShapeMismatch(
            "triadic realization needs a point of a single triadic factor".into(),
        ));
    };
    if digits.len() < n as usize {
        return Err(Error::InvalidArgument(format!(
            "point carries {} digits, realization depth {n} needs at least {n}",
            digits.len()
        )));
    }
    let k = digits[..n as usize]
        .iter()
        .rev()
        .fold(0i64, |acc, d| acc * 3 + *d as i64);
    Ok(f_n(n, k))
}
