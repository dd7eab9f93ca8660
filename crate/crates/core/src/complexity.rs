//! Subword complexity `p(n)`: the number of distinct length-`n` blocks in
//! a bit sequence, plus the entropy diagnostic `(1/n) log p(n)`.
//!
//! Counts come from a finite sample and therefore undercount the complexity
//! of the infinite sequence; profiles carry the sample length to keep the
//! truncation visible, and the sample must be at least four times the
//! longest block. Counts are non-decreasing in `n` except on fully
//! saturated samples (every window distinct), where the final window can
//! cost exactly one: `p(n+1) >= p(n) - 1` always holds.

use std::collections::HashSet;

use crate::error::Error;
use crate::sequence::SequenceSlice;
use crate::Result;

/// Distinct-block counts `p(n)` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityProfile {
    pub n_values: Vec<usize>,
    pub counts: Vec<usize>,
    /// Length of the slice the counts were computed from.
    pub sample_length: usize,
}

/// Counts distinct length-`n` windows for every `n` up to `n_max`.
///
/// Blocks up to 64 bits are packed into integers and hashed; longer blocks
/// hash the raw window.
pub fn subword_complexity(bits: &SequenceSlice, n_max: usize) -> Result<ComplexityProfile> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let bits = bits.bits()?;
    if bits.len() < 4 * n_max {
        return Err(Error::InvalidArgument(format!(
            "slice of length {} too short for n_max {}; need at least {}",
            bits.len(),
            n_max,
            4 * n_max
        )));
    }
    let mut counts = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        counts.push(if n <= 64 {
            count_packed(&bits, n)
        } else {
            count_slices(&bits, n)
        });
    }
    Ok(ComplexityProfile {
        n_values: (1..=n_max).collect(),
        counts,
        sample_length: bits.len(),
    })
}

fn count_packed(bits: &[u8], n: usize) -> usize {
    let mask: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut seen = HashSet::new();
    let mut word = 0u64;
    for (i, b) in bits.iter().enumerate() {
        word = ((word << 1) | *b as u64) & mask;
        if i + 1 >= n {
            seen.insert(word);
        }
    }
    seen.len()
}

fn count_slices(bits: &[u8], n: usize) -> usize {
    bits.windows(n).collect::<HashSet<_>>().len()
}

/// The entropy diagnostic `(1/n) ln p(n)` per profile entry.
pub fn entropy_profile(profile: &ComplexityProfile) -> Vec<f64> {
    profile
        .n_values
        .iter()
        .zip(profile.counts.iter())
        .map(|(n, p)| (*p as f64).ln() / *n as f64)
        .collect()
}
