//! Bounded integer-indexed sequences: 0-1 coding sequences of window
//! membership along the embedding, Sturmian rotations, lacunary
//! indicators, and window-weighted simple functions pulled back to `Z`.
//!
//! Sequences are always produced as finite slices; callers pick ranges.

use std::io::Write;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::compactification::{Alpha, CompactificationSpec};
use crate::error::Error;
use crate::window::Window;
use crate::Result;

/// A finite slice of a sequence over `Z`, with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSlice {
    start: i64,
    values: Vec<f64>,
    descriptor: Value,
}

impl SequenceSlice {
    pub fn new(start: i64, values: Vec<f64>, descriptor: Value) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument(
                "sequence slice must be nonempty".into(),
            ));
        }
        Ok(SequenceSlice {
            start,
            values,
            descriptor,
        })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last covered index, inclusive.
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn descriptor(&self) -> &Value {
        &self.descriptor
    }

    /// Value at absolute index `k`.
    pub fn value_at(&self, k: i64) -> Result<f64> {
        if k < self.start || k > self.end() {
            return Err(Error::OutOfRange {
                index: k,
                start: self.start,
                end: self.end(),
            });
        }
        Ok(self.values[(k - self.start) as usize])
    }

    /// The slice as exact bits; errors if any value is not 0 or 1.
    pub fn bits(&self) -> Result<Vec<u8>> {
        self.values
            .iter()
            .map(|v| match *v {
                0.0 => Ok(0u8),
                1.0 => Ok(1u8),
                other => Err(Error::InvalidArgument(format!(
                    "value {other} is not a bit"
                ))),
            })
            .collect()
    }

    /// Emit CSV rows `k,value` preceded by a `#` JSON provenance comment.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# {}", self.descriptor)?;
        writeln!(out, "k,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{}", self.start + i as i64, v)?;
        }
        Ok(())
    }
}

/// The coding sequence of `window` along the embedding: bit `i` is 1 iff
/// `iota(start + i)` lies in the window.
pub fn hartman_bits(
    spec: &CompactificationSpec,
    window: &Window,
    start: i64,
    len: usize,
) -> Result<SequenceSlice> {
    spec.validate()?;
    window.validate_against(spec)?;
    if len == 0 {
        return Err(Error::InvalidArgument("len must be >= 1".into()));
    }
    let values = (0..len)
        .map(|i| {
            let k = start + i as i64;
            window
                .contains(&spec.iota(k))
                .map(|b| if b { 1.0 } else { 0.0 })
        })
        .collect::<Result<Vec<_>>>()?;
    let descriptor = json!({
        "family": "hartman_bits",
        "spec": serde_json::to_value(spec).expect("spec serializes"),
        "window": window.to_json_value(),
        "start": start,
        "len": len,
    });
    SequenceSlice::new(start, values, descriptor)
}

/// Sturmian coding of the rotation by `alpha`: bit 1 iff `k alpha mod 1`
/// falls in `[alpha, 1)`.
pub fn sturmian(alpha: Alpha, start: i64, len: usize) -> Result<SequenceSlice> {
    let a = alpha.value();
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sturmian alpha {a} outside (0, 1)"
        )));
    }
    let spec = CompactificationSpec::torus(vec![alpha]);
    let window = Window::arc(a, 1.0)?;
    let slice = hartman_bits(&spec, &window, start, len)?;
    let descriptor = json!({
        "family": "sturmian",
        "alpha": serde_json::to_value(alpha).expect("alpha serializes"),
        "start": start,
        "len": len,
    });
    SequenceSlice::new(start, slice.values, descriptor)
}

/// Indicator slice of an explicit strictly increasing set of positive
/// integers; indices outside the set give 0.
pub fn lacunary_bits(ts: &[i64], start: i64, len: usize) -> Result<SequenceSlice> {
    if len == 0 {
        return Err(Error::InvalidArgument("len must be >= 1".into()));
    }
    for pair in ts.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidArgument(format!(
                "lacunary set not strictly increasing at {} >= {}",
                pair[0], pair[1]
            )));
        }
    }
    if ts.first().is_some_and(|t| *t < 1) {
        return Err(Error::InvalidArgument(
            "lacunary set must contain positive integers".into(),
        ));
    }
    let values = (0..len)
        .map(|i| {
            let k = start + i as i64;
            if ts.binary_search(&k).is_ok() {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let descriptor = json!({
        "family": "lacunary",
        "ts": ts,
        "start": start,
        "len": len,
    });
    SequenceSlice::new(start, values, descriptor)
}

/// A window-weighted simple function `F = sum_j c_j 1_{A_j}` on the group.
#[derive(Debug, Clone)]
pub struct SimpleFunction {
    terms: Vec<(Window, Complex64)>,
}

impl SimpleFunction {
    pub fn new(terms: Vec<(Window, Complex64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument(
                "simple function needs at least one term".into(),
            ));
        }
        Ok(SimpleFunction { terms })
    }

    pub fn terms(&self) -> &[(Window, Complex64)] {
        &self.terms
    }

    /// `F(iota(k))` as a complex number.
    pub fn eval(&self, spec: &CompactificationSpec, k: i64) -> Result<Complex64> {
        let p = spec.iota(k);
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, c) in &self.terms {
            if w.contains(&p)? {
                acc += c;
            }
        }
        Ok(acc)
    }
}

/// Pull a real-valued simple function back to `Z` along the embedding.
///
/// Coefficients may be complex as long as the combination is real on the
/// evaluated range; the slice stores the real parts.
pub fn hartman_real(
    spec: &CompactificationSpec,
    f: &SimpleFunction,
    start: i64,
    len: usize,
) -> Result<SequenceSlice> {
    spec.validate()?;
    for (w, _) in f.terms() {
        w.validate_against(spec)?;
    }
    if len == 0 {
        return Err(Error::InvalidArgument("len must be >= 1".into()));
    }
    let values = (0..len)
        .map(|i| f.eval(spec, start + i as i64).map(|z| z.re))
        .collect::<Result<Vec<_>>>()?;
    let descriptor = json!({
        "family": "hartman_real",
        "spec": serde_json::to_value(spec).expect("spec serializes"),
        "terms": f.terms().len(),
        "start": start,
        "len": len,
    });
    SequenceSlice::new(start, values, descriptor)
}
