//! Haar-continuity windows inside a compactification.
//!
//! A window constrains each factor independently: half-open arcs on torus
//! coordinates (a box), a residue subset on a cyclic factor, a digit prefix
//! (cylinder) on a triadic factor. Membership is the intersection across
//! factors, and the Haar measure is the product of the factor measures.
//! Boxes, cylinders and residue sets all have null topological boundary,
//! so every representable window is a continuity set by construction.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use crate::compactification::{CompactPoint, CompactificationSpec, FactorPoint};
use crate::error::Error;
use crate::Result;

/// Half-open arc on the circle `[0, 1)`.
///
/// `lo < hi` means `[lo, hi)`; `lo > hi` encodes the wrap-around arc
/// `[lo, 1) ∪ [0, hi)`. The full circle is `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    lo: f64,
    hi: f64,
}

impl Arc {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo == hi {
            return Err(Error::InvalidWindow(format!(
                "arc endpoints ({lo}, {hi}) must satisfy 0 <= lo < 1, 0 <= hi <= 1, lo != hi"
            )));
        }
        Ok(Arc { lo, hi })
    }

    pub fn full() -> Self {
        Arc { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_wraparound(&self) -> bool {
        self.lo > self.hi
    }

    /// Arc length, i.e. its Haar measure on the circle.
    pub fn length(&self) -> f64 {
        if self.lo < self.hi {
            self.hi - self.lo
        } else {
            1.0 - self.lo + self.hi
        }
    }

    /// Half-open membership: left endpoint in, right endpoint out.
    pub fn contains(&self, x: f64) -> bool {
        if self.lo < self.hi {
            self.lo <= x && x < self.hi
        } else {
            x >= self.lo || x < self.hi
        }
    }

    /// The complementary arc, again half-open.
    pub fn complement(&self) -> Result<Self> {
        if self.lo == 0.0 && self.hi == 1.0 {
            return Err(Error::InvalidWindow(
                "complement of the full circle is empty".into(),
            ));
        }
        if self.lo == 0.0 {
            return Arc::new(self.hi, 1.0);
        }
        // [lo, hi) complements to [hi, lo); hi == 1 folds back to 0.
        let lo = if self.hi == 1.0 { 0.0 } else { self.hi };
        Arc::new(lo, self.lo)
    }

    /// Translate the arc by `t` on the circle.
    pub fn translate(&self, t: f64) -> Self {
        let shift = |x: f64| {
            let s = (x + t).rem_euclid(1.0);
            if s >= 1.0 {
                0.0
            } else {
                s
            }
        };
        if self.lo == 0.0 && self.hi == 1.0 {
            return *self;
        }
        let lo = shift(self.lo);
        let hi_raw = shift(self.hi);
        // keep hi = 1.0 representation when the right endpoint lands on 0
        let hi = if hi_raw == 0.0 { 1.0 } else { hi_raw };
        Arc { lo, hi }
    }

    /// Distance from `x` to the nearer endpoint, on the circle.
    pub fn boundary_distance(&self, x: f64) -> f64 {
        let d = |e: f64| {
            let diff = (x - e).rem_euclid(1.0);
            diff.min(1.0 - diff)
        };
        d(self.lo).min(d(self.hi % 1.0))
    }
}

/// Constraint a window imposes on one atomic factor.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorConstraint {
    /// No constraint; the whole factor.
    Full,
    /// One arc per torus coordinate; the box is their product.
    Arcs(Vec<Arc>),
    /// Subset of residues of a cyclic factor.
    Residues(BTreeSet<u64>),
    /// Digit prefix (cylinder) of a triadic factor, least significant first.
    Prefix(Vec<u8>),
}

/// A Haar-continuity set in a compactification, with exact measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    constraints: Vec<FactorConstraint>,
}

impl Window {
    /// A window constraining every factor of `spec` as given.
    ///
    /// Pass `FactorConstraint::Full` for unconstrained factors.
    pub fn new(spec: &CompactificationSpec, constraints: Vec<FactorConstraint>) -> Result<Self> {
        let w = Window { constraints };
        w.validate_against(spec)?;
        Ok(w)
    }

    /// The whole group.
    pub fn full(spec: &CompactificationSpec) -> Self {
        Window {
            constraints: vec![FactorConstraint::Full; spec.factors().len()],
        }
    }

    /// Single-arc window on a one-dimensional torus spec.
    pub fn arc(lo: f64, hi: f64) -> Result<Self> {
        Ok(Window {
            constraints: vec![FactorConstraint::Arcs(vec![Arc::new(lo, hi)?])],
        })
    }

    /// Residue-set window on a cyclic spec.
    pub fn residues<I: IntoIterator<Item = u64>>(rs: I) -> Self {
        Window {
            constraints: vec![FactorConstraint::Residues(rs.into_iter().collect())],
        }
    }

    /// Cylinder window on a triadic spec.
    pub fn prefix(digits: Vec<u8>) -> Self {
        Window {
            constraints: vec![FactorConstraint::Prefix(digits)],
        }
    }

    pub fn constraints(&self) -> &[FactorConstraint] {
        &self.constraints
    }

    /// Checks this window fits the shape of `spec`.
    pub fn validate_against(&self, spec: &CompactificationSpec) -> Result<()> {
        let factors = spec.factors();
        if factors.len() != self.constraints.len() {
            return Err(Error::ShapeMismatch(format!(
                "window has {} factor constraints, spec has {} factors",
                self.constraints.len(),
                factors.len()
            )));
        }
        for (fs, c) in factors.iter().zip(self.constraints.iter()) {
            match (fs, c) {
                (_, FactorConstraint::Full) => {}
                (CompactificationSpec::Torus(alphas), FactorConstraint::Arcs(arcs)) => {
                    if alphas.len() != arcs.len() {
                        return Err(Error::ShapeMismatch(format!(
                            "box has {} arcs, torus factor has {} coordinates",
                            arcs.len(),
                            alphas.len()
                        )));
                    }
                }
                (CompactificationSpec::Cyclic(m), FactorConstraint::Residues(rs)) => {
                    if rs.iter().any(|r| r >= m) {
                        return Err(Error::ShapeMismatch(format!("residue >= modulus {m}")));
                    }
                }
                (CompactificationSpec::Triadic { digits }, FactorConstraint::Prefix(p)) => {
                    if p.len() > *digits {
                        return Err(Error::ShapeMismatch(format!(
                            "prefix length {} exceeds triadic precision {}",
                            p.len(),
                            digits
                        )));
                    }
                    if p.iter().any(|d| *d > 2) {
                        return Err(Error::InvalidWindow("prefix digit outside {0,1,2}".into()));
                    }
                }
                _ => {
                    return Err(Error::ShapeMismatch(
                        "constraint kind does not match factor".into(),
                    ))
                }
            }
        }
        Ok(())
    }

    /// Membership test; half-open convention on torus factors.
    pub fn contains(&self, point: &CompactPoint) -> Result<bool> {
        if point.factors.len() != self.constraints.len() {
            return Err(Error::ShapeMismatch(format!(
                "point has {} factors, window has {}",
                point.factors.len(),
                self.constraints.len()
            )));
        }
        for (c, fp) in self.constraints.iter().zip(point.factors.iter()) {
            let inside = match (c, fp) {
                (FactorConstraint::Full, _) => true,
                (FactorConstraint::Arcs(arcs), FactorPoint::Torus(coords)) => {
                    if arcs.len() != coords.len() {
                        return Err(Error::ShapeMismatch("box/point dimension mismatch".into()));
                    }
                    arcs.iter().zip(coords.iter()).all(|(a, x)| a.contains(*x))
                }
                (FactorConstraint::Residues(rs), FactorPoint::Cyclic(r)) => rs.contains(r),
                (FactorConstraint::Prefix(p), FactorPoint::Triadic(ds)) => {
                    if p.len() > ds.len() {
                        return Err(Error::ShapeMismatch(
                            "prefix longer than point digits".into(),
                        ));
                    }
                    ds[..p.len()] == p[..]
                }
                _ => {
                    return Err(Error::ShapeMismatch(
                        "constraint kind does not match point".into(),
                    ))
                }
            };
            if !inside {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact Haar measure: product over factors of arc lengths, residue
    /// fractions and `3^(-prefix_len)`.
    pub fn haar_measure(&self, spec: &CompactificationSpec) -> Result<f64> {
        self.validate_against(spec)?;
        let mut measure = 1.0f64;
        for (fs, c) in spec.factors().iter().zip(self.constraints.iter()) {
            let m = match (fs, c) {
                (_, FactorConstraint::Full) => 1.0,
                (CompactificationSpec::Torus(_), FactorConstraint::Arcs(arcs)) => {
                    arcs.iter().map(Arc::length).product()
                }
                (CompactificationSpec::Cyclic(modulus), FactorConstraint::Residues(rs)) => {
                    rs.len() as f64 / *modulus as f64
                }
                (CompactificationSpec::Triadic { .. }, FactorConstraint::Prefix(p)) => {
                    3f64.powi(-(p.len() as i32))
                }
                _ => unreachable!("validated above"),
            };
            measure *= m;
        }
        Ok(measure)
    }

    /// Complement of a single-factor window, within that factor.
    ///
    /// Representable for a one-dimensional arc and for residue sets;
    /// cylinder complements are not cylinders.
    pub fn complement(&self, spec: &CompactificationSpec) -> Result<Window> {
        if self.constraints.len() != 1 {
            return Err(Error::InvalidWindow(
                "complement is only defined for single-factor windows".into(),
            ));
        }
        self.validate_against(spec)?;
        match (&self.constraints[0], spec.factors()[0]) {
            (FactorConstraint::Arcs(arcs), CompactificationSpec::Torus(_)) if arcs.len() == 1 => {
                Ok(Window {
                    constraints: vec![FactorConstraint::Arcs(vec![arcs[0].complement()?])],
                })
            }
            (FactorConstraint::Residues(rs), CompactificationSpec::Cyclic(m)) => {
                let comp: BTreeSet<u64> = (0..*m).filter(|r| !rs.contains(r)).collect();
                Ok(Window {
                    constraints: vec![FactorConstraint::Residues(comp)],
                })
            }
            _ => Err(Error::InvalidWindow(
                "complement not representable for this constraint".into(),
            )),
        }
    }

    /// The preimage window under translation by `iota(steps)`: a point lies
    /// in the result iff the point plus `iota(steps)` lies in `self`.
    ///
    /// Exact on cyclic and triadic factors; floating shift on torus arcs.
    pub fn translate(&self, spec: &CompactificationSpec, steps: i64) -> Result<Window> {
        self.validate_against(spec)?;
        let g = spec.iota(steps);
        let constraints = self
            .constraints
            .iter()
            .zip(spec.factors().iter().zip(g.factors.iter()))
            .map(|(c, (fs, fp))| translate_constraint(c, fs, fp))
            .collect::<Result<Vec<_>>>()?;
        Ok(Window { constraints })
    }

    /// Smallest circle distance from any torus coordinate of `point` to an
    /// arc endpoint of this window; `None` when no torus arc constrains it.
    ///
    /// Used to exclude floating-boundary indices from exact comparisons.
    pub fn torus_boundary_distance(&self, point: &CompactPoint) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (c, fp) in self.constraints.iter().zip(point.factors.iter()) {
            if let (FactorConstraint::Arcs(arcs), FactorPoint::Torus(coords)) = (c, fp) {
                for (a, x) in arcs.iter().zip(coords.iter()) {
                    let d = a.boundary_distance(*x);
                    best = Some(best.map_or(d, |b: f64| b.min(d)));
                }
            }
        }
        best
    }

    /// Serialize to the JSON constraint format. Single-factor windows emit
    /// the flat form `{"arcs":[[0.0,0.41421356]]}`; multi-factor windows key
    /// constraints by factor index: `{"0":{"arcs":...},"1":{"residues":...}}`.
    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Same as [`Window::to_json`], as a `serde_json::Value`.
    pub fn to_json_value(&self) -> Value {
        if self.constraints.len() == 1 {
            return constraint_to_value(&self.constraints[0]);
        }
        let mut map = Map::new();
        for (i, c) in self.constraints.iter().enumerate() {
            if matches!(c, FactorConstraint::Full) {
                continue;
            }
            map.insert(i.to_string(), constraint_to_value(c));
        }
        Value::Object(map)
    }

    /// Parse the JSON constraint format against a spec.
    pub fn from_json(spec: &CompactificationSpec, s: &str) -> Result<Window> {
        let v: Value = serde_json::from_str(s)?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidWindow("window JSON must be an object".into()))?;
        let n = spec.factors().len();
        let mut constraints = vec![FactorConstraint::Full; n];
        let flat = obj
            .keys()
            .any(|k| matches!(k.as_str(), "arcs" | "residues" | "prefix"));
        if flat {
            constraints[0] = constraint_from_value(&v)?;
        } else {
            for (key, val) in obj {
                let idx: usize = key.parse().map_err(|_| {
                    Error::InvalidWindow(format!(
                        "window key '{key}' is neither a constraint nor a factor index"
                    ))
                })?;
                if idx >= n {
                    return Err(Error::ShapeMismatch(format!(
                        "factor index {idx} out of range for {n} factors"
                    )));
                }
                constraints[idx] = constraint_from_value(val)?;
            }
        }
        Window::new(spec, constraints)
    }
}

fn translate_constraint(
    c: &FactorConstraint,
    spec: &CompactificationSpec,
    shift: &FactorPoint,
) -> Result<FactorConstraint> {
    Ok(match (c, spec, shift) {
        (FactorConstraint::Full, _, _) => FactorConstraint::Full,
        (FactorConstraint::Arcs(arcs), _, FactorPoint::Torus(coords)) => FactorConstraint::Arcs(
            arcs.iter()
                .zip(coords.iter())
                .map(|(a, t)| a.translate(-t))
                .collect(),
        ),
        (
            FactorConstraint::Residues(rs),
            CompactificationSpec::Cyclic(m),
            FactorPoint::Cyclic(g),
        ) => FactorConstraint::Residues(
            rs.iter()
                .map(|r| ((*r as u128 + *m as u128 - *g as u128) % *m as u128) as u64)
                .collect(),
        ),
        (
            FactorConstraint::Prefix(p),
            CompactificationSpec::Triadic { .. },
            FactorPoint::Triadic(g),
        ) => {
            // a cylinder translates to the cylinder of the shifted residue
            let len = p.len();
            let residue = digits_value(p);
            let shift_residue = digits_value(&g[..len]);
            let modulus = crate::compactification::pow3(len);
            let moved = (residue - shift_residue).rem_euclid(modulus);
            let mut digits = Vec::with_capacity(len);
            let mut r = moved;
            for _ in 0..len {
                digits.push((r % 3) as u8);
                r /= 3;
            }
            FactorConstraint::Prefix(digits)
        }
        _ => {
            return Err(Error::ShapeMismatch(
                "constraint kind does not match factor".into(),
            ))
        }
    })
}

fn digits_value(digits: &[u8]) -> i64 {
    digits.iter().rev().fold(0i64, |acc, d| acc * 3 + *d as i64)
}

fn constraint_to_value(c: &FactorConstraint) -> Value {
    match c {
        FactorConstraint::Full => json!({}),
        FactorConstraint::Arcs(arcs) => {
            json!({ "arcs": arcs.iter().map(|a| vec![a.lo(), a.hi()]).collect::<Vec<_>>() })
        }
        FactorConstraint::Residues(rs) => json!({ "residues": rs.iter().collect::<Vec<_>>() }),
        FactorConstraint::Prefix(p) => json!({ "prefix": p }),
    }
}

fn constraint_from_value(v: &Value) -> Result<FactorConstraint> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidWindow("factor constraint must be an object".into()))?;
    if let Some(arcs) = obj.get("arcs") {
        let pairs: Vec<(f64, f64)> = serde_json::from_value(arcs.clone())?;
        let arcs = pairs
            .into_iter()
            .map(|(lo, hi)| Arc::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        if arcs.is_empty() {
            return Err(Error::InvalidWindow("empty arc list".into()));
        }
        return Ok(FactorConstraint::Arcs(arcs));
    }
    if let Some(rs) = obj.get("residues") {
        let rs: Vec<u64> = serde_json::from_value(rs.clone())?;
        return Ok(FactorConstraint::Residues(rs.into_iter().collect()));
    }
    if let Some(p) = obj.get("prefix") {
        let p: Vec<u8> = serde_json::from_value(p.clone())?;
        return Ok(FactorConstraint::Prefix(p));
    }
    if obj.is_empty() {
        return Ok(FactorConstraint::Full);
    }
    Err(Error::InvalidWindow(
        "constraint object needs one of 'arcs', 'residues', 'prefix'".into(),
    ))
}
