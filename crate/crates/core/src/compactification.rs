//! Finitely described group compactifications of the integers.
//!
//! Each spec models a compact group `C` together with the dense embedding
//! `iota: Z -> C`. Supported factors: finite-dimensional torus rotations,
//! cyclic quotients `Z/mZ`, the 3-adic integers truncated to finitely many
//! digits, and finite products of these. Cyclic and triadic coordinates are
//! exact; torus coordinates are doubles reduced into `[0, 1)`.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Largest supported triadic digit count, so `3^digits` stays in `i64`.
pub const MAX_TRIADIC_DIGITS: usize = 39;

/// A rotation number in `[0, 1)`, either a float (treated as irrational)
/// or an exact rational `p/q` for degenerate finite-image cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alpha {
    Value(f64),
    Rational { p: i64, q: i64 },
}

impl Alpha {
    /// Numeric value in `[0, 1)`.
    pub fn value(&self) -> f64 {
        match *self {
            Alpha::Value(a) => a,
            Alpha::Rational { p, q } => p as f64 / q as f64,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Alpha::Rational { .. })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Alpha::Value(a) => {
                if !(0.0..1.0).contains(&a) || !a.is_finite() {
                    return Err(Error::InvalidSpec(format!(
                        "rotation number {a} outside [0, 1)"
                    )));
                }
            }
            Alpha::Rational { p, q } => {
                if q < 1 || p < 0 || p >= q {
                    return Err(Error::InvalidSpec(format!(
                        "rational rotation number {p}/{q} outside [0, 1)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `k * alpha mod 1`, exact modular arithmetic in the rational case.
    fn rotate(&self, k: i64) -> f64 {
        match *self {
            Alpha::Value(a) => {
                let c = (k as f64 * a).rem_euclid(1.0);
                if c >= 1.0 {
                    0.0
                } else {
                    c
                }
            }
            Alpha::Rational { p, q } => {
                let r = (k as i128).rem_euclid(q as i128) * p as i128 % q as i128;
                r as f64 / q as f64
            }
        }
    }
}

impl From<f64> for Alpha {
    fn from(a: f64) -> Self {
        Alpha::Value(a)
    }
}

/// A finite description of a metrizable group compactification of `Z`.
///
/// Serializes to the JSON forms `{"torus":[0.41421356]}`, `{"cyclic":9}`,
/// `{"triadic":{"digits":12}}` and `{"product":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompactificationSpec {
    Torus(Vec<Alpha>),
    Cyclic(u64),
    Triadic { digits: usize },
    Product(Vec<CompactificationSpec>),
}

impl CompactificationSpec {
    /// Torus rotation by the given rotation numbers.
    pub fn torus(alphas: Vec<Alpha>) -> Self {
        CompactificationSpec::Torus(alphas)
    }

    pub fn cyclic(modulus: u64) -> Self {
        CompactificationSpec::Cyclic(modulus)
    }

    pub fn triadic(digits: usize) -> Self {
        CompactificationSpec::Triadic { digits }
    }

    /// Product compactification (supremum) of the given factors.
    ///
    /// Flattens nested products and collapses a singleton to its sole factor.
    pub fn product(specs: Vec<CompactificationSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidSpec("empty product".into()));
        }
        let mut flat = Vec::new();
        for s in specs {
            match s {
                CompactificationSpec::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            Ok(flat.pop().unwrap())
        } else {
            Ok(CompactificationSpec::Product(flat))
        }
    }

    /// Checks the structural invariants of the spec.
    pub fn validate(&self) -> Result<()> {
        match self {
            CompactificationSpec::Torus(alphas) => {
                if alphas.is_empty() {
                    return Err(Error::InvalidSpec(
                        "torus factor with no rotation numbers".into(),
                    ));
                }
                for a in alphas {
                    a.validate()?;
                }
            }
            CompactificationSpec::Cyclic(m) => {
                if *m < 1 {
                    return Err(Error::InvalidSpec("cyclic modulus must be >= 1".into()));
                }
            }
            CompactificationSpec::Triadic { digits } => {
                if *digits < 1 {
                    return Err(Error::InvalidSpec(
                        "triadic digit count must be >= 1".into(),
                    ));
                }
                if *digits > MAX_TRIADIC_DIGITS {
                    return Err(Error::InvalidSpec(format!(
                        "triadic digit count {digits} exceeds supported maximum {MAX_TRIADIC_DIGITS}"
                    )));
                }
            }
            CompactificationSpec::Product(factors) => {
                if factors.is_empty() {
                    return Err(Error::InvalidSpec("empty product".into()));
                }
                for f in factors {
                    if matches!(f, CompactificationSpec::Product(_)) {
                        return Err(Error::InvalidSpec(
                            "nested product; flatten on construction".into(),
                        ));
                    }
                    f.validate()?;
                }
            }
        }
        Ok(())
    }

    /// The atomic factors, in order. A non-product spec is its own factor.
    pub fn factors(&self) -> Vec<&CompactificationSpec> {
        match self {
            CompactificationSpec::Product(fs) => fs.iter().collect(),
            other => vec![other],
        }
    }

    /// The embedding `iota(k)`, total for every signed 64-bit integer.
    pub fn iota(&self, k: i64) -> CompactPoint {
        CompactPoint {
            factors: self.factors().iter().map(|f| f.iota_factor(k)).collect(),
        }
    }

    fn iota_factor(&self, k: i64) -> FactorPoint {
        match self {
            CompactificationSpec::Torus(alphas) => {
                FactorPoint::Torus(alphas.iter().map(|a| a.rotate(k)).collect())
            }
            CompactificationSpec::Cyclic(m) => {
                FactorPoint::Cyclic((k as i128).rem_euclid(*m as i128) as u64)
            }
            CompactificationSpec::Triadic { digits } => {
                let modulus = pow3(*digits);
                FactorPoint::Triadic(to_digits(k.rem_euclid(modulus), *digits))
            }
            CompactificationSpec::Product(_) => unreachable!("products are flattened"),
        }
    }

    /// The identity element `iota(0)`.
    pub fn identity(&self) -> CompactPoint {
        self.iota(0)
    }

    /// Componentwise group addition of two conforming points.
    pub fn add(&self, p: &CompactPoint, q: &CompactPoint) -> Result<CompactPoint> {
        p.check_shape(self)?;
        q.check_shape(self)?;
        let factors = self
            .factors()
            .iter()
            .zip(p.factors.iter().zip(q.factors.iter()))
            .map(|(spec, (a, b))| add_factor(spec, a, b))
            .collect();
        Ok(CompactPoint { factors })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: CompactificationSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization cannot fail")
    }
}

/// Coordinate of a point in one atomic factor.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorPoint {
    /// Coordinates in `[0, 1)`, one per rotation number.
    Torus(Vec<f64>),
    /// Residue in `{0, ..., m-1}`.
    Cyclic(u64),
    /// Base-3 digits, least significant first, fixed length.
    Triadic(Vec<u8>),
}

/// A point of the compact group, one coordinate block per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactPoint {
    pub factors: Vec<FactorPoint>,
}

impl CompactPoint {
    /// Verifies this point conforms to `spec`.
    pub fn check_shape(&self, spec: &CompactificationSpec) -> Result<()> {
        let factors = spec.factors();
        if factors.len() != self.factors.len() {
            return Err(Error::ShapeMismatch(format!(
                "point has {} factors, spec has {}",
                self.factors.len(),
                factors.len()
            )));
        }
        for (fs, fp) in factors.iter().zip(self.factors.iter()) {
            match (fs, fp) {
                (CompactificationSpec::Torus(alphas), FactorPoint::Torus(coords)) => {
                    if alphas.len() != coords.len() {
                        return Err(Error::ShapeMismatch(format!(
                            "torus point has {} coordinates, spec has {}",
                            coords.len(),
                            alphas.len()
                        )));
                    }
                    if coords.iter().any(|c| !(0.0..1.0).contains(c)) {
                        return Err(Error::ShapeMismatch(
                            "torus coordinate outside [0, 1)".into(),
                        ));
                    }
                }
                (CompactificationSpec::Cyclic(m), FactorPoint::Cyclic(r)) => {
                    if r >= m {
                        return Err(Error::ShapeMismatch(format!("residue {r} >= modulus {m}")));
                    }
                }
                (CompactificationSpec::Triadic { digits }, FactorPoint::Triadic(ds)) => {
                    if ds.len() != *digits {
                        return Err(Error::ShapeMismatch(format!(
                            "triadic point has {} digits, spec has {}",
                            ds.len(),
                            digits
                        )));
                    }
                    if ds.iter().any(|d| *d > 2) {
                        return Err(Error::ShapeMismatch("triadic digit outside {0,1,2}".into()));
                    }
                }
                _ => {
                    return Err(Error::ShapeMismatch("factor kind mismatch".into()));
                }
            }
        }
        Ok(())
    }
}

fn add_factor(spec: &CompactificationSpec, a: &FactorPoint, b: &FactorPoint) -> FactorPoint {
    match (spec, a, b) {
        (CompactificationSpec::Torus(_), FactorPoint::Torus(x), FactorPoint::Torus(y)) => {
            FactorPoint::Torus(
                x.iter()
                    .zip(y.iter())
                    .map(|(u, v)| {
                        let s = u + v;
                        if s >= 1.0 {
                            s - 1.0
                        } else {
                            s
                        }
                    })
                    .collect(),
            )
        }
        (CompactificationSpec::Cyclic(m), FactorPoint::Cyclic(x), FactorPoint::Cyclic(y)) => {
            FactorPoint::Cyclic(((*x as u128 + *y as u128) % *m as u128) as u64)
        }
        (
            CompactificationSpec::Triadic { digits },
            FactorPoint::Triadic(x),
            FactorPoint::Triadic(y),
        ) => {
            let mut out = Vec::with_capacity(*digits);
            let mut carry = 0u8;
            for (dx, dy) in x.iter().zip(y.iter()) {
                let s = dx + dy + carry;
                out.push(s % 3);
                carry = s / 3;
            }
            FactorPoint::Triadic(out)
        }
        _ => unreachable!("shapes checked by caller"),
    }
}

/// `3^n` as `i64`; valid for `n <= MAX_TRIADIC_DIGITS`.
pub fn pow3(n: usize) -> i64 {
    3i64.pow(n as u32)
}

fn to_digits(mut r: i64, len: usize) -> Vec<u8> {
    let mut digits = Vec::with_capacity(len);
    for _ in 0..len {
        digits.push((r % 3) as u8);
        r /= 3;
    }
    digits
}

/// Distance on the circle `R/Z` between two coordinates in `[0, 1)`.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    d.min(1.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn iota_sends_zero_to_identity() {
        let specs = [
            CompactificationSpec::torus(vec![golden().into()]),
            CompactificationSpec::cyclic(9),
            CompactificationSpec::triadic(4),
            CompactificationSpec::product(vec![
                CompactificationSpec::cyclic(2),
                CompactificationSpec::triadic(2),
            ])
            .unwrap(),
        ];
        for spec in &specs {
            let id = spec.iota(0);
            for f in &id.factors {
                match f {
                    FactorPoint::Torus(cs) => assert!(cs.iter().all(|c| *c == 0.0)),
                    FactorPoint::Cyclic(r) => assert_eq!(*r, 0),
                    FactorPoint::Triadic(ds) => assert!(ds.iter().all(|d| *d == 0)),
                }
            }
        }
    }

    #[test]
    fn cyclic_iota_is_residue() {
        let spec = CompactificationSpec::cyclic(9);
        assert_eq!(
            spec.iota(13),
            CompactPoint {
                factors: vec![FactorPoint::Cyclic(4)]
            }
        );
        assert_eq!(
            spec.iota(-1),
            CompactPoint {
                factors: vec![FactorPoint::Cyclic(8)]
            }
        );
    }

    #[test]
    fn triadic_iota_expands_base3() {
        // 5 = 2*1 + 1*3 + 0*9
        let spec = CompactificationSpec::triadic(3);
        assert_eq!(
            spec.iota(5),
            CompactPoint {
                factors: vec![FactorPoint::Triadic(vec![2, 1, 0])]
            }
        );
    }

    #[test]
    fn triadic_iota_matches_expansion_oracle() {
        let spec = CompactificationSpec::triadic(6);
        for k in 0..3i64.pow(6) {
            // independent oracle: repeated division
            let mut digits = Vec::new();
            let mut r = k;
            for _ in 0..6 {
                digits.push((r % 3) as u8);
                r /= 3;
            }
            assert_eq!(
                spec.iota(k),
                CompactPoint {
                    factors: vec![FactorPoint::Triadic(digits)]
                }
            );
        }
    }

    #[test]
    fn triadic_negative_k_is_complement() {
        let spec = CompactificationSpec::triadic(3);
        let p = spec.iota(-1);
        assert_eq!(
            p,
            CompactPoint {
                factors: vec![FactorPoint::Triadic(vec![2, 2, 2])]
            }
        );
        // -1 + 1 = 0
        let sum = spec.add(&p, &spec.iota(1)).unwrap();
        assert_eq!(sum, spec.identity());
    }

    #[test]
    fn cyclic_add_wraps() {
        let spec = CompactificationSpec::cyclic(5);
        let sum = spec.add(&spec.iota(3), &spec.iota(4)).unwrap();
        assert_eq!(
            sum,
            CompactPoint {
                factors: vec![FactorPoint::Cyclic(2)]
            }
        );
    }

    #[test]
    fn triadic_add_carries() {
        // [2,0] + [1,0] = [0,1] since 2 + 1 = 3
        let spec = CompactificationSpec::triadic(2);
        let sum = spec.add(&spec.iota(2), &spec.iota(1)).unwrap();
        assert_eq!(
            sum,
            CompactPoint {
                factors: vec![FactorPoint::Triadic(vec![0, 1])]
            }
        );
    }

    #[test]
    fn torus_add_reduces_mod_one() {
        let spec = CompactificationSpec::torus(vec![0.75.into()]);
        let p = CompactPoint {
            factors: vec![FactorPoint::Torus(vec![0.75])],
        };
        let q = CompactPoint {
            factors: vec![FactorPoint::Torus(vec![0.5])],
        };
        let sum = spec.add(&p, &q).unwrap();
        assert_eq!(
            sum,
            CompactPoint {
                factors: vec![FactorPoint::Torus(vec![0.25])]
            }
        );
    }

    #[test]
    fn homomorphism_in_bounded_range() {
        let spec = CompactificationSpec::product(vec![
            CompactificationSpec::torus(vec![golden().into(), Alpha::Rational { p: 1, q: 4 }]),
            CompactificationSpec::cyclic(7),
            CompactificationSpec::triadic(5),
        ])
        .unwrap();
        for k in -40i64..40 {
            for l in -40i64..40 {
                let sum = spec.add(&spec.iota(k), &spec.iota(l)).unwrap();
                let direct = spec.iota(k + l);
                for (a, b) in sum.factors.iter().zip(direct.factors.iter()) {
                    match (a, b) {
                        (FactorPoint::Torus(xs), FactorPoint::Torus(ys)) => {
                            for (x, y) in xs.iter().zip(ys.iter()) {
                                assert!(circle_distance(*x, *y) < 1e-12, "{x} vs {y}");
                            }
                        }
                        _ => assert_eq!(a, b),
                    }
                }
            }
        }
    }

    #[test]
    fn triadic_periodicity() {
        let spec = CompactificationSpec::triadic(4);
        let period = pow3(4);
        for k in [-100i64, -1, 0, 7, 80, 6560] {
            assert_eq!(spec.iota(k), spec.iota(k + period));
        }
    }

    #[test]
    fn product_flattens_and_collapses() {
        let single = CompactificationSpec::product(vec![CompactificationSpec::cyclic(2)]).unwrap();
        assert_eq!(single, CompactificationSpec::cyclic(2));

        let crt = CompactificationSpec::product(vec![
            CompactificationSpec::cyclic(2),
            CompactificationSpec::cyclic(3),
        ])
        .unwrap();
        assert_eq!(
            crt.iota(5),
            CompactPoint {
                factors: vec![FactorPoint::Cyclic(1), FactorPoint::Cyclic(2)]
            }
        );

        let nested =
            CompactificationSpec::product(vec![crt.clone(), CompactificationSpec::triadic(2)])
                .unwrap();
        assert_eq!(nested.factors().len(), 3);
        nested.validate().unwrap();
    }

    #[test]
    fn product_of_nothing_is_rejected() {
        assert!(CompactificationSpec::product(vec![]).is_err());
        assert!(CompactificationSpec::Product(vec![]).validate().is_err());
    }

    #[test]
    fn mixed_product_concatenates_embeddings() {
        let spec = CompactificationSpec::product(vec![
            CompactificationSpec::torus(vec![golden().into()]),
            CompactificationSpec::triadic(2),
        ])
        .unwrap();
        let p = spec.iota(7);
        assert_eq!(p.factors.len(), 2);
        match (&p.factors[0], &p.factors[1]) {
            (FactorPoint::Torus(cs), FactorPoint::Triadic(ds)) => {
                assert!((cs[0] - (7.0 * golden()).rem_euclid(1.0)).abs() < 1e-15);
                assert_eq!(ds, &vec![1, 2]); // 7 = 1 + 2*3
            }
            _ => panic!("unexpected factor kinds"),
        }
    }

    #[test]
    fn json_round_trip_has_fixed_field_names() {
        let spec = CompactificationSpec::product(vec![
            CompactificationSpec::torus(vec![0.41421356.into()]),
            CompactificationSpec::cyclic(9),
            CompactificationSpec::triadic(12),
        ])
        .unwrap();
        let json = spec.to_json();
        assert_eq!(
            json,
            r#"{"product":[{"torus":[0.41421356]},{"cyclic":9},{"triadic":{"digits":12}}]}"#
        );
        assert_eq!(CompactificationSpec::from_json(&json).unwrap(), spec);

        let rational = CompactificationSpec::torus(vec![Alpha::Rational { p: 1, q: 2 }]);
        let json = rational.to_json();
        assert_eq!(json, r#"{"torus":[{"p":1,"q":2}]}"#);
        assert_eq!(CompactificationSpec::from_json(&json).unwrap(), rational);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(CompactificationSpec::Torus(vec![]).validate().is_err());
        assert!(CompactificationSpec::Torus(vec![1.5.into()])
            .validate()
            .is_err());
        assert!(CompactificationSpec::Cyclic(0).validate().is_err());
        assert!(CompactificationSpec::Triadic { digits: 0 }
            .validate()
            .is_err());
        assert!(CompactificationSpec::from_json("{\"cyclic\":0}").is_err());
        assert!(CompactificationSpec::from_json("not json").is_err());
    }

    #[test]
    fn rational_rotation_has_finite_exact_image() {
        let spec = CompactificationSpec::torus(vec![Alpha::Rational { p: 2, q: 5 }]);
        for k in -20i64..20 {
            let p = spec.iota(k);
            let FactorPoint::Torus(cs) = &p.factors[0] else {
                panic!()
            };
            let expected = (k.rem_euclid(5) * 2).rem_euclid(5) as f64 / 5.0;
            assert_eq!(cs[0], expected);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn homomorphism_everywhere(
                k in -1_000_000i64..1_000_000,
                l in -1_000_000i64..1_000_000,
                modulus in 1u64..10_000,
                digits in 1usize..12,
                alpha in 0.0f64..1.0,
            ) {
                prop_assume!(alpha < 1.0);
                let spec = CompactificationSpec::product(vec![
                    CompactificationSpec::torus(vec![alpha.into()]),
                    CompactificationSpec::cyclic(modulus),
                    CompactificationSpec::triadic(digits),
                ])
                .unwrap();
                let sum = spec.add(&spec.iota(k), &spec.iota(l)).unwrap();
                let direct = spec.iota(k + l);
                for (a, b) in sum.factors.iter().zip(direct.factors.iter()) {
                    match (a, b) {
                        (FactorPoint::Torus(xs), FactorPoint::Torus(ys)) => {
                            prop_assert!(circle_distance(xs[0], ys[0]) < 1e-9);
                        }
                        _ => prop_assert_eq!(a, b),
                    }
                }
            }

            #[test]
            fn cyclic_and_triadic_points_stay_in_shape(k in proptest::num::i64::ANY, modulus in 1u64..1_000, digits in 1usize..10) {
                let spec = CompactificationSpec::product(vec![
                    CompactificationSpec::cyclic(modulus),
                    CompactificationSpec::triadic(digits),
                ])
                .unwrap();
                let p = spec.iota(k);
                prop_assert!(p.check_shape(&spec).is_ok());
            }
        }
    }
}
