//! Browser demo bindings: coding strips, sliding-window density schedules
//! and the truncated Cantor profile, for the static page in `www/`.

use wasm_bindgen::prelude::*;

use hartmanlab::cantor;
use hartmanlab::density::{banach_density, fixtures, SeqFn};
use hartmanlab::sequence::hartman_bits;
use hartmanlab::{Alpha, CompactificationSpec, Window};

fn err_to_js<E: std::fmt::Display>(e: E) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Bits of the coding sequence of `window_json` inside `spec_json` along
/// the embedding, for rendering as a raster strip.
#[wasm_bindgen]
pub fn coding_strip(
    spec_json: &str,
    window_json: &str,
    start: i32,
    len: u32,
) -> Result<Vec<u8>, JsValue> {
    let spec = CompactificationSpec::from_json(spec_json).map_err(err_to_js)?;
    let window = Window::from_json(&spec, window_json).map_err(err_to_js)?;
    let slice = hartman_bits(&spec, &window, start as i64, len as usize).map_err(err_to_js)?;
    slice.bits().map_err(err_to_js)
}

/// Sturmian coding strip for the rotation by `alpha`.
#[wasm_bindgen]
pub fn sturmian_strip(alpha: f64, start: i32, len: u32) -> Result<Vec<u8>, JsValue> {
    let slice = hartmanlab::sequence::sturmian(Alpha::Value(alpha), start as i64, len as usize)
        .map_err(err_to_js)?;
    slice.bits().map_err(err_to_js)
}

/// Lower/upper window-average extrema along a doubling window schedule
/// `2^min_exp ..= 2^max_exp`, scanning starts over `[-scan, scan]`.
///
/// `kind` picks the sequence: `sturmian` (uses `alpha`), `parity`, `pow2`,
/// `blocks` or `blocks-even`. Returns JSON rows `[{"n":..,"inf":..,"sup":..}]`.
#[wasm_bindgen]
pub fn density_profile(
    kind: &str,
    alpha: f64,
    scan: u32,
    min_exp: u32,
    max_exp: u32,
) -> Result<String, JsValue> {
    if min_exp > max_exp || max_exp > 16 {
        return Err(err_to_js("window exponents must satisfy min <= max <= 16"));
    }
    let schedule: Vec<usize> = (min_exp..=max_exp).map(|e| 1usize << e).collect();
    let scan = scan as i64;
    let report = match kind {
        "sturmian" => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(err_to_js("alpha must lie in (0, 1)"));
            }
            let spec = CompactificationSpec::torus(vec![Alpha::Value(alpha)]);
            let window = Window::arc(alpha, 1.0).map_err(err_to_js)?;
            let eval = move |k: i64| {
                if window
                    .contains(&spec.iota(k))
                    .expect("arc window matches torus spec")
                {
                    1.0
                } else {
                    0.0
                }
            };
            banach_density(&SeqFn(eval), &schedule, scan)
        }
        "parity" => banach_density(&SeqFn(fixtures::parity), &schedule, scan),
        "pow2" => banach_density(&SeqFn(fixtures::pow2_indicator), &schedule, scan),
        "blocks" => banach_density(&SeqFn(fixtures::alternating_blocks), &schedule, scan),
        "blocks-even" => banach_density(
            &SeqFn(fixtures::alternating_blocks_even_part),
            &schedule,
            scan,
        ),
        other => return Err(err_to_js(format!("unknown sequence kind '{other}'"))),
    }
    .map_err(err_to_js)?;
    let rows: Vec<serde_json::Value> = report
        .per_window_extrema
        .iter()
        .map(|(n, inf, sup)| serde_json::json!({ "n": n, "inf": inf, "sup": sup }))
        .collect();
    Ok(serde_json::Value::Array(rows).to_string())
}

/// `f_n(k)` for `k` in `[0, kmax)`.
#[wasm_bindgen]
pub fn cantor_profile(n: u32, kmax: u32) -> Vec<f64> {
    (0..kmax as i64).map(|k| cantor::f_n(n, k)).collect()
}

/// Period mean of `f_n` against the exact value `1/2^n`, as JSON.
#[wasm_bindgen]
pub fn cantor_summary(n: u32) -> String {
    let mean = cantor::period_mean(n);
    let expected = 0.5f64.powi(n as i32);
    serde_json::json!({
        "n": n,
        "period": 3i64.pow(n),
        "period_mean": mean,
        "expected": expected,
        "abs_err": (mean - expected).abs(),
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_matches_library_bits() {
        let bits = coding_strip(r#"{"cyclic":2}"#, r#"{"residues":[0]}"#, 0, 6).unwrap();
        assert_eq!(bits, vec![1, 0, 1, 0, 1, 0]);
        let sturmian = sturmian_strip(0.61803398874989, 0, 5).unwrap();
        assert_eq!(sturmian, vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn density_profile_emits_json_rows() {
        let rows = density_profile("parity", 0.0, 4096, 4, 7).unwrap();
        let parsed: Vec<serde_json::Value> = serde_json::from_str(&rows).unwrap();
        assert_eq!(parsed.len(), 4);
        assert_eq!(parsed[0]["n"], 16);
        assert_eq!(parsed[0]["inf"], 0.5);
        assert_eq!(parsed[0]["sup"], 0.5);
    }

    #[test]
    fn cantor_summary_reports_small_error() {
        let summary: serde_json::Value = serde_json::from_str(&cantor_summary(5)).unwrap();
        assert_eq!(summary["expected"], 0.03125);
        assert!(summary["abs_err"].as_f64().unwrap() < 1e-9);
        assert_eq!(cantor_profile(5, 10).len(), 10);
    }
}
