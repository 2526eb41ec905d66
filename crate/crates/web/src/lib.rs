//! Browser bindings: gallery spaces, subset queries and small seeded builds,
//! all exchanged as JSON strings.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use steiner::builder::{build_with, pair_coverage_of, BuildConfig};
use steiner::dimension;
use steiner::gallery;
use steiner::mu::MuFunction;
use steiner::{Error, LinearSpace, PointSet};

/// Largest build the page will run; keeps the tab responsive.
pub const MAX_DEMO_STEPS: usize = 400;

fn space_json(m: &LinearSpace) -> Value {
    let lines: Vec<&[usize]> = m.lines().iter().map(|l| l.points()).collect();
    json!({ "points": m.n(), "lines": lines, "ls": m.to_ls_string() })
}

pub fn gallery_value(name: &str, k: usize) -> Result<Value, Error> {
    let m = match name {
        "fano" => gallery::fano(),
        "ag23" => gallery::ag23(),
        "ck" | "dk" | "chain" if k == 0 => return Err(Error::Invalid("k must be at least 1".into())),
        "ck" => gallery::cycle_ck(k).space().clone(),
        "dk" => gallery::cycle_dk(k).space().clone(),
        "chain" => gallery::fano_chain(k).pop().expect("chain starts with A_0"),
        _ => return Err(Error::Invalid(format!("unknown gallery entry {name:?}"))),
    };
    Ok(space_json(&m))
}

pub fn query_value(ls: &str, set: &[usize]) -> Result<Value, Error> {
    let m = LinearSpace::parse_ls(ls)?;
    let x: PointSet = set.iter().copied().collect();
    m.check_set(&x)?;
    Ok(json!({
        "delta": m.delta(&x)?,
        "d": dimension::d(&m, &x)?,
        "icl": dimension::icl(&m, &x)?,
        "closure": dimension::d_closure(&m, &x)?,
    }))
}

pub fn build_value(alpha: i64, steps: usize, seed: u64) -> Result<Value, Error> {
    if steps > MAX_DEMO_STEPS {
        return Err(Error::SizeLimit { what: "demo build", size: steps, limit: MAX_DEMO_STEPS });
    }
    let cfg = BuildConfig { snapshot_every: 20, ..BuildConfig::new(steps, seed, 8) };
    let (m, trace) = build_with(&MuFunction::new(alpha), &cfg)?;
    let coverage: Vec<(usize, f64)> = trace.snapshots.iter().map(|(at, s)| (*at, pair_coverage_of(s, &s.points()))).collect();
    let mut v = space_json(&m);
    v["coverage"] = json!(coverage);
    v["trace"] = json!(trace.to_trace_string());
    Ok(v)
}

fn to_js(r: Result<Value, Error>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn gallery_space(name: &str, k: usize) -> Result<String, JsValue> {
    to_js(gallery_value(name, k))
}

#[wasm_bindgen]
pub fn query(ls: &str, set: &[usize]) -> Result<String, JsValue> {
    to_js(query_value(ls, set))
}

#[wasm_bindgen]
pub fn build_demo(alpha: i32, steps: usize, seed: u32) -> Result<String, JsValue> {
    to_js(build_value(alpha as i64, steps, seed as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_queries() {
        let g = gallery_value("fano", 0).unwrap();
        assert_eq!(g["points"], 7);
        let q = query_value(g["ls"].as_str().unwrap(), &[0, 1]).unwrap();
        assert_eq!(q["delta"], 2);
        assert_eq!(q["d"], 0);
        assert_eq!(q["closure"], json!([0, 1, 2, 3, 4, 5, 6]));
    }

    #[test]
    fn small_build() {
        let v = build_value(1, 30, 3).unwrap();
        assert!(v["lines"].as_array().unwrap().iter().all(|l| l.as_array().unwrap().len() == 3));
        assert!(build_value(1, MAX_DEMO_STEPS + 1, 3).is_err());
        assert!(gallery_value("ck", 0).is_err());
    }
}
