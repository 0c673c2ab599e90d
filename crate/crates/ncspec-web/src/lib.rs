//! Browser bindings: the localization lattice of `Z/n`, the embedding of its
//! prime spectrum, and global-section dimensions on a skew projective line.
//! Each export returns a JSON string and throws the error message on failure.

use ncspec::commbridge::embed_phi;
use ncspec::io;
use ncspec::latspace::{build_semilattice, Semilattice};
use ncspec::rings::RingDescriptor;
use ncspec::sheafspec::ncspec;
use ncspec::skewproj::{build_proj, gamma, GradedModulePresentation, SkewSpec};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Rings above this size make the lattice enumeration too slow for a page.
const MAX_N: u32 = 720;

fn modular(n: u32) -> Result<RingDescriptor, String> {
    if !(1..=MAX_N).contains(&n) {
        return Err(format!("n must be between 1 and {MAX_N}"));
    }
    Ok(RingDescriptor::modular(u64::from(n)))
}

pub fn lattice_json(n: u32) -> Result<String, String> {
    let r = modular(n)?;
    let Semilattice::Finite(l) = build_semilattice(&r).map_err(|e| e.to_string())? else {
        return Err("Z/n always has a finite lattice".into());
    };
    let space = ncspec(&r).map_err(|e| e.to_string())?;
    Ok(json!({
        "ring": r.to_string(),
        "cells": l.cells.iter().map(|c| json!({"label": c.label, "localization": c.localized.result.to_string()})).collect::<Vec<_>>(),
        "hasse": l.hasse,
        "dot": l.to_dot(),
        "points": (0..space.len()).map(|p| space.point_label(p)).collect::<Vec<_>>(),
    })
    .to_string())
}

pub fn embedding_json(n: u32) -> Result<String, String> {
    let e = embed_phi(&modular(n)?).map_err(|e| e.to_string())?;
    let mut v = e.to_json();
    v["passed"] = json!(e.passed());
    Ok(v.to_string())
}

/// Dimensions of `Γ(X, O(d))` on the projective line over `Q_q[x, y]` with
/// `yx = q xy`, for the free module with one generator in degree `shift`.
pub fn gamma_json(q: &str, shift: i32, lo: i32, hi: i32) -> Result<String, String> {
    if lo > hi || hi - lo > 24 {
        return Err("choose a window of at most 25 degrees".into());
    }
    let doc = json!({"schema_version": io::SCHEMA_VERSION, "kind": "skew_laurent", "nvars": 2, "lambda": [[q]]});
    let spec: SkewSpec = match io::parse_ring(&doc.to_string()).map_err(|e| e.to_string())? {
        RingDescriptor::SkewLaurent(s) => s,
        _ => unreachable!("the document asks for a skew Laurent ring"),
    };
    let x = build_proj(&spec).map_err(|e| e.to_string())?;
    let m = GradedModulePresentation::free(&spec, vec![i64::from(shift)]);
    let bound = i64::from(hi.abs().max(lo.abs())) + 2;
    let t = gamma(&x, &m, (i64::from(lo), i64::from(hi)), bound, bound).map_err(|e| e.to_string())?;
    Ok(t.to_json().to_string())
}

#[wasm_bindgen]
pub fn lattice(n: u32) -> Result<String, JsValue> {
    lattice_json(n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn embedding(n: u32) -> Result<String, JsValue> {
    embedding_json(n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn gamma_dims(q: &str, shift: i32, lo: i32, hi: i32) -> Result<String, JsValue> {
    gamma_json(q, shift, lo, hi).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn z6_lattice_is_a_diamond() {
        let v = parse(&lattice_json(6).unwrap());
        assert_eq!(v["cells"].as_array().unwrap().len(), 4);
        assert_eq!(v["hasse"].as_array().unwrap().len(), 4);
        assert!(v["dot"].as_str().unwrap().starts_with("digraph"));
    }

    #[test]
    fn embedding_passes_for_small_moduli() {
        for n in [1, 2, 12, 30] {
            assert_eq!(parse(&embedding_json(n).unwrap())["passed"], true, "Z/{n}");
        }
        assert!(embedding_json(0).is_err());
    }

    #[test]
    fn gamma_of_a_shifted_free_module() {
        let v = parse(&gamma_json("3", 2, 0, 4).unwrap());
        let dims: Vec<u64> = v["degrees"].as_array().unwrap().iter().map(|d| d["dim"].as_u64().unwrap()).collect();
        assert_eq!(dims, vec![0, 0, 1, 2, 3]);
        assert!(gamma_json("0", 0, 0, 1).is_err());
        assert!(gamma_json("2", 0, 0, 40).is_err());
    }
}
