//! Browser bindings: each export takes plain strings and returns a JSON document.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use lightcone::dsl::parse_constant;
use lightcone::exact::parse_rational;
use lightcone::fields::named::{zeta1, zeta2};
use lightcone::germs::HypersurfaceGerm;
use lightcone::liealg::LiePresentation;
use lightcone::matrixgeo::tube::{matrix_zetas, sp2_basis};
use lightcone::report;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn germ(t: &str, d_trunc: u32) -> Result<HypersurfaceGerm, String> {
    let t = parse_rational(t.trim()).map_err(err)?;
    HypersurfaceGerm::family(&t, d_trunc + 1).map_err(err)
}

/// Basis, dimension and label of the algebra of `M_t` (fields of degree ≤ 2, truncation 8).
pub fn hol_algebra_json(t: &str) -> Result<String, String> {
    let r = germ(t, 8)?.hol_solve(2, 8).map_err(err)?;
    let p = LiePresentation::new(r.basis.clone()).map_err(err)?;
    let (label, signature) = if p.closed {
        let k = p.killing().map_err(err)?;
        (Some(p.classify().map_err(err)?), Some(vec![k.signature.0, k.signature.1]))
    } else {
        (None, None)
    };
    let out = json!({
        "dimension": r.dimension,
        "basis": r.basis.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "closed": p.closed,
        "label": label,
        "killing_signature": signature,
    });
    Ok(out.to_string())
}

/// Levi matrix of `M_t` at `(z1, z2)`, entries given as DSL constants like `1/2 + I`.
pub fn levi_json(t: &str, z1: &str, z2: &str) -> Result<String, String> {
    let z = [parse_constant(z1).map_err(err)?, parse_constant(z2).map_err(err)?];
    let l = germ(t, 4)?.levi_matrix(&z, None).map_err(err)?;
    let show = |m: &[Vec<lightcone::exact::Scalar>]| -> Vec<Vec<String>> {
        m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    };
    let out = json!({
        "matrix": show(&l.matrix),
        "determinant": l.determinant.as_ref().map(|d| d.to_string()),
        "kernel_dim": l.kernel.len(),
        "exact": report::levi(&l),
    });
    Ok(out.to_string())
}

/// Weights of `ad(ζ1 + iζ2)` as `[re, im, dim]` triples; `t = "T"` uses the tube model.
pub fn root_diagram_json(t: &str) -> Result<String, String> {
    let (basis, (h1, h2)) = if t.trim() == "T" {
        (sp2_basis(), matrix_zetas())
    } else {
        (germ(t, 8)?.hol_solve(2, 8).map_err(err)?.basis, (zeta1(), zeta2()))
    };
    let g = LiePresentation::new(basis).map_err(err)?.ad_grading(&h1, &h2, 4).map_err(err)?;
    let points: Vec<Value> = g.dims.iter().map(|(l, d)| json!([l.re, l.im, d])).collect();
    Ok(json!({ "points": points, "total": g.total, "closure_ok": g.closure_ok }).to_string())
}

#[wasm_bindgen]
pub fn hol_algebra(t: &str) -> Result<String, JsValue> {
    hol_algebra_json(t).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn levi(t: &str, z1: &str, z2: &str) -> Result<String, JsValue> {
    levi_json(t, z1, z2).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn root_diagram(t: &str) -> Result<String, JsValue> {
    root_diagram_json(t).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn algebra_of_m1() {
        let v = parse(&hol_algebra_json("1").unwrap());
        assert_eq!(v["dimension"], 10);
        assert_eq!(v["label"], "so(2,3)");
        assert_eq!(v["killing_signature"], json!([6, 4]));
        assert!(hol_algebra_json("x").is_err());
    }

    #[test]
    fn levi_at_slice() {
        let v = parse(&levi_json("3", "1", "0").unwrap());
        assert_eq!(v["determinant"], "8");
        assert_eq!(v["kernel_dim"], 0);
        let v = parse(&levi_json("1", "1", "0").unwrap());
        assert_eq!(v["kernel_dim"], 1);
    }

    #[test]
    fn diagrams() {
        let v = parse(&root_diagram_json("T").unwrap());
        assert_eq!(v["points"].as_array().unwrap().len(), 9);
        let v = parse(&root_diagram_json("-1").unwrap());
        assert_eq!(v["total"], 6);
    }
}
