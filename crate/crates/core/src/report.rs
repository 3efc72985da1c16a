//! Canonical JSON encodings of results.
//!
//! Objects are `serde_json::Map`s, which keep keys sorted, so output is byte-stable.
//! Rationals are `"p/q"` strings; scalars are objects over the basis `1, i, sqrt2, isqrt2`.

use serde_json::{json, Map, Value};

use crate::exact::{rational_to_pq, Rational, Scalar};
use crate::fields::{HoloVectorField, LatticePoint};
use crate::germs::{HolBasisReport, LeviData, Tangency};
use crate::liealg::{Grading, KillingData, LiePresentation, Solvability};
use crate::matrixgeo::combinatorics::{Cardinality, QrSeries, QtCertificate, QtClass, QtSampleReport};
use crate::matrixgeo::delta::DeltaReport;
use crate::matrixgeo::maps::{CheckOutcome, MapReport};
use crate::matrixgeo::tube::{AffineReport, ConeTangency, TubeCertificate, TubeClass, TubeSolveReport};
use crate::series::{monomial_string, TruncatedSeries};

pub fn rational(r: &Rational) -> Value {
    Value::String(rational_to_pq(r))
}

pub fn scalar(s: &Scalar) -> Value {
    let [a, b, c, d] = s.components();
    json!({ "1": rational(a), "i": rational(b), "sqrt2": rational(c), "isqrt2": rational(d) })
}

pub fn scalars(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn scalar_matrix(m: &[Vec<Scalar>]) -> Value {
    Value::Array(m.iter().map(|r| scalars(r)).collect())
}

pub fn rational_matrix(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(rational).collect())).collect())
}

pub fn lattice(l: &LatticePoint) -> Value {
    Value::String(l.to_string())
}

/// `{coordinate: {monomial: scalar}}`, omitting zero components.
pub fn field(f: &HoloVectorField) -> Value {
    let vars = f.vars();
    let mut out = Map::new();
    for (k, m, c) in f.terms() {
        let mut exps = m.0.clone();
        exps.resize(vars.len(), 0);
        let entry = out.entry(vars.coordinate_name(k).to_string()).or_insert_with(|| Value::Object(Map::new()));
        entry.as_object_mut().expect("object").insert(monomial_string(vars, &exps), scalar(&c));
    }
    Value::Object(out)
}

/// `{monomial: scalar}` for a series.
pub fn series(s: &TruncatedSeries) -> Value {
    let mut out = Map::new();
    for (m, c) in s.poly().terms() {
        out.insert(monomial_string(s.vars(), &m.0), scalar(c));
    }
    json!({ "cutoff": s.cutoff(), "terms": Value::Object(out) })
}

pub fn hol_basis(r: &HolBasisReport) -> Value {
    json!({
        "degree_bound": r.degree_bound,
        "truncation": r.truncation,
        "dimension": r.dimension,
        "unknowns": r.unknowns,
        "basis": r.basis.iter().map(field).collect::<Vec<_>>(),
        "stability": r.stability.iter().map(|(d, n)| json!({ "truncation": d, "dimension": n })).collect::<Vec<_>>(),
        "stable": r.stable,
    })
}

pub fn tangency(t: &Tangency) -> Value {
    match t {
        Tangency::Tangent => json!({ "tangent": true }),
        Tangency::Residual { leading_monomial, leading_coefficient, terms } => json!({
            "tangent": false,
            "leading_monomial": leading_monomial,
            "leading_coefficient": scalar(leading_coefficient),
            "residual_terms": terms,
        }),
    }
}

pub fn killing(k: &KillingData) -> Value {
    json!({
        "matrix": rational_matrix(&k.matrix),
        "rank": k.rank,
        "signature": [k.signature.0, k.signature.1],
    })
}

/// Nonzero structure constants `c_ij^k` for `i < j`, as `[i, j, k, c]`.
pub fn structure(p: &LiePresentation) -> Value {
    let mut out = Vec::new();
    for (i, row) in p.structure.iter().enumerate() {
        for (j, cs) in row.iter().enumerate().skip(i + 1) {
            for (k, c) in cs.iter().enumerate() {
                if !num_traits::Zero::is_zero(c) {
                    out.push(json!([i, j, k, rational(c)]));
                }
            }
        }
    }
    Value::Array(out)
}

pub fn solvability(s: &Solvability) -> Value {
    json!({ "solvable": s.solvable, "derived_dims": s.derived_dims })
}

pub fn grading(g: &Grading) -> Value {
    let mut dims = Map::new();
    for (l, d) in &g.dims {
        dims.insert(l.to_string(), json!(d));
    }
    json!({
        "weights": Value::Object(dims),
        "total": g.total,
        "complex_dim": g.complex_dim,
        "closure_ok": g.closure_ok,
        "violations": g.violations.iter().map(|(a, b)| json!([lattice(a), lattice(b)])).collect::<Vec<_>>(),
    })
}

pub fn levi(l: &LeviData) -> Value {
    json!({
        "matrix": scalar_matrix(&l.matrix),
        "kernel": scalar_matrix(&l.kernel),
        "determinant": l.determinant.as_ref().map(scalar),
        "hermitian": l.is_hermitian(),
    })
}

fn check(c: &CheckOutcome) -> Value {
    json!({ "ok": c.ok, "first_residual": c.first_residual, "residual_terms": c.residual_terms })
}

pub fn map_report(r: &MapReport) -> Value {
    json!({
        "map": r.map.to_string(),
        "truncation": r.truncation,
        "composition": check(&r.composition),
        "target_identity": check(&r.target_identity),
        "base_point": scalars(&r.base_point),
        "base_image": scalars(&r.base_image),
        "base_point_ok": r.base_point_ok,
        "passed": r.passed(),
    })
}

pub fn tube_certificate(c: &TubeCertificate) -> Value {
    let class = match c.class {
        TubeClass::OnT => "on_T",
        TubeClass::InH => "in_H",
        TubeClass::Neither => "neither",
    };
    json!({ "class": class, "det_real_part": scalar(&c.det_sum), "re_trace": scalar(&c.re_trace) })
}

pub fn affine(r: &AffineReport) -> Value {
    json!({
        "identity_holds": r.identity_holds,
        "factor": rational(&r.factor),
        "samples": r.samples,
        "samples_on_t": r.samples_on_t,
        "translation_ok": r.translation_ok,
    })
}

pub fn cone_tangency(c: &ConeTangency) -> Value {
    json!({
        "tangent": c.tangent,
        "residual_terms": c.residual_terms,
        "delta_multiple": c.delta_multiple.as_ref().map(scalar),
    })
}

pub fn tube_solve(r: &TubeSolveReport) -> Value {
    json!({
        "degree_bound": r.degree_bound,
        "unknowns": r.unknowns,
        "dimension": r.dimension,
        "within_sp2": r.within_sp2,
    })
}

pub fn delta(r: &DeltaReport) -> Value {
    json!({
        "j_flip": r.j_flip,
        "real_samples": r.real_samples,
        "real_ok": r.real_ok,
        "hermitian_samples": r.hermitian_samples,
        "hermitian_ok": r.hermitian_ok,
        "critical_example": scalar(&r.critical_example),
    })
}

pub fn qt_certificate(c: &QtCertificate) -> Value {
    let class = match &c.class {
        QtClass::InN { r, s } => json!({ "in": "N", "r": rational(r), "s": rational(s) }),
        QtClass::InW => json!({ "in": "W" }),
    };
    json!({
        "class": class,
        "phi": [scalar(&c.phi.0), scalar(&c.phi.1)],
        "bound": rational(&c.bound),
        "relation": format!("{:?}", c.relation),
        "holds": c.holds(),
    })
}

pub fn qt_samples(r: &QtSampleReport) -> Value {
    json!({ "n_samples": r.n_samples, "n_ok": r.n_ok, "w_samples": r.w_samples, "w_ok": r.w_ok })
}

/// Coefficients up to `shown` are listed; the radius is estimated at the top index.
pub fn qr(s: &QrSeries, shown: usize) -> Value {
    let upto = shown.min(s.k_max);
    json!({
        "k_max": s.k_max,
        "c_over_pi": s.c_over_pi[..=upto].iter().map(rational).collect::<Vec<_>>(),
        "a_over_pi": s.a_over_pi[..=upto].iter().map(rational).collect::<Vec<_>>(),
        "radius_index": s.radius_index,
        "radius_estimate": format!("{:.6}", s.radius_estimate),
    })
}

pub fn cardinality(c: &Cardinality) -> Value {
    match c {
        Cardinality::Finite(p) => Value::String(p.to_string()),
        Cardinality::Unbounded => Value::String("unbounded".into()),
    }
}
