use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use lightcone::dsl;
use lightcone::exact::{parse_rational, qi, Rational, Scalar};
use lightcone::fields::named::{zeta1, zeta2};
use lightcone::fields::HoloVectorField;
use lightcone::germs::HypersurfaceGerm;
use lightcone::liealg::LiePresentation;
use lightcone::matrixgeo::combinatorics::{lemma_qt_samples, pi1_tube, qr_series, sigma_t, SigmaInput};
use lightcone::matrixgeo::delta::delta_checks;
use lightcone::matrixgeo::maps::{map_verify, MapId};
use lightcone::matrixgeo::theta::{verify_composition, ExpPoly, ThetaElement};
use lightcone::matrixgeo::tube::{affine_invariance_check, cone_tangency, matrix_zetas, random_gl2, sp2_basis, tube_hol_solve};
use lightcone::report;
use lightcone::series::VarSet;

use crate::{Bounds, CliError, Command, Outcome, SurfaceArgs};

type Res<T> = std::result::Result<T, CliError>;

/// Resolved surface: a germ of the family or a custom one, or the tube model.
enum Surface {
    Germ(HypersurfaceGerm),
    Tube,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn family_t(s: &SurfaceArgs) -> Res<Option<Rational>> {
    match s.surface.as_str() {
        "M0" => Ok(Some(qi(0))),
        "M1" => Ok(Some(qi(1))),
        "Mt" => {
            let t = s.t.as_deref().ok_or_else(|| usage("surface Mt needs --t"))?;
            Ok(Some(parse_rational(t)?))
        }
        _ => Ok(None),
    }
}

fn resolve(s: &SurfaceArgs, cutoff: u32) -> Res<Surface> {
    if let Some(t) = family_t(s)? {
        return Ok(Surface::Germ(HypersurfaceGerm::family(&t, cutoff)?));
    }
    if s.surface == "T" {
        return Ok(Surface::Tube);
    }
    let text = match (&s.germ_file, s.surface.as_str()) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
        (None, "file") => return Err(usage("surface file needs --germ-file")),
        (None, expr) => expr.to_string(),
    };
    Ok(Surface::Germ(dsl::parse_germ(&text, cutoff, s.normal_form)?))
}

fn resolve_germ(s: &SurfaceArgs, cutoff: u32) -> Res<HypersurfaceGerm> {
    match resolve(s, cutoff)? {
        Surface::Germ(g) => Ok(g),
        Surface::Tube => Err(usage("this command needs a hypersurface germ, not T")),
    }
}

fn surface_echo(s: &SurfaceArgs) -> Value {
    let mut v = json!({ "surface": s.surface });
    if let Some(t) = &s.t {
        v["t"] = json!(t);
    }
    if let Some(p) = &s.germ_file {
        v["germ_file"] = json!(p.display().to_string());
    }
    if s.normal_form {
        v["normal_form"] = json!(true);
    }
    v
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(a), Value::Object(b)) = (a.as_object_mut(), b) {
        a.extend(b);
    }
    a
}

/// The job as resolved from flags and environment.
pub fn echo(cmd: &Command) -> Value {
    let (name, args) = match cmd {
        Command::HolDim { surface, bounds, expect_dim } => (
            "hol-dim",
            merge(surface_echo(surface), json!({ "d": bounds.d, "D": bounds.big_d, "expect_dim": expect_dim })),
        ),
        Command::Tangency { surface, field, big_d } => {
            ("tangency", merge(surface_echo(surface), json!({ "field": field, "D": big_d })))
        }
        Command::Bracket { field, expect } => ("bracket", json!({ "field": field, "expect": expect })),
        Command::Classify { surface, bounds, expect_label } => (
            "classify",
            merge(surface_echo(surface), json!({ "d": bounds.d, "D": bounds.big_d, "expect_label": expect_label })),
        ),
        Command::Grading { surface, bounds } => {
            ("grading", merge(surface_echo(surface), json!({ "d": bounds.d, "D": bounds.big_d })))
        }
        Command::Levi { surface, z1, z2, v } => {
            ("levi", merge(surface_echo(surface), json!({ "z1": z1, "z2": z2, "v": v })))
        }
        Command::VerifyMap { map, p, k, big_d } => ("verify-map", json!({ "map": map, "p": p, "k": k, "D": big_d })),
        Command::TubeChecks { samples, seed } => ("tube-checks", json!({ "samples": samples, "seed": seed })),
        Command::Qt { samples, seed } => ("qt", json!({ "samples": samples, "seed": seed })),
        Command::Qr { kmax } => ("qr", json!({ "kmax": kmax })),
        Command::Sigma { t } => ("sigma", json!({ "t": t })),
        Command::Pi1 { n, p, q } => ("pi1", json!({ "n": n, "p": p, "q": q })),
    };
    json!({ "command": name, "args": args })
}

pub fn run(cmd: &Command) -> Res<Outcome> {
    let (results, passed) = match cmd {
        Command::HolDim { surface, bounds, expect_dim } => hol_dim(surface, bounds, *expect_dim)?,
        Command::Tangency { surface, field, big_d } => tangency(surface, field, *big_d)?,
        Command::Bracket { field, expect } => bracket(field, expect.as_deref())?,
        Command::Classify { surface, bounds, expect_label } => classify(surface, bounds, expect_label.as_deref())?,
        Command::Grading { surface, bounds } => grading(surface, bounds)?,
        Command::Levi { surface, z1, z2, v } => levi(surface, z1, z2, v.as_deref())?,
        Command::VerifyMap { map, p, k, big_d } => verify_map(map, *p, *k, *big_d)?,
        Command::TubeChecks { samples, seed } => tube_checks(*samples, *seed)?,
        Command::Qt { samples, seed } => {
            let r = lemma_qt_samples(*samples, *samples, *seed)?;
            (report::qt_samples(&r), r.passed())
        }
        Command::Qr { kmax } => qr(*kmax)?,
        Command::Sigma { t } => sigma(t)?,
        Command::Pi1 { n, p, q } => pi1(*n, *p, *q)?,
    };
    Ok(Outcome { job: echo(cmd), results, passed })
}

fn check_bounds(b: &Bounds) -> Res<()> {
    if b.d < 1 {
        return Err(usage("--d must be at least 1"));
    }
    if b.big_d < 2 * b.d + 2 {
        return Err(usage(format!("--D must be at least 2d + 2 = {}", 2 * b.d + 2)));
    }
    Ok(())
}

/// The basis of the algebra for a surface: solved for a germ, fixed for the tube.
fn algebra(s: &SurfaceArgs, b: &Bounds) -> Res<(Vec<HoloVectorField>, Option<Value>)> {
    check_bounds(b)?;
    match resolve(s, b.big_d + 1)? {
        Surface::Tube => Ok((sp2_basis(), None)),
        Surface::Germ(g) => {
            let r = g.hol_solve(b.d, b.big_d)?;
            let summary = json!({
                "degree_bound": r.degree_bound,
                "truncation": r.truncation,
                "unknowns": r.unknowns,
                "stability": report::hol_basis(&r)["stability"].clone(),
                "stable": r.stable,
            });
            Ok((r.basis, Some(summary)))
        }
    }
}

fn hol_dim(s: &SurfaceArgs, b: &Bounds, expect: Option<usize>) -> Res<(Value, bool)> {
    check_bounds(b)?;
    let g = resolve_germ(s, b.big_d + 1)?;
    let r = g.hol_solve(b.d, b.big_d)?;
    let p = LiePresentation::new(r.basis.clone())?;
    let label = if p.closed { Some(p.classify()?) } else { None };
    let mut out = report::hol_basis(&r);
    out["closed"] = json!(p.closed);
    out["label"] = json!(label);
    let passed = p.closed && expect.map_or(true, |n| n == r.dimension);
    Ok((out, passed))
}

fn tangency(s: &SurfaceArgs, fields: &[String], big_d: u32) -> Res<(Value, bool)> {
    let g = resolve_germ(s, big_d + 1)?;
    let vars = g.ambient_vars();
    let mut out = Vec::new();
    let mut all = true;
    for text in fields {
        let xi = dsl::parse_field(text, &vars)?;
        let t = g.is_tangent(&xi, big_d)?;
        all &= t.is_tangent();
        out.push(merge(json!({ "field": text, "parsed": xi.to_string() }), report::tangency(&t)));
    }
    Ok((json!({ "fields": out, "truncation": big_d }), all))
}

/// Parses fields on a common coordinate set, the largest any of them needs.
fn parse_fields(texts: &[&str]) -> Res<Vec<HoloVectorField>> {
    let mut vars: Option<VarSet> = None;
    for t in texts {
        let v = dsl::field_vars_for(&dsl::parse_field_expr(t)?);
        if vars.as_ref().map_or(true, |cur| v.len() > cur.len()) {
            vars = Some(v);
        }
    }
    let vars = vars.ok_or_else(|| usage("no fields given"))?;
    texts.iter().map(|t| dsl::parse_field(t, &vars).map_err(CliError::from)).collect()
}

fn bracket(fields: &[String], expect: Option<&str>) -> Res<(Value, bool)> {
    if fields.len() != 2 {
        return Err(usage("bracket takes exactly two --field arguments"));
    }
    let mut texts: Vec<&str> = fields.iter().map(String::as_str).collect();
    texts.extend(expect);
    let parsed = parse_fields(&texts)?;
    let xy = parsed[0].bracket(&parsed[1])?;
    let yx = parsed[1].bracket(&parsed[0])?;
    let antisymmetric = xy.add(&yx).is_zero();
    let matches = parsed.get(2).map(|e| *e == xy);
    let out = json!({
        "bracket": report::field(&xy),
        "bracket_dsl": xy.to_string(),
        "antisymmetric": antisymmetric,
        "matches_expected": matches,
    });
    Ok((out, antisymmetric && matches.unwrap_or(true)))
}

fn classify(s: &SurfaceArgs, b: &Bounds, expect: Option<&str>) -> Res<(Value, bool)> {
    let (basis, solve) = algebra(s, b)?;
    let p = LiePresentation::new(basis)?;
    if !p.closed {
        let out = json!({ "dimension": p.dim(), "closed": false, "offending": p.offending, "solve": solve });
        return Ok((out, false));
    }
    let label = p.classify()?;
    let jacobi = p.jacobi_violations();
    let out = json!({
        "dimension": p.dim(),
        "closed": true,
        "basis": p.basis.iter().map(report::field).collect::<Vec<_>>(),
        "structure": report::structure(&p),
        "killing": report::killing(&p.killing()?),
        "solvability": report::solvability(&p.solvability()?),
        "jacobi_violations": jacobi,
        "label": label,
        "solve": solve,
    });
    Ok((out, jacobi == 0 && expect.map_or(true, |e| e == label)))
}

fn grading(s: &SurfaceArgs, b: &Bounds) -> Res<(Value, bool)> {
    let tube = matches!(resolve(s, 2)?, Surface::Tube);
    let (basis, solve) = algebra(s, b)?;
    let (h1, h2) = if tube { matrix_zetas() } else { (zeta1(), zeta2()) };
    if !tube && basis.first().map_or(false, |f| f.vars() != h1.vars()) {
        return Err(usage("grading by ζ1, ζ2 needs coordinates w, z1, z2"));
    }
    let p = LiePresentation::new(basis)?;
    let g = p.ad_grading(&h1, &h2, 4)?;
    let mut out = report::grading(&g);
    out["solve"] = json!(solve);
    out["grading_element"] = json!(format!("{h1} + i({h2})"));
    Ok((out, g.closure_ok))
}

fn eval_scalar(text: &str) -> Res<Scalar> {
    Ok(dsl::parse_constant(text)?)
}

fn levi(s: &SurfaceArgs, z1: &str, z2: &str, v: Option<&str>) -> Res<(Value, bool)> {
    let g = resolve_germ(s, 4)?;
    let n = g.restricted_vars().n();
    let z: Vec<Scalar> = [z1, z2].iter().take(n).map(|t| eval_scalar(t)).collect::<Res<_>>()?;
    let v = v.map(eval_scalar).transpose()?;
    let l = g.levi_matrix(&z, v.as_ref())?;
    let hermitian = l.is_hermitian();
    Ok((report::levi(&l), hermitian))
}

fn verify_map(name: &str, p: usize, k: usize, big_d: u32) -> Res<(Value, bool)> {
    let id = MapId::parse(name, p, k)?;
    let r = map_verify(id, big_d)?;
    Ok((report::map_report(&r), r.passed()))
}

fn tube_checks(samples: usize, seed: u64) -> Res<(Value, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut affine_ok = 0;
    let mut first_failure = None;
    for i in 0..samples {
        let g = random_gl2(&mut rng);
        let r = affine_invariance_check(&g, 5, seed.wrapping_add(i as u64))?;
        if r.passed() {
            affine_ok += 1;
        } else if first_failure.is_none() {
            first_failure = Some(report::affine(&r));
        }
    }
    let basis = sp2_basis();
    let mut cone = Vec::new();
    for f in &basis {
        cone.push(merge(json!({ "field": f.to_string() }), report::cone_tangency(&cone_tangency(f)?)));
    }
    let cone_ok = cone.iter().all(|c| c["tangent"] == json!(true));
    let killing = LiePresentation::new(basis)?.killing()?;
    let delta = delta_checks(samples, seed)?;
    let quarter = ThetaElement { s: qi(1), psi_over_pi: lightcone::exact::q(1, 2), w: ExpPoly::zero() };
    let half = ThetaElement { s: qi(-1), psi_over_pi: qi(1), w: ExpPoly::zero() };
    let theta_ok = verify_composition(&quarter, &half, samples.max(1), seed)?;
    // no fields beyond sp(2) up to this degree; says nothing about higher degrees
    let solve = tube_hol_solve(4)?;
    let solve_ok = solve.dimension == 10 && solve.within_sp2;
    let passed =
        affine_ok == samples && cone_ok && killing.signature == (6, 4) && delta.passed() && theta_ok && solve_ok;
    let out = json!({
        "affine": { "samples": samples, "passed": affine_ok, "first_failure": first_failure },
        "cone_tangency": cone,
        "sp2_killing": report::killing(&killing),
        "delta": report::delta(&delta),
        "theta_composition": theta_ok,
        "polynomial_fields": report::tube_solve(&solve),
    });
    Ok((out, passed))
}

fn qr(kmax: usize) -> Res<(Value, bool)> {
    let s = qr_series(kmax)?;
    let exact = s.c_over_pi[2] == qi(1) && s.c_over_pi[4] == lightcone::exact::q(3, 4);
    Ok((report::qr(&s, 8), exact))
}

fn sigma(t: &str) -> Res<(Value, bool)> {
    let input = if t == "irrational" {
        SigmaInput::Irrational
    } else {
        let s = eval_scalar(t)?;
        match s.as_rational() {
            Some(r) => SigmaInput::Rational(r.clone()),
            None if s.is_real() && !s.is_zero() => SigmaInput::Irrational,
            None => return Err(usage(format!("t = {t} is not real"))),
        }
    };
    let c = sigma_t(&input)?;
    Ok((json!({ "sigma": report::cardinality(&c) }), true))
}

fn pi1(n: usize, p: Option<usize>, q: Option<usize>) -> Res<(Value, bool)> {
    let pairs: Vec<(usize, usize)> = match (p, q) {
        (Some(p), Some(q)) => vec![(p, q)],
        (None, None) => (0..n).flat_map(|p| (0..n - p).map(move |q| (p, q))).filter(|&(p, q)| p + q > 0).collect(),
        _ => return Err(usage("give both --p and --q, or neither for the full table")),
    };
    let mut table = Vec::new();
    for (p, q) in pairs {
        table.push(json!({ "n": n, "p": p, "q": q, "pi1": pi1_tube(n, p, q)? }));
    }
    Ok((json!({ "table": table }), true))
}
