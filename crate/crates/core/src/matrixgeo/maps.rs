//! Cayley-type maps onto tubes over cones of symmetric matrices and their exact verification.

use std::fmt;

use super::symmat::*;
use super::tube::on_cone_parametrization;
use crate::error::{Error, Result};
use crate::exact::{qi, Scalar};
use crate::germs::HypersurfaceGerm;
use crate::poly::Poly;
use crate::ratmap::RationalMap;
use crate::series::{poly_string, TruncatedSeries, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapId {
    /// `z ↦ (z − e)(z + e)^{-1}` on symmetric 2×2 matrices.
    Cayley,
    /// `M_1 → T`.
    PhiOc,
    /// The partial Cayley map with blocks `p` (for `z2`) and `k` (for `w`).
    PhiOb { p: usize, k: usize },
}

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapId::Cayley => write!(f, "cayley"),
            MapId::PhiOc => write!(f, "phi_oc"),
            MapId::PhiOb { p, k } => write!(f, "phi_ob({p},{k})"),
        }
    }
}

impl MapId {
    /// Accepts `cayley`, `phi_oc`, `phi_ob` (with `p`, `k` supplied separately).
    pub fn parse(name: &str, p: usize, k: usize) -> Result<Self> {
        match name {
            "cayley" => Ok(MapId::Cayley),
            "phi_oc" => Ok(MapId::PhiOc),
            "phi_ob" => Ok(MapId::PhiOb { p, k }),
            other => Err(Error::InvalidArgument(format!("unknown map '{other}'"))),
        }
    }
}

fn sqrt2() -> Scalar {
    Scalar::sqrt2()
}

fn c(n: i64) -> Scalar {
    Scalar::from_int(n)
}

/// The Cayley map on coordinates `(z0, z1, z2) ↔ [[z0, z1], [z1, z2]]`, with its inverse.
pub fn cayley() -> RationalMap {
    let v = |i| Poly::var(3, i);
    let one = Poly::one(3);
    let (a, b, d) = (v(0), v(1), v(2));
    let fwd = RationalMap::new(
        vec![
            a.sub(&one).mul(&d.add(&one)).sub(&b.mul(&b)),
            b.scale(&c(2)),
            d.sub(&one).mul(&a.add(&one)).sub(&b.mul(&b)),
        ],
        a.add(&one).mul(&d.add(&one)).sub(&b.mul(&b)),
    )
    .expect("nonzero denominator");
    let inv = RationalMap::new(
        vec![
            one.add(&a).mul(&one.sub(&d)).add(&b.mul(&b)),
            b.scale(&c(2)),
            one.add(&d).mul(&one.sub(&a)).add(&b.mul(&b)),
        ],
        one.sub(&a).mul(&one.sub(&d)).sub(&b.mul(&b)),
    )
    .expect("nonzero denominator");
    fwd.with_inverse(inv).expect("dimensions agree")
}

/// `(w, z1, z2) ↦ (1 + z2)^{-1}(w + wz2 + z1², √2 z1, 1 − z2)`, written in the
/// coordinates `(a, b, c)` of `[[a, b], [b, c]]`.
pub fn phi_oc() -> RationalMap {
    let v = |i| Poly::var(3, i);
    let one = Poly::one(3);
    let (w, z1, z2) = (v(0), v(1), v(2));
    let fwd = RationalMap::new(
        vec![w.add(&w.mul(&z2)).add(&z1.mul(&z1)), z1.scale(&sqrt2()), one.sub(&z2)],
        one.add(&z2),
    )
    .expect("nonzero denominator");
    let (a, b, cc) = (v(0), v(1), v(2));
    let inv = RationalMap::new(
        vec![a.add(&a.mul(&cc)).sub(&b.mul(&b)), b.scale(&sqrt2()), one.sub(&cc)],
        one.add(&cc),
    )
    .expect("nonzero denominator");
    fwd.with_inverse(inv).expect("dimensions agree")
}

/// Sizes supported by [`phi_ob`]: the source is a hypersurface only for `k = 1`.
pub fn check_ob_sizes(p: usize, k: usize) -> Result<()> {
    if k != 1 {
        return Err(Error::InvalidArgument("phi_ob needs k = 1 (the source is then a hypersurface)".into()));
    }
    if p == 0 || p + k > 3 {
        return Err(Error::InvalidArgument("phi_ob supports block sizes with 1 ≤ p and p + k ≤ 3".into()));
    }
    Ok(())
}

/// Source coordinates of [`phi_ob`]: `w`, then the entries of `z1`, then the upper triangle of `z2`.
pub fn ob_source_dim(p: usize) -> usize {
    1 + p + sym_dim(p)
}

fn ob_blocks(p: usize, nv: usize, offset: usize) -> (Poly, PolyMatrix, PolyMatrix) {
    let v = |i: usize| Poly::var(nv, offset + i);
    let w = v(0);
    let z1: PolyMatrix = (0..p).map(|i| vec![v(1 + i)]).collect();
    let z2 = sym_from_coords(p, &(0..sym_dim(p)).map(|i| v(1 + p + i)).collect::<Vec<_>>());
    (w, z1, z2)
}

/// The partial Cayley map
/// `(w, z1, z2) ↦ [[w + z1ᵀ y z1, √2 z1ᵀ y], [√2 y z1, (1 − z2) y]]`, `y = (1 + z2)^{-1}`,
/// with target coordinates the upper triangle of the `(1 + p)`-square result.
pub fn phi_ob(p: usize, k: usize) -> Result<RationalMap> {
    check_ob_sizes(p, k)?;
    let n = ob_source_dim(p);
    let size = p + 1;
    let (w, z1, z2) = ob_blocks(p, n, 0);
    let id = pm_identity(p, n);
    let one_plus = pm_add(&id, &z2);
    let q = pm_det(&one_plus);
    let adj = pm_adj(&one_plus);
    let z1t = pm_transpose(&z1);
    let r2 = Scalar::sqrt2();
    let mut m = vec![vec![Poly::zero(n); size]; size];
    m[0][0] = w.mul(&q).add(&pm_mul(&pm_mul(&z1t, &adj), &z1)[0][0]);
    let top = pm_scale(&pm_mul(&z1t, &adj), &r2);
    let corner = pm_mul(&pm_sub(&id, &z2), &adj);
    for i in 0..p {
        m[0][i + 1] = top[0][i].clone();
        m[i + 1][0] = top[0][i].clone();
        for j in 0..p {
            m[i + 1][j + 1] = corner[i][j].clone();
        }
    }
    let fwd = RationalMap::new(sym_to_coords(&m), q)?;

    // inverse in target coordinates [[a, b], [bᵀ, c]]
    let t: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    let full = sym_from_coords(size, &t);
    let a = full[0][0].clone();
    let b: PolyMatrix = vec![(0..p).map(|i| full[0][i + 1].clone()).collect()];
    let cm: PolyMatrix = (0..p).map(|i| (0..p).map(|j| full[i + 1][j + 1].clone()).collect()).collect();
    let one_plus_c = pm_add(&id, &cm);
    let det = pm_det(&one_plus_c);
    let adj_c = pm_adj(&one_plus_c);
    let w_num = a.mul(&det).sub(&pm_mul(&pm_mul(&b, &adj_c), &pm_transpose(&b))[0][0]);
    let z1_num = pm_scale(&pm_mul(&adj_c, &pm_transpose(&b)), &r2);
    let z2_num = pm_mul(&pm_sub(&id, &cm), &adj_c);
    let mut inv_nums = vec![w_num];
    inv_nums.extend(z1_num.into_iter().map(|r| r[0].clone()));
    inv_nums.extend(sym_to_coords(&z2_num));
    let inv = RationalMap::new(inv_nums, det)?;
    fwd.with_inverse(inv)
}

/// The source hypersurface of [`phi_ob`]: `w + w̄ = x + x̄` with
/// `x = z̄1ᵀ(1 − z2 z̄2)^{-1}(z1 + z2 z̄1)`, coordinates as in [`ob_source_dim`] without `w`.
pub fn ob_germ(p: usize, k: usize, cutoff: u32) -> Result<HypersurfaceGerm> {
    check_ob_sizes(p, k)?;
    HypersurfaceGerm::from_builder(&format!("OB(p={p},k={k})"), cutoff, false, move |d| ob_rho(p, d))
}

fn ob_rho(p: usize, cutoff: u32) -> Result<TruncatedSeries> {
    let nz = p + sym_dim(p);
    let r = VarSet::restricted(nz);
    let nv = r.len();
    let holo = |i: usize| Poly::var(nv, r.holo(i));
    let conj = |i: usize| Poly::var(nv, r.conj(i));
    let block = |f: &dyn Fn(usize) -> Poly| -> (PolyMatrix, PolyMatrix) {
        let z1: PolyMatrix = (0..p).map(|i| vec![f(i)]).collect();
        let z2 = sym_from_coords(p, &(0..sym_dim(p)).map(|i| f(p + i)).collect::<Vec<_>>());
        (z1, z2)
    };
    let (z1, z2) = block(&holo);
    let (cz1, cz2) = block(&conj);
    // (1 − z2 z̄2)^{-1} as a geometric series; z2 z̄2 has no constant term
    let u = pm_mul_truncated(&z2, &cz2, cutoff);
    let id = pm_identity(p, nv);
    let mut inv = id.clone();
    let mut power = id;
    for _ in 0..cutoff / 2 {
        power = pm_mul_truncated(&power, &u, cutoff);
        inv = pm_add(&inv, &power);
    }
    let right = pm_add(&z1, &pm_mul_truncated(&z2, &cz1, cutoff));
    let x = pm_mul_truncated(&pm_mul_truncated(&pm_transpose(&cz1), &inv, cutoff), &right, cutoff);
    let x = &x[0][0];
    let rho = x.add(&x.conj_permuted(&r.conj_perm()));
    Ok(TruncatedSeries::from_poly(&r, cutoff, rho))
}

/// The outcome of one map check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub ok: bool,
    /// First nonzero residual term when the check fails.
    pub first_residual: Option<String>,
    pub residual_terms: usize,
}

impl CheckOutcome {
    fn from_residuals(vars: &VarSet, residuals: &[Poly]) -> Self {
        let mut first = None;
        let mut terms = 0;
        for r in residuals {
            terms += r.len();
            if first.is_none() {
                if let Some((m, c)) = r.leading_low() {
                    first = Some(poly_string(vars, &Poly::monomial(m.clone(), c.clone())));
                }
            }
        }
        CheckOutcome { ok: terms == 0, first_residual: first, residual_terms: terms }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapReport {
    pub map: MapId,
    pub truncation: u32,
    /// Inverse ∘ map is the identity after clearing denominators.
    pub composition: CheckOutcome,
    /// The target's defining identity on the source.
    pub target_identity: CheckOutcome,
    pub base_point: Vec<Scalar>,
    pub base_image: Vec<Scalar>,
    pub base_point_ok: bool,
}

impl MapReport {
    pub fn passed(&self) -> bool {
        self.composition.ok && self.target_identity.ok && self.base_point_ok
    }
}

/// Lifts a polynomial in `n` holomorphic coordinates into `vars` at holomorphic slots
/// `first..first+n` (and its conjugate into the matching conjugate slots).
fn lift(p: &Poly, vars: &VarSet, first: usize) -> (Poly, Poly) {
    let hol: Vec<usize> = (0..p.nvars()).map(|i| vars.holo(first + i)).collect();
    let con: Vec<usize> = (0..p.nvars()).map(|i| vars.conj(first + i)).collect();
    (p.remap(vars.len(), &hol), p.map_coeffs(Scalar::conj).remap(vars.len(), &con))
}

/// `N Q̄ + N̄ Q`, i.e. `|Q|²(φ + φ̄)`, as a symmetric matrix over `vars`.
fn real_part_matrix(map: &RationalMap, vars: &VarSet, size: usize, max_deg: u32) -> PolyMatrix {
    let (q, qb) = lift(&map.denominator, vars, 0);
    let entries: Vec<Poly> = map
        .numerators
        .iter()
        .map(|n| {
            let (nh, nb) = lift(n, vars, 0);
            nh.mul_truncated(&qb, max_deg).add(&nb.mul_truncated(&q, max_deg))
        })
        .collect();
    sym_from_coords(size, &entries)
}

/// `A det C − B adj(C) Bᵀ` for `M = [[A, B], [Bᵀ, C]]` with a 1×1 block `A`.
fn schur_numerator(m: &PolyMatrix, max_deg: u32) -> Poly {
    let p = m.len() - 1;
    let a = &m[0][0];
    let b: PolyMatrix = vec![(0..p).map(|i| m[0][i + 1].clone()).collect()];
    let cm: PolyMatrix = (0..p).map(|i| (0..p).map(|j| m[i + 1][j + 1].clone()).collect()).collect();
    let det = pm_det_truncated(&cm, max_deg);
    let adj = pm_map(&pm_adj(&cm), |x| x.truncate(max_deg));
    let bab = pm_mul_truncated(&pm_mul_truncated(&b, &adj, max_deg), &pm_transpose(&b), max_deg);
    a.mul_truncated(&det, max_deg).sub(&bab[0][0])
}

fn base_point_check(map: &RationalMap, point: &[Scalar], expected: &[Scalar]) -> Result<(Vec<Scalar>, bool)> {
    let image = map.evaluate(point).ok_or_else(|| Error::NonInvertibleMap("denominator vanishes at base point".into()))?;
    let ok = image == expected;
    Ok((image, ok))
}

/// Runs the three exact checks for one of the supported maps, to degree `d` where a
/// truncated-series identity is involved.
pub fn map_verify(map: MapId, d: u32) -> Result<MapReport> {
    match map {
        MapId::Cayley => verify_cayley(),
        MapId::PhiOc => {
            let germ = HypersurfaceGerm::family(&qi(1), d)?;
            verify_on_germ(map, phi_oc(), &germ, d)
        }
        MapId::PhiOb { p, k } => {
            let germ = ob_germ(p, k, d)?;
            verify_on_germ(map, phi_ob(p, k)?, &germ, d)
        }
    }
}

fn verify_cayley() -> Result<MapReport> {
    let f = cayley();
    let comp_vars = VarSet::matrix(3);
    let composition = CheckOutcome::from_residuals(&comp_vars, &lift_all(&f.composition_residuals()?, &comp_vars));
    // on T the image satisfies det(|Q|² e − N N̄) = 0
    let vars = VarSet::matrix(3);
    let deg = 4 * f.degree();
    let (q, qb) = lift(&f.denominator, &vars, 0);
    let lifted: Vec<(Poly, Poly)> = f.numerators.iter().map(|n| lift(n, &vars, 0)).collect();
    let n_mat = sym_from_coords(2, &lifted.iter().map(|x| x.0.clone()).collect::<Vec<_>>());
    let nb_mat = sym_from_coords(2, &lifted.iter().map(|x| x.1.clone()).collect::<Vec<_>>());
    let qq = q.mul(&qb);
    let m = pm_sub(&pm_map(&pm_identity(2, vars.len()), |x| x.mul(&qq)), &pm_mul(&n_mat, &nb_mat));
    let det = TruncatedSeries::from_poly(&vars, deg, pm_det(&m));
    let on_cone = on_cone_parametrization(&det);
    let cone_vars = VarSet::restricted(5);
    let target_identity = CheckOutcome::from_residuals(&cone_vars, &[on_cone.remap(cone_vars.len(), &(0..5).collect::<Vec<_>>())]);
    let (base_image, base_point_ok) = base_point_check(&f, &[c(1), c(0), c(0)], &[c(0), c(0), c(-1)])?;
    Ok(MapReport {
        map: MapId::Cayley,
        truncation: deg,
        composition,
        target_identity,
        base_point: vec![c(1), c(0), c(0)],
        base_image,
        base_point_ok,
    })
}

fn lift_all(ps: &[Poly], vars: &VarSet) -> Vec<Poly> {
    ps.iter().map(|p| lift(p, vars, 0).0).collect()
}

fn verify_on_germ(id: MapId, f: RationalMap, germ: &HypersurfaceGerm, d: u32) -> Result<MapReport> {
    let n = f.source_dim();
    let vars = germ.ambient_vars();
    if vars.n() != n {
        return Err(Error::CoordinateMismatch(vars.n(), n));
    }
    let composition = CheckOutcome::from_residuals(&vars, &lift_all(&f.composition_residuals()?, &vars));
    // w enters the real part linearly, so one extra degree covers the w-substitution
    let cutoff = d + 1;
    let size = ((8 * f.target_dim() + 1) as f64).sqrt().round() as usize / 2;
    let m = real_part_matrix(&f, &vars, size, cutoff);
    let numerator = TruncatedSeries::from_poly(&vars, cutoff, schur_numerator(&m, cutoff));
    let restricted = germ.restrict(&numerator, d)?;
    let target_identity = CheckOutcome::from_residuals(restricted.vars(), &[restricted.poly().clone()]);
    // the origin lands on the rank-one stratum: φ(0) = diag(0, 1, .., 1)
    let origin = vec![Scalar::zero(); n];
    let mut expected_m = vec![vec![Poly::zero(0); size]; size];
    for (i, row) in expected_m.iter_mut().enumerate().skip(1) {
        row[i] = Poly::one(0);
    }
    let expected: Vec<Scalar> = sym_to_coords(&expected_m).iter().map(Poly::constant_term).collect();
    let (base_image, base_point_ok) = base_point_check(&f, &origin, &expected)?;
    Ok(MapReport { map: id, truncation: d, composition, target_identity, base_point: origin, base_image, base_point_ok })
}
