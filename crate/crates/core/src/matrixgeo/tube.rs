//! The tube `T = {z ∈ E : det(z + z̄) = 0, Re tr z > 0}` over the future light cone, its
//! affine symmetries, and the polynomial vector fields of `sp(2, R)` acting on it.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::symmat::*;
use crate::error::{Error, Result};
use crate::exact::{qi, Rational, Scalar};
use crate::fields::HoloVectorField;
use crate::linalg::{self, Matrix};
use crate::poly::Poly;
use crate::series::{TruncatedSeries, VarSet};


/// A symmetric matrix with exact entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMatrixPoint {
    entries: Vec<Vec<Scalar>>,
}

impl SymMatrixPoint {
    pub fn new(entries: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i][j] != entries[j][i] {
                    return Err(Error::InvalidArgument("matrix is not symmetric".into()));
                }
            }
        }
        Ok(SymMatrixPoint { entries })
    }

    /// `[[a, b], [b, c]]`.
    pub fn two(a: Scalar, b: Scalar, c: Scalar) -> Self {
        SymMatrixPoint { entries: vec![vec![a, b.clone()], vec![b, c]] }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<Scalar>] {
        &self.entries
    }

    /// `z + z̄`.
    pub fn twice_real_part(&self) -> Vec<Vec<Scalar>> {
        self.entries.iter().map(|r| r.iter().map(|x| x + &x.conj()).collect()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TubeClass {
    OnT,
    InH,
    Neither,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TubeCertificate {
    pub class: TubeClass,
    /// `det(z + z̄)`.
    pub det_sum: Scalar,
    /// `Re tr z` with the ordinary trace.
    pub re_trace: Scalar,
}

fn det2(m: &[Vec<Scalar>]) -> Scalar {
    &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
}

/// Classifies a 2×2 point: on the tube, inside the tube domain, or neither.
pub fn tube_membership(z: &SymMatrixPoint) -> Result<TubeCertificate> {
    if z.n() != 2 {
        return Err(Error::InvalidArgument("tube membership is defined for 2×2 matrices".into()));
    }
    let x = z.twice_real_part();
    let det_sum = det2(&x);
    let e = z.entries();
    let m = [[e[0][0].clone(), e[0][1].clone()], [e[1][0].clone(), e[1][1].clone()]];
    let t = super::trace(&m, super::TUBE_TRACE_OF_IDENTITY);
    let re_trace = &(&t + &t.conj()) * &Scalar::from_rational(crate::exact::q(1, 2));
    let sign = |s: &Scalar| s.real_sign().expect("real part of a matrix is real");
    let class = if sign(&det_sum) == Ordering::Equal && sign(&re_trace) == Ordering::Greater {
        TubeClass::OnT
    } else if sign(&x[0][0]) == Ordering::Greater && sign(&det_sum) == Ordering::Greater {
        TubeClass::InH
    } else {
        TubeClass::Neither
    };
    Ok(TubeCertificate { class, det_sum, re_trace })
}

/// Inertia `(p, q)` of a real symmetric matrix.
pub fn cone_type(x: &Matrix<Rational>) -> (usize, usize) {
    let (p, q, _) = linalg::inertia(x);
    (p, q)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineReport {
    /// `det(g(z+z̄)gᵀ) = (det g)² det(z+z̄)` as a polynomial identity in the real entries.
    pub identity_holds: bool,
    pub factor: Rational,
    pub samples: usize,
    pub samples_on_t: usize,
    /// `z + iv` leaves `z + z̄` unchanged for symmetric real `v`.
    pub translation_ok: bool,
}

impl AffineReport {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.translation_ok && self.samples_on_t == self.samples
    }
}

pub fn random_rational(rng: &mut ChaCha8Rng, span: i64) -> Rational {
    crate::exact::q(rng.gen_range(-span..=span), rng.gen_range(1..=4))
}

/// A random invertible rational 2×2 matrix.
pub fn random_gl2(rng: &mut ChaCha8Rng) -> [[Rational; 2]; 2] {
    loop {
        let g = [[random_rational(rng, 5), random_rational(rng, 5)], [random_rational(rng, 5), random_rational(rng, 5)]];
        if !num_traits::Zero::is_zero(&(&g[0][0] * &g[1][1] - &g[0][1] * &g[1][0])) {
            return g;
        }
    }
}

/// Checks that `z ↦ g z gᵀ + iv` preserves the tube.
pub fn affine_invariance_check(g: &[[Rational; 2]; 2], samples: usize, seed: u64) -> Result<AffineReport> {
    let det_g = &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0];
    if num_traits::Zero::is_zero(&det_g) {
        return Err(Error::Singular);
    }
    // real variables x0, x1, x2 (real parts) and y0, y1, y2 (imaginary parts)
    let nv = 6;
    let var = |i| Poly::var(nv, i);
    let two = Scalar::from_int(2);
    let re: Vec<Poly> = (0..3).map(|k| var(k).scale(&two)).collect();
    let sum = sym_from_coords(2, &re);
    let gm: PolyMatrix =
        g.iter().map(|r| r.iter().map(|x| Poly::constant(nv, Scalar::from_rational(x.clone()))).collect()).collect();
    let transformed = pm_mul(&pm_mul(&gm, &sum), &pm_transpose(&gm));
    let factor = &det_g * &det_g;
    let identity_holds = pm_det(&transformed) == pm_det(&sum).scale(&Scalar::from_rational(factor.clone()));

    // z + iv with z = x + iy: the real part 2x is untouched
    let imag: Vec<Poly> = (0..3).map(|k| var(k + 3)).collect();
    let z_plus: Vec<Poly> = (0..3).map(|k| var(k).add(&imag[k].scale(&Scalar::i()))).collect();
    let v_shift = [Scalar::zero(), Scalar::one(), Scalar::zero()];
    let shifted: Vec<Poly> = z_plus.iter().zip(&v_shift).map(|(p, s)| p.add(&Poly::constant(nv, s * &Scalar::i()))).collect();
    let sum_after: Vec<Poly> = shifted.iter().map(|p| p.add(&p.map_coeffs(Scalar::conj))).collect();
    let translation_ok = sum_after == re;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut on_t = 0;
    for _ in 0..samples {
        let z = random_tube_point(&mut rng);
        let image = apply_affine(g, &z, &[random_rational(&mut rng, 5), random_rational(&mut rng, 5), random_rational(&mut rng, 5)]);
        if tube_membership(&image)?.class == TubeClass::OnT {
            on_t += 1;
        }
    }
    Ok(AffineReport { identity_holds, factor, samples, samples_on_t: on_t, translation_ok })
}

/// `y yᵀ + i v` for random rational `y ≠ 0` and symmetric `v`.
pub fn random_tube_point(rng: &mut ChaCha8Rng) -> SymMatrixPoint {
    loop {
        let y = [random_rational(rng, 6), random_rational(rng, 6)];
        if y.iter().all(num_traits::Zero::is_zero) {
            continue;
        }
        let v = [random_rational(rng, 6), random_rational(rng, 6), random_rational(rng, 6)];
        return cone_point(&y, &v);
    }
}

/// `y yᵀ + i v` with `v = [[v0, v1], [v1, v2]]`.
pub fn cone_point(y: &[Rational; 2], v: &[Rational; 3]) -> SymMatrixPoint {
    let c = |re: Rational, im: &Rational| Scalar::complex(re, im.clone());
    SymMatrixPoint::two(c(&y[0] * &y[0], &v[0]), c(&y[0] * &y[1], &v[1]), c(&y[1] * &y[1], &v[2]))
}

fn apply_affine(g: &[[Rational; 2]; 2], z: &SymMatrixPoint, v: &[Rational; 3]) -> SymMatrixPoint {
    let gs: Vec<Vec<Scalar>> = g.iter().map(|r| r.iter().map(|x| Scalar::from_rational(x.clone())).collect()).collect();
    let e = z.entries();
    let mul = |a: &[Vec<Scalar>], b: &[Vec<Scalar>]| -> Vec<Vec<Scalar>> {
        (0..2).map(|i| (0..2).map(|j| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j])).collect()).collect()
    };
    let gt: Vec<Vec<Scalar>> = (0..2).map(|i| (0..2).map(|j| gs[j][i].clone()).collect()).collect();
    let m = mul(&mul(&gs, e), &gt);
    let iv = |x: &Rational| Scalar::complex(qi(0), x.clone());
    SymMatrixPoint::two(&m[0][0] + &iv(&v[0]), &m[0][1] + &iv(&v[1]), &m[1][1] + &iv(&v[2]))
}

/// Coordinates `z0, z1, z2` on symmetric 2×2 matrices.
pub fn matrix_vars() -> VarSet {
    VarSet::matrix(3)
}

/// The field `(b + cz + zcᵀ + zdz)∂` for 2×2 matrices `b, c, d` with scalar entries.
pub fn sp2_field(b: &[[Scalar; 2]; 2], c: &[[Scalar; 2]; 2], d: &[[Scalar; 2]; 2]) -> HoloVectorField {
    let vars = matrix_vars();
    let nv = 3;
    let z = sym_from_coords(2, &(0..3).map(|i| Poly::var(nv, i)).collect::<Vec<_>>());
    let konst = |m: &[[Scalar; 2]; 2]| -> PolyMatrix {
        m.iter().map(|r| r.iter().map(|x| Poly::constant(nv, x.clone())).collect()).collect()
    };
    let (bm, cm, dm) = (konst(b), konst(c), konst(d));
    let total = pm_add(
        &pm_add(&bm, &pm_mul(&cm, &z)),
        &pm_add(&pm_mul(&z, &pm_transpose(&cm)), &pm_mul(&pm_mul(&z, &dm), &z)),
    );
    HoloVectorField::new(&vars, sym_to_coords(&total)).expect("three components on three coordinates")
}

/// Ten fields spanning `aut(H)`: `b ∈ iV` (3), `c ∈ R^{2×2}` (4), `d ∈ iV` (3).
pub fn sp2_basis() -> Vec<HoloVectorField> {
    let zero = || [[Scalar::zero(), Scalar::zero()], [Scalar::zero(), Scalar::zero()]];
    let unit = |i: usize, j: usize, s: Scalar| {
        let mut m = zero();
        m[i][j] = s;
        m
    };
    let sym_i = |i: usize, j: usize| {
        let mut m = zero();
        m[i][j] = Scalar::i();
        m[j][i] = Scalar::i();
        m
    };
    let mut out = Vec::new();
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        out.push(sp2_field(&sym_i(i, j), &zero(), &zero()));
    }
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        out.push(sp2_field(&zero(), &unit(i, j, Scalar::one()), &zero()));
    }
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        out.push(sp2_field(&zero(), &zero(), &sym_i(i, j)));
    }
    out
}

/// `ζ1 = 2z0∂z0 + z1∂z1` and `ζ2 = z1∂z1 + 2z2∂z2` on matrix coordinates.
pub fn matrix_zetas() -> (HoloVectorField, HoloVectorField) {
    let v = matrix_vars();
    let m = |k: usize, e: [u16; 3], c: i64| HoloVectorField::monomial(&v, k, &e, Scalar::from_int(c));
    (m(0, [1, 0, 0], 2).add(&m(1, [0, 1, 0], 1)), m(1, [0, 1, 0], 1).add(&m(2, [0, 0, 1], 2)))
}

/// The explicit root vectors `ξ^ν` of `aut(H)` keyed by `ν = (ν1, ν2)`.
pub fn sp2_root_vectors() -> BTreeMap<(i64, i64), HoloVectorField> {
    let v = matrix_vars();
    let i = Scalar::i();
    let one = Scalar::one();
    let m = |k: usize, e: [u16; 3], c: &Scalar| HoloVectorField::monomial(&v, k, &e, c.clone());
    let mut out = BTreeMap::new();
    out.insert((0, 2), m(0, [0, 2, 0], &i).add(&m(1, [0, 1, 1], &i)).add(&m(2, [0, 0, 2], &i)));
    out.insert((-1, 1), m(0, [0, 1, 0], &Scalar::from_int(2)).add(&m(1, [0, 0, 1], &one)));
    out.insert(
        (1, 1),
        m(0, [1, 1, 0], &(&i * &Scalar::from_int(2)))
            .add(&m(1, [0, 2, 0], &i))
            .add(&m(1, [1, 0, 1], &i))
            .add(&m(2, [0, 1, 1], &(&i * &Scalar::from_int(2)))),
    );
    out.insert((-2, 0), m(0, [0, 0, 0], &i));
    out.insert((2, 0), m(0, [2, 0, 0], &i).add(&m(1, [1, 1, 0], &i)).add(&m(2, [0, 2, 0], &i)));
    out.insert((-1, -1), m(1, [0, 0, 0], &i));
    out.insert((1, -1), m(1, [1, 0, 0], &Scalar::from_int(-1)).add(&m(2, [0, 1, 0], &Scalar::from_int(-2))));
    out.insert((0, -2), m(2, [0, 0, 0], &i));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeTangency {
    pub tangent: bool,
    /// Terms of `ξδ0` left after substituting the cone parametrization.
    pub residual_terms: usize,
    /// `c` with `ξδ0 = c·δ0` identically, when such a constant exists.
    pub delta_multiple: Option<Scalar>,
}

/// `δ0 = det(z + z̄)` in the series ring over `z0, z1, z2`.
pub fn delta0(cutoff: u32) -> TruncatedSeries {
    let v = matrix_vars();
    let nv = v.len();
    let coords: Vec<Poly> = (0..3).map(|k| Poly::var(nv, v.holo(k)).add(&Poly::var(nv, v.conj(k)))).collect();
    TruncatedSeries::from_poly(&v, cutoff, pm_det(&sym_from_coords(2, &coords)))
}

/// Substitutes `z = y yᵀ + i v` (real variables `y1, y2, v11, v12, v22`) into a series over `z, z̄`.
pub fn on_cone_parametrization(f: &TruncatedSeries) -> Poly {
    let v = f.vars();
    let nv = 5;
    let y = |i| Poly::var(nv, i);
    let yy = [y(0).mul(&y(0)), y(0).mul(&y(1)), y(1).mul(&y(1))];
    let mut images = Vec::with_capacity(v.len());
    for k in 0..3 {
        images.push(yy[k].add(&Poly::var(nv, 2 + k).scale(&Scalar::i())));
    }
    for k in 0..3 {
        images.push(yy[k].sub(&Poly::var(nv, 2 + k).scale(&Scalar::i())));
    }
    images.push(Poly::zero(nv));
    f.poly().substitute(&images)
}

/// Tangency of a polynomial field on `E` to the tube, via the cone parametrization.
pub fn cone_tangency(xi: &HoloVectorField) -> Result<ConeTangency> {
    let cutoff = 3 + xi.degree();
    let d0 = delta0(cutoff);
    let applied = xi.apply(&d0)?;
    let residual = on_cone_parametrization(&applied);
    let delta_multiple = match d0.poly().leading_low() {
        Some((m, c)) => {
            let k = &applied.poly().coeff(m) * &c.inv()?;
            (applied == d0.scale(&k)).then_some(k)
        }
        None => None,
    };
    Ok(ConeTangency { tangent: residual.is_zero(), residual_terms: residual.len(), delta_multiple })
}

#[derive(Clone, Debug)]
pub struct TubeSolveReport {
    pub degree_bound: u32,
    pub unknowns: usize,
    pub dimension: usize,
    pub basis: Vec<HoloVectorField>,
    /// Every solution lies in the real span of [`sp2_basis`].
    pub within_sp2: bool,
}

/// All polynomial fields of degree ≤ `d` tangent to the tube, by exact linear algebra over
/// the cone parametrization. This only bounds `hol(T)` from below up to degree `d`.
pub fn tube_hol_solve(d: u32) -> Result<TubeSolveReport> {
    let vars = matrix_vars();
    let mut unknowns = Vec::new();
    for k in 0..3 {
        for m in crate::poly::monomials_up_to(3, d) {
            for u in [Scalar::one(), Scalar::i()] {
                unknowns.push(HoloVectorField::monomial(&vars, k, &m.0, u));
            }
        }
    }
    let n = unknowns.len();
    let d0 = delta0(3 + d);
    // one real equation per (monomial, component of the scalar)
    let mut equations: BTreeMap<(crate::poly::Monomial, usize), Vec<Rational>> = BTreeMap::new();
    for (j, xi) in unknowns.iter().enumerate() {
        let residual = on_cone_parametrization(&xi.apply(&d0)?);
        for (m, c) in residual.terms() {
            for (part, x) in c.components().into_iter().enumerate() {
                if *x != qi(0) {
                    equations.entry((m.clone(), part)).or_insert_with(|| vec![qi(0); n])[j] = x.clone();
                }
            }
        }
    }
    let matrix: Matrix<Rational> = equations.into_values().collect();
    let kernel = linalg::nullspace(&matrix, n);
    let basis: Vec<HoloVectorField> = kernel.iter().map(|x| crate::liealg::combine(&unknowns, x)).collect();
    let sp2 = sp2_basis();
    let within_sp2 = basis.iter().all(|f| crate::liealg::real_span_coordinates(&sp2, f).is_some());
    Ok(TubeSolveReport { degree_bound: d, unknowns: n, dimension: basis.len(), basis, within_sp2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::liealg::{real_span_coordinates, LiePresentation};

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn membership_examples() {
        let on = SymMatrixPoint::two(s(1), s(0), s(0));
        assert_eq!(tube_membership(&on).unwrap().class, TubeClass::OnT);
        let id = SymMatrixPoint::two(s(1), s(0), s(1));
        assert_eq!(tube_membership(&id).unwrap().class, TubeClass::InH);
        let indef = SymMatrixPoint::two(s(1), s(0), s(-1));
        assert_eq!(tube_membership(&indef).unwrap().class, TubeClass::Neither);
        let cert = tube_membership(&cone_point(&[qi(1), qi(2)], &[qi(3), qi(-1), qi(5)])).unwrap();
        assert_eq!(cert.class, TubeClass::OnT);
        assert_eq!(cert.re_trace, s(5));
    }

    #[test]
    fn cone_types() {
        let d = |v: &[i64]| -> Matrix<Rational> {
            (0..v.len()).map(|i| (0..v.len()).map(|j| if i == j { qi(v[i]) } else { qi(0) }).collect()).collect()
        };
        assert_eq!(cone_type(&d(&[1, -1, 0])), (1, 1));
        assert_eq!(cone_type(&d(&[2, 3])), (2, 0));
        let y = [1, 2, 3];
        let yy: Matrix<Rational> = y.iter().map(|a| y.iter().map(|b| qi(a * b)).collect()).collect();
        assert_eq!(cone_type(&yy), (1, 0));
    }

    #[test]
    fn affine_examples() {
        let g = [[qi(1), qi(1)], [qi(0), qi(1)]];
        let r = affine_invariance_check(&g, 10, 7).unwrap();
        assert!(r.passed());
        assert_eq!(r.factor, qi(1));
        let r = affine_invariance_check(&[[qi(2), qi(0)], [qi(0), qi(2)]], 5, 1).unwrap();
        assert_eq!(r.factor, qi(16));
        assert!(r.passed());
        assert_eq!(affine_invariance_check(&[[qi(1), qi(2)], [q(1, 2), qi(1)]], 1, 0), Err(Error::Singular));
    }

    #[test]
    fn sp2_contains_zetas_and_roots() {
        let basis = sp2_basis();
        let (z1, z2) = matrix_zetas();
        assert_eq!(basis[3], z1);
        assert_eq!(basis[6], z2);
        for (nu, xi) in sp2_root_vectors() {
            assert!(real_span_coordinates(&basis, &xi).is_some(), "root vector {nu:?} outside aut(H)");
            assert_eq!(z1.bracket(&xi).unwrap(), xi.scale(&s(nu.0)));
            assert_eq!(z2.bracket(&xi).unwrap(), xi.scale(&s(nu.1)));
        }
        let p = LiePresentation::new(basis).unwrap();
        assert!(p.closed);
    }

    #[test]
    fn cone_tangency_examples() {
        let (z1, _) = matrix_zetas();
        let t = cone_tangency(&z1).unwrap();
        assert!(t.tangent);
        assert_eq!(t.delta_multiple, Some(s(2)));
        let roots = sp2_root_vectors();
        let t = cone_tangency(&roots[&(0, -2)]).unwrap();
        assert!(t.tangent);
        assert_eq!(t.delta_multiple, Some(Scalar::zero()));
        assert!(cone_tangency(&roots[&(2, 0)]).unwrap().tangent);
        // a holomorphic field outside aut(H)
        let bad = HoloVectorField::coordinate(&matrix_vars(), 0);
        assert!(!cone_tangency(&bad).unwrap().tangent);
    }

    #[test]
    fn tube_solutions_are_sp2() {
        for d in [1, 2, 3, 4] {
            let r = tube_hol_solve(d).unwrap();
            assert_eq!(r.dimension, if d == 1 { 7 } else { 10 }, "degree {d}");
            assert!(r.within_sp2);
        }
    }
}
