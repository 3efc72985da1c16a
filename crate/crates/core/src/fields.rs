//! Holomorphic polynomial vector fields `Σ f_k ∂/∂ζ_k`.
//!
//! A field acts on real-valued functions as the real vector field
//! `ξh = Σ f_k ∂h/∂ζ_k + conj(f_k) ∂h/∂ζ̄_k`. Brackets are the holomorphic (C-bilinear)
//! brackets of the coefficient tuples, which agree with the brackets of the real fields.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{q, qi, Rational, Scalar};
use crate::poly::{monomials_up_to, Monomial, Poly};
use crate::ratmap::RationalMap;
use crate::series::{monomial_string, TruncatedSeries, VarSet};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HoloVectorField {
    vars: VarSet,
    /// One polynomial per coordinate, in the holomorphic coordinates only.
    components: Vec<Poly>,
}

impl HoloVectorField {
    pub fn new(vars: &VarSet, components: Vec<Poly>) -> Result<Self> {
        let n = vars.n();
        if components.len() != n {
            return Err(Error::CoordinateMismatch(n, components.len()));
        }
        if components.iter().any(|p| p.nvars() != n) {
            return Err(Error::CoordinateMismatch(n, components[0].nvars()));
        }
        Ok(HoloVectorField { vars: vars.clone(), components })
    }

    pub fn zero(vars: &VarSet) -> Self {
        let n = vars.n();
        HoloVectorField { vars: vars.clone(), components: vec![Poly::zero(n); n] }
    }

    /// `c · x^exps ∂/∂x_k`.
    pub fn monomial(vars: &VarSet, k: usize, exps: &[u16], c: Scalar) -> Self {
        let mut f = Self::zero(vars);
        f.components[k] = Poly::monomial(Monomial(exps.to_vec()), c);
        f
    }

    /// `∂/∂x_k`.
    pub fn coordinate(vars: &VarSet, k: usize) -> Self {
        Self::monomial(vars, k, &vec![0; vars.n()], Scalar::one())
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn n_coords(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &Poly {
        &self.components[k]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }

    fn zip(&self, o: &Self, f: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        assert_eq!(self.vars, o.vars, "fields live on different coordinates");
        HoloVectorField {
            vars: self.vars.clone(),
            components: self.components.iter().zip(&o.components).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, Poly::add)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, Poly::sub)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        HoloVectorField { vars: self.vars.clone(), components: self.components.iter().map(|p| p.scale(s)).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    /// Complex multiplication by `i` (a different real field, not a real multiple).
    pub fn times_i(&self) -> Self {
        self.scale(&Scalar::i())
    }

    /// Holomorphic derivative of a polynomial in the coordinates along this field.
    pub fn derive(&self, p: &Poly) -> Poly {
        let mut out = Poly::zero(self.n_coords());
        for (j, fj) in self.components.iter().enumerate() {
            if fj.is_zero() {
                continue;
            }
            let d = p.derivative(j);
            if !d.is_zero() {
                out.add_assign(&fj.mul(&d));
            }
        }
        out
    }

    /// `[ξ, η]_k = ξ(η_k) − η(ξ_k)`.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        if self.vars != o.vars {
            return Err(Error::CoordinateMismatch(self.n_coords(), o.n_coords()));
        }
        let components = (0..self.n_coords())
            .map(|k| self.derive(&o.components[k]).sub(&o.derive(&self.components[k])))
            .collect();
        Ok(HoloVectorField { vars: self.vars.clone(), components })
    }

    /// Applies the real field to a series over the same coordinates.
    ///
    /// When the ring has a `w` coordinate, `v = Im w` is treated as a function of `w`:
    /// `∂/∂w` picks up `−(i/2)∂/∂v` and `∂/∂w̄` picks up `(i/2)∂/∂v`.
    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        let vars = f.vars();
        if *vars != self.vars {
            return Err(Error::VarSetMismatch);
        }
        let n = vars.n();
        let holo_map: Vec<usize> = (0..n).map(|k| vars.holo(k)).collect();
        let conj_map: Vec<usize> = (0..n).map(|k| vars.conj(k)).collect();
        let cutoff = f.cutoff();
        let half_i = Scalar::complex(qi(0), q(1, 2));
        let mut out = TruncatedSeries::zero(vars, cutoff);
        for (k, fk) in self.components.iter().enumerate() {
            if fk.is_zero() {
                continue;
            }
            let fk_s = TruncatedSeries::from_poly(vars, cutoff, fk.remap(vars.len(), &holo_map));
            let fk_bar = TruncatedSeries::from_poly(vars, cutoff, fk.map_coeffs(Scalar::conj).remap(vars.len(), &conj_map));
            let mut d_holo = f.partial(vars.holo(k));
            let mut d_conj = f.partial(vars.conj(k));
            if vars.has_w() && k == 0 {
                let dv = f.partial(vars.v());
                d_holo = d_holo.sub(&dv.scale(&half_i));
                d_conj = d_conj.add(&dv.scale(&half_i));
            }
            out = out.add(&fk_s.mul(&d_holo)).add(&fk_bar.mul(&d_conj));
        }
        Ok(out)
    }

    /// Projection onto the weight space `P^λ` (ambient coordinates `w, z1, z2` only).
    pub fn grade_component(&self, lambda: LatticePoint) -> Self {
        self.filter_terms(|k, m| weight_of(k, m) == Some(lambda))
    }

    /// Weights of all monomial terms.
    pub fn weights(&self) -> BTreeSet<LatticePoint> {
        let mut out = BTreeSet::new();
        for (k, p) in self.components.iter().enumerate() {
            for (m, _) in p.terms() {
                if let Some(l) = weight_of(k, m) {
                    out.insert(l);
                }
            }
        }
        out
    }

    fn filter_terms(&self, keep: impl Fn(usize, &Monomial) -> bool) -> Self {
        let n = self.n_coords();
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(k, p)| Poly::from_terms(n, p.terms().filter(|(m, _)| keep(k, m)).map(|(m, c)| (m.clone(), c.clone()))))
            .collect();
        HoloVectorField { vars: self.vars.clone(), components }
    }

    /// Terms as `(coordinate, monomial, coefficient)` in (coordinate, graded-lex) order.
    pub fn terms(&self) -> Vec<(usize, Monomial, Scalar)> {
        let mut out = Vec::new();
        for (k, p) in self.components.iter().enumerate() {
            for (m, c) in p.terms() {
                out.push((k, m.clone(), c.clone()));
            }
        }
        out
    }

    /// Real coordinates of the field against a list of `(coordinate, monomial)` slots:
    /// four rationals per slot (components along `1, i, √2, i√2`).
    pub fn real_coordinates(&self, slots: &[(usize, Monomial)]) -> Vec<Rational> {
        let mut out = Vec::with_capacity(4 * slots.len());
        for (k, m) in slots {
            let c = self.components[*k].coeff(m);
            out.extend(c.components().into_iter().cloned());
        }
        out
    }

    /// Complex coordinates against slots.
    pub fn complex_coordinates(&self, slots: &[(usize, Monomial)]) -> Vec<Scalar> {
        slots.iter().map(|(k, m)| self.components[*k].coeff(m)).collect()
    }

    /// Rebuilds a field from complex coordinates against slots.
    pub fn from_complex_coordinates(vars: &VarSet, slots: &[(usize, Monomial)], coords: &[Scalar]) -> Self {
        let mut f = Self::zero(vars);
        for ((k, m), c) in slots.iter().zip(coords) {
            f.components[*k].add_term(m.clone(), c.clone());
        }
        f
    }
}

/// All `(coordinate, monomial)` pairs occurring in any of the fields, sorted.
pub fn support_slots(fields: &[HoloVectorField]) -> Vec<(usize, Monomial)> {
    let mut set = BTreeSet::new();
    for f in fields {
        for (k, m, _) in f.terms() {
            set.insert((k, m));
        }
    }
    set.into_iter().collect()
}

/// DSL rendering, e.g. `(2)*w*Dw + z1*Dz1`.
impl fmt::Display for HoloVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let holo = VarSetView(&self.vars);
        let mut parts = Vec::new();
        for (k, m, c) in self.terms() {
            let marker = format!("D{}", self.vars.coordinate_name(k));
            let mono = holo.monomial(&m);
            let coef = if c.is_one() { String::new() } else { format!("({c})*") };
            match mono {
                Some(mono) => parts.push(format!("{coef}{mono}*{marker}")),
                None => parts.push(format!("{coef}{marker}")),
            }
        }
        if parts.is_empty() {
            write!(f, "0*D{}", self.vars.coordinate_name(0))
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

struct VarSetView<'a>(&'a VarSet);

impl VarSetView<'_> {
    fn monomial(&self, m: &Monomial) -> Option<String> {
        if m.is_one() {
            return None;
        }
        let mut e = m.0.clone();
        e.resize(self.0.len(), 0);
        Some(monomial_string(self.0, &e))
    }
}

/// A point of the lattice Λ = {λ ∈ Z + iZ : Re λ + Im λ even}.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LatticePoint {
    pub re: i64,
    pub im: i64,
}

impl LatticePoint {
    pub fn new(re: i64, im: i64) -> Result<Self> {
        if (re + im).rem_euclid(2) != 0 {
            return Err(Error::InvalidArgument(format!("{re}{im:+}i is not in the weight lattice")));
        }
        Ok(LatticePoint { re, im })
    }

    pub fn add(self, o: Self) -> Self {
        LatticePoint { re: self.re + o.re, im: self.im + o.im }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn to_scalar(self) -> Scalar {
        Scalar::complex(qi(self.re), qi(self.im))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, 1) => write!(f, "i"),
            (0, -1) => write!(f, "-i"),
            (0, i) => write!(f, "{i}i"),
            (r, 1) => write!(f, "{r}+i"),
            (r, -1) => write!(f, "{r}-i"),
            (r, i) => write!(f, "{r}{i:+}i"),
        }
    }
}

/// Weight of `w^m z1^n z2^l ∂/∂x_k` (coordinates `w, z1, z2` are `k = 0, 1, 2`).
pub fn monomial_weight(m: i64, n: i64, l: i64, k: i64) -> LatticePoint {
    LatticePoint { re: 2 * m + n + k - 2, im: n + 2 * l - k }
}

fn weight_of(k: usize, m: &Monomial) -> Option<LatticePoint> {
    (m.0.len() == 3).then(|| monomial_weight(m.0[0] as i64, m.0[1] as i64, m.0[2] as i64, k as i64))
}

/// Number of monomial fields on `C^3` of degree ≤ `degree_bound` with weight `λ`.
pub fn dim_p_lambda(lambda: LatticePoint, degree_bound: u32) -> usize {
    let mut count = 0;
    for m in monomials_up_to(3, degree_bound) {
        for k in 0..3 {
            if weight_of(k, &m) == Some(lambda) {
                count += 1;
            }
        }
    }
    count
}

/// Outcome of a pushforward comparison.
#[derive(Clone, Debug, PartialEq)]
pub enum Pushforward {
    /// `Dφ·ξ = c · target∘φ` with this constant.
    Proportional(Scalar),
    /// No constant works; `residual` is `Dφ·ξ − c·target∘φ` (cleared) for the trial `c`.
    Mismatch { component: usize, residual: Poly },
}

/// Cleared-denominator pushforward: entry `k` is `Q^e · Σ_j ξ_j J_kj` where `Dφ = J / Q²`,
/// to be compared with `T̃_k(N, Q) · Q²` for a target of degree ≤ `e`.
fn pushed_components(xi: &HoloVectorField, map: &RationalMap, e: u32) -> Vec<Poly> {
    let jac = map.jacobian_numerators();
    let qe = map.denominator.pow(e);
    jac.iter()
        .map(|row| {
            let mut acc = Poly::zero(map.source_dim());
            for (j, xj) in xi.components().iter().enumerate() {
                if !xj.is_zero() && !row[j].is_zero() {
                    acc.add_assign(&xj.mul(&row[j]));
                }
            }
            acc.mul(&qe)
        })
        .collect()
}

fn target_components(target: &HoloVectorField, map: &RationalMap, e: u32) -> Vec<Poly> {
    let q2 = map.denominator.pow(2);
    target.components().iter().map(|t| map.homogenized(t, e).mul(&q2)).collect()
}

/// Checks `Dφ(p)·ξ(p) = c · target(φ(p))` as a polynomial identity and returns `c`.
pub fn pushforward(xi: &HoloVectorField, map: &RationalMap, target: &HoloVectorField) -> Result<Pushforward> {
    if map.inverse.is_none() {
        return Err(Error::NonInvertibleMap("pushforward requires an explicit inverse".into()));
    }
    if xi.n_coords() != map.source_dim() || target.n_coords() != map.target_dim() {
        return Err(Error::CoordinateMismatch(xi.n_coords(), map.source_dim()));
    }
    let e = target.degree();
    let lhs = pushed_components(xi, map, e);
    let rhs = target_components(target, map, e);
    let mut c = None;
    for (l, r) in lhs.iter().zip(&rhs) {
        if let Some((m, rc)) = r.leading_low() {
            c = Some(&l.coeff(m) * &rc.inv()?);
            break;
        }
    }
    let c = c.unwrap_or_else(Scalar::one);
    for (k, (l, r)) in lhs.iter().zip(&rhs).enumerate() {
        let residual = l.sub(&r.scale(&c));
        if !residual.is_zero() {
            return Ok(Pushforward::Mismatch { component: k, residual });
        }
    }
    Ok(Pushforward::Proportional(c))
}

/// Finds complex coefficients with `Dφ·ξ = Σ c_i · basis_i∘φ`, if the pushforward lies in the span.
pub fn pushforward_in_span(xi: &HoloVectorField, map: &RationalMap, basis: &[HoloVectorField]) -> Result<Option<Vec<Scalar>>> {
    if map.inverse.is_none() {
        return Err(Error::NonInvertibleMap("pushforward requires an explicit inverse".into()));
    }
    let e = basis.iter().map(HoloVectorField::degree).max().unwrap_or(0);
    let lhs = pushed_components(xi, map, e);
    let rhs: Vec<Vec<Poly>> = basis.iter().map(|b| target_components(b, map, e)).collect();
    let mut slots = BTreeSet::new();
    for (k, p) in lhs.iter().enumerate() {
        slots.extend(p.terms().map(|(m, _)| (k, m.clone())));
    }
    for r in &rhs {
        for (k, p) in r.iter().enumerate() {
            slots.extend(p.terms().map(|(m, _)| (k, m.clone())));
        }
    }
    let vectors: Vec<Vec<Scalar>> = rhs.iter().map(|r| slots.iter().map(|(k, m)| r[*k].coeff(m)).collect()).collect();
    let target: Vec<Scalar> = slots.iter().map(|(k, m)| lhs[*k].coeff(m)).collect();
    Ok(crate::linalg::solve_combination(&vectors, &target))
}

/// Named fields on `w, z1, z2`.
pub mod named {
    use super::*;

    fn amb() -> VarSet {
        VarSet::ambient(2)
    }

    fn mono(k: usize, e: [u16; 3], c: Scalar) -> HoloVectorField {
        HoloVectorField::monomial(&amb(), k, &e, c)
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    /// `ζ1 = 2w∂w + z1∂z1`.
    pub fn zeta1() -> HoloVectorField {
        mono(0, [1, 0, 0], s(2)).add(&mono(1, [0, 1, 0], s(1)))
    }

    /// `ζ2 = z1∂z1 + 2z2∂z2`.
    pub fn zeta2() -> HoloVectorField {
        mono(1, [0, 1, 0], s(1)).add(&mono(2, [0, 0, 1], s(2)))
    }

    /// `i∂w`, the weight −2 generator.
    pub fn i_dw() -> HoloVectorField {
        mono(0, [0, 0, 0], Scalar::i())
    }

    /// `η = 2z1∂w + (1 − z2)∂z1`.
    pub fn eta() -> HoloVectorField {
        mono(0, [0, 1, 0], s(2)).add(&mono(1, [0, 0, 0], s(1))).sub(&mono(1, [0, 0, 1], s(1)))
    }

    /// `χ = z1²∂w − z1z2∂z1 + (1 − z2²)∂z2`.
    pub fn chi() -> HoloVectorField {
        mono(0, [0, 2, 0], s(1))
            .sub(&mono(1, [0, 1, 1], s(1)))
            .add(&mono(2, [0, 0, 0], s(1)))
            .sub(&mono(2, [0, 0, 2], s(1)))
    }

    /// `ξ² = i t w²∂w + i t w z1∂z1 − i z1²∂z2` of the family `M_t`.
    pub fn xi_plus_two(t: &Rational) -> HoloVectorField {
        let it = Scalar::complex(qi(0), t.clone());
        mono(0, [2, 0, 0], it.clone()).add(&mono(1, [1, 1, 0], it)).sub(&mono(2, [0, 2, 0], Scalar::i()))
    }
}
