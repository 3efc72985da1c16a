//! Truncated power series in holomorphic generators, their formal conjugates and `v`.
//!
//! Generator layout for a [`VarSet`] with `n` complex coordinates:
//! `0..n` holomorphic, `n..2n` conjugates (same order), `2n` the real generator `v`.
//! Every generator, `v` included, has degree one.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::Scalar;
use crate::poly::{Monomial, Poly};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VarSet {
    names: Vec<String>,
    has_w: bool,
}

impl VarSet {
    /// Coordinates `w, z1, .., z_nz`; `w` is coordinate 0.
    pub fn ambient(nz: usize) -> Self {
        let mut names = vec!["w".to_string()];
        names.extend((1..=nz).map(|k| format!("z{k}")));
        VarSet { names, has_w: true }
    }

    /// Coordinates `z1, .., z_nz` of the hypersurface (no `w`).
    pub fn restricted(nz: usize) -> Self {
        VarSet { names: (1..=nz).map(|k| format!("z{k}")).collect(), has_w: false }
    }

    /// Coordinates `z0, .., z_{n-1}` (entries of a symmetric matrix).
    pub fn matrix(n: usize) -> Self {
        VarSet { names: (0..n).map(|k| format!("z{k}")).collect(), has_w: false }
    }

    /// Number of complex coordinates.
    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        2 * self.n() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn has_w(&self) -> bool {
        self.has_w
    }

    pub fn holo(&self, k: usize) -> usize {
        k
    }

    pub fn conj(&self, k: usize) -> usize {
        self.n() + k
    }

    pub fn v(&self) -> usize {
        2 * self.n()
    }

    /// Index of the coordinate named `name`, if any.
    pub fn coordinate(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn coordinate_name(&self, k: usize) -> &str {
        &self.names[k]
    }

    /// Conjugate partner of a generator; `v` is self-paired.
    pub fn partner(&self, g: usize) -> usize {
        let n = self.n();
        match g {
            g if g < n => g + n,
            g if g < 2 * n => g - n,
            g => g,
        }
    }

    pub fn conj_perm(&self) -> Vec<usize> {
        (0..self.len()).map(|g| self.partner(g)).collect()
    }

    pub fn generator_name(&self, g: usize) -> String {
        let n = self.n();
        if g < n {
            self.names[g].clone()
        } else if g < 2 * n {
            format!("conj({})", self.names[g - n])
        } else {
            "v".to_string()
        }
    }

    pub fn holo_generators(&self) -> Vec<usize> {
        (0..self.n()).collect()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    vars: VarSet,
    cutoff: u32,
    poly: Poly,
}

impl TruncatedSeries {
    pub fn zero(vars: &VarSet, cutoff: u32) -> Self {
        TruncatedSeries { vars: vars.clone(), cutoff, poly: Poly::zero(vars.len()) }
    }

    pub fn constant(vars: &VarSet, cutoff: u32, c: Scalar) -> Self {
        TruncatedSeries { vars: vars.clone(), cutoff, poly: Poly::constant(vars.len(), c) }
    }

    pub fn one(vars: &VarSet, cutoff: u32) -> Self {
        Self::constant(vars, cutoff, Scalar::one())
    }

    pub fn generator(vars: &VarSet, cutoff: u32, g: usize) -> Self {
        Self::from_poly(vars, cutoff, Poly::var(vars.len(), g))
    }

    /// Wraps a polynomial, dropping terms beyond the cutoff.
    pub fn from_poly(vars: &VarSet, cutoff: u32, p: Poly) -> Self {
        assert_eq!(p.nvars(), vars.len(), "polynomial does not match the variable set");
        TruncatedSeries { vars: vars.clone(), cutoff, poly: p.truncate(cutoff) }
    }

    /// Builds a series from explicit terms; duplicates are summed.
    pub fn from_terms(
        vars: &VarSet,
        cutoff: u32,
        terms: impl IntoIterator<Item = (Vec<u16>, Scalar)>,
    ) -> Result<Self> {
        let mut p = Poly::zero(vars.len());
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(Error::VarSetMismatch);
            }
            let m = Monomial(e);
            if m.degree() > cutoff {
                return Err(Error::BeyondCutoff { degree: m.degree(), cutoff });
            }
            p.add_term(m, c);
        }
        Ok(TruncatedSeries { vars: vars.clone(), cutoff, poly: p })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn into_poly(self) -> Poly {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        TruncatedSeries { vars: self.vars.clone(), cutoff, poly: self.poly.truncate(cutoff) }
    }

    fn check(&self, o: &Self) -> Result<u32> {
        if self.vars != o.vars {
            return Err(Error::VarSetMismatch);
        }
        Ok(self.cutoff.min(o.cutoff))
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        let c = self.check(o)?;
        Ok(Self::from_poly(&self.vars, c, self.poly.add(&o.poly)))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        let c = self.check(o)?;
        Ok(Self::from_poly(&self.vars, c, self.poly.sub(&o.poly)))
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        let c = self.check(o)?;
        Ok(TruncatedSeries { vars: self.vars.clone(), cutoff: c, poly: self.poly.mul_truncated(&o.poly, c) })
    }

    /// Sum; panics on mismatched variable sets (use [`Self::checked_add`] to get an error).
    pub fn add(&self, o: &Self) -> Self {
        self.checked_add(o).expect("series variable sets differ")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.checked_sub(o).expect("series variable sets differ")
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.checked_mul(o).expect("series variable sets differ")
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { vars: self.vars.clone(), cutoff: self.cutoff, poly: self.poly.neg() }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        TruncatedSeries { vars: self.vars.clone(), cutoff: self.cutoff, poly: self.poly.scale(s) }
    }

    pub fn pow(&self, e: u32) -> Self {
        TruncatedSeries {
            vars: self.vars.clone(),
            cutoff: self.cutoff,
            poly: self.poly.pow_truncated(e, self.cutoff),
        }
    }

    /// Multiplicative inverse modulo the cutoff.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.poly.constant_term();
        if c0.is_zero() {
            return Err(Error::NonUnitSeries);
        }
        let c0_inv = c0.inv()?;
        // a = c0 (1 - r) with r free of constants; 1/a = c0^{-1} Σ r^k
        let r = Self::one(&self.vars, self.cutoff).sub(&self.scale(&c0_inv));
        let mut acc = Self::one(&self.vars, self.cutoff);
        let mut power = acc.clone();
        for _ in 0..self.cutoff {
            power = power.mul(&r);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc.scale(&c0_inv))
    }

    pub fn partial(&self, g: usize) -> Self {
        TruncatedSeries { vars: self.vars.clone(), cutoff: self.cutoff, poly: self.poly.derivative(g) }
    }

    /// Swaps every generator with its partner and conjugates coefficients.
    pub fn conjugate(&self) -> Self {
        TruncatedSeries {
            vars: self.vars.clone(),
            cutoff: self.cutoff,
            poly: self.poly.conj_permuted(&self.vars.conj_perm()),
        }
    }

    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }

    /// Substitutes series for generators. All images must share one target variable set;
    /// generators without an assignment must exist in the target under the same name.
    ///
    /// The result cutoff is the minimum of the source and image cutoffs. An image with a
    /// nonzero constant term is rejected whenever its generator occurs in the source,
    /// since dropped higher powers would then feed low degrees.
    pub fn substitute(&self, assignment: &BTreeMap<usize, TruncatedSeries>, target: &VarSet) -> Result<Self> {
        let mut cutoff = self.cutoff;
        let mut images = Vec::with_capacity(self.vars.len());
        for g in 0..self.vars.len() {
            match assignment.get(&g) {
                Some(img) => {
                    if img.vars != *target {
                        return Err(Error::VarSetMismatch);
                    }
                    if !img.poly.constant_term().is_zero() && !self.poly.free_of(&[g]) {
                        return Err(Error::UnsoundSubstitution(format!(
                            "image of {} has a nonzero constant term",
                            self.vars.generator_name(g)
                        )));
                    }
                    cutoff = cutoff.min(img.cutoff);
                    images.push(img.poly.clone());
                }
                None if self.poly.free_of(&[g]) => images.push(Poly::zero(target.len())),
                None => {
                    let tg = map_generator(&self.vars, target, g).ok_or_else(|| {
                        Error::UnsoundSubstitution(format!(
                            "generator {} has no image in the target ring",
                            self.vars.generator_name(g)
                        ))
                    })?;
                    images.push(Poly::var(target.len(), tg));
                }
            }
        }
        let poly = self.poly.substitute_truncated(&images, cutoff);
        Ok(TruncatedSeries { vars: target.clone(), cutoff, poly })
    }

    pub fn coeff(&self, exps: &[u16]) -> Scalar {
        self.poly.coeff(&Monomial(exps.to_vec()))
    }

    /// Lowest-order nonzero term.
    pub fn leading_term(&self) -> Option<(Vec<u16>, Scalar)> {
        self.poly.leading_low().map(|(m, c)| (m.0.clone(), c.clone()))
    }

    /// Renders one monomial in DSL syntax.
    pub fn monomial_string(&self, exps: &[u16]) -> String {
        monomial_string(&self.vars, exps)
    }
}

/// Finds generator `g` of `from` in `to` by coordinate name.
fn map_generator(from: &VarSet, to: &VarSet, g: usize) -> Option<usize> {
    let n = from.n();
    if g == from.v() {
        return Some(to.v());
    }
    let k = to.coordinate(from.coordinate_name(g % n))?;
    Some(if g < n { to.holo(k) } else { to.conj(k) })
}

pub fn monomial_string(vars: &VarSet, exps: &[u16]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(g, &e)| {
            let name = vars.generator_name(g);
            if e == 1 {
                name
            } else {
                format!("{name}^{e}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// DSL-compatible rendering (no truncation marker).
impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_string(&self.vars, &self.poly))
    }
}

pub fn poly_string(vars: &VarSet, p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let terms: Vec<String> = p
        .terms()
        .map(|(m, c)| {
            let mono = monomial_string(vars, &m.0);
            if m.is_one() {
                format!("({c})")
            } else if c.is_one() {
                mono
            } else {
                format!("({c})*{mono}")
            }
        })
        .collect();
    terms.join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn r() -> VarSet {
        VarSet::restricted(2)
    }

    // generator indices in the restricted ring: z1=0, z2=1, cz1=2, cz2=3, v=4
    fn g(d: u32, i: usize) -> TruncatedSeries {
        TruncatedSeries::generator(&r(), d, i)
    }

    fn c(d: u32, n: i64) -> TruncatedSeries {
        TruncatedSeries::constant(&r(), d, Scalar::from_int(n))
    }

    fn cubic_seed(d: u32) -> TruncatedSeries {
        let (z1, z2, cz1, cz2) = (g(d, 0), g(d, 1), g(d, 2), g(d, 3));
        c(d, 2).mul(&z1).mul(&cz1).add(&z1.mul(&z1).mul(&cz2)).add(&cz1.mul(&cz1).mul(&z2))
    }

    #[test]
    fn from_terms_normalizes() {
        let s = TruncatedSeries::from_terms(&r(), 4, vec![]).unwrap();
        assert!(s.is_zero());
        let s = TruncatedSeries::from_terms(
            &r(),
            4,
            vec![(vec![0, 0, 0, 0, 1], Scalar::from_int(1)), (vec![0, 0, 0, 0, 1], Scalar::from_int(2))],
        )
        .unwrap();
        assert_eq!(s, g(4, 4).scale(&Scalar::from_int(3)));
        let quad = TruncatedSeries::from_terms(&r(), 4, vec![(vec![1, 0, 1, 0, 0], Scalar::from_int(2))]).unwrap();
        assert_eq!(quad, c(4, 2).mul(&g(4, 0)).mul(&g(4, 2)));
        let err = TruncatedSeries::from_terms(&r(), 1, vec![(vec![1, 0, 1, 0, 0], Scalar::one())]);
        assert!(matches!(err, Err(Error::BeyondCutoff { .. })));
    }

    #[test]
    fn arithmetic_examples() {
        let z1 = g(2, 0);
        let p = c(2, 1).add(&z1).mul(&c(2, 1).sub(&z1));
        assert_eq!(p, c(2, 1).sub(&z1.mul(&z1)));
        let a = g(3, 0).mul(&g(3, 2));
        let b = g(3, 1).mul(&g(3, 3));
        assert!(a.mul(&b).is_zero());
        let other = TruncatedSeries::zero(&VarSet::ambient(2), 3);
        assert_eq!(a.checked_add(&other), Err(Error::VarSetMismatch));
    }

    #[test]
    fn six_term_product() {
        let d = 5;
        let p = cubic_seed(d).mul(&c(d, 1).add(&g(d, 1).mul(&g(d, 3))));
        assert_eq!(p.poly().len(), 6);
        // hand expansion: 2|z1|^2 + z1^2 cz2 + cz1^2 z2 + 2|z1|^2|z2|^2 + z1^2 z2 cz2^2 (deg 5) + cz1^2 z2^2 cz2 (deg 5)
        assert_eq!(p.coeff(&[1, 1, 1, 1, 0]), Scalar::from_int(2));
        assert_eq!(p.coeff(&[2, 1, 0, 2, 0]), Scalar::one());
        assert_eq!(p.coeff(&[0, 2, 2, 1, 0]), Scalar::one());
    }

    #[test]
    fn geometric_inverse() {
        let d = 6;
        let u = g(d, 1).mul(&g(d, 3));
        let inv = c(d, 1).sub(&u).inverse().unwrap();
        let want = c(d, 1).add(&u).add(&u.pow(2)).add(&u.pow(3));
        assert_eq!(inv, want);
        assert_eq!(c(3, 1).inverse().unwrap(), c(3, 1));
        assert_eq!(g(3, 0).inverse(), Err(Error::NonUnitSeries));
    }

    #[test]
    fn inverse_of_two_plus_v() {
        let d = 2;
        let v = g(d, 4);
        let inv = c(d, 2).add(&v).inverse().unwrap();
        let want = TruncatedSeries::constant(&r(), d, Scalar::from_rational(q(1, 2)))
            .sub(&v.scale(&Scalar::from_rational(q(1, 4))))
            .add(&v.mul(&v).scale(&Scalar::from_rational(q(1, 8))));
        assert_eq!(inv, want);
        assert!(inv.mul(&c(d, 2).add(&v)).sub(&c(d, 1)).is_zero());
    }

    #[test]
    fn partials() {
        let d = 5;
        let quad = c(d, 2).mul(&g(d, 0)).mul(&g(d, 2));
        assert_eq!(quad.partial(0), c(d, 2).mul(&g(d, 2)));
        assert_eq!(g(d, 4).pow(2).partial(4), c(d, 2).mul(&g(d, 4)));
        let a = cubic_seed(d);
        let b = c(d, 1).add(&g(d, 1).mul(&g(d, 3)));
        let lhs = a.mul(&b).partial(3);
        let rhs = a.partial(3).mul(&b).add(&a.mul(&b.partial(3)));
        // product rule holds to one degree below the cutoff
        assert_eq!(lhs.with_cutoff(d - 1), rhs.with_cutoff(d - 1));
    }

    #[test]
    fn conjugation() {
        let d = 4;
        let iz1 = g(d, 0).scale(&Scalar::i());
        assert_eq!(iz1.conjugate(), g(d, 2).scale(&Scalar::complex(qi(0), qi(-1))));
        let real = c(d, 2).mul(&g(d, 0)).mul(&g(d, 2)).add(&g(d, 4));
        assert!(real.is_real());
        let cub = g(d, 0).pow(2).mul(&g(d, 3));
        assert_eq!(cub.conjugate(), g(d, 2).pow(2).mul(&g(d, 1)));
        assert!(cub.add(&cub.conjugate()).is_real());
    }

    #[test]
    fn substitution_examples() {
        let d = 4;
        let s = c(d, 2).mul(&g(d, 0)).mul(&g(d, 2)).add(&g(d, 4));
        let mut asg = BTreeMap::new();
        asg.insert(0, TruncatedSeries::zero(&r(), d));
        assert_eq!(s.substitute(&asg, &r()).unwrap(), g(d, 4));

        let amb = VarSet::ambient(2);
        let w = TruncatedSeries::generator(&amb, d, amb.holo(0));
        let cw = TruncatedSeries::generator(&amb, d, amb.conj(0));
        let iv = g(d, 4).scale(&Scalar::i());
        let mut asg = BTreeMap::new();
        asg.insert(amb.holo(0), iv.clone());
        asg.insert(amb.conj(0), iv.neg());
        assert!(w.add(&cw).substitute(&asg, &r()).unwrap().is_zero());

        // w -> rho/2 + i v with rho = 2 z1 cz1
        let rho_half = g(d, 0).mul(&g(d, 2));
        let mut asg = BTreeMap::new();
        asg.insert(amb.holo(0), rho_half.add(&iv));
        let got = w.mul(&w).substitute(&asg, &r()).unwrap();
        let x = rho_half.add(&iv);
        let want = x.mul(&x);
        assert_eq!(got, want);
        assert_eq!(got.coeff(&[1, 0, 1, 0, 1]), Scalar::complex(qi(0), qi(2)));

        let mut bad = BTreeMap::new();
        bad.insert(0, c(d, 1));
        assert!(matches!(s.substitute(&bad, &r()), Err(Error::UnsoundSubstitution(_))));
    }
}
