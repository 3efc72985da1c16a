//! Sparse multivariate polynomials over [`Scalar`].
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], ordered graded-lexicographically
//! (lower total degree first). Zero coefficients are never stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::exact::{qi, Scalar};

/// Dense exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// Total degree counted only over the listed variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&i| self.0[i] as u32).sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        // graded, then exponent vectors descending so that x0 precedes x1
        self.degree().cmp(&o.degree()).then_with(|| o.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// All monomials in `n` variables of total degree at most `d`, in graded-lex order.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut cur = vec![0u16; n];
        fill(&mut out, &mut cur, 0, deg);
    }
    out.sort();
    out
}

fn fill(out: &mut Vec<Monomial>, cur: &mut Vec<u16>, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left as u16;
        out.push(Monomial(cur.clone()));
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e as u16;
        fill(out, cur, pos + 1, left - e);
    }
    cur[pos] = 0;
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Scalar::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Monomial::var(nvars, i), Scalar::one());
        p
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut p = Poly::zero(m.nvars());
        p.add_term(m, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Highest total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Highest degree in the listed variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms.keys().map(|m| m.degree_in(vars)).max().unwrap_or(0)
    }

    /// Lowest-order term in graded-lex order.
    pub fn leading_low(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }

    pub fn add_assign(&mut self, o: &Poly) {
        assert_eq!(self.nvars, o.nvars, "polynomial variable counts differ");
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        self.map_coeffs(|c| -c)
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        self.map_coeffs(|c| c * s)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c));
        }
        r
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        self.mul_truncated(o, u32::MAX)
    }

    /// Product with every term of total degree above `max_deg` dropped.
    pub fn mul_truncated(&self, o: &Poly, max_deg: u32) -> Poly {
        assert_eq!(self.nvars, o.nvars, "polynomial variable counts differ");
        let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > max_deg {
                break;
            }
            for (mb, cb) in &o.terms {
                // terms are sorted by degree, so the rest is too large as well
                if da + mb.degree() > max_deg {
                    break;
                }
                let prod = ca * cb;
                let m = ma.mul(mb);
                match acc.get_mut(&m) {
                    Some(c) => *c += &prod,
                    None => {
                        acc.insert(m, prod);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { nvars: self.nvars, terms: acc }
    }

    pub fn pow(&self, e: u32) -> Poly {
        self.pow_truncated(e, u32::MAX)
    }

    pub fn pow_truncated(&self, e: u32, max_deg: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul_truncated(self, max_deg);
        }
        acc
    }

    pub fn truncate(&self, max_deg: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_deg)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps the terms of total degree exactly `deg`.
    pub fn homogeneous_part(&self, deg: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == deg)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Formal partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut r = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            r.add_term(m2, c.scale(&qi(e as i64)));
        }
        r
    }

    /// Substitutes `images[i]` for variable `i`; the images share a target variable count.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        self.substitute_truncated(images, u32::MAX)
    }

    /// Substitution with all intermediate products truncated above `max_deg`.
    /// Sound only when every image has zero constant term or the source is exact.
    pub fn substitute_truncated(&self, images: &[Poly], max_deg: u32) -> Poly {
        assert_eq!(images.len(), self.nvars, "one image per variable required");
        let target_n = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(p.nvars)]).collect();
        let mut out = Poly::zero(target_n);
        for (m, c) in &self.terms {
            let mut term = Poly::constant(target_n, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_truncated(&images[i], max_deg);
                    powers[i].push(next);
                }
                term = term.mul_truncated(&powers[i][e as usize], max_deg);
                if term.is_zero() {
                    break;
                }
            }
            out.add_assign(&term);
        }
        out
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &x.pow(e as u32);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Renames variables: variable `i` becomes `map[i]` in a ring with `new_n` variables.
    pub fn remap(&self, new_n: usize, map: &[usize]) -> Poly {
        let mut r = Poly::zero(new_n);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; new_n];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[map[i]] += k;
                }
            }
            r.add_term(Monomial(e), c.clone());
        }
        r
    }

    /// Conjugates coefficients and permutes variables by `perm`.
    pub fn conj_permuted(&self, perm: &[usize]) -> Poly {
        self.map_coeffs(Scalar::conj).remap(self.nvars, perm)
    }

    /// True if no term involves any of the listed variables.
    pub fn free_of(&self, vars: &[usize]) -> bool {
        self.terms.keys().all(|m| vars.iter().all(|&i| m.0[i] == 0))
    }
}
