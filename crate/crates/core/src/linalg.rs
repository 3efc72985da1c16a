//! Exact linear algebra over Q and Q(i, √2).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::{Rational, Scalar};

pub trait Field: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        Scalar::inv(self).ok()
    }
}

pub type Matrix<F> = Vec<Vec<F>>;

pub fn identity<F: Field>(n: usize) -> Matrix<F> {
    (0..n).map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect()).collect()
}

pub fn mat_mul<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    let mut acc = F::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            acc = acc.add(&x.mul(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn transpose<F: Field>(a: &Matrix<F>) -> Matrix<F> {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// In-place reduced row echelon form; returns pivot columns. Zero rows are removed.
pub fn rref<F: Field>(m: &mut Matrix<F>) -> Vec<usize> {
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot is invertible");
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    pivots
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Canonical nullspace basis read off the RREF: one vector per free column, with a 1 there.
pub fn nullspace<F: Field>(m: &Matrix<F>, ncols: usize) -> Vec<Vec<F>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    nullspace_from_rref(&a, &pivots, ncols)
}

fn nullspace_from_rref<F: Field>(a: &Matrix<F>, pivots: &[usize], ncols: usize) -> Vec<Vec<F>> {
    let mut out = Vec::new();
    for f in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); ncols];
        v[f] = F::one();
        for (row, &p) in a.iter().zip(pivots) {
            v[p] = row[f].neg();
        }
        out.push(v);
    }
    out
}

/// Coefficients `x` with `Σ x_i vectors[i] = target`, if they exist (first solution in RREF).
pub fn solve_combination<F: Field>(vectors: &[Vec<F>], target: &[F]) -> Option<Vec<F>> {
    let k = vectors.len();
    let n = target.len();
    let mut aug: Matrix<F> = (0..n)
        .map(|i| {
            let mut row: Vec<F> = vectors.iter().map(|v| v[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    if aug.is_empty() {
        return Some(vec![F::zero(); k]);
    }
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut x = vec![F::zero(); k];
    for (row, &p) in aug.iter().zip(&pivots) {
        x[p] = row[k].clone();
    }
    Some(x)
}

/// Indices of the first linearly dependent vector and its expression, if any.
pub fn first_dependency<F: Field>(vectors: &[Vec<F>]) -> Option<(usize, Vec<F>)> {
    for j in 1..vectors.len() {
        if let Some(x) = solve_combination(&vectors[..j], &vectors[j]) {
            return Some((j, x));
        }
    }
    if vectors.first().is_some_and(|v| v.iter().all(F::is_zero)) {
        return Some((0, Vec::new()));
    }
    None
}

/// Inertia `(positive, negative, zero)` of a symmetric rational matrix by congruence.
pub fn inertia(sym: &Matrix<Rational>) -> (usize, usize, usize) {
    let n = sym.len();
    let mut a = sym.clone();
    let mut alive: Vec<usize> = (0..n).collect();
    let (mut pos, mut neg) = (0, 0);
    while !alive.is_empty() {
        if let Some(&i) = alive.iter().find(|&&i| !Zero::is_zero(&a[i][i])) {
            let d = a[i][i].clone();
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            alive.retain(|&k| k != i);
            let col: Vec<Rational> = (0..n).map(|k| a[k][i].clone()).collect();
            for &r in &alive {
                for &c in &alive {
                    if !Zero::is_zero(&col[r]) && !Zero::is_zero(&col[c]) {
                        a[r][c] = &a[r][c] - &col[r] * &col[c] / &d;
                    }
                }
            }
            continue;
        }
        let pair = alive
            .iter()
            .flat_map(|&i| alive.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i < j && !Zero::is_zero(&a[i][j]));
        let Some((i, j)) = pair else { break };
        // hyperbolic block [[0, b], [b, 0]] contributes one of each sign
        pos += 1;
        neg += 1;
        let b = a[i][j].clone();
        alive.retain(|&k| k != i && k != j);
        let ci: Vec<Rational> = (0..n).map(|k| a[k][i].clone()).collect();
        let cj: Vec<Rational> = (0..n).map(|k| a[k][j].clone()).collect();
        for &r in &alive {
            for &c in &alive {
                // B · [[0, 1/b], [1/b, 0]] · Bᵀ
                let corr = (&ci[r] * &cj[c] + &cj[r] * &ci[c]) / &b;
                if !Zero::is_zero(&corr) {
                    a[r][c] = &a[r][c] - corr;
                }
            }
        }
    }
    (pos, neg, n - pos - neg)
}

/// Incremental fraction-free echelon form over Z.
///
/// Rows are scaled to primitive integer vectors; elimination uses the cross-multiplication
/// `p_c·row − row_c·p` divided by a gcd, so numerators never pass through rationals.
/// When a new row competes for an occupied pivot column, the entry of smaller magnitude
/// becomes the pivot.
#[derive(Clone, Debug)]
pub struct IntegerEchelon {
    ncols: usize,
    /// Pivot rows sorted by pivot column; each row's first nonzero entry sits at its pivot.
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl IntegerEchelon {
    pub fn new(ncols: usize) -> Self {
        IntegerEchelon { ncols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Adds a constraint row; returns true if it increased the rank.
    pub fn insert(&mut self, row: &[Rational]) -> bool {
        assert_eq!(row.len(), self.ncols);
        let Some(mut cur) = to_primitive(row) else {
            return false;
        };
        let mut idx = 0;
        loop {
            let Some(lead) = cur.iter().position(|x| !x.is_zero()) else {
                return false;
            };
            while idx < self.rows.len() && self.rows[idx].0 < lead {
                idx += 1;
            }
            if idx == self.rows.len() || self.rows[idx].0 > lead {
                self.rows.insert(idx, (lead, cur));
                return true;
            }
            if cur[lead].magnitude() < self.rows[idx].1[lead].magnitude() {
                std::mem::swap(&mut cur, &mut self.rows[idx].1);
            }
            let piv = &self.rows[idx].1;
            cur = eliminate(&cur, piv, lead);
            idx += 1;
        }
    }

    /// Rational nullspace basis in canonical (RREF) form.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m: Matrix<Rational> = self
            .rows
            .iter()
            .map(|(_, r)| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        let pivots = rref(&mut m);
        nullspace_from_rref(&m, &pivots, self.ncols)
    }
}

fn to_primitive(row: &[Rational]) -> Option<Vec<BigInt>> {
    let mut l = BigInt::one();
    let mut any = false;
    for x in row {
        if !Zero::is_zero(x) {
            any = true;
            l = l.lcm(x.denom());
        }
    }
    if !any {
        return None;
    }
    let ints: Vec<BigInt> = row.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    Some(make_primitive(ints))
}

fn make_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in &v {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return v;
            }
        }
    }
    if g > BigInt::one() {
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x / &g;
            }
        }
    }
    v
}

fn eliminate(cur: &[BigInt], piv: &[BigInt], c: usize) -> Vec<BigInt> {
    let g = piv[c].gcd(&cur[c]);
    let a = &piv[c] / &g;
    let b = &cur[c] / &g;
    let out = cur
        .iter()
        .zip(piv)
        .map(|(x, p)| match (x.is_zero(), p.is_zero()) {
            (_, true) => x * &a,
            (true, false) => -(p * &b),
            (false, false) => x * &a - p * &b,
        })
        .collect();
    make_primitive(out)
}
