//! Structure theory of finite-dimensional real Lie algebras of vector fields.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{Rational, Scalar};
use crate::fields::{support_slots, HoloVectorField, LatticePoint};
use crate::linalg::{self, Matrix};
use crate::poly::Monomial;

#[derive(Clone, Debug)]
pub struct LiePresentation {
    pub basis: Vec<HoloVectorField>,
    /// `structure[i][j][k] = c_{ij}^k` with `[b_i, b_j] = Σ_k c_{ij}^k b_k`.
    pub structure: Vec<Vec<Vec<Rational>>>,
    pub closed: bool,
    /// First bracket found outside the span, if any.
    pub offending: Option<(usize, usize)>,
}

/// Real coordinates of fields against the support of `basis`; `None` if a field has a term
/// outside that support.
struct RealCoords {
    slots: Vec<(usize, Monomial)>,
    vectors: Vec<Vec<Rational>>,
}

impl RealCoords {
    fn new(basis: &[HoloVectorField]) -> Self {
        let slots = support_slots(basis);
        let vectors = basis.iter().map(|b| b.real_coordinates(&slots)).collect();
        RealCoords { slots, vectors }
    }

    fn express(&self, f: &HoloVectorField) -> Option<Vec<Rational>> {
        let inside = f.terms().iter().all(|(k, m, _)| self.slots.iter().any(|(k2, m2)| k2 == k && m2 == m));
        if !inside {
            return None;
        }
        linalg::solve_combination(&self.vectors, &f.real_coordinates(&self.slots))
    }
}

/// Coefficients of `f` in the real span of `basis`, if it lies there.
pub fn real_span_coordinates(basis: &[HoloVectorField], f: &HoloVectorField) -> Option<Vec<Rational>> {
    if basis.is_empty() {
        return f.is_zero().then(Vec::new);
    }
    RealCoords::new(basis).express(f)
}

/// `Σ x_i b_i`.
pub fn combine(basis: &[HoloVectorField], x: &[Rational]) -> HoloVectorField {
    let mut f = HoloVectorField::zero(basis[0].vars());
    for (b, c) in basis.iter().zip(x) {
        if !c.is_zero() {
            f = f.add(&b.scale(&Scalar::from_rational(c.clone())));
        }
    }
    f
}

impl LiePresentation {
    pub fn new(basis: Vec<HoloVectorField>) -> Result<Self> {
        if basis.is_empty() {
            return Ok(LiePresentation { basis, structure: Vec::new(), closed: true, offending: None });
        }
        let coords = RealCoords::new(&basis);
        if let Some((j, x)) = linalg::first_dependency(&coords.vectors) {
            let terms: Vec<String> = x
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| format!("{c}*b{i}"))
                .collect();
            return Err(Error::DependentBasis(format!("b{j} = {}", if terms.is_empty() { "0".into() } else { terms.join(" + ") })));
        }
        let n = basis.len();
        let mut structure = vec![vec![vec![Rational::zero(); n]; n]; n];
        let mut offending = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let br = basis[i].bracket(&basis[j])?;
                match coords.express(&br) {
                    Some(x) => {
                        for k in 0..n {
                            structure[j][i][k] = -&x[k];
                            structure[i][j][k] = x[k].clone();
                        }
                    }
                    None => {
                        offending.get_or_insert((i, j));
                    }
                }
            }
        }
        Ok(LiePresentation { basis, structure, closed: offending.is_none(), offending })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn require_closed(&self) -> Result<()> {
        match self.offending {
            Some((i, j)) => Err(Error::NotClosed(format!("[b{i}, b{j}] leaves the span"))),
            None => Ok(()),
        }
    }

    /// Bracket of coordinate vectors through the structure table.
    pub fn bracket_coords(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let f = &x[i] * &y[j];
                for k in 0..n {
                    if !self.structure[i][j][k].is_zero() {
                        out[k] += &f * &self.structure[i][j][k];
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad x` in the basis (columns are images of basis vectors).
    pub fn ad(&self, x: &[Rational]) -> Matrix<Rational> {
        let n = self.dim();
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|j| {
                let mut e = vec![Rational::zero(); n];
                e[j] = Rational::from_integer(1.into());
                self.bracket_coords(x, &e)
            })
            .collect();
        linalg::transpose(&cols)
    }

    /// Number of basis triples violating the Jacobi identity in the table.
    pub fn jacobi_violations(&self) -> usize {
        let n = self.dim();
        let e = |i: usize| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::from_integer(1.into());
            v
        };
        let mut bad = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let a = self.bracket_coords(&e(i), &self.bracket_coords(&e(j), &e(k)));
                    let b = self.bracket_coords(&e(j), &self.bracket_coords(&e(k), &e(i)));
                    let c = self.bracket_coords(&e(k), &self.bracket_coords(&e(i), &e(j)));
                    if a.iter().zip(&b).zip(&c).any(|((a, b), c)| !(a + b + c).is_zero()) {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }

    pub fn killing(&self) -> Result<KillingData> {
        self.require_closed()?;
        let n = self.dim();
        let ads: Vec<Matrix<Rational>> = (0..n)
            .map(|i| {
                let mut e = vec![Rational::zero(); n];
                e[i] = Rational::from_integer(1.into());
                self.ad(&e)
            })
            .collect();
        let mut matrix = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let prod = linalg::mat_mul(&ads[i], &ads[j]);
                let tr: Rational = (0..n).map(|k| prod[k][k].clone()).sum();
                matrix[i][j] = tr.clone();
                matrix[j][i] = tr;
            }
        }
        let (p, q, _) = linalg::inertia(&matrix);
        Ok(KillingData { matrix, rank: p + q, signature: (p, q) })
    }

    /// Dimensions of the derived series, ending at its stable value.
    pub fn derived_series(&self) -> Result<Vec<usize>> {
        self.require_closed()?;
        let n = self.dim();
        let mut span: Matrix<Rational> = linalg::identity(n);
        let mut dims = vec![n];
        loop {
            let mut gens = Vec::new();
            for i in 0..span.len() {
                for j in (i + 1)..span.len() {
                    gens.push(self.bracket_coords(&span[i], &span[j]));
                }
            }
            let mut next = gens;
            let pivots = if next.is_empty() { Vec::new() } else { linalg::rref(&mut next) };
            let d = pivots.len();
            if d == *dims.last().unwrap() {
                break;
            }
            dims.push(d);
            if d == 0 {
                break;
            }
            span = next;
        }
        Ok(dims)
    }

    pub fn solvability(&self) -> Result<Solvability> {
        let dims = self.derived_series()?;
        Ok(Solvability { solvable: dims.last() == Some(&0), derived_dims: dims })
    }

    pub fn classify(&self) -> Result<String> {
        let k = self.killing()?;
        let s = self.solvability()?;
        let n = self.dim();
        let full = k.rank == n;
        let label = match (n, full, k.signature) {
            (10, true, (6, 4)) => "so(2,3)".to_string(),
            (6, true, (4, 2)) => "sl(2,R)⊕sl(2,R)".to_string(),
            (6, true, (2, 4)) => "sl(2,R)⊕su(2)".to_string(),
            (6, true, (0, 6)) => "su(2)⊕su(2)".to_string(),
            (6, true, (3, 3)) => "sl(2,C) as real".to_string(),
            _ if !full && s.solvable => "solvable".to_string(),
            (n, _, (p, q)) => format!("unrecognized({n}, {}, ({p},{q}))", k.rank),
        };
        Ok(label)
    }

    /// Generalized eigenspace decomposition of `ad(h1 + i·h2)` on the complex span of the basis.
    ///
    /// `i·h2` is complex multiplication of the field. The fields need not be basis elements,
    /// but must preserve the complex span.
    pub fn ad_grading(&self, h1: &HoloVectorField, h2: &HoloVectorField, bound: i64) -> Result<Grading> {
        self.require_closed()?;
        if !h1.bracket(h2)?.is_zero() {
            return Err(Error::NonCommuting);
        }
        let n = self.dim();
        let slots = support_slots(&self.basis);
        let cvecs: Vec<Vec<Scalar>> = self.basis.iter().map(|b| b.complex_coordinates(&slots)).collect();
        if linalg::first_dependency(&cvecs).is_some() {
            return Err(Error::DependentBasis("basis is not linearly independent over C".into()));
        }
        let h = h1.add(&h2.times_i());
        let express = |f: &HoloVectorField| -> Result<Vec<Scalar>> {
            let inside = f.terms().iter().all(|(k, m, _)| slots.iter().any(|(k2, m2)| k2 == k && m2 == m));
            let x = inside.then(|| linalg::solve_combination(&cvecs, &f.complex_coordinates(&slots))).flatten();
            x.ok_or_else(|| Error::NotClosed("grading element does not preserve the complex span".into()))
        };
        let cols = self.basis.iter().map(|b| express(&h.bracket(b)?)).collect::<Result<Vec<_>>>()?;
        let a = linalg::transpose(&cols);
        let mut spaces: BTreeMap<LatticePoint, Vec<Vec<Scalar>>> = BTreeMap::new();
        for re in -bound..=bound {
            for im in -bound..=bound {
                if (re + im).rem_euclid(2) != 0 {
                    continue;
                }
                let lambda = LatticePoint { re, im };
                let shifted = shift(&a, &lambda.to_scalar());
                let mut pw = shifted.clone();
                for _ in 1..n {
                    pw = linalg::mat_mul(&pw, &shifted);
                }
                let ns = linalg::nullspace(&pw, n);
                if !ns.is_empty() {
                    spaces.insert(lambda, ns);
                }
            }
        }
        let total: usize = spaces.values().map(Vec::len).sum();
        let to_field = |x: &[Scalar]| {
            let mut f = HoloVectorField::zero(self.basis[0].vars());
            for (b, c) in self.basis.iter().zip(x) {
                if !c.is_zero() {
                    f = f.add(&b.scale(c));
                }
            }
            f
        };
        let mut closure_ok = true;
        let mut violations = Vec::new();
        for (l, vs) in &spaces {
            for (m, ws) in &spaces {
                if m < l {
                    continue;
                }
                let target = l.add(*m);
                let projector = target_annihilator(&a, target, n);
                for v in vs {
                    for w in ws {
                        let br = to_field(v).bracket(&to_field(w))?;
                        let x = express(&br)?;
                        let ok = match &projector {
                            Some(p) => linalg::mat_mul(p, &x.iter().map(|c| vec![c.clone()]).collect()).iter().all(|r| r[0].is_zero()),
                            None => x.iter().all(Scalar::is_zero),
                        };
                        if !ok {
                            closure_ok = false;
                            violations.push((*l, *m));
                        }
                    }
                }
            }
        }
        violations.dedup();
        let dims = spaces.iter().map(|(l, v)| (*l, v.len())).collect();
        Ok(Grading { dims, total, complex_dim: n, closure_ok, violations })
    }
}

fn shift(a: &Matrix<Scalar>, lambda: &Scalar) -> Matrix<Scalar> {
    let mut m = a.clone();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = &row[i] - lambda;
    }
    m
}

/// `(A − ν)^n`, or `None` when `ν` is not a generalized eigenvalue (then brackets must vanish).
fn target_annihilator(a: &Matrix<Scalar>, nu: LatticePoint, n: usize) -> Option<Matrix<Scalar>> {
    let shifted = shift(a, &nu.to_scalar());
    let mut pw = shifted.clone();
    for _ in 1..n {
        pw = linalg::mat_mul(&pw, &shifted);
    }
    (linalg::rank(&pw) < n).then_some(pw)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KillingData {
    pub matrix: Matrix<Rational>,
    pub rank: usize,
    pub signature: (usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solvability {
    pub solvable: bool,
    pub derived_dims: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grading {
    /// Nonzero generalized eigenspaces and their complex dimensions.
    pub dims: BTreeMap<LatticePoint, usize>,
    pub total: usize,
    pub complex_dim: usize,
    pub closure_ok: bool,
    pub violations: Vec<(LatticePoint, LatticePoint)>,
}

impl Grading {
    pub fn roots(&self) -> Vec<LatticePoint> {
        self.dims.keys().copied().filter(|l| !l.is_zero()).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.total == self.complex_dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qi;
    use crate::fields::named::*;
    use crate::series::VarSet;

    fn amb() -> VarSet {
        VarSet::ambient(2)
    }

    #[test]
    fn sl2_triple() {
        let p = LiePresentation::new(vec![i_dw(), zeta1(), xi_plus_two(&qi(1))]).unwrap();
        assert!(p.closed);
        // [i∂w, ζ1] = 2 i∂w
        assert_eq!(p.structure[0][1], vec![qi(2), qi(0), qi(0)]);
        assert_eq!(p.structure[0][2], vec![qi(0), qi(-1), qi(0)]);
        let k = p.killing().unwrap();
        assert_eq!(k.signature, (2, 1));
        assert_eq!(p.jacobi_violations(), 0);
    }

    #[test]
    fn affine_line() {
        let d1 = HoloVectorField::coordinate(&amb(), 1);
        let z1d1 = HoloVectorField::monomial(&amb(), 1, &[0, 1, 0], Scalar::one());
        let p = LiePresentation::new(vec![d1, z1d1]).unwrap();
        assert!(p.closed);
        assert_eq!(p.structure[0][1], vec![qi(1), qi(0)]);
        let s = p.solvability().unwrap();
        assert!(s.solvable);
        assert_eq!(s.derived_dims, vec![2, 1, 0]);
        assert_eq!(p.classify().unwrap(), "solvable");
    }

    #[test]
    fn abelian_pair() {
        let p = LiePresentation::new(vec![zeta1(), zeta2()]).unwrap();
        assert!(p.structure.iter().flatten().flatten().all(Zero::is_zero));
        assert_eq!(p.solvability().unwrap().derived_dims, vec![2, 0]);
    }

    #[test]
    fn dependency_and_closure() {
        let err = LiePresentation::new(vec![zeta1(), zeta1().scale(&Scalar::from_int(3))]).unwrap_err();
        assert!(matches!(err, Error::DependentBasis(_)));
        let p = LiePresentation::new(vec![i_dw(), xi_plus_two(&qi(1))]).unwrap();
        assert!(!p.closed);
        assert!(p.killing().is_err());
    }

    #[test]
    fn grading_of_sl2_triple() {
        let p = LiePresentation::new(vec![i_dw(), zeta1(), xi_plus_two(&qi(1))]).unwrap();
        let g = p.ad_grading(&zeta1(), &HoloVectorField::zero(&amb()), 4).unwrap();
        let want: Vec<(LatticePoint, usize)> = vec![
            (LatticePoint { re: -2, im: 0 }, 1),
            (LatticePoint { re: 0, im: 0 }, 1),
            (LatticePoint { re: 2, im: 0 }, 1),
        ];
        assert_eq!(g.dims.into_iter().collect::<Vec<_>>(), want);
        assert!(g.closure_ok);
        assert!(p.ad_grading(&zeta1(), &i_dw(), 4).is_err());
    }
}
