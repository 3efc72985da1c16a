//! Rational maps `x ↦ N(x)/Q(x)` with one shared denominator, checked by clearing denominators.

use crate::error::{Error, Result};
use crate::exact::Scalar;
use crate::poly::{Monomial, Poly};

#[derive(Clone, PartialEq, Debug)]
pub struct RationalMap {
    /// Components `N_k`, polynomials in the source coordinates.
    pub numerators: Vec<Poly>,
    /// Common denominator `Q`.
    pub denominator: Poly,
    pub inverse: Option<Box<RationalMap>>,
}

impl RationalMap {
    pub fn new(numerators: Vec<Poly>, denominator: Poly) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = denominator.nvars();
        if numerators.iter().any(|p| p.nvars() != n) {
            return Err(Error::CoordinateMismatch(n, numerators.len()));
        }
        Ok(RationalMap { numerators, denominator, inverse: None })
    }

    pub fn with_inverse(mut self, inv: RationalMap) -> Result<Self> {
        if inv.source_dim() != self.target_dim() || inv.target_dim() != self.source_dim() {
            return Err(Error::CoordinateMismatch(self.source_dim(), inv.target_dim()));
        }
        self.inverse = Some(Box::new(inv));
        Ok(self)
    }

    pub fn identity(n: usize) -> Self {
        let map = RationalMap { numerators: (0..n).map(|i| Poly::var(n, i)).collect(), denominator: Poly::one(n), inverse: None };
        let inv = map.clone();
        RationalMap { inverse: Some(Box::new(inv)), ..map }
    }

    pub fn source_dim(&self) -> usize {
        self.denominator.nvars()
    }

    pub fn target_dim(&self) -> usize {
        self.numerators.len()
    }

    /// Largest degree among numerators and denominator.
    pub fn degree(&self) -> u32 {
        self.numerators.iter().chain([&self.denominator]).filter_map(Poly::degree).max().unwrap_or(0)
    }

    /// `Q^e · p(N/Q)` for `e ≥ deg p`: the homogenized substitution, a polynomial in the source.
    pub fn homogenized(&self, p: &Poly, e: u32) -> Poly {
        assert_eq!(p.nvars(), self.target_dim());
        let n = self.source_dim();
        let mut qpow = vec![Poly::one(n)];
        for _ in 0..e {
            let next = qpow.last().unwrap().mul(&self.denominator);
            qpow.push(next);
        }
        let mut out = Poly::zero(n);
        for (m, c) in p.terms() {
            let d = m.degree();
            assert!(d <= e, "homogenization exponent below polynomial degree");
            let mut t = qpow[(e - d) as usize].scale(c);
            for (k, &x) in m.0.iter().enumerate() {
                if x > 0 {
                    t = t.mul(&self.numerators[k].pow(x as u32));
                }
            }
            out.add_assign(&t);
        }
        out
    }

    /// Residuals `P̃_k(N, Q) − x_k R̃(N, Q)` of inverse ∘ self; all zero iff the composition is the identity.
    pub fn composition_residuals(&self) -> Result<Vec<Poly>> {
        let inv = self.inverse.as_ref().ok_or_else(|| Error::NonInvertibleMap("no inverse supplied".into()))?;
        let e = inv.degree();
        let r = self.homogenized(&inv.denominator, e);
        let n = self.source_dim();
        Ok(inv
            .numerators
            .iter()
            .enumerate()
            .map(|(k, p)| self.homogenized(p, e).sub(&Poly::var(n, k).mul(&r)))
            .collect())
    }

    /// Evaluates at a point; `None` where the denominator vanishes.
    pub fn evaluate(&self, x: &[Scalar]) -> Option<Vec<Scalar>> {
        let q = self.denominator.evaluate(x).inv().ok()?;
        Some(self.numerators.iter().map(|p| &p.evaluate(x) * &q).collect())
    }

    /// Jacobian numerators: `∂_j N_k · Q − N_k · ∂_j Q`, so that `∂φ_k/∂x_j = J[k][j] / Q²`.
    pub fn jacobian_numerators(&self) -> Vec<Vec<Poly>> {
        let n = self.source_dim();
        let dq: Vec<Poly> = (0..n).map(|j| self.denominator.derivative(j)).collect();
        self.numerators
            .iter()
            .map(|nk| (0..n).map(|j| nk.derivative(j).mul(&self.denominator).sub(&nk.mul(&dq[j]))).collect())
            .collect()
    }
}

/// Coefficient of the first term of `p` in graded-lex order.
pub fn first_coeff(p: &Poly) -> Option<(Monomial, Scalar)> {
    p.leading_low().map(|(m, c)| (m.clone(), c.clone()))
}
