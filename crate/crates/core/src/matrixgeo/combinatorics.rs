//! Separation of CR-function values on `T`: the invariant map `φ` and the hypersurface `N`,
//! the cardinality `σ_t`, the Taylor coefficients behind the non-analytic example, and the
//! fundamental groups of the higher tubes.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tube::{cone_point, random_rational};
use super::{trace, NORMALIZED_TRACE_OF_IDENTITY};
use crate::error::{Error, Result};
use crate::exact::{q, qi, Rational, Scalar};
use crate::linalg;

#[derive(Clone, Debug, PartialEq)]
pub enum QtClass {
    /// `v = r·y yᵀ + s·e`.
    InN { r: Rational, s: Rational },
    InW,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QtCertificate {
    pub class: QtClass,
    pub phi: (Scalar, Scalar),
    /// `x1² − y2²/(4x1²)` where `φ = (x1 + iy1, x2 + iy2)`.
    pub bound: Rational,
    /// How `x2` compares with `bound`.
    pub relation: Ordering,
}

impl QtCertificate {
    /// Equality on `N`, strict inequality on `W`, and `x1 > 0`.
    pub fn holds(&self) -> bool {
        let x1 = self.phi.0.components()[0].clone();
        let want = match self.class {
            QtClass::InN { .. } => Ordering::Equal,
            QtClass::InW => Ordering::Less,
        };
        x1.is_positive() && self.relation == want
    }
}

fn mat2_mul(a: &[[Scalar; 2]; 2], b: &[[Scalar; 2]; 2]) -> [[Scalar; 2]; 2] {
    let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// `φ(z) = (tr z, tr z² − (tr z)²)` with the normalized trace.
pub fn qt_phi(z: &[[Scalar; 2]; 2]) -> (Scalar, Scalar) {
    let t1 = trace(z, NORMALIZED_TRACE_OF_IDENTITY);
    let t2 = trace(&mat2_mul(z, z), NORMALIZED_TRACE_OF_IDENTITY);
    let phi2 = &t2 - &(&t1 * &t1);
    (t1, phi2)
}

/// Classifies `z = y yᵀ + iv` into `N` or `W` and certifies the image relation.
pub fn lemma_qt_membership(y: &[Rational; 2], v: &[Rational; 3]) -> Result<QtCertificate> {
    if y.iter().all(Zero::is_zero) {
        return Err(Error::NotOnTube);
    }
    let yy = vec![&y[0] * &y[0], &y[0] * &y[1], &y[1] * &y[1]];
    let e = vec![qi(1), qi(0), qi(1)];
    let class = match linalg::solve_combination(&[yy, e], v) {
        Some(rs) => QtClass::InN { r: rs[0].clone(), s: rs[1].clone() },
        None => QtClass::InW,
    };
    let point = cone_point(y, v);
    let m = point.entries();
    let z = [[m[0][0].clone(), m[0][1].clone()], [m[1][0].clone(), m[1][1].clone()]];
    let phi = qt_phi(&z);
    let [x1, _, _, _] = phi.0.components();
    let [x2, y2, _, _] = phi.1.components();
    let bound = x1 * x1 - y2 * y2 / (qi(4) * x1 * x1);
    let relation = x2.cmp(&bound);
    Ok(QtCertificate { class, phi, bound, relation })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QtSampleReport {
    pub n_samples: usize,
    pub n_ok: usize,
    pub w_samples: usize,
    pub w_ok: usize,
}

impl QtSampleReport {
    pub fn passed(&self) -> bool {
        self.n_ok == self.n_samples && self.w_ok == self.w_samples
    }
}

fn random_y(rng: &mut ChaCha8Rng) -> [Rational; 2] {
    loop {
        let y = [random_rational(rng, 5), random_rational(rng, 5)];
        if !y.iter().all(Zero::is_zero) {
            return y;
        }
    }
}

/// Certificates on random points of `N` (built from random `r, s`) and of `W`.
pub fn lemma_qt_samples(n_samples: usize, w_samples: usize, seed: u64) -> Result<QtSampleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n_ok = 0;
    for _ in 0..n_samples {
        let y = random_y(&mut rng);
        let (r, s) = (random_rational(&mut rng, 5), random_rational(&mut rng, 5));
        let v = [&r * &y[0] * &y[0] + &s, &r * &y[0] * &y[1], &r * &y[1] * &y[1] + &s];
        let c = lemma_qt_membership(&y, &v)?;
        n_ok += (matches!(c.class, QtClass::InN { .. }) && c.holds()) as usize;
    }
    let mut w_ok = 0;
    let mut drawn = 0;
    while drawn < w_samples {
        let y = random_y(&mut rng);
        let v = [random_rational(&mut rng, 5), random_rational(&mut rng, 5), random_rational(&mut rng, 5)];
        let c = lemma_qt_membership(&y, &v)?;
        if matches!(c.class, QtClass::InN { .. }) {
            continue;
        }
        drawn += 1;
        w_ok += c.holds() as usize;
    }
    Ok(QtSampleReport { n_samples, n_ok, w_samples, w_ok })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaInput {
    Rational(Rational),
    Irrational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cardinality {
    Finite(BigInt),
    Unbounded,
}

/// `σ_t`: the numerator `p` of `t = p/q` in lowest terms, unbounded for irrational `t`.
pub fn sigma_t(t: &SigmaInput) -> Result<Cardinality> {
    match t {
        SigmaInput::Irrational => Ok(Cardinality::Unbounded),
        SigmaInput::Rational(t) if !t.is_positive() => {
            Err(Error::InvalidArgument("the family is defined for t > 0".into()))
        }
        SigmaInput::Rational(t) => Ok(Cardinality::Finite(t.numer().clone())),
    }
}

/// `π1(T_{p,q})` for the tube over the cone of symmetric `n×n` matrices of inertia `(p, q)`.
pub fn pi1_tube(n: usize, p: usize, q: usize) -> Result<&'static str> {
    if n < 3 || p + q == 0 || p + q >= n {
        return Err(Error::InvalidArgument("need n ≥ 3 and 0 < p + q < n".into()));
    }
    Ok(if n == 3 && p == 1 && q == 1 {
        "Q8"
    } else if n > 3 && p > 0 && q > 0 {
        "Z2⊕Z2"
    } else {
        "Z2"
    })
}

/// `c_k = ∫ cos^k t dt` over a period and `a_k = binom(1/2, k) c_k`, both as multiples of `π`.
#[derive(Clone, Debug, PartialEq)]
pub struct QrSeries {
    pub k_max: usize,
    /// `c_k / π`.
    pub c_over_pi: Vec<Rational>,
    /// `a_k / π`.
    pub a_over_pi: Vec<Rational>,
    /// `|a_k|^{-1/k}` at the largest even `k ≤ k_max`.
    pub radius_estimate: f64,
    pub radius_index: usize,
}

/// Natural log of `|x|` for a nonzero big integer.
pub fn ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x.abs() >> shift).to_f64().expect("at most 60 bits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn qr_series(k_max: usize) -> Result<QrSeries> {
    if k_max < 4 {
        return Err(Error::InvalidArgument("k_max must be at least 4".into()));
    }
    let mut c = vec![qi(2), qi(0)];
    for k in 2..=k_max {
        let next = &c[k - 2] * q(k as i64 - 1, k as i64);
        c.push(next);
    }
    let half = q(1, 2);
    let mut binom = Rational::one();
    let mut a = vec![&binom * &c[0]];
    for k in 1..=k_max {
        binom = binom * (&half - qi(k as i64 - 1)) / qi(k as i64);
        a.push(&binom * &c[k]);
    }
    let k = if k_max % 2 == 0 { k_max } else { k_max - 1 };
    let ln_ak = ln_abs(a[k].numer()) - ln_abs(a[k].denom()) + std::f64::consts::PI.ln();
    Ok(QrSeries { k_max, c_over_pi: c, a_over_pi: a, radius_estimate: (-ln_ak / k as f64).exp(), radius_index: k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qt_examples() {
        let c = lemma_qt_membership(&[qi(1), qi(0)], &[qi(0), qi(0), qi(0)]).unwrap();
        assert_eq!(c.class, QtClass::InN { r: qi(0), s: qi(0) });
        assert_eq!(c.phi, (Scalar::from_rational(q(1, 2)), Scalar::from_rational(q(1, 4))));
        assert!(c.holds());
        let c = lemma_qt_membership(&[qi(1), qi(0)], &[qi(0), qi(1), qi(0)]).unwrap();
        assert_eq!(c.class, QtClass::InW);
        assert_eq!(c.phi.1, Scalar::from_rational(q(-3, 4)));
        assert_eq!(c.bound, q(1, 4));
        assert!(c.holds());
        let c = lemma_qt_membership(&[qi(1), qi(0)], &[qi(0), qi(0), qi(1)]).unwrap();
        assert_eq!(c.class, QtClass::InN { r: qi(-1), s: qi(1) });
        assert!(c.holds());
        assert_eq!(lemma_qt_membership(&[qi(0), qi(0)], &[qi(1), qi(0), qi(0)]), Err(Error::NotOnTube));
    }

    #[test]
    fn qt_sampled() {
        assert!(lemma_qt_samples(10, 10, 3).unwrap().passed());
    }

    #[test]
    fn sigma_examples() {
        let r = |t| sigma_t(&SigmaInput::Rational(t)).unwrap();
        assert_eq!(r(q(3, 2)), Cardinality::Finite(3.into()));
        assert_eq!(r(q(6, 4)), Cardinality::Finite(3.into()));
        assert_eq!(r(qi(1)), Cardinality::Finite(1.into()));
        assert_eq!(sigma_t(&SigmaInput::Irrational).unwrap(), Cardinality::Unbounded);
        assert!(sigma_t(&SigmaInput::Rational(qi(0))).is_err());
    }

    #[test]
    fn pi1_examples() {
        assert_eq!(pi1_tube(3, 1, 1).unwrap(), "Q8");
        assert_eq!(pi1_tube(4, 2, 1).unwrap(), "Z2⊕Z2");
        assert_eq!(pi1_tube(3, 2, 0).unwrap(), "Z2");
        assert!(pi1_tube(3, 2, 1).is_err());
        assert!(pi1_tube(2, 1, 0).is_err());
    }

    #[test]
    fn qr_small() {
        let s = qr_series(6).unwrap();
        assert_eq!(s.c_over_pi[2], qi(1));
        assert_eq!(s.c_over_pi[4], q(3, 4));
        assert_eq!(s.c_over_pi[3], qi(0));
        // binom(1/2, 2) = −1/8
        assert_eq!(s.a_over_pi[2], q(-1, 8));
        assert!(qr_series(3).is_err());
    }

    #[test]
    fn big_log() {
        let x = BigInt::from(10).pow(400);
        assert!((ln_abs(&x) - 400.0 * 10f64.ln()).abs() < 1e-9);
        assert_eq!(ln_abs(&BigInt::from(1)), 0.0);
    }
}
