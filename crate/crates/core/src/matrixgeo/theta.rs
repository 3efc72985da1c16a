//! The simply transitive group `Θ` of affine transformations
//! `θ_(s,ψ,w)(r, φ, v) = (r + s, φ + ψ, e^s λ_ψ v + w)` with `λ_ψ v = μ_ψ v μ_ψᵀ`.
//!
//! Exact mode keeps `e^s` symbolic: translations are finite sums `Σ e^σ W_σ` with rational
//! `σ`, and angles are restricted to multiples of `π/2` so that `μ_ψ` has entries in `Q(√2)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tube::random_rational;
use crate::error::{Error, Result};
use crate::exact::{q, qi, Rational, Scalar};

/// A symmetric 2×2 matrix `[[v0, v1], [v1, v2]]`.
pub type SymCoords = [Scalar; 3];

/// `Σ e^σ W_σ`, keyed by the exponent `σ`; zero matrices are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExpPoly(pub BTreeMap<Rational, SymCoords>);

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly(BTreeMap::new())
    }

    /// A constant matrix (exponent 0).
    pub fn constant(v: SymCoords) -> Self {
        let mut out = ExpPoly::zero();
        out.add_term(qi(0), v);
        out
    }

    fn add_term(&mut self, sigma: Rational, v: SymCoords) {
        let entry = self.0.entry(sigma.clone()).or_insert_with(|| [Scalar::zero(), Scalar::zero(), Scalar::zero()]);
        for (e, x) in entry.iter_mut().zip(v) {
            *e = &*e + &x;
        }
        if entry.iter().all(Scalar::is_zero) {
            self.0.remove(&sigma);
        }
    }

    pub fn add(&self, o: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (s, v) in &o.0 {
            out.add_term(s.clone(), v.clone());
        }
        out
    }

    /// `e^s λ_ψ (self)`.
    fn scale_rotate(&self, s: &Rational, psi: &Rational) -> Result<ExpPoly> {
        let mut out = ExpPoly::zero();
        for (sigma, v) in &self.0 {
            out.add_term(sigma + s, lambda_exact(psi, v)?);
        }
        Ok(out)
    }
}

/// `(s, ψ/π, w)`: an element of `Θ`, also used for points `(r, φ/π, v)` of the universal cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaElement {
    pub s: Rational,
    /// The angle as a multiple of `π`.
    pub psi_over_pi: Rational,
    pub w: ExpPoly,
}

impl ThetaElement {
    pub fn identity() -> Self {
        ThetaElement { s: qi(0), psi_over_pi: qi(0), w: ExpPoly::zero() }
    }
}

/// `cos(kπ/4)` and `sin(kπ/4)`.
fn eighth_turn(k: i64) -> (Scalar, Scalar) {
    let h = Scalar::new(qi(0), qi(0), q(1, 2), qi(0));
    let (o, z) = (Scalar::one(), Scalar::zero());
    let table = [
        (o.clone(), z.clone()),
        (h.clone(), h.clone()),
        (z.clone(), o.clone()),
        (-&h, h.clone()),
        (-&o, z.clone()),
        (-&h, -&h),
        (z.clone(), -&o),
        (h.clone(), -&h),
    ];
    table[k.rem_euclid(8) as usize].clone()
}

/// `μ_ψ` for `ψ = kπ/2`, i.e. rotation by `kπ/4`.
pub fn mu_exact(psi_over_pi: &Rational) -> Result<[[Scalar; 2]; 2]> {
    let twice = psi_over_pi * qi(2);
    if !twice.is_integer() {
        return Err(Error::UnsupportedAngle(format!(
            "ψ = {}π has no exact rotation; use float mode",
            crate::exact::rational_to_pq(psi_over_pi)
        )));
    }
    let k: i64 = twice.to_integer().try_into().map_err(|_| Error::UnsupportedAngle("angle too large".into()))?;
    let (c, s) = eighth_turn(k);
    Ok([[c.clone(), s.clone()], [-&s, c]])
}

/// `λ_ψ v = μ_ψ v μ_ψᵀ`.
pub fn lambda_exact(psi_over_pi: &Rational, v: &SymCoords) -> Result<SymCoords> {
    let m = mu_exact(psi_over_pi)?;
    let vm = [[v[0].clone(), v[1].clone()], [v[1].clone(), v[2].clone()]];
    let e = |i: usize, j: usize| {
        let mut acc = Scalar::zero();
        for a in 0..2 {
            for b in 0..2 {
                acc = &acc + &(&(&m[i][a] * &vm[a][b]) * &m[j][b]);
            }
        }
        acc
    };
    Ok([e(0, 0), e(0, 1), e(1, 1)])
}

/// `θ_a(x)`.
pub fn theta_apply(a: &ThetaElement, x: &ThetaElement) -> Result<ThetaElement> {
    Ok(ThetaElement {
        s: &a.s + &x.s,
        psi_over_pi: &a.psi_over_pi + &x.psi_over_pi,
        w: x.w.scale_rotate(&a.s, &a.psi_over_pi)?.add(&a.w),
    })
}

/// The group law: `θ_a ∘ θ_b = θ_{compose(a, b)}`.
pub fn theta_compose(a: &ThetaElement, b: &ThetaElement) -> Result<ThetaElement> {
    mu_exact(&a.psi_over_pi)?;
    mu_exact(&b.psi_over_pi)?;
    theta_apply(a, b)
}

/// Checks `θ_a(θ_b(x)) = θ_{compose(a,b)}(x)` on random exact points.
pub fn verify_composition(a: &ThetaElement, b: &ThetaElement, samples: usize, seed: u64) -> Result<bool> {
    let ab = theta_compose(a, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut rv = || Scalar::from_rational(random_rational(&mut rng, 6));
        let v = [rv(), rv(), rv()];
        let x = ThetaElement {
            s: random_rational(&mut rng, 3),
            psi_over_pi: random_rational(&mut rng, 3),
            w: ExpPoly::constant(v),
        };
        if theta_apply(a, &theta_apply(b, &x)?)? != theta_apply(&ab, &x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Report-only floating point version for arbitrary angles (radians).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaFloat {
    pub s: f64,
    pub psi: f64,
    pub w: [f64; 3],
}

pub fn lambda_f64(psi: f64, v: &[f64; 3]) -> [f64; 3] {
    let (c, s) = ((psi / 2.0).cos(), (psi / 2.0).sin());
    let m = [[c, s], [-s, c]];
    let vm = [[v[0], v[1]], [v[1], v[2]]];
    let e = |i: usize, j: usize| {
        let mut acc = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                acc += m[i][a] * vm[a][b] * m[j][b];
            }
        }
        acc
    };
    [e(0, 0), e(0, 1), e(1, 1)]
}

pub fn theta_compose_f64(a: &ThetaFloat, b: &ThetaFloat) -> ThetaFloat {
    let rot = lambda_f64(a.psi, &b.w);
    let k = a.s.exp();
    ThetaFloat { s: a.s + b.s, psi: a.psi + b.psi, w: [k * rot[0] + a.w[0], k * rot[1] + a.w[1], k * rot[2] + a.w[2]] }
}

/// True when `s ≠ 0` forces a translation term with a transcendental factor `e^s`.
pub fn has_exponential_terms(w: &ExpPoly) -> bool {
    w.0.keys().any(|s| !s.is_zero())
}
