//! Hypersurface germs `w + w̄ = ρ(z, z̄, Im w)` in `C^3`, tangency of polynomial fields,
//! and the degree-bounded solver for the algebra of infinitesimal CR-automorphisms.
//!
//! Truncation bookkeeping: a field of degree `d` applied to `w + w̄ − ρ` differentiates `ρ`
//! once, so tangency to order `D` needs `ρ` to order `D + 1`. Germs remember how to rebuild
//! themselves and are re-expanded on demand.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{qi, Rational, Scalar};
use crate::fields::HoloVectorField;
use crate::linalg::{self, IntegerEchelon};
use crate::poly::{monomials_up_to, Monomial, Poly};
use crate::series::{monomial_string, TruncatedSeries, VarSet};

type Builder = Arc<dyn Fn(u32) -> Result<TruncatedSeries> + Send + Sync>;

#[derive(Clone)]
pub struct HypersurfaceGerm {
    label: String,
    rho: TruncatedSeries,
    normal_form: bool,
    builder: Option<Builder>,
}

impl fmt::Debug for HypersurfaceGerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HypersurfaceGerm")
            .field("label", &self.label)
            .field("cutoff", &self.rho.cutoff())
            .field("normal_form", &self.normal_form)
            .field("rho", &self.rho.to_string())
            .finish()
    }
}

impl HypersurfaceGerm {
    /// Validates `ρ` (restricted ring `z1, z2`): real, no constant or linear part, and
    /// optionally the normal-form shape of its degree 2 and 3 parts.
    pub fn new(label: &str, rho: TruncatedSeries, normal_form: bool) -> Result<Self> {
        validate(&rho, normal_form)?;
        Ok(HypersurfaceGerm { label: label.to_string(), rho, normal_form, builder: None })
    }

    /// A germ that can be re-expanded at any cutoff.
    pub fn from_builder(
        label: &str,
        cutoff: u32,
        normal_form: bool,
        builder: impl Fn(u32) -> Result<TruncatedSeries> + Send + Sync + 'static,
    ) -> Result<Self> {
        let builder: Builder = Arc::new(builder);
        let rho = builder(cutoff)?;
        let mut g = Self::new(label, rho, normal_form)?;
        g.builder = Some(builder);
        Ok(g)
    }

    /// The surface `M_t`: `ρ = (2z1z̄1 + z1²z̄2 + z̄1²z2)(1 − t z2z̄2)^{-1}`.
    pub fn family(t: &Rational, cutoff: u32) -> Result<Self> {
        let t = t.clone();
        let label = format!("M_t(t={})", crate::exact::rational_to_pq(&t));
        Self::from_builder(&label, cutoff, true, move |c| family_rho(&t, c))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rho(&self) -> &TruncatedSeries {
        &self.rho
    }

    pub fn cutoff(&self) -> u32 {
        self.rho.cutoff()
    }

    pub fn is_normal_form(&self) -> bool {
        self.normal_form
    }

    pub fn restricted_vars(&self) -> VarSet {
        self.rho.vars().clone()
    }

    pub fn ambient_vars(&self) -> VarSet {
        VarSet::ambient(self.rho.vars().n())
    }

    /// The same surface expanded to at least `cutoff`.
    pub fn at_least(&self, cutoff: u32) -> Result<HypersurfaceGerm> {
        if self.cutoff() >= cutoff {
            return Ok(self.clone());
        }
        let builder = self
            .builder
            .as_ref()
            .ok_or(Error::InsufficientCutoff { have: self.cutoff(), need: cutoff })?;
        let rho = builder(cutoff)?;
        validate(&rho, self.normal_form)?;
        Ok(HypersurfaceGerm { rho, ..self.clone() })
    }

    /// `ρ` lifted to the ambient ring.
    pub fn rho_ambient(&self, cutoff: u32) -> TruncatedSeries {
        let r = self.rho.vars();
        let a = self.ambient_vars();
        let map: Vec<usize> = (0..r.len())
            .map(|g| {
                if g == r.v() {
                    a.v()
                } else if g < r.n() {
                    a.holo(g + 1)
                } else {
                    a.conj(g - r.n() + 1)
                }
            })
            .collect();
        TruncatedSeries::from_poly(&a, cutoff, self.rho.poly().remap(a.len(), &map))
    }

    /// `w + w̄ − ρ` in the ambient ring.
    pub fn defining_function(&self, cutoff: u32) -> TruncatedSeries {
        let a = self.ambient_vars();
        let w = TruncatedSeries::generator(&a, cutoff, a.holo(0));
        let cw = TruncatedSeries::generator(&a, cutoff, a.conj(0));
        w.add(&cw).sub(&self.rho_ambient(cutoff))
    }

    /// Substitutes `w ↦ ρ/2 + iv`, `w̄ ↦ ρ/2 − iv`; the result is exact to degree `d`.
    pub fn restrict(&self, f: &TruncatedSeries, d: u32) -> Result<TruncatedSeries> {
        let a = self.ambient_vars();
        if *f.vars() != a {
            return Err(Error::VarSetMismatch);
        }
        let wdeg = f.poly().degree_in(&[a.holo(0), a.conj(0)]);
        let need = d + wdeg;
        if f.cutoff() < need {
            return Err(Error::InsufficientCutoff { have: f.cutoff(), need });
        }
        if self.cutoff() < d {
            return Err(Error::InsufficientCutoff { have: self.cutoff(), need: d });
        }
        let r = self.restricted_vars();
        let half = Scalar::from_rational(crate::exact::q(1, 2));
        let rho_half = self.rho.with_cutoff(d).scale(&half);
        let iv = TruncatedSeries::generator(&r, d, r.v()).scale(&Scalar::i());
        let mut asg = BTreeMap::new();
        asg.insert(a.holo(0), rho_half.add(&iv));
        asg.insert(a.conj(0), rho_half.sub(&iv));
        Ok(f.substitute(&asg, &r)?.with_cutoff(d))
    }

    /// Restriction of `ξ(w + w̄ − ρ)` to the surface, exact to degree `d_trunc`.
    pub fn tangency_residual(&self, xi: &HoloVectorField, d_trunc: u32) -> Result<TruncatedSeries> {
        let germ = self.at_least(d_trunc + 1)?;
        let ambient_cutoff = d_trunc + xi.degree();
        let f = germ.defining_function(ambient_cutoff);
        let xf = xi.apply(&f)?;
        germ.restrict(&xf, d_trunc)
    }

    pub fn is_tangent(&self, xi: &HoloVectorField, d_trunc: u32) -> Result<Tangency> {
        let res = self.tangency_residual(xi, d_trunc)?;
        Ok(match res.leading_term() {
            None => Tangency::Tangent,
            Some((exps, coeff)) => Tangency::Residual {
                leading_monomial: res.monomial_string(&exps),
                leading_coefficient: coeff,
                terms: res.poly().len(),
            },
        })
    }

    /// Hermitian matrix `∂²ρ/∂z_j∂z̄_k` at `z` (with `v = 0` unless given) and its kernel.
    pub fn levi_matrix(&self, z: &[Scalar], v: Option<&Scalar>) -> Result<LeviData> {
        let r = self.restricted_vars();
        let n = r.n();
        if z.len() != n {
            return Err(Error::CoordinateMismatch(n, z.len()));
        }
        if let Some(v) = v {
            if !v.is_zero() && !self.rho.poly().free_of(&[r.v()]) {
                return Err(Error::SliceRequiresV);
            }
        }
        let mut point: Vec<Scalar> = z.to_vec();
        point.extend(z.iter().map(Scalar::conj));
        point.push(v.cloned().unwrap_or_default());
        let matrix: Vec<Vec<Scalar>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| self.rho.poly().derivative(r.holo(j)).derivative(r.conj(k)).evaluate(&point))
                    .collect()
            })
            .collect();
        let kernel = linalg::nullspace(&matrix, n);
        let determinant = if n == 2 {
            Some(&(&matrix[0][0] * &matrix[1][1]) - &(&matrix[0][1] * &matrix[1][0]))
        } else {
            None
        };
        Ok(LeviData { matrix, kernel, determinant })
    }

    /// True iff `ρ = (2z1z̄1 + z1²z̄2 + z̄1²z2)(1 − z2z̄2)^{-1}` to the germ cutoff.
    pub fn homogeneity_normal_form_check(&self) -> Result<bool> {
        if self.rho.vars().n() != 2 || !self.normal_form {
            return Ok(false);
        }
        Ok(family_rho(&qi(1), self.cutoff())? == self.rho)
    }

    /// Solves for all polynomial fields of degree ≤ `d` tangent to order `d_trunc`.
    pub fn hol_solve(&self, d: u32, d_trunc: u32) -> Result<HolBasisReport> {
        if d < 1 {
            return Err(Error::InvalidArgument("field degree bound must be at least 1".into()));
        }
        if d_trunc < 2 * d + 2 {
            return Err(Error::InvalidArgument(format!("truncation {d_trunc} below the floor 2d + 2 = {}", 2 * d + 2)));
        }
        let system = HolSystem::build(self, d, d_trunc)?;
        let (basis, coords) = system.solve(d_trunc);
        let stability = [d_trunc.saturating_sub(2), d_trunc.saturating_sub(1), d_trunc]
            .into_iter()
            .filter(|&dd| dd >= 2)
            .map(|dd| (dd, if dd == d_trunc { basis.len() } else { system.solve(dd).0.len() }))
            .collect::<Vec<_>>();
        let stable = stability.iter().all(|&(_, n)| n == basis.len());
        Ok(HolBasisReport {
            degree_bound: d,
            truncation: d_trunc,
            dimension: basis.len(),
            basis,
            coordinates: coords,
            unknowns: system.unknowns.len(),
            stability,
            stable,
        })
    }
}

/// `(2z1z̄1 + z1²z̄2 + z̄1²z2)(1 − t z2z̄2)^{-1}` in the restricted ring.
pub fn family_rho(t: &Rational, cutoff: u32) -> Result<TruncatedSeries> {
    let r = VarSet::restricted(2);
    let g = |i| TruncatedSeries::generator(&r, cutoff, i);
    let (z1, z2, cz1, cz2) = (g(r.holo(0)), g(r.holo(1)), g(r.conj(0)), g(r.conj(1)));
    let seed = z1.mul(&cz1).scale(&Scalar::from_int(2)).add(&z1.mul(&z1).mul(&cz2)).add(&cz1.mul(&cz1).mul(&z2));
    let denom = TruncatedSeries::one(&r, cutoff).sub(&z2.mul(&cz2).scale(&Scalar::from_rational(t.clone())));
    Ok(seed.mul(&denom.inverse()?))
}

fn validate(rho: &TruncatedSeries, normal_form: bool) -> Result<()> {
    if !rho.is_real() {
        return Err(Error::NotReal);
    }
    let p = rho.poly();
    if !p.homogeneous_part(0).is_zero() || !p.homogeneous_part(1).is_zero() {
        return Err(Error::NormalForm("defining function has constant or linear terms".into()));
    }
    if normal_form {
        let r = rho.vars();
        if r.n() != 2 {
            return Err(Error::NormalForm("normal form needs coordinates z1, z2".into()));
        }
        let g = |i| Poly::var(r.len(), i);
        let quad = g(r.holo(0)).mul(&g(r.conj(0))).scale(&Scalar::from_int(2));
        if rho.cutoff() >= 2 && p.homogeneous_part(2) != quad {
            return Err(Error::NormalForm("quadratic part must be 2*z1*conj(z1)".into()));
        }
        let cubic = g(r.holo(0)).pow(2).mul(&g(r.conj(1))).add(&g(r.conj(0)).pow(2).mul(&g(r.holo(1))));
        let cubic_v_free = Poly::from_terms(
            r.len(),
            p.homogeneous_part(3).terms().filter(|(m, _)| m.0[r.v()] == 0).map(|(m, c)| (m.clone(), c.clone())),
        );
        if rho.cutoff() >= 3 && cubic_v_free != cubic {
            return Err(Error::NormalForm("cubic part without v must be z1^2*conj(z2) + conj(z1)^2*z2".into()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tangency {
    Tangent,
    Residual { leading_monomial: String, leading_coefficient: Scalar, terms: usize },
}

impl Tangency {
    pub fn is_tangent(&self) -> bool {
        matches!(self, Tangency::Tangent)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeviData {
    pub matrix: Vec<Vec<Scalar>>,
    pub kernel: Vec<Vec<Scalar>>,
    pub determinant: Option<Scalar>,
}

impl LeviData {
    pub fn is_hermitian(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|j| (0..n).all(|k| self.matrix[j][k] == self.matrix[k][j].conj()))
    }
}

#[derive(Clone, Debug)]
pub struct HolBasisReport {
    pub degree_bound: u32,
    pub truncation: u32,
    pub dimension: usize,
    pub basis: Vec<HoloVectorField>,
    /// Nullspace vectors against the real unknowns.
    pub coordinates: Vec<Vec<Rational>>,
    pub unknowns: usize,
    /// `(truncation, dimension)` for the requested truncation and the two below it.
    pub stability: Vec<(u32, usize)>,
    pub stable: bool,
}

/// One real unknown: the real or imaginary part of the coefficient of a monomial field.
#[derive(Clone, Debug)]
struct Unknown {
    field: HoloVectorField,
}

struct HolSystem {
    unknowns: Vec<Unknown>,
    /// Restricted residual `R_j` of each unknown, exact to the build truncation.
    residuals: Vec<TruncatedSeries>,
    vars: VarSet,
}

impl HolSystem {
    fn build(germ: &HypersurfaceGerm, d: u32, d_trunc: u32) -> Result<Self> {
        let a = germ.ambient_vars();
        let n = a.n();
        let germ = germ.at_least(d_trunc + 1)?;
        let f = germ.defining_function(d_trunc + d);
        let mut unknowns = Vec::new();
        // order: coordinate index, then graded-lex monomial, then real before imaginary
        for k in 0..n {
            for m in monomials_up_to(n, d) {
                for c in [Scalar::one(), Scalar::i()] {
                    unknowns.push(Unknown { field: HoloVectorField::monomial(&a, k, &m.0, c) });
                }
            }
        }
        let residuals = unknowns
            .iter()
            .map(|u| germ.restrict(&u.field.apply(&f)?, d_trunc))
            .collect::<Result<Vec<_>>>()?;
        Ok(HolSystem { unknowns, residuals, vars: germ.restricted_vars() })
    }

    /// Nullspace at truncation `dd` (≤ the build truncation), as fields and raw coordinates.
    fn solve(&self, dd: u32) -> (Vec<HoloVectorField>, Vec<Vec<Rational>>) {
        let perm = self.vars.conj_perm();
        let mut rows: BTreeMap<Monomial, Vec<Scalar>> = BTreeMap::new();
        let nu = self.unknowns.len();
        for (j, r) in self.residuals.iter().enumerate() {
            for (m, c) in r.poly().terms() {
                if m.degree() > dd {
                    continue;
                }
                // the residual is real: the coefficient at the conjugate monomial is redundant
                let cm = Monomial(perm.iter().map(|&p| m.0[p]).collect());
                if cm < *m {
                    continue;
                }
                rows.entry(m.clone()).or_insert_with(|| vec![Scalar::zero(); nu])[j] = c.clone();
            }
        }
        let mut ech = IntegerEchelon::new(nu);
        'outer: for row in rows.values() {
            for comp in 0..4 {
                let real_row: Vec<Rational> = row.iter().map(|s| s.components()[comp].clone()).collect();
                ech.insert(&real_row);
                if ech.is_full() {
                    break 'outer;
                }
            }
        }
        let null = ech.nullspace();
        let fields = null
            .iter()
            .map(|x| {
                let mut f = HoloVectorField::zero(self.unknowns[0].field.vars());
                for (u, xi) in self.unknowns.iter().zip(x) {
                    if !num_traits::Zero::is_zero(xi) {
                        f = f.add(&u.field.scale(&Scalar::from_rational(xi.clone())));
                    }
                }
                f
            })
            .collect();
        (fields, null)
    }
}

/// Human-readable form of a residual leading term.
pub fn describe_monomial(vars: &VarSet, exps: &[u16]) -> String {
    monomial_string(vars, exps)
}
