//! The invariant `δ(z) = det(z + z̄) − 2` on `SL(2, C)` and its hermitian variant.
//!
//! On `det z = 1` both reduce to bilinear expressions in `z` and its conjugate, which are
//! checked here as polynomial identities in the entries `a, b, c, d` of `z`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::symmat::*;
use super::tube::random_rational;
use crate::error::Result;
use crate::exact::Scalar;
use crate::poly::Poly;
use crate::series::VarSet;

/// `B(x, y) = x00 y11 + y00 x11 − x01 y10 − y01 x10`, so that `B(x, x) = 2 det x`.
pub fn det_polarization(x: &PolyMatrix, y: &PolyMatrix) -> Poly {
    x[0][0].mul(&y[1][1]).add(&y[0][0].mul(&x[1][1])).sub(&x[0][1].mul(&y[1][0])).sub(&y[0][1].mul(&x[1][0]))
}

fn entry_vars() -> VarSet {
    VarSet::matrix(4)
}

/// `z = [[a, b], [c, d]]` over the entry ring.
pub fn entry_matrix() -> PolyMatrix {
    let v = entry_vars();
    let g = |k| Poly::var(v.len(), v.holo(k));
    vec![vec![g(0), g(1)], vec![g(2), g(3)]]
}

fn conj_matrix(m: &PolyMatrix) -> PolyMatrix {
    let perm = entry_vars().conj_perm();
    pm_map(m, |p| p.conj_permuted(&perm))
}

/// `δ' = a d̄ + ā d − b c̄ − b̄ c`, equal to `δ` on `det z = 1`.
pub fn delta_prime(z: &PolyMatrix) -> Poly {
    det_polarization(z, &conj_matrix(z))
}

/// `a d̄ + ā d − b b̄ − c c̄`, the hermitian variant built from `z*`.
pub fn delta_hermitian_prime(z: &PolyMatrix) -> Poly {
    det_polarization(z, &pm_transpose(&conj_matrix(z)))
}

fn constant_matrix(m: &[[Scalar; 2]; 2]) -> PolyMatrix {
    let nv = entry_vars().len();
    m.iter().map(|r| r.iter().map(|x| Poly::constant(nv, x.clone())).collect()).collect()
}

fn inverse_sl2(m: &[[Scalar; 2]; 2]) -> [[Scalar; 2]; 2] {
    [[m[1][1].clone(), -&m[0][1]], [-&m[1][0], m[0][0].clone()]]
}

/// `δ'(j z) = −δ'(z)` for `j = [[0, i], [i, 0]]`.
pub fn j_flip_holds() -> bool {
    let z = entry_matrix();
    let j = constant_matrix(&[[Scalar::zero(), Scalar::i()], [Scalar::i(), Scalar::zero()]]);
    delta_prime(&pm_mul(&j, &z)) == delta_prime(&z).neg()
}

/// `δ'(g z h⁻¹) = δ'(z)` identically in `z`, for `g, h ∈ SL(2)` with real entries.
pub fn real_invariance_holds(g: &[[Scalar; 2]; 2], h: &[[Scalar; 2]; 2]) -> bool {
    let z = entry_matrix();
    let moved = pm_mul(&pm_mul(&constant_matrix(g), &z), &constant_matrix(&inverse_sl2(h)));
    delta_prime(&moved) == delta_prime(&z)
}

/// `δ_h'(g z g*) = δ_h'(z)` identically in `z`.
pub fn hermitian_invariance_holds(g: &[[Scalar; 2]; 2]) -> bool {
    let z = entry_matrix();
    let g_star = [[g[0][0].conj(), g[1][0].conj()], [g[0][1].conj(), g[1][1].conj()]];
    let moved = pm_mul(&pm_mul(&constant_matrix(g), &z), &constant_matrix(&g_star));
    delta_hermitian_prime(&moved) == delta_hermitian_prime(&z)
}

/// `δ_h(z) = det(z + z*) − 2` at a point.
pub fn delta_hermitian_at(z: &[[Scalar; 2]; 2]) -> Scalar {
    let s = |i: usize, j: usize| &z[i][j] + &z[j][i].conj();
    &(&(&s(0, 0) * &s(1, 1)) - &(&s(0, 1) * &s(1, 0))) - &Scalar::from_int(2)
}

/// `[[a, b], [c, (1 + bc)/a]]`, redrawing until `a ≠ 0`.
fn random_sl2(rng: &mut ChaCha8Rng, complex: bool) -> [[Scalar; 2]; 2] {
    let draw = |rng: &mut ChaCha8Rng| {
        let re = random_rational(rng, 4);
        let im = if complex { random_rational(rng, 4) } else { crate::exact::qi(0) };
        Scalar::complex(re, im)
    };
    loop {
        let (a, b, c) = (draw(rng), draw(rng), draw(rng));
        if let Ok(ai) = a.inv() {
            let d = &(&Scalar::one() + &(&b * &c)) * &ai;
            return [[a, b], [c, d]];
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaReport {
    pub j_flip: bool,
    pub real_samples: usize,
    pub real_ok: usize,
    pub hermitian_samples: usize,
    pub hermitian_ok: usize,
    /// `δ_h` at `[[1, i], [i, 0]]`.
    pub critical_example: Scalar,
}

impl DeltaReport {
    pub fn passed(&self) -> bool {
        self.j_flip && self.real_ok == self.real_samples && self.hermitian_ok == self.hermitian_samples
    }
}

pub fn delta_checks(samples: usize, seed: u64) -> Result<DeltaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut real_ok = 0;
    let mut hermitian_ok = 0;
    for _ in 0..samples {
        let g = random_sl2(&mut rng, false);
        let h = random_sl2(&mut rng, false);
        real_ok += real_invariance_holds(&g, &h) as usize;
        hermitian_ok += hermitian_invariance_holds(&random_sl2(&mut rng, true)) as usize;
    }
    let z = [[Scalar::one(), Scalar::i()], [Scalar::i(), Scalar::zero()]];
    Ok(DeltaReport {
        j_flip: j_flip_holds(),
        real_samples: samples,
        real_ok,
        hermitian_samples: samples,
        hermitian_ok,
        critical_example: delta_hermitian_at(&z),
    })
}
