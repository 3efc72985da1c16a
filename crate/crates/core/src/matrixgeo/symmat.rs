//! Small dense matrices of polynomials and symmetric-matrix coordinates.

use crate::exact::Scalar;
use crate::poly::Poly;

pub type PolyMatrix = Vec<Vec<Poly>>;

/// Upper-triangular index pairs of an `n×n` symmetric matrix, row-major.
pub fn sym_slots(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            out.push((i, j));
        }
    }
    out
}

pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Symmetric matrix whose upper triangle is read from `coords` (in [`sym_slots`] order).
pub fn sym_from_coords(n: usize, coords: &[Poly]) -> PolyMatrix {
    let nv = coords[0].nvars();
    let mut m = vec![vec![Poly::zero(nv); n]; n];
    for (c, (i, j)) in coords.iter().zip(sym_slots(n)) {
        m[i][j] = c.clone();
        m[j][i] = c.clone();
    }
    m
}

/// Upper triangle of a (symmetric) matrix.
pub fn sym_to_coords(m: &PolyMatrix) -> Vec<Poly> {
    sym_slots(m.len()).into_iter().map(|(i, j)| m[i][j].clone()).collect()
}

pub fn pm_identity(n: usize, nvars: usize) -> PolyMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Poly::one(nvars) } else { Poly::zero(nvars) }).collect()).collect()
}

pub fn pm_add(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.add(y)).collect()).collect()
}

pub fn pm_sub(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.sub(y)).collect()).collect()
}

pub fn pm_scale(a: &PolyMatrix, c: &Scalar) -> PolyMatrix {
    a.iter().map(|r| r.iter().map(|x| x.scale(c)).collect()).collect()
}

pub fn pm_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let nv = a[0][0].nvars();
    let m = b[0].len();
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    let mut acc = Poly::zero(nv);
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            acc.add_assign(&x.mul(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `a·b` with every entry truncated above `max_deg`.
pub fn pm_mul_truncated(a: &PolyMatrix, b: &PolyMatrix, max_deg: u32) -> PolyMatrix {
    let nv = a[0][0].nvars();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| {
                    let mut acc = Poly::zero(nv);
                    for (k, x) in row.iter().enumerate() {
                        acc.add_assign(&x.mul_truncated(&b[k][j], max_deg));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Determinant truncated above `max_deg`.
pub fn pm_det_truncated(a: &PolyMatrix, max_deg: u32) -> Poly {
    let n = a.len();
    let nv = if n == 0 { 0 } else { a[0][0].nvars() };
    match n {
        0 => Poly::one(nv),
        1 => a[0][0].truncate(max_deg),
        _ => {
            let mut acc = Poly::zero(nv);
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let t = a[0][j].mul_truncated(&pm_det_truncated(&minor(a, 0, j), max_deg), max_deg);
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

pub fn pm_transpose(a: &PolyMatrix) -> PolyMatrix {
    let m = a[0].len();
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn pm_map(a: &PolyMatrix, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

fn minor(a: &PolyMatrix, skip_r: usize, skip_c: usize) -> PolyMatrix {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_r)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != skip_c).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Determinant by cofactor expansion (intended for n ≤ 4).
pub fn pm_det(a: &PolyMatrix) -> Poly {
    let n = a.len();
    let nv = if n == 0 { 0 } else { a[0][0].nvars() };
    match n {
        0 => Poly::one(nv),
        1 => a[0][0].clone(),
        2 => a[0][0].mul(&a[1][1]).sub(&a[0][1].mul(&a[1][0])),
        _ => {
            let mut acc = Poly::zero(nv);
            for j in 0..n {
                if a[0][j].is_zero() {
                    continue;
                }
                let t = a[0][j].mul(&pm_det(&minor(a, 0, j)));
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

/// Adjugate: `a · adj(a) = det(a) · 1`.
pub fn pm_adj(a: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    let nv = a[0][0].nvars();
    if n == 1 {
        return vec![vec![Poly::one(nv)]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = pm_det(&minor(a, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        c.neg()
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjugate_identity() {
        let nv = 6;
        let coords: Vec<Poly> = (0..6).map(|i| Poly::var(nv, i)).collect();
        let m = sym_from_coords(3, &coords);
        let prod = pm_mul(&m, &pm_adj(&m));
        let det = pm_det(&m);
        let want = pm_map(&pm_identity(3, nv), |p| p.mul(&det));
        assert_eq!(prod, want);
        let t = pm_det_truncated(&m, 2);
        assert!(t.is_zero());
        assert_eq!(pm_det_truncated(&m, 3), det);
        assert_eq!(sym_slots(2), vec![(0, 0), (0, 1), (1, 1)]);
    }
}
