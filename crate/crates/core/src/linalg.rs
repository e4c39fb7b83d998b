//! Exact linear algebra over Q and over the rational-function field.
//!
//! Everything here is plain Gaussian elimination; the matrices that show
//! up (ansatz systems, mixed-equation systems, wronskian-style matrices)
//! are small enough that no fraction-free cleverness is needed beyond
//! keeping entries reduced.

use crate::poly::Coeff;
use crate::rational::RationalFunction;
use num_traits::{One, Zero};

/// Basis of the right kernel of a matrix over Q. Rows are equations,
/// columns are unknowns. Basis vectors are produced in column order of
/// their free variable, each with the free slot set to 1.
pub fn kernel_q(matrix: &[Vec<Coeff>]) -> Vec<Vec<Coeff>> {
    if matrix.is_empty() {
        return Vec::new();
    }
    let cols = matrix[0].len();
    let mut a: Vec<Vec<Coeff>> = matrix.to_vec();
    let rows = a.len();
    let mut pivot_col_of_row = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        // pick the row with the shortest entry to keep numbers small
        let mut pivot = None;
        for i in r..rows {
            if !a[i][c].is_zero() {
                pivot = match pivot {
                    None => Some(i),
                    Some(j) => {
                        let sz = |q: &Coeff| q.numer().bits() + q.denom().bits();
                        if sz(&a[i][c]) < sz(&a[j][c]) {
                            Some(i)
                        } else {
                            Some(j)
                        }
                    }
                };
            }
        }
        let Some(p) = pivot else { continue };
        a.swap(r, p);
        let inv = Coeff::one() / a[r][c].clone();
        for x in a[r].iter_mut() {
            *x *= inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = a[r][j].clone() * f.clone();
                    a[i][j] -= t;
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let pivots: std::collections::BTreeSet<usize> = pivot_col_of_row.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Coeff::zero(); cols];
        v[free] = Coeff::one();
        for (row, &pc) in pivot_col_of_row.iter().enumerate() {
            v[pc] = -a[row][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Right-kernel basis over the rational-function field.
pub fn kernel_rf(matrix: &[Vec<RationalFunction>], arity: usize) -> Vec<Vec<RationalFunction>> {
    if matrix.is_empty() {
        return Vec::new();
    }
    let cols = matrix[0].len();
    let mut a: Vec<Vec<RationalFunction>> = matrix.to_vec();
    let rows = a.len();
    let mut pivot_col_of_row = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("pivot nonzero");
        for x in a[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    a[i][j] = a[i][j].sub(&a[r][j].mul(&f));
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let pivots: std::collections::BTreeSet<usize> = pivot_col_of_row.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![RationalFunction::zero(arity); cols];
        v[free] = RationalFunction::one(arity);
        for (row, &pc) in pivot_col_of_row.iter().enumerate() {
            v[pc] = a[row][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Solve A x = b over the rational-function field; None when inconsistent.
/// When the system is underdetermined the free unknowns are set to zero.
pub fn solve_rf(
    a: &[Vec<RationalFunction>],
    b: &[RationalFunction],
    arity: usize,
) -> Option<Vec<RationalFunction>> {
    assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return Some(Vec::new());
    }
    let cols = a[0].len();
    let mut m: Vec<Vec<RationalFunction>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let rows = m.len();
    let mut pivot_col_of_row = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("pivot nonzero");
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    m[i][j] = m[i][j].sub(&m[r][j].mul(&f));
                }
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // inconsistent row: 0 = nonzero
    for row in m.iter().skip(r) {
        if row[..cols].iter().all(|x| x.is_zero()) && !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![RationalFunction::zero(arity); cols];
    for (row, &pc) in pivot_col_of_row.iter().enumerate() {
        x[pc] = m[row][cols].clone();
    }
    Some(x)
}

/// Determinant over the rational-function field by elimination.
pub fn det_rf(a: &[Vec<RationalFunction>], arity: usize) -> RationalFunction {
    let n = a.len();
    if n == 0 {
        return RationalFunction::one(arity);
    }
    assert!(a.iter().all(|r| r.len() == n));
    let mut m = a.to_vec();
    let mut det = RationalFunction::one(arity);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return RationalFunction::zero(arity);
        };
        if p != c {
            m.swap(c, p);
            det = det.neg();
        }
        det = det.mul(&m[c][c]);
        let inv = m[c][c].inv().expect("pivot nonzero");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].mul(&inv);
            for j in c..n {
                m[i][j] = m[i][j].sub(&m[c][j].mul(&f));
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{coeff_int, MultiPoly};

    #[test]
    fn kernel_q_simple() {
        // x + y + z = 0, x - y = 0  ->  kernel spanned by (1, 1, -2)
        let m = vec![
            vec![coeff_int(1), coeff_int(1), coeff_int(1)],
            vec![coeff_int(1), coeff_int(-1), coeff_int(0)],
        ];
        let k = kernel_q(&m);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        for row in &m {
            let s: Coeff = row.iter().zip(v).map(|(a, b)| a.clone() * b.clone()).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn kernel_q_full_rank() {
        let m = vec![
            vec![coeff_int(1), coeff_int(0)],
            vec![coeff_int(0), coeff_int(1)],
        ];
        assert!(kernel_q(&m).is_empty());
    }

    #[test]
    fn solve_and_det_rf() {
        let t = RationalFunction::t(1);
        let one = RationalFunction::one(1);
        // [[t, 1], [1, t]] x = [t^2 + 1, 2t]  ->  x = (t, 1) when t^2 != 1
        let a = vec![
            vec![t.clone(), one.clone()],
            vec![one.clone(), t.clone()],
        ];
        let b = vec![t.mul(&t).add(&one), t.add(&t)];
        let x = solve_rf(&a, &b, 1).unwrap();
        assert_eq!(x[0], t);
        assert_eq!(x[1], one);
        let d = det_rf(&a, 1);
        let t2m1 = RationalFunction::from_poly(
            MultiPoly::t(1).pow(2).sub(&MultiPoly::one(1)),
        );
        assert_eq!(d, t2m1);
    }

    #[test]
    fn kernel_rf_rank_deficient() {
        let t = RationalFunction::t(1);
        // rows proportional: kernel has dimension 1
        let a = vec![
            vec![t.clone(), t.mul(&t)],
            vec![RationalFunction::one(1), t.clone()],
        ];
        let k = kernel_rf(&a, 1);
        assert_eq!(k.len(), 1);
        for row in &a {
            let mut s = RationalFunction::zero(1);
            for (c, v) in row.iter().zip(&k[0]) {
                s = s.add(&c.mul(v));
            }
            assert!(s.is_zero());
        }
    }
}
