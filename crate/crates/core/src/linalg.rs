//! Sparse symmetric positive definite systems, solved by preconditioned
//! conjugate gradients.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Compressed sparse rows. Built incrementally from `(row, col, value)`
/// triplets; duplicates are summed.
#[derive(Debug, Clone)]
pub struct Csr {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Csr {
        t.sort_by_key(|a| (a.0, a.1));
        let mut offsets = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            offsets[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..n {
            offsets[r + 1] += offsets[r];
        }
        Csr { n, offsets, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.n {
            let mut s = 0.0;
            for k in self.offsets[r]..self.offsets[r + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[r] = s;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            for k in self.offsets[r]..self.offsets[r + 1] {
                if self.cols[k] == r {
                    d[r] += self.vals[k];
                }
            }
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of a conjugate gradient solve.
#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final residual norm relative to `|b|`.
    pub residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for `A x = b`, stopping once
/// `|b - A x| <= tol * |b|`.
pub fn conjugate_gradient(a: &Csr, b: &[f64], tol: f64, max_iter: usize) -> Result<CgSolution> {
    let n = a.dim();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok(CgSolution { x: vec![0.0; n], iterations: 0, residual: 0.0 });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        let res = dot(&r, &r).sqrt() / bnorm;
        if res <= tol {
            return Ok(CgSolution { x, iterations: it, residual: res });
        }
        a.mul(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) || !pap.is_finite() {
            return Err(Error::NumericFailure {
                step: it,
                detail: alloc::format!("conjugate gradient breakdown (pAp = {pap})"),
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = dot(&r, &r).sqrt() / bnorm;
    if res <= tol {
        return Ok(CgSolution { x, iterations: max_iter, residual: res });
    }
    Err(Error::NumericFailure {
        step: max_iter,
        detail: alloc::format!("conjugate gradient did not reach {tol:e} (residual {res:e})"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_path_laplacian() {
        // Chain of 50 unit resistors grounded at one end through the
        // diagonal, with unit current injected at the other.
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, if i == 0 { 2.0 } else if i == n - 1 { 1.0 } else { 2.0 }));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = Csr::from_triplets(n, t);
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        let sol = conjugate_gradient(&a, &b, 1e-12, 1000).unwrap();
        // Node i sits i + 1 resistors above ground.
        for (i, x) in sol.x.iter().enumerate() {
            assert!((x - (i as f64 + 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn duplicate_triplets_sum() {
        let a = Csr::from_triplets(1, vec![(0, 0, 1.0), (0, 0, 2.0)]);
        assert_eq!(a.diagonal(), vec![3.0]);
    }
}
