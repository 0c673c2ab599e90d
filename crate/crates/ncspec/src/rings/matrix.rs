use serde::{Deserialize, Serialize};

use num_traits::Zero;

use crate::scalar::{q, Field, Q};

/// A square matrix with exact entries, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    pub n: usize,
    pub entries: Vec<Q>,
}

impl Matrix {
    pub fn zero(n: usize) -> Self {
        Matrix { n, entries: vec![Q::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = q(1);
        }
        m
    }

    /// The matrix unit with a single one at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zero(n);
        m.entries[i * n + j] = q(1);
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let n = rows.len();
        Matrix { n, entries: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.entries[i * self.n + j]
    }

    pub fn add(&self, other: &Matrix, f: &Field) -> Matrix {
        Matrix { n: self.n, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f.add(a, b)).collect() }
    }

    pub fn neg(&self, f: &Field) -> Matrix {
        Matrix { n: self.n, entries: self.entries.iter().map(|a| f.neg(a)).collect() }
    }

    pub fn mul(&self, other: &Matrix, f: &Field) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Q::zero();
                for k in 0..n {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.entries[i * n + j] = f.normalize(acc);
            }
        }
        out
    }

    pub fn well_formed(&self, n: usize, f: &Field) -> bool {
        self.n == n && self.entries.len() == n * n && self.entries.iter().all(|x| &f.normalize(x.clone()) == x)
    }

    /// Inverse by Gauss-Jordan elimination, `None` when singular.
    pub fn inverse(&self, f: &Field) -> Option<Matrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.entries.swap(pivot * n + j, col * n + j);
                    inv.entries.swap(pivot * n + j, col * n + j);
                }
            }
            let p = f.inv(a.get(col, col)).expect("nonzero pivot");
            for j in 0..n {
                a.entries[col * n + j] = f.mul(&a.entries[col * n + j], &p);
                inv.entries[col * n + j] = f.mul(&inv.entries[col * n + j], &p);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let s = f.mul(&factor, &a.entries[col * n + j]);
                    a.entries[r * n + j] = f.sub(&a.entries[r * n + j], &s);
                    let t = f.mul(&factor, &inv.entries[col * n + j]);
                    inv.entries[r * n + j] = f.sub(&inv.entries[r * n + j], &t);
                }
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self, f: &Field) -> bool {
        self.inverse(f).is_some()
    }

    /// Every matrix over a prime field, entries in lexicographic order.
    pub fn enumerate(n: usize, f: &Field) -> Option<Vec<Matrix>> {
        let elems = f.elements()?;
        let mut out = vec![Vec::new()];
        for _ in 0..n * n {
            let mut next = Vec::with_capacity(out.len() * elems.len());
            for prefix in &out {
                for e in &elems {
                    let mut p = prefix.clone();
                    p.push(e.clone());
                    next.push(p);
                }
            }
            out = next;
        }
        Some(out.into_iter().map(|entries| Matrix { n, entries }).collect())
    }
}
