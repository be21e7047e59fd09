//! Dense square matrices over Q(q^(1/2)) and exact rank over Q.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::scalarfield::QScalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    dim: usize,
    data: Vec<QScalar>,
}

impl Matrix {
    pub fn zero(dim: usize) -> Self {
        Matrix { dim, data: vec![QScalar::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| QScalar::one()).collect())
    }

    pub fn diagonal(d: Vec<QScalar>) -> Self {
        let mut m = Matrix::zero(d.len());
        for (k, v) in d.into_iter().enumerate() {
            m.set(k, k, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &QScalar {
        &self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: QScalar) {
        self.data[r * self.dim + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(QScalar::is_zero)
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        let d = self.dim;
        let mut m = Matrix::zero(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let b = o.get(k, c);
                    if !b.is_zero() {
                        let v = m.get(r, c) + &(a * b);
                        m.set(r, c, v);
                    }
                }
            }
        }
        m
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &QScalar) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, e: u32) -> Matrix {
        let mut m = Matrix::identity(self.dim);
        for _ in 0..e {
            m = m.mul(self);
        }
        m
    }

    /// Inverse of a diagonal matrix with nonzero diagonal.
    pub fn diagonal_inverse(&self) -> Matrix {
        Self::diagonal((0..self.dim).map(|k| self.get(k, k).inv()).collect())
    }

    pub fn commutator(&self, o: &Matrix) -> Matrix {
        self.mul(o).sub(&o.mul(self))
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[QScalar]) -> Vec<QScalar> {
        (0..self.dim)
            .map(|r| {
                let mut s = QScalar::zero();
                for (c, x) in v.iter().enumerate() {
                    let a = self.get(r, c);
                    if !a.is_zero() && !x.is_zero() {
                        s = &s + &(a * x);
                    }
                }
                s
            })
            .collect()
    }

    /// The unique nonzero entry of column c, if the column has exactly one.
    pub fn column_single(&self, c: usize) -> Option<(usize, QScalar)> {
        let mut hit = None;
        for r in 0..self.dim {
            let v = self.get(r, c);
            if !v.is_zero() {
                if hit.is_some() {
                    return None;
                }
                hit = Some((r, v.clone()));
            }
        }
        hit
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| self.get(r, c).render()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Rank of a rational matrix by exact Gaussian elimination.
pub fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        let prow = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot;
            for (x, y) in row.iter_mut().zip(&prow).skip(c) {
                *x -= &f * y;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// The prime used for modular rank computations, 2^61 - 1.
pub const RANK_PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % RANK_PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

/// Image of a rational number in Z/p, or `None` if p divides the denominator.
pub fn reduce_mod_p(r: &BigRational) -> Option<u64> {
    let p = BigInt::from(RANK_PRIME);
    let red = |x: &BigInt| ((x % &p + &p) % &p).to_u64().expect("residue fits in u64");
    let d = red(r.denom());
    (d != 0).then(|| mul_mod(red(r.numer()), pow_mod(d, RANK_PRIME - 2)))
}

/// Rank over Z/p. It never exceeds the rank over Q of any integral lift, so
/// full rank mod p proves full rank over Q.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = pow_mod(rows[r][c], RANK_PRIME - 2);
        let prow = rows[r].clone();
        for row in rows.iter_mut().skip(r + 1) {
            if row[c] == 0 {
                continue;
            }
            let f = mul_mod(row[c], inv);
            for (x, y) in row.iter_mut().zip(&prow).skip(c) {
                *x = (*x + RANK_PRIME - mul_mod(f, *y)) % RANK_PRIME;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        let q = |n: i64| BigRational::from_integer(n.into());
        assert_eq!(rank(vec![vec![q(1), q(2)], vec![q(2), q(4)]]), 1);
        assert_eq!(rank(vec![vec![q(1), q(2)], vec![q(0), q(4)], vec![q(1), q(6)]]), 2);
        assert_eq!(rank(vec![]), 0);
    }

    #[test]
    fn modular_rank_agrees_on_small_matrices() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let rows = vec![vec![q(1, 2), q(1, 3)], vec![q(3, 2), q(1, 1)], vec![q(0, 1), q(5, 7)]];
        let exact = rank(rows.clone());
        let modular = rank_mod_p(rows.iter().map(|r| r.iter().map(|x| reduce_mod_p(x).unwrap()).collect()).collect());
        assert_eq!((exact, modular), (2, 2));
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(reduce_mod_p(&q(-1, 1)), Some(RANK_PRIME - 1));
    }

    #[test]
    fn matrix_algebra() {
        let mut a = Matrix::zero(2);
        a.set(0, 1, QScalar::one());
        assert!(a.mul(&a).is_zero());
        let d = Matrix::diagonal(vec![QScalar::x_pow(2), QScalar::x_pow(-2)]);
        assert_eq!(d.mul(&d.diagonal_inverse()), Matrix::identity(2));
        assert_eq!(a.apply(&[QScalar::zero(), QScalar::from_int(3)]), vec![QScalar::from_int(3), QScalar::zero()]);
    }
}
