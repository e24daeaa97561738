//! Small dense square matrices and their characteristic polynomials.

use std::ops::Mul;

use super::poly::{Poly, Scalar};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Companion matrix of a monic polynomial; its characteristic
    /// polynomial is the polynomial itself.
    pub fn companion(poly: &Poly<T>) -> Self {
        let d = poly.degree().unwrap_or(0);
        let mut m = Matrix::zeros(d);
        for i in 1..d {
            m[(i, i - 1)] = T::one();
        }
        for i in 0..d {
            m[(i, d - 1)] = -poly.coeff(i);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn scale(&self, c: &T) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// Characteristic polynomial `det(x*I - self)` by Berkowitz's
    /// algorithm. Division free, so it is exact over any commutative ring.
    pub fn charpoly(&self) -> Poly<T> {
        // Coefficients are kept in descending order while building.
        let mut desc: Vec<T> = vec![T::one()];
        for r in 0..self.n {
            // Leading principal submatrix of size r+1 splits as
            // [[A, c], [row, a]] with A of size r.
            let a = self[(r, r)].clone();
            let col: Vec<T> = (0..r).map(|i| self[(i, r)].clone()).collect();
            let row: Vec<T> = (0..r).map(|j| self[(r, j)].clone()).collect();

            let mut toeplitz = Vec::with_capacity(r + 2);
            toeplitz.push(T::one());
            toeplitz.push(-a);
            let mut v = col;
            for step in 0..r {
                let dot = row
                    .iter()
                    .zip(&v)
                    .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
                toeplitz.push(-dot);
                if step + 1 < r {
                    v = (0..r)
                        .map(|i| {
                            (0..r).fold(T::zero(), |acc, j| {
                                acc + self[(i, j)].clone() * v[j].clone()
                            })
                        })
                        .collect();
                }
            }

            let next: Vec<T> = (0..r + 2)
                .map(|i| {
                    (0..desc.len())
                        .filter(|&j| j <= i)
                        .fold(T::zero(), |acc, j| {
                            acc + toeplitz[i - j].clone() * desc[j].clone()
                        })
                })
                .collect();
            desc = next;
        }
        desc.reverse();
        Poly::new(desc)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Scalar> Mul for &Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out: Matrix<T> = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * rhs[(k, j)].clone();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix<BigInt> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    fn ip(c: &[i64]) -> Poly<BigInt> {
        Poly::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    #[test]
    fn charpoly_small() {
        assert_eq!(Matrix::<BigInt>::zeros(0).charpoly(), Poly::one());
        assert_eq!(m(&[&[5]]).charpoly(), ip(&[-5, 1]));
        // x^2 - (a+d) x + (ad - bc)
        assert_eq!(m(&[&[1, 2], &[3, 4]]).charpoly(), ip(&[-2, -5, 1]));
        assert_eq!(
            m(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]).charpoly(),
            ip(&[-30, 31, -10, 1])
        );
    }

    #[test]
    fn companion_roundtrip() {
        let p = ip(&[7, -3, 0, 2, 1]);
        assert_eq!(Matrix::companion(&p).charpoly(), p);
    }

    /// Cofactor-expansion determinant of `x*I - A`, evaluated at integer
    /// points; an independent check on Berkowitz.
    fn det(a: &[Vec<i128>]) -> i128 {
        let n = a.len();
        if n == 0 {
            return 1;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a[0][j] * det(&minor)
            })
            .sum()
    }

    proptest! {
        #[test]
        fn charpoly_matches_cofactor_determinant(
            n in 1usize..5,
            entries in proptest::collection::vec(-6i64..7, 16),
            x in -4i64..5,
        ) {
            let rows: Vec<Vec<i64>> = (0..n).map(|i| entries[i * n..i * n + n].to_vec()).collect();
            let mat = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect());
            let cp = mat.charpoly();
            prop_assert_eq!(cp.degree(), Some(n));
            let shifted: Vec<Vec<i128>> = (0..n)
                .map(|i| (0..n).map(|j| (if i == j { x } else { 0 } - rows[i][j]) as i128).collect())
                .collect();
            prop_assert_eq!(cp.eval(&BigInt::from(x)), BigInt::from(det(&shifted)));
        }
    }
}
