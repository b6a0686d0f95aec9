use std::fmt;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::coeff::Coeff;
use super::PlError;

/// Square matrix on `(C^2)^{⊗k}`, row-major, basis index `i_1 i_2 ... i_k` in binary.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorMatrix<C> {
    n: usize,
    e: Vec<C>,
}

/// Offending entry of a residual matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub value: String,
}

impl<C: Coeff> TensorMatrix<C> {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C) -> Self {
        TensorMatrix { n, e: (0..n * n).map(|k| f(k / n, k % n)).collect() }
    }

    pub fn zero(n: usize) -> Self {
        TensorMatrix::from_fn(n, |_, _| C::zero())
    }

    pub fn identity(n: usize) -> Self {
        TensorMatrix::from_fn(n, |i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn from_rational(m: &TensorMatrix<BigRational>) -> Self {
        TensorMatrix::from_fn(m.n, |i, j| C::from_rational(m.get(i, j)))
    }

    /// Flip `σ` on `C^2 ⊗ C^2`.
    pub fn flip() -> Self {
        TensorMatrix::from_fn(4, |i, j| if j == swap_legs(i) { C::one() } else { C::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.e[i * self.n + j]
    }

    pub fn entries(&self) -> &[C] {
        &self.e
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TensorMatrix<D> {
        TensorMatrix { n: self.n, e: self.e.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        TensorMatrix { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        TensorMatrix { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        TensorMatrix { n: self.n, e: self.e.iter().map(|a| a.mul(c)).collect() }
    }

    /// Product with rows computed in parallel.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let e = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let mut s = C::zero();
                for m in 0..n {
                    let a = self.get(i, m);
                    if a.is_zero() {
                        continue;
                    }
                    let b = o.get(m, j);
                    if !b.is_zero() {
                        s = s.add(&a.mul(b));
                    }
                }
                s
            })
            .collect();
        TensorMatrix { n, e }
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn kron(&self, o: &Self) -> Self {
        let m = o.n;
        TensorMatrix::from_fn(self.n * m, |i, j| self.get(i / m, j / m).mul(o.get(i % m, j % m)))
    }

    /// `σ X σ` on a two-leg matrix.
    pub fn flipped(&self) -> Self {
        assert_eq!(self.n, 4);
        TensorMatrix::from_fn(4, |i, j| self.get(swap_legs(i), swap_legs(j)).clone())
    }

    /// Embed a two-leg matrix into legs `(a, b)` of the triple tensor, `a < b`.
    pub fn leg(&self, a: usize, b: usize) -> Self {
        assert_eq!(self.n, 4);
        assert!(a < b && b < 3);
        let bit = |x: usize, l: usize| (x >> (2 - l)) & 1;
        let other = 3 - a - b;
        TensorMatrix::from_fn(8, |i, j| {
            if bit(i, other) != bit(j, other) {
                return C::zero();
            }
            self.get(2 * bit(i, a) + bit(i, b), 2 * bit(j, a) + bit(j, b)).clone()
        })
    }

    /// `(X ⊗ 1 ⊗ 1) + (1 ⊗ X ⊗ 1) + (1 ⊗ 1 ⊗ X)` for a 2x2 `X`.
    pub fn diagonal_action3(x: &Self) -> Self {
        assert_eq!(x.n, 2);
        let i = TensorMatrix::identity(2);
        x.kron(&i).kron(&i).add(&i.kron(x).kron(&i)).add(&i.kron(&i).kron(x))
    }

    /// Gauss-Jordan inverse, pivoting on the first unit in each column.
    pub fn inverse(&self) -> Result<Self, PlError> {
        let n = self.n;
        let mut a = self.e.clone();
        let mut b = TensorMatrix::<C>::identity(n).e;
        for col in 0..n {
            let (piv, inv) =
                (col..n).find_map(|r| a[r * n + col].try_inv().map(|v| (r, v))).ok_or_else(|| PlError::Singular(format!("no unit pivot in column {}", col)))?;
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
                b.swap(col * n + k, piv * n + k);
            }
            for k in 0..n {
                a[col * n + k] = a[col * n + k].mul(&inv);
                b[col * n + k] = b[col * n + k].mul(&inv);
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for k in 0..n {
                    a[r * n + k] = a[r * n + k].sub(&f.mul(&a[col * n + k]));
                    b[r * n + k] = b[r * n + k].sub(&f.mul(&b[col * n + k]));
                }
            }
        }
        Ok(TensorMatrix { n, e: b })
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    /// Largest entry magnitude (coefficient height for exact entries).
    pub fn max_magnitude(&self) -> f64 {
        self.e.par_iter().map(|x| x.magnitude()).reduce(|| 0.0, f64::max)
    }

    /// First nonzero entry in row-major order.
    pub fn witness(&self) -> Option<Witness> {
        self.e.iter().position(|x| !x.is_zero()).map(|k| Witness { row: k / self.n, col: k % self.n, value: self.e[k].to_string() })
    }

    /// Nested arrays of canonical coefficient strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect()).collect()
    }
}

impl<C: Coeff> fmt::Display for TensorMatrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_strings() {
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn swap_legs(i: usize) -> usize {
    ((i & 1) << 1) | (i >> 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson_lie::coeff::rat;

    fn m(n: usize, v: &[i64]) -> TensorMatrix<BigRational> {
        TensorMatrix::from_fn(n, |i, j| rat(v[i * n + j], 1))
    }

    #[test]
    fn flip_is_an_involution() {
        let s = TensorMatrix::<BigRational>::flip();
        assert_eq!(s.mul(&s), TensorMatrix::identity(4));
        let x = m(4, &(0..16).collect::<Vec<_>>());
        assert_eq!(x.flipped().flipped(), x);
        assert_eq!(x.flipped(), s.mul(&x).mul(&s));
    }

    #[test]
    fn legs_match_kronecker_products() {
        let a = m(2, &[1, 2, 3, 4]);
        let b = m(2, &[0, 5, -1, 2]);
        let i = TensorMatrix::identity(2);
        let r = a.kron(&b);
        assert_eq!(r.leg(0, 1), a.kron(&b).kron(&i));
        assert_eq!(r.leg(1, 2), i.kron(&a).kron(&b));
        assert_eq!(r.leg(0, 2), a.kron(&i).kron(&b));
    }

    #[test]
    fn inverse_round_trip() {
        let x = m(4, &[0, 1, 0, 0, 2, 0, 0, 1, 0, 0, 3, 0, 1, 0, 0, 1]);
        let y = x.inverse().unwrap();
        assert_eq!(x.mul(&y), TensorMatrix::identity(4));
        assert!(m(2, &[1, 2, 2, 4]).inverse().is_err());
    }
}
