use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::poly::PhasePoly;
use super::series::HbarSeries;
use super::star::{star_poly, Convention};
use super::PolyError;

pub type RatMatrix = Vec<Vec<BigRational>>;

fn r(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// Standard symplectic form on `(q_1..q_n, p_1..p_n)`.
pub fn standard_j(n: usize) -> RatMatrix {
    let mut j = vec![vec![r(0); 2 * n]; 2 * n];
    for i in 0..n {
        j[i][n + i] = r(1);
        j[n + i][i] = r(-1);
    }
    j
}

fn matmul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (m, k, n) = (a.len(), b.len(), b[0].len());
    let mut c = vec![vec![r(0); n]; m];
    for i in 0..m {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                c[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    c
}

fn transpose(a: &RatMatrix) -> RatMatrix {
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn is_symplectic(s: &RatMatrix) -> bool {
    let d = s.len();
    if !d.is_multiple_of(2) || s.iter().any(|row| row.len() != d) {
        return false;
    }
    let j = standard_j(d / 2);
    matmul(&matmul(&transpose(s), &j), s) == j
}

/// `S^{-1} = J^{-1} S^T J` for symplectic `S`.
pub fn symplectic_inverse(s: &RatMatrix) -> RatMatrix {
    let j = standard_j(s.len() / 2);
    let jinv: RatMatrix = j.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
    matmul(&matmul(&jinv, &transpose(s)), &j)
}

/// `f o S^{-1}`.
pub fn pull_back(f: &PhasePoly, s: &RatMatrix) -> PhasePoly {
    f.linear_substitute(&symplectic_inverse(s))
}

fn series_pull_back(f: &HbarSeries, s: &RatMatrix) -> HbarSeries {
    HbarSeries::from_coeffs(f.coeffs().iter().map(|c| pull_back(c, s)).collect()).expect("non-empty")
}

/// Exact difference `(f*g) o S^{-1} - (f o S^{-1}) * (g o S^{-1})`.
pub fn symplectic_equivariance_defect(f: &PhasePoly, g: &PhasePoly, s: &RatMatrix) -> Result<HbarSeries, PolyError> {
    if f.dim() != g.dim() {
        return Err(PolyError::DimensionMismatch(f.dim(), g.dim()));
    }
    if s.len() != 2 * f.dim() || !is_symplectic(s) {
        return Err(PolyError::NotSymplectic);
    }
    let order = f.degree().unwrap_or(0).min(g.degree().unwrap_or(0)) as usize;
    let lhs = series_pull_back(&star_poly(f, g, order, Convention::Moyal)?, s);
    let rhs = star_poly(&pull_back(f, s), &pull_back(g, s), order, Convention::Moyal)?;
    lhs.try_sub(&rhs)
}

/// Largest coefficient modulus of the defect (0 for exact equivariance).
pub fn symplectic_equivariance_residual(f: &PhasePoly, g: &PhasePoly, s: &RatMatrix) -> Result<f64, PolyError> {
    let d = symplectic_equivariance_defect(f, g, s)?;
    let mut worst = 0.0f64;
    for c in d.coeffs() {
        for v in c.terms().values() {
            let m = v.re.abs().to_f64().unwrap_or(f64::INFINITY).max(v.im.abs().to_f64().unwrap_or(f64::INFINITY));
            worst = worst.max(m);
        }
    }
    Ok(worst)
}
