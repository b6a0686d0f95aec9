use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::hermite::{gauss_hermite, hermite_functions};
use super::WeylError;

/// Centre of the spectral taper as a fraction of the basis size.
pub const TAPER_FRACTION: f64 = 0.625;
/// Roll-off width of the spectral taper as a fraction of the basis size.
pub const TAPER_WIDTH: f64 = 0.094;

/// First `m` Hermite functions at scale `hbar`, with a Gauss-Hermite rule of order `2m + 16`.
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    m: usize,
    hbar: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // values[i][n] = h_n(nodes[i])
    values: Vec<Vec<f64>>,
    taper: Vec<f64>,
}

impl HermiteBasis {
    pub fn new(m: usize, hbar: f64) -> Result<Self, WeylError> {
        HermiteBasis::with_quadrature(m, hbar, 2 * m + 16)
    }

    pub fn with_quadrature(m: usize, hbar: f64, order: usize) -> Result<Self, WeylError> {
        if m == 0 || !(hbar.is_finite() && hbar > 0.0) {
            return Err(WeylError::BadParameter(format!("basis size {} and hbar {} must be positive", m, hbar)));
        }
        if order < 2 * m + 16 {
            return Err(WeylError::BadParameter(format!("quadrature order {} below 2M+16", order)));
        }
        let (u, w) = gauss_hermite(order);
        let s = hbar.sqrt();
        let nodes: Vec<f64> = u.iter().map(|x| x * s).collect();
        let weights: Vec<f64> = w.iter().map(|x| x * s).collect();
        let values = nodes.iter().map(|&x| hermite_functions(m, hbar, x)).collect();
        let (nc, w) = (TAPER_FRACTION * m as f64, TAPER_WIDTH * m as f64);
        let taper = (0..m).map(|n| 0.5 * erfc((n as f64 - nc) / w)).collect();
        Ok(HermiteBasis { m, hbar, nodes, weights, values, taper })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `h_n` at quadrature node `i`.
    pub fn value(&self, i: usize, n: usize) -> f64 {
        self.values[i][n]
    }

    /// Smooth spectral taper `erfc((n - n_c) / w) / 2`, `n_c = 0.625 M`, `w = 0.094 M`.
    pub fn taper(&self) -> &[f64] {
        &self.taper
    }

    /// `q^2 + p^2` bound of the region resolved by the basis, `hbar (2M) / 2`.
    pub fn resolved_radius2(&self) -> f64 {
        self.hbar * self.m as f64
    }

    pub fn check_resolved(&self, p: f64, q: f64) -> Result<(), WeylError> {
        if q * q + p * p > self.resolved_radius2() {
            Err(WeylError::Unresolved { p, q, bound: self.resolved_radius2() })
        } else {
            Ok(())
        }
    }

    /// Max deviation of the quadrature Gram matrix from the identity.
    pub fn overlap_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.m {
            for b in a..self.m {
                let s: f64 = (0..self.nodes.len()).map(|i| self.weights[i] * self.values[i][a] * self.values[i][b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - want).abs());
            }
        }
        worst
    }

    /// Position operator `x`, exact tridiagonal form.
    pub fn position(&self) -> OperatorMatrix {
        let c = (self.hbar / 2.0).sqrt();
        let e = DMatrix::from_fn(self.m, self.m, |i, j| {
            if i + 1 == j {
                Complex64::new(c * (j as f64).sqrt(), 0.0)
            } else if j + 1 == i {
                Complex64::new(c * (i as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        OperatorMatrix::new(self.hbar, e)
    }

    /// Momentum operator `+i hbar d/dx` (this crate's sign, `[Q,P] = -i hbar`).
    pub fn momentum(&self) -> OperatorMatrix {
        let c = (self.hbar / 2.0).sqrt();
        let e = DMatrix::from_fn(self.m, self.m, |i, j| {
            if i + 1 == j {
                Complex64::new(0.0, c * (j as f64).sqrt())
            } else if j + 1 == i {
                Complex64::new(0.0, -c * (i as f64).sqrt())
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        OperatorMatrix::new(self.hbar, e)
    }

    pub fn identity(&self) -> OperatorMatrix {
        OperatorMatrix::new(self.hbar, DMatrix::identity(self.m, self.m))
    }

    /// `|a><b|`.
    pub fn unit(&self, a: usize, b: usize) -> OperatorMatrix {
        let mut e = DMatrix::from_element(self.m, self.m, Complex64::new(0.0, 0.0));
        e[(a, b)] = Complex64::new(1.0, 0.0);
        OperatorMatrix::new(self.hbar, e)
    }
}

/// Operator as a dense matrix in the Hermite basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub hbar: f64,
    pub entries: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    schema: String,
    basis: String,
    size: usize,
    hbar: f64,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl OperatorMatrix {
    pub fn new(hbar: f64, entries: DMatrix<Complex64>) -> Self {
        OperatorMatrix { hbar, entries }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn mul(&self, o: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::new(self.hbar, &self.entries * &o.entries)
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `||A - A^+|| / ||A||` (0 for the zero matrix).
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.frobenius();
        if n == 0.0 {
            return 0.0;
        }
        (&self.entries - self.entries.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / n
    }

    /// Max entry deviation on the leading `k x k` block.
    pub fn block_distance(&self, o: &OperatorMatrix, k: usize) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                worst = worst.max((self.entries[(i, j)] - o.entries[(i, j)]).norm());
            }
        }
        worst
    }

    /// `F A F` with the basis taper `F`.
    pub fn tapered(&self, taper: &[f64]) -> OperatorMatrix {
        let m = self.size();
        OperatorMatrix::new(self.hbar, DMatrix::from_fn(m, m, |i, j| self.entries[(i, j)] * taper[i] * taper[j]))
    }

    pub fn to_json(&self) -> String {
        let m = self.size();
        let j = OperatorJson {
            schema: "dqkit.operator.v1".into(),
            basis: "hermite".into(),
            size: m,
            hbar: self.hbar,
            re: (0..m).map(|i| (0..m).map(|k| self.entries[(i, k)].re).collect()).collect(),
            im: (0..m).map(|i| (0..m).map(|k| self.entries[(i, k)].im).collect()).collect(),
        };
        serde_json::to_string(&j).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, WeylError> {
        let j: OperatorJson = serde_json::from_str(s).map_err(|e| WeylError::Io(e.to_string()))?;
        let m = j.size;
        if j.re.len() != m || j.im.len() != m || j.re.iter().chain(&j.im).any(|r| r.len() != m) {
            return Err(WeylError::Io("operator json has inconsistent shape".into()));
        }
        Ok(OperatorMatrix::new(j.hbar, DMatrix::from_fn(m, m, |a, b| Complex64::new(j.re[a][b], j.im[a][b]))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_is_identity() {
        let b = HermiteBasis::new(64, 1.0).unwrap();
        assert!(b.overlap_defect() < 1e-10, "{}", b.overlap_defect());
        let b = HermiteBasis::new(24, 0.3).unwrap();
        assert!(b.overlap_defect() < 1e-10);
    }

    #[test]
    fn canonical_commutator_sign() {
        let b = HermiteBasis::new(10, 0.7).unwrap();
        let (q, p) = (b.position(), b.momentum());
        let c = &q.entries * &p.entries - &p.entries * &q.entries;
        for i in 0..9 {
            assert!((c[(i, i)] - Complex64::new(0.0, -0.7)).norm() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip() {
        let b = HermiteBasis::new(5, 1.0).unwrap();
        let p = b.momentum();
        assert_eq!(OperatorMatrix::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(HermiteBasis::new(0, 1.0).is_err());
        assert!(HermiteBasis::new(4, -1.0).is_err());
        assert!(HermiteBasis::with_quadrature(8, 1.0, 20).is_err());
    }
}
