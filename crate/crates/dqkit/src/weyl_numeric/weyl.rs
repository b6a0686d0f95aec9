use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{HermiteBasis, OperatorMatrix};
use super::gr::{grossmann_royer_fast, trace_with};
use super::grid::{GridSpec, PhaseGrid};
use super::hermite::hermite_functions;
use super::WeylError;
use crate::phase_poly::{weyl_symmetrize, Convention, PhasePoly};

/// Grossmann-Royer operator `[Omega psi](x) = 2 exp(-(2i/hbar) p (x - q)) psi(2q - x)`
/// assembled by Gauss-Hermite quadrature.
pub fn grossmann_royer(basis: &HermiteBasis, p: f64, q: f64) -> Result<OperatorMatrix, WeylError> {
    basis.check_resolved(p, q)?;
    Ok(grossmann_royer_unchecked(basis, p, q))
}

pub fn grossmann_royer_unchecked(basis: &HermiteBasis, p: f64, q: f64) -> OperatorMatrix {
    let m = basis.size();
    let h = basis.hbar();
    let mut e = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for (i, &x) in basis.nodes().iter().enumerate() {
        let w = basis.weights()[i];
        let phase = Complex64::from_polar(2.0 * w, -2.0 * p * (x - q) / h);
        let refl = hermite_functions(m, h, 2.0 * q - x);
        for a in 0..m {
            let ha = basis.value(i, a) * phase;
            if ha == Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..m {
                e[(a, b)] += ha * refl[b];
            }
        }
    }
    OperatorMatrix::new(h, e)
}

/// Same operator through the displacement recurrence (exact up to round-off).
pub fn grossmann_royer_recurrence(basis: &HermiteBasis, p: f64, q: f64) -> OperatorMatrix {
    OperatorMatrix::new(basis.hbar(), grossmann_royer_fast(basis.size(), basis.hbar(), p, q))
}

/// Weyl map of a sampled symbol, `(1/2 pi hbar) sum f(p,q) Omega(p,q) dp dq`.
pub fn weyl_map(basis: &HermiteBasis, f: &PhaseGrid) -> Result<OperatorMatrix, WeylError> {
    f.spec.validate()?;
    let tol = 1e-12 * f.max_abs().max(1.0);
    let edge = f.boundary_max();
    if edge > tol {
        return Err(WeylError::BoundaryDecay { edge, tol });
    }
    let m = basis.size();
    let h = basis.hbar();
    let s = f.spec;
    // one partial sum per q row, then an ordered reduction
    let rows: Vec<DMatrix<Complex64>> = (0..s.nq)
        .into_par_iter()
        .map(|iq| {
            let mut acc = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
            for ip in 0..s.np {
                let v = f.at(iq, ip);
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                acc += grossmann_royer_fast(m, h, s.p(ip), s.q(iq)) * v;
            }
            acc
        })
        .collect();
    let mut total = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for r in rows {
        total += r;
    }
    let scale = s.dq() * s.dp() / (2.0 * std::f64::consts::PI * h);
    Ok(OperatorMatrix::new(h, total * Complex64::new(scale, 0.0)))
}

/// Symbol `Tr[Omega(p,q) A]` on a grid, after the basis taper `F A F`.
pub fn weyl_inverse(basis: &HermiteBasis, a: &OperatorMatrix, spec: &GridSpec) -> Result<PhaseGrid, WeylError> {
    weyl_inverse_raw(basis, &a.tapered(basis.taper()), spec)
}

/// `Tr[Omega(p,q) A]` with no taper.
pub fn weyl_inverse_raw(basis: &HermiteBasis, a: &OperatorMatrix, spec: &GridSpec) -> Result<PhaseGrid, WeylError> {
    spec.validate()?;
    if a.size() != basis.size() {
        return Err(WeylError::SizeMismatch(a.size(), basis.size()));
    }
    let m = basis.size();
    let h = basis.hbar();
    let values: Vec<Complex64> = (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let (iq, ip) = (k / spec.np, k % spec.np);
            let om = grossmann_royer_fast(m, h, spec.p(ip), spec.q(iq));
            trace_with(&om, &a.entries)
        })
        .collect();
    Ok(PhaseGrid { spec: *spec, values })
}

/// Symbol at a single point (tapered).
pub fn symbol_at(basis: &HermiteBasis, a: &OperatorMatrix, p: f64, q: f64) -> Complex64 {
    let t = a.tapered(basis.taper());
    trace_with(&grossmann_royer_fast(basis.size(), basis.hbar(), p, q), &t.entries)
}

/// Exact Weyl image of a polynomial symbol with numeric `hbar`: the symmetrized
/// normal-ordered word evaluated with matrices built in an enlarged basis, then cut to `M`.
pub fn weyl_map_poly(basis: &HermiteBasis, f: &PhasePoly) -> Result<OperatorMatrix, WeylError> {
    if f.dim() != 1 {
        return Err(WeylError::BadParameter("numeric Weyl map needs a one-dimensional phase space".into()));
    }
    let deg = f.degree().unwrap_or(0) as usize;
    let big = HermiteBasis::with_quadrature(basis.size() + deg + 1, basis.hbar(), 2 * (basis.size() + deg + 1) + 16)?;
    let w = weyl_symmetrize(f, Convention::Moyal);
    let (q, p) = (big.position().entries, big.momentum().entries);
    let n = big.size();
    let mut total = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let h = basis.hbar();
    for ((e, hk), c) in w.terms() {
        let mut term = DMatrix::<Complex64>::identity(n, n);
        for _ in 0..e[0] {
            term = &term * &q;
        }
        for _ in 0..e[1] {
            term = &term * &p;
        }
        total += term * (c.to_c64() * h.powi(*hk as i32));
    }
    let m = basis.size();
    Ok(OperatorMatrix::new(h, total.view((0, 0), (m, m)).into_owned()))
}

/// Product `W_f W_g` exact on the `M x M` block (intermediate sums in an enlarged basis).
pub fn weyl_product_poly(basis: &HermiteBasis, f: &PhasePoly, g: &PhasePoly) -> Result<OperatorMatrix, WeylError> {
    let extra = (f.degree().unwrap_or(0) + g.degree().unwrap_or(0)) as usize + 1;
    let big = HermiteBasis::with_quadrature(basis.size() + extra, basis.hbar(), 2 * (basis.size() + extra) + 16)?;
    let a = weyl_map_poly(&big, f)?;
    let b = weyl_map_poly(&big, g)?;
    let m = basis.size();
    let prod = &a.entries * &b.entries;
    Ok(OperatorMatrix::new(basis.hbar(), prod.view((0, 0), (m, m)).into_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_matches_recurrence() {
        let b = HermiteBasis::new(40, 1.0).unwrap();
        for (p, q) in [(0.0, 0.0), (0.7, -0.4), (-1.5, 1.1)] {
            let a = grossmann_royer(&b, p, q).unwrap();
            let r = grossmann_royer_recurrence(&b, p, q);
            let d = a.block_distance(&r, 24);
            assert!(d < 1e-9, "({}, {}) {}", p, q, d);
        }
    }

    #[test]
    fn origin_is_twice_parity() {
        let b = HermiteBasis::new(12, 1.0).unwrap();
        let o = grossmann_royer(&b, 0.0, 0.0).unwrap();
        for n in 0..12 {
            let s = if n % 2 == 0 { 2.0 } else { -2.0 };
            assert!((o.entries[(n, n)] - s).norm() < 1e-10);
        }
        assert!(o.hermitian_defect() < 1e-12);
    }

    #[test]
    fn unresolved_point_is_flagged() {
        let b = HermiteBasis::new(8, 1.0).unwrap();
        assert!(matches!(grossmann_royer(&b, 3.0, 2.0), Err(WeylError::Unresolved { .. })));
    }

    #[test]
    fn polynomial_map_of_coordinates() {
        let b = HermiteBasis::new(10, 0.5).unwrap();
        let q = weyl_map_poly(&b, &PhasePoly::q(1, 1)).unwrap();
        assert!(q.block_distance(&b.position(), 10) < 1e-15);
        let p = weyl_map_poly(&b, &PhasePoly::p(1, 1)).unwrap();
        assert!(p.block_distance(&b.momentum(), 10) < 1e-15);
    }
}
