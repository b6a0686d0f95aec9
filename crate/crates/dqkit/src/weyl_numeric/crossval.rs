use super::basis::HermiteBasis;
use super::grid::GridSpec;
use super::weyl::{weyl_inverse, weyl_product_poly};
use super::WeylError;
use crate::phase_poly::{star_poly, Convention, PhasePoly};

/// Default trusted interior `|q|, |p| <= 2.5 sqrt(hbar)` for `M = 64`, scaled with `sqrt(M / 64)`.
pub fn trusted_half_width(basis: &HermiteBasis) -> f64 {
    2.5 * (basis.hbar() * basis.size() as f64 / 64.0).sqrt()
}

/// Max deviation of `W^{-1}(W_f W_g)` from the exact star product on the grid,
/// relative to the largest modulus of the exact values there.
pub fn cross_validate_star(basis: &HermiteBasis, f: &PhasePoly, g: &PhasePoly, spec: &GridSpec) -> Result<f64, WeylError> {
    for (name, d) in [("f", f.degree()), ("g", g.degree())] {
        if d.unwrap_or(0) > 4 {
            return Err(WeylError::BadParameter(format!("{} has degree above 4", name)));
        }
    }
    let order = f.degree().unwrap_or(0).min(g.degree().unwrap_or(0)) as usize;
    let exact = star_poly(f, g, order, Convention::Moyal).map_err(|e| WeylError::BadParameter(e.to_string()))?;
    let num = weyl_inverse(basis, &weyl_product_poly(basis, f, g)?, spec)?;
    let h = basis.hbar();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for iq in 0..spec.nq {
        for ip in 0..spec.np {
            let e = exact.eval(&[spec.q(iq)], &[spec.p(ip)], h);
            worst = worst.max((num.at(iq, ip) - e).norm());
            scale = scale.max(e.norm());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}
