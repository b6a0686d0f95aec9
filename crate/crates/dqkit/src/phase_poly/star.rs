use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::crat::CRat;
use super::poly::PhasePoly;
use super::series::HbarSeries;
use super::PolyError;

/// Sign convention of the deformation parameter.
///
/// `Moyal` is `f*g = f exp(-i hbar P/2) g` with the formal symbol `hbar`.
/// `Deformation` is `f*g = fg + (h/2){f,g} + ...`, i.e. the same series with
/// `hbar` replaced by a formal `h = -i hbar`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Convention {
    #[default]
    Moyal,
    Deformation,
}

impl Convention {
    /// Per-order factor `lambda` in `sum_k lambda^k / k! P^k`.
    pub fn lambda(self) -> CRat {
        match self {
            Convention::Moyal => CRat::new(BigRational::from_integer(0.into()), BigRational::new((-1).into(), 2.into())),
            Convention::Deformation => CRat::frac(1, 2),
        }
    }
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

fn falling(e: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |a, j| a * BigInt::from(e - j))
}

/// Visit every term of `sum_{a,b} (-1)^{|b|} / (a! b!) d_q^a d_p^b f * d_p^a d_q^b g`
/// grouped by order `k = |a| + |b| <= max_k`.
fn bidiff_expand(f: &PhasePoly, g: &PhasePoly, max_k: u32, mut sink: impl FnMut(u32, Vec<u32>, CRat)) {
    let n = f.dim();
    for (ef, cf) in f.terms() {
        for (eg, cg) in g.terms() {
            let base = cf * cg;
            // per-index bounds: a_i <= min(f q_i, g p_i), b_i <= min(f p_i, g q_i)
            let amax: Vec<u32> = (0..n).map(|i| ef[i].min(eg[n + i])).collect();
            let bmax: Vec<u32> = (0..n).map(|i| ef[n + i].min(eg[i])).collect();
            let mut a = vec![0u32; n];
            let mut b = vec![0u32; n];
            loop {
                let k: u32 = a.iter().sum::<u32>() + b.iter().sum::<u32>();
                if k <= max_k {
                    let mut num = BigInt::one();
                    let mut den = BigInt::one();
                    let mut e = vec![0u32; 2 * n];
                    for i in 0..n {
                        num *= falling(ef[i], a[i]) * falling(ef[n + i], b[i]) * falling(eg[n + i], a[i]) * falling(eg[i], b[i]);
                        den *= factorial(a[i]) * factorial(b[i]);
                        e[i] = ef[i] - a[i] + eg[i] - b[i];
                        e[n + i] = ef[n + i] - b[i] + eg[n + i] - a[i];
                    }
                    if b.iter().sum::<u32>() % 2 == 1 {
                        num = -num;
                    }
                    sink(k, e, base.scale(&BigRational::new(num, den)));
                }
                // odometer over (a, b) within bounds
                let mut carried = true;
                for slot in 0..2 * n {
                    let (v, m) = if slot < n { (&mut a[slot], amax[slot]) } else { (&mut b[slot - n], bmax[slot - n]) };
                    if *v < m {
                        *v += 1;
                        carried = false;
                        break;
                    }
                    *v = 0;
                }
                if carried {
                    break;
                }
            }
        }
    }
}

/// Canonical Poisson bracket `sum_i (f_q g_p - f_p g_q)`.
pub fn poisson_bracket(f: &PhasePoly, g: &PhasePoly) -> Result<PhasePoly, PolyError> {
    bidiff_power(f, g, 1)
}

/// `k`-th power of the Poisson bidifferential operator applied to `f (x) g`, then multiplied.
pub fn bidiff_power(f: &PhasePoly, g: &PhasePoly, k: u32) -> Result<PhasePoly, PolyError> {
    if f.dim() != g.dim() {
        return Err(PolyError::DimensionMismatch(f.dim(), g.dim()));
    }
    let kf = CRat::real(BigRational::from_integer(factorial(k)));
    let mut out = PhasePoly::zero(f.dim());
    bidiff_expand(f, g, k, |kk, e, c| {
        if kk == k {
            out.add_term(e, &c * &kf);
        }
    });
    Ok(out)
}

/// Star product of two hbar-free polynomials as a series truncated at `order`.
pub fn star_poly(f: &PhasePoly, g: &PhasePoly, order: usize, conv: Convention) -> Result<HbarSeries, PolyError> {
    if f.dim() != g.dim() {
        return Err(PolyError::DimensionMismatch(f.dim(), g.dim()));
    }
    let lam = conv.lambda();
    let pows: Vec<CRat> = (0..=order as u32).map(|k| lam.pow(k)).collect();
    let mut out = HbarSeries::zero(f.dim(), order);
    bidiff_expand(f, g, order as u32, |k, e, c| {
        out.coeff_mut(k as usize).add_term(e, &c * &pows[k as usize]);
    });
    Ok(out)
}

/// Moyal star product of truncated series (default convention).
pub fn moyal_star(f: &HbarSeries, g: &HbarSeries) -> Result<HbarSeries, PolyError> {
    star_with(f, g, Convention::Moyal)
}

pub fn star_with(f: &HbarSeries, g: &HbarSeries, conv: Convention) -> Result<HbarSeries, PolyError> {
    f.check(g)?;
    let order = f.order();
    let mut out = HbarSeries::zero(f.dim(), order);
    for (i, fi) in f.coeffs().iter().enumerate() {
        if fi.is_zero() {
            continue;
        }
        for (j, gj) in g.coeffs().iter().enumerate() {
            if i + j > order || gj.is_zero() {
                continue;
            }
            let part = star_poly(fi, gj, order - i - j, conv)?;
            for (k, c) in part.coeffs().iter().enumerate() {
                let slot = out.coeff_mut(i + j + k);
                *slot = slot.add(c);
            }
        }
    }
    Ok(out)
}

/// `f*g - g*f`, same truncation order as the inputs.
pub fn star_commutator(f: &HbarSeries, g: &HbarSeries) -> Result<HbarSeries, PolyError> {
    moyal_star(f, g)?.try_sub(&moyal_star(g, f)?)
}

/// `(f*g - g*f) / (-i hbar)`, truncated at order `N - 1`.
pub fn moyal_bracket(f: &HbarSeries, g: &HbarSeries) -> Result<HbarSeries, PolyError> {
    if f.order() == 0 {
        return Err(PolyError::OrderTooLow { needed: 1, got: 0 });
    }
    let c = star_commutator(f, g)?;
    if !c.coeff(0).is_zero() {
        return Err(PolyError::NonDivisible);
    }
    // 1/(-i) = i
    let coeffs = c.coeffs()[1..].iter().map(|p| p.scale(&CRat::i())).collect();
    HbarSeries::from_coeffs(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> PhasePoly {
        PhasePoly::q(1, 1)
    }
    fn p() -> PhasePoly {
        PhasePoly::p(1, 1)
    }

    #[test]
    fn bracket_of_coordinates() {
        assert_eq!(poisson_bracket(&q(), &p()).unwrap(), PhasePoly::one(1));
        let f = q().pow(2).mul(&p());
        assert!(poisson_bracket(&f, &f).unwrap().is_zero());
        assert_eq!(poisson_bracket(&q().pow(2), &p().pow(2)).unwrap(), PhasePoly::qp(1, 1, CRat::from_ints(4, 0)));
    }

    #[test]
    fn bidiff_examples() {
        assert_eq!(bidiff_power(&q().pow(2), &p().pow(2), 2).unwrap(), PhasePoly::constant(1, CRat::from_ints(4, 0)));
        assert!(bidiff_power(&q(), &p(), 2).unwrap().is_zero());
        let f = q().add(&p().pow(3));
        let g = q().mul(&p());
        assert_eq!(bidiff_power(&f, &g, 0).unwrap(), f.mul(&g));
    }

    #[test]
    fn star_q_p() {
        let s = star_poly(&q(), &p(), 2, Convention::Moyal).unwrap();
        assert_eq!(s.pretty(), "q*p - (i/2)*hbar");
    }

    #[test]
    fn star_q2_p2() {
        let s = star_poly(&q().pow(2), &p().pow(2), 2, Convention::Moyal).unwrap();
        assert_eq!(s.coeff(0), &PhasePoly::qp(2, 2, CRat::one()));
        assert_eq!(s.coeff(1), &PhasePoly::qp(1, 1, CRat::from_ints(0, -2)));
        assert_eq!(s.coeff(2), &PhasePoly::constant(1, CRat::frac(-1, 2)));
    }

    #[test]
    fn deformation_convention_first_order() {
        let s = star_poly(&q(), &p(), 1, Convention::Deformation).unwrap();
        assert_eq!(s.coeff(1), &PhasePoly::constant(1, CRat::frac(1, 2)));
    }

    #[test]
    fn moyal_bracket_needs_order() {
        let z = HbarSeries::from_poly(&q(), 0);
        assert!(moyal_bracket(&z, &z).is_err());
        let b = moyal_bracket(&HbarSeries::from_poly(&q(), 2), &HbarSeries::from_poly(&p(), 2)).unwrap();
        assert_eq!(b.order(), 1);
        assert_eq!(b.coeff(0), &PhasePoly::one(1));
    }
}
