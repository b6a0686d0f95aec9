use num_rational::BigRational;

use super::coeff::{rat, Coeff, HSeries, QuadExt, RatFunc};
use super::tensor::TensorMatrix;
use super::PlError;

/// A coefficient field that carries `q = e^h` together with `√q` and `u = sqrt(2 / (q + q^-1))`.
pub trait Deformation {
    type C: Coeff;
    fn mode(&self) -> &'static str;
    fn sqrt_q(&self) -> Self::C;
    fn u(&self) -> Self::C;

    fn q(&self) -> Self::C {
        let s = self.sqrt_q();
        s.mul(&s)
    }

    fn q_inv(&self) -> Self::C {
        self.q().try_inv().expect("q is a unit")
    }
}

/// Rational functions of `q^(1/2)`, extended by `u`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Symbolic;

/// Truncated `h`-series, `q = e^h`.
#[derive(Clone, Copy, Debug)]
pub struct Series {
    order: usize,
}

/// Floating point at a fixed `h`.
#[derive(Clone, Copy, Debug)]
pub struct Numeric {
    pub h: f64,
}

impl Series {
    /// Default truncation: terms through `h^3`.
    pub const DEFAULT_ORDER: usize = 4;

    /// Keeps `h^0 .. h^(order-1)`; the construction needs `order >= 2`.
    pub fn new(order: usize) -> Result<Self, PlError> {
        if order < 2 {
            return Err(PlError::TruncationTooLow { order, needed: 2 });
        }
        Ok(Series { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

impl Deformation for Symbolic {
    type C = QuadExt;
    fn mode(&self) -> &'static str {
        "exact"
    }
    fn sqrt_q(&self) -> QuadExt {
        QuadExt::base(RatFunc::s())
    }
    fn u(&self) -> QuadExt {
        QuadExt::u()
    }
}

impl Deformation for Series {
    type C = HSeries;
    fn mode(&self) -> &'static str {
        "series"
    }
    fn sqrt_q(&self) -> HSeries {
        HSeries::exp_h(&rat(1, 2), self.order)
    }
    fn u(&self) -> HSeries {
        let cosh = self.q().add(&self.q_inv()).mul(&HSeries::from_rational(&rat(1, 2)));
        cosh.pow_rational(&rat(-1, 2)).expect("cosh h starts at 1")
    }
}

impl Deformation for Numeric {
    type C = f64;
    fn mode(&self) -> &'static str {
        "numeric"
    }
    fn sqrt_q(&self) -> f64 {
        (self.h / 2.0).exp()
    }
    fn u(&self) -> f64 {
        (1.0 / self.h.cosh()).sqrt()
    }
}

/// `e^{xσ} = cosh x I + sinh x σ` given `t = e^x`.
fn exp_sigma<C: Coeff>(t: &C) -> TensorMatrix<C> {
    let ti = t.try_inv().expect("exponential is a unit");
    let half = C::from_rational(&rat(1, 2));
    let ch = t.add(&ti).mul(&half);
    let sh = t.sub(&ti).mul(&half);
    TensorMatrix::identity(4).scale(&ch).add(&TensorMatrix::flip().scale(&sh))
}

/// `F̂ = e^{-hσ/2} [[√q,0,0,0],[0,u^-1,0,0],[0,v,u,0],[0,0,0,√q]]`, `v = (q - q^-1) u / 2`.
pub fn build_fhat<D: Deformation>(d: &D) -> TensorMatrix<D::C> {
    let s = d.sqrt_q();
    let u = d.u();
    let v = d.q().sub(&d.q_inv()).mul(&u).mul(&D::C::from_rational(&rat(1, 2)));
    let ui = u.try_inv().expect("u is a unit");
    let m = TensorMatrix::from_fn(4, |i, j| match (i, j) {
        (0, 0) | (3, 3) => s.clone(),
        (1, 1) => ui.clone(),
        (2, 1) => v.clone(),
        (2, 2) => u.clone(),
        _ => D::C::zero(),
    });
    exp_sigma(&s.try_inv().expect("sqrt q is a unit")).mul(&m)
}

/// `R_q = √q σ(F̂^-1) e^{(σ - I/2) h} F̂`.
pub fn build_rq<D: Deformation>(d: &D, fhat: &TensorMatrix<D::C>) -> Result<TensorMatrix<D::C>, PlError> {
    let fi = fhat.inverse()?;
    let s = d.sqrt_q();
    let mid = exp_sigma(&d.q()).scale(&s.try_inv().expect("sqrt q is a unit"));
    Ok(fi.flipped().mul(&mid).mul(fhat).scale(&s))
}

/// `[[q,0,0,0],[0,1,0,0],[0,q-q^-1,1,0],[0,0,0,q]]`.
pub fn explicit_rq<C: Coeff>(q: &C) -> TensorMatrix<C> {
    let qi = q.try_inv().expect("q must be a unit");
    TensorMatrix::from_fn(4, |i, j| match (i, j) {
        (0, 0) | (3, 3) => q.clone(),
        (1, 1) | (2, 2) => C::one(),
        (2, 1) => q.sub(&qi),
        _ => C::zero(),
    })
}

/// Symbolic `R_q` with entries in `Q(q^(1/2))`; fails if `u` survives.
pub fn rq_symbolic() -> Result<TensorMatrix<RatFunc>, PlError> {
    let r = build_rq(&Symbolic, &build_fhat(&Symbolic))?;
    let e: Option<Vec<RatFunc>> = r.entries().iter().map(|x| x.to_base()).collect();
    let e = e.ok_or_else(|| PlError::Shape("R_q entries left the base field".into()))?;
    Ok(TensorMatrix::from_fn(4, |i, j| e[4 * i + j].clone()))
}

/// `R12 R13 R23 - R23 R13 R12`.
pub fn qybe_defect<C: Coeff>(r: &TensorMatrix<C>) -> TensorMatrix<C> {
    let (r12, r13, r23) = (r.leg(0, 1), r.leg(0, 2), r.leg(1, 2));
    r12.mul(&r13).mul(&r23).sub(&r23.mul(&r13).mul(&r12))
}

/// Largest entry of the QYBE defect.
pub fn qybe_residual<C: Coeff>(r: &TensorMatrix<C>) -> f64 {
    qybe_defect(r).max_magnitude()
}

/// `R R^σ - I` with `R^σ = σ R σ`.
pub fn unitarity_defect<C: Coeff>(r: &TensorMatrix<C>) -> TensorMatrix<C> {
    r.mul(&r.flipped()).sub(&TensorMatrix::identity(4))
}

/// `h`-coefficients `k` of a series matrix.
pub fn series_coefficient(m: &TensorMatrix<HSeries>, k: usize) -> TensorMatrix<BigRational> {
    TensorMatrix::from_fn(m.dim(), |i, j| m.get(i, j).coeff(k))
}
