use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Ring of matrix entries. Exact types compare structurally after normalization.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// `None` for non-units.
    fn try_inv(&self) -> Option<Self>;
    /// Coefficient height, zero iff the value is zero.
    fn magnitude(&self) -> f64;
    /// Whether the printed form starts with a minus sign worth pulling out.
    fn leading_negative(&self) -> bool {
        false
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(&rat(n, 1))
    }

    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// Writes `c * x^e` terms in the given order, e.g. `q - q^-1`, `1/2*h^2`.
fn write_terms(f: &mut fmt::Formatter<'_>, var: &str, terms: &[(i64, BigRational)]) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (i, (e, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        let pow = match *e {
            0 => String::new(),
            1 => var.to_string(),
            e => format!("{}^{}", var, e),
        };
        if pow.is_empty() {
            write!(f, "{}", a)?;
        } else if a.is_one() {
            write!(f, "{}", pow)?;
        } else {
            write!(f, "{}*{}", a, pow)?;
        }
    }
    Ok(())
}

impl Coeff for BigRational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        (!num_traits::Zero::is_zero(self)).then(|| self.recip())
    }
    fn magnitude(&self) -> f64 {
        rat_f64(&self.abs())
    }
    fn leading_negative(&self) -> bool {
        self.is_negative()
    }
}

/// Floating-point entries for the numeric mode.
impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &BigRational) -> Self {
        rat_f64(r)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn try_inv(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn leading_negative(&self) -> bool {
        *self < 0.0
    }
}

/// Dense univariate polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly(Vec<BigRational>);

impl UPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Coeff::is_zero) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn constant(c: BigRational) -> Self {
        UPoly::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        UPoly::new(v)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        UPoly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, c: &BigRational) -> UPoly {
        UPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly(vec![]);
        }
        let mut v = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if Coeff::is_zero(a) {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        UPoly::new(v)
    }

    /// Euclidean division, `o` nonzero.
    pub fn divrem(&self, o: &UPoly) -> (UPoly, UPoly) {
        let dq = o.degree().expect("division by zero polynomial");
        let lead = o.lead();
        let mut r = self.0.clone();
        let mut q = vec![BigRational::zero(); self.0.len().saturating_sub(dq).max(1)];
        while r.len() > dq && !r.is_empty() {
            let k = r.len() - 1 - dq;
            let c = r.last().unwrap() / &lead;
            for (j, b) in o.0.iter().enumerate() {
                r[k + j] -= &c * b;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(Coeff::is_zero) {
                r.pop();
            }
        }
        (UPoly::new(q), UPoly::new(r))
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let l = a.lead().recip();
        a.scale(&l)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + rat_f64(c))
    }

    /// Lowest power with a nonzero coefficient.
    fn valuation(&self) -> usize {
        self.0.iter().position(|c| !Coeff::is_zero(c)).unwrap_or(0)
    }
}

/// Element of `Q(s)`, `s = q^(1/2)`. Reduced, with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: UPoly,
    den: UPoly,
}

impl RatFunc {
    pub fn new(num: UPoly, den: UPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: UPoly::constant(BigRational::one()) };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.divrem(&g).0, den.divrem(&g).0);
        let l = d.lead().recip();
        n = n.scale(&l);
        d = d.scale(&l);
        RatFunc { num: n, den: d }
    }

    /// The generator `s = q^(1/2)`.
    pub fn s() -> Self {
        RatFunc::laurent(&[(1, BigRational::one())])
    }

    /// `q = s^2`.
    pub fn q() -> Self {
        RatFunc::laurent(&[(2, BigRational::one())])
    }

    pub fn q_inv() -> Self {
        RatFunc::laurent(&[(-2, BigRational::one())])
    }

    /// Laurent polynomial `sum c s^e`.
    pub fn laurent(terms: &[(i64, BigRational)]) -> Self {
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(0).min(0);
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(0).max(0);
        let mut v = vec![BigRational::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            v[(e - lo) as usize] += c;
        }
        RatFunc::new(UPoly::new(v), UPoly::monomial(BigRational::one(), (-lo) as usize))
    }

    pub fn numerator(&self) -> &UPoly {
        &self.num
    }

    pub fn denominator(&self) -> &UPoly {
        &self.den
    }

    /// Laurent terms `(exponent of s, coefficient)` when the denominator is a power of `s`.
    pub fn laurent_terms(&self) -> Option<Vec<(i64, BigRational)>> {
        let k = self.den.degree().unwrap_or(0);
        if self.den != UPoly::monomial(BigRational::one(), k) {
            return None;
        }
        Some(self.num.coeffs().iter().enumerate().filter(|(_, c)| !Coeff::is_zero(*c)).map(|(i, c)| (i as i64 - k as i64, c.clone())).collect())
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.num.eval(s) / self.den.eval(s)
    }

    fn write_poly(f: &mut fmt::Formatter<'_>, p: &UPoly) -> fmt::Result {
        let terms: Vec<(i64, BigRational)> =
            p.coeffs().iter().enumerate().rev().filter(|(_, c)| !Coeff::is_zero(*c)).map(|(i, c)| (i as i64, c.clone())).collect();
        write_terms(f, "s", &terms)
    }
}

/// Laurent forms print in `q` when every power of `s` is even; other values print in `s`.
impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(mut t) = self.laurent_terms() {
            t.reverse();
            if t.iter().all(|(e, _)| e % 2 == 0) {
                let t: Vec<_> = t.into_iter().map(|(e, c)| (e / 2, c)).collect();
                return write_terms(f, "q", &t);
            }
            return write_terms(f, "s", &t);
        }
        write!(f, "(")?;
        RatFunc::write_poly(f, &self.num)?;
        write!(f, ")/(")?;
        RatFunc::write_poly(f, &self.den)?;
        write!(f, ")")
    }
}

impl Coeff for RatFunc {
    fn zero() -> Self {
        RatFunc { num: UPoly(vec![]), den: UPoly::constant(BigRational::one()) }
    }
    fn one() -> Self {
        Self::from_rational(&BigRational::one())
    }
    fn from_rational(r: &BigRational) -> Self {
        RatFunc { num: UPoly::constant(r.clone()), den: UPoly::constant(BigRational::one()) }
    }
    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone());
        }
        RatFunc::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }
    fn mul(&self, o: &Self) -> Self {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }
    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn try_inv(&self) -> Option<Self> {
        (!self.num.is_zero()).then(|| RatFunc::new(self.den.clone(), self.num.clone()))
    }
    fn magnitude(&self) -> f64 {
        let h = |p: &UPoly| p.coeffs().iter().map(|c| rat_f64(&c.abs())).fold(0.0, f64::max);
        h(&self.num) / h(&self.den)
    }
    fn leading_negative(&self) -> bool {
        self.den.valuation() == self.den.degree().unwrap_or(0) && self.num.lead().is_negative()
    }
}

/// `x + y u` over `Q(s)` with `u^2 = 2 / (q + q^-1) = 2 s^2 / (s^4 + 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    pub x: RatFunc,
    pub y: RatFunc,
}

impl QuadExt {
    pub fn base(x: RatFunc) -> Self {
        QuadExt { x, y: RatFunc::zero() }
    }

    /// The generator `u = sqrt(2 / (q + q^-1))`.
    pub fn u() -> Self {
        QuadExt { x: RatFunc::zero(), y: RatFunc::one() }
    }

    pub fn u_squared() -> RatFunc {
        let two = rat(2, 1);
        RatFunc::new(UPoly::monomial(two, 2), UPoly::new(vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)]))
    }

    /// The value if it lies in `Q(s)`.
    pub fn to_base(&self) -> Option<RatFunc> {
        self.y.is_zero().then(|| self.x.clone())
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x.is_zero(), self.y.is_zero()) {
            (_, true) => write!(f, "{}", self.x),
            (true, false) => write!(f, "({})*u", self.y),
            (false, false) => write!(f, "{} + ({})*u", self.x, self.y),
        }
    }
}

impl Coeff for QuadExt {
    fn zero() -> Self {
        QuadExt::base(RatFunc::zero())
    }
    fn one() -> Self {
        QuadExt::base(RatFunc::one())
    }
    fn from_rational(r: &BigRational) -> Self {
        QuadExt::base(RatFunc::from_rational(r))
    }
    fn add(&self, o: &Self) -> Self {
        QuadExt { x: self.x.add(&o.x), y: self.y.add(&o.y) }
    }
    fn mul(&self, o: &Self) -> Self {
        let yy = self.y.mul(&o.y).mul(&QuadExt::u_squared());
        QuadExt { x: self.x.mul(&o.x).add(&yy), y: self.x.mul(&o.y).add(&self.y.mul(&o.x)) }
    }
    fn neg(&self) -> Self {
        QuadExt { x: self.x.neg(), y: self.y.neg() }
    }
    fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
    fn try_inv(&self) -> Option<Self> {
        // u is irrational over Q(s), so the norm vanishes only at zero
        let norm = self.x.mul(&self.x).sub(&self.y.mul(&self.y).mul(&QuadExt::u_squared()));
        let ni = norm.try_inv()?;
        Some(QuadExt { x: self.x.mul(&ni), y: self.y.neg().mul(&ni) })
    }
    fn magnitude(&self) -> f64 {
        self.x.magnitude() + self.y.magnitude()
    }
    fn leading_negative(&self) -> bool {
        self.y.is_zero() && self.x.leading_negative()
    }
}

/// Power series in `h` with rational coefficients, known modulo `h^order`.
/// `order == None` marks an exact polynomial.
#[derive(Clone, Debug)]
pub struct HSeries {
    coeffs: Vec<BigRational>,
    order: Option<usize>,
}

impl HSeries {
    pub fn exact(c: Vec<BigRational>) -> Self {
        HSeries { coeffs: c, order: None }.normalized()
    }

    pub fn truncated(c: Vec<BigRational>, order: usize) -> Self {
        HSeries { coeffs: c, order: Some(order) }.normalized()
    }

    /// `h` itself.
    pub fn h() -> Self {
        HSeries::exact(vec![rat(0, 1), rat(1, 1)])
    }

    /// `exp(c h) mod h^order`.
    pub fn exp_h(c: &BigRational, order: usize) -> Self {
        let mut v = Vec::with_capacity(order);
        let mut t = BigRational::one();
        for k in 0..order {
            v.push(t.clone());
            t = t * c / BigRational::from_integer(BigInt::from(k + 1));
        }
        HSeries::truncated(v, order)
    }

    /// `self^r` for a series with constant term 1, by the binomial series.
    pub fn pow_rational(&self, r: &BigRational) -> Option<Self> {
        let order = self.order?;
        if !self.coeff(0).is_one() {
            return None;
        }
        let x = self.sub(&HSeries::one());
        let mut out = HSeries::truncated(vec![], order);
        let mut xk = HSeries::one();
        let mut binom = BigRational::one();
        for k in 0..order {
            out = out.add(&xk.scale(&binom));
            xk = xk.mul(&x);
            binom = binom * (r - BigRational::from_integer(BigInt::from(k))) / BigRational::from_integer(BigInt::from(k + 1));
        }
        Some(out)
    }

    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        HSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect(), order: self.order }.normalized()
    }

    fn normalized(mut self) -> Self {
        if let Some(n) = self.order {
            self.coeffs.truncate(n);
        }
        while self.coeffs.last().is_some_and(Coeff::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    fn meet(a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) | (None, x) => x,
        }
    }
}

impl PartialEq for HSeries {
    /// Equality modulo the coarser truncation.
    fn eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

impl fmt::Display for HSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(i64, BigRational)> = self.coeffs.iter().enumerate().filter(|(_, c)| !Coeff::is_zero(*c)).map(|(i, c)| (i as i64, c.clone())).collect();
        match self.order {
            Some(n) if terms.is_empty() => write!(f, "O(h^{})", n),
            Some(n) => {
                write_terms(f, "h", &terms)?;
                write!(f, " + O(h^{})", n)
            }
            None => write_terms(f, "h", &terms),
        }
    }
}

impl Coeff for HSeries {
    fn zero() -> Self {
        HSeries::exact(vec![])
    }
    fn one() -> Self {
        HSeries::exact(vec![BigRational::one()])
    }
    fn from_rational(r: &BigRational) -> Self {
        HSeries::exact(vec![r.clone()])
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        HSeries { coeffs: (0..n).map(|i| self.coeff(i) + o.coeff(i)).collect(), order: HSeries::meet(self.order, o.order) }.normalized()
    }
    fn mul(&self, o: &Self) -> Self {
        let order = HSeries::meet(self.order, o.order);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return HSeries { coeffs: vec![], order };
        }
        let mut n = self.coeffs.len() + o.coeffs.len() - 1;
        if let Some(k) = order {
            n = n.min(k);
        }
        let mut v = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            for (j, b) in o.coeffs.iter().enumerate().take(n - i) {
                v[i + j] += a * b;
            }
        }
        HSeries { coeffs: v, order }.normalized()
    }
    fn neg(&self) -> Self {
        HSeries { coeffs: self.coeffs.iter().map(|c| -c).collect(), order: self.order }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn try_inv(&self) -> Option<Self> {
        let c0 = self.coeff(0);
        if Coeff::is_zero(&c0) {
            return None;
        }
        let Some(n) = self.order else {
            return (self.coeffs.len() == 1).then(|| HSeries::exact(vec![c0.recip()]));
        };
        // b_k = -(1/a_0) sum_{j>=1} a_j b_{k-j}
        let mut b = vec![c0.recip()];
        for k in 1..n {
            let s: BigRational = (1..=k).map(|j| self.coeff(j) * &b[k - j]).sum();
            b.push(-s / &c0);
        }
        Some(HSeries::truncated(b, n))
    }
    fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| rat_f64(&c.abs())).fold(0.0, f64::max)
    }
    fn leading_negative(&self) -> bool {
        self.order.is_none() && self.coeffs.iter().rev().find(|c| !Coeff::is_zero(*c)).is_some_and(|c| c.is_negative())
    }
}
