use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex rational `re + im*i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRat { re, im: BigRational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        CRat { re: BigRational::from_integer(BigInt::from(re)), im: BigRational::from_integer(BigInt::from(im)) }
    }

    pub fn frac(num: i64, den: i64) -> Self {
        CRat::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        CRat::from_ints(0, 1)
    }

    pub fn zero() -> Self {
        CRat::from_ints(0, 0)
    }

    pub fn one() -> Self {
        CRat::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRat { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CRat { re: &self.re * r, im: &self.im * r }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return None;
        }
        Some(CRat { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = CRat::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// Human form used by the CLI: `3/2`, `-i/2`, `(1/2 - 3i)`.
    pub fn pretty(&self) -> String {
        fn r(x: &BigRational) -> String {
            if x.is_integer() {
                x.to_integer().to_string()
            } else {
                format!("{}/{}", x.numer(), x.denom())
            }
        }
        fn imag(x: &BigRational) -> String {
            let a = x.abs();
            let body = if a.is_one() {
                "i".to_string()
            } else if a.is_integer() {
                format!("{}i", a.to_integer())
            } else if a.numer().is_one() {
                format!("i/{}", a.denom())
            } else {
                format!("{}i/{}", a.numer(), a.denom())
            };
            if x.is_negative() {
                format!("-{}", body)
            } else {
                body
            }
        }
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => r(&self.re),
            (true, false) => imag(&self.im),
            (false, false) => {
                let im = imag(&self.im);
                if let Some(rest) = im.strip_prefix('-') {
                    format!("({} - {})", r(&self.re), rest)
                } else {
                    format!("({} + {})", r(&self.re), im)
                }
            }
        }
    }
}

impl fmt::Display for CRat {
    /// Canonical form `(re+imi)`, e.g. `(3/2+0i)`, `(0-1/2i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "({}{}{}i)", self.re, sign, self.im.abs())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("malformed complex rational `{0}`")]
pub struct ParseCRatError(pub String);

impl FromStr for CRat {
    type Err = ParseCRatError;

    /// Parses the canonical `Display` form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseCRatError(s.to_string());
        let body = s.trim().strip_prefix('(').and_then(|b| b.strip_suffix("i)")).ok_or_else(err)?;
        // split at the sign that separates the imaginary part (skip a leading sign)
        let idx = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(i, _)| i).last().ok_or_else(err)?;
        let (re_s, im_s) = body.split_at(idx);
        let re = BigRational::from_str(re_s).map_err(|_| err())?;
        let im_abs = BigRational::from_str(&im_s[1..]).map_err(|_| err())?;
        let im = if im_s.starts_with('-') { -im_abs } else { im_abs };
        Ok(CRat { re, im })
    }
}

impl<'a> Add<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn add(self, o: &CRat) -> CRat {
        CRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn sub(self, o: &CRat) -> CRat {
        CRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn mul(self, o: &CRat) -> CRat {
        CRat { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Add for CRat {
    type Output = CRat;
    fn add(self, o: CRat) -> CRat {
        &self + &o
    }
}

impl Sub for CRat {
    type Output = CRat;
    fn sub(self, o: CRat) -> CRat {
        &self - &o
    }
}

impl Mul for CRat {
    type Output = CRat;
    fn mul(self, o: CRat) -> CRat {
        &self * &o
    }
}

impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat { re: -self.re, im: -self.im }
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&CRat> for CRat {
    fn add_assign(&mut self, o: &CRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}
