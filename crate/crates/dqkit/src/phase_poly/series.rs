use std::fmt;

use num_complex::Complex64;

use super::crat::CRat;
use super::poly::{pretty_terms, PhasePoly};
use super::PolyError;

/// Truncated series `sum_{k<=N} hbar^k f_k` with `PhasePoly` coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HbarSeries {
    n: usize,
    coeffs: Vec<PhasePoly>,
}

impl HbarSeries {
    pub fn zero(n: usize, order: usize) -> Self {
        HbarSeries { n, coeffs: vec![PhasePoly::zero(n); order + 1] }
    }

    /// Lift an hbar-free polynomial.
    pub fn from_poly(f: &PhasePoly, order: usize) -> Self {
        let mut s = HbarSeries::zero(f.dim(), order);
        s.coeffs[0] = f.clone();
        s
    }

    pub fn from_coeffs(coeffs: Vec<PhasePoly>) -> Result<Self, PolyError> {
        let n = coeffs.first().map(|c| c.dim()).ok_or_else(|| PolyError::Parse("empty series".into()))?;
        if let Some(bad) = coeffs.iter().find(|c| c.dim() != n) {
            return Err(PolyError::DimensionMismatch(n, bad.dim()));
        }
        Ok(HbarSeries { n, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[PhasePoly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &PhasePoly {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut PhasePoly {
        &mut self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub(crate) fn check(&self, o: &HbarSeries) -> Result<(), PolyError> {
        if self.n != o.n {
            return Err(PolyError::DimensionMismatch(self.n, o.n));
        }
        if self.order() != o.order() {
            return Err(PolyError::OrderMismatch(self.order(), o.order()));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &HbarSeries) -> Result<HbarSeries, PolyError> {
        self.check(o)?;
        Ok(HbarSeries { n: self.n, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect() })
    }

    pub fn try_sub(&self, o: &HbarSeries) -> Result<HbarSeries, PolyError> {
        self.check(o)?;
        Ok(HbarSeries { n: self.n, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect() })
    }

    /// Commutative product, truncated at the common order.
    pub fn try_mul(&self, o: &HbarSeries) -> Result<HbarSeries, PolyError> {
        self.check(o)?;
        let mut out = HbarSeries::zero(self.n, self.order());
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j <= self.order() {
                    out.coeffs[i + j] = out.coeffs[i + j].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CRat) -> HbarSeries {
        HbarSeries { n: self.n, coeffs: self.coeffs.iter().map(|f| f.scale(c)).collect() }
    }

    /// Change truncation order, padding with zeros or discarding high orders.
    pub fn with_order(&self, order: usize) -> HbarSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, PhasePoly::zero(self.n));
        HbarSeries { n: self.n, coeffs }
    }

    /// Numeric value at `(q, p)` with a numeric hbar.
    pub fn eval(&self, q: &[f64], p: &[f64], hbar: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += c.eval(q, p) * hbar.powi(k as i32);
        }
        acc
    }

    /// Human-readable form, e.g. `q*p - (i/2)*hbar`.
    pub fn pretty(&self) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            for (e, v) in c.terms().iter().rev() {
                let mut mono = c.monomial_name(e);
                let h = match k {
                    0 => String::new(),
                    1 => "hbar".to_string(),
                    _ => format!("hbar^{}", k),
                };
                if !h.is_empty() {
                    if mono.is_empty() {
                        mono = h;
                    } else {
                        mono = format!("{}*{}", mono, h);
                    }
                }
                terms.push((mono, v.clone()));
            }
        }
        pretty_terms(terms)
    }
}

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            for (e, v) in c.terms() {
                parts.push(format!("{}{}*hbar^{}", v, PhasePoly::canonical_factors(self.n, e), k));
            }
        }
        let body = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        write!(f, "HbarSeries[n={},N={}]: {}", self.n, self.order(), body)
    }
}

impl std::str::FromStr for HbarSeries {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PolyError::Parse(s.to_string());
        let rest = s.trim().strip_prefix("HbarSeries[n=").ok_or_else(bad)?;
        let (head, body) = rest.split_once("]:").ok_or_else(bad)?;
        let (n, order) = head.split_once(",N=").ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        let order: usize = order.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        let mut out = HbarSeries::zero(n, order);
        for (e, k, c) in PhasePoly::parse_body(n, body, true)? {
            let k = k as usize;
            if k > order {
                return Err(bad());
            }
            out.coeffs[k].add_term(e, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        let mut s = HbarSeries::from_poly(&PhasePoly::qp(2, 1, CRat::frac(3, 2)), 3);
        s.coeff_mut(1).add_term(vec![1, 0], CRat::from_ints(0, -1));
        let text = s.to_string();
        assert_eq!(text, "HbarSeries[n=1,N=3]: (3/2+0i)*q1^2*p1^1*hbar^0 + (0-1i)*q1^1*hbar^1");
        assert_eq!(text.parse::<HbarSeries>().unwrap(), s);
    }

    #[test]
    fn product_truncates() {
        let mut h = HbarSeries::zero(1, 1);
        h.coeff_mut(1).add_term(vec![0, 0], CRat::one());
        assert!(h.try_mul(&h).unwrap().is_zero());
    }

    #[test]
    fn order_mismatch_errors() {
        let a = HbarSeries::zero(1, 1);
        let b = HbarSeries::zero(1, 2);
        assert_eq!(a.try_add(&b), Err(PolyError::OrderMismatch(1, 2)));
    }
}
