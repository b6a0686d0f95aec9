use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use super::crat::CRat;
use super::PolyError;

/// Polynomial in `q_1..q_n, p_1..p_n` with exact complex rational coefficients.
///
/// Exponent vectors have length `2n`: the first `n` slots are the `q` exponents,
/// the last `n` the `p` exponents. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PhasePoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, CRat>,
}

impl PhasePoly {
    pub fn zero(n: usize) -> Self {
        assert!(n > 0, "phase space dimension must be positive");
        PhasePoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: CRat) -> Self {
        let mut out = PhasePoly::zero(n);
        out.add_term(vec![0; 2 * n], c);
        out
    }

    pub fn one(n: usize) -> Self {
        PhasePoly::constant(n, CRat::one())
    }

    pub fn monomial(n: usize, exps: Vec<u32>, c: CRat) -> Self {
        assert_eq!(exps.len(), 2 * n);
        let mut out = PhasePoly::zero(n);
        out.add_term(exps, c);
        out
    }

    /// `q_i` with 1-based index.
    pub fn q(n: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[i - 1] = 1;
        PhasePoly::monomial(n, e, CRat::one())
    }

    /// `p_i` with 1-based index.
    pub fn p(n: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * n];
        e[n + i - 1] = 1;
        PhasePoly::monomial(n, e, CRat::one())
    }

    /// `c * q^a * p^b` on the plane.
    pub fn qp(a: u32, b: u32, c: CRat) -> Self {
        PhasePoly::monomial(1, vec![a, b], c)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, CRat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: CRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn coeff(&self, exps: &[u32]) -> CRat {
        self.terms.get(exps).cloned().unwrap_or_else(CRat::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn check(&self, o: &PhasePoly) -> Result<(), PolyError> {
        if self.n != o.n {
            return Err(PolyError::DimensionMismatch(self.n, o.n));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &PhasePoly) -> Result<PhasePoly, PolyError> {
        self.check(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &PhasePoly) -> Result<PhasePoly, PolyError> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &PhasePoly) -> Result<PhasePoly, PolyError> {
        self.check(o)?;
        let mut out = PhasePoly::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Panicking sum; both operands must share the dimension.
    pub fn add(&self, o: &PhasePoly) -> PhasePoly {
        self.try_add(o).expect("dimension mismatch")
    }

    pub fn sub(&self, o: &PhasePoly) -> PhasePoly {
        self.try_sub(o).expect("dimension mismatch")
    }

    pub fn mul(&self, o: &PhasePoly) -> PhasePoly {
        self.try_mul(o).expect("dimension mismatch")
    }

    pub fn neg(&self) -> PhasePoly {
        self.scale(&CRat::from_ints(-1, 0))
    }

    pub fn scale(&self, c: &CRat) -> PhasePoly {
        let mut out = PhasePoly::zero(self.n);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> PhasePoly {
        let mut out = PhasePoly::one(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn conj(&self) -> PhasePoly {
        let mut out = PhasePoly::zero(self.n);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.conj());
        }
        out
    }

    /// Partial derivative in slot `v` (0-based over `q_1..q_n, p_1..p_n`), applied `k` times.
    pub fn deriv(&self, v: usize, k: u32) -> PhasePoly {
        let mut out = PhasePoly::zero(self.n);
        if k == 0 {
            return self.clone();
        }
        for (e, c) in &self.terms {
            if e[v] < k {
                continue;
            }
            let mut ff = BigInt::from(1);
            for j in 0..k {
                ff *= BigInt::from(e[v] - j);
            }
            let mut e2 = e.clone();
            e2[v] -= k;
            out.add_term(e2, c.scale(&BigRational::from_integer(ff)));
        }
        out
    }

    pub fn dq(&self, i: usize) -> PhasePoly {
        self.deriv(i, 1)
    }

    pub fn dp(&self, i: usize) -> PhasePoly {
        self.deriv(self.n + i, 1)
    }

    /// Evaluate at a point given as `(q, p)` slices.
    pub fn eval(&self, q: &[f64], p: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = 1.0;
            for i in 0..self.n {
                m *= q[i].powi(e[i] as i32) * p[i].powi(e[self.n + i] as i32);
            }
            acc += c.to_c64() * m;
        }
        acc
    }

    /// Substitute `x_v -> sum_w lin[v][w] x_w` for every slot simultaneously.
    pub fn linear_substitute(&self, lin: &[Vec<BigRational>]) -> PhasePoly {
        let d = 2 * self.n;
        let forms: Vec<PhasePoly> = (0..d)
            .map(|v| {
                let mut f = PhasePoly::zero(self.n);
                for (w, c) in lin[v].iter().enumerate() {
                    let mut e = vec![0; d];
                    e[w] = 1;
                    f.add_term(e, CRat::real(c.clone()));
                }
                f
            })
            .collect();
        let mut out = PhasePoly::zero(self.n);
        for (e, c) in &self.terms {
            let mut t = PhasePoly::constant(self.n, c.clone());
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&forms[v].pow(k));
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub(crate) fn var_name(n: usize, v: usize, indexed: bool) -> String {
        let (base, i) = if v < n { ("q", v + 1) } else { ("p", v - n + 1) };
        if indexed {
            format!("{}{}", base, i)
        } else {
            base.to_string()
        }
    }

    /// Canonical factor list `*q1^2*p1^1` (empty for the constant monomial).
    pub(crate) fn canonical_factors(n: usize, e: &[u32]) -> String {
        let mut s = String::new();
        for (v, &k) in e.iter().enumerate() {
            if k > 0 {
                s.push_str(&format!("*{}^{}", PhasePoly::var_name(n, v, true), k));
            }
        }
        s
    }

    /// Terms of the canonical form without the `PhasePoly[n=..]:` prefix.
    pub(crate) fn canonical_body(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms.iter().map(|(e, c)| format!("{}{}", c, PhasePoly::canonical_factors(self.n, e))).collect::<Vec<_>>().join(" + ")
    }

    pub(crate) fn parse_body(n: usize, body: &str, hbar: bool) -> Result<Vec<(Vec<u32>, u32, CRat)>, PolyError> {
        let body = body.trim();
        if body == "0" {
            return Ok(Vec::new());
        }
        let bad = |m: &str| PolyError::Parse(format!("{}: `{}`", m, body));
        let mut out = Vec::new();
        for term in body.split(" + ") {
            let mut parts = term.split('*');
            let c: CRat = parts.next().ok_or_else(|| bad("empty term"))?.parse().map_err(|_| bad("bad coefficient"))?;
            let mut e = vec![0u32; 2 * n];
            let mut hk = 0u32;
            for f in parts {
                let (name, k) = f.split_once('^').ok_or_else(|| bad("missing exponent"))?;
                let k: u32 = k.parse().map_err(|_| bad("bad exponent"))?;
                if name == "hbar" && hbar {
                    hk = k;
                    continue;
                }
                let (base, idx) = name.split_at(1);
                let idx: usize = idx.parse().map_err(|_| bad("bad variable"))?;
                if idx == 0 || idx > n {
                    return Err(bad("variable index out of range"));
                }
                match base {
                    "q" => e[idx - 1] = k,
                    "p" => e[n + idx - 1] = k,
                    _ => return Err(bad("unknown variable")),
                }
            }
            out.push((e, hk, c));
        }
        Ok(out)
    }

    /// Human-readable form, e.g. `q^2*p - 3/2*q`.
    pub fn pretty(&self) -> String {
        pretty_terms(self.terms.iter().rev().map(|(e, c)| (self.monomial_name(e), c.clone())).collect())
    }

    pub(crate) fn monomial_name(&self, e: &[u32]) -> String {
        let indexed = self.n > 1;
        let mut f = Vec::new();
        for (v, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => f.push(PhasePoly::var_name(self.n, v, indexed)),
                _ => f.push(format!("{}^{}", PhasePoly::var_name(self.n, v, indexed), k)),
            }
        }
        f.join("*")
    }
}

/// Join `(monomial, coefficient)` pairs into `a*b - (i/2)*hbar` style text.
pub(crate) fn pretty_terms(terms: Vec<(String, CRat)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, (mono, c)) in terms.into_iter().enumerate() {
        let negative = if c.is_real() { c.re < num_traits::Zero::zero() } else { c.is_imaginary() && c.im < num_traits::Zero::zero() };
        let mag = if negative { -c } else { c };
        let body = if mono.is_empty() {
            mag.pretty()
        } else if mag.is_one() {
            mono
        } else {
            let p = mag.pretty();
            if p.contains('/') && !p.starts_with('(') {
                format!("({})*{}", p, mono)
            } else {
                format!("{}*{}", p, mono)
            }
        };
        match (k, negative) {
            (0, false) => s.push_str(&body),
            (0, true) => s.push_str(&format!("-{}", body)),
            (_, false) => s.push_str(&format!(" + {}", body)),
            (_, true) => s.push_str(&format!(" - {}", body)),
        }
    }
    s
}

impl fmt::Display for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhasePoly[n={}]: {}", self.n, self.canonical_body())
    }
}

impl std::str::FromStr for PhasePoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rest = s.trim().strip_prefix("PhasePoly[n=").ok_or_else(|| PolyError::Parse(s.to_string()))?;
        let (n, body) = rest.split_once("]:").ok_or_else(|| PolyError::Parse(s.to_string()))?;
        let n: usize = n.parse().map_err(|_| PolyError::Parse(s.to_string()))?;
        if n == 0 {
            return Err(PolyError::Parse(s.to_string()));
        }
        let mut out = PhasePoly::zero(n);
        for (e, _, c) in PhasePoly::parse_body(n, body, false)? {
            out.add_term(e, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_terms_are_dropped() {
        let q = PhasePoly::q(1, 1);
        assert!(q.sub(&q).is_zero());
        assert_eq!(q.sub(&q).degree(), None);
    }

    #[test]
    fn derivative_falling_factorial() {
        let f = PhasePoly::qp(3, 1, CRat::one());
        assert_eq!(f.deriv(0, 2), PhasePoly::qp(1, 1, CRat::from_ints(6, 0)));
        assert!(f.deriv(1, 2).is_zero());
    }

    #[test]
    fn canonical_round_trip() {
        let f = PhasePoly::qp(2, 1, CRat::frac(3, 2)).add(&PhasePoly::constant(1, CRat::from_ints(0, -2)));
        let s = f.to_string();
        assert_eq!(s, "PhasePoly[n=1]: (0-2i) + (3/2+0i)*q1^2*p1^1");
        assert_eq!(s.parse::<PhasePoly>().unwrap(), f);
        let z = PhasePoly::zero(2);
        assert_eq!(z.to_string().parse::<PhasePoly>().unwrap(), z);
    }

    #[test]
    fn pretty_pulls_signs() {
        let f = PhasePoly::qp(1, 1, CRat::one()).add(&PhasePoly::constant(1, CRat::frac(-1, 2)));
        assert_eq!(f.pretty(), "q*p - 1/2");
    }

    #[test]
    fn mismatched_dims_error() {
        assert!(PhasePoly::one(1).try_mul(&PhasePoly::one(2)).is_err());
    }
}
