use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::crat::CRat;
use super::poly::{pretty_terms, PhasePoly};
use super::series::HbarSeries;
use super::star::Convention;

/// Generator of the Heisenberg word algebra; indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Q(usize),
    P(usize),
}

impl Letter {
    // normal order: index ascending, Q before P
    fn key(self) -> (usize, u8) {
        match self {
            Letter::Q(i) => (i, 0),
            Letter::P(i) => (i, 1),
        }
    }
}

/// Commutator constant `kappa` with `[Q_i, P_i] = kappa * hbar`, matched to the
/// star convention so that the Weyl map is an algebra homomorphism.
pub fn commutator_constant(conv: Convention) -> CRat {
    let l = conv.lambda();
    &l + &l
}

/// `coefficient * hbar^k * letters`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeisenbergWord {
    pub coefficient: CRat,
    pub hbar: u32,
    pub letters: Vec<Letter>,
}

impl HeisenbergWord {
    pub fn new(coefficient: CRat, letters: Vec<Letter>) -> Self {
        HeisenbergWord { coefficient, hbar: 0, letters }
    }

    /// Rewrite to normal form by adjacent swaps, using `P_i Q_i -> Q_i P_i - kappa hbar`.
    pub fn normalize(&self, n: usize, conv: Convention) -> WeylPoly {
        let kappa = commutator_constant(conv);
        let mut out = WeylPoly::zero(n);
        let mut stack = vec![self.clone()];
        while let Some(w) = stack.pop() {
            if w.coefficient.is_zero() {
                continue;
            }
            let pos = w.letters.windows(2).position(|x| x[0].key() > x[1].key());
            match pos {
                None => {
                    let mut e = vec![0u32; 2 * n];
                    for l in &w.letters {
                        match *l {
                            Letter::Q(i) => e[i - 1] += 1,
                            Letter::P(i) => e[n + i - 1] += 1,
                        }
                    }
                    out.add_term(e, w.hbar, w.coefficient.clone());
                }
                Some(j) => {
                    let (a, b) = (w.letters[j], w.letters[j + 1]);
                    let mut swapped = w.letters.clone();
                    swapped.swap(j, j + 1);
                    if let (Letter::P(i), Letter::Q(k)) = (a, b) {
                        if i == k {
                            let mut shorter = w.letters.clone();
                            shorter.drain(j..j + 2);
                            stack.push(HeisenbergWord { coefficient: -(&w.coefficient * &kappa), hbar: w.hbar + 1, letters: shorter });
                        }
                    }
                    stack.push(HeisenbergWord { coefficient: w.coefficient.clone(), hbar: w.hbar, letters: swapped });
                }
            }
        }
        out
    }
}

/// Sum of normal-ordered words `c * hbar^k * Q_1^a1 P_1^b1 ... Q_n^an P_n^bn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylPoly {
    n: usize,
    // (exponents as in PhasePoly, hbar power)
    terms: BTreeMap<(Vec<u32>, u32), CRat>,
}

fn binom(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for j in 0..k {
        r = r * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    r
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

impl WeylPoly {
    pub fn zero(n: usize) -> Self {
        WeylPoly { n, terms: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<(Vec<u32>, u32), CRat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Vec<u32>, hbar: u32, c: CRat) {
        if c.is_zero() {
            return;
        }
        let key = (e, hbar);
        let gone = match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                v.is_zero()
            }
            None => {
                self.terms.insert(key.clone(), c);
                false
            }
        };
        if gone {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, o: &WeylPoly) -> WeylPoly {
        let mut out = self.clone();
        for ((e, h), c) in &o.terms {
            out.add_term(e.clone(), *h, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &WeylPoly) -> WeylPoly {
        let mut out = self.clone();
        for ((e, h), c) in &o.terms {
            out.add_term(e.clone(), *h, -c);
        }
        out
    }

    /// Operator product of normal forms, re-normalized in closed form:
    /// `P^b Q^c = sum_k k! C(b,k) C(c,k) (-kappa hbar)^k Q^{c-k} P^{b-k}` per index.
    pub fn mul(&self, o: &WeylPoly, conv: Convention) -> WeylPoly {
        let n = self.n;
        let mk = -commutator_constant(conv);
        let mut out = WeylPoly::zero(n);
        for ((e1, h1), c1) in &self.terms {
            for ((e2, h2), c2) in &o.terms {
                // expand index by index: list of (exps, hbar, coeff)
                let mut acc: Vec<(Vec<u32>, u32, CRat)> = vec![(vec![0; 2 * n], h1 + h2, c1 * c2)];
                for i in 0..n {
                    let (a, b, c, d) = (e1[i], e1[n + i], e2[i], e2[n + i]);
                    let mut next = Vec::new();
                    for (e, h, v) in &acc {
                        for k in 0..=b.min(c) {
                            let w = BigRational::from_integer(factorial(k) * binom(b, k) * binom(c, k));
                            let mut ee = e.clone();
                            ee[i] = a + c - k;
                            ee[n + i] = b + d - k;
                            next.push((ee, h + k, (v * &mk.pow(k)).scale(&w)));
                        }
                    }
                    acc = next;
                }
                for (e, h, v) in acc {
                    out.add_term(e, h, v);
                }
            }
        }
        out
    }

    pub fn pretty(&self) -> String {
        let mut terms = Vec::new();
        for ((e, h), c) in self.terms.iter().rev() {
            let mut f = Vec::new();
            for i in 0..self.n {
                for (base, k) in [("Q", e[i]), ("P", e[self.n + i])] {
                    let name = if self.n > 1 { format!("{}{}", base, i + 1) } else { base.to_string() };
                    match k {
                        0 => {}
                        1 => f.push(name),
                        _ => f.push(format!("{}^{}", name, k)),
                    }
                }
            }
            match h {
                0 => {}
                1 => f.push("hbar".into()),
                _ => f.push(format!("hbar^{}", h)),
            }
            terms.push((f.join("*"), c.clone()));
        }
        pretty_terms(terms)
    }
}

impl fmt::Display for WeylPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

/// Normal form of the symmetrized monomial `q^m p^n` on one canonical pair (closed form).
fn symmetrize_pair(m: u32, n: u32, kappa: &CRat) -> Vec<(u32, u32, u32, CRat)> {
    // (Q exp, P exp, hbar exp, coeff) with coefficient k! C(m,k) C(n,k) (-kappa/2)^k
    let half = CRat::frac(-1, 2);
    let step = &half * kappa;
    (0..=m.min(n))
        .map(|k| {
            let w = BigRational::from_integer(factorial(k) * binom(m, k) * binom(n, k));
            (m - k, n - k, k, step.pow(k).scale(&w))
        })
        .collect()
}

/// Weyl symmetrization of a polynomial, extended factor-wise over canonical pairs.
pub fn weyl_symmetrize(f: &PhasePoly, conv: Convention) -> WeylPoly {
    weyl_symmetrize_at(f, 0, conv)
}

fn weyl_symmetrize_at(f: &PhasePoly, hbar: u32, conv: Convention) -> WeylPoly {
    let n = f.dim();
    let kappa = commutator_constant(conv);
    let mut out = WeylPoly::zero(n);
    for (e, c) in f.terms() {
        let mut acc: Vec<(Vec<u32>, u32, CRat)> = vec![(vec![0; 2 * n], hbar, c.clone())];
        for i in 0..n {
            let parts = symmetrize_pair(e[i], e[n + i], &kappa);
            let mut next = Vec::new();
            for (ee, h, v) in &acc {
                for (a, b, k, w) in &parts {
                    let mut e2 = ee.clone();
                    e2[i] = *a;
                    e2[n + i] = *b;
                    next.push((e2, h + k, v * w));
                }
            }
            acc = next;
        }
        for (e, h, v) in acc {
            out.add_term(e, h, v);
        }
    }
    out
}

/// Symmetrization applied coefficient-wise, with `hbar` treated as a central scalar.
pub fn weyl_symmetrize_series(f: &HbarSeries, conv: Convention) -> WeylPoly {
    let mut out = WeylPoly::zero(f.dim());
    for (k, c) in f.coeffs().iter().enumerate() {
        out = out.add(&weyl_symmetrize_at(c, k as u32, conv));
    }
    out
}

/// Literal definition on the plane: `(m! n! / (m+n)!) sum` over all arrangements of
/// `m` Q's and `n` P's, each normalized by rewriting.
pub fn weyl_symmetrize_by_words(m: u32, n: u32, conv: Convention) -> WeylPoly {
    let total = (m + n) as usize;
    let mut out = WeylPoly::zero(1);
    let count = binom(m + n, m);
    let w = CRat::real(BigRational::new(BigInt::one(), count));
    for mask in 0u64..(1u64 << total) {
        if mask.count_ones() != m {
            continue;
        }
        let letters = (0..total).map(|j| if mask >> j & 1 == 1 { Letter::Q(1) } else { Letter::P(1) }).collect();
        out = out.add(&HeisenbergWord::new(w.clone(), letters).normalize(1, conv));
    }
    out
}

/// `true` iff the symmetrization of `f*g` equals the product of the symmetrizations.
pub fn weyl_homomorphism_check(f: &PhasePoly, g: &PhasePoly) -> bool {
    weyl_homomorphism_defect(f, g, Convention::Moyal).map(|d| d.is_zero()).unwrap_or(false)
}

/// Difference `W(f*g) - W(f) W(g)` as a normal-ordered element.
pub fn weyl_homomorphism_defect(f: &PhasePoly, g: &PhasePoly, conv: Convention) -> Result<WeylPoly, super::PolyError> {
    let order = match (f.degree(), g.degree()) {
        (Some(a), Some(b)) => a.min(b) as usize,
        _ => 0,
    };
    let fg = super::star::star_poly(f, g, order, conv)?;
    let lhs = weyl_symmetrize_series(&fg, conv);
    let rhs = weyl_symmetrize(f, conv).mul(&weyl_symmetrize(g, conv), conv);
    Ok(lhs.sub(&rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_identity() {
        assert_eq!(weyl_symmetrize(&PhasePoly::q(1, 1), Convention::Moyal).pretty(), "Q");
    }

    #[test]
    fn qp_and_q2p_closed_forms() {
        let conv = Convention::Moyal;
        // [Q,P] = -i hbar in this convention
        assert_eq!(weyl_symmetrize(&PhasePoly::qp(1, 1, CRat::one()), conv).pretty(), "Q*P + (i/2)*hbar");
        assert_eq!(weyl_symmetrize(&PhasePoly::qp(2, 1, CRat::one()), conv).pretty(), "Q^2*P + i*Q*hbar");
        assert_eq!(weyl_symmetrize(&PhasePoly::qp(2, 1, CRat::one()), conv), weyl_symmetrize_by_words(2, 1, conv));
    }

    #[test]
    fn rewriting_single_swap() {
        let w = HeisenbergWord::new(CRat::one(), vec![Letter::P(1), Letter::Q(1)]);
        assert_eq!(w.normalize(1, Convention::Moyal).pretty(), "Q*P + i*hbar");
        let w = HeisenbergWord::new(CRat::one(), vec![Letter::P(2), Letter::Q(1)]);
        assert_eq!(w.normalize(2, Convention::Moyal).pretty(), "Q1*P2");
    }

    #[test]
    fn homomorphism_examples() {
        let q = PhasePoly::q(1, 1);
        let p = PhasePoly::p(1, 1);
        assert!(weyl_homomorphism_check(&q, &p));
        assert!(weyl_homomorphism_check(&PhasePoly::one(1), &q.pow(3)));
        assert!(weyl_homomorphism_check(&q.pow(2), &p.pow(2)));
    }

    #[test]
    fn deformation_convention_commutator() {
        assert_eq!(commutator_constant(Convention::Deformation), CRat::one());
        let q = PhasePoly::q(1, 1);
        let p = PhasePoly::p(1, 1);
        assert!(weyl_homomorphism_defect(&q.pow(2), &p.pow(3), Convention::Deformation).unwrap().is_zero());
    }
}
