use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::coeff::{rat, Coeff};
use super::tensor::TensorMatrix;
use super::PlError;

/// `h H + xp X+ + xm X-` in sl(2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Element {
    pub h: BigRational,
    pub xp: BigRational,
    pub xm: BigRational,
}

impl Sl2Element {
    pub fn new(h: BigRational, xp: BigRational, xm: BigRational) -> Self {
        Sl2Element { h, xp, xm }
    }

    /// `[H, X+, X-]`.
    pub fn basis() -> [Sl2Element; 3] {
        let (z, o) = (rat(0, 1), rat(1, 1));
        [Sl2Element::new(o.clone(), z.clone(), z.clone()), Sl2Element::new(z.clone(), o.clone(), z.clone()), Sl2Element::new(z.clone(), z, o)]
    }

    /// `[H, X±] = ±2 X±`, `[X+, X-] = H`.
    pub fn bracket(&self, o: &Sl2Element) -> Sl2Element {
        let two = rat(2, 1);
        Sl2Element { h: &self.xp * &o.xm - &self.xm * &o.xp, xp: &two * (&self.h * &o.xp - &self.xp * &o.h), xm: -&two * (&self.h * &o.xm - &self.xm * &o.h) }
    }

    pub fn add(&self, o: &Sl2Element) -> Sl2Element {
        Sl2Element { h: &self.h + &o.h, xp: &self.xp + &o.xp, xm: &self.xm + &o.xm }
    }

    pub fn is_zero(&self) -> bool {
        self.h.is_zero() && self.xp.is_zero() && self.xm.is_zero()
    }

    /// Image under the defining representation with `ρ(H) = diag(1, -1)`.
    pub fn rho(&self) -> TensorMatrix<BigRational> {
        rho_with(self, &rho_h())
    }
}

pub fn rho_h() -> TensorMatrix<BigRational> {
    TensorMatrix::from_fn(2, |i, j| {
        if i != j {
            rat(0, 1)
        } else if i == 0 {
            rat(1, 1)
        } else {
            rat(-1, 1)
        }
    })
}

/// The rotation generator `[[0, 1], [-1, 0]]`, a candidate for `ρ(H)` that breaks the brackets.
pub fn rotation_rho_h() -> TensorMatrix<BigRational> {
    TensorMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => rat(1, 1),
        (1, 0) => rat(-1, 1),
        _ => rat(0, 1),
    })
}

pub fn rho_with(x: &Sl2Element, rho_h: &TensorMatrix<BigRational>) -> TensorMatrix<BigRational> {
    let ep = TensorMatrix::from_fn(2, |i, j| if (i, j) == (0, 1) { rat(1, 1) } else { rat(0, 1) });
    let em = TensorMatrix::from_fn(2, |i, j| if (i, j) == (1, 0) { rat(1, 1) } else { rat(0, 1) });
    rho_h.scale(&x.h).add(&ep.scale(&x.xp)).add(&em.scale(&x.xm))
}

/// Jacobi sums over all basis triples; each must be zero.
pub fn sl2_jacobi_defects() -> Vec<Sl2Element> {
    let b = Sl2Element::basis();
    let mut out = Vec::new();
    for x in &b {
        for y in &b {
            for z in &b {
                out.push(x.bracket(&y.bracket(z)).add(&y.bracket(&z.bracket(x))).add(&z.bracket(&x.bracket(y))));
            }
        }
    }
    out
}

/// `[ρX, ρY] - ρ([X, Y])` over basis pairs for a given `ρ(H)`; labelled by pair.
pub fn rep_bracket_defects(rho_h: &TensorMatrix<BigRational>) -> Vec<(String, TensorMatrix<BigRational>)> {
    let b = Sl2Element::basis();
    let names = ["H", "X+", "X-"];
    let mut out = Vec::new();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let lhs = rho_with(&b[i], rho_h).commutator(&rho_with(&b[j], rho_h));
            let rhs = rho_with(&b[i].bracket(&b[j]), rho_h);
            out.push((format!("[{},{}]", names[i], names[j]), lhs.sub(&rhs)));
        }
    }
    out
}

/// `r = X+ ⊗ X- - X- ⊗ X+` in the defining representation.
pub fn r_hat() -> TensorMatrix<BigRational> {
    let [_, xp, xm] = Sl2Element::basis();
    let (p, m) = (xp.rho(), xm.rho());
    p.kron(&m).sub(&m.kron(&p))
}

/// Representation image of the split Casimir `H⊗H/2 + X+⊗X- + X-⊗X+`, equal to `σ - I/2`.
pub fn t_hat() -> TensorMatrix<BigRational> {
    let [h, xp, xm] = Sl2Element::basis();
    let (h, p, m) = (h.rho(), xp.rho(), xm.rho());
    h.kron(&h).scale(&rat(1, 2)).add(&p.kron(&m)).add(&m.kron(&p))
}

/// `[[r, r]] = [r12, r13] + [r12, r23] + [r13, r23]` in the triple tensor.
pub fn schouten_bracket_rep<C: Coeff>(r: &TensorMatrix<C>) -> Result<TensorMatrix<C>, PlError> {
    if r.dim() != 4 {
        return Err(PlError::Shape(format!("expected a 4x4 matrix, got {}", r.dim())));
    }
    if !r.flipped().add(r).is_zero() {
        return Err(PlError::NotAntisymmetric);
    }
    let (r12, r13, r23) = (r.leg(0, 1), r.leg(0, 2), r.leg(1, 2));
    Ok(r12.commutator(&r13).add(&r12.commutator(&r23)).add(&r13.commutator(&r23)))
}

/// `[X⊗1⊗1 + 1⊗X⊗1 + 1⊗1⊗X, m]` for `X` in the sl(2) basis.
pub fn ad3_defects(m: &TensorMatrix<BigRational>) -> Vec<TensorMatrix<BigRational>> {
    Sl2Element::basis().iter().map(|x| TensorMatrix::diagonal_action3(&x.rho()).commutator(m)).collect()
}

/// `ad ⊗ ad` commutators of a two-leg matrix with the basis.
pub fn ad2_defects(m: &TensorMatrix<BigRational>) -> Vec<TensorMatrix<BigRational>> {
    let i = TensorMatrix::identity(2);
    Sl2Element::basis()
        .iter()
        .map(|x| {
            let r = x.rho();
            r.kron(&i).add(&i.kron(&r)).commutator(m)
        })
        .collect()
}

/// The scalar `c` with `[[r, r]] = c [t13, t23]`, if one exists.
pub fn schouten_t_ratio(r: &TensorMatrix<BigRational>, t: &TensorMatrix<BigRational>) -> Option<BigRational> {
    let rr = schouten_bracket_rep(r).ok()?;
    let tt = t.leg(0, 2).commutator(&t.leg(1, 2));
    let k = tt.entries().iter().position(|x| !x.is_zero())?;
    let c = &rr.entries()[k] / &tt.entries()[k];
    rr.sub(&tt.scale(&c)).is_zero().then_some(c)
}

/// Generators of the coordinate ring: `T = [[a, b], [c, d]]`, `t_ij` at index `2i + j`.
pub const GENERATORS: [&str; 4] = ["a", "b", "c", "d"];

/// Commutative polynomial in `a, b, c, d` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SklyaninPoly {
    terms: BTreeMap<[u32; 4], BigRational>,
}

impl SklyaninPoly {
    pub fn gen(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        SklyaninPoly::monomial(e, BigRational::one())
    }

    pub fn monomial(e: [u32; 4], c: BigRational) -> Self {
        let mut p = SklyaninPoly::default();
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<[u32; 4], BigRational> {
        &self.terms
    }

    pub fn add_term(&mut self, e: [u32; 4], c: &BigRational) {
        let z = self.terms.entry(e).or_insert_with(BigRational::zero);
        *z += c;
        if z.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut p = SklyaninPoly::default();
        for (e, x) in &self.terms {
            p.add_term(*e, &(x * c));
        }
        p
    }

    /// `∂/∂x_i`.
    pub fn deriv(&self, i: usize) -> Self {
        let mut p = SklyaninPoly::default();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                p.add_term(f, &(c * BigRational::from_integer(e[i].into())));
            }
        }
        p
    }

    /// `ad - bc`.
    pub fn det() -> Self {
        SklyaninPoly::gen(0).mul(&SklyaninPoly::gen(3)).sub(&SklyaninPoly::gen(1).mul(&SklyaninPoly::gen(2)))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }
}

impl fmt::Display for SklyaninPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let word: Vec<&str> = (0..4).flat_map(|i| std::iter::repeat_n(GENERATORS[i], e[i] as usize)).collect();
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if word.is_empty() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", word.join("*"))?;
            } else {
                write!(f, "{}*{}", a, word.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Coeff for SklyaninPoly {
    fn zero() -> Self {
        SklyaninPoly::default()
    }
    fn one() -> Self {
        SklyaninPoly::monomial([0; 4], BigRational::one())
    }
    fn from_rational(r: &BigRational) -> Self {
        SklyaninPoly::monomial([0; 4], r.clone())
    }
    fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, c);
        }
        p
    }
    fn mul(&self, o: &Self) -> Self {
        let mut p = SklyaninPoly::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                p.add_term([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]], &(c1 * c2));
            }
        }
        p
    }
    fn neg(&self) -> Self {
        self.scale(&rat(-1, 1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn try_inv(&self) -> Option<Self> {
        match self.terms.iter().next() {
            Some((e, c)) if self.terms.len() == 1 && *e == [0; 4] => Some(SklyaninPoly::from_rational(&c.recip())),
            _ => None,
        }
    }
    fn magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
    }
    fn leading_negative(&self) -> bool {
        self.terms.values().next().is_some_and(|c| c.is_negative())
    }
}

/// `T` with generator entries.
pub fn coordinate_matrix() -> TensorMatrix<SklyaninPoly> {
    TensorMatrix::from_fn(2, |i, j| SklyaninPoly::gen(2 * i + j))
}

/// `{t_ij, t_kl}` read off `[r̂, T ⊗ T]` at row `(i,k)`, column `(j,l)`.
pub fn bracket_from_matrix(r: &TensorMatrix<BigRational>) -> [[SklyaninPoly; 4]; 4] {
    let t = coordinate_matrix();
    let m = TensorMatrix::<SklyaninPoly>::from_rational(r).commutator(&t.kron(&t));
    std::array::from_fn(|x| {
        std::array::from_fn(|y| {
            let (i, j, k, l) = (x / 2, x % 2, y / 2, y % 2);
            m.get(2 * i + k, 2 * j + l).clone()
        })
    })
}

/// `{x_i, x_j}` for the generators `a, b, c, d`.
pub fn generator_table() -> [[SklyaninPoly; 4]; 4] {
    let g = SklyaninPoly::gen;
    let mono = |e: [u32; 4], c: i64| SklyaninPoly::monomial(e, rat(c, 1));
    let upper = |i: usize, j: usize| match (i, j) {
        (0, 1) => g(0).mul(&g(1)),
        (0, 2) => g(0).mul(&g(2)),
        (0, 3) => mono([0, 1, 1, 0], 2),
        (1, 2) => SklyaninPoly::zero(),
        (1, 3) => g(1).mul(&g(3)),
        (2, 3) => g(2).mul(&g(3)),
        _ => SklyaninPoly::zero(),
    };
    std::array::from_fn(|i| std::array::from_fn(|j| if i < j { upper(i, j) } else { upper(j, i).neg() }))
}

/// Bracket of polynomials by bilinearity and Leibniz from the generator table.
pub fn sklyanin_bracket(f: &SklyaninPoly, g: &SklyaninPoly) -> SklyaninPoly {
    let table = generator_table();
    let df: Vec<SklyaninPoly> = (0..4).map(|i| f.deriv(i)).collect();
    let dg: Vec<SklyaninPoly> = (0..4).map(|i| g.deriv(i)).collect();
    let mut out = SklyaninPoly::zero();
    for i in 0..4 {
        if df[i].is_zero() {
            continue;
        }
        for j in 0..4 {
            if i != j && !dg[j].is_zero() && !table[i][j].is_zero() {
                out = out.add(&df[i].mul(&dg[j]).mul(&table[i][j]));
            }
        }
    }
    out
}

/// Cyclic sum `{{x,y},z} + {{y,z},x} + {{z,x},y}`.
pub fn sklyanin_jacobi(x: &SklyaninPoly, y: &SklyaninPoly, z: &SklyaninPoly) -> SklyaninPoly {
    let b = sklyanin_bracket;
    b(&b(x, y), z).add(&b(&b(y, z), x)).add(&b(&b(z, x), y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_values() {
        let [h, xp, xm] = Sl2Element::basis();
        assert_eq!(h.bracket(&xp), Sl2Element::new(rat(0, 1), rat(2, 1), rat(0, 1)));
        assert_eq!(h.bracket(&xm), Sl2Element::new(rat(0, 1), rat(0, 1), rat(-2, 1)));
        assert_eq!(xp.bracket(&xm), h);
    }

    #[test]
    fn r_hat_entries() {
        let r = r_hat();
        assert_eq!(*r.get(1, 2), rat(1, 1));
        assert_eq!(*r.get(2, 1), rat(-1, 1));
        assert_eq!(r.entries().iter().filter(|x| !x.is_zero()).count(), 2);
        assert_eq!(t_hat(), TensorMatrix::flip().sub(&TensorMatrix::identity(4).scale(&rat(1, 2))));
    }

    #[test]
    fn leibniz_on_products() {
        let a = SklyaninPoly::gen(0);
        let d = SklyaninPoly::gen(3);
        // {a^2, d} = 2a {a, d} = 4abc
        let want = SklyaninPoly::monomial([1, 1, 1, 0], rat(4, 1));
        assert_eq!(sklyanin_bracket(&a.mul(&a), &d), want);
        assert_eq!(want.to_string(), "4*a*b*c");
    }
}
