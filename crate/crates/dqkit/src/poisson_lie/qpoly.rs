use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::classical::{sklyanin_bracket, SklyaninPoly, GENERATORS};
use super::coeff::{Coeff, HSeries, RatFunc};
use super::quantum::{Deformation, Series};
use super::tensor::TensorMatrix;
use super::PlError;

/// Word in the letters `a < b < c < d`, stored as `0..4`.
pub type Word = Vec<u8>;

/// The six SL_q(2) relations, oriented so every rewrite lowers the degree-lex order:
/// `ba -> q^-1 ab`, `ca -> q^-1 ac`, `cb -> bc`, `db -> q^-1 bd`, `dc -> q^-1 cd`,
/// `da -> ad - (q - q^-1) bc`.
#[derive(Clone, Debug)]
pub struct Relations<K> {
    q: K,
    q_inv: K,
}

impl<K: Coeff> Relations<K> {
    pub fn new(q: K) -> Result<Self, PlError> {
        let q_inv = q.try_inv().ok_or_else(|| PlError::Singular(format!("q = {} is not invertible", q)))?;
        Ok(Relations { q, q_inv })
    }

    pub fn q(&self) -> &K {
        &self.q
    }

    /// Right-hand side of the rule for the descent `x y`, `x > y`.
    fn rewrite(&self, x: u8, y: u8) -> Vec<(K, [u8; 2])> {
        match (x, y) {
            (1, 0) => vec![(self.q_inv.clone(), [0, 1])],
            (2, 0) => vec![(self.q_inv.clone(), [0, 2])],
            (2, 1) => vec![(K::one(), [1, 2])],
            (3, 0) => vec![(K::one(), [0, 3]), (self.q_inv.sub(&self.q), [1, 2])],
            (3, 1) => vec![(self.q_inv.clone(), [1, 3])],
            (3, 2) => vec![(self.q_inv.clone(), [2, 3])],
            _ => unreachable!("not a descent"),
        }
    }

    /// Apply the rule at position `p` of `w` (which must be a descent).
    fn rewrite_at(&self, w: &[u8], p: usize) -> Vec<(K, Word)> {
        self.rewrite(w[p], w[p + 1])
            .into_iter()
            .map(|(c, pair)| {
                let mut v = w.to_vec();
                v[p] = pair[0];
                v[p + 1] = pair[1];
                (c, v)
            })
            .collect()
    }
}

impl Relations<RatFunc> {
    /// Generic `q`, as a rational function.
    pub fn symbolic() -> Self {
        Relations::new(RatFunc::q()).expect("q is a unit")
    }
}

impl Relations<HSeries> {
    /// `q = e^h` modulo `h^order`.
    pub fn series(order: usize) -> Result<Self, PlError> {
        Relations::new(Series::new(order)?.q())
    }
}

/// Noncommutative polynomial, always kept in normal form: ordered monomials `a^i b^j c^k d^l`.
#[derive(Clone, Debug, PartialEq)]
pub struct QPoly<K> {
    terms: BTreeMap<Word, K>,
}

impl<K: Coeff> QPoly<K> {
    pub fn zero() -> Self {
        QPoly { terms: BTreeMap::new() }
    }

    pub fn terms(&self) -> &BTreeMap<Word, K> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut t = self.terms.clone();
        for (w, c) in &o.terms {
            add_into(&mut t, w.clone(), c);
        }
        QPoly { terms: t }
    }

    pub fn scale(&self, c: &K) -> Self {
        let mut t = BTreeMap::new();
        for (w, x) in &self.terms {
            add_into(&mut t, w.clone(), &x.mul(c));
        }
        QPoly { terms: t }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&K::one().neg()))
    }

    pub fn mul(&self, o: &Self, rel: &Relations<K>) -> Self {
        let mut raw = Vec::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                raw.push((c1.mul(c2), w));
            }
        }
        nc_normalize_terms(raw, rel)
    }

    /// Largest coefficient height.
    pub fn magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Terms in degree-lex order.
    pub fn sorted_terms(&self) -> Vec<(&Word, &K)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        v
    }
}

fn add_into<K: Coeff>(t: &mut BTreeMap<Word, K>, w: Word, c: &K) {
    if c.is_zero() {
        return;
    }
    match t.get_mut(&w) {
        Some(x) => {
            *x = x.add(c);
            if x.is_zero() {
                t.remove(&w);
            }
        }
        None => {
            t.insert(w, c.clone());
        }
    }
}

pub fn word_string(w: &[u8]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|&x| GENERATORS[x as usize]).collect::<Vec<_>>().join("*")
}

/// Parses `d*a`, `dab` or `d a` into a word.
pub fn parse_word(s: &str) -> Result<Word, PlError> {
    let mut w = Vec::new();
    for (i, ch) in s.chars().enumerate() {
        match ch {
            'a' => w.push(0),
            'b' => w.push(1),
            'c' => w.push(2),
            'd' => w.push(3),
            '*' | ' ' => {}
            _ => return Err(PlError::Parse { pos: i, msg: format!("unexpected '{}' in word", ch) }),
        }
    }
    if w.is_empty() {
        return Err(PlError::Parse { pos: 0, msg: "empty word".into() });
    }
    Ok(w)
}

impl<K: Coeff> fmt::Display for QPoly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in terms.into_iter().enumerate() {
            let neg = c.leading_negative();
            let a = if neg { c.neg() } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let ws = word_string(w);
            if a.is_one() {
                write!(f, "{}", ws)?;
                continue;
            }
            let cs = a.to_string();
            let cs = if cs.contains(' ') || cs.starts_with('-') { format!("({})", cs) } else { cs };
            if w.is_empty() {
                write!(f, "{}", cs)?;
            } else {
                write!(f, "{}*{}", cs, ws)?;
            }
        }
        Ok(())
    }
}

fn first_descent(w: &[u8]) -> Option<usize> {
    w.windows(2).position(|p| p[0] > p[1])
}

/// Normal form of a linear combination of words; rewrites the leftmost descent first.
pub fn nc_normalize_terms<K: Coeff>(terms: Vec<(K, Word)>, rel: &Relations<K>) -> QPoly<K> {
    // every rule lowers the degree-lex order, so draining the largest pending word merges all contributions to it
    let mut pending: BTreeMap<(usize, Word), K> = BTreeMap::new();
    let push = |pending: &mut BTreeMap<(usize, Word), K>, c: K, w: Word| {
        if c.is_zero() {
            return;
        }
        let key = (w.len(), w);
        match pending.get_mut(&key) {
            Some(x) => *x = x.add(&c),
            None => {
                pending.insert(key, c);
            }
        }
    };
    for (c, w) in terms {
        push(&mut pending, c, w);
    }
    let mut out = BTreeMap::new();
    while let Some(((_, w), c)) = pending.pop_last() {
        if c.is_zero() {
            continue;
        }
        match first_descent(&w) {
            None => add_into(&mut out, w, &c),
            Some(p) => {
                for (k, v) in rel.rewrite_at(&w, p) {
                    push(&mut pending, c.mul(&k), v);
                }
            }
        }
    }
    QPoly { terms: out }
}

pub fn nc_normalize<K: Coeff>(w: &[u8], rel: &Relations<K>) -> QPoly<K> {
    nc_normalize_terms(vec![(K::one(), w.to_vec())], rel)
}

/// Words of length `2..=max_len` where rewriting some descent first leads to a different normal form.
pub fn confluence_failures<K: Coeff>(max_len: usize, rel: &Relations<K>) -> Vec<Word> {
    let mut words: Vec<Word> = Vec::new();
    for len in 2..=max_len {
        for code in 0..4usize.pow(len as u32) {
            words.push((0..len).map(|i| ((code >> (2 * (len - 1 - i))) & 3) as u8).collect());
        }
    }
    words
        .into_par_iter()
        .filter(|w| {
            let nf = nc_normalize(w, rel);
            (0..w.len() - 1).filter(|&p| w[p] > w[p + 1]).any(|p| nc_normalize_terms(rel.rewrite_at(w, p), rel) != nf)
        })
        .collect()
}

/// The 16 entries of `R T1 T2 - T2 T1 R`, each normalized; row index `(i,k)`, column `(j,l)`.
pub fn rtt_residual<K: Coeff>(r: &TensorMatrix<K>, rel: &Relations<K>) -> Vec<QPoly<K>> {
    assert_eq!(r.dim(), 4);
    // (T1 T2)_{(ik),(jl)} = t_ij t_kl and (T2 T1)_{(ik),(jl)} = t_kl t_ij
    let t12 = |x: usize, y: usize| -> Word { vec![(2 * (x / 2) + y / 2) as u8, (2 * (x % 2) + y % 2) as u8] };
    let t21 = |x: usize, y: usize| -> Word { vec![(2 * (x % 2) + y % 2) as u8, (2 * (x / 2) + y / 2) as u8] };
    (0..16)
        .into_par_iter()
        .map(|e| {
            let (x, y) = (e / 4, e % 4);
            let mut raw = Vec::new();
            for z in 0..4 {
                let a = r.get(x, z);
                if !a.is_zero() {
                    raw.push((a.clone(), t12(z, y)));
                }
                let b = r.get(z, y);
                if !b.is_zero() {
                    raw.push((b.neg(), t21(x, z)));
                }
            }
            nc_normalize_terms(raw, rel)
        })
        .collect()
}

/// `ad - q bc`.
pub fn quantum_determinant<K: Coeff>(rel: &Relations<K>) -> QPoly<K> {
    nc_normalize_terms(vec![(K::one(), vec![0, 3]), (rel.q.neg(), vec![1, 2])], rel)
}

/// `D x - x D` for each generator `x`.
pub fn quantum_determinant_defects<K: Coeff>(rel: &Relations<K>) -> Vec<QPoly<K>> {
    let d = quantum_determinant(rel);
    (0..4u8)
        .map(|x| {
            let g = nc_normalize(&[x], rel);
            d.mul(&g, rel).sub(&g.mul(&d, rel))
        })
        .collect()
}

pub fn quantum_determinant_central<K: Coeff>(rel: &Relations<K>) -> bool {
    quantum_determinant_defects(rel).iter().all(|p| p.is_zero())
}

/// Commutative image of the `h^k` coefficient.
pub fn abelianize(p: &QPoly<HSeries>, k: usize) -> SklyaninPoly {
    let mut out = SklyaninPoly::default();
    for (w, c) in p.terms() {
        let mut e = [0u32; 4];
        for &x in w {
            e[x as usize] += 1;
        }
        out.add_term(e, &c.coeff(k));
    }
    out
}

/// `h^1` coefficient of `f g - g f`, abelianized. The `h^0` part must vanish.
pub fn star_commutator_h1(f: &QPoly<HSeries>, g: &QPoly<HSeries>, rel: &Relations<HSeries>) -> Result<SklyaninPoly, PlError> {
    let order = rel.q().order().unwrap_or(usize::MAX);
    if order < 3 {
        return Err(PlError::TruncationTooLow { order, needed: 3 });
    }
    let c = f.mul(g, rel).sub(&g.mul(f, rel));
    let zeroth = abelianize(&c, 0);
    if !Coeff::is_zero(&zeroth) {
        return Err(PlError::Shape(format!("commutator has classical part {}", zeroth)));
    }
    Ok(abelianize(&c, 1))
}

/// `(h^1 coefficient of [x, y], {x, y})` for generators `x, y`.
pub fn semiclassical_limit(x: u8, y: u8, rel: &Relations<HSeries>) -> Result<(SklyaninPoly, SklyaninPoly), PlError> {
    let (f, g) = (nc_normalize(&[x], rel), nc_normalize(&[y], rel));
    let got = star_commutator_h1(&f, &g, rel)?;
    Ok((got, sklyanin_bracket(&SklyaninPoly::gen(x as usize), &SklyaninPoly::gen(y as usize))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_rewrites_print() {
        let rel = Relations::symbolic();
        assert_eq!(nc_normalize(&parse_word("d*a").unwrap(), &rel).to_string(), "a*d - (q - q^-1)*b*c");
        assert_eq!(nc_normalize(&parse_word("ba").unwrap(), &rel).to_string(), "q^-1*a*b");
        assert_eq!(nc_normalize(&parse_word("cb").unwrap(), &rel).to_string(), "b*c");
        assert!(parse_word("dx").is_err());
    }

    #[test]
    fn normal_words_are_fixed() {
        let rel = Relations::symbolic();
        let w = vec![0, 0, 1, 2, 3];
        assert_eq!(nc_normalize(&w, &rel).to_string(), "a*a*b*c*d");
    }
}
