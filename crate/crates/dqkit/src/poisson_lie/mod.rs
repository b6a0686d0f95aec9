//! sl(2) and the Poisson-Lie group SL(2): the standard r-matrix and its Schouten bracket,
//! the Sklyanin bracket on matrix coordinates, `R_q` built from the twist `F̂`, and the
//! SL_q(2) rewriting engine with its semiclassical limit.
//!
//! Exact arithmetic runs over `Q`, over `Q(q^(1/2))` (extended by `u = sqrt(2/(q+q^-1))`
//! where `F̂` needs it), or over truncated `h`-series with `q = e^h`.

mod classical;
mod coeff;
mod qpoly;
mod quantum;
mod tensor;

pub use classical::*;
pub use coeff::{rat, Coeff, HSeries, QuadExt, RatFunc, UPoly};
pub use qpoly::*;
pub use quantum::*;
pub use tensor::{TensorMatrix, Witness};

use num_rational::BigRational;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlError {
    #[error("r-matrix is not antisymmetric under the flip")]
    NotAntisymmetric,
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("series truncation order {order} too low, need at least {needed}")]
    TruncationTooLow { order: usize, needed: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// What a check is supposed to find.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Zero,
    Nonzero,
}

/// One exact or series check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlReport {
    pub check_name: String,
    pub mode: String,
    pub residual: f64,
    pub expect: Expect,
    pub witness: Option<String>,
}

impl PlReport {
    fn new(name: &str, mode: &str, residual: f64, expect: Expect, witness: Option<String>) -> Self {
        PlReport { check_name: name.into(), mode: mode.into(), residual, expect, witness }
    }

    fn matrix<C: Coeff>(name: &str, mode: &str, m: &TensorMatrix<C>, expect: Expect) -> Self {
        let w = m.witness().map(|w| format!("({},{}) = {}", w.row, w.col, w.value));
        PlReport::new(name, mode, m.max_magnitude(), expect, w)
    }

    fn many<C: Coeff>(name: &str, mode: &str, ms: &[TensorMatrix<C>], expect: Expect) -> Self {
        let r = ms.iter().map(|m| m.max_magnitude()).fold(0.0, f64::max);
        let w = ms.iter().enumerate().find_map(|(k, m)| m.witness().map(|w| format!("#{} ({},{}) = {}", k, w.row, w.col, w.value)));
        PlReport::new(name, mode, r, expect, w)
    }

    fn polys<K: Coeff>(name: &str, mode: &str, ps: &[QPoly<K>], expect: Expect) -> Self {
        let r = ps.iter().map(|p| p.magnitude()).fold(0.0, f64::max);
        let w = ps.iter().enumerate().find(|(_, p)| !p.is_zero()).map(|(k, p)| format!("entry {}: {}", k, p));
        PlReport::new(name, mode, r, expect, w)
    }

    /// Exact checks pass on an exact zero (or an exact nonzero, for negative controls).
    pub fn passed(&self) -> bool {
        match self.expect {
            Expect::Zero => self.residual == 0.0,
            Expect::Nonzero => self.residual > 0.0,
        }
    }
}

fn count_nonzero<C: Coeff>(table: &[[C; 4]; 4], other: &[[C; 4]; 4]) -> (f64, Option<String>) {
    let mut worst = 0.0f64;
    let mut wit = None;
    for i in 0..4 {
        for j in 0..4 {
            let d = table[i][j].sub(&other[i][j]);
            if !d.is_zero() {
                worst = worst.max(d.magnitude());
                wit.get_or_insert_with(|| format!("{{{},{}}}: {} vs {}", GENERATORS[i], GENERATORS[j], table[i][j], other[i][j]));
            }
        }
    }
    (worst, wit)
}

/// sl(2), the r-matrix and the Sklyanin bracket.
pub fn classical_checks() -> Vec<PlReport> {
    let mut out = Vec::new();
    let jac = sl2_jacobi_defects();
    let bad = jac.iter().filter(|x| !x.is_zero()).count();
    out.push(PlReport::new("sl2-jacobi", "exact", bad as f64, Expect::Zero, None));
    let rep: Vec<_> = rep_bracket_defects(&rho_h()).into_iter().map(|p| p.1).collect();
    out.push(PlReport::many("rep-brackets-diag-rho-h", "exact", &rep, Expect::Zero));
    let rot: Vec<_> = rep_bracket_defects(&rotation_rho_h()).into_iter().map(|p| p.1).collect();
    out.push(PlReport::many("rep-brackets-rotation-rho-h", "exact", &rot, Expect::Nonzero));

    let r = r_hat();
    out.push(PlReport::matrix("r-antisymmetric", "exact", &r.flipped().add(&r), Expect::Zero));
    let rr = schouten_bracket_rep(&r).expect("r is antisymmetric");
    out.push(PlReport::matrix("schouten-nonzero", "exact", &rr, Expect::Nonzero));
    out.push(PlReport::many("schouten-ad3-invariant", "exact", &ad3_defects(&rr), Expect::Zero));
    let t = t_hat();
    out.push(PlReport::many("t-ad2-invariant", "exact", &ad2_defects(&t), Expect::Zero));
    let ratio = schouten_t_ratio(&r, &t);
    out.push(PlReport::new(
        "schouten-equals-minus-t13-t23",
        "exact",
        if ratio == Some(rat(-1, 1)) { 0.0 } else { 1.0 },
        Expect::Zero,
        ratio.map(|c| format!("[[r,r]] = {} [t13,t23]", c)),
    ));

    let (res, wit) = count_nonzero(&bracket_from_matrix(&r), &generator_table());
    out.push(PlReport::new("sklyanin-table-from-matrix", "exact", res, Expect::Zero, wit));
    let g: Vec<SklyaninPoly> = (0..4).map(SklyaninPoly::gen).collect();
    let mut jr = 0.0f64;
    let mut jw = None;
    for x in &g {
        for y in &g {
            for z in &g {
                let j = sklyanin_jacobi(x, y, z);
                if !Coeff::is_zero(&j) {
                    jr = jr.max(j.magnitude());
                    jw.get_or_insert_with(|| format!("({}, {}, {}) -> {}", x, y, z, j));
                }
            }
        }
    }
    out.push(PlReport::new("sklyanin-jacobi", "exact", jr, Expect::Zero, jw));
    let det = SklyaninPoly::det();
    let cas: Vec<SklyaninPoly> = g.iter().map(|x| sklyanin_bracket(&det, x)).collect();
    let w = cas.iter().zip(GENERATORS).find(|(p, _)| !Coeff::is_zero(*p)).map(|(p, n)| format!("{{ad-bc, {}}} = {}", n, p));
    out.push(PlReport::new("det-casimir", "exact", cas.iter().map(|p| p.magnitude()).fold(0.0, f64::max), Expect::Zero, w));
    out
}

/// `F̂`, `R_q`, QYBE, unitarity, RTT, the quantum determinant and rewrite confluence.
pub fn quantum_checks(series_order: usize) -> Result<Vec<PlReport>, PlError> {
    let mut out = Vec::new();
    let rq = rq_symbolic()?;
    let explicit = explicit_rq(&RatFunc::q());
    out.push(PlReport::matrix("build-rq-equals-explicit", "exact", &rq.sub(&explicit), Expect::Zero));
    out.push(PlReport::matrix("qybe", "exact", &qybe_defect(&rq), Expect::Zero));
    out.push(PlReport::matrix("unitarity-violated", "exact", &unitarity_defect(&rq), Expect::Nonzero));
    let rel = Relations::symbolic();
    out.push(PlReport::polys("rtt", "exact", &rtt_residual(&rq, &rel), Expect::Zero));
    out.push(PlReport::polys("rtt-identity-control", "exact", &rtt_residual(&TensorMatrix::identity(4), &rel), Expect::Nonzero));
    let one = Relations::new(rat(1, 1))?;
    out.push(PlReport::polys("rtt-q1", "exact", &rtt_residual(&TensorMatrix::identity(4), &one), Expect::Zero));
    out.push(PlReport::polys("qdet-central", "exact", &quantum_determinant_defects(&rel), Expect::Zero));
    let bad = confluence_failures(4, &rel);
    out.push(PlReport::new("rewrite-confluence", "exact", bad.len() as f64, Expect::Zero, bad.first().map(|w| word_string(w))));

    let s = Series::new(series_order)?;
    let f = build_fhat(&s);
    let r = r_hat();
    out.push(PlReport::matrix("fhat-constant-term", "series", &series_coefficient(&f, 0).sub(&TensorMatrix::identity(4)), Expect::Zero));
    out.push(PlReport::matrix("fhat-linear-term", "series", &series_coefficient(&f, 1).add(&r.scale(&rat(1, 2))), Expect::Zero));
    let rs = build_rq(&s, &f)?;
    out.push(PlReport::matrix("build-rq-series", "series", &rs.sub(&explicit_rq(&s.q())), Expect::Zero));
    let first: TensorMatrix<BigRational> = TensorMatrix::flip().sub(&r);
    out.push(PlReport::matrix("rq-linear-term", "series", &series_coefficient(&rs, 1).sub(&first), Expect::Zero));
    Ok(out)
}

/// `h^1` coefficient of the star commutator against the Sklyanin bracket, for all generator pairs.
pub fn semiclassical_checks(series_order: usize) -> Result<Vec<PlReport>, PlError> {
    let rel = Relations::series(series_order)?;
    let mut out = Vec::new();
    for x in 0..4u8 {
        for y in 0..4u8 {
            let (got, want) = semiclassical_limit(x, y, &rel)?;
            let d = got.sub(&want);
            let name = format!("semiclassical-{}{}", GENERATORS[x as usize], GENERATORS[y as usize]);
            let w = (!Coeff::is_zero(&d)).then(|| format!("h^1 term {} vs bracket {}", got, want));
            out.push(PlReport::new(&name, "series", d.magnitude(), Expect::Zero, w));
        }
    }
    Ok(out)
}
