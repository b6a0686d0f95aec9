use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::WeylError;

/// Uniform grid on `[q_min, q_max] x [p_min, p_max]`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nq: usize,
    pub np: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, n: usize) -> Self {
        GridSpec { q_min: -half_width, q_max: half_width, p_min: -half_width, p_max: half_width, nq: n, np: n }
    }

    /// Square grid with the given spacing (rounded so both endpoints lie on the grid).
    pub fn with_step(half_width: f64, step: f64) -> Self {
        let n = (2.0 * half_width / step).round() as usize + 1;
        GridSpec::square(half_width, n)
    }

    pub fn dq(&self) -> f64 {
        if self.nq > 1 {
            (self.q_max - self.q_min) / (self.nq - 1) as f64
        } else {
            0.0
        }
    }

    pub fn dp(&self) -> f64 {
        if self.np > 1 {
            (self.p_max - self.p_min) / (self.np - 1) as f64
        } else {
            0.0
        }
    }

    pub fn q(&self, i: usize) -> f64 {
        self.q_min + i as f64 * self.dq()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major, p fastest.
    pub fn index(&self, iq: usize, ip: usize) -> usize {
        iq * self.np + ip
    }

    pub fn validate(&self) -> Result<(), WeylError> {
        let ok = self.nq >= 1
            && self.np >= 1
            && self.q_max >= self.q_min
            && self.p_max >= self.p_min
            && [self.q_min, self.q_max, self.p_min, self.p_max].iter().all(|x| x.is_finite());
        if ok {
            Ok(())
        } else {
            Err(WeylError::BadGrid(format!("{:?}", self)))
        }
    }
}

/// Complex samples on a [`GridSpec`], stored row-major with p fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    schema: String,
    hbar: f64,
    spec: GridSpec,
    layout: String,
    quantity: String,
}

impl PhaseGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        PhaseGrid { spec, values: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(spec.len());
        for iq in 0..spec.nq {
            for ip in 0..spec.np {
                values.push(f(spec.q(iq), spec.p(ip)));
            }
        }
        PhaseGrid { spec, values }
    }

    pub fn at(&self, iq: usize, ip: usize) -> Complex64 {
        self.values[self.spec.index(iq, ip)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Largest modulus on the outer ring of the grid.
    pub fn boundary_max(&self) -> f64 {
        let s = &self.spec;
        let mut m = 0.0f64;
        for iq in 0..s.nq {
            for ip in 0..s.np {
                if iq == 0 || ip == 0 || iq + 1 == s.nq || ip + 1 == s.np {
                    m = m.max(self.at(iq, ip).norm());
                }
            }
        }
        m
    }

    /// Riemann sum `sum f dq dp` (equals the trapezoid rule for boundary-decaying data).
    pub fn integrate(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * (self.spec.dq() * self.spec.dp())
    }

    /// Cosine similarity of the two sample vectors.
    pub fn cosine_similarity(&self, o: &PhaseGrid) -> f64 {
        let dot: Complex64 = self.values.iter().zip(&o.values).map(|(a, b)| a.conj() * b).sum();
        let na: f64 = self.values.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let nb: f64 = o.values.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        dot.norm() / (na * nb)
    }

    /// CSV with a `#` header carrying ranges, resolutions and hbar, then `q,p,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut w: W, hbar: f64) -> std::io::Result<()> {
        let s = &self.spec;
        writeln!(
            w,
            "# q_min={} q_max={} p_min={} p_max={} nq={} np={} hbar={} layout=row-major-p-fastest",
            s.q_min, s.q_max, s.p_min, s.p_max, s.nq, s.np, hbar
        )?;
        writeln!(w, "q,p,re,im")?;
        for iq in 0..s.nq {
            for ip in 0..s.np {
                let v = self.at(iq, ip);
                writeln!(w, "{:e},{:e},{:e},{:e}", s.q(iq), s.p(ip), v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Parse the output of [`PhaseGrid::write_csv`]; returns the grid and hbar.
    pub fn read_csv<R: BufRead>(r: R) -> Result<(PhaseGrid, f64), WeylError> {
        let mut lines = r.lines();
        let bad = |m: &str| WeylError::Io(m.to_string());
        let header = lines.next().ok_or_else(|| bad("empty csv"))?.map_err(|e| bad(&e.to_string()))?;
        let get = |key: &str| -> Result<f64, WeylError> {
            header.split_whitespace().find_map(|kv| kv.strip_prefix(&format!("{}=", key))).ok_or_else(|| bad(key))?.parse::<f64>().map_err(|_| bad(key))
        };
        let spec = GridSpec {
            q_min: get("q_min")?,
            q_max: get("q_max")?,
            p_min: get("p_min")?,
            p_max: get("p_max")?,
            nq: get("nq")? as usize,
            np: get("np")? as usize,
        };
        let hbar = get("hbar")?;
        let cols = lines.next().ok_or_else(|| bad("missing column line"))?.map_err(|e| bad(&e.to_string()))?;
        if cols.trim() != "q,p,re,im" {
            return Err(bad("unexpected columns"));
        }
        let mut values = Vec::with_capacity(spec.len());
        for line in lines {
            let line = line.map_err(|e| bad(&e.to_string()))?;
            let f: Vec<f64> = line.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad("bad row"))?;
            if f.len() != 4 {
                return Err(bad("bad row"));
            }
            values.push(Complex64::new(f[2], f[3]));
        }
        if values.len() != spec.len() {
            return Err(bad("row count does not match header"));
        }
        Ok((PhaseGrid { spec, values }, hbar))
    }

    /// JSON metadata sidecar accompanying the CSV.
    pub fn sidecar_json(&self, hbar: f64, quantity: &str) -> String {
        serde_json::to_string_pretty(&Sidecar {
            schema: "dqkit.phase-grid.v1".into(),
            hbar,
            spec: self.spec,
            layout: "row-major-p-fastest".into(),
            quantity: quantity.into(),
        })
        .expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_layout() {
        let spec = GridSpec { q_min: -1.0, q_max: 1.0, p_min: 0.0, p_max: 2.0, nq: 3, np: 4 };
        let g = PhaseGrid::from_fn(spec, |q, p| Complex64::new(q, p * p));
        let mut buf = Vec::new();
        g.write_csv(&mut buf, 0.5).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        // second data row advances p first
        let row2: Vec<&str> = text.lines().nth(3).unwrap().split(',').collect();
        assert_eq!(row2[0].parse::<f64>().unwrap(), -1.0);
        assert!((row2[1].parse::<f64>().unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let (h, hbar) = PhaseGrid::read_csv(&buf[..]).unwrap();
        assert_eq!(hbar, 0.5);
        assert_eq!(h, g);
    }

    #[test]
    fn step_constructor() {
        let s = GridSpec::with_step(2.0, 0.5);
        assert_eq!(s.nq, 9);
        assert!((s.dq() - 0.5).abs() < 1e-15);
    }
}
