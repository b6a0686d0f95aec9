use serde::{Deserialize, Serialize};

/// One axiom check, as written to `--out` by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub kernel_id: String,
    pub axiom: String,
    pub residual: f64,
    pub resolution: String,
    pub refined_residual: Option<f64>,
}

impl AxiomReport {
    pub fn new(kernel_id: &str, axiom: &str, residual: f64, resolution: impl Into<String>) -> Self {
        AxiomReport { kernel_id: kernel_id.into(), axiom: axiom.into(), residual, resolution: resolution.into(), refined_residual: None }
    }

    pub fn with_refined(mut self, r: f64) -> Self {
        self.refined_residual = Some(r);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Outcome of a quadrature check at two resolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    pub residual: f64,
    pub refined_residual: f64,
    /// Relative change of the computed quantity between the two resolutions.
    pub change: f64,
}

impl Refinement {
    pub fn converged(&self) -> bool {
        self.change <= 0.1
    }

    pub fn decreasing(&self) -> bool {
        self.refined_residual < self.residual
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_fields() {
        let r = AxiomReport::new("nh-default", "traciality", 0.01, "J=20").with_refined(0.005);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["kernel_id", "axiom", "residual", "resolution", "refined_residual"] {
            assert!(v.get(k).is_some(), "{}", k);
        }
        let back: AxiomReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
