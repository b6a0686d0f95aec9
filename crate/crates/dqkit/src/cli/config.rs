use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// Keys accepted in a config file. Every key is optional; flags override them.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub hbar: Option<f64>,
    pub basis_size: Option<usize>,
    pub series_order: Option<usize>,
    pub tolerance_scale: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub degree: Option<u32>,
    pub cases: Option<usize>,
    pub kernel: Option<String>,
    pub mode: Option<String>,
    pub alpha: Option<f64>,
    pub tau: Option<f64>,
    pub grid_points: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {}", path.display(), e))
    }

    /// Fill unset keys from `base`.
    pub fn or(self, base: ConfigFile) -> ConfigFile {
        ConfigFile {
            hbar: self.hbar.or(base.hbar),
            basis_size: self.basis_size.or(base.basis_size),
            series_order: self.series_order.or(base.series_order),
            tolerance_scale: self.tolerance_scale.or(base.tolerance_scale),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            seed: self.seed.or(base.seed),
            degree: self.degree.or(base.degree),
            cases: self.cases.or(base.cases),
            kernel: self.kernel.or(base.kernel),
            mode: self.mode.or(base.mode),
            alpha: self.alpha.or(base.alpha),
            tau: self.tau.or(base.tau),
            grid_points: self.grid_points.or(base.grid_points),
        }
    }
}

/// Fully resolved parameters, echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub hbar: f64,
    pub basis_size: usize,
    pub series_order: usize,
    pub tolerance_scale: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub degree: u32,
    pub cases: usize,
    pub kernel: String,
    pub mode: String,
    pub alpha: f64,
    pub tau: f64,
    pub grid_points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hbar: 1.0,
            basis_size: 64,
            series_order: 4,
            tolerance_scale: 1.0,
            out: None,
            format: Format::Text,
            seed: 7,
            degree: 6,
            cases: 200,
            kernel: "all".into(),
            mode: "all".into(),
            alpha: 1.0,
            tau: 1.0,
            grid_points: 41,
        }
    }
}

pub const NH_KERNELS: [&str; 5] = ["default", "parity", "shift-pi", "reflect-pi", "all"];
pub const GALILEI_KERNELS: [&str; 3] = ["phi0", "sine", "all"];
pub const MODES: [&str; 3] = ["exact", "series", "all"];

impl RunConfig {
    pub fn resolve(f: ConfigFile) -> Result<Self, String> {
        let d = RunConfig::default();
        let c = RunConfig {
            hbar: f.hbar.unwrap_or(d.hbar),
            basis_size: f.basis_size.unwrap_or(d.basis_size),
            series_order: f.series_order.unwrap_or(d.series_order),
            tolerance_scale: f.tolerance_scale.unwrap_or(d.tolerance_scale),
            out: f.out.or(d.out),
            format: f.format.unwrap_or(d.format),
            seed: f.seed.unwrap_or(d.seed),
            degree: f.degree.unwrap_or(d.degree),
            cases: f.cases.unwrap_or(d.cases),
            kernel: f.kernel.unwrap_or(d.kernel),
            mode: f.mode.unwrap_or(d.mode),
            alpha: f.alpha.unwrap_or(d.alpha),
            tau: f.tau.unwrap_or(d.tau),
            grid_points: f.grid_points.unwrap_or(d.grid_points),
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), String> {
        let pos = |name: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(format!("{} must be positive, got {}", name, v)) };
        pos("hbar", self.hbar)?;
        pos("tolerance_scale", self.tolerance_scale)?;
        pos("alpha", self.alpha)?;
        pos("tau", self.tau)?;
        if self.basis_size < 8 {
            return Err(format!("basis_size must be at least 8, got {}", self.basis_size));
        }
        if self.series_order < 3 {
            return Err(format!("series_order must be at least 3, got {}", self.series_order));
        }
        if self.degree == 0 || self.cases == 0 {
            return Err("degree and cases must be positive".into());
        }
        if self.grid_points < 2 {
            return Err("grid_points must be at least 2".into());
        }
        let all_kernels: Vec<&str> = NH_KERNELS.iter().chain(GALILEI_KERNELS.iter()).copied().collect();
        if !all_kernels.contains(&self.kernel.as_str()) {
            return Err(format!("unknown kernel '{}', expected one of {:?}", self.kernel, all_kernels));
        }
        if !MODES.contains(&self.mode.as_str()) {
            return Err(format!("unknown mode '{}', expected one of {:?}", self.mode, MODES));
        }
        Ok(())
    }
}
