use std::fmt::Write as _;

use serde::Serialize;

use super::config::RunConfig;

pub const REPORT_SCHEMA: &str = "dqkit.report.v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Negative control that failed, as it should.
    Xfail,
    /// Negative control that unexpectedly passed.
    Xpass,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub suite: String,
    pub name: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    pub expect_pass: bool,
    /// The property being checked, in words.
    pub anchor: String,
    /// Residuals at successive resolutions, when a refinement was run.
    pub refinement: Vec<f64>,
    pub note: Option<String>,
}

impl Record {
    pub fn new(suite: &str, name: &str, residual: f64, tolerance: f64, anchor: &str) -> Self {
        Record {
            suite: suite.into(),
            name: name.into(),
            status: Status::Pass,
            residual,
            tolerance,
            expect_pass: true,
            anchor: anchor.into(),
            refinement: vec![],
            note: None,
        }
        .settle()
    }

    /// Mark as a negative control.
    pub fn expect_fail(mut self) -> Self {
        self.expect_pass = false;
        self.settle()
    }

    pub fn with_refinement(mut self, r: Vec<f64>) -> Self {
        self.refinement = r;
        self
    }

    pub fn with_note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }

    fn settle(mut self) -> Self {
        // NaN never passes
        let within = self.residual <= self.tolerance;
        self.status = match (within, self.expect_pass) {
            (true, true) => Status::Pass,
            (false, true) => Status::Fail,
            (false, false) => Status::Xfail,
            (true, false) => Status::Xpass,
        };
        self
    }

    pub fn ok(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Xfail)
    }

    /// Record for a computation that errored out.
    pub fn error(suite: &str, name: &str, anchor: &str, err: impl std::fmt::Display) -> Self {
        Record::new(suite, name, f64::INFINITY, 0.0, anchor).with_note(format!("error: {}", err))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: String,
    pub suite: String,
    pub passed: bool,
    pub records: Vec<Record>,
    pub wall_clock_s: f64,
    pub config: RunConfig,
}

impl Report {
    pub fn new(suite: &str, records: Vec<Record>, wall_clock_s: f64, config: RunConfig) -> Self {
        Report { schema: REPORT_SCHEMA.into(), suite: suite.into(), passed: records.iter().all(|r| r.ok()), records, wall_clock_s, config }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let tag = match r.status {
                Status::Pass => "PASS ",
                Status::Fail => "FAIL ",
                Status::Xfail => "XFAIL",
                Status::Xpass => "XPASS",
            };
            let _ = write!(s, "{} {}/{} residual={:.3e} tol={:.1e}", tag, r.suite, r.name, r.residual, r.tolerance);
            if !r.refinement.is_empty() {
                let t: Vec<String> = r.refinement.iter().map(|x| format!("{:.3e}", x)).collect();
                let _ = write!(s, " refinement=[{}]", t.join(", "));
            }
            if let Some(n) = &r.note {
                let _ = write!(s, " ({})", n);
            }
            s.push('\n');
        }
        let bad = self.records.iter().filter(|r| !r.ok()).count();
        let _ = writeln!(s, "{}: {} checks, {} failed, {:.2}s", self.suite, self.records.len(), bad, self.wall_clock_s);
        s
    }
}
