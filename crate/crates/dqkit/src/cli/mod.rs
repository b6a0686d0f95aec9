//! Command-line front end: `verify <suite>` and `eval <expr>`.
//!
//! Exit codes are 0 when everything passes, 1 when a check fails, 2 for usage,
//! config and parse errors.

pub mod config;
pub mod expr;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::phase_poly::{moyal_bracket, star_poly, Convention, HbarSeries, PhasePoly};
use crate::poisson_lie::{nc_normalize, parse_word, PlError, Relations};
use crate::weyl_numeric::{trusted_half_width, weyl_inverse, weyl_map_poly, wigner_from_state, GridSpec, HermiteBasis, HermiteState, PhaseGrid};
pub use config::{ConfigFile, Format, RunConfig};
use expr::ParseError;
pub use report::{Record, Report, Status};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "dqkit", version, about = "Deformation quantization verification suites and evaluator")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalOpts {
    /// JSON config file; flags override its keys
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for reports and CSV grids
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[arg(long, global = true)]
    basis_size: Option<usize>,
    #[arg(long, global = true)]
    series_order: Option<usize>,
    /// Multiplies every numeric tolerance
    #[arg(long, global = true)]
    tolerance_scale: Option<f64>,
    /// Points per axis of written grids
    #[arg(long, global = true)]
    grid_points: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite: star, weyl-numeric, sw-galilei, sw-nh, sl2q or all
    Verify {
        suite: String,
        /// sl2q arithmetic: exact, series or all
        #[arg(long)]
        mode: Option<String>,
        /// Maximum total degree of random polynomials (star)
        #[arg(long)]
        degree: Option<u32>,
        /// Number of random triples (star)
        #[arg(long)]
        cases: Option<usize>,
        /// phi0, sine (sw-galilei); default, parity, shift-pi, reflect-pi (sw-nh); or all
        #[arg(long)]
        kernel: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Galilei mass parameter
        #[arg(long)]
        alpha: Option<f64>,
        /// Newton-Hooke time scale
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Evaluate star(f,g), mbracket(f,g), wigner(n), symbol(f | proj(n)) or normalize(word)
    Eval { expr: String },
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{}", text) } else { write!(out, "{}", text) };
            return code;
        }
    };
    let g = &cli.global;
    let mut flags = ConfigFile {
        hbar: g.hbar,
        basis_size: g.basis_size,
        series_order: g.series_order,
        tolerance_scale: g.tolerance_scale,
        out: g.out.clone(),
        format: g.format,
        grid_points: g.grid_points,
        ..Default::default()
    };
    if let Command::Verify { mode, degree, cases, kernel, seed, alpha, tau, .. } = &cli.cmd {
        flags = ConfigFile { mode: mode.clone(), degree: *degree, cases: *cases, kernel: kernel.clone(), seed: *seed, alpha: *alpha, tau: *tau, ..flags };
    }
    let file = match &g.config {
        Some(p) => match ConfigFile::load(p) {
            Ok(f) => f,
            Err(e) => {
                let _ = writeln!(err, "error: {}", e);
                return EXIT_USAGE;
            }
        },
        None => ConfigFile::default(),
    };
    let cfg = match RunConfig::resolve(flags.or(file)) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            return EXIT_USAGE;
        }
    };
    match &cli.cmd {
        Command::Verify { suite, .. } => verify(suite, &cfg, out, err),
        Command::Eval { expr } => match eval(expr, &cfg) {
            Ok(s) => {
                let _ = writeln!(out, "{}", s);
                EXIT_PASS
            }
            Err(EvalError::Parse(e)) => {
                let _ = writeln!(err, "error: {}", e);
                let _ = writeln!(err, "  {}\n  {}^", expr, " ".repeat(e.pos.min(expr.len())));
                EXIT_USAGE
            }
            Err(EvalError::Compute(e)) => {
                let _ = writeln!(err, "error: {}", e);
                EXIT_FAIL
            }
        },
    }
}

/// Run one suite and build its report.
pub fn run_report(suite: &str, cfg: &RunConfig) -> Result<Report, String> {
    let t0 = Instant::now();
    let records = suites::run_suite(suite, cfg)?;
    Ok(Report::new(suite, records, t0.elapsed().as_secs_f64(), cfg.clone()))
}

fn verify(suite: &str, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let rep = match run_report(suite, cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            return EXIT_USAGE;
        }
    };
    if let Some(dir) = &cfg.out {
        let path = dir.join(format!("report-{}.json", suite));
        if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, rep.to_json())) {
            let _ = writeln!(err, "error: cannot write {}: {}", path.display(), e);
            return EXIT_FAIL;
        }
    }
    let _ = match cfg.format {
        Format::Json => writeln!(out, "{}", rep.to_json()),
        Format::Text => write!(out, "{}", rep.to_text()),
    };
    if rep.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

#[derive(Debug)]
pub enum EvalError {
    Parse(ParseError),
    Compute(String),
}

impl From<ParseError> for EvalError {
    fn from(e: ParseError) -> Self {
        EvalError::Parse(e)
    }
}

fn compute<E: std::fmt::Display>(e: E) -> EvalError {
    EvalError::Compute(e.to_string())
}

fn arity(call: &expr::Call, n: usize) -> Result<(), EvalError> {
    if call.args.len() != n {
        return Err(EvalError::Parse(ParseError { pos: call.name.len(), msg: format!("{} takes {} argument(s), got {}", call.name, n, call.args.len()) }));
    }
    Ok(())
}

fn deg(f: &PhasePoly) -> usize {
    f.degree().unwrap_or(0) as usize
}

/// Evaluate an expression; `wigner` and `symbol` write CSV grids and return a summary line.
pub fn eval(s: &str, cfg: &RunConfig) -> Result<String, EvalError> {
    let call = expr::parse_call(s)?;
    let poly = |i: usize| expr::parse_poly(&call.args[i].0, call.args[i].1);
    match call.name.as_str() {
        "star" => {
            arity(&call, 2)?;
            let (f, g) = (poly(0)?, poly(1)?);
            Ok(star_poly(&f, &g, deg(&f) + deg(&g), Convention::Moyal).map_err(compute)?.pretty())
        }
        "mbracket" => {
            arity(&call, 2)?;
            let (f, g) = (poly(0)?, poly(1)?);
            let n = (deg(&f) + deg(&g)).max(1);
            Ok(moyal_bracket(&HbarSeries::from_poly(&f, n), &HbarSeries::from_poly(&g, n)).map_err(compute)?.pretty())
        }
        "wigner" => {
            arity(&call, 1)?;
            let n = expr::parse_index(&call.args[0].0, call.args[0].1)?;
            let b = HermiteBasis::new(cfg.basis_size, cfg.hbar).map_err(compute)?;
            if n >= cfg.basis_size {
                return Err(EvalError::Compute(format!("state {} is outside a basis of size {}", n, cfg.basis_size)));
            }
            let spec = GridSpec::square(trusted_half_width(&b), cfg.grid_points);
            let w = wigner_from_state(&HermiteState::basis_state(&b, n), &spec).map_err(compute)?;
            write_grid(&w, cfg, &format!("wigner-{}", n), "wigner")
        }
        "symbol" => {
            arity(&call, 1)?;
            let (arg, off) = (&call.args[0].0, call.args[0].1);
            let b = HermiteBasis::new(cfg.basis_size, cfg.hbar).map_err(compute)?;
            let t = arg.trim_start();
            let lead = arg.len() - t.len();
            let op = if t.starts_with("proj(") {
                let inner = expr::parse_call(t).map_err(|e| ParseError { pos: e.pos + off + lead, msg: e.msg })?;
                if inner.args.len() != 1 {
                    return Err(EvalError::Parse(ParseError { pos: off + lead, msg: "proj takes one argument".into() }));
                }
                let n = expr::parse_index(&inner.args[0].0, inner.args[0].1 + off + lead)?;
                if n >= cfg.basis_size {
                    return Err(EvalError::Compute(format!("state {} is outside a basis of size {}", n, cfg.basis_size)));
                }
                b.unit(n, n)
            } else {
                weyl_map_poly(&b, &expr::parse_poly(arg, off)?).map_err(compute)?
            };
            let spec = GridSpec::square(trusted_half_width(&b), cfg.grid_points);
            let w = weyl_inverse(&b, &op, &spec).map_err(compute)?;
            write_grid(&w, cfg, "symbol", "symbol")
        }
        "normalize" => {
            arity(&call, 1)?;
            let (arg, off) = (&call.args[0].0, call.args[0].1);
            let w = parse_word(arg).map_err(|e| match e {
                PlError::Parse { pos, msg } => EvalError::Parse(ParseError { pos: pos + off, msg }),
                other => compute(other),
            })?;
            Ok(nc_normalize(&w, &Relations::symbolic()).to_string())
        }
        other => Err(EvalError::Parse(ParseError { pos: 0, msg: format!("undefined function '{}'", other) })),
    }
}

fn write_grid(g: &PhaseGrid, cfg: &RunConfig, stem: &str, quantity: &str) -> Result<String, EvalError> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(compute)?;
    let csv = dir.join(format!("{}.csv", stem));
    let file = std::fs::File::create(&csv).map_err(compute)?;
    g.write_csv(std::io::BufWriter::new(file), cfg.hbar).map_err(compute)?;
    std::fs::write(dir.join(format!("{}.json", stem)), g.sidecar_json(cfg.hbar, quantity)).map_err(compute)?;
    Ok(format!("wrote {} ({}x{} grid, max |value| {:.6})", display(&csv), g.spec.nq, g.spec.np, g.max_abs()))
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
