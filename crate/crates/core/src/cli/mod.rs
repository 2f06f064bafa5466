//! Command-line front end: `eval`, `decompose`, `verify` and `trace`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 unreadable input,
//! 3 matrix outside sp(2n, ℝ), 4 method precondition or numerical failure,
//! 5 non-semisimple input to `decompose`.

mod matrix_io;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

pub use matrix_io::{format_matrix, parse_matrix, read_matrix_file, write_atomic};

use crate::error::{Error, Result};
use crate::maslov::{maslov_dim2, maslov_trace, MaslovLimitConfig};
use crate::quasistates::{
    composite_qs, discontinuous_qs, linear_qs, maslov_qs, nilpotent_jordan_sp, Evaluation, FunctionalQs,
    LieQuasiState, MaslovMethod,
};
use crate::symplectic::{seeded_rng, CommutingStrategy, CompatibleComplexStructure, SpElement, SymplecticSpace};
use crate::verify::{
    check_ad_invariance, check_isotropic_linearity, check_quasi_linearity, embed_gl, fit_gleason_on_unitary,
    fit_main_theorem, fit_rank_one_trace, unitary_trace_oracle, FGEvaluator, SuiteReport, Tolerance,
    VerificationReport,
};
use crate::williamson::williamson_decompose;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_IN_SP: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;
pub const EXIT_NOT_SEMISIMPLE: i32 = 5;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "LIEQS_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum OutputFormat {
    /// Indented `key: value` tree.
    #[value(name = "text", alias = "structured-text")]
    Text,
    /// Comma-separated rows.
    #[value(name = "csv", alias = "comma-separated")]
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMethod {
    Auto,
    Limit,
    Spectral,
    Dim2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    QuasiLinearity,
    AdInvariance,
    Gleason,
    RankOne,
    Isotropic,
    MainTheorem,
    All,
}

impl SuiteArg {
    pub fn name(&self) -> &'static str {
        match self {
            SuiteArg::QuasiLinearity => "quasi-linearity",
            SuiteArg::AdInvariance => "ad-invariance",
            SuiteArg::Gleason => "gleason",
            SuiteArg::RankOne => "rank-one",
            SuiteArg::Isotropic => "isotropic",
            SuiteArg::MainTheorem => "main-theorem",
            SuiteArg::All => "all",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lieqs", version, about = "Lie quasi-states on sp(2n, R)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: RunOptions,
}

#[derive(Debug, Clone, Args)]
pub struct RunOptions {
    /// Half dimension for generated samples.
    #[arg(long, global = true, default_value_t = 3)]
    pub n: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Horizon of the Maslov limit.
    #[arg(long = "t-max", global = true, default_value_t = 2000.0)]
    pub t_max: f64,
    #[arg(long, global = true, default_value_t = 0.05)]
    pub dt: f64,
    /// Target error bar of the Maslov limit.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tol: f64,
    /// Trials per randomized check.
    #[arg(long, global = true, default_value_t = 50)]
    pub trials: usize,
    /// Output file; defaults to a fixed name inside the output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[arg(long = "output-dir", global = true, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the Maslov quasi-state on a matrix file.
    Eval {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = EvalMethod::Auto)]
        method: EvalMethod,
    },
    /// Williamson normal form of a semi-simple matrix.
    Decompose { file: PathBuf },
    /// Run verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Maslov evaluator used inside the suites.
        #[arg(long, value_enum, default_value_t = EvalMethod::Auto)]
        method: EvalMethod,
        /// Add checks that are expected to fail.
        #[arg(long)]
        negative_control: bool,
    },
    /// Write the convergence trace `t, θ(t), θ(t)/t`.
    Trace {
        file: PathBuf,
        /// Approximate number of rows.
        #[arg(long, default_value_t = 200)]
        rows: usize,
    },
}

/// Validated run parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub t_max: f64,
    pub dt: f64,
    pub tol: f64,
    pub trials: usize,
    pub output_path: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn limit_config(&self) -> MaslovLimitConfig {
        MaslovLimitConfig { t_max: self.t_max, dt: self.dt, tol: self.tol, ..MaslovLimitConfig::default() }
    }
}

impl RunOptions {
    /// Resolves the output path (`--out`, else `<output-dir>/<default_name>`)
    /// and validates the numeric fields.
    pub fn resolve(&self, default_name: &str) -> Result<RunConfig> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.n < 1 || !positive(self.t_max) || !positive(self.dt) || !positive(self.tol) || self.trials < 1 {
            return Err(Error::InvalidConfig(
                "n, t-max, dt, tol and trials must all be positive".into(),
            ));
        }
        let output_path = match (&self.out, &self.output_dir) {
            (Some(p), _) => p.clone(),
            (None, Some(dir)) => dir.join(default_name),
            (None, None) => PathBuf::from(default_name),
        };
        let cfg = RunConfig {
            n: self.n,
            seed: self.seed,
            t_max: self.t_max,
            dt: self.dt,
            tol: self.tol,
            trials: self.trials,
            output_path,
            format: self.format,
        };
        cfg.limit_config().validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Input,
    Decompose,
    Other,
}

fn exit_code(phase: Phase, e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) | Error::NotSquare { .. } | Error::OddDimension(_) => EXIT_PARSE,
        Error::NotSkewSymplectic { .. } if phase == Phase::Input => EXIT_NOT_IN_SP,
        Error::NotSemisimple(_) | Error::AmbiguousEigenvalue { .. } if phase == Phase::Decompose => EXIT_NOT_SEMISIMPLE,
        _ => EXIT_PRECONDITION,
    }
}

fn load_element(path: &Path) -> Result<SpElement> {
    let m = read_matrix_file(path)?;
    SpElement::new(m)
}

/// Output of `eval`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutput {
    pub value: f64,
    pub error_bar: f64,
    pub method: &'static str,
}

fn maslov_method(m: EvalMethod) -> MaslovMethod {
    match m {
        EvalMethod::Limit => MaslovMethod::Limit,
        EvalMethod::Spectral => MaslovMethod::Spectral,
        EvalMethod::Auto | EvalMethod::Dim2 => MaslovMethod::Auto,
    }
}

pub fn cmd_eval(b: &SpElement, method: EvalMethod, cfg: &MaslovLimitConfig) -> Result<EvalOutput> {
    if method == EvalMethod::Dim2 {
        if b.space().n() != 1 {
            return Err(Error::Hypothesis(format!("method dim2 needs n = 1, got n = {}", b.space().n())));
        }
        let m = b.matrix();
        let value = maslov_dim2(m[(0, 0)], m[(0, 1)], m[(1, 0)]);
        return Ok(EvalOutput { value, error_bar: 4.0 * f64::EPSILON * value.abs(), method: "dim2" });
    }
    let qs = maslov_qs(b.space(), *cfg, maslov_method(method))?;
    let Evaluation { value, error_bar } = qs.evaluate(b)?;
    let used = match method {
        EvalMethod::Auto => {
            if crate::maslov::maslov_spectral(b).is_ok() {
                "spectral"
            } else {
                "limit"
            }
        }
        EvalMethod::Limit => "limit",
        EvalMethod::Spectral => "spectral",
        EvalMethod::Dim2 => unreachable!("handled above"),
    };
    Ok(EvalOutput { value, error_bar, method: used })
}

#[derive(Debug, Serialize)]
struct BlockSummary {
    #[serde(rename = "type")]
    kind: &'static str,
    parameters: Vec<f64>,
    planes: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct DecomposeSummary {
    dim: usize,
    reconstruction_residual: f64,
    symplectic_defect: f64,
    frame_condition: f64,
    frame_file: String,
    blocks: Vec<BlockSummary>,
}

/// Williamson report text; the frame `S` goes to `frame_path`.
pub fn cmd_decompose(b: &SpElement, frame_path: &Path) -> Result<String> {
    use crate::williamson::BlockType;
    let dec = williamson_decompose(b)?;
    write_atomic(frame_path, format_matrix(&dec.s).as_bytes())?;
    let blocks = dec
        .blocks
        .iter()
        .map(|blk| BlockSummary {
            kind: blk.btype.name(),
            parameters: match blk.btype {
                BlockType::RealPair(a) => vec![a],
                BlockType::ImagPair(b) => vec![b],
                BlockType::Quadruple(a, b) => vec![a, b],
            },
            planes: blk.plane_indices.iter().map(|k| k + 1).collect(),
        })
        .collect();
    let summary = DecomposeSummary {
        dim: b.space().dim(),
        reconstruction_residual: dec.reconstruction_residual,
        symplectic_defect: dec.symplectic_defect,
        frame_condition: dec.frame_condition,
        frame_file: frame_path.display().to_string(),
        blocks,
    };
    serde_yaml::to_string(&summary).map_err(|e| Error::Io(e.to_string()))
}

/// CSV with header `t,theta,theta_over_t`; also returns `θ(T)/T`.
pub fn cmd_trace(b: &SpElement, cfg: &MaslovLimitConfig, rows: usize) -> Result<(String, f64)> {
    let (est, trace) = maslov_trace(b, cfg, rows)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t", "theta", "theta_over_t"]).map_err(io)?;
    for r in &trace {
        w.write_record([r.t.to_string(), r.theta.to_string(), r.theta_over_t.to_string()]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?;
    Ok((text, est.value))
}

/// Runs one suite (or all) for the configured `n` and seed.
pub fn verify_suite(suite: SuiteArg, cfg: &RunConfig, method: EvalMethod, negative_control: bool) -> Result<SuiteReport> {
    let space = SymplecticSpace::new(cfg.n)?;
    let seed = cfg.seed;
    let trials = cfg.trials;
    let method = if method == EvalMethod::Dim2 { EvalMethod::Auto } else { method };
    let zm: Arc<dyn LieQuasiState> = Arc::new(maslov_qs(space, cfg.limit_config(), maslov_method(method))?);
    let n0 = {
        let mut rng = seeded_rng(seed, 100);
        DMatrix::from_fn(space.dim(), space.dim(), |_, _| rng.random_range(-1.0..=1.0))
    };
    let lin: Arc<dyn LieQuasiState> = Arc::new(linear_qs(n0.clone())?);
    let control = FunctionalQs::norm_control(space);
    let wants = |s: SuiteArg| suite == SuiteArg::All || suite == s;
    let mut reports: Vec<VerificationReport> = Vec::new();

    if wants(SuiteArg::QuasiLinearity) {
        let common = CommutingStrategy::CommonFrame;
        let odd = CommutingStrategy::odd_polynomial();
        reports.push(check_quasi_linearity(zm.as_ref(), &common, trials, Tolerance::ErrorBars(3.0), &mut seeded_rng(seed, 1))?);
        reports.push(check_quasi_linearity(zm.as_ref(), &odd, trials, Tolerance::ErrorBars(3.0), &mut seeded_rng(seed, 2))?);
        reports.push(check_quasi_linearity(lin.as_ref(), &common, trials, Tolerance::Absolute(1e-10), &mut seeded_rng(seed, 3))?);
        reports.push(check_quasi_linearity(lin.as_ref(), &odd, trials, Tolerance::Absolute(1e-10), &mut seeded_rng(seed, 4))?);
        let a = nilpotent_jordan_sp(space)?;
        let disc = discontinuous_qs(a.clone(), 1.0)?;
        let own = CommutingStrategy::OddPolynomial { base: Some(a) };
        reports.push(check_quasi_linearity(&disc, &own, trials, Tolerance::Absolute(1e-9), &mut seeded_rng(seed, 5))?);
        if negative_control {
            let mut r = check_quasi_linearity(&control, &common, trials, Tolerance::ErrorBars(3.0), &mut seeded_rng(seed, 6))?;
            r.notes.push("negative control: expected to fail".into());
            reports.push(r);
        }
    }
    if wants(SuiteArg::AdInvariance) {
        reports.push(check_ad_invariance(zm.as_ref(), trials, Tolerance::ErrorBars(2.0), &mut seeded_rng(seed, 10))?);
        if negative_control {
            let mut r = check_ad_invariance(lin.as_ref(), trials, Tolerance::ErrorBars(2.0), &mut seeded_rng(seed, 11))?;
            r.notes.push("negative control: expected to fail".into());
            reports.push(r);
        }
    }
    if wants(SuiteArg::Gleason) {
        let j0 = CompatibleComplexStructure::standard(space);
        let oracle_limit = if method == EvalMethod::Limit { 1e-2 } else { 1e-6 };
        let oracle: (&crate::verify::ElementOracle<'_>, f64) = (&unitary_trace_oracle, oracle_limit);
        reports.push(fit_gleason_on_unitary(zm.as_ref(), &j0, 1e-2, Some(oracle), &mut seeded_rng(seed, 20))?);
        reports.push(fit_gleason_on_unitary(lin.as_ref(), &j0, 1e-10, None, &mut seeded_rng(seed, 21))?);
    }
    if wants(SuiteArg::RankOne) {
        if space.n() < 3 {
            reports.push(VerificationReport::skipped("rank-one", &zm.label(), "hypothesis n >= 3 not met"));
        } else {
            let emb = embed_gl(space, &mut seeded_rng(seed, 30))?;
            reports.push(fit_rank_one_trace(zm.as_ref(), &emb, 1e-2, &mut seeded_rng(seed, 31))?);
            reports.push(fit_rank_one_trace(lin.as_ref(), &emb, 1e-9, &mut seeded_rng(seed, 32))?);
        }
    }
    if wants(SuiteArg::Isotropic) {
        let xi = {
            let mut rng = seeded_rng(seed, 40);
            nalgebra::DVector::from_fn(space.dim(), |_, _| rng.random_range(-1.0..=1.0))
        };
        let fg = FGEvaluator::new(zm.as_ref());
        let g = |eta: &nalgebra::DVector<f64>| fg.g(&xi, eta);
        reports.push(check_isotropic_linearity(space, "G(xi,.)", &g, trials, Tolerance::ErrorBars(3.0), &mut seeded_rng(seed, 41))?);
        let w = xi.clone();
        let linear = move |x: &nalgebra::DVector<f64>| Ok(Evaluation::exact(w.dot(x)));
        reports.push(check_isotropic_linearity(space, "linear", &linear, trials, Tolerance::Absolute(1e-10), &mut seeded_rng(seed, 42))?);
        if negative_control {
            let norm = |x: &nalgebra::DVector<f64>| Ok(Evaluation::exact(x.norm()));
            let mut r = check_isotropic_linearity(space, "norm", &norm, trials, Tolerance::Absolute(1e-10), &mut seeded_rng(seed, 43))?;
            r.notes.push("negative control: expected to fail".into());
            reports.push(r);
        }
    }
    if wants(SuiteArg::MainTheorem) {
        let (r, _) = fit_main_theorem(zm.as_ref(), 1e-2, &mut seeded_rng(seed, 50))?;
        reports.push(r);
        let comp = composite_qs(vec![(2.0, zm.clone()), (1.0, lin.clone())])?;
        let (mut r, fit) = fit_main_theorem(&comp, 1e-2, &mut seeded_rng(seed, 51))?;
        if let Some(fit) = fit {
            r.require("maslov_coefficient_error", (fit.maslov_coefficient - 2.0).abs(), 1e-2);
        }
        reports.push(r);
    }
    Ok(SuiteReport::new(suite.name(), space.n(), seed, reports))
}

/// Runs a parsed command line, writing human output to `out` and
/// diagnostics to `err`; returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err((code, e)) => {
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> std::result::Result<i32, (i32, Error)> {
    let opts = cli.options;
    let fail = |phase: Phase| move |e: Error| (exit_code(phase, &e), e);
    let io = |e: std::io::Error| (EXIT_PARSE, Error::Io(e.to_string()));
    match cli.command {
        Command::Eval { file, method } => {
            let cfg = opts.resolve("unused").map_err(fail(Phase::Other))?;
            let b = load_element(&file).map_err(fail(Phase::Input))?;
            let r = cmd_eval(&b, method, &cfg.limit_config()).map_err(fail(Phase::Other))?;
            writeln!(out, "value: {}\nerror_bar: {}\nmethod: {}", r.value, r.error_bar, r.method).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Decompose { file } => {
            let cfg = opts.resolve("frame.mat").map_err(fail(Phase::Other))?;
            let b = load_element(&file).map_err(fail(Phase::Input))?;
            let text = cmd_decompose(&b, &cfg.output_path).map_err(fail(Phase::Decompose))?;
            write!(out, "{text}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Trace { file, rows } => {
            let cfg = opts.resolve("trace.csv").map_err(fail(Phase::Other))?;
            let b = load_element(&file).map_err(fail(Phase::Input))?;
            let (text, value) = cmd_trace(&b, &cfg.limit_config(), rows).map_err(fail(Phase::Other))?;
            write_atomic(&cfg.output_path, text.as_bytes()).map_err(fail(Phase::Other))?;
            writeln!(out, "trace: {}\nvalue: {value}", cfg.output_path.display()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Verify { suite, method, negative_control } => {
            let default = match opts.format {
                OutputFormat::Text => "report.txt",
                OutputFormat::Csv => "report.csv",
            };
            let cfg = opts.resolve(default).map_err(fail(Phase::Other))?;
            let report = verify_suite(suite, &cfg, method, negative_control).map_err(fail(Phase::Other))?;
            let body = match cfg.format {
                OutputFormat::Text => report.to_text(),
                OutputFormat::Csv => report.to_csv(),
            }
            .map_err(fail(Phase::Other))?;
            write_atomic(&cfg.output_path, body.as_bytes()).map_err(fail(Phase::Other))?;
            for r in &report.reports {
                writeln!(out, "{}", r.summary_line()).map_err(io)?;
            }
            writeln!(out, "report: {}", cfg.output_path.display()).map_err(io)?;
            writeln!(out, "{}", report.summary).map_err(io)?;
            Ok(if report.pass() { EXIT_OK } else { EXIT_SUITE_FAILURE })
        }
    }
}
