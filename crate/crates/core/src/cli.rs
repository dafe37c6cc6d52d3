//! Command-line front end: argument parsing, dispatch and reports.
//!
//! Every command returns a [`Report`]; the process exits with 0 when the
//! report passes, 2 when a check fails and 1 on usage, IO or parse errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::comparison::{
    ball_condition, inradius_comparison_r, jacobian_j, stability_margin, ComparisonTriple,
};
use crate::discrete::{
    bound_report, decompose, BinConfig, DecompositionConfig, SubsetSpec, VerifyOptions, BOUND_TOL,
    DEFAULT_QUANTILE, MAX_UNASSIGNED_FRACTION, RELATION_TOL,
};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::mms::DiscreteMMS;
use crate::models::{base_sphere, ModelKind, ModelSpace, DEFAULT_COLLAR};
use crate::needle::{
    check_cd_density, check_mcp_density, comparison_envelope, extremal_density, inner_mean_curvature_from_density,
    NeedleDensity, SigmaConvention, EXTREMAL_SAMPLES, TOL_SAMPLED,
};

/// Grid points of the `J` profile printed by `bound`.
pub const PROFILE_POINTS: usize = 21;
/// Tolerance of the volume-cone check echoed by `model`.
pub const VOLUME_CONE_TOL: f64 = 1e-6;
/// Base points of the built-in sphere used by `model`.
pub const BASE_POINTS: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "needlecomp", version, about = "Inradius bounds from needle decompositions")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Comparison radius r_{K,H,N} and the ball condition.
    Bound(BoundArgs),
    /// Concavity and envelope checks of a sampled needle density.
    NeedleCheck(NeedleCheckArgs),
    /// Write the extremal density h(r) = J_{K,H,N}(-r) as CSV.
    Extremal(ExtremalArgs),
    /// Sample a truncated cone or suspension.
    Model(ModelArgs),
    /// Verify the inradius bound on a finite space.
    Verify(VerifyArgs),
    /// Perturbation margin of the comparison radius.
    Stability(StabilityArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Triple {
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long = "H", allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long = "N")]
    pub n: f64,
}

impl Triple {
    fn validated(&self) -> Result<ComparisonTriple> {
        ComparisonTriple::new(self.k, self.h, self.n)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    pub triple: Triple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Cd,
    Mcp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaArg {
    KOverNMinusOne,
    Kn,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NeedleCheckArgs {
    /// CSV with header `r,h`.
    #[arg(long)]
    pub density: PathBuf,
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long = "N")]
    pub n: f64,
    #[arg(long, value_enum, default_value_t = Mode::Cd)]
    pub mode: Mode,
    #[arg(long, default_value_t = TOL_SAMPLED)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = SigmaArg::KOverNMinusOne)]
    pub sigma: SigmaArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtremalArgs {
    #[command(flatten)]
    pub triple: Triple,
    #[arg(long, default_value_t = EXTREMAL_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 1.0)]
    pub h0: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Euclidean,
    Hyperbolic,
    Spherical,
}

impl From<KindArg> for ModelKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Euclidean => ModelKind::EuclideanCone,
            KindArg::Hyperbolic => ModelKind::HyperbolicCone,
            KindArg::Spherical => ModelKind::SphericalSuspension,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Dimension bound; the radial measure is rho(t)^(N-1) dt.
    #[arg(long = "N")]
    pub n: f64,
    /// Truncation radius.
    #[arg(long = "R")]
    pub r: f64,
    #[arg(long, default_value_t = 64)]
    pub radial_steps: usize,
    /// Base space as DiscreteMMS JSON; default is a sphere of dimension
    /// round(N-1) sampled with --base-points points.
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long, default_value_t = BASE_POINTS)]
    pub base_points: usize,
    /// Radial collar beyond R, as a fraction of R.
    #[arg(long, default_value_t = DEFAULT_COLLAR)]
    pub collar: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// DiscreteMMS JSON.
    #[arg(long, required_unless_present = "matrix")]
    pub space: Option<PathBuf>,
    /// Distance matrix CSV (with --weights) instead of --space.
    #[arg(long, requires = "weights", conflicts_with = "space")]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Membership file: one 0/1 flag per point.
    #[arg(long, conflicts_with_all = ["omega_ball", "omega_ulevel"])]
    pub omega: Option<PathBuf>,
    /// Omega as a closed ball: center index and radius.
    #[arg(long, num_args = 2, value_names = ["CENTER", "RADIUS"], conflicts_with = "omega_ulevel")]
    pub omega_ball: Option<Vec<f64>>,
    /// Omega as the sublevel set {field <= c} of the space's field.
    #[arg(long, allow_negative_numbers = true)]
    pub omega_ulevel: Option<f64>,
    #[arg(long = "K", allow_negative_numbers = true)]
    pub k: f64,
    #[arg(long = "N")]
    pub n: f64,
    #[arg(long, default_value_t = DEFAULT_QUANTILE)]
    pub quantile: f64,
    #[arg(long, default_value_t = BOUND_TOL)]
    pub tol: f64,
    /// Take this mean curvature bound instead of the estimate.
    #[arg(long = "H-override", allow_negative_numbers = true)]
    pub h_override: Option<f64>,
    #[arg(long, default_value_t = RELATION_TOL)]
    pub relation_tol: f64,
    #[arg(long, default_value_t = MAX_UNASSIGNED_FRACTION)]
    pub max_unassigned: f64,
    /// Density smoothing width; default length / sqrt(points) per ray.
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// Write the ray decomposition as JSON.
    #[arg(long)]
    pub rays_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub triple: Triple,
    #[arg(long)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub config: Value,
    pub results: Value,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => crate::json::to_string(self)? + "\n",
            Format::Text | Format::Csv => {
                let sep = if format == Format::Csv { "," } else { ": " };
                let mut rows = vec![
                    ("command".to_string(), self.command.clone()),
                    ("passed".to_string(), self.passed.to_string()),
                    ("inputs_digest".to_string(), self.inputs_digest.clone()),
                ];
                flatten("results", &self.results, &mut rows);
                flatten("config", &self.config, &mut rows);
                for (i, w) in self.warnings.iter().enumerate() {
                    rows.push((format!("warnings.{i}"), w.clone()));
                }
                let mut out = if format == Format::Csv { "key,value\n".to_string() } else { String::new() };
                for (k, v) in rows {
                    let v = if format == Format::Csv && v.contains([',', '"', '\n']) {
                        format!("\"{}\"", v.replace('"', "\"\""))
                    } else {
                        v
                    };
                    out.push_str(&format!("{k}{sep}{v}\n"));
                }
                out
            }
        })
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&format!("{prefix}.{k}"), x, rows);
            }
        }
        Value::Array(a) if a.len() <= 32 => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

/// Defaults shared by all commands, echoed into every report.
pub fn defaults() -> Value {
    json!({
        "relation_tol": RELATION_TOL,
        "bound_tol": BOUND_TOL,
        "quantile": DEFAULT_QUANTILE,
        "max_unassigned_fraction": MAX_UNASSIGNED_FRACTION,
        "bin_width": "ray length / sqrt(points on ray)",
        "needle_tol": TOL_SAMPLED,
        "extremal_samples": EXTREMAL_SAMPLES,
        "collar": DEFAULT_COLLAR,
        "base_points": BASE_POINTS,
        "volume_cone_tol": VOLUME_CONE_TOL,
    })
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

struct Digest256(Sha256);

impl Digest256 {
    fn new<T: Serialize>(command: &str, args: &T) -> Result<Self> {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(serde_json::to_vec(args)?);
        Ok(Self(h))
    }

    fn file(&mut self, path: &Path) -> Result<()> {
        self.0.update(std::fs::read(path)?);
        Ok(())
    }

    fn finish(self) -> String {
        self.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn report<T: Serialize>(command: &str, args: &T, digest: Digest256, results: Value, passed: bool, warnings: Vec<String>) -> Result<Report> {
    Ok(Report {
        command: command.to_string(),
        inputs_digest: digest.finish(),
        config: json!({ "args": to_value(args)?, "defaults": defaults() }),
        results,
        passed,
        warnings,
    })
}

pub fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Bound(a) => cmd_bound(a),
        Command::NeedleCheck(a) => cmd_needle_check(a),
        Command::Extremal(a) => cmd_extremal(a),
        Command::Model(a) => cmd_model(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stability(a) => cmd_stability(a),
    }
}

pub fn cmd_bound(a: &BoundArgs) -> Result<Report> {
    let p = a.triple.validated()?;
    let (kappa, lambda) = p.kappa_lambda();
    let r = inradius_comparison_r(&p);
    let hi = r.finite().map_or(4.0, |r| 2.0 * r);
    let profile: Vec<Value> = (0..PROFILE_POINTS)
        .map(|i| {
            let x = hi * i as f64 / (PROFILE_POINTS - 1) as f64;
            let j = jacobian_j(&p, x);
            json!({ "r": x, "J": j, "sign": if j > 0.0 { "+" } else { "0" } })
        })
        .collect();
    let results = json!({
        "r": r,
        "case": ball_condition(kappa, lambda),
        "kappa": kappa,
        "lambda": lambda,
        "profile": profile,
    });
    report("bound", a, Digest256::new("bound", a)?, results, true, vec![])
}

pub fn cmd_needle_check(a: &NeedleCheckArgs) -> Result<Report> {
    let mut digest = Digest256::new("needle-check", a)?;
    digest.file(&a.density)?;
    let h = NeedleDensity::read_csv(&a.density)?;
    let concavity = match a.mode {
        Mode::Cd => check_cd_density(&h, a.k, a.n, a.tol)?,
        Mode::Mcp => {
            let convention = match a.sigma {
                SigmaArg::KOverNMinusOne => SigmaConvention::KOverNMinusOne,
                SigmaArg::Kn => SigmaConvention::KN,
            };
            check_mcp_density(&h, a.k, a.n, a.tol, convention)?
        }
    };
    let mut warnings = Vec::new();
    let mean_curvature = if h.zero_index() > 0 {
        Some(inner_mean_curvature_from_density(&h)?)
    } else {
        warnings.push("r = 0 is the left end; no inner mean curvature".to_string());
        None
    };
    // The envelope looks into r > 0, so needles ending at 0 are reflected.
    let oriented = if h.zero_index() + 1 == h.len() { h.reflected() } else { h.clone() };
    let envelope = match comparison_envelope(&oriented, a.k, a.n, a.tol) {
        Ok(e) => Some(e),
        Err(e) => {
            warnings.push(format!("envelope: {e}"));
            None
        }
    };
    let passed = concavity.passed && envelope.as_ref().map_or(true, |e| e.passed);
    let results = json!({
        "concavity": to_value(&concavity)?,
        "mean_curvature": mean_curvature,
        "max_b": envelope.as_ref().and_then(|e| e.max_b),
        "envelope": to_value(&envelope)?,
    });
    report("needle-check", a, digest, results, passed, warnings)
}

pub fn cmd_extremal(a: &ExtremalArgs) -> Result<Report> {
    let p = a.triple.validated()?;
    let r = inradius_comparison_r(&p).finite().ok_or(Error::InfiniteRadius)?;
    let h = extremal_density(p.k, p.h, p.n, a.h0, a.samples)?;
    h.write_csv(&a.out)?;
    let results = json!({ "r": r, "samples": h.len(), "out": a.out });
    report("extremal", a, Digest256::new("extremal", a)?, results, true, vec![])
}

pub fn cmd_model(a: &ModelArgs) -> Result<Report> {
    if !(a.n > 1.0 && a.n.is_finite()) {
        return Err(Error::InvalidParameter(format!("N = {} must exceed 1", a.n)));
    }
    let mut digest = Digest256::new("model", a)?;
    let base = match &a.base {
        Some(path) => {
            digest.file(path)?;
            DiscreteMMS::read_json(path)?
        }
        None => base_sphere((a.n - 1.0).round() as usize, a.base_points, 0)?,
    };
    let kind = ModelKind::from(a.kind);
    let space = ModelSpace::new(kind, a.n - 1.0, base)?;
    let sample = space.truncated_cone_sample(a.r, a.radial_steps, a.collar)?;
    let (k, n) = kind.matched_parameters(a.n - 1.0);
    let volume = space.volume_cone_check(k, n, 0.5 * a.r, a.r, VOLUME_CONE_TOL)?;
    sample.write_json(&a.out)?;
    let omega = space.truncation(&sample, a.r)?;
    let results = json!({
        "kind": kind,
        "points": sample.n(),
        "total_mass": sample.total_mass(),
        "truncation_mass": omega.mass(&sample),
        "K": k,
        "N": n,
        "volume_cone": to_value(&volume)?,
        "out": a.out,
    });
    report("model", a, digest, results, volume.passed, vec![])
}

fn load_space(a: &VerifyArgs, digest: &mut Digest256) -> Result<DiscreteMMS> {
    match (&a.space, &a.matrix, &a.weights) {
        (Some(path), _, _) => {
            digest.file(path)?;
            DiscreteMMS::read_json(path)
        }
        (None, Some(m), Some(w)) => {
            digest.file(m)?;
            digest.file(w)?;
            DiscreteMMS::read_csv_pair(m, w)
        }
        _ => Err(Error::InvalidParameter("give --space or --matrix with --weights".into())),
    }
}

fn load_omega(a: &VerifyArgs, space: &DiscreteMMS, digest: &mut Digest256) -> Result<SubsetSpec> {
    let omega = if let Some(path) = &a.omega {
        digest.file(path)?;
        SubsetSpec::read(path)?
    } else if let Some(ball) = &a.omega_ball {
        let center = ball[0];
        if !(center >= 0.0 && center.fract() == 0.0) {
            return Err(Error::InvalidParameter(format!("ball center {center} is not an index")));
        }
        SubsetSpec::ball(space, center as usize, ball[1])?
    } else if let Some(c) = a.omega_ulevel {
        let field = space
            .field()
            .ok_or_else(|| Error::InvalidParameter("--omega-ulevel needs a space with a field".into()))?;
        SubsetSpec::sublevel(field, c)?
    } else {
        return Err(Error::InvalidParameter("give --omega, --omega-ball or --omega-ulevel".into()));
    };
    omega.check_size(space)?;
    Ok(omega)
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Report> {
    ComparisonTriple::new(a.k, 0.0, a.n)?;
    let mut digest = Digest256::new("verify", a)?;
    let space = load_space(a, &mut digest)?;
    let omega = load_omega(a, &space, &mut digest)?;
    let options = VerifyOptions {
        quantile: a.quantile,
        tol: a.tol,
        h_override: a.h_override,
        decomposition: DecompositionConfig {
            tol: a.relation_tol,
            max_unassigned_fraction: a.max_unassigned,
        },
        bins: BinConfig { width: a.bin_width },
    };
    if !(0.0..=1.0).contains(&options.quantile) {
        return Err(Error::InvalidParameter(format!("quantile {} outside [0, 1]", options.quantile)));
    }
    let analysis = decompose(&space, &omega, &options.decomposition, &options.bins)?;
    let bound = bound_report(&space, &omega, &analysis, a.k, a.n, &options)?;
    if let Some(path) = &a.rays_out {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        crate::json::to_writer(&mut f, &analysis.decomposition)?;
        f.flush()?;
    }
    let results = json!({
        "inradius": bound.inradius,
        "H_lower": bound.h_lower,
        "r_comparison": bound.r_comparison,
        "margin": bound.margin,
        "passed": bound.passed,
        "surface_mass": bound.surface_mass,
        "unassigned_fraction": bound.unassigned_fraction,
        "rays": analysis.decomposition.rays.len(),
        "mean_curvature": to_value(&bound.mean_curvature)?,
    });
    report("verify", a, digest, results, bound.passed, bound.warnings)
}

pub fn cmd_stability(a: &StabilityArgs) -> Result<Report> {
    let p = a.triple.validated()?;
    let r = inradius_comparison_r(&p).finite().ok_or(Error::InfiniteRadius)?;
    let delta = stability_margin(&p, a.epsilon)?;
    let perturbed = ComparisonTriple::new(p.k - delta, p.h - delta, p.n + delta)?;
    let r_delta = inradius_comparison_r(&perturbed);
    let passed = r_delta <= ExtendedReal::Finite(r + a.epsilon);
    let results = json!({
        "r": r,
        "delta": delta,
        "r_perturbed": r_delta,
        "bound": r + a.epsilon,
    });
    report("stability", a, Digest256::new("stability", a)?, results, passed, vec![])
}

/// Parses `args`, runs the command and writes the report; returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = run(&cli.command).and_then(|rep| {
        let text = rep.render(cli.format)?;
        match &cli.report {
            Some(path) => std::fs::write(path, &text)?,
            None => stdout.write_all(text.as_bytes())?,
        }
        Ok(rep.exit_code())
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
