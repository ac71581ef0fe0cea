//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 verified failure, 2 solver non-convergence,
//! 3 input error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bodies::{
    blaschke_santalo_check, exact_volume, polar_polytope, santalo_point_body, ConvexPolytope, SantaloPointOptions,
};
use crate::certificate::Certificate;
use crate::equipartition::{equipartition_verify, yy_equipartition, SolverOptions};
use crate::error::{Result, SantaloError};
use crate::field::{BoxBounds, ScalarField};
use crate::fixtures;
use crate::geometry::{dual_partition_check, point, YaoYaoTree};
use crate::inequalities::{
    conewise_trace_with, duality_check, exp_substitution_check, log_pl_check, pl_check, polar_transform, santalo_verify,
    RadialWeight, INTEGRAL_SLACK,
};
use crate::io::{self, CloudJson, FieldJson, PolytopeJson, ReportJson, TreeJson};
use crate::measures::{cloud_from_grid, WeightedPointCloud};
use crate::sampling;
use crate::svg::render_svg;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "santalo", version, about = "Yao-Yao partitions and Blaschke-Santalo checks")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "SANTALO_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Yao-Yao equipartition of a point cloud (given or generated).
    Partition(PartitionArgs),
    /// Check int f * int g against the weight bound.
    VerifySantalo(FunctionalArgs),
    /// Maximal polar function of f at a center.
    Polar(FunctionalArgs),
    /// Per-cone terms of the proof for f, g and a Yao-Yao tree.
    Conewise(ConewiseArgs),
    /// Prekopa-Leindler hypothesis and conclusion.
    Pl(PlArgs),
    /// Multiplicative Prekopa-Leindler and the exponential substitution.
    Logpl(LogPlArgs),
    /// Polar of a polytope and the volume product at the origin.
    BodyPolar(BodyArgs),
    /// Santalo point of a polytope and its volume product.
    SantaloPoint(SantaloPointArgs),
    /// The barycenter counterexample on the line, and its repair.
    #[command(name = "paper-counterexample")]
    BarycenterCounterexample,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CloudShape {
    Disc,
    Gaussian,
    Cube,
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    /// Cloud JSON; when absent a cloud is generated.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = CloudShape::Disc)]
    pub shape: CloudShape,
    /// Accepted imbalance as a fraction of total mass.
    #[arg(long, default_value_t = 1e-3)]
    pub mass_tol: f64,
    /// Put the top hyperplane through the origin (even measures).
    #[arg(long)]
    pub even: bool,
    /// SVG path for planar inputs (defaults to the output path with .svg).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Random directions for the dual partition check.
    #[arg(long, default_value_t = 10_000)]
    pub directions: usize,
    /// Also write the generated cloud here.
    #[arg(long)]
    pub save_cloud: Option<PathBuf>,
    /// Perturb atoms once by a seeded jitter of 1e-9 times the cloud radius.
    #[arg(long)]
    pub general_position: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum FieldFixture {
    StepF,
    StepG,
    Gaussian,
    Box,
    Exponential,
}

#[derive(Args, Debug)]
pub struct FieldSource {
    /// Field JSON for f.
    #[arg(long)]
    pub f: Option<PathBuf>,
    /// Built-in f when no file is given.
    #[arg(long, value_enum, default_value_t = FieldFixture::Gaussian)]
    pub fixture: FieldFixture,
    /// Dimension of dimension-dependent fixtures.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Args, Debug)]
pub struct FunctionalArgs {
    #[command(flatten)]
    pub source: FieldSource,
    /// Field JSON for g; when absent g is the maximal polar of f.
    #[arg(long)]
    pub g: Option<PathBuf>,
    /// `indicator` or `gaussian`.
    #[arg(long, default_value = "gaussian")]
    pub weight: RadialWeight,
    /// `yy` (Yao-Yao center of f), `origin`, or comma-separated coordinates.
    #[arg(long, default_value = "yy")]
    pub center: String,
    /// Lower corner of the polar grid (defaults to the box of f).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub out_lo: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub out_hi: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub out_shape: Option<Vec<usize>>,
    /// Value of the polar where no constraint applies.
    #[arg(long)]
    pub cap: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ConewiseArgs {
    #[command(flatten)]
    pub functional: FunctionalArgs,
    /// Tree JSON; defaults to the Yao-Yao tree of f (or orthants with --orthants).
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Use the coordinate orthants at the center instead of a computed tree.
    #[arg(long)]
    pub orthants: bool,
    /// Relative slack on integral comparisons.
    #[arg(long, default_value_t = INTEGRAL_SLACK)]
    pub slack: f64,
}

#[derive(Args, Debug)]
pub struct PlArgs {
    #[arg(long)]
    pub phi1: Option<PathBuf>,
    #[arg(long)]
    pub phi2: Option<PathBuf>,
    #[arg(long)]
    pub phi3: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Dimension of the default box-indicator triple.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
}

#[derive(Args, Debug)]
pub struct LogPlArgs {
    #[arg(long)]
    pub f1: Option<PathBuf>,
    #[arg(long)]
    pub f2: Option<PathBuf>,
    #[arg(long)]
    pub f3: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Dimension of the default exponential triple.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BodyFixture {
    Square,
    Polygon64,
    Triangle,
    Cube,
}

#[derive(Args, Debug)]
pub struct BodyArgs {
    /// Polytope JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BodyFixture::Square)]
    pub fixture: BodyFixture,
    /// Point to polarize about (comma-separated; default origin).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct SantaloPointArgs {
    #[command(flatten)]
    pub body: BodyArgs,
    #[arg(long, default_value_t = 5)]
    pub starts: usize,
}

/// Result of one command: the JSON document and the exit code.
pub struct Outcome {
    pub document: Value,
    pub code: i32,
}

impl Outcome {
    fn verdict(document: Value, passed: bool) -> Self {
        Self {
            document,
            code: if passed { EXIT_PASS } else { EXIT_FAIL },
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Runs the command; errors are mapped to exit codes by [`main_with`].
pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Partition(a) => partition(a, cli),
        Command::VerifySantalo(a) => verify_santalo(a, cli.seed),
        Command::Polar(a) => polar(a),
        Command::Conewise(a) => conewise(a),
        Command::Pl(a) => pl(a, cli.seed),
        Command::Logpl(a) => logpl(a, cli.seed),
        Command::BodyPolar(a) => body_polar(a),
        Command::SantaloPoint(a) => santalo_point(a, cli.seed),
        Command::BarycenterCounterexample => counterexample(cli.seed),
    }
}

/// Error record written in place of a result.
pub fn error_document(e: &SantaloError) -> Value {
    let mut err = json!({ "kind": e.kind(), "message": e.to_string() });
    if let SantaloError::NoBracket { best, .. } | SantaloError::NotConverged { best } = e {
        err["best"] = serde_json::to_value(ReportJson::from(best.as_ref())).unwrap_or(Value::Null);
    }
    json!({ "error": err })
}

pub fn exit_code(e: &SantaloError) -> i32 {
    if e.is_convergence() {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_INPUT
    }
}

/// Parses arguments, runs, writes the document and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let (document, code) = match run(&cli) {
        Ok(o) => (o.document, o.code),
        Err(e) => {
            eprintln!("error: {e}");
            (error_document(&e), exit_code(&e))
        }
    };
    match emit(cli.output.as_deref(), &document) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn emit(path: Option<&Path>, document: &Value) -> Result<()> {
    match path {
        Some(p) => io::write_json(p, document),
        None => {
            print!("{}", io::to_json_string(document)?);
            Ok(())
        }
    }
}

fn partition(a: &PartitionArgs, cli: &Cli) -> Result<Outcome> {
    let cloud = match &a.input {
        Some(p) => io::read_cloud(p)?,
        None => {
            if a.n == 0 {
                return Err(SantaloError::invalid("--n must be positive"));
            }
            match a.shape {
                CloudShape::Disc => sampling::uniform_ball_cloud(a.dim, a.n, cli.seed),
                CloudShape::Gaussian => sampling::gaussian_cloud(a.dim, a.n, cli.seed, a.even),
                CloudShape::Cube => sampling::uniform_cube_cloud(a.dim, a.n, cli.seed),
            }
        }
    };
    let cloud = if a.general_position {
        cloud.jittered(cli.seed)
    } else {
        cloud
    };
    if let Some(p) = &a.save_cloud {
        io::write_json(p, &CloudJson::from(&cloud))?;
    }
    let opts = SolverOptions {
        mass_tol: a.mass_tol,
        even_mode: a.even,
        seed: cli.seed,
        ..Default::default()
    };
    let report = yy_equipartition(&cloud, &opts)?;
    let verify = equipartition_verify(&report.tree, &cloud, a.mass_tol)?;
    let dual = dual_partition_check(&report.tree.recentered(), a.directions, cli.seed)?;
    if cloud.dim() == 2 {
        let svg_path = a
            .svg
            .clone()
            .or_else(|| cli.output.as_ref().map(|p| p.with_extension("svg")));
        if let Some(p) = svg_path {
            std::fs::write(p, render_svg(&report.tree, &cloud)?)?;
        }
    }
    let passed = verify.passed && dual.passed;
    let doc = json!({
        "report": to_value(&ReportJson::from(&report))?,
        "equipartition": to_value(&verify)?,
        "dual_partition": to_value(&dual)?,
        "passed": passed,
    });
    Ok(Outcome::verdict(doc, passed))
}

fn load_field(src: &FieldSource) -> Result<ScalarField> {
    if let Some(p) = &src.f {
        return io::read_field(p);
    }
    match src.fixture {
        FieldFixture::StepF => Ok(fixtures::step_f()),
        FieldFixture::StepG => Ok(fixtures::step_g()),
        FieldFixture::Gaussian => fixtures::gaussian_field(src.dim),
        FieldFixture::Box => fixtures::box_indicator(src.dim, 60),
        FieldFixture::Exponential => fixtures::exponential_field(src.dim, exponential_cells(src.dim)),
    }
}

/// Spacing 0.05 keeps the midpoint error of `exp(-x)` near 1e-4 per axis.
fn exponential_cells(n: usize) -> usize {
    if n <= 2 {
        600
    } else {
        60
    }
}

fn parse_point(text: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| SantaloError::invalid(format!("cannot parse point '{text}'")))?;
    crate::error::check_dim(n, v.len())?;
    Ok(v)
}

/// Yao-Yao tree of the measure with density `f`.
fn yy_tree(f: &ScalarField) -> Result<YaoYaoTree> {
    let cloud: WeightedPointCloud = cloud_from_grid(f)?;
    Ok(yy_equipartition(&cloud, &SolverOptions::default())?.tree)
}

fn resolve_center(which: &str, f: &ScalarField) -> Result<(Vec<f64>, Option<YaoYaoTree>)> {
    match which {
        "yy" => {
            let t = yy_tree(f)?;
            Ok((t.center().as_slice().to_vec(), Some(t)))
        }
        "origin" | "0" => Ok((vec![0.0; f.dim()], None)),
        other => Ok((parse_point(other, f.dim())?, None)),
    }
}

/// Symmetric cube `[-R, R]^n` around the origin containing the box of `f`,
/// at roughly the cell width of `f`.
fn default_out_grid(f: &ScalarField) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
    let b = f.bounds();
    let r = b.lo.iter().chain(&b.hi).fold(0.0, |m: f64, v| m.max(v.abs()));
    let shape = f
        .cell_widths()
        .iter()
        .map(|w| ((2.0 * r / w).round() as usize).max(1))
        .collect();
    (vec![-r; f.dim()], vec![r; f.dim()], shape)
}

/// Whether `g` is positive on a cell touching the boundary of its box,
/// i.e. the output box may cut off part of the polar.
fn touches_boundary(g: &ScalarField) -> bool {
    let shape = g.shape();
    g.values().iter().enumerate().any(|(mut i, &v)| {
        if v <= 0.0 {
            return false;
        }
        for &s in shape.iter().rev() {
            let k = i % s;
            if k == 0 || k + 1 == s {
                return true;
            }
            i /= s;
        }
        false
    })
}

const TRUNCATION_NOTE: &str = "the polar is positive on the edge of the output box and may be truncated; widen --out-lo/--out-hi";

struct Functional {
    f: ScalarField,
    g: ScalarField,
    center: Vec<f64>,
    tree: Option<YaoYaoTree>,
    cap: Option<f64>,
}

fn functional_inputs(a: &FunctionalArgs) -> Result<Functional> {
    let f = load_field(&a.source)?;
    let (center, tree) = resolve_center(&a.center, &f)?;
    let (g, cap) = match &a.g {
        Some(p) => (io::read_field(p)?, None),
        None => {
            let (lo, hi, shape) = default_out_grid(&f);
            let lo = a.out_lo.clone().unwrap_or(lo);
            let hi = a.out_hi.clone().unwrap_or(hi);
            let shape = a.out_shape.clone().unwrap_or(shape);
            let t = polar_transform(&f, &center, &a.weight, BoxBounds::new(lo, hi)?, shape, a.cap)?;
            (t.field, Some(t.cap))
        }
    };
    Ok(Functional {
        f,
        g,
        center,
        tree,
        cap,
    })
}

fn with_context(mut cert: Certificate, inputs: &Functional) -> Certificate {
    for (k, v) in inputs.center.iter().enumerate() {
        cert.push(format!("center_{k}"), *v);
    }
    if let Some(cap) = inputs.cap {
        cert.push("polar_cap", cap);
        if touches_boundary(&inputs.g) {
            cert = cert.note(TRUNCATION_NOTE);
        }
    }
    cert
}

fn verify_santalo(a: &FunctionalArgs, seed: u64) -> Result<Outcome> {
    let inputs = functional_inputs(a)?;
    let cert = santalo_verify(&inputs.f, &inputs.g, &a.weight)?;
    let duality = duality_check(&inputs.f, &inputs.g, &inputs.center, &a.weight, 10_000, seed)?;
    let cert = with_context(cert, &inputs).gate(duality.passed, "duality_ok");
    let passed = cert.passed;
    Ok(Outcome::verdict(to_value(&cert)?, passed))
}

fn polar(a: &FunctionalArgs) -> Result<Outcome> {
    if a.g.is_some() {
        return Err(SantaloError::invalid("polar computes g; do not pass --g"));
    }
    let inputs = functional_inputs(a)?;
    let doc = json!({
        "field": to_value(&FieldJson::from(&inputs.g))?,
        "center": inputs.center,
        "cap": inputs.cap,
        "truncated": touches_boundary(&inputs.g),
    });
    Ok(Outcome::verdict(doc, true))
}

fn conewise(a: &ConewiseArgs) -> Result<Outcome> {
    let inputs = functional_inputs(&a.functional)?;
    let tree = match (&a.tree, a.orthants, &inputs.tree) {
        (Some(p), _, _) => io::read_tree(p)?,
        (None, true, _) => YaoYaoTree::orthants(point(&inputs.center))?,
        (None, false, Some(t)) => t.clone(),
        (None, false, None) => yy_tree(&inputs.f)?,
    };
    let cert = conewise_trace_with(&inputs.f, &inputs.g, &a.functional.weight, &tree, a.slack)?;
    let cert = with_context(cert, &inputs);
    let passed = cert.passed;
    let doc = json!({ "tree": to_value(&TreeJson::from(&tree))?, "certificate": to_value(&cert)? });
    Ok(Outcome::verdict(doc, passed))
}

fn pl(a: &PlArgs, seed: u64) -> Result<Outcome> {
    let default = || fixtures::box_indicator(a.dim, 40);
    let load = |p: &Option<PathBuf>| p.as_ref().map_or_else(default, |p| io::read_field(p));
    let (p1, p2, p3) = (load(&a.phi1)?, load(&a.phi2)?, load(&a.phi3)?);
    let cert = pl_check(&p1, &p2, &p3, a.lambda, a.pairs, seed)?;
    let passed = cert.passed;
    Ok(Outcome::verdict(to_value(&cert)?, passed))
}

fn logpl(a: &LogPlArgs, seed: u64) -> Result<Outcome> {
    let default = || fixtures::exponential_field(a.dim, exponential_cells(a.dim));
    let load = |p: &Option<PathBuf>| p.as_ref().map_or_else(default, |p| io::read_field(p));
    let (f1, f2, f3) = (load(&a.f1)?, load(&a.f2)?, load(&a.f3)?);
    let cert = log_pl_check(&f1, &f2, &f3, a.pairs, seed)?;
    let subs = [&f1, &f2, &f3]
        .iter()
        .map(|f| exp_substitution_check(f))
        .collect::<Result<Vec<_>>>()?;
    let passed = cert.passed && subs.iter().all(|c| c.passed);
    let doc = json!({ "log_pl": to_value(&cert)?, "exp_substitution": to_value(&subs)?, "passed": passed });
    Ok(Outcome::verdict(doc, passed))
}

fn load_body(a: &BodyArgs) -> Result<ConvexPolytope> {
    if let Some(p) = &a.input {
        return io::read_polytope(p);
    }
    Ok(match a.fixture {
        BodyFixture::Square => fixtures::square(),
        BodyFixture::Polygon64 => fixtures::polygon64(),
        BodyFixture::Triangle => fixtures::triangle(),
        BodyFixture::Cube => ConvexPolytope::cube(3, 1.0)?,
    })
}

fn body_polar(a: &BodyArgs) -> Result<Outcome> {
    let p = load_body(a)?;
    let z = a.center.clone().unwrap_or_else(|| vec![0.0; p.dim()]);
    crate::error::check_dim(p.dim(), z.len())?;
    let shifted = p.translated(&z.iter().map(|v| -v).collect::<Vec<_>>());
    let q = polar_polytope(&shifted)?;
    let cert = blaschke_santalo_check(&p, &z)?;
    let doc = json!({
        "polar": to_value(&PolytopeJson::from(&q))?,
        "volume": exact_volume(&p).ok(),
        "polar_volume": exact_volume(&q).ok(),
        "certificate": to_value(&cert)?,
    });
    Ok(Outcome::verdict(doc, cert.passed))
}

fn santalo_point(a: &SantaloPointArgs, seed: u64) -> Result<Outcome> {
    let p = load_body(&a.body)?;
    let opts = SantaloPointOptions {
        starts: a.starts,
        seed,
        ..Default::default()
    };
    let report = santalo_point_body(&p, &opts)?;
    let cert = blaschke_santalo_check(&p, &report.point)?;
    let doc = json!({ "report": to_value(&report)?, "certificate": to_value(&cert)? });
    let code = if !report.agreed {
        EXIT_NOT_CONVERGED
    } else if cert.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    };
    Ok(Outcome { document: doc, code })
}

fn counterexample(seed: u64) -> Result<Outcome> {
    let (f, g) = (fixtures::step_f(), fixtures::step_g());
    let rho = RadialWeight::IndicatorUnit;
    let duality = duality_check(&f, &g, &[0.0], &rho, 100_000, seed)?;
    let cloud = cloud_from_grid(&f)?;
    let barycenter = cloud.barycenter()[0];
    let cert = santalo_verify(&f, &g, &rho)?
        .with("barycenter", barycenter)
        .with("duality_pairs", duality.get("pairs").unwrap_or(0.0))
        .with("duality_worst_excess", duality.get("worst_excess").unwrap_or(f64::NAN))
        .with("duality_passed", f64::from(u8::from(duality.passed)));

    let c = crate::equipartition::yy_center_1d(&cloud)?[0];
    let polar = polar_transform(&f, &[c], &rho, BoxBounds::new(vec![-3.0], vec![3.0])?, vec![6000], None)?;
    let repaired = santalo_verify(&f, &polar.field, &rho)?.with("center", c);
    let doc = json!({
        "lhs": cert.lhs,
        "rhs": cert.rhs,
        "margin": cert.margin,
        "passed": cert.passed,
        "diagnostics": to_value(&cert.diagnostics)?,
        "notes": cert.notes,
        "repaired": to_value(&repaired)?,
    });
    // the barycenter is not a Santalo point, so this command reports failure
    Ok(Outcome::verdict(doc, cert.passed))
}
