//! Command-line front end: JSON in, JSON (or plain text) out.
//!
//! Exit codes: 0 symmetric / found, 1 not symmetric / not found,
//! 2 indeterminate or numerical failure, 64 bad input.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use symcontract::blaschke::{compressed_shift, detect_mobius_relation, FiniteBlaschke};
use symcontract::charfun::{classify, Contraction};
use symcontract::family::{
    build_t, classify_family, cross_validate, point_fixe_bridge, random_blaschke, random_spec, theta_product_check,
    Branch, FamilySpec, BRANCHES,
};
use symcontract::grid::{check_in_disk, disk_grid};
use symcontract::inner2x2::{build_theta, family_pair, symmetrizable_test, symmetrizer, verify_inner, InnerPair, InnerPairRepr};
use symcontract::io::{complex_to_json, matrix_to_rows, parse_matrix, SCHEMA};
use symcontract::numlin::{c, symmetry_defect, takagi, CMatrix};
use symcontract::random::{random_contraction, random_unitary, rng_from_seed, SeededRng};
use symcontract::Error;

pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "symcontract", version, about = "Tests finite-dimensional contractions for complex symmetry")]
pub struct Cli {
    /// Tolerance for witness residuals.
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive)]
    pub tol: f64,
    /// Number of sample points in the disk.
    #[arg(long, global = true, default_value_t = 24, value_parser = clap::value_parser!(u32).range(8..))]
    pub grid: u32,
    #[arg(long, global = true, env = "SYMCONTRACT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a square matrix (`-` reads stdin).
    Analyze { file: PathBuf },
    /// Sample the characteristic function.
    Charfun {
        file: PathBuf,
        /// Points as `re` or `re,im`; defaults to the disk grid.
        #[arg(long = "z", allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Check a 2×2 inner function given by a pair `(a, b)`.
    Inner2x2 { file: PathBuf },
    /// Classify a family specification `{u, v, Y}`.
    Family {
        file: PathBuf,
        /// Also write the assembled matrix as a matrix document.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Look for `(μ, λ)` with `v = μ·b_λ(u)`.
    Relate { u: PathBuf, v: PathBuf },
    /// Generate a seeded instance.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// Family branch (family and pair kinds); drawn from the seed if absent.
        #[arg(long, value_enum)]
        branch: Option<BranchArg>,
        /// Matrix dimension or Blaschke degree.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=64))]
        size: u32,
    },
    /// Takagi factorization `A = W·diag(s)·Wᵀ` of a symmetric matrix.
    Takagi { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Matrix,
    Symmetric,
    Blaschke,
    Family,
    Pair,
    Shift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Zero,
    Unimodular,
    Mobius,
    Unrelated,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Zero => Branch::Zero,
            BranchArg::Unimodular => Branch::Unimodular,
            BranchArg::Mobius => Branch::Mobius,
            BranchArg::Unrelated => Branch::Unrelated,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be a positive number".into())
    }
}

/// A failed command: message and exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NumericalDegeneracy(_)
            | Error::FixedPointViolated(_)
            | Error::FactorizationFailed(_)
            | Error::CoincidenceFailed(_) => 2,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

/// A report and the exit code it carries.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let grid = cli.grid as usize;
    let (mut report, code) = match &cli.command {
        Command::Analyze { file } => analyze(&read_input(file)?, grid, cli.tol, cli.seed)?,
        Command::Charfun { file, points } => charfun(&read_input(file)?, points, grid, cli.seed)?,
        Command::Inner2x2 { file } => inner(&read_input(file)?, grid, cli.seed)?,
        Command::Family { file, export } => family(&read_input(file)?, export.as_deref(), grid, cli.tol, cli.seed)?,
        Command::Relate { u, v } => relate(&read_input(u)?, &read_input(v)?)?,
        Command::Gen { kind, branch, size } => (generate(*kind, *branch, *size as usize, cli.seed)?, 0),
        Command::Takagi { file } => factor(&read_input(file)?, cli.tol)?,
    };
    let mut doc = Map::new();
    doc.insert("schema".into(), json!(SCHEMA));
    if let Value::Object(m) = &mut report {
        doc.append(m);
    }
    Ok(Outcome { report: Value::Object(doc), code })
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            render_text(report, "", &mut out);
            out
        }
    }
}

fn render_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(x, &key, out);
            }
        }
        _ => out.push_str(&format!("{prefix}: {v}\n")),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
    };
    Ok(text)
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::usage(format!("{what} JSON: {e}")))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn opt_rows(m: Option<&CMatrix>) -> Value {
    m.map_or(Value::Null, |m| json!(matrix_to_rows(m)))
}

fn analyze(text: &str, grid_size: usize, tol: f64, seed: u64) -> Result<(Value, i32), Failure> {
    let t = Contraction::new(parse_matrix(text)?)?;
    let grid = disk_grid(grid_size, t.dim(), seed)?;
    let r = classify(&t, &grid, tol, seed)?;
    let report = json!({
        "command": "analyze",
        "dim": t.dim(),
        "verdict": r.verdict,
        "verdict_i": r.verdict_i,
        "verdict_ii": r.verdict_ii,
        "disagreement": r.disagreement,
        "residuals": { "i": r.residual_i, "ii": r.residual_ii },
        "certificates": { "i": r.certificate_i, "ii": r.certificate_ii },
        "defects": { "d_t": r.d_t, "d_t_star": r.d_t_star },
        "intertwiner_dim": r.intertwiner_dim,
        "constraint_dim_ii": r.constraint_dim_ii,
        "cnu": r.cnu,
        "c00": r.c00,
        "spectral_radius": r.spectral_radius,
        "witnesses": { "u": opt_rows(r.witness_i.as_ref()), "j": opt_rows(r.witness_ii.as_ref()) },
        "grid_size": grid.len(),
    });
    Ok((report, r.verdict.exit_code()))
}

fn parse_point(s: &str) -> Result<Complex64, Failure> {
    let bad = || Failure::usage(format!("point {s:?} is not `re` or `re,im`"));
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>());
    let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
    let im = match parts.next() {
        Some(p) => p.map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(c(re, im))
}

fn charfun(text: &str, points: &[String], grid_size: usize, seed: u64) -> Result<(Value, i32), Failure> {
    let t = Contraction::new(parse_matrix(text)?)?;
    let points = if points.is_empty() {
        disk_grid(grid_size, t.dim(), seed)?
    } else {
        points.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>, _>>()?
    };
    for &z in &points {
        check_in_disk(z)?;
    }
    let samples = t.samples(&points)?;
    let mut report = to_value(&samples);
    report["command"] = json!("charfun");
    report["d_t"] = json!(t.defect().d_t);
    report["d_t_star"] = json!(t.defect().d_t_star);
    Ok((report, 0))
}

fn inner(text: &str, grid_size: usize, seed: u64) -> Result<(Value, i32), Failure> {
    let repr: InnerPairRepr = parse(text, "inner pair")?;
    let pair = InnerPair::from_repr(&repr)?;
    let check = verify_inner(&pair)?;
    if !check.passed {
        return Err(Failure::usage(format!("not an inner pair: {}", check.violations.join("; "))));
    }
    let test = symmetrizable_test(&pair)?;
    let mut report = json!({
        "command": "inner2x2",
        "inner": check,
        "symmetrizable": test.witness.is_some(),
        "test": test,
        "symmetrizer": null,
    });
    if let Some((g, t)) = test.witness {
        let s = symmetrizer(&pair, g, t)?;
        let theta = build_theta(&pair)?;
        let grid = disk_grid(grid_size, pair.phi().degree() + 1, seed)?;
        let mut v = to_value(&s);
        v["symmetry_residual"] = json!(s.symmetry_residual(&theta, &grid));
        report["symmetrizer"] = v;
    }
    let code = if test.witness.is_some() { 0 } else { 1 };
    Ok((report, code))
}

fn family(
    text: &str,
    export: Option<&Path>,
    grid_size: usize,
    tol: f64,
    seed: u64,
) -> Result<(Value, i32), Failure> {
    let spec: FamilySpec = parse(text, "family spec")?;
    let cv = cross_validate(&spec, grid_size, tol, seed)?;
    let r = spec.y.norm();
    let theta = if r > 1e-12 && r < 1.0 - 1e-12 {
        let t = build_t(&spec)?;
        let grid = disk_grid(grid_size, t.dim(), seed)?;
        match theta_product_check(&spec, &grid, seed) {
            Ok(p) => to_value(&p),
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    let bridge = if classify_family(&spec).mobius.is_some() {
        match point_fixe_bridge(&spec) {
            Ok(p) => to_value(&p),
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    if let Some(path) = export {
        let t = build_t(&spec)?;
        let doc = json!({ "schema": SCHEMA, "kind": "matrix", "matrix": matrix_to_rows(t.matrix()) });
        write_file(path, &render(&doc, Format::Json))?;
    }
    let report = json!({
        "command": "family",
        "symbolic": cv.symbolic,
        "numeric": {
            "verdict": cv.numeric.verdict,
            "verdict_i": cv.numeric.verdict_i,
            "verdict_ii": cv.numeric.verdict_ii,
            "residuals": { "i": cv.numeric.residual_i, "ii": cv.numeric.residual_ii },
            "certificates": { "i": cv.numeric.certificate_i, "ii": cv.numeric.certificate_ii },
            "defects": { "d_t": cv.numeric.d_t, "d_t_star": cv.numeric.d_t_star },
            "c00": cv.numeric.c00,
        },
        "agreement": cv.agreement,
        "indeterminate": cv.indeterminate,
        "theta_product": theta,
        "point_fixe": bridge,
    });
    Ok((report, cv.numeric.verdict.exit_code()))
}

fn relate(u: &str, v: &str) -> Result<(Value, i32), Failure> {
    let u: FiniteBlaschke = parse(u, "Blaschke product")?;
    let v: FiniteBlaschke = parse(v, "Blaschke product")?;
    Ok(match detect_mobius_relation(&u, &v) {
        Some(m) => {
            let mut report = to_value(&m);
            report["command"] = json!("relate");
            report["found"] = json!(true);
            (report, 0)
        }
        None => (json!({ "command": "relate", "found": false }), 1),
    })
}

fn factor(text: &str, tol: f64) -> Result<(Value, i32), Failure> {
    let a = parse_matrix(text)?;
    let scale = a.norm().max(1.0);
    if !a.is_square() || symmetry_defect(&a) > tol * scale {
        return Err(Error::NotSymmetric(symmetry_defect(&a)).into());
    }
    let t = takagi(&a)?;
    let residual = (t.reconstruct() - &a).norm() / scale;
    let report = json!({
        "command": "takagi",
        "w": matrix_to_rows(&t.w),
        "s": t.s,
        "residual": residual,
    });
    Ok((report, 0))
}

fn generate(kind: GenKind, branch: Option<BranchArg>, size: usize, seed: u64) -> Result<Value, Failure> {
    let mut rng = rng_from_seed(seed);
    let pick_branch = |rng: &mut SeededRng| -> Branch {
        branch.map(Into::into).unwrap_or_else(|| BRANCHES[rng.random_range(0..BRANCHES.len())])
    };
    let (name, mut body) = match kind {
        GenKind::Matrix => ("matrix", json!({ "matrix": matrix_to_rows(&random_contraction(&mut rng, size, 0.95)) })),
        GenKind::Symmetric => {
            // W·diag(s)·Wᵀ with singular values below one.
            let w = random_unitary(&mut rng, size);
            let s = CMatrix::from_diagonal(&symcontract::CVector::from_fn(size, |i, _| {
                c(0.9 * (i + 1) as f64 / size as f64, 0.0)
            }));
            ("symmetric", json!({ "matrix": matrix_to_rows(&(&w * s * w.transpose())) }))
        }
        GenKind::Blaschke => ("blaschke", to_value(&random_blaschke(&mut rng, size))),
        GenKind::Shift => {
            let phi = random_blaschke(&mut rng, size);
            let t = compressed_shift(&phi)?;
            ("shift", json!({ "phi": phi, "matrix": matrix_to_rows(t.matrix()) }))
        }
        GenKind::Family => {
            let b = pick_branch(&mut rng);
            let mut v = to_value(&random_spec(&mut rng, b));
            v["branch"] = to_value(&b);
            ("family", v)
        }
        GenKind::Pair => {
            let b = pick_branch(&mut rng);
            let spec = random_spec(&mut rng, b);
            let r = spec.y.norm();
            let pair = family_pair(&spec.u, &spec.v, c(r, 0.0), c((1.0 - r * r).max(0.0).sqrt(), 0.0))?;
            let mut v = to_value(&pair.to_repr());
            v["branch"] = to_value(&b);
            v["Y"] = json!(complex_to_json(spec.y));
            ("pair", v)
        }
    };
    body["kind"] = json!(name);
    body["seed"] = json!(seed);
    Ok(body)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}
