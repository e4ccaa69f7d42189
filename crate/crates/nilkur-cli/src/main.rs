//! Command-line front end for the `nilkur` engine.
//!
//! Subcommands cover the whole pipeline: cohomology of the ∂̄-complex,
//! Kuranishi series and obstruction certificates, explicit deformation of a
//! structure along a Maurer-Cartan solution, Heisenberg recognition, a
//! combined `analyze` report, and a fixed reference table over the built-in
//! algebras.
//!
//! Exit codes: `0` success, `1` invalid input (bad flags, malformed files,
//! out-of-range indices, unknown examples), `2` violated internal invariant
//! (never expected; any occurrence is a bug).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use nilkur::algebra::AlgebraSpec;
use nilkur::deform::{self, AnalysisReport};
use nilkur::dolbeault::{DolbeaultComplex, TensorBasis, VectorForm};
use nilkur::exact::GaussianRational;
use nilkur::kuranishi::{self, KurCertificate};
use nilkur::{Error, Result};

#[derive(Parser)]
#[command(
    name = "nilkur",
    version,
    about = "Deformations of 2-step nilmanifolds with abelian complex structure",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and print one consolidated report
    Analyze {
        #[command(flatten)]
        source: SpecSource,
        /// Kuranishi truncation order (at least 2)
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Print the reference table over the six standard built-in algebras
    Table,
    /// Cohomology dimensions of the ∂̄-complex, with harmonic bases
    Cohomology {
        #[command(flatten)]
        source: SpecSource,
        /// Report a single form degree in detail (omit for all degrees)
        #[arg(long)]
        degree: Option<usize>,
        /// Emit JSON
        #[arg(long)]
        json: bool,
    },
    /// Kuranishi series, obstruction polynomials, and dimension certificate
    Kuranishi {
        #[command(flatten)]
        source: SpecSource,
        /// Truncation order of the series (at least 1)
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Restrict to these 1-based harmonic parameters, comma-separated
        #[arg(long, value_delimiter = ',', value_name = "LIST")]
        params: Option<Vec<usize>>,
        /// Emit JSON
        #[arg(long)]
        json: bool,
    },
    /// Deform the algebra along a Maurer-Cartan solution read from a file
    Deform {
        #[command(flatten)]
        source: SpecSource,
        /// JSON file with the coefficients of the deformation form
        #[arg(long, value_name = "FILE")]
        phi: PathBuf,
        /// Emit JSON
        #[arg(long)]
        json: bool,
    },
    /// Decide whether the algebra is Heisenberg ⊕ line
    Recognize {
        #[command(flatten)]
        source: SpecSource,
        /// Emit JSON
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct SpecSource {
    /// Path to an algebra spec in JSON form
    #[arg(value_name = "SPEC", conflicts_with = "example")]
    spec: Option<PathBuf>,
    /// Name of a built-in algebra, e.g. `w6` or `torus(3,2)`
    #[arg(long, value_name = "NAME")]
    example: Option<String>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land on stdout and exit 0; genuine
            // usage errors land on stderr and exit 1.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => {}
        Ok(Err(err)) => {
            eprintln!("error: {err}");
            std::process::exit(if err.is_input_error() { 1 } else { 2 });
        }
        Err(_) => {
            eprintln!("error: internal invariant violated");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            source,
            order,
            json,
        } => cmd_analyze(&load_spec(&source)?, order, json),
        Command::Table => cmd_table(),
        Command::Cohomology {
            source,
            degree,
            json,
        } => cmd_cohomology(&load_spec(&source)?, degree, json),
        Command::Kuranishi {
            source,
            order,
            params,
            json,
        } => cmd_kuranishi(&load_spec(&source)?, order, params, json),
        Command::Deform { source, phi, json } => {
            let spec = load_spec(&source)?;
            let tilt = load_phi(&spec, &phi)?;
            cmd_deform(&spec, &tilt, json)
        }
        Command::Recognize { source, json } => cmd_recognize(&load_spec(&source)?, json),
    }
}

// ---------------------------------------------------------------------------
// Input loading
// ---------------------------------------------------------------------------

fn load_spec(source: &SpecSource) -> Result<AlgebraSpec> {
    match (&source.spec, &source.example) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|err| {
                Error::BadArgument(format!("cannot read {}: {err}", path.display()))
            })?;
            AlgebraSpec::from_json(&text)
        }
        (None, Some(name)) => parse_example(name),
        (None, None) => Err(Error::BadArgument(
            "no algebra given: pass a spec file or --example NAME".into(),
        )),
        (Some(_), Some(_)) => unreachable!("clap rejects spec together with --example"),
    }
}

/// Parse `name` or `name(p1,p2,...)` into a built-in algebra.
fn parse_example(text: &str) -> Result<AlgebraSpec> {
    let text = text.trim();
    let (name, params) = match text.split_once('(') {
        None => (text, Vec::new()),
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| {
                Error::BadArgument(format!(
                    "malformed example `{text}`: expected `name` or `name(p1,p2,...)`"
                ))
            })?;
            let params = inner
                .split(',')
                .map(|piece| {
                    piece.trim().parse::<usize>().map_err(|_| {
                        Error::BadArgument(format!(
                            "malformed example `{text}`: parameter `{}` is not a positive integer",
                            piece.trim()
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (name.trim(), params)
        }
    };
    AlgebraSpec::builtin(name, &params)
}

/// On-disk shape of a deformation form: a list of `wb{p} ⊗ (T|W){q}`
/// coefficients in the exact value grammar, e.g.
/// `{"entries": [{"p": 1, "q": 1, "value": "1/10"}]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PhiFile {
    entries: Vec<PhiEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PhiEntry {
    /// 1-based conjugate coframe index of `wb{p}`.
    p: usize,
    /// 1-based vector index: `1..=n` means `T_q`, `n+1..=n+m` means `W_{q-n}`.
    q: usize,
    value: String,
}

fn load_phi(spec: &AlgebraSpec, path: &Path) -> Result<VectorForm> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| Error::BadArgument(format!("cannot read {}: {err}", path.display())))?;
    let file: PhiFile = serde_json::from_str(&text).map_err(|err| {
        Error::BadArgument(format!(
            "malformed deformation file {}: {err}",
            path.display()
        ))
    })?;
    let tot = spec.total_dim();
    let basis = TensorBasis::new(tot, 1);
    let mut coeffs = vec![GaussianRational::zero(); basis.len()];
    for entry in &file.entries {
        let value: GaussianRational = entry.value.parse()?;
        let index = basis.index_of(&[entry.p], entry.q).ok_or_else(|| {
            Error::BadArgument(format!(
                "deformation entry (p={}, q={}) out of range: both indices must lie in 1..={tot}",
                entry.p, entry.q
            ))
        })?;
        coeffs[index] += &value;
    }
    Ok(VectorForm::from_constant_vec(tot, 1, &coeffs))
}

// ---------------------------------------------------------------------------
// Rendering helpers
// ---------------------------------------------------------------------------

fn param_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| format!("t{i}")).collect()
}

/// `wb1^wb3⊗T2` style label for one tensor-basis element.
fn basis_label(n: usize, p: &[usize], q: usize) -> String {
    let form = if p.is_empty() {
        "1".to_string()
    } else {
        p.iter()
            .map(|k| format!("wb{k}"))
            .collect::<Vec<_>>()
            .join("^")
    };
    let vector = if q <= n {
        format!("T{q}")
    } else {
        format!("W{}", q - n)
    };
    format!("{form}⊗{vector}")
}

/// Human rendering of a vector-valued form, e.g. `(t1*t6) wb2⊗T2`.
fn render_vector_form(n: usize, v: &VectorForm) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let basis = TensorBasis::new(v.tot(), v.degree());
    let names = param_names(v.nvars());
    let mut parts = Vec::new();
    for i in 0..v.len() {
        let coeff = v.coeff(i);
        if coeff.is_zero() {
            continue;
        }
        let (p, q) = basis.element(i);
        let label = basis_label(n, p, q);
        let rendered = coeff.display(&names).to_string();
        parts.push(match rendered.as_str() {
            "1" => label,
            "-1" => format!("-{label}"),
            s if wrapped_in_parens(s) => format!("{rendered} {label}"),
            _ => format!("({rendered}) {label}"),
        });
    }
    parts.join(" + ")
}

/// True when `s` is entirely enclosed by one matching pair of parentheses,
/// so the renderer can reuse them instead of stacking a second pair.
fn wrapped_in_parens(s: &str) -> bool {
    let bytes = s.as_bytes();
    if bytes.first() != Some(&b'(') || bytes.last() != Some(&b')') {
        return false;
    }
    let mut depth = 0usize;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return i == bytes.len() - 1;
                }
            }
            _ => {}
        }
    }
    false
}

fn spec_header(spec: &AlgebraSpec) -> String {
    format!(
        "algebra: {} (n = {}, m = {})",
        spec.display_name(),
        spec.n(),
        spec.m()
    )
}

/// `dim 5` when the bounds agree, `dim in [3, 4]` otherwise.
fn dim_phrase(lower: usize, upper: usize) -> String {
    if lower == upper {
        format!("dim {lower}")
    } else {
        format!("dim in [{lower}, {upper}]")
    }
}

fn certificate_json(cert: &KurCertificate) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    obj.insert("status".into(), json!(cert.status.label()));
    obj.insert("lower".into(), json!(cert.dim_lower));
    obj.insert("upper".into(), json!(cert.dim_upper));
    if let Some(set) = &cert.vanishing_set {
        let one_based: Vec<usize> = set.iter().map(|i| i + 1).collect();
        obj.insert("vanishing_set".into(), json!(one_based));
    }
    if let Some(rank) = cert.jacobian_rank {
        obj.insert("jacobian_rank".into(), json!(rank));
    }
    serde_json::Value::Object(obj)
}

fn certificate_human(cert: &KurCertificate) -> String {
    let mut line = format!(
        "certificate: {}, {}",
        cert.status.label(),
        dim_phrase(cert.dim_lower, cert.dim_upper)
    );
    if let Some(set) = &cert.vanishing_set {
        let names: Vec<String> = set.iter().map(|i| format!("t{}", i + 1)).collect();
        let _ = write!(line, ", vanishing set {{{}}}", names.join(", "));
    }
    if let Some(rank) = cert.jacobian_rank {
        let _ = write!(line, ", jacobian rank {rank}");
    }
    line
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_analyze(spec: &AlgebraSpec, order: usize, json: bool) -> Result<()> {
    let report = deform::analyze(spec, order)?;
    if json {
        println!("{}", report.to_json());
        return Ok(());
    }
    let mut out = String::new();
    let _ = writeln!(out, "{}", spec_header(spec));
    let _ = writeln!(
        out,
        "h^0 = {}, h^1 = {}, h^2 = {}",
        report.h0, report.h1, report.h2
    );
    let _ = writeln!(out, "dim ker dbar_1 = {}", report.dim_ker_dbar1);
    let _ = writeln!(out, "generic d = {}", report.generic_d);
    let _ = writeln!(out, "dim abel = {}", report.dim_abel);
    let _ = writeln!(
        out,
        "kuranishi: {}, {}",
        report.kur.status,
        dim_phrase(report.kur.lower, report.kur.upper)
    );
    if report.obstructions.is_empty() {
        let _ = writeln!(out, "obstructions: none through the computed order");
    } else {
        let _ = writeln!(out, "obstructions: {}", report.obstructions.join("; "));
    }
    let _ = writeln!(out, "heisenberg: {}", report.heisenberg.verdict);
    for warning in &report.warnings {
        let _ = writeln!(out, "warning: {warning}");
    }
    print!("{out}");
    Ok(())
}

/// The six standard algebras, in the fixed row order of the reference table.
const TABLE_ROWS: [(&str, &[usize]); 6] = [
    ("torus", &[2, 1]),
    ("heisenberg_abelian", &[2, 1]),
    ("heisenberg_abelian", &[1, 2]),
    ("hxh", &[1, 1]),
    ("w6", &[]),
    ("p6", &[]),
];

fn cmd_table() -> Result<()> {
    // Rows are independent; compute them concurrently and assemble in the
    // fixed order above so the output is byte-identical across runs.
    let reports: Vec<Result<(String, AnalysisReport)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = TABLE_ROWS
            .iter()
            .map(|(name, params)| {
                scope.spawn(move || {
                    let spec = AlgebraSpec::builtin(name, params)?;
                    let report = deform::analyze(&spec, 4)?;
                    Ok((spec.display_name(), report))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("table worker panicked"))
            .collect()
    });

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<25}{:<4}{:<5}{:<5}{:<7}abel",
        "algebra", "d", "h^0", "h^1", "kur"
    );
    for row in reports {
        let (name, report) = row?;
        let d_cell = if name == "w6" {
            format!("{}*", report.dim_ker_dbar1)
        } else {
            report.dim_ker_dbar1.to_string()
        };
        let kur_cell = {
            let base = if report.kur.lower == report.kur.upper {
                report.kur.lower.to_string()
            } else {
                format!("{}..{}", report.kur.lower, report.kur.upper)
            };
            if name == "p6" {
                format!("{base}+")
            } else {
                base
            }
        };
        let _ = writeln!(
            out,
            "{:<25}{:<4}{:<5}{:<5}{:<7}{}",
            name, d_cell, report.h0, report.h1, kur_cell, report.dim_abel
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "*  the dbar_1 kernel of w6 is 7-dimensional, but its wb3⊗T1 direction is\n   obstructed at second order; the certified deformation dimension is 5."
    );
    let _ = writeln!(
        out,
        "+  the p6 obstructions vanish through order 4 while the series does not\n   terminate, so the upper bound is certified to that order only."
    );
    print!("{out}");
    Ok(())
}

fn cmd_cohomology(spec: &AlgebraSpec, degree: Option<usize>, json: bool) -> Result<()> {
    let complex = DolbeaultComplex::new(spec);
    let tot = spec.total_dim();
    match degree {
        None => {
            let dims: Vec<usize> = (0..=tot).map(|k| complex.cohomology_dim(k)).collect();
            if json {
                println!("{}", json!({ "dims": dims }));
            } else {
                let mut out = String::new();
                let _ = writeln!(out, "{}", spec_header(spec));
                for (k, dim) in dims.iter().enumerate() {
                    let _ = writeln!(out, "h^{k} = {dim}");
                }
                print!("{out}");
            }
        }
        Some(k) => {
            let cohomology = complex.cohomology(k)?;
            let rendered: Vec<String> = cohomology
                .harmonic_basis
                .iter()
                .map(|v| render_vector_form(spec.n(), v))
                .collect();
            if json {
                println!(
                    "{}",
                    json!({ "degree": k, "dim": cohomology.dim, "harmonic": rendered })
                );
            } else {
                let mut out = String::new();
                let _ = writeln!(out, "{}", spec_header(spec));
                let _ = writeln!(out, "h^{k} = {}", cohomology.dim);
                if !rendered.is_empty() {
                    let _ = writeln!(out, "harmonic basis:");
                    for element in &rendered {
                        let _ = writeln!(out, "  {element}");
                    }
                }
                print!("{out}");
            }
        }
    }
    Ok(())
}

fn cmd_kuranishi(
    spec: &AlgebraSpec,
    order: usize,
    params: Option<Vec<usize>>,
    json: bool,
) -> Result<()> {
    // CLI parameters are 1-based; the engine indexes the harmonic basis from 0.
    let n_params = DolbeaultComplex::new(spec).cohomology_dim(1);
    let restrict: Option<Vec<usize>> = params
        .as_ref()
        .map(|list| {
            list.iter()
                .map(|&p| {
                    if p == 0 {
                        Err(Error::BadArgument(
                            "--params indices are 1-based; 0 is not a parameter".into(),
                        ))
                    } else if p > n_params {
                        Err(Error::BadArgument(format!(
                            "--params index {p} out of range: this algebra has \
                             {n_params} harmonic parameters (1..={n_params})"
                        )))
                    } else {
                        Ok(p - 1)
                    }
                })
                .collect::<Result<Vec<usize>>>()
        })
        .transpose()?;
    let series = kuranishi::series(spec, order, restrict.as_deref())?;
    let obstructions = kuranishi::obstructions(spec, &series)?;
    let names = param_names(series.n_params());
    let rendered_obstructions: Vec<String> = obstructions
        .polys
        .iter()
        .map(|poly| {
            if poly.is_zero() {
                "0".to_string()
            } else {
                poly.display(&names).to_string()
            }
        })
        .collect();
    let rendered_phi: Vec<String> = (1..=order)
        .map(|r| render_vector_form(spec.n(), series.phi(r)))
        .collect();
    // The certificate describes the full parameter space, so it is only
    // reported for unrestricted runs.
    let certificate = if restrict.is_none() {
        Some(kuranishi::certificate(spec, order)?)
    } else {
        None
    };

    if json {
        let mut obj = serde_json::Map::new();
        obj.insert("order".into(), json!(order));
        if let Some(list) = &params {
            obj.insert("params".into(), json!(list));
        }
        obj.insert("n_params".into(), json!(series.n_params()));
        obj.insert("phi".into(), json!(rendered_phi));
        obj.insert("obstructions".into(), json!(rendered_obstructions));
        if let Some(cert) = &certificate {
            obj.insert("certificate".into(), certificate_json(cert));
        }
        println!("{}", serde_json::Value::Object(obj));
        return Ok(());
    }

    let mut out = String::new();
    let _ = writeln!(out, "{}", spec_header(spec));
    match &params {
        Some(list) => {
            let shown: Vec<String> = list.iter().map(|p| format!("t{p}")).collect();
            let _ = writeln!(
                out,
                "parameters: {} of {}, restricted to {{{}}}",
                list.len(),
                series.n_params(),
                shown.join(", ")
            );
        }
        None => {
            let _ = writeln!(out, "parameters: {}", series.n_params());
        }
    }
    for (r, phi) in rendered_phi.iter().enumerate() {
        let _ = writeln!(out, "phi_{} = {phi}", r + 1);
    }
    if rendered_obstructions.is_empty() {
        let _ = writeln!(
            out,
            "obstructions: none (no harmonic directions in degree 2)"
        );
    } else {
        let _ = writeln!(
            out,
            "obstructions (valid through total degree {}):",
            obstructions.truncation_degree
        );
        for (i, f) in rendered_obstructions.iter().enumerate() {
            let _ = writeln!(out, "  f{} = {f}", i + 1);
        }
    }
    if let Some(cert) = &certificate {
        let _ = writeln!(out, "{}", certificate_human(cert));
    }
    print!("{out}");
    Ok(())
}

fn cmd_deform(spec: &AlgebraSpec, tilt: &VectorForm, json: bool) -> Result<()> {
    let outcome = deform::deform(spec, tilt)?;
    if json {
        let spec_value: serde_json::Value = serde_json::from_str(&outcome.spec.to_json())
            .map_err(|err| Error::Internal(format!("emitted spec failed to re-parse: {err}")))?;
        println!(
            "{}",
            json!({ "spec": spec_value, "warnings": outcome.warnings })
        );
        return Ok(());
    }
    let mut out = String::new();
    let _ = writeln!(out, "deformation successful");
    let _ = writeln!(out, "{}", spec_header(&outcome.spec));
    let entries: Vec<String> = outcome
        .spec
        .e_entries()
        .map(|(&(alpha, k, j), value)| format!("  E^{alpha}_{{{k},{j}}} = {value}"))
        .collect();
    if entries.is_empty() {
        let _ = writeln!(out, "E entries: none (the deformed algebra is abelian)");
    } else {
        let _ = writeln!(out, "E entries:");
        for entry in &entries {
            let _ = writeln!(out, "{entry}");
        }
    }
    for warning in &outcome.warnings {
        let _ = writeln!(out, "warning: {warning}");
    }
    print!("{out}");
    Ok(())
}

fn cmd_recognize(spec: &AlgebraSpec, json: bool) -> Result<()> {
    let certificate = deform::recognize_heisenberg(spec);
    if json {
        let mut obj = serde_json::Map::new();
        obj.insert("verdict".into(), json!(certificate.verdict.label()));
        if let Some(unit) = &certificate.unit {
            obj.insert("unit".into(), json!(unit.to_string()));
        }
        if let Some(scalar) = &certificate.scalar {
            obj.insert("scalar".into(), json!(scalar.to_string()));
        }
        obj.insert("diagnostics".into(), json!(certificate.diagnostics));
        println!("{}", serde_json::Value::Object(obj));
        return Ok(());
    }
    let mut out = String::new();
    let _ = writeln!(out, "{}", spec_header(spec));
    let _ = writeln!(out, "verdict: {}", certificate.verdict.label());
    if let Some(unit) = &certificate.unit {
        let _ = writeln!(out, "unit: {unit}");
    }
    if let Some(scalar) = &certificate.scalar {
        let _ = writeln!(out, "scalar: {scalar}");
    }
    if !certificate.diagnostics.is_empty() {
        let _ = writeln!(out, "diagnostics:");
        for line in &certificate.diagnostics {
            let _ = writeln!(out, "  - {line}");
        }
    }
    print!("{out}");
    Ok(())
}
