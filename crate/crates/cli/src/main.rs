use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use oddcox::chambers::{search_coxeter_polytopes, ChamberSet, SearchStatus, TilingReport, DEFAULT_NODE_BUDGET};
use oddcox::constructor::{check_certificate, construct, Certificate, CertificateFile, Construction};
use oddcox::criterion::{classify, Verdict};
use oddcox::diagrams::{parse_coxeter_matrix, CoxeterMatrix};
use oddcox::render::{render_rank3, SceneParams};
use oddcox::words::CoxeterGroup;

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "ODDCOX_THREADS";

#[derive(Parser)]
#[command(name = "oddcox", version, about = "Reflection subgroups of odd-angled Coxeter groups")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the group has a finite-index proper reflection subgroup.
    Classify { system: PathBuf },
    /// Build and verify a fundamental domain for such a subgroup.
    Construct {
        system: PathBuf,
        /// Write the certificate here instead of to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check an untrusted certificate.
    Verify {
        system: PathBuf,
        certificate: PathBuf,
        /// Ball radius for the tiling check [default: 2 * longest chamber + 2].
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Exhaustively look for small Coxeter polytopes containing the identity.
    Search {
        system: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        #[arg(long, default_value_t = 8)]
        radius: usize,
        /// Maximum number of candidate expansions.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Draw a rank-3 tessellation as SVG.
    Render {
        system: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Certificate whose chambers are filled.
        #[arg(long)]
        highlight: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Canvas width and height in pixels.
        #[arg(long, default_value_t = 800)]
        canvas: u32,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Construct { .. } => "construct",
            Command::Verify { .. } => "verify",
            Command::Search { .. } => "search",
            Command::Render { .. } => "render",
        }
    }
}

/// A failed command: exit code 1 for bad input, 2 for internal failures.
struct Failure {
    code: u8,
    message: String,
    result: Option<Value>,
    /// Printed to standard output instead of an error line in text mode.
    text: Option<String>,
}

impl Failure {
    fn input(e: impl Into<anyhow::Error>) -> Self {
        let e = e.into();
        let code = match e.downcast_ref::<oddcox::Error>() {
            Some(oddcox::Error::Verification(_) | oddcox::Error::Hypothesis(_)) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: format!("{e:#}"),
            result: None,
            text: None,
        }
    }
}

struct Success {
    text: String,
    result: Value,
}

type Outcome = Result<Success, Failure>;

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    args: Vec<String>,
    version: &'a str,
    status: &'a str,
    error: Option<Value>,
    elapsed_seconds: f64,
    result: Option<Value>,
}

fn read_system(path: &Path) -> anyhow::Result<CoxeterMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_coxeter_matrix(&text).with_context(|| format!("in {}", path.display()))
}

fn read_certificate(path: &Path) -> anyhow::Result<CertificateFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    CertificateFile::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn write_output(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn one_based(vertices: &[usize]) -> Vec<usize> {
    vertices.iter().map(|v| v + 1).collect()
}

fn vertex_set(vertices: &[usize]) -> String {
    let parts: Vec<String> = vertices.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn verdict_text(verdict: &Verdict) -> String {
    match verdict {
        Verdict::HasSubgroup { vertices, kind, .. } => format!(
            "HAS finite-index reflection subgroup (type {}: {}) in component {}",
            kind.number(),
            kind.description(),
            vertex_set(vertices)
        ),
        Verdict::NoSubgroup { forbidden } => {
            let parts: Vec<String> = forbidden
                .iter()
                .map(|f| format!("minimal forbidden subdiagram {} labels {}", vertex_set(&f.vertices), f.labels_text()))
                .collect();
            format!("NO finite-index reflection subgroup: {}", parts.join("; "))
        }
    }
}

fn verdict_json(verdict: &Verdict) -> Value {
    match verdict {
        Verdict::HasSubgroup {
            component,
            vertices,
            kind,
            triangle,
        } => json!({
            "answer": "has-subgroup",
            "component": component,
            "vertices": one_based(vertices),
            "type": kind.number(),
            "reason": kind.description(),
            "triangle": triangle.map(|t| one_based(&t)),
        }),
        Verdict::NoSubgroup { forbidden } => json!({
            "answer": "no-subgroup",
            "forbidden": forbidden
                .iter()
                .map(|f| json!({"vertices": one_based(&f.vertices), "labels": f.labels_text()}))
                .collect::<Vec<_>>(),
        }),
    }
}

fn tiling_json(t: &TilingReport) -> Value {
    json!({
        "region": t.region.to_string(),
        "region_size": t.region_size,
        "translates": t.translates,
        "covered": t.covered,
        "overlap": t.overlap,
        "index": t.index,
    })
}

fn certificate_json(c: &Certificate) -> Value {
    json!({
        "index": c.index,
        "provenance": c.provenance.tag(),
        "generators": c.generators.len(),
        "chambers": c.chambers.len(),
        "max_length": c.chambers.max_length(),
        "verified": c.verified,
        "tiling": tiling_json(&c.tiling),
    })
}

fn cmd_classify(system: &Path) -> Outcome {
    let matrix = read_system(system).map_err(Failure::input)?;
    let verdict = classify(&matrix);
    Ok(Success {
        text: verdict_text(&verdict),
        result: json!({ "verdict": verdict_json(&verdict) }),
    })
}

fn cmd_construct(system: &Path, out: Option<&Path>) -> Outcome {
    let matrix = read_system(system).map_err(Failure::input)?;
    match construct(&matrix).map_err(Failure::input)? {
        Construction::NoSubgroup(verdict) => Ok(Success {
            text: verdict_text(&verdict),
            result: json!({ "verdict": verdict_json(&verdict), "certificate": null, "out": null }),
        }),
        Construction::Certificate(cert) => {
            let summary = format!(
                "certificate: index {}, {} generators ({})",
                cert.index,
                cert.generators.len(),
                cert.provenance
            );
            let text = match out {
                Some(path) => {
                    write_output(path, &cert.to_text()).map_err(Failure::input)?;
                    format!("{summary}\nwritten to {}", path.display())
                }
                None => format!("{summary}\n{}", cert.to_text().trim_end()),
            };
            Ok(Success {
                text,
                result: json!({
                    "verdict": verdict_json(&classify(&matrix)),
                    "certificate": certificate_json(&cert),
                    "out": out.map(|p| p.display().to_string()),
                }),
            })
        }
    }
}

fn cmd_verify(system: &Path, certificate: &Path, radius: Option<usize>) -> Outcome {
    let matrix = read_system(system).map_err(Failure::input)?;
    let file = read_certificate(certificate).map_err(Failure::input)?;
    let longest = file.chambers.iter().map(|w| w.len()).max().unwrap_or(0);
    let (check, note) = match radius {
        Some(r) => (check_certificate(&matrix, &file, Some(r)).map_err(Failure::input)?, None),
        None => match check_certificate(&matrix, &file, Some(2 * longest + 2)) {
            Ok(check) => (check, None),
            Err(oddcox::Error::BudgetExceeded { .. }) => (
                check_certificate(&matrix, &file, None).map_err(Failure::input)?,
                Some(format!(
                    "ball of radius {} too large; tiling checked on the residues around the chambers",
                    2 * longest + 2
                )),
            ),
            Err(e) => return Err(Failure::input(e)),
        },
    };
    let tiling = check.verification.as_ref().and_then(|v| v.tiling.as_ref());
    let result = json!({
        "passed": check.passed(),
        "problems": check.problems,
        "index": file.index,
        "chambers": file.chambers.len(),
        "note": note,
        "tiling": tiling.map(tiling_json),
    });
    if !check.passed() {
        let mut text = String::from("FAIL");
        for p in &check.problems {
            text.push_str(&format!("\n  {p}"));
        }
        return Err(Failure {
            code: 1,
            message: format!("certificate rejected: {}", check.problems.join("; ")),
            result: Some(result),
            text: Some(text),
        });
    }
    let t = tiling.expect("a passing check has a tiling report");
    let mut text = format!(
        "PASS: index {}, {} generators; translates tile the {} ({} chambers, {} translates)",
        file.index,
        file.generators.len(),
        t.region,
        t.region_size,
        t.translates
    );
    if let Some(n) = &note {
        text = format!("{text}\nnote: {n}");
    }
    Ok(Success { text, result })
}

fn cmd_search(system: &Path, max_size: usize, radius: usize, budget: u64) -> Outcome {
    let matrix = read_system(system).map_err(Failure::input)?;
    let group = CoxeterGroup::new(matrix);
    let report = search_coxeter_polytopes(&group, max_size, radius, budget).map_err(Failure::input)?;
    let status = match report.status {
        SearchStatus::Complete => "complete",
        SearchStatus::Truncated => "truncated",
    };
    let mut lines: Vec<String> = report.polytopes.iter().map(|p| p.to_string()).collect();
    if report.polytopes.is_empty() {
        lines.push(format!("none up to size {max_size} ({status})"));
    } else {
        lines.push(format!(
            "{} Coxeter polytopes up to size {max_size} ({status})",
            report.polytopes.len()
        ));
    }
    Ok(Success {
        text: lines.join("\n"),
        result: json!({
            "status": status,
            "max_size": max_size,
            "radius": radius,
            "expanded": report.expanded,
            "polytopes": report.polytopes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        }),
    })
}

fn cmd_render(system: &Path, depth: usize, highlight: Option<&Path>, out: Option<&Path>, canvas: u32) -> Outcome {
    let matrix = read_system(system).map_err(Failure::input)?;
    let mut params = SceneParams::for_system(&matrix, depth).map_err(Failure::input)?;
    params.canvas = canvas;
    if let Some(path) = highlight {
        let file = read_certificate(path).map_err(Failure::input)?;
        let group = CoxeterGroup::new(matrix.clone());
        params.highlight = Some(ChamberSet::new(&group, file.chambers).map_err(Failure::input)?);
    }
    let svg = render_rank3(&matrix, &params).map_err(Failure::input)?;
    let chambers = svg.matches("<path").count();
    let text = match out {
        Some(path) => {
            write_output(path, &svg).map_err(Failure::input)?;
            format!("{chambers} chambers drawn to {}", path.display())
        }
        None => svg.trim_end().to_string(),
    };
    Ok(Success {
        text,
        result: json!({
            "model": format!("{:?}", params.model),
            "depth": depth,
            "chambers": chambers,
            "out": out.map(|p| p.display().to_string()),
        }),
    })
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var(THREADS_VAR) {
        let n: usize = value
            .parse()
            .with_context(|| format!("{THREADS_VAR} must be a thread count, got `{value}`"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let outcome = configure_threads().map_err(Failure::input).and_then(|()| match &cli.command {
        Command::Classify { system } => cmd_classify(system),
        Command::Construct { system, out } => cmd_construct(system, out.as_deref()),
        Command::Verify {
            system,
            certificate,
            radius,
        } => cmd_verify(system, certificate, *radius),
        Command::Search {
            system,
            max_size,
            radius,
            budget,
        } => cmd_search(system, *max_size, *radius, *budget),
        Command::Render {
            system,
            depth,
            highlight,
            out,
            canvas,
        } => cmd_render(system, *depth, highlight.as_deref(), out.as_deref(), *canvas),
    });
    let elapsed = start.elapsed().as_secs_f64();
    let code = outcome.as_ref().err().map_or(0, |f| f.code);
    let mut stdout = std::io::stdout().lock();

    if cli.json {
        let (status, error, result) = match outcome {
            Ok(s) => ("ok", None, Some(s.result)),
            Err(f) => ("error", Some(json!({"code": f.code, "message": f.message})), f.result),
        };
        let report = Report {
            command: cli.command.name(),
            args: std::env::args().skip(1).collect(),
            version: env!("CARGO_PKG_VERSION"),
            status,
            error,
            elapsed_seconds: elapsed,
            result,
        };
        // a closed stdout is not worth a panic
        let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    } else {
        match outcome {
            Ok(s) => {
                let _ = writeln!(stdout, "{}", s.text);
            }
            Err(Failure { text: Some(t), .. }) => {
                let _ = writeln!(stdout, "{t}");
            }
            Err(f) => eprintln!("error: {}", f.message),
        }
    }
    ExitCode::from(code)
}
