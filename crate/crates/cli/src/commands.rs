use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use certiroot::{
    depth_soft_check, estimate_exclusion_margin, isolate, parse_source, sure_success_check, verify_isolation,
    DepthCheck, Dyadic, ExclusionEstimate, FunctionSystem, IsolationOutput, IsolationReport, JacobianMode, Roi,
    RootEnclosure, Round, RoundingContext, SolverConfig, Status, SureSuccessReport, SystemSource, VerificationReport,
};

use crate::args::{Cli, Command, Common, DiagnoseArgs, Format, IsolateArgs};
use crate::svg;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_DEPTH_EXCEEDED: u8 = 2;
pub const EXIT_CHECKS_FAILED: u8 = 3;

pub const PRECISION_ENV: &str = "CERTIROOT_PRECISION";

/// Enough to rerun the command; timing goes to stderr so that stdout is
/// reproducible byte for byte.
#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    input: String,
}

impl Manifest {
    fn new(command: &'static str, input: &Path) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            input: input.display().to_string(),
        }
    }
}

struct Loaded {
    source: SystemSource,
    sys: FunctionSystem,
    roi: Roi,
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Isolate(a) => run_isolate(a),
        Command::Verify(a) => run_verify(a),
        Command::Diagnose(a) => run_diagnose(a),
    }
}

fn load(common: &Common) -> Result<Loaded> {
    let text = fs::read_to_string(&common.input).with_context(|| format!("reading {}", common.input.display()))?;
    let source = parse_source(&text)?;
    let sys = FunctionSystem::from_source(&source)?;
    let literals = if common.roi.is_empty() {
        source
            .roi
            .clone()
            .ok_or_else(|| anyhow!("no region of interest: pass --roi or add a `roi =` line"))?
    } else {
        common
            .roi
            .iter()
            .map(|s| certiroot::parse::parse_bound_pair(s).map_err(|e| anyhow!("--roi {s}: {e}")))
            .collect::<Result<_>>()?
    };
    if literals.len() != sys.dim() {
        bail!(
            "region of interest has {} sides but the system has {} variables",
            literals.len(),
            sys.dim()
        );
    }
    let (roi, note) = Roi::from_literals(&literals)?;
    if let Some(note) = note {
        eprintln!("note: {note}");
    }
    Ok(Loaded { source, sys, roi })
}

fn option<T: std::str::FromStr>(source: &SystemSource, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    source
        .options
        .get(key)
        .map(|v| v.parse::<T>().map_err(|e| anyhow!("option {key} = {v}: {e}")))
        .transpose()
}

/// Flag, then input option, then environment, then the built-in default.
fn context(common: &Common, source: &SystemSource) -> Result<RoundingContext> {
    let env = match std::env::var(PRECISION_ENV) {
        Ok(v) => Some(v.parse::<u32>().map_err(|e| anyhow!("{PRECISION_ENV}={v}: {e}"))?),
        Err(_) => None,
    };
    let bits = common
        .precision
        .or(option(source, "precision")?)
        .or(env)
        .unwrap_or(RoundingContext::DEFAULT_PRECISION);
    if bits < 2 {
        bail!("precision must be at least 2 bits");
    }
    Ok(RoundingContext::default().with_precision(bits))
}

fn solver_config(a: &IsolateArgs, source: &SystemSource) -> Result<SolverConfig> {
    Ok(SolverConfig {
        max_depth: a
            .max_depth
            .or(option(source, "max_depth")?)
            .unwrap_or(SolverConfig::DEFAULT_MAX_DEPTH),
        ctx: context(&a.common, source)?,
        jacobian_mode: match a.jacobian_test {
            Some(m) => m,
            None => option::<JacobianMode>(source, "jacobian_test")?.unwrap_or_default(),
        },
        // the picture needs the trace
        stats_enabled: a.stats || a.svg.is_some(),
    })
}

fn solve(a: &IsolateArgs, loaded: &Loaded) -> Result<(IsolationOutput, IsolationReport)> {
    let cfg = solver_config(a, &loaded.source)?;
    let start = Instant::now();
    let out = isolate(&loaded.sys, &loaded.roi, &cfg)?;
    if a.stats {
        eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    }
    if let Some(path) = &a.svg {
        svg::write_svg(&out, path)?;
    }
    let mut report = IsolationReport::new(&loaded.sys, &out);
    if !a.stats {
        report.stats = None;
        report.trace.clear();
        report.config.stats = false;
    }
    Ok((out, report))
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Complete => EXIT_OK,
        Status::DepthExceeded => EXIT_DEPTH_EXCEEDED,
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run_isolate(a: &IsolateArgs) -> Result<u8> {
    let loaded = load(&a.common)?;
    let (out, report) = solve(a, &loaded)?;
    match a.common.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                manifest: Manifest,
                report: &'a IsolationReport,
            }
            print_json(&Doc {
                manifest: Manifest::new("isolate", &a.common.input),
                report: &report,
            })?;
        }
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(status_code(out.status))
}

fn parse_hint(s: &str, n: usize) -> Result<Vec<Dyadic>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
    if parts.len() != n {
        bail!("root hint `{s}` has {} coordinates, expected {n}", parts.len());
    }
    parts.iter().map(|p| parse_coordinate(p)).collect()
}

fn parse_coordinate(p: &str) -> Result<Dyadic> {
    if p.starts_with("0x") || p.starts_with("-0x") {
        return Ok(Dyadic::parse_hex(p)?);
    }
    Ok(Dyadic::from_decimal(p, 128, Round::Nearest)?.0)
}

fn enclosures(loaded: &Loaded, hints: &[Vec<Dyadic>], ctx: &RoundingContext) -> Result<Vec<RootEnclosure>> {
    hints
        .iter()
        .map(|h| RootEnclosure::from_hint(&loaded.sys, h, ctx).map_err(|e| anyhow!("root hint {h:?}: {e}")))
        .collect()
}

fn source_hints(loaded: &Loaded) -> Result<Vec<Vec<Dyadic>>> {
    let n = loaded.sys.dim();
    loaded
        .source
        .roots
        .iter()
        .map(|r| parse_hint(&r.join(","), n))
        .collect()
}

fn run_verify(a: &IsolateArgs) -> Result<u8> {
    let loaded = load(&a.common)?;
    let (out, report) = solve(a, &loaded)?;
    let ctx = context(&a.common, &loaded.source)?;
    let roots = enclosures(&loaded, &source_hints(&loaded)?, &ctx)?;
    let regions: Vec<_> = roots.iter().map(|r| r.region.clone()).collect();
    let verification = verify_isolation(&out, &loaded.sys, Some(&regions));
    match a.common.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                manifest: Manifest,
                report: &'a IsolationReport,
                verification: &'a VerificationReport,
            }
            print_json(&Doc {
                manifest: Manifest::new("verify", &a.common.input),
                report: &report,
                verification: &verification,
            })?;
        }
        Format::Text => {
            print!("{}", report.to_text());
            for v in &verification.violations {
                println!("violation: {v:?}");
            }
            println!(
                "verification {}: {} boxes, {} known roots",
                if verification.passed() { "passed" } else { "failed" },
                verification.boxes,
                verification.roots_checked
            );
        }
    }
    if !verification.passed() {
        return Ok(EXIT_CHECKS_FAILED);
    }
    Ok(status_code(out.status))
}

#[derive(Serialize)]
struct DiagnoseDoc {
    manifest: Manifest,
    roots: Vec<SureSuccessReport>,
    exclusion: ExclusionEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth_check: Option<DepthCheck>,
    passed: bool,
}

fn run_diagnose(a: &DiagnoseArgs) -> Result<u8> {
    let loaded = load(&a.common)?;
    let ctx = context(&a.common, &loaded.source)?;
    let n = loaded.sys.dim();
    let cfg = SolverConfig {
        ctx,
        ..SolverConfig::default()
    };
    let run = isolate(&loaded.sys, &loaded.roi, &cfg)?;

    let mut hints = source_hints(&loaded)?;
    for r in &a.roots {
        hints.push(parse_hint(r, n)?);
    }
    if a.auto_root {
        hints.extend(run.boxes.iter().map(|b| b.region.mid()));
    }
    if hints.is_empty() {
        bail!("no roots to diagnose: add `root =` lines, --root, or --auto-root");
    }
    let diag_ctx = ctx.with_precision(ctx.precision_bits.max(128));
    let mut reports = Vec::new();
    for root in enclosures(&loaded, &hints, &diag_ctx)? {
        reports.push(sure_success_check(&loaded.sys, &root, &loaded.roi, &diag_ctx)?);
    }
    let witnesses: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| r.root.witness.iter().map(Dyadic::to_f64).collect())
        .collect();
    let ell1 = reports
        .iter()
        .map(|r| r.lambda2.value.clone().min(r.lambda3.value.clone()).to_f64())
        .fold(f64::INFINITY, f64::min);
    let exclusion = estimate_exclusion_margin(&loaded.sys, &loaded.roi, &witnesses, ell1, a.samples, a.seed, &ctx);
    let depth_check = depth_soft_check(&loaded.roi, &reports, &exclusion, run.stats.max_depth_reached);
    if let Some(c) = depth_check.as_ref().filter(|c| !c.within) {
        eprintln!("warning: depth {} exceeds the estimated bound {}", c.observed, c.bound);
    }
    let passed = reports.iter().all(|r| r.passed);
    let doc = DiagnoseDoc {
        manifest: Manifest::new("diagnose", &a.common.input),
        roots: reports,
        exclusion,
        depth_check,
        passed,
    };
    match a.common.format {
        Format::Json => print_json(&doc)?,
        Format::Text => {
            for (i, r) in doc.roots.iter().enumerate() {
                let w: Vec<String> = r.root.witness.iter().map(|x| x.to_f64().to_string()).collect();
                println!(
                    "root {i} ({}): lambda1 {} lambda_hat1 {} lambda2 {} lambda3 {} lambda4 {}",
                    w.join(", "),
                    r.lambda1.value,
                    r.lambda_hat1.value,
                    r.lambda2.value,
                    r.lambda3.value,
                    r.lambda4.value
                );
                for c in &r.checks {
                    println!(
                        "  {} {} ({} trials)",
                        if c.passed { "pass" } else { "FAIL" },
                        c.name,
                        c.trials
                    );
                }
            }
            println!("diagnosis {}", if passed { "passed" } else { "failed" });
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_CHECKS_FAILED })
}
