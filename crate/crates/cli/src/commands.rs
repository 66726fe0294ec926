use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use comars::designs::{
    brute_force_conference, foldover, format_design, load_conference_csv, load_design_csv, paley_conference, save_csv,
    ConferenceDesign,
};
use comars::metrics::{
    alias_report, check_theory, infer_center_runs, infer_parent_runs, relative_d_efficiency, AliasReport, PairClass,
};
use comars::optimizer::{optimize_pairings, SearchConfig};
use ndarray::ArrayView2;
use serde::Serialize;

use crate::{
    default_manifest_path, CompareArgs, EvaluateArgs, Failure, GenerateArgs, OptimizeArgs, RunManifest, EXIT_BOUND,
    EXIT_INVALID, EXIT_IO, EXIT_THEORY, THREADS_ENV,
};

type CmdResult = Result<(), Failure>;

fn io(e: impl Into<anyhow::Error>) -> Failure {
    Failure::new(EXIT_IO, e)
}

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::new(EXIT_INVALID, e)
}

fn say(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> CmdResult {
    writeln!(out, "{text}").map_err(io)
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => { say($out, format_args!($($arg)*))? };
}

fn write_text(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(io)
}

/// Writes the manifest to `explicit`, else next to `primary`, else to stderr.
fn finish(mut manifest: RunManifest, started: Instant, explicit: Option<PathBuf>, primary: Option<&Path>) -> CmdResult {
    manifest.duration_secs = started.elapsed().as_secs_f64();
    match explicit.or_else(|| primary.map(default_manifest_path)) {
        Some(path) => manifest.write(&path).map_err(io),
        None => {
            eprintln!("{}", serde_json::to_string_pretty(&manifest).expect("manifest serializes"));
            Ok(())
        }
    }
}

pub fn generate(args: &GenerateArgs, manifest_path: Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    let design: ConferenceDesign = match (args.order, &args.file, args.search) {
        (Some(p), None, None) => paley_conference(p)?,
        (None, Some(path), None) => load_conference_csv(path)?,
        (None, None, Some(runs)) => {
            let m = args.factors.unwrap_or(runs);
            brute_force_conference(runs, m)?.into_iter().next().ok_or_else(|| invalid(anyhow!("no design found")))?
        }
        _ => return Err(invalid(anyhow!("exactly one of --order, --file, --search is required"))),
    };
    let design = match args.factors {
        Some(m) => design.first_columns(m)?,
        None => design,
    };
    let csv = if args.foldover {
        format_design(foldover(&design).with_center_runs(args.n0.unwrap_or(0)).view())
    } else {
        format_design(design.entries())
    };
    match &args.out {
        Some(path) => write_text(path, &csv)?,
        None => out.write_all(csv.as_bytes()).map_err(io)?,
    }
    let mut manifest = RunManifest::new("generate", args);
    manifest.artifacts.extend(args.out.clone());
    // The design goes to stdout when there is no --out, so keep the summary off it.
    let mut summary = format!(
        "valid conference design: {} runs, {} factors, orthogonal columns, one zero per column",
        design.runs(),
        design.factors()
    );
    if args.foldover {
        let n0 = args.n0.unwrap_or(0);
        summary += &format!("; wrote its foldover with {n0} center runs ({} runs)", 2 * design.runs() + n0);
    }
    if args.out.is_some() {
        say!(out, "{summary}");
    } else {
        eprintln!("{summary}");
    }
    finish(manifest, started, manifest_path, args.out.as_deref())
}

/// Worker count from the environment, if set.
fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| invalid(anyhow!("{THREADS_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

pub fn optimize(args: &OptimizeArgs, manifest_path: Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    let mut parents = vec![foldover(&load_conference_csv(&args.conference)?)];
    if let Some(path) = &args.conference2 {
        parents.push(foldover(&load_conference_csv(path)?));
    }
    let config = SearchConfig {
        objective: args.objective,
        restarts: args.restarts as usize,
        seed: args.seed,
        max_cc_passes: args.max_cc_passes,
        threads: threads_from_env()?,
    };
    let result = optimize_pairings(&parents, args.n0, &config)?;
    let best = &result.best;
    let design = best.design.entries();
    save_csv(design, &args.out)?;

    let mut manifest = RunManifest::new("optimize", args);
    manifest.seed = Some(args.seed);
    manifest.artifacts.push(args.out.clone());
    if let Some(path) = &args.report {
        let report = alias_report(design, Some(best.design.parent_runs()), args.n0)?;
        write_text(path, &(report.to_json() + "\n"))?;
        manifest.artifacts.push(path.clone());
    }
    if let Some(path) = &args.log {
        let lines: String = best_log_lines(&result);
        write_text(path, &lines)?;
        manifest.artifacts.push(path.clone());
    }

    say!(out, "design: {} runs, {} factors, {} center runs", design.nrows(), design.ncols(), args.n0);
    for ((i, j), objective) in &result.candidates {
        say!(out, "pairing ({}, {}): {objective}", i + 1, j + 1);
    }
    say!(
        out,
        "best: pairing ({}, {}), restart {}, {}",
        result.pairing.0 + 1,
        result.pairing.1 + 1,
        best.restart,
        best.objective
    );
    let values: Vec<String> = best.objective.score.values().iter().map(|v| format!("{v:.3}")).collect();
    say!(out, "f-vector values: ({})", values.join(", "));
    let state: Vec<String> = best
        .state
        .perm()
        .iter()
        .zip(best.state.signs())
        .map(|(p, s)| format!("{}{}", if *s < 0 { "-" } else { "" }, p + 1))
        .collect();
    say!(out, "lower state: [{}]", state.join(" "));
    finish(manifest, started, manifest_path, Some(&args.out))?;
    if best.bound_hit {
        return Err(Failure::new(
            EXIT_BOUND,
            anyhow!(
                "local search reached --max-cc-passes {}; design written but may not be locally optimal",
                args.max_cc_passes
            ),
        ));
    }
    Ok(())
}

fn best_log_lines(result: &comars::optimizer::PairingResult) -> String {
    result.best.log.iter().map(|e| format!("{e}\n")).collect()
}

/// Center runs: the declared count must not exceed the trailing zero rows.
fn resolve_n0(d: ArrayView2<'_, i8>, declared: Option<usize>, label: &str) -> Result<usize, Failure> {
    let trailing = infer_center_runs(d);
    match declared {
        Some(n0) if n0 > trailing => {
            Err(invalid(anyhow!("{label}declared {n0} center runs but only the last {trailing} rows are all zero")))
        }
        Some(n0) => Ok(n0),
        None => Ok(trailing),
    }
}

/// Report keyed by the theoretical values when they fit, else by observed values.
fn report_for(d: ArrayView2<'_, i8>, n: Option<usize>, n0: usize) -> Result<AliasReport, Failure> {
    match alias_report(d, n, n0) {
        Err(comars::Error::UnexpectedCorrelationValue(r)) if n.is_some() => {
            eprintln!(
                "warning: |r| = {r:.6} is outside the value set for n = {}; reporting observed values",
                n.unwrap()
            );
            Ok(alias_report(d, None, n0)?)
        }
        Err(comars::Error::TooFewFactors(_) | comars::Error::OddRunCount(_)) if n.is_some() => {
            Err(invalid(anyhow!("--n {} is not a valid parent order (even, at least 6)", n.unwrap())))
        }
        other => Ok(other?),
    }
}

fn summarize(out: &mut dyn Write, r: &AliasReport) -> CmdResult {
    let n = r.parent_runs.map_or("?".into(), |n| n.to_string());
    say!(out, "runs {}  factors {}  n {}  n0 {}", r.runs, r.factors, n, r.center_runs);
    say!(out, "ssq (2fi pairs)        {:.6}", r.ssq_2fi);
    say!(out, "ssq (second-order)     {:.6}", r.ssq_all_so);
    say!(out, "q2 / q3 / max |r|      {:.6} / {:.6} / {:.6}", r.quartiles.q2, r.quartiles.q3, r.quartiles.max);
    say!(out, "pairs at max           {}", r.pairs_at_max());
    let f: Vec<String> = r.f_vector_entries().iter().map(|e| format!("{:.6}:{}", e.value, e.count)).collect();
    say!(out, "f-vector               {}", f.join(" "));
    match r.d_criterion {
        Some(d) => say!(out, "d-criterion            {d:.6}"),
        None => say!(out, "d-criterion            singular"),
    }
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs, manifest_path: Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    let d = load_design_csv(&args.design)?;
    let d = d.view();
    let n0 = resolve_n0(d, args.n0, "")?;
    let n = match args.n {
        Some(n) => Some(n),
        None => {
            let inferred = infer_parent_runs(d);
            if let (Some(n), true) = (inferred, args.check_theory) {
                eprintln!("warning: --n not given; inferred n = {n} from the zero counts");
            }
            inferred
        }
    };
    let report = report_for(d, n, n0)?;
    summarize(out, &report)?;

    let mut manifest = RunManifest::new("evaluate", args);
    if let Some(path) = &args.report {
        write_text(path, &(report.to_json() + "\n"))?;
        manifest.artifacts.push(path.clone());
    }

    let mut violated = None;
    if args.check_theory {
        let n = n.ok_or_else(|| invalid(anyhow!("--check-theory needs --n: the zero pattern does not reveal it")))?;
        let check = check_theory(d, n, n0)?;
        let checked: usize = check.checked.values().sum();
        say!(out, "theory check (n = {n}, n0 = {n0}): {checked} values checked, {} violations", check.violations.len());
        let class = check.max_class.as_deref().unwrap_or("mixed classes");
        say!(out, "max |r| {:.6} attained by {} pairs ({class})", check.max_abs_correlation, check.max_pairs);
        for v in check.violations.iter().take(20) {
            say!(out, "  violation [{}] {}", v.check, v.detail);
        }
        if !check.passed() {
            violated = Some(check.violations.len());
        }
    }
    finish(manifest, started, manifest_path, args.report.as_deref())?;
    match violated {
        Some(count) => Err(Failure::new(EXIT_THEORY, anyhow!("{count} theory violations"))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct Side {
    runs: usize,
    n0: usize,
    q2: f64,
    q3: f64,
    max: f64,
    ssq_2fi: f64,
    ssq_all_so: f64,
    qq: f64,
    d_criterion: Option<f64>,
}

#[derive(Serialize)]
struct Comparison {
    m: usize,
    a: Side,
    b: Side,
    /// Ratio of D-criterion values (per-parameter normalization).
    d_criterion_ratio: Option<f64>,
    /// Determinant ratio normalized per factor.
    relative_d_efficiency: Option<f64>,
}

fn side(d: ArrayView2<'_, i8>, n0: usize) -> Result<Side, Failure> {
    let report = alias_report(d, None, n0)?;
    let qq: Vec<f64> = report.pairs.get(&PairClass::QuadQuad).map_or(Vec::new(), |p| p.iter().map(|p| p.r).collect());
    Ok(Side {
        runs: report.runs,
        n0,
        q2: report.quartiles.q2,
        q3: report.quartiles.q3,
        max: report.quartiles.max,
        ssq_2fi: report.ssq_2fi,
        ssq_all_so: report.ssq_all_so,
        qq: qq.iter().sum::<f64>() / qq.len().max(1) as f64,
        d_criterion: report.d_criterion,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("singular".into(), |v| format!("{v:.6}"))
}

pub fn compare(args: &CompareArgs, manifest_path: Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    let a = load_design_csv(&args.design_a)?;
    let b = load_design_csv(&args.design_b)?;
    if a.ncols() != b.ncols() {
        return Err(comars::Error::FactorMismatch(a.ncols(), b.ncols()).into());
    }
    let n0_a = resolve_n0(a.view(), args.n0_a, "design a: ")?;
    let n0_b = resolve_n0(b.view(), args.n0_b, "design b: ")?;
    let (sa, sb) = (side(a.view(), n0_a)?, side(b.view(), n0_b)?);
    let relative = match relative_d_efficiency(a.view(), b.view()) {
        Ok(v) => Some(v),
        Err(comars::Error::SingularInformation) => None,
        Err(e) => return Err(e.into()),
    };
    let ratio = sa.d_criterion.zip(sb.d_criterion).map(|(x, y)| x / y);

    say!(out, "{:<24}{:>14}{:>14}", "", "design a", "design b");
    say!(out, "{:<24}{:>14}{:>14}", "runs", sa.runs, sb.runs);
    say!(out, "{:<24}{:>14}{:>14}", "center runs", sa.n0, sb.n0);
    for (label, x, y) in [
        ("q2 |r|", sa.q2, sb.q2),
        ("q3 |r|", sa.q3, sb.q3),
        ("max |r|", sa.max, sb.max),
        ("ssq (2fi pairs)", sa.ssq_2fi, sb.ssq_2fi),
        ("ssq (second-order)", sa.ssq_all_so, sb.ssq_all_so),
        ("qq correlation", sa.qq, sb.qq),
    ] {
        say!(out, "{label:<24}{x:>14.6}{y:>14.6}");
    }
    say!(out, "{:<24}{:>14}{:>14}", "d-criterion", fmt_opt(sa.d_criterion), fmt_opt(sb.d_criterion));
    say!(out, "d-criterion ratio (per parameter): {}", fmt_opt(ratio));
    say!(out, "relative D-efficiency (per factor): {}", fmt_opt(relative));

    let mut manifest = RunManifest::new("compare", args);
    if let Some(path) = &args.report {
        let json = Comparison { m: a.ncols(), a: sa, b: sb, d_criterion_ratio: ratio, relative_d_efficiency: relative };
        write_text(path, &(serde_json::to_string_pretty(&json).map_err(io)? + "\n"))?;
        manifest.artifacts.push(path.clone());
    }
    finish(manifest, started, manifest_path, args.report.as_deref())
}
