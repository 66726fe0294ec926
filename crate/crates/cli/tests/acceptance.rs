//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

// Negated comparisons are deliberate: a NaN measurement must fail its criterion.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use comars::analytic;
use comars::designs::{
    brute_force_conference, concatenate, foldover, paley_conference, smallest_parent, LowerState, ScreeningDesign,
};
use comars::metrics::{
    check_theory, corr_2fi_disjoint_via_j4, f_vector, four_subsets, j4, model_matrix, pearson, ssq_2fi, Effect,
};
use comars::optimizer::{cc_search, evaluate_objective, optimize, Evaluator, ObjectiveKind, SearchConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn cli(dir: &Path, args: &[&str]) -> Result<String, String> {
    let mut out = Vec::new();
    let mut argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    argv.iter_mut().filter(|a| a.ends_with(".csv") || a.ends_with(".json")).for_each(|a| {
        if !Path::new(a).is_absolute() {
            *a = dir.join(&*a).display().to_string();
        }
    });
    comars_cli::run_args(argv, &mut out).map_err(|f| format!("exit {}: {f}", f.code))?;
    Ok(String::from_utf8_lossy(&out).into_owned())
}

fn read_json(path: PathBuf) -> Result<Value, String> {
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

/// Counts at 1/6, 1/3, 2/3 from a report's f_vector.
fn counts_at_thirds(report: &Value) -> Result<[u64; 3], String> {
    let mut out = [u64::MAX; 3];
    for entry in report["f_vector"].as_array().ok_or("no f_vector")? {
        let v = entry["value"].as_f64().unwrap();
        let c = entry["count"].as_u64().unwrap();
        for (slot, target) in [1.0 / 6.0, 1.0 / 3.0, 2.0 / 3.0].iter().enumerate() {
            if (v - target).abs() < 1e-6 {
                out[slot] = c;
            }
        }
    }
    Ok(out)
}

fn optimize_via_cli(m: &str, objective: &str) -> Result<Value, String> {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    cli(dir, &["generate", "--order", "7", "--factors", m, "--out", "c.csv"])?;
    cli(
        dir,
        &[
            "optimize",
            "--conference",
            "c.csv",
            "--objective",
            objective,
            "--restarts",
            "100",
            "--n0",
            "1",
            "--seed",
            "2024",
            "--out",
            "d.csv",
            "--report",
            "r.json",
        ],
    )?;
    read_json(dir.join("r.json"))
}

fn table3_row(m: &str, objective: &str, counts: [u64; 3], ssq: f64) -> Outcome {
    let report = optimize_via_cli(m, objective)?;
    let got = counts_at_thirds(&report)?;
    let got_ssq = report["ssq_2fi"].as_f64().unwrap();
    ensure!(got == counts, "counts at (1/6, 1/3, 2/3) = {got:?}, expected {counts:?}");
    ensure!((got_ssq - ssq).abs() <= 1e-3, "ssq_2fi = {got_ssq:.6}, expected {ssq:.3}");
    Ok(format!("counts {got:?} at (1/6, 1/3, 2/3), ssq_2fi {got_ssq:.6}, runs {}", report["runs"]))
}

fn criterion1() -> Outcome {
    table3_row("7", "f", [45, 72, 0], 9.250)
}

fn criterion2() -> Outcome {
    table3_row("7", "ssq", [47, 36, 6], 7.972)
}

fn criterion3() -> Outcome {
    // The F objective reaches the row; the SSQ objective attains the same SSQ.
    let f = table3_row("8", "f", [72, 144, 0], 18.000)?;
    let report = optimize_via_cli("8", "ssq")?;
    let ssq = report["ssq_2fi"].as_f64().unwrap();
    ensure!((ssq - 18.0).abs() <= 1e-3, "SSQ objective reached {ssq}");
    Ok(format!("{f}; ssq objective {ssq:.6}"))
}

fn criterion4() -> Outcome {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let t2 = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/table2.csv");
    let t2 = t2.to_str().unwrap();
    let out = cli(tmp.path(), &["evaluate", "--design", t2, "--n", "8", "--n0", "2", "--report", "r.json"])?;
    let r = read_json(tmp.path().join("r.json"))?;
    let q = &r["quartiles"];
    let (ssq, max, q3, q2) = (
        r["ssq_all_so"].as_f64().unwrap(),
        q["max"].as_f64().unwrap(),
        q["q3"].as_f64().unwrap(),
        q["q2"].as_f64().unwrap(),
    );
    let at_max: usize = out
        .lines()
        .find_map(|l| l.strip_prefix("pairs at max"))
        .and_then(|v| v.trim().parse().ok())
        .ok_or("no pairs-at-max line")?;
    ensure!(r["runs"] == 34, "runs {}", r["runs"]);
    ensure!((ssq - 16.083).abs() <= 1e-3, "ssq_all_so {ssq}");
    ensure!((max - 0.367).abs() <= 1e-3, "max {max}");
    ensure!((q3 - 0.333).abs() <= 5e-3, "q3 {q3}");
    ensure!(q2.abs() < 5e-4, "q2 {q2}");
    ensure!(at_max == 45, "{at_max} pairs at max");
    Ok(format!("ssq {ssq:.6}, max {max:.6}, q3 {q3:.6}, q2 {q2:.6}, {at_max} pairs at max"))
}

fn parent(n: usize, m: usize) -> ScreeningDesign {
    let c = match paley_conference((n - 1) as u64) {
        Ok(c) => c,
        Err(_) => brute_force_conference(n, n).unwrap().remove(0),
    };
    foldover(&c.first_columns(m).unwrap())
}

fn criterion5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut designs = 0;
    let mut values = 0;
    for n in [6, 8, 12] {
        for m in [n - 1, n] {
            let d1 = parent(n, m);
            for n0 in [0, 1, 2, 4] {
                for _ in 0..3 {
                    let d = concatenate(&d1, &d1, &LowerState::random(m, &mut rng), n0).map_err(|e| e.to_string())?;
                    let check = check_theory(d.entries(), n, n0).map_err(|e| e.to_string())?;
                    ensure!(check.passed(), "n={n} m={m} n0={n0}: {:?}", check.violations.first());
                    designs += 1;
                    values += check.checked.values().sum::<usize>();
                }
            }
        }
    }
    Ok(format!("{designs} designs, {values} correlations and J4 values checked, 0 violations"))
}

fn criterion6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut summary = Vec::new();
    for n in [8, 10, 12] {
        let allowed = analytic::j4_value_set(n);
        let mut seen = std::collections::BTreeSet::new();
        for m in [n - 1, n] {
            let d1 = parent(n, m);
            for _ in 0..20 {
                let d = concatenate(&d1, &d1, &LowerState::random(m, &mut rng), 1).map_err(|e| e.to_string())?;
                for s in four_subsets(m) {
                    seen.insert(j4(d.entries(), s));
                }
            }
        }
        ensure!(seen.is_subset(&allowed), "n={n}: {seen:?} not within {allowed:?}");
        summary.push(format!("n={n} {seen:?} ⊆ {allowed:?}"));
    }
    Ok(summary.join("; "))
}

fn criterion7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = 0;
    let mut worst = 0.0f64;
    for (n, m) in [(6, 5), (8, 7), (8, 8)] {
        let d1 = parent(n, m);
        for _ in 0..50 {
            let d = concatenate(&d1, &d1, &LowerState::random(m, &mut rng), 1).map_err(|e| e.to_string())?;
            let model = model_matrix(d.entries());
            for [a, b, c, e] in four_subsets(m) {
                for (x, y) in [((a, b), (c, e)), ((a, c), (b, e)), ((a, e), (b, c))] {
                    let via = corr_2fi_disjoint_via_j4(d.entries(), x, y);
                    let r = pearson(
                        model.column(Effect::Interaction(x.0, x.1)),
                        model.column(Effect::Interaction(y.0, y.1)),
                    )
                    .map_err(|e| e.to_string())?;
                    worst = worst.max((via - r.abs()).abs());
                    pairs += 1;
                }
            }
        }
    }
    ensure!(worst <= 1e-10, "largest difference {worst:e}");
    Ok(format!("{pairs} disjoint pairs over 150 states, largest difference {worst:.1e}"))
}

fn criterion8() -> Outcome {
    let d = smallest_parent(&paley_conference(5).unwrap(), 5).unwrap();
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for k in 0..5 {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    let mut best_ssq = f64::INFINITY;
    let mut best_f: Option<Vec<u64>> = None;
    let mut states = 0;
    for perm in &perms {
        for mask in 0..32u32 {
            let signs = (0..5).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
            let s = LowerState::new(perm.clone(), signs).unwrap();
            let design = concatenate(&d, &d, &s, 1).unwrap();
            best_ssq = best_ssq.min(ssq_2fi(design.entries()).unwrap());
            let counts = f_vector(design.entries(), 6).unwrap().counts;
            if best_f.as_ref().is_none_or(|b| counts < *b) {
                best_f = Some(counts);
            }
            states += 1;
        }
    }
    let best_f = best_f.unwrap();
    let ssq = optimize(&d, &d, 1, &SearchConfig::new(ObjectiveKind::Ssq, 10, 8)).map_err(|e| e.to_string())?;
    let f = optimize(&d, &d, 1, &SearchConfig::new(ObjectiveKind::F, 10, 8)).map_err(|e| e.to_string())?;
    ensure!(states == 3840, "{states} states enumerated");
    ensure!((ssq.objective.ssq() - best_ssq).abs() < 1e-9, "ssq {} vs enumeration {best_ssq}", ssq.objective.ssq());
    ensure!(f.objective.counts() == best_f.as_slice(), "f {:?} vs enumeration {best_f:?}", f.objective.counts());
    Ok(format!("{states} states: ssq optimum {best_ssq:.6}, f optimum {best_f:?}; both found with 10 restarts"))
}

fn criterion9() -> Outcome {
    let tmp = TempDir::new().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    let mut lines = Vec::new();
    for m in ["11", "12"] {
        cli(dir, &["generate", "--order", "11", "--factors", m, "--out", "c12.csv"])?;
        cli(dir, &["optimize", "--conference", "c12.csv", "--restarts", "2", "--n0", "1", "--out", "comars.csv"])?;
        cli(dir, &["generate", "--order", "23", "--factors", m, "--foldover", "--n0", "1", "--out", "dsd.csv"])?;
        cli(dir, &["compare", "--design-a", "comars.csv", "--design-b", "dsd.csv", "--report", "cmp.json"])?;
        let cmp = read_json(dir.join("cmp.json"))?;
        let (a, b) = (&cmp["a"], &cmp["b"]);
        ensure!(a["runs"] == 49 && b["runs"] == 49, "run sizes {} vs {}", a["runs"], b["runs"]);
        let rel = cmp["relative_d_efficiency"].as_f64().ok_or("singular information")?;
        let ratio = cmp["d_criterion_ratio"].as_f64().ok_or("singular information")?;
        let (qa, qb) = (a["qq"].as_f64().unwrap(), b["qq"].as_f64().unwrap());
        let (fa, fb) = (analytic::qq_corr_comars(12, 1), analytic::qq_corr_dsd(24, 1));
        ensure!(rel > 1.71, "m={m}: relative D-efficiency {rel:.4} (per-parameter ratio {ratio:.4})");
        ensure!((qa - fa).abs() <= 1e-3 && (qa - 0.109).abs() <= 1e-3, "m={m}: cOMARS qq {qa}");
        ensure!((qb - fb).abs() <= 1e-3 && (qb - 0.289).abs() <= 1.5e-3, "m={m}: DSD qq {qb}");
        lines.push(format!(
            "m={m}: relative D-efficiency {rel:.4} (per-parameter ratio {ratio:.4}), qq {qa:.4} vs {qb:.4}"
        ));
    }
    Ok(lines.join("; "))
}

fn criterion10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let d1 = parent(8, 8);
    // Center runs: interaction inner products and sums are unchanged, so the
    // correlations are identical; checked on integers.
    let mut pairs = 0;
    for _ in 0..10 {
        let s = LowerState::random(8, &mut rng);
        let base = concatenate(&d1, &d1, &s, 0).unwrap();
        let base_model = model_matrix(base.entries());
        let effects = base_model.interaction_effects();
        for n0 in [1, 3] {
            let padded = concatenate(&d1, &d1, &s, n0).unwrap();
            let model = model_matrix(padded.entries());
            for (x, &e) in effects.iter().enumerate() {
                ensure!(model.column(e).iter().map(|&v| i64::from(v)).sum::<i64>() == 0, "{e} does not sum to zero");
                for &f in &effects[x + 1..] {
                    let inner = |m: &comars::metrics::ModelMatrix| -> i64 {
                        m.column(e).iter().zip(m.column(f)).map(|(&a, &b)| i64::from(a * b)).sum()
                    };
                    ensure!(inner(&base_model) == inner(&model), "{e} vs {f} changed with {n0} center runs");
                    let (r0, r1) = (
                        pearson(base_model.column(e), base_model.column(f)).unwrap(),
                        pearson(model.column(e), model.column(f)).unwrap(),
                    );
                    ensure!((r0 - r1).abs() <= 4.0 * f64::EPSILON, "{e} vs {f}: {r0} vs {r1}");
                    pairs += 1;
                }
            }
        }
    }
    let d7 = parent(8, 7);
    for _ in 0..20 {
        let s = LowerState::random(7, &mut rng);
        for kind in [ObjectiveKind::Ssq, ObjectiveKind::F] {
            let a = evaluate_objective(&d7, &d7, &s, 1, kind).map_err(|e| e.to_string())?;
            let b = evaluate_objective(&d7, &d7, &s.negated(), 1, kind).map_err(|e| e.to_string())?;
            ensure!(a == b, "flipping all signs changed {a} to {b}");
        }
    }
    let eval = Evaluator::new(&d7, &d7).map_err(|e| e.to_string())?;
    let mut moves = 0;
    for _ in 0..20 {
        for kind in [ObjectiveKind::Ssq, ObjectiveKind::F] {
            let s0 = LowerState::random(7, &mut rng);
            let out = cc_search(&eval, &s0, kind, 10_000).map_err(|e| e.to_string())?;
            let mut prev = eval.objective(&s0, kind).map_err(|e| e.to_string())?;
            for (_, o) in &out.trace {
                ensure!(o.is_better_than(&prev), "trace rose from {prev} to {o}");
                prev = o.clone();
                moves += 1;
            }
        }
    }
    Ok(format!(
        "{pairs} interaction pairs unchanged by center runs; 20 sign-flip pairs equal; {moves} CC moves all improving"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("m=7 optimization, F objective", criterion1),
        ("m=7 optimization, SSQ objective", criterion2),
        ("m=8 optimization", criterion3),
        ("bundled 34-run design statistics", criterion4),
        ("closed-form correlations", criterion5),
        ("J4 value sets", criterion6),
        ("J4 route equals Pearson", criterion7),
        ("optimizer vs exhaustive enumeration", criterion8),
        ("D-efficiency vs DSD", criterion9),
        ("invariances", criterion10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
