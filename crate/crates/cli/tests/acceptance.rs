//! Acceptance criteria 1–10, one pass/fail line each. Exits nonzero when any
//! criterion fails. Thresholds are pinned here; runtimes are printed.

use std::process::Command;
use std::time::{Duration, Instant};

use diamondbc::bounds::cutset_expected_rate;
use diamondbc::channel::{master_seed_from_env, PowerConfig, SeedSpec};
use diamondbc::schemes::{
    cf_expected_rate_with, daf_finite_expected_rate, daf_throughput, df_finite_expected_rate, df_throughput, streams,
    McSettings,
};
use diamondbc_cli::validate::{
    alamouti_residual, cf_decode_checks, cutset_quadrature_checks, df_argmax_checks, df_closed_form_checks,
    dfub_constant_checks, dominance_checks, dominance_spec, Budget, Check,
};
use diamondbc_cli::{run_sweep, CsvRow, Metric};

const N_ORACLE: usize = 1_000_000;
const N_TABLE: usize = 1_000_000;
const ALAMOUTI_N: usize = 100_000;
const ALAMOUTI_TOL: f64 = 1e-9;
const DAF_SLACK: f64 = 0.02;
const CF_WINDOW: (f64, f64) = (20.0, 30.0);
const CF_CUTSET_REL: f64 = 0.05;
const NESTING_TOL: f64 = 1e-4;
const NESTING_POINTS: [(f64, f64); 5] = [(1.0, 1.0), (1.0, 10.0), (1.0, 100.0), (0.5, 4.0), (4.0, 2.0)];

struct Line {
    id: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    limit: Duration,
}

fn timed(id: &'static str, limit_s: u64, f: impl FnOnce() -> (bool, String)) -> Line {
    let t = Instant::now();
    let (passed, detail) = f();
    Line { id, passed, detail, elapsed: t.elapsed(), limit: Duration::from_secs(limit_s) }
}

fn from_checks(checks: &[Check]) -> (bool, String) {
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed()).map(|c| format!("{} [{}]", c.name, c.detail)).collect();
    if failed.is_empty() {
        (true, format!("{} checks", checks.len()))
    } else {
        (false, failed.join("; "))
    }
}

fn value(rows: &[CsvRow], scheme: &str, pr_db: f64) -> f64 {
    rows.iter().find(|r| r.scheme == scheme && r.pr_db == pr_db).map(|r| r.value_nats).unwrap_or(f64::NAN)
}

fn main() {
    let seed = master_seed_from_env().expect("valid DIAMONDBC_SEED");
    let budget = Budget { n: N_ORACLE, alamouti_n: ALAMOUTI_N, master_seed: seed };
    let mut lines = Vec::new();

    lines.push(timed("1 alamouti equivalence", 5, || {
        let p = PowerConfig::new(1.0, 10.0).unwrap();
        let worst = alamouti_residual(&p, ALAMOUTI_N, SeedSpec::new(seed, streams::ORACLE));
        (worst <= ALAMOUTI_TOL, format!("max relative residual {worst:.2e} over {ALAMOUTI_N} samples"))
    }));
    lines.push(timed("2 df throughput vs oracle", 60, || from_checks(&df_closed_form_checks(&budget))));
    lines.push(timed("3 df threshold location", 10, || from_checks(&df_argmax_checks())));
    lines.push(timed("4 cutset quadrature", 1, || from_checks(&cutset_quadrature_checks())));
    lines.push(timed("5 dfub constants", 2, || from_checks(&dfub_constant_checks())));

    let mc = McSettings::new(N_TABLE, seed);
    let t6 = Instant::now();
    let sweep = run_sweep(&dominance_spec(Metric::Throughput, "0:60:2", None), &mc).expect("valid sweep");
    let rows = sweep.rows;
    let grid: Vec<f64> = (0..=30).map(|i| 2.0 * i as f64).collect();
    let sweep_time = t6.elapsed();

    let a = {
        let worst = grid
            .iter()
            .map(|&x| (x, value(&rows, "daf", x) - value(&rows, "df", x).max(value(&rows, "af", x))))
            .fold((f64::NAN, f64::INFINITY), |a, c| if c.1 < a.1 { c } else { a });
        (worst.1 >= -DAF_SLACK, format!("min daf − max(df, af) = {:+.4} at pr_db={}", worst.1, worst.0))
    };
    let b = {
        let above = |x: f64| value(&rows, "cf", x) > value(&rows, "daf", x);
        let first = grid.iter().copied().find(|&x| x >= CF_WINDOW.0 && above(x));
        let ok = first.is_some_and(|f| f <= CF_WINDOW.1 && grid.iter().filter(|&&x| x >= f).all(|&x| above(x)));
        (ok, format!("cf first above daf at pr_db={first:?}"))
    };
    let c = {
        let offenders: Vec<String> = grid
            .iter()
            .filter(|&&x| x > 10.0)
            .filter_map(|&x| {
                let af = value(&rows, "af", x);
                let lower: Vec<&str> =
                    ["df", "daf", "cf"].into_iter().filter(|s| value(&rows, s, x) < af).collect();
                (!lower.is_empty()).then(|| format!("{x}:{}", lower.join("/")))
            })
            .collect();
        (offenders.is_empty(), format!("pr_db where a scheme is below af: [{}]", offenders.join(", ")))
    };
    let t6d = Instant::now();
    let d = {
        let p = PowerConfig::from_db(0.0, 60.0).unwrap();
        let cf = cf_expected_rate_with(&p, &mc).map(|r| r.value_nats).unwrap_or(f64::NAN);
        let cut = cutset_expected_rate(&p).value_nats;
        let rel = (cf - cut).abs() / cut;
        (rel <= CF_CUTSET_REL, format!("cf expected {cf:.5} vs cutset expected {cut:.5}, gap {:.2}%", 100.0 * rel))
    };
    let failed_rows = sweep.failures.len();
    let parts = [("a", a), ("b", b), ("c", c), ("d", d)];
    lines.push(Line {
        id: "6 curve ordering (a–d)",
        passed: failed_rows == 0 && parts.iter().all(|p| p.1 .0),
        detail: parts
            .iter()
            .map(|(k, (ok, s))| format!("({k}) {} {s}", if *ok { "ok" } else { "FAILED" }))
            .chain((failed_rows > 0).then(|| format!("{failed_rows} failed rows")))
            .collect::<Vec<_>>()
            .join("; "),
        elapsed: sweep_time + t6d.elapsed(),
        limit: Duration::from_secs(30 * 60),
    });

    lines.push(timed("7 layer nesting", 600, || {
        let mut bad = Vec::new();
        for (ps, pr) in NESTING_POINTS {
            let p = PowerConfig::new(ps, pr).unwrap();
            for (name, one, k) in [
                ("df", df_throughput(&p).value_nats, df_finite_expected_rate as fn(usize, &PowerConfig) -> _),
                ("daf", daf_throughput(&p).value_nats, daf_finite_expected_rate),
            ] {
                let r2 = k(2, &p).map(|r| r.value_nats).unwrap_or(f64::NAN);
                let r3 = k(3, &p).map(|r| r.value_nats).unwrap_or(f64::NAN);
                if !(r2 >= one - NESTING_TOL && r3 >= r2 - NESTING_TOL) {
                    bad.push(format!("{name} ({ps},{pr}): {one:.6} / {r2:.6} / {r3:.6}"));
                }
            }
        }
        (bad.is_empty(), if bad.is_empty() { "10 chains".into() } else { bad.join("; ") })
    }));
    lines.push(timed("8 cf recovery probability", 120, || from_checks(&cf_decode_checks(&budget))));

    lines.push(timed("9 dominance", 30 * 60, || {
        let mut checks = dominance_checks(&rows, N_TABLE);
        let expected = run_sweep(&dominance_spec(Metric::Expected, "0:60:6", None), &mc).expect("valid sweep");
        checks.extend(dominance_checks(&expected.rows, N_TABLE));
        from_checks(&checks)
    }));

    lines.push(timed("10 determinism", 600, || {
        let run = |threads: &str| {
            let out = Command::new(env!("CARGO_BIN_EXE_diamondbc"))
                .args(["sweep", "--schemes", "df,af,daf,cf", "--bounds", "cutset,rc", "--pr-db", "0:60:20"])
                .args(["--samples", "200000"])
                .env("RAYON_NUM_THREADS", threads)
                .env("DIAMONDBC_SEED", seed.to_string())
                .output()
                .expect("binary runs");
            (out.status.code(), out.stdout)
        };
        let (c1, a) = run("1");
        let (c4, b) = run("4");
        (c1 == Some(0) && c4 == Some(0) && a == b && !a.is_empty(), format!("{} bytes, exit codes {c1:?}/{c4:?}", a.len()))
    }));

    let mut all = true;
    for l in &lines {
        all &= l.passed;
        let slow = if l.elapsed > l.limit { " (over runtime budget)" } else { "" };
        println!(
            "criterion {}: {} — {} [{:.1}s of {}s{slow}]",
            l.id,
            if l.passed { "PASS" } else { "FAIL" },
            l.detail,
            l.elapsed.as_secs_f64(),
            l.limit.as_secs()
        );
    }
    println!("seed {seed}; {} of {} criteria pass", lines.iter().filter(|l| l.passed).count(), lines.len());
    if !all {
        std::process::exit(1);
    }
}
