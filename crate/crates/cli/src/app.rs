//! Command-line parsing and the subcommands of the `diamondbc` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use diamondbc::channel::{master_seed_from_env, parse_seed, PowerConfig};
use diamondbc::gains::TableCache;
use diamondbc::schemes::McSettings;
use crate::sweep::{chart_series, parse_grid, parse_list};
use crate::validate::{run_suite, Budget, Suite, Verdict};
use crate::{
    evaluate, exit, render_svg, run_sweep, write_csv, BoundTag, CsvRow, EvalOptions, Item, Layers, Metric, SchemeTag,
    SweepSpec, UsageError,
};

#[derive(Parser)]
#[command(name = "diamondbc", version, about = "Rates of the two-relay diamond channel with broadcast coding")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scheme or bound at one power pair.
    Point(PointArgs),
    /// Evaluate schemes and bounds over a dB grid; CSV and optional SVG.
    Sweep(SweepArgs),
    /// Run oracle-versus-analytic checks.
    Validate(ValidateArgs),
    /// Bounds only over a dB grid.
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct Common {
    /// Master seed (default: $DIAMONDBC_SEED, then 0x5EED).
    #[arg(long)]
    seed: Option<String>,
    /// Monte Carlo samples per gain table.
    #[arg(long)]
    samples: Option<usize>,
    /// Directory for cached gain tables.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct PointArgs {
    /// df, af, daf, daf-closed or cf.
    #[arg(long, conflicts_with = "bound", required_unless_present = "bound")]
    scheme: Option<String>,
    /// cutset, rc or dfub.
    #[arg(long)]
    bound: Option<String>,
    #[arg(long, default_value = "throughput")]
    metric: String,
    /// 1, 2, 3 or inf.
    #[arg(long)]
    layers: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ps_db: f64,
    #[arg(long, allow_hyphen_values = true)]
    pr_db: f64,
    /// AF expected rate with the power-saving boundary.
    #[arg(long)]
    power_saving: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated subset of df, af, daf, daf-closed, cf.
    #[arg(long, default_value = "")]
    schemes: String,
    /// Comma-separated subset of cutset, rc, dfub.
    #[arg(long, default_value = "")]
    bounds: String,
    #[arg(long, default_value = "throughput")]
    metric: String,
    #[arg(long)]
    layers: Option<String>,
    /// start:stop:step or a single value.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    ps_db: String,
    #[arg(long, allow_hyphen_values = true)]
    pr_db: String,
    #[arg(long)]
    power_saving: bool,
    /// CSV path (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG chart path.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value = "throughput")]
    metric: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    ps_db: String,
    #[arg(long, allow_hyphen_values = true)]
    pr_db: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ValidateArgs {
    /// alamouti, df, af, daf, cf, bounds or all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[command(flatten)]
    common: Common,
}

/// Failure of a subcommand, mapped to its exit code.
enum Failure {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the subcommand, writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}\n\nRun 'diamondbc --help' for usage.");
            exit::USAGE
        }
        Err(Failure::Numeric(m)) => {
            let _ = writeln!(err, "numeric failure: {m}");
            exit::NUMERIC
        }
        Err(Failure::Io(m)) => {
            let _ = writeln!(err, "I/O error: {m}");
            exit::NUMERIC
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cli.cmd {
        Command::Point(a) => point(a, out),
        Command::Sweep(a) => {
            let spec = SweepSpec {
                ps_db: parse_grid(&a.ps_db)?,
                pr_db: parse_grid(&a.pr_db)?,
                schemes: parse_list(&a.schemes)?,
                bounds: parse_list(&a.bounds)?,
                metric: a.metric.parse()?,
                layers: a.layers.as_deref().map(str::parse).transpose()?,
                options: EvalOptions { power_saving: a.power_saving },
            };
            sweep(&spec, &a.common, a.out, a.plot, out, err)
        }
        Command::Bounds(a) => {
            let metric: Metric = a.metric.parse()?;
            let bounds = BoundTag::ALL.into_iter().filter(|b| b.kind(metric).is_ok()).collect();
            let spec = SweepSpec {
                ps_db: parse_grid(&a.ps_db)?,
                pr_db: parse_grid(&a.pr_db)?,
                schemes: vec![],
                bounds,
                metric,
                layers: None,
                options: EvalOptions::default(),
            };
            sweep(&spec, &a.common, a.out, a.plot, out, err)
        }
        Command::Validate(a) => {
            let suite: Suite = a.suite.parse()?;
            let mc = settings(&a.common)?;
            let budget = Budget::new(a.common.samples, mc.master_seed);
            let checks = run_suite(suite, &budget);
            for c in &checks {
                writeln!(out, "{c}")?;
            }
            let failed: Vec<&str> = checks.iter().filter(|c| c.verdict == Verdict::Fail).map(|c| c.name.as_str()).collect();
            let passed = checks.iter().filter(|c| c.verdict == Verdict::Pass).count();
            writeln!(out, "{passed} passed, {} failed, seed {}", failed.len(), mc.master_seed)?;
            if failed.is_empty() {
                Ok(exit::OK)
            } else {
                writeln!(err, "failing checks:")?;
                for f in failed {
                    writeln!(err, "  {f}")?;
                }
                Ok(exit::VALIDATION)
            }
        }
    }
}

/// Seed, sample count, cache and thread pool from the shared flags.
fn settings(c: &Common) -> Result<McSettings, Failure> {
    let seed = match &c.seed {
        Some(s) => parse_seed(s).map_err(|e| Failure::Usage(e.to_string()))?,
        None => master_seed_from_env().map_err(|e| Failure::Usage(e.to_string()))?,
    };
    let n = c.samples.unwrap_or(McSettings::DEFAULT_N);
    if n == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    if let Some(t) = c.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let mut mc = McSettings::new(n, seed);
    if let Some(dir) = &c.cache_dir {
        mc = mc.with_cache(TableCache::new(dir).map_err(|e| Failure::Io(e.to_string()))?);
    }
    Ok(mc)
}

fn point(a: PointArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let metric: Metric = a.metric.parse()?;
    let flag: Option<Layers> = a.layers.as_deref().map(str::parse).transpose()?;
    let (item, layers) = match (&a.scheme, &a.bound) {
        (Some(s), _) => {
            let s: SchemeTag = s.parse()?;
            (Item::Scheme(s), s.layers(metric, flag)?)
        }
        (None, Some(b)) => {
            let b: BoundTag = b.parse()?;
            b.kind(metric)?;
            let l = if metric == Metric::Throughput { Layers::Finite(1) } else { Layers::Inf };
            (Item::Bound(b), l)
        }
        (None, None) => return Err(Failure::Usage("give --scheme or --bound".into())),
    };
    let mc = settings(&a.common)?;
    let p = PowerConfig::from_db(a.ps_db, a.pr_db).map_err(|e| Failure::Usage(e.to_string()))?;
    let opts = EvalOptions { power_saving: a.power_saving };
    let r = evaluate(item, metric, layers, &p, &mc, &opts).map_err(|e| Failure::Numeric(format!("{}: {e}", item.tag())))?;
    let uses_mc = matches!(item, Item::Scheme(s) if s.uses_mc(metric));
    let row = CsvRow {
        ps_db: a.ps_db,
        pr_db: a.pr_db,
        scheme: item.tag(),
        metric: metric.to_string(),
        layers: layers.to_string(),
        value_nats: r.value_nats,
        params: r.params_string(),
        n_mc: if uses_mc { mc.n } else { 0 },
        seed: mc.master_seed,
    };
    write_csv(out, &[row])?;
    Ok(exit::OK)
}

fn sweep(
    spec: &SweepSpec,
    common: &Common,
    csv_path: Option<PathBuf>,
    plot: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    spec.items()?;
    let mc = settings(common)?;
    let outcome = run_sweep(spec, &mc)?;
    match csv_path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path)?);
            write_csv(&mut w, &outcome.rows)?;
            w.flush()?;
        }
        None => write_csv(out, &outcome.rows)?,
    }
    if let Some(path) = plot {
        let title = format!("{} rate, P_s = {} dB", spec.metric, spec.ps_db.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("/"));
        std::fs::write(path, render_svg(&title, &chart_series(&outcome.rows)))?;
    }
    if outcome.failures.is_empty() {
        Ok(exit::OK)
    } else {
        for f in &outcome.failures {
            writeln!(err, "failed: {f}")?;
        }
        Ok(exit::PARTIAL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CSV_HEADER;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_args(std::iter::once("diamondbc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn point_passes_df_through() {
        let (code, out, _) = call(&["point", "--scheme", "df", "--metric", "throughput", "--ps-db", "0", "--pr-db", "0", "--seed", "0x5EED"]);
        assert_eq!(code, exit::OK);
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..5], ["0", "0", "df", "throughput", "1"]);
        let want = diamondbc::schemes::df_throughput(&PowerConfig::new(1.0, 1.0).unwrap()).value_nats;
        assert_eq!(row[5], format!("{want:.9}"));
        assert_eq!(&row[7..], ["0", "24301"]);
    }

    #[test]
    fn usage_errors_exit_2() {
        for args in [
            &["point", "--scheme", "xf", "--ps-db", "0", "--pr-db", "0"][..],
            &["point", "--scheme", "df", "--metric", "throughput", "--layers", "2", "--ps-db", "0", "--pr-db", "0"],
            &["point", "--scheme", "df", "--metric", "expected", "--layers", "inf", "--ps-db", "0", "--pr-db", "0"],
            &["point", "--bound", "rc", "--metric", "expected", "--ps-db", "0", "--pr-db", "0"],
            &["point", "--bound", "cutset", "--ps-db", "0", "--pr-db", "0", "--seed", "0xZZ"],
            &["sweep", "--bounds", "rc", "--metric", "expected", "--pr-db", "0"],
            &["sweep", "--bounds", "cutset", "--pr-db", "10:0:1"],
            &["sweep", "--pr-db", "0"],
            &["validate", "--suite", "nope"],
            &["frobnicate"],
        ] {
            let (code, _, err) = call(args);
            assert_eq!(code, exit::USAGE, "{args:?}: {err}");
            assert!(!err.is_empty());
        }
    }

    #[test]
    fn bounds_only_sweep_writes_csv_and_svg() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("b.csv");
        let svg = dir.path().join("b.svg");
        let (code, out, _) = call(&[
            "sweep", "--bounds", "cutset,rc", "--pr-db", "0:20:10", "--out", csv.to_str().unwrap(), "--plot",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(code, exit::OK);
        assert!(out.is_empty());
        let text = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(text.lines().count(), 1 + 6);
        assert!(text.lines().nth(1).unwrap().starts_with("0,0,cutset,throughput,1,"));
        assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<polyline").count(), 2);
    }

    #[test]
    fn bounds_subcommand_lists_applicable_bounds() {
        let (code, out, _) = call(&["bounds", "--metric", "expected", "--pr-db", "0", "--seed", "9"]);
        assert_eq!(code, exit::OK);
        let tags: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
        assert_eq!(tags, ["cutset", "dfub"]);
        assert!(out.lines().nth(1).unwrap().ends_with(",0,9"));
    }

    #[test]
    fn validate_reports_each_check() {
        let (code, out, _) = call(&["validate", "--suite", "alamouti", "--samples", "20000", "--seed", "3"]);
        assert_eq!(code, exit::OK, "{out}");
        assert!(out.contains("[PASS] alamouti equivalence"));
        assert!(out.ends_with("5 passed, 0 failed, seed 3\n"));
    }

    #[test]
    fn help_is_not_an_error() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, exit::OK);
        assert!(out.contains("sweep"));
    }
}
