//! The `siegel-lab` command line: argument parsing, point files, and JSON or
//! CSV reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arithmetic::{is_siegel_reduced, siegel_reduce, MinkowskiViolation};
use crate::enumeration::{
    load_cache, orbit_distances, save_cache, standard_cache, CountMode, GroupCache,
};
use crate::error::{Error, Result};
use crate::kernel::{
    cusp_bound, decay_bound, majorant_sum, order_for_cusp_bound, truncated_norm, KernelParams,
};
use crate::matkit::RealMatrix;
use crate::siegel::{distance, identity_residual, spectrum, SiegelPoint};
use crate::verify::{run_suite, Suite, VerifyConfig};
use crate::volumes::{
    closed_form_vol2, genus2_volume_bound, polydisk_volume, volume_shape, QuadratureSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "siegel-lab",
    version,
    about = "Numerics on the Siegel upper half space"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long, env = "SKL_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Seed for every random stream.
    #[arg(long, default_value_t = crate::sampling::DEFAULT_SEED, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Cocompact,
    Arithmetic,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub z_file: PathBuf,
    #[arg(long)]
    pub w_file: PathBuf,
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    /// Maximal generator word length of the enumerated window.
    #[arg(long = "L", default_value_t = 2)]
    pub l: usize,
    /// Cache file to load instead of enumerating.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance and cross-ratio spectrum of two points.
    Distance(PairArgs),
    /// Enumerate Sp(2g, Z) up to a word length, optionally writing the cache.
    Enumerate {
        #[arg(long)]
        g: usize,
        #[arg(long = "L")]
        l: usize,
        /// Output cache file.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Count orbit points within each radius.
    Count {
        #[command(flatten)]
        pair: PairArgs,
        #[command(flatten)]
        cache: CacheArgs,
        /// Radii, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Cocompact)]
        mode: Mode,
    },
    /// Reduce a point towards the Siegel fundamental domain.
    Reduce {
        #[arg(long)]
        z_file: PathBuf,
        #[command(flatten)]
        cache: CacheArgs,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
    },
    /// Polydisk volumes and their shape bounds.
    Volume {
        #[arg(long)]
        g: usize,
        /// Polydisk radii, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
    /// Kernel bounds: the decay bound on a distance grid (`--d`), or the
    /// truncated norm and majorant for a pair of points.
    Kernel {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        k: u32,
        /// Distances, comma separated.
        #[arg(long, value_delimiter = ',')]
        d: Vec<f64>,
        #[arg(long, requires = "w_file")]
        z_file: Option<PathBuf>,
        #[arg(long, requires = "z_file")]
        w_file: Option<PathBuf>,
        #[command(flatten)]
        cache: CacheArgs,
    },
    /// Run property suites.
    Verify {
        /// Suite to run (all when omitted).
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
}

/// Process exit code for an error: 2 for bad input, 1 for domain or
/// convergence failures.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. }
        | Error::Format { .. }
        | Error::Io(_)
        | Error::Parameter(_)
        | Error::Dimension(_)
        | Error::Asymmetric { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::NonFinite(_) => 2,
        _ => 1,
    }
}

/// A command's result before formatting.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub diagnostics: Value,
    /// Grid output: headers and rows for CSV.
    pub table: Option<(Vec<&'static str>, Vec<Vec<Value>>)>,
    /// False when the command ran but its checks failed.
    pub ok: bool,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "result": self.result,
            "diagnostics": self.diagnostics,
        })
    }

    pub fn to_csv(&self) -> String {
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let mut out = String::new();
        match &self.table {
            Some((headers, rows)) => {
                let _ = writeln!(out, "{}", headers.join(","));
                for row in rows {
                    let _ = writeln!(
                        out,
                        "{}",
                        row.iter().map(cell).collect::<Vec<_>>().join(",")
                    );
                }
            }
            None => {
                let _ = writeln!(out, "key,value");
                if let Value::Object(map) = &self.result {
                    for (k, v) in map {
                        let _ = writeln!(out, "{k},\"{}\"", cell(v).replace('"', "\"\""));
                    }
                }
            }
        }
        out
    }
}

/// Parses a point file: `g=<g>`, then `g` rows of `X`, then `g` rows of
/// `Y`; `#` starts a comment and blank lines are skipped.
pub fn parse_point(text: &str) -> Result<SiegelPoint> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
        .filter(|(_, l)| !l.trim().is_empty());
    let (line, head) = rows.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty point file".into(),
    })?;
    let column = head.len() - head.trim_start().len() + 1;
    let g: usize = head
        .trim()
        .strip_prefix("g=")
        .and_then(|v| v.trim().parse().ok())
        .filter(|&g| g > 0)
        .ok_or_else(|| Error::Parse {
            line,
            column,
            message: format!("expected 'g=<positive integer>', found '{}'", head.trim()),
        })?;
    let mut values = Vec::with_capacity(2 * g * g);
    let mut last_line = line;
    for _ in 0..2 * g {
        let (line, text) = rows.next().ok_or_else(|| Error::Parse {
            line: last_line + 1,
            column: 1,
            message: format!("expected {} matrix rows after the header", 2 * g),
        })?;
        last_line = line;
        let mut count = 0;
        for (col, tok) in tokens(text) {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line,
                column: col,
                message: format!("'{tok}' is not a number"),
            })?;
            count += 1;
            if count > g {
                return Err(Error::Parse {
                    line,
                    column: col,
                    message: format!("more than {g} entries in a row"),
                });
            }
            values.push(v);
        }
        if count < g {
            return Err(Error::Parse {
                line,
                column: text.len() + 1,
                message: format!("expected {g} entries, found {count}"),
            });
        }
    }
    if let Some((line, text)) = rows.next() {
        return Err(Error::Parse {
            line,
            column: text.len() - text.trim_start().len() + 1,
            message: "unexpected content after the Y block".into(),
        });
    }
    let x = RealMatrix::new(g, g, values[..g * g].to_vec())?;
    let y = RealMatrix::new(g, g, values[g * g..].to_vec())?;
    SiegelPoint::new(x, y)
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text
        .char_indices()
        .chain(std::iter::once((text.len(), ' ')))
    {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out.into_iter()
}

pub fn load_point(path: &Path) -> Result<SiegelPoint> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_point(&text)
}

/// Formats a point in the point-file syntax.
pub fn format_point(z: &SiegelPoint) -> String {
    let g = z.g();
    let mut out = format!("g={g}\n");
    for m in [z.x(), z.y().as_matrix()] {
        for i in 0..g {
            let row: Vec<String> = (0..g).map(|j| format!("{:?}", m[(i, j)])).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}

fn matrix_json(m: &RealMatrix) -> Value {
    json!((0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn point_json(z: &SiegelPoint) -> Value {
    json!({ "x": matrix_json(z.x()), "y": matrix_json(z.y().as_matrix()) })
}

fn obtain_cache(g: usize, args: &CacheArgs) -> Result<GroupCache> {
    let cache = match &args.cache {
        Some(path) => load_cache(path)?,
        None => standard_cache(g, args.l)?,
    };
    if cache.g() != g {
        return Err(Error::Dimension(format!(
            "cache genus {} vs point genus {g}",
            cache.g()
        )));
    }
    Ok(cache)
}

fn cache_json(c: &GroupCache) -> Value {
    json!({
        "g": c.g(),
        "max_word_length": c.max_word_length(),
        "generators": c.descriptor(),
        "size": c.len(),
        "truncated": c.truncated(),
    })
}

fn quad(nodes: usize) -> Result<QuadratureSpec> {
    let q = QuadratureSpec::with_nodes(nodes);
    q.validate()?;
    Ok(q)
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let config = json!({ "seed": cli.seed, "threads": rayon::current_num_threads() });
    let with = |mut base: Value, extra: Value| {
        if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
            b.extend(e);
        }
        base
    };
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Distance(pair) => {
            let (z, w) = (load_point(&pair.z_file)?, load_point(&pair.w_file)?);
            let s = spectrum(&z, &w)?;
            Report {
                command: "distance",
                config: with(config, json!({ "g": z.g() })),
                result: json!({
                    "d_s": s.distance(),
                    "rho": s.rho,
                    "r": s.radii,
                    "identity_residual": identity_residual(&z, &w)?,
                }),
                diagnostics: json!({}),
                table: None,
                ok: true,
            }
        }
        Command::Enumerate { g, l, cache } => {
            let c = standard_cache(*g, *l)?;
            if let Some(path) = cache {
                save_cache(&c, path)?;
            }
            Report {
                command: "enumerate",
                config: with(config, json!({ "g": g, "L": l, "cache": cache })),
                result: cache_json(&c),
                diagnostics: json!({ "written": cache.is_some() }),
                table: None,
                ok: true,
            }
        }
        Command::Count {
            pair,
            cache,
            r,
            mode,
        } => {
            let (z, w) = (load_point(&pair.z_file)?, load_point(&pair.w_file)?);
            let c = obtain_cache(z.g(), cache)?;
            let mode = match mode {
                Mode::Cocompact => CountMode::Cocompact,
                Mode::Arithmetic => CountMode::Arithmetic,
            };
            if let Some(bad) = r.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::Parameter(format!(
                    "radius {bad} must be finite and nonnegative"
                )));
            }
            let d = orbit_distances(&c, &z, &w)?;
            let rows: Vec<Vec<Value>> = r
                .iter()
                .map(|&rad| {
                    let n = c
                        .elements()
                        .iter()
                        .zip(&d)
                        .filter(|(e, &x)| mode.admits(e) && x < rad)
                        .count();
                    vec![json!(rad), json!(n)]
                })
                .collect();
            Report {
                command: "count",
                config: with(
                    config,
                    json!({ "g": z.g(), "mode": format!("{mode:?}").to_lowercase() }),
                ),
                result: json!({ "radius": r, "count": rows.iter().map(|row| row[1].clone()).collect::<Vec<_>>() }),
                diagnostics: json!({ "cache": cache_json(&c), "windowed": true }),
                table: Some((vec!["radius", "count"], rows)),
                ok: true,
            }
        }
        Command::Reduce {
            z_file,
            cache,
            max_iter,
        } => {
            let z = load_point(z_file)?;
            let c = obtain_cache(z.g(), cache)?;
            let red = siegel_reduce(&z, c.elements(), *max_iter)?;
            let diag = is_siegel_reduced(&red.z, c.elements())?;
            let violations: Vec<Value> = diag
                .minkowski
                .violations
                .iter()
                .map(|v| match v {
                    MinkowskiViolation::SuperDiagonal { k, value } => {
                        json!({ "super_diagonal": k, "value": value })
                    }
                    MinkowskiViolation::ShortVector {
                        h,
                        k,
                        value,
                        diagonal,
                    } => {
                        json!({ "short_vector": h, "k": k, "value": value, "diagonal": diagonal })
                    }
                })
                .collect();
            Report {
                command: "reduce",
                config: with(config, json!({ "g": z.g(), "max_iter": max_iter })),
                result: json!({
                    "gamma": red.gamma.entries(),
                    "z": point_json(&red.z),
                    "iterations": red.iterations,
                    "complete": red.complete,
                    "reduced": diag.reduced,
                }),
                diagnostics: json!({
                    "det_witness": diag.det_witness,
                    "x_witness": diag.x_witness,
                    "minkowski_violations": violations,
                    "scan_bound": diag.minkowski.scan_bound,
                    "relative_to_candidates": diag.relative_to_candidates,
                    "cache": cache_json(&c),
                }),
                table: None,
                ok: true,
            }
        }
        Command::Volume { g, r, nodes } => {
            let q = quad(*nodes)?;
            let mut rows = Vec::new();
            for &rad in r {
                let v = polydisk_volume(*g, rad, &q)?;
                let (bound, closed) = if *g == 2 {
                    (genus2_volume_bound(rad), Some(closed_form_vol2(rad)?.total))
                } else {
                    (volume_shape(*g, rad), None)
                };
                rows.push(vec![
                    json!(rad),
                    json!(v),
                    json!(closed),
                    json!(bound),
                    json!(v / bound),
                ]);
            }
            let column = |i: usize| rows.iter().map(|row| row[i].clone()).collect::<Vec<_>>();
            Report {
                command: "volume",
                config: with(config, json!({ "g": g, "nodes": nodes })),
                result: json!({
                    "r": r,
                    "total": column(1),
                    "closed_form": column(2),
                    "bound": column(3),
                    "ratio": column(4),
                }),
                diagnostics: json!({ "bound_shape": if *g == 2 { "32 cosh^2 sinh^4" } else { "cosh^(g^2-2) sinh^(g+2)" } }),
                table: Some((vec!["r", "total", "closed_form", "bound", "ratio"], rows)),
                ok: true,
            }
        }
        Command::Kernel {
            g,
            k,
            d,
            z_file,
            w_file,
            cache,
        } => {
            let p = KernelParams::new(*g, *k)?;
            let config = with(config, json!({ "g": g, "k": k, "weight": p.weight() }));
            match (z_file, w_file) {
                (Some(zf), Some(wf)) => {
                    let (z, w) = (load_point(zf)?, load_point(wf)?);
                    let c = obtain_cache(*g, cache)?;
                    let norm = truncated_norm(&p, &z, &w, &c)?.value;
                    let maj = majorant_sum(&p, &z, &w, &c)?;
                    let dist = distance(&z, &w)?;
                    let swapped = w.y().det() < z.y().det();
                    let (a, b) = order_for_cusp_bound(z, w);
                    let t2 = cusp_bound(&p, &a, &b).ok();
                    Report {
                        command: "kernel",
                        config,
                        result: json!({
                            "d_s": dist,
                            "truncated_norm": norm,
                            "majorant_sum": maj,
                            "decay_bound": decay_bound(&p, dist).ok(),
                            "cusp_bound": t2.map(|t| json!({ "cusp_term": t.cusp_term, "decay_term": t.decay_term, "total": t.total })),
                        }),
                        diagnostics: json!({ "cache": cache_json(&c), "swapped_for_cusp_bound": swapped }),
                        table: None,
                        ok: true,
                    }
                }
                _ => {
                    if d.is_empty() {
                        return Err(Error::Parameter(
                            "kernel needs --d or both --z-file and --w-file".into(),
                        ));
                    }
                    let rows = d
                        .iter()
                        .map(|&x| Ok(vec![json!(x), json!(decay_bound(&p, x)?)]))
                        .collect::<Result<Vec<_>>>()?;
                    Report {
                        command: "kernel",
                        config,
                        result: json!({ "d": d, "decay_bound": rows.iter().map(|r| r[1].clone()).collect::<Vec<_>>() }),
                        diagnostics: json!({}),
                        table: Some((vec!["d", "decay_bound"], rows)),
                        ok: true,
                    }
                }
            }
        }
        Command::Verify { suite, nodes } => {
            let suites: Vec<Suite> = match suite.as_deref() {
                None | Some("all") => Suite::ALL.to_vec(),
                Some(name) => vec![name.parse()?],
            };
            let cfg = VerifyConfig {
                seed: cli.seed,
                quad: quad(*nodes)?,
                ..VerifyConfig::default()
            };
            let reports = suites
                .iter()
                .map(|&s| run_suite(s, &cfg))
                .collect::<Result<Vec<_>>>()?;
            let ok = reports.iter().all(|r| r.passed());
            let rows = reports
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(move |c| {
                        vec![
                            json!(r.suite.name()),
                            json!(c.name),
                            json!(c.passed),
                            json!(c.measured),
                            json!(c.threshold),
                        ]
                    })
                })
                .collect();
            Report {
                command: "verify",
                config: with(config, json!({ "nodes": nodes, "suites": suites })),
                result: json!({ "passed": ok, "suites": reports }),
                diagnostics: json!({}),
                table: Some((
                    vec!["suite", "check", "passed", "measured", "threshold"],
                    rows,
                )),
                ok,
            }
        }
    };
    if let Value::Object(m) = &mut report.diagnostics {
        m.insert("elapsed_s".into(), json!(start.elapsed().as_secs_f64()));
    }
    Ok(report)
}

/// Parses `args`, runs the command and prints the report; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_json()).expect("report is valid JSON")
                ),
                Format::Csv => print!("{}", report.to_csv()),
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
