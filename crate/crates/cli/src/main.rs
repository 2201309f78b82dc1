//! `steiner`: symmetrize functions and run the Santaló experiments from the shell.
//!
//! Every command prints a JSON summary on stdout; `--out` receives the CSV (or
//! JSON) payload. Exit codes: 0 ok, 2 input error, 3 validation error,
//! 4 hypothesis violation, 1 anything else.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use steiner_core::convex1d::{sample_convex, SampleOptions};
use steiner_core::funcbank::{self, Body};
use steiner_core::gridnd::{fmt_value, steiner_symmetrize};
use steiner_core::santalo::{self, convergence_experiment, SantaloReport};
use steiner_core::{Direction, Error, GridFn, PlConvex1D};

#[derive(Parser)]
#[command(name = "steiner", version, about = "Steiner symmetrization of convex functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symmetrize a function and write (x, f, Sf, S~f) samples.
    Symmetrize(Run),
    /// Compare the width-preserving symmetral with the lambda = 1/2 variant.
    CompareDefs(Run),
    /// Santaló product of an even function.
    Santalo(Run),
    /// Iterated random symmetrizations of a 2-D grid function.
    Converge(Run),
    /// List the named functions.
    Catalog {
        /// Also check every attached fact.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Run {
    /// Named function from the catalog.
    #[arg(long = "fn", value_name = "ID", conflicts_with = "file", required_unless_present = "file")]
    func: Option<String>,
    /// 1-D function spec (JSON) or saved grid (`stem.json` next to `stem.bin`).
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// Direction "ux,uy" for 2-D inputs (normalized).
    #[arg(long, value_name = "UX,UY", default_value = "1,0")]
    u: String,
    /// Samples per axis: grid resolution in 2-D, CSV rows in 1-D.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    #[arg(long, value_name = "K", default_value_t = 50)]
    steps: usize,
    #[arg(long, value_name = "S", default_value_t = 7)]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Fit tolerance for analytic 1-D functions.
    #[arg(long, value_name = "T")]
    tol: Option<f64>,
}

/// Command failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Malformed(_) | Error::Argument(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Invalid(_) | Error::NonConvexSection { .. } | Error::EmptyDomain => 3,
            Error::NotEven(_) | Error::Divergent(_) => 4,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type CmdResult = Result<Value, Failure>;

enum Loaded {
    Pl(PlConvex1D),
    Grid(GridFn),
}

struct Input {
    id: String,
    data: Loaded,
}

fn load(run: &Run) -> Result<Input, Failure> {
    if run.grid.is_some_and(|n| n < 2) {
        return Err(input_error("--grid needs at least 2 samples"));
    }
    if run.tol.is_some_and(|t| !(t > 0.0)) {
        return Err(input_error("--tol must be positive"));
    }
    if let Some(id) = &run.func {
        let e = funcbank::lookup(id)?;
        let data = match &e.body {
            Body::Analytic2D { .. } => Loaded::Grid(e.grid(run.grid)?),
            Body::Analytic1D { eval, window, anchors, .. } if run.tol.is_some() => {
                let opts = SampleOptions { tol: run.tol.unwrap_or_default(), anchors: anchors.clone(), ..Default::default() };
                Loaded::Pl(sample_convex(eval, *window, &opts)?)
            }
            _ => Loaded::Pl(e.pl()?),
        };
        return Ok(Input { id: id.clone(), data });
    }
    let path = run.file.as_ref().ok_or_else(|| input_error("one of --fn or --file is required"))?;
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let spec: Value = serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    let id = path.file_stem().map_or("file".into(), |s| s.to_string_lossy().into_owned());
    let data = if spec.get("breakpoints").is_some() {
        let f = PlConvex1D::from_json(&text)?;
        let violations = f.validate();
        if !violations.is_empty() {
            return Err(Error::Invalid(violations).into());
        }
        Loaded::Pl(f)
    } else {
        Loaded::Grid(GridFn::load(&path.with_extension(""))?)
    };
    Ok(Input { id, data })
}

fn direction(run: &Run, dim: usize) -> Result<Direction, Failure> {
    if dim == 1 {
        return Ok(Direction::axis(1, 0)?);
    }
    let comps: Vec<f64> = run
        .u
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| input_error(format!("--u expects \"ux,uy\", got {:?}", run.u)))?;
    Ok(Direction::normalized(&comps)?)
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure { code: 2, message: format!("{}: {e}", path.display()) })
}

/// Symmetric sampling window covering `{f <= min f + 10}`.
fn window(f: &PlConvex1D) -> f64 {
    let m = f.argmin_interval().map(|a| a.level).unwrap_or(0.0);
    let (a, b) = f.sublevel_interval(m + 10.0).unwrap_or((-1.0, 1.0));
    let w = a.abs().max(b.abs());
    if w > 0.0 { w } else { 1.0 }
}

fn abscissae(w: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| -w + 2.0 * w * i as f64 / (n - 1) as f64).collect()
}

fn width_residual(f: &PlConvex1D, s: &PlConvex1D) -> f64 {
    let m = f.argmin_interval().map(|a| a.level).unwrap_or(0.0);
    (0..100)
        .map(|k| m + 10.0 * (k as f64 + 0.5) / 100.0)
        .map(|lv| {
            let (a, b) = (s.width_at(lv), f.width_at(lv));
            if a == b { 0.0 } else { (a - b).abs() / b.abs().max(1.0) }
        })
        .fold(0.0, f64::max)
}

fn rel_drift(after: f64, before: f64) -> f64 {
    (after - before).abs() / before
}

fn cmd_symmetrize(run: &Run) -> CmdResult {
    let input = load(run)?;
    match &input.data {
        Loaded::Pl(f) => {
            let s = f.symmetrize()?;
            let a = f.symmetrize_amk()?;
            let n = run.grid.unwrap_or(201);
            let xs = abscissae(window(f), n);
            let mut csv = String::from("x,f,sf,amk\n");
            for &x in &xs {
                csv += &format!("{},{},{},{}\n", fmt_value(x), fmt_value(f.eval(x)), fmt_value(s.eval(x)), fmt_value(a.eval(x)));
            }
            if let Some(p) = &run.out {
                write_out(p, csv.as_bytes())?;
            }
            let (i0, i1) = (f.exp_integral(), s.exp_integral());
            Ok(json!({
                "id": input.id, "dim": 1, "samples": n,
                "integral_before": i0, "integral_after": i1, "integral_drift": rel_drift(i1, i0),
                "amk_integral": a.exp_integral(),
                "width_residual": width_residual(f, &s),
            }))
        }
        Loaded::Grid(g) => {
            let u = direction(run, g.dim())?;
            let s = steiner_symmetrize(g, &u)?;
            if let Some(p) = &run.out {
                let mut csv = String::from(if g.dim() == 2 { "x,y,f,sf\n" } else { "x,f,sf\n" });
                for k in 0..g.values().len() {
                    let pt = g.spec().point(k);
                    let coords = if g.dim() == 2 { format!("{},{}", fmt_value(pt[0]), fmt_value(pt[1])) } else { fmt_value(pt[0]) };
                    csv += &format!("{coords},{},{}\n", fmt_value(g.values()[k]), fmt_value(s.values()[k]));
                }
                write_out(p, csv.as_bytes())?;
            }
            let (i0, i1) = (g.exp_integral()?, s.exp_integral()?);
            Ok(json!({
                "id": input.id, "dim": g.dim(), "direction": u.components(), "shape": g.spec().shape,
                "integral_before": i0, "integral_after": i1, "integral_drift": rel_drift(i1, i0),
                "radial_deviation_before": g.radial_deviation(), "radial_deviation_after": s.radial_deviation(),
            }))
        }
    }
}

fn cmd_compare_defs(run: &Run) -> CmdResult {
    let input = load(run)?;
    let Loaded::Pl(f) = &input.data else {
        return Err(input_error("compare-defs needs a 1-D function"));
    };
    let s = f.symmetrize()?;
    let a = f.symmetrize_amk()?;
    let n = run.grid.unwrap_or(201);
    let xs = abscissae(window(f), n);
    let mut gap = 0.0f64;
    let mut csv = String::from("x,sf,amk,gap\n");
    for &x in &xs {
        let (sv, av) = (s.eval(x), a.eval(x));
        let d = if sv == av { 0.0 } else { sv - av };
        if d.is_finite() {
            gap = gap.max(d);
        }
        csv += &format!("{},{},{},{}\n", fmt_value(x), fmt_value(sv), fmt_value(av), fmt_value(d));
    }
    if let Some(p) = &run.out {
        write_out(p, csv.as_bytes())?;
    }
    let i = f.exp_integral();
    Ok(json!({
        "id": input.id, "samples": n, "max_gap": gap,
        "integral": i,
        "symmetral_integral_drift": rel_drift(s.exp_integral(), i),
        "amk_integral_drift": rel_drift(a.exp_integral(), i),
    }))
}

fn report_json(r: &SantaloReport) -> Result<Value, Failure> {
    Ok(serde_json::to_value(r).map_err(Error::from)?)
}

fn cmd_santalo(run: &Run) -> CmdResult {
    let input = load(run)?;
    let report = match &input.data {
        Loaded::Pl(f) => santalo::santalo_product_pl(f, &input.id)?,
        Loaded::Grid(g) => santalo::santalo_product_grid(g, &input.id)?,
    };
    let v = report_json(&report)?;
    if let Some(p) = &run.out {
        write_out(p, report.to_json()?.as_bytes())?;
    }
    Ok(v)
}

fn cmd_converge(run: &Run) -> CmdResult {
    let input = load(run)?;
    let Loaded::Grid(g) = &input.data else {
        return Err(input_error("converge needs a 2-D function"));
    };
    let (trace, _) = convergence_experiment(g, run.steps, run.seed)?;
    let last = trace.steps.last().expect("trace has the initial state");
    let bound = (2.0 * std::f64::consts::PI).powi(2);
    let report = SantaloReport {
        id: input.id.clone(),
        dim: 2,
        integral: last.integral,
        dual_integral: last.dual_integral,
        product: last.product,
        bound,
        slack: bound - last.product,
        asymmetry: g.asymmetry()?.0,
        seed: Some(run.seed),
        trace: trace.steps.clone(),
    };
    if let Some(p) = &run.out {
        let mut csv = Vec::new();
        trace.write_csv(&mut csv)?;
        write_out(p, &csv)?;
    }
    Ok(json!({
        "report": report_json(&report)?,
        "initial_deviation": trace.initial_deviation(),
        "final_deviation": trace.final_deviation(),
        "deviation_ratio": trace.final_deviation() / trace.initial_deviation(),
        "integral_drift": trace.integral_drift(),
        "worst_product_drop": trace.worst_product_drop(),
    }))
}

fn cmd_catalog(verify: bool, out: Option<&Path>) -> CmdResult {
    let mut entries = Vec::new();
    for e in funcbank::catalog() {
        let mut v = e.to_json()?;
        if verify {
            let outcomes = e.verify()?;
            v["verified"] = json!(outcomes.iter().all(|o| o.passed));
            v["facts"] = outcomes
                .iter()
                .map(|o| json!({"claim": o.claim, "error": o.error, "tolerance": o.tolerance, "passed": o.passed}))
                .collect();
        }
        entries.push(v);
    }
    let all = Value::Array(entries);
    if let Some(p) = out {
        write_out(p, serde_json::to_string_pretty(&all).map_err(Error::from)?.as_bytes())?;
    }
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Command::Symmetrize(r) => cmd_symmetrize(r),
        Command::CompareDefs(r) => cmd_compare_defs(r),
        Command::Santalo(r) => cmd_santalo(r),
        Command::Converge(r) => cmd_converge(r),
        Command::Catalog { verify, out } => cmd_catalog(*verify, out.as_deref()),
    };
    match res {
        Ok(v) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&v).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
