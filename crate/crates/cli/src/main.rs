use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2_bergman::automorphism::normalize;
use g2_bergman::closed_forms::Registry;
use g2_bergman::geometry::{default_x_grid, pinch_scan, Extremum, PinchReport, Route, ScanOptions};
use g2_bergman::point::ComplexPoint2;
use g2_bergman::verify::{format_float, quantity_at, verify, Grid, Tolerances, CSV_HEADER};
use num_complex::Complex64;

/// Bergman-metric geometry of the symmetrized bidisc.
#[derive(Parser)]
#[command(name = "g2-bergman", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity at (x, 0) or at a point of the domain.
    Eval(EvalArgs),
    /// Compare closed forms, the derivative pipeline and the oracle on a grid.
    Verify(VerifyArgs),
    /// Scan holomorphic sectional curvature over points and directions.
    Scan(ScanArgs),
    /// Tabulate a closed form over a grid.
    Table(TableArgs),
    /// Map a point to its normal form (x, 0).
    Normalize(NormalizeArgs),
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, conflicts_with = "point", required_unless_present = "point", allow_negative_numbers = true)]
    x: Option<f64>,
    /// w1 and w2 as re,im,re,im
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    #[arg(long)]
    quantity: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// start:stop:step
    #[arg(long, default_value = "0.05:0.95:0.05")]
    grid: String,
    /// Override a tolerance: pipeline, radical, oracle or a quantity name
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Multiply one closed form by a factor before comparing
    #[arg(long, value_name = "NAME=FACTOR", hide = true)]
    perturb: Option<String>,
}

#[derive(Args)]
struct ScanArgs {
    /// start:stop:step, default 0:0.99:0.01
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = ScanOptions::default().s_steps)]
    s_steps: usize,
    #[arg(long, default_value_t = ScanOptions::default().phase_steps)]
    phase_steps: usize,
    /// Widening of the containment bounds
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    quantity: String,
    #[arg(long, default_value = "0.05:0.95:0.05")]
    grid: String,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct NormalizeArgs {
    /// w1 and w2 as re,im,re,im
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

/// Failure classes, mapped to exit codes.
enum Failure {
    Usage(String),
    Verification,
    Io(String),
}

impl From<g2_bergman::error::Error> for Failure {
    fn from(e: g2_bergman::error::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn parse_point(s: &str) -> Result<ComplexPoint2, Failure> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts.as_deref() {
        Ok([a, b, c, d]) => Ok(ComplexPoint2::new(Complex64::new(*a, *b), Complex64::new(*c, *d))),
        _ => Err(Failure::Usage(format!("bad point `{s}`, expected re,im,re,im"))),
    }
}

fn parse_assignment(s: &str) -> Result<(&str, f64), Failure> {
    let bad = || Failure::Usage(format!("bad assignment `{s}`, expected NAME=VALUE"));
    let (name, value) = s.split_once('=').ok_or_else(bad)?;
    let value = value.trim().parse::<f64>().map_err(|_| bad())?;
    Ok((name.trim(), value))
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    Ok(s.parse::<Grid>()?.points())
}

fn write_output(path: &Path, body: &str) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(body.as_bytes())?;
    out.flush()
}

fn eval(args: &EvalArgs) -> Outcome {
    let registry = Registry::standard();
    registry.get(&args.quantity)?;
    let x = match (&args.point, args.x) {
        (Some(p), _) => {
            let x = normalize(parse_point(p)?)?.x;
            println!("x = {}", format_float(x));
            x
        }
        (None, Some(x)) => x,
        (None, None) => unreachable!("clap requires one of --x and --point"),
    };
    let value = quantity_at(&args.quantity, x, Route::auto(x))?;
    println!("{} = {}", args.quantity, format_float(value));
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Outcome {
    let perturbed;
    let registry = match &args.perturb {
        Some(p) => {
            let (name, factor) = parse_assignment(p)?;
            perturbed = Registry::standard().perturbed(name, factor)?;
            &perturbed
        }
        None => Registry::standard(),
    };
    let mut tol = Tolerances::default();
    for t in &args.tol {
        let (name, value) = parse_assignment(t)?;
        tol.set(name, value, registry)?;
    }
    let report = verify(registry, &parse_grid(&args.grid)?, &tol)?;
    if let Some(path) = &args.csv {
        write_output(path, &report.to_csv())?;
    }
    let s = report.summary();
    println!(
        "{} rows, {} passed, {} failed, max pipeline rel_err {}, max oracle rel_err {}",
        s.total,
        s.passed,
        s.failed,
        format_float(s.max_rel_err),
        format_float(s.max_oracle_rel_err)
    );
    for r in report.failures() {
        println!("FAIL {} x={} rel_err={}", r.quantity, r.x, r.rel_err.map(format_float).unwrap_or_default());
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn describe(label: &str, e: &Extremum) -> String {
    format!(
        "{label} = {} at x = {}, s = {}, phi = {}",
        format_float(e.value),
        e.x,
        format_float(e.s),
        format_float(e.phi)
    )
}

fn scan_rows(r: &PinchReport, l_ok: bool, r_ok: bool) -> String {
    let mut rows = vec![
        ("B_XY_max", &r.b_xy_max, r.b_xy_max.value > 0.0),
        ("L_max", &r.l_max, l_ok),
        ("L_max_refined", &r.l_max_refined, l_ok),
        ("L_min", &r.l_min, l_ok),
        ("L_min_refined", &r.l_min_refined, l_ok),
        ("R_max", &r.r_max, r_ok),
        ("R_max_refined", &r.r_max_refined, r_ok),
        ("R_min", &r.r_min, r_ok),
        ("R_min_refined", &r.r_min_refined, r_ok),
    ];
    rows.sort_by(|a, b| a.0.cmp(b.0).then(a.1.x.total_cmp(&b.1.x)));
    let mut out = format!("{CSV_HEADER}\n");
    for (name, e, pass) in rows {
        out.push_str(&format!("{name},{},,{},,,,{pass}\n", format_float(e.x), format_float(e.value)));
    }
    out
}

fn scan(args: &ScanArgs) -> Outcome {
    let grid = match &args.grid {
        Some(g) => parse_grid(g)?,
        None => default_x_grid(),
    };
    let mut widen = 1e-6;
    for t in &args.tol {
        match parse_assignment(t)? {
            ("bounds", v) if v.is_finite() && v >= 0.0 => widen = v,
            _ => return Err(Failure::Usage(format!("unknown scan tolerance `{t}`, expected bounds=VALUE"))),
        }
    }
    let opts = ScanOptions {
        s_steps: args.s_steps,
        phase_steps: args.phase_steps,
        ..ScanOptions::default()
    };
    let r = pinch_scan(&grid, &opts)?;
    for (label, e) in [
        ("L min", &r.l_min),
        ("L max", &r.l_max),
        ("L min refined", &r.l_min_refined),
        ("L max refined", &r.l_max_refined),
        ("R min", &r.r_min),
        ("R max", &r.r_max),
        ("R min refined", &r.r_min_refined),
        ("R max refined", &r.r_max_refined),
    ] {
        println!("{}", describe(label, e));
    }
    println!("B_XY max = {} at x = {}", format_float(r.b_xy_max.value), r.b_xy_max.x);
    let (l_ok, r_ok) = (r.l_contained(widen), r.r_contained(widen));
    let signs_ok = r.nonnegative == 0;
    println!("L within [-10, -1/2]: {}", if l_ok { "yes" } else { "NO" });
    println!("R within [-10, -1/18]: {}", if r_ok { "yes" } else { "NO" });
    println!("nonnegative samples: {} of {}", r.nonnegative, r.samples);
    if let Some(path) = &args.csv {
        write_output(path, &scan_rows(&r, l_ok, r_ok))?;
    }
    if l_ok && r_ok && signs_ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn table(args: &TableArgs) -> Outcome {
    let form = Registry::standard().get(&args.quantity)?;
    let mut out = format!("{CSV_HEADER}\n");
    for x in parse_grid(&args.grid)? {
        let v = form.eval(x)?;
        out.push_str(&format!("{},{},{},,,,,\n", form.name(), format_float(x), format_float(v)));
    }
    match &args.csv {
        Some(path) => write_output(path, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn run_normalize(args: &NormalizeArgs) -> Outcome {
    let n = normalize(parse_point(&args.point)?)?;
    let alpha = n.h.alpha();
    println!("x = {}", format_float(n.x));
    println!("alpha = {},{}", format_float(alpha.re), format_float(alpha.im));
    println!("theta = {}", format_float(n.h.theta()));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => eval(a),
        Command::Verify(a) => run_verify(a),
        Command::Scan(a) => scan(a),
        Command::Table(a) => table(a),
        Command::Normalize(a) => run_normalize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
