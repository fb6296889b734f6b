use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use radspec::frobenius::{truncation_a_roots, truncation_b_roots, truncation_w};
use radspec::model::{allowed_omega_scan, reduce, truncation_residual_at, BRACKETS_PER_DECADE};
use radspec::output::{sci, Csv};
use radspec::real::to_decimal;
use radspec::sweep::{sweep, SweepSpec};
use radspec::variational::{spectrum, BasisSpec, Precision};
use radspec::verify::{self, Level};
use radspec::{Error, PhysicalParams, ReducedParams, SpinLabel};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXTENDED_DIGITS: usize = 20;

#[derive(Parser)]
#[command(name = "radspec", version, about = "Spectrum of L = -d²/dξ² - (1/ξ)d/dξ + γ²/ξ² - a/ξ + bξ + ξ²")]
#[command(after_help = "Exit codes: 0 ok, 1 usage error, 2 numerical failure, 3 verification failure.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Roots of the truncation condition c_{n+1} = 0 as CSV (n,i,root,w)
    Truncate(TruncateArgs),
    /// Rayleigh-Ritz eigenvalues as JSON
    Spectrum(SpectrumArgs),
    /// Eigencurves W_ν(a) and truncation points as two CSV files
    Sweep(SweepArgs),
    /// Reduce physical model constants to (γ, a, b)
    Map(MapArgs),
    /// Frequencies at which the truncation condition holds, with the spectrum beside each
    AllowedOmega(AllowedOmegaArgs),
    /// Run the regression and property checks
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Solve for a at fixed b
    ARoots,
    /// Solve for b at fixed a
    BRoots,
}

#[derive(Args)]
struct TruncateArgs {
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Truncation order (n = 1, 2, ...)
    #[arg(long)]
    n: usize,
    /// Linear coupling (a-roots mode)
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    /// Inverse-distance coupling (b-roots mode)
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// Defaults to a-roots when --b is given and b-roots when --a is given
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 5)]
    count: usize,
    /// Number of basis functions [default: 22 extended, 12 double]
    #[arg(long)]
    basis_size: Option<usize>,
    /// Gaussian exponent β of the basis
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, value_enum, default_value = "extended")]
    precision: PrecisionArg,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, allow_hyphen_values = true)]
    a_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    a_max: f64,
    /// Number of equally spaced a values, endpoints included
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    nu_max: usize,
    /// Largest truncation order in the overlay (0 for none)
    #[arg(long)]
    n_max: usize,
    #[arg(long)]
    basis_size: Option<usize>,
    #[arg(long, value_enum, default_value = "extended")]
    precision: PrecisionArg,
    /// Output file for the curves (a,nu,w)
    #[arg(long, default_value = "curves.csv")]
    curves: PathBuf,
    /// Output file for the truncation points (n,i,a_root,w)
    #[arg(long, default_value = "overlay.csv")]
    overlay: PathBuf,
}

/// Model constants other than the frequency.
#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    m: f64,
    /// Product g · field_norm · λ; replaces the three individual flags
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["g_factor", "field_norm", "lambda_c"])]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["field_norm", "lambda_c"])]
    g_factor: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["g_factor", "lambda_c"])]
    field_norm: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["g_factor", "field_norm"])]
    lambda_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    a1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    v0: f64,
    #[arg(long, allow_hyphen_values = true)]
    l: i32,
    /// Spin label, +1 or -1
    #[arg(long, allow_hyphen_values = true)]
    s: i32,
}

impl ModelArgs {
    fn physical(&self, omega: f64) -> Result<PhysicalParams, Error> {
        let s = SpinLabel::try_from(self.s)?;
        let (g_factor, field_norm, lambda_c) = match (self.kappa, self.g_factor, self.field_norm, self.lambda_c) {
            (Some(k), _, _, _) => (k, 1.0, 1.0),
            (None, Some(g), Some(f), Some(l)) => (g, f, l),
            _ => {
                return Err(Error::InvalidArgument(
                    "give --kappa or all of --g-factor, --field-norm, --lambda-c".into(),
                ))
            }
        };
        Ok(PhysicalParams { m: self.m, omega, g_factor, field_norm, lambda_c, a1: self.a1, v0: self.v0, l: self.l, s })
    }
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    omega: f64,
}

#[derive(Args)]
struct AllowedOmegaArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    /// Frequency interval as LO:HI
    #[arg(long, value_parser = parse_range)]
    range: (f64, f64),
    /// Bisection brackets per decade of frequency
    #[arg(long, default_value_t = BRACKETS_PER_DECADE)]
    per_decade: usize,
    /// Eigenvalues reported at 1.05 × each root
    #[arg(long, default_value_t = 3)]
    count: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    level: LevelArg,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

/// Failure of a subcommand, carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::InvalidRange { .. } => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values always serialise"));
}

fn truncate(args: &TruncateArgs) -> Result<(), Failure> {
    if args.n == 0 {
        return Err(usage("--n must be a positive integer: truncation orders are n = 1, 2, ..."));
    }
    let mode = match (args.mode, args.a, args.b) {
        (Some(m), _, _) => m,
        (None, None, Some(_)) => Mode::ARoots,
        (None, Some(_), None) => Mode::BRoots,
        _ => return Err(usage("give exactly one of --b (a-roots) or --a (b-roots), or set --mode")),
    };
    let mut csv = Csv::new(&["n", "i", "root", "w"]);
    match mode {
        Mode::ARoots => {
            let b = args.b.ok_or_else(|| usage("a-roots mode needs --b"))?;
            let sol = truncation_a_roots(args.gamma, args.n, b)?;
            for (k, root) in sol.a_roots.iter().enumerate() {
                csv.push([args.n.to_string(), (k + 1).to_string(), sci(*root), sci(sol.w)]);
            }
        }
        Mode::BRoots => {
            let a = args.a.ok_or_else(|| usage("b-roots mode needs --a"))?;
            for (k, root) in truncation_b_roots(args.gamma, args.n, a)?.iter().enumerate() {
                let w = truncation_w(args.gamma, args.n, *root);
                csv.push([args.n.to_string(), (k + 1).to_string(), sci(*root), sci(w)]);
            }
        }
    }
    print!("{}", csv.as_str());
    Ok(())
}

fn run_spectrum(args: &SpectrumArgs) -> Result<(), Failure> {
    let precision = Precision::from(args.precision);
    let size = args.basis_size.unwrap_or(precision.default_size());
    let params = ReducedParams::new(args.gamma, args.a, args.b);
    let basis = BasisSpec::new(params.gamma, size).with_scale(args.scale);
    let r = spectrum(&params, args.count, &basis, precision)?;
    let eigenvalues: Vec<Value> = match precision {
        Precision::Extended => r.eigenvalues_extended.iter().map(|w| json!(to_decimal(*w, EXTENDED_DIGITS))).collect(),
        Precision::Double => r.eigenvalues.iter().map(|w| json!(w)).collect(),
    };
    print_json(&json!({
        "params": { "gamma": params.gamma, "a": params.a, "b": params.b },
        "basis": { "size": size, "scale": args.scale },
        "precision": precision,
        "eigenvalues": eigenvalues,
        "converged_digits": r.converged_digits,
        "method": "rayleigh-ritz",
    }));
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let precision = Precision::from(args.precision);
    let spec = SweepSpec {
        gamma: args.gamma,
        b: args.b,
        a_min: args.a_min,
        a_max: args.a_max,
        steps: args.steps,
        nu_max: args.nu_max,
        n_max: args.n_max,
        basis_size: args.basis_size.unwrap_or(precision.default_size()),
        precision,
    };
    let table = sweep(&spec)?;
    let write = |path: &PathBuf, text: String| {
        std::fs::write(path, text)
            .map_err(|e| Failure { code: EXIT_USAGE, message: format!("cannot write {}: {e}", path.display()) })
    };
    write(&args.curves, table.curves_csv())?;
    write(&args.overlay, table.overlay_csv())?;
    if table.failures > 0 {
        eprintln!("warning: solver failed at {} of the a values (empty w fields)", table.failures);
    }
    eprintln!(
        "wrote {} curve rows to {} and {} truncation points to {}",
        table.rows.len(),
        args.curves.display(),
        table.overlay.len(),
        args.overlay.display()
    );
    Ok(())
}

fn reduced_json(r: &ReducedParams) -> Value {
    json!({ "gamma": r.gamma, "a": r.a, "b": r.b })
}

fn run_map(args: &MapArgs) -> Result<(), Failure> {
    let p = args.model.physical(args.omega)?;
    let r = reduce(&p)?;
    print_json(&json!({
        "physical": p,
        "kappa": p.kappa(),
        "a2": p.a2(),
        "reduced": reduced_json(&r),
    }));
    Ok(())
}

fn run_allowed_omega(args: &AllowedOmegaArgs) -> Result<(), Failure> {
    if args.n == 0 {
        return Err(usage("--n must be a positive integer: truncation orders are n = 1, 2, ..."));
    }
    // the frequency field is replaced point by point during the scan
    let p = args.model.physical(1.0)?;
    let roots = allowed_omega_scan(&p, args.n, args.range, args.per_decade)?;
    let mut out = Vec::with_capacity(roots.len());
    for &omega in &roots {
        let residual = truncation_residual_at(&p, args.n, omega)?;
        let beside = 1.05 * omega;
        let r = reduce(&p.with_omega(beside))?;
        let precision = Precision::Extended;
        let basis = BasisSpec::new(r.gamma, precision.default_size());
        let s = spectrum(&r, args.count, &basis, precision)?;
        out.push(json!({
            "omega": omega,
            "residual": residual,
            "reduced": reduced_json(&reduce(&p.with_omega(omega))?),
            "companion": {
                "omega": beside,
                "reduced": reduced_json(&r),
                "eigenvalues": s.eigenvalues,
            },
        }));
    }
    print_json(&json!({
        "n": args.n,
        "range": [args.range.0, args.range.1],
        "roots": out,
    }));
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let level = match args.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let report = verify::run(level);
    print!("{}", report.table());
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failed().map(|c| c.name.as_str()).collect();
        Err(Failure { code: EXIT_VERIFY, message: format!("failed checks: {}", names.join("; ")) })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Truncate(a) => truncate(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Map(a) => run_map(a),
        Command::AllowedOmega(a) => run_allowed_omega(a),
        Command::Verify(a) => run_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
