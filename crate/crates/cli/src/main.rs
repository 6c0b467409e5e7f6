use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use nonosc_core::exppoly::{
    count_zeros_rect, ky_bound, sector_zero_bound, strip_bound_simple, QuasiPolynomial, Rect,
    SectorParams, Term,
};
use nonosc_core::fuchs::Verdict;
use nonosc_core::majorant::{excluded_boxes_multiple, excluded_boxes_perturbed, excluded_boxes_simple};
use nonosc_core::ode::{parse_ode, parse_polynomial, Point};
use nonosc_core::verify::{run_verification, Battery, RandomSpec};
use nonosc_core::{analyze, Complex, Error, Polynomial, Tolerances};

#[derive(Parser)]
#[command(name = "nonosc", version, about = "Global non-oscillation analysis of linear ODEs with polynomial coefficients")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide global non-oscillation of an equation (inline text or a file).
    Analyze(AnalyzeArgs),
    /// Evaluate one of the zero bounds or box covers.
    Bound {
        #[command(subcommand)]
        target: BoundCmd,
    },
    /// Count zeros of a quasi-polynomial in a box with the argument principle.
    Count(CountArgs),
    /// Run the seeded verification batteries.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Equation such as "z^2*y'' + z*y' - y = 0", or a path to a file containing one.
    input: String,
    #[arg(long)]
    json: bool,
    #[arg(long = "tol-real-tie")]
    tol_real_tie: Option<f64>,
    #[arg(long = "tol-root")]
    tol_root: Option<f64>,
}

/// Quasi-polynomial `Σ A_j(z) e^{λ_j z}` given term by term.
#[derive(Args)]
struct QpArgs {
    /// Exponent λ_j, e.g. "1", "-1+2i" or "0.5,2" (repeat per term).
    #[arg(long = "lambda", required = true, allow_hyphen_values = true)]
    lambdas: Vec<String>,
    /// Amplitude A_j as a polynomial in z (repeat per term; default 1 for every term).
    #[arg(long = "poly", allow_hyphen_values = true)]
    polys: Vec<String>,
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Zero bound in the horizontal strip |Im z| <= alpha.
    Strip {
        #[command(flatten)]
        qp: QpArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        json: bool,
    },
    /// Zero bound in a disk of the given diameter.
    Ky {
        #[command(flatten)]
        qp: QpArgs,
        #[arg(long, allow_hyphen_values = true)]
        diam: f64,
        #[arg(long)]
        json: bool,
    },
    /// Zero bound in a sector at a Fuchsian point of an equation.
    Sector {
        #[arg(long)]
        equation: String,
        /// Point as a complex number, or "inf".
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        beta: f64,
        /// Override for the sampled perturbation constant.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Boxes outside of which one term dominates.
    Cover {
        #[command(flatten)]
        qp: QpArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = CoverChoice::Simple)]
        kind: CoverChoice,
        /// Right edge of the semi-strip (perturbed covers).
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        /// Size of the perturbation (perturbed covers).
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverChoice {
    Simple,
    Multiple,
    Perturbed,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    qp: QpArgs,
    /// Box u0 u1 v0 v1.
    #[arg(long = "box", num_args = 4, required = true, allow_hyphen_values = true, value_names = ["U0", "U1", "V0", "V1"])]
    rect: Vec<f64>,
    /// Also count over n vertical slices and check they add up.
    #[arg(long)]
    subdivide: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: usize,
    /// all|strip|cover|dominance|ky
    #[arg(long, default_value = "all")]
    which: String,
    #[arg(long = "k-max", default_value_t = 4)]
    k_max: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long = "min-gap", default_value_t = 0.3)]
    min_gap: f64,
    #[arg(long)]
    json: bool,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => 2,
            Error::NonConvergence { .. } => 3,
            Error::BoundaryZero { .. } | Error::NonIntegerWinding { .. } => 6,
            _ => 5,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Analyze(a) => cmd_analyze(a),
        Cmd::Bound { target } => cmd_bound(target),
        Cmd::Count(a) => cmd_count(a),
        Cmd::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(value: &impl Serialize, json: bool) {
    let v = serde_json::to_value(value).expect("reports serialize");
    if json {
        println!("{}", serde_json::to_string_pretty(&v).expect("reports serialize"));
    } else if let Value::Object(map) = v {
        for (k, v) in map {
            match v {
                Value::String(s) => println!("{k}: {s}"),
                other => println!("{k}: {other}"),
            }
        }
    } else {
        println!("{v}");
    }
}

fn cmd_analyze(a: AnalyzeArgs) -> CliResult {
    let text = if Path::new(&a.input).is_file() {
        std::fs::read_to_string(&a.input)
            .map_err(|e| Failure { code: 2, message: format!("cannot read {}: {e}", a.input) })?
    } else {
        a.input.clone()
    };
    let mut tol = Tolerances::default();
    if let Some(t) = a.tol_real_tie {
        tol.real_part_tie_tol = t;
    }
    if let Some(t) = a.tol_root {
        tol.root_tol = t;
    }
    let report = analyze(&text, &tol)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    } else {
        print!("{}", report.to_text());
    }
    Ok(if report.verdict == Verdict::Indeterminate { 4 } else { 0 })
}

fn parse_complex(s: &str) -> Result<Complex, Failure> {
    if let Some((re, im)) = s.split_once(',') {
        let num = |t: &str| {
            t.trim().parse::<f64>().map_err(|_| Failure {
                code: 2,
                message: format!("invalid complex number '{s}'"),
            })
        };
        return Ok(Complex::new(num(re)?, num(im)?));
    }
    let p = parse_polynomial(s)?;
    match p.degree() {
        None => Ok(Complex::new(0.0, 0.0)),
        Some(0) => Ok(p.coeffs()[0]),
        Some(_) => Err(Failure { code: 2, message: format!("'{s}' is not a constant") }),
    }
}

fn build_qp(args: &QpArgs) -> Result<QuasiPolynomial, Failure> {
    if !args.polys.is_empty() && args.polys.len() != args.lambdas.len() {
        return Err(Failure {
            code: 5,
            message: format!("{} exponents but {} amplitudes", args.lambdas.len(), args.polys.len()),
        });
    }
    let mut terms = Vec::with_capacity(args.lambdas.len());
    for (i, l) in args.lambdas.iter().enumerate() {
        let amplitude = match args.polys.get(i) {
            Some(p) => parse_polynomial(p)?,
            None => Polynomial::one(),
        };
        terms.push(Term { lambda: parse_complex(l)?, amplitude });
    }
    Ok(QuasiPolynomial::new(terms)?)
}

fn cmd_bound(target: BoundCmd) -> CliResult {
    let tol = Tolerances::default();
    match target {
        BoundCmd::Strip { qp, alpha, json } => {
            let qp = build_qp(&qp)?;
            let stats = qp.spectrum_stats(&tol)?;
            let bound = strip_bound_simple(&qp, alpha, &tol)?;
            emit(
                &json!({
                    "target": "strip", "k": qp.dimension(), "alpha": alpha,
                    "theta": stats.theta, "xi": stats.xi,
                    "path_length": stats.path_length, "path_exact": stats.path_exact,
                    "bound": bound,
                }),
                json,
            );
        }
        BoundCmd::Ky { qp, diam, json } => {
            let qp = build_qp(&qp)?;
            let bound = ky_bound(&qp, diam)?;
            let path = nonosc_core::shortest_path_length(&qp.lambdas());
            emit(
                &json!({
                    "target": "ky", "k": qp.dimension(), "diam": diam,
                    "path_length": path.length, "path_exact": path.exact, "bound": bound,
                }),
                json,
            );
        }
        BoundCmd::Sector { equation, point, alpha, beta, eps, json } => {
            let ode = parse_ode(&equation)?;
            let p = match point.trim() {
                "inf" | "infinity" | "∞" => Point::Infinity,
                other => Point::Finite(parse_complex(other)?),
            };
            let params = SectorParams { alpha, beta, eps_bound: eps };
            let b = sector_zero_bound(&ode, p, &params, &tol)?;
            let mut v = serde_json::to_value(&b).expect("reports serialize");
            v["target"] = json!("sector");
            emit(&v, json);
        }
        BoundCmd::Cover { qp, alpha, kind, beta, c, json } => {
            let qp = build_qp(&qp)?;
            let stats = qp.spectrum_stats(&tol)?;
            let cover = match kind {
                CoverChoice::Simple => excluded_boxes_simple(&qp, alpha, &tol)?,
                CoverChoice::Multiple => excluded_boxes_multiple(&qp, alpha, &tol)?,
                CoverChoice::Perturbed => {
                    let beta = beta.ok_or(Failure {
                        code: 5,
                        message: "perturbed cover needs --beta".into(),
                    })?;
                    excluded_boxes_perturbed(&qp, alpha, beta, c, &tol)?
                }
            };
            let mut v = serde_json::to_value(&cover).expect("reports serialize");
            v["target"] = json!("cover");
            v["theta"] = json!(stats.theta);
            v["xi"] = json!(stats.xi);
            emit(&v, json);
        }
    }
    Ok(0)
}

fn cmd_count(a: CountArgs) -> CliResult {
    let tol = Tolerances::default();
    let qp = build_qp(&a.qp)?;
    let rect = Rect::new(a.rect[0], a.rect[1], a.rect[2], a.rect[3])?;
    let total = count_zeros_rect(&qp, &rect, &tol)?;
    let mut pieces = Vec::new();
    if let Some(n) = a.subdivide.filter(|&n| n > 1) {
        let w = rect.width() / n as f64;
        for i in 0..n {
            let lo = rect.u_lo + w * i as f64;
            let hi = if i + 1 == n { rect.u_hi } else { lo + w };
            pieces.push(count_zeros_rect(&qp, &Rect::new(lo, hi, rect.v_lo, rect.v_hi)?, &tol)?.count);
        }
    }
    let sum: usize = pieces.iter().sum();
    let consistent = pieces.is_empty() || sum == total.count;
    if a.json {
        emit(&json!({ "count": total.count, "nudges": total.nudges, "pieces": pieces, "consistent": consistent }), true);
    } else {
        println!("{}", total.count);
        if !pieces.is_empty() {
            eprintln!("pieces: {pieces:?} (sum {sum})");
        }
    }
    if consistent {
        Ok(0)
    } else {
        eprintln!("subdivision counts sum to {sum}, whole box gives {}", total.count);
        Ok(1)
    }
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let batteries = Battery::parse_list(&a.which)?;
    let spec = RandomSpec {
        seed: a.seed,
        k_max: a.k_max,
        alpha: a.alpha,
        min_gap: a.min_gap,
        count: a.cases,
        ..RandomSpec::default()
    };
    let result = run_verification(&spec, &batteries, &Tolerances::default())?;
    if a.json {
        emit(&result, true);
    } else {
        for b in &batteries {
            let cases: Vec<_> = result.cases.iter().filter(|c| c.battery == *b).collect();
            let passed = cases.iter().filter(|c| c.passed).count();
            println!("{b:?}: {passed}/{} passed", cases.len());
        }
        println!("pass rate: {:.4}", result.pass_rate);
    }
    for c in result.cases.iter().filter(|c| !c.passed) {
        eprintln!("FAILED seed={} battery={:?} case={}: {}", a.seed, c.battery, c.index, c.detail);
    }
    Ok(if result.all_passed { 0 } else { 1 })
}
