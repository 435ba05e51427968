//! `einstein4`: curvature algebra of oriented 4-manifolds from the command
//! line. Reports go to standard output as JSON (or CSV for `scan`),
//! diagnostics to standard error.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure or an
//! inconclusive certificate.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use einstein4::curvops::{
    char_densities_with, classify_equality_with, decompose_with, gl_defect_with, kahler_signature_check_with,
    CurvatureSign, Decomposition,
};
use einstein4::error::{Error, GeoError, GeomError, PageError};
use einstein4::geography::{self, GeoPoint};
use einstein4::io::{envelope, parse_operator_json, parse_params, parse_point, parse_reals, to_json_text};
use einstein4::models::{self, SecSign};
use einstein4::numgeom::{convergence_study, curvature_at};
use einstein4::page::{self, CohomOneMetric};
use einstein4::secsign::{certify_sec_sign_with, CertifyConfig, Verdict};
use einstein4::{CurvatureOperator, Tolerances};

#[derive(Parser, Debug)]
#[command(
    name = "einstein4",
    version,
    about = "Curvature algebra of oriented Riemannian 4-manifolds"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for randomized restarts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance for symmetry, Bianchi and trace checks.
    #[arg(long, global = true)]
    structural_tol: Option<f64>,
    /// Relative tolerance for saturation, multiplicity, Einstein and Kähler
    /// tests.
    #[arg(long, global = true)]
    classification_tol: Option<f64>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Emit JSON (the default; accepted for explicitness).
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Human,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scalar curvature, Weyl halves W+ and W-, traceless Ricci block, the
    /// Gursky–LeBrun defect |s|/√6 − (|W+| + |W-|) and, for Einstein input,
    /// the Chern–Gauss–Bonnet and signature densities.
    Decompose {
        /// Operator JSON: {"basis": "coordinate" | "sd-asd", "matrix": [6 rows]}.
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Certified bounds on the extremes of sectional curvature and its sign.
    /// Exits 2 when the certificate is inconclusive.
    Certify {
        #[arg(short, long)]
        input: PathBuf,
        /// Random restarts of the alternating optimizer.
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        /// Fibonacci-lattice starts.
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Relative tolerance for the verdict, scaled by max(1, ‖R‖).
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Use the optimizer even for Einstein input.
        #[arg(long)]
        force_alternating: bool,
    },
    /// A catalog model: flat, sphere4, hyperbolic4, surfaceProduct,
    /// fubiniStudy, bergman. The Einstein models with semi-definite sectional
    /// curvature are classified as S²×S², flat or H²×H² when they saturate
    /// the Gursky–LeBrun inequality.
    Model {
        name: String,
        /// Model parameter, e.g. --param a=-1 --param b=-1.
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
    },
    /// Finite-difference curvature of an analytic chart (flatChart,
    /// sphereProductChart, hyperbolic4HalfSpace) against its catalog model.
    Chart {
        name: String,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        /// Coordinates x1,x2,x3,x4 (defaults to the chart's sample point).
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Finite-difference step (defaults to the chart's suggested step).
        #[arg(long)]
        step: Option<f64>,
        /// Convergence study over --steps instead of a single evaluation.
        #[arg(long)]
        study: bool,
        /// Decreasing steps for --study.
        #[arg(long, default_value = "0.02,0.01,0.005")]
        steps: String,
    },
    /// The Page metric on CP² # -CP²: Einstein residual, a negatively curved
    /// plane, and χ, τ by quadrature of the Chern–Gauss–Bonnet and signature
    /// densities.
    Page(PageArgs),
    /// χ–τ inequalities for one point or a CSV of points: Gromov–Lück
    /// χ ≥ |τ|, strict χ > (15/8)|τ| for non-flat non-positively curved
    /// Einstein metrics, Bogomolov–Miyaoka–Yau χ ≥ 3τ, c₁² = 2χ + 3τ and the
    /// parity condition for complex structures on both orientations.
    Geo {
        #[arg(long, allow_hyphen_values = true, requires = "tau", conflicts_with = "csv")]
        chi: Option<i64>,
        #[arg(long, allow_hyphen_values = true, requires = "chi")]
        tau: Option<i64>,
        /// CSV file with columns chi,tau.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Solve χ = 2 + τ with χ = (15/8)τ (self-dual Einstein with b₁ = 0).
        #[arg(long, conflicts_with_all = ["chi", "csv"])]
        lattice: bool,
        /// With --lattice: whether b₁ = 0 is assumed.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        b1_zero: bool,
    },
    /// All (χ, τ) with 0 ≤ χ ≤ N and |τ| ≤ χ with their flags, as CSV.
    Scan {
        #[arg(long)]
        chi_max: i64,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false, id = "mode")]
struct PageMode {
    /// Einstein residual on Chebyshev radii.
    #[arg(long)]
    verify: bool,
    /// Minimum sectional curvature over the radii, with a witness plane.
    #[arg(long)]
    negcurv: bool,
    /// χ and τ by Gauss–Legendre quadrature.
    #[arg(long)]
    integrate: bool,
}

#[derive(Args, Debug)]
struct PageArgs {
    #[command(flatten)]
    mode: PageMode,
    /// Metric: page or roundS4.
    #[arg(long, default_value = "page")]
    metric: String,
    /// Number of radii for --verify and --negcurv.
    #[arg(long, default_value_t = 32)]
    radii: usize,
    /// Quadrature nodes (doubled once for the error estimate).
    #[arg(long, default_value_t = 32)]
    nodes: usize,
    /// Reverse the orientation (ψ → −ψ).
    #[arg(long)]
    flip: bool,
}

/// A report plus whether the run should exit with the numerical-failure code.
struct Outcome {
    command: &'static str,
    value: Value,
    failed: bool,
}

impl Outcome {
    fn ok<T: Serialize>(command: &'static str, v: &T) -> Result<Self, Error> {
        Ok(Outcome {
            command,
            value: to_value(v)?,
            failed: false,
        })
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Error> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn tolerances(g: &Global) -> Result<Tolerances, Error> {
    let mut t = Tolerances::default();
    for (v, slot, name) in [
        (g.structural_tol, &mut t.structural, "structural-tol"),
        (g.classification_tol, &mut t.classification, "classification-tol"),
    ] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parse(format!("--{name} must be positive, got {v}")));
            }
            *slot = v;
        }
    }
    Ok(t)
}

fn read_operator(path: &PathBuf, tol: &Tolerances) -> Result<CurvatureOperator, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let op = parse_operator_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })?;
    op.check_admissible(tol)?;
    Ok(op)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DecomposeReport {
    decomposition: Decomposition,
    gl_report: einstein4::GlReport,
    einstein: bool,
    densities: Option<einstein4::curvops::CharDensities>,
    kahler_signature: Option<einstein4::curvops::KahlerSignature>,
}

fn decompose_report(op: &CurvatureOperator, tol: &Tolerances) -> Result<DecomposeReport, Error> {
    let d = decompose_with(op, tol)?;
    let einstein = d.is_einstein(tol);
    Ok(DecomposeReport {
        decomposition: d,
        gl_report: gl_defect_with(&d, tol),
        einstein,
        densities: if einstein {
            Some(char_densities_with(&d, tol)?)
        } else {
            None
        },
        kahler_signature: kahler_signature_check_with(&d, tol).ok(),
    })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let tol = tolerances(&cli.global)?;
    match &cli.command {
        Command::Decompose { input } => {
            let op = read_operator(input, &tol)?;
            Outcome::ok("decompose", &decompose_report(&op, &tol)?)
        }
        Command::Certify {
            input,
            restarts,
            grid,
            tolerance,
            force_alternating,
        } => {
            if !(tolerance.is_finite() && *tolerance >= 0.0) {
                return Err(Error::Parse(format!(
                    "--tolerance must be non-negative, got {tolerance}"
                )));
            }
            if restarts + grid == 0 {
                return Err(Error::Parse("need at least one start (--restarts or --grid)".into()));
            }
            let op = read_operator(input, &tol)?;
            let config = CertifyConfig {
                restarts: *restarts,
                grid_size: *grid,
                seed: cli.global.seed,
                tolerance: *tolerance,
                force_alternating: *force_alternating,
            };
            let cert = certify_sec_sign_with(&op, &config, &tol)?;
            Ok(Outcome {
                command: "certify",
                value: json!({ "config": to_value(&config)?, "certificate": to_value(&cert)? }),
                failed: cert.verdict == Verdict::Inconclusive,
            })
        }
        Command::Model { name, params } => {
            let m = models::catalog(name, &parse_params(params)?)?;
            let report = decompose_report(&m.operator, &tol)?;
            let sign = match m.flags.sec_sign {
                SecSign::NonNegative => Some(CurvatureSign::NonNegative),
                SecSign::NonPositive | SecSign::Zero => Some(CurvatureSign::NonPositive),
                SecSign::Indefinite => None,
            };
            let classified = match (report.einstein, sign) {
                (true, Some(s)) => Some(classify_equality_with(&report.decomposition, s, &tol)?),
                _ => None,
            };
            Outcome::ok(
                "model",
                &json!({
                    "model": to_value(&m)?,
                    "decomposition": to_value(&report.decomposition)?,
                    "glReport": to_value(&report.gl_report)?,
                    "coverClass": to_value(&classified)?,
                    "densities": to_value(&report.densities)?,
                }),
            )
        }
        Command::Chart {
            name,
            params,
            point,
            step,
            study,
            steps,
        } => {
            let cm = models::chart_for(name, &parse_params(params)?)?;
            let p = match point {
                Some(s) => parse_point(s)?,
                None => cm.sample_point,
            };
            if *study {
                let steps = parse_reals(steps)?;
                let s = convergence_study(&cm.chart, &p, &steps)?;
                return Outcome::ok("chart", &json!({ "chart": name, "point": p, "study": to_value(&s)? }));
            }
            let c = curvature_at(&cm.chart, &p, *step)?;
            let err = (c.operator.coordinate_matrix() - cm.model.operator.coordinate_matrix()).amax();
            Outcome::ok(
                "chart",
                &json!({
                    "chart": name,
                    "point": p,
                    "curvature": to_value(&c)?,
                    "reference": to_value(&cm.model)?,
                    "maxErrorVsReference": err,
                }),
            )
        }
        Command::Page(args) => run_page(args),
        Command::Geo {
            chi,
            tau,
            csv,
            lattice,
            b1_zero,
        } => {
            if *lattice {
                return Outcome::ok("geo", &geography::self_dual_lattice_obstruction(*b1_zero));
            }
            match (chi, tau, csv) {
                (Some(c), Some(t), None) => Outcome::ok("geo", &geography::report(GeoPoint::new(*c, *t))),
                (None, None, Some(path)) => {
                    let file = fs::File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    let rows: Vec<_> = geography::read_points_csv(file)?
                        .into_iter()
                        .map(geography::report)
                        .collect();
                    Outcome::ok("geo", &rows)
                }
                _ => Err(GeoError::BadInput("give --chi and --tau, --csv FILE, or --lattice".into()).into()),
            }
        }
        Command::Scan { .. } => unreachable!("scan writes CSV directly"),
    }
}

fn run_page(args: &PageArgs) -> Result<Outcome, Error> {
    let mut m: CohomOneMetric = match args.metric.as_str() {
        "page" => page::page_metric(),
        "roundS4" => page::round_s4(),
        other => return Err(Error::Parse(format!("unknown metric '{other}' (page, roundS4)"))),
    };
    if args.flip {
        m = m.orientation_flipped();
    }
    let meta = json!({
        "metric": m.name,
        "length": m.length,
        "claimedLambda": m.lambda,
        "parameters": to_value(&m.page)?,
        "orientation": m.orientation,
        "endpoints": to_value(&m.endpoint_data())?,
    });
    if args.mode.integrate {
        let c = page::integrate_char_numbers(&m, args.nodes)?;
        return Outcome::ok("page", &json!({ "metric": meta, "integrate": to_value(&c)? }));
    }
    if args.radii == 0 {
        return Err(Error::Parse("--radii must be positive".into()));
    }
    let radii = page::chebyshev_radii(&m, args.radii);
    if args.mode.verify {
        let c = page::verify_einstein(&m, &radii)?;
        let failed = c.max_residual > 1e-6 || c.lambda_spread > 1e-5;
        Ok(Outcome {
            command: "page",
            value: json!({ "metric": meta, "verify": to_value(&c)? }),
            failed,
        })
    } else {
        let n = page::certify_negative_curvature(&m, &radii).map_err(Error::from)?;
        Ok(Outcome {
            command: "page",
            value: json!({ "metric": meta, "negcurv": to_value(&n)? }),
            failed: args.metric == "page" && n.min_sec >= 0.0,
        })
    }
}

fn exit_code(e: &Error) -> u8 {
    let numerical = e.is_numerical()
        || matches!(
            e,
            Error::Page(PageError::Geom(GeomError::Curv(_))) | Error::Geom(GeomError::Curv(_))
        );
    if numerical {
        2
    } else {
        1
    }
}

/// `key: value` lines, one per leaf.
fn human(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                human(x, &p, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in xs.iter().enumerate() {
                human(x, &format!("{prefix}[{i}]"), out);
            }
        }
        leaf => out.push_str(&format!("{prefix}: {leaf}\n")),
    }
}

fn emit(text: &str) -> ExitCode {
    let mut stdout = io::stdout().lock();
    if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Command::Scan { chi_max } = cli.command {
        let rows = match geography::scan(chi_max) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        };
        if cli.global.format == Format::Json && cli.global.json {
            return match envelope("scan", &rows) {
                Ok(v) => emit(&to_json_text(&v)),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            };
        }
        let mut buf = Vec::new();
        if let Err(e) = geography::write_scan_csv(&rows, &mut buf) {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        return emit(&String::from_utf8_lossy(&buf));
    }

    match run(&cli) {
        Ok(outcome) => {
            let v = match envelope(outcome.command, &outcome.value) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let text = match cli.global.format {
                Format::Human => {
                    let mut s = String::new();
                    human(&v["result"], "", &mut s);
                    s
                }
                Format::Json | Format::Csv => to_json_text(&v),
            };
            let code = emit(&text);
            if outcome.failed {
                eprintln!("error: numerical check failed or certificate inconclusive");
                return ExitCode::from(2);
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
