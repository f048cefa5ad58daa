//! Command-line front end: decompositions and membership tests on user
//! matrices, crown-cell figure data, the classification atlas, and the
//! seeded self-test suites.
//!
//! Exit codes: 0 success, 1 self-test failure, 2 parse/usage error,
//! 3 invalid element, 4 domain-contract violation.

mod docio;
mod emit;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crown_core::crown::{
    embed_tube, extract_tube, in_tube_e, orbit_escape_check, SymPoint, TubeCoordinates,
};
use crown_core::decomp::{
    classify_element, conjugate_into_na, iwasawa_nak, jordan_multiplicative, stein_report,
    Tolerances,
};
use crown_core::rootsys::{crown_cell, restricted_roots_sl};
use crown_core::selftest::{self, Scope};
use crown_core::{atlas, Error};

use docio::{MatrixDocument, TubeDocument};
use emit::ff;

#[derive(Parser)]
#[command(
    name = "crown",
    version,
    about = "Crown-domain computations for SL(n,R): decompositions, cell geometry, tube membership, classification tables"
)]
struct Cli {
    /// Structural zero/one pattern tolerance (default 1e-12).
    #[arg(long, global = true)]
    tol_structural: Option<f64>,
    /// Reconstruction residual tolerance (default 1e-10).
    #[arg(long, global = true)]
    tol_residual: Option<f64>,
    /// Eigenvalue clustering and classification tolerance (default 1e-8).
    #[arg(long, global = true)]
    tol_spectral: Option<f64>,
    /// Seed for the randomized self-test suites.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// NAK decomposition of a real unimodular matrix document.
    Iwasawa { matrix: PathBuf },
    /// Multiplicative Jordan decomposition g = g_u g_h g_e.
    Jordan { matrix: PathBuf },
    /// Conjugacy classification: unipotent | hyperbolic | elliptic | mixed.
    Classify { matrix: PathBuf },
    /// Orthogonal conjugation into the NA chart (requires positive real
    /// spectrum).
    ConjNa { matrix: PathBuf },
    /// Lie-closure dimensions, lower central series, and the Stein-quotient
    /// verdict for NA generators.
    Nilpotent {
        #[arg(required = true)]
        generators: Vec<PathBuf>,
    },
    /// Emit crown-cell data: exact inequalities, exact vertices, CSV polygon
    /// samples, or an SVG figure.
    Cell {
        #[arg(long)]
        group: Group,
        #[arg(long)]
        emit: EmitKind,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tube-domain operations on SL(3,R).
    Tube {
        #[command(subcommand)]
        sub: TubeCmd,
    },
    /// Orbit-escape evidence for a cyclic NA action on tube coordinates.
    OrbitCheck {
        #[arg(long)]
        gamma: PathBuf,
        /// Start coordinates (default: the base point).
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 20)]
        kmax: usize,
    },
    /// Query the crown-domain classification tables.
    Atlas {
        #[command(subcommand)]
        sub: AtlasCmd,
    },
    /// Run the seeded invariant suites (scope: rootsys|decomp|crown|atlas|all).
    Selftest {
        #[arg(default_value = "all")]
        scope: String,
    },
}

#[derive(Subcommand)]
enum TubeCmd {
    /// Embed tube coordinates into a symmetric unimodular matrix.
    Embed { coords: PathBuf },
    /// Recover tube coordinates from a symmetric matrix document.
    Extract { matrix: PathBuf },
    /// Evaluate the tube membership inequalities.
    Member { matrix: PathBuf },
}

#[derive(Subcommand)]
enum AtlasCmd {
    /// Look up a concrete space, e.g. "SL(3,R)/SO(3)".
    Lookup { descriptor: String },
    /// List every encoded table row.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Sl2,
    Sl3,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitKind {
    Ineq,
    Vertices,
    Csv,
    Svg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = Tolerances {
        structural: cli.tol_structural.unwrap_or(1e-12),
        residual: cli.tol_residual.unwrap_or(1e-10),
        spectral: cli.tol_spectral.unwrap_or(1e-8),
    };
    match run(&cli, &tol) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn parse_failure(message: String) -> Failure {
    Failure { code: 2, message }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionError(_) | Error::InvalidRank(_) => 2,
            Error::InvalidElement(_)
            | Error::IllConditioned(_)
            | Error::InvalidCoordinates(_)
            | Error::InternalError(_) => 3,
            Error::EllipticObstruction(_)
            | Error::NotAnAlgebra(_)
            | Error::NotInNA(_)
            | Error::NotInTube(_)
            | Error::DegeneratePivot(_)
            | Error::NotOnSlice(_)
            | Error::DegenerateAction(_)
            | Error::UnknownSpace(_)
            | Error::OutOfRange(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn run(cli: &Cli, tol: &Tolerances) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Iwasawa { matrix } => cmd_iwasawa(matrix, tol),
        Command::Jordan { matrix } => cmd_jordan(matrix, tol),
        Command::Classify { matrix } => cmd_classify(matrix, tol),
        Command::ConjNa { matrix } => cmd_conj_na(matrix, tol),
        Command::Nilpotent { generators } => cmd_nilpotent(generators, tol),
        Command::Cell { group, emit, out } => cmd_cell(*group, *emit, out.as_deref()),
        Command::Tube { sub } => cmd_tube(sub, tol),
        Command::OrbitCheck {
            gamma,
            start,
            radius,
            kmax,
        } => cmd_orbit_check(gamma, start.as_deref(), *radius, *kmax, tol),
        Command::Atlas { sub } => cmd_atlas(sub),
        Command::Selftest { scope } => cmd_selftest(scope, cli.seed, tol),
    }
}

fn read_to_string(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| parse_failure(format!("cannot read {}: {e}", path.display())))
}

fn load_real_matrix(path: &Path) -> Result<DMatrix<f64>, Failure> {
    let doc = MatrixDocument::parse(&read_to_string(path)?).map_err(parse_failure)?;
    doc.to_real().map_err(parse_failure)
}

fn load_sym_point(path: &Path) -> Result<SymPoint, Failure> {
    let doc = MatrixDocument::parse(&read_to_string(path)?).map_err(parse_failure)?;
    if doc.n != 3 {
        return Err(parse_failure(format!(
            "tube commands take 3x3 matrices, got n = {}",
            doc.n
        )));
    }
    let m = doc.to_complex();
    let fixed = nalgebra::Matrix3::from_fn(|i, j| m[(i, j)]);
    Ok(SymPoint::from_matrix(&fixed)?)
}

fn load_tube_coords(path: &Path) -> Result<TubeCoordinates, Failure> {
    let doc = TubeDocument::parse(&read_to_string(path)?).map_err(parse_failure)?;
    Ok(TubeCoordinates::new(
        doc.alpha.to_complex(),
        doc.beta.to_complex(),
        doc.gamma.to_complex(),
        [
            doc.zeta[0].to_complex(),
            doc.zeta[1].to_complex(),
            doc.zeta[2].to_complex(),
        ],
    )?)
}

fn fmt_real_matrix(m: &DMatrix<f64>) -> String {
    (0..m.nrows())
        .map(|i| {
            let row: Vec<String> = (0..m.ncols()).map(|j| ff(m[(i, j)])).collect();
            format!("  [{}]", row.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Serialize)]
struct MatrixOut {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

fn complex_matrix_json(m: &nalgebra::Matrix3<Complex64>) -> String {
    let entries: Vec<Vec<[f64; 2]>> = (0..3)
        .map(|i| (0..3).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    serde_json::to_string(&MatrixOut { n: 3, entries }).expect("serialize matrix")
}

#[derive(Serialize)]
struct TubeOut {
    alpha: [f64; 2],
    beta: [f64; 2],
    gamma: [f64; 2],
    zeta: [[f64; 2]; 3],
}

fn tube_coords_json(tc: &TubeCoordinates) -> String {
    let pair = |z: Complex64| [z.re, z.im];
    serde_json::to_string(&TubeOut {
        alpha: pair(tc.alpha),
        beta: pair(tc.beta),
        gamma: pair(tc.gamma),
        zeta: [pair(tc.zeta[0]), pair(tc.zeta[1]), pair(tc.zeta[2])],
    })
    .expect("serialize coordinates")
}

fn cmd_iwasawa(path: &Path, tol: &Tolerances) -> Result<ExitCode, Failure> {
    let g = load_real_matrix(path)?;
    let f = iwasawa_nak(&g, tol)?;
    let residual = (f.product() - &g).norm();
    println!("n:\n{}", fmt_real_matrix(&f.n_part));
    println!("a:\n{}", fmt_real_matrix(&f.a_part));
    println!("k:\n{}", fmt_real_matrix(&f.k_part));
    println!("residual: {}", ff(residual));
    Ok(ExitCode::SUCCESS)
}

fn cmd_jordan(path: &Path, tol: &Tolerances) -> Result<ExitCode, Failure> {
    let g = load_real_matrix(path)?;
    let f = jordan_multiplicative(&g, tol)?;
    let residual = (f.product() - &g).norm();
    let max_comm = [
        (&f.unipotent, &f.hyperbolic),
        (&f.unipotent, &f.elliptic),
        (&f.hyperbolic, &f.elliptic),
    ]
    .iter()
    .map(|(a, b)| (*a * *b - *b * *a).norm())
    .fold(0.0f64, f64::max);
    println!("unipotent:\n{}", fmt_real_matrix(&f.unipotent));
    println!("hyperbolic:\n{}", fmt_real_matrix(&f.hyperbolic));
    println!("elliptic:\n{}", fmt_real_matrix(&f.elliptic));
    println!("residual: {}", ff(residual));
    println!("max pairwise commutator: {}", ff(max_comm));
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(path: &Path, tol: &Tolerances) -> Result<ExitCode, Failure> {
    let g = load_real_matrix(path)?;
    let class = classify_element(&g, tol)?;
    println!("{class}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_conj_na(path: &Path, tol: &Tolerances) -> Result<ExitCode, Failure> {
    let g = load_real_matrix(path)?;
    let (h, t) = conjugate_into_na(&g, tol)?;
    let residual = (&h * &g - &t * &h).norm();
    println!("h (orthogonal):\n{}", fmt_real_matrix(&h));
    println!("t (in NA):\n{}", fmt_real_matrix(&t));
    println!("residual |h g - t h|: {}", ff(residual));
    Ok(ExitCode::SUCCESS)
}

fn cmd_nilpotent(paths: &[PathBuf], tol: &Tolerances) -> Result<ExitCode, Failure> {
    let gens: Vec<DMatrix<f64>> = paths
        .iter()
        .map(|p| load_real_matrix(p))
        .collect::<Result<_, _>>()?;
    let report = stein_report(&gens, tol)?;
    println!("closure dimension: {}", report.closure_dim);
    let dims: Vec<String> = report.series_dims.iter().map(|d| d.to_string()).collect();
    println!("lower central series dims: [{}]", dims.join(", "));
    if report.nilpotent {
        println!("verdict: nilpotent; quotient Stein by criterion");
    } else {
        println!("verdict: not nilpotent; quotient not Stein by criterion");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cell(group: Group, emit: EmitKind, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let n = match group {
        Group::Sl2 => 2,
        Group::Sl3 => 3,
    };
    let rs = restricted_roots_sl(n)?;
    let cell = crown_cell(&rs);
    let payload = match emit {
        EmitKind::Ineq => emit::emit_inequalities(&cell),
        EmitKind::Vertices => emit::emit_vertices(&cell),
        EmitKind::Csv => emit::emit_csv(&cell),
        EmitKind::Svg => emit::emit_svg(&cell),
    };
    match out {
        Some(path) => {
            std::fs::write(path, payload)
                .map_err(|e| parse_failure(format!("cannot write {}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
        None => print!("{payload}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tube(sub: &TubeCmd, _tol: &Tolerances) -> Result<ExitCode, Failure> {
    match sub {
        TubeCmd::Embed { coords } => {
            let tc = load_tube_coords(coords)?;
            let s = embed_tube(&tc)?;
            println!("{}", complex_matrix_json(&s.to_matrix()));
            Ok(ExitCode::SUCCESS)
        }
        TubeCmd::Extract { matrix } => {
            let s = load_sym_point(matrix)?;
            let tc = extract_tube(&s)?;
            println!("{}", tube_coords_json(&tc));
            Ok(ExitCode::SUCCESS)
        }
        TubeCmd::Member { matrix } => {
            let s = load_sym_point(matrix)?;
            let report = in_tube_e(&s);
            println!("member: {}", report.member);
            let args: Vec<String> = report.argument_values.iter().map(|&a| ff(a)).collect();
            println!("arguments: [{}]", args.join(", "));
            let failed: Vec<String> = report
                .failed_conditions
                .iter()
                .map(|i| i.to_string())
                .collect();
            println!("failed condition groups: [{}]", failed.join(", "));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_orbit_check(
    gamma: &Path,
    start: Option<&Path>,
    radius: f64,
    kmax: usize,
    tol: &Tolerances,
) -> Result<ExitCode, Failure> {
    let g = load_real_matrix(gamma)?;
    let start = match start {
        Some(path) => load_tube_coords(path)?,
        None => TubeCoordinates::identity(),
    };
    let report = orbit_escape_check(&g, &start, radius, kmax, tol)?;
    println!("k distance");
    for step in &report.steps {
        println!("{} {}", step.k, ff(step.distance));
    }
    println!("radius: {}", ff(report.radius));
    match report.escape_k {
        Some(k) => println!("escaped: true at |k| >= {k}"),
        None => println!("escaped: false within kmax"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_atlas(sub: &AtlasCmd) -> Result<ExitCode, Failure> {
    match sub {
        AtlasCmd::Lookup { descriptor } => {
            let entry = atlas::lookup_str(descriptor)?;
            println!("{}", entry.to_line());
            Ok(ExitCode::SUCCESS)
        }
        AtlasCmd::List => {
            for entry in atlas::list_all() {
                println!("{}", entry.to_line());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_selftest(scope: &str, seed: u64, tol: &Tolerances) -> Result<ExitCode, Failure> {
    let scope: Scope = scope.parse().map_err(parse_failure)?;
    let checks = selftest::run(scope, seed, tol);
    println!("selftest seed={seed}");
    let mut passed = 0;
    for check in &checks {
        if check.passed {
            passed += 1;
            println!("PASS {} - {}", check.name, check.details);
        } else {
            println!("FAIL {} - {}", check.name, check.details);
        }
    }
    println!("result: {passed}/{} passed", checks.len());
    if passed == checks.len() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
