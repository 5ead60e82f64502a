use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fock_core::binomial::{s0, t0, t0_star};
use fock_core::spaces::{classify, GrowthOrder, SpaceFamily, SpaceSpec, DEFAULT_R_GRID};
use fock_core::symbolcalc::{
    antiwick_to_wick, apply_operator, compose_kernels, kernel_to_wick, operator_matrix, psd_check, twisted_product,
    wick_to_antiwick, wick_to_kernel,
};
use fock_core::{Complex64, KernelCoeffs};
use fockcalc::report::{diagnostic_csv, diagnostic_json, matrix_json};
use fockcalc::suites::{self, Suite};
use fockcalc::{quad_nodes_from_env, CliError, CliResult, CoeffFile, ErrorKind};

#[derive(Parser)]
#[command(name = "fockcalc", version, about = "Wick, anti-Wick and kernel calculus on Fock-space coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a coefficient transformation to a kernel or symbol file.
    Transform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        op: TransformOp,
        /// Complex parameter as `re,im` (or just `re`).
        #[arg(long, default_value = "1", allow_hyphen_values = true, value_parser = parse_complex)]
        t: Complex64,
        /// Truncation degree of the output; defaults to the input's max_degree.
        #[arg(long)]
        out_degree: Option<u32>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Apply the operator with the given kernel to a series.
    Apply {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compose two operators, given as Wick symbols or as kernels.
    Compose {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, value_enum, default_value = "wick")]
        form: ComposeForm,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Dense operator matrix of a kernel, optionally with a positivity check.
    Matrix {
        #[arg(long)]
        input: PathBuf,
        /// How to read the input coefficients.
        #[arg(long, value_enum, default_value = "kernel")]
        symbol: SymbolKind,
        #[arg(long)]
        degree: u32,
        /// Print the Hermitian/PSD verdict instead of the matrix.
        #[arg(long)]
        psd: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a deterministic verification suite.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Diagnose membership of a kernel in a power-series space.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_family)]
        family: SpaceFamily,
        #[arg(long, value_parser = parse_order)]
        s1: GrowthOrder,
        /// Defaults to `--s1`.
        #[arg(long, value_parser = parse_order)]
        s2: Option<GrowthOrder>,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',')]
        r_grid: Option<Vec<f64>>,
        /// Also write the constants as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformOp {
    WickToKernel,
    KernelToWick,
    AntiwickToWick,
    WickToAntiwick,
    T0,
    T0star,
    S0,
}

#[derive(Clone, Copy, ValueEnum)]
enum ComposeForm {
    /// Twisted product of Wick symbols.
    Wick,
    /// Composition of kernels, truncated at the larger input degree.
    Kernel,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymbolKind {
    Kernel,
    Wick,
    Antiwick,
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    let v = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(String::from("expected re,im")),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(String::from("complex parameter must be finite"))
    }
}

fn parse_suite(text: &str) -> Result<Suite, String> {
    text.parse().map_err(|e: CliError| e.message)
}

fn parse_family(text: &str) -> Result<SpaceFamily, String> {
    text.parse().map_err(|e: fock_core::Error| e.to_string())
}

fn parse_order(text: &str) -> Result<GrowthOrder, String> {
    text.parse().map_err(|e: fock_core::Error| e.to_string())
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::schema(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn load_kernel(path: &Path) -> CliResult<(u32, KernelCoeffs)> {
    CoeffFile::load(path)?.into_kernel()
}

fn transform(input: &Path, op: TransformOp, t: Complex64, out_degree: Option<u32>) -> CliResult<CoeffFile> {
    let (n, k) = load_kernel(input)?;
    let out = out_degree.unwrap_or(n);
    let (degree, result) = match op {
        TransformOp::WickToKernel => (out, wick_to_kernel(&k, out)?),
        TransformOp::KernelToWick => (out, kernel_to_wick(&k, out)?),
        TransformOp::AntiwickToWick => (n, antiwick_to_wick(&k)?),
        TransformOp::WickToAntiwick => (n, wick_to_antiwick(&k)?),
        TransformOp::T0 => (out, t0(&k, t, out)?),
        TransformOp::T0star => (n, t0_star(&k, t)?),
        TransformOp::S0 => {
            k.square_dim()?;
            (n, s0(&k))
        }
    };
    Ok(CoeffFile::kernel(degree, result))
}

fn compose(left: &Path, right: &Path, form: ComposeForm) -> CliResult<CoeffFile> {
    let (n1, a1) = load_kernel(left)?;
    let (n2, a2) = load_kernel(right)?;
    match form {
        ComposeForm::Wick => Ok(CoeffFile::kernel(n1 + n2, twisted_product(&a1, &a2)?)),
        ComposeForm::Kernel => {
            let n = n1.max(n2);
            Ok(CoeffFile::kernel(n, compose_kernels(&a1, &a2)?.truncated(n)))
        }
    }
}

#[derive(serde::Serialize)]
struct PsdJson {
    hermitian: bool,
    psd: bool,
    min_eigenvalue: Option<f64>,
}

fn matrix(input: &Path, symbol: SymbolKind, degree: u32, psd: bool, tol: f64) -> CliResult<String> {
    let (_, k) = load_kernel(input)?;
    let kernel = match symbol {
        SymbolKind::Kernel => k,
        SymbolKind::Wick => wick_to_kernel(&k, degree)?,
        SymbolKind::Antiwick => wick_to_kernel(&antiwick_to_wick(&k)?, degree)?,
    };
    let m = operator_matrix(&kernel, degree)?;
    if !psd {
        return Ok(matrix_json(&m));
    }
    let v = psd_check(&m, tol)?;
    let json = PsdJson { hermitian: v.hermitian, psd: v.psd, min_eigenvalue: v.min_eigenvalue };
    let mut text = serde_json::to_string_pretty(&json).expect("verdict serializes");
    text.push('\n');
    Ok(text)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Transform { input, op, t, out_degree, output } => {
            emit(output.as_deref(), &transform(&input, op, t, out_degree)?.to_json())
        }
        Command::Apply { kernel, series, output } => {
            let (nk, k) = load_kernel(&kernel)?;
            let (nf, f) = CoeffFile::load(&series)?.into_series()?;
            let result = apply_operator(&k, &f)?;
            let degree = result.max_degree().unwrap_or(0).max(nk.min(nf));
            emit(output.as_deref(), &CoeffFile::series(degree, result).to_json())
        }
        Command::Compose { left, right, form, output } => emit(output.as_deref(), &compose(&left, &right, form)?.to_json()),
        Command::Matrix { input, symbol, degree, psd, tol, output } => {
            emit(output.as_deref(), &matrix(&input, symbol, degree, psd, tol)?)
        }
        Command::Verify { suite, seed, report } => {
            let r = suites::run(suite, seed, quad_nodes_from_env()?)?;
            let text = r.to_json();
            if let Some(path) = report {
                emit(Some(&path), &text)?;
            }
            emit(None, &text)?;
            if r.pass {
                Ok(())
            } else {
                let case = r.failure.map(|f| f.case).unwrap_or_default();
                Err(CliError::new(ErrorKind::Verification, format!("suite {suite} failed: {case}")))
            }
        }
        Command::Classify { input, family, s1, s2, r_grid, csv } => {
            let (_, k) = load_kernel(&input)?;
            let spec = SpaceSpec::new(family, s1, s2.unwrap_or(s1))?;
            let grid = r_grid.unwrap_or_else(|| DEFAULT_R_GRID.to_vec());
            let report = classify(&k, &spec, &grid)?;
            if let Some(path) = csv {
                emit(Some(&path), &diagnostic_csv(&report))?;
            }
            emit(None, &diagnostic_json(&report))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::schema(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
