//! `timeband` — diagnostics for time-and-band limiting with 2x2
//! matrix-valued Jacobi-type weights.
//!
//! Subcommands:
//! - `verify`: run the named residual-check battery for one instance.
//! - `spectrum`: per-sector eigenvalue report (concentrations vs the
//!   commuting matrix's spread spectrum).
//! - `eigenfunctions`: sample the most concentrated eigenfunctions on a grid.
//! - `kernel`: tabulate the reproducing kernel on a product grid.
//!
//! Exit codes: `0` success / all checks passed; `1` a verification or
//! `--check` contract failed; `2` invalid parameters or usage; `3` a
//! numerical computation failed. Outputs are deterministic: the same
//! invocation always produces byte-identical bytes.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

use timeband::{
    eigenfunction_integral_residuals, eigenfunction_sample, kernel, prolate_eigenpairs,
    spectrum_report, verify_exit_code, verify_instance, Error, ModelParams, SpectrumReport,
    VerifyReport, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(
    name = "timeband",
    version,
    about = "Time-and-band limiting diagnostics for 2x2 matrix Jacobi-type weights",
    long_about = "Builds the band-restriction Gram matrix of a 2x2 matrix-valued \
Jacobi-type orthonormal family, together with the symmetric block-tridiagonal \
matrix that commutes with it, and exposes verification, spectra, eigenfunction \
sampling, and kernel tabulation on top of that pair."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full residual-check battery for one parameter instance.
    Verify(VerifyArgs),
    /// Report per-sector spectra of the Gram and commuting matrices.
    Spectrum(SpectrumArgs),
    /// Sample the most concentrated eigenfunctions on a uniform grid.
    Eigenfunctions(EigenfunctionsArgs),
    /// Tabulate the degree-(<= N) reproducing kernel on a product grid.
    Kernel(KernelArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// First weight exponent (must exceed -1).
    #[arg(long, allow_hyphen_values = true, value_name = "ALPHA")]
    alpha: f64,
    /// Second weight exponent (must exceed -1).
    #[arg(long, allow_hyphen_values = true, value_name = "BETA")]
    beta: f64,
    /// Truncation degree N; expansions keep degrees 0 through N.
    #[arg(long = "order-n", value_name = "N")]
    order_n: usize,
    /// Band edge omega; integration runs over (-1, omega), omega in (-1, 1].
    #[arg(long, allow_hyphen_values = true, value_name = "OMEGA")]
    omega: f64,
    /// Quadrature order per rule [default: max(64, 2N + 16)].
    #[arg(long = "quad-order", value_name = "M")]
    quad_order: Option<usize>,
    /// Quadrature convergence tolerance [default: 1e-10].
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

impl CommonArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        let mut p = ModelParams::new(self.alpha, self.beta, self.order_n, self.omega)?;
        if let Some(q) = self.quad_order {
            p = p.with_quad_order(q)?;
        }
        if let Some(t) = self.tol {
            p = p.with_tol(t)?;
        }
        Ok(p)
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Seed for the pseudo-random part of the sample grid.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EigenfunctionsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of grid points across the band interval.
    #[arg(long = "grid-points", default_value_t = 201, value_name = "G")]
    grid_points: usize,
    /// How many of the top-concentration eigenfunctions to sample.
    #[arg(long = "top-k", default_value_t = 4, value_name = "K")]
    top_k: usize,
    /// Also evaluate the integral-equation residual at every grid point and
    /// fail (exit 1) if any exceeds 1e-8.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of grid points per axis.
    #[arg(long = "grid-points", default_value_t = 201, value_name = "G")]
    grid_points: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 2u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Verify(args) => {
            dispatch(cmd_verify(&args), args.common.format, &args.common.output)
        }
        Command::Spectrum(args) => {
            dispatch(cmd_spectrum(&args), args.common.format, &args.common.output)
        }
        Command::Eigenfunctions(args) => dispatch(
            cmd_eigenfunctions(&args),
            args.common.format,
            &args.common.output,
        ),
        Command::Kernel(args) => {
            dispatch(cmd_kernel(&args), args.common.format, &args.common.output)
        }
    };
    ExitCode::from(code)
}

/// Renders + routes a command result to the chosen destination and maps it
/// to the documented exit codes.
fn dispatch(result: Result<(String, u8), Error>, format: Format, output: &Option<PathBuf>) -> u8 {
    match result {
        Ok((doc, code)) => match write_output(output, &doc) {
            Ok(()) => code,
            Err(e) => {
                let target = output
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| "<stdout>".to_string());
                eprintln!("error: cannot write {target}: {e}");
                3
            }
        },
        Err(e) if e.is_parameter_error() => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            if format == Format::Json {
                let doc = format!(
                    "{}\n",
                    serde_json::json!({"status": "error", "message": e.to_string()})
                );
                let _ = write_output(output, &doc);
            }
            3
        }
    }
}

fn write_output(output: &Option<PathBuf>, doc: &str) -> std::io::Result<()> {
    let mut text = doc.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_json<T: Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value).map_err(|_| Error::NonFinite("json rendering"))
}

fn cmd_verify(args: &VerifyArgs) -> Result<(String, u8), Error> {
    let params = args.common.params()?;
    let report = verify_instance(&params, args.seed)?;
    let code = verify_exit_code(&report) as u8;
    let doc = match args.common.format {
        Format::Json => render_json(&report)?,
        Format::Csv => verify_csv(&report),
    };
    Ok((doc, code))
}

fn verify_csv(report: &VerifyReport) -> String {
    let mut out = String::from("name,residual,threshold,pass\n");
    for c in &report.checks {
        let residual = c.residual.map(|r| r.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            c.name, residual, c.threshold, c.pass
        ));
    }
    out
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<(String, u8), Error> {
    let params = args.common.params()?;
    let report = spectrum_report(&params)?;
    let doc = match args.common.format {
        Format::Json => render_json(&report)?,
        Format::Csv => spectrum_csv(&report),
    };
    Ok((doc, 0))
}

fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut out = String::from("sector,index,lambda,chi\n");
    for sec in &report.sectors {
        for (i, (l, c)) in sec.lambda.iter().zip(&sec.chi).enumerate() {
            out.push_str(&format!("{},{},{},{}\n", sec.sector, i, l, c));
        }
    }
    out
}

/// Uniform grid across the open band interval, inset by 1e-6 so every point
/// is a valid weight argument.
fn band_grid(omega: f64, points: usize) -> Result<Vec<f64>, Error> {
    let lo = -1.0 + 1e-6;
    let hi = omega - 1e-6;
    if points < 2 || hi <= lo {
        return Err(Error::InvalidGrid(points, omega));
    }
    let step = (hi - lo) / (points as f64 - 1.0);
    Ok((0..points).map(|i| lo + step * i as f64).collect())
}

#[derive(Serialize)]
struct EigenfunctionEntry {
    sector: i8,
    lambda: f64,
    chi: f64,
    flagged: bool,
    /// One `[component_1, component_2]` row per grid point.
    values: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct EigenfunctionsDoc {
    alpha: f64,
    beta: f64,
    level: usize,
    omega: f64,
    grid: Vec<f64>,
    eigenfunctions: Vec<EigenfunctionEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_residual: Option<f64>,
}

fn cmd_eigenfunctions(args: &EigenfunctionsArgs) -> Result<(String, u8), Error> {
    let params = args.common.params()?;
    if args.top_k == 0 {
        return Err(Error::InvalidGrid(0, params.omega()));
    }
    let grid = band_grid(params.omega(), args.grid_points)?;
    let pairs = prolate_eigenpairs(&params)?;
    let take = args.top_k.min(pairs.len());

    let mut entries = Vec::with_capacity(take);
    let mut max_residual: Option<f64> = None;
    for pair in pairs.iter().take(take) {
        let values = eigenfunction_sample(pair, &grid);
        let residuals = if args.check {
            let r = eigenfunction_integral_residuals(pair, &grid)?;
            let worst = r.iter().cloned().fold(0.0, f64::max);
            max_residual = Some(max_residual.map_or(worst, |m: f64| m.max(worst)));
            Some(r)
        } else {
            None
        };
        for row in &values {
            if !(row[0].is_finite() && row[1].is_finite()) {
                return Err(Error::NonFinite("eigenfunction sample"));
            }
        }
        entries.push(EigenfunctionEntry {
            sector: pair.sector,
            lambda: pair.lambda,
            chi: pair.chi,
            flagged: pair.flagged,
            values,
            residuals,
        });
    }

    let code = match max_residual {
        Some(m) if m > 1e-8 => 1u8,
        _ => 0u8,
    };
    let doc = match args.common.format {
        Format::Json => {
            let doc = EigenfunctionsDoc {
                alpha: params.alpha(),
                beta: params.beta(),
                level: params.level(),
                omega: params.omega(),
                grid,
                eigenfunctions: entries,
                max_residual,
            };
            render_json(&doc)?
        }
        Format::Csv => eigenfunctions_csv(&grid, &entries, args.check),
    };
    Ok((doc, code))
}

fn eigenfunctions_csv(grid: &[f64], entries: &[EigenfunctionEntry], check: bool) -> String {
    let mut header = String::from("x");
    for i in 1..=entries.len() {
        header.push_str(&format!(",phi{i}_1,phi{i}_2"));
    }
    if check {
        header.push_str(",residual");
    }
    header.push('\n');
    let mut out = header;
    for (row, &x) in grid.iter().enumerate() {
        out.push_str(&x.to_string());
        for e in entries {
            out.push_str(&format!(",{},{}", e.values[row][0], e.values[row][1]));
        }
        if check {
            let worst = entries
                .iter()
                .filter_map(|e| e.residuals.as_ref().map(|r| r[row]))
                .fold(0.0, f64::max);
            out.push_str(&format!(",{worst}"));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct KernelPoint {
    x: f64,
    y: f64,
    k: [[f64; 2]; 2],
}

#[derive(Serialize)]
struct KernelDoc {
    alpha: f64,
    beta: f64,
    level: usize,
    omega: f64,
    grid: Vec<f64>,
    values: Vec<KernelPoint>,
}

fn cmd_kernel(args: &KernelArgs) -> Result<(String, u8), Error> {
    let params = args.common.params()?;
    let grid = band_grid(params.omega(), args.grid_points)?;
    let mut values = Vec::with_capacity(grid.len() * grid.len());
    for &x in &grid {
        for &y in &grid {
            let k = kernel(&params, x, y);
            if !k.is_finite() {
                return Err(Error::NonFinite("kernel value"));
            }
            values.push(KernelPoint {
                x,
                y,
                k: [[k.get(0, 0), k.get(0, 1)], [k.get(1, 0), k.get(1, 1)]],
            });
        }
    }
    let doc = match args.common.format {
        Format::Json => render_json(&KernelDoc {
            alpha: params.alpha(),
            beta: params.beta(),
            level: params.level(),
            omega: params.omega(),
            grid,
            values,
        })?,
        Format::Csv => {
            let mut out = String::from("x,y,k11,k12,k21,k22\n");
            for p in &values {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    p.x, p.y, p.k[0][0], p.k[0][1], p.k[1][0], p.k[1][1]
                ));
            }
            out
        }
    };
    Ok((doc, 0))
}
