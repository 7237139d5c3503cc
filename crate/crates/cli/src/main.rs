//! Command-line front end: eigenvalue tables, eigenfunction evaluation,
//! signal projection sweeps, the bound verification suite, and the deflection
//! formula, with CSV/JSON export for plotting.
//!
//! Exit codes: 0 success, 1 usage or computation error, 2 when `verify`
//! finds a violated bound.

mod render;
mod signal_spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gpswf_core::approx::{deflection, project, Signal};
use gpswf_core::basis::{compute_basis, GpswfParams};
use gpswf_core::bounds::{suite_passed, verify_suite, BoundReport};
use gpswf_core::eigtri::gauss_jacobi;
use gpswf_core::spectrum::spectral_triples;
use render::{fmt_f64, json_f64, json_str};

#[derive(Parser)]
#[command(
    name = "gpswf",
    version,
    about = "Generalized prolate spheroidal wave functions: spectra, projections and bound checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyFormat {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate (chi_n, lambda_n, |mu_n|) with the chi enclosure per index.
    Eig {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        c: f64,
        /// Number of indices, n = 0..count-1.
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write output here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one eigenfunction on a uniform grid over [-1, 1].
    Eval {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        c: f64,
        /// Eigenfunction index.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projection error sweep of a signal over truncation orders 0..=nmax.
    Project {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        c: f64,
        /// Signal token: sinc:a=40 | kernel | sobolev:s=1.0,seed=42,kmax=1000 | file:PATH
        #[arg(long)]
        signal: String,
        #[arg(long)]
        nmax: usize,
        /// Seed used when the sobolev token does not carry one.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every bound check against the computed spectrum; exits 2 on a
    /// violated bound.
    Verify {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        nmax: usize,
        #[arg(long, value_enum, default_value_t = VerifyFormat::Text)]
        format: VerifyFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deflection of the almost time-limited unit ball from the first N
    /// eigenfunctions.
    Deflection {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        c: f64,
        /// Time-leakage fraction epsilon^2, in (0, 1).
        #[arg(long)]
        eps: f64,
        /// Subspace dimension N.
        #[arg(long)]
        terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> gpswf_core::Result<u8> {
    match command {
        Command::Eig { alpha, c, count, format, out } => {
            let text = run_eig(alpha, c, count, format)?;
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Eval { alpha, c, n, points, format, out } => {
            let text = run_eval(alpha, c, n, points, format)?;
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Project { alpha, c, signal, nmax, seed, format, out } => {
            let text = run_project(alpha, c, &signal, nmax, seed, format)?;
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Verify { alpha, c, nmax, format, out } => {
            let reports = verify_suite(alpha, c, nmax)?;
            let text = render_verify(alpha, c, nmax, &reports, format);
            emit(&text, out.as_deref())?;
            Ok(if suite_passed(&reports) { 0 } else { 2 })
        }
        Command::Deflection { alpha, c, eps, terms, out } => {
            let text = run_deflection(alpha, c, eps, terms)?;
            emit(&text, out.as_deref())?;
            Ok(0)
        }
    }
}

fn emit(text: &str, out: Option<&std::path::Path>) -> gpswf_core::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            gpswf_core::Error::Precondition(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn params_json(alpha: f64, c: f64) -> String {
    format!("{{\"alpha\":{},\"c\":{}}}", json_f64(alpha), json_f64(c))
}

fn run_eig(alpha: f64, c: f64, count: usize, format: Format) -> gpswf_core::Result<String> {
    if count == 0 {
        return Err(gpswf_core::Error::Precondition("count must be >= 1".into()));
    }
    let params = GpswfParams::for_max_index(alpha, c, count - 1)?;
    let basis = compute_basis(&params, count - 1)?;
    let triples = spectral_triples(&basis, count)?;
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("n,chi,lambda,mu_abs,chi_lower,chi_upper\n");
            for t in &triples {
                let cb = gpswf_core::bounds::chi_bounds(t.n, alpha, c, Some(t.chi));
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    t.n,
                    fmt_f64(t.chi),
                    fmt_f64(t.lambda),
                    fmt_f64(t.mu_abs),
                    fmt_f64(cb.lower_classical),
                    fmt_f64(cb.upper)
                ));
            }
        }
        Format::Json => {
            s.push_str(&format!("{{\"params\":{},\"results\":[", params_json(alpha, c)));
            for (i, t) in triples.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let cb = gpswf_core::bounds::chi_bounds(t.n, alpha, c, Some(t.chi));
                s.push_str(&format!(
                    "{{\"n\":{},\"chi\":{},\"lambda\":{},\"mu_abs\":{},\"phase_power\":{},\"chi_lower\":{},\"chi_upper\":{}}}",
                    t.n,
                    json_f64(t.chi),
                    json_f64(t.lambda),
                    json_f64(t.mu_abs),
                    t.phase_power,
                    json_f64(cb.lower_classical),
                    json_f64(cb.upper)
                ));
            }
            s.push_str("]}\n");
        }
    }
    Ok(s)
}

fn run_eval(
    alpha: f64,
    c: f64,
    n: usize,
    points: usize,
    format: Format,
) -> gpswf_core::Result<String> {
    if points < 2 {
        return Err(gpswf_core::Error::Precondition("points must be >= 2".into()));
    }
    let params = GpswfParams::for_max_index(alpha, c, n)?;
    let basis = compute_basis(&params, n)?;
    let grid: Vec<f64> = (0..points)
        .map(|i| -1.0 + 2.0 * i as f64 / (points - 1) as f64)
        .collect();
    let values = basis.eval_psi_grid(n, &grid)?;
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("x,psi\n");
            for (x, v) in grid.iter().zip(&values) {
                s.push_str(&format!("{},{}\n", fmt_f64(*x), fmt_f64(*v)));
            }
        }
        Format::Json => {
            s.push_str(&format!(
                "{{\"params\":{},\"n\":{n},\"results\":[",
                params_json(alpha, c)
            ));
            for (i, (x, v)) in grid.iter().zip(&values).enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&format!("{{\"x\":{},\"psi\":{}}}", json_f64(*x), json_f64(*v)));
            }
            s.push_str("]}\n");
        }
    }
    Ok(s)
}

fn run_project(
    alpha: f64,
    c: f64,
    signal_token: &str,
    nmax: usize,
    seed: u64,
    format: Format,
) -> gpswf_core::Result<String> {
    let signal = signal_spec::parse_signal(signal_token, alpha, c, seed)?;
    let kernel_member = matches!(signal, Signal::BesselKernel { .. });
    let params = GpswfParams::for_max_index(alpha, c, nmax)?;
    let basis = compute_basis(&params, nmax)?;
    let rule = gauss_jacobi(alpha, 2 * params.matrix_size())?;
    let f = |x: f64| signal.eval(x);
    let reports: Vec<_> = (0..=nmax)
        .map(|n| project(&basis, &f, n, &rule, kernel_member))
        .collect::<gpswf_core::Result<_>>()?;
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("n_trunc,err_weighted_l2,err_sup_grid,bound_rhs,resolution_warning\n");
            for r in &reports {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n_trunc,
                    fmt_f64(r.err_weighted_l2),
                    fmt_f64(r.err_sup_grid),
                    r.bound_rhs.map_or(String::new(), fmt_f64),
                    r.resolution_warning
                ));
            }
        }
        Format::Json => {
            s.push_str(&format!(
                "{{\"params\":{},\"signal\":{},\"results\":[",
                params_json(alpha, c),
                json_str(signal_token)
            ));
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&format!(
                    "{{\"n_trunc\":{},\"err_weighted_l2\":{},\"err_sup_grid\":{},\"bound_rhs\":{},\"resolution_warning\":{}}}",
                    r.n_trunc,
                    json_f64(r.err_weighted_l2),
                    json_f64(r.err_sup_grid),
                    r.bound_rhs.map_or("null".to_string(), |b| json_f64(b)),
                    r.resolution_warning
                ));
            }
            s.push_str("]}\n");
        }
    }
    Ok(s)
}

fn render_verify(
    alpha: f64,
    c: f64,
    nmax: usize,
    reports: &[BoundReport],
    format: VerifyFormat,
) -> String {
    let status = |r: &BoundReport| {
        if r.skipped {
            "SKIP"
        } else if r.satisfied {
            "PASS"
        } else {
            "FAIL"
        }
    };
    let mut s = String::new();
    match format {
        VerifyFormat::Text => {
            for r in reports {
                if r.skipped {
                    s.push_str(&format!("SKIP {}\n", r.bound_id.as_str()));
                } else {
                    s.push_str(&format!(
                        "{} {} n={} lhs={} rhs={} margin={}\n",
                        status(r),
                        r.bound_id.as_str(),
                        r.scope,
                        fmt_f64(r.lhs),
                        fmt_f64(r.rhs),
                        fmt_f64(r.margin)
                    ));
                }
            }
            s.push_str(&format!(
                "RESULT {}\n",
                if suite_passed(reports) { "PASS" } else { "FAIL" }
            ));
        }
        VerifyFormat::Csv => {
            s.push_str("bound,scope,status,lhs,rhs,margin\n");
            for r in reports {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.bound_id.as_str(),
                    r.scope,
                    status(r),
                    fmt_f64(r.lhs),
                    fmt_f64(r.rhs),
                    fmt_f64(r.margin)
                ));
            }
        }
        VerifyFormat::Json => {
            s.push_str(&format!(
                "{{\"params\":{},\"nmax\":{nmax},\"results\":[",
                params_json(alpha, c)
            ));
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&format!(
                    "{{\"bound\":{},\"scope\":{},\"status\":{},\"lhs\":{},\"rhs\":{},\"margin\":{}}}",
                    json_str(r.bound_id.as_str()),
                    json_str(&r.scope.to_string()),
                    json_str(&status(r).to_lowercase()),
                    json_f64(r.lhs),
                    json_f64(r.rhs),
                    json_f64(r.margin)
                ));
            }
            s.push_str(&format!(
                "],\"passed\":{}}}\n",
                suite_passed(reports)
            ));
        }
    }
    s
}

fn run_deflection(alpha: f64, c: f64, eps: f64, terms: usize) -> gpswf_core::Result<String> {
    if terms == 0 {
        return Err(gpswf_core::Error::Precondition("terms must be >= 1".into()));
    }
    let params = GpswfParams::for_max_index(alpha, c, terms)?;
    let basis = compute_basis(&params, terms)?;
    let lambdas: Vec<f64> = spectral_triples(&basis, terms + 1)?
        .iter()
        .map(|t| t.lambda)
        .collect();
    let d = deflection(&lambdas, terms, eps)?;
    let case = match d.case {
        gpswf_core::approx::DeflectionCase::Saturated => 1,
        gpswf_core::approx::DeflectionCase::Interior => 2,
    };
    Ok(format!(
        "{{\"deflection\":{},\"bound\":{},\"case\":{case}}}\n",
        json_f64(d.value),
        json_f64(d.bound)
    ))
}
