//! Command-line interface: configuration ingestion, dispatch, and
//! structured output. Data goes to the configured sink; diagnostics go
//! to standard error. Exit codes: 0 success, 1 solver failure, 2 config
//! error.

use crate::config::{OutputFormat, RunConfig};
use crate::coupling::build_coupling_set;
use crate::error::Error;
use crate::inverse::{design_family, DesignTargets, InverseOpts};
use crate::output;
use crate::spectrum::{
    default_guesses, det_resonances, single_particle_resonance, ResonanceMatrixSpec, ResonanceSet,
};
use crate::sweep::{geometric_grid, sweep};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "subwave",
    version,
    about = "Coupled dispersive subwavelength resonators: forward resonances and inverse design"
)]
pub struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write data here instead of the config's output path / stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format override.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads for the parallel stages (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resonant frequencies of the configured system.
    Forward,
    /// Resonances of the 1-, 2- and 3-particle systems over a size grid.
    Sweep(SweepArgs),
    /// Place three identical disks so the system resonates at three targets.
    Inverse(InverseArgs),
    /// Dump the coupling pairings, self eigenvalues and dilute constants.
    Coupling,
    /// Parse and validate the configuration, printing the normalised form.
    Validate,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub delta_min: f64,
    #[arg(long)]
    pub delta_max: f64,
    #[arg(long, default_value_t = 16)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    /// Target frequency, complex literal like "4.95-0.06j".
    #[arg(long, value_parser = parse_complex)]
    pub omega1: Complex64,
    #[arg(long, value_parser = parse_complex)]
    pub omega2: Complex64,
    #[arg(long, value_parser = parse_complex)]
    pub omega3: Complex64,
    /// Interior wavenumber parameter; defaults to the config's solver.k.
    #[arg(long)]
    pub k: Option<f64>,
    /// Disk radius (unscaled).
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub alpha3_min: Option<f64>,
    #[arg(long)]
    pub alpha3_max: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub alpha3_steps: usize,
    /// Bracket for the characteristic-size bisection.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [1e-4, 1e-1])]
    pub delta_bracket: Vec<f64>,
}

/// Parse "re+imj" complex literals ("4.9-0.05j", "5", "0.3j").
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let (body, has_j) = match t.strip_suffix(['j', 'J']) {
        Some(b) => (b, true),
        None => (t.as_str(), false),
    };
    if !has_j {
        return body
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|e| format!("bad real literal {body:?}: {e}"));
    }
    // split at the last +/- that is not an exponent sign and not leading
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
            break;
        }
    }
    match split {
        Some(i) => {
            let re: f64 = body[..i]
                .parse()
                .map_err(|e| format!("bad real part {:?}: {e}", &body[..i]))?;
            let imtxt = &body[i..];
            let im: f64 = match imtxt {
                "+" => 1.0,
                "-" => -1.0,
                _ => imtxt
                    .parse()
                    .map_err(|e| format!("bad imaginary part {imtxt:?}: {e}"))?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im: f64 = if body.is_empty() {
                1.0
            } else {
                body.parse()
                    .map_err(|e| format!("bad imaginary literal {body:?}: {e}"))?
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

fn write_sink(cli: &Cli, cfg: Option<&RunConfig>, data: &str) -> Result<(), Error> {
    let path = cli
        .output
        .clone()
        .or_else(|| cfg.and_then(|c| c.output.path.clone().map(PathBuf::from)));
    match path {
        Some(p) => std::fs::write(&p, data)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(data.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Config(format!("cannot write stdout: {e}")))
        }
    }
}

fn effective_format(cli: &Cli, cfg: Option<&RunConfig>) -> OutputFormat {
    cli.format
        .or_else(|| cfg.map(|c| c.output.format))
        .unwrap_or_default()
}

fn require_config(cli: &Cli) -> Result<RunConfig, Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required for this command".into()))?;
    RunConfig::load(path)
}

fn run_forward(cli: &Cli) -> Result<(), Error> {
    let cfg = require_config(cli)?;
    let configuration = cfg.configuration()?;
    let copts = cfg.coupling_opts();
    let mopts = cfg.muller_opts();
    let set = build_coupling_set(&configuration, &cfg.material, cfg.solver.k, &copts)?;

    let result: ResonanceSet = if configuration.len() == 1 {
        let nu = set.self_eigenvalue(0);
        let guess = cfg
            .solver
            .initial_guesses
            .first()
            .map(|g| Complex64::new(g[0], g[1]));
        let r = single_particle_resonance(
            &cfg.material,
            nu,
            configuration.delta,
            cfg.solver.k,
            guess,
            &mopts,
        )?;
        ResonanceSet {
            roots: vec![r],
            failures: vec![],
        }
    } else {
        let spec = ResonanceMatrixSpec {
            coupling: set,
            material: cfg.material,
            k: cfg.solver.k,
        };
        let guesses: Vec<Complex64> = if cfg.solver.initial_guesses.is_empty() {
            default_guesses(&spec.coupling, &cfg.material, cfg.solver.k)?
        } else {
            cfg.solver
                .initial_guesses
                .iter()
                .map(|g| Complex64::new(g[0], g[1]))
                .collect()
        };
        det_resonances(&spec, &guesses, &mopts)?
    };

    for f in &result.failures {
        eprintln!("warning: {f}");
    }
    if result.roots.is_empty() {
        return Err(Error::NoConvergence {
            iterations: 0,
            last: Complex64::new(0.0, 0.0),
        });
    }
    let text = match effective_format(cli, Some(&cfg)) {
        OutputFormat::Json => format!("{:#}\n", output::resonances_to_json(&result)),
        OutputFormat::Csv => output::resonances_to_csv(&result),
    };
    write_sink(cli, Some(&cfg), &text)
}

fn run_sweep(cli: &Cli, args: &SweepArgs) -> Result<(), Error> {
    let cfg = require_config(cli)?;
    let configuration = cfg.configuration()?;
    let grid = geometric_grid(args.delta_min, args.delta_max, args.steps)?;
    let rows = sweep(
        &configuration,
        &cfg.material,
        cfg.solver.k,
        &grid,
        &cfg.coupling_opts(),
        &cfg.muller_opts(),
    )?;
    let text = match effective_format(cli, Some(&cfg)) {
        OutputFormat::Json => format!("{:#}\n", output::sweep_to_json(&rows)),
        OutputFormat::Csv => output::sweep_to_csv(&rows),
    };
    write_sink(cli, Some(&cfg), &text)
}

fn run_inverse(cli: &Cli, args: &InverseArgs) -> Result<(), Error> {
    let cfg = require_config(cli)?;
    let k = args.k.unwrap_or(cfg.solver.k);
    let targets = DesignTargets::new(
        [args.omega1, args.omega2, args.omega3],
        k,
        cfg.material,
        args.rho,
    )?;
    let opts = InverseOpts {
        gamma_hat: cfg.solver.gamma_hat,
        order: cfg.solver.quadrature_order,
        k0_convention: cfg.solver.k0_convention,
        reference_omega: cfg.solver.reference_omega,
        ..InverseOpts::default()
    };
    let lo = args.alpha3_min.unwrap_or(4.0 * args.rho);
    let hi = args.alpha3_max.unwrap_or(100.0 * args.rho);
    if lo.is_nan() || hi.is_nan() || lo <= 0.0 || hi <= lo || args.alpha3_steps < 2 {
        return Err(Error::Config(format!(
            "bad alpha3 grid: [{lo}, {hi}] x {}",
            args.alpha3_steps
        )));
    }
    let n = args.alpha3_steps;
    let grid: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let bracket = [args.delta_bracket[0], args.delta_bracket[1]];
    let family = design_family(&targets, &grid, bracket, &opts)?;
    for d in &family.diagnostics {
        eprintln!("note: {d}");
    }
    eprintln!(
        "delta = {:.9e}, size-condition imaginary mismatch = {:.3e}",
        family.delta, family.imag_mismatch
    );
    let text = match effective_format(cli, Some(&cfg)) {
        OutputFormat::Json => format!("{:#}\n", output::family_to_json(&family)),
        OutputFormat::Csv => output::family_to_csv(&family),
    };
    write_sink(cli, Some(&cfg), &text)
}

fn run_coupling(cli: &Cli) -> Result<(), Error> {
    let cfg = require_config(cli)?;
    let configuration = cfg.configuration()?;
    let set = build_coupling_set(
        &configuration,
        &cfg.material,
        cfg.solver.k,
        &cfg.coupling_opts(),
    )?;
    let text = match effective_format(cli, Some(&cfg)) {
        OutputFormat::Json => format!("{:#}\n", output::coupling_to_json(&set)),
        OutputFormat::Csv => output::coupling_to_csv(&set),
    };
    write_sink(cli, Some(&cfg), &text)
}

fn run_validate(cli: &Cli) -> Result<(), Error> {
    let cfg = require_config(cli)?;
    let text = format!("{}\n", cfg.normalized_json());
    write_sink(cli, Some(&cfg), &text)
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own usage/help; help and version are success
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let outcome = match &cli.command {
        Command::Forward => run_forward(&cli),
        Command::Sweep(args) => run_sweep(&cli, args),
        Command::Inverse(args) => run_inverse(&cli, args),
        Command::Coupling => run_coupling(&cli),
        Command::Validate => run_validate(&cli),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain { .. } | Error::Overlap { .. } => 2,
                _ => 1,
            }
        }
    }
}
