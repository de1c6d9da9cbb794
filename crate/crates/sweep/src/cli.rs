use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use coupler_core::equilibrium::{coupling_zero_fluxes, equilibrium};
use coupler_core::exact::{assemble_hamiltonian, exact_spectrum, GridSpec};
use coupler_core::units::{rad_s_to_khz, rad_s_to_mhz, wrap_two_pi};
use serde_json::json;

use crate::config::{parse_flux, CouplingPath, SweepConfig};
use crate::error::{Result, SweepError};
use crate::output::{emit_csv, emit_plot_script};
use crate::sweep::{evaluate_point, resolve_workers, run_sweep, sweep_anharmonicity};

#[derive(Debug, Parser)]
#[command(
    name = "coupler",
    version,
    about = "Couplings of a flux-tunable Josephson coupler between two qubits"
)]
struct Cli {
    /// Worker threads for sweeps (default: COUPLER_WORKERS or the CPU count)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// All quantities at one flux point, as JSON on stdout
    Point {
        #[arg(long)]
        config: PathBuf,
        /// External flux, in radians or as a multiple of pi ("0.3pi")
        #[arg(long, allow_hyphen_values = true)]
        flux: String,
        /// Comma-separated subset of weak,linear,perturbative,exact
        #[arg(long)]
        paths: Option<String>,
        /// Also write the eliminated potential surface as CSV
        #[arg(long)]
        dump_potential: Option<PathBuf>,
    },
    /// Flux sweep written as CSV plus a gnuplot script
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_prefix: Option<String>,
        #[arg(long)]
        n_flux: Option<usize>,
        #[arg(long)]
        paths: Option<String>,
    },
    /// Zero-coupling fluxes and their check against the exact equilibrium
    Zeros {
        #[arg(long)]
        config: PathBuf,
    },
    /// Grid-convergence table of the exact splitting and J
    Converge {
        #[arg(long)]
        config: PathBuf,
        /// Flux points (repeatable); defaults to 0, 0.3pi and pi
        #[arg(long, allow_hyphen_values = true)]
        flux: Vec<String>,
        /// Comma-separated grid sizes
        #[arg(long, default_value = "41,61,81")]
        points: String,
    },
}

fn parse_paths(text: &str) -> Result<BTreeSet<CouplingPath>> {
    let set: BTreeSet<CouplingPath> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if set.is_empty() {
        return Err(SweepError::Config(
            "--paths must name at least one path".into(),
        ));
    }
    Ok(set)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable report")
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|source| SweepError::Write {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn point(
    config: SweepConfig,
    flux: &str,
    dump: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<i32> {
    let phi = parse_flux(flux)?;
    let eta = sweep_anharmonicity(&config);
    let report = evaluate_point(&config, phi, &eta);
    if let Some(path) = dump {
        let eq = equilibrium(&config.circuit, phi)?;
        let h = assemble_hamiltonian(&config.circuit, &eq, &config.grid)?;
        let mut buf = Vec::new();
        h.write_potential_csv(&mut buf)
            .and_then(|_| std::fs::write(&path, buf))
            .map_err(|source| SweepError::Write { path, source })?;
    }
    let failed = report.row.failed();
    let doc = json!({
        "config": config.resolved(),
        "phi_ext": phi,
        "phi_ext_over_pi": phi / PI,
        "report": report,
    });
    write_out(out, &format!("{}\n", to_json(&doc)))?;
    Ok(if failed { 2 } else { 0 })
}

fn sweep(config: SweepConfig, workers: usize, out: &mut dyn Write) -> Result<i32> {
    let outcome = run_sweep(&config, workers);
    let csv = config.csv_path();
    let script = config.plot_path();
    emit_csv(&outcome.rows, &csv)?;
    let paths: Vec<CouplingPath> = config.paths.iter().copied().collect();
    emit_plot_script(&outcome.rows, &paths, &csv, &script)?;
    write_out(
        out,
        &format!(
            "wrote {} rows to {} and plot script {}; {} point(s) failed\n",
            outcome.rows.len(),
            csv.display(),
            script.display(),
            outcome.failures
        ),
    )?;
    Ok(if outcome.failures > 0 { 2 } else { 0 })
}

fn zeros(config: SweepConfig, out: &mut dyn Write) -> Result<i32> {
    let (a, b) = coupling_zero_fluxes(&config.circuit);
    let mut text = String::new();
    let mut worst = 0.0_f64;
    for (k, phi) in [a, b].into_iter().enumerate() {
        let phi = wrap_two_pi(phi);
        let eq = equilibrium(&config.circuit, phi)?;
        let c = eq.cos_delta();
        worst = worst.max(c.abs());
        text.push_str(&format!(
            "zero {}: phi_ext = {:.6}pi ({:.9} rad), delta = {:.9} rad, cos(delta) = {:.3e}\n",
            k + 1,
            phi / PI,
            phi,
            eq.delta,
            c
        ));
    }
    write_out(out, &text)?;
    Ok(if worst < 1e-10 { 0 } else { 2 })
}

fn converge(
    config: SweepConfig,
    fluxes: &[String],
    points: &str,
    out: &mut dyn Write,
) -> Result<i32> {
    let fluxes: Vec<f64> = if fluxes.is_empty() {
        vec![0.0, 0.3 * PI, PI]
    } else {
        fluxes
            .iter()
            .map(|f| parse_flux(f))
            .collect::<Result<_>>()?
    };
    let sizes: Vec<usize> = points
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| SweepError::Config(format!("bad grid size '{s}'")))
        })
        .collect::<Result<_>>()?;
    let mut text =
        String::from("phi_ext_over_pi  n_points  splitting_MHz  change_%  J_kHz  change_%\n");
    let mut worst = 0.0_f64;
    for &phi in &fluxes {
        let mut prev: Option<(f64, f64)> = None;
        for &n in &sizes {
            let grid = GridSpec {
                n_points: n,
                ..config.grid
            };
            grid.validate()
                .map_err(|e| SweepError::Config(e.to_string()))?;
            let s = exact_spectrum(&config.circuit, phi, &grid)?;
            let split = rad_s_to_mhz(s.splitting);
            let j = rad_s_to_khz(s.j.unwrap_or(f64::NAN));
            let change = |new: f64, old: f64| 100.0 * (new - old).abs() / old.abs();
            let (cs, cj) = match prev {
                Some((ps, pj)) => {
                    let (cs, cj) = (change(split, ps), change(j, pj));
                    worst = worst.max(cs).max(cj);
                    (format!("{cs:.4}"), format!("{cj:.4}"))
                }
                None => ("-".into(), "-".into()),
            };
            text.push_str(&format!(
                "{:15.6}  {:8}  {:13.6}  {:>8}  {:9.4}  {:>8}\n",
                phi / PI,
                n,
                split,
                cs,
                j,
                cj
            ));
            prev = Some((split, j));
        }
    }
    text.push_str(&format!("largest successive change: {worst:.4} %\n"));
    write_out(out, &text)?;
    Ok(0)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Point {
            config,
            flux,
            paths,
            dump_potential,
        } => {
            let mut c = SweepConfig::load(&config)?;
            if let Some(p) = paths {
                c.paths = parse_paths(&p)?;
            }
            point(c, &flux, dump_potential, out)
        }
        Command::Sweep {
            config,
            output_prefix,
            n_flux,
            paths,
        } => {
            let mut c = SweepConfig::load(&config)?;
            if let Some(p) = output_prefix {
                c.output_prefix = p;
            }
            if let Some(n) = n_flux {
                c.n_flux = n;
            }
            if let Some(p) = paths {
                c.paths = parse_paths(&p)?;
            }
            c.validate()?;
            let workers = resolve_workers(cli.workers.or(c.workers));
            sweep(c, workers, out)
        }
        Command::Zeros { config } => zeros(SweepConfig::load(&config)?, out),
        Command::Converge {
            config,
            flux,
            points,
        } => converge(SweepConfig::load(&config)?, &flux, &points, out),
    }
}

/// Entry point shared by the binary and the tests. Returns the exit code:
/// 0 on success, 1 for usage or configuration errors, 2 for numerical
/// failures.
pub fn cli_main<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                1
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    if cli.workers == Some(0) {
        let _ = writeln!(err, "error: --workers must be at least 1");
        return 1;
    }
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
