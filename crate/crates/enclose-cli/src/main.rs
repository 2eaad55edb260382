//! `enclose` — target-enclosing guidance simulator front end.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use enclose_cli::config::ScenarioFile;
use enclose_cli::output::{write_csv, write_metrics};
use enclose_core::ism::{validate_gains, StGains};
use enclose_core::reference::disturbance_bound;
use enclose_core::sdre::{output_controllability_rank, SdcSystem};
use enclose_core::simulator::{run_scenario, BuiltinCase, ScenarioConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "enclose",
    version,
    about = "Standoff target-enclosing guidance: SDRE nominal feedback with supertwisting disturbance rejection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunOptions {
    /// Output directory for the CSV trajectory and metrics files.
    #[arg(long, env = "ENCLOSE_OUT", default_value = ".")]
    out: PathBuf,
    /// Integrator step override \[s\].
    #[arg(long, env = "ENCLOSE_DT")]
    dt: Option<f64>,
    /// Horizon override \[s\].
    #[arg(long, env = "ENCLOSE_HORIZON")]
    horizon: Option<f64>,
    /// Log every n-th step.
    #[arg(long, env = "ENCLOSE_DECIMATION")]
    decimation: Option<usize>,
    /// Treat the reference curvature as unknown (fold g(x) into the
    /// disturbance channel).
    #[arg(long, env = "ENCLOSE_CURVATURE_UNKNOWN")]
    curvature_unknown: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario described by a TOML file.
    Simulate {
        /// Scenario file path.
        #[arg(long, env = "ENCLOSE_CONFIG")]
        config: PathBuf,
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Time-varying standoff, weaving target.
    Case1 {
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Time-varying standoff, constant-velocity target.
    Case2 {
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Constant standoff, weaving target.
    Case3 {
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Constant standoff, stationary target.
    Case4 {
        #[command(flatten)]
        opts: RunOptions,
    },
    /// Validate a supertwisting gain set (Hurwitz comparison matrix).
    CheckGains {
        #[arg(long, default_value_t = 10.0)]
        alpha1: f64,
        #[arg(long, default_value_t = 10.0)]
        alpha2: f64,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
    },
    /// Sweep the look angle and report the output-controllability rank.
    CheckRanks {
        /// Grid spacing \[deg\].
        #[arg(long, default_value_t = 0.25)]
        step_deg: f64,
    },
    /// Run the four built-in cases over a grid of step sizes and tabulate
    /// the metrics.
    Sweep {
        #[command(flatten)]
        opts: RunOptions,
        /// Comma-separated list of step sizes \[s\].
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e-3])]
        dts: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Simulate { config, opts } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let file = ScenarioFile::parse(&text)
                .with_context(|| format!("parsing {}", config.display()))?;
            let (cfg, output) = file.into_config()?;
            let label = config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into());
            let names = FileNames {
                csv: output
                    .csv
                    .unwrap_or_else(|| format!("{label}_trajectory.csv")),
                metrics: output
                    .metrics
                    .unwrap_or_else(|| format!("{label}_metrics.txt")),
            };
            run_and_write(&label, cfg, output.decimation, names, &opts)
        }
        Command::Case1 { opts } => run_builtin(BuiltinCase::Case1, &opts),
        Command::Case2 { opts } => run_builtin(BuiltinCase::Case2, &opts),
        Command::Case3 { opts } => run_builtin(BuiltinCase::Case3, &opts),
        Command::Case4 { opts } => run_builtin(BuiltinCase::Case4, &opts),
        Command::CheckGains {
            alpha1,
            alpha2,
            beta,
        } => check_gains(alpha1, alpha2, beta),
        Command::CheckRanks { step_deg } => {
            check_ranks(step_deg);
            Ok(true)
        }
        Command::Sweep { opts, dts } => sweep(&opts, &dts),
    }
}

struct FileNames {
    csv: String,
    metrics: String,
}

impl FileNames {
    fn for_label(label: &str) -> Self {
        FileNames {
            csv: format!("{label}_trajectory.csv"),
            metrics: format!("{label}_metrics.txt"),
        }
    }
}

fn run_builtin(case: BuiltinCase, opts: &RunOptions) -> anyhow::Result<bool> {
    let names = FileNames::for_label(case.label());
    run_and_write(case.label(), ScenarioConfig::builtin(case), 10, names, opts)
}

fn run_and_write(
    label: &str,
    mut cfg: ScenarioConfig,
    default_decimation: usize,
    names: FileNames,
    opts: &RunOptions,
) -> anyhow::Result<bool> {
    if let Some(dt) = opts.dt {
        cfg.dt = dt;
    }
    if let Some(horizon) = opts.horizon {
        cfg.horizon = horizon;
    }
    if opts.curvature_unknown {
        cfg.curvature_known = false;
    }
    let decimation = opts.decimation.unwrap_or(default_decimation).max(1);

    std::fs::create_dir_all(&opts.out)
        .with_context(|| format!("creating {}", opts.out.display()))?;
    let csv_path = opts.out.join(&names.csv);
    let metrics_path = opts.out.join(&names.metrics);

    match run_scenario(&cfg, decimation) {
        Ok((log, metrics)) => {
            write_csv(&log, &csv_path)?;
            let bound = disturbance_bound(
                &cfg.reference,
                &cfg.maneuver,
                cfg.pursuer.v,
                cfg.target.v,
                cfg.horizon,
            );
            let monitors = monitors_pass(&metrics, &cfg);
            let extra = [
                ("scenario", label.to_string()),
                ("dt_s", format!("{:.9e}", cfg.dt)),
                ("horizon_s", format!("{:.9e}", cfg.horizon)),
                ("decimation", decimation.to_string()),
                ("curvature_known", cfg.curvature_known.to_string()),
                ("disturbance_bound_mps2", format!("{bound:.9e}")),
                ("monitors_passed", monitors.to_string()),
            ];
            write_metrics(&metrics, &extra, &metrics_path)?;
            println!(
                "{label}: {} steps, terminal mean |rho| = {:.4} m, max |a_P| = {:.2} m/s^2 -> {}",
                metrics.steps,
                metrics.terminal_mean_abs_rho,
                metrics.max_abs_a_p,
                csv_path.display()
            );
            if !monitors {
                eprintln!("{label}: invariant monitors FAILED (see {})", metrics_path.display());
            }
            Ok(monitors)
        }
        Err(err) => {
            write_csv(&err.partial_log, &csv_path)?;
            eprintln!("{label}: {err}; partial trajectory preserved at {}", csv_path.display());
            Ok(false)
        }
    }
}

/// Run-level invariant monitors: Riccati residual, closed-loop stability and
/// the saturation bound must have held on every step.
fn monitors_pass(metrics: &enclose_core::simulator::RunMetrics, cfg: &ScenarioConfig) -> bool {
    metrics.max_care_residual <= 1e-8
        && metrics.max_closed_loop_abscissa < 0.0
        && metrics.max_abs_a_p <= cfg.a_p_max + 1e-9
        && metrics.terminal_mean_abs_rho.is_finite()
}

fn check_gains(alpha1: f64, alpha2: f64, beta: f64) -> anyhow::Result<bool> {
    let gains = StGains {
        alpha1,
        alpha2,
        beta,
        ..StGains::standard()
    };
    match validate_gains(&gains) {
        Ok(report) => {
            let [e1, e2] = report.psi_eigenvalues;
            println!(
                "PASS: Psi eigenvalues {:.6}{:+.6}i, {:.6}{:+.6}i",
                e1.re, e1.im, e2.re, e2.im
            );
            Ok(true)
        }
        Err(err) => {
            println!("FAIL: {err}");
            Ok(false)
        }
    }
}

fn check_ranks(step_deg: f64) {
    // Representative engagement state: 75 m circle at 40 m/s.
    let theta_dot = -40.0 / 75.0;
    let g = 75.0 * theta_dot * theta_dot;
    let steps = (360.0 / step_deg).round() as i64;
    let mut deficient: Vec<f64> = Vec::new();
    let mut total = 0usize;
    for k in (-steps / 2 + 1)..=(steps / 2) {
        let sigma = k as f64 * step_deg.to_radians();
        let sys = SdcSystem::assemble(theta_dot, sigma.sin(), g, 1.0, 0.01, true)
            .expect("eta above floor");
        total += 1;
        if output_controllability_rank(&sys) < 2 {
            deficient.push(sigma.to_degrees());
        }
    }
    println!(
        "output-controllability rank 2 at {}/{} grid points (step {step_deg} deg)",
        total - deficient.len(),
        total
    );
    if deficient.is_empty() {
        println!("no rank-deficient look angles on this grid");
    } else {
        println!(
            "rank < 2 near sigma_P in {{0, +-180}} deg: {}",
            deficient
                .iter()
                .map(|d| format!("{d:.2}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
}

fn sweep(opts: &RunOptions, dts: &[f64]) -> anyhow::Result<bool> {
    std::fs::create_dir_all(&opts.out)?;
    let table_path: PathBuf = opts.out.join("sweep.csv");
    let mut rows = vec![
        "case,dt_s,convergence_time_s,terminal_mean_abs_rho_m,max_abs_a_p_mps2,saturation_duty,max_care_residual"
            .to_string(),
    ];
    let mut all_ok = true;
    for case in BuiltinCase::ALL {
        for &dt in dts {
            let mut cfg = ScenarioConfig::builtin(case);
            cfg.dt = dt;
            if let Some(horizon) = opts.horizon {
                cfg.horizon = horizon;
            }
            if opts.curvature_unknown {
                cfg.curvature_known = false;
            }
            let decimation = opts.decimation.unwrap_or(10).max(1);
            match run_scenario(&cfg, decimation) {
                Ok((_, m)) => {
                    let row = format!(
                        "{},{:.6e},{},{:.6e},{:.6e},{:.6e},{:.6e}",
                        case.label(),
                        dt,
                        m.convergence_time
                            .map_or("nan".to_string(), |t| format!("{t:.6e}")),
                        m.terminal_mean_abs_rho,
                        m.max_abs_a_p,
                        m.saturation_duty,
                        m.max_care_residual
                    );
                    println!("{row}");
                    rows.push(row);
                    all_ok &= monitors_pass(&m, &cfg);
                }
                Err(err) => {
                    eprintln!("{} at dt = {dt}: {err}", case.label());
                    all_ok = false;
                }
            }
        }
    }
    write_lines(&table_path, &rows)?;
    println!("table -> {}", table_path.display());
    Ok(all_ok)
}

fn write_lines(path: &Path, lines: &[String]) -> std::io::Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for line in lines {
        writeln!(out, "{line}")?;
    }
    out.flush()
}
