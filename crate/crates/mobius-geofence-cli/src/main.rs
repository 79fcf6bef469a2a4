mod manifest;
mod plot;
mod runner;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;
use num_complex::Complex64;

use mobius_geofence::controller::{check_feasibility, feasible_heading_intervals, problem_label};
use mobius_geofence::mobius::{MobiusMap, RootKind};
use mobius_geofence::scene::SceneCase;
use mobius_geofence::simulator::SimConfig;
use mobius_geofence::verify::{run_suite, VerifyOptions};

use manifest::ExitStatus;

#[derive(Parser)]
#[command(
    name = "mobius-geofence",
    version,
    about = "Geofenced circular-orbit control of a unicycle: simulate, verify, feasibility, sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario; writes trajectory.csv, summary.json, manifest.json
    /// and optionally SVG figures
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also emit the four SVG figures from the CSV
        #[arg(long)]
        plot: bool,
    },
    /// Run the property-verification suite and print one line per property
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Base sample count for the randomized properties
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Harness self-test: corrupt the map and require detection
        #[arg(long)]
        mutate: bool,
    },
    /// Report start-state feasibility for both roots plus the feasible
    /// heading window at the start position
    Feasibility {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a parameter grid concurrently, one directory per grid point
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: one per core)
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn load_config(path: &Path) -> Result<SimConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_simulate(config_path: &Path, out: &Path, plots: bool) -> ExitStatus {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bad config: {e}");
            return ExitStatus::BadInput;
        }
    };
    match runner::execute_run(&config, out, plots) {
        Ok(manifest) => {
            println!(
                "simulate: {} -> {} (status {:?})",
                config_path.display(),
                out.display(),
                manifest.exit_status
            );
            manifest.exit_status
        }
        Err(e) => {
            eprintln!("i/o failure: {e}");
            ExitStatus::BadInput
        }
    }
}

fn cmd_verify(seed: u64, samples: usize, mutate: bool) -> ExitStatus {
    let report = run_suite(&VerifyOptions {
        seed,
        samples,
        mutate,
    });
    print!("{report}");
    if report.all_passed() {
        ExitStatus::Ok
    } else {
        ExitStatus::VerifyFailed
    }
}

fn cmd_feasibility(config_path: &Path) -> ExitStatus {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bad config: {e}");
            return ExitStatus::BadInput;
        }
    };
    let std_scene = match config.scene.normalize() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("bad scene: {e}");
            return ExitStatus::BadInput;
        }
    };
    let n = std_scene.normalization;
    let r0 = n.to_standard(config.r0);
    let theta0 = n.heading_to_standard(config.theta0_deg.to_radians());

    // The start must sit strictly inside the allowed region; a start on or
    // beyond the constraint circle can never be contained.
    let boundary_gap = (r0 - Complex64::new(std_scene.lambda, 0.0)).norm() - std_scene.mu;
    let misplaced = match std_scene.case {
        SceneCase::BoundaryEncirclesOrbit => boundary_gap >= -1e-9,
        SceneCase::OrbitEncirclesBoundary => boundary_gap <= 1e-9,
    };
    if misplaced {
        eprintln!(
            "start position rejected: r0 = ({:.4}, {:.4}) lies {} the constraint circle \
             (|r0 - lambda| - mu = {:+.3e}); pick a start strictly inside the allowed region",
            r0.re,
            r0.im,
            if boundary_gap.abs() <= 1e-9 {
                "on"
            } else {
                "beyond"
            },
            boundary_gap
        );
        return ExitStatus::BadInput;
    }

    println!(
        "scene: lambda = {:.6}, mu = {:.6} ({})",
        std_scene.lambda,
        std_scene.mu,
        match std_scene.case {
            SceneCase::BoundaryEncirclesOrbit => "boundary encircles orbit",
            SceneCase::OrbitEncirclesBoundary => "orbit encircles boundary",
        }
    );
    println!(
        "start: r0 = ({:.4}, {:.4}), theta0 = {:.2} deg (standard frame)",
        r0.re,
        r0.im,
        theta0.to_degrees()
    );

    for kind in [RootKind::Smaller, RootKind::Larger] {
        let map = match MobiusMap::for_scene(&std_scene, kind) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("map construction failed: {e}");
                return ExitStatus::BadInput;
            }
        };
        let rep = match check_feasibility(&map, r0, theta0) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("feasibility evaluation failed: {e}");
                return ExitStatus::BadInput;
            }
        };
        println!(
            "\nroot {:?} (alpha = {:.6}, dT = {:.6}, {}):",
            kind,
            map.alpha,
            map.delta_t,
            problem_label(kind)
        );
        println!(
            "  eta_a = {:.6}, eta_b = {:.6}, eta = {:.6}",
            rep.eta_a, rep.eta_b, rep.eta
        );
        println!(
            "  lhs = {:.6} {} rhs = {:.6}  => {}",
            rep.lhs,
            if rep.feasible { "<" } else { ">=" },
            rep.rhs,
            if rep.feasible {
                "FEASIBLE"
            } else {
                "INFEASIBLE"
            }
        );
        println!("  |E(0)| = {:.6} vs dT = {:.6}", rep.e0_abs, rep.delta_t);
        match feasible_heading_intervals(&map, r0, 0.1) {
            Ok(intervals) if intervals.is_empty() => {
                println!("  no feasible heading at this start position")
            }
            Ok(intervals) => {
                let text: Vec<String> = intervals
                    .iter()
                    .map(|(lo, hi)| format!("[{lo:.1}, {hi:.1}]"))
                    .collect();
                println!(
                    "  feasible heading window (0.1 deg grid): {} deg",
                    text.join(", ")
                );
            }
            Err(e) => println!("  heading scan failed: {e}"),
        }
    }
    ExitStatus::Ok
}

fn cmd_sweep(config_path: &Path, grid_path: &Path, out: &Path, jobs: Option<usize>) -> ExitStatus {
    let config = match load_config(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bad config: {e}");
            return ExitStatus::BadInput;
        }
    };
    let grid: sweep::SweepGrid = match fs::read_to_string(grid_path)
        .map_err(|e| format!("{}: {e}", grid_path.display()))
        .and_then(|text| {
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", grid_path.display()))
        }) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("bad grid: {e}");
            return ExitStatus::BadInput;
        }
    };
    match sweep::run_sweep(&config, &grid, out, jobs) {
        Ok(status) => {
            println!(
                "sweep: {} points -> {}",
                sweep::expand(&config, &grid).len(),
                out.display()
            );
            status
        }
        Err(e) => {
            eprintln!("sweep failed: {e}");
            ExitStatus::BadInput
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when stdout is closed early (e.g. piped into `head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    env_logger::Builder::from_env(
        env_logger::Env::new()
            .filter("MOBIUS_GEOFENCE_LOG")
            .default_filter_or("warn"),
    )
    .init();

    let cli = Cli::parse();
    let status = match cli.command {
        Command::Simulate { config, out, plot } => cmd_simulate(&config, &out, plot),
        Command::Verify {
            seed,
            samples,
            mutate,
        } => cmd_verify(seed, samples, mutate),
        Command::Feasibility { config } => cmd_feasibility(&config),
        Command::Sweep {
            config,
            grid,
            out,
            jobs,
        } => cmd_sweep(&config, &grid, &out, jobs),
    };
    info!("exit status: {status:?}");
    ExitCode::from(status.code() as u8)
}
