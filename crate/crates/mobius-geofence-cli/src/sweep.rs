use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;

use mobius_geofence::simulator::SimConfig;

use crate::manifest::{ExitStatus, RunManifest};
use crate::runner;

/// Grid file: any subset of these axes; absent axes keep the base value.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(default)]
    pub kappa: Option<Vec<f64>>,
    #[serde(default)]
    pub theta0_deg: Option<Vec<f64>>,
    #[serde(default)]
    pub r0: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub dt: Option<Vec<f64>>,
}

/// Cartesian product of the grid axes over the base config.
pub fn expand(base: &SimConfig, grid: &SweepGrid) -> Vec<SimConfig> {
    let kappas = grid.kappa.clone().unwrap_or_else(|| vec![base.gains.kappa]);
    let headings = grid
        .theta0_deg
        .clone()
        .unwrap_or_else(|| vec![base.theta0_deg]);
    let starts = grid
        .r0
        .clone()
        .unwrap_or_else(|| vec![[base.r0.re, base.r0.im]]);
    let dts = grid.dt.clone().unwrap_or_else(|| vec![base.dt]);

    let mut configs = Vec::new();
    for &kappa in &kappas {
        for &theta0_deg in &headings {
            for &[x, y] in &starts {
                for &dt in &dts {
                    let mut c = base.clone();
                    c.gains.kappa = kappa;
                    c.theta0_deg = theta0_deg;
                    c.r0 = Complex64::new(x, y);
                    c.dt = dt;
                    configs.push(c);
                }
            }
        }
    }
    configs
}

fn status_name(status: ExitStatus) -> &'static str {
    match status {
        ExitStatus::Ok => "ok",
        ExitStatus::Infeasible => "infeasible",
        ExitStatus::BarrierViolated => "barrier_violated",
        ExitStatus::VerifyFailed => "verify_failed",
        ExitStatus::BadInput => "bad_input",
    }
}

/// Runs every grid point concurrently, one output directory per point, and
/// writes an aggregate CSV in grid order.
pub fn run_sweep(
    base: &SimConfig,
    grid: &SweepGrid,
    out_dir: &Path,
    jobs: Option<usize>,
) -> io::Result<ExitStatus> {
    fs::create_dir_all(out_dir)?;
    let configs = expand(base, grid);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| io::Error::other(e.to_string()))?;
    let manifests: Vec<io::Result<RunManifest>> = pool.install(|| {
        configs
            .par_iter()
            .enumerate()
            .map(|(i, config)| {
                runner::execute_run(config, &out_dir.join(format!("run_{i:04}")), false)
            })
            .collect()
    });

    let mut aggregate = fs::File::create(out_dir.join("aggregate.csv"))?;
    writeln!(
        aggregate,
        "point,kappa,theta0_deg,r0x,r0y,dt,status,converged,final_e_abs,steady_omega,max_E_abs"
    )?;
    let mut worst = ExitStatus::Ok;
    for (i, (config, result)) in configs.iter().zip(&manifests).enumerate() {
        let manifest = match result {
            Ok(m) => m,
            Err(e) => return Err(io::Error::other(format!("grid point {i}: {e}"))),
        };
        let summary = manifest
            .outputs
            .summary_path
            .as_ref()
            .and_then(|p| fs::read_to_string(p).ok())
            .and_then(|text| serde_json::from_str::<serde_json::Value>(&text).ok());
        let field = |name: &str| -> String {
            summary
                .as_ref()
                .and_then(|doc| doc.get("summary"))
                .and_then(|s| s.get(name))
                .map(|v| v.to_string())
                .unwrap_or_else(|| "".into())
        };
        writeln!(
            aggregate,
            "{i},{},{},{},{},{},{},{},{},{},{}",
            config.gains.kappa,
            config.theta0_deg,
            config.r0.re,
            config.r0.im,
            config.dt,
            status_name(manifest.exit_status),
            field("converged"),
            field("final_e_abs"),
            field("steady_omega"),
            field("max_E_abs"),
        )?;
        // BadInput at any point outranks the rest; infeasible points are
        // recorded but do not fail the sweep.
        if manifest.exit_status == ExitStatus::BadInput {
            worst = ExitStatus::BadInput;
        }
    }
    Ok(worst)
}
