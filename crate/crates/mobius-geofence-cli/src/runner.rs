use std::fs;
use std::io;
use std::path::Path;

use log::{info, warn};

use mobius_geofence::simulator::{self, SimConfig, SimError, TrajectoryRecord};

use crate::manifest::{ExitStatus, RunManifest, RunOutputs};
use crate::plot;

fn write_record(
    record: &TrajectoryRecord,
    config: &SimConfig,
    out_dir: &Path,
) -> io::Result<RunOutputs> {
    let csv_path = out_dir.join("trajectory.csv");
    let mut file = io::BufWriter::new(fs::File::create(&csv_path)?);
    simulator::write_csv(record, &mut file)?;
    file.into_inner()?;

    let summary_path = out_dir.join("summary.json");
    let doc = record.summary_document(config.seed);
    fs::write(&summary_path, serde_json::to_string_pretty(&doc)?)?;

    Ok(RunOutputs {
        csv_path: Some(csv_path),
        summary_path: Some(summary_path),
        plot_paths: Vec::new(),
    })
}

/// Runs one scenario into `out_dir`: trajectory CSV, summary JSON, manifest
/// and (optionally) the SVG figures.
pub fn execute_run(config: &SimConfig, out_dir: &Path, plots: bool) -> io::Result<RunManifest> {
    fs::create_dir_all(out_dir)?;
    let mut outputs = RunOutputs::default();

    let exit_status = match simulator::run(config) {
        Ok(record) => {
            outputs = write_record(&record, config, out_dir)?;
            if plots {
                let csv = outputs.csv_path.as_ref().expect("csv just written");
                let doc = record.summary_document(config.seed);
                outputs.plot_paths = plot::emit_plots(csv, &doc, out_dir)?;
            }
            if record.summary.monitors.all_passed() {
                info!(
                    "run complete: converged = {}, final |e| = {:.3e}",
                    record.summary.converged, record.summary.final_e_abs
                );
                ExitStatus::Ok
            } else {
                warn!("run complete but an enabled monitor failed");
                ExitStatus::VerifyFailed
            }
        }
        Err(SimError::InfeasibleStart(rep)) => {
            warn!(
                "infeasible start: lhs = {:.6} >= rhs = {:.6} (|E(0)| = {:.6}, dT = {:.6})",
                rep.lhs, rep.rhs, rep.e0_abs, rep.delta_t
            );
            ExitStatus::Infeasible
        }
        Err(SimError::BarrierViolated { t, record }) => {
            warn!("barrier violated at t = {t} s; writing partial record");
            outputs = write_record(&record, config, out_dir)?;
            ExitStatus::BarrierViolated
        }
        Err(SimError::PoleApproach { t, record }) => {
            warn!("trajectory approached a map pole at t = {t} s; writing partial record");
            outputs = write_record(&record, config, out_dir)?;
            ExitStatus::BarrierViolated
        }
        Err(SimError::InvalidConfig(msg)) => {
            warn!("invalid config: {msg}");
            ExitStatus::BadInput
        }
        Err(SimError::Setup(err)) => {
            warn!("scene setup failed: {err}");
            ExitStatus::BadInput
        }
    };

    let manifest = RunManifest {
        config: config.clone(),
        outputs,
        exit_status,
    };
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}
