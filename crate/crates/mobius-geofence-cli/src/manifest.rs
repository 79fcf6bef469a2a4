use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use mobius_geofence::simulator::SimConfig;

/// Outcome of one CLI invocation, also used as the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Ok,
    Infeasible,
    BarrierViolated,
    VerifyFailed,
    BadInput,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::BadInput => 2,
            ExitStatus::Infeasible => 3,
            ExitStatus::BarrierViolated => 4,
            ExitStatus::VerifyFailed => 5,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunOutputs {
    pub csv_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
    pub plot_paths: Vec<PathBuf>,
}

/// Written next to the run outputs as `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: SimConfig,
    pub outputs: RunOutputs,
    pub exit_status: ExitStatus,
}
