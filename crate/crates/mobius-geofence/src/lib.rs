//! Geofenced circular-orbit control of a unicycle robot.
//!
//! The robot must settle on a desired circular orbit while never leaving a
//! nonconcentric circular boundary. A real-parameter Möbius map sends the
//! circle pair to concentric circles, where the gap between the orbit and
//! the boundary is uniform; a logarithmic barrier-Lyapunov turn-rate law
//! solves the problem there, and the map carries the law back to the
//! actual plane.
//!
//! Crate layout:
//! - [`scene`]: circle-pair description and normalization to standard form
//! - [`mobius`]: the concentrizing map, its roots and region behavior
//! - [`bridge`]: state, heading and speed conversion between the planes
//! - [`controller`]: error vectors, barrier value, turn-rate laws, bounds
//! - [`simulator`]: fixed-step closed-loop runs with runtime monitors
//! - [`verify`]: seeded property suite with independent numerical oracles

pub mod angles;
pub mod bridge;
pub mod controller;
pub mod error;
pub mod mobius;
pub mod scene;
pub mod simulator;
pub mod verify;

pub use bridge::{ActualState, TransformedState};
pub use controller::{BoundsReport, ControlGains, ControlOutput, FeasibilityReport};
pub use error::Error;
pub use mobius::{MobiusMap, RootKind};
pub use scene::{Scene, SceneSpec, StandardScene};
pub use simulator::{SimConfig, SimError, TrajectoryRecord};
