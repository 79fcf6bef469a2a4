//! Build the concentrizing map for a nonconcentric circle pair, check the
//! start state, run the closed loop and print the outcome.

use mobius_geofence::controller::ControlGains;
use mobius_geofence::mobius::RootKind;
use mobius_geofence::scene::{CircleSpec, DesiredCircle, Scene};
use mobius_geofence::simulator::{run, SimConfig, DEFAULT_WHEEL_BASE};
use num_complex::Complex64;

fn main() {
    let config = SimConfig {
        schema_version: 1,
        scene: Scene {
            inner: CircleSpec::new(0.0, 0.0, 1.0),
            outer: CircleSpec::new(0.5, 0.0, (2.5f64).sqrt()),
            desired: DesiredCircle::Inner,
        },
        root_kind: RootKind::Smaller,
        r0: Complex64::new(-0.9, -0.6653),
        theta0_deg: -60.0,
        gains: ControlGains::default(),
        dt: 1e-3,
        t_final: 60.0,
        seed: 0,
        wheel_base: DEFAULT_WHEEL_BASE,
        monitors: None,
        control_per_stage: false,
    };
    match run(&config) {
        Ok(record) => {
            let s = &record.summary;
            println!(
                "converged: {} (final |e| = {:.2e}, steady turn rate = {:.4})",
                s.converged, s.final_e_abs, s.steady_omega
            );
            println!(
                "barrier margin: {:.4} of dT = {:.4}; every monitor passed: {}",
                s.min_barrier_margin,
                record.map.delta_t,
                s.monitors.all_passed()
            );
        }
        Err(e) => eprintln!("run failed: {e}"),
    }
}
