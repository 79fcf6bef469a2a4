//! Seeded verification suite: every algebraic identity, mapping property
//! and closed-loop guarantee checked with independent numerical oracles
//! (round trips, finite differences, exhaustive sampling), reporting the
//! worst residual per property.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bridge::{self, ActualState, TransformedState};
use crate::controller::{
    check_feasibility, error_transformed_from_actual, omega_actual_from_actual,
    omega_actual_from_transformed, omega_transformed, ControlGains,
};
use crate::mobius::{MobiusMap, Plane, Region, RootKind};
use crate::scene::{normalize_scene, CircleSpec, DesiredCircle, Scene, SceneCase, SceneSpec};
use crate::simulator::{self, SimConfig};

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Base sample count; individual properties scale it as documented.
    pub samples: usize,
    /// Harness self-test: corrupt the map and require the cross-law check
    /// to detect it.
    pub mutate: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 1000,
            mutate: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub results: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(
                f,
                "{}  {:<38} worst {:>12.3e}  tol {:>9.1e}  {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.worst,
                r.tolerance,
                r.detail
            )?;
        }
        writeln!(
            f,
            "{} / {} properties passed",
            self.results.iter().filter(|r| r.passed).count(),
            self.results.len()
        )
    }
}

struct Variant {
    map: MobiusMap,
}

fn scene_variants() -> Vec<Variant> {
    let one = normalize_scene(
        &SceneSpec {
            inner: CircleSpec::new(0.0, 0.0, 1.0),
            outer: CircleSpec::new(0.5, 0.0, (2.5f64).sqrt()),
        },
        true,
    )
    .unwrap();
    let two = normalize_scene(
        &SceneSpec {
            inner: CircleSpec::new(0.4, 0.0, 0.4),
            outer: CircleSpec::new(0.0, 0.0, 1.0),
        },
        false,
    )
    .unwrap();
    vec![
        Variant {
            map: MobiusMap::for_scene(&one, RootKind::Smaller).unwrap(),
        },
        Variant {
            map: MobiusMap::for_scene(&one, RootKind::Larger).unwrap(),
        },
        Variant {
            map: MobiusMap::for_scene(&two, RootKind::Smaller).unwrap(),
        },
        Variant {
            map: MobiusMap::for_scene(&two, RootKind::Larger).unwrap(),
        },
    ]
}

/// Inner/outer circle (center, radius) of the actual-plane pair.
fn actual_circles(map: &MobiusMap) -> ((Complex64, f64), (Complex64, f64)) {
    let orbit = (Complex64::new(0.0, 0.0), 1.0);
    let boundary = (Complex64::new(map.lambda, 0.0), map.mu);
    match map.case {
        SceneCase::BoundaryEncirclesOrbit => (orbit, boundary),
        SceneCase::OrbitEncirclesBoundary => (boundary, orbit),
    }
}

fn sample_disk(rng: &mut ChaCha8Rng, center: Complex64, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    center + Complex64::from_polar(r, t)
}

/// Uniform point strictly between the two circles.
fn sample_annulus(rng: &mut ChaCha8Rng, map: &MobiusMap) -> Complex64 {
    let ((ci, ri), (co, ro)) = actual_circles(map);
    loop {
        let z = sample_disk(rng, co, ro * 0.999);
        if (z - co).norm() < ro * 0.999 && (z - ci).norm() > ri * 1.001 {
            return z;
        }
    }
}

fn sample_region(rng: &mut ChaCha8Rng, map: &MobiusMap, region: Region) -> Complex64 {
    let ((ci, ri), (co, ro)) = actual_circles(map);
    match region {
        Region::InsideInner => loop {
            let z = sample_disk(rng, ci, ri * 0.999);
            if (z + map.beta).norm() > 1e-3 {
                return z;
            }
        },
        Region::Annulus => sample_annulus(rng, map),
        Region::OutsideOuter => loop {
            let rad = rng.random_range(ro * 1.001..ro * 3.0);
            let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let z = co + Complex64::from_polar(rad, t);
            if (z + map.beta).norm() > 1e-3 {
                return z;
            }
        },
        _ => unreachable!("sampling only targets open regions"),
    }
}

/// A state inside the feasible disk whose transformed error is safely
/// inside the barrier.
fn sample_feasible_state(rng: &mut ChaCha8Rng, map: &MobiusMap, v: f64) -> ActualState {
    let ((ci, ri), (co, ro)) = actual_circles(map);
    loop {
        let z = match map.case {
            SceneCase::BoundaryEncirclesOrbit => sample_disk(rng, co, ro * 0.995),
            SceneCase::OrbitEncirclesBoundary => {
                let z = sample_disk(rng, co, ro * 0.995);
                if (z - ci).norm() <= ri * 1.005 {
                    continue;
                }
                z
            }
        };
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let s = ActualState::new(z, theta, v);
        if error_transformed_from_actual(map, &s).norm() < 0.9 * map.delta_t {
            return s;
        }
    }
}

struct Suite {
    rng: ChaCha8Rng,
    results: Vec<PropertyResult>,
}

impl Suite {
    fn push(&mut self, name: &str, worst: f64, tolerance: f64, detail: String) {
        self.results.push(PropertyResult {
            name: name.to_string(),
            passed: worst <= tolerance,
            worst,
            tolerance,
            detail,
        });
    }
}

fn central_diff(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

/// Relative residual with a floor so near-zero rates compare absolutely.
fn rel_residual(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / numeric.abs().max(analytic.abs()).max(1e-3)
}

pub fn run_suite(options: &VerifyOptions) -> VerifyReport {
    let mut suite = Suite {
        rng: ChaCha8Rng::seed_from_u64(options.seed),
        results: Vec::new(),
    };
    let variants = scene_variants();
    let n = options.samples.max(1);

    round_trip(&mut suite, &variants, 10 * n);
    circle_preservation(&mut suite, &variants, n);
    root_structure(&mut suite);
    region_commutation(&mut suite, &variants, n);
    conformality(&mut suite, &variants, n);
    heading_congruence(&mut suite, &variants, n);
    derivative_oracles(&mut suite, &variants, n);
    speed_consistency(&mut suite, &variants, n);
    rotation_sense(&mut suite, &variants);
    cross_law(&mut suite, &variants, n, options.mutate);
    rate_cancellation(&mut suite, &variants, n);
    control_decomposition(&mut suite, &variants, n);
    feasibility_equivalence(&mut suite, &variants, 10 * n);
    inverse_polar_closed_form(&mut suite, &variants, n);
    closed_loop_guarantees(&mut suite);
    dual_integration(&mut suite);
    rk4_order(&mut suite);

    VerifyReport {
        results: suite.results,
    }
}

fn round_trip(suite: &mut Suite, variants: &[Variant], count: usize) {
    let mut worst = 0.0f64;
    for v in variants {
        for _ in 0..count {
            let z = sample_annulus(&mut suite.rng, &v.map);
            let w = v.map.forward(z).unwrap();
            let back = v.map.inverse(w).unwrap();
            worst = worst.max((back - z).norm());
        }
    }
    suite.push(
        "map-round-trip",
        worst,
        1e-10,
        format!("{count} annulus points x {} maps", variants.len()),
    );
}

fn circle_preservation(suite: &mut Suite, variants: &[Variant], count: usize) {
    let mut worst = 0.0f64;
    for v in variants {
        for k in 0..count {
            let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            let on_orbit = Complex64::from_polar(1.0, t);
            worst = worst.max((v.map.forward(on_orbit).unwrap().norm() - v.map.orbit_radius).abs());
            let on_boundary =
                Complex64::new(v.map.lambda, 0.0) + Complex64::from_polar(v.map.mu, t);
            worst = worst
                .max((v.map.forward(on_boundary).unwrap().norm() - v.map.boundary_radius).abs());
        }
    }
    suite.push(
        "circle-preservation",
        worst,
        1e-10,
        format!("{count} angles per circle"),
    );
}

fn root_structure(suite: &mut Suite) {
    let mut worst = 0.0f64;
    let mut detail = String::from("roots real, same-signed, reciprocal, split by the unit circle");
    for (scene, desired_inner) in [
        (
            SceneSpec {
                inner: CircleSpec::new(0.0, 0.0, 1.0),
                outer: CircleSpec::new(0.5, 0.0, (2.5f64).sqrt()),
            },
            true,
        ),
        (
            SceneSpec {
                inner: CircleSpec::new(0.4, 0.0, 0.4),
                outer: CircleSpec::new(0.0, 0.0, 1.0),
            },
            false,
        ),
    ] {
        let std_scene = normalize_scene(&scene, desired_inner).unwrap();
        match crate::mobius::solve_roots(&std_scene) {
            Ok((s, l)) => {
                worst = worst.max((s * l - 1.0).abs());
                if s.signum() != l.signum() || s.abs() >= 1.0 || l.abs() <= 1.0 {
                    worst = worst.max(1.0);
                    detail = "root ordering or sign structure broken".into();
                }
            }
            Err(e) => {
                worst = worst.max(1.0);
                detail = format!("solve failed: {e}");
            }
        }
    }
    suite.push("root-structure", worst, 1e-12, detail);
}

fn region_commutation(suite: &mut Suite, variants: &[Variant], count: usize) {
    let mut mismatches = 0usize;
    for v in variants {
        for region in [Region::InsideInner, Region::Annulus, Region::OutsideOuter] {
            for _ in 0..count {
                let z = sample_region(&mut suite.rng, &v.map, region);
                let got = v.map.classify_region(z, Plane::Actual);
                if got != region {
                    mismatches += 1;
                    continue;
                }
                let w = match v.map.forward(z) {
                    Ok(w) => w,
                    Err(_) => continue,
                };
                if v.map.classify_region(w, Plane::Transformed) != v.map.map_region(region) {
                    mismatches += 1;
                }
            }
        }
    }
    suite.push(
        "region-commutation",
        mismatches as f64,
        0.0,
        format!("{count} points per region per map, mismatches counted"),
    );
}

fn conformality(suite: &mut Suite, variants: &[Variant], count: usize) {
    let mut worst = 0.0f64;
    let h = 1e-6;
    for v in variants {
        for _ in 0..count {
            let z = sample_annulus(&mut suite.rng, &v.map);
            let exact = v.map.derivative(z).unwrap();
            let real_step =
                (v.map.forward(z + h).unwrap() - v.map.forward(z - h).unwrap()) / (2.0 * h);
            let imag_step = (v.map.forward(z + Complex64::new(0.0, h)).unwrap()
                - v.map.forward(z - Complex64::new(0.0, h)).unwrap())
                / Complex64::new(0.0, 2.0 * h);
            worst = worst.max((real_step - exact).norm() / exact.norm());
            worst = worst.max((imag_step - exact).norm() / exact.norm());
        }
    }
    suite.push(
        "conformality",
        worst,
        1e-6,
        "numeric dw/dz vs closed form, both step directions".into(),
    );
}

fn heading_congruence(suite: &mut Suite, variants: &[Variant], count: usize) {
    let mut worst = 0.0f64;
    for v in variants {
        for _ in 0..count {
            let s = sample_feasible_state(&mut suite.rng, &v.map, 1.0);
            let ts = bridge::to_transformed(&v.map, &s).unwrap();
            let chi = bridge::chi(&v.map, &s).unwrap();
            worst = worst.max(crate::angles::mod_pi_residual(ts.heading, s.heading - chi).abs());
            let xi = bridge::xi(&v.map, &ts).unwrap();
            worst = worst.max(crate::angles::mod_pi_residual(s.heading, ts.heading - xi).abs());
        }
    }
    suite.push(
        "heading-congruence",
        worst,
        1e-9,
        "gamma = theta - chi and theta = gamma - xi (mod pi)".into(),
    );
}

fn derivative_oracles(suite: &mut Suite, variants: &[Variant], count: usize) {
    let h = 1e-6;
    let gains = ControlGains::default();
    let mut worst = 0.0f64;
    for v in variants {
        for _ in 0..count {
            let s = sample_feasible_state(&mut suite.rng, &v.map, 1.0);
            let omega = match omega_actual_from_actual(&v.map, &s, &gains) {
                Ok(o) => o.total,
                Err(_) => continue,
            };
            // Micro-steps of the true closed-loop flow (RK4 runs backwards
            // for negative dt).
            let flow = |dt: f64| -> ActualState { simulator::step_actual(&s, omega, dt) };

            let chi_fd = central_diff(|dt| bridge::chi(&v.map, &flow(dt)).unwrap(), h);
            worst = worst.max(rel_residual(bridge::chi_dot(&v.map, &s).unwrap(), chi_fd));

            let phi_fd = central_diff(|dt| flow(dt).position.arg(), h);
            worst = worst.max(rel_residual(bridge::phi_dot(&s).unwrap(), phi_fd));

            let ts = bridge::to_transformed(&v.map, &s).unwrap();
            let xi_fd = central_diff(
                |dt| {
                    let moved = bridge::to_transformed(&v.map, &flow(dt)).unwrap();
                    bridge::xi(&v.map, &moved).unwrap()
                },
                h,
            );
            worst = worst.max(rel_residual(bridge::xi_dot(&v.map, &ts, s.speed), xi_fd));
        }
    }
    suite.push(
        "derivative-oracles",
        worst,
        1e-5,
        format!("chi/xi/phi rates vs central differences, h = {h} s"),
    );
}

fn speed_consistency(suite: &mut Suite, variants: &[Variant], count: usize) {
    let mut worst = 0.0f64;
    for v in variants {
        for _ in 0..count {
            let z = sample_annulus(&mut suite.rng, &v.map);
            let rho = v.map.forward(z).unwrap();
            let a = bridge::transformed_speed_from_actual(&v.map, z, 1.0);
            let b = bridge::transformed_speed(&v.map, rho, 1.0);
            worst = worst.max((a - b).abs());
        }
    }
    suite.push(
        "speed-consistency",
        worst,
        1e-10,
        "image speed from actual vs transformed parameters".into(),
    );
}

fn rotation_sense(suite: &mut Suite, variants: &[Variant]) {
    let mut worst = f64::NEG_INFINITY;
    let steps = 720;
    for v in variants {
        let expected = match v.map.kind {
            RootKind::Smaller => 1.0,
            RootKind::Larger => -1.0,
        };
        let gamma_at = |t: f64| {
            let s = ActualState::new(
                Complex64::from_polar(1.0, t),
                t + std::f64::consts::FRAC_PI_2,
                1.0,
            );
            bridge::to_transformed(&v.map, &s).unwrap().heading
        };
        let mut prev = gamma_at(0.0);
        for k in 1..=steps {
            let t = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
            let g = gamma_at(t);
            let step = crate::angles::diff(g, prev);
            // A wrong-signed increment makes the residual positive.
            worst = worst.max(-expected * step);
            prev = g;
        }
    }
    suite.push(
        "rotation-sense",
        worst,
        0.0,
        "image heading advances with the root's sense on tangent orbits".into(),
    );
}

fn cross_law(suite: &mut Suite, variants: &[Variant], count: usize, mutate: bool) {
    let gains = ControlGains::default();
    let mut worst = 0.0f64;
    for v in variants {
        // Self-test mode corrupts only the transformed-parameter route, so
        // the two routes see inconsistent constants and must disagree.
        let mut transformed_map = v.map;
        if mutate {
            transformed_map.alpha += 1e-3;
        }
        for _ in 0..count {
            let s = sample_feasible_state(&mut suite.rng, &v.map, 1.0);
            let from_actual = match omega_actual_from_actual(&v.map, &s, &gains) {
                Ok(o) => o.total,
                Err(_) => continue,
            };
            let ts = match bridge::to_transformed(&v.map, &s) {
                Ok(ts) => ts,
                Err(_) => continue,
            };
            let from_transformed =
                match omega_actual_from_transformed(&transformed_map, &ts, &gains) {
                    Ok(o) => o.total,
                    Err(_) => continue,
                };
            worst = worst.max((from_actual - from_transformed).abs());
        }
    }
    if mutate {
        let detected = worst > 1e-9;
        suite.results.push(PropertyResult {
            name: "cross-law-omega (mutated self-test)".into(),
            passed: detected,
            worst,
            tolerance: 1e-9,
            detail: "alpha corrupted by 1e-3 on one route; equality must break".into(),
        });
    } else {
        suite.push(
            "cross-law-omega",
            worst,
            1e-9,
            "turn rate from actual vs transformed parameters".into(),
        );
    }
}

fn rate_cancellation(suite: &mut Suite, variants: &[Variant], count: usize) {
    let mut worst = 0.0f64;
    for v in variants {
        for _ in 0..count {
            let s = sample_feasible_state(&mut suite.rng, &v.map, 1.0);
            let ts = bridge::to_transformed(&v.map, &s).unwrap();
            let sum = bridge::chi_dot(&v.map, &s).unwrap() + bridge::xi_dot(&v.map, &ts, s.speed);
            worst = worst.max(sum.abs());
        }
    }
    suite.push(
        "chi-xi-rate-cancellation",
        worst,
        1e-8,
        "chi_dot + xi_dot vanishes along consistent states".into(),
    );
}

fn control_decomposition(suite: &mut Suite, variants: &[Variant], count: usize) {
    let gains = ControlGains::default();
    let mut worst = 0.0f64;
    for v in variants {
        for _ in 0..count {
            let s = sample_feasible_state(&mut suite.rng, &v.map, 1.0);
            let ts = bridge::to_transformed(&v.map, &s).unwrap();
            let omega = match omega_actual_from_actual(&v.map, &s, &gains) {
                Ok(o) => o,
                Err(_) => continue,
            };
            let cap = match omega_transformed(&v.map, &ts, &gains) {
                Ok(o) => o,
                Err(_) => continue,
            };
            let chi_dot = bridge::chi_dot(&v.map, &s).unwrap();
            let xi_dot = bridge::xi_dot(&v.map, &ts, s.speed);
            worst = worst.max((omega.total - cap.total - chi_dot).abs());
            worst = worst.max((omega.total - cap.total + xi_dot).abs());
        }
    }
    suite.push(
        "control-decomposition",
        worst,
        1e-9,
        "omega - Omega equals chi_dot and -xi_dot".into(),
    );
}

fn feasibility_equivalence(suite: &mut Suite, variants: &[Variant], count: usize) {
    let mut mismatches = 0usize;
    for v in variants {
        for _ in 0..count {
            let s = sample_feasible_state(&mut suite.rng, &v.map, 1.0);
            // Re-randomize the heading so infeasible pairs are exercised too.
            let theta = suite
                .rng
                .random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let rep = check_feasibility(&v.map, s.position, theta).unwrap();
            if rep.feasible != (rep.e0_abs < v.map.delta_t) {
                mismatches += 1;
            }
        }
    }
    suite.push(
        "feasibility-equivalence",
        mismatches as f64,
        0.0,
        format!("{count} start states per map; inequality vs direct |E(0)| test"),
    );
}

fn inverse_polar_closed_form(suite: &mut Suite, variants: &[Variant], count: usize) {
    let mut worst = 0.0f64;
    for v in variants {
        for _ in 0..count {
            let z = sample_annulus(&mut suite.rng, &v.map);
            let rho = v.map.forward(z).unwrap();
            let ts = TransformedState::new(rho, 0.0, 1.0);
            let (modulus, phi) = bridge::polar_actual(&v.map, &ts).unwrap();
            let oracle = v.map.inverse(rho).unwrap();
            worst = worst.max((modulus - oracle.norm()).abs());
            worst = worst.max(crate::angles::diff(phi, oracle.arg()).abs());
        }
    }
    let verdict = if worst <= 1e-10 {
        "closed-form |r|, phi AGREES with the inverse-map oracle"
    } else {
        "closed-form |r|, phi DISAGREES with the inverse-map oracle"
    };
    suite.push("inverse-polar-closed-form", worst, 1e-10, verdict.into());
}

fn reference_config(kind: RootKind) -> SimConfig {
    SimConfig {
        schema_version: 1,
        scene: Scene {
            inner: CircleSpec::new(0.0, 0.0, 1.0),
            outer: CircleSpec::new(0.5, 0.0, (2.5f64).sqrt()),
            desired: DesiredCircle::Inner,
        },
        root_kind: kind,
        r0: Complex64::new(-0.9, -0.6653),
        theta0_deg: -60.0,
        gains: ControlGains::default(),
        dt: 1e-3,
        t_final: 100.0,
        seed: 0,
        wheel_base: simulator::DEFAULT_WHEEL_BASE,
        monitors: None,
        control_per_stage: false,
    }
}

fn closed_loop_guarantees(suite: &mut Suite) {
    let mut worst_contain = f64::NEG_INFINITY;
    let mut worst_barrier = f64::NEG_INFINITY;
    let mut worst_blf = f64::NEG_INFINITY;
    let mut worst_bounds = f64::NEG_INFINITY;
    let mut worst_region = f64::NEG_INFINITY;
    let mut gaps = Vec::new();

    for kind in [RootKind::Smaller, RootKind::Larger] {
        let config = reference_config(kind);
        match simulator::run_transformed(&config) {
            Ok(rec) => {
                let m = &rec.summary.monitors;
                worst_contain = worst_contain.max(m.containment.worst);
                worst_barrier = worst_barrier.max(m.barrier.worst);
                worst_blf = worst_blf.max(m.blf_monotone.worst);
                worst_bounds = worst_bounds.max(m.signal_bounds.worst);
                worst_region = worst_region.max(m.transformed_region.worst);
                gaps.push(format!(
                    "{:.1e}",
                    rec.summary.cross_plane_gap.unwrap_or(f64::NAN)
                ));
            }
            Err(e) => {
                let msg = format!("run failed: {e}");
                for name in [
                    "containment-closed-loop",
                    "barrier-invariance-closed-loop",
                    "blf-monotone-closed-loop",
                    "signal-bounds-closed-loop",
                    "transformed-region-closed-loop",
                ] {
                    suite.push(name, f64::INFINITY, 0.0, msg.clone());
                }
                return;
            }
        }
    }

    let detail = format!(
        "reference runs, both roots; held-control phase drift between planes: {}",
        gaps.join(", ")
    );
    suite.push(
        "containment-closed-loop",
        worst_contain,
        0.0,
        detail.clone(),
    );
    suite.push(
        "barrier-invariance-closed-loop",
        worst_barrier,
        0.0,
        detail.clone(),
    );
    suite.push("blf-monotone-closed-loop", worst_blf, 0.0, detail.clone());
    suite.push(
        "signal-bounds-closed-loop",
        worst_bounds,
        0.0,
        detail.clone(),
    );
    suite.push("transformed-region-closed-loop", worst_region, 0.0, detail);
}

/// Dual-integration oracle: with stage-consistent control both planes
/// discretize exact images of the same flow, so their trajectories must
/// coincide to integrator accuracy.
fn dual_integration(suite: &mut Suite) {
    let mut config = reference_config(RootKind::Smaller);
    config.control_per_stage = true;
    match simulator::run_transformed(&config) {
        Ok(rec) => suite.push(
            "dual-integration-consistency",
            rec.summary.cross_plane_gap.unwrap_or(f64::INFINITY),
            1e-4,
            "transformed-plane run vs mapped actual-plane run, stage-wise control".into(),
        ),
        Err(e) => suite.push(
            "dual-integration-consistency",
            f64::INFINITY,
            1e-4,
            format!("run failed: {e}"),
        ),
    }
}

fn rk4_order(suite: &mut Suite) {
    // Stage-consistent control isolates the integrator order; held control
    // would dominate the shift with its own O(dt) sampling effect.
    let mut coarse_config = reference_config(RootKind::Smaller);
    coarse_config.control_per_stage = true;
    let mut fine_config = coarse_config.clone();
    fine_config.dt = 5e-4;
    let coarse = simulator::run(&coarse_config);
    let fine = simulator::run(&fine_config);
    match (coarse, fine) {
        (Ok(a), Ok(b)) => {
            let pa = a.samples.last().unwrap();
            let pb = b.samples.last().unwrap();
            let shift = Complex64::new(pa.x - pb.x, pa.y - pb.y).norm();
            suite.push(
                "rk4-step-halving",
                shift,
                1e-5,
                "final position shift between dt = 1e-3 and 5e-4".into(),
            );
        }
        _ => suite.push("rk4-step-halving", f64::INFINITY, 1e-5, "run failed".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let report = run_suite(&VerifyOptions {
            seed: 7,
            samples: 40,
            mutate: false,
        });
        assert!(report.all_passed(), "\n{report}");
    }

    #[test]
    fn mutation_is_detected() {
        let report = run_suite(&VerifyOptions {
            seed: 7,
            samples: 40,
            mutate: true,
        });
        let cross = report
            .results
            .iter()
            .find(|r| r.name.starts_with("cross-law-omega"))
            .unwrap();
        assert!(cross.passed, "self-test should detect the corruption");
        assert!(cross.worst > 1e-9);
    }
}
