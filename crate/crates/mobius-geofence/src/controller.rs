//! Error vectors, barrier value, turn-rate laws, feasibility test and the
//! post-design bound report.
//!
//! The turn rate in the transformed plane is
//! `Omega = (|rho_dot| + kappa <rho, e^{i gamma}> / (dT^2 - |E|^2)) / sigma`;
//! the actual-plane law adds the map-curvature correction `chi_dot` and can
//! be evaluated from either plane's parameters. Both closed forms are kept
//! so they can be checked against each other.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bridge::{self, ActualState, TransformedState};
use crate::error::{Error, Result};
use crate::mobius::{MobiusMap, RootKind};
use crate::scene::SceneCase;

/// Floor on the barrier denominator; falling below it is treated as a
/// constraint breach instead of emitting an enormous turn rate.
pub const BARRIER_DENOM_FLOOR: f64 = 1e-12;

/// Barrier gain and constant forward speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlGains {
    pub kappa: f64,
    pub speed: f64,
}

impl Default for ControlGains {
    fn default() -> Self {
        Self {
            kappa: 0.02,
            speed: 1.0,
        }
    }
}

/// Orbit direction in the actual plane. The controller is wired for
/// anticlockwise orbits; the clockwise error branch exists for analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitDirection {
    Anticlockwise,
    Clockwise,
}

/// A turn-rate command with its additive pieces kept separate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlOutput {
    /// Mapped nominal-speed term.
    pub feedforward: f64,
    /// Barrier-gradient feedback term.
    pub barrier: f64,
    /// Map-curvature correction (`chi_dot`, or `-xi_dot`); zero for the
    /// transformed-plane law.
    pub correction: f64,
    pub total: f64,
}

impl ControlOutput {
    fn new(feedforward: f64, barrier: f64, correction: f64) -> Self {
        Self {
            feedforward,
            barrier,
            correction,
            total: feedforward + barrier + correction,
        }
    }
}

/// Real inner product of two complex numbers.
pub fn inner(a: Complex64, b: Complex64) -> f64 {
    (a.conj() * b).re
}

/// Actual-plane position error `r +/- i e^{i theta}`.
pub fn error_actual(s: &ActualState, direction: OrbitDirection) -> Complex64 {
    let tangent = Complex64::i() * Complex64::from_polar(1.0, s.heading);
    match direction {
        OrbitDirection::Anticlockwise => s.position + tangent,
        OrbitDirection::Clockwise => s.position - tangent,
    }
}

/// Transformed-plane position error `rho + i sigma e^{i gamma}`.
pub fn error_transformed(map: &MobiusMap, ts: &TransformedState) -> Complex64 {
    ts.position + Complex64::i() * map.sigma * Complex64::from_polar(1.0, ts.heading)
}

/// The same transformed error written in actual-plane parameters.
pub fn error_transformed_from_actual(map: &MobiusMap, s: &ActualState) -> Complex64 {
    let a = map.alpha;
    let u = 1.0 + a * s.position;
    let rho = a * (s.position + a) / u;
    let dir = map.sgn_delta() * (u.conj() / u) * Complex64::from_polar(1.0, s.heading);
    rho + Complex64::i() * map.sigma * dir
}

/// Both error vectors at one actual-plane state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    pub actual: Complex64,
    pub transformed: Complex64,
    pub transformed_abs: f64,
}

impl ErrorPair {
    pub fn at(map: &MobiusMap, s: &ActualState) -> Self {
        let transformed = error_transformed_from_actual(map, s);
        Self {
            actual: error_actual(s, OrbitDirection::Anticlockwise),
            transformed,
            transformed_abs: transformed.norm(),
        }
    }
}

/// Barrier-Lyapunov value `0.5 ln(dT^2 / (dT^2 - |E|^2))`.
pub fn blf(e_transformed: Complex64, delta_t: f64) -> Result<f64> {
    let m2 = e_transformed.norm_sqr();
    let d2 = delta_t * delta_t;
    if m2 >= d2 {
        return Err(Error::BarrierViolated {
            e_abs: m2.sqrt(),
            delta_t,
        });
    }
    Ok(0.5 * (d2 / (d2 - m2)).ln())
}

fn barrier_denominator(map: &MobiusMap, e_abs_sq: f64) -> Result<f64> {
    let den = map.delta_t * map.delta_t - e_abs_sq;
    if den < BARRIER_DENOM_FLOOR {
        return Err(Error::BarrierViolated {
            e_abs: e_abs_sq.sqrt(),
            delta_t: map.delta_t,
        });
    }
    Ok(den)
}

/// Transformed-plane turn-rate law.
pub fn omega_transformed(
    map: &MobiusMap,
    ts: &TransformedState,
    gains: &ControlGains,
) -> Result<ControlOutput> {
    let e = error_transformed(map, ts);
    let den = barrier_denominator(map, e.norm_sqr())?;
    let speed = bridge::transformed_speed(map, ts.position, gains.speed);
    let p = inner(ts.position, Complex64::from_polar(1.0, ts.heading));
    Ok(ControlOutput::new(
        speed / map.sigma,
        gains.kappa / map.sigma * p / den,
        0.0,
    ))
}

/// Actual-plane turn rate from actual-plane parameters.
pub fn omega_actual_from_actual(
    map: &MobiusMap,
    s: &ActualState,
    gains: &ControlGains,
) -> Result<ControlOutput> {
    let a = map.alpha;
    let gap = (s.position + map.beta).norm();
    if gap <= map.pole_tol {
        return Err(Error::NearPole {
            distance: gap,
            tol: map.pole_tol,
        });
    }
    let e = error_transformed_from_actual(map, s);
    let den = barrier_denominator(map, e.norm_sqr())?;

    let u = 1.0 + a * s.position;
    let feedforward = gains.speed / map.sigma * (a * (1.0 - a * a)).abs() / u.norm_sqr();
    let rho = a * (s.position + a) / u;
    let dir = map.sgn_delta() * (u.conj() / u) * Complex64::from_polar(1.0, s.heading);
    let barrier = gains.kappa / map.sigma * inner(rho, dir) / den;
    let correction = bridge::chi_dot(
        map,
        &ActualState {
            speed: gains.speed,
            ..*s
        },
    )?;
    Ok(ControlOutput::new(feedforward, barrier, correction))
}

/// Actual-plane turn rate from transformed-plane parameters.
pub fn omega_actual_from_transformed(
    map: &MobiusMap,
    ts: &TransformedState,
    gains: &ControlGains,
) -> Result<ControlOutput> {
    let gap = (ts.position - Complex64::new(1.0, 0.0)).norm();
    if gap <= map.pole_tol {
        return Err(Error::NearPole {
            distance: gap,
            tol: map.pole_tol,
        });
    }
    let e = error_transformed(map, ts);
    let den = barrier_denominator(map, e.norm_sqr())?;
    let speed = bridge::transformed_speed(map, ts.position, gains.speed);
    let p = inner(ts.position, Complex64::from_polar(1.0, ts.heading));
    Ok(ControlOutput::new(
        speed / map.sigma,
        gains.kappa / map.sigma * p / den,
        -bridge::xi_dot(map, ts, gains.speed),
    ))
}

/// Initial-condition feasibility test in actual-plane parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub eta_a: f64,
    pub eta_b: f64,
    pub eta: f64,
    /// `eta_a^2 + eta_b^2`.
    pub lhs: f64,
    /// `dT^2 eta^2`.
    pub rhs: f64,
    pub feasible: bool,
    pub e0_abs: f64,
    pub delta_t: f64,
}

/// Evaluates the start-state inequality `eta_a^2 + eta_b^2 < dT^2 eta^2`,
/// which is the barrier condition `|E(0)| < dT` cleared of denominators.
pub fn check_feasibility(map: &MobiusMap, r0: Complex64, theta0: f64) -> Result<FeasibilityReport> {
    let gap = (r0 + map.beta).norm();
    if gap <= map.pole_tol {
        return Err(Error::NearPole {
            distance: gap,
            tol: map.pole_tol,
        });
    }
    let a = map.alpha;
    let rm = r0.norm();
    let phi = if rm == 0.0 { 0.0 } else { r0.arg() };
    let ss = map.sigma * map.sgn_delta();

    let eta = (1.0 + a * r0).norm();
    let eta_a = a * a + a * rm * phi.cos() - ss * (theta0.sin() + a * rm * (theta0 - phi).sin());
    let eta_b = a * rm * phi.sin() + ss * (theta0.cos() + a * rm * (theta0 - phi).cos());
    let lhs = eta_a * eta_a + eta_b * eta_b;
    let rhs = map.delta_t * map.delta_t * eta * eta;

    let s = ActualState::new(r0, theta0, 1.0);
    let e0_abs = error_transformed_from_actual(map, &s).norm();

    Ok(FeasibilityReport {
        eta_a,
        eta_b,
        eta,
        lhs,
        rhs,
        feasible: lhs < rhs,
        e0_abs,
        delta_t: map.delta_t,
    })
}

/// Closed-form bounds on every post-design signal, fixed by the initial
/// barrier value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub s0: f64,
    /// `sqrt(1 - e^{-2 S(0)})`, in `[0, 1]`.
    pub theta: f64,
    /// Convex combination `(1 - Theta)|alpha| + Theta |(lambda+alpha)/mu|`.
    pub nu_plus: f64,
    /// Same with `Theta` negated.
    pub nu_minus: f64,
    /// `dT * Theta`, the tight error bound.
    pub e_bound: f64,
    pub rho_low: f64,
    pub rho_high: f64,
    pub omega_transformed_bound: f64,
    pub omega_actual_bound: f64,
    pub r_circle_center: Complex64,
    pub r_circle_radius: f64,
    /// True when the circle bound excludes (obstacle case) rather than
    /// contains the trajectory.
    pub r_circle_is_exclusion: bool,
}

impl BoundsReport {
    /// Whether an actual-plane point satisfies the circle bound, with an
    /// absolute slack for the start sample that sits exactly on it.
    pub fn r_circle_holds(&self, r: Complex64, slack: f64) -> bool {
        let d = (r - self.r_circle_center).norm();
        if self.r_circle_is_exclusion {
            d >= self.r_circle_radius - slack
        } else {
            d <= self.r_circle_radius + slack
        }
    }
}

/// Builds the bound report for a run whose initial barrier value is `s0`.
pub fn bounds_report(map: &MobiusMap, s0: f64, gains: &ControlGains) -> BoundsReport {
    let theta = (1.0 - (-2.0 * s0).exp()).max(0.0).sqrt();
    let nu_plus = (1.0 - theta) * map.orbit_radius + theta * map.boundary_radius;
    let nu_minus = (1.0 + theta) * map.orbit_radius - theta * map.boundary_radius;
    let (rho_low, rho_high) = if nu_plus <= nu_minus {
        (nu_plus, nu_minus)
    } else {
        (nu_minus, nu_plus)
    };

    let a = map.alpha;
    let abs_sigma = map.sigma.abs();
    let lead = gains.speed / abs_sigma * (a / (1.0 - a * a)).abs();
    let barrier_den = map.delta_t * map.delta_t * (1.0 - theta) * (1.0 - theta);
    let barrier_part = gains.kappa / abs_sigma * rho_high / barrier_den;
    let omega_transformed_bound = lead * (1.0 + rho_high) * (1.0 + rho_high) + barrier_part;
    let omega_actual_bound = lead
        * ((1.0 + abs_sigma + rho_high) * (1.0 + abs_sigma + rho_high) - abs_sigma * abs_sigma)
        + barrier_part;

    let np2 = nu_plus * nu_plus;
    let r_circle_center = Complex64::new(-(a * a - np2) / (a * (1.0 - np2)), 0.0);
    let r_circle_radius = (nu_plus * (1.0 - a * a) / (a * (1.0 - np2))).abs();

    BoundsReport {
        s0,
        theta,
        nu_plus,
        nu_minus,
        e_bound: map.delta_t * theta,
        rho_low,
        rho_high,
        omega_transformed_bound,
        omega_actual_bound,
        r_circle_center,
        r_circle_radius,
        r_circle_is_exclusion: map.case == SceneCase::OrbitEncirclesBoundary,
    }
}

/// Scans headings at a fixed start position, returning the feasible set as
/// closed intervals in degrees (step `step_deg`).
pub fn feasible_heading_intervals(
    map: &MobiusMap,
    r0: Complex64,
    step_deg: f64,
) -> Result<Vec<(f64, f64)>> {
    let steps = (360.0 / step_deg).round() as usize;
    let mut flags = Vec::with_capacity(steps);
    for k in 0..steps {
        let deg = -180.0 + k as f64 * step_deg;
        flags.push(check_feasibility(map, r0, deg.to_radians())?.feasible);
    }
    let mut intervals = Vec::new();
    let mut start = None;
    for (k, feasible) in flags.iter().enumerate() {
        match (feasible, start) {
            (true, None) => start = Some(-180.0 + k as f64 * step_deg),
            (false, Some(s)) => {
                intervals.push((s, -180.0 + (k as f64 - 1.0) * step_deg));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        intervals.push((s, -180.0 + (steps as f64 - 1.0) * step_deg));
    }
    // Merge a wrap-around pair into one interval crossing 180 degrees.
    if intervals.len() > 1 {
        let first = intervals[0];
        let last = *intervals.last().unwrap();
        if first.0 <= -180.0 + 1e-9 && last.1 >= 180.0 - step_deg - 1e-9 {
            intervals[0] = (last.0 - 360.0, first.1);
            intervals.pop();
        }
    }
    Ok(intervals)
}

/// Convenience: does the root kind pair with the expected problem flavor.
pub fn problem_label(kind: RootKind) -> &'static str {
    match kind {
        RootKind::Smaller => "trajectory-constraining",
        RootKind::Larger => "obstacle-avoidance",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::to_transformed;
    use crate::scene::{normalize_scene, CircleSpec, SceneSpec};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn map1(kind: RootKind) -> MobiusMap {
        let scene = normalize_scene(
            &SceneSpec {
                inner: CircleSpec::new(0.0, 0.0, 1.0),
                outer: CircleSpec::new(0.5, 0.0, (2.5f64).sqrt()),
            },
            true,
        )
        .unwrap();
        MobiusMap::for_scene(&scene, kind).unwrap()
    }

    fn initial_state() -> ActualState {
        ActualState::new(Complex64::new(-0.9, -0.6653), -60f64.to_radians(), 1.0)
    }

    #[test]
    fn actual_error_fixed_points() {
        let on_orbit = ActualState::new(Complex64::new(1.0, 0.0), FRAC_PI_2, 1.0);
        assert!(error_actual(&on_orbit, OrbitDirection::Anticlockwise).norm() < 1e-15);

        let at_origin = ActualState::new(Complex64::new(0.0, 0.0), 0.0, 1.0);
        let e = error_actual(&at_origin, OrbitDirection::Anticlockwise);
        assert!((e - Complex64::i()).norm() < 1e-15);
        let e = error_actual(&at_origin, OrbitDirection::Clockwise);
        assert!((e + Complex64::i()).norm() < 1e-15);

        // Regression: reported start state.
        let e = error_actual(&initial_state(), OrbitDirection::Anticlockwise);
        assert!((e.norm() - 0.16875533528754108).abs() < 1e-12);
    }

    #[test]
    fn transformed_error_routes_agree() {
        for kind in [RootKind::Smaller, RootKind::Larger] {
            let m = map1(kind);
            for (x, y, th) in [
                (-0.9, -0.6653, -FRAC_PI_3),
                (0.2, 0.8, 0.4),
                (1.1, -0.3, 2.0),
            ] {
                let s = ActualState::new(Complex64::new(x, y), th, 1.0);
                let via_actual = error_transformed_from_actual(&m, &s);
                let via_state = error_transformed(&m, &to_transformed(&m, &s).unwrap());
                assert!((via_actual - via_state).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn error_pair_bundles_both_planes() {
        let m = map1(RootKind::Smaller);
        let s = initial_state();
        let pair = ErrorPair::at(&m, &s);
        assert_eq!(pair.actual, error_actual(&s, OrbitDirection::Anticlockwise));
        assert_eq!(pair.transformed, error_transformed_from_actual(&m, &s));
        assert_eq!(pair.transformed_abs, pair.transformed.norm());
        assert!(pair.transformed_abs < m.delta_t);
    }

    #[test]
    fn initial_error_magnitudes() {
        let e = error_transformed_from_actual(&map1(RootKind::Smaller), &initial_state());
        assert!((e.norm() - 0.106).abs() < 5e-4);
        assert!((e.norm() - 0.10594673880539603).abs() < 1e-12);

        let e = error_transformed_from_actual(&map1(RootKind::Larger), &initial_state());
        assert!((e.norm() - 0.3509).abs() < 5e-5);
    }

    #[test]
    fn equilibrium_error_is_zero() {
        // rho = -i sigma e^{i gamma} zeroes the transformed error.
        let m = map1(RootKind::Larger);
        let gamma = 0.3;
        let rho = -Complex64::i() * m.sigma * Complex64::from_polar(1.0, gamma);
        let ts = TransformedState::new(rho, gamma, 1.0);
        assert!(error_transformed(&m, &ts).norm() < 1e-15);
    }

    #[test]
    fn blf_values_and_violation() {
        let d = 0.5;
        assert_eq!(blf(Complex64::new(0.0, 0.0), d).unwrap(), 0.0);

        // |E| = d sqrt(1 - e^{-2}) gives exactly S = 1.
        let e = d * (1.0 - (-2.0f64).exp()).sqrt();
        assert!((blf(Complex64::new(e, 0.0), d).unwrap() - 1.0).abs() < 1e-12);

        assert!(matches!(
            blf(Complex64::new(0.5, 0.0), d),
            Err(Error::BarrierViolated { .. })
        ));

        // Reported start state: frozen full-precision barrier value.
        let m = map1(RootKind::Smaller);
        let e = error_transformed_from_actual(&m, &initial_state());
        let s0 = blf(e, m.delta_t).unwrap();
        assert!((s0 - 0.5105290026221777).abs() < 1e-12);
    }

    #[test]
    fn omega_transformed_equilibrium_and_sign() {
        let gains = ControlGains::default();
        for kind in [RootKind::Smaller, RootKind::Larger] {
            let m = map1(kind);
            let gamma = -0.7;
            let rho = -Complex64::i() * m.sigma * Complex64::from_polar(1.0, gamma);
            let ts = TransformedState::new(rho, gamma, 1.0);
            let out = omega_transformed(&m, &ts, &gains).unwrap();
            let speed = bridge::transformed_speed(&m, rho, gains.speed);
            assert!((out.total - speed / m.sigma).abs() < 1e-12);
            assert!(out.barrier.abs() < 1e-12);
            // sigma's sign decides the feedforward sign.
            assert_eq!(
                out.feedforward.is_sign_positive(),
                kind == RootKind::Smaller
            );
        }
    }

    #[test]
    fn control_values_at_reported_start() {
        let gains = ControlGains::default();
        let s = initial_state();

        let m = map1(RootKind::Smaller);
        let ts = to_transformed(&m, &s).unwrap();
        let omega = omega_actual_from_actual(&m, &s, &gains).unwrap();
        assert!((omega.total - 0.9194818894811029).abs() < 1e-10);
        let cap = omega_transformed(&m, &ts, &gains).unwrap();
        assert!((cap.total - 1.6697770690253901).abs() < 1e-10);

        let m = map1(RootKind::Larger);
        let omega = omega_actual_from_actual(&m, &s, &gains).unwrap();
        assert!((omega.total - 0.9970685361274729).abs() < 1e-10);
    }

    #[test]
    fn cross_law_equality() {
        let gains = ControlGains::default();
        for kind in [RootKind::Smaller, RootKind::Larger] {
            let m = map1(kind);
            for k in 0..60 {
                let r = Complex64::from_polar(0.6 + 0.012 * k as f64, -3.0 + 0.1 * k as f64);
                let s = ActualState::new(r, 0.21 * k as f64, 1.0);
                if error_transformed_from_actual(&m, &s).norm() >= 0.98 * m.delta_t {
                    continue;
                }
                let from_actual = omega_actual_from_actual(&m, &s, &gains).unwrap();
                let ts = to_transformed(&m, &s).unwrap();
                let from_transformed = omega_actual_from_transformed(&m, &ts, &gains).unwrap();
                assert!(
                    (from_actual.total - from_transformed.total).abs() < 1e-9,
                    "kind {kind:?} k {k}"
                );
                // Decomposition: omega - Omega equals the curvature term on
                // both sides.
                let cap = omega_transformed(&m, &ts, &gains).unwrap();
                assert!((from_actual.total - cap.total - from_actual.correction).abs() < 1e-9);
                assert!((from_transformed.correction - from_actual.correction).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn steady_state_turn_rate_is_unity() {
        let gains = ControlGains::default();
        for kind in [RootKind::Smaller, RootKind::Larger] {
            let m = map1(kind);
            let t = 0.4;
            let s = ActualState::new(Complex64::from_polar(1.0, t), t + FRAC_PI_2, 1.0);
            let out = omega_actual_from_actual(&m, &s, &gains).unwrap();
            assert!((out.total - 1.0).abs() < 1e-12, "kind {kind:?}");
        }
    }

    #[test]
    fn feasibility_reproduces_reported_numbers() {
        let r0 = Complex64::new(-0.9, -0.6653);
        let th0 = -60f64.to_radians();

        let rep = check_feasibility(&map1(RootKind::Smaller), r0, th0).unwrap();
        assert!((rep.eta_a + 0.045).abs() < 5e-4);
        assert!((rep.eta_b + 0.0511).abs() < 5e-5);
        assert!((rep.eta - 0.6428).abs() < 5e-5);
        assert!((rep.lhs - 0.0046).abs() < 5e-5);
        assert!((rep.rhs - 0.0072).abs() < 5e-5);
        assert!(rep.feasible);

        let rep = check_feasibility(&map1(RootKind::Larger), r0, th0).unwrap();
        assert!((rep.eta_a + 0.5162).abs() < 5e-5);
        assert!((rep.eta_b - 0.1741).abs() < 5e-5);
        assert!((rep.eta - 1.5526).abs() < 5e-5);
        assert!((rep.lhs - 0.2968).abs() < 5e-5);
        assert!((rep.rhs - 0.4229).abs() < 5e-5);
        assert!(rep.feasible);

        // Antipodal heading falls outside the feasible window.
        let rep =
            check_feasibility(&map1(RootKind::Smaller), r0, th0 + std::f64::consts::PI).unwrap();
        assert!(!rep.feasible);
    }

    #[test]
    fn feasibility_window_excludes_antipodal_heading() {
        let m = map1(RootKind::Smaller);
        let r0 = Complex64::new(-0.9, -0.6653);
        let intervals = feasible_heading_intervals(&m, r0, 1.0).unwrap();
        assert!(!intervals.is_empty());
        let inside = |deg: f64| {
            intervals.iter().any(|(lo, hi)| {
                (deg >= *lo && deg <= *hi) || (deg - 360.0 >= *lo && deg - 360.0 <= *hi)
            })
        };
        assert!(inside(-60.0));
        assert!(!inside(120.0));
    }

    #[test]
    fn feasibility_equivalence_on_a_grid() {
        for kind in [RootKind::Smaller, RootKind::Larger] {
            let m = map1(kind);
            for i in 0..40 {
                for j in 0..25 {
                    let r0 = Complex64::from_polar(0.2 + 0.035 * i as f64, 0.251 * j as f64);
                    let th0 = -3.0 + 0.24 * (i + j) as f64;
                    if (r0 - Complex64::new(m.lambda, 0.0)).norm() >= m.mu {
                        continue;
                    }
                    let rep = check_feasibility(&m, r0, th0).unwrap();
                    assert_eq!(
                        rep.feasible,
                        rep.e0_abs < m.delta_t,
                        "kind {kind:?} i {i} j {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn bounds_report_collapses_at_zero() {
        let m = map1(RootKind::Smaller);
        let b = bounds_report(&m, 0.0, &ControlGains::default());
        assert_eq!(b.theta, 0.0);
        assert!((b.nu_plus - m.orbit_radius).abs() < 1e-15);
        assert!((b.nu_minus - m.orbit_radius).abs() < 1e-15);
        assert_eq!(b.e_bound, 0.0);
        assert!((b.rho_high - b.rho_low).abs() < 1e-15);
        // Circle bound degenerates to the desired unit circle.
        assert!(b.r_circle_center.norm() < 1e-15);
        assert!((b.r_circle_radius - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_report_reaches_scene_circle_at_full_theta() {
        for kind in [RootKind::Smaller, RootKind::Larger] {
            let m = map1(kind);
            // Theta = 1 needs S0 = inf; drive it numerically instead.
            let b = bounds_report(&m, 400.0, &ControlGains::default());
            assert!((b.theta - 1.0).abs() < 1e-12);
            assert!((b.nu_plus - m.boundary_radius).abs() < 1e-9);
            assert!(
                (b.r_circle_center.re - m.lambda).abs() < 1e-6,
                "kind {kind:?}"
            );
            assert!((b.r_circle_radius - m.mu).abs() < 1e-6);
        }
    }

    #[test]
    fn circle_bound_orientation_follows_case() {
        let gains = ControlGains::default();
        // Fenced scene: the circle bound contains the trajectory.
        let b = bounds_report(&map1(RootKind::Smaller), 0.5, &gains);
        assert!(!b.r_circle_is_exclusion);
        assert!(b.r_circle_holds(b.r_circle_center, 0.0));
        let outside = b.r_circle_center + Complex64::new(1.01 * b.r_circle_radius, 0.0);
        assert!(!b.r_circle_holds(outside, 1e-9));

        // Obstacle scene: the circle bound excludes a disk around it.
        let scene = normalize_scene(
            &SceneSpec {
                inner: CircleSpec::new(0.4, 0.0, 0.4),
                outer: CircleSpec::new(0.0, 0.0, 1.0),
            },
            false,
        )
        .unwrap();
        let m = MobiusMap::for_scene(&scene, RootKind::Smaller).unwrap();
        let b = bounds_report(&m, 0.5, &gains);
        assert!(b.r_circle_is_exclusion);
        assert!(!b.r_circle_holds(b.r_circle_center, 1e-9));
        let outside = b.r_circle_center + Complex64::new(1.01 * b.r_circle_radius, 0.0);
        assert!(b.r_circle_holds(outside, 0.0));
    }

    #[test]
    fn bounds_interval_ordering_follows_kind() {
        let gains = ControlGains::default();
        let m = map1(RootKind::Smaller);
        let b = bounds_report(&m, 0.5105290026221777, &gains);
        assert!((b.theta - 0.7998664697406509).abs() < 1e-12);
        assert_eq!(b.rho_low, b.nu_minus);
        assert_eq!(b.rho_high, b.nu_plus);

        let m = map1(RootKind::Larger);
        let b = bounds_report(&m, 0.6050203697568801, &gains);
        assert_eq!(b.rho_low, b.nu_plus);
        assert_eq!(b.rho_high, b.nu_minus);
    }
}
