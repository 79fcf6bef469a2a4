//! The concentrizing Möbius map `w = alpha (z + alpha) / (1 + alpha z)`.
//!
//! For a standard scene (unit orbit circle, boundary `|z - lambda| = mu`)
//! the real parameter `alpha` solves
//! `lambda a^2 + (lambda^2 - mu^2 + 1) a + lambda = 0`; both roots send the
//! circle pair to circles centered at the origin. The magnitude-smaller
//! root preserves the interior/exterior layout of the enclosed regions,
//! the larger one reverses it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{SceneCase, StandardScene};

/// Default distance below which evaluation near a map pole is refused.
pub const POLE_TOL: f64 = 1e-9;

/// Default tolerance on the radius residual for on-circle classification.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Which root of the concentrizing quadratic backs the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootKind {
    Smaller,
    Larger,
}

/// Plane selector for region queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Actual,
    Transformed,
}

/// Location of a point relative to the nested circle pair of a plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Strictly inside the inner circle of the pair.
    InsideInner,
    /// Strictly between the two circles.
    Annulus,
    /// Strictly outside the outer circle of the pair.
    OutsideOuter,
    /// On the desired-orbit circle (within tolerance).
    OnOrbit,
    /// On the constraint circle (within tolerance).
    OnBoundary,
}

/// Solves the concentrizing quadratic, returning `(smaller, larger)` roots
/// by magnitude.
///
/// The larger-magnitude root is computed with the sign-aware quadratic
/// formula and the other obtained as its reciprocal, so the product of the
/// returned pair is exactly one.
pub fn solve_roots(scene: &StandardScene) -> Result<(f64, f64)> {
    let b = (scene.lambda * scene.lambda - scene.mu * scene.mu + 1.0) / scene.lambda;
    let discriminant = b * b - 4.0;
    if discriminant < 0.0 {
        return Err(Error::ComplexRoots { discriminant });
    }
    let larger = -(b + b.signum() * discriminant.sqrt()) / 2.0;
    if (larger.abs() - 1.0).abs() < 1e-9 {
        return Err(Error::UnitRoot);
    }
    Ok((1.0 / larger, larger))
}

/// The fitted map for one scene and one root choice, with every derived
/// constant the controller needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub alpha: f64,
    /// `1 / alpha`; the actual-plane pole sits at `-beta`.
    pub beta: f64,
    pub kind: RootKind,
    pub lambda: f64,
    pub mu: f64,
    pub case: SceneCase,
    /// Signed orbit radius: `+|alpha|` for the smaller root, `-|alpha|`
    /// for the larger, encoding the induced rotation sense.
    pub sigma: f64,
    /// Radius of the mapped orbit circle, `|alpha|`.
    pub orbit_radius: f64,
    /// Radius of the mapped constraint circle, `|(lambda + alpha) / mu|`.
    pub boundary_radius: f64,
    /// Uniform radial gap between the two mapped circles.
    pub delta_t: f64,
    pub pole_tol: f64,
    pub boundary_tol: f64,
}

impl MobiusMap {
    /// Builds the map for `scene` using the requested root.
    pub fn for_scene(scene: &StandardScene, kind: RootKind) -> Result<Self> {
        let (alpha_s, alpha_l) = solve_roots(scene)?;
        let alpha = match kind {
            RootKind::Smaller => alpha_s,
            RootKind::Larger => alpha_l,
        };
        let beta = 1.0 / alpha;

        let orbit_radius = alpha.abs();
        let boundary_radius = ((scene.lambda + alpha) / scene.mu).abs();
        // The mapped gap is uniform; which circle sits inside depends on the
        // containment case and on whether the root preserves or reverses it.
        let delta_t = match (scene.case, kind) {
            (SceneCase::BoundaryEncirclesOrbit, RootKind::Smaller)
            | (SceneCase::OrbitEncirclesBoundary, RootKind::Larger) => {
                boundary_radius - orbit_radius
            }
            (SceneCase::BoundaryEncirclesOrbit, RootKind::Larger)
            | (SceneCase::OrbitEncirclesBoundary, RootKind::Smaller) => {
                orbit_radius - boundary_radius
            }
        };
        debug_assert!(delta_t > 0.0, "mapped circles must be separated");

        let sigma = match kind {
            RootKind::Smaller => orbit_radius,
            RootKind::Larger => -orbit_radius,
        };

        let map = Self {
            alpha,
            beta,
            kind,
            lambda: scene.lambda,
            mu: scene.mu,
            case: scene.case,
            sigma,
            orbit_radius,
            boundary_radius,
            delta_t,
            pole_tol: POLE_TOL,
            boundary_tol: BOUNDARY_TOL,
        };
        map.validate()?;
        Ok(map)
    }

    fn validate(&self) -> Result<()> {
        let mu_sq = (self.lambda + self.alpha) * (self.lambda + self.beta);
        if (mu_sq - self.mu * self.mu).abs() > 1e-9 * self.mu * self.mu {
            return Err(Error::ComplexRoots {
                discriminant: mu_sq - self.mu * self.mu,
            });
        }
        if 1.0 + self.alpha * self.lambda <= 0.0 {
            return Err(Error::UnitRoot);
        }
        // The pole -beta never lies in the closed region between the two
        // circles (connectedness argument); feasible trajectories cannot
        // reach it, so individual calls only keep the cheap tolerance guard.
        debug_assert!(!self.pole_in_between_region());
        Ok(())
    }

    fn pole_in_between_region(&self) -> bool {
        let pole = Complex64::new(-self.beta, 0.0);
        let d_orbit = pole.norm();
        let d_boundary = (pole - Complex64::new(self.lambda, 0.0)).norm();
        match self.case {
            SceneCase::BoundaryEncirclesOrbit => d_orbit >= 1.0 && d_boundary <= self.mu,
            SceneCase::OrbitEncirclesBoundary => d_orbit <= 1.0 && d_boundary >= self.mu,
        }
    }

    /// Root gap `beta - alpha`.
    pub fn delta_diff(&self) -> f64 {
        self.beta - self.alpha
    }

    /// Sign of `beta - alpha`, the orientation factor of the mapped heading.
    pub fn sgn_delta(&self) -> f64 {
        if self.beta > self.alpha {
            1.0
        } else {
            -1.0
        }
    }

    /// Actual plane to transformed plane.
    pub fn forward(&self, z: Complex64) -> Result<Complex64> {
        let gap = (z + self.beta).norm();
        if gap <= self.pole_tol {
            return Err(Error::NearPole {
                distance: gap,
                tol: self.pole_tol,
            });
        }
        Ok(self.alpha * (z + self.alpha) / (1.0 + self.alpha * z))
    }

    /// Transformed plane back to the actual plane.
    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        let gap = (w - Complex64::new(1.0, 0.0)).norm();
        if gap <= self.pole_tol {
            return Err(Error::NearPole {
                distance: gap,
                tol: self.pole_tol,
            });
        }
        Ok((self.alpha * self.alpha - w) / (self.alpha * (w - 1.0)))
    }

    /// Closed-form derivative `dw/dz = alpha (1 - alpha^2) / (1 + alpha z)^2`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let gap = (z + self.beta).norm();
        if gap <= self.pole_tol {
            return Err(Error::NearPole {
                distance: gap,
                tol: self.pole_tol,
            });
        }
        let den = 1.0 + self.alpha * z;
        Ok(self.alpha * (1.0 - self.alpha * self.alpha) / (den * den))
    }

    /// Radius residuals of `point` against the orbit and boundary circles
    /// of the chosen plane (negative = inside the circle).
    fn residuals(&self, point: Complex64, plane: Plane) -> (f64, f64) {
        match plane {
            Plane::Actual => (
                point.norm() - 1.0,
                (point - Complex64::new(self.lambda, 0.0)).norm() - self.mu,
            ),
            Plane::Transformed => (
                point.norm() - self.orbit_radius,
                point.norm() - self.boundary_radius,
            ),
        }
    }

    /// Classifies a point against the nested circle pair of a plane.
    pub fn classify_region(&self, point: Complex64, plane: Plane) -> Region {
        let (res_orbit, res_boundary) = self.residuals(point, plane);
        if res_orbit.abs() <= self.boundary_tol {
            return Region::OnOrbit;
        }
        if res_boundary.abs() <= self.boundary_tol {
            return Region::OnBoundary;
        }
        match (res_orbit < 0.0, res_boundary < 0.0) {
            (true, true) => Region::InsideInner,
            (false, false) => Region::OutsideOuter,
            _ => Region::Annulus,
        }
    }

    /// How a region label transports through `forward` for this root.
    pub fn map_region(&self, region: Region) -> Region {
        match (self.kind, region) {
            (RootKind::Larger, Region::InsideInner) => Region::OutsideOuter,
            (RootKind::Larger, Region::OutsideOuter) => Region::InsideInner,
            (_, r) => r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{normalize_scene, CircleSpec, SceneSpec};

    pub(crate) fn example1() -> StandardScene {
        normalize_scene(
            &SceneSpec {
                inner: CircleSpec::new(0.0, 0.0, 1.0),
                outer: CircleSpec::new(0.5, 0.0, (2.5f64).sqrt()),
            },
            true,
        )
        .unwrap()
    }

    pub(crate) fn example2() -> StandardScene {
        normalize_scene(
            &SceneSpec {
                inner: CircleSpec::new(0.4, 0.0, 0.4),
                outer: CircleSpec::new(0.0, 0.0, 1.0),
            },
            false,
        )
        .unwrap()
    }

    #[test]
    fn roots_of_both_examples() {
        let (s, l) = solve_roots(&example1()).unwrap();
        assert!((s - 0.5).abs() < 1e-12 && (l - 2.0).abs() < 1e-12);
        assert!((s * l - 1.0).abs() < 1e-15);

        let (s, l) = solve_roots(&example2()).unwrap();
        assert!((s + 0.5).abs() < 1e-12 && (l + 2.0).abs() < 1e-12);
        assert!((s * l - 1.0).abs() < 1e-15);
    }

    #[test]
    fn touching_scene_yields_unit_root() {
        // mu = 1 + lambda puts a circle through the pole; normalize_scene
        // rejects this earlier, so build the standard form by hand.
        let scene = StandardScene {
            lambda: 0.5,
            mu: 1.5,
            case: SceneCase::BoundaryEncirclesOrbit,
            normalization: crate::scene::Normalization::identity(),
        };
        assert_eq!(solve_roots(&scene), Err(Error::UnitRoot));
    }

    #[test]
    fn intersecting_scene_yields_complex_roots() {
        let scene = StandardScene {
            lambda: 0.5,
            mu: 1.0,
            case: SceneCase::BoundaryEncirclesOrbit,
            normalization: crate::scene::Normalization::identity(),
        };
        assert!(matches!(
            solve_roots(&scene),
            Err(Error::ComplexRoots { .. })
        ));
    }

    #[test]
    fn mapped_radii_and_gap() {
        let m = MobiusMap::for_scene(&example1(), RootKind::Smaller).unwrap();
        assert!((m.orbit_radius - 0.5).abs() < 1e-12);
        assert!((m.boundary_radius - (0.4f64).sqrt()).abs() < 1e-12);
        assert!((m.delta_t - 0.1324555320336759).abs() < 1e-12);
        assert!((m.sigma - 0.5).abs() < 1e-12);
        assert_eq!(m.sgn_delta(), 1.0);

        let m = MobiusMap::for_scene(&example1(), RootKind::Larger).unwrap();
        assert!((m.orbit_radius - 2.0).abs() < 1e-12);
        assert!((m.boundary_radius - (2.5f64).sqrt()).abs() < 1e-12);
        assert!((m.delta_t - 0.4188611699158102).abs() < 1e-12);
        assert!((m.sigma + 2.0).abs() < 1e-12);
        assert_eq!(m.sgn_delta(), -1.0);

        // Second containment case: smaller root, orbit circle now maps to
        // the outer one of the pair.
        let m = MobiusMap::for_scene(&example2(), RootKind::Smaller).unwrap();
        assert!((m.orbit_radius - 0.5).abs() < 1e-12);
        assert!((m.boundary_radius - 0.25).abs() < 1e-12);
        assert!(m.orbit_radius > m.boundary_radius);
        assert!((m.delta_t - 0.25).abs() < 1e-12);
    }

    #[test]
    fn forward_fixed_values() {
        let m = MobiusMap::for_scene(&example1(), RootKind::Smaller).unwrap();
        let w = m.forward(Complex64::new(1.0, 0.0)).unwrap();
        assert!((w - Complex64::new(m.alpha, 0.0)).norm() < 1e-15);
        let w = m.forward(Complex64::new(-m.alpha, 0.0)).unwrap();
        assert!(w.norm() < 1e-15);

        let w = m.forward(Complex64::new(-0.9, -0.6653)).unwrap();
        assert!((w.re - 0.0016).abs() < 5e-4);
        assert!((w.im + 0.6039).abs() < 5e-4);
    }

    #[test]
    fn inverse_fixed_values() {
        let m = MobiusMap::for_scene(&example1(), RootKind::Smaller).unwrap();
        let z = m.inverse(Complex64::new(m.alpha, 0.0)).unwrap();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let z = m.inverse(Complex64::new(0.0, 0.0)).unwrap();
        assert!((z + Complex64::new(m.alpha, 0.0)).norm() < 1e-15);

        // Feeding back the 4-decimal forward image recovers the preimage to
        // the same print precision.
        let z = m.inverse(Complex64::new(0.0016, -0.6039)).unwrap();
        assert!((z.re + 0.9).abs() < 5e-4);
        assert!((z.im + 0.6653).abs() < 5e-4);
    }

    #[test]
    fn pole_guards() {
        let m = MobiusMap::for_scene(&example1(), RootKind::Smaller).unwrap();
        assert!(matches!(
            m.forward(Complex64::new(-m.beta, 0.0)),
            Err(Error::NearPole { .. })
        ));
        assert!(matches!(
            m.inverse(Complex64::new(1.0, 0.0)),
            Err(Error::NearPole { .. })
        ));
    }

    #[test]
    fn region_classification_commutes_per_root() {
        let m_s = MobiusMap::for_scene(&example1(), RootKind::Smaller).unwrap();
        let m_l = MobiusMap::for_scene(&example1(), RootKind::Larger).unwrap();

        let z = Complex64::new(0.0, 0.0);
        assert_eq!(m_s.classify_region(z, Plane::Actual), Region::InsideInner);
        let w = m_s.forward(z).unwrap();
        assert!((w - Complex64::new(0.25, 0.0)).norm() < 1e-12);
        assert_eq!(
            m_s.classify_region(w, Plane::Transformed),
            Region::InsideInner
        );

        let w = m_l.forward(z).unwrap();
        assert!((w - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        assert_eq!(
            m_l.classify_region(w, Plane::Transformed),
            Region::OutsideOuter
        );

        // Points on the orbit stay on the orbit in both planes.
        let on = Complex64::from_polar(1.0, 0.83);
        assert_eq!(m_s.classify_region(on, Plane::Actual), Region::OnOrbit);
        assert_eq!(
            m_s.classify_region(m_s.forward(on).unwrap(), Plane::Transformed),
            Region::OnOrbit
        );
        assert_eq!(
            m_l.classify_region(m_l.forward(on).unwrap(), Plane::Transformed),
            Region::OnOrbit
        );
    }

    #[test]
    fn mu_square_identity_holds_for_both_roots() {
        for scene in [example1(), example2()] {
            for kind in [RootKind::Smaller, RootKind::Larger] {
                let m = MobiusMap::for_scene(&scene, kind).unwrap();
                let lhs = m.mu * m.mu;
                let rhs = (m.lambda + m.alpha) * (m.lambda + m.beta);
                assert!((lhs - rhs).abs() < 1e-12, "kind {kind:?}");
            }
        }
    }
}
