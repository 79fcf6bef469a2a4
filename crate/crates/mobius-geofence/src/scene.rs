//! Scene description and normalization to the standard circle pair.
//!
//! A scene is two disjoint nested circles: the desired orbit and the
//! geofence boundary. Normalization (translate, rotate, scale) sends the
//! desired circle to `|z| = 1` and the boundary to `|z - lambda| = mu`
//! with `lambda > 0` real, which is the form the concentrizing map is
//! solved in.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angles;
use crate::error::{Error, Result};

/// Relative margin used to reject tangent or near-tangent circle pairs.
pub const DISJOINTNESS_MARGIN: f64 = 1e-6;

/// Threshold on the normalized center offset below which the pair is
/// treated as concentric and rejected.
pub const CONCENTRIC_TOL: f64 = 1e-9;

/// One circle of the scene file, SI meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSpec {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl CircleSpec {
    pub fn new(cx: f64, cy: f64, r: f64) -> Self {
        Self { cx, cy, r }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.cx, self.cy)
    }
}

/// Which of the two scene circles is the desired orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesiredCircle {
    Inner,
    Outer,
}

/// The raw circle pair, before any choice of desired orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub inner: CircleSpec,
    pub outer: CircleSpec,
}

/// On-disk scene object: `{inner: {cx, cy, r}, outer: {cx, cy, r}, desired: "inner"|"outer"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub inner: CircleSpec,
    pub outer: CircleSpec,
    pub desired: DesiredCircle,
}

impl Scene {
    pub fn spec(&self) -> SceneSpec {
        SceneSpec {
            inner: self.inner,
            outer: self.outer,
        }
    }

    pub fn desired_is_inner(&self) -> bool {
        self.desired == DesiredCircle::Inner
    }

    pub fn normalize(&self) -> Result<StandardScene> {
        normalize_scene(&self.spec(), self.desired_is_inner())
    }
}

/// Containment pattern of the normalized pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneCase {
    /// The boundary circle encircles the orbit: `mu > 1 + lambda`.
    BoundaryEncirclesOrbit,
    /// The orbit encircles the boundary circle: `mu < 1 - lambda`.
    OrbitEncirclesBoundary,
}

/// Invertible record of the similarity that standardized the scene.
///
/// Standardization applies, in order: translate by `-translation`, rotate
/// by `-rotation`, divide by `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub translation: Complex64,
    pub rotation: f64,
    pub scale: f64,
}

impl Normalization {
    pub fn identity() -> Self {
        Self {
            translation: Complex64::new(0.0, 0.0),
            rotation: 0.0,
            scale: 1.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.translation == Complex64::new(0.0, 0.0) && self.rotation == 0.0 && self.scale == 1.0
    }

    /// Original-plane point to standard-plane point.
    pub fn to_standard(&self, z: Complex64) -> Complex64 {
        (z - self.translation) * Complex64::from_polar(1.0, -self.rotation) / self.scale
    }

    /// Standard-plane point back to original coordinates.
    pub fn to_original(&self, z: Complex64) -> Complex64 {
        z * self.scale * Complex64::from_polar(1.0, self.rotation) + self.translation
    }

    /// Headings rotate with the frame; translation and scale leave them alone.
    pub fn heading_to_standard(&self, theta: f64) -> f64 {
        angles::wrap(theta - self.rotation)
    }

    pub fn heading_to_original(&self, theta: f64) -> f64 {
        angles::wrap(theta + self.rotation)
    }

    /// Linear speeds divide by the scale factor.
    pub fn speed_to_standard(&self, v: f64) -> f64 {
        v / self.scale
    }
}

/// Normalized circle pair: orbit `|z| = 1`, boundary `|z - lambda| = mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardScene {
    pub lambda: f64,
    pub mu: f64,
    pub case: SceneCase,
    pub normalization: Normalization,
}

/// Normalizes a scene, sending the desired circle to the unit circle and
/// the other circle onto the positive real axis.
pub fn normalize_scene(spec: &SceneSpec, desired_is_inner: bool) -> Result<StandardScene> {
    for c in [&spec.inner, &spec.outer] {
        if !(c.r > 0.0) || !c.r.is_finite() {
            return Err(Error::DegenerateRadius(c.r));
        }
    }

    let gap = (spec.inner.center() - spec.outer.center()).norm();
    let r_sum = spec.inner.r + spec.outer.r;
    let r_diff = (spec.inner.r - spec.outer.r).abs();
    let margin = DISJOINTNESS_MARGIN * spec.inner.r.max(spec.outer.r);

    let tangent = (gap - r_sum).abs() <= margin || (gap - r_diff).abs() <= margin;
    let intersecting = gap > r_diff && gap < r_sum;
    if tangent || intersecting {
        return Err(Error::TouchingOrIntersectingCircles {
            center_gap: gap,
            r_inner: spec.inner.r,
            r_outer: spec.outer.r,
        });
    }
    if gap > r_sum {
        // Disjoint side by side: no circle encloses the other, so there is
        // no annular corridor to fence the robot into.
        return Err(Error::SeparatedCircles);
    }

    let (orbit, boundary) = if desired_is_inner {
        (&spec.inner, &spec.outer)
    } else {
        (&spec.outer, &spec.inner)
    };

    let offset = boundary.center() - orbit.center();
    let translation = orbit.center();
    let rotation = if offset.norm() == 0.0 {
        0.0
    } else {
        offset.arg()
    };
    let scale = orbit.r;

    let lambda = offset.norm() / scale;
    let mu = boundary.r / scale;

    if lambda < CONCENTRIC_TOL {
        return Err(Error::ConcentricInput);
    }

    let case = if mu > 1.0 + lambda {
        SceneCase::BoundaryEncirclesOrbit
    } else if mu < 1.0 - lambda {
        SceneCase::OrbitEncirclesBoundary
    } else {
        // Unreachable for a disjoint nested pair; keep a hard failure in
        // case the margin logic above ever lets one slip through.
        return Err(Error::SeparatedCircles);
    };

    Ok(StandardScene {
        lambda,
        mu,
        case,
        normalization: Normalization {
            translation,
            rotation,
            scale,
        },
    })
}
