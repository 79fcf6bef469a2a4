//! Kinematic state conversion between the actual and transformed planes.
//!
//! Positions map through the Möbius map; headings map through the unit
//! vector of the image velocity, which picks the exact branch that the
//! mod-pi relations `gamma = theta - chi` and `theta = gamma - xi` leave
//! open. Speeds map through the conformal stretch factor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angles;
use crate::error::{Error, Result};
use crate::mobius::MobiusMap;

/// Robot state in the actual plane: position, heading, forward speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActualState {
    pub position: Complex64,
    pub heading: f64,
    pub speed: f64,
}

impl ActualState {
    pub fn new(position: Complex64, heading: f64, speed: f64) -> Self {
        Self {
            position,
            heading: angles::wrap(heading),
            speed,
        }
    }

    pub fn radius(&self) -> f64 {
        self.position.norm()
    }

    /// Position angle, zero at the origin by convention.
    pub fn polar_angle(&self) -> f64 {
        if self.position.norm() == 0.0 {
            0.0
        } else {
            self.position.arg()
        }
    }

    pub fn velocity(&self) -> Complex64 {
        self.speed * Complex64::from_polar(1.0, self.heading)
    }
}

/// Virtual robot state in the transformed plane; `speed` is the image
/// speed, which varies with position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformedState {
    pub position: Complex64,
    pub heading: f64,
    pub speed: f64,
}

impl TransformedState {
    pub fn new(position: Complex64, heading: f64, speed: f64) -> Self {
        Self {
            position,
            heading: angles::wrap(heading),
            speed,
        }
    }

    pub fn radius(&self) -> f64 {
        self.position.norm()
    }

    pub fn polar_angle(&self) -> f64 {
        if self.position.norm() == 0.0 {
            0.0
        } else {
            self.position.arg()
        }
    }
}

/// Image speed written in actual-plane parameters:
/// `|alpha (1 - alpha^2) / (1 + alpha r)^2| v`.
pub fn transformed_speed_from_actual(map: &MobiusMap, r: Complex64, v: f64) -> f64 {
    let a = map.alpha;
    (a * (1.0 - a * a)).abs() / (1.0 + a * r).norm_sqr() * v
}

/// Image speed written in transformed-plane parameters:
/// `|alpha (rho - 1)^2 / (1 - alpha^2)| v`.
pub fn transformed_speed(map: &MobiusMap, rho: Complex64, v: f64) -> f64 {
    let a = map.alpha;
    (a / (1.0 - a * a)).abs() * (rho - 1.0).norm_sqr() * v
}

/// Maps a full actual-plane state into the transformed plane.
pub fn to_transformed(map: &MobiusMap, s: &ActualState) -> Result<TransformedState> {
    let rho = map.forward(s.position)?;
    let u = 1.0 + map.alpha * s.position;
    let dir = map.sgn_delta() * (u.conj() / u) * Complex64::from_polar(1.0, s.heading);
    Ok(TransformedState::new(
        rho,
        dir.arg(),
        transformed_speed_from_actual(map, s.position, s.speed),
    ))
}

/// Maps a transformed-plane state back, reattaching the forward speed `v`.
pub fn to_actual(map: &MobiusMap, s: &TransformedState, v: f64) -> Result<ActualState> {
    let r = map.inverse(s.position)?;
    let u = 1.0 + map.alpha * r;
    let dir = map.sgn_delta() * (u / u.conj()) * Complex64::from_polar(1.0, s.heading);
    Ok(ActualState::new(r, dir.arg(), v))
}

/// Heading offset `chi` between the two planes, from the actual side.
pub fn chi(map: &MobiusMap, s: &ActualState) -> Result<f64> {
    let a = map.alpha;
    let rm = s.radius();
    let phi = s.polar_angle();
    let f1 = 1.0 + 2.0 * a * rm * phi.cos() + a * a * rm * rm * (2.0 * phi).cos();
    let f2 = 2.0 * a * rm * phi.sin() + a * a * rm * rm * (2.0 * phi).sin();
    if f1 * f1 + f2 * f2 < 1e-18 {
        return Err(Error::DegenerateAngle);
    }
    Ok(f2.atan2(f1))
}

/// Rate of `chi` along the actual-plane motion.
pub fn chi_dot(map: &MobiusMap, s: &ActualState) -> Result<f64> {
    let gap = (s.position + map.beta).norm();
    if gap <= map.pole_tol {
        return Err(Error::NearPole {
            distance: gap,
            tol: map.pole_tol,
        });
    }
    let a = map.alpha;
    let rm = s.radius();
    let phi = s.polar_angle();
    let theta = s.heading;
    let den = (1.0 + a * s.position).norm_sqr();
    Ok(2.0 * a * s.speed * (theta.sin() + a * rm * (theta - phi).sin()) / den)
}

/// Heading offset `xi` between the two planes, from the transformed side.
pub fn xi(_map: &MobiusMap, s: &TransformedState) -> Result<f64> {
    let rm = s.radius();
    let psi = s.polar_angle();
    let g1 = 1.0 + rm * rm * (2.0 * psi).cos() - 2.0 * rm * psi.cos();
    let g2 = rm * rm * (2.0 * psi).sin() - 2.0 * rm * psi.sin();
    if g1 * g1 + g2 * g2 < 1e-18 {
        return Err(Error::DegenerateAngle);
    }
    Ok(g2.atan2(g1))
}

/// Rate of `xi` along the transformed-plane motion at forward speed `v`.
///
/// The leading factor is `|alpha / (1 - alpha^2)|`: it comes from the
/// image-speed modulus, so it is nonnegative for either root sign. Writing
/// it signed flips the rate whenever `beta - alpha < 0` (finite-difference
/// check in the verify suite pins this down).
pub fn xi_dot(map: &MobiusMap, s: &TransformedState, v: f64) -> f64 {
    let a = map.alpha;
    let rm = s.radius();
    let psi = s.polar_angle();
    let gamma = s.heading;
    2.0 * v * (a / (1.0 - a * a)).abs() * (rm * (gamma - psi).sin() - gamma.sin())
}

/// Rate of the actual position angle: `v sin(theta - phi) / |r|`.
pub fn phi_dot(s: &ActualState) -> Result<f64> {
    let rm = s.radius();
    if rm <= 1e-12 {
        return Err(Error::OriginSingularity(rm));
    }
    Ok(s.speed * (s.heading - s.polar_angle()).sin() / rm)
}

/// Closed-form polar coordinates of the image point, `(|rho|, psi)`.
pub fn polar_transformed(map: &MobiusMap, s: &ActualState) -> Result<(f64, f64)> {
    let gap = (s.position + map.beta).norm();
    if gap <= map.pole_tol {
        return Err(Error::NearPole {
            distance: gap,
            tol: map.pole_tol,
        });
    }
    let a = map.alpha;
    let rm = s.radius();
    let phi = s.polar_angle();
    let num = a * a + rm * rm + 2.0 * a * rm * phi.cos();
    let den = 1.0 + a * a * rm * rm + 2.0 * a * rm * phi.cos();
    let modulus = a.abs() * (num / den).sqrt();
    // Signed component forms fix the quadrant of psi.
    let im = a * (1.0 - a * a) * rm * phi.sin();
    let re = a * (a * (1.0 + rm * rm) + (1.0 + a * a) * rm * phi.cos());
    Ok((modulus, im.atan2(re)))
}

/// Closed-form polar coordinates of the preimage point, `(|r|, phi)`.
pub fn polar_actual(map: &MobiusMap, s: &TransformedState) -> Result<(f64, f64)> {
    let gap = (s.position - Complex64::new(1.0, 0.0)).norm();
    if gap <= map.pole_tol {
        return Err(Error::NearPole {
            distance: gap,
            tol: map.pole_tol,
        });
    }
    let a = map.alpha;
    let b = map.beta;
    let rm = s.radius();
    let psi = s.polar_angle();
    let num = a * a + b * b * rm * rm - 2.0 * rm * psi.cos();
    let den = 1.0 + rm * rm - 2.0 * rm * psi.cos();
    let modulus = (num / den).sqrt();
    // Components carry a common factor 1/alpha, so the quadrant flips with
    // the sign of alpha.
    let sign = a.signum();
    let im = sign * (1.0 - a * a) * rm * psi.sin();
    let re = sign * ((1.0 + a * a) * rm * psi.cos() - (a * a + rm * rm));
    Ok((modulus, im.atan2(re)))
}
